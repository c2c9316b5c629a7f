"""Text reports rendered from jinja2 templates in tdcs/templates."""

from __future__ import annotations

import platform
from importlib import metadata
from pathlib import Path

from jinja2 import Environment, FileSystemLoader, StrictUndefined

TEMPLATE_DIR = Path(__file__).parent / "templates"

_env = Environment(
    loader=FileSystemLoader(str(TEMPLATE_DIR)),
    undefined=StrictUndefined,
    trim_blocks=True,
    lstrip_blocks=True,
    keep_trailing_newline=True,
)


def package_versions() -> dict:
    versions = {"python": platform.python_version()}
    for name in ("numpy", "scipy", "langgraph", "jinja2"):
        try:
            versions[name] = metadata.version(name)
        except metadata.PackageNotFoundError:
            versions[name] = "unknown"
    return versions


def render(template_name: str, **context) -> str:
    return _env.get_template(template_name).render(**context)
