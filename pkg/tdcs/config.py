"""SimConfig: JSON sections on disk, a flat frozen dataclass in memory.

Precedence, lowest first: field defaults, the JSON file, TDCS_* environment
variables (a .env file is honoured), explicit overrides from the CLI.
"""

from __future__ import annotations

import json
import logging
import math
import os
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

from dotenv import load_dotenv

from .channel import COST207_RAX6, ChannelProfile, load_profile
from .coding import CodeConfig, bits_per_symbol, message_length
from .errors import ConfigError, TdcsError
from .spectrum import AvailabilityVector, BandScenario, build_availability

logger = logging.getLogger(__name__)

REFERENCE_SCENARIO = BandScenario(
    bandwidth_hz=10e6,
    occupied_ranges_hz=((2.5e6, 3.75e6), (6.25e6, 7.5e6)),
)

SCHEMES = ("continuous", "random")
CHANNELS = ("awgn", "multipath")
PHASE_SOURCES = ("uniform", "msequence")

# JSON section -> SimConfig fields it may hold
SECTIONS: Dict[str, Tuple[str, ...]] = {
    "scenario": ("bandwidth_hz", "occupied_ranges_hz"),
    "waveform": ("n_bins", "m_order", "phase_seed", "phase_source"),
    "allocation": ("scheme", "clusters", "partition_trials"),
    "channel": ("channel", "profile_path", "sample_rate_hz"),
    "coding": ("coding", "constraint_length", "generator_polynomials", "interleaver_seed", "frames_per_block"),
    "simulation": (
        "seed", "ebn0_grid_db", "max_frames", "min_bit_errors", "batch_frames",
        "target_ber", "bisection_steps", "workers", "max_revisions",
    ),
    "output": ("name", "output_dir", "manifest"),
}

ENV_OVERRIDES = {
    "TDCS_SEED": ("seed", int),
    "TDCS_WORKERS": ("workers", int),
    "TDCS_OUTPUT_DIR": ("output_dir", str),
}


@dataclass(frozen=True)
class SimConfig:
    bandwidth_hz: float = REFERENCE_SCENARIO.bandwidth_hz
    occupied_ranges_hz: Tuple[Tuple[float, float], ...] = REFERENCE_SCENARIO.occupied_ranges_hz
    n_bins: int = 256
    m_order: Optional[int] = None  # None means M = N
    phase_seed: int = 1
    phase_source: str = "uniform"
    scheme: str = "random"
    clusters: Tuple[int, ...] = (1, 2, 4, 8)
    partition_trials: int = 1000
    channel: str = "awgn"
    profile_path: Optional[str] = None  # None means the built-in COST207 RAx6
    sample_rate_hz: Optional[float] = None  # None means W
    coding: bool = False
    constraint_length: int = 7
    generator_polynomials: Tuple[int, int] = (0o171, 0o133)
    interleaver_seed: int = 7
    frames_per_block: int = 32
    seed: int = 2024
    ebn0_grid_db: Tuple[float, ...] = (0.0, 2.0, 4.0, 6.0, 8.0, 10.0)
    max_frames: int = 20_000
    min_bit_errors: int = 200
    batch_frames: int = 64
    target_ber: float = 1e-3
    bisection_steps: int = 4
    workers: int = 1
    max_revisions: int = 1
    name: str = "sweep"
    output_dir: str = "results"
    manifest: bool = True
    source: Optional[str] = field(default=None, compare=False)

    @property
    def scenario(self) -> BandScenario:
        return BandScenario(bandwidth_hz=self.bandwidth_hz, occupied_ranges_hz=self.occupied_ranges_hz)

    @property
    def modulation_order(self) -> int:
        return self.m_order or self.n_bins

    @property
    def code(self) -> Optional[CodeConfig]:
        if not self.coding:
            return None
        return CodeConfig(
            constraint_length=self.constraint_length,
            generator_polynomials=tuple(self.generator_polynomials),
            interleaver_seed=self.interleaver_seed,
        )

    @property
    def effective_sample_rate_hz(self) -> float:
        return self.sample_rate_hz or self.bandwidth_hz

    def profile(self) -> Optional[ChannelProfile]:
        if self.channel != "multipath":
            return None
        if not self.profile_path:
            return COST207_RAX6
        path = Path(self.profile_path)
        # relative paths are taken from the config file's directory
        if not path.is_absolute() and self.source:
            path = Path(self.source).parent / path
        try:
            return load_profile(path)
        except OSError as exc:
            raise ConfigError(f"cannot read channel profile {path}: {exc}") from exc

    def sections(self) -> Dict[str, Dict[str, Any]]:
        flat = asdict(self)
        return {section: {key: flat[key] for key in keys} for section, keys in SECTIONS.items()}


def _coerce(name: str, value: Any) -> Any:
    if name == "ebn0_grid_db":
        return tuple(float(v) for v in value)
    if name == "occupied_ranges_hz":
        return tuple((float(lo), float(hi)) for lo, hi in value)
    if name == "clusters":
        return tuple(int(v) for v in value)
    if name == "generator_polynomials":
        # octal strings ("171") or integers
        return tuple(int(v, 8) if isinstance(v, str) else int(v) for v in value)
    return value


def validate(config: SimConfig) -> AvailabilityVector:
    """Check every cross-field constraint; returns the availability vector."""
    try:
        avail = build_availability(config.scenario, config.n_bins)
        n, m = config.n_bins, config.modulation_order
        if m < 2 or n % m:
            raise ConfigError(f"M={m} must divide N={n}")
        bits_per_symbol(m)
        if config.scheme not in SCHEMES:
            raise ConfigError(f"scheme must be one of {SCHEMES}, got {config.scheme!r}")
        if config.channel not in CHANNELS:
            raise ConfigError(f"channel must be one of {CHANNELS}, got {config.channel!r}")
        if config.phase_source not in PHASE_SOURCES:
            raise ConfigError(f"phase_source must be one of {PHASE_SOURCES}, got {config.phase_source!r}")
        if not config.clusters:
            raise ConfigError("at least one cluster count is required")
        for l in config.clusters:
            if l < 1 or avail.n_unoccupied % l:
                raise ConfigError(f"L={l} does not divide N_C={avail.n_unoccupied}")
        if not config.ebn0_grid_db:
            raise ConfigError("Eb/N0 grid is empty")
        if any(math.isnan(v) for v in config.ebn0_grid_db):
            raise ConfigError("Eb/N0 grid holds NaN")
        if config.max_frames < 1 or config.min_bit_errors < 1 or config.batch_frames < 1:
            raise ConfigError("max_frames, min_bit_errors and batch_frames must be positive")
        if config.partition_trials < 1:
            raise ConfigError("partition_trials must be positive")
        if not 0 < config.target_ber < 0.5:
            raise ConfigError(f"target BER must lie in (0, 0.5), got {config.target_ber}")
        profile = config.profile()
        if profile is not None:
            if n % 4:
                raise ConfigError(f"multipath needs N divisible by 4, got N={n}")
            memory = int(profile.delay_samples(config.effective_sample_rate_hz).max())
            if memory >= n // 4:
                raise ConfigError(f"CP too short: {profile.name} delay reaches {memory} samples, CP holds {n // 4}")
        code = config.code
        if code is not None:
            for l in config.clusters:
                message_length(config.frames_per_block, l, m, code.constraint_length)
    except ConfigError:
        raise
    except TdcsError as exc:
        raise ConfigError(str(exc)) from exc
    return avail


def load_config(
    path: Union[str, Path, None] = None,
    overrides: Optional[Dict[str, Any]] = None,
) -> SimConfig:
    load_dotenv()
    values: Dict[str, Any] = {}
    if path is not None:
        try:
            raw = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        for section, entries in raw.items():
            allowed = SECTIONS.get(section)
            if allowed is None:
                raise ConfigError(f"unknown config section [{section}]")
            for key, value in entries.items():
                if key not in allowed:
                    raise ConfigError(f"unknown key {key!r} in section [{section}]")
                values[key] = _coerce(key, value)

    for env_name, (key, cast) in ENV_OVERRIDES.items():
        env_value = os.getenv(env_name)
        if env_value:
            values[key] = cast(env_value)

    known = {f.name for f in fields(SimConfig)}
    for key, value in (overrides or {}).items():
        if key not in known:
            raise ConfigError(f"unknown override {key!r}")
        if value is not None:
            values[key] = _coerce(key, value)

    config = SimConfig(source=str(path) if path else None, **values)
    validate(config)
    logger.debug("loaded config %s from %s", config.name, path or "defaults")
    return config


def reference_mode(config: SimConfig) -> SimConfig:
    """Long-running settings: BER 1e-4 target and 10^4 partition trials."""
    return replace(config, target_ber=1e-4, partition_trials=10_000)
