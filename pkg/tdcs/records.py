"""Result records and their fixed CSV schemas."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import astuple, dataclass, fields
from pathlib import Path
from typing import Iterable, Sequence, Union


@dataclass(frozen=True)
class BerRecord:
    scheme: str
    n_bins: int
    n_clusters: int
    ebn0_db: float
    frames: int
    bits: int
    bit_errors: int
    symbol_errors: int

    @property
    def ber(self) -> float:
        return self.bit_errors / self.bits if self.bits else math.nan

    @property
    def ser(self) -> float:
        symbols = self.frames * self.n_clusters
        return self.symbol_errors / symbols if symbols else math.nan

    def row(self) -> list:
        return list(astuple(self)) + [f"{self.ber:.6e}", f"{self.ser:.6e}"]


@dataclass(frozen=True)
class EfficiencyRecord:
    scheme: str
    n_bins: int
    n_clusters: int
    eta_bits_per_s_per_hz: float
    required_ebn0_db_at_target_ber: float
    target_ber: float
    reached: bool
    below_grid: bool = False  # the value is only an upper bound

    def row(self) -> list:
        if not self.reached:
            required = "not reached"
        elif self.below_grid:
            required = "below grid"
        else:
            required = f"{self.required_ebn0_db_at_target_ber:.3f}"
        return [self.scheme, self.n_bins, self.n_clusters, f"{self.eta_bits_per_s_per_hz:.6f}", required, self.target_ber]


@dataclass(frozen=True)
class SidelobeRow:
    n_bins: int
    n_clusters: int
    trials: int
    beta_continuous: float
    beta_continuous_magnitude: float
    beta_min_random: float
    beta_min_random_magnitude: float

    def row(self) -> list:
        return [self.n_bins, self.n_clusters, self.trials] + [f"{v:.6f}" for v in astuple(self)[3:]]


BER_HEADER = [f.name for f in fields(BerRecord)] + ["ber", "ser"]
EFFICIENCY_HEADER = ["scheme", "n_bins", "n_clusters", "eta_bits_per_s_per_hz", "required_ebn0_db", "target_ber"]
SIDELOBE_HEADER = [f.name for f in fields(SidelobeRow)]


def format_csv(header: Sequence[str], records: Iterable) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for record in records:
        writer.writerow(record.row())
    return buffer.getvalue()


def write_csv(path: Union[str, Path], header: Sequence[str], records: Iterable) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_csv(header, records))
    return path
