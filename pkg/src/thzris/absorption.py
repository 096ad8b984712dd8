"""Molecular absorption: coefficient table, transmittance, Rician factor.

The absorption coefficient k(f) [1/m] is read from a tabulated CSV
(`frequency_hz,k_per_m`, frequencies ascending) and interpolated
piecewise-linearly in frequency.  Atmosphere descriptors (temperature,
pressure, humidity) are provenance metadata of the table, not inputs to
the computation.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

DEFAULT_TABLE_RESOURCE = "absorption_100_450ghz.csv"


class FrequencyRangeError(ValueError):
    """Requested frequency lies outside the tabulated range (no extrapolation)."""


@dataclass(frozen=True)
class AbsorptionModel:
    """Tabulated absorption coefficient with linear interpolation in f."""

    frequencies_hz: np.ndarray  # strictly increasing, Hz
    k_per_m: np.ndarray         # >= 0, 1/m
    provenance: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        f = np.asarray(self.frequencies_hz, dtype=float)
        k = np.asarray(self.k_per_m, dtype=float)
        if f.ndim != 1 or f.shape != k.shape or f.size < 2:
            raise ValueError("absorption table needs matching 1-D frequency/k arrays, >= 2 rows")
        if not np.all(np.diff(f) > 0):
            raise ValueError("absorption table frequencies must be strictly increasing")
        if np.any(k < 0) or not np.all(np.isfinite(k)):
            raise ValueError("absorption coefficients must be finite and >= 0")
        object.__setattr__(self, "frequencies_hz", f)
        object.__setattr__(self, "k_per_m", k)

    def coefficient(self, f: float) -> float:
        """k(f) in 1/m; raises FrequencyRangeError outside the table."""
        lo, hi = self.frequencies_hz[0], self.frequencies_hz[-1]
        if not (lo <= f <= hi):
            raise FrequencyRangeError(
                f"frequency {f:.6g} Hz outside table range [{lo:.6g}, {hi:.6g}] Hz"
            )
        return float(np.interp(f, self.frequencies_hz, self.k_per_m))

    @classmethod
    def constant(cls, k: float, f_lo: float = 1e9, f_hi: float = 1e13) -> "AbsorptionModel":
        """Flat k(f) across [f_lo, f_hi]; handy for controlled experiments."""
        return cls(np.array([f_lo, f_hi]), np.array([k, k], dtype=float),
                   provenance=f"constant k={k}")


def load_table(path: str | Path) -> AbsorptionModel:
    """Load a `frequency_hz,k_per_m` CSV (sorted ascending)."""
    freqs: list[float] = []
    ks: list[float] = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["frequency_hz", "k_per_m"]:
            raise ValueError(f"{path}: expected header 'frequency_hz,k_per_m'")
        for row in reader:
            if not row or not row[0].strip():
                continue
            freqs.append(float(row[0]))
            ks.append(float(row[1]))
    return AbsorptionModel(np.array(freqs), np.array(ks), provenance=str(path))


def default_table() -> AbsorptionModel:
    """Synthetic sea-level table shipped with the package (100-450 GHz)."""
    ref = resources.files("thzris").joinpath("data", DEFAULT_TABLE_RESOURCE)
    with resources.as_file(ref) as path:
        model = load_table(path)
    return AbsorptionModel(model.frequencies_hz, model.k_per_m,
                           provenance="packaged synthetic table, 27C / 1 atm / 50% RH")


def transmittance(model: AbsorptionModel, f: float, d: float) -> float:
    """Fraction of power surviving absorption over distance d: exp(-k(f) * d)."""
    if d < 0:
        raise ValueError(f"distance must be >= 0, got {d}")
    return math.exp(-model.coefficient(f) * d)


def rician_factor(model: AbsorptionModel, f: float, d: float) -> float:
    """LOS/NLOS power ratio K = tau / (1 - tau); +inf at tau = 1.

    Callers that need the channel coefficients should use the equivalent
    forms K/(K+1) = tau and 1/(K+1) = 1 - tau, which stay finite.
    """
    tau = transmittance(model, f, d)
    if tau >= 1.0:
        return math.inf
    return tau / (1.0 - tau)
