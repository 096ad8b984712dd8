#!/usr/bin/env python3
"""Regenerate the packaged synthetic absorption table (100-450 GHz).

Sea-level-like continuum plus Lorentzian peaks at the well-known O2/H2O
line centers.  Magnitudes are plausible for 27C / 1 atm / 50% RH but the
table is synthetic; swap in measured data for quantitative work.
"""

import csv
from pathlib import Path

import numpy as np

OUT = Path(__file__).resolve().parents[1] / "src" / "thzris" / "data" / "absorption_100_450ghz.csv"

# (center GHz, peak strength 1/m, half-width GHz)
LINES = [
    (118.75, 0.004, 2.5),
    (183.31, 0.060, 3.0),
    (325.15, 0.100, 3.5),
    (380.20, 0.550, 4.0),
    (448.00, 0.300, 4.0),
]


def k_of_f(f_ghz: np.ndarray) -> np.ndarray:
    k = 2.0e-4 * (f_ghz / 100.0) ** 2.2  # continuum
    for f0, s, w in LINES:
        k = k + s * w**2 / ((f_ghz - f0) ** 2 + w**2)
    return k


def main() -> None:
    f_ghz = np.arange(100.0, 450.0 + 0.25, 0.5)
    k = k_of_f(f_ghz)
    OUT.parent.mkdir(parents=True, exist_ok=True)
    with open(OUT, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["frequency_hz", "k_per_m"])
        for f, kk in zip(f_ghz, k):
            writer.writerow([f"{f * 1e9:.0f}", f"{kk:.6e}"])
    print(f"wrote {OUT} ({len(f_ghz)} rows)")


if __name__ == "__main__":
    main()
