"""Experiment configuration: TOML tree -> validated scenario objects.

A config file has four sections: [system], [placement], [optimizer] and
[sweep.<name>] tables.  Units in the file: meters, Hz, watts, degrees;
angles are converted to radians internally.  Any key omitted by a user
config falls back to the built-in default scenario, so partial files are
fine.  Paths (the absorption table) resolve relative to the config file.
"""

from __future__ import annotations

import copy
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .absorption import AbsorptionModel, default_table, load_table
from .optimizer import OptimizerConfig
from .scenario import Placement, SystemParams

SWEEP_VARIABLES = ("ris_elements", "rx_antennas", "ris_position_x", "frequency")
MODES = ("optimized", "random")

_SQRT3_2 = math.sqrt(3.0) / 2.0
_RING = [
    [6.0 * math.cos(math.radians(a)), 6.0 * math.sin(math.radians(a))]
    for a in (5.0, 75.0, 135.0)
]

# Indoor ad-hoc default: Rx at the origin, RIS 1 m down the x-axis, desired
# Tx at 1 m / 60 deg, three 2 W interferers on a 6 m ring.  Array normals
# face the scene so that every link stays inside the front hemisphere
# (from the RIS the link directions span 6..180 deg, from the Rx 0..135 deg).
DEFAULT_RAW: dict[str, Any] = {
    "system": {
        "carrier_frequency_hz": 220e9,
        "bandwidth_hz": 10e9,
        "tx_powers_w": [2.0, 2.0, 2.0, 2.0],
        "thermal_noise_density_w_per_hz": 10.0 ** ((-174.0 - 30.0) / 10.0),
        "zeta": 1,
        "temperature_k": 300.15,
        "pressure_atm": 1.0,
        "relative_humidity": 0.5,
        "direct_link_present": True,
        "absorption_table": "",
    },
    "placement": {
        "rx_position_m": [0.0, 0.0],
        "ris_position_m": [1.0, 0.0],
        "tx_positions_m": [[0.5, _SQRT3_2], *copy.deepcopy(_RING)],
        "rx_array_normal_deg": 67.5,
        "ris_array_normal_deg": 93.0,
        "n_rx_antennas": 100,
        "n_ris_elements": 250,
        "element_spacing_ratio": 0.5,
        "allow_endfire": False,
    },
    "optimizer": {
        "epsilon": 1e-5,
        "bisection_upper": 1e10,
        "bisection_tol": 1e-5,
        "n_randomizations": 5000,
        "max_bcd_iterations": 50,
        "rng_seed": 1,
        "sdp_tolerance": 1e-7,
    },
    "sweep": {
        "ris_elements": {
            "variable": "ris_elements",
            "values": [10, 50, 100, 150, 200, 250],
            "trials": 50,
            "modes": ["optimized", "random"],
            "zeta_values": [0, 1],
            "direct_link": [True, False],
        },
        "rx_antennas": {
            "variable": "rx_antennas",
            "values": [20, 40, 60, 80, 100],
            "trials": 50,
            "modes": ["optimized", "random"],
            "zeta_values": [0, 1],
            "direct_link": [False],
        },
        # collinear Rx--RIS--Tx0 layout: the RIS normal turns to +y and the
        # hemisphere check widens to the closed interval (endfire links)
        "ris_position_x": {
            "variable": "ris_position_x",
            "values": [0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75],
            "trials": 50,
            "modes": ["optimized", "random"],
            "zeta_values": [0, 1],
            "direct_link": [False],
            "overrides": {
                "placement": {
                    "tx_positions_m": [[2.0, 0.0], *copy.deepcopy(_RING)],
                    "ris_array_normal_deg": 90.0,
                    "allow_endfire": True,
                    "n_ris_elements": 50,
                },
            },
        },
        "frequency": {
            "variable": "frequency",
            "values": [140e9, 183e9, 220e9, 260e9, 325e9, 380e9, 420e9],
            "trials": 50,
            "modes": ["optimized", "random"],
            "zeta_values": [0, 1],
            "direct_link": [False],
            "overrides": {"placement": {"n_ris_elements": 50}},
        },
    },
}


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    values: tuple[float, ...]
    trials: int = 50
    modes: tuple[str, ...] = MODES
    zeta_values: tuple[int, ...] = (0, 1)
    direct_link: tuple[bool, ...] = (True, False)
    overrides: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.variable not in SWEEP_VARIABLES:
            raise ValueError(f"unknown sweep variable {self.variable!r}")
        if not self.values:
            raise ValueError("sweep values must be non-empty")
        vals = tuple(float(v) for v in self.values)
        if any(b < a for a, b in zip(vals, vals[1:])):
            raise ValueError("sweep values must be sorted ascending")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.modes or any(mode not in MODES for mode in self.modes):
            raise ValueError(f"modes must be a non-empty subset of {MODES}")
        if not self.zeta_values or any(z not in (0, 1) for z in self.zeta_values):
            raise ValueError("zeta_values must be a non-empty subset of {0, 1}")
        if not self.direct_link:
            raise ValueError("direct_link must be non-empty")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "modes", tuple(self.modes))
        object.__setattr__(self, "zeta_values", tuple(int(z) for z in self.zeta_values))
        object.__setattr__(self, "direct_link", tuple(bool(d) for d in self.direct_link))


@dataclass(frozen=True)
class ScenarioConfig:
    system: SystemParams
    placement: Placement
    optimizer: OptimizerConfig
    spacing_ratio: float
    absorption_table: str                      # resolved path; "" -> packaged table
    sweeps: Mapping[str, SweepSpec] = field(default_factory=dict)
    raw: Mapping[str, Any] = field(default_factory=dict, repr=False, compare=False)

    def load_absorption(self) -> AbsorptionModel:
        if self.absorption_table:
            return load_table(self.absorption_table)
        return default_table()


def deep_merge(base: Mapping[str, Any], override: Mapping[str, Any]) -> dict[str, Any]:
    """Nested dict merge; override wins, sub-tables merge recursively."""
    merged = copy.deepcopy(dict(base))
    for key, value in override.items():
        if key in merged and isinstance(merged[key], dict) and isinstance(value, Mapping):
            merged[key] = deep_merge(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def _parse_sweeps(raw_sweeps: Mapping[str, Any]) -> dict[str, SweepSpec]:
    sweeps = {}
    for name, entry in raw_sweeps.items():
        if not isinstance(entry, Mapping):
            raise ValueError(f"[sweep.{name}] must be a table")
        sweeps[name] = SweepSpec(
            variable=entry.get("variable", name),
            values=tuple(entry["values"]),
            trials=int(entry.get("trials", 50)),
            modes=tuple(entry.get("modes", MODES)),
            zeta_values=tuple(entry.get("zeta_values", (0, 1))),
            direct_link=tuple(entry.get("direct_link", (True, False))),
            overrides=dict(entry.get("overrides", {})),
        )
    return sweeps


def build_scenario(raw: Mapping[str, Any], base_dir: Path | None = None) -> ScenarioConfig:
    """Validate a raw config tree and construct the typed scenario objects."""
    sys_raw = raw["system"]
    pl_raw = raw["placement"]
    opt_raw = raw.get("optimizer", {})

    tx_positions = tuple(tuple(map(float, p)) for p in pl_raw["tx_positions_m"])
    tx_powers = tuple(float(p) for p in sys_raw["tx_powers_w"])
    if len(tx_powers) != len(tx_positions):
        raise ValueError(
            f"tx_powers_w ({len(tx_powers)}) and tx_positions_m ({len(tx_positions)}) "
            "must list the same transmitters"
        )

    system = SystemParams(
        carrier_frequency=float(sys_raw["carrier_frequency_hz"]),
        bandwidth=float(sys_raw["bandwidth_hz"]),
        tx_powers=tx_powers,
        thermal_noise_density=float(sys_raw["thermal_noise_density_w_per_hz"]),
        zeta=int(sys_raw["zeta"]),
        temperature=float(sys_raw.get("temperature_k", 300.15)),
        pressure=float(sys_raw.get("pressure_atm", 1.0)),
        relative_humidity=float(sys_raw.get("relative_humidity", 0.5)),
        direct_link_present=bool(sys_raw.get("direct_link_present", True)),
    )
    placement = Placement(
        rx_position=tuple(map(float, pl_raw["rx_position_m"])),
        ris_position=tuple(map(float, pl_raw["ris_position_m"])),
        tx_positions=tx_positions,
        rx_array_normal=math.radians(float(pl_raw.get("rx_array_normal_deg", 0.0))),
        ris_array_normal=math.radians(float(pl_raw.get("ris_array_normal_deg", 180.0))),
        n_rx_antennas=int(pl_raw["n_rx_antennas"]),
        n_ris_elements=int(pl_raw["n_ris_elements"]),
        allow_endfire=bool(pl_raw.get("allow_endfire", False)),
    )
    optimizer = OptimizerConfig(
        epsilon=float(opt_raw.get("epsilon", 1e-5)),
        bisection_upper=float(opt_raw.get("bisection_upper", 1e10)),
        bisection_tol=float(opt_raw.get("bisection_tol", 1e-5)),
        n_randomizations=int(opt_raw.get("n_randomizations", 5000)),
        max_bcd_iterations=int(opt_raw.get("max_bcd_iterations", 50)),
        rng_seed=int(opt_raw.get("rng_seed", 0)),
        sdp_tolerance=float(opt_raw.get("sdp_tolerance", 1e-7)),
    )

    table = str(sys_raw.get("absorption_table", "") or "")
    if table and base_dir is not None and not Path(table).is_absolute():
        table = str((base_dir / table).resolve())

    return ScenarioConfig(
        system=system,
        placement=placement,
        optimizer=optimizer,
        spacing_ratio=float(pl_raw.get("element_spacing_ratio", 0.5)),
        absorption_table=table,
        sweeps=_parse_sweeps(raw.get("sweep", {})),
        raw=copy.deepcopy(dict(raw)),
    )


def default_scenario() -> ScenarioConfig:
    """The built-in indoor scenario with all four predefined sweeps."""
    return build_scenario(DEFAULT_RAW)


def load_config(path: str | Path) -> ScenarioConfig:
    """Load a TOML config, filling missing keys from the default scenario."""
    path = Path(path)
    with open(path, "rb") as fh:
        user_raw = tomllib.load(fh)
    return build_scenario(deep_merge(DEFAULT_RAW, user_raw), base_dir=path.parent)
