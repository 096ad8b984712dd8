"""Scenario description: system parameters, node placement, link geometry.

Planar (2-D) layout: every node is an (x, y) point in meters, both arrays
are uniform linear arrays, and each array has a broadside normal given as
an angle in the plane.  A link's steering angle is the signed angle
between the link direction and that normal, so it must stay inside the
front hemisphere (-pi/2, pi/2); `allow_endfire` widens the check to the
closed interval for deliberately collinear layouts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


class GeometryError(ValueError):
    """Placement cannot be resolved into a valid set of links."""


class FrontHemisphereError(GeometryError):
    """A link arrives/departs outside the array's front hemisphere."""


@dataclass(frozen=True)
class SystemParams:
    carrier_frequency: float          # Hz
    bandwidth: float                  # Hz
    tx_powers: tuple[float, ...]      # W; index 0 = Tx of interest, rest interferers
    thermal_noise_density: float      # W/Hz
    zeta: int                         # 1: re-radiation as additive noise, 0: as scattering
    temperature: float = 300.15       # K, absorption-table provenance only
    pressure: float = 1.0             # atm, provenance only
    relative_humidity: float = 0.5    # fraction, provenance only
    direct_link_present: bool = True

    def __post_init__(self) -> None:
        if self.carrier_frequency <= 0:
            raise ValueError("carrier_frequency must be > 0")
        if self.bandwidth <= 0:
            raise ValueError("bandwidth must be > 0")
        if not self.tx_powers or any(p <= 0 for p in self.tx_powers):
            raise ValueError("tx_powers must be non-empty and all > 0")
        if self.zeta not in (0, 1):
            raise ValueError("zeta must be 0 or 1")
        if self.thermal_noise_density < 0:
            raise ValueError("thermal_noise_density must be >= 0")
        object.__setattr__(self, "tx_powers", tuple(float(p) for p in self.tx_powers))

    @property
    def n_interferers(self) -> int:
        return len(self.tx_powers) - 1


@dataclass(frozen=True)
class Placement:
    rx_position: tuple[float, float]            # m
    ris_position: tuple[float, float]           # m
    tx_positions: tuple[tuple[float, float], ...]  # m; index 0 = Tx of interest
    rx_array_normal: float = 0.0                # rad, broadside direction of the Rx ULA
    ris_array_normal: float = math.pi           # rad, broadside direction of the RIS ULA
    n_rx_antennas: int = 1
    n_ris_elements: int = 1
    allow_endfire: bool = False                 # accept |angle| == pi/2 (collinear sweeps)

    def __post_init__(self) -> None:
        if self.n_rx_antennas < 1:
            raise ValueError("n_rx_antennas must be >= 1")
        # n_ris_elements == 0 is the degenerate no-RIS case used by link-budget checks
        if self.n_ris_elements < 0:
            raise ValueError("n_ris_elements must be >= 0")
        if not self.tx_positions:
            raise ValueError("at least one transmitter is required")
        object.__setattr__(self, "rx_position", tuple(map(float, self.rx_position)))
        object.__setattr__(self, "ris_position", tuple(map(float, self.ris_position)))
        object.__setattr__(
            self, "tx_positions", tuple(tuple(map(float, p)) for p in self.tx_positions)
        )
        nodes = [self.rx_position, self.ris_position, *self.tx_positions]
        for i in range(len(nodes)):
            for j in range(i + 1, len(nodes)):
                if math.dist(nodes[i], nodes[j]) <= 0.0:
                    raise GeometryError(f"coincident node positions at index pair ({i}, {j})")


@dataclass(frozen=True)
class Geometry:
    """Distances/angles for every link, indexed by transmitter where applicable."""

    d: tuple[float, ...]         # Tx_i -> Rx, m
    d_gamma: tuple[float, ...]   # Tx_i -> RIS, m
    d_alpha: float               # RIS -> Rx, m
    theta_r: tuple[float, ...]   # arrival at Rx from Tx_i, rad
    theta_s: tuple[float, ...]   # arrival at RIS from Tx_i, rad
    theta_alpha: float           # arrival at Rx from RIS, rad
    theta_beta: float            # departure at RIS toward Rx, rad
    n_rx_antennas: int = field(default=1)
    n_ris_elements: int = field(default=1)

    @property
    def n_transmitters(self) -> int:
        return len(self.d)


def _wrap_angle(angle: float) -> float:
    """Wrap to (-pi, pi]."""
    wrapped = math.remainder(angle, 2.0 * math.pi)
    if wrapped <= -math.pi:
        wrapped += 2.0 * math.pi
    return wrapped


def _steering_angle(array_pos: tuple[float, float], toward: tuple[float, float],
                    normal: float, allow_endfire: bool, label: str) -> float:
    """Signed angle of the direction array->toward against the array's normal."""
    dx, dy = toward[0] - array_pos[0], toward[1] - array_pos[1]
    if math.hypot(dx, dy) <= 0.0:
        raise GeometryError(f"{label}: coincident endpoints")
    theta = _wrap_angle(math.atan2(dy, dx) - normal)
    limit = math.pi / 2.0
    tol = 1e-12
    if allow_endfire:
        if abs(theta) > limit + tol:
            raise FrontHemisphereError(f"{label}: angle {theta:.4f} rad outside [-pi/2, pi/2]")
        theta = max(-limit, min(limit, theta))
    elif abs(theta) >= limit - tol:
        raise FrontHemisphereError(f"{label}: angle {theta:.4f} rad outside (-pi/2, pi/2)")
    return theta


def resolve_geometry(placement: Placement) -> Geometry:
    """Resolve node coordinates into per-link distances and steering angles."""
    rx, ris = placement.rx_position, placement.ris_position
    endfire = placement.allow_endfire
    rx_n, ris_n = placement.rx_array_normal, placement.ris_array_normal

    d_alpha = math.dist(ris, rx)
    theta_alpha = _steering_angle(rx, ris, rx_n, endfire, "arrival Rx<-RIS")
    theta_beta = _steering_angle(ris, rx, ris_n, endfire, "departure RIS->Rx")

    d, d_gamma, theta_r, theta_s = [], [], [], []
    for i, tx in enumerate(placement.tx_positions):
        d.append(math.dist(tx, rx))
        d_gamma.append(math.dist(tx, ris))
        theta_r.append(_steering_angle(rx, tx, rx_n, endfire, f"arrival Rx<-Tx{i}"))
        theta_s.append(_steering_angle(ris, tx, ris_n, endfire, f"arrival RIS<-Tx{i}"))

    return Geometry(
        d=tuple(d),
        d_gamma=tuple(d_gamma),
        d_alpha=d_alpha,
        theta_r=tuple(theta_r),
        theta_s=tuple(theta_s),
        theta_alpha=theta_alpha,
        theta_beta=theta_beta,
        n_rx_antennas=placement.n_rx_antennas,
        n_ris_elements=placement.n_ris_elements,
    )
