"""Batch sweep driver: Monte-Carlo throughput experiments over one variable.

Each sweep cell is (value, zeta, direct-link flag, mode); every cell at
the same sweep value shares per-trial random streams, so optimized vs.
random, zeta = 0 vs. 1 and direct vs. blocked comparisons are paired.
The optimized mode seeds the alternating optimizer with the random-mode
configuration as an extra starting candidate, which makes the optimized
throughput dominate the random one trial by trial, not just on average.
"""

from __future__ import annotations

import copy
import csv
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import IO, Any, Iterable, Optional

import numpy as np

from .absorption import AbsorptionModel, default_table, load_table
from .channel import build_channel_set
from .config import ScenarioConfig, SweepSpec, build_scenario, deep_merge
from .optimizer import bcd_optimize, optimal_beamformer
from .scenario import resolve_geometry
from .signal_model import RisConfig, molecular_noise, sinr, throughput

CSV_HEADER = ("sweep_var", "value", "zeta", "direct", "mode",
              "mean_throughput_bps", "stderr_bps", "mean_iters", "failures", "wall_s")


@dataclass(frozen=True)
class ResultRow:
    sweep_var: str
    value: float
    zeta: int
    direct: bool
    mode: str
    mean_throughput_bps: float
    stderr_bps: float
    mean_iters: float
    failures: int
    wall_s: float

    def as_csv(self) -> list[str]:
        return [
            self.sweep_var, f"{self.value:.10g}", str(self.zeta),
            str(self.direct).lower(), self.mode,
            f"{self.mean_throughput_bps:.10g}", f"{self.stderr_bps:.10g}",
            f"{self.mean_iters:.4g}", str(self.failures), f"{self.wall_s:.3f}",
        ]


@dataclass(frozen=True)
class TrialResult:
    throughput_bps: float
    iterations: int
    trace_rows: tuple[tuple[int, float, float, float], ...] = ()  # (iter, gamma, t_star, delta)
    wall_s: float = 0.0


@lru_cache(maxsize=8)
def _absorption_for(path: str) -> AbsorptionModel:
    return load_table(path) if path else default_table()


def _apply_cell(raw: dict[str, Any], variable: str, value: float,
                zeta: int, direct: bool) -> dict[str, Any]:
    cell = copy.deepcopy(raw)
    cell["system"]["zeta"] = int(zeta)
    cell["system"]["direct_link_present"] = bool(direct)
    if variable == "ris_elements":
        cell["placement"]["n_ris_elements"] = int(round(value))
    elif variable == "rx_antennas":
        cell["placement"]["n_rx_antennas"] = int(round(value))
    elif variable == "ris_position_x":
        cell["placement"]["ris_position_m"] = [float(value), 0.0]
    elif variable == "frequency":
        cell["system"]["carrier_frequency_hz"] = float(value)
    else:
        raise ValueError(f"unknown sweep variable {variable!r}")
    return cell


def run_trial(cell_raw: dict[str, Any], mode: str, seed: int,
              value_index: int, trial: int, collect_trace: bool = False) -> TrialResult:
    """One Monte-Carlo realization of one sweep cell.

    Random streams derive from (seed, value_index, trial) only, never from
    zeta/direct/mode, so cells at the same sweep value are seed-paired.
    """
    config = build_scenario(cell_raw)
    ss = np.random.SeedSequence([seed, value_index, trial])
    rng_channel, rng_theta, rng_opt = (np.random.default_rng(s) for s in ss.spawn(3))

    geometry = resolve_geometry(config.placement)
    model = _absorption_for(config.absorption_table)
    channels = build_channel_set(geometry, config.system, model, rng_channel,
                                 spacing_ratio=config.spacing_ratio)
    noise = molecular_noise(geometry, config.system, model)
    theta_rand = RisConfig.random_phases(config.placement.n_ris_elements, rng_theta)

    if mode == "random":
        u = optimal_beamformer(theta_rand, channels, noise, config.system)
        gamma = sinr(u, theta_rand, channels, noise, config.system)
        return TrialResult(throughput(gamma, config.system.bandwidth), 0)
    if mode != "optimized":
        raise ValueError(f"unknown mode {mode!r}")

    _, _, trace = bcd_optimize(channels, noise, config.system, config.optimizer,
                               rng_opt, extra_initial_thetas=(theta_rand,))
    gamma = trace.gammas[-1]
    rows = ()
    if collect_trace:
        rows = tuple((i + 1, it.gamma, it.t_star, it.delta)
                     for i, it in enumerate(trace.iterations))
    return TrialResult(throughput(gamma, config.system.bandwidth),
                       len(trace.iterations), rows)


def _trial_task(args: tuple) -> tuple[int, int, Optional[TrialResult], Optional[str]]:
    cell_index, trial, cell_raw, mode, seed, value_index, collect_trace = args
    started = time.perf_counter()
    try:
        result = run_trial(cell_raw, mode, seed, value_index, trial, collect_trace)
        result = TrialResult(result.throughput_bps, result.iterations, result.trace_rows,
                             time.perf_counter() - started)
        return cell_index, trial, result, None
    except Exception as exc:  # recorded per-row, excluded from the mean
        return cell_index, trial, None, f"{type(exc).__name__}: {exc}"


def run_sweep(spec: SweepSpec, base_config: ScenarioConfig, seed: int,
              jobs: int = 1, trace_stream: Optional[IO[str]] = None) -> list[ResultRow]:
    """Run every cell of the sweep and aggregate per-cell statistics."""
    base_raw = deep_merge(base_config.raw, spec.overrides)

    cells: list[tuple[float, int, int, bool, str, dict[str, Any]]] = []
    for value_index, value in enumerate(spec.values):
        for zeta in spec.zeta_values:
            for direct in spec.direct_link:
                cell_raw = _apply_cell(base_raw, spec.variable, value, zeta, direct)
                for mode in spec.modes:
                    cells.append((value, value_index, zeta, direct, mode, cell_raw))

    collect_trace = trace_stream is not None
    tasks = []
    for cell_index, (_, value_index, _, _, mode, cell_raw) in enumerate(cells):
        for trial in range(spec.trials):
            tasks.append((cell_index, trial, cell_raw, mode, seed, value_index, collect_trace))

    outcomes: dict[int, list[tuple[int, Optional[TrialResult], Optional[str]]]] = {
        i: [] for i in range(len(cells))
    }
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for cell_index, trial, result, error in pool.map(_trial_task, tasks):
                outcomes[cell_index].append((trial, result, error))
    else:
        for task in tasks:
            cell_index, trial, result, error = _trial_task(task)
            outcomes[cell_index].append((trial, result, error))

    rows = []
    for cell_index, (value, value_index, zeta, direct, mode, _) in enumerate(cells):
        results = sorted(outcomes[cell_index], key=lambda item: item[0])
        throughputs = [r.throughput_bps for _, r, err in results if err is None]
        iters = [r.iterations for _, r, err in results if err is None]
        failures = sum(1 for _, _, err in results if err is not None)
        cell_wall = sum(r.wall_s for _, r, err in results if err is None)
        if trace_stream is not None:
            for trial, r, err in results:
                if err is None:
                    for it_no, gamma, t_star, delta in r.trace_rows:
                        trace_stream.write(
                            f"{spec.variable},{value:.10g},{zeta},{str(direct).lower()},"
                            f"{trial},{it_no},{gamma:.10g},{t_star:.10g},{delta:.10g}\n"
                        )
        if throughputs:
            mean = float(np.mean(throughputs))
            stderr = (float(np.std(throughputs, ddof=1)) / np.sqrt(len(throughputs))
                      if len(throughputs) > 1 else 0.0)
            mean_iters = float(np.mean(iters))
        else:
            mean = stderr = mean_iters = float("nan")
        rows.append(ResultRow(
            sweep_var=spec.variable, value=value, zeta=zeta, direct=direct, mode=mode,
            mean_throughput_bps=mean, stderr_bps=stderr, mean_iters=mean_iters,
            failures=failures, wall_s=cell_wall,
        ))
    return rows


def write_csv(rows: Iterable[ResultRow], stream: IO[str]) -> None:
    writer = csv.writer(stream)
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow(row.as_csv())
