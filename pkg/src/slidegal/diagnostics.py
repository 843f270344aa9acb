"""Run-time checks of the energy estimates behind the Galerkin convergence result.

For every trajectory we evaluate

* the control growth bound   ||u||^2_{L2(0,t)} <= M int_0^t |y|^2 ds + N,
* the energy inequality      |y(t)|^2 + alpha int_0^t [y]^2 <= c1 + c2 int_0^t |y|^2,
* the uniform bound          sup_t |y(t)| <= K,

and across a sweep of Galerkin dimensions the Cauchy gaps between nested
approximations. Time integrals use the trapezoid rule on the recorded grid.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .galerkin import GalerkinSystem, assemble, default_quadrature, project_covector
from .problem import CoercivityReport, ProblemSpec
from .sim import SimConfig, Trajectory, simulate
from .sliding import ControllerConfig


# relative allowance for floating-point summation in the running integrals
ROUNDOFF = 1e-12


@dataclass(frozen=True)
class GrowthCheck:
    holds: bool
    fitted_M: float
    fitted_N: float
    worst_margin: float


@dataclass(frozen=True, eq=False)
class EnergyCheck:
    holds: bool
    lhs: np.ndarray
    rhs: np.ndarray
    c1_used: float
    c2_used: float
    uniform_bound: float

    @property
    def worst_margin(self) -> float:
        return float(np.min(self.rhs - self.lhs))


@dataclass(frozen=True)
class ConvergenceTable:
    dims: list
    pair_gaps: list
    sliding_sups: list
    uniform_bounds: list
    l2_control_norms: list
    reaching_times: list


class SweepError(RuntimeError):
    def __init__(self, dim: int, cause: Exception):
        super().__init__(f"N={dim}: {cause}")
        self.dim = dim


def _running_integral(values: np.ndarray, times: np.ndarray) -> np.ndarray:
    if len(times) < 2:
        return np.zeros_like(values, dtype=float)
    return cumulative_trapezoid(values, times, initial=0.0)


def growth_constants(sys: GalerkinSystem, cfg: ControllerConfig, T: float) -> tuple[float, float]:
    """(M, N) for which the growth bound holds a priori for this controller.

    Margin-gain laws: |u| <= U/|gamma_g| <= (||gamma_A|| |xi| / |gamma_g|) + rho,
    squared with (a + b)^2 <= 2a^2 + 2b^2. A saturation cap gives (0, T u_max^2).
    """
    gamma_A, gamma_g = project_covector(sys)
    if cfg.mode == "open_loop_zero":
        return 0.0, 0.0
    if cfg.mode == "open_loop_constant":
        return 0.0, T * cfg.value**2
    if cfg.u_max is not None:
        return 0.0, T * cfg.u_max**2
    ratio = float(np.linalg.norm(gamma_A)) / abs(gamma_g)
    if cfg.mode == "equivalent":
        return ratio**2, 0.0
    return 2.0 * ratio**2, 2.0 * cfg.rho**2 * T


def check_growth(traj: Trajectory, M: float, N_const: float, rtol: float = ROUNDOFF) -> GrowthCheck:
    """Growth bound along the run; ``rtol`` absorbs summation round-off relative to the sides.

    Both integrals use the simulator's step-resolution left-endpoint sums when
    available, so a pointwise bound |u| <= c |y| carries over exactly.
    """
    lhs = traj.control_l2_running
    if traj.state_l2_running is not None:
        energy = traj.state_l2_running
    else:
        energy = _running_integral(traj.h_norms**2, traj.times)
    margins = M * energy + N_const - lhs
    worst = float(np.min(margins))
    slack = rtol * float(np.max(np.abs(lhs)))

    fitted_N = max(0.0, float(np.max(lhs - M * energy)))
    # least M' <= M that still passes with fitted_N
    excess = lhs - fitted_N
    pos = energy > 0
    fitted_M = max(0.0, float(np.max(excess[pos] / energy[pos]))) if pos.any() else 0.0
    fitted_M = min(fitted_M, M)
    # undo rounding in the division: grow M' by ulps, then N' relatively
    for _ in range(8):
        if np.min(fitted_M * energy + fitted_N - lhs) >= 0:
            break
        fitted_M = min(float(np.nextafter(fitted_M, math.inf)), M)
    deficit = float(np.max(lhs - fitted_M * energy - fitted_N))
    while deficit > 0:
        fitted_N += max(deficit, 4 * np.finfo(float).eps * fitted_N)
        deficit = float(np.max(lhs - fitted_M * energy - fitted_N))
    return GrowthCheck(holds=worst >= -slack, fitted_M=fitted_M, fitted_N=float(fitted_N),
                       worst_margin=worst)


def check_energy(traj: Trajectory, report: CoercivityReport, rtol: float = ROUNDOFF) -> EnergyCheck:
    """Energy inequality with constants built from alpha, nu and the trace bound.

    c1 = |y(0)|^2 + (c^2/alpha) ||u||^2_{L2(0,T)},  c2 = alpha + 2|nu|,
    where c^2 is the trace constant estimate of ``report``.
    """
    n_state = traj.states.shape[1]
    if report.probe_dimension < n_state:
        raise ValueError(
            f"report probe dimension {report.probe_dimension} is smaller than the "
            f"trajectory dimension {n_state}; the trace bound would not cover it")
    alpha = report.alpha
    c1 = traj.h_norms[0] ** 2 + report.trace_constant_estimate / alpha * traj.control_l2_running[-1]
    c2 = alpha + 2.0 * abs(report.nu)
    lhs = traj.h_norms**2 + alpha * _running_integral(traj.seminorms**2, traj.times)
    rhs = c1 + c2 * _running_integral(traj.h_norms**2, traj.times)
    return EnergyCheck(holds=bool(np.all(lhs <= rhs + rtol * np.abs(rhs))), lhs=lhs, rhs=rhs, c1_used=float(c1),
                       c2_used=float(c2), uniform_bound=float(np.max(traj.h_norms)))


def sliding_rates(traj: Trajectory, sys: GalerkinSystem) -> np.ndarray:
    """z' = -gamma_A . xi + u gamma_g at every sample."""
    gamma_A, gamma_g = project_covector(sys)
    return -(traj.states @ gamma_A) + traj.u * gamma_g


def step_rates(traj: Trajectory) -> np.ndarray:
    """Realized rates (z[i+1] - z[i]) / (t[i+1] - t[i]) between samples."""
    return np.diff(traj.z) / np.diff(traj.times)


def reaching_index(traj: Trajectory, cfg: ControllerConfig) -> int | None:
    """First sample on or across the surface (sign of z differs from z(0) or z = 0).

    In boundary-layer mode entering the layer |z| <= delta also counts.
    Returns None if the surface is never reached.
    """
    z = traj.z
    reached = (z == 0) | (np.sign(z) != np.sign(z[0]))
    if cfg.mode == "boundary_layer":
        reached |= np.abs(z) <= cfg.delta
    idx = np.flatnonzero(reached)
    return int(idx[0]) if idx.size else None


def reaching_time(traj: Trajectory, cfg: ControllerConfig) -> float | None:
    i = reaching_index(traj, cfg)
    return None if i is None else float(traj.times[i])


def chatter_band(traj: Trajectory, cfg: ControllerConfig) -> float:
    """sup |z| from the reaching sample on; nan if the surface is never reached."""
    i = reaching_index(traj, cfg)
    return math.nan if i is None else float(np.max(np.abs(traj.z[i:])))


def sweep_threads() -> int:
    try:
        return max(1, int(os.environ.get("SLIDEGAL_THREADS", "1")))
    except ValueError:
        return 1


def convergence_study(spec: ProblemSpec, dims, cfg: ControllerConfig, sim: SimConfig,
                      threads: int | None = None) -> ConvergenceTable:
    """Simulate every dimension in ``dims`` with identical settings and tabulate.

    pair_gaps[i] is sup_t |y_{dims[i+1]}(t) - y_{dims[i]}(t)|_H (the shorter
    coefficient vector zero-padded; nested bases make this the H distance).
    The last entry has no successor and is nan.
    """
    dims = [int(d) for d in dims]
    if not dims:
        raise ValueError("dims must be nonempty")
    if any(b < a for a, b in zip(dims, dims[1:])):
        raise ValueError(f"dims must be non-decreasing, got {dims}")

    def run(n):
        try:
            sys = assemble(spec, n, default_quadrature(n))
            return sys, simulate(sys, cfg, sim, spec.horizon_T)
        except Exception as exc:  # tag with the dimension
            raise SweepError(n, exc) from exc

    workers = threads if threads is not None else sweep_threads()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, dims))
    else:
        results = [run(n) for n in dims]

    gaps = []
    for (_, a), (_, b) in zip(results, results[1:]):
        if a.times.shape != b.times.shape or not np.array_equal(a.times, b.times):
            raise ValueError("runs in a sweep must share a time grid")
        na, nb = a.states.shape[1], b.states.shape[1]
        diff = b.states.copy()
        diff[:, :na] -= a.states
        gaps.append(float(np.max(np.linalg.norm(diff, axis=1))))
    gaps.append(math.nan)

    return ConvergenceTable(
        dims=dims,
        pair_gaps=gaps,
        sliding_sups=[chatter_band(tr, cfg) for _, tr in results],
        uniform_bounds=[float(np.max(tr.h_norms)) for _, tr in results],
        l2_control_norms=[math.sqrt(tr.control_l2_running[-1]) for _, tr in results],
        reaching_times=[reaching_time(tr, cfg) for _, tr in results],
    )
