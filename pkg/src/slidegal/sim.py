"""Fixed-step integration of the closed loop  M xi' + A xi = u g_vec."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .galerkin import GalerkinSystem
from .sliding import ControlSample, Controller, ControllerConfig

SCHEMES = ("semi_implicit", "explicit_rk4")

# RK4 stability interval on the negative real axis is about [-2.785, 0]
RK4_STABILITY = 2.78


class SimulationDivergence(RuntimeError):
    def __init__(self, step: int, partial: "Trajectory"):
        super().__init__(f"non-finite state at step {step} (t = {step * partial.dt:g})")
        self.step = step
        self.partial = partial


class OracleInapplicable(ValueError):
    pass


@dataclass(frozen=True)
class SimConfig:
    dt: float = 1e-4
    scheme: str = "semi_implicit"
    record_stride: int = 1

    def __post_init__(self):
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise ValueError(f"dt must be > 0, got {self.dt}")
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if int(self.record_stride) != self.record_stride or self.record_stride < 1:
            raise ValueError(f"record_stride must be an integer >= 1, got {self.record_stride}")


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Recorded samples of one run. All arrays share the first dimension."""

    times: np.ndarray
    states: np.ndarray
    u: np.ndarray
    z: np.ndarray
    gain: np.ndarray
    u_eq: np.ndarray
    h_norms: np.ndarray
    seminorms: np.ndarray
    control_l2_running: np.ndarray
    dt: float
    # running left-endpoint sum of |y|^2 dt at step resolution, same rule as the control norm
    state_l2_running: np.ndarray | None = None

    def __len__(self) -> int:
        return len(self.times)

    @property
    def controls(self) -> list[ControlSample]:
        return [ControlSample(*row) for row in zip(self.u, self.z, self.gain, self.u_eq)]


def step_semi_implicit(sys: GalerkinSystem, xi, u: float, dt: float) -> np.ndarray:
    """One step of (M + dt A) xi+ = M xi + dt u g_vec."""
    if not dt > 0:
        raise ValueError("dt must be > 0")
    lhs = sys.M + dt * sys.A
    return np.linalg.solve(lhs, sys.M @ np.asarray(xi, dtype=float) + dt * u * sys.g_vec)


def _semi_implicit_stepper(sys: GalerkinSystem, dt: float):
    lu, piv = sla.lu_factor(sys.M + dt * sys.A, check_finite=True)
    diag = np.abs(np.diag(lu))
    if diag.min() <= 1e-14 * max(diag.max(), 1.0):
        raise np.linalg.LinAlgError(
            f"M + dt*A is singular for dt = {dt:g}; the potential q is too large for this step")
    B = sla.lu_solve((lu, piv), np.eye(sys.N))
    BM = B @ sys.M
    Bg = dt * (B @ sys.g_vec)
    return lambda xi, u: BM @ xi + u * Bg


def _rk4_stepper(sys: GalerkinSystem, dt: float):
    Minv = np.linalg.inv(sys.M)
    F = -Minv @ sys.A
    b = Minv @ sys.g_vec
    lam = np.max(np.abs(np.linalg.eigvals(F))) if sys.N else 0.0
    if dt * lam >= RK4_STABILITY:
        raise ValueError(
            f"explicit_rk4 unstable: dt * max|eig| = {dt * lam:.3g} >= {RK4_STABILITY}")

    def step(xi, u):
        f = lambda x: F @ x + u * b
        k1 = f(xi)
        k2 = f(xi + 0.5 * dt * k1)
        k3 = f(xi + 0.5 * dt * k2)
        k4 = f(xi + dt * k3)
        return xi + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)

    return step


def simulate(sys: GalerkinSystem, cfg: ControllerConfig, sim: SimConfig, T: float,
             controller: Controller | None = None) -> Trajectory:
    """March from sys.xi0 to ``T`` with the control held over each step.

    The control is evaluated at the state at the start of each step. Samples
    are taken every ``record_stride`` steps and always at the final time.
    Raises SimulationDivergence (carrying the partial trajectory) on a
    non-finite state.
    """
    if not T > 0:
        raise ValueError("T must be > 0")
    law = controller if controller is not None else Controller(sys, cfg)
    dt = sim.dt
    n_steps = max(1, math.ceil(T / dt - 1e-9))
    step = (_semi_implicit_stepper if sim.scheme == "semi_implicit" else _rk4_stepper)(sys, dt)
    stride = int(sim.record_stride)

    rec_t, rec_x, rec_c, rec_l2, rec_e = [], [], [], [], []
    M = np.asarray(sys.M)

    def record(n, xi, c, l2, e):
        rec_t.append(n * dt)
        rec_x.append(xi)
        rec_c.append(c)
        rec_l2.append(l2)
        rec_e.append(e)

    xi = np.array(sys.xi0, dtype=float)
    l2 = e = 0.0
    for n in range(n_steps):
        c = law(xi)
        if n % stride == 0:
            record(n, xi, c, l2, e)
        l2 += c.u * c.u * dt
        e += float(xi @ M @ xi) * dt
        xi = step(xi, c.u)
        if not np.all(np.isfinite(xi)):
            raise SimulationDivergence(n + 1, _pack(sys, rec_t, rec_x, rec_c, rec_l2, rec_e, dt))
    record(n_steps, xi, law(xi), l2, e)
    return _pack(sys, rec_t, rec_x, rec_c, rec_l2, rec_e, dt)


def _pack(sys, rec_t, rec_x, rec_c, rec_l2, rec_e, dt) -> Trajectory:
    states = np.array(rec_x, dtype=float).reshape(len(rec_x), sys.N)
    c = np.array(rec_c, dtype=float).reshape(len(rec_c), 4)
    # scale rows so large but finite states do not overflow in the quadratic forms
    scale = np.max(np.abs(states), axis=1, initial=0.0)
    unit = states / np.where(scale > 0, scale, 1.0)[:, None]
    h = scale * np.sqrt(np.einsum("ij,jk,ik->i", unit, sys.M, unit))
    s = scale * np.sqrt(np.maximum(np.einsum("ij,jk,ik->i", unit, sys.K, unit), 0.0))
    return Trajectory(
        times=np.array(rec_t, dtype=float),
        states=states,
        u=c[:, 0], z=c[:, 1], gain=c[:, 2], u_eq=c[:, 3],
        h_norms=h, seminorms=s,
        control_l2_running=np.array(rec_l2, dtype=float),
        dt=dt,
        state_l2_running=np.array(rec_e, dtype=float),
    )


def exact_modal_solution(sys: GalerkinSystem, u_const: float, t: float) -> np.ndarray:
    """Closed-form state at time ``t`` under a constant input, for diagonal A.

    xi_j(t) = exp(-a_j t) xi_j(0) + u g_j (1 - exp(-a_j t)) / a_j, with the
    a_j -> 0 limit xi_j(0) + u g_j t.
    """
    A = np.asarray(sys.A)
    off = A - np.diag(np.diag(A))
    if np.max(np.abs(off), initial=0.0) > 1e-12 or not np.allclose(sys.M, np.eye(sys.N)):
        raise OracleInapplicable("exact modal solution needs a diagonal system (constant q)")
    a = np.diag(A)
    decay = np.exp(-a * t)
    # (1 - e^{-at})/a, stable for small |a t|
    with np.errstate(divide="ignore", invalid="ignore"):
        ramp = np.where(np.abs(a * t) > 1e-8, -np.expm1(-a * t) / np.where(a == 0, 1, a),
                        t * (1.0 - 0.5 * a * t))
    return decay * sys.xi0 + u_const * sys.g_vec * ramp
