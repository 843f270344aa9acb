"""Variable-structure control laws for the scalar sliding output z = gamma . xi.

The time derivative of the output along the Galerkin flow is

    z' = -gamma_A . xi + u * gamma_g,    gamma_A = A^T gamma,  gamma_g = gamma . g

and every law below is written in terms of these two quantities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np

from .galerkin import GalerkinSystem, project_covector

TRANSVERSALITY_TOL = 1e-10

MODES = ("relay", "boundary_layer", "equivalent", "open_loop_zero", "open_loop_constant")
SLIDING_MODES = ("relay", "boundary_layer", "equivalent")


class TransversalityError(ValueError):
    """gamma . g vanishes: the input cannot act on the sliding output."""


@dataclass(frozen=True)
class ControllerConfig:
    mode: str = "relay"
    rho: float = 1.0
    delta: float | None = None
    u_max: float | None = None
    value: float = 0.0  # open_loop_constant only

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"controller.mode must be one of {MODES}, got {self.mode!r}")
        if self.mode in ("relay", "boundary_layer"):
            if not (math.isfinite(self.rho) and self.rho > 0):
                raise ValueError(f"controller.rho must be > 0, got {self.rho}")
        if self.mode == "boundary_layer":
            if self.delta is None or not (math.isfinite(self.delta) and self.delta > 0):
                raise ValueError(f"controller.delta must be > 0, got {self.delta}")
        if self.u_max is not None and not (math.isfinite(self.u_max) and self.u_max > 0):
            raise ValueError(f"controller.u_max must be > 0, got {self.u_max}")
        if not math.isfinite(self.value):
            raise ValueError("controller.value must be finite")


class ControlSample(NamedTuple):
    u: float
    z: float
    gain_U: float
    u_eq: float


def _sign(z: float) -> float:
    # sign(0) = 0 on the surface
    return (z > 0) - (z < 0)


def check_transversality(gamma_g: float, tol: float = TRANSVERSALITY_TOL) -> None:
    if not abs(gamma_g) > tol:
        raise TransversalityError(
            f"transversality fails: |gamma . g| = {abs(gamma_g):.3g} <= {tol:g}; "
            "no sliding mode can be enforced on this surface")


def sliding_output(sys: GalerkinSystem, xi) -> float:
    return float(sys.gamma_vec @ sys._check(xi))


def equivalent_control(sys: GalerkinSystem, xi, tol: float = TRANSVERSALITY_TOL) -> float:
    """The control value that makes z' = 0 at ``xi``."""
    gamma_A, gamma_g = project_covector(sys)
    check_transversality(gamma_g, tol)
    return float(gamma_A @ sys._check(xi)) / gamma_g


def gain(sys: GalerkinSystem, xi, cfg: ControllerConfig) -> float:
    """U = |gamma_A . xi| + rho |gamma_g|, optionally capped at u_max |gamma_g|.

    Uncapped, this gives sign(z) z' <= -rho |gamma_g| under the relay law.
    """
    gamma_A, gamma_g = project_covector(sys)
    return _gain(float(gamma_A @ sys._check(xi)), gamma_g, cfg)


def _gain(drift: float, gamma_g: float, cfg: ControllerConfig) -> float:
    U = abs(drift) + cfg.rho * abs(gamma_g)
    if cfg.u_max is not None:
        U = min(U, cfg.u_max * abs(gamma_g))
    return U


def relay_control(sys: GalerkinSystem, xi, cfg: ControllerConfig) -> ControlSample:
    """u = -U sign(z) / gamma_g."""
    return Controller(sys, replace(cfg, mode="relay"))(xi)


def boundary_layer_control(sys: GalerkinSystem, xi, cfg: ControllerConfig) -> ControlSample:
    """u = -(U / gamma_g) z / (|z| + delta)."""
    return Controller(sys, replace(cfg, mode="boundary_layer"))(xi)


def reaching_time_bound(z0: float, rho: float, gamma_g: float) -> float:
    """Upper bound |z0| / (rho |gamma_g|) on the time to reach z = 0."""
    if not rho > 0:
        raise ValueError(f"rho must be > 0, got {rho}")
    if gamma_g == 0:
        raise TransversalityError("gamma_g must be nonzero")
    return abs(z0) / (rho * abs(gamma_g))


class Controller:
    """State feedback ``xi -> ControlSample`` for a fixed system and config.

    Construction fails with TransversalityError for the sliding modes when
    |gamma . g| is below tolerance. Open-loop modes accept any surface; their
    u_eq is reported as nan if the surface is not transversal.
    """

    def __init__(self, sys: GalerkinSystem, cfg: ControllerConfig,
                 tol: float = TRANSVERSALITY_TOL):
        self.sys = sys
        self.cfg = cfg
        gamma_A, gamma_g = project_covector(sys)
        self.gamma_A = gamma_A
        self.gamma_g = gamma_g
        self.transversal = abs(gamma_g) > tol
        if cfg.mode in SLIDING_MODES:
            check_transversality(gamma_g, tol)
        self._gamma = np.asarray(sys.gamma_vec)
        self._law = getattr(self, "_" + cfg.mode)

    def __call__(self, xi) -> ControlSample:
        xi = np.asarray(xi, dtype=float)
        if xi.shape != (self.sys.N,):
            raise ValueError(f"state has shape {xi.shape}, expected ({self.sys.N},)")
        z = float(self._gamma @ xi)
        drift = float(self.gamma_A @ xi)
        u_eq = drift / self.gamma_g if self.transversal else math.nan
        return self._law(z, drift, u_eq)

    def zdot(self, xi, u: float) -> float:
        return float(-self.gamma_A @ xi + u * self.gamma_g)

    def _relay(self, z, drift, u_eq):
        U = _gain(drift, self.gamma_g, self.cfg)
        return ControlSample(-U * _sign(z) / self.gamma_g, z, U, u_eq)

    def _boundary_layer(self, z, drift, u_eq):
        U = _gain(drift, self.gamma_g, self.cfg)
        return ControlSample(-(U / self.gamma_g) * z / (abs(z) + self.cfg.delta), z, U, u_eq)

    def _equivalent(self, z, drift, u_eq):
        u = u_eq
        if self.cfg.u_max is not None:
            u = max(-self.cfg.u_max, min(self.cfg.u_max, u))
        return ControlSample(u, z, abs(drift), u_eq)

    def _open_loop_zero(self, z, drift, u_eq):
        return ControlSample(0.0, z, 0.0, u_eq)

    def _open_loop_constant(self, z, drift, u_eq):
        return ControlSample(self.cfg.value, z, 0.0, u_eq)
