"""Named problem instances used by the experiment scripts and the test suite."""

from __future__ import annotations

import math

import numpy as np

from .problem import BoundaryInfluence, ProblemSpec, ScalarField

# gamma = phi_0 + 0.5 phi_2, scaled to unit L2 norm
GAMMA_02 = tuple(np.array([1.0, 0.0, 0.5]) / math.hypot(1.0, 0.5))

# gamma(1) = 0, so gamma . g = 0 for g = (0, 1)
GAMMA_DEGENERATE = tuple(np.array([1.0, 0.0, -1.0 / math.sqrt(2.0)]) / math.sqrt(1.5))


def modal_decay(T: float = 0.5, y0=(0.0, 1.0)) -> ProblemSpec:
    """q = 0, control at x = 1, state starting in the given cosine modes."""
    return ProblemSpec(
        q=ScalarField.poly([0.0]),
        g=BoundaryInfluence(0.0, 1.0),
        gamma=ScalarField.cosine([1.0]),
        y0=ScalarField.cosine(y0),
        horizon_T=T,
    )


def smooth_ramp(T: float = 0.5) -> ProblemSpec:
    """q = 0, y0(x) = x, used for the open-loop integrator cross-check."""
    return ProblemSpec(
        q=ScalarField.poly([0.0]),
        g=BoundaryInfluence(0.0, 1.0),
        gamma=ScalarField.cosine([1.0]),
        y0=ScalarField.poly([0.0, 1.0]),
        horizon_T=T,
    )


def reaching(z0: float = 0.5, T: float = 1.0) -> ProblemSpec:
    """q = 0, g = (0, 1), gamma = GAMMA_02 and y0 = z0 * gamma, so s(y0) = z0."""
    return ProblemSpec(
        q=ScalarField.poly([0.0]),
        g=BoundaryInfluence(0.0, 1.0),
        gamma=ScalarField.cosine(GAMMA_02),
        y0=ScalarField.cosine(tuple(z0 * c for c in GAMMA_02)),
        horizon_T=T,
    )


def standard_smooth(T: float = 1.0) -> ProblemSpec:
    """q(x) = x, g = (0, 1), gamma = GAMMA_02, y0(x) = x."""
    return ProblemSpec(
        q=ScalarField.poly([0.0, 1.0]),
        g=BoundaryInfluence(0.0, 1.0),
        gamma=ScalarField.cosine(GAMMA_02),
        y0=ScalarField.poly([0.0, 1.0]),
        horizon_T=T,
    )


def degenerate(T: float = 1.0) -> ProblemSpec:
    return ProblemSpec(
        q=ScalarField.poly([0.0]),
        g=BoundaryInfluence(0.0, 1.0),
        gamma=ScalarField.cosine(GAMMA_DEGENERATE),
        y0=ScalarField.poly([0.0, 1.0]),
        horizon_T=T,
    )
