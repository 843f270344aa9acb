"""Continuous plant: Neumann-controlled heat equation on (0, 1).

    Q_t = Q_xx + q(x) Q,   dQ/dnu = u(t) g(sigma) at sigma in {0, 1},   Q(0, .) = y0

The spatial basis is the orthonormal Neumann cosine family
phi_0 = 1, phi_j = sqrt(2) cos(j pi x).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

SQRT2 = math.sqrt(2.0)

# sampling resolution for sup of cosine-represented fields
SUP_SAMPLES = 1001


class DomainError(ValueError):
    """Raised when a point lies outside [0, 1]."""


def _check_domain(x):
    arr = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr < 0.0) or np.any(arr > 1.0):
        raise DomainError(f"x must lie in [0, 1], got {x!r}")
    return arr


def basis_eval(j: int, x):
    """Cosine basis function phi_j at ``x`` (scalar or array)."""
    if j < 0:
        raise ValueError(f"mode index must be >= 0, got {j}")
    arr = _check_domain(x)
    if j == 0:
        out = np.ones_like(arr)
    else:
        out = SQRT2 * np.cos(j * math.pi * arr)
    return float(out) if out.ndim == 0 else out


def basis_grad(j: int, x):
    """Derivative phi_j'(x). Vanishes exactly at both endpoints."""
    if j < 0:
        raise ValueError(f"mode index must be >= 0, got {j}")
    arr = _check_domain(x)
    if j == 0:
        out = np.zeros_like(arr)
    else:
        out = -SQRT2 * j * math.pi * np.sin(j * math.pi * arr)
        # sin(j*pi) is ~1e-16 in floating point, not 0
        out = np.where((arr == 0.0) | (arr == 1.0), 0.0, out)
    return float(out) if out.ndim == 0 else out


def basis_matrix(n: int, x) -> np.ndarray:
    """Rows phi_0..phi_{n-1} evaluated at the points ``x``; shape (n, len(x))."""
    arr = np.atleast_1d(_check_domain(x))
    j = np.arange(n)[:, None]
    out = SQRT2 * np.cos(j * math.pi * arr[None, :])
    out[0] = 1.0
    return out


def basis_grad_matrix(n: int, x) -> np.ndarray:
    arr = np.atleast_1d(_check_domain(x))
    j = np.arange(n)[:, None]
    out = -SQRT2 * j * math.pi * np.sin(j * math.pi * arr[None, :])
    out[:, (arr == 0.0) | (arr == 1.0)] = 0.0
    return out


@dataclass(frozen=True)
class ScalarField:
    """A real function on [0, 1], either a polynomial (ascending coefficients)
    or a finite combination of the cosine basis."""

    kind: str
    coeffs: tuple

    def __post_init__(self):
        if self.kind not in ("poly", "cosine"):
            raise ValueError(f"unknown field kind {self.kind!r}")
        coeffs = tuple(float(c) for c in self.coeffs)
        if not coeffs:
            raise ValueError("coefficient list must be nonempty")
        if not all(math.isfinite(c) for c in coeffs):
            raise ValueError("coefficients must be finite")
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def poly(cls, coeffs) -> "ScalarField":
        return cls("poly", tuple(coeffs))

    @classmethod
    def cosine(cls, coeffs) -> "ScalarField":
        return cls("cosine", tuple(coeffs))

    @property
    def is_zero(self) -> bool:
        return all(c == 0.0 for c in self.coeffs)

    @property
    def highest_mode(self) -> int:
        """Index of the last nonzero coefficient (-1 for the zero field)."""
        for i in range(len(self.coeffs) - 1, -1, -1):
            if self.coeffs[i] != 0.0:
                return i
        return -1

    def __call__(self, x):
        return field_eval(self, x)


def field_eval(f: ScalarField, x):
    """Evaluate ``f`` at ``x``; Horner for polynomials, basis sum for cosine fields."""
    arr = _check_domain(x)
    if f.kind == "poly":
        out = np.zeros_like(arr)
        for c in reversed(f.coeffs):
            out = out * arr + c
    else:
        out = np.tensordot(np.asarray(f.coeffs), basis_matrix(len(f.coeffs), arr.ravel()), axes=1)
        out = out.reshape(arr.shape)
    return float(out) if out.ndim == 0 else out


def field_sup(f: ScalarField) -> float:
    """Maximum of ``f`` over [0, 1].

    Exact for polynomials (critical points plus endpoints). Cosine fields are
    sampled on SUP_SAMPLES uniform points and the best sample is polished by a
    bounded scalar search on its neighbouring cells.
    """
    if f.kind == "poly":
        p = np.polynomial.Polynomial(f.coeffs)
        cands = [0.0, 1.0]
        dp = p.deriv()
        # negligible leading terms would put spurious roots at infinity
        dp = dp.trim(np.finfo(float).eps * np.max(np.abs(dp.coef))) if dp.coef.any() else dp
        if dp.degree() >= 1:
            for r in dp.roots():
                if abs(r.imag) < 1e-12 and 0.0 <= r.real <= 1.0:
                    cands.append(float(r.real))
        return float(max(p(c) for c in cands))
    xs = np.linspace(0.0, 1.0, SUP_SAMPLES)
    vals = field_eval(f, xs)
    k = int(np.argmax(vals))
    best = float(vals[k])
    lo, hi = xs[max(k - 1, 0)], xs[min(k + 1, SUP_SAMPLES - 1)]
    res = minimize_scalar(lambda t: -field_eval(f, t), bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-12})
    return max(best, float(-res.fun))


@dataclass(frozen=True)
class BoundaryInfluence:
    """Values of g on the boundary {0, 1}."""

    g_left: float
    g_right: float

    def __post_init__(self):
        if not (math.isfinite(self.g_left) and math.isfinite(self.g_right)):
            raise ValueError("boundary influence must be finite")
        if self.g_left == 0.0 and self.g_right == 0.0:
            raise ValueError("boundary influence is identically zero; the control has no effect")


@dataclass(frozen=True)
class ProblemSpec:
    q: ScalarField
    g: BoundaryInfluence
    gamma: ScalarField
    y0: ScalarField
    horizon_T: float

    def __post_init__(self):
        if self.gamma.kind != "cosine":
            raise ValueError("gamma must be given by cosine-mode coefficients")
        if self.gamma.is_zero:
            raise ValueError("gamma must have a nonzero coefficient")
        if not (math.isfinite(self.horizon_T) and self.horizon_T > 0):
            raise ValueError(f"horizon_T must be > 0, got {self.horizon_T}")


@dataclass(frozen=True)
class CoercivityReport:
    alpha: float
    nu: float
    sup_q: float
    lambda_vnorm: float
    beta_vnorm: float
    trace_constant_estimate: float
    transversality: float
    probe_dimension: int


def trace_constant(g: BoundaryInfluence, n: int) -> float:
    """max over V_n of (g_n . xi)^2 / ||xi||_V^2, i.e. g_n^T (M + K)^{-1} g_n.

    Grows monotonically with ``n`` towards the squared norm of the boundary
    functional on H^1(0, 1).
    """
    j = np.arange(n)
    gv = g.g_left * basis_matrix(n, [0.0])[:, 0] + g.g_right * basis_matrix(n, [1.0])[:, 0]
    return float(np.sum(gv**2 / (1.0 + (j * math.pi) ** 2)))


def analyze(spec: ProblemSpec, probe_dimension: int = 32) -> CoercivityReport:
    """Constants of the variational hypotheses for this instance.

    With [v]^2 = |v'|^2 and ||v||^2 = [v]^2 + |v|^2 the form a(v, v) = [v]^2 - (q v, v)
    is coercive with alpha = 1, nu = -sup q, and [v] + |v| >= ||v|| gives
    lambda = beta = 1.
    """
    if probe_dimension < 2:
        raise ValueError("probe_dimension must be >= 2")
    sup_q = field_sup(spec.q)
    transversality = (spec.g.g_left * field_eval(spec.gamma, 0.0)
                      + spec.g.g_right * field_eval(spec.gamma, 1.0))
    return CoercivityReport(
        alpha=1.0,
        nu=-sup_q,
        sup_q=sup_q,
        lambda_vnorm=1.0,
        beta_vnorm=1.0,
        trace_constant_estimate=trace_constant(spec.g, probe_dimension),
        transversality=float(transversality),
        probe_dimension=probe_dimension,
    )
