"""Galerkin assembly of  M xi' + A xi = u(t) g_vec  on the cosine basis."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .problem import (
    ProblemSpec,
    basis_grad_matrix,
    basis_matrix,
    field_eval,
    field_sup,
)


class RepresentabilityError(ValueError):
    """The sliding covector gamma does not lie in the Galerkin space."""


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Quadrature:
    nodes: np.ndarray
    weights: np.ndarray

    def integrate(self, values) -> float:
        return float(np.dot(self.weights, values))


def gauss_legendre(n_nodes: int, panels: int = 1) -> Quadrature:
    """Composite Gauss-Legendre rule on [0, 1] with ``panels`` equal cells.

    Exact for polynomials of degree <= 2*n_nodes - 1 on each cell.
    """
    if n_nodes < 1 or panels < 1:
        raise ValueError("n_nodes and panels must be positive")
    t, w = np.polynomial.legendre.leggauss(n_nodes)
    edges = np.linspace(0.0, 1.0, panels + 1)
    h = np.diff(edges)
    nodes = edges[:-1, None] + 0.5 * h[:, None] * (t[None, :] + 1.0)
    weights = 0.5 * h[:, None] * w[None, :]
    return Quadrature(_frozen(nodes.ravel()), _frozen(weights.ravel()))


def default_quadrature(n: int) -> Quadrature:
    return gauss_legendre(8, max(4, n))


@dataclass(frozen=True, eq=False)
class GalerkinSystem:
    """Dimension-N discrete model. Arrays are read-only."""

    N: int
    M: np.ndarray
    A: np.ndarray
    K: np.ndarray
    g_vec: np.ndarray
    gamma_vec: np.ndarray
    xi0: np.ndarray
    sup_q: float

    def _check(self, xi) -> np.ndarray:
        xi = np.asarray(xi, dtype=float)
        if xi.shape[-1] != self.N:
            raise ValueError(f"state has length {xi.shape[-1]}, system dimension is {self.N}")
        return xi


def stiffness_by_quadrature(n: int, quad: Quadrature) -> np.ndarray:
    """(phi_i', phi_j') by quadrature; oracle for the closed-form diagonal."""
    d = basis_grad_matrix(n, quad.nodes)
    return (d * quad.weights) @ d.T


def assemble(spec: ProblemSpec, N: int, quad: Quadrature | None = None,
             closed_form: bool = True) -> GalerkinSystem:
    """Assemble the dimension-``N`` Galerkin system for ``spec``.

    A[i, j] = (phi_i', phi_j') - (q phi_i, phi_j). The gradient part is the
    closed form (i pi)^2 delta_ij unless ``closed_form`` is False, in which
    case it is integrated by ``quad`` like the potential term.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    if spec.gamma.highest_mode + 1 > N:
        raise RepresentabilityError(
            f"sliding covector not representable: gamma uses mode "
            f"{spec.gamma.highest_mode}, Galerkin dimension is {N}")
    if quad is None:
        quad = default_quadrature(N)

    j = np.arange(N)
    K = np.diag((j * math.pi) ** 2)
    phi = basis_matrix(N, quad.nodes)
    stiff = K if closed_form else stiffness_by_quadrature(N, quad)

    if spec.q.is_zero:
        A = stiff.copy()
    else:
        qw = field_eval(spec.q, quad.nodes) * quad.weights
        A = stiff - (phi * qw) @ phi.T
    A = 0.5 * (A + A.T)

    ends = basis_matrix(N, [0.0, 1.0])
    g_vec = spec.g.g_left * ends[:, 0] + spec.g.g_right * ends[:, 1]

    gamma_vec = np.zeros(N)
    gc = spec.gamma.coeffs[:N]
    gamma_vec[: len(gc)] = gc

    if spec.y0.kind == "cosine":
        xi0 = np.zeros(N)
        yc = spec.y0.coeffs[:N]
        xi0[: len(yc)] = yc
    else:
        xi0 = phi @ (field_eval(spec.y0, quad.nodes) * quad.weights)

    return GalerkinSystem(
        N=N,
        M=_frozen(np.eye(N)),
        A=_frozen(A),
        K=_frozen(K),
        g_vec=_frozen(g_vec),
        gamma_vec=_frozen(gamma_vec),
        xi0=_frozen(xi0),
        sup_q=field_sup(spec.q),
    )


def reconstruct(sys: GalerkinSystem, xi, xs) -> np.ndarray:
    """y(x) = sum_j xi_j phi_j(x) at each point of ``xs``."""
    xi = sys._check(xi)
    if xi.ndim != 1:
        raise ValueError("xi must be a single state vector")
    return xi @ basis_matrix(sys.N, xs)


def h_norm(sys: GalerkinSystem, xi) -> float:
    xi = sys._check(xi)
    return math.sqrt(float(xi @ sys.M @ xi))


def seminorm(sys: GalerkinSystem, xi) -> float:
    xi = sys._check(xi)
    return math.sqrt(max(float(xi @ sys.K @ xi), 0.0))


def v_norm(sys: GalerkinSystem, xi) -> float:
    return math.hypot(h_norm(sys, xi), seminorm(sys, xi))


def project_covector(sys: GalerkinSystem) -> tuple[np.ndarray, float]:
    """(A^T gamma, gamma . g): the drift and input gains of z = gamma . xi."""
    return sys.A.T @ sys.gamma_vec, float(sys.gamma_vec @ sys.g_vec)
