"""Semi-discrete operators dq/dt = A q + g for scalar advection on [0, inf).

Every combination of discretization form (strong collocation, weak nodal,
weak modal), basis family (Laguerre functions or polynomials), node
family (GL or GLR) and boundary direction (inflow u > 0 with Dirichlet
data, outflow u < 0 with no data) is assembled as a dense matrix plus a
forcing vector, ready for eigenvalue analysis or time stepping.

Weight conventions for the nodal weak forms: GLR rules pair the function
basis with the exp(z)-absorbed weights and the polynomial basis with the
classical ones; the GL rules use the classical weights for both bases
(see the weak-nodal assembly notes below).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .basis import LAGUERRE_FUNCTIONS, LAGUERRE_POLYNOMIALS
from .quadrature import (
    NODES_GL,
    NODES_GLR,
    build_diff_matrix,
    build_rule,
    cardinal_values_at_origin,
)

FORM_STRONG = "strong"
FORM_NODAL = "nodal"
FORM_MODAL = "modal"

INFLOW = "inflow"
OUTFLOW = "outflow"

_FORMS = (FORM_STRONG, FORM_NODAL, FORM_MODAL)
_DIRECTIONS = (INFLOW, OUTFLOW)


@dataclass(frozen=True)
class SchemeVariant:
    """One discretization of the model advection problem.

    node_kind is ignored for the modal form; q_left is the Dirichlet
    datum used by inflow variants.
    """

    form: str
    basis_kind: str
    node_kind: str = NODES_GLR
    direction: str = INFLOW
    q_left: float = 0.0

    def __post_init__(self):
        if self.form not in _FORMS:
            raise ValueError(f"unknown form {self.form!r}")
        if self.basis_kind not in (LAGUERRE_FUNCTIONS, LAGUERRE_POLYNOMIALS):
            raise ValueError(f"unknown basis kind {self.basis_kind!r}")
        if self.node_kind not in (NODES_GL, NODES_GLR):
            raise ValueError(f"unknown node kind {self.node_kind!r}")
        if self.direction not in _DIRECTIONS:
            raise ValueError(f"unknown direction {self.direction!r}")


@dataclass(frozen=True, eq=False)
class SemiDiscreteOperator:
    """Dense (A, g) pair; dof_offset records whether node 0 was eliminated.

    exact_eigenvalues is set when the variant's spectrum is known in
    closed form (triangular modal matrices; the nilpotent weak nodal
    polynomial GLR outflow case) and lets the classifier bypass the
    dense solver where it cannot resolve a defective spectrum.
    """

    A: np.ndarray
    g: np.ndarray
    dof_offset: int = 0
    exact_eigenvalues: np.ndarray | None = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return self.A.shape[0]


def apply(op: SemiDiscreteOperator, q: np.ndarray, t: float = 0.0) -> np.ndarray:
    """Evaluate A q + g (t accepted for time-stepper signatures)."""
    q = np.asarray(q, dtype=float)
    if q.shape != (op.n,):
        raise ValueError(f"state has shape {q.shape}, expected ({op.n},)")
    return op.A @ q + op.g


def _modal_operator(variant: SchemeVariant, beta: float, M: int, u: float) -> SemiDiscreteOperator:
    n = M + 1
    ones = np.ones(n)
    if variant.basis_kind == LAGUERRE_FUNCTIONS:
        low = np.tril(np.ones((n, n)))
        np.fill_diagonal(low, 0.5)
        if variant.direction == INFLOW:
            A = -beta * u * low
            g = beta * u * variant.q_left * ones
        else:
            A = beta * u * low.T
            g = np.zeros(n)
        exact = np.full(n, -0.5 * beta * abs(u), dtype=complex)
    else:
        if variant.direction == INFLOW:
            A = -beta * u * np.tril(np.ones((n, n)))
            g = beta * u * variant.q_left * ones
            exact = np.full(n, -beta * u, dtype=complex)
        else:
            A = beta * u * np.triu(np.ones((n, n)), 1)
            g = np.zeros(n)
            exact = np.zeros(n, dtype=complex)
    return SemiDiscreteOperator(A, g, dof_offset=0, exact_eigenvalues=exact)


def _strong_operator(variant: SchemeVariant, beta: float, M: int, u: float) -> SemiDiscreteOperator:
    rule = build_rule(NODES_GLR, variant.basis_kind, beta, M)
    D = build_diff_matrix(rule).entries
    if variant.direction == INFLOW:
        A = -u * D[1:, 1:]
        g = -u * variant.q_left * D[1:, 0]
        exact = None
        if variant.basis_kind == LAGUERRE_POLYNOMIALS:
            exact = -u * _glr_poly_block_spectrum(beta, M)
        return SemiDiscreteOperator(A, g, dof_offset=1, exact_eigenvalues=exact)
    return SemiDiscreteOperator(-u * D, np.zeros(M + 1), dof_offset=0)


def _nodal_weights(variant: SchemeVariant, beta: float, M: int) -> np.ndarray:
    # GL rules keep the classical weights for both bases: conjugating the
    # function-basis operators with the exp(z)-absorbed weights instead
    # would suppress the violent outflow spectra these rules actually
    # exhibit, which is the finding the GL variants exist to demonstrate.
    if variant.node_kind == NODES_GL:
        return build_rule(NODES_GL, LAGUERRE_POLYNOMIALS, beta, M).weights
    return build_rule(NODES_GLR, variant.basis_kind, beta, M).weights


# Exact spectra of the GLR polynomial-basis operators.
#
# The differentiation matrix D of the Lagrange polynomial basis is a nodal
# representation of d/dz acting on degree-M polynomials, hence nilpotent.
# The boundary-node cardinal function is h_0(z) = L'_{M+1}(beta z) /
# L'_{M+1}(0), so the derivative chain at the origin is (D^k)_{00} =
# (-beta)^k C(M+1, k+1) / (M+1).  Expanding the rank-one updates of the
# assembled matrices against that chain collapses both characteristic
# polynomials binomially:
#
# * trailing M x M block (inflow): det(lam I - D_M) reduces to
#   nu^n - (nu - 1)^n with nu = lam / beta, whose roots all sit on the
#   line Re nu = 1/2:  lam = beta (1/2 + (i/2) cot(pi m / n)), m = 1..M;
# * outflow matrix (u/w_0) e0 e0^T + u Om^-1 D Om - beta u I: the rank-one
#   term has weight 1/w_0 = n beta and the determinant collapses to
#   (nu + 1)^n, i.e. every eigenvalue is exactly zero (checked against
#   small-M dense solves and ||A^n|| ~ 0 in the tests).
#
# Dense QR cannot resolve either structure at large M: a defective
# eigenvalue of multiplicity n smears into an O(||A||^(1-1/n) eps^(1/n))
# ring, so the assembled operators carry their exact spectra.


def _glr_poly_block_spectrum(beta: float, M: int) -> np.ndarray:
    n = M + 1
    m = np.arange(1, n)
    return beta * (0.5 + 0.5j / np.tan(np.pi * m / n))


def _nodal_operator(variant: SchemeVariant, beta: float, M: int, u: float) -> SemiDiscreteOperator:
    rule = build_rule(variant.node_kind, variant.basis_kind, beta, M)
    D = build_diff_matrix(rule).entries
    w = _nodal_weights(variant, beta, M)
    poly = variant.basis_kind == LAGUERRE_POLYNOMIALS
    n = M + 1

    if variant.node_kind == NODES_GL:
        h = cardinal_values_at_origin(rule)
        conj = u * (D * (w[None, :] / w[:, None]))
        if variant.direction == INFLOW:
            A = conj
            g = u * variant.q_left * h / w
        else:
            A = u * np.outer(h / w, h) + conj
            g = np.zeros(n)
        if poly:
            A = A - beta * u * np.eye(n)
        return SemiDiscreteOperator(A, g, dof_offset=0)

    # GLR: the boundary node is eliminated for inflow, kept for outflow.
    if variant.direction == INFLOW:
        wi = w[1:]
        A = u * (D[1:, 1:] * (wi[None, :] / wi[:, None]))
        exact = None
        if poly:
            A = A - beta * u * np.eye(M)
            g = w[0] * u * variant.q_left * D[0, 0] / wi
            exact = u * _glr_poly_block_spectrum(beta, M) - beta * u
        else:
            g = w[0] * u * variant.q_left * D[1:, 0] / wi
        return SemiDiscreteOperator(A, g, dof_offset=1, exact_eigenvalues=exact)

    A = u * (D * (w[None, :] / w[:, None]))
    A[0, 0] += u / w[0]
    exact = None
    if poly:
        A = A - beta * u * np.eye(n)
        exact = np.zeros(n, dtype=complex)
    return SemiDiscreteOperator(A, np.zeros(n), dof_offset=0, exact_eigenvalues=exact)


def assemble(variant: SchemeVariant, beta: float, M: int, u: float) -> SemiDiscreteOperator:
    """Assemble the (A, g) pair of a variant for advection speed u."""
    if u == 0:
        raise ValueError("u = 0 has no inflow/outflow character; rejected")
    if variant.direction == INFLOW and u < 0:
        raise ValueError("inflow variants require u > 0")
    if variant.direction == OUTFLOW and u > 0:
        raise ValueError("outflow variants require u < 0")
    if not beta > 0:
        raise ValueError("beta must be positive")
    if M < 0:
        raise ValueError("M must be non-negative")

    if variant.form == FORM_MODAL:
        return _modal_operator(variant, beta, M, u)
    if variant.form == FORM_STRONG:
        if variant.node_kind == NODES_GL:
            raise ValueError("strong collocation requires GLR nodes (boundary conditions need a boundary node)")
        return _strong_operator(variant, beta, M, u)
    return _nodal_operator(variant, beta, M, u)
