"""Weak modal scaled-Laguerre-function discretization of hyperbolic systems.

A d-component system q_t + A(q,z) q_z = B(q,z) q on [0, inf) (local
coordinate; the physical origin may sit at origin_shift) is expanded per
component in scaled Laguerre functions.  Incoming characteristics are
forced through A+ by Dirichlet data g(t); outgoing ones feed back through
A- acting on the boundary trace sum_j q_j.  Constant-coefficient systems
reduce to triangular mode coupling; variable coefficients are handled by
GLR quadrature of the coefficient integrals.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .basis import LAGUERRE_FUNCTIONS, BasisSpec, laguerre_fun_table
from .quadrature import NODES_GLR, QuadratureRule, build_rule

_FD_STEP_SCALE = 1e-6


@dataclass(frozen=True, eq=False)
class HyperbolicSystem:
    """Coefficients and eigenstructure of q_t + A(q,z) q_z = B(q,z) q.

    coeff_a / coeff_b / eig take (q, z); linear systems ignore q (callers
    pass None).  eig returns (V, lam, Vinv) with lam the real eigenvalue
    vector.  coeff_b may be None for B = 0; coeff_a_dz optionally supplies
    dA/dz, else central differences are used on the variable path.
    """

    d: int
    coeff_a: Callable
    eig: Callable
    coeff_b: Callable | None = None
    coeff_a_dz: Callable | None = None
    is_constant: bool = False


@dataclass(eq=False)
class ModalState:
    """Per-component Laguerre-function coefficients, shape (d, M+1)."""

    coeffs: np.ndarray
    spec: BasisSpec
    origin_shift: float = 0.0

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=float)
        if self.spec.kind != LAGUERRE_FUNCTIONS:
            raise ValueError("modal states use the Laguerre function basis")
        if self.coeffs.ndim != 2 or self.coeffs.shape[1] != self.spec.M + 1:
            raise ValueError(f"coefficient array shape {self.coeffs.shape} does not match M={self.spec.M}")
        if not np.all(np.isfinite(self.coeffs)):
            raise ValueError("non-finite modal coefficients")


def flux_split(a: np.ndarray, eig_triple) -> tuple[np.ndarray, np.ndarray]:
    """Characteristic splitting A = A+ + A- by eigenvalue sign."""
    V, lam, Vinv = eig_triple
    lam = np.asarray(lam)
    if np.max(np.abs(np.imag(lam))) > 1e-12:
        raise ValueError("complex characteristic speeds: system is not hyperbolic")
    lam = np.real(lam)
    a_plus = (V * np.maximum(lam, 0.0)) @ Vinv
    a_minus = (V * np.minimum(lam, 0.0)) @ Vinv
    return a_plus, a_minus


def trace_at_origin(state: ModalState) -> np.ndarray:
    """Boundary value per component: every basis function equals 1 at 0."""
    return state.coeffs.sum(axis=1)


def default_rule(spec: BasisSpec) -> QuadratureRule:
    return build_rule(NODES_GLR, LAGUERRE_FUNCTIONS, spec.beta, spec.M)


def basis_values_at_nodes(spec: BasisSpec, rule: QuadratureRule) -> np.ndarray:
    """Table Phi[j, l] = Lhat_j(z_l) on the rule's nodes."""
    return laguerre_fun_table(spec.M, spec.beta * rule.nodes)


def project(component_funcs, spec: BasisSpec, rule: QuadratureRule | None = None,
            origin_shift: float = 0.0) -> ModalState:
    """GLR-quadrature projection q_kj = beta * sum_l w_l f_k(z_l) Lhat_j(z_l)."""
    if rule is None:
        rule = default_rule(spec)
    if rule.basis_kind != LAGUERRE_FUNCTIONS:
        raise ValueError("projection rule must carry the function-basis weights")
    phi = basis_values_at_nodes(spec, rule)
    fvals = np.array([np.asarray(f(rule.nodes), dtype=float) for f in component_funcs])
    coeffs = spec.beta * (fvals * rule.weights) @ phi.T
    return ModalState(coeffs, spec, origin_shift)


def reconstruct(state: ModalState, z_points) -> np.ndarray:
    """Series evaluation at local coordinates z >= 0, shape (d, len(z))."""
    z = np.atleast_1d(np.asarray(z_points, dtype=float))
    if np.any(z < 0):
        raise ValueError("reconstruction points must be >= 0 in the local coordinate")
    phi = laguerre_fun_table(state.spec.M, state.spec.beta * z)
    return state.coeffs @ phi


class LaguerreModalOperator:
    """Prepared right-hand side of the modal semi-discretization.

    Precomputes the boundary flux splitting and (when coefficients vary)
    the GLR-quadrature coefficient matrices, so the per-step cost is a few
    dense products.  Boundary data g(t) enters through A+ evaluated at the
    local origin; the outgoing trace feeds back through A-.
    """

    def __init__(self, sys: HyperbolicSystem, spec: BasisSpec,
                 rule: QuadratureRule | None = None):
        if spec.kind != LAGUERRE_FUNCTIONS:
            raise ValueError("modal operator requires the Laguerre function basis")
        self.sys = sys
        self.spec = spec
        self.rule = rule if rule is not None else default_rule(spec)
        beta, M = spec.beta, spec.M

        a0 = np.asarray(sys.coeff_a(None, 0.0), dtype=float)
        if a0.shape != (sys.d, sys.d):
            raise ValueError("coeff_a must return a (d, d) matrix")
        self.a_plus, self.a_minus = flux_split(a0, sys.eig(None, 0.0))
        self.a0 = a0

        phi = basis_values_at_nodes(spec, self.rule)
        w = self.rule.weights
        z = self.rule.nodes

        if sys.coeff_b is not None:
            bvals = np.array([np.asarray(sys.coeff_b(None, zz), dtype=float) for zz in z])
            self.b_proj = np.einsum("nkl,in,jn->klij", bvals * w[:, None, None], phi, phi)
        else:
            self.b_proj = None

        if sys.is_constant:
            self.a_proj = None
            self.da_proj = None
        else:
            avals = np.array([np.asarray(sys.coeff_a(None, zz), dtype=float) for zz in z])
            self.a_proj = np.einsum("nkl,in,jn->klij", avals * w[:, None, None], phi, phi)
            if sys.coeff_a_dz is not None:
                davals = np.array([np.asarray(sys.coeff_a_dz(None, zz), dtype=float) for zz in z])
            else:
                h = _FD_STEP_SCALE / beta
                davals = np.array([
                    (np.asarray(sys.coeff_a(None, zz + h), dtype=float)
                     - np.asarray(sys.coeff_a(None, max(zz - h, 0.0)), dtype=float))
                    / (h + min(zz, h))
                    for zz in z
                ])
            self.da_proj = np.einsum("nkl,in,jn->klij", davals * w[:, None, None], phi, phi)

    def rhs(self, coeffs: np.ndarray, t: float, boundary_g: np.ndarray) -> np.ndarray:
        """Time derivative of the (d, M+1) coefficient array."""
        beta = self.spec.beta
        boundary_g = np.asarray(boundary_g, dtype=float)
        total = coeffs.sum(axis=1)
        bc = self.a_plus @ boundary_g + self.a_minus @ total

        if self.sys.is_constant:
            prefix = np.cumsum(coeffs, axis=1) - coeffs
            adv = self.a0 @ (0.5 * coeffs + prefix)
            out = beta * (bc[:, None] - adv)
        else:
            work = np.einsum("klij,lj->kli", self.a_proj, coeffs)
            wsum = work.sum(axis=1)
            wpre = np.cumsum(wsum, axis=1) - wsum
            out = beta * (bc[:, None] - 0.5 * beta * wsum - beta * wpre)
            out += beta * np.einsum("klij,lj->ki", self.da_proj, coeffs)
        if self.b_proj is not None:
            out += beta * np.einsum("klij,lj->ki", self.b_proj, coeffs)
        return out


def modal_rhs(sys: HyperbolicSystem, state: ModalState, t: float,
              boundary_g) -> np.ndarray:
    """One-shot right-hand side evaluation.

    Builds the prepared operator on the fly: fine for tests and scripts;
    time loops should construct a LaguerreModalOperator once.
    """
    op = LaguerreModalOperator(sys, state.spec)
    return op.rhs(state.coeffs, t, np.asarray(boundary_g, dtype=float))
