"""Scaled Gauss-Laguerre (GL) and Gauss-Laguerre-Radau (GLR) rules.

GL rules place all M+1 nodes at the zeros of L_{M+1}; GLR rules pin the
first node at the origin and put the remaining M nodes at the zeros of
L'_{M+1}.  Unit-scale (beta = 1) nodes and weights are built first and
then mapped: nodes divide by beta, weights divide by beta.

Two weight conventions are stored, matching the two basis families:

* ``polynomials``: the classical weights, so sum w_l p(z_l) approximates
  integrals of p against exp(-beta z);
* ``functions``: the classical weights times exp(beta z_l), so the rule
  approximates plain dz integrals of functions that decay like the
  Laguerre functions.  The product w * exp(x) is formed from closed-form
  weight expressions written in terms of the damped Laguerre functions,
  never by exponentiating the (possibly underflowed) classical weight.

Also provided: the Lagrange cardinal bases attached to a rule (with the
exp(-beta z / 2) envelope for the function family) and their
differentiation matrices.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .basis import (
    LAGUERRE_FUNCTIONS,
    LAGUERRE_POLYNOMIALS,
    laguerre_fun_table,
    laguerre_poly_table,
)

NODES_GL = "gl"
NODES_GLR = "glr"

_NODE_KINDS = (NODES_GL, NODES_GLR)
_MAX_M = 200

_NEWTON_TOL = 1e-14
_NEWTON_MAXIT = 100


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Node family, basis family, scaling, and the M+1 nodes/weights."""

    node_kind: str
    basis_kind: str
    beta: float
    M: int
    nodes: np.ndarray
    weights: np.ndarray

    @property
    def n(self) -> int:
        return self.M + 1


@dataclass(frozen=True, eq=False)
class DiffMatrix:
    """Dense matrix with entry (i, j) = d/dz of cardinal j at node i."""

    entries: np.ndarray
    rule: QuadratureRule


def _gl_unit(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Unit-scale Gauss-Laguerre nodes and classical weights (Golub-Welsch).

    The Jacobi matrix of the Laguerre weight has diagonal 2k+1 and
    off-diagonal k; the weights are the squared first eigenvector
    components (total mass 1).
    """
    diag = 2.0 * np.arange(n) + 1.0
    off = np.arange(1.0, n)
    nodes, vecs = eigh_tridiagonal(diag, off)
    weights = vecs[0] ** 2
    return nodes, weights


def _glr_unit(M: int) -> np.ndarray:
    """Interior unit-scale GLR nodes: the M zeros of L'_{M+1}.

    Each zero is bracketed by consecutive zeros of L_{M+1} and polished
    with Newton steps (bisection fallback keeps the iterate inside the
    bracket).  L'' comes from the Laguerre ODE x y'' = (x-1) y' - n y.
    """
    n = M + 1
    gl_nodes, _ = _gl_unit(n)

    def dval(x):
        tab = laguerre_poly_table(n, np.asarray(x))
        d = n * (tab[n] - tab[n - 1]) / x
        dd = ((x - 1.0) * d - n * tab[n]) / x
        return d, dd

    roots = np.empty(M)
    for k in range(M):
        lo, hi = gl_nodes[k], gl_nodes[k + 1]
        flo, _ = dval(lo)
        x = 0.5 * (lo + hi)
        converged = False
        for _ in range(_NEWTON_MAXIT):
            f, fp = dval(x)
            if np.sign(f) == np.sign(flo):
                lo = x
            else:
                hi = x
            step = f / fp
            x_new = x - step
            if not lo < x_new < hi:
                x_new = 0.5 * (lo + hi)
            if abs(x_new - x) <= _NEWTON_TOL * max(abs(x), 1.0):
                x = x_new
                converged = True
                break
            x = x_new
        if not converged:
            raise RuntimeError(
                f"GLR node {k} did not converge for M={M}: "
                f"bracket [{lo}, {hi}], residual {dval(x)[0]:.3e}"
            )
        roots[k] = x
    return roots


def build_rule(node_kind: str, basis_kind: str, beta: float, M: int) -> QuadratureRule:
    """Construct a scaled rule with the weight convention of basis_kind."""
    if node_kind not in _NODE_KINDS:
        raise ValueError(f"unknown node kind {node_kind!r}")
    if basis_kind not in (LAGUERRE_FUNCTIONS, LAGUERRE_POLYNOMIALS):
        raise ValueError(f"unknown basis kind {basis_kind!r}")
    if not beta > 0:
        raise ValueError("beta must be positive")
    if M > _MAX_M:
        raise ValueError(f"M={M} exceeds the supported maximum {_MAX_M}")
    if node_kind == NODES_GL and M < 0:
        raise ValueError("GL rules need M >= 0")
    if node_kind == NODES_GLR and M < 1:
        raise ValueError("GLR rules need M >= 1")

    n = M + 1
    if node_kind == NODES_GL:
        x, _ = _gl_unit(n)
        # w_i e^{x_i} = x_i / [(M+2)^2 (e^{-x/2} L_{M+2}(x_i))^2]
        damped = laguerre_fun_table(n + 1, x)[n + 1]
        weights = x / ((n + 1) ** 2 * damped**2)
    else:
        x = np.concatenate(([0.0], _glr_unit(M)))
        # w_j e^{x_j} = 1 / [(M+1) (e^{-x/2} L_M(x_j))^2]
        damped = laguerre_fun_table(M, x)[M] if M > 0 else np.ones_like(x)
        weights = 1.0 / (n * damped**2)
    if basis_kind == LAGUERRE_POLYNOMIALS:
        # Classical weights recovered from the exp(x)-absorbed ones; the
        # bare closed forms would square exp(x/2)-sized polynomial values.
        weights = weights * np.exp(-x)

    if not np.all(weights > 0) or not np.all(np.isfinite(weights)):
        raise RuntimeError(
            f"weight computation lost positivity for {node_kind}/{basis_kind}, M={M}; "
            "the classical weights underflow at this order"
        )
    return QuadratureRule(node_kind, basis_kind, beta, M, x / beta, weights / beta)


def _log_barycentric(nodes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Log-magnitudes and signs of the barycentric weights 1/prod(z_k - z_m).

    Laguerre nodes spread over a range where the plain products overflow,
    so only exponent differences are ever exponentiated.
    """
    diff = nodes[:, None] - nodes[None, :]
    np.fill_diagonal(diff, 1.0)
    logw = -np.sum(np.log(np.abs(diff)), axis=1)
    sign = np.prod(np.sign(diff), axis=1)
    return logw, sign


def build_diff_matrix(rule: QuadratureRule) -> DiffMatrix:
    """Differentiation matrix of the cardinal basis attached to the rule.

    For the polynomial family the diagonal is the negated row sum, which
    makes constants differentiate to exactly zero; the function family
    carries the envelope factor exp(-beta (z_i - z_j) / 2) and an extra
    -beta/2 on the diagonal.
    """
    z = rule.nodes
    n = rule.n
    diff = z[:, None] - z[None, :]
    np.fill_diagonal(diff, 1.0)
    logw, sign = _log_barycentric(z)
    expo = logw[None, :] - logw[:, None]
    if rule.basis_kind == LAGUERRE_FUNCTIONS:
        expo = expo - 0.5 * rule.beta * (z[:, None] - z[None, :])
    with np.errstate(over="raise"):
        try:
            mag = np.exp(expo)
        except FloatingPointError as exc:
            raise RuntimeError(
                f"differentiation matrix overflows for {rule.basis_kind} basis at M={rule.M}"
            ) from exc
    d = sign[None, :] * sign[:, None] * mag / diff
    if rule.basis_kind == LAGUERRE_POLYNOMIALS:
        np.fill_diagonal(d, 0.0)
        np.fill_diagonal(d, -d.sum(axis=1))
    else:
        inv = 1.0 / diff
        np.fill_diagonal(inv, 0.0)
        np.fill_diagonal(d, inv.sum(axis=1) - 0.5 * rule.beta)
    return DiffMatrix(d, rule)


def lagrange_cardinal_eval(rule: QuadratureRule, j: int, z: float) -> float:
    """Cardinal basis member j of the rule evaluated at z >= 0.

    Polynomial family: the plain Lagrange product.  Function family: the
    same product times exp(-beta (z - z_j) / 2), so the cardinal property
    at the nodes is preserved.
    """
    if not 0 <= j <= rule.M:
        raise IndexError(f"cardinal index {j} outside 0..{rule.M}")
    if z < 0:
        raise ValueError("z must be non-negative")
    nodes = rule.nodes
    val = 1.0
    for m in range(rule.n):
        if m != j:
            val *= (z - nodes[m]) / (nodes[j] - nodes[m])
    if rule.basis_kind == LAGUERRE_FUNCTIONS:
        val *= np.exp(-0.5 * rule.beta * (z - nodes[j]))
    return float(val)


def cardinal_values_at_origin(rule: QuadratureRule) -> np.ndarray:
    """Vector of all cardinal basis values at z = 0."""
    return np.array([lagrange_cardinal_eval(rule, j, 0.0) for j in range(rule.n)])
