"""Split-domain solver: DG on [0, L], modal Laguerre on [L, inf).

The two discretizations exchange interface data once per right-hand-side
evaluation: the DG trace at L becomes the Dirichlet vector of the modal
scheme, and the modal trace at its origin becomes the exterior state of
the DG upwind flux.  Time integration is the explicit three-stage
third-order Runge-Kutta scheme.

The linearized shallow water system with sigmoid Rayleigh damping in the
semi-infinite part is provided as the stock wave model.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .basis import LAGUERRE_FUNCTIONS, BasisSpec
from .dg import DGOperator, DGState, Mesh1D, edge_values, project_dg, trace_at_right
from .semiinf import (
    HyperbolicSystem,
    LaguerreModalOperator,
    ModalState,
    project as project_semi,
    trace_at_origin,
)

DEFAULT_CFL = 0.3


@dataclass(frozen=True)
class SigmoidDamping:
    """Rayleigh damping profile dgamma / (1 + exp((alpha L0 - x) / sigma))."""

    dgamma: float
    L0: float
    alpha: float = 0.25
    sigma: float | None = None  # defaults to L0 / 20

    def __post_init__(self):
        if self.dgamma < 0:
            raise ValueError("damping amplitude must be non-negative")
        if self.sigma is None:
            object.__setattr__(self, "sigma", self.L0 / 20.0)
        if not self.sigma > 0:
            raise ValueError("sigmoid steepness must be positive")


def sigmoid_gamma(damping: SigmoidDamping, x) -> np.ndarray | float:
    """Damping coefficient at x; saturates instead of overflowing."""
    arg = np.clip((damping.alpha * damping.L0 - np.asarray(x, dtype=float)) / damping.sigma, -700.0, 700.0)
    val = damping.dgamma / (1.0 + np.exp(arg))
    return float(val) if np.ndim(val) == 0 else val


@dataclass(frozen=True)
class SWEConfig:
    """Linearized shallow water parameters; damping applies where installed."""

    H: float = 1.0
    U: float = 0.0
    grav: float = 9.81
    damping: SigmoidDamping | None = None

    def __post_init__(self):
        if self.H <= 0 or self.grav <= 0:
            raise ValueError("reference height and gravity must be positive")
        if abs(self.U) >= np.sqrt(self.grav * self.H):
            raise ValueError("supercritical background flow: characteristic directions degenerate")

    @property
    def wave_speed(self) -> float:
        return float(np.sqrt(self.grav * self.H))


def swe_system(cfg: SWEConfig) -> HyperbolicSystem:
    """d=2 system for (h, u): speeds U +- sqrt(g H), closed-form eigenvectors."""
    H, U, g = cfg.H, cfg.U, cfg.grav
    c = cfg.wave_speed
    a = np.array([[U, H], [g, U]])
    V = np.array([[H, H], [c, -c]])
    Vinv = np.array([[c, H], [c, -H]]) / (2.0 * H * c)
    lam = np.array([U + c, U - c])
    if cfg.damping is not None:
        damping = cfg.damping

        def coeff_b(q, z):
            return -sigmoid_gamma(damping, z) * np.eye(2)

    else:
        coeff_b = None
    return HyperbolicSystem(
        d=2,
        coeff_a=lambda q, z: a,
        eig=lambda q, z: (V, lam, Vinv),
        coeff_b=coeff_b,
        is_constant=True,
    )


@dataclass(eq=False)
class CoupledState:
    dg: DGState
    semi: ModalState
    t: float = 0.0


def rk3_step(rhs: Callable, y: np.ndarray, t: float, dt: float) -> np.ndarray:
    """Three-stage third-order step: y + dt/6 (K1 + K2 + 4 K3)."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    k1 = rhs(t, y)
    k2 = rhs(t + dt, y + dt * k1)
    k3 = rhs(t + 0.5 * dt, y + 0.25 * dt * (k1 + k2))
    out = y + (dt / 6.0) * (k1 + k2 + 4.0 * k3)
    if not np.all(np.isfinite(out)):
        bad = [name for name, k in (("K1", k1), ("K2", k2), ("K3", k3)) if not np.all(np.isfinite(k))]
        raise RuntimeError(f"time step produced non-finite values at t={t} (stages: {bad or ['update']})")
    return out


class CoupledModel:
    """Prepared coupled right-hand side over a flat state vector.

    left_bc, when given, is a callable t -> (values, mask) describing the
    Dirichlet data at z = 0; mask marks the prescribed physical
    components.  Damping belongs to the semi-infinite system only; the
    finite domain always runs undamped.
    """

    def __init__(self, cfg: SWEConfig, mesh: Mesh1D, p: int, spec: BasisSpec,
                 left_bc: Callable | None = None):
        if spec.kind != LAGUERRE_FUNCTIONS:
            raise ValueError("coupling requires the Laguerre function basis outside")
        self.cfg = cfg
        self.mesh = mesh
        self.p = p
        self.spec = spec
        self.left_bc = left_bc
        self.sys_dg = swe_system(replace(cfg, damping=None))
        self.sys_semi = swe_system(cfg)
        self.dg_op = DGOperator(self.sys_dg, mesh, p)
        self.semi_op = LaguerreModalOperator(self.sys_semi, spec)
        self.d = 2
        self._n_dg = mesh.n_elements * self.d * (p + 1)
        self._dg_shape = (mesh.n_elements, self.d, p + 1)
        self._semi_shape = (self.d, spec.M + 1)
        self._e_right = edge_values(p)[1]

    # --- flat packing -------------------------------------------------
    def pack(self, state: CoupledState) -> np.ndarray:
        return np.concatenate([state.dg.coeffs.ravel(), state.semi.coeffs.ravel()])

    def unpack(self, y: np.ndarray, t: float = 0.0) -> CoupledState:
        dg = DGState(y[: self._n_dg].reshape(self._dg_shape).copy(), self.p)
        semi = ModalState(y[self._n_dg:].reshape(self._semi_shape).copy(), self.spec,
                          origin_shift=self.mesh.length)
        return CoupledState(dg, semi, t)

    # --- dynamics -----------------------------------------------------
    def rhs(self, t: float, y: np.ndarray) -> np.ndarray:
        dg_coeffs = y[: self._n_dg].reshape(self._dg_shape)
        semi_coeffs = y[self._n_dg:].reshape(self._semi_shape)
        values, mask = self.left_bc(t) if self.left_bc is not None else (None, None)
        dg_trace = dg_coeffs[-1] @ self._e_right
        semi_trace = semi_coeffs.sum(axis=1)
        dg_dot = self.dg_op.rhs(dg_coeffs, t, values, mask, semi_trace)
        semi_dot = self.semi_op.rhs(semi_coeffs, t, dg_trace)
        return np.concatenate([dg_dot.ravel(), semi_dot.ravel()])

    def initial_state(self, h_fun, u_fun) -> CoupledState:
        """Project (h, u) profiles given in the physical coordinate."""
        L = self.mesh.length
        dg = project_dg([h_fun, u_fun], self.mesh, self.p)
        semi = project_semi([lambda z: h_fun(z + L), lambda z: u_fun(z + L)],
                            self.spec, origin_shift=L)
        return CoupledState(dg, semi, 0.0)

    def max_speed(self) -> float:
        return abs(self.cfg.U) + self.cfg.wave_speed


def coupled_rhs(sys: HyperbolicSystem, mesh: Mesh1D, state: CoupledState, t: float,
                left_bc=None) -> tuple[np.ndarray, np.ndarray]:
    """Trace-exchanging right-hand side for an arbitrary prepared system.

    Returns (dg_coefficient_rates, modal_coefficient_rates); both substates
    see the other's boundary trace at the same time level.
    """
    dg_op = DGOperator(sys, mesh, state.dg.p)
    semi_op = LaguerreModalOperator(sys, state.semi.spec)
    values, mask = left_bc if left_bc is not None else (None, None)
    dg_dot = dg_op.rhs(state.dg.coeffs, t, values, mask, trace_at_origin(state.semi))
    semi_dot = semi_op.rhs(state.semi.coeffs, t, trace_at_right(state.dg, mesh))
    return dg_dot, semi_dot


def run_simulation(rhs: Callable, y0: np.ndarray, t0: float, dt: float, n_steps: int,
                   observers=(), max_speed: float | None = None,
                   min_dz: float | None = None, cfl_max: float = DEFAULT_CFL) -> np.ndarray:
    """Advance n_steps RK3 steps; observers are called as f(step, t, y).

    The CFL check is advisory: a warning, not an error, so runs can match
    externally prescribed step counts exactly.
    """
    if n_steps < 0:
        raise ValueError("n_steps must be non-negative")
    if max_speed is not None and min_dz is not None and n_steps > 0:
        cfl = dt * max_speed / min_dz
        if cfl > cfl_max:
            warnings.warn(f"advective CFL {cfl:.3f} exceeds {cfl_max}", RuntimeWarning, stacklevel=2)
    y = np.asarray(y0, dtype=float).copy()
    t = t0
    for obs in observers:
        obs(0, t, y)
    for step in range(1, n_steps + 1):
        y = rk3_step(rhs, y, t, dt)
        t = t0 + step * dt
        for obs in observers:
            obs(step, t, y)
    return y


def dg_energy(mesh: Mesh1D, coeffs: np.ndarray, grav: float, H: float) -> float:
    """(1/2) integral of (g h^2 + H u^2) over the finite domain."""
    return 0.5 * mesh.dz * float(
        grav * np.sum(coeffs[:, 0, :] ** 2) + H * np.sum(coeffs[:, 1, :] ** 2)
    )


def semi_energy(coeffs: np.ndarray, beta: float, grav: float, H: float) -> float:
    """(1/2) integral of (g h^2 + H u^2) over the semi-infinite domain."""
    return 0.5 / beta * float(grav * np.sum(coeffs[0] ** 2) + H * np.sum(coeffs[1] ** 2))
