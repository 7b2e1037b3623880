import numpy as np
import pytest

from lagdg.coupled import SWEConfig, swe_system
from lagdg.dg import (
    DGOperator,
    DGState,
    Mesh1D,
    characteristic_ghost,
    dg_rhs,
    edge_values,
    eval_at,
    eval_at_centers,
    project_dg,
    trace_at_right,
)
from lagdg.scenarios import dg_advection_error, _advection_system
from lagdg.semiinf import flux_split


class TestProjection:
    def test_constant(self):
        mesh = Mesh1D(2.0, 5)
        state = project_dg([lambda z: 3.0 + 0.0 * z], mesh, 2)
        assert state.coeffs[:, 0, 0] == pytest.approx(np.full(5, 3.0))
        assert np.max(np.abs(state.coeffs[:, 0, 1:])) < 1e-14

    def test_linear_exact(self):
        mesh = Mesh1D(1.0, 4)
        state = project_dg([lambda z: 2.0 * z - 0.3], mesh, 1)
        xs = np.linspace(0.01, 0.99, 23)
        vals = eval_at(state, mesh, xs)[0]
        assert vals == pytest.approx(2.0 * xs - 0.3, abs=1e-13)

    def test_gaussian_projection_error_scales(self):
        f = lambda z: np.exp(-(((z - 0.5) / 0.1) ** 2))
        errs = []
        for nx in (8, 16, 32):
            mesh = Mesh1D(1.0, nx)
            state = project_dg([f], mesh, 1)
            xs = np.linspace(0, 1, 301)
            errs.append(np.max(np.abs(eval_at(state, mesh, xs)[0] - f(xs))))
        assert errs[2] < errs[1] < errs[0]
        assert errs[1] / errs[2] > 2.0


class TestRhs:
    def test_constant_state_is_steady(self):
        sys = swe_system(SWEConfig())
        mesh = Mesh1D(10.0, 16)
        q_star = np.array([0.7, -0.2])
        state = project_dg([lambda z: q_star[0] + 0.0 * z, lambda z: q_star[1] + 0.0 * z], mesh, 1)
        rhs = dg_rhs(sys, mesh, state, 0.0,
                     left_bc=(q_star, np.array([False, True])),
                     right_exterior=q_star)
        assert np.max(np.abs(rhs)) < 1e-13

    def test_p0_reduces_to_upwind_finite_volume(self):
        sys = _advection_system(1.0)
        mesh = Mesh1D(1.0, 10)
        rng = np.random.default_rng(1)
        q = rng.normal(size=(10, 1, 1))
        state = DGState(q.copy(), 0)
        rhs = dg_rhs(sys, mesh, state, 0.0, left_bc=(np.array([0.3]), np.array([True])))
        vals = q[:, 0, 0]
        expect = np.empty(10)
        expect[0] = -(vals[0] - 0.3) / mesh.dz
        expect[1:] = -np.diff(vals) / mesh.dz
        assert rhs[:, 0, 0] == pytest.approx(expect, abs=1e-13)

    def test_upwind_flux_consistency(self):
        sys = swe_system(SWEConfig())
        ap, am = flux_split(sys.coeff_a(None, 0.0), sys.eig(None, 0.0))
        rng = np.random.default_rng(2)
        for _ in range(5):
            q = rng.normal(size=2)
            assert ap @ q + am @ q == pytest.approx(sys.coeff_a(None, 0.0) @ q, abs=1e-12)

    def test_conservation_of_compact_pulse(self):
        # zero boundary fluxes: total integral of the state is conserved
        sys = _advection_system(1.0)
        mesh = Mesh1D(1.0, 40)
        f = lambda z: np.exp(-(((z - 0.35) / 0.05) ** 2))
        state = project_dg([f], mesh, 1)
        op = DGOperator(sys, mesh, 1)
        rhs = op.rhs(state.coeffs, 0.0, np.array([0.0]), np.array([True]), None)
        # total integral rate = dz * sum of constant-mode rates
        assert abs(mesh.dz * rhs[:, 0, 0].sum()) < 1e-10

    def test_linearity(self):
        sys = swe_system(SWEConfig())
        mesh = Mesh1D(5.0, 9)
        op = DGOperator(sys, mesh, 1)
        rng = np.random.default_rng(3)
        a = rng.normal(size=(9, 2, 2))
        b = rng.normal(size=(9, 2, 2))
        zero = np.zeros(2)
        mask = np.array([False, False])
        lhs = op.rhs(3.0 * a + b, 0.0, zero, mask, None)
        rhs = 3.0 * op.rhs(a, 0.0, zero, mask, None) + op.rhs(b, 0.0, zero, mask, None)
        assert lhs == pytest.approx(rhs, abs=1e-12)

    def test_convergence_order_two(self):
        errs = [dg_advection_error(1.0, 1, nx, 0.5, 0.1) for nx in (50, 100, 200)]
        orders = [np.log2(errs[i] / errs[i + 1]) for i in range(2)]
        assert min(orders) >= 1.9


class TestTraceAndGhost:
    def test_trace_p0(self):
        state = DGState(np.array([[[2.0]], [[5.0]]]), 0)
        mesh = Mesh1D(1.0, 2)
        assert trace_at_right(state, mesh) == pytest.approx([5.0])

    def test_trace_p1(self):
        state = DGState(np.array([[[1.0, 0.5]]]), 1)
        mesh = Mesh1D(1.0, 1)
        assert trace_at_right(state, mesh) == pytest.approx([1.0 + np.sqrt(3) * 0.5])

    def test_trace_matches_eval(self):
        rng = np.random.default_rng(4)
        state = DGState(rng.normal(size=(6, 2, 3)), 2)
        mesh = Mesh1D(3.0, 6)
        tr = trace_at_right(state, mesh)
        ev = eval_at(state, mesh, 3.0 - 1e-12)[:, 0]
        assert tr == pytest.approx(ev, abs=1e-9)

    def test_ghost_imposes_velocity(self):
        sys = swe_system(SWEConfig())
        q_int = np.array([0.23, -0.11])
        u_bc = 0.4
        ghost = characteristic_ghost(sys.eig(None, 0.0), q_int,
                                     np.array([0.0, u_bc]), np.array([False, True]))
        # the upwind interface state takes incoming characteristics from the
        # ghost and outgoing from the interior: its velocity must be u_bc
        V, lam, Vinv = sys.eig(None, 0.0)
        w_ghost = Vinv @ ghost
        w_int = Vinv @ q_int
        w_star = np.where(lam > 0, w_ghost, w_int)
        q_star = V @ w_star
        assert q_star[1] == pytest.approx(u_bc, abs=1e-13)

    def test_ghost_transmissive_default(self):
        sys = swe_system(SWEConfig())
        q_int = np.array([1.0, 2.0])
        ghost = characteristic_ghost(sys.eig(None, 0.0), q_int, None, None)
        assert ghost == pytest.approx(q_int)

    def test_ghost_count_mismatch(self):
        sys = swe_system(SWEConfig())
        with pytest.raises(ValueError):
            characteristic_ghost(sys.eig(None, 0.0), np.zeros(2),
                                 np.array([1.0, 1.0]), np.array([True, True]))

    def test_mass_matrix_orthonormality(self):
        # int phi_p phi_q over the element equals dz * delta_pq
        from lagdg.dg import gauss_legendre
        from lagdg.basis import legendre_eval

        xi, w = gauss_legendre(6)
        dz = 0.7
        for p in range(4):
            for q in range(4):
                phi_p = np.sqrt(2 * p + 1) * legendre_eval(p, xi)
                phi_q = np.sqrt(2 * q + 1) * legendre_eval(q, xi)
                val = (dz / 2) * np.sum(w * phi_p * phi_q)
                assert val == pytest.approx(dz if p == q else 0.0, abs=1e-12)

    def test_edge_values(self):
        left, right = edge_values(2)
        assert right == pytest.approx([1.0, np.sqrt(3), np.sqrt(5)])
        assert left == pytest.approx([1.0, -np.sqrt(3), np.sqrt(5)])

    def test_eval_at_centers_p1(self):
        rng = np.random.default_rng(5)
        coeffs = rng.normal(size=(4, 1, 2))
        state = DGState(coeffs.copy(), 1)
        assert eval_at_centers(state)[:, 0] == pytest.approx(coeffs[:, 0, 0])
