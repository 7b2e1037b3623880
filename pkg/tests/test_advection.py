import numpy as np
import pytest

from lagdg.advection import (
    INFLOW,
    OUTFLOW,
    SchemeVariant,
    SemiDiscreteOperator,
    apply,
    assemble,
)
from lagdg.basis import BasisSpec, laguerre_fun_derivative_expansion, laguerre_fun_eval
from lagdg.quadrature import build_rule
from lagdg.spectrum import eigenvalues


def spectra_distance(a, b):
    """Greedy nearest-neighbor matching distance between two spectra."""
    lam_a = list(eigenvalues(a))
    lam_b = list(eigenvalues(b))
    worst = 0.0
    for z in lam_a:
        j = int(np.argmin([abs(z - w) for w in lam_b]))
        worst = max(worst, abs(z - lam_b.pop(j)))
    return worst


class TestModalVariants:
    def test_function_inflow_matrix_and_forcing(self):
        op = assemble(SchemeVariant("modal", "functions", direction=INFLOW, q_left=2.0), 1.0, 3, 1.0)
        expect = -np.tril(np.ones((4, 4)))
        np.fill_diagonal(expect, -0.5)
        assert op.A == pytest.approx(expect)
        assert op.g == pytest.approx(np.full(4, 2.0))
        assert op.dof_offset == 0

    def test_poly_outflow_strictly_upper(self):
        op = assemble(SchemeVariant("modal", "polynomials", direction=OUTFLOW), 1.0, 2, -1.0)
        assert op.A == pytest.approx(-np.triu(np.ones((3, 3)), 1))
        assert np.all(op.g == 0)
        assert np.max(np.abs(eigenvalues(op.A))) == 0.0

    def test_forcing_scales_with_beta(self):
        op = assemble(SchemeVariant("modal", "functions", direction=INFLOW, q_left=1.0), 2.0, 4, 3.0)
        assert op.g == pytest.approx(np.full(5, 6.0))

    @pytest.mark.parametrize("basis,direction,u,expect", [
        ("functions", INFLOW, 1.0, -0.5),
        ("functions", OUTFLOW, -1.0, -0.5),
        ("polynomials", INFLOW, 1.0, -1.0),
        ("polynomials", OUTFLOW, -1.0, 0.0),
    ])
    def test_diagonal_eigenvalues(self, basis, direction, u, expect):
        op = assemble(SchemeVariant("modal", basis, direction=direction), 1.0, 10, u)
        assert np.diag(op.A) == pytest.approx(np.full(11, expect))
        assert op.exact_eigenvalues == pytest.approx(np.full(11, expect + 0j))


class TestStrongCollocation:
    def test_outflow_matrix_is_differentiation(self):
        beta, M = 1.0, 5
        op = assemble(SchemeVariant("strong", "functions", direction=OUTFLOW), beta, M, -1.0)
        spec = BasisSpec("functions", beta, M)
        rule = build_rule("glr", "functions", beta, M)
        v = np.array([laguerre_fun_eval(spec, 2, z) for z in rule.nodes])
        c = laguerre_fun_derivative_expansion(spec, 2)
        expect = sum(c[k] * np.array([laguerre_fun_eval(spec, k, z) for z in rule.nodes])
                     for k in range(3))
        assert op.A @ v == pytest.approx(expect, abs=1e-8)
        assert np.all(op.g == 0)

    def test_inflow_drops_boundary_dof(self):
        op = assemble(SchemeVariant("strong", "functions", direction=INFLOW, q_left=1.5), 1.0, 8, 1.0)
        assert op.n == 8
        assert op.dof_offset == 1

    def test_gl_nodes_rejected(self):
        with pytest.raises(ValueError):
            assemble(SchemeVariant("strong", "functions", node_kind="gl", direction=OUTFLOW), 1.0, 5, -1.0)


class TestWeakNodal:
    def test_outflow_forcing_is_zero(self):
        for basis in ("functions", "polynomials"):
            for nodes in ("gl", "glr"):
                op = assemble(SchemeVariant("nodal", basis, nodes, OUTFLOW), 1.0, 6, -1.0)
                assert np.all(op.g == 0)

    def test_glr_inflow_similarity_with_differentiation_block(self):
        # u Om^-1 D_M Om has the same spectrum as u D_M
        beta, M, u = 1.0, 9, 1.0
        op = assemble(SchemeVariant("nodal", "functions", "glr", INFLOW, q_left=0.0), beta, M, u)
        from lagdg.quadrature import build_diff_matrix

        D = build_diff_matrix(build_rule("glr", "functions", beta, M)).entries
        rho = np.max(np.abs(eigenvalues(u * D[1:, 1:])))
        assert spectra_distance(op.A, u * D[1:, 1:]) < 1e-8 * max(1.0, rho)

    def test_glr_function_inflow_spectrum_matches_collocation(self):
        # the weak nodal GLR scheme shares the (purely imaginary)
        # collocation spectrum; the matrices differ only by a weighted
        # similarity plus the summation-by-parts transposition
        beta, M, u = 1.3, 7, 1.0
        nodal = assemble(SchemeVariant("nodal", "functions", "glr", INFLOW, q_left=0.7), beta, M, u)
        strong = assemble(SchemeVariant("strong", "functions", "glr", INFLOW, q_left=0.7), beta, M, u)
        assert spectra_distance(nodal.A, strong.A) < 1e-8
        assert np.max(np.abs(eigenvalues(nodal.A).real)) < 1e-10

    def test_glr_poly_outflow_is_nilpotent(self):
        for M in (2, 4, 6):
            op = assemble(SchemeVariant("nodal", "polynomials", "glr", OUTFLOW), 1.0, M, -1.0)
            power = np.linalg.matrix_power(op.A, M + 1)
            scale = np.linalg.norm(op.A) ** (M + 1)
            assert np.linalg.norm(power) < 1e-10 * scale
            assert op.exact_eigenvalues == pytest.approx(np.zeros(M + 1, dtype=complex))

    def test_glr_poly_inflow_exact_spectrum_matches_dense_solver_at_small_m(self):
        # closed-form spectrum -beta u / 2 + i (beta u / 2) cot(pi m / (M+1));
        # dense QR is still reliable at this size
        beta, M, u = 1.0, 6, 1.0
        op = assemble(SchemeVariant("nodal", "polynomials", "glr", INFLOW), beta, M, u)
        lam_dense = np.sort(np.linalg.eigvals(op.A).imag)
        lam_exact = np.sort(np.asarray(op.exact_eigenvalues).imag)
        assert lam_dense == pytest.approx(lam_exact, abs=1e-10)
        assert np.real(op.exact_eigenvalues) == pytest.approx(np.full(M, -0.5 * beta * u))

    def test_m10_matrix_sizes(self):
        for nodes, direction, n in (("glr", INFLOW, 10), ("glr", OUTFLOW, 11),
                                    ("gl", INFLOW, 11), ("gl", OUTFLOW, 11)):
            u = 1.0 if direction == INFLOW else -1.0
            op = assemble(SchemeVariant("nodal", "functions", nodes, direction), 1.0, 10, u)
            assert op.n == n


class TestApplyAndValidation:
    def test_zero_operator(self):
        op = SemiDiscreteOperator(np.zeros((3, 3)), np.zeros(3))
        assert apply(op, np.array([1.0, -2.0, 3.0])) == pytest.approx(np.zeros(3))

    def test_modal_single_mode_active(self):
        beta, u, M = 1.0, 1.0, 4
        op = assemble(SchemeVariant("modal", "functions", direction=INFLOW, q_left=0.0), beta, M, u)
        e0 = np.zeros(M + 1)
        e0[0] = 1.0
        expect = np.full(M + 1, -beta * u)
        expect[0] = -0.5 * beta * u
        assert apply(op, e0) == pytest.approx(expect)

    def test_matches_dense_product_oracle(self):
        rng = np.random.default_rng(17)
        A = rng.normal(size=(6, 6))
        g = rng.normal(size=6)
        q = rng.normal(size=6)
        op = SemiDiscreteOperator(A, g)
        expect = np.array([np.dot(A[i], q) + g[i] for i in range(6)])
        assert apply(op, q) == pytest.approx(expect, abs=1e-13)

    def test_dimension_mismatch(self):
        op = SemiDiscreteOperator(np.zeros((3, 3)), np.zeros(3))
        with pytest.raises(ValueError):
            apply(op, np.zeros(4))

    def test_direction_sign_mismatch(self):
        with pytest.raises(ValueError):
            assemble(SchemeVariant("modal", "functions", direction=INFLOW), 1.0, 4, -1.0)
        with pytest.raises(ValueError):
            assemble(SchemeVariant("modal", "functions", direction=OUTFLOW), 1.0, 4, 1.0)
        with pytest.raises(ValueError):
            assemble(SchemeVariant("modal", "functions", direction=INFLOW), 1.0, 4, 0.0)
