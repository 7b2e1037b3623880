import numpy as np
import pytest
from scipy.linalg import lu_factor

from lagdg.advection import SchemeVariant, SemiDiscreteOperator, assemble
from lagdg.spectrum import classify, eigenvalues


def lu_determinant(a):
    """Independent determinant oracle via LU factorization."""
    lu, piv = lu_factor(a)
    sign = 1.0
    for i, p in enumerate(piv):
        if p != i:
            sign = -sign
    return sign * np.prod(np.diag(lu))


class TestEigenvalues:
    def test_diagonal(self):
        lam = np.sort_complex(eigenvalues(np.diag([1.0, -2.0, 3.0])))
        assert lam == pytest.approx([-2.0, 1.0, 3.0])

    def test_rotation(self):
        lam = eigenvalues(np.array([[0.0, -1.0], [1.0, 0.0]]))
        assert np.sort(lam.imag) == pytest.approx([-1.0, 1.0])
        assert lam.real == pytest.approx([0.0, 0.0], abs=1e-15)

    def test_determinant_and_trace_oracles(self):
        rng = np.random.default_rng(23)
        a = rng.normal(size=(8, 8))
        lam = eigenvalues(a)
        det = lu_determinant(a)
        assert np.prod(lam).real == pytest.approx(det, rel=1e-9)
        assert abs(np.prod(lam).imag) < 1e-9 * abs(det)
        assert np.sum(lam).real == pytest.approx(np.trace(a), rel=1e-10)

    def test_conjugate_pairing(self):
        rng = np.random.default_rng(29)
        a = rng.normal(size=(9, 9))
        lam = eigenvalues(a)
        conj_sorted = np.sort_complex(np.conj(lam))
        assert np.max(np.abs(np.sort_complex(lam) - conj_sorted)) < 1e-9

    def test_triangular_returns_diagonal_exactly(self):
        a = np.tril(np.ones((40, 40)))
        np.fill_diagonal(a, np.arange(40, dtype=float))
        lam = eigenvalues(a)
        assert np.sort(lam.real) == pytest.approx(np.arange(40.0), abs=1e-12)
        assert np.all(lam.imag == 0)

    def test_input_validation(self):
        with pytest.raises(ValueError):
            eigenvalues(np.ones((2, 3)))
        with pytest.raises(ValueError):
            eigenvalues(np.array([[1.0, np.inf], [0.0, 1.0]]))


class TestClassify:
    def test_modal_function_operator_all_at_minus_half(self):
        op = assemble(SchemeVariant("modal", "functions", direction="outflow"), 1.0, 50, -1.0)
        report = classify(op)
        assert report.eigenvalues.real == pytest.approx(np.full(51, -0.5), abs=1e-12)
        assert report.stable

    def test_collocation_poly_outflow_unstable(self):
        op = assemble(SchemeVariant("strong", "polynomials", direction="outflow"), 1.0, 50, -1.0)
        assert not classify(op).stable

    def test_gl_outflow_blowup(self):
        op = assemble(SchemeVariant("nodal", "functions", "gl", "outflow"), 1.0, 50, -1.0)
        assert classify(op).spectral_radius >= 1e10

    def test_small_drift_tolerated(self):
        a = np.array([[0.0, 10.0], [-10.0, 1e-12]])
        report = classify(SemiDiscreteOperator(a, np.zeros(2)))
        assert report.stable
        assert report.spectral_radius == pytest.approx(10.0, rel=1e-6)

    def test_stability_sweep_matches_qualitative_table(self):
        stable_variants = [
            ("strong", "functions", "glr", "inflow"),
            ("strong", "functions", "glr", "outflow"),
            ("nodal", "functions", "glr", "inflow"),
            ("nodal", "functions", "glr", "outflow"),
            ("nodal", "polynomials", "glr", "inflow"),
            ("nodal", "polynomials", "glr", "outflow"),
            ("modal", "functions", "glr", "inflow"),
            ("modal", "functions", "glr", "outflow"),
            ("modal", "polynomials", "glr", "inflow"),
            ("modal", "polynomials", "glr", "outflow"),
        ]
        for beta in (0.5, 2.0):
            for M in (10, 25):
                for form, basis, nodes, direction in stable_variants:
                    u = 1.0 if direction == "inflow" else -1.0
                    op = assemble(SchemeVariant(form, basis, nodes, direction), beta, M, u)
                    assert classify(op).stable, (form, basis, nodes, direction, beta, M)
                op = assemble(SchemeVariant("strong", "polynomials", "glr", "outflow"), beta, M, -1.0)
                assert not classify(op).stable
