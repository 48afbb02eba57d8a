import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from commtriples.diffops import (
    In2_operator,
    InvariantOperator,
    algebra_commutativity_probe,
    apply_operator,
    compose_apply,
    curl,
    default_generators,
    grad_div,
    laplacian,
    operator_symbol_at,
    random_smooth_field,
    symbol_I31,
    symbol_In2,
)
from commtriples.group_geometry import haar_samples
from commtriples.numerics import ContractViolation
from commtriples.spherical_rn import BesselLabel, SphericalFunction


class TestSymbols:
    def test_I31_at_zero(self):
        assert np.array_equal(symbol_I31(np.zeros(3)), np.zeros((3, 3)))

    def test_I31_at_e1(self):
        assert np.array_equal(symbol_I31(np.array([1.0, 0, 0])), [[0, 0, 0], [0, 0, -1], [0, 1, 0]])

    def test_I31_is_cross_product(self, rng):
        for _ in range(20):
            x, v = rng.normal(size=3), rng.normal(size=3)
            assert np.allclose(symbol_I31(x) @ v, np.cross(x, v), atol=1e-15)

    def test_In2_traceless(self, rng):
        for n in (3, 4, 7):
            assert abs(np.trace(symbol_In2(rng.normal(size=n), n))) < 1e-14

    def test_In2_at_e1(self):
        assert np.allclose(symbol_In2(np.eye(4)[0], 4), np.diag([0.75, -0.25, -0.25, -0.25]), atol=0)

    def test_I31_rejects_other_dimensions(self):
        with pytest.raises(ContractViolation):
            symbol_I31(np.zeros(4))

    def test_relation_between_symbols(self, rng):
        # x x^T = |x|^2 I + I31(x)^2 in three dimensions
        x = rng.normal(size=3)
        assert np.allclose(np.outer(x, x), x @ x * np.eye(3) + symbol_I31(x) @ symbol_I31(x))

    @pytest.mark.parametrize("op", [laplacian(3), curl(), grad_div(3), In2_operator(3),
                                    laplacian(5), grad_div(5), In2_operator(5)],
                             ids=lambda o: f"{o.name}-{o.n}")
    def test_equivariance_of_symbols(self, op):
        rng = np.random.default_rng(0)
        for k in haar_samples(op.n, 100, seed=1):
            x = rng.normal(size=op.n)
            assert np.max(np.abs(op(k @ x) - k @ op(x) @ k.T)) < 1e-12

    @given(st.floats(-3, 3), st.integers(0, 1000))
    def test_homogeneity(self, c, seed):
        x = np.random.default_rng(seed).normal(size=3)
        for op in (laplacian(3), curl(), grad_div(3)):
            assert np.allclose(op(c * x), c**op.degree * op(x), atol=1e-12)

    def test_products_close_on_three_generators(self, rng):
        # every word of length <= 4 in {I, I31} is p I + q I31 + r I31^2
        x = rng.normal(size=3)
        A = symbol_I31(x)
        basis = np.stack([np.eye(3), A, A @ A]).reshape(3, -1).T
        for length in range(5):
            for word in itertools.product([np.eye(3), A], repeat=length):
                M = np.linalg.multi_dot([np.eye(3), np.eye(3), *word])
                coef, *_ = np.linalg.lstsq(basis, M.ravel(), rcond=None)
                assert np.allclose(basis @ coef, M.ravel(), atol=1e-12)

    def test_polarized_coefficients_rebuild_the_symbol(self, rng):
        for op in (laplacian(4), grad_div(4), curl(), In2_operator(3)):
            x = rng.normal(size=op.n)
            rebuilt = sum(c * np.prod(x ** np.array(a)) for a, c in op.coefficients.items())
            assert np.allclose(rebuilt, op(x), atol=1e-13)


class TestSymbolAtFrequency:
    def test_laplacian(self):
        s = 1.7
        assert np.allclose(operator_symbol_at(laplacian(3), [s, 0, 0]), -s * s * np.eye(3))

    def test_curl_eigenvalue_on_rotating_vector(self):
        s = 2.0
        Q = operator_symbol_at(curl(), [s, 0, 0])
        v = np.array([0, 1, 1j])
        assert np.allclose(Q @ v, -s * v)

    def test_grad_div(self):
        s = 1.3
        Q = operator_symbol_at(grad_div(4), [s, 0, 0, 0])
        assert np.allclose(Q, -s * s * np.diag([1.0, 0, 0, 0]))
        assert np.allclose(np.sort(np.linalg.eigvalsh(Q)), [-s * s, 0, 0, 0])


class TestApplication:
    def test_laplacian_of_plane_wave(self, rng):
        xi = rng.normal(size=3)
        F = lambda x: np.exp(-1j * xi @ x) * np.eye(3)
        x = rng.normal(size=3)
        got = apply_operator(laplacian(3), F, x)
        assert np.max(np.abs(got + (xi @ xi) * F(x))) < 1e-6

    def test_curl_of_gradient(self, rng):
        a = rng.normal(size=3)
        # columns are gradients of phi_j(x) = sin(a.x + j)
        F = lambda x: np.stack([a * np.cos(a @ x + j) for j in range(3)], axis=1)
        assert np.max(np.abs(apply_operator(curl(), F, rng.normal(size=3)))) < 1e-6

    def test_grad_div_is_laplacian_plus_curl_curl(self, rng):
        for _ in range(5):
            F = random_smooth_field(3, rng)
            x = rng.uniform(-1, 1, 3)
            lhs = apply_operator(grad_div(3), F, x)
            rhs = apply_operator(laplacian(3), F, x) + compose_apply([curl(), curl()], F, x)
            assert np.max(np.abs(lhs - rhs)) <= 1e-5

    def test_grad_div_splits_into_In2_and_laplacian(self, rng):
        F = random_smooth_field(4, rng)
        x = rng.uniform(-1, 1, 4)
        lhs = apply_operator(grad_div(4), F, x)
        rhs = apply_operator(In2_operator(4), F, x) + apply_operator(laplacian(4), F, x) / 4
        assert np.max(np.abs(lhs - rhs)) < 1e-7

    def test_columnwise_action(self, rng):
        F = random_smooth_field(3, rng)
        x = rng.normal(size=3)
        full = apply_operator(curl(), F, x)
        col = apply_operator(curl(), lambda y: F(y)[:, 1], x)
        assert np.allclose(full[:, 1], col)


class TestCommutativityProbe:
    @pytest.mark.parametrize("n", [3, 4, 5])
    def test_generators_commute(self, n):
        report = algebra_commutativity_probe(default_generators(n), trials=3)
        assert report.passed and report.max_residual <= 1e-4

    def test_single_operator(self):
        report = algebra_commutativity_probe([laplacian(3)])
        assert report.max_residual == 0.0 and report.passed

    def test_detects_noncommuting_pair(self):
        # matrix coefficients that do not commute
        A = InvariantOperator("A", 2, 1, lambda x: np.array([[0, x[0]], [0, 0]]))
        B = InvariantOperator("B", 2, 1, lambda x: np.array([[0, 0], [x[0], 0]]))
        assert not algebra_commutativity_probe([A, B], trials=2).passed


@pytest.mark.parametrize("n,s,j", [(3, 1.0, 1), (3, 2.0, 2), (3, 0.5, 3), (4, 1.0, 1), (4, 3.0, 2), (5, 1.0, 2)])
def test_laplacian_eigenfunction(n, s, j):
    F = SphericalFunction(BesselLabel(n, s, j))
    rng = np.random.default_rng(7)
    for x in rng.normal(size=(4, n)):
        got = apply_operator(laplacian(n), F, x)
        assert np.max(np.abs(got + s * s * F(x))) < 1e-5
