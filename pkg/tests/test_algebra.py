import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from .conftest import random_skew_hermitian
from unigen.algebra import GeneratorSet, bracket, bracket_closure, in_span, is_generating
from unigen.errors import DepthExceeded, EmptyInput, InvalidDims, NotInAlgebra
from unigen.groups import DEMOS, DEMO_ALGEBRA_DIMS, random_generic_pair, so_basis, su_basis
from unigen.matrix import adjoint_conjugate, expm

DIAG_PAIR = [1j * np.diag([1.0, -1.0, 0.0]), 1j * np.diag([0.0, 1.0, -1.0])]


class TestBracket:
    def test_self_bracket(self, e):
        np.testing.assert_array_equal(bracket(e[0], e[0]), np.zeros((2, 2)))

    def test_su2_relation(self, e):
        np.testing.assert_allclose(bracket(e[0], e[1]), e[2], atol=1e-15)

    def test_antisymmetry(self, rng):
        X, Y = random_skew_hermitian(rng, 3), random_skew_hermitian(rng, 3)
        np.testing.assert_allclose(bracket(X, Y) + bracket(Y, X), 0, atol=1e-15)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(2, 5))
    def test_jacobi(self, seed, n):
        rng = np.random.default_rng(seed)
        X, Y, Z = (random_skew_hermitian(rng, n, rng.uniform(0.1, 3)) for _ in range(3))
        jac = bracket(X, bracket(Y, Z)) + bracket(Y, bracket(Z, X)) + bracket(Z, bracket(X, Y))
        scale = np.linalg.norm(X) * np.linalg.norm(Y) * np.linalg.norm(Z)
        assert np.linalg.norm(jac) <= 1e-10 * scale

    def test_preserves_skew_hermitian(self, rng):
        X, Y = random_skew_hermitian(rng, 4), random_skew_hermitian(rng, 4)
        B = bracket(X, Y)
        assert np.linalg.norm(B + B.conj().T) <= 1e-14


class TestGeneratorSet:
    def test_rejects_dependent(self, e):
        with pytest.raises(InvalidDims):
            GeneratorSet.from_matrices([e[0], 2 * e[0]])

    def test_rejects_zero(self):
        with pytest.raises(InvalidDims):
            GeneratorSet.from_matrices([np.zeros((2, 2), dtype=complex)], structure="skew_hermitian")

    def test_rejects_wrong_structure(self):
        with pytest.raises(NotInAlgebra):
            GeneratorSet.from_matrices([np.eye(2)], structure="skew_hermitian")

    def test_detects_structure(self, e):
        assert GeneratorSet.from_matrices([e[0], e[1]]).structure.value == "skew_hermitian"
        assert GeneratorSet.from_matrices(so_basis(3)[:2]).structure.value == "real_antisymmetric"


class TestClosure:
    def test_su2_pair(self, e):
        assert bracket_closure([e[0], e[1]]).dim_algebra == 3

    def test_single(self, e):
        assert bracket_closure([e[2]]).dim_algebra == 1

    def test_commuting_diagonal(self):
        assert bracket_closure(DIAG_PAIR).dim_algebra == 2

    def test_demos(self):
        for name, make in DEMOS.items():
            assert bracket_closure(make()).dim_algebra == DEMO_ALGEBRA_DIMS[name]

    def test_orthonormal(self):
        basis = bracket_closure(DEMOS["su3_gellmann_pair"]())
        V = np.array([np.concatenate([b.real.ravel(), b.imag.ravel()]) for b in basis.elements])
        np.testing.assert_allclose(V @ V.T, np.eye(8), atol=1e-12)

    def test_depth_exceeded(self):
        gens = DEMOS["su3_gellmann_pair"]()
        with pytest.raises(DepthExceeded):
            bracket_closure(gens, max_depth=1)

    @pytest.mark.parametrize("seed", range(4))
    def test_invariant_under_recombination(self, seed):
        rng = np.random.default_rng(seed)
        gens = random_generic_pair("skew_hermitian", 3, rng)
        while True:
            M = rng.normal(size=(2, 2))
            if np.linalg.cond(M) <= 1e3:
                break
        mixed = [M[i, 0] * gens.elements[0] + M[i, 1] * gens.elements[1] for i in range(2)]
        assert bracket_closure(mixed).dim_algebra == bracket_closure(gens).dim_algebra == 8

    def test_idempotent(self):
        first = bracket_closure(DEMOS["so3_rotations"]())
        assert bracket_closure(first.elements).dim_algebra == first.dim_algebra

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_dimension_caps(self, n):
        assert bracket_closure(su_basis(n)).dim_algebra == n * n - 1
        assert bracket_closure(so_basis(n)).dim_algebra == n * (n - 1) // 2


class TestIsGenerating:
    def test_examples(self, e):
        assert is_generating([e[0], e[1]], 3)
        assert not is_generating(DIAG_PAIR, 8)
        assert is_generating(list(e), 3)

    def test_against_basis(self, e):
        assert is_generating([e[0], e[1]], bracket_closure(list(e)))


class TestInSpan:
    def test_inside(self, e):
        inside, coef, res = in_span(e[0] + e[1], list(e))
        assert inside
        np.testing.assert_allclose(coef, [1, 1, 0], atol=1e-14)
        assert res <= 1e-15

    def test_orthogonal(self, e):
        inside, _, res = in_span(e[2], [e[0], e[1]])
        assert not inside
        assert res == pytest.approx(np.linalg.norm(e[2]))

    def test_rotated(self, e):
        X = adjoint_conjugate(expm(0.3 * e[2]), e[0])
        assert not in_span(X, [e[0]])[0]

    def test_real_coefficients(self, e):
        # i * e1 is not a real multiple of e1
        assert not in_span(1j * e[0], [e[0]])[0]

    def test_empty(self, e):
        with pytest.raises(EmptyInput):
            in_span(e[0], [])
