import math
import time

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from unigen.algebra import bracket_closure
from unigen.completion import (
    CompletedBasis,
    ConjugationWord,
    ExtendedElement,
    complete_basis,
    conjugation_replay,
    exp_factor_count,
    expand_word,
    rk_schedule,
)
from unigen.errors import IndexOutOfRange, InvalidDims, StuckNoIndependentConjugate
from unigen.groups import DEMOS, random_generic_pair, so3_basis, su2_basis
from unigen.matrix import adjoint_conjugate, expm, gram_rank
from unigen.algebra import GeneratorSet


def brute_schedule(n, m):
    r = {}
    for k in range(1, n - m + 1):
        r[k] = 1 if k == 1 else 2 if k == 2 else 2 * r[k - 2] + r[k - 1] + 1
    return [r[k] for k in range(1, n - m + 1)]


class TestSchedule:
    def test_examples(self):
        assert rk_schedule(3, 2).values == (1,) and rk_schedule(3, 2).bound == 5
        assert rk_schedule(3, 3).values == () and rk_schedule(3, 3).bound == 3
        s = rk_schedule(8, 2)
        assert s.values == (1, 2, 5, 10, 21, 42) and s.bound == 170

    def test_recursion_to_20(self):
        v = rk_schedule(22, 2).values
        assert v[0] == 1 and v[1] == 2
        for k in range(2, 20):
            assert v[k] == 2 * v[k - 2] + v[k - 1] + 1

    @given(st.integers(1, 30), st.integers(1, 30))
    def test_matches_brute(self, a, b):
        n, m = max(a, b), min(a, b)
        s = rk_schedule(n, m)
        assert list(s.values) == brute_schedule(n, m)
        assert s.bound == n + 2 * sum(s.values)

    @given(st.integers(1, 25), st.integers(1, 25))
    def test_monotone(self, n, m):
        if m > n:
            n, m = m, n
        assert rk_schedule(n + 1, m).bound > rk_schedule(n, m).bound
        if m < n:
            assert rk_schedule(n, m + 1).bound <= rk_schedule(n, m).bound

    @pytest.mark.parametrize("n,m", [(2, 3), (3, 0)])
    def test_invalid(self, n, m):
        with pytest.raises(InvalidDims):
            rk_schedule(n, m)


def _all_bases():
    out = {}
    for name, make in DEMOS.items():
        gens = make()
        out[name] = complete_basis(gens, bracket_closure(gens))
    so4 = GeneratorSet.from_matrices(
        [np.array([[0, -1, 0, 0], [1, 0, -2, 0], [0, 2, 0, -3], [0, 0, 3, 0]], float) / 4,
         np.array([[0, 0, 1, 0], [0, 0, 0, -1], [-1, 0, 0, 0.5], [0, 1, -0.5, 0]], float) / 2]
    )
    out["so4"] = complete_basis(so4, bracket_closure(so4))
    for seed in (1, 2):
        for structure, n in (("skew_hermitian", 3), ("real_antisymmetric", 4)):
            gens = random_generic_pair(structure, n, np.random.default_rng(seed))
            out[f"{structure}{n}-{seed}"] = complete_basis(gens, bracket_closure(gens))
    return out


@pytest.fixture(scope="module")
def bases():
    return _all_bases()


class TestCompleteBasis:
    def test_su2_example(self):
        e = su2_basis()
        gens = GeneratorSet.from_matrices([e[0], e[1]])
        basis = complete_basis(gens, 3)
        assert basis.achieved_r == (1,)
        X = basis.extended[0].element
        assert abs(np.real(np.vdot(e[2], X))) > 0.05
        # oracle: Ad(expm(0.5 e1)) e2 = cos(0.5) e2 + sin(0.5) e3
        np.testing.assert_allclose(adjoint_conjugate(expm(0.5 * e[0]), e[1]),
                                   math.cos(0.5) * e[1] + math.sin(0.5) * e[2], atol=1e-12)

    def test_already_basis(self):
        gens = GeneratorSet.from_matrices(list(su2_basis()))
        basis = complete_basis(gens, 3)
        assert basis.extended == () and basis.achieved_r == ()

    def test_so3(self):
        Lx, Ly, Lz = so3_basis()
        basis = complete_basis(GeneratorSet.from_matrices([Lx, Ly]), 3)
        assert basis.n == 3 and basis.achieved_r == (1,)
        assert basis.extended[0].element.dtype == np.float64

    def test_properties(self, bases):
        for name, basis in bases.items():
            gens = basis.generators
            assert gram_rank(list(basis.elements))[0] == basis.n, name
            sched = rk_schedule(basis.n, basis.m)
            assert all(a <= r for a, r in zip(basis.achieved_r, sched.values)), name
            for i in range(basis.m, basis.n):
                word = basis.conjugation_word(i)
                assert np.linalg.norm(conjugation_replay(word, gens) - basis.elements[i]) <= 1e-9, name
            total = sum(exp_factor_count(i, basis) for i in range(basis.n))
            assert total <= sched.bound, name

    def test_deterministic(self):
        gens = DEMOS["su3_gellmann_pair"]()
        a = complete_basis(gens, 8)
        b = complete_basis(gens, 8)
        assert a.achieved_r == b.achieved_r
        for x, y in zip(a.extended, b.extended):
            assert x.word == y.word
            assert np.array_equal(x.element, y.element)

    def test_stuck(self):
        gens = DEMOS["su2_pauli_pair"]()
        from unigen.completion import CompletionConfig
        with pytest.raises(StuckNoIndependentConjugate) as info:
            complete_basis(gens, 3, CompletionConfig(t_grid=(1e-4,)))
        assert info.value.best_score < 0.1

    def test_timing(self):
        start = time.perf_counter()
        _all_bases()
        assert time.perf_counter() - start < 5.0


class TestWords:
    def test_first_step(self):
        e = su2_basis()
        gens = GeneratorSet.from_matrices([e[0], e[1]])
        X = adjoint_conjugate(expm(0.5 * e[0]), e[1])
        basis = CompletedBasis(gens, (ExtendedElement(X, ConjugationWord(((0, 0.5),), 1), 0, 1, 0.5, 1.0),))
        assert expand_word(2, basis) == ((0, 0.5),)
        assert expand_word(0, basis) == ()
        assert exp_factor_count(0, basis) == 1
        assert exp_factor_count(2, basis) == 3

    def test_nested(self):
        """X_{m+2} = Ad(expm(s X_0)) X_{m+1} expands to length 2."""
        Lx, Ly, Lz = so3_basis()
        gens = GeneratorSet.from_matrices([Lx, Ly])
        X2 = adjoint_conjugate(expm(0.4 * Lx), Ly)
        X3 = adjoint_conjugate(expm(0.3 * Ly), X2)
        w2 = ConjugationWord(((0, 0.4),), 1)
        w3 = ConjugationWord(((1, 0.3),) + w2.factors, 1)
        basis = CompletedBasis(gens, (ExtendedElement(X2, w2, 0, 1, 0.4, 1.0), ExtendedElement(X3, w3, 1, 2, 0.3, 1.0)))
        assert len(expand_word(3, basis)) == 2 == rk_schedule(4, 2).values[1]
        np.testing.assert_allclose(conjugation_replay(w3, gens), X3, atol=1e-12)

    def test_factor_count_r5(self):
        gens = GeneratorSet.from_matrices(list(so3_basis())[:2])
        word = ConjugationWord(tuple((0, 0.1) for _ in range(5)), 1)
        basis = CompletedBasis(gens, (ExtendedElement(np.zeros((3, 3)), word, 0, 1, 0.1, 0.0),))
        assert exp_factor_count(2, basis) == 11

    def test_out_of_range(self, bases):
        basis = bases["su2_pauli_pair"]
        with pytest.raises(IndexOutOfRange):
            expand_word(3, basis)
        with pytest.raises(IndexOutOfRange):
            exp_factor_count(-1, basis)
