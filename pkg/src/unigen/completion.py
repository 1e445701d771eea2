"""Basis completion by adjoint conjugation, with word-length accounting.

Starting from generators ``X_0..X_{m-1}``, each step adds
``Ad(expm(t * X_c)) X_p`` for two already available elements. Every new
element carries a conjugation word over the *original* generators: a list of
letters ``W`` and a core generator index such that the element equals
``replay(W) @ X_core @ replay(W)^{-1}``. Because
``expm(t * Ad_W X) = W expm(t X) W^{-1}``, conjugating by an extended element
expands to ``W_c + [(core_c, t)] + W_c^{-1} + W_p`` exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import AlgebraBasis, GeneratorSet
from .errors import IndexOutOfRange, InvalidDims, StuckNoIndependentConjugate
from .matrix import RANK_TOL, adjoint_conjugate, expm, frozen, gram_rank, realify
from .words import GeneratorWord, Letter, replay


@dataclass(frozen=True)
class RkSchedule:
    values: tuple[int, ...]
    bound: int


def rk_schedule(n: int, m: int) -> RkSchedule:
    """Worst-case conjugator counts ``r_1..r_{n-m}`` and the word-length bound.

    ``r_1 = 1``, ``r_2 = 2`` and ``r_k = 2 r_{k-2} + r_{k-1} + 1``; the bound
    is ``n + 2 * sum(r)``.
    """
    n, m = int(n), int(m)
    if m < 1 or m > n:
        raise InvalidDims(f"need 1 <= m <= n, got n={n}, m={m}")
    values: list[int] = []
    for k in range(n - m):
        if k == 0:
            values.append(1)
        elif k == 1:
            values.append(2)
        else:
            values.append(2 * values[k - 2] + values[k - 1] + 1)
    return RkSchedule(tuple(values), n + 2 * sum(values))


def _default_t_grid() -> tuple[float, ...]:
    return tuple(float(t) for t in np.geomspace(0.05, 1.5, 8))


@dataclass(frozen=True)
class CompletionConfig:
    t_grid: tuple[float, ...] = field(default_factory=_default_t_grid)
    accept_score: float = 0.1
    rank_tol: float = RANK_TOL


@dataclass(frozen=True)
class ConjugationWord:
    """Conjugator letters over the original generators plus the conjugated core."""

    factors: tuple[Letter, ...]
    core_index: int

    @property
    def r(self) -> int:
        return len(self.factors)


@dataclass(frozen=True)
class ExtendedElement:
    element: np.ndarray
    word: ConjugationWord
    conjugator: int
    core: int
    t: float
    score: float


@dataclass(frozen=True)
class CompletedBasis:
    generators: GeneratorSet
    extended: tuple[ExtendedElement, ...]

    @property
    def m(self) -> int:
        return self.generators.m

    @property
    def n(self) -> int:
        return self.generators.m + len(self.extended)

    @property
    def achieved_r(self) -> tuple[int, ...]:
        return tuple(e.word.r for e in self.extended)

    @property
    def elements(self) -> tuple[np.ndarray, ...]:
        return self.generators.elements + tuple(e.element for e in self.extended)

    @property
    def schedule(self) -> RkSchedule:
        return rk_schedule(self.n, self.m)

    def conjugation_word(self, index: int) -> ConjugationWord:
        if not 0 <= index < self.n:
            raise IndexOutOfRange(f"basis index {index} outside 0..{self.n - 1}")
        if index < self.m:
            return ConjugationWord((), index)
        return self.extended[index - self.m].word


def expand_word(entry_index: int, basis: CompletedBasis) -> tuple[Letter, ...]:
    """Flattened conjugator letters of basis element ``entry_index`` (empty for generators)."""
    return basis.conjugation_word(entry_index).factors


def exp_factor_count(entry_index: int, basis: CompletedBasis) -> int:
    """Letters contributed by ``expm(t * X_entry)``: 1 for a generator, ``2r + 1`` otherwise."""
    return 2 * basis.conjugation_word(entry_index).r + 1


def conjugation_replay(word: ConjugationWord, gens: GeneratorSet) -> np.ndarray:
    W = replay(word.factors, gens)
    return adjoint_conjugate(W, gens.elements[word.core_index], gens.group)


def _compose(conj: ConjugationWord, t: float, core: ConjugationWord) -> ConjugationWord:
    inverse = tuple((i, -s) for i, s in reversed(conj.factors))
    return ConjugationWord(conj.factors + ((conj.core_index, t),) + inverse + core.factors, core.core_index)


def complete_basis(
    gens: GeneratorSet,
    algebra: AlgebraBasis | int,
    cfg: CompletionConfig | None = None,
) -> CompletedBasis:
    """Extend ``gens`` to a basis of the algebra using adjoint conjugations only.

    At step ``k`` every ordered pair (conjugator, core) of available elements
    and every ``t`` in the grid is scored by the relative norm of the
    component orthogonal to the current span; the best candidate wins, ties
    going to the smallest (conjugator, core, t). Pairs whose expanded word
    would exceed ``r_k`` are skipped: the cheaper orientation of any pair
    always fits, and both orientations share the same first-order term.
    """
    cfg = cfg or CompletionConfig()
    n = algebra.dim_algebra if isinstance(algebra, AlgebraBasis) else int(algebra)
    m = gens.m
    schedule = rk_schedule(n, m)
    group = gens.group

    elements = [np.asarray(e) for e in gens.elements]
    words = [ConjugationWord((), i) for i in range(m)]
    _, span = gram_rank(elements, cfg.rank_tol)
    Q = np.array([realify(s) for s in span])
    extended: list[ExtendedElement] = []

    for k in range(n - m):
        budget = schedule.values[k]
        best = None  # (score, conj, core, t, element)
        exps = {}
        for core in range(len(elements)):
            for conj in range(len(elements)):
                if conj == core:
                    continue
                cost = 2 * words[conj].r + 1 + words[core].r
                if cost > budget:
                    continue
                for t in cfg.t_grid:
                    key = (conj, t)
                    if key not in exps:
                        exps[key] = expm(t * elements[conj])
                    cand = adjoint_conjugate(exps[key], elements[core], group)
                    v = realify(cand)
                    resid = v - Q.T @ (Q @ v)
                    score = float(np.linalg.norm(resid) / np.linalg.norm(v))
                    if best is None or score > best[0] or (
                        score == best[0] and (conj, core, t) < (best[1], best[2], best[3])
                    ):
                        best = (score, conj, core, t, cand)
        if best is None or best[0] < cfg.accept_score:
            found = 0.0 if best is None else best[0]
            raise StuckNoIndependentConjugate(
                f"step {k + 1}: best independence score {found:.3g} below {cfg.accept_score}", found
            )
        score, conj, core, t, cand = best
        if gens.is_real:
            cand = cand.real
        word = _compose(words[conj], t, words[core])
        elements.append(cand)
        words.append(word)
        extended.append(ExtendedElement(frozen(cand), word, conj, core, float(t), score))
        v = realify(cand)
        for _pass in range(2):
            v = v - Q.T @ (Q @ v)
        Q = np.vstack([Q, v / np.linalg.norm(v)])

    rank, _ = gram_rank(elements, cfg.rank_tol)
    if rank != n:
        raise StuckNoIndependentConjugate(f"completed set has rank {rank}, expected {n}")
    return CompletedBasis(gens, tuple(extended))
