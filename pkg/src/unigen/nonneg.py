"""Nonnegative-time words via recurrence of one-parameter subgroups.

In a compact group ``s -> expm(s X)`` keeps returning close to any point it
has passed, so a reverse factor ``expm(-|t| X)`` can be replaced by a forward
factor ``expm(s X)`` with ``s >= 0``. For a normal ``X`` with eigenvalues
``i theta_j`` the error only depends on the phases ``theta_j (s - t)``.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce

import numpy as np

from .chart import SolverConfig
from .completion import CompletedBasis
from .errors import BudgetExhausted
from .matrix import as_matrix, expm, group_distance
from .synthesis import CoverNet, synthesize
from .words import GeneratorWord, replay

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class RecurrenceConfig:
    commensurate_tol: float = 1e-9
    max_denominator: int = 1000
    t_max: float | None = None  # None: 1e4 * 2*pi / ||X||_2
    max_evals: int = 1_000_000
    refine_iters: int = 60


@dataclass(frozen=True)
class ReverseApprox:
    t_pos: float
    achieved_error: float
    search_budget_used: int
    method: str = "identity"


@dataclass(frozen=True)
class NonnegWord:
    letters: tuple[tuple[int, float], ...]
    lift_error: float
    original_length: int
    lifted_count: int = 0
    base_error: float = 0.0

    @property
    def length(self) -> int:
        return len(self.letters)

    def as_word(self) -> GeneratorWord:
        return GeneratorWord(self.letters, None, self.base_error + self.lift_error)


def _phases(X: np.ndarray) -> np.ndarray:
    ev = np.linalg.eigvals(X)
    if np.max(np.abs(ev.real)) > 1e-8 * max(1.0, np.max(np.abs(ev))):
        raise ValueError("reverse-time approximation needs an element with imaginary spectrum")
    return ev.imag


def _commensurate_period(theta: np.ndarray, cfg: RecurrenceConfig) -> float | None:
    nz = np.abs(theta[np.abs(theta) > 1e-12])
    if nz.size == 0:
        return None
    ref = float(nz.min())
    denoms = []
    for th in theta:
        ratio = float(th) / ref
        frac = Fraction(ratio).limit_denominator(cfg.max_denominator)
        if abs(ratio - float(frac)) > cfg.commensurate_tol:
            return None
        denoms.append(frac.denominator)
    k = reduce(lambda a, b: a * b // math.gcd(a, b), denoms, 1)
    return 2.0 * math.pi * k / ref


def _distance(theta: np.ndarray, s, t: float) -> np.ndarray:
    s = np.atleast_1d(np.asarray(s, dtype=float))
    diff = np.exp(1j * np.outer(s, theta)) - np.exp(1j * theta * t)
    return np.sqrt((np.abs(diff) ** 2).sum(axis=1))


def _golden(f, a: float, b: float, iters: int) -> tuple[float, float, int]:
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    return (c, fc, iters + 2) if fc < fd else (d, fd, iters + 2)


def reverse_time_approx(X, t: float, tol: float, cfg: RecurrenceConfig | None = None) -> ReverseApprox:
    """Find ``t_pos >= 0`` with ``||expm(t_pos X) - expm(t X)||_F <= tol``.

    Commensurate spectra get the exact period ``T`` and ``t_pos = t mod T``.
    Otherwise candidate return times ``u = s - t`` are anchored at the periods
    of the fastest eigenphase, corrected by a least-squares phase shift, and
    the best cell is polished by golden-section search.

    Raises
    ------
    BudgetExhausted
        No candidate within ``cfg.t_max`` and ``cfg.max_evals`` meets ``tol``.
    """
    cfg = cfg or RecurrenceConfig()
    t = float(t)
    if t >= 0:
        return ReverseApprox(t, 0.0, 0, "identity")
    X = as_matrix(X)
    theta = _phases(X)
    norm2 = float(np.max(np.abs(theta)))
    if norm2 == 0.0:
        return ReverseApprox(0.0, float(group_distance(np.eye(X.shape[0]), expm(t * X))), 0, "zero")
    target = expm(t * X)

    period = _commensurate_period(theta, cfg)
    if period is not None:
        t_pos = t % period
        if t_pos >= period:
            t_pos = 0.0
        err = group_distance(expm(t_pos * X), target)
        if err <= tol:
            return ReverseApprox(float(t_pos), err, 1, "period")

    t_max = cfg.t_max if cfg.t_max is not None else 1e4 * 2.0 * math.pi / norm2
    step = 2.0 * math.pi / norm2
    k_lo = max(1, int(math.ceil(-t / step)))
    k_hi = min(int((t_max - t) / step), k_lo + cfg.max_evals)
    evals = 0
    best_s, best_d = math.nan, math.inf
    chunk = 100_000
    for start in range(k_lo, k_hi + 1, chunk):
        k = np.arange(start, min(start + chunk, k_hi + 1), dtype=float)
        u = k * step
        phase = np.angle(np.exp(1j * np.outer(u, theta)))
        u = u - (phase @ theta) / (theta @ theta)
        s = u + t
        s = s[(s >= 0) & (s <= t_max)]
        if s.size == 0:
            continue
        d = _distance(theta, s, t)
        evals += s.size
        hit = np.flatnonzero(d <= 0.5 * tol)
        i = int(hit[0]) if hit.size else int(np.argmin(d))
        if d[i] < best_d:
            best_s, best_d = float(s[i]), float(d[i])
        if hit.size:
            break
        if evals >= cfg.max_evals:
            break

    if math.isfinite(best_s) and best_d > 0.5 * tol:
        width = 0.5 * step / max(1.0, norm2 / float(np.min(np.abs(theta[np.abs(theta) > 0]))))
        a, b = max(0.0, best_s - width), best_s + width
        s_ref, d_ref, used = _golden(lambda v: float(_distance(theta, v, t)[0]), a, b, cfg.refine_iters)
        evals += used
        if d_ref < best_d:
            best_s, best_d = s_ref, d_ref

    if not math.isfinite(best_s):
        raise BudgetExhausted("no admissible return time within the search window", best_error=math.inf)
    err = group_distance(expm(best_s * X), target)
    if err > tol:
        raise BudgetExhausted(
            f"best forward time {best_s:.6g} reaches error {err:.3g} > {tol:.3g} after {evals} evaluations",
            best_s,
            err,
        )
    return ReverseApprox(best_s, err, evals, "search")


class ReverseCache:
    """Memo of reverse approximations keyed by (generator index, time, tol).

    Reads are lock-free; inserts take a single writer lock.
    """

    def __init__(self):
        self._table: dict[tuple[int, float, float], ReverseApprox] = {}
        self._lock = threading.Lock()

    def get(self, key):
        return self._table.get(key)

    def put(self, key, value: ReverseApprox) -> None:
        with self._lock:
            self._table.setdefault(key, value)

    def __len__(self) -> int:
        return len(self._table)


def lift_word_nonneg(
    word: GeneratorWord,
    gens,
    per_factor_tol: float = 1e-8,
    cfg: RecurrenceConfig | None = None,
    cache: ReverseCache | None = None,
) -> NonnegWord:
    """Replace every negative-time letter with a nonnegative one.

    Letter count is unchanged. For products of unitaries
    ``||prod A_i - prod B_i|| <= sum ||A_i - B_i||``, so ``lift_error`` is
    the sum of per-letter errors.
    """
    cfg = cfg or RecurrenceConfig()
    letters = word.letters if isinstance(word, GeneratorWord) else tuple(word)
    elements = gens.elements if hasattr(gens, "elements") else gens
    out = []
    total = 0.0
    lifted = 0
    for pos, (i, t) in enumerate(letters):
        if t >= 0:
            out.append((i, t))
            continue
        key = (i, t, per_factor_tol)
        approx = cache.get(key) if cache is not None else None
        if approx is None:
            try:
                approx = reverse_time_approx(elements[i], t, per_factor_tol, cfg)
            except BudgetExhausted as exc:
                exc.letter = (pos, i, t)
                raise
            if cache is not None:
                cache.put(key, approx)
        out.append((i, max(0.0, approx.t_pos)))
        total += approx.achieved_error
        lifted += 1
    base = word.product_error if isinstance(word, GeneratorWord) else 0.0
    return NonnegWord(tuple(out), total, len(letters), lifted, base)


def nonneg_synthesize(
    target,
    net: CoverNet,
    basis: CompletedBasis,
    solver_cfg: SolverConfig | None = None,
    per_factor_tol: float = 1e-8,
    rec_cfg: RecurrenceConfig | None = None,
    cache: ReverseCache | None = None,
) -> NonnegWord:
    """Synthesize ``target`` and lift the word to nonnegative times."""
    result = synthesize(target, net, basis, solver_cfg)
    lifted = lift_word_nonneg(result.word, basis.generators, per_factor_tol, rec_cfg, cache)
    return NonnegWord(lifted.letters, lifted.lift_error, lifted.original_length, lifted.lifted_count, result.target_error)


def nonneg_replay_error(word: NonnegWord, gens, target) -> float:
    return group_distance(replay(word.letters, gens), as_matrix(target))
