"""Coordinates of the second kind near the identity.

``chart_forward`` maps times ``t`` to ``expm(t_0 X_0) ... expm(t_{n-1} X_{n-1})``
over a completed basis; ``chart_solve`` inverts it by Newton iteration on the
right residual ``log(target F(t)^{-1})``; ``substitute_conjugations`` rewrites
the result as a word over the original generators.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .algebra import coordinates
from .completion import CompletedBasis, exp_factor_count, expand_word
from .errors import DimMismatch, NoConvergence
from .matrix import adjoint_conjugate, as_matrix, expm, gram_rank, group_distance, group_inverse, logm_principal
from .words import GeneratorWord, replay


@dataclass(frozen=True)
class SolverConfig:
    chart_radius: float = 0.5
    max_iters: int = 50
    final_tol: float = 1e-10
    prune_tol: float = 1e-12
    cond_limit: float = 1e8
    max_halvings: int = 30
    final_tol_total: float = 1e-8


@dataclass(frozen=True)
class ChartCoordinates:
    times: tuple[float, ...]
    residual: float
    iterations: int = 0


def _times(times) -> np.ndarray:
    if isinstance(times, ChartCoordinates):
        times = times.times
    return np.asarray(times, dtype=float)


def chart_forward(times, basis: CompletedBasis) -> np.ndarray:
    t = _times(times)
    elements = basis.elements
    if t.shape != (len(elements),):
        raise DimMismatch(f"expected {len(elements)} chart times, got {t.shape}")
    out = np.eye(basis.generators.dim, dtype=elements[0].dtype)
    for ti, X in zip(t, elements):
        out = out @ expm(ti * X)
    return out


def chart_jacobian(times, basis: CompletedBasis, orthonormal: Sequence[np.ndarray] | None = None) -> np.ndarray:
    """Right-trivialised Jacobian: column ``j`` holds coordinates of ``Ad_{P_j} X_j``.

    ``P_j`` is the product of the first ``j`` chart factors, so
    ``dF/dt_j = Ad_{P_j}(X_j) F``.
    """
    t = _times(times)
    if orthonormal is None:
        _, orthonormal = gram_rank(basis.elements)
    group = basis.generators.group
    elements = basis.elements
    prefix = np.eye(basis.generators.dim, dtype=elements[0].dtype)
    cols = []
    for ti, X in zip(t, elements):
        cols.append(coordinates(adjoint_conjugate(prefix, X, group), orthonormal))
        prefix = prefix @ expm(ti * X)
    return np.array(cols).T


def chart_solve(target, basis: CompletedBasis, cfg: SolverConfig | None = None) -> ChartCoordinates:
    """Newton inversion of the chart map.

    Each step solves ``J dt = c`` where ``c`` holds the coordinates of
    ``log(target F(t)^{-1})``; the step is halved until the Frobenius
    residual decreases.

    Raises
    ------
    NoConvergence
        Target outside ``cfg.chart_radius``, ill-conditioned Jacobian, or no
        convergence within ``cfg.max_iters``.
    """
    cfg = cfg or SolverConfig()
    target = as_matrix(target)
    group = basis.generators.group
    dist0 = group_distance(target, np.eye(target.shape[0]))
    if dist0 > cfg.chart_radius:
        raise NoConvergence(f"target at distance {dist0:.3g} outside chart radius {cfg.chart_radius}", dist0)
    _, orthonormal = gram_rank(basis.elements)
    n = basis.n
    t = np.zeros(n)
    F = np.eye(target.shape[0])
    res = dist0
    for it in range(cfg.max_iters + 1):
        if res <= cfg.final_tol:
            return ChartCoordinates(tuple(float(x) for x in t), res, it)
        if it == cfg.max_iters:
            break
        E = logm_principal(target @ group_inverse(F, group), group, group_tol=1e-6)
        c = coordinates(E, orthonormal)
        J = chart_jacobian(t, basis, orthonormal)
        cond = float(np.linalg.cond(J))
        if not np.isfinite(cond) or cond > cfg.cond_limit:
            raise NoConvergence(f"chart Jacobian condition {cond:.3g} exceeds {cfg.cond_limit:.3g}", res, cond)
        delta = np.linalg.solve(J, c)
        step = 1.0
        for _ in range(cfg.max_halvings):
            t_new = t + step * delta
            F_new = chart_forward(t_new, basis)
            res_new = group_distance(F_new, target)
            if res_new < res:
                break
            step *= 0.5
        else:
            raise NoConvergence(f"line search stalled at residual {res:.3g}", res, cond)
        t, F, res = t_new, F_new, res_new
    raise NoConvergence(f"no convergence after {cfg.max_iters} iterations (residual {res:.3g})", res)


def substitute_conjugations(times, basis: CompletedBasis, prune_tol: float = 1e-12) -> GeneratorWord:
    """Rewrite chart coordinates as a word over the original generators.

    Factor ``i < m`` becomes one letter; factor ``i >= m`` becomes
    ``W_i + [(core_i, t_i)] + W_i^{-1}``. Factors with ``|t_i| < prune_tol``
    are dropped whole, conjugators included.
    """
    t = _times(times)
    letters: list[tuple[int, float]] = []
    for i, ti in enumerate(t):
        if abs(ti) < prune_tol:
            continue
        if i < basis.m:
            letters.append((i, float(ti)))
            continue
        W = expand_word(i, basis)
        core = basis.conjugation_word(i).core_index
        letters.extend(W)
        letters.append((core, float(ti)))
        letters.extend((j, -s) for j, s in reversed(W))
    error = group_distance(replay(letters, basis.generators), chart_forward(t, basis))
    return GeneratorWord(tuple(letters), basis.schedule.bound, error)


def chart_word_bound(basis: CompletedBasis) -> int:
    """Sum of per-factor letter counts; never exceeds the schedule bound."""
    return sum(exp_factor_count(i, basis) for i in range(basis.n))
