"""Finite cover nets and global synthesis.

A :class:`CoverNet` is a finite set of group elements with known generator
words such that every group element lies within ``radius`` of one of them.
Synthesis picks the nearest net point ``K_i``, solves the chart for the
residual ``R = target K_i^{-1}`` and emits ``chart_word + net_word``, whose
replay is ``R K_i = target``.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass

import numpy as np

from .chart import SolverConfig, chart_solve, substitute_conjugations
from .completion import CompletedBasis
from .errors import CoverageNotReached, NoConvergence
from .groups import haar_sampler
from .matrix import GROUP_TOL, as_matrix, check_group, frozen, group_distance, group_inverse
from .words import GeneratorWord, replay, replay_letters

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class NetConfig:
    walk_length: int = 6
    t_max: float = 3.0
    stall_count: int = 500
    validation_samples: int = 2000
    seed: int = 0
    max_candidates: int = 1_000_000
    repair_probes: int = 20000
    strict: bool = True


@dataclass(frozen=True)
class CoverageStats:
    samples_tested: int
    max_gap_observed: float
    covered: bool
    sampler: str


@dataclass(frozen=True)
class CoverNet:
    elements: np.ndarray  # (N, d, d), read-only
    words: tuple[GeneratorWord, ...]
    radius: float
    coverage_stats: CoverageStats
    config: NetConfig

    def __len__(self) -> int:
        return len(self.words)

    @property
    def points(self) -> list[tuple[np.ndarray, GeneratorWord]]:
        return list(zip(self.elements, self.words))

    @property
    def max_word_length(self) -> int:
        return max(w.length for w in self.words)

    def gaps(self, samples: np.ndarray) -> np.ndarray:
        """Distance from each sample to its nearest net point."""
        diff = samples[:, None, :, :] - self.elements[None, :, :, :]
        return np.sqrt((np.abs(diff) ** 2).sum(axis=(2, 3))).min(axis=1)


@dataclass(frozen=True)
class SynthesisResult:
    word: GeneratorWord
    target_error: float
    net_point_index: int
    chart_word_length: int


def _random_word(rng: np.random.Generator, m: int, cfg: NetConfig) -> tuple[tuple[int, float], ...]:
    idx = rng.integers(0, m, size=cfg.walk_length)
    times = rng.uniform(-cfg.t_max, cfg.t_max, size=cfg.walk_length)
    return tuple((int(i), float(t)) for i, t in zip(idx, times))


def validate_net(net_elements: np.ndarray, basis: CompletedBasis, cfg: NetConfig, rng: np.random.Generator):
    gens = basis.generators
    sampler = haar_sampler(gens.structure, gens.dim, basis.n)
    name = "haar"
    if sampler is None:
        name = "random_walk"
        long_cfg = NetConfig(walk_length=2 * cfg.walk_length, t_max=cfg.t_max)
        sampler = lambda r: replay_letters(_random_word(r, gens.m, long_cfg), gens.elements)  # noqa: E731
    max_gap = 0.0
    for start in range(0, cfg.validation_samples, 256):
        count = min(256, cfg.validation_samples - start)
        samples = np.array([sampler(rng) for _ in range(count)])
        diff = samples[:, None, :, :] - net_elements[None, :, :, :]
        gaps = np.sqrt((np.abs(diff) ** 2).sum(axis=(2, 3))).min(axis=1)
        max_gap = max(max_gap, float(gaps.max()))
    return max_gap, name


def build_net(
    basis: CompletedBasis,
    radius: float,
    cfg: NetConfig | None = None,
    solver_cfg: SolverConfig | None = None,
) -> CoverNet:
    """Greedy randomized epsilon-net, seeded with the identity.

    Candidates are random generator words; one joins the net iff it is
    farther than ``radius`` from every current point. The walk stops after
    ``cfg.stall_count`` consecutive rejections. A repair pass then draws Haar
    probes: any probe farther than ``radius`` from the net is synthesized
    against the current net and its replayed word joins, until
    ``cfg.repair_probes`` consecutive probes land inside the cover. Fresh
    samples from an independent stream finally measure the largest gap.

    Raises
    ------
    CoverageNotReached
        If ``cfg.strict`` and the validation gap exceeds ``radius``. The net
        is attached to the exception.
    """
    cfg = cfg or NetConfig()
    solver_cfg = solver_cfg or SolverConfig()
    if not radius > 0:
        raise ValueError(f"radius must be positive, got {radius}")
    if radius > solver_cfg.chart_radius:
        log.warning("radius %.3g exceeds the chart radius %.3g; residuals may not solve", radius,
                    solver_cfg.chart_radius)
    gens = basis.generators
    walk_rng, val_rng, probe_rng = (
        np.random.default_rng(s) for s in np.random.SeedSequence(cfg.seed).spawn(3)
    )

    dtype = np.result_type(*gens.elements)
    capacity = 256
    store = np.zeros((capacity, gens.dim, gens.dim), dtype=dtype)
    store[0] = np.eye(gens.dim)
    words = [GeneratorWord((), None, 0.0)]
    size = 1
    stall = 0
    tried = 0
    while stall < cfg.stall_count and tried < cfg.max_candidates:
        tried += 1
        letters = _random_word(walk_rng, gens.m, cfg)
        K = replay_letters(letters, gens.elements)
        diff = store[:size] - K
        nearest = np.sqrt((np.abs(diff) ** 2).sum(axis=(1, 2))).min()
        if nearest > radius:
            if size == capacity:
                capacity *= 2
                store = np.concatenate([store, np.zeros_like(store)])
            store[size] = K
            words.append(GeneratorWord(letters, None, 0.0))
            size += 1
            stall = 0
        else:
            stall += 1
    repaired = 0
    sampler = haar_sampler(gens.structure, gens.dim, basis.n)
    if sampler is not None and cfg.repair_probes > 0:
        clean = 0
        while clean < cfg.repair_probes:
            probes = np.array([sampler(probe_rng) for _ in range(512)])
            diff = probes[:, None, :, :] - store[None, :size]
            gaps = np.sqrt((np.abs(diff) ** 2).sum(axis=(2, 3))).min(axis=1)
            bad = np.flatnonzero(gaps > radius)
            if bad.size == 0:
                clean += len(probes)
                continue
            clean = 0
            probe = probes[bad[0]]
            partial = CoverNet(store[:size], tuple(words), radius, CoverageStats(0, 0.0, False, ""), cfg)
            try:
                result = synthesize(probe, partial, basis, solver_cfg)
            except NoConvergence:
                continue
            K = replay(result.word, gens)
            if np.sqrt((np.abs(store[:size] - K) ** 2).sum(axis=(1, 2))).min() <= radius:
                continue
            if size == capacity:
                capacity *= 2
                store = np.concatenate([store, np.zeros_like(store)])
            store[size] = K
            words.append(GeneratorWord(result.word.letters, None, 0.0))
            size += 1
            repaired += 1
    elements = frozen(store[:size])
    max_gap, sampler = validate_net(elements, basis, cfg, val_rng)
    stats = CoverageStats(cfg.validation_samples, max_gap, max_gap <= radius, sampler)
    net = CoverNet(elements, tuple(words), float(radius), stats, cfg)
    log.info("net: %d points (%d repaired) from %d candidates, max gap %.4f", size, repaired, tried, max_gap)
    if not stats.covered and cfg.strict:
        raise CoverageNotReached(f"validation gap {max_gap:.4f} exceeds radius {radius}", net)
    return net


def synthesize(
    target,
    net: CoverNet,
    basis: CompletedBasis,
    cfg: SolverConfig | None = None,
    *,
    group_tol: float = GROUP_TOL,
) -> SynthesisResult:
    """Bounded-length word for ``target``: chart word for the residual, then the net word.

    The three net points nearest to ``target`` are tried in order.
    """
    cfg = cfg or SolverConfig()
    gens = basis.generators
    group = gens.group
    target = check_group(as_matrix(target), group, group_tol)
    diff = net.elements - target
    dists = np.sqrt((np.abs(diff) ** 2).sum(axis=(1, 2)))
    order = np.argsort(dists, kind="stable")
    bound = net.max_word_length + basis.schedule.bound
    last_error: Exception | None = None
    for idx in order[:3]:
        idx = int(idx)
        K = net.elements[idx]
        R = target @ group_inverse(K, group)
        try:
            coords = chart_solve(R, basis, cfg)
        except NoConvergence as exc:
            last_error = exc
            continue
        chart_word = substitute_conjugations(coords, basis, cfg.prune_tol)
        letters = chart_word.letters + net.words[idx].letters
        error = group_distance(replay(letters, gens), target)
        if error > cfg.final_tol_total:
            last_error = NoConvergence(f"replay error {error:.3g} above {cfg.final_tol_total:.3g}", error)
            continue
        word = GeneratorWord(letters, bound, error)
        return SynthesisResult(word, error, idx, chart_word.length)
    raise NoConvergence(f"residual solve failed for the nearest net points: {last_error}")


def net_config_dict(cfg: NetConfig) -> dict:
    return asdict(cfg)
