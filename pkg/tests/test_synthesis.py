import numpy as np
import pytest

from unigen.errors import CoverageNotReached, IndexOutOfRange, NoConvergence
from unigen.groups import haar_special_unitary
from unigen.matrix import expm, group_distance
from unigen.synthesis import NetConfig, build_net, synthesize
from unigen.words import GeneratorWord, replay

SMALL = NetConfig(stall_count=100, repair_probes=2000, validation_samples=500, seed=3)


@pytest.fixture(scope="module")
def haar_targets():
    rng = np.random.default_rng(2024)
    return [haar_special_unitary(2, rng) for _ in range(100)]


class TestReplay:
    def test_empty_word(self, generic_su2):
        np.testing.assert_array_equal(replay(GeneratorWord((), None, 0.0), generic_su2.generators), np.eye(2))

    def test_same_generator_adds(self, generic_su2):
        X = generic_su2.generators.elements[0]
        K = replay([(0, 0.3), (0, -0.8)], generic_su2.generators)
        np.testing.assert_allclose(K, expm(-0.5 * X), atol=1e-14)

    def test_left_to_right(self, generic_su2):
        X, Y = generic_su2.generators.elements
        K = replay([(0, 0.4), (1, 0.7)], generic_su2.generators)
        np.testing.assert_allclose(K, expm(0.4 * X) @ expm(0.7 * Y), atol=1e-14)

    def test_index_out_of_range(self, generic_su2):
        with pytest.raises(IndexOutOfRange):
            replay([(2, 0.1)], generic_su2.generators)


class TestNet:
    def test_identity_seeded(self, generic_su2_net):
        np.testing.assert_array_equal(generic_su2_net.elements[0], np.eye(2))
        assert generic_su2_net.words[0].length == 0

    def test_pairwise_separation(self, generic_su2_net):
        E = generic_su2_net.elements
        for k in range(len(E)):
            d = np.sqrt((np.abs(E[k + 1:] - E[k]) ** 2).sum(axis=(1, 2)))
            assert np.all(d > generic_su2_net.radius)

    def test_words_replay_to_points(self, generic_su2, generic_su2_net):
        for K, w in generic_su2_net.points[::25]:
            assert group_distance(replay(w, generic_su2.generators), K) <= 1e-12

    def test_validated(self, generic_su2_net):
        stats = generic_su2_net.coverage_stats
        assert stats.covered and stats.samples_tested >= 2000 and stats.sampler == "haar"
        assert stats.max_gap_observed <= 0.4

    def test_fresh_coverage(self, generic_su2_net):
        rng = np.random.default_rng(99)
        samples = np.array([haar_special_unitary(2, rng) for _ in range(2000)])
        assert generic_su2_net.gaps(samples).max() <= generic_su2_net.radius

    def test_elements_read_only(self, generic_su2_net):
        with pytest.raises(ValueError):
            generic_su2_net.elements[0, 0, 0] = 2.0

    def test_seeded_determinism(self, generic_su2):
        a = build_net(generic_su2, 0.45, SMALL)
        b = build_net(generic_su2, 0.45, SMALL)
        np.testing.assert_array_equal(a.elements, b.elements)
        assert a.words == b.words

    def test_radius_above_diameter(self, generic_su2):
        net = build_net(generic_su2, 10.0, SMALL)
        assert len(net) == 1 and net.max_word_length == 0

    def test_nonpositive_radius(self, generic_su2):
        with pytest.raises(ValueError):
            build_net(generic_su2, 0.0)

    def test_strict_coverage_failure(self, generic_su2):
        cfg = NetConfig(stall_count=1, repair_probes=0, validation_samples=200, max_candidates=3)
        with pytest.raises(CoverageNotReached) as info:
            build_net(generic_su2, 0.2, cfg)
        assert info.value.net is not None and not info.value.net.coverage_stats.covered

    def test_non_strict_returns_net(self, generic_su2):
        cfg = NetConfig(stall_count=1, repair_probes=0, validation_samples=200, max_candidates=3, strict=False)
        net = build_net(generic_su2, 0.2, cfg)
        assert not net.coverage_stats.covered


class TestSynthesize:
    def test_net_point_exact(self, generic_su2, generic_su2_net):
        K = generic_su2_net.elements[17]
        res = synthesize(K, generic_su2_net, generic_su2)
        assert res.net_point_index == 17 and res.chart_word_length == 0
        assert res.target_error <= 1e-12

    def test_near_identity(self, generic_su2, generic_su2_net):
        X = generic_su2.generators.elements[0]
        res = synthesize(expm(0.1 * X), generic_su2_net, generic_su2)
        assert res.target_error <= 1e-9

    def test_haar_targets(self, generic_su2, generic_su2_net, haar_targets):
        bound = generic_su2_net.max_word_length + generic_su2.schedule.bound
        for U in haar_targets:
            res = synthesize(U, generic_su2_net, generic_su2)
            assert res.target_error <= 1e-6
            assert group_distance(replay(res.word, generic_su2.generators), U) <= 1e-6
            assert res.word.length <= bound == res.word.bound_used
            assert res.chart_word_length <= generic_su2.schedule.bound

    def test_composition_soundness(self, generic_su2, generic_su2_net, haar_targets):
        gens = generic_su2.generators
        for U in haar_targets[:10]:
            res = synthesize(U, generic_su2_net, generic_su2)
            chart = res.word.letters[:res.chart_word_length]
            net_word = res.word.letters[res.chart_word_length:]
            assert net_word == generic_su2_net.words[res.net_point_index].letters
            whole = replay(res.word, gens)
            split = replay(chart, gens) @ generic_su2_net.elements[res.net_point_index]
            assert group_distance(whole, split) <= 1e-9

    def test_rejects_non_group_target(self, generic_su2, generic_su2_net):
        from unigen.errors import NotInGroup
        with pytest.raises(NotInGroup):
            synthesize(2.0 * np.eye(2), generic_su2_net, generic_su2)

    def test_unreachable_tolerance(self, generic_su2, generic_su2_net, haar_targets):
        from unigen.chart import SolverConfig
        with pytest.raises(NoConvergence):
            synthesize(haar_targets[0], generic_su2_net, generic_su2, SolverConfig(final_tol_total=1e-30))
