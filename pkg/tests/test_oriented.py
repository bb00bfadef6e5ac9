import math

import numpy as np
import pytest

from stickperc.errors import DomainError
from stickperc.oriented import (
    Frontier,
    bond_beta,
    coupled_survival_matrix,
    coupled_survival_monotonicity,
    coupled_variant_step,
    op_step,
    survival_probability,
)
from stickperc.rng import substream


class TestFrontier:
    def test_parity_enforced(self):
        with pytest.raises(DomainError):
            Frontier(1, np.array([0]))
        Frontier(1, np.array([-1, 1]))

    def test_deduplication_and_sorting(self):
        f = Frontier(0, np.array([4, -2, 4, 0]))
        assert f.occupied.tolist() == [-2, 0, 4]


class TestOpStep:
    def test_empty_absorbing(self):
        empty = Frontier(2, np.empty(0, dtype=np.int64))
        out = op_step(empty, 0.9, "bond", substream(0))
        assert not out.alive and out.level == 3

    def test_alpha_one_full_cone(self):
        frontier = Frontier.origin()
        rng = substream(1)
        for n in range(1, 30):
            frontier = op_step(frontier, 1.0, "bond", rng)
            assert frontier.occupied.tolist() == list(range(-n, n + 1, 2))

    def test_support_bound(self):
        rng = substream(2)
        for variant in ("bond", "site"):
            frontier = Frontier.origin()
            for _ in range(80):
                frontier = op_step(frontier, 0.85, variant, rng)
                if not frontier.alive:
                    break
                assert frontier.occupied.min() >= -frontier.level
                assert frontier.occupied.max() <= frontier.level

    def test_single_site_child_frequencies(self):
        alpha = 0.7
        rng = substream(3)
        steps = 100_000
        left = right = 0
        for _ in range(steps):
            child = op_step(Frontier.origin(), alpha, "bond", rng)
            occ = set(child.occupied.tolist())
            left += 1 if -1 in occ else 0
            right += 1 if 1 in occ else 0
        se = math.sqrt(alpha * (1 - alpha) / steps)
        assert abs(left / steps - alpha) <= 3 * se
        assert abs(right / steps - alpha) <= 3 * se

    def test_two_parent_occupation_matches_beta(self):
        # candidate with both predecessors occupied: bond turns on with
        # 1-(1-a)^2, site with a
        alpha = 0.6
        rng = substream(4)
        steps = 30_000
        hits = {"bond": 0, "site": 0}
        parents = Frontier(0, np.array([-2, 0, 2]))
        for variant in ("bond", "site"):
            for _ in range(steps):
                child = op_step(parents, alpha, variant, rng)
                hits[variant] += 1 if -1 in set(child.occupied.tolist()) else 0
        se = math.sqrt(0.25 / steps)
        assert abs(hits["bond"] / steps - bond_beta(alpha)) <= 4 * se
        assert abs(hits["site"] / steps - alpha) <= 4 * se

    def test_invalid_alpha(self):
        with pytest.raises(DomainError):
            op_step(Frontier.origin(), 1.5, "bond", substream(0))
        with pytest.raises(DomainError):
            op_step(Frontier.origin(), 0.5, "triangle", substream(0))


class TestSurvival:
    def test_alpha_one_survives(self):
        stats = survival_probability(1.0, "bond", 50, 20, seed=1)
        assert stats.fraction == 1.0

    def test_supercritical_bond_survives_often(self):
        stats = survival_probability(0.81, "bond", 200, 100, seed=2)
        assert stats.fraction > 0.15
        assert stats.ci_low <= stats.fraction <= stats.ci_high

    def test_subcritical_bond_dies(self):
        stats = survival_probability(0.5, "bond", 300, 200, seed=3)
        assert stats.survivors == 0
        assert all(lvl >= 1 for lvl in stats.extinction_levels)

    def test_subcritical_site_dies(self):
        stats = survival_probability(0.5, "site", 300, 200, seed=4)
        assert stats.survivors == 0

    def test_extinction_levels_recorded(self):
        stats = survival_probability(0.6, "bond", 50, 50, seed=5)
        assert len(stats.extinction_levels) == 50
        for lvl in stats.extinction_levels:
            assert lvl == -1 or 1 <= lvl <= 50

    def test_deterministic(self):
        a = survival_probability(0.7, "bond", 100, 40, seed=6)
        b = survival_probability(0.7, "bond", 100, 40, seed=6)
        assert a == b


class TestCoupling:
    def test_singleton_list(self):
        assert coupled_survival_monotonicity([0.7], "bond", 50, 20, seed=1)

    def test_two_point_list(self):
        assert coupled_survival_monotonicity([0.2, 0.9], "bond", 80, 40, seed=2)

    def test_four_point_bond(self):
        assert coupled_survival_monotonicity([0.5, 0.7, 0.81, 0.95], "bond", 120, 50, seed=3)

    def test_site_variant(self):
        assert coupled_survival_monotonicity([0.5, 0.8, 0.9], "site", 100, 40, seed=4)

    def test_matrix_shape_and_trend(self):
        mat = coupled_survival_matrix([0.4, 0.95], "bond", 120, 60, seed=5)
        assert mat.shape == (60, 2)
        assert mat[:, 0].mean() < mat[:, 1].mean()

    def test_unsorted_rejected(self):
        with pytest.raises(DomainError):
            coupled_survival_monotonicity([0.9, 0.5], "bond", 10, 5, seed=0)

    def test_site_subset_of_bond_per_step(self):
        rng = substream(7)
        for t in range(300):
            level = int(rng.integers(0, 40))
            width = int(rng.integers(1, 25))
            sites = np.unique(rng.integers(-30, 31, width) * 2 + (level % 2))
            frontier = Frontier(level, sites)
            site_f, bond_f = coupled_variant_step(frontier, 0.65, trial_key=1000 + t)
            assert set(site_f.occupied.tolist()) <= set(bond_f.occupied.tolist())

    def test_coupled_step_is_deterministic_in_key(self):
        frontier = Frontier(4, np.array([-2, 0, 2, 4]))
        a = coupled_variant_step(frontier, 0.7, trial_key=99)
        b = coupled_variant_step(frontier, 0.7, trial_key=99)
        assert a[0].occupied.tolist() == b[0].occupied.tolist()
        assert a[1].occupied.tolist() == b[1].occupied.tolist()
