"""Oriented percolation on the even sublattice of the upper half-plane.

A frontier at level n is the set of occupied sites (x, n) with x + n even.
Two update variants share the same conditional law shape: a child with both
predecessors occupied turns on with probability beta, with exactly one with
probability alpha, otherwise stays empty.  In the bond variant each
occupied parent throws an independent left and right arrow with probability
alpha, so beta = 1 - (1 - alpha)^2 emerges structurally; in the site
variant each candidate child draws a single uniform, so beta = alpha.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .rng import combine_keys, derive_seed, mix_to_unit, substream
from .stats import wilson_interval

_STREAM_TRIAL = 0x0B5E
VARIANTS = ("bond", "site")

_KEY_LEFT = 11
_KEY_RIGHT = 13
_KEY_SITE = 17


@dataclass(frozen=True)
class Frontier:
    """Occupied set at one level; sites are stored as sorted unique x values."""

    level: int
    occupied: np.ndarray

    def __post_init__(self):
        occ = np.unique(np.asarray(self.occupied, dtype=np.int64))
        if self.level < 0:
            raise DomainError("level must be nonnegative")
        if occ.size and np.any((occ + self.level) % 2 != 0):
            raise DomainError("sites must satisfy x + level even")
        object.__setattr__(self, "occupied", occ)

    @property
    def alive(self) -> bool:
        return self.occupied.size > 0

    @staticmethod
    def origin() -> "Frontier":
        return Frontier(0, np.array([0], dtype=np.int64))


def _check_alpha(alpha: float) -> float:
    if not 0.0 < alpha < 1.0:
        if alpha in (0.0, 1.0):  # allow the degenerate endpoints for tests
            return float(alpha)
        raise DomainError("alpha must lie in (0, 1)")
    return float(alpha)


def _check_variant(variant: str) -> str:
    v = variant.lower()
    if v not in VARIANTS:
        raise DomainError(f"variant must be one of {VARIANTS}")
    return v


def bond_beta(alpha: float) -> float:
    return 1.0 - (1.0 - alpha) ** 2


def op_step(frontier: Frontier, alpha: float, variant: str, stream: np.random.Generator) -> Frontier:
    """One synchronous update of the frontier.

    Bond: two stream uniforms per occupied parent (left arrow then right
    arrow, parents in sorted order).  Site: one stream uniform per candidate
    child (sorted order).
    """
    alpha = _check_alpha(alpha)
    variant = _check_variant(variant)
    parents = frontier.occupied
    if parents.size == 0:
        return Frontier(frontier.level + 1, np.empty(0, dtype=np.int64))
    if variant == "bond":
        left = stream.random(parents.size) < alpha
        right = stream.random(parents.size) < alpha
        children = np.concatenate((parents[left] - 1, parents[right] + 1))
    else:
        candidates = np.unique(np.concatenate((parents - 1, parents + 1)))
        keep = stream.random(candidates.size) < alpha
        children = candidates[keep]
    return Frontier(frontier.level + 1, children)


def _field_step(frontier: Frontier, alpha: float, variant: str, trial_key: int) -> Frontier:
    # same dynamics driven by a deterministic uniform field keyed on
    # (trial, level, site, arrow); used by the shared-driving couplings
    parents = frontier.occupied
    if parents.size == 0:
        return Frontier(frontier.level + 1, np.empty(0, dtype=np.int64))
    n = frontier.level
    if variant == "bond":
        u_left = mix_to_unit(combine_keys(trial_key, n, parents, _KEY_LEFT))
        u_right = mix_to_unit(combine_keys(trial_key, n, parents, _KEY_RIGHT))
        children = np.concatenate((parents[u_left < alpha] - 1, parents[u_right < alpha] + 1))
    else:
        candidates = np.unique(np.concatenate((parents - 1, parents + 1)))
        u = mix_to_unit(combine_keys(trial_key, n + 1, candidates, _KEY_SITE))
        children = candidates[u < alpha]
    return Frontier(frontier.level + 1, children)


def coupled_variant_step(frontier: Frontier, alpha: float, trial_key: int) -> tuple[Frontier, Frontier]:
    """Site and bond updates of the same frontier on shared arrow uniforms.

    The site child reads the arrow of its leftmost occupied parent, so site
    occupation is pathwise contained in bond occupation while matching the
    site conditional law (one uniform per candidate).
    """
    parents = frontier.occupied
    level = frontier.level
    if parents.size == 0:
        empty = Frontier(level + 1, np.empty(0, dtype=np.int64))
        return empty, empty
    parent_set = set(int(x) for x in parents)
    site_children = []
    bond_children = []
    candidates = np.unique(np.concatenate((parents - 1, parents + 1)))
    for c in candidates:
        c = int(c)
        left_parent = c - 1 in parent_set
        right_parent = c + 1 in parent_set
        u_from_left = float(mix_to_unit(combine_keys(trial_key, level, np.array([c - 1]), _KEY_RIGHT))[0])
        u_from_right = float(mix_to_unit(combine_keys(trial_key, level, np.array([c + 1]), _KEY_LEFT))[0])
        arrows = []
        if left_parent:
            arrows.append(u_from_left)
        if right_parent:
            arrows.append(u_from_right)
        if any(u < alpha for u in arrows):
            bond_children.append(c)
        if arrows[0] < alpha:  # designated parent: leftmost occupied
            site_children.append(c)
    return (
        Frontier(level + 1, np.array(site_children, dtype=np.int64)),
        Frontier(level + 1, np.array(bond_children, dtype=np.int64)),
    )


@dataclass(frozen=True)
class SurvivalStats:
    alpha: float
    variant: str
    n_max: int
    trials: int
    survivors: int
    fraction: float
    ci_low: float
    ci_high: float
    extinction_levels: tuple[int, ...]  # -1 when the trial survived


def survival_probability(
    alpha: float, variant: str, n_max: int, trials: int, seed: int
) -> SurvivalStats:
    """Fraction of trials from the origin whose frontier is alive at n_max."""
    alpha = _check_alpha(alpha)
    variant = _check_variant(variant)
    if trials < 1 or n_max < 1:
        raise DomainError("trials and n_max must be positive")
    survivors = 0
    levels = []
    for t in range(trials):
        stream = substream(seed, _STREAM_TRIAL, t)
        frontier = Frontier.origin()
        extinction = -1
        for _ in range(n_max):
            frontier = op_step(frontier, alpha, variant, stream)
            if not frontier.alive:
                extinction = frontier.level
                break
        if extinction < 0:
            survivors += 1
        levels.append(extinction)
    ci_low, ci_high = wilson_interval(survivors, trials)
    return SurvivalStats(
        alpha=alpha,
        variant=variant,
        n_max=n_max,
        trials=trials,
        survivors=survivors,
        fraction=survivors / trials,
        ci_low=ci_low,
        ci_high=ci_high,
        extinction_levels=tuple(levels),
    )


def coupled_survival_matrix(
    alphas, variant: str, n_max: int, trials: int, seed: int
) -> np.ndarray:
    """Survival indicators (trials x alphas) on shared driving uniforms."""
    alphas = [float(a) for a in alphas]
    if sorted(alphas) != alphas:
        raise DomainError("alpha list must be sorted ascending")
    variant = _check_variant(variant)
    out = np.zeros((trials, len(alphas)), dtype=int)
    for t in range(trials):
        trial_key = derive_seed(seed, _STREAM_TRIAL, t)
        for k, alpha in enumerate(alphas):
            frontier = Frontier.origin()
            for _ in range(n_max):
                frontier = _field_step(frontier, alpha, variant, trial_key)
                if not frontier.alive:
                    break
            out[t, k] = 1 if frontier.alive else 0
    return out


def coupled_survival_monotonicity(
    alphas, variant: str, n_max: int, trials: int, seed: int
) -> bool:
    """True iff survival is non-decreasing in alpha in every coupled trial."""
    matrix = coupled_survival_matrix(alphas, variant, n_max, trials, seed)
    return bool(np.all(np.diff(matrix, axis=1) >= 0))
