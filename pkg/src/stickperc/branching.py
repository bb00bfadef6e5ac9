"""Branching-process view of stick clusters.

The number of sticks hitting a fixed stick is the offspring count of the
dominating Galton-Watson process; this module estimates its mean by Monte
Carlo, runs the dominating process from stored offspring samples, and
explores real components generation by generation so domination can be
observed pathwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CapacityExceeded, DomainError
from .geometry import Segment, Stick, segment_distance_arrays
from .rng import substream
from .sampling import BoxRegion, OrientationLaw, poisson_count

_STREAM_OFFSPRING = 0x0FF5
_STREAM_GW = 0x6A17
_STREAM_EXPLORE = 0xE821

# any stick of length L intersecting a fixed stick has its center within
# L/2 + 2 of that stick's segment; L + 4 of box padding is a safe superset
def offspring_box(seed_stick: Stick, length: float) -> BoxRegion:
    seg = seed_stick.seg
    reach = seg.half * np.abs(seg.direction)
    pad = length + 4.0
    return BoxRegion(seg.center - reach - pad, seg.center + reach + pad)


@dataclass(frozen=True)
class OffspringEstimate:
    mean: float
    stderr: float
    trials: int
    samples: tuple[int, ...]


def offspring_mean_mc(
    d: int,
    length: float,
    intensity: float,
    law: OrientationLaw,
    seed_stick: Stick,
    trials: int,
    seed: int,
) -> OffspringEstimate:
    """Sample mean of the number of Poisson sticks intersecting ``seed_stick``.

    Each trial draws a fresh Poisson configuration in a box provably
    containing every center that could intersect the seed and counts the
    intersecting sticks.
    """
    if trials < 1:
        raise DomainError("need at least one trial")
    box = offspring_box(seed_stick, length)
    rng = substream(seed, _STREAM_OFFSPRING)
    mean_count = intensity * box.volume
    if mean_count * trials > 1e9:
        raise CapacityExceeded("offspring MC would draw more than 1e9 sticks")
    counts = rng.poisson(mean_count, size=trials).astype(np.int64)
    seg = seed_stick.seg
    samples = np.zeros(trials, dtype=np.int64)
    # process trial blocks of at most ~2e6 sticks to bound memory
    block_trials = max(1, int(2e6 / max(mean_count, 1.0)))
    for lo in range(0, trials, block_trials):
        block = counts[lo : lo + block_trials]
        total = int(block.sum())
        if total == 0:
            continue
        centers = rng.uniform(box.low, box.high, size=(total, d))
        dirs = law.sample_directions(rng, d, total)
        dist = segment_distance_arrays(
            centers,
            dirs,
            np.full(total, length),
            np.broadcast_to(seg.center, (total, d)),
            np.broadcast_to(seg.direction, (total, d)),
            np.full(total, seg.length),
        )
        hits = (dist <= 2.0).astype(np.int64)
        offsets = np.minimum(np.concatenate(([0], np.cumsum(block)[:-1])), total - 1)
        samples[lo : lo + block_trials] = np.where(block > 0, np.add.reduceat(hits, offsets), 0)
    mean = float(samples.mean())
    stderr = float(samples.std(ddof=1) / math.sqrt(trials)) if trials > 1 else float("inf")
    return OffspringEstimate(mean=mean, stderr=stderr, trials=trials, samples=tuple(int(v) for v in samples))


@dataclass(frozen=True)
class GWReport:
    generation_sizes: tuple[int, ...]
    offspring_samples: tuple[int, ...]
    truncated: bool
    max_generations: int
    population_cap: int

    @property
    def extinct(self) -> bool:
        return not self.truncated and (len(self.generation_sizes) == 0 or self.generation_sizes[-1] == 0)


def dominating_gw_run(
    offspring_samples,
    max_generations: int,
    population_cap: int,
    seed: int,
) -> GWReport:
    """Galton-Watson run whose offspring law is the empirical distribution of
    ``offspring_samples``; generation sizes start with the root's own
    offspring draw and stop at extinction or a cap."""
    samples = np.asarray(offspring_samples, dtype=np.int64)
    if len(samples) == 0:
        raise DomainError("need at least one stored offspring sample")
    if max_generations < 1 or population_cap < 1:
        raise DomainError("caps must be positive")
    rng = substream(seed, _STREAM_GW)
    sizes: list[int] = []
    population = 1
    truncated = False
    for _ in range(max_generations):
        draws = samples[rng.integers(0, len(samples), size=population)]
        population = int(draws.sum())
        sizes.append(population)
        if population == 0:
            break
        if population > population_cap:
            truncated = True
            break
    else:
        truncated = population > 0
    return GWReport(
        generation_sizes=tuple(sizes),
        offspring_samples=tuple(int(v) for v in samples),
        truncated=truncated,
        max_generations=max_generations,
        population_cap=population_cap,
    )


@dataclass(frozen=True)
class ExplorationResult:
    generation_sizes: tuple[int, ...]
    component_size: int
    window_exceeded: bool
    truncated: bool
    dominating_sizes: tuple[int, ...] | None


class _ExploredSet:
    """Growing list of stick geometries with a vectorized distance query."""

    def __init__(self, d: int):
        self.centers: list[np.ndarray] = []
        self.dirs: list[np.ndarray] = []
        self.lengths: list[float] = []
        self.d = d

    def add(self, center, direction, length):
        self.centers.append(np.asarray(center, dtype=float))
        self.dirs.append(np.asarray(direction, dtype=float))
        self.lengths.append(float(length))

    def hits_any(self, centers, dirs, lengths) -> np.ndarray:
        n = centers.shape[0]
        out = np.zeros(n, dtype=bool)
        if not self.centers or n == 0:
            return out
        lengths = np.broadcast_to(np.asarray(lengths, dtype=float), (n,))
        for ec, ed, el in zip(self.centers, self.dirs, self.lengths):
            idx = np.flatnonzero(~out)
            if len(idx) == 0:
                break
            dist = segment_distance_arrays(
                centers[idx],
                dirs[idx],
                lengths[idx],
                np.broadcast_to(ec, (len(idx), self.d)),
                np.broadcast_to(ed, (len(idx), self.d)),
                np.full(len(idx), el),
            )
            out[idx] |= dist <= 2.0
        return out


def _fresh_offspring_count(
    rng: np.random.Generator,
    d: int,
    length: float,
    intensity: float,
    law: OrientationLaw,
    stick: Stick,
    explored: _ExploredSet | None,
) -> int:
    """Count sticks of a fresh Poisson draw hitting ``stick``; when
    ``explored`` is given, count only those also hitting the explored set
    (the compensation term of the exploration coupling)."""
    box = offspring_box(stick, length)
    n = poisson_count(intensity * box.volume, rng)
    if n == 0:
        return 0
    centers = rng.uniform(box.low, box.high, size=(n, d))
    dirs = law.sample_directions(rng, d, n)
    seg = stick.seg
    dist = segment_distance_arrays(
        centers,
        dirs,
        np.full(n, length),
        np.broadcast_to(seg.center, (n, d)),
        np.broadcast_to(seg.direction, (n, d)),
        np.full(n, seg.length),
    )
    hit = dist <= 2.0
    if explored is None:
        return int(hit.sum())
    if not hit.any():
        return 0
    idx = np.flatnonzero(hit)
    also = explored.hits_any(centers[idx], dirs[idx], np.full(len(idx), length))
    return int(also.sum())


def component_exploration(
    d: int,
    length: float,
    intensity: float,
    law: OrientationLaw,
    seed_stick: Stick,
    max_generations: int,
    population_cap: int,
    seed: int,
    with_domination: bool = True,
) -> ExplorationResult:
    """Explore the true component of ``seed_stick`` generation by generation
    in one sampled configuration, restricted to a window of radius
    max_generations * (L + 4) around the seed.

    With ``with_domination`` the run also drives the coupled dominating
    branching process: each explored stick's offspring count is topped up
    with a fresh compensation draw (sticks hitting it and the already
    explored region), and surplus individuals reproduce via fresh offspring
    draws around their own stick, so dominating sizes are pathwise at least
    the true generation sizes.
    """
    if max_generations < 1 or population_cap < 1:
        raise DomainError("caps must be positive")
    rng = substream(seed, _STREAM_EXPLORE)
    seg = seed_stick.seg
    radius = max_generations * (length + 4.0)
    window = BoxRegion(seg.center - radius, seg.center + radius)
    mean_count = intensity * window.volume
    n = poisson_count(mean_count, rng)
    centers = rng.uniform(window.low, window.high, size=(n, d))
    dirs = law.sample_directions(rng, d, n)
    lengths = np.full(n, length)
    unexplored = np.ones(n, dtype=bool)

    # compensation conditions on the sticks whose neighborhoods were already
    # searched (that is where the configuration has been consumed)
    processed = _ExploredSet(d)
    window_exceeded = False
    truncated = False

    def touches_boundary(center, direction, seg_length) -> bool:
        reach = 0.5 * seg_length * np.abs(direction) + 1.0
        return bool(
            np.any(center - reach <= window.low) or np.any(center + reach >= window.high)
        )

    # queue entries: ("real", stick geometry) or ("phantom", None)
    current: list[tuple[str, tuple | None]] = [("real", (seg.center, seg.direction, seg.length))]
    actual_sizes: list[int] = []
    dominating_sizes: list[int] | None = [] if with_domination else None
    component_size = 1  # the seed stick itself

    for _ in range(max_generations):
        next_queue: list[tuple[str, tuple | None]] = []
        actual_next = 0
        dom_next = 0
        for kind, geom in current:
            if kind == "real":
                center, direction, seg_length = geom
                # children actually present in the configuration
                idx = np.flatnonzero(unexplored)
                n_children = 0
                children_idx = np.empty(0, dtype=np.int64)
                if len(idx):
                    dist = segment_distance_arrays(
                        centers[idx],
                        dirs[idx],
                        lengths[idx],
                        np.broadcast_to(center, (len(idx), d)),
                        np.broadcast_to(direction, (len(idx), d)),
                        np.full(len(idx), seg_length),
                    )
                    children_idx = idx[dist <= 2.0]
                    n_children = len(children_idx)
                    unexplored[children_idx] = False
                actual_next += n_children
                component_size += n_children
                for ci in children_idx:
                    if touches_boundary(centers[ci], dirs[ci], length):
                        window_exceeded = True
                    next_queue.append(("real", (centers[ci], dirs[ci], length)))
                if with_domination:
                    stick = Stick(Segment(center, direction, seg_length))
                    extra = _fresh_offspring_count(
                        rng, d, length, intensity, law, stick, processed
                    )
                    dom_next += n_children + extra
                    next_queue.extend(("phantom", None) for _ in range(extra))
                processed.add(center, direction, seg_length)
            else:
                # surplus individual of the dominating process: fresh
                # offspring draw around a fresh stick of the same law
                direction = law.sample_directions(rng, d, 1)[0]
                stick = Stick(Segment(np.zeros(d), direction, length))
                kids = _fresh_offspring_count(rng, d, length, intensity, law, stick, None)
                dom_next += kids
                next_queue.extend(("phantom", None) for _ in range(kids))
        actual_sizes.append(actual_next)
        if dominating_sizes is not None:
            dominating_sizes.append(dom_next)
        alive = dom_next if with_domination else actual_next
        if alive == 0:
            break
        if alive > population_cap:
            truncated = True
            break
        current = next_queue
    else:
        truncated = (dominating_sizes[-1] if with_domination else actual_sizes[-1]) > 0

    return ExplorationResult(
        generation_sizes=tuple(actual_sizes),
        component_size=component_size,
        window_exceeded=window_exceeded,
        truncated=truncated,
        dominating_sizes=None if dominating_sizes is None else tuple(dominating_sizes),
    )
