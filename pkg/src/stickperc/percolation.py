"""Cluster analysis and critical-intensity estimation.

Pipeline per configuration: a spatial hash over stick bounding boxes
(broad phase), exact segment-segment distances on the candidate pairs
(narrow phase), union-find clustering, and a window-crossing test.  On top
of that sit the crossing-probability estimator, a stochastic bisection for
the threshold intensity, and the log-log scaling fit.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import BracketFailure, DegenerateDesign, DomainError, PreconditionViolated
from .geometry import INTERSECT_THRESHOLD, segment_distance_arrays
from .measures import theorem_bounds
from .rng import derive_seed, substream
from .sampling import Configuration, OrientationLaw, sample_window_configuration
from .stats import wilson_interval

_STREAM_REPLICATE = 0x4EB1
_STREAM_THINNING = 0x7417
_PAIR_CHUNK = 2_000_000


class UnionFind:
    """Disjoint-set forest over stick indices (path halving + union by rank)."""

    def __init__(self, n: int):
        self._parent = list(range(n))
        self._rank = [0] * n
        self.count = n

    def __len__(self) -> int:
        return len(self._parent)

    def find(self, i: int) -> int:
        parent = self._parent
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        rank = self._rank
        if rank[ra] < rank[rb]:
            ra, rb = rb, ra
        self._parent[rb] = ra
        if rank[ra] == rank[rb]:
            rank[ra] += 1
        self.count -= 1
        return True

    @property
    def parent(self) -> np.ndarray:
        return np.array(self._parent)

    @property
    def rank(self) -> np.ndarray:
        return np.array(self._rank)

    def labels(self) -> np.ndarray:
        return np.array([self.find(i) for i in range(len(self._parent))])


@dataclass(frozen=True)
class CrossingResult:
    crossed: bool
    largest_cluster: int
    cluster_count: int
    pair_tests: int


@dataclass
class SpatialIndex:
    """Uniform-grid broad phase: each stick is registered in every cell its
    radius-1-inflated bounding box overlaps, so any two intersecting sticks
    share at least one cell regardless of cell size."""

    cell: float
    n: int
    _codes: np.ndarray = field(repr=False)
    _stick_ids: np.ndarray = field(repr=False)
    _starts: np.ndarray = field(repr=False)
    _grid_min: np.ndarray = field(repr=False)
    _grid_span: np.ndarray = field(repr=False)

    @property
    def cells(self) -> dict[tuple, np.ndarray]:
        """Cell coordinate -> sorted stick indices (built on demand)."""
        out = {}
        bounds = list(self._starts) + [len(self._stick_ids)]
        for gi in range(len(self._starts)):
            lo, hi = bounds[gi], bounds[gi + 1]
            coord = np.unravel_index(self._codes[lo], self._grid_span)
            key = tuple(int(c + g) for c, g in zip(coord, self._grid_min))
            out[key] = self._stick_ids[lo:hi]
        return out

    def candidate_pairs(self) -> np.ndarray:
        """Unique index pairs (i < j) sharing at least one cell; a superset
        of all intersecting pairs."""
        if self.n < 2 or len(self._stick_ids) == 0:
            return np.empty((0, 2), dtype=np.int64)
        bounds = np.append(self._starts, len(self._stick_ids))
        pieces_i = []
        pieces_j = []
        triu_cache: dict[int, tuple[np.ndarray, np.ndarray]] = {}
        for gi in range(len(self._starts)):
            members = self._stick_ids[bounds[gi] : bounds[gi + 1]]
            k = len(members)
            if k < 2:
                continue
            if k not in triu_cache:
                triu_cache[k] = np.triu_indices(k, 1)
            iu, ju = triu_cache[k]
            pieces_i.append(members[iu])
            pieces_j.append(members[ju])
        if not pieces_i:
            return np.empty((0, 2), dtype=np.int64)
        ii = np.concatenate(pieces_i)
        jj = np.concatenate(pieces_j)
        keys = np.unique(ii.astype(np.int64) * self.n + jj.astype(np.int64))
        return np.column_stack((keys // self.n, keys % self.n))


def default_cell_size(length: float) -> float:
    # one cell spans a whole inflated stick, keeping per-stick registration
    # to at most 2^d cells
    return length + 2.0


def tuned_cell_size(length: float, law) -> float:
    # any cell size is complete (sticks register in every overlapped cell);
    # smaller cells trade registration work for fewer candidate pairs, and
    # aligned sticks profit from much finer cells than isotropic ones
    if getattr(law, "tag", None) == "rigid":
        return length / 8.0 + 2.0
    return length / 2.0 + 2.0


def build_index(config: Configuration, cell: float | None = None) -> SpatialIndex:
    """Hash every stick of ``config`` into the cells overlapped by its
    radius-1-inflated axis-aligned bounding box."""
    if cell is None:
        cell = default_cell_size(config.length)
    if not cell > 0.0:
        raise DomainError("cell size must be positive")
    n, d = config.centers.shape
    if n == 0:
        empty = np.empty(0, dtype=np.int64)
        return SpatialIndex(
            cell=cell,
            n=0,
            _codes=empty,
            _stick_ids=empty,
            _starts=empty,
            _grid_min=np.zeros(d, dtype=np.int64),
            _grid_span=np.ones(d, dtype=np.int64),
        )
    half_ext = config.half * np.abs(config.dirs) + 1.0
    lo = np.floor((config.centers - half_ext) / cell).astype(np.int64)
    hi = np.floor((config.centers + half_ext) / cell).astype(np.int64)
    spans = hi - lo + 1
    counts = spans.prod(axis=1)
    total = int(counts.sum())
    stick_ids = np.repeat(np.arange(n, dtype=np.int64), counts)
    offsets = np.concatenate(([0], np.cumsum(counts)[:-1]))
    local = np.arange(total, dtype=np.int64) - np.repeat(offsets, counts)
    strides = np.ones_like(spans)
    for k in range(d - 2, -1, -1):
        strides[:, k] = strides[:, k + 1] * spans[:, k + 1]
    coords = lo[stick_ids] + (local[:, None] // strides[stick_ids]) % spans[stick_ids]
    grid_min = lo.min(axis=0)
    grid_span = hi.max(axis=0) - grid_min + 1
    codes = np.ravel_multi_index((coords - grid_min).T, grid_span)
    order = np.lexsort((stick_ids, codes))
    codes = codes[order]
    stick_ids = stick_ids[order]
    starts = np.concatenate(([0], np.flatnonzero(np.diff(codes)) + 1))
    return SpatialIndex(
        cell=cell,
        n=n,
        _codes=codes,
        _stick_ids=stick_ids,
        _starts=starts,
        _grid_min=grid_min,
        _grid_span=grid_span,
    )


def intersection_edges(config: Configuration, cell: float | None = None) -> tuple[np.ndarray, int]:
    """Exact intersecting pairs of ``config`` plus the number of narrow-phase
    distance evaluations performed."""
    index = build_index(config, cell)
    pairs = index.candidate_pairs()
    if len(pairs) == 0:
        return pairs, 0
    keep = []
    halves = np.full(config.count, config.half)
    for lo in range(0, len(pairs), _PAIR_CHUNK):
        block = pairs[lo : lo + _PAIR_CHUNK]
        i, j = block[:, 0], block[:, 1]
        dist = segment_distance_arrays(
            config.centers[i], config.dirs[i], halves[i] * 2.0,
            config.centers[j], config.dirs[j], halves[j] * 2.0,
        )
        keep.append(block[dist <= INTERSECT_THRESHOLD])
    edges = np.concatenate(keep) if keep else pairs[:0]
    return edges, len(pairs)


def _touch_masks(config: Configuration, axis: int) -> tuple[np.ndarray, np.ndarray]:
    window = config.observation_window
    reach = config.half * np.abs(config.dirs[:, axis]) + 1.0
    lo_ext = config.centers[:, axis] - reach
    hi_ext = config.centers[:, axis] + reach
    touch_low = (lo_ext <= window.low[axis]) & (hi_ext >= window.low[axis])
    touch_high = (lo_ext <= window.high[axis]) & (hi_ext >= window.high[axis])
    return touch_low, touch_high


def _crossing_from_labels(config: Configuration, labels: np.ndarray, axis: int) -> bool:
    touch_low, touch_high = _touch_masks(config, axis)
    if not touch_low.any() or not touch_high.any():
        return False
    return bool(np.isin(labels[touch_low], labels[touch_high]).any())


def cluster(
    config: Configuration, cell: float | None = None, axis: int = 0
) -> tuple[UnionFind, CrossingResult]:
    """Union all intersecting stick pairs and report cluster statistics plus
    the window-crossing flag along ``axis``."""
    if not 0 <= axis < config.d:
        raise DomainError("axis out of range")
    edges, tested = intersection_edges(config, cell)
    uf = UnionFind(config.count)
    for a, b in edges:
        uf.union(int(a), int(b))
    if config.count == 0:
        return uf, CrossingResult(False, 0, 0, tested)
    labels = uf.labels()
    _, sizes = np.unique(labels, return_counts=True)
    crossed = _crossing_from_labels(config, labels, axis)
    return uf, CrossingResult(
        crossed=crossed,
        largest_cluster=int(sizes.max()),
        cluster_count=int(len(sizes)),
        pair_tests=tested,
    )


def crossing_event(config: Configuration, axis: int = 0, cell: float | None = None) -> bool:
    """Whether one cluster touches both window faces orthogonal to ``axis``."""
    _, result = cluster(config, cell=cell, axis=axis)
    return result.crossed


def _replicate_crossing(args) -> bool:
    d, length, intensity, law, side, replicate_seed, axis, cell = args
    config = sample_window_configuration(d, length, intensity, law, side, replicate_seed)
    edges, _ = intersection_edges(config, cell)
    uf = UnionFind(config.count)
    for a, b in edges:
        uf.union(int(a), int(b))
    if config.count == 0:
        return False
    return _crossing_from_labels(config, uf.labels(), axis)


@dataclass(frozen=True)
class CrossingStats:
    intensity: float
    frequency: float
    ci_low: float
    ci_high: float
    successes: int
    replicates: int
    outcomes: tuple[int, ...]


def replicate_seeds(seed: int, probe: int, replicates: int) -> list[int]:
    return [derive_seed(seed, _STREAM_REPLICATE, probe, r) for r in range(replicates)]


def crossing_probability(
    d: int,
    length: float,
    intensity: float,
    law: OrientationLaw,
    side: float,
    replicates: int,
    seed: int,
    axis: int = 0,
    cell: float | None = None,
    workers: int = 1,
    probe_id: int = 0,
) -> CrossingStats:
    """Fraction of independent window configurations with a crossing, with a
    Wilson 95% interval.  Replicate substreams depend only on (seed,
    probe_id, replicate), so the result is worker-count independent."""
    if replicates < 1:
        raise DomainError("need at least one replicate")
    if cell is None:
        cell = tuned_cell_size(length, law)
    seeds = replicate_seeds(seed, probe_id, replicates)
    payloads = [(d, length, intensity, law, side, s, axis, cell) for s in seeds]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunk = max(1, len(payloads) // (4 * workers))
            outcomes = [bool(v) for v in pool.map(_replicate_crossing, payloads, chunksize=chunk)]
    else:
        outcomes = [_replicate_crossing(p) for p in payloads]
    successes = int(sum(outcomes))
    ci_low, ci_high = wilson_interval(successes, replicates)
    return CrossingStats(
        intensity=float(intensity),
        frequency=successes / replicates,
        ci_low=ci_low,
        ci_high=ci_high,
        successes=successes,
        replicates=replicates,
        outcomes=tuple(int(v) for v in outcomes),
    )


@dataclass(frozen=True)
class ThresholdEstimate:
    d: int
    length: float
    law: str
    side: float
    lambda_hat: float
    ci_low: float
    ci_high: float
    replicates_per_probe: int
    probes: tuple[CrossingStats, ...]
    bracket: tuple[float, float]
    seed: int


def _logistic_interpolation(
    probes: list[CrossingStats], lo: float, hi: float
) -> tuple[float, float, float]:
    # Weighted least squares of adjusted logits on log-intensity; lambda_hat
    # is the fitted frequency-1/2 point with a delta-method interval.  Only
    # probes inside [lo, hi] enter: the walk-out probes far below threshold
    # are not on the logistic part of the crossing curve.
    eps = 1e-12
    used = [p for p in probes if lo * (1 - eps) <= p.intensity <= hi * (1 + eps)]
    if len(used) >= 2:
        probes = used
    xs, ys, ws = [], [], []
    for p in probes:
        ptil = (p.successes + 0.5) / (p.replicates + 1.0)
        xs.append(math.log(p.intensity))
        ys.append(math.log(ptil / (1.0 - ptil)))
        ws.append(p.replicates * ptil * (1.0 - ptil))
    x = np.array(xs)
    y = np.array(ys)
    w = np.array(ws)
    sw = w.sum()
    xbar = float((w * x).sum() / sw)
    ybar = float((w * y).sum() / sw)
    sxx = float((w * (x - xbar) ** 2).sum())
    if sxx <= 0.0:
        mid = math.sqrt(lo * hi)
        return mid, lo, hi
    b = float((w * (x - xbar) * (y - ybar)).sum()) / sxx
    a = ybar - b * xbar
    if not (b > 0.0) or not math.isfinite(b):
        mid = math.sqrt(lo * hi)
        return mid, lo, hi
    x_hat = -a / b
    # binomial-weight covariance of (a, b)
    var_b = 1.0 / sxx
    var_a = 1.0 / sw + xbar * xbar / sxx
    cov_ab = -xbar / sxx
    var_x = (var_a + 2.0 * x_hat * cov_ab + x_hat * x_hat * var_b) / (b * b)
    half = 1.959963984540054 * math.sqrt(max(var_x, 0.0))
    lam = math.exp(x_hat)
    lam = min(max(lam, lo), hi)
    ci_low = min(max(math.exp(x_hat - half), lo), lam)
    ci_high = max(min(math.exp(x_hat + half), hi), lam)
    return lam, ci_low, ci_high


def estimate_threshold(
    d: int,
    length: float,
    law: OrientationLaw,
    side: float,
    replicates: int,
    seed: int,
    axis: int = 0,
    cell: float | None = None,
    workers: int = 1,
    max_bisect: int = 12,
    delta: float = 1.0,
) -> ThresholdEstimate:
    """Stochastic bisection estimate of the crossing intensity.

    Starting from the theorem lower bound, the intensity is walked
    geometrically until the crossing frequencies straddle 1/2, then bisected
    in log-intensity with a fixed number of replicates per probe.  Bisection
    stops once a probe's Wilson interval contains 1/2 (the noise floor) or
    after ``max_bisect`` probes.  The estimate interpolates frequency 1/2
    from a logistic fit over the whole probe trace.
    """
    if not side >= 8.0 * length:
        raise PreconditionViolated("window side must be at least 8 L")
    bounds = theorem_bounds(d, length, law, delta=delta, strict=False)
    lo_limit = bounds.lower / 10.0
    hi_limit = bounds.upper * 10.0
    probes: list[CrossingStats] = []

    def probe(lam: float) -> CrossingStats:
        stats = crossing_probability(
            d, length, lam, law, side, replicates, seed,
            axis=axis, cell=cell, workers=workers, probe_id=len(probes),
        )
        probes.append(stats)
        return stats

    lam = bounds.lower
    current = probe(lam)
    if current.frequency <= 0.5:
        lam_lo, lam_hi = lam, None
        while current.frequency <= 0.5:
            lam_lo = current.intensity
            lam = current.intensity * 2.0
            if lam > hi_limit:
                raise BracketFailure("no supercritical intensity found below 10x upper bound")
            current = probe(lam)
        lam_hi = current.intensity
    else:
        lam_hi = lam
        while current.frequency > 0.5:
            lam_hi = current.intensity
            lam = current.intensity / 2.0
            if lam < lo_limit:
                raise BracketFailure("no subcritical intensity found above lower bound / 10")
            current = probe(lam)
        lam_lo = current.intensity

    straddle = (lam_lo, lam_hi)
    for _ in range(max_bisect):
        mid = math.sqrt(lam_lo * lam_hi)
        current = probe(mid)
        if current.frequency > 0.5:
            lam_hi = mid
        else:
            lam_lo = mid
        if current.ci_low <= 0.5 <= current.ci_high:
            break

    lam_hat, ci_low, ci_high = _logistic_interpolation(probes, straddle[0], straddle[1])
    return ThresholdEstimate(
        d=d,
        length=float(length),
        law=getattr(law, "tag", str(law)),
        side=float(side),
        lambda_hat=lam_hat,
        ci_low=ci_low,
        ci_high=ci_high,
        replicates_per_probe=replicates,
        probes=tuple(probes),
        bracket=(lam_lo, lam_hi),
        seed=int(seed),
    )


def fit_weight(est: ThresholdEstimate) -> float:
    """Inverse-variance weight for the scaling fit, from the estimate's
    confidence interval on the log scale."""
    spread = max(math.log(est.ci_high) - math.log(est.ci_low), 1e-3)
    se = spread / (2.0 * 1.959963984540054)
    return 1.0 / (se * se)


@dataclass(frozen=True)
class ScalingFit:
    slope: float
    intercept: float
    stderr: float
    points: int


def scaling_fit(points) -> ScalingFit:
    """Weighted least squares of ln(lambda) on ln(L).

    ``points`` is an iterable of (L, lambda_hat, weight); needs at least
    three distinct L values.
    """
    pts = [(float(L), float(lam), float(w)) for L, lam, w in points]
    if len({p[0] for p in pts}) < 3:
        raise DegenerateDesign("scaling fit needs at least 3 distinct L values")
    x = np.log([p[0] for p in pts])
    y = np.log([p[1] for p in pts])
    w = np.array([p[2] for p in pts])
    if np.any(w <= 0.0):
        raise DomainError("weights must be positive")
    sw = w.sum()
    xbar = (w * x).sum() / sw
    ybar = (w * y).sum() / sw
    sxx = (w * (x - xbar) ** 2).sum()
    if sxx <= 0.0:
        raise DegenerateDesign("no spread in ln L")
    slope = float((w * (x - xbar) * (y - ybar)).sum() / sxx)
    intercept = float(ybar - slope * xbar)
    resid = y - intercept - slope * x
    dof = len(pts) - 2
    sigma2 = float((w * resid ** 2).sum() / dof) if dof > 0 else 0.0
    stderr = math.sqrt(max(sigma2, 0.0) / sxx)
    return ScalingFit(slope=slope, intercept=intercept, stderr=stderr, points=len(pts))


def coupled_crossing_indicators(
    d: int,
    length: float,
    intensities,
    law: OrientationLaw,
    side: float,
    replicates: int,
    seed: int,
    axis: int = 0,
    cell: float | None = None,
) -> np.ndarray:
    """Crossing indicators on a shared driving: each replicate samples one
    configuration at max(intensities) and thins it with common per-stick
    marks, so the indicator is non-decreasing in intensity by construction
    of the coupling.  Returns an array of shape (replicates, len(intensities))."""
    lams = [float(v) for v in intensities]
    if sorted(lams) != lams:
        raise DomainError("intensities must be sorted ascending")
    lam_max = lams[-1]
    out = np.zeros((replicates, len(lams)), dtype=int)
    for r in range(replicates):
        rep_seed = derive_seed(seed, _STREAM_THINNING, r)
        config = sample_window_configuration(d, length, lam_max, law, side, rep_seed)
        marks = substream(rep_seed, _STREAM_THINNING).random(config.count)
        for k, lam in enumerate(lams):
            keep = marks < (lam / lam_max)
            sub = Configuration(
                d=config.d,
                length=config.length,
                intensity=lam,
                box=config.box,
                centers=config.centers[keep],
                dirs=config.dirs[keep],
                seed=rep_seed,
                window=config.window,
            )
            out[r, k] = 1 if crossing_event(sub, axis=axis, cell=cell) else 0
    return out
