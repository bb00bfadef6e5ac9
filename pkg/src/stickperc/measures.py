"""Closed-form measures, theorem bounds, construction geometry and their
Monte Carlo verifiers.

The exact expressions here (segment-ball hitting volume, spherical-cap
hitting probability, the two-ball connection constant c_d, and the critical
intensity bounds for the uniform/bounded-density and rigid orientation
laws) are the quantitative backbone of the package; each one is paired with
an independent numeric check in the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InsufficientTrials, PreconditionViolated
from .geometry import segments_hit_ball
from .rng import substream
from .sampling import OrientationLaw, Rigid
from .special import log_gamma, regularized_incomplete_beta

_STREAM_MEASURE_MC = 0x3EA5

LAW_TAGS = ("uniform", "rigid", "density")


def _check_dim(d: int) -> int:
    if int(d) != d or d < 2:
        raise DomainError("dimension must be an integer >= 2")
    return int(d)


def ball_volume(d: int, rho: float) -> float:
    """Volume of the d-dimensional ball of radius rho."""
    d = _check_dim(d)
    if rho < 0.0:
        raise DomainError("radius must be nonnegative")
    if rho == 0.0:
        return 0.0
    return math.exp(0.5 * d * math.log(math.pi) - log_gamma(0.5 * d + 1.0) + d * math.log(rho))


def stick_hit_volume(d: int, length: float, rho: float) -> float:
    """Measure (per unit intensity) of segments of length ``length`` whose
    line segment hits a ball of radius rho: the volume of the radius-rho
    capsule, L * vol(B_{d-1}(rho)) + vol(B_d(rho))."""
    d = _check_dim(d)
    if rho <= 0.0:
        raise DomainError("radius must be positive")
    if length < 0.0:
        raise DomainError("length must be nonnegative")
    cross_section = math.exp(
        0.5 * (d - 1) * math.log(math.pi) - log_gamma(0.5 * (d + 1)) + (d - 1) * math.log(rho)
    )
    return length * cross_section + ball_volume(d, rho)


def cap_hit_probability_exact(d: int, rho: float, r: float) -> float:
    """Probability that a uniformly oriented line through a point at distance
    ``r`` passes within ``rho`` of the center: J_{rho^2/r^2}((d-1)/2, 1/2).

    This equals the hitting probability of a length-L segment from the same
    point only when r < L/2 - rho; that reach condition is the caller's to
    check.
    """
    d = _check_dim(d)
    if not (0.0 < rho < r):
        raise DomainError("need 0 < rho < r (point strictly outside the ball)")
    z = (rho / r) ** 2
    return regularized_incomplete_beta(z, 0.5 * (d - 1), 0.5)


def cap_hit_lower_bound(d: int, rho: float, r: float) -> float:
    """Closed-form lower bound Gamma(d/2)/(sqrt(pi) Gamma((d+1)/2)) (rho/r)^{d-1};
    always below ``cap_hit_probability_exact``."""
    d = _check_dim(d)
    if not (0.0 < rho < r):
        raise DomainError("need 0 < rho < r")
    log_c = log_gamma(0.5 * d) - 0.5 * math.log(math.pi) - log_gamma(0.5 * (d + 1))
    return math.exp(log_c + (d - 1) * math.log(rho / r))


def c_d(d: int) -> float:
    """Two-ball connection constant:
    2^{5(d-2)} pi^{d/2-2} (1/sqrt(d)) Gamma(d/2)^3 / Gamma(2d-1)."""
    d = _check_dim(d)
    log_val = (
        5.0 * (d - 2) * math.log(2.0)
        + (0.5 * d - 2.0) * math.log(math.pi)
        - 0.5 * math.log(d)
        + 3.0 * log_gamma(0.5 * d)
        - log_gamma(2.0 * d - 1.0)
    )
    return math.exp(log_val)


def c_d_prime(d: int) -> float:
    """Per-step success constant c_d / (1000 sqrt(d))^d."""
    d = _check_dim(d)
    return math.exp(math.log(c_d(d)) - d * math.log(1000.0 * math.sqrt(d)))


@dataclass(frozen=True)
class BoundsReport:
    """Critical-intensity bracket for a given (d, L, law)."""

    d: int
    length: float
    law: str
    delta: float
    lower: float
    upper: float


def _law_tag(law) -> str:
    tag = getattr(law, "tag", law)
    if tag not in LAW_TAGS:
        raise DomainError(f"unknown law tag {tag!r}; expected one of {LAW_TAGS}")
    return tag


def lower_bound_constant(d: int, law) -> float:
    d = _check_dim(d)
    if _law_tag(law) == "rigid":
        return math.exp(log_gamma(0.5 * (d + 1)) - d * math.log(2.0) - 0.5 * d * math.log(math.pi))
    return math.exp(
        log_gamma(0.5 * (d + 1)) - 0.5 * (d - 1) * math.log(math.pi) - d * math.log(2.0)
    )


def upper_bound_constant(d: int, law, delta: float = 1.0) -> float:
    d = _check_dim(d)
    if _law_tag(law) == "rigid":
        return math.exp(
            math.log(4.0) + d * math.log(2.0) + log_gamma(0.5 * (d + 1))
            - (0.5 * d - 1.0) * math.log(math.pi)
        )
    if not delta > 0.0:
        raise DomainError("density floor delta must be positive")
    # 20 (1000 sqrt d)^d sqrt(d) Gamma(2d-1) / (9 delta 2^{5(d-2)} pi^{d/2-2} Gamma(d/2)^3)
    return math.exp(
        math.log(20.0 / (9.0 * delta)) - math.log(c_d_prime(d))
    )


def bound_validity_threshold(d: int, law, side: str) -> float:
    """Smallest L (exclusive) at which the theorem bound applies."""
    d = _check_dim(d)
    if _law_tag(law) == "rigid":
        return 3.0 if side == "lower" else 10.0
    return math.pi if side == "lower" else 200.0 * math.sqrt(d)


def theorem_bounds(d: int, length: float, law, delta: float = 1.0, strict: bool = True) -> BoundsReport:
    """Evaluate the critical-intensity bracket for (d, L, law).

    With ``strict`` (the default) the stated L-validity thresholds are hard
    preconditions; ``strict=False`` evaluates the formulas anyway, which is
    only meant for bracket sanity checks at small L.
    """
    d = _check_dim(d)
    tag = _law_tag(law)
    if tag == "uniform":
        delta = 1.0
    if strict:
        for side in ("lower", "upper"):
            threshold = bound_validity_threshold(d, tag, side)
            if not length > threshold:
                raise PreconditionViolated(
                    f"{tag} {side} bound requires L > {threshold:.6g}, got L = {length:.6g}"
                )
    exponent = 1.0 if tag == "rigid" else 2.0
    scale = length ** (-exponent)
    return BoundsReport(
        d=d,
        length=float(length),
        law=tag,
        delta=float(delta),
        lower=lower_bound_constant(d, tag) * scale,
        upper=upper_bound_constant(d, tag, delta) * scale,
    )


def gw_offspring_bound(d: int, length: float, intensity: float, law) -> float:
    """Closed-form upper bound on the expected number of sticks hitting a
    fixed stick (the branching-process offspring mean)."""
    d = _check_dim(d)
    tag = _law_tag(law)
    if tag == "rigid":
        if not length > 3.0:
            raise PreconditionViolated("rigid offspring bound requires L > 3")
        return intensity * length * math.exp(
            d * math.log(2.0) + 0.5 * d * math.log(math.pi) - log_gamma(0.5 * (d + 1))
        )
    if not length > math.pi:
        raise PreconditionViolated("offspring bound requires L > pi")
    return intensity * length * length * math.exp(
        0.5 * (d - 1) * math.log(math.pi) - log_gamma(0.5 * (d + 1)) + d * math.log(2.0)
    )


@dataclass(frozen=True)
class ConstructionGeometry:
    """Geometry of the block construction used for the upper-bound coupling.

    Boxes D^u sit on a two-dimensional sublattice with spacing L/4 and side
    L/(8 sqrt d); boundary faces are inset by 16 and carry anchor lattices
    of spacing 12.  The per-step success constants additionally need
    L > 200 sqrt(d); only the lattice counting enforces that here.
    """

    d: int
    length: float

    def __post_init__(self):
        _check_dim(self.d)
        if not self.length > 0.0:
            raise DomainError("L must be positive")

    @property
    def half_side(self) -> float:
        return self.length / (16.0 * math.sqrt(self.d))

    @property
    def spacing(self) -> float:
        return self.length / 4.0

    @property
    def face_inset(self) -> float:
        return 16.0

    @property
    def lattice_spacing(self) -> float:
        return 12.0

    def box_center(self, u) -> np.ndarray:
        center = np.zeros(self.d)
        center[0] = u[0] * self.spacing
        center[1] = u[1] * self.spacing
        return center

    def box_low(self, u) -> np.ndarray:
        return self.box_center(u) - self.half_side

    def box_high(self, u) -> np.ndarray:
        return self.box_center(u) + self.half_side

    def in_box(self, u, x, tol: float = 1e-9) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(np.abs(x - self.box_center(u)) <= self.half_side + tol))

    def right_face_center(self, u) -> np.ndarray:
        c = self.box_center(u)
        c[0] += self.half_side
        return c

    def on_inset_face(self, u, x, axis: int, sign: int, tol: float = 1e-6) -> bool:
        """Is ``x`` on the inset face of D^u with outward normal sign*e_axis?

        For small boxes (half side below the inset) the strictly inset face
        is empty; the margin is clamped at zero so the face center still
        qualifies, which is the geometry the connection measure is used with.
        """
        x = np.asarray(x, dtype=float)
        center = self.box_center(u)
        if abs((x[axis] - center[axis]) - sign * self.half_side) > tol:
            return False
        margin = max(self.half_side - self.face_inset, 0.0)
        others = [k for k in range(self.d) if k != axis]
        return bool(np.all(np.abs(x[others] - center[others]) <= margin + tol))

    def face_lattice_axis_counts(self, u, axis: int) -> list[int]:
        """Anchor-lattice point count along each free axis of the inset face
        of D^u with normal e_axis (absolute multiples of the lattice spacing)."""
        center = self.box_center(u)
        margin = self.half_side - self.face_inset
        counts = []
        for k in range(self.d):
            if k == axis:
                continue
            if margin < 0.0:
                counts.append(0)
                continue
            lo = math.ceil((center[k] - margin) / self.lattice_spacing - 1e-12)
            hi = math.floor((center[k] + margin) / self.lattice_spacing + 1e-12)
            counts.append(max(0, hi - lo + 1))
        return counts


def lattice_T_count(d: int, length: float, u=(0, 2)) -> int:
    """Exact number of anchor-lattice points on the inset top face of D^u.

    Enumerates the spacing-12 lattice inside the face (side L/(8 sqrt d) - 32);
    valid for L > 200 sqrt(d).
    """
    d = _check_dim(d)
    if not length > 200.0 * math.sqrt(d):
        raise PreconditionViolated("lattice count requires L > 200 sqrt(d)")
    geom = ConstructionGeometry(d, length)
    counts = geom.face_lattice_axis_counts(u, axis=1)
    total = 1
    for c in counts:
        total *= c
    return total


def lattice_T_count_bound(d: int, length: float) -> float:
    """Closed-form lower bound (L/(96 sqrt d) - 4)^{d-1} for the count."""
    d = _check_dim(d)
    return (length / (96.0 * math.sqrt(d)) - 4.0) ** (d - 1)


@dataclass(frozen=True)
class MCEstimate:
    """Monte Carlo estimate with its standard error."""

    value: float
    stderr: float
    trials: int
    hits: int


def _binomial_scaled(hits: int, trials: int, scale: float) -> MCEstimate:
    p = hits / trials
    se = scale * math.sqrt(max(p * (1.0 - p), 0.0) / trials)
    return MCEstimate(value=scale * p, stderr=se, trials=trials, hits=hits)


def mc_stick_hit_volume(
    d: int,
    length: float,
    rho: float,
    law: OrientationLaw,
    trials: int,
    seed: int,
    chunk: int = 1_000_000,
) -> MCEstimate:
    """Monte Carlo check of ``stick_hit_volume``.

    Samples orientations from ``law`` and centers uniformly in a box aligned
    with each orientation (a Householder frame), which tightly contains all
    centers whose segment can reach the ball; the estimate is box volume
    times hit fraction.
    """
    d = _check_dim(d)
    if trials < 1:
        raise InsufficientTrials("need at least one trial")
    if rho <= 0.0 or length <= 0.0:
        raise DomainError("need positive rho and length")
    rng = substream(seed, _STREAM_MEASURE_MC, 1)
    half_t = 0.5 * length + rho
    box_volume = (2.0 * half_t) * (2.0 * rho) ** (d - 1)
    hits = 0
    remaining = trials
    while remaining > 0:
        n = min(chunk, remaining)
        remaining -= n
        p = law.sample_directions(rng, d, n)
        local = rng.uniform(-rho, rho, size=(n, d))
        local[:, 0] = rng.uniform(-half_t, half_t, size=n)
        # reflect e1 onto p: x = w - 2 v <v,w>/<v,v> with v = e1 - p
        v = -p.copy()
        v[:, 0] += 1.0
        vv = np.einsum("ij,ij->i", v, v)
        vw = np.einsum("ij,ij->i", v, local)
        scale = np.where(vv > 1e-24, 2.0 * vw / np.where(vv > 1e-24, vv, 1.0), 0.0)
        x = local - scale[:, None] * v
        hit = segments_hit_ball(x, p, np.full(n, 0.5 * length), np.zeros(d), rho)
        hits += int(hit.sum())
    return _binomial_scaled(hits, trials, box_volume)


def mc_cap_hit_probability(
    d: int, rho: float, r: float, trials: int, seed: int
) -> MCEstimate:
    """Direction Monte Carlo check of ``cap_hit_probability_exact``: place a
    point at distance r, draw uniform orientations, and test the actual
    segment-ball hit with a segment long enough to satisfy the reach
    condition."""
    d = _check_dim(d)
    if not (0.0 < rho < r):
        raise DomainError("need 0 < rho < r")
    if trials < 1:
        raise InsufficientTrials("need at least one trial")
    rng = substream(seed, _STREAM_MEASURE_MC, 2)
    length = 2.0 * (r + rho + 1.0)
    x = np.zeros(d)
    x[0] = r
    from .sampling import Uniform

    p = Uniform().sample_directions(rng, d, trials)
    centers = np.broadcast_to(x, (trials, d))
    hit = segments_hit_ball(centers, p, np.full(trials, 0.5 * length), np.zeros(d), rho)
    return _binomial_scaled(int(hit.sum()), trials, 1.0)


def mc_two_ball_measure(
    d: int,
    length: float,
    gamma,
    zeta,
    law: OrientationLaw,
    trials: int,
    seed: int,
    intensity: float = 1.0,
    chunk: int = 1_000_000,
) -> MCEstimate:
    """Monte Carlo estimate of the measure of segments centered in the middle
    construction box whose segment connects B(gamma, 2) and B(zeta, 2).

    Geometry preconditions (the two-ball lemma): gamma in D^{(-2,0)}, zeta on
    the inset right face of D^o, and L > 32.  Centers are sampled uniformly
    in the full box D^{(-1,0)}; the estimate is intensity * Vol(D) * hit
    fraction, to be compared against intensity * delta * c_d * L^{2-d}.
    """
    d = _check_dim(d)
    if trials < 1:
        raise InsufficientTrials("need at least one trial")
    if not length > 32.0:
        raise PreconditionViolated("two-ball measure requires L > 32")
    if isinstance(law, Rigid) or getattr(law, "density_floor", None) is None:
        raise PreconditionViolated("law must have a positive density floor")
    geom = ConstructionGeometry(d, length)
    gamma = np.asarray(gamma, dtype=float)
    zeta = np.asarray(zeta, dtype=float)
    if not geom.in_box((-2, 0), gamma):
        raise PreconditionViolated("gamma must lie in the box D^(-2,0)")
    if not geom.on_inset_face((0, 0), zeta, axis=0, sign=+1):
        raise PreconditionViolated("zeta must lie on the inset right face of D^o")
    low = geom.box_low((-1, 0))
    high = geom.box_high((-1, 0))
    volume = float(np.prod(high - low))
    rng = substream(seed, _STREAM_MEASURE_MC, 3)
    hits = 0
    remaining = trials
    halves = 0.5 * length
    while remaining > 0:
        n = min(chunk, remaining)
        remaining -= n
        x = rng.uniform(low, high, size=(n, d))
        p = law.sample_directions(rng, d, n)
        h = np.full(n, halves)
        hit = segments_hit_ball(x, p, h, gamma, 2.0)
        hit &= segments_hit_ball(x, p, h, zeta, 2.0)
        hits += int(hit.sum())
    return _binomial_scaled(hits, trials, intensity * volume)


def two_ball_lower_bound(d: int, length: float, delta: float, intensity: float = 1.0) -> float:
    """The two-ball lemma lower bound intensity * delta * c_d * L^{2-d}."""
    d = _check_dim(d)
    return intensity * delta * c_d(d) * float(length) ** (2 - d)
