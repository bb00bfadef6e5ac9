"""Seeded sampling of Poisson stick configurations.

A configuration is a Poisson number of stick centers dropped uniformly in a
box, with orientations drawn independently from an orientation law.  All
randomness flows through PCG64 substreams derived from an explicit master
seed (see :mod:`stickperc.rng`), so identical inputs reproduce identical
configurations byte for byte, independent of worker count.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import CapacityExceeded, DomainError, RejectionStall
from .rng import substream

_STREAM_CONFIG = 0x5EED
_MAX_EXPECTED_COUNT = 1e9
_REJECTION_LIMIT = 1_000_000

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class Uniform:
    """Isotropic orientations: the normalized Hausdorff measure on the sphere."""

    tag: str = field(default="uniform", init=False)
    density_floor: float = field(default=1.0, init=False)

    def sample_directions(self, rng: np.random.Generator, d: int, n: int) -> np.ndarray:
        z = rng.standard_normal((n, d))
        norms = np.linalg.norm(z, axis=1)
        while np.any(norms < 1e-12):  # pragma: no cover - probability ~0
            bad = norms < 1e-12
            z[bad] = rng.standard_normal((int(bad.sum()), d))
            norms = np.linalg.norm(z, axis=1)
        return z / norms[:, None]


@dataclass(frozen=True)
class Rigid:
    """All sticks share one fixed axis (point mass orientation law)."""

    axis: np.ndarray
    tag: str = field(default="rigid", init=False)
    density_floor: None = field(default=None, init=False)

    def __post_init__(self):
        axis = np.asarray(self.axis, dtype=float)
        n = float(np.linalg.norm(axis))
        if n == 0.0 or not np.all(np.isfinite(axis)):
            raise DomainError("rigid axis must be a finite nonzero vector")
        object.__setattr__(self, "axis", axis / n)

    def sample_directions(self, rng: np.random.Generator, d: int, n: int) -> np.ndarray:
        if self.axis.shape[0] != d:
            raise DomainError("rigid axis dimension does not match d")
        return np.broadcast_to(self.axis, (n, d)).copy()


@dataclass(frozen=True)
class BoundedDensity:
    """Orientation law with density ``phi`` w.r.t. the uniform law.

    ``phi`` must be vectorized over an (n, d) array of unit vectors and
    satisfy delta <= phi(p) <= upper with unit integral; sampling is by
    rejection from the uniform proposal with acceptance phi(p)/upper.
    """

    phi: Callable[[np.ndarray], np.ndarray]
    delta: float
    upper: float
    tag: str = field(default="density", init=False)

    def __post_init__(self):
        if not (0.0 < self.delta <= self.upper):
            raise DomainError("need 0 < delta <= upper density bound")

    @property
    def density_floor(self) -> float:
        return self.delta

    def sample_directions(self, rng: np.random.Generator, d: int, n: int) -> np.ndarray:
        out = np.empty((n, d))
        filled = 0
        stalled = 0
        proposal = Uniform()
        while filled < n:
            batch = max(1024, 2 * (n - filled))
            cand = proposal.sample_directions(rng, d, batch)
            accept_p = np.asarray(self.phi(cand), dtype=float) / self.upper
            if np.any(accept_p > 1.0 + 1e-9) or np.any(accept_p < -1e-12):
                raise DomainError("phi(p) escapes its declared [delta, upper] bounds")
            keep = rng.random(batch) < accept_p
            k = int(keep.sum())
            if k == 0:
                stalled += batch
                if stalled >= _REJECTION_LIMIT:
                    raise RejectionStall(
                        f"{stalled} consecutive rejections; upper bound too loose"
                    )
                continue
            stalled = 0
            take = min(k, n - filled)
            out[filled : filled + take] = cand[keep][:take]
            filled += take
        return out


OrientationLaw = Uniform | Rigid | BoundedDensity


@dataclass(frozen=True)
class BoxRegion:
    """Axis-aligned box given by per-axis low/high corners."""

    low: np.ndarray
    high: np.ndarray

    def __post_init__(self):
        low = np.asarray(self.low, dtype=float)
        high = np.asarray(self.high, dtype=float)
        if low.shape != high.shape or low.ndim != 1:
            raise DomainError("box corners must be 1-d arrays of equal shape")
        if not np.all(low < high):
            raise DomainError("box must satisfy low < high on every axis")
        object.__setattr__(self, "low", low)
        object.__setattr__(self, "high", high)

    @property
    def dimension(self) -> int:
        return self.low.shape[0]

    @property
    def volume(self) -> float:
        return float(np.prod(self.high - self.low))

    def contains(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return np.all((pts >= self.low) & (pts <= self.high), axis=1)

    @staticmethod
    def cube(d: int, side: float) -> "BoxRegion":
        return BoxRegion(np.zeros(d), np.full(d, float(side)))

    def grown(self, pad: float) -> "BoxRegion":
        return BoxRegion(self.low - pad, self.high + pad)


def poisson_count(mean: float, stream: np.random.Generator) -> int:
    """One exact Poisson(mean) draw from the given stream.

    Delegates to the generator's Poisson sampler (exact inversion for small
    means, transformed rejection for large ones); deterministic given the
    stream state.
    """
    if not (mean >= 0.0) or not np.isfinite(mean):
        raise DomainError("poisson mean must be finite and nonnegative")
    if mean > _MAX_EXPECTED_COUNT:
        raise CapacityExceeded(f"expected count {mean:.3g} exceeds guard of 1e9")
    return int(stream.poisson(mean))


def sample_direction(law: OrientationLaw, d: int, stream: np.random.Generator) -> np.ndarray:
    """Draw a single unit orientation from ``law``."""
    return law.sample_directions(stream, d, 1)[0]


@dataclass(frozen=True)
class Configuration:
    """Immutable sampled stick configuration.

    ``box`` is the sampling box (every center lies inside it).  When the
    configuration was sampled for a percolation window, ``window`` holds the
    observation window, which the sampling box strictly contains.
    """

    d: int
    length: float
    intensity: float
    box: BoxRegion
    centers: np.ndarray
    dirs: np.ndarray
    seed: int
    window: BoxRegion | None = None

    @property
    def count(self) -> int:
        return self.centers.shape[0]

    @property
    def half(self) -> float:
        return 0.5 * self.length

    @property
    def observation_window(self) -> BoxRegion:
        return self.window if self.window is not None else self.box

    def to_json(self) -> str:
        doc = {
            "schema_version": SCHEMA_VERSION,
            "kind": "stickperc.configuration",
            "d": self.d,
            "length": self.length,
            "intensity": self.intensity,
            "seed": self.seed,
            "box": {"low": self.box.low.tolist(), "high": self.box.high.tolist()},
            "window": None
            if self.window is None
            else {"low": self.window.low.tolist(), "high": self.window.high.tolist()},
            "count": self.count,
            "centers": self.centers.ravel().tolist(),
            "dirs": self.dirs.ravel().tolist(),
        }
        return json.dumps(doc, sort_keys=True)

    @staticmethod
    def from_json(text: str) -> "Configuration":
        doc = json.loads(text)
        if doc.get("kind") != "stickperc.configuration":
            raise DomainError("not a configuration document")
        if doc.get("schema_version") != SCHEMA_VERSION:
            raise DomainError("unsupported configuration schema version")
        d = int(doc["d"])
        n = int(doc["count"])
        window = doc["window"]
        return Configuration(
            d=d,
            length=float(doc["length"]),
            intensity=float(doc["intensity"]),
            box=BoxRegion(np.array(doc["box"]["low"]), np.array(doc["box"]["high"])),
            centers=np.array(doc["centers"], dtype=float).reshape(n, d),
            dirs=np.array(doc["dirs"], dtype=float).reshape(n, d),
            seed=int(doc["seed"]),
            window=None
            if window is None
            else BoxRegion(np.array(window["low"]), np.array(window["high"])),
        )


def sample_configuration(
    d: int,
    length: float,
    intensity: float,
    law: OrientationLaw,
    box: BoxRegion,
    seed: int,
    window: BoxRegion | None = None,
) -> Configuration:
    """Sample one Poisson stick configuration in ``box``."""
    if intensity <= 0.0:
        raise DomainError("intensity must be positive")
    if box.dimension != d:
        raise DomainError("box dimension does not match d")
    rng = substream(seed, _STREAM_CONFIG)
    mean = intensity * box.volume
    n = poisson_count(mean, rng)
    centers = rng.uniform(box.low, box.high, size=(n, d))
    dirs = law.sample_directions(rng, d, n)
    return Configuration(
        d=d,
        length=float(length),
        intensity=float(intensity),
        box=box,
        centers=centers,
        dirs=dirs,
        seed=int(seed),
        window=window,
    )


def percolation_padding(length: float) -> float:
    """Sampling box growth used for window runs: sticks centered outside the
    window can still intersect it, so grow by half a stick plus the radius."""
    return 0.5 * length + 1.0


def sample_window_configuration(
    d: int,
    length: float,
    intensity: float,
    law: OrientationLaw,
    side: float,
    seed: int,
) -> Configuration:
    """Sample in the padded box around the observation window [0, side]^d."""
    window = BoxRegion.cube(d, side)
    box = window.grown(percolation_padding(length))
    return sample_configuration(d, length, intensity, law, box, seed, window=window)
