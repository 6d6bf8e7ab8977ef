"""Synthetic data generators and r-sample corruption attacks.

Corrupted indices are the first ``c`` entries of the targeted sample unless
``random_indices=True``, in which case they are a seeded uniform subset.
Half/half attacks give the first ``ceil(c / 2)`` corrupted pairs the first
branch.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from robustkern import rng as rngmod
from robustkern.errors import ConfigError
from robustkern.statistics import PairedData, TwoSampleData


@dataclass(frozen=True)
class GaussianIID:
    """Each coordinate i.i.d. N(mean, std^2)."""

    mean: float = 0.0
    std: float = 1.0
    dim: int = 1

    def __post_init__(self):
        if not self.std > 0:
            raise ConfigError(f"std must be positive, got {self.std!r}")
        if int(self.dim) != self.dim or self.dim < 1:
            raise ConfigError(f"dim must be a positive integer, got {self.dim!r}")

    def sample(self, gen: np.random.Generator, n: int) -> np.ndarray:
        return gen.normal(self.mean, self.std, size=(n, int(self.dim)))


@dataclass(frozen=True)
class GeometricIID:
    """Each coordinate i.i.d. geometric on {0, 1, 2, ...} with success probability p."""

    p: float = 0.5
    dim: int = 1

    def __post_init__(self):
        if not 0 < self.p < 1:
            raise ConfigError(f"p must lie in (0, 1), got {self.p!r}")
        if int(self.dim) != self.dim or self.dim < 1:
            raise ConfigError(f"dim must be a positive integer, got {self.dim!r}")

    def sample(self, gen: np.random.Generator, n: int) -> np.ndarray:
        # numpy's geometric counts trials (support starts at 1).
        return (gen.geometric(self.p, size=(n, int(self.dim))) - 1).astype(float)


GeneratorSpec = GaussianIID | GeometricIID


def generate(spec: GeneratorSpec, n: int, seed: int) -> np.ndarray:
    """``n`` i.i.d. vectors from ``spec`` as an (n, dim) array."""
    if n < 1:
        raise ConfigError(f"n must be >= 1, got {n}")
    return spec.sample(rngmod.stream(seed, rngmod.DATA), n)


class Target(str, Enum):
    FIRST_SAMPLE = "first_sample"
    SECOND_SAMPLE = "second_sample"
    PAIRS = "pairs"


@dataclass(frozen=True)
class ReplaceWithGenerator:
    """Replace ``count`` entries of ``target`` by fresh draws from ``gen``.

    With ``target=PAIRS`` both coordinates of each corrupted pair are
    redrawn independently from ``gen``.
    """

    gen: GeneratorSpec
    target: Target = Target.FIRST_SAMPLE
    count: int = 0
    random_indices: bool = False

    def __post_init__(self):
        object.__setattr__(self, "target", Target(self.target))


class CouplingRule(str, Enum):
    # (X, X + e) with X ~ Gaussian(s * center, std, dim), s = +1 then -1.
    GAUSSIAN_MIXTURE = "gaussian_mixture"
    # (X + s, X + s + e) with X ~ Geometric(p, dim), s = 0 then shift.
    GEOMETRIC_SHIFT = "geometric_shift"


@dataclass(frozen=True)
class PairCoupling:
    """Replace ``count`` pairs by strongly dependent pairs (independence attacks)."""

    rule: CouplingRule = CouplingRule.GAUSSIAN_MIXTURE
    dim: int = 50
    count: int = 0
    center: float = 1000.0
    std: float = 0.1
    p: float = 0.05
    shift: float = 5.0
    noise_std: float = 0.1
    random_indices: bool = False

    def __post_init__(self):
        object.__setattr__(self, "rule", CouplingRule(self.rule))

    def pairs(self, gen: np.random.Generator, c: int) -> tuple[np.ndarray, np.ndarray]:
        first = -(-c // 2)
        noise = gen.normal(0.0, self.noise_std, size=(c, self.dim))
        if self.rule is CouplingRule.GAUSSIAN_MIXTURE:
            signs = np.where(np.arange(c) < first, 1.0, -1.0)[:, None]
            x = gen.normal(0.0, self.std, size=(c, self.dim)) + signs * self.center
            return x, x + noise
        shifts = np.where(np.arange(c) < first, 0.0, self.shift)[:, None]
        x = (gen.geometric(self.p, size=(c, self.dim)) - 1).astype(float) + shifts
        return x, x + noise


AttackSpec = ReplaceWithGenerator | PairCoupling


def _indices(gen: np.random.Generator, size: int, c: int, random_indices: bool) -> np.ndarray:
    if random_indices:
        return np.sort(gen.choice(size, size=c, replace=False))
    return np.arange(c)


def apply_attack(data, attack: AttackSpec, seed: int):
    """Return a copy of ``data`` with ``attack.count`` entries corrupted."""
    c = int(attack.count)
    gen = rngmod.stream(seed, rngmod.ATTACK)
    if isinstance(attack, PairCoupling):
        if not isinstance(data, PairedData):
            raise ConfigError("pair-coupling attacks apply to paired data")
        if not 0 <= c <= data.n:
            raise ConfigError(f"attack count {c} outside [0, {data.n}]")
        if data.y.shape[1] != attack.dim or data.z.shape[1] != attack.dim:
            raise ConfigError(f"attack dim {attack.dim} does not match data dims")
        y, z = data.y.copy(), data.z.copy()
        if c:
            idx = _indices(gen, data.n, c, attack.random_indices)
            y[idx], z[idx] = attack.pairs(gen, c)
        return PairedData(y, z)

    target = attack.target
    if isinstance(data, TwoSampleData):
        if target is Target.PAIRS:
            raise ConfigError("target 'pairs' needs paired data")
        y, z = data.y.copy(), data.z.copy()
        arr = y if target is Target.FIRST_SAMPLE else z
        if not 0 <= c <= len(arr):
            raise ConfigError(f"attack count {c} outside [0, {len(arr)}]")
        if c:
            idx = _indices(gen, len(arr), c, attack.random_indices)
            new = attack.gen.sample(gen, c)
            if new.shape[1] != arr.shape[1]:
                raise ConfigError(f"generator dim {new.shape[1]} does not match data dim {arr.shape[1]}")
            arr[idx] = new
        return TwoSampleData(y, z)

    if not isinstance(data, PairedData):
        raise ConfigError(f"unsupported data type {type(data).__name__}")
    if not 0 <= c <= data.n:
        raise ConfigError(f"attack count {c} outside [0, {data.n}]")
    y, z = data.y.copy(), data.z.copy()
    if c:
        idx = _indices(gen, data.n, c, attack.random_indices)
        if target in (Target.FIRST_SAMPLE, Target.PAIRS):
            y[idx] = attack.gen.sample(gen, c)
        if target in (Target.SECOND_SAMPLE, Target.PAIRS):
            z[idx] = attack.gen.sample(gen, c)
    return PairedData(y, z)


def hamming_distance(a, b) -> int:
    """Number of pooled entries (rows, or pairs for paired data) that differ."""
    if isinstance(a, TwoSampleData):
        pa, pb = a.pooled, b.pooled
        return int(np.any(pa != pb, axis=1).sum())
    return int((np.any(a.y != b.y, axis=1) | np.any(a.z != b.z, axis=1)).sum())
