"""Permutation engine and the classical, DC and DP permutation tests.

All three procedures share the same permutation draws for a given seed:
permutations come from the ``PERMUTATIONS`` sub-stream of ``config.seed``
and Laplace noise from the ``NOISE`` sub-stream, so adding noise never
changes which permutations are used.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, field, replace
from enum import Enum

import numpy as np

from robustkern import rng as rngmod
from robustkern.errors import ConfigError, PermutationCountWarning, PowerlessTestWarning
from robustkern.kernels import gram_matrix
from robustkern.statistics import (
    HSIC,
    MMD,
    PairedData,
    StatisticKind,
    TwoSampleData,
    check_data_kind,
    data_sensitivity,
    hsic_from_gram,
    mmd_from_gram,
)


class PermutationScheme(str, Enum):
    FULL_POOLED = "full_pooled"
    PAIR_BREAKING = "pair_breaking"


class Procedure(str, Enum):
    CLASSICAL = "classical"
    DC = "dc"
    DP = "dp"


def default_scheme(kind: StatisticKind) -> PermutationScheme:
    return PermutationScheme.FULL_POOLED if isinstance(kind, MMD) else PermutationScheme.PAIR_BREAKING


@dataclass(frozen=True)
class TestConfig:
    """Level, corruption budget, permutation count, seed and DP privacy.

    ``epsilon=None`` with ``r > 0`` selects the default privacy
    ``max(log(e/alpha), log(e/beta)) / r``; ``beta`` defaults to ``alpha``.
    """

    __test__ = False

    alpha: float = 0.05
    r: int = 0
    num_permutations: int = 500
    seed: int = 0
    epsilon: float | None = None
    beta: float | None = None

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise ConfigError(f"alpha must lie in (0, 1), got {self.alpha!r}")
        if self.beta is not None and not 0 < self.beta < 1:
            raise ConfigError(f"beta must lie in (0, 1), got {self.beta!r}")
        if int(self.r) != self.r or self.r < 0:
            raise ConfigError(f"r must be a nonnegative integer, got {self.r!r}")
        if int(self.num_permutations) != self.num_permutations or self.num_permutations < 1:
            raise ConfigError(f"num_permutations must be a positive integer, got {self.num_permutations!r}")
        if not 0 <= int(self.seed) < 2**64:
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        if self.epsilon is not None and not (self.epsilon > 0 and math.isfinite(self.epsilon)):
            raise ConfigError(f"epsilon must be positive and finite, got {self.epsilon!r}")
        object.__setattr__(self, "r", int(self.r))
        object.__setattr__(self, "num_permutations", int(self.num_permutations))
        object.__setattr__(self, "seed", int(self.seed))

    def resolved_epsilon(self) -> float:
        if self.epsilon is not None:
            return float(self.epsilon)
        if self.r == 0:
            raise ConfigError("DP test with r = 0 needs an explicit epsilon (the default divides by r)")
        return default_epsilon(self.alpha, self.r, self.beta)


def default_epsilon(alpha: float, r: int, beta: float | None = None) -> float:
    beta = alpha if beta is None else beta
    return max(math.log(math.e / alpha), math.log(math.e / beta)) / r


def adjusted_level(alpha: float, r: int, epsilon: float) -> float:
    """Group-privacy level ``alpha * exp(-r * epsilon)``."""
    return alpha * math.exp(-r * epsilon)


@dataclass(frozen=True)
class TestReport:
    """Outcome of one test run. Immutable; round-trips through :meth:`to_dict`."""

    __test__ = False

    procedure: str
    statistic_observed: float
    permuted_statistics: tuple[float, ...]
    threshold: float
    reject: bool
    sensitivity: float
    adjusted_level: float
    noise_values: tuple[float, ...] | None
    seed: int
    alpha: float
    r: int
    epsilon: float | None = None
    bandwidths: tuple[float, ...] = field(default=())

    def to_dict(self) -> dict:
        d = asdict(self)
        d["permuted_statistics"] = list(self.permuted_statistics)
        d["noise_values"] = None if self.noise_values is None else list(self.noise_values)
        d["bandwidths"] = list(self.bandwidths)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> TestReport:
        d = dict(d)
        d["permuted_statistics"] = tuple(float(v) for v in d["permuted_statistics"])
        if d.get("noise_values") is not None:
            d["noise_values"] = tuple(float(v) for v in d["noise_values"])
        d["bandwidths"] = tuple(float(v) for v in d.get("bandwidths", ()))
        return cls(**d)


def sample_permutations(seed: int, count: int, size: int) -> np.ndarray:
    """``count`` i.i.d. uniform permutations of ``range(size)``, one per row.

    Each row is a Fisher-Yates shuffle drawn from the permutation sub-stream
    of ``seed``. The identity is never included; callers prepend it.
    """
    if count < 1:
        raise ConfigError(f"need at least one permutation, got {count}")
    if size < 2:
        raise ConfigError(f"permutation size must be >= 2, got {size}")
    gen = rngmod.stream(seed, rngmod.PERMUTATIONS)
    return np.stack([gen.permutation(size) for _ in range(count)])


def empirical_quantile(values, level: float) -> float:
    """Smallest t with at least ``level`` of the values <= t.

    This is order statistic ``k = ceil(level * len(values))`` (1-based).
    """
    v = np.sort(np.asarray(values, dtype=float))
    if v.size == 0:
        raise ConfigError("quantile of an empty list")
    # Guard ceil against representation error, e.g. 0.95 * 20 = 19.000000000000004.
    k = math.ceil(level * v.size - 1e-9)
    k = min(max(k, 1), v.size)
    return float(v[k - 1])


def laplace_from_uniform(u):
    """Inverse CDF of Laplace(0, 1) for ``u`` uniform on (-1/2, 1/2)."""
    u = np.asarray(u, dtype=float)
    return -np.sign(u) * np.log1p(-2.0 * np.abs(u))


def laplace_noise(gen: np.random.Generator, count: int) -> np.ndarray:
    """``count`` i.i.d. Laplace(0, 1) draws by inverse-CDF sampling."""
    if count < 1:
        raise ConfigError(f"need at least one noise draw, got {count}")
    # random() is on [0, 1); the half-ulp shift keeps u strictly inside (-1/2, 1/2).
    u = gen.random(count) - 0.5 + 2.0**-54
    return laplace_from_uniform(u)


def check_permutation_count(procedure: Procedure, config: TestConfig, epsilon: float | None = None) -> None:
    """Warn when B is below the sufficient permutation count of the power results."""
    B = config.num_permutations
    alpha = config.alpha
    beta = alpha if config.beta is None else config.beta
    if procedure is Procedure.DP:
        shrink = math.exp(-config.r * epsilon)
        need = 6.0 / (alpha * shrink) * math.log(2.0 / (beta * shrink))
    else:
        need = 3.0 / alpha**2 * (math.log(8.0 / beta) + alpha * (1 - alpha))
    if B < need:
        warnings.warn(
            f"{procedure.value} test: B={B} is below the sufficient count {math.ceil(need)} "
            "for the power guarantee",
            PermutationCountWarning,
            stacklevel=3,
        )


def _check_budget(kind: StatisticKind, data, r: int) -> None:
    limit = min(data.n, data.m) if isinstance(kind, MMD) else data.n
    if r > limit:
        raise ConfigError(f"corruption budget r={r} exceeds the admissible maximum {limit}")


def _check_scheme(kind: StatisticKind, scheme: PermutationScheme | None) -> PermutationScheme:
    expected = default_scheme(kind)
    if scheme is None:
        return expected
    scheme = PermutationScheme(scheme)
    if scheme is not expected:
        raise ConfigError(f"{kind.name.upper()} requires the {expected.value} scheme, got {scheme.value}")
    return scheme


def _bandwidths(kind: StatisticKind) -> tuple[float, ...]:
    if isinstance(kind, MMD):
        return (kind.kernel.bandwidth,)
    return (kind.kernel_y.bandwidth, kind.kernel_z.bandwidth)


def _size(kind: StatisticKind, data) -> int:
    return data.n + data.m if isinstance(kind, MMD) else data.n


def _check_stat_input(kind: StatisticKind, data, scheme) -> StatisticKind:
    check_data_kind(kind, data)
    _check_scheme(kind, scheme)
    return kind.resolve(data)


def permutation_statistics(data, kind: StatisticKind, seed: int, num_permutations: int) -> np.ndarray:
    """``T_0, ..., T_B``: the statistic on the data and on B permuted copies."""
    kind = kind.resolve(data)
    perms = sample_permutations(seed, num_permutations, _size(kind, data))
    perms = np.vstack([np.arange(perms.shape[1]), perms])
    if isinstance(kind, MMD):
        G = gram_matrix(kind.kernel, data.pooled)
        return mmd_from_gram(G, data.n, perms)
    K = gram_matrix(kind.kernel_y, data.y)
    L = gram_matrix(kind.kernel_z, data.z)
    return hsic_from_gram(K, L, perms)


def _stats(data, kind, config, precomputed):
    if precomputed is not None:
        stats = np.asarray(precomputed, dtype=float)
        if stats.shape != (config.num_permutations + 1,):
            raise ConfigError(f"precomputed statistics must have length B+1={config.num_permutations + 1}")
        return stats
    return permutation_statistics(data, kind, config.seed, config.num_permutations)


def run_classical_test(
    data: TwoSampleData | PairedData,
    kind: StatisticKind,
    scheme: PermutationScheme | None = None,
    config: TestConfig = TestConfig(),
    *,
    precomputed=None,
) -> TestReport:
    """Plain permutation test: reject iff T_0 > (1 - alpha)-quantile of T_0..T_B."""
    if config.r != 0:
        raise ConfigError("classical test requires r = 0; use run_dc_test for r > 0")
    report = run_dc_test(data, kind, scheme, config, precomputed=precomputed)
    return replace(report, procedure=Procedure.CLASSICAL.value)


def run_dc_test(
    data: TwoSampleData | PairedData,
    kind: StatisticKind,
    scheme: PermutationScheme | None = None,
    config: TestConfig = TestConfig(),
    *,
    precomputed=None,
) -> TestReport:
    """Robust DC test: reject iff T_0 > q_{1-alpha}(T_0..T_B) + 2 r Delta_T.

    ``precomputed`` may carry T_0..T_B already computed for this data, kind
    and ``config.seed`` (the harness shares them across procedures).
    """
    kind = _check_stat_input(kind, data, scheme)
    _check_budget(kind, data, config.r)
    if config.r > 0:
        check_permutation_count(Procedure.DC, config)
    stats = _stats(data, kind, config, precomputed)
    delta = data_sensitivity(kind, data)
    q = empirical_quantile(stats, 1.0 - config.alpha)
    threshold = q + 2.0 * config.r * delta
    return TestReport(
        procedure=Procedure.DC.value,
        statistic_observed=float(stats[0]),
        permuted_statistics=tuple(float(s) for s in stats[1:]),
        threshold=float(threshold),
        reject=bool(stats[0] > threshold),
        sensitivity=delta,
        adjusted_level=config.alpha,
        noise_values=None,
        seed=config.seed,
        alpha=config.alpha,
        r=config.r,
        bandwidths=_bandwidths(kind),
    )


def run_dp_test(
    data: TwoSampleData | PairedData,
    kind: StatisticKind,
    scheme: PermutationScheme | None = None,
    config: TestConfig = TestConfig(),
    *,
    precomputed=None,
) -> TestReport:
    """Robust DP test.

    M_i = T_i + 2 zeta_i Delta_T / epsilon with zeta_i ~ Laplace(0, 1); reject
    iff M_0 > the (1 - alpha e^{-r epsilon})-quantile of M_0..M_B.
    """
    kind = _check_stat_input(kind, data, scheme)
    _check_budget(kind, data, config.r)
    eps = config.resolved_epsilon()
    level = adjusted_level(config.alpha, config.r, eps)
    B = config.num_permutations
    if level <= 1.0 / (B + 1):
        warnings.warn(
            f"adjusted level {level:.3g} <= 1/(B+1) = {1.0 / (B + 1):.3g}: "
            f"test is powerless at this B={B}",
            PowerlessTestWarning,
            stacklevel=2,
        )
    check_permutation_count(Procedure.DP, config, eps)
    stats = _stats(data, kind, config, precomputed)
    delta = data_sensitivity(kind, data)
    zeta = laplace_noise(rngmod.stream(config.seed, rngmod.NOISE), B + 1)
    noisy = stats + 2.0 * zeta * delta / eps
    threshold = empirical_quantile(noisy, 1.0 - level)
    return TestReport(
        procedure=Procedure.DP.value,
        statistic_observed=float(stats[0]),
        permuted_statistics=tuple(float(s) for s in stats[1:]),
        threshold=float(threshold),
        reject=bool(noisy[0] > threshold),
        sensitivity=delta,
        adjusted_level=level,
        noise_values=tuple(float(v) for v in zeta),
        seed=config.seed,
        alpha=config.alpha,
        r=config.r,
        epsilon=eps,
        bandwidths=_bandwidths(kind),
    )


RUNNERS = {
    Procedure.CLASSICAL: run_classical_test,
    Procedure.DC: run_dc_test,
    Procedure.DP: run_dp_test,
}


def run_test(procedure, data, kind, config, scheme=None, *, precomputed=None) -> TestReport:
    return RUNNERS[Procedure(procedure)](data, kind, scheme, config, precomputed=precomputed)
