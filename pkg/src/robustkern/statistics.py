"""Quadratic-time V-statistics for MMD and HSIC and their global sensitivities.

Both statistics are computed from Gram matrices:

* MMD^2 = (1/n^2) sum K_yy + (1/m^2) sum K_zz - (2/nm) sum K_yz. Under a
  permutation p of the pooled sample (Y_1..Y_n, Z_1..Z_m) this is v' G v
  with v[p] = w, w = (1/n, ..., 1/n, -1/m, ..., -1/m). Because sum(w) = 0,
  G may be replaced by its double-centred version HGH, which is exactly 0
  for constant kernels and keeps round-off small near the null.
* HSIC^2 = (1/n^2) sum_ij (HKH)_ij (HLH)_ij with H = I - 11'/n, which
  equals (1/n^2) tr(KHLH). Expanding HKH = K - r 1' - 1 r' + s 11' (row
  means r, grand mean s) recovers the two-, three- and four-index sums of
  the V-statistic term by term in O(n^2) time and memory. Re-pairing z by
  p maps HLH to (HLH)[p][:, p], since centring commutes with a joint
  relabelling.

Squares are clamped at 0 before the square root.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from robustkern.errors import ConfigError, DataError
from robustkern.kernels import KernelSpec, gram_matrix


def _points(a, name: str) -> np.ndarray:
    arr = np.asarray(a, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise DataError(f"{name} must be a 2-D array (samples x dims), got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DataError(f"{name} contains non-finite values")
    return arr


@dataclass(frozen=True, eq=False)
class TwoSampleData:
    """Samples ``y`` (n x d) from P and ``z`` (m x d) from Q."""

    y: np.ndarray
    z: np.ndarray

    def __post_init__(self):
        y = _points(self.y, "y")
        z = _points(self.z, "z")
        if len(y) < 2 or len(z) < 2:
            raise DataError(f"two-sample data needs n >= 2 and m >= 2, got n={len(y)}, m={len(z)}")
        if y.shape[1] != z.shape[1]:
            raise DataError(f"y and z dimensions differ: {y.shape[1]} vs {z.shape[1]}")
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "z", z)

    @property
    def n(self) -> int:
        return len(self.y)

    @property
    def m(self) -> int:
        return len(self.z)

    @property
    def pooled(self) -> np.ndarray:
        return np.concatenate([self.y, self.z])

    def permuted(self, perm) -> TwoSampleData:
        """Permute the pooled sequence and split it again after ``n`` entries."""
        pooled = self.pooled[np.asarray(perm)]
        return TwoSampleData(pooled[: self.n], pooled[self.n :])


@dataclass(frozen=True, eq=False)
class PairedData:
    """Paired observations ``(y[i], z[i])``; y is n x d_y and z is n x d_z."""

    y: np.ndarray
    z: np.ndarray

    def __post_init__(self):
        y = _points(self.y, "y")
        z = _points(self.z, "z")
        if len(y) != len(z):
            raise DataError(f"paired data needs equal lengths, got {len(y)} and {len(z)}")
        if len(y) < 2:
            raise DataError(f"paired data needs n >= 2, got n={len(y)}")
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "z", z)

    @property
    def n(self) -> int:
        return len(self.y)

    def permuted(self, perm) -> PairedData:
        """Keep ``y`` fixed and pair it with ``z[perm]``."""
        return PairedData(self.y, self.z[np.asarray(perm)])


@dataclass(frozen=True)
class MMD:
    """Two-sample statistic with kernel ``kernel``."""

    kernel: KernelSpec = KernelSpec()

    name = "mmd"

    def resolve(self, data: TwoSampleData) -> MMD:
        if self.kernel.is_resolved:
            return self
        return replace(self, kernel=self.kernel.resolve(data.pooled))

    def statistic(self, data: TwoSampleData) -> float:
        return mmd_stat(data, self.resolve(data).kernel)


@dataclass(frozen=True)
class HSIC:
    """Independence statistic with kernels ``kernel_y`` and ``kernel_z``."""

    kernel_y: KernelSpec = KernelSpec()
    kernel_z: KernelSpec = KernelSpec()

    name = "hsic"

    def resolve(self, data: PairedData) -> HSIC:
        if self.kernel_y.is_resolved and self.kernel_z.is_resolved:
            return self
        return replace(self, kernel_y=self.kernel_y.resolve(data.y), kernel_z=self.kernel_z.resolve(data.z))

    def statistic(self, data: PairedData) -> float:
        k = self.resolve(data)
        return hsic_stat(data, k.kernel_y, k.kernel_z)


StatisticKind = MMD | HSIC


def _clamped_sqrt(sq):
    return np.sqrt(np.maximum(sq, 0.0))


def mmd_weights(n: int, m: int) -> np.ndarray:
    return np.concatenate([np.full(n, 1.0 / n), np.full(m, -1.0 / m)])


def centered_gram(K: np.ndarray) -> np.ndarray:
    """HKH for H = I - 11'/n."""
    row = K.mean(axis=1)
    return K - row[:, None] - row[None, :] + K.mean()


def mmd_from_gram(G: np.ndarray, n: int, perms: np.ndarray | None = None) -> np.ndarray:
    """MMD of the pooled sample under each permutation (row of ``perms``)."""
    N = len(G)
    w = mmd_weights(n, N - n)
    if perms is None:
        perms = np.arange(N)[None, :]
    perms = np.atleast_2d(perms)
    V = np.empty(perms.shape)
    np.put_along_axis(V, perms, np.broadcast_to(w, perms.shape), axis=1)
    sq = np.einsum("bi,bi->b", V @ centered_gram(G), V)
    return _clamped_sqrt(sq)


def hsic_from_gram(K: np.ndarray, L: np.ndarray, perms: np.ndarray | None = None) -> np.ndarray:
    """HSIC with ``z`` re-paired by each permutation row."""
    n = len(K)
    Kc = centered_gram(K)
    Lc = centered_gram(L)
    if perms is None:
        perms = np.arange(n)[None, :]
    perms = np.atleast_2d(perms)
    sq = np.empty(len(perms))
    for b, p in enumerate(perms):
        sq[b] = np.sum(Kc * Lc.take(p, axis=0).take(p, axis=1))
    return _clamped_sqrt(sq / (n * n))


def mmd_stat(data: TwoSampleData, kernel: KernelSpec) -> float:
    """Plug-in (V-statistic) MMD between ``data.y`` and ``data.z``."""
    kyy = gram_matrix(kernel, data.y).mean()
    kzz = gram_matrix(kernel, data.z).mean()
    kyz = gram_matrix(kernel, data.y, data.z).mean()
    return float(_clamped_sqrt(kyy + kzz - 2.0 * kyz))


def hsic_stat(data: PairedData, kernel_y: KernelSpec, kernel_z: KernelSpec) -> float:
    """Plug-in (V-statistic) HSIC of the pairs in ``data``."""
    K = gram_matrix(kernel_y, data.y)
    L = gram_matrix(kernel_z, data.z)
    return float(hsic_from_gram(K, L)[0])


def sensitivity(kind: StatisticKind, n: int, m: int | None = None) -> float:
    """Closed-form global sensitivity bound of the statistic.

    MMD: sqrt(2K) / min(n, m).  HSIC: 4 sqrt(KL) (n - 1) / n^2.
    """
    if isinstance(kind, MMD):
        if m is None:
            raise ConfigError("MMD sensitivity needs both sample sizes n and m")
        if n < 2 or m < 2:
            raise ConfigError(f"MMD sensitivity needs n, m >= 2, got n={n}, m={m}")
        return float(np.sqrt(2.0 * kind.kernel.bound) / min(n, m))
    if isinstance(kind, HSIC):
        if m is not None:
            raise ConfigError("HSIC sensitivity takes a single sample size")
        if n < 2:
            raise ConfigError(f"HSIC sensitivity needs n >= 2, got n={n}")
        return float(4.0 * np.sqrt(kind.kernel_y.bound * kind.kernel_z.bound) * (n - 1) / n**2)
    raise ConfigError(f"unknown statistic kind {kind!r}")


def data_sensitivity(kind: StatisticKind, data) -> float:
    if isinstance(kind, MMD):
        return sensitivity(kind, data.n, data.m)
    return sensitivity(kind, data.n)


def check_data_kind(kind: StatisticKind, data) -> None:
    if isinstance(kind, MMD) and not isinstance(data, TwoSampleData):
        raise ConfigError("MMD needs TwoSampleData")
    if isinstance(kind, HSIC) and not isinstance(data, PairedData):
        raise ConfigError("HSIC needs PairedData")
