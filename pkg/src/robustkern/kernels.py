"""Bounded translation-invariant kernels and Gram matrices.

The Gaussian kernel is parameterised as ``exp(-||x - y||_2^2 / (2 h^2))`` and
the Laplace kernel as ``exp(-||x - y||_1 / h)``, with bandwidth ``h``. Both
satisfy ``0 < k(x, y) <= k(x, x) = 1``, so their declared bound is 1.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

import numpy as np
from scipy.spatial.distance import cdist, pdist

from robustkern.errors import ConfigError, DataError


class KernelFamily(str, Enum):
    GAUSSIAN = "gaussian"
    LAPLACE = "laplace"


_NORMS = {KernelFamily.GAUSSIAN: "L2", KernelFamily.LAPLACE: "L1"}


@dataclass(frozen=True)
class KernelSpec:
    """A bounded kernel with its everywhere-bound ``bound``.

    ``bandwidth=None`` means the median heuristic; call :meth:`resolve` with the
    observed data before evaluating.
    """

    family: KernelFamily = KernelFamily.GAUSSIAN
    bandwidth: float | None = None
    bound: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "family", KernelFamily(self.family))
        if self.bandwidth is not None:
            bw = float(self.bandwidth)
            if not np.isfinite(bw) or bw <= 0:
                raise ConfigError(f"kernel bandwidth must be positive, got {self.bandwidth!r}")
            object.__setattr__(self, "bandwidth", bw)
        if not self.bound > 0:
            raise ConfigError(f"kernel bound must be positive, got {self.bound!r}")
        if self.family in _NORMS and self.bound != 1.0:
            raise ConfigError(f"{self.family.value} kernel has bound 1, got {self.bound!r}")

    @property
    def norm(self) -> str:
        return _NORMS[self.family]

    @property
    def is_resolved(self) -> bool:
        return self.bandwidth is not None

    def resolve(self, points) -> KernelSpec:
        """Fix the bandwidth by the median heuristic on ``points`` if it is unset."""
        if self.is_resolved:
            return self
        return replace(self, bandwidth=median_heuristic_bandwidth(points, self.norm))


def _as_points(a, name: str) -> np.ndarray:
    arr = np.asarray(a, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise DataError(f"{name} must be a list of vectors, got array of shape {arr.shape}")
    return arr


def _check_resolved(spec: KernelSpec) -> float:
    if spec.bandwidth is None:
        raise ConfigError("kernel bandwidth is unresolved; call KernelSpec.resolve(data) first")
    return spec.bandwidth


def eval_kernel(spec: KernelSpec, x, y) -> float:
    """Evaluate ``k(x, y)`` for a single pair of vectors."""
    bw = _check_resolved(spec)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if x.shape != y.shape:
        raise DataError(f"dimension mismatch: {x.shape} vs {y.shape}")
    diff = x - y
    if spec.family is KernelFamily.GAUSSIAN:
        return float(np.exp(-np.dot(diff, diff) / (2.0 * bw * bw)))
    return float(np.exp(-np.abs(diff).sum() / bw))


def gram_matrix(spec: KernelSpec, A, B=None) -> np.ndarray:
    """Kernel matrix with entries ``k(A[i], B[j])``; ``B=None`` means ``B = A``."""
    bw = _check_resolved(spec)
    A = _as_points(A, "A")
    B = A if B is None else _as_points(B, "B")
    if len(A) == 0 or len(B) == 0:
        raise DataError("gram_matrix needs non-empty point lists")
    if A.shape[1] != B.shape[1]:
        raise DataError(f"dimension mismatch: {A.shape[1]} vs {B.shape[1]}")
    if spec.family is KernelFamily.GAUSSIAN:
        G = np.exp(cdist(A, B, "sqeuclidean") / (-2.0 * bw * bw))
    else:
        G = np.exp(cdist(A, B, "cityblock") / -bw)
    if B is A:
        # cdist can leave tiny asymmetries; the diagonal is exactly k(x, x) = 1.
        G = np.triu(G, 1)
        G = G + G.T
        np.fill_diagonal(G, spec.bound)
    return G


def median_heuristic_bandwidth(points, norm: str = "L2") -> float:
    """Median of the pairwise ``norm`` distances over distinct index pairs."""
    pts = _as_points(points, "points")
    if len(pts) < 2:
        raise DataError("median heuristic needs at least 2 points")
    metric = {"L2": "euclidean", "L1": "cityblock"}.get(norm)
    if metric is None:
        raise ConfigError(f"unknown norm {norm!r}; expected 'L2' or 'L1'")
    med = float(np.median(pdist(pts, metric)))
    if not med > 0:
        raise DataError(
            "median pairwise distance is zero (data too degenerate); supply an explicit bandwidth"
        )
    return med
