"""Brute-force reference implementations.

These are deliberately naive: explicit loops over the defining sums and
full enumeration of permutation groups. The literal statistics accumulate
in exact rational arithmetic so that algebraic zeros (identical samples,
constant kernels) come out as exactly 0. They guard against regressions in
the optimised code paths and back the ``verify`` CLI command. Size limits
are hard errors.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np

from robustkern.errors import ConfigError, DataError
from robustkern.kernels import eval_kernel
from robustkern.statistics import MMD, PairedData, TwoSampleData, check_data_kind
from robustkern.testing import PermutationScheme, _check_scheme

MAX_MMD_POOLED = 30
MAX_HSIC_N = 12
MAX_ENUMERATION = 8


def _kernel_table(kernel, a, b, exact=False):
    conv = Fraction if exact else float
    return [[conv(eval_kernel(kernel, x, y)) for y in b] for x in a]


def _clamped_sqrt(sq) -> float:
    return math.sqrt(max(float(sq), 0.0))


def mmd_literal(data: TwoSampleData, kernel) -> float:
    """The three double sums of the MMD V-statistic, by explicit loops."""
    n, m = data.n, data.m
    if n + m > MAX_MMD_POOLED:
        raise DataError(f"mmd_literal is limited to n+m <= {MAX_MMD_POOLED}, got {n + m}")
    yy = zz = yz = Fraction(0)
    for i in range(n):
        for j in range(n):
            yy += Fraction(eval_kernel(kernel, data.y[i], data.y[j]))
    for i in range(m):
        for j in range(m):
            zz += Fraction(eval_kernel(kernel, data.z[i], data.z[j]))
    for i in range(n):
        for j in range(m):
            yz += Fraction(eval_kernel(kernel, data.y[i], data.z[j]))
    return _clamped_sqrt(yy / n**2 + zz / m**2 - 2 * yz / (n * m))


def hsic_literal(data: PairedData, kernel_y, kernel_z) -> float:
    """The HSIC V-statistic by explicit two-, three- and four-index sums."""
    n = data.n
    if n > MAX_HSIC_N:
        raise DataError(f"hsic_literal is limited to n <= {MAX_HSIC_N}, got {n}")
    k = _kernel_table(kernel_y, data.y, data.y, exact=True)
    l = _kernel_table(kernel_z, data.z, data.z, exact=True)
    first = Fraction(0)
    for i in range(n):
        for j in range(n):
            first += k[i][j] * l[i][j]
    middle = Fraction(0)
    for i in range(n):
        for j1 in range(n):
            for j2 in range(n):
                middle += k[i][j1] * l[i][j2]
    last = Fraction(0)
    for i1 in range(n):
        for j1 in range(n):
            for i2 in range(n):
                for j2 in range(n):
                    last += k[i1][j1] * l[i2][j2]
    return _clamped_sqrt(first / n**2 - 2 * middle / n**3 + last / n**4)


def _mmd_table_sum(table, order, n) -> float:
    N = len(order)
    m = N - n
    yy = zz = yz = 0.0
    for a in range(N):
        for b in range(N):
            v = table[order[a]][order[b]]
            if a < n and b < n:
                yy += v
            elif a >= n and b >= n:
                zz += v
            elif a < n:
                yz += v
    return math.sqrt(max(yy / n**2 + zz / m**2 - 2.0 * yz / (n * m), 0.0))


def _hsic_table_sum(k, l, order) -> float:
    n = len(order)
    first = middle = 0.0
    for i in range(n):
        for j in range(n):
            first += k[i][j] * l[order[i]][order[j]]
    for i in range(n):
        for j1 in range(n):
            for j2 in range(n):
                middle += k[i][j1] * l[order[i]][order[j2]]
    # The four-index sum factorises into (sum k)(sum l) and is permutation invariant.
    last = sum(map(sum, k)) * sum(map(sum, l))
    return math.sqrt(max(first / n**2 - 2.0 * middle / n**3 + last / n**4, 0.0))


def exact_permutation_distribution(data, kind, scheme: PermutationScheme | None = None) -> list[float]:
    """Sorted statistic values over every permutation, enumerated lexicographically.

    FULL_POOLED enumerates all (n+m)! orderings of the pooled sample;
    PAIR_BREAKING all n! re-pairings of ``z``. Kernel values are tabulated
    once with ``eval_kernel`` and the defining sums re-evaluated per ordering.
    """
    check_data_kind(kind, data)
    _check_scheme(kind, scheme)
    kind = kind.resolve(data)
    if isinstance(kind, MMD):
        size = data.n + data.m
        if size > MAX_ENUMERATION:
            raise DataError(f"exact enumeration is limited to size <= {MAX_ENUMERATION}, got {size}")
        pooled = data.pooled
        table = _kernel_table(kind.kernel, pooled, pooled)
        values = [_mmd_table_sum(table, p, data.n) for p in itertools.permutations(range(size))]
    else:
        size = data.n
        if size > MAX_ENUMERATION:
            raise DataError(f"exact enumeration is limited to size <= {MAX_ENUMERATION}, got {size}")
        k = _kernel_table(kind.kernel_y, data.y, data.y)
        l = _kernel_table(kind.kernel_z, data.z, data.z)
        values = [_hsic_table_sum(k, l, p) for p in itertools.permutations(range(size))]
    return sorted(values)


def exhaustive_sensitivity(kind, data, candidate_replacements, permutations=None) -> float:
    """Largest |T(X^pi) - T(Y^pi)| over single-entry replacements and permutations.

    Candidates replace one pooled entry (MMD) or one whole pair (HSIC, given
    as ``(y, z)`` tuples). ``permutations`` defaults to the identity only.
    The kernel is fixed from the unmodified data.
    """
    check_data_kind(kind, data)
    kind = kind.resolve(data)
    candidates = list(candidate_replacements)
    if not candidates:
        return 0.0
    if permutations is None:
        size = data.n + data.m if isinstance(kind, MMD) else data.n
        permutations = [np.arange(size)]
    best = 0.0
    for perm in permutations:
        base = kind.statistic(data.permuted(perm))
        for idx in range(data.n + data.m if isinstance(kind, MMD) else data.n):
            for cand in candidates:
                other = replace_entry(data, idx, cand)
                best = max(best, abs(base - kind.statistic(other.permuted(perm))))
    return best


def replace_entry(data, idx: int, candidate):
    """Copy of ``data`` with pooled entry ``idx`` (or pair ``idx``) replaced."""
    if isinstance(data, TwoSampleData):
        pooled = data.pooled.copy()
        pooled[idx] = np.asarray(candidate, dtype=float)
        return TwoSampleData(pooled[: data.n], pooled[data.n :])
    if not isinstance(data, PairedData):
        raise ConfigError(f"unsupported data type {type(data).__name__}")
    y, z = data.y.copy(), data.z.copy()
    y[idx] = np.asarray(candidate[0], dtype=float)
    z[idx] = np.asarray(candidate[1], dtype=float)
    return PairedData(y, z)
