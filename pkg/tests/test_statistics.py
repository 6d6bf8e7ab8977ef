import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from robustkern import oracle
from robustkern.errors import ConfigError, DataError
from robustkern.kernels import KernelSpec
from robustkern.statistics import (
    HSIC,
    MMD,
    PairedData,
    TwoSampleData,
    hsic_from_gram,
    hsic_stat,
    mmd_stat,
    sensitivity,
)

G1 = KernelSpec("gaussian", 1.0)

# Hand expansion of the 2+2 double sums: (1 + 1 - 2 e^{-1/2}), square-rooted.
MMD_HAND = math.sqrt(2.0 * (1.0 - math.exp(-0.5)))
# Hand expansion of the 16-term HSIC sums for pairs (0,0), (1,1): HSIC^2 = (1 - a)^2 / 4, a = e^{-1/2}.
HSIC_HAND = (1.0 - math.exp(-0.5)) / 2.0


def test_mmd_identical_samples_zero(rng):
    y = rng.normal(size=(5, 2))
    assert mmd_stat(TwoSampleData(y, y.copy()), G1) == 0.0
    assert mmd_stat(TwoSampleData([[0.0], [2.0]], [[0.0], [2.0]]), G1) == 0.0


def test_mmd_hand_example():
    data = TwoSampleData([[0.0], [0.0]], [[1.0], [1.0]])
    assert mmd_stat(data, G1) == pytest.approx(MMD_HAND, rel=1e-12)
    assert MMD_HAND == pytest.approx(0.8870956434, abs=1e-10)


def test_hsic_constant_z_zero(rng):
    data = PairedData(rng.normal(size=(6, 2)), np.ones((6, 1)))
    assert hsic_stat(data, G1, G1) == 0.0


def test_hsic_hand_example():
    data = PairedData([[0.0], [1.0]], [[0.0], [1.0]])
    assert hsic_stat(data, G1, G1) == pytest.approx(HSIC_HAND, rel=1e-12)
    assert oracle.hsic_literal(data, G1, G1) == pytest.approx(HSIC_HAND, rel=1e-12)


def test_hsic_joint_relabeling_invariance(rng):
    y, z = rng.normal(size=(8, 2)), rng.normal(size=(8, 3))
    p = rng.permutation(8)
    a = hsic_stat(PairedData(y, z), G1, G1)
    b = hsic_stat(PairedData(y[p], z[p]), G1, G1)
    assert b == pytest.approx(a, rel=1e-12)


def test_mmd_within_sample_permutation_invariance(rng):
    y, z = rng.normal(size=(6, 2)), rng.normal(size=(7, 2))
    a = mmd_stat(TwoSampleData(y, z), G1)
    b = mmd_stat(TwoSampleData(y[rng.permutation(6)], z[rng.permutation(7)]), G1)
    assert b == pytest.approx(a, rel=1e-12)


def test_mmd_swap_symmetry(rng):
    y, z = rng.normal(size=(9, 2)), rng.normal(1.0, 1.0, size=(9, 2))
    assert mmd_stat(TwoSampleData(z, y), G1) == pytest.approx(mmd_stat(TwoSampleData(y, z), G1), rel=1e-12)


def test_data_validation():
    with pytest.raises(DataError):
        TwoSampleData([[0.0]], [[1.0], [2.0]])
    with pytest.raises(DataError):
        TwoSampleData([[0.0, 1.0], [1.0, 1.0]], [[1.0], [2.0]])
    with pytest.raises(DataError):
        PairedData([[0.0], [1.0]], [[0.0]])
    with pytest.raises(DataError):
        TwoSampleData([[0.0], [np.nan]], [[1.0], [2.0]])


def test_pair_breaking_permutation_keeps_y():
    data = PairedData([[0.0], [1.0], [2.0]], [[10.0], [11.0], [12.0]])
    out = data.permuted([2, 0, 1])
    np.testing.assert_array_equal(out.y, data.y)
    np.testing.assert_array_equal(out.z[:, 0], [12.0, 10.0, 11.0])


def test_full_pooled_permutation_resplits():
    data = TwoSampleData([[0.0], [1.0]], [[2.0], [3.0], [4.0]])
    out = data.permuted([4, 3, 2, 1, 0])
    np.testing.assert_array_equal(out.y[:, 0], [4.0, 3.0])
    np.testing.assert_array_equal(out.z[:, 0], [2.0, 1.0, 0.0])


def test_permuted_engine_matches_materialised(rng):
    y, z = rng.normal(size=(7, 2)), rng.normal(size=(7, 2))
    K = np.exp(-((y[:, None] - y[None]) ** 2).sum(-1) / 2)
    L = np.exp(-((z[:, None] - z[None]) ** 2).sum(-1) / 2)
    perms = np.stack([rng.permutation(7) for _ in range(5)])
    got = hsic_from_gram(K, L, perms)
    for p, v in zip(perms, got):
        assert v == pytest.approx(hsic_stat(PairedData(y, z).permuted(p), G1, G1), rel=1e-12)


def test_sensitivity_mmd():
    assert sensitivity(MMD(G1), 100, 100) == pytest.approx(0.0141421356, abs=1e-10)
    assert sensitivity(MMD(G1), 2, 5) == pytest.approx(0.7071067812, abs=1e-10)
    assert sensitivity(MMD(G1), 5, 2) == sensitivity(MMD(G1), 2, 5)


def test_sensitivity_hsic():
    assert sensitivity(HSIC(G1, G1), 100) == pytest.approx(0.0396, abs=1e-15)


def test_sensitivity_argument_errors():
    with pytest.raises(ConfigError):
        sensitivity(MMD(G1), 10)
    with pytest.raises(ConfigError):
        sensitivity(HSIC(G1, G1), 10, 10)


kernels = st.builds(KernelSpec, st.sampled_from(["gaussian", "laplace"]), st.floats(0.2, 5.0))


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 12), st.integers(2, 12), st.integers(1, 3), kernels, st.integers(0, 2**32 - 1))
def test_mmd_matches_literal(n, m, d, kernel, seed):
    g = np.random.default_rng(seed)
    data = TwoSampleData(g.normal(size=(n, d)), g.normal(0.3, 1.2, size=(m, d)))
    got, want = mmd_stat(data, kernel), oracle.mmd_literal(data, kernel)
    assert got == pytest.approx(want, rel=1e-10, abs=1e-300)


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 9), kernels, kernels, st.integers(0, 2**32 - 1))
def test_hsic_matches_literal(n, ky, kz, seed):
    g = np.random.default_rng(seed)
    y = g.normal(size=(n, 2))
    data = PairedData(y, y[:, :1] ** 2 + g.normal(size=(n, 1)))
    got, want = hsic_stat(data, ky, kz), oracle.hsic_literal(data, ky, kz)
    assert got == pytest.approx(want, rel=1e-10, abs=1e-300)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.booleans())
def test_single_replacement_within_sensitivity(seed, far):
    g = np.random.default_rng(seed)
    n = 12
    data = TwoSampleData(g.normal(size=(n, 2)), g.normal(size=(n, 2)))
    cand = g.normal(size=2) * (1000.0 if far else 1.0)
    perm = g.permutation(2 * n)
    idx = int(g.integers(2 * n))
    other = oracle.replace_entry(data, idx, cand)
    change = abs(mmd_stat(data.permuted(perm), G1) - mmd_stat(other.permuted(perm), G1))
    assert change <= sensitivity(MMD(G1), n, n) * (1 + 1e-12)

    pdata = PairedData(g.normal(size=(n, 2)), g.normal(size=(n, 2)))
    pother = oracle.replace_entry(pdata, idx % n, (cand, g.normal(size=2)))
    perm = g.permutation(n)
    change = abs(hsic_stat(pdata.permuted(perm), G1, G1) - hsic_stat(pother.permuted(perm), G1, G1))
    assert change <= sensitivity(HSIC(G1, G1), n) * (1 + 1e-12)


def test_statistics_nonnegative_finite(rng):
    for _ in range(20):
        y = rng.normal(size=(5, 2))
        v = mmd_stat(TwoSampleData(y, y + 1e-12), G1)
        assert np.isfinite(v) and v >= 0
        h = hsic_stat(PairedData(y, y + 1e-12), G1, G1)
        assert np.isfinite(h) and h >= 0


def test_median_kind_resolves_on_pooled(rng):
    y, z = rng.normal(size=(5, 2)), rng.normal(size=(6, 2))
    data = TwoSampleData(y, z)
    resolved = MMD().resolve(data)
    assert resolved.kernel.bandwidth == pytest.approx(np.median(
        [np.linalg.norm(a - b) for i, a in enumerate(data.pooled) for b in data.pooled[i + 1:]]))
