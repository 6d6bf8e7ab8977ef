import math

import numpy as np
import pytest

from robustkern.errors import DataError
from robustkern.kernels import KernelSpec
from robustkern.oracle import (
    exact_permutation_distribution,
    exhaustive_sensitivity,
    hsic_literal,
    mmd_literal,
    replace_entry,
)
from robustkern.statistics import HSIC, MMD, PairedData, TwoSampleData, sensitivity
from robustkern.testing import sample_permutations

G1 = KernelSpec("gaussian", 1.0)


def test_size_guards(rng):
    with pytest.raises(DataError):
        mmd_literal(TwoSampleData(rng.normal(size=(16, 1)), rng.normal(size=(15, 1))), G1)
    with pytest.raises(DataError):
        hsic_literal(PairedData(rng.normal(size=(13, 1)), rng.normal(size=(13, 1))), G1, G1)
    with pytest.raises(DataError):
        exact_permutation_distribution(TwoSampleData(rng.normal(size=(5, 1)), rng.normal(size=(4, 1))), MMD(G1))
    with pytest.raises(DataError):
        exact_permutation_distribution(PairedData(rng.normal(size=(9, 1)), rng.normal(size=(9, 1))), HSIC(G1, G1))


def test_literal_trivial_cases(rng):
    y = rng.normal(size=(4, 2))
    assert mmd_literal(TwoSampleData(y, y.copy()), G1) == 0.0
    assert hsic_literal(PairedData(y, np.ones((4, 1))), G1, G1) == 0.0


@pytest.mark.parametrize("n,m", [(2, 2), (2, 3), (3, 3), (2, 5)])
def test_enumeration_size_full_pooled(rng, n, m):
    data = TwoSampleData(rng.normal(size=(n, 1)), rng.normal(size=(m, 1)))
    values = exact_permutation_distribution(data, MMD(G1))
    assert len(values) == math.factorial(n + m)
    assert values == sorted(values)
    assert min(values) <= MMD(G1).statistic(data) <= max(values)


def test_enumeration_size_pair_breaking(rng):
    data = PairedData(rng.normal(size=(5, 1)), rng.normal(size=(5, 2)))
    values = exact_permutation_distribution(data, HSIC(G1, G1))
    assert len(values) == math.factorial(5)
    assert np.isclose(values, HSIC(G1, G1).statistic(data), rtol=1e-10).any()


def test_enumeration_multiset_matches_optimised(rng):
    import itertools

    data = TwoSampleData(rng.normal(size=(2, 1)), rng.normal(size=(3, 1)))
    exact = exact_permutation_distribution(data, MMD(G1))
    fast = sorted(MMD(G1).statistic(data.permuted(np.array(p))) for p in itertools.permutations(range(5)))
    np.testing.assert_allclose(exact, fast, rtol=1e-10, atol=1e-14)


def test_exhaustive_sensitivity_empty():
    data = TwoSampleData(np.zeros((3, 1)), np.ones((3, 1)))
    assert exhaustive_sensitivity(MMD(G1), data, []) == 0.0


def test_exhaustive_sensitivity_mmd_tight(rng):
    y = rng.normal(scale=0.01, size=(3, 1))
    data = TwoSampleData(y, y + 0.001)
    cands = [np.array([1e3]), np.array([-1e3])]
    perms = sample_permutations(1, 10, 6)
    value = exhaustive_sensitivity(MMD(G1), data, cands, perms)
    bound = sensitivity(MMD(G1), 3, 3)
    assert bound == pytest.approx(math.sqrt(2) / 3)
    assert 0.9 * bound <= value <= bound * (1 + 1e-12)


def test_exhaustive_sensitivity_hsic_bound(rng):
    data = PairedData(rng.normal(size=(3, 1)), rng.normal(size=(3, 1)))
    cands = [(rng.normal(scale=s, size=1), rng.normal(scale=s, size=1)) for s in (0.5, 2.0, 100.0) for _ in range(3)]
    perms = [np.array(p) for p in [(0, 1, 2), (1, 2, 0), (2, 1, 0)]]
    value = exhaustive_sensitivity(HSIC(G1, G1), data, cands, perms)
    assert 0 < value <= 4 * 2 / 9


def test_replace_entry(rng):
    data = TwoSampleData(rng.normal(size=(2, 1)), rng.normal(size=(2, 1)))
    out = replace_entry(data, 3, [7.0])
    assert out.z[1, 0] == 7.0 and np.array_equal(out.y, data.y)
    pdata = PairedData(rng.normal(size=(2, 1)), rng.normal(size=(2, 1)))
    out = replace_entry(pdata, 0, ([1.0], [2.0]))
    assert (out.y[0, 0], out.z[0, 0]) == (1.0, 2.0)
