import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from robustkern.errors import ConfigError, DataError
from robustkern.kernels import KernelSpec, eval_kernel, gram_matrix, median_heuristic_bandwidth


def test_gaussian_self_similarity_is_one():
    assert eval_kernel(KernelSpec("gaussian", 1.0), [0, 0], [0, 0]) == 1.0


def test_gaussian_unit_distance():
    # ||x - y||^2 = 1, bandwidth 1 -> exp(-1/2)
    assert eval_kernel(KernelSpec("gaussian", 1.0), [0.0], [1.0]) == pytest.approx(0.6065306597, abs=1e-10)


def test_laplace_l1_distance():
    # ||x - y||_1 = 2, bandwidth 2 -> exp(-1)
    assert eval_kernel(KernelSpec("laplace", 2.0), [0, 0], [1, 1]) == pytest.approx(0.3678794412, abs=1e-10)


def test_eval_dimension_mismatch():
    with pytest.raises(DataError):
        eval_kernel(KernelSpec("gaussian", 1.0), [0, 0], [0])


@pytest.mark.parametrize("bw", [0.0, -1.0, float("nan")])
def test_bandwidth_must_be_positive(bw):
    with pytest.raises(ConfigError):
        KernelSpec("gaussian", bw)


def test_bound_is_one_for_shipped_families():
    with pytest.raises(ConfigError):
        KernelSpec("laplace", 1.0, bound=2.0)


def test_unresolved_kernel_cannot_be_evaluated():
    with pytest.raises(ConfigError):
        eval_kernel(KernelSpec("gaussian"), [0], [1])


def test_gram_single_point():
    np.testing.assert_array_equal(gram_matrix(KernelSpec("gaussian", 1.0), [[0.0]]), [[1.0]])


def test_gram_rectangular():
    G = gram_matrix(KernelSpec("gaussian", 1.0), [[0.0], [1.0]], [[0.0]])
    np.testing.assert_allclose(G, [[1.0], [0.6065306597]], atol=1e-10)


def test_gram_laplace_square():
    G = gram_matrix(KernelSpec("laplace", 3.0), [[0.0], [3.0]])
    e = np.exp(-1)
    np.testing.assert_allclose(G, [[1, e], [e, 1]], rtol=1e-14)


def test_gram_errors():
    k = KernelSpec("gaussian", 1.0)
    with pytest.raises(DataError):
        gram_matrix(k, np.empty((0, 2)))
    with pytest.raises(DataError):
        gram_matrix(k, [[0.0, 1.0]], [[0.0]])


def test_gram_matches_eval_kernel(rng):
    for family in ("gaussian", "laplace"):
        k = KernelSpec(family, 0.7)
        A, B = rng.normal(size=(4, 3)), rng.normal(size=(5, 3))
        G = gram_matrix(k, A, B)
        for i in range(4):
            for j in range(5):
                assert G[i, j] == pytest.approx(eval_kernel(k, A[i], B[j]), rel=1e-13)


points = arrays(np.float64, st.tuples(st.integers(2, 10), st.integers(1, 3)),
                elements=st.floats(-10, 10, allow_nan=False))


@settings(max_examples=60, deadline=None)
@given(points, st.sampled_from(["gaussian", "laplace"]), st.floats(0.1, 10))
def test_gram_symmetric_bounded_psd(X, family, bw):
    k = KernelSpec(family, bw)
    G = gram_matrix(k, X)
    np.testing.assert_array_equal(G, G.T)
    np.testing.assert_array_equal(np.diag(G), 1.0)
    assert np.all(G >= 0) and np.all(G <= k.bound)
    assert np.linalg.eigvalsh(G).min() >= -1e-8


def test_median_single_pair():
    assert median_heuristic_bandwidth([[0.0], [2.0]], "L2") == 2.0


def test_median_three_points():
    # pairwise distances {1, 2, 3}
    assert median_heuristic_bandwidth([[0.0], [1.0], [3.0]], "L2") == 2.0


def test_median_l1():
    assert median_heuristic_bandwidth([[0.0, 0.0], [1.0, 1.0]], "L1") == 2.0


def test_median_degenerate():
    with pytest.raises(DataError):
        median_heuristic_bandwidth([[1.0, 1.0]] * 4)
    with pytest.raises(DataError):
        median_heuristic_bandwidth([[1.0]])


def test_resolve_uses_family_norm():
    pts = [[0.0, 0.0], [1.0, 1.0]]
    assert KernelSpec("laplace").resolve(pts).bandwidth == 2.0
    assert KernelSpec("gaussian").resolve(pts).bandwidth == pytest.approx(np.sqrt(2))
    fixed = KernelSpec("gaussian", 5.0)
    assert fixed.resolve(pts) is fixed
