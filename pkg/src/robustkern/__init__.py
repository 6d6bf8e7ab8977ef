"""Robust kernel permutation tests under adversarial data corruption."""

from robustkern.errors import (
    ConfigError,
    DataError,
    PermutationCountWarning,
    PowerlessTestWarning,
)
from robustkern.kernels import KernelSpec, eval_kernel, gram_matrix, median_heuristic_bandwidth
from robustkern.statistics import (
    HSIC,
    MMD,
    PairedData,
    TwoSampleData,
    hsic_stat,
    mmd_stat,
    sensitivity,
)
from robustkern.testing import (
    PermutationScheme,
    TestConfig,
    TestReport,
    empirical_quantile,
    laplace_noise,
    run_classical_test,
    run_dc_test,
    run_dp_test,
    sample_permutations,
)

__all__ = [
    "ConfigError",
    "DataError",
    "HSIC",
    "KernelSpec",
    "MMD",
    "PairedData",
    "PermutationCountWarning",
    "PermutationScheme",
    "PowerlessTestWarning",
    "TestConfig",
    "TestReport",
    "TwoSampleData",
    "empirical_quantile",
    "eval_kernel",
    "gram_matrix",
    "hsic_stat",
    "laplace_noise",
    "median_heuristic_bandwidth",
    "mmd_stat",
    "run_classical_test",
    "run_dc_test",
    "run_dp_test",
    "sample_permutations",
    "sensitivity",
]
