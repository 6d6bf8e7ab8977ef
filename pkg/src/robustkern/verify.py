"""Self-checks of the optimised code paths against the brute-force oracles."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from robustkern import oracle
from robustkern import rng as rngmod
from robustkern.kernels import KernelSpec, gram_matrix
from robustkern.statistics import HSIC, MMD, PairedData, TwoSampleData, hsic_stat, mmd_stat, sensitivity
from robustkern.testing import TestConfig, empirical_quantile, laplace_noise, run_classical_test

REL_TOL = 1e-10


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    counterexample: dict | None = field(default=None)


def _sabotaged_mmd(data: TwoSampleData, kernel: KernelSpec) -> float:
    kyy = gram_matrix(kernel, data.y).mean()
    kzz = gram_matrix(kernel, data.z).mean()
    kyz = gram_matrix(kernel, data.y, data.z).mean()
    return math.sqrt(max(kyy + kzz + 2.0 * kyz, 0.0))


def _random_kernel(gen: np.random.Generator) -> KernelSpec:
    family = "gaussian" if gen.random() < 0.5 else "laplace"
    return KernelSpec(family, float(np.exp(gen.uniform(np.log(0.2), np.log(5.0)))))


def relative_error(a: float, b: float) -> float:
    return abs(a - b) / max(abs(b), 1e-300) if a != b else 0.0


def check_mmd_agreement(seed: int, trials: int, sabotage: bool = False) -> CheckResult:
    gen = rngmod.stream(seed, 10)
    impl = _sabotaged_mmd if sabotage else mmd_stat
    worst = 0.0
    for t in range(trials):
        n, m, d = int(gen.integers(2, 13)), int(gen.integers(2, 13)), int(gen.integers(1, 4))
        data = TwoSampleData(gen.normal(size=(n, d)), gen.normal(0.5, 1.0, size=(m, d)))
        kernel = _random_kernel(gen)
        got, want = impl(data, kernel), oracle.mmd_literal(data, kernel)
        err = relative_error(got, want)
        worst = max(worst, err)
        if err > REL_TOL:
            return CheckResult(
                "mmd_agreement",
                False,
                f"trial {t}: relative error {err:.3g}",
                {"y": data.y.tolist(), "z": data.z.tolist(), "kernel": kernel.family.value,
                 "bandwidth": kernel.bandwidth, "optimised": got, "literal": want},
            )
    return CheckResult("mmd_agreement", True, f"{trials} instances, max relative error {worst:.2g}")


def check_hsic_agreement(seed: int, trials: int) -> CheckResult:
    gen = rngmod.stream(seed, 11)
    worst = 0.0
    for t in range(trials):
        n = int(gen.integers(2, 11))
        y = gen.normal(size=(n, int(gen.integers(1, 4))))
        z = y[:, :1] + gen.normal(size=(n, int(gen.integers(1, 4))))
        data = PairedData(y, z)
        ky, kz = _random_kernel(gen), _random_kernel(gen)
        got, want = hsic_stat(data, ky, kz), oracle.hsic_literal(data, ky, kz)
        err = relative_error(got, want)
        worst = max(worst, err)
        if err > REL_TOL:
            return CheckResult(
                "hsic_agreement",
                False,
                f"trial {t}: relative error {err:.3g}",
                {"y": y.tolist(), "z": z.tolist(), "optimised": got, "literal": want},
            )
    return CheckResult("hsic_agreement", True, f"{trials} instances, max relative error {worst:.2g}")


def check_sensitivity_bound(seed: int, trials: int) -> CheckResult:
    gen = rngmod.stream(seed, 12)
    n = 20
    kernel = KernelSpec("gaussian", 1.0)
    worst = 0.0
    for t in range(trials):
        if t % 2 == 0:
            kind = MMD(kernel)
            data = TwoSampleData(gen.normal(size=(n, 2)), gen.normal(size=(n, 2)))
            bound = sensitivity(kind, n, n)
            perm = gen.permutation(2 * n)
            idx = int(gen.integers(2 * n))
            cand = gen.normal(scale=float(gen.choice([1.0, 100.0])), size=2)
        else:
            kind = HSIC(kernel, kernel)
            data = PairedData(gen.normal(size=(n, 2)), gen.normal(size=(n, 2)))
            bound = sensitivity(kind, n)
            perm = gen.permutation(n)
            idx = int(gen.integers(n))
            cand = (gen.normal(size=2), gen.normal(size=2))
        other = oracle.replace_entry(data, idx, cand)
        change = abs(kind.statistic(data.permuted(perm)) - kind.statistic(other.permuted(perm)))
        worst = max(worst, change / bound)
        if change > bound * (1 + 1e-12):
            return CheckResult(
                "sensitivity_bound",
                False,
                f"trial {t}: change {change:.6g} exceeds bound {bound:.6g}",
                {"kind": kind.name, "index": idx, "permutation": perm.tolist()},
            )
    return CheckResult("sensitivity_bound", True, f"{trials} replacements, max change/bound {worst:.3f}")


def dkw_band(num_samples: int, delta: float = 0.01) -> float:
    return math.sqrt(math.log(2.0 / delta) / (2.0 * num_samples))


def quantile_within_band(exact: list[float], sampled_q: float, level: float, band: float) -> bool:
    """Is the sampled quantile between the exact (level -/+ band)-quantiles?"""
    lo = empirical_quantile(exact, max(level - band, 1e-12))
    hi = exact[-1] if level + band >= 1 else empirical_quantile(exact, level + band)
    tol = 1e-12 * max(1.0, abs(hi))
    return lo - tol <= sampled_q <= hi + tol


def check_quantile_vs_exact(seed: int, trials: int, num_permutations: int = 2000) -> CheckResult:
    gen = rngmod.stream(seed, 13)
    alpha = 0.05
    band = dkw_band(num_permutations + 1)
    kernel = KernelSpec("gaussian", 1.0)
    for t in range(trials):
        n = int(gen.integers(2, 4))
        m = int(gen.integers(2, 7 - n))
        data = TwoSampleData(gen.normal(size=(n, 1)), gen.normal(0.7, 1.0, size=(m, 1)))
        exact = oracle.exact_permutation_distribution(data, MMD(kernel))
        cfg = TestConfig(alpha=alpha, num_permutations=num_permutations, seed=rngmod.derive_seed(seed, t))
        q = run_classical_test(data, MMD(kernel), None, cfg).threshold
        if not quantile_within_band(exact, q, 1 - alpha, band):
            return CheckResult(
                "quantile_vs_exact",
                False,
                f"trial {t}: sampled quantile {q:.6g} outside the DKW band",
                {"y": data.y.tolist(), "z": data.z.tolist(), "sampled": q},
            )
    return CheckResult("quantile_vs_exact", True, f"{trials} instances within +-{band:.4f}")


def check_laplace_moments(seed: int, draws: int = 100_000) -> CheckResult:
    z = laplace_noise(rngmod.stream(seed, 14), draws)
    mean, var = float(z.mean()), float(z.var())
    ok = abs(mean) <= 0.02 and abs(var - 2.0) <= 0.05
    detail = f"mean {mean:+.4f}, variance {var:.4f} over {draws} draws"
    return CheckResult("laplace_moments", ok, detail, None if ok else {"mean": mean, "variance": var})


def run_checks(seed: int, trials: int, sabotage: bool = False) -> list[CheckResult]:
    return [
        check_mmd_agreement(seed, trials, sabotage),
        check_hsic_agreement(seed, trials),
        check_sensitivity_bound(seed, 20 * trials),
        check_quantile_vs_exact(seed, max(1, trials // 4)),
        check_laplace_moments(seed),
    ]
