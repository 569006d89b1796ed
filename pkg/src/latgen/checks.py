"""Oracle cross-checks and result-file verification behind ``latgen check``."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .bounds import (
    BoundInputs,
    lambda_interval,
    theorem1_bound,
    theorem1_bound_bruteforce,
    theorem2_bound,
    theorem2_bound_bruteforce,
)
from .cbc import ConstructionResult, ExclusionPolicy, construct
from .diagnostics import cost_audit
from .korobov import LatticeParams, dual_lattice_error_truncated, prefix_errors, squared_error
from .reduction import ReductionSchedule, parse_schedule, space_size, thresholds

CHECKS = ("dual", "engines", "bounds", "dominance")
DUAL_RTOL = 0.02
ENGINE_RTOL = 1e-10
GROUPED_RTOL = 1e-12
ROUNDTRIP_RTOL = 1e-12


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.detail}"


def lambda_grid(alpha: float, n: int = 16) -> np.ndarray:
    lo, hi = lambda_interval(alpha)
    return np.linspace(lo, hi, n)


def desk_configs(bs=(2, 3), m_max=6, s_max=8):
    """The default desk-scale grid of construction inputs."""
    out = []
    for b in bs:
        for m in range(2, m_max + 1, 2):
            s = s_max
            for sched in ("const:0", "log", f"linear:{1.0 / b}"):
                for pol in ("none", "no-repeat", "anti-diagonal"):
                    gamma = tuple(1.0 / (j + 1) ** 2 for j in range(s))
                    out.append((LatticeParams(b, m, s, 2.0, gamma), parse_schedule(sched, s, b), pol))
    return out


def check_dual(H: int = 512) -> list[CheckResult]:
    worst, monotone, count = 0.0, True, 0
    for b, m in ((2, 1), (2, 2), (2, 3), (2, 4), (3, 1), (3, 2), (5, 1)):
        N = b**m
        for d in (1, 2, 3):
            p = LatticeParams(b, m, d, 2.0, (1.0, 0.5, 0.25)[:d])
            for tail in itertools.product(range(N), repeat=d - 1):
                z = (1,) + tail
                exact = squared_error(z, p)
                lo = dual_lattice_error_truncated(z, p, max(N, H // 2))
                hi = dual_lattice_error_truncated(z, p, H)
                monotone &= lo <= hi <= exact + 1e-9
                worst = max(worst, abs(hi - exact) / exact)
                count += 1
    return [
        CheckResult("dual-lattice agreement", worst <= DUAL_RTOL, f"{count} vectors, worst rel gap {worst:.3e} (H={H})"),
        CheckResult("dual-lattice monotone", monotone, f"H/2 <= H <= closed form on {count} vectors"),
    ]


def check_engines(configs) -> tuple[list[CheckResult], list[ConstructionResult]]:
    mismatches, worst = [], 0.0
    results = []
    for params, sched, pol in configs:
        policy = ExclusionPolicy.parse(pol)
        fast = construct(params, sched, policy, "fast")
        naive = construct(params, sched, policy, "naive")
        results.append(fast)
        if fast.z_scaled != naive.z_scaled:
            mismatches.append((params.b, params.m, pol))
        rel = np.abs(np.array(fast.step_errors) - naive.step_errors) / np.array(naive.step_errors)
        worst = max(worst, float(rel.max()))
    return [
        CheckResult("engine components", not mismatches, f"{len(configs)} configs, mismatches {mismatches}"),
        CheckResult("engine step errors", worst <= ENGINE_RTOL, f"worst rel diff {worst:.3e}"),
    ], results


def check_bounds(d_max: int = 12, draws: int = 100, seed: int = 2024) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(draws):
        inputs = random_bound_inputs(rng, d_max)
        for fast, slow in ((theorem1_bound, theorem1_bound_bruteforce), (theorem2_bound, theorem2_bound_bruteforce)):
            worst = max(worst, abs(fast(inputs) / slow(inputs) - 1.0))
    return [CheckResult("grouped bound evaluation", worst <= GROUPED_RTOL, f"{draws} draws, d<={d_max}, worst rel {worst:.3e}")]


def random_bound_inputs(rng, d_max):
    d = int(rng.integers(1, d_max + 1))
    b = int(rng.choice([2, 3, 5]))
    m = int(rng.integers(1, 7))
    alpha = float(rng.uniform(1.2, 4.0))
    w = np.sort(rng.integers(0, m + 2, size=d))
    w[0] = 0
    params = LatticeParams(b, m, d, alpha, tuple(rng.uniform(1e-3, 2.0, size=d)))
    sizes = tuple(int(rng.integers(0, space_size(b, m, int(v)))) for v in w)
    lam = float(rng.uniform(1.0 / alpha + 1e-3, 1.0))
    return BoundInputs(params, ReductionSchedule(tuple(int(v) for v in w)), sizes, d, lam)


def dominance_violations(result: ConstructionResult, n_lambda: int = 16) -> list[tuple]:
    out = []
    p = result.params
    for d in range(1, p.s + 1):
        err = result.step_errors[d - 1]
        for lam in lambda_grid(p.alpha, n_lambda):
            inputs = BoundInputs(p, result.schedule, tuple(result.exclusion_sizes), d, float(lam))
            for name, fn in (("thm1", theorem1_bound), ("thm2", theorem2_bound)):
                if not err <= fn(inputs):
                    out.append((name, d, float(lam)))
    return out


def check_dominance(results) -> list[CheckResult]:
    bad = [v for r in results for v in dominance_violations(r)]
    return [CheckResult("bound dominance", not bad, f"{len(results)} constructions, violations {bad[:5]}")]


def verify_result(result: ConstructionResult) -> list[CheckResult]:
    """Invariants a construction file must satisfy; each failure is named."""
    p, out = result.params, []
    N, b, s = p.N, p.b, p.s
    w = result.schedule.w[:s]

    def add(name, ok, detail=""):
        out.append(CheckResult(name, bool(ok), detail))

    lengths = {len(result.z_scaled), len(result.z_unscaled), len(result.step_errors), len(result.exclusion_sizes), len(w)}
    add("lengths", lengths == {s}, f"expected {s}, got {sorted(lengths)}")
    if lengths != {s}:
        return out
    add("first component", result.z_scaled[0] == 1 and result.z_unscaled[0] == 1, f"z_1 = {result.z_scaled[0]}")
    add("component range", all(0 <= z < N for z in result.z_scaled), f"N = {N}")
    t1, t2 = thresholds(result.schedule, p.m, s)
    add("thresholds", (t1, t2) == (result.t1, result.t2), f"recomputed ({t1}, {t2}), file ({result.t1}, {result.t2})")
    shape = []
    for j in range(1, s + 1):
        z, zt = result.z_unscaled[j - 1], result.z_scaled[j - 1]
        if j >= t2:
            expect = 0
        elif j <= t1:
            expect = z
        else:
            expect = (pow(b, w[j - 1], N) * z) % N
        if zt != expect:
            shape.append(j)
    add("regime shape", not shape, f"bad components {shape}")
    ranges = [
        j
        for j in range(2, min(t2, s + 1))
        if not (0 < result.z_unscaled[j - 1] < b ** (p.m - w[j - 1]) and result.z_unscaled[j - 1] % b)
    ]
    add("search-space membership", not ranges, f"bad components {ranges}")
    sizes_ok = all(0 <= e < space_size(b, p.m, wj) for e, wj in zip(result.exclusion_sizes, w))
    add("exclusion sizes", sizes_ok, "0 <= |E_j| < |Z_j|")
    recomputed = prefix_errors(result.z_scaled, p) if not shape else None
    if recomputed is not None:
        rel = np.abs(recomputed - result.step_errors) / np.maximum(recomputed, 1e-300)
        add("step errors round-trip", float(rel.max()) <= ROUNDTRIP_RTOL, f"worst rel {float(rel.max()):.3e}")
    steps = np.asarray(result.step_errors)
    add("step errors nondecreasing", bool(np.all(np.diff(steps) >= 0)))
    if sizes_ok:
        bad = dominance_violations(result)
        add("bound dominance", not bad, f"violations {bad[:5]}")
    audit = cost_audit(result)
    add("cost budget", audit.passed, f"{audit.counters.exclusion_checks} checks <= {audit.budget}")
    return out
