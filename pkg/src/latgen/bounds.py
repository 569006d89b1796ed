"""Upper bounds on the squared worst-case error of constructed vectors.

Both bounds are subset sums over ``u ⊆ {1..d}`` raised to ``1/lambda``.  With
product weights they collapse to O(d) expressions:

* the first bound factorises into ``prod_j (1 + gamma_j^lam 2 zeta(alpha lam) c~_j)``;
* the second is grouped by the largest index ``k`` of ``u``.  Because ``w``
  is nondecreasing, ``max_{j in u} w_j = w_k``, so each group sums to
  ``A_k / phi(b^max(0, m - w_k)) * prod_{j<k} (1 + A_j)``.

Sums are accumulated in log space; near ``lambda = 1/alpha`` the zeta
factor is huge and the plain products overflow for moderate ``d``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np
from scipy import optimize, special

from .korobov import LatticeParams, zeta
from .reduction import ReductionSchedule, space_size, totient_pp

LAMBDA_EPS = 1e-6
THEOREMS = ("thm1", "thm2")


@dataclass(frozen=True)
class BoundInputs:
    params: LatticeParams
    schedule: ReductionSchedule
    exclusion_sizes: tuple[int, ...]
    d: int
    lam: float = 1.0

    def __post_init__(self):
        sizes = tuple(int(v) for v in self.exclusion_sizes)
        object.__setattr__(self, "exclusion_sizes", sizes)
        if not 1 <= self.d <= self.params.s:
            raise ValueError(f"d must lie in 1..{self.params.s}, got {self.d}")
        if len(sizes) < self.d or len(self.schedule) < self.d:
            raise ValueError("need exclusion sizes and schedule entries for every j <= d")
        if not 1.0 / self.params.alpha < self.lam <= 1.0:
            raise ValueError(f"lambda must lie in (1/alpha, 1], got {self.lam}")
        for j, (e, z) in enumerate(zip(sizes, self.space_sizes()), start=1):
            if not 0 <= e < z:
                raise ValueError(f"|E_{j}| = {e} must satisfy 0 <= |E_j| < |Z_j| = {z}")

    def space_sizes(self) -> list[int]:
        p = self.params
        return [space_size(p.b, p.m, w) for w in self.schedule.w[: self.d]]

    def at(self, lam: float) -> "BoundInputs":
        return replace(self, lam=lam)


def _prep(inputs: BoundInputs):
    p, lam = inputs.params, inputs.lam
    g = np.array(p.gamma[: inputs.d]) ** lam
    Z = np.array(inputs.space_sizes(), dtype=np.float64)
    E = np.array(inputs.exclusion_sizes[: inputs.d], dtype=np.float64)
    return p, lam, g, Z, E, zeta(p.alpha * lam)


def theorem1_bound(inputs: BoundInputs) -> float:
    """Bound using the auxiliary exclusion sets ``(Z_N minus Z_j) ∪ E_j``.

    ``phi(N) - |E~_j| = |Z_j| - |E_j|``, which is positive by validation.
    """
    p, lam, g, Z, E, zt = _prep(inputs)
    phi = float(totient_pp(p.b, p.m))
    log_sum = -math.log(phi) + float(np.sum(np.log1p(g * 2.0 * zt * phi / (Z - E))))
    return _finish(log_sum, lam)


def theorem2_bound(inputs: BoundInputs) -> float:
    """Bound with the reduction-aware totient normalisation (O(d))."""
    p, lam, g, Z, E, zt = _prep(inputs)
    A = g * 4.0 * zt * Z / (Z - E)
    phis = np.array([totient_pp(p.b, max(0, p.m - w)) for w in inputs.schedule.w[: inputs.d]], dtype=float)
    prefix = np.concatenate(([0.0], np.cumsum(np.log1p(A))[:-1]))
    logs = np.concatenate(([-math.log(totient_pp(p.b, p.m))], np.log(A / phis) + prefix))
    return _finish(float(special.logsumexp(logs)), lam)


def _finish(log_sum, lam):
    with np.errstate(over="ignore"):
        return float(np.exp(log_sum / lam))


def theorem1_bound_bruteforce(inputs: BoundInputs) -> float:
    """Direct ``2^d``-term subset sum (test oracle)."""
    p, lam, g, Z, E, zt = _prep(inputs)
    phi = totient_pp(p.b, p.m)
    total = 0.0
    for u in _subsets(inputs.d):
        term = 1.0 / phi
        for j in u:
            eaux = phi - Z[j] + E[j]
            term *= g[j] * 2.0 * zt * phi / (phi - eaux)
        total += term
    return total ** (1.0 / lam)


def theorem2_bound_bruteforce(inputs: BoundInputs) -> float:
    """Direct ``2^d``-term subset sum (test oracle)."""
    p, lam, g, Z, E, zt = _prep(inputs)
    w = inputs.schedule.w
    total = 0.0
    for u in _subsets(inputs.d):
        wmax = max((w[j] for j in u), default=0)
        term = 1.0 / totient_pp(p.b, max(0, p.m - wmax))
        for j in u:
            term *= g[j] * 4.0 * zt * Z[j] / (Z[j] - E[j])
        total += term
    return total ** (1.0 / lam)


def _subsets(d):
    return itertools.chain.from_iterable(itertools.combinations(range(d), k) for k in range(d + 1))


_BOUNDS = {"thm1": theorem1_bound, "thm2": theorem2_bound}


def evaluate(kind: str, inputs: BoundInputs) -> float:
    try:
        return _BOUNDS[kind](inputs)
    except KeyError:
        raise ValueError(f"bound kind must be one of {THEOREMS}, got {kind!r}") from None


def lambda_interval(alpha: float) -> tuple[float, float]:
    return 1.0 / alpha + LAMBDA_EPS, 1.0


def optimize_lambda(kind: str, inputs: BoundInputs, grid: int = 64, interval=None) -> tuple[float, float]:
    """Minimise a bound over ``lambda``: coarse grid, then bounded refinement.

    The grid includes both interval ends, so the result never exceeds the
    bound at either end.  No unimodality is assumed.
    """
    lo, hi = interval if interval is not None else lambda_interval(inputs.params.alpha)
    if hi <= lo:
        lam = float(hi)
        return lam, evaluate(kind, inputs.at(lam))
    lams = np.linspace(lo, hi, max(int(grid), 2))
    vals = np.array([evaluate(kind, inputs.at(float(v))) for v in lams])
    i = int(np.argmin(vals))
    best_lam, best_val = float(lams[i]), float(vals[i])
    a, b = float(lams[max(i - 1, 0)]), float(lams[min(i + 1, len(lams) - 1)])
    if np.isfinite(best_val) and b > a:
        res = optimize.minimize_scalar(
            lambda x: evaluate(kind, inputs.at(float(x))),
            bounds=(a, b),
            method="bounded",
            options={"xatol": 1e-10},
        )
        if res.fun < best_val:
            best_lam, best_val = float(res.x), float(res.fun)
    return best_lam, best_val


@dataclass
class BoundReport:
    d: int
    thm1_value: float
    thm2_value: float
    lambda_star_1: float
    lambda_star_2: float
    per_d: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "thm1_value": self.thm1_value,
            "thm2_value": self.thm2_value,
            "lambda_star_1": self.lambda_star_1,
            "lambda_star_2": self.lambda_star_2,
            "per_d": self.per_d,
        }


def bound_report(
    params: LatticeParams,
    schedule: ReductionSchedule,
    exclusion_sizes: Sequence[int],
    d: int | None = None,
    lam: float | None = None,
    grid: int = 64,
    curve: bool = False,
    step_errors: Sequence[float] | None = None,
) -> BoundReport:
    """Both bounds at prefix length ``d`` (default ``s``), optimised over
    ``lambda`` unless ``lam`` is fixed; optionally the full curve over d."""
    d = params.s if d is None else d

    def one(dd):
        base = BoundInputs(params, schedule, tuple(exclusion_sizes), dd, 1.0)
        if lam is not None:
            fixed = base.at(lam)
            return (lam, theorem1_bound(fixed)), (lam, theorem2_bound(fixed))
        return optimize_lambda("thm1", base, grid), optimize_lambda("thm2", base, grid)

    (l1, v1), (l2, v2) = one(d)
    rows = []
    if curve:
        for dd in range(1, d + 1):
            (a1, b1), (a2, b2) = one(dd)
            row = {"d": dd, "thm1": b1, "lambda1": a1, "thm2": b2, "lambda2": a2}
            if step_errors is not None:
                row["step_error"] = float(step_errors[dd - 1])
            rows.append(row)
    return BoundReport(d, v1, v2, l1, l2, rows)
