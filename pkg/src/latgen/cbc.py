"""Reduced, projection-corrected component-by-component construction.

Components ``2..t1`` are searched over all units modulo ``N``; components
``t1+1..t2-1`` over the reduced space at level ``w_j`` and scaled by
``b**w_j``; components from ``t2`` on are set to zero.  At every searched
step an exclusion set removes candidates (for example earlier picks, which
would put all points of a 2-d projection on the diagonal).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, NamedTuple, Sequence

import numpy as np

from . import kernels
from .diagnostics import StepWork, WorkCounters
from .fast import ProductVector, UnitGroupPlan, fold_products, sweep_errors_fft, unit_group_plan
from .korobov import LatticeParams, first_increment, omega_table, squared_error, zeta
from .reduction import ReductionSchedule, SearchSpace, search_space, thresholds

POLICY_KINDS = ("none", "no-repeat", "anti-diagonal", "custom")
ENGINES = ("naive", "fast")

# Candidates whose errors differ by less than this (relative to the size of
# the summed products) are treated as tied; the smallest z wins.  Rounding
# noise of either engine is far below it.
TIE_RTOL = 1e-11


class EmptyCandidateSetError(ValueError):
    """An exclusion set left no admissible candidate."""


@dataclass(frozen=True)
class ExclusionPolicy:
    kind: str = "none"
    custom: Mapping[int, frozenset] = field(default_factory=dict)
    strict: bool = False

    def __post_init__(self):
        if self.kind not in POLICY_KINDS:
            raise ValueError(f"unknown exclusion policy {self.kind!r}")
        custom = {int(k): frozenset(int(v) for v in vals) for k, vals in dict(self.custom).items()}
        object.__setattr__(self, "custom", custom)

    @classmethod
    def parse(cls, spec: str, strict: bool = False) -> "ExclusionPolicy":
        """``none`` | ``no-repeat`` | ``anti-diagonal`` | ``custom:2=3,5;4=7``."""
        kind, _, arg = spec.partition(":")
        kind = kind.strip().lower()
        if kind != "custom":
            if arg:
                raise ValueError(f"policy {kind!r} takes no argument")
            return cls(kind, strict=strict)
        sets = {}
        for part in filter(None, (p.strip() for p in arg.split(";"))):
            step, _, values = part.partition("=")
            sets[int(step)] = frozenset(int(v) for v in values.split(",") if v.strip())
        return cls("custom", sets, strict=strict)

    def describe(self) -> str:
        if self.kind != "custom":
            return self.kind
        body = ";".join(f"{k}={','.join(map(str, sorted(v)))}" for k, v in sorted(self.custom.items()))
        return f"custom:{body}"


class Chosen(NamedTuple):
    z: int
    level: int
    ztilde: int


class Exclusion(NamedTuple):
    excluded: frozenset
    forced_drop: bool


def exclusion_next(
    policy: ExclusionPolicy,
    history: Sequence[Chosen],
    space: SearchSpace,
    params: LatticeParams,
    step: int | None = None,
) -> Exclusion:
    """Exclusion set for the next step (``step = len(history) + 1``).

    The result is always a proper subset of ``space``; when the policy would
    exclude every candidate, the smallest candidate is released again and
    ``forced_drop`` is set (a strict policy raises instead).
    """
    if space.size == 0:
        raise ValueError("search space is empty")
    step = len(history) + 1 if step is None else step
    N, b = params.N, params.b
    cand = set(int(v) for v in space.candidates)
    if policy.kind == "none":
        excluded = set()
    elif policy.kind == "custom":
        excluded = set(policy.custom.get(step, ())) & cand
    else:
        excluded = {h.z for h in history if h.level == space.level and h.z in cand}
        if policy.kind == "anti-diagonal":
            scale = pow(b, space.level, N)
            negated = {(-h.ztilde) % N for h in history}
            excluded |= {z for z in cand if (scale * z) % N in negated}
    forced = False
    if excluded >= cand:
        if policy.strict:
            raise EmptyCandidateSetError(f"empty candidate set at step {step}")
        excluded.discard(min(cand))
        forced = True
    return Exclusion(frozenset(excluded), forced)


def _select(cand: np.ndarray, errors: np.ndarray, tol: float) -> tuple[int, float]:
    best = float(errors.min())
    tied = cand[errors <= best + tol]
    z = int(tied.min())
    return z, float(errors[cand == z][0])


def _tie_tolerance(gamma_next, alpha, prior_error, best):
    return TIE_RTOL * gamma_next * 2.0 * zeta(alpha) * (1.0 + prior_error) + 4 * np.finfo(float).eps * abs(best)


def _admissible(space: SearchSpace, excluded: frozenset) -> tuple[np.ndarray, int]:
    """Admissible candidates and the number of membership checks spent."""
    if not excluded:
        return space.candidates, 0
    mask = np.fromiter((int(z) not in excluded for z in space.candidates), bool, space.size)
    return space.candidates[mask], space.size


def cbc_step_naive(prefix, space: SearchSpace, level: int, excluded, params: LatticeParams):
    """Choose the next component by evaluating every admissible candidate from scratch.

    Returns ``(z, e2)`` where ``e2`` is the squared error of ``prefix ++ (b^level z,)``.
    """
    prefix = [int(v) for v in prefix]
    if not prefix:
        raise ValueError("prefix must contain at least the first component")
    cand, _ = _admissible(space, frozenset(excluded))
    if cand.size == 0:
        raise EmptyCandidateSetError("no admissible candidate")
    d = len(prefix)
    errors = _naive_errors(prefix, cand, level, params)
    prior = squared_error(prefix, params)
    tol = _tie_tolerance(params.gamma[d], params.alpha, prior, float(errors.min()))
    return _select(cand, errors, tol)


def _naive_errors(prefix, cand, level, params):
    N, gamma = params.N, params.gamma
    d = len(prefix)
    om = omega_table(N, params.alpha)
    scaled = (cand * pow(params.b, level, N)) % N
    e1 = first_increment(prefix[0], N, params.alpha, gamma[0])
    return kernels.naive_errors(prefix, gamma[: d + 1], om, scaled, e1)


@dataclass
class ConstructionResult:
    params: LatticeParams
    schedule: ReductionSchedule
    t1: int
    t2: int
    z_unscaled: list[int]
    z_scaled: list[int]
    step_errors: list[float]
    exclusion_sizes: list[int]
    work: WorkCounters
    forced_drops: list[int] = field(default_factory=list)
    engine: str = "fast"
    policy: str = "none"

    def to_dict(self) -> dict:
        p = self.params
        return {
            "b": p.b,
            "m": p.m,
            "N": p.N,
            "s": p.s,
            "alpha": p.alpha,
            "gamma": list(p.gamma),
            "w": list(self.schedule.w[: p.s]),
            "t1": self.t1,
            "t2": self.t2,
            "engine": self.engine,
            "policy": self.policy,
            "z_unscaled": list(self.z_unscaled),
            "z_scaled": list(self.z_scaled),
            "step_errors": list(self.step_errors),
            "exclusion_sizes": list(self.exclusion_sizes),
            "forced_drops": list(self.forced_drops),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ConstructionResult":
        params = LatticeParams(data["b"], data["m"], data["s"], data["alpha"], tuple(data["gamma"]))
        work = WorkCounters.from_dict(data.get("work", {}))
        return cls(
            params=params,
            schedule=ReductionSchedule(tuple(data["w"])),
            t1=int(data["t1"]),
            t2=int(data["t2"]),
            z_unscaled=[int(v) for v in data["z_unscaled"]],
            z_scaled=[int(v) for v in data["z_scaled"]],
            step_errors=[float(v) for v in data["step_errors"]],
            exclusion_sizes=[int(v) for v in data["exclusion_sizes"]],
            work=work,
            forced_drops=[int(v) for v in data.get("forced_drops", [])],
            engine=data.get("engine", "fast"),
            policy=data.get("policy", "none"),
        )


def construct(
    params: LatticeParams,
    schedule: ReductionSchedule,
    policy: ExclusionPolicy | None = None,
    engine: str = "fast",
    check_invariants: bool = False,
) -> ConstructionResult:
    """Run the combined reduced + projection-corrected CBC construction."""
    if engine not in ENGINES:
        raise ValueError(f"engine must be one of {ENGINES}, got {engine!r}")
    policy = policy or ExclusionPolicy()
    N, b, s, alpha, gamma = params.N, params.b, params.s, params.alpha, params.gamma
    t1, t2 = thresholds(schedule, params.m, s)
    w = schedule.w[:s]
    om = omega_table(N, alpha)

    pv = ProductVector.empty(N)
    pv.extend(1, gamma[0], alpha, om)
    history = [Chosen(1, 0, 1)]
    z_unscaled, z_scaled = [1], [1]
    step_errors, exclusion_sizes, forced = [pv.error], [0], []
    work = WorkCounters()
    work.record(StepWork(step=1))

    for j in range(2, s + 1):
        wj = w[j - 1]
        sw = StepWork(step=j)
        if j >= t2:
            z, zt, n_excl = 0, 0, 0
        else:
            space = search_space(params, wj)
            excl = exclusion_next(policy, history, space, params, step=j)
            if excl.forced_drop:
                forced.append(j)
            cand, sw.exclusion_checks = _admissible(space, excl.excluded)
            n_excl = len(excl.excluded)
            scale = pow(b, wj, N)
            if engine == "naive":
                errors = _naive_errors(pv.components, cand, wj, params)
                sw.kernel_ops = cand.size * j * N
            else:
                M = space.modulus
                Q = fold_products(pv.P, M)
                errors = sweep_errors_fft(Q, gamma[j - 1], alpha, cand, pv.error, N)
                bt = params.m - wj
                if UnitGroupPlan.supported(b, bt):
                    sw.kernel_ops = N + unit_group_plan(b, bt, alpha).ops()
                else:
                    sw.kernel_ops = N + cand.size * M
            sw.error_evaluations = int(cand.size)
            tol = _tie_tolerance(gamma[j - 1], alpha, pv.error, float(errors.min()))
            z, _ = _select(cand, errors, tol)
            zt = (scale * z) % N
        pv.extend(zt, gamma[j - 1], alpha, om)
        if check_invariants:
            _check_products(pv)
        history.append(Chosen(z, wj, zt))
        z_unscaled.append(z)
        z_scaled.append(zt)
        step_errors.append(pv.error)
        exclusion_sizes.append(n_excl)
        work.record(sw)

    return ConstructionResult(
        params=params,
        schedule=ReductionSchedule(tuple(w)),
        t1=t1,
        t2=t2,
        z_unscaled=z_unscaled,
        z_scaled=z_scaled,
        step_errors=step_errors,
        exclusion_sizes=exclusion_sizes,
        work=work,
        forced_drops=forced,
        engine=engine,
        policy=policy.describe(),
    )


def _check_products(pv: ProductVector) -> None:
    # mean(P) - 1 cancels catastrophically once the error is tiny, so the
    # comparison carries an absolute floor at the rounding level of mean(P).
    mean = float(np.mean(pv.P))
    tol = 1e-10 * pv.error + 64 * np.finfo(float).eps * mean
    if pv.consistency_gap() > tol:
        raise AssertionError(
            f"product vector drifted from the tracked error at d={pv.d}: "
            f"mean(P)-1={mean - 1.0!r}, error={pv.error!r}"
        )
