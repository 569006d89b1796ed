"""Projection audits and work accounting for constructed generating vectors."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from math import gcd


@dataclass
class StepWork:
    step: int
    error_evaluations: int = 0
    exclusion_checks: int = 0
    kernel_ops: int = 0


@dataclass
class WorkCounters:
    error_evaluations: int = 0
    exclusion_checks: int = 0
    kernel_ops: int = 0
    per_step: list[StepWork] = field(default_factory=list)

    def record(self, step: StepWork) -> None:
        self.per_step.append(step)
        self.error_evaluations += step.error_evaluations
        self.exclusion_checks += step.exclusion_checks
        self.kernel_ops += step.kernel_ops

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "WorkCounters":
        out = cls()
        for item in data.get("per_step", []):
            out.record(StepWork(**item))
        return out


@dataclass(frozen=True)
class PairProjection:
    i: int
    j: int
    diagonal: bool
    antidiagonal: bool
    distinct_point_count: int


@dataclass
class ProjectionReport:
    N: int
    pairs: list[PairProjection]

    @property
    def diagonal_pairs(self) -> list[tuple[int, int]]:
        return [(p.i, p.j) for p in self.pairs if p.diagonal]

    @property
    def antidiagonal_pairs(self) -> list[tuple[int, int]]:
        return [(p.i, p.j) for p in self.pairs if p.antidiagonal]

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "diagonal_pairs": [list(p) for p in self.diagonal_pairs],
            "antidiagonal_pairs": [list(p) for p in self.antidiagonal_pairs],
            "min_distinct_point_count": min(
                (p.distinct_point_count for p in self.pairs), default=self.N
            ),
            "pairs": [asdict(p) for p in self.pairs],
        }


def pair_projection(zi: int, zj: int, N: int, i: int = 1, j: int = 2) -> PairProjection:
    zi, zj = zi % N, zj % N
    return PairProjection(
        i=i,
        j=j,
        diagonal=zi == zj,
        antidiagonal=(zi + zj) % N == 0,
        # gcd(N, 0, 0) = N, so a pair of zero components collapses to 1 point
        distinct_point_count=N // gcd(N, zi, zj),
    )


def projection_report(result=None, *, z_scaled=None, N=None) -> ProjectionReport:
    """Flag 2-d projections whose points lie on the main or anti-diagonal.

    Accepts a construction result, or ``z_scaled`` together with ``N``.
    Indices in the report are 1-based.
    """
    if result is not None:
        z_scaled, N = result.z_scaled, result.params.N
    z = [int(v) for v in z_scaled]
    pairs = [
        pair_projection(z[a], z[b], N, a + 1, b + 1)
        for a in range(len(z))
        for b in range(a + 1, len(z))
    ]
    return ProjectionReport(N=N, pairs=pairs)


@dataclass(frozen=True)
class CostAudit:
    counters: WorkCounters
    budget: int
    passed: bool

    def to_dict(self) -> dict:
        out = self.counters.to_dict()
        out["budget"] = self.budget
        out["within_budget"] = self.passed
        return out


def cost_audit(result) -> CostAudit:
    """Compare the total number of exclusion checks with the ``s*N`` budget."""
    budget = result.params.s * result.params.N
    return CostAudit(result.work, budget, result.work.exclusion_checks <= budget)
