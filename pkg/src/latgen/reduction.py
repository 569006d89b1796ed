"""Reduced search spaces, prime-power totients and regime thresholds."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .numtheory import ilog, is_prime


@dataclass(frozen=True)
class ReductionSchedule:
    """Nondecreasing reduction exponents ``w_1 = 0 <= w_2 <= ...``."""

    w: tuple[int, ...]

    def __post_init__(self):
        w = tuple(int(v) for v in self.w)
        if not w:
            raise ValueError("reduction schedule must be non-empty")
        if w[0] != 0:
            raise ValueError(f"schedule must start with w_1 = 0, got {w[0]}")
        if any(v < 0 for v in w):
            raise ValueError("schedule entries must be nonnegative")
        if any(a > b for a, b in zip(w, w[1:])):
            raise ValueError(f"schedule must be nondecreasing, got {list(w)}")
        object.__setattr__(self, "w", w)

    def __len__(self):
        return len(self.w)

    def __getitem__(self, j):
        return self.w[j]

    @classmethod
    def constant(cls, c: int, s: int) -> "ReductionSchedule":
        # w_1 is pinned at 0; later coordinates sit at level c.
        return cls((0,) + (int(c),) * (s - 1))

    @classmethod
    def linear(cls, c: float, s: int) -> "ReductionSchedule":
        return cls(tuple(math.floor(c * j) for j in range(s)))

    @classmethod
    def logarithmic(cls, b: int, s: int) -> "ReductionSchedule":
        return cls(tuple(ilog(b, j) for j in range(1, s + 1)))


def parse_schedule(spec: str, s: int, b: int) -> ReductionSchedule:
    """Parse ``list:0,0,1,2`` | ``const:c`` | ``linear:c`` | ``log``."""
    kind, _, arg = spec.partition(":")
    kind = kind.strip().lower()
    if kind == "list":
        values = [int(v) for v in arg.split(",") if v.strip()]
        if len(values) < s:
            raise ValueError(f"schedule list has {len(values)} entries, need {s}")
        return ReductionSchedule(tuple(values[:s]))
    if kind == "const":
        return ReductionSchedule.constant(int(arg), s)
    if kind == "linear":
        c = float(arg)
        if c < 0:
            raise ValueError("linear schedule slope must be >= 0")
        return ReductionSchedule.linear(c, s)
    if kind == "log":
        return ReductionSchedule.logarithmic(b, s)
    raise ValueError(f"unknown schedule spec {spec!r}")


def totient_pp(b: int, k: int) -> int:
    """Euler totient of the prime power ``b**k``."""
    if not is_prime(b):
        raise ValueError(f"b must be prime, got {b}")
    if k < 0:
        raise ValueError("k must be >= 0")
    if k == 0:
        return 1
    return b**k - b ** (k - 1)


@dataclass(frozen=True)
class SearchSpace:
    """Candidates for one CBC step: units below ``modulus = b**(m-w)``."""

    level: int
    modulus: int
    candidates: np.ndarray

    @property
    def size(self) -> int:
        return int(self.candidates.shape[0])

    def __len__(self):
        return self.size

    def __contains__(self, z):
        i = np.searchsorted(self.candidates, z)
        return bool(i < self.size and self.candidates[i] == z)


@lru_cache(maxsize=64)
def reduced_space(b: int, m: int, w: int) -> SearchSpace:
    if w < 0:
        raise ValueError("reduction level must be >= 0")
    if w >= m:
        cand = np.array([1], dtype=np.int64)
        modulus = 1
    else:
        modulus = b ** (m - w)
        if b == 2:
            cand = np.arange(1, modulus, 2, dtype=np.int64)
        else:
            cand = np.arange(1, modulus, dtype=np.int64)
            cand = cand[cand % b != 0]
    cand.flags.writeable = False
    return SearchSpace(level=int(w), modulus=modulus, candidates=cand)


def search_space(params, w: int) -> SearchSpace:
    """The reduced search space at level ``w`` for ``N = b**m``."""
    return reduced_space(params.b, params.m, int(w))


def space_size(b: int, m: int, w: int) -> int:
    return 1 if w >= m else totient_pp(b, m - w)


def thresholds(schedule: ReductionSchedule | Sequence[int], m: int, s: int) -> tuple[int, int]:
    """``(t1, t2)``: last index with ``w_j = 0`` and first with ``w_j >= m``.

    Indices are 1-based.  When no ``w_j`` (``j <= s``) reaches ``m`` the
    sentinel ``t2 = s + 1`` is returned.
    """
    if not isinstance(schedule, ReductionSchedule):
        schedule = ReductionSchedule(tuple(schedule))
    if len(schedule) < s:
        raise ValueError(f"schedule has {len(schedule)} entries, need {s}")
    w = schedule.w[:s]
    t1 = max(j for j in range(1, s + 1) if w[j - 1] == 0)
    t2 = next((j for j in range(1, s + 1) if w[j - 1] >= m), s + 1)
    return t1, t2
