"""Fast evaluation of one CBC step over all candidates.

For the current prefix the product vector ``P[k] = prod_j (1 + gamma_j *
omega(k z_j / N))`` is kept in memory.  A candidate at reduction level ``w``
enters as ``b**w * z``, and ``{k b^w z / N} = {k z / M}`` with
``M = b**(m - w)`` depends on ``k mod M`` only, so ``P`` is folded to length
``M`` first.  The sweep then needs

    T(z) = sum_{r=0}^{M-1} Q[r] * omega(r z / M)      for every unit z mod M,

either directly in ``O(|Z| M)`` or, splitting ``r = b^i u`` with ``u`` a unit
modulo ``b^(t-i)``, as one cyclic correlation per level along a generator
of the unit group, in ``O(M log M)``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import fft as sfft

from . import kernels
from .korobov import first_increment, omega_table
from .numtheory import primitive_root

log = logging.getLogger(__name__)


@dataclass
class ProductVector:
    """Per-point products of the current prefix plus its accumulated error."""

    P: np.ndarray
    d: int = 0
    error: float = 0.0
    components: list = field(default_factory=list)

    @classmethod
    def empty(cls, N: int) -> "ProductVector":
        return cls(np.ones(N))

    @property
    def N(self) -> int:
        return self.P.shape[0]

    def increment(self, ztilde: int, gamma: float, alpha: float, om: np.ndarray) -> float:
        """Error increase caused by appending ``ztilde`` (nonnegative)."""
        if self.d == 0:
            return first_increment(ztilde, self.N, alpha, gamma)
        return gamma * kernels.kernel_mean(self.P, ztilde, om)

    def extend(self, ztilde: int, gamma: float, alpha: float, om: np.ndarray) -> float:
        """Append one scaled component; returns the new squared error."""
        self.error += self.increment(ztilde, gamma, alpha, om)
        self.P = update_products(self.P, ztilde, gamma, om)
        self.d += 1
        self.components.append(int(ztilde))
        return self.error

    def consistency_gap(self) -> float:
        """``|mean(P) - 1 - error|``, zero in exact arithmetic."""
        return abs(float(np.mean(self.P)) - 1.0 - self.error)


def update_products(P: np.ndarray, ztilde: int, gamma: float, om: np.ndarray) -> np.ndarray:
    if om.shape[0] != P.shape[0]:
        raise ValueError("omega table length must equal N")
    return kernels.update_products(P, int(ztilde) % P.shape[0], gamma, om)


def fold_products(P: np.ndarray, M: int) -> np.ndarray:
    """``Q[r] = sum_{k = r mod M} P[k]``."""
    N = P.shape[0]
    if M < 1 or N % M:
        raise ValueError(f"modulus {M} does not divide N={N}")
    return P.reshape(N // M, M).sum(axis=0)


def _candidate_array(candidates) -> np.ndarray:
    cand = getattr(candidates, "candidates", candidates)
    return np.ascontiguousarray(np.asarray(cand, dtype=np.int64).ravel())


def sweep_errors_direct(Q, gamma_next, alpha, candidates, prior_error, N):
    """Squared errors of ``prefix ++ (b^w z,)`` for every candidate ``z``.

    ``Q`` is the prefix product vector folded to ``M = len(Q)``; the result
    is aligned with ``candidates``.  Cost ``O(|Z| M)``.
    """
    Q = np.asarray(Q, dtype=np.float64)
    cand = _candidate_array(candidates)
    raw = kernels.sweep_direct(Q, omega_table(Q.shape[0], alpha), cand, 1)
    return prior_error + gamma_next * raw / N


# ---------------------------------------------------------------------------
# unit-group plans


@dataclass
class _Level:
    modulus: int
    offset: int
    powers: np.ndarray | None = None  # generator powers, FFT levels
    paired: bool = False  # b == 2: fold u and -u together
    w_hat: np.ndarray | None = None  # rfft of omega along the powers
    units: np.ndarray | None = None  # tiny levels handled directly


class UnitGroupPlan:
    """Generator orderings of the unit groups modulo ``b**i``, ``i <= t``."""

    def __init__(self, b: int, t: int, alpha: float):
        self.b, self.t, self.alpha = b, t, alpha
        self.modulus = M = b**t
        if not self.supported(b, t):
            raise ValueError(f"no unit-group decomposition for modulus {b}^{t}")
        if b == 2:
            g, order = 3, M // 4
        else:
            g, order = primitive_root(b), M - M // b
        powers = _powers(g, order, M)
        self.dlog = np.full(M, -1, dtype=np.int64)
        self.dlog[powers] = np.arange(order)
        if b == 2:
            self.dlog[M - powers] = np.arange(order)
        self.levels = []
        for i in range(t):
            Mi, off = b ** (t - i), b**i
            if b == 2 and Mi <= 4:
                units = np.arange(1, Mi, 2, dtype=np.int64)
                self.levels.append(_Level(Mi, off, units=units))
                continue
            Li = Mi // 4 if b == 2 else Mi - Mi // b
            pw = powers[:Li] % Mi
            w = omega_table(Mi, alpha)[pw]
            self.levels.append(
                _Level(Mi, off, powers=pw, paired=(b == 2), w_hat=sfft.rfft(w))
            )
        self.omega0 = float(omega_table(1, alpha)[0])

    @staticmethod
    def supported(b: int, t: int) -> bool:
        return t >= 1 and (b != 2 or t >= 3)

    def correlate(self, Q: np.ndarray, cand: np.ndarray) -> np.ndarray:
        """``sum_r Q[r] * omega(r z / M)`` for unit candidates ``z``."""
        c = self.dlog[cand % self.modulus]
        if np.any(c < 0):
            raise ValueError("FFT sweep candidates must be units modulo M")
        out = np.full(cand.shape[0], Q[0] * self.omega0)
        for lv in self.levels:
            if lv.units is not None:
                om = omega_table(lv.modulus, self.alpha)
                for u in lv.units:
                    out += Q[lv.offset * u] * om[(u * cand) % lv.modulus]
                continue
            q = Q[lv.offset * lv.powers]
            if lv.paired:
                q = q + Q[lv.offset * (lv.modulus - lv.powers)]
            L = lv.powers.shape[0]
            corr = sfft.irfft(np.conj(sfft.rfft(q)) * lv.w_hat, n=L)
            out += corr[c % L]
        return out

    def ops(self) -> int:
        """Rough flop count of one sweep, for the work counters."""
        total = self.modulus
        for lv in self.levels:
            L = lv.powers.shape[0] if lv.powers is not None else lv.units.shape[0]
            total += 3 * L * max(1, math.ceil(math.log2(max(L, 2))))
        return total


def _powers(g, order, M):
    out = np.empty(order, dtype=np.int64)
    v = 1
    for a in range(order):
        out[a] = v
        v = v * g % M
    return out


@lru_cache(maxsize=64)
def unit_group_plan(b: int, t: int, alpha: float) -> UnitGroupPlan:
    return UnitGroupPlan(b, t, alpha)


def _split_modulus(M: int):
    for b in range(2, M + 1):
        if M % b == 0:
            t = 0
            v = M
            while v % b == 0:
                v //= b
                t += 1
            if v != 1:
                raise ValueError(f"modulus {M} is not a prime power")
            return b, t
    return None, 0


def sweep_errors_fft(Q, gamma_next, alpha, candidates, prior_error, N):
    """Same contract as :func:`sweep_errors_direct`, in ``O(M log M)``.

    Falls back to the direct sweep (logging a notice) for moduli without a
    cyclic decomposition here: ``M = 1`` and ``M in {2, 4}``.
    """
    Q = np.asarray(Q, dtype=np.float64)
    M = Q.shape[0]
    cand = _candidate_array(candidates)
    b, t = _split_modulus(M) if M > 1 else (None, 0)
    if b is None or not UnitGroupPlan.supported(b, t):
        log.info("FFT sweep not available for modulus %d; using direct sweep", M)
        return sweep_errors_direct(Q, gamma_next, alpha, cand, prior_error, N)
    raw = unit_group_plan(b, t, float(alpha)).correlate(Q, cand)
    return prior_error + gamma_next * raw / N
