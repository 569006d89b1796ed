"""Weighted Korobov space: Fourier weights, the 1-d kernel and worst-case errors.

The squared worst-case error of a rank-1 lattice rule with generating
vector ``z`` (components in ``0..N-1``) is the dual-lattice sum

    e^2(z) = sum over h != 0 with h.z = 0 (mod N) of prod_j r(gamma_j, h_j)

which equals ``-1 + (1/N) sum_k prod_j (1 + gamma_j * omega(k z_j / N))``.
We never form that difference directly.  Writing ``P_j`` for the partial
products, the error is accumulated as a sum of nonnegative increments

    e^2_j = e^2_{j-1} + gamma_j * (1/N) sum_k omega(k z_j / N) * P_{j-1}[k]

with the first increment known in closed form.  This keeps small errors
(``~N^-alpha``) accurate instead of drowning them in cancellation.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy import special

from . import kernels
from .numtheory import is_prime

ZETA_MIN_ARG = 1.0 + 1e-9
OMEGA_TOL = 1e-12
OMEGA_MAX_TERMS = 10**8
MAX_N = 2**31 - 1


@dataclass(frozen=True)
class LatticeParams:
    """Point count ``N = b**m``, dimension ``s``, smoothness and product weights."""

    b: int
    m: int
    s: int
    alpha: float
    gamma: tuple[float, ...] = field(default=())

    def __post_init__(self):
        if not is_prime(int(self.b)):
            raise ValueError(f"base b must be prime, got {self.b}")
        if int(self.m) < 1:
            raise ValueError(f"exponent m must be >= 1, got {self.m}")
        if int(self.s) < 1:
            raise ValueError(f"dimension s must be >= 1, got {self.s}")
        if not self.alpha > 1:
            raise ValueError(f"smoothness alpha must be > 1, got {self.alpha}")
        gamma = tuple(float(g) for g in self.gamma)
        if len(gamma) < self.s:
            raise ValueError(f"need {self.s} weights, got {len(gamma)}")
        if any(not g > 0 or not math.isfinite(g) for g in gamma):
            raise ValueError("weights gamma_j must be finite and > 0")
        if int(self.b) ** int(self.m) > MAX_N:
            raise ValueError(f"N = {self.b}^{self.m} exceeds {MAX_N}")
        object.__setattr__(self, "b", int(self.b))
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "s", int(self.s))
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "gamma", gamma[: self.s])

    @property
    def N(self) -> int:
        return self.b**self.m


def zeta(x: float) -> float:
    """Riemann zeta for real ``x > 1`` (rejects ``x <= 1 + 1e-9``)."""
    if not x > ZETA_MIN_ARG:
        raise ValueError(f"zeta argument must exceed {ZETA_MIN_ARG}, got {x}")
    return float(special.zeta(x, 1.0))


def _check_alpha(alpha):
    if not alpha > 1:
        raise ValueError(f"alpha must be > 1, got {alpha}")


def r_alpha_1d(gamma_j: float, h: int, alpha: float) -> float:
    _check_alpha(alpha)
    if not gamma_j > 0:
        raise ValueError("gamma_j must be > 0")
    if h == 0:
        return 1.0
    return gamma_j * abs(h) ** (-alpha)


def r_alpha_prod(gamma: Sequence[float], h: Sequence[int], alpha: float) -> float:
    if len(h) > len(gamma):
        raise ValueError("h is longer than the weight sequence")
    out = 1.0
    for g, hj in zip(gamma, h):
        out *= r_alpha_1d(g, int(hj), alpha)
    return out


# ---------------------------------------------------------------------------
# the kernel omega(x) = sum_{h != 0} exp(2 pi i h x) / |h|^alpha

def _bernoulli_form(x, alpha):
    """Closed forms via Bernoulli polynomials for alpha in {2, 4, 6}."""
    pi = math.pi
    if alpha == 2:
        return 2 * pi**2 * ((x - 1.0) * x + 1.0 / 6)
    x2 = x * x
    if alpha == 4:
        b4 = ((x - 2.0) * x + 1.0) * x2 - 1.0 / 30
        return -(2 * pi**4 / 3) * b4
    if alpha == 6:
        b6 = (((x - 3.0) * x + 2.5) * x2 - 0.5) * x2 + 1.0 / 42
        return (4 * pi**6 / 45) * b6
    return None


def _has_closed_form(alpha) -> bool:
    return alpha in (2, 4, 6)


def omega_series(x: float, alpha: float, terms: int) -> float:
    """``2 * sum_{h=1}^{terms} cos(2 pi h x) / h**alpha`` summed in blocks."""
    total = 0.0
    block = 1 << 20
    for start in range(1, terms + 1, block):
        h = np.arange(start, min(start + block, terms + 1), dtype=np.float64)
        total += float(np.sum(np.cos(2 * np.pi * h * x) / h**alpha))
    return 2.0 * total


def omega(x: float, alpha: float, tol: float = OMEGA_TOL, max_terms: int = OMEGA_MAX_TERMS) -> float:
    """The one-dimensional Korobov kernel ``2 sum_{h>=1} cos(2 pi h x) / h**alpha``.

    Exact for alpha in {2, 4, 6}; otherwise the cosine series is truncated
    where the tail bound ``2 H^(1-alpha) / (alpha-1)`` drops below ``tol``.
    """
    _check_alpha(alpha)
    if not 0.0 <= x < 1.0:
        raise ValueError(f"x must lie in [0, 1), got {x}")
    if _has_closed_form(alpha):
        return float(_bernoulli_form(float(x), alpha))
    if x == 0.0:
        return 2.0 * zeta(alpha)
    terms = math.ceil((2.0 / (tol * (alpha - 1.0))) ** (1.0 / (alpha - 1.0)))
    if terms > max_terms:
        warnings.warn(
            f"omega series for alpha={alpha} needs {terms} terms; capped at {max_terms}",
            RuntimeWarning,
            stacklevel=2,
        )
        terms = max_terms
    return omega_series(float(x), alpha, terms)


def _omega_table_hurwitz(N: int, alpha: float) -> np.ndarray:
    # Group the series by residue of h mod N: each class sums to a Hurwitz
    # zeta value, and the table is the cosine transform of those class sums.
    c = np.empty(N)
    c[0] = 2.0 * zeta(alpha)
    if N > 1:
        q = np.arange(1, N, dtype=np.float64) / N
        c[1:] = special.zeta(alpha, q) + special.zeta(alpha, 1.0 - q)
    c *= float(N) ** (-alpha)
    return np.fft.fft(c).real


@lru_cache(maxsize=32)
def _omega_table_cached(N: int, alpha: float) -> np.ndarray:
    if _has_closed_form(alpha):
        table = _bernoulli_form(np.arange(N, dtype=np.float64) / N, alpha)
    else:
        table = _omega_table_hurwitz(N, alpha)
    table = np.ascontiguousarray(table, dtype=np.float64)
    table.flags.writeable = False
    return table


def omega_table(N: int, alpha: float) -> np.ndarray:
    """Read-only array ``omega(i/N)`` for ``i = 0..N-1``."""
    _check_alpha(alpha)
    if N < 1:
        raise ValueError("N must be >= 1")
    return _omega_table_cached(int(N), float(alpha))


# ---------------------------------------------------------------------------
# worst-case error

def first_increment(z: int, N: int, alpha: float, gamma: float) -> float:
    """Exact squared error of the one-dimensional rule with generator ``z``.

    The dual lattice of ``z`` is ``(N/g) Z`` with ``g = gcd(z, N)``.
    """
    g = math.gcd(int(z), int(N))
    return gamma * 2.0 * zeta(alpha) * (g / N) ** alpha


def _validated_prefix(ztilde, params: LatticeParams) -> list[int]:
    z = [int(v) for v in np.asarray(ztilde, dtype=np.int64).ravel()]
    if not z:
        raise ValueError("generating vector prefix must be non-empty")
    if len(z) > params.s:
        raise ValueError(f"prefix length {len(z)} exceeds dimension s={params.s}")
    N = params.N
    for v in z:
        if not 0 <= v < N:
            raise ValueError(f"component {v} outside [0, {N - 1}]")
    return z


def prefix_errors(ztilde, params: LatticeParams) -> np.ndarray:
    """Squared errors of every prefix ``z[:1], z[:2], ...`` of ``ztilde``."""
    z = _validated_prefix(ztilde, params)
    N, alpha, gamma = params.N, params.alpha, params.gamma
    om = omega_table(N, alpha)
    out = np.empty(len(z))
    e = first_increment(z[0], N, alpha, gamma[0])
    out[0] = e
    P = kernels.update_products(np.ones(N), z[0], gamma[0], om)
    for j in range(1, len(z)):
        e += gamma[j] * kernels.kernel_mean(P, z[j], om)
        out[j] = e
        if j + 1 < len(z):
            P = kernels.update_products(P, z[j], gamma[j], om)
    return out


def squared_error(ztilde, params: LatticeParams) -> float:
    """Squared worst-case error of the lattice rule with (scaled) generator prefix."""
    return float(prefix_errors(ztilde, params)[-1])


def _residue_weights(z, N, gamma, alpha, H):
    # h ordered 0, 1, -1, 2, -2, ... so larger H only appends terms
    pos = np.arange(1, H + 1, dtype=np.int64)
    h = np.empty(2 * H, dtype=np.int64)
    h[0::2] = pos
    h[1::2] = -pos
    w = gamma * np.abs(h).astype(np.float64) ** (-alpha)
    nonzero = np.bincount((h * z) % N, weights=w, minlength=N)
    return nonzero


def dual_lattice_error_truncated(ztilde, params: LatticeParams, H: int) -> float:
    """Sum of ``r(gamma, h)`` over dual-lattice vectors with ``max|h_j| <= H``.

    Evaluated exactly, grouping the box by residues ``h.z mod N`` so the
    cost is ``O(d N^2 + d H)`` instead of ``(2H+1)^d``.  All summands are
    positive, so the value increases monotonically towards ``e^2(z)``.
    """
    z = _validated_prefix(ztilde, params)
    N = params.N
    if len(z) > 4:
        raise ValueError("truncated dual-lattice sum is limited to d <= 4")
    if H < N:
        raise ValueError(f"truncation bound H={H} must be >= N={N}")
    t = np.arange(N)
    shift = (t[:, None] - t[None, :]) % N
    # F[t]: weight of nonzero h-prefixes with h.z = t (mod N)
    F = np.zeros(N)
    for zj, gj in zip(z, params.gamma):
        Gplus = _residue_weights(zj, N, gj, params.alpha, H)
        G = Gplus.copy()
        G[0] += 1.0  # h_j = 0
        F = (F[shift] * G[None, :]).sum(axis=1) + Gplus
    return float(F[0])
