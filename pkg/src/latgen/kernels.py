"""Hot inner loops of the construction.

Every kernel exists twice: a numba ``@njit`` version and a pure-numpy
version with identical semantics.  The numba path is used when numba
imports cleanly and ``LATGEN_DISABLE_NUMBA`` is unset (or ``0``).
``LATGEN_THREADS`` caps the number of numba worker threads.

All index arithmetic is exact int64 arithmetic on residues ``k*z mod N``;
callers guarantee ``N < 2**31`` so that ``k*z`` never overflows.
"""

from __future__ import annotations

import os
from types import SimpleNamespace

import numpy as np

_FALSY = {"", "0", "false", "no", "off"}

DISABLED_BY_ENV = os.environ.get("LATGEN_DISABLE_NUMBA", "").strip().lower() not in _FALSY

try:  # pragma: no cover - exercised implicitly
    import numba
    from numba import njit, prange
except ImportError:  # pragma: no cover
    numba = None
else:
    if "NUMBA_THREADING_LAYER" not in os.environ:
        # the default probe tries TBB first and warns on old TBB builds
        numba.config.THREADING_LAYER = "omp"

HAVE_NUMBA = numba is not None

# Candidate-block size for the vectorised numpy sweeps (elements per gather).
_NP_BLOCK = 1 << 22


# ---------------------------------------------------------------------------
# numpy implementations


def _np_residues(N, z):
    return (np.arange(N, dtype=np.int64) * np.int64(z)) % N


def _np_update_products(P, z, gamma, omega_table):
    N = P.shape[0]
    return P * (1.0 + gamma * omega_table[_np_residues(N, z)])


def _np_kernel_mean(P, z, omega_table):
    N = P.shape[0]
    return float(np.dot(P, omega_table[_np_residues(N, z)])) / N


def _np_naive_errors(prefix, gammas, omega_table, candidates, first_increment):
    N = omega_table.shape[0]
    d = prefix.shape[0]
    k = np.arange(N, dtype=np.int64)
    out = np.empty(candidates.shape[0])
    for c, zc in enumerate(candidates):
        p = np.ones(N)
        e = first_increment
        for j in range(d + 1):
            zj = prefix[j] if j < d else zc
            om = omega_table[(k * zj) % N]
            if j > 0:
                e += gammas[j] * float(np.dot(om, p)) / N
            p = p * (1.0 + gammas[j] * om)
        out[c] = e
    return out


def _np_sweep_direct(Q, omega_table, candidates, stride):
    M = Q.shape[0]
    r = np.arange(M, dtype=np.int64)
    out = np.empty(candidates.shape[0])
    block = max(1, _NP_BLOCK // max(M, 1))
    for start in range(0, candidates.shape[0], block):
        cz = candidates[start:start + block].astype(np.int64)
        idx = (np.outer(cz, r) % M) * stride
        out[start:start + block] = omega_table[idx] @ Q
    return out


NUMPY = SimpleNamespace(
    name="numpy",
    update_products=_np_update_products,
    kernel_mean=_np_kernel_mean,
    naive_errors=_np_naive_errors,
    sweep_direct=_np_sweep_direct,
)


# ---------------------------------------------------------------------------
# numba implementations

if HAVE_NUMBA:

    @njit(cache=True, nogil=True)
    def _nb_update_products(P, z, gamma, omega_table):
        N = P.shape[0]
        out = np.empty(N)
        r = 0
        for k in range(N):
            out[k] = P[k] * (1.0 + gamma * omega_table[r])
            r += z
            if r >= N:
                r -= N
        return out

    @njit(cache=True, nogil=True)
    def _nb_kernel_mean(P, z, omega_table):
        N = P.shape[0]
        acc = 0.0
        r = 0
        for k in range(N):
            acc += P[k] * omega_table[r]
            r += z
            if r >= N:
                r -= N
        return acc / N

    @njit(cache=True, parallel=True)
    def _nb_naive_errors(prefix, gammas, omega_table, candidates, first_increment):
        N = omega_table.shape[0]
        d = prefix.shape[0]
        nc = candidates.shape[0]
        out = np.empty(nc)
        for c in prange(nc):
            acc = np.zeros(d + 1)
            for k in range(N):
                p = 1.0
                for j in range(d + 1):
                    zj = prefix[j] if j < d else candidates[c]
                    om = omega_table[(k * zj) % N]
                    if j > 0:
                        acc[j] += om * p
                    p *= 1.0 + gammas[j] * om
            e = first_increment
            for j in range(1, d + 1):
                e += gammas[j] * acc[j] / N
            out[c] = e
        return out

    @njit(cache=True, parallel=True)
    def _nb_sweep_direct(Q, omega_table, candidates, stride):
        M = Q.shape[0]
        nc = candidates.shape[0]
        out = np.empty(nc)
        for c in prange(nc):
            z = candidates[c] % M
            acc = 0.0
            r = 0
            for i in range(M):
                acc += Q[i] * omega_table[r * stride]
                r += z
                if r >= M:
                    r -= M
            out[c] = acc
        return out

    NUMBA = SimpleNamespace(
        name="numba",
        update_products=_nb_update_products,
        kernel_mean=lambda P, z, om: float(_nb_kernel_mean(P, np.int64(z), om)),
        naive_errors=_nb_naive_errors,
        sweep_direct=_nb_sweep_direct,
    )

    _threads = os.environ.get("LATGEN_THREADS", "").strip()
    if _threads:
        numba.set_num_threads(max(1, min(int(_threads), numba.config.NUMBA_NUM_THREADS)))
else:  # pragma: no cover
    NUMBA = None


_active = NUMBA if (HAVE_NUMBA and not DISABLED_BY_ENV) else NUMPY


def backend() -> str:
    """Name of the active backend, ``"numba"`` or ``"numpy"``."""
    return _active.name


def use_backend(name: str) -> str:
    """Switch the active backend; returns the previous backend's name."""
    global _active
    previous = _active.name
    if name == "numba":
        if not HAVE_NUMBA:
            raise RuntimeError("numba is not installed")
        _active = NUMBA
    elif name == "numpy":
        _active = NUMPY
    else:
        raise ValueError(f"unknown backend {name!r}")
    return previous


def available_backends() -> list[str]:
    return ["numpy", "numba"] if HAVE_NUMBA else ["numpy"]


# ---------------------------------------------------------------------------
# dispatch


def update_products(P: np.ndarray, z: int, gamma: float, omega_table: np.ndarray) -> np.ndarray:
    """Return ``P[k] * (1 + gamma * omega_table[k*z mod N])``."""
    return _active.update_products(P, np.int64(z), float(gamma), omega_table)


def kernel_mean(P: np.ndarray, z: int, omega_table: np.ndarray) -> float:
    """Return ``(1/N) * sum_k P[k] * omega_table[k*z mod N]``."""
    return _active.kernel_mean(P, z, omega_table)


def naive_errors(prefix, gammas, omega_table, candidates, first_increment):
    """Squared errors of ``prefix ++ (c,)`` for every candidate ``c``, each
    evaluated from scratch in O(d N).

    ``gammas`` has length ``len(prefix) + 1``; ``first_increment`` is the
    exactly known error of the first component alone.
    """
    return _active.naive_errors(
        np.ascontiguousarray(prefix, dtype=np.int64),
        np.ascontiguousarray(gammas, dtype=np.float64),
        omega_table,
        np.ascontiguousarray(candidates, dtype=np.int64),
        float(first_increment),
    )


def sweep_direct(Q, omega_table, candidates, stride):
    """``sum_r Q[r] * omega_table[(r*z mod M) * stride]`` for every candidate z."""
    return _active.sweep_direct(
        np.ascontiguousarray(Q, dtype=np.float64),
        omega_table,
        np.ascontiguousarray(candidates, dtype=np.int64),
        np.int64(stride),
    )
