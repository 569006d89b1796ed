import numpy as np
import pytest

from latgen import kernels
from latgen.korobov import omega_table


def test_backend_switching():
    prev = kernels.use_backend("numpy")
    try:
        assert kernels.backend() == "numpy"
        with pytest.raises(ValueError):
            kernels.use_backend("cuda")
    finally:
        kernels.use_backend(prev)
    assert "numpy" in kernels.available_backends()


def _ref_products(P, z, g, om):
    N = P.shape[0]
    return P * (1 + g * om[(np.arange(N) * z) % N])


@pytest.mark.parametrize("N,z", [(8, 3), (27, 10), (125, 0), (64, 63)])
def test_update_and_mean(backend, N, z):
    rng = np.random.default_rng(N)
    P = rng.uniform(0.5, 2.0, N)
    om = omega_table(N, 2.0)
    np.testing.assert_allclose(kernels.update_products(P, z, 0.7, om), _ref_products(P, z, 0.7, om), rtol=1e-14)
    ref = np.mean(P * om[(np.arange(N) * z) % N])
    assert kernels.kernel_mean(P, z, om) == pytest.approx(ref, rel=1e-12, abs=1e-14)


def test_sweep_direct(backend):
    rng = np.random.default_rng(1)
    M, N = 27, 81
    Q = rng.uniform(size=M)
    om = omega_table(N, 2.0)
    cand = np.array([1, 2, 4, 5, 26])
    got = kernels.sweep_direct(Q, om, cand, 3)
    ref = [sum(Q[r] * om[((r * c) % M) * 3] for r in range(M)) for c in cand]
    np.testing.assert_allclose(got, ref, rtol=1e-13)


def test_naive_errors(backend):
    N = 16
    om = omega_table(N, 2.0)
    prefix = np.array([1, 5])
    gammas = np.array([1.0, 0.5, 0.25])
    cand = np.array([1, 3, 7, 9])
    k = np.arange(N)
    base = (1 + om[k % N]) * (1 + 0.5 * om[(5 * k) % N])
    e1 = float(np.mean(1 + om) - 1)
    got = kernels.naive_errors(prefix, gammas, om, cand, e1)
    ref = [np.mean(base * (1 + 0.25 * om[(c * k) % N])) - 1 for c in cand]
    np.testing.assert_allclose(got, ref, rtol=1e-12)


def test_backends_agree():
    if len(kernels.available_backends()) < 2:
        pytest.skip("numba not installed")
    N = 3**6
    om = omega_table(N, 2.0)
    P = np.random.default_rng(0).uniform(0.5, 3, N)
    out = {}
    for name in ("numpy", "numba"):
        prev = kernels.use_backend(name)
        try:
            out[name] = (kernels.kernel_mean(P, 17, om), kernels.update_products(P, 17, 0.3, om))
        finally:
            kernels.use_backend(prev)
    assert out["numpy"][0] == pytest.approx(out["numba"][0], rel=1e-12)
    np.testing.assert_allclose(out["numpy"][1], out["numba"][1], rtol=1e-15)
