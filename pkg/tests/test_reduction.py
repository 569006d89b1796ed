import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from latgen.korobov import LatticeParams
from latgen.numtheory import ilog, is_prime, primitive_root
from latgen.reduction import (
    ReductionSchedule,
    parse_schedule,
    reduced_space,
    search_space,
    space_size,
    thresholds,
    totient_pp,
)


def test_numtheory():
    assert [n for n in range(20) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19]
    assert ilog(2, 1) == 0 and ilog(2, 8) == 3 and ilog(3, 26) == 2


@pytest.mark.parametrize("p", [3, 5, 7, 11, 13])
def test_primitive_root_generates_mod_p_squared(p):
    g = primitive_root(p)
    M = p * p
    seen = {pow(g, k, M) for k in range(M - p)}
    assert len(seen) == M - p


class TestSchedule:
    @pytest.mark.parametrize("w", [(), (1, 1), (0, 2, 1), (0, -1)])
    def test_invalid(self, w):
        with pytest.raises(ValueError):
            ReductionSchedule(w)

    def test_families(self):
        assert ReductionSchedule.constant(2, 4).w == (0, 2, 2, 2)
        assert ReductionSchedule.linear(0.5, 5).w == (0, 0, 1, 1, 2)
        assert ReductionSchedule.logarithmic(2, 5).w == (0, 1, 1, 2, 2)

    def test_parse(self):
        assert parse_schedule("list:0,0,1,3", 3, 2).w == (0, 0, 1)
        assert parse_schedule("const:1", 3, 2).w == (0, 1, 1)
        assert parse_schedule("log", 4, 3).w == (0, 0, 1, 1)
        for bad in ("list:0", "linear:-1", "geometric:2", "const:x"):
            with pytest.raises(ValueError):
                parse_schedule(bad, 3, 2)


@given(st.sampled_from([2, 3, 5, 7]), st.integers(0, 6))
def test_totient(b, k):
    n = b**k
    assert totient_pp(b, k) == sum(1 for u in range(1, n + 1) if math.gcd(u, n) == 1)


class TestSearchSpace:
    @pytest.mark.parametrize("b,m,w", [(2, 5, 0), (2, 5, 2), (3, 4, 1), (5, 3, 0), (3, 2, 2), (2, 3, 7)])
    def test_units(self, b, m, w):
        sp = reduced_space(b, m, w)
        M = b ** max(m - w, 0)
        expect = [u for u in range(1, max(M, 2)) if math.gcd(u, M) == 1] if w < m else [1]
        assert list(sp.candidates) == expect
        assert sp.size == space_size(b, m, w) == len(expect)
        assert expect[0] in sp and (b not in sp or w >= m)

    def test_readonly(self):
        with pytest.raises(ValueError):
            reduced_space(2, 4, 0).candidates[0] = 5

    def test_search_space_from_params(self):
        p = LatticeParams(3, 3, 2, 2.0, (1.0, 1.0))
        assert search_space(p, 1).modulus == 9


class TestThresholds:
    def test_examples(self):
        assert thresholds((0, 0, 1, 3, 3), 3, 5) == (2, 4)
        assert thresholds((0, 0, 0), 3, 3) == (3, 4)
        assert thresholds((0, 5), 2, 2) == (1, 2)

    @given(st.lists(st.integers(0, 3), min_size=1, max_size=10), st.integers(1, 4))
    def test_regime_partition(self, incs, m):
        w = [0]
        for v in incs[1:]:
            w.append(w[-1] + v % 2)
        s = len(w)
        t1, t2 = thresholds(w, m, s)
        assert 1 <= t1 < t2 <= s + 1
        assert all(w[j - 1] == 0 for j in range(1, t1 + 1))
        assert all(0 < w[j - 1] < m for j in range(t1 + 1, t2))
        assert all(w[j - 1] >= m for j in range(t2, s + 1))
