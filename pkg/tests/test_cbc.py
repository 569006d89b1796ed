import math

import numpy as np
import pytest

from latgen.cbc import (
    Chosen,
    ConstructionResult,
    EmptyCandidateSetError,
    ExclusionPolicy,
    cbc_step_naive,
    construct,
    exclusion_next,
)
from latgen.korobov import LatticeParams, prefix_errors, squared_error, zeta
from latgen.reduction import ReductionSchedule, parse_schedule, reduced_space

from oracles import exhaustive_cbc


def lp(b, m, s, alpha=2.0, decay=2.0):
    return LatticeParams(b, m, s, alpha, tuple((j + 1) ** -decay for j in range(s)))


class TestPolicy:
    def test_parse_and_describe(self):
        pol = ExclusionPolicy.parse("custom:2=3,5;4=7")
        assert pol.custom == {2: frozenset({3, 5}), 4: frozenset({7})}
        assert pol.describe() == "custom:2=3,5;4=7"
        assert ExclusionPolicy.parse("no-repeat").describe() == "no-repeat"
        with pytest.raises(ValueError):
            ExclusionPolicy.parse("sometimes")
        with pytest.raises(ValueError):
            ExclusionPolicy.parse("none:3")

    def test_no_repeat_same_level_only(self):
        p = lp(2, 4, 4)
        hist = [Chosen(1, 0, 1), Chosen(3, 0, 3), Chosen(5, 1, 10)]
        ex = exclusion_next(ExclusionPolicy("no-repeat"), hist, reduced_space(2, 4, 0), p)
        assert ex.excluded == {1, 3} and not ex.forced_drop
        ex = exclusion_next(ExclusionPolicy("no-repeat"), hist, reduced_space(2, 4, 1), p)
        assert ex.excluded == {5}

    def test_anti_diagonal(self):
        p = lp(3, 2, 3)
        hist = [Chosen(1, 0, 1), Chosen(2, 0, 2)]
        ex = exclusion_next(ExclusionPolicy("anti-diagonal"), hist, reduced_space(3, 2, 0), p)
        assert ex.excluded == {1, 2, 8, 7}

    def test_forced_drop_and_strict(self):
        p = lp(3, 1, 4)
        hist = [Chosen(1, 0, 1), Chosen(2, 0, 2)]
        space = reduced_space(3, 1, 0)
        ex = exclusion_next(ExclusionPolicy("no-repeat"), hist, space, p)
        assert ex.forced_drop and ex.excluded == {2}
        with pytest.raises(EmptyCandidateSetError):
            exclusion_next(ExclusionPolicy("no-repeat", strict=True), hist, space, p)

    def test_custom_ignores_outside_values(self):
        p = lp(2, 3, 3)
        ex = exclusion_next(ExclusionPolicy.parse("custom:2=3,4"), [Chosen(1, 0, 1)], reduced_space(2, 3, 0), p)
        assert ex.excluded == {3}


def test_naive_step_example():
    p = LatticeParams(2, 3, 2, 2.0, (1.0, 1.0))
    z, e = cbc_step_naive([1], reduced_space(2, 3, 0), 0, {1}, p)
    assert z == 3
    assert e == pytest.approx(squared_error((1, 3), p), rel=1e-13)


@pytest.mark.parametrize("engine", ["naive", "fast"])
def test_small_example(engine):
    p = LatticeParams(2, 3, 2, 2.0, (1.0, 1.0))
    r = construct(p, parse_schedule("const:0", 2, 2), ExclusionPolicy("no-repeat"), engine)
    assert r.z_scaled == [1, 3]


def test_one_dimensional():
    p = LatticeParams(5, 3, 1, 4.0, (0.3,))
    r = construct(p, ReductionSchedule((0,)))
    assert r.z_scaled == [1]
    assert r.step_errors[0] == pytest.approx(0.3 * 2 * zeta(4.0) / 125**4, rel=1e-14)


@pytest.mark.parametrize("N,s", [(8, 4), (9, 5), (25, 4), (27, 4)])
def test_matches_exhaustive_oracle(N, s):
    b = 2 if N in (8,) else (3 if N in (9, 27) else 5)
    m = round(math.log(N, b))
    p = LatticeParams(b, m, s, 2.0, (1.0, 0.8, 0.5, 0.3, 0.2)[:s])
    r = construct(p, ReductionSchedule((0,) * s), ExclusionPolicy("no-repeat"), "naive")
    assert r.z_scaled == exhaustive_cbc(N, s, 2.0, p.gamma)


@pytest.mark.parametrize(
    "b,m,s,sched,pol",
    [
        (2, 3, 4, "list:0,1,3,3", "none"),
        (3, 5, 7, "log", "no-repeat"),
        (5, 4, 6, "linear:0.5", "anti-diagonal"),
        (2, 7, 8, "const:0", "no-repeat"),
        (2, 6, 10, "linear:1", "anti-diagonal"),
    ],
)
def test_engines_agree(backend, b, m, s, sched, pol):
    p = lp(b, m, s)
    schedule = parse_schedule(sched, s, b)
    fast = construct(p, schedule, ExclusionPolicy(pol), "fast", check_invariants=True)
    naive = construct(p, schedule, ExclusionPolicy(pol), "naive", check_invariants=True)
    assert fast.z_scaled == naive.z_scaled
    np.testing.assert_allclose(fast.step_errors, naive.step_errors, rtol=1e-10)
    np.testing.assert_allclose(fast.step_errors, prefix_errors(fast.z_scaled, p), rtol=1e-12)


def test_regime_example():
    p = lp(2, 3, 4)
    r = construct(p, parse_schedule("list:0,1,3,3", 4, 2))
    assert (r.t1, r.t2) == (1, 3)
    assert r.z_scaled == [1, 2, 0, 0]
    assert r.z_unscaled[2:] == [0, 0]


def test_strict_empty_raises():
    p = lp(3, 1, 4)
    with pytest.raises(EmptyCandidateSetError):
        construct(p, ReductionSchedule((0, 0, 0, 0)), ExclusionPolicy("no-repeat", strict=True))


def test_forced_drop_recorded():
    p = lp(3, 1, 4)
    r = construct(p, ReductionSchedule((0, 0, 0, 0)), ExclusionPolicy("no-repeat"))
    assert r.forced_drops == [3, 4]
    assert all(e < 2 for e in r.exclusion_sizes)


def test_result_round_trip():
    p = lp(3, 3, 4)
    r = construct(p, parse_schedule("log", 4, 3), ExclusionPolicy("anti-diagonal"))
    back = ConstructionResult.from_dict(r.to_dict() | {"work": r.work.to_dict()})
    assert back.to_dict() == r.to_dict()
    assert back.work.exclusion_checks == r.work.exclusion_checks


def test_bad_engine():
    with pytest.raises(ValueError):
        construct(lp(2, 3, 2), ReductionSchedule((0, 0)), engine="gpu")
