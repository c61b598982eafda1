import math

import numpy as np
import pytest

from monorelab.model import is_isotonic, lp_error
from monorelab.oracle import (
    brute_max_isotonic_set,
    oracle_trim_err,
    oracle_weak_l2_linear,
    oracle_weak_linf,
    oracle_weak_lp,
    random_dag_instance,
    random_linear_instance,
    random_points_instance,
)
from monorelab.pava import l1_isotonic_linear
from monorelab.relabel import (
    l0_regression,
    l1_isotonic_dag,
    linf_midpoint,
    max_isotonic_vertices,
    strong_l0inf,
    trim_err,
    weak_l00,
    weak_l01,
    weak_l02_approx,
    weak_l0inf,
    windows,
)

from conftest import linear_from_values, trials

INST_L1 = [0, 3, 1, -1, -2, -3, -4, 2]   # unique kept set {0, 2, 7}
INST_INF = [0, 0, 8, -2, 2, 2]           # unique kept set {0, 1, 4, 5}


def test_windows_golden():
    inst = linear_from_values(INST_L1)
    w = windows(inst, [0, 2, 7])
    assert (w.lo_val[1], w.hi_val[1]) == (0, 1)
    for v in range(3, 7):
        assert (w.lo_val[v], w.hi_val[v]) == (1, 2)
    # kept vertices pin to their own value
    for v, val in [(0, 0), (2, 1), (7, 2)]:
        assert w.lo_val[v] == w.hi_val[v] == val


def test_windows_empty_and_full():
    inst = linear_from_values([1, 2, 3])
    w = windows(inst, [])
    assert np.all(w.lo_rank == 1) and np.all(w.hi_rank == 3)
    w2 = windows(inst, [0, 1, 2])
    assert np.all(w2.lo_rank == w2.hi_rank)


def test_windows_rejects_non_isotonic_pins():
    inst = linear_from_values([2, 1])
    with pytest.raises(ValueError):
        windows(inst, [0, 1])


def test_windows_isotonic_property(rng):
    for maker in (random_linear_instance, random_dag_instance, random_points_instance):
        for _ in range(trials(60)):
            inst = maker(rng, max_n=9)
            kept, _ = max_isotonic_vertices(inst)
            w = windows(inst, kept)
            assert is_isotonic(inst.order, w.lo_rank)
            assert is_isotonic(inst.order, w.hi_rank)
            assert np.all(w.lo_rank <= w.hi_rank)
            # a maximum kept set leaves f outside every other window
            for v in range(inst.n):
                if v not in kept:
                    r = inst.f_ranks[v]
                    assert r < w.lo_rank[v] or r > w.hi_rank[v]


def test_trim_golden_and_idempotent():
    inst = linear_from_values(INST_L1)
    w = windows(inst, [0, 2, 7])
    t = w.clip_values(inst.f_values)
    assert list(t) == [0, 1, 1, 1, 1, 1, 1, 2]
    assert list(w.clip_values(t)) == list(t)

    inst2 = linear_from_values(INST_INF)
    w2 = windows(inst2, [0, 1, 4, 5])
    g = w2.clip_values(linf_midpoint(inst2))
    assert list(g) == [0, 0, 2, 2, 2, 2]
    inside = w2.clip_values([0, 0, 1, 1, 2, 2])
    assert list(inside) == [0, 0, 1, 1, 2, 2]


def test_trim_err_golden():
    inst = linear_from_values(INST_INF)
    assert list(trim_err(inst)) == [2, 2, 10, 10, 6, 6]
    assert list(trim_err(linear_from_values([1, 2, 3]))) == [0, 0, 0]
    assert list(trim_err(linear_from_values([5, 1]))) == [4, 4]


def test_trim_err_matches_definition(rng):
    for maker in (random_linear_instance, random_dag_instance, random_points_instance):
        for _ in range(trials(60)):
            inst = maker(rng, max_n=9)
            assert np.allclose(trim_err(inst), oracle_trim_err(inst))


def test_l0_regression_golden():
    res = l0_regression(linear_from_values([2, 2, 2, 0, 0, 1, 1]))
    assert list(res.g) == [0, 0, 0, 0, 0, 1, 1]
    assert res.l0_distance == 3

    iso = l0_regression(linear_from_values([1, 2, 3]))
    assert list(iso.g) == [1, 2, 3] and iso.l0_distance == 0

    two = l0_regression(linear_from_values([2, 1]))
    assert two.l0_distance == 1
    assert two.g[0] == two.g[1]


def test_l0_regression_matches_oracle(rng):
    for maker in (random_linear_instance, random_dag_instance, random_points_instance):
        for _ in range(trials(120)):
            inst = maker(rng, max_n=9)
            res = l0_regression(inst)
            size, _ = brute_max_isotonic_set(inst)
            assert res.l0_distance == inst.n - size
            assert is_isotonic(inst.order, res.g)
            assert np.count_nonzero(res.g != inst.f_values) == res.l0_distance


def test_non_isotonic_trim_still_yields_isotonic_fill():
    from monorelab.model import LinearOrder

    # trimming f into these windows is not order-preserving; the closure is
    res = l0_regression(linear_from_values([0, 5, -3, 2]))
    assert is_isotonic(LinearOrder(4), res.g)
    assert res.l0_distance == 2


def test_l1_isotonic_dag_golden():
    inst = linear_from_values(INST_L1)
    g = l1_isotonic_dag(inst, inst.f_values)
    assert list(g) == [-1, -1, -1, -1, -1, -1, -1, 2]
    iso = linear_from_values([1, 2, 3])
    assert list(l1_isotonic_dag(iso, iso.f_values)) == [1, 2, 3]


def test_l1_isotonic_dag_random(rng):
    # linear: PAVA with lower medians is an independent reference
    for _ in range(trials(80)):
        inst = random_linear_instance(rng, max_n=9)
        g = l1_isotonic_dag(inst, inst.f_values)
        ref = l1_isotonic_linear(inst.f_values)
        assert np.sum(np.abs(inst.f_values - g)) == pytest.approx(
            np.sum(np.abs(inst.f_values - ref)))
    # dags: exhaustive fills over the data values
    for _ in range(trials(50)):
        inst = random_dag_instance(rng, max_n=7)
        g = l1_isotonic_dag(inst, inst.f_values)
        assert is_isotonic(inst.order, g)
        best, _ = oracle_weak_lp(inst, [], 1)
        assert np.sum(np.abs(inst.f_values - g)) == pytest.approx(best)


def test_weak_l01_golden():
    inst = linear_from_values(INST_L1)
    res = weak_l01(inst)
    assert list(res.g) == [0, 1, 1, 1, 1, 1, 1, 2]
    assert res.lp_error == 16
    # optimize-then-trim is strictly worse here by exactly 1
    kept, _ = max_isotonic_vertices(inst)
    w = windows(inst, kept)
    alt = w.clip_values(l1_isotonic_dag(inst, inst.f_values))
    assert list(alt) == [0, 0, 1, 1, 1, 1, 1, 2]
    assert np.sum(np.abs(inst.f_values - alt)) == 17


def test_weak_l01_matches_oracle(rng):
    for maker in (random_linear_instance, random_dag_instance, random_points_instance):
        for _ in range(trials(60)):
            inst = maker(rng, max_n=8)
            kept, _ = max_isotonic_vertices(inst)
            res = weak_l01(inst, kept)
            assert is_isotonic(inst.order, res.g)
            assert np.all(res.g[kept] == inst.f_values[kept])
            assert res.lp_error == pytest.approx(oracle_weak_lp(inst, kept, 1)[0])
            # never worse than optimizing first and trimming after
            w = windows(inst, kept)
            alt = w.clip_values(l1_isotonic_dag(inst, inst.f_values))
            assert res.lp_error <= np.sum(np.abs(inst.f_values - alt)) + 1e-9


def test_weak_l0inf_golden():
    inst = linear_from_values(INST_INF)
    res = weak_l0inf(inst)
    assert list(res.g) == [0, 0, 2, 2, 2, 2]
    assert res.lp_error == 6
    # trim-then-optimize lands at 7
    kept, _ = max_isotonic_vertices(inst)
    w = windows(inst, kept)
    trimmed = linear_from_values(list(w.clip_values(inst.f_values)))
    alt = linf_midpoint(trimmed)
    assert list(alt) == [0, 0, 1, 1, 2, 2]
    assert lp_error(inst.f_values, alt, math.inf) == 7


def test_weak_l0inf_matches_oracle(rng):
    for maker in (random_linear_instance, random_dag_instance, random_points_instance):
        for _ in range(trials(60)):
            inst = maker(rng, max_n=9)
            kept, _ = max_isotonic_vertices(inst)
            res = weak_l0inf(inst, kept)
            assert is_isotonic(inst.order, res.g)
            assert res.lp_error == pytest.approx(oracle_weak_linf(inst, kept))


def test_weak_l0inf_never_worse_than_trim_then_optimize(rng):
    for _ in range(trials(150)):
        inst = random_linear_instance(rng, max_n=10)
        kept, _ = max_isotonic_vertices(inst)
        w = windows(inst, kept)
        res = weak_l0inf(inst, kept)
        alt = linear_from_values(list(w.clip_values(inst.f_values)))
        naive = lp_error(inst.f_values, linf_midpoint(alt), math.inf)
        assert res.lp_error <= naive + 1e-9


def test_trimmed_max_deviation_bound(rng):
    for _ in range(trials(80)):
        inst = random_linear_instance(rng, max_n=9)
        kept, _ = max_isotonic_vertices(inst)
        w = windows(inst, kept)
        te = max((trim_err(inst)[v] for v in kept), default=0.0)
        # arbitrary isotonic g: the trim never exceeds max(its error, trim-err)
        g = np.maximum.accumulate(rng.uniform(-10, 10, size=inst.n))
        bound = max(lp_error(inst.f_values, g, math.inf), te)
        assert lp_error(inst.f_values, w.clip_values(g), math.inf) <= bound + 1e-9
        # equality when g is the Linf-optimal midpoint regression
        mid = linf_midpoint(inst)
        got = lp_error(inst.f_values, w.clip_values(mid), math.inf)
        assert got == pytest.approx(max(lp_error(inst.f_values, mid, math.inf), te))


def test_strong_l0inf_golden():
    inst = linear_from_values(INST_INF)
    res = strong_l0inf(inst)
    assert list(res.g) == [0, 0, 2, 2, 2, 2]
    r = trim_err(inst)
    assert max(r[v] for v in res.kept_set) == 6

    iso = strong_l0inf(linear_from_values([1, 2, 3]))
    assert list(iso.g) == [1, 2, 3]


def test_strong_l0inf_matches_oracle(rng):
    for maker in (random_linear_instance, random_dag_instance, random_points_instance):
        for _ in range(trials(60)):
            inst = maker(rng, max_n=9)
            res = strong_l0inf(inst)
            size, sets = brute_max_isotonic_set(inst)
            r = oracle_trim_err(inst)
            best = min(max((r[v] for v in C), default=0.0) for C in sets)
            kept_err = max((r[v] for v in res.kept_set), default=0.0)
            assert kept_err == pytest.approx(best)
            assert len(res.kept_set) == size


def test_weak_l00_golden():
    res = weak_l00(linear_from_values([2, 2, 2, 0, 0, 1, 1]))
    assert list(res.g) == [0, 0, 0, 0, 0, 1, 1]
    assert res.stage_counts == (4, 0, 3)

    iso = weak_l00(linear_from_values([0, 1, 2, 3]))
    assert iso.stage_counts == (4, 0, 0, 0)


def test_weak_l00_three_chain():
    # all three single-vertex kept sets are maximum; the canonical cut keeps
    # the first vertex, one of the valid weak outcomes
    res = weak_l00(linear_from_values([3, 2, 1]))
    assert res.stage_counts in {(1, 2, 0), (1, 1, 1)}
    assert list(res.g) == [3, 3, 3]


def test_weak_l00_properties(rng):
    for maker in (random_linear_instance, random_dag_instance, random_points_instance):
        for _ in range(trials(60)):
            inst = maker(rng, max_n=8)
            res = weak_l00(inst)
            assert is_isotonic(inst.order, res.g)
            size, _ = brute_max_isotonic_set(inst)
            assert res.stage_counts[0] == size
            assert sum(res.stage_counts) == inst.n
            assert res.l0_distance == inst.n - size


def test_weak_l02_approx_examples():
    iso = linear_from_values([1, 2, 3])
    res = weak_l02_approx(iso, eps=1e-8)
    assert np.allclose(res.g, [1, 2, 3])

    two = linear_from_values([2, 0])
    res2 = weak_l02_approx(two, C=[0], eps=1e-6)
    assert np.allclose(res2.g, [2, 2], atol=1e-6)
    with pytest.raises(ValueError):
        weak_l02_approx(two, eps=0.0)


def test_weak_l02_approx_matches_oracle(rng):
    for _ in range(trials(60)):
        inst = random_linear_instance(rng, max_n=8)
        kept, _ = max_isotonic_vertices(inst)
        res = weak_l02_approx(inst, C=kept, eps=1e-4)
        _, g_star = oracle_weak_l2_linear(inst, kept)
        assert np.max(np.abs(res.g - g_star)) <= 1e-4


def test_outputs_agree_with_f_outside_violators(rng):
    from monorelab.violator import violating_pairs

    for _ in range(trials(60)):
        inst = random_linear_instance(rng, max_n=9)
        vio = violating_pairs(inst)
        outside = sorted(set(range(inst.n)) - set(vio.vio_vertices))
        for res in (l0_regression(inst), weak_l01(inst), weak_l0inf(inst),
                    strong_l0inf(inst), weak_l00(inst)):
            assert np.all(res.g[outside] == inst.f_values[outside])
