import itertools
import random

import pytest

from runwayseq.oracle import LimitExceeded, oracle_dual, oracle_single, subset_dp
from runwayseq.separation import Layout
from runwayseq.sequence import Infeasible, earliest_schedule, landing, takeoff

from conftest import random_aircraft


def _brute(items, model, layout):
    best = None
    for perm in itertools.permutations(items):
        try:
            f = earliest_schedule(perm, model, layout, full_pairs=True).makespan
        except Infeasible:
            continue
        best = f if best is None else min(best, f)
    return best


def test_three_landings(single_model):
    res = oracle_single([landing("C", 3), landing("A", 1), landing("B", 2)], single_model)
    assert res.makespan == 150
    assert [a.id for a in res.witness.order] == ["C", "B", "A"]


def test_one_aircraft(single_model):
    assert oracle_single([landing("a", 1)], single_model).makespan == 0


def test_two_landings(single_model):
    res = oracle_single([landing("E", 5), landing("D", 4)], single_model)
    assert res.makespan == 60
    assert [a.id for a in res.witness.order] == ["E", "D"]


def test_heavy_then_light_pair(single_model):
    res = oracle_dual([landing("A", 1), landing("B", 2)], [], single_model)
    assert res.makespan == 90


def test_dual_simultaneous(dual_model):
    res = oracle_dual([landing("l", 6)], [takeoff("t", 6)], dual_model)
    assert res.makespan == 0
    assert [a.id for a in res.witness.order] == ["l", "t"]


def test_takeoffs_only(dual_model):
    assert oracle_dual([], [takeoff("x", 2), takeoff("y", 2)], dual_model).makespan == 80


def test_limit(single_model):
    items = [landing(f"a{i}", 1) for i in range(11)]
    with pytest.raises(LimitExceeded):
        oracle_single(items, single_model)
    with pytest.raises(LimitExceeded):
        oracle_dual(items[:5], [takeoff(f"t{i}", 1) for i in range(5)], single_model)


def test_infeasible(single_model):
    with pytest.raises(Infeasible):
        oracle_single([landing("a", 1, 0, 0), landing("b", 1, 0, 0)], single_model)


def test_optimal_order_count(single_model):
    res = oracle_single([landing("a", 6), landing("b", 6)], single_model)
    assert res.makespan == 60 and res.optimal_orders == 1


@pytest.mark.parametrize("layout", list(Layout))
def test_matches_brute_force(single_model, layout):
    rng = random.Random(17)
    for _ in range(60):
        items = random_aircraft(rng, rng.randint(1, 6), "mixed", 500, rng.choice([None, 300]))
        want = _brute(items, single_model, layout)
        if want is None:
            with pytest.raises(Infeasible):
                oracle_single(items, single_model, layout=layout)
        else:
            assert oracle_single(items, single_model, layout=layout).makespan == want


def test_subset_dp_matches_enumeration(single_model):
    rng = random.Random(5)
    for _ in range(40):
        items = random_aircraft(rng, rng.randint(1, 7), rng.choice(["landing", "takeoff"]), 500)
        assert subset_dp(items, single_model) == oracle_single(items, single_model).makespan


def test_subset_dp_needs_one_task(single_model):
    with pytest.raises(ValueError):
        subset_dp([landing("a", 1), takeoff("b", 1)], single_model)
