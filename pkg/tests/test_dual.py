import random
from fractions import Fraction

import pytest

from runwayseq.dual import (INFINITE_CAPACITY, _capacity, Anchor, BlockKind, DualInstance, NotSemiResident,
                            block_pair_table, detect_blocks, enumerate_blocks, grid_descriptors,
                            match_fixed_landing, pair_increment, semi_resident_shift, solve_dual,
                            tail_insertion)
from runwayseq.oracle import oracle_dual
from runwayseq.separation import Layout, Task
from runwayseq.sequence import (Infeasible, earliest_schedule, is_feasible, landing, relevance_pairs,
                                takeoff)
from runwayseq.single import solve_single

from conftest import random_aircraft


@pytest.fixture(scope="module")
def catalog(dual_model):
    return enumerate_blocks(dual_model)


def test_catalog_cells(catalog):
    d = catalog.lookup(BlockKind.T, Anchor.LANDING_FIRST, (60, 60, 60), 80)
    assert (d.achieved, d.increment) == (120, 40)
    d = catalog.lookup(BlockKind.T, Anchor.TAKEOFF_FIRST, (90, 90, 90), 80)
    assert (d.achieved, d.increment) == (80, 0)
    d = catalog.lookup(BlockKind.D, Anchor.LANDING_FIRST, (60, 80, 80), 135)
    assert (d.achieved, d.increment) == (135, 0)


def test_t_block_capacity(dual_model):
    order = [landing("l1", 6), takeoff("t1", 2), landing("l2", 6), landing("l3", 6), takeoff("t2", 2)]
    s = earliest_schedule(order, dual_model, Layout.DUAL, full_pairs=True)
    assert s.times == (0, 0, 60, 120, 120)
    blocks = detect_blocks(s, dual_model)
    assert len(blocks) == 1
    desc, span = blocks[0]
    assert desc.kind is BlockKind.T
    assert desc.capacity == Fraction(1, 2)
    assert span == (0, 4)


def test_d_block_capacity(dual_model):
    order = [landing("l1", 6), takeoff("t1", 4), takeoff("t2", 5), landing("l2", 6), takeoff("t3", 5)]
    s = earliest_schedule(order, dual_model, Layout.DUAL, full_pairs=True)
    assert s.times == (0, 0, 60, 120, 120)
    blocks = detect_blocks(s, dual_model)
    assert len(blocks) == 1
    desc, _ = blocks[0]
    assert desc.kind is BlockKind.D
    assert desc.capacity == Fraction(2, 1)


def test_pure_schedule_has_no_blocks(dual_model):
    s = earliest_schedule([landing("a", 6), landing("b", 6)], dual_model, Layout.DUAL)
    assert detect_blocks(s, dual_model) == []


def test_capacity_ratio():
    assert _capacity(3, 2) == Fraction(1, 2)
    assert _capacity(2, 3) == Fraction(2, 1)
    assert _capacity(1, 3) == INFINITE_CAPACITY


def test_match_two_takeoffs(dual_model, catalog):
    ls = earliest_schedule([landing(f"l{i}", 6) for i in range(4)], dual_model, Layout.DUAL)
    assert ls.times == (0, 60, 120, 180)
    merged = match_fixed_landing(ls, [takeoff("t1", 2), takeoff("t2", 2)], catalog, dual_model)
    take = sorted(t for a, t in zip(merged.order, merged.times) if a.task is Task.TAKEOFF)
    assert take == [0, 120]
    land = [t for a, t in zip(merged.order, merged.times) if a.task is Task.LANDING]
    assert land == [0, 60, 120, 180]


def test_match_without_takeoffs(dual_model, catalog):
    ls = earliest_schedule([landing(f"l{i}", 6) for i in range(4)], dual_model, Layout.DUAL)
    assert match_fixed_landing(ls, [], catalog, dual_model) == ls


def test_match_one_takeoff(dual_model, catalog):
    ls = earliest_schedule([landing(f"l{i}", 6) for i in range(4)], dual_model, Layout.DUAL)
    merged = match_fixed_landing(ls, [takeoff("t", 3)], catalog, dual_model)
    assert merged.time_of("t") == 0
    assert merged.makespan == 180


def test_match_window_violation(dual_model, catalog):
    ls = earliest_schedule([landing("l", 6)], dual_model, Layout.DUAL)
    with pytest.raises(Infeasible):
        match_fixed_landing(ls, [takeoff("a", 1, 0, 0), takeoff("b", 1, 0, 0)], catalog, dual_model)


def test_tail_insertion_identity(dual_model, catalog):
    ls = earliest_schedule([landing(f"l{i}", 6) for i in range(3)], dual_model, Layout.DUAL)
    merged = match_fixed_landing(ls, [takeoff("t", 3)], catalog, dual_model)
    assert tail_insertion(merged, catalog, dual_model, ls.makespan) == merged


def test_tail_insertion_never_worse(dual_model, catalog):
    rng = random.Random(2)
    for _ in range(60):
        lands = [a for a in random_aircraft(rng, 4, "landing", 300)]
        takes = [a for a in random_aircraft(rng, 4, "takeoff", 300)]
        for i, a in enumerate(takes):
            takes[i] = takeoff(f"t{i}", a.cls, a.fmin)
        ls = solve_single(lands, dual_model, layout=Layout.DUAL).schedule
        merged = match_fixed_landing(ls, takes, catalog, dual_model)
        out = tail_insertion(merged, catalog, dual_model, ls.makespan)
        assert out.makespan <= merged.makespan
        assert is_feasible(out, dual_model)


def test_pair_increments(catalog):
    db = catalog.lookup(BlockKind.D, Anchor.LANDING_FIRST, (60, 60, 60), 68)
    tb = catalog.lookup(BlockKind.T, Anchor.LANDING_FIRST, (60, 60, 60), 80)
    assert db.landing_increment == 52
    assert pair_increment(db, tb) == (52, 40)
    zero = [(a, b) for a in grid_descriptors(catalog) for b in grid_descriptors(catalog)
            if a.kind is BlockKind.D and b.kind is BlockKind.T and a.increment == 0 and b.increment == 0
            and pair_increment(a, b) is not None]
    assert zero
    assert all(pair_increment(a, b) == (0, 0) for a, b in zero)


def test_incompatible_pair_absent(catalog):
    closed = catalog.lookup(BlockKind.D, Anchor.LANDING_FIRST, (60, 80, 80), 135)
    other = catalog.lookup(BlockKind.T, Anchor.TAKEOFF_FIRST, (90, 90, 90), 80)
    assert other.anchor not in closed.exits
    assert pair_increment(closed, other) is None
    table = block_pair_table(catalog)
    descs = grid_descriptors(catalog)
    assert all(descs[j].anchor in descs[i].exits for i, j in table)


def test_semi_resident_swap_offset(dual_model):
    s = earliest_schedule([landing("a", 6), landing("b", 6), takeoff("t", 6)], dual_model, Layout.DUAL)
    assert s.times == (0, 60, 60)
    res = semi_resident_shift(s, 2, dual_model)
    assert res.offset == dual_model.t0
    assert res.schedule.time_of("t") == 0 and res.schedule.time_of("b") == 60
    assert res.absorbed_at is None
    assert res.swap_delta == 0


def test_semi_resident_errors(dual_model):
    s = earliest_schedule([landing("a", 6), landing("b", 6), takeoff("t", 6)], dual_model, Layout.DUAL)
    with pytest.raises(NotSemiResident):
        semi_resident_shift(s, 1, dual_model)
    with pytest.raises(NotSemiResident):
        semi_resident_shift(s, 0, dual_model)


def test_dual_simultaneous(dual_model):
    sol = solve_dual(DualInstance([landing("l", 6)], [takeoff("t", 6)]), dual_model)
    assert sol.makespan == 0
    assert [a.id for a in sol.schedule.order] == ["l", "t"]


def test_landings_only_reduce_to_single(dual_model):
    lands = [landing("C", 3), landing("A", 1), landing("B", 2)]
    sol = solve_dual(DualInstance(lands, []), dual_model)
    assert sol.makespan == solve_single(lands, dual_model, layout=Layout.DUAL).makespan == 150


def test_task_lists_validated():
    with pytest.raises(ValueError):
        DualInstance([takeoff("t", 1)], [])


def test_small_instances_match_oracle(dual_model):
    rng = random.Random(9)
    for _ in range(40):
        items = random_aircraft(rng, rng.randint(2, 7), "mixed", 500, rng.choice([None, 600]))
        inst = DualInstance.from_aircraft(items)
        try:
            want = oracle_dual(inst.landings, inst.takeoffs, dual_model).makespan
        except Infeasible:
            continue
        sol = solve_dual(inst, dual_model)
        assert sol.makespan == want
        assert is_feasible(sol.schedule, dual_model)
        assert all(p.trailing - p.leading <= 4 for p in relevance_pairs(sol.schedule, dual_model))
