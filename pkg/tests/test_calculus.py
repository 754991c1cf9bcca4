import itertools
import random

import pytest

from runwayseq.calculus import (MixedTasksWithoutTransitions, SegmentedSequence, breakpoint_drift_set,
                                enumerate_gamma_sets, enumerate_theta_sets, gamma, insertion_increment,
                                merge_delta, omega_min_bound, special_pair_sets)
from runwayseq.separation import Layout, SeparationModel, Task
from runwayseq.sequence import Aircraft, earliest_schedule, landing

L, T = Task.LANDING, Task.TAKEOFF
S = Layout.SINGLE


def test_gamma_examples(single_model):
    assert gamma(single_model, L, (1, 2, 3, 4, 5)) == -37
    assert gamma(single_model, T, (1, 2, 3, 4, 5)) == -40
    for k in range(1, 7):
        assert gamma(single_model, L, (k,) * 5) == 0


def test_gamma_sets(single_model):
    gs = enumerate_gamma_sets(single_model, L)
    assert gs.total == 6 ** 5
    for a, b in itertools.combinations(range(6), 2):
        assert not gs.families[a] & gs.families[b]
    assert (3, 3, 3, 3, 3) in gs.omega[0]
    # strictly rising first three classes fit none of the families
    assert (1, 2, 3, 4, 5) in gs.unclassified
    assert (2, 1, 1, 5, 4) in gs.families[0]


def test_gamma_sets_split_by_sign(single_model):
    gs = enumerate_gamma_sets(single_model, T)
    for k in range(6):
        for q in gs.omega[k]:
            assert gamma(single_model, T, q) >= 0
        for q in gs.complement(k):
            assert gamma(single_model, T, q) < 0


def test_theta_sets(single_model):
    th0, th1 = enumerate_theta_sets(single_model)
    assert (4, 6, 5, 5) in th0
    assert (1, 3, 2, 2) not in th0
    assert th1 == frozenset()


def test_special_pair_sets(single_model):
    sp = special_pair_sets(single_model)
    assert sp.E == {(3, 4), (3, 6)}
    assert sp.E1 == {(3, 3), (3, 4), (3, 5), (3, 6), (4, 6)}
    assert sp.E20 == {(4, 6)}
    assert sp.E21 == {(5, 6)}


def test_insertion_increment_examples(single_model):
    assert insertion_increment(single_model, S, (2, L), (4, L), (5, L)) == 46
    assert insertion_increment(single_model, S, (6, L), (6, L), (6, L)) == 60
    assert insertion_increment(single_model, S, (4, T), (5, T), (6, T)) == 40


def test_landing_insertion_strictly_positive(single_model):
    for a, b, c in itertools.product(range(1, 7), repeat=3):
        assert insertion_increment(single_model, S, (a, L), (b, L), (c, L)) > 0


def test_merge_delta_examples(single_model):
    assert merge_delta(single_model, SegmentedSequence(((4,), (5,)), (L, L))) == 8
    assert merge_delta(single_model, SegmentedSequence(((5, 4), (5,)), (L, L))) == 0
    assert merge_delta(single_model, SegmentedSequence(((4,), (5,)), (T, T))) == 0


def test_segmented_sequence_validation():
    with pytest.raises(ValueError):
        SegmentedSequence(((4, 5),), (L,))
    with pytest.raises(ValueError):
        SegmentedSequence(((5,), (4,)), (L, L))


def test_mixed_merge_needs_transitions(single_model):
    seg = SegmentedSequence(((4,), (5,), (3,)), (L, L, T))
    with pytest.raises(MixedTasksWithoutTransitions):
        merge_delta(single_model, seg)


def test_omega_examples(single_model):
    ctx = [(1, L), (2, L), (4, L), (1, L)]
    assert omega_min_bound(single_model, ctx, (5, L)) == 82
    ctx = [(1, L), (3, L), (4, L), (1, L)]
    assert omega_min_bound(single_model, ctx, (1, T)) == 45


def test_omega_clamps_at_zero(single_model):
    wide = single_model.replace(td=200, dt=200)
    big = wide.with_entry(L, 3, 4, 500)
    assert omega_min_bound(big, [(1, L), (3, L), (4, L), (1, L)], (1, T)) == 0


@pytest.mark.parametrize("layout", list(Layout))
def test_omega_is_a_lower_bound(single_model, layout):
    rng = random.Random(3)
    for _ in range(1000):
        ctx = [(rng.randint(1, 6), rng.choice((L, T))) for _ in range(4)]
        cand = (rng.randint(1, 6), rng.choice((L, T)))
        base = [Aircraft(f"c{i}", c, t) for i, (c, t) in enumerate(ctx)]
        x = Aircraft("x", *cand)
        s0 = earliest_schedule(base, single_model, layout, full_pairs=True)
        s1 = earliest_schedule(base[:2] + [x] + base[2:], single_model, layout, full_pairs=True)
        shift = min(s1.time_of(a.id) - s0.time_of(a.id) for a in base[2:])
        assert shift >= omega_min_bound(single_model, ctx, cand, layout), (ctx, cand)


def test_drift_set_of_monotone_order(single_model):
    s = earliest_schedule([landing("x", 6), landing("y", 4), landing("z", 2)], single_model)
    got = breakpoint_drift_set(s, single_model)
    assert [tuple(a.cls for a in o) for o in got] == [(6, 4, 2)]
    assert len(breakpoint_drift_set(s, single_model, budget=1)) == 1


def _toy_model() -> SeparationModel:
    M = [[60] * 5 for _ in range(5)]
    for (i, j), v in {(1, 2): 180, (1, 3): 160, (2, 3): 60, (2, 5): 60, (3, 4): 60, (4, 5): 120,
                      (4, 2): 140}.items():
        M[i - 1][j - 1] = v
    D = [[80] * 5 for _ in range(5)]
    return SeparationModel(5, 60, 8, 3, 5, M, D, 75, 60, 0, 60, name="toy")


def test_drift_set_contains_equal_makespan_reorder():
    m = _toy_model()
    s = earliest_schedule([landing(f"a{i}", i) for i in range(1, 6)], m)
    assert s.makespan == 420
    got = {tuple(a.cls for a in o) for o in breakpoint_drift_set(s, m)}
    assert (1, 2, 3, 4, 5) in got
    assert (1, 3, 4, 2, 5) in got


def test_drift_members_keep_makespan(single_model):
    rng = random.Random(8)
    for _ in range(40):
        order = [landing(f"a{i}", rng.randint(1, 6)) for i in range(6)]
        s = earliest_schedule(order, single_model)
        for o in breakpoint_drift_set(s, single_model, budget=16):
            assert earliest_schedule(o, single_model, full_pairs=True).makespan == s.makespan
