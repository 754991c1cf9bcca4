from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from runwayseq.calculus import SegmentedSequence, gamma, merge_delta
from runwayseq.dual import NotSemiResident, semi_resident_shift
from runwayseq.separation import Layout, Task, builtin_model, min_separation
from runwayseq.sequence import Aircraft, Infeasible, earliest_schedule, has_optimal_path, relevance_pairs

SINGLE = builtin_model("heathrow-recat-single")
DUAL = builtin_model("heathrow-recat-dual")

classes = st.integers(1, 6)
tasks = st.sampled_from(list(Task))
layouts = st.sampled_from(list(Layout))
many = settings(max_examples=1000, deadline=None, suppress_health_check=[HealthCheck.too_slow])


def _span(kinds, model=SINGLE, layout=Layout.SINGLE):
    order = [Aircraft(f"a{i}", c, t) for i, (c, t) in enumerate(kinds)]
    return earliest_schedule(order, model, layout, full_pairs=True).makespan


@st.composite
def windowed(draw, pure):
    n = draw(st.integers(1, 8))
    task = draw(tasks)
    out = []
    for i in range(n):
        rel = draw(st.integers(0, 600))
        width = draw(st.sampled_from([3000, 400, 200]))
        out.append(Aircraft(f"a{i}", draw(classes), task if pure else draw(tasks), rel, rel + width))
    return out


@many
@given(st.lists(classes, min_size=1, max_size=9), tasks)
def test_merge_delta_matches_rescheduling(cls, task):
    seg = SegmentedSequence.pure(cls, task)
    assert merge_delta(SINGLE, seg) == _span(seg.kinds()) - _span(seg.merged())


@many
@given(st.tuples(classes, classes, classes, classes, classes), tasks)
def test_gamma_matches_rescheduling(q, task):
    before = [(q[i], task) for i in (0, 1, 2, 3, 4)]
    after = [(q[i], task) for i in (0, 2, 3, 1, 4)]
    assert _span(before) - _span(after) == gamma(SINGLE, task, q)


@many
@given(windowed(pure=True), layouts)
def test_pure_schedules_relate_to_predecessor_only(items, layout):
    try:
        s = earliest_schedule(items, SINGLE, layout, full_pairs=True)
    except Infeasible:
        return
    assert all(p.trailing - p.leading == 1 for p in relevance_pairs(s, SINGLE))


@many
@given(st.lists(st.tuples(classes, tasks), min_size=1, max_size=9))
def test_unconstrained_mixed_schedule_has_path(kinds):
    order = [Aircraft(f"a{i}", c, t) for i, (c, t) in enumerate(kinds)]
    assert has_optimal_path(earliest_schedule(order, SINGLE), SINGLE)


@many
@given(windowed(pure=False))
def test_dual_relevance_distance(items):
    try:
        s = earliest_schedule(items, DUAL, Layout.DUAL, full_pairs=True)
    except Infeasible:
        return
    assert all(p.trailing - p.leading <= 4 for p in relevance_pairs(s, DUAL))


@many
@given(st.lists(st.tuples(classes, tasks, st.sampled_from([0, 0, 100, 250])), min_size=2, max_size=7),
       st.integers(1, 6))
def test_semi_resident_swap_offset(kinds, k):
    order = [Aircraft(f"a{i}", c, t, r) for i, (c, t, r) in enumerate(kinds)]
    s = earliest_schedule(order, DUAL, Layout.DUAL, full_pairs=True)
    try:
        res = semi_resident_shift(s, k, DUAL)
    except NotSemiResident:
        return
    prev, semi = s.order[k - 1], s.order[k]
    back = min_separation(DUAL, (semi.cls, semi.task), (prev.cls, prev.task), Layout.DUAL)
    total = DUAL.pd + DUAL.dp
    assert res.offset >= total
    if res.schedule.time_of(prev.id) - res.schedule.time_of(semi.id) == back:
        assert res.offset == total
