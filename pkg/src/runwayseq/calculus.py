"""Class-sequence analytics and closed-form deltas for sequence transformations."""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Sequence

from .separation import Layout, SeparationModel, Task, min_separation
from .sequence import Aircraft, Infeasible, Schedule, compute_times

Kind = tuple[int, Task]
Quint = tuple[int, int, int, int, int]


# ---------------------------------------------------------------- gamma and its families

def gamma(model: SeparationModel, task: Task, q: Sequence[int]) -> int:
    i1, i2, i3, i4, i5 = q
    M = model.matrix(Task(task))

    def y(a, b):
        return M[a - 1][b - 1]

    return y(i1, i2) + y(i2, i3) + y(i4, i5) - y(i1, i3) - y(i4, i2) - y(i2, i5)


_FAMILIES = (
    lambda a, b, c, d, e: a >= b >= c and d >= e,
    lambda a, b, c, d, e: a >= b and b < c and d >= e,
    lambda a, b, c, d, e: a < b and b >= c and d >= e,
    lambda a, b, c, d, e: a >= b and b < c and d < e,
    lambda a, b, c, d, e: a < b and b >= c and d < e,
    lambda a, b, c, d, e: a >= b >= c and d < e,
)


def families_of(q: Sequence[int]) -> list[int]:
    """Indices of every family predicate the quintuple satisfies."""
    return [k for k, pred in enumerate(_FAMILIES) if pred(*q)]


@dataclass(frozen=True)
class GammaSets:
    task: Task
    families: tuple[frozenset, ...]
    omega: tuple[frozenset, ...]
    unclassified: frozenset

    def complement(self, k: int) -> frozenset:
        return self.families[k] - self.omega[k]

    @property
    def total(self) -> int:
        return sum(len(f) for f in self.families) + len(self.unclassified)


def enumerate_gamma_sets(model: SeparationModel, task: Task) -> GammaSets:
    if model.eta > 8:
        raise ValueError("quintuple enumeration is limited to eta <= 8")
    fam = [set() for _ in _FAMILIES]
    om = [set() for _ in _FAMILIES]
    rest = set()
    for q in itertools.product(range(1, model.eta + 1), repeat=5):
        ks = families_of(q)
        if not ks:
            rest.add(q)
            continue
        g = gamma(model, task, q)
        for k in ks:
            fam[k].add(q)
            if g >= 0:
                om[k].add(q)
    return GammaSets(Task(task), tuple(frozenset(s) for s in fam),
                     tuple(frozenset(s) for s in om), frozenset(rest))


def enumerate_theta_sets(model: SeparationModel) -> tuple[frozenset, frozenset]:
    n, t0 = model.eta, model.t0
    T = model.land
    rng = range(1, n + 1)
    th0, th1 = set(), set()
    for i, k, j, h in itertools.product(rng, repeat=4):
        if T(i, k) + t0 < T(i, j) + T(j, k):
            continue
        if i < j < k and i < h < k:
            th0.add((i, k, j, h))
        if k < i < j and k < h < j:
            th1.add((i, k, j, h))
    return frozenset(th0), frozenset(th1)


@dataclass(frozen=True)
class SpecialPairSets:
    E: frozenset
    E1: frozenset
    E20: frozenset
    E21: frozenset
    E30: frozenset
    E31: frozenset
    E4: frozenset


def special_pair_sets(model: SeparationModel) -> SpecialPairSets:
    """Pair sets computed from the matrices by their defining (in)equalities.

    Doubled or tripled arithmetic keeps everything integral.
    """
    n, t0, dl, r2 = model.eta, model.t0, model.delta, model.rho2
    T, D = model.land, model.take
    rng = range(1, n + 1)

    E = {(k, j) for k in rng for j in rng if 2 < k < j
         and t0 - 2 * dl <= 2 * (T(2, j) - T(k, j)) < t0} if n >= 2 else set()
    E1 = {(k, j) for k in rng for j in rng if 2 < k <= j and 3 * (D(2, j) - D(k, j)) == t0} if n >= 2 else set()
    E20 = {(k, j) for k in rng for j in rng if 3 < k < j and D(3, j) == D(k, j)} if n >= 3 else set()
    E21 = {(k, j) for k in rng for j in rng if 3 < k < j and 3 * (D(3, j) - D(k, j)) == t0} if n >= 3 else set()
    E30, E31 = set(), set()
    if 2 <= r2 <= n:
        E30 = {(k, r2) for k in range(1, r2) if 3 * (D(k, r2) - D(k, r2 - 1)) == t0}
        E31 = {(r2 - 1, j) for j in range(r2, n + 1) if 3 * (D(r2 - 1, j) - D(r2, j)) == t0}
    E4 = {(k, j) for k in rng for j in rng if n - 1 <= k <= j and n >= 2
          and 3 * (D(n - 1, j) - D(k, j)) == t0}
    return SpecialPairSets(*(frozenset(s) for s in (E, E1, E20, E21, E30, E31, E4)))


# ---------------------------------------------------------------- increments

def insertion_increment(model: SeparationModel, layout: Layout, leading: Kind, inserted: Kind,
                        trailing: Kind) -> int:
    y = min_separation
    return (y(model, leading, inserted, layout) + y(model, inserted, trailing, layout)
            - y(model, leading, trailing, layout))


extraction_increment = insertion_increment


def omega_min_bound(model: SeparationModel, context: Sequence[Kind], candidate: Kind,
                    layout: Layout = Layout.SINGLE) -> int:
    """Lower bound on the shift of the two aircraft after the slot when ``candidate``
    goes between context[1] and context[2]."""
    (c1, t1), (c2, t2), (c3, t3), (c4, t4) = context
    c5, t5 = candidate
    Y = model.sep_table(layout)
    cross = model.td + model.dt if layout is Layout.SINGLE else model.pd + model.dp
    if t2 == t3 == t5:
        base = Y[t2][c2][t5][c5] + Y[t5][c5][t3][c3] - Y[t2][c2][t3][c3]
        if layout is Layout.DUAL and t4 != t3:
            # the fourth aircraft may stay bound by its own runway; no shift is forced
            return min(base, 0)
        return base
    if t2 == t3:
        return max(cross - Y[t2][c2][t3][c3], 0)
    corr = min(cross - Y[t1][c1][t3][c3], cross - Y[t2][c2][t4][c4], 0)
    if t2 == t5:
        return corr + Y[t2][c2][t5][c5]
    return corr + Y[t5][c5][t3][c3]


# ---------------------------------------------------------------- merges

class MixedTasksWithoutTransitions(ValueError):
    pass


@dataclass(frozen=True)
class SegmentedSequence:
    """Class-monotone segments; ``tasks`` gives each segment's task."""

    segments: tuple[tuple[int, ...], ...]
    tasks: tuple[Task, ...]

    def __post_init__(self):
        segs = tuple(tuple(s) for s in self.segments)
        tasks = tuple(Task(t) for t in self.tasks)
        object.__setattr__(self, "segments", segs)
        object.__setattr__(self, "tasks", tasks)
        if len(segs) != len(tasks) or not segs:
            raise ValueError("need one task per non-empty segment list")
        for s in segs:
            if not s or any(s[i] < s[i + 1] for i in range(len(s) - 1)):
                raise ValueError(f"segment {s} is not class-monotonically decreasing")
        for a in range(len(segs) - 1):
            if tasks[a] is tasks[a + 1] and not segs[a][-1] < segs[a + 1][0]:
                raise ValueError("same-task neighbouring segments must meet at a breakpoint")

    @classmethod
    def pure(cls, classes: Sequence[int], task: Task) -> "SegmentedSequence":
        segs, cur = [], [classes[0]]
        for c in classes[1:]:
            if c > cur[-1]:
                segs.append(tuple(cur))
                cur = [c]
            else:
                cur.append(c)
        segs.append(tuple(cur))
        return cls(tuple(segs), (task,) * len(segs))

    @property
    def mixed(self) -> bool:
        return len(set(self.tasks)) > 1

    def kinds(self) -> list[Kind]:
        return [(c, t) for seg, t in zip(self.segments, self.tasks) for c in seg]

    def merged(self, first: Task | None = None) -> list[Kind]:
        """The class-monotone arrangement the delta is measured against."""
        if not self.mixed:
            t = self.tasks[0]
            return [(c, t) for c in sorted((c for s in self.segments for c in s), reverse=True)]
        first = self.tasks[0] if first is None else Task(first)
        out = []
        for t in (first, Task(1 - first)):
            cs = sorted((c for s, st in zip(self.segments, self.tasks) if st is t for c in s), reverse=True)
            out += [(c, t) for c in cs]
        return out


def _self_increment(M, k: int) -> int:
    return M[k - 1][k - 1] - M[k - 1][0]


def merge_delta(model: SeparationModel, seg: SegmentedSequence, layout: Layout = Layout.SINGLE) -> int:
    """Closed-form F(segmented) - F(merged) for unconstrained windows."""
    if seg.mixed:
        return _merge_delta_mixed(model, seg, layout)
    M = model.matrix(seg.tasks[0])

    def m(a, b):
        return M[a - 1][b - 1]

    segs = seg.segments
    d = min(c for s in segs for c in s)
    out = m(d, 1) - m(segs[-1][-1], 1)
    for a in range(len(segs) - 1):
        out += m(segs[a][-1], segs[a + 1][0]) - m(segs[a][-1], 1)
    for k in range(1, model.eta + 1):
        e = _self_increment(M, k)
        if e:
            cnt = sum(1 for s in segs if k in s)
            if cnt:
                out -= (cnt - 1) * e
    return out


def _merge_delta_mixed(model: SeparationModel, seg: SegmentedSequence, layout: Layout) -> int:
    segs, tasks = seg.segments, seg.tasks
    for a in range(len(segs) - 1):
        if tasks[a] is tasks[a + 1]:
            raise MixedTasksWithoutTransitions(f"segments {a} and {a + 1} share a task")

    def m(task, a, b):
        return model.matrix(task)[a - 1][b - 1]

    def y(ka, kb):
        return min_separation(model, ka, kb, layout)

    merged = seg.merged()
    first = merged[0][1]
    split = next(i for i, k in enumerate(merged) if k[1] is not first)
    n1, n2, n3 = merged[split - 1], merged[split], merged[-1]
    last = (segs[-1][-1], tasks[-1])
    out = m(n1[1], n1[0], 1) - y(n1, n2) + m(n3[1], n3[0], 1) - m(last[1], last[0], 1)
    for a in range(len(segs) - 1):
        end = (segs[a][-1], tasks[a])
        nxt = (segs[a + 1][0], tasks[a + 1])
        out += y(end, nxt) - m(end[1], end[0], 1)
    for task in (Task.LANDING, Task.TAKEOFF):
        M = model.matrix(task)
        for k in range(1, model.eta + 1):
            e = _self_increment(M, k)
            if e:
                cnt = sum(1 for s, t in zip(segs, tasks) if t is task and k in s)
                if cnt:
                    out -= (cnt - 1) * e
    return out


# ---------------------------------------------------------------- breakpoint drift

def _pivot_positions(order: Sequence[Aircraft]) -> list[int]:
    """Breakpoint aircraft, transition aircraft and their trailers."""
    pos = set()
    for i in range(len(order) - 1):
        a, b = order[i], order[i + 1]
        if a.task is not b.task or a.cls < b.cls:
            pos.add(i)
            pos.add(i + 1)
    return sorted(pos)


def breakpoint_signature(order: Sequence[Aircraft], table) -> tuple[int, ...]:
    out = []
    for i in range(len(order) - 1):
        a, b = order[i], order[i + 1]
        if a.task is b.task and a.cls < b.cls:
            out.append(table[a.task][a.cls][b.task][b.cls])
    return tuple(out)


def _kind_key(order: Sequence[Aircraft]) -> tuple:
    return tuple((a.cls, a.task, a.fmin, a.fmax) for a in order)


def drift_moves(order: Sequence[Aircraft]):
    """Candidate reorders: single breakpoint/transition aircraft first, then the
    breakpoint aircraft together with its trailer, then every other single move."""
    n = len(order)
    pivots = _pivot_positions(order)
    seen_src = set()
    for i in pivots:
        seen_src.add(i)
        for q in range(n):
            if q != i:
                yield ("one", i, q)
    for i in pivots:
        if i + 1 < n:
            for q in range(n - 1):
                if q != i:
                    yield ("two", i, q)
    for i in range(n):
        if i not in seen_src:
            for q in range(n):
                if q != i:
                    yield ("one", i, q)


def apply_move(order: Sequence[Aircraft], move) -> list[Aircraft]:
    kind, i, q = move
    lst = list(order)
    if kind == "one":
        x = lst.pop(i)
        lst.insert(q, x)
        return lst
    block = lst[i:i + 2]
    del lst[i:i + 2]
    lst[q:q] = block
    return lst


def breakpoint_drift_set(s: Schedule, model: SeparationModel, layout: Layout | None = None,
                         budget: int = 64, strict: bool = False) -> list[tuple[Aircraft, ...]]:
    """Orders with the same makespan as ``s`` reachable by breakpoint-centred moves.

    With ``strict`` the separations at breakpoints must also be preserved, so
    only members of the same basis are returned. Orders differing only by
    swapping interchangeable aircraft count once.
    """
    layout = s.layout if layout is None else layout
    table = model.sep_table(layout)
    target = max(s.times) if s.times else s.t0
    sig = breakpoint_signature(s.order, table)
    start = tuple(s.order)
    out = [start]
    seen = {_kind_key(start)}
    if budget <= 1:
        return out
    queue = deque([start])
    while queue and len(out) < budget:
        cur = queue.popleft()
        for mv in drift_moves(cur):
            cand = apply_move(cur, mv)
            key = _kind_key(cand)
            if key in seen:
                continue
            seen.add(key)
            try:
                times = compute_times(cand, table, s.t0)
            except Infeasible:
                continue
            if max(times) != target:
                continue
            if strict and breakpoint_signature(cand, table) != sig:
                continue
            tc = tuple(cand)
            out.append(tc)
            queue.append(tc)
            if len(out) >= budget:
                break
    return out
