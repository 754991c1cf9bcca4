"""Dual-runway solver: block catalog, block detection and the landing-first pipeline.

Landings use one runway and takeoffs the other. A takeoff may share a time
with a landing that precedes it, but a landing must trail a takeoff by the
takeoff-to-landing cross separation.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Iterable, Sequence

from .calculus import breakpoint_drift_set
from .search import Evaluator, exact_search
from .separation import Layout, SeparationModel, Task
from .sequence import (INF, Aircraft, Infeasible, Schedule, class_breakpoints, earliest_schedule,
                       has_optimal_path, relevance_pairs)
from .single import (Optimality, Solution, SolverOptions, algorithm_orders, fcfs_order, polish,
                     solve_single)


class BlockKind(enum.Enum):
    T = "TBlock"
    D = "DBlock"
    TD = "TDBlock"


class Anchor(enum.Enum):
    LANDING_FIRST = "LandingFirstSameTime"
    TAKEOFF_FIRST = "TakeoffFirstOffsetT0"


class NotBlockDecomposable(ValueError):
    def __init__(self, position: int, message: str = ""):
        self.position = position
        super().__init__(message or f"block grammar violated at position {position}")


class NotSemiResident(ValueError):
    pass


INFINITE_CAPACITY = "∞"


@dataclass(frozen=True)
class BlockDescriptor:
    kind: BlockKind
    landing_pattern: tuple[int, ...]
    takeoff_pattern: tuple[int, ...]
    anchor: Anchor | None
    capacity: Fraction | str
    time_length: int
    increment: int
    initial_redundant_time: int
    landing_times: tuple[int, ...] = ()
    takeoff_times: tuple[int, ...] = ()
    # separation actually achieved between the last two aircraft of the closing task
    achieved: int = 0
    minimum: int = 0
    is_block: bool = True
    # boundary forms available to a block that starts with this block's last two aircraft
    exits: frozenset = frozenset()

    @property
    def landing_increment(self) -> int:
        return self.increment if self.kind is BlockKind.D else 0

    @property
    def takeoff_increment(self) -> int:
        return self.increment if self.kind is BlockKind.T else 0


def cross_ok(model: SeparationModel, landing_time: int, takeoff_time: int) -> bool:
    """Whether a landing and a takeoff can coexist at these times in some order."""
    d = takeoff_time - landing_time
    return d >= model.pd or -d >= model.dp


def _capacity(n_land: int, n_take: int) -> Fraction | str:
    if n_land <= 1:
        return INFINITE_CAPACITY
    return Fraction(n_take - 1, n_land - 1)


def _redundant_time(model: SeparationModel, shifted: Sequence[int], others: Sequence[int],
                    shifted_task: Task, slack: int) -> int:
    """Largest uniform delay of ``shifted`` keeping every cross pair legal (capped at ``slack``)."""
    mu = slack
    for s in shifted:
        for o in others:
            # open interval of delays that make the pair illegal
            if shifted_task is Task.TAKEOFF:
                lo, hi = o - model.dp - s, o + model.pd - s
            else:
                lo, hi = o - model.pd - s, o + model.dp - s
            if hi <= 0:
                continue
            if lo < 0:
                return 0
            mu = min(mu, lo)
    return max(mu, 0)


def describe(order: Sequence[Aircraft], times: Sequence[int], model: SeparationModel,
             end: int | None = None, kind: BlockKind | None = None) -> BlockDescriptor:
    """Descriptor of a block given in sequence order; ``end`` indexes the closing aircraft."""
    n = len(order)
    end = n - 1 if end is None else end
    last = order[end]
    if kind is None:
        kind = BlockKind.T if last.task is Task.TAKEOFF else BlockKind.D
    lands = [(a, t) for a, t in zip(order, times) if a.task is Task.LANDING]
    takes = [(a, t) for a, t in zip(order, times) if a.task is Task.TAKEOFF]
    same = [(i, a, t) for i, (a, t) in enumerate(zip(order, times)) if a.task is last.task and i <= end]
    M = model.matrix(last.task)
    increment = achieved = minimum = 0
    mu0 = 0
    if len(same) >= 2:
        (_, a2, t2), (_, a1, t1) = same[-2], same[-1]
        minimum = M[a2.cls - 1][a1.cls - 1]
        achieved = t1 - t2
        increment = achieved - minimum
        shifted = [t for _, _, t in same[:-1]]
        others = [t for a, t in (takes if last.task is Task.LANDING else lands)]
        mu0 = _redundant_time(model, shifted, others, last.task, increment)
    anchor = None
    if n >= 2 and order[0].task is not order[1].task:
        gap = times[1] - times[0]
        if order[0].task is Task.LANDING and gap == model.pd:
            anchor = Anchor.LANDING_FIRST
        elif order[0].task is Task.TAKEOFF and gap == model.dp:
            anchor = Anchor.TAKEOFF_FIRST
    exits = set()
    if n >= 2 and order[-2].task is not order[-1].task:
        gap = times[-1] - times[-2]
        if order[-2].task is Task.LANDING and gap == model.pd:
            exits.add(Anchor.LANDING_FIRST)
        if order[-2].task is Task.TAKEOFF and gap == model.dp:
            exits.add(Anchor.TAKEOFF_FIRST)
    sched = Schedule(tuple(order), tuple(times), times[0] if times else 0, Layout.DUAL)
    pairs = relevance_pairs(sched, model)
    leads = [p.leading for p in pairs if p.trailing == end]
    ok = leads == [end - 1] and end >= 1 and order[end - 1].task is not last.task
    return BlockDescriptor(
        kind=kind,
        landing_pattern=tuple(a.cls for a, _ in lands),
        takeoff_pattern=tuple(a.cls for a, _ in takes),
        anchor=anchor,
        capacity=_capacity(len(lands), len(takes)),
        time_length=times[end] - times[0],
        increment=increment,
        initial_redundant_time=mu0,
        landing_times=tuple(t for _, t in lands),
        takeoff_times=tuple(t for _, t in takes),
        achieved=achieved,
        minimum=minimum,
        is_block=ok,
        exits=frozenset(exits),
    )


# ---------------------------------------------------------------- synthetic blocks

def _next_legal(model: SeparationModel, t: int, fixed: Sequence[int], moving: Task) -> int:
    """Earliest time >= t for a ``moving`` aircraft that clears every fixed opposite-task time."""
    changed = True
    while changed:
        changed = False
        for f in fixed:
            if moving is Task.TAKEOFF and not cross_ok(model, f, t):
                t, changed = f + model.pd, True
            elif moving is Task.LANDING and not cross_ok(model, t, f):
                t, changed = f + model.dp, True
    return t


def realize(model: SeparationModel, kind: BlockKind, anchor: Anchor, fixed_gaps: Sequence[int],
            min_sep: int, fixed_classes: Sequence[int] | None = None,
            other_classes: Sequence[int] | None = None) -> BlockDescriptor:
    """Build the two-variable block: a fixed run of one task and two aircraft of the other.

    For a T-block the fixed run is landings and the pair is takeoffs; a D-block swaps
    the roles. The first pair member sits at the anchor, the second at the earliest
    legal time at least ``min_sep`` later.
    """
    fixed_task = Task.LANDING if kind is BlockKind.T else Task.TAKEOFF
    other_task = Task.TAKEOFF if kind is BlockKind.T else Task.LANDING
    base_fixed, base_other = 0, 0
    if anchor is Anchor.TAKEOFF_FIRST:
        if fixed_task is Task.LANDING:
            base_fixed = model.dp
        else:
            base_other = model.dp
    fixed = [base_fixed]
    for g in fixed_gaps:
        fixed.append(fixed[-1] + g)
    o1 = base_other
    o2 = _next_legal(model, o1 + min_sep, fixed, other_task)
    rows = [(t, int(fixed_task), i) for i, t in enumerate(fixed) if t <= o2]
    rows += [(o1, int(other_task), 100), (o2, int(other_task), 101)]
    # landings precede takeoffs at equal times
    rows.sort()
    end = rows.index((o2, int(other_task), 101))
    if other_task is Task.LANDING:
        while end + 1 < len(rows) and rows[end + 1][0] == o2:
            end += 1
        span = rows
    else:
        span = rows[:end + 1]
    close = rows.index((o2, int(other_task), 101))
    pred = rows[close - 1]
    gap = model.pd if other_task is Task.TAKEOFF else model.dp
    inc = o2 - o1 - min_sep
    tight_pred = pred[1] != int(other_task) and o2 - pred[0] == gap
    n_fixed = sum(1 for r in span if r[1] == int(fixed_task))
    n_land, n_take = (n_fixed, 2) if fixed_task is Task.LANDING else (2, n_fixed)
    exits = set()
    x, y = span[-2], span[-1]
    if x[1] != y[1]:
        if x[1] == int(Task.LANDING) and y[0] - x[0] == model.pd:
            exits.add(Anchor.LANDING_FIRST)
        if x[1] == int(Task.TAKEOFF) and y[0] - x[0] == model.dp:
            exits.add(Anchor.TAKEOFF_FIRST)
    fixed_in = [f for f in fixed if f <= o2]
    fpat = tuple(fixed_classes[:len(fixed_in)]) if fixed_classes else ()
    opat = tuple(other_classes) if other_classes else ()
    land_t = tuple(fixed_in) if fixed_task is Task.LANDING else (o1, o2)
    take_t = (o1, o2) if fixed_task is Task.LANDING else tuple(fixed_in)
    return BlockDescriptor(
        kind=kind,
        landing_pattern=fpat if fixed_task is Task.LANDING else opat,
        takeoff_pattern=opat if fixed_task is Task.LANDING else fpat,
        anchor=anchor,
        capacity=_capacity(n_land, n_take),
        time_length=o2 - min(fixed[0], o1),
        increment=inc,
        initial_redundant_time=_redundant_time(model, [o1], fixed_in, other_task, inc),
        landing_times=land_t,
        takeoff_times=take_t,
        achieved=o2 - o1,
        minimum=min_sep,
        is_block=inc > 0 and tight_pred,
        exits=frozenset(exits),
    )


# ---------------------------------------------------------------- catalog

@dataclass
class BlockCatalog:
    model: SeparationModel
    max_breakpoints: int = 2
    max_len: int = 8
    _cache: dict = field(default_factory=dict, repr=False)

    def lookup(self, kind: BlockKind, anchor: Anchor, fixed_gaps: Sequence[int], min_sep: int) -> BlockDescriptor:
        key = (kind, anchor, tuple(fixed_gaps), min_sep)
        hit = self._cache.get(key)
        if hit is None:
            task = Task.LANDING if kind is BlockKind.T else Task.TAKEOFF
            other = Task.TAKEOFF if kind is BlockKind.T else Task.LANDING
            fixed_cls = gap_index(self.model, task, len(fixed_gaps) + 1, self.max_breakpoints).get(tuple(fixed_gaps))
            other_cls = pair_index(self.model, other).get(min_sep)
            hit = realize(self.model, kind, anchor, fixed_gaps, min_sep, fixed_cls, other_cls)
            self._cache[key] = hit
        return hit

    def by_pattern(self, kind: BlockKind, anchor: Anchor, fixed_classes: Sequence[int],
                   other_classes: Sequence[int]) -> BlockDescriptor:
        task = Task.LANDING if kind is BlockKind.T else Task.TAKEOFF
        other = Task.TAKEOFF if kind is BlockKind.T else Task.LANDING
        M, N = self.model.matrix(task), self.model.matrix(other)
        gaps = tuple(M[a - 1][b - 1] for a, b in zip(fixed_classes, fixed_classes[1:]))
        sep = N[other_classes[0] - 1][other_classes[1] - 1]
        return realize(self.model, kind, anchor, gaps, sep, fixed_classes, other_classes)

    def separations(self, task: Task) -> tuple[int, ...]:
        return tuple(sorted({v for row in self.model.matrix(task) for v in row}))

    def descriptors(self):
        """Every catalog entry in a fixed order (computed on first use)."""
        for kind in (BlockKind.T, BlockKind.D):
            task = Task.LANDING if kind is BlockKind.T else Task.TAKEOFF
            other = Task.TAKEOFF if kind is BlockKind.T else Task.LANDING
            for k in range(2, self.max_len - 1):
                for gaps in sorted(gap_index(self.model, task, k, self.max_breakpoints)):
                    for sep in self.separations(other):
                        for anchor in Anchor:
                            yield self.lookup(kind, anchor, gaps, sep)

    def grid(self, kind: BlockKind, anchor: Anchor, rows: Sequence[Sequence[int]], cols: Sequence[int],
             quantity: str = "separation") -> list[list[int]]:
        out = []
        for r in rows:
            line = []
            for c in cols:
                d = self.lookup(kind, anchor, r, c)
                line.append(d.achieved if quantity == "separation" else d.increment)
            out.append(line)
        return out


@lru_cache(maxsize=64)
def gap_index(model: SeparationModel, task: Task, length: int, max_breakpoints: int) -> dict:
    """Gap vector -> first class pattern (lexicographic) realizing it with few breakpoints."""
    M = model.matrix(task)
    out: dict = {}
    for pat in product(range(1, model.eta + 1), repeat=length):
        if len(class_breakpoints(pat)) > max_breakpoints:
            continue
        g = tuple(M[a - 1][b - 1] for a, b in zip(pat, pat[1:]))
        out.setdefault(g, pat)
    return out


@lru_cache(maxsize=16)
def pair_index(model: SeparationModel, task: Task) -> dict:
    M = model.matrix(task)
    out: dict = {}
    for a in range(1, model.eta + 1):
        for b in range(1, model.eta + 1):
            out.setdefault(M[a - 1][b - 1], (a, b))
    return out


_CATALOGS: dict = {}


def enumerate_blocks(model: SeparationModel, max_breakpoints: int = 2, max_len: int = 8) -> BlockCatalog:
    key = (model, max_breakpoints, max_len)
    cat = _CATALOGS.get(key)
    if cat is None:
        cat = BlockCatalog(model, max_breakpoints, max_len)
        _CATALOGS[key] = cat
    return cat


# Reference grid parameters: fixed-run gap vectors (rows) and pair minimum separations (columns).
T_BLOCK_ROWS = ((60, 60, 60), (60, 60, 90), (60, 90, 90), (90, 90, 90))
D_BLOCK_ROWS = ((60, 60, 60), (60, 60, 80), (60, 80, 80), (80, 80, 80))


def grid_shape(model: SeparationModel, kind: BlockKind):
    cat = enumerate_blocks(model)
    if kind is BlockKind.T:
        return T_BLOCK_ROWS, cat.separations(Task.TAKEOFF)
    return D_BLOCK_ROWS, cat.separations(Task.LANDING)


def grid_descriptors(catalog: BlockCatalog) -> list[BlockDescriptor]:
    out = []
    for kind in (BlockKind.D, BlockKind.T):
        rows, cols = grid_shape(catalog.model, kind)
        for anchor in Anchor:
            for r in rows:
                for c in cols:
                    out.append(catalog.lookup(kind, anchor, r, c))
    return out


def block_pair_table(catalog: BlockCatalog, descriptors: Sequence[BlockDescriptor] | None = None,
                     ) -> dict[tuple[int, int], tuple[int, int]]:
    """(landing, takeoff) increments for each ordered pair whose boundary forms match.

    Keys index into ``descriptors`` (the reference grids by default).
    """
    descs = list(descriptors) if descriptors is not None else grid_descriptors(catalog)
    out = {}
    for i, a in enumerate(descs):
        if a.kind is BlockKind.TD:
            continue
        for j, b in enumerate(descs):
            if b.kind is BlockKind.TD or b.anchor not in a.exits:
                continue
            out[(i, j)] = (a.landing_increment + b.landing_increment,
                           a.takeoff_increment + b.takeoff_increment)
    return out


def pair_increment(a: BlockDescriptor, b: BlockDescriptor) -> tuple[int, int] | None:
    if a.kind is BlockKind.TD or b.kind is BlockKind.TD or b.anchor not in a.exits:
        return None
    return (a.landing_increment + b.landing_increment, a.takeoff_increment + b.takeoff_increment)


# ---------------------------------------------------------------- detection

def _semi_resident_ends(s: Schedule, model: SeparationModel) -> list[int]:
    back: dict[int, list[int]] = {}
    for p in relevance_pairs(s, model, Layout.DUAL):
        back.setdefault(p.trailing, []).append(p.leading)
    out = []
    seen: set = {s.order[0].task} if s.order else set()
    for e in range(1, len(s.order)):
        task = s.order[e].task
        # the first aircraft of its task is resident only if it waits past t0
        resident = task in seen or s.times[e] > s.t0
        seen.add(task)
        if s.order[e - 1].task is not task and back.get(e) == [e - 1] and resident:
            out.append(e)
    return out


def _path(back: dict, hi: int, lo: int) -> bool:
    seen, stack = {hi}, [hi]
    while stack:
        j = stack.pop()
        if j == lo:
            return True
        for i in back.get(j, ()):
            if i >= lo and i not in seen:
                seen.add(i)
                stack.append(i)
    return False


def detect_blocks(s: Schedule, model: SeparationModel) -> list[tuple[BlockDescriptor, tuple[int, int]]]:
    """Split a dual schedule into consecutive blocks; spans are inclusive index pairs."""
    if s.layout is not Layout.DUAL:
        s = Schedule(s.order, s.times, s.t0, Layout.DUAL)
    n = len(s.order)
    if len({a.task for a in s.order}) < 2:
        return []
    back: dict[int, list[int]] = {}
    for p in relevance_pairs(s, model):
        back.setdefault(p.trailing, []).append(p.leading)
    starts = [i for i in range(n - 1)
              if s.order[i].task is not s.order[i + 1].task and i in back.get(i + 1, ())]
    ends = _semi_resident_ends(s, model)
    out = []
    start = None
    for e in ends:
        if start is None:
            cand = [i for i in starts if i < e - 0 and i <= e - 1 and _path(back, e, i)]
            if not cand:
                continue
            start = cand[0]
        elif not _path(back, e, start) or start >= e:
            raise NotBlockDecomposable(e, f"no relevance path from position {e} to block start {start}")
        stop = e
        if (s.order[e].task is Task.LANDING and e + 1 < n and s.order[e + 1].task is Task.TAKEOFF
                and s.times[e + 1] - s.times[e] == model.pd):
            stop = e + 1
        desc = describe(s.order[start:stop + 1], s.times[start:stop + 1], model, e - start)
        out.append((desc, (start, stop)))
        start = stop - 1
    if start is not None:
        last = None
        for i1 in range(n - 1, out[-1][1][1], -1):
            if s.order[i1 - 1].task is not s.order[i1].task and (i1 - 1) in back.get(i1, ()):
                last = i1
                break
        if last is not None:
            sub = Schedule(s.order[start:last + 1], s.times[start:last + 1], s.t0, Layout.DUAL)
            lands, takes = sub.subsequence(Task.LANDING), sub.subsequence(Task.TAKEOFF)
            if has_optimal_path(lands, model, Layout.DUAL) and has_optimal_path(takes, model, Layout.DUAL):
                desc = describe(sub.order, sub.times, model, len(sub.order) - 1, BlockKind.TD)
                out.append((desc, (start, last)))
    return out


def resynthesize(s: Schedule, spans: Sequence[tuple[int, int]], model: SeparationModel) -> list[int]:
    """Times rebuilt block by block from each block's first time and its relevance structure."""
    times = list(s.times)
    tab = model.sep_table(Layout.DUAL)
    for lo, hi in spans:
        for k in range(lo + 1, hi + 1):
            a = s.order[k]
            best = max(s.t0, a.fmin)
            for j in range(lo, k):
                b = s.order[j]
                best = max(best, times[j] + tab[b.task][b.cls][a.task][a.cls])
            times[k] = best
    return times


# ---------------------------------------------------------------- swaps

@dataclass(frozen=True)
class ShiftResult:
    schedule: Schedule
    offset: int
    swap_delta: int
    absorbed_at: int | None


def semi_resident_shift(s: Schedule, position: int, model: SeparationModel) -> ShiftResult:
    """Swap a semi-resident aircraft with its predecessor and retime everything after.

    ``offset`` sums the time change of the two swapped aircraft with opposite signs
    (earlier-placed aircraft gains, later-placed loses); ``absorbed_at`` is the first
    later position from which all times are unchanged.
    """
    k = position
    if not 1 <= k < len(s.order):
        raise NotSemiResident(f"position {k} has no predecessor")
    if s.order[k - 1].task is s.order[k].task:
        raise NotSemiResident(f"position {k} follows an aircraft of the same task")
    leads = [p.leading for p in relevance_pairs(Schedule(s.order, s.times, s.t0, Layout.DUAL), model)
             if p.trailing == k]
    if leads != [k - 1]:
        raise NotSemiResident(f"position {k} is not relevant to its predecessor alone")
    if s.times[k] <= s.t0 and all(a.task is not s.order[k].task for a in s.order[:k]):
        raise NotSemiResident(f"position {k} is the first of its task and does not wait")
    order = list(s.order)
    order[k - 1], order[k] = order[k], order[k - 1]
    new = earliest_schedule(order, model, Layout.DUAL, s.t0, full_pairs=True)
    a_prev, a_semi = s.order[k - 1], s.order[k]
    offset = (s.times[k] - new.time_of(a_semi.id)) + (new.time_of(a_prev.id) - s.times[k - 1])
    swap_delta = new.times[k] - s.times[k]
    absorbed = None
    for j in range(k + 1, len(order)):
        if all(new.times[i] == s.times[i] for i in range(j, len(order))):
            absorbed = j
            break
    return ShiftResult(new, offset, swap_delta, absorbed)


# ---------------------------------------------------------------- pipeline

@dataclass
class DualInstance:
    landings: list[Aircraft]
    takeoffs: list[Aircraft]
    t0: int = 0

    def __post_init__(self):
        for a in self.landings:
            if a.task is not Task.LANDING:
                raise ValueError(f"{a.id} is listed as a landing but is a takeoff")
        for a in self.takeoffs:
            if a.task is not Task.TAKEOFF:
                raise ValueError(f"{a.id} is listed as a takeoff but is a landing")

    @property
    def aircraft(self) -> list[Aircraft]:
        return list(self.landings) + list(self.takeoffs)

    @classmethod
    def from_aircraft(cls, aircraft: Iterable[Aircraft], t0: int = 0) -> "DualInstance":
        items = list(aircraft)
        return cls([a for a in items if a.task is Task.LANDING], [a for a in items if a.task is Task.TAKEOFF], t0)


@dataclass
class DualOptions:
    single: SolverOptions = field(default_factory=SolverOptions)
    max_block_len: int = 8
    max_breakpoints: int = 2
    drift_budget: int = 8
    match_exact_limit: int = 12
    search_nodes: int | None = None
    portfolio: bool = True

    def nodes(self, n: int) -> int:
        if self.search_nodes is not None:
            return self.search_nodes
        if n <= 12:
            return 300_000
        return 20_000 if n <= 24 else 5_000


def _takeoff_slot(model: SeparationModel, t: int, landing_times: Sequence[int]) -> int:
    return _next_legal(model, t, landing_times, Task.TAKEOFF)


def _merge(landing_sched: Schedule, takeoffs: Sequence[Aircraft], times: Sequence[int],
           model: SeparationModel) -> Schedule:
    rows = [(t, 0, i, a) for i, (a, t) in enumerate(zip(landing_sched.order, landing_sched.times))]
    rows += [(t, 1, i, a) for i, (a, t) in enumerate(zip(takeoffs, times))]
    rows.sort(key=lambda r: (r[0], r[1], r[2]))
    return earliest_schedule([r[3] for r in rows], model, Layout.DUAL, landing_sched.t0, full_pairs=True)


def match_fixed_landing(landing_sched: Schedule, takeoffs: Sequence[Aircraft], catalog: BlockCatalog | None,
                        model: SeparationModel, exact_limit: int = 12,
                        order_hint: Sequence[Aircraft] | None = None) -> Schedule:
    """Place takeoffs around landings whose times stay exactly as given."""
    takeoffs = list(takeoffs)
    if not takeoffs:
        return landing_sched
    t0 = landing_sched.t0
    lt = sorted(landing_sched.times)
    land_last = max(lt) if lt else t0
    D = model.D
    if len(takeoffs) <= exact_limit:
        best = _match_dp(takeoffs, lt, land_last, model, t0)
        if best is None:
            raise Infeasible(None, "takeoffs cannot be placed around the fixed landings")
        order, times = best
        return _merge(landing_sched, order, times, model)
    best = None
    hints = [list(order_hint)] if order_hint else []
    hints.append(sorted(takeoffs, key=lambda a: (a.fmin, a.id)))
    for seq in hints:
        times, prev, ok = [], None, True
        for a in seq:
            t = max(t0, a.fmin) if prev is None else max(t0, a.fmin, times[-1] + D[prev.cls - 1][a.cls - 1])
            t = _takeoff_slot(model, t, lt)
            if t > a.fmax:
                ok = False
                break
            times.append(t)
            prev = a
        if ok:
            f = max(land_last, times[-1])
            if best is None or f < best[0]:
                best = (f, seq, times)
    if best is None:
        raise Infeasible(None, "takeoffs cannot be placed around the fixed landings")
    return _merge(landing_sched, best[1], best[2], model)


def _match_dp(takeoffs, lt, land_last, model, t0):
    m = len(takeoffs)
    D = model.D
    # state: (mask, last index) -> earliest last-takeoff time
    layer = {}
    for i, a in enumerate(takeoffs):
        t = _takeoff_slot(model, max(t0, a.fmin), lt)
        if t <= a.fmax:
            layer[(1 << i, i)] = (t, None)
    full = (1 << m) - 1
    table = dict(layer)
    frontier = layer
    for _ in range(m - 1):
        nxt = {}
        for (mask, i), (t, _) in frontier.items():
            ci = takeoffs[i].cls
            for j in range(m):
                if mask >> j & 1:
                    continue
                b = takeoffs[j]
                s = _takeoff_slot(model, max(t0, b.fmin, t + D[ci - 1][b.cls - 1]), lt)
                if s > b.fmax:
                    continue
                key = (mask | 1 << j, j)
                if key not in nxt or s < nxt[key][0]:
                    nxt[key] = (s, (mask, i))
        table.update(nxt)
        frontier = nxt
    ends = [(max(land_last, table[(full, i)][0]), i) for i in range(m) if (full, i) in table]
    if not ends:
        return None
    _, i = min(ends)
    key = (full, i)
    order, times = [], []
    while key is not None:
        t, prev = table[key]
        order.append(takeoffs[key[1]])
        times.append(t)
        key = prev
    return order[::-1], times[::-1]


def tail_insertion(merged: Schedule, catalog: BlockCatalog | None, model: SeparationModel,
                   landing_makespan: int | None = None) -> Schedule:
    """Re-insert takeoffs that run past the landing span anywhere earlier in the order."""
    lands = [t for a, t in zip(merged.order, merged.times) if a.task is Task.LANDING]
    if not lands:
        return merged
    horizon = max(lands) if landing_makespan is None else merged.t0 + landing_makespan
    ev = Evaluator(model, Layout.DUAL, merged.t0)
    order = tuple(merged.order)
    f = ev.makespan(order)
    tail = [a for a, t in zip(merged.order, merged.times) if a.task is Task.TAKEOFF and t > horizon]
    improved = True
    while improved and tail:
        improved = False
        for y in reversed(tail):
            i = order.index(y)
            rest = order[:i] + order[i + 1:]
            best = None
            states = ev.prefix_states(order)
            for q in range(len(rest) + 1):
                if q == i:
                    continue
                cand = rest[:q] + (y,) + rest[q:]
                g = ev.makespan_moved(cand, min(i, q), max(i, q), states, f + merged.t0)
                if g < f and (best is None or g < best[0]):
                    best = (g, cand)
            if best is not None:
                f, order = best
                improved = True
        sched = earliest_schedule(order, model, Layout.DUAL, merged.t0, full_pairs=True)
        tail = [a for a, t in zip(sched.order, sched.times) if a.task is Task.TAKEOFF and t > horizon]
    out = earliest_schedule(order, model, Layout.DUAL, merged.t0, full_pairs=True)
    return out if out.makespan <= merged.makespan else merged


def solve_dual(inst: DualInstance, model: SeparationModel, options: DualOptions | None = None) -> Solution:
    opts = options or DualOptions()
    items = inst.aircraft
    if not items:
        raise ValueError("no aircraft")
    t0 = inst.t0
    if not inst.landings or not inst.takeoffs:
        sol = solve_single(items, model, t0, opts.single, Layout.DUAL)
        sol.stats["source"] = "pure"
        return sol
    stats: dict = {"n": len(items)}
    sol_l = solve_single(inst.landings, model, t0, opts.single, Layout.DUAL)
    sol_t = solve_single(inst.takeoffs, model, t0, opts.single, Layout.DUAL)
    lower = max(sol_l.makespan, sol_t.makespan)
    lower_exact = sol_l.optimality is Optimality.PROVED and sol_t.optimality is Optimality.PROVED
    stats["lower_bound"] = lower
    catalog = enumerate_blocks(model, opts.max_breakpoints, opts.max_block_len)
    best: Schedule | None = None
    variants = breakpoint_drift_set(sol_l.schedule, model, Layout.DUAL, budget=opts.drift_budget)
    for order in variants:
        ls = earliest_schedule(order, model, Layout.DUAL, t0, full_pairs=True)
        try:
            merged = match_fixed_landing(ls, inst.takeoffs, catalog, model, opts.match_exact_limit,
                                         sol_t.schedule.order)
        except Infeasible:
            continue
        c3 = tail_insertion(merged, catalog, model, ls.makespan)
        if best is None or c3.makespan < best.makespan:
            best = c3
    stats["landing_variants"] = len(variants)
    stats["source"] = "matching" if best is not None else "none"
    if best is not None and lower_exact and best.makespan == lower:
        stats["certificate"] = "single-runway optimum"
        return Solution(best, best.makespan, Optimality.PROVED, stats)
    ev = Evaluator(model, Layout.DUAL, t0)
    order = tuple(best.order) if best is not None else None
    f = best.makespan if best is not None else INF
    if opts.portfolio:
        sub: dict = {}
        try:
            o2, f2 = algorithm_orders(items, model, Layout.DUAL, t0, opts.single, ev, sub)
            if f2 < f:
                order, f, stats["source"] = o2, f2, "insertion"
        except Infeasible:
            pass
        o3 = fcfs_order(items)
        f3 = ev.makespan(o3)
        if f3 < f:
            order, f, stats["source"] = o3, f3, "fcfs"
    if order is not None and opts.single.polish_passes:
        o4, f4 = polish(order, f, ev, opts.single.polish_passes)
        if f4 < f:
            order, f = o4, f4
            stats["improved_by_polish"] = True
    proved = False
    if opts.single.certify and not (lower_exact and f == lower):
        res = exact_search(items, model, Layout.DUAL, t0, upper=f, node_limit=opts.nodes(len(items)))
        stats["search_nodes"] = res.nodes
        stats["search_complete"] = res.complete
        if res.order is not None and res.makespan < f:
            order, f = res.order, res.makespan
            stats["source"] = "search"
        proved = res.complete
    elif lower_exact and f == lower:
        proved = True
    if order is None:
        raise Infeasible(None, "no order satisfies every time window")
    sched = earliest_schedule(order, model, Layout.DUAL, t0, full_pairs=True)
    return Solution(sched, sched.makespan, Optimality.PROVED if proved else Optimality.HEURISTIC, stats)
