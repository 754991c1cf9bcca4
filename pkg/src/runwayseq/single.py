"""Incremental insertion solver for one runway (any task mix).

Aircraft are taken in ascending earliest-time order. Each newcomer is tried at
every slot of every schedule kept in the frontier, plus local reorders that
re-home a breakpoint or transition aircraft next to it. A branch and bound pass
then either certifies the result or improves on it within a node budget.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field, replace
from itertools import permutations
from typing import Iterable, Sequence

from .calculus import _pivot_positions, breakpoint_drift_set, omega_min_bound
from .search import Evaluator, exact_search, release_bound
from .separation import Layout, SeparationModel, Task
from .sequence import INF, Aircraft, Infeasible, Schedule, class_breakpoints, earliest_schedule

log = logging.getLogger(__name__)

LARGE = 24


class Optimality(enum.Enum):
    PROVED = "ProvedByEnumeration"
    HEURISTIC = "HeuristicBest"


@dataclass
class SolverOptions:
    # None keeps 64 schedules for small inputs and 8 beyond LARGE
    frontier_budget: int | None = None
    drift_budget: int = 4
    # slots considered per insertion, counted from the tail; None picks by size
    insert_window: int | None = None
    reorder: bool = True
    certify: bool = True
    certify_nodes: int | None = None
    full_pairs_check: bool = False
    debug: bool = False
    polish_passes: int = 3

    def budget(self, n: int) -> int:
        if self.frontier_budget is not None:
            return max(1, self.frontier_budget)
        return 64 if n <= LARGE else 8

    def window(self, n: int) -> int:
        if self.insert_window is not None:
            return self.insert_window
        return n + 1 if n <= LARGE else 8

    def nodes(self, n: int) -> int:
        if self.certify_nodes is not None:
            return self.certify_nodes
        if n <= 12:
            return 200_000
        return 20_000 if n <= LARGE else 5_000


@dataclass
class SolverState:
    frontier: list[tuple[Aircraft, ...]]
    makespan: float
    inserted: int


@dataclass(frozen=True)
class InsertionCandidate:
    host: int
    position: int
    reorder: tuple | None
    bound: float
    makespan: float
    order: tuple[Aircraft, ...]


@dataclass
class Solution:
    schedule: Schedule
    makespan: int
    optimality: Optimality
    stats: dict = field(default_factory=dict)


def _ordered(aircraft: Iterable[Aircraft]) -> list[Aircraft]:
    return sorted(aircraft, key=lambda a: (a.fmin, a.id))


def _kinds_around(order: Sequence[Aircraft], q: int):
    """Kinds of the two aircraft either side of slot ``q`` or None at the edges."""
    if q < 2 or q + 1 >= len(order):
        return None
    return tuple(order[j].kind for j in (q - 2, q - 1, q, q + 1))


def _rises(order: Sequence[Aircraft]) -> int:
    count = 0
    for task in (Task.LANDING, Task.TAKEOFF):
        cls = [a.cls for a in order if a.task is task]
        count += len(class_breakpoints(cls))
    return count


def _residents(ev: Evaluator, order: Sequence[Aircraft]) -> int:
    times = ev.times(order)
    if times is None:
        return len(order)
    tab = ev.table
    cnt = 0
    last: dict[Task, int] = {}
    for i, a in enumerate(order):
        tight = not last and times[i] == max(ev.t0, a.fmin)
        for j in last.values():
            b = order[j]
            if times[i] - times[j] == tab[b.task][b.cls][a.task][a.cls]:
                tight = True
        if not tight and i > 0:
            cnt += 1
        last[a.task] = i
    return cnt


def insert_candidates(state: SolverState, nxt: Aircraft, model: SeparationModel,
                      layout: Layout = Layout.SINGLE, t0: int = 0,
                      options: SolverOptions | None = None, ev: Evaluator | None = None,
                      ) -> list[InsertionCandidate]:
    """Plain insertions at every slot plus bound-admissible reordered insertions."""
    opts = options or SolverOptions()
    ev = ev or Evaluator(model, layout, t0, opts.full_pairs_check)
    prev = state.makespan
    out: list[InsertionCandidate] = []
    hosts = []
    for h, host in enumerate(state.frontier):
        st = ev.prefix_states(host) if ev.fast else None
        last = max(max(s[1], s[3]) for s in st) if st else ev.t0 + prev
        hosts.append((h, host, st, last))
        n = len(host)
        lo = max(0, n + 1 - opts.window(n))
        for p in range(lo, n + 1):
            new = host[:p] + (nxt,) + host[p:]
            f = ev.makespan_from(new, p, p, st, last)
            if f < INF:
                out.append(InsertionCandidate(h, p, None, f - prev, f, new))
    f_inc = min((c.makespan for c in out), default=INF) - prev
    if opts.reorder:
        for h, host, st, last in hosts:
            n = len(host)
            lo = max(0, n - opts.window(n))
            for i in _pivot_positions(host):
                if i < lo:
                    continue
                y = host[i]
                rest = host[:i] + host[i + 1:]
                for q in range(max(0, lo - 1), n):
                    ctx = _kinds_around(rest, q)
                    bound = 0
                    if ctx is not None:
                        bound = omega_min_bound(model, ctx, nxt.kind, layout)
                        if f_inc < INF and bound >= f_inc:
                            continue
                    first, lastc = min(i, q), max(i, q) + 1
                    for pair in ((y, nxt), (nxt, y)):
                        new = rest[:q] + pair + rest[q:]
                        f = ev.makespan_from(new, first, lastc, st, last)
                        if f < INF:
                            out.append(InsertionCandidate(h, q, ("pair", i, pair[0] is y), min(bound, f - prev),
                                                          f, new))
    if not out:
        out = _blocked_insertions(hosts, nxt, ev, prev, opts)
    out.sort(key=lambda c: (c.makespan, c.position))
    return out


def _blocked_insertions(hosts, nxt: Aircraft, ev: Evaluator, prev: float, opts: SolverOptions):
    """Window-blocked fallback: force the newcomer in, then re-insert one displaced aircraft."""
    out = []
    for h, host, st, last in hosts:
        n = len(host)
        lo = max(0, n - opts.window(n))
        for i in range(lo, n):
            y = host[i]
            rest = host[:i] + host[i + 1:]
            best = None
            for p in range(len(rest) + 1):
                base = rest[:p] + (nxt,) + rest[p:]
                for r in range(len(base) + 1):
                    new = base[:r] + (y,) + base[r:]
                    f = ev.makespan(new)
                    if f < INF and (best is None or f < best.makespan):
                        best = InsertionCandidate(h, p, ("retreat", i, r), f - prev, f, new)
            if best is not None:
                out.append(best)
    return out


def _key(order: Sequence[Aircraft]) -> tuple:
    return tuple((a.cls, a.task, a.fmin, a.fmax) for a in order)


def _rebuild_frontier(cands: list[InsertionCandidate], ev: Evaluator, model: SeparationModel,
                      layout: Layout, t0: int, opts: SolverOptions) -> tuple[list, float]:
    best = cands[0].makespan
    seen = set()
    pool = []
    for c in cands:
        if c.makespan != best:
            break
        k = _key(c.order)
        if k not in seen:
            seen.add(k)
            pool.append(c.order)
    budget = opts.budget(len(cands[0].order))
    if len(pool) > 1:
        if len(pool) > 4 * budget:
            pool = pool[:4 * budget]
        pool.sort(key=lambda o: (_rises(o), _residents(ev, o), tuple(a.id for a in o)))
    pool = pool[:budget]
    if opts.drift_budget > 1 and len(pool) < budget and len(pool[0]) <= 24:
        sched = Schedule(pool[0], tuple(ev.times(pool[0])), t0, layout)
        for o in breakpoint_drift_set(sched, model, layout, budget=opts.drift_budget):
            k = _key(o)
            if k not in seen and len(pool) < budget:
                seen.add(k)
                pool.append(o)
    return pool, best


def _base_case(first: Sequence[Aircraft], ev: Evaluator) -> tuple[list, float]:
    scored = []
    for perm in permutations(first):
        f = ev.makespan(perm)
        if f < INF:
            scored.append((f, perm))
    if not scored:
        raise Infeasible(None, "no order of the first aircraft meets their windows")
    best = min(f for f, _ in scored)
    return [p for f, p in scored if f == best], best


def algorithm_orders(aircraft: Sequence[Aircraft], model: SeparationModel, layout: Layout, t0: int,
                     opts: SolverOptions, ev: Evaluator, stats: dict) -> tuple[tuple[Aircraft, ...], float]:
    """Insertion stage only: returns the best order found and its makespan."""
    items = _ordered(aircraft)
    # settle the size-dependent knobs once, from the full instance
    opts = replace(opts, frontier_budget=opts.budget(len(items)), insert_window=opts.window(len(items)))
    k = min(2, len(items))
    frontier, f = _base_case(items[:k], ev)
    frontier = [tuple(o) for o in frontier][:opts.budget(len(items))]
    state = SolverState(frontier, f, k)
    for a in items[k:]:
        cands = insert_candidates(state, a, model, layout, t0, opts, ev)
        stats["candidates"] = stats.get("candidates", 0) + len(cands)
        if not cands:
            raise Infeasible(None, f"aircraft {a.id} cannot be placed within its window")
        frontier, f = _rebuild_frontier(cands, ev, model, layout, t0, opts)
        state = SolverState(frontier, f, state.inserted + 1)
        stats["frontier_max"] = max(stats.get("frontier_max", 0), len(frontier))
        if opts.debug:
            _debug_tail_check(frontier[0], a, ev)
    stats.setdefault("frontier_max", len(state.frontier))
    return state.frontier[0], state.makespan


def _debug_tail_check(order, newest: Aircraft, ev: Evaluator) -> None:
    times = ev.times(order)
    idx = next(i for i, a in enumerate(order) if a.id == newest.id)
    tab = ev.table
    for i in range(idx + 1, len(order)):
        a = order[i]
        tight = any(times[i] - times[j] == tab[order[j].task][order[j].cls][a.task][a.cls]
                    for j in range(max(0, i - 4), i))
        if not tight and times[i] > a.fmin:
            log.debug("resident point after newest aircraft %s at %d", newest.id, i)


def _finish(order, model, layout, t0, opts, stats, proved: bool) -> Solution:
    sched = earliest_schedule(order, model, layout, t0, full_pairs=True)
    if opts.full_pairs_check:
        fast = earliest_schedule(order, model, layout, t0)
        stats["full_pairs_agree"] = fast.times == sched.times
    return Solution(sched, sched.makespan, Optimality.PROVED if proved else Optimality.HEURISTIC, stats)


def fcfs_order(aircraft: Iterable[Aircraft]) -> tuple[Aircraft, ...]:
    return tuple(_ordered(aircraft))


def fcfs_baseline(aircraft: Iterable[Aircraft], model: SeparationModel, t0: int = 0,
                  layout: Layout = Layout.SINGLE) -> Solution:
    """First come first served by earliest time, timed with earliest_schedule."""
    order = fcfs_order(aircraft)
    if not order:
        raise ValueError("no aircraft")
    sched = earliest_schedule(order, model, layout, t0, full_pairs=True)
    return Solution(sched, sched.makespan, Optimality.HEURISTIC, {"source": "fcfs"})


def polish(order: tuple[Aircraft, ...], f: float, ev: Evaluator, passes: int = 3,
           window: int = 12) -> tuple[tuple[Aircraft, ...], float]:
    """Remove-and-reinsert local search; each move must strictly lower the makespan."""
    n = len(order)
    for _ in range(passes):
        improved = False
        states = ev.prefix_states(order)
        for i in range(n):
            y = order[i]
            rest = order[:i] + order[i + 1:]
            for q in range(max(0, i - window), min(n, i + window + 1)):
                if q == i:
                    continue
                new = rest[:q] + (y,) + rest[q:]
                g = ev.makespan_moved(new, min(i, q), max(i, q), states, f + ev.t0)
                if g < f:
                    order, f, improved = new, g, True
                    states = ev.prefix_states(order)
                    break
        if not improved:
            break
    return order, f


def improve(order: tuple[Aircraft, ...], f: float, aircraft: Sequence[Aircraft], model: SeparationModel,
            layout: Layout, t0: int, opts: SolverOptions, stats: dict) -> tuple[tuple, float, bool]:
    """Branch and bound seeded with ``f``; returns the final order and whether it is proved."""
    if not opts.certify:
        return order, f, False
    res = exact_search(aircraft, model, layout, t0, upper=f, node_limit=opts.nodes(len(aircraft)))
    stats["search_nodes"] = res.nodes
    stats["search_complete"] = res.complete
    if res.order is not None and res.makespan < f:
        stats["improved_by_search"] = f - res.makespan
        return res.order, res.makespan, res.complete
    return order, f, res.complete


def solve_single(aircraft: Iterable[Aircraft], model: SeparationModel, t0: int = 0,
                 options: SolverOptions | None = None, layout: Layout = Layout.SINGLE) -> Solution:
    opts = options or SolverOptions()
    items = _ordered(aircraft)
    if not items:
        raise ValueError("no aircraft")
    ev = Evaluator(model, layout, t0, opts.full_pairs_check)
    stats: dict = {"n": len(items)}
    order, f = None, INF
    try:
        order, f = algorithm_orders(items, model, layout, t0, opts, ev, stats)
        stats["source"] = "insertion"
    except Infeasible:
        stats["source"] = "none"
    fc = ev.makespan(fcfs_order(items))
    if fc < f:
        order, f = fcfs_order(items), fc
        stats["source"] = "fcfs"
    if order is not None and opts.polish_passes:
        order, g = polish(order, f, ev, opts.polish_passes)
        if g < f:
            stats["improved_by_polish"] = f - g
            f = g
    order, f, proved = improve(order, f, items, model, layout, t0, opts, stats)
    if order is None:
        raise Infeasible(None, "no order satisfies every time window")
    stats["evaluations"] = ev.evaluations
    return _finish(order, model, layout, t0, opts, stats, proved)


def relaxation_lower_bound(aircraft: Iterable[Aircraft], model: SeparationModel, t0: int = 0,
                           node_limit: int | None = 50_000) -> tuple[int, bool]:
    """Largest pure-task optimum over the tasks present, and whether it is exact.

    Falls back to a release-date bound for a task whose search does not finish.
    """
    items = list(aircraft)
    best, exact = 0, True
    for task in (Task.LANDING, Task.TAKEOFF):
        part = [a for a in items if a.task is task]
        if not part:
            continue
        res = exact_search(part, model, Layout.SINGLE, t0, node_limit=node_limit)
        if res.complete and res.order is not None:
            v = int(res.makespan)
        else:
            v = release_bound(part, model, Layout.SINGLE, t0)
            exact = False
        best = max(best, v)
    return best, exact
