"""Fast order evaluation and a dominance-pruned branch and bound shared by the solvers.

When the same-task tables satisfy the triangle inequality, the earliest time of
the next aircraft depends only on the last landing and the last takeoff already
placed. Both the incremental evaluator and the search exploit that.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .separation import Layout, SeparationModel, Task, triangle_holds
from .sequence import INF, Aircraft, Infeasible, compute_times

# (class of last landing, its time, class of last takeoff, its time); class 0 means none
State = tuple[int, int, int, int]
EMPTY: State = (0, -1, 0, -1)


class Evaluator:
    """Times orders under one model/layout, incrementally where possible."""

    def __init__(self, model: SeparationModel, layout: Layout, t0: int = 0, full_pairs: bool = False):
        self.model = model
        self.layout = layout
        self.t0 = t0
        self.table = model.sep_table(layout)
        self.fast = not full_pairs and triangle_holds(model)
        self.evaluations = 0

    def step(self, st: State, a: Aircraft) -> State | None:
        cL, tL, cT, tT = st
        tab = self.table
        s = a.fmin if a.fmin > self.t0 else self.t0
        if cL:
            v = tL + tab[0][cL][a.task][a.cls]
            if v > s:
                s = v
        if cT:
            v = tT + tab[1][cT][a.task][a.cls]
            if v > s:
                s = v
        if s > a.fmax:
            return None
        if a.task is Task.LANDING:
            return (a.cls, s, cT, tT)
        return (cL, tL, a.cls, s)

    def prefix_states(self, order: Sequence[Aircraft]) -> list[State] | None:
        out = [EMPTY]
        st = EMPTY
        for a in order:
            st = self.step(st, a)
            if st is None:
                return None
            out.append(st)
        return out

    def times(self, order: Sequence[Aircraft]) -> list[int] | None:
        self.evaluations += 1
        if not self.fast:
            try:
                return compute_times(order, self.table, self.t0, None)
            except Infeasible:
                return None
        out = []
        st = EMPTY
        for a in order:
            st = self.step(st, a)
            if st is None:
                return None
            out.append(st[1] if a.task is Task.LANDING else st[3])
        return out

    def makespan(self, order: Sequence[Aircraft]) -> float:
        t = self.times(order)
        if t is None:
            return INF
        return (max(t) if t else self.t0) - self.t0

    def makespan_from(self, new: Sequence[Aircraft], first: int, last_changed: int,
                      host_states: list[State] | None, host_last: int) -> float:
        """Makespan of ``new`` that equals a host order before ``first`` and, past
        ``last_changed``, matches the host shifted by one position."""
        if not self.fast or host_states is None:
            return self.makespan(new)
        self.evaluations += 1
        st = host_states[first]
        n_host = len(host_states) - 1
        for k in range(first, len(new)):
            st = self.step(st, new[k])
            if st is None:
                return INF
            if k > last_changed and k <= n_host and st == host_states[k]:
                return host_last - self.t0
        return max(st[1], st[3]) - self.t0


    def makespan_moved(self, new: Sequence[Aircraft], lo: int, hi: int,
                       host_states: list[State] | None, host_last: int) -> float:
        """Makespan of ``new``, a same-length host order permuted only within ``lo..hi``."""
        if not self.fast or host_states is None:
            return self.makespan(new)
        self.evaluations += 1
        st = host_states[lo]
        for k in range(lo, len(new)):
            st = self.step(st, new[k])
            if st is None:
                return INF
            if k >= hi and st == host_states[k + 1]:
                return host_last - self.t0
        return max(st[1], st[3]) - self.t0

def state_last(st: State) -> int:
    return max(st[1], st[3])


@dataclass
class SearchResult:
    order: tuple[Aircraft, ...] | None
    makespan: float
    complete: bool
    nodes: int


def release_bound(items: Sequence[Aircraft], model: SeparationModel, layout: Layout, t0: int = 0) -> int:
    """Makespan lower bound from release dates and the smallest legal gaps."""
    ev = _BoundHelper(items, model, layout, t0)
    lb = ev.bound(0, EMPTY)
    return int(lb - t0) if lb < INF else int(INF)


class _BoundHelper:
    def __init__(self, items, model, layout, t0):
        self.items = list(items)
        self.t0 = t0
        self.single = layout is Layout.SINGLE
        self.tab = model.sep_table(layout)
        gl = min(min(r) for r in model.T)
        gt = min(min(r) for r in model.D)
        if self.single:
            cross = min(model.td, model.dt)
        else:
            cross = min(model.pd, model.dp)
        self.gap = (gl, gt)
        self.gall = min(gl, gt, cross)
        self.maxsep = max(v for lead in self.tab for row in lead[1:] for trail in row for v in trail)
        # release-sorted so the tail past the horizon stays sorted
        self.items.sort(key=lambda a: max(a.fmin, t0))
        self.rows = [(max(a.fmin, t0), a.fmax, int(a.task), a.cls) for a in self.items]
        self.suffix = self._suffix_runs()

    def _suffix_runs(self) -> list[list[tuple[int, float]]]:
        # run(r) over a sorted suffix equals max(r + count * gap, run from empty)
        n = len(self.rows)
        gaps = (self.gap[0], self.gap[1], self.gall)
        out = []
        for k in range(3):
            g = gaps[k]
            col: list[tuple[int, float]] = [(0, -INF)] * (n + 1)
            for i in range(n - 1, -1, -1):
                c, end = col[i + 1]
                rel, _, task, _ = self.rows[i]
                if k == 2 or task == k:
                    col[i] = (c + 1, max(rel + c * g, end))
                else:
                    col[i] = (c, end)
            out.append(col)
        return out

    def bound(self, mask: int, st: State) -> float:
        cL, tL, cT, tT = st
        tab = self.tab
        last = max(tL, tT, self.t0 - 1)
        lb = last
        # past this release time no placed aircraft can bind any more
        horizon = max(tL if cL else -INF, tT if cT else -INF) + self.maxsep
        head: tuple[list, list] = ([], [])
        rows = self.rows
        n = len(rows)
        i = ((mask + 1) & ~mask).bit_length() - 1
        cut = n
        while i < n:
            if mask >> i & 1:
                i += 1
                continue
            rel, fmax, task, cls = rows[i]
            if rel >= horizon:
                cut = i
                break
            i += 1
            est = rel
            if cL:
                v = tL + tab[0][cL][task][cls]
                if v > est:
                    est = v
            if cT:
                v = tT + tab[1][cT][task][cls]
                if v > est:
                    est = v
            if est > fmax:
                return INF
            head[task].append(est)
        if cut < n and mask >> cut:
            # some tail aircraft is already placed; collect the rest explicitly
            tail: tuple[list, list] = ([], [])
            for j in range(cut, n):
                if not mask >> j & 1:
                    tail[rows[j][2]].append(rows[j][0])
            return self._runs(head, tail, cL, tL, cT, tT, last, lb)
        suffix = self.suffix
        # equal-gap machines with release dates: release order is optimal
        for k, prev in ((0, tL if cL else None), (1, tT if cT else None)):
            r = prev
            g = self.gap[k]
            h = head[k]
            h.sort()
            for e in h:
                r = e if r is None else (r + g if r + g > e else e)
            c, end = suffix[k][cut]
            if c:
                r = end if r is None else max(r + c * g, end)
            if r is not None and r > lb:
                lb = r
        if self.single:
            r = last if (cL or cT) else None
            g = self.gall
            for e in sorted(head[0] + head[1]):
                r = e if r is None else (r + g if r + g > e else e)
            c, end = suffix[2][cut]
            if c:
                r = end if r is None else max(r + c * g, end)
            if r is not None and r > lb:
                lb = r
        return lb

    def _runs(self, head, tail, cL, tL, cT, tT, last, lb) -> float:
        # tail releases are sorted and no earlier than any head estimate
        runs = [sorted(head[0]) + tail[0], sorted(head[1]) + tail[1]]
        for k, prev in ((0, tL if cL else None), (1, tT if cT else None)):
            r = prev
            g = self.gap[k]
            for e in runs[k]:
                r = e if r is None else (r + g if r + g > e else e)
            if r is not None and r > lb:
                lb = r
        if self.single:
            r = last if (cL or cT) else None
            g = self.gall
            for e in sorted(runs[0] + runs[1]):
                r = e if r is None else (r + g if r + g > e else e)
            if r is not None and r > lb:
                lb = r
        return lb


def exact_search(aircraft: Sequence[Aircraft], model: SeparationModel, layout: Layout = Layout.SINGLE,
                 t0: int = 0, upper: float = INF, node_limit: int | None = 200_000) -> SearchResult:
    """Depth-first branch and bound looking for a makespan strictly below ``upper``.

    ``complete`` is true when the whole space was covered, in which case either
    ``order`` is optimal or nothing beats ``upper``.
    """
    items = sorted(aircraft, key=lambda a: (a.fmin, a.id))
    n = len(items)
    if n == 0:
        return SearchResult((), 0, True, 0)
    if not triangle_holds(model):
        return _plain_search(items, model, layout, t0, upper, node_limit)
    tab = model.sep_table(layout)
    helper = _BoundHelper(items, model, layout, t0)
    keys = [(a.cls, a.task, a.fmin, a.fmax) for a in items]
    full = (1 << n) - 1
    best = [upper]
    best_order: list = [None]
    nodes = [0]
    aborted = [False]
    memo: dict = {}
    path: list[int] = []

    def dfs(mask: int, st: State) -> None:
        if aborted[0]:
            return
        nodes[0] += 1
        if node_limit is not None and nodes[0] > node_limit:
            aborted[0] = True
            return
        if mask == full:
            f = state_last(st) - t0
            if f < best[0]:
                best[0] = f
                best_order[0] = tuple(items[i] for i in path)
            return
        key = (mask, st[0], st[2])
        front = memo.get(key)
        tl, tt = st[1], st[3]
        if front is not None:
            for a, b in front:
                if a <= tl and b <= tt:
                    return
            front[:] = [(a, b) for a, b in front if not (tl <= a and tt <= b)]
            front.append((tl, tt))
        else:
            memo[key] = [(tl, tt)]
        cL, tL, cT, tT = st
        kids = []
        seen = set()
        for i in range(n):
            if mask >> i & 1 or keys[i] in seen:
                continue
            seen.add(keys[i])
            a = items[i]
            s = a.fmin if a.fmin > t0 else t0
            if cL:
                v = tL + tab[0][cL][a.task][a.cls]
                if v > s:
                    s = v
            if cT:
                v = tT + tab[1][cT][a.task][a.cls]
                if v > s:
                    s = v
            if s > a.fmax or s - t0 >= best[0]:
                continue
            nst = (a.cls, s, cT, tT) if a.task is Task.LANDING else (cL, tL, a.cls, s)
            kids.append((s, a.fmin, i, nst))
        kids.sort()
        for s, _, i, nst in kids:
            if s - t0 >= best[0]:
                break
            m2 = mask | 1 << i
            if m2 != full:
                lb = helper.bound(m2, nst)
                if lb - t0 >= best[0]:
                    continue
            path.append(i)
            dfs(m2, nst)
            path.pop()
            if aborted[0]:
                return

    dfs(0, EMPTY)
    return SearchResult(best_order[0], best[0], not aborted[0], nodes[0])


def _plain_search(items, model, layout, t0, upper, node_limit) -> SearchResult:
    # Without the triangle inequality every earlier aircraft can bind, so no dominance.
    tab = model.sep_table(layout)
    n = len(items)
    best = [upper]
    best_order: list = [None]
    nodes = [0]
    aborted = [False]
    order: list[int] = []
    times: list[int] = []
    used = [False] * n

    def dfs():
        if aborted[0]:
            return
        nodes[0] += 1
        if node_limit is not None and nodes[0] > node_limit:
            aborted[0] = True
            return
        if len(order) == n:
            f = times[-1] - t0
            if f < best[0]:
                best[0] = f
                best_order[0] = tuple(items[i] for i in order)
            return
        for i in range(n):
            if used[i]:
                continue
            a = items[i]
            s = max(t0, a.fmin)
            for j, t in zip(order, times):
                b = items[j]
                s = max(s, t + tab[b.task][b.cls][a.task][a.cls])
            if s > a.fmax or s - t0 >= best[0]:
                continue
            used[i] = True
            order.append(i)
            times.append(s)
            dfs()
            times.pop()
            order.pop()
            used[i] = False

    dfs()
    return SearchResult(best_order[0], best[0], not aborted[0], nodes[0])
