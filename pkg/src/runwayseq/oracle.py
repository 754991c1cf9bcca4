"""Exact reference optimizers for small instances.

Plain depth-first enumeration of every order with bound pruning. Kept
deliberately independent of the solver code paths.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .separation import Layout, SeparationModel, Task, triangle_holds
from .sequence import INF, Aircraft, Infeasible, Schedule, earliest_schedule


class LimitExceeded(ValueError):
    pass


class OracleMismatch(AssertionError):
    pass


@dataclass(frozen=True)
class OracleResult:
    makespan: int
    witness: Schedule
    optimal_orders: int
    nodes: int


def _aircraft_key(a: Aircraft) -> tuple:
    return (a.cls, a.task, a.fmin, a.fmax)


def _min_gap(model: SeparationModel, layout: Layout) -> tuple[int, int, int]:
    gl = min(min(r) for r in model.T)
    gt = min(min(r) for r in model.D)
    cross = min(model.td, model.dt) if layout is Layout.SINGLE else min(model.pd, model.dp)
    return gl, gt, min(gl, gt, cross)


def _enumerate(aircraft: Sequence[Aircraft], model: SeparationModel, layout: Layout, t0: int):
    table = model.sep_table(layout)
    n = len(aircraft)
    items = sorted(aircraft, key=lambda a: (a.fmin, a.id))
    keys = [_aircraft_key(a) for a in items]
    gl, gt, gall = _min_gap(model, layout)
    single = layout is Layout.SINGLE

    best = [INF]
    count = [0]
    witness: list = [None]
    nodes = [0]
    order: list[int] = []
    times: list[int] = []
    used = [False] * n

    def bound(last_l, last_t, last) -> float:
        # release-date relaxation with the smallest gap; deadlines are
        # not checked here since the relaxed order is not a real one
        if single:
            t = last
            for i in range(n):
                if not used[i]:
                    a = items[i]
                    t = max(t + gall, a.fmin) if t > -INF else max(a.fmin, t0)
            return t
        lb = last
        for task, lt, g in ((Task.LANDING, last_l, gl), (Task.TAKEOFF, last_t, gt)):
            t = lt
            for i in range(n):
                if not used[i] and items[i].task is task:
                    a = items[i]
                    t = max(t + g, a.fmin) if t > -INF else max(a.fmin, t0)
            if t > lb:
                lb = t
        return lb

    def dfs(last_l, last_t):
        nodes[0] += 1
        k = len(order)
        if k == n:
            f = times[-1] - t0
            if f < best[0]:
                best[0], count[0] = f, 1
                witness[0] = tuple(order)
            elif f == best[0]:
                count[0] += 1
            return
        tried = set()
        for i in range(n):
            if used[i] or keys[i] in tried:
                continue
            tried.add(keys[i])
            a = items[i]
            s = max(t0, a.fmin)
            for j in range(k):
                b = items[order[j]]
                v = times[j] + table[b.task][b.cls][a.task][a.cls]
                if v > s:
                    s = v
            if s > a.fmax or s - t0 > best[0]:
                continue
            used[i] = True
            order.append(i)
            times.append(s)
            nl, nt = (s, last_t) if a.task is Task.LANDING else (last_l, s)
            if k + 1 == n or bound(nl, nt, s) - t0 <= best[0]:
                dfs(nl, nt)
            times.pop()
            order.pop()
            used[i] = False

    dfs(-INF, -INF)
    if witness[0] is None:
        raise Infeasible(None, "no order satisfies every time window")
    seq = [items[i] for i in witness[0]]
    sched = earliest_schedule(seq, model, layout, t0, full_pairs=True)
    return int(best[0]), sched, count[0], nodes[0]


def subset_dp(aircraft: Sequence[Aircraft], model: SeparationModel, t0: int = 0) -> int:
    """Held-Karp over (subset, last aircraft) for single-task inputs."""
    if len({a.task for a in aircraft}) != 1:
        raise ValueError("subset DP needs a single-task input")
    items = list(aircraft)
    n = len(items)
    M = model.matrix(items[0].task)
    dp: dict[tuple[int, int], int] = {}
    for i, a in enumerate(items):
        s = max(t0, a.fmin)
        if s <= a.fmax:
            dp[(1 << i, i)] = s
    for mask in range(1, 1 << n):
        for last in range(n):
            t = dp.get((mask, last))
            if t is None:
                continue
            cl = items[last].cls
            for j in range(n):
                if mask >> j & 1:
                    continue
                b = items[j]
                s = max(t + M[cl - 1][b.cls - 1], b.fmin)
                if s > b.fmax:
                    continue
                key = (mask | 1 << j, j)
                if s < dp.get(key, INF):
                    dp[key] = s
    full = (1 << n) - 1
    ends = [dp[(full, i)] for i in range(n) if (full, i) in dp]
    if not ends:
        raise Infeasible(None, "no order satisfies every time window")
    return min(ends) - t0


def oracle_single(aircraft: Iterable[Aircraft], model: SeparationModel, t0: int = 0, limit: int = 10,
                  layout: Layout = Layout.SINGLE) -> OracleResult:
    items = list(aircraft)
    if not items:
        raise ValueError("no aircraft")
    if len(items) > limit:
        raise LimitExceeded(f"oracle refuses {len(items)} aircraft (limit {limit})")
    f, sched, cnt, nodes = _enumerate(items, model, layout, t0)
    if len({a.task for a in items}) == 1 and triangle_holds(model, (items[0].task,)):
        g = subset_dp(items, model, t0)
        if g != f:
            raise OracleMismatch(f"enumeration {f} vs subset DP {g}")
    return OracleResult(f, sched, cnt, nodes)


def oracle_dual(landings: Iterable[Aircraft], takeoffs: Iterable[Aircraft], model: SeparationModel,
                t0: int = 0, limit: int = 9) -> OracleResult:
    items = list(landings) + list(takeoffs)
    if not items:
        raise ValueError("no aircraft")
    if len(items) > limit:
        raise LimitExceeded(f"oracle refuses {len(items)} aircraft (limit {limit})")
    f, sched, cnt, nodes = _enumerate(items, model, Layout.DUAL, t0)
    return OracleResult(f, sched, cnt, nodes)
