"""Aircraft sequences, earliest-time schedules and their relevance structure.

Positions are 0-based throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

from .separation import Layout, SeparationModel, Task, class_name, min_separation, parse_class

INF = math.inf
LOOKBACK = 4


class Infeasible(Exception):
    def __init__(self, index: int | None = None, message: str = ""):
        self.index = index
        super().__init__(message or f"time window violated at position {index}")


class MixedTasks(ValueError):
    pass


@dataclass(frozen=True)
class Aircraft:
    id: str
    cls: int
    task: Task
    fmin: int = 0
    fmax: float = INF

    def __post_init__(self):
        object.__setattr__(self, "task", Task(self.task))
        if self.fmin > self.fmax:
            raise ValueError(f"aircraft {self.id}: f_min > f_max")

    @property
    def kind(self) -> tuple[int, Task]:
        return self.cls, self.task

    def label(self, eta: int = 6) -> str:
        return f"{class_name(self.cls, eta)}{self.task.letter}"


def landing(id, cls, fmin=0, fmax=INF) -> Aircraft:
    return Aircraft(str(id), cls, Task.LANDING, fmin, fmax)


def takeoff(id, cls, fmin=0, fmax=INF) -> Aircraft:
    return Aircraft(str(id), cls, Task.TAKEOFF, fmin, fmax)


class RelevancePair(NamedTuple):
    leading: int
    trailing: int


@dataclass(frozen=True)
class Schedule:
    order: tuple[Aircraft, ...]
    times: tuple[int, ...]
    t0: int = 0
    layout: Layout = Layout.SINGLE

    def __len__(self) -> int:
        return len(self.order)

    @property
    def makespan(self) -> int:
        return makespan(self)

    @property
    def classes(self) -> tuple[int, ...]:
        return tuple(a.cls for a in self.order)

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(a.id for a in self.order)

    def subsequence(self, task: Task) -> "Schedule":
        idx = [i for i, a in enumerate(self.order) if a.task is task]
        return Schedule(tuple(self.order[i] for i in idx), tuple(self.times[i] for i in idx),
                        self.t0, self.layout)

    def time_of(self, aircraft_id: str) -> int:
        for a, t in zip(self.order, self.times):
            if a.id == aircraft_id:
                return t
        raise KeyError(aircraft_id)


def _check_ids(order: Sequence[Aircraft]) -> None:
    ids = [a.id for a in order]
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate aircraft ids in sequence")


def compute_times(order: Sequence[Aircraft], table, t0: int, lookback: int | None = LOOKBACK) -> list[int]:
    """Earliest feasible times for a fixed order; raises Infeasible on a window miss."""
    times: list[int] = []
    for i, a in enumerate(order):
        s = a.fmin if a.fmin > t0 else t0
        row_c, task = a.cls, a.task
        lo = 0 if lookback is None else max(0, i - lookback)
        for j in range(lo, i):
            b = order[j]
            v = times[j] + table[b.task][b.cls][task][row_c]
            if v > s:
                s = v
        if s > a.fmax:
            raise Infeasible(i)
        times.append(s)
    return times


def earliest_schedule(seq: Iterable[Aircraft], model: SeparationModel, layout: Layout = Layout.SINGLE,
                      t0: int = 0, full_pairs: bool = False) -> Schedule:
    order = tuple(seq)
    if not order:
        raise ValueError("empty sequence")
    _check_ids(order)
    table = model.sep_table(layout)
    times = compute_times(order, table, t0, None if full_pairs else LOOKBACK)
    return Schedule(order, tuple(times), t0, layout)


def try_schedule(seq: Iterable[Aircraft], model: SeparationModel, layout: Layout = Layout.SINGLE,
                 t0: int = 0) -> Schedule | None:
    try:
        return earliest_schedule(seq, model, layout, t0)
    except Infeasible:
        return None


def makespan(s: Schedule) -> int:
    if not s.times:
        return 0
    return max(s.times) - s.t0


def is_feasible(s: Schedule, model: SeparationModel, full_pairs: bool = True) -> bool:
    """Checks windows and every pairwise separation (all pairs by default)."""
    table = model.sep_table(s.layout)
    n = len(s.order)
    for i, (a, t) in enumerate(zip(s.order, s.times)):
        if t < a.fmin or t > a.fmax or t < s.t0:
            return False
        lo = 0 if full_pairs else max(0, i - LOOKBACK)
        for j in range(lo, i):
            b = s.order[j]
            if t - s.times[j] < table[b.task][b.cls][a.task][a.cls]:
                return False
    return n == len(s.times)


def _y(s: Schedule, model: SeparationModel, i: int, j: int) -> int:
    a, b = s.order[i], s.order[j]
    return min_separation(model, a.kind, b.kind, s.layout)


def relevance_pairs(s: Schedule, model: SeparationModel, layout: Layout | None = None) -> list[RelevancePair]:
    if layout is not None and layout is not s.layout:
        s = Schedule(s.order, s.times, s.t0, layout)
    out = []
    n = len(s.order)
    for j in range(n):
        for i in range(max(0, j - LOOKBACK), j):
            if s.times[j] - s.times[i] == _y(s, model, i, j):
                out.append(RelevancePair(i, j))
    return out


def breakpoints(seq: Sequence[Aircraft] | Schedule) -> list[int]:
    order = seq.order if isinstance(seq, Schedule) else tuple(seq)
    if len({a.task for a in order}) > 1:
        raise MixedTasks("breakpoints are defined for single-task sequences")
    return [i for i in range(len(order) - 1) if order[i].cls < order[i + 1].cls]


def class_breakpoints(classes: Sequence[int]) -> list[int]:
    return [i for i in range(len(classes) - 1) if classes[i] < classes[i + 1]]


def resident_points(s: Schedule, model: SeparationModel, layout: Layout | None = None) -> list[tuple[int, int]]:
    if layout is not None and layout is not s.layout:
        s = Schedule(s.order, s.times, s.t0, layout)
    out: list[tuple[int, int]] = []
    n = len(s.order)
    if n == 0:
        return out
    if s.times[0] > s.t0:
        out.append((0, s.times[0] - s.t0))
    pure = len({a.task for a in s.order}) == 1
    last = {}
    last[s.order[0].task] = 0
    for i in range(1, n):
        if pure:
            slack = s.times[i] - s.times[i - 1] - _y(s, model, i - 1, i)
            if slack > 0:
                out.append((i, slack))
        else:
            slacks = [s.times[i] - s.times[m] - _y(s, model, m, i) for m in last.values()]
            if slacks and all(v > 0 for v in slacks):
                out.append((i, min(slacks)))
        last[s.order[i].task] = i
    return out


def has_optimal_path(s: Schedule, model: SeparationModel, layout: Layout | None = None) -> bool:
    n = len(s.order)
    if n <= 1:
        return True
    back: dict[int, list[int]] = {}
    for p in relevance_pairs(s, model, layout):
        back.setdefault(p.trailing, []).append(p.leading)
    seen = {n - 1}
    stack = [n - 1]
    while stack:
        j = stack.pop()
        if j == 0:
            return True
        for i in back.get(j, ()):
            if i not in seen:
                seen.add(i)
                stack.append(i)
    return False


def mono_task_path(s: Schedule, model: SeparationModel) -> Task | None:
    """Task of a relevance chain from the last aircraft to the first that never leaves one task."""
    n = len(s.order)
    if n == 0:
        return None
    task = s.order[-1].task
    if s.order[0].task is not task:
        return None
    if n == 1:
        return task
    back: dict[int, list[int]] = {}
    for p in relevance_pairs(s, model):
        if s.order[p.leading].task is task and s.order[p.trailing].task is task:
            back.setdefault(p.trailing, []).append(p.leading)
    seen = {n - 1}
    stack = [n - 1]
    while stack:
        j = stack.pop()
        if j == 0:
            return task
        for i in back.get(j, ()):
            if i not in seen:
                seen.add(i)
                stack.append(i)
    return None


# ---------------------------------------------------------------- serialization

def _fmt_time(v) -> str:
    return "inf" if v == INF else str(int(v))


def _parse_time(text: str):
    return INF if text.lower() in ("inf", "+inf", "infinity") else int(text)


def dump_schedule(s: Schedule) -> str:
    lines = []
    for a, t in zip(s.order, s.times):
        lines.append(f"{a.id} {a.cls} {a.task.letter} {t} {_fmt_time(a.fmin)} {_fmt_time(a.fmax)}")
    return "\n".join(lines) + ("\n" if lines else "")


def parse_schedule(text: str, t0: int = 0, layout: Layout = Layout.SINGLE) -> Schedule:
    order, times = [], []
    for ln in text.splitlines():
        parts = ln.split()
        if not parts or parts[0].startswith("#"):
            continue
        aid, cls, task, s, fmin, fmax = parts
        order.append(Aircraft(aid, parse_class(cls), Task.parse(task), _parse_time(fmin), _parse_time(fmax)))
        times.append(int(s))
    return Schedule(tuple(order), tuple(times), t0, layout)
