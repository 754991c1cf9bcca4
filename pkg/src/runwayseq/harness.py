"""Instance files, the random generator, LP export, grid verification and benchmarks.

The generator draws from :class:`random.Random` (Mersenne Twister MT19937),
which gives the same stream on every platform for a given integer seed.
"""

from __future__ import annotations

import csv
import io
import json
import math
import random
import re
import time
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .dual import Anchor, BlockKind, DualInstance, enumerate_blocks, grid_shape, solve_dual
from .oracle import LimitExceeded, oracle_dual, oracle_single
from .separation import Layout, SeparationModel, Task
from .sequence import INF, Aircraft, Infeasible
from .single import fcfs_baseline, solve_single

DEFAULT_PROPORTIONS = (10, 20, 25, 15, 20, 10)
MODES = ("landing", "takeoff", "mixed", "dual")


# ---------------------------------------------------------------- instances

@dataclass
class Instance:
    aircraft: list[Aircraft]
    layout: Layout = Layout.SINGLE
    t0: int = 0
    name: str = ""

    @property
    def n(self) -> int:
        return len(self.aircraft)

    def dual(self) -> DualInstance:
        return DualInstance.from_aircraft(self.aircraft, self.t0)


def _fmt(v) -> str:
    return "inf" if v == INF else str(int(v))


def dump_instance(inst: Instance) -> str:
    lines = [f"{inst.layout.value} {inst.t0} {inst.n}"]
    for a in inst.aircraft:
        lines.append(f"{a.id} {a.cls} {a.task.letter} {_fmt(a.fmin)} {_fmt(a.fmax)}")
    return "\n".join(lines) + "\n"


def parse_instance(text: str, name: str = "") -> Instance:
    rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not rows:
        raise ValueError("empty instance file")
    layout, t0, n = Layout.parse(rows[0][0]), int(rows[0][1]), int(rows[0][2])
    if len(rows) - 1 != n:
        raise ValueError(f"header announces {n} aircraft, found {len(rows) - 1}")
    out = []
    for parts in rows[1:]:
        aid, cls, task, fmin, fmax = parts
        mx = INF if fmax.lower() in ("inf", "+inf") else int(fmax)
        out.append(Aircraft(aid, int(cls), Task.parse(task), int(fmin), mx))
    return Instance(out, layout, t0, name)


def load_instance(path: str) -> Instance:
    with open(path) as fh:
        return parse_instance(fh.read(), name=path)


# ---------------------------------------------------------------- generator

@dataclass(frozen=True)
class GenSpec:
    count: int
    t_e: int
    t_w: int
    mode: str = "landing"
    seed: int = 0
    proportions: tuple[int, ...] = DEFAULT_PROPORTIONS

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("count must be at least 1")
        if sum(self.proportions) != 100:
            raise ValueError("class proportions must sum to 100")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")


def class_counts(count: int, proportions: Sequence[int]) -> list[int]:
    """Largest-remainder rounding; ties go to the lower class index."""
    quotas = [count * p / 100 for p in proportions]
    base = [math.floor(q) for q in quotas]
    left = count - sum(base)
    order = sorted(range(len(quotas)), key=lambda i: (-(quotas[i] - base[i]), i))
    for i in order[:left]:
        base[i] += 1
    return base


def gen_instance(spec: GenSpec) -> Instance:
    rng = random.Random(spec.seed)
    classes = [c + 1 for c, k in enumerate(class_counts(spec.count, spec.proportions)) for _ in range(k)]
    rng.shuffle(classes)
    n = spec.count
    if spec.mode == "landing":
        tasks = [Task.LANDING] * n
    elif spec.mode == "takeoff":
        tasks = [Task.TAKEOFF] * n
    elif spec.mode == "mixed":
        tasks = [Task.LANDING if rng.random() < 0.5 else Task.TAKEOFF for _ in range(n)]
    else:
        n_land = (n + 1) // 2
        tasks = [Task.LANDING] * n_land + [Task.TAKEOFF] * (n - n_land)
    width = len(str(n))
    out = []
    for i, (c, task) in enumerate(zip(classes, tasks)):
        fmin = rng.randint(0, spec.t_e * 60)
        out.append(Aircraft(f"a{i + 1:0{width}d}", c, task, fmin, fmin + spec.t_w * 60))
    layout = Layout.DUAL if spec.mode == "dual" else Layout.SINGLE
    return Instance(out, layout, 0, f"{spec.mode}-{n}-s{spec.seed}")


# ---------------------------------------------------------------- MIP export

def _var(a: Aircraft) -> str:
    return "S_" + re.sub(r"[^A-Za-z0-9_]", "_", a.id)


def big_m(inst: Instance, model: SeparationModel) -> int:
    finite = [a.fmax for a in inst.aircraft if a.fmax != INF]
    top = max(finite) if len(finite) == inst.n else max(a.fmin for a in inst.aircraft) + 3 * model.t0 * inst.n
    return int(top) + 3 * model.t0


def export_mip(inst: Instance, model: SeparationModel, layout: Layout | None = None) -> str:
    """Big-M disjunctive model in LP text format; z_i_j = 1 puts i before j."""
    layout = inst.layout if layout is None else layout
    table = model.sep_table(layout)
    items = list(inst.aircraft)
    M = big_m(inst, model)
    names = [_var(a) for a in items]
    out = ["\\ runway sequencing, big-M disjunctive form", "Minimize", " obj: Cmax", "Subject To"]
    for a, v in zip(items, names):
        out.append(f" cmax_{v[2:]}: Cmax - {v} >= {-inst.t0}")
    binaries = []
    for i in range(len(items)):
        for j in range(i + 1, len(items)):
            a, b = items[i], items[j]
            vi, vj = names[i], names[j]
            z = f"z_{vi[2:]}_{vj[2:]}"
            binaries.append(z)
            yij = table[a.task][a.cls][b.task][b.cls]
            yji = table[b.task][b.cls][a.task][a.cls]
            out.append(f" fwd_{z[2:]}: {vj} - {vi} - {yij + M} {z} >= {-M}")
            out.append(f" bwd_{z[2:]}: {vi} - {vj} + {yji + M} {z} >= {yji}")
    out.append("Bounds")
    for a, v in zip(items, names):
        if a.fmax == INF:
            out.append(f" {v} >= {int(a.fmin)}")
        else:
            out.append(f" {int(a.fmin)} <= {v} <= {int(a.fmax)}")
    out.append(" Cmax >= 0")
    if binaries:
        out.append("Binary")
        out.extend(f" {z}" for z in binaries)
    out.append("End")
    return "\n".join(out) + "\n"


_TERM = re.compile(r"([+-])?\s*(\d+(?:\.\d+)?)?\s*([A-Za-z_][A-Za-z0-9_]*)")


def _linear(expr: str) -> dict[str, float]:
    coefs: dict[str, float] = {}
    expr = expr.strip()
    pos = 0
    while pos < len(expr):
        m = _TERM.match(expr, pos)
        if not m:
            raise ValueError(f"cannot parse linear term near {expr[pos:]!r}")
        sign = -1.0 if m.group(1) == "-" else 1.0
        c = float(m.group(2)) if m.group(2) else 1.0
        coefs[m.group(3)] = coefs.get(m.group(3), 0.0) + sign * c
        pos = m.end()
        while pos < len(expr) and expr[pos] == " ":
            pos += 1
    return coefs


@dataclass
class LinearProgram:
    objective: dict[str, float]
    rows: list[tuple[dict[str, float], str, float]]
    bounds: dict[str, tuple[float, float]]
    binaries: list[str]

    @property
    def variables(self) -> list[str]:
        seen = dict.fromkeys(self.objective)
        for coefs, _, _ in self.rows:
            seen.update(dict.fromkeys(coefs))
        seen.update(dict.fromkeys(self.bounds))
        seen.update(dict.fromkeys(self.binaries))
        return list(seen)


def parse_lp(text: str) -> LinearProgram:
    """Reads the subset of LP format written by :func:`export_mip`."""
    section = None
    objective: dict[str, float] = {}
    rows, bounds, binaries = [], {}, []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("\\"):
            continue
        low = line.lower()
        if low in ("minimize", "subject to", "bounds", "binary", "end"):
            section = low
            continue
        if ":" in line:
            line = line.split(":", 1)[1].strip()
        if section == "minimize":
            objective = _linear(line)
        elif section == "subject to":
            m = re.match(r"(.*?)(>=|<=|=)\s*(-?\d+(?:\.\d+)?)$", line)
            if not m:
                raise ValueError(f"bad constraint {raw!r}")
            rows.append((_linear(m.group(1)), m.group(2), float(m.group(3))))
        elif section == "bounds":
            m = re.match(r"(-?\d+)\s*<=\s*(\w+)\s*<=\s*(-?\d+)$", line)
            if m:
                bounds[m.group(2)] = (float(m.group(1)), float(m.group(3)))
                continue
            m = re.match(r"(\w+)\s*>=\s*(-?\d+)$", line)
            if not m:
                raise ValueError(f"bad bound {raw!r}")
            bounds[m.group(1)] = (float(m.group(2)), math.inf)
        elif section == "binary":
            binaries.extend(line.split())
    return LinearProgram(objective, rows, bounds, binaries)


def solve_lp(text: str) -> float:
    """Optimum of an exported model via scipy's HiGHS MILP interface."""
    import numpy as np
    from scipy.optimize import Bounds, LinearConstraint, milp

    lp = parse_lp(text)
    names = lp.variables
    idx = {v: i for i, v in enumerate(names)}
    c = np.zeros(len(names))
    for v, w in lp.objective.items():
        c[idx[v]] = w
    A = np.zeros((len(lp.rows), len(names)))
    lo = np.full(len(lp.rows), -np.inf)
    hi = np.full(len(lp.rows), np.inf)
    for r, (coefs, sense, rhs) in enumerate(lp.rows):
        for v, w in coefs.items():
            A[r, idx[v]] = w
        if sense in (">=", "="):
            lo[r] = rhs
        if sense in ("<=", "="):
            hi[r] = rhs
    lb = np.zeros(len(names))
    ub = np.full(len(names), np.inf)
    integrality = np.zeros(len(names))
    for v, (a, b) in lp.bounds.items():
        lb[idx[v]], ub[idx[v]] = a, b
    for v in lp.binaries:
        integrality[idx[v]] = 1
        lb[idx[v]], ub[idx[v]] = 0, 1
    cons = [LinearConstraint(A, lo, hi)] if len(lp.rows) else []
    res = milp(c, constraints=cons, integrality=integrality, bounds=Bounds(lb, ub))
    if res.status != 0:
        raise Infeasible(None, f"MILP solver status {res.status}: {res.message}")
    return float(res.fun)


# ---------------------------------------------------------------- reference grids

_T_SEP_LF = ((60, 120, 120, 120, 180, 180, 180), (60, 120, 120, 120, 140, 210, 210),
             (60, 80, 150, 150, 150, 160, 180), (90, 90, 100, 120, 180, 180, 180))
_T_SEP_TF = ((60, 120, 120, 120, 180, 180, 180), (60, 120, 120, 120, 180, 180, 180),
             (60, 120, 120, 120, 140, 210, 210), (60, 80, 150, 150, 150, 160, 180))
_D_SEP_LF = ((60, 120, 120, 120, 180, 180, 180), (60, 120, 120, 120, 180, 180, 180),
             (60, 120, 120, 120, 135, 200, 200), (60, 68, 140, 140, 140, 158, 220))
_D_SEP_TF = ((60, 120, 120, 120, 180, 180, 180), (60, 120, 120, 120, 135, 200, 200),
             (60, 68, 140, 140, 140, 158, 220), (80, 80, 90, 160, 160, 160, 180))
_T_INC_LF = ((0, 40, 20, 0, 40, 20, 0), (0, 40, 20, 0, 0, 50, 30),
             (0, 0, 50, 30, 10, 0, 0), (30, 10, 0, 0, 40, 20, 0))
_T_INC_TF = ((0, 40, 20, 0, 40, 20, 0), (0, 40, 20, 0, 40, 20, 0),
             (0, 40, 20, 0, 0, 50, 30), (0, 0, 50, 30, 10, 0, 0))
_D_INC_LF = ((0, 52, 30, 7, 45, 22, 0), (0, 52, 30, 7, 45, 22, 0),
             (0, 52, 30, 7, 0, 42, 20), (0, 0, 50, 27, 5, 0, 40))
_D_INC_TF = ((0, 52, 30, 7, 45, 22, 0), (0, 52, 30, 7, 0, 42, 20),
             (0, 0, 50, 27, 5, 0, 40), (20, 12, 0, 47, 25, 2, 0))

GOLDEN_AXES = {
    BlockKind.T: (((60, 60, 60), (60, 60, 90), (60, 90, 90), (90, 90, 90)), (60, 80, 100, 120, 140, 160, 180)),
    BlockKind.D: (((60, 60, 60), (60, 60, 80), (60, 80, 80), (80, 80, 80)), (60, 68, 90, 113, 135, 158, 180)),
}

# (kind, anchor, quantity) -> rows over GOLDEN_AXES[kind]
GOLDEN_TABLES: dict[tuple[BlockKind, Anchor, str], tuple[tuple[int, ...], ...]] = {
    (BlockKind.T, Anchor.LANDING_FIRST, "separation"): _T_SEP_LF,
    (BlockKind.T, Anchor.TAKEOFF_FIRST, "separation"): _T_SEP_TF,
    (BlockKind.D, Anchor.LANDING_FIRST, "separation"): _D_SEP_LF,
    (BlockKind.D, Anchor.TAKEOFF_FIRST, "separation"): _D_SEP_TF,
    (BlockKind.T, Anchor.LANDING_FIRST, "increment"): _T_INC_LF,
    (BlockKind.T, Anchor.TAKEOFF_FIRST, "increment"): _T_INC_TF,
    (BlockKind.D, Anchor.LANDING_FIRST, "increment"): _D_INC_LF,
    (BlockKind.D, Anchor.TAKEOFF_FIRST, "increment"): _D_INC_TF,
}


@dataclass(frozen=True)
class CellCheck:
    grid: tuple[BlockKind, Anchor, str]
    row: tuple[int, ...]
    column: int
    expected: int
    actual: int

    @property
    def passed(self) -> bool:
        return self.expected == self.actual


@dataclass
class TableReport:
    cells: list[CellCheck]

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.cells)

    @property
    def passed(self) -> int:
        return sum(c.passed for c in self.cells)

    def failures(self) -> list[CellCheck]:
        return [c for c in self.cells if not c.passed]

    def lines(self) -> list[str]:
        out = [f"{self.passed}/{len(self.cells)} cells match"]
        for c in self.failures():
            kind, anchor, q = c.grid
            out.append(f"MISMATCH {kind.value} {anchor.value} {q} row={c.row} col={c.column}: "
                       f"expected {c.expected}, got {c.actual}")
        return out


def verify_tables(model: SeparationModel, golden: dict | None = None) -> TableReport:
    golden = GOLDEN_TABLES if golden is None else golden
    cat = enumerate_blocks(model)
    cells = []
    for (kind, anchor, quantity), expected in golden.items():
        rows, cols = GOLDEN_AXES[kind]
        got = cat.grid(kind, anchor, rows, cols, quantity)
        for r, erow, grow in zip(rows, expected, got):
            for c, e, g in zip(cols, erow, grow):
                cells.append(CellCheck((kind, anchor, quantity), tuple(r), c, e, g))
    return TableReport(cells)


def format_grids(model: SeparationModel) -> str:
    """The catalog's reference grids as aligned text, one grid per paragraph."""
    cat = enumerate_blocks(model)
    parts = []
    for quantity in ("separation", "increment"):
        for kind in (BlockKind.T, BlockKind.D):
            rows, cols = grid_shape(model, kind)
            for anchor in Anchor:
                head = f"# {kind.value} {anchor.value} {quantity}"
                lines = [head, "gaps".ljust(16) + "".join(f"{c:>6}" for c in cols)]
                for r, vals in zip(rows, cat.grid(kind, anchor, rows, cols, quantity)):
                    label = "(" + ",".join(str(g) for g in r) + ")"
                    lines.append(label.ljust(16) + "".join(f"{v:>6}" for v in vals))
                parts.append("\n".join(lines))
    return "\n\n".join(parts) + "\n"


# ---------------------------------------------------------------- benchmark

CSV_COLUMNS = ("id", "mode", "n", "tw_min", "te_min", "solver_s", "baseline_s", "oracle_s", "time_s")


@dataclass
class BenchRow:
    id: str
    mode: str
    n: int
    tw_min: int
    te_min: int
    solver_s: int | None
    baseline_s: int | None
    oracle_s: int | None
    time_s: float
    error: str = ""

    def as_csv(self) -> list[str]:
        def cell(v):
            return "" if v is None else str(v)
        return [self.id, self.mode, str(self.n), str(self.tw_min), str(self.te_min), cell(self.solver_s),
                cell(self.baseline_s), cell(self.oracle_s), f"{self.time_s:.4f}"]


@dataclass
class BenchConfig:
    specs: list[tuple[GenSpec, int]]
    oracle_threshold: int = 8
    model: str = "heathrow-recat-single"

    @classmethod
    def from_dict(cls, data: dict) -> "BenchConfig":
        specs = []
        for item in data["instances"]:
            reps = int(item.get("repeat", 1))
            props = tuple(item.get("proportions", DEFAULT_PROPORTIONS))
            spec = GenSpec(int(item["count"]), int(item["t_e"]), int(item["t_w"]), item.get("mode", "landing"),
                           int(item.get("seed", 0)), props)
            specs.append((spec, reps))
        return cls(specs, int(data.get("oracle_threshold", 8)), data.get("model", "heathrow-recat-single"))

    @classmethod
    def load(cls, path: str) -> "BenchConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def solve_instance(inst: Instance, model: SeparationModel):
    if inst.layout is Layout.DUAL:
        return solve_dual(inst.dual(), model)
    return solve_single(inst.aircraft, model, inst.t0)


def oracle_instance(inst: Instance, model: SeparationModel, limit: int):
    if inst.layout is Layout.DUAL:
        d = inst.dual()
        return oracle_dual(d.landings, d.takeoffs, model, inst.t0, limit=limit)
    return oracle_single(inst.aircraft, model, inst.t0, limit=limit)


def run_bench(config: BenchConfig | str, model: SeparationModel | None = None) -> list[BenchRow]:
    from .separation import load_model
    cfg = BenchConfig.load(config) if isinstance(config, str) else config
    model = model or load_model(cfg.model)
    rows = []
    for spec, reps in cfg.specs:
        for r in range(reps):
            s = GenSpec(spec.count, spec.t_e, spec.t_w, spec.mode, spec.seed + r, spec.proportions)
            inst = gen_instance(s)
            rid = f"{s.mode}-{s.count}-tw{s.t_w}-te{s.t_e}-s{s.seed}"
            solver = baseline = oracle = None
            err = ""
            elapsed = 0.0
            try:
                t = time.perf_counter()
                sol = solve_instance(inst, model)
                elapsed = time.perf_counter() - t
                solver = sol.makespan
            except Exception as e:  # recorded per row; the run continues
                err = f"solver: {e}"
            try:
                baseline = fcfs_baseline(inst.aircraft, model, inst.t0, inst.layout).makespan
            except Infeasible:
                pass
            if inst.n <= cfg.oracle_threshold:
                try:
                    oracle = oracle_instance(inst, model, cfg.oracle_threshold).makespan
                except (Infeasible, LimitExceeded) as e:
                    err = err or f"oracle: {e}"
            rows.append(BenchRow(rid, s.mode, s.count, s.t_w, s.t_e, solver, baseline, oracle, elapsed, err))
    rows.sort(key=lambda b: b.id)
    return rows


def rows_to_csv(rows: Iterable[BenchRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow(r.as_csv())
    return buf.getvalue()
