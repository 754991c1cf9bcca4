"""Wake separation tables, the unified separation lookup and table checks."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Sequence


class NotFound(KeyError):
    pass


class Task(enum.IntEnum):
    LANDING = 0
    TAKEOFF = 1

    @property
    def letter(self) -> str:
        return "L" if self is Task.LANDING else "T"

    @classmethod
    def parse(cls, text: str) -> "Task":
        t = text.strip().upper()
        if t in ("L", "LAND", "LANDING"):
            return cls.LANDING
        if t in ("T", "TAKEOFF", "D", "DEP", "DEPARTURE"):
            return cls.TAKEOFF
        raise ValueError(f"unknown task {text!r}")


class Layout(enum.Enum):
    SINGLE = "single"
    DUAL = "dual"

    @classmethod
    def parse(cls, text: str) -> "Layout":
        t = text.strip().lower()
        if t in ("single", "s"):
            return cls.SINGLE
        if t in ("dual", "dualclose", "d"):
            return cls.DUAL
        raise ValueError(f"unknown layout {text!r}")


CLASS_LETTERS = "ABCDEFGH"


def class_name(c: int, eta: int = 6) -> str:
    if eta <= len(CLASS_LETTERS):
        return CLASS_LETTERS[c - 1]
    return str(c)


def parse_class(text: str) -> int:
    t = text.strip().upper()
    if t.isdigit():
        return int(t)
    if len(t) == 1 and t in CLASS_LETTERS:
        return CLASS_LETTERS.index(t) + 1
    raise ValueError(f"bad aircraft class {text!r}")


Matrix = tuple[tuple[int, ...], ...]


def _as_matrix(rows: Iterable[Iterable[int]]) -> Matrix:
    return tuple(tuple(int(v) for v in r) for r in rows)


@dataclass(frozen=True)
class SeparationModel:
    """Separation data. Classes are 1-based; ``T[i-1][j-1]`` is leading i, trailing j."""

    eta: int
    t0: int
    delta: int
    rho1: int
    rho2: int
    T: Matrix
    D: Matrix
    td: int
    dt: int
    pd: int
    dp: int
    name: str = field(default="custom", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "T", _as_matrix(self.T))
        object.__setattr__(self, "D", _as_matrix(self.D))
        for m in (self.T, self.D):
            if len(m) != self.eta or any(len(r) != self.eta for r in m):
                raise ValueError("separation matrices must be eta x eta")

    def land(self, i: int, j: int) -> int:
        return self.T[i - 1][j - 1]

    def take(self, i: int, j: int) -> int:
        return self.D[i - 1][j - 1]

    def matrix(self, task: Task) -> Matrix:
        return self.T if task is Task.LANDING else self.D

    def check_class(self, c: int) -> None:
        if not 1 <= c <= self.eta:
            raise ValueError(f"class {c} outside 1..{self.eta}")

    def replace(self, **changes) -> "SeparationModel":
        data = {k: getattr(self, k) for k in self.__dataclass_fields__}
        data.update(changes)
        return SeparationModel(**data)

    def with_entry(self, task: Task, i: int, j: int, value: int) -> "SeparationModel":
        m = [list(r) for r in self.matrix(task)]
        m[i - 1][j - 1] = value
        key = "T" if task is Task.LANDING else "D"
        return self.replace(**{key: m})

    def sep_table(self, layout: Layout) -> list:
        """Nested lookup ``Y[lead_task][lead_class][trail_task][trail_class]``, 1-based classes.

        This is the hot-path form of :func:`min_separation`.
        """
        return _sep_table(self, layout)


_TABLE_CACHE: dict = {}


def _sep_table(model: SeparationModel, layout: Layout) -> list:
    key = (model, layout)
    hit = _TABLE_CACHE.get(key)
    if hit is not None:
        return hit
    n = model.eta
    ld, tl = (model.td, model.dt) if layout is Layout.SINGLE else (model.pd, model.dp)
    table = [[None] * (n + 1) for _ in range(2)]
    for a in range(1, n + 1):
        table[0][a] = [
            [0] + [model.land(a, b) for b in range(1, n + 1)],
            [0] + [ld] * n,
        ]
        table[1][a] = [
            [0] + [tl] * n,
            [0] + [model.take(a, b) for b in range(1, n + 1)],
        ]
    if len(_TABLE_CACHE) > 64:
        _TABLE_CACHE.clear()
    _TABLE_CACHE[key] = table
    return table


_HEATHROW_T = (
    (90, 135, 158, 158, 158, 180),
    (90, 90, 113, 113, 135, 158),
    (60, 60, 68, 90, 90, 135),
    (60, 60, 60, 60, 68, 113),
    (60, 60, 60, 60, 68, 90),
    (60, 60, 60, 60, 60, 60),
)

_RECAT_D = (
    (80, 100, 120, 140, 160, 180),
    (80, 80, 100, 100, 120, 140),
    (60, 60, 80, 80, 100, 120),
    (60, 60, 60, 60, 60, 120),
    (60, 60, 60, 60, 60, 100),
    (60, 60, 60, 60, 60, 80),
)

BUILTIN_NAMES = ("heathrow-recat-single", "heathrow-recat-dual")


def builtin_model(name: str) -> SeparationModel:
    if name not in BUILTIN_NAMES:
        raise NotFound(name)
    # Both variants carry all four cross separations; the layout picks the pair.
    return SeparationModel(
        eta=6, t0=60, delta=8, rho1=3, rho2=5,
        T=_HEATHROW_T, D=_RECAT_D,
        td=75, dt=60, pd=0, dp=60, name=name,
    )


def default_layout(model: SeparationModel) -> Layout:
    return Layout.DUAL if model.name.endswith("-dual") else Layout.SINGLE


def min_separation(model: SeparationModel, leading: tuple[int, Task],
                   trailing: tuple[int, Task], layout: Layout) -> int:
    (ci, ti), (cj, tj) = leading, trailing
    model.check_class(ci)
    model.check_class(cj)
    ti, tj = Task(ti), Task(tj)
    if ti is Task.LANDING and tj is Task.LANDING:
        return model.land(ci, cj)
    if ti is Task.TAKEOFF and tj is Task.TAKEOFF:
        return model.take(ci, cj)
    if layout is Layout.SINGLE:
        return model.td if ti is Task.LANDING else model.dt
    return model.pd if ti is Task.LANDING else model.dp


# ---------------------------------------------------------------- file format

def dump_model(model: SeparationModel) -> str:
    lines = [f"{model.eta} {model.t0} {model.delta} {model.rho1} {model.rho2}"]
    lines += [" ".join(str(v) for v in row) for row in model.T]
    lines += [" ".join(str(v) for v in row) for row in model.D]
    lines.append(f"{model.td} {model.dt} {model.pd} {model.dp}")
    return "\n".join(lines) + "\n"


def parse_model(text: str, name: str = "custom") -> SeparationModel:
    rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not rows:
        raise ValueError("empty separation file")
    eta, t0, delta, rho1, rho2 = (int(v) for v in rows[0])
    if len(rows) != 2 + 2 * eta:
        raise ValueError(f"expected {2 + 2 * eta} non-empty lines, got {len(rows)}")
    T = [[int(v) for v in r] for r in rows[1:1 + eta]]
    D = [[int(v) for v in r] for r in rows[1 + eta:1 + 2 * eta]]
    td, dt, pd, dp = (int(v) for v in rows[-1])
    return SeparationModel(eta, t0, delta, rho1, rho2, T, D, td, dt, pd, dp, name=name)


def load_model(spec: str) -> SeparationModel:
    """Builtin name or path to a separation file."""
    if spec in BUILTIN_NAMES:
        return builtin_model(spec)
    with open(spec) as fh:
        return parse_model(fh.read(), name=spec)


# ---------------------------------------------------------------- validation

@dataclass(frozen=True)
class Check:
    group: str
    clause: str
    passed: bool
    witness: tuple | None = None
    detail: str = ""
    witnesses: tuple = ()


@dataclass
class ValidationReport:
    checks: list[Check]

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def failed(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def get(self, clause: str) -> Check:
        for c in self.checks:
            if c.clause == clause:
                return c
        raise KeyError(clause)

    def lines(self) -> list[str]:
        out = []
        for c in self.checks:
            w = "" if c.witness is None else f" witness={c.witness}"
            d = f" {c.detail}" if c.detail else ""
            out.append(f"{c.group}:{c.clause} {'pass' if c.passed else 'FAIL'}{w}{d}")
        return out


class _Clause:
    """Collects violations of one clause; the first one becomes the witness."""

    def __init__(self, group: str, clause: str):
        self.group, self.clause = group, clause
        self.bad: list[tuple] = []
        self.notes: list[str] = []

    def require(self, cond: bool, witness: tuple, note: str = "") -> None:
        if not cond:
            self.bad.append(witness)
            if note:
                self.notes.append(note)

    def done(self) -> Check:
        if not self.bad:
            return Check(self.group, self.clause, True)
        return Check(self.group, self.clause, False, self.bad[0],
                     self.notes[0] if self.notes else "", tuple(self.bad))


def _rng(a: int, b: int) -> range:
    return range(a, b + 1)


def validate_landing_table(model: SeparationModel) -> ValidationReport:
    n, t0, dl = model.eta, model.t0, model.delta
    r1, r2 = model.rho1, model.rho2

    def T(i, j):
        return model.land(i, j)

    checks = []
    g = "landing"

    c = _Clause(g, "diag_heavy")
    for i in (1, 2):
        if i <= n:
            c.require(2 * T(i, i) == 3 * t0, (i,), f"T[{i}][{i}]={T(i, i)} != {1.5 * t0:g}")
    checks.append(c.done())

    c = _Clause(g, "diag_rho")
    c.require(8 * dl > t0 and 6 * dl < t0, (), f"delta={dl} outside (T0/8, T0/6)")
    for i in sorted({r1, r2}):
        if 1 <= i <= n:
            c.require(T(i, i) == t0 + dl, (i,), f"T[{i}][{i}]={T(i, i)} != {t0 + dl}")
    checks.append(c.done())

    c = _Clause(g, "diag_other")
    for i in _rng(1, n):
        if i not in (1, 2, r1, r2):
            c.require(T(i, i) == t0, (i,), f"T[{i}][{i}]={T(i, i)} != {t0}")
    checks.append(c.done())

    c = _Clause(g, "upper_order")
    for i in _rng(1, n):
        for k in _rng(i + 1, n):
            for j in _rng(k + 1, n):
                ok = T(i, k) <= T(i, j) <= 3 * t0 and T(k, j) < T(i, j)
                c.require(ok, (i, k, j))
    checks.append(c.done())

    c = _Clause(g, "lower_triangle")
    for k in _rng(1, n):
        for j in _rng(k, n):
            for i in _rng(j, n):
                ok = T(i, k) < T(i, j) + T(j, k) and T(k, i) < T(j, i) + T(k, j)
                c.require(ok, (k, j, i))
    checks.append(c.done())

    c = _Clause(g, "second_row_first")
    if n >= 2:
        c.require(2 * T(2, 1) == 3 * t0, (2, 1), f"T[2][1]={T(2, 1)}")
    checks.append(c.done())

    c = _Clause(g, "below_diag")
    for i in _rng(1, n):
        for j in _rng(1, i - 1):
            if i != 2:
                c.require(T(i, j) == t0, (i, j), f"T[{i}][{j}]={T(i, j)}")
    checks.append(c.done())

    c = _Clause(g, "super_diag")
    for k in _rng(2, n):
        if k == r2:
            c.require(T(k - 1, k) == t0 + dl, (k - 1, k))
        else:
            c.require(2 * T(k - 1, k) >= 3 * t0, (k - 1, k))
    checks.append(c.done())

    c = _Clause(g, "column_drop")
    for i in _rng(2, n):
        for k in _rng(i, n):
            if (i, k) != (r2, r2):
                c.require(T(i - 1, k) - T(i, k) > 2 * dl, (i, k),
                          f"T[{i - 1}][{k}]-T[{i}][{k}]={T(i - 1, k) - T(i, k)}")
    checks.append(c.done())

    c = _Clause(g, "heavy_gaps")
    if n >= 2:
        c.require(T(1, 2) > 2 * t0, (1, 2))
    if n >= 3:
        c.require(2 * T(2, 3) > 3 * t0 + 4 * dl, (2, 3))
    checks.append(c.done())

    c = _Clause(g, "first_row_margin")
    k = 1
    for h in _rng(k + 2, n):
        for j in _rng(h, n):
            c.require(2 * (T(k, j) - T(h, j)) > t0, (k, h, j))
    checks.append(c.done())

    c = _Clause(g, "second_row_margin")
    for k in _rng(3, n):
        for j in _rng(k + 1, n):
            d2 = 2 * (T(2, j) - T(k, j))
            in_e = t0 - 2 * dl <= d2 < t0
            c.require(in_e or d2 > t0, (k, j), f"T[2][{j}]-T[{k}][{j}]={d2 / 2:g}")
    checks.append(c.done())

    checks.append(_triangle(g, n, T))
    return ValidationReport(checks)


def _triangle(group: str, n: int, M) -> Check:
    c = _Clause(group, "triangle")
    for i in _rng(1, n):
        for j in _rng(1, n):
            for k in _rng(1, n):
                c.require(M(i, k) < M(i, j) + M(j, k), (i, j, k))
    return c.done()


def validate_takeoff_table(model: SeparationModel) -> ValidationReport:
    n, t0, r2 = model.eta, model.t0, model.rho2

    def D(i, j):
        return model.take(i, j)

    checks = []
    g = "takeoff"
    heavy = {1, 2, 3, n}

    c = _Clause(g, "diag_heavy")
    for i in sorted(heavy):
        if 1 <= i <= n:
            c.require(3 * D(i, i) == 4 * t0, (i,), f"D[{i}][{i}]={D(i, i)}")
    checks.append(c.done())

    c = _Clause(g, "diag_other")
    for i in _rng(1, n):
        if i not in heavy:
            c.require(D(i, i) == t0, (i,), f"D[{i}][{i}]={D(i, i)}")
    checks.append(c.done())

    c = _Clause(g, "second_row_first")
    if n >= 2:
        c.require(3 * D(2, 1) == 4 * t0, (2, 1), f"D[2][1]={D(2, 1)}")
    checks.append(c.done())

    c = _Clause(g, "below_diag")
    for i in _rng(3, n):
        for j in _rng(1, i - 1):
            c.require(D(i, j) == t0, (i, j), f"D[{i}][{j}]={D(i, j)}")
    checks.append(c.done())

    c = _Clause(g, "monotone")
    for k in _rng(1, n):
        for i in _rng(k, n):
            for j in _rng(i, n):
                ok = D(i, j) <= D(k, j) <= 3 * t0 and D(k, i) <= D(k, j)
                c.require(ok, (k, i, j))
    checks.append(c.done())

    c = _Clause(g, "lower_triangle")
    for k in _rng(1, n):
        for j in _rng(k, n):
            for i in _rng(j, n):
                ok = D(i, k) < D(i, j) + D(j, k) and D(k, i) < D(j, i) + D(k, j)
                c.require(ok, (k, j, i))
    checks.append(c.done())

    c = _Clause(g, "super_diag_step")
    for k in (1, 2):
        if k + 1 <= n:
            diff = D(k, k + 1) - D(k, k)
            c.require(6 * diff == t0, (k,), f"D[{k}][{k + 1}]-D[{k}][{k}]={diff} != {t0 / 6:g}")
    checks.append(c.done())

    c = _Clause(g, "super_diag_flat")
    for k in sorted({3, r2 - 1}):
        if 1 <= k < n:
            c.require(D(k, k + 1) == D(k, k), (k,), f"D[{k}][{k + 1}]={D(k, k + 1)}")
    checks.append(c.done())

    c = _Clause(g, "first_rows")
    if n >= 3:
        c.require(3 * (D(1, 3) - D(2, 3)) == t0, (1, 3), f"D[1][3]-D[2][3]={D(1, 3) - D(2, 3)}")
    for j in _rng(3, n):
        diff = D(1, j) - D(2, j)
        c.require(3 * diff == 2 * t0, (1, j), f"D[1][{j}]-D[2][{j}]={diff} != {2 * t0 / 3:g}")
    checks.append(c.done())

    c = _Clause(g, "last_column")
    if 4 <= n:
        c.require(D(3, n) == D(4, n), (3, n), f"D[3][{n}]={D(3, n)} D[4][{n}]={D(4, n)}")
    if 1 <= r2 - 1 and r2 <= n:
        c.require(D(r2 - 1, n) == D(r2, r2) + t0, (r2 - 1, n))
    checks.append(c.done())

    c = _Clause(g, "column_step")
    skip = {(3, n), (r2 - 1, r2), (r2 - 2, r2)}
    for j in _rng(3, n):
        for k in _rng(2, j - 1):
            if (k, j) in skip:
                continue
            diff = D(k, j) - D(k + 1, j)
            c.require(3 * diff == t0, (k, j), f"D[{k}][{j}]-D[{k + 1}][{j}]={diff}")
    checks.append(c.done())

    checks.append(_triangle(g, n, D))
    return ValidationReport(checks)


def validate_cross(model: SeparationModel, layout: Layout) -> ValidationReport:
    t0 = model.t0
    if layout is Layout.SINGLE:
        c1 = _Clause("cross", "single_td")
        c1.require(t0 <= model.td and 2 * model.td < 3 * t0, ("td",), f"T_D={model.td}")
        c2 = _Clause("cross", "single_dt")
        c2.require(t0 <= model.dt and 2 * model.dt < 3 * t0, ("dt",), f"D_T={model.dt}")
        return ValidationReport([c1.done(), c2.done()])
    c1 = _Clause("cross", "dual_dp")
    c1.require(model.dp == t0, ("dp",), f"D_P={model.dp}")
    c2 = _Clause("cross", "dual_pd")
    c2.require(model.pd == 0, ("pd",), f"P_D={model.pd}")
    return ValidationReport([c1.done(), c2.done()])


def validate_all(model: SeparationModel, layout: Layout) -> ValidationReport:
    checks: list[Check] = []
    for rep in (validate_landing_table(model), validate_takeoff_table(model),
                validate_cross(model, layout)):
        checks.extend(rep.checks)
    return ValidationReport(checks)


def triangle_holds(model: SeparationModel, tasks: Sequence[Task] = (Task.LANDING, Task.TAKEOFF)) -> bool:
    for t in tasks:
        M = model.matrix(t)
        if not _triangle("", model.eta, lambda i, j: M[i - 1][j - 1]).passed:
            return False
    return True
