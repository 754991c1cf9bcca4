"""End-to-end acceptance checks; each prints one PASS/FAIL line."""

import time

import pytest

import test_properties as props
from runwayseq.harness import (GenSpec, export_mip, gen_instance, oracle_instance, solve_instance, solve_lp,
                               verify_tables)
from runwayseq.separation import builtin_model, validate_cross, validate_landing_table, validate_takeoff_table
from runwayseq.separation import Layout
from runwayseq.sequence import Infeasible, is_feasible
from runwayseq.single import fcfs_baseline, relaxation_lower_bound

SINGLE = builtin_model("heathrow-recat-single")
DUAL = builtin_model("heathrow-recat-dual")

# arrivals spread over a few minutes so order choices matter
TIGHT_TE = 5


@pytest.fixture
def report(capsys):
    def emit(name, ok, detail=""):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} {name} {detail}".rstrip())
        assert ok, detail
    return emit


def _oracle_sweep(model, specs):
    checked = mismatches = 0
    for spec in specs:
        inst = gen_instance(spec)
        try:
            want = oracle_instance(inst, model, 8).makespan
        except Infeasible:
            continue
        checked += 1
        mismatches += solve_instance(inst, model).makespan != want
    return checked, mismatches


def test_golden_tables(report):
    # a fresh copy keeps cached gap indexes from other tests out of the timing
    model = DUAL.replace(name="golden-timing")
    t = time.perf_counter()
    rep = verify_tables(model)
    elapsed = time.perf_counter() - t
    report("golden-tables", rep.ok and len(rep.cells) == 224 and elapsed < 1.0,
           f"{rep.passed}/{len(rep.cells)} cells in {elapsed:.3f}s")


def test_separation_matrices(report):
    land = validate_landing_table(SINGLE)
    take = {c.clause: (c.witness, c.detail) for c in validate_takeoff_table(SINGLE).failed()}
    want = {"super_diag_step": ((1,), "D[1][2]-D[1][1]=20 != 10"),
            "first_rows": ((1, 3), "D[1][3]-D[2][3]=20 != 40")}
    cross = validate_cross(SINGLE, Layout.SINGLE).ok and validate_cross(DUAL, Layout.DUAL).ok
    report("separation-matrices", land.ok and take == want and cross, f"takeoff failures {sorted(take)}")


def test_single_oracle_equivalence(report):
    specs = [GenSpec(4 + i % 5, TIGHT_TE, tw, mode, seed=1000 * tw + i)
             for mode in ("landing", "takeoff", "mixed") for tw in (30, 45, 60) for i in range(200)]
    t = time.perf_counter()
    checked, bad = _oracle_sweep(SINGLE, specs)
    elapsed = time.perf_counter() - t
    report("single-oracle-equivalence", bad == 0 and checked > 0 and elapsed < 60,
           f"{checked - bad}/{checked} equal in {elapsed:.1f}s")


def test_dual_oracle_equivalence(report):
    specs = [GenSpec(4 + i % 5, TIGHT_TE, 30, "dual", seed=7000 + i) for i in range(200)]
    t = time.perf_counter()
    checked, bad = _oracle_sweep(DUAL, specs)
    elapsed = time.perf_counter() - t
    report("dual-oracle-equivalence", bad == 0 and checked > 0 and elapsed < 120,
           f"{checked - bad}/{checked} equal in {elapsed:.1f}s")


def test_property_suite(report):
    failed = []
    for name in ("test_merge_delta_matches_rescheduling", "test_gamma_matches_rescheduling",
                 "test_pure_schedules_relate_to_predecessor_only", "test_unconstrained_mixed_schedule_has_path",
                 "test_dual_relevance_distance", "test_semi_resident_swap_offset"):
        try:
            getattr(props, name)()
        except AssertionError:
            failed.append(name)
    report("property-suite", not failed, ", ".join(failed))


def test_scale_runtime(report):
    inst = gen_instance(GenSpec(100, 60, 30, "dual", seed=0))
    t = time.perf_counter()
    sol = solve_instance(inst, DUAL)
    elapsed = time.perf_counter() - t
    report("scale-runtime", elapsed < 5.0 and sol.makespan > 0, f"n=100 dual in {elapsed:.2f}s")


def test_dominance(report):
    specs = [GenSpec(n, 60, 30, "dual", seed=s) for n in (70, 80, 90, 100) for s in range(3)]
    specs += [GenSpec(n, 30, 30, mode, seed=s) for mode in ("landing", "takeoff", "mixed")
              for n in (10, 20, 40) for s in range(2)]
    bad, no_base = [], 0
    for spec in specs:
        inst = gen_instance(spec)
        model = DUAL if inst.layout is Layout.DUAL else SINGLE
        sol = solve_instance(inst, model)
        try:
            base = fcfs_baseline(inst.aircraft, model, inst.t0, inst.layout).makespan
        except Infeasible:
            # dense traffic can break windows under FCFS; only the bound applies then
            base = None
            no_base += 1
        lb, _ = relaxation_lower_bound(inst.aircraft, model, inst.t0, node_limit=5000)
        ok = is_feasible(sol.schedule, model) and lb <= sol.makespan and (base is None or sol.makespan <= base)
        if not ok:
            bad.append(inst.name)
    report("dominance", not bad,
           f"{len(specs) - len(bad)}/{len(specs)} within [bound, fcfs]; fcfs infeasible on {no_base}")


def test_mip_cross_check(report):
    bad = 0
    for i in range(50):
        mode = ("landing", "takeoff", "mixed", "dual")[i % 4]
        inst = gen_instance(GenSpec(2 + i % 5, TIGHT_TE, 30, mode, seed=300 + i))
        model = DUAL if inst.layout is Layout.DUAL else SINGLE
        want = oracle_instance(inst, model, 8).makespan
        bad += round(solve_lp(export_mip(inst, model))) != want
    report("mip-cross-check", bad == 0, f"{50 - bad}/50 equal")
