import itertools

import pytest

from runwayseq.separation import (Layout, NotFound, SeparationModel, Task, builtin_model, dump_model,
                                  min_separation, parse_model, triangle_holds, validate_cross,
                                  validate_landing_table, validate_takeoff_table)

L, T = Task.LANDING, Task.TAKEOFF


def test_builtin_entries(single_model):
    assert single_model.land(1, 6) == 180
    assert single_model.take(4, 5) == 60


def test_unknown_builtin():
    with pytest.raises(NotFound):
        builtin_model("bogus")


def test_min_separation_examples(single_model):
    for layout in Layout:
        assert min_separation(single_model, (2, L), (3, L), layout) == 113
    assert min_separation(single_model, (1, L), (1, T), Layout.SINGLE) == 75
    assert min_separation(single_model, (1, L), (1, T), Layout.DUAL) == 0
    assert min_separation(single_model, (1, T), (1, L), Layout.SINGLE) == 60
    assert min_separation(single_model, (1, T), (1, L), Layout.DUAL) == 60


def test_min_separation_matches_table(single_model):
    for layout in Layout:
        tab = single_model.sep_table(layout)
        for a, b, ta, tb in itertools.product(range(1, 7), range(1, 7), Task, Task):
            assert tab[ta][a][tb][b] == min_separation(single_model, (a, ta), (b, tb), layout)


def test_builtin_landing_table_passes(single_model):
    rep = validate_landing_table(single_model)
    assert rep.ok, rep.lines()


def test_landing_heavy_diagonal_violation(single_model):
    rep = validate_landing_table(single_model.with_entry(L, 1, 1, 60))
    assert [c.clause for c in rep.failed()] == ["diag_heavy"]


def test_single_class_table_is_vacuous():
    m = SeparationModel(1, 60, 8, 3, 5, [[90]], [[80]], 75, 60, 0, 60)
    assert validate_landing_table(m).ok


def test_builtin_takeoff_table_conflicts(single_model):
    rep = validate_takeoff_table(single_model)
    failed = {c.clause: c for c in rep.failed()}
    assert set(failed) == {"super_diag_step", "first_rows"}
    step = failed["super_diag_step"]
    assert step.witness == (1,)
    assert step.detail == "D[1][2]-D[1][1]=20 != 10"
    rows = failed["first_rows"]
    assert rows.witness == (1, 3)
    assert rows.detail == "D[1][3]-D[2][3]=20 != 40"


def test_takeoff_diagonal_violation(single_model):
    rep = validate_takeoff_table(single_model.with_entry(T, 6, 6, 60))
    assert "diag_heavy" in {c.clause for c in rep.failed()}


def test_cross_checks(single_model):
    assert validate_cross(single_model, Layout.SINGLE).ok
    assert validate_cross(single_model, Layout.DUAL).ok
    bad = validate_cross(single_model.replace(td=95), Layout.SINGLE)
    assert [c.clause for c in bad.failed()] == ["single_td"]


def test_strict_triangle_on_landing_table(single_model):
    M = single_model.land
    for i, j, k in itertools.product(range(1, 7), repeat=3):
        assert M(i, k) < M(i, j) + M(j, k)
    assert triangle_holds(single_model)


def test_model_file_round_trip(single_model):
    text = dump_model(single_model)
    back = parse_model(text)
    assert dump_model(back) == text
    assert back.T == single_model.T and back.D == single_model.D


def test_bad_class_rejected(single_model):
    with pytest.raises(ValueError):
        min_separation(single_model, (7, L), (1, L), Layout.SINGLE)
