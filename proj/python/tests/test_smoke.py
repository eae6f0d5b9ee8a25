from fractions import Fraction

import pytest

import xworld


def test_fixtures_listed():
    assert xworld.fixture_names() == ["fig1", "fig2", "fig3", "fig4", "fig5"]


def test_fig2_breakdown():
    m = xworld.Model.fixture("fig2")
    iv = xworld.Intervention("A", "1")
    twin = xworld.d_separated(m, "twin", iv, "A", "D_a", ["B"])
    assert not twin["separated"]
    assert twin["witness"] == "A <- C <- U -> C_do_A=1 -> B_do_A=1 -> D_do_A=1"
    assert xworld.d_separated(m, "teleporter", iv, "A", "D_a", ["B"])["separated"]
    assert xworld.d_separated(m, "real", None, "A", "B", ["C"])["separated"]


def test_fig3_methods_agree():
    m = xworld.Model.fixture("fig3")
    iv = xworld.parse_intervention("X=1")
    oracle = xworld.abduction(m, iv, "Y_x", "1")
    assert isinstance(oracle, Fraction)
    for z in ("C", "Z", "T"):
        assert xworld.criterion(m, iv, "Y_x", [], [z])["satisfied"]
        assert xworld.adjust(m, iv, "Y_x", "1", {}, [z]) == oracle


def test_inadmissible_adjustment_raises():
    m = xworld.Model.fixture("fig4")
    iv = xworld.Intervention("X", "1")
    with pytest.raises(xworld.XWorldError, match="adjustment set not admissible"):
        xworld.adjust(m, iv, "Y_x", "1", {"W": "1"}, [])


def test_joint_sums_to_one():
    m = xworld.Model.fixture("fig1")
    names, rows = xworld.crossworld_joint(m, xworld.Intervention("X", "1"), ["X", "Y_x"])
    assert names == ["X", "Y_do_X=1"]
    assert sum(Fraction(*p) for _, p in rows) == 1


def test_model_round_trip_and_validation():
    m = xworld.Model.fixture("fig1")
    text = m.render()
    assert xworld.Model.parse(text).render() == text
    assert xworld.validate_text(text) == []
    assert m.solve({"U_Z": "1", "U_X": "0", "U_Y": "0"})["Y"] == "1"


def test_dot_and_duplicates():
    m = xworld.Model.fixture("fig2")
    iv = xworld.Intervention("A", "1")
    assert xworld.duplicates(m, "teleporter", iv) == ["D_do_A=1"]
    assert xworld.export_dot(m, "teleporter", iv).startswith('digraph "G" {')


def test_trials_are_reproducible():
    a = xworld.trials(seed=7, count=10)
    assert a == xworld.trials(seed=7, count=10, threads=2)
    assert '"teleporter_unsound":0' in a.splitlines()[-1]


def test_cli_entry():
    code, out, _ = xworld.run_cli(["examples"])
    assert code == 0
    assert "MISMATCH" not in out
