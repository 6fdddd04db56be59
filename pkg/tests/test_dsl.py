import pytest

from fairsample.dsl import parse_diagram, serialize_scenario
from fairsample.errors import DslError, RoleConflict
from fairsample.fixtures import FIXTURE_NAMES, fixture
from fairsample.verifier import DirectConditioning, SelectionNode, verify


def test_parse_fig2c_structure():
    spec = fixture("fig2c")
    d = spec.diagram
    assert d.settings == ("X", "Y")
    assert d.selection_node == "K"
    assert spec.selection == SelectionNode("K")
    assert spec.bell("alice") == ("A_1",)
    assert spec.settings("alice") == ("X",)
    assert ("A_2", "K") in d.directed


def test_parse_fig4_conditioning():
    spec = fixture("fig4")
    assert spec.selection == DirectConditioning((("A_2", 1), ("B_2", 1)))
    assert spec.diagram.selection_node is None


def test_default_bell_roles():
    assert fixture("fig1b").bell("alice") == ()
    assert fixture("fig2c").bell("alice") == ("A_1",)


def test_explicit_bell_roles_and_obstruction_flagging():
    spec = fixture("franson")
    assert spec.bell("alice") == ("A",)
    verdict = verify(spec)
    assert verdict.obstruction == ("A", "B")


def test_comments_and_blank_lines_ignored():
    spec = parse_diagram(
        """
# leading comment

node X setting
node A outcome(alice)   # trailing comment
edge X -> A
"""
    )
    assert spec.diagram.names == ("A", "X")


def test_assume_line():
    spec = parse_diagram(
        "node X setting\nnode A outcome(alice)\nnode L latent\n"
        "edge X -> A\nassume lambda-influences-all\n"
    )
    assert spec.lambda_influences_all


# -- positioned errors -----------------------------------------------------------


def error_of(source):
    with pytest.raises(DslError) as err:
        parse_diagram(source)
    return err.value


def test_unknown_kind_positioned():
    err = error_of("node X widget\n")
    assert (err.line, err.column) == (1, 8)


def test_duplicate_node_positioned():
    err = error_of("node X setting\nnode X latent\n")
    assert err.line == 2


def test_unknown_edge_endpoint_positioned():
    err = error_of("node X setting\nedge X -> Q\n")
    assert err.line == 2
    assert err.column == 11


def test_edge_out_of_selection_positioned():
    err = error_of(
        "node K selection\nnode A outcome(alice)\nedge K -> A\n"
    )
    assert err.line == 3
    assert "selection" in str(err)


def test_edge_into_setting_positioned():
    err = error_of("node X setting\nnode A outcome(alice)\nedge A -> X\n")
    assert err.line == 3


def test_cycle_positioned():
    err = error_of(
        "node A outcome(p)\nnode B outcome(p)\nedge A -> B\nedge B -> A\n"
    )
    assert err.line in (3, 4)
    assert "cycle" in str(err)


def test_bad_arrow_token():
    err = error_of("node A outcome(p)\nnode B outcome(p)\nedge A => B\n")
    assert err.line == 3


def test_bell_party_mismatch_is_role_conflict():
    source = (
        "node X setting\nnode A outcome(alice)\nnode B outcome(bob)\n"
        "edge X -> A\nbell bob: A\n"
    )
    with pytest.raises(RoleConflict) as err:
        parse_diagram(source)
    assert err.value.line == 5


def test_condition_and_selection_conflict():
    source = (
        "node A outcome(alice)\nnode K selection\nedge A -> K\ncondition A=1\n"
    )
    with pytest.raises(RoleConflict):
        parse_diagram(source)


def test_bad_condition_term():
    err = error_of("node A outcome(alice)\ncondition A=x\n")
    assert err.line == 2


def test_unknown_declaration():
    err = error_of("wibble A -> B\n")
    assert (err.line, err.column) == (1, 1)


def test_setting_shared_between_parties_is_role_conflict():
    source = (
        "node X setting\nnode A outcome(alice)\nnode B outcome(bob)\n"
        "edge X -> A\nedge X -> B\n"
    )
    with pytest.raises(RoleConflict):
        parse_diagram(source)


# -- round trip -------------------------------------------------------------------


@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_round_trip_identity(name):
    spec = fixture(name)
    assert parse_diagram(serialize_scenario(spec)) == spec


def test_round_trip_preserves_assume_flag():
    source = (
        "node X setting\nnode A outcome(alice)\nnode L latent\n"
        "edge X -> A\nassume lambda-influences-all\n"
    )
    spec = parse_diagram(source)
    assert parse_diagram(serialize_scenario(spec)) == spec
