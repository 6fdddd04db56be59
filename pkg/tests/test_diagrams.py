import pytest

from fairsample import diagrams as dg
from fairsample.errors import (
    CycleDetected,
    DiagramError,
    EdgeIntoSetting,
    EdgeOutOfSelection,
    UnknownNode,
)
from fairsample.fixtures import fixture


def bipartite_nodes():
    return {
        "X": dg.setting(),
        "Y": dg.setting(),
        "A": dg.outcome("alice"),
        "B": dg.outcome("bob"),
        "Lambda": dg.latent(),
    }


def test_valid_lhv_diagram():
    d = dg.build_diagram(
        bipartite_nodes(),
        [("Lambda", "A"), ("Lambda", "B"), ("X", "A"), ("Y", "B")],
    )
    assert d.settings == ("X", "Y")
    assert d.latents == ("Lambda",)
    assert d.outcomes_of("alice") == ("A",)
    assert d.parties == ("alice", "bob")
    assert d.selection_node is None


def test_two_cycle_rejected():
    with pytest.raises(CycleDetected) as err:
        dg.build_diagram(bipartite_nodes(), [("A", "B"), ("B", "A")])
    assert set(err.value.cycle) >= {"A", "B"}


def test_long_cycle_rejected():
    nodes = {n: dg.outcome("p") for n in "ABC"}
    with pytest.raises(CycleDetected):
        dg.build_diagram(nodes, [("A", "B"), ("B", "C"), ("C", "A")])


def test_edge_into_setting_rejected():
    with pytest.raises(EdgeIntoSetting):
        dg.build_diagram(bipartite_nodes(), [("A", "X")])


def test_edge_out_of_selection_rejected():
    nodes = bipartite_nodes() | {"K": dg.selection()}
    with pytest.raises(EdgeOutOfSelection):
        dg.build_diagram(nodes, [("K", "A")])


def test_unknown_endpoint_rejected():
    with pytest.raises(UnknownNode):
        dg.build_diagram(bipartite_nodes(), [("X", "Q")])


def test_single_selection_node_enforced():
    nodes = bipartite_nodes() | {"K": dg.selection(), "K2": dg.selection()}
    with pytest.raises(DiagramError):
        dg.build_diagram(nodes, [])


def test_bidirected_endpoint_rules():
    nodes = bipartite_nodes()
    with pytest.raises(DiagramError):
        dg.build_diagram(nodes, [], bidirected_edges=[("A", "Lambda")])
    # common-cause resolution would direct an edge into the setting
    with pytest.raises(EdgeIntoSetting):
        dg.build_diagram(nodes, [], bidirected_edges=[("X", "A")])


def test_nonlocal_edge_rules():
    nodes = {
        "A_1": dg.outcome("alice"),
        "A_2": dg.outcome("alice"),
        "B_1": dg.outcome("bob"),
        "Lambda": dg.latent(),
    }
    with pytest.raises(DiagramError):
        dg.build_diagram(nodes, [], nonlocal_edges=[("A_1", "A_2")])
    with pytest.raises(DiagramError):
        dg.build_diagram(nodes, [], nonlocal_edges=[("A_1", "Lambda")])
    d = dg.build_diagram(nodes, [], nonlocal_edges=[("A_1", "B_1")])
    assert d.nonlocal_edges == frozenset({("A_1", "B_1")})


# -- bidirected expansion -----------------------------------------------------


def test_expand_adds_fresh_latent_with_two_edges():
    nodes = {
        "A_1": dg.outcome("alice"),
        "A_2": dg.outcome("alice"),
    }
    d = dg.build_diagram(nodes, [], bidirected_edges=[("A_2", "A_1")])
    expanded = d.expand_bidirected()
    assert expanded.bidirected == frozenset()
    assert "γ_A_1_A_2" in expanded.names
    assert expanded.children("γ_A_1_A_2") == ("A_1", "A_2")
    assert expanded.kind("γ_A_1_A_2").role == dg.LATENT


def test_expand_without_bidirected_is_identity():
    d = fixture("fig2c").diagram
    assert d.expand_bidirected() is d


def test_expand_shared_node_gets_distinct_latents():
    nodes = {n: dg.outcome("p") for n in ("A", "B", "C")}
    d = dg.build_diagram(nodes, [], bidirected_edges=[("A", "B"), ("B", "C")])
    expanded = d.expand_bidirected()
    assert set(expanded.latents) == {"γ_A_B", "γ_B_C"}


def test_expand_idempotent_on_output():
    d = fixture("fig2a").diagram
    once = d.expand_bidirected()
    assert once.expand_bidirected() is once


# -- ancestry -----------------------------------------------------------------


def test_descendants_fig1b():
    d = fixture("fig1b").diagram
    assert d.descendants("A") == {"K"}
    assert d.ancestors("K") == {"A", "B", "Lambda", "X", "Y"}


def test_isolated_node_has_no_relatives():
    nodes = bipartite_nodes()
    d = dg.build_diagram(nodes, [("X", "A")])
    assert d.ancestors("B") == set()
    assert d.descendants("B") == set()


def test_chain_transitive_closure():
    nodes = {"X": dg.setting(), "A": dg.outcome("p"), "K": dg.selection()}
    d = dg.build_diagram(nodes, [("X", "A"), ("A", "K")])
    assert d.ancestors("K") == {"X", "A"}
    assert d.descendants("X") == {"A", "K"}


@pytest.mark.parametrize("name", ["fig1b", "fig2b", "fig2c", "fig4", "fig3"])
def test_ancestor_descendant_duality(name):
    d = fixture(name).diagram
    for u in d.names:
        for v in d.names:
            assert (u in d.ancestors(v)) == (v in d.descendants(u))


def test_unknown_node_in_queries():
    d = fixture("fig1b").diagram
    with pytest.raises(UnknownNode):
        d.ancestors("nope")
    with pytest.raises(UnknownNode):
        d.descendants("nope")
