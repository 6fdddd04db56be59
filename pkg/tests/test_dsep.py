import numpy as np
import pytest

from fairsample import diagrams as dg
from fairsample.dsep import (
    BLOCKED,
    COLLIDER_OPENED,
    COLLIDER_UNCONDITIONED,
    NONCOLLIDER_CONDITIONED,
    OPEN,
    ci_probe,
    classify_path,
    d_separated,
    enumerate_paths,
)
from fairsample.errors import (
    BidirectedPresent,
    CardinalityOverflow,
    NonlocalPresent,
)
from fairsample.fixtures import fixture

from oracles import random_dag, reachability_d_separated, naive_simple_paths


def path_of(d, names):
    for p in enumerate_paths(d, names[0], names[-1]):
        if p.nodes == tuple(names):
            return p
    raise AssertionError(f"no path {names}")


# -- enumeration --------------------------------------------------------------


def test_fig1b_x_lambda_paths():
    d = fixture("fig1b").diagram
    paths = enumerate_paths(d, "X", "Lambda")
    assert [p.nodes for p in paths] == [
        ("X", "A", "K", "B", "Lambda"),
        ("X", "A", "Lambda"),
    ]
    assert paths[0].render() == "X -> A -> K <- B <- Lambda"


def test_disconnected_endpoints_have_no_paths():
    nodes = {"A": dg.outcome("p"), "B": dg.outcome("q"), "X": dg.setting()}
    d = dg.build_diagram(nodes, [("X", "A")])
    assert enumerate_paths(d, "A", "B") == []


def test_fig2b_paths_match_naive_oracle():
    d = fixture("fig2b").diagram
    adjacency = {n: set() for n in d.names}
    for u, v in d.directed:
        adjacency[u].add(v)
        adjacency[v].add(u)
    expected = naive_simple_paths(adjacency, "X", "Lambda")
    got = sorted(p.nodes for p in enumerate_paths(d, "X", "Lambda"))
    assert got == expected
    assert len(got) == 4


def test_lexicographic_order_is_global():
    d = fixture("fig2b").diagram
    sequences = [p.nodes for p in enumerate_paths(d, "X", "Lambda")]
    assert sequences == sorted(sequences)


def test_bidirected_must_be_expanded_first():
    d = fixture("fig2a").diagram
    with pytest.raises(BidirectedPresent):
        enumerate_paths(d, "X", "Lambda")
    expanded = d.expand_bidirected()
    assert enumerate_paths(expanded, "X", "Lambda")


def test_identical_endpoints_rejected():
    d = fixture("fig1b").diagram
    with pytest.raises(ValueError):
        enumerate_paths(d, "X", "X")


# -- classification -----------------------------------------------------------


def test_conditioned_collider_opens_path():
    d = fixture("fig1b").diagram
    path = path_of(d, ["X", "A", "K", "B", "Lambda"])
    verdict = classify_path(d, path, {"K"})
    assert verdict.status == OPEN
    assert verdict.reason == COLLIDER_OPENED
    assert verdict.opened_colliders == (("K", "K"),)


def test_unconditioned_collider_blocks():
    d = fixture("fig1b").diagram
    path = path_of(d, ["X", "A", "K", "B", "Lambda"])
    verdict = classify_path(d, path, set())
    assert verdict.status == BLOCKED
    assert verdict.reason == COLLIDER_UNCONDITIONED
    assert verdict.blocking_node == "K"


def test_descendant_of_collider_opens_path():
    # setting -> outcome <- latent with the selection downstream of the collider
    nodes = {
        "X": dg.setting(),
        "A_j": dg.outcome("alice"),
        "Lambda": dg.latent(),
        "K": dg.selection(),
    }
    d = dg.build_diagram(nodes, [("X", "A_j"), ("Lambda", "A_j"), ("A_j", "K")])
    path = path_of(d, ["X", "A_j", "Lambda"])
    verdict = classify_path(d, path, {"K"})
    assert verdict.status == OPEN
    assert verdict.opened_colliders == (("A_j", "K"),)


def test_conditioned_noncollider_blocks():
    d = fixture("fig2b").diagram
    path = path_of(d, ["A_1", "A_2", "Lambda"])
    verdict = classify_path(d, path, {"A_2"})
    assert verdict.status == BLOCKED
    assert verdict.reason == NONCOLLIDER_CONDITIONED
    assert verdict.blocking_node == "A_2"


def test_endpoint_conditioning_rejected():
    d = fixture("fig1b").diagram
    path = path_of(d, ["X", "A", "Lambda"])
    with pytest.raises(ValueError):
        classify_path(d, path, {"X"})


def test_nonlocal_steps_need_ns_rules():
    d = fixture("fig3").diagram
    path = next(p for p in enumerate_paths(d, "X", "K") if "~~" in p.marks)
    with pytest.raises(NonlocalPresent):
        classify_path(d, path, set())


@pytest.mark.parametrize("name", ["fig1b", "fig2b", "fig2c", "fig4"])
def test_classification_is_order_symmetric(name):
    d = fixture(name).diagram
    pairs = [("X", "Lambda"), ("X", "Y")]
    for u, v in pairs:
        for path in enumerate_paths(d, u, v):
            for z in (set(), {"K"} & set(d.names), {"Lambda"} - {u, v}):
                if z & {u, v}:
                    continue
                forward = classify_path(d, path, z)
                backward = classify_path(d, path.reversed(), z)
                assert forward.status == backward.status


def test_rule_iii_monotone_for_off_path_descendants():
    d = fixture("fig1b").diagram
    path = path_of(d, ["X", "A", "K", "B", "Lambda"])
    z = {"K"}
    verdict = classify_path(d, path, z)
    assert verdict.status == OPEN
    for collider, _ in verdict.opened_colliders:
        for extra in d.descendants(collider) - set(path.nodes):
            assert classify_path(d, path, z | {extra}).status == OPEN


def test_on_path_descendant_can_block():
    # Conditioning on the off-path descendant F opens the collider c, but
    # additionally conditioning on c's on-path descendant B blocks by rule (ii):
    # rule-(iii) monotonicity genuinely needs the added node off the path.
    nodes = {
        "X": dg.setting(),
        "c": dg.outcome("p"),
        "B": dg.outcome("p"),
        "E": dg.outcome("p"),
        "F": dg.outcome("p"),
        "Lambda": dg.latent(),
    }
    d = dg.build_diagram(
        nodes,
        [
            ("X", "c"),
            ("Lambda", "c"),
            ("Lambda", "B"),
            ("c", "B"),
            ("B", "E"),
            ("B", "F"),
        ],
    )
    path = path_of(d, ["X", "c", "Lambda", "B", "E"])
    assert classify_path(d, path, {"F"}).status == OPEN
    assert classify_path(d, path, {"F", "B"}).status == BLOCKED


# -- set separation -----------------------------------------------------------


def test_fig2c_hidden_variable_separated_from_settings():
    d = fixture("fig2c").diagram
    separated, witness = d_separated(d, {"Lambda"}, {"X", "Y"}, {"K"})
    assert separated and witness is None


def test_fig1b_dependence_with_witness():
    d = fixture("fig1b").diagram
    separated, witness = d_separated(d, {"Lambda"}, {"X"}, {"K"})
    assert not separated
    # deterministic engine contract: first open path in lexicographic order
    assert witness.path.render() == "Lambda -> A <- X"
    assert witness.opened_colliders == (("A", "K"),)


def test_separated_across_components():
    nodes = {"A": dg.outcome("p"), "B": dg.outcome("q"), "X": dg.setting()}
    d = dg.build_diagram(nodes, [("X", "A")])
    separated, witness = d_separated(d, {"A"}, {"B"}, set())
    assert separated and witness is None


def test_overlapping_sets_rejected():
    d = fixture("fig1b").diagram
    with pytest.raises(ValueError):
        d_separated(d, {"X"}, {"X"}, set())
    with pytest.raises(ValueError):
        d_separated(d, {"X"}, {"Y"}, {"X"})


def test_engine_matches_reachability_oracle_on_random_dags():
    rng = np.random.default_rng(20240817)
    for _ in range(60):
        n = int(rng.integers(3, 9))
        names, edges = random_dag(rng, n)
        kinds = {name: dg.outcome("p") for name in names}
        d = dg.build_diagram(kinds, sorted(edges))
        for u in names:
            for v in names:
                if u >= v:
                    continue
                for z in [set()] + [{w} for w in names if w not in (u, v)]:
                    got, _ = d_separated(d, {u}, {v}, z)
                    want = reachability_d_separated(names, edges, {u}, {v}, z)
                    assert got == want, (names, sorted(edges), u, v, z)


# -- the empirical probe ------------------------------------------------------


def test_probe_vanishes_when_separated():
    d = fixture("fig2c").diagram
    assert ci_probe(d, ["Lambda"], ["X"], ["K"], n_params=60, seed=5) <= 1e-10


def test_probe_detects_generic_dependence():
    d = fixture("fig1b").diagram
    assert ci_probe(d, ["Lambda"], ["X"], ["K"], n_params=60, seed=5) > 1e-3


def test_probe_settings_independent_unconditionally():
    d = fixture("fig1a").diagram
    assert ci_probe(d, ["X"], ["Y"], [], n_params=40, seed=5) <= 1e-10


def test_probe_cardinality_cap():
    names = {f"n{i}": dg.outcome("p") for i in range(26)}
    d = dg.build_diagram(names, [])
    with pytest.raises(CardinalityOverflow):
        ci_probe(d, ["n0"], ["n1"], [], n_params=1)


def test_probe_seed_partitioning_is_deterministic():
    d = fixture("fig1b").diagram
    a = ci_probe(d, ["Lambda"], ["X"], ["K"], n_params=10, seed=9)
    b = ci_probe(d, ["Lambda"], ["X"], ["K"], n_params=10, seed=9)
    assert a == b
