import numpy as np
import pytest

from fairsample.dsep import (
    BLOCKED,
    COLLIDER_UNCONDITIONED,
    NO_SIGNALLING_BLOCKED,
    classify_path,
    d_separated,
    enumerate_paths,
)
from fairsample.errors import DimensionMismatch, FairSampleError
from fairsample.fixtures import fixture
from fairsample.lhv import (
    BehaviorTable,
    behavior_from_lhv,
    chsh,
    evaluate_functional,
    pr_box,
    recompute_local_bound,
)
from fairsample.multiparty import (
    BIPARTITIONS,
    HybridModel,
    behavior_from_hybrid,
    hybrid_bound,
    hybrid_vertices,
    mermin3,
    ns_classify,
    ns_vertices_2222,
    random_hybrid_model,
    sample_safe_hybrid_postselected,
    svetlichny3,
)
from fairsample.sampling import child_rng, random_lhv_model
from fairsample.verifier import make_scenario, verify_fsa_hybrid


def find_path(d, names):
    for p in enumerate_paths(d, names[0], names[-1]):
        if p.nodes == tuple(names):
            return p
    raise AssertionError(f"no path {names}")


# -- no-signalling vertices ------------------------------------------------------


def test_vertex_census():
    vertices = ns_vertices_2222()
    assert len(vertices) == 24
    deterministic = [v for v in vertices if set(np.unique(v)) <= {0.0, 1.0}]
    boxes = [v for v in vertices if set(np.unique(v)) == {0.0, 0.5}]
    assert len(deterministic) == 16
    assert len(boxes) == 8


def test_vertices_satisfy_constraints_exactly():
    for v in ns_vertices_2222():
        behavior = BehaviorTable(v, 2)
        assert behavior.normalization_defect() <= 1e-12
        assert behavior.no_signalling_defect() <= 1e-12


def test_pr_box_is_a_vertex():
    assert any(np.array_equal(v, pr_box().tensor) for v in ns_vertices_2222())


# -- hybrid models ----------------------------------------------------------------


def single_hybrid(pair, box, single):
    return HybridModel(np.array([1.0]), (pair,), (BehaviorTable(box, 2),), (single,))


def test_local_pair_degenerates_to_lhv():
    rng = child_rng(41, 0)
    model3 = random_lhv_model(rng, (2, 2, 2), (2, 2, 2), 1)
    pair_tensor = np.einsum(
        "xa,yb->xyab", model3.responses[0][0], model3.responses[1][0]
    )
    hybrid = single_hybrid((0, 1), pair_tensor, model3.responses[2][0])
    assert np.allclose(
        behavior_from_hybrid(hybrid).tensor, behavior_from_lhv(model3).tensor, atol=1e-14
    )


def test_pr_pair_marginal_reaches_chsh_four():
    single = np.array([[1.0, 0.0], [1.0, 0.0]])
    hybrid = single_hybrid((0, 1), pr_box().tensor, single)
    behavior = behavior_from_hybrid(hybrid)
    marginal = behavior.tensor[:, :, 0].sum(axis=-1)  # z=0, sum over c
    assert evaluate_functional(BehaviorTable(marginal, 2), chsh()) == 4.0


def test_bipartition_mixture_is_no_signalling():
    singles = np.full((2, 2), 0.5)
    parts = []
    for pair in BIPARTITIONS:
        parts.append(behavior_from_hybrid(single_hybrid(pair, pr_box().tensor, singles)).tensor)
    mixture = BehaviorTable(np.mean(parts, axis=0), 3)
    assert mixture.no_signalling_defect() <= 1e-12


def test_ns_violating_pair_rejected():
    signalling = np.zeros((2, 2, 2, 2))
    signalling[:, :, 0, 0] = 1.0
    signalling[1, 0] = 0.0
    signalling[1, 0, 1, 1] = 1.0
    with pytest.raises(FairSampleError):
        single_hybrid((0, 1), signalling, np.full((2, 2), 0.5))


def test_random_hybrid_models_respect_svetlichny():
    svet = svetlichny3()
    for index in range(500):
        rng = child_rng(42, index)
        behavior = behavior_from_hybrid(random_hybrid_model(rng, int(rng.integers(2, 5))))
        assert behavior.no_signalling_defect() <= 1e-12
        assert evaluate_functional(behavior, svet) <= 4.0 + 1e-9


# -- functionals -------------------------------------------------------------------


def test_mermin_bounds():
    functional = mermin3()
    assert functional.local_bound == 2.0
    assert recompute_local_bound(functional) == 2.0
    assert float(np.sum(np.abs(functional.coefficients))) == pytest.approx(32.0)
    assert hybrid_bound(functional) == 4.0


def test_svetlichny_bounds():
    functional = svetlichny3()
    assert recompute_local_bound(functional) == 4.0
    assert hybrid_bound(functional) == 4.0


def test_hybrid_vertex_count_and_dominance():
    assert len(hybrid_vertices()) == 3 * 24 * 4
    rng = child_rng(43, 0)
    for _ in range(5):
        signs = rng.integers(-1, 2, size=(2, 2, 2)).astype(float)
        from fairsample.lhv import correlator_functional

        f = correlator_functional(signs, "random", 3)
        assert hybrid_bound(f) >= f.local_bound - 1e-12


def test_hybrid_bound_dimension_guard():
    with pytest.raises(DimensionMismatch):
        hybrid_bound(chsh())


# -- no-signalling path semantics ---------------------------------------------------


def test_setting_chain_across_nonlocal_edge_blocks():
    d = fixture("fig3").diagram
    path = find_path(d, ["X", "A_1", "B_2", "K", "C_2", "Lambda"])
    assert path.marks[1] == "~~"
    verdict = ns_classify(d, path, {"K"})
    assert verdict.status == BLOCKED
    assert verdict.reason == NO_SIGNALLING_BLOCKED
    assert verdict.blocking_node == "B_2"


def test_latent_origin_uses_ordinary_rules():
    d = fixture("fig3").diagram
    path = find_path(d, ["Lambda", "A_1", "B_2"])
    verdict = ns_classify(d, path, set())
    assert verdict.status == BLOCKED
    assert verdict.reason == COLLIDER_UNCONDITIONED
    assert verdict.blocking_node == "A_1"


def test_third_party_separated_given_latent_and_selection():
    d = fixture("fig3").diagram.restrict_nonlocal(("alice", "bob"))
    separated, witness = d_separated(
        d,
        ["A_1", "B_1", "X", "Y"],
        ["C_1", "Z"],
        ["K", "Lambda"],
        ns_rules=True,
    )
    assert separated, witness


def test_ns_classify_reduces_to_plain_rules_without_nonlocal_edges():
    d = fixture("fig2b").diagram
    for u, v in [("X", "Lambda"), ("A_1", "B_1")]:
        for path in enumerate_paths(d, u, v):
            for z in (set(), {"K"}):
                assert ns_classify(d, path, z) == classify_path(d, path, z)


# -- hybrid verdicts -----------------------------------------------------------------


def test_hybrid_fixture_is_safe():
    verdict = verify_fsa_hybrid(fixture("fig3"))
    assert verdict.safe


def test_setting_influence_on_selection_side_breaks_hybrid_safety():
    spec = fixture("fig3")
    d = spec.diagram.with_directed([("Z", "C_2")])
    broken = make_scenario(d, spec.selection, dict(spec.bell_outcomes))
    verdict = verify_fsa_hybrid(broken)
    assert not verdict.safe
    assert verdict.ci_witness is not None
    assert "C_2" in verdict.ci_witness.path.nodes


def test_direct_conditioning_hybrid_variant_safe():
    verdict = verify_fsa_hybrid(fixture("fig3-direct"))
    assert verdict.safe
    assert verdict.classification == "Fig4"


def test_hybrid_verdict_needs_three_parties():
    with pytest.raises(Exception):
        verify_fsa_hybrid(fixture("fig2c"))


# -- safe postselection sampling -------------------------------------------------------


@pytest.mark.parametrize("fixed", [False, True])
def test_safe_hybrid_postselection_respects_svetlichny(fixed):
    svet = svetlichny3()
    for index in range(30):
        behavior, acceptance = sample_safe_hybrid_postselected(
            (51 if fixed else 52, index), fixed_values=fixed
        )
        assert acceptance > 1e-9
        assert behavior.normalization_defect() <= 1e-9
        assert evaluate_functional(behavior, svet) <= 4.0 + 1e-9
