"""Detection-efficiency models, the fair-sampling variant ladder, and demos.

The ladder of restrictions on a detection table eta(setting, hidden value),
from strictest to loosest: constant, hidden-value-only, factorized
(eta_setting * eta_hidden), unrestricted.  The first three make collective
"all parties detected" postselection safe; unrestricted tables admit fake
Bell violations, two of which are constructed here.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from . import diagrams as dg
from .errors import DimensionMismatch, FairSampleError, SearchFailed
from .lhv import (
    BehaviorTable,
    JointModel,
    LhvModel,
    attach_selection,
    chsh,
    evaluate_functional,
    is_local,
    postselect,
)
from .sampling import child_rng, random_lhv_model
from .verifier import ScenarioSpec, SelectionNode, make_scenario

CONSTANT = "constant"
LAMBDA_ONLY = "lambda"
FACTORIZED = "factorized"
UNRESTRICTED = "unrestricted"

VARIANTS = (CONSTANT, LAMBDA_ONLY, FACTORIZED, UNRESTRICTED)

_RTOL = 1e-9


@dataclass(frozen=True)
class DetectionModel:
    """Per party, detection probabilities with shape (n_lambda, n_settings)."""

    efficiencies: tuple[np.ndarray, ...]

    def __post_init__(self):
        tables = tuple(np.asarray(t, dtype=float) for t in self.efficiencies)
        object.__setattr__(self, "efficiencies", tables)
        for t in tables:
            if t.ndim != 2:
                raise DimensionMismatch("efficiency tables need shape (n_lambda, n_settings)")
            if np.any(t < -1e-12) or np.any(t > 1 + 1e-12):
                raise FairSampleError("efficiencies must lie in [0, 1]")


def extend_with_detection(model: LhvModel, dm: DetectionModel) -> JointModel:
    """Augment each party with a binary detection flag.

    Composite outcomes are encoded as ``2 * outcome + detected``.  On
    non-detection the original outcome is replaced by a uniform coin flip,
    independent of everything else, so the discarded variable cannot carry
    information.  The postselection keeps events where every party detected.
    """
    if len(dm.efficiencies) != model.n_parties:
        raise DimensionMismatch("one efficiency table per party required")
    responses = []
    for r, eta in zip(model.responses, dm.efficiencies):
        if eta.shape != r.shape[:2]:
            raise DimensionMismatch(
                f"efficiency table {eta.shape} does not match responses {r.shape[:2]}"
            )
        n_out = r.shape[2]
        table = np.empty((r.shape[0], r.shape[1], 2 * n_out))
        for a in range(n_out):
            table[:, :, 2 * a + 1] = eta * r[:, :, a]
            table[:, :, 2 * a] = (1.0 - eta) / n_out
        responses.append(table)
    extended = LhvModel(model.weights, tuple(responses))

    def all_detected(lam: int, outcomes: tuple[int, ...], settings: tuple[int, ...]) -> float:
        return 1.0 if all(o % 2 == 1 for o in outcomes) else 0.0

    return attach_selection(extended, all_detected)


def detected_behavior(model: LhvModel, dm: DetectionModel) -> BehaviorTable:
    """Postselected behavior of the original outcomes given full detection."""
    joint = extend_with_detection(model, dm)
    post = postselect(joint)
    maps = [[o // 2 for o in range(2 * c)] for c in model.outcome_cards]
    return post.coarse_grain_outcomes(maps)


# -- variant classification --------------------------------------------------


def _is_constant(t: np.ndarray) -> bool:
    return bool(np.allclose(t, t.flat[0], rtol=_RTOL, atol=1e-15))


def _is_lambda_only(t: np.ndarray) -> bool:
    return bool(np.allclose(t, t[:, :1], rtol=_RTOL, atol=1e-15))


def _is_rank_one(t: np.ndarray) -> bool:
    zero = np.abs(t) <= 1e-15
    if zero.any():
        for i, j in zip(*np.nonzero(zero)):
            if not (zero[i, :].all() or zero[:, j].all()):
                return False
    rows, cols = t.shape
    for i, k in product(range(rows), repeat=2):
        if i >= k:
            continue
        for j, l in product(range(cols), repeat=2):
            if j >= l:
                continue
            lhs, rhs = t[i, j] * t[k, l], t[i, l] * t[k, j]
            if abs(lhs - rhs) > _RTOL * max(abs(lhs), abs(rhs), 1e-300):
                return False
    return True


def classify_detection(dm: DetectionModel) -> str:
    """Strictest variant that every party's table satisfies."""
    tables = dm.efficiencies
    if all(_is_constant(t) for t in tables):
        return CONSTANT
    if all(_is_lambda_only(t) for t in tables):
        return LAMBDA_ONLY
    if all(_is_rank_one(t) for t in tables):
        return FACTORIZED
    return UNRESTRICTED


# -- safety sweep -------------------------------------------------------------


@dataclass(frozen=True)
class SweepReport:
    variant: str
    n_models: int
    seed: int
    all_local: bool
    max_chsh: float
    max_residual: float
    min_acceptance: float
    failures: tuple[int, ...]


def _sample_detection(
    rng: np.random.Generator, variant: str, n_lambda: int
) -> DetectionModel:
    tables = []
    for _ in range(2):
        if variant == CONSTANT:
            tables.append(np.full((n_lambda, 2), rng.uniform(0.2, 1.0)))
        elif variant == LAMBDA_ONLY:
            tables.append(np.repeat(rng.uniform(0.15, 1.0, size=(n_lambda, 1)), 2, axis=1))
        elif variant == FACTORIZED:
            v_lambda = rng.uniform(0.3, 1.0, size=(n_lambda, 1))
            u_setting = rng.uniform(0.3, 1.0, size=(1, 2))
            tables.append(v_lambda * u_setting)
        else:
            raise FairSampleError(f"sweep does not support variant {variant!r}")
    return DetectionModel(tuple(tables))


def safety_sweep(variant: str, n_models: int = 500, seed: int = 0) -> SweepReport:
    """Sample models under a safe variant and LP-check every postselected behavior."""
    if variant not in (CONSTANT, LAMBDA_ONLY, FACTORIZED):
        raise FairSampleError(f"variant must be one of constant|lambda|factorized")
    functional = chsh()
    max_chsh = -np.inf
    max_residual = 0.0
    min_acceptance = np.inf
    failures = []
    for index in range(n_models):
        rng = child_rng(seed, index)
        n_lambda = int(rng.integers(2, 7))
        model = random_lhv_model(rng, (2, 2), (2, 2), n_lambda)
        dm = _sample_detection(rng, variant, n_lambda)
        joint = extend_with_detection(model, dm)
        min_acceptance = min(min_acceptance, float(joint.acceptance_probabilities().min()))
        behavior = detected_behavior(model, dm)
        value = evaluate_functional(behavior, functional)
        result = is_local(behavior)
        max_chsh = max(max_chsh, value)
        max_residual = max(max_residual, result.residual)
        if not result.local:
            failures.append(index)
    return SweepReport(
        variant=variant,
        n_models=n_models,
        seed=seed,
        all_local=not failures,
        max_chsh=float(max_chsh),
        max_residual=float(max_residual),
        min_acceptance=float(min_acceptance),
        failures=tuple(failures),
    )


# -- fake-violation demos ------------------------------------------------------

PR_FILTER = "PrFilter"
MARGINAL_FAIR = "MarginalFair"


@dataclass(frozen=True)
class FakeViolationDemo:
    kind: str
    joint: JointModel
    postselected: BehaviorTable
    chsh_value: float
    acceptance: np.ndarray
    detection_marginal_defect: float | None
    scenario: ScenarioSpec


def _all_strategies() -> list[tuple[int, int, int, int]]:
    return list(product(range(2), repeat=4))


def _strategy_chsh(s: tuple[int, int, int, int]) -> int:
    total = 0
    for x, y in product(range(2), repeat=2):
        total += (-1) ** (x * y) * (-1) ** (s[x] ^ s[2 + y])
    return total


def deterministic_strategy_model(strategies, weights=None) -> LhvModel:
    n = len(strategies)
    w = np.full(n, 1.0 / n) if weights is None else np.asarray(weights, dtype=float)
    resp_a = np.zeros((n, 2, 2))
    resp_b = np.zeros((n, 2, 2))
    for lam, s in enumerate(strategies):
        for x in range(2):
            resp_a[lam, x, s[x]] = 1.0
        for y in range(2):
            resp_b[lam, y, s[2 + y]] = 1.0
    return LhvModel(w, (resp_a, resp_b))


def pr_filter_rule(lam: int, outcomes: tuple[int, ...], settings: tuple[int, ...]) -> float:
    a, b = outcomes
    x, y = settings
    return 1.0 if (a ^ b) == (x & y) else 0.0


def _pearle_scenario() -> ScenarioSpec:
    diagram = dg.build_diagram(
        {
            "X": dg.setting(),
            "Y": dg.setting(),
            "A": dg.outcome("alice"),
            "B": dg.outcome("bob"),
            "Lambda": dg.latent(),
            "K": dg.selection(),
        },
        [("X", "A"), ("Y", "B"), ("Lambda", "A"), ("Lambda", "B"), ("A", "K"), ("B", "K")],
    )
    return make_scenario(
        diagram, SelectionNode("K"), bell_outcomes={"alice": ("A",), "bob": ("B",)}
    )


def _marginal_fair_scenario() -> ScenarioSpec:
    diagram = dg.build_diagram(
        {
            "X": dg.setting(),
            "Y": dg.setting(),
            "A": dg.outcome("alice"),
            "B": dg.outcome("bob"),
            "D_A": dg.outcome("alice"),
            "D_B": dg.outcome("bob"),
            "Lambda": dg.latent(),
            "K": dg.selection(),
        },
        [
            ("X", "A"), ("X", "D_A"), ("Y", "B"), ("Y", "D_B"),
            ("Lambda", "A"), ("Lambda", "B"), ("Lambda", "D_A"), ("Lambda", "D_B"),
            ("D_A", "K"), ("D_B", "K"),
        ],
    )
    return make_scenario(
        diagram, SelectionNode("K"), bell_outcomes={"alice": ("A",), "bob": ("B",)}
    )


def _pr_filter_demo() -> FakeViolationDemo:
    face = [s for s in _all_strategies() if _strategy_chsh(s) == 2]
    model = deterministic_strategy_model(face)
    joint = attach_selection(model, pr_filter_rule)
    post = postselect(joint)
    return FakeViolationDemo(
        kind=PR_FILTER,
        joint=joint,
        postselected=post,
        chsh_value=evaluate_functional(post, chsh()),
        acceptance=joint.acceptance_probabilities(),
        detection_marginal_defect=None,
        scenario=_pearle_scenario(),
    )


def _post_chsh(weights, strategies, eta_a, eta_b) -> tuple[float, bool]:
    """CHSH of the detection-postselected correlations; flags tiny acceptance."""
    signs_a = np.empty((2, len(strategies)))
    signs_b = np.empty((2, len(strategies)))
    for lam, s in enumerate(strategies):
        for x in range(2):
            signs_a[x, lam] = (-1.0) ** s[x]
        for y in range(2):
            signs_b[y, lam] = (-1.0) ** s[2 + y]
    value = 0.0
    for x, y in product(range(2), repeat=2):
        weight = weights * eta_a[x] * eta_b[y]
        accept = weight.sum()
        if accept < 1e-6:
            return 0.0, False
        corr = float((weight * signs_a[x] * signs_b[y]).sum() / accept)
        value += (-1.0) ** (x * y) * corr
    return value, True


def _project_rows(weights: np.ndarray, eta: np.ndarray) -> np.ndarray:
    """Rescale rows so the detection marginal is setting-independent."""
    marginals = eta @ weights
    target = marginals.min()
    if target <= 0:
        return eta
    out = eta * (target / marginals)[:, None]
    return np.clip(out, 0.0, 1.0)


def _marginal_fair_search(seed: int, n_restarts: int = 12, n_lambda: int = 8):
    best = None
    strategies_all = _all_strategies()
    weights = np.full(n_lambda, 1.0 / n_lambda)
    grid = np.linspace(0.0, 1.0, 21)
    for restart in range(n_restarts):
        rng = child_rng(seed, restart)
        strategies = [tuple(rng.integers(0, 2, size=4)) for _ in range(n_lambda)]
        if restart % 2 == 0:
            # setting-match start: each hidden value detects one setting pair
            eta_a = np.full((2, n_lambda), 0.05)
            eta_b = np.full((2, n_lambda), 0.05)
            for lam in range(n_lambda):
                eta_a[rng.integers(0, 2), lam] = 1.0
                eta_b[rng.integers(0, 2), lam] = 1.0
        else:
            eta_a = rng.uniform(0.05, 1.0, size=(2, n_lambda))
            eta_b = rng.uniform(0.05, 1.0, size=(2, n_lambda))
        eta_a, eta_b = _project_rows(weights, eta_a), _project_rows(weights, eta_b)
        current, ok = _post_chsh(weights, strategies, eta_a, eta_b)
        for _ in range(8):
            improved = False
            projected_a = _project_rows(weights, eta_a)
            projected_b = _project_rows(weights, eta_b)
            for lam in range(n_lambda):
                for cand in strategies_all:
                    if cand == strategies[lam]:
                        continue
                    trial = list(strategies)
                    trial[lam] = cand
                    value, ok = _post_chsh(weights, trial, projected_a, projected_b)
                    if ok and value > current + 1e-12:
                        strategies, current, improved = trial, value, True
            for table_idx, table in enumerate((eta_a, eta_b)):
                for x in range(2):
                    for lam in range(n_lambda):
                        kept = table[x, lam]
                        best_here = current
                        best_val = kept
                        for cand in grid:
                            table[x, lam] = cand
                            projected_a = _project_rows(weights, eta_a)
                            projected_b = _project_rows(weights, eta_b)
                            value, ok = _post_chsh(weights, strategies, projected_a, projected_b)
                            if ok and value > best_here + 1e-12:
                                best_here, best_val = value, cand
                        table[x, lam] = best_val
                        if best_here > current + 1e-12:
                            current, improved = best_here, True
            if not improved:
                break
        eta_a, eta_b = _project_rows(weights, eta_a), _project_rows(weights, eta_b)
        eta_a, eta_b = _project_rows(weights, eta_a), _project_rows(weights, eta_b)
        value, ok = _post_chsh(weights, strategies, eta_a, eta_b)
        if ok and (best is None or value > best[0]):
            best = (value, strategies, eta_a.copy(), eta_b.copy())
    return best


def _marginal_fair_demo(seed: int = 0) -> FakeViolationDemo:
    found = _marginal_fair_search(seed)
    if found is None or found[0] < 2.05:
        raise SearchFailed(
            "marginal-fair search did not exceed the local bound by 0.05; "
            "this indicates a bug, since such models are known to exist"
        )
    _, strategies, eta_a, eta_b = found
    model = deterministic_strategy_model(strategies)
    dm = DetectionModel((eta_a.T.copy(), eta_b.T.copy()))
    joint = extend_with_detection(model, dm)
    post = detected_behavior(model, dm)
    weights = model.weights
    defect = 0.0
    for eta in (eta_a, eta_b):
        marginals = eta @ weights
        defect = max(defect, float(np.max(np.abs(marginals - marginals.mean()))))
    return FakeViolationDemo(
        kind=MARGINAL_FAIR,
        joint=joint,
        postselected=post,
        chsh_value=evaluate_functional(post, chsh()),
        acceptance=joint.acceptance_probabilities(),
        detection_marginal_defect=defect,
        scenario=_marginal_fair_scenario(),
    )


def fake_violation_demo(kind: str, seed: int = 0) -> FakeViolationDemo:
    """Construct a model whose postselected statistics fake a Bell violation."""
    if kind == PR_FILTER:
        return _pr_filter_demo()
    if kind == MARGINAL_FAIR:
        return _marginal_fair_demo(seed)
    raise FairSampleError(f"unknown demo kind {kind!r}")
