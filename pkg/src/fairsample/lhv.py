"""Finite local-hidden-variable models and Bell-scenario numerics.

A model is a distribution over a finite hidden variable together with
per-party response tables p(outcome | setting, hidden value).  Behaviors are
conditional tensors p(outcomes | settings) with the setting axes first.
Local-polytope membership is decided by linear programming over the
enumerated deterministic vertices; functional bounds are always recomputed
from the vertices, never trusted.
"""

from __future__ import annotations

import string
from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import linprog

from .errors import (
    DimensionMismatch,
    EmptyPostselection,
    FairSampleError,
    StrategyBlowup,
)

PROB_ATOL = 1e-12
LP_TOL = 1e-9
ACCEPTANCE_FLOOR = 1e-9
MAX_VERTICES = 10 ** 6

# k_rule signature: (lambda index, outcome tuple, setting tuple) -> P(K=1)
KRule = Callable[[int, tuple[int, ...], tuple[int, ...]], float]


@dataclass(frozen=True)
class LhvModel:
    """Hidden-variable weights plus per-party response tables (L, S_p, O_p)."""

    weights: np.ndarray
    responses: tuple[np.ndarray, ...]

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "weights", w)
        object.__setattr__(
            self, "responses", tuple(np.asarray(r, dtype=float) for r in self.responses)
        )
        if w.ndim != 1 or w.size == 0:
            raise DimensionMismatch("weights must be a nonempty vector")
        if np.any(w < -PROB_ATOL) or abs(w.sum() - 1.0) > PROB_ATOL:
            raise FairSampleError("hidden-variable weights must form a distribution")
        for r in self.responses:
            if r.ndim != 3 or r.shape[0] != w.size:
                raise DimensionMismatch(
                    "response tables must have shape (n_lambda, n_settings, n_outcomes)"
                )
            if np.any(r < -PROB_ATOL) or np.any(r > 1 + PROB_ATOL):
                raise FairSampleError("response probabilities must lie in [0, 1]")
            if np.max(np.abs(r.sum(axis=2) - 1.0)) > 1e-9:
                raise FairSampleError("each response slice must sum to 1")

    @property
    def n_parties(self) -> int:
        return len(self.responses)

    @property
    def n_lambda(self) -> int:
        return self.weights.size

    @property
    def setting_cards(self) -> tuple[int, ...]:
        return tuple(r.shape[1] for r in self.responses)

    @property
    def outcome_cards(self) -> tuple[int, ...]:
        return tuple(r.shape[2] for r in self.responses)


@dataclass(frozen=True)
class BehaviorTable:
    """p(outcomes | settings) with axes (settings..., outcomes...)."""

    tensor: np.ndarray
    n_parties: int

    def __post_init__(self):
        t = np.asarray(self.tensor, dtype=float)
        object.__setattr__(self, "tensor", t)
        if t.ndim != 2 * self.n_parties:
            raise DimensionMismatch("tensor rank must be twice the party count")

    @property
    def setting_cards(self) -> tuple[int, ...]:
        return self.tensor.shape[: self.n_parties]

    @property
    def outcome_cards(self) -> tuple[int, ...]:
        return self.tensor.shape[self.n_parties:]

    @property
    def dims(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        return self.setting_cards, self.outcome_cards

    def normalization_defect(self) -> float:
        sums = self.tensor.reshape(self.setting_cards + (-1,)).sum(axis=-1)
        return float(np.max(np.abs(sums - 1.0)))

    def no_signalling_defect(self) -> float:
        """Max deviation of any subset marginal from setting-independence."""
        n = self.n_parties
        worst = 0.0
        for keep_mask in range(1, 2 ** n - 1):
            keep = [p for p in range(n) if keep_mask >> p & 1]
            drop_axes = tuple(n + p for p in range(n) if p not in keep)
            marginal = self.tensor.sum(axis=drop_axes)
            # marginal axes: all settings, then kept outcomes
            for p in range(n):
                if p in keep:
                    continue
                ref = np.take(marginal, 0, axis=p)
                for s in range(1, self.setting_cards[p]):
                    worst = max(
                        worst, float(np.max(np.abs(np.take(marginal, s, axis=p) - ref)))
                    )
        return worst

    def marginal_settings(self, assignment: Sequence[int]) -> np.ndarray:
        return self.tensor[tuple(assignment)]

    def coarse_grain_outcomes(self, maps: Sequence[Sequence[int]]) -> "BehaviorTable":
        """Merge outcome values per party via index maps old -> new."""
        if len(maps) != self.n_parties:
            raise DimensionMismatch("need one outcome map per party")
        t = self.tensor
        for p, mapping in enumerate(maps):
            if len(mapping) != self.outcome_cards[p]:
                raise DimensionMismatch(f"outcome map for party {p} has wrong length")
            new = max(mapping) + 1
            indicator = np.zeros((len(mapping), new))
            for i, j in enumerate(mapping):
                indicator[i, j] = 1.0
            t = np.tensordot(t, indicator, axes=([self.n_parties + p], [0]))
            t = np.moveaxis(t, -1, self.n_parties + p)
        return BehaviorTable(t, self.n_parties)


def _einsum_letters(n: int) -> tuple[list[str], list[str]]:
    letters = list(string.ascii_lowercase)
    settings = letters[:n]
    outcomes = letters[n: 2 * n]
    return settings, outcomes


def behavior_from_lhv(model: LhvModel) -> BehaviorTable:
    """Contract weights and response tables into p(outcomes | settings)."""
    n = model.n_parties
    if n > 12:
        raise DimensionMismatch("too many parties for dense contraction")
    s, o = _einsum_letters(n)
    terms = ",".join(f"z{s[p]}{o[p]}" for p in range(n))
    spec = f"z,{terms}->{''.join(s)}{''.join(o)}"
    tensor = np.einsum(spec, model.weights, *model.responses)
    return BehaviorTable(tensor, n)


# -- postselection ----------------------------------------------------------


@dataclass(frozen=True)
class JointModel:
    """An LHV model together with a binary postselection rule."""

    model: LhvModel
    k_rule: KRule

    def k_tensor(self) -> np.ndarray:
        """P(K=1 | lambda, settings, outcomes) tabulated; axes (L, S..., O...)."""
        m = self.model
        shape = (m.n_lambda,) + m.setting_cards + m.outcome_cards
        table = np.empty(shape)
        for lam in range(m.n_lambda):
            for ss in product(*map(range, m.setting_cards)):
                for oo in product(*map(range, m.outcome_cards)):
                    value = float(self.k_rule(lam, oo, ss))
                    if value < -PROB_ATOL or value > 1 + PROB_ATOL:
                        raise FairSampleError("k_rule must return probabilities")
                    table[(lam,) + ss + oo] = value
        return table

    def acceptance_probabilities(self) -> np.ndarray:
        """P(K=1 | settings) for every setting vector."""
        joint = _joint_with_k(self)
        return joint.reshape(self.model.setting_cards + (-1,)).sum(axis=-1)


def _joint_with_k(joint: JointModel) -> np.ndarray:
    """p(outcomes, K=1 | settings); axes (settings..., outcomes...)."""
    m = joint.model
    n = m.n_parties
    s, o = _einsum_letters(n)
    terms = ",".join(f"z{s[p]}{o[p]}" for p in range(n))
    axes = "".join(s) + "".join(o)
    spec = f"z,{terms},z{axes}->{axes}"
    return np.einsum(spec, m.weights, *m.responses, joint.k_tensor())


def attach_selection(model: LhvModel, k_rule: KRule) -> JointModel:
    return JointModel(model, k_rule)


def postselect(joint: JointModel) -> BehaviorTable:
    """Bayes-condition the behavior on K=1.

    Raises :class:`EmptyPostselection` when some setting vector accepts with
    probability at most 1e-9, where the conditional is undefined.
    """
    numerator = _joint_with_k(joint)
    n = joint.model.n_parties
    acceptance = numerator.reshape(joint.model.setting_cards + (-1,)).sum(axis=-1)
    if np.min(acceptance) <= ACCEPTANCE_FLOOR:
        worst = np.unravel_index(np.argmin(acceptance), acceptance.shape)
        raise EmptyPostselection(worst, float(np.min(acceptance)))
    expand = acceptance.reshape(joint.model.setting_cards + (1,) * n)
    return BehaviorTable(numerator / expand, n)


def outcome_rule(fn: Callable[[tuple[int, ...]], float]) -> KRule:
    return lambda lam, outcomes, settings: fn(outcomes)


def setting_rule(fn: Callable[[tuple[int, ...]], float]) -> KRule:
    return lambda lam, outcomes, settings: fn(settings)


# -- local polytope ----------------------------------------------------------


def _strategies(n_settings: int, n_outcomes: int) -> list[tuple[int, ...]]:
    return list(product(range(n_outcomes), repeat=n_settings))


@lru_cache(maxsize=32)
def _vertex_bundle(
    setting_cards: tuple[int, ...], outcome_cards: tuple[int, ...]
) -> tuple[np.ndarray, tuple[tuple[tuple[int, ...], ...], ...]]:
    per_party = [_strategies(s, o) for s, o in zip(setting_cards, outcome_cards)]
    count = 1
    for st in per_party:
        count *= len(st)
        if count > MAX_VERTICES:
            raise StrategyBlowup(f"{count}+ deterministic strategies")
    n = len(setting_cards)
    shape = tuple(setting_cards) + tuple(outcome_cards)
    vertices = np.zeros((count,) + shape)
    combos = list(product(*per_party))
    for i, combo in enumerate(combos):
        for ss in product(*map(range, setting_cards)):
            oo = tuple(combo[p][ss[p]] for p in range(n))
            vertices[(i,) + ss + oo] = 1.0
    return vertices, tuple(combos)


def enumerate_local_vertices(
    setting_cards: Sequence[int], outcome_cards: Sequence[int]
) -> list[BehaviorTable]:
    """One deterministic behavior per tuple of per-party strategies."""
    vertices, _ = _vertex_bundle(tuple(setting_cards), tuple(outcome_cards))
    n = len(setting_cards)
    return [BehaviorTable(v, n) for v in vertices]


@dataclass(frozen=True)
class BellFunctional:
    """Linear functional on behaviors, with a recomputed local bound."""

    coefficients: np.ndarray
    local_bound: float
    label: str
    n_parties: int

    def __post_init__(self):
        object.__setattr__(
            self, "coefficients", np.asarray(self.coefficients, dtype=float)
        )


def evaluate_functional(behavior: BehaviorTable, functional: BellFunctional) -> float:
    if behavior.tensor.shape != functional.coefficients.shape:
        raise DimensionMismatch(
            f"behavior shape {behavior.tensor.shape} vs functional "
            f"{functional.coefficients.shape}"
        )
    return float(np.sum(behavior.tensor * functional.coefficients))


def _max_over_vertices(
    coefficients: np.ndarray, setting_cards: Sequence[int], outcome_cards: Sequence[int]
) -> float:
    vertices, _ = _vertex_bundle(tuple(setting_cards), tuple(outcome_cards))
    values = np.tensordot(vertices, coefficients, axes=coefficients.ndim)
    return float(values.max())


def recompute_local_bound(functional: BellFunctional) -> float:
    """Max of the functional over the deterministic vertices of its scenario."""
    n = functional.n_parties
    shape = functional.coefficients.shape
    return _max_over_vertices(functional.coefficients, shape[:n], shape[n:])


def correlator_functional(
    signs: np.ndarray, label: str, n_parties: int
) -> BellFunctional:
    """Functional sum_s signs[s] * E(s) on binary-outcome behaviors."""
    signs = np.asarray(signs, dtype=float)
    n = n_parties
    parity = np.ones((2,) * n)
    for oo in product(range(2), repeat=n):
        parity[oo] = (-1.0) ** sum(oo)
    coeffs = signs.reshape(signs.shape + (1,) * n) * parity.reshape((1,) * n + parity.shape)
    bound = _max_over_vertices(coeffs, signs.shape, (2,) * n)
    return BellFunctional(coeffs, bound, label, n)


def chsh() -> BellFunctional:
    """The four-correlator functional with recomputed local bound 2."""
    signs = np.array([[1.0, 1.0], [1.0, -1.0]])
    return correlator_functional(signs, "chsh", 2)


def pr_box() -> BehaviorTable:
    """Extremal no-signalling behavior: outcomes uniform, a xor b = x and y."""
    t = np.zeros((2, 2, 2, 2))
    for x, y, a, b in product(range(2), repeat=4):
        if (a ^ b) == (x & y):
            t[x, y, a, b] = 0.5
    return BehaviorTable(t, 2)


@dataclass(frozen=True)
class LocalityResult:
    local: bool
    residual: float
    weights: np.ndarray | None
    certificate: BellFunctional | None
    certificate_value: float | None


def is_local(behavior: BehaviorTable, tol: float = LP_TOL) -> LocalityResult:
    """LP membership test against the enumerated deterministic vertices.

    Feasibility is solved as an L1-projection (min sum of slacks); inside the
    polytope the optimal weights certify membership, otherwise a second LP
    over box-bounded functionals returns a separating hyperplane together
    with its (re-maximized) local bound.
    """
    vertices, _ = _vertex_bundle(behavior.setting_cards, behavior.outcome_cards)
    n_vertices = vertices.shape[0]
    v_flat = vertices.reshape(n_vertices, -1)
    b_flat = behavior.tensor.reshape(-1)
    m = b_flat.size

    cost = np.concatenate([np.zeros(n_vertices), np.ones(2 * m)])
    a_eq = np.zeros((m + 1, n_vertices + 2 * m))
    a_eq[:m, :n_vertices] = v_flat.T
    a_eq[:m, n_vertices: n_vertices + m] = np.eye(m)
    a_eq[:m, n_vertices + m:] = -np.eye(m)
    a_eq[m, :n_vertices] = 1.0
    b_eq = np.concatenate([b_flat, [1.0]])
    res = linprog(cost, A_eq=a_eq, b_eq=b_eq, bounds=(0, None), method="highs")
    if not res.success:
        raise FairSampleError(f"feasibility LP failed: {res.message}")
    residual = float(res.fun)
    if residual <= tol:
        return LocalityResult(True, residual, res.x[:n_vertices].copy(), None, None)

    # Separating functional: maximize c.b - m subject to c.V_i <= m, |c| <= 1.
    cost = np.concatenate([-b_flat, [1.0]])
    a_ub = np.hstack([v_flat, -np.ones((n_vertices, 1))])
    b_ub = np.zeros(n_vertices)
    bounds = [(-1, 1)] * m + [(None, None)]
    dual = linprog(cost, A_ub=a_ub, b_ub=b_ub, bounds=bounds, method="highs")
    if not dual.success:
        raise FairSampleError(f"separation LP failed: {dual.message}")
    coeffs = dual.x[:m].reshape(behavior.tensor.shape)
    bound = float(np.max(v_flat @ dual.x[:m]))
    functional = BellFunctional(coeffs, bound, "separating", behavior.n_parties)
    value = float(b_flat @ dual.x[:m])
    return LocalityResult(False, residual, None, functional, value)
