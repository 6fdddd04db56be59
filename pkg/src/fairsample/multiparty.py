"""Three-party extensions: hybrid models, Mermin/Svetlichny, no-signalling paths.

A hybrid model lets one pair of parties share an arbitrary no-signalling
bipartite behavior per hidden value while the remaining party responds
locally.  Hybrid functional bounds are maximized over composed vertices:
bipartition choice x no-signalling-polytope vertex x deterministic singleton
strategy.  The no-signalling vertices of the 2-setting/2-outcome scenario
are recomputed here by basic-feasible-solution enumeration rather than
hard-coded.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, product
from typing import Iterable

import numpy as np

from .dsep import PathVerdict, Path, classify_path_ns
from .diagrams import CausalDiagram
from .errors import DimensionMismatch, FairSampleError
from .lhv import (
    BehaviorTable,
    BellFunctional,
    correlator_functional,
)
from .sampling import child_rng

NS_ATOL = 1e-12

BIPARTITIONS = ((0, 1), (0, 2), (1, 2))  # pair indices; singleton is the rest


def _ns_equalities() -> tuple[np.ndarray, np.ndarray]:
    """Equality system (normalization + no-signalling) on p(a,b|x,y) in R^16."""
    def idx(x, y, a, b):
        return ((x * 2 + y) * 2 + a) * 2 + b

    rows = []
    rhs = []
    for x, y in product(range(2), repeat=2):
        row = np.zeros(16)
        for a, b in product(range(2), repeat=2):
            row[idx(x, y, a, b)] = 1.0
        rows.append(row)
        rhs.append(1.0)
    for x, a in product(range(2), repeat=2):     # Alice marginal free of y
        row = np.zeros(16)
        for b in range(2):
            row[idx(x, 0, a, b)] += 1.0
            row[idx(x, 1, a, b)] -= 1.0
        rows.append(row)
        rhs.append(0.0)
    for y, b in product(range(2), repeat=2):     # Bob marginal free of x
        row = np.zeros(16)
        for a in range(2):
            row[idx(0, y, a, b)] += 1.0
            row[idx(1, y, a, b)] -= 1.0
        rows.append(row)
        rhs.append(0.0)
    return np.array(rows), np.array(rhs)


@lru_cache(maxsize=1)
def ns_vertices_2222() -> tuple[np.ndarray, ...]:
    """Vertices of the bipartite no-signalling polytope (2 settings, 2 outcomes).

    Enumerates basic feasible solutions: every choice of 8 coordinates pinned
    to zero whose active set has full rank yields at most one candidate;
    feasible, deduplicated candidates are the vertices (16 deterministic plus
    8 extremal nonlocal boxes).
    """
    a_eq, b_eq = _ns_equalities()
    seen = {}
    for zeros in combinations(range(16), 8):
        active = np.vstack([a_eq] + [np.eye(16)[list(zeros)]])
        rhs = np.concatenate([b_eq, np.zeros(8)])
        if np.linalg.matrix_rank(active, tol=1e-9) < 16:
            continue
        candidate, *_ = np.linalg.lstsq(active, rhs, rcond=None)
        if np.max(np.abs(active @ candidate - rhs)) > 1e-9:
            continue
        if np.min(candidate) < -1e-9:
            continue
        snapped = np.round(candidate, 10)
        if np.max(np.abs(a_eq @ snapped - b_eq)) > NS_ATOL:
            continue
        seen[tuple(snapped)] = snapped.reshape(2, 2, 2, 2)
    return tuple(seen[key] for key in sorted(seen))


# -- hybrid models -------------------------------------------------------------


@dataclass(frozen=True)
class HybridModel:
    """Per hidden value: a bipartition, a no-signalling pair behavior, and a
    local response table (n_settings, n_outcomes) for the remaining party."""

    weights: np.ndarray
    bipartitions: tuple[tuple[int, int], ...]
    pair_behaviors: tuple[BehaviorTable, ...]
    single_responses: tuple[np.ndarray, ...]

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "weights", w)
        object.__setattr__(
            self,
            "single_responses",
            tuple(np.asarray(t, dtype=float) for t in self.single_responses),
        )
        n = w.size
        if not (
            len(self.bipartitions) == len(self.pair_behaviors) == len(self.single_responses) == n
        ):
            raise DimensionMismatch("hybrid components must align with the weights")
        if abs(w.sum() - 1.0) > 1e-12 or np.any(w < -1e-12):
            raise FairSampleError("hybrid weights must form a distribution")
        for pair, behavior in zip(self.bipartitions, self.pair_behaviors):
            if tuple(sorted(pair)) not in BIPARTITIONS:
                raise FairSampleError(f"bad bipartition {pair}")
            if behavior.no_signalling_defect() > NS_ATOL:
                raise FairSampleError("pair behavior violates no-signalling")

    @property
    def n_lambda(self) -> int:
        return self.weights.size


def compose_three_party(
    pair: tuple[int, int], pair_tensor: np.ndarray, single_table: np.ndarray
) -> np.ndarray:
    """Place a bipartite behavior and a single-party response into party slots."""
    i, j = sorted(pair)
    if (i, j) == (0, 1):
        return np.einsum("xyab,zc->xyzabc", pair_tensor, single_table)
    if (i, j) == (0, 2):
        return np.einsum("xzac,yb->xyzabc", pair_tensor, single_table)
    return np.einsum("yzbc,xa->xyzabc", pair_tensor, single_table)


def behavior_from_hybrid(model: HybridModel) -> BehaviorTable:
    total = np.zeros((2, 2, 2, 2, 2, 2))
    for w, pair, behavior, single in zip(
        model.weights, model.bipartitions, model.pair_behaviors, model.single_responses
    ):
        total += w * compose_three_party(tuple(sorted(pair)), behavior.tensor, single)
    return BehaviorTable(total, 3)


# -- functionals ---------------------------------------------------------------


def mermin3() -> BellFunctional:
    signs = np.zeros((2, 2, 2))
    signs[0, 0, 1] = signs[0, 1, 0] = signs[1, 0, 0] = 1.0
    signs[1, 1, 1] = -1.0
    return correlator_functional(signs, "mermin3", 3)


def svetlichny3() -> BellFunctional:
    signs = np.empty((2, 2, 2))
    for x, y, z in product(range(2), repeat=3):
        signs[x, y, z] = (-1.0) ** (x * y + y * z + z * x)
    return correlator_functional(signs, "svetlichny3", 3)


@lru_cache(maxsize=1)
def _hybrid_vertex_tensors() -> tuple[np.ndarray, ...]:
    singles = []
    for c0, c1 in product(range(2), repeat=2):
        table = np.zeros((2, 2))
        table[0, c0] = 1.0
        table[1, c1] = 1.0
        singles.append(table)
    tensors = []
    for pair in BIPARTITIONS:
        for box in ns_vertices_2222():
            for single in singles:
                tensors.append(compose_three_party(pair, box, single))
    return tuple(tensors)


def hybrid_vertices() -> list[BehaviorTable]:
    return [BehaviorTable(t, 3) for t in _hybrid_vertex_tensors()]


def hybrid_bound(functional: BellFunctional) -> float:
    """Max of a 3-party functional over the hybrid local-nonlocal set."""
    if functional.coefficients.shape != (2, 2, 2, 2, 2, 2):
        raise DimensionMismatch("hybrid bounds cover the 3-party binary scenario")
    best = -np.inf
    for tensor in _hybrid_vertex_tensors():
        best = max(best, float(np.sum(tensor * functional.coefficients)))
    return best


def ns_classify(
    diagram: CausalDiagram, path: Path, conditioned: Iterable[str]
) -> PathVerdict:
    """Path classification honoring no-signalling blocking on nonlocal edges."""
    return classify_path_ns(diagram, path, conditioned)


# -- samplers ------------------------------------------------------------------


def random_ns_box(rng: np.random.Generator) -> BehaviorTable:
    vertices = ns_vertices_2222()
    mix = rng.dirichlet(np.ones(len(vertices)))
    tensor = np.tensordot(mix, np.stack(vertices), axes=1)
    return BehaviorTable(tensor, 2)


def random_hybrid_model(rng: np.random.Generator, n_lambda: int = 3) -> HybridModel:
    weights = rng.dirichlet(np.ones(n_lambda))
    pairs = []
    boxes = []
    singles = []
    for _ in range(n_lambda):
        pairs.append(BIPARTITIONS[rng.integers(0, 3)])
        boxes.append(random_ns_box(rng))
        singles.append(rng.dirichlet(np.ones(2), size=2))
    return HybridModel(weights, tuple(pairs), tuple(boxes), tuple(singles))


def sample_safe_hybrid_postselected(
    seed_index: tuple[int, int],
    n_lambda: int = 2,
    fixed_values: bool = False,
) -> tuple[BehaviorTable, float]:
    """Postselected Bell behavior of a random hybrid model consistent with the
    safe three-party structure.

    Per hidden value, the selection-feeding variables of the nonlocal pair
    get a joint distribution independent of every setting, the pair's Bell
    variables follow a no-signalling box indexed by those values, and the
    third party responds locally.  ``fixed_values`` conditions on all
    selection variables equal to 1 instead of a stochastic joint rule.
    Returns the postselected behavior and the minimal acceptance probability.
    """
    rng = child_rng(seed_index[0], seed_index[1])
    weights = rng.dirichlet(np.ones(n_lambda))
    if fixed_values:
        k_table = np.zeros((2, 2, 2))
        k_table[1, 1, 1] = 1.0
    else:
        k_table = rng.uniform(0.05, 1.0, size=(2, 2, 2))

    numerator = np.zeros((2, 2, 2, 2, 2, 2))
    acceptance = np.zeros((2, 2, 2))
    for lam in range(n_lambda):
        pair = BIPARTITIONS[rng.integers(0, 3)]
        single = tuple(set(range(3)) - set(pair))[0]
        sel_pair = np.clip(rng.dirichlet(np.ones(4)), 0.05, None)
        sel_pair = (sel_pair / sel_pair.sum()).reshape(2, 2)
        sel_single = np.clip(rng.dirichlet(np.ones(2)), 0.05, None)
        sel_single = sel_single / sel_single.sum()
        boxes = {
            (u, v): random_ns_box(rng).tensor for u, v in product(range(2), repeat=2)
        }
        single_table = rng.dirichlet(np.ones(2), size=2)
        for u, v, s in product(range(2), repeat=3):
            sel = [0, 0, 0]
            sel[pair[0]], sel[pair[1]], sel[single] = u, v, s
            weight = (
                weights[lam] * sel_pair[u, v] * sel_single[s] * k_table[tuple(sel)]
            )
            if weight == 0.0:
                continue
            block = compose_three_party(pair, boxes[(u, v)], single_table)
            numerator += weight * block
            acceptance += weight * np.ones((2, 2, 2))
    tensor = numerator / acceptance.reshape(2, 2, 2, 1, 1, 1)
    return BehaviorTable(tensor, 3), float(acceptance.min())
