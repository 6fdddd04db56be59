"""Seeded random generators for models used in sweeps and safety bridges.

Generators derive one child seed per sample index, so results are
reproducible and independent of evaluation order.
"""

from __future__ import annotations

from itertools import product

import numpy as np

from .lhv import JointModel, KRule, LhvModel, attach_selection

# Composite outcome encoding for two outcome variables per party:
# o = 2 * bell_value + selection_value.
BELL_OF = (0, 0, 1, 1)
SEL_OF = (0, 1, 0, 1)


def child_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def random_lhv_model(
    rng: np.random.Generator,
    setting_cards: tuple[int, ...] = (2, 2),
    outcome_cards: tuple[int, ...] = (2, 2),
    n_lambda: int = 4,
) -> LhvModel:
    weights = rng.dirichlet(np.ones(n_lambda))
    responses = []
    for s, o in zip(setting_cards, outcome_cards):
        responses.append(rng.dirichlet(np.ones(o), size=(n_lambda, s)))
    return LhvModel(weights, tuple(responses))


def _clamped_dist(rng: np.random.Generator, size, floor: float = 0.05) -> np.ndarray:
    raw = rng.dirichlet(np.ones(size if isinstance(size, int) else size[-1]),
                        size=None if isinstance(size, int) else size[:-1])
    raw = np.clip(raw, floor, None)
    return raw / raw.sum(axis=-1, keepdims=True)


def split_outcome_model(
    rng: np.random.Generator,
    n_lambda: int = 4,
    selection_feeds_bell: bool = False,
) -> LhvModel:
    """Two binary outcomes per party: a Bell variable driven by the setting
    and the hidden value, and a selection variable driven by the hidden value
    alone.  With ``selection_feeds_bell`` the selection variable also feeds
    the Bell variable (direct-conditioning structure)."""
    responses = []
    for _ in range(2):
        sel = _clamped_dist(rng, (n_lambda, 2))                    # p(o2 | lam)
        if selection_feeds_bell:
            bell = rng.dirichlet(np.ones(2), size=(n_lambda, 2, 2))  # p(o1 | lam,x,o2)
            table = np.empty((n_lambda, 2, 4))
            for lam, x, o in product(range(n_lambda), range(2), range(4)):
                table[lam, x, o] = sel[lam, SEL_OF[o]] * bell[lam, x, SEL_OF[o]][BELL_OF[o]]
        else:
            bell = rng.dirichlet(np.ones(2), size=(n_lambda, 2))     # p(o1 | lam,x)
            table = np.empty((n_lambda, 2, 4))
            for lam, x, o in product(range(n_lambda), range(2), range(4)):
                table[lam, x, o] = sel[lam, SEL_OF[o]] * bell[lam, x][BELL_OF[o]]
        responses.append(table)
    weights = rng.dirichlet(np.ones(n_lambda))
    return LhvModel(weights, tuple(responses))


def selection_value_rule(table: np.ndarray) -> KRule:
    """K-rule reading only each party's selection variable of the composite."""
    def rule(lam: int, outcomes: tuple[int, ...], settings: tuple[int, ...]) -> float:
        return float(table[tuple(SEL_OF[o] for o in outcomes)])
    return rule


def random_safe_selection_joint(rng: np.random.Generator, n_lambda: int = 4) -> JointModel:
    """Random model consistent with the split-outcome selection structure."""
    model = split_outcome_model(rng, n_lambda, selection_feeds_bell=False)
    table = rng.uniform(0.05, 1.0, size=(2, 2))
    return attach_selection(model, selection_value_rule(table))


def random_safe_conditioning_joint(rng: np.random.Generator, n_lambda: int = 4) -> JointModel:
    """Random model for conditioning on fixed selection values (both = 1)."""
    model = split_outcome_model(rng, n_lambda, selection_feeds_bell=True)
    fixed = np.zeros((2, 2))
    fixed[1, 1] = 1.0
    return attach_selection(model, selection_value_rule(fixed))


BELL_PROJECTION = (BELL_OF, BELL_OF)  # composite -> bell outcome, both parties
