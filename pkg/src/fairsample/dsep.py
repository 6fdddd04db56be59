"""Path-based d-separation with verdicts, witnesses and an empirical probe.

The classification rules for a path between two nodes, conditioning on a set
Z, are the standard ones:

(i)   a collider (both adjacent path edges point into the node) blocks the
      path unless it, or one of its descendants, is in Z;
(ii)  a conditioned non-collider blocks the path;
(iii) a collider whose descendant (or itself) is conditioned on is opened.

Paths are enumerated in lexicographic order of their node sequences, and
``d_separated`` reports the lexicographically first open path as a witness,
iterating endpoint pairs in sorted order.  All functions are pure; diagrams
are immutable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .diagrams import CausalDiagram, SETTING
from .errors import (
    BidirectedPresent,
    CardinalityOverflow,
    NonlocalPresent,
)

FORWARD = "->"
BACKWARD = "<-"
NONLOCAL = "~~"

# Rule tags carried by verdicts.
COLLIDER_UNCONDITIONED = "ColliderUnconditioned"        # rule (i)
NONCOLLIDER_CONDITIONED = "NonColliderConditioned"      # rule (ii)
COLLIDER_OPENED = "ColliderOpenedByConditioning"        # rule (iii)
NO_SIGNALLING_BLOCKED = "NoSignallingBlocked"           # hybrid diagrams only

OPEN = "Open"
BLOCKED = "Blocked"


@dataclass(frozen=True)
class Path:
    """Simple undirected path: node sequence plus a traversal mark per step.

    ``marks[i]`` describes the edge between ``nodes[i]`` and ``nodes[i+1]``:
    ``->`` for a directed edge traversed head-on, ``<-`` for one traversed
    against its direction, ``~~`` for a nonlocal edge.
    """

    nodes: tuple[str, ...]
    marks: tuple[str, ...]

    def __post_init__(self):
        if len(self.nodes) < 2 or len(self.marks) != len(self.nodes) - 1:
            raise ValueError("malformed path")

    def render(self) -> str:
        parts = [self.nodes[0]]
        for mark, node in zip(self.marks, self.nodes[1:]):
            parts.append(mark)
            parts.append(node)
        return " ".join(parts)

    def reversed(self) -> "Path":
        flip = {FORWARD: BACKWARD, BACKWARD: FORWARD, NONLOCAL: NONLOCAL}
        return Path(self.nodes[::-1], tuple(flip[m] for m in self.marks[::-1]))


@dataclass(frozen=True)
class PathVerdict:
    path: Path
    status: str                                   # OPEN | BLOCKED
    reason: str | None = None                     # rule tag
    blocking_node: str | None = None
    opened_colliders: tuple[tuple[str, str], ...] = ()   # (collider, conditioned opener)

    @property
    def is_open(self) -> bool:
        return self.status == OPEN


def _neighbor_steps(d: CausalDiagram, node: str) -> list[tuple[str, str]]:
    steps = [(c, FORWARD) for c in d.children(node)]
    steps += [(p, BACKWARD) for p in d.parents(node)]
    for u, v in d.nonlocal_edges:
        if u == node:
            steps.append((v, NONLOCAL))
        elif v == node:
            steps.append((u, NONLOCAL))
    steps.sort()
    return steps


def iter_paths(d: CausalDiagram, u: str, v: str) -> Iterator[Path]:
    """Yield all simple paths between u and v in lexicographic node order."""
    if d.bidirected:
        raise BidirectedPresent("expand bidirected edges before path enumeration")
    d.kind(u), d.kind(v)
    if u == v:
        raise ValueError("path endpoints must differ")

    adjacency = {n: _neighbor_steps(d, n) for n in d.names}
    nodes = [u]
    marks: list[str] = []
    on_path = {u}

    def walk() -> Iterator[Path]:
        here = nodes[-1]
        for nxt, mark in adjacency[here]:
            if nxt in on_path:
                continue
            nodes.append(nxt)
            marks.append(mark)
            if nxt == v:
                yield Path(tuple(nodes), tuple(marks))
            else:
                on_path.add(nxt)
                yield from walk()
                on_path.discard(nxt)
            nodes.pop()
            marks.pop()

    yield from walk()


def enumerate_paths(d: CausalDiagram, u: str, v: str) -> list[Path]:
    return list(iter_paths(d, u, v))


def _heads_into(path: Path, i: int) -> tuple[bool, bool]:
    """Arrowheads at interior node ``path.nodes[i]`` from the left/right step.

    A nonlocal edge is treated as a latent common cause, i.e. it puts an
    arrowhead at both of its endpoints.
    """
    left = path.marks[i - 1] in (FORWARD, NONLOCAL)
    right = path.marks[i] in (BACKWARD, NONLOCAL)
    return left, right


def _classify(
    d: CausalDiagram,
    path: Path,
    conditioned: frozenset[str],
    allow_nonlocal: bool,
) -> PathVerdict:
    if not allow_nonlocal and NONLOCAL in path.marks:
        raise NonlocalPresent(
            "path traverses a nonlocal edge; use multiparty.ns_classify"
        )
    if conditioned & {path.nodes[0], path.nodes[-1]}:
        raise ValueError("conditioning set must not contain the path endpoints")

    opened: list[tuple[str, str]] = []
    for i in range(1, len(path.nodes) - 1):
        node = path.nodes[i]
        head_left, head_right = _heads_into(path, i)
        if head_left and head_right:
            if node in conditioned:
                opened.append((node, node))
                continue
            openers = sorted(d.descendants(node) & conditioned)
            if openers:
                opened.append((node, openers[0]))
                continue
            return PathVerdict(path, BLOCKED, COLLIDER_UNCONDITIONED, node)
        if node in conditioned:
            return PathVerdict(path, BLOCKED, NONCOLLIDER_CONDITIONED, node)

    reason = COLLIDER_OPENED if opened else None
    return PathVerdict(path, OPEN, reason, None, tuple(opened))


def classify_path(
    d: CausalDiagram, path: Path, conditioned: Iterable[str]
) -> PathVerdict:
    """Classify a path as open or blocked under a conditioning set."""
    return _classify(d, path, frozenset(conditioned), allow_nonlocal=False)


def classify_path_ns(
    d: CausalDiagram, path: Path, conditioned: Iterable[str]
) -> PathVerdict:
    """Like :func:`classify_path` but with no-signalling semantics.

    Nonlocal edges are first treated as latent common causes.  On top of the
    ordinary rules, a path is blocked with :data:`NO_SIGNALLING_BLOCKED`
    whenever a maximal chain of directed edges pointing into one endpoint of
    a nonlocal edge starts at (or passes through) a setting node: a party's
    setting cannot influence another party's outcome across a no-signalling
    correlation.  That tag takes precedence over the ordinary verdict.
    """
    z = frozenset(conditioned)
    ns_block = _no_signalling_block(d, path)
    if ns_block is not None:
        return PathVerdict(path, BLOCKED, NO_SIGNALLING_BLOCKED, ns_block)
    return _classify(d, path, z, allow_nonlocal=True)


def _no_signalling_block(d: CausalDiagram, path: Path) -> str | None:
    for i, mark in enumerate(path.marks):
        if mark != NONLOCAL:
            continue
        # Chain of directed edges pointing toward the left endpoint nodes[i].
        j = i - 1
        while j >= 0 and path.marks[j] == FORWARD:
            if d.role(path.nodes[j]) == SETTING:
                return path.nodes[i + 1]
            j -= 1
        # Chain pointing toward the right endpoint nodes[i+1].
        j = i + 1
        while j < len(path.marks) and path.marks[j] == BACKWARD:
            if d.role(path.nodes[j + 1]) == SETTING:
                return path.nodes[i]
            j += 1
    return None


def d_separated(
    d: CausalDiagram,
    left: Iterable[str],
    right: Iterable[str],
    conditioned: Iterable[str] = (),
    *,
    ns_rules: bool = False,
) -> tuple[bool, PathVerdict | None]:
    """Decide whether every path between the two sets is blocked given Z.

    Returns ``(True, None)`` when separated, otherwise ``(False, witness)``
    where the witness is the first open path: endpoint pairs are visited in
    sorted order and paths per pair in lexicographic order.
    """
    u_set, v_set, z_set = set(left), set(right), frozenset(conditioned)
    if (u_set & v_set) or (u_set & z_set) or (v_set & z_set):
        raise ValueError("node sets must be pairwise disjoint")
    classify = classify_path_ns if ns_rules else classify_path
    for u in sorted(u_set):
        for v in sorted(v_set):
            for path in iter_paths(d, u, v):
                verdict = classify(d, path, z_set)
                if verdict.is_open:
                    return False, verdict
    return True, None


# -- empirical soundness probe ------------------------------------------


def ci_probe(
    d: CausalDiagram,
    left: Iterable[str],
    right: Iterable[str],
    conditioned: Iterable[str] = (),
    *,
    n_params: int = 200,
    seed: int = 0,
    cardinalities: dict[str, int] | None = None,
    max_cells: int = 2 ** 24,
) -> float:
    """Max total-variation dependence over random parameterizations of the DAG.

    Each parameterization draws a Dirichlet(1) conditional table for every
    node, the exact joint is formed by broadcasting, and the probe returns

        max over parameterizations, max over z with p(z) > 1e-9 of
        TV( p(U,V|z), p(U|z) p(V|z) ).

    d-separation of U and V by Z forces this to vanish; faithfulness makes it
    generically large otherwise.  Seeds are partitioned per parameterization,
    so parallel evaluation would give identical results.
    """
    if d.bidirected or d.nonlocal_edges:
        raise BidirectedPresent("ci_probe needs a plain DAG")
    u_list, v_list, z_list = sorted(set(left)), sorted(set(right)), sorted(set(conditioned))
    for n in u_list + v_list + z_list:
        d.kind(n)

    names = list(d.names)
    cards = {n: 2 for n in names}
    if cardinalities:
        cards.update(cardinalities)
    total = 1
    for n in names:
        total *= cards[n]
        if total > max_cells:
            raise CardinalityOverflow(f"joint would need {total} cells")

    axis = {n: i for i, n in enumerate(names)}
    shape = tuple(cards[n] for n in names)
    worst = 0.0
    for index in range(n_params):
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))
        joint = np.ones(shape)
        for n in names:
            parents = d.parents(n)
            rows = int(np.prod([cards[p] for p in parents])) if parents else 1
            table = rng.dirichlet(np.ones(cards[n]), size=rows)
            table = table.reshape(tuple(cards[p] for p in parents) + (cards[n],))
            involved = list(parents) + [n]
            view_shape = tuple(
                cards[m] if m in involved else 1 for m in names
            )
            # Rearrange table axes into global axis order, then broadcast.
            order = sorted(range(table.ndim), key=lambda k: axis[involved[k]])
            joint = joint * np.transpose(table, order).reshape(view_shape)
        worst = max(worst, _max_tv(joint, names, axis, u_list, v_list, z_list))
    return worst


def _max_tv(
    joint: np.ndarray,
    names: Sequence[str],
    axis: dict[str, int],
    u_list: Sequence[str],
    v_list: Sequence[str],
    z_list: Sequence[str],
) -> float:
    keep = u_list + v_list + z_list
    drop = tuple(axis[n] for n in names if n not in keep)
    reduced = joint.sum(axis=drop) if drop else joint
    remaining = [n for n in names if n in keep]
    order = [remaining.index(n) for n in keep]
    reduced = np.transpose(reduced, order)
    nu = int(np.prod(reduced.shape[: len(u_list)]))
    nv = int(np.prod(reduced.shape[len(u_list): len(u_list) + len(v_list)]))
    reduced = reduced.reshape(nu, nv, -1)
    worst = 0.0
    for zi in range(reduced.shape[2]):
        block = reduced[:, :, zi]
        pz = block.sum()
        if pz <= 1e-9:
            continue
        cond = block / pz
        pu = cond.sum(axis=1, keepdims=True)
        pv = cond.sum(axis=0, keepdims=True)
        worst = max(worst, 0.5 * float(np.abs(cond - pu * pv).sum()))
    return worst
