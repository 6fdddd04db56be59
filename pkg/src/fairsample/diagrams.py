"""Typed causal diagrams: validation, bidirected expansion, ancestry queries.

Nodes are named strings with a kind (setting, outcome-of-a-party, latent,
selection).  Three edge classes are kept separate: directed causal edges,
bidirected edges standing for an unresolved causal connection between two
observed nodes, and nonlocal edges marking no-signalling correlations
between outcome nodes of different parties (hybrid diagrams only).

Diagrams are immutable once built; every operation returns a new diagram.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import cached_property
from typing import Iterable, Mapping

from .errors import (
    CycleDetected,
    DiagramError,
    EdgeIntoSetting,
    EdgeOutOfSelection,
    UnknownNode,
)

SETTING = "setting"
OUTCOME = "outcome"
LATENT = "latent"
SELECTION = "selection"

_ROLES = (SETTING, OUTCOME, LATENT, SELECTION)


@dataclass(frozen=True, order=True)
class NodeKind:
    role: str
    party: str | None = None

    def __post_init__(self):
        if self.role not in _ROLES:
            raise DiagramError(f"unknown node role: {self.role!r}")
        if self.role == OUTCOME and not self.party:
            raise DiagramError("outcome nodes need a party")
        if self.role != OUTCOME and self.party is not None:
            raise DiagramError(f"{self.role} nodes carry no party")


def setting() -> NodeKind:
    return NodeKind(SETTING)


def outcome(party: str) -> NodeKind:
    return NodeKind(OUTCOME, party)


def latent() -> NodeKind:
    return NodeKind(LATENT)


def selection() -> NodeKind:
    return NodeKind(SELECTION)


def _sorted_pair(u: str, v: str) -> tuple[str, str]:
    return (u, v) if u <= v else (v, u)


@dataclass(frozen=True)
class CausalDiagram:
    """Validated causal diagram.  Construct through :func:`build_diagram`."""

    kinds: Mapping[str, NodeKind]
    directed: frozenset[tuple[str, str]]
    bidirected: frozenset[tuple[str, str]] = frozenset()
    nonlocal_edges: frozenset[tuple[str, str]] = frozenset()

    # -- basic accessors -------------------------------------------------

    @cached_property
    def names(self) -> tuple[str, ...]:
        return tuple(sorted(self.kinds))

    def kind(self, name: str) -> NodeKind:
        try:
            return self.kinds[name]
        except KeyError:
            raise UnknownNode(name) from None

    def role(self, name: str) -> str:
        return self.kind(name).role

    @cached_property
    def settings(self) -> tuple[str, ...]:
        return tuple(n for n in self.names if self.kinds[n].role == SETTING)

    @cached_property
    def latents(self) -> tuple[str, ...]:
        return tuple(n for n in self.names if self.kinds[n].role == LATENT)

    @cached_property
    def outcomes(self) -> tuple[str, ...]:
        return tuple(n for n in self.names if self.kinds[n].role == OUTCOME)

    def outcomes_of(self, party: str) -> tuple[str, ...]:
        return tuple(n for n in self.outcomes if self.kinds[n].party == party)

    @cached_property
    def parties(self) -> tuple[str, ...]:
        return tuple(sorted({self.kinds[n].party for n in self.outcomes}))

    @cached_property
    def selection_node(self) -> str | None:
        for n in self.names:
            if self.kinds[n].role == SELECTION:
                return n
        return None

    # -- adjacency -------------------------------------------------------

    @cached_property
    def _parents(self) -> dict[str, tuple[str, ...]]:
        out: dict[str, list[str]] = {n: [] for n in self.names}
        for u, v in self.directed:
            out[v].append(u)
        return {n: tuple(sorted(ps)) for n, ps in out.items()}

    @cached_property
    def _children(self) -> dict[str, tuple[str, ...]]:
        out: dict[str, list[str]] = {n: [] for n in self.names}
        for u, v in self.directed:
            out[u].append(v)
        return {n: tuple(sorted(cs)) for n, cs in out.items()}

    def parents(self, name: str) -> tuple[str, ...]:
        self.kind(name)
        return self._parents[name]

    def children(self, name: str) -> tuple[str, ...]:
        self.kind(name)
        return self._children[name]

    def ancestors(self, name: str) -> set[str]:
        """Transitive closure over directed edges, excluding the node itself."""
        self.kind(name)
        seen: set[str] = set()
        stack = list(self._parents[name])
        while stack:
            n = stack.pop()
            if n not in seen:
                seen.add(n)
                stack.extend(self._parents[n])
        return seen

    def descendants(self, name: str) -> set[str]:
        """Transitive closure over directed edges, excluding the node itself."""
        self.kind(name)
        seen: set[str] = set()
        stack = list(self._children[name])
        while stack:
            n = stack.pop()
            if n not in seen:
                seen.add(n)
                stack.extend(self._children[n])
        return seen

    # -- rewriting -------------------------------------------------------

    def with_directed(self, edges: Iterable[tuple[str, str]]) -> "CausalDiagram":
        return build_diagram(
            dict(self.kinds),
            sorted(set(self.directed) | set(edges)),
            sorted(self.bidirected),
            sorted(self.nonlocal_edges),
        )

    def without_directed(self, edges: Iterable[tuple[str, str]]) -> "CausalDiagram":
        return build_diagram(
            dict(self.kinds),
            sorted(set(self.directed) - set(edges)),
            sorted(self.bidirected),
            sorted(self.nonlocal_edges),
        )

    def without_nodes(self, names: Iterable[str]) -> "CausalDiagram":
        drop = set(names)
        return build_diagram(
            {n: k for n, k in self.kinds.items() if n not in drop},
            sorted((u, v) for u, v in self.directed if u not in drop and v not in drop),
            sorted(p for p in self.bidirected if drop.isdisjoint(p)),
            sorted(p for p in self.nonlocal_edges if drop.isdisjoint(p)),
        )

    def restrict_nonlocal(self, parties: Iterable[str]) -> "CausalDiagram":
        """Keep only nonlocal edges whose endpoints both belong to `parties`."""
        keep = set(parties)
        kept = frozenset(
            p
            for p in self.nonlocal_edges
            if {self.kinds[p[0]].party, self.kinds[p[1]].party} <= keep
        )
        return replace(self, nonlocal_edges=kept)

    def expand_bidirected(self) -> "CausalDiagram":
        """Replace each bidirected edge {U,V} by a fresh latent with edges to both.

        Fresh names follow the deterministic scheme ``γ_<U>_<V>`` with the
        endpoints in lexicographic order, so verdicts and witness paths are
        reproducible.  Directed orientations of the pair are *not* added here;
        callers enumerating the full disjunction add those themselves.
        """
        if not self.bidirected:
            return self
        kinds = dict(self.kinds)
        directed = set(self.directed)
        for u, v in sorted(self.bidirected):
            name = f"γ_{u}_{v}"
            while name in kinds:
                name += "_"
            kinds[name] = latent()
            directed.add((name, u))
            directed.add((name, v))
        return build_diagram(kinds, sorted(directed), (), sorted(self.nonlocal_edges))


def _find_cycle(children: Mapping[str, tuple[str, ...]]) -> list[str]:
    # DFS with a grey set; returns one directed cycle for the error message.
    WHITE, GREY, BLACK = 0, 1, 2
    color = {n: WHITE for n in children}
    stack: list[str] = []

    def visit(n: str) -> list[str] | None:
        color[n] = GREY
        stack.append(n)
        for c in children[n]:
            if color[c] == GREY:
                return stack[stack.index(c):] + [c]
            if color[c] == WHITE:
                found = visit(c)
                if found:
                    return found
        stack.pop()
        color[n] = BLACK
        return None

    for n in sorted(children):
        if color[n] == WHITE:
            found = visit(n)
            if found:
                return found
    return []


def build_diagram(
    nodes: Mapping[str, NodeKind],
    directed_edges: Iterable[tuple[str, str]] = (),
    bidirected_edges: Iterable[tuple[str, str]] = (),
    nonlocal_edges: Iterable[tuple[str, str]] = (),
) -> CausalDiagram:
    """Validate and build a :class:`CausalDiagram`.

    Raises :class:`UnknownNode`, :class:`CycleDetected`,
    :class:`EdgeIntoSetting`, :class:`EdgeOutOfSelection` or a generic
    :class:`DiagramError` on structural problems.
    """
    kinds = dict(nodes)
    for name in kinds:
        if not isinstance(name, str) or not name:
            raise DiagramError(f"node names must be nonempty strings, got {name!r}")

    directed = frozenset((u, v) for u, v in directed_edges)
    bidirected = frozenset(_sorted_pair(u, v) for u, v in bidirected_edges)
    nonlocal_ = frozenset(_sorted_pair(u, v) for u, v in nonlocal_edges)

    for u, v in sorted(directed | bidirected | nonlocal_):
        for n in (u, v):
            if n not in kinds:
                raise UnknownNode(n)

    selections = [n for n, k in kinds.items() if k.role == SELECTION]
    if len(selections) > 1:
        raise DiagramError(f"at most one selection node allowed, got {sorted(selections)}")

    for u, v in sorted(directed):
        if u == v:
            raise CycleDetected([u, u])
        if kinds[v].role == SETTING:
            raise EdgeIntoSetting((u, v))
        if kinds[u].role == SELECTION:
            raise EdgeOutOfSelection((u, v))

    for u, v in sorted(bidirected):
        for n in (u, v):
            if kinds[n].role == LATENT:
                raise DiagramError(f"bidirected edge touches latent node {n}")
            if kinds[n].role == SETTING:
                # The common-cause resolution would direct an edge into the setting.
                raise EdgeIntoSetting((f"γ_{u}_{v}", n))

    for u, v in sorted(nonlocal_):
        ku, kv = kinds[u], kinds[v]
        if ku.role != OUTCOME or kv.role != OUTCOME:
            raise DiagramError(f"nonlocal edge {u} ~~ {v} must join outcome nodes")
        if ku.party == kv.party:
            raise DiagramError(f"nonlocal edge {u} ~~ {v} joins outcomes of one party")

    diagram = CausalDiagram(kinds, directed, bidirected, nonlocal_)
    # Kahn would do, but a DFS lets us name a concrete cycle.
    order_ok = _topological_ok(diagram)
    if not order_ok:
        raise CycleDetected(_find_cycle(diagram._children))
    return diagram


def _topological_ok(d: CausalDiagram) -> bool:
    indeg = {n: len(d._parents[n]) for n in d.names}
    queue = [n for n in d.names if indeg[n] == 0]
    seen = 0
    while queue:
        n = queue.pop()
        seen += 1
        for c in d._children[n]:
            indeg[c] -= 1
            if indeg[c] == 0:
                queue.append(c)
    return seen == len(d.names)
