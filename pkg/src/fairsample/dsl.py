"""Line-oriented source format for scenarios.

Grammar (one declaration per line, ``#`` starts a comment):

    node <name> setting
    node <name> outcome(<party>)
    node <name> latent
    node <name> selection
    edge <a> -> <b>
    biedge <a> -- <b>
    nsedge <a> ~~ <b>
    bell <party>: <names...>
    condition <name>=<value> ...
    assume lambda-influences-all

``bell`` lines are optional; a party's Bell outcomes default to its outcomes
that do not feed the selection.  ``condition`` lines (conditioning on fixed
outcome values) exclude a selection node and vice versa.  Errors carry the
line and column of the offending token.
"""

from __future__ import annotations

import re

from . import diagrams as dg
from .errors import DslError, RoleConflict, UnknownNode
from .verifier import (
    DirectConditioning,
    ScenarioSpec,
    SelectionNode,
    make_scenario,
)

_NAME = re.compile(r"^[A-Za-z0-9_γ][A-Za-z0-9_γ']*$")


def _column(line: str, token: str) -> int:
    pos = line.find(token)
    return pos + 1 if pos >= 0 else 1


def _check_name(name: str, line: str, lineno: int) -> str:
    if not _NAME.match(name):
        raise DslError(f"bad name {name!r}", lineno, _column(line, name))
    return name


def parse_diagram(source: str) -> ScenarioSpec:
    """Parse a scenario source into a validated :class:`ScenarioSpec`."""
    kinds: dict[str, dg.NodeKind] = {}
    node_lines: dict[str, int] = {}
    directed: list[tuple[str, str]] = []
    bidirected: list[tuple[str, str]] = []
    nonlocal_edges: list[tuple[str, str]] = []
    edge_lines: dict[tuple[str, str], int] = {}
    bell: dict[str, tuple[str, ...]] = {}
    condition: list[tuple[str, int]] = []
    assume_all = False

    def known(name: str, line: str, lineno: int) -> str:
        if name not in kinds:
            raise DslError(f"unknown node {name!r}", lineno, _column(line, name))
        return name

    for lineno, raw in enumerate(source.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        tokens = line.split()
        head = tokens[0]

        if head == "node":
            if len(tokens) != 3:
                raise DslError("expected: node <name> <kind>", lineno)
            name = _check_name(tokens[1], line, lineno)
            if name in kinds:
                raise DslError(
                    f"duplicate node {name!r} (first declared on line {node_lines[name]})",
                    lineno,
                    _column(line, name),
                )
            kind_token = tokens[2]
            if kind_token == "setting":
                kind = dg.setting()
            elif kind_token == "latent":
                kind = dg.latent()
            elif kind_token == "selection":
                kind = dg.selection()
            else:
                match = re.fullmatch(r"outcome\(([^)]+)\)", kind_token)
                if not match:
                    raise DslError(
                        f"unknown node kind {kind_token!r}",
                        lineno,
                        _column(line, kind_token),
                    )
                kind = dg.outcome(match.group(1))
            kinds[name] = kind
            node_lines[name] = lineno

        elif head in ("edge", "biedge", "nsedge"):
            arrow = {"edge": "->", "biedge": "--", "nsedge": "~~"}[head]
            if len(tokens) != 4 or tokens[2] != arrow:
                raise DslError(f"expected: {head} <a> {arrow} <b>", lineno)
            u = known(tokens[1], line, lineno)
            v = known(tokens[3], line, lineno)
            pair = (u, v)
            if head == "edge":
                directed.append(pair)
            elif head == "biedge":
                bidirected.append(pair)
            else:
                nonlocal_edges.append(pair)
            edge_lines.setdefault(pair, lineno)
            edge_lines.setdefault((v, u), lineno)

        elif head == "bell":
            match = re.fullmatch(r"bell\s+([^:\s]+)\s*:\s*(.+)", line.strip())
            if not match:
                raise DslError("expected: bell <party>: <names...>", lineno)
            party = match.group(1)
            names = tuple(match.group(2).split())
            for n in names:
                known(n, line, lineno)
                if kinds[n].role != dg.OUTCOME or kinds[n].party != party:
                    raise RoleConflict(
                        f"{n} is not an outcome of party {party!r}",
                        lineno,
                        _column(line, n),
                    )
            if party in bell:
                raise DslError(f"duplicate bell line for party {party!r}", lineno)
            bell[party] = names

        elif head == "condition":
            if len(tokens) < 2:
                raise DslError("expected: condition <name>=<value> ...", lineno)
            for token in tokens[1:]:
                match = re.fullmatch(r"([^=]+)=(\d+)", token)
                if not match:
                    raise DslError(
                        f"bad condition term {token!r}", lineno, _column(line, token)
                    )
                name = known(match.group(1), line, lineno)
                if kinds[name].role != dg.OUTCOME:
                    raise RoleConflict(
                        f"conditioned node {name} is not an outcome",
                        lineno,
                        _column(line, name),
                    )
                condition.append((name, int(match.group(2))))

        elif head == "assume":
            if tokens[1:] != ["lambda-influences-all"]:
                raise DslError("expected: assume lambda-influences-all", lineno)
            assume_all = True

        else:
            raise DslError(f"unknown declaration {head!r}", lineno, _column(line, head))

    selections = [n for n, k in kinds.items() if k.role == dg.SELECTION]
    if condition and selections:
        raise RoleConflict(
            "condition lines and a selection node cannot be combined",
            node_lines[selections[0]],
        )

    try:
        diagram = dg.build_diagram(kinds, directed, bidirected, nonlocal_edges)
    except (dg.CycleDetected) as err:
        lineno = edge_lines.get((err.cycle[0], err.cycle[1]), 0)
        raise DslError(str(err), lineno) from err
    except (dg.EdgeIntoSetting, dg.EdgeOutOfSelection) as err:
        raise DslError(str(err), edge_lines.get(err.edge, 0)) from err
    except UnknownNode as err:
        raise DslError(str(err), 0) from err

    selection = None
    if selections:
        selection = SelectionNode(selections[0])
    elif condition:
        selection = DirectConditioning(tuple(condition))

    return make_scenario(
        diagram,
        selection,
        bell_outcomes=bell or None,
        lambda_influences_all=assume_all,
    )


def serialize_scenario(spec: ScenarioSpec) -> str:
    """Canonical source text; ``parse_diagram`` of the output reproduces the spec."""
    d = spec.diagram
    lines = []
    for name in d.names:
        kind = d.kind(name)
        if kind.role == dg.OUTCOME:
            lines.append(f"node {name} outcome({kind.party})")
        else:
            lines.append(f"node {name} {kind.role}")
    for u, v in sorted(d.directed):
        lines.append(f"edge {u} -> {v}")
    for u, v in sorted(d.bidirected):
        lines.append(f"biedge {u} -- {v}")
    for u, v in sorted(d.nonlocal_edges):
        lines.append(f"nsedge {u} ~~ {v}")
    for party, names in spec.bell_outcomes:
        if names:
            lines.append(f"bell {party}: {' '.join(names)}")
    if isinstance(spec.selection, DirectConditioning):
        terms = " ".join(f"{n}={v}" for n, v in spec.selection.values)
        lines.append(f"condition {terms}")
    if spec.lambda_influences_all:
        lines.append("assume lambda-influences-all")
    return "\n".join(lines) + "\n"
