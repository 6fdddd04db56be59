"""Built-in scenario fixtures, keyed by the names the CLI exposes."""

from __future__ import annotations

from .dsl import parse_diagram
from .verifier import ScenarioSpec

_BIPARTITE_NODES = """\
node X setting
node Y setting
node A outcome(alice)
node B outcome(bob)
node Lambda latent
"""

_SPLIT_NODES = """\
node X setting
node Y setting
node A_1 outcome(alice)
node A_2 outcome(alice)
node B_1 outcome(bob)
node B_2 outcome(bob)
node Lambda latent
"""

_LHV_EDGES_SPLIT = """\
edge Lambda -> A_1
edge Lambda -> A_2
edge Lambda -> B_1
edge Lambda -> B_2
"""

SOURCES: dict[str, str] = {}

SOURCES["fig1a"] = (
    "# plain two-party hidden-variable structure, no postselection\n"
    + _BIPARTITE_NODES
    + """\
edge Lambda -> A
edge Lambda -> B
edge X -> A
edge Y -> B
"""
)

SOURCES["fig1b"] = (
    "# collective postselection fed by both outcomes\n"
    + _BIPARTITE_NODES
    + """\
node K selection
edge Lambda -> A
edge Lambda -> B
edge X -> A
edge Y -> B
edge A -> K
edge B -> K
"""
)

SOURCES["franson"] = (
    "# the same outcomes feed the Bell functional and the postselection\n"
    + _BIPARTITE_NODES
    + """\
node K selection
edge Lambda -> A
edge Lambda -> B
edge X -> A
edge Y -> B
edge A -> K
edge B -> K
bell alice: A
bell bob: B
"""
)

SOURCES["fig2a"] = (
    "# split outcomes, unrestricted intra-party connections\n"
    + _SPLIT_NODES
    + "node K selection\n"
    + _LHV_EDGES_SPLIT
    + """\
edge X -> A_1
edge X -> A_2
edge Y -> B_1
edge Y -> B_2
edge A_2 -> K
edge B_2 -> K
biedge A_1 -- A_2
biedge B_1 -- B_2
"""
)

SOURCES["fig2b"] = (
    "# selection-feeding outcomes shielded from settings, influence toward Bell side\n"
    + _SPLIT_NODES
    + "node K selection\n"
    + _LHV_EDGES_SPLIT
    + """\
edge X -> A_1
edge Y -> B_1
edge A_2 -> K
edge B_2 -> K
edge A_2 -> A_1
edge B_2 -> B_1
"""
)

SOURCES["fig2c"] = (
    "# the safe split: selection side untouched by settings, no cross influence\n"
    + _SPLIT_NODES
    + "node K selection\n"
    + _LHV_EDGES_SPLIT
    + """\
edge X -> A_1
edge Y -> B_1
edge A_2 -> K
edge B_2 -> K
"""
)

SOURCES["parity"] = (
    "# same structure as fig2c; the selection applies a parity rule numerically\n"
    + _SPLIT_NODES
    + "node K selection\n"
    + _LHV_EDGES_SPLIT
    + """\
edge X -> A_1
edge Y -> B_1
edge A_2 -> K
edge B_2 -> K
"""
)

SOURCES["fig4"] = (
    "# conditioning directly on detected-particle counts, no selection variable\n"
    + _SPLIT_NODES
    + _LHV_EDGES_SPLIT
    + """\
edge X -> A_1
edge Y -> B_1
edge A_2 -> A_1
edge B_2 -> B_1
condition A_2=1 B_2=1
"""
)

SOURCES["settings-only"] = (
    "# postselection decided by the settings alone\n"
    + _BIPARTITE_NODES
    + """\
node K selection
edge Lambda -> A
edge Lambda -> B
edge X -> A
edge Y -> B
edge X -> K
edge Y -> K
"""
)

_THREE_PARTY_NODES = """\
node X setting
node Y setting
node Z setting
node A_1 outcome(alice)
node A_2 outcome(alice)
node B_1 outcome(bob)
node B_2 outcome(bob)
node C_1 outcome(charlie)
node C_2 outcome(charlie)
node Lambda latent
"""

_THREE_PARTY_LHV = """\
edge Lambda -> A_1
edge Lambda -> A_2
edge Lambda -> B_1
edge Lambda -> B_2
edge Lambda -> C_1
edge Lambda -> C_2
edge X -> A_1
edge Y -> B_1
edge Z -> C_1
"""

_THREE_PARTY_NS = """\
nsedge A_1 ~~ B_1
nsedge A_1 ~~ B_2
nsedge A_1 ~~ C_1
nsedge A_1 ~~ C_2
nsedge A_2 ~~ B_1
nsedge A_2 ~~ B_2
nsedge A_2 ~~ C_1
nsedge A_2 ~~ C_2
nsedge B_1 ~~ C_1
nsedge B_1 ~~ C_2
nsedge B_2 ~~ C_1
nsedge B_2 ~~ C_2
"""

SOURCES["fig3"] = (
    "# three parties, hybrid nonlocal correlations, collective postselection\n"
    + _THREE_PARTY_NODES
    + "node K selection\n"
    + _THREE_PARTY_LHV
    + """\
edge A_2 -> K
edge B_2 -> K
edge C_2 -> K
"""
    + _THREE_PARTY_NS
)

SOURCES["fig3-direct"] = (
    "# three parties, conditioning on particle counts, hybrid correlations\n"
    + _THREE_PARTY_NODES
    + _THREE_PARTY_LHV
    + """\
edge A_2 -> A_1
edge B_2 -> B_1
edge C_2 -> C_1
"""
    + _THREE_PARTY_NS
    + "condition A_2=1 B_2=1 C_2=1\n"
)

FIXTURE_NAMES = tuple(sorted(SOURCES))


def fixture(name: str) -> ScenarioSpec:
    try:
        source = SOURCES[name]
    except KeyError:
        raise KeyError(
            f"unknown fixture {name!r}; available: {', '.join(FIXTURE_NAMES)}"
        ) from None
    return parse_diagram(source)
