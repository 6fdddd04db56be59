"""Fair-sampling verdicts for postselected Bell scenarios.

The fair sampling assumption holds faithfully exactly when two conditional
independences are visible in the causal diagram for *every* admissible
resolution of its bidirected edges:

* measurement independence given the postselection decision
  (hidden variables ⟂ settings | selection), and
* cross-party factorization of the Bell-side outcomes given the hidden
  variables and the selection.

``verify_fsa`` runs both checks, detects the obstruction where an outcome
feeds the Bell functional and the postselection simultaneously, and
classifies the safe structures.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .diagrams import (
    CausalDiagram,
    OUTCOME,
    SETTING,
    build_diagram,
    latent,
)
from .dsep import PathVerdict, d_separated
from .errors import (
    DiagramError,
    NoSelectionNode,
    ResolutionBlowup,
    RoleConflict,
)

MAX_BIDIRECTED = 12

# Classification labels (also the wire format of reports).
FIG2C = "Fig2c"
FIG4 = "Fig4"
SETTINGS_ONLY = "SettingsOnlyK"
UNSAFE = "Unsafe"


@dataclass(frozen=True)
class SelectionNode:
    node: str


@dataclass(frozen=True)
class DirectConditioning:
    """Conditioning on fixed values of outcome nodes, no selection variable."""

    values: tuple[tuple[str, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(sorted(self.values)))

    @property
    def nodes(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.values)


Selection = SelectionNode | DirectConditioning | None


@dataclass(frozen=True)
class ScenarioSpec:
    """A diagram plus the role annotations needed for FSA checks."""

    diagram: CausalDiagram
    selection: Selection
    bell_outcomes: tuple[tuple[str, tuple[str, ...]], ...]
    settings_by_party: tuple[tuple[str, tuple[str, ...]], ...]
    lambda_influences_all: bool = False

    @property
    def parties(self) -> tuple[str, ...]:
        return self.diagram.parties

    def bell(self, party: str) -> tuple[str, ...]:
        return dict(self.bell_outcomes).get(party, ())

    def settings(self, party: str) -> tuple[str, ...]:
        return dict(self.settings_by_party).get(party, ())

    def selection_targets(self) -> tuple[str, ...]:
        if isinstance(self.selection, SelectionNode):
            return (self.selection.node,)
        if isinstance(self.selection, DirectConditioning):
            return self.selection.nodes
        return ()


def infer_party_settings(diagram: CausalDiagram) -> dict[str, tuple[str, ...]]:
    """Assign each setting to the party whose outcomes it influences.

    A setting influencing outcomes of two parties is rejected; one feeding
    only the selection node belongs to no party.
    """
    owner: dict[str, str] = {}
    for u, v in sorted(diagram.directed):
        if diagram.role(u) == SETTING and diagram.role(v) == OUTCOME:
            party = diagram.kind(v).party
            if owner.get(u, party) != party:
                raise RoleConflict(
                    f"setting {u} influences outcomes of parties "
                    f"{owner[u]} and {party}",
                    line=0,
                )
            owner[u] = party
    result: dict[str, list[str]] = {p: [] for p in diagram.parties}
    for s, p in owner.items():
        result[p].append(s)
    return {p: tuple(sorted(ss)) for p, ss in result.items()}


def make_scenario(
    diagram: CausalDiagram,
    selection: Selection = None,
    bell_outcomes: dict[str, tuple[str, ...]] | None = None,
    lambda_influences_all: bool = False,
) -> ScenarioSpec:
    """Build a spec, inferring setting ownership and default Bell roles.

    When ``bell_outcomes`` is omitted, each party's Bell side defaults to its
    outcomes that do not feed the selection.
    """
    if selection is not None:
        for target in (
            (selection.node,) if isinstance(selection, SelectionNode) else selection.nodes
        ):
            diagram.kind(target)
        if isinstance(selection, SelectionNode):
            if diagram.role(selection.node) != "selection":
                raise DiagramError(f"{selection.node} is not a selection node")
        else:
            for n in selection.nodes:
                if diagram.role(n) != OUTCOME:
                    raise DiagramError(f"conditioned node {n} is not an outcome")
    targets = set()
    if isinstance(selection, SelectionNode):
        targets = {selection.node} | {
            n for n in diagram.outcomes if selection.node in diagram.descendants(n)
        }
    elif isinstance(selection, DirectConditioning):
        targets = set(selection.nodes)

    if bell_outcomes is None:
        bell_outcomes = {
            p: tuple(n for n in diagram.outcomes_of(p) if n not in targets)
            for p in diagram.parties
        }
    else:
        for p, names in bell_outcomes.items():
            for n in names:
                if diagram.role(n) != OUTCOME or diagram.kind(n).party != p:
                    raise DiagramError(f"{n} is not an outcome of party {p}")
        bell_outcomes = {
            p: tuple(bell_outcomes.get(p, ())) for p in diagram.parties
        }
    settings = infer_party_settings(diagram)
    return ScenarioSpec(
        diagram=diagram,
        selection=selection,
        bell_outcomes=tuple(sorted((p, tuple(v)) for p, v in bell_outcomes.items())),
        settings_by_party=tuple(sorted(settings.items())),
        lambda_influences_all=lambda_influences_all,
    )


@dataclass(frozen=True)
class FsaVerdict:
    safe: bool
    classification: str
    ci_witness: PathVerdict | None = None
    cii_witness: PathVerdict | None = None
    obstruction: tuple[str, ...] = ()
    resolutions_checked: int = 0
    pruned: tuple[str, ...] = ()
    notes: tuple[str, ...] = ()


# -- outcome partition and obstruction ------------------------------------


def partition_outcomes(spec: ScenarioSpec) -> dict[str, tuple[tuple[str, ...], tuple[str, ...]]]:
    """Per party: (outcomes feeding the selection, remaining outcomes)."""
    if not isinstance(spec.selection, SelectionNode):
        raise NoSelectionNode("partition_outcomes needs a selection-node scenario")
    k = spec.selection.node
    d = spec.diagram
    result = {}
    for party in d.parties:
        feeding = tuple(n for n in d.outcomes_of(party) if k in d.descendants(n))
        rest = tuple(n for n in d.outcomes_of(party) if n not in feeding)
        result[party] = (feeding, rest)
    return result


def detect_franson_obstruction(spec: ScenarioSpec) -> tuple[str, ...]:
    """Outcome nodes used both in the Bell functional and in the selection.

    Nonempty means no faithful fair-sampling structure exists: the same
    variable cannot simultaneously avoid setting influence (selection side)
    and carry it (Bell side).
    """
    d = spec.diagram
    bell_all = {n for _, names in spec.bell_outcomes for n in names}
    if isinstance(spec.selection, SelectionNode):
        k = spec.selection.node
        shared = {n for n in bell_all if k in d.descendants(n)}
    elif isinstance(spec.selection, DirectConditioning):
        shared = bell_all & set(spec.selection.nodes)
    else:
        shared = set()
    return tuple(sorted(shared))


# -- bidirected resolutions ------------------------------------------------

_ORIENTATION_MENU = tuple(
    tuple(
        option
        for bit, option in ((1, "fwd"), (2, "bwd"), (4, "cc"))
        if mask & bit
    )
    for mask in range(1, 8)
)


def admissible_resolutions(diagram: CausalDiagram):
    """Yield every admissible resolution of the bidirected edges.

    Each bidirected pair ranges over the 7 nonempty combinations of
    {forward edge, backward edge, latent common cause}; combinations that do
    not form a valid diagram (cycles, edges into settings, edges out of the
    selection) are skipped.  Without bidirected edges the diagram itself is
    the single resolution.
    """
    pairs = sorted(diagram.bidirected)
    if not pairs:
        yield diagram
        return
    if len(pairs) > MAX_BIDIRECTED:
        raise ResolutionBlowup(
            f"{len(pairs)} bidirected edges; exhaustive resolution capped at "
            f"{MAX_BIDIRECTED}"
        )
    base_kinds = dict(diagram.kinds)
    base_directed = set(diagram.directed)
    for combo in itertools.product(_ORIENTATION_MENU, repeat=len(pairs)):
        kinds = dict(base_kinds)
        directed = set(base_directed)
        for (u, v), options in zip(pairs, combo):
            if "fwd" in options:
                directed.add((u, v))
            if "bwd" in options:
                directed.add((v, u))
            if "cc" in options:
                name = f"γ_{u}_{v}"
                while name in kinds:
                    name += "_"
                kinds[name] = latent()
                directed.add((name, u))
                directed.add((name, v))
        try:
            yield build_diagram(kinds, sorted(directed), (), sorted(diagram.nonlocal_edges))
        except DiagramError:
            continue


# -- the two independence checks -------------------------------------------


def _prepared_diagram(spec: ScenarioSpec) -> tuple[CausalDiagram, tuple[str, ...], list[str]]:
    """Apply the latent-influence assumption and prune useless outcomes."""
    d = spec.diagram
    notes: list[str] = []
    missing = [
        (lam, o)
        for lam in d.latents
        for o in d.outcomes
        if (lam, o) not in d.directed
    ]
    if missing and spec.lambda_influences_all:
        d = d.with_directed(missing)
        notes.append(
            "added latent->outcome edges: "
            + ", ".join(f"{u}->{v}" for u, v in missing)
        )
    elif missing:
        notes.append(
            "checked as drawn; some latent->outcome influences are absent and "
            "not assumed (declare 'assume lambda-influences-all' to add them)"
        )

    targets = set(spec.selection_targets())
    prune = []
    for o in d.outcomes:
        feeds = o in targets or targets & d.descendants(o)
        influenced = any(d.role(a) == SETTING for a in d.ancestors(o))
        if not feeds and not influenced:
            prune.append(o)
    if prune:
        d = d.without_nodes(prune)
    return d, tuple(sorted(prune)), notes


def _ci_query(
    d: CausalDiagram, spec: ScenarioSpec, ns_rules: bool
) -> tuple[bool, PathVerdict | None]:
    settings = [n for n in d.settings]
    latents = [n for n in d.latents]
    if not settings or not latents:
        return True, None
    z = [n for n in spec.selection_targets() if n in d.names]
    return d_separated(d, settings, latents, z, ns_rules=ns_rules)


def _cii_sides(
    d: CausalDiagram, spec: ScenarioSpec, grouping: tuple[tuple[str, ...], ...]
) -> list[tuple[list[str], list[str]]]:
    targets = set(spec.selection_targets())

    def side(parties: tuple[str, ...]) -> list[str]:
        nodes: list[str] = []
        for p in parties:
            nodes += [n for n in spec.bell(p) if n in d.names and n not in targets]
            nodes += [s for s in spec.settings(p) if s in d.names]
        return sorted(set(nodes))

    sides = []
    for i, group_u in enumerate(grouping):
        for group_v in grouping[i + 1:]:
            u, v = side(group_u), side(group_v)
            if u and v:
                sides.append((u, v))
    return sides


def _cii_query(
    d: CausalDiagram,
    spec: ScenarioSpec,
    grouping: tuple[tuple[str, ...], ...],
    ns_rules: bool,
) -> tuple[bool, PathVerdict | None]:
    z = [n for n in spec.selection_targets() if n in d.names]
    z += [n for n in d.latents]
    for u, v in _cii_sides(d, spec, grouping):
        ok, witness = d_separated(d, u, v, sorted(set(z)), ns_rules=ns_rules)
        if not ok:
            return False, witness
    return True, None


def check_ci(spec: ScenarioSpec) -> tuple[bool, PathVerdict | None]:
    """Measurement independence given the selection, over all resolutions."""
    d, _, _ = _prepared_diagram(spec)
    ns = bool(d.nonlocal_edges)
    for resolved in admissible_resolutions(d):
        ok, witness = _ci_query(resolved, spec, ns)
        if not ok:
            return False, witness
    return True, None


def check_cii(spec: ScenarioSpec) -> tuple[bool, PathVerdict | None]:
    """Cross-party factorization given hidden variables and the selection."""
    d, _, _ = _prepared_diagram(spec)
    ns = bool(d.nonlocal_edges)
    grouping = tuple((p,) for p in spec.parties)
    for resolved in admissible_resolutions(d):
        ok, witness = _cii_query(resolved, spec, grouping, ns)
        if not ok:
            return False, witness
    return True, None


# -- the full verdict -------------------------------------------------------


def verify_fsa(spec: ScenarioSpec) -> FsaVerdict:
    """Classify a postselected Bell scenario.

    Safe classifications:

    * ``SettingsOnlyK`` – the selection is decided by settings alone (or no
      postselection is modeled at all); postselection cannot change the
      observed behavior.
    * ``Fig2c`` – selection-node scenarios passing both checks for every
      bidirected resolution.
    * ``Fig4`` – direct-conditioning scenarios passing both checks.

    Everything else is ``Unsafe``, carrying the first witness paths, plus an
    ``obstruction`` listing outcomes that feed the Bell functional and the
    selection simultaneously (the structural dead end for fair sampling).
    """
    d, pruned, notes = _prepared_diagram(spec)
    obstruction = detect_franson_obstruction(spec)

    if spec.selection is None:
        return FsaVerdict(
            safe=True,
            classification=SETTINGS_ONLY,
            pruned=pruned,
            notes=tuple(notes) + ("no postselection declared; trivially safe",),
        )

    if isinstance(spec.selection, SelectionNode):
        k = spec.selection.node
        if k in d.names:
            parents = d.parents(k)
            feeding_outcomes = [n for n in d.outcomes if k in d.descendants(n)]
            if not feeding_outcomes and all(d.role(p) == SETTING for p in parents):
                return FsaVerdict(
                    safe=not obstruction,
                    classification=SETTINGS_ONLY if not obstruction else UNSAFE,
                    obstruction=obstruction,
                    pruned=pruned,
                    notes=tuple(notes)
                    + ("selection decided by settings alone; behavior unchanged",),
                )

    ns = bool(d.nonlocal_edges)
    grouping = tuple((p,) for p in spec.parties)
    ci_witness = None
    cii_witness = None
    checked = 0
    for resolved in admissible_resolutions(d):
        checked += 1
        if ci_witness is None:
            ok, witness = _ci_query(resolved, spec, ns)
            if not ok:
                ci_witness = witness
        if cii_witness is None:
            ok, witness = _cii_query(resolved, spec, grouping, ns)
            if not ok:
                cii_witness = witness
        if ci_witness is not None and cii_witness is not None:
            break

    safe = not obstruction and ci_witness is None and cii_witness is None
    if safe:
        classification = FIG4 if isinstance(spec.selection, DirectConditioning) else FIG2C
    else:
        classification = UNSAFE
    return FsaVerdict(
        safe=safe,
        classification=classification,
        ci_witness=ci_witness,
        cii_witness=cii_witness,
        obstruction=obstruction,
        resolutions_checked=checked,
        pruned=pruned,
        notes=tuple(notes),
    )


def verify_fsa_hybrid(spec: ScenarioSpec) -> FsaVerdict:
    """FSA verdict for hybrid diagrams with nonlocal edges.

    Measurement independence is checked on the full diagram.  The
    factorization check runs once per bipartition of the parties into a pair
    and a singleton, with nonlocal edges restricted to the candidate pair:
    conditioning on the hidden variable fixes which pair may share a
    no-signalling correlation.
    """
    d, pruned, notes = _prepared_diagram(spec)
    obstruction = detect_franson_obstruction(spec)
    parties = spec.parties
    if len(parties) < 3:
        raise DiagramError("hybrid verdicts need at least three parties")

    ci_witness = None
    cii_witness = None
    checked = 0
    for resolved in admissible_resolutions(d):
        checked += 1
        if ci_witness is None:
            ok, witness = _ci_query(resolved, spec, ns_rules=True)
            if not ok:
                ci_witness = witness
        if cii_witness is None:
            for singleton in parties:
                pair = tuple(p for p in parties if p != singleton)
                restricted = resolved.restrict_nonlocal(pair)
                grouping = (pair, (singleton,))
                ok, witness = _cii_query(restricted, spec, grouping, ns_rules=True)
                if not ok:
                    cii_witness = witness
                    break
        if ci_witness is not None and cii_witness is not None:
            break

    safe = not obstruction and ci_witness is None and cii_witness is None
    if safe:
        classification = FIG4 if isinstance(spec.selection, DirectConditioning) else FIG2C
    else:
        classification = UNSAFE
    return FsaVerdict(
        safe=safe,
        classification=classification,
        ci_witness=ci_witness,
        cii_witness=cii_witness,
        obstruction=obstruction,
        resolutions_checked=checked,
        pruned=pruned,
        notes=tuple(notes),
    )


def verify(spec: ScenarioSpec) -> FsaVerdict:
    """Dispatch to the hybrid or plain verifier based on the diagram."""
    if spec.diagram.nonlocal_edges:
        return verify_fsa_hybrid(spec)
    return verify_fsa(spec)
