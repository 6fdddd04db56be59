"""Exception taxonomy shared across the package."""


class FairSampleError(Exception):
    """Base class for all library errors."""


class DiagramError(FairSampleError):
    """A diagram failed structural validation."""


class UnknownNode(DiagramError):
    def __init__(self, name):
        super().__init__(f"unknown node: {name!r}")
        self.name = name


class CycleDetected(DiagramError):
    def __init__(self, cycle):
        super().__init__("directed cycle: " + " -> ".join(cycle))
        self.cycle = tuple(cycle)


class EdgeIntoSetting(DiagramError):
    def __init__(self, edge):
        super().__init__(f"edge into setting node: {edge[0]} -> {edge[1]}")
        self.edge = tuple(edge)


class EdgeOutOfSelection(DiagramError):
    def __init__(self, edge):
        super().__init__(f"edge out of selection node: {edge[0]} -> {edge[1]}")
        self.edge = tuple(edge)


class BidirectedPresent(FairSampleError):
    """Operation requires bidirected edges to be expanded first."""


class NonlocalPresent(FairSampleError):
    """Plain path classification does not handle nonlocal edges."""


class CardinalityOverflow(FairSampleError):
    """Joint distribution would exceed the cell budget."""


class ResolutionBlowup(FairSampleError):
    """Too many bidirected edges to enumerate resolutions exhaustively."""


class NoSelectionNode(FairSampleError):
    """Operation requires a selection-node postselection."""


class StrategyBlowup(FairSampleError):
    """Deterministic-strategy enumeration would exceed the budget."""


class DimensionMismatch(FairSampleError):
    """Shapes of behaviors, models or functionals disagree."""


class EmptyPostselection(FairSampleError):
    """Some setting vector has (numerically) zero acceptance probability."""

    def __init__(self, settings, acceptance):
        super().__init__(
            f"acceptance probability {acceptance:.3e} at settings {settings} "
            "leaves the postselected behavior undefined"
        )
        self.settings = tuple(settings)
        self.acceptance = acceptance


class SearchFailed(FairSampleError):
    """A demo search did not reach its guaranteed target."""


class DslError(FairSampleError):
    """Positioned error in a diagram source file."""

    def __init__(self, message, line, column=1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class RoleConflict(DslError):
    pass


class FormatError(FairSampleError):
    """A model/behavior file failed schema or tolerance validation."""
