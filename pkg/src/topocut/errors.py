"""Exception hierarchy shared by all topocut modules."""


class TopocutError(Exception):
    """Base class for every error raised by this package."""


class DimensionError(TopocutError, ValueError):
    pass


class InvalidCellError(TopocutError, IndexError):
    pass


class NotFaceClosedError(TopocutError, ValueError):
    pass


class MeshError(TopocutError, ValueError):
    """Malformed or unsupported mesh input."""


class NotAcyclicError(TopocutError):
    """The ambient complex is not homologically trivial.

    Linked currents are only well defined when every 2-cycle of the whole
    mesh bounds, so this is a hard error rather than a warning.
    """


class InconsistencyError(TopocutError):
    """An internal invariant that the mathematics guarantees was violated."""


class SolverError(TopocutError):
    pass


class RankDeficiencyError(SolverError):
    def __init__(self, family, message):
        super().__init__(f"{family}: {message}")
        self.family = family
