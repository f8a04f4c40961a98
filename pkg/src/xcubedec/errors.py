"""Exception types shared across the decoding pipeline."""


class SymmetryViolationError(RuntimeError):
    """A plane hosts an odd number of conserved defects.

    Impossible for syndromes of real errors with ideal measurements; always
    indicates a bug upstream, so decoders abort rather than guess.
    """


class StructuralFaultError(RuntimeError):
    """A cell reports one or three violated colors, which the stabilizer
    relation B^r B^g B^b = 1 forbids."""


class NonNeutralClusterError(RuntimeError):
    """A neutralizer failed to erase exactly its cluster's defects."""


class UnreachableMoveError(ValueError):
    """A requested defect move cannot be realized by the constructive
    string/membrane templates."""
