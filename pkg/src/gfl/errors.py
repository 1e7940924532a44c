"""Exception types shared across the package.

Every error raised on a user-facing code path derives from GflError so the
CLI can map it to exit code 2; clean negative answers (no witness, nonempty
diff) are return values, never exceptions.
"""


class GflError(Exception):
    """Base class for all domain errors."""


class EmptyElement(GflError):
    """Operation undefined on the empty element (e.g. block order)."""


class NotBlockOrdered(GflError):
    """Partial addition applied to a non block-ordered pair."""


class BadRank(GflError):
    """Element rank does not match what the operation requires."""


class ParseError(GflError):
    """Malformed textual input; carries the offending position."""

    def __init__(self, message: str, position: int | None = None):
        super().__init__(message)
        self.position = position


class IndexOutOfRange(GflError):
    """Coordinate support reaches past the available blocks."""


class RankMismatch(GflError):
    """A block's rank differs from the sequence's common rank."""

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


class NotIncreasing(GflError):
    """Consecutive blocks are not strictly block-increasing."""

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


class DepthTooLarge(GflError):
    """Requested span depth exceeds the sequence length."""


class DomainExceeded(GflError):
    """A point or prefix bound lies outside the family's domain."""


class BadLevel(GflError):
    """Approximation level outside [0, k] (or [1, k] where 0 is excluded)."""


class SchemaError(GflError):
    """Structurally invalid serialized object."""


class InsufficientBlocks(GflError):
    """Fresh block supply cannot realize the required spacing."""


class InsufficientDomain(GflError):
    """Domain bound too small for the construction; carries the bound needed."""

    def __init__(self, message: str, required_x_max: int | None = None):
        super().__init__(message)
        self.required_x_max = required_x_max


class SearchExhausted(GflError):
    """Finite search space admits no pair/witness at this depth."""


class BudgetExceeded(GflError):
    """Exhaustive enumeration would exceed the configured budget."""
