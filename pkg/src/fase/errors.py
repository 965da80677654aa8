"""Exception types raised by the extrapolation routines.

Everything derives from ValueError so callers that only care about
"bad input" can catch a single base class.
"""


class ShapeError(ValueError):
    """Array arguments disagree in shape or are not 2-D where 2-D is required."""


class ParameterError(ValueError):
    """A scalar parameter is outside its documented domain."""


class MaskError(ValueError):
    """A loss mask is unusable (e.g. every sample marked lost)."""


class FormatError(ValueError):
    """A dictionary / table / image file does not follow its documented layout."""


class DegenerateAtomError(ValueError):
    """An atom has zero weighted energy, so its projection is undefined."""

    def __init__(self, index: int | None = None, message: str | None = None):
        self.index = index
        if message is None:
            message = (
                "atom has zero weighted energy"
                if index is None
                else f"atom {index} has zero weighted energy"
            )
        super().__init__(message)


class NoSelectableAtomError(ValueError):
    """Every atom in the dictionary is degenerate under the current weight."""


class StaleTableError(ValueError):
    """A precomputed table's provenance does not match the dictionary/weight in use."""


class UnsupportedDictionaryError(ValueError):
    """The requested fast path needs frequency tags the dictionary does not carry."""
