"""Exception types shared across the toolkit.

Everything derives from :class:`DomainError` so callers (CLI, HTTP service)
can map the whole category to one exit code / status while still telling the
specific failure apart by type.
"""


class DomainError(ValueError):
    """A parameter lies outside the range the operation is defined on."""


# -- pattern families ---------------------------------------------------------

class EmptySetError(DomainError):
    """A search pattern contains no indices."""


class IndexOutOfRangeError(DomainError):
    """A pattern index falls outside the alphabet [1, K]."""


class DuplicateIndexError(DomainError):
    """A pattern lists the same alphabet index twice."""


class DuplicatePatternError(DomainError):
    """Two patterns are equal as sets and duplicates were not allowed."""


class BadIndexListError(DomainError):
    """A list of pattern indices is not distinct or not in [1, mu]."""


class FamilyParseError(DomainError):
    """A family document is not well-formed."""


# -- information measures -----------------------------------------------------

class BadSplitError(DomainError):
    """A condition/target split does not fit the distribution's arity."""


# -- bounds -------------------------------------------------------------------

class BadSequenceError(DomainError):
    """A message sequence is empty, repeats an index, or leaves [1, mu]."""


class ServerCountError(DomainError):
    """Fewer than two servers; the bound formulas are not defined there."""


class ExhaustiveSizeError(DomainError):
    """Too many messages for exhaustive sequence optimization."""


class NotBalancedError(DomainError):
    """The operation requires all messages to carry equal entropy."""


class SequenceTooShortError(DomainError):
    """The sequence is shorter than the requested profile horizon."""


# -- constructions ------------------------------------------------------------

class NotDivisibleError(DomainError):
    """Disjoint subfamily requires the pattern size to divide K."""


class DepthTooLargeError(DomainError):
    """Nested construction depth exceeds the guard for this K and gamma."""


class OddAlphabetError(DomainError):
    """Circular constructions require an even alphabet size."""


# -- protocol -----------------------------------------------------------------

class InfeasibleBudgetError(DomainError):
    """No weight window inside [0, n] meets the failure budget."""


class LengthMismatchError(DomainError):
    """Bit-sequence lengths do not match the codec or chunk layout."""


class LayoutMismatchError(DomainError):
    """Query coefficients do not match the message/chunk layout."""
