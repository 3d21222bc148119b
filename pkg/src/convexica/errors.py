"""Exception types shared across the package.

Every error that a caller is expected to catch has its own class; the CLI
maps all of them to exit code 2 (usage/input trouble) except identity or
membership failures, which are verdicts, not errors.
"""


class ConvexicaError(Exception):
    """Base class for all package errors."""


class ParseError(ConvexicaError):
    """Malformed input text; carries the 1-based line number when known."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class CycleDetected(ConvexicaError):
    """Cover/leq input induces a cycle, so no partial order exists."""


class UnknownLabel(ConvexicaError):
    """A relation or argument mentions an element that was never declared."""


class ZeroSize(ConvexicaError):
    """A family constructor was asked for a non-positive size."""


class EmptyPoset(ConvexicaError):
    """Operation undefined on the empty poset (e.g. length)."""


class TooLarge(ConvexicaError):
    """Instance exceeds the exact-computation bound for this operation."""


class NotDClosed(ConvexicaError):
    """Quotient requested along a subset that is not D-closed."""


class NotALattice(ConvexicaError):
    """leq input where some pair lacks a unique join or meet."""


class BadArity(ConvexicaError):
    """Identity builder called with parameters out of range."""


class UnboundVariable(ConvexicaError):
    """Term evaluation hit a variable missing from the assignment."""


class BudgetExceeded(ConvexicaError):
    """Naive identity scan would exceed the assignment budget."""


class NoPartition(ConvexicaError):
    """rd(p) admits no complete-bipartite partition."""


class NotInSub2(ConvexicaError):
    """Embedding construction requires membership that failed."""


class PartitionMissing(ConvexicaError):
    """A required Udav-Bond partition failed during construction."""


class CapExceeded(ConvexicaError):
    """Sublattice closure hit the step cap; carries the partial size."""

    def __init__(self, message, partial_size):
        self.partial_size = partial_size
        super().__init__(f"{message} (partial size {partial_size})")


class NotAHomomorphism(ConvexicaError):
    """Map fails join/meet preservation on some pair (reported inside)."""


class TooFewGenerators(ConvexicaError):
    """Generator list does not generate the lattice (or fewer than 2)."""


class InvalidReconstruction(ConvexicaError):
    """Growth-experiment poset failed its validation gate."""
