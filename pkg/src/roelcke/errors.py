"""Error taxonomy shared by the library and the CLI.

Exit codes: validation errors map to 1, precondition violations to 2,
budget exhaustion to 3.
"""


class RoelckeError(Exception):
    """Base class for all library errors."""

    exit_code = 1


class ValidationError(RoelckeError):
    """Malformed input: bad syntax, broken invariants, wrong sizes."""

    exit_code = 1


class PreconditionError(RoelckeError):
    """Well-formed input that violates an operation's precondition."""

    exit_code = 2


class BudgetError(RoelckeError):
    """A configured cap (enumeration size, closure cardinality, depth) was hit."""

    exit_code = 3
