"""Exception hierarchy shared by every layer.

Each exception carries an ``exit_code`` consumed by the command line
front end: 1 for a failed request, 2 for malformed input, 3 for an
internal inconsistency.
"""


class TrieszError(Exception):
    exit_code = 1


class InputError(TrieszError, ValueError):
    """Malformed or inconsistent input (shapes, files, parameters)."""

    exit_code = 2

    def __init__(self, message, path=None):
        self.path = path
        self.detail = message
        if path:
            message = f"{path}: {message}"
        super().__init__(message)


class ShapeMismatch(InputError):
    pass


class UnitalityError(InputError):
    pass


def nest_path(prefix, exc: InputError) -> InputError:
    """Same error with ``prefix`` put in front of its field path."""
    path = f"{prefix}.{exc.path}" if exc.path and not exc.path.startswith("[") else f"{prefix}{exc.path or ''}"
    return type(exc)(exc.detail, path=path)


class SingularResolvent(TrieszError, ArithmeticError):
    def __init__(self, message, condition=float("inf")):
        self.condition = condition
        super().__init__(f"{message} (estimated condition {condition:.3e})")


class RankDeficiency(TrieszError):
    pass


class ClusterGapError(TrieszError):
    pass


class RankDriftError(TrieszError):
    pass


class NotTRiesz(TrieszError):
    pass


class NoWitness(TrieszError):
    pass


class EmptyOmega(TrieszError):
    pass


class Unsupported(TrieszError, NotImplementedError):
    pass


class GenerationError(InputError):
    pass


class TheoremHypothesisViolation(TrieszError):
    """A quantity the theory forces to vanish did not."""

    exit_code = 3
