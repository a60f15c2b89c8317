"""Exception hierarchy shared by all pdscatter modules.

Each class maps to a distinct CLI exit code (see cli.EXIT_CODES).
"""


class PdscatterError(Exception):
    """Base class for every error raised by this package."""


class ParseError(PdscatterError):
    """Malformed input file (ragged rows, non-numeric cells, empty file)."""


class DomainError(PdscatterError):
    """Arguments outside the mathematical domain of an operation."""


class ContaminationError(DomainError):
    """Contamination fraction at or beyond the breakdown point 1/2."""


class SingularDirectionError(DomainError):
    """The maximizing projection direction is not unique (point at the center)."""


class DegenerateWeightsError(PdscatterError):
    """All depth weights vanished; the weighted estimator is undefined."""


class NumericError(PdscatterError):
    """Quadrature or root finding failed to converge."""
