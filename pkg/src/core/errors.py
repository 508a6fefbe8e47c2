"""
Residua Errors
Exception hierarchy shared by the library and the command line
"""
from typing import Dict, Optional


class ResiduaError(Exception):
    """Base class for every error raised by residua"""


class ValidationError(ResiduaError):
    """Invalid root datum, lattice, parameter labels or document semantics"""


class DocumentSyntaxError(ResiduaError):
    """Malformed input document, with the position of the offending token"""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class BoundExceeded(ResiduaError):
    """A configured enumeration limit was exceeded"""


class CertificationError(ResiduaError):
    """An exact value failed its membership certificate"""


class AccountingError(ResiduaError):
    """Factor bookkeeping went wrong during regularization or splitting"""


class Refutation(ResiduaError):
    """A candidate morphism or order witness failed one of its axioms"""

    def __init__(self, message: str, report: Optional[Dict] = None):
        super().__init__(message)
        self.report = report or {}
