#!/usr/bin/env python3
"""
Spraylab exception hierarchy

Library code raises these; the CLI maps them to exit codes:
    InvalidInputError -> 2
    NumericalFailure  -> 3
"""

from typing import List, Optional


class SprayLabError(Exception):
    """Base class for all toolkit errors"""


class InvalidInputError(SprayLabError, ValueError):
    """Malformed or inconsistent input (dimensions, index sets, configs)"""


class ConfigError(InvalidInputError):
    """Config failed validation; carries every violation found"""

    def __init__(self, violations: List[str], path: Optional[str] = None):
        self.violations = list(violations)
        self.path = path
        where = f" in {path}" if path else ""
        lines = "\n".join(f"  - {v}" for v in self.violations)
        super().__init__(f"{len(self.violations)} violation(s){where}:\n{lines}")


class ExprSyntaxError(InvalidInputError):
    """Expression source could not be parsed"""

    def __init__(self, message: str, offset: int, source: str = ""):
        self.offset = offset
        self.source = source
        super().__init__(f"{message} at offset {offset}")


class UnknownIdentifierError(ExprSyntaxError):
    """Identifier is neither a variable nor a known function"""


class VariableRangeError(ExprSyntaxError):
    """Variable index exceeds the coordinate dimension"""


class PreconditionError(InvalidInputError):
    """Operation refused because its precondition does not hold"""


class EvaluationDomainError(SprayLabError, ArithmeticError):
    """Expression evaluation left its domain (division by zero, sqrt of negative)"""

    def __init__(self, message: str, subexpression: str):
        self.subexpression = subexpression
        super().__init__(f"{message}: {subexpression}")


class NumericalFailure(SprayLabError, RuntimeError):
    """Integration stopped before the requested end time"""

    def __init__(self, message: str, reached_time: float, partial=None):
        self.reached_time = reached_time
        self.partial = partial
        super().__init__(f"{message} (reached t={reached_time:.6g})")


class BlowUpError(NumericalFailure):
    """State became non-finite or exceeded the blow-up bound"""


class DomainExitError(NumericalFailure):
    """Velocity fell into the zero section (||y|| below threshold)"""
