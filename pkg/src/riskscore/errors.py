"""
Exception hierarchy for the risk scoring engine
"""
from typing import Optional


class RiskScoreError(Exception):
    """Base class for all engine errors"""

    exit_code = 1

    def __init__(self, message: str, entity: Optional[str] = None):
        self.entity = entity
        if entity:
            message = f"{entity}: {message}"
        super().__init__(message)


class ValidationError(RiskScoreError):
    """Bad scenario content, bad operand or inconsistent reference"""

    exit_code = 1


class SchemaError(ValidationError):
    """Reference to an undeclared variable, term, rule or risk"""


class OutOfRangeError(ValidationError):
    """Value outside its declared universe or admissible interval"""


class NoRuleFiredError(ValidationError):
    """Every output term has zero activation, so no centroid exists"""


class ConsistencyError(ValidationError):
    """Consistency ratio cannot be computed (no random index for n)"""


class ConvergenceError(ValidationError):
    """Power iteration did not reach the requested tolerance"""


class ScenarioParseError(ValidationError):
    """Scenario document is not valid JSON"""

    def __init__(self, message: str, line: int, column: int, entity: Optional[str] = None):
        self.line = line
        self.column = column
        super().__init__(f"{message} (line {line}, column {column})", entity)


class ReportIOError(RiskScoreError):
    """Scenario or input file unreadable, or report directory unwritable"""

    exit_code = 2


class AxiomViolationError(RiskScoreError):
    """Scoring pipeline broke at least one sensitivity axiom"""

    exit_code = 1
