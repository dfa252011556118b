"""Exception types shared across the package."""

from __future__ import annotations


class CorekitError(Exception):
    """Base class for all corekit errors."""


class PredicateParseError(CorekitError):
    """A requirement predicate does not conform to the predicate grammar."""


class LibraryError(CorekitError):
    """Operator library document failed to parse or validate."""

    def __init__(self, message: str, violations: list[str] | None = None):
        super().__init__(message)
        self.violations = violations or []


class UnknownOperatorError(CorekitError):
    """Operator name is neither a canonical id nor a registered alias."""

    def __init__(self, name: str, suggestions: list[str] | None = None):
        self.name = name
        self.suggestions = suggestions or []
        hint = f" (closest: {', '.join(self.suggestions)})" if self.suggestions else ""
        super().__init__(f"unknown operator: {name!r}{hint}")


class DormantConceptError(CorekitError):
    """Attempted to update a concept that is not active."""


class ConceptParseError(CorekitError):
    """Persisted concept document is corrupted or incomplete."""


class NotFoundError(CorekitError):
    """Requested entry does not exist."""


class ConfigurationError(CorekitError):
    """Invalid engine, store, or backend configuration."""


class BackendError(CorekitError):
    """Model backend failed to produce a response."""


class ScenarioError(CorekitError):
    """Scenario document is malformed."""


class ExpectationError(CorekitError):
    """A scripted scenario expectation did not hold."""

    def __init__(self, turn: int, field: str, message: str):
        self.turn = turn
        self.field = field
        super().__init__(f"turn {turn}, {field}: {message}")
