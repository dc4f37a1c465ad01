from typing import Any, Optional


class NerveScoutError(Exception):
    """Base class for every error raised by the toolkit."""


class InvalidInput(NerveScoutError, ValueError):
    """Input data or arguments that cannot be processed (exit code 2)."""


class DocumentError(InvalidInput):
    """A document failed to parse, validate, or resolve its references."""

    def __init__(
        self,
        message: str,
        position: Optional[tuple] = None,
        path: Optional[list] = None,
        ref: Optional[str] = None,
    ):
        super().__init__(message)
        self.position = position
        self.path = path or []
        self.ref = ref

    def diagnostic(self) -> dict:
        out: dict[str, Any] = {"message": str(self)}
        if self.position is not None:
            out["line"], out["column"] = self.position
        if self.path:
            out["path"] = [str(p) for p in self.path]
        if self.ref is not None:
            out["ref"] = self.ref
        return out


class PreconditionFailed(InvalidInput):
    """An operation's precondition does not hold on the supplied input."""


class CertificateRejected(InvalidInput):
    """User supplied certificate data failed verification."""


class BudgetExceeded(NerveScoutError):
    """A search ran out of its node budget (exit code 3)."""

    def __init__(self, spent: int, limit: int):
        super().__init__(f"search budget exhausted after {spent} nodes (limit {limit})")
        self.spent = spent
        self.limit = limit


class InternalCheckFailed(NerveScoutError, AssertionError):
    """A self-check that holds by construction was violated."""
