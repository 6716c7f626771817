from typing import Any, Dict, Optional, Sequence


class LabError(Exception):
    exit_code = 2


class EmbeddingInconsistent(LabError, ValueError):
    pass


class CutIsWholeGraph(LabError, ValueError):
    pass


class ReconstructionInvalid(LabError):
    pass


class GluingNotPlanar(LabError):
    pass


class UndefinedForDepth(LabError, ValueError):
    pass


class NoSuchCycle(LabError):
    pass


class NoSimplicialVertex(LabError, ValueError):
    pass


class NotApplicable(LabError, ValueError):
    pass


class ConstructionFailed(LabError):
    pass


class BaseCaseUnverified(LabError):
    pass


class InvalidCrossEdge(LabError, ValueError):
    pass


class ReductionUnsound(LabError):
    pass


class VerificationFailed(LabError):
    pass


class BudgetExceeded(LabError):
    """Search stopped by its node or wall-clock limit.

    The best verified value found so far travels with the exception and is a
    lower bound for maximisation searches (never a proof of optimality).
    """

    exit_code = 3

    def __init__(self, message: str, best_bound: Optional[Any] = None,
                 best_witness: Optional[Sequence[Any]] = None, nodes: int = 0, seconds: float = 0.0):
        super().__init__(message)
        self.best_bound = best_bound
        self.best_witness = tuple(best_witness) if best_witness is not None else None
        self.nodes = nodes
        self.seconds = seconds


class NotFoundWithinBudget(LabError):
    exit_code = 3

    def __init__(self, message: str, statistics: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.statistics = dict(statistics or {})


def error_payload(exc: BaseException) -> Dict[str, Any]:
    exit_code = getattr(exc, 'exit_code', 2)
    payload: Dict[str, Any] = {
        "error": type(exc).__name__,
        "message": str(exc),
        "exit_code": exit_code,
    }
    if isinstance(exc, BudgetExceeded):
        best = exc.best_bound
        payload["best_bound"] = str(best) if best is not None else None
        payload["nodes"] = exc.nodes
    if isinstance(exc, NotFoundWithinBudget):
        payload["statistics"] = exc.statistics
    return payload
