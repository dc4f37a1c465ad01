from threading import Lock
from typing import Optional

from config import Config
from utils.errors import BudgetExceeded


class SearchBudget:
    """Shared node counter for backtracking searches."""

    def __init__(self, limit: Optional[int] = None):
        self.limit = Config.BUDGET if limit is None else int(limit)
        self.spent = 0
        self._lock = Lock()

    def tick(self, n: int = 1) -> None:
        with self._lock:
            self.spent += n
            if self.spent > self.limit:
                raise BudgetExceeded(self.spent, self.limit)


def ensure_budget(budget: Optional[SearchBudget]) -> SearchBudget:
    """Return the given budget or a fresh default one."""

    return budget if budget is not None else SearchBudget()
