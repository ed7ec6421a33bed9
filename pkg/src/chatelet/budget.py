"""Work budget shared by every brute-force loop."""

from __future__ import annotations

import os

from .arith import ArithmeticError_

DEFAULT_BUDGET = 1 << 31


class BudgetExceeded(ArithmeticError_):
    """The requested loop is larger than the configured work budget."""

    def __init__(self, what: str, cost: int, budget: int):
        super().__init__(f"{what} needs about {cost} steps, budget is {budget} (set CHATELET_WORK_BUDGET)")
        self.cost = cost
        self.budget = budget


def work_budget() -> int:
    return int(os.environ.get("CHATELET_WORK_BUDGET", DEFAULT_BUDGET))


def check_budget(what: str, cost: int) -> None:
    budget = work_budget()
    if cost > budget:
        raise BudgetExceeded(what, cost, budget)
