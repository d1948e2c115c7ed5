from __future__ import annotations


class BudgetExhausted(RuntimeError):
    """Raised by a step function when the evaluation budget is spent."""
