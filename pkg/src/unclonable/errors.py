"""Exceptions shared across the simulation modules."""


class QueryBudgetExceeded(RuntimeError):
    """An oracle was queried more times than its stage allows."""


class ProtocolViolation(RuntimeError):
    """An adversary touched registers or data it does not own."""
