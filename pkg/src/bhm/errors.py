"""Exception types shared across the package."""


class DimensionMismatch(ValueError):
    """Operands have incompatible lengths or dimensions."""


class BudgetExceeded(RuntimeError):
    """An exact enumeration or table would exceed its configured budget."""
