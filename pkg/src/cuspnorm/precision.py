"""Reported-real precision control (counts are exact; only sums are rounded)."""

import os

_ENV = "CUSPNORM_PRECISION"


def default_dps() -> int:
    """Significant digits for reported reals; env CUSPNORM_PRECISION overrides 50."""
    raw = os.environ.get(_ENV)
    if raw is None:
        return 50
    dps = int(raw)
    if dps < 1:
        raise ValueError(f"{_ENV} must be positive, got {raw}")
    return dps
