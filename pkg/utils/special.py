# utils/special.py
"""Gamma-function ratios with exact rising-factorial paths."""
import math

import numpy as np
from scipy.special import gammaln, gammasgn

from utils.errors import PoleError

INTEGER_TOL = 1e-12


def _is_pole(x: float) -> bool:
    return x <= 0 and abs(x - round(x)) <= INTEGER_TOL


def rising(y: float, n: int) -> float:
    """Pochhammer symbol y(y+1)…(y+n−1)."""
    return math.prod(y + i for i in range(n)) if n > 0 else 1.0


def gamma_ratio(x: float, y: float) -> float:
    """Γ(x)/Γ(y).

    Integer differences take the product path, Γ(y+n)/Γ(y) = y(y+1)…(y+n−1),
    which stays finite when poles cancel. Otherwise sign·exp(logΓ(x) − logΓ(y)).
    A pole of Γ(y) alone gives 0.
    """
    x, y = float(x), float(y)
    diff = x - y
    n = round(diff)
    if abs(diff - n) <= INTEGER_TOL * max(1.0, abs(x), abs(y)):
        n = int(n)
        if n >= 0:
            return rising(y, n)
        denom = rising(x, -n)
        if denom == 0:
            raise PoleError(f"Γ({x})/Γ({y}): uncancelled pole at {x}")
        return 1.0 / denom
    if _is_pole(x):
        raise PoleError(f"Γ({x})/Γ({y}): uncancelled pole at {x}")
    if _is_pole(y):
        return 0.0
    sign = gammasgn(x) * gammasgn(y)
    return float(sign * np.exp(gammaln(x) - gammaln(y)))
