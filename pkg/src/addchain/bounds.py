"""Classical bounds on minimal chain length and the counting-envelope forms.

Evaluates, for a given n: the binary-method upper bound
floor(log2 n) + nu(n) - 1, Brauer's windowed upper bound
min_r (1 + 1/r) log2 n + 2^r - 2, Schoenhage's lower bound
log2 n + log2 nu(n) - 2.13, and Thurber's lower bound
floor(log2 n) + 4 (available when nu(n) >= 9).  Also checks the Scholz
conjecture at desk scale and evaluates the asymptotic envelope
exp(cm +- correction) that brackets the interval counting function in the
critical regime r = c*m/log m.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import floor_log2, nu
from .errors import CapExceeded, DomainError
from .search import SearchConfig, ell

SCHONHAGE_CONSTANT = 2.13
THURBER_MIN_NU = 9
SCHOLZ_MAX_N = 12


@dataclass(frozen=True)
class BoundReport:
    n: int
    nu_n: int
    log2_n: float
    binary_ub: int
    brauer_ub: float
    schonhage_lb: float
    thurber_lb: int | None = None
    actual_ell: int | None = None


@dataclass(frozen=True)
class ScholzReport:
    n: int
    lhs: int
    rhs: int
    holds: bool


@dataclass(frozen=True)
class EnvelopeBounds:
    """Natural-log-scaled envelope for the interval count at r = c*m/log m.

    log_lower < c*m < log_upper always; exponentiate only when safe.  The
    envelope is asymptotic (valid for large m only), so no containment of
    exact desk-scale counts is implied.
    """

    m: int
    c: float
    epsilon: float
    log_upper: float
    log_lower: float


def bound_report(n: int, actual_ell: int | None = None) -> BoundReport:
    """All classical bounds for n, optionally annotated with the exact length."""
    if n < 2:
        raise ValueError("bound_report needs n >= 2")
    nu_n = nu(n)
    log2_n = math.log2(n)
    binary_ub = floor_log2(n) + nu_n - 1
    brauer_ub = min(
        (1 + 1 / r) * log2_n + (1 << r) - 2 for r in range(1, floor_log2(n) + 1)
    )
    schonhage_lb = log2_n + math.log2(nu_n) - SCHONHAGE_CONSTANT
    thurber_lb = floor_log2(n) + 4 if nu_n >= THURBER_MIN_NU else None
    return BoundReport(
        n=n,
        nu_n=nu_n,
        log2_n=log2_n,
        binary_ub=binary_ub,
        brauer_ub=brauer_ub,
        schonhage_lb=schonhage_lb,
        thurber_lb=thurber_lb,
        actual_ell=actual_ell,
    )


def scholz_check(n: int, config: SearchConfig | None = None) -> ScholzReport:
    """Scholz conjecture instance: ell(2^(n+1) - 1) <= n + ell(n + 1)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > SCHOLZ_MAX_N:
        raise CapExceeded(
            f"scholz_check certified for n <= {SCHOLZ_MAX_N}, got {n}"
        )
    lhs = ell((1 << (n + 1)) - 1, config).ell
    rhs = n + ell(n + 1, config).ell
    return ScholzReport(n=n, lhs=lhs, rhs=rhs, holds=lhs <= rhs)


def envelope(m: int, c: float, epsilon: float) -> EnvelopeBounds:
    """Upper/lower envelope exponents for the interval count at r = c*m/log m."""
    if not 0 < c < math.log(2):
        raise DomainError(f"c must be in (0, log 2), got {c}")
    if epsilon <= 0:
        raise DomainError(f"epsilon must be positive, got {epsilon}")
    if m < 3:
        raise DomainError(f"m must be >= 3 so log log m > 0, got {m}")
    log_m = math.log(m)
    loglog_m = math.log(log_m)
    log_upper = c * m + epsilon * m * loglog_m / log_m
    log_lower = c * m - c * (1 + epsilon) * m * loglog_m / log_m
    return EnvelopeBounds(
        m=m, c=c, epsilon=epsilon, log_upper=log_upper, log_lower=log_lower
    )
