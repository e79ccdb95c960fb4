"""Working-precision contract, constants and Gamma at small rational arguments.

All arithmetic goes through a private :class:`mpmath.ctx_mp.MPContext` owned by
a :class:`PrecisionContext`, so no operation touches mpmath's global ``mp``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

from mpmath.ctx_mp import MPContext

from .errors import UnsupportedArgument

# |q| <= exp(-pi*sqrt(3)) on the closed fundamental domain
FD_DECAY = math.pi * math.sqrt(3.0)

_GAMMA_ARGS = {(1, 2), (1, 3), (2, 3), (1, 4), (3, 4)}


def make_mp(dps: int) -> MPContext:
    """A fresh mpmath context with ``dps`` decimal digits."""
    mp = MPContext()
    mp.dps = dps
    return mp


@dataclass(frozen=True)
class PrecisionContext:
    """Immutable description of the working precision.

    ``digits`` is the number of decimal digits the caller asks for; every
    computation runs with ``digits + guard_digits``.  ``series_terms`` is the
    truncation order of the q-series on the fundamental domain (``"auto"``
    picks the smallest order whose geometric tail is below the working
    precision).
    """

    digits: int = 40
    guard_digits: int = 10
    series_terms: int | str = "auto"
    fd_tol: object = None
    newton_tol: object = None

    def __post_init__(self):
        if int(self.digits) != self.digits or self.digits < 15:
            raise ValueError(f"digits must be an integer >= 15, got {self.digits!r}")
        if int(self.guard_digits) != self.guard_digits or self.guard_digits < 2:
            raise ValueError(f"guard_digits must be an integer >= 2, got {self.guard_digits!r}")
        if self.series_terms != "auto":
            if not isinstance(self.series_terms, int) or self.series_terms < 1:
                raise ValueError(f"series_terms must be 'auto' or a positive int, got {self.series_terms!r}")
        mp = self.mp
        tol = mp.mpf(10) ** -(self.digits - 5) if self.fd_tol is None else mp.mpf(self.fd_tol)
        object.__setattr__(self, "fd_tol", tol)
        tol = mp.mpf(10) ** -(self.digits - 3) if self.newton_tol is None else mp.mpf(self.newton_tol)
        object.__setattr__(self, "newton_tol", tol)

    @property
    def dps(self) -> int:
        return self.digits + self.guard_digits

    @cached_property
    def mp(self) -> MPContext:
        return make_mp(self.dps)

    @property
    def terms(self) -> int:
        if self.series_terms == "auto":
            return math.ceil(self.dps * math.log(10) / FD_DECAY) + 5
        return self.series_terms

    @property
    def eps(self):
        """Unit roundoff of the working precision."""
        return self.mp.mpf(10) ** -self.dps

    def with_digits(self, digits: int) -> "PrecisionContext":
        return PrecisionContext(digits=digits, guard_digits=self.guard_digits,
                                series_terms=self.series_terms)

    def fmt(self, value, digits: int | None = None) -> str:
        """Decimal text of ``value`` carrying ``digits`` significant digits."""
        return self.mp.nstr(value, digits or self.digits, strip_zeros=False)


def const_pi(ctx: PrecisionContext):
    return +ctx.mp.pi


def q_rho(ctx: PrecisionContext):
    """``exp(-pi*sqrt(3))``, the modulus of q at the corner rho."""
    mp = ctx.mp
    return mp.exp(-mp.pi * mp.sqrt(3))


def _lower_gamma_series(s, mp):
    """Gamma(s) for 0 < s < 1 with an a-priori error bound.

    Splits Gamma(s) = gamma(s, X) + Gamma(s, X).  The lower incomplete part is
    the positive series  X^s e^-X sum_k X^k / (s (s+1) ... (s+k)); the upper
    part is dropped and bounded by X^(s-1) e^-X < e^-X since X > 1.
    Returns ``(value, error_bound)``.
    """
    X = mp.mpf(mp.dps + 5) * mp.log(10)
    tail_upper = mp.exp(-X)
    term = 1 / s
    total = term
    k = 0
    while True:
        k += 1
        term = term * X / (s + k)
        total += term
        ratio = X / (s + k + 1)
        if ratio < 1:
            # remaining terms are dominated by a geometric series
            rest = term * ratio / (1 - ratio)
            if rest < total * mp.eps:
                break
    prefactor = mp.power(X, s) * mp.exp(-X)
    value = prefactor * total
    rounding = value * mp.eps * 4 * (k + 10)
    return value, tail_upper + prefactor * rest + rounding


def gamma_rat(num: int, den: int, ctx: PrecisionContext):
    """Gamma(num/den) for the five arguments 1/2, 1/3, 2/3, 1/4, 3/4."""
    if (num, den) not in _GAMMA_ARGS:
        raise UnsupportedArgument(f"Gamma({num}/{den}) is outside the supported set {sorted(_GAMMA_ARGS)}")
    work = make_mp(ctx.dps + 10)
    value, bound = _lower_gamma_series(work.mpf(num) / den, work)
    assert bound < work.mpf(10) ** -(ctx.dps + 2), "Gamma series error bound too large"
    return ctx.mp.mpf(value)
