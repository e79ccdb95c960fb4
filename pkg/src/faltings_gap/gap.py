"""The explicit gap between h_min and the next smallest stable Faltings height.

Pipeline, for a probability-like parameter 0 < P < 1:

    eps(P)   = exp(-37.84 / P)
    delta    = 0.027 * eps^(1/3)
    delta'   = delta/2 * sqrt(1 - delta^2/4) - sqrt(3)/4 * delta^2
    gap(P)   = (1 - P) * C(delta')

C(delta') is a lower bound for V(tau) - V(rho) away from the two corners.
It is of size delta'^2 while its terms are of size delta', so half of the
working digits are lost to cancellation; see :func:`c_of_delta_prime`.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

from .errors import InsufficientPrecision, NotUnimodal, OutOfRange
from .numctx import PrecisionContext, q_rho

log = logging.getLogger(__name__)

EPS_NUM = "37.84"
DELTA_FACTOR = "0.027"
EPS_MAX = "5.08e-5"
GAP_CAP = "0.0007"

DEFAULT_DIGITS = 60
SCAN_POINTS = 2048


def default_ctx() -> PrecisionContext:
    return PrecisionContext(digits=DEFAULT_DIGITS)


def eps_of_p(P, ctx: PrecisionContext):
    mp = ctx.mp
    P = mp.mpf(P)
    if not 0 < P < 1:
        raise OutOfRange(f"P must lie in (0, 1), got {mp.nstr(P, 10)}")
    return mp.exp(-mp.mpf(EPS_NUM) / P)


def delta_of_eps(eps, ctx: PrecisionContext):
    mp = ctx.mp
    eps = mp.mpf(eps)
    if not 0 <= eps <= mp.mpf(EPS_MAX):
        raise OutOfRange(f"eps must lie in [0, {EPS_MAX}], got {mp.nstr(eps, 10)}")
    return mp.mpf(DELTA_FACTOR) * mp.cbrt(eps)


def delta_prime(delta, ctx: PrecisionContext):
    mp = ctx.mp
    d = mp.mpf(delta)
    if not 0 <= d < mp.mpf(1) / 2:
        raise OutOfRange(f"delta must lie in [0, 1/2), got {mp.nstr(d, 10)}")
    return d / 2 * mp.sqrt(1 - d * d / 4) - mp.sqrt(3) / 4 * d * d


def required_digits(dp, ctx: PrecisionContext) -> int:
    """Smallest ``digits`` at which C(dp) keeps at least 15 significant digits."""
    mp = ctx.mp
    dp = mp.mpf(dp)
    if dp == 0:
        return 0
    return int(mp.ceil(-2 * mp.log10(dp))) + 15


def c_of_delta_prime(dp, ctx: PrecisionContext):
    """Lower bound C(dp) for V(tau) - V(rho) outside the delta-balls around the corners.

    With t = exp(-2 pi dp) the last two terms combine into
    -2 q^2 (1 - t^2) / ((1 - q^2)^2 (1 - q^2 t^2)); every factor 1 - t^k is
    taken from expm1 so it keeps full relative accuracy for tiny dp.
    """
    mp = ctx.mp
    dp = mp.mpf(dp)
    if dp < 0:
        raise OutOfRange(f"delta' must be non-negative, got {mp.nstr(dp, 10)}")
    if dp == 0:
        return mp.zero
    need = required_digits(dp, ctx)
    if ctx.digits < need:
        raise InsufficientPrecision(
            f"C({mp.nstr(dp, 5)}) needs digits >= {need}, context has {ctx.digits}")
    q = q_rho(ctx)
    q2, q3 = q * q, q ** 3
    pi = mp.pi
    one_minus_t = -mp.expm1(-2 * pi * dp)
    one_minus_t2 = -mp.expm1(-4 * pi * dp)
    one_minus_t3 = -mp.expm1(-6 * pi * dp)
    terms = [
        pi / 6 * dp,
        -mp.log1p(2 / mp.sqrt(3) * dp) / 2,
        2 * q * one_minus_t / (1 + q),
        2 * q3 * one_minus_t3 / (1 + q3),
        -2 * q2 * one_minus_t2 / ((1 - q2) ** 2 * (1 - q2 * (1 - one_minus_t2))),
    ]
    return mp.fsum(terms)


def gap_fn(P, ctx: PrecisionContext):
    """(1 - P) * C(delta'(delta(eps(P))))."""
    mp = ctx.mp
    P = mp.mpf(P)
    dp = delta_prime(delta_of_eps(eps_of_p(P, ctx), ctx), ctx)
    return (1 - P) * c_of_delta_prime(dp, ctx)


@dataclass
class GapResult:
    p_star: object
    eps: object
    delta: object
    delta_prime: object
    c_value: object
    gap: object
    final_gap: object
    digits_used: int


def _golden_max(f, a, b, tol, mp):
    invphi = (mp.sqrt(5) - 1) / 2
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return (a + b) / 2


def _check_unimodal(values, best):
    """Raise if two separated local maxima of the scan both exceed 0.9 * best."""
    n = len(values)
    peaks = [
        i for i in range(n)
        if values[i] >= 0.9 * best
        and (i == 0 or values[i] >= values[i - 1])
        and (i == n - 1 or values[i] >= values[i + 1])
    ]
    # plateau neighbours count as a single peak
    separated = [i for k, i in enumerate(peaks) if k == 0 or i - peaks[k - 1] > 1]
    if len(separated) > 1:
        raise NotUnimodal(f"coarse scan shows {len(separated)} separated maxima at indices {separated}")


def maximize_gap(ctx: PrecisionContext | None = None, p_lo="0.5", p_hi="0.9999", tol_p="1e-6") -> GapResult:
    """Maximize gap_fn on [p_lo, p_hi]: uniform coarse scan, then golden-section refinement."""
    ctx = ctx or default_ctx()
    mp = ctx.mp
    lo, hi, tol = mp.mpf(p_lo), mp.mpf(p_hi), mp.mpf(tol_p)
    if not 0 < lo < hi < 1:
        raise OutOfRange(f"need 0 < p_lo < p_hi < 1, got [{mp.nstr(lo, 10)}, {mp.nstr(hi, 10)}]")
    if tol <= 0:
        raise OutOfRange("tol_p must be positive")

    if hi - lo <= tol:
        p_star = lo
    else:
        step = (hi - lo) / (SCAN_POINTS - 1)
        grid = [lo + k * step for k in range(SCAN_POINTS)]
        values = [gap_fn(p, ctx) for p in grid]
        k = max(range(SCAN_POINTS), key=values.__getitem__)
        _check_unimodal(values, values[k])
        a = grid[max(k - 1, 0)]
        b = grid[min(k + 1, SCAN_POINTS - 1)]
        p_star = _golden_max(lambda p: gap_fn(p, ctx), a, b, tol, mp)
        log.debug("maximize_gap: scan peak at %s, refined to %s", mp.nstr(grid[k], 8), mp.nstr(p_star, 12))

    eps = eps_of_p(p_star, ctx)
    delta = delta_of_eps(eps, ctx)
    dp = delta_prime(delta, ctx)
    c_value = c_of_delta_prime(dp, ctx)
    gap = (1 - p_star) * c_value
    return GapResult(
        p_star=p_star,
        eps=eps,
        delta=delta,
        delta_prime=dp,
        c_value=c_value,
        gap=gap,
        final_gap=min(mp.mpf(GAP_CAP), gap),
        digits_used=ctx.digits,
    )
