"""Delta, j, E2 and V on the upper half-plane, plus reduction and j-inversion.

Everything works in log scale for Delta: ``log|Delta|`` is assembled from
``-2*pi*Im(tau)`` and the Euler product, so no value of size ``|q|`` is ever
exponentiated back.

Points may be passed as ``complex``, mpmath numbers, :class:`UHPoint` or
:class:`FDPoint`.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import lru_cache

from .errors import DomainTooLow, NoConvergence, PrecisionExhausted
from .numctx import PrecisionContext, make_mp

log = logging.getLogger(__name__)

_SQRT3_2 = math.sqrt(3.0) / 2


@dataclass(frozen=True)
class UHPoint:
    x: object
    y: object

    def __post_init__(self):
        if not self.y > 0:
            raise ValueError(f"Im(tau) must be positive, got {self.y}")

    def tau(self, ctx: PrecisionContext):
        return ctx.mp.mpc(self.x, self.y)


@dataclass(frozen=True)
class FDPoint:
    """A point of the closed fundamental domain and the matrix that put it there."""

    point: UHPoint
    reduced_by: tuple = ((1, 0), (0, 1))

    @property
    def x(self):
        return self.point.x

    @property
    def y(self):
        return self.point.y

    def tau(self, ctx: PrecisionContext):
        return self.point.tau(ctx)


def as_mpc(tau, ctx: PrecisionContext):
    if isinstance(tau, (UHPoint, FDPoint)):
        return tau.tau(ctx)
    return ctx.mp.mpc(tau)


def rho(ctx: PrecisionContext):
    """The corner (-1 + i*sqrt(3))/2."""
    mp = ctx.mp
    return mp.mpc(mp.mpf(-1) / 2, mp.sqrt(3) / 2)


def reduce_fd(tau, ctx: PrecisionContext) -> FDPoint:
    """Move ``tau`` into the canonical fundamental domain.

    Canonical means ``-1/2 <= x < 1/2`` and, on the unit arc, ``x <= 0``
    (both up to ``ctx.fd_tol``).  Intermediate arithmetic runs with extra
    digits to absorb the ``log10(1/Im tau)`` digits lost near the real axis.
    """
    z0 = as_mpc(tau, ctx)
    y0 = z0.imag
    if not y0 > 0:
        raise ValueError(f"Im(tau) must be positive, got {y0}")
    if y0 < ctx.mp.mpf(10) ** -ctx.digits:
        raise PrecisionExhausted(
            f"Im(tau) = {ctx.mp.nstr(y0, 5)} is below 1e-{ctx.digits}; increase digits")
    extra = max(0, math.ceil(-float(ctx.mp.log10(y0)))) + 5
    work = make_mp(ctx.dps + extra)
    z = work.mpc(z0)
    tol = work.mpf(ctx.fd_tol)
    half = work.mpf(1) / 2
    a, b, c, d = 1, 0, 0, 1
    for _ in range(20 * ctx.dps + 100):
        n = int(work.floor(z.real + half))
        if n:
            z -= n
            a, b = a - n * c, b - n * d
        if abs(z) ** 2 < 1 - tol:
            z = -1 / z
            a, b, c, d = -c, -d, a, b
        else:
            break
    else:
        raise PrecisionExhausted("fundamental-domain reduction did not terminate")
    # canonical representative on the boundary
    if z.real > half - tol:
        z -= 1
        a, b = a - c, b - d
    if abs(abs(z) ** 2 - 1) <= tol and z.real > tol:
        z = -1 / z
        a, b, c, d = -c, -d, a, b
    if not z.imag > 0:
        raise PrecisionExhausted("reduced point left the upper half-plane; increase digits")
    mp = ctx.mp
    return FDPoint(UHPoint(mp.mpf(z.real), mp.mpf(z.imag)), ((a, b), (c, d)))


# -- q-series kernels --------------------------------------------------------

def _nterms(y, ctx: PrecisionContext) -> int:
    n = ctx.terms
    y = float(y)
    if y < _SQRT3_2:
        n = math.ceil(n * _SQRT3_2 / y)
    return n


def _euler_product(q, nterms, mp):
    """prod_{n>=1} (1 - q^n) truncated at ``nterms`` (early exit once negligible)."""
    cutoff = mp.eps / 4
    prod = mp.mpf(1)
    qn = mp.mpf(1)
    for _ in range(nterms):
        qn *= q
        if abs(qn) < cutoff:
            break
        prod *= 1 - qn
    return prod


def _lambert_sums(q, nterms, mp, powers):
    """sum_n n^k q^n / (1 - q^n) for each k in ``powers``."""
    kmax = max(powers)
    cutoff = mp.eps / 1000
    sums = {k: mp.mpc(0) for k in powers}
    qn = mp.mpf(1)
    for n in range(1, nterms + 1):
        qn *= q
        if abs(qn) * n ** kmax < cutoff:
            break
        base = qn / (1 - qn)
        for k in powers:
            sums[k] += n ** k * base
    return sums


def log_abs_delta(tau, ctx: PrecisionContext):
    """log|Delta(tau)| with Delta = (2 pi)^12 q prod (1 - q^n)^24.

    ``tau`` should lie in the fundamental domain; no reduction happens here.
    """
    mp = ctx.mp
    z = as_mpc(tau, ctx)
    q = mp.expjpi(2 * z)
    prod = _euler_product(q, _nterms(z.imag, ctx), mp)
    return 12 * mp.log(2 * mp.pi) - 2 * mp.pi * z.imag + 24 * mp.log(abs(prod))


def _forms(z, ctx: PrecisionContext):
    """q, E4, E6 and the Euler product at ``z`` (no reduction)."""
    mp = ctx.mp
    q = mp.expjpi(2 * z)
    n = _nterms(z.imag, ctx)
    s = _lambert_sums(q, n, mp, (3, 5))
    e4 = 1 + 240 * s[3]
    e6 = 1 - 504 * s[5]
    return q, e4, e6, _euler_product(q, n, mp)


def j_eval(tau, ctx: PrecisionContext):
    """Klein's j-invariant, evaluated at the reduced representative."""
    z = reduce_fd(tau, ctx).tau(ctx)
    return _j_raw(z, ctx)


def _j_raw(z, ctx):
    q, e4, _, prod = _forms(z, ctx)
    return e4 ** 3 / (q * prod ** 24)


def e2_eval(tau, ctx: PrecisionContext):
    """Non-holomorphic weight-2 Eisenstein series 1 - 24 sum n q^n/(1-q^n) - 3/(pi y).

    E2 is not modular invariant, so ``tau`` is used as given.
    """
    mp = ctx.mp
    z = as_mpc(tau, ctx)
    if z.imag < mp.mpf(1) / 2:
        raise DomainTooLow(f"e2_eval needs Im(tau) >= 1/2, got {mp.nstr(z.imag, 8)}")
    q = mp.expjpi(2 * z)
    s1 = _lambert_sums(q, _nterms(z.imag, ctx), mp, (1,))[1]
    return 1 - 24 * s1 - 3 / (mp.pi * z.imag)


def v_eval(tau, ctx: PrecisionContext):
    """V(tau) = -(1/12) log(|Delta(tau)| Im(tau)^6), an SL2(Z)-invariant function."""
    mp = ctx.mp
    fd = reduce_fd(tau, ctx)
    z = fd.tau(ctx)
    return -(log_abs_delta(z, ctx) + 6 * mp.log(z.imag)) / 12


# -- inversion of j ------------------------------------------------------------
#
# Newton runs on a chart in which the sought preimage is a simple zero:
#   gamma2 = E4 / eta^8  (gamma2^3 = j),        singular derivative only at i
#   gamma3 = E6 / eta^12 (gamma3^2 = j - 1728),  singular derivative only at rho
# with q d(gamma2)/dq = -E6/(3 eta^8) and q d(gamma3)/dq = -E4^2/(2 eta^12).

def _chart(z, kind, ctx):
    mp = ctx.mp
    q, e4, e6, prod = _forms(z, ctx)
    twopii = 2j * mp.pi
    if kind == 2:
        eta8 = mp.expjpi(2 * z / 3) * prod ** 8
        return e4 / eta8, twopii * (-e6 / (3 * eta8))
    eta12 = mp.expjpi(z) * prod ** 12
    return e6 / eta12, twopii * (-(e4 ** 2) / (2 * eta12))


@lru_cache(maxsize=1)
def _seed_table():
    """64 (tau, j(tau)) pairs covering the left half of the fundamental domain."""
    ctx = PrecisionContext(digits=15, guard_digits=5)
    table = []
    for ix in range(8):
        x = -0.5 + 0.5 * ix / 7
        lo = max(math.sqrt(1 - x * x), _SQRT3_2)
        for iy in range(8):
            y = lo + (1.65 - lo) * (iy + 0.5) / 8
            j = _j_raw(ctx.mp.mpc(x, y), ctx)
            table.append((complex(x, y), complex(j)))
    return tuple(table)


def _seeds(j0, ctx):
    mp = ctx.mp
    seeds = []
    aj = abs(j0)
    if aj > 3500:
        q = 1 / (j0 - 744)
        for _ in range(4):
            q = 1 / (j0 - 744 - 196884 * q - 21493760 * q ** 2)
        seeds.append(mp.log(q) / (2j * mp.pi))
    if aj < 100:
        r = rho(ctx)
        _, d = _chart(r, 2, ctx)
        seeds.append(r + mp.cbrt(j0) / d)
    if abs(j0 - 1728) < 100:
        i = mp.mpc(0, 1)
        _, d = _chart(i, 3, ctx)
        seeds.append(i + mp.sqrt(j0 - 1728) / d)
    jc = complex(j0)
    table = sorted(_seed_table(), key=lambda tj: abs(tj[1] - jc))
    seeds.extend(mp.mpc(t) for t, _ in table[:4])
    return seeds


def _branch(j0, kind, value, mp):
    """The root of j0 (cube root for gamma2, square root of j0-1728 for gamma3) nearest ``value``."""
    if kind == 2:
        c = mp.cbrt(j0)
        cands = [c, c * mp.expjpi(mp.mpf(2) / 3), c * mp.expjpi(mp.mpf(-2) / 3)]
    else:
        c = mp.sqrt(j0 - 1728)
        cands = [c, -c]
    return min(cands, key=lambda w: abs(w - value))


def _newton(j0, seed, ctx, maxiter=80):
    mp = ctx.mp
    kind = 3 if abs(j0 - 1728) < abs(j0) else 2
    z = seed
    val, der = _chart(z, kind, ctx)
    target = _branch(j0, kind, val, mp)
    res = val - target
    scale = max(1, abs(target))
    for _ in range(maxiter):
        if abs(res) <= scale * ctx.eps * 10:
            return z
        if der == 0:
            return None
        step = res / der
        for _ in range(40):
            zn = z - step
            if zn.imag > 0.2:
                vn, dn = _chart(zn, kind, ctx)
                if abs(vn - target) < abs(res) or abs(step) < ctx.newton_tol:
                    break
            step /= 2
        else:
            return None
        z, val, der, res = zn, vn, dn, vn - target
        if abs(step) < ctx.eps * 100 * max(1, abs(z)):
            return z
    return None


def _solve_upper(j0, ctx):
    """Preimage of j0 (Im j0 >= 0) or None."""
    mp = ctx.mp
    bound = max(1, abs(j0)) * mp.mpf(10) ** -(ctx.digits - 3)
    for seed in _seeds(j0, ctx):
        z = _newton(j0, seed, ctx)
        if z is None:
            continue
        fd = reduce_fd(z, ctx)
        if abs(_j_raw(fd.tau(ctx), ctx) - j0) < bound:
            return fd
    return None


def inverse_j(j, ctx: PrecisionContext) -> FDPoint:
    """A point of the canonical fundamental domain with j(tau) = j.

    Values with negative imaginary part are solved through their conjugate
    and mirrored by tau -> -conj(tau).  If Newton fails from every seed, the
    solve is repeated once at twice the digits.
    """
    mp = ctx.mp
    j0 = mp.mpc(j)
    mirror = j0.imag < 0
    if mirror:
        j0 = mp.conj(j0)
    fd = _solve_upper(j0, ctx)
    if fd is None:
        hi = ctx.with_digits(2 * ctx.digits)
        log.info("inverse_j: escalating to %d digits for j=%s", hi.digits, mp.nstr(j0, 10))
        fd = _solve_upper(hi.mp.mpc(j0), hi)
        if fd is None:
            raise NoConvergence(f"could not invert j = {mp.nstr(j0, 15)}")
        fd = reduce_fd(fd.tau(hi), ctx)
    if mirror:
        fd = reduce_fd(-mp.conj(fd.tau(ctx)), ctx)
    return fd
