"""Grid certification of the inequalities and identities used in the height bounds.

Each check samples both sides of an inequality on a grid at full working
precision and records every violation together with the smallest margin
(rhs - lhs, oriented so that positive means "holds").  These are
high-confidence numerical checks, not proofs.

Lemma identifiers:

    fp_i    |j(tau)| <= j(i Im tau)                         on the fundamental domain
    fp_ii   j(iy) <= exp(2 pi y) + 1193                     for y in [1, y_max]
    fp_iii  Im tau <= 3/2 log max(e, |j(tau)|)              on the fundamental domain
    l53     log+ |j(tau)| <= 2 pi Im tau + 7.09             on the fundamental domain
    l54     log |Delta(tau)| < -2 pi Im tau + 22.16         on the fundamental domain
    bilu    |j(tau)| <= 47000 |tau - rho|^3                 for |tau - rho| <= 0.001 (and at rho + 1)
    e2id    grad V = (pi/6)(Im E2, Re E2), and E2 real on x in {-1/2, 0, 1/2}
    vmono   V(tau) >= V(-1/2 + i Im tau), and V(-1/2 + iy) increasing in y
    l64     V(tau) - V(rho) >= C(delta')                    outside the delta-balls at the corners
    r61     x/12 - 1/2 log(1 + x) increasing on [5, 100], > 1.323 from 37.84 on
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .errors import OutOfRange, UnknownLemma
from .gap import c_of_delta_prime, delta_prime
from .modular import _j_raw, e2_eval, log_abs_delta, rho, v_eval
from .numctx import PrecisionContext

log = logging.getLogger(__name__)

LEMMAS = ("fp_i", "fp_ii", "fp_iii", "l53", "l54", "bilu", "e2id", "vmono", "l64", "r61")

BILU_RADIUS = "0.001"
BILU_CONST = 47000
LOG_1193_BOUND = "7.09"
DELTA_BOUND = "22.16"
R61_START = "37.84"
R61_LEVEL = "1.323"


@dataclass(frozen=True)
class GridSpec:
    nx: int = 100
    ny: int = 100
    y_max: object = 5
    exclusion_delta: object = 0

    def __post_init__(self):
        if self.nx < 2 or self.ny < 2:
            raise OutOfRange(f"grid needs nx, ny >= 2, got {self.nx}x{self.ny}")
        if not float(self.y_max) > 1:
            raise OutOfRange(f"y_max must exceed 1, got {self.y_max}")
        if float(self.exclusion_delta) < 0:
            raise OutOfRange("exclusion_delta must be non-negative")


@dataclass
class CertResult:
    lemma_id: str
    points_checked: int
    violations: list
    min_margin: object
    passed: bool
    details: list = field(default_factory=list)


class _Tally:
    """Accumulates margins and violations in grid order."""

    def __init__(self, ctx: PrecisionContext):
        self.mp = ctx.mp
        self.rel = ctx.mp.mpf(10) ** -(ctx.digits - 5)
        self.count = 0
        self.violations = []
        self.min_margin = None

    def _margin(self, m):
        if self.min_margin is None or m < self.min_margin:
            self.min_margin = m

    def le(self, point, lhs, rhs):
        """lhs <= rhs, up to rounding relative to the size of the operands."""
        self.count += 1
        m = rhs - lhs
        self._margin(m)
        if m < -self.rel * max(1, abs(lhs), abs(rhs)):
            self.violations.append((point, lhs, rhs))

    def lt(self, point, lhs, rhs):
        self.count += 1
        m = rhs - lhs
        self._margin(m)
        if not m > 0:
            self.violations.append((point, lhs, rhs))

    def result(self, lemma_id, details=()):
        return CertResult(lemma_id, self.count, self.violations, self.min_margin,
                          not self.violations, list(details))


def fd_grid(grid: GridSpec, ctx: PrecisionContext):
    """nx columns uniform in x over [-1/2, 1/2]; in each, ny rows uniform from the lower boundary to y_max."""
    mp = ctx.mp
    floor = mp.sqrt(3) / 2
    ymax = mp.mpf(grid.y_max)
    for i in range(grid.nx):
        x = -mp.mpf(1) / 2 + mp.mpf(i) / (grid.nx - 1)
        lo = max(mp.sqrt(1 - x * x), floor)
        for k in range(grid.ny):
            yield mp.mpc(x, lo + (ymax - lo) * k / (grid.ny - 1))


def _line(a, b, n, mp):
    a, b = mp.mpf(a), mp.mpf(b)
    return [a + (b - a) * k / (n - 1) for k in range(n)]


def _in_closed_fd(z, mp, tol):
    return abs(z.real) <= mp.mpf(1) / 2 + tol and abs(z) ** 2 >= 1 - tol


# -- the individual lemmas -----------------------------------------------------

def _fp_i(grid, ctx):
    mp = ctx.mp
    t = _Tally(ctx)
    for z in fd_grid(grid, ctx):
        t.le(z, abs(_j_raw(z, ctx)), _j_raw(mp.mpc(0, z.imag), ctx).real)
    return t


def _fp_ii(grid, ctx):
    mp = ctx.mp
    t = _Tally(ctx)
    for y in _line(1, grid.y_max, grid.nx * grid.ny, mp):
        t.le(mp.mpc(0, y), _j_raw(mp.mpc(0, y), ctx).real, mp.exp(2 * mp.pi * y) + 1193)
    return t


def _fp_iii(grid, ctx):
    mp = ctx.mp
    t = _Tally(ctx)
    for z in fd_grid(grid, ctx):
        t.le(z, z.imag, mp.mpf(3) / 2 * mp.log(max(mp.e, abs(_j_raw(z, ctx)))))
    return t


def _l53(grid, ctx):
    mp = ctx.mp
    t = _Tally(ctx)
    c = mp.mpf(LOG_1193_BOUND)
    for z in fd_grid(grid, ctx):
        aj = abs(_j_raw(z, ctx))
        logplus = mp.log(aj) if aj > 1 else mp.zero
        t.le(z, logplus, 2 * mp.pi * z.imag + c)
    return t


def _l54(grid, ctx):
    mp = ctx.mp
    t = _Tally(ctx)
    c = mp.mpf(DELTA_BOUND)
    for z in fd_grid(grid, ctx):
        t.lt(z, log_abs_delta(z, ctx), -2 * mp.pi * z.imag + c)
    return t


def _bilu(grid, ctx):
    """Polar grid of radius 0.001 around rho and rho + 1, clipped to the closed domain."""
    mp = ctx.mp
    t = _Tally(ctx)
    r0 = rho(ctx)
    rmax = mp.mpf(BILU_RADIUS)
    tol = ctx.fd_tol
    for centre in (r0, r0 + 1):
        for i in range(1, grid.nx + 1):
            r = rmax * i / grid.nx
            for k in range(grid.ny):
                z = centre + r * mp.expjpi(2 * mp.mpf(k) / grid.ny)
                if not _in_closed_fd(z, mp, tol):
                    continue
                t.le(z, abs(_j_raw(z, ctx)), BILU_CONST * abs(z - centre) ** 3)
    return t


def _fd_step(ctx):
    return ctx.mp.mpf(10) ** -(ctx.digits // 3)


def fd_identity_residuals(points, ctx: PrecisionContext):
    """For each point: |dV/dx - (pi/6) Im E2|, |dV/dy - (pi/6) Re E2| and the bound 10 h^2.

    Derivatives are central differences with step h = 10^-(digits/3).
    """
    mp = ctx.mp
    h = _fd_step(ctx)
    bound = 10 * h * h
    out = []
    for z in points:
        z = mp.mpc(z)
        dvx = (v_eval(z + h, ctx) - v_eval(z - h, ctx)) / (2 * h)
        dvy = (v_eval(z + 1j * h, ctx) - v_eval(z - 1j * h, ctx)) / (2 * h)
        e2 = e2_eval(z, ctx)
        out.append((abs(dvx - mp.pi / 6 * e2.imag), abs(dvy - mp.pi / 6 * e2.real), bound))
    return out


def _e2id(grid, ctx):
    mp = ctx.mp
    t = _Tally(ctx)
    pts = list(fd_grid(grid, ctx))
    for z, (rx, ry, bound) in zip(pts, fd_identity_residuals(pts, ctx)):
        t.lt(z, max(rx, ry), bound)
    real_bound = mp.mpf(10) ** -(ctx.digits - 5)
    for x in (-mp.mpf(1) / 2, mp.zero, mp.mpf(1) / 2):
        for y in _line(mp.sqrt(3) / 2, grid.y_max, grid.ny, mp):
            z = mp.mpc(x, y)
            t.lt(z, abs(e2_eval(z, ctx).imag), real_bound)
    return t


def e2_zero_on_left_edge(ctx: PrecisionContext, y_max=5, samples=400):
    """The y at which E2(-1/2 + iy) changes sign, with the number of sign changes seen on the scan.

    The scan covers 1/2 < y <= y_max; y = 1/2 itself is excluded because E2
    vanishes there exactly (it is an image of i).
    """
    mp = ctx.mp
    f = lambda y: e2_eval(mp.mpc(-mp.mpf(1) / 2, y), ctx).real
    ys = _line(mp.mpf(1) / 2, y_max, samples + 1, mp)[1:]
    vals = [f(y) for y in ys]
    changes = [k for k in range(samples - 1) if (vals[k] > 0) != (vals[k + 1] > 0)]
    if not changes:
        return None, 0
    k = changes[0]
    root = mp.findroot(f, (ys[k], ys[k + 1]), solver="anderson")
    return root, len(changes)


def _v_fd(z, ctx):
    """V at a point already in the fundamental domain (skips reduction)."""
    mp = ctx.mp
    return -(log_abs_delta(z, ctx) + 6 * mp.log(z.imag)) / 12


def _vmono(grid, ctx):
    mp = ctx.mp
    t = _Tally(ctx)
    half = -mp.mpf(1) / 2
    edge = {}
    for z in fd_grid(grid, ctx):
        y = z.imag
        if y not in edge:
            edge[y] = v_eval(mp.mpc(half, y), ctx)
        t.le(z, edge[y], _v_fd(z, ctx))
    # strict increase along x = -1/2, measured as a difference quotient
    ys = _line(mp.sqrt(3) / 2 + mp.mpf("1e-4"), grid.y_max, grid.nx * grid.ny // 10, mp)
    prev = None
    for y in ys:
        v = v_eval(mp.mpc(half, y), ctx)
        if prev is not None:
            t.lt(mp.mpc(half, y), mp.zero, (v - prev[1]) / (y - prev[0]))
        prev = (y, v)
    return t


def _l64(grid, ctx):
    mp = ctx.mp
    delta = mp.mpf(grid.exclusion_delta)
    if not 0 < delta < mp.mpf(1) / 2:
        raise OutOfRange("l64 needs 0 < exclusion_delta < 1/2 (use --delta)")
    c = c_of_delta_prime(delta_prime(delta, ctx), ctx)
    r0 = rho(ctx)
    v_rho = _v_fd(r0, ctx)
    t = _Tally(ctx)
    for z in fd_grid(grid, ctx):
        if abs(z - r0) <= delta or abs(z - r0 - 1) <= delta:
            continue
        t.le(z, c, _v_fd(z, ctx) - v_rho)
    return t


def _r61(grid, ctx):
    mp = ctx.mp
    t = _Tally(ctx)
    f = lambda x: x / 12 - mp.log1p(x) / 2
    start, level = mp.mpf(R61_START), mp.mpf(R61_LEVEL)
    xs = sorted(set(_line(5, 100, grid.nx * grid.ny, mp)) | {start})
    prev = None
    for x in xs:
        fx = f(x)
        if prev is not None:
            t.lt(x, mp.zero, (fx - prev[1]) / (x - prev[0]))
        if x >= start:
            t.le(x, level, fx)
        prev = (x, fx)
    return t


_CHECKS = {
    "fp_i": _fp_i, "fp_ii": _fp_ii, "fp_iii": _fp_iii, "l53": _l53, "l54": _l54,
    "bilu": _bilu, "e2id": _e2id, "vmono": _vmono, "l64": _l64, "r61": _r61,
}


def certify(lemma_id: str, grid: GridSpec | None = None, ctx: PrecisionContext | None = None) -> CertResult:
    if lemma_id not in _CHECKS:
        raise UnknownLemma(f"unknown lemma {lemma_id!r}; choose from {', '.join(LEMMAS)}")
    grid = grid or GridSpec()
    ctx = ctx or PrecisionContext(digits=30)
    tally = _CHECKS[lemma_id](grid, ctx)
    res = tally.result(lemma_id)
    log.info("certify %s: %d points, %d violations, min margin %s", lemma_id,
             res.points_checked, len(res.violations), ctx.mp.nstr(res.min_margin, 6))
    return res


def derived_constants_check(ctx: PrecisionContext | None = None) -> CertResult:
    """Inequalities between pure constants; ``details`` lists (name, value, bound, margin)."""
    ctx = ctx or PrecisionContext(digits=30)
    mp = ctx.mp
    pi = mp.pi
    items = [
        ("log 1193", mp.log(1193), mp.mpf(LOG_1193_BOUND)),
        ("exp(4 pi/sqrt 3) + 1193", mp.exp(4 * pi / mp.sqrt(3)) + 1193, mp.mpf(2609)),
        ("24 (1/(1 - exp(-sqrt3 pi)) - 1) + 12 log 2 pi",
         24 * (1 / (1 - mp.exp(-mp.sqrt(3) * pi)) - 1) + 12 * mp.log(2 * pi), mp.mpf(DELTA_BOUND)),
        ("29.25 + 6 * 0.41 - 6 log pi", mp.mpf("29.25") + 6 * mp.mpf("0.41") - 6 * mp.log(pi), mp.mpf("24.85")),
        ("log 1.5", mp.log(mp.mpf("1.5")), mp.mpf("0.41")),
    ]
    t = _Tally(ctx)
    details = []
    for name, value, bound in items:
        t.lt(name, value, bound)
        details.append((name, value, bound, bound - value))
    return t.result("constants", details)
