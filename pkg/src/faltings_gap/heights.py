"""Weil heights of algebraic j-invariants and the stable Faltings height.

For an irreducible primitive polynomial with leading coefficient a and roots
alpha_1..alpha_n (the conjugates of j):

    h(j)    = (1/n) log a + (1/n) sum log max(1, |alpha_i|)
    h_stab  = (1/12)(1/n) log a + (1/n) sum V(tau_i) + (1/2) log pi,   j(tau_i) = alpha_i
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

from .errors import FaltingsGapError, NegativeInput
from .modular import FDPoint, inverse_j, reduce_fd, rho, v_eval
from .numctx import PrecisionContext, gamma_rat
from .poly import IntPolynomial, check_irreducible, parse_poly, roots_hp

log = logging.getLogger(__name__)

# Silverman's sandwich: C1 from Gaudron-Remond, C2 from the lower bound below
C1_SANDWICH = "0.72"
C2_SANDWICH = "2.071"


def hmin_closed(ctx: PrecisionContext):
    """Deligne's minimum -1/2 log( (Gamma(1/3)/Gamma(2/3))^3 / sqrt(3) )."""
    mp = ctx.mp
    ratio = gamma_rat(1, 3, ctx) / gamma_rat(2, 3, ctx)
    return -mp.log(ratio ** 3 / mp.sqrt(3)) / 2


def hmin_modular(ctx: PrecisionContext):
    """The same minimum as V(rho) + 1/2 log pi."""
    mp = ctx.mp
    return v_eval(rho(ctx), ctx) + mp.log(mp.pi) / 2


class WeilHeight(NamedTuple):
    total: object
    finite: object
    arch: object


def weil_height(poly: IntPolynomial, ctx: PrecisionContext, roots=None) -> WeilHeight:
    """Absolute logarithmic Weil height of a root of ``poly`` (Mahler measure / degree)."""
    check_irreducible(poly)
    mp = ctx.mp
    if roots is None:
        roots = roots_hp(poly, ctx)
    n = poly.degree
    finite = mp.log(poly.leading) / n
    arch = mp.fsum(mp.log(abs(r)) for r in roots if abs(r) > 1) / n
    return WeilHeight(finite + arch, finite, arch)


@dataclass
class RootData:
    root: object
    tau: FDPoint
    v: object


@dataclass
class HeightReport:
    poly: IntPolynomial
    degree: int
    weil_total: object
    weil_finite: object
    weil_arch: object
    faltings_stable: object
    hmin_gap: object
    per_root: list = field(repr=False)
    is_integral_j: bool
    lower_bound_p54: object
    hmin: object = field(repr=False, default=None)
    digits: int = 0


def faltings_stable(poly: IntPolynomial, ctx: PrecisionContext) -> HeightReport:
    """Stable Faltings height of an elliptic curve whose j-invariant has minimal polynomial ``poly``.

    V is evaluated once per conjugate pair; the partner gets the mirrored point.
    """
    mp = ctx.mp
    check_irreducible(poly)
    roots = roots_hp(poly, ctx, check=poly.degree > 1)
    weil = weil_height(poly, ctx, roots=roots)

    per_root = []
    cache = {}
    for r in roots:
        key = (r.real, abs(r.imag))
        if key in cache:
            tau, v = cache[key]
            tau = reduce_fd(-mp.conj(tau.tau(ctx)), ctx)
        else:
            tau = inverse_j(r, ctx)
            v = v_eval(tau, ctx)
            cache[key] = (tau, v)
        per_root.append(RootData(r, tau, v))

    mean_v = mp.fsum(d.v for d in per_root) / poly.degree
    h = weil.finite / 12 + mean_v + mp.log(mp.pi) / 2
    hmin = hmin_closed(ctx)
    return HeightReport(
        poly=poly,
        degree=poly.degree,
        weil_total=weil.total,
        weil_finite=weil.finite,
        weil_arch=weil.arch,
        faltings_stable=h,
        hmin_gap=h - hmin,
        per_root=per_root,
        is_integral_j=poly.is_monic,
        lower_bound_p54=prop54_lower_bound(weil.total, 0, ctx),
        hmin=hmin,
        digits=ctx.digits,
    )


def prop54_lower_bound(h_j, unstable_term, ctx: PrecisionContext):
    """h_j/12 - 1/2 log(1 + h_j) + unstable_term - 2.071, a strict lower bound for h(E/K).

    ``unstable_term`` is (1/(12[K:Q])) log|N(gamma_E/K)|, zero for semistable curves.
    """
    mp = ctx.mp
    h_j = mp.mpf(h_j)
    unstable_term = mp.mpf(unstable_term)
    if h_j < 0 or unstable_term < 0:
        raise NegativeInput("h_j and unstable_term must be non-negative")
    return h_j / 12 - mp.log(1 + h_j) / 2 + unstable_term - mp.mpf(C2_SANDWICH)


def sandwich_middle(report: HeightReport):
    return report.weil_total / 12 - report.faltings_stable


def silverman_sandwich_check(report: HeightReport, ctx: PrecisionContext) -> bool:
    """0.72 <= h(j)/12 - h_stab <= 1/2 log(1 + h(j)) + 2.071."""
    mp = ctx.mp
    mid = sandwich_middle(report)
    upper = mp.log(1 + report.weil_total) / 2 + mp.mpf(C2_SANDWICH)
    return bool(mp.mpf(C1_SANDWICH) <= mid <= upper)


@dataclass
class ScanResult:
    reports: list
    failures: list  # (poly, error) pairs, in input order


def scan_corpus(polys, ctx: PrecisionContext) -> ScanResult:
    """Stable heights for every polynomial, sorted ascending; failures are collected, not raised."""
    reports, failures = [], []
    for p in polys:
        try:
            reports.append(faltings_stable(p, ctx))
        except FaltingsGapError as exc:
            log.warning("scan: %s failed: %s", p, exc)
            failures.append((p, exc))
    reports.sort(key=lambda r: (r.faltings_stable, r.poly.degree, r.poly.coeffs))
    return ScanResult(reports, failures)


def read_corpus(path) -> list:
    """One polynomial expression per line; '#' starts a comment; duplicates dropped."""
    polys, seen = [], set()
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        text = line.split("#", 1)[0].strip()
        if not text:
            continue
        p = parse_poly(text)
        if p.coeffs not in seen:
            seen.add(p.coeffs)
            polys.append(p)
    return polys
