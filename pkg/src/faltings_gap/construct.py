"""Eisenstein polynomials of the shape (X-1)^n + sum 9^k b_k (X-1)^(n-k) with f(0) = p.

For a prime p = (-1)^n + 9m, a root alpha of such an f generates a totally
ramified extension in which (alpha - 1)/9 is integral.  The j = 0 curves
built from alpha have height h_min + log(p)/(3n), which tends to h_min.

All arithmetic here is exact integer arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

from .errors import BadCongruence, NotPrime, OutOfRange
from .numctx import PrecisionContext
from .poly import padd, pmul, ppow


def _isprime(p: int) -> bool:
    from sympy import isprime

    return bool(isprime(p))


@dataclass(frozen=True)
class EisensteinSpec:
    n: int
    p: int

    def __post_init__(self):
        if self.n < 1:
            raise OutOfRange(f"degree n must be >= 1, got {self.n}")
        if self.p < 5 or not _isprime(self.p):
            raise NotPrime(f"p must be a prime >= 5, got {self.p}")
        if (self.p - self.sign) % 9:
            raise BadCongruence(f"p = {self.p} is not {self.sign:+d} mod 9 (needed for n = {self.n})")

    @property
    def sign(self) -> int:
        return -1 if self.n % 2 else 1

    @property
    def m(self) -> int:
        return (self.p - self.sign) // 9


@dataclass(frozen=True)
class EisensteinResult:
    spec: EisensteinSpec
    b: tuple
    f_coeffs: tuple  # low to high, monic
    h0: object = None
    height: object = None


def auto_p(n: int) -> int:
    if n < 1:
        raise OutOfRange(f"degree n must be >= 1, got {n}")
    return 17 if n % 2 else 19


def psi(b, n: int) -> int:
    """sum_k (-1)^(n-k) 9^(k-1) b_k, indices from 1."""
    return sum((-1) ** (n - k) * 9 ** (k - 1) * bk for k, bk in enumerate(b, 1))


def coeffs_from_b(b, n: int) -> list:
    """Monomial coefficients a_0..a_n of (X-1)^n + sum 9^k b_k (X-1)^(n-k).

    a_k here is the coefficient of X^(n-k), so a_0 = 1 and a_n = f(0).
    """
    a = []
    for k in range(n + 1):
        s = comb(n, k) * (-1) ** k
        for j in range(1, k + 1):
            s += 9 ** j * b[j - 1] * comb(n - j, k - j) * (-1) ** (k - j)
        a.append(s)
    return a


def expand_shifted(b, n: int) -> list:
    """The same polynomial expanded term by term, low to high."""
    xm1 = [-1, 1]
    f = ppow(xm1, n)
    for k, bk in enumerate(b, 1):
        f = padd(f, pmul([9 ** k * bk], ppow(xm1, n - k)))
    return f


def _solve_mod_p(spec: EisensteinSpec) -> list:
    """b_1..b_n in [0, p) with a_k = 0 mod p for k < n and psi(b) = m mod p.

    a_k involves b_1..b_k with coefficient 9^k on b_k, so the first n-1
    congruences are solved by forward substitution; psi fixes b_n.
    """
    n, p = spec.n, spec.p
    b = [0] * n
    for k in range(1, n):
        rest = comb(n, k) * (-1) ** k
        for j in range(1, k):
            rest += 9 ** j * b[j - 1] * comb(n - j, k - j) * (-1) ** (k - j)
        b[k - 1] = (-rest * pow(9 ** k, -1, p)) % p
    partial = psi(b[:-1] + [0], n)
    b[n - 1] = ((spec.m - partial) * pow(9 ** (n - 1), -1, p)) % p
    return b


def build_eisenstein(spec: EisensteinSpec, ctx: PrecisionContext | None = None) -> EisensteinResult:
    """An integer b with psi(b) = m and a_1..a_{n-1} divisible by p, and the resulting f."""
    n, p = spec.n, spec.p
    b = _solve_mod_p(spec)
    a = coeffs_from_b(b, n)
    assert all(a[k] % p == 0 for k in range(1, n)), "congruence solve failed"
    # psi(b) = m mod p; shifting b_1 by a multiple of p makes it exact
    # and leaves every a_k unchanged mod p
    diff = spec.m - psi(b, n)
    assert diff % p == 0
    b[0] += (-1) ** (n - 1) * diff
    f = tuple(reversed(coeffs_from_b(b, n)))
    h0 = height = None
    if ctx is not None:
        h0, height = _heights(n, p, ctx)
    return EisensteinResult(spec, tuple(b), f, h0, height)


def verify_eisenstein(result: EisensteinResult) -> bool:
    """Check every invariant of the construction exactly."""
    spec, b, f = result.spec, list(result.b), list(result.f_coeffs)
    n, p = spec.n, spec.p
    if len(b) != n or len(f) != n + 1 or f[-1] != 1:
        return False
    if expand_shifted(b, n) != f:
        return False
    if list(reversed(coeffs_from_b(b, n))) != f:
        return False
    if f[0] != p or psi(b, n) != spec.m:
        return False
    # Eisenstein at p
    if any(c % p for c in f[:-1]) or f[0] % (p * p) == 0:
        return False
    # f(9Y + 1) = 9^n g(Y) with g monic integral
    shifted = [f[-1]]
    for c in reversed(f[:-1]):
        shifted = padd(pmul(shifted, [1, 9]), [c])
    return shifted[-1] == 9 ** n and all(c % 9 ** n == 0 for c in shifted)


def _heights(n, p, ctx):
    from .heights import hmin_closed

    mp = ctx.mp
    h0 = mp.log(p) / (3 * n)
    return h0, hmin_closed(ctx) + h0


@dataclass
class FamilyMember:
    n: int
    p: int
    h0: object
    height: object
    constructed: bool


def family_heights(n_max: int, ctx: PrecisionContext, p: int | None = None) -> list:
    """Heights h_min + log(p)/(3n) for n = 1..n_max, each backed by a verified construction.

    With an explicit ``p`` the congruence p = (-1)^n mod 9 holds only for one
    parity of n; for the other parity the formula value is still listed but
    ``constructed`` is False.
    """
    if n_max < 1:
        raise OutOfRange(f"n_max must be >= 1, got {n_max}")
    out = []
    for n in range(1, n_max + 1):
        prime = auto_p(n) if p is None else p
        h0, height = _heights(n, prime, ctx)
        try:
            res = build_eisenstein(EisensteinSpec(n, prime))
            ok = verify_eisenstein(res)
        except BadCongruence:
            if p is None:
                raise
            ok = False
        out.append(FamilyMember(n, prime, h0, height, ok))
    return out
