"""Primitive integer polynomials: parsing, cyclotomics, exact tests, roots.

Coefficient lists are always ordered from the constant term upwards.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import reduce

from .errors import (NoConvergence, NonIntegerCoefficient, NotSquarefree, ParseError,
                     Reducible, ZeroPolynomial)
from .numctx import PrecisionContext, make_mp


def _normalize(coeffs):
    c = [int(a) for a in coeffs]
    while c and c[-1] == 0:
        c.pop()
    if not c:
        raise ZeroPolynomial("the zero polynomial has no height")
    g = reduce(math.gcd, c)
    if c[-1] < 0:
        g = -g
    return tuple(a // g for a in c)


@dataclass(frozen=True)
class IntPolynomial:
    """A primitive integer polynomial with positive leading coefficient."""

    coeffs: tuple

    def __post_init__(self):
        c = tuple(int(a) for a in self.coeffs)
        object.__setattr__(self, "coeffs", c)
        if len(c) < 2:
            raise ValueError("need a polynomial of degree >= 1")
        if c[-1] <= 0:
            raise ValueError("leading coefficient must be positive")
        if reduce(math.gcd, c) != 1:
            raise ValueError("coefficients must have content 1")

    @classmethod
    def from_coeffs(cls, coeffs) -> "IntPolynomial":
        """Strip, make primitive and sign-normalize before building."""
        c = _normalize(coeffs)
        if len(c) < 2:
            raise ParseError(f"constant polynomial {int(coeffs[0])} has no roots")
        return cls(c)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> int:
        return self.coeffs[-1]

    @property
    def is_monic(self) -> bool:
        return self.leading == 1

    def __call__(self, x):
        acc = 0
        for a in reversed(self.coeffs):
            acc = acc * x + a
        return acc

    def reversed(self) -> "IntPolynomial":
        """X^n p(1/X), the polynomial of the reciprocal roots."""
        if self.coeffs[0] == 0:
            raise ValueError("X divides the polynomial; 0 has no reciprocal")
        return IntPolynomial.from_coeffs(self.coeffs[::-1])

    def sort_key(self):
        return (self.degree, self.coeffs)

    def __str__(self):
        return format_poly(self.coeffs)


def format_poly(coeffs, var="x") -> str:
    parts = []
    for k in range(len(coeffs) - 1, -1, -1):
        a = coeffs[k]
        if a == 0:
            continue
        sign = "-" if a < 0 else "+"
        mag = abs(a)
        if k == 0:
            body = str(mag)
        else:
            mon = var if k == 1 else f"{var}^{k}"
            body = mon if mag == 1 else f"{mag}*{mon}"
        parts.append((sign, body))
    if not parts:
        return "0"
    head = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    return head + "".join(f" {s} {b}" for s, b in parts[1:])


# -- exact arithmetic on coefficient lists -------------------------------------

def padd(a, b):
    n = max(len(a), len(b))
    return [(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)]


def pmul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def ppow(a, e):
    out = [1]
    for _ in range(e):
        out = pmul(out, a)
    return out


def pdivexact(num, den):
    """Quotient of ``num`` by a monic ``den``; raises if the remainder is non-zero."""
    num = list(num)
    if den[-1] != 1:
        raise ValueError("divisor must be monic")
    dq = len(num) - len(den)
    q = [0] * (dq + 1)
    for k in range(dq, -1, -1):
        c = num[k + len(den) - 1]
        q[k] = c
        for i, d in enumerate(den):
            num[k + i] -= c * d
    if any(num[:len(den) - 1]):
        raise ValueError("division is not exact")
    return q


def cyclotomic(k: int) -> IntPolynomial:
    """Phi_k by exact division of x^k - 1 by Phi_d for the proper divisors d of k."""
    if k < 1:
        raise ValueError("k must be positive")
    num = [-1] + [0] * (k - 1) + [1]
    for d in range(1, k):
        if k % d == 0:
            num = pdivexact(num, cyclotomic(d).coeffs)
    return IntPolynomial(tuple(num))


# -- parsing -----------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+\.\d*|\.\d+)|(\d+)|(\*\*|[-+*^()xX])|(\S))")


def _tokenize(text):
    pos = 0
    tokens = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:  # trailing whitespace
            break
        flt, num, op, bad = m.groups()
        start = m.start(m.lastindex)
        if flt is not None:
            raise NonIntegerCoefficient(f"non-integer literal {flt!r}", start)
        if bad is not None:
            if bad == "/":
                raise NonIntegerCoefficient("division is not supported; coefficients must be integers", start)
            raise ParseError(f"unexpected character {bad!r}", start)
        if num is not None:
            tokens.append(("num", int(num), start))
        else:
            tokens.append(("op", "^" if op == "**" else op.lower(), start))
        pos = m.end()
    tokens.append(("end", None, len(text)))
    return tokens


_BINARY = {"+": (1, "left"), "-": (1, "left"), "*": (2, "left"), "^": (4, "right")}
_UNARY_PREC = 3


class _Parser:
    """Precedence climbing over polynomial values (lists of ints)."""

    def __init__(self, text):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def parse(self):
        value = self.expr(1)
        kind, val, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected {val!r}", pos)
        return value

    def _starts_operand(self, tok):
        kind, val, _ = tok
        return kind == "num" or (kind == "op" and val in ("x", "("))

    def expr(self, min_prec):
        lhs = self.unary()
        while True:
            tok = self.peek()
            kind, op, pos = tok
            explicit = kind == "op" and op in _BINARY
            if explicit:
                prec, assoc = _BINARY[op]
            elif self._starts_operand(tok):
                op, (prec, assoc) = "*", _BINARY["*"]  # implicit product, e.g. 3x^2
            else:
                break
            if prec < min_prec:
                break
            if explicit:
                self.take()
            rhs = self.expr(prec + 1 if assoc == "left" else prec)
            lhs = self.apply(op, lhs, rhs, pos)
        return lhs

    def unary(self):
        kind, val, pos = self.peek()
        if kind == "op" and val in "+-":
            self.take()
            operand = self.expr(_UNARY_PREC)
            return operand if val == "+" else [-a for a in operand]
        return self.atom()

    def atom(self):
        kind, val, pos = self.take()
        if kind == "num":
            return [val]
        if kind == "op" and val == "x":
            return [0, 1]
        if kind == "op" and val == "(":
            inner = self.expr(1)
            k, v, p = self.take()
            if v != ")":
                raise ParseError("expected ')'", p)
            return inner
        if kind == "end":
            raise ParseError("unexpected end of input", pos)
        raise ParseError(f"unexpected {val!r}", pos)

    @staticmethod
    def apply(op, a, b, pos):
        if op == "+":
            return padd(a, b)
        if op == "-":
            return padd(a, [-v for v in b])
        if op == "*":
            return pmul(a, b)
        b = _normalize_trim(b)
        if len(b) > 1:
            raise ParseError("exponent must be a constant", pos)
        e = b[0] if b else 0
        if e < 0:
            raise ParseError("negative exponents are not polynomials", pos)
        return ppow(a, e)


def _normalize_trim(c):
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return c


def parse_poly(text: str) -> IntPolynomial:
    """Parse ``"c0,c1,...,cn"`` or an expression in x with + - * ^ and parentheses."""
    text = text.strip()
    if not text:
        raise ParseError("empty polynomial", 0)
    if "," in text:
        return parse_coeffs(text)
    return IntPolynomial.from_coeffs(_Parser(text).parse())


def parse_coeffs(text: str) -> IntPolynomial:
    """Comma-separated integer coefficients, lowest degree first."""
    coeffs = []
    offset = 0
    for field in text.split(","):
        f = field.strip()
        if not re.fullmatch(r"[-+]?\d+", f):
            if re.fullmatch(r"[-+]?(\d+\.\d*|\.\d+)([eE][-+]?\d+)?", f):
                raise NonIntegerCoefficient(f"non-integer coefficient {f!r}", offset)
            raise ParseError(f"bad coefficient {f!r}", offset)
        coeffs.append(int(f))
        offset += len(field) + 1
    return IntPolynomial.from_coeffs(coeffs)


# -- exact tests (sympy) -------------------------------------------------------

def _sympy_poly(poly: IntPolynomial):
    from sympy import Poly, Symbol
    return Poly(list(reversed(poly.coeffs)), Symbol("x"), domain="ZZ")


def check_squarefree(poly: IntPolynomial) -> None:
    if poly.degree > 1 and not _sympy_poly(poly).is_sqf:
        raise NotSquarefree(f"{poly} has a repeated factor")


def check_irreducible(poly: IntPolynomial) -> None:
    if poly.degree == 1:
        return
    _, factors = _sympy_poly(poly).factor_list()
    if len(factors) != 1 or factors[0][1] != 1:
        shown = " * ".join(f"({format_poly(f.all_coeffs()[::-1])})^{e}" for f, e in factors)
        raise Reducible(f"{poly} factors as {shown}")


# -- roots -------------------------------------------------------------------------

def _horner2(coeffs, z):
    p = coeffs[-1]
    dp = 0
    for a in reversed(coeffs[:-1]):
        dp = dp * z + p
        p = p * z + a
    return p, dp


def _aberth(coeffs, mp, init, maxiter=500):
    z = [mp.mpc(v) for v in init]
    n = len(z)
    tol = mp.eps * 64
    for _ in range(maxiter):
        worst = 0
        for k in range(n):
            p, dp = _horner2(coeffs, z[k])
            if p == 0:
                continue
            ratio = p / dp if dp != 0 else mp.mpc(1)
            repulse = sum(1 / (z[k] - z[m]) for m in range(n) if m != k)
            w = ratio / (1 - ratio * repulse)
            z[k] -= w
            worst = max(worst, abs(w) / max(1, abs(z[k])))
        if worst < tol:
            return z
    raise NoConvergence("Aberth iteration did not converge")


def _newton_polish(coeffs, z, mp, real):
    for _ in range(100):
        p, dp = _horner2(coeffs, z)
        if dp == 0:
            break
        step = p / dp
        if real:
            step = mp.re(step)
        z -= step
        if abs(step) <= 8 * mp.eps * max(1, abs(z)):
            break
    return z


def _pair_conjugates(approx, mp):
    """Split into real roots and upper-half roots, checking conjugate symmetry."""
    reals, uppers, lowers = [], [], []
    for z in approx:
        if abs(z.imag) <= mp.mpf(10) ** -12 * max(1, abs(z)):
            reals.append(mp.re(z))
        elif z.imag > 0:
            uppers.append(z)
        else:
            lowers.append(z)
    if len(uppers) != len(lowers):
        raise NoConvergence("root approximations are not conjugate-symmetric")
    for u in uppers:
        partner = min(lowers, key=lambda w: abs(w - mp.conj(u)))
        if abs(partner - mp.conj(u)) > mp.mpf(10) ** -10 * max(1, abs(u)):
            raise NoConvergence("root approximations are not conjugate-symmetric")
        lowers.remove(partner)
    return reals, uppers


def roots_hp(poly: IntPolynomial, ctx: PrecisionContext, check: bool = True):
    """All complex roots of a squarefree integer polynomial at working precision.

    Aberth iteration at 30 digits gives seeds; each seed is polished by Newton at
    full precision.  Roots of real polynomials come back in exact conjugate
    pairs; the list is sorted by (real part, imaginary part).
    """
    if check:
        check_squarefree(poly)
    mp = ctx.mp
    coeffs = list(poly.coeffs)
    roots = []
    if coeffs[0] == 0:
        roots.append(mp.mpc(0))
        coeffs = coeffs[1:]
    if len(coeffs) == 2:
        roots.append(mp.mpc(mp.mpf(-coeffs[0]) / coeffs[1]))
    elif len(coeffs) > 2:
        roots.extend(_roots_nonlinear(coeffs, ctx))
    _check_residuals(poly, roots, ctx)
    return sorted(roots, key=lambda z: (z.real, z.imag))


def _roots_nonlinear(coeffs, ctx):
    mp = ctx.mp
    n = len(coeffs) - 1
    low = make_mp(30)
    a0, an = abs(coeffs[0]), abs(coeffs[-1])
    r = low.mpf(a0) / an
    r = r ** (low.mpf(1) / n)
    init = [r * low.expjpi(low.mpf(2 * k) / n + low.mpf("0.37")) for k in range(n)]
    seeds = _aberth(coeffs, low, init)
    try:
        reals, uppers = _pair_conjugates(seeds, low)
        reals = [_newton_polish(coeffs, mp.mpf(x), mp, True) for x in reals]
        uppers = [_newton_polish(coeffs, mp.mpc(z), mp, False) for z in uppers]
        polished = reals + uppers
        if not _distinct(polished, mp):
            raise NoConvergence("Newton polishing merged two roots")
    except NoConvergence:
        full = _aberth(coeffs, mp, seeds)
        reals, uppers = _pair_conjugates(full, mp)
    out = [mp.mpc(x) for x in reals]
    for z in uppers:
        out.append(mp.mpc(z))
        out.append(mp.conj(z))
    return out


def _distinct(roots, mp):
    for i in range(len(roots)):
        for k in range(i + 1, len(roots)):
            if abs(roots[i] - roots[k]) < mp.mpf(10) ** -20 * max(1, abs(roots[i])):
                return False
    return True


def _check_residuals(poly, roots, ctx):
    mp = ctx.mp
    tol = mp.mpf(10) ** -(ctx.digits - 5)
    for z in roots:
        scale = sum(abs(a) * max(1, abs(z)) ** k for k, a in enumerate(poly.coeffs))
        if abs(poly(z)) > scale * tol:
            raise NoConvergence(f"root {mp.nstr(z, 10)} of {poly} failed the residual check")
