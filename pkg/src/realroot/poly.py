"""Exact univariate polynomials over the rationals, power sums, roots and Sturm counting."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import mpmath

from .errors import ConvergenceError, ImaginaryResidueError, ParseError, RealRootError, ZeroPolynomialError

ROOT_ITERATION_CAP = 200
CLUSTER_RADIUS = 1e-7


def fmt_rational(q: Fraction) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"not a rational number: {text!r}") from exc


class Polynomial:
    """Polynomial with exact rational coefficients, stored in ascending degree."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [Fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    @classmethod
    def from_roots(cls, roots: Iterable) -> "Polynomial":
        p = cls([1])
        for a in roots:
            p = p * cls([-Fraction(a), 1])
        return p

    @property
    def degree(self) -> int:
        # the zero polynomial gets degree -1
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lead(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def require_nonconstant(self) -> None:
        if self.is_zero:
            raise ZeroPolynomialError("the zero polynomial has no roots to analyse")
        if self.degree < 1:
            raise RealRootError("polynomial must have degree >= 1")

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"Polynomial([{', '.join(fmt_rational(c) for c in self.coeffs)}])"

    def __str__(self):
        return self.to_text()

    def __len__(self):
        return len(self.coeffs)

    def coeff(self, i: int) -> Fraction:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else Fraction(0)

    def __add__(self, other: "Polynomial") -> "Polynomial":
        n = max(len(self.coeffs), len(other.coeffs))
        return Polynomial(self.coeff(i) + other.coeff(i) for i in range(n))

    def __neg__(self) -> "Polynomial":
        return Polynomial(-c for c in self.coeffs)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __mul__(self, other) -> "Polynomial":
        if not isinstance(other, Polynomial):
            return Polynomial(c * other for c in self.coeffs)
        if self.is_zero or other.is_zero:
            return Polynomial()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return Polynomial(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Polynomial":
        out = Polynomial([1])
        for _ in range(k):
            out = out * self
        return out

    def __divmod__(self, other: "Polynomial"):
        if other.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = other.degree
        inv_lead = 1 / other.lead
        quot = [Fraction(0)] * max(len(rem) - dq, 0)
        for k in range(len(rem) - 1, dq - 1, -1):
            c = rem[k] * inv_lead
            if c:
                quot[k - dq] = c
                for j, b in enumerate(other.coeffs):
                    rem[k - dq + j] -= c * b
        return Polynomial(quot), Polynomial(rem[:dq])

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def monic(self) -> "Polynomial":
        if self.is_zero:
            raise ZeroPolynomialError("cannot normalise the zero polynomial")
        return self * (1 / self.lead)

    def derivative(self) -> "Polynomial":
        return Polynomial(i * c for i, c in enumerate(self.coeffs) if i > 0)

    def __call__(self, x):
        acc = x * 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def primitive_integer(self) -> tuple[int, ...]:
        """Integer coefficients with gcd 1 and positive leading term, same roots."""
        if self.is_zero:
            return ()
        den = math.lcm(*(c.denominator for c in self.coeffs))
        ints = [int(c * den) for c in self.coeffs]
        g = math.gcd(*ints)
        if ints[-1] < 0:
            g = -g
        return tuple(i // g for i in ints)

    def to_text(self, var: str = "t") -> str:
        if self.is_zero:
            return "0"
        parts = []
        for k in range(self.degree, -1, -1):
            c = self.coeffs[k]
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            mono = "" if k == 0 else (var if k == 1 else f"{var}^{k}")
            if mono and mag == 1:
                body = mono
            elif mono and mag.denominator != 1:
                body = f"({fmt_rational(mag)}){mono}"
            else:
                body = fmt_rational(mag) + mono
            parts.append((sign, body))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out


def gcd(a: Polynomial, b: Polynomial) -> Polynomial:
    """Monic greatest common divisor (zero if both inputs are zero)."""
    while not b.is_zero:
        a, b = b, a % b
    return a if a.is_zero else a.monic()


_COEFF_LIST = re.compile(r"^\s*[-+0-9./\s]+(,[-+0-9./\s]+)*\s*$")


def parse_polynomial(text: str) -> Polynomial:
    """Parse an ascending coefficient list ("-1,0,1") or an expression in one variable ("t^2 - 1")."""
    if text is None or not text.strip():
        raise ParseError("empty polynomial text")
    if _COEFF_LIST.match(text):
        fields = text.split(",")
        if any(not f.strip() for f in fields):
            raise ParseError(f"empty field in coefficient list {text!r}")
        p = Polynomial(parse_rational(f) for f in fields)
    else:
        p = _parse_expression(text)
    if p.is_zero:
        raise ZeroPolynomialError("zero polynomial")
    return p


def _parse_expression(text: str) -> Polynomial:
    import sympy
    from sympy.parsing.sympy_parser import (
        convert_xor,
        implicit_multiplication_application,
        parse_expr,
        standard_transformations,
    )

    transformations = standard_transformations + (implicit_multiplication_application, convert_xor)
    try:
        expr = parse_expr(text, transformations=transformations, evaluate=True)
    except Exception as exc:  # sympy raises a zoo of exception types on bad syntax
        raise ParseError(f"cannot parse polynomial expression {text!r}") from exc
    if not isinstance(expr, sympy.Expr):
        raise ParseError(f"not a polynomial expression: {text!r}")
    symbols = sorted(expr.free_symbols, key=str)
    if len(symbols) > 1:
        raise ParseError(f"expected one indeterminate, found {', '.join(map(str, symbols))}")
    if not symbols:
        if not expr.is_Rational:
            raise ParseError(f"constant is not rational: {text!r}")
        return Polynomial([Fraction(int(expr.p), int(expr.q))])
    try:
        poly = sympy.Poly(expr, symbols[0])
    except sympy.PolynomialError as exc:
        raise ParseError(f"not a polynomial in {symbols[0]}: {text!r}") from exc
    coeffs = []
    for c in reversed(poly.all_coeffs()):
        if not c.is_Rational:
            raise ParseError(f"coefficient {c} is not rational")
        coeffs.append(Fraction(int(c.p), int(c.q)))
    return Polynomial(coeffs)


# ---------------------------------------------------------------- power sums


@dataclass(frozen=True)
class PowerSums:
    values: tuple[Fraction, ...]
    source_degree: int

    def __getitem__(self, k: int) -> Fraction:
        return self.values[k]

    def __len__(self):
        return len(self.values)


def power_sums(f: Polynomial, k_max: int) -> PowerSums:
    """Root power sums p_0..p_k_max of ``f`` via Newton's identities, exactly.

    With the monic normalisation t^n + c_1 t^(n-1) + ... + c_n,
    p_k = -(c_1 p_(k-1) + ... + c_(k-1) p_1 + k c_k) for k <= n and
    p_k = -(c_1 p_(k-1) + ... + c_n p_(k-n)) beyond.
    """
    f.require_nonconstant()
    if k_max < 0:
        raise RealRootError("k_max must be nonnegative")
    g = f.monic()
    n = g.degree
    c = [g.coeffs[n - j] for j in range(n + 1)]  # c[0] == 1
    p = [Fraction(n)]
    for k in range(1, k_max + 1):
        acc = Fraction(0)
        for j in range(1, min(k - 1, n) + 1):
            acc += c[j] * p[k - j]
        if k <= n:
            acc += k * c[k]
        p.append(-acc)
    return PowerSums(tuple(p), n)


# ------------------------------------------------------------------- Sturm


def squarefree_part(f: Polynomial) -> Polynomial:
    f.require_nonconstant()
    return (f // gcd(f, f.derivative())).monic()


def squarefree_decomposition(f: Polynomial) -> list[tuple[Polynomial, int]]:
    """Yun's algorithm: monic pairwise-coprime squarefree g_k with f ~ prod g_k^k."""
    f.require_nonconstant()
    f = f.monic()
    out = []
    fp = f.derivative()
    a = gcd(f, fp)
    b = f // a
    c = fp // a
    d = c - b.derivative()
    k = 1
    while b.degree > 0:
        a = gcd(b, d)
        if a.degree > 0:
            out.append((a, k))
        b = b // a
        c = d // a
        d = c - b.derivative()
        k += 1
    return out


def sturm_chain(g: Polynomial) -> list[Polynomial]:
    chain = [g, g.derivative()]
    while not chain[-1].is_zero:
        chain.append(-(chain[-2] % chain[-1]))
    return chain[:-1]


def _sign_changes(signs: Sequence[int]) -> int:
    nz = [s for s in signs if s]
    return sum(1 for a, b in zip(nz, nz[1:]) if a != b)


def sturm_real_root_count(f: Polynomial) -> tuple[int, int]:
    """(number of distinct real roots, number of distinct roots) of ``f``."""
    g = squarefree_part(f)
    chain = sturm_chain(g)
    at_pos = [1 if s.lead > 0 else -1 for s in chain]
    at_neg = [s if p.degree % 2 == 0 else -s for s, p in zip(at_pos, chain)]
    return _sign_changes(at_neg) - _sign_changes(at_pos), g.degree


# ------------------------------------------------------------- numeric roots


@dataclass(frozen=True)
class RootSpectrum:
    """Distinct roots with multiplicities, conjugate-closed.

    ``exact`` holds the root as a Fraction when it was certified rational,
    otherwise None.
    """

    distinct_roots: tuple[tuple[complex, int], ...]
    residual_bound: float
    exact: tuple[Fraction | None, ...] = ()

    @property
    def degree(self) -> int:
        return sum(m for _, m in self.distinct_roots)

    @property
    def values(self) -> list[complex]:
        return [z for z, _ in self.distinct_roots]

    @property
    def multiplicities(self) -> list[int]:
        return [m for _, m in self.distinct_roots]

    @property
    def is_exact(self) -> bool:
        return bool(self.exact) and all(e is not None for e in self.exact)

    def real_count(self) -> int:
        return sum(1 for z, _ in self.distinct_roots if z.imag == 0)

    def is_real(self) -> bool:
        return all(z.imag == 0 for z, _ in self.distinct_roots)


def _mp_roots(g: Polynomial, prec: int) -> list[complex]:
    with mpmath.workprec(prec):
        cs = [mpmath.mpf(c.numerator) / c.denominator for c in reversed(g.coeffs)]
        roots = mpmath.polyroots(cs, maxsteps=ROOT_ITERATION_CAP, extraprec=2 * prec)
        return [complex(r) for r in roots]


def _factor_roots(g: Polynomial) -> list[tuple[complex, Fraction | None]]:
    if g.degree == 1:
        r = -g.coeffs[0] / g.coeffs[1]
        return [(complex(float(r)), r)]
    try:
        roots = _mp_roots(g, 53)
    except mpmath.libmp.NoConvergence:
        try:
            roots = _mp_roots(g, 113)
        except mpmath.libmp.NoConvergence as exc:
            raise ConvergenceError(f"root iteration did not converge for {g!r}") from exc
    # a rational root p/q of the integer form has q dividing the leading coefficient
    max_den = abs(g.primitive_integer()[-1])
    out = []
    seen = set()
    for z in roots:
        exact = None
        radius = CLUSTER_RADIUS * (1 + abs(z))
        if abs(z.imag) <= radius:
            cand = Fraction(z.real).limit_denominator(max_den)
            if cand not in seen and abs(float(cand) - z.real) <= radius and g(cand) == 0:
                exact = cand
                seen.add(cand)
        out.append((z, exact))
    return out


def _exact_abs_residual(f: Polynomial, z: complex) -> float:
    # |f(z)| for the double z, in exact rational arithmetic
    re_, im_ = Fraction(z.real), Fraction(z.imag)
    ar, ai = Fraction(0), Fraction(0)
    for c in reversed(f.coeffs):
        ar, ai = ar * re_ - ai * im_ + c, ar * im_ + ai * re_
    return math.sqrt(float(ar * ar + ai * ai))


def cluster_roots(raw: Sequence[tuple[complex, int, Fraction | None]]) -> list[tuple[complex, int, Fraction | None]]:
    """Merge nearby roots, snap near-real roots to the axis and enforce exact conjugate pairs."""
    if not raw:
        return []
    radius = CLUSTER_RADIUS * (1 + max(abs(z) for z, _, _ in raw))
    items = []
    for z, m, e in raw:
        if e is not None:
            z = complex(float(e), 0.0)
        elif abs(z.imag) <= radius:
            z = complex(z.real, 0.0)
        items.append([z, m, e])

    merged: list[list] = []
    for z, m, e in sorted(items, key=lambda it: (it[0].real, it[0].imag)):
        for cl in merged:
            if abs(cl[0] - z) <= radius:
                tot = cl[1] + m
                cl[0] = (cl[0] * cl[1] + z * m) / tot
                cl[1] = tot
                cl[2] = cl[2] if cl[2] == e else None
                break
        else:
            merged.append([z, m, e])

    reals = [(complex(z.real, 0.0), m, e) for z, m, e in merged if z.imag == 0]
    upper = [c for c in merged if c[0].imag > 0]
    lower = [c for c in merged if c[0].imag < 0]
    if len(upper) != len(lower):
        raise ImaginaryResidueError("non-real roots do not pair into conjugates")
    pairs = []
    for z, m, _ in sorted(upper, key=lambda c: (-c[0].imag, c[0].real)):
        j = min(range(len(lower)), key=lambda i: abs(lower[i][0] - z.conjugate()))
        w, mw, _ = lower.pop(j)
        if mw != m or abs(w - z.conjugate()) > radius:
            raise ImaginaryResidueError(f"root {z} has no matching conjugate")
        avg = (z + w.conjugate()) / 2
        pairs.append((avg, m))
    out = sorted(reals, key=lambda c: c[0].real)
    for z, m in sorted(pairs, key=lambda c: (c[0].real, -c[0].imag)):
        out.append((z, m, None))
        out.append((z.conjugate(), m, None))
    return out


def numeric_roots(f: Polynomial) -> RootSpectrum:
    """Complex roots of ``f`` in double precision with multiplicities.

    Multiplicities come from an exact squarefree factorisation; each factor's
    simple roots are found numerically, then clustered and symmetrised.
    """
    f.require_nonconstant()
    raw = []
    for g, k in squarefree_decomposition(f):
        for z, e in _factor_roots(g):
            raw.append((z, k, e))
    roots = cluster_roots(raw)
    if sum(m for _, m, _ in roots) != f.degree:
        raise ConvergenceError("root multiplicities do not add up to the degree")
    resid = max(_exact_abs_residual(f, z) for z, _, _ in roots)
    return RootSpectrum(
        tuple((z, m) for z, m, _ in roots),
        resid,
        tuple(e for _, _, e in roots),
    )


def spectrum_from_roots(roots: Iterable[tuple[complex, int]]) -> RootSpectrum:
    """Spectrum from caller-supplied roots (clustered and symmetrised like numeric_roots)."""
    raw = []
    for z, m in roots:
        z = complex(z)
        e = Fraction(z.real) if z.imag == 0 else None
        raw.append((z, int(m), e))
    out = cluster_roots(raw)
    return RootSpectrum(tuple((z, m) for z, m, _ in out), 0.0, tuple(e for _, _, e in out))
