"""The n-ary m-adic forms Phi_m attached to a polynomial.

Phi_m(x) = sum over roots l of (x_1 + x_2 l + ... + x_n l^(n-1))^m.  Collecting
monomials, the coefficient of x^a is multinomial(m; a) * p_K(a), where
K(a) = sum_j a_j (j - 1) and p_K is the K-th root power sum.  That gives an
exact construction from the coefficients alone (``build_form_exact``); the
sum-of-powers expression gives a second, root-based route
(``build_form_from_roots``).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from numbers import Rational
from typing import Iterator, NamedTuple, Sequence

import numpy as np

from .errors import ImaginaryResidueError, ParseError, RealRootError, SchemaError
from .poly import Polynomial, RootSpectrum, fmt_rational, parse_rational, power_sums

IMAG_TOL = 1e-8

Exponents = tuple[int, ...]


def compositions(m: int, n: int) -> Iterator[Exponents]:
    """Exponent vectors of length n summing to m, in descending lex order."""
    if n == 1:
        yield (m,)
        return
    for first in range(m, -1, -1):
        for rest in compositions(m - first, n - 1):
            yield (first,) + rest


@lru_cache(maxsize=64)
def monomial_table(n: int, m: int) -> tuple[tuple[Exponents, int, int], ...]:
    """(alpha, multinomial(m; alpha), K(alpha)) for every degree-m monomial in n variables."""
    fact = [math.factorial(k) for k in range(m + 1)]
    out = []
    for alpha in compositions(m, n):
        mult = fact[m]
        for a in alpha:
            mult //= fact[a]
        out.append((alpha, mult, sum(j * a for j, a in enumerate(alpha))))
    return tuple(out)


@dataclass(frozen=True, eq=False)
class MAdicForm:
    """Homogeneous form of degree ``degree`` in ``nvars`` variables.

    ``terms`` maps exponent vectors to coefficients; coefficients are all
    Fractions when ``field == "rational"`` and all floats when ``"double"``.
    """

    nvars: int
    degree: int
    terms: dict[Exponents, Fraction | float]
    field: str = "rational"

    def __post_init__(self):
        if self.field not in ("rational", "double"):
            raise SchemaError(f"unknown coefficient field {self.field!r}")
        clean = {}
        for alpha, c in self.terms.items():
            if type(alpha) is not tuple:
                alpha = tuple(int(a) for a in alpha)
            if len(alpha) != self.nvars:
                raise SchemaError(f"exponent vector {alpha} has length {len(alpha)}, expected {self.nvars}")
            if min(alpha) < 0 or sum(alpha) != self.degree:
                raise SchemaError(f"term {alpha} is not homogeneous of degree {self.degree}")
            if self.field == "rational":
                c = c if type(c) is Fraction else Fraction(c)
            else:
                c = float(c)
            if c != 0:
                clean[alpha] = c
        object.__setattr__(self, "terms", clean)

    def __eq__(self, other):
        if not isinstance(other, MAdicForm):
            return NotImplemented
        return (self.nvars, self.degree, self.field, self.terms) == (
            other.nvars,
            other.degree,
            other.field,
            other.terms,
        )

    def coeff(self, alpha: Sequence[int]):
        return self.terms.get(tuple(alpha), Fraction(0) if self.field == "rational" else 0.0)

    def to_double(self) -> "MAdicForm":
        return MAdicForm(self.nvars, self.degree, {a: float(c) for a, c in self.terms.items()}, "double")

    def __str__(self):
        return form_to_text(self)

    @cached_property
    def _integer_terms(self) -> tuple[int, list[tuple[Exponents, int]]]:
        den = math.lcm(*(c.denominator for c in self.terms.values())) if self.terms else 1
        return den, [(a, int(c * den)) for a, c in self.terms.items()]

    @cached_property
    def _arrays(self) -> tuple[np.ndarray, np.ndarray]:
        exps = np.array(list(self.terms), dtype=np.int64).reshape(len(self.terms), self.nvars)
        coeffs = np.array([float(c) for c in self.terms.values()])
        return exps, coeffs


class LinearFormList(NamedTuple):
    """Weighted linear forms; the associated form is sum of weight * (coeffs . x)^m."""

    rows: tuple[tuple[int, tuple], ...]

    @classmethod
    def vandermonde(cls, spectrum: RootSpectrum, n: int | None = None, exact: bool = False) -> "LinearFormList":
        n = spectrum.degree if n is None else n
        rows = []
        for i, (z, mu) in enumerate(spectrum.distinct_roots):
            lam = spectrum.exact[i] if exact else z
            rows.append((mu, tuple(lam**j for j in range(n))))
        return cls(tuple(rows))

    @property
    def total_weight(self) -> int:
        return sum(w for w, _ in self.rows)


# ------------------------------------------------------------- construction


def build_form_exact(f: Polynomial, m: int) -> MAdicForm:
    """Phi_m of ``f`` with exact rational coefficients, from Newton power sums."""
    f.require_nonconstant()
    if m < 1:
        raise RealRootError("form degree m must be >= 1")
    n = f.degree
    ps = power_sums(f, m * (n - 1))
    terms = {}
    for alpha, mult, k in monomial_table(n, m):
        c = mult * ps[k]
        if c:
            terms[alpha] = c
    return MAdicForm(n, m, terms, "rational")


def expand_weighted_powers(lin: LinearFormList, m: int):
    """Expand sum_l w_l (c_l . x)^m in floating point.

    Returns (coefficient, magnitude) dicts over all degree-m monomials; the
    magnitude is the sum of absolute values of the contributions and bounds
    the rounding error of the coefficient.
    """
    n = len(lin.rows[0][1])
    table = monomial_table(n, m)
    exps = np.array([a for a, _, _ in table], dtype=np.int64)
    mults = np.array([float(c) for _, c, _ in table])
    coeff = np.zeros(len(table), dtype=complex)
    mag = np.zeros(len(table))
    for w, row in lin.rows:
        row = np.array([complex(c) for c in row])
        powers = row[None, :] ** exps  # (T, n)
        contrib = np.prod(powers, axis=1)
        coeff += w * contrib
        mag += w * np.abs(contrib)
    coeff *= mults
    mag *= mults
    keys = [a for a, _, _ in table]
    return dict(zip(keys, coeff.tolist())), dict(zip(keys, mag.tolist()))


def expand_weighted_powers_exact(lin: LinearFormList, m: int) -> dict[Exponents, Fraction]:
    """Exact expansion of sum_l w_l (c_l . x)^m for rational rows."""
    n = len(lin.rows[0][1])
    rows = [[Fraction(c) for c in row] for _, row in lin.rows]
    den = math.lcm(*(c.denominator for row in rows for c in row))
    # integer rows over the common denominator, with the weight folded into a per-row factor
    tables = []
    for (w, _), row in zip(lin.rows, rows):
        ints = [int(c * den) for c in row]
        pw = [[1] * (m + 1) for _ in ints]
        for j, a in enumerate(ints):
            for k in range(1, m + 1):
                pw[j][k] = pw[j][k - 1] * a
        tables.append((int(w), pw))
    scale = den**m
    out = {}
    for alpha, mult, _ in monomial_table(n, m):
        acc = 0
        for w, pw in tables:
            term = w
            for j, a in enumerate(alpha):
                if a:
                    term *= pw[j][a]
            acc += term
        if acc:
            out[alpha] = Fraction(mult * acc, scale)
    return out


def _real_or_raise(coeffs: dict, mags: dict, tol: float) -> dict[Exponents, float]:
    out = {}
    for alpha, c in coeffs.items():
        if abs(c.imag) > tol * (1 + mags[alpha]):
            raise ImaginaryResidueError(
                f"coefficient of {alpha} has imaginary part {c.imag:.3g} (conjugate symmetry broken)"
            )
        out[alpha] = c.real
    return out


def build_form_from_roots(spectrum: RootSpectrum, m: int, tol: float = IMAG_TOL) -> MAdicForm:
    """Phi_m expanded from the roots, sum_l mu_l (x_1 + x_2 l + ...)^m.

    Exact (rational field) when every root is a certified rational, otherwise
    a double-field form.
    """
    if not spectrum.distinct_roots:
        raise RealRootError("empty root spectrum")
    if m < 1:
        raise RealRootError("form degree m must be >= 1")
    n = spectrum.degree
    if spectrum.is_exact:
        terms = expand_weighted_powers_exact(LinearFormList.vandermonde(spectrum, exact=True), m)
        return MAdicForm(n, m, terms, "rational")
    coeffs, mags = expand_weighted_powers(LinearFormList.vandermonde(spectrum), m)
    return MAdicForm(n, m, _real_or_raise(coeffs, mags, tol), "double")


def root_route_magnitudes(spectrum: RootSpectrum, m: int) -> dict[Exponents, float]:
    """Per-coefficient magnitudes of the root-based expansion (scale for float comparisons)."""
    return expand_weighted_powers(LinearFormList.vandermonde(spectrum), m)[1]


def max_coefficient_discrepancy(a: MAdicForm, b: MAdicForm, scale: dict | None = None) -> float:
    """Largest |a_alpha - b_alpha| / (1 + scale_alpha) over the union of monomials."""
    if (a.nvars, a.degree) != (b.nvars, b.degree):
        raise RealRootError("forms have different shapes")
    worst = 0.0
    for alpha in set(a.terms) | set(b.terms):
        d = abs(float(Fraction(a.coeff(alpha)) - Fraction(b.coeff(alpha))))
        s = scale.get(alpha, 0.0) if scale else 0.0
        worst = max(worst, d / (1 + s))
    return worst


# ------------------------------------------------------------------ evaluation


def _is_rational(v) -> bool:
    return isinstance(v, Rational)


def evaluate(form: MAdicForm, x: Sequence):
    """Value of the form at ``x``: exact Fraction when form and point are rational, else float."""
    if len(x) != form.nvars:
        raise RealRootError(f"point has {len(x)} coordinates, form has {form.nvars} variables")
    if form.field == "rational" and all(_is_rational(v) for v in x):
        return _evaluate_exact(form, [Fraction(v) for v in x])
    xs = [float(v) for v in x]
    return math.fsum(float(c) * math.prod(xj**a for xj, a in zip(xs, alpha) if a) for alpha, c in form.terms.items())


def _evaluate_exact(form: MAdicForm, x: list[Fraction]) -> Fraction:
    # everything over a common denominator so the inner loop is integer-only
    den, terms = form._integer_terms
    xden = math.lcm(*(v.denominator for v in x)) if x else 1
    ints = [int(v * xden) for v in x]
    m = form.degree
    pw = [[1] * (m + 1) for _ in ints]
    for j, a in enumerate(ints):
        for k in range(1, m + 1):
            pw[j][k] = pw[j][k - 1] * a
    total = 0
    for alpha, c in terms:
        t = c
        for j, a in enumerate(alpha):
            if a:
                t *= pw[j][a]
        total += t
    return Fraction(total, den * xden**m)


def evaluate_batch(form: MAdicForm, xs: np.ndarray) -> np.ndarray:
    """Float values of the form at each row of ``xs``."""
    exps, coeffs = form._arrays
    xs = np.asarray(xs, dtype=float)
    mono = np.prod(xs[:, None, :] ** exps[None, :, :], axis=2)
    return mono @ coeffs


class PowerEvaluation(NamedTuple):
    value: float
    imag_residue: float
    magnitude: float


def evaluate_via_powers(spectrum: RootSpectrum, x: Sequence, m: int, tol: float = IMAG_TOL) -> PowerEvaluation:
    """sum_l mu_l p(l)^m with p(t) = x_1 + x_2 t + ... + x_n t^(n-1), in complex doubles."""
    n = spectrum.degree
    if len(x) != n:
        raise RealRootError(f"point has {len(x)} coordinates, expected {n}")
    xs = [float(v) for v in x]
    total = 0j
    mag = 0.0
    for lam, mu in spectrum.distinct_roots:
        pv = 0j
        for c in reversed(xs):
            pv = pv * lam + c
        term = pv**m
        total += mu * term
        mag += mu * abs(term)
    if abs(total.imag) > tol * (1 + mag):
        raise ImaginaryResidueError(f"imaginary residue {total.imag:.3g} exceeds tolerance")
    return PowerEvaluation(total.real, abs(total.imag), mag)


# -------------------------------------------------------------- serialization


def form_to_json(form: MAdicForm) -> str:
    terms = []
    for alpha in sorted(form.terms):
        c = form.terms[alpha]
        terms.append({"exponents": list(alpha), "coeff": fmt_rational(c) if form.field == "rational" else c})
    doc = {"nvars": form.nvars, "degree": form.degree, "coefficient_field": form.field, "terms": terms}
    return json.dumps(doc)


def form_from_json(text: str) -> MAdicForm:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from exc
    try:
        nvars, degree = doc["nvars"], doc["degree"]
        fld = doc.get("coefficient_field", "rational")
        raw_terms = doc["terms"]
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"missing field {exc}") from exc
    if not isinstance(nvars, int) or not isinstance(degree, int) or nvars < 1 or degree < 0:
        raise SchemaError("nvars and degree must be integers (nvars >= 1)")
    terms = {}
    for t in raw_terms:
        try:
            alpha = tuple(t["exponents"])
            c = t["coeff"]
        except (KeyError, TypeError) as exc:
            raise SchemaError(f"bad term {t!r}") from exc
        if not all(isinstance(a, int) for a in alpha):
            raise SchemaError(f"exponents must be integers: {alpha}")
        if alpha in terms:
            raise SchemaError(f"duplicate term {alpha}")
        if fld == "rational":
            if not isinstance(c, (str, int)):
                raise SchemaError(f"rational coefficient must be a string: {c!r}")
            try:
                c = parse_rational(str(c))
            except ParseError as exc:
                raise SchemaError(str(exc)) from exc
        elif not isinstance(c, (int, float)):
            raise SchemaError(f"double coefficient must be a number: {c!r}")
        terms[alpha] = c
    return MAdicForm(nvars, degree, terms, fld)


def _monomial_text(alpha: Exponents) -> str:
    return "".join(f"x{j + 1}" + (f"^{a}" if a > 1 else "") for j, a in enumerate(alpha) if a)


def form_to_text(form: MAdicForm) -> str:
    """Canonical text, monomials in descending powers of x1 (then x2, ...)."""
    if not form.terms:
        return "0"
    parts = []
    for alpha in sorted(form.terms, reverse=True):
        c = form.terms[alpha]
        neg = c < 0
        mag = abs(c)
        mono = _monomial_text(alpha)
        if mag == 1 and mono:
            body = mono
        elif form.field == "rational":
            if mag.denominator != 1:
                body = f"({fmt_rational(mag)}){mono}"
            else:
                body = fmt_rational(mag) + mono
        else:
            body = format(mag, ".12g") + mono
        parts.append((neg, body))
    out = ("-" if parts[0][0] else "") + parts[0][1]
    for neg, body in parts[1:]:
        out += (" - " if neg else " + ") + body
    return out
