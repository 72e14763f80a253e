"""Certificates in both directions.

A polynomial with a non-real root gets a negative witness: a real vector x
with Phi_m(x) = -2 mu, built by interpolating a real polynomial that sends
the chosen root to e^(i pi/m), its conjugate to e^(-i pi/m) and every other
root to 0.  A real-rooted polynomial gets a sum-of-even-powers decomposition
Phi_m = sum_l mu_l (x . v_l)^m with real Vandermonde rows v_l.
"""

from __future__ import annotations

import cmath
import json
import math
import os
from dataclasses import asdict, dataclass
from fractions import Fraction
from numbers import Rational
from typing import Union

import numpy as np

from .errors import (
    ConvergenceError,
    ImaginaryResidueError,
    InterpolationError,
    NotRealRootedError,
    NoWitnessError,
    RealRootError,
    SchemaError,
    VerificationError,
)
from .forms import (
    IMAG_TOL,
    LinearFormList,
    build_form_exact,
    evaluate,
    expand_weighted_powers,
    expand_weighted_powers_exact,
    max_coefficient_discrepancy,
    MAdicForm,
)
from .poly import Polynomial, RootSpectrum, fmt_rational, numeric_roots, parse_rational
from .psd import classify_real_rooted

DEFAULT_TOL = 1e-6
COEFF_TOL = 1e-8
MAX_CONDITION = 1e13


def default_tolerance() -> float:
    """Witness tolerance, overridable with the REALROOT_TOL environment variable."""
    env = os.environ.get("REALROOT_TOL")
    if env:
        try:
            return float(env)
        except ValueError as exc:
            raise RealRootError(f"REALROOT_TOL is not a number: {env!r}") from exc
    return DEFAULT_TOL


def _require_even(m: int) -> None:
    if m < 2 or m % 2:
        raise RealRootError(f"m must be an even integer >= 2, got {m}")


@dataclass(frozen=True)
class NegativeWitness:
    m: int
    x: tuple[float, ...]
    claimed_value: float
    mu: int
    residual: float
    kind: str = "negative_witness"


@dataclass(frozen=True)
class PsdCertificate:
    m: int
    rows: LinearFormList
    residual: float = 0.0
    kind: str = "psd_decomposition"

    @property
    def exact(self) -> bool:
        return all(isinstance(c, Rational) for _, row in self.rows.rows for c in row)


Certificate = Union[NegativeWitness, PsdCertificate]


# -------------------------------------------------------------- interpolation


def select_nonreal_root(spectrum: RootSpectrum) -> int:
    """Index of the non-real root with the largest imaginary part (ties: smallest real part)."""
    candidates = [i for i, (z, _) in enumerate(spectrum.distinct_roots) if z.imag != 0]
    if not candidates:
        raise NoWitnessError("all roots are real, so every even form is PSD and no witness exists")
    return min(candidates, key=lambda i: (-spectrum.distinct_roots[i][0].imag, spectrum.distinct_roots[i][0].real))


def _interpolate(spectrum: RootSpectrum, omega: complex, tol: float) -> tuple[np.ndarray, int]:
    i1 = select_nonreal_root(spectrum)
    roots = spectrum.values
    lam1 = roots[i1]
    i2 = roots.index(lam1.conjugate())
    r = len(roots)
    vander = np.array([[z**j for j in range(r)] for z in roots], dtype=complex)
    if np.linalg.cond(vander) > MAX_CONDITION:
        raise InterpolationError("interpolation nodes are too close (Vandermonde system ill-conditioned)")
    rhs = np.zeros(r, dtype=complex)
    rhs[i1] = omega
    rhs[i2] = complex(omega).conjugate()
    coeffs = np.linalg.solve(vander, rhs)
    # one step of iterative refinement
    coeffs = coeffs + np.linalg.solve(vander, rhs - vander @ coeffs)
    imag = np.abs(coeffs.imag).max()
    if imag > tol * (1 + np.abs(coeffs).max()):
        raise ImaginaryResidueError(f"interpolating polynomial has imaginary coefficients ({imag:.3g})")
    return coeffs.real.copy(), i1


def interpolate_witness_poly(spectrum: RootSpectrum, omega: complex, tol: float = IMAG_TOL) -> Polynomial:
    """Real p of degree <= r-1 with p(l1) = omega, p(conj l1) = conj omega, p = 0 at the other roots.

    l1 is chosen by ``select_nonreal_root``. Coefficients are the doubles of
    the numeric solve, converted exactly to Fractions.
    """
    coeffs, _ = _interpolate(spectrum, omega, tol)
    return Polynomial(Fraction(float(c)) for c in coeffs)


# ----------------------------------------------------------------- witnesses


def _witness_value(f: Polynomial, m: int, x) -> float:
    # exact value of Phi_m at the double vector x
    return float(evaluate(build_form_exact(f, m), [Fraction(float(v)) for v in x]))


def negative_witness(f: Polynomial, m: int, tol: float | None = None, spectrum: RootSpectrum | None = None) -> NegativeWitness:
    """Real x with Phi_m(x) = -2 mu < 0; verified before it is returned."""
    _require_even(m)
    tol = default_tolerance() if tol is None else tol
    f.require_nonconstant()
    if classify_real_rooted(f):
        raise NoWitnessError("polynomial is real-rooted: Phi_m is PSD for every even m, no negative witness exists")
    spectrum = numeric_roots(f) if spectrum is None else spectrum
    if spectrum.is_real():
        raise ConvergenceError("exact test found non-real roots but the numeric spectrum is all real")
    omega = cmath.exp(1j * math.pi / m)
    coeffs, i1 = _interpolate(spectrum, omega, IMAG_TOL)
    mu = spectrum.distinct_roots[i1][1]
    x = tuple(float(c) for c in coeffs) + (0.0,) * (f.degree - len(coeffs))
    value = _witness_value(f, m, x)
    residual = abs(value + 2 * mu)
    if not value < 0 or residual > tol * (1 + 2 * mu):
        raise VerificationError(f"witness check failed: Phi_{m}(x) = {value!r}, expected {-2 * mu}")
    return NegativeWitness(m, x, float(-2 * mu), mu, residual)


def psd_certificate(f: Polynomial, m: int, spectrum: RootSpectrum | None = None) -> PsdCertificate:
    """Phi_m as sum_l mu_l (x . (1, l, ..., l^(n-1)))^m over the real roots l; verified."""
    _require_even(m)
    f.require_nonconstant()
    if not classify_real_rooted(f):
        raise NotRealRootedError("polynomial has non-real roots, Phi_m is not PSD")
    spectrum = numeric_roots(f) if spectrum is None else spectrum
    if not spectrum.is_real():
        raise ConvergenceError("exact test says real-rooted but the numeric spectrum has non-real roots")
    if spectrum.is_exact:
        rows = LinearFormList.vandermonde(spectrum, exact=True)
    else:
        rows = LinearFormList(tuple((mu, tuple(float(v.real) for v in row)) for mu, row in LinearFormList.vandermonde(spectrum).rows))
    cert = PsdCertificate(m, rows)
    report = verify_certificate(f, cert)
    if not report.passed:
        raise VerificationError(f"decomposition does not reproduce Phi_{m}: {report.message}")
    return PsdCertificate(m, rows, report.residual)


# -------------------------------------------------------------- verification


@dataclass(frozen=True)
class VerificationReport:
    kind: str
    passed: bool
    residual: float
    tolerance: float
    exact: bool = False
    value: float | None = None
    message: str = ""

    def to_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}


def verify_certificate(f: Polynomial, cert: Certificate, tol: float | None = None) -> VerificationReport:
    """Check a certificate against Phi_m recomputed exactly from ``f``. Failures are reported, not raised."""
    n = f.degree
    if isinstance(cert, NegativeWitness):
        tol = default_tolerance() if tol is None else tol
        if cert.m < 2 or cert.m % 2:
            return VerificationReport(cert.kind, False, math.inf, tol, message="m must be even")
        if len(cert.x) != n:
            return VerificationReport(cert.kind, False, math.inf, tol, message=f"x has length {len(cert.x)}, expected {n}")
        value = _witness_value(f, cert.m, cert.x)
        residual = abs(value + 2 * cert.mu)
        if not value < 0:
            return VerificationReport(cert.kind, False, residual, tol, value=value, message=f"Phi_{cert.m}(x) = {value:.6g} is not negative")
        passed = residual <= tol * (1 + 2 * cert.mu)
        msg = "ok" if passed else f"|Phi_m(x) + 2 mu| = {residual:.3g} exceeds tolerance"
        return VerificationReport(cert.kind, passed, residual, tol, value=value, message=msg)

    if isinstance(cert, PsdCertificate):
        tol = COEFF_TOL if tol is None else tol
        rows = cert.rows.rows
        problem = None
        if cert.m < 2 or cert.m % 2:
            problem = "m must be even"
        elif not rows:
            problem = "no rows"
        elif any(len(row) != n for _, row in rows):
            problem = f"rows must have length {n}"
        elif any(not isinstance(w, int) or w < 1 for w, _ in rows):
            problem = "weights must be positive integers"
        elif sum(w for w, _ in rows) != n:
            problem = f"weights sum to {sum(w for w, _ in rows)}, expected {n}"
        elif any(isinstance(c, complex) for _, row in rows for c in row):
            problem = "rows must be real"
        if problem:
            return VerificationReport(cert.kind, False, math.inf, tol, message=problem)
        target = build_form_exact(f, cert.m)
        if cert.exact:
            got = MAdicForm(n, cert.m, expand_weighted_powers_exact(cert.rows, cert.m))
            passed = got == target
            return VerificationReport(cert.kind, passed, 0.0 if passed else math.inf, 0.0, exact=True, message="exact match" if passed else "coefficients differ")
        coeffs, mags = expand_weighted_powers(cert.rows, cert.m)
        got = MAdicForm(n, cert.m, {a: c.real for a, c in coeffs.items()}, "double")
        residual = max_coefficient_discrepancy(got, target, mags)
        passed = residual <= tol
        return VerificationReport(cert.kind, passed, residual, tol, message="ok" if passed else "coefficient mismatch")

    raise RealRootError(f"unknown certificate type {type(cert).__name__}")


# ------------------------------------------------------------- serialization


def _num_out(c):
    return fmt_rational(c) if isinstance(c, Rational) else float(c)


def _num_in(c):
    if isinstance(c, str):
        return parse_rational(c)
    if isinstance(c, bool) or not isinstance(c, (int, float)):
        raise SchemaError(f"expected a number or rational string, got {c!r}")
    return Fraction(c) if isinstance(c, int) else float(c)


def certificate_to_dict(cert: Certificate) -> dict:
    if isinstance(cert, NegativeWitness):
        return {
            "kind": cert.kind,
            "m": cert.m,
            "x": list(cert.x),
            "claimed_value": cert.claimed_value,
            "mu": cert.mu,
            "residual": cert.residual,
        }
    return {
        "kind": cert.kind,
        "m": cert.m,
        "rows": [{"weight": w, "coeffs": [_num_out(c) for c in row]} for w, row in cert.rows.rows],
    }


def certificate_to_json(cert: Certificate) -> str:
    return json.dumps(certificate_to_dict(cert), indent=2)


def certificate_from_json(text: str) -> Certificate:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise SchemaError("certificate must be a JSON object")
    kind = doc.get("kind")
    try:
        m = int(doc["m"])
        if kind == "negative_witness":
            return NegativeWitness(
                m,
                tuple(float(v) for v in doc["x"]),
                float(doc.get("claimed_value", -2 * int(doc["mu"]))),
                int(doc["mu"]),
                float(doc.get("residual", 0.0)),
            )
        if kind == "psd_decomposition":
            rows = tuple((r["weight"], tuple(_num_in(c) for c in r["coeffs"])) for r in doc["rows"])
            return PsdCertificate(m, LinearFormList(rows))
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"malformed certificate: {exc}") from exc
    raise SchemaError(f"unknown certificate kind {kind!r}")
