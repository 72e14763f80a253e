"""Positive semidefiniteness: exact test for the Hermite quadratic form, numeric search for higher forms."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import RealRootError
from .forms import MAdicForm, evaluate
from .poly import Polynomial, fmt_rational, power_sums

SPHERE_RESTARTS = 32
SPHERE_STEPS = 500
SPHERE_STEP_SIZE = 0.1


@dataclass(frozen=True)
class HermiteMatrix:
    """Square matrix of exact rationals; for a polynomial, the Hankel matrix of its power sums."""

    entries: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(Fraction(v) for v in row) for row in self.entries)
        if any(len(r) != len(rows) for r in rows):
            raise RealRootError("matrix must be square")
        object.__setattr__(self, "entries", rows)

    @property
    def size(self) -> int:
        return len(self.entries)

    def is_symmetric(self) -> bool:
        n = self.size
        return all(self.entries[i][j] == self.entries[j][i] for i in range(n) for j in range(i))

    def quadratic_form(self, x: Sequence) -> Fraction:
        return sum(
            (self.entries[i][j] * x[i] * x[j] for i in range(self.size) for j in range(self.size)),
            Fraction(0),
        )

    def to_json_rows(self) -> list[list[str]]:
        return [[fmt_rational(v) for v in row] for row in self.entries]


def hermite_matrix(f: Polynomial) -> HermiteMatrix:
    """H[i][j] = p_(i+j) (0-based), so that Phi_2(x) = x^T H x."""
    f.require_nonconstant()
    n = f.degree
    p = power_sums(f, 2 * n - 2)
    return HermiteMatrix(tuple(tuple(p[i + j] for j in range(n)) for i in range(n)))


def charpoly_minor_sums(entries: Sequence[Sequence]) -> list[Fraction]:
    """c_0..c_n with det(tI - A) = sum_k (-1)^k c_k t^(n-k); c_k is the sum of k x k principal minors.

    Faddeev-LeVerrier on an integer multiple of A: every intermediate is an
    integer and the divisions by k are exact.
    """
    a = [[Fraction(v) for v in row] for row in entries]
    n = len(a)
    if n == 0:
        return [Fraction(1)]
    den = math.lcm(*(v.denominator for row in a for v in row))
    ai = [[int(v * den) for v in row] for row in a]
    coeffs = [1]  # monic char poly of den*A, leading first
    mk = [[int(i == j) for j in range(n)] for i in range(n)]
    for k in range(1, n + 1):
        am = [[sum(ai[i][l] * mk[l][j] for l in range(n)) for j in range(n)] for i in range(n)]
        tr = sum(am[i][i] for i in range(n))
        assert tr % k == 0
        ck = -tr // k
        coeffs.append(ck)
        mk = am
        for i in range(n):
            mk[i][i] += ck
    # coefficient of t^(n-k) for den*A is (-1)^k den^k c_k(A)
    return [Fraction((-1) ** k * coeffs[k], den**k) for k in range(n + 1)]


def is_psd_exact(h) -> bool:
    """Exact PSD test for a symmetric rational matrix: all principal-minor sums are >= 0."""
    if not isinstance(h, HermiteMatrix):
        h = HermiteMatrix(tuple(tuple(r) for r in h))
    if not h.is_symmetric():
        raise RealRootError("PSD test needs a symmetric matrix")
    return all(c >= 0 for c in charpoly_minor_sums(h.entries))


def classify_real_rooted(f: Polynomial) -> bool:
    """True iff every root of ``f`` is real (Hermite form positive semidefinite)."""
    return is_psd_exact(hermite_matrix(f))


# ------------------------------------------------------------ sphere search


def _value_and_grad(exps: np.ndarray, coeffs: np.ndarray, xs: np.ndarray):
    # monomials as exp(E log|x|) with a parity sign: two matmuls instead of an (R, T, n) tensor
    ax = np.maximum(np.abs(xs), 1e-150)
    sx = np.where(xs < 0, -1.0, 1.0)
    mono = np.exp(np.log(ax) @ exps.T)
    odd = np.fmod((xs < 0).astype(float) @ exps.T, 2.0) == 1.0
    mono = np.where(odd, -mono, mono)
    weighted = mono * coeffs
    vals = weighted.sum(axis=1)
    grads = (weighted @ exps) / (sx * ax)
    return vals, grads


def _normalize_rows(xs: np.ndarray) -> np.ndarray:
    return xs / np.linalg.norm(xs, axis=1, keepdims=True)


def estimate_min_on_sphere(
    form: MAdicForm,
    restarts: int = SPHERE_RESTARTS,
    steps: int = SPHERE_STEPS,
    seed: int = 0,
    step_size: float = SPHERE_STEP_SIZE,
) -> tuple[float, tuple[float, ...]]:
    """Smallest value of an even-degree form found on the unit sphere.

    Projected gradient descent with per-restart backtracking. The final
    candidates are re-evaluated exactly when the form is rational, so a
    negative result certifies that the form is not PSD. A nonnegative result
    is only evidence.
    """
    if form.degree % 2:
        raise RealRootError("sphere minimum is only meaningful for even degree")
    if form.nvars < 1 or restarts < 1:
        raise RealRootError("need at least one variable and one restart")
    if not form.terms:
        x = (1.0,) + (0.0,) * (form.nvars - 1)
        return 0.0, x
    exps, coeffs = form._arrays
    exps = exps.astype(float)
    scale = np.abs(coeffs).max()
    coeffs = coeffs / scale

    rng = np.random.default_rng(seed)
    xs = _normalize_rows(rng.standard_normal((restarts, form.nvars)))
    vals, grads = _value_and_grad(exps, coeffs, xs)
    eta = np.full(restarts, step_size)
    for _ in range(steps):
        tangent = grads - np.sum(grads * xs, axis=1, keepdims=True) * xs
        gnorm = np.linalg.norm(tangent, axis=1, keepdims=True)
        if not np.any(gnorm > 0):
            break
        direction = np.divide(tangent, gnorm, out=np.zeros_like(tangent), where=gnorm > 0)
        trial = _normalize_rows(xs - eta[:, None] * direction)
        tvals, tgrads = _value_and_grad(exps, coeffs, trial)
        better = tvals < vals
        xs[better], vals[better], grads[better] = trial[better], tvals[better], tgrads[better]
        eta = np.where(better, eta * 1.2, eta * 0.5)
        if np.all(eta < 1e-10):
            break

    best_val, best_x = math.inf, None
    for x in xs:
        if form.field == "rational":
            v = float(evaluate(form, [Fraction(float(c)) for c in x]))
        else:
            v = evaluate(form, list(x))
        if v < best_val:
            best_val, best_x = v, tuple(float(c) for c in x)
    return best_val, best_x
