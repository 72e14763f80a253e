"""Random corpora and the Hermite / Sturm / certificate consistency pipeline."""

from __future__ import annotations

import csv
import io
import random
import time
from dataclasses import dataclass, field

from .errors import RealRootError
from .forms import build_form_exact
from .poly import Polynomial, numeric_roots, sturm_real_root_count
from .psd import classify_real_rooted, estimate_min_on_sphere
from .witness import negative_witness, psd_certificate

REPEATED_ROOT_FRACTION = 0.1

CSV_COLUMNS = [
    "degree",
    "n_real_rooted",
    "mismatches",
    "max_witness_residual",
    "max_cert_residual",
    "wall_ms_hermite",
    "wall_ms_sturm",
    "wall_ms_witness",
]


@dataclass(frozen=True)
class CorpusSpec:
    count: int
    degree_range: tuple[int, int] = (1, 8)
    coeff_range: tuple[int, int] = (-9, 9)
    seed: int = 0
    frac_real: float = 0.4
    frac_nonreal: float = 0.4

    def validate(self) -> None:
        lo, hi = self.degree_range
        clo, chi = self.coeff_range
        if self.count < 1:
            raise RealRootError("corpus count must be >= 1")
        if lo < 1 or lo > hi:
            raise RealRootError(f"empty degree range {lo}..{hi}")
        if clo > chi or (clo == chi == 0):
            raise RealRootError(f"empty coefficient range {clo}..{chi}")
        if not (0 <= self.frac_real <= 1 and 0 <= self.frac_nonreal <= 1) or self.frac_real + self.frac_nonreal > 1:
            raise RealRootError("corpus fractions must lie in [0, 1] and sum to at most 1")
        if self.frac_nonreal > 0 and hi >= 2 and chi < 1:
            raise RealRootError("forced non-real entries need a positive upper coefficient bound")


@dataclass(frozen=True)
class CorpusEntry:
    index: int
    kind: str  # "real", "nonreal" or "uniform"
    poly: Polynomial


def _nonzero(rng: random.Random, lo: int, hi: int) -> int:
    while True:
        v = rng.randint(lo, hi)
        if v:
            return v


def _uniform_poly(rng: random.Random, degree: int, lo: int, hi: int) -> Polynomial:
    coeffs = [rng.randint(lo, hi) for _ in range(degree)]
    return Polynomial(coeffs + [_nonzero(rng, lo, hi)])


def _forced_real(rng: random.Random, degree: int, lo: int, hi: int) -> Polynomial:
    roots = [rng.randint(lo, hi) for _ in range(degree)]
    if degree >= 2 and rng.random() < REPEATED_ROOT_FRACTION:
        roots[-1] = roots[0]
    return Polynomial.from_roots(roots)


def _forced_nonreal(rng: random.Random, degree: int, lo: int, hi: int) -> Polynomial:
    while True:
        b, c = rng.randint(lo, hi), rng.randint(1, hi)
        if b * b < 4 * c:
            break
    quad = Polynomial([c, b, 1])
    if degree >= 4 and rng.random() < REPEATED_ROOT_FRACTION:
        rest_degree, quad = degree - 4, quad * quad
    else:
        rest_degree = degree - 2
    return quad * _uniform_poly(rng, rest_degree, lo, hi)


def generate_labeled_corpus(spec: CorpusSpec) -> list[CorpusEntry]:
    spec.validate()
    lo, hi = spec.degree_range
    clo, chi = spec.coeff_range
    out = []
    for i in range(spec.count):
        rng = random.Random(spec.seed * 1_000_003 + i)
        degree = rng.randint(lo, hi)
        u = rng.random()
        if u < spec.frac_real:
            kind, poly = "real", _forced_real(rng, degree, clo, chi)
        elif u < spec.frac_real + spec.frac_nonreal and hi >= 2:
            kind, poly = "nonreal", _forced_nonreal(rng, max(degree, 2), clo, chi)
        else:
            kind, poly = "uniform", _uniform_poly(rng, degree, clo, chi)
        out.append(CorpusEntry(i, kind, poly))
    return out


def generate_corpus(spec: CorpusSpec) -> list[Polynomial]:
    """Deterministic list of integer polynomials drawn according to ``spec``."""
    return [e.poly for e in generate_labeled_corpus(spec)]


# ---------------------------------------------------------------- consistency


@dataclass
class EntryResult:
    index: int
    poly: Polynomial
    hermite_real: bool
    sturm_real: bool
    witness_residuals: dict[int, float] = field(default_factory=dict)
    witness_mu: int | None = None
    cert_residuals: dict[int, float] = field(default_factory=dict)
    sphere_minima: dict[int, float] = field(default_factory=dict)
    failures: list[str] = field(default_factory=list)
    wall_ms: dict[str, float] = field(default_factory=dict)

    @property
    def mismatch(self) -> bool:
        return self.hermite_real != self.sturm_real


@dataclass
class DegreeRow:
    degree: int
    count: int = 0
    n_real_rooted: int = 0
    mismatches: int = 0
    max_witness_residual: float = 0.0
    max_cert_residual: float = 0.0
    min_sphere_value: float | None = None
    failures: int = 0
    wall_ms_hermite: float = 0.0
    wall_ms_sturm: float = 0.0
    wall_ms_witness: float = 0.0


@dataclass
class ConsistencyReport:
    entries: list[EntryResult]
    m_list: tuple[int, ...]

    @property
    def mismatches(self) -> int:
        return sum(e.mismatch for e in self.entries)

    @property
    def failures(self) -> list[str]:
        return [f"#{e.index} {e.poly.to_text()}: {msg}" for e in self.entries for msg in e.failures]

    @property
    def max_witness_residual(self) -> float:
        return max((r for e in self.entries for r in e.witness_residuals.values()), default=0.0)

    @property
    def max_cert_residual(self) -> float:
        return max((r for e in self.entries for r in e.cert_residuals.values()), default=0.0)

    @property
    def min_sphere_value(self) -> float | None:
        vals = [v for e in self.entries for v in e.sphere_minima.values()]
        return min(vals) if vals else None

    def by_degree(self) -> list[DegreeRow]:
        rows: dict[int, DegreeRow] = {}
        for e in self.entries:
            row = rows.setdefault(e.poly.degree, DegreeRow(e.poly.degree))
            row.count += 1
            row.n_real_rooted += e.hermite_real
            row.mismatches += e.mismatch
            row.failures += len(e.failures)
            row.max_witness_residual = max([row.max_witness_residual, *e.witness_residuals.values()])
            row.max_cert_residual = max([row.max_cert_residual, *e.cert_residuals.values()])
            if e.sphere_minima:
                lo = min(e.sphere_minima.values())
                row.min_sphere_value = lo if row.min_sphere_value is None else min(row.min_sphere_value, lo)
            row.wall_ms_hermite += e.wall_ms.get("hermite", 0.0)
            row.wall_ms_sturm += e.wall_ms.get("sturm", 0.0)
            row.wall_ms_witness += e.wall_ms.get("witness", 0.0)
        return [rows[d] for d in sorted(rows)]


def _ms(t0: float) -> float:
    return (time.perf_counter() - t0) * 1000.0


def check_entry(
    index: int,
    f: Polynomial,
    m_list=(),
    tol: float | None = None,
    sphere_restarts: int = 0,
    sphere_steps: int = 500,
    seed: int = 0,
) -> EntryResult:
    t0 = time.perf_counter()
    hermite = classify_real_rooted(f)
    t_h = _ms(t0)
    t0 = time.perf_counter()
    distinct_real, distinct_total = sturm_real_root_count(f)
    t_s = _ms(t0)
    res = EntryResult(index, f, hermite, distinct_real == distinct_total)
    res.wall_ms.update(hermite=t_h, sturm=t_s)
    if res.mismatch:
        res.failures.append(f"Hermite says {hermite}, Sturm counts {distinct_real}/{distinct_total}")
        return res
    t0 = time.perf_counter()
    try:
        spectrum = numeric_roots(f) if m_list else None
    except RealRootError as exc:
        res.failures.append(f"root finding: {exc}")
        m_list = ()
    for m in m_list:
        try:
            if hermite:
                cert = psd_certificate(f, m, spectrum=spectrum)
                res.cert_residuals[m] = cert.residual
            else:
                w = negative_witness(f, m, tol=tol, spectrum=spectrum)
                res.witness_residuals[m] = w.residual
                res.witness_mu = w.mu
        except RealRootError as exc:
            res.failures.append(f"m={m}: {type(exc).__name__}: {exc}")
    res.wall_ms["witness"] = _ms(t0)
    if hermite and sphere_restarts > 0:
        for m in m_list:
            val, _ = estimate_min_on_sphere(build_form_exact(f, m), sphere_restarts, sphere_steps, seed=seed ^ index)
            res.sphere_minima[m] = val
    return res


def run_consistency(
    corpus,
    m_list=(2, 4, 6, 8),
    tol: float | None = None,
    sphere_restarts: int = 0,
    sphere_steps: int = 500,
    seed: int = 0,
) -> ConsistencyReport:
    """Cross-check every polynomial: exact Hermite decision vs Sturm count, then certificates.

    Non-real-rooted entries get a verified negative witness per m; real-rooted
    entries get a verified decomposition per m and, when ``sphere_restarts``
    is positive, a sphere-minimum estimate.
    """
    m_list = tuple(m_list)
    if any(m < 2 or m % 2 for m in m_list):
        raise RealRootError("m_list must contain even integers >= 2")
    entries = []
    for i, f in enumerate(corpus):
        f = f.poly if isinstance(f, CorpusEntry) else f
        entries.append(check_entry(i, f, m_list, tol, sphere_restarts, sphere_steps, seed))
    return ConsistencyReport(entries, m_list)


def _fmt(v, timing: bool = True) -> str:
    if not timing:
        return "-"
    if v is None:
        return "-"
    if isinstance(v, float):
        return f"{v:.3g}"
    return str(v)


def report_rows(report: ConsistencyReport, timings: bool = True) -> list[list[str]]:
    rows = []
    for r in report.by_degree():
        rows.append(
            [
                str(r.degree),
                str(r.n_real_rooted),
                str(r.mismatches),
                _fmt(r.max_witness_residual),
                _fmt(r.max_cert_residual),
                _fmt(round(r.wall_ms_hermite, 1), timings),
                _fmt(round(r.wall_ms_sturm, 1), timings),
                _fmt(round(r.wall_ms_witness, 1), timings),
            ]
        )
    return rows


def report_to_csv(report: ConsistencyReport, timings: bool = True) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    writer.writerows(report_rows(report, timings))
    return buf.getvalue()


def report_to_text(report: ConsistencyReport, timings: bool = True) -> str:
    rows = [CSV_COLUMNS] + report_rows(report, timings)
    widths = [max(len(r[i]) for r in rows) for i in range(len(CSV_COLUMNS))]
    lines = ["  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in rows]
    lines.append("")
    lines.append(f"polynomials: {len(report.entries)}  m: {','.join(map(str, report.m_list)) or '-'}")
    lines.append(f"mismatches = {report.mismatches}")
    lines.append(f"max witness residual = {report.max_witness_residual:.3g}")
    lines.append(f"max certificate residual = {report.max_cert_residual:.3g}")
    lines.append(f"failures = {len(report.failures)}")
    for msg in report.failures:
        lines.append(f"  {msg}")
    return "\n".join(lines) + "\n"
