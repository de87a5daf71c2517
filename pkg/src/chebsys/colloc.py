"""Collocation determinants, zero counting and sampled T/ET certification.

Column layout of a collocation matrix: one group per knot, knot ``t_j`` of
multiplicity ``m_j`` contributing ``u_i(t_j), u_i'(t_j), ..., u_i^{(m_j-1)}(t_j)``;
rows are the functions ``u_0..u_N``.
"""

from __future__ import annotations

import csv
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _jit
from ._linalg import SINGULAR_RTOL, singular_extremes
from ._search import bisect_root, golden_min
from .core import FunctionSystem, Interval, SpanElement
from .errors import DomainError, SmoothnessError

log = logging.getLogger(__name__)

KINK_EXCLUSION = 1e-9
_TINY = np.finfo(float).tiny


@dataclass(frozen=True)
class KnotSpec:
    """Strictly increasing knots with multiplicities, as ``((t, m), ...)``."""

    knots: tuple

    def __post_init__(self):
        pairs = tuple((float(t), int(m)) for t, m in self.knots)
        if not pairs:
            raise ValueError("KnotSpec needs at least one knot")
        ts = np.array([t for t, _ in pairs])
        if not np.all(np.isfinite(ts)):
            raise ValueError("knots must be finite")
        if np.any(np.diff(ts) <= 0):
            raise ValueError("knots must be strictly increasing")
        if any(m < 1 for _, m in pairs):
            raise ValueError("multiplicities must be >= 1")
        object.__setattr__(self, "knots", pairs)

    @classmethod
    def simple(cls, ts: Sequence[float]) -> "KnotSpec":
        return cls(tuple((t, 1) for t in ts))

    @property
    def points(self) -> np.ndarray:
        return np.array([t for t, _ in self.knots])

    @property
    def multiplicities(self) -> tuple:
        return tuple(m for _, m in self.knots)

    @property
    def total(self) -> int:
        return sum(self.multiplicities)

    def expanded(self):
        """Repeated knot sequence ``tau`` and derivative order per column."""
        taus, ds = [], []
        for t, m in self.knots:
            taus.extend([t] * m)
            ds.extend(range(m))
        return np.array(taus), np.array(ds, dtype=np.int64)

    def to_list(self) -> list:
        return [[t, m] for t, m in self.knots]


@dataclass(frozen=True)
class CollocationReport:
    determinant: float
    sign: int
    smallest_singular_value: float
    scale: float

    @property
    def ratio(self) -> float:
        return self.smallest_singular_value / max(self.scale, _TINY)


@dataclass
class CertificationResult:
    verdict: str  # "certified-consistent" | "refuted" | "inconclusive"
    samples_run: int
    min_abs_det: float
    common_sign: int | None
    witness: KnotSpec | None = None
    witness_report: CollocationReport | None = None
    records: list = field(default_factory=list, repr=False)

    @property
    def refuted(self) -> bool:
        return self.verdict == "refuted"


def _check_knots(system: FunctionSystem, knots: KnotSpec) -> None:
    if knots.total != system.order_count:
        raise ValueError(
            f"multiplicities sum to {knots.total}, system has {system.order_count} functions")
    top = max(knots.multiplicities) - 1
    if top > system.smoothness:
        raise SmoothnessError(
            f"multiplicity {top + 1} needs C^{top}, {system.family} system is C^{system.smoothness}")


def collocation_matrix(system: FunctionSystem, knots: KnotSpec) -> np.ndarray:
    """Square (confluent) collocation matrix, rows = functions."""
    _check_knots(system, knots)
    taus, ds = knots.expanded()
    return system.basis(taus, ds)


def _knot_factor(knots: KnotSpec) -> float:
    # det(confluent matrix) = prod_j prod_{k<m_j} k! * prod_{i<j} (t_j - t_i)^(m_i m_j) * det(D)
    f = 1.0
    for _, m in knots.knots:
        for k in range(m):
            f *= math.factorial(k)
    pts, mult = knots.points, knots.multiplicities
    for j in range(len(pts)):
        for i in range(j):
            f *= (pts[j] - pts[i]) ** (mult[i] * mult[j])
    return f


def _determinant(system: FunctionSystem, knots: KnotSpec, matrix: np.ndarray) -> float:
    if system.divided_differences is not None:
        taus, _ = knots.expanded()
        dd = system.divided_differences(np.ascontiguousarray(taus))
        return _knot_factor(knots) * float(np.linalg.det(dd))
    return float(np.linalg.det(matrix))


def collocation_determinant(system: FunctionSystem, knots: KnotSpec,
                            singular_rtol: float = SINGULAR_RTOL) -> CollocationReport:
    """Determinant of the collocation matrix with singular-value diagnostics.

    Families that expose exact divided differences (monomial, cauchy) get the
    determinant through the factorisation
    ``det = knot_factor(knots) * det(divided-difference matrix)``, which stays
    accurate to a few ulps when knots cluster; the rest use LU.
    """
    matrix = collocation_matrix(system, knots)
    smin, smax = singular_extremes(matrix)
    det = _determinant(system, knots, matrix)
    if smin / max(smax, _TINY) <= singular_rtol:
        sign = 0
    else:
        sign = int(np.sign(det)) or int(np.linalg.slogdet(matrix)[0])
    return CollocationReport(det, sign, smin, smax)


def _near_kink(ts, kinks) -> bool:
    if not kinks:
        return False
    return bool(np.any(np.abs(np.subtract.outer(ts, np.asarray(kinks))) <= KINK_EXCLUSION))


def _draw_samples(system, interval, mode, sample_count, rng):
    n = system.order_count
    out = []
    while len(out) < sample_count:
        if mode == "simple":
            mult = (1,) * n
        else:
            k = int(rng.integers(1, n + 1))
            cuts = np.sort(rng.choice(np.arange(1, n), size=k - 1, replace=False)) if k > 1 else []
            bounds = np.concatenate(([0], cuts, [n])).astype(int)
            mult = tuple(int(x) for x in np.diff(bounds))
        ts = np.sort(rng.uniform(interval.a, interval.b, len(mult)))
        if np.any(np.diff(ts) <= 0) or _near_kink(ts, system.kinks):
            continue
        out.append(KnotSpec(tuple(zip(ts.tolist(), mult))))
    return out


def _bisect_singular(system, ref: KnotSpec, other: KnotSpec, ref_sign: int, iters: int = 80):
    # the ordered-knot simplex is convex and det is continuous on it, so a sign
    # flip between two configurations brackets a knot set where det vanishes
    a, b = ref.points, other.points
    mult = ref.multiplicities
    lo, hi = 0.0, 1.0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        ks = KnotSpec(tuple(zip(((1 - mid) * a + mid * b).tolist(), mult)))
        d = _determinant(system, ks, collocation_matrix(system, ks))
        if d == 0.0:
            lo = hi = mid
            break
        if np.sign(d) == ref_sign:
            lo = mid
        else:
            hi = mid
    mid = 0.5 * (lo + hi)
    return KnotSpec(tuple(zip(((1 - mid) * a + mid * b).tolist(), mult)))


def certify_t_property(system: FunctionSystem, interval=None, mode: str = "simple",
                       sample_count: int = 500, seed: int = 0, workers: int = 1,
                       singular_rtol: float = SINGULAR_RTOL,
                       keep_records: bool = False) -> CertificationResult:
    """Randomised check of the T (``mode="simple"``) or ET (``"confluent"``) property.

    Knot configurations are generated from ``seed`` up front and evaluated in
    any order, so the result does not depend on ``workers``. A refutation
    carries a witness knot set: when the disagreeing sample shares the
    reference multiplicity pattern, the witness is refined by bisection to a
    configuration whose collocation matrix is numerically singular.
    """
    interval = system.domain if interval is None else Interval.of(interval)
    if interval.a < system.domain.a or interval.b > system.domain.b:
        raise DomainError("certification interval must lie inside the system domain")
    if mode not in ("simple", "confluent"):
        raise ValueError(f"mode must be 'simple' or 'confluent', got {mode!r}")
    if sample_count < 1:
        raise ValueError("sample_count must be >= 1")
    if mode == "confluent" and system.smoothness < system.order_count - 1:
        raise SmoothnessError(
            f"confluent certification needs C^{system.order_count - 1}, "
            f"system is C^{system.smoothness}")

    rng = np.random.default_rng(seed)
    samples = _draw_samples(system, interval, mode, sample_count, rng)

    def report(ks):
        return collocation_determinant(system, ks, singular_rtol)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(report, samples))
    else:
        reports = [report(ks) for ks in samples]

    records = list(zip(samples, reports)) if keep_records else []
    min_abs = min(abs(r.determinant) for r in reports)
    ref_idx = next((i for i, r in enumerate(reports) if r.sign != 0), None)
    ref_sign = reports[ref_idx].sign if ref_idx is not None else None

    for ks, rep in zip(samples, reports):
        if rep.sign == 0:
            log.info("singular collocation matrix at %s", ks.to_list())
            return CertificationResult("refuted", len(samples), min_abs, ref_sign, ks, rep, records)
        if rep.sign != ref_sign:
            witness, wrep = ks, rep
            ref = samples[ref_idx]
            if ref.multiplicities == ks.multiplicities:
                cand = _bisect_singular(system, ref, ks, ref_sign)
                crep = report(cand)
                if crep.sign == 0:
                    witness, wrep = cand, crep
            log.info("sign disagreement; witness %s", witness.to_list())
            return CertificationResult("refuted", len(samples), min_abs, ref_sign,
                                       witness, wrep, records)
    return CertificationResult("certified-consistent", len(samples), min_abs, ref_sign,
                               records=records)


@dataclass
class ZeroReport:
    """Zeros of a span element found on a grid.

    ``count`` includes multiplicities (``None`` when the element vanishes
    identically). Resolution caveat: pairs of zeros closer than the grid step
    that do not produce a sign change or a local minimum of ``|u|`` are missed.
    """

    count: int | None
    roots: list  # [(t, multiplicity_lower_bound), ...]
    identically_zero: bool = False


def count_zeros(u: SpanElement, interval=None, grid_size: int = 2001,
                deriv_tol: float = 1e-8, touch_rtol: float = 1e-10) -> ZeroReport:
    """Count zeros of ``u`` on ``interval`` (default: the system domain).

    Sign changes on a uniform grid are refined by bisection to 1e-12; local
    minima of ``|u|`` without a sign change are refined by golden section and
    accepted as touching zeros when ``|u| <= touch_rtol * max|u|``. A zero with
    ``|u'| <= deriv_tol`` is annotated multiplicity >= 2 (>= 3 if ``u`` changes
    sign there).
    """
    if grid_size < 2:
        raise ValueError("grid_size must be >= 2")
    interval = u.system.domain if interval is None else Interval.of(interval)
    grid = interval.grid(grid_size)
    v = u(grid)
    if u.is_zero() or not np.any(v):
        return ZeroReport(None, [], identically_zero=True)
    scale = float(np.max(np.abs(v)))
    has_deriv = u.system.max_deriv >= 1

    found = []  # (t, crosses)
    for i in np.flatnonzero(v == 0.0):
        left = v[i - 1] if i > 0 else 0.0
        right = v[i + 1] if i + 1 < v.size else 0.0
        found.append((float(grid[i]), left * right < 0))
    for i in _jit.kernel("sign_changes")(np.ascontiguousarray(v)):
        found.append((bisect_root(u, grid[i], grid[i + 1], v[i]), True))
    av = np.abs(v)
    for i in range(1, v.size - 1):
        if v[i] != 0 and av[i] <= av[i - 1] and av[i] <= av[i + 1] \
                and v[i - 1] * v[i] > 0 and v[i] * v[i + 1] > 0:
            t = golden_min(lambda x: abs(u(x)), grid[i - 1], grid[i + 1])
            if abs(u(t)) <= touch_rtol * scale:
                found.append((t, False))

    found.sort()
    roots = []
    for t, crosses in found:
        if roots and abs(t - roots[-1][0]) <= 1e-9:
            continue
        flat = has_deriv and abs(u(t, 1)) <= deriv_tol
        if crosses:
            mult = 3 if flat else 1
        else:
            mult = 2 if (flat or not has_deriv) else 1
        roots.append((t, mult))
    return ZeroReport(sum(m for _, m in roots), roots)


def write_sweep_csv(records, path) -> None:
    """CSV of determinant sweeps: knot_0..knot_N, determinant, sign, smallest_singular_value."""
    records = list(records)
    if not records:
        raise ValueError("no records to write")
    n = records[0][0].total
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([f"knot_{i}" for i in range(n)]
                   + ["determinant", "sign", "smallest_singular_value"])
        for ks, rep in records:
            taus, _ = ks.expanded()
            w.writerow([repr(float(t)) for t in taus]
                       + [repr(float(rep.determinant)), rep.sign, repr(float(rep.smallest_singular_value))])
