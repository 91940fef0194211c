"""Exhaustive enumeration of shifted rational points near a curve (d = 1).

The set under study collects integer triples (q, a, b) with Q/2 < q <= Q,
(a + lambda)/q inside a window B, and every |q f_j((a+lambda)/q) - gamma_j - b_j|
strictly below psi.  Enumeration is O(Q^2) per configuration and vectorised
over a; all strict comparisons carry a guard band so triples landing within
1e-12 of a boundary are tallied separately instead of silently included.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product as iter_product
from typing import Iterable, Optional, Sequence

import numpy as np

from .curves import Curve
from .detector import RationalWitness

GUARD = 1e-12
DEFAULT_Q_CAP = 1 << 16

Shift = tuple[float, tuple[float, ...]]  # (lambda, gamma_1..gamma_m), d = 1


def _normalise_theta(theta, m: int) -> Shift:
    if theta is None or (isinstance(theta, (int, float)) and theta == 0):
        return 0.0, (0.0,) * m
    lam, gam = theta
    if isinstance(lam, (tuple, list)):
        lam = lam[0]
    if isinstance(gam, (int, float)):
        gam = (float(gam),) * m
    gam = tuple(float(v) for v in gam)
    if len(gam) != m:
        raise ValueError(f"gamma must have length {m}")
    return float(lam), gam


@dataclass
class CountResult:
    """Outcome of one enumeration cell.

    ``triples`` holds rows (q, a, b_1..b_m) in ascending (q, a, b) order when
    the enumeration was asked to collect them; ``boundary`` counts triples
    that graze the strict inequalities within the guard band.
    """

    Q: int
    psi: float
    B: tuple[float, float]
    theta: Shift
    count: int
    boundary: int
    triples: Optional[np.ndarray]

    @property
    def witnesses(self) -> list[RationalWitness]:
        if self.triples is None:
            raise ValueError("enumeration ran with collect=False")
        return [
            RationalWitness(q=int(row[0]), a=(int(row[1]),), b=tuple(int(v) for v in row[2:]))
            for row in self.triples
        ]

    def points(self) -> np.ndarray:
        if self.triples is None:
            raise ValueError("enumeration ran with collect=False")
        lam = self.theta[0]
        if len(self.triples) == 0:
            return np.empty(0)
        return (self.triples[:, 1] + lam) / self.triples[:, 0]


def _a_range(q: int, B: tuple[float, float], lam: float) -> tuple[int, int]:
    # exact endpoints: every float is a rational, so ceil/floor are bit-exact
    loF = Fraction(q) * Fraction(B[0]) - Fraction(lam)
    hiF = Fraction(q) * Fraction(B[1]) - Fraction(lam)
    return math.ceil(loF), math.floor(hiF)


def _strict_counts(y: np.ndarray, s: float) -> tuple[np.ndarray, np.ndarray]:
    """Per-entry count of integers b with |y - b| < s, and the smallest such b."""
    if s <= 0:
        return np.zeros(y.shape, dtype=np.int64), np.zeros(y.shape, dtype=np.int64)
    lo = np.floor(y - s).astype(np.int64) + 1  # smallest integer > y - s
    hi = np.ceil(y + s).astype(np.int64) - 1   # largest integer  < y + s
    return np.maximum(hi - lo + 1, 0), lo


def enumerate_R(curve: Curve, Q: int, psi: float, B: tuple[float, float],
                theta=None, *, guard: float = GUARD, collect: bool = True,
                allow_large: bool = False) -> CountResult:
    """All integer triples of the near-curve set at height Q and width psi.

    Iterates q with 2q > Q, q <= Q (exact integer predicates), a with
    (a + lambda)/q in B, and per coordinate every integer b_j strictly inside
    the psi-window.  With ``collect=False`` only the counts are accumulated,
    which keeps Q-sweeps cheap.
    """
    Q = int(Q)
    if Q < 2:
        raise ValueError("Q must be >= 2")
    if Q > DEFAULT_Q_CAP and not allow_large:
        raise ValueError(f"Q={Q} above the default cap {DEFAULT_Q_CAP}; pass allow_large=True")
    if not (0 < psi < 1):
        raise ValueError("psi must lie in (0, 1)")
    m = curve.n - 1
    lam, gam = _normalise_theta(theta, m)
    lo, hi = float(B[0]), float(B[1])
    if lo > hi:
        return CountResult(Q=Q, psi=psi, B=(lo, hi), theta=(lam, gam), count=0,
                           boundary=0, triples=np.empty((0, 2 + m), dtype=np.int64) if collect else None)
    if not (curve.contains(lo) and curve.contains(hi)):
        raise ValueError(f"B={B} not contained in curve domain {curve.domain}")

    s_in = psi - guard
    s_wide = psi + guard
    total = 0
    boundary = 0
    blocks: list[np.ndarray] = []
    for q in range(Q // 2 + 1, Q + 1):
        a_lo, a_hi = _a_range(q, (lo, hi), lam)
        if a_hi < a_lo:
            continue
        a = np.arange(a_lo, a_hi + 1, dtype=np.int64)
        x = (a + lam) / q
        counts = np.ones(a.shape, dtype=np.int64)
        wide_counts = np.ones(a.shape, dtype=np.int64)
        first_b = np.empty((len(a), m), dtype=np.int64)
        nb = np.empty((len(a), m), dtype=np.int64)
        for j in range(1, m + 1):
            y = q * np.asarray(curve.coord_values(j, x), dtype=float) - gam[j - 1]
            nb_j, lo_j = _strict_counts(y, s_in)
            nbw_j, _ = _strict_counts(y, s_wide)
            counts *= nb_j
            wide_counts *= nbw_j
            nb[:, j - 1] = nb_j
            first_b[:, j - 1] = lo_j
        total += int(counts.sum())
        boundary += int((wide_counts - counts).sum())
        if collect and counts.any():
            keep = np.nonzero(counts)[0]
            simple = keep[(nb[keep] == 1).all(axis=1)]
            rows = []
            if len(simple):
                block = np.empty((len(simple), 2 + m), dtype=np.int64)
                block[:, 0] = q
                block[:, 1] = a[simple]
                block[:, 2:] = first_b[simple]
                rows.append(block)
            multi = keep[(nb[keep] > 1).any(axis=1)]
            for idx in multi:
                choices = [range(first_b[idx, j], first_b[idx, j] + nb[idx, j]) for j in range(m)]
                for combo in iter_product(*choices):
                    rows.append(np.array([[q, a[idx], *combo]], dtype=np.int64))
            block = np.concatenate(rows, axis=0)
            order = np.lexsort(tuple(block[:, k] for k in range(block.shape[1] - 1, 0, -1)))
            blocks.append(block[order])

    triples = None
    if collect:
        triples = np.concatenate(blocks, axis=0) if blocks else np.empty((0, 2 + m), dtype=np.int64)
    return CountResult(Q=Q, psi=psi, B=(lo, hi), theta=(lam, gam), count=total,
                       boundary=boundary, triples=triples)


def count_R_psi_sweep(curve: Curve, Q: int, psis: Sequence[float], B: tuple[float, float],
                      theta=None, *, guard: float = GUARD,
                      allow_large: bool = False) -> list[int]:
    """Counts of enumerate_R for several psi at one Q, sharing the curve values."""
    Q = int(Q)
    if Q < 2:
        raise ValueError("Q must be >= 2")
    if Q > DEFAULT_Q_CAP and not allow_large:
        raise ValueError(f"Q={Q} above the default cap {DEFAULT_Q_CAP}; pass allow_large=True")
    m = curve.n - 1
    lam, gam = _normalise_theta(theta, m)
    lo, hi = float(B[0]), float(B[1])
    totals = [0] * len(psis)
    for q in range(Q // 2 + 1, Q + 1):
        a_lo, a_hi = _a_range(q, (lo, hi), lam)
        if a_hi < a_lo:
            continue
        a = np.arange(a_lo, a_hi + 1, dtype=np.int64)
        x = (a + lam) / q
        ys = [q * np.asarray(curve.coord_values(j, x), dtype=float) - gam[j - 1]
              for j in range(1, m + 1)]
        for k, psi in enumerate(psis):
            counts = np.ones(a.shape, dtype=np.int64)
            for y in ys:
                nb_j, _ = _strict_counts(y, psi - guard)
                counts *= nb_j
            totals[k] += int(counts.sum())
    return totals


def recheck_triples(curve: Curve, result: CountResult, sample: Optional[int] = None,
                    rng: Optional[np.random.Generator] = None) -> bool:
    """Independent re-verification of emitted triples via exact arithmetic.

    Uses the exact rational evaluators of the curve coordinates (available for
    the polynomial catalog) as a second evaluation path.
    """
    if result.triples is None:
        raise ValueError("nothing collected to recheck")
    rows = result.triples
    if sample is not None and len(rows) > sample:
        rng = rng or np.random.default_rng(0)
        rows = rows[rng.choice(len(rows), size=sample, replace=False)]
    lam, gam = result.theta
    lamF = Fraction(lam)
    psiF = Fraction(result.psi)
    loF, hiF = Fraction(result.B[0]), Fraction(result.B[1])
    for row in rows:
        q, a, bs = int(row[0]), int(row[1]), [int(v) for v in row[2:]]
        if not (2 * q > result.Q and q <= result.Q):
            return False
        ptF = (a + lamF) / q
        if not (loF <= ptF <= hiF):
            return False
        for j, b in enumerate(bs, start=1):
            exact = curve.exact_coord(j)
            if exact is None:
                val = abs(q * float(curve.coord_values(j, float(ptF))) - gam[j - 1] - b)
                if not val < result.psi:
                    return False
            else:
                val = abs(q * exact(ptF) - Fraction(gam[j - 1]) - b)
                if not val < psiF:
                    return False
    return True


def witness_in_R(w: RationalWitness, curve: Curve, Q: float, psi: float,
                 B: tuple[float, float], theta=None) -> bool:
    """Direct membership test of a witness in the defining inequalities."""
    m = curve.n - 1
    lam, gam = _normalise_theta(theta, m)
    if not (2 * w.q > Q and w.q <= Q):
        return False
    pt = (w.a[0] + lam) / w.q
    if not (B[0] <= pt <= B[1]):
        return False
    for j in range(1, m + 1):
        val = abs(w.q * float(curve.coord_values(j, pt)) - gam[j - 1] - w.b[j - 1])
        if not val < psi:
            return False
    return True


# ---------------------------------------------------------------------------
# interval unions and coverage


@dataclass(frozen=True)
class IntervalUnion:
    """Sorted disjoint closed intervals; measure is the sum of lengths."""

    intervals: tuple[tuple[float, float], ...]

    @classmethod
    def from_intervals(cls, intervals: Iterable[tuple[float, float]]) -> "IntervalUnion":
        items = sorted((float(lo), float(hi)) for lo, hi in intervals if hi >= lo)
        merged: list[list[float]] = []
        for lo, hi in items:
            if merged and lo <= merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], hi)
            else:
                merged.append([lo, hi])
        return cls(intervals=tuple((lo, hi) for lo, hi in merged))

    @property
    def measure(self) -> float:
        return math.fsum(hi - lo for lo, hi in self.intervals)

    def clipped(self, clip: tuple[float, float]) -> "IntervalUnion":
        lo_c, hi_c = clip
        out = []
        for lo, hi in self.intervals:
            lo2, hi2 = max(lo, lo_c), min(hi, hi_c)
            if hi2 >= lo2:
                out.append((lo2, hi2))
        return IntervalUnion(intervals=tuple(out))


def interval_union_measure(intervals: Iterable[tuple[float, float]],
                           clip: Optional[tuple[float, float]] = None) -> float:
    """Length of the union of intervals, optionally clipped; sweep-line exact."""
    arr = np.asarray([(lo, hi) for lo, hi in intervals], dtype=float)
    if arr.size == 0:
        return 0.0
    lo, hi = arr[:, 0], arr[:, 1]
    if clip is not None:
        lo = np.maximum(lo, clip[0])
        hi = np.minimum(hi, clip[1])
    keep = hi > lo
    lo, hi = lo[keep], hi[keep]
    if lo.size == 0:
        return 0.0
    order = np.argsort(lo, kind="stable")
    lo, hi = lo[order], hi[order]
    run_max = np.maximum.accumulate(hi)
    prev_max = np.concatenate(([lo[0]], run_max[:-1]))
    contrib = np.maximum(0.0, hi - np.maximum(lo, prev_max))
    return float(np.sum(contrib))


def delta_coverage(witnesses, rho: float, B: tuple[float, float],
                   lam: float = 0.0) -> float:
    """Measure of the union of rho-balls around the shifted rational points, inside B."""
    if rho <= 0:
        raise ValueError("rho must be positive")
    if isinstance(witnesses, CountResult):
        pts = witnesses.points()
    else:
        pts = np.asarray([(w.a[0] + lam) / w.q for w in witnesses], dtype=float)
    if pts.size == 0:
        return 0.0
    return interval_union_measure(np.stack((pts - rho, pts + rho), axis=1), clip=B)


# ---------------------------------------------------------------------------
# scaling fits and the counting lower bound


@dataclass(frozen=True)
class ScalingFit:
    """Least-squares fit of log y against log x."""

    slope: float
    intercept: float
    r_squared: float
    samples: tuple[tuple[float, float], ...]


def scaling_fit(samples: Sequence[tuple[float, float]]) -> ScalingFit:
    if len(samples) < 3:
        raise ValueError("need at least 3 samples")
    xs = np.asarray([s[0] for s in samples], dtype=float)
    ys = np.asarray([s[1] for s in samples], dtype=float)
    if np.any(xs <= 0) or np.any(ys <= 0):
        raise ValueError("samples must be positive for a log-log fit")
    lx, ly = np.log(xs), np.log(ys)
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0 else 1.0 - float(np.sum(resid**2)) / ss_tot
    return ScalingFit(slope=float(slope), intercept=float(intercept),
                      r_squared=max(0.0, min(1.0, r2)),
                      samples=tuple((float(a), float(b)) for a, b in samples))


@dataclass(frozen=True)
class LowerBoundCheck:
    """Outcome of the counting lower bound; ok is None when out of regime."""

    in_regime: bool
    ok: Optional[bool]
    bound: float
    psi_floor: float


def lower_bound_check(count: int, B: tuple[float, float], C0: float, psi: float,
                      Q: float, n: int, K0: float) -> LowerBoundCheck:
    """count >= |B|/(4 C0) psi^{n-1} Q^2, guarded by the admissibility window."""
    floor = K0 * Q ** (-3.0 / (2 * n - 1))
    in_regime = floor <= psi < 1
    size = max(0.0, B[1] - B[0])
    bound = size / (4.0 * C0) * psi ** (n - 1) * Q**2
    ok = bool(count >= bound) if in_regime else None
    return LowerBoundCheck(in_regime=in_regime, ok=ok, bound=bound, psi_floor=floor)


# ---------------------------------------------------------------------------
# CSV emission


def write_triples_csv(path, curve: Curve, result: CountResult) -> None:
    """Columns q,a,b1..bm,x_point,slack_f1..fm with LF endings and a header row."""
    if result.triples is None:
        raise ValueError("enumeration ran with collect=False")
    m = curve.n - 1
    lam, gam = result.theta
    header = ["q", "a"] + [f"b{j}" for j in range(1, m + 1)] + ["x_point"] + [
        f"slack_f{j}" for j in range(1, m + 1)
    ]
    rows = result.triples
    pts = result.points() if len(rows) else np.empty(0)
    slacks = []
    for j in range(1, m + 1):
        if len(rows):
            y = rows[:, 0] * np.asarray(curve.coord_values(j, pts), dtype=float) - gam[j - 1]
            slacks.append(result.psi - np.abs(y - rows[:, 1 + j]))
        else:
            slacks.append(np.empty(0))
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for i in range(len(rows)):
            rec = [int(v) for v in rows[i]]
            rec.append(repr(float(pts[i])))
            rec.extend(repr(float(s[i])) for s in slacks)
            writer.writerow(rec)
