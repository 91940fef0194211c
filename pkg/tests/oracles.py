"""Independent oracles: deliberately naive second paths used only by tests."""

from __future__ import annotations

import math

import numpy as np


def naive_count_R(fs, Q, psi, B, lam=0.0, gammas=None, guard=1e-12):
    """Pure double-loop count of the near-curve triples.

    ``fs`` is a list of plain Python coordinate callables.  Mirrors the set
    definition directly: q in (Q/2, Q], (a+lam)/q in B, each |q f_j - g_j - b|
    strictly below psi (guard band excluded).
    """
    from fractions import Fraction

    if gammas is None:
        gammas = [0.0] * len(fs)
    total = 0
    triples = []
    q = Q // 2 + 1
    while q <= Q:
        a = math.ceil(Fraction(q) * Fraction(B[0]) - Fraction(lam))
        a_hi = math.floor(Fraction(q) * Fraction(B[1]) - Fraction(lam))
        while a <= a_hi:
            pt = (a + lam) / q
            combos = [[]]
            for f, g in zip(fs, gammas):
                y = q * f(pt) - g
                picks = []
                for b in range(math.floor(y) - 1, math.floor(y) + 2):
                    if abs(y - b) < psi - guard:
                        picks.append(b)
                combos = [c + [b] for c in combos for b in picks]
            for c in combos:
                triples.append((q, a, *c))
            total += len(combos)
            a += 1
        q += 1
    return total, sorted(triples)


_BRUTE_GRIDS: dict = {}


def _coefficient_grid(dim, box):
    key = (dim, box)
    if key not in _BRUTE_GRIDS:
        axes = [np.arange(-box, box + 1, dtype=np.int32)] * dim
        grid = np.stack(np.meshgrid(*axes, indexing="ij")).reshape(dim, -1)
        _BRUTE_GRIDS[key] = (grid.astype(float), np.any(grid != 0, axis=0))
    return _BRUTE_GRIDS[key]


def brute_svp_sup(basis, box=20):
    """Minimum sup-norm over all nonzero coefficient vectors in [-box, box]^dim."""
    basis = np.asarray(basis, dtype=float)
    grid, nonzero = _coefficient_grid(basis.shape[0], box)
    sups = np.abs(basis @ grid).max(axis=0)
    return float(sups[nonzero].min())


def grid_union_measure(intervals, clip, cells=1_000_000):
    """Indicator-grid estimate of the union measure inside clip."""
    lo, hi = clip
    xs = lo + (np.arange(cells) + 0.5) * (hi - lo) / cells
    covered = np.zeros(cells, dtype=bool)
    for a, b in intervals:
        covered |= (xs >= a) & (xs <= b)
    return covered.mean() * (hi - lo)


def curve_delta_oracle(fvals_fn, x, c, Q, psi, cap=1.3):
    """Structural shortest-vector oracle for the d=1 curve lattice.

    Scans denominators q directly: any lattice vector with sup-norm <= cap has
    0 < |q| <= cap*c*Q, and given q the optimal a and b lie within explicit
    windows.  Exact whenever the true delta is below cap; returns cap-level
    values otherwise.  Requires parameters where q = 0 vectors and non-nearest
    b cannot compete (asserted below).
    """
    f, fp = fvals_fn(x)
    g1 = [fv - x * dv for fv, dv in zip(f, fp)]
    m = len(f)
    midscale = psi**m * Q  # the (psi^m Q)^{1/d} row scale at d = 1
    assert midscale > cap and 1.0 / psi > cap and cap * psi < 0.5
    best = math.inf
    qmax = int(math.floor(cap * c * Q)) + 1
    for q in range(1, qmax + 1):
        a_center = round(q * x)
        ka = max(1, int(math.ceil(cap / midscale)) + 1)
        for a in range(a_center - ka, a_center + ka + 1):
            coord_mid = midscale * abs(q * x - a)
            worst = max(coord_mid, q / (c * Q))
            for j in range(m):
                val = q * g1[j] + a * fp[j]
                b = round(val)
                worst = max(worst, abs(val - b) / psi)
            best = min(best, worst)
    return best
