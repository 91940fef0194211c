"""Curve lattices and sup-norm shortest vectors.

The scaled lattice attached to a curve point is spanned by the columns of
``g^{-1} G(x)`` where ``G(x)`` is the unimodular frame matrix of the curve and
``g`` the diagonal scaling built from ``(c, Q, psi)``.  Dimensions are tiny
(``n + 1 <= 8``), so the shortest sup-norm vector is found exactly by an
LLL-style reduction followed by exhaustive enumeration inside the Euclidean
ball of radius ``sqrt(dim)`` times the best known sup-norm; the bound
``|v|_inf <= |v|_2`` makes that ball exhaustive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .curves import Curve, eval_jet
from .intlinalg import is_unimodular

_REAL_DTYPE = np.float64

MAX_SVP_DIM = 8
MAX_MINIMA_DIM = 6


def set_precision(name: str) -> None:
    """Select the float type for lattice matrices: 'double' or 'extended'."""
    global _REAL_DTYPE
    table = {"double": np.float64, "extended": np.longdouble}
    if name not in table:
        raise ValueError(f"unknown precision {name!r}")
    _REAL_DTYPE = table[name]


def real_dtype():
    return _REAL_DTYPE


@dataclass(frozen=True)
class ApproxParams:
    """Full parameter record (c, Q, psi, d, m, B, theta) of one experiment cell."""

    c: float
    Q: float
    psi: float
    d: int
    m: int
    B: tuple[float, float]
    theta: Optional[tuple[tuple[float, ...], tuple[float, ...]]] = None

    def __post_init__(self):
        if self.c <= 0:
            raise ValueError("c must be positive")
        if self.Q < 1:
            raise ValueError("Q must be >= 1")
        if not (0 < self.psi <= 1):
            raise ValueError("psi must lie in (0, 1]")
        if self.d < 1 or self.m < 1:
            raise ValueError("d and m must be >= 1")
        if self.theta is None:
            object.__setattr__(self, "theta", ((0.0,) * self.d, (0.0,) * self.m))
        lam, gam = self.theta
        if len(lam) != self.d or len(gam) != self.m:
            raise ValueError("theta parts must have lengths d and m")
        object.__setattr__(self, "theta", (tuple(float(v) for v in lam), tuple(float(v) for v in gam)))

    @property
    def n(self) -> int:
        return self.d + self.m

    @classmethod
    def for_curve(cls, curve: Curve, c: float, Q: float, psi: float,
                  B: tuple[float, float], lam: float = 0.0,
                  gamma: Optional[Sequence[float]] = None) -> "ApproxParams":
        m = curve.n - 1
        gam = tuple(gamma) if gamma is not None else (0.0,) * m
        if len(gam) == 1 and m > 1:
            gam = gam * m
        return cls(c=c, Q=Q, psi=psi, d=1, m=m, B=(float(B[0]), float(B[1])),
                   theta=((float(lam),), gam))


@dataclass(frozen=True)
class LatticeBasis:
    """A reduced basis together with its exact integer preimage.

    ``columns = source @ preimage`` and ``|det preimage| = 1``, so the columns
    span the same lattice as the source basis.
    """

    dim: int
    columns: np.ndarray
    preimage: np.ndarray
    source: np.ndarray

    @property
    def max_sup(self) -> float:
        return float(np.max(np.abs(self.columns)))


@dataclass(frozen=True)
class SuccessiveMinima:
    """Sup-norm successive minima with integer vectors attaining them."""

    values: np.ndarray
    achieving_vectors: np.ndarray  # columns are integer coordinate vectors
    covolume: float

    def minkowski_bounds(self) -> tuple[float, float, float]:
        """(lower, product, upper) for the Minkowski product inequality."""
        dim = len(self.values)
        prod = float(np.prod(self.values))
        return self.covolume / math.factorial(dim), prod, self.covolume


# ---------------------------------------------------------------------------
# matrix builders


def monge_frame_matrix(x_vec: Sequence[float], f_vals: Sequence[float],
                       jac: np.ndarray) -> np.ndarray:
    """The (n+1)x(n+1) frame matrix for a Monge patch of any dimension d.

    Rows 1..m:   (f_j - x . grad f_j,  grad f_j,  -e_j)
    Rows m+1..n: (x_i, -e_i, 0)
    Row n+1:     (1, 0, ..., 0)

    The determinant is +-1 by cofactor expansion along the unit structure.
    """
    x_vec = np.asarray(x_vec, dtype=_REAL_DTYPE)
    f_vals = np.asarray(f_vals, dtype=_REAL_DTYPE)
    jac = np.asarray(jac, dtype=_REAL_DTYPE)
    d = x_vec.shape[0]
    m = f_vals.shape[0]
    if jac.shape != (m, d):
        raise ValueError("jacobian must have shape (m, d)")
    n = d + m
    G = np.zeros((n + 1, n + 1), dtype=_REAL_DTYPE)
    g_vals = f_vals - jac @ x_vec
    for j in range(m):
        G[j, 0] = g_vals[j]
        G[j, 1 : 1 + d] = jac[j]
        G[j, 1 + d + j] = -1.0
    for i in range(d):
        G[m + i, 0] = x_vec[i]
        G[m + i, 1 + i] = -1.0
    G[n, 0] = 1.0
    return G


def build_G(curve: Curve, x: float) -> np.ndarray:
    """Frame matrix G(x) of a curve (d = 1 Monge patch); |det G| = 1."""
    jet = eval_jet(curve, x, 1)
    f_vals = jet.values[1:, 0]
    jac = jet.values[1:, 1].reshape(-1, 1)
    return monge_frame_matrix([x], f_vals, jac)


def scaling_diagonal(params: ApproxParams) -> np.ndarray:
    """Diagonal of g(c, Q, psi): m copies of psi, d copies of (psi^m Q)^(-1/d), then cQ."""
    mid = (params.psi ** params.m * params.Q) ** (-1.0 / params.d)
    diag = [params.psi] * params.m + [mid] * params.d + [params.c * params.Q]
    return np.asarray(diag, dtype=_REAL_DTYPE)


def build_scaling(params: ApproxParams) -> np.ndarray:
    """The diagonal matrix g(c, Q, psi); det g = c."""
    return np.diag(scaling_diagonal(params))


def curve_lattice_basis(curve: Curve, x: float, params: ApproxParams) -> np.ndarray:
    """Columns spanning g^{-1} G(x) Z^{n+1}."""
    if params.n != curve.n:
        raise ValueError("params dimensions do not match the curve")
    G = build_G(curve, x)
    return G / scaling_diagonal(params)[:, None]


def build_h(curve: Curve, x: float, params: ApproxParams) -> np.ndarray:
    """h(x) = c^{1/(n+1)} g^{-1} G(x); |det h| = 1."""
    scale = params.c ** (1.0 / (params.n + 1))
    return scale * curve_lattice_basis(curve, x, params)


# ---------------------------------------------------------------------------
# LLL reduction with exact integer transform


def _gso(B: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Gram-Schmidt orthogonalisation of the columns; returns (B*, mu)."""
    n = B.shape[1]
    Bs = np.array(B, copy=True)
    mu = np.eye(n, dtype=B.dtype)
    for i in range(n):
        v = np.array(B[:, i], copy=True)
        for j in range(i):
            denom = Bs[:, j] @ Bs[:, j]
            if denom == 0:
                raise ValueError("singular (or numerically singular) basis")
            mu_ij = (B[:, i] @ Bs[:, j]) / denom
            mu[i, j] = mu_ij
            v -= mu_ij * Bs[:, j]
        Bs[:, i] = v
    return Bs, mu


def _check_nonsingular(Bs: np.ndarray, B: np.ndarray) -> None:
    norms = np.sqrt(np.sum(np.asarray(Bs, dtype=float) ** 2, axis=0))
    scale = float(np.max(np.abs(np.asarray(B, dtype=float)))) or 1.0
    if np.min(norms) <= 1e-13 * scale:
        raise ValueError("singular (or numerically singular) basis")


def lll_reduce(basis, delta: float = 0.99, max_swaps: Optional[int] = None):
    """Floating-point LLL on the columns of ``basis``.

    Returns ``(W, U)`` where ``W = basis @ U`` is the reduced basis and ``U``
    is a list of integer columns (exact arithmetic) with ``|det U| = 1``.
    """
    B = np.array(basis, dtype=_REAL_DTYPE)
    if B.ndim != 2 or B.shape[0] != B.shape[1]:
        raise ValueError("basis must be a square matrix of column vectors")
    n = B.shape[1]
    U = [[1 if i == j else 0 for i in range(n)] for j in range(n)]  # columns
    Bs, mu = _gso(B)
    _check_nonsingular(Bs, B)
    if max_swaps is None:
        max_swaps = 10_000 * n * n
    norms2 = np.sum(Bs * Bs, axis=0)
    k = 1
    swaps = 0
    while k < n:
        for j in range(k - 1, -1, -1):
            q = int(round(float(mu[k, j])))
            if q:
                B[:, k] -= q * B[:, j]
                U[k] = [a - q * b for a, b in zip(U[k], U[j])]
                mu[k, :j] -= q * mu[j, :j]
                mu[k, j] -= q
        if norms2[k] >= (delta - float(mu[k, k - 1]) ** 2) * norms2[k - 1]:
            k += 1
        else:
            B[:, [k - 1, k]] = B[:, [k, k - 1]]
            U[k - 1], U[k] = U[k], U[k - 1]
            Bs, mu = _gso(B)
            norms2 = np.sum(Bs * Bs, axis=0)
            k = max(k - 1, 1)
            swaps += 1
            if swaps > max_swaps:
                break  # float flip-flop guard; current basis is still valid
    return B, U


def _u_columns_to_array(U: list[list[int]]) -> np.ndarray:
    flat = [v for col in U for v in col]
    if max(abs(v) for v in flat) < 2**62:
        return np.array(U, dtype=np.int64).T
    return np.array(U, dtype=object).T


# ---------------------------------------------------------------------------
# enumeration


def _triangular_data(W: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Squared GS norms and mu coefficients for norm evaluation.

    For integer coefficients t, |W t|_2^2 = sum_i norms2[i] * y_i^2 with
    y_i = t_i + sum_{j>i} mu[j, i] t_j.
    """
    Bs, mu = _gso(W)
    norms2 = np.sum(Bs * Bs, axis=0)
    return norms2, mu


def _enumerate_ball(W: np.ndarray, norms2, mu, radius2_fn, visit) -> None:
    """DFS over all nonzero integer t with |W t|_2^2 <= radius2_fn().

    ``visit(t)`` is called on every such coefficient vector.  The radius may
    shrink between calls (used by the shortest-vector search).
    """
    n = W.shape[1]
    t = [0] * n

    def dfs(level: int, acc: float) -> None:
        if level < 0:
            if any(t):
                visit(t)
            return
        rem = radius2_fn() - acc
        if rem < 0:
            return
        center = -math.fsum(float(mu[j, level]) * t[j] for j in range(level + 1, n))
        half = math.sqrt(rem / float(norms2[level]))
        lo = math.ceil(center - half - 1e-9)
        hi = math.floor(center + half + 1e-9)
        for ti in range(lo, hi + 1):
            y = ti - center
            t[level] = ti
            dfs(level - 1, acc + float(norms2[level]) * y * y)
        t[level] = 0

    dfs(n - 1, 0.0)


def shortest_sup(basis) -> tuple[float, np.ndarray]:
    """Exact (to rounding) sup-norm shortest vector of a full-rank lattice.

    Returns ``(delta, p)`` where ``delta = |W p|_inf`` is minimal over nonzero
    lattice vectors and ``p`` holds the integer coordinates in the input basis.
    """
    B = np.asarray(basis, dtype=_REAL_DTYPE)
    if B.ndim != 2 or B.shape[0] != B.shape[1]:
        raise ValueError("basis must be square")
    dim = B.shape[0]
    if dim > MAX_SVP_DIM:
        raise ValueError(f"dimension {dim} exceeds the supported {MAX_SVP_DIM}")
    W, Ucols = lll_reduce(B)
    U = _u_columns_to_array(Ucols)
    sups = np.max(np.abs(W), axis=0)
    i0 = int(np.argmin(sups))
    state = {"best": float(sups[i0]), "t": tuple(1 if i == i0 else 0 for i in range(dim))}
    norms2, mu = _triangular_data(W)
    Wf = np.asarray(W, dtype=float)

    def radius2() -> float:
        return dim * state["best"] ** 2 * (1.0 + 1e-12)

    def visit(t) -> None:
        v = Wf @ t
        s = float(np.max(np.abs(v)))
        if s < state["best"]:
            state["best"] = s
            state["t"] = tuple(t)

    _enumerate_ball(W, norms2, mu, radius2, visit)
    p = np.dot(U, np.array(state["t"], dtype=U.dtype))
    return state["best"], p


def reduced_basis(basis) -> LatticeBasis:
    """LLL-reduced basis of the same lattice with its unimodular preimage."""
    B = np.asarray(basis, dtype=_REAL_DTYPE)
    if B.ndim != 2 or B.shape[0] != B.shape[1]:
        raise ValueError("basis must be square")
    W, Ucols = lll_reduce(B)
    U = _u_columns_to_array(Ucols)
    if not is_unimodular(U.tolist()):
        raise AssertionError("LLL transform lost unimodularity")
    return LatticeBasis(dim=B.shape[0], columns=W, preimage=U, source=B)


def successive_minima_sup(basis) -> SuccessiveMinima:
    """Sup-norm successive minima by exhaustive enumeration (dim <= 6)."""
    B = np.asarray(basis, dtype=_REAL_DTYPE)
    if B.ndim != 2 or B.shape[0] != B.shape[1]:
        raise ValueError("basis must be square")
    dim = B.shape[0]
    if dim > MAX_MINIMA_DIM:
        raise ValueError(f"dimension {dim} exceeds the supported {MAX_MINIMA_DIM}")
    W, Ucols = lll_reduce(B)
    U = _u_columns_to_array(Ucols)
    # every minimum is attained inside the ball that contains the basis itself
    S = float(np.max(np.abs(W)))
    norms2, mu = _triangular_data(W)
    Wf = np.asarray(W, dtype=float)
    found: list[tuple[float, tuple[int, ...]]] = []

    def radius2() -> float:
        return dim * S * S * (1.0 + 1e-9)

    def visit(t) -> None:
        s = float(np.max(np.abs(Wf @ t)))
        if s <= S * (1.0 + 1e-12):
            found.append((s, tuple(t)))

    _enumerate_ball(W, norms2, mu, radius2, visit)
    found.sort(key=lambda item: (item[0], item[1]))
    values: list[float] = []
    chosen: list[tuple[int, ...]] = []
    reduced_rows: list[list] = []  # fraction-free elimination state
    for s, t in found:
        row = [int(v) for v in t]
        for piv in reduced_rows:
            lead = next(i for i, v in enumerate(piv) if v != 0)
            if row[lead] != 0:
                f1, f2 = piv[lead], row[lead]
                row = [f1 * a - f2 * b for a, b in zip(row, piv)]
        if any(row):
            reduced_rows.append(row)
            chosen.append(t)
            values.append(s)
            if len(chosen) == dim:
                break
    if len(chosen) < dim:
        raise AssertionError("enumeration failed to reach full rank")
    vecs = np.stack([np.dot(U, np.array(t, dtype=U.dtype)) for t in chosen], axis=1)
    covol = float(np.prod(np.sqrt(norms2.astype(float))))
    return SuccessiveMinima(values=np.array(values), achieving_vectors=vecs, covolume=covol)
