"""l1-penalized least squares: coordinate descent, LARS homotopy and KKT checks.

Every solver minimizes ``0.5 * ||y - X b||^2 + lam * ||b||_1`` with no
intercept. Columns of ``X`` are centered with unit sample standard deviation
(not rescaled by ``1/sqrt(n)``), so ``lam`` lives on the scale of ``|x_j^T y|``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .data import standardize
from .errors import DegenerateStep, InvalidProblem, NoConvergence

CD_TOL = 1e-10
CD_MAX_ITER = 10_000
KKT_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class LassoProblem:
    X: np.ndarray
    y: np.ndarray
    feature_names: tuple = None
    gram: np.ndarray = field(init=False, repr=False)
    xty: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        X = np.array(self.X, dtype=float)
        y = np.array(self.y, dtype=float).ravel()
        if X.ndim != 2 or X.shape[0] != y.shape[0]:
            raise InvalidProblem(f"X {X.shape} and y {y.shape} do not match")
        n, p = X.shape
        if n < 2 or p < 1:
            raise InvalidProblem("need n >= 2 and p >= 1")
        if np.abs(X.mean(axis=0)).max() >= 1e-10 * max(1.0, np.abs(X).max()):
            raise InvalidProblem("design columns must be centered")
        if np.abs(X.std(axis=0, ddof=1) - 1.0).max() >= 1e-8:
            raise InvalidProblem("design columns must have unit sample standard deviation")
        if abs(y.mean()) >= 1e-10 * max(1.0, np.abs(y).max()):
            raise InvalidProblem("response must be centered")
        names = self.feature_names
        names = tuple(f"x{j + 1}" for j in range(p)) if names is None else tuple(names)
        if len(names) != p:
            raise InvalidProblem(f"expected {p} feature names, got {len(names)}")
        for a in (X, y):
            a.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "feature_names", names)
        object.__setattr__(self, "gram", X.T @ X)
        object.__setattr__(self, "xty", X.T @ y)

    @classmethod
    def from_data(cls, X, y, feature_names=None) -> "LassoProblem":
        """Standardize ``X`` column-wise and center ``y``."""
        Z, _ = standardize(X)
        y = np.asarray(y, dtype=float)
        return cls(Z, y - y.mean(), feature_names)

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]


@dataclass(frozen=True)
class KKTResult:
    passed: bool
    residuals: np.ndarray
    violations: tuple

    def __bool__(self):
        return self.passed


@dataclass(frozen=True)
class LassoPath:
    lambdas: np.ndarray        # descending
    coefs: np.ndarray          # (len(lambdas), p)
    feature_names: tuple
    entry_lambda: np.ndarray   # NaN where a feature never enters
    kind: str = "grid"         # "grid" or "lars" (breakpoints, piecewise linear)

    def coef_at(self, lam) -> np.ndarray:
        """Linear interpolation between path points (exact for LARS breakpoints)."""
        lams = self.lambdas[::-1]
        C = self.coefs[::-1]
        return np.array([np.interp(lam, lams, C[:, j]) for j in range(C.shape[1])])

    @property
    def p(self) -> int:
        return self.coefs.shape[1]


def soft_threshold(z, t):
    if np.any(np.asarray(t) < 0):
        raise ValueError("threshold must be nonnegative")
    return np.sign(z) * np.maximum(np.abs(z) - t, 0.0)


def lambda_max(prob: LassoProblem) -> float:
    return float(np.abs(prob.xty).max())


def objective(prob: LassoProblem, b, lam: float) -> float:
    r = prob.y - prob.X @ b
    return 0.5 * float(r @ r) + lam * float(np.abs(b).sum())


def kkt_check(prob: LassoProblem, b, lam: float, tol: float = KKT_TOL) -> KKTResult:
    """Subgradient optimality conditions, one residual per coordinate.

    Active coordinates need ``x_j^T r == lam * sign(b_j)``; zero coordinates
    need ``|x_j^T r| <= lam``. A coordinate fails when its residual exceeds ``tol``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    b = np.asarray(b, dtype=float)
    g = prob.xty - prob.gram @ b
    active = b != 0
    res = np.where(
        active,
        np.abs(g - lam * np.sign(b)),
        np.maximum(np.abs(g) - lam, 0.0),
    )
    bad = tuple(int(j) for j in np.flatnonzero(res > tol))
    return KKTResult(not bad, res, bad)


def fit_cd(
    prob: LassoProblem,
    lam: float,
    max_iter: int = CD_MAX_ITER,
    tol: float = CD_TOL,
    warm_start=None,
) -> np.ndarray:
    """Cyclic coordinate descent on the Gram matrix.

    Stops once the largest coordinate change in a sweep is below
    ``tol * max(1, ||b||_inf)``. Raises :class:`NoConvergence` (carrying the
    last iterate) after ``max_iter`` sweeps.
    """
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    G, c = prob.gram, prob.xty
    p = prob.p
    b = np.zeros(p) if warm_start is None else np.array(warm_start, dtype=float)
    if lam >= lambda_max(prob) and warm_start is None:
        return b
    g = c - G @ b  # x_j^T (y - X b)
    diag = np.diag(G)
    for _ in range(max_iter):
        delta = 0.0
        for j in range(p):
            old = b[j]
            z = g[j] + diag[j] * old
            new = math.copysign(max(abs(z) - lam, 0.0), z) / diag[j]
            if new != old:
                step = new - old
                b[j] = new
                g -= G[:, j] * step
                delta = max(delta, abs(step))
        if delta < tol * max(1.0, np.abs(b).max()):
            return b
    raise NoConvergence(max_iter, b, lam)


def _check_collinear(G):
    d = np.sqrt(np.diag(G))
    C = G / np.outer(d, d)
    np.fill_diagonal(C, 0.0)
    if np.abs(C).max(initial=0.0) >= 1.0 - 1e-12:
        i, j = np.unravel_index(np.argmax(np.abs(C)), C.shape)
        raise DegenerateStep(f"columns {min(i, j)} and {max(i, j)} are collinear")


def lars_path(prob: LassoProblem, cond_limit: float = 1e12) -> LassoPath:
    """Exact LASSO solution path by LARS with the drop-on-sign-change rule.

    Returns the breakpoints from ``lambda_max`` down to 0 (or to the point where
    the active set reaches ``n - 1`` variables). Between breakpoints the path is
    linear in lambda. Ties on entry admit the lower column index first.
    """
    G, c0 = prob.gram, prob.xty
    n, p = prob.n, prob.p
    _check_collinear(G)

    lam = lambda_max(prob)
    b = np.zeros(p)
    entry = np.full(p, np.nan)
    lambdas, coefs = [lam], [b.copy()]
    if lam == 0.0:
        return LassoPath(np.array(lambdas), np.array(coefs), prob.feature_names, entry, "lars")

    j0 = int(np.argmax(np.abs(c0)))
    active = [j0]
    entry[j0] = lam
    signs = {j0: float(np.sign(c0[j0]))}
    just_dropped = None
    rank_limit = min(p, n - 1)

    while lam > 0.0:
        A = np.array(active)
        s = np.array([signs[k] for k in active])
        G_AA = G[np.ix_(A, A)]
        if np.linalg.cond(G_AA) > cond_limit:
            raise DegenerateStep(f"equiangular system singular for active set {sorted(active)}")
        d_A = np.linalg.solve(G_AA, s)
        a = G[:, A] @ d_A
        c = c0 - G @ b

        gamma, enter = lam, None
        if len(active) < rank_limit:
            in_A = np.zeros(p, bool)
            in_A[A] = True
            for j in range(p):
                if in_A[j] or j == just_dropped:
                    continue
                for num, den in ((lam - c[j], 1.0 - a[j]), (lam + c[j], 1.0 + a[j])):
                    if den <= 1e-14:
                        continue
                    g_j = max(num, 0.0) / den
                    # strict '<' keeps the lowest index on exact ties
                    if g_j < gamma:
                        gamma, enter = g_j, j

        drop = None
        for i, k in enumerate(active):
            if b[k] != 0.0 and d_A[i] != 0.0:
                g_k = -b[k] / d_A[i]
                if 0.0 < g_k < gamma:
                    gamma, drop = g_k, k
        if drop is not None:
            enter = None

        lam = 0.0 if (enter is None and drop is None) else max(lam - gamma, 0.0)
        # Re-solve the active block exactly at the new lambda to avoid drift.
        b_A = np.linalg.solve(G_AA, c0[A] - lam * s)
        b[:] = 0.0
        b[A] = b_A
        just_dropped = None
        if drop is not None:
            b[drop] = 0.0
            active.remove(drop)
            del signs[drop]
            just_dropped = drop
        if enter is not None:
            active.append(enter)
            signs[enter] = float(np.sign(c0[enter] - G[enter] @ b)) or 1.0
            if np.isnan(entry[enter]):
                entry[enter] = lam
        lambdas.append(lam)
        coefs.append(b.copy())
        if not active:
            break
        if len(active) >= rank_limit and enter is not None and rank_limit < p:
            # No further variable can enter; the path below this point is not unique.
            break

    return LassoPath(np.array(lambdas), np.array(coefs), prob.feature_names, entry, "lars")


def lambda_grid(start: float, end: float, step: float) -> np.ndarray:
    """Descending grid ``start, start - step, ...`` down to (and including) ``end``."""
    if not (start > end > 0) or step <= 0:
        raise ValueError("need start > end > 0 and step > 0")
    count = int(math.floor((start - end) / step + 1e-9)) + 1
    return np.array([float(f"{start - k * step:.12g}") for k in range(count)])


def entry_lambdas(lambdas, coefs) -> np.ndarray:
    nz = coefs != 0
    first = nz.argmax(axis=0)
    return np.where(nz.any(axis=0), np.asarray(lambdas)[first], np.nan)


def grid_path(
    prob: LassoProblem,
    start: float,
    end: float,
    step: float,
    max_iter: int = CD_MAX_ITER,
    tol: float = CD_TOL,
) -> LassoPath:
    lambdas = lambda_grid(start, end, step)
    coefs = np.empty((lambdas.size, prob.p))
    b = None
    for i, lam in enumerate(lambdas):
        b = fit_cd(prob, lam, max_iter=max_iter, tol=tol, warm_start=b)
        coefs[i] = b
    return LassoPath(lambdas, coefs, prob.feature_names, entry_lambdas(lambdas, coefs), "grid")
