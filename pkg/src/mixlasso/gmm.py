"""Full-covariance Gaussian mixtures fitted by expectation-maximization."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_triangular
from scipy.special import logsumexp

from .errors import DegenerateComponent, DimensionMismatch, MixLassoError, NotPositiveDefinite

LOG_2PI = math.log(2.0 * math.pi)
# A component whose total responsibility falls below this fraction of n is empty.
EMPTY_MASS = 1e-8


@dataclass(frozen=True)
class GmmParams:
    weights: np.ndarray      # (K,)
    means: np.ndarray        # (K, d)
    covariances: np.ndarray  # (K, d, d)

    def __post_init__(self):
        w = np.asarray(self.weights, float)
        mu = np.atleast_2d(np.asarray(self.means, float))
        S = np.asarray(self.covariances, float)
        if S.ndim == 2:
            S = S[None]
        K, d = mu.shape
        if w.shape != (K,) or S.shape != (K, d, d):
            raise DimensionMismatch(
                f"inconsistent shapes: weights {w.shape}, means {mu.shape}, covariances {S.shape}"
            )
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
            raise ValueError("mixture weights must be nonnegative and sum to 1")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "means", mu)
        object.__setattr__(self, "covariances", S)

    @property
    def K(self) -> int:
        return self.means.shape[0]

    @property
    def d(self) -> int:
        return self.means.shape[1]


@dataclass
class EMConfig:
    restarts: int = 10
    max_iter: int = 500
    tol: float = 1e-8
    reg: float | None = None  # eigenvalue floor; None: 1e-6 * trace(global cov) / d
    seed: int = 0


@dataclass
class FitReport:
    loglik_trace: list
    iterations: int
    converged: bool
    restarts_used: int
    seed: int
    best_restart: int = 0
    failed_restarts: int = 0
    # Iterations at which an empty component was reseeded; the likelihood may
    # drop there, so ascent is only guaranteed between these points.
    reinit_iterations: list = field(default_factory=list)

    @property
    def loglik(self) -> float:
        return self.loglik_trace[-1]


def _cholesky(sigma, k=None):
    try:
        return np.linalg.cholesky(sigma)
    except np.linalg.LinAlgError:
        where = "" if k is None else f" (component {k})"
        raise NotPositiveDefinite(f"covariance is not positive definite{where}") from None


def _component_logpdf(X, mu, L):
    """Log-density of every row of ``X`` under N(mu, L L^T)."""
    d = mu.shape[0]
    z = solve_triangular(L, (X - mu).T, lower=True, check_finite=False)
    maha = np.einsum("ij,ij->j", z, z)
    half_logdet = np.log(np.diag(L)).sum()
    return -0.5 * d * LOG_2PI - half_logdet - 0.5 * maha


def gaussian_logpdf(y, mu, sigma) -> float:
    mu = np.atleast_1d(np.asarray(mu, float))
    y = np.atleast_1d(np.asarray(y, float))
    sigma = np.atleast_2d(np.asarray(sigma, float))
    if y.shape != mu.shape or sigma.shape != (mu.size, mu.size):
        raise DimensionMismatch("shapes of y, mu and sigma disagree")
    if not np.allclose(sigma, sigma.T, rtol=0, atol=1e-12 * max(1.0, np.abs(sigma).max())):
        raise NotPositiveDefinite("covariance is not symmetric")
    L = _cholesky(sigma)
    return float(_component_logpdf(y[None, :], mu, L)[0])


def _batched_cholesky(covs):
    try:
        return np.linalg.cholesky(covs)
    except np.linalg.LinAlgError:
        for k, S in enumerate(covs):
            _cholesky(S, k)
        raise


def _weighted_logpdf(X, params):
    """``log p_k + log f(x_i; mu_k, Sigma_k)`` as an (n, K) array."""
    X = np.atleast_2d(np.asarray(X, float))
    if X.shape[1] != params.d:
        raise DimensionMismatch(f"data has {X.shape[1]} columns, model has d={params.d}")
    L = _batched_cholesky(params.covariances)               # (K, d, d)
    D = X.T[None, :, :] - params.means[:, :, None]          # (K, d, n)
    z = np.linalg.inv(L) @ D
    maha = (z * z).sum(axis=1).T
    half_logdet = np.log(np.diagonal(L, axis1=1, axis2=2)).sum(axis=1)
    with np.errstate(divide="ignore"):
        logw = np.log(params.weights)
    return logw - half_logdet - 0.5 * params.d * LOG_2PI - 0.5 * maha


def _logsumexp_rows(a):
    m = a.max(axis=1)
    m = np.where(np.isfinite(m), m, 0.0)
    return m + np.log(np.exp(a - m[:, None]).sum(axis=1))


def mixture_logpdf(y, params: GmmParams) -> float:
    return float(logsumexp(_weighted_logpdf(np.atleast_1d(y)[None, :], params)[0]))


def e_step(X, params: GmmParams):
    """Posterior responsibilities and the total log-likelihood at ``params``."""
    lp = _weighted_logpdf(X, params)
    norm = _logsumexp_rows(lp)
    R = np.exp(lp - norm[:, None])
    R /= R.sum(axis=1, keepdims=True)
    return R, float(norm.sum())


def floor_eigenvalues(S, floor):
    """Closest-in-likelihood covariance with every eigenvalue at least ``floor``.

    Over ``{Sigma : Sigma - floor*I is PSD}``, ``log det Sigma + tr(Sigma^-1 S)`` is
    minimized by clipping the eigenvalues of ``S`` from below.
    """
    S = 0.5 * (S + S.T)
    if floor <= 0:
        return S
    s, U = np.linalg.eigh(S)
    if s[0] >= floor:
        return S
    C = (U * np.maximum(s, floor)) @ U.T
    return 0.5 * (C + C.T)


def _moments(X, R, reg):
    Nk = R.sum(axis=0)
    safe = np.maximum(Nk, np.finfo(float).tiny)
    means = (R.T @ X) / safe[:, None]
    D = X[None, :, :] - means[:, None, :]                   # (K, n, d)
    covs = (R.T[:, :, None] * D).transpose(0, 2, 1) @ D / safe[:, None, None]
    covs = 0.5 * (covs + covs.transpose(0, 2, 1))
    if reg > 0:
        low = np.flatnonzero(np.linalg.eigvalsh(covs)[:, 0] < reg)
        for k in low:
            covs[k] = floor_eigenvalues(covs[k], reg)
    return Nk, means, covs


def m_step(X, R, reg: float = 0.0) -> GmmParams:
    """Weighted-moment update.

    Covariances use the responsibility mass as divisor, with eigenvalues
    floored at ``reg``. Unlike adding ``reg * I``, the floor is the exact
    constrained maximizer, so EM keeps its monotone ascent.
    """
    X = np.asarray(X, float)
    R = np.asarray(R, float)
    if reg < 0:
        raise ValueError("reg must be nonnegative")
    n = X.shape[0]
    Nk, means, covs = _moments(X, R, reg)
    for k, mass in enumerate(Nk):
        if mass < EMPTY_MASS * n:
            raise DegenerateComponent(k, mass)
    w = Nk / n
    return GmmParams(w / w.sum(), means, covs)


def map_assign(R) -> np.ndarray:
    """Index of the largest responsibility per row; ties go to the lower index."""
    return np.argmax(np.asarray(R), axis=1)


def default_reg(X) -> float:
    X = np.asarray(X, float)
    d = X.shape[1]
    cov = np.atleast_2d(np.cov(X, rowvar=False, bias=True))
    return 1e-6 * float(np.trace(cov)) / d


def _seed_means(X, K, rng):
    # k-means++ seeding from data rows
    n = X.shape[0]
    idx = [int(rng.integers(n))]
    d2 = ((X - X[idx[0]]) ** 2).sum(axis=1)
    for _ in range(1, K):
        total = d2.sum()
        if total <= 0:
            j = int(rng.integers(n))
        else:
            j = int(rng.choice(n, p=d2 / total))
        idx.append(j)
        d2 = np.minimum(d2, ((X - X[j]) ** 2).sum(axis=1))
    return X[idx].copy()


def _single_run(X, K, cfg, reg, global_cov, rng):
    n, d = X.shape
    means = _seed_means(X, K, rng)
    start_cov = floor_eigenvalues(global_cov, reg)
    covs = np.repeat(start_cov[None], K, axis=0)
    params = GmmParams(np.full(K, 1.0 / K), means, covs)

    trace = []
    reinit = []
    converged = False
    it = 0
    while True:
        R, ll = e_step(X, params)
        trace.append(ll)
        if len(trace) > 1 and abs(ll - trace[-2]) <= cfg.tol * abs(trace[-2]):
            converged = True
            break
        if it >= cfg.max_iter:
            break
        Nk, mu, S = _moments(X, R, reg)
        empty = np.flatnonzero(Nk < EMPTY_MASS * n)
        if empty.size:
            if reinit:
                raise DegenerateComponent(int(empty[0]), float(Nk[empty[0]]))
            # Reseed the empty components at the worst-explained points.
            worst = np.argsort(_logsumexp_rows(_weighted_logpdf(X, params)))
            for slot, k in enumerate(empty):
                mu[k] = X[worst[slot]]
                S[k] = start_cov
                Nk[k] = n / K
            reinit.append(it + 1)
        w = Nk / Nk.sum()
        params = GmmParams(w / w.sum(), mu, S)
        it += 1
    return params, R, trace, it, converged, reinit


def fit_em(X, K: int, cfg: EMConfig | None = None):
    """Fit a K-component mixture; keep the best of ``cfg.restarts`` seeded runs.

    Restart ``r`` draws from the substream ``SeedSequence(cfg.seed, spawn_key=(r,))``
    so results are reproducible and independent of execution order. On exact
    likelihood ties the lowest restart index wins.

    Returns ``(params, responsibilities, report)``.
    """
    cfg = cfg or EMConfig()
    X = np.asarray(X, float)
    if X.ndim == 1:
        X = X[:, None]
    n, d = X.shape
    if K < 1 or n <= K:
        raise ValueError(f"need 1 <= K < n, got K={K}, n={n}")
    if cfg.tol <= 0:
        raise ValueError("tol must be positive")
    reg = default_reg(X) if cfg.reg is None else float(cfg.reg)
    global_cov = np.atleast_2d(np.cov(X, rowvar=False, bias=True))

    best = None
    failures = []
    for r in range(cfg.restarts):
        rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(r,)))
        try:
            run = _single_run(X, K, cfg, reg, global_cov, rng)
        except MixLassoError as exc:
            failures.append(exc)
            continue
        if best is None or run[2][-1] > best[1][2][-1]:
            best = (r, run)
    if best is None:
        raise failures[-1]

    r, (params, R, trace, iters, converged, reinit) = best
    report = FitReport(
        loglik_trace=trace,
        iterations=iters,
        converged=converged,
        restarts_used=cfg.restarts,
        seed=cfg.seed,
        best_restart=r,
        failed_restarts=len(failures),
        reinit_iterations=reinit,
    )
    return params, R, report
