"""BIC scan over the number of mixture components."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import MixLassoError, ScanError
from .gmm import EMConfig, fit_em


def count_params(K: int, d: int) -> int:
    """Free parameters of a full-covariance K-component mixture in d dimensions."""
    if K < 1 or d < 1:
        raise ValueError("K and d must be positive")
    return (K - 1) + K * d + K * d * (d + 1) // 2


def bic(loglik: float, n_params: int, n: int) -> float:
    if n < 2:
        raise ValueError("BIC needs n >= 2")
    return -2.0 * loglik + n_params * math.log(n)


@dataclass(frozen=True)
class BicRow:
    K: int
    loglik: float
    n_params: int
    bic: float


@dataclass
class BicTable:
    rows: list
    # Fitted (params, responsibilities, report) per K, kept so callers can reuse
    # the winning fit instead of refitting.
    fits: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def best_k(self) -> int:
        # min over (bic, K) puts ties on the smallest K regardless of row order
        return min((r.bic, r.K) for r in self.rows)[1]

    @property
    def ks(self) -> np.ndarray:
        return np.array([r.K for r in self.rows])

    @property
    def bics(self) -> np.ndarray:
        return np.array([r.bic for r in self.rows])


def scan_seed(master: int, K: int) -> int:
    """Per-K seed derived from the master seed."""
    return int(np.random.SeedSequence(master, spawn_key=(0x5CA9, K)).generate_state(1)[0])


def scan_k(X, k_min: int, k_max: int, cfg: EMConfig | None = None) -> BicTable:
    cfg = cfg or EMConfig()
    X = np.asarray(X, float)
    if X.ndim == 1:
        X = X[:, None]
    n, d = X.shape
    if not (1 <= k_min <= k_max):
        raise ValueError(f"need 1 <= k_min <= k_max, got {k_min}, {k_max}")
    if n <= k_max:
        raise ValueError(f"need n > k_max, got n={n}, k_max={k_max}")

    rows, fits = [], {}
    for K in range(k_min, k_max + 1):
        kcfg = dataclasses.replace(cfg, seed=scan_seed(cfg.seed, K))
        try:
            fit = fit_em(X, K, kcfg)
        except MixLassoError as exc:
            raise ScanError(K, exc) from exc
        ll = fit[2].loglik
        m = count_params(K, d)
        rows.append(BicRow(K, ll, m, bic(ll, m, n)))
        fits[K] = fit
    return BicTable(rows, fits)


def bic_display_transform(table: BicTable) -> np.ndarray:
    """``log(bic - min_bic + 1)`` per row; zero exactly at the minimizers."""
    b = table.bics
    if b.size == 0:
        raise ValueError("empty BIC table")
    return np.log(b - b.min() + 1.0)
