"""Synthetic data: Gaussian designs with discrete single-index outputs.

The point of these generators is to have ground truth for a setting where
plain least squares with an l1 penalty is applied to a nonlinear, ordinal
response. With a standard Gaussian design the LASSO estimate still points
along the true coefficient direction, up to scale.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import TUMOR_STATES, Dataset

LINKS = ("linear", "ordinal4", "sign")


@dataclass(frozen=True)
class SynthSpec:
    n: int
    p: int
    s: int
    link: str = "ordinal4"
    thresholds: tuple = (-1.0, 0.0, 1.0)
    noise_sd: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if self.n < 1 or self.p < 1:
            raise ValueError("n and p must be positive")
        # s = 0 is the null model b* = 0, used to check the link's level masses.
        if not 0 <= self.s <= self.p:
            raise ValueError("need 0 <= s <= p")
        if self.link not in LINKS:
            raise ValueError(f"link must be one of {LINKS}")
        th = np.asarray(self.thresholds, float)
        if th.shape != (3,) or np.any(np.diff(th) <= 0):
            raise ValueError("thresholds must be 3 strictly increasing values")
        if self.noise_sd < 0:
            raise ValueError("noise_sd must be nonnegative")


@dataclass(frozen=True)
class SyntheticData:
    dataset: Dataset
    response: np.ndarray   # numeric y fed to the regression
    support: np.ndarray    # sorted indices of the nonzero true coefficients
    direction: np.ndarray  # unit-norm true coefficients (zero vector if s == 0)
    latent: np.ndarray     # <x_i, b*> + noise, before the link


def feature_names(p: int, prefix: str = "g") -> tuple:
    width = len(str(p))
    return tuple(f"{prefix}{j + 1:0{width}d}" for j in range(p))


def ordinal_levels(t, thresholds) -> np.ndarray:
    """``1 + #{thresholds < t}`` for every entry of ``t``."""
    return 1 + (np.asarray(t, float)[:, None] > np.asarray(thresholds, float)).sum(axis=1)


def generate_synth(spec: SynthSpec) -> SyntheticData:
    """Draw ``X`` with i.i.d. N(0, 1) entries and a discrete single-index response.

    Design, support and noise use separate substreams of ``spec.seed``, so e.g.
    changing ``noise_sd`` leaves the design and support untouched.
    """
    ss_design, ss_support, ss_noise = np.random.SeedSequence(spec.seed).spawn(3)
    rng_support = np.random.default_rng(ss_support)
    b = np.zeros(spec.p)
    support = np.sort(rng_support.choice(spec.p, size=spec.s, replace=False))
    if spec.s:
        b[support] = rng_support.choice([-1.0, 1.0], size=spec.s)
        b /= np.sqrt(spec.s)

    X = np.random.default_rng(ss_design).standard_normal((spec.n, spec.p))
    t = X @ b + spec.noise_sd * np.random.default_rng(ss_noise).standard_normal(spec.n)

    if spec.link == "sign":
        labels = 1 + (t > 0)
        levels = ("neg", "pos")
        response = np.where(t > 0, 1.0, -1.0)
    else:
        labels = ordinal_levels(t, spec.thresholds)
        levels = TUMOR_STATES
        # the linear link keeps the ordinal labels for the CSV but regresses on t
        response = t.copy() if spec.link == "linear" else labels.astype(float)

    ds = Dataset(labels, levels, X, feature_names(spec.p))
    return SyntheticData(ds, response, support, b, t)


def make_surrogate(
    n: int = 100,
    p: int = 34,
    n_groups: int = 4,
    loading: float = 0.9,
    thresholds=(-1.0, 0.0, 1.0),
    noise_sd: float = 0.3,
    seed: int = 0,
):
    """Expression-like table whose genes form ``n_groups`` correlated blocks.

    Gene ``j`` in group ``g`` is ``loading * F_g + sqrt(1 - loading^2) * e_j``
    for a per-group latent factor ``F_g``. The ordinal state depends on three
    genes of the last group, one of them with a negative weight.

    Returns ``(dataset, groups, true_coef)`` where ``groups`` gives each gene's
    group in ``0..n_groups-1``.
    """
    if not 0 < loading < 1:
        raise ValueError("loading must lie in (0, 1)")
    if p < 3 * n_groups:
        raise ValueError("need at least three genes per group")
    ss_groups, ss_factors, ss_genes, ss_noise = np.random.SeedSequence(seed).spawn(4)
    groups = np.random.default_rng(ss_groups).permutation(np.arange(p) % n_groups)
    F = np.random.default_rng(ss_factors).standard_normal((n, n_groups))
    E = np.random.default_rng(ss_genes).standard_normal((n, p))
    X = loading * F[:, groups] + np.sqrt(1.0 - loading**2) * E

    informative = np.flatnonzero(groups == n_groups - 1)[:3]
    coef = np.zeros(p)
    coef[informative] = [1.0, -0.6, 0.4]
    t = X @ coef
    t = (t - t.mean()) / t.std()
    t = t + noise_sd * np.random.default_rng(ss_noise).standard_normal(n)
    labels = ordinal_levels(t, thresholds)
    # shift to positive "expression" values
    ds = Dataset(labels, TUMOR_STATES, X + 5.0, feature_names(p))
    return ds, groups, coef


def orthonormal_design(n: int, p: int, rng) -> np.ndarray:
    """Centered ``n x p`` design with orthogonal columns of unit sample sd."""
    if p > n - 1:
        raise ValueError("need p <= n - 1")
    M = np.column_stack([np.ones(n), rng.standard_normal((n, p))])
    Q, _ = np.linalg.qr(M)
    return Q[:, 1:] * np.sqrt(n - 1)
