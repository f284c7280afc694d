"""Cluster, then run the LASSO within a cluster and rank features by path entry.

Two clustering axes are supported. ``features`` clusters genes (each gene is a
point in patient space) and regresses the ordinal state on the genes of one
cluster. ``samples`` clusters patients and regresses within one patient group
on every gene.
"""

from __future__ import annotations

import dataclasses
import logging
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import tables
from .data import Dataset, log_transform, parse_dataset, select_columns, select_rows, standardize, with_matrix
from .errors import EmptyCluster, MixLassoError, StageError
from .gmm import EMConfig, GmmParams, fit_em, map_assign
from .lasso import KKT_TOL, CD_MAX_ITER, CD_TOL, LassoPath, LassoProblem, grid_path, kkt_check
from .modelsel import BicTable, bic_display_transform, scan_k
from .pca import PcaModel, fit_pca, project
from . import svg

log = logging.getLogger(__name__)

AXES = ("features", "samples")


@dataclass(frozen=True)
class ClusterRun:
    axis: str
    assignments: np.ndarray  # 1..K over the clustered axis
    map_prob: np.ndarray
    params: GmmParams
    bic_table: BicTable
    ids: tuple
    pca: PcaModel | None = None
    # assignments use 1..K over nonempty components only; component_of[c-1]
    # is the mixture component behind cluster c
    component_of: tuple = ()

    @property
    def n_clusters(self) -> int:
        return int(self.assignments.max())

    def members(self, cluster_id: int) -> np.ndarray:
        return np.flatnonzero(self.assignments == cluster_id)


@dataclass(frozen=True)
class RankedFeature:
    name: str
    entry_lambda: float
    sign: int
    final_coef: float

    @property
    def magnitude(self) -> float:
        return abs(self.final_coef)


class FeatureRanking(list):
    """List of :class:`RankedFeature`, most important first."""

    @property
    def names(self):
        return [f.name for f in self]

    @property
    def opposed(self):
        """Features whose effect has the minority (negative) sign."""
        return [f.name for f in self if f.sign < 0]


def rank_features(path: LassoPath, names=None) -> FeatureRanking:
    """Order features by the lambda at which they enter the path.

    Earlier entry (larger lambda) ranks higher; ties fall back to the final
    coefficient magnitude, then the name. Features that never enter are left out.
    """
    names = path.feature_names if names is None else tuple(names)
    if len(names) != path.p:
        raise ValueError(f"expected {path.p} names, got {len(names)}")
    out = []
    for j, name in enumerate(names):
        lam = path.entry_lambda[j]
        if not np.isfinite(lam):
            continue
        col = path.coefs[:, j]
        final = float(col[-1])
        last_nz = col[np.flatnonzero(col)[-1]]
        out.append(RankedFeature(name, float(lam), 1 if last_nz > 0 else -1, final))
    out.sort(key=lambda f: (-f.entry_lambda, -f.magnitude, f.name))
    return FeatureRanking(out)


def _axis_points(X, axis, do_standardize):
    if axis not in AXES:
        raise ValueError(f"axis must be one of {AXES}")
    M = standardize(X)[0] if do_standardize else np.asarray(X, float)
    return M.T if axis == "features" else M


def cluster_dataset(
    d: Dataset,
    axis: str = "features",
    k_min: int = 1,
    k_max: int = 10,
    cfg: EMConfig | None = None,
    components: int = 3,
    do_standardize: bool = True,
    final_fit: str = "scan",
) -> ClusterRun:
    """BIC scan on the chosen axis, then MAP assignments at the best K.

    With ``components > 0`` the points are first projected on that many
    principal axes. ``final_fit="scan"`` reuses the winning scan fit;
    ``"full"`` refits at the best K on the unprojected points.
    """
    cfg = cfg or EMConfig()
    points = _axis_points(d.X, axis, do_standardize)
    pca = None
    scan_points = points
    if components:
        pca = fit_pca(points, components)
        scan_points = project(pca, points)
    table = scan_k(scan_points, k_min, k_max, cfg)
    best = table.best_k
    if final_fit == "scan":
        params, R, _ = table.fits[best]
    elif final_fit == "full":
        params, R, _ = fit_em(points, best, dataclasses.replace(cfg, seed=cfg.seed + 1))
    else:
        raise ValueError("final_fit must be 'scan' or 'full'")

    comp = map_assign(R)
    used = np.unique(comp)
    relabel = np.zeros(params.K, dtype=int)
    relabel[used] = np.arange(1, used.size + 1)
    ids = d.feature_names if axis == "features" else tuple(str(i) for i in range(d.n))
    return ClusterRun(
        axis=axis,
        assignments=relabel[comp],
        map_prob=R.max(axis=1),
        params=params,
        bic_table=table,
        ids=ids,
        pca=pca,
        component_of=tuple(int(k) for k in used),
    )


def clusterwise_lasso(
    d: Dataset,
    run: ClusterRun,
    cluster_id: int,
    start: float = 0.1,
    end: float = 0.03,
    step: float = 0.001,
    max_iter: int = CD_MAX_ITER,
    tol: float = CD_TOL,
):
    """Grid path and ranking for one cluster; returns ``(path, ranking)``."""
    prob = cluster_problem(d, run, cluster_id)
    path = grid_path(prob, start, end, step, max_iter=max_iter, tol=tol)
    return path, rank_features(path)


def cluster_problem(d: Dataset, run: ClusterRun, cluster_id: int) -> LassoProblem:
    members = run.members(cluster_id)
    if members.size == 0:
        raise EmptyCluster(f"cluster {cluster_id} has no members")
    if run.axis == "features":
        sub = select_columns(d, members)
    else:
        sub = select_rows(d, members)
        if sub.n < sub.p + 2:
            warnings.warn(
                f"cluster {cluster_id} has {sub.n} samples for {sub.p} features",
                RuntimeWarning,
                stacklevel=3,
            )
    return LassoProblem.from_data(sub.X, sub.labels, sub.feature_names)


@dataclass
class PipelineConfig:
    input: str = ""
    output_dir: str = "out"
    label_col: str = "state"
    seed: int = 0
    standardize: bool = True
    log_transform: bool = False
    axis: str = "features"
    components: int = 3
    k_min: int = 1
    k_max: int = 10
    restarts: int = 10
    max_iter: int = 500
    tol: float = 1e-8
    reg: float | None = None
    final_fit: str = "scan"
    lambda_start: float = 0.1
    lambda_end: float = 0.03
    lambda_step: float = 0.001
    cd_tol: float = CD_TOL
    cd_max_iter: int = CD_MAX_ITER
    kkt_tol: float = KKT_TOL
    plots: bool = True
    width: int = 720
    height: int = 480

    def em_config(self) -> EMConfig:
        return EMConfig(self.restarts, self.max_iter, self.tol, self.reg, self.seed)


@dataclass
class PipelineResult:
    dataset: Dataset
    run: ClusterRun
    paths: dict = field(default_factory=dict)
    rankings: dict = field(default_factory=dict)
    files: list = field(default_factory=list)


class _Stage:
    def __init__(self, name):
        self.name = name

    def __enter__(self):
        log.debug("stage %s", self.name)

    def __exit__(self, exc_type, exc, tb):
        if exc is not None and isinstance(exc, (MixLassoError, OSError, ValueError)):
            if isinstance(exc, StageError):
                return False
            raise StageError(self.name, exc) from exc
        return False


def run_pipeline(cfg: PipelineConfig) -> PipelineResult:
    """Parse, cluster, fit a LASSO path per cluster, rank, and write artifacts.

    Files written to ``cfg.output_dir``: ``bic.csv``, ``assignments.csv`` and,
    per cluster ``c``, ``path_cluster{c}.csv`` and ``ranking_cluster{c}.csv``;
    plus SVG plots when ``cfg.plots`` is set. Any failure is re-raised as a
    :class:`StageError` naming the stage.
    """
    with _Stage("read"):
        text = Path(cfg.input).read_text(encoding="utf-8")
    with _Stage("parse"):
        d = parse_dataset(text, cfg.label_col)
    with _Stage("transform"):
        if cfg.log_transform:
            d = with_matrix(d, log_transform(d.X))
    with _Stage("cluster"):
        run = cluster_dataset(
            d, cfg.axis, cfg.k_min, cfg.k_max, cfg.em_config(),
            components=cfg.components, do_standardize=cfg.standardize,
            final_fit=cfg.final_fit,
        )

    result = PipelineResult(d, run)
    for c in range(1, run.n_clusters + 1):
        with _Stage(f"lasso[cluster {c}]"):
            path, ranking = clusterwise_lasso(
                d, run, c, cfg.lambda_start, cfg.lambda_end, cfg.lambda_step,
                max_iter=cfg.cd_max_iter, tol=cfg.cd_tol,
            )
            _verify_path(d, run, c, path, cfg.kkt_tol)
        result.paths[c] = path
        result.rankings[c] = ranking

    with _Stage("write"):
        out = Path(cfg.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        files = {
            "bic.csv": tables.bic_csv(run.bic_table, bic_display_transform(run.bic_table)),
            "assignments.csv": tables.assignments_csv(run.ids, run.assignments, run.map_prob),
        }
        for c, path in result.paths.items():
            files[f"path_cluster{c}.csv"] = tables.path_csv(path)
            files[f"ranking_cluster{c}.csv"] = tables.ranking_csv(result.rankings[c])
        if cfg.plots:
            plots = {"bic.svg": svg.plot_csv(files["bic.csv"], cfg.width, cfg.height)}
            for c in result.paths:
                plots[f"path_cluster{c}.svg"] = svg.plot_csv(
                    files[f"path_cluster{c}.csv"], cfg.width, cfg.height,
                    title=f"LASSO trajectories, cluster {c}",
                )
            files.update(plots)
        for name, content in files.items():
            (out / name).write_text(content, encoding="utf-8")
            result.files.append(out / name)
    return result


def _verify_path(d, run, c, path, tol):
    prob = cluster_problem(d, run, c)
    for lam, b in zip(path.lambdas, path.coefs):
        res = kkt_check(prob, b, lam, tol)
        if not res:
            raise MixLassoError(f"KKT check failed at lambda={lam!r} for {res.violations}")
