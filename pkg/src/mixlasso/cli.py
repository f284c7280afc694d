"""Command-line entry point: ``mixlasso <command> [flags]``.

Commands: pca, scan, cluster, path, pipeline, synth, plot. Exit status is 0 on
success, 1 when a stage fails, 2 on usage errors.

A ``--config FILE`` of flat ``key=value`` lines supplies defaults for any flag
of the chosen command; flags given on the command line take precedence.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

import numpy as np

from . import svg, tables
from .data import (
    DEFAULT_LABEL_COLUMN,
    log_transform,
    parse_dataset,
    parse_matrix,
    select_columns,
    serialize_dataset,
    standardize,
    with_matrix,
)
from .errors import MixLassoError
from .gmm import EMConfig
from .lasso import CD_MAX_ITER, CD_TOL, KKT_TOL, LassoProblem, grid_path, kkt_check, lars_path
from .modelsel import bic_display_transform, scan_k
from .pca import fit_pca, project
from .pipeline import PipelineConfig, cluster_dataset, rank_features, run_pipeline
from .synth import SynthSpec, generate_synth, make_surrogate

PROG = "mixlasso"


def _common(p):
    g = p.add_argument_group("global")
    g.add_argument("--config", help="key=value file with defaults for any flag")
    g.add_argument("--input", help="input CSV")
    g.add_argument("--output-dir", default="out")
    g.add_argument("--label-col", default=DEFAULT_LABEL_COLUMN)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--standardize", action=argparse.BooleanOptionalAction, default=True)
    g.add_argument("--log-transform", action=argparse.BooleanOptionalAction, default=False)


def _em(p, k_max=10):
    g = p.add_argument_group("mixture / BIC scan")
    g.add_argument("--axis", choices=("features", "samples"), default="features")
    g.add_argument("--components", type=int, default=3, help="PCA components before the scan (0: none)")
    g.add_argument("--k-min", type=int, default=1)
    g.add_argument("--k-max", type=int, default=k_max)
    g.add_argument("--restarts", type=int, default=10)
    g.add_argument("--max-iter", type=int, default=500)
    g.add_argument("--tol", type=float, default=1e-8)
    g.add_argument("--reg", type=float, default=None, help="covariance eigenvalue floor")
    g.add_argument("--final-fit", choices=("scan", "full"), default="scan")


def _lasso(p):
    g = p.add_argument_group("lasso")
    g.add_argument("--lambda-start", type=float, default=0.1)
    g.add_argument("--lambda-end", type=float, default=0.03)
    g.add_argument("--lambda-step", type=float, default=0.001)
    g.add_argument("--cd-tol", type=float, default=CD_TOL)
    g.add_argument("--cd-max-iter", type=int, default=CD_MAX_ITER)
    g.add_argument("--kkt-tol", type=float, default=KKT_TOL)


def _plot(p):
    g = p.add_argument_group("plot")
    g.add_argument("--width", type=int, default=720)
    g.add_argument("--height", type=int, default=480)


def build_parser():
    parser = argparse.ArgumentParser(prog=PROG, description="GMM clustering + clusterwise LASSO paths")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pca", help="project samples (or features) on principal axes")
    _common(p)
    p.add_argument("--components", type=int, default=3)
    p.add_argument("--axis", choices=("features", "samples"), default="samples")

    p = sub.add_parser("scan", help="BIC scan over the number of mixture components")
    _common(p)
    _em(p, k_max=29)
    p.add_argument("--input-kind", choices=("dataset", "matrix"), default="dataset",
                   help="'matrix': numeric table such as a pca score file, scanned as is")

    p = sub.add_parser("cluster", help="BIC scan then MAP cluster assignments")
    _common(p)
    _em(p)

    p = sub.add_parser("path", help="LASSO path of the labels on selected columns")
    _common(p)
    _lasso(p)
    p.add_argument("--features", help="comma-separated feature names or 1-based column numbers")
    p.add_argument("--method", choices=("grid", "lars"), default="grid")

    p = sub.add_parser("pipeline", help="parse, cluster, clusterwise paths, rankings, plots")
    _common(p)
    _em(p)
    _lasso(p)
    _plot(p)
    p.add_argument("--plots", action=argparse.BooleanOptionalAction, default=True)

    p = sub.add_parser("synth", help="write a synthetic dataset with known truth")
    _common(p)
    p.add_argument("--kind", choices=("single-index", "surrogate"), default="single-index")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--p", type=int, default=34)
    p.add_argument("--sparsity", type=int, default=5)
    p.add_argument("--link", choices=("linear", "ordinal4", "sign"), default="ordinal4")
    p.add_argument("--thresholds", default="-1,0,1")
    p.add_argument("--noise-sd", type=float, default=0.1)
    p.add_argument("--groups", type=int, default=4)

    p = sub.add_parser("plot", help="render a path or BIC CSV as SVG")
    _common(p)
    _plot(p)
    p.add_argument("--output", help="SVG path (default: <output-dir>/<input stem>.svg)")
    p.add_argument("--title", default="")
    return parser, sub.choices


# -- config files -------------------------------------------------------------

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def read_config(path):
    """Parse ``key=value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("_", "-")] = value
    return out


def _config_tokens(subparser, cfg):
    flags = {}
    for action in subparser._actions:
        for opt in action.option_strings:
            flags[opt] = action
    tokens = []
    for key, value in cfg.items():
        opt = f"--{key}"
        action = flags.get(opt)
        if action is None or key == "config":
            subparser.error(f"unknown config key {key!r}")
        if isinstance(action, argparse.BooleanOptionalAction):
            v = value.lower()
            if v not in _TRUE | _FALSE:
                subparser.error(f"config key {key!r} needs a boolean, got {value!r}")
            tokens.append(opt if v in _TRUE else f"--no-{key}")
        else:
            tokens.append(f"{opt}={value}")
    return tokens


def parse_args(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, subparsers = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if known.config:
        cmd_pos = next((i for i, a in enumerate(argv) if a in subparsers), None)
        if cmd_pos is None:
            parser.error("a command is required")
        try:
            cfg = read_config(known.config)
        except (OSError, ValueError) as exc:
            parser.error(str(exc))
        tokens = _config_tokens(subparsers[argv[cmd_pos]], cfg)
        argv = argv[: cmd_pos + 1] + tokens + argv[cmd_pos + 1:]
    return parser.parse_args(argv)


# -- commands -----------------------------------------------------------------

def _need_input(args):
    if not args.input:
        raise MixLassoError("--input is required")
    return Path(args.input).read_text(encoding="utf-8")


def _load(args):
    d = parse_dataset(_need_input(args), args.label_col)
    if args.log_transform:
        d = with_matrix(d, log_transform(d.X))
    return d


def _out(args, name):
    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out / name


def _em_config(args):
    return EMConfig(args.restarts, args.max_iter, args.tol, args.reg, args.seed)


def cmd_pca(args):
    d = _load(args)
    M = standardize(d.X)[0] if args.standardize else d.X
    ids = None
    if args.axis == "features":
        M, ids = M.T, d.feature_names
    model = fit_pca(M, args.components)
    _out(args, "pca.csv").write_text(tables.scores_csv(project(model, M), ids), encoding="utf-8")


def cmd_scan(args):
    if args.input_kind == "matrix":
        _, _, points = parse_matrix(_need_input(args))
        if args.log_transform:
            points = log_transform(points)
        if args.standardize:
            points = standardize(points)[0]
        if args.components:
            points = project(fit_pca(points, args.components), points)
    else:
        d = _load(args)
        points = standardize(d.X)[0] if args.standardize else d.X
        if args.axis == "features":
            points = points.T
        if args.components:
            points = project(fit_pca(points, args.components), points)
    table = scan_k(points, args.k_min, args.k_max, _em_config(args))
    _out(args, "bic.csv").write_text(tables.bic_csv(table, bic_display_transform(table)), encoding="utf-8")


def cmd_cluster(args):
    d = _load(args)
    run = cluster_dataset(
        d, args.axis, args.k_min, args.k_max, _em_config(args),
        components=args.components, do_standardize=args.standardize, final_fit=args.final_fit,
    )
    table = run.bic_table
    _out(args, "bic.csv").write_text(tables.bic_csv(table, bic_display_transform(table)), encoding="utf-8")
    _out(args, "assignments.csv").write_text(
        tables.assignments_csv(run.ids, run.assignments, run.map_prob), encoding="utf-8"
    )


def _feature_index(d, spec):
    idx = []
    for tok in (t.strip() for t in spec.split(",") if t.strip()):
        if tok in d.feature_names:
            idx.append(d.feature_names.index(tok))
        elif tok.isdigit():
            idx.append(int(tok) - 1)
        else:
            raise MixLassoError(f"unknown feature {tok!r}")
    return idx


def cmd_path(args):
    d = _load(args)
    if args.features:
        d = select_columns(d, _feature_index(d, args.features))
    prob = LassoProblem.from_data(d.X, d.labels, d.feature_names)
    if args.method == "lars":
        path, tol = lars_path(prob), min(args.kkt_tol, 1e-8)
    else:
        path = grid_path(prob, args.lambda_start, args.lambda_end, args.lambda_step,
                         max_iter=args.cd_max_iter, tol=args.cd_tol)
        tol = args.kkt_tol
    for lam, b in zip(path.lambdas, path.coefs):
        res = kkt_check(prob, b, lam, tol)
        if not res:
            raise MixLassoError(f"KKT check failed at lambda={lam!r} for columns {res.violations}")
    _out(args, "path.csv").write_text(tables.path_csv(path), encoding="utf-8")
    _out(args, "ranking.csv").write_text(tables.ranking_csv(rank_features(path)), encoding="utf-8")


def cmd_pipeline(args):
    fields = {f.name for f in dataclasses.fields(PipelineConfig)}
    cfg = PipelineConfig(**{k: v for k, v in vars(args).items() if k in fields})
    if not cfg.input:
        raise MixLassoError("--input is required")
    run_pipeline(cfg)


def cmd_synth(args):
    if args.kind == "surrogate":
        d, groups, coef = make_surrogate(n=args.n, p=args.p, n_groups=args.groups,
                                         noise_sd=args.noise_sd, seed=args.seed)
        truth = tables.to_csv(["feature", "group", "coefficient"],
                              zip(d.feature_names, groups + 1, coef))
    else:
        thresholds = tuple(float(t) for t in args.thresholds.split(","))
        spec = SynthSpec(args.n, args.p, args.sparsity, args.link, thresholds, args.noise_sd, args.seed)
        data = generate_synth(spec)
        d = data.dataset
        truth = tables.to_csv(["feature", "coefficient"], zip(d.feature_names, data.direction))
    d = dataclasses.replace(d, label_column=args.label_col)
    _out(args, "synth.csv").write_text(serialize_dataset(d), encoding="utf-8")
    _out(args, "synth_truth.csv").write_text(truth, encoding="utf-8")


def cmd_plot(args):
    text = _need_input(args)
    out = Path(args.output) if args.output else _out(args, Path(args.input).stem + ".svg")
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(svg.plot_csv(text, args.width, args.height, args.title), encoding="utf-8")


COMMANDS = {
    "pca": cmd_pca,
    "scan": cmd_scan,
    "cluster": cmd_cluster,
    "path": cmd_path,
    "pipeline": cmd_pipeline,
    "synth": cmd_synth,
    "plot": cmd_plot,
}


def main(argv=None) -> int:
    args = parse_args(argv)
    try:
        COMMANDS[args.command](args)
    except (MixLassoError, OSError, ValueError, np.linalg.LinAlgError) as exc:
        msg = " ".join(str(exc).split())
        print(f"{PROG} {args.command}: error: {msg}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
