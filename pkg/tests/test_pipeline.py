import numpy as np
import pytest

from mixlasso.data import serialize_dataset
from mixlasso.errors import EmptyCluster, StageError
from mixlasso.gmm import EMConfig
from mixlasso.lasso import LassoPath, LassoProblem, grid_path, lambda_max
from mixlasso.pipeline import (
    PipelineConfig,
    cluster_dataset,
    clusterwise_lasso,
    rank_features,
    run_pipeline,
)
from mixlasso.synth import make_surrogate, orthonormal_design


@pytest.fixture(scope="module")
def surrogate():
    return make_surrogate(seed=0)


@pytest.fixture(scope="module")
def feature_run(surrogate):
    ds, _, _ = surrogate
    return cluster_dataset(ds, "features", 1, 6, EMConfig(reg=0.01, seed=0))


def test_feature_axis(surrogate, feature_run):
    ds, groups, _ = surrogate
    run = feature_run
    assert run.assignments.shape == (34,)
    assert run.n_clusters == 4
    # each planted group lands in a single cluster
    for g in range(4):
        assert np.unique(run.assignments[groups == g]).size == 1
    assert set(run.assignments) == {1, 2, 3, 4}


def test_sample_axis(surrogate):
    ds, _, _ = surrogate
    run = cluster_dataset(ds, "samples", 1, 3, EMConfig(restarts=2, seed=0))
    assert run.assignments.shape == (100,)
    assert run.assignments.min() == 1


def test_single_cluster(surrogate):
    ds, _, _ = surrogate
    run = cluster_dataset(ds, "features", 1, 1)
    assert np.all(run.assignments == 1)
    assert len(run.bic_table.rows) == 1


def test_eight_feature_cluster(surrogate, feature_run):
    ds, _, _ = surrogate
    sizes = np.bincount(feature_run.assignments)
    c = int(np.flatnonzero(sizes == 8)[0])
    path, ranking = clusterwise_lasso(ds, feature_run, c)
    assert path.coefs.shape == (71, 8)
    assert len(ranking) <= 8


def test_empty_cluster(surrogate, feature_run):
    ds, _, _ = surrogate
    with pytest.raises(EmptyCluster):
        clusterwise_lasso(ds, feature_run, 9)


def test_all_features_cluster_is_direct_path(surrogate):
    ds, _, _ = surrogate
    run = cluster_dataset(ds, "features", 1, 1)
    path, _ = clusterwise_lasso(ds, run, 1)
    direct = grid_path(LassoProblem.from_data(ds.X, ds.labels, ds.feature_names), 0.1, 0.03, 0.001)
    np.testing.assert_allclose(path.coefs, direct.coefs, rtol=0, atol=1e-12)
    np.testing.assert_array_equal(path.lambdas, direct.lambdas)


def test_all_features_above_lambda_max(surrogate):
    ds, _, _ = surrogate
    run = cluster_dataset(ds, "features", 1, 1)
    lm = lambda_max(LassoProblem.from_data(ds.X, ds.labels))
    _, ranking = clusterwise_lasso(ds, run, 1, 3 * lm, 2 * lm, lm / 4)
    assert len(ranking) == 0


def _path(coefs, lambdas, names):
    coefs = np.asarray(coefs, float)
    nz = coefs != 0
    entry = np.where(nz.any(0), np.asarray(lambdas)[nz.argmax(0)], np.nan)
    return LassoPath(np.asarray(lambdas, float), coefs, tuple(names), entry)


def test_rank_zero_path():
    assert rank_features(_path(np.zeros((3, 2)), [3, 2, 1], "ab")) == []


def test_rank_single_feature_sign():
    r = rank_features(_path([[0, 0], [0, -0.5], [0, -1.0]], [3, 2, 1], "ab"))
    assert r.names == ["b"] and r[0].sign == -1 and r.opposed == ["b"]


def test_rank_ties():
    r = rank_features(_path([[0, 0, 0], [1, -2, 1], [2, -3, 2]], [3, 2, 1], "zyx"))
    assert r.names == ["y", "x", "z"]


def test_rank_permutation_invariant():
    rng = np.random.default_rng(0)
    X = rng.normal(size=(40, 6))
    prob = LassoProblem.from_data(X, X @ rng.normal(size=6) + rng.normal(size=40), list("abcdef"))
    lm = lambda_max(prob)
    path = grid_path(prob, lm, lm / 20, lm / 50)
    perm = rng.permutation(6)
    shuffled = LassoPath(path.lambdas, path.coefs[:, perm], tuple(np.array(path.feature_names)[perm]),
                         path.entry_lambda[perm])
    assert rank_features(shuffled) == rank_features(path)


def test_planted_orthonormal_order():
    rng = np.random.default_rng(1)
    X = orthonormal_design(60, 6, rng)
    b = np.array([0.0, 5.0, 0.0, 1.0, 3.0, 0.0])
    y = X @ b + 0.05 * rng.normal(size=60)
    prob = LassoProblem(X, y - y.mean(), list("abcdef"))
    lm = lambda_max(prob)
    r = rank_features(grid_path(prob, lm, lm / 100, lm / 200))
    assert r.names[:3] == ["b", "e", "d"]


def test_response_scaling():
    rng = np.random.default_rng(2)
    X = rng.normal(size=(50, 5))
    y = X @ np.array([2.0, -1.0, 0.5, 0.0, 0.0]) + rng.normal(size=50)
    p1 = LassoProblem.from_data(X, y)
    p2 = LassoProblem.from_data(X, 3 * y)
    lm = lambda_max(p1)
    assert lambda_max(p2) == pytest.approx(3 * lm)
    a = grid_path(p1, lm, lm / 10, lm / 40)
    b = grid_path(p2, 3 * lm, 3 * lm / 10, 3 * lm / 40)
    np.testing.assert_allclose(b.coefs, 3 * a.coefs, atol=1e-8)
    assert rank_features(a).names == rank_features(b).names


def test_run_pipeline(tmp_path, surrogate):
    ds, _, _ = surrogate
    src = tmp_path / "in.csv"
    src.write_text(serialize_dataset(ds))
    cfg = PipelineConfig(input=str(src), output_dir=str(tmp_path / "out"), reg=0.01, k_max=6)
    res = run_pipeline(cfg)
    assert res.run.n_clusters == 4
    names = sorted(p.name for p in res.files)
    for c in range(1, 5):
        assert f"path_cluster{c}.csv" in names and f"ranking_cluster{c}.csv" in names
    assert "bic.csv" in names and "assignments.csv" in names


def test_run_pipeline_one_cluster(tmp_path, surrogate):
    ds, _, _ = surrogate
    src = tmp_path / "in.csv"
    src.write_text(serialize_dataset(ds))
    res = run_pipeline(PipelineConfig(input=str(src), output_dir=str(tmp_path), k_max=1, plots=False))
    assert list(res.paths) == [1]


def test_missing_input(tmp_path):
    with pytest.raises(StageError) as info:
        run_pipeline(PipelineConfig(input=str(tmp_path / "nope.csv"), output_dir=str(tmp_path)))
    assert info.value.stage == "read"
