import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from mixlasso.data import (
    TUMOR_STATES,
    Dataset,
    encode_states,
    parse_dataset,
    parse_matrix,
    select_columns,
    select_rows,
    serialize_dataset,
    standardize,
)
from mixlasso.errors import (
    EmptyFile,
    EmptySelection,
    IndexOutOfRange,
    MissingHeader,
    NonNumericCell,
    UnknownLabelColumn,
    UnknownLevel,
    ZeroVarianceColumn,
)


def _table(n, p, seed=0):
    rng = np.random.default_rng(seed)
    names = [f"gene{j + 1}" for j in range(p)]
    lines = [",".join(["state", *names])]
    for i in range(n):
        vals = ",".join(repr(v) for v in rng.normal(size=p).tolist())
        lines.append(f"{TUMOR_STATES[i % 4]},{vals}")
    return "\n".join(lines) + "\n"


def test_parse_100_by_34():
    d = parse_dataset(_table(100, 34))
    assert (d.n, d.p, d.n_levels) == (100, 34, 4)
    assert d.feature_names[0] == "gene1" and d.feature_names[-1] == "gene34"
    np.testing.assert_array_equal(d.labels[:4], [1, 2, 3, 4])


def test_parse_single_row():
    d = parse_dataset("state,a,b\nT1b,1.5,-2\n")
    assert d.n == 1
    assert d.labels.tolist() == [3]
    np.testing.assert_array_equal(d.X, [[1.5, -2.0]])


def test_label_column_anywhere():
    d = parse_dataset("a,tumor,b\n1,Ta,2\n3,>T1,4\n", label_column="tumor")
    assert d.feature_names == ("a", "b")
    np.testing.assert_array_equal(d.X, [[1, 2], [3, 4]])
    assert d.labels.tolist() == [1, 4]


def test_parse_from_file_object():
    d = parse_dataset(io.StringIO("state,a\nTa,1\nT1a,2\n"))
    assert d.n == 2


@pytest.mark.parametrize(
    "text, exc",
    [
        ("state,a,b\n", EmptyFile),
        ("", MissingHeader),
        ("x,a\nTa,1\n", UnknownLabelColumn),
        ("state,a\nTa,abc\n", NonNumericCell),
        ("state,a\nTa,\n", NonNumericCell),
        ("state,a\nTa,nan\n", NonNumericCell),
        ("state,a\nTa,inf\n", NonNumericCell),
        ("state,a\nT2,1\n", UnknownLevel),
    ],
)
def test_parse_errors(text, exc):
    with pytest.raises(exc):
        parse_dataset(text)


def test_non_numeric_cell_location():
    with pytest.raises(NonNumericCell) as info:
        parse_dataset("state,a,b\nTa,1,2\nT1a,3,x\n")
    assert info.value.row == 2 and info.value.col == "b"


def test_encode_states_default_order():
    np.testing.assert_array_equal(encode_states(["Ta", "T1a", "T1b", ">T1"]), [1, 2, 3, 4])


def test_encode_constant():
    np.testing.assert_array_equal(encode_states(["T1b"] * 5), [3] * 5)


def test_encode_unknown():
    with pytest.raises(UnknownLevel) as info:
        encode_states(["Ta", "T2"])
    assert info.value.level == "T2"


def test_round_trip():
    d = parse_dataset(_table(12, 5, seed=3))
    assert parse_dataset(serialize_dataset(d)) == d


def test_dataset_is_read_only():
    d = parse_dataset(_table(4, 2))
    with pytest.raises(ValueError):
        d.X[0, 0] = 1.0


def test_standardize_example():
    Z, rec = standardize(np.array([[1.0], [2.0], [3.0]]))
    np.testing.assert_allclose(Z.ravel(), [-1.0, 0.0, 1.0], atol=1e-15)
    assert rec.means[0] == 2.0 and rec.scales[0] == 1.0


def test_standardize_zero_variance():
    X = np.array([[1.0, 5.0], [2.0, 5.0], [3.0, 5.0]])
    with pytest.raises(ZeroVarianceColumn) as info:
        standardize(X)
    assert info.value.j == 1


def test_standardize_idempotent():
    rng = np.random.default_rng(0)
    Z, _ = standardize(rng.normal(size=(30, 4)))
    Z2, rec = standardize(Z)
    np.testing.assert_allclose(Z2, Z, atol=1e-12)
    assert np.abs(Z.mean(axis=0)).max() < 1e-12
    assert np.abs(Z.std(axis=0, ddof=1) - 1).max() < 1e-12


@settings(max_examples=50, deadline=None)
@given(
    hnp.arrays(
        float,
        st.tuples(st.integers(2, 20), st.integers(1, 6)),
        elements=st.floats(-1e3, 1e3, allow_nan=False),
    )
)
def test_standardize_inverts(X):
    if np.any(X.std(axis=0, ddof=1) <= 1e-6 * np.maximum(1, np.abs(X).max(axis=0))):
        return
    Z, rec = standardize(X)
    back = rec.invert(Z)
    scale = max(1.0, np.abs(X).max())
    assert np.abs(back - X).max() <= 1e-10 * scale


def test_select_eight_columns():
    d = parse_dataset(_table(10, 34))
    cols = [1, 2, 11, 20, 21, 25, 29, 34]
    sub = select_columns(d, [c - 1 for c in cols])
    assert sub.p == 8
    assert sub.feature_names == tuple(f"gene{c}" for c in cols)
    np.testing.assert_array_equal(sub.X, d.X[:, [c - 1 for c in cols]])


def test_select_identity():
    d = parse_dataset(_table(6, 3))
    assert select_rows(d, range(d.n)) == d
    assert select_columns(d, range(d.p)) == d


def test_select_preserves_order():
    d = parse_dataset(_table(6, 3))
    assert select_rows(d, [4, 1]) == select_rows(d, [1, 4])


@pytest.mark.parametrize("idx, exc", [([], EmptySelection), ([0, 7], IndexOutOfRange), ([-1], IndexOutOfRange)])
def test_select_errors(idx, exc):
    d = parse_dataset(_table(6, 3))
    with pytest.raises(exc):
        select_rows(d, idx)


@settings(max_examples=50, deadline=None)
@given(st.data())
def test_select_rows_composes(data):
    d = parse_dataset(_table(15, 2, seed=1))
    a = sorted(data.draw(st.sets(st.integers(0, 14), min_size=1)))
    b = sorted(data.draw(st.sets(st.integers(0, len(a) - 1), min_size=1)))
    assert select_rows(select_rows(d, a), b) == select_rows(d, [a[i] for i in b])


def test_parse_matrix_with_ids():
    ids, names, M = parse_matrix("row_id,pc1,pc2\n0,1.0,2.0\n1,3.0,4.0\n")
    assert ids == ["0", "1"] and names == ["pc1", "pc2"]
    np.testing.assert_array_equal(M, [[1, 2], [3, 4]])


def test_dataset_rejects_bad_labels():
    with pytest.raises(ValueError):
        Dataset(np.array([0, 1]), TUMOR_STATES, np.zeros((2, 1)), ("a",))
