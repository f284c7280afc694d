import xml.etree.ElementTree as ET

import numpy as np
import pytest

from mixlasso.errors import MalformedInput
from mixlasso.lasso import LassoPath, lambda_grid
from mixlasso.modelsel import BicRow, BicTable, bic_display_transform
from mixlasso.svg import plot_csv, read_series
from mixlasso.tables import bic_csv, path_csv

NS = "{http://www.w3.org/2000/svg}"


def _eight_feature_csv():
    lams = lambda_grid(0.1, 0.03, 0.001)
    rng = np.random.default_rng(0)
    coefs = np.cumsum(rng.normal(size=(71, 8)) * 0.01, axis=0)
    names = tuple(f"gene{j}" for j in (1, 2, 11, 20, 21, 25, 29, 34))
    return path_csv(LassoPath(lams, coefs, names, np.full(8, np.nan)))


def _points(poly):
    return [tuple(map(float, p.split(","))) for p in poly.get("points").split()]


def test_eight_polylines():
    root = ET.fromstring(plot_csv(_eight_feature_csv()))
    assert root.tag == NS + "svg"
    polys = root.findall(f"{NS}polyline")
    assert len(polys) == 8
    assert all(len(_points(p)) == 71 for p in polys)
    labels = [t.text for t in root.findall(f"{NS}text")]
    assert "gene11" in labels and "gene34" in labels


def test_lambda_decreases_left_to_right():
    root = ET.fromstring(plot_csv(_eight_feature_csv(), width=600, height=400))
    xs = [x for x, _ in _points(root.find(f"{NS}polyline"))]
    # rows run from lambda = 0.1 down, so screen x must increase
    assert all(b > a for a, b in zip(xs, xs[1:]))
    assert 0 <= min(xs) and max(xs) <= 600


def test_no_external_references():
    text = plot_csv(_eight_feature_csv())
    assert "href" not in text and "http" not in text.replace("http://www.w3.org/2000/svg", "")


def test_single_point():
    root = ET.fromstring(plot_csv("lambda,feature,coefficient\n0.1,a,0.5\n"))
    polys = root.findall(f"{NS}polyline")
    assert len(polys) == 1 and len(_points(polys[0])) == 1


def test_bic_plot_single_series():
    rows = [BicRow(k, -100.0 / k, k, 50.0 + (k - 3) ** 2) for k in range(1, 8)]
    t = BicTable(rows)
    root = ET.fromstring(plot_csv(bic_csv(t, bic_display_transform(t))))
    polys = root.findall(f"{NS}polyline")
    assert len(polys) == 1
    xs = [x for x, _ in _points(polys[0])]
    assert xs == sorted(xs)


@pytest.mark.parametrize(
    "text, row",
    [
        ("", 1),
        ("lambda,feature,coefficient\n", 2),
        ("lambda,feature,coefficient\n0.1,a,0.5\n0.09,a,x\n", 3),
        ("lambda,feature,coefficient\n0.1,a\n", 2),
        ("a,b\n1,2\n", 1),
    ],
)
def test_malformed(text, row):
    with pytest.raises(MalformedInput) as info:
        read_series(text)
    assert info.value.row == row


def test_bad_size():
    with pytest.raises(ValueError):
        plot_csv("lambda,feature,coefficient\n0.1,a,0.5\n", width=0)
