import warnings
from pathlib import Path

import numpy as np
import pytest

from curvedenoise.model import (ConnectivityModel, ModelError, associate_samples, dumps_model, format_points,
                                load_model, loads_model, read_points, save_model, synthetic_connectivity,
                                write_points)
from curvedenoise.shapes import ShapeSpec, generate, sample_curve
from oracles import brute_association

GOLDEN = Path(__file__).parent / "golden" / "triangle.json"


def test_golden_round_trip_is_byte_identical(tmp_path):
    text = GOLDEN.read_text()
    model = loads_model(GOLDEN.read_bytes())
    assert len(model) == 3
    assert dumps_model(model) == text
    save_model(model, tmp_path / "m.json")
    assert (tmp_path / "m.json").read_bytes() == GOLDEN.read_bytes()
    assert load_model(tmp_path / "m.json").to_dict() == model.to_dict()


def _doc(**changes):
    d = loads_model(GOLDEN.read_text()).to_dict()
    d.update(changes)
    import json
    return json.dumps(d)


def test_non_unit_normal_is_rescaled_or_rejected():
    doc = _doc(normals=[[-1.2, -1.6], [0.8, -0.6], [0.0, 1.0]])
    with pytest.warns(UserWarning, match="rescaled"):
        model = loads_model(doc)
    assert np.allclose(model.normals[0], [-0.6, -0.8])
    with pytest.raises(ModelError, match=r"normals\[0\]"):
        loads_model(doc, strict=True)


@pytest.mark.parametrize("change, message", [
    (dict(vertices=[0, 1, 7]), r"vertices\[2\].*7"),
    (dict(neighborhoods=[[2, 0, 3], [3, 1, 9], [1, 2, 0]]), r"neighborhoods\[1\].*9"),
    (dict(radii=[0.1, -0.25, 0.0]), r"radii\[1\]"),
    (dict(vertices=[0, 1]), "at least 3"),
    (dict(neighborhoods=[[2, 0], [1, 2], [1, 2, 0]]), r"samples\[3\]"),
    (dict(closed=False), "closed"),
])
def test_validation_names_the_offender(change, message):
    with pytest.raises(ModelError, match=message):
        loads_model(_doc(**change))


def test_parse_error_reports_location():
    bad = GOLDEN.read_text().replace('"vertices": [0, 1, 2],', '"vertices": [0, 1, 2]')
    with pytest.raises(ModelError, match=r"line 4, column"):
        loads_model(bad)
    with pytest.raises(ModelError, match="missing"):
        loads_model('{"samples": []}')


def test_points_file_round_trip(tmp_path):
    pts = np.random.default_rng(3).normal(size=(40, 2)) * 1e3
    write_points(tmp_path / "p.txt", pts, "hello")
    back = read_points(tmp_path / "p.txt")
    assert np.array_equal(back, pts)
    assert format_points(back, "hello") == (tmp_path / "p.txt").read_text()
    (tmp_path / "bad.txt").write_text("1 2\n3\n")
    with pytest.raises(ModelError, match=":2:"):
        read_points(tmp_path / "bad.txt")


def test_synthetic_noise_free_circle_interpolates_samples():
    curve, noisy, model = generate(ShapeSpec("circle", 100, 0.0, 0))
    assert np.array_equal(model.vertices, curve.footpoints)
    assert np.all(model.noise_radii == 0)
    assert np.all(associate_samples(model).distance == 0)


def test_synthetic_uniform_radii():
    _, _, model = generate(ShapeSpec("circle", 100, 0.5, 1))
    assert np.all(model.noise_radii == 0.5)


def test_synthetic_sawtooth_ramp_radii_grow_along_x():
    spec = ShapeSpec("sawtooth", 60, 0.0, 0, size=6.0, profile="ramp", delta_end=0.6, perturb=False)
    _, _, model = generate(spec)
    x = model.vertices[:, 0]
    order = np.argsort(x, kind="stable")
    assert np.all(np.diff(model.noise_radii[order]) >= -1e-15)
    assert model.noise_radii.max() == pytest.approx(0.6)


def test_decimation_and_rejection():
    curve = sample_curve(ShapeSpec("circle", 12, 0.0, 0))
    model = synthetic_connectivity(curve, curve.footpoints, 4)
    assert len(model) == 3
    with pytest.raises(ModelError):
        synthetic_connectivity(curve, curve.footpoints, 6)


@pytest.mark.parametrize("seed", range(5))
def test_association_matches_brute_force(seed):
    _, _, model = generate(ShapeSpec("square", 200, 0.3, seed, size=3.0, decimation=4))
    assoc = associate_samples(model)
    assert np.array_equal(assoc.edge_of, brute_association(model))
    for k, members in enumerate(assoc.by_edge):
        assert np.all(assoc.edge_of[members] == k)


def test_association_tie_goes_to_lower_edge():
    # sample 3 sits on the bisector below vertex 1: equally far from edges 0 and 1
    samples = [(0, 0), (1, 0), (1, 1), (1.5, -0.5), (0.5, 0.5)]
    model = ConnectivityModel.build(samples, [0, 1, 2], [(-1, 0), (1, 0), (0, 1)],
                                    [0, 0, 0], [[4, 0], [3, 1], [2, 4]])
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assoc = associate_samples(model)
    assert assoc.edge_of[3] == 0
    reordered = ConnectivityModel.build(samples, [0, 1, 2], [(-1, 0), (1, 0), (0, 1)],
                                        [0, 0, 0], [[0, 4], [1, 3], [4, 2]])
    assert np.array_equal(associate_samples(reordered).edge_of, assoc.edge_of)


def test_min_noise_floor():
    model = loads_model(GOLDEN.read_text())
    floored = model.with_min_noise(0.2)
    assert np.array_equal(floored.noise_radii, [0.2, 0.25, 0.2])
    assert model.with_min_noise(0.0) is model
