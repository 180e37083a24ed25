import xml.etree.ElementTree as ET

import numpy as np

from curvedenoise.svg import render_svg

NS = "{http://www.w3.org/2000/svg}"


def test_samples_only_document():
    pts = np.random.default_rng(0).normal(size=(10, 2))
    root = ET.fromstring(render_svg(pts))
    assert root.tag == NS + "svg" and root.get("version") == "1.1"
    assert len(root.findall(f".//{NS}polygon")) == 0
    assert len(root.findall(f"{NS}g[@id='samples']/{NS}circle")) == 10


def test_discs_and_determinism():
    t = np.linspace(0, 2 * np.pi, 25, endpoint=False)
    v = np.column_stack([np.cos(t), np.sin(t)])
    doc = render_svg(v, [v], (v, np.full(25, 0.1)))
    assert doc == render_svg(v, [v], (v, np.full(25, 0.1)))
    root = ET.fromstring(doc)
    assert len(root.findall(f"{NS}g[@id='discs']/{NS}circle")) == 25
    assert len(root.findall(f"{NS}polygon")) == 1


def test_empty_input():
    root = ET.fromstring(render_svg(None))
    assert root.tag == NS + "svg"
