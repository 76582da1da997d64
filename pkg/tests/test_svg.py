import xml.etree.ElementTree as ET

import numpy as np

from mwca.svg import SIZE, biplot

NS = "{http://www.w3.org/2000/svg}"


def test_structure_and_escaping():
    clouds = [("a", ["p<1", "q"], np.array([[1.0, 0.0], [-0.5, 0.5]])),
              ("b", ["r"], np.array([[0.0, -2.0]]))]
    svg = biplot(clouds, ("x", "y"), title="t")
    root = ET.fromstring(svg.split("\n", 1)[1])
    groups = root.findall(f"{NS}g[@class='cloud']")
    assert [g.get("data-mode") for g in groups] == ["a", "b"]
    texts = [t.text for t in root.iter(f"{NS}text")]
    assert "p<1" in texts and "r" in texts
    assert groups[0].find(f"{NS}circle") is not None
    assert groups[1].find(f"{NS}rect") is not None


def test_symmetric_equal_aspect():
    svg = biplot([("a", ["p", "q"], np.array([[2.0, 0.0], [0.0, -1.0]]))])
    root = ET.fromstring(svg.split("\n", 1)[1])
    circles = root.findall(f".//{NS}g[@class='cloud']/{NS}circle")
    (x0, y0), (x1, y1) = [(float(c.get("cx")), float(c.get("cy"))) for c in circles]
    c = SIZE / 2
    # largest |coordinate| sits at 1/1.05 of the half-width
    assert abs((x0 - c) - (SIZE / 2 - 48) / 1.05) < 1e-2
    assert y0 == c
    assert abs((y1 - c) * 2 - (x0 - c)) < 1e-2


def test_deterministic():
    clouds = [("a", ["p"], np.array([[0.1234567, -0.7654321]]))]
    assert biplot(clouds) == biplot(clouds)
