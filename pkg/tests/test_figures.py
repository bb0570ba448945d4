"""PNG rendering: files exist, are PNGs, and rerenders are byte-identical."""

import numpy as np

from abgsem.experiments import CdfTable
from abgsem.figures import render_ee_sweep, render_maxmin_sweep, render_outage_cdf

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


def cdf_pair():
    values = np.linspace(0.5, 0.99, 50)
    cdf = np.arange(1, 51, dtype=float) / 50
    fixed = CdfTable(values=values, cdf=cdf, threshold=0.9, outage=0.4)
    adaptive = CdfTable(values=np.full(50, 0.9), cdf=cdf, threshold=0.9, outage=0.0)
    return fixed, adaptive


def test_outage_png_determinism(tmp_path):
    fixed, adaptive = cdf_pair()
    render_outage_cdf(fixed, adaptive, tmp_path / "one.png")
    render_outage_cdf(fixed, adaptive, tmp_path / "two.png")
    one = (tmp_path / "one.png").read_bytes()
    assert one.startswith(PNG_MAGIC)
    assert one == (tmp_path / "two.png").read_bytes()


def test_sweep_renders_tolerate_nan_rows(tmp_path):
    rows = [(0.5, float("nan"), float("nan")), (1.0, 1.0, 0.25), (2.0, 1.0, 0.25)]
    render_ee_sweep(rows, "power cap (W)", tmp_path / "ee.png")
    render_maxmin_sweep(rows, tmp_path / "mm.png")
    for name in ("ee.png", "mm.png"):
        assert (tmp_path / name).read_bytes().startswith(PNG_MAGIC)
