import numpy as np

from radialgauss.svg import histogram_svg, line_chart_svg, scatter_svg, write_svg


def test_scatter_is_deterministic_and_capped():
    Z = np.random.default_rng(0).standard_normal((1000, 2))
    a = scatter_svg(Z, max_points=100)
    assert a == scatter_svg(Z, max_points=100)
    assert a.count("<circle") == 100
    assert a.startswith("<svg") and a.rstrip().endswith("</svg>")


def test_histogram_with_overlay_escapes_text():
    svg = histogram_svg([0, 1, 2], [0.3, 0.7], title="a < b", overlay=([0, 2], [0.1, 0.5]))
    assert "a &lt; b" in svg
    assert svg.count("<rect") == 2 + 2
    assert "<polyline" in svg


def test_line_chart_log_axis(tmp_path):
    svg = line_chart_svg({"s": ([1e-3, 1e-1], [1.0, 2.0])}, log_x=True)
    assert "0.01" in svg
    p = tmp_path / "c.svg"
    write_svg(p, svg)
    assert p.read_text() == svg
