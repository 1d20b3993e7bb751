import math

import numpy as np
import pytest

from kahler_g2 import exterior as E
from kahler_g2 import jets as J
from kahler_g2 import riemann as R
from kahler_g2 import zoo as Z

from helpers import random_chart, random_metric, random_point


def round_sphere():
    ch = J.Chart(("th", "ph"), ((0.1, 3.0), (-4, 4)))
    th = J.coordinate(ch, "th")
    zero = J.constant(ch, 0.0)
    return R.MetricTensor(J.stack_fields([J.constant(ch, 1.0), zero, zero, th.map(J.sin) ** 2], (2, 2)))


def test_sphere_has_positive_scalar_curvature():
    d = R.curvature(round_sphere(), [1.0, 0.3])
    assert d.scalar == pytest.approx(2.0, abs=1e-12)
    assert np.allclose(d.ricci, d.metric, atol=1e-12)


def test_hyperbolic_plane():
    ch = J.Chart(("x", "y"), ((-1, 1), (0.5, 2)))
    y = J.coordinate(ch, "y")
    inv = 1.0 / (y * y)
    zero = J.constant(ch, 0.0)
    g = R.MetricTensor(J.stack_fields([inv, zero, zero, inv], (2, 2)))
    assert R.scalar_curvature(g, [0.2, 1.3]) == pytest.approx(-2.0, abs=1e-12)


def test_flat_metric_has_zero_curvature():
    ch = random_chart(4)
    g = R.MetricTensor.constant(ch, np.diag([1.0, 2.0, 3.0, 4.0]))
    d = R.curvature(g, [0.1] * 4)
    assert np.all(d.riemann == 0)
    assert R.curvature_ranks(g, [0.1] * 4) == (0, 0)


def test_symmetries_bianchi_compatibility():
    rng = np.random.default_rng(2)
    ch = random_chart(4)
    g = R.MetricTensor(random_metric(ch, rng))
    p = random_point(ch, rng)
    d = R.curvature(g, p)
    assert R.symmetry_residual(d) < 1e-12
    assert R.bianchi_residual(d) < 1e-12
    assert R.metric_compatibility_residual(g, p) < 1e-13


def test_christoffel_oracle_on_sphere():
    gam = R.christoffel(round_sphere(), [1.0, 0.0])
    # G^th_{ph ph} = -sin cos, G^ph_{th ph} = cot
    assert gam[0, 1, 1] == pytest.approx(-math.sin(1) * math.cos(1))
    assert gam[1, 0, 1] == pytest.approx(math.cos(1) / math.sin(1))


def test_metric_from_standard_phi():
    ch = J.Chart(tuple("abcdefg"), ((-1, 1),) * 7)
    phi = R.standard_phi(ch)
    o = [0.0] * 7
    assert np.array_equal(np.round(R.metric_from_phi(phi).value(o), 14), np.eye(7))
    assert np.allclose(R.metric_from_phi(phi * 8.0).value(o), 4 * np.eye(7), atol=1e-13)
    assert R.phi_orientation(phi, o) == 1 and R.phi_orientation(-phi, o) == -1
    assert np.allclose(R.metric_from_phi(-phi).value(o), np.eye(7), atol=1e-13)
    g = R.metric_from_phi(phi)
    top = E.top_coefficient(phi ^ E.hodge_star(phi, g.field)).value(o)
    assert float(top) == pytest.approx(7.0, abs=1e-13)


def test_glps_metric_matches_closed_form():
    b = Z.glps()
    explicit = Z.glps_metric_explicit()
    rng = np.random.default_rng(0)
    for p in b.sample_points(5, rng):
        assert np.abs(b.metric.value(p) - explicit.value(p)).max() < 1e-14
    p = b.sample_points(1, rng)[0]
    assert R.curvature_ranks(b.metric, p) == (7, 14)


def test_degenerate_metric_rejected():
    ch = random_chart(2)
    g = R.MetricTensor.constant(ch, np.zeros((2, 2)))
    with pytest.raises(R.DegenerateMetricError):
        R.curvature(g, [0.0, 0.0])
