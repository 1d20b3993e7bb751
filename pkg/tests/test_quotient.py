import numpy as np
import pytest

from kahler_g2 import exterior as E
from kahler_g2 import jets as J
from kahler_g2 import quotient as Q
from kahler_g2 import zoo as Z


def quotient_points(bundle, n, seed):
    pts = bundle.sample_points(n, np.random.default_rng(seed))
    return pts, np.delete(pts, bundle.chart.index("y"), axis=1)


@pytest.fixture(scope="module", params=["glps", "constant:-1,1,1,1", "airy:1"])
def reduced(request):
    b = Z.build_family(request.param)
    return b, Q.reduce(b)


def test_algebraic_identities(reduced):
    b, s = reduced
    _, pts = quotient_points(b, 6, 1)
    res = s.algebraic_residuals(pts)
    assert max(res.values()) <= 1e-9, res
    assert s.psi_relation_residual(pts) <= 1e-10


def test_type_identity_on_coordinate_covectors(reduced):
    b, s = reduced
    _, pts = quotient_points(b, 3, 2)
    gammas = list(np.eye(6)) + [np.random.default_rng(0).normal(size=6)]
    assert s.type_identity_residual(gammas, pts) <= 1e-10


def test_integrability_and_nijenhuis(reduced):
    b, s = reduced
    _, pts = quotient_points(b, 4, 3)
    assert Q.integrability_residual(s, pts) <= 1e-9
    assert Q.nijenhuis_residual(s.J, pts) <= 1e-9
    assert E.max_abs(E.exterior_d(s.sigma), pts) <= 1e-12
    assert Q.lie_invariance_residual(s, pts) <= 1e-10


def test_ricci_form_matches_log_t(reduced):
    b, s = reduced
    _, pts = quotient_points(b, 3, 4)
    assert Q.ricci_form_check(s, pts) <= 1e-7


def test_ricci_form_check_detects_wrong_target():
    b = Z.glps()
    s = Q.reduce(b)
    _, pts = quotient_points(b, 2, 5)
    wrong = E.exterior_d(s.dc(s.log_t())) * -0.5
    assert Q.ricci_form_residual(s.h, s.J, wrong, pts) > 1e-3


def test_base_ricci_and_chain(reduced):
    b, s = reduced
    full, pts = quotient_points(b, 3, 6)
    assert Q.base_ricci_form_check(b, full) <= 1e-8
    chain = Q.kahler_chain_residual(b, s, pts)
    assert max(chain.values()) <= 1e-10, chain


def test_glps_kahler_potential():
    b = Z.glps()
    s = Q.reduce(b)
    _, pts = quotient_points(b, 4, 7)
    t = J.coordinate(s.chart, "t")
    assert Q.potential_residual(s.sigma, s.J, t ** 5 * 0.2, pts) <= 1e-9
    assert Q.potential_residual(s.sigma, s.J, t ** 5 * 0.3, pts) > 1e-2


def test_reconstruction_roundtrip(reduced):
    b, s = reduced
    full, _ = quotient_points(b, 3, 8)
    g2 = Q.reconstruct_g2(s, b.eta, check_points=full)
    assert E.max_abs(g2.phi - b.phi, full) <= 1e-10
    assert E.max_abs(g2.star_phi - b.star_phi, full) <= 1e-10
    for p in full:
        assert np.abs(g2.metric.value(p) - b.metric.value(p)).max() <= 1e-10


def test_reduce_rejects_non_killing_field():
    b = Z.airy_g2(1.0)
    with pytest.raises(Q.ReductionError):
        Q.reduce(b, E.VectorField.coordinate(b.chart, "mu"))
