import math

import numpy as np
import pytest
import sympy
from scipy.special import airy

from kahler_g2 import exterior as E
from kahler_g2 import jets as J
from kahler_g2 import ma as M
from kahler_g2 import zoo as Z
from kahler_g2.jets import DomainError

HELMHOLTZ = [
    (1.0, "sin(lam)"), (1.0, "sin(mu)"), (1.0, "cos(lam)"), (2.0, "sin(lam)*cos(mu)"),
    (1.0, "sin(0.6*lam + 0.8*mu)"), (4.0, "0.2*cos(2*mu)"), (0.5, "sin(0.5*lam)*sin(0.5*mu)"),
]


def chart():
    return Z.g2_chart((0.5, 2.0))


def pts(n=6, seed=0, window=(0.5, 2.0)):
    return M.sample_box(chart(), n, np.random.default_rng(seed), overrides={"t": window})


def test_airy_initial_values_and_scipy():
    assert M.AI0 == pytest.approx(airy(0.0)[0], abs=1e-16)
    assert M.AIP0 == pytest.approx(airy(0.0)[1], abs=1e-16)
    for t in (-3.0, -0.7, 0.0, 0.9, 2.5):
        k, k1, k2 = M.airy_eval(1.0, (M.AI0, M.AIP0), t)
        ai, aip, _, _ = airy(t)
        assert k == pytest.approx(ai, rel=1e-11, abs=1e-15)
        assert k1 == pytest.approx(aip, rel=1e-11, abs=1e-15)
        assert k2 == pytest.approx(t * ai, rel=1e-11, abs=1e-15)
    # Ai is recessive: forward evaluation picks up a Bi component of rounding size
    k, _, _ = M.airy_eval(1.0, (M.AI0, M.AIP0), 6.0)
    ai, _, bi, _ = airy(6.0)
    assert abs(k - ai) <= 1e-14 * bi


def test_airy_residual_and_scaling():
    K = M.AirySolution(2.5, 0.3, -1.1)
    for t in np.linspace(-2, 3, 11):
        assert abs(K.residual(t)) <= 1e-10 * (1 + abs(K(t)[0]) * abs(t))
    # K(t) for c = 2.5 is Ai(c^{1/3} t) up to the initial data
    s = 2.5 ** (1 / 3)
    Ka = M.AirySolution(2.5, M.AI0, M.AIP0 * s)
    assert Ka(1.2)[0] == pytest.approx(airy(s * 1.2)[0], rel=1e-11)
    assert M.AirySolution(1.0).scaled(2.0)(0.5)[0] == pytest.approx(2 * airy(0.5)[0], rel=1e-12)
    Kd = M.AirySolution.decaying(2.5)
    assert (Kd.K0, Kd.K1) == pytest.approx((Ka.K0, Ka.K1), rel=1e-15)
    assert M.AirySolution.decaying(1.0) == M.AirySolution(1.0)


def test_airy_c_zero_is_linear():
    for t in (-1.0, 0.5, 3.0):
        k, k1, k2 = M.airy_eval(0.0, (1.5, -0.5), t)
        assert (k, k1, k2) == pytest.approx((1.5 - 0.5 * t, -0.5, 0.0), abs=1e-14)


def test_airy_field_jets():
    ch = chart()
    Kf = M.AirySolution(1.0).field(ch)
    p = pts(1)[0]
    jet = Kf.evaluate(p, 2)
    ai, aip, _, _ = airy(p[0])
    assert float(jet.value) == pytest.approx(ai, rel=1e-12)
    assert jet.gradient[0] == pytest.approx(aip, rel=1e-12)
    assert jet.hessian[0, 0] == pytest.approx(p[0] * ai, rel=1e-11)


def test_ma_operator_examples():
    ch = chart()
    p = pts(3)
    zero = J.constant(ch, 0.0)
    assert all(float(M.ma_operator(zero).value(x)) == 1.0 for x in p)
    lam = J.coordinate(ch, "lam")
    # (omega1 - (1/2) dd^c lam^2)^2: the dlam^dmu coefficient drops from 1 to 0
    assert all(float(M.ma_operator(lam * lam).value(x)) == pytest.approx(0.0, abs=1e-15) for x in p)
    mu, ell = J.coordinate(ch, "mu"), J.coordinate(ch, "ell")
    f = lam * lam + ell * ell
    # rank 4 Hessian: M = (1 - 1)(1 - 1) = 0 while 1 + Delta/2 = -1
    assert float(M.ma_operator(f).value(p[0])) == pytest.approx(0.0, abs=1e-15)
    assert float(M.foliation_shortcut(f).value(p[0])) == pytest.approx(-1.0)
    g = (lam * mu).map(J.sin)
    direct = M.ma_operator(g)
    x = p[1]
    hess = np.array(g.evaluate(x, 2).hessian)[3:5, 3:5]
    # for a function of (lam, mu) only, M = 1 + (1/2) Delta f with the non-negative Laplacian
    assert float(direct.value(x)) == pytest.approx(1 - 0.5 * np.trace(hess), abs=1e-13)


@pytest.mark.parametrize("c,H", HELMHOLTZ)
def test_foliation_shortcut_on_separable_family(c, H):
    prob = M.separable_solution(c, H)
    for x in prob.sample_points(4, np.random.default_rng(1)):
        w = M.ddc_M(prob.G)
        assert np.abs((w ^ w).values(x)).max() <= 1e-12
        assert abs(float((M.ma_operator(prob.G) - M.foliation_shortcut(prob.G)).value(x))) <= 1e-10


def test_pde_residual_examples():
    ch = chart()
    t, lam = J.coordinate(ch, "t"), J.coordinate(ch, "lam")
    hk = Z.flat_hk_c2()
    p = pts(5)
    for G in (t ** 3 * (1 / 3), t ** 3 * (1 / 3) + lam * t):
        r = M.pde_residual(M.MAProblem(G, hk, (0.5, 2.0)))
        assert max(abs(float(r.value(x))) for x in p) <= 1e-14
    bad = M.MAProblem(t ** 3 * (1 / 3) + lam * lam * t, hk, (0.5, 2.0))
    assert max(abs(float(bad.residual().value(x))) for x in p) > 0.1


@pytest.mark.parametrize("c,H", HELMHOLTZ)
def test_separable_residual_and_equivalence(c, H):
    prob = M.separable_solution(c, H)
    p = prob.sample_points(6, np.random.default_rng(2))
    res = max(abs(float(prob.residual().value(x))) for x in p)
    assert res <= 1e-9
    b = prob.to_bundle()
    dphi, dstar = b.torsion_residual(p[:3])
    assert dphi <= 10 * max(res, 1e-9) and dstar <= 10 * max(res, 1e-9)


def test_twenty_seeded_periodic_combinations():
    rng = np.random.default_rng(99)
    for _ in range(20):
        c = float(rng.uniform(0.3, 3.0))
        theta = float(rng.uniform(0, 2 * math.pi))
        a, b = math.sqrt(c) * math.cos(theta), math.sqrt(c) * math.sin(theta)
        H = f"{rng.uniform(0.2, 0.6):.6f}*sin({a!r}*lam + {b!r}*mu)"
        lo = float(rng.uniform(0.5, 1.0))
        prob = M.separable_solution(c, H, window=(lo, lo + 1.0))
        p = prob.sample_points(5, rng)
        assert max(abs(float(prob.residual().value(x))) for x in p) <= 1e-9


def test_example_data_and_xi():
    prob = M.separable_solution(1.0, "sin(lam)")
    b = Z.airy_g2(1.0)
    for x in prob.sample_points(4, np.random.default_rng(3)):
        assert np.abs(prob.xi_P.values(x) - b.xi_P.values(x)).max() <= 1e-14
        assert float(prob.u().value(x)) == pytest.approx(float(b.u.value(x)), abs=1e-14)
        assert np.abs(prob.omega_tilde().values(x) - b.omega_tilde.values(x)).max() <= 1e-14


def test_c_zero_constant_h_is_u_equals_t():
    prob = M.separable_solution(0.0, "0.7", K=M.AirySolution(0.0, 1.0, 0.5))
    for x in prob.sample_points(3, np.random.default_rng(4)):
        assert float(prob.u().value(x)) == pytest.approx(x[0], abs=1e-14)


def test_rejections():
    with pytest.raises(ValueError):
        M.separable_solution(1.0, "sin(2*lam)")
    with pytest.raises(ValueError):
        M.separable_solution(1.0, "sin(lam)", K=M.AirySolution(2.0))
    with pytest.raises(DomainError):
        M.separable_solution(1.0, "10*sin(lam)", window=(0.1, 0.3))


def test_parse_expression():
    ch = chart()
    f = M.parse_expression("sin(lambda)*exp(mu) + t**2 / 2 - pi", ch)
    x = pts(1)[0]
    expect = math.sin(x[3]) * math.exp(x[4]) + x[0] ** 2 / 2 - math.pi
    assert float(f.value(x)) == pytest.approx(expect, rel=1e-14)
    for bad in ("foo(lam)", "lam +", "q*lam", "lam % 2", "__import__('os')"):
        with pytest.raises(ValueError):
            M.parse_expression(bad, ch)


def test_sympy_field_matches_parser():
    ch = chart()
    names = ("t", "lam", "mu")
    syms = sympy.symbols(names)
    expr = sympy.sin(syms[1]) ** 2 * sympy.cos(syms[2]) / syms[0] + sympy.sqrt(syms[0]) - syms[0] ** 1.5
    f = M.sympy_field(expr, ch)
    g = M.parse_expression("sin(lam)**2*cos(mu)/t + sqrt(t) - t**1.5", ch)
    for x in pts(3):
        a, b = f.evaluate(x, 2), g.evaluate(x, 2)
        assert np.allclose(a.coeffs, b.coeffs, atol=1e-13, rtol=1e-13)


@pytest.mark.parametrize("c,H", [(1.0, "sin(lam)"), (2.0, "sin(lam)*cos(mu)"), (1.0, "sin(0.6*lam + 0.8*mu)")])
def test_explicit_route_agrees_with_potential_route(c, H):
    b1 = M.separable_explicit(c, H)
    b2 = M.separable_solution(c, H).to_bundle()
    for x in b1.sample_points(3, np.random.default_rng(5)):
        assert np.abs(b1.metric.value(x) - b2.metric.value(x)).max() <= 1e-12
        assert np.abs(b1.phi.values(x) - b2.phi.values(x)).max() <= 1e-12


def test_explicit_route_matches_airy_family():
    b1 = M.separable_explicit(1.0, "sin(lam)")
    b2 = Z.airy_g2(1.0)
    for x in b1.sample_points(3, np.random.default_rng(6)):
        assert np.abs(b1.metric.value(x) - b2.metric.value(x)).max() <= 1e-14


def test_helmholtz_residual():
    ch = chart()
    p = pts(3)
    assert M.helmholtz_residual(M.parse_expression("sin(lam)*cos(mu)", ch), 2.0, p) <= 1e-14
    assert M.helmholtz_residual(M.parse_expression("sin(lam)", ch), 2.0, p) > 0.01
