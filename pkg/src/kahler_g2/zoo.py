"""Explicit hyperkahler data, constant solutions, the general G2 assembly and named families.

Seven-dimensional chart: (t, x, y, lam, mu, ell, m) with t > 0. The circle
generated by V = d/dy is the symmetry being reduced, U = d/dx is the
Hamiltonian field on the quotient, and

    xi  = dx + xi_P,      eta = dy + eta_N,
    phi = omega~ ^ eta + dt ^ xi ^ eta + t (omega2 ^ xi + u omega3 ^ dt),
    k   = t g(t) + (t/u) xi xi + t u dt dt + t^-2 eta eta,

where g(t) is the Kahler metric of omega~(t) for the complex structure J1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np

from . import exterior as E
from . import jets as J
from .exterior import AlmostComplexStructure, DifferentialForm, VectorField
from .jets import Chart, DomainError, Field, Jet
from .riemann import MetricTensor, metric_from_phi, metric_sum, phi_orientation, symmetric_square

BASE_NAMES = ("lam", "mu", "ell", "m")
G2_NAMES = ("t", "x", "y") + BASE_NAMES
QUOTIENT_NAMES = ("t", "x") + BASE_NAMES
BOX = 3.0
DEFAULT_WINDOW = (0.5, 2.0)


class ConstructionError(ValueError):
    """A structure failed one of the checks made while it was built."""


def base_chart() -> Chart:
    return Chart(BASE_NAMES, ((-BOX, BOX),) * 4)


def g2_chart(window=DEFAULT_WINDOW) -> Chart:
    return Chart(G2_NAMES, ((float(window[0]), float(window[1])),) + ((-BOX, BOX),) * 6)


def quotient_chart(window=DEFAULT_WINDOW) -> Chart:
    return Chart(QUOTIENT_NAMES, ((float(window[0]), float(window[1])),) + ((-BOX, BOX),) * 5)


# --------------------------------------------------------------------------
# hyperkahler data
# --------------------------------------------------------------------------


@dataclass
class HyperkahlerData:
    """Flat hyperkahler 4-dimensional base with primitives for the forms used.

    ``eta_N`` satisfies d eta_N = -omega2; ``alpha1`` and ``alpha0`` are
    primitives of omega1 and omega0.
    """

    name: str
    chart: Chart
    omega1: DifferentialForm
    omega2: DifferentialForm
    omega3: DifferentialForm
    g0: np.ndarray
    eta_N: DifferentialForm
    alpha1: DifferentialForm
    omega0: DifferentialForm | None = None
    alpha0: DifferentialForm | None = None
    eps: int = 1

    @cached_property
    def J1(self) -> np.ndarray:
        """J1 = -g0^{-1} omega1, so g0(J1 X, Y) = omega1(X, Y)."""
        w = E.to_dense(self.omega1.values(np.zeros(4)), 4, 2)
        return -np.linalg.inv(self.g0) @ w

    def complex_structure(self) -> AlmostComplexStructure:
        return AlmostComplexStructure(self.chart, J.constant(self.chart, self.J1, (4, 4)))

    def forms(self) -> dict[str, DifferentialForm]:
        out = {"omega1": self.omega1, "omega2": self.omega2, "omega3": self.omega3,
               "eta_N": self.eta_N, "alpha1": self.alpha1}
        if self.omega0 is not None:
            out["omega0"] = self.omega0
            out["alpha0"] = self.alpha0
        return out

    def lifted(self, big: Chart) -> dict[str, DifferentialForm]:
        return {k: E.lift_form(v, big) for k, v in self.forms().items()}

    def lifted_J1(self, big: Chart) -> np.ndarray:
        """J1 extended by zero to a chart containing the base coordinates."""
        idx = [big.index(nm) for nm in self.chart.names]
        m = np.zeros((big.dim, big.dim))
        m[np.ix_(idx, idx)] = self.J1
        return m

    def lifted_complex_structure(self, big: Chart) -> AlmostComplexStructure:
        m = self.lifted_J1(big)
        return AlmostComplexStructure(big, J.constant(big, m, m.shape))

    def lifted_metric(self, big: Chart) -> np.ndarray:
        idx = [big.index(nm) for nm in self.chart.names]
        m = np.zeros((big.dim, big.dim))
        m[np.ix_(idx, idx)] = self.g0
        return m

    def identity_residuals(self) -> dict[str, float]:
        """Quaternionic wedge relations, closedness and the omega0 relations (at the origin)."""
        p = np.zeros(4)
        ws = [self.omega1, self.omega2, self.omega3]
        sq = [(w ^ w).values(p)[0] for w in ws]
        res = {
            "squares_equal": max(abs(sq[0] - sq[1]), abs(sq[1] - sq[2])),
            "cross_terms": max(abs((ws[i] ^ ws[j]).values(p)[0]) for i in range(3) for j in range(i + 1, 3)),
            "closed": max(float(np.abs(E.exterior_d(w).values(p)).max()) for w in ws),
            "eta_primitive": float(np.abs((E.exterior_d(self.eta_N) + self.omega2).values(p)).max()),
            "alpha1_primitive": float(np.abs((E.exterior_d(self.alpha1) - self.omega1).values(p)).max()),
        }
        if self.omega0 is not None:
            w0 = self.omega0
            omega_bar = sq[1] + sq[2]  # Omega ^ Omega-bar = omega2^2 + omega3^2
            res["omega0_square"] = abs((w0 ^ w0).values(p)[0] + 0.5 * self.eps * omega_bar)
            res["omega0_omega1"] = abs((w0 ^ self.omega1).values(p)[0])
            res["alpha0_primitive"] = float(np.abs((E.exterior_d(self.alpha0) - w0).values(p)).max())
        return res


def _form(chart: Chart, degree: int, terms: dict) -> DifferentialForm:
    return DifferentialForm.from_coefficients(chart, degree, terms)


def _linear_1form(chart: Chart, terms: list[tuple[float, str, str]]) -> DifferentialForm:
    """sum coef * coord * d(other)."""
    coeffs: dict[tuple[str], Field] = {}
    for coef, coord, diff in terms:
        f = J.coordinate(chart, coord) * coef
        coeffs[(diff,)] = coeffs[(diff,)] + f if (diff,) in coeffs else f
    return _form(chart, 1, coeffs)


def flat_hk_c2() -> HyperkahlerData:
    """C^2 with z1 = lam + i mu, z2 = ell + i m."""
    ch = base_chart()
    return HyperkahlerData(
        name="flat-c2",
        chart=ch,
        omega1=_form(ch, 2, {("lam", "mu"): 1, ("ell", "m"): 1}),
        omega2=_form(ch, 2, {("lam", "ell"): 1, ("mu", "m"): -1}),
        omega3=_form(ch, 2, {("lam", "m"): 1, ("mu", "ell"): 1}),
        g0=np.eye(4),
        eta_N=_linear_1form(ch, [(-1.0, "lam", "ell"), (1.0, "mu", "m")]),
        alpha1=_linear_1form(ch, [(-1.0, "mu", "lam"), (-1.0, "m", "ell")]),
        omega0=_form(ch, 2, {("lam", "mu"): 1, ("ell", "m"): -1}),
        alpha0=_linear_1form(ch, [(-1.0, "mu", "lam"), (1.0, "m", "ell")]),
    )


def hk_t4() -> HyperkahlerData:
    """Flat T^4 triple in the coframe (e1, e2, e3, e4) = (dlam, dmu, -dell, -dm).

    omega1 = e14 + e23, omega2 = e13 + e42, omega3 = -(e12 + e34), omega0 = e14 - e23.
    With eta_N = lam dell - mu dm and the primitives below, the constant solution
    (0, 0, 0, 1) reproduces the nilmanifold metric built on de5 = e13 + e42,
    de6 = e14 + e23.
    """
    ch = base_chart()
    return HyperkahlerData(
        name="t4",
        chart=ch,
        omega1=_form(ch, 2, {("lam", "m"): -1, ("mu", "ell"): -1}),
        omega2=_form(ch, 2, {("lam", "ell"): -1, ("mu", "m"): 1}),
        omega3=_form(ch, 2, {("lam", "mu"): -1, ("ell", "m"): -1}),
        g0=np.eye(4),
        eta_N=_linear_1form(ch, [(1.0, "lam", "ell"), (-1.0, "mu", "m")]),
        alpha1=_linear_1form(ch, [(-1.0, "lam", "m"), (-1.0, "mu", "ell")]),
        omega0=_form(ch, 2, {("lam", "m"): -1, ("mu", "ell"): 1}),
        alpha0=_linear_1form(ch, [(-1.0, "lam", "m"), (1.0, "mu", "ell")]),
    )


# --------------------------------------------------------------------------
# constant solutions
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ConstantParams:
    p: float
    q: float
    k: float
    l: float
    interval: tuple[float, float] = DEFAULT_WINDOW

    def __post_init__(self):
        a, b = self.interval
        if not (0 < a < b):
            raise DomainError("interval must satisfy 0 < a < b")

    def margin(self, t: float) -> float:
        """k + l t - |p + q t|; positive exactly where omega~ is positive."""
        return self.k + self.l * t - abs(self.p + self.q * t)

    def validate(self) -> None:
        # k + l t - |p + q t| is concave, so the minimum sits at an endpoint
        a, b = self.interval
        for end in (a, b):
            if self.margin(end) <= 0:
                raise DomainError(
                    f"positivity k + l t > |p + q t| fails at t = {end} for (p,q,k,l) = "
                    f"({self.p:g},{self.q:g},{self.k:g},{self.l:g})"
                )

    @property
    def degenerate(self) -> bool:
        """q = l = 0: omega~ is constant and the metric is a product with a line."""
        return self.q == 0 and self.l == 0

    def u(self, t: float) -> float:
        return t * ((self.k + self.l * t) ** 2 - (self.p + self.q * t) ** 2)


def constant_solution(params: ConstantParams, hk: HyperkahlerData, chart: Chart | None = None):
    """omega~ = (p + q t) omega0 + (k + l t) omega1 and u = t((k + l t)^2 - (p + q t)^2).

    Returns (omega~, u, xi_P) on the seven-dimensional chart; xi_P = q alpha0 + l alpha1.
    """
    params.validate()
    chart = g2_chart(params.interval) if chart is None else chart
    lift = hk.lifted(chart)
    t = J.coordinate(chart, "t")
    a = t * params.l + params.k
    if (params.p, params.q) != (0, 0):
        if hk.omega0 is None:
            raise ValueError("this parameter choice needs an omega0 on the base")
        b = t * params.q + params.p
        omega = lift["omega0"] * b + lift["omega1"] * a
        xi_P = lift["alpha0"] * params.q + lift["alpha1"] * params.l
        u = t * (a * a - b * b * float(hk.eps))
    else:
        omega = lift["omega1"] * a
        xi_P = lift["alpha1"] * params.l
        u = t * a * a
    return omega, u, xi_P


# --------------------------------------------------------------------------
# general assembly
# --------------------------------------------------------------------------


@dataclass
class G2Bundle:
    name: str
    chart: Chart
    hk: HyperkahlerData
    omega_tilde: DifferentialForm
    u: Field
    xi_P: DifferentialForm
    eta_N: DifferentialForm
    xi: DifferentialForm
    eta: DifferentialForm
    phi: DifferentialForm
    metric: MetricTensor
    star_phi: DifferentialForm
    orientation: int
    window: tuple[float, float]
    params: dict = field(default_factory=dict)

    @property
    def V(self) -> VectorField:
        return VectorField.coordinate(self.chart, "y")

    @property
    def U(self) -> VectorField:
        return VectorField.coordinate(self.chart, "x")

    def sample_points(self, n: int, rng: np.random.Generator, margin: float = 1e-3) -> np.ndarray:
        lo = np.array([d[0] for d in self.chart.domain])
        hi = np.array([d[1] for d in self.chart.domain])
        return rng.uniform(lo + margin, hi - margin, size=(n, self.chart.dim))

    # -- checks ---------------------------------------------------------------
    def d_phi(self) -> DifferentialForm:
        return E.exterior_d(self.phi)

    def d_star_phi(self) -> DifferentialForm:
        return E.exterior_d(self.star_phi)

    def torsion_residual(self, points) -> tuple[float, float]:
        return E.max_abs(self.d_phi(), points), E.max_abs(self.d_star_phi(), points)

    def evolution_residual(self, points) -> float:
        """omega~'' + d_M d^c_M u."""
        w2 = E.form_partial(E.form_partial(self.omega_tilde, "t"), "t")
        return E.max_abs(w2 + ddc_base(self.u, self.hk), points)

    def compatibility_residual(self, points) -> float:
        """t omega~ ^ omega~ - (u/2) Omega ^ Omega-bar."""
        lift = self.hk.lifted(self.chart)
        t = J.coordinate(self.chart, "t")
        obar = (lift["omega2"] ^ lift["omega2"]) + (lift["omega3"] ^ lift["omega3"])
        lhs = (self.omega_tilde ^ self.omega_tilde) * t
        return E.max_abs(lhs - obar * (self.u * 0.5), points)

    def primitive_residuals(self, points) -> tuple[float, float]:
        """d eta_N + omega2 and d xi_P - (d^c_M u ^ dt + omega~')."""
        lift = self.hk.lifted(self.chart)
        r_eta = E.max_abs(E.exterior_d(self.eta_N) + lift["omega2"], points)
        dcu = dc_base(self.u, self.hk)
        dt = E.coframe(self.chart)[0]
        target = (dcu ^ dt) + E.form_partial(self.omega_tilde, "t")
        r_xi = E.max_abs(E.exterior_d(self.xi_P) - target, points)
        return r_eta, r_xi

    def roundtrip_residual(self, points) -> float:
        g = metric_from_phi(self.phi)
        return max(float(np.abs(g.value(p) - self.metric.value(p)).max()) for p in points)

    def volume_identity_residual(self, points) -> float:
        """phi ^ *phi - 7 vol_k."""
        top = E.top_coefficient(self.phi ^ self.star_phi)
        vol = E.top_coefficient(E.volume_form(self.metric.field, self.orientation))
        return max(abs(float(top.value(p)) - 7.0 * float(vol.value(p))) for p in points)


def dc_base(f: Field, hk: HyperkahlerData) -> DifferentialForm:
    """d^c_M f = J1 d_M f on a chart containing the base coordinates."""
    jm = hk.lifted_complex_structure(f.chart)
    return jm.act_on_1form(E.exterior_d(E.function_form(f), hk.chart.names))


def ddc_base(f: Field, hk: HyperkahlerData) -> DifferentialForm:
    return E.exterior_d(dc_base(f, hk), hk.chart.names)


def kahler_metric(omega: DifferentialForm, cx: np.ndarray) -> MetricTensor:
    """g(X, Y) = omega(X, J Y) for a constant endomorphism J (zero off its block)."""
    n = omega.dim
    fn = lambda x: J.einsum("ab,bc->ac", E.to_dense(omega.packed(x), n, 2), cx)
    return MetricTensor(Field(omega.chart, fn, (n, n), omega.max_order))


def assemble_g2(omega_tilde: DifferentialForm, u: Field, hk: HyperkahlerData, xi_P: DifferentialForm | None = None,
                eta_N: DifferentialForm | None = None, name: str = "custom", window=DEFAULT_WINDOW,
                params: dict | None = None, check: bool = True, tol: float = 1e-8,
                probe_points: int = 3, seed: int = 0) -> G2Bundle:
    """The torsion-free G2 structure determined by (omega~(t), u(t)) over the base.

    ``omega_tilde`` and ``u`` live on the seven-dimensional chart and must not
    depend on x, y. With ``check`` the primitive relations and both evolution
    equations are verified at a few probe points.
    """
    chart = omega_tilde.chart
    if tuple(chart.names) != G2_NAMES:
        raise ValueError(f"expected chart coordinates {G2_NAMES}")
    lift = hk.lifted(chart)
    dt, dx, dy = E.coframe(chart)[:3]
    eta_N = lift["eta_N"] if eta_N is None else eta_N
    if xi_P is None:
        raise ValueError("xi_P must be supplied")
    t = J.coordinate(chart, "t")
    xi = dx + xi_P
    eta = dy + eta_N
    phi = (omega_tilde ^ eta) + (dt ^ xi ^ eta) + ((lift["omega2"] ^ xi) + (lift["omega3"] ^ dt) * u) * t
    gt = kahler_metric(omega_tilde, hk.lifted_J1(chart))
    k = metric_sum([
        gt.scaled(t),
        symmetric_square(xi, t / u),
        symmetric_square(dt, t * u),
        symmetric_square(eta, t ** -2),
    ])
    mid = _probe_points(chart, 1, seed)[0]
    orient = phi_orientation(phi, mid)
    star = E.hodge_star(phi, k.field, orient)
    bundle = G2Bundle(name, chart, hk, omega_tilde, u, xi_P, eta_N, xi, eta, phi, k, star, orient,
                      (float(window[0]), float(window[1])), dict(params or {}))
    if check:
        pts = _probe_points(chart, probe_points, seed)
        r_eta, r_xi = bundle.primitive_residuals(pts)
        if r_eta > tol or r_xi > tol:
            raise ConstructionError(f"primitive forms inconsistent (d eta_N: {r_eta:.2e}, d xi_P: {r_xi:.2e})")
        r14 = bundle.compatibility_residual(pts)
        if r14 > tol:
            raise ConstructionError(f"compatibility t omega~^2 = u/2 Omega^Omega-bar fails ({r14:.2e})")
        if omega_tilde.max_order >= 2 and u.max_order >= 2:
            r13 = bundle.evolution_residual(pts)
            if r13 > tol:
                raise ConstructionError(f"evolution omega~'' = -d_M d^c_M u fails ({r13:.2e})")
    return bundle


def _probe_points(chart: Chart, n: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    lo = np.array([d[0] for d in chart.domain])
    hi = np.array([d[1] for d in chart.domain])
    return rng.uniform(lo + 1e-3, hi - 1e-3, size=(n, chart.dim))


# --------------------------------------------------------------------------
# named families
# --------------------------------------------------------------------------


def constant_g2(params: ConstantParams, hk: HyperkahlerData | None = None, name: str | None = None) -> G2Bundle:
    hk = hk_t4() if hk is None else hk
    omega, u, xi_P = constant_solution(params, hk)
    tag = name or f"constant:{params.p:g},{params.q:g},{params.k:g},{params.l:g}"
    return assemble_g2(omega, u, hk, xi_P=xi_P, name=tag, window=params.interval,
                       params={"p": params.p, "q": params.q, "k": params.k, "l": params.l})


def glps(window=DEFAULT_WINDOW) -> G2Bundle:
    """The (0, 0, 0, 1) solution: k = t^2 g0 + t^-2 (eta^2 + xi^2) + t^4 dt^2."""
    return constant_g2(ConstantParams(0, 0, 0, 1, tuple(window)), name="glps")


def glps_metric_explicit(window=DEFAULT_WINDOW) -> MetricTensor:
    """Closed-form metric of the (0,0,0,1) family, written independently of the assembly."""
    ch = g2_chart(window)
    t, x, y, lam, mu, ell, m = (J.coordinate(ch, n) for n in G2_NAMES)
    dt, dx, dy, dlam, dmu, dell, dm = E.coframe(ch)
    e5 = dy + dell * lam - dm * mu
    e6 = dx - dell * mu - dm * lam
    terms = [symmetric_square(a, t * t) for a in (dlam, dmu, dell, dm)]
    terms += [symmetric_square(e5, t ** -2), symmetric_square(e6, t ** -2), symmetric_square(dt, t ** 4)]
    return metric_sum(terms)


def airy_g2(c: float = 1.0, window=DEFAULT_WINDOW, check: bool = True) -> G2Bundle:
    """Separable Airy solution with H = sin(sqrt(c) lam), K = 2 Ai(c^{1/3} t), written in closed form.

    With s = sqrt(c) and f = 1 + (c/2) K sin(s lam), which for c = 1 is
    f = 1 + Ai(t) sin(lam):
        omega~ = omega1 + (c/2) K sin(s lam) dlam^dmu,   u = t f,
        xi_P   = -(s/2) K'(t) cos(s lam) dmu.
    """
    from .ma import AirySolution

    if c <= 0:
        raise ValueError("the Airy family needs c > 0")
    hk = flat_hk_c2()
    ch = g2_chart(window)
    lift = hk.lifted(ch)
    s = math.sqrt(c)
    K = AirySolution.decaying(c).scaled(2.0)
    Kf = K.field(ch)
    Kp = K.derivative_field(ch, "t", 1)
    t = J.coordinate(ch, "t")
    lam = J.coordinate(ch, "lam")
    sl = (lam * s).map(J.sin)
    cl = (lam * s).map(J.cos)
    f = 1.0 + Kf * sl * (0.5 * c)
    dlam, dmu = E.coframe(ch)[3:5]
    omega = lift["omega1"] + (dlam ^ dmu) * (Kf * sl * (0.5 * c))
    xi_P = dmu * (Kp * cl * (-0.5 * s))
    u = t * f
    bundle = assemble_g2(omega, u, hk, xi_P=xi_P, name=f"airy:{c:g}", window=window, params={"c": c}, check=check)
    return bundle


def airy_metric_explicit(window=DEFAULT_WINDOW) -> MetricTensor:
    """t(f dlam^2 + f dmu^2 + dell^2 + dm^2) + f^-1 (dx - Ai' cos lam dmu)^2 + t^-2 (dy - lam dell + mu dm)^2 + t^2 f dt^2."""
    from .ma import AirySolution

    ch = g2_chart(window)
    ai = AirySolution(1.0)
    A = ai.field(ch)
    Ap = ai.derivative_field(ch, "t", 1)
    t, lam, mu = (J.coordinate(ch, n) for n in ("t", "lam", "mu"))
    f = 1.0 + A * lam.map(J.sin)
    dt, dx, dy, dlam, dmu, dell, dm = E.coframe(ch)
    e_x = dx - dmu * (Ap * lam.map(J.cos))
    e_y = dy - dell * lam + dm * mu
    return metric_sum([
        symmetric_square(dlam, t * f), symmetric_square(dmu, t * f), symmetric_square(dell, t),
        symmetric_square(dm, t), symmetric_square(e_x, 1.0 / f), symmetric_square(e_y, t ** -2),
        symmetric_square(dt, t * t * f),
    ])


# --------------------------------------------------------------------------
# Kahler quotient of the (0,0,0,1) solution
# --------------------------------------------------------------------------


@dataclass
class KahlerQuotient:
    chart: Chart
    sigma: DifferentialForm
    metric: MetricTensor
    J: AlmostComplexStructure
    xi: DifferentialForm
    hk: HyperkahlerData


def gibbons_quotient_kahler(hk: HyperkahlerData | None = None, window=DEFAULT_WINDOW) -> KahlerQuotient:
    """sigma = t omega1 + dt ^ xi, h = t g0 + t^-3 xi xi + t^3 dt dt on (t, x, base)."""
    hk = hk_t4() if hk is None else hk
    ch = quotient_chart(window)
    lift = hk.lifted(ch)
    t = J.coordinate(ch, "t")
    dt, dx = E.coframe(ch)[:2]
    xi = dx + lift["alpha1"]
    sigma = lift["omega1"] * t + (dt ^ xi)
    g0 = MetricTensor.constant(ch, hk.lifted_metric(ch))
    h = metric_sum([g0.scaled(t), symmetric_square(xi, t ** -3), symmetric_square(dt, t ** 3)])
    cx = AlmostComplexStructure.from_metric_and_form(h.field, sigma)
    return KahlerQuotient(ch, sigma, h, cx, xi, hk)


# --------------------------------------------------------------------------
# registry
# --------------------------------------------------------------------------

FAMILIES = {
    "glps": "nilmanifold metric, constant solution (p,q,k,l) = (0,0,0,1) on the flat T^4 triple",
    "constant:p,q,k,l": "constant solution omega~ = (p+qt) omega0 + (k+lt) omega1",
    "gibb-kahler": "six-dimensional Kahler quotient of the glps structure",
    "airy:c": "separable Airy solution on flat C^2 (c = 1: f = 1 + Ai(t) sin lam)",
}


def parse_family(spec: str) -> tuple[str, tuple[float, ...]]:
    spec = spec.strip()
    if ":" in spec:
        head, tail = spec.split(":", 1)
        try:
            args = tuple(float(v) for v in tail.split(","))
        except ValueError as exc:
            raise ValueError(f"bad parameters in family {spec!r}") from exc
    else:
        head, args = spec, ()
    if head == "glps" and not args:
        return head, args
    if head == "gibb-kahler" and not args:
        return head, args
    if head == "constant" and len(args) == 4:
        return head, args
    if head == "airy" and len(args) == 1:
        return head, args
    raise ValueError(f"unknown family {spec!r}; known: {', '.join(FAMILIES)}")


def build_family(spec: str, window=DEFAULT_WINDOW):
    head, args = parse_family(spec)
    if head == "glps":
        return glps(window)
    if head == "constant":
        return constant_g2(ConstantParams(*args, interval=tuple(window)))
    if head == "airy":
        return airy_g2(args[0], window)
    return gibbons_quotient_kahler(window=window)
