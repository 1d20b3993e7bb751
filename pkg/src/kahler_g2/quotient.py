"""Reduction of a G2 structure with a Killing field to an SU(3) structure on the quotient.

With V the symmetry, t = k(V, V)^(-1/2) and eta = t^2 k(V, .):

    sigma = i_V phi,   Psi- = -i_V *phi,   Psi+ = (phi - sigma ^ eta) / t,
    psi+- = t^(-1/2) Psi+-,   h = (k - t^-2 eta eta) / t,   h(J., .) = sigma.

The quotient chart drops the coordinate along V (here y); every reduced
object is horizontal and V-invariant, so it is the restriction to y = 0.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import exterior as E
from . import jets as J
from .exterior import AlmostComplexStructure, DifferentialForm, VectorField
from .jets import Chart, DomainError, Field, Jet
from .riemann import MetricTensor, curvature, metric_sum, symmetric_square


class ReductionError(ValueError):
    pass


@dataclass
class SU3Structure:
    chart: Chart
    sigma: DifferentialForm
    psi_plus: DifferentialForm
    psi_minus: DifferentialForm
    Psi_plus: DifferentialForm
    Psi_minus: DifferentialForm
    t: Field
    h: MetricTensor
    J: AlmostComplexStructure
    U: VectorField
    orientation: int = 1

    # -- pointwise algebraic identities ----------------------------------------
    def algebraic_residuals(self, points) -> dict[str, float]:
        s, pp, pm = self.sigma, self.psi_plus, self.psi_minus
        s3 = s ^ s ^ s
        vol = E.volume_form(self.h.field, self.orientation)
        dt = E.exterior_d(E.function_form(self.t))
        return {
            "sigma_psi_plus": E.max_abs(s ^ pp, points),
            "sigma_psi_minus": E.max_abs(s ^ pm, points),
            "psi_volume": E.max_abs((pp ^ pm) - s3 * (2.0 / 3.0), points),
            "four_volume": E.max_abs((pp ^ pm) - vol * 4.0, points),
            "norm_psi_plus": max(abs(float(E.form_norm_sq(pp, self.h.field).value(p)) - 4.0) for p in points),
            "norm_psi_minus": max(abs(float(E.form_norm_sq(pm, self.h.field).value(p)) - 4.0) for p in points),
            "hamiltonian": E.max_abs(E.interior(self.U, s) + dt, points),
            "j_square": max(self.J.square_residual(p) for p in points),
        }

    def psi_relation_residual(self, points) -> float:
        """psi+(X, Y, Z) - psi-(JX, Y, Z)."""
        n = self.chart.dim
        out = 0.0
        for p in points:
            jm = np.asarray(self.J.matrix.value(p))
            pp = E.to_dense(self.psi_plus.values(p), n, 3)
            pm = E.to_dense(self.psi_minus.values(p), n, 3)
            out = max(out, float(np.abs(pp - np.einsum("da,dbc->abc", jm, pm)).max()))
        return out

    def type_identity_residual(self, gammas: Sequence[np.ndarray], points) -> float:
        """(J gamma) ^ psi- - gamma ^ psi+ for constant-coefficient 1-forms gamma."""
        n = self.chart.dim
        out = 0.0
        for p in points:
            jm = np.asarray(self.J.matrix.value(p))
            pp = self.psi_plus.values(p)
            pm = self.psi_minus.values(p)
            for g in gammas:
                jg = -np.einsum("i,ij->j", g, jm)
                lhs = _wedge_values(jg, pm, n, 1, 3)
                rhs = _wedge_values(np.asarray(g, dtype=float), pp, n, 1, 3)
                out = max(out, float(np.abs(lhs - rhs).max()))
        return out

    def dc(self, f: Field) -> DifferentialForm:
        return E.d_c(f, self.J)

    def log_t(self) -> Field:
        return self.t.map(J.log)


def _wedge_values(a: np.ndarray, b: np.ndarray, n: int, ka: int, kb: int) -> np.ndarray:
    ja = Jet.constant(a, 1, 0)
    jb = Jet.constant(b, 1, 0)
    return np.asarray(E.wedge_jets(ja, jb, n, ka, kb).value)


def _contract_metric(g: MetricTensor, v: VectorField) -> DifferentialForm:
    n = g.dim
    fn = lambda x: J.einsum("ij,j->i", g(x), v(x))
    return DifferentialForm(g.chart, 1, Field(g.chart, fn, (n,), min(g.max_order, v.components.max_order)))


def _coordinate_of(v: VectorField, points) -> str:
    """The coordinate name along which a constant coordinate vector field points."""
    comps = np.asarray(v.components.value(points[0]))
    nz = np.flatnonzero(np.abs(comps) > 0)
    if len(nz) != 1 or comps[nz[0]] != 1.0:
        raise ReductionError("reduction is implemented for coordinate vector fields")
    return v.chart.names[nz[0]]


def reduce(bundle, V: VectorField | None = None, check_points: int = 4, seed: int = 0,
           tol: float = 1e-9) -> SU3Structure:
    """SU(3) structure on the quotient by the Killing field V (default d/dy)."""
    V = bundle.V if V is None else V
    rng = np.random.default_rng(seed)
    pts = bundle.sample_points(check_points, rng)
    axis = _coordinate_of(V, pts)
    kvv = Field(bundle.chart, lambda x: J.einsum("i,i->", V(x), J.einsum("ij,j->i", bundle.metric(x), V(x))), (),
                bundle.metric.max_order)
    for p in pts:
        if float(kvv.value(p)) <= 0:
            raise ReductionError("V vanishes at a sample point")
    lie = E.max_abs(E.lie_derivative(V, bundle.phi), pts)
    if lie > tol:
        raise ReductionError(f"V does not preserve phi (|L_V phi| = {lie:.2e})")
    t7 = kvv ** -0.5
    eta7 = _contract_metric(bundle.metric, V) * (t7 * t7)
    sigma7 = E.interior(V, bundle.phi)
    psim7 = -E.interior(V, bundle.star_phi)
    psip7 = (bundle.phi - (sigma7 ^ eta7)) * (1.0 / t7)
    h7 = _scaled_metric(bundle.metric, eta7, t7)
    chart = E.slice_chart(bundle.chart, axis)
    sigma = E.restrict_form(sigma7, axis)
    Psi_p = E.restrict_form(psip7, axis)
    Psi_m = E.restrict_form(psim7, axis)
    t = E.restrict_field(t7, axis)
    h = MetricTensor(E.restrict_metric(h7.field, axis))
    cx = AlmostComplexStructure.from_metric_and_form(h.field, sigma)
    s = t ** -0.5
    psi_p = Psi_p * s
    psi_m = Psi_m * s
    U = hamiltonian_field(sigma, t)
    orient = _quotient_orientation(bundle, axis)
    return SU3Structure(chart, sigma, psi_p, psi_m, Psi_p, Psi_m, t, h, cx, U, orient)


def _scaled_metric(k: MetricTensor, eta: DifferentialForm, t: Field) -> MetricTensor:
    """(k - t^-2 eta eta) / t."""
    n = k.dim

    def fn(x: Jet) -> Jet:
        tv = t(x)
        e = eta.packed(x)
        outer = e.reshape(n, 1) * e.reshape(1, n)
        return (k(x) - outer * (tv ** -2)[..., None, None]) * (1.0 / tv)[..., None, None]

    return MetricTensor(Field(k.chart, fn, (n, n), min(k.max_order, t.max_order, eta.max_order)))


def _quotient_orientation(bundle, axis: str) -> int:
    """Orientation of the quotient chart with vol_7 = vol_6 ^ eta (eta ~ d axis)."""
    i = bundle.chart.index(axis)
    # moving d(axis) to the last slot costs (-1)^(n - 1 - i)
    return bundle.orientation * (-1) ** (bundle.chart.dim - 1 - i)


def hamiltonian_field(sigma: DifferentialForm, t: Field) -> VectorField:
    """U with i_U sigma = -dt, i.e. sigma U = dt."""
    n = sigma.dim
    dt = E.exterior_d(E.function_form(t))

    def fn(x: Jet) -> Jet:
        s = E.to_dense(sigma.packed(x), n, 2)
        return J.einsum("ij,j->i", J.inv(s), dt.packed(x))

    return VectorField(sigma.chart, Field(sigma.chart, fn, (n,), min(sigma.max_order, dt.max_order)))


# --------------------------------------------------------------------------
# integrability and curvature identities
# --------------------------------------------------------------------------


def integrability_forms(s: SU3Structure) -> tuple[DifferentialForm, DifferentialForm]:
    """dpsi+ + (1/2) d^c log t ^ psi-  and  dpsi- - (1/2) d^c log t ^ psi+."""
    dcl = s.dc(s.log_t())
    r1 = E.exterior_d(s.psi_plus) + (dcl ^ s.psi_minus) * 0.5
    r2 = E.exterior_d(s.psi_minus) - (dcl ^ s.psi_plus) * 0.5
    return r1, r2


def integrability_residual(s: SU3Structure, points) -> float:
    r1, r2 = integrability_forms(s)
    return max(E.max_abs(r1, points), E.max_abs(r2, points))


def nijenhuis_residual(cx: AlmostComplexStructure, points) -> float:
    n = cx.nijenhuis()
    return max(float(np.abs(n.value(p)).max()) for p in points)


def ricci_form_at(h: MetricTensor, cx: AlmostComplexStructure, point) -> np.ndarray:
    """rho(X, Y) = Ric(JX, Y) as a dense antisymmetric matrix."""
    ric = curvature(h, point).ricci
    jm = np.asarray(cx.matrix.value(point))
    return np.einsum("ca,cb->ab", jm, ric)


def ricci_form_residual(h: MetricTensor, cx: AlmostComplexStructure, target: DifferentialForm, points) -> float:
    n = h.dim
    out = 0.0
    for p in points:
        rho = ricci_form_at(h, cx, p)
        tgt = E.to_dense(target.values(p), n, 2)
        out = max(out, float(np.abs(rho - tgt).max()))
    return out


def ricci_form_check(s: SU3Structure, points) -> float:
    """Ricci form of (h, J) against (1/2) dd^c log t."""
    target = E.exterior_d(s.dc(s.log_t())) * 0.5
    return ricci_form_residual(s.h, s.J, target, points)


def potential_residual(sigma: DifferentialForm, cx: AlmostComplexStructure, potential: Field, points) -> float:
    """dd^c(potential) - sigma."""
    return E.max_abs(E.exterior_d(E.d_c(potential, cx)) - sigma, points)


def lie_invariance_residual(s: SU3Structure, points) -> float:
    """|L_U sigma| and |L_U psi+| (U an infinitesimal isometry of the structure)."""
    return max(E.max_abs(E.lie_derivative(s.U, s.sigma), points),
               E.max_abs(E.lie_derivative(s.U, s.psi_plus), points))


def base_metric_at(bundle, point) -> tuple[MetricTensor, np.ndarray, Chart]:
    """Kahler metric g(t) of omega~ on the base, with t (and fibres) frozen at ``point``."""
    big = bundle.chart
    base = bundle.hk.chart
    idx = [big.index(n) for n in base.names]
    frozen = np.asarray(point, dtype=float)

    def embed(x: Jet) -> Jet:
        parts = [Jet.constant(frozen[i], x.nvars, x.order) for i in range(big.dim)]
        for j, i in enumerate(idx):
            parts[i] = x[j]
        return J.stack(parts)

    jm = bundle.hk.J1
    w = E.pullback_inclusion(bundle.omega_tilde, base, embed, idx)
    fn = lambda x: J.einsum("ab,bc->ac", E.to_dense(w.packed(x), 4, 2), jm)
    g = MetricTensor(Field(base, fn, (4, 4), w.max_order))
    return g, frozen[idx], base


def base_ricci_form_check(bundle, points) -> float:
    """Ricci form of g(t) on the base against -(1/2) d_M d^c_M log u."""
    from .zoo import ddc_base

    target = ddc_base(bundle.u.map(J.log), bundle.hk) * (-0.5)
    idx = [bundle.chart.index(n) for n in bundle.hk.chart.names]
    cx = bundle.hk.complex_structure()
    out = 0.0
    for p in points:
        g, q, base = base_metric_at(bundle, p)
        rho = ricci_form_at(g, cx, q)
        tgt7 = E.to_dense(target.values(p), bundle.chart.dim, 2)
        out = max(out, float(np.abs(rho - tgt7[np.ix_(idx, idx)]).max()))
    return out


def kahler_chain_residual(bundle, s: SU3Structure, points) -> dict[str, float]:
    """Compare the reduction with sigma = omega~ + dt ^ xi, h = g(t) + xi xi / u + u dt dt
    and psi+ = t^-1/2 (omega2 ^ xi + u omega3 ^ dt)."""
    from .zoo import kahler_metric

    axis = "y"
    lift = bundle.hk.lifted(bundle.chart)
    dt = E.coframe(bundle.chart)[0]
    t = J.coordinate(bundle.chart, "t")
    sig = bundle.omega_tilde + (dt ^ bundle.xi)
    gt = kahler_metric(bundle.omega_tilde, bundle.hk.lifted_J1(bundle.chart))
    h = metric_sum([gt, symmetric_square(bundle.xi, 1.0 / bundle.u), symmetric_square(dt, bundle.u)])
    psi = ((lift["omega2"] ^ bundle.xi) + (lift["omega3"] ^ dt) * bundle.u) * (t ** -0.5)
    sig6 = E.restrict_form(sig, axis)
    psi6 = E.restrict_form(psi, axis)
    h6 = E.restrict_metric(h.field, axis)
    return {
        "sigma": E.max_abs(sig6 - s.sigma, points),
        "metric": max(float(np.abs(h6.value(p) - s.h.value(p)).max()) for p in points),
        "psi_plus": E.max_abs(psi6 - s.psi_plus, points),
    }


# --------------------------------------------------------------------------
# reconstruction
# --------------------------------------------------------------------------


@dataclass
class G2Structure:
    chart: Chart
    phi: DifferentialForm
    star_phi: DifferentialForm
    metric: MetricTensor


def reconstruct_g2(s: SU3Structure, eta: DifferentialForm, tol: float = 1e-10,
                   check_points: Sequence[Sequence[float]] | None = None) -> G2Structure:
    """phi = sigma ^ eta + t^(3/2) psi+,  *phi = t^(1/2) psi- ^ eta + (t^2/2) sigma ^ sigma,
    k = t h + t^-2 eta eta, on the chart of ``eta`` (the quotient chart plus the fibre)."""
    big = eta.chart
    sigma = E.lift_form(s.sigma, big)
    pp = E.lift_form(s.psi_plus, big)
    pm = E.lift_form(s.psi_minus, big)
    t = E.lift_field(s.t, big)
    hl = _lift_metric(s.h, big)
    if check_points is not None:
        rhs = E.interior(s.U, s.psi_plus) * (s.t ** 0.5) * -1.0
        deta = E.exterior_d(eta)
        rhs_big = E.lift_form(rhs, big)
        r9 = E.max_abs(deta - rhs_big, check_points)
        if r9 > tol:
            raise ReductionError(f"d eta is not -t^(1/2) i_U psi+ (residual {r9:.2e})")
    phi = (sigma ^ eta) + pp * (t ** 1.5)
    star = ((pm ^ eta) * (t ** 0.5)) + (sigma ^ sigma) * (t * t * 0.5)
    k = metric_sum([hl.scaled(t), symmetric_square(eta, t ** -2)])
    return G2Structure(big, phi, star, k)


def _lift_metric(h: MetricTensor, big: Chart) -> MetricTensor:
    return MetricTensor(E.lift_matrix(h.field, big))
