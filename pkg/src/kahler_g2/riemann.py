"""Metrics, Levi-Civita connection, curvature and numerical holonomy ranks.

Sign convention (checked on the round sphere, which gets positive scalar
curvature):

    R^i_{jkl} = d_k G^i_{lj} - d_l G^i_{kj} + G^i_{km} G^m_{lj} - G^i_{lm} G^m_{kj}
    Ric_{jl}  = R^i_{jil}

All curvature quantities are dense arrays at a single point.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import jets as J
from .exterior import DifferentialForm, pack, to_dense, wedge_jets
from .jets import Chart, ChartMismatchError, DomainError, Field, Jet


class DegenerateMetricError(DomainError):
    pass


class MetricTensor:
    """Symmetric (n, n) tensor field on a chart."""

    def __init__(self, field: Field):
        n = field.chart.dim
        if field.shape != (n, n):
            raise ValueError(f"metric field must have shape ({n}, {n})")
        self.field = field
        self.chart = field.chart

    @property
    def dim(self) -> int:
        return self.chart.dim

    @property
    def max_order(self) -> int:
        return self.field.max_order

    def __call__(self, x: Jet) -> Jet:
        return self.field(x)

    def evaluate(self, point, order: int = 0) -> Jet:
        return self.field.evaluate(point, order)

    def value(self, point) -> np.ndarray:
        return np.asarray(self.field.value(point))

    def __add__(self, other: "MetricTensor") -> "MetricTensor":
        return MetricTensor(self.field + other.field)

    def __sub__(self, other: "MetricTensor") -> "MetricTensor":
        return MetricTensor(self.field - other.field)

    def scaled(self, f: Field | float) -> "MetricTensor":
        if isinstance(f, Field):
            return MetricTensor(Field(self.chart, lambda x: self.field(x) * f(x)[..., None, None],
                                      self.field.shape, min(f.max_order, self.max_order)))
        return MetricTensor(self.field * float(f))

    def cached(self) -> "MetricTensor":
        return MetricTensor(self.field.cached())

    def check_positive(self, point, floor: float = 1e-10) -> float:
        """Smallest eigenvalue at ``point``; raises if not above ``floor``."""
        ev = float(np.linalg.eigvalsh(self.value(point)).min())
        if ev <= floor:
            raise DegenerateMetricError(f"metric not positive definite at {tuple(point)} (min eigenvalue {ev:.3e})")
        return ev

    @classmethod
    def constant(cls, chart: Chart, matrix) -> "MetricTensor":
        m = np.asarray(matrix, dtype=float)
        return cls(J.constant(chart, m, m.shape))


def symmetric_square(alpha: DifferentialForm, coeff: Field | float = 1.0) -> MetricTensor:
    """coeff * alpha (x) alpha for a 1-form alpha."""
    if alpha.degree != 1:
        raise ValueError("symmetric square needs a 1-form")
    n = alpha.dim

    def fn(x: Jet) -> Jet:
        a = alpha.packed(x)
        out = a.reshape(n, 1) * a.reshape(1, n)
        if isinstance(coeff, Field):
            out = out * coeff(x)[..., None, None]
        else:
            out = out * float(coeff)
        return out

    mo = min(alpha.max_order, coeff.max_order if isinstance(coeff, Field) else J.MAX_ORDER)
    return MetricTensor(Field(alpha.chart, fn, (n, n), mo))


def metric_sum(terms: Sequence[MetricTensor]) -> MetricTensor:
    out = terms[0]
    for t in terms[1:]:
        out = out + t
    return out


# --------------------------------------------------------------------------
# connection and curvature at a point
# --------------------------------------------------------------------------


def _christoffel_jet(gj: Jet) -> Jet:
    """Christoffel symbols G^i_{jk} as a jet one order below ``gj``."""
    dg = gj.grad_jet()  # [a, b, c] = d_c g_ab
    g = gj.truncate(dg.order)
    ginv = J.inv(g)
    # S_{ljk} = d_j g_lk + d_k g_lj - d_l g_jk
    s = dg.transpose(0, 2, 1) + dg - dg.transpose(2, 0, 1)
    return J.einsum("il,ljk->ijk", ginv, s) * 0.5


def _check_metric(g0: np.ndarray, point) -> None:
    if not np.all(np.isfinite(g0)):
        raise DegenerateMetricError(f"metric not finite at {tuple(point)}")
    if np.linalg.cond(g0) > 1e12:
        raise DegenerateMetricError(f"metric singular at {tuple(point)}")


def christoffel(g: MetricTensor, point) -> np.ndarray:
    """G^i_{jk} = 1/2 g^{il} (d_j g_lk + d_k g_lj - d_l g_jk), indexed [i, j, k]."""
    gj = g.evaluate(point, 1)
    _check_metric(np.asarray(gj.value), point)
    return np.asarray(_christoffel_jet(gj).value)


@dataclass(frozen=True)
class CurvatureData:
    point: tuple[float, ...]
    metric: np.ndarray
    christoffel: np.ndarray
    riemann: np.ndarray
    ricci: np.ndarray
    scalar: float

    @property
    def lowered(self) -> np.ndarray:
        """R_{ijkl} = g_{im} R^m_{jkl}."""
        return np.einsum("im,mjkl->ijkl", self.metric, self.riemann)


def curvature(g: MetricTensor, point) -> CurvatureData:
    gj = g.evaluate(point, 2)
    g0 = np.asarray(gj.value)
    _check_metric(g0, point)
    gam_jet = _christoffel_jet(gj)
    gam = np.asarray(gam_jet.value)
    dgam = gam_jet.gradient  # [i, j, k, m] = d_m G^i_{jk}
    r = (
        np.einsum("iljk->ijkl", dgam)
        - np.einsum("ikjl->ijkl", dgam)
        + np.einsum("ikm,mlj->ijkl", gam, gam)
        - np.einsum("ilm,mkj->ijkl", gam, gam)
    )
    ric = np.einsum("ijil->jl", r)
    scal = float(np.einsum("jl,jl->", np.linalg.inv(g0), ric))
    return CurvatureData(tuple(map(float, point)), g0, gam, r, ric, scal)


def riemann_tensor(g: MetricTensor, point) -> np.ndarray:
    return curvature(g, point).riemann


def ricci(g: MetricTensor, point) -> np.ndarray:
    return curvature(g, point).ricci


def scalar_curvature(g: MetricTensor, point) -> float:
    return curvature(g, point).scalar


def metric_compatibility_residual(g: MetricTensor, point) -> float:
    """max |nabla_k g_ij| computed from the Christoffel symbols."""
    gj = g.evaluate(point, 1)
    g0 = np.asarray(gj.value)
    dg = gj.gradient  # [i, j, k]
    gam = christoffel(g, point)
    nab = dg - np.einsum("mki,mj->ijk", gam, g0) - np.einsum("mkj,im->ijk", gam, g0)
    return float(np.abs(nab).max())


def bianchi_residual(data: CurvatureData) -> float:
    r = data.riemann
    cyc = r + np.einsum("ijkl->iklj", r) + np.einsum("ijkl->iljk", r)
    return float(np.abs(cyc).max())


def symmetry_residual(data: CurvatureData) -> float:
    """Largest violation of the antisymmetries and pair symmetry of R_{ijkl}, and of Ric symmetry."""
    low = data.lowered
    res = [
        np.abs(low + low.transpose(1, 0, 2, 3)).max(),
        np.abs(low + low.transpose(0, 1, 3, 2)).max(),
        np.abs(low - low.transpose(2, 3, 0, 1)).max(),
        np.abs(data.ricci - data.ricci.T).max(),
    ]
    return float(max(res))


def numerical_rank(m: np.ndarray, threshold: float = 1e-8) -> int:
    s = np.linalg.svd(m, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > threshold * s[0]))


def curvature_matrices(data: CurvatureData) -> tuple[np.ndarray, np.ndarray]:
    n = data.metric.shape[0]
    a = data.riemann.reshape(n, n**3)
    raised = np.einsum("jm,imkl->ijkl", np.linalg.inv(data.metric), data.riemann)
    iu = np.triu_indices(n, 1)
    b = raised[iu[0], iu[1]][:, iu[0], iu[1]]
    return a, b


def curvature_ranks(g: MetricTensor, point, svd_threshold: float = 1e-8) -> tuple[int, int]:
    """Ranks of R^i_{jkl} with rows i, and of R^{[ij]}_{[kl]} on antisymmetric pairs."""
    a, b = curvature_matrices(curvature(g, point))
    return numerical_rank(a, svd_threshold), numerical_rank(b, svd_threshold)


# --------------------------------------------------------------------------
# metric of a definite 3-form in dimension 7
# --------------------------------------------------------------------------


def _bilinear_jet(phi: Jet) -> Jet:
    """B_ij with B_ij vol = (i_i phi) ^ (i_j phi) ^ phi, for packed phi on 7 coordinates."""
    n = 7
    dense = to_dense(phi, n, 3)  # [i, a, b]
    iota = pack(dense, n, 2)  # (7, 21): i_i phi
    pairs = wedge_jets(iota.reshape(n, 1, 21), iota.reshape(1, n, 21), n, 2, 2)  # (7, 7, 35)
    top = wedge_jets(pairs, phi, n, 4, 3)
    return top[..., 0]


def _real_root(x: Jet, p: int) -> Jet:
    """Sign-preserving real p-th root (p odd) of a scalar jet."""
    s = 1.0 if float(np.asarray(x.value)) > 0 else -1.0
    return J.power(x * s, 1.0 / p) * s


def metric_from_phi(phi: DifferentialForm) -> MetricTensor:
    """The metric determined by a definite 3-form on a 7-dimensional chart.

    With B as above, g = det(B/6)^(-1/9) B/6. The flat standard form maps to
    the identity and s^3 phi maps to s^2 g. A negative definite B belongs to
    the opposite orientation; the odd real root makes g positive either way.
    """
    if phi.dim != 7 or phi.degree != 3:
        raise ValueError("metric_from_phi needs a 3-form on a 7-dimensional chart")

    def fn(x: Jet) -> Jet:
        b = _bilinear_jet(phi.packed(x)) * (1.0 / 6.0)
        b0 = np.asarray(b.value)
        ev = np.linalg.eigvalsh(0.5 * (b0 + b0.T))
        if not (np.all(ev > 0) or np.all(ev < 0)):
            raise DomainError("3-form is not definite at this point")
        scale = J.reciprocal(_real_root(J.det(b), 9))
        return b * scale

    return MetricTensor(Field(phi.chart, fn, (7, 7), phi.max_order))


def phi_orientation(phi: DifferentialForm, point) -> int:
    """+1 if the bilinear form of phi is positive definite in the chart orientation, else -1."""
    b = np.asarray(_bilinear_jet(phi.evaluate(point, 0)).value)
    return 1 if np.linalg.eigvalsh(0.5 * (b + b.T)).min() > 0 else -1


def standard_phi(chart: Chart) -> DifferentialForm:
    """e123 + e145 + e167 + e246 - e257 - e347 - e356 in the chart coframe."""
    terms = {(0, 1, 2): 1, (0, 3, 4): 1, (0, 5, 6): 1, (1, 3, 5): 1, (1, 4, 6): -1, (2, 3, 6): -1, (2, 4, 5): -1}
    return DifferentialForm.from_coefficients(chart, 3, terms)


def same_chart(*objs) -> Chart:
    charts = {o.chart for o in objs}
    if len(charts) != 1:
        raise ChartMismatchError("objects live on different charts")
    return charts.pop()
