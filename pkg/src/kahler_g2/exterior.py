"""Differential forms on a chart: wedge, d, interior product, Hodge star, d^c.

Coefficients of a degree-k form are packed into a single tensor field of
shape ``(C(n, k),)`` indexed by the strictly increasing multi-indices in
``itertools.combinations`` order; an index that is never set is zero.
Every operation returns a new form whose packed field is evaluated lazily
through jets, so exterior derivatives of derived forms stay exact.
"""
from __future__ import annotations

import itertools
import math
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import jets as J
from .jets import Chart, ChartMismatchError, Field, Jet

# --------------------------------------------------------------------------
# combinatorial tables
# --------------------------------------------------------------------------


@lru_cache(maxsize=None)
def combos(n: int, k: int) -> tuple[tuple[int, ...], ...]:
    return tuple(itertools.combinations(range(n), k))


@lru_cache(maxsize=None)
def combo_index(n: int, k: int) -> dict[tuple[int, ...], int]:
    return {c: i for i, c in enumerate(combos(n, k))}


def sort_sign(idx: Sequence[int]) -> tuple[int, tuple[int, ...]]:
    """Sign of the permutation sorting ``idx`` (0 on a repeated index) and the sorted tuple."""
    idx = list(idx)
    if len(set(idx)) != len(idx):
        return 0, tuple(sorted(idx))
    sign = 1
    for i in range(len(idx)):
        for j in range(i + 1, len(idx)):
            if idx[i] > idx[j]:
                sign = -sign
    return sign, tuple(sorted(idx))


@lru_cache(maxsize=None)
def _wedge_table(n: int, ka: int, kb: int):
    ia, ib, sg, ir = [], [], [], []
    idx_r = combo_index(n, ka + kb)
    for a_i, a in enumerate(combos(n, ka)):
        for b_i, b in enumerate(combos(n, kb)):
            s, r = sort_sign(a + b)
            if s:
                ia.append(a_i)
                ib.append(b_i)
                sg.append(s)
                ir.append(idx_r[r])
    order = np.argsort(ir, kind="stable")
    ir = np.array(ir)[order]
    starts = np.searchsorted(ir, np.arange(len(idx_r)))
    return np.array(ia)[order], np.array(ib)[order], np.array(sg, dtype=float)[order], starts


@lru_cache(maxsize=None)
def _d_table(n: int, k: int, coords: tuple[int, ...]):
    """(component, variable) flat gather indices and signs for d, grouped by output."""
    idx_in = combo_index(n, k)
    out_combos = combos(n, k + 1)
    flat, sg, ir = [], [], []
    for r_i, r in enumerate(out_combos):
        for pos, var in enumerate(r):
            if var not in coords:
                continue
            rest = r[:pos] + r[pos + 1 :]
            flat.append(idx_in[rest] * n + var)
            sg.append((-1) ** pos)
            ir.append(r_i)
    return np.array(flat, dtype=int), np.array(sg, dtype=float), np.array(ir, dtype=int), len(out_combos)


@lru_cache(maxsize=None)
def _interior_table(n: int, k: int):
    """Flat (vector index, component) gather indices and signs for the contraction."""
    idx_in = combo_index(n, k)
    out_combos = combos(n, k - 1)
    flat, sg, ir = [], [], []
    for r_i, r in enumerate(out_combos):
        for var in range(n):
            if var in r:
                continue
            s, full = sort_sign((var,) + r)
            flat.append(var * len(idx_in) + idx_in[full])
            sg.append(s)
            ir.append(r_i)
    return np.array(flat, dtype=int), np.array(sg, dtype=float), np.array(ir, dtype=int), len(out_combos)


@lru_cache(maxsize=None)
def _dense_matrix(n: int, k: int) -> np.ndarray:
    """Matrix (n**k, C(n,k)) expanding packed coefficients to a dense antisymmetric tensor."""
    idx = combo_index(n, k)
    m = np.zeros((n**k, len(idx)))
    for flat, slot in enumerate(itertools.product(range(n), repeat=k)):
        s, c = sort_sign(slot)
        if s:
            m[flat, idx[c]] = s
    return m


@lru_cache(maxsize=None)
def _pack_positions(n: int, k: int) -> np.ndarray:
    return np.array([np.ravel_multi_index(c, (n,) * k) if k else 0 for c in combos(n, k)], dtype=int)


@lru_cache(maxsize=None)
def _epsilon_matrix(n: int, k: int) -> np.ndarray:
    """eps[I, J] = sign of the permutation (I, J) for increasing I (deg k), J (deg n-k)."""
    cols = combo_index(n, n - k)
    e = np.zeros((len(combos(n, k)), len(cols)))
    for i, a in enumerate(combos(n, k)):
        rest = tuple(x for x in range(n) if x not in a)
        s, _ = sort_sign(a + rest)
        e[i, cols[rest]] = s
    return e


def _segment_sum(jet: Jet, ir: np.ndarray, size: int) -> Jet:
    """Sum last-axis entries of ``jet`` into ``size`` bins labelled by ``ir``."""
    m = np.zeros((len(ir), size))
    m[np.arange(len(ir)), ir] = 1.0
    return J.einsum("...a,ar->...r", jet, m)


# --------------------------------------------------------------------------
# jet-level kernels (forms packed along the last axis, arbitrary batch axes)
# --------------------------------------------------------------------------


def wedge_jets(a: Jet, b: Jet, n: int, ka: int, kb: int) -> Jet:
    ia, ib, sg, starts = _wedge_table(n, ka, kb)
    prod = a.take(ia, -1) * b.take(ib, -1) * sg
    return prod.like(np.add.reduceat(prod.coeffs, starts, axis=-1))


def d_jets(grad: Jet, n: int, k: int, coords: tuple[int, ...]) -> Jet:
    """Exterior derivative from the gradient jet of packed coefficients, shape (..., N_k, n)."""
    flat, sg, ir, size = _d_table(n, k, coords)
    g = grad.reshape(grad.shape[:-2] + (grad.shape[-2] * n,))
    if len(flat) == 0:
        return J.zeros(grad.shape[:-2] + (size,), grad.nvars, grad.order)
    return _segment_sum(g.take(flat, -1) * sg, ir, size)


def interior_jets(v: Jet, a: Jet, n: int, k: int) -> Jet:
    flat, sg, ir, size = _interior_table(n, k)
    nk = a.shape[-1]
    outer = v.reshape(v.shape + (1,)) * a.reshape(a.shape[:-1] + (1, nk))
    outer = outer.reshape(outer.shape[:-2] + (n * nk,))
    return _segment_sum(outer.take(flat, -1) * sg, ir, size)


def to_dense(a, n: int, k: int):
    """Packed (..., N_k) -> dense antisymmetric (..., n, ..., n)."""
    m = _dense_matrix(n, k)
    if isinstance(a, Jet):
        d = J.einsum("...c,fc->...f", a, m)
        return d.reshape(a.shape[:-1] + (n,) * k)
    d = np.einsum("...c,fc->...f", a, m)
    return d.reshape(np.shape(a)[:-1] + (n,) * k)


def pack(dense, n: int, k: int):
    pos = _pack_positions(n, k)
    if isinstance(dense, Jet):
        flat = dense.reshape(dense.shape[: dense.shape.__len__() - k] + (n**k,))
        return flat.take(pos, -1)
    dense = np.asarray(dense)
    return dense.reshape(dense.shape[: dense.ndim - k] + (n**k,))[..., pos]


def raise_all(dense: Jet, ginv: Jet, k: int) -> Jet:
    letters = "abcdefg"[:k]
    out = dense
    for p in range(k):
        src = letters[:p] + "y" + letters[p + 1 :]
        out = J.einsum(f"{letters[p]}y,{src}->{letters}", ginv, out)
    return out


def hodge_jets(a: Jet, g: Jet, n: int, k: int, orientation: int = 1) -> Jet:
    ginv = J.inv(g)
    vol = J.exp(J.logabsdet(g) * 0.5)
    if k == 0:
        raised = a
    else:
        raised = pack(raise_all(to_dense(a, n, k), ginv, k), n, k)
    star = J.einsum("...i,ij->...j", raised, _epsilon_matrix(n, k))
    return star * vol * float(orientation)


def inner_jets(a: Jet, b: Jet, g: Jet, n: int, k: int) -> Jet:
    """Metric inner product of packed k-forms."""
    if k == 0:
        return (a * b)[..., 0]
    ginv = J.inv(g)
    raised = pack(raise_all(to_dense(b, n, k), ginv, k), n, k)
    return (a * raised).sum(-1)


# --------------------------------------------------------------------------
# forms, vectors, complex structures
# --------------------------------------------------------------------------


class DifferentialForm:
    """A degree-k form over a chart with packed jet-evaluable coefficients."""

    def __init__(self, chart: Chart, degree: int, packed: Field):
        if degree < 0 or degree > chart.dim:
            raise ValueError(f"degree {degree} impossible on a {chart.dim}-dimensional chart")
        if packed.shape != (math.comb(chart.dim, degree),):
            raise ValueError("packed coefficient field has the wrong shape")
        self.chart = chart
        self.degree = degree
        self.packed = packed

    # -- construction --------------------------------------------------------
    @classmethod
    def zero(cls, chart: Chart, degree: int) -> "DifferentialForm":
        return cls(chart, degree, J.constant(chart, 0.0, (math.comb(chart.dim, degree),)))

    @classmethod
    def from_coefficients(
        cls, chart: Chart, degree: int, coeffs: Mapping[Sequence[int | str], Field | float]
    ) -> "DifferentialForm":
        """Build from a sparse map multi-index -> coefficient; absent entries are zero.

        Multi-indices may use coordinate names and need not be sorted; the
        permutation sign is applied.
        """
        n = chart.dim
        idx = combo_index(n, degree)
        const = np.zeros(len(idx))
        fields: list[tuple[int, float, Field]] = []
        for key, val in coeffs.items():
            ints = tuple(chart.index(c) if isinstance(c, str) else int(c) for c in key)
            s, sorted_key = sort_sign(ints)
            if s == 0:
                continue
            pos = idx[sorted_key]
            if isinstance(val, Field):
                if val.chart != chart:
                    raise ChartMismatchError("coefficient lives on another chart")
                fields.append((pos, s, val))
            else:
                const[pos] += s * float(val)
        size = len(idx)
        mo = min([f.max_order for _, _, f in fields], default=J.MAX_ORDER)

        def fn(x: Jet) -> Jet:
            out = Jet.constant(const, x.nvars, x.order)
            if not fields:
                return out
            vals = J.stack([f(x) * s for _, s, f in fields])
            m = np.zeros((len(fields), size))
            for row, (pos, _, _) in enumerate(fields):
                m[row, pos] = 1.0
            return out + J.einsum("a,ar->r", vals, m)

        return cls(chart, degree, Field(chart, fn, (size,), mo))

    # -- access --------------------------------------------------------------
    @property
    def dim(self) -> int:
        return self.chart.dim

    @property
    def max_order(self) -> int:
        return self.packed.max_order

    @property
    def indices(self) -> tuple[tuple[int, ...], ...]:
        return combos(self.dim, self.degree)

    def __call__(self, x: Jet) -> Jet:
        return self.packed(x)

    def evaluate(self, point, order: int = 0) -> Jet:
        return self.packed.evaluate(point, order)

    def values(self, point) -> np.ndarray:
        return np.asarray(self.packed.value(point))

    def component(self, key: Sequence[int | str]) -> Field:
        ints = tuple(self.chart.index(c) if isinstance(c, str) else int(c) for c in key)
        s, sorted_key = sort_sign(ints)
        if s == 0:
            return J.constant(self.chart, 0.0)
        return self.packed[combo_index(self.dim, self.degree)[sorted_key]] * float(s)

    @property
    def coefficients(self) -> dict[tuple[int, ...], Field]:
        return {c: self.packed[i] for i, c in enumerate(self.indices)}

    def nonzero_at(self, point, tol: float = 0.0) -> dict[tuple[str, ...], float]:
        vals = self.values(point)
        return {
            tuple(self.chart.names[i] for i in c): float(v) for c, v in zip(self.indices, vals) if abs(v) > tol
        }

    def cached(self) -> "DifferentialForm":
        return DifferentialForm(self.chart, self.degree, self.packed.cached())

    # -- algebra -------------------------------------------------------------
    def _check(self, other: "DifferentialForm") -> None:
        if other.chart != self.chart:
            raise ChartMismatchError("forms live on different charts")

    def __add__(self, other: "DifferentialForm") -> "DifferentialForm":
        if isinstance(other, (int, float)) and other == 0:
            return self
        self._check(other)
        if other.degree != self.degree:
            raise ValueError("cannot add forms of different degree")
        return DifferentialForm(self.chart, self.degree, self.packed + other.packed)

    __radd__ = __add__

    def __sub__(self, other: "DifferentialForm") -> "DifferentialForm":
        return self + (-other)

    def __neg__(self) -> "DifferentialForm":
        return DifferentialForm(self.chart, self.degree, -self.packed)

    def __mul__(self, scalar) -> "DifferentialForm":
        if isinstance(scalar, Field):
            if scalar.shape != ():
                raise ValueError("forms can only be scaled by scalar fields")
            if scalar.chart != self.chart:
                raise ChartMismatchError("scalar lives on another chart")
            packed = Field(self.chart, lambda x: self.packed(x) * scalar(x)[..., None],
                           self.packed.shape, min(self.max_order, scalar.max_order))
            return DifferentialForm(self.chart, self.degree, packed)
        return DifferentialForm(self.chart, self.degree, self.packed * float(scalar))

    __rmul__ = __mul__

    def __xor__(self, other: "DifferentialForm") -> "DifferentialForm":
        return wedge(self, other)

    def __repr__(self) -> str:
        return f"DifferentialForm(degree={self.degree}, chart={self.chart.names})"


def coframe(chart: Chart) -> list[DifferentialForm]:
    """The coordinate 1-forms dx^0, ..., dx^{n-1}."""
    return [DifferentialForm.from_coefficients(chart, 1, {(i,): 1.0}) for i in range(chart.dim)]


def function_form(f: Field) -> DifferentialForm:
    """A scalar field viewed as a 0-form."""
    return DifferentialForm(f.chart, 0, f.map(lambda a: a.reshape(1), shape=(1,)))


def top_coefficient(a: DifferentialForm) -> Field:
    if a.degree != a.dim:
        raise ValueError("not a top-degree form")
    return a.packed[0]


def wedge(a: DifferentialForm, b: DifferentialForm) -> DifferentialForm:
    a._check(b)
    n, ka, kb = a.dim, a.degree, b.degree
    if ka + kb > n:
        raise ValueError(f"wedge product of degree {ka + kb} exceeds the chart dimension {n}")
    fn = lambda x: wedge_jets(a.packed(x), b.packed(x), n, ka, kb)
    packed = Field(a.chart, fn, (math.comb(n, ka + kb),), min(a.max_order, b.max_order))
    return DifferentialForm(a.chart, ka + kb, packed)


def exterior_d(a: DifferentialForm, coords: Iterable[int | str] | None = None) -> DifferentialForm:
    """Exterior derivative; with ``coords`` only those coordinate directions are differentiated."""
    n, k = a.dim, a.degree
    if k == n:
        raise ValueError("exterior derivative of a top-degree form leaves the chart")
    if coords is None:
        cs = tuple(range(n))
    else:
        cs = tuple(sorted(a.chart.index(c) if isinstance(c, str) else int(c) for c in coords))
    grad = a.packed.gradient_field()
    fn = lambda x: d_jets(grad(x), n, k, cs)
    return DifferentialForm(a.chart, k + 1, Field(a.chart, fn, (math.comb(n, k + 1),), grad.max_order))


class VectorField:
    """Contravariant vector field given by a packed component field of shape (n,)."""

    def __init__(self, chart: Chart, components: Field):
        if components.shape != (chart.dim,):
            raise ValueError("vector field needs one component per coordinate")
        self.chart = chart
        self.components = components

    @classmethod
    def coordinate(cls, chart: Chart, name: str | int) -> "VectorField":
        i = chart.index(name) if isinstance(name, str) else name
        e = np.zeros(chart.dim)
        e[i] = 1.0
        return cls(chart, J.constant(chart, e, (chart.dim,)))

    def __call__(self, x: Jet) -> Jet:
        return self.components(x)


def interior(v: VectorField, a: DifferentialForm) -> DifferentialForm:
    if v.chart != a.chart:
        raise ChartMismatchError("vector field and form live on different charts")
    n, k = a.dim, a.degree
    if k == 0:
        raise ValueError("interior product of a 0-form is undefined")
    fn = lambda x: interior_jets(v(x), a.packed(x), n, k)
    mo = min(v.components.max_order, a.max_order)
    return DifferentialForm(a.chart, k - 1, Field(a.chart, fn, (math.comb(n, k - 1),), mo))


def lie_derivative(v: VectorField, a: DifferentialForm) -> DifferentialForm:
    """Cartan formula L_v = d i_v + i_v d."""
    out = None
    if a.degree > 0:
        out = exterior_d(interior(v, a))
    if a.degree < a.dim:
        second = interior(v, exterior_d(a))
        out = second if out is None else out + second
    return out


def hodge_star(a: DifferentialForm, g: Field, orientation: int = 1) -> DifferentialForm:
    """Hodge star of ``a`` for the metric field ``g`` (shape (n, n))."""
    n, k = a.dim, a.degree
    fn = lambda x: hodge_jets(a.packed(x), g(x), n, k, orientation)
    mo = min(a.max_order, g.max_order)
    return DifferentialForm(a.chart, n - k, Field(a.chart, fn, (math.comb(n, n - k),), mo))


def form_norm_sq(a: DifferentialForm, g: Field) -> Field:
    n, k = a.dim, a.degree
    return Field(a.chart, lambda x: inner_jets(a.packed(x), a.packed(x), g(x), n, k), (),
                 min(a.max_order, g.max_order))


def volume_form(g: Field, orientation: int = 1) -> DifferentialForm:
    n = g.chart.dim
    fn = lambda x: (J.exp(J.logabsdet(g(x)) * 0.5) * float(orientation)).reshape(1)
    return DifferentialForm(g.chart, n, Field(g.chart, fn, (1,), g.max_order))


class AlmostComplexStructure:
    """Endomorphism field with entries J[i, j] = J^i_j, (JX)^i = J^i_j X^j."""

    def __init__(self, chart: Chart, matrix: Field):
        if matrix.shape != (chart.dim, chart.dim):
            raise ValueError("complex structure must be an n x n field")
        self.chart = chart
        self.matrix = matrix

    @classmethod
    def from_metric_and_form(cls, g: Field, sigma: DifferentialForm) -> "AlmostComplexStructure":
        """J with g(J., .) = sigma(., .), i.e. J = -g^{-1} sigma."""
        n = g.chart.dim

        def fn(x: Jet) -> Jet:
            s = to_dense(sigma.packed(x), n, 2)
            return -(J.inv(g(x)) @ s)

        return cls(g.chart, Field(g.chart, fn, (n, n), min(g.max_order, sigma.max_order)))

    def __call__(self, x: Jet) -> Jet:
        return self.matrix(x)

    def act_on_1form(self, gamma: DifferentialForm) -> DifferentialForm:
        """(J gamma)(X) = -gamma(J X)."""
        n = self.chart.dim
        fn = lambda x: -J.einsum("i,ij->j", gamma.packed(x), self.matrix(x))
        mo = min(self.matrix.max_order, gamma.max_order)
        return DifferentialForm(self.chart, 1, Field(self.chart, fn, (n,), mo))

    def square_residual(self, point) -> float:
        m = np.asarray(self.matrix.value(point))
        return float(np.abs(m @ m + np.eye(self.chart.dim)).max())

    def nijenhuis(self) -> Field:
        """N^i_{jk} = J^l_j d_l J^i_k - J^l_k d_l J^i_j - J^i_l (d_j J^l_k - d_k J^l_j)."""
        n = self.chart.dim
        grad = self.matrix.gradient_field()  # [i, j, l] = d_l J^i_j

        def fn(x: Jet) -> Jet:
            m = self.matrix(x).truncate(x.order)
            dm = grad(x)
            t1 = J.einsum("lj,ikl->ijk", m, dm)
            t2 = J.einsum("lk,ijl->ijk", m, dm)
            a = J.einsum("il,lkj->ijk", m, dm)  # J^i_l d_j J^l_k
            b = J.einsum("il,ljk->ijk", m, dm)  # J^i_l d_k J^l_j
            return t1 - t2 - a + b

        return Field(self.chart, fn, (n, n, n), grad.max_order)


def d_c(f: Field, cx: AlmostComplexStructure) -> DifferentialForm:
    """d^c f = J df."""
    return cx.act_on_1form(exterior_d(function_form(f)))


# --------------------------------------------------------------------------
# charts: restriction to coordinate slices and lifts along projections
# --------------------------------------------------------------------------


def slice_chart(chart: Chart, removed: str) -> Chart:
    i = chart.index(removed)
    return Chart(chart.names[:i] + chart.names[i + 1 :], chart.domain[:i] + chart.domain[i + 1 :])


def slice_embedding(chart: Chart, removed: str, value: float):
    """Map from the slice chart into ``chart`` fixing coordinate ``removed``."""
    i = chart.index(removed)

    def embed(x: Jet) -> Jet:
        parts = [x[j] for j in range(x.shape[0])]
        parts.insert(i, Jet.constant(value, x.nvars, x.order))
        return J.stack(parts)

    return embed


def restrict_field(f: Field, removed: str, value: float = 0.0) -> Field:
    return f.pullback(slice_chart(f.chart, removed), slice_embedding(f.chart, removed, value))


def restrict_form(a: DifferentialForm, removed: str, value: float = 0.0) -> DifferentialForm:
    """Pullback along the inclusion of the slice ``removed = value``."""
    small = slice_chart(a.chart, removed)
    i = a.chart.index(removed)
    keep = [c_i for c_i, c in enumerate(a.indices) if i not in c]
    embed = slice_embedding(a.chart, removed, value)
    fn = lambda x: a.packed(embed(x)).take(keep, -1)
    return DifferentialForm(small, a.degree, Field(small, fn, (len(keep),), a.max_order))


def restrict_metric(g: Field, removed: str, value: float = 0.0) -> Field:
    i = g.chart.index(removed)
    keep = [j for j in range(g.chart.dim) if j != i]
    small = slice_chart(g.chart, removed)
    embed = slice_embedding(g.chart, removed, value)
    fn = lambda x: g(embed(x)).take(keep, 0).take(keep, 1)
    return Field(small, fn, (len(keep), len(keep)), g.max_order)


def projection(big: Chart, small: Chart):
    """Map (by coordinate names) from ``big`` onto the sub-chart ``small``."""
    idx = [big.index(nm) for nm in small.names]
    return lambda x: x.take(idx, 0), idx


def lift_field(f: Field, big: Chart) -> Field:
    proj, _ = projection(big, f.chart)
    return f.pullback(big, proj)


def lift_form(a: DifferentialForm, big: Chart) -> DifferentialForm:
    """Pullback of a form along the coordinate projection ``big -> a.chart``."""
    proj, idx = projection(big, a.chart)
    big_index = combo_index(big.dim, a.degree)
    m = np.zeros((len(a.indices), len(big_index)))
    for c_i, c in enumerate(a.indices):
        s, bc = sort_sign(tuple(idx[j] for j in c))
        m[c_i, big_index[bc]] = s
    fn = lambda x: J.einsum("...c,cb->...b", a.packed(proj(x)), m)
    return DifferentialForm(big, a.degree, Field(big, fn, (len(big_index),), a.max_order))


def lift_matrix(f: Field, big: Chart) -> Field:
    """Extend an endomorphism/bilinear field on a sub-chart by zero."""
    proj, idx = projection(big, f.chart)
    e = np.zeros((len(idx), big.dim))
    e[np.arange(len(idx)), idx] = 1.0
    fn = lambda x: J.einsum("bi,ic->bc", e.T, J.einsum("ij,jc->ic", f(proj(x)), e))
    return Field(big, fn, (big.dim, big.dim), f.max_order)


# --------------------------------------------------------------------------
# Poincare lemma on a star-shaped box
# --------------------------------------------------------------------------


def homotopy_primitive(a: DifferentialForm, center: Sequence[float] | None = None, nodes: int = 16) -> DifferentialForm:
    """K a with d(K a) = a for closed a, by radial integration about ``center``.

    (K a)(x) = int_0^1 s^{k-1} i_{x-c} a(c + s (x - c)) ds, evaluated with
    Gauss-Legendre quadrature (exact for polynomial coefficients of low degree).
    """
    n, k = a.dim, a.degree
    if k == 0:
        raise ValueError("0-forms have no primitive")
    c = np.zeros(n) if center is None else np.asarray(center, dtype=float)
    s_nodes, w = np.polynomial.legendre.leggauss(nodes)
    s_nodes = 0.5 * (s_nodes + 1.0)
    w = 0.5 * w

    def fn(x: Jet) -> Jet:
        rel = x - c
        total = None
        for s, wt in zip(s_nodes, w):
            y = rel * s + c
            term = interior_jets(rel, a.packed(y), n, k) * (wt * s ** (k - 1))
            total = term if total is None else total + term
        return total

    return DifferentialForm(a.chart, k - 1, Field(a.chart, fn, (math.comb(n, k - 1),), a.max_order))


def max_abs(a: DifferentialForm | Field, points: Iterable[Sequence[float]]) -> float:
    """Largest absolute coefficient value over sample points."""
    packed = a.packed if isinstance(a, DifferentialForm) else a
    return max((float(np.max(np.abs(packed.value(p)), initial=0.0)) for p in points), default=0.0)


def form_partial(a: DifferentialForm, var: str | int) -> DifferentialForm:
    """Coefficient-wise coordinate derivative (e.g. the t-derivative of a family of forms on M)."""
    return DifferentialForm(a.chart, a.degree, a.packed.partial(var))


def form_close(a: DifferentialForm, b: DifferentialForm, points, tol: float) -> float:
    """Largest coefficient difference over sample points (convenience for checks)."""
    return max_abs(a - b, points)


def pullback_inclusion(a: DifferentialForm, small: Chart, embed, idx: Sequence[int]) -> DifferentialForm:
    """Pullback along a coordinate inclusion: small coordinate j is big coordinate idx[j],
    the remaining big coordinates being held fixed by ``embed``."""
    n_small = small.dim
    big_index = combo_index(a.dim, a.degree)
    m = np.zeros((len(big_index), math.comb(n_small, a.degree)))
    for c_i, c in enumerate(combos(n_small, a.degree)):
        s, bc = sort_sign(tuple(idx[j] for j in c))
        m[big_index[bc], c_i] = s
    fn = lambda x: J.einsum("...b,bc->...c", a.packed(embed(x)), m)
    return DifferentialForm(small, a.degree, Field(small, fn, (m.shape[1],), a.max_order))
