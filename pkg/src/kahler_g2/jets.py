"""Charts, truncated Taylor jets and scalar/tensor fields with exact derivatives.

A :class:`Jet` stores the Taylor coefficients of a (tensor valued) function of
``nvars`` variables up to total degree ``order``.  The coefficient array has
shape ``(M,) + shape`` where ``M`` counts the monomials of degree ``<= order``
in graded order.  Products are truncated polynomial products, so every
arithmetic node propagates derivatives exactly (forward mode).

A :class:`Field` wraps a function ``fn(x: Jet) -> Jet`` defined on a
:class:`Chart`.  Evaluating at a point seeds ``x`` with the coordinate jet
and runs ``fn``; feeding ``fn`` any other jet of shape ``(dim,)`` composes the
field with that map, which is how pullbacks are done.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

MAX_ORDER = 3
DIVISION_EPS = 1e-12


class DomainError(ValueError):
    """Raised when a point lies outside a chart's domain or a function's domain."""


class OrderError(ValueError):
    """Raised when a derivative order beyond a field's support is requested."""


class ChartMismatchError(ValueError):
    pass


# --------------------------------------------------------------------------
# monomial tables
# --------------------------------------------------------------------------


@lru_cache(maxsize=None)
def monomials(nvars: int, order: int) -> tuple[tuple[int, ...], ...]:
    """Exponent tuples of degree <= order, graded then reverse-lexicographic."""
    out: list[tuple[int, ...]] = []
    for deg in range(order + 1):
        out.extend(_monomials_of_degree(nvars, deg))
    return tuple(out)


def _monomials_of_degree(nvars: int, deg: int) -> list[tuple[int, ...]]:
    if nvars == 0:
        return [()] if deg == 0 else []
    if nvars == 1:
        return [(deg,)]
    res = []
    for first in range(deg, -1, -1):
        for rest in _monomials_of_degree(nvars - 1, deg - first):
            res.append((first,) + rest)
    return res


@lru_cache(maxsize=None)
def monomial_index(nvars: int, order: int) -> dict[tuple[int, ...], int]:
    return {m: i for i, m in enumerate(monomials(nvars, order))}


def n_monomials(nvars: int, order: int) -> int:
    return math.comb(nvars + order, order)


@lru_cache(maxsize=None)
def _product_table(nvars: int, order: int):
    """Index pairs (a, b) with a + b = m, grouped by m, and group starts."""
    mons = monomials(nvars, order)
    idx = monomial_index(nvars, order)
    ia, ib, starts = [], [], []
    for m in mons:
        starts.append(len(ia))
        for a in _submonomials(m):
            b = tuple(mi - ai for mi, ai in zip(m, a))
            ia.append(idx[a])
            ib.append(idx[b])
    return np.array(ia), np.array(ib), np.array(starts)


def _submonomials(m: tuple[int, ...]):
    if not m:
        yield ()
        return
    for first in range(m[0] + 1):
        for rest in _submonomials(m[1:]):
            yield (first,) + rest


@lru_cache(maxsize=None)
def _partial_table(nvars: int, order: int, var: int):
    """For d/dx_var: source indices (order) and factors for monomials of order-1."""
    src_idx = monomial_index(nvars, order)
    src, fac = [], []
    for beta in monomials(nvars, order - 1):
        up = list(beta)
        up[var] += 1
        src.append(src_idx[tuple(up)])
        fac.append(up[var])
    return np.array(src), np.array(fac, dtype=float)


@lru_cache(maxsize=None)
def _dense_tables(nvars: int, order: int, deg: int):
    """Flat coefficient index and multiplicity factor for each dense derivative slot."""
    idx = monomial_index(nvars, order)
    shape = (nvars,) * deg
    pos = np.zeros(shape, dtype=int)
    fac = np.zeros(shape)
    for slot in np.ndindex(*shape):
        alpha = [0] * nvars
        for s in slot:
            alpha[s] += 1
        pos[slot] = idx[tuple(alpha)]
        fac[slot] = math.prod(math.factorial(a) for a in alpha)
    return pos, fac


# --------------------------------------------------------------------------
# Jet
# --------------------------------------------------------------------------


class Jet:
    """Truncated multivariate Taylor expansion of a tensor valued function."""

    __array_priority__ = 100
    __slots__ = ("coeffs", "nvars", "order", "identity")

    def __init__(self, coeffs: np.ndarray, nvars: int, order: int, identity: bool = False):
        self.coeffs = coeffs
        self.nvars = nvars
        self.order = order
        self.identity = identity

    # -- construction ------------------------------------------------------
    @classmethod
    def variables(cls, point: Sequence[float], order: int) -> "Jet":
        """The identity map x -> x seeded at ``point``."""
        point = np.asarray(point, dtype=float)
        n = point.shape[0]
        c = np.zeros((n_monomials(n, order), n))
        c[0] = point
        if order >= 1:
            c[1 : n + 1] = np.eye(n)
        return cls(c, n, order, identity=True)

    @classmethod
    def constant(cls, value, nvars: int, order: int) -> "Jet":
        value = np.asarray(value, dtype=float)
        c = np.zeros((n_monomials(nvars, order),) + value.shape)
        c[0] = value
        return cls(c, nvars, order)

    def like(self, coeffs: np.ndarray, order: int | None = None) -> "Jet":
        return Jet(coeffs, self.nvars, self.order if order is None else order)

    # -- views ---------------------------------------------------------------
    @property
    def shape(self) -> tuple[int, ...]:
        return self.coeffs.shape[1:]

    @property
    def value(self) -> np.ndarray:
        v = self.coeffs[0]
        return v.item() if v.ndim == 0 else v

    def derivative(self, deg: int) -> np.ndarray:
        """Dense derivative tensor, derivative axes last: shape + (n,)*deg."""
        if deg > self.order:
            raise OrderError(f"jet of order {self.order} has no derivative of order {deg}")
        pos, fac = _dense_tables(self.nvars, self.order, deg)
        arr = self.coeffs[pos]  # (n,)*deg + shape
        arr = arr * fac.reshape(fac.shape + (1,) * len(self.shape))
        return np.moveaxis(arr, tuple(range(deg)), tuple(range(-deg, 0))) if deg else arr

    @property
    def gradient(self) -> np.ndarray:
        return self.derivative(1)

    @property
    def hessian(self) -> np.ndarray:
        return self.derivative(2)

    @property
    def third(self) -> np.ndarray | None:
        return self.derivative(3) if self.order >= 3 else None

    def truncate(self, order: int) -> "Jet":
        if order >= self.order:
            return self
        return Jet(self.coeffs[: n_monomials(self.nvars, order)], self.nvars, order)

    def __repr__(self) -> str:
        return f"Jet(order={self.order}, nvars={self.nvars}, shape={self.shape}, value={self.value!r})"

    # -- structural ------------------------------------------------------------
    def __getitem__(self, idx) -> "Jet":
        if not isinstance(idx, tuple):
            idx = (idx,)
        return self.like(self.coeffs[(slice(None),) + idx])

    def reshape(self, *shape) -> "Jet":
        if len(shape) == 1 and isinstance(shape[0], tuple):
            shape = shape[0]
        return self.like(self.coeffs.reshape((self.coeffs.shape[0],) + tuple(shape)))

    def transpose(self, *axes) -> "Jet":
        if not axes:
            axes = tuple(reversed(range(len(self.shape))))
        elif len(axes) == 1 and isinstance(axes[0], tuple):
            axes = axes[0]
        return self.like(self.coeffs.transpose((0,) + tuple(a + 1 for a in axes)))

    @property
    def T(self) -> "Jet":
        return self.transpose()

    def sum(self, axis=None) -> "Jet":
        if axis is None:
            axis = tuple(range(len(self.shape)))
        elif isinstance(axis, int):
            axis = (axis,)
        axis = tuple((a % len(self.shape)) + 1 for a in axis)
        return self.like(self.coeffs.sum(axis=axis))

    def take(self, indices, axis: int = -1) -> "Jet":
        axis = axis % len(self.shape) + 1
        return self.like(np.take(self.coeffs, indices, axis=axis))

    # -- arithmetic ------------------------------------------------------------
    def _coerce(self, other) -> "Jet":
        if isinstance(other, Jet):
            if other.nvars != self.nvars:
                raise ChartMismatchError("jets over different variable sets")
            return other
        return Jet.constant(other, self.nvars, self.order)

    @staticmethod
    def _align(a: "Jet", b: "Jet") -> tuple["Jet", "Jet"]:
        o = min(a.order, b.order)
        return a.truncate(o), b.truncate(o)

    def __add__(self, other):
        if not isinstance(other, Jet):
            other = np.asarray(other, dtype=float)
            c = np.zeros((self.coeffs.shape[0],) + np.broadcast_shapes(self.shape, other.shape))
            c[...] = _pad(self.coeffs, c)
            c[0] += other
            return self.like(c)
        a, b = Jet._align(self, self._coerce(other))
        return a.like(_pad(a.coeffs, b.coeffs) + _pad(b.coeffs, a.coeffs), a.order)

    __radd__ = __add__

    def __neg__(self):
        return self.like(-self.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet):
            other = np.asarray(other, dtype=float)
            return self.like(_pad(self.coeffs, other[None]) * other)
        a, b = Jet._align(self, self._coerce(other))
        return bilinear(a, b, np.multiply, pad=True)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            return self * (1.0 / np.asarray(other, dtype=float))
        return self * reciprocal(other)

    def __rtruediv__(self, other):
        return reciprocal(self) * other

    def __pow__(self, p):
        if float(p).is_integer():
            n = int(p)
            return int_power(self, n) if n >= 0 else reciprocal(int_power(self, -n))
        return power(self, float(p))

    def __matmul__(self, other):
        return einsum("...ij,...jk->...ik", self, other)

    # -- differentiation -----------------------------------------------------
    def partial(self, var: int) -> "Jet":
        """Jet of d/dx_var, one order lower."""
        if self.order == 0:
            raise OrderError("cannot differentiate an order-0 jet")
        src, fac = _partial_table(self.nvars, self.order, var)
        c = self.coeffs[src] * fac.reshape((-1,) + (1,) * len(self.shape))
        return Jet(c, self.nvars, self.order - 1)

    def grad_jet(self) -> "Jet":
        """Jet of the gradient, derivative index as the last value axis."""
        parts = [self.partial(i).coeffs for i in range(self.nvars)]
        return Jet(np.stack(parts, axis=-1), self.nvars, self.order - 1)


def _pad(a: np.ndarray, ref: np.ndarray) -> np.ndarray:
    """Insert unit axes after the leading axis so a broadcasts like numpy against ref."""
    extra = ref.ndim - a.ndim
    if extra <= 0:
        return a
    return a.reshape((a.shape[0],) + (1,) * extra + a.shape[1:])


def bilinear(a: Jet, b: Jet, op: Callable, pad: bool = False) -> Jet:
    """Leibniz rule for a bilinear ``op`` acting with axis 0 as a batch axis."""
    a, b = Jet._align(a, a._coerce(b))
    ia, ib, starts = _product_table(a.nvars, a.order)
    A = a.coeffs[ia]
    B = b.coeffs[ib]
    if pad:
        A, B = _pad(A, B), _pad(B, A)
    prod = op(A, B)
    return Jet(np.add.reduceat(prod, starts, axis=0), a.nvars, a.order)


def einsum(subscripts: str, a, b) -> Jet:
    """Two-operand einsum where either operand may be a Jet or a constant array."""
    ins, out = subscripts.split("->")
    sa, sb = ins.split(",")
    if isinstance(a, Jet) and isinstance(b, Jet):
        sub = f"Z{sa},Z{sb}->Z{out}"
        return bilinear(a, b, lambda x, y: np.einsum(sub, x, y, optimize=True))
    if isinstance(a, Jet):
        return a.like(np.einsum(f"Z{sa},{sb}->Z{out}", a.coeffs, np.asarray(b, dtype=float), optimize=True))
    if isinstance(b, Jet):
        return b.like(np.einsum(f"{sa},Z{sb}->Z{out}", np.asarray(a, dtype=float), b.coeffs, optimize=True))
    return np.einsum(subscripts, a, b)


def stack(jets: Sequence, axis: int = 0) -> Jet:
    ref = next(j for j in jets if isinstance(j, Jet))
    order = min(j.order for j in jets if isinstance(j, Jet))
    items = [(j if isinstance(j, Jet) else ref._coerce(j)).truncate(order) for j in jets]
    shape = np.broadcast_shapes(*[j.shape for j in items])
    cs = [np.broadcast_to(j.coeffs, (j.coeffs.shape[0],) + shape) for j in items]
    ax = axis if axis < 0 else axis + 1
    return Jet(np.stack(cs, axis=ax), ref.nvars, order)


def zeros(shape, nvars: int, order: int) -> Jet:
    return Jet(np.zeros((n_monomials(nvars, order),) + tuple(shape)), nvars, order)


# --------------------------------------------------------------------------
# elementary functions
# --------------------------------------------------------------------------


def compose(a: Jet, derivs: Sequence[np.ndarray]) -> Jet:
    """f(a) from the derivatives f, f', f'', ... of a univariate f at a's value."""
    c0 = a.coeffs[0]
    delta = a.like(np.concatenate([np.zeros_like(c0)[None], a.coeffs[1:]]))
    out = np.zeros_like(a.coeffs)
    out[0] = derivs[0]
    power_k = None
    for k in range(1, a.order + 1):
        power_k = delta if power_k is None else power_k * delta
        out = out + power_k.coeffs * (np.asarray(derivs[k]) / math.factorial(k))
    return a.like(out)


def _val(a: Jet) -> np.ndarray:
    return a.coeffs[0]


def reciprocal(a: Jet) -> Jet:
    x = _val(a)
    if np.any(np.abs(x) < DIVISION_EPS):
        raise DomainError("division by a quantity vanishing within 1e-12")
    return compose(a, [(-1.0) ** k * math.factorial(k) * x ** (-(k + 1)) for k in range(a.order + 1)])


def int_power(a: Jet, p: int) -> Jet:
    if p == 0:
        return a.like(np.concatenate([np.ones_like(a.coeffs[:1]), np.zeros_like(a.coeffs[1:])]))
    result = a
    for _ in range(p - 1):
        result = result * a
    return result


def power(a: Jet, p: float) -> Jet:
    x = _val(a)
    if np.any(x <= 0):
        raise DomainError("non-integer power of a non-positive quantity")
    derivs = []
    coef = 1.0
    for k in range(a.order + 1):
        derivs.append(coef * x ** (p - k))
        coef *= p - k
    return compose(a, derivs)


def sqrt(a: Jet) -> Jet:
    return power(a, 0.5)


def exp(a: Jet) -> Jet:
    e = np.exp(_val(a))
    return compose(a, [e] * (a.order + 1))


def log(a: Jet) -> Jet:
    x = _val(a)
    if np.any(x <= 0):
        raise DomainError("log of a non-positive quantity")
    derivs = [np.log(x)] + [(-1.0) ** (k - 1) * math.factorial(k - 1) * x ** (-k) for k in range(1, a.order + 1)]
    return compose(a, derivs)


def sin(a: Jet) -> Jet:
    x = _val(a)
    cyc = [np.sin(x), np.cos(x), -np.sin(x), -np.cos(x)]
    return compose(a, [cyc[k % 4] for k in range(a.order + 1)])


def cos(a: Jet) -> Jet:
    x = _val(a)
    cyc = [np.cos(x), -np.sin(x), -np.cos(x), np.sin(x)]
    return compose(a, [cyc[k % 4] for k in range(a.order + 1)])


# --------------------------------------------------------------------------
# matrix functions
# --------------------------------------------------------------------------


def _nilpotent_part(a: Jet) -> Jet:
    c = a.coeffs.copy()
    c[0] = 0.0
    return a.like(c)


def inv(g: Jet) -> Jet:
    """Matrix inverse over the last two axes: G^{-1} = sum_k (-X0 dG)^k X0."""
    g0 = g.coeffs[0]
    x0 = np.linalg.inv(g0)
    n_part = einsum("...ij,...jk->...ik", -x0, _nilpotent_part(g))
    term = Jet.constant(x0, g.nvars, g.order)
    total = term
    for _ in range(g.order):
        term = einsum("...ij,...jk->...ik", n_part, term)
        total = total + term
    return total


def logabsdet(g: Jet) -> Jet:
    """log|det G| = log|det G0| + sum_k (-1)^{k+1} tr((X0 dG)^k) / k."""
    g0 = g.coeffs[0]
    x0 = np.linalg.inv(g0)
    _, ld = np.linalg.slogdet(g0)
    n_part = einsum("...ij,...jk->...ik", x0, _nilpotent_part(g))
    total = Jet.constant(ld, g.nvars, g.order)
    term = None
    for k in range(1, g.order + 1):
        term = n_part if term is None else einsum("...ij,...jk->...ik", term, n_part)
        tr = term.like(np.trace(term.coeffs, axis1=-2, axis2=-1))
        total = total + tr * ((-1.0) ** (k + 1) / k)
    return total


def det(g: Jet) -> Jet:
    sign, _ = np.linalg.slogdet(g.coeffs[0])
    return exp(logabsdet(g)) * sign


def substitute(taylor: Jet, x: Jet) -> Jet:
    """Evaluate a Taylor expansion (about x's value) at the jet x."""
    if x.identity and x.nvars == taylor.nvars:
        return taylor.truncate(x.order)
    m = taylor.nvars
    order = min(taylor.order, x.order)
    x = x.truncate(order)
    delta = _nilpotent_part(x)
    mons = monomials(m, order)
    powers = [Jet.constant(1.0, x.nvars, order)]
    idx = monomial_index(m, order)
    for alpha in mons[1:]:
        i = next(k for k, e in enumerate(alpha) if e > 0)
        prev = list(alpha)
        prev[i] -= 1
        powers.append(powers[idx[tuple(prev)]] * delta[i])
    basis = np.stack([p.coeffs for p in powers], axis=0)  # (Ma, Mx)
    tc = taylor.truncate(order).coeffs  # (Ma,) + S
    out = np.tensordot(basis.T, tc, axes=1)
    return Jet(out, x.nvars, order)


# --------------------------------------------------------------------------
# charts and fields
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Chart:
    """Ordered coordinate names with an open domain box."""

    names: tuple[str, ...]
    domain: tuple[tuple[float, float], ...] = dc_field(default=())

    def __post_init__(self):
        names = tuple(self.names)
        object.__setattr__(self, "names", names)
        if len(set(names)) != len(names):
            raise ValueError("coordinate names must be unique")
        if not self.domain:
            object.__setattr__(self, "domain", tuple((-np.inf, np.inf) for _ in names))
        else:
            object.__setattr__(self, "domain", tuple(tuple(map(float, b)) for b in self.domain))
        if len(self.domain) != len(names):
            raise ValueError("domain box must have one interval per coordinate")
        if any(lo >= hi for lo, hi in self.domain):
            raise ValueError("domain box is empty")

    @property
    def dim(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        return self.names.index(name)

    def contains(self, point) -> bool:
        p = np.asarray(point, dtype=float)
        return all(lo < x < hi for x, (lo, hi) in zip(p, self.domain))

    def check(self, point) -> None:
        if len(point) != self.dim:
            raise DomainError(f"point has {len(point)} coordinates, chart has {self.dim}")
        if not self.contains(point):
            raise DomainError(f"point {tuple(point)} outside the domain of chart {self.names}")


class Field:
    """A smooth tensor valued function on a chart, evaluated through jets."""

    def __init__(self, chart: Chart, fn: Callable[[Jet], Jet], shape: tuple = (), max_order: int = MAX_ORDER):
        self.chart = chart
        self.fn = fn
        self.shape = tuple(shape)
        self.max_order = max_order

    def __call__(self, x: Jet) -> Jet:
        if x.order > self.max_order:
            raise OrderError(f"order {x.order} requested, field supports {self.max_order}")
        out = self.fn(x)
        if not isinstance(out, Jet):
            out = Jet.constant(np.broadcast_to(np.asarray(out, dtype=float), self.shape), x.nvars, x.order)
        return out

    def evaluate(self, point, order: int = 0) -> Jet:
        self.chart.check(point)
        if order < 0 or order > self.max_order:
            raise OrderError(f"order {order} requested, field supports 0..{self.max_order}")
        return self(Jet.variables(point, order))

    def value(self, point) -> np.ndarray:
        return np.asarray(self.evaluate(point, 0).coeffs[0])

    # -- algebra -----------------------------------------------------------
    def _binary(self, other, op, shape=None) -> "Field":
        if isinstance(other, Field):
            if other.chart != self.chart:
                raise ChartMismatchError("fields live on different charts")
            mo = min(self.max_order, other.max_order)
            return Field(self.chart, lambda x: op(self(x), other(x)), shape or self.shape, mo)
        return Field(self.chart, lambda x: op(self(x), other), shape or self.shape, self.max_order)

    def __add__(self, other):
        return self._binary(other, lambda a, b: a + b)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, lambda a, b: a - b)

    def __rsub__(self, other):
        return self._binary(other, lambda a, b: b - a)

    def __mul__(self, other):
        return self._binary(other, lambda a, b: a * b)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._binary(other, lambda a, b: a / b)

    def __rtruediv__(self, other):
        return self._binary(other, lambda a, b: b / a)

    def __neg__(self):
        return self.map(lambda a: -a)

    def __pow__(self, p):
        return self.map(lambda a: a**p)

    def map(self, fn: Callable[[Jet], Jet], shape=None) -> "Field":
        return Field(self.chart, lambda x: fn(self(x)), self.shape if shape is None else shape, self.max_order)

    def __getitem__(self, idx) -> "Field":
        probe = np.empty(self.shape)[idx]
        return Field(self.chart, lambda x: self(x)[idx], probe.shape, self.max_order)

    def partial(self, var: int | str) -> "Field":
        """Field of the coordinate derivative d/dx_var (one order less support)."""
        if isinstance(var, str):
            var = self.chart.index(var)
        base = self

        def fn(x: Jet) -> Jet:
            jet = base(_variables_above(x))
            return substitute(jet.partial(var), x)

        return Field(self.chart, fn, self.shape, self.max_order - 1)

    def gradient_field(self) -> "Field":
        """Field with a trailing axis holding all coordinate derivatives."""
        base = self

        def fn(x: Jet) -> Jet:
            jet = base(_variables_above(x))
            return substitute(jet.grad_jet(), x)

        return Field(self.chart, fn, self.shape + (self.chart.dim,), self.max_order - 1)

    def pullback(self, chart: Chart, embed: Callable[[Jet], Jet]) -> "Field":
        """Compose with a map from ``chart`` into this field's chart."""
        return Field(chart, lambda x: self(embed(x)), self.shape, self.max_order)

    def cached(self, maxsize: int = 256) -> "Field":
        """Memoize evaluations at seeded coordinate jets (pure functions only)."""
        base = self.fn

        @lru_cache(maxsize=maxsize)
        def at(key: bytes, order: int) -> Jet:
            return base(Jet.variables(np.frombuffer(key), order))

        def fn(x: Jet) -> Jet:
            if x.identity:
                return at(np.ascontiguousarray(x.coeffs[0], dtype=float).tobytes(), x.order)
            return base(x)

        return Field(self.chart, fn, self.shape, self.max_order)


def _variables_above(x: Jet) -> Jet:
    """Coordinate jet one order above x, seeded at x's value."""
    return Jet.variables(np.asarray(x.coeffs[0]), x.order + 1)


ScalarField = Field


def coordinate(chart: Chart, name: str | int) -> Field:
    i = chart.index(name) if isinstance(name, str) else name
    return Field(chart, lambda x: x[i])


def constant(chart: Chart, value, shape: tuple = ()) -> Field:
    arr = np.broadcast_to(np.asarray(value, dtype=float), shape)
    return Field(chart, lambda x: Jet.constant(arr, x.nvars, x.order), shape)


def from_function(chart: Chart, fn: Callable[..., Jet]) -> Field:
    """Field from a function of the coordinate jets, e.g. ``lambda t, lam: t**3 * sin(lam)``."""
    return Field(chart, lambda x: fn(*[x[i] for i in range(chart.dim)]))


def stack_fields(fields: Sequence[Field], shape: tuple | None = None) -> Field:
    """Tensor field whose flat components are the given scalar fields."""
    chart = fields[0].chart
    shape = (len(fields),) if shape is None else tuple(shape)
    mo = min(f.max_order for f in fields)

    def fn(x: Jet) -> Jet:
        return stack([f(x) for f in fields]).reshape(shape)

    return Field(chart, fn, shape, mo)


def compose1d(f: Field, derivs: Callable[[np.ndarray, int], Sequence[np.ndarray]]) -> Field:
    """Compose a scalar field with a 1-d function given by ``derivs(value, order)``."""
    return f.map(lambda a: compose(a, derivs(a.coeffs[0], a.order)))


def central_difference(f: Field, point, step: float = 1e-5) -> tuple[np.ndarray, np.ndarray]:
    """Finite-difference gradient and hessian (test oracle, independent of jets)."""
    p = np.asarray(point, dtype=float)
    n = p.shape[0]

    def val(q):
        return np.asarray(f.fn(Jet.variables(q, 0)).coeffs[0], dtype=float)

    f0 = val(p)
    grad = np.zeros(f0.shape + (n,))
    hess = np.zeros(f0.shape + (n, n))
    e = np.eye(n) * step
    for i in range(n):
        grad[..., i] = (val(p + e[i]) - val(p - e[i])) / (2 * step)
    hstep = step * 100
    E = np.eye(n) * hstep
    for i in range(n):
        for j in range(n):
            hess[..., i, j] = (
                val(p + E[i] + E[j]) - val(p + E[i] - E[j]) - val(p - E[i] + E[j]) + val(p - E[i] - E[j])
            ) / (4 * hstep * hstep)
    return grad, hess
