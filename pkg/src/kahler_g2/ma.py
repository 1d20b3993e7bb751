"""Complex Monge-Ampere operator on a flat hyperkahler base and separable solutions.

Conventions: with J1 dlam = dmu on flat C^2, dd^c f = (f_ll + f_mm) dlam^dmu + ...,
so for f depending on (lam, mu) only M(f) = 1 - (1/2)(f_ll + f_mm). Written with the
non-negative geometer's Laplacian Delta = -sum d_i^2 this is M(f) = 1 + Delta(f)/2.
"""
from __future__ import annotations

import ast
import math
import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
import sympy

from . import exterior as E
from . import jets as J
from .jets import Chart, DomainError, Field, Jet

AI0 = 0.35502805388781723926
AIP0 = -0.25881940379280679840

_SERIES_STEP = 0.5
_SERIES_TOL = 1e-18
_SERIES_MAX = 200


# --------------------------------------------------------------------------
# Airy-type ODE  K'' = c t K
# --------------------------------------------------------------------------


def _taylor_coeffs(c: float, t0: float, k0: float, k1: float, n: int) -> np.ndarray:
    """Taylor coefficients of the solution about t0: a_{j+2} = c (t0 a_j + a_{j-1}) / ((j+2)(j+1))."""
    a = np.zeros(n)
    a[0], a[1] = k0, k1
    for j in range(n - 2):
        prev = a[j - 1] if j >= 1 else 0.0
        a[j + 2] = c * (t0 * a[j] + prev) / ((j + 2) * (j + 1))
    return a


def _eval_series(a: np.ndarray, s: float, nderiv: int) -> list[float]:
    """Value and derivatives of sum a_j s^j up to ``nderiv``."""
    out = []
    coeffs = a.copy()
    for _ in range(nderiv + 1):
        out.append(float(np.polynomial.polynomial.polyval(s, coeffs)))
        coeffs = np.polynomial.polynomial.polyder(coeffs)
    return out


@dataclass(frozen=True)
class AirySolution:
    """Solution of K'' = c t K with K(0) = K0, K'(0) = K1, evaluated by re-expanded power series."""

    c: float = 1.0
    K0: float = AI0
    K1: float = AIP0
    scale: float = 1.0

    def derivatives(self, t: float, n: int = 2) -> list[float]:
        """[K, K', ..., K^(n)] at t."""
        return [self.scale * v for v in _airy_derivs(self.c, self.K0, self.K1, float(t), n)]

    def __call__(self, t: float) -> tuple[float, float, float]:
        k, k1, k2 = self.derivatives(t, 2)
        return k, k1, k2

    def residual(self, t: float) -> float:
        k, _, k2 = self(t)
        return k2 - self.c * t * k

    @classmethod
    def decaying(cls, c: float) -> "AirySolution":
        """Ai_c(t) = Ai(c^{1/3} t), the solution that decays as t -> +inf when c > 0."""
        return cls(c, AI0, AIP0 * float(np.cbrt(c)))

    def scaled(self, s: float) -> "AirySolution":
        return AirySolution(self.c, self.K0, self.K1, self.scale * s)

    def field(self, chart: Chart, var: str = "t") -> Field:
        """K(var) as a scalar field on ``chart``."""
        tf = J.coordinate(chart, var)
        return J.compose1d(tf, lambda x, order: [np.asarray(v) for v in self.derivatives(float(x), order)])

    def derivative_field(self, chart: Chart, var: str = "t", k: int = 1) -> Field:
        """K^(k)(var) as a field (derivatives of any order come from the series)."""
        tf = J.coordinate(chart, var)
        return J.compose1d(tf, lambda x, order: [np.asarray(v) for v in self.derivatives(float(x), order + k)[k:]])


@lru_cache(maxsize=4096)
def _airy_derivs(c: float, k0: float, k1: float, t: float, n: int) -> tuple[float, ...]:
    t0, y0, y1 = 0.0, k0, k1
    steps = max(1, int(math.ceil(abs(t) / _SERIES_STEP)))
    h = t / steps
    nterms = 60
    for _ in range(steps):
        a = _taylor_coeffs(c, t0, y0, y1, nterms)
        y0, y1 = _eval_series(a, h, 1)
        t0 += h
    a = _taylor_coeffs(c, t0, y0, y1, max(nterms, n + 3))
    fact = np.array([math.factorial(j) for j in range(n + 1)], dtype=float)
    return tuple(float(a[j] * fact[j]) for j in range(n + 1))


def airy_eval(c: float, init: tuple[float, float], t: float) -> tuple[float, float, float]:
    """(K, K', K'') at t for K'' = c t K with (K(0), K'(0)) = init."""
    return AirySolution(c, init[0], init[1])(t)


# --------------------------------------------------------------------------
# Monge-Ampere operator
# --------------------------------------------------------------------------


def _hk(hk=None):
    from . import zoo

    return zoo.flat_hk_c2() if hk is None else hk


def ddc_M(f: Field, hk=None) -> E.DifferentialForm:
    """d_M d^c_M f for a field on a chart containing the base coordinates."""
    hk = _hk(hk)
    coords = hk.chart.names
    jm = hk.lifted_complex_structure(f.chart)
    dcf = jm.act_on_1form(E.exterior_d(E.function_form(f), coords))
    return E.exterior_d(dcf, coords)


def ma_operator(f: Field, hk=None) -> Field:
    """M(f) with (omega1 - (1/2) dd^c f)^2 = M(f) omega1^2."""
    hk = _hk(hk)
    w1 = hk.lifted(f.chart)["omega1"]
    wt = w1 - ddc_M(f, hk) * 0.5
    key = tuple(hk.chart.names)
    num = (wt ^ wt).component(key)
    den = (w1 ^ w1).component(key)
    return num / den


def laplacian(f: Field, hk=None) -> Field:
    """Non-negative Laplacian -sum d_i^2 f over the (flat) base coordinates."""
    hk = _hk(hk)
    terms = [f.partial(n).partial(n) for n in hk.chart.names]
    out = terms[0]
    for t in terms[1:]:
        out = out + t
    return -out


def foliation_shortcut(f: Field, hk=None) -> Field:
    """1 + Delta(f)/2, equal to M(f) when dd^c f ^ dd^c f = 0."""
    return 1.0 + laplacian(f, hk) * 0.5


# --------------------------------------------------------------------------
# H expressions
# --------------------------------------------------------------------------

_FUNCS: dict[str, Callable[[Jet], Jet]] = {"sin": J.sin, "cos": J.cos, "exp": J.exp, "sqrt": J.sqrt, "log": J.log}


def parse_expression(text: str, chart: Chart) -> Field:
    """Field from an arithmetic expression in the chart's coordinates.

    ``lambda`` is accepted as an alias of ``lam``. Allowed: numbers, + - * / **,
    and sin, cos, exp, sqrt, log.
    """
    src = re.sub(r"\blambda\b", "lam", text.strip())
    try:
        tree = ast.parse(src, mode="eval")
    except SyntaxError as exc:
        raise ValueError(f"cannot parse expression {text!r}") from exc

    def build(node) -> Callable[[Jet], Jet | float]:
        if isinstance(node, ast.Expression):
            return build(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            v = float(node.value)
            return lambda x: v
        if isinstance(node, ast.Name):
            if node.id == "pi":
                return lambda x: math.pi
            if node.id not in chart.names:
                raise ValueError(f"unknown symbol {node.id!r} in {text!r}")
            i = chart.index(node.id)
            return lambda x: x[i]
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            inner = build(node.operand)
            sgn = -1.0 if isinstance(node.op, ast.USub) else 1.0
            return lambda x: inner(x) * sgn
        if isinstance(node, ast.BinOp):
            lhs, rhs = build(node.left), build(node.right)
            ops = {ast.Add: lambda a, b: a + b, ast.Sub: lambda a, b: a - b, ast.Mult: lambda a, b: a * b,
                   ast.Div: lambda a, b: a / b, ast.Pow: lambda a, b: a**b}
            op = ops.get(type(node.op))
            if op is None:
                raise ValueError(f"operator not allowed in {text!r}")
            return lambda x: op(lhs(x), rhs(x))
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id in _FUNCS:
            if len(node.args) != 1:
                raise ValueError(f"{node.func.id} takes one argument")
            arg, fn = build(node.args[0]), _FUNCS[node.func.id]
            return lambda x: _apply(fn, arg(x), x)
        raise ValueError(f"unsupported syntax in {text!r}")

    ev = build(tree)
    return Field(chart, lambda x: _as_jet(ev(x), x))


def _as_jet(v, x: Jet) -> Jet:
    return v if isinstance(v, Jet) else Jet.constant(float(v), x.nvars, x.order)


def _apply(fn, v, x: Jet) -> Jet:
    return fn(_as_jet(v, x))


# --------------------------------------------------------------------------
# evolution problem
# --------------------------------------------------------------------------


@dataclass
class MAProblem:
    """Potential G(t, base) with omega~ = omega1 - (1/2) d_M d^c_M G and u = G''/2."""

    G: Field
    hk: object
    window: tuple[float, float]
    xi_P: E.DifferentialForm | None = None
    meta: dict = field(default_factory=dict)

    @property
    def chart(self) -> Chart:
        return self.G.chart

    def omega_tilde(self) -> E.DifferentialForm:
        return self.hk.lifted(self.chart)["omega1"] - ddc_M(self.G, self.hk) * 0.5

    def u(self) -> Field:
        return self.G.partial("t").partial("t") * 0.5

    def residual(self) -> Field:
        return pde_residual(self)

    def sample_points(self, n: int, rng: np.random.Generator, margin: float = 1e-3) -> np.ndarray:
        return sample_box(self.chart, n, rng, margin, {"t": self.window})

    def positivity(self, points) -> float:
        """Smallest value of u/t (equivalently the omega~ density) over ``points``."""
        uf = self.u()
        return min(float(uf.value(p)) / float(p[self.chart.index("t")]) for p in points)

    def to_bundle(self, name: str = "ma"):
        from . import zoo

        return zoo.assemble_g2(self.omega_tilde(), self.u(), self.hk, xi_P=self.xi_P, name=name,
                               window=self.window, params=self.meta)


def pde_residual(prob: MAProblem) -> Field:
    """2 t M(G) - G''."""
    t = J.coordinate(prob.chart, "t")
    return t * ma_operator(prob.G, prob.hk) * 2.0 - prob.G.partial("t").partial("t")


def sample_box(chart: Chart, n: int, rng: np.random.Generator, margin: float = 1e-3,
               overrides: dict[str, tuple[float, float]] | None = None) -> np.ndarray:
    lo = np.array([d[0] for d in chart.domain], dtype=float)
    hi = np.array([d[1] for d in chart.domain], dtype=float)
    for name, (a, b) in (overrides or {}).items():
        i = chart.index(name)
        lo[i], hi[i] = max(lo[i], a), min(hi[i], b)
    return rng.uniform(lo + margin, hi - margin, size=(n, chart.dim))


def helmholtz_residual(H: Field, c: float, points, names: Sequence[str] = ("lam", "mu")) -> float:
    """max |H_ll + H_mm + c H| over points."""
    lap = H.partial(names[0]).partial(names[0]) + H.partial(names[1]).partial(names[1])
    res = lap + H * c
    return max(abs(float(res.value(p))) for p in points)


def separable_solution(c: float, H: Field | str, K: AirySolution | None = None, window=(0.5, 2.0),
                       hk=None, check_points: int = 8, seed: int = 0) -> MAProblem:
    """G = t^3/3 + H K with H_ll + H_mm + c H = 0 and K'' = c t K.

    ``K`` defaults to 2 Ai(c^{1/3} t); for c = 1 this turns H = sin(lam) into
    f = 1 + Ai(t) sin(lam).
    """
    from . import zoo

    hk = _hk(hk)
    chart = zoo.g2_chart(window)
    Hf = parse_expression(H, chart) if isinstance(H, str) else H
    K = AirySolution.decaying(c).scaled(2.0) if K is None else K
    if K.c != c:
        raise ValueError("the Airy constant of K must match c")
    rng = np.random.default_rng(seed)
    pts = sample_box(chart, check_points, rng, 1e-3, {"t": window})
    res = helmholtz_residual(Hf, c, pts)
    if res > 1e-12:
        raise ValueError(f"H violates the Helmholtz equation with c={c} (residual {res:.3e})")
    t = J.coordinate(chart, "t")
    Kf = K.field(chart)
    G = t**3 * (1.0 / 3.0) + Hf * Kf
    Gp = t * t + Hf * K.derivative_field(chart, "t", 1)
    jm = hk.lifted_complex_structure(chart)
    xi_P = jm.act_on_1form(E.exterior_d(E.function_form(Gp), hk.chart.names)) * (-0.5)
    prob = MAProblem(G, hk, tuple(window), xi_P, {"c": c, "H": H if isinstance(H, str) else "custom",
                                                  "K0": K.K0 * K.scale, "K1": K.K1 * K.scale})
    if prob.positivity(pts) <= 0:
        raise DomainError("omega~ is not positive on the requested window")
    return prob


# --------------------------------------------------------------------------
# explicit route for separable solutions
# --------------------------------------------------------------------------


def _symbolic(text: str, names: Sequence[str]) -> sympy.Expr:
    src = re.sub(r"\blambda\b", "lam", text.strip())
    local = {n: sympy.Symbol(n) for n in names}
    local["pi"] = sympy.pi
    try:
        expr = sympy.sympify(src, locals=local)
    except (sympy.SympifyError, SyntaxError, TypeError) as exc:
        raise ValueError(f"cannot parse expression {text!r}") from exc
    extra = {s.name for s in expr.free_symbols} - set(names)
    if extra:
        raise ValueError(f"expression {text!r} may only involve {', '.join(names)}; found {', '.join(sorted(extra))}")
    return expr


_SYM_FUNCS = {sympy.sin: J.sin, sympy.cos: J.cos, sympy.exp: J.exp, sympy.log: J.log}


def sympy_field(expr: sympy.Expr, chart: Chart) -> Field:
    """Field evaluating a sympy expression in the chart coordinates through jets."""

    def build(e) -> Callable[[Jet], Jet | float]:
        if e.is_Number or e in (sympy.pi, sympy.E):
            v = float(e)
            return lambda x: v
        if e.is_Symbol:
            i = chart.index(e.name)
            return lambda x: x[i]
        if e.is_Add or e.is_Mul:
            parts = [build(a) for a in e.args]
            if e.is_Add:
                return lambda x: sum((_as_jet(p(x), x) for p in parts[1:]), _as_jet(parts[0](x), x))

            def prod(x):
                out = _as_jet(parts[0](x), x)
                for p in parts[1:]:
                    out = out * p(x)
                return out

            return prod
        if e.is_Pow:
            base, ex = build(e.args[0]), e.args[1]
            if ex.is_Integer:
                n = int(ex)
                if n >= 0:
                    return lambda x: J.int_power(_as_jet(base(x), x), n)
                return lambda x: J.int_power(J.reciprocal(_as_jet(base(x), x)), -n)
            if ex == sympy.Rational(1, 2):
                return lambda x: J.sqrt(_as_jet(base(x), x))
            if ex.is_Number:
                p = float(ex)
                return lambda x: J.power(_as_jet(base(x), x), p)
            raise ValueError(f"symbolic exponent not supported: {e}")
        fn = _SYM_FUNCS.get(e.func)
        if fn is not None and len(e.args) == 1:
            arg = build(e.args[0])
            return lambda x: fn(_as_jet(arg(x), x))
        raise ValueError(f"unsupported expression {e}")

    ev = build(sympy.sympify(expr))
    return Field(chart, lambda x: _as_jet(ev(x), x))


def separable_explicit(c: float, H: str, K: AirySolution | None = None, window=(0.5, 2.0), hk=None,
                       name: str | None = None, check: bool = True):
    """The G2 bundle of G = t^3/3 + H K built from exact derivatives of H.

    omega~ = omega1 - (K/2) dd^c_M H,  u = t + (c t / 2) H K,  xi_P = -(K'/2) d^c_M H,
    with every coefficient an explicit field, so curvature is available.
    """
    from . import zoo

    hk = _hk(hk)
    chart = zoo.g2_chart(window)
    names = hk.chart.names
    expr = _symbolic(H, names)
    K = AirySolution.decaying(c).scaled(2.0) if K is None else K
    if K.c != c:
        raise ValueError("the Airy constant of K must match c")
    jm = hk.lifted_complex_structure(chart)
    cof = {n: E.coframe(chart)[chart.index(n)] for n in names}
    jcof = {n: jm.act_on_1form(cof[n]) for n in names}
    ddc = E.DifferentialForm.zero(chart, 2)
    dcH = E.DifferentialForm.zero(chart, 1)
    for b in names:
        hb = sympy.diff(expr, b)
        if hb != 0:
            dcH = dcH + jcof[b] * sympy_field(hb, chart)
        for a in names:
            hab = sympy.diff(expr, a, b)
            if hab != 0:
                ddc = ddc + (cof[a] ^ jcof[b]) * sympy_field(hab, chart)
    Hf = sympy_field(expr, chart)
    Kf = K.field(chart)
    t = J.coordinate(chart, "t")
    omega = hk.lifted(chart)["omega1"] - ddc * (Kf * 0.5)
    xi_P = dcH * (K.derivative_field(chart, "t", 1) * -0.5)
    u = t + Hf * K.derivative_field(chart, "t", 2) * 0.5
    tag = name or f"separable:c={c:g},H={H}"
    return zoo.assemble_g2(omega, u, hk, xi_P=xi_P, name=tag, window=window,
                           params={"c": c, "H": H, "K0": K.K0 * K.scale, "K1": K.K1 * K.scale}, check=check)
