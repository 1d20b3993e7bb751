"""Random fields and forms for property tests."""
from __future__ import annotations

import numpy as np

from kahler_g2 import exterior as E
from kahler_g2 import jets as J


def random_chart(n: int) -> J.Chart:
    return J.Chart(tuple(f"x{i}" for i in range(n)), ((-1.0, 1.0),) * n)


def random_field(chart: J.Chart, rng: np.random.Generator, depth: int = 3) -> J.Field:
    """Random smooth scalar field built from coordinates with + * sin cos exp and 1/(2 + f^2)."""
    if depth == 0 or rng.random() < 0.2:
        if rng.random() < 0.3:
            return J.constant(chart, float(rng.normal()))
        return J.coordinate(chart, int(rng.integers(chart.dim))) * float(rng.uniform(0.5, 1.5))
    kind = rng.integers(6)
    a = random_field(chart, rng, depth - 1)
    if kind == 0:
        return a + random_field(chart, rng, depth - 1)
    if kind == 1:
        return a * random_field(chart, rng, depth - 1)
    if kind == 2:
        return a.map(J.sin)
    if kind == 3:
        return a.map(J.cos)
    if kind == 4:
        return (a * 0.5).map(J.exp)
    return 1.0 / (a * a + 2.0)


def random_form(chart: J.Chart, degree: int, rng: np.random.Generator, terms: int = 3, depth: int = 2):
    cof = E.coframe(chart)
    out = E.DifferentialForm.zero(chart, degree)
    for _ in range(terms):
        idx = rng.choice(chart.dim, size=degree, replace=False)
        mono = None
        for i in idx:
            mono = cof[i] if mono is None else mono ^ cof[i]
        if mono is None:
            out = out + E.function_form(random_field(chart, rng, depth))
        else:
            out = out + mono * random_field(chart, rng, depth)
    return out


def random_metric(chart: J.Chart, rng: np.random.Generator, curved: bool = True) -> J.Field:
    """Positive definite symmetric matrix field: A A^T + n I plus small smooth bumps."""
    n = chart.dim
    a = rng.normal(size=(n, n))
    g0 = a @ a.T + n * np.eye(n)
    comps = []
    for i in range(n):
        for j in range(n):
            f = J.constant(chart, g0[i, j])
            if curved:
                lo, hi = min(i, j), max(i, j)
                bump = J.coordinate(chart, lo % n) * J.coordinate(chart, hi % n) * (0.1 * np.cos(i + j))
                f = f + bump
            comps.append(f)
    return J.stack_fields(comps, (n, n))


def random_point(chart: J.Chart, rng: np.random.Generator, margin: float = 0.1) -> np.ndarray:
    lo = np.array([d[0] for d in chart.domain])
    hi = np.array([d[1] for d in chart.domain])
    return rng.uniform(lo + margin, hi - margin)
