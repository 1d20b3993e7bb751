"""Six-dimensional nilpotent Lie algebras, invariant forms and stable 3-forms.

Invariant forms have constant coefficients in the coframe e1..e6 (1-based in
the public helpers, 0-based internally). The Chevalley-Eilenberg differential
is fixed on generators by the structure equations, e.g. de5 = e13 + e42, and
extended as a graded derivation. For integer structure constants all CE
computations are exact in floating point.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Mapping, Sequence

import numpy as np
import scipy.linalg

from .exterior import _wedge_table, combo_index, combos, sort_sign, to_dense

N = 6


@dataclass(frozen=True)
class InvariantForm:
    degree: int
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float)
        if c.shape != (math.comb(N, self.degree),):
            raise ValueError("coefficient vector has the wrong length")
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def zero(cls, degree: int) -> "InvariantForm":
        return cls(degree, np.zeros(math.comb(N, degree)))

    @classmethod
    def from_terms(cls, degree: int, terms: Mapping[Sequence[int], float]) -> "InvariantForm":
        """Terms keyed by 1-based index tuples, in any order (sign applied)."""
        idx = combo_index(N, degree)
        c = np.zeros(len(idx))
        for key, val in terms.items():
            s, k = sort_sign(tuple(i - 1 for i in key))
            if s:
                c[idx[k]] += s * val
        return cls(degree, c)

    def terms(self, tol: float = 0.0) -> dict[tuple[int, ...], float]:
        return {tuple(i + 1 for i in c): float(v) for c, v in zip(combos(N, self.degree), self.coeffs) if abs(v) > tol}

    def __add__(self, other: "InvariantForm") -> "InvariantForm":
        if other.degree != self.degree:
            raise ValueError("cannot add forms of different degree")
        return InvariantForm(self.degree, self.coeffs + other.coeffs)

    def __sub__(self, other: "InvariantForm") -> "InvariantForm":
        return self + (-1.0) * other

    def __neg__(self) -> "InvariantForm":
        return InvariantForm(self.degree, -self.coeffs)

    def __mul__(self, s: float) -> "InvariantForm":
        return InvariantForm(self.degree, self.coeffs * float(s))

    __rmul__ = __mul__

    def __xor__(self, other: "InvariantForm") -> "InvariantForm":
        return wedge(self, other)

    def is_zero(self, tol: float = 0.0) -> bool:
        return bool(np.all(np.abs(self.coeffs) <= tol))

    def __repr__(self) -> str:
        body = " + ".join(f"{v:g} e{''.join(map(str, k))}" for k, v in self.terms().items()) or "0"
        return f"InvariantForm({body})"


def e(*idx: int) -> InvariantForm:
    """Basis monomial e^{i1...ik} (1-based)."""
    return InvariantForm.from_terms(len(idx), {idx: 1.0})


def wedge(a: InvariantForm, b: InvariantForm) -> InvariantForm:
    k = a.degree + b.degree
    if k > N:
        raise ValueError("degree exceeds 6")
    ia, ib, sg, starts = _wedge_table(N, a.degree, b.degree)
    prod = a.coeffs[ia] * b.coeffs[ib] * sg
    return InvariantForm(k, np.add.reduceat(prod, starts) if len(prod) else np.zeros(math.comb(N, k)))


# --------------------------------------------------------------------------
# Lie algebras
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class NilLieAlgebra:
    """de^i = sum_{j<k} c[i, (j,k)] e^{jk}; c has shape (6, 15)."""

    name: str
    c: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float)
        if c.shape != (N, math.comb(N, 2)):
            raise ValueError("structure constants must have shape (6, 15)")
        object.__setattr__(self, "c", c)

    @classmethod
    def from_differentials(cls, name: str, d: Mapping[int, InvariantForm]) -> "NilLieAlgebra":
        c = np.zeros((N, math.comb(N, 2)))
        for i, form in d.items():
            if form.degree != 2:
                raise ValueError("differentials of generators are 2-forms")
            c[i - 1] = form.coeffs
        return cls(name, c)

    def d_generator(self, i: int) -> InvariantForm:
        """d e^i (1-based)."""
        return InvariantForm(2, self.c[i - 1])

    def bracket(self) -> np.ndarray:
        """Structure tensor B[i, j, k] with [e_j, e_k] = B[i, j, k] e_i, from de(X, Y) = -e([X, Y])."""
        dense = np.stack([to_dense(self.c[i], N, 2) for i in range(N)])
        return -dense

    def jacobi_residual(self) -> float:
        return max(float(np.abs(ce_d(self, self.d_generator(i)).coeffs).max()) for i in range(1, N + 1))

    def is_nilpotent(self) -> bool:
        """The lower central series g, [g, g], [g, [g, g]], ... reaches zero."""
        b = self.bracket()
        span = np.eye(N)
        for _ in range(N + 1):
            vecs = np.einsum("ijk,sk->jsi", b, span).reshape(-1, N)
            if not vecs.size or np.abs(vecs).max() < 1e-12:
                return True
            u, s, vt = np.linalg.svd(vecs)
            rank = int(np.sum(s > 1e-10 * s[0]))
            span = vt[:rank]
        return False

    def closed_1forms(self) -> np.ndarray:
        """Orthonormal basis (rows) of ker(d: g* -> Lambda^2 g*)."""
        return scipy.linalg.null_space(self.c.T).T


def builtin_algebra(name: str) -> NilLieAlgebra:
    table: dict[str, dict[int, InvariantForm]] = {
        "iwasawa": {5: e(1, 3) + e(4, 2), 6: e(1, 4) + e(2, 3)},
        "case2a": {5: e(2, 4), 6: e(1, 4) + e(2, 3)},
        "case2b": {5: e(2, 4), 6: e(1, 4)},
        "case3": {5: e(1, 4), 6: e(2, 3)},
        "abelian": {},
    }
    if name not in table:
        raise ValueError(f"unknown algebra {name!r}; known: {', '.join(ALGEBRAS)}")
    return NilLieAlgebra.from_differentials(name, table[name])


ALGEBRAS = ("iwasawa", "case2a", "case2b", "case3", "abelian")


@lru_cache(maxsize=None)
def _d_matrix_cached(key: bytes, k: int) -> np.ndarray:
    c = np.frombuffer(key).reshape(N, math.comb(N, 2))
    alg = NilLieAlgebra("tmp", c)
    out = np.zeros((math.comb(N, k + 1), math.comb(N, k)))
    for col, mono in enumerate(combos(N, k)):
        total = InvariantForm.zero(k + 1)
        for pos, i in enumerate(mono):
            left = _monomial(mono[:pos])
            right = _monomial(mono[pos + 1 :])
            term = wedge(wedge(left, alg.d_generator(i + 1)), right)
            total = total + term * ((-1) ** pos)
        out[:, col] = total.coeffs
    return out


def _monomial(idx0: Sequence[int]) -> InvariantForm:
    if not idx0:
        return InvariantForm(0, np.ones(1))
    return InvariantForm.from_terms(len(idx0), {tuple(i + 1 for i in idx0): 1.0})


def d_matrix(alg: NilLieAlgebra, k: int) -> np.ndarray:
    """Matrix of d: Lambda^k -> Lambda^{k+1} in the combination bases."""
    return _d_matrix_cached(np.ascontiguousarray(alg.c).tobytes(), k)


def ce_d(alg: NilLieAlgebra, a: InvariantForm) -> InvariantForm:
    if a.degree >= N:
        return InvariantForm.zero(N) if a.degree == N else a
    return InvariantForm(a.degree + 1, d_matrix(alg, a.degree) @ a.coeffs)


# --------------------------------------------------------------------------
# stable 3-forms
# --------------------------------------------------------------------------


def k_matrix(phi: InvariantForm, orientation: int = 1) -> np.ndarray:
    """K[a, b] with K(e_b) vol = i_{e_b} phi ^ phi, vol = orientation * e123456."""
    if phi.degree != 3:
        raise ValueError("stable forms here are 3-forms")
    dense = to_dense(phi.coeffs, N, 3)
    k = np.zeros((N, N))
    for b in range(N):
        iota = InvariantForm(2, dense[b][np.triu_indices(N, 1)])
        five = wedge(iota, phi).coeffs  # indexed by combos(6, 5): the a-th entry omits index 5 - a
        for pos, mono in enumerate(combos(N, 5)):
            missing = ({0, 1, 2, 3, 4, 5} - set(mono)).pop()
            # i_{e_a} e123456 = (-1)^a e^{...a-hat...}
            k[missing, b] = (-1) ** missing * five[pos]
    return k * orientation


def stable_invariant(phi: InvariantForm) -> float:
    """lambda(phi) = tr(K^2) / 6; negative exactly when the stabilizer is SL(3, C)."""
    k = k_matrix(phi)
    return float(np.trace(k @ k)) / 6.0


class NotStableError(ValueError):
    pass


def act_on_3form(jm: np.ndarray, phi: InvariantForm) -> InvariantForm:
    """(J . phi)(X, Y, Z) = -phi(JX, Y, Z), so that phi + i (J . phi) has type (3,0)."""
    dense = to_dense(phi.coeffs, N, 3)
    out = -np.einsum("da,dbc->abc", jm, dense)
    iu = [c for c in combos(N, 3)]
    return InvariantForm(3, np.array([out[c] for c in iu]))


def acs_from_stable(phi: InvariantForm, orientation: int = 1) -> tuple[np.ndarray, InvariantForm]:
    """J = K / sqrt(-lambda) (acting on vectors, J[i, j] = J^i_j) and phi-.

    With orientation +1 the volume form is -e123456, chosen so that the
    standard pair Re, Im of (e1 + i e2)(e3 + i e4)(e5 + i e6) is recovered.
    """
    lam = stable_invariant(phi)
    if lam >= 0:
        raise NotStableError(f"lambda = {lam:g} >= 0: no complex structure")
    jm = k_matrix(phi, -orientation) / math.sqrt(-lam)
    return jm, act_on_3form(jm, phi)


def type_30_residual(jm: np.ndarray, plus: InvariantForm, minus: InvariantForm) -> float:
    """max over slots of |Psi(.., J X, ..) - i Psi(.., X, ..)| for Psi = plus + i minus."""
    psi = to_dense(plus.coeffs, N, 3) + 1j * to_dense(minus.coeffs, N, 3)
    res = 0.0
    for slot in range(3):
        moved = np.moveaxis(psi, slot, 0)
        lhs = np.einsum("da,d...->a...", jm, moved)
        res = max(res, float(np.abs(lhs - 1j * moved).max()))
    return res


def act_on_1forms(jm: np.ndarray) -> np.ndarray:
    """Matrix of gamma -> J gamma on coefficient row vectors, (J gamma)_j = -gamma_i J^i_j."""
    return -jm


def nijenhuis_tensor(alg: NilLieAlgebra, jm: np.ndarray) -> np.ndarray:
    """N[i, a, b] = ([JX, JY] - J[JX, Y] - J[X, JY] - [X, Y])^i for X = e_a, Y = e_b."""
    b = alg.bracket()
    return (np.einsum("ijk,ja,kb->iab", b, jm, jm)
            - np.einsum("im,mjb,ja->iab", jm, b, jm)
            - np.einsum("im,mak,kb->iab", jm, b, jm)
            - b)


# --------------------------------------------------------------------------
# half-flat structures and the evolution of the example family
# --------------------------------------------------------------------------


@dataclass
class HalfFlatReport:
    d_phi_plus: float
    d_rho_squared: float

    @property
    def ok(self) -> bool:
        return self.d_phi_plus == 0.0 and self.d_rho_squared == 0.0


def half_flat_check(alg: NilLieAlgebra, rho: InvariantForm, phi_plus: InvariantForm, tol: float = 0.0):
    r1 = float(np.abs(ce_d(alg, phi_plus).coeffs).max())
    r2 = float(np.abs(ce_d(alg, rho ^ rho).coeffs).max())
    rep = HalfFlatReport(r1, r2)
    return (r1 <= tol and r2 <= tol), rep


@dataclass(frozen=True)
class QuarticFamily:
    """rho = s_rho z^{1/2} (e12 + e34) + z^{-1/2} e56,
    phi+ = phi+_0 + t d(e56),  phi- = phi-_0 + s_phi t (e5 de5 + e6 de6)."""

    H: float
    rho_sign: int
    phi_sign: int
    with_base: bool

    def parts(self):
        alg = builtin_algebra("iwasawa")
        a, b = alg.d_generator(5), alg.d_generator(6)
        p0 = -((e(5) ^ b) + (e(6) ^ a)) if self.with_base else InvariantForm.zero(3)
        m0 = (e(5) ^ a) - (e(6) ^ b) if self.with_base else InvariantForm.zero(3)
        return alg, a, b, p0, m0

    def forms(self, t: float, z: float) -> tuple[InvariantForm, InvariantForm, InvariantForm]:
        if z <= 0:
            raise ValueError("z must be positive")
        alg, a, b, p0, m0 = self.parts()
        rho = (e(1, 2) + e(3, 4)) * (self.rho_sign * math.sqrt(z)) + e(5, 6) * (1.0 / math.sqrt(z))
        phi_p = p0 + ce_d(alg, e(5, 6)) * t
        phi_m = m0 + ((e(5) ^ a) + (e(6) ^ b)) * (self.phi_sign * t)
        return rho, phi_p, phi_m


def quartic_family(H: float) -> QuarticFamily:
    """Sign choices that make the evolution hold: H = 2 plus, H = -2 minus, H = 0 minus without base."""
    if H == 2:
        return QuarticFamily(2.0, 1, 1, True)
    if H == -2:
        return QuarticFamily(-2.0, 1, -1, True)
    if H == 0:
        return QuarticFamily(0.0, -1, -1, False)
    raise ValueError("the example family is defined for H in {2, 0, -2}")


def evolve_check(family: QuarticFamily, taus: Sequence[float], state_at: Callable[[float], tuple[float, float]],
                 h: float = 1e-4) -> float:
    """Centered differences in tau of phi+ and rho^2/2 against d rho and -d phi-.

    ``state_at(tau) -> (t, z)`` is a trajectory of the flow.
    """
    alg = builtin_algebra("iwasawa")
    res = 0.0
    for tau in taus:
        tm, zm = state_at(tau - h)
        tp, zp = state_at(tau + h)
        t0, z0 = state_at(tau)
        if min(zm, zp, z0) <= 0:
            raise ValueError("degenerate z along the trajectory")
        rm, pm, _ = family.forms(tm, zm)
        rp, pp, _ = family.forms(tp, zp)
        r0, _, m0 = family.forms(t0, z0)
        dphi = (pp - pm) * (0.5 / h)
        dhalf = ((rp ^ rp) - (rm ^ rm)) * (0.25 / h)
        res = max(res, float(np.abs((dphi - ce_d(alg, r0)).coeffs).max()),
                  float(np.abs((dhalf + ce_d(alg, m0)).coeffs).max()))
    return res


# --------------------------------------------------------------------------
# the kernel lemma
# --------------------------------------------------------------------------


def lemma_kerd_check(alg: NilLieAlgebra, phi_plus: InvariantForm, tol: float = 1e-10) -> bool:
    """J(ker d) = ker d for a closed stable phi+ with lambda < 0."""
    closed = float(np.abs(ce_d(alg, phi_plus).coeffs).max())
    scale = max(1.0, float(np.abs(phi_plus.coeffs).max()))
    if closed > tol * scale:
        raise ValueError("phi+ is not closed")
    jm, _ = acs_from_stable(phi_plus)
    ker = alg.closed_1forms()
    if ker.shape[0] == 0:
        return True
    image = ker @ act_on_1forms(jm)
    # image rows must lie in the row space of ker: remove the projection and measure what is left
    resid = image - (image @ ker.T) @ ker
    return float(np.abs(resid).max()) <= tol * max(1.0, float(np.abs(image).max()))


def closed_3form_basis(alg: NilLieAlgebra) -> np.ndarray:
    """Orthonormal basis (rows) of closed invariant 3-forms."""
    return scipy.linalg.null_space(d_matrix(alg, 3)).T


def random_closed_stable(alg: NilLieAlgebra, rng: np.random.Generator, count: int,
                         max_tries: int = 100000) -> list[InvariantForm]:
    """Closed invariant 3-forms with lambda < 0 sampled from the kernel of d (rejection)."""
    basis = closed_3form_basis(alg)
    out: list[InvariantForm] = []
    tries = 0
    while len(out) < count:
        tries += 1
        if tries > max_tries:
            raise RuntimeError("too few stable closed forms found")
        phi = InvariantForm(3, rng.normal(size=basis.shape[0]) @ basis)
        if stable_invariant(phi) < -1e-8:
            out.append(phi)
    return out


def standard_phi_plus() -> InvariantForm:
    """Re((e1 + i e2)(e3 + i e4)(e5 + i e6)) = e135 - e146 - e236 - e245."""
    return e(1, 3, 5) - e(1, 4, 6) - e(2, 3, 6) - e(2, 4, 5)


def standard_phi_minus() -> InvariantForm:
    """Im((e1 + i e2)(e3 + i e4)(e5 + i e6)) = e136 + e145 + e235 - e246."""
    return e(1, 3, 6) + e(1, 4, 5) + e(2, 3, 5) - e(2, 4, 6)
