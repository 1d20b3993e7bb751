"""The two-variable Hamiltonian system in (t, z) and its level curves.

H(t, z) = 2t R(t) - 2 eps sqrt(z),  R(t)^2 = S(t) = (k + l t)^2 - (p + q t)^2,

where R carries the sign of k + l t so that it stays smooth (R = k + l t
when p = q = 0). The flow is dt/dtau = -dH/dz = eps z^{-1/2} and dz/dtau = dH/dt. The level H = 0 is
z = t^2 S(t); the constant-coefficient family along it has z^{1/2} dt = dtau.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Callable, Iterable, TextIO

import numpy as np
from scipy import integrate as spi
from scipy import optimize

Z_MIN = 1e-9


class FlowDomainError(ValueError):
    pass


class DegenerateError(FlowDomainError):
    """z reached zero: the structures along the flow degenerate."""


@dataclass(frozen=True)
class FlowParams:
    p: float = 0.0
    q: float = 0.0
    k: float = 0.0
    l: float = 1.0
    eps: int = 1

    def __post_init__(self):
        if self.eps not in (1, -1):
            raise ValueError("eps must be +1 or -1")

    def S(self, t: float) -> float:
        return (self.k + self.l * t) ** 2 - (self.p + self.q * t) ** 2

    def dS(self, t: float) -> float:
        return 2 * self.l * (self.k + self.l * t) - 2 * self.q * (self.p + self.q * t)

    def R(self, t: float) -> float:
        s = self.S(t)
        if s < 0:
            raise FlowDomainError(f"(k+lt)^2 - (p+qt)^2 = {s:g} < 0 at t = {t:g}")
        return math.copysign(math.sqrt(s), self.k + self.l * t)

    def dR(self, t: float) -> float:
        r = self.R(t)
        if r != 0:
            return self.dS(t) / (2 * r)
        a, b = self.k + self.l * t, self.p + self.q * t
        if a == 0 and b == 0 and self.l * self.l >= self.q * self.q:
            return math.copysign(math.sqrt(self.l * self.l - self.q * self.q), self.l)
        raise FlowDomainError(f"R is not differentiable at t = {t:g}")

    def with_eps(self, eps: int) -> "FlowParams":
        return FlowParams(self.p, self.q, self.k, self.l, eps)


@dataclass(frozen=True)
class FlowState:
    tau: float
    t: float
    z: float


def _check_z(z: float) -> None:
    if not z > 0:
        raise DegenerateError(f"z = {z:g} is not positive")


def hamiltonian(params: FlowParams, t: float, z: float) -> float:
    _check_z(z)
    return 2 * t * params.R(t) - 2 * params.eps * math.sqrt(z)


def hamilton_rhs(params: FlowParams, state: FlowState) -> tuple[float, float]:
    """(dt/dtau, dz/dtau) = (eps z^{-1/2}, d/dt [2 t R])."""
    _check_z(state.z)
    t = state.t
    return params.eps / math.sqrt(state.z), 2 * params.R(t) + 2 * t * params.dR(t)


def _rk4_step(params: FlowParams, st: FlowState, h: float) -> FlowState:
    def f(t, z):
        return hamilton_rhs(params, FlowState(0.0, t, z))

    k1 = f(st.t, st.z)
    k2 = f(st.t + 0.5 * h * k1[0], st.z + 0.5 * h * k1[1])
    k3 = f(st.t + 0.5 * h * k2[0], st.z + 0.5 * h * k2[1])
    k4 = f(st.t + h * k3[0], st.z + h * k3[1])
    t = st.t + h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
    z = st.z + h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
    return FlowState(st.tau + h, t, z)


@dataclass
class Trajectory:
    params: FlowParams
    states: list[FlowState]
    status: str = "ok"  # "ok" | "degenerate" | "domain"
    message: str = ""
    direction: int = 1

    @property
    def t(self) -> np.ndarray:
        return np.array([s.t for s in self.states])

    @property
    def z(self) -> np.ndarray:
        return np.array([s.z for s in self.states])

    @property
    def tau(self) -> np.ndarray:
        return np.array([s.tau for s in self.states])

    def energies(self) -> np.ndarray:
        return np.array([hamiltonian(self.params, s.t, s.z) for s in self.states])

    def drift(self) -> float:
        e = self.energies()
        return float(np.abs(e - e[0]).max())

    def __len__(self) -> int:
        return len(self.states)


def integrate(params: FlowParams, state0: FlowState, step: float, tau_max: float,
              direction: int | None = None, z_min: float = Z_MIN,
              adaptive: bool = False, atol: float = 1e-12) -> Trajectory:
    """Classical RK4 over |tau - tau0| <= tau_max.

    ``direction`` is the sign of the tau increment; the default eps makes t
    increase. The run stops early with status "degenerate" once z drops
    below ``z_min``, or "domain" if S turns negative.

    With ``adaptive`` each step is compared against two half steps and halved
    until max(|dt|, |dz| / sqrt(z)) <= atol; the second term is the error in H.
    Steps grow back towards ``step`` when the estimate allows.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    hamiltonian(params, state0.t, state0.z)
    d = params.eps if direction is None else int(math.copysign(1, direction))
    traj = Trajectory(params, [state0], direction=d)
    st = state0
    done = 0.0
    h = step
    while tau_max - done > 1e-9 * step:
        h = min(h, tau_max - done)
        try:
            new = _rk4_step(params, st, d * h)
            if adaptive:
                half = _rk4_step(params, _rk4_step(params, st, d * h / 2), d * h / 2)
                err = max(abs(half.t - new.t), abs(half.z - new.z) / math.sqrt(max(half.z, z_min)))
                if err > atol:
                    if h < 1e-15:
                        raise DegenerateError(f"step underflow at z = {st.z:g}")
                    h /= 2
                    continue
                new = half
        except DegenerateError as exc:
            traj.status, traj.message = "degenerate", f"{exc} near t = {st.t:.6g}"
            break
        except FlowDomainError as exc:
            traj.status, traj.message = "domain", str(exc)
            break
        if not (math.isfinite(new.z) and math.isfinite(new.t)) or new.z < z_min:
            traj.status, traj.message = "degenerate", f"z fell below {z_min:g} near t = {st.t:.6g}"
            break
        if params.S(new.t) < 0:
            traj.status, traj.message = "domain", f"S < 0 near t = {new.t:.6g}"
            break
        traj.states.append(new)
        st = new
        done += h
        if adaptive and err < atol / 32:
            h = min(step, 2 * h)
    return traj


def quartic_level(H_c: float, t: float) -> float:
    """z on the level H = H_c of the (0, 0, 0, 1) system."""
    return (t * t - 0.5 * H_c) ** 2


def level_eps(H_c: float, t: float) -> int:
    """Branch sign with eps z^{1/2} = t^2 - H_c / 2 at t."""
    v = t * t - 0.5 * H_c
    if v == 0:
        raise FlowDomainError("the level curve touches z = 0 here")
    return 1 if v > 0 else -1


def level_start(H_c: float, t0: float) -> tuple[FlowParams, FlowState]:
    return FlowParams(0, 0, 0, 1, level_eps(H_c, t0)), FlowState(0.0, t0, quartic_level(H_c, t0))


def tau_of_t(params: FlowParams, t0: float, t1: float,
             sqrt_z: Callable[[float], float] | None = None) -> float:
    """tau(t1) - tau(t0) = int z^{1/2} dt; by default along the H = 0 level, z^{1/2} = t R."""
    if t0 == t1:
        return 0.0
    if sqrt_z is None:
        def sqrt_z(t):
            return t * params.R(t)
    val, _ = spi.quad(sqrt_z, t0, t1, epsabs=0.0, epsrel=1e-12, limit=200)
    return float(val)


def invert_tau(tau_fn: Callable[[float], float], tau: float, t_lo: float, t_hi: float) -> float:
    """Solve tau_fn(t) = tau on a window where tau_fn is monotone."""
    a, b = tau_fn(t_lo) - tau, tau_fn(t_hi) - tau
    if a == 0:
        return t_lo
    if b == 0:
        return t_hi
    if a * b > 0:
        raise FlowDomainError(f"tau = {tau:g} is outside [{tau_fn(t_lo):g}, {tau_fn(t_hi):g}]")
    return float(optimize.brentq(lambda t: tau_fn(t) - tau, t_lo, t_hi, xtol=1e-15, maxiter=200))


def level_state_at(H_c: float, t_ref: float, step: float = 1e-3) -> Callable[[float], tuple[float, float]]:
    """s -> (t, z) on the H_c level with t(0) = t_ref and dt/ds = z^{-1/2} > 0.

    Each call runs RK4 from the reference point, with the last step
    shortened to land exactly on s; s = eps * tau.
    """
    params, st0 = level_start(H_c, t_ref)

    def state(s: float) -> tuple[float, float]:
        d = 1 if s >= 0 else -1
        traj = integrate(params, st0, step, abs(s), direction=d * params.eps)
        if traj.status != "ok":
            raise FlowDomainError(traj.message)
        last = traj.states[-1]
        return last.t, last.z

    return state


def write_csv(traj: Trajectory, out: TextIO) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["tau", "t", "z", "H"])
    for s in traj.states:
        w.writerow([repr(float(s.tau)), repr(float(s.t)), repr(float(s.z)),
                    repr(float(hamiltonian(traj.params, s.t, s.z)))])


def read_csv(text: Iterable[str]) -> list[dict[str, float]]:
    rows = csv.DictReader(text)
    return [{k: float(v) for k, v in r.items()} for r in rows]
