"""Command line front end: catalog, verify, flow, ma.

Exit codes: 0 when every check passes, 1 when a check fails, 2 on usage or
domain errors. JSON reports carry "schema": 1; ``--no-meta`` drops timings
and the timestamp so that reports are byte-identical for a fixed seed.
"""
from __future__ import annotations

import argparse
import json
import math
import platform
import sys
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Callable

import numpy as np

from . import exterior as E
from . import flow as F
from . import jets as J
from . import ma as MA
from . import nil as N
from . import quotient as Q
from . import riemann as R
from . import zoo as Z
from .jets import DomainError

SCHEMA = 1
MARGIN = 1e-3

DEFAULT_TOL = {
    "d_phi": 1e-8,
    "d_star_phi": 1e-8,
    "ricci": 1e-7,
    "roundtrip": 1e-8,
    "eq13_evolution": 1e-9,
    "eq14_compatibility": 1e-9,
    "primitives": 1e-9,
    "su3_algebraic": 1e-8,
    "integrability": 1e-8,
    "ricci_form": 1e-7,
    "kahler_potential": 1e-9,
    "d_sigma": 1e-9,
    "j_square": 1e-10,
    "pde_residual": 1e-9,
    "helmholtz": 1e-10,
    "foliation_shortcut": 1e-10,
    "route_agreement": 1e-10,
}

FLOW_PRESETS = {
    "bell": "--Hc 2 --start 0,1 (z = (1 - t^2)^2 up to the degeneration at t = 1)",
    "above": "--Hc -2 --start 0,1 (z = (t^2 + 1)^2)",
    "kahler": "--Hc 0 --start 1,1 (z = t^4, the glps level)",
}


class UsageError(Exception):
    pass


@dataclass
class CheckRecord:
    name: str
    points: int
    max_residual: float
    tolerance: float
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return bool(self.max_residual <= self.tolerance)

    def as_dict(self, meta: bool) -> dict:
        d = {"name": self.name, "points": self.points, "max_residual": _num(self.max_residual),
             "tolerance": self.tolerance, "pass": self.passed}
        if meta:
            d["seconds"] = round(self.seconds, 6)
        return d


@dataclass
class VerificationReport:
    family: str
    params: dict
    seed: int
    samples: int
    checks: list[CheckRecord] = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks) and self.extra.get("ranks_ok", True)

    def as_dict(self, meta: bool) -> dict:
        d = {"schema": SCHEMA, "command": "verify", "family": self.family, "params": self.params,
             "seed": self.seed, "samples": self.samples, "checks": [c.as_dict(meta) for c in self.checks]}
        d.update(self.extra)
        d["pass"] = self.passed
        if meta:
            d["meta"] = _meta()
        return d


def _num(x: float):
    return x if math.isfinite(x) else str(x)


def _meta() -> dict:
    from importlib.metadata import PackageNotFoundError, version

    try:
        ver = version("artifact")
    except PackageNotFoundError:
        ver = "unknown"
    return {"timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
            "python": platform.python_version(), "version": ver}


def _timed(report: VerificationReport, name: str, points: int, tol: float, fn: Callable[[], float]) -> float:
    t0 = time.perf_counter()
    val = float(fn())
    report.checks.append(CheckRecord(name, points, val, tol, time.perf_counter() - t0))
    return val


def _tol(name: str, override: float | None) -> float:
    return DEFAULT_TOL[name] if override is None else override


def _parse_pair(text: str, what: str) -> tuple[float, float]:
    try:
        a, b = (float(v) for v in text.split(","))
    except ValueError as exc:
        raise UsageError(f"{what} must look like a,b (got {text!r})") from exc
    return a, b


# --------------------------------------------------------------------------
# verification suites
# --------------------------------------------------------------------------


def verify_bundle(bundle: Z.G2Bundle, samples: int, seed: int, tol: float | None,
                  rank_points: int = 20, su3_points: int = 10, report: VerificationReport | None = None
                  ) -> VerificationReport:
    rng = np.random.default_rng(seed)
    pts = bundle.sample_points(samples, rng, MARGIN)
    few = pts[: min(samples, su3_points)]
    rep = report or VerificationReport(bundle.name, bundle.params, seed, samples)
    n = len(pts)
    _timed(rep, "d_phi", n, _tol("d_phi", tol), lambda: bundle.torsion_residual(pts)[0])
    _timed(rep, "d_star_phi", n, _tol("d_star_phi", tol), lambda: bundle.torsion_residual(pts)[1])
    _timed(rep, "roundtrip", len(few), _tol("roundtrip", tol), lambda: bundle.roundtrip_residual(few))
    _timed(rep, "eq14_compatibility", n, _tol("eq14_compatibility", tol), lambda: bundle.compatibility_residual(pts))
    if bundle.omega_tilde.max_order >= 2 and bundle.u.max_order >= 2:
        _timed(rep, "eq13_evolution", n, _tol("eq13_evolution", tol), lambda: bundle.evolution_residual(pts))
    _timed(rep, "primitives", n, _tol("primitives", tol), lambda: max(bundle.primitive_residuals(pts)))

    if bundle.metric.max_order >= 2:
        datas = []

        def ricci():
            datas.extend(R.curvature(bundle.metric, p) for p in pts)
            return max(float(np.abs(d.ricci).max()) for d in datas)

        _timed(rep, "ricci", n, _tol("ricci", tol), ricci)
        ranks = []
        for d in datas[:rank_points]:
            a, b = R.curvature_matrices(d)
            ranks.append((R.numerical_rank(a), R.numerical_rank(b)))
        distinct = sorted(set(ranks))
        rep.extra["ranks"] = [list(r) for r in distinct]
        rep.extra["rank_points"] = len(ranks)
        rep.extra["ranks_ok"] = distinct == [(7, 14)]
    else:
        rep.extra["ricci"] = "skipped: metric jets too shallow for curvature"

    s = Q.reduce(bundle, seed=seed)
    few = np.delete(few, bundle.chart.index("y"), axis=1)
    alg = {}
    _timed(rep, "su3_algebraic", len(few), _tol("su3_algebraic", tol),
           lambda: max(alg.setdefault("r", s.algebraic_residuals(few)).values()))
    if s.h.max_order >= 1:
        _timed(rep, "integrability", len(few), _tol("integrability", tol), lambda: Q.integrability_residual(s, few))
    if s.h.max_order >= 2:
        _timed(rep, "ricci_form", len(few), _tol("ricci_form", tol), lambda: Q.ricci_form_check(s, few))
    if bundle.params == {"p": 0.0, "q": 0.0, "k": 0.0, "l": 1.0}:
        pot = s.t ** 5 * 0.2
        _timed(rep, "kahler_potential", len(few), _tol("kahler_potential", tol),
               lambda: Q.potential_residual(s.sigma, s.J, pot, few))
    return rep


def verify_kahler_quotient(kq: Z.KahlerQuotient, samples: int, seed: int, tol: float | None) -> VerificationReport:
    rng = np.random.default_rng(seed)
    lo = np.array([d[0] for d in kq.chart.domain])
    hi = np.array([d[1] for d in kq.chart.domain])
    pts = rng.uniform(lo + MARGIN, hi - MARGIN, size=(samples, kq.chart.dim))
    rep = VerificationReport("gibb-kahler", {}, seed, samples)
    n = len(pts)
    t = J.coordinate(kq.chart, "t")
    _timed(rep, "d_sigma", n, _tol("d_sigma", tol), lambda: E.max_abs(E.exterior_d(kq.sigma), pts))
    _timed(rep, "j_square", n, _tol("j_square", tol), lambda: max(kq.J.square_residual(p) for p in pts))
    target = E.exterior_d(E.d_c(t.map(J.log), kq.J)) * 0.5
    _timed(rep, "ricci_form", n, _tol("ricci_form", tol), lambda: Q.ricci_form_residual(kq.metric, kq.J, target, pts))
    _timed(rep, "kahler_potential", n, _tol("kahler_potential", tol),
           lambda: Q.potential_residual(kq.sigma, kq.J, t ** 5 * 0.2, pts))
    return rep


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------


def cmd_catalog(args) -> int:
    listing = {"schema": SCHEMA, "families": Z.FAMILIES, "algebras": list(N.ALGEBRAS), "flow_presets": FLOW_PRESETS}
    if args.algebras:
        listing = {"schema": SCHEMA, "algebras": list(N.ALGEBRAS)}
    if args.json:
        _emit(args, json.dumps(listing, indent=2, sort_keys=True))
        return 0
    lines = []
    if "families" in listing:
        lines.append("families:")
        lines += [f"  {k:<18} {v}" for k, v in listing["families"].items()]
    lines.append("algebras:")
    for name in listing["algebras"]:
        alg = N.builtin_algebra(name)
        d = ", ".join(f"de{i}={alg.d_generator(i).terms()}" for i in (5, 6) if not alg.d_generator(i).is_zero())
        lines.append(f"  {name:<18} {d or 'abelian'}")
    if "flow_presets" in listing:
        lines.append("flow presets:")
        lines += [f"  {k:<18} {v}" for k, v in listing["flow_presets"].items()]
    _emit(args, "\n".join(lines))
    return 0


def cmd_verify(args) -> int:
    window = _parse_pair(args.window, "--window")
    try:
        obj = Z.build_family(args.family, window)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if isinstance(obj, Z.KahlerQuotient):
        rep = verify_kahler_quotient(obj, args.samples, args.seed, args.tol)
    else:
        rep = verify_bundle(obj, args.samples, args.seed, args.tol)
    _emit_report(args, rep.as_dict(not args.no_meta), rep)
    return 0 if rep.passed else 1


def cmd_flow(args) -> int:
    t0, z0 = _parse_pair(args.start, "--start")
    if args.params:
        try:
            p, q, k, l = (float(v) for v in args.params.split(","))
        except ValueError as exc:
            raise UsageError("--params must be p,q,k,l") from exc
    else:
        p, q, k, l = 0.0, 0.0, 0.0, 1.0
    if args.Hc is not None:
        if args.params:
            raise UsageError("--Hc selects the (0,0,0,1) level curves; drop --params")
        eps = F.level_eps(args.Hc, t0)
        if abs(F.quartic_level(args.Hc, t0) - z0) > 1e-12 * max(1.0, z0):
            raise UsageError(f"start ({t0:g},{z0:g}) is not on the level H = {args.Hc:g}")
    else:
        eps = args.eps
    params = F.FlowParams(p, q, k, l, eps)
    traj = F.integrate(params, F.FlowState(0.0, t0, z0), args.step, args.tau_max,
                       adaptive=not args.fixed_step, atol=args.atol)
    drift = traj.drift()
    last = traj.states[-1]
    summary = {"schema": SCHEMA, "command": "flow", "params": {"p": p, "q": q, "k": k, "l": l, "eps": eps},
               "start": [t0, z0], "steps": len(traj) - 1, "status": traj.status, "message": traj.message,
               "endpoint": {"tau": last.tau, "t": last.t, "z": last.z}, "H0": F.hamiltonian(params, t0, z0),
               "drift": drift, "drift_tolerance": args.tol, "pass": drift <= args.tol}
    if args.compare_quartic:
        if args.Hc is None:
            raise UsageError("--compare-quartic needs --Hc")
        dev = max(abs(s.z - F.quartic_level(args.Hc, s.t)) for s in traj.states)
        summary["quartic_max_deviation"] = dev
    rows = _flow_csv(traj, args.Hc if args.compare_quartic else None)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(rows)
        _print_summary(args, summary, sys.stdout)
    else:
        sys.stdout.write(rows)
        _print_summary(args, summary, sys.stderr)
    return 0 if summary["pass"] else 1


def _flow_csv(traj: F.Trajectory, Hc: float | None) -> str:
    import io

    buf = io.StringIO()
    F.write_csv(traj, buf)
    if Hc is None:
        return buf.getvalue()
    lines = buf.getvalue().splitlines()
    out = [lines[0] + ",quartic"]
    for line, s in zip(lines[1:], traj.states):
        out.append(f"{line},{F.quartic_level(Hc, s.t)!r}")
    return "\n".join(out) + "\n"


def _print_summary(args, summary: dict, stream) -> None:
    if args.json:
        print(json.dumps(summary, indent=2, sort_keys=True), file=stream)
    else:
        e = summary["endpoint"]
        print(f"flow {summary['status']}: {summary['steps']} steps, endpoint t={e['t']:.9g} z={e['z']:.9g}, "
              f"H drift {summary['drift']:.3e}" + (f" ({summary['message']})" if summary["message"] else ""),
              file=stream)


def cmd_ma(args) -> int:
    window = _parse_pair(args.window, "--window")
    K0 = MA.AI0 if args.K0 is None else args.K0
    K1 = MA.AirySolution.decaying(args.c).K1 if args.K1 is None else args.K1
    K = MA.AirySolution(args.c, K0, K1).scaled(args.amplitude)
    try:
        prob = MA.separable_solution(args.c, args.H, K, window, seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    rep = VerificationReport(f"ma:c={args.c:g},H={args.H}", dict(prob.meta), args.seed, args.grid ** 3)
    pts = _ma_grid(prob, args.grid)
    n = len(pts)
    hf = MA.parse_expression(args.H, prob.chart)
    _timed(rep, "helmholtz", n, _tol("helmholtz", args.tol), lambda: MA.helmholtz_residual(hf, args.c, pts))
    res = prob.residual()
    _timed(rep, "pde_residual", n, _tol("pde_residual", args.tol),
           lambda: max(abs(float(res.value(p))) for p in pts))
    short = MA.foliation_shortcut(prob.G, prob.hk)
    mop = MA.ma_operator(prob.G, prob.hk)
    _timed(rep, "foliation_shortcut", n, _tol("foliation_shortcut", args.tol),
           lambda: max(abs(float(short.value(p)) - float(mop.value(p))) for p in pts))
    pos = prob.positivity(pts)
    rep.extra["positivity_min_u_over_t"] = pos
    if pos <= 0:
        raise DomainError("omega~ is not positive on the grid")
    if args.c == 0:
        u = prob.u()
        rep.extra["u_minus_t"] = max(abs(float(u.value(p)) - p[0]) for p in pts)
    if args.build_g2:
        explicit = MA.separable_explicit(args.c, args.H, K, window)
        potential = prob.to_bundle(explicit.name + ":potential")
        rng = np.random.default_rng(args.seed)
        few = explicit.sample_points(min(args.samples, 10), rng, MARGIN)
        _timed(rep, "route_agreement", len(few), _tol("route_agreement", args.tol),
               lambda: max(float(np.abs(explicit.metric.value(p) - potential.metric.value(p)).max()) for p in few))
        verify_bundle(explicit, args.samples, args.seed, args.tol, report=rep)
    d = rep.as_dict(not args.no_meta)
    d["command"] = "ma"
    _emit_report(args, d, rep)
    return 0 if rep.passed else 1


def _ma_grid(prob: MA.MAProblem, n: int) -> np.ndarray:
    ch = prob.chart
    a, b = prob.window
    ts = np.linspace(a + MARGIN, b - MARGIN, n)
    ls = np.linspace(-Z.BOX + MARGIN, Z.BOX - MARGIN, n)
    pts = []
    for t in ts:
        for lam in ls:
            for mu in ls:
                p = np.zeros(ch.dim)
                p[ch.index("t")], p[ch.index("lam")], p[ch.index("mu")] = t, lam, mu
                pts.append(p)
    return np.array(pts)


# --------------------------------------------------------------------------
# plumbing
# --------------------------------------------------------------------------


def _emit(args, text: str) -> None:
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _emit_report(args, d: dict, rep: VerificationReport) -> None:
    if args.json or args.out:
        _emit(args, json.dumps(d, indent=2, sort_keys=True))
        return
    print(f"{d['family']}  seed={rep.seed}  samples={rep.samples}")
    for c in rep.checks:
        print(f"  {'PASS' if c.passed else 'FAIL'}  {c.name:<20} {c.max_residual:.3e}  (tol {c.tolerance:.0e}, {c.points} pts)")
    if "ranks" in d:
        print(f"  {'PASS' if d['ranks_ok'] else 'FAIL'}  holonomy ranks       {d['ranks']}  ({d['rank_points']} pts)")
    print("PASS" if rep.passed else "FAIL")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol", type=float, default=None, help="override every residual tolerance")
    common.add_argument("--samples", type=int, default=20)
    common.add_argument("--out", default=None, help="write the report (or CSV) to this file")
    common.add_argument("--json", action="store_true")
    common.add_argument("--no-meta", action="store_true", help="omit timestamps and timings")

    ap = argparse.ArgumentParser(prog="kahler-g2", description="G2 metrics from Kahler reduction: checks and flows")
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("catalog", parents=[common], help="list families, algebras and flow presets")
    c.add_argument("--algebras", action="store_true")
    c.set_defaults(func=cmd_catalog)

    v = sub.add_parser("verify", parents=[common], help="run the check suite on a family")
    v.add_argument("--family", required=True)
    v.add_argument("--window", default="0.5,2", help="t interval a,b")
    v.set_defaults(func=cmd_verify)

    f = sub.add_parser("flow", parents=[common], help="integrate the (t, z) Hamiltonian system")
    f.add_argument("--Hc", type=float, default=None, help="level of the (0,0,0,1) system")
    f.add_argument("--params", default=None, help="p,q,k,l")
    f.add_argument("--eps", type=int, choices=(1, -1), default=1)
    f.add_argument("--start", required=True, help="t,z")
    f.add_argument("--step", type=float, default=1e-3)
    f.add_argument("--tau-max", type=float, default=10.0)
    f.add_argument("--fixed-step", action="store_true", help="disable step-halving error control")
    f.add_argument("--atol", type=float, default=1e-12)
    f.add_argument("--compare-quartic", action="store_true")
    f.set_defaults(func=cmd_flow)

    m = sub.add_parser("ma", parents=[common], help="separable Monge-Ampere solutions")
    m.add_argument("--c", type=float, required=True)
    m.add_argument("--H", required=True, help='expression in lam (or lambda), mu, ell, m, e.g. "sin(lambda)"')
    m.add_argument("--K0", type=float, default=None, help="K(0) before scaling (default Ai(0))")
    m.add_argument("--K1", type=float, default=None, help="K'(0) before scaling (default c^(1/3) Ai'(0))")
    m.add_argument("--amplitude", type=float, default=2.0)
    m.add_argument("--window", default="0.5,2")
    m.add_argument("--grid", type=int, default=6, help="points per axis on the (t, lam, mu) grid")
    m.add_argument("--build-g2", action="store_true")
    m.set_defaults(func=cmd_ma)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and 2
    if args.command == "flow" and args.tol is None:
        args.tol = 1e-8
    try:
        return args.func(args)
    except (UsageError, DomainError, F.FlowDomainError, Z.ConstructionError, N.NotStableError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
