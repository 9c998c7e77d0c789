"""Command-line experiment runner.

Every experiment reads an operator description file, runs one named
experiment, and writes ``report.json`` plus experiment-specific CSVs into
the output directory.  Exit codes: 0 = all pass flags true, 2 = a
scientific check failed (still a valid result), 1 = usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .cauchy import CauchySolver, estimate_M
from .errors import SemilabError, SingularResolvent
from .forcing import default_probes, load_probes
from .operators import load_operator
from .theorem import (
    assemble_U_V,
    default_mu_grid,
    halfplane_scan,
    omega1,
    omega2_search,
    resolvent_from_solver,
    rplus_verdict,
    surjectivity_identity_check,
    vnorm_decay,
)
from .timegrid import TimeGrid
from .weighted import theta_sweep, trace_norm_upper, weighted_maxreg_check, weighted_norm

EXPERIMENTS = ("spectrum", "resolvent-scan", "maxreg-estimate", "identity-check",
               "reconstruct", "weighted", "theta-sweep", "verdict")


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _parse_complex(tok):
    try:
        return complex(tok.replace("i", "j"))
    except ValueError:
        raise _UsageError(f"cannot parse complex number {tok!r}") from None


def parse_mu_grid(spec):
    """Either a comma-separated list of complex numbers or
    ``grid:RE_LO:RE_HI:NRE:IM_LO:IM_HI:NIM`` (log-spaced real parts,
    linear imaginary parts)."""
    if spec.startswith("grid:"):
        parts = spec.split(":")[1:]
        if len(parts) != 6:
            raise _UsageError(f"bad mu-grid spec {spec!r}")
        re_lo, re_hi, n_re, im_lo, im_hi, n_im = (float(p) for p in parts)
        if re_lo <= 0:
            raise _UsageError("mu-grid real parts must be positive (log spacing)")
        res = np.logspace(np.log10(re_lo), np.log10(re_hi), int(n_re))
        ims = np.linspace(im_lo, im_hi, int(n_im))
        return [complex(r, i) for r in res for i in ims]
    return [_parse_complex(t) for t in spec.split(",") if t]


def _csv(path, header, rows):
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _fmt(v):
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def _json_ready(obj):
    if isinstance(obj, dict):
        return {k: _json_ready(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_ready(v) for v in obj]
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _write_report(out, report):
    with open(os.path.join(out, "report.json"), "w") as fh:
        json.dump(_json_ready(report), fh, sort_keys=True, indent=2)
        fh.write("\n")


def _grid(args):
    return TimeGrid.uniform(args.T, panels=args.panels)


def _random_unit(op, seed):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(op.dim) + 1j * rng.standard_normal(op.dim)
    return x / np.linalg.norm(x)


def _probes(op, args):
    if args.probes:
        return load_probes(args.probes, op.dim)
    return default_probes(op, seed=args.seed)


# -- experiments -----------------------------------------------------------


def run_spectrum(op, args, out):
    ev = op.eigenvalues
    _csv(os.path.join(out, "spectrum.csv"), "re_lambda,im_lambda",
         [(float(l.real), float(l.imag)) for l in ev])
    return {"s_A": float(op.spectral_bound), "dim": op.dim}, True


def run_resolvent_scan(op, args, out):
    omega = max(0.0, float(op.spectral_bound) + 1e-9)
    mu_grid = parse_mu_grid(args.mu_grid) if args.mu_grid else default_mu_grid(omega)
    rep = halfplane_scan(op, omega, mu_grid)
    rows = [(m.real, m.imag, r, (1.0 + abs(m)) * r) for m, r in rep.scan]
    _csv(os.path.join(out, "resolvent_scan.csv"),
         "re_mu,im_mu,resolvent_norm,weighted_norm", rows)
    ok = bool(np.isfinite(rep.bound_constant))
    return {"N": rep.bound_constant, "omega": rep.half_plane_offset,
            "s_A": float(op.spectral_bound)}, ok


def run_maxreg_estimate(op, args, out):
    probes = _probes(op, args)
    est = estimate_M(op, _grid(args), probes)
    rows, running = [], 0.0
    for i, r in enumerate(est.ratios):
        running = max(running, r)
        rows.append((i, float(r), float(running)))
    _csv(os.path.join(out, "maxreg.csv"), "probe_id,ratio,M_hat_running", rows)
    w1 = omega1(est.M_hat, args.T)
    return {"M_hat": est.M_hat, "c2_hat": est.c2_hat, "omega1": w1,
            "probe_count": est.probe_count}, bool(np.isfinite(est.M_hat))


def run_identity_check(op, args, out):
    mu_grid = (parse_mu_grid(args.mu_grid) if args.mu_grid else
               [complex(r, i) for r in np.logspace(np.log10(0.5), np.log10(32), 5)
                for i in np.linspace(-16, 16, 5)])
    solver = CauchySolver(op, _grid(args))
    x = _random_unit(op, args.seed)
    rows, worst = [], 0.0
    for mu in mu_grid:
        sd = assemble_U_V(solver, mu)
        res = surjectivity_identity_check(op, sd, x)
        worst = max(worst, res)
        rows.append((mu.real, mu.imag, sd.V_norm, float(res)))
    _csv(os.path.join(out, "identity.csv"),
         "re_mu,im_mu,V_norm,identity_residual", rows)
    return {"max_identity_residual": float(worst), "T": args.T}, worst <= 1e-8


def run_reconstruct(op, args, out):
    solver = CauchySolver(op, _grid(args))
    w2 = omega2_search(solver)
    mu_grid = (parse_mu_grid(args.mu_grid) if args.mu_grid else
               [complex(r, i) for r in np.logspace(np.log10(w2 + 0.5), np.log10(w2 + 16), 3)
                for i in (-4.0, 0.0, 4.0)])
    y = _random_unit(op, args.seed)
    rows, worst = [], 0.0
    for mu in mu_grid:
        if mu.real <= w2:
            raise _UsageError(f"mu={mu} has Re mu <= omega2={w2:.6g}")
        sd = assemble_U_V(solver, mu)
        x = resolvent_from_solver(solver, mu, y, sdata=sd)
        err = float(op.norm0(x - op.resolvent_solve(mu, y)) / op.norm0(y))
        worst = max(worst, err)
        rows.append((mu.real, mu.imag, sd.V_norm, err, sd.neumann_terms))
    _csv(os.path.join(out, "reconstruct.csv"),
         "re_mu,im_mu,V_norm,reconstruction_error,neumann_terms", rows)
    return {"omega2": float(w2), "max_reconstruction_error": float(worst)}, worst <= 1e-6


def run_weighted(op, args, out):
    grid = _grid(args)
    probes = _probes(op, args)
    est = estimate_M(op, grid, probes)
    mu = parse_mu_grid(args.mu_grid)[0] if args.mu_grid else complex(1.0)
    x = _random_unit(op, args.seed)
    chk = weighted_maxreg_check(op, grid, args.sigma, mu, x, est.M_hat,
                                c2_hat=est.c2_hat)
    solver = CauchySolver(op, grid)
    from .forcing import ExpForcing
    u = solver.solve_ka(ExpForcing(mu, x))
    wn = weighted_norm(op, u, args.sigma)
    tr = trace_norm_upper(op, x, grid, args.sigma)
    report = {"sigma": args.sigma, "lhs": chk.lhs, "rhs": chk.rhs,
              "inequality_pass": chk.passed,
              "endpoint_value": chk.endpoint_value,
              "endpoint_bound": chk.endpoint_bound,
              "endpoint_pass": chk.endpoint_ok,
              "weighted_norm_u": wn.value,
              "zero_limit": wn.zero_limit,
              "membership_ok": wn.membership_ok,
              "trace_norm_upper": tr}
    ok = bool(chk.passed and (chk.endpoint_ok is not False))
    _csv(os.path.join(out, "weighted.csv"),
         "sigma,lhs,rhs,endpoint_value,weighted_norm",
         [(args.sigma, chk.lhs, chk.rhs, chk.endpoint_value, wn.value)])
    return report, ok


def run_theta_sweep(op, args, out):
    thetas = [args.theta] if args.theta is not None else list(np.linspace(0.1, 0.9, 9))
    probes = _probes(op, args)
    rows = theta_sweep(op, _grid(args), thetas, probes)
    _csv(os.path.join(out, "theta_sweep.csv"), "theta,M_hat,omega1,N",
         [(r.theta, r.M_hat, r.omega1, r.N) for r in rows])
    ok = all(np.isfinite(r.M_hat) for r in rows)
    return {"thetas": [r.theta for r in rows],
            "M_hat": [r.M_hat for r in rows]}, bool(ok)


def run_verdict(op, args, out):
    verdict = rplus_verdict(op)
    grid = _grid(args)
    solver = CauchySolver(op, grid)
    probes = _probes(op, args)
    est = estimate_M(op, grid, probes)
    w1 = omega1(est.M_hat, args.T)
    try:
        w2 = omega2_search(solver)
    except SemilabError:
        w2 = float("inf")
    Ts = [args.T * 2**k for k in range(6)]
    decay = vnorm_decay(op, complex(max(1.0, w2 + 0.5)), Ts, panels=args.panels)
    _csv(os.path.join(out, "vnorm_decay.csv"), "T,V_norm",
         list(zip(Ts, decay)))
    report = {"s_A": verdict.s_A, "uniform_bound": verdict.uniform_bound,
              "singular_betas": verdict.singular_betas,
              "M_hat": est.M_hat, "omega1": w1, "omega2": w2,
              "omega": max(w1, w2), "rplus_pass": verdict.passed}
    return report, bool(verdict.passed)


_RUNNERS = {
    "spectrum": run_spectrum,
    "resolvent-scan": run_resolvent_scan,
    "maxreg-estimate": run_maxreg_estimate,
    "identity-check": run_identity_check,
    "reconstruct": run_reconstruct,
    "weighted": run_weighted,
    "theta-sweep": run_theta_sweep,
    "verdict": run_verdict,
}


def build_parser():
    p = _Parser(prog="semilab",
                description="experiment runner for the semigroup laboratory")
    p.add_argument("experiment", choices=EXPERIMENTS)
    p.add_argument("--operator", required=True, help="operator description file")
    p.add_argument("--probes", default=None, help="probe description file")
    p.add_argument("--T", type=float, default=1.0)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--theta", type=float, default=None)
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--mu-grid", default=None)
    p.add_argument("--out", default=".")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--panels", type=int, default=16)
    return p


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        if args.T <= 0:
            raise _UsageError("--T must be positive")
        if not 0.0 < args.sigma <= 1.0:
            raise _UsageError("--sigma must lie in (0, 1]")
        op = load_operator(args.operator)
    except _UsageError as exc:
        print(f"semilab: error: {exc}", file=sys.stderr)
        return 1
    except (OSError, SemilabError, ValueError) as exc:
        print(f"semilab: error: {exc}", file=sys.stderr)
        return 1

    os.makedirs(args.out, exist_ok=True)
    try:
        report, ok = _RUNNERS[args.experiment](op, args, args.out)
    except _UsageError as exc:
        print(f"semilab: error: {exc}", file=sys.stderr)
        return 1
    except SingularResolvent as exc:
        print(f"semilab: error: {exc}", file=sys.stderr)
        return 1
    report["config"] = {
        "experiment": args.experiment, "operator": os.path.basename(args.operator),
        "probes": os.path.basename(args.probes) if args.probes else None,
        "T": args.T, "sigma": args.sigma, "theta": args.theta, "p": args.p,
        "mu_grid": args.mu_grid, "seed": args.seed, "panels": args.panels,
    }
    report["pass"] = bool(ok)
    _write_report(args.out, report)
    return 0 if ok else 2


if __name__ == "__main__":
    sys.exit(main())
