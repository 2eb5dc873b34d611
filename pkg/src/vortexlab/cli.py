"""Command-line front end: ``vortexlab <subcommand> --config FILE [options]``."""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .config import ScenarioConfig, build_model, build_settings, parse_config, parse_dict
from .core import Domain, VortexSystem
from .diagnostics import poincare_section
from .errors import ConfigError, InvalidState, SingularApproach, StepUnderflow, VortexLabError
from .halfplane import (
    ReducedDipoleOrbitParams,
    ReducedGenericOrbitParams,
    orbit_residual_dipole,
    orbit_residual_generic,
    restricted3_h0,
)
from .integrate import integrate, monitor_invariants
from .quadrant import trajectory_constant
from .rings import green_oracle_suite

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_VALIDATION = 2
EXIT_INTEGRATION = 3
EXIT_IO = 4
EXIT_EVENT_STOP = 5


# ---------------------------------------------------------------------------
# file output


def write_trajectory_csv(path, traj, labels) -> None:
    names = ["t", *labels, *traj.invariants.keys()]
    cols = [traj.times[:, None], traj.states, *(v[:, None] for v in traj.invariants.values())]
    data = np.hstack(cols) if len(traj) else np.empty((0, len(names)))
    np.savetxt(path, data, delimiter=",", header=",".join(names), comments="", fmt="%.17g")


def read_trajectory_csv(path) -> tuple[list[str], np.ndarray]:
    with open(path) as fh:
        header = fh.readline().strip().split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return header, data


def _write_run(out: Path, cfg: ScenarioConfig, model, traj, settings) -> None:
    out.mkdir(parents=True, exist_ok=True)
    write_trajectory_csv(out / cfg.output_name("trajectory"), traj, model.labels)
    report = monitor_invariants(model, traj, settings).to_dict()
    report.update({
        "model": cfg.model,
        "status": traj.status,
        "samples": len(traj),
        "t_final": float(traj.times[-1]),
        "stop_event": traj.stop_event.to_dict() if traj.stop_event else None,
    })
    (out / cfg.output_name("drift")).write_text(json.dumps(report, indent=2) + "\n")
    with open(out / cfg.output_name("events"), "w") as fh:
        for ev in traj.events:
            fh.write(json.dumps(ev.to_dict()) + "\n")


# ---------------------------------------------------------------------------
# runs


def run_scenario(cfg: ScenarioConfig, out, t_end=None, rel_tol=None) -> int:
    """Integrate one scenario and write its outputs. Returns an exit code."""
    out = Path(out)
    model = build_model(cfg)
    settings = build_settings(cfg, t_end=t_end, rel_tol=rel_tol)
    try:
        traj = integrate(model, settings=settings)
    except StepUnderflow as e:
        if e.trajectory is not None:
            _write_run(out, cfg, model, e.trajectory, settings)
        print(f"integration failed: {e}", file=sys.stderr)
        return EXIT_INTEGRATION
    _write_run(out, cfg, model, traj, settings)
    if traj.status == "event_stop":
        ev = traj.stop_event
        print(f"stopped by {ev.kind} at t={ev.time:.17g}")
        return EXIT_EVENT_STOP
    return EXIT_OK


def run_poincare(cfg: ScenarioConfig, out, rel_tol=None, epsilons=None) -> int:
    if cfg.model != "restricted3":
        raise ConfigError("poincare needs a restricted3 scenario")
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    r3 = cfg.restricted3
    pc = cfg.poincare or {}
    n_periods = int(pc.get("n_periods", 50))
    eps_list = epsilons if epsilons is not None else pc.get("epsilons", [r3.get("epsilon", 0.0)])
    starts = pc.get("initial_points", [[r3["x"], r3["y"]]])
    settings = build_settings(cfg, rel_tol=rel_tol)
    ev = cfg.events
    name = cfg.output_name("section")
    stem, suffix = os.path.splitext(name)
    status = EXIT_OK
    summary = []
    for eps in eps_list:
        base = build_model(cfg, epsilon=eps).state
        rows = []
        path = out / (name if len(eps_list) == 1 else f"{stem}_eps{eps:g}{suffix}")
        for orbit, (x0, y0) in enumerate(starts):
            st = base.moved(x0, y0)
            h00 = restricted3_h0(x0, y0, st.omega0)
            note = "ok"
            try:
                pts = poincare_section(st, n_periods, settings, ev.get("escape_radius", 10.0),
                                       ev.get("singular_radius", 1e-3))
            except SingularApproach as e:
                pts, note = e.points, "singular_approach"
                status = EXIT_INTEGRATION
            if len(pts) < n_periods and note == "ok":
                note = "escaped"
            for k, (x, y) in enumerate(pts, start=1):
                h0 = restricted3_h0(x, y, st.omega0)
                rows.append((orbit, k, x, y, h0, h0 - h00))
            dh = max((abs(r[5]) for r in rows if r[0] == orbit), default=0.0)
            summary.append({"epsilon": eps, "orbit": orbit, "points": len(pts),
                            "max_abs_dH0": dh, "status": note})
            print(f"epsilon={eps:g} orbit={orbit} points={len(pts)} max|dH0|={dh:.3e} {note}")
        arr = np.array(rows, dtype=float).reshape(-1, 6)
        np.savetxt(path, arr, delimiter=",", header="orbit,k,x,y,H0,dH0", comments="",
                   fmt=["%d", "%d", "%.17g", "%.17g", "%.17g", "%.17g"])
    (out / "section_summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    return status


def orbit_check(cfg: ScenarioConfig, traj_path, threshold=1e-6) -> tuple[int, float]:
    """Largest reduced-orbit residual along a trajectory CSV, relative to its conserved level."""
    header, data = read_trajectory_csv(traj_path)
    if data.shape[0] == 0:
        raise ConfigError(f"{traj_path}: trajectory is empty")
    col = {name: i for i, name in enumerate(header)}
    if cfg.model == "quadrant":
        xs, ys = data[:, col["x"]], data[:, col["y"]]
        c0 = trajectory_constant(xs[0], ys[0])
        worst = max(abs(trajectory_constant(x, y) - c0) / c0 for x, y in zip(xs, ys))
    elif cfg.model == "halfplane" and len(cfg.strengths) == 2:
        x1, y1, x2, y2 = (data[:, col[k]] for k in ("x1", "y1", "x2", "y2"))
        s0 = VortexSystem(cfg.strengths, [[x1[0], y1[0]], [x2[0], y2[0]]], Domain.HALFPLANE)
        g1, g2 = cfg.strengths
        if g1 == 1.0 and g2 == -1.0:
            p = ReducedDipoleOrbitParams.from_state(s0)
            worst = max(abs(orbit_residual_dipole(a - c, 0.5 * (b + d), p)) / p.C
                        for a, b, c, d in zip(x1, y1, x2, y2))
        elif g1 + g2 != 0:
            p = ReducedGenericOrbitParams.from_state(s0)
            ref = math.exp(2.0 * math.pi * p.E)
            worst = max(abs(orbit_residual_generic(a - c, b - d, p)) / ref
                        for a, b, c, d in zip(x1, y1, x2, y2))
        else:
            raise ConfigError("strengths: only (1, -1) dipoles or pairs with nonzero total have an orbit equation")
    else:
        raise ConfigError(f"model: no orbit equation for {cfg.model!r} with this arity")
    print(f"max residual: {worst:.6e}")
    return (EXIT_OK if worst < threshold else EXIT_CHECK_FAILED), worst


def _sweep_job(args) -> int:
    data, out, t_end, tol = args
    cfg = parse_dict(data)
    if cfg.model == "restricted3" and cfg.poincare is not None:
        return run_poincare(cfg, out, rel_tol=tol, epsilons=[cfg.restricted3.get("epsilon", 0.0)])
    return run_scenario(cfg, out, t_end=t_end, rel_tol=tol)


def run_sweep(cfg: ScenarioConfig, out, t_end=None, tol=None, workers=None) -> int:
    if cfg.sweep is None:
        raise ConfigError("sweep: block missing from config")
    out = Path(out)
    param, values = cfg.sweep["parameter"], cfg.sweep["values"]
    jobs, index = [], []
    for i, v in enumerate(values):
        sub = cfg.with_parameter(param, v)
        sub.sweep = None
        d = out / f"run_{i:03d}"
        jobs.append((sub.to_dict(), str(d), t_end, tol))
        index.append({"run": d.name, "parameter": param, "value": v})
    out.mkdir(parents=True, exist_ok=True)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        codes = list(pool.map(_sweep_job, jobs))
    for entry, code in zip(index, codes):
        entry["exit_code"] = code
    (out / "sweep.json").write_text(json.dumps(index, indent=2) + "\n")
    bad = [c for c in codes if c != EXIT_OK]
    return bad[0] if bad else EXIT_OK


def run_oracle(n: int, seed: int, out=None) -> int:
    res = green_oracle_suite(n, seed)
    print(f"green: {n} samples, max relative difference fast vs quadrature {res['max_rel_diff']:.3e}")
    print(f"gradient: max relative error vs finite differences {res['max_grad_fd_err']:.3e}")
    if out is not None:
        Path(out).mkdir(parents=True, exist_ok=True)
        (Path(out) / "oracle.json").write_text(json.dumps({"n": n, "seed": seed, **res}, indent=2) + "\n")
    ok = res["max_rel_diff"] < 1e-9 and res["max_grad_fd_err"] < 1e-6
    return EXIT_OK if ok else EXIT_CHECK_FAILED


# ---------------------------------------------------------------------------
# argument handling


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="vortexlab", description="Point-vortex, ring and membrane laboratory.")
    sub = p.add_subparsers(dest="command", required=True, metavar="subcommand")

    def common(sp, config_required=True):
        sp.add_argument("--config", required=config_required, help="JSON scenario file")
        sp.add_argument("--out", default=".", help="output directory (default: current)")
        sp.add_argument("--seed", type=int, default=0, help="seed for randomized suites (default 0)")
        sp.add_argument("--t-end", type=float, default=None, help="override the integration horizon")
        sp.add_argument("--tol", type=float, default=None, help="override rel_tol (abs_tol follows at 1e-2 x)")

    common(sub.add_parser("simulate", help="integrate a scenario"))
    oc = sub.add_parser("orbit-check", help="check reduced-orbit residuals along a trajectory CSV")
    common(oc)
    oc.add_argument("--trajectory", default=None, help="trajectory CSV (default: OUT/trajectory.csv)")
    oc.add_argument("--threshold", type=float, default=1e-6)
    pc = sub.add_parser("poincare", help="stroboscopic sections of the restricted three-vortex system")
    common(pc)
    pc.add_argument("--epsilon", type=float, action="append", default=None,
                    help="perturbation strength; repeat for several (default: from config)")
    sw = sub.add_parser("sweep", help="run a scenario over a parameter grid in parallel")
    common(sw)
    sw.add_argument("--workers", type=int, default=None)
    orc = sub.add_parser("oracle", help="compare fast and quadrature ring Green functions")
    common(orc, config_required=False)
    orc.add_argument("--samples", type=int, default=10_000)
    return p


def _load(path) -> ScenarioConfig:
    return parse_config(Path(path).read_text())


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    for name in ("t_end", "tol"):
        v = getattr(args, name)
        if v is not None and not (math.isfinite(v) and (v > 0 or (name == "t_end" and v == 0))):
            print(f"error: --{name.replace('_', '-')} must be {'non-negative' if name == 't_end' else 'positive'}",
                  file=sys.stderr)
            return EXIT_VALIDATION
    try:
        if args.command == "oracle":
            if args.samples < 1:
                raise ConfigError("--samples must be positive")
            return run_oracle(args.samples, args.seed, args.out)
        cfg = _load(args.config)
        if args.command == "simulate":
            return run_scenario(cfg, args.out, t_end=args.t_end, rel_tol=args.tol)
        if args.command == "orbit-check":
            path = args.trajectory or Path(args.out) / cfg.output_name("trajectory")
            return orbit_check(cfg, path, args.threshold)[0]
        if args.command == "poincare":
            return run_poincare(cfg, args.out, rel_tol=args.tol, epsilons=args.epsilon)
        if args.command == "sweep":
            return run_sweep(cfg, args.out, args.t_end, args.tol, args.workers)
    except (ConfigError, InvalidState) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO
    except VortexLabError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INTEGRATION
    return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
