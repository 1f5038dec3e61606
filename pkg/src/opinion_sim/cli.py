"""Command line scenario runner.

    opinion-sim simulate SCENARIO.json [...] [--out DIR] [--snapshots] [--audit-bounds]
                         [--seed N] [--jobs N]
    opinion-sim check SCENARIO.json [--seed N]
    opinion-sim fixtures emit NAME [--out DIR] [--n N]
    opinion-sim fixtures list

Exit codes: 0 success, 1 simulation error, 2 invalid scenario or usage.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (C1, T1, T3, ConvergenceError, check_theorem, classify_outcome,
                       consensus_bound, convex_coefficients, decay_bound_audit, polarization_bound)
from .dynamics import SignedDenominatorError, SimulationError, run, system_matrix_chain
from .fixtures import NAMES, emit_fixture
from .graph import check_structural_balance
from .scenario import Scenario, ScenarioError, load_scenario

log = logging.getLogger("opinion_sim")

EXIT_OK, EXIT_SIM, EXIT_USAGE = 0, 1, 2


def setup_logging(level=None):
    level = level or os.environ.get("OPINION_SIM_LOG", "WARNING")
    if isinstance(level, str) and level.isdigit():
        level = int(level)
    elif isinstance(level, str):
        level = level.upper()
    try:
        logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    except ValueError:
        logging.basicConfig(level=logging.WARNING)
        log.warning("ignoring unknown OPINION_SIM_LOG level %r", level)


def fmt(v) -> str:
    """Shortest decimal string that reads back to the same float."""
    return repr(float(v))


def write_csv(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")


def write_trajectory(path: Path, traj):
    n = traj.shape[1]
    write_csv(path, ["t"] + [f"x_{i + 1}" for i in range(n)],
              ([str(t)] + [fmt(v) for v in row] for t, row in enumerate(traj)))


def write_weight_curve(path: Path, s: Scenario, traj, src: int, dst: int):
    """Weight agent ``dst`` puts on ``src`` along the trajectory (1-based ids)."""
    i, j = dst - 1, src - 1
    fn = s.weights.trust_fn if s.graph.adj[i, j] > 0 else s.weights.distrust_fn
    vals = fn(i, j, np.abs(traj[:, j] - traj[:, i]))
    write_csv(path, ["t", f"f_{dst}_{src}"], ([str(t), fmt(v)] for t, v in enumerate(vals)))


def write_json(path: Path, obj):
    path.write_text(json.dumps(obj, indent=2, allow_nan=False) + "\n")


def _clean(v):
    if isinstance(v, float) and not np.isfinite(v):
        return None
    return v


def certificates(s: Scenario) -> list:
    return [check_theorem(s.graph, s.weights, s.params, s.schedule, t) for t in s.theorems]


def _cert_dict(c) -> dict:
    return {k: _clean(v) for k, v in c.to_dict().items()}


def audit_bounds(s: Scenario, traj, certs) -> list:
    out = []
    part = check_structural_balance(s.graph)
    for c in certs:
        if not c.holds or c.theorem not in (T1, C1, T3) or c.condition_value is None:
            # e.g. C1 with a zero-confidence follower has no epsilon to audit against
            continue
        if c.theorem == T3:
            chain = system_matrix_chain(s.graph, s.weights, s.schedule, s.params, traj, "degroot")
            bound, absolute = consensus_bound(c), True
        else:
            chain = system_matrix_chain(s.graph, s.weights, s.schedule, s.params, traj,
                                        "altafini-gauged", part)
            bound, absolute = polarization_bound(c), False
        blocks = [m.follower_block for m in chain]
        if len(blocks) < c.window:
            out.append({"theorem": c.theorem, "window": c.window, "bound": bound, "windows": 0,
                        "max_norm": None, "violations": 0})
            continue
        reps = decay_bound_audit(blocks, bound, c.window, absolute)
        out.append({"theorem": c.theorem, "window": c.window, "bound": bound,
                    "windows": len(reps), "max_norm": max(r.norm for r in reps),
                    "violations": sum(not r.ok for r in reps)})
    return out


def _snapshot_kind(s: Scenario, part):
    if s.rule == "degroot":
        return "degroot"
    return "altafini-gauged" if part is not None else "lifted"


def run_scenario(s: Scenario, out: Path, snapshots: bool = False, audit: bool = False) -> int:
    """Simulate ``s`` and write its artifacts into ``out``; returns an exit code."""
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    g, L = s.graph, s.graph.leader
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")  # already reported by the loader
            res = run(g, s.weights, s.schedule, s.params, s.rule, s.x0, s.tol, s.horizon)
    except SignedDenominatorError as exc:
        write_json(out / "error.json", {"scenario": s.name, "error": "signed-denominator",
                                        "message": str(exc), "agent": exc.agent + 1, "t": exc.t})
        log.error("%s: %s", s.name, exc)
        return EXIT_SIM
    except SimulationError as exc:
        write_json(out / "error.json", {"scenario": s.name, "error": "simulation",
                                        "message": str(exc)})
        log.error("%s: %s", s.name, exc)
        return EXIT_SIM

    traj = res.trajectory
    part = check_structural_balance(g)
    outcome = classify_outcome(traj, g, s.x0[L], part, s.outcome_tol)
    certs = certificates(s)
    warn = list(s.warnings)

    coeffs = None
    if s.rule == "altafini" and s.outputs.get("coefficients"):
        try:
            cc = convex_coefficients(g, s.weights, s.params, s.schedule, s.x0, s.horizon)
        except ConvergenceError as exc:
            warn.append(str(exc))
        else:
            coeffs = {str(i + 1): {"c1": float(cc.c1[i]), "c2": float(cc.c2[i])} for i in range(g.n)}
            write_csv(out / "coefficients.csv", ["agent", "c1", "c2"],
                      ([str(i + 1), fmt(cc.c1[i]), fmt(cc.c2[i])] for i in range(g.n)))

    if s.outputs.get("trajectory", True):
        write_trajectory(out / "trajectory.csv", traj)
    for src, dst in s.outputs.get("weights", []):
        write_weight_curve(out / f"weights_{src}_{dst}.csv", s, traj, src, dst)

    if snapshots:
        kind = _snapshot_kind(s, part)
        chain = system_matrix_chain(g, s.weights, s.schedule, s.params, traj, kind, part)
        np.savez_compressed(out / "snapshots.npz", kind=np.array(kind),
                            matrices=np.array([m.matrix for m in chain]))

    summary = {
        "scenario": s.name,
        "rule": s.rule,
        "n": g.n,
        "leader": L + 1,
        "seeds": s.seeds,
        "steps": res.steps,
        "converged": res.converged,
        "residual": res.residual,
        "outcome": {
            "kind": outcome.kind,
            "value": outcome.value,
            "tolerance": s.outcome_tol,
            "partition": None if outcome.partition is None else {
                "set1": sorted(i + 1 for i in outcome.partition.set1),
                "set2": sorted(i + 1 for i in outcome.partition.set2)},
        },
        "final_opinions": {str(i + 1): float(v) for i, v in enumerate(res.x)},
        "certificates": [_cert_dict(c) for c in certs],
        "coefficients": coeffs,
        "warnings": warn,
        "notes": list(s.notes),
    }
    if audit:
        summary["audit"] = audit_bounds(s, traj, certs)
    write_json(out / "summary.json", summary)
    # wall time lives apart from the summary so that the summary stays byte-reproducible
    write_json(out / "timing.json", {"scenario": s.name, "wall_time_s": time.perf_counter() - t0})
    log.info("%s: %s after %d steps -> %s", s.name, outcome.kind, res.steps, out)
    return EXIT_OK


def _error(out: Path | None, message: str, errors=()) -> int:
    print(f"error: {message}", file=sys.stderr)
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        write_json(out / "error.json", {"error": "invalid-scenario", "message": message,
                                        "details": list(errors)})
    return EXIT_USAGE


def _simulate_one(path: str, out: Path | None, seed, snapshots, audit) -> int:
    setup_logging()
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            s = load_scenario(path, seed)
    except ScenarioError as exc:
        return _error(out, str(exc), exc.errors)
    for w in s.warnings:
        log.warning("%s: %s", s.name, w)
    out = out if out is not None else Path("results") / s.name
    return run_scenario(s, out, snapshots, audit)


def cmd_simulate(args) -> int:
    paths = args.scenario
    if len(paths) == 1:
        out = Path(args.out) if args.out else None
        return _simulate_one(paths[0], out, args.seed, args.snapshots, args.audit_bounds)
    base = Path(args.out or "results")
    outs = [base / Path(p).stem for p in paths]
    if len(set(outs)) != len(outs):
        return _error(None, "scenario file names must be distinct in batch mode")
    jobs = max(1, args.jobs)
    call = [(p, o, args.seed, args.snapshots, args.audit_bounds) for p, o in zip(paths, outs)]
    if jobs == 1:
        codes = [_simulate_one(*c) for c in call]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            codes = list(ex.map(_simulate_one, *zip(*call)))
    return max(codes)


def cmd_check(args) -> int:
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            s = load_scenario(args.scenario, args.seed)
    except ScenarioError as exc:
        return _error(None, str(exc), exc.errors)
    report = {"scenario": s.name, "rule": s.rule,
              "certificates": [_cert_dict(c) for c in certificates(s)],
              "warnings": s.warnings, "notes": s.notes}
    text = json.dumps(report, indent=2, allow_nan=False)
    if args.out:
        Path(args.out).mkdir(parents=True, exist_ok=True)
        (Path(args.out) / "check.json").write_text(text + "\n")
    print(text)
    return EXIT_OK


def cmd_fixtures(args) -> int:
    if args.action == "list":
        print("\n".join(NAMES))
        return EXIT_OK
    if not args.name:
        return _error(None, "fixtures emit needs a fixture name")
    try:
        edges, scen = emit_fixture(args.name, args.out, args.n)
    except (KeyError, ValueError) as exc:
        return _error(None, exc.args[0])
    print(edges)
    print(scen)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="opinion-sim",
                                description="Leader-follower opinion dynamics on signed networks")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("simulate", help="run scenarios and write trajectory/summary files")
    sp.add_argument("scenario", nargs="+")
    sp.add_argument("--out", help="output directory (one subdirectory per scenario in batch mode)")
    sp.add_argument("--snapshots", action="store_true", help="also save per-step system matrices")
    sp.add_argument("--audit-bounds", action="store_true",
                    help="check every window product against the certificate bound")
    sp.add_argument("--seed", type=int, help="override every seed in the scenario")
    sp.add_argument("--jobs", type=int, default=1, help="parallel workers in batch mode")
    sp.set_defaults(func=cmd_simulate)

    cp = sub.add_parser("check", help="evaluate theorem hypotheses without simulating")
    cp.add_argument("scenario")
    cp.add_argument("--seed", type=int)
    cp.add_argument("--out")
    cp.set_defaults(func=cmd_check)

    fp = sub.add_parser("fixtures", help="write bundled networks and scenarios")
    fp.add_argument("action", choices=("emit", "list"))
    fp.add_argument("name", nargs="?")
    fp.add_argument("--out", default=".")
    fp.add_argument("--n", type=int, default=5, help="size for star_n")
    fp.set_defaults(func=cmd_fixtures)
    return p


def main(argv=None) -> int:
    setup_logging()
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
