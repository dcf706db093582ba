"""Command-line front end.

Subcommands map onto the library layers: `solve` (feasibility certificates),
`curve` (failure-probability sweeps and the repetition inset), `beam` (the
Gaussian-beam comparison), `qec` (code checks), and `verify` (test a state
file against a trajectory family).  Exit codes: 0 success/feasible,
1 infeasible or failed check, 2 usage or input error.

Angles may be given in radians ("2.356") or as exact pi fractions ("3pi/4"),
so threshold boundaries don't depend on decimal rounding.  Commands that
sample take a mandatory --seed; a fixed seed and config reproduces output
files byte for byte.  With --out DIR the primary artifacts land in DIR next
to a manifest recording the configuration; diagnostics go to stderr.
"""
from __future__ import annotations

import argparse
import datetime
import json
import math
import re
import subprocess
import sys
from pathlib import Path

import numpy as np

from . import beam, discrim, qcore, qec, solver, trajset

_ANGLE_RE = re.compile(r"^(\d+(?:\.\d+)?)?\s*\*?\s*pi(?:\s*/\s*(\d+(?:\.\d+)?))?$",
                       re.IGNORECASE)


def parse_angle(text: str) -> float:
    """Radians from '2.356', '3pi/4', 'pi/2', '0.95pi', or 'pi'."""
    s = text.strip()
    m = _ANGLE_RE.match(s)
    if m:
        num = float(m.group(1)) if m.group(1) else 1.0
        den = float(m.group(2)) if m.group(2) else 1.0
        if den == 0:
            raise ValueError(f"zero denominator in angle {text!r}")
        return num * math.pi / den
    try:
        return float(s)
    except ValueError:
        raise ValueError(f"cannot parse angle {text!r}") from None


def _family_set(family: str, n: int, m: int) -> trajset.TrajectorySet:
    if family == "sym":
        return trajset.gen_symmetric(n, m)
    if family == "cyc":
        return trajset.gen_cyclic(n, m)
    raise ValueError(f"unknown family {family!r} (expected sym or cyc)")


def _git_describe() -> str:
    try:
        out = subprocess.run(["git", "describe", "--always", "--dirty"],
                             capture_output=True, text=True, timeout=10)
        if out.returncode == 0:
            return out.stdout.strip()
    except OSError:
        pass
    return "unknown"


def _write_manifest(outdir: Path, args: argparse.Namespace) -> None:
    config = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
    manifest = {
        "command": args.command,
        "config": {k: (str(v) if isinstance(v, Path) else v) for k, v in config.items()},
        "git_describe": _git_describe(),
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
    }
    (outdir / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True))


def _emit(args, payload: str, filename: str, summary: str) -> None:
    """Route a primary artifact to --out and/or stdout per --format."""
    if args.out is not None:
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        (outdir / filename).write_text(payload)
        _write_manifest(outdir, args)
    if args.format == "json":
        print(payload)
    else:
        print(summary)


# ---------------------------------------------------------------- solve

def cmd_solve(args) -> int:
    theta = parse_angle(args.theta)
    ts = _family_set(args.family, args.n, args.m)
    problem = solver.TSProblem(ts, theta)
    # "closed" = the family's constructive route (symmetrized closed form
    # for sym, tensor composition for cyc); "lp" = the independent check
    if args.method == "both":
        cert = solver.solve(problem, method="auto")
        lp = solver.solve(problem, method="lp")
        if bool(cert.feasible) != bool(lp.feasible):
            print(f"internal disagreement: constructive={cert.feasible} "
                  f"lp={lp.feasible}", file=sys.stderr)
            return 2
        cert.detail = (cert.detail + "; " if cert.detail else "") + "lp route agrees"
    else:
        cert = solver.solve(problem, method={"closed": "auto", "lp": "lp"}[args.method])
    summary = (f"{args.family}({args.n},{args.m}) at theta={theta:.6f}: "
               f"{'feasible' if cert.feasible else 'infeasible'}"
               + (" (marginal)" if cert.marginal else ""))
    _emit(args, cert.to_json(), "certificate.json", summary)
    return 0 if cert.feasible else 1


# ---------------------------------------------------------------- curve

def cmd_curve(args) -> int:
    ts = _family_set(args.family, args.n, args.m)
    if args.inset:
        theta = parse_angle(args.theta) if args.theta else 3 * math.pi / 4
        eps = [float(e) for e in args.epsilons.split(",")]
        if any(not 0 < e < 1 for e in eps):
            raise ValueError("epsilons must lie in (0,1)")
        classical = discrim.classical_baseline(ts, theta)
        cert = discrim._best_feasible_witness(ts, theta)
        if not cert.feasible:
            raise ValueError(f"no feasible sensing state at theta={theta:.4f}")
        ens = discrim.make_ensemble(cert.witness_state, ts, theta)
        quantum = discrim.optimal_measurement(ens)
        cl = discrim.repetition_analysis(classical, eps)
        qu = discrim.repetition_analysis(quantum, eps)
        outdir = Path(args.out) if args.out else Path(".")
        outdir.mkdir(parents=True, exist_ok=True)
        path = outdir / "inset.csv"
        discrim.write_repetition_csv(path, eps, cl, qu)
        if args.out:
            _write_manifest(outdir, args)
        lines = path.read_text()
        if args.format == "csv":
            print(lines, end="")
        else:
            print(f"repetition table written to {path}")
        return 0
    lo = parse_angle(args.theta_min) if args.theta_min else 0.0
    hi = parse_angle(args.theta_max) if args.theta_max else math.pi
    if not (0.0 <= lo < hi <= math.pi):
        raise ValueError(f"theta grid [{lo:.4f}, {hi:.4f}] must sit inside [0, pi]")
    grid = np.linspace(lo, hi, args.points)
    quantum = discrim.failure_curve(ts, "solver_witness", grid)
    classical = discrim.failure_curve(ts, args.classical, grid)
    outdir = Path(args.out) if args.out else Path(".")
    outdir.mkdir(parents=True, exist_ok=True)
    path = outdir / "curve.csv"
    discrim.write_curve_csv(path, quantum, classical)
    if args.out:
        _write_manifest(outdir, args)
    if args.format == "csv":
        print(path.read_text(), end="")
    else:
        print(f"{len(grid)}-point failure curve written to {path}")
    return 0


# ----------------------------------------------------------------- beam

def cmd_beam(args) -> int:
    scenario = beam.BeamScenario(args.theta0, args.w)
    if args.mode == "quadrature":
        ent = beam.quadrature_failure(scenario, "entangled_ts")
        un = beam.quadrature_failure(scenario, "unentangled_plus")
        adv, err = un.p_fail - ent.p_fail, 0.0
    else:
        if args.seed is None:
            raise ValueError("--seed is required for --mode mc")
        ent = beam.run_beam_trials(scenario, "entangled_ts", args.trials,
                                   args.seed, exact_conditional=True)
        un = beam.run_beam_trials(scenario, "unentangled_plus", args.trials,
                                  args.seed, exact_conditional=True)
        adv, err = beam.paired_advantage(scenario, args.trials, args.seed)
    report = {
        "theta0": args.theta0, "w": args.w, "mode": args.mode,
        "trials": None if args.mode == "quadrature" else args.trials,
        "seed": args.seed,
        "p_fail_entangled": ent.p_fail, "p_fail_unentangled": un.p_fail,
        "advantage": adv, "stderr": err,
    }
    payload = json.dumps(report, indent=2, sort_keys=True)
    summary = (f"theta0={args.theta0} w={args.w}: entangled {ent.p_fail:.6f}, "
               f"unentangled {un.p_fail:.6f}, advantage {adv:.3e}"
               + (f" +/- {err:.1e}" if err else ""))
    _emit(args, payload, "beam.json", summary)
    return 0


# ------------------------------------------------------------------ qec

def cmd_qec(args) -> int:
    checks: dict[str, dict] = {}
    if args.check in ("window", "all"):
        state = qec.window_code_state()
        stab = qec.stabilizer_check(state, qec.window_code_group())
        built = solver.build_cyclic(4, 2, math.pi / 2).witness_state
        ch = qec.ErrorChannel.from_trajectory_set(trajset.gen_cyclic(4, 2), math.pi / 2)
        kl = qec.kl_verify(state, ch)
        checks["window"] = {
            "stabilized": stab.all_plus_one,
            "matches_builder": qcore.equal_up_to_phase(built, state),
            "kl_verdict": kl.verdict,
            "passed": (stab.all_plus_one
                       and qcore.equal_up_to_phase(built, state)
                       and kl.verdict == "discriminating code"),
        }
    if args.check in ("steane", "all"):
        good = qec.transversal_rotation_check(math.pi / 2)
        control = qec.transversal_rotation_check(math.pi / 3)
        checks["steane"] = {
            "quarter_turn": json.loads(good.to_json()),
            "negative_control_fails": not control.passed,
            "passed": good.passed and not control.passed,
        }
    if not checks:
        raise ValueError(f"unknown check {args.check!r}")
    passed = all(c["passed"] for c in checks.values())
    payload = json.dumps({"checks": checks, "passed": passed},
                         indent=2, sort_keys=True)
    _emit(args, payload, "qec.json",
          f"qec {args.check}: {'pass' if passed else 'FAIL'}")
    return 0 if passed else 1


# --------------------------------------------------------------- verify

def cmd_verify(args) -> int:
    theta = parse_angle(args.theta)
    path = Path(args.state)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ValueError(f"cannot read state file {path}: {exc}") from None
    try:
        psi = qcore.ket_from_json(text)
    except (json.JSONDecodeError, KeyError, ValueError, TypeError) as exc:
        raise ValueError(f"malformed state file {path}: {exc}") from None
    ts = _family_set(args.family, args.n, args.m)
    if psi.n != ts.n:
        raise ValueError(f"state has {psi.n} qubits but family needs {ts.n}")
    rep = discrim.verify_ts(psi, ts, theta)
    payload = json.dumps(rep.to_dict(), indent=2, sort_keys=True)
    summary = (f"{path.name} vs {args.family}({args.n},{args.m}) at "
               f"theta={theta:.6f}: "
               + ("TS state" if rep.is_ts else
                  f"not a TS state (residual {rep.max_residual:.3e})"))
    _emit(args, payload, "verify.json", summary)
    return 0 if rep.is_ts else 1


# ----------------------------------------------------------------- main

def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="trajsense",
                                description="trajectory-sensing toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--out", default=None, help="directory for artifacts")
        sp.add_argument("--format", default="text",
                        choices=["text", "json", "csv"])

    sp = sub.add_parser("solve", help="feasibility certificate for a family")
    sp.add_argument("--family", required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--theta", required=True)
    sp.add_argument("--method", default="both", choices=["closed", "lp", "both"])
    common(sp)
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("curve", help="failure-probability sweep or inset table")
    sp.add_argument("--family", default="sym")
    sp.add_argument("--n", type=int, default=4)
    sp.add_argument("--m", type=int, default=2)
    sp.add_argument("--theta-min", default=None)
    sp.add_argument("--theta-max", default=None)
    sp.add_argument("--points", type=int, default=25)
    sp.add_argument("--classical", default="classical_plus",
                    choices=["classical_plus", "classical_best"])
    sp.add_argument("--inset", action="store_true",
                    help="emit repetition counts instead of the curve")
    sp.add_argument("--theta", default=None, help="inset angle")
    sp.add_argument("--epsilons", default="1e-1,1e-2,1e-3,1e-4")
    common(sp)
    sp.set_defaults(func=cmd_curve)

    sp = sub.add_parser("beam", help="entangled vs unentangled beam sensing")
    sp.add_argument("--theta0", type=float, required=True)
    sp.add_argument("--w", type=float, required=True)
    sp.add_argument("--mode", default="quadrature", choices=["quadrature", "mc"])
    sp.add_argument("--trials", type=int, default=100_000)
    sp.add_argument("--seed", type=int, default=None)
    common(sp)
    sp.set_defaults(func=cmd_beam)

    sp = sub.add_parser("qec", help="stabilizer and transversality checks")
    sp.add_argument("--check", default="all", choices=["window", "steane", "all"])
    common(sp)
    sp.set_defaults(func=cmd_qec)

    sp = sub.add_parser("verify", help="test a state file against a family")
    sp.add_argument("--state", required=True)
    sp.add_argument("--family", required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--theta", required=True)
    common(sp)
    sp.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
