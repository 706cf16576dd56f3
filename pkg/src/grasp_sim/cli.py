"""Command line interface.

    grasp-sim run --gripper f1 --mode primitive --trials 20 --seed 7 --out report.json
    grasp-sim run --gripper f1 --gripper baseline --object coin ...
    grasp-sim replay --log session.jsonl
    grasp-sim objects --list
    grasp-sim serve --port 8765

Exit codes: 0 success, 2 validation error, 3 simulation fault.
"""

from __future__ import annotations

import argparse
import json
import sys

from .estimator import EstimatorConfig
from .geometry import ValidationError
from .harness import TrialConfig, emit_report, run_suite
from .objects import load_suite

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_FAULT = 3

GRIPPERS = ("f1", "f1-wide", "f1-extended", "baseline")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="grasp-sim",
                                     description="Planar quasi-static grasping experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a batch of seeded trials")
    run_p.add_argument("--suite", help="object suite JSON (defaults to the bundled set)")
    run_p.add_argument("--gripper", action="append", choices=GRIPPERS,
                       help="gripper variant; repeat to compare (default: f1)")
    run_p.add_argument("--mode", choices=("primitive", "auto"), default="primitive")
    run_p.add_argument("--object", help="restrict to one object by name")
    run_p.add_argument("--trials", type=int, default=20)
    run_p.add_argument("--seed", type=int, default=0)
    run_p.add_argument("--alignment-deg", type=float, default=45.0,
                       help="half-range of the uniform initial misalignment")
    run_p.add_argument("--noise-center-mm", type=float, default=0.0,
                       help="estimator centre noise sigma (auto mode)")
    run_p.add_argument("--poses", help="external grasp-pose file (auto mode)")
    run_p.add_argument("--out", help="report path (.json or .csv by --format)")
    run_p.add_argument("--format", choices=("json", "csv"), default="json")

    replay_p = sub.add_parser("replay", help="replay a recorded session or trajectory log")
    replay_p.add_argument("--log", required=True)

    obj_p = sub.add_parser("objects", help="inspect the object suite")
    obj_p.add_argument("--suite")
    obj_p.add_argument("--list", action="store_true")

    serve_p = sub.add_parser("serve", help="start the teleoperation server")
    serve_p.add_argument("--host", default="127.0.0.1")
    serve_p.add_argument("--port", type=int, default=8765)

    return parser


def cmd_run(args) -> int:
    grippers = args.gripper or ["f1"]
    estimator = EstimatorConfig(noise_sigma_center=args.noise_center_mm * 1e-3,
                                seed=args.seed)
    configs = [
        TrialConfig(
            gripper=g,
            object_name=args.object,
            mode=args.mode,
            n_trials=args.trials,
            seed=args.seed,
            alignment_error_deg=(-args.alignment_deg, args.alignment_deg),
            estimator=estimator,
            suite_path=args.suite,
            external_poses_path=args.poses,
        )
        for g in grippers
    ]
    report = run_suite(configs)
    faults = sum(1 for row in report["trials"] if row["fault"])
    for suite in report["suites"]:
        agg = suite["aggregate"]
        print(f"{suite['gripper']:>9s} {suite['mode']:>9s}: "
              f"success {agg['successes']}/{agg['n_trials']} = {agg['success_rate']:.3f}  "
              f"median peak table force {agg['peak_table_force_median']:.2f} N")
    for name, comp in report.get("comparisons", {}).items():
        print(f"{name}: force median ratio {comp['force_median_ratio']}, "
              f"success delta {comp['success_rate_delta']:+.3f}")
    if args.out:
        emit_report(report, args.out, args.format)
        print(f"report written to {args.out}")
    return EXIT_FAULT if faults else EXIT_OK


def cmd_replay(args) -> int:
    with open(args.log, "r", encoding="utf-8") as fh:
        first = json.loads(fh.readline())
    kind = first.get("kind")
    if kind == "session_log":
        from .teleop import replay_session

        frames, state, diverged = replay_session(args.log)
        print(f"replayed {len(frames)} ticks; final phase {state.phase}")
        if state.result is not None:
            print(json.dumps(
                {"success": state.result.success,
                 "peak_table_force": round(state.result.peak_table_force, 4),
                 "classification": state.result.classification},
                sort_keys=True))
        if diverged:
            print(f"DIVERGENCE at ticks {diverged[:10]}{'...' if len(diverged) > 10 else ''}")
            return EXIT_FAULT
        return EXIT_OK
    if kind == "trajectory":
        from .controller import read_trajectory

        header, records = read_trajectory(args.log)
        peak = max((r["table_force"] for r in records), default=0.0)
        print(f"trajectory: {len(records)} steps, peak table force {peak:.2f} N, "
              f"faults {sum(1 for r in records if r['fault'])}")
        return EXIT_OK
    raise ValidationError(f"unknown log kind {kind!r}")


def cmd_objects(args) -> int:
    entries = load_suite(args.suite)
    for e in entries:
        mark = " auto" if e.autonomous else ""
        print(f"{e.index:3d} {e.model.name:18s} {e.model.width * 1000:6.1f} x "
              f"{e.model.height * 1000:6.1f} mm  {e.model.mass * 1000:6.0f} g  "
              f"[{e.dims_source}]{mark}")
    return EXIT_OK


def cmd_serve(args) -> int:
    from .server import serve

    serve(host=args.host, port=args.port)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return cmd_run(args)
        if args.command == "replay":
            return cmd_replay(args)
        if args.command == "objects":
            return cmd_objects(args)
        if args.command == "serve":
            return cmd_serve(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
