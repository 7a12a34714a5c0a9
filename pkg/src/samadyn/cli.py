"""Command-line entry point: run scenarios, compare controllers, validate
parameter files, or serve the live teleoperation simulator.

Exit codes: 0 success, 1 runtime failure, 2 usage error.
"""

import argparse
import json
import os
import sys
import time
from pathlib import Path

from . import __version__


def _port(text: str) -> int:
    value = int(text)
    if not (1024 <= value <= 65535):
        raise argparse.ArgumentTypeError("port must be in [1024, 65535]")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="samadyn",
        description="Suspended aerial-manipulation avatar simulator",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_params(p):
        p.add_argument("--params", default=None,
                       help="parameter file (default: $SAMADYN_PARAMS or bundled defaults)")

    run_p = sub.add_parser("run", help="run one scenario and write its log")
    run_p.add_argument("--scenario", required=True, help="scenario JSON file")
    add_params(run_p)
    run_p.add_argument("--out", default=None, help="output directory (default ./out/<timestamp>)")

    cmp_p = sub.add_parser("compare", help="run both controllers on one scenario")
    cmp_p.add_argument("--scenario", required=True, help="scenario JSON file")
    add_params(cmp_p)
    cmp_p.add_argument("--out", default=None, help="output directory (default ./out/<timestamp>)")

    val_p = sub.add_parser("validate", help="check parameter/scenario file invariants")
    add_params(val_p)
    val_p.add_argument("--scenario", default=None, help="scenario JSON file (optional)")

    srv_p = sub.add_parser("serve", help="serve the live teleoperation simulator")
    add_params(srv_p)
    srv_p.add_argument("--port", type=_port, default=8710)
    srv_p.add_argument("--host", default="127.0.0.1")

    for p in (run_p, cmp_p, val_p, srv_p):
        p.add_argument("-v", "--verbose", action="count", default=0)
    return parser


def default_params_path() -> Path:
    env = os.environ.get("SAMADYN_PARAMS")
    if env:
        return Path(env)
    return Path(__file__).resolve().parents[2] / "params" / "default.json"


def resolve_params_path(arg) -> Path:
    return Path(arg) if arg else default_params_path()


def _load_json(path):
    try:
        with open(path) as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise RuntimeError(f"{path}: invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}")
    except OSError as e:
        raise RuntimeError(f"{path}: {e.strerror}")


def _out_dir(arg) -> Path:
    out = Path(arg) if arg else Path("out") / time.strftime("%Y%m%d-%H%M%S")
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_run(args) -> int:
    from .params import params_from_dict
    from .simulate import Scenario, run_scenario

    ps = params_from_dict(_load_json(resolve_params_path(args.params)))
    scenario = Scenario.from_dict(_load_json(args.scenario))
    log = run_scenario(scenario, ps)
    out = _out_dir(args.out)
    log_path = out / f"{scenario.name}_{scenario.controller}.csv"
    log.save_csv(log_path)
    summary = log.summary()
    summary_path = out / f"{scenario.name}_{scenario.controller}_summary.json"
    with open(summary_path, "w") as f:
        json.dump({"scenario": scenario.name, "controller": scenario.controller,
                   "params_sha256": ps.sha256, "rms": summary,
                   "clamp_events": log.clamp_count()}, f, indent=2, sort_keys=True)
        f.write("\n")
    print(f"log:     {log_path}")
    print(f"summary: {summary_path}")
    for k, v in summary.items():
        print(f"  rms {k:<10} {v:.6f}")
    return 0


def cmd_compare(args) -> int:
    from .params import params_from_dict
    from .simulate import Scenario, run_comparison

    ps = params_from_dict(_load_json(resolve_params_path(args.params)))
    scenario = Scenario.from_dict(_load_json(args.scenario))
    report, log_p, log_b = run_comparison(scenario, ps)
    out = _out_dir(args.out)
    log_p.save_csv(out / f"{scenario.name}_proposed.csv")
    log_b.save_csv(out / f"{scenario.name}_baseline.csv")
    with open(out / f"{scenario.name}_report.csv", "wb") as f:
        f.write(report.to_csv_bytes())
    text = report.as_text()
    with open(out / f"{scenario.name}_report.txt", "w") as f:
        f.write(text)
    print(text, end="")
    print(f"reports in {out}")
    return 0


def cmd_validate(args) -> int:
    from .params import params_from_dict, validate_params_dict
    from .simulate import Scenario

    findings = []
    params_path = resolve_params_path(args.params)
    d = _load_json(params_path)
    findings += [f"{params_path}: {msg}" for msg in validate_params_dict(d)]
    scenario_checked = ""
    if args.scenario:
        sd = _load_json(args.scenario)
        scenario_checked = f" and {args.scenario}"
        try:
            if not findings:
                params_from_dict(d)
            Scenario.from_dict(sd)
        except (ValueError, KeyError) as e:
            findings.append(f"{args.scenario}: {e}")
    if findings:
        for msg in findings:
            print(f"finding: {msg}")
        print(f"{len(findings)} finding(s)")
        return 1
    print(f"validated {params_path}{scenario_checked}: no findings")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .params import params_from_dict
    from .service.app import create_app

    ps = params_from_dict(_load_json(resolve_params_path(args.params)))
    app = create_app(ps)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info" if args.verbose else "warning")
    return 0


COMMANDS = {"run": cmd_run, "compare": cmd_compare, "validate": cmd_validate, "serve": cmd_serve}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except RuntimeError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except (ValueError, FloatingPointError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
