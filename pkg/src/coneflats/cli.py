"""Thin command-line client for the pipeline.

Subcommands: build, verify, export, info.  By default the commands drive
the library in-process; with --server URL they post the same config to a
running service and write whatever files come back.  Every number printed
comes from a library operation (the CLI never recomputes).

Exit codes: 0 success, 2 configuration/usage error, 3 verification failure,
4 numerical degeneracy beyond the masked-point budget.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import PipelineConfig, load_config
from .errors import (
    ConeflatsError,
    ConfigError,
    CurvatureDegenerate,
    DegenerateCongruence,
    DegenerateLine,
    DegenerateMetric,
    MaskedPointError,
    ProjectionSingular,
)
from .pipeline import pipeline_info, run_build, run_export, run_verify
from .report import EXIT_CONFIG, EXIT_DEGENERACY, EXIT_VERIFY

DEGENERACY_ERRORS = (
    MaskedPointError,
    DegenerateLine,
    DegenerateMetric,
    DegenerateCongruence,
    CurvatureDegenerate,
    ProjectionSingular,
)


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coneflats",
        description="Build, certify and export conformally flat immersions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in (
        ("build", "compute immersion grids and write artifacts"),
        ("verify", "run the certification battery and write the report"),
        ("export", "emit the grid CSV and OBJ slice from built artifacts"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--config", type=Path, default=None,
                       help="YAML configuration file (defaults apply if omitted)")
        p.add_argument("--seed", type=int, default=None, help="override the global seed")
        p.add_argument("--parallel", type=int, default=None,
                       help="worker count for independent certification sweeps")
        p.add_argument("--out", type=Path, default=Path("."), help="output directory")
        p.add_argument("--server", type=str, default=None,
                       help="base URL of a running service to delegate to")
    sub.add_parser("info", help="print version, defaults and exit codes")
    return parser


def _load(args) -> PipelineConfig:
    cfg = load_config(args.config) if args.config else PipelineConfig()
    if args.seed is not None:
        cfg = cfg.model_copy(update={"seed": args.seed})
    if args.parallel is not None:
        if args.parallel < 1:
            raise ConfigError("--parallel must be >= 1")
        cfg = cfg.model_copy(update={"parallel": args.parallel})
    return cfg


def _write_files(outdir: Path, files: dict[str, str]) -> None:
    outdir.mkdir(parents=True, exist_ok=True)
    for name, content in files.items():
        path = outdir / name
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(content, encoding="utf-8")
        print(f"wrote {path}")


def _post(server: str, route: str, payload: dict) -> dict:
    import httpx

    response = httpx.post(server.rstrip("/") + route, json=payload, timeout=600.0)
    if response.status_code != 200:
        raise ConeflatsError(f"service error {response.status_code}: {response.text}")
    return response.json()


def cmd_build(args) -> int:
    cfg = _load(args)
    if args.server:
        data = _post(args.server, "/build", {"config": json.loads(cfg.model_dump_json())})
        files = data["files"]
    else:
        files = run_build(cfg)
    _write_files(args.out, files)
    return 0


def cmd_verify(args) -> int:
    cfg = _load(args)
    if args.server:
        data = _post(args.server, "/verify", {"config": json.loads(cfg.model_dump_json())})
        files = {cfg.outputs.report: data["report_json"],
                 cfg.outputs.report_text: data["report_text"]}
        _write_files(args.out, files)
        print(data["report_text"], end="")
        return int(data["exit_code"])
    report = run_verify(cfg)
    _write_files(args.out, {cfg.outputs.report: report.to_json(),
                            cfg.outputs.report_text: report.to_text()})
    print(report.to_text(), end="")
    return report.exit_code


def cmd_export(args) -> int:
    cfg = _load(args)
    if args.server:
        data = _post(args.server, "/export", {"config": json.loads(cfg.model_dump_json())})
        _write_files(args.out, data["files"])
        return 0
    artifacts = {}
    for name in ("immersion.csv", "manifest.json"):
        path = args.out / name
        if not path.exists():
            raise ConfigError(
                f"missing build artifact {path}; run `coneflats build --out {args.out}` first"
            )
        artifacts[name] = path.read_text(encoding="utf-8")
    files = run_export(cfg, artifacts)
    _write_files(args.out, files)
    return 0


def cmd_info(_args) -> int:
    print(json.dumps(pipeline_info(), sort_keys=True, indent=2))
    return 0


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    handlers = {"build": cmd_build, "verify": cmd_verify,
                "export": cmd_export, "info": cmd_info}
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DEGENERACY_ERRORS as exc:
        point = getattr(exc, "point", None)
        where = f" at grid index {point}" if point is not None else ""
        print(f"numerical degeneracy{where}: {exc}", file=sys.stderr)
        return EXIT_DEGENERACY
    except ConeflatsError as exc:
        print(f"verification error: {exc}", file=sys.stderr)
        return EXIT_VERIFY


if __name__ == "__main__":
    sys.exit(main())
