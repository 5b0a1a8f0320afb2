"""Command-line interface.

Subcommands:
  run      generate parameter sets, render and write configs, write the
           mapping, dispatch one job per set, and write a run summary
  preview  show what a sweep would run, touching no files
  collect  harvest per-simulation outputs into a CSV plus a report

Exit codes: 0 success; 1 validation or usage error; 2 dispatch/scheduler
failure; 3 one or more local simulations failed; 4 collection incomplete.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from . import __version__
from .collect import collect_scalars, export_csv
from .dispatch import (
    DISPATCHER_KINDS,
    DispatcherConfig,
    JobSpec,
    batch_script_path,
    dispatch_all,
)
from .errors import (
    OutputConflictError,
    SchedulerError,
    SweepRunError,
    UnfilledPlaceholderError,
)
from .mapping import build_mapping, read_mapping, serialize
from .naming import NamerConfig, make_namer
from .sweeps import (
    CartesianSweep,
    Choice,
    FilteredCartesianSweep,
    IntegerUniform,
    LogUniform,
    Normal,
    RandomSweep,
    SetSweep,
    Sweep,
    Uniform,
    linspace,
)
from .templates import extract_placeholders, format_value, render, unused_parameters

SUMMARY_SCHEMA = "sweep-summary/1"
REPORT_SCHEMA = "sweep-collect-report/1"


class _UsageError(Exception):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    # argparse exits 2 on bad arguments; this tool reserves 2 for dispatch
    # failures, so surface usage problems as exit 1 instead.
    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


# ---------------------------------------------------------------------------
# sweep-spec file


def _spec_error(message: str) -> ValueError:
    return ValueError(f"sweep spec: {message}")


def _values_from_spec(name: str, spec) -> list:
    if isinstance(spec, list):
        return spec
    if isinstance(spec, dict):
        if "linspace" in spec:
            args = spec["linspace"]
            if not (isinstance(args, list) and len(args) == 3):
                raise _spec_error(f"parameter {name!r}: linspace needs [start, stop, count]")
            start, stop, count = args
            if isinstance(count, float) and count.is_integer():
                count = int(count)
            return linspace(start, stop, count)
        if "values" in spec:
            values = spec["values"]
            if not isinstance(values, list):
                raise _spec_error(f"parameter {name!r}: values must be a list")
            return values
        raise _spec_error(f"parameter {name!r}: expected a value list, 'values', or 'linspace'")
    raise _spec_error(f"parameter {name!r}: expected a value list, 'values', or 'linspace'")


_DISTRIBUTION_BUILDERS = {
    "uniform": (Uniform, 2, "[low, high]"),
    "log_uniform": (LogUniform, 2, "[low, high]"),
    "normal": (Normal, 2, "[mean, stddev]"),
    "int_uniform": (IntegerUniform, 2, "[low, high]"),
}


def _distribution_from_spec(name: str, spec):
    if not (isinstance(spec, dict) and len(spec) == 1):
        raise _spec_error(
            f"parameter {name!r}: a distribution is a one-key object like "
            '{"uniform": [0, 1]}'
        )
    tag, args = next(iter(spec.items()))
    if tag == "choice":
        if not (isinstance(args, list) and args):
            raise _spec_error(f"parameter {name!r}: choice needs a non-empty option list")
        return Choice(args)
    if tag not in _DISTRIBUTION_BUILDERS:
        known = ", ".join(sorted([*_DISTRIBUTION_BUILDERS, "choice"]))
        raise _spec_error(f"parameter {name!r}: unknown distribution {tag!r} (known: {known})")
    builder, arity, shape = _DISTRIBUTION_BUILDERS[tag]
    if not (isinstance(args, list) and len(args) == arity):
        raise _spec_error(f"parameter {name!r}: {tag} needs {shape}")
    return builder(*args)


def load_sweep_spec(path: Path | str, seed_override: int | None = None) -> Sweep:
    """Build a sweep from a JSON sweep-spec file."""
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise _spec_error(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise _spec_error("top level must be an object")
    sweep_type = doc.get("type")

    if sweep_type in ("cartesian", "filtered_cartesian", "filtered-cartesian"):
        parameters = doc.get("parameters")
        if not isinstance(parameters, dict) or not parameters:
            raise _spec_error("cartesian sweeps need a non-empty 'parameters' object")
        values = {name: _values_from_spec(name, spec) for name, spec in parameters.items()}
        filter_source = doc.get("filter")
        if sweep_type != "cartesian" and filter_source is None:
            raise _spec_error(f"{sweep_type} sweeps need a 'filter'")
        if filter_source is None:
            return CartesianSweep(values)
        if not isinstance(filter_source, str):
            raise _spec_error("'filter' must be text")
        return FilteredCartesianSweep(values, filter=filter_source)

    if sweep_type == "set":
        sets = doc.get("sets")
        if not isinstance(sets, list) or not sets:
            raise _spec_error("set sweeps need a non-empty 'sets' list")
        for i, entry in enumerate(sets):
            if not isinstance(entry, dict):
                raise _spec_error(f"sets[{i}] must be an object of name: value pairs")
        return SetSweep(sets)

    if sweep_type == "random":
        count = doc.get("count")
        distributions = doc.get("distributions")
        if not isinstance(distributions, dict) or not distributions:
            raise _spec_error("random sweeps need a non-empty 'distributions' object")
        seed = seed_override if seed_override is not None else doc.get("seed")
        if seed is None:
            raise _spec_error("random sweeps need a 'seed' (or pass --seed)")
        dists = {
            name: _distribution_from_spec(name, spec) for name, spec in distributions.items()
        }
        return RandomSweep(count=count, distributions=dists, seed=seed)

    raise _spec_error(
        f"unknown sweep type {sweep_type!r} (expected cartesian, set, or random)"
    )


# ---------------------------------------------------------------------------
# run


def _require_sim_id(pattern: str, what: str):
    if "sim_id" not in extract_placeholders(pattern):
        raise _UsageError(f"{what} must contain the {{sim_id}} placeholder: {pattern!r}")


def _build_summary(name: str, kind: str, records) -> dict:
    counts = {
        "total": len(records),
        "succeeded": sum(r.succeeded for r in records),
        "failed": sum(r.failed for r in records),
        "submitted": sum(r.status == "submitted" for r in records),
        "dry_run": sum(r.status == "dry_run" for r in records),
    }
    return {
        "schema": SUMMARY_SCHEMA,
        "sweep_name": name,
        "dispatcher": kind,
        "counts": counts,
        "jobs": [r.to_dict() for r in records],
    }


def _cmd_run(args) -> int:
    if len(args.config) != len(args.template):
        raise _UsageError(
            f"got {len(args.config)} --config but {len(args.template)} --template; "
            "each template writes to its matching config path"
        )
    _require_sim_id(args.command, "--command")
    for pattern in args.config:
        _require_sim_id(pattern, "--config")

    sweep = load_sweep_spec(args.sweep_file, seed_override=args.seed)
    template_sources = [
        Path(t).read_text(encoding="utf-8") for t in args.template
    ]
    template_placeholders = [extract_placeholders(s) for s in template_sources]

    sets = sweep.generate()
    names = list(sets[0])
    namer = make_namer(NamerConfig(), total=len(sets))
    ids = list(namer)

    # every placeholder anywhere must be fillable, before anything is written
    allowed = set(names) | {"sim_id"}
    for placeholders in [
        *template_placeholders,
        extract_placeholders(args.command),
        *(extract_placeholders(p) for p in args.config),
    ]:
        for placeholder in placeholders:
            if placeholder not in allowed:
                raise UnfilledPlaceholderError(placeholder)

    unused = unused_parameters(template_sources, names)
    if unused:
        message = f"parameter(s) not used by any template: {', '.join(unused)}"
        if args.strict:
            raise SweepRunError(message)
        print(f"warning: {message}", file=sys.stderr)

    # two-phase: render everything in memory, check conflicts, then write
    rendered: list[tuple[Path, str]] = []
    for params, sim_id in zip(sets, ids):
        for pattern, source in zip(args.config, template_sources):
            config_path = Path(render(pattern, params, sim_id))
            rendered.append((config_path, render(source, params, sim_id)))

    mapping_path = Path(args.mapping_out) if args.mapping_out else Path(f"{args.name}_mapping.json")
    targets = [path for path, _text in rendered] + [mapping_path]
    if args.dispatcher in ("slurm", "pbs"):
        targets += [batch_script_path(Path.cwd(), args.name, sim_id) for sim_id in ids]
    if not args.overwrite:
        existing = [p for p in targets if p.exists()]
        if existing:
            raise OutputConflictError(existing)

    for path, text in rendered:
        if path.parent != Path("."):
            path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    mapping = build_mapping(sweep, sets, ids, sweep_name=args.name)
    mapping_path.write_text(serialize(mapping), encoding="utf-8")
    print(f"wrote {len(rendered)} config file(s) and mapping {mapping_path}")

    workdir = Path.cwd()
    jobs = [
        JobSpec(sim_id=sim_id, command=render(args.command, params, sim_id), workdir=workdir)
        for params, sim_id in zip(sets, ids)
    ]
    config = DispatcherConfig(
        kind=args.dispatcher,
        max_parallel=args.max_parallel,
        submit_command=args.submit_command,
        scheduler_directives=tuple(args.directive),
        overwrite=args.overwrite,
        sweep_name=args.name,
        capture=args.capture,
        dry_run=args.dry_run,
    )
    records = dispatch_all(jobs, config)

    summary = _build_summary(args.name, args.dispatcher, records)
    summary_path = Path(f"{args.name}_summary.json")
    summary_path.write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")

    counts = summary["counts"]
    if counts["dry_run"]:
        print(f"dry run: {counts['dry_run']} job(s) not executed")
    elif counts["submitted"]:
        print(f"submitted {counts['submitted']} job(s) via {config.resolved_submit_command}")
    else:
        print(f"ran {counts['total']} job(s): {counts['succeeded']} succeeded, {counts['failed']} failed")
        for record in records:
            if record.failed:
                detail = record.reason or f"exit code {record.exit_code}"
                print(f"  failed: {record.sim_id} ({detail})", file=sys.stderr)
    print(f"summary written to {summary_path}")

    if args.dispatcher == "local" and not args.dry_run and counts["failed"]:
        return 3
    return 0


# ---------------------------------------------------------------------------
# preview


def _cmd_preview(args) -> int:
    sweep = load_sweep_spec(args.sweep_file, seed_override=args.seed)
    sets = sweep.generate()
    names = list(sets[0])
    namer = make_namer(NamerConfig(), total=len(sets))
    ids = list(namer)
    print(f"{sweep.kind}, {len(names)} parameter(s) ({', '.join(names)}), {len(sets)} simulation(s)")
    shown = min(args.limit, len(sets))
    for sim_id, params in list(zip(ids, sets))[:shown]:
        rendered = ", ".join(f"{k}={format_value(v)}" for k, v in params.items())
        print(f"  {sim_id}: {rendered}")
    if shown < len(sets):
        print(f"  ... {len(sets) - shown} more")
    return 0


# ---------------------------------------------------------------------------
# collect


def _cmd_collect(args) -> int:
    mapping = read_mapping(args.mapping_file)
    collected = collect_scalars(mapping, args.output_pattern)
    csv_path = Path(args.csv_out) if args.csv_out else Path(f"{mapping.sweep_name}_results.csv")
    csv_path.write_text(export_csv(collected), encoding="utf-8")
    report = {
        "schema": REPORT_SCHEMA,
        "sweep_name": mapping.sweep_name,
        "total": len(collected.values),
        "collected": sum(v is not None for v in collected.values.values()),
        "missing": [
            {"sim_id": issue.sim_id, "path": issue.path, "reason": issue.reason}
            for issue in collected.issues
        ],
    }
    report_path = (
        Path(args.report_out) if args.report_out else Path(f"{mapping.sweep_name}_collect_report.json")
    )
    report_path.write_text(json.dumps(report, indent=2) + "\n", encoding="utf-8")
    print(f"collected {report['collected']}/{report['total']} value(s) into {csv_path}")
    if collected.issues:
        for issue in collected.issues:
            print(f"  missing {issue.sim_id}: {issue.reason} ({issue.path})", file=sys.stderr)
        print(f"report written to {report_path}", file=sys.stderr)
        return 4
    print(f"report written to {report_path}")
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(
        prog="sweeprun",
        description="Run parallel parameter sweeps over any external model.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    run = sub.add_parser("run", help="generate configs, dispatch jobs, record the mapping")
    run.add_argument("--command", required=True, help="command per simulation; use {sim_id}")
    run.add_argument(
        "--config",
        action="append",
        required=True,
        metavar="PATTERN",
        help="config file path per simulation; use {sim_id} (repeatable)",
    )
    run.add_argument(
        "--template",
        action="append",
        required=True,
        metavar="FILE",
        help="template file matching each --config (repeatable)",
    )
    run.add_argument("--sweep-file", required=True, metavar="FILE", help="JSON sweep spec")
    run.add_argument("--name", default="sweep", help="sweep name used in output filenames")
    run.add_argument("--dispatcher", choices=DISPATCHER_KINDS, default="local")
    run.add_argument("--max-parallel", type=int, metavar="N", help="local pool size (default: CPU count)")
    run.add_argument("--seed", type=int, help="override the sweep file's random seed")
    run.add_argument("--strict", action="store_true", help="unused parameters become errors")
    run.add_argument("--overwrite", action="store_true", help="replace files from a previous sweep")
    run.add_argument("--capture", action="store_true", help="redirect job output to <name>_<id>.out/.err")
    run.add_argument("--dry-run", action="store_true", help="write configs/scripts but execute nothing")
    run.add_argument("--mapping-out", metavar="PATH", help="mapping file (default <name>_mapping.json)")
    run.add_argument(
        "--directive",
        action="append",
        default=[],
        metavar="TEXT",
        help="extra scheduler header line; values starting with dashes need "
        "the = form, e.g. --directive=--time=00:10:00 (repeatable)",
    )
    run.add_argument("--submit-command", metavar="TEXT", help="override sbatch/qsub")
    run.set_defaults(func=_cmd_run)

    preview = sub.add_parser("preview", help="show the sweep without touching any files")
    preview.add_argument("--sweep-file", required=True, metavar="FILE")
    preview.add_argument("--seed", type=int, help="override the sweep file's random seed")
    preview.add_argument("--limit", type=int, default=10, metavar="K", help="parameter sets to list")
    preview.set_defaults(func=_cmd_preview)

    collect = sub.add_parser("collect", help="harvest per-simulation outputs into a CSV")
    collect.add_argument("mapping_file", metavar="MAPPING", help="mapping file from a run")
    collect.add_argument(
        "--output-pattern",
        default="results_{sim_id}.txt",
        metavar="PATTERN",
        help="per-simulation output file; use {sim_id}",
    )
    collect.add_argument("--csv-out", metavar="PATH", help="CSV path (default <name>_results.csv)")
    collect.add_argument(
        "--report-out", metavar="PATH", help="report path (default <name>_collect_report.json)"
    )
    collect.set_defaults(func=_cmd_collect)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SchedulerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (SweepRunError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
