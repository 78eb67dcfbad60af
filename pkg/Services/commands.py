# Services/commands.py
import argparse
import json
import logging
import sys
from datetime import date
from pathlib import Path
from typing import Callable, List, Optional, Sequence

from pydantic import BaseModel, ValidationError

from Models.errors import (
    ClockFormatError,
    DatasetError,
    GtfsError,
    InvalidRangeError,
    InvalidTimetableError,
    MalformedTripError,
    SyntheticSpecError,
    UnknownStopError,
)
from Models.query import Variant
from Models.timetable import Timetable
from Services.clock import format_clock, parse_clock
from Services.dataset_store import file_digest, load_dataset, save_dataset
from Services.gtfs_ingest import IngestConfig, load_gtfs, write_gtfs
from Services.preprocess import preprocess
from Services.router import answer
from Services.run_log import record_run
from Services.synthetic import SyntheticSpec, generate_timetable
from Services.tree_splitter import CutKind
from Services.verification import bench_dataset, compare_strategies, verify_dataset
from paths import default_dataset_path
from settings import get_settings

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_MISMATCH = 3

DATA_ERRORS = (UnknownStopError, GtfsError, DatasetError, InvalidTimetableError, MalformedTripError, OSError)
USAGE_ERRORS = (ClockFormatError, InvalidRangeError, SyntheticSpecError, ValidationError)


class UsageError(Exception):
    pass


class CommandParser(argparse.ArgumentParser):
    """argparse exits with 2 on bad usage; 2 is reserved for data errors here."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def resolve_stop(tt: Timetable, text: str) -> int:
    """Exact stop name first, then numeric id."""
    for stop in tt.stops:
        if stop.name == text:
            return stop.id
    if text.isdigit() and tt.has_stop(int(text)):
        return int(text)
    raise UnknownStopError(text)


def parse_days(text: str) -> List[date]:
    try:
        return [date.fromisoformat(part.strip()) for part in text.split(",")]
    except ValueError:
        raise UsageError(f"bad --day value {text!r} (expected YYYY-MM-DD[,YYYY-MM-DD])") from None


def _emit(report: BaseModel, fmt: str, text_lines: Callable[[], List[str]]) -> None:
    if fmt == "machine":
        print(report.json())
    else:
        print("\n".join(text_lines()))


# Commands

def cmd_preprocess(args) -> int:
    if args.gtfs:
        if not args.day:
            raise UsageError("--day is required with --gtfs")
        cfg = IngestConfig(
            feed_dir=Path(args.gtfs),
            service_days=parse_days(args.day),
            default_min_change_time=args.default_change_time,
        )
        tt = load_gtfs(cfg)
    else:
        if args.day:
            logger.warning("--day is ignored for synthetic instances")
        tt = generate_timetable(SyntheticSpec.from_string(args.synthetic))

    threads = args.threads or get_settings().threads
    dataset, report = preprocess(tt, CutKind(args.strategy), threads)
    report.dataset_bytes = save_dataset(args.out, dataset)
    record_run("preprocess", file_digest(args.out), report)

    _emit(report, args.format, lambda: [
        f"dataset {args.out} ({report.dataset_bytes} bytes, strategy {report.strategy})",
        f"stops {report.stops} trips {report.trips} lines {report.lines}",
        f"transfers {report.initial_transfers} -> {report.reduced_transfers} "
        f"({100 * report.removed_fraction:.1f}% removed)",
        f"prefix trees {report.full_prefix_nodes} nodes, split {report.split_prefix_nodes} + "
        f"{report.postfix_nodes} postfix ({report.avg_nodes_per_stop:.1f} per stop)",
        f"tree build {report.avg_prefix_tree_ms:.2f} ms/stop, {report.tree_seconds_sequential:.2f}s sequential, "
        f"{report.tree_seconds_wall:.2f}s wall on {report.threads} workers (x{report.speedup:.2f})",
    ])
    return EXIT_OK


def cmd_query(args) -> int:
    dataset = load_dataset(args.data)
    tt = dataset.timetable
    src, dst = resolve_stop(tt, args.origin), resolve_stop(tt, args.destination)
    variant = Variant(args.variant)

    if args.profile:
        window = (parse_clock(args.profile[0]), parse_clock(args.profile[1]))
        rows = sorted(answer(dataset, variant, src, dst, window=window).results)
    else:
        departure = parse_clock(args.dep)
        rows = sorted(answer(dataset, variant, src, dst, departure=departure).results)

    for row in rows:
        if args.format == "machine":
            print(json.dumps(row._asdict()))
        elif args.profile:
            print(f"dep {format_clock(row.departure)} arr {format_clock(row.arrival)} transfers {row.transfers}")
        else:
            print(f"arr {format_clock(row.arrival)} transfers {row.transfers}")
    if not rows and args.format != "machine":
        print("no journey")
    return EXIT_OK


def cmd_verify(args) -> int:
    dataset = load_dataset(args.data)
    digest = file_digest(args.data)
    report = verify_dataset(dataset, args.queries, args.seed)
    code = EXIT_OK if report.passed else EXIT_MISMATCH
    record_run("verify", digest, report, exit_code=code)

    def lines() -> List[str]:
        status = "PASS" if report.passed else "FAIL"
        out = [f"verify {status}: {report.ea_queries} EA, {report.profile_queries} profile queries, "
               f"{len(report.mismatches)} mismatches"]
        out += [f"warning: {w}" for w in report.warnings]
        if report.mismatches:
            out += ["reproducer:", report.mismatches[0].reproducer(args.data, digest)]
        return out

    _emit(report, args.format, lines)
    return code


def cmd_bench(args) -> int:
    dataset = load_dataset(args.data)
    report = bench_dataset(dataset, args.queries, args.seed, dataset_bytes=Path(args.data).stat().st_size)
    record_run("bench", file_digest(args.data), report)

    def lines() -> List[str]:
        out = [
            f"dataset {args.data}: {report.stops} stops, {report.trips} trips, {report.lines} lines, "
            f"{report.transfers} transfers, {report.dataset_bytes} bytes",
            f"trees ({report.strategy}): {report.full_prefix_nodes} full prefix, "
            f"{report.split_prefix_nodes} split prefix, {report.postfix_nodes} postfix nodes",
            f"{'variant':8s}{'mode':9s}{'mean us':>12s}{'median us':>12s}{'size [N+E]':>12s}{'graph us':>10s}  hash",
        ]
        for row in report.rows:
            size = f"{row.graph_size_mean:.1f}" if row.graph_size_mean is not None else "-"
            build = f"{row.graph_build_us_mean:.1f}" if row.graph_build_us_mean is not None else "-"
            out.append(
                f"{row.variant:8s}{row.mode:9s}{row.mean_us:12.1f}{row.median_us:12.1f}{size:>12s}{build:>10s}  {row.result_hash}"
            )
        return out

    _emit(report, args.format, lines)
    return EXIT_OK


def cmd_generate(args) -> int:
    spec = SyntheticSpec.from_string(args.synthetic)
    out_dir = write_gtfs(generate_timetable(spec), Path(args.out))
    print(f"wrote {spec.label()} to {out_dir}")
    return EXIT_OK


def cmd_stats(args) -> int:
    dataset = load_dataset(args.data)
    report = compare_strategies(dataset)
    record_run("stats", file_digest(args.data), report)
    _emit(report, args.format, lambda: [
        f"stops {report.stops}, full prefix trees {report.full_prefix_nodes} nodes",
        f"halving    {report.halving_nodes} nodes ({report.avg_halving:.1f} per stop)",
        f"centrality {report.centrality_nodes} nodes ({report.avg_centrality:.1f} per stop)",
        f"centrality/halving {report.centrality_to_halving:.3f}",
    ])
    return EXIT_OK


# Parser

def build_parser() -> CommandParser:
    parser = CommandParser(prog="transit-router", description="Trip-based routing with condensed search trees")
    sub = parser.add_subparsers(dest="command", required=True)
    fmt = dict(choices=["text", "machine"], default="text")

    p = sub.add_parser("preprocess", help="build a dataset file from GTFS or a synthetic instance")
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--gtfs", metavar="DIR")
    source.add_argument("--synthetic", metavar="SPEC")
    p.add_argument("--day", metavar="DATE[,DATE2]")
    p.add_argument("--strategy", choices=[k.value for k in CutKind], default=CutKind.HALVING.value)
    p.add_argument("--out", default=str(default_dataset_path()), metavar="FILE")
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--default-change-time", type=int, default=0, metavar="SECONDS")
    p.add_argument("--format", **fmt)
    p.set_defaults(handler=cmd_preprocess)

    p = sub.add_parser("query", help="answer one earliest-arrival or profile query")
    p.add_argument("--data", default=str(default_dataset_path()), metavar="FILE")
    p.add_argument("--from", dest="origin", required=True, metavar="STOP")
    p.add_argument("--to", dest="destination", required=True, metavar="STOP")
    when = p.add_mutually_exclusive_group(required=True)
    when.add_argument("--dep", metavar="TIME")
    when.add_argument("--profile", nargs=2, metavar=("START", "END"))
    p.add_argument("--variant", choices=[v.value for v in Variant], default=Variant.ST.value)
    p.add_argument("--format", **fmt)
    p.set_defaults(handler=cmd_query)

    for name, handler, help_text in (
        ("verify", cmd_verify, "check TB, PT and ST against the oracle on random queries"),
        ("bench", cmd_bench, "time random queries per variant"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--data", default=str(default_dataset_path()), metavar="FILE")
        p.add_argument("--queries", type=int, default=100)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--format", **fmt)
        p.set_defaults(handler=handler)

    p = sub.add_parser("generate", help="write a synthetic instance as a GTFS feed")
    p.add_argument("--synthetic", required=True, metavar="SPEC")
    p.add_argument("--out", required=True, metavar="DIR")
    p.set_defaults(handler=cmd_generate)

    p = sub.add_parser("stats", help="compare halving and centrality cuts on a dataset")
    p.add_argument("--data", default=str(default_dataset_path()), metavar="FILE")
    p.add_argument("--format", **fmt)
    p.set_defaults(handler=cmd_stats)
    return parser


def dispatch(argv: Optional[Sequence[str]] = None) -> int:
    """Parse and run one command; exceptions become exit codes."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "queries", 0) < 0:
            raise UsageError("--queries must be non-negative")
        return args.handler(args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except DATA_ERRORS as e:
        logger.error(f"Command failed: {e}", exc_info=True)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DATA
    except USAGE_ERRORS as e:
        logger.error(f"Bad argument: {e}", exc_info=True)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE

