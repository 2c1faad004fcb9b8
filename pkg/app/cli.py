"""Command-line driver: single comparison, batch corpus mode and the injection self-test.

Exit status: 0 when the implementation conforms, 1 when violations were found (or the
self-test missed its thresholds), 2 on any error.
"""
import argparse
import asyncio
import json
import logging
import sys
import time
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from pydantic import ValidationError

from app import __version__
from app.errors import ConfigError, GuiVerifyError, IOFailure
from app.fixtures import build_login_screen
from app.injector import generate_suite, load_suite, score_suite, write_suite
from app.model import Origin, load_screen_pair
from app.report import render_html, report_timestamp, write_report
from app.utils.config import Config, Settings, load_config
from app.utils.manifest import PairRecord, read_manifest
from app.violations import CATEGORY_ORDER, run_detection

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

EXIT_OK = 0
EXIT_VIOLATIONS = 1
EXIT_ERROR = 2


class _StderrHandler(logging.StreamHandler):
    """Writes to whatever ``sys.stderr`` is at emit time, not at configuration time."""

    def __init__(self) -> None:
        super().__init__(sys.stderr)

    @property
    def stream(self):
        return sys.stderr

    @stream.setter
    def stream(self, value) -> None:
        pass


def configure_logging(env: Settings, verbose: bool = False) -> None:
    level = logging.DEBUG if verbose else getattr(logging, env.log_level.upper(), logging.INFO)
    logging.basicConfig(level=level, format=LOG_FORMAT, handlers=[_StderrHandler()], force=True)


# ---------------------------------------------------------------------------
# compare
# ---------------------------------------------------------------------------


def cmd_compare(args: argparse.Namespace, env: Settings) -> int:
    cfg = load_config(args.config, env)
    mock = load_screen_pair(args.mock_img, args.mock_meta, Origin.MOCKUP)
    impl = load_screen_pair(args.impl_img, args.impl_meta, Origin.IMPLEMENTATION)
    report = run_detection(mock, impl, cfg, timestamp=report_timestamp(env))

    out = Path(args.out)
    write_report(report, out / "report.json")
    if args.html:
        render_html(report, mock.image, impl.image, out)

    if report.conforms:
        print(f"✅ No design violations ({report.match_stats.matched} components matched)")
        return EXIT_OK
    print(f"❌ {len(report.violations)} design violation(s):")
    for category, count in report.summary_by_category().items():
        print(f"   {category}: {count}")
    return EXIT_VIOLATIONS


# ---------------------------------------------------------------------------
# batch
# ---------------------------------------------------------------------------


def _compare_record(record: PairRecord, cfg: Config, outdir: Path, timestamp: datetime) -> Dict[str, Any]:
    mock = load_screen_pair(record.mock_img, record.mock_meta, Origin.MOCKUP)
    impl = load_screen_pair(record.impl_img, record.impl_meta, Origin.IMPLEMENTATION)
    report = run_detection(mock, impl, cfg, timestamp=timestamp)
    write_report(report, outdir / record.name / "report.json")
    return {
        "name": record.name,
        "status": "ok",
        "violations": len(report.violations),
        "by_category": report.summary_by_category(),
        "report": f"{record.name}/report.json",
    }


async def _run_pair(
    record: PairRecord, cfg: Config, outdir: Path, timestamp: datetime, semaphore: asyncio.Semaphore
) -> Dict[str, Any]:
    async with semaphore:
        try:
            return await asyncio.to_thread(_compare_record, record, cfg, outdir, timestamp)
        except GuiVerifyError as e:
            logger.warning(f"Pair {record.name} failed: {e}")
            return {"name": record.name, "status": "error", "error": e.to_dict()}
        except Exception as e:
            logger.error(f"Pair {record.name} failed unexpectedly: {e}", exc_info=True)
            return {
                "name": record.name,
                "status": "error",
                "error": {"code": "INTERNAL_ERROR", "message": str(e)},
            }


async def run_batch(
    records: Sequence[PairRecord], cfg: Config, outdir: Path, jobs: int, timestamp: datetime
) -> List[Dict[str, Any]]:
    """Compare every pair, at most ``jobs`` at a time. Results keep manifest order."""
    semaphore = asyncio.Semaphore(max(1, jobs))
    return list(
        await asyncio.gather(*(_run_pair(r, cfg, outdir, timestamp, semaphore) for r in records))
    )


def cmd_batch(args: argparse.Namespace, env: Settings) -> int:
    cfg = load_config(args.config, env)
    records = read_manifest(args.manifest)
    jobs = args.jobs or env.jobs
    outdir = Path(args.out)
    try:
        outdir.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise IOFailure(f"cannot create {outdir}: {e.strerror or e}", path=str(outdir)) from e

    logger.info(f"Running {len(records)} pair(s) with {jobs} job(s)")
    results = asyncio.run(run_batch(records, cfg, outdir, jobs, report_timestamp(env)))

    errors = sum(1 for r in results if r["status"] == "error")
    violations = sum(r.get("violations", 0) for r in results)
    summary = {
        "tool_version": __version__,
        "pairs": results,
        "totals": {
            "pairs": len(results),
            "ok": len(results) - errors,
            "errors": errors,
            "violations": violations,
        },
    }
    summary_path = outdir / "summary.json"
    try:
        summary_path.write_text(json.dumps(summary, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    except OSError as e:
        raise IOFailure(f"cannot write {summary_path}: {e.strerror or e}", path=str(summary_path)) from e

    print(f"{len(results)} pair(s): {len(results) - errors} compared, {errors} failed, {violations} violation(s)")
    if errors:
        return EXIT_ERROR
    return EXIT_VIOLATIONS if violations else EXIT_OK


# ---------------------------------------------------------------------------
# selftest
# ---------------------------------------------------------------------------


def cmd_selftest(args: argparse.Namespace, env: Settings) -> int:
    cfg = load_config(args.config, env)
    started = time.perf_counter()

    if args.suite:
        cases = load_suite(args.suite)
    else:
        if bool(args.mock_img) != bool(args.mock_meta):
            raise ConfigError("--mock-img and --mock-meta must be given together")
        if args.mock_img:
            clean = load_screen_pair(args.mock_img, args.mock_meta, Origin.MOCKUP)
        else:
            clean = build_login_screen()
        counts = {category: args.per_category for category in CATEGORY_ORDER}
        # magnitudes follow the default tolerances, not the config under test
        cases = generate_suite(clean, counts, args.seed, per_case=args.per_case)
        if args.write_suite:
            write_suite(cases, args.write_suite)

    timestamp = report_timestamp(env)
    reports = [run_detection(case.mockup, case.impl, cfg, timestamp=timestamp) for case in cases]
    scores = score_suite(cases, reports)
    elapsed = time.perf_counter() - started

    if not cases:
        print("No cases to run: vacuous pass")
        return EXIT_OK

    print(f"{'category':<20} {'cases':>5} {'precision':>9} {'recall':>7}")
    passed = True
    for category, score in scores.items():
        ok = score.precision >= args.min_precision and score.recall >= args.min_recall
        passed = passed and ok
        mark = "✅" if ok else "❌"
        print(
            f"{category.value:<20} {score.support:>5} {score.precision:>9.3f} {score.recall:>7.3f} {mark}"
        )
    print(f"{len(cases)} case(s) in {elapsed:.2f}s")
    return EXIT_OK if passed else EXIT_VIOLATIONS


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gui-verify",
        description="Detect GUI design violations between a mock-up and its implementation.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    compare = sub.add_parser("compare", help="compare one mock-up against one implementation")
    compare.add_argument("--mock-img", required=True)
    compare.add_argument("--mock-meta", required=True)
    compare.add_argument("--impl-img", required=True)
    compare.add_argument("--impl-meta", required=True)
    compare.add_argument("--out", required=True, help="output directory")
    compare.add_argument("--html", action="store_true", help="also write the HTML report")
    compare.add_argument("--config", help="config document (default: $GUI_VERIFY_CONFIG)")
    compare.set_defaults(handler=cmd_compare)

    batch = sub.add_parser("batch", help="compare every pair listed in a manifest")
    batch.add_argument("--manifest", required=True)
    batch.add_argument("--out", required=True, help="output directory")
    batch.add_argument("--jobs", type=int, help="pairs compared concurrently (default: $GUI_VERIFY_JOBS)")
    batch.add_argument("--config")
    batch.set_defaults(handler=cmd_batch)

    selftest = sub.add_parser("selftest", help="measure detection on injected violations")
    selftest.add_argument("--seed", type=int, default=42)
    selftest.add_argument("--per-category", type=int, default=10)
    selftest.add_argument("--per-case", type=int, default=1, help="mutations per case")
    selftest.add_argument("--config")
    selftest.add_argument("--mock-img", help="clean screenshot (default: bundled login screen)")
    selftest.add_argument("--mock-meta", help="metadata of the clean screenshot")
    selftest.add_argument("--suite", help="score an existing suite manifest instead")
    selftest.add_argument("--write-suite", help="directory to write the generated suite into")
    selftest.add_argument("--min-precision", type=float, default=0.95)
    selftest.add_argument("--min-recall", type=float, default=0.95)
    selftest.set_defaults(handler=cmd_selftest)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # --help and --version exit 0; usage errors map onto the error status
        return EXIT_OK if e.code == 0 else EXIT_ERROR

    try:
        env = Settings()
    except ValidationError as e:
        first = e.errors()[0]
        error = ConfigError(f"invalid environment: {first['msg']}")
        print(f"error: {error}", file=sys.stderr)
        return EXIT_ERROR
    configure_logging(env, args.verbose)

    try:
        return args.handler(args, env)
    except GuiVerifyError as e:
        logger.debug("Command failed", exc_info=True)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
    except Exception as e:
        logger.error(f"Unexpected failure: {e}", exc_info=True)
        print(f"error: INTERNAL_ERROR: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
