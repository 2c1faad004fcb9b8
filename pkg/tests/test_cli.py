import io
import json
import logging
import random
import time
from datetime import datetime, timezone
from pathlib import Path

import pytest

from app.cli import EXIT_ERROR, EXIT_OK, EXIT_VIOLATIONS, configure_logging, main, run_batch
from app.injector import InjectionSpec, inject
from app.model import leaf_components
from app.utils.config import Config, Settings
from app.utils.manifest import PairRecord, write_manifest
from app.violations import ViolationCategory
from tests.screens import random_screen, write_pair

FIXED_TIME = datetime(2024, 6, 11, 12, 0, tzinfo=timezone.utc)


@pytest.fixture
def login_files(tmp_path, login_screen):
    return write_pair(tmp_path / "screens", login_screen, "login")


@pytest.fixture
def translated_files(tmp_path, login_screen):
    case = inject(
        login_screen, InjectionSpec(category=ViolationCategory.LAYOUT_TRANSLATION, target_id="logo"), seed=0
    )
    return write_pair(tmp_path / "screens", case.impl, "translated")


def compare_args(mock, impl, out):
    return [
        "compare",
        "--mock-img", str(mock[0]),
        "--mock-meta", str(mock[1]),
        "--impl-img", str(impl[0]),
        "--impl-meta", str(impl[1]),
        "--out", str(out),
    ]


def self_manifest(tmp_path: Path, files, names, broken=()):
    records = []
    for name in names:
        image, meta = files
        records.append(
            PairRecord(
                name=name,
                mock_img=str(image),
                mock_meta=str(meta),
                impl_img=str(image),
                impl_meta=str(tmp_path / "missing.json") if name in broken else str(meta),
            )
        )
    return write_manifest(records, tmp_path / "manifest.json")


# ---------------------------------------------------------------------------
# compare
# ---------------------------------------------------------------------------


def test_compare_screen_against_itself(tmp_path, login_files, capsys):
    assert main(compare_args(login_files, login_files, tmp_path / "out")) == EXIT_OK
    report = json.loads((tmp_path / "out" / "report.json").read_text())
    assert report["violations"] == []
    assert "No design violations" in capsys.readouterr().out


def test_compare_against_injected_translation(tmp_path, login_files, translated_files, capsys):
    assert main(compare_args(login_files, translated_files, tmp_path / "out") + ["--html"]) == EXIT_VIOLATIONS
    report = json.loads((tmp_path / "out" / "report.json").read_text())
    assert [(v["category"], v["mockup_id"]) for v in report["violations"]] == [("LAYOUT_TRANSLATION", "logo")]
    assert (tmp_path / "out" / "index.html").exists()
    assert (tmp_path / "out" / "evidence" / "0_mock.png").exists()
    assert "LAYOUT_TRANSLATION: 1" in capsys.readouterr().out


def test_compare_with_missing_meta(tmp_path, login_files, capsys):
    impl = (login_files[0], tmp_path / "nope.json")
    assert main(compare_args(login_files, impl, tmp_path / "out")) == EXIT_ERROR
    assert "IO_ERROR" in capsys.readouterr().err


def test_compare_uses_the_config_from_the_environment(tmp_path, login_files, translated_files, monkeypatch):
    config = tmp_path / "loose.json"
    config.write_text(json.dumps({"pos_tol": 50}))
    monkeypatch.setenv("GUI_VERIFY_CONFIG", str(config))
    assert main(compare_args(login_files, translated_files, tmp_path / "out")) == EXIT_OK
    report = json.loads((tmp_path / "out" / "report.json").read_text())
    assert report["config_echo"]["pos_tol"] == 50


def test_invalid_config_is_an_error(tmp_path, login_files, capsys):
    config = tmp_path / "bad.json"
    config.write_text('{"weights": {"spatial": 0.9, "ctype": 0.3, "text": 0.2}}')
    args = compare_args(login_files, login_files, tmp_path / "out") + ["--config", str(config)]
    assert main(args) == EXIT_ERROR
    assert "CONFIG_ERROR" in capsys.readouterr().err


def test_usage_errors_and_version(capsys):
    assert main(["compare"]) == EXIT_ERROR
    assert main(["--version"]) == EXIT_OK
    assert main([]) == EXIT_ERROR


def test_report_timestamp_is_pinned_by_source_date_epoch(tmp_path, login_files, monkeypatch):
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "1718107200")
    main(compare_args(login_files, login_files, tmp_path / "out"))
    report = json.loads((tmp_path / "out" / "report.json").read_text())
    assert report["timestamp"] == "2024-06-11T12:00:00.000000Z"


# ---------------------------------------------------------------------------
# batch
# ---------------------------------------------------------------------------


def test_empty_manifest(tmp_path):
    manifest = tmp_path / "manifest.json"
    manifest.write_text("[]")
    assert main(["batch", "--manifest", str(manifest), "--out", str(tmp_path / "out")]) == EXIT_OK
    summary = json.loads((tmp_path / "out" / "summary.json").read_text())
    assert summary["pairs"] == []
    assert summary["totals"]["pairs"] == 0


def test_three_self_pairs(tmp_path, login_files):
    manifest = self_manifest(tmp_path, login_files, ["a", "b", "c"])
    assert main(["batch", "--manifest", str(manifest), "--out", str(tmp_path / "out")]) == EXIT_OK
    for name in ("a", "b", "c"):
        report = json.loads((tmp_path / "out" / name / "report.json").read_text())
        assert report["violations"] == []


def test_one_unreadable_pair_among_three(tmp_path, login_files):
    manifest = self_manifest(tmp_path, login_files, ["a", "b", "c"], broken={"b"})
    assert main(["batch", "--manifest", str(manifest), "--out", str(tmp_path / "out")]) == EXIT_ERROR
    summary = json.loads((tmp_path / "out" / "summary.json").read_text())
    assert [p["status"] for p in summary["pairs"]] == ["ok", "error", "ok"]
    assert summary["pairs"][1]["error"]["code"] == "IO_ERROR"
    assert summary["totals"]["ok"] == 2 and summary["totals"]["errors"] == 1


def test_batch_with_violations(tmp_path, login_files, translated_files):
    record = PairRecord(
        name="moved",
        mock_img=str(login_files[0]),
        mock_meta=str(login_files[1]),
        impl_img=str(translated_files[0]),
        impl_meta=str(translated_files[1]),
    )
    manifest = write_manifest([record], tmp_path / "manifest.json")
    assert main(["batch", "--manifest", str(manifest), "--out", str(tmp_path / "out")]) == EXIT_VIOLATIONS
    summary = json.loads((tmp_path / "out" / "summary.json").read_text())
    assert summary["pairs"][0]["by_category"] == {"LAYOUT_TRANSLATION": 1}


def test_batch_output_does_not_depend_on_concurrency(tmp_path, login_files, monkeypatch):
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "1718107200")
    manifest = self_manifest(tmp_path, login_files, [f"pair{n}" for n in range(10)], broken={"pair4"})
    for jobs in ("1", "8"):
        main(["batch", "--manifest", str(manifest), "--out", str(tmp_path / f"out{jobs}"), "--jobs", jobs])

    one, eight = tmp_path / "out1", tmp_path / "out8"
    files = sorted(p.relative_to(one) for p in one.rglob("*.json"))
    assert files == sorted(p.relative_to(eight) for p in eight.rglob("*.json"))
    assert len(files) == 10
    for relative in files:
        assert (one / relative).read_bytes() == (eight / relative).read_bytes()


async def test_run_batch_keeps_manifest_order(tmp_path, login_files):
    image, meta = login_files
    records = [
        PairRecord(name=name, mock_img=str(image), mock_meta=str(meta), impl_img=str(image), impl_meta=str(meta))
        for name in ("z", "a", "m")
    ]
    results = await run_batch(records, Config(), tmp_path / "out", jobs=3, timestamp=FIXED_TIME)
    assert [r["name"] for r in results] == ["z", "a", "m"]
    assert all(r["status"] == "ok" and r["violations"] == 0 for r in results)


# ---------------------------------------------------------------------------
# selftest
# ---------------------------------------------------------------------------


def test_selftest_on_the_bundled_fixture(capsys):
    assert main(["selftest", "--seed", "42", "--per-category", "2"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "LAYOUT_TRANSLATION" in out and "RESOURCE_IMAGE" in out
    assert "18 case(s)" in out


def test_selftest_with_zero_cases(capsys):
    assert main(["selftest", "--per-category", "0"]) == EXIT_OK
    assert "vacuous pass" in capsys.readouterr().out


def test_selftest_with_a_broken_config(tmp_path, capsys):
    config = tmp_path / "broken.json"
    config.write_text(json.dumps({"pos_tol": 10000}))
    assert main(["selftest", "--per-category", "1", "--config", str(config)]) != EXIT_OK
    rows = capsys.readouterr().out.splitlines()
    line = next(row for row in rows if row.startswith("LAYOUT_TRANSLATION"))
    assert "0.000" in line


def test_selftest_on_a_written_suite(tmp_path):
    suite = tmp_path / "suite"
    assert main(["selftest", "--per-category", "1", "--write-suite", str(suite)]) == EXIT_OK
    assert (suite / "suite.json").exists()
    assert main(["selftest", "--suite", str(suite / "suite.json")]) == EXIT_OK


def test_selftest_needs_both_halves_of_a_custom_screen(tmp_path, login_files, capsys):
    assert main(["selftest", "--mock-img", str(login_files[0])]) == EXIT_ERROR
    assert "CONFIG_ERROR" in capsys.readouterr().err


def test_selftest_on_a_custom_screen(login_files):
    image, meta = login_files
    args = ["selftest", "--per-category", "1", "--mock-img", str(image), "--mock-meta", str(meta)]
    assert main(args) == EXIT_OK


def test_selftest_at_full_size_within_a_minute(capsys):
    started = time.perf_counter()
    assert main(["selftest", "--seed", "42", "--per-category", "10"]) == EXIT_OK
    assert time.perf_counter() - started < 60
    out = capsys.readouterr().out
    assert "90 case(s)" in out
    assert "❌" not in out


# ---------------------------------------------------------------------------
# throughput and logging
# ---------------------------------------------------------------------------


def test_full_screen_pair_compares_within_two_seconds(tmp_path):
    pair = random_screen(random.Random(42), width=1080, height=1920, cols=5, rows=10)
    assert 0 < len(leaf_components(pair.hierarchy)) <= 50
    mock = write_pair(tmp_path / "shots", pair, "mock")
    impl = write_pair(tmp_path / "shots", pair, "impl")
    started = time.perf_counter()
    assert main(compare_args(mock, impl, tmp_path / "out") + ["--html"]) == EXIT_OK
    assert time.perf_counter() - started < 2.0


def test_logging_follows_the_current_stderr(monkeypatch):
    configure_logging(Settings())
    try:
        first, second = io.StringIO(), io.StringIO()
        monkeypatch.setattr("sys.stderr", first)
        logging.getLogger("app.cli").warning("one")
        monkeypatch.setattr("sys.stderr", second)
        logging.getLogger("app.cli").warning("two")
        assert "one" in first.getvalue() and "two" not in first.getvalue()
        assert "two" in second.getvalue()
    finally:
        logging.getLogger().handlers.clear()
