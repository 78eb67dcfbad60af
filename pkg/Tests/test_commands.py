# Tests/test_commands.py
import json

import pytest

from main import main
from Services.commands import EXIT_DATA, EXIT_MISMATCH, EXIT_OK, EXIT_USAGE
from Services.dataset_store import load_dataset, save_dataset
from Services.gtfs_ingest import write_gtfs


def _run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_query_earliest_arrival(capsys, f1_dataset_file):
    for variant in ("tb", "pt", "st"):
        code, out, _ = _run(capsys, "query", "--data", f1_dataset_file, "--from", "A", "--to", "C",
                            "--dep", "08:00", "--variant", variant)
        assert code == EXIT_OK
        assert out.strip() == "arr 08:30 transfers 1"


def test_query_profile_and_machine_output(capsys, f1_dataset_file):
    code, out, _ = _run(capsys, "query", "--data", f1_dataset_file, "--from", "A", "--to", "C",
                        "--profile", "00:00", "24:00")
    assert code == EXIT_OK
    assert out.splitlines() == ["dep 08:00 arr 08:30 transfers 1", "dep 09:00 arr 09:30 transfers 1"]

    code, out, _ = _run(capsys, "query", "--data", f1_dataset_file, "--from", "0", "--to", "3",
                        "--dep", "08:00", "--format", "machine")
    assert code == EXIT_OK
    assert [json.loads(line) for line in out.splitlines()] == [{"arrival": 30780, "transfers": 1}]


def test_query_without_journey(capsys, f1_dataset_file):
    code, out, _ = _run(capsys, "query", "--data", f1_dataset_file, "--from", "C", "--to", "A", "--dep", "08:00")
    assert code == EXIT_OK
    assert out.strip() == "no journey"


def test_query_errors(capsys, f1_dataset_file, tmp_path):
    code, _, err = _run(capsys, "query", "--data", f1_dataset_file, "--from", "Zzz", "--to", "C", "--dep", "08:00")
    assert code == EXIT_DATA
    assert "Zzz" in err

    code, _, err = _run(capsys, "query", "--data", f1_dataset_file, "--from", "A", "--to", "C", "--dep", "8h")
    assert code == EXIT_USAGE
    assert "malformed time" in err

    code, _, _ = _run(capsys, "query", "--data", f1_dataset_file, "--from", "A", "--to", "C")
    assert code == EXIT_USAGE

    junk = tmp_path / "junk.tbt"
    junk.write_bytes(b"hello world, not trees")
    code, _, err = _run(capsys, "query", "--data", junk, "--from", "A", "--to", "C", "--dep", "08:00")
    assert code == EXIT_DATA
    assert "not a dataset file" in err


def test_verify_passes_on_f1(capsys, f1_dataset_file):
    code, out, _ = _run(capsys, "verify", "--data", f1_dataset_file, "--queries", 100, "--seed", 1)
    assert code == EXIT_OK
    assert out.startswith("verify PASS")


def test_verify_with_no_queries_warns(capsys, f1_dataset_file):
    code, out, _ = _run(capsys, "verify", "--data", f1_dataset_file, "--queries", 0, "--seed", 1)
    assert code == EXIT_OK
    assert "warning:" in out


def test_verify_catches_deleted_transfer(capsys, f1_dataset_file, tmp_path):
    dataset = load_dataset(f1_dataset_file)
    dataset.transfers = dataset.transfers.without((0, 1, 2, 0))
    broken = tmp_path / "broken.tbt"
    save_dataset(broken, dataset)

    code, out, _ = _run(capsys, "verify", "--data", broken, "--queries", 200, "--seed", 1)
    assert code == EXIT_MISMATCH
    assert "verify FAIL" in out
    assert "reproducer:" in out
    assert f"query --data {broken}" in out


def test_bench_reports_and_is_deterministic(capsys, f1_dataset_file):
    code, out, _ = _run(capsys, "bench", "--data", f1_dataset_file, "--queries", 20, "--seed", 3,
                        "--format", "machine")
    assert code == EXIT_OK
    first = json.loads(out)
    rows = {(r["variant"], r["mode"]): r for r in first["rows"]}
    assert set(rows) == {(v, m) for v in ("tb", "pt", "st") for m in ("ea", "profile")}
    assert rows[("tb", "ea")]["graph_size_mean"] is None
    assert rows[("st", "ea")]["graph_size_mean"] is not None
    assert first["full_prefix_nodes"] == 3

    _, out, _ = _run(capsys, "bench", "--data", f1_dataset_file, "--queries", 20, "--seed", 3,
                     "--format", "machine")
    second = json.loads(out)
    assert [r["result_hash"] for r in second["rows"]] == [r["result_hash"] for r in first["rows"]]


def test_stats(capsys, f1_dataset_file):
    code, out, _ = _run(capsys, "stats", "--data", f1_dataset_file, "--format", "machine")
    assert code == EXIT_OK
    report = json.loads(out)
    assert report["halving_nodes"] == report["centrality_nodes"] == 2 + 7
    assert report["centrality_to_halving"] == 1.0


def test_preprocess_synthetic(capsys, tmp_path):
    out_file = tmp_path / "grid.tbt"
    code, out, _ = _run(capsys, "preprocess", "--synthetic", "kind=grid,stops=16,lines=4,trips=3,seed=5",
                        "--strategy", "centrality", "--out", out_file)
    assert code == EXIT_OK
    assert out_file.exists()
    assert "strategy centrality" in out
    assert load_dataset(out_file).strategy == "centrality"


def test_generate_then_preprocess_gtfs(capsys, tmp_path):
    feed = tmp_path / "feed"
    code, _, _ = _run(capsys, "generate", "--synthetic", "kind=random,stops=12,lines=3,trips=2,seed=5",
                      "--out", feed)
    assert code == EXIT_OK
    assert (feed / "stop_times.txt").exists()

    out_file = tmp_path / "feed.tbt"
    code, _, _ = _run(capsys, "preprocess", "--gtfs", feed, "--day", "2024-03-04", "--out", out_file,
                      "--format", "machine")
    assert code == EXIT_OK
    assert out_file.exists()


def test_preprocess_f1_matches_split_figures(capsys, f1, tmp_path):
    feed = write_gtfs(f1, tmp_path / "f1")
    code, out, _ = _run(capsys, "preprocess", "--gtfs", feed, "--day", "2024-03-04",
                        "--out", tmp_path / "f1.tbt", "--format", "machine")
    assert code == EXIT_OK
    report = json.loads(out)
    assert (report["full_prefix_nodes"], report["split_prefix_nodes"], report["postfix_nodes"]) == (3, 2, 7)
    assert (report["initial_transfers"], report["reduced_transfers"]) == (3, 2)


def test_preprocess_usage_and_data_errors(capsys, tmp_path):
    code, _, err = _run(capsys, "preprocess", "--gtfs", tmp_path, "--out", tmp_path / "x.tbt")
    assert code == EXIT_USAGE
    assert "--day" in err

    code, _, _ = _run(capsys, "preprocess", "--gtfs", tmp_path, "--day", "2024-03-04", "--out", tmp_path / "x.tbt")
    assert code == EXIT_DATA

    for name, header in {
        "stops": "stop_id,stop_name", "routes": "route_id,route_type",
        "trips": "route_id,service_id,trip_id",
        "stop_times": "trip_id,arrival_time,departure_time,stop_id,stop_sequence",
    }.items():
        (tmp_path / f"{name}.txt").write_text(header + "\n")
    code, _, err = _run(capsys, "preprocess", "--gtfs", tmp_path, "--day", "2024-03-04", "--out", tmp_path / "x.tbt")
    assert code == EXIT_DATA
    assert "invalid timetable" in err
    assert not (tmp_path / "x.tbt").exists()


def test_bad_feed_numbers_and_bad_synthetic_spec(capsys, tmp_path):
    tables = {
        "stops": "stop_id,stop_name\ns1,North\ns2,South",
        "routes": "route_id,route_type\nr1,3",
        "trips": "route_id,service_id,trip_id\nr1,ALL,t1",
        "stop_times": "trip_id,arrival_time,departure_time,stop_id,stop_sequence\n"
                      "t1,08:00:00,08:00:00,s1,one\nt1,08:10:00,08:10:00,s2,two",
    }
    for name, text in tables.items():
        (tmp_path / f"{name}.txt").write_text(text + "\n")
    code, _, err = _run(capsys, "preprocess", "--gtfs", tmp_path, "--day", "2024-03-04", "--out", tmp_path / "x.tbt")
    assert code == EXIT_DATA
    assert "stop_sequence" in err

    code, _, err = _run(capsys, "preprocess", "--synthetic", "grid", "--out", tmp_path / "y.tbt")
    assert code == EXIT_USAGE
    assert "key=value" in err


def test_unknown_command(capsys):
    code, _, _ = _run(capsys)
    assert code == EXIT_USAGE
    code, _, _ = _run(capsys, "teleport")
    assert code == EXIT_USAGE
