#!/usr/bin/env python
"""
Command Line Test Script

Runs the tmoebius subcommands in-process and checks their output formats,
exit codes and error reporting.
"""
import json
import sys

import pytest

from cli import build_parser, main
from commands import get_registered_commands, get_registered_suites, register_command
from commands.verify import _desk_requests, _rendered
from tmoebius.catalog import build
from tmoebius.diagram import HomologyClass, SurfaceKind, diagram_to_json

GENUS_ONE = ["--surface", "m0", "--genus", "1", "--a", "1", "--b", "1", "--nu", "1,1"]


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestInvariantCommands:
    def test_invariant_json(self, capsys):
        code, out, _ = run(capsys, "invariant", *GENUS_ONE)
        assert code == 0
        payload = json.loads(out)
        assert payload["N"] == "12"
        assert payload["diagram_count"] == 2
        assert payload["convention"] == "val-1"

    def test_invariant_table(self, capsys):
        code, out, _ = run(capsys, "invariant", *GENUS_ONE, "--format", "table")
        lines = out.splitlines()
        assert code == 0
        assert lines[0].split()[:2] == ["N", "diagrams"]
        assert set(lines[1].replace(" ", "")) == {"-"}
        assert lines[2].split()[:2] == ["12", "2"]

    def test_bg_headline(self, capsys):
        code, out, _ = run(capsys, "bg", *GENUS_ONE, "--format", "csv")
        assert code == 0
        assert out.splitlines()[0] == "BG,diagrams,markings,convention"

    def test_parity_violation_is_rejected(self, capsys):
        code, out, err = run(capsys, "invariant", "--genus", "1", "--a", "1", "--b", "1/2", "--nu", "1")
        assert code == 1
        assert out == ""
        assert err.startswith("tmoebius: error:")

    @pytest.mark.parametrize("argv", [
        ["invariant", "--genus", "x"],
        ["frobnicate"],
        ["invariant", "--genus", "1", "--a", "1"],
        ["invariant", "--genus", "1", "--a", "0.5", "--b", "1", "--nu", "1"],
        ["invariant", "--surface", "m3", "--genus", "1", "--a", "1", "--b", "1", "--nu", "1,1"],
    ])
    def test_usage_errors(self, capsys, argv):
        code, _, err = run(capsys, *argv)
        assert code == 1
        assert "tmoebius: error:" in err

    def test_out_file(self, capsys, tmp_path):
        target = tmp_path / "n.json"
        code, out, _ = run(capsys, "invariant", *GENUS_ONE, "--out", str(target))
        assert code == 0
        assert out == ""
        assert json.loads(target.read_text(encoding="utf-8"))["N"] == "12"


class TestDiagramCommands:
    def test_count_only(self, capsys):
        code, out, _ = run(capsys, "diagrams", *GENUS_ONE, "--count-only")
        assert code == 0
        assert json.loads(out) == {"count": 2}

    def test_json_lines(self, capsys):
        code, out, _ = run(capsys, "diagrams", *GENUS_ONE)
        records = [json.loads(line) for line in out.splitlines()]
        assert code == 0
        assert len(records) == 2
        assert all(r["surface"] == "m0" for r in records)
        assert sorted(len(r["vertices"]) for r in records) == [1, 2]

    def test_json_records_are_streamed(self):
        args = build_parser().parse_args(["diagrams", *GENUS_ONE])
        result = args.handler(args)
        assert not isinstance(result.records, list)
        assert len(list(result.records)) == 2

    def test_markings(self, capsys, tmp_path):
        path = tmp_path / "ground.json"
        d = build([("G", "1/2")], [], [(0, 1), (0, 1)])
        path.write_text(json.dumps(diagram_to_json(d, SurfaceKind.M0)), encoding="utf-8")
        code, out, _ = run(capsys, "markings", "--diagram", str(path))
        payload = json.loads(out)
        assert code == 0
        assert payload["genus"] == 1
        assert [m["multiplicity"] for m in payload["markings"]] == ["1", "1"]

    def test_markings_reject_broken_files(self, capsys, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json", encoding="utf-8")
        code, _, err = run(capsys, "markings", "--diagram", str(path))
        assert code == 1
        assert "not valid JSON" in err

    def test_markings_reject_invalid_diagrams(self, capsys, tmp_path):
        path = tmp_path / "odd.json"
        d = build([("G", "1/2")], [], [(0, 1)])
        path.write_text(json.dumps(diagram_to_json(d, SurfaceKind.M0)), encoding="utf-8")
        code, _, err = run(capsys, "markings", "--diagram", str(path))
        assert code == 1
        assert "not a floor diagram" in err


class TestSeriesCommand:
    def test_csv(self, capsys):
        code, out, _ = run(
            capsys, "series", "--genus", "1", "--b", "1", "--nu", "1,1", "--order", "4", "--format", "csv"
        )
        assert code == 0
        assert out.splitlines() == ["exponent,coefficient", "1,2", "2,12", "3,24", "4,56"]

    def test_factorized(self, capsys):
        code, out, _ = run(capsys, "series", "--genus", "1", "--b", "1", "--nu", "1,1", "--order", "4", "--factorized")
        payload = json.loads(out)
        assert code == 0
        assert sorted(f["W"] for f in payload["factorizations"]) == ["2", "4"]


class TestRegularityCommand:
    def test_genus_one_ray(self, capsys):
        code, out, _ = run(
            capsys, "regularity", "--genus", "1", "--a", "1", "--base", "3,5", "--direction", "1,1"
        )
        payload = json.loads(out)
        assert code == 0
        assert payload["single_polynomial"] is not None

    def test_mismatched_ray(self, capsys):
        code, _, err = run(capsys, "regularity", "--genus", "1", "--a", "1", "--base", "3,5", "--direction", "1")
        assert code == 1
        assert "same number of entries" in err


class TestVerifyCommand:
    def test_series_suite(self, capsys):
        code, out, _ = run(capsys, "verify", "--suite", "series")
        payload = json.loads(out)
        assert code == 0
        assert payload["passed"] is True
        assert {c["suite"] for c in payload["checks"]} == {"series"}

    def test_requests_cover_every_split(self):
        cls = HomologyClass.parse("1", "1")
        splits = {
            (r.fixed.parts, r.free.parts)
            for r in _desk_requests(1, 2, 2)
            if r.surface is SurfaceKind.M0 and r.homology == cls
        }
        assert splits == {((), (1, 1)), ((1,), (1,)), ((1, 1), ()), ((), (2,)), ((2,), ())}

    @pytest.mark.parametrize("argv", [
        ["diagrams", *GENUS_ONE],
        ["invariant", *GENUS_ONE],
        ["series", "--genus", "1", "--b", "1", "--nu", "1,1", "--order", "6"],
    ])
    def test_output_does_not_depend_on_workers(self, argv):
        single = _rendered(argv, 1)
        assert single
        assert _rendered(argv, 4) == single

    def test_unknown_suite(self, capsys):
        code, _, err = run(capsys, "verify", "--suite", "nope")
        assert code == 1
        assert "unknown suite" in err


class TestRegistry:
    def test_all_commands_registered(self):
        assert set(get_registered_commands()) == {"bg", "diagrams", "invariant", "markings", "regularity", "series", "verify"}
        assert {"series", "q1", "genus1", "minors", "regularity", "crosspath"} <= set(get_registered_suites())

    def test_duplicate_names_are_rejected(self):
        with pytest.raises(ValueError):
            register_command("invariant", "again")(lambda args: None)

    def test_version(self, capsys):
        with pytest.raises(SystemExit) as excinfo:
            main(["--version"])
        assert excinfo.value.code == 0
        assert capsys.readouterr().out.startswith("tmoebius ")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__]))
