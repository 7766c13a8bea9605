import json
import math

import pytest

from necklace.cli import build_parser, run
from necklace.trigsums import SumSpec, sum_direct


def _read(path):
    return path.read_text()


class TestParsing:
    def test_requires_subcommand(self, capsys):
        assert run([]) == 2
        capsys.readouterr()

    def test_unknown_flag(self, capsys):
        assert run(["sums", "--bogus", "1"]) == 2
        capsys.readouterr()

    def test_help_exits_cleanly(self, capsys):
        parser = build_parser()
        with pytest.raises(SystemExit) as exc:
            parser.parse_args(["--help"])
        assert exc.value.code == 0
        capsys.readouterr()


class TestSums:
    def test_csv_row(self, tmp_path, capsys):
        out = tmp_path / "row.csv"
        code = run(["sums", "--variant", "alt_hat", "--k", "1", "--n", "64",
                    "--out", str(out)])
        capsys.readouterr()
        assert code == 0
        header, row = _read(out).strip().splitlines()
        cols = dict(zip(header.split(","), row.split(",")))
        expected = sum_direct(SumSpec("alt_hat", 1, 64))
        assert float(cols["direct"]) == pytest.approx(expected, rel=1e-15)
        assert float(cols["rel_err"]) < 1e-2

    def test_json_roundtrip(self, tmp_path, capsys):
        out = tmp_path / "row.json"
        code = run(["sums", "--variant", "alt", "--k", "3", "--n", "50",
                    "--x", "0.2", "--format", "json", "--out", str(out)])
        capsys.readouterr()
        assert code == 0
        payload = json.loads(_read(out))
        assert payload[0]["variant"] == "alt"
        assert math.isfinite(payload[0]["direct"])

    def test_byte_identical_reruns(self, tmp_path, capsys):
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        argv = ["sums", "--variant", "odd", "--k", "3", "--n", "256"]
        assert run(argv + ["--out", str(a)]) == 0
        assert run(argv + ["--out", str(b)]) == 0
        capsys.readouterr()
        assert a.read_bytes() == b.read_bytes()


class TestConfigFile:
    def test_merge_with_flag_priority(self, tmp_path, capsys):
        cfgfile = tmp_path / "run.cfg"
        cfgfile.write_text("n=128\nk=3\n# comment\n\n")
        out = tmp_path / "out.csv"
        code = run(["sums", "--variant", "odd", "--k", "5",
                    "--config", str(cfgfile), "--out", str(out)])
        capsys.readouterr()
        assert code == 0
        header, row = _read(out).strip().splitlines()
        cols = dict(zip(header.split(","), row.split(",")))
        # k came from the flag, n from the file
        assert cols["k"] == "5"
        assert cols["n"] == "128"

    def test_unknown_key_rejected(self, tmp_path, capsys):
        cfgfile = tmp_path / "bad.cfg"
        cfgfile.write_text("wavelength=3\n")
        assert run(["sums", "--config", str(cfgfile)]) == 2
        capsys.readouterr()

    def test_malformed_line_rejected(self, tmp_path, capsys):
        cfgfile = tmp_path / "bad.cfg"
        cfgfile.write_text("just a sentence\n")
        assert run(["sums", "--config", str(cfgfile)]) == 2
        capsys.readouterr()


class TestSubcommands:
    def test_ansatz_defaults(self, tmp_path, capsys):
        out = tmp_path / "ansatz.csv"
        assert run(["ansatz", "--out", str(out)]) == 0
        capsys.readouterr()
        header, row = _read(out).strip().splitlines()
        cols = dict(zip(header.split(","), row.split(",")))
        assert cols["m"] == "16"
        assert float(cols["mu"]) > 0.0

    def test_nodal_nonempty(self, tmp_path, capsys):
        out = tmp_path / "nodal.csv"
        assert run(["nodal", "--res", "24", "--out", str(out)]) == 0
        capsys.readouterr()
        lines = _read(out).strip().splitlines()
        assert lines[0] == "z1,z2,z3,value,grad_norm"
        assert len(lines) > 1

    def test_nodal_domain_error(self, capsys):
        assert run(["nodal", "--res", "8"]) == 2
        capsys.readouterr()

    def test_kernels_report(self, tmp_path, capsys):
        out = tmp_path / "kernels.csv"
        assert run(["kernels", "--K", "32", "--b-abs", "0.95",
                    "--out", str(out)]) == 0
        capsys.readouterr()
        lines = _read(out).strip().splitlines()
        assert len(lines) == 3
        for line in lines[1:]:
            cols = dict(zip(lines[0].split(","), line.split(",")))
            assert float(cols["abs_err_dc"]) < 1e-10

    def test_kernels_bad_point(self, capsys):
        assert run(["kernels", "--K", "32", "--b-abs", "0.3"]) == 2
        capsys.readouterr()
