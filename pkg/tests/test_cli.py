"""Command-line interface: output schemas, exit codes, and byte determinism."""

import csv
import io
import json
from fractions import Fraction

from cosetapprox.cli import main

F = Fraction


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def parse_csv(text):
    rows = list(csv.reader(io.StringIO(text)))
    return rows[0], rows[1:]


class TestArith:
    def test_oracle_table_has_zero_mismatches(self, capsys):
        code, out, _ = run_cli(capsys, "arith", "--n-max", "200", "--d", "2", "--oracle")
        assert code == 0
        header, rows = parse_csv(out)
        assert header[-2:] == ["u_mismatch", "r_mismatch"]
        assert len(rows) == 200
        assert all(r[-1] == "0" and r[-2] == "0" for r in rows)

    def test_exact_columns_are_rational_strings(self, capsys):
        code, out, _ = run_cli(capsys, "arith", "--n-max", "49", "--d", "2")
        _, rows = parse_csv(out)
        assert rows[48][6] == "3/7"  # density of squares mod 49

    def test_growth_table(self, capsys):
        code, out, _ = run_cli(capsys, "arith", "--growth", "--n-max", "4096")
        assert code == 0
        header, rows = parse_csv(out)
        assert header[0] == "block_lo" and len(rows) > 4

    def test_json_format(self, capsys):
        code, out, _ = run_cli(capsys, "arith", "--n-max", "5", "--format", "json")
        payload = json.loads(out)
        assert payload["schema_version"] == 1
        assert len(payload["rows"]) == 5


class TestGroup:
    def test_squares_mod_7_listing(self, capsys):
        code, out, _ = run_cli(
            capsys, "group", "--n", "7", "--mode", "dth-powers", "--d", "2", "--a", "3"
        )
        assert code == 0
        header, rows = parse_csv(out)
        row = dict(zip(header, rows[0]))
        assert row["subgroup_elements"] == "1;2;4"
        assert row["coset_elements"] == "3;5;6"
        assert row["subgroup_index"] == "2"

    def test_generator_mode(self, capsys):
        code, out, _ = run_cli(
            capsys, "group", "--n", "7", "--mode", "generators", "--generators", "2"
        )
        header, rows = parse_csv(out)
        assert dict(zip(header, rows[0]))["subgroup_elements"] == "1;2;4"

    def test_bad_modulus_is_validation_error(self, capsys):
        code, _, err = run_cli(capsys, "group", "--n", "1")
        assert code == 2


class TestChars:
    def test_csv_slack_nonnegative(self, capsys):
        code, out, _ = run_cli(capsys, "chars", "--n-max", "12")
        assert code == 0
        header, rows = parse_csv(out)
        assert header == ["modulus", "exponents", "h", "sum_re", "sum_im", "pv_bound", "slack"]
        assert rows
        assert all(float(r[6]) >= 0 for r in rows)

    def test_row_count_matches_definition(self, capsys):
        _, out, _ = run_cli(capsys, "chars", "--n-max", "5")
        _, rows = parse_csv(out)
        # moduli 3, 4, 5 contribute (phi(n)-1) * n rows each
        assert len(rows) == 1 * 3 + 1 * 4 + 3 * 5


class TestEquidist:
    def test_rows_respect_bound(self, capsys):
        code, out, _ = run_cli(
            capsys, "equidist", "--n-max", "150", "--mode", "dth-powers", "--d", "2"
        )
        assert code == 0
        header, rows = parse_csv(out)
        i_err, i_bound = header.index("abs_error"), header.index("bound")
        assert len(rows) == 149 * 9
        for r in rows:
            assert float(F(r[i_err])) <= float(r[i_bound])

    def test_overlap_sweep_mode(self, capsys):
        code, out, err = run_cli(
            capsys, "equidist", "--overlap-q", "19,53,101", "--d", "2", "--mode", "dth-powers"
        )
        assert code == 0
        header, rows = parse_csv(out)
        assert header == ["q", "d", "abs_excess"]
        assert len(rows) == 3


class TestExperiment:
    def make_config(self, tmp_path, **kw):
        cfg = {
            "schema_version": 1,
            "q_sequence": {"kind": "integers"},
            "alpha_sequence": {"kind": "c/k", "c": "1/3"},
            "d": 1,
            "a": 1,
            "subgroup_mode": "full",
            "generators": [],
            "K": 200,
            "samples": 40,
            "precision_bits": 128,
            "seed": 31415,
            "min_hits": 3,
        }
        cfg.update(kw)
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(cfg))
        return path

    def test_summary_and_hits(self, tmp_path, capsys):
        cfg = self.make_config(tmp_path)
        out = tmp_path / "summary.json"
        hits = tmp_path / "hits.csv"
        code = main(
            ["experiment", "--config", str(cfg), "--out", str(out), "--hits-csv", str(hits)]
        )
        capsys.readouterr()
        assert code == 0
        summary = json.loads(out.read_text())
        assert summary["schema_version"] == 1
        assert summary["samples"] == 40
        assert "1" in summary["F"] and "conditions" in summary
        header, rows = parse_csv(hits.read_text())
        assert header == ["sample_index", "k", "q", "p", "error_num", "error_den"]
        assert rows
        for r in rows[:20]:
            k, q, p = int(r[1]), int(r[2]), int(r[3])
            assert 1 <= k <= 200 and q >= 1
            assert F(int(r[4]), int(r[5])) < F(1, 3) / k / q

    def test_thread_count_does_not_change_bytes(self, tmp_path, capsys):
        cfg = self.make_config(tmp_path)
        outs = []
        for t in ("1", "2"):
            out = tmp_path / f"summary_{t}.json"
            code = main(["experiment", "--config", str(cfg), "--out", str(out), "--threads", t])
            capsys.readouterr()
            assert code == 0
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]

    def test_repeat_run_identical(self, tmp_path, capsys):
        cfg = self.make_config(tmp_path)
        blobs = []
        for name in ("a.json", "b.json"):
            out = tmp_path / name
            assert main(["experiment", "--config", str(cfg), "--out", str(out)]) == 0
            capsys.readouterr()
            blobs.append(out.read_bytes())
        assert blobs[0] == blobs[1]

    def test_malformed_json_exits_2(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text('{"schema_version": 1,,}')
        code, _, err = run_cli(capsys, "experiment", "--config", str(path))
        assert code == 2
        assert "line" in err

    def test_missing_field_exits_2(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"schema_version": 1, "q_sequence": {"kind": "integers"}}))
        code, _, err = run_cli(capsys, "experiment", "--config", str(path))
        assert code == 2
        assert "alpha_sequence" in err

    def test_invalid_alpha_exits_2(self, tmp_path, capsys):
        cfg = self.make_config(tmp_path, alpha_sequence={"kind": "c/k", "c": "2/3"})
        code, _, err = run_cli(capsys, "experiment", "--config", str(cfg))
        assert code == 2


class TestUsageAndVerify:
    def test_unknown_flag_exits_1(self, capsys):
        code, _, err = run_cli(capsys, "arith", "--frobnicate")
        assert code == 1

    def test_unknown_subcommand_exits_1(self, capsys):
        code, _, _ = run_cli(capsys, "transmogrify")
        assert code == 1

    def test_verify_quick_passes(self, capsys):
        code, out, _ = run_cli(capsys, "verify", "--quick")
        assert code == 0
        assert "PASS" in out and "FAIL" not in out
        assert "checks passed" in out
