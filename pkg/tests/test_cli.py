"""Command-line contract: schemas, determinism, option precedence, exit codes."""
import csv
import math

import pytest

from noma_ec import cli


def run(tmp_path, *argv, name="out.csv"):
    """Invoke the CLI in-process; returns (exit_code, rows or None)."""
    out = tmp_path / name
    code = cli.main([*argv, "--out", str(out)])
    if not out.exists():
        return code, None
    with open(out, newline="") as f:
        return code, list(csv.reader(f))


def read_bytes(path):
    with open(path, "rb") as f:
        return f.read()


class TestSchemas:
    def test_validate_schema_and_gate(self, tmp_path):
        code, rows = run(tmp_path, "validate", "--samples", "50000",
                         "--seed", "1", "--rho-db-min", "0",
                         "--rho-db-max", "20", "--rho-db-step", "10")
        assert code == 0
        assert rows[0] == cli.CSV_COLUMNS["validate"]
        assert len(rows) == 4
        for row in rows[1:]:
            db, lin = float(row[0]), float(row[1])
            assert lin == pytest.approx(10.0 ** (db / 10.0), rel=1e-12)
            cf1, mc1, se1 = (float(x) for x in row[2:5])
            assert abs(cf1 - mc1) <= 3.0 * se1

    def test_sweep_snr_schema(self, tmp_path):
        code, rows = run(tmp_path, "sweep-snr", "--rho-db-min", "0",
                         "--rho-db-max", "4", "--rho-db-step", "2")
        assert code == 0
        assert rows[0] == cli.CSV_COLUMNS["sweep-snr"]
        assert [r[0] for r in rows[1:]] == ["0.0", "2.0", "4.0"]
        for row in rows[1:]:
            vals = [float(x) for x in row]
            assert vals[6] == pytest.approx(vals[2] + vals[3], rel=1e-12)
            assert vals[7] == pytest.approx(vals[4] + vals[5], rel=1e-12)

    def test_sweep_delay_schema(self, tmp_path):
        code, rows = run(tmp_path, "sweep-delay", "--rho-db", "10",
                         "--beta-min", "-2", "--beta-max", "-1",
                         "--beta-step", "0.5")
        assert code == 0
        assert rows[0] == cli.CSV_COLUMNS["sweep-delay"]
        assert [r[0] for r in rows[1:]] == ["-2.0", "-1.5", "-1.0"]
        for row in rows[1:]:
            beta, theta = float(row[0]), float(row[1])
            assert theta == pytest.approx(-beta * math.log(2.0), rel=1e-12)

    def test_gaps_schema_and_sign_gate(self, tmp_path):
        code, rows = run(tmp_path, "gaps")
        assert code == 0
        assert rows[0] == cli.CSV_COLUMNS["gaps"]
        gap2 = [float(r[3]) for r in rows[1:]]
        assert sum(1 for a, b in zip(gap2, gap2[1:]) if (a > 0) != (b > 0)) == 1
        assert all(float(r[2]) >= -1e-10 for r in rows[1:])

    def test_pairing_search_schema(self, tmp_path):
        code, rows = run(tmp_path, "pairing-search", "--samples", "20000",
                         "--seed", "42")
        assert code == 0
        assert rows[0] == cli.CSV_COLUMNS["pairing-search"]
        assert [r[0] for r in rows[1:]] == ["1", "2", "3"]
        assert rows[1][1] == "1-4|2-3"

    def test_compare_schemes_schema(self, tmp_path):
        code, rows = run(tmp_path, "compare-schemes", "--samples", "20000",
                         "--seed", "42")
        assert code == 0
        assert rows[0] == cli.CSV_COLUMNS["compare-schemes"]
        schemes = [r[0] for r in rows[1:]]
        assert schemes == ["full_noma", "best_grouping", "best_pairing",
                           "oma"]
        by_scheme = {r[0]: r for r in rows[1:]}
        assert by_scheme["best_pairing"][3] == "1-6|2-5|3-4"
        assert by_scheme["best_grouping"][3] == "1-2-6|3-4-5"
        totals = [float(r[1]) for r in rows[1:]]
        assert totals == sorted(totals, reverse=True)

    def test_limits_schema_and_all_pass(self, tmp_path):
        code, rows = run(tmp_path, "limits", "--samples", "200000",
                         "--seed", "0")
        assert code == 0
        assert rows[0] == cli.CSV_COLUMNS["limits"]
        assert len(rows) == 16
        assert all(r[6] == "True" for r in rows[1:])
        quantities = {r[0] for r in rows[1:]}
        assert quantities == {"ec2_plateau", "gap1_slope", "gap2_slope",
                              "sum_slope_low_snr", "ergodic_limit",
                              "pairing_gap_constant"}


class TestDeterminism:
    @pytest.mark.parametrize("argv", [
        ("validate", "--samples", "80000", "--seed", "3",
         "--rho-db-min", "10", "--rho-db-max", "20", "--rho-db-step", "10"),
        ("pairing-search", "--samples", "30000", "--seed", "3"),
        ("compare-schemes", "--samples", "20000", "--seed", "3"),
    ])
    def test_byte_identical_across_threads(self, tmp_path, argv):
        a = tmp_path / "t1.csv"
        b = tmp_path / "t4.csv"
        assert cli.main([*argv, "--threads", "1", "--out", str(a)]) == 0
        assert cli.main([*argv, "--threads", "4", "--out", str(b)]) == 0
        assert read_bytes(a) == read_bytes(b)

    def test_reruns_are_byte_identical(self, tmp_path):
        args = ("sweep-snr", "--rho-db-min", "0", "--rho-db-max", "10")
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        assert cli.main([*args, "--out", str(a)]) == 0
        assert cli.main([*args, "--out", str(b)]) == 0
        assert read_bytes(a) == read_bytes(b)

    def test_env_seed_matches_flag_seed(self, tmp_path, monkeypatch):
        args = ("pairing-search", "--samples", "5000")
        monkeypatch.setenv("NOMA_EC_SEED", "42")
        _, env_rows = run(tmp_path, *args, name="env.csv")
        monkeypatch.delenv("NOMA_EC_SEED")
        _, flag_rows = run(tmp_path, *args, "--seed", "42", name="flag.csv")
        assert env_rows == flag_rows
        _, other = run(tmp_path, *args, "--seed", "7", name="other.csv")
        assert other != flag_rows


class TestOptionPrecedence:
    def test_config_overrides_defaults_and_flags_override_config(
            self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("rho-db-min = 0\n"
                       "rho-db-max = 8   # inline comment\n"
                       "rho_db_step = 4\n"
                       "\n"
                       "# full-line comment\n"
                       "p1 = 0.3\n"
                       "p2 = 0.7\n")
        code, rows = run(tmp_path, "sweep-snr", "--config", str(cfg),
                         "--rho-db-max", "4")
        assert code == 0
        assert [r[0] for r in rows[1:]] == ["0.0", "4.0"]

    def test_config_betas_list(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("betas = -1,-2\n")
        code, rows = run(tmp_path, "sweep-snr", "--config", str(cfg),
                         "--rho-db-min", "10", "--rho-db-max", "10")
        base_code, base_rows = run(tmp_path, "sweep-snr", "--rho-db-min",
                                   "10", "--rho-db-max", "10", name="b.csv")
        assert code == base_code == 0
        # weak user unchanged, strong user's EC drops under the tighter QoS
        assert rows[1][2] == base_rows[1][2]
        assert float(rows[1][3]) < float(base_rows[1][3])

    def test_unknown_config_key_is_a_usage_error(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("no-such-option = 1\n")
        assert cli.main(["sweep-snr", "--config", str(cfg)]) == 2

    def test_malformed_config_line_is_a_usage_error(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("rho-db-min\n")
        assert cli.main(["sweep-snr", "--config", str(cfg)]) == 2

    def test_missing_config_file_is_a_usage_error(self):
        assert cli.main(["sweep-snr", "--config", "/no/such/file.cfg"]) == 2


class TestExitCodes:
    def test_unknown_command_is_usage(self):
        assert cli.main(["frobnicate"]) == 2

    def test_undersized_samples_is_usage(self):
        assert cli.main(["validate", "--samples", "10"]) == 2

    def test_inverted_grid_is_usage(self):
        assert cli.main(["sweep-snr", "--rho-db-min", "10",
                         "--rho-db-max", "0"]) == 2

    def test_nonpositive_step_is_usage(self):
        assert cli.main(["sweep-snr", "--rho-db-step", "0"]) == 2

    def test_odd_user_count_for_pairing_is_usage(self):
        assert cli.main(["pairing-search", "--m", "5",
                         "--samples", "1000"]) == 2

    def test_unwritable_output_is_usage(self, tmp_path):
        assert cli.main(["sweep-snr", "--out",
                         str(tmp_path / "missing" / "x.csv")]) == 2

    def test_positive_beta_grid_is_usage(self):
        assert cli.main(["sweep-delay", "--beta-min", "-1",
                         "--beta-max", "1"]) == 2

    def test_inconclusive_search_exits_three(self, tmp_path):
        code, rows = run(tmp_path, "pairing-search", "--rho-db", "-40",
                         "--betas=-0.01", "--samples", "1000",
                         "--seed", "0")
        assert code == 3
        assert len(rows) == 4  # ranking is still written

    def test_failed_numerical_gate_exits_one(self, tmp_path):
        # the floor-series surrogate for a non-integer strong-user QoS
        # exponent is deliberately biased (order is floored); the validate
        # gate must catch it against the unbiased Monte Carlo route
        code, rows = run(tmp_path, "validate", "--betas=-1,-1.5",
                         "--paper-faithful-floor", "--samples", "50000",
                         "--rho-db-min", "10", "--rho-db-max", "10",
                         "--seed", "2")
        assert code == 1
        cf2, mc2, se2 = (float(x) for x in rows[1][5:8])
        assert abs(cf2 - mc2) > 3.0 * se2

    def test_gap_sign_gate_exits_one_on_a_truncated_grid(self, tmp_path):
        # on 0..10 dB the strong user's gap never crosses zero
        code, rows = run(tmp_path, "gaps", "--rho-db-min", "0",
                         "--rho-db-max", "10")
        assert code == 1
        assert all(float(r[3]) > 0 for r in rows[1:])

    def test_help_exits_zero(self, capsys):
        assert cli.main(["--help"]) == 0
        assert "validate" in capsys.readouterr().out


class TestRunSpec:
    def test_rejects_unknown_command(self):
        with pytest.raises(cli.UsageError):
            cli.RunSpec("bogus")

    def test_rejects_non_finite_rho(self):
        spec = cli.RunSpec("sweep-snr",
                           {"rho_db": math.inf, "samples": 10_000,
                            "threads": 1})
        with pytest.raises(cli.UsageError, match="finite"):
            spec.validate()

    def test_rejects_bad_thread_count(self):
        spec = cli.RunSpec("sweep-snr",
                           {"rho_db": 30.0, "samples": 10_000, "threads": 0})
        with pytest.raises(cli.UsageError, match="threads"):
            spec.validate()
