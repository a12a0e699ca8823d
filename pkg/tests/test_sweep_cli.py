import csv
import io
import math

import pytest

from envcorr import cli
from envcorr.errors import ConfigError
from envcorr.sweep import (
    CSV_COLUMNS,
    SCENARIOS,
    SweepConfig,
    ValidationReport,
    identity_fuzz,
    parse_config,
    run_sweep,
    scenario_config,
)


def small(name, **kw):
    return scenario_config(name, n_points=11, **kw)


class TestConfig:
    def test_defaults(self):
        cfg = parse_config("")
        assert cfg.omega_r == 800.0
        assert cfg.omega_d == pytest.approx(800 / math.sqrt(11))
        assert cfg.V == pytest.approx(800**2 / 32)
        assert cfg.m == 10 * cfg.m_i
        assert cfg.cutoff == pytest.approx(10 * cfg.omega_r)
        assert (cfg.relation, cfg.harmonic, cfg.T_R, cfg.T_L) == ("nonresonant", 1, 0.0, 0.0)

    def test_keys_comments_and_overrides(self):
        cfg = parse_config("T_R = 3.5  # warm right\n\nn_points=7\nrelation = resonant\n",
                           relation="nonresonant")
        assert cfg.T_R == 3.5 and cfg.n_points == 7 and cfg.relation == "nonresonant"

    def test_hot_transport_scenario_accepted(self):
        cfg = parse_config("relation = resonant\nharmonic = 1\nT_R = 1500\nT_L = 0\n")
        assert cfg.relation == "resonant" and cfg.T_R == 1500.0
        assert cfg.grid[-1] < cfg.omega_r + cfg.omega_d

    def test_scenario_then_overrides(self):
        cfg = parse_config("scenario = transport-hot-both\nT_L = 1.0\n")
        assert cfg.relation == "resonant" and cfg.T_R == 7500.0 and cfg.T_L == 1.0

    @pytest.mark.parametrize("text, key", [
        ("T_R = -1", "T_R"),
        ("T_R = hot", "T_R"),
        ("relation = sideways", "relation"),
        ("colour = blue", "colour"),
        ("n_points = 1", "n_points"),
        ("scenario = nowhere", "scenario"),
        ("just words", "line 1"),
    ])
    def test_errors_name_the_key(self, text, key):
        with pytest.raises(ConfigError) as err:
            parse_config(text)
        assert key in str(err.value)

    def test_nonresonant_grid_below_drive(self):
        with pytest.raises(ConfigError, match="omega_i_max"):
            SweepConfig(omega_i_max=300.0)

    def test_all_scenarios_build(self):
        for name in SCENARIOS:
            assert scenario_config(name).scenario == name


class TestSweep:
    def test_csv_layout(self):
        text = run_sweep(small("pair-hot-right")).csv_text()
        rows = list(csv.reader(io.StringIO(text)))
        assert tuple(rows[0]) == CSV_COLUMNS
        assert len(rows) == 12 and all(len(r) == len(CSV_COLUMNS) for r in rows)
        assert rows[1][0] == "%.12g" % float(rows[1][0])

    def test_deterministic(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        run_sweep(small("pair-hot-both", out=str(a)), write=True)
        run_sweep(small("pair-hot-both", out=str(b)), write=True)
        assert a.read_bytes() == b.read_bytes()

    def test_workers_keep_order(self):
        serial = run_sweep(small("transport-hot-right")).csv_text()
        threaded = run_sweep(small("transport-hot-right", workers=3)).csv_text()
        assert serial == threaded

    def test_pair_partners(self):
        cfg = small("pair-cold")
        for row in run_sweep(cfg).rows:
            assert row.omega_i + row.omega_j == pytest.approx(cfg.omega_d)
        cfg = small("transport-hot-left")
        for row in run_sweep(cfg).rows:
            assert row.omega_j - row.omega_i == pytest.approx(cfg.omega_d)

    def test_summary(self):
        res = run_sweep(small("transport-hot-right"))
        s = res.summary
        assert s["points"] == 11 and s["flagged"] == 0
        assert s["bound_check_pass"] == "11/11"
        assert "peak_omega_i_I" in s and "closed_vs_exact_max_dev_I" in s
        assert res.summary_text().splitlines()[0] == "scenario = transport-hot-right"

    def test_horizon_flagged_not_fatal(self):
        res = run_sweep(small("transport-hot-right", t=1e12))
        assert res.flagged_fraction > 0.5
        bad = [r for r in res.rows if r.report is None]
        assert all(r.flags[0].startswith("validity-horizon") for r in bad)
        assert all(math.isnan(r.values()["I"]) for r in bad)
        assert "," not in ";".join(f for r in bad for f in r.flags)

    def test_green_warning_propagates(self):
        assert not any(r.flags for r in run_sweep(small("pair-hot-both")).rows)
        with pytest.warns(UserWarning):
            res = run_sweep(small("pair-hot-both", V=1.5 * 800**2))
        assert all("green-warning" in r.flags for r in res.rows)


class TestValidation:
    def test_report(self):
        rep = ValidationReport()
        rep.add("a", True, "fine")
        rep.add("b", False)
        assert not rep.passed and rep.first_failure == "b"
        assert rep.text() == "a = pass  fine\nb = FAIL  \n"

    def test_identity_fuzz_seeded(self):
        assert identity_fuzz(200, 3) == identity_fuzz(200, 3)
        assert identity_fuzz(200, 3) < 1e-10


class TestCli:
    def test_sweep(self, tmp_path, capsys):
        out = tmp_path / "s.csv"
        cfg = tmp_path / "c.txt"
        cfg.write_text("scenario = pair-hot-both\nn_points = 9\n")
        code = cli.main(["sweep", "--config", str(cfg), "--out", str(out)])
        assert code == cli.EXIT_OK
        assert out.read_text().startswith("omega_i,omega_j,")
        assert "scenario = pair-hot-both" in capsys.readouterr().out

    def test_flag_overrides_config(self, tmp_path):
        out = tmp_path / "s.csv"
        cfg = tmp_path / "c.txt"
        cfg.write_text("n_points = 5\nT_R = 1500\n")
        assert cli.main(["sweep", "--config", str(cfg), "--relation", "resonant",
                         "--out", str(out)]) == cli.EXIT_OK
        rows = list(csv.DictReader(out.open()))
        assert float(rows[0]["omega_j"]) > float(rows[0]["omega_i"])

    def test_config_error(self, tmp_path, capsys):
        cfg = tmp_path / "c.txt"
        cfg.write_text("T_R = -2\n")
        assert cli.main(["sweep", "--config", str(cfg)]) == cli.EXIT_CONFIG
        assert "T_R" in capsys.readouterr().err

    def test_missing_config_file(self, tmp_path):
        assert cli.main(["sweep", "--config", str(tmp_path / "nope")]) == cli.EXIT_CONFIG

    def test_horizon_majority(self, tmp_path):
        cfg = tmp_path / "c.txt"
        cfg.write_text("scenario = transport-hot-right\nt = 1e12\nn_points = 7\n")
        code = cli.main(["sweep", "--config", str(cfg), "--out", str(tmp_path / "s.csv")])
        assert code == cli.EXIT_HORIZON

    def test_validate_reports_each_check(self, tmp_path, capsys):
        cfg = tmp_path / "c.txt"
        cfg.write_text("n_points = 11\n")
        code = cli.main(["validate", "--config", str(cfg), "--seed", "5"])
        out = capsys.readouterr().out
        names = [line.split(" = ")[0] for line in out.splitlines() if " = " in line]
        assert "closed_vs_exact" in names and "generator_negativity_identity" in names
        # the zero-temperature discord ratio overshoots 1/2 by up to 2.4e-4
        assert code == cli.EXIT_INVARIANT
        assert "first_failure = zero_temperature_discord_ratio" in out

    def test_subcommand_required(self):
        with pytest.raises(SystemExit):
            cli.main([])
