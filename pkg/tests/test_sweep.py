import numpy as np
import pytest

from awisim.cli import main
from awisim.scheme import TWO_PI, hg_gain_preset, load_params, save_params, scan_preset
from awisim.sweep import SweepAxis, SweepSpec, compare_methods, run_sweep


def small_mcwf_kwargs():
    return dict(n_trajectories=15, dt=6e-4, t_max=40.0, seed=9, burn_in=5.0)


class TestSpecValidation:
    def test_unknown_parameter(self):
        with pytest.raises(ValueError, match="unknown sweep parameter"):
            SweepAxis("omega_q", 0.0, 1.0, 5)

    def test_count_too_small(self):
        with pytest.raises(ValueError, match="count"):
            SweepAxis("delta_p", 0.0, 1.0, 1)

    def test_identical_endpoints(self):
        with pytest.raises(ValueError, match="min < max"):
            SweepAxis("delta_p", 1.0, 1.0, 2)

    def test_method_checked(self):
        with pytest.raises(ValueError, match="method"):
            SweepSpec(base=scan_preset(), axes=(SweepAxis("delta_p", -1, 1, 3),),
                      method="magic")

    def test_axis_count(self):
        axes = tuple(SweepAxis(n, 0.1, 1.0, 2) for n in
                     ("delta_p", "delta_s", "delta_w"))
        with pytest.raises(ValueError, match="axes"):
            SweepSpec(base=scan_preset(), axes=axes)
        with pytest.raises(ValueError, match="duplicate"):
            SweepSpec(base=scan_preset(),
                      axes=(SweepAxis("delta_p", 0, 1, 2), SweepAxis("delta_p", 2, 3, 2)))


class TestGrid:
    def test_row_major_order(self):
        spec = SweepSpec(base=scan_preset(),
                         axes=(SweepAxis("delta_p", 0.0, 1.0, 2),
                               SweepAxis("delta_s", 10.0, 12.0, 3)))
        assert spec.grid_points() == [
            (0.0, 10.0), (0.0, 11.0), (0.0, 12.0),
            (1.0, 10.0), (1.0, 11.0), (1.0, 12.0)]


class TestRunSweep:
    def test_deterministic_csv_bytes(self, tmp_path):
        spec = SweepSpec(base=scan_preset(),
                         axes=(SweepAxis("delta_p", -10.0, 10.0, 5),),
                         method="all", **small_mcwf_kwargs())
        a = run_sweep(spec)
        b = run_sweep(spec)
        assert a.csv_text == b.csv_text
        assert a.csv_text.startswith("# awisim-sweep-csv v1\n")

    def test_pump_flips_probe_response_sign(self):
        base = hg_gain_preset(pumped=False)
        spec = SweepSpec(
            base=base,
            axes=(SweepAxis("lambda_pump", 0.0, TWO_PI * 0.38, 2),
                  SweepAxis("delta_p", -TWO_PI * 5.0, TWO_PI * 5.0, 3)),
            method="dme")
        result = run_sweep(spec)
        response = result.column("im_rho12_over_omega_p")
        lam = result.column("lambda_pump")
        dp = result.column("delta_p")
        on_resonance = np.isclose(dp, 0.0)
        assert np.all(response[on_resonance & (lam == 0.0)] < 0.0)
        assert np.all(response[on_resonance & (lam > 0.0)] > 0.0)

    def test_errors_captured_per_row(self):
        # without pump the omega_w=0 rows leave |4> dark (and level 1 drains
        # only at O(omega_p^2)): degenerate steady states, captured per-row
        # while the remaining rows still evaluate
        base = scan_preset().replace(lambda_pump=0.0)
        spec = SweepSpec(base=base,
                         axes=(SweepAxis("omega_s", 0.0, 70.0, 2),
                               SweepAxis("omega_w", 0.0, 20.0, 2)),
                         method="dme")
        result = run_sweep(spec)
        assert len(result.rows) == 4
        errors = [row["error"] for row in result.rows]
        assert "dme" in errors[0]  # fully disconnected corner
        ok_rows = [row for row in result.rows if row["error"] == ""]
        assert len(ok_rows) >= 2
        for row in ok_rows:
            assert 0.0 <= row["p1"] <= 1.0

    def test_writes_file(self, tmp_path):
        out = tmp_path / "sweep.csv"
        spec = SweepSpec(base=scan_preset(), axes=(SweepAxis("delta_p", -5, 5, 3),),
                         method="semianalytic", out_path=str(out))
        run_sweep(spec)
        text = out.read_text()
        assert "sa_mean_delta_np" in text.splitlines()[5]

    def test_column_accessor(self):
        spec = SweepSpec(base=scan_preset(), axes=(SweepAxis("delta_p", -5, 5, 3),),
                         method="dme")
        result = run_sweep(spec)
        assert len(result.column("im_rho12_over_omega_p")) == 3
        with pytest.raises(KeyError):
            result.column("nope")


class TestCompareMethods:
    def test_identity_between_dme_and_period_statistics(self):
        spec = SweepSpec(base=scan_preset(),
                         axes=(SweepAxis("delta_p", -50.0, 50.0, 11),),
                         method="all", **small_mcwf_kwargs())
        report = compare_methods(spec)
        assert report.sign_agreement == 1.0
        assert report.correlation > 0.999999
        assert report.max_offset == 0

    def test_no_pump_grid_agrees_on_nonpositive(self):
        spec = SweepSpec(base=scan_preset().replace(lambda_pump=0.0),
                         axes=(SweepAxis("delta_p", -40.0, 40.0, 5),),
                         method="all", **small_mcwf_kwargs())
        report = compare_methods(spec)
        rows = report.result.rows
        assert all(row["im_rho12_over_omega_p"] <= 1e-15 for row in rows)
        assert all(row["sa_mean_delta_np"] <= 0.0 for row in rows)
        assert all(row["sax_mean_delta_np"] <= 1e-15 for row in rows)
        assert all(row["mc_mean_delta_np"] <= 0.0 for row in rows)


class TestCLI:
    def test_preset_round_trip(self, tmp_path):
        out = tmp_path / "hg.cfg"
        assert main(["preset", "hg-gain", "--out", str(out)]) == 0
        p, units = load_params(out)
        assert units == "us_inv"
        assert p == hg_gain_preset()

    def test_dme_sweep_units_conversion(self, tmp_path):
        cfg = tmp_path / "hg.cfg"
        main(["preset", "hg-gain", "--out", str(cfg)])
        out = tmp_path / "scan.csv"
        assert main(["dme-sweep", "--config", str(cfg),
                     "--sweep", "delta_p:-5:5:3", "--units", "two_pi_MHz",
                     "--out", str(out)]) == 0
        lines = [l for l in out.read_text().splitlines() if not l.startswith("#")]
        assert lines[0].startswith("delta_p,")
        # 5 MHz converted to gamma_21 units: 2*pi*5 / (2*pi*1.27) = 3.937
        last = float(lines[-1].split(",")[0])
        assert last == pytest.approx(5.0 / 1.27, rel=1e-12)

    def test_identical_runs_identical_bytes(self, tmp_path):
        cfg = tmp_path / "scan.cfg"
        save_params(scan_preset(), cfg)
        args = ["mcwf-run", "--config", str(cfg), "--sweep", "delta_p:-2:2:2",
                "--trajectories", "10", "--tmax", "30", "--seed", "4",
                "--out", ""]
        out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
        main(args[:-1] + [str(out1)])
        main(args[:-1] + [str(out2)])
        assert out1.read_bytes() == out2.read_bytes()

    def test_mcwf_single_point_and_periods_pipeline(self, tmp_path):
        cfg = tmp_path / "scan.cfg"
        save_params(scan_preset(), cfg)
        stats_csv = tmp_path / "stats.csv"
        events_csv = tmp_path / "events.csv"
        assert main(["mcwf-run", "--config", str(cfg), "--trajectories", "10",
                     "--tmax", "40", "--seed", "6", "--burn-in", "0",
                     "--out", str(stats_csv), "--events-out", str(events_csv)]) == 0
        stats2 = tmp_path / "stats2.csv"
        assert main(["periods", "--events", str(events_csv),
                     "--out", str(stats2)]) == 0
        assert stats_csv.read_text() == stats2.read_text()

    def test_compare_prints_summary(self, tmp_path, capsys):
        cfg = tmp_path / "scan.cfg"
        save_params(scan_preset(), cfg)
        out = tmp_path / "cmp.csv"
        assert main(["compare", "--config", str(cfg), "--sweep", "delta_p:-30:30:5",
                     "--trajectories", "8", "--tmax", "30", "--seed", "3",
                     "--out", str(out)]) == 0
        captured = capsys.readouterr().out
        assert "sign agreement" in captured
        assert "correlation" in captured

    def test_bad_sweep_flag(self, tmp_path):
        cfg = tmp_path / "scan.cfg"
        save_params(scan_preset(), cfg)
        with pytest.raises(SystemExit):
            main(["dme-sweep", "--config", str(cfg), "--sweep", "delta_p:0:1",
                  "--out", str(tmp_path / "x.csv")])
