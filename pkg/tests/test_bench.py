import csv
import json

import numpy as np
import pytest

from gaussmpo import bloch_messiah, synthesize_circuit
from gaussmpo.bench import (
    ExperimentConfig,
    Report,
    cheapest_gaussian,
    cheapest_tebd,
    compare,
    power_law_fit,
    resolve,
    run,
    run_gaussian,
    run_oracle,
    run_tebd,
)
from gaussmpo.cli import main


class TestExperimentConfig:
    def test_defaults(self):
        cfg = ExperimentConfig()
        assert cfg.species.name == "BOSONIC"
        assert ExperimentConfig(model="ising").species.is_fermionic
        assert cfg.steps == 10

    @pytest.mark.parametrize("kwargs", [
        {"model": "xy"},
        {"scheme": "dmrg"},
        {"N": 0},
        {"beta_resc": 0.0},
        {"M": 1},
        {"decomposition": "triangle"},
        {"order": 3},
    ])
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            ExperimentConfig(**kwargs)

    @pytest.mark.parametrize("beta_resc, dt, steps", [(0.1, 1e-2, 10), (1.0, 0.3, 4), (2.0, 0.5, 4)])
    def test_steps_from_dt(self, beta_resc, dt, steps):
        assert ExperimentConfig(beta_resc=beta_resc, dt=dt).steps == steps

    def test_dict_round_trip(self, tmp_path):
        cfg = ExperimentConfig(model="ising", N=5, beta_resc=2.5, scheme="tebd", order=4)
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(cfg.to_dict()))
        assert ExperimentConfig.from_json(path) == cfg

    def test_unknown_key(self):
        with pytest.raises(ValueError, match="unknown"):
            ExperimentConfig.from_dict({"N": 3, "temperature": 1.0})


class TestReport:
    def test_json_sorted(self):
        rep = Report(config={"b": 1, "a": 2}, eps_m=0.0, fpo={"svd": 3, "dot": 1})
        text = rep.to_json()
        data = json.loads(text)
        assert list(data) == sorted(data)
        assert data["bonds"]["file"] == "bonds.csv"
        # nan becomes null
        assert data["eps_gamma_rel"] is None

    def test_within(self):
        assert Report(config={}, eps_m=0.0, eps_gamma_rel=1e-3).within(1e-2)
        assert not Report(config={}, eps_m=0.0, eps_gamma_rel=1e-3, converged=False).within(1e-2)


class TestRunGaussian:
    def test_ising_low_temperature(self):
        rep = run_gaussian(ExperimentConfig(model="ising", N=6, beta_resc=10.0, oracle=True))
        assert rep.eps_m < 1e-2 and rep.eps_gamma_rel < 1e-2
        assert rep.oracle["trace_distance"] < 1e-2
        assert rep.local_dim == 2
        assert rep.fpo_total == sum(rep.fpo.values()) > 0

    def test_spin_boson_oracle(self):
        rep = run_gaussian(ExperimentConfig(N=4, M=6, beta_resc=2.0, oracle=True))
        assert rep.eps_gamma_rel < 1e-2
        assert rep.oracle["trace_distance"] < 1e-2
        assert rep.oracle["hermiticity"] < 10 * np.sqrt(rep.config["eps_rel"])

    def test_passive_model_has_no_squeezers(self):
        res = resolve(ExperimentConfig(N=5, beta_resc=2.0))
        plan = synthesize_circuit(bloch_messiah(res.nmd), "reck")
        assert plan.count("squeeze_single") == 0

    def test_bond_trace(self):
        rep = run_gaussian(ExperimentConfig(N=5, beta_resc=3.0))
        assert rep.max_bond == rep.bonds.max_rank() > 1
        assert {r[1] for r in rep.bonds.rows} == {1, 2, 3, 4}

    def test_oracle_skipped_when_too_large(self):
        rep = run_gaussian(ExperimentConfig(N=8, M=4, beta_resc=3.0, oracle=True, eps_rel=1e-4))
        assert "skipped" in rep.oracle

    def test_deterministic(self):
        cfg = ExperimentConfig(model="ising", N=5, beta_resc=1.0)
        a, b = run_gaussian(cfg), run_gaussian(cfg)
        assert a.fpo == b.fpo
        assert a.eps_gamma_rel == b.eps_gamma_rel
        assert a.bonds.rows == b.bonds.rows

    def test_wrong_scheme(self):
        with pytest.raises(ValueError):
            run_gaussian(ExperimentConfig(scheme="tebd"))
        with pytest.raises(ValueError):
            run_tebd(ExperimentConfig())


class TestRunTebd:
    def test_ising_high_temperature(self):
        cfg = ExperimentConfig(model="ising", N=6, beta_resc=0.1, scheme="tebd", order=2, dt=1e-2, oracle=True)
        rep = run_tebd(cfg)
        assert rep.config["dt"] == 1e-2
        assert rep.eps_m < 1e-2 and rep.eps_gamma_rel < 1e-2
        assert rep.oracle["trace_distance"] < 1e-2

    def test_dispatch(self):
        cfg = ExperimentConfig(model="ising", N=3, beta_resc=0.5, scheme="tebd", n_steps=2)
        assert run(cfg).fpo == run_tebd(cfg).fpo

    def test_tebd_costlier_than_gaussian(self):
        # matched 1e-2 targets at low temperature
        cfg = ExperimentConfig(N=6, beta_resc=3.0)
        g = cheapest_gaussian(cfg)
        t = cheapest_tebd(cfg)
        assert g.within(1e-2) and t.within(1e-2)
        assert t.fpo_total > g.fpo_total


def test_run_oracle():
    out = run_oracle(ExperimentConfig(model="ising", N=4, beta_resc=1.0))
    assert out["dim"] == 16
    assert out["eps_gamma_rel"] < 1e-10
    assert out["gap"] == pytest.approx(1.0 / out["beta"])


class TestPowerLaw:
    def test_exact_power(self):
        xs = np.array([2.0, 4.0, 8.0, 16.0])
        c, alpha = power_law_fit(xs, 3.0 * xs**1.7)
        assert c == pytest.approx(3.0, rel=1e-8)
        assert alpha == pytest.approx(1.7, rel=1e-8)

    def test_too_few_points(self):
        with pytest.raises(ValueError):
            power_law_fit([1.0], [2.0])


class TestCompare:
    def test_single_row(self):
        out = compare([ExperimentConfig(model="ising", N=3, beta_resc=1.0)])
        assert len(out["rows"]) == 1
        assert out["fits"] == []

    def test_duplicates_identical(self):
        cfg = ExperimentConfig(model="ising", N=4, beta_resc=1.0)
        rows = compare([cfg, cfg])["rows"]
        assert rows[0]["fpo_total"] == rows[1]["fpo_total"]

    def test_fit_per_group(self):
        cfgs = [ExperimentConfig(model="ising", N=n, beta_resc=1.0) for n in (4, 6, 8)]
        cfgs.append(ExperimentConfig(model="ising", N=4, beta_resc=2.0))
        out = compare(cfgs)
        assert len(out["rows"]) == 4
        assert len(out["fits"]) == 1
        assert out["fits"][0]["group"]["beta_resc"] == 1.0


class TestCli:
    def test_chain_map(self, tmp_path):
        assert main(["chain-map", "--N", "5", "--out", str(tmp_path)]) == 0
        with open(tmp_path / "coeffs.csv") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["k", "omega", "t"]
        assert len(rows) == 6
        assert float(rows[1][1]) == pytest.approx(2.0, abs=1e-6)
        report = json.loads((tmp_path / "report.json").read_text())
        assert report["t_0"] == pytest.approx(0.56419, abs=1e-5)

    def test_construct_with_config_file(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"model": "ising", "N": 4, "beta_resc": 3.0}))
        out = tmp_path / "out"
        assert main(["construct", "--config", str(cfg), "--N", "5", "--out", str(out)]) == 0
        text = (out / "report.json").read_text()
        report = json.loads(text)
        assert list(report) == sorted(report)
        assert report["config"]["N"] == 5
        assert report["config"]["scheme"] == "gaussian"
        with open(out / "bonds.csv") as fh:
            header = next(csv.reader(fh))
        assert header == ["gate_index", "bond_index", "rank"]

    def test_tebd(self, tmp_path):
        argv = ["tebd", "--model", "ising", "--N", "4", "--beta-resc", "0.5", "--n-steps", "3",
                "--order", "1", "--out", str(tmp_path)]
        assert main(argv) == 0
        report = json.loads((tmp_path / "report.json").read_text())
        assert report["config"]["order"] == 1
        assert (tmp_path / "bonds.csv").exists()

    def test_oracle(self, tmp_path):
        assert main(["oracle", "--model", "ising", "--N", "3", "--oracle", "true", "--out", str(tmp_path)]) == 0
        assert json.loads((tmp_path / "report.json").read_text())["dim"] == 8

    def test_min_dim(self, tmp_path, capsys):
        assert main(["min-dim", "--beta-resc", "1.0", "4.0", "--out", str(tmp_path)]) == 0
        rows = json.loads((tmp_path / "report.json").read_text())["rows"]
        assert [r["M"] for r in rows] == [8, 3]
        assert "M=8" in capsys.readouterr().out

    def test_compare_sweep(self, tmp_path):
        spec = {"base": {"model": "ising", "beta_resc": 1.0}, "sweep": {"N": [3, 4, 5]}}
        cfg = tmp_path / "sweep.json"
        cfg.write_text(json.dumps(spec))
        assert main(["compare", "--config", str(cfg), "--out", str(tmp_path)]) == 0
        with open(tmp_path / "compare.csv") as fh:
            rows = list(csv.DictReader(fh))
        assert [int(r["N"]) for r in rows] == [3, 4, 5]
        assert len(json.loads((tmp_path / "report.json").read_text())["fits"]) == 1

    def test_bad_bool(self, tmp_path):
        with pytest.raises(SystemExit):
            main(["oracle", "--oracle", "maybe", "--out", str(tmp_path)])
