import json

import numpy as np
import pytest

import ompath as om


@pytest.fixture(scope="module")
def quick_report(tmp_path_factory):
    out = tmp_path_factory.mktemp("bench")
    report = om.run_benchmark(
        out_dir=out,
        sim=om.SimConfig(dt=1e-2, T=1.0, m=40, seed=77),
        shooting=om.ShootingConfig(n=128),
        min_nodes=64,
    )
    return report, out


class TestBenchmarkSystem:
    def test_composition(self):
        system = om.benchmark_system()
        assert system.d == 2
        assert system.levy[0].alpha == 0.5
        assert system.levy[0].beta == 0.5
        assert system.levy[1].alpha == 0.7
        assert system.levy[1].beta == 0.0
        assert np.array_equal(system.x0, [1.0, 0.0])
        assert system.drift.meta["gamma"] == 1.0

    def test_digest_stable_across_calls(self):
        assert om.benchmark_system().digest == om.benchmark_system().digest


class TestRunBenchmark:
    def test_eta_vector(self, quick_report):
        report, _ = quick_report
        assert report.eta.eta[0] == pytest.approx(0.3989422804014327, rel=1e-12)
        assert report.eta.eta[1] == 0.0

    def test_symmetry_gate_passed(self, quick_report):
        report, _ = quick_report
        assert report.symmetry.passed

    def test_solvers_converged_and_agree(self, quick_report):
        report, _ = quick_report
        assert report.shooting.converged
        assert report.minimization.converged
        assert report.agreement_sup_norm < 5e-3  # coarse grids here
        assert report.max_abs_y == 0.0
        assert report.minimization.action < report.straight_line_action

    def test_band_shape(self, quick_report):
        report, _ = quick_report
        assert report.band.coverage.shape == (101,)
        assert np.all((report.band.coverage >= 0) & (report.band.coverage <= 1))
        assert report.band_epsilon == 0.3
        assert 0 <= report.ensemble_escaped <= 40

    def test_artifacts_on_disk(self, quick_report):
        report, out = quick_report
        assert sorted(report.artifacts) == ["band.csv", "mpp_path.csv",
                                            "report.json"]
        header = (out / "mpp_path.csv").read_text().splitlines()[0]
        assert header == "t,shooting_x1,shooting_x2,minimize_x1,minimize_x2"
        band_header = (out / "band.csv").read_text().splitlines()[0]
        assert band_header == "t,coverage"

    def test_report_json_contents(self, quick_report):
        report, out = quick_report
        doc = json.loads((out / "report.json").read_text())
        assert doc["schema_version"] == 1
        assert doc["system_digest"] == report.system_digest
        assert doc["eta"]["value"] == [float(v) for v in report.eta.eta]
        assert doc["shooting"]["converged"] is True
        assert doc["minimize"]["action"] == report.minimization.action
        assert doc["preferred_solver"] in ("shooting", "minimize")

    def test_no_out_dir_writes_nothing(self):
        report = om.run_benchmark(
            sim=om.SimConfig(dt=0.05, T=1.0, m=10, seed=1),
            shooting=om.ShootingConfig(n=64),
            min_nodes=16,
        )
        assert report.artifacts == ()

    def test_eta_override(self):
        report = om.run_benchmark(
            sim=om.SimConfig(dt=0.05, T=1.0, m=10, seed=1),
            shooting=om.ShootingConfig(n=64),
            min_nodes=16,
            eta_override=np.zeros(2),
        )
        assert np.array_equal(report.eta.eta, [0.0, 0.0])

    def test_deterministic_artifacts(self, quick_report, tmp_path):
        _, out = quick_report
        om.run_benchmark(
            out_dir=tmp_path,
            sim=om.SimConfig(dt=1e-2, T=1.0, m=40, seed=77),
            shooting=om.ShootingConfig(n=128),
            min_nodes=64,
        )
        for name in ("mpp_path.csv", "band.csv", "report.json"):
            assert (tmp_path / name).read_bytes() == (out / name).read_bytes()
