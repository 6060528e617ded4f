import json
import pathlib

import numpy as np
import pytest

import spillover as sp

DATA = pathlib.Path(__file__).resolve().parents[2] / "data"


def var1_panel(T=400, seed=7):
    rng = np.random.default_rng(seed)
    A = np.array([[0.3, 0.2], [0.0, 0.4]])
    x = np.zeros((T, 2))
    for t in range(1, T):
        x[t] = A @ x[t - 1] + rng.standard_normal(2)
    dates = [str(d) for d in np.busday_offset("2020-01-01", np.arange(T), roll="forward")]
    return sp.Panel(["A", "B"], dates, x)


def test_panel_roundtrip_and_csv():
    panel = sp.load_csv(DATA / "synthetic3.csv")
    assert panel.names == ["ALPHA", "BETA", "GAMMA"]
    assert panel.values.shape == (750, 3)
    returns = sp.first_difference(sp.cumulative_return(panel))
    assert len(returns) == 749


def test_var_fevd_connectedness():
    panel = var1_panel()
    model = sp.fit_var(panel, 1)
    assert model.coeffs[0].shape == (2, 2)
    assert model.spectral_radius() < 1
    fevd = sp.gfevd(model, 10)
    np.testing.assert_allclose(fevd.shares.sum(axis=1), 1.0, atol=1e-12)
    report = sp.connectedness(fevd)
    assert report.tci == pytest.approx(report.receiver.mean())
    assert report.net.sum() == pytest.approx(0.0, abs=1e-9)
    # B drives A in the DGP, so B is the net transmitter.
    assert report.net[1] > 0
    assert "digraph" in sp.export_network(report, 0.0)


def test_identity_fevd_network_has_no_edges():
    report = sp.connectedness(sp.fevd_from_shares(["X", "Y", "Z"], np.eye(3)))
    assert report.tci == 0.0
    assert "->" not in sp.export_network(report, 0.5)


def test_tests_return_results():
    rng = np.random.default_rng(3)
    walk = np.cumsum(rng.standard_normal(500))
    adf = sp.adf_test(walk)
    assert 0.0 <= adf.p_value <= 1.0
    assert adf.lags is not None
    assert sp.adf_test(np.diff(walk)).reject
    eg = sp.engle_granger(walk + rng.standard_normal(500), walk)
    assert eg.reject
    record = json.loads(eg.to_json(stars=True))
    assert set(record) >= {"test", "statistic", "p_value", "lags", "decision", "level"}
    jb = sp.jarque_bera(rng.standard_normal(500))
    assert 0.0 <= jb.p_value <= 1.0


def test_correlation_kinds():
    panel = var1_panel()
    for kind in ["pearson", "spearman", "kendall", "var-conditional", "var-partial"]:
        m = sp.correlation(panel, kind)
        np.testing.assert_allclose(np.diag(m), 1.0)
        assert np.allclose(m, m.T)


def test_dynamic_connectedness():
    panel = var1_panel()
    dyn = sp.dynamic_connectedness(panel, lag=1, horizon=5)
    assert len(dyn) == len(dyn.dates) == len(dyn.tci())
    pci = dyn.pair("A", "B", "pci")
    assert all(0.0 <= v < 1.0 for v in pci)
    traj = sp.tvp_filter(panel, kappa1=1.0, kappa2=1.0)
    ols = sp.fit_var(panel, 1)
    np.testing.assert_allclose(traj.coeffs[-1][:, 1:], ols.coeffs[0], atol=1e-6)


def test_errors_map_to_python_exceptions():
    with pytest.raises(sp.DataError):
        sp.load_csv(DATA / "does-not-exist.csv")
    with pytest.raises(sp.ParameterError):
        sp.gfevd(sp.fit_var(var1_panel(), 1), 0)
    assert issubclass(sp.NumericalError, sp.Error)


def test_run_pipeline(tmp_path):
    config = json.loads((DATA / "synthetic3.json").read_text())
    config["inputs"][0]["path"] = str(DATA / "synthetic3.csv")
    config["output"]["directory"] = str(tmp_path)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(config))
    result = sp.run_pipeline(path)
    manifest = json.loads(result["manifest"])
    artifacts = [a for s in manifest["stages"] for a in s["artifacts"]]
    assert len(artifacts) == 9
    for a in artifacts:
        assert (pathlib.Path(result["artifact_dir"]) / a).exists()
