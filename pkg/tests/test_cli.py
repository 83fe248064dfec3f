import json

import numpy as np
import pytest

from dampedjc import (
    ConfigError,
    ModelParams,
    PropagatorOrder,
    RunConfig,
    coherent_state,
    convergence_study,
    emit_plotscript,
    run_trajectory,
)
from dampedjc.cli import (
    InitialKind,
    config_from_dict,
    initial_state,
    load_state_file,
    main,
    observables,
)


# fixtures here run deliberately small cutoffs to keep the suite fast, so the
# occupancy guard is allowed to murmur; precision claims live in the other
# test modules
pytestmark = pytest.mark.filterwarnings(
    "ignore::dampedjc.errors.TruncationWarning")


def read_csv(path):
    comments, header, rows = [], None, []
    with open(path) as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line.startswith("#"):
                comments.append(line)
            elif header is None:
                header = line.split(",")
            else:
                rows.append([float(x) for x in line.split(",")])
    return comments, header, np.array(rows)


# ---------------------------------------------------------------------------
# configuration


def test_config_defaults_valid():
    cfg = RunConfig()
    p = cfg.model_params()
    assert isinstance(p, ModelParams)
    assert cfg.points >= 2 and cfg.t_max > 0 and cfg.methods


def test_config_from_dict_forms():
    cfg = config_from_dict({"alpha": "0.3+0.1j", "methods": "split2,oracle-expm",
                            "points": 5.0})
    assert cfg.alpha == 0.3 + 0.1j
    assert cfg.methods == ("split2", "oracle-expm")
    assert cfg.points == 5
    assert config_from_dict({"alpha": [1.0, -0.5]}).alpha == 1.0 - 0.5j
    assert config_from_dict({"alpha": 0.7}).alpha == 0.7 + 0j


def test_config_rejects_garbage():
    with pytest.raises(ConfigError):
        config_from_dict({"no_such_key": 1})
    with pytest.raises(ConfigError):
        config_from_dict({"methods": ["warp-drive"]})
    with pytest.raises(ConfigError):
        config_from_dict({"format": "xml"})
    with pytest.raises(ConfigError):
        config_from_dict({"points": 1})
    with pytest.raises(ConfigError):
        config_from_dict({"t_max": -1.0})
    with pytest.raises(ConfigError):
        config_from_dict({"alpha": "one-ish"})
    with pytest.raises(ConfigError):
        config_from_dict({"initial": "custom-file"})   # no path given
    with pytest.raises(ConfigError):
        # the closed-form column is tied to the two-component initial state
        config_from_dict({"methods": ["closed-form-example"],
                          "initial": "coherent-diagonal"})


def test_initial_states():
    cfg = config_from_dict({"dim": 12, "alpha": 0.6})
    rho = initial_state(cfg)
    assert rho.trace() == pytest.approx(1.0)
    assert rho.rho00[0, 0] == pytest.approx(0.5)
    assert np.abs(rho.rho01).max() == 0
    ket = coherent_state(0.6, 12)
    assert np.abs(rho.rho11 - 0.5 * np.outer(ket, ket.conj())).max() < 1e-14

    cfg2 = config_from_dict({"dim": 12, "alpha": 0.6, "initial": "coherent-diagonal"})
    rho2 = initial_state(cfg2)
    assert np.abs(rho2.rho00 - rho2.rho11).max() == 0
    assert rho2.trace() == pytest.approx(1.0)


def test_custom_state_file(tmp_path):
    d = 4
    rng = np.random.default_rng(41)
    blocks = {}
    for key in ("rho00", "rho01", "rho10", "rho11"):
        m = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        blocks[key] = np.stack([m.real, m.imag], axis=-1).tolist()
    path = tmp_path / "state.json"
    path.write_text(json.dumps({"dim": d, "blocks": blocks}))
    rho = load_state_file(str(path), d)
    assert rho.dim == d
    assert rho.rho01[1, 2] == pytest.approx(blocks["rho01"][1][2][0]
                                            + 1j * blocks["rho01"][1][2][1])
    with pytest.raises(ConfigError):
        load_state_file(str(path), 5)   # dim mismatch
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"dim": d, "blocks": {"rho00": [[0.0]]}}))
    with pytest.raises(ConfigError):
        load_state_file(str(bad), d)


# ---------------------------------------------------------------------------
# observables and trajectories


def test_observable_row_against_known_state():
    cfg = config_from_dict({"dim": 10, "alpha": 0.5})
    rho = initial_state(cfg)
    row = observables(rho, rho)
    assert row.trace == pytest.approx(1.0)
    assert row.p0 == pytest.approx(0.5)
    assert row.p1 == pytest.approx(0.5)
    # oscillator moments of (|0><0| + |alpha><alpha|)/2
    assert row.mean_n == pytest.approx(0.5 * 0.25, abs=1e-10)
    assert row.re_a == pytest.approx(0.5 * 0.5, abs=1e-10)
    assert row.im_a == pytest.approx(0.0, abs=1e-12)
    assert row.tdist_oracle == pytest.approx(0.0, abs=1e-14)
    assert row.min_eig > -1e-12


def test_run_trajectory_columns_and_t0():
    cfg = config_from_dict({"dim": 10, "points": 4, "t_max": 0.9, "alpha": 0.4,
                            "methods": ["oracle-expm", "split2"]})
    columns, rows = run_trajectory(cfg)
    assert columns[0] == "t"
    assert len(columns) == 1 + 2 * 8
    assert "split2_tdist_oracle" in columns
    assert len(rows) == 4
    # at t=0 every method reports the initial state exactly
    t0 = dict(zip(columns, rows[0]))
    assert t0["t"] == 0.0
    assert t0["oracle_expm_trace"] == pytest.approx(1.0, abs=1e-12)
    assert t0["split2_tdist_oracle"] < 1e-13


def test_split2_tracks_oracle_closely():
    # trace distance to the oracle stays small but visible at moderate times
    cfg = config_from_dict({"dim": 14, "points": 5, "t_max": 2.0, "alpha": 0.7,
                            "methods": ["split2"]})
    columns, rows = run_trajectory(cfg)
    dist = [r[columns.index("split2_tdist_oracle")] for r in rows]
    assert dist[0] < 1e-13
    assert all(d < 0.2 for d in dist)
    assert max(d for d in dist) > 1e-4   # single-shot at t~2 has real error


def test_splitting_exact_at_zero_coupling():
    cfg = config_from_dict({"dim": 16, "points": 5, "t_max": 2.0, "alpha": 0.5,
                            "Omega": 0.0, "methods": ["split2", "split3"]})
    columns, rows = run_trajectory(cfg)
    for name in ("split2_tdist_oracle", "split3_tdist_oracle"):
        col = [r[columns.index(name)] for r in rows]
        assert all(d < 1e-9 for d in col), (name, col)


def test_stepping_mode_beats_single_shot_at_long_times():
    base = {"dim": 12, "points": 3, "t_max": 3.0, "alpha": 0.6,
            "methods": ["split2"]}
    _, rows_single = run_trajectory(config_from_dict(base))
    _, rows_stepped = run_trajectory(config_from_dict({**base, "step_mode": "stepping"}))
    # column 7 is split2_tdist_oracle (t + 6 observables before it)
    cols, _ = run_trajectory(config_from_dict({**base, "points": 2}))
    k = cols.index("split2_tdist_oracle")
    assert rows_stepped[-1][k] < rows_single[-1][k]


def test_closed_form_example_column_matches_split2():
    cfg = config_from_dict({"dim": 24, "points": 5, "t_max": 2.0, "alpha": 1.0,
                            "mu": 0.2, "nu": 0.1,
                            "methods": ["split2", "closed-form-example"]})
    columns, rows = run_trajectory(cfg)
    for name in ("trace", "p0", "p1", "mean_n", "re_a", "im_a"):
        a = np.array([r[columns.index(f"split2_{name}")] for r in rows])
        b = np.array([r[columns.index(f"closed_form_example_{name}")] for r in rows])
        assert np.abs(a - b).max() < 1e-10, name


# ---------------------------------------------------------------------------
# convergence study


def test_convergence_study_slopes():
    cfg = config_from_dict({"dim": 10, "alpha": 0.6})
    rho0 = initial_state(cfg)
    res = convergence_study(rho0, cfg.model_params(), [0.32, 0.16, 0.08, 0.04])
    assert abs(res.slopes["split2"] - 2) < 0.3
    assert abs(res.slopes["split3"] - 3) < 0.3
    for errs in res.errors.values():
        assert all(a > b for a, b in zip(errs, errs[1:]))   # monotone in h


def test_convergence_study_exact_when_trivial():
    cfg = config_from_dict({"dim": 12, "alpha": 0.2, "Omega": 0.0})
    rho0 = initial_state(cfg)
    res = convergence_study(rho0, cfg.model_params(), [0.2, 0.1, 0.05])
    assert res.slopes["split2"] is None
    assert res.slopes["split3"] is None
    assert max(max(e) for e in res.errors.values()) < 1e-12


def test_convergence_study_validates_h_list():
    cfg = config_from_dict({"dim": 8, "alpha": 0.4})
    rho0 = initial_state(cfg)
    p = cfg.model_params()
    with pytest.raises(ConfigError):
        convergence_study(rho0, p, [0.2, 0.1])                 # too few
    with pytest.raises(ConfigError):
        convergence_study(rho0, p, [0.2, 0.1, 0.07])           # not geometric
    with pytest.raises(ConfigError):
        convergence_study(rho0, p, [0.2, -0.1, 0.05])


# ---------------------------------------------------------------------------
# CLI entry point


def run_main(tmp_path, *extra):
    out = tmp_path / "out.csv"
    code = main(["--dim", "10", "--points", "3", "--tmax", "1.0", "--alpha", "0.4",
                 "--method", "oracle-expm,split2", "--out", str(out), *extra])
    return code, out


def test_main_writes_csv(tmp_path):
    code, out = run_main(tmp_path)
    assert code == 0
    comments, header, rows = read_csv(out)
    assert comments[0] == "# schema_version=1"
    assert comments[1].startswith("# config=")
    embedded = json.loads(comments[1][len("# config="):])
    assert embedded["dim"] == 10
    assert embedded["methods"] == ["oracle-expm", "split2"]
    assert header[0] == "t"
    assert rows.shape == (3, 17)
    # 17 significant digits, scientific notation
    with open(out) as fh:
        for line in fh:
            if not line.startswith("#") and not line.startswith("t,"):
                first = line.split(",")[1]
                assert "e" in first and len(first.split("e")[0].replace("-", "")) == 18


def test_main_deterministic_output(tmp_path):
    code1, out = run_main(tmp_path)
    first = out.read_bytes()
    code2, out = run_main(tmp_path)
    assert code1 == code2 == 0
    assert out.read_bytes() == first


def test_main_json_format(tmp_path):
    out = tmp_path / "out.json"
    code = main(["--dim", "8", "--alpha", "0.4", "--points", "3", "--tmax", "0.5",
                 "--method", "split2", "--format", "json", "--out", str(out)])
    assert code == 0
    data = json.loads(out.read_text())
    assert data["schema_version"] == 1
    assert data["columns"][0] == "t"
    assert len(data["rows"]) == 3
    assert data["config"]["dim"] == 8


def test_main_reads_config_file(tmp_path):
    cfg_path = tmp_path / "run.json"
    out = tmp_path / "traj.csv"
    cfg_path.write_text(json.dumps({"dim": 12, "points": 3, "t_max": 0.4,
                                    "methods": ["split3"], "alpha": [0.4, 0.1]}))
    code = main(["--config", str(cfg_path), "--out", str(out)])
    assert code == 0
    _, header, rows = read_csv(out)
    assert "split3_mean_n" in header
    # CLI flag overrides file value
    code = main(["--config", str(cfg_path), "--points", "4", "--out", str(out)])
    assert code == 0
    assert read_csv(out)[2].shape[0] == 4


def test_main_exit_codes(tmp_path):
    out = tmp_path / "x.csv"
    # bad physics: mu <= nu
    assert main(["--mu", "0.1", "--nu", "0.5", "--out", str(out)]) == 2
    # unknown method
    assert main(["--method", "nope", "--out", str(out)]) == 2
    # missing config file
    assert main(["--config", str(tmp_path / "none.json")]) == 2
    # malformed config file
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["--config", str(bad)]) == 2
    # coherent state does not fit the requested cutoff
    assert main(["--dim", "8", "--alpha", "2.0", "--points", "3",
                 "--out", str(out)]) == 3


def test_main_convergence_study(tmp_path):
    out = tmp_path / "study.csv"
    code = main(["--study", "convergence", "--h-list", "0.2,0.1,0.05",
                 "--dim", "8", "--alpha", "0.4", "--out", str(out)])
    assert code == 0
    comments, header, rows = read_csv(out)
    assert "# study=convergence" in comments
    assert header == ["h", "split2_err", "split3_err"]
    assert rows.shape == (3, 3)
    slopes = [c for c in comments if c.startswith("# slope_")]
    assert len(slopes) == 2
    # study without h list is a usage error
    assert main(["--study", "convergence", "--out", str(out)]) == 2


def test_emit_plotscript(tmp_path):
    code, out = run_main(tmp_path)
    assert code == 0
    script = tmp_path / "plot.gp"
    emit_plotscript(str(out), str(script))
    text = script.read_text()
    assert "set datafile separator ','" in text
    assert "'split2_mean_n'" in text
    assert "'oracle_expm_tdist_oracle'" in text
    # idempotent re-emission
    emit_plotscript(str(out), str(script))
    assert script.read_text() == text
    with pytest.raises(FileNotFoundError):
        emit_plotscript(str(tmp_path / "missing.csv"), str(script))


def test_main_plotscript_flag(tmp_path):
    out = tmp_path / "t.csv"
    gp = tmp_path / "t.gp"
    code = main(["--dim", "8", "--alpha", "0.4", "--points", "3", "--tmax", "0.5",
                 "--method", "split2", "--out", str(out), "--plotscript", str(gp)])
    assert code == 0
    assert gp.exists()
    # plotscript without --out cannot work
    assert main(["--dim", "8", "--alpha", "0.4", "--points", "3",
                 "--method", "split2", "--plotscript", str(gp)]) == 2


def test_threads_env_does_not_change_results(tmp_path, monkeypatch, capsys):
    cfg = config_from_dict({"dim": 9, "points": 4, "t_max": 1.0, "alpha": 0.4,
                            "methods": ["oracle-expm", "split2", "split3"]})
    monkeypatch.setenv("LINDBLAD_JC_THREADS", "1")
    cols1, rows1 = run_trajectory(cfg)
    monkeypatch.setenv("LINDBLAD_JC_THREADS", "3")
    cols2, rows2 = run_trajectory(cfg)
    assert cols1 == cols2
    assert rows1 == rows2
    monkeypatch.setenv("LINDBLAD_JC_THREADS", "zebra")
    with pytest.raises(ConfigError):
        run_trajectory(cfg)


def test_propagator_order_values():
    assert {o.value for o in PropagatorOrder} == {"diagonal-only", "split2", "split3"}
    assert {k.value for k in InitialKind} == {"vacuum-excited", "coherent-diagonal",
                                              "custom-file"}
