import json
import math

import numpy as np
import pytest

from fusionsd.alphabets import frame_alphabets
from fusionsd.errors import BadData, BadParameter
from fusionsd.experiments import (CSV_HEADER, ExperimentConfig, decode_indices,
                                  example1_config, example2_config, fit_slope,
                                  read_result_csv, run_experiment,
                                  stability_trials, write_index_stream)
from fusionsd.frames import example_frame_r3, random_frame

SMALL_SIGNAL = (0.04, 0.05, 0.02)


def small_config(**overrides):
    base = dict(order=2, delta=0.1, sigma=50, alpha=1.101,
                signal=SMALL_SIGNAL, n_grid=(12, 30))
    base.update(overrides)
    return ExperimentConfig(**base)


# -------------------------------------------------------------- validation

def test_validate_accepts_reference_configs():
    example1_config().validate()
    example2_config().validate()


def test_validate_rejects_bad_order():
    with pytest.raises(BadParameter):
        small_config(order=0).validate()


def test_validate_rejects_empty_grid():
    with pytest.raises(BadParameter):
        small_config(n_grid=()).validate()


def test_validate_rejects_small_n():
    with pytest.raises(BadParameter):
        small_config(n_grid=(2, 30)).validate()


def test_validate_rejects_unknown_frame_kind():
    with pytest.raises(BadParameter):
        small_config(frame_kind="mystery").validate()


def test_validate_rejects_wrong_signal_dim():
    with pytest.raises(BadParameter):
        small_config(signal=(0.1, 0.0)).validate()


def test_validate_signal_norm_gate():
    big = tuple(5.0 * s for s in SMALL_SIGNAL)
    with pytest.raises(BadParameter):
        small_config(signal=big).validate()
    with pytest.warns(UserWarning):
        small_config(signal=big, allow_large_signal=True).validate()


def test_auto_resolution():
    cfg = small_config(sigma="auto", alpha="auto")
    f, stab = cfg.resolve()
    assert stab.alpha == pytest.approx(1.101)
    assert f.sigma == 50
    assert stab.c_bound == pytest.approx(440400.0 / 212201.0)


def test_resolve_with_pinned_values():
    f, stab = small_config().resolve()
    assert f.sigma == 50 and f.order == 2
    assert stab.alpha == pytest.approx(1.101)


# ------------------------------------------------------------- round trips

def test_config_json_roundtrip(tmp_path):
    cfg = small_config(frame_kind="random", frame_seed=9,
                       frame_dims=(2, 1), frame_ambient_dim=3)
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg.to_dict()))
    back = ExperimentConfig.from_json(path)
    assert back == cfg


def test_config_from_dict_malformed():
    with pytest.raises(BadData):
        ExperimentConfig.from_dict({"order": 2})


def test_index_stream_roundtrip(tmp_path):
    fr = example_frame_r3(20)
    als = frame_alphabets(fr)
    indices = np.arange(20) % 3
    path = tmp_path / "stream.txt"
    write_index_stream(path, indices)
    back = [int(line) for line in path.read_text().split()]
    assert back == list(indices)
    blocks = decode_indices(als, back)
    assert fr.membership_residual(blocks) < 1e-12


def test_decode_indices_range_check():
    fr = example_frame_r3(4)
    als = frame_alphabets(fr)
    with pytest.raises(BadData):
        decode_indices(als, [0, 1, 3, 0])


# ---------------------------------------------------------------- sweeps

def test_run_experiment_writes_csv(tmp_path):
    csv_path = tmp_path / "sweep.csv"
    plot_path = tmp_path / "sweep.gp"
    cfg = small_config(out_csv=str(csv_path), plot_script=str(plot_path))
    rows = run_experiment(cfg)
    assert [r.n for r in rows] == [12, 30]
    text = csv_path.read_text().splitlines()
    assert text[0] == ",".join(CSV_HEADER)
    assert len(text) == 3
    assert plot_path.exists()
    assert "logscale" in plot_path.read_text()
    back = read_result_csv(csv_path)
    for row, rec in zip(rows, back):
        assert rec["N"] == row.n
        assert rec["err_sobolev"] == pytest.approx(row.err_sobolev, rel=1e-15)
        assert rec["apriori_bound"] == pytest.approx(row.apriori_bound, rel=1e-15)


def test_run_experiment_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run_experiment(small_config(), csv_path=str(a))
    run_experiment(small_config(), csv_path=str(b))
    assert a.read_bytes() == b.read_bytes()


def test_row_quantities_are_sane():
    rows = run_experiment(small_config())
    for r in rows:
        assert r.err_sobolev <= r.apriori_bound
        assert 0 < r.err_sobolev < 1
        assert 0 < r.err_canonical < 1
        assert r.err_memoryless > r.err_sobolev
        assert np.isfinite(r.max_state_norm)
        assert r.l_dr_norm > 0


def test_degenerate_single_row_grid():
    rows = run_experiment(small_config(n_grid=(3,)))
    assert len(rows) == 1 and rows[0].n == 3
    with pytest.raises(BadData):
        fit_slope(rows, "err_sobolev")


def test_partial_rows_flushed_on_failure(tmp_path):
    frame_path = tmp_path / "frame.json"
    random_frame(3, [2, 2, 1, 2] * 10, seed=3).save_json(frame_path)
    csv_path = tmp_path / "partial.csv"
    cfg = small_config(frame_kind="file", frame_path=str(frame_path),
                       n_grid=(12, 60))
    with pytest.raises(BadParameter):
        run_experiment(cfg, csv_path=str(csv_path))
    text = csv_path.read_text().splitlines()
    assert text[0] == ",".join(CSV_HEADER)
    assert len(text) == 2 and text[1].startswith("12,")


def test_random_frame_sweep():
    cfg = small_config(frame_kind="random", frame_seed=5, frame_dims=(2, 1, 2),
                       frame_ambient_dim=3, n_grid=(10, 20))
    rows = run_experiment(cfg)
    assert len(rows) == 2
    assert all(r.err_sobolev < r.err_memoryless for r in rows)


# ------------------------------------------------------------------ slopes

def test_fit_slope_synthetic_inverse_n():
    rows = [{"N": n, "err": 7.0 / n} for n in (10, 20, 40, 80, 160)]
    assert fit_slope(rows, "err") == pytest.approx(-1.0, abs=1e-9)


def test_fit_slope_synthetic_cubic():
    rows = [{"N": n, "err": 3.5 / n ** 3} for n in (10, 30, 90, 270)]
    assert fit_slope(rows, "err") == pytest.approx(-3.0, abs=1e-9)


def test_fit_slope_min_n_filter():
    rows = [{"N": n, "err": (1.0 if n < 100 else 7.0) / n}
            for n in (10, 20, 40, 100, 200, 400, 800)]
    assert fit_slope(rows, "err", min_n=100) == pytest.approx(-1.0, abs=1e-9)


def test_fit_slope_needs_three_rows():
    rows = [{"N": 10, "err": 0.1}, {"N": 20, "err": 0.05}]
    with pytest.raises(BadData):
        fit_slope(rows, "err")


def test_fit_slope_rejects_nonpositive():
    rows = [{"N": n, "err": 0.1 - 0.05 * i} for i, n in enumerate((10, 20, 40))]
    with pytest.raises(BadData):
        fit_slope(rows, "err")


def test_read_result_csv_missing_file_and_empty(tmp_path):
    with pytest.raises((BadData, OSError)):
        read_result_csv(tmp_path / "nope.csv")
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    with pytest.raises(BadData):
        read_result_csv(empty)


# --------------------------------------------------------------- stability

def test_stability_trials_vacuous():
    report = stability_trials(0, small_config())
    assert report["verdict"] == "PASS"
    assert report["trials"] == 0
    assert report["max_state_norm"] == 0.0


def test_stability_trials_small_batch():
    report = stability_trials(8, small_config(), n_blocks=60)
    assert report["verdict"] == "PASS"
    assert report["violations"] == 0
    assert 0 < report["max_state_norm"] <= report["c_bound"]
    assert report["c_bound"] == pytest.approx(440400.0 / 212201.0)


def test_stability_trials_seeded():
    a = stability_trials(4, small_config(), n_blocks=40, seed=11)
    b = stability_trials(4, small_config(), n_blocks=40, seed=11)
    assert a == b


def test_stability_trials_rejects_negative():
    with pytest.raises(BadParameter):
        stability_trials(-1, small_config())
