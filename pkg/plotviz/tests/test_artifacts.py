"""Loader behavior against the committed golden runs and mutations of them."""

import json

import numpy as np
import pytest

from plotviz import RunArtifacts, SchemaError, load_run
from plotviz.artifacts import load_metrics, load_points

GOLDEN_NAMES = ["ball_mirrorvt", "ball_projvt", "simplex_mirrorvt"]


@pytest.mark.parametrize("name", GOLDEN_NAMES)
def test_golden_run_loads_and_cross_checks(golden, name):
    art = load_run(golden / name)
    assert isinstance(art, RunArtifacts)
    assert art.iterations[0] == 0
    final = int(art.iterations[-1])
    assert 0 in art.snapshots and final in art.snapshots
    assert set(art.snapshots) <= set(art.iterations.tolist())
    assert np.all(np.isfinite(art.mmds)) and np.all(art.mmds >= 0)
    assert art.targets.shape[1] == art.dim
    assert art.domain in ("ball", "simplex")
    for key in ("scenario", "algorithm", "functional", "seed"):
        assert key in art.meta


def test_golden_dimensions(golden):
    assert load_run(golden / "ball_mirrorvt").dim == 2
    assert load_run(golden / "simplex_mirrorvt").dim == 5


def test_missing_run_dir(tmp_path):
    with pytest.raises(FileNotFoundError, match="run directory"):
        load_run(tmp_path / "nope")


def test_missing_metrics_file(copy_run):
    run = copy_run("ball_mirrorvt")
    (run / "metrics.csv").unlink()
    with pytest.raises(FileNotFoundError, match="metrics.csv"):
        load_run(run)


def test_corrupted_metrics_header(copy_run):
    run = copy_run("ball_mirrorvt")
    path = run / "metrics.csv"
    lines = path.read_text().splitlines()
    lines[0] = "iteration,mmd,objective,clamps,wallclock_ms"
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(SchemaError, match="header mismatch"):
        load_run(run)


def test_metrics_requires_data_rows(tmp_path):
    path = tmp_path / "metrics.csv"
    path.write_text("iter,mmd,objective,clamps,wallclock_ms\n")
    with pytest.raises(SchemaError, match="no data rows"):
        load_metrics(path)


def test_metrics_rejects_non_monotone_iterations(copy_run):
    run = copy_run("ball_mirrorvt")
    path = run / "metrics.csv"
    lines = path.read_text().splitlines()
    lines.append(lines[-1])  # duplicate final iteration
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(SchemaError, match="increase strictly"):
        load_run(run)


def test_metrics_rejects_negative_mmd(copy_run):
    run = copy_run("ball_mirrorvt")
    path = run / "metrics.csv"
    lines = path.read_text().splitlines()
    cells = lines[1].split(",")
    cells[1] = "-0.5"
    lines[1] = ",".join(cells)
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(SchemaError, match="negative mmd"):
        load_run(run)


def test_metrics_rejects_non_numeric_cell(copy_run):
    run = copy_run("ball_mirrorvt")
    path = run / "metrics.csv"
    lines = path.read_text().splitlines()
    lines[2] = lines[2].replace(",", ",oops", 1)
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(SchemaError, match="non-numeric"):
        load_run(run)


def test_points_rejects_out_of_order_ids(tmp_path):
    path = tmp_path / "targets.csv"
    path.write_text("target_id,x1,x2\n1,0.0,0.0\n0,1.0,1.0\n")
    with pytest.raises(SchemaError, match="0..n-1"):
        load_points(path, "target_id")


def test_points_rejects_wrong_id_column(tmp_path):
    path = tmp_path / "particles_0.csv"
    path.write_text("row,x1,x2\n0,0.0,0.0\n")
    with pytest.raises(SchemaError, match="header mismatch"):
        load_points(path, "particle_id")


def test_stray_snapshot_iteration(copy_run):
    run = copy_run("ball_mirrorvt")
    # metrics.csv logs iterations 0..30, so 999 was never logged
    (run / "particles_999.csv").write_text((run / "particles_0.csv").read_text())
    with pytest.raises(SchemaError, match="never appear"):
        load_run(run)


def test_malformed_snapshot_name(copy_run):
    run = copy_run("ball_mirrorvt")
    (run / "particles_final.csv").write_text((run / "particles_0.csv").read_text())
    with pytest.raises(SchemaError, match="malformed snapshot"):
        load_run(run)


def test_missing_initial_snapshot(copy_run):
    run = copy_run("ball_mirrorvt")
    (run / "particles_0.csv").unlink()
    with pytest.raises(SchemaError, match="particles_0.csv"):
        load_run(run)


def test_missing_final_snapshot(copy_run):
    run = copy_run("ball_mirrorvt")
    final = int(load_metrics(run / "metrics.csv")["iter"][-1])
    (run / f"particles_{final}.csv").unlink()
    with pytest.raises(SchemaError, match=f"particles_{final}.csv"):
        load_run(run)


def test_no_snapshots_at_all(copy_run):
    run = copy_run("ball_mirrorvt")
    for path in run.glob("particles_*.csv"):
        path.unlink()
    with pytest.raises(SchemaError, match="no particle snapshots"):
        load_run(run)


def test_target_particle_dimension_mismatch(copy_run):
    run = copy_run("ball_mirrorvt")
    path = run / "targets.csv"
    lines = path.read_text().splitlines()
    lines[0] += ",x3"
    lines[1:] = [line + ",0.0" for line in lines[1:]]
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(SchemaError, match="dimension"):
        load_run(run)


def test_snapshot_shape_disagreement(copy_run):
    run = copy_run("ball_mirrorvt")
    path = run / "particles_10.csv"
    lines = path.read_text().splitlines()
    path.write_text("\n".join(lines[:-1]) + "\n")  # drop one particle
    with pytest.raises(SchemaError, match="disagree"):
        load_run(run)


def test_meta_missing_required_key(copy_run):
    run = copy_run("ball_mirrorvt")
    path = run / "run.json"
    meta = json.loads(path.read_text())
    del meta["domain"]
    path.write_text(json.dumps(meta))
    with pytest.raises(SchemaError, match="missing keys: domain"):
        load_run(run)


def test_meta_invalid_json(copy_run):
    run = copy_run("ball_mirrorvt")
    (run / "run.json").write_text("{not json")
    with pytest.raises(SchemaError, match="invalid JSON"):
        load_run(run)


def test_meta_must_be_object(copy_run):
    run = copy_run("ball_mirrorvt")
    (run / "run.json").write_text("[1, 2]")
    with pytest.raises(SchemaError, match="JSON object"):
        load_run(run)
