import math

import numpy as np
import pytest

from eitls.data_access.eit_store import DatasetStore, ResultStore
from eitls.data_access.errors import DatasetNotFoundError, ResultDirError
from eitls.data_access.file_store import FileStore
from eitls.data_access.vtk_writer import read_vtk_scalars, write_vtk
from eitls.entities.eit_entities import ConvergenceRecord, ConvergenceRow, NodalField, NoiseSpec
from eitls.inverse.synth.synthetic import generate_dataset
from eitls.utils.constants import TERMINATION


@pytest.fixture(scope="module")
def dataset(ellipse, ellipse_mesh):
    return generate_dataset(ellipse, ellipse_mesh, 6, NoiseSpec(level=0.01, seed=3))


def test_key_values(tmp_path):
    store = FileStore(tmp_path)
    (tmp_path / "values.txt").write_text("# header\na = 1\n\nb= two # note\nnot a pair\n")
    assert store.read_key_values("values.txt") == {"a": "1", "b": "two"}

    store.write_key_values("out.txt", {"x": 1, "y": "z"})
    assert store.read_text("out.txt") == "x = 1\ny = z\n"


def test_dataset_round_trip(tmp_path, dataset, ellipse_mesh):
    store = DatasetStore(tmp_path / "data")
    store.save(dataset)

    names = sorted(path.name for path in store.root.iterdir())
    assert names == ["m_001.csv", "m_002.csv", "m_003.csv", "mesh_gen.txt", "meta.txt",
                     "mt_001.csv", "mt_002.csv", "mt_003.csv"]

    meta = store.load_meta()
    assert meta["E"] == 6 and meta["seed"] == 3 and meta["eps"] == 0.01
    assert meta["prng"] == "numpy.SFC64"
    assert meta["shape"] == dataset.shape.to_text()
    assert meta["width"] == dataset.patterns[0].width

    assert np.array_equal(store.load_mesh().vertices, ellipse_mesh.vertices)
    assert store.load_patterns() == dataset.patterns
    assert store.load_noise() == dataset.noise

    for loaded, original in zip(store.load_measurements(), dataset.noisy):
        assert loaded.index == original.index
        assert np.array_equal(loaded.angles, original.angles)
        assert np.array_equal(loaded.values, original.values)
    for loaded, original in zip(store.load_measurements(clean=True), dataset.clean):
        assert np.array_equal(loaded.values, original.values)


def test_boundary_csv_header(tmp_path, dataset):
    store = DatasetStore(tmp_path)
    store.write_boundary("m.csv", dataset.clean[0])
    assert store.read_text("m.csv").splitlines()[0] == "angle,value"


def test_missing_dataset(tmp_path):
    store = DatasetStore(tmp_path / "nowhere")
    with pytest.raises(DatasetNotFoundError):
        store.load_meta()
    with pytest.raises(DatasetNotFoundError):
        store.load_mesh()


def test_incomplete_dataset(tmp_path, dataset):
    store = DatasetStore(tmp_path)
    store.save(dataset)
    (tmp_path / "mt_002.csv").unlink()
    with pytest.raises(DatasetNotFoundError):
        store.load_measurements()

    (tmp_path / "meta.txt").write_text("E = 6\n")
    with pytest.raises(DatasetNotFoundError):
        store.load_meta()


def test_convergence_round_trip(tmp_path):
    record = ConvergenceRecord()
    record.append(ConvergenceRow(0, 0.125, 0.5, 1.0 / 3.0, 2, None))
    record.append(ConvergenceRow(1, 0.0625, 1e-13, 0.0, 0, 0.25))
    record.finish(TERMINATION["CONVERGED"])

    store = ResultStore(tmp_path)
    path = store.write_convergence(record)
    lines = path.read_text().splitlines()
    assert lines[0] == "iter,J,grad_inf,step,backtracks,eps_err"
    assert lines[1].endswith(",nan")
    assert lines[-1] == "# reason=converged"

    again = store.read_convergence()
    assert again.rows == record.rows
    assert again.reason == "converged"


def test_missing_convergence(tmp_path):
    with pytest.raises(ResultDirError):
        ResultStore(tmp_path).read_convergence()


def test_summary_round_trip(tmp_path):
    store = ResultStore(tmp_path)
    store.write_summary({"M": 8, "gamma": 0.001, "eps": 0.01, "seed": 0, "iterations": 12,
                         "J_final": 1.5e-7, "grad_inf_final": 2e-9, "eps_err": math.nan,
                         "reason": "max_iters"})
    summary = store.read_summary()
    assert summary["M"] == 8 and summary["iterations"] == 12
    assert summary["gamma"] == 0.001 and summary["J_final"] == 1.5e-7
    assert math.isnan(summary["eps_err"])
    assert summary["reason"] == "max_iters"


def test_malformed_summary(tmp_path):
    (tmp_path / "summary.txt").write_text("M = 8\n")
    with pytest.raises(ResultDirError):
        ResultStore(tmp_path).read_summary()

    (tmp_path / "summary.txt").write_text(
        "M = eight\ngamma = 1\neps = 0\nseed = 0\niterations = 1\nJ_final = 1\n"
        "grad_inf_final = 1\neps_err = nan\nreason = converged\n")
    with pytest.raises(ResultDirError):
        ResultStore(tmp_path).read_summary()


def test_vtk_round_trip(tmp_path, coarse_mesh):
    field = NodalField(coarse_mesh, np.sin(coarse_mesh.vertices[:, 0]) + 1.0 / 3.0, "sigma")
    path = write_vtk(field, "sigma", tmp_path / "sigma.vtk")

    lines = path.read_text().splitlines()
    assert lines[0] == "# vtk DataFile Version 3.0"
    assert f"POINTS {coarse_mesh.vertex_count} double" in lines
    assert f"CELLS {coarse_mesh.triangle_count} {4 * coarse_mesh.triangle_count}" in lines

    name, points, values = read_vtk_scalars(path)
    assert name == "sigma"
    assert np.array_equal(points, coarse_mesh.vertices)
    assert np.array_equal(values, field.values)


def test_vtk_truncated(tmp_path, coarse_mesh):
    path = write_vtk(NodalField(coarse_mesh, np.ones(coarse_mesh.vertex_count)), "f", tmp_path / "f.vtk")
    path.write_text("\n".join(path.read_text().splitlines()[:-3]) + "\n")
    with pytest.raises(ResultDirError):
        read_vtk_scalars(path)

    path.write_text("# vtk DataFile Version 3.0\nf\nASCII\n")
    with pytest.raises(ResultDirError):
        read_vtk_scalars(path)


@pytest.mark.parametrize("name", ["", "two words"])
def test_vtk_name(tmp_path, coarse_mesh, name):
    field = NodalField(coarse_mesh, np.zeros(coarse_mesh.vertex_count))
    with pytest.raises(ValueError):
        write_vtk(field, name, tmp_path / "field.vtk")


def test_fields_and_snapshots(tmp_path, coarse_mesh):
    store = ResultStore(tmp_path)
    field = NodalField(coarse_mesh, np.ones(coarse_mesh.vertex_count))
    written = store.write_fields({"q": field, "H": field})
    assert sorted(path.name for path in written) == ["H.vtk", "q.vtk"]

    store.write_snapshot(10, {"f": field})
    store.write_snapshot(1, {"f": field})
    assert [path.name for path in store.snapshot_dirs()] == ["snapshot_001", "snapshot_010"]
    assert (tmp_path / "snapshot_010" / "f.vtk").is_file()
