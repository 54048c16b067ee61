import pandas as pd
import pytest

from eitls.cli import main
from eitls.cli.errors import RunConfigError
from eitls.cli.run_config import RunConfig
from eitls.data_access.mesh_io import read_mesh
from eitls.utils.constants import DEFAULT_SHAPES

ELLIPSE = DEFAULT_SHAPES["ELLIPSE"]


@pytest.fixture(scope="module")
def meshes(tmp_path_factory):
    root = tmp_path_factory.mktemp("meshes")
    assert main(["mesh", "--h", "0.12", "--shape", ELLIPSE, "--out", str(root / "gen.txt")]) == 0
    assert main(["mesh", "--h", "0.2", "--out", str(root / "recon.txt")]) == 0
    return root / "gen.txt", root / "recon.txt"


@pytest.fixture(scope="module")
def dataset(tmp_path_factory, meshes):
    out = tmp_path_factory.mktemp("dataset")
    code = main(["simulate", "--gen-mesh", str(meshes[0]), "--shape", ELLIPSE,
                 "--E", "6", "--eps", "0.01", "--seed", "4", "--out", str(out)])
    assert code == 0
    return out


def test_mesh_command(meshes):
    assert read_mesh(meshes[1]).vertex_count > 0


@pytest.mark.parametrize("h", ["-1", "0", "1", "abc"])
def test_mesh_rejects_edge_length(tmp_path, h):
    assert main(["mesh", "--h", h, "--out", str(tmp_path / "m.txt")]) == 2
    assert not (tmp_path / "m.txt").exists()


def test_mesh_rejects_bad_shape(tmp_path):
    assert main(["mesh", "--h", "0.2", "--shape", "ellipse 0 0", "--out", str(tmp_path / "m.txt")]) == 2


def test_unknown_command():
    assert main(["draw"]) == 2


def test_help():
    assert main(["--help"]) == 0


def test_simulate_writes_files(dataset):
    names = sorted(path.name for path in dataset.iterdir())
    assert names == ["m_001.csv", "m_002.csv", "m_003.csv", "mesh_gen.txt", "meta.txt",
                     "mt_001.csv", "mt_002.csv", "mt_003.csv"]


def test_simulate_without_noise(tmp_path, meshes):
    code = main(["simulate", "--gen-mesh", str(meshes[0]), "--shape", ELLIPSE,
                 "--E", "4", "--eps", "0", "--out", str(tmp_path)])
    assert code == 0
    for j in (1, 2):
        assert (tmp_path / f"m_{j:03d}.csv").read_text() == (tmp_path / f"mt_{j:03d}.csv").read_text()


@pytest.mark.parametrize("extra", [["--E", "5"], ["--eps", "-0.1"], ["--shape", "blob"]])
def test_simulate_usage_errors(tmp_path, meshes, extra):
    args = ["simulate", "--gen-mesh", str(meshes[0]), "--shape", ELLIPSE, "--out", str(tmp_path)]
    assert main(args + extra) == 2


def test_simulate_non_conforming_mesh(tmp_path, meshes):
    code = main(["simulate", "--gen-mesh", str(meshes[1]), "--shape", ELLIPSE, "--out", str(tmp_path)])
    assert code == 1


def test_simulate_from_config(tmp_path, meshes):
    config = tmp_path / "run.cfg"
    config.write_text(f"gen_mesh = {meshes[0]}\nshape = {ELLIPSE}\nE = 2\neps = 0.05  # noise\nout = {tmp_path / 'd'}\n")
    assert main(["simulate", "--config", str(config), "--E", "4"]) == 0
    assert (tmp_path / "d" / "mt_002.csv").is_file()


def test_reconstruct_and_evaluate(tmp_path, meshes, dataset):
    out = tmp_path / "run"
    code = main(["reconstruct", "--dataset", str(dataset), "--recon-mesh", str(meshes[1]), "--out", str(out),
                 "--gamma", "0.05", "--alpha", "0.05", "--max-iters", "2", "--snapshots", "0,1", "--truth"])
    assert code == 0
    for name in ("convergence.csv", "summary.txt", "q.vtk", "H.vtk", "sigma.vtk", "f.vtk", "lambda.vtk"):
        assert (out / name).is_file()
    assert (out / "snapshot_001" / "f.vtk").is_file()

    history = pd.read_csv(out / "convergence.csv", comment="#")
    assert list(history.columns) == ["iter", "J", "grad_inf", "step", "backtracks", "eps_err"]
    assert history["eps_err"].notna().all()

    table = tmp_path / "table.csv"
    assert main(["evaluate", str(out), "--out", str(table)]) == 0
    frame = pd.read_csv(table)
    assert frame["M"].tolist() == [3]
    assert frame["gamma"].tolist() == pytest.approx([0.05])


def test_reconstruct_missing_mesh(tmp_path, dataset):
    code = main(["reconstruct", "--dataset", str(dataset), "--recon-mesh", str(tmp_path / "none.txt"),
                 "--out", str(tmp_path / "run"), "--gamma", "0.01"])
    assert code == 2


def test_reconstruct_missing_gamma(tmp_path, meshes, dataset):
    code = main(["reconstruct", "--dataset", str(dataset), "--recon-mesh", str(meshes[1]),
                 "--out", str(tmp_path / "run")])
    assert code == 2


def test_reconstruct_missing_dataset(tmp_path, meshes):
    code = main(["reconstruct", "--dataset", str(tmp_path / "none"), "--recon-mesh", str(meshes[1]),
                 "--out", str(tmp_path / "run"), "--gamma", "0.01"])
    assert code == 1


def test_reconstruct_on_generation_mesh(tmp_path, meshes, dataset):
    code = main(["reconstruct", "--dataset", str(dataset), "--recon-mesh", str(meshes[0]),
                 "--out", str(tmp_path / "run"), "--gamma", "0.01"])
    assert code == 1


def test_evaluate_without_directories():
    assert main(["evaluate"]) == 2


def test_profile_command(tmp_path, meshes):
    out = tmp_path / "profile.csv"
    code = main(["profile", "--mesh", str(meshes[1]), "--gammas", "0.001,0.01", "--samples", "11",
                 "--out", str(out)])
    assert code == 0
    frame = pd.read_csv(out)
    assert frame.shape == (11, 6)


@pytest.mark.parametrize("extra", [
    ["--gammas", "abc"],
    ["--gammas", "0.01,-1"],
    ["--gammas", "inf"],
    ["--gammas", "0.01", "--samples", "1"],
])
def test_profile_usage_errors(tmp_path, meshes, extra):
    code = main(["profile", "--mesh", str(meshes[1]), "--out", str(tmp_path / "p.csv"), *extra])
    assert code == 2


def test_profile_malformed_control(tmp_path, meshes):
    control = tmp_path / "f.vtk"
    control.write_text("not a vtk file\n")
    code = main(["profile", "--mesh", str(meshes[1]), "--control", str(control), "--gammas", "0.01",
                 "--out", str(tmp_path / "p.csv")])
    assert code == 1


@pytest.mark.parametrize("extra", [
    ["--M", "0", "--gammas", "0.01"],
    ["--M", "1", "--gammas", "0"],
    ["--M", "1", "--gammas", "0.01", "--noise-levels", "-0.1"],
])
def test_sweep_usage_errors(tmp_path, meshes, extra):
    code = main(["sweep", "--gen-mesh", str(meshes[0]), "--recon-mesh", str(meshes[1]), "--shape", ELLIPSE,
                 "--out", str(tmp_path / "sweep"), *extra])
    assert code == 2


def test_run_config_reports_line():
    with pytest.raises(RunConfigError) as error:
        RunConfig.from_text("gamma = 0.1\n\n# comment\nfoo = 1\n")
    assert error.value.line_number == 4
    assert "line 4" in str(error.value)

    with pytest.raises(RunConfigError) as error:
        RunConfig.from_text("gamma = 0.1\ngamma = 0.2\n")
    assert error.value.line_number == 2

    with pytest.raises(RunConfigError):
        RunConfig.from_text("gamma 0.1\n")


def test_run_config_flags_override():
    config = RunConfig.from_text("gamma = 0.1\nalpha = 0.02\n").merge({"gamma": 0.5, "alpha": None})
    assert config.get("gamma", kind=float) == 0.5
    assert config.get("alpha", kind=float) == 0.02
    assert config.lines == {"gamma": 0, "alpha": 2}

    reconstruction = config.reconstruction_config()
    assert reconstruction.gamma == 0.5 and reconstruction.alpha == 0.02


def test_run_config_values():
    config = RunConfig.from_text("use_clean = yes\nsnapshots = 1, 10,20\ninit_center = 0.1,-0.2\ngamma = 0.01\n")
    assert config.get_bool("use_clean") is True
    assert config.get_list("snapshots", int) == [1, 10, 20]
    assert config.reconstruction_config().init_center == (0.1, -0.2)

    with pytest.raises(RunConfigError):
        RunConfig.from_text("gamma = -1\n").reconstruction_config()
    with pytest.raises(RunConfigError):
        RunConfig.from_text("use_clean = maybe\n").get_bool("use_clean")
    with pytest.raises(RunConfigError):
        RunConfig().require(["dataset"])
