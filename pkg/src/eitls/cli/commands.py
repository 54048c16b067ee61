import argparse
import itertools
import logging
import math
import sys
from pathlib import Path
from typing import List, Optional

from eitls.data_access.eit_store import DatasetStore, ResultStore
from eitls.data_access.mesh_io import read_mesh, write_mesh
from eitls.data_access.vtk_writer import read_vtk_scalars
from eitls.entities.eit_entities import NodalField, NoiseSpec, ShapeSpec
from eitls.entities.mesh_entities import TriMesh
from eitls.errors import EitlsError
from eitls.inverse.levelset.errors import ShapeSpecError
from eitls.inverse.levelset.shapes import parse_shape
from eitls.inverse.optimizer.reconstruction import initial_control
from eitls.use_cases.eit_cases import (EvaluationUseCases, ProfileUseCases, ReconstructionUseCases,
                                       SimulationUseCases, SweepUseCases)
from eitls.utils.constants import (ELECTRODE_WIDTH_DEFAULT, EXIT_CODES, FLOAT_FORMAT, LOG_FORMAT,
                                   MESH_FORMATS, PROFILE_LINE)
from eitls.utils.index import parse_float_list

from .errors import RunConfigError
from .run_config import RunConfig

TRUTH_FROM_DATASET = "dataset"


def _edge_length(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid edge length: {text!r}") from None
    if not 0 < value < 1:
        raise argparse.ArgumentTypeError(f"edge length must lie in (0, 1), got {value}")
    return value


def _point(text: str) -> tuple:
    values = parse_float_list(text)
    if len(values) != 2:
        raise argparse.ArgumentTypeError(f"expected 'x,y', got {text!r}")
    return tuple(values)


def _load_config(args: argparse.Namespace) -> RunConfig:
    """File values from ``--config`` overridden by every flag that was given."""
    base = RunConfig.from_file(args.config) if args.config else RunConfig()
    flags = {key: value for key, value in vars(args).items() if key not in ("config", "handler", "command", "log_level")}
    return base.merge(flags)


def _shape(config: RunConfig, key: str) -> ShapeSpec:
    try:
        return parse_shape(config.get(key))
    except ShapeSpecError as error:
        raise RunConfigError(config.lines.get(key, 0), key, str(error)) from error


def _mesh(config: RunConfig, key: str) -> TriMesh:
    path = Path(config.get(key))
    if not path.is_file():
        raise RunConfigError(config.lines.get(key, 0), key, f"No mesh file at {path} for")
    return read_mesh(path, MESH_FORMATS["MSH2"] if path.suffix == ".msh" else MESH_FORMATS["NATIVE"])


def cmd_mesh(args: argparse.Namespace) -> int:
    shape = None
    if args.shape is not None:
        shape = _shape(RunConfig({"shape": args.shape}), "shape")

    mesh = SimulationUseCases.make_mesh(args.h, shape)
    write_mesh(mesh, args.out)
    logging.info(f"Mesh written to {args.out}")
    return EXIT_CODES["OK"]


def cmd_simulate(args: argparse.Namespace) -> int:
    config = _load_config(args)
    config.require(("gen_mesh", "shape", "out"))

    electrode_count = config.get("E", 6, int)
    if electrode_count < 2 or electrode_count % 2:
        raise RunConfigError(config.lines.get("E", 0), "E", "Electrode count must be even and at least 2 for")
    try:
        noise = NoiseSpec(level=config.get("eps", 0.0, float), seed=config.get("seed", 0, int))
    except ValueError as error:
        raise RunConfigError(config.lines.get("eps", 0), "eps", f"Invalid noise settings: {error} for") from error

    shape = _shape(config, "shape")
    gen_mesh = _mesh(config, "gen_mesh")
    store = DatasetStore(config.get("out"), create=True)
    SimulationUseCases(store).simulate(shape, gen_mesh, electrode_count, noise,
                                       config.get("width", ELECTRODE_WIDTH_DEFAULT, float),
                                       config.get("num_workers", 1, int))
    return EXIT_CODES["OK"]


def cmd_reconstruct(args: argparse.Namespace) -> int:
    config = _load_config(args)
    config.require(("dataset", "recon_mesh", "out", "gamma"))

    mesh = _mesh(config, "recon_mesh")
    snapshots = config.get_list("snapshots", int)
    reconstruction = config.reconstruction_config()
    dataset = DatasetStore(config.get("dataset"))

    truth = None
    if "truth" in config:
        truth_text = config.get("truth")
        if truth_text == TRUTH_FROM_DATASET:
            truth_text = dataset.load_meta()["shape"]
        truth = _shape(RunConfig({"truth": truth_text}, {"truth": config.lines.get("truth", 0)}), "truth")

    ReconstructionUseCases(ResultStore(config.get("out"), create=True)).run(
        reconstruction, dataset, mesh, truth, snapshots,
        use_clean=config.get_bool("use_clean"),
        allow_same_mesh=config.get_bool("allow_same_mesh"),
    )
    return EXIT_CODES["OK"]


def cmd_evaluate(args: argparse.Namespace) -> int:
    if not args.dirs:
        raise RunConfigError(0, "dirs", "At least one result directory is needed for")

    evaluation = EvaluationUseCases(args.num_workers)
    frame = evaluation.table(args.dirs)
    if args.out:
        evaluation.write_table(frame, args.out)
    else:
        frame.to_csv(sys.stdout, index=False, float_format=FLOAT_FORMAT, na_rep="nan", lineterminator="\n")
    return EXIT_CODES["OK"]


def cmd_profile(args: argparse.Namespace) -> int:
    config = RunConfig({"mesh": args.mesh})
    mesh = _mesh(config, "mesh")

    if args.control is not None:
        _, _, values = read_vtk_scalars(args.control)
        if values.shape[0] != mesh.vertex_count:
            raise RunConfigError(0, "control", f"{values.shape[0]} values for {mesh.vertex_count} vertices in")
        control = NodalField(mesh, values, "f")
    else:
        control = initial_control(mesh)

    try:
        gammas = parse_float_list(args.gammas)
    except ValueError:
        raise RunConfigError(0, "gammas", f"Invalid list {args.gammas!r} for") from None
    if not gammas or not all(math.isfinite(gamma) and gamma > 0 for gamma in gammas):
        raise RunConfigError(0, "gammas", "Positive smoothing values are needed for")
    if args.samples < 2:
        raise RunConfigError(0, "samples", "At least 2 points are needed for")

    frame = ProfileUseCases(mesh).profile(control, gammas, args.start, args.end, args.samples)
    out = Path(args.out)
    ResultStore(out.parent, create=True).write_frame(out.name, frame, na_rep="nan")
    logging.info(f"Profile written to {out}")
    return EXIT_CODES["OK"]


def cmd_sweep(args: argparse.Namespace) -> int:
    config = _load_config(args)
    config.require(("gen_mesh", "recon_mesh", "shape", "out", "measurement_counts", "gammas"))

    counts = config.get_list("measurement_counts", int)
    gammas = config.get_list("gammas", float)
    if not counts or not gammas:
        raise RunConfigError(0, "measurement_counts", "Empty sweep grid in")
    if any(count < 1 for count in counts):
        raise RunConfigError(config.lines.get("measurement_counts", 0), "measurement_counts",
                             "Measurement counts must be positive in")
    if not all(math.isfinite(gamma) and gamma > 0 for gamma in gammas):
        raise RunConfigError(config.lines.get("gammas", 0), "gammas", "Positive smoothing values are needed for")

    noise_levels = config.get_list("noise_levels", float, [0.01])
    seeds = config.get_list("seeds", int, [0])
    try:
        for eps, seed in itertools.product(noise_levels, seeds):
            NoiseSpec(level=eps, seed=seed)
    except ValueError as error:
        raise RunConfigError(config.lines.get("noise_levels", 0), "noise_levels",
                             f"Invalid noise settings: {error} for") from error
    if "gamma" not in config:
        config = config.merge({"gamma": gammas[0]})

    SweepUseCases(config.get("out")).run(
        _shape(config, "shape"),
        _mesh(config, "gen_mesh"),
        _mesh(config, "recon_mesh"),
        counts,
        gammas,
        noise_levels,
        seeds,
        config.reconstruction_config(),
    )
    return EXIT_CODES["OK"]


def _add_reconstruction_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--gamma", type=float, help="Level-set smoothing parameter")
    parser.add_argument("--alpha", type=float, help="Heaviside smoothing width")
    parser.add_argument("--beta", dest="stop_factor", type=float, help="Stopping factor (tol = eps * beta)")
    parser.add_argument("--tol-floor", dest="tol_floor", type=float, help="Lower bound of the stopping tolerance")
    parser.add_argument("--max-iters", dest="max_iters", type=int, help="Maximum accepted updates")
    parser.add_argument("--init-radius", dest="init_radius", type=float, help="Radius of the initial disk guess")
    parser.add_argument("--num-workers", dest="num_workers", type=int, help="Threads for independent solves")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="eitls", description="Level-set reconstruction for continuum-model EIT")
    parser.add_argument("--log-level", dest="log_level", default="INFO",
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"], help="Root logger level")
    commands = parser.add_subparsers(dest="command", required=True)

    mesh = commands.add_parser("mesh", help="Generate a disk mesh, optionally conforming to a shape")
    mesh.add_argument("--h", type=_edge_length, required=True, help="Target edge length in (0, 1)")
    mesh.add_argument("--shape", help="'ellipse cx cy ax ay [rot]' or 'circles cx cy r ...'")
    mesh.add_argument("--out", required=True, help="Output mesh file")
    mesh.set_defaults(handler=cmd_mesh)

    simulate = commands.add_parser("simulate", help="Simulate clean and noisy boundary data")
    simulate.add_argument("--config", help="key = value run configuration")
    simulate.add_argument("--gen-mesh", dest="gen_mesh", help="Shape-conforming generation mesh")
    simulate.add_argument("--shape", help="Phantom shape")
    simulate.add_argument("--E", dest="E", type=int, help="Electrode count (even)")
    simulate.add_argument("--eps", type=float, help="Relative noise level")
    simulate.add_argument("--seed", type=int, help="Noise seed")
    simulate.add_argument("--width", type=float, help="Electrode arc width")
    simulate.add_argument("--num-workers", dest="num_workers", type=int, help="Threads for independent solves")
    simulate.add_argument("--out", help="Dataset directory")
    simulate.set_defaults(handler=cmd_simulate)

    reconstruct = commands.add_parser("reconstruct", help="Reconstruct the inclusion from a dataset")
    reconstruct.add_argument("--config", help="key = value run configuration")
    reconstruct.add_argument("--dataset", help="Dataset directory")
    reconstruct.add_argument("--recon-mesh", dest="recon_mesh", help="Reconstruction mesh")
    reconstruct.add_argument("--out", help="Result directory")
    reconstruct.add_argument("--snapshots", help="Comma separated iterations to export, e.g. 1,10,20")
    reconstruct.add_argument("--truth", nargs="?", const=TRUTH_FROM_DATASET,
                             help="Phantom for the error history; without a value the dataset shape is used")
    reconstruct.add_argument("--use-clean", dest="use_clean", action="store_const", const=True,
                             help="Reconstruct from the noise-free data")
    reconstruct.add_argument("--allow-same-mesh", dest="allow_same_mesh", action="store_const", const=True,
                             help="Permit reconstructing on the generation mesh")
    _add_reconstruction_flags(reconstruct)
    reconstruct.set_defaults(handler=cmd_reconstruct)

    evaluate = commands.add_parser("evaluate", help="Tabulate result directories")
    evaluate.add_argument("dirs", nargs="*", help="Result directories")
    evaluate.add_argument("--out", help="CSV table path, stdout when omitted")
    evaluate.add_argument("--num-workers", dest="num_workers", type=int, default=1, help="Concurrent readers")
    evaluate.set_defaults(handler=cmd_evaluate)

    profile = commands.add_parser("profile", help="Sample the control and its level sets along a line")
    profile.add_argument("--mesh", required=True, help="Mesh of the control field")
    profile.add_argument("--control", help="VTK file with the control f, initial guess when omitted")
    profile.add_argument("--gammas", required=True, help="Comma separated smoothing values")
    profile.add_argument("--start", type=_point, default=PROFILE_LINE[0], help="Line start 'x,y'")
    profile.add_argument("--end", type=_point, default=PROFILE_LINE[1], help="Line end 'x,y'")
    profile.add_argument("--samples", type=int, default=201, help="Number of sample points")
    profile.add_argument("--out", required=True, help="Output CSV")
    profile.set_defaults(handler=cmd_profile)

    sweep = commands.add_parser("sweep", help="Simulate and reconstruct over a parameter grid")
    sweep.add_argument("--config", help="key = value run configuration")
    sweep.add_argument("--gen-mesh", dest="gen_mesh", help="Shape-conforming generation mesh")
    sweep.add_argument("--recon-mesh", dest="recon_mesh", help="Reconstruction mesh")
    sweep.add_argument("--shape", help="Phantom shape")
    sweep.add_argument("--M", dest="measurement_counts", help="Comma separated measurement counts")
    sweep.add_argument("--gammas", help="Comma separated smoothing values")
    sweep.add_argument("--noise-levels", dest="noise_levels", help="Comma separated noise levels")
    sweep.add_argument("--seeds", help="Comma separated noise seeds")
    sweep.add_argument("--out", help="Sweep root directory")
    _add_reconstruction_flags(sweep)
    sweep.set_defaults(handler=cmd_sweep)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Entry point; returns 0 on success, 1 on runtime failure, 2 on usage errors."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as stop:
        return EXIT_CODES["OK"] if stop.code in (0, None) else EXIT_CODES["USAGE"]

    logging.basicConfig(level=args.log_level, format=LOG_FORMAT, force=True)
    try:
        return args.handler(args)
    except RunConfigError as error:
        parser.print_usage(sys.stderr)
        logging.error(str(error))
        return EXIT_CODES["USAGE"]
    except (EitlsError, OSError) as error:
        logging.error(str(error))
        return EXIT_CODES["FAILURE"]
