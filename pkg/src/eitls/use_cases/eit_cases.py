import dataclasses
import itertools
import logging
import math
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from matplotlib.tri import LinearTriInterpolator, Triangulation

from eitls.data_access.eit_store import DatasetStore, ResultStore
from eitls.entities.eit_entities import NodalField, NoiseSpec, ReconstructionResult, ShapeSpec
from eitls.entities.mesh_entities import TriMesh
from eitls.inverse.adjoint.adjoint import AdjointBundle
from eitls.inverse.func import run_in_pool
from eitls.inverse.levelset.auxiliary import solve_level_set
from eitls.inverse.levelset.shapes import parse_shape
from eitls.inverse.levelset.smoothing import heaviside_field, sigma_field
from eitls.inverse.mesh.generators import generate_disk_mesh, generate_disk_mesh_with_shape
from eitls.inverse.optimizer.config import ReconstructionConfig
from eitls.inverse.optimizer.problem import Evaluation
from eitls.inverse.optimizer.reconstruction import reconstruct
from eitls.inverse.synth.synthetic import SyntheticDataset, check_inverse_crime, generate_dataset
from eitls.utils.constants import ELECTRODE_WIDTH_DEFAULT, FILE_NAMES, PROFILE_LINE, TABLE_COLUMNS
from eitls.utils.index import format_float


class SimulationUseCases:
    def __init__(self, store: DatasetStore) -> None:
        self.store = store

    @staticmethod
    def make_mesh(target_edge_length: float, shape: Optional[ShapeSpec] = None) -> TriMesh:
        if shape is None:
            mesh = generate_disk_mesh(target_edge_length)
        else:
            mesh = generate_disk_mesh_with_shape(target_edge_length, shape)
        logging.info(f"Mesh generated: {mesh.vertex_count} vertices, {mesh.triangle_count} triangles, "
                     f"min angle {mesh.min_angle_deg:.1f} deg")
        return mesh

    def simulate(self,
                 shape: ShapeSpec,
                 gen_mesh: TriMesh,
                 electrode_count: int,
                 noise: NoiseSpec,
                 width: float = ELECTRODE_WIDTH_DEFAULT,
                 num_workers: int = 1) -> SyntheticDataset:
        dataset = generate_dataset(shape, gen_mesh, electrode_count, noise, width, num_workers)
        self.store.save(dataset)
        return dataset


class ReconstructionUseCases:
    def __init__(self, store: ResultStore) -> None:
        self.store = store

    def run(self,
            config: ReconstructionConfig,
            dataset: DatasetStore,
            mesh: TriMesh,
            truth: Optional[ShapeSpec] = None,
            snapshots: Sequence[int] = (),
            use_clean: bool = False,
            allow_same_mesh: bool = False) -> ReconstructionResult:
        """Reconstruct from a stored dataset and write every artifact of the run.

        Electrode layout and noise level come from the dataset metadata; with
        ``use_clean`` the noise-free files are used and stopping falls back to
        the tolerance floor.

        Args:
            config (ReconstructionConfig): run parameters
            dataset (DatasetStore): simulated data
            mesh (TriMesh): reconstruction mesh
            truth (ShapeSpec, optional): phantom for ε_err reporting
            snapshots (Sequence[int], optional): iterations whose fields are written
            use_clean (bool, optional): reconstruct from clean data
            allow_same_mesh (bool, optional): permit the generation mesh

        Returns:
            ReconstructionResult: final state
        """
        check_inverse_crime(dataset.load_mesh(), mesh, allow_same_mesh)

        meta = dataset.load_meta()
        config = dataclasses.replace(config, electrode_count=meta["E"], width=meta["width"],
                                     noise_level=0.0 if use_clean else meta["eps"])
        patterns = dataset.load_patterns()
        measurements = dataset.load_measurements(clean=use_clean)

        self.store.root.mkdir(parents=True, exist_ok=True)
        wanted = set(snapshots)
        written: List[int] = []

        def on_iterate(k: int, state: Evaluation, bundle: AdjointBundle) -> None:
            if k not in wanted:
                return
            written.append(k)
            self.store.write_snapshot(k, {
                "f": state.f,
                "q": state.q.renamed("q"),
                "H": heaviside_field(state.q, config.alpha),
                "sigma": sigma_field(state.q, config.alpha),
                "lambda": bundle.lam,
            })

        result = reconstruct(config, mesh, patterns, measurements, truth, on_iterate)

        missed = sorted(wanted.difference(written))
        if missed:
            logging.warning(f"Run ended before snapshot iterations {missed}")

        self.store.write_convergence(result.record)
        self.store.write_fields(result.fields())
        self.store.write_summary({
            "M": config.measurement_count,
            "gamma": config.gamma,
            "eps": float(meta["eps"]),
            "seed": meta["seed"],
            "iterations": result.record.iterations,
            "J_final": result.J_final,
            "grad_inf_final": result.grad_inf_final,
            "eps_err": math.nan if result.eps_err is None else result.eps_err,
            "reason": result.record.reason,
        })
        logging.info(f"Results written to {self.store.root}")
        return result


class EvaluationUseCases:
    def __init__(self, num_workers: int = 1) -> None:
        self.num_workers = num_workers

    def table(self, result_dirs: Sequence['str|Path']) -> pd.DataFrame:
        """One row per distinct result directory, sorted by (M, gamma)."""
        if not result_dirs:
            raise ValueError("No result directories given")

        unique: Dict[Path, None] = {}
        for directory in result_dirs:
            key = Path(directory).resolve()
            if key in unique:
                logging.warning(f"Duplicate result directory ignored: {directory}")
            unique[key] = None

        summaries = run_in_pool(lambda path: ResultStore(path).read_summary(), list(unique), self.num_workers)
        frame = pd.DataFrame([{column: summary[column] for column in TABLE_COLUMNS} for summary in summaries],
                             columns=list(TABLE_COLUMNS))
        return frame.sort_values(["M", "gamma"], kind="mergesort").reset_index(drop=True)

    @staticmethod
    def write_table(frame: pd.DataFrame, path: 'str|Path') -> Path:
        path = Path(path)
        store = ResultStore(path.parent, create=True)
        return store.write_frame(path.name, frame, na_rep="nan")


class ProfileUseCases:
    def __init__(self, mesh: TriMesh) -> None:
        self.mesh = mesh
        self.triangulation = Triangulation(mesh.vertices[:, 0], mesh.vertices[:, 1], mesh.triangles)

    @staticmethod
    def line_points(start: Tuple[float, float], end: Tuple[float, float], n: int) -> Tuple[np.ndarray, np.ndarray]:
        """Arc length and coordinates of ``n`` equispaced points from start to end."""
        if n < 2:
            raise ValueError(f"Need at least 2 samples, got {n}")

        start, end = np.asarray(start, dtype=float), np.asarray(end, dtype=float)
        t = np.linspace(0.0, 1.0, n)
        return t * float(np.linalg.norm(end - start)), start + t[:, None] * (end - start)

    def sample_along_line(self,
                          field: NodalField,
                          start: Tuple[float, float] = PROFILE_LINE[0],
                          end: Tuple[float, float] = PROFILE_LINE[1],
                          n: int = 201) -> Tuple[np.ndarray, np.ndarray]:
        """P1 values of ``field`` at ``n`` equispaced points of the segment start-end.

        Returns:
            Tuple[np.ndarray, np.ndarray]: arc length from ``start`` and values,
            NaN outside the mesh
        """
        s, points = self.line_points(start, end, n)
        values = LinearTriInterpolator(self.triangulation, field.values)(points[:, 0], points[:, 1])
        return s, np.ma.filled(np.ma.asarray(values, dtype=float), np.nan)

    def profile(self,
                f: NodalField,
                gammas: Sequence[float],
                start: Tuple[float, float] = PROFILE_LINE[0],
                end: Tuple[float, float] = PROFILE_LINE[1],
                n: int = 201) -> pd.DataFrame:
        """Control and its level sets for several γ along one line."""
        s, points = self.line_points(start, end, n)
        frame = pd.DataFrame({"s": s, "x": points[:, 0], "y": points[:, 1],
                              "f": self.sample_along_line(f, start, end, n)[1]})
        for gamma in gammas:
            q = solve_level_set(f, gamma, self.mesh)
            frame[f"q_{format_float(gamma)}"] = self.sample_along_line(q, start, end, n)[1]
        return frame


class SweepUseCases:
    """Simulate-and-reconstruct grid over (M, γ, ε, seed) below one root directory."""

    def __init__(self, root: 'str|Path') -> None:
        self.root = Path(root)

    def run(self,
            shape: 'ShapeSpec|str',
            gen_mesh: TriMesh,
            recon_mesh: TriMesh,
            measurement_counts: Sequence[int],
            gammas: Sequence[float],
            noise_levels: Sequence[float],
            seeds: Sequence[int],
            base: ReconstructionConfig,
            with_truth: bool = True) -> pd.DataFrame:
        shape = parse_shape(shape) if isinstance(shape, str) else shape
        result_dirs: List[Path] = []

        for M, eps, seed in itertools.product(measurement_counts, noise_levels, seeds):
            data_store = DatasetStore(self.root / f"data_M{M}_eps{format_float(eps)}_seed{seed}", create=True)
            if not data_store.exists(FILE_NAMES["META"]):
                SimulationUseCases(data_store).simulate(shape, gen_mesh, 2 * M, NoiseSpec(level=eps, seed=seed),
                                                        base.width, base.num_workers)

            for gamma in gammas:
                run_dir = self.root / f"run_M{M}_gamma{format_float(gamma)}_eps{format_float(eps)}_seed{seed}"
                config = dataclasses.replace(base, gamma=gamma, seed=seed)
                ReconstructionUseCases(ResultStore(run_dir, create=True)).run(
                    config, data_store, recon_mesh, shape if with_truth else None)
                result_dirs.append(run_dir)

        evaluation = EvaluationUseCases(base.num_workers)
        frame = evaluation.table(result_dirs)
        evaluation.write_table(frame, self.root / FILE_NAMES["TABLE"])
        logging.info(f"Sweep finished: {len(result_dirs)} runs in {self.root}")
        return frame
