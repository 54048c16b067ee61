import logging
import math
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np
import pandas as pd

from eitls.entities.eit_entities import (BoundaryData, ConvergenceRecord, ConvergenceRow, CurrentPattern,
                                         NodalField, NoiseSpec)
from eitls.entities.mesh_entities import TriMesh
from eitls.inverse.forward.patterns import make_patterns
from eitls.inverse.synth.synthetic import SyntheticDataset
from eitls.utils.constants import CONVERGENCE_COLUMNS, FILE_NAMES
from eitls.utils.index import format_float

from .errors import DatasetNotFoundError, ResultDirError
from .file_store import FileStore
from .mesh_io import read_mesh, write_mesh
from .vtk_writer import write_vtk

META_KEYS = ("E", "width", "eps", "seed", "prng", "shape")
SUMMARY_KEYS = ("M", "gamma", "eps", "seed", "iterations", "J_final", "grad_inf_final", "eps_err", "reason")
REASON_PREFIX = "# reason="


class DatasetStore(FileStore):
    """Generation mesh, metadata and clean/noisy boundary data of one experiment."""

    def save(self, dataset: SyntheticDataset) -> None:
        self.root.mkdir(parents=True, exist_ok=True)
        write_mesh(dataset.mesh, self.path(FILE_NAMES["GEN_MESH"]))
        self.write_key_values(FILE_NAMES["META"], {
            "E": dataset.patterns[0].electrode_count,
            "width": format_float(dataset.patterns[0].width),
            "eps": format_float(dataset.noise.level),
            "seed": dataset.noise.seed,
            "prng": dataset.noise.prng,
            "shape": dataset.shape.to_text(),
        })
        for m in dataset.clean:
            self.write_boundary(FILE_NAMES["CLEAN"].format(m.index), m)
        for m in dataset.noisy:
            self.write_boundary(FILE_NAMES["NOISY"].format(m.index), m)

        logging.info(f"Dataset written to {self.root}: {len(dataset.clean)} measurements")

    def write_boundary(self, name: str, data: BoundaryData) -> Path:
        return self.write_frame(name, pd.DataFrame({"angle": data.angles, "value": data.values}))

    def read_boundary(self, name: str, index: int) -> BoundaryData:
        if not self.exists(name):
            raise DatasetNotFoundError(str(self.path(name)), "Missing boundary data file")

        frame = self.read_frame(name)
        if list(frame.columns) != ["angle", "value"]:
            raise DatasetNotFoundError(str(self.path(name)), "Boundary data needs columns angle,value")
        return BoundaryData(frame["angle"].to_numpy(float), frame["value"].to_numpy(float), index)

    def load_meta(self) -> Dict[str, object]:
        if not self.exists(FILE_NAMES["META"]):
            raise DatasetNotFoundError(str(self.root), "Missing dataset metadata")

        raw = self.read_key_values(FILE_NAMES["META"])
        missing = [key for key in META_KEYS if key not in raw]
        if missing:
            raise DatasetNotFoundError(str(self.path(FILE_NAMES["META"])), f"Metadata lacks keys {missing}")

        try:
            return {
                "E": int(raw["E"]),
                "width": float(raw["width"]),
                "eps": float(raw["eps"]),
                "seed": int(raw["seed"]),
                "prng": raw["prng"],
                "shape": raw["shape"],
            }
        except ValueError as error:
            raise DatasetNotFoundError(str(self.path(FILE_NAMES["META"])), f"Bad metadata value: {error}") from error

    def load_mesh(self) -> TriMesh:
        if not self.exists(FILE_NAMES["GEN_MESH"]):
            raise DatasetNotFoundError(str(self.root), "Missing generation mesh")
        return read_mesh(self.path(FILE_NAMES["GEN_MESH"]))

    def load_patterns(self) -> List[CurrentPattern]:
        meta = self.load_meta()
        return make_patterns(meta["E"], meta["width"])

    def load_noise(self) -> NoiseSpec:
        meta = self.load_meta()
        return NoiseSpec(level=meta["eps"], seed=meta["seed"])

    def load_measurements(self, clean: bool = False) -> List[BoundaryData]:
        count = self.load_meta()["E"] // 2
        template = FILE_NAMES["CLEAN"] if clean else FILE_NAMES["NOISY"]
        return [self.read_boundary(template.format(j), j) for j in range(1, count + 1)]


class ResultStore(FileStore):
    """Convergence history, summary and VTK fields of one reconstruction run."""

    def write_convergence(self, record: ConvergenceRecord) -> Path:
        frame = pd.DataFrame([row.as_tuple() for row in record.rows], columns=list(CONVERGENCE_COLUMNS))
        frame = frame.astype({"iter": np.int64, "backtracks": np.int64})
        path = self.write_frame(FILE_NAMES["CONVERGENCE"], frame, na_rep="nan")
        with path.open("a") as handle:
            handle.write(f"{REASON_PREFIX}{record.reason}\n")
        return path

    def read_convergence(self) -> ConvergenceRecord:
        name = FILE_NAMES["CONVERGENCE"]
        if not self.exists(name):
            raise ResultDirError(str(self.root), "Missing convergence history")

        reasons = [line[len(REASON_PREFIX):].strip() for line in self.read_text(name).splitlines()
                   if line.startswith(REASON_PREFIX)]
        frame = self.read_frame(name, comment="#")
        if tuple(frame.columns) != CONVERGENCE_COLUMNS or not reasons:
            raise ResultDirError(str(self.path(name)), "Malformed convergence history")

        record = ConvergenceRecord()
        for row in frame.itertuples(index=False):
            eps_err = None if math.isnan(row.eps_err) else float(row.eps_err)
            record.append(ConvergenceRow(int(row.iter), float(row.J), float(row.grad_inf),
                                         float(row.step), int(row.backtracks), eps_err))
        record.finish(reasons[-1])
        return record

    def write_summary(self, values: Dict[str, object]) -> Path:
        formatted = {key: format_float(value) if isinstance(value, float) else value
                     for key, value in values.items()}
        return self.write_key_values(FILE_NAMES["SUMMARY"], formatted)

    def read_summary(self) -> Dict[str, object]:
        name = FILE_NAMES["SUMMARY"]
        if not self.exists(name):
            raise ResultDirError(str(self.root), "Missing run summary")

        raw = self.read_key_values(name)
        missing = [key for key in SUMMARY_KEYS if key not in raw]
        if missing:
            raise ResultDirError(str(self.path(name)), f"Summary lacks keys {missing}")

        try:
            summary = {key: float(raw[key]) for key in ("gamma", "eps", "J_final", "grad_inf_final", "eps_err")}
            summary.update(M=int(raw["M"]), seed=int(raw["seed"]), iterations=int(raw["iterations"]),
                           reason=raw["reason"])
        except ValueError as error:
            raise ResultDirError(str(self.path(name)), f"Bad summary value: {error}") from error
        return summary

    def write_fields(self, fields: Dict[str, NodalField], subdir: Optional[str] = None) -> List[Path]:
        directory = self.root if subdir is None else self.path(subdir)
        directory.mkdir(parents=True, exist_ok=True)
        return [write_vtk(field, name, directory / f"{name}.vtk") for name, field in fields.items()]

    def write_snapshot(self, iteration: int, fields: Dict[str, NodalField]) -> List[Path]:
        return self.write_fields(fields, FILE_NAMES["SNAPSHOT_DIR"].format(iteration))

    def snapshot_dirs(self) -> List[Path]:
        prefix = FILE_NAMES["SNAPSHOT_DIR"].split("{", 1)[0]
        return [path for path in self.subdirectories() if path.name.startswith(prefix)]

