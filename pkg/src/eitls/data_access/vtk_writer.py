from pathlib import Path
from typing import Tuple

import numpy as np

from eitls.entities.eit_entities import NodalField
from eitls.utils.index import format_float

from .errors import ResultDirError

VTK_TRIANGLE = 5


def write_vtk(field: NodalField, name: str, path: 'str|Path') -> Path:
    """Write ``field`` as legacy ASCII VTK point data on its triangle mesh.

    Args:
        field (NodalField): values at the mesh vertices
        name (str): scalar array name, no whitespace
        path (str|Path): output file

    Returns:
        Path: written file
    """
    if not name or any(char.isspace() for char in name):
        raise ValueError(f"Invalid VTK scalar name: '{name}'")

    path = Path(path)
    mesh = field.mesh
    n, m = mesh.vertex_count, mesh.triangle_count

    rows = ["# vtk DataFile Version 3.0", f"{name}", "ASCII", "DATASET UNSTRUCTURED_GRID"]
    rows.append(f"POINTS {n} double")
    rows += [f"{format_float(x)} {format_float(y)} 0" for x, y in mesh.vertices]
    rows.append(f"CELLS {m} {4 * m}")
    rows += [f"3 {i} {j} {k}" for i, j, k in mesh.triangles.tolist()]
    rows.append(f"CELL_TYPES {m}")
    rows += [str(VTK_TRIANGLE)] * m
    rows.append(f"POINT_DATA {n}")
    rows.append(f"SCALARS {name} double 1")
    rows.append("LOOKUP_TABLE default")
    rows += [format_float(value) for value in field.values]

    path.write_text("\n".join(rows) + "\n")
    return path


def read_vtk_scalars(path: 'str|Path') -> Tuple[str, np.ndarray, np.ndarray]:
    """Read back (name, points, values) from a file written by ``write_vtk``."""
    lines = [line.strip() for line in Path(path).read_text().splitlines() if line.strip()]

    try:
        start = next(i for i, line in enumerate(lines) if line.startswith("POINTS"))
        n = int(lines[start].split()[1])
        points = np.array([[float(v) for v in line.split()[:2]] for line in lines[start + 1:start + 1 + n]])

        scalars = next(i for i, line in enumerate(lines) if line.startswith("SCALARS"))
        name = lines[scalars].split()[1]
        # value rows follow the LOOKUP_TABLE line
        values = np.array([float(line) for line in lines[scalars + 2:scalars + 2 + n]])
    except (StopIteration, IndexError, ValueError):
        raise ResultDirError(str(path), "Malformed VTK file") from None

    if points.shape != (n, 2) or values.shape != (n,):
        raise ResultDirError(str(path), "Truncated VTK file")
    return name, points, values
