import logging
from pathlib import Path
from typing import Dict, Iterator, List, Tuple

import numpy as np

from eitls.entities.mesh_entities import TriMesh
from eitls.inverse.mesh.errors import MeshParseError, MeshValidationError
from eitls.inverse.mesh.generators import compact_vertices
from eitls.utils.constants import MESH_FORMATS
from eitls.utils.index import format_float

MSH_LINE, MSH_TRIANGLE, MSH_POINT = 1, 2, 15


class _Lines:
    """Numbered, non-empty lines of a text file."""

    def __init__(self, path: Path) -> None:
        self.path = str(path)
        self._items: Iterator[Tuple[int, str]] = (
            (number, text.strip())
            for number, text in enumerate(path.read_text().splitlines(), start=1)
            if text.strip() != ""
        )
        self.number = 0

    def next(self) -> str:
        try:
            self.number, text = next(self._items)
        except StopIteration:
            raise MeshParseError(self.path, self.number + 1, "Unexpected end of file") from None
        return text

    def numbers(self, count: int, kind=float) -> list:
        text = self.next()
        fields = text.split()
        if len(fields) != count:
            self.fail(f"Expected {count} values, found {len(fields)}")
        try:
            return [kind(value) for value in fields]
        except ValueError:
            self.fail(f"Cannot parse '{text}'")

    def fail(self, message: str):
        raise MeshParseError(self.path, self.number, message)


def _read_native(path: Path) -> TriMesh:
    lines = _Lines(path)
    nv, nt, nb = lines.numbers(3, int)
    if nv < 3 or nt < 1 or nb < 0:
        lines.fail("Invalid counts header")

    vertices = np.array([lines.numbers(2, float) for _ in range(nv)])

    triangles = np.empty((nt, 3), dtype=np.int64)
    for i in range(nt):
        row = lines.numbers(3, int)
        if min(row) < 0 or max(row) >= nv:
            lines.fail(f"Triangle vertex index out of range [0, {nv})")
        triangles[i] = row

    edges = np.empty((nb, 2), dtype=np.int64)
    for i in range(nb):
        row = lines.numbers(2, int)
        if min(row) < 0 or max(row) >= nv:
            lines.fail(f"Boundary vertex index out of range [0, {nv})")
        edges[i] = row

    return TriMesh(vertices, triangles, edges if nb > 0 else None)


def _read_msh2(path: Path) -> TriMesh:
    lines = _Lines(path)
    node_index: Dict[int, int] = {}
    coordinates: List[Tuple[float, float]] = []
    triangles: List[List[int]] = []
    segments = 0

    while True:
        try:
            section = lines.next()
        except MeshParseError:
            break

        if section == "$MeshFormat":
            header = lines.next().split()
            if len(header) < 2 or not header[0].startswith("2") or header[1] != "0":
                lines.fail("Only ASCII MSH 2.x files are supported")
            if lines.next() != "$EndMeshFormat":
                lines.fail("Missing $EndMeshFormat")

        elif section == "$Nodes":
            (count,) = lines.numbers(1, int)
            for _ in range(count):
                fields = lines.next().split()
                if len(fields) != 4:
                    lines.fail("Node lines must be 'id x y z'")
                try:
                    node_index[int(fields[0])] = len(coordinates)
                    coordinates.append((float(fields[1]), float(fields[2])))
                except ValueError:
                    lines.fail("Cannot parse node line")
            if lines.next() != "$EndNodes":
                lines.fail("Missing $EndNodes")

        elif section == "$Elements":
            (count,) = lines.numbers(1, int)
            for _ in range(count):
                try:
                    fields = [int(value) for value in lines.next().split()]
                    kind, tags = fields[1], fields[2]
                    nodes = fields[3 + tags:]
                except (ValueError, IndexError):
                    lines.fail("Cannot parse element line")

                if kind == MSH_POINT:
                    continue
                if kind not in (MSH_LINE, MSH_TRIANGLE):
                    lines.fail(f"Unsupported element type {kind}")
                if len(nodes) != (2 if kind == MSH_LINE else 3):
                    lines.fail("Wrong node count for element")
                if any(node not in node_index for node in nodes):
                    lines.fail("Element references an unknown node")

                if kind == MSH_TRIANGLE:
                    triangles.append([node_index[node] for node in nodes])
                else:
                    segments += 1
            if lines.next() != "$EndElements":
                lines.fail("Missing $EndElements")

        elif section.startswith("$"):
            # unknown sections are skipped whole
            end = "$End" + section[1:]
            while lines.next() != end:
                pass
        else:
            lines.fail(f"Unexpected line '{section}'")

    if not triangles:
        raise MeshParseError(str(path), lines.number, "No triangle elements found")

    vertices, tri = compact_vertices(np.array(coordinates, dtype=float), np.array(triangles, dtype=np.int64))
    logging.debug(f"MSH file {path}: {len(triangles)} triangles, {segments} line elements ignored")
    # boundary always comes from the triangle topology
    return TriMesh(vertices, tri)


def read_mesh(path: 'str|Path', format: str = MESH_FORMATS["NATIVE"]) -> TriMesh:
    """Read a mesh in the native text format or Gmsh MSH 2.2 ASCII.

    Args:
        path (str|Path): file to read
        format (str, optional): ``native`` or ``msh2``. Defaults to native.

    Returns:
        TriMesh: validated mesh
    """
    path = Path(path)
    if format == MESH_FORMATS["NATIVE"]:
        reader = _read_native
    elif format == MESH_FORMATS["MSH2"]:
        reader = _read_msh2
    else:
        raise ValueError(f"Unknown mesh format: {format}")

    try:
        return reader(path)
    except MeshValidationError as error:
        raise MeshParseError(str(path), 0, f"Mesh in file is invalid: {error}") from error


def write_mesh(mesh: TriMesh, path: 'str|Path', format: str = MESH_FORMATS["NATIVE"]) -> None:
    """Write ``mesh`` in the native text format with 17 significant digits."""
    if format != MESH_FORMATS["NATIVE"]:
        raise ValueError(f"Cannot write mesh format: {format}")
    if path is None or str(path) == "":
        raise FileNotFoundError("Empty mesh path")

    path = Path(path)
    rows = [f"{mesh.vertex_count} {mesh.triangle_count} {mesh.boundary_edges.shape[0]}"]
    rows += [f"{format_float(x)} {format_float(y)}" for x, y in mesh.vertices]
    rows += [f"{i} {j} {k}" for i, j, k in mesh.triangles.tolist()]
    rows += [f"{i} {j}" for i, j in mesh.boundary_edges.tolist()]
    path.write_text("\n".join(rows) + "\n")
