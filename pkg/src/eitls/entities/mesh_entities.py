from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np

from eitls.inverse.mesh.errors import MeshTopologyError, MeshValidationError
from eitls.utils.index import wrap_angle


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.ascontiguousarray(array)
    array.setflags(write=False)
    return array


class MetaTriMesh(type):

    def __call__(self,
            vertices,
            triangles,
            boundary_edges=None,
            *args,
            **kwds):

        vertices = np.asarray(vertices, dtype=float)
        triangles = np.asarray(triangles)

        if vertices.ndim != 2 or vertices.shape[1] != 2 or vertices.shape[0] < 3:
            raise MeshValidationError(
                f"vertices must be an (n >= 3, 2) array, got shape {vertices.shape}")

        if not np.all(np.isfinite(vertices)):
            raise MeshValidationError("vertices contain non-finite coordinates")

        if triangles.ndim != 2 or triangles.shape[1] != 3 or triangles.shape[0] < 1:
            raise MeshValidationError(
                f"triangles must be an (m >= 1, 3) array, got shape {triangles.shape}")

        if not np.issubdtype(triangles.dtype, np.integer):
            raise MeshValidationError("triangle indices must be integers")

        triangles = triangles.astype(np.int64)

        if triangles.min() < 0 or triangles.max() >= vertices.shape[0]:
            raise MeshValidationError(
                f"triangle index out of range [0, {vertices.shape[0]})")

        if np.any(np.bincount(triangles.ravel(), minlength=vertices.shape[0]) == 0):
            raise MeshValidationError("mesh has vertices not used by any triangle")

        p0, p1, p2 = (vertices[triangles[:, i]] for i in range(3))
        signed = 0.5 * ((p1[:, 0] - p0[:, 0]) * (p2[:, 1] - p0[:, 1])
                        - (p1[:, 1] - p0[:, 1]) * (p2[:, 0] - p0[:, 0]))

        if np.any(signed == 0.0):
            raise MeshValidationError(
                f"degenerate (zero-area) triangle at index {int(np.argmax(signed == 0.0))}")

        # clockwise input is reoriented, not rejected
        flip = signed < 0
        triangles[flip] = triangles[flip][:, [0, 2, 1]]

        if boundary_edges is not None:
            boundary_edges = np.asarray(boundary_edges, dtype=np.int64).reshape(-1, 2)
            if boundary_edges.size and (boundary_edges.min() < 0 or boundary_edges.max() >= vertices.shape[0]):
                raise MeshValidationError("boundary edge index out of range")

        return super().__call__(vertices, triangles, boundary_edges, *args, **kwds)


class TriMesh(metaclass=MetaTriMesh):
    """Conforming P1 triangulation with a single counterclockwise boundary loop.

    Instances are immutable; geometric quantities are computed lazily and
    cached, so one mesh can be shared by concurrent solvers.

    Args:
        vertices (np.ndarray): (n, 2) coordinates
        triangles (np.ndarray): (m, 3) vertex indices, any orientation
        boundary_edges (np.ndarray, optional): (b, 2) edges; checked against
            the topological boundary when given, rebuilt otherwise
    """

    def __init__(self,
                 vertices: np.ndarray,
                 triangles: np.ndarray,
                 boundary_edges: Optional[np.ndarray] = None,
                 ) -> None:

        self.vertices = _frozen(vertices)
        self.triangles = _frozen(triangles)

        directed = self.__topology()
        if boundary_edges is not None:
            given = {tuple(sorted(edge)) for edge in boundary_edges.tolist()}
            found = {tuple(sorted(edge)) for edge in directed.tolist()}
            if given != found:
                raise MeshTopologyError(
                    "boundary edges do not match the boundary of the triangulation")

        self.boundary_cycle = _frozen(self.__cycle(directed))
        self.boundary_edges = _frozen(np.column_stack(
            [self.boundary_cycle, np.roll(self.boundary_cycle, -1)]))

    def __topology(self) -> np.ndarray:
        """Validate edge manifoldness and return ccw-oriented boundary edges."""
        tri = self.triangles
        directed = np.concatenate([tri[:, [0, 1]], tri[:, [1, 2]], tri[:, [2, 0]]])

        _, directed_counts = np.unique(directed, axis=0, return_counts=True)
        if np.any(directed_counts > 1):
            raise MeshTopologyError("inconsistent triangle orientation or duplicated triangle")

        undirected = np.sort(directed, axis=1)
        _, inverse, counts = np.unique(undirected, axis=0, return_inverse=True, return_counts=True)
        inverse = inverse.ravel()

        if np.any(counts > 2):
            raise MeshTopologyError("edge shared by more than two triangles")

        self.edge_count = int(counts.shape[0])
        boundary = directed[counts[inverse] == 1]
        if boundary.shape[0] == 0:
            raise MeshTopologyError("mesh has no boundary")

        return boundary

    def __cycle(self, directed: np.ndarray) -> np.ndarray:
        n = self.vertices.shape[0]
        if np.any(np.bincount(directed[:, 0], minlength=n) > 1):
            raise MeshTopologyError("boundary is pinched at a vertex")

        nxt = np.full(n, -1, dtype=np.int64)
        nxt[directed[:, 0]] = directed[:, 1]

        starts = directed[:, 0]
        angles = wrap_angle(np.arctan2(self.vertices[starts, 1], self.vertices[starts, 0]))
        current = int(starts[np.argmin(angles)])

        cycle = [current]
        for _ in range(directed.shape[0] - 1):
            current = int(nxt[current])
            if current < 0 or current == cycle[0]:
                break
            cycle.append(current)

        if len(cycle) != directed.shape[0] or nxt[cycle[-1]] != cycle[0]:
            raise MeshTopologyError("boundary is not a single closed loop")

        return np.asarray(cycle, dtype=np.int64)

    def __repr__(self) -> str:
        return f"TriMesh(nv={self.vertex_count}, nt={self.triangle_count}, nb={self.boundary_edges.shape[0]})"

    @property
    def vertex_count(self) -> int:
        return int(self.vertices.shape[0])

    @property
    def triangle_count(self) -> int:
        return int(self.triangles.shape[0])

    @cached_property
    def corners(self) -> np.ndarray:
        """(m, 3, 2) vertex coordinates of every triangle."""
        return _frozen(self.vertices[self.triangles])

    @cached_property
    def areas(self) -> np.ndarray:
        p = self.corners
        area = 0.5 * ((p[:, 1, 0] - p[:, 0, 0]) * (p[:, 2, 1] - p[:, 0, 1])
                      - (p[:, 1, 1] - p[:, 0, 1]) * (p[:, 2, 0] - p[:, 0, 0]))
        return _frozen(area)

    @cached_property
    def gradients(self) -> np.ndarray:
        """(m, 3, 2) constant gradients of the three barycentric hat functions."""
        p = self.corners
        x, y = p[:, :, 0], p[:, :, 1]
        grads = np.empty_like(p)
        for i in range(3):
            j, k = (i + 1) % 3, (i + 2) % 3
            grads[:, i, 0] = y[:, j] - y[:, k]
            grads[:, i, 1] = x[:, k] - x[:, j]
        grads /= (2.0 * self.areas)[:, None, None]
        return _frozen(grads)

    @cached_property
    def centroids(self) -> np.ndarray:
        return _frozen(self.corners.mean(axis=1))

    @cached_property
    def midpoints(self) -> np.ndarray:
        """(m, 3, 2) edge midpoints in the order (v0v1, v1v2, v2v0)."""
        p = self.corners
        return _frozen(0.5 * (p + np.roll(p, -1, axis=1)))

    @cached_property
    def boundary_mask(self) -> np.ndarray:
        mask = np.zeros(self.vertex_count, dtype=bool)
        mask[self.boundary_cycle] = True
        return _frozen(mask)

    @cached_property
    def edge_lengths(self) -> np.ndarray:
        """(m, 3) lengths of the triangle edges (v0v1, v1v2, v2v0)."""
        p = self.corners
        return _frozen(np.linalg.norm(np.roll(p, -1, axis=1) - p, axis=2))

    @cached_property
    def min_angle_deg(self) -> float:
        a, b, c = (self.edge_lengths[:, i] for i in range(3))
        cosines = np.stack([
            (b ** 2 + c ** 2 - a ** 2) / (2 * b * c),
            (a ** 2 + c ** 2 - b ** 2) / (2 * a * c),
            (a ** 2 + b ** 2 - c ** 2) / (2 * a * b),
        ])
        return float(np.degrees(np.arccos(np.clip(cosines, -1.0, 1.0))).min())

    @property
    def total_area(self) -> float:
        return float(self.areas.sum())


@dataclass(frozen=True)
class BoundaryParam:
    """Angle parametrization of the boundary loop of a TriMesh.

    Edge k joins ``vertices[k]`` to ``vertices[k + 1]`` (cyclically).
    """

    vertices: np.ndarray
    angles: np.ndarray
    edge_lengths: np.ndarray
    vertex_weights: np.ndarray
    vertex_count: int

    @property
    def total_length(self) -> float:
        return float(self.edge_lengths.sum())

    def full_weights(self) -> np.ndarray:
        """Lumped boundary weights as a vector over all mesh vertices."""
        weights = np.zeros(self.vertex_count)
        weights[self.vertices] = self.vertex_weights
        return weights

    def scatter(self, boundary_values: np.ndarray) -> np.ndarray:
        full = np.zeros(self.vertex_count)
        full[self.vertices] = boundary_values
        return full
