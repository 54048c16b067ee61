import logging
import math
from typing import List, Tuple

import numpy as np
import triangle
from scipy.spatial import cKDTree

from eitls.entities.eit_entities import ShapeSpec
from eitls.entities.mesh_entities import BoundaryParam, TriMesh
from eitls.utils.constants import GEOMETRY_TOL, MIN_ANGLE_DEG
from eitls.utils.index import TWO_PI, wrap_angle

from .errors import MeshGenerationError, MeshValidationError, ShapeOutsideDomainError


def _check_edge_length(target_edge_length: float) -> None:
    if not (isinstance(target_edge_length, (int, float, np.number))
            and math.isfinite(target_edge_length)
            and 0 < target_edge_length < 1):
        raise MeshGenerationError(target_edge_length, "Target edge length must satisfy 0 < h < 1")


def _outer_ring(target_edge_length: float) -> np.ndarray:
    count = max(int(math.ceil(TWO_PI / target_edge_length)), 8)
    t = TWO_PI * np.arange(count) / count
    return np.column_stack([np.cos(t), np.sin(t)])


def _interior_rings(target_edge_length: float) -> np.ndarray:
    """Center point plus concentric rings with alternating angular offset."""
    n_rings = max(1, int(round(1.0 / target_edge_length)))
    points = [np.zeros((1, 2))]
    for k in range(1, n_rings):
        radius = k / n_rings
        count = max(6, int(round(TWO_PI * radius / target_edge_length)))
        t = TWO_PI * np.arange(count) / count + (k % 2) * math.pi / count
        points.append(radius * np.column_stack([np.cos(t), np.sin(t)]))
    return np.concatenate(points)


def _loop_segments(start: int, count: int) -> np.ndarray:
    idx = start + np.arange(count)
    return np.column_stack([idx, np.roll(idx, -1)])


def compact_vertices(vertices: np.ndarray, triangles: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Drop vertices no triangle references and renumber the triangles."""
    used = np.unique(triangles)
    remap = np.full(vertices.shape[0], -1, dtype=np.int64)
    remap[used] = np.arange(used.shape[0])
    return vertices[used], remap[triangles]


def _triangulate(points: np.ndarray,
                 segments: np.ndarray,
                 target_edge_length: float) -> Tuple[np.ndarray, np.ndarray]:

    max_area = 0.8 * target_edge_length ** 2
    # YY: no Steiner points on segments, keeps the outer ring on the unit circle
    options = f"pq{MIN_ANGLE_DEG:g}a{max_area:.12g}YYQ"

    try:
        mesh = triangle.triangulate({"vertices": points, "segments": segments}, options)
    except Exception as error:
        raise MeshGenerationError(target_edge_length, f"Triangle failed: {error}") from error

    if "triangles" not in mesh or len(mesh["triangles"]) == 0:
        raise MeshGenerationError(target_edge_length, "Triangle produced no elements")

    return compact_vertices(np.asarray(mesh["vertices"], dtype=float),
                            np.asarray(mesh["triangles"], dtype=np.int64))


def _check_on_circle(mesh: TriMesh, target_edge_length: float) -> None:
    radii = np.linalg.norm(mesh.vertices[mesh.boundary_cycle], axis=1)
    if np.max(np.abs(radii - 1.0)) > GEOMETRY_TOL:
        raise MeshGenerationError(target_edge_length, "Boundary vertices left the unit circle")


def generate_disk_mesh(target_edge_length: float) -> TriMesh:
    """Quality triangulation of the unit disk.

    Args:
        target_edge_length (float): nominal edge length h, 0 < h < 1

    Returns:
        TriMesh: mesh with boundary vertices on the unit circle
    """
    _check_edge_length(target_edge_length)

    outer = _outer_ring(target_edge_length)
    points = np.concatenate([outer, _interior_rings(target_edge_length)])
    segments = _loop_segments(0, outer.shape[0])

    vertices, triangles = _triangulate(points, segments, target_edge_length)
    mesh = TriMesh(vertices, triangles)
    _check_on_circle(mesh, target_edge_length)

    logging.info(f"Disk mesh h={target_edge_length}: {mesh.vertex_count} vertices, "
                 f"{mesh.triangle_count} triangles")
    return mesh


def validate_inside(shape: ShapeSpec) -> None:
    """Raise when the shape touches or crosses the unit circle."""
    max_radius = shape.max_radius
    if not max_radius < 1.0:
        raise ShapeOutsideDomainError(shape.to_text(), max_radius)


def straddling_triangles(mesh: TriMesh, shape: ShapeSpec, tol: float = GEOMETRY_TOL) -> np.ndarray:
    """Indices of triangles with vertices strictly on both sides of the interface."""
    levels = shape.level(mesh.vertices)[mesh.triangles]
    inside = np.all(levels <= tol, axis=1)
    outside = np.all(levels >= -tol, axis=1)
    return np.flatnonzero(~(inside | outside))


def generate_disk_mesh_with_shape(target_edge_length: float, shape: ShapeSpec) -> TriMesh:
    """Disk mesh whose edges follow the interface of ``shape``.

    Interface vertices are placed on the analytic curve and inserted as
    constrained segments; grid points closer than h/2 to the curve are
    dropped first.
    """
    _check_edge_length(target_edge_length)
    validate_inside(shape)

    outer = _outer_ring(target_edge_length)
    grid = _interior_rings(target_edge_length)
    loops: List[np.ndarray] = shape.boundary_loops(target_edge_length)

    dense = np.concatenate(shape.boundary_loops(target_edge_length / 8.0))
    distance, _ = cKDTree(dense).query(grid)
    grid = grid[distance >= 0.5 * target_edge_length]

    points = [outer]
    segments = [_loop_segments(0, outer.shape[0])]
    offset = outer.shape[0]
    for loop in loops:
        points.append(loop)
        segments.append(_loop_segments(offset, loop.shape[0]))
        offset += loop.shape[0]
    points.append(grid)

    vertices, triangles = _triangulate(np.concatenate(points), np.concatenate(segments), target_edge_length)
    mesh = TriMesh(vertices, triangles)
    _check_on_circle(mesh, target_edge_length)

    straddling = straddling_triangles(mesh, shape)
    if straddling.size:
        raise MeshGenerationError(
            target_edge_length, f"{straddling.size} triangles straddle the shape interface")

    logging.info(f"Shape mesh h={target_edge_length} ({shape.kind}): {mesh.vertex_count} vertices, "
                 f"{mesh.triangle_count} triangles")
    return mesh


def boundary_param(mesh: TriMesh) -> BoundaryParam:
    """Angles, edge lengths and lumped weights along the boundary loop.

    Args:
        mesh (TriMesh): valid mesh

    Returns:
        BoundaryParam: parametrization following ``mesh.boundary_cycle``
    """
    cycle = mesh.boundary_cycle
    if cycle.shape[0] < 3:
        raise MeshValidationError("boundary loop has fewer than 3 vertices")

    points = mesh.vertices[cycle]
    angles = wrap_angle(np.arctan2(points[:, 1], points[:, 0]))
    if not np.all(np.diff(angles) > 0):
        raise MeshValidationError("boundary angles are not increasing around the loop")

    edge_lengths = np.linalg.norm(np.roll(points, -1, axis=0) - points, axis=1)
    vertex_weights = 0.5 * (edge_lengths + np.roll(edge_lengths, 1))

    for array in (angles, edge_lengths, vertex_weights):
        array.setflags(write=False)

    return BoundaryParam(cycle, angles, edge_lengths, vertex_weights, mesh.vertex_count)
