import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from eitls.entities.eit_entities import BoundaryData, CurrentPattern, NoiseSpec, ShapeSpec
from eitls.entities.mesh_entities import BoundaryParam, TriMesh
from eitls.inverse.forward.errors import BoundaryDataError
from eitls.inverse.forward.forward import forward_solve_many
from eitls.inverse.forward.patterns import make_patterns
from eitls.inverse.forward.traces import boundary_norm, boundary_trace, resample_boundary
from eitls.inverse.levelset.shapes import true_conductivity
from eitls.inverse.mesh.generators import boundary_param, straddling_triangles
from eitls.utils.constants import DIRECT_SOLVER_LIMIT, ELECTRODE_WIDTH_DEFAULT, SOLVER_TOL_DEFAULT

from .errors import InverseCrimeError, NoiseError, NonConformingMeshError

__all__ = [
    "SyntheticDataset", "simulate_measurements", "noise_generator", "add_noise",
    "resample_boundary", "check_inverse_crime", "generate_dataset",
]


@dataclass(frozen=True, eq=False)
class SyntheticDataset:
    shape: ShapeSpec
    mesh: TriMesh
    patterns: List[CurrentPattern]
    clean: List[BoundaryData]
    noisy: List[BoundaryData]
    noise: NoiseSpec


def simulate_measurements(shape: ShapeSpec,
                          gen_mesh: TriMesh,
                          patterns: Sequence[CurrentPattern],
                          bparam: Optional[BoundaryParam] = None,
                          tol: float = SOLVER_TOL_DEFAULT,
                          direct_limit: int = DIRECT_SOLVER_LIMIT,
                          num_workers: int = 1) -> List[BoundaryData]:
    """Clean boundary potentials for the piecewise constant phantom σ = 1 + χ_D.

    Args:
        shape (ShapeSpec): phantom
        gen_mesh (TriMesh): mesh conforming to the phantom interface
        patterns (Sequence[CurrentPattern]): current patterns

    Raises:
        NonConformingMeshError: a triangle straddles the interface

    Returns:
        List[BoundaryData]: one mean-zero trace per pattern
    """
    straddling = straddling_triangles(gen_mesh, shape)
    if straddling.size:
        first = int(straddling[0])
        levels = tuple(float(v) for v in shape.level(gen_mesh.vertices[gen_mesh.triangles[first]]))
        raise NonConformingMeshError(first, levels)

    bparam = boundary_param(gen_mesh) if bparam is None else bparam
    _, potentials = forward_solve_many(gen_mesh, true_conductivity(shape, gen_mesh), patterns,
                                       bparam, tol, direct_limit, num_workers)

    logging.info(f"Simulated {len(patterns)} measurements for {shape.kind} on {gen_mesh.vertex_count} vertices")
    return [boundary_trace(u, bparam, j + 1) for j, u in enumerate(potentials)]


def noise_generator(seed: int, index: int) -> np.random.Generator:
    """SFC64 stream for measurement ``index``, independent across measurements."""
    return np.random.Generator(np.random.SFC64(np.random.SeedSequence([int(seed), int(index)])))


def add_noise(m: BoundaryData, bparam: BoundaryParam, spec: NoiseSpec) -> BoundaryData:
    """m̃ = m + ε‖m‖ θ/‖θ‖ with θ uniform on (-1, 1) per boundary vertex.

    Norms use the boundary mass quadrature, so ‖m̃ - m‖ = ε‖m‖ exactly.
    """
    if not np.array_equal(m.angles, bparam.angles):
        raise BoundaryDataError("noise must be added on the sampling boundary", m.index)
    if spec.level == 0:
        return m

    signal = boundary_norm(bparam, m.values)
    if signal == 0.0:
        raise NoiseError(m.index)

    theta = noise_generator(spec.seed, m.index).uniform(-1.0, 1.0, size=len(m))
    scale = spec.level * signal / boundary_norm(bparam, theta)
    return m.with_values(m.values + scale * theta)


def check_inverse_crime(gen_mesh: TriMesh, recon_mesh: TriMesh, allow_same_mesh: bool = False) -> None:
    """Refuse to reconstruct on the generation mesh unless explicitly allowed."""
    same = gen_mesh is recon_mesh or (
        gen_mesh.vertices.shape == recon_mesh.vertices.shape
        and gen_mesh.triangles.shape == recon_mesh.triangles.shape
        and np.array_equal(gen_mesh.vertices, recon_mesh.vertices)
        and np.array_equal(gen_mesh.triangles, recon_mesh.triangles))

    if not same:
        return
    if not allow_same_mesh:
        raise InverseCrimeError()
    logging.warning("Reconstructing on the generation mesh (inverse crime)")


def generate_dataset(shape: ShapeSpec,
                     gen_mesh: TriMesh,
                     electrode_count: int,
                     noise: NoiseSpec,
                     width: float = ELECTRODE_WIDTH_DEFAULT,
                     num_workers: int = 1) -> SyntheticDataset:
    """Clean and noisy measurements for every pattern, noise drawn in pattern order."""
    patterns = make_patterns(electrode_count, width)
    bparam = boundary_param(gen_mesh)
    clean = simulate_measurements(shape, gen_mesh, patterns, bparam, num_workers=num_workers)
    noisy = [add_noise(m, bparam, noise) for m in clean]
    return SyntheticDataset(shape, gen_mesh, patterns, clean, noisy, noise)
