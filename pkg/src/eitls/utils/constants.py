import math
from typing import Dict, Tuple

#numerics
ALPHA_DEFAULT: float = 0.01
STOP_FACTOR_DEFAULT: float = 1e-9
TOL_FLOOR_DEFAULT: float = 1e-12
MAX_ITERS_DEFAULT: int = 1000
ELECTRODE_WIDTH_DEFAULT: float = math.pi / 20
SOLVER_TOL_DEFAULT: float = 1e-10
DIRECT_SOLVER_LIMIT: int = 50_000
COMPATIBILITY_TOL: float = 1e-2
GEOMETRY_TOL: float = 1e-9
CHI_TOL: float = 1e-12
MIN_ANGLE_DEG: float = 20.0

LINE_SEARCH: Dict[str, float] = {
    "SHRINK": 0.5,
    "ARMIJO_C": 1e-4,
    "MAX_BACKTRACKS": 25,
    "STEP_GROWTH": 2.0,
}

INITIAL_GUESS: Dict[str, object] = {
    "RADIUS": 0.2,
    "CENTER": (0.0, 0.0),
}

#per-experiment gamma optima
GAMMA_BY_PHANTOM: Dict[str, float] = {
    "ellipse": 0.001,
    "circles": 0.006,
}

#shapes
DEFAULT_SHAPES: Dict[str, str] = {
    "ELLIPSE": "ellipse 0 0 0.4 0.2 0",
    "CIRCLES": "circles -0.3 0.3 0.25 0.35 -0.25 0.15",
}
PROFILE_LINE: Tuple[Tuple[float, float], Tuple[float, float]] = ((-0.5, 0.0), (0.5, 0.0))

#storage
FILE_NAMES: Dict[str, str] = {
    "GEN_MESH": "mesh_gen.txt",
    "META": "meta.txt",
    "CLEAN": "m_{:03d}.csv",
    "NOISY": "mt_{:03d}.csv",
    "CONVERGENCE": "convergence.csv",
    "SUMMARY": "summary.txt",
    "SNAPSHOT_DIR": "snapshot_{:03d}",
    "PROFILE": "profile.csv",
    "TABLE": "table.csv",
}
FIELD_NAMES: Tuple[str, ...] = ("q", "H", "sigma", "f", "lambda")
FLOAT_FORMAT: str = "%.17g"
MESH_FORMATS: Dict[str, str] = {
    "NATIVE": "native",
    "MSH2": "msh2",
}

#noise
PRNG_ID: str = "numpy.SFC64"

#optimizer
TERMINATION: Dict[str, str] = {
    "CONVERGED": "converged",
    "MAX_ITERS": "max_iters",
    "LINE_SEARCH_FAILED": "line_search_failed",
}
CONVERGENCE_COLUMNS: Tuple[str, ...] = ("iter", "J", "grad_inf", "step", "backtracks", "eps_err")
TABLE_COLUMNS: Tuple[str, ...] = ("M", "gamma", "iterations", "J_final", "eps_err")

#cli
EXIT_CODES: Dict[str, int] = {
    "OK": 0,
    "FAILURE": 1,
    "USAGE": 2,
}
LOG_FORMAT: str = "%(asctime)s %(levelname)s %(message)s"
