from typing import Any, Dict, Tuple

from pydantic import ConfigDict, Field, ValidationError, field_validator
from pydantic.dataclasses import dataclass

from eitls.inverse.levelset.smoothing import SmoothingParams
from eitls.utils.constants import (ALPHA_DEFAULT, DIRECT_SOLVER_LIMIT, ELECTRODE_WIDTH_DEFAULT,
                                   INITIAL_GUESS, LINE_SEARCH, MAX_ITERS_DEFAULT, SOLVER_TOL_DEFAULT,
                                   STOP_FACTOR_DEFAULT, TOL_FLOOR_DEFAULT)

from .errors import ConfigurationError


@dataclass(frozen=True, config=ConfigDict(extra="forbid"))
class ReconstructionConfig:
    """Tunables of one reconstruction run.

    The stopping tolerance is max(noise_level × stop_factor, tol_floor).
    """

    gamma: float = Field(gt=0, allow_inf_nan=False)
    alpha: float = Field(default=ALPHA_DEFAULT, gt=0, allow_inf_nan=False)
    electrode_count: int = Field(default=6, ge=2)
    width: float = Field(default=ELECTRODE_WIDTH_DEFAULT, gt=0)
    noise_level: float = Field(default=0.0, ge=0, allow_inf_nan=False)
    stop_factor: float = Field(default=STOP_FACTOR_DEFAULT, ge=0)
    tol_floor: float = Field(default=TOL_FLOOR_DEFAULT, ge=0)
    max_iters: int = Field(default=MAX_ITERS_DEFAULT, ge=1)
    shrink: float = Field(default=LINE_SEARCH["SHRINK"], gt=0, lt=1)
    armijo_c: float = Field(default=LINE_SEARCH["ARMIJO_C"], gt=0, lt=1)
    max_backtracks: int = Field(default=int(LINE_SEARCH["MAX_BACKTRACKS"]), ge=0)
    step_growth: float = Field(default=LINE_SEARCH["STEP_GROWTH"], ge=1)
    solver_tol: float = Field(default=SOLVER_TOL_DEFAULT, gt=0)
    direct_limit: int = Field(default=DIRECT_SOLVER_LIMIT, ge=1)
    seed: int = Field(default=0, ge=0)
    num_workers: int = Field(default=1, ge=1)
    init_radius: float = Field(default=INITIAL_GUESS["RADIUS"], gt=0)
    init_center: Tuple[float, float] = INITIAL_GUESS["CENTER"]
    log_every: int = Field(default=10, ge=1)

    @field_validator("electrode_count")
    @classmethod
    def _even_electrodes(cls, value: int) -> int:
        if value % 2:
            raise ValueError(f"electrode_count must be even, got {value}")
        return value

    @property
    def measurement_count(self) -> int:
        return self.electrode_count // 2

    @property
    def smoothing(self) -> SmoothingParams:
        return SmoothingParams(alpha=self.alpha, gamma=self.gamma)

    @property
    def stop_tolerance(self) -> float:
        return max(self.noise_level * self.stop_factor, self.tol_floor)

    @classmethod
    def from_mapping(cls, values: Dict[str, Any]) -> 'ReconstructionConfig':
        """Build from loose key/value pairs, reporting problems as ConfigurationError."""
        try:
            return cls(**values)
        except ValidationError as error:
            raise ConfigurationError(str(error)) from error
        except TypeError as error:
            raise ConfigurationError(str(error)) from error
