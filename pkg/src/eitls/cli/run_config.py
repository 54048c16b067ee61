import dataclasses
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, List, Optional, TypeVar

from eitls.inverse.optimizer.config import ReconstructionConfig
from eitls.inverse.optimizer.errors import ConfigurationError
from eitls.utils.index import get_unknown_keys, parse_float_list

from .errors import RunConfigError

T = TypeVar("T")

PATH_KEYS = ("gen_mesh", "recon_mesh", "dataset", "out", "mesh", "control")
EXPERIMENT_KEYS = (
    "h", "shape", "truth", "E", "eps", "seed", "snapshots", "use_clean", "allow_same_mesh",
    "measurement_counts", "gammas", "noise_levels", "seeds",
)
RECONSTRUCTION_KEYS = tuple(field.name for field in dataclasses.fields(ReconstructionConfig))
RUN_CONFIG_KEYS = PATH_KEYS + EXPERIMENT_KEYS + RECONSTRUCTION_KEYS

TRUE_VALUES = ("1", "true", "yes", "on")
FALSE_VALUES = ("0", "false", "no", "off")


class RunConfig:
    """Flat ``key = value`` run configuration.

    Every value keeps the line it came from so that errors can point back
    into the file. Values given on the command line carry line 0.

    Example
        >>> config = RunConfig.from_text("gamma = 0.001  # smoothing")
        >>> config.get("gamma", kind=float)
        0.001
    """

    def __init__(self, values: Optional[Dict[str, Any]] = None, lines: Optional[Dict[str, int]] = None) -> None:
        self.values: Dict[str, Any] = dict(values or {})
        self.lines: Dict[str, int] = dict(lines or {})

    @classmethod
    def from_text(cls, text: str) -> 'RunConfig':
        values: Dict[str, str] = {}
        lines: Dict[str, int] = {}

        for number, line in enumerate(text.splitlines(), start=1):
            content = line.split("#", 1)[0].strip()
            if not content:
                continue
            if "=" not in content:
                raise RunConfigError(number, content, "Expected 'key = value'")

            key, value = (part.strip() for part in content.split("=", 1))
            if key not in RUN_CONFIG_KEYS:
                raise RunConfigError(number, key, "Unknown key")
            if key in values:
                raise RunConfigError(number, key, "Duplicate key")
            values[key] = value
            lines[key] = number

        return cls(values, lines)

    @classmethod
    def from_file(cls, path: 'str|Path') -> 'RunConfig':
        return cls.from_text(Path(path).read_text())

    def merge(self, overrides: Dict[str, Any]) -> 'RunConfig':
        """New config with ``overrides`` (flags) replacing file values; ``None`` means unset."""
        given = {key: value for key, value in overrides.items() if value is not None}
        unknown = get_unknown_keys(given, RUN_CONFIG_KEYS)
        if unknown:
            raise RunConfigError(0, unknown[0], "Unknown key")

        values = {**self.values, **given}
        lines = {**self.lines, **{key: 0 for key in given}}
        return RunConfig(values, lines)

    def __contains__(self, key: str) -> bool:
        return key in self.values

    def require(self, keys: Iterable[str]) -> None:
        for key in keys:
            if key not in self.values:
                raise RunConfigError(0, key, "Missing required key")

    def get(self, key: str, default: Optional[T] = None, kind: Callable[[Any], T] = str) -> Optional[T]:
        if key not in self.values:
            return default
        try:
            return kind(self.values[key])
        except (TypeError, ValueError):
            raise RunConfigError(self.lines.get(key, 0), key, f"Invalid value {self.values[key]!r} for") from None

    def get_bool(self, key: str, default: bool = False) -> bool:
        if key not in self.values:
            return default
        value = self.values[key]
        if isinstance(value, bool):
            return value
        text = str(value).strip().lower()
        if text in TRUE_VALUES:
            return True
        if text in FALSE_VALUES:
            return False
        raise RunConfigError(self.lines.get(key, 0), key, f"Invalid boolean {value!r} for")

    def get_list(self, key: str, kind: Callable[[str], T], default: Optional[List[T]] = None) -> List[T]:
        if key not in self.values:
            return list(default or [])
        value = self.values[key]
        if isinstance(value, (list, tuple)):
            return [kind(item) for item in value]
        try:
            return [kind(item.strip()) for item in str(value).split(",") if item.strip() != ""]
        except ValueError:
            raise RunConfigError(self.lines.get(key, 0), key, f"Invalid list {value!r} for") from None

    def reconstruction_config(self) -> ReconstructionConfig:
        """ReconstructionConfig from the optimizer keys present."""
        values: Dict[str, Any] = {key: self.values[key] for key in RECONSTRUCTION_KEYS if key in self.values}
        try:
            if isinstance(values.get("init_center"), str):
                values["init_center"] = tuple(parse_float_list(values["init_center"]))
            return ReconstructionConfig.from_mapping(values)
        except (ConfigurationError, ValueError) as error:
            key = next((name for name in values if name in str(error)), "")
            raise RunConfigError(self.lines.get(key, 0), key, str(error)) from error
