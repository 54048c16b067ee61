from pathlib import Path
from typing import Dict, List

import pandas as pd

from eitls.utils.constants import FLOAT_FORMAT


class FileStore:
    """Flat directory of text artifacts."""

    def __init__(self, root: 'str|Path', create: bool = False) -> None:
        self.root = Path(root)
        if create:
            self.root.mkdir(parents=True, exist_ok=True)

    def __str__(self) -> str:
        return f"{self.root}"

    def path(self, name: str) -> Path:
        return self.root / name

    def exists(self, name: str = "") -> bool:
        return self.path(name).exists() if name else self.root.is_dir()

    def read_text(self, name: str) -> str:
        return self.path(name).read_text()

    def write_text(self, name: str, text: str) -> Path:
        path = self.path(name)
        path.write_text(text)
        return path

    def read_frame(self, name: str, **kargs) -> pd.DataFrame:
        return pd.read_csv(self.path(name), float_precision="round_trip", **kargs)

    def write_frame(self, name: str, frame: pd.DataFrame, **kargs) -> Path:
        path = self.path(name)
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n", **kargs)
        return path

    def read_key_values(self, name: str) -> Dict[str, str]:
        """Parse ``key = value`` lines, ignoring blanks and ``#`` comments."""
        values: Dict[str, str] = {}
        for line in self.read_text(name).splitlines():
            line = line.split("#", 1)[0].strip()
            if not line or "=" not in line:
                continue
            key, value = line.split("=", 1)
            values[key.strip()] = value.strip()
        return values

    def write_key_values(self, name: str, values: Dict[str, object]) -> Path:
        return self.write_text(name, "".join(f"{key} = {value}\n" for key, value in values.items()))

    def subdirectories(self) -> List[Path]:
        return sorted(path for path in self.root.iterdir() if path.is_dir())
