from __future__ import annotations
import os
from dataclasses import dataclass, field
from pathlib import Path


def _home() -> Path:
    env = os.environ.get("FIN_INVERSE_HOME")
    return Path(env) if env else Path.home() / ".fin_inverse"


@dataclass(frozen=True)
class AppConfig:
    data_dir: Path = field(default_factory=_home)

    @property
    def log_dir(self) -> Path:
        return self.data_dir / "logs"


CONFIG = AppConfig()
