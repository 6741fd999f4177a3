"""
Run manifests: what was run, with which inputs, and which files it wrote.
"""

import hashlib
import json
from dataclasses import asdict, dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from .. import __version__

MANIFEST_NAME = "manifest.json"


def file_sha256(path: Union[str, Path]) -> str:
    digest = hashlib.sha256()
    with open(path, 'rb') as f:
        for block in iter(lambda: f.read(1 << 16), b""):
            digest.update(block)
    return digest.hexdigest()


@dataclass
class RunManifest:
    """Provenance record written next to every set of output files."""

    command: str
    scenario_file: str
    scenario_sha256: str
    seed: int
    samples: int
    betas: List[float] = field(default_factory=list)
    path_index: Optional[int] = None
    version: str = __version__
    started: str = field(default_factory=lambda: datetime.now().isoformat())
    finished: Optional[str] = None
    files: List[str] = field(default_factory=list)
    summary: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def for_scenario(cls, command: str, scenario_file: Union[str, Path], **kwargs) -> "RunManifest":
        return cls(
            command=command,
            scenario_file=str(scenario_file),
            scenario_sha256=file_sha256(scenario_file),
            **kwargs
        )

    def add_file(self, path: Union[str, Path], root: Union[str, Path]) -> None:
        self.files.append(Path(path).relative_to(root).as_posix())

    def finish(self) -> None:
        self.finished = datetime.now().isoformat()

    def write(self, directory: Union[str, Path]) -> Path:
        path = Path(directory) / MANIFEST_NAME
        with open(path, 'w', encoding='utf-8') as f:
            json.dump(asdict(self), f, indent=2, default=str)
        return path

    @classmethod
    def load(cls, directory: Union[str, Path]) -> "RunManifest":
        with open(Path(directory) / MANIFEST_NAME, 'r', encoding='utf-8') as f:
            return cls(**json.load(f))
