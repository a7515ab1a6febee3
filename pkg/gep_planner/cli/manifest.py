"""Run manifest recorded next to every command's outputs."""

import time
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Iterator

from pydantic import BaseModel, Field

from gep_planner.common.filesystem import get_version
from gep_planner.common.hashing import directory_digests, file_digest, payload_digest
from gep_planner.common.logging_config import setup_logger
from gep_planner.system.config import StudyConfig

# Configure logging
log = setup_logger(__name__)

MANIFEST_NAME = "manifest.json"


class RunManifest(BaseModel):
    """What a run consumed and produced.

    Re-running the same command on inputs with the same digests, seed and config
    reproduces the output files byte for byte; only `phases` varies.
    """

    command: str = Field(..., description="Subcommand name")
    argv: list[str] = Field(default_factory=list, description="Full argument vector")
    version: str = Field(default_factory=get_version, description="Package version")
    seed: int = Field(0, description="Seed of every random draw")
    config: dict[str, Any] = Field(default_factory=dict, description="Config snapshot")
    config_digest: str = Field("", description="SHA-1 of the config snapshot")
    inputs: dict[str, str] = Field(default_factory=dict, description="SHA-1 per input")
    outputs: dict[str, str] = Field(default_factory=dict, description="SHA-1 per output")
    phases: dict[str, float] = Field(
        default_factory=dict, description="Wall-clock seconds per phase"
    )

    @classmethod
    def start(cls, command: str, argv: list[str], config: StudyConfig) -> "RunManifest":
        snapshot = config.model_dump(mode="json")
        return cls(
            command=command,
            argv=argv,
            seed=config.seed,
            config=snapshot,
            config_digest=payload_digest(snapshot),
        )

    def add_inputs(self, paths: list[Path]) -> None:
        for path in paths:
            if path.is_dir():
                for name, digest in directory_digests(path).items():
                    self.inputs[f"{path.as_posix()}/{name}"] = digest
            elif path.is_file():
                self.inputs[path.as_posix()] = file_digest(path)

    def add_output(self, path: Path) -> Path:
        self.outputs[path.name] = file_digest(path)
        return path

    @contextmanager
    def phase(self, name: str) -> Iterator[None]:
        start = time.monotonic()
        try:
            yield
        finally:
            self.phases[name] = round(time.monotonic() - start, 3)
            log.debug(f"Phase {name} took {self.phases[name]:.3f}s")

    def write(self, directory: Path) -> Path:
        directory.mkdir(parents=True, exist_ok=True)
        path = directory / MANIFEST_NAME
        path.write_text(self.model_dump_json(indent=2) + "\n", encoding="utf-8")
        log.info(f"Wrote run manifest to {path}")
        return path
