# SPDX-License-Identifier: MIT
# Where experiment checkpoints are kept between runs.

import logging
import os
import pathlib
from abc import ABC, abstractmethod
from typing import Optional

logger = logging.getLogger(__name__)


class ExperimentStore(ABC):
    """Keeps the latest checkpoint of a running experiment as opaque bytes."""

    @property
    @abstractmethod
    def location(self) -> str:
        pass

    @abstractmethod
    def save_state(self, state: bytes) -> None:
        pass

    @abstractmethod
    def load_state(self) -> Optional[bytes]:
        pass


class FileExperimentStore(ExperimentStore):
    """
    A checkpoint file. The new state is written next to it and then renamed over it,
    so an interrupted save leaves the previous checkpoint intact.
    """

    def __init__(self, file_path: str) -> None:
        self.path = pathlib.Path(file_path)

    @property
    def location(self) -> str:
        return str(self.path)

    def save_state(self, state: bytes) -> None:
        self.path.parent.mkdir(parents=True, exist_ok=True)
        tmp_path = self.path.with_name(self.path.name + ".tmp")
        tmp_path.write_bytes(state)
        os.replace(tmp_path, self.path)

    def load_state(self) -> Optional[bytes]:
        if not self.path.exists():
            return None
        state = self.path.read_bytes()
        logger.debug(f"read {len(state)} bytes of experiment state from {self.path}")
        return state


class MemoryExperimentStore(ExperimentStore):
    def __init__(self) -> None:
        self.state: Optional[bytes] = None
        self.save_count = 0

    @property
    def location(self) -> str:
        return "memory"

    def save_state(self, state: bytes) -> None:
        self.state = state
        self.save_count += 1

    def load_state(self) -> Optional[bytes]:
        return self.state
