# SPDX-License-Identifier: MIT
# Section timing for the reduction loop and the experiment pipeline.

import logging
import time
from abc import ABC, abstractmethod
from contextlib import contextmanager
from typing import Callable, Dict, Iterator, List, Optional

logger = logging.getLogger(__name__)


class Profiler(ABC):

    @abstractmethod
    def start_section(self, section_name: str) -> None:
        pass

    @abstractmethod
    def end_section(self, section_name: str = "") -> None:
        pass

    @abstractmethod
    def report(self, period_sec: int = 30) -> None:
        pass

    @contextmanager
    def section(self, section_name: str) -> Iterator[None]:
        self.start_section(section_name)
        try:
            yield
        finally:
            self.end_section(section_name)


class NullProfiler(Profiler):
    """Does nothing; the default wherever profiling is disabled."""

    def start_section(self, section_name: str) -> None:
        pass

    def end_section(self, section_name: str = "") -> None:
        pass

    def report(self, period_sec: int = 30) -> None:
        pass


class SectionStats:
    __slots__ = ["name", "started_at", "samples", "total_sec"]

    def __init__(self, name: str) -> None:
        self.name = name
        self.started_at: Optional[float] = None
        self.samples = 0
        self.total_sec = 0.0

    def describe(self, enclosing_sec: float) -> str:
        share = f" ({100 * self.total_sec / enclosing_sec:>6.2f}%)" if enclosing_sec > 0 else ""
        micros_per_sample = 1_000_000 * self.total_sec / self.samples if self.samples else 0.0
        return f"{self.name: <10}: took {self.total_sec:>8.3f} s{share}, " \
               f"{self.samples: >9,} samples, {micros_per_sample:>10.1f} us / sample"


class SectionProfiler(Profiler):
    """
    Accumulates wall-clock time per named section. Sections may nest but a section
    cannot be started twice before it ends.
    """

    def __init__(self,
                 enclosing_section_name: str = "reduce",
                 clock: Callable[[], float] = time.perf_counter,
                 printer: Callable[[str], None] = logger.info) -> None:
        self.enclosing_section_name = enclosing_section_name
        self.clock = clock
        self.printer = printer
        self.sections: Dict[str, SectionStats] = {}
        self._open: List[str] = []
        self.last_report_at = clock()

    def start_section(self, section_name: str) -> None:
        if not section_name:
            raise ValueError("section name is empty")
        stats = self.sections.setdefault(section_name, SectionStats(section_name))
        if stats.started_at is not None:
            raise ValueError(f"section {section_name} is already started")
        stats.started_at = self.clock()
        self._open.append(section_name)

    def end_section(self, section_name: str = "") -> None:
        now = self.clock()
        if not section_name:
            if not self._open:
                raise ValueError("no section is started")
            section_name = self._open[-1]
        stats = self.sections.get(section_name)
        if stats is None or stats.started_at is None:
            raise ValueError(f"section {section_name} was not started")
        stats.total_sec += now - stats.started_at
        stats.samples += 1
        stats.started_at = None
        self._open.remove(section_name)

    def total_seconds(self, section_name: str) -> float:
        stats = self.sections.get(section_name)
        return stats.total_sec if stats else 0.0

    def report(self, period_sec: int = 30) -> None:
        if self.clock() - self.last_report_at < period_sec:
            return
        enclosing = self.total_seconds(self.enclosing_section_name)
        ordered = sorted(self.sections.values(), key=lambda s: s.total_sec, reverse=True)
        self.printer("\n".join(s.describe(enclosing) for s in ordered))
        self.last_report_at = self.clock()
