# SPDX-License-Identifier: MIT
# Benchmark CSV and reduction step logs.

import csv
import io
import re
from dataclasses import dataclass
from typing import Iterable, List

from wf2pt.process_tree import Operator
from wf2pt.reduction import LoggedStep, StepRecord
from wf2pt.tree_text import TreeParseError, read_tree_text

BENCH_CSV_HEADER = ("size", "micros", "outcome")

_STEP_LINE = re.compile(r"^(?P<op>\S+) members=\[(?P<members>[^\]]*)\] new=(?P<new>\S+) label=(?P<label>.+)$")


@dataclass(frozen=True)
class BenchRow:
    size: int
    micros: int
    outcome: str


def write_bench_csv(rows: Iterable[BenchRow]) -> bytes:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(BENCH_CSV_HEADER)
    for row in rows:
        writer.writerow((row.size, row.micros, row.outcome))
    return buffer.getvalue().encode("utf-8")


def read_bench_csv(data: bytes) -> List[BenchRow]:
    reader = csv.DictReader(io.StringIO(data.decode("utf-8")))
    return [BenchRow(int(r["size"]), int(r["micros"]), r["outcome"]) for r in reader]


def format_step(step: StepRecord) -> str:
    return f"{step.kind.symbol} members=[{','.join(step.members)}] new={step.new_transition} label={step.new_label}"


def write_step_log(steps: Iterable[StepRecord]) -> str:
    return "".join(format_step(step) + "\n" for step in steps)


class StepLogParseError(ValueError):
    def __init__(self, message: str, line_number: int) -> None:
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


def read_step_log(text: str) -> List[LoggedStep]:
    steps: List[LoggedStep] = []
    for line_number, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        match = _STEP_LINE.match(line.strip())
        if match is None:
            raise StepLogParseError(f"not a step: {line}", line_number)
        try:
            kind = Operator.from_symbol(match.group("op"))
            label = read_tree_text(match.group("label"))
        except (ValueError, TreeParseError) as e:
            raise StepLogParseError(str(e), line_number)
        members = tuple(m.strip() for m in match.group("members").split(",") if m.strip())
        steps.append(LoggedStep(kind, members, match.group("new"), label))
    return steps
