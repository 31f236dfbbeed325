# SPDX-License-Identifier: MIT
# Seeded random process trees with a triangular distribution over the number of activities.

import configparser
import json
import logging
import math
from dataclasses import dataclass, field, replace
from typing import Dict, Iterator, List, Mapping, Tuple

import numpy as np

from wf2pt.process_tree import Operator, ProcessTree, activity, operator_tree

logger = logging.getLogger(__name__)

DEFAULT_OPERATOR_PROBABILITIES: Mapping[Operator, float] = {
    Operator.SEQ: 0.35,
    Operator.XOR: 0.25,
    Operator.AND: 0.25,
    Operator.LOOP: 0.15,
}

MAX_ARITY = 4

_OPERATOR_NAMES = {"seq": Operator.SEQ, "xor": Operator.XOR, "and": Operator.AND, "loop": Operator.LOOP}

_CONFIG_KEYS = ("activities", "probabilities", "seed")


def parse_activity_triple(text: str) -> Tuple[int, int, int]:
    parts = [int(p) for p in text.split(",")]
    if len(parts) != 3:
        raise ValueError(f"expected low,mode,high but got: {text}")
    return parts[0], parts[1], parts[2]


def _operator_for_key(key: str) -> Operator:
    key = key.strip()
    if key.lower() in _OPERATOR_NAMES:
        return _OPERATOR_NAMES[key.lower()]
    return Operator.from_symbol(key)


def parse_probabilities(values: Mapping[str, float]) -> Dict[Operator, float]:
    """Keys are operator symbols (->, X, +, *) or names (seq, xor, and, loop); missing operators get 0."""
    probabilities = {op: 0.0 for op in Operator}
    for key, value in values.items():
        probabilities[_operator_for_key(key)] = float(value)
    return probabilities


def parse_probabilities_text(text: str) -> Dict[Operator, float]:
    """Parses 'seq=0.4,xor=0.2,and=0.2,loop=0.2' (symbols are accepted as keys too)."""
    values: Dict[str, float] = {}
    for item in text.split(","):
        key, sep, value = item.rpartition("=")
        if not sep:
            raise ValueError(f"expected key=value in probabilities, got: {item}")
        values[key] = float(value)
    return parse_probabilities(values)


@dataclass(frozen=True)
class GeneratorConfig:
    low: int = 10
    mode: int = 20
    high: int = 30
    operator_probabilities: Tuple[Tuple[Operator, float], ...] = field(
        default=tuple(DEFAULT_OPERATOR_PROBABILITIES.items()))
    seed: int = 0

    def __init__(self,
                 low: int = 10,
                 mode: int = 20,
                 high: int = 30,
                 operator_probabilities: Mapping[Operator, float] = DEFAULT_OPERATOR_PROBABILITIES,
                 seed: int = 0) -> None:
        items = operator_probabilities.items() if isinstance(operator_probabilities, Mapping) \
            else operator_probabilities
        object.__setattr__(self, "low", low)
        object.__setattr__(self, "mode", mode)
        object.__setattr__(self, "high", high)
        object.__setattr__(self, "operator_probabilities", tuple(sorted(items, key=lambda kv: kv[0].value)))
        object.__setattr__(self, "seed", seed)
        self._validate()

    def _validate(self) -> None:
        if not 1 <= self.low <= self.mode <= self.high:
            raise ValueError(f"activity distribution must satisfy 1 <= low <= mode <= high: "
                             f"({self.low}, {self.mode}, {self.high})")
        for op, probability in self.operator_probabilities:
            if not 0.0 <= probability <= 1.0:
                raise ValueError(f"probability of {op.symbol} outside [0, 1]: {probability}")
        total = sum(p for _, p in self.operator_probabilities)
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"operator probabilities must sum to 1, got {total}")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError(f"seed must be a 64-bit unsigned integer: {self.seed}")

    @property
    def probabilities(self) -> Dict[Operator, float]:
        return dict(self.operator_probabilities)

    def with_seed(self, seed: int) -> "GeneratorConfig":
        return replace(self, seed=seed)

    @staticmethod
    def load(config_filename: str, base: "GeneratorConfig" = None) -> "GeneratorConfig":  # type: ignore[assignment]
        """Reads a plain key=value file (an INI section header is optional)."""
        base = base or GeneratorConfig()
        with open(config_filename, encoding="utf-8") as f:
            text = f.read()
        parser = configparser.ConfigParser()
        try:
            parser.read_string(text)
        except configparser.MissingSectionHeaderError:
            parser.read_string("[GENERATOR]\n" + text)
        section = parser.sections()[0] if parser.sections() else "GENERATOR"
        if not parser.has_section(section):
            return base

        for key in parser[section]:
            if key not in _CONFIG_KEYS:
                logger.warning(f"ignoring unknown generator key in {config_filename}: {key}")

        low, mode, high = base.low, base.mode, base.high
        activities_str = parser.get(section, "activities", fallback=None)
        if activities_str is not None:
            low, mode, high = parse_activity_triple(activities_str)
        probabilities = base.probabilities
        probabilities_str = parser.get(section, "probabilities", fallback=None)
        if probabilities_str is not None:
            probabilities = parse_probabilities(json.loads(probabilities_str))
        seed = parser.getint(section, "seed", fallback=base.seed)
        return GeneratorConfig(low, mode, high, probabilities, seed)


def sample_activity_count(rng: np.random.Generator, low: int, mode: int, high: int) -> int:
    """Triangular distribution by inverse CDF, rounded to the nearest integer and clamped to [low, high]."""
    if high == low:
        return low
    u = float(rng.random())
    split = (mode - low) / (high - low)
    if u < split:
        value = low + math.sqrt(u * (high - low) * (mode - low))
    else:
        value = high - math.sqrt((1 - u) * (high - low) * (high - mode))
    return min(high, max(low, int(round(value))))


class TreeGenerator:
    """One generator per seed. Every generated tree uses each of the activities a1..an exactly once."""

    def __init__(self, config: GeneratorConfig) -> None:
        self.config = config
        self.rng = np.random.default_rng(config.seed)
        self.operators = [op for op, p in config.operator_probabilities if p > 0]
        weights = np.array([p for _, p in config.operator_probabilities if p > 0])
        self.weights = weights / weights.sum()

    def sample(self) -> ProcessTree:
        count = sample_activity_count(self.rng, self.config.low, self.config.mode, self.config.high)
        names = (f"a{i}" for i in range(1, count + 1))
        return self._build(count, names)

    def _build(self, count: int, names: Iterator[str]) -> ProcessTree:
        if count == 1:
            return activity(next(names))

        op = self.operators[int(self.rng.choice(len(self.operators), p=self.weights))]
        arity = 2 if op is Operator.LOOP else int(self.rng.integers(2, min(MAX_ARITY, count) + 1))
        cuts = sorted(int(c) for c in self.rng.choice(np.arange(1, count), size=arity - 1, replace=False))
        sizes = [b - a for a, b in zip([0] + cuts, cuts + [count])]
        children: List[ProcessTree] = [self._build(size, names) for size in sizes]
        return operator_tree(op, children)


def sample_tree(config: GeneratorConfig) -> ProcessTree:
    return TreeGenerator(config).sample()
