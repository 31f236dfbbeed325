# SPDX-License-Identifier: MIT
# Rediscoverability and runtime experiments over randomly generated process trees.

import base64
import logging
import time
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import jsonpickle  # type: ignore[import]
import numpy as np

from wf2pt.config import Wf2PtConfig
from wf2pt.experiment_store import ExperimentStore
from wf2pt.petri_net import check_soundness
from wf2pt.process_tree import canonicalize
from wf2pt.profiler import NullProfiler, Profiler, SectionProfiler
from wf2pt.reduction import ReducedTree, WorkflowNetReducer
from wf2pt.serialization import BenchRow
from wf2pt.tree_generator import GeneratorConfig, TreeGenerator
from wf2pt.tree_to_net import TranslationVariant, tree_to_wfnet

logger = logging.getLogger(__name__)

OUTCOME_MATCH = "match"
OUTCOME_MISMATCH = "mismatch"
OUTCOME_IRREDUCIBLE = "irreducible"


@dataclass
class RediscoveryResult:
    seed: int
    variant: str
    net_size: int
    generated: str
    reduced: Optional[str]
    sound: Optional[bool] = None

    @property
    def matched(self) -> bool:
        return self.reduced == self.generated

    @property
    def key(self) -> str:
        return f"{self.seed}/{self.variant}"

    def __str__(self) -> str:
        reduced = self.reduced if self.reduced is not None else "<irreducible>"
        return f"seed={self.seed} variant={self.variant} size={self.net_size} " \
               f"generated={self.generated} reduced={reduced}"


@dataclass
class RediscoveryReport:
    results: List[RediscoveryResult]

    @property
    def total(self) -> int:
        return len(self.results)

    @property
    def matches(self) -> int:
        return sum(1 for r in self.results if r.matched)

    @property
    def mismatches(self) -> List[RediscoveryResult]:
        return [r for r in self.results if not r.matched]

    @property
    def unsound(self) -> List[RediscoveryResult]:
        return [r for r in self.results if r.sound is False]

    @property
    def all_matched(self) -> bool:
        return not self.mismatches and not self.unsound

    def summary_lines(self) -> List[str]:
        lines = [f"{self.matches}/{self.total} match"]
        lines.extend(f"mismatch: {r}" for r in self.mismatches)
        lines.extend(f"unsound input: {r}" for r in self.unsound)
        return lines


class _Checkpoint:
    """What is persisted between runs: the run parameters and the finished results by key."""

    def __init__(self, run_key: str) -> None:
        self.run_key = run_key
        self.results: Dict[str, RediscoveryResult] = {}


class RediscoveryExperiment:
    """
    Generate a tree per seed, translate it with each variant, reduce the net and compare
    canonical forms. Results are reported in seed order whatever the number of workers.
    """

    def __init__(self,
                 config: Wf2PtConfig,
                 generator_config: GeneratorConfig,
                 variants: Sequence[TranslationVariant],
                 check_soundness: bool = False,
                 store: Optional[ExperimentStore] = None) -> None:
        self.config = config
        self.generator_config = generator_config
        self.variants = tuple(variants)
        self.check_soundness = check_soundness
        self.store = store
        self.profiler: Profiler = NullProfiler()
        if config.profiling_enabled and config.experiment_workers == 1:
            self.profiler = SectionProfiler(enclosing_section_name="instance")

    def run_key(self, count: int) -> str:
        g = self.generator_config
        probabilities = ",".join(f"{op.symbol}={p}" for op, p in g.operator_probabilities)
        variants = ",".join(v.value for v in self.variants)
        return f"count={count} seed={g.seed} activities={g.low},{g.mode},{g.high} " \
               f"probabilities={probabilities} variants={variants} soundness={self.check_soundness}"

    def run_instance(self, seed: int) -> List[RediscoveryResult]:
        self.profiler.start_section("instance")
        with self.profiler.section("generate"):
            tree = TreeGenerator(self.generator_config.with_seed(seed)).sample()
        generated = str(canonicalize(tree))
        reducer = WorkflowNetReducer(self.config.strict_and, self.config.detector_order)
        results = []
        for variant in self.variants:
            with self.profiler.section("translate"):
                wfnet = tree_to_wfnet(tree, variant)
            with self.profiler.section("reduce"):
                outcome = reducer.reduce(wfnet)
            reduced = str(outcome.tree) if isinstance(outcome, ReducedTree) else None
            result = RediscoveryResult(seed, variant.value, wfnet.size(), generated, reduced)
            if self.check_soundness and reduced is not None:
                with self.profiler.section("soundness"):
                    result.sound = check_soundness(wfnet, self.config.state_space_caps()).sound
            if not result.matched:
                logger.warning(f"rediscovery failed: {result}")
            results.append(result)
        self.profiler.end_section("instance")
        self.profiler.report(self.config.profiling_report_sec)
        return results

    def run(self, count: int) -> RediscoveryReport:
        checkpoint = self.load_state(self.run_key(count))
        first_seed = self.generator_config.seed
        seeds = range(first_seed, first_seed + count)
        pending = [s for s in seeds if any(f"{s}/{v.value}" not in checkpoint.results for v in self.variants)]
        logger.info(f"rediscovering {len(pending)} of {count} trees with variants "
                    f"{[v.value for v in self.variants]}, {self.config.experiment_workers} workers")

        done_since_save = 0
        with ThreadPoolExecutor(max_workers=max(1, self.config.experiment_workers)) as executor:
            for i, results in enumerate(executor.map(self.run_instance, pending), start=1):
                for result in results:
                    checkpoint.results[result.key] = result
                done_since_save += 1
                if done_since_save >= self.config.snapshot_every:
                    self.save_state(checkpoint, f"{i} of {len(pending)} trees done")
                    done_since_save = 0
        if done_since_save:
            self.save_state(checkpoint, "finished")

        ordered = [checkpoint.results[f"{s}/{v.value}"] for s in seeds for v in self.variants]
        return RediscoveryReport(ordered)

    def load_state(self, run_key: str) -> _Checkpoint:
        if self.store is None:
            return _Checkpoint(run_key)
        state = self.store.load_state()
        if state is None:
            logger.info("Saved experiment state not found")
            return _Checkpoint(run_key)

        if self.config.snapshot_compress_state:
            state = zlib.decompress(base64.b64decode(state))
        checkpoint: _Checkpoint = jsonpickle.loads(state, keys=True)
        if checkpoint.run_key != run_key:
            logger.warning(f"ignoring saved experiment state of a different run: {checkpoint.run_key}")
            return _Checkpoint(run_key)
        logger.info(f"Restored {len(checkpoint.results)} finished results")
        return checkpoint

    def save_state(self, checkpoint: _Checkpoint, snapshot_reason: str) -> None:
        if self.store is None:
            return
        state = jsonpickle.dumps(checkpoint, keys=True).encode('utf-8')
        if self.config.snapshot_compress_state:
            state = base64.b64encode(zlib.compress(state))
        logger.info(f"Saving state of {len(checkpoint.results)} results to {self.store.location}, {len(state)} bytes, "
                    f"reason: {snapshot_reason}")
        self.store.save_state(state)


@dataclass(frozen=True)
class QuadraticFit:
    """time = a * size^2 + b * size + c over the mean time per net size."""
    a: float
    b: float
    c: float
    r_squared: float
    base_size: float
    doubling_ratio: Optional[float]

    def predict(self, size: float) -> float:
        return self.a * size * size + self.b * size + self.c

    def summary_lines(self) -> List[str]:
        lines = [f"fit: micros = {self.a:.6g}*size^2 + {self.b:.6g}*size + {self.c:.6g}",
                 f"R^2 = {self.r_squared:.4f}"]
        if self.doubling_ratio is not None:
            lines.append(f"fitted time ratio size {self.base_size:g} -> {2 * self.base_size:g}: "
                         f"{self.doubling_ratio:.2f}x")
        return lines


def mean_time_per_size(rows: Iterable[BenchRow]) -> Tuple[np.ndarray, np.ndarray]:
    totals: Dict[int, List[int]] = {}
    for row in rows:
        totals.setdefault(row.size, []).append(row.micros)
    sizes = sorted(totals)
    return np.array(sizes, dtype=float), np.array([np.mean(totals[s]) for s in sizes], dtype=float)


def fit_quadratic(rows: Sequence[BenchRow]) -> Optional[QuadraticFit]:
    """Least-squares quadratic over the per-size means; None with fewer than three distinct sizes."""
    sizes, means = mean_time_per_size(rows)
    if len(sizes) < 3:
        return None
    a, b, c = np.polyfit(sizes, means, 2)
    predicted = np.polyval((a, b, c), sizes)
    ss_res = float(np.sum((means - predicted) ** 2))
    ss_tot = float(np.sum((means - np.mean(means)) ** 2))
    r_squared = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0

    base_size = float(sizes[-1]) / 2
    median = float(np.median(sizes))
    if 2 * median in sizes:
        base_size = median
    fit = QuadraticFit(float(a), float(b), float(c), r_squared, base_size, None)
    base_time = fit.predict(base_size)
    if base_time > 0:
        fit = QuadraticFit(fit.a, fit.b, fit.c, r_squared, base_size, fit.predict(2 * base_size) / base_time)
    return fit


@dataclass
class BenchReport:
    rows: List[BenchRow]
    fit: Optional[QuadraticFit]


class BenchExperiment:
    """Times the reduction of one translated tree per seed. Generation and translation are not timed."""

    def __init__(self,
                 config: Wf2PtConfig,
                 generator_config: GeneratorConfig,
                 variant: TranslationVariant = TranslationVariant.MINIMAL,
                 clock: Callable[[], float] = time.perf_counter) -> None:
        self.config = config
        self.generator_config = generator_config
        self.variant = variant
        self.clock = clock

    def run_instance(self, seed: int) -> BenchRow:
        tree = TreeGenerator(self.generator_config.with_seed(seed)).sample()
        wfnet = tree_to_wfnet(tree, self.variant)
        reducer = WorkflowNetReducer(self.config.strict_and, self.config.detector_order)
        started_at = self.clock()
        outcome = reducer.reduce(wfnet)
        micros = int(round((self.clock() - started_at) * 1_000_000))
        if not isinstance(outcome, ReducedTree):
            result = OUTCOME_IRREDUCIBLE
        elif outcome.tree == canonicalize(tree):
            result = OUTCOME_MATCH
        else:
            result = OUTCOME_MISMATCH
        return BenchRow(wfnet.size(), micros, result)

    def run(self, count: int) -> BenchReport:
        first_seed = self.generator_config.seed
        rows = []
        # instances are timed one at a time
        for i, seed in enumerate(range(first_seed, first_seed + count), start=1):
            rows.append(self.run_instance(seed))
            if i % 500 == 0:
                logger.info(f"benchmarked {i} of {count} nets")
        return BenchReport(rows, fit_quadratic(rows))
