# SPDX-License-Identifier: MIT
# Bounded language comparison of workflow nets and process trees, and step-by-step
# verification of a reduction log.

import enum
import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Union

from wf2pt.petri_net import Label, ResultSetCapExceededError, StateSpaceCaps, StateSpaceExhaustedError, Trace, \
    WorkflowNet, check_soundness, enumerate_net_language, format_trace
from wf2pt.process_tree import DEFAULT_TRACE_CAP, Leaf, OperatorNode, ProcessTree, TraceSet, TreeLanguage
from wf2pt.reduction import StaleMatchError, StepRecord, lift, replay_step
from wf2pt.tree_to_net import Unfolder

logger = logging.getLogger(__name__)

Model = Union[WorkflowNet[Label], ProcessTree]


class LanguageStatus(enum.Enum):
    EQUAL = "equal"
    UNEQUAL = "unequal"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class LanguageVerdict:
    """
    Outcome of a bounded comparison. An unequal verdict carries the witness trace and names
    the side ("first" or "second") whose language contains it.
    """
    status: LanguageStatus
    witness: Optional[Trace] = None
    side: Optional[str] = None
    reason: str = ""

    @property
    def equal(self) -> bool:
        return self.status is LanguageStatus.EQUAL

    def __str__(self) -> str:
        if self.status is LanguageStatus.UNEQUAL and self.witness is not None:
            return f"unequal: {format_trace(self.witness)} only in the {self.side} language"
        if self.status is LanguageStatus.INCONCLUSIVE:
            return f"inconclusive: {self.reason}"
        return self.status.value


def language_of(model: Model,
                max_visible_length: int,
                caps: StateSpaceCaps = StateSpaceCaps(),
                trace_cap: int = DEFAULT_TRACE_CAP,
                tree_language: Optional[TreeLanguage] = None) -> TraceSet:
    if isinstance(model, (Leaf, OperatorNode)):
        tree_language = tree_language or TreeLanguage(trace_cap)
        return tree_language.language(model, max_visible_length)
    return enumerate_net_language(model, max_visible_length, caps, trace_cap)


def compare_languages(first: TraceSet, second: TraceSet) -> LanguageVerdict:
    difference = first ^ second
    if not difference:
        return LanguageVerdict(LanguageStatus.EQUAL)
    witness = min(difference, key=lambda trace: (len(trace), trace))
    return LanguageVerdict(LanguageStatus.UNEQUAL, witness, "first" if witness in first else "second")


def bounded_language_equal(first: Model,
                           second: Model,
                           max_visible_length: int,
                           caps: StateSpaceCaps = StateSpaceCaps(),
                           trace_cap: int = DEFAULT_TRACE_CAP) -> LanguageVerdict:
    """
    Compares the complete traces with at most max_visible_length activities of two nets or trees.
    Hitting a state or trace cap gives an inconclusive verdict, never equal or unequal.
    """
    if max_visible_length < 0:
        raise ValueError("max_visible_length must be non-negative")
    tree_language = TreeLanguage(trace_cap)
    try:
        first_traces = language_of(first, max_visible_length, caps, trace_cap, tree_language)
        second_traces = language_of(second, max_visible_length, caps, trace_cap, tree_language)
    except (StateSpaceExhaustedError, ResultSetCapExceededError) as e:
        logger.warning(f"language comparison inconclusive: {e}")
        return LanguageVerdict(LanguageStatus.INCONCLUSIVE, reason=str(e))
    return compare_languages(first_traces, second_traces)


class StepLogStatus(enum.Enum):
    VERIFIED = "verified"
    VIOLATION = "violation"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class StepLogVerdict:
    status: StepLogStatus
    step_index: Optional[int] = None
    reason: str = ""

    @property
    def verified(self) -> bool:
        return self.status is StepLogStatus.VERIFIED

    def __str__(self) -> str:
        if self.step_index is None:
            return f"{self.status.value}{': ' + self.reason if self.reason else ''}"
        return f"{self.status.value} at step {self.step_index + 1}: {self.reason}"


def verify_step_log(input_net: WorkflowNet[Label],
                    steps: Sequence[StepRecord],
                    max_visible_length: int = 6,
                    caps: StateSpaceCaps = StateSpaceCaps(),
                    trace_cap: int = DEFAULT_TRACE_CAP) -> StepLogVerdict:
    """
    Replays the steps on the input net. Around every step the unfolded nets before and after
    must have the same bounded language and the same soundness verdict.
    step_index in the verdict counts from 0.
    """
    unfolder = Unfolder()
    current = lift(input_net)
    try:
        before = unfolder.unfold_workflow_net(current)
        before_traces = enumerate_net_language(before, max_visible_length, caps, trace_cap)
        before_soundness = check_soundness(before, caps)
    except (StateSpaceExhaustedError, ResultSetCapExceededError) as e:
        return StepLogVerdict(StepLogStatus.INCONCLUSIVE, 0 if steps else None, str(e))

    for index, step in enumerate(steps):
        try:
            current, _ = replay_step(current, step)
        except (StaleMatchError, ValueError) as e:
            return StepLogVerdict(StepLogStatus.VIOLATION, index, str(e))

        try:
            after = unfolder.unfold_workflow_net(current)
            after_traces = enumerate_net_language(after, max_visible_length, caps, trace_cap)
            after_soundness = check_soundness(after, caps)
        except (StateSpaceExhaustedError, ResultSetCapExceededError) as e:
            logger.warning(f"step log verification inconclusive at step {index + 1}: {e}")
            return StepLogVerdict(StepLogStatus.INCONCLUSIVE, index, str(e))

        if before_soundness.inconclusive or after_soundness.inconclusive:
            return StepLogVerdict(StepLogStatus.INCONCLUSIVE, index, "soundness check hit the state cap")
        language = compare_languages(before_traces, after_traces)
        if not language.equal:
            side = "before" if language.side == "first" else "after"
            return StepLogVerdict(StepLogStatus.VIOLATION, index,
                                  f"language changed, {format_trace(language.witness or ())} only {side} the step")
        if before_soundness.sound != after_soundness.sound:
            return StepLogVerdict(StepLogStatus.VIOLATION, index,
                                  f"soundness changed from {before_soundness} to {after_soundness}")
        logger.debug(f"step {index + 1} verified")
        before_traces, before_soundness = after_traces, after_soundness

    return StepLogVerdict(StepLogStatus.VERIFIED)
