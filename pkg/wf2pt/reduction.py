# SPDX-License-Identifier: MIT
# This file implements the reduction of workflow nets to process trees.
# Binary choice, sequence, parallel and loop patterns are detected on a net whose transitions
# carry process trees, and each match is replaced by a single transition labelled with the
# combined tree, until one transition between source and sink is left or nothing matches.

import logging
from collections import deque
from dataclasses import dataclass
from typing import Callable, Deque, Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple, Union

from wf2pt.petri_net import Arc, Label, LabeledNet, Marking, PlaceId, TransitionId, WorkflowNet, postset_of_set, \
    preset_of_set, require_workflow_net
from wf2pt.process_tree import Leaf, Operator, ProcessTree, canonicalize, operator_tree
from wf2pt.profiler import NullProfiler, Profiler

logger = logging.getLogger(__name__)

DEFAULT_DETECTOR_ORDER: Tuple[Operator, ...] = (Operator.XOR, Operator.SEQ, Operator.AND, Operator.LOOP)

PTreeNet = LabeledNet[ProcessTree]
PTreeWorkflowNet = WorkflowNet[ProcessTree]


class StaleMatchError(ValueError):
    pass


@dataclass(frozen=True)
class PatternMatch:
    """
    A binary pattern found on a PTree-net. Members are ordered: for a sequence the first member
    precedes the second, for a loop the first member is the do-part and the second the redo-part.
    The member pre- and post-sets are recorded so that a match can be checked against the net it is applied to.
    """
    kind: Operator
    members: Tuple[TransitionId, ...]
    fragment_places: FrozenSet[PlaceId]
    initial_marking: Marking
    final_marking: Marking
    member_presets: Tuple[FrozenSet[PlaceId], ...]
    member_postsets: Tuple[FrozenSet[PlaceId], ...]

    def __str__(self) -> str:
        return f"{self.kind.symbol}({','.join(self.members)})"


@dataclass(frozen=True)
class LoggedStep:
    """A reduction step as written to and read from a step log."""
    kind: Operator
    members: Tuple[TransitionId, ...]
    new_transition: TransitionId
    new_label: ProcessTree


@dataclass(frozen=True)
class ReductionStep:
    match: PatternMatch
    new_transition: TransitionId
    new_label: ProcessTree
    removed_places: FrozenSet[PlaceId]

    @property
    def kind(self) -> Operator:
        return self.match.kind

    @property
    def members(self) -> Tuple[TransitionId, ...]:
        return self.match.members

    def logged(self) -> LoggedStep:
        return LoggedStep(self.kind, self.members, self.new_transition, self.new_label)

    def __str__(self) -> str:
        return f"{self.kind.symbol} members=[{','.join(self.members)}] new={self.new_transition} label={self.new_label}"


StepRecord = Union[ReductionStep, LoggedStep]


@dataclass(frozen=True)
class ReducedTree:
    """The net was reduced to one transition; tree is its label in canonical form."""
    tree: ProcessTree
    raw_tree: ProcessTree
    steps: Tuple[ReductionStep, ...]

    @property
    def success(self) -> bool:
        return True


@dataclass(frozen=True)
class Irreducible:
    residual: PTreeWorkflowNet
    steps: Tuple[ReductionStep, ...]

    @property
    def success(self) -> bool:
        return False


ReductionOutcome = Union[ReducedTree, Irreducible]


def lift(wfnet: WorkflowNet[Label]) -> PTreeWorkflowNet:
    """Label every transition with the single-leaf tree of its label."""
    return wfnet.with_net(wfnet.net.relabel(Leaf))


class _PatternContext:
    """Pre/post-set access on one net, with source and sink excluded from intermediate places."""

    def __init__(self, wfnet: PTreeWorkflowNet) -> None:
        self.wfnet = wfnet
        self.net = wfnet.net
        self.boundary = frozenset((wfnet.source, wfnet.sink))

    def pre(self, t: TransitionId) -> FrozenSet[PlaceId]:
        return self.net.preset(t)

    def post(self, t: TransitionId) -> FrozenSet[PlaceId]:
        return self.net.postset(t)

    def consumers(self, places: Iterable[PlaceId]) -> List[TransitionId]:
        return self.net.ordered(postset_of_set(self.net, places))

    def later(self, t1: TransitionId, candidates: Iterable[TransitionId]) -> List[TransitionId]:
        key = self.net.order_key(t1)
        return [t for t in self.net.ordered(set(candidates)) if self.net.order_key(t) > key]


def _is_xor(ctx: _PatternContext, t1: TransitionId, t2: TransitionId) -> bool:
    return t1 != t2 and ctx.pre(t1) == ctx.pre(t2) and ctx.post(t1) == ctx.post(t2) and ctx.pre(t1) != ctx.post(t1)


def _is_seq(ctx: _PatternContext, t1: TransitionId, t2: TransitionId) -> bool:
    middle = ctx.post(t1)
    if t1 == t2 or not middle or middle != ctx.pre(t2):
        return False
    for p in middle:
        if p in ctx.boundary:
            return False
        if ctx.net.preset(p) != {t1} or ctx.net.postset(p) != {t2}:
            return False
    return not middle & ctx.post(t2)


def _all_equal(sets: Iterable[FrozenSet]) -> bool:
    first: Optional[FrozenSet] = None
    for s in sets:
        if first is None:
            first = s
        elif s != first:
            return False
    return True


def _is_and(ctx: _PatternContext, t1: TransitionId, t2: TransitionId, strict: bool) -> bool:
    if t1 == t2:
        return False
    net = ctx.net
    members = frozenset((t1, t2))
    pre1, pre2, post1, post2 = ctx.pre(t1), ctx.pre(t2), ctx.post(t1), ctx.post(t2)
    if pre1 & pre2 or post1 & post2:
        return False
    for t, pre, post in ((t1, pre1, post1), (t2, pre2, post2)):
        if any(net.postset(p) != {t} for p in pre):
            return False
        if any(net.preset(p) != {t} for p in post):
            return False
    pre_places = pre1 | pre2
    post_places = post1 | post2
    if pre_places & ctx.boundary or post_places & ctx.boundary:
        return False
    if any(net.preset(p) & members for p in pre_places):
        return False
    if not _all_equal(net.preset(p) for p in pre_places):
        return False
    if any(net.postset(p) & members for p in post_places):
        return False
    if not _all_equal(net.postset(p) for p in post_places):
        return False
    if strict:
        producers = preset_of_set(net, pre_places)
        if not _all_equal(net.preset(u) for u in producers):
            return False
        consumers = postset_of_set(net, post_places)
        if not _all_equal(net.postset(v) for v in consumers):
            return False
    return True


def _is_loop_shape(ctx: _PatternContext, t1: TransitionId, t2: TransitionId) -> bool:
    pre1, pre2, post1, post2 = ctx.pre(t1), ctx.pre(t2), ctx.post(t1), ctx.post(t2)
    return t1 != t2 and pre1 == post2 and post1 == pre2 and not pre1 & pre2 and not post1 & post2


def _loop_body_is_closed(ctx: _PatternContext, do: TransitionId) -> bool:
    # the places around the do-part may only be connected to the do-part on the inner side
    net = ctx.net
    if any(net.postset(p) != {do} for p in ctx.pre(do)):
        return False
    return all(net.preset(p) == {do} for p in ctx.post(do))


def _reachable_without(ctx: _PatternContext, excluded: FrozenSet[TransitionId]) -> Set[PlaceId]:
    net = ctx.net
    reached: Set[PlaceId] = {ctx.wfnet.source}
    queue: Deque[PlaceId] = deque([ctx.wfnet.source])
    while queue:
        place = queue.popleft()
        for t in net.ordered_postset(place):
            if t in excluded:
                continue
            for p in net.ordered_postset(t):
                if p not in reached:
                    reached.add(p)
                    queue.append(p)
    return reached


def loop_orientation(ctx: _PatternContext, t1: TransitionId, t2: TransitionId) -> Tuple[TransitionId, TransitionId]:
    """
    The do-part is the member whose pre-set is marked from outside the pair: its pre-set meets the places
    reachable from the source without firing either member. Ties keep the net order.
    """
    reached = _reachable_without(ctx, frozenset((t1, t2)))
    first_entered = bool(ctx.pre(t1) & reached)
    second_entered = bool(ctx.pre(t2) & reached)
    if second_entered and not first_entered:
        return t2, t1
    return t1, t2


def _make_match(ctx: _PatternContext, kind: Operator, members: Tuple[TransitionId, ...]) -> PatternMatch:
    presets = tuple(ctx.pre(t) for t in members)
    postsets = tuple(ctx.post(t) for t in members)
    fragment_places = frozenset().union(*presets, *postsets)
    if kind in (Operator.SEQ, Operator.LOOP):
        initial = presets[0]
        final = postsets[-1] if kind is Operator.SEQ else postsets[0]
    else:
        initial = frozenset().union(*presets)
        final = frozenset().union(*postsets)
    return PatternMatch(kind, members, fragment_places, Marking(initial), Marking(final), presets, postsets)


def match_pair(wfnet: PTreeWorkflowNet,
               kind: Operator,
               members: Sequence[TransitionId],
               strict_and: bool = False) -> Optional[PatternMatch]:
    """Checks whether the ordered pair of transitions forms a pattern of the given kind."""
    if len(members) != 2 or any(t not in wfnet.net or not wfnet.net.is_transition(t) for t in members):
        return None
    ctx = _PatternContext(wfnet)
    t1, t2 = members
    if kind is Operator.XOR:
        found = _is_xor(ctx, t1, t2)
    elif kind is Operator.SEQ:
        found = _is_seq(ctx, t1, t2)
    elif kind is Operator.AND:
        found = _is_and(ctx, t1, t2, strict_and)
    else:
        found = _is_loop_shape(ctx, t1, t2) and loop_orientation(ctx, t1, t2) == (t1, t2) \
                and _loop_body_is_closed(ctx, t1)
    return _make_match(ctx, kind, (t1, t2)) if found else None


def find_xor_pattern(wfnet: PTreeWorkflowNet) -> Optional[PatternMatch]:
    ctx = _PatternContext(wfnet)
    for t1 in ctx.net.transitions:
        # members of a choice share their pre-set, so the second one consumes from the same places
        for t2 in ctx.later(t1, ctx.consumers(ctx.pre(t1))):
            if _is_xor(ctx, t1, t2):
                return _make_match(ctx, Operator.XOR, (t1, t2))
    return None


def find_seq_pattern(wfnet: PTreeWorkflowNet) -> Optional[PatternMatch]:
    ctx = _PatternContext(wfnet)
    for t1 in ctx.net.transitions:
        for t2 in ctx.consumers(ctx.post(t1)):
            if _is_seq(ctx, t1, t2):
                return _make_match(ctx, Operator.SEQ, (t1, t2))
    return None


def find_and_pattern(wfnet: PTreeWorkflowNet, strict_and: bool = False) -> Optional[PatternMatch]:
    ctx = _PatternContext(wfnet)
    net = ctx.net
    for t1 in net.transitions:
        # parallel members are enabled by the same producers
        producers = preset_of_set(net, ctx.pre(t1))
        candidates = postset_of_set(net, postset_of_set(net, producers))
        for t2 in ctx.later(t1, candidates):
            if _is_and(ctx, t1, t2, strict_and):
                return _make_match(ctx, Operator.AND, (t1, t2))
    return None


def find_loop_pattern(wfnet: PTreeWorkflowNet) -> Optional[PatternMatch]:
    ctx = _PatternContext(wfnet)
    for t1 in ctx.net.transitions:
        for t2 in ctx.later(t1, ctx.consumers(ctx.post(t1))):
            if not _is_loop_shape(ctx, t1, t2):
                continue
            do, redo = loop_orientation(ctx, t1, t2)
            if _loop_body_is_closed(ctx, do):
                return _make_match(ctx, Operator.LOOP, (do, redo))
    return None


def find_pattern(wfnet: PTreeWorkflowNet,
                 detector_order: Sequence[Operator] = DEFAULT_DETECTOR_ORDER,
                 strict_and: bool = False) -> Optional[PatternMatch]:
    detectors: Dict[Operator, Callable[[PTreeWorkflowNet], Optional[PatternMatch]]] = {
        Operator.XOR: find_xor_pattern,
        Operator.SEQ: find_seq_pattern,
        Operator.AND: lambda n: find_and_pattern(n, strict_and),
        Operator.LOOP: find_loop_pattern,
    }
    for kind in detector_order:
        match = detectors[kind](wfnet)
        if match is not None:
            return match
    return None


def fresh_transition_id(net: LabeledNet, step_number: int) -> TransitionId:
    n = step_number
    while f"r{n}" in net:
        n += 1
    return f"r{n}"


def _check_not_stale(wfnet: PTreeWorkflowNet, match: PatternMatch) -> None:
    net = wfnet.net
    for t, pre, post in zip(match.members, match.member_presets, match.member_postsets):
        if t not in net or not net.is_transition(t):
            raise StaleMatchError(f"match {match} refers to transition {t} which is not in the net")
        if net.preset(t) != pre or net.postset(t) != post:
            raise StaleMatchError(f"match {match} is stale: transition {t} changed since detection")


def apply_reduction(wfnet: PTreeWorkflowNet,
                    match: PatternMatch,
                    new_transition: Optional[TransitionId] = None,
                    new_label: Optional[ProcessTree] = None) -> Tuple[PTreeWorkflowNet, ReductionStep]:
    """
    Replace the members of the match by one fresh transition labelled with the operator applied to the
    member labels in order. A sequence also removes its intermediate places.
    """
    _check_not_stale(wfnet, match)
    net = wfnet.net
    if new_transition is None:
        new_transition = fresh_transition_id(net, 1)
    elif new_transition in net and new_transition not in match.members:
        raise ValueError(f"transition id {new_transition} is already used in the net")
    if new_label is None:
        new_label = operator_tree(match.kind, [net.label(t) for t in match.members])

    first, last = match.members[0], match.members[-1]
    removed_places: FrozenSet[PlaceId] = frozenset()
    if match.kind is Operator.SEQ:
        removed_places = frozenset().union(*match.member_postsets[:-1])
        pre, post = net.ordered_preset(first), net.ordered_postset(last)
    elif match.kind is Operator.LOOP:
        pre, post = net.ordered_preset(first), net.ordered_postset(first)
    else:
        pre = tuple(net.ordered(preset_of_set(net, match.members)))
        post = tuple(net.ordered(postset_of_set(net, match.members)))

    members = set(match.members)
    places = [p for p in net.places if p not in removed_places]
    transitions = [t for t in net.transitions if t not in members] + [new_transition]
    arcs: List[Arc] = [(s, t) for s, t in net.arcs
                       if s not in members and t not in members and s not in removed_places
                       and t not in removed_places]
    arcs.extend((p, new_transition) for p in pre)
    arcs.extend((new_transition, p) for p in post)
    labels = {t: net.label(t) for t in transitions if t != new_transition}
    labels[new_transition] = new_label

    reduced = wfnet.with_net(LabeledNet(places, transitions, arcs, labels))
    return reduced, ReductionStep(match, new_transition, new_label, removed_places)


def replay_step(wfnet: PTreeWorkflowNet,
                step: StepRecord,
                strict_and: bool = False) -> Tuple[PTreeWorkflowNet, ReductionStep]:
    """
    Apply a recorded step. The members must form a pattern of the recorded kind on this net;
    the recorded transition id and label are used as they are.
    """
    match = match_pair(wfnet, step.kind, step.members, strict_and)
    if match is None:
        raise StaleMatchError(f"{step.kind.symbol}({','.join(step.members)}) is not a pattern of the net")
    return apply_reduction(wfnet, match, step.new_transition, step.new_label)


def is_reduced(wfnet: PTreeWorkflowNet) -> bool:
    """One transition left, connected to the source and the sink only."""
    net = wfnet.net
    if len(net.transitions) != 1:
        return False
    t = net.transitions[0]
    return set(net.arcs) == {(wfnet.source, t), (t, wfnet.sink)}


class WorkflowNetReducer:
    def __init__(self,
                 strict_and: bool = False,
                 detector_order: Sequence[Operator] = DEFAULT_DETECTOR_ORDER,
                 profiler: Profiler = NullProfiler()) -> None:
        if sorted(op.value for op in detector_order) != sorted(op.value for op in Operator):
            raise ValueError(f"detector order must list every operator once: {detector_order}")
        self.strict_and = strict_and
        self.detector_order = tuple(detector_order)
        self.profiler = profiler

    def reduce(self, wfnet: WorkflowNet[Label]) -> ReductionOutcome:
        require_workflow_net(wfnet)

        self.profiler.start_section("reduce")
        current = lift(wfnet)
        steps: List[ReductionStep] = []
        logger.debug(f"reducing net with {len(wfnet.net.places)} places and {len(wfnet.net.transitions)} transitions")
        while not is_reduced(current):
            with self.profiler.section("detect"):
                match = find_pattern(current, self.detector_order, self.strict_and)
            if match is None:
                break
            transition_count = len(current.net.transitions)
            with self.profiler.section("rewrite"):
                current, step = apply_reduction(current, match, fresh_transition_id(current.net, len(steps) + 1))
            assert len(current.net.transitions) == transition_count - 1
            steps.append(step)
            logger.debug(str(step))
        self.profiler.end_section("reduce")

        if is_reduced(current):
            raw_tree = current.net.label(current.net.transitions[0])
            tree = canonicalize(raw_tree)
            logger.debug(f"reduced to a process tree in {len(steps)} steps: {tree}")
            return ReducedTree(tree, raw_tree, tuple(steps))
        logger.debug(f"no pattern found after {len(steps)} steps, {len(current.net.transitions)} transitions remain")
        return Irreducible(current, tuple(steps))


def reduce_to_tree(wfnet: WorkflowNet[Label],
                   strict_and: bool = False,
                   detector_order: Sequence[Operator] = DEFAULT_DETECTOR_ORDER) -> ReductionOutcome:
    return WorkflowNetReducer(strict_and, detector_order).reduce(wfnet)


def describe_residual(outcome: Irreducible) -> str:
    """Summary of an irreducible net: counts, then each transition with its partial tree and connected places."""
    net = outcome.residual.net
    lines = [f"irreducible after {len(outcome.steps)} steps: "
             f"{len(net.places)} places, {len(net.transitions)} transitions"]
    for t in net.transitions:
        pre = ",".join(net.ordered_preset(t))
        post = ",".join(net.ordered_postset(t))
        lines.append(f"  {t}: [{pre}] -> [{post}] label={net.label(t)}")
    return "\n".join(lines)
