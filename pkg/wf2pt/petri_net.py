# SPDX-License-Identifier: MIT
# Labelled Petri nets, workflow nets, firing semantics and state-space based soundness checking.

import logging
from collections import Counter, deque
from typing import AbstractSet, Callable, Deque, Dict, FrozenSet, Generic, Iterable, Iterator, List, Mapping, \
    MutableMapping, Optional, Sequence, Set, Tuple, TypeVar, Union

from dataclasses import dataclass

logger = logging.getLogger(__name__)

PlaceId = str
TransitionId = str
NodeId = Union[PlaceId, TransitionId]
Arc = Tuple[NodeId, NodeId]
Trace = Tuple[str, ...]

SILENT_TOKEN = "tau"

L = TypeVar("L")


class UnknownNodeError(ValueError):
    pass


class FiringNotEnabledError(ValueError):
    pass


class ResultSetCapExceededError(RuntimeError):
    pass


@dataclass(frozen=True)
class Activity:
    name: str

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("activity name must not be empty")
        if self.name == SILENT_TOKEN:
            raise ValueError(f"activity name must not be the reserved silent token '{SILENT_TOKEN}'")

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Silent:

    def __str__(self) -> str:
        return SILENT_TOKEN


SILENT = Silent()

Label = Union[Activity, Silent]


class LabeledNet(Generic[L]):
    """
    Immutable labelled Petri net N = (P, T, F, l), generic over the label domain.
    With L = Label this is an ordinary labelled net; with L = ProcessTree it is a PTree-net.
    Iteration over places and transitions follows insertion order.
    """

    __slots__ = ["places", "transitions", "arcs", "labeling", "_pre", "_post", "_index"]

    def __init__(self,
                 places: Iterable[PlaceId],
                 transitions: Iterable[TransitionId],
                 arcs: Iterable[Arc],
                 labeling: Mapping[TransitionId, L]) -> None:
        self.places: Tuple[PlaceId, ...] = tuple(places)
        self.transitions: Tuple[TransitionId, ...] = tuple(transitions)

        self._index: Dict[NodeId, int] = {}
        for node in self.places + self.transitions:
            if node in self._index:
                raise ValueError(f"duplicate node id: {node}")
            self._index[node] = len(self._index)

        self._pre: Dict[NodeId, Dict[NodeId, None]] = {node: {} for node in self._index}
        self._post: Dict[NodeId, Dict[NodeId, None]] = {node: {} for node in self._index}
        arc_list: List[Arc] = []
        for source, target in arcs:
            for node in (source, target):
                if node not in self._index:
                    raise UnknownNodeError(f"arc ({source}, {target}) references unknown node {node}")
            if self.is_place(source) == self.is_place(target):
                raise ValueError(f"arc ({source}, {target}) connects two nodes of the same kind")
            if target in self._post[source]:
                raise ValueError(f"duplicate arc ({source}, {target})")
            self._post[source][target] = None
            self._pre[target][source] = None
            arc_list.append((source, target))
        self.arcs: Tuple[Arc, ...] = tuple(arc_list)

        missing = [t for t in self.transitions if t not in labeling]
        if missing:
            raise ValueError(f"transitions without label: {missing}")
        self.labeling: Mapping[TransitionId, L] = {t: labeling[t] for t in self.transitions}

    def is_place(self, node: NodeId) -> bool:
        self._check(node)
        return self._index[node] < len(self.places)

    def is_transition(self, node: NodeId) -> bool:
        return not self.is_place(node)

    def __contains__(self, node: object) -> bool:
        return node in self._index

    def label(self, transition: TransitionId) -> L:
        if transition not in self.labeling:
            raise UnknownNodeError(f"unknown transition: {transition}")
        return self.labeling[transition]

    def preset(self, node: NodeId) -> FrozenSet[NodeId]:
        self._check(node)
        return frozenset(self._pre[node])

    def postset(self, node: NodeId) -> FrozenSet[NodeId]:
        self._check(node)
        return frozenset(self._post[node])

    def ordered_preset(self, node: NodeId) -> Tuple[NodeId, ...]:
        self._check(node)
        return tuple(self._pre[node])

    def ordered_postset(self, node: NodeId) -> Tuple[NodeId, ...]:
        self._check(node)
        return tuple(self._post[node])

    def order_key(self, node: NodeId) -> int:
        self._check(node)
        return self._index[node]

    def ordered(self, nodes: Iterable[NodeId]) -> List[NodeId]:
        return sorted(nodes, key=self.order_key)

    def size(self) -> int:
        return len(self.places) + len(self.transitions)

    def relabel(self, relabel_fn: Callable[[L], object]) -> "LabeledNet":
        return LabeledNet(self.places, self.transitions, self.arcs,
                          {t: relabel_fn(label) for t, label in self.labeling.items()})

    def structurally_equal(self, other: "LabeledNet") -> bool:
        return (set(self.places) == set(other.places)
                and set(self.transitions) == set(other.transitions)
                and set(self.arcs) == set(other.arcs)
                and dict(self.labeling) == dict(other.labeling))

    def _check(self, node: NodeId) -> None:
        if node not in self._index:
            raise UnknownNodeError(f"unknown node: {node}")

    def __repr__(self) -> str:
        return f"LabeledNet(places={len(self.places)}, transitions={len(self.transitions)}, arcs={len(self.arcs)})"


def preset(net: LabeledNet, node: NodeId) -> FrozenSet[NodeId]:
    return net.preset(node)


def postset(net: LabeledNet, node: NodeId) -> FrozenSet[NodeId]:
    return net.postset(node)


def preset_of_set(net: LabeledNet, nodes: Iterable[NodeId]) -> FrozenSet[NodeId]:
    result: Set[NodeId] = set()
    for node in nodes:
        result.update(net.preset(node))
    return frozenset(result)


def postset_of_set(net: LabeledNet, nodes: Iterable[NodeId]) -> FrozenSet[NodeId]:
    result: Set[NodeId] = set()
    for node in nodes:
        result.update(net.postset(node))
    return frozenset(result)


class Marking:
    """Multiset of places. Zero counts are never stored, so equality is multiset equality."""

    __slots__ = ["_counts", "_hash"]

    def __init__(self, tokens: Union[Mapping[PlaceId, int], Iterable[PlaceId]] = ()) -> None:
        counts: Mapping[PlaceId, int] = tokens if isinstance(tokens, Mapping) else Counter(tokens)
        for place, count in counts.items():
            if count < 0:
                raise ValueError(f"negative token count {count} on place {place}")
        self._counts: Dict[PlaceId, int] = {p: c for p, c in sorted(counts.items()) if c > 0}
        self._hash = hash(frozenset(self._counts.items()))

    def __getitem__(self, place: PlaceId) -> int:
        return self._counts.get(place, 0)

    def __iter__(self) -> Iterator[PlaceId]:
        return iter(self._counts)

    def __len__(self) -> int:
        return len(self._counts)

    def items(self) -> Iterable[Tuple[PlaceId, int]]:
        return self._counts.items()

    def total(self) -> int:
        return sum(self._counts.values())

    def max_count(self) -> Tuple[Optional[PlaceId], int]:
        place, count = None, 0
        for p, c in self._counts.items():
            if c > count:
                place, count = p, c
        return place, count

    def is_safe(self) -> bool:
        return all(c <= 1 for c in self._counts.values())

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Marking) and self._counts == other._counts

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        parts = [p if c == 1 else f"{p}^{c}" for p, c in self._counts.items()]
        return f"[{', '.join(parts)}]"


def enabled(net: LabeledNet, marking: Marking) -> FrozenSet[TransitionId]:
    return frozenset(t for t in net.transitions if _is_enabled(net, marking, t))


def ordered_enabled(net: LabeledNet, marking: Marking) -> List[TransitionId]:
    return [t for t in net.transitions if _is_enabled(net, marking, t)]


def _is_enabled(net: LabeledNet, marking: Marking, transition: TransitionId) -> bool:
    return all(marking[p] >= 1 for p in net.ordered_preset(transition))


def fire(net: LabeledNet, marking: Marking, transition: TransitionId) -> Marking:
    if not net.is_transition(transition):
        raise UnknownNodeError(f"not a transition: {transition}")
    if not _is_enabled(net, marking, transition):
        raise FiringNotEnabledError(f"transition {transition} is not enabled at {marking}")
    counts: MutableMapping[PlaceId, int] = dict(marking.items())
    for place in net.ordered_preset(transition):
        counts[place] -= 1
    for place in net.ordered_postset(transition):
        counts[place] = counts.get(place, 0) + 1
    return Marking(counts)


@dataclass(frozen=True)
class StateSpaceCaps:
    max_states: int = 1_000_000
    max_token_per_place: int = 8

    def __post_init__(self) -> None:
        if self.max_states < 1 or self.max_token_per_place < 1:
            raise ValueError(f"state space caps must be positive: {self}")


@dataclass(frozen=True)
class StateSpaceExhausted:
    reason: str
    state_count: int
    place: Optional[PlaceId] = None

    def __str__(self) -> str:
        if self.place is not None:
            return f"state space exhausted: {self.reason} exceeded on place {self.place} " \
                   f"after {self.state_count} states"
        return f"state space exhausted: {self.reason} exceeded after {self.state_count} states"


class StateSpaceExhaustedError(RuntimeError):
    def __init__(self, report: StateSpaceExhausted) -> None:
        super().__init__(str(report))
        self.report = report


class ReachabilityGraph:
    """Breadth-first reachability graph. Markings are listed in discovery order."""

    def __init__(self, initial: Marking) -> None:
        self.initial = initial
        self.markings: List[Marking] = [initial]
        self.edges: List[Tuple[Marking, TransitionId, Marking]] = []
        self.exhaustion: Optional[StateSpaceExhausted] = None
        self.unsafe_marking: Optional[Marking] = None
        self._successors: Dict[Marking, List[Tuple[TransitionId, Marking]]] = {initial: []}

    @property
    def complete(self) -> bool:
        return self.exhaustion is None and self.unsafe_marking is None

    def __contains__(self, marking: object) -> bool:
        return marking in self._successors

    def successors(self, marking: Marking) -> Sequence[Tuple[TransitionId, Marking]]:
        return self._successors.get(marking, [])

    def fired_transitions(self) -> Set[TransitionId]:
        return {t for _, t, _ in self.edges}

    def can_reach(self, target: Marking) -> Set[Marking]:
        """Markings from which target is reachable, by backward search over the edges."""
        if target not in self._successors:
            return set()
        predecessors: Dict[Marking, List[Marking]] = {}
        for source, _, dest in self.edges:
            predecessors.setdefault(dest, []).append(source)
        reached = {target}
        queue: Deque[Marking] = deque([target])
        while queue:
            marking = queue.popleft()
            for pred in predecessors.get(marking, []):
                if pred not in reached:
                    reached.add(pred)
                    queue.append(pred)
        return reached

    def _add(self, source: Marking, transition: TransitionId, dest: Marking) -> bool:
        self.edges.append((source, transition, dest))
        self._successors[source].append((transition, dest))
        if dest in self._successors:
            return False
        self._successors[dest] = []
        self.markings.append(dest)
        return True


def explore_state_space(net: LabeledNet,
                        initial: Marking,
                        caps: StateSpaceCaps = StateSpaceCaps(),
                        stop_on_unsafe: bool = False) -> ReachabilityGraph:
    """
    Explore the markings reachable from initial, breadth first.
    The returned graph is incomplete when a cap was hit (see ReachabilityGraph.exhaustion),
    or, with stop_on_unsafe, when a marking with more than one token in a place was found.
    """
    graph = ReachabilityGraph(initial)
    queue: Deque[Marking] = deque([initial])
    while queue:
        marking = queue.popleft()
        for transition in ordered_enabled(net, marking):
            successor = fire(net, marking, transition)
            is_new = graph._add(marking, transition, successor)
            if not is_new:
                continue
            place, count = successor.max_count()
            if stop_on_unsafe and count > 1:
                graph.unsafe_marking = successor
                return graph
            if count > caps.max_token_per_place:
                graph.exhaustion = StateSpaceExhausted("max_token_per_place", len(graph.markings), place)
                return graph
            if len(graph.markings) > caps.max_states:
                graph.exhaustion = StateSpaceExhausted("max_states", len(graph.markings))
                return graph
            queue.append(successor)
    return graph


class WorkflowNet(Generic[L]):
    """A labelled net with designated source and sink places. Use validate_workflow_net to check Def. 1."""

    __slots__ = ["net", "source", "sink"]

    def __init__(self, net: LabeledNet[L], source: PlaceId, sink: PlaceId) -> None:
        for place in (source, sink):
            if place not in net or not net.is_place(place):
                raise UnknownNodeError(f"not a place of the net: {place}")
        if source == sink:
            raise ValueError("source and sink must be distinct places")
        self.net = net
        self.source = source
        self.sink = sink

    @property
    def initial_marking(self) -> Marking:
        return Marking([self.source])

    @property
    def final_marking(self) -> Marking:
        return Marking([self.sink])

    def size(self) -> int:
        return self.net.size()

    def with_net(self, net: LabeledNet) -> "WorkflowNet":
        return WorkflowNet(net, self.source, self.sink)

    def __repr__(self) -> str:
        return f"WorkflowNet({self.net!r}, source={self.source}, sink={self.sink})"


@dataclass(frozen=True)
class WorkflowNetIssue:
    item: int
    message: str
    nodes: Tuple[NodeId, ...] = ()

    def __str__(self) -> str:
        suffix = f": {', '.join(self.nodes)}" if self.nodes else ""
        return f"[{self.item}] {self.message}{suffix}"


@dataclass(frozen=True)
class WorkflowNetValidation:
    issues: Tuple[WorkflowNetIssue, ...]

    @property
    def valid(self) -> bool:
        return not self.issues

    def __str__(self) -> str:
        if self.valid:
            return "valid workflow net"
        return "invalid workflow net: " + "; ".join(str(i) for i in self.issues)


class NotAWorkflowNetError(ValueError):
    def __init__(self, message: str, issues: Sequence[WorkflowNetIssue] = ()) -> None:
        super().__init__(message)
        self.issues = tuple(issues)


def boundary_places(net: LabeledNet) -> Tuple[List[PlaceId], List[PlaceId]]:
    """Places with an empty pre-set and places with an empty post-set, in net order."""
    sources = [p for p in net.places if not net.ordered_preset(p)]
    sinks = [p for p in net.places if not net.ordered_postset(p)]
    return sources, sinks


def _graph_search(start: NodeId, neighbours: Callable[[NodeId], Sequence[NodeId]]) -> Set[NodeId]:
    reached = {start}
    queue: Deque[NodeId] = deque([start])
    while queue:
        node = queue.popleft()
        for nxt in neighbours(node):
            if nxt not in reached:
                reached.add(nxt)
                queue.append(nxt)
    return reached


def validate_workflow_net(net: LabeledNet, source: PlaceId, sink: PlaceId) -> WorkflowNetValidation:
    issues: List[WorkflowNetIssue] = []
    for role, place in (("source", source), ("sink", sink)):
        if place not in net or not net.is_place(place):
            issues.append(WorkflowNetIssue(1 if role == "source" else 2, f"{role} is not a place of the net", (place,)))
    if issues:
        return WorkflowNetValidation(tuple(issues))

    sources, sinks = boundary_places(net)
    if net.ordered_preset(source):
        issues.append(WorkflowNetIssue(1, "source place has a non-empty pre-set", (source,)))
    other_sources = tuple(p for p in sources if p != source)
    if other_sources:
        issues.append(WorkflowNetIssue(1, "source place is not unique, other places with empty pre-set",
                                       other_sources))
    if net.ordered_postset(sink):
        issues.append(WorkflowNetIssue(2, "sink place has a non-empty post-set", (sink,)))
    other_sinks = tuple(p for p in sinks if p != sink)
    if other_sinks:
        issues.append(WorkflowNetIssue(2, "sink place is not unique, other places with empty post-set",
                                       other_sinks))

    forward = _graph_search(source, net.ordered_postset)
    backward = _graph_search(sink, net.ordered_preset)
    off_path = tuple(n for n in net.places + net.transitions if n not in forward or n not in backward)
    if off_path:
        issues.append(WorkflowNetIssue(3, "nodes not on a path from source to sink", off_path))
    return WorkflowNetValidation(tuple(issues))


def validate(wfnet: WorkflowNet) -> WorkflowNetValidation:
    return validate_workflow_net(wfnet.net, wfnet.source, wfnet.sink)


def require_workflow_net(wfnet: WorkflowNet) -> None:
    validation = validate(wfnet)
    if not validation.valid:
        raise NotAWorkflowNetError(str(validation), validation.issues)


@dataclass(frozen=True)
class NotSafe:
    marking: Marking

    def __str__(self) -> str:
        return f"not safe: reachable marking {self.marking}"


@dataclass(frozen=True)
class CannotComplete:
    marking: Marking

    def __str__(self) -> str:
        return f"cannot complete: final marking unreachable from {self.marking}"


@dataclass(frozen=True)
class DeadTransition:
    transition: TransitionId

    def __str__(self) -> str:
        return f"dead transition: {self.transition}"


Violation = Union[NotSafe, CannotComplete, DeadTransition, StateSpaceExhausted]


@dataclass(frozen=True)
class SoundnessVerdict:
    sound: bool
    violation: Optional[Violation] = None

    def __post_init__(self) -> None:
        if self.sound and self.violation is not None:
            raise ValueError("a sound verdict carries no violation")

    @property
    def inconclusive(self) -> bool:
        return isinstance(self.violation, StateSpaceExhausted)

    def __str__(self) -> str:
        if self.sound:
            return "sound"
        if self.inconclusive:
            return f"inconclusive ({self.violation})"
        return f"unsound ({self.violation})"


def check_soundness(wfnet: WorkflowNet, caps: StateSpaceCaps = StateSpaceCaps()) -> SoundnessVerdict:
    net = wfnet.net
    graph = explore_state_space(net, wfnet.initial_marking, caps, stop_on_unsafe=True)
    if graph.unsafe_marking is not None:
        return SoundnessVerdict(False, NotSafe(graph.unsafe_marking))
    if graph.exhaustion is not None:
        logger.warning(f"soundness check inconclusive: {graph.exhaustion}")
        return SoundnessVerdict(False, graph.exhaustion)

    completing = graph.can_reach(wfnet.final_marking)
    for marking in graph.markings:
        if marking not in completing:
            return SoundnessVerdict(False, CannotComplete(marking))

    fired = graph.fired_transitions()
    for transition in net.transitions:
        if transition not in fired:
            return SoundnessVerdict(False, DeadTransition(transition))
    return SoundnessVerdict(True)


def enumerate_net_language(wfnet: WorkflowNet,
                           max_visible_length: int,
                           caps: StateSpaceCaps = StateSpaceCaps(),
                           trace_cap: int = 200_000) -> FrozenSet[Trace]:
    """
    Visible traces of complete firing sequences from [source] to [sink] with at most
    max_visible_length visible labels. Silent labels are projected away; states are
    (marking, visible prefix) pairs, so silent cycles terminate.
    """
    if max_visible_length < 0:
        raise ValueError("max_visible_length must be non-negative")
    net = wfnet.net
    final = wfnet.final_marking
    start = (wfnet.initial_marking, ())
    seen: Set[Tuple[Marking, Trace]] = {start}
    queue: Deque[Tuple[Marking, Trace]] = deque([start])
    traces: Set[Trace] = set()
    while queue:
        marking, prefix = queue.popleft()
        if marking == final:
            traces.add(prefix)
            if len(traces) > trace_cap:
                raise ResultSetCapExceededError(f"more than {trace_cap} traces of length <= {max_visible_length}")
        for transition in ordered_enabled(net, marking):
            label = net.label(transition)
            if isinstance(label, Activity):
                if len(prefix) == max_visible_length:
                    continue
                trace = prefix + (label.name,)
            else:
                trace = prefix
            successor = fire(net, marking, transition)
            state = (successor, trace)
            if state in seen:
                continue
            place, count = successor.max_count()
            if count > caps.max_token_per_place:
                raise StateSpaceExhaustedError(StateSpaceExhausted("max_token_per_place", len(seen), place))
            seen.add(state)
            if len(seen) > caps.max_states:
                raise StateSpaceExhaustedError(StateSpaceExhausted("max_states", len(seen)))
            queue.append(state)
    return frozenset(traces)


def sorted_traces(traces: AbstractSet[Trace]) -> List[Trace]:
    return sorted(traces)


def format_trace(trace: Trace) -> str:
    return "<" + ",".join(trace) + ">"
