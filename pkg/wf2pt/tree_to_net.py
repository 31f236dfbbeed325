# SPDX-License-Identifier: MIT
# Translation of process trees into workflow nets, boundary stripping and PTree-net unfolding.

import enum
import logging
from dataclasses import dataclass
from typing import Dict, List, MutableMapping, Tuple

from cachetools import LRUCache, cachedmethod

from wf2pt.petri_net import SILENT, Arc, Label, LabeledNet, PlaceId, TransitionId, WorkflowNet
from wf2pt.process_tree import Leaf, Operator, ProcessTree

logger = logging.getLogger(__name__)

SOURCE_PLACE = "p_i"
SINK_PLACE = "p_o"


class TranslationVariant(enum.Enum):
    MINIMAL = "minimal"
    TAU_BOUNDED = "tau-bounded"

    @classmethod
    def parse(cls, name: str) -> "TranslationVariant":
        for variant in cls:
            if variant.value == name:
                return variant
        raise ValueError(f"unknown translation variant: {name}, must be one of {[v.value for v in cls]}")


@dataclass(frozen=True)
class NetFragment:
    """A boundary-stripped WF-net: the transitions consuming from the removed source and producing into the sink."""
    net: LabeledNet[Label]
    entries: Tuple[TransitionId, ...]
    exits: Tuple[TransitionId, ...]


class _NetBuilder:

    def __init__(self, variant: TranslationVariant) -> None:
        self.variant = variant
        self.places: List[PlaceId] = []
        self.transitions: List[TransitionId] = []
        self.arcs: List[Arc] = []
        self.labels: Dict[TransitionId, Label] = {}

    def place(self, place: PlaceId) -> PlaceId:
        self.places.append(place)
        return place

    def transition(self, transition: TransitionId, label: Label, pre: List[PlaceId], post: List[PlaceId]) -> None:
        self.transitions.append(transition)
        self.labels[transition] = label
        self.arcs.extend((p, transition) for p in pre)
        self.arcs.extend((transition, p) for p in post)

    def build(self) -> LabeledNet[Label]:
        return LabeledNet(self.places, self.transitions, self.arcs, self.labels)

    def add(self, tree: ProcessTree, entry: PlaceId, exit_: PlaceId, path: str) -> None:
        if isinstance(tree, Leaf):
            self.transition(f"t{path}", tree.label, [entry], [exit_])
            return

        op = tree.operator
        if self.variant is TranslationVariant.TAU_BOUNDED and op in (Operator.SEQ, Operator.XOR):
            inner_entry = self.place(f"p{path}:start")
            inner_exit = self.place(f"p{path}:end")
            self.transition(f"t{path}:start", SILENT, [entry], [inner_entry])
            self.transition(f"t{path}:end", SILENT, [inner_exit], [exit_])
            entry, exit_ = inner_entry, inner_exit

        children = tree.children
        if op is Operator.SEQ:
            boundaries = [entry]
            for i in range(1, len(children)):
                boundaries.append(self.place(f"p{path}:{i}"))
            boundaries.append(exit_)
            for i, child in enumerate(children):
                self.add(child, boundaries[i], boundaries[i + 1], f"{path}.{i}")
        elif op is Operator.XOR:
            for i, child in enumerate(children):
                self.add(child, entry, exit_, f"{path}.{i}")
        elif op is Operator.AND:
            branch_entries = [self.place(f"p{path}.{i}:in") for i in range(len(children))]
            branch_exits = [self.place(f"p{path}.{i}:out") for i in range(len(children))]
            self.transition(f"t{path}:split", SILENT, [entry], branch_entries)
            for i, child in enumerate(children):
                self.add(child, branch_entries[i], branch_exits[i], f"{path}.{i}")
            self.transition(f"t{path}:join", SILENT, branch_exits, [exit_])
        else:
            # the entry place is fresh so a loop at the root keeps the source place without producers
            do_place = self.place(f"p{path}:do")
            redo_place = self.place(f"p{path}:redo")
            self.transition(f"t{path}:enter", SILENT, [entry], [do_place])
            self.add(children[0], do_place, redo_place, f"{path}.0")
            self.add(children[1], redo_place, do_place, f"{path}.1")
            self.transition(f"t{path}:leave", SILENT, [redo_place], [exit_])


def tree_to_wfnet(tree: ProcessTree, variant: TranslationVariant = TranslationVariant.MINIMAL) -> WorkflowNet[Label]:
    """
    Translate a process tree into a sound WF-net with the same language.
    MINIMAL adds silent transitions only for parallel split/join and loop enter/leave;
    TAU_BOUNDED also wraps every sequence and choice block in silent start/end transitions.
    """
    builder = _NetBuilder(variant)
    builder.place(SOURCE_PLACE)
    builder.place(SINK_PLACE)
    builder.add(tree, SOURCE_PLACE, SINK_PLACE, "0")
    net = builder.build()
    logger.debug(f"translated {tree} into a {variant.value} net with {len(net.places)} places "
                 f"and {len(net.transitions)} transitions")
    return WorkflowNet(net, SOURCE_PLACE, SINK_PLACE)


def strip_boundary(wfnet: WorkflowNet[Label]) -> NetFragment:
    net = wfnet.net
    boundary = {wfnet.source, wfnet.sink}
    places = [p for p in net.places if p not in boundary]
    arcs = [(s, t) for s, t in net.arcs if s not in boundary and t not in boundary]
    stripped = LabeledNet(places, net.transitions, arcs, net.labeling)
    return NetFragment(stripped, net.ordered_postset(wfnet.source), net.ordered_preset(wfnet.sink))


class Unfolder:
    """Replaces every tree-labelled transition of a PTree-net by the fragment of its label."""

    def __init__(self, variant: TranslationVariant = TranslationVariant.MINIMAL, cache_capacity: int = 1024) -> None:
        self.variant = variant
        self.cache: MutableMapping = LRUCache(cache_capacity)

    @cachedmethod(lambda self: self.cache)
    def fragment(self, tree: ProcessTree) -> NetFragment:
        return strip_boundary(tree_to_wfnet(tree, self.variant))

    def unfold(self, ptree_net: LabeledNet[ProcessTree]) -> LabeledNet[Label]:
        places: List[PlaceId] = list(ptree_net.places)
        transitions: List[TransitionId] = []
        arcs: List[Arc] = []
        labels: Dict[TransitionId, Label] = {}

        for host in ptree_net.transitions:
            tree = ptree_net.label(host)
            pre, post = ptree_net.ordered_preset(host), ptree_net.ordered_postset(host)
            if isinstance(tree, Leaf):
                transitions.append(host)
                labels[host] = tree.label
                arcs.extend((p, host) for p in pre)
                arcs.extend((host, p) for p in post)
                continue

            fragment = self.fragment(tree)
            prefix = f"{host}/"
            places.extend(prefix + p for p in fragment.net.places)
            for t in fragment.net.transitions:
                transitions.append(prefix + t)
                labels[prefix + t] = fragment.net.label(t)
            arcs.extend((prefix + s, prefix + t) for s, t in fragment.net.arcs)
            for entry in fragment.entries:
                arcs.extend((p, prefix + entry) for p in pre)
            for exit_ in fragment.exits:
                arcs.extend((prefix + exit_, p) for p in post)

        return LabeledNet(places, transitions, arcs, labels)

    def unfold_workflow_net(self, wfnet: WorkflowNet[ProcessTree]) -> WorkflowNet[Label]:
        return WorkflowNet(self.unfold(wfnet.net), wfnet.source, wfnet.sink)


def unfold(ptree_net: LabeledNet[ProcessTree]) -> LabeledNet[Label]:
    return Unfolder().unfold(ptree_net)


def unfold_workflow_net(wfnet: WorkflowNet[ProcessTree]) -> WorkflowNet[Label]:
    return Unfolder().unfold_workflow_net(wfnet)
