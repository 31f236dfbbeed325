# SPDX-License-Identifier: MIT
# Process trees, their bounded language semantics and canonical form.

import enum
import itertools
import re
from dataclasses import dataclass
from typing import FrozenSet, Iterable, List, MutableMapping, Optional, Sequence, Set, Tuple, Union

from cachetools import LRUCache, cachedmethod

from wf2pt.petri_net import SILENT, Activity, Label, ResultSetCapExceededError, Silent, Trace


TraceSet = FrozenSet[Trace]

DEFAULT_TRACE_CAP = 200_000

_BARE_ACTIVITY = re.compile(r"[A-Za-z0-9_]+")


class Operator(enum.Enum):
    SEQ = "->"
    XOR = "X"
    AND = "+"
    LOOP = "*"

    @property
    def symbol(self) -> str:
        return self.value

    @classmethod
    def from_symbol(cls, symbol: str) -> "Operator":
        for op in cls:
            if op.value == symbol:
                return op
        raise ValueError(f"unknown operator symbol: {symbol}")


def quote_activity(name: str) -> str:
    if _BARE_ACTIVITY.fullmatch(name):
        return name
    return "'" + name.replace("'", "''") + "'"


@dataclass(frozen=True)
class Leaf:
    label: Label

    @property
    def is_silent(self) -> bool:
        return isinstance(self.label, Silent)

    def __str__(self) -> str:
        if isinstance(self.label, Activity):
            return quote_activity(self.label.name)
        return str(self.label)


@dataclass(frozen=True)
class OperatorNode:
    operator: Operator
    children: Tuple["ProcessTree", ...]

    def __post_init__(self) -> None:
        if not isinstance(self.children, tuple):
            object.__setattr__(self, "children", tuple(self.children))
        if self.operator is Operator.LOOP and len(self.children) != 2:
            raise ValueError(f"loop operator needs exactly 2 children, got {len(self.children)}")
        if not self.children:
            raise ValueError(f"operator {self.operator.symbol} needs at least one child")

    def __str__(self) -> str:
        return f"{self.operator.symbol}({','.join(str(c) for c in self.children)})"


ProcessTree = Union[Leaf, OperatorNode]

TAU = Leaf(SILENT)


def activity(name: str) -> Leaf:
    return Leaf(Activity(name))


def seq(*children: ProcessTree) -> OperatorNode:
    return OperatorNode(Operator.SEQ, tuple(children))


def xor(*children: ProcessTree) -> OperatorNode:
    return OperatorNode(Operator.XOR, tuple(children))


def par(*children: ProcessTree) -> OperatorNode:
    return OperatorNode(Operator.AND, tuple(children))


def loop(do: ProcessTree, redo: ProcessTree) -> OperatorNode:
    return OperatorNode(Operator.LOOP, (do, redo))


def operator_tree(operator: Operator, children: Sequence[ProcessTree]) -> OperatorNode:
    return OperatorNode(operator, tuple(children))


def activities(tree: ProcessTree) -> List[str]:
    """Distinct activity names in left-to-right order."""
    names: List[str] = []
    seen: Set[str] = set()
    for leaf in leaves(tree):
        if isinstance(leaf.label, Activity) and leaf.label.name not in seen:
            seen.add(leaf.label.name)
            names.append(leaf.label.name)
    return names


def leaves(tree: ProcessTree) -> Iterable[Leaf]:
    if isinstance(tree, Leaf):
        yield tree
        return
    for child in tree.children:
        yield from leaves(child)


def tree_size(tree: ProcessTree) -> int:
    if isinstance(tree, Leaf):
        return 1
    return 1 + sum(tree_size(c) for c in tree.children)


def tree_depth(tree: ProcessTree) -> int:
    if isinstance(tree, Leaf):
        return 0
    return 1 + max(tree_depth(c) for c in tree.children)


def interleavings(left: Trace, right: Trace) -> Iterable[Trace]:
    """All order-preserving interleavings of two traces."""
    total = len(left) + len(right)
    for positions in itertools.combinations(range(total), len(left)):
        merged = []
        left_iter, right_iter = iter(left), iter(right)
        position_set = set(positions)
        for i in range(total):
            merged.append(next(left_iter) if i in position_set else next(right_iter))
        yield tuple(merged)


def shuffle(sets: Sequence[Iterable[Trace]],
            cap: int = DEFAULT_TRACE_CAP,
            max_length: Optional[int] = None) -> TraceSet:
    """Shuffle of trace sets; with max_length only interleavings of at most that length are built."""
    result: Set[Trace] = {()}
    for operand in sets:
        operand_traces = list(operand)
        step: Set[Trace] = set()
        for prefix in result:
            for trace in operand_traces:
                if max_length is not None and len(prefix) + len(trace) > max_length:
                    continue
                step.update(interleavings(prefix, trace))
                _check_cap(step, cap)
        result = step
    return frozenset(result)


def _check_cap(traces: Set[Trace], cap: int) -> None:
    if len(traces) > cap:
        raise ResultSetCapExceededError(f"trace set exceeds cap of {cap} traces")


class TreeLanguage:
    """
    Bounded language of process trees. Sub-tree languages are memoized per (tree, bound),
    so shared sub-trees and repeated queries are computed once.
    """

    def __init__(self, trace_cap: int = DEFAULT_TRACE_CAP, cache_capacity: int = 4096) -> None:
        self.trace_cap = trace_cap
        self.cache: MutableMapping = LRUCache(cache_capacity)

    @cachedmethod(lambda self: self.cache)
    def language(self, tree: ProcessTree, max_visible_length: int) -> TraceSet:
        if max_visible_length < 0:
            raise ValueError("max_visible_length must be non-negative")
        k = max_visible_length
        if isinstance(tree, Leaf):
            if isinstance(tree.label, Activity):
                return frozenset([(tree.label.name,)]) if k >= 1 else frozenset()
            return frozenset([()])

        children = [self.language(c, k) for c in tree.children]
        if tree.operator is Operator.XOR:
            union: Set[Trace] = set()
            for child in children:
                union.update(child)
                _check_cap(union, self.trace_cap)
            return frozenset(union)
        if tree.operator is Operator.SEQ:
            return self._concatenate(children, k)
        if tree.operator is Operator.AND:
            return shuffle(children, self.trace_cap, k)
        return self._loop(children[0], children[1], k)

    def _concatenate(self, parts: Sequence[TraceSet], k: int) -> TraceSet:
        result: Set[Trace] = {()}
        for part in parts:
            result = {prefix + trace for prefix in result for trace in part if len(prefix) + len(trace) <= k}
            _check_cap(result, self.trace_cap)
        return frozenset(result)

    def _loop(self, do: TraceSet, redo: TraceSet, k: int) -> TraceSet:
        # one do-execution, then repeatedly a redo followed by a do; deduplication ends silent repetitions
        result: Set[Trace] = set(do)
        frontier = sorted(do)
        while frontier:
            grown: List[Trace] = []
            for prefix in frontier:
                for back in redo:
                    if len(prefix) + len(back) > k:
                        continue
                    for again in do:
                        trace = prefix + back + again
                        if len(trace) <= k and trace not in result:
                            result.add(trace)
                            grown.append(trace)
            _check_cap(result, self.trace_cap)
            frontier = grown
        return frozenset(result)


def enumerate_tree_language(tree: ProcessTree,
                            max_visible_length: int,
                            trace_cap: int = DEFAULT_TRACE_CAP) -> TraceSet:
    return TreeLanguage(trace_cap).language(tree, max_visible_length)


def canonicalize(tree: ProcessTree) -> ProcessTree:
    """
    Normal form used for tree equality: nested Seq/Xor/And of the same kind are flattened,
    silent children of Seq and And are dropped, single-child Seq/Xor/And collapse to the child,
    a loop whose do-part is a loop becomes one loop with a choice of redo-parts,
    and children of Xor and And are sorted by their textual form.
    """
    current = tree
    while True:
        normalized = _normalize(current)
        if normalized == current:
            return normalized
        current = normalized


def _normalize(tree: ProcessTree) -> ProcessTree:
    if isinstance(tree, Leaf):
        return tree
    children = [_normalize(c) for c in tree.children]
    op = tree.operator
    if op is Operator.LOOP:
        do, redo = children
        if isinstance(do, OperatorNode) and do.operator is Operator.LOOP:
            # *(*(A,B),C) and *(A,X(B,C)) have the same language
            inner_do, inner_redo = do.children
            return OperatorNode(op, (inner_do, OperatorNode(Operator.XOR, (inner_redo, redo))))
        return OperatorNode(op, tuple(children))

    flat: List[ProcessTree] = []
    for child in children:
        if isinstance(child, OperatorNode) and child.operator is op:
            flat.extend(child.children)
        elif op in (Operator.SEQ, Operator.AND) and isinstance(child, Leaf) and child.is_silent:
            continue
        else:
            flat.append(child)

    if not flat:
        return TAU
    if len(flat) == 1:
        return flat[0]
    if op in (Operator.XOR, Operator.AND):
        flat.sort(key=str)
    return OperatorNode(op, tuple(flat))


def trees_language_equal_canonical(first: ProcessTree, second: ProcessTree) -> bool:
    return canonicalize(first) == canonicalize(second)
