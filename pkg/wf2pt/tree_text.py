# SPDX-License-Identifier: MIT
# Textual form of process trees, e.g. ->(a,*(->(+(X(b,c),d),e),f),X(g,h))
#
# Tree     := Activity | "tau" | Op "(" Tree ("," Tree)* ")"
# Op       := "->" | "X" | "+" | "*"
# Activity := [A-Za-z0-9_]+ | single-quoted string, '' escapes a quote

import re
from typing import List

from wf2pt.petri_net import SILENT_TOKEN
from wf2pt.process_tree import TAU, Operator, ProcessTree, activity, operator_tree

_IDENTIFIER = re.compile(r"[A-Za-z0-9_]+")


class TreeParseError(ValueError):
    def __init__(self, message: str, position: int) -> None:
        super().__init__(f"{message} at position {position}")
        self.position = position


class LoopArityError(TreeParseError):
    pass


class _TreeParser:

    def __init__(self, text: str) -> None:
        self.text = text
        self.pos = 0

    def peek(self) -> str:
        self.skip_whitespace()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def skip_whitespace(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def expect(self, char: str) -> None:
        if self.peek() != char:
            found = repr(self.text[self.pos]) if self.pos < len(self.text) else "end of input"
            raise TreeParseError(f"expected '{char}' but found {found}", self.pos)
        self.pos += 1

    def parse(self) -> ProcessTree:
        tree = self.tree()
        if self.peek():
            raise TreeParseError(f"unexpected trailing input {self.text[self.pos:]!r}", self.pos)
        return tree

    def tree(self) -> ProcessTree:
        char = self.peek()
        start = self.pos
        if not char:
            raise TreeParseError("unexpected end of input", start)
        if self.text.startswith("->", self.pos):
            self.pos += 2
            return self.operator_node(Operator.SEQ, start)
        if char in "+*":
            self.pos += 1
            return self.operator_node(Operator.from_symbol(char), start)
        if char == "'":
            return activity(self.quoted(start))

        match = _IDENTIFIER.match(self.text, self.pos)
        if match is None:
            raise TreeParseError(f"unexpected character {char!r}", start)
        self.pos = match.end()
        name = match.group()
        if name == Operator.XOR.symbol and self.peek() == "(":
            return self.operator_node(Operator.XOR, start)
        if name == SILENT_TOKEN:
            return TAU
        return activity(name)

    def quoted(self, start: int) -> str:
        self.pos += 1
        chars: List[str] = []
        while True:
            if self.pos >= len(self.text):
                raise TreeParseError("unterminated quoted activity", start)
            char = self.text[self.pos]
            if char == "'":
                if self.text.startswith("''", self.pos):
                    chars.append("'")
                    self.pos += 2
                    continue
                self.pos += 1
                break
            chars.append(char)
            self.pos += 1
        name = "".join(chars)
        if not name:
            raise TreeParseError("empty activity name", start)
        if name == SILENT_TOKEN:
            raise TreeParseError(f"'{SILENT_TOKEN}' is reserved for the silent leaf and cannot be quoted", start)
        return name

    def operator_node(self, operator: Operator, start: int) -> ProcessTree:
        self.expect("(")
        children = [self.tree()]
        while self.peek() == ",":
            self.pos += 1
            children.append(self.tree())
        self.expect(")")
        if operator is Operator.LOOP and len(children) != 2:
            raise LoopArityError(f"loop operator needs exactly 2 children, got {len(children)}", start)
        return operator_tree(operator, children)


def read_tree_text(text: str) -> ProcessTree:
    return _TreeParser(text).parse()


def write_tree_text(tree: ProcessTree) -> str:
    return str(tree)
