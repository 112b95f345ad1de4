"""Planar binary trees whose leaves name basis elements and whose nodes name operations.

Leaves and op labels are stored 0-based; the text form is 1-based prefix
notation, ``(op1 (op2 g1 g2) g3)``.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from typing import Sequence, Union

from .ldsys import LDContext


@dataclass(frozen=True)
class Leaf:
    gen: int

    @property
    def size(self) -> int:
        return 1


@dataclass(frozen=True)
class Node:
    op: int
    left: "Tree"
    right: "Tree"

    @property
    def size(self) -> int:
        return self.left.size + self.right.size


Tree = Union[Leaf, Node]


class TreeSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


def leaves(tree: Tree) -> list[int]:
    out: list[int] = []
    stack = [tree]
    while stack:
        t = stack.pop()
        if isinstance(t, Leaf):
            out.append(t.gen)
        else:
            stack.append(t.right)
            stack.append(t.left)
    return out


def ops_used(tree: Tree) -> set[int]:
    if isinstance(tree, Leaf):
        return set()
    return {tree.op} | ops_used(tree.left) | ops_used(tree.right)


def shape(tree: Tree) -> str:
    if isinstance(tree, Leaf):
        return "."
    return f"({shape(tree.left)}{shape(tree.right)})"


def map_leaves_eval(tree: Tree, leaf_values: Sequence, ctx: LDContext):
    """Evaluate ``tree`` with its i-th leaf (left to right) replaced by ``leaf_values[i]``."""
    if len(leaf_values) != tree.size:
        raise ValueError(f"tree has {tree.size} leaves, got {len(leaf_values)} values")
    it = iter(leaf_values)

    def go(t):
        if isinstance(t, Leaf):
            return next(it)
        left = go(t.left)
        return ctx.apply(t.op, left, go(t.right))
    return go(tree)


def eval_tree(tree: Tree, basis: Sequence, ctx: LDContext):
    """Bottom-up fold over ``basis``."""
    for g in leaves(tree):
        if not 0 <= g < len(basis):
            raise IndexError(f"leaf g{g + 1} outside basis of size {len(basis)}")
    for op in ops_used(tree):
        if not 0 <= op < len(ctx.ops):
            raise IndexError(f"op{op + 1} outside the operation family")
    return map_leaves_eval(tree, [basis[g] for g in leaves(tree)], ctx)


def random_tree(rng: random.Random | int, leaf_count: int, basis_size: int,
                op_indices: Sequence[int] = (0,)) -> Tree:
    """Uniform recursive split of ``leaf_count`` leaves; uniform leaf and op labels."""
    if leaf_count < 1:
        raise ValueError("a tree needs at least one leaf")
    if not isinstance(rng, random.Random):
        rng = random.Random(rng)
    ops = list(op_indices)

    def build(k: int) -> Tree:
        if k == 1:
            return Leaf(rng.randrange(basis_size))
        split = rng.randint(1, k - 1)
        op = rng.choice(ops)
        left = build(split)
        return Node(op, left, build(k - split))
    return build(leaf_count)


def to_text(tree: Tree) -> str:
    if isinstance(tree, Leaf):
        return f"g{tree.gen + 1}"
    return f"(op{tree.op + 1} {to_text(tree.left)} {to_text(tree.right)})"


_TOKEN = re.compile(r"\s*(\(|\)|op[1-9][0-9]*|g[1-9][0-9]*)")


def parse(text: str) -> Tree:
    pos = 0

    def token() -> tuple[str, int]:
        nonlocal pos
        m = _TOKEN.match(text, pos)
        if not m:
            where = len(text) - len(text[pos:].lstrip())
            if where >= len(text):
                raise TreeSyntaxError("unexpected end of input", where)
            raise TreeSyntaxError(f"unexpected {text[where]!r}", where)
        pos = m.end()
        return m.group(1), m.start(1)

    def tree() -> Tree:
        tok, at = token()
        if tok.startswith("g"):
            return Leaf(int(tok[1:]) - 1)
        if tok != "(":
            raise TreeSyntaxError(f"expected leaf or '(' but got {tok!r}", at)
        op, at = token()
        if not op.startswith("op"):
            raise TreeSyntaxError(f"expected op label but got {op!r}", at)
        left = tree()
        right = tree()
        close, at = token()
        if close != ")":
            raise TreeSyntaxError(f"expected ')' but got {close!r}", at)
        return Node(int(op[2:]) - 1, left, right)

    result = tree()
    if text[pos:].strip():
        raise TreeSyntaxError("trailing input", len(text) - len(text[pos:].lstrip()))
    return result
