"""Finite permutation groups used as desk-scale platforms.

Permutations are 0-based image tuples and multiply as functions:
``mul(x, y)[i] == x[y[i]]`` (apply ``y`` first).  This matches the image of a
braid word under ``sigma_i -> (i, i+1)`` in :mod:`ldkep.braid`.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Iterable, Sequence

Perm = tuple[int, ...]


def compose(x: Perm, y: Perm) -> Perm:
    return tuple(x[j] for j in y)


def inverse(x: Perm) -> Perm:
    out = [0] * len(x)
    for i, v in enumerate(x):
        out[v] = i
    return tuple(out)


def identity(k: int) -> Perm:
    return tuple(range(k))


def is_permutation(images: Sequence[int]) -> bool:
    return sorted(images) == list(range(len(images)))


def from_cycles(k: int, *cycles: Sequence[int]) -> Perm:
    """Build a permutation of {1..k} from 1-based cycles, e.g. ``from_cycles(3, (1, 2))``."""
    img = list(range(k))
    for cyc in cycles:
        for a, b in zip(cyc, list(cyc[1:]) + [cyc[0]]):
            img[a - 1] = b - 1
    return tuple(img)


def cycle_string(x: Perm) -> str:
    seen: set[int] = set()
    parts = []
    for start in range(len(x)):
        if start in seen or x[start] == start:
            continue
        cyc = []
        i = start
        while i not in seen:
            seen.add(i)
            cyc.append(str(i + 1))
            i = x[i]
        parts.append("(" + " ".join(cyc) + ")")
    return "".join(parts) or "()"


@dataclass(frozen=True)
class PermGroup:
    """An enumerated permutation group; ``elements`` is sorted lexicographically."""

    degree: int
    elements: tuple[Perm, ...]
    names: dict[str, Perm] = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "_index", {g: i for i, g in enumerate(self.elements)})

    @classmethod
    def from_generators(cls, degree: int, gens: Iterable[Perm], names=None) -> PermGroup:
        gens = [tuple(g) for g in gens]
        seen = {identity(degree)}
        frontier = [identity(degree)]
        while frontier:
            nxt = []
            for g in frontier:
                for s in gens:
                    h = compose(g, s)
                    if h not in seen:
                        seen.add(h)
                        nxt.append(h)
            frontier = nxt
        return cls(degree, tuple(sorted(seen)), dict(names or {}))

    @classmethod
    def symmetric(cls, k: int) -> PermGroup:
        return cls(k, tuple(itertools.permutations(range(k))))

    @classmethod
    def dihedral(cls, order: int = 8) -> PermGroup:
        """Symmetries of a regular (order/2)-gon; names ``e, r, r2, .., s, rs, r2s, ..``."""
        k = order // 2
        if order % 2 or k < 3:
            raise ValueError("dihedral order must be even and >= 6")
        r = tuple((i + 1) % k for i in range(k))
        s = tuple((-i) % k for i in range(k))
        names = {}
        rk = identity(k)
        for j in range(k):
            tag = "" if j == 0 else ("r" if j == 1 else f"r{j}")
            names[tag or "e"] = rk
            names[(tag or "") + "s"] = compose(rk, s)
            rk = compose(rk, r)
        return cls.from_generators(k, [r, s], names)

    @classmethod
    def quaternion(cls) -> PermGroup:
        """Q8 in its regular representation on 8 points; names ``1, -1, i, -i, ..``."""
        units = ["1", "i", "j", "k"]
        table = {  # unit products as (sign, unit)
            ("1", u): (1, u) for u in units
        }
        table.update({(u, "1"): (1, u) for u in units})
        table.update({("i", "i"): (-1, "1"), ("j", "j"): (-1, "1"), ("k", "k"): (-1, "1"),
                      ("i", "j"): (1, "k"), ("j", "k"): (1, "i"), ("k", "i"): (1, "j"),
                      ("j", "i"): (-1, "k"), ("k", "j"): (-1, "i"), ("i", "k"): (-1, "j")})
        elems = [(sg, u) for u in units for sg in (1, -1)]
        pos = {e: n for n, e in enumerate(elems)}

        def times(a, b):
            sg, u = table[(a[1], b[1])]
            return (a[0] * b[0] * sg, u)

        names = {}
        for e in elems:
            # left multiplication is a homomorphism for function composition
            perm = tuple(pos[times(e, x)] for x in elems)
            names[("" if e[0] > 0 else "-") + e[1]] = perm
        return cls(8, tuple(sorted(names.values())), names)

    # -- group structure ---------------------------------------------------

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def identity(self) -> Perm:
        return identity(self.degree)

    def mul(self, x: Perm, y: Perm) -> Perm:
        return compose(x, y)

    def inv(self, x: Perm) -> Perm:
        return inverse(x)

    def eq(self, x: Perm, y: Perm) -> bool:
        return x == y

    def index(self, x: Perm) -> int:
        return self._index[x]

    def __contains__(self, x) -> bool:
        return tuple(x) in self._index

    def sample(self, rng: random.Random) -> Perm:
        return rng.choice(self.elements)

    def element(self, name: str) -> Perm:
        """Look up a named element, or parse 1-based cycles like ``(1 2)(3 4)``."""
        if name in self.names:
            return self.names[name]
        if name in ("e", "1", "()"):
            return self.identity
        cycles = []
        for chunk in name.replace(")", ")|").split("|"):
            chunk = chunk.strip()
            if not chunk:
                continue
            if not (chunk.startswith("(") and chunk.endswith(")")):
                raise ValueError(f"unknown element {name!r}")
            cycles.append(tuple(int(v) for v in chunk[1:-1].replace(",", " ").split()))
        g = from_cycles(self.degree, *cycles)
        if g not in self:
            raise ValueError(f"{name!r} is not in the group")
        return g

    def name_of(self, x: Perm) -> str:
        for k, v in self.names.items():
            if v == x:
                return k
        return cycle_string(x)

    def is_central(self, a: Perm) -> bool:
        return all(compose(a, g) == compose(g, a) for g in self.elements)

    def center(self) -> PermGroup:
        return PermGroup(self.degree, tuple(g for g in self.elements if self.is_central(g)))

    def is_abelian(self) -> bool:
        return self.center().order == self.order

    def subgroup(self, elements: Iterable[Perm]) -> PermGroup:
        elems = tuple(sorted(set(elements)))
        for g in elems:
            if g not in self:
                raise ValueError("not a subset of the group")
        ids = set(elems)
        if any(compose(x, y) not in ids for x in elems for y in elems):
            raise ValueError("not closed under products")
        return PermGroup(self.degree, elems)

    def young_subgroup(self, composition: Sequence[int]) -> PermGroup:
        """Stabiliser of the consecutive blocks given by ``composition``."""
        if sum(composition) != self.degree:
            raise ValueError("composition must sum to the degree")
        block = []
        for b, size in enumerate(composition):
            block.extend([b] * size)
        return PermGroup(self.degree, tuple(
            g for g in self.elements if all(block[g[i]] == block[i] for i in range(self.degree))))

    def trivial_subgroup(self) -> PermGroup:
        return PermGroup(self.degree, (self.identity,))
