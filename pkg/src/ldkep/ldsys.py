"""Left-distributive operation families and their law checkers.

An :class:`LDContext` bundles a carrier (Laver table, finite permutation
group or braid words) with an indexed family of binary operations.  Each
operation carries a side label: ``"A"`` for Alice's pool, ``"B"`` for Bob's,
``"AB"`` for both.  Protocols only rely on the cross laws between the two
pools; contexts whose operations all sit on both sides are multi-LD systems.
"""

from __future__ import annotations

import dataclasses
import random
import shlex
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Callable, Hashable, Sequence

import numpy as np

from . import braid
from .braid import BraidParams, Parabolic, Word
from .perms import PermGroup


# -- carriers ---------------------------------------------------------------

@dataclass(frozen=True)
class BraidGroup:
    """B_infinity with a sampler drawing words of fixed length on sigma_1..sigma_width."""

    width: int = 3
    length: int = 8

    identity: Word = ()

    def mul(self, x, y):
        return braid.concat(x, y)

    def inv(self, x):
        return braid.invert(x)

    def eq(self, x, y):
        return braid.equal(x, y)

    def sample(self, rng: random.Random) -> Word:
        return braid.random_word(rng, self.length, self.width)


@dataclass(frozen=True)
class PureBraidGroup(BraidGroup):
    """P_n sampled as products of ``length`` pure generators."""

    n: int = 4

    def sample(self, rng: random.Random) -> Word:
        return braid.random_pure(rng, self.length, self.n)


def _group_elements(group) -> Sequence | None:
    return getattr(group, "elements", None)


def _draw(group, rng: random.Random, count: int):
    """``count`` elements: all of them for small finite groups, else samples."""
    elems = _group_elements(group)
    if elems is not None and len(elems) <= count:
        return list(elems)
    return [group.sample(rng) for _ in range(count)]


# -- endomorphisms ----------------------------------------------------------

@dataclass(frozen=True)
class Endo:
    """A named group endomorphism.

    kinds: ``identity``, ``trivial``, ``shift`` (by ``d``), ``pullout``
    (d^d after erasing the last ``d`` of ``n`` strands, on P_n), ``inner``
    (x -> g^-1 x g) and ``table`` (explicit finite map).
    """

    kind: str
    d: int = 0
    n: int = 0
    g: Any = None
    table: tuple = ()

    @classmethod
    def identity(cls) -> Endo:
        return cls("identity")

    @classmethod
    def trivial(cls) -> Endo:
        return cls("trivial")

    @classmethod
    def shift(cls, d: int = 1) -> Endo:
        return cls("shift", d=d)

    @classmethod
    def pullout(cls, n: int, d: int = 1) -> Endo:
        return cls("pullout", d=d, n=n)

    @classmethod
    def inner(cls, g) -> Endo:
        return cls("inner", g=g)

    @classmethod
    def from_mapping(cls, mapping: dict) -> Endo:
        return cls("table", table=tuple(sorted(mapping.items())))

    def __call__(self, group, x):
        if self.kind == "identity":
            return x
        if self.kind == "trivial":
            return group.identity
        if self.kind == "shift":
            return braid.shift(x, self.d)
        if self.kind == "pullout":
            return braid.shift(braid.erase_last_strands(x, self.n, self.d), self.d)
        if self.kind == "inner":
            return group.mul(group.mul(group.inv(self.g), x), self.g)
        if self.kind == "table":
            return dict(self.table)[x]
        raise ValueError(f"unknown endomorphism kind {self.kind!r}")

    def __str__(self) -> str:
        if self.kind == "shift":
            return f"shift^{self.d}"
        if self.kind == "pullout":
            return f"shift^{self.d}.erase_{self.d}(P_{self.n})"
        return self.kind


# -- contexts ---------------------------------------------------------------

@dataclass(frozen=True)
class Operation:
    name: str
    fn: Callable[[Any, Any], Any]
    sides: str = "AB"


@dataclass(frozen=True)
class LDContext:
    descriptor: str
    ops: tuple[Operation, ...]
    eq: Callable[[Any, Any], bool]
    sampler: Callable[[random.Random], Any]
    elements: tuple | None = None
    encode: Callable[[Any], str] = str
    decode: Callable[[str], Any] = str
    key: Callable[[Any], Hashable] = lambda x: x
    strands: int = 0
    word_sampler: Callable[[random.Random, int], Any] | None = None
    _tables: dict = field(default_factory=dict, compare=False, repr=False)

    def apply(self, i: int, x, y):
        return self.ops[i].fn(x, y)

    def side(self, label: str) -> tuple[int, ...]:
        return tuple(i for i, op in enumerate(self.ops) if label in op.sides)

    @property
    def is_finite(self) -> bool:
        return self.elements is not None

    @property
    def is_braid(self) -> bool:
        return self.word_sampler is not None

    @cached_property
    def _index(self) -> dict:
        return {x: n for n, x in enumerate(self.elements or ())}

    def index_of(self, x) -> int:
        return self._index[x]

    def table(self, i: int) -> np.ndarray:
        """Cayley table of op ``i`` on element indices (finite carriers only)."""
        if i not in self._tables:
            elems = self.elements
            self._tables[i] = np.array(
                [[self._index[self.apply(i, x, y)] for y in elems] for x in elems], dtype=np.int64)
        return self._tables[i]

    def sample(self, rng: random.Random):
        return self.sampler(rng)

    def sample_secret(self, rng: random.Random, length: int | None = None):
        """A secret element; braid carriers honour ``length`` as the word length."""
        if self.word_sampler is not None and length:
            return self.word_sampler(rng, length)
        return self.sampler(rng)

    def declared_pairs(self) -> list[tuple[int, int]]:
        pairs = []
        for i in self.side("A"):
            for j in self.side("B"):
                for pair in ((i, j), (j, i)):
                    if pair not in pairs:
                        pairs.append(pair)
        return pairs


@dataclass
class LawReport:
    law: str
    passed: bool
    checked: int
    exhaustive: bool
    counterexample: tuple | None = None

    def __bool__(self) -> bool:
        return self.passed

    def __str__(self) -> str:
        how = "exhaustive" if self.exhaustive else "sampled"
        head = f"{'PASS' if self.passed else 'FAIL'} {self.law} ({self.checked} triples, {how})"
        if self.counterexample is not None:
            head += f" counterexample={self.counterexample!r}"
        return head


def _trial_rng(seed: int, t: int) -> random.Random:
    # one stream per sample index, so reports do not depend on evaluation order
    return random.Random(f"{seed}:{t}")


def check_law(law: str, lhs: Callable, rhs: Callable, eq: Callable, sample: Callable,
              trials: int = 200, seed: int = 0) -> LawReport:
    """Sample triples and compare ``lhs(x, y, z)`` with ``rhs(x, y, z)``."""
    for t in range(trials):
        rng = _trial_rng(seed, t)
        x, y, z = sample(rng), sample(rng), sample(rng)
        if not eq(lhs(x, y, z), rhs(x, y, z)):
            return LawReport(law, False, t + 1, False, (x, y, z))
    return LawReport(law, True, trials, False)


def check_left_distributive(ctx: LDContext, i: int = 0, j: int = 0, trials: int = 200,
                            seed: int = 0, exhaustive: bool | None = None) -> LawReport:
    """x *_i (y *_j z) == (x *_i y) *_j (x *_i z)."""
    law = f"LD({ctx.ops[i].name} over {ctx.ops[j].name})"
    if exhaustive is None:
        exhaustive = ctx.is_finite and len(ctx.elements) <= 2 ** 10
    if exhaustive:
        ti, tj = ctx.table(i), ctx.table(j)
        n = len(ctx.elements)
        for x in range(n):
            row = ti[x]
            lhs = row[tj]
            rhs = tj[row[:, None], row[None, :]]
            bad = np.argwhere(lhs != rhs)
            if len(bad):
                y, z = bad[0]
                e = ctx.elements
                return LawReport(law, False, x * n * n + y * n + z + 1, True, (e[x], e[y], e[z]))
        return LawReport(law, True, n ** 3, True)
    return check_law(
        law,
        lambda x, y, z: ctx.apply(i, x, ctx.apply(j, y, z)),
        lambda x, y, z: ctx.apply(j, ctx.apply(i, x, y), ctx.apply(i, x, z)),
        ctx.eq, ctx.sample, trials, seed)


def check_context(ctx: LDContext, trials: int = 200, seed: int = 0) -> list[LawReport]:
    """Every declared (A, B) distributivity pair."""
    return [check_left_distributive(ctx, i, j, trials, seed) for i, j in ctx.declared_pairs()]


# -- Laver tables -----------------------------------------------------------

@dataclass(frozen=True)
class LaverTable:
    n: int
    entries: tuple[tuple[int, ...], ...]

    @property
    def size(self) -> int:
        return 2 ** self.n

    def op(self, k: int, l: int) -> int:
        return self.entries[k - 1][l - 1]

    def __str__(self) -> str:
        size = self.size
        w = len(str(size))
        lines = [" " * w + " | " + " ".join(f"{l:>{w}}" for l in range(1, size + 1)),
                 "-" * (w + 2 + (w + 1) * size)]
        for k in range(1, size + 1):
            lines.append(f"{k:>{w}} | " + " ".join(f"{self.op(k, l):>{w}}" for l in range(1, size + 1)))
        return "\n".join(lines)


def laver_table(n: int) -> LaverTable:
    if not 1 <= n <= 5:
        raise ValueError("Laver level must be between 1 and 5")
    size = 2 ** n
    rows: list[list[int]] = [[0] * (size + 1) for _ in range(size + 1)]
    rows[size] = list(range(size + 1))
    for k in range(size - 1, 0, -1):
        rows[k][1] = k + 1
        for l in range(1, size):
            # k*l > k, so that row is already filled
            rows[k][l + 1] = rows[rows[k][l]][k + 1]
    return LaverTable(n, tuple(tuple(r[1:]) for r in rows[1:]))


def _parse_int_in(lo: int, hi: int):
    def decode(text: str) -> int:
        v = int(text)
        if not lo <= v <= hi:
            raise ValueError(f"{v} outside {lo}..{hi}")
        return v
    return decode


def laver_context(n: int) -> LDContext:
    table = laver_table(n)
    size = table.size
    elems = tuple(range(1, size + 1))
    return LDContext(
        descriptor=f"platform=laver n={n}",
        ops=(Operation("*", table.op),),
        eq=lambda x, y: x == y,
        sampler=lambda rng: rng.choice(elems),
        elements=elems,
        encode=str,
        decode=_parse_int_in(1, size),
        strands=size,
    )


def trivial_context(elements: Sequence, f: Callable) -> LDContext:
    """x * y = f(y) on a finite set, LD for any map f."""
    elems = tuple(elements)
    return LDContext(
        descriptor="trivial",
        ops=(Operation("*", lambda x, y: f(y)),),
        eq=lambda x, y: x == y,
        sampler=lambda rng: rng.choice(elems),
        elements=elems,
    )


# -- group based operations -------------------------------------------------

def conjugate(group, x, y):
    """x * y = x^-1 y x."""
    return group.mul(group.mul(group.inv(x), y), x)


def _group_context(descriptor: str, group, ops: Sequence[Operation]) -> LDContext:
    if isinstance(group, BraidGroup):
        return _braid_context(descriptor, ops, group, strands=braid.strands_for((group.width,)))
    elems = _group_elements(group)
    return LDContext(
        descriptor=descriptor,
        ops=tuple(ops),
        eq=group.eq,
        sampler=group.sample,
        elements=tuple(elems) if elems is not None else None,
        encode=lambda x: " ".join(str(v + 1) for v in x),
        decode=_perm_decoder(group),
        strands=getattr(group, "degree", 0),
    )


def _perm_decoder(group):
    def decode(text: str):
        x = tuple(int(v) - 1 for v in text.split())
        if x not in group:
            raise ValueError(f"{text!r} is not an element of the group")
        return x
    return decode


def conjugacy_context(group, rev: bool = False, descriptor: str = "") -> LDContext:
    if rev:
        op = Operation("*rev", lambda x, y: group.mul(group.mul(x, y), group.inv(x)))
    else:
        op = Operation("*", lambda x, y: conjugate(group, x, y))
    return _group_context(descriptor or "group conjugacy", group, [op])


def ansatz_context(group, f: Endo, g: Endo, h: Endo) -> LDContext:
    """x * y = f(x^-1) g(y) h(x)."""
    def op(x, y):
        return group.mul(group.mul(f(group, group.inv(x)), g(group, y)), h(group, x))
    return _group_context(f"ansatz f={f} g={g} h={h}", group, [Operation("*", op)])


def build_f_conjugacy(group, endo: Endo) -> LDContext:
    """x *_f y = f(x^-1 y) x."""
    return ansatz_context(group, endo, endo, Endo.identity())


def twisted_conj(group, f: Endo, c, u):
    """c *tw u = f(c^-1) u c."""
    return group.mul(group.mul(f(group, group.inv(c)), u), c)


def f_conj(group, f: Endo, c, u):
    return group.mul(f(group, group.mul(group.inv(c), u)), c)


def check_near_ld(group, f: Endo, trials: int = 200, seed: int = 0) -> LawReport:
    """a *tw (b *tw c) == (a *tw b) *tw (f(a) *tw c)."""
    def tw(x, y):
        return twisted_conj(group, f, x, y)
    return check_law(
        f"near-LD twisted({f})",
        lambda a, b, c: tw(a, tw(b, c)),
        lambda a, b, c: tw(tw(a, b), tw(f(group, a), c)),
        group.eq, group.sample, trials, seed)


def check_twisted_reduction(group, f: Endo, trials: int = 200, seed: int = 0) -> LawReport:
    """c *_f u == c *tw f(u): the same witness c links u ->_f v and f(u) ~_f v."""
    return check_law(
        f"f-LD vs twisted({f})",
        lambda c, u, _: f_conj(group, f, c, u),
        lambda c, u, _: twisted_conj(group, f, c, f(group, u)),
        group.eq, group.sample, trials, seed)


def symmetric_conj(group, x, y):
    """x o y = x y^-1 x."""
    return group.mul(group.mul(x, group.inv(y)), x)


def symmetric_context(group) -> LDContext:
    return _group_context("group symmetric conjugacy", group,
                          [Operation("o", lambda x, y: symmetric_conj(group, x, y))])


def _projector_witness(group, f: Endo, trials: int, seed: int):
    rng = random.Random(seed)
    for x in _draw(group, rng, trials):
        if not group.eq(f(group, f(group, x)), f(group, x)):
            return x
    return None


def build_f_symmetric(group, endo: Endo, rev: bool = False, trials: int = 200,
                      seed: int = 0) -> LDContext:
    """x o_f y = f(x y^-1) x, or x o_f^rev y = x f(y^-1 x); ``endo`` must be a projector."""
    witness = _projector_witness(group, endo, trials, seed)
    if witness is not None:
        raise ValueError(f"{endo} is not a projector: f(f(x)) != f(x) at x={witness!r}")
    mul, inv = group.mul, group.inv
    if rev:
        op = Operation("o_f^rev", lambda x, y: mul(x, endo(group, mul(inv(y), x))))
    else:
        op = Operation("o_f", lambda x, y: mul(endo(group, mul(x, inv(y))), x))
    return _group_context(f"f-symmetric f={endo}{' rev' if rev else ''}", group, [op])


def check_distributivity_over_sym(group, star: Callable | None = None, trials: int = 500,
                                  seed: int = 0) -> LawReport:
    """x * (y o z) == (x * y) o (x * z), with * defaulting to conjugation."""
    star = star or (lambda x, y: conjugate(group, x, y))

    def sym(x, y):
        return symmetric_conj(group, x, y)
    return check_law(
        "distributivity over o",
        lambda x, y, z: star(x, sym(y, z)),
        lambda x, y, z: sym(star(x, y), star(x, z)),
        group.eq, group.sample, trials, seed)


@dataclass
class ConditionReport:
    conditions: dict[str, bool]
    law: LawReport

    @property
    def conditions_hold(self) -> bool:
        return all(self.conditions.values())

    @property
    def agree(self) -> bool:
        return self.conditions_hold == self.law.passed

    def __str__(self) -> str:
        parts = [f"{k}: {'ok' if v else 'fails'}" for k, v in self.conditions.items()]
        return "; ".join(parts) + f" | {self.law}"


def check_ansatz_conditions(f: Endo, g: Endo, h: Endo, group, trials: int = 200,
                            seed: int = 0) -> ConditionReport:
    """Pointwise fh=f, gh=hg=hf, fg=gf=f^2, h^2=h against the LD law of f(x^-1) g(y) h(x)."""
    xs = _draw(group, random.Random(seed), trials)

    def holds(lhs, rhs):
        return all(group.eq(lhs(x), rhs(x)) for x in xs)
    F = lambda x: f(group, x)  # noqa: E731
    G = lambda x: g(group, x)  # noqa: E731
    H = lambda x: h(group, x)  # noqa: E731
    conditions = {
        "fh=f": holds(lambda x: F(H(x)), F),
        "gh=hg": holds(lambda x: G(H(x)), lambda x: H(G(x))),
        "hg=hf": holds(lambda x: H(G(x)), lambda x: H(F(x))),
        "fg=gf": holds(lambda x: F(G(x)), lambda x: G(F(x))),
        "gf=f^2": holds(lambda x: G(F(x)), lambda x: F(F(x))),
        "h^2=h": holds(lambda x: H(H(x)), H),
    }
    law = check_left_distributive(ansatz_context(group, f, g, h), trials=trials, seed=seed)
    return ConditionReport(conditions, law)


def twist_context(group, f: Endo, a_list: Sequence, descriptor: str = "") -> LDContext:
    """x *_i y = f(x^-1) a_i f(y) x, every op on both sides."""
    def make(a):
        return lambda x, y: group.mul(group.mul(group.mul(f(group, group.inv(x)), a), f(group, y)), x)
    ops = [Operation(f"*{i + 1}", make(a)) for i, a in enumerate(a_list)]
    return _group_context(descriptor or f"twist f={f}", group, ops)


def check_twist_conditions(f: Endo, a_list: Sequence, group, trials: int = 200,
                            seed: int = 0) -> ConditionReport:
    mul = group.mul
    ok_braid = all(
        group.eq(mul(mul(ai, f(group, ai)), aj), mul(mul(f(group, aj), ai), f(group, ai)))
        for ai in a_list for aj in a_list)
    xs = _draw(group, random.Random(seed), trials)
    ok_central = all(
        group.eq(mul(ai, f(group, f(group, x))), mul(f(group, f(group, x)), ai))
        for ai in a_list for x in xs)
    ctx = twist_context(group, f, a_list)
    law = LawReport("multi-LD", True, 0, ctx.is_finite)
    for i in range(len(a_list)):
        for j in range(len(a_list)):
            rep = check_left_distributive(ctx, i, j, trials, seed)
            law.checked += rep.checked
            if not rep.passed:
                law = LawReport(f"multi-LD ({i + 1},{j + 1})", False, law.checked,
                                rep.exhaustive, rep.counterexample)
                break
        if not law.passed:
            break
    return ConditionReport({"a_i f(a_i) a_j = f(a_j) a_i f(a_i)": ok_braid,
                            "[a_i, f^2(x)] = 1": ok_central}, law)


def central_twist_context(group: PermGroup, a_list: Sequence, descriptor: str = "") -> LDContext:
    """x *_i y = x^-1 a_i y x for central a_i: a finite multi-LD system."""
    for a in a_list:
        if not group.is_central(a):
            raise ValueError(f"{group.name_of(a)} is not central")
    return twist_context(group, Endo.identity(), a_list,
                         descriptor or "central twist " + ",".join(group.name_of(a) for a in a_list))


# -- braid based operations -------------------------------------------------

def gsc_operation(name: str, p: int, a: Word, sides: str = "AB") -> Operation:
    """x * y = d^p(x^-1) a d^p(y) x."""
    a = tuple(a)

    def op(x, y):
        return braid.concat(braid.shift(braid.invert(x), p), a, braid.shift(y, p), x)
    return Operation(name, op, sides)


def _braid_context(descriptor: str, ops: Sequence[Operation], group: BraidGroup,
                   strands: int) -> LDContext:
    return LDContext(
        descriptor=descriptor,
        ops=tuple(ops),
        eq=braid.equal,
        sampler=group.sample,
        encode=lambda x: braid.format_word(braid.canonical_word(x)),
        decode=braid.parse_word,
        key=braid.canonical_word,
        strands=strands,
        word_sampler=lambda rng, length: braid.random_word(rng, length, group.width),
    )


def build_shifted_conj(width: int = 3, length: int = 8) -> LDContext:
    """Shifted conjugacy x * y = d(x^-1) s1 d(y) x and its mirror with s1^-1."""
    ops = [gsc_operation("*", 1, (1,)), gsc_operation("*bar", 1, (-1,))]
    return _braid_context("platform=braid mode=shifted p=1", ops, BraidGroup(width, length),
                          strands=max(2, width + 1))


def _require_in(word: Word, sub: Parabolic, what: str) -> None:
    if not sub.contains(word):
        raise ValueError(f"{what}={braid.format_word(word)!r} is not in {sub}")


def gsc_element(p: int, a1: Word, a2: Word, sign: int = 1) -> Word:
    t = braid.tau(p, p)
    return braid.concat(a1, t if sign > 0 else braid.invert(t), a2)


def build_gen_shifted_LD(p: int, a1: Word = (), a2: Word = (), sign: int = 1, strict: bool = True,
                         width: int | None = None, length: int = 8) -> LDContext:
    """x * y = d^p(x^-1) a1 tau_{p,p}^sign a2 d^p(y) x; LD iff [a1, a2] = 1."""
    sub = Parabolic(0, p)
    _require_in(a1, sub, "a'")
    _require_in(a2, sub, "a''")
    if strict and not braid.commute(a1, a2):
        raise ValueError("a' and a'' do not commute")
    a = gsc_element(p, a1, a2, sign)
    width = width or p
    return _braid_context(f"platform=braid mode=gsc p={p}", [gsc_operation("*", p, a)],
                          BraidGroup(width, length), strands=max(2 * p, width + 1))


def split_element(p1: int, p2: int, a1p: Word, a1pp: Word, a2p: Word, a2pp: Word) -> Word:
    p = p1 + p2
    return braid.concat(a1p, braid.shift(a2p, p1), braid.shift(braid.tau(p2, p), p1),
                        braid.invert(braid.tau(p, p1)), a1pp, braid.shift(a2pp, p1))


def build_split_LD(p1: int, p2: int, a1p: Word = (), a1pp: Word = (), a2p: Word = (),
                   a2pp: Word = (), width: int | None = None, length: int = 8) -> LDContext:
    for w, k, what in ((a1p, p1, "a1'"), (a1pp, p1, "a1''"), (a2p, p2, "a2'"), (a2pp, p2, "a2''")):
        _require_in(w, Parabolic(0, k), what)
    if not (braid.commute(a1p, a1pp) and braid.commute(a2p, a2pp)):
        raise ValueError("need [a1', a1''] = [a2', a2''] = 1")
    p = p1 + p2
    a = split_element(p1, p2, a1p, a1pp, a2p, a2pp)
    width = width or p
    return _braid_context(f"platform=braid mode=split p1={p1} p2={p2}",
                          [gsc_operation("*", p, a)], BraidGroup(width, length),
                          strands=max(2 * p, width + 1))


def partial_domains(params: BraidParams, bi: bool = False) -> dict[str, Parabolic]:
    """Parabolic windows for alpha1, alpha2, beta1, beta2."""
    p, q1, q2 = params.p, params.q1, params.q2
    return {
        "alpha1": Parabolic(0, q1),
        "alpha2": Parabolic(q1, q2 - q1) if bi else Parabolic(0, q2),
        "beta1": Parabolic(q2, p - q2),
        "beta2": Parabolic(q1, q2 - q1) if bi else Parabolic(q1, p - q1),
    }


def build_partial_multi_LD(params: BraidParams, alphas: Sequence[tuple[Word, Word]],
                           betas: Sequence[tuple[Word, Word]], bi: bool = False,
                           width: int | None = None, length: int = 8,
                           descriptor: str = "") -> LDContext:
    """O_A = {x *_alpha y} with alpha = alpha1 tau alpha2, O_B likewise with beta."""
    dom = partial_domains(params, bi)
    p = params.p
    ops = []
    for n, (a1, a2) in enumerate(alphas):
        _require_in(a1, dom["alpha1"], "alpha1")
        _require_in(a2, dom["alpha2"], "alpha2")
        ops.append(gsc_operation(f"*a{n + 1}", p, gsc_element(p, a1, a2), "A"))
    for n, (b1, b2) in enumerate(betas):
        _require_in(b1, dom["beta1"], "beta1")
        _require_in(b2, dom["beta2"], "beta2")
        ops.append(gsc_operation(f"*b{n + 1}", p, gsc_element(p, b1, b2), "B"))
    width = width or p
    return _braid_context(descriptor or f"platform=braid mode=gsc p={p} q1={params.q1} q2={params.q2}",
                          ops, BraidGroup(width, length), strands=max(params.N, width + 1))


# -- descriptors ------------------------------------------------------------

PRESETS = {
    "laver3": "platform=laver n=3",
    "s5-conj": "platform=group kind=symmetric degree=5",
    "ct8": "platform=group kind=dihedral order=8 a=e,r2",
    "q8": "platform=group kind=quaternion order=8 a=1,-1",
    "shifted": "platform=braid mode=shifted p=1",
    "braid-gsc": ('platform=braid mode=gsc p=7 q1=3 q2=4 alpha1="1 2;-2 -1" alpha2="3;2 -3" '
                  'beta1="5;6 -5" beta2="5 6;4 -6"'),
}


def parse_descriptor(text: str) -> dict[str, str]:
    text = PRESETS.get(text.strip(), text)
    out: dict[str, str] = {}
    for tok in shlex.split(text):
        if "=" not in tok:
            raise ValueError(f"descriptor token {tok!r} is not key=value")
        k, v = tok.split("=", 1)
        out[k] = v
    if "platform" not in out:
        raise ValueError("descriptor needs platform=")
    return out


def format_descriptor(fields: dict[str, str]) -> str:
    return " ".join(f"{k}={shlex.quote(v) if (' ' in v or not v) else v}" for k, v in fields.items())


def _word_list(text: str) -> list[Word]:
    return [braid.parse_word(part) for part in text.split(";")]


def build_context(descriptor: str) -> LDContext:
    """Build a context from ``key=value`` text (or a preset name)."""
    d = parse_descriptor(descriptor)
    text = format_descriptor(d)
    platform = d["platform"]
    if platform == "laver":
        return laver_context(int(d.get("n", 3)))
    if platform == "group":
        kind = d.get("kind", "symmetric")
        if kind == "symmetric":
            group = PermGroup.symmetric(int(d.get("degree", 5)))
        elif kind == "dihedral":
            group = PermGroup.dihedral(int(d.get("order", 8)))
        elif kind == "quaternion":
            group = PermGroup.quaternion()
        else:
            raise ValueError(f"unknown group kind {kind!r}")
        if "a" in d:
            return central_twist_context(group, [group.element(s) for s in d["a"].split(",")], text)
        op = d.get("op", "conj")
        if op == "conj":
            return conjugacy_context(group, descriptor=text)
        if op == "sym":
            return _with_descriptor(symmetric_context(group), text)
        raise ValueError(f"unknown group op {op!r}")
    if platform == "braid":
        mode = d.get("mode", "shifted")
        length = int(d.get("len", 8))
        if mode == "shifted":
            width = int(d.get("width", 3))
            ctx = build_shifted_conj(width, length)
        elif mode == "gsc":
            p = int(d["p"])
            width = int(d.get("width", p))
            if "q1" in d:
                params = BraidParams(p, int(d["q1"]), int(d["q2"]))
                a1, a2 = _word_list(d.get("alpha1", "")), _word_list(d.get("alpha2", ""))
                b1, b2 = _word_list(d.get("beta1", "")), _word_list(d.get("beta2", ""))
                if len(a1) != len(a2) or len(b1) != len(b2):
                    raise ValueError("alpha1/alpha2 and beta1/beta2 need equal list lengths")
                ctx = build_partial_multi_LD(params, list(zip(a1, a2)), list(zip(b1, b2)),
                                             bi=d.get("bi") == "1", width=width, length=length)
            else:
                ctx = build_gen_shifted_LD(p, braid.parse_word(d.get("a1", "")),
                                           braid.parse_word(d.get("a2", "")),
                                           int(d.get("sign", 1)), strict=d.get("strict", "1") != "0",
                                           width=width, length=length)
        else:
            raise ValueError(f"unknown braid mode {mode!r}")
        return _with_descriptor(ctx, text)
    raise ValueError(f"unknown platform {platform!r}")


def _with_descriptor(ctx: LDContext, text: str) -> LDContext:
    return dataclasses.replace(ctx, descriptor=text, _tables={})


# names used by the published interface
build_central_twist_multi_LD = central_twist_context
check_prop25_conditions = check_ansatz_conditions
check_prop28_conditions = check_twist_conditions


def apply(ctx: LDContext, op_index: int, x, y):
    return ctx.apply(op_index, x, y)
