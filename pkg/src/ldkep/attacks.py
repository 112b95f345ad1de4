"""Brute-force key recovery on finite platforms, SCCP search, and the SDP to SCCP transform.

Every oracle enumerates in a fixed order and returns the first hit, so the
pipelines are reproducible.  Submagma closures are built breadth-first by
tree size, which makes the stored tree for each element a minimal witness.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Any, Sequence

from . import braid
from .braid import BraidParams, Parabolic, Word
from .ldsys import LDContext
from .perms import PermGroup
from .protocol import PublicParams, SharedKey, Transcript, make_key
from .treeword import Leaf, Node, Tree, leaves, map_leaves_eval

DEFAULT_CAP = 100_000


class SearchExhausted(LookupError):
    """No solution inside the enumerated space."""


# -- submagma closure -------------------------------------------------------

@dataclass
class Closure:
    """Elements of a submagma, each with a minimal tree over the basis."""

    elements: list
    trees: list[Tree]
    complete: bool

    def __len__(self) -> int:
        return len(self.elements)


def submagma_closure(ctx: LDContext, basis: Sequence, ops: Sequence[int],
                     cap: int = DEFAULT_CAP, max_size: int | None = None,
                     target=None) -> Closure:
    """Breadth-first closure by leaf count.

    Only elements first reached at a level are combined further: subtrees of a
    minimal tree are minimal, so nothing is lost.  Stops early once ``target``
    appears.
    """
    seen: dict = {}
    elements: list = []
    trees: list[Tree] = []
    levels: list[list[int]] = [[]]

    def add(x, tree) -> bool:
        k = ctx.key(x)
        if k in seen:
            return False
        seen[k] = len(elements)
        elements.append(x)
        trees.append(tree)
        if len(elements) > cap:
            raise SearchExhausted(f"submagma closure exceeds cap of {cap} elements")
        return True

    first = []
    for g, x in enumerate(basis):
        if add(x, Leaf(g)):
            first.append(len(elements) - 1)
    levels.append(first)
    target_key = None if target is None else ctx.key(target)

    def done() -> bool:
        return target_key is not None and target_key in seen

    size = 1
    while not done():
        size += 1
        if max_size is not None and size > max_size:
            return Closure(elements, trees, False)
        new = []
        for i in range(1, size):
            for li in levels[i]:
                for ri in levels[size - i]:
                    for op in ops:
                        if add(ctx.apply(op, elements[li], elements[ri]), Node(op, trees[li], trees[ri])):
                            new.append(len(elements) - 1)
        levels.append(new)
        if not new and _is_closed(ctx, elements, ops, seen):
            break
    return Closure(elements, trees, not done() or _is_closed(ctx, elements, ops, seen))


def _is_closed(ctx: LDContext, elements: list, ops: Sequence[int], seen: dict) -> bool:
    return all(ctx.key(ctx.apply(op, x, y)) in seen for x in elements for y in elements for op in ops)


def membership_search(ctx: LDContext, basis: Sequence, target, ops: Sequence[int] | None = None,
                      cap: int = DEFAULT_CAP) -> Tree:
    """Minimal tree over ``basis`` evaluating to ``target``."""
    ops = tuple(ctx.side("AB") if ops is None else ops) or (0,)
    closure = submagma_closure(ctx, basis, ops, cap, target=target)
    key = ctx.key(target)
    for x, tree in zip(closure.elements, closure.trees):
        if ctx.key(x) == key:
            return tree
    raise SearchExhausted("target is not in the submagma generated by the basis")


# -- LD search oracles ------------------------------------------------------

@dataclass(frozen=True)
class PseudoKey:
    """A solution to one of the search problems.

    ``element`` and ``op`` form the left multiplication x -> element *op x;
    ``aux`` holds a'_0 for the modified problem.
    """

    element: Any
    op: int
    aux: Any = None
    tried: int = 0


def _require_finite(ctx: LDContext) -> None:
    if not ctx.is_finite:
        raise ValueError("brute-force oracles need a finite carrier; braid platforms are out of reach")


def brute_simldp(ctx: LDContext, pairs: Sequence[tuple], ops: Sequence[int],
                 candidates: Sequence | None = None) -> PseudoKey:
    """First (b', op) in candidate order, then op order, with b' *op s_i = s'_i for all pairs."""
    if candidates is None:
        _require_finite(ctx)
        candidates = ctx.elements
    tried = 0
    for b in candidates:
        for op in ops:
            tried += 1
            if all(ctx.eq(ctx.apply(op, b, s), s2) for s, s2 in pairs):
                return PseudoKey(b, op, tried=tried)
    raise SearchExhausted(f"no solution among {tried} candidates")


def brute_modsimldp(ctx: LDContext, pairs: Sequence[tuple], p0, ops: Sequence[int],
                    a0_candidates: Sequence | None = None) -> PseudoKey:
    """First (a', op, a'_0) with a' *op t_i = t'_i and a' *op a'_0 = p0."""
    _require_finite(ctx)
    a0_candidates = ctx.elements if a0_candidates is None else a0_candidates
    tried = 0
    for a in ctx.elements:
        for op in ops:
            tried += 1
            if not all(ctx.eq(ctx.apply(op, a, t), t2) for t, t2 in pairs):
                continue
            for a0 in a0_candidates:
                tried += 1
                if ctx.eq(ctx.apply(op, a, a0), p0):
                    return PseudoKey(a, op, a0, tried)
    raise SearchExhausted(f"no solution after {tried} checks")


# -- key recovery pipelines -------------------------------------------------

@dataclass
class AttackReport:
    pipeline: str
    key: SharedKey
    oracle_calls: list[str] = field(default_factory=list)
    search_sizes: dict[str, int] = field(default_factory=dict)


def _pairs(basis: Sequence, images: Sequence) -> list[tuple]:
    return list(zip(basis, images))


def _closure_B(params: PublicParams, cap: int) -> Closure:
    return submagma_closure(params.ctx, params.basis_B, params.ops_B, cap)


def _closure_A(params: PublicParams, cap: int) -> Closure:
    return submagma_closure(params.ctx, params.basis_A, params.ops_A, cap)


def pipeline_A(transcript: Transcript, params: PublicParams, cap: int = DEFAULT_CAP) -> AttackReport:
    """Pseudo-key b' in S_B for Bob, a tree for b', then T'(a * u_j) *beta' p0."""
    ctx = params.ctx
    _require_finite(ctx)
    s_images, t_images, p0 = transcript.msg_B, transcript.msg_A[:-1], transcript.msg_A[-1]
    closure_B = _closure_B(params, cap)
    bk = brute_simldp(ctx, _pairs(params.basis_A, s_images), params.ops_B, closure_B.elements)
    tree = membership_search(ctx, params.basis_B, bk.element, params.ops_B, cap)
    a_b = map_leaves_eval(tree, [t_images[g] for g in leaves(tree)], ctx)
    key = make_key(ctx, ctx.apply(bk.op, a_b, p0))
    return AttackReport("A", key, ["simLDP over S_B", "MSP for S_B"],
                        {"S_B": len(closure_B), "simLDP": bk.tried, "tree_leaves": tree.size})


def pipeline_B(transcript: Transcript, params: PublicParams, cap: int = DEFAULT_CAP) -> AttackReport:
    """Pseudo-key (a', alpha', a'_0 in S_A) for Alice, a tree for a'_0, then a' *alpha' T(b * r_i)."""
    ctx = params.ctx
    _require_finite(ctx)
    s_images, t_images, p0 = transcript.msg_B, transcript.msg_A[:-1], transcript.msg_A[-1]
    closure_A = _closure_A(params, cap)
    ak = brute_modsimldp(ctx, _pairs(params.basis_B, t_images), p0, params.ops_A, closure_A.elements)
    tree = membership_search(ctx, params.basis_A, ak.aux, params.ops_A, cap)
    b_a0 = map_leaves_eval(tree, [s_images[g] for g in leaves(tree)], ctx)
    key = make_key(ctx, ctx.apply(ak.op, ak.element, b_a0))
    return AttackReport("B", key, ["modsimLDP with a'_0 in S_A", "MSP for S_A"],
                        {"S_A": len(closure_A), "modsimLDP": ak.tried, "tree_leaves": tree.size})


def pipeline_C(transcript: Transcript, params: PublicParams, cap: int = DEFAULT_CAP) -> AttackReport:
    """(a' *alpha' b') *beta' p0 from two LD searches, no membership search."""
    ctx = params.ctx
    _require_finite(ctx)
    s_images, t_images, p0 = transcript.msg_B, transcript.msg_A[:-1], transcript.msg_A[-1]
    ak = brute_simldp(ctx, _pairs(params.basis_B, t_images), params.ops_A)
    closure_B = _closure_B(params, cap)
    bk = brute_simldp(ctx, _pairs(params.basis_A, s_images), params.ops_B, closure_B.elements)
    key = make_key(ctx, ctx.apply(bk.op, ctx.apply(ak.op, ak.element, bk.element), p0))
    return AttackReport("C", key, ["simLDP over L for Alice", "simLDP over S_B for Bob"],
                        {"S_B": len(closure_B), "simLDP_A": ak.tried, "simLDP_B": bk.tried})


def pipeline_D(transcript: Transcript, params: PublicParams, cap: int = DEFAULT_CAP) -> AttackReport:
    """a' *alpha' (b' *beta' a'_0) from a modified and a plain LD search."""
    ctx = params.ctx
    _require_finite(ctx)
    s_images, t_images, p0 = transcript.msg_B, transcript.msg_A[:-1], transcript.msg_A[-1]
    bk = brute_simldp(ctx, _pairs(params.basis_A, s_images), params.ops_B)
    closure_A = _closure_A(params, cap)
    ak = brute_modsimldp(ctx, _pairs(params.basis_B, t_images), p0, params.ops_A, closure_A.elements)
    key = make_key(ctx, ctx.apply(ak.op, ak.element, ctx.apply(bk.op, bk.element, ak.aux)))
    return AttackReport("D", key, ["simLDP over L for Bob", "modsimLDP with a'_0 in S_A"],
                        {"S_A": len(closure_A), "simLDP_B": bk.tried, "modsimLDP": ak.tried})


PIPELINES = {"A": pipeline_A, "B": pipeline_B, "C": pipeline_C, "D": pipeline_D}


# -- subgroup conjugacy coset problem --------------------------------------

@dataclass(frozen=True)
class SCCPInstance:
    """Find h in H and c in K with c x c^-1 = h y."""

    group: PermGroup
    H: PermGroup
    K: PermGroup
    x: tuple
    y: tuple


def verify_sccp(inst: SCCPInstance, h, c) -> bool:
    g = inst.group
    return h in inst.H and c in inst.K and g.mul(g.mul(c, inst.x), g.inv(c)) == g.mul(h, inst.y)


def sccp_brute(inst: SCCPInstance) -> tuple:
    """First solution in (h, c) order over the sorted subgroup elements.

    Each c fixes h = c x c^-1 y^-1, so one pass over K suffices; the smallest
    (index of h, index of c) is the h-major first hit.
    """
    g = inst.group
    y_inv = g.inv(inst.y)
    best = None
    for ci, c in enumerate(inst.K.elements):
        h = g.mul(g.mul(g.mul(c, inst.x), g.inv(c)), y_inv)
        if h in inst.H:
            cand = (inst.H.index(h), ci)
            if best is None or cand < best:
                best = cand
    if best is None:
        raise SearchExhausted("x^K does not meet the coset H y")
    return inst.H.elements[best[0]], inst.K.elements[best[1]]


def plant_sccp(group: PermGroup, H: PermGroup, K: PermGroup, rng: random.Random) -> tuple[SCCPInstance, tuple, tuple]:
    """Random instance with a known solution (h, c)."""
    x, h, c = group.sample(rng), H.sample(rng), K.sample(rng)
    y = group.mul(group.inv(h), group.mul(group.mul(c, x), group.inv(c)))
    return SCCPInstance(group, H, K, x, y), h, c


# -- SDP to SCCP in braid groups --------------------------------------------

@dataclass(frozen=True)
class SCCPTransform:
    """x = tau_{p,N-p}^-1 s', y = d^p(tau_{p,N-2p}^-1 s); H = d^{q1}(B_{p-q1}) d^{N-p+q2}(B_{p-q2}), K = B_{N-p}."""

    N: int
    x: Word
    y: Word
    H: tuple[Parabolic, Parabolic]
    K: Parabolic


def minimal_N(s: Word, s_prime: Word, p: int) -> int:
    return max(2 * p, braid.max_index(s_prime) + 1, braid.max_index(s) + p + 1)


def sdp_to_sccp(s: Word, s_prime: Word, params: BraidParams, N: int | None = None) -> SCCPTransform:
    p = params.p
    N = minimal_N(s, s_prime, p) if N is None else N
    if N < 2 * p:
        raise ValueError(f"N={N} < 2p={2 * p}: only N >= 2p is supported")
    if N < minimal_N(s, s_prime, p):
        raise ValueError(f"N={N} does not cover the instance")
    x = braid.concat(braid.invert(braid.tau(p, N - p)), s_prime)
    y = braid.shift(braid.concat(braid.invert(braid.tau(p, N - 2 * p)), s), p)
    H = (Parabolic(params.q1, p - params.q1), Parabolic(N - p + params.q2, p - params.q2))
    return SCCPTransform(N, x, y, H, Parabolic(0, N - p))


@dataclass(frozen=True)
class SDPInstance:
    """s' = d^p(b^-1) beta1 tau_{p,p} beta2 d^p(s) b with b, s in B_{N-p}."""

    params: BraidParams
    b: Word
    beta1: Word
    beta2: Word
    s: Word
    s_prime: Word


def sdp_image(params: BraidParams, b: Word, beta1: Word, beta2: Word, s: Word) -> Word:
    p = params.p
    return braid.concat(braid.shift(braid.invert(b), p), beta1, braid.tau(p, p), beta2,
                        braid.shift(s, p), b)


def random_sdp_instance(params: BraidParams, rng: random.Random, extra: int = 0,
                        length: int = 10) -> SDPInstance:
    """b and s use sigma_1..sigma_{p+extra-1}, so the target ambient group is B_{2p+extra}."""
    width = params.p + extra - 1
    b = braid.random_word(rng, length, width) if width >= 1 else ()
    s = braid.random_word(rng, length, width) if width >= 1 else ()
    dom1 = Parabolic(params.q2, params.p - params.q2)
    dom2 = Parabolic(params.q1, params.p - params.q1)
    beta1, beta2 = dom1.sample(rng, length // 2), dom2.sample(rng, length // 2)
    return SDPInstance(params, b, beta1, beta2, s, sdp_image(params, b, beta1, beta2, s))


@dataclass
class TransformCheck:
    N: int
    identity_holds: bool
    ranges_hold: bool

    @property
    def ok(self) -> bool:
        return self.identity_holds and self.ranges_hold


def beta_tilde(params: BraidParams, N: int, beta1: Word, beta2: Word) -> tuple[Word, Word]:
    return braid.shift(beta1, N - params.p), tuple(beta2)


def verify_transform(inst: SDPInstance, N: int | None = None) -> TransformCheck:
    """b x b^-1 == beta~ y with beta~ = d^{N-p}(beta1) beta2, and beta~ inside H."""
    t = sdp_to_sccp(inst.s, inst.s_prime, inst.params, N)
    f1, f2 = beta_tilde(inst.params, t.N, inst.beta1, inst.beta2)
    lhs = braid.concat(inst.b, t.x, braid.invert(inst.b))
    rhs = braid.concat(f1, f2, t.y)
    ranges = t.H[1].contains(f1) and t.H[0].contains(f2) and t.K.contains(inst.b)
    return TransformCheck(t.N, braid.equal(lhs, rhs), ranges)
