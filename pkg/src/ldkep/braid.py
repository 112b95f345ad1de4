"""Braid words, Garside left normal forms and the shift endomorphism.

A braid word is a tuple of nonzero ints: ``+i`` stands for sigma_i and ``-i``
for its inverse.  Words live in B_infinity; any operation that needs an
ambient group embeds them into the smallest adequate B_N.

Simple braids (permutation braids) are stored as 0-based image tuples
``arr`` where ``arr[pos]`` is the strand sitting at ``pos`` after the braid
is applied.  In this encoding the permutation of a product is the
composition ``perm(uv)[i] == perm(u)[perm(v)[i]]``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from numba import njit

Word = tuple[int, ...]


def as_word(letters: Iterable[int]) -> Word:
    word = tuple(int(x) for x in letters)
    if any(x == 0 for x in word):
        raise ValueError("braid letters must be nonzero")
    return word


def parse_word(text: str) -> Word:
    """Parse ``"1 -2 3"`` into a word; the empty string is the identity."""
    try:
        return as_word(text.split())
    except ValueError as exc:
        raise ValueError(f"bad braid text {text!r}: {exc}") from None


def format_word(word: Sequence[int]) -> str:
    return " ".join(str(x) for x in word)


def max_index(word: Sequence[int]) -> int:
    return max((abs(x) for x in word), default=0)


def strands_for(*words: Sequence[int]) -> int:
    """Smallest N >= 2 such that every word fits in B_N."""
    return max(2, max((max_index(w) for w in words), default=0) + 1)


# -- word operations -------------------------------------------------------

def concat(*words: Sequence[int]) -> Word:
    out: list[int] = []
    for w in words:
        out.extend(w)
    return tuple(out)


def invert(word: Sequence[int]) -> Word:
    return tuple(-x for x in reversed(word))


def shift(word: Sequence[int], p: int = 1) -> Word:
    """Apply the shift endomorphism sigma_i -> sigma_{i+p}."""
    if p < 0:
        raise ValueError("shift amount must be non-negative")
    return tuple(x + p if x > 0 else x - p for x in word)


def free_reduce(word: Sequence[int]) -> Word:
    out: list[int] = []
    for x in word:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def delta(n: int) -> Word:
    """delta_n = sigma_{n-1} ... sigma_2 sigma_1."""
    if n < 2:
        raise ValueError("delta_n needs n >= 2")
    return tuple(range(n - 1, 0, -1))


def tau(p: int, q: int) -> Word:
    """tau_{p,q} = delta_{p+1} d(delta_{p+1}) ... d^{q-1}(delta_{p+1}).

    ``q == 0`` gives the empty product.
    """
    if p < 1 or q < 0:
        raise ValueError("tau needs p >= 1 and q >= 0")
    base = delta(p + 1)
    return concat(*(shift(base, k) for k in range(q)))


def half_twist(n: int) -> Word:
    """A positive word for Delta_n."""
    return concat(*(delta(k) for k in range(2, n + 1)))


def pure_gen(i: int, j: int) -> Word:
    """Standard pure braid generator A_{i,j}."""
    if not 1 <= i < j:
        raise ValueError("pure_gen needs 1 <= i < j")
    down = tuple(range(j - 1, i, -1))
    return concat(down, (i, i), invert(down))


def random_word(seed: int | random.Random, length: int, max_index: int) -> Word:
    if length < 0 or max_index < 1:
        raise ValueError("need length >= 0 and max_index >= 1")
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    return tuple(rng.randint(1, max_index) * rng.choice((1, -1)) for _ in range(length))


def random_pure(seed: int | random.Random, count: int, n: int) -> Word:
    """Product of ``count`` random pure generators (and inverses) of P_n."""
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    out: list[int] = []
    for _ in range(count):
        i = rng.randint(1, n - 1)
        j = rng.randint(i + 1, n)
        g = pure_gen(i, j)
        out.extend(g if rng.random() < 0.5 else invert(g))
    return tuple(out)


# -- permutations ----------------------------------------------------------

def permutation_of(word: Sequence[int], n: int | None = None) -> tuple[int, ...]:
    """Image in S_N under sigma_i -> (i, i+1), as a 0-based image tuple."""
    n = strands_for(word) if n is None else n
    arr = list(range(n))
    for x in word:
        i = abs(x)
        if i >= n:
            raise ValueError(f"letter {x} does not fit in B_{n}")
        arr[i - 1], arr[i] = arr[i], arr[i - 1]
    return tuple(arr)


def erase_last_strands(word: Sequence[int], n: int, d: int) -> Word:
    """Pull out the strands that start at positions n-d+1 .. n."""
    if not 1 <= d < n:
        raise ValueError("need 1 <= d < n")
    perm = permutation_of(word, n)
    keep = n - d
    if any(perm[pos] < keep for pos in range(keep, n)):
        raise ValueError("braid does not stabilise the erased strands")
    arr = list(range(n))
    out: list[int] = []
    for x in word:
        i = abs(x)
        lo, hi = arr[i - 1], arr[i]
        if lo < keep and hi < keep:
            idx = sum(1 for s in arr[:i] if s < keep)
            out.append(idx if x > 0 else -idx)
        arr[i - 1], arr[i] = hi, lo
    return tuple(out)


# -- Garside normal form ---------------------------------------------------

@dataclass(frozen=True)
class GarsideNormalForm:
    strands: int
    inf: int
    factors: tuple[tuple[int, ...], ...]

    @property
    def is_identity(self) -> bool:
        return self.inf == 0 and not self.factors

    def word(self) -> Word:
        """Spell Delta^inf A_1 ... A_k letter by letter."""
        d = half_twist(self.strands)
        head = d * self.inf if self.inf >= 0 else invert(d) * -self.inf
        return concat(head, *(simple_word(f) for f in self.factors))


def _is_delta(arr: Sequence[int]) -> bool:
    n = len(arr)
    return all(arr[i] == n - 1 - i for i in range(n))


def _flip(arr: Sequence[int]) -> list[int]:
    # conjugation by Delta: sigma_i <-> sigma_{n-i}
    n = len(arr)
    return [n - 1 - arr[n - 1 - i] for i in range(n)]


def _inverse(arr: Sequence[int]) -> list[int]:
    inv = [0] * len(arr)
    for pos, s in enumerate(arr):
        inv[s] = pos
    return inv


def starting_set(arr: Sequence[int]) -> set[int]:
    inv = _inverse(arr)
    return {i for i in range(1, len(arr)) if inv[i - 1] > inv[i]}


def finishing_set(arr: Sequence[int]) -> set[int]:
    return {i for i in range(1, len(arr)) if arr[i - 1] > arr[i]}


def simple_word(arr: Sequence[int]) -> Word:
    """Positive word for a permutation braid (peels the lowest right descent)."""
    a = list(arr)
    out: list[int] = []
    while True:
        for i in range(1, len(a)):
            if a[i - 1] > a[i]:
                a[i - 1], a[i] = a[i], a[i - 1]
                out.append(i)
                break
        else:
            break
    return tuple(reversed(out))


@njit(cache=True)
def _sweep(chunks: np.ndarray) -> tuple[np.ndarray, int]:
    """Left-normal form of a product of positive simple factors.

    Each appended factor is left-weighted against its predecessors from right
    to left, stopping at the first pair that is already left-weighted.
    """
    m, n = chunks.shape
    fac = np.empty((m, n), dtype=np.int64)
    inv = np.empty((m, n), dtype=np.int64)
    count = 0
    for c in range(m):
        for pos in range(n):
            fac[count, pos] = chunks[c, pos]
            inv[count, chunks[c, pos]] = pos
        count += 1
        j = count - 1
        while j > 0:
            a = j - 1
            moved = False
            i = 1
            while i < n:
                # sigma_i starts b but does not finish a: move it across
                if inv[j, i - 1] > inv[j, i] and fac[a, i - 1] < fac[a, i]:
                    x = fac[a, i - 1]
                    y = fac[a, i]
                    fac[a, i - 1] = y
                    fac[a, i] = x
                    inv[a, x] = i
                    inv[a, y] = i - 1
                    p = inv[j, i - 1]
                    q = inv[j, i]
                    fac[j, p] = i
                    fac[j, q] = i - 1
                    inv[j, i - 1] = q
                    inv[j, i] = p
                    moved = True
                    i = i - 1 if i > 1 else 1
                else:
                    i += 1
            if not moved:
                break
            j -= 1
        # drop trailing identities
        while count > 0:
            ident = True
            for pos in range(n):
                if fac[count - 1, pos] != pos:
                    ident = False
                    break
            if not ident:
                break
            count -= 1
    return fac, count


def _chunks(word: Sequence[int], n: int) -> tuple[int, list[list[int]]]:
    """Rewrite ``word`` as Delta^-k times a product of positive simple factors."""
    # each entry: (arr, number of Delta^-1 emitted before it)
    raw: list[tuple[list[int], int]] = []
    k = 0
    cur: list[int] | None = None
    cur_inv: list[int] | None = None
    cur_sign = 0
    for x in word:
        i = abs(x)
        if i >= n:
            raise ValueError(f"letter {x} does not fit in B_{n}")
        if x > 0:
            if cur_sign == 1 and cur[i - 1] < cur[i]:
                cur[i - 1], cur[i] = cur[i], cur[i - 1]
                continue
            if cur_sign == 1:
                raw.append((cur, k))
            elif cur_sign == -1:
                raw.append((_neg_chunk(cur_inv), k))
            cur = list(range(n))
            cur[i - 1], cur[i] = i, i - 1
            cur_sign = 1
        else:
            # negative run P^{-1}; grow P on the left while it stays simple
            if cur_sign == -1 and cur_inv[i - 1] < cur_inv[i]:
                p, q = cur_inv[i - 1], cur_inv[i]
                cur[p], cur[q] = i, i - 1
                cur_inv[i - 1], cur_inv[i] = q, p
                continue
            if cur_sign == 1:
                raw.append((cur, k))
            elif cur_sign == -1:
                raw.append((_neg_chunk(cur_inv), k))
            k += 1
            cur = list(range(n))
            cur[i - 1], cur[i] = i, i - 1
            cur_inv = list(cur)
            cur_sign = -1
    if cur_sign == 1:
        raw.append((cur, k))
    elif cur_sign == -1:
        raw.append((_neg_chunk(cur_inv), k))
    factors = [_flip(arr) if (k - before) % 2 else arr for arr, before in raw]
    return k, factors


def _neg_chunk(p_inv: Sequence[int]) -> list[int]:
    # P^{-1} = Delta^{-1} (Delta P^{-1}); perm(Delta P^{-1}) = rev o perm(P)^{-1}
    n = len(p_inv)
    return [n - 1 - p_inv[pos] for pos in range(n)]


def normal_form(word: Sequence[int], n: int | None = None) -> GarsideNormalForm:
    """Left-greedy Garside normal form of ``word`` in B_n."""
    n = strands_for(word) if n is None else n
    if n < 2:
        raise ValueError("need at least 2 strands")
    k, chunks = _chunks(word, n)
    if not chunks:
        return GarsideNormalForm(n, -k, ())
    fac, count = _sweep(np.array(chunks, dtype=np.int64))
    factors = [tuple(int(v) for v in fac[r]) for r in range(count)]
    lead = 0
    while lead < len(factors) and _is_delta(factors[lead]):
        lead += 1
    return GarsideNormalForm(n, lead - k, tuple(factors[lead:]))


def equal(x: Sequence[int], y: Sequence[int]) -> bool:
    n = strands_for(x, y)
    return normal_form(x, n) == normal_form(y, n)


def is_trivial(x: Sequence[int]) -> bool:
    return normal_form(x).is_identity


def commute(x: Sequence[int], y: Sequence[int]) -> bool:
    return equal(concat(x, y), concat(y, x))


# -- canonical representatives --------------------------------------------

def _fraction_word(nf: GarsideNormalForm) -> Word:
    # Delta^-k A_1..A_r  ->  tau^{k-1}(C_1)^-1 ... tau^{k-j}(C_j)^-1 Delta^-(k-r) A_{k+1}..A_r
    # with C_j the right complement of A_j (A_j C_j = Delta).
    n = nf.strands
    if nf.inf >= 0:
        return nf.word()
    k = -nf.inf
    rev = list(range(n - 1, -1, -1))
    out: list[int] = []
    for j, a in enumerate(nf.factors[:k]):
        # perm(C) = perm(A)^-1 o rev
        ainv = _inverse(a)
        c = [ainv[rev[pos]] for pos in range(n)]
        if (k - 1 - j) % 2:
            c = _flip(c)
        out.extend(invert(simple_word(c)))
    r = len(nf.factors)
    if k > r:
        out.extend(invert(half_twist(n)) * (k - r))
    for a in nf.factors[k:]:
        out.extend(simple_word(a))
    return tuple(out)


def canonical(word: Sequence[int]) -> tuple[int, GarsideNormalForm, Word]:
    """(N, normal form in B_N, canonical word) with N minimal for the element.

    The canonical word is the left fraction spelled from the normal form; its
    letters only use generators of the smallest B_N containing the element,
    so shrinking N until it stabilises gives an intrinsic representative.
    """
    n = strands_for(word)
    nf = normal_form(word, n)
    spelled = _fraction_word(nf)
    while strands_for(spelled) < n:
        n = strands_for(spelled)
        nf = normal_form(spelled, n)
        spelled = _fraction_word(nf)
    return n, nf, spelled


def canonical_word(word: Sequence[int]) -> Word:
    return canonical(word)[2]


# -- parameters of the partial multi-LD platform ---------------------------

@dataclass(frozen=True)
class BraidParams:
    """Shift amount ``p``, parabolic bounds ``q1 < q2`` and ambient strand count ``N``.

    ``strict`` enforces the sizing bounds q1 >= 3 and p - q2 >= 3 on top of
    the ordering 1 < q1 < q2 < p.
    """

    p: int
    q1: int
    q2: int
    N: int = 0
    strict: bool = True

    def __post_init__(self):
        if self.N == 0:
            object.__setattr__(self, "N", 2 * self.p)
        if not 1 < self.q1 < self.q2 < self.p:
            raise ValueError("need 1 < q1 < q2 < p")
        if self.strict and (self.q1 < 3 or self.p - self.q2 < 3):
            raise ValueError("need q1 >= 3 and p - q2 >= 3")
        if self.N < 2 * self.p:
            raise ValueError("need N >= 2p")


@dataclass(frozen=True)
class Parabolic:
    """Standard parabolic subgroup d^shift(B_size), generated by sigma_{shift+1} .. sigma_{shift+size-1}."""

    shift: int
    size: int

    @property
    def generators(self) -> range:
        return range(self.shift + 1, self.shift + self.size)

    def contains(self, word: Sequence[int]) -> bool:
        """Syntactic membership: every letter uses an allowed generator."""
        return all(self.shift < abs(x) < self.shift + self.size for x in word)

    def sample(self, rng: random.Random, length: int) -> Word:
        if self.size < 2:
            return ()
        return shift(random_word(rng, length, self.size - 1), self.shift)

    def __str__(self) -> str:
        return f"d^{self.shift}(B_{self.size})" if self.shift else f"B_{self.size}"
