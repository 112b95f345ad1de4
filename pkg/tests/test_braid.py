import random
from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

from ldkep import braid
from ldkep.braid import BraidParams, Parabolic

from artin import artin_equal, artin_images


def words(max_index=5, max_len=20):
    letters = st.integers(1, max_index).flatmap(lambda i: st.sampled_from((i, -i)))
    return st.lists(letters, max_size=max_len).map(tuple)


# -- word operations ---------------------------------------------------------

def test_concat_and_invert_basics():
    assert braid.concat((1,), (2,)) == (1, 2)
    assert braid.concat((), (3, -1)) == (3, -1)
    assert braid.concat((1, -1), ()) == (1, -1)
    assert braid.invert((1, 2)) == (-2, -1)
    assert braid.invert(()) == ()
    assert braid.invert((-3,)) == (3,)


def test_shift_and_named_elements():
    assert braid.shift((1, -2), 1) == (2, -3)
    assert braid.shift((1,), 3) == (4,)
    assert braid.delta(2) == (1,)
    assert braid.delta(4) == (3, 2, 1)
    assert braid.tau(1, 1) == (1,)
    assert braid.tau(2, 2) == (2, 1, 3, 2)
    with pytest.raises(ValueError):
        braid.delta(1)


def test_delta_permutation_sends_first_strand_to_last():
    for n in range(2, 7):
        perm = braid.permutation_of(braid.delta(n), n)
        # read as the map i -> perm[i]; 1 goes to n
        assert perm[0] == n - 1
        assert sorted(perm) == list(range(n))
        # single n-cycle
        seen, i = set(), 0
        while i not in seen:
            seen.add(i)
            i = perm[i]
        assert len(seen) == n


def test_text_codec():
    assert braid.format_word((1, -2, 3)) == "1 -2 3"
    assert braid.parse_word("1 -2 3") == (1, -2, 3)
    assert braid.parse_word("") == ()
    with pytest.raises(ValueError):
        braid.parse_word("1 0")
    with pytest.raises(ValueError):
        braid.parse_word("1 x")


@given(words())
def test_text_round_trip(w):
    assert braid.parse_word(braid.format_word(w)) == w


# -- normal form -------------------------------------------------------------

def test_normal_form_examples():
    assert braid.normal_form((1, -1), 3).is_identity
    assert braid.normal_form((1, 2, 1), 3) == braid.normal_form((2, 1, 2), 3)
    nf = braid.normal_form((1, 2, 1), 3)
    assert nf.inf == 1 and nf.factors == ()
    assert braid.equal((-2, 1, 2, 1), (1, 2))
    assert not braid.equal((1,), (2,))


def test_normal_form_rejects_out_of_range_letter():
    with pytest.raises(ValueError):
        braid.normal_form((3,), 3)


@settings(max_examples=300, deadline=None)
@given(words(), words())
def test_equality_agrees_with_artin_action(x, y):
    assert braid.equal(x, y) == artin_equal(x, y)


@settings(max_examples=200, deadline=None)
@given(words())
def test_triviality_agrees_with_artin_action(w):
    n = braid.strands_for(w)
    assert braid.normal_form(w, n).is_identity == (artin_images(w, n) == artin_images((), n))


@settings(max_examples=200, deadline=None)
@given(words())
def test_normal_form_is_idempotent(w):
    n = braid.strands_for(w)
    nf = braid.normal_form(w, n)
    assert braid.normal_form(nf.word(), n) == nf


@settings(max_examples=200, deadline=None)
@given(words())
def test_normal_form_factors_are_left_weighted_and_proper(w):
    n = braid.strands_for(w)
    nf = braid.normal_form(w, n)
    ident = tuple(range(n))
    full = tuple(range(n - 1, -1, -1))
    for f in nf.factors:
        assert f != ident and f != full
    for a, b in zip(nf.factors, nf.factors[1:]):
        assert braid.starting_set(b) <= braid.finishing_set(a)


def _rewrite_once(w, rng):
    """Apply one braid relation somewhere in ``w`` (or insert a cancelling pair)."""
    w = list(w)
    spots = []
    for k in range(len(w) - 1):
        a, b = w[k], w[k + 1]
        if a * b > 0 and abs(abs(a) - abs(b)) >= 2:
            spots.append(("swap", k))
    for k in range(len(w) - 2):
        a, b, c = w[k:k + 3]
        if a == c and a > 0 and b > 0 and abs(a - b) == 1:
            spots.append(("braid", k))
    if not spots:
        i = rng.randint(1, 5)
        k = rng.randint(0, len(w))
        return tuple(w[:k] + [i, -i] + w[k:])
    kind, k = rng.choice(spots)
    if kind == "swap":
        w[k], w[k + 1] = w[k + 1], w[k]
    else:
        a, b = w[k], w[k + 1]
        w[k:k + 3] = [b, a, b]
    return tuple(w)


def test_normal_form_soundness_under_relation_rewrites():
    rng = random.Random(7)
    for _ in range(500):
        w = braid.random_word(rng, rng.randint(0, 30), 5)
        v = _rewrite_once(w, rng)
        assert braid.normal_form(braid.concat(w, braid.invert(v)), 6).is_identity


@settings(max_examples=100, deadline=None)
@given(words())
def test_canonical_word_represents_the_same_braid(w):
    c = braid.canonical_word(w)
    assert artin_equal(w, c, braid.strands_for(w, c))
    assert braid.canonical_word(c) == c


@settings(max_examples=100, deadline=None)
@given(words(), words())
def test_canonical_word_is_a_complete_invariant(x, y):
    assert (braid.canonical_word(x) == braid.canonical_word(y)) == braid.equal(x, y)


def test_equality_is_inclusion_stable():
    rng = random.Random(3)
    for _ in range(50):
        w = braid.random_word(rng, 12, 3)
        n = braid.strands_for(w)
        assert braid.normal_form(w, n).is_identity == braid.normal_form(w, n + 3).is_identity


# -- shift and distinguished elements ---------------------------------------

def test_shift_is_an_injective_homomorphism():
    rng = random.Random(11)
    for _ in range(200):
        x, y = braid.random_word(rng, 10, 4), braid.random_word(rng, 10, 4)
        assert braid.equal(braid.shift(braid.concat(x, y)), braid.concat(braid.shift(x), braid.shift(y)))
        assert braid.equal(braid.shift(x), braid.shift(y)) == braid.equal(x, y)


@pytest.mark.parametrize("p", [1, 2, 3])
def test_tau_satisfies_the_braid_type_relation(p):
    a = braid.tau(p, p)
    sa = braid.shift(a, p)
    assert braid.equal(braid.concat(a, sa, a), braid.concat(sa, a, sa))
    ai, sai = braid.invert(a), braid.shift(braid.invert(a), p)
    assert braid.equal(braid.concat(ai, sai, ai), braid.concat(sai, ai, sai))


def test_elements_of_B_2p_commute_with_far_shifts():
    rng = random.Random(5)
    for p in (1, 2, 3):
        for _ in range(30):
            a = braid.random_word(rng, 8, 2 * p - 1)
            x = braid.random_word(rng, 8, 4)
            sx = braid.shift(x, 2 * p)
            assert braid.equal(braid.concat(a, sx), braid.concat(sx, a))


def test_tau_transports_B_p_to_its_shift():
    rng = random.Random(9)
    for p in (2, 3, 4):
        t = braid.tau(p, p)
        for _ in range(30):
            b2 = braid.random_word(rng, 8, p - 1)
            assert braid.equal(braid.concat(t, b2), braid.concat(braid.shift(b2, p), t))


def test_equality_is_a_congruence():
    rng = random.Random(13)
    for _ in range(100):
        x = braid.random_word(rng, 8, 3)
        y = braid.canonical_word(x)
        z = braid.normal_form(x).word()
        w = braid.random_word(rng, 5, 3)
        assert braid.equal(x, x)
        assert braid.equal(x, y) and braid.equal(y, x)
        assert braid.equal(y, z) and braid.equal(x, z)
        assert braid.equal(braid.concat(x, w), braid.concat(z, w))
        assert braid.equal(braid.concat(w, x), braid.concat(w, y))


# -- permutations and pure braids -------------------------------------------

def test_permutation_image_examples():
    assert braid.permutation_of((1,), 3) == (1, 0, 2)
    assert braid.permutation_of((), 3) == (0, 1, 2)
    assert braid.permutation_of((1, 1), 3) == (0, 1, 2)
    with pytest.raises(ValueError):
        braid.permutation_of((3,), 3)


def test_pure_generators():
    assert braid.pure_gen(1, 2) == (1, 1)
    assert braid.pure_gen(1, 3) == (2, 1, 1, -2)
    for j in range(2, 6):
        for i in range(1, j):
            assert braid.permutation_of(braid.pure_gen(i, j), 6) == tuple(range(6))
    with pytest.raises(ValueError):
        braid.pure_gen(2, 2)


def test_erase_last_strands_examples():
    assert braid.erase_last_strands((1, 1), 3, 1) == (1, 1)
    assert braid.erase_last_strands((2, 2), 3, 1) == ()
    with pytest.raises(ValueError):
        braid.erase_last_strands((2,), 3, 1)


@pytest.mark.parametrize("d", [1, 2])
def test_erasing_strands_is_a_homomorphism_on_pure_braids(d):
    rng = random.Random(17 + d)
    for _ in range(100):
        u, v = braid.random_pure(rng, 4, 4), braid.random_pure(rng, 4, 4)
        lhs = braid.erase_last_strands(braid.concat(u, v), 4, d)
        rhs = braid.concat(braid.erase_last_strands(u, 4, d), braid.erase_last_strands(v, 4, d))
        assert artin_equal(lhs, rhs, 4 - d)


def test_erasing_respects_braid_equality():
    rng = random.Random(23)
    for _ in range(100):
        u = braid.random_pure(rng, 4, 4)
        v = braid.canonical_word(u)
        if max(map(abs, v), default=0) < 4:
            assert artin_equal(braid.erase_last_strands(u, 4, 1), braid.erase_last_strands(v, 4, 1), 3)


# -- sampling ----------------------------------------------------------------

def test_random_word_contract():
    assert braid.random_word(1, 0, 3) == ()
    assert braid.random_word(99, 20, 4) == braid.random_word(99, 20, 4)
    assert all(1 <= abs(x) <= 4 for x in braid.random_word(5, 200, 4))


def test_random_word_letters_are_uniform():
    w = braid.random_word(2024, 100_000, 4)
    counts = Counter(w)
    expected = len(w) / 8
    chi2 = sum((counts[x] - expected) ** 2 / expected for x in (1, -1, 2, -2, 3, -3, 4, -4))
    # 7 degrees of freedom; 24.3 is the 0.1% critical value
    assert set(counts) == {1, -1, 2, -2, 3, -3, 4, -4}
    assert chi2 < 24.3


# -- parameters ----------------------------------------------------------------

def test_braid_params_bounds():
    bp = BraidParams(7, 3, 4)
    assert bp.N == 14
    for bad in [(7, 1, 4), (7, 4, 4), (7, 3, 7), (7, 2, 4), (7, 3, 5)]:
        with pytest.raises(ValueError):
            BraidParams(*bad)
    with pytest.raises(ValueError):
        BraidParams(7, 3, 4, N=13)
    assert BraidParams(5, 2, 3, strict=False).N == 10


def test_parabolic_windows():
    sub = Parabolic(3, 4)
    assert list(sub.generators) == [4, 5, 6]
    assert sub.contains((4, -6, 5)) and sub.contains(())
    assert not sub.contains((3,)) and not sub.contains((7,))
    assert sub.contains(sub.sample(random.Random(0), 20))
