"""Two-pool key establishment over an :class:`LDContext`.

Alice owns the ``A`` operations and the basis ``s_1..s_m``; Bob owns the
``B`` operations and ``t_1..t_n``.  With a single operation on both sides this
is the one-operation protocol, which :func:`run_protocol1` implements directly
for cross-checking.

Wire frames are UTF-8 lines, the first ``LDKEP/1 <KIND> key=value ..`` and
the last ``end``.
"""

from __future__ import annotations

import hashlib
import random
import re
import shlex
from dataclasses import dataclass, field
from typing import Any, Sequence

from . import ldsys
from .ldsys import LDContext
from .treeword import Tree, leaves, map_leaves_eval, random_tree

VERSION = "LDKEP/1"
HASHES = ("sha256", "sha3_256", "blake2s")


class KeyMismatch(RuntimeError):
    pass


class ProtocolError(ValueError):
    """Malformed or inconsistent frame."""


# -- parameters and secrets ---------------------------------------------------

@dataclass(frozen=True)
class PublicParams:
    ctx: LDContext
    basis_A: tuple
    basis_B: tuple
    leaf_min: int
    leaf_max: int
    word_len: int = 0
    hash: str = "sha256"
    version: str = VERSION

    @property
    def m(self) -> int:
        return len(self.basis_A)

    @property
    def n(self) -> int:
        return len(self.basis_B)

    @property
    def ops_A(self) -> tuple[int, ...]:
        return self.ctx.side("A")

    @property
    def ops_B(self) -> tuple[int, ...]:
        return self.ctx.side("B")


def _basis(ctx: LDContext, seed: str, side: str, count: int) -> tuple:
    return tuple(ctx.sample(random.Random(f"basis:{seed}:{side}:{i}")) for i in range(count))


def make_params(descriptor: str, m: int = 1, n: int = 1, hash: str = "sha256",
                leaf_min: int | None = None, leaf_max: int | None = None,
                word_len: int | None = None, self_check: int = 20) -> PublicParams:
    """Build public parameters; the bases derive from the descriptor's ``seed=`` (default 0).

    ``self_check`` is the number of sampled triples per declared law pair run
    before the parameters are handed out (0 skips it).
    """
    if m < 1 or n < 1:
        raise ValueError("m and n must be at least 1")
    if hash not in HASHES:
        raise ValueError(f"unknown hash {hash!r}; choose from {', '.join(HASHES)}")
    ctx = ldsys.build_context(descriptor)
    if not ctx.side("A") or not ctx.side("B"):
        raise ValueError("context needs operations on both sides")
    fields = ldsys.parse_descriptor(descriptor)
    seed = fields.get("seed", "0")
    lo, hi = (3, 5) if ctx.is_braid else (4, 8)
    leaf_min = leaf_min or lo
    leaf_max = leaf_max or max(hi, leaf_min)
    if not 1 <= leaf_min <= leaf_max:
        raise ValueError("need 1 <= leaf_min <= leaf_max")
    if word_len is None:
        word_len = 16 if ctx.is_braid else 0
    if self_check:
        for report in ldsys.check_context(ctx, trials=self_check, seed=1):
            if not report.passed:
                raise ValueError(f"context fails its self-check: {report}")
    return PublicParams(ctx, _basis(ctx, seed, "A", m), _basis(ctx, seed, "B", n),
                        leaf_min, leaf_max, word_len, hash)


@dataclass(frozen=True)
class AliceSecret:
    a0_tree: Tree
    a: Any
    alpha: int


@dataclass(frozen=True)
class BobSecret:
    b_tree: Tree
    beta: int


@dataclass(frozen=True)
class SharedKey:
    element: Any
    canonical: str


@dataclass
class Transcript:
    msg_A: tuple
    msg_B: tuple
    confirm_A: str = ""
    confirm_B: str = ""


def _rng(role: str, seed: int) -> random.Random:
    return random.Random(f"{role}:{seed}")


def keygen_alice(params: PublicParams, seed: int) -> AliceSecret:
    rng = _rng("alice", seed)
    k = rng.randint(params.leaf_min, params.leaf_max)
    tree = random_tree(rng, k, params.m, params.ops_A)
    alpha = rng.choice(params.ops_A)
    a = params.ctx.sample_secret(rng, params.word_len)
    return AliceSecret(tree, a, alpha)


def keygen_bob(params: PublicParams, seed: int) -> BobSecret:
    rng = _rng("bob", seed)
    k = rng.randint(params.leaf_min, params.leaf_max)
    tree = random_tree(rng, k, params.n, params.ops_B)
    beta = rng.choice(params.ops_B)
    return BobSecret(tree, beta)


def _canon(ctx: LDContext, x):
    # braids travel as their canonical word
    return ctx.key(x) if ctx.is_braid else x


def alice_message(params: PublicParams, secret: AliceSecret) -> tuple:
    """``a *alpha t_1, .., a *alpha t_n, p0`` with ``p0 = a *alpha a0``."""
    ctx = params.ctx
    a0 = map_leaves_eval(secret.a0_tree, [params.basis_A[g] for g in leaves(secret.a0_tree)], ctx)
    out = [ctx.apply(secret.alpha, secret.a, t) for t in params.basis_B]
    out.append(ctx.apply(secret.alpha, secret.a, a0))
    return tuple(_canon(ctx, x) for x in out)


def bob_value(params: PublicParams, secret: BobSecret):
    return map_leaves_eval(secret.b_tree, [params.basis_B[g] for g in leaves(secret.b_tree)],
                           params.ctx)


def bob_message(params: PublicParams, secret: BobSecret) -> tuple:
    """``b *beta s_1, .., b *beta s_m``."""
    ctx = params.ctx
    b = bob_value(params, secret)
    return tuple(_canon(ctx, ctx.apply(secret.beta, b, s)) for s in params.basis_A)


def make_key(ctx: LDContext, element) -> SharedKey:
    return SharedKey(element, ctx.encode(element))


def alice_finish(params: PublicParams, secret: AliceSecret, message_B: Sequence) -> SharedKey:
    """K_A = a *alpha (b *beta a0), rebuilding b *beta a0 from Bob's images of s_i."""
    if len(message_B) != params.m:
        raise ProtocolError(f"expected {params.m} elements from Bob, got {len(message_B)}")
    ctx = params.ctx
    b_a0 = map_leaves_eval(secret.a0_tree, [message_B[g] for g in leaves(secret.a0_tree)], ctx)
    return make_key(ctx, ctx.apply(secret.alpha, secret.a, b_a0))


def bob_finish(params: PublicParams, secret: BobSecret, message_A: Sequence) -> SharedKey:
    """K_B = (a *alpha b) *beta p0."""
    if len(message_A) != params.n + 1:
        raise ProtocolError(f"expected {params.n + 1} elements from Alice, got {len(message_A)}")
    ctx = params.ctx
    a_b = map_leaves_eval(secret.b_tree, [message_A[g] for g in leaves(secret.b_tree)], ctx)
    return make_key(ctx, ctx.apply(secret.beta, a_b, message_A[-1]))


def confirm(key: SharedKey, params: PublicParams, transcript_digest: str = "") -> str:
    """Hex digest of the key's canonical text, optionally bound to a transcript digest."""
    h = hashlib.new(params.hash)
    h.update(key.canonical.encode())
    if transcript_digest:
        h.update(b"\n" + transcript_digest.encode())
    return h.hexdigest()


def run_local(params: PublicParams, seed_A: int, seed_B: int) -> tuple[Transcript, SharedKey, SharedKey]:
    alice = keygen_alice(params, seed_A)
    bob = keygen_bob(params, seed_B)
    msg_A = alice_message(params, alice)
    msg_B = bob_message(params, bob)
    key_A = alice_finish(params, alice, msg_B)
    key_B = bob_finish(params, bob, msg_A)
    transcript = Transcript(msg_A, msg_B, confirm(key_A, params), confirm(key_B, params))
    if key_A.canonical != key_B.canonical:
        raise KeyMismatch(f"K_A={key_A.canonical!r} differs from K_B={key_B.canonical!r}")
    return transcript, key_A, key_B


def run_protocol1(params: PublicParams, seed_A: int, seed_B: int) -> tuple[tuple, tuple, SharedKey, SharedKey]:
    """One-operation protocol written out directly: a0 in S_A, b in S_B, one ``*``."""
    if len(params.ctx.ops) != 1:
        raise ValueError("the one-operation protocol needs a single-op context")
    ctx = params.ctx

    def star(x, y):
        return ctx.apply(0, x, y)

    def value(tree, basis):
        return map_leaves_eval(tree, [basis[g] for g in leaves(tree)], ctx)

    rng = _rng("alice", seed_A)
    a0_tree = random_tree(rng, rng.randint(params.leaf_min, params.leaf_max), params.m, (0,))
    rng.choice((0,))  # keeps the stream aligned with the engine's op draw
    a = ctx.sample_secret(rng, params.word_len)
    rng = _rng("bob", seed_B)
    b_tree = random_tree(rng, rng.randint(params.leaf_min, params.leaf_max), params.n, (0,))

    a0, b = value(a0_tree, params.basis_A), value(b_tree, params.basis_B)
    msg_A = tuple(_canon(ctx, star(a, t)) for t in params.basis_B) + (_canon(ctx, star(a, a0)),)
    msg_B = tuple(_canon(ctx, star(b, s)) for s in params.basis_A)
    key_A = make_key(ctx, star(a, value(a0_tree, msg_B)))
    key_B = make_key(ctx, star(value(b_tree, msg_A[:-1]), msg_A[-1]))
    return msg_A, msg_B, key_A, key_B


# -- wire frames --------------------------------------------------------------

@dataclass
class Frame:
    kind: str
    fields: dict[str, str]
    body: list[str] = field(default_factory=list)
    raw: bytes = field(default=b"", compare=False, repr=False)

    def encode(self) -> bytes:
        head = " ".join([VERSION, self.kind] + [f"{k}={_quote(v)}" for k, v in self.fields.items()])
        return "".join(line + "\n" for line in [head, *self.body, "end"]).encode()


def _quote(v: str) -> str:
    return v if re.fullmatch(r"[\w.:,+/-]+", v) else shlex.quote(v)


def parse_header(line: str) -> Frame:
    try:
        tokens = shlex.split(line)
    except ValueError as exc:
        raise ProtocolError(f"bad header: {exc}") from None
    if len(tokens) < 2 or tokens[0] != VERSION:
        raise ProtocolError(f"expected {VERSION} header, got {line[:40]!r}")
    fields = {}
    for tok in tokens[2:]:
        if "=" not in tok:
            raise ProtocolError(f"header token {tok!r} is not key=value")
        k, v = tok.split("=", 1)
        fields[k] = v
    return Frame(tokens[1], fields)


def body_length(frame: Frame) -> int:
    if frame.kind != "PUB":
        return 0
    try:
        count = int(frame.fields["count"])
    except (KeyError, ValueError):
        raise ProtocolError("PUB frame needs an integer count") from None
    if not 0 < count <= 4096:
        raise ProtocolError(f"PUB count {count} out of range")
    return count


def read_frame(readline) -> Frame:
    """Read one frame via ``readline() -> bytes``; header, counted body lines, ``end``."""
    chunks: list[bytes] = []

    def line() -> str:
        raw = readline()
        chunks.append(raw)
        if not raw:
            raise ProtocolError("connection closed mid-frame")
        if not raw.endswith(b"\n"):
            raise ProtocolError("line too long or unterminated")
        try:
            return raw[:-1].decode("utf-8")
        except UnicodeDecodeError:
            raise ProtocolError("frame is not valid UTF-8") from None
    frame = parse_header(line())
    for _ in range(body_length(frame)):
        text = line()
        # reject a damaged element line at once rather than waiting on a merged line
        m = _ELT.match(text)
        if not m or int(m.group(2)) != len(m.group(3).encode()):
            raise ProtocolError(f"malformed ELT line {text[:40]!r}")
        frame.body.append(text)
    if line() != "end":
        raise ProtocolError(f"{frame.kind} frame not closed by 'end'")
    frame.raw = b"".join(chunks)
    return frame


def decode_frame(data: bytes) -> Frame:
    lines = iter(data.splitlines(keepends=True))
    frame = read_frame(lambda: next(lines, b""))
    if next(lines, None) is not None:
        raise ProtocolError("trailing data after frame")
    return frame


def hello_frame(params: PublicParams, role: str) -> Frame:
    return Frame("HELLO", {"role": role, "ctx": params.ctx.descriptor, "m": str(params.m),
                           "n": str(params.n), "N": str(params.ctx.strands), "hash": params.hash})


def check_hello(params: PublicParams, frame: Frame, peer_role: str) -> None:
    if frame.kind == "ERROR":
        raise ProtocolError(f"peer error: {frame.fields.get('reason', '')}")
    if frame.kind != "HELLO":
        raise ProtocolError(f"expected HELLO, got {frame.kind}")
    mine = hello_frame(params, peer_role).fields
    theirs = frame.fields
    if theirs.get("role") != peer_role:
        raise ProtocolError(f"expected role={peer_role}, got role={theirs.get('role')}")
    try:
        same_ctx = ldsys.parse_descriptor(theirs.get("ctx", "")) == ldsys.parse_descriptor(mine["ctx"])
    except ValueError:
        same_ctx = False
    if not same_ctx:
        raise ProtocolError(f"context mismatch: {theirs.get('ctx')!r} vs {mine['ctx']!r}")
    for k in ("m", "n", "N", "hash"):
        if theirs.get(k) != mine[k]:
            raise ProtocolError(f"parameter mismatch on {k}: {theirs.get(k)} vs {mine[k]}")


def element_names(params: PublicParams, role: str) -> list[str]:
    if role == "alice":
        return [f"at{j + 1}" for j in range(params.n)] + ["p0"]
    return [f"bs{i + 1}" for i in range(params.m)]


def pub_frame(params: PublicParams, role: str, message: Sequence) -> Frame:
    names = element_names(params, role)
    body = []
    for name, x in zip(names, message, strict=True):
        text = params.ctx.encode(x)
        body.append(f"ELT {name} {len(text.encode())} {text}")
    return Frame("PUB", {"role": role, "count": str(len(names))}, body)


_ELT = re.compile(r"ELT (\S+) (0|[1-9][0-9]*) (.*)\Z")


def parse_pub(params: PublicParams, frame: Frame, role: str) -> tuple:
    """Decode and validate a peer's PUB frame; each element must be in canonical text."""
    if frame.kind == "ERROR":
        raise ProtocolError(f"peer error: {frame.fields.get('reason', '')}")
    if frame.kind != "PUB" or frame.fields.get("role") != role:
        raise ProtocolError(f"expected PUB role={role}")
    names = element_names(params, role)
    if len(frame.body) != len(names):
        raise ProtocolError(f"expected {len(names)} elements, got {len(frame.body)}")
    ctx = params.ctx
    out = []
    for name, line in zip(names, frame.body):
        m = _ELT.match(line)
        if not m:
            raise ProtocolError(f"malformed ELT line {line[:40]!r}")
        got, length, text = m.groups()
        if got != name:
            raise ProtocolError(f"expected element {name}, got {got}")
        if int(length) != len(text.encode()):
            raise ProtocolError(f"length mismatch on {name}")
        try:
            x = ctx.decode(text)
        except ValueError as exc:
            raise ProtocolError(f"bad element {name}: {exc}") from None
        if ctx.encode(x) != text:
            raise ProtocolError(f"element {name} is not in canonical form")
        out.append(x)
    return tuple(out)


def confirm_frame(keyhash: str) -> Frame:
    return Frame("CONFIRM", {"keyhash": keyhash})


def error_frame(reason: str) -> Frame:
    return Frame("ERROR", {"reason": reason})


def transcript_digest(params: PublicParams, pub_alice: bytes, pub_bob: bytes) -> str:
    h = hashlib.new(params.hash)
    h.update(pub_alice)
    h.update(pub_bob)
    return h.hexdigest()


def transcript_text(params: PublicParams, transcript: Transcript) -> str:
    """Both PUB frames and the two confirmations, as they would cross the wire."""
    pa = pub_frame(params, "alice", transcript.msg_A).encode()
    pb = pub_frame(params, "bob", transcript.msg_B).encode()
    return (pa + pb).decode()


# -- one peer of a session ----------------------------------------------------

@dataclass
class SessionResult:
    role: str
    key: SharedKey
    own_hash: str
    peer_hash: str
    pub_sent: bytes
    pub_received: bytes

    @property
    def matched(self) -> bool:
        return self.own_hash == self.peer_hash


def run_peer(params: PublicParams, role: str, seed: int, readline, write) -> SessionResult:
    """Drive one side of a session: HELLO, PUB, CONFIRM.

    Alice speaks first in every round.  The confirmation digest covers the key
    and both PUB frames, so tampering with either message shows up as a
    mismatch even when the keys happen to agree.  Protocol violations are
    answered with an ERROR frame and re-raised as :class:`ProtocolError`.
    """
    if role not in ("alice", "bob"):
        raise ValueError("role must be alice or bob")
    peer = "bob" if role == "alice" else "alice"

    def exchange(frame: Frame) -> Frame:
        if role == "alice":
            write(frame.encode())
            return read_frame(readline)
        got = read_frame(readline)
        if got.kind == "ERROR":
            return got
        write(frame.encode())
        return got

    try:
        check_hello(params, exchange(hello_frame(params, role)), peer)
        if role == "alice":
            secret = keygen_alice(params, seed)
            sent = pub_frame(params, role, alice_message(params, secret)).encode()
        else:
            secret = keygen_bob(params, seed)
            sent = pub_frame(params, role, bob_message(params, secret)).encode()
        got = exchange(decode_frame(sent))
        received = parse_pub(params, got, peer)
        received_bytes = got.raw
        if role == "alice":
            key = alice_finish(params, secret, received)
            digest = transcript_digest(params, sent, received_bytes)
        else:
            key = bob_finish(params, secret, received)
            digest = transcript_digest(params, received_bytes, sent)
        own = confirm(key, params, digest)
        reply = exchange(confirm_frame(own))
        if reply.kind == "ERROR":
            raise ProtocolError(f"peer error: {reply.fields.get('reason', '')}")
        if reply.kind != "CONFIRM" or not re.fullmatch(r"[0-9a-f]{16,128}", reply.fields.get("keyhash", "")):
            raise ProtocolError("expected CONFIRM keyhash=<hex>")
    except ProtocolError as exc:
        if not str(exc).startswith("peer error"):
            try:
                write(error_frame(str(exc)).encode())
            except OSError:
                pass
        raise
    return SessionResult(role, key, own, reply.fields["keyhash"], sent, received_bytes)
