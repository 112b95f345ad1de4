"""Helpers for running both peers of a session, in-process or as CLI processes."""

from __future__ import annotations

import os
import socket
import subprocess
import sys
import threading

from ldkep import protocol

ENV = dict(os.environ, PYTHONUNBUFFERED="1")


def run_pair(params, seed, corrupt=None, timeout=5.0, bob_params=None):
    """Run alice and bob over a socket pair; ``corrupt(data, offset) -> data`` tampers alice's bytes."""
    a_sock, b_sock = socket.socketpair()
    outcomes = {}

    def peer(role, sock, p):
        sock.settimeout(timeout)
        rfile = sock.makefile("rb")
        sent = 0

        def write(data):
            nonlocal sent
            if corrupt is not None and role == "alice":
                data = corrupt(data, sent)
            sent += len(data)
            sock.sendall(data)
        try:
            outcomes[role] = protocol.run_peer(p, role, seed, lambda: rfile.readline(1 << 20), write)
        except Exception as exc:  # the test inspects whatever happened
            outcomes[role] = exc
        finally:
            rfile.close()
            try:
                sock.shutdown(socket.SHUT_RDWR)
            except OSError:
                pass
            sock.close()

    threads = [threading.Thread(target=peer, args=("alice", a_sock, params)),
               threading.Thread(target=peer, args=("bob", b_sock, bob_params or params))]
    for t in threads:
        t.start()
    for t in threads:
        t.join(timeout * 4)
    return outcomes["alice"], outcomes["bob"]


def detected(outcome) -> bool:
    return isinstance(outcome, Exception) or not outcome.matched


def alice_stream(params, seed) -> bytes:
    """Bytes alice puts on the wire before the confirmation."""
    hello = protocol.hello_frame(params, "alice").encode()
    secret = protocol.keygen_alice(params, seed)
    pub = protocol.pub_frame(params, "alice", protocol.alice_message(params, secret)).encode()
    return hello + pub


def elt_offsets(stream: bytes) -> list[int]:
    """Byte offsets of every character (newline included) of every ELT line."""
    out, pos = [], 0
    for line in stream.splitlines(keepends=True):
        if line.startswith(b"ELT "):
            out.extend(range(pos, pos + len(line)))
        pos += len(line)
    return out


def flip_at(target: int, value: int | None = None):
    def corrupt(data: bytes, offset: int) -> bytes:
        if offset <= target < offset + len(data):
            i = target - offset
            old = data[i]
            new = value if value is not None else (old ^ 0x01 if old != 0x0A else 0x20)
            data = data[:i] + bytes([new]) + data[i + 1:]
        return data
    return corrupt


def pub_frames(stream: bytes) -> list[bytes]:
    """Raw PUB frames in a byte stream, header through ``end``."""
    out, current = [], None
    for line in bytes(stream).splitlines(keepends=True):
        if current is None and line.split(b" ")[1:2] == [b"PUB"]:
            current = [line]
        elif current is not None:
            current.append(line)
            if line == b"end\n":
                out.append(b"".join(current))
                current = None
    return out


def cli(*args, timeout=60):
    return subprocess.run([sys.executable, "-m", "ldkep", *args], capture_output=True, text=True,
                          timeout=timeout, env=ENV)


class Server:
    """``ldkep kep-serve`` on an ephemeral port."""

    def __init__(self, *args):
        self.proc = subprocess.Popen([sys.executable, "-m", "ldkep", "kep-serve", "--listen",
                                      "127.0.0.1:0", *args], stdout=subprocess.PIPE,
                                     stderr=subprocess.PIPE, text=True, env=ENV)
        line = self.proc.stdout.readline()
        if not line.startswith("listening on"):
            self.proc.kill()
            raise RuntimeError(f"server failed to start: {line!r} {self.proc.stderr.read()}")
        self.address = line.split()[-1]

    def finish(self, timeout=60):
        out, err = self.proc.communicate(timeout=timeout)
        return self.proc.returncode, out, err


class Relay:
    """TCP relay that hands client-to-server bytes through ``corrupt(data, offset)``."""

    def __init__(self, upstream: str, corrupt=None):
        host, port = upstream.rsplit(":", 1)
        self.upstream = (host, int(port))
        self.corrupt = corrupt
        self.sent = {True: bytearray(), False: bytearray()}  # keyed by "client to server"
        self.srv = socket.create_server(("127.0.0.1", 0))
        self.address = f"127.0.0.1:{self.srv.getsockname()[1]}"
        self.done = threading.Event()
        self.thread = threading.Thread(target=self._run, daemon=True)
        self.thread.start()

    def _pump(self, src, dst, tamper):
        offset = 0
        try:
            while True:
                data = src.recv(65536)
                if not data:
                    break
                if tamper and self.corrupt is not None:
                    data = self.corrupt(data, offset)
                offset += len(data)
                self.sent[tamper].extend(data)
                dst.sendall(data)
        except OSError:
            pass
        finally:
            for s in (src, dst):
                try:
                    s.shutdown(socket.SHUT_RDWR)
                except OSError:
                    pass

    def _run(self):
        self.srv.settimeout(60)
        client, _ = self.srv.accept()
        server = socket.create_connection(self.upstream)
        up = threading.Thread(target=self._pump, args=(client, server, True))
        down = threading.Thread(target=self._pump, args=(server, client, False))
        up.start()
        down.start()
        up.join()
        down.join()
        self.done.set()
        client.close()
        server.close()
        self.srv.close()
