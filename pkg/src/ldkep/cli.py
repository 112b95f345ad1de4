"""Command-line entry point: ``ldkep <command> [options]``.

Exit codes: 0 success, 1 key mismatch or law counterexample, 2 usage,
parse or protocol error.
"""

from __future__ import annotations

import argparse
import csv
import io
import random
import socket
import sys
import time
from pathlib import Path

from . import attacks, braid, ldsys, protocol
from .braid import BraidParams
from .perms import PermGroup

OK, MISMATCH, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# -- config -----------------------------------------------------------------

def load_config(path: str) -> dict[str, str]:
    """``key=value`` lines; blank lines and ``#`` lines are skipped; dashes in keys become underscores."""
    out = {}
    for n, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{n}: expected key=value")
        k, v = line.split("=", 1)
        out[k.strip().replace("-", "_")] = v.strip()
    return out


def _hostport(text: str) -> tuple[str, int]:
    host, _, port = text.rpartition(":")
    if not host or not port.isdigit():
        raise UsageError(f"expected host:port, got {text!r}")
    return host, int(port)


def _params(args) -> protocol.PublicParams:
    try:
        return protocol.make_params(args.ctx, m=args.m, n=args.n, hash=args.hash,
                                    leaf_min=args.leaf_min, leaf_max=args.leaf_max,
                                    word_len=args.word_len, self_check=args.self_check)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _emit(args, text: str) -> None:
    print(text)
    if getattr(args, "out", None):
        Path(args.out).write_text(text + "\n")


# -- commands ---------------------------------------------------------------

def cmd_laver(args) -> int:
    if not 1 <= args.level <= 5:
        raise UsageError("Laver level must be between 1 and 5")
    table = ldsys.laver_table(args.level)
    if args.format == "csv":
        buf = io.StringIO()
        csv.writer(buf, lineterminator="\n").writerows(table.entries)
        _emit(args, buf.getvalue().rstrip("\n"))
    else:
        _emit(args, str(table))
    if args.check:
        report = ldsys.check_left_distributive(ldsys.laver_context(args.level))
        print(report)
        return OK if report.passed else MISMATCH
    return OK


def cmd_laws(args) -> int:
    try:
        ctx = ldsys.build_context(args.ctx)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    reports = ldsys.check_context(ctx, trials=args.trials, seed=args.seed)
    print(f"context: {ctx.descriptor}")
    for r in reports:
        print(r)
    return OK if all(r.passed for r in reports) else MISMATCH


def cmd_kep_run(args) -> int:
    params = _params(args)
    try:
        transcript, key_a, key_b = protocol.run_local(params, args.seed, args.seed)
    except protocol.KeyMismatch as exc:
        print(f"MISMATCH {exc}")
        return MISMATCH
    lines = [protocol.hello_frame(params, "alice").encode().decode().rstrip("\n"),
             protocol.transcript_text(params, transcript).rstrip("\n"),
             f"alice keyhash={transcript.confirm_A}",
             f"bob keyhash={transcript.confirm_B}",
             "match" if transcript.confirm_A == transcript.confirm_B else "MISMATCH"]
    _emit(args, "\n".join(lines))
    return OK if transcript.confirm_A == transcript.confirm_B else MISMATCH


def _report_session(args, result: protocol.SessionResult) -> int:
    lines = [f"role={result.role}",
             f"keyhash={result.own_hash}",
             f"peer_keyhash={result.peer_hash}",
             "match" if result.matched else "MISMATCH"]
    _emit(args, "\n".join(lines))
    return OK if result.matched else MISMATCH


def _session(args, params, conn: socket.socket, role: str) -> int:
    conn.settimeout(args.timeout)
    rfile = conn.makefile("rb")

    def readline():
        return rfile.readline(1 << 20)

    try:
        result = protocol.run_peer(params, role, args.seed, readline, conn.sendall)
    except protocol.ProtocolError as exc:
        print(f"protocol error: {exc}", file=sys.stderr)
        return USAGE
    except (OSError, TimeoutError) as exc:
        print(f"network error: {exc}", file=sys.stderr)
        return USAGE
    finally:
        rfile.close()
    return _report_session(args, result)


def cmd_kep_serve(args) -> int:
    params = _params(args)
    host, port = _hostport(args.listen)
    code = OK
    with socket.create_server((host, port)) as srv:
        srv.settimeout(args.timeout)
        print(f"listening on {host}:{srv.getsockname()[1]}", flush=True)
        served = 0
        while args.sessions == 0 or served < args.sessions:
            try:
                conn, _ = srv.accept()
            except TimeoutError:
                print("timed out waiting for a peer", file=sys.stderr)
                return USAGE
            with conn:
                code = _session(args, params, conn, args.role)
            served += 1
    return code


def cmd_kep_connect(args) -> int:
    params = _params(args)
    host, port = _hostport(args.connect)
    try:
        conn = socket.create_connection((host, port), timeout=args.timeout)
    except OSError as exc:
        print(f"network error: {exc}", file=sys.stderr)
        return USAGE
    with conn:
        return _session(args, params, conn, args.role)


def cmd_attack(args) -> int:
    params = _params(args)
    if not params.ctx.is_finite:
        print("refused: key recovery by exhaustive search needs a finite platform; "
              "for braid platforms only the SDP to SCCP transform is provided (see `sccp --transform`)",
              file=sys.stderr)
        return USAGE
    names = "ABCD" if args.pipeline == "all" else args.pipeline
    code = OK
    for run in range(args.runs):
        seed = args.seed + run
        transcript, key, _ = protocol.run_local(params, seed, seed)
        for name in names:
            t0 = time.perf_counter()
            report = attacks.PIPELINES[name](transcript, params)
            dt = time.perf_counter() - t0
            match = report.key.canonical == key.canonical
            code = code if match else MISMATCH
            sizes = " ".join(f"{k}={v}" for k, v in report.search_sizes.items())
            print(f"pipeline={name} ctx={params.ctx.descriptor!r} seed={seed} "
                  f"oracles={'+'.join(report.oracle_calls)!r} {sizes} time={dt:.4f}s "
                  f"keyhash={protocol.confirm(report.key, params)} "
                  f"{'match' if match else 'MISMATCH'}")
    return code


def _group_from_args(args) -> PermGroup:
    return PermGroup.symmetric(args.degree)


def cmd_sccp(args) -> int:
    rng = random.Random(args.seed)
    code = OK
    if args.transform:
        bp = BraidParams(args.p, args.q1, args.q2, strict=not args.loose)
        good = 0
        for i in range(args.count):
            inst = attacks.random_sdp_instance(bp, random.Random(f"{args.seed}:{i}"), extra=i % 4)
            check = attacks.verify_transform(inst)
            good += check.ok
        print(f"transform p={args.p} q1={args.q1} q2={args.q2}: verified {good}/{args.count}")
        code = OK if good == args.count else MISMATCH
    if args.plant or args.membership or not args.transform:
        group = _group_from_args(args)
        composition = [int(v) for v in args.young.split(",")]
        H = group.young_subgroup(composition)
        K = group.trivial_subgroup() if args.membership else group
        solved = 0
        t0 = time.perf_counter()
        for _ in range(args.count):
            inst, _, _ = attacks.plant_sccp(group, H, K, rng)
            h, c = attacks.sccp_brute(inst)
            solved += attacks.verify_sccp(inst, h, c)
        dt = time.perf_counter() - t0
        label = "membership (K={e})" if args.membership else "planted"
        print(f"sccp {label} S_{args.degree} H=Young({args.young}) |H|={H.order} |K|={K.order}: "
              f"solved {solved}/{args.count} in {dt:.3f}s")
        code = code if solved == args.count else MISMATCH
    return code


def cmd_bench(args) -> int:
    rows = []
    braid.normal_form((1, -2))  # keep JIT compilation out of the timings
    for length in args.lengths:
        words = [braid.random_word(args.seed + s, length, 8) for s in range(args.runs)]
        t0 = time.perf_counter()
        for word in words:
            braid.normal_form(word)
        rows.append(("normal_form", f"len={length}", (time.perf_counter() - t0) / args.runs))
    for preset in args.presets:
        params = protocol.make_params(preset)
        t0 = time.perf_counter()
        for s in range(args.runs):
            protocol.run_local(params, args.seed + s, args.seed + s)
        rows.append(("handshake", preset, (time.perf_counter() - t0) / args.runs))
        if params.ctx.is_finite:
            transcript, _, _ = protocol.run_local(params, args.seed, args.seed)
            for name, fn in attacks.PIPELINES.items():
                t0 = time.perf_counter()
                fn(transcript, params)
                rows.append((f"pipeline_{name}", preset, time.perf_counter() - t0))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["task", "case", "seconds"])
    for task, case, sec in rows:
        w.writerow([task, case, f"{sec:.6f}"])
    _emit(args, buf.getvalue().rstrip("\n"))
    return OK


# -- argument parsing -------------------------------------------------------

def _session_flags(p: argparse.ArgumentParser, role: str) -> None:
    p.add_argument("--role", choices=("alice", "bob"), default=role)
    p.add_argument("--timeout", type=float, default=30.0)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="file of key=value lines; flags override it")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", help="also write the output to this file")

    kep = argparse.ArgumentParser(add_help=False)
    kep.add_argument("--ctx", default="laver3", help="context descriptor or preset name")
    kep.add_argument("--m", type=int, default=1)
    kep.add_argument("--self-check", type=int, default=20,
                     help="sampled triples per law checked before use; 0 skips the check")
    kep.add_argument("--n", type=int, default=1)
    kep.add_argument("--leaf-min", type=int)
    kep.add_argument("--leaf-max", type=int)
    kep.add_argument("--word-len", type=int)
    kep.add_argument("--hash", default="sha256", choices=protocol.HASHES)

    parser = argparse.ArgumentParser(prog="ldkep", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("laver", parents=[common], help="print a Laver table")
    p.add_argument("level", type=int)
    p.add_argument("--format", choices=("text", "csv"), default="text")
    p.add_argument("--check", action="store_true", help="exhaustive left-distributivity scan")
    p.set_defaults(func=cmd_laver)

    p = sub.add_parser("laws", parents=[common], help="check the declared distributive laws")
    p.add_argument("--ctx", required=False, default="laver3")
    p.add_argument("--trials", type=int, default=200)
    p.set_defaults(func=cmd_laws)

    p = sub.add_parser("kep-run", parents=[common, kep], help="in-process handshake")
    p.set_defaults(func=cmd_kep_run)

    p = sub.add_parser("kep-serve", parents=[common, kep], help="wait for a peer and run one side")
    p.add_argument("--listen", default="127.0.0.1:7878")
    p.add_argument("--sessions", type=int, default=1, help="sessions to serve; 0 means forever")
    _session_flags(p, "bob")
    p.set_defaults(func=cmd_kep_serve)

    p = sub.add_parser("kep-connect", parents=[common, kep], help="connect to a peer and run one side")
    p.add_argument("--connect", default="127.0.0.1:7878")
    _session_flags(p, "alice")
    p.set_defaults(func=cmd_kep_connect)

    p = sub.add_parser("attack", parents=[common, kep], help="recover keys from honest transcripts")
    p.add_argument("--pipeline", choices=("A", "B", "C", "D", "all"), default="all")
    p.add_argument("--runs", type=int, default=1)
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("sccp", parents=[common], help="subgroup conjugacy coset problem tools")
    p.add_argument("--plant", action="store_true", help="solve planted finite instances")
    p.add_argument("--membership", action="store_true", help="planted instances with K trivial")
    p.add_argument("--transform", action="store_true", help="verify the braid SDP to SCCP transform")
    p.add_argument("--count", type=int, default=50)
    p.add_argument("--degree", type=int, default=5)
    p.add_argument("--young", default="3,2", help="block sizes of H")
    p.add_argument("--p", type=int, default=7)
    p.add_argument("--q1", type=int, default=3)
    p.add_argument("--q2", type=int, default=4)
    p.add_argument("--loose", action="store_true", help="drop the q1 >= 3 and p - q2 >= 3 bounds")
    p.set_defaults(func=cmd_sccp)

    p = sub.add_parser("bench", parents=[common], help="timing table as CSV")
    p.add_argument("--lengths", type=int, nargs="+", default=[100, 400, 1600])
    p.add_argument("--presets", nargs="+", default=["laver3", "ct8", "braid-gsc"])
    p.add_argument("--runs", type=int, default=3)
    p.set_defaults(func=cmd_bench)
    return parser


def parse_args(argv: list[str] | None = None) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        try:
            config = load_config(args.config)
        except (OSError, UsageError) as exc:
            parser.error(f"cannot read config: {exc}")
        sub = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest for a in sub._actions}
        unknown = set(config) - known
        if unknown:
            parser.error(f"unknown config keys: {', '.join(sorted(unknown))}")
        try:
            sub.set_defaults(**{k: _convert(sub, k, v) for k, v in config.items()})
        except ValueError as exc:
            parser.error(f"bad config value: {exc}")
        args = parser.parse_args(argv)
    return args


def _convert(sub: argparse.ArgumentParser, dest: str, value: str):
    for action in sub._actions:
        if action.dest == dest:
            if isinstance(action, argparse._StoreTrueAction):
                return value.lower() in ("1", "true", "yes", "on")
            convert = action.type or str
            if action.nargs in ("+", "*"):
                return [convert(v) for v in value.split()]
            return convert(value)
    return value


def main(argv: list[str] | None = None) -> int:
    args = parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
