"""
Commands - Handlers behind the command-line interface

Every handler takes the parsed argparse namespace plus the output streams
and returns an exit code: 0 when a check passes or a construction succeeds,
1 when a check fails (the witness goes to stderr). Precondition errors are
left to the caller, which maps them to exit code 2.
"""

import sys
from argparse import Namespace
from typing import Callable, Dict, Optional, TextIO

from loguru import logger

from src.cli.fixtures import fixture_file, fixture_names
from src.cli.formats import ArrayFile, emit_array, parse_array
from src.core.errors import ParameterError
from src.core.models import SoaParams, VerificationReport
from src.designs.arrays import (
    GroupedArray,
    coincidence_identity_check,
    coincidence_profile,
    oa_strength,
    verify_goa,
    verify_oa,
    verify_soa,
)
from src.designs.construct import bush, full_factorial, juxtapose, ovoid_oa, rao_hamming
from src.designs.embed import branch, find_extension, is_semi_embeddable, max_extension
from src.designs.nets import latin_hypercube, soa_to_digits, verify_net
from src.designs.soa3 import (
    extract_underlying_oa,
    goa_to_soa,
    soa_from_embeddable,
    soa_from_semi_embeddable,
    soa_to_goa,
)


Handler = Callable[[Namespace, TextIO, TextIO], int]


def read_array_file(path: str) -> ArrayFile:
    """Parse a file path, or standard input for '-'."""
    if path == "-":
        return parse_array(sys.stdin.buffer.read())
    with open(path, "rb") as f:
        return parse_array(f.read())


def _verdict(report: VerificationReport, what: str, out: TextIO, err: TextIO) -> int:
    if report.passed:
        print(f"PASS {what}", file=out)
        return 0
    print(f"FAIL {what}", file=out)
    print(f"witness: {report.witness.describe()}", file=err)
    return 1


def _power_of(levels: int, s: int) -> int:
    t, value = 0, 1
    while value < levels:
        value *= s
        t += 1
    if value != levels:
        raise ParameterError(f"{levels} levels is not a power of base {s}")
    return t


# ============================================================================
# VERIFICATION
# ============================================================================

def cmd_verify_oa(args: Namespace, out: TextIO, err: TextIO) -> int:
    a = read_array_file(args.file).array
    return _verdict(verify_oa(a, args.strength), f"OA strength {args.strength}", out, err)


def cmd_verify_soa(args: Namespace, out: TextIO, err: TextIO) -> int:
    a = read_array_file(args.file).array
    params = SoaParams(s=args.base, t=args.strength)
    return _verdict(
        verify_soa(a, params), f"SOA base {args.base} strength {args.strength}", out, err
    )


def _read_goa(path: str, s: int) -> GroupedArray:
    flat = read_array_file(path).array
    if flat.levels != (s,) * flat.m:
        raise ParameterError(f"GOA file must have {s} levels in every column, got {flat.levels}")
    return GroupedArray.from_array(flat)


def cmd_verify_goa(args: Namespace, out: TextIO, err: TextIO) -> int:
    g = _read_goa(args.file, args.base)
    return _verdict(verify_goa(g), f"GOA base {args.base}", out, err)


def cmd_net_check(args: Namespace, out: TextIO, err: TextIO) -> int:
    a = read_array_file(args.file).array
    t = _power_of(a.levels[0], args.base)
    digits = soa_to_digits(a, args.base, t)
    label = f"({args.w},{args.k},{a.m})-net base {args.base}"
    return _verdict(verify_net(digits, args.w, args.k), label, out, err)


def cmd_profile(args: Namespace, out: TextIO, err: TextIO) -> int:
    a = read_array_file(args.file).array
    profile = coincidence_profile(a, args.row)
    print(" ".join(str(c) for c in profile.counts), file=out)
    report = coincidence_identity_check(a, args.row, args.strength)
    if not report.passed:
        print(f"witness: {report.witness.describe()}", file=err)
        return 1
    return 0


# ============================================================================
# CONVERSION
# ============================================================================

def cmd_convert(args: Namespace, out: TextIO, err: TextIO) -> int:
    s = args.base
    if args.direction == "soa-to-goa":
        g = soa_to_goa(read_array_file(args.file).array, s)
        out.write(emit_array(g.to_array(), provenance=f"GOA of {g.m} groups, base {s}"))
    else:
        d = goa_to_soa(_read_goa(args.file, s), s)
        out.write(emit_array(d, strength=3, base=s, power=3))
    return 0


def cmd_extract_oa(args: Namespace, out: TextIO, err: TextIO) -> int:
    a = extract_underlying_oa(read_array_file(args.file).array, args.base)
    out.write(emit_array(a, strength=oa_strength(a)))
    return 0


# ============================================================================
# EMBEDDING
# ============================================================================

def cmd_branch(args: Namespace, out: TextIO, err: TextIO) -> int:
    a = read_array_file(args.file).array
    for child in branch(a, args.column, args.strength):
        out.write(emit_array(
            child.array,
            strength=args.strength - 1,
            provenance=f"child column {child.parent_column} level {child.branch_level}",
        ))
    return 0


def cmd_embed(args: Namespace, out: TextIO, err: TextIO) -> int:
    report = find_extension(read_array_file(args.file).array, args.strength)
    if report.embeddable:
        print(" ".join(str(x) for x in report.extension), file=out)
        return 0
    print("none", file=out)
    print(f"search exhausted after {report.search_nodes} nodes", file=err)
    return 1


def cmd_semi_embed(args: Namespace, out: TextIO, err: TextIO) -> int:
    report = is_semi_embeddable(read_array_file(args.file).array, args.strength)
    if report.semi_embeddable:
        print(f"semi-embeddable ({len(report.per_child)} children embeddable)", file=out)
        return 0
    print("not semi-embeddable", file=out)
    if report.short_circuit:
        print("witness: index-two array with s+2 columns and a repeated run", file=err)
    else:
        blocked = report.first_blocked_child()
        print(
            f"witness: child (column {blocked.column}, level {blocked.level}) has no extension",
            file=err,
        )
    return 1


def cmd_max_extend(args: Namespace, out: TextIO, err: TextIO) -> int:
    extended, witness = max_extension(
        read_array_file(args.file).array, args.strength, args.limit
    )
    out.write(emit_array(extended, strength=args.strength))
    stop = "no further column exists" if witness.exhaustive else "column limit reached"
    print(f"{witness.start_columns} -> {witness.columns_reached} columns, {stop}", file=err)
    return 0


def cmd_build_soa(args: Namespace, out: TextIO, err: TextIO) -> int:
    a = read_array_file(args.file).array
    if args.source == "from-embeddable":
        soa, trace = soa_from_embeddable(a, args.base)
    else:
        soa, trace = soa_from_semi_embeddable(a, args.base)
    out.write(emit_array(
        soa, strength=3, base=args.base, power=3, provenance=f"built from {trace.source} OA"
    ))
    return 0


# ============================================================================
# CONSTRUCTION AND SAMPLING
# ============================================================================

def cmd_construct(args: Namespace, out: TextIO, err: TextIO) -> int:
    kind = args.kind
    if kind == "bush":
        a, t = bush(args.s, extended=args.extended), 3
    elif kind == "rao-hamming":
        a, t = rao_hamming(args.s, args.k), 2
    elif kind == "ovoid":
        a, t = ovoid_oa(args.s), 3
    elif kind == "full-factorial":
        a, t = full_factorial(args.s, args.k), args.k
    else:
        first, second = read_array_file(args.files[0]), read_array_file(args.files[1])
        a = juxtapose(first.array, second.array)
        t = min(first.strength, second.strength)
    out.write(emit_array(a, strength=t, provenance=kind))
    return 0


def cmd_lhd(args: Namespace, out: TextIO, err: TextIO) -> int:
    a = latin_hypercube(read_array_file(args.file).array, args.seed)
    out.write(emit_array(a, strength=1, provenance=f"Latin hypercube, seed {args.seed}"))
    return 0


def cmd_fixtures(args: Namespace, out: TextIO, err: TextIO) -> int:
    if args.action == "list":
        for name in fixture_names():
            print(name, file=out)
        return 0
    if not args.name:
        raise ParameterError("fixtures show needs a fixture name")
    out.write(fixture_file(args.name).emit())
    return 0


COMMANDS: Dict[str, Handler] = {
    "verify-oa": cmd_verify_oa,
    "verify-soa": cmd_verify_soa,
    "verify-goa": cmd_verify_goa,
    "convert": cmd_convert,
    "extract-oa": cmd_extract_oa,
    "branch": cmd_branch,
    "embed": cmd_embed,
    "semi-embed": cmd_semi_embed,
    "max-extend": cmd_max_extend,
    "build-soa": cmd_build_soa,
    "construct": cmd_construct,
    "net-check": cmd_net_check,
    "lhd": cmd_lhd,
    "fixtures": cmd_fixtures,
    "profile": cmd_profile,
}


def dispatch(args: Namespace, out: Optional[TextIO] = None, err: Optional[TextIO] = None) -> int:
    """Run the handler registered for ``args.command``."""
    handler = COMMANDS[args.command]
    logger.debug(f"running command {args.command}")
    return handler(args, out or sys.stdout, err or sys.stderr)
