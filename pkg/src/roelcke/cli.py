"""Command-line surface: one deterministic library operation per invocation.

Exit codes: 0 success, 1 syntax or validation error, 2 precondition
violation, 3 budget exhausted.  All inputs are files in the text formats of
`formats`; output goes to stdout or to `--out <file>`, byte-identical
across reruns.
"""

import argparse
import sys
from typing import List, Optional, Union

from . import constructions, finrel, formats, homeo, towers
from .cantor import Partition, level_partition
from .errors import RoelckeError, ValidationError


class _Parser(argparse.ArgumentParser):
    # Usage errors are syntax errors: exit 1, not argparse's default 2.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _read(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror}")


def _gamma(args) -> Partition:
    if args.level is not None and args.partition is not None:
        raise ValidationError("--level and --partition are mutually exclusive")
    if args.level is not None:
        return level_partition(args.level)
    if args.partition is not None:
        return formats.parse_partition(_read(args.partition))
    raise ValidationError("one of --level or --partition is required")


def _level_or_gamma(args) -> Union[int, Partition]:
    if args.level is not None and args.partition is not None:
        raise ValidationError("--level and --partition are mutually exclusive")
    if args.level is not None:
        return args.level
    if args.partition is not None:
        return formats.parse_partition(_read(args.partition))
    raise ValidationError("one of --level or --partition is required")


def _bool_line(b: bool) -> str:
    return ("true" if b else "false") + "\n"


# -- handlers ---------------------------------------------------------------

def _rel_compose(args) -> str:
    a = formats.parse_relation(_read(args.a))
    b = formats.parse_relation(_read(args.b))
    return formats.format_relation(finrel.compose(a, b))


def _rel_transpose(args) -> str:
    return formats.format_relation(
        finrel.transpose(formats.parse_relation(_read(args.a)))
    )


def _rel_classify(args) -> str:
    c = finrel.classify(formats.parse_relation(_read(args.a)))
    return "".join(
        f"{name}: {'true' if getattr(c, name) else 'false'}\n"
        for name in (
            "is_e0",
            "is_symmetric",
            "contains_diagonal",
            "is_idempotent",
            "is_equivalence",
        )
    )


def _rel_enum(args) -> str:
    cap = args.budget if args.budget is not None else finrel.E0_ENUM_CAP
    rels = finrel.enumerate_e0(args.size, cap)
    if args.count_only:
        return f"{len(rels)}\n"
    return formats.format_relation_set(rels)


def _rel_closure(args) -> str:
    gens = formats.parse_relation_set(_read(args.a))
    cap = args.budget if args.budget is not None else finrel.CLOSURE_CAP
    closed = finrel.closure(gens, cap)
    return formats.format_relation_set(sorted(closed, key=lambda r: r.pairs))


def _rel_greatest_idem(args) -> str:
    rels = formats.parse_relation_set(_read(args.a))
    top = finrel.greatest_delta_element(rels)
    if top is None:
        return "none\n"
    return formats.format_relation(top)


def _rel_invariants(args) -> str:
    cap = args.budget if args.budget is not None else finrel.E0_ENUM_CAP
    rels = finrel.invariant_under_symmetric_group(args.size, cap)
    return formats.format_relation_set(rels)


def _homeo_compose(args) -> str:
    f = formats.parse_prefix_map(_read(args.f))
    g = formats.parse_prefix_map(_read(args.g))
    return formats.format_prefix_map(homeo.compose(f, g))


def _homeo_invert(args) -> str:
    return formats.format_prefix_map(
        homeo.invert(formats.parse_prefix_map(_read(args.f)))
    )


def _homeo_trace(args) -> str:
    f = formats.parse_prefix_map(_read(args.f))
    at = _level_or_gamma(args)
    if isinstance(at, int):
        return formats.format_relation(homeo.level_trace(f, at))
    return formats.format_relation(homeo.trace(f, at))


def _homeo_image(args) -> str:
    f = formats.parse_prefix_map(_read(args.f))
    C = formats.parse_clopen(_read(args.c))
    return formats.format_clopen(homeo.image_clopen(f, C))


def _homeo_stab(args) -> str:
    f = formats.parse_prefix_map(_read(args.f))
    return _bool_line(homeo.in_stabilizer(f, _gamma(args)))


def _homeo_supdist(args) -> str:
    f = formats.parse_prefix_map(_read(args.f))
    g = formats.parse_prefix_map(_read(args.g))
    return formats.format_dyadic(homeo.sup_distance(f, g)) + "\n"


def _homeo_mapclopen(args) -> str:
    P = formats.parse_clopen(_read(args.p))
    Q = formats.parse_clopen(_read(args.q))
    return formats.format_rules(homeo.map_clopen(P, Q))


def _tower_trace(args) -> str:
    T = formats.parse_tower(_read(args.t))
    return formats.format_relation(towers.trace_at(T, _level_or_gamma(args)))


def _tower_involute(args) -> str:
    return formats.format_tower(
        towers.involute(formats.parse_tower(_read(args.t)))
    )


def _tower_compose(args) -> str:
    T1 = formats.parse_tower(_read(args.a))
    T2 = formats.parse_tower(_read(args.b))
    budget = args.budget if args.budget is not None else 0
    return formats.format_tower(towers.product(T1, T2, budget))


def _tower_translate(args) -> str:
    g = formats.parse_prefix_map(_read(args.g))
    T = formats.parse_tower(_read(args.t))
    return formats.format_tower(towers.translate(g, T, args.side))


def _tower_same_nbhd(args) -> str:
    T1 = formats.parse_tower(_read(args.a))
    T2 = formats.parse_tower(_read(args.b))
    return _bool_line(towers.same_neighborhood(T1, T2, _level_or_gamma(args)))


def _tower_hausdorff(args) -> str:
    T1 = formats.parse_tower(_read(args.a))
    T2 = formats.parse_tower(_read(args.b))
    lo, hi = towers.hausdorff_bounds(T1, T2, args.level)
    return (
        f"lower: {formats.format_dyadic(lo)}\n"
        f"upper: {formats.format_dyadic(hi)}\n"
    )


def _tower_check(args) -> str:
    T = formats.parse_tower(_read(args.t))
    report = towers.check_coherence(T, args.level)
    out = [
        f"ok: {'true' if report.ok else 'false'}\n",
        f"checked_levels: {report.checked_levels}\n",
    ]
    out.extend(f"failure: level {n} {msg}\n" for n, msg in report.failures)
    return "".join(out)


def _realize(args) -> str:
    r = formats.parse_relation(_read(args.r))
    return formats.format_prefix_map(constructions.realize(_gamma(args), r))


def _realize_pair(args) -> str:
    r = formats.parse_relation(_read(args.r))
    s = formats.parse_relation(_read(args.s))
    f, g = constructions.joint_realize(_gamma(args), r, s)
    return formats.format_prefix_map(f) + "\n" + formats.format_prefix_map(g)


def _coset_witness(args) -> str:
    f = formats.parse_prefix_map(_read(args.f))
    g = formats.parse_prefix_map(_read(args.g))
    cert = constructions.double_coset_witness(_gamma(args), f, g)
    return formats.format_prefix_map(cert.u) + "\n" + formats.format_prefix_map(
        cert.v
    )


def _net(args) -> str:
    members = constructions.roelcke_net(_gamma(args))
    if args.count_only:
        return f"{len(members)}\n"
    return "\n".join(formats.format_prefix_map(f) for f in members)


def _cluster(args) -> str:
    T1 = formats.parse_tower(_read(args.a))
    T2 = formats.parse_tower(_read(args.b))
    cap = args.budget if args.budget is not None else towers.LEVEL_CAP
    cert = constructions.cluster_witness(T1, T2, args.level, cap)
    return (
        f"m: {cert.refinement_level}\n\n"
        + formats.format_prefix_map(cert.f)
        + "\n"
        + formats.format_prefix_map(cert.g)
    )


def _witness_dense_orbit(args) -> str:
    sets = [formats.parse_clopen(_read(p)) for p in (args.u1, args.u2, args.v1, args.v2)]
    return formats.format_prefix_map(constructions.dense_orbit_witness(*sets))


def _witness_conjugation(args) -> str:
    f = formats.parse_prefix_map(_read(args.f))
    U = formats.parse_clopen(_read(args.u))
    V = formats.parse_clopen(_read(args.v))
    h, g = constructions.conjugation_witness(f, U, V)
    return formats.format_prefix_map(h) + "\n" + formats.format_prefix_map(g)


# -- parser -----------------------------------------------------------------

def _add_gamma_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--level", type=int, default=None, metavar="n")
    p.add_argument("--partition", default=None, metavar="file")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--out", default=None, metavar="file")

    top = _Parser(prog="roelcke", description=__doc__.splitlines()[0])
    sub = top.add_subparsers(dest="command", required=True, parser_class=_Parser)

    rel = sub.add_parser("rel").add_subparsers(
        dest="subcommand", required=True, parser_class=_Parser
    )
    p = rel.add_parser("compose", parents=[common])
    p.add_argument("a")
    p.add_argument("b")
    p.set_defaults(run=_rel_compose)
    p = rel.add_parser("transpose", parents=[common])
    p.add_argument("a")
    p.set_defaults(run=_rel_transpose)
    p = rel.add_parser("classify", parents=[common])
    p.add_argument("a")
    p.set_defaults(run=_rel_classify)
    p = rel.add_parser("enum", parents=[common])
    p.add_argument("--size", type=int, required=True)
    p.add_argument("--count-only", action="store_true")
    p.add_argument("--budget", type=int, default=None, metavar="b")
    p.set_defaults(run=_rel_enum)
    p = rel.add_parser("closure", parents=[common])
    p.add_argument("a")
    p.add_argument("--budget", type=int, default=None, metavar="b")
    p.set_defaults(run=_rel_closure)
    p = rel.add_parser("greatest-idem", parents=[common])
    p.add_argument("a")
    p.set_defaults(run=_rel_greatest_idem)
    p = rel.add_parser("invariants", parents=[common])
    p.add_argument("--size", type=int, required=True)
    p.add_argument("--budget", type=int, default=None, metavar="b")
    p.set_defaults(run=_rel_invariants)

    hom = sub.add_parser("homeo").add_subparsers(
        dest="subcommand", required=True, parser_class=_Parser
    )
    p = hom.add_parser("compose", parents=[common])
    p.add_argument("f")
    p.add_argument("g")
    p.set_defaults(run=_homeo_compose)
    p = hom.add_parser("invert", parents=[common])
    p.add_argument("f")
    p.set_defaults(run=_homeo_invert)
    p = hom.add_parser("trace", parents=[common])
    p.add_argument("f")
    _add_gamma_flags(p)
    p.set_defaults(run=_homeo_trace)
    p = hom.add_parser("image", parents=[common])
    p.add_argument("f")
    p.add_argument("c")
    p.set_defaults(run=_homeo_image)
    p = hom.add_parser("stab", parents=[common])
    p.add_argument("f")
    _add_gamma_flags(p)
    p.set_defaults(run=_homeo_stab)
    p = hom.add_parser("supdist", parents=[common])
    p.add_argument("f")
    p.add_argument("g")
    p.set_defaults(run=_homeo_supdist)
    p = hom.add_parser("mapclopen", parents=[common])
    p.add_argument("p")
    p.add_argument("q")
    p.set_defaults(run=_homeo_mapclopen)

    tow = sub.add_parser("tower").add_subparsers(
        dest="subcommand", required=True, parser_class=_Parser
    )
    p = tow.add_parser("trace", parents=[common])
    p.add_argument("t")
    _add_gamma_flags(p)
    p.set_defaults(run=_tower_trace)
    p = tow.add_parser("involute", parents=[common])
    p.add_argument("t")
    p.set_defaults(run=_tower_involute)
    p = tow.add_parser("compose", parents=[common])
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--budget", type=int, default=None, metavar="b")
    p.set_defaults(run=_tower_compose)
    p = tow.add_parser("translate", parents=[common])
    p.add_argument("side", choices=("left", "right"))
    p.add_argument("g")
    p.add_argument("t")
    p.set_defaults(run=_tower_translate)
    p = tow.add_parser("same-nbhd", parents=[common])
    p.add_argument("a")
    p.add_argument("b")
    _add_gamma_flags(p)
    p.set_defaults(run=_tower_same_nbhd)
    p = tow.add_parser("hausdorff", parents=[common])
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--level", type=int, required=True, metavar="n")
    p.set_defaults(run=_tower_hausdorff)
    p = tow.add_parser("check", parents=[common])
    p.add_argument("t")
    p.add_argument("--level", type=int, required=True, metavar="n")
    p.set_defaults(run=_tower_check)

    p = sub.add_parser("realize", parents=[common])
    p.add_argument("r")
    _add_gamma_flags(p)
    p.set_defaults(run=_realize)
    p = sub.add_parser("realize-pair", parents=[common])
    p.add_argument("r")
    p.add_argument("s")
    _add_gamma_flags(p)
    p.set_defaults(run=_realize_pair)
    p = sub.add_parser("coset-witness", parents=[common])
    p.add_argument("f")
    p.add_argument("g")
    _add_gamma_flags(p)
    p.set_defaults(run=_coset_witness)
    p = sub.add_parser("net", parents=[common])
    _add_gamma_flags(p)
    p.add_argument("--count-only", action="store_true")
    p.set_defaults(run=_net)
    p = sub.add_parser("cluster", parents=[common])
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--level", type=int, required=True, metavar="n")
    p.add_argument("--budget", type=int, default=None, metavar="b")
    p.set_defaults(run=_cluster)

    wit = sub.add_parser("witness").add_subparsers(
        dest="subcommand", required=True, parser_class=_Parser
    )
    p = wit.add_parser("dense-orbit", parents=[common])
    p.add_argument("u1")
    p.add_argument("u2")
    p.add_argument("v1")
    p.add_argument("v2")
    p.set_defaults(run=_witness_dense_orbit)
    p = wit.add_parser("conjugation", parents=[common])
    p.add_argument("f")
    p.add_argument("u")
    p.add_argument("v")
    p.set_defaults(run=_witness_conjugation)

    return top


def _emit(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise ValidationError(f"cannot write {out}: {exc.strerror}")


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        text = args.run(args)
        _emit(text, args.out)
    except RoelckeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
