"""Command-line front end.

Exit codes: 0 success, 1 verification findings (or a failed ``--check``),
2 parse/config/input errors, 3 classification precondition not met,
4 UNCLASSIFIED set.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence, TextIO

from .classify import (
    Case,
    RelationError,
    classify_small_doubling,
    construct_case_i,
    construct_case_ii,
    construct_case_iii,
)
from .core import FiniteSubset, doubling_report, square
from .groups import (
    BS12,
    FIB,
    HEIS,
    Element,
    GroupError,
    GroupTag,
    ParseError,
    generators,
    parse_element,
    parse_tag,
)
from .search import (
    BallSpec,
    Kind,
    VerificationTask,
    enumerate_ball,
    run_tasks,
    summary_csv,
)

log = logging.getLogger("smalldoubling")

EXIT_OK = 0
EXIT_FINDINGS = 1
EXIT_USAGE = 2
EXIT_PRECONDITION = 3
EXIT_UNCLASSIFIED = 4


class InputError(Exception):
    """Bad set file, config or command-line value. Maps to exit code 2."""


# ---------------------------------------------------------------------------
# Set files


def parse_setfile(text: str, source: str = "<input>") -> FiniteSubset:
    """Parse a ``group:`` header followed by one literal per line.

    Duplicates are dropped with a warning naming the lines involved.
    """
    tag: Optional[GroupTag] = None
    seen: dict[Element, list[int]] = {}
    order: list[Element] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if tag is None:
            key, sep, value = line.partition(":")
            if not sep or key.strip().lower() != "group":
                raise InputError(f"{source}:{lineno}: expected 'group: <tag>' header")
            try:
                tag = parse_tag(value)
            except GroupError as exc:
                raise InputError(f"{source}:{lineno}: {exc}") from None
            continue
        try:
            g = parse_element(tag, line)
        except ParseError as exc:
            col = raw.index(line) + exc.pos + 1
            raise InputError(f"{source}:{lineno}:{col}: {exc}") from None
        except GroupError as exc:
            raise InputError(f"{source}:{lineno}: {exc}") from None
        if g in seen:
            seen[g].append(lineno)
        else:
            seen[g] = [lineno]
            order.append(g)
    if tag is None:
        raise InputError(f"{source}: missing 'group:' header")
    for g, lines in seen.items():
        if len(lines) > 1:
            log.warning(
                "%s: duplicate element %s on lines %s, keeping one",
                source, g, ", ".join(map(str, lines)),
            )
    if not order:
        raise InputError(f"{source}: set is empty")
    return FiniteSubset.of(order)


def format_setfile(s: FiniteSubset) -> str:
    return f"group: {s.tag}\n" + "".join(lit + "\n" for lit in s.literals())


def _read(path: str) -> tuple[str, str]:
    if path == "-":
        return sys.stdin.read(), "<stdin>"
    try:
        return Path(path).read_text(), path
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


# ---------------------------------------------------------------------------
# Run configs


GLOBAL_KEYS = {"workers", "summary", "findings", "timing"}
TASK_KEYS = {"group", "ball", "k", "certificate", "triple", "expect", "alpha", "beta"}


@dataclass
class RunConfig:
    tasks: list[VerificationTask] = field(default_factory=list)
    workers: int = 1
    summary: Optional[str] = None
    findings: Optional[str] = None
    timing: bool = False


def _bool(value: str, where: str) -> bool:
    v = value.lower()
    if v in ("true", "yes", "1", "on"):
        return True
    if v in ("false", "no", "0", "off"):
        return False
    raise InputError(f"{where}: expected a boolean, got {value!r}")


def _int(value: str, where: str, minimum: Optional[int] = None) -> int:
    try:
        n = int(value)
    except ValueError:
        raise InputError(f"{where}: expected an integer, got {value!r}") from None
    if minimum is not None and n < minimum:
        raise InputError(f"{where}: must be at least {minimum}")
    return n


def _literals(tag: GroupTag, value: str, where: str) -> tuple[Element, ...]:
    try:
        return tuple(parse_element(tag, part) for part in value.split("|"))
    except GroupError as exc:
        raise InputError(f"{where}: {exc}") from None


def _build_tasks(block: dict[str, tuple[str, str]], kind_text: str, where: str) -> list[VerificationTask]:
    try:
        kind = Kind(kind_text.strip().upper())
    except ValueError:
        known = ", ".join(k.value for k in Kind)
        raise InputError(f"{where}: unknown task kind {kind_text!r} (known: {known})") from None
    if kind is Kind.CONVERSES:
        extra = set(block)
        if extra:
            raise InputError(f"{where}: CONVERSES takes no options, got {', '.join(sorted(extra))}")
        return [VerificationTask(kind, HEIS, None, 0)]

    def need(key: str) -> tuple[str, str]:
        if key not in block:
            raise InputError(f"{where}: {kind.value} task needs '{key}'")
        return block[key]

    gval, gwhere = need("group")
    try:
        tag = parse_tag(gval)
    except GroupError as exc:
        raise InputError(f"{gwhere}: {exc}") from None
    bval, bwhere = need("ball")
    try:
        ball = BallSpec.parse(tag, bval)
    except GroupError as exc:
        raise InputError(f"{bwhere}: {exc}") from None

    opts: dict = {}
    if "certificate" in block:
        opts["certificate"] = _literals(tag, *block["certificate"])
    if "triple" in block:
        opts["triple"] = _literals(tag, *block["triple"])
    if "expect" in block:
        val, w = block["expect"]
        names = tuple(p.strip().upper() for p in val.split("|"))
        for n in names:
            if n not in Case.__members__:
                raise InputError(f"{w}: unknown case {n!r}")
        opts["expect"] = names
    for key in ("alpha", "beta"):
        if key in block:
            opts[key] = _int(*block[key])

    if kind is Kind.LEMMA_EXT:
        if "triple" not in opts:
            raise InputError(f"{where}: LEMMA_EXT task needs 'triple'")
        return [VerificationTask(kind, tag, ball, 4, **opts)]

    if kind is Kind.TRIPLE_PROPS and "k" not in block:
        ks = [3]
    elif kind is Kind.PROP11_CERT and "k" not in block:
        ks = [5]
    else:
        kval, kwhere = need("k")
        ks = [_int(p.strip(), kwhere, 1) for p in kval.split(",")]
    return [VerificationTask(kind, tag, ball, k, **opts) for k in ks]


def parse_config(text: str, source: str = "<config>") -> RunConfig:
    cfg = RunConfig()
    current: Optional[tuple[str, str]] = None
    block: dict[str, tuple[str, str]] = {}

    def flush() -> None:
        if current is not None:
            cfg.tasks.extend(_build_tasks(block, current[0], current[1]))

    for lineno, raw in enumerate(text.splitlines(), 1):
        where = f"{source}:{lineno}"
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip().lower(), value.strip()
        if not sep or not key:
            raise InputError(f"{where}: expected 'key = value'")
        if key == "task":
            flush()
            current, block = (value, where), {}
        elif key in GLOBAL_KEYS and current is None:
            if key == "workers":
                cfg.workers = _int(value, where, 1)
            elif key == "timing":
                cfg.timing = _bool(value, where)
            else:
                setattr(cfg, key, value)
        elif key in TASK_KEYS and current is not None:
            if key in block:
                raise InputError(f"{where}: '{key}' given twice in one task")
            block[key] = (value, where)
        elif key in GLOBAL_KEYS:
            raise InputError(f"{where}: global key '{key}' must come before the first task")
        elif key in TASK_KEYS:
            raise InputError(f"{where}: '{key}' outside a task block")
        else:
            raise InputError(f"{where}: unknown key '{key}'")
    flush()
    return cfg


def bundled_config(name: str) -> str:
    try:
        return resources.files("smalldoubling").joinpath("data", name).read_text()
    except (FileNotFoundError, IsADirectoryError):
        raise InputError(f"no bundled config named {name!r}") from None


# ---------------------------------------------------------------------------
# Commands


def cmd_square(args: argparse.Namespace, out: TextIO) -> int:
    s = parse_setfile(*_read(args.setfile))
    rep = doubling_report(s)
    flag = lambda b: "hit" if b else "miss"  # noqa: E731
    out.write(
        f"|S|={rep.k} |S^2|={rep.square_size} "
        f"3k-4={flag(rep.meets_3k_minus_4)} 3k-3={flag(rep.exactly_3k_minus_3)} "
        f"3k-2={flag(rep.exactly_3k_minus_2)} "
        f"commuting={'yes' if rep.pairwise_commuting else 'no'}\n"
    )
    if args.list:
        for lit in square(s).literals():
            out.write(lit + "\n")
    return EXIT_OK


def cmd_classify(args: argparse.Namespace, out: TextIO) -> int:
    s = parse_setfile(*_read(args.setfile))
    k, sq = len(s), len(square(s))
    if k < 4:
        out.write(f"precondition failed: |S|={k}, need |S| >= 4\n")
        return EXIT_PRECONDITION
    if sq != 3 * k - 2:
        out.write(f"precondition failed: |S^2|={sq}, need 3|S|-2={3 * k - 2}\n")
        return EXIT_PRECONDITION
    res = classify_small_doubling(s)
    out.write(res.to_json() + "\n")
    if res.case is Case.UNCLASSIFIED:
        log.error("UNCLASSIFIED set with |S^2| = 3|S|-2: potential counterexample")
        return EXIT_UNCLASSIFIED
    return EXIT_OK


_CASE_DEFAULT_GROUP = {
    "case-i": HEIS,
    "case-ii": BS12,
    "case-iii-a": FIB,
    "case-iii-b": BS12,
    "case-iii-c": None,
    "case-iii-d": None,
}


def _element(tag: GroupTag, text: Optional[str], default: Optional[Element], name: str) -> Element:
    if text is None:
        if default is None:
            raise InputError(f"--{name} is required here")
        return default
    try:
        return parse_element(tag, text)
    except GroupError as exc:
        raise InputError(f"--{name}: {exc}") from None


def cmd_construct(args: argparse.Namespace, out: TextIO) -> int:
    case = args.case
    if args.group:
        try:
            tag = parse_tag(args.group)
        except GroupError as exc:
            raise InputError(str(exc)) from None
    else:
        tag = _CASE_DEFAULT_GROUP[case]
        if tag is None:
            raise InputError(f"{case} needs --group")
    gens = generators(tag)
    ga, gb, gc = gens.get("a"), gens.get("b"), gens.get("c")

    def el(name: str, default: Optional[Element]) -> Element:
        return _element(tag, getattr(args, name), default, name)

    try:
        if case == "case-i":
            s = construct_case_i(
                el("a", ga), el("b", gb), el("c", gc), args.i, args.j, args.orientation or "AB_BAC"
            )
        elif case == "case-ii":
            s = construct_case_ii(el("x", gb), el("c", ga), args.k)
        elif case == "case-iii-a":
            s = construct_case_iii("a", x=el("x", gb), c=el("c", ga), variant=args.variant or "X")
        elif case == "case-iii-b":
            s = construct_case_iii("b", c=el("c", ga), x=el("x", gb))
        else:
            s = construct_case_iii(
                case[-1], x=el("x", None), c=el("c", None), y=el("y", None), orientation=args.orientation
            )
    except RelationError as exc:
        for v in exc.violations:
            print(f"error: {v}", file=sys.stderr)
        return EXIT_USAGE
    except (GroupError, KeyError) as exc:
        raise InputError(str(exc)) from None
    out.write(format_setfile(s))
    if args.check:
        k, sq = len(s), len(square(s))
        if case in ("case-iii-c", "case-iii-d"):
            print(f"check: |S|={k} |S^2|={sq} (no equality claimed)", file=sys.stderr)
            return EXIT_OK
        ok = sq == 3 * k - 2
        print(f"check: |S|={k} |S^2|={sq} 3|S|-2={3 * k - 2} {'ok' if ok else 'FAIL'}", file=sys.stderr)
        return EXIT_OK if ok else EXIT_FINDINGS
    return EXIT_OK


def cmd_verify(args: argparse.Namespace, out: TextIO) -> int:
    if args.bundled:
        cfg = parse_config(bundled_config(args.config), f"bundled:{args.config}")
    else:
        cfg = parse_config(*_read(args.config))
    if args.workers is not None:
        if args.workers < 1:
            raise InputError("--workers must be at least 1")
        cfg.workers = args.workers
    for key in ("summary", "findings"):
        if getattr(args, key) is not None:
            setattr(cfg, key, getattr(args, key))
    if args.timing:
        cfg.timing = True

    sink = open(cfg.findings, "w") if cfg.findings else None
    try:
        def emit(f) -> None:
            line = f.to_json() + "\n"
            if sink is not None:
                sink.write(line)
                sink.flush()
            else:
                sys.stderr.write(line)

        summaries = run_tasks(cfg.tasks, cfg.workers, emit)
    finally:
        if sink is not None:
            sink.close()

    csv_text = summary_csv(summaries, cfg.timing)
    if cfg.summary:
        Path(cfg.summary).write_text(csv_text)
    else:
        out.write(csv_text)
    errors = [s for s in summaries if s.error]
    for s in errors:
        log.error("task %s on %s failed: %s", s.task.kind.value, s.task.tag, s.error)
    nfind = sum(len(s.findings) for s in summaries)
    if nfind:
        log.warning("%d finding(s)", nfind)
    if errors:
        return EXIT_USAGE
    return EXIT_FINDINGS if nfind else EXIT_OK


def cmd_enumerate(args: argparse.Namespace, out: TextIO) -> int:
    try:
        tag = parse_tag(args.group)
        ball = BallSpec.parse(tag, args.ball)
    except GroupError as exc:
        raise InputError(str(exc)) from None
    s = enumerate_ball(ball)
    if args.count:
        out.write(f"{len(s)}\n")
    else:
        out.write(format_setfile(s))
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="smalldoubling",
        description="Small doubling sets in ordered groups: squares, classification, exhaustive checks.",
    )
    p.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = p.add_subparsers(dest="command", required=True)

    sq = sub.add_parser("square", help="size of S^2 and threshold flags")
    sq.add_argument("setfile", help="set file, or - for stdin")
    sq.add_argument("--list", action="store_true", help="also print S^2, sorted")
    sq.set_defaults(func=cmd_square)

    cl = sub.add_parser("classify", help="classify a set with |S^2| = 3|S|-2")
    cl.add_argument("setfile")
    cl.set_defaults(func=cmd_classify)

    co = sub.add_parser("construct", help="emit a set from case witnesses")
    co.add_argument("case", choices=sorted(_CASE_DEFAULT_GROUP))
    co.add_argument("--group")
    for name in ("a", "b", "c", "x", "y"):
        co.add_argument(f"--{name}", metavar="LITERAL")
    co.add_argument("--i", type=int, default=1)
    co.add_argument("--j", type=int, default=1)
    co.add_argument("--k", type=int, default=4)
    co.add_argument("--orientation")
    co.add_argument("--variant", choices=["X", "X_INV"])
    co.add_argument("--check", action="store_true", help="verify |S^2| = 3|S|-2")
    co.set_defaults(func=cmd_construct)

    ve = sub.add_parser("verify", help="run verification tasks from a config")
    ve.add_argument("config", help="config path, or a bundled name with --bundled")
    ve.add_argument("--bundled", action="store_true", help="read a config shipped with the package (e.g. desk.cfg)")
    ve.add_argument("--workers", type=int)
    ve.add_argument("--summary", help="CSV summary path (default stdout)")
    ve.add_argument("--findings", help="JSONL findings path (default stderr)")
    ve.add_argument("--timing", action="store_true", help="record wall time in the CSV")
    ve.set_defaults(func=cmd_verify)

    en = sub.add_parser("enumerate", help="dump a ball as a set file")
    en.add_argument("--group", required=True)
    en.add_argument("--ball", required=True, help="zd: LO..HI or R; others: comma-separated bounds")
    en.add_argument("--count", action="store_true")
    en.set_defaults(func=cmd_enumerate)
    return p


def main(argv: Optional[Sequence[str]] = None, out: TextIO | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args, out or sys.stdout)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
