"""labcli: load fixtures, run exact property suites, emit deterministic reports.

All numeric evidence in reports is rendered as "p/q" strings.  Records are
sorted by a canonical key before encoding, so worker counts and scheduling
never change the output bytes.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import os
import sys
from fractions import Fraction
from typing import Any, Optional

from . import derivatives, markov, martingales, randomness, serialize, ttmeasures
from .errors import ParseError, RandlabError
from .intervals import format_interval, format_rational, parse_rational, RationalInterval

VERSION = "0.1.0"
FIXTURE_DIR_ENV = "LABCLI_FIXTURE_DIR"


def _resolve(path: str) -> str:
    if os.path.isabs(path) or os.path.exists(path):
        return path
    base = os.environ.get(FIXTURE_DIR_ENV)
    if base:
        candidate = os.path.join(base, path)
        if os.path.exists(candidate):
            return candidate
    return path


def _record(name: str, passed: bool, detail: str = "") -> dict[str, str]:
    return {"name": name, "status": "PASS" if passed else "FAIL", "detail": detail}


def _verify_test_family(doc: dict[str, Any], tag: str, depth: int) -> list[dict]:
    t = serialize.test_family_from_json(doc)
    records = []
    for event in doc.get("updates", []):
        m = event["m"]
        u = serialize._union_from_json(event["union"])
        try:
            t = randomness.demuth_update(t, m, u)
            records.append(_record(f"{tag}:update[m={m}]", True))
        except RandlabError as exc:
            records.append(_record(f"{tag}:update[m={m}]", False, str(exc)))
    rep = randomness.validate(t)
    records.extend(
        _record(f"{tag}:{r.name}", r.passed, r.detail) for r in rep.records
    )
    return records


def _verify_measure(doc: dict[str, Any], tag: str, depth: int) -> list[dict]:
    mu = serialize.measure_from_json(doc)
    checks = ttmeasures.validate_measure(mu, min(depth, 6))
    return [_record(f"{tag}:{c.name}", c.passed, c.detail) for c in checks]


def _verify_martingale(doc: dict[str, Any], tag: str, depth: int) -> list[dict]:
    m = serialize.martingale_from_json(doc)
    d = min(depth, 8)
    rep = martingales.check_fairness(m, d)
    records = [_record(f"{tag}:fairness_to_depth_{d}", rep.ok, rep.violation or "")]
    level_sum = sum(
        (m.value(format(i, f"0{d}b")) for i in range(2**d)), Fraction(0)
    )
    expected = 2**d * m.initial_capital
    records.append(
        _record(
            f"{tag}:level_sum_depth_{d}",
            level_sum == expected,
            f"{format_rational(level_sum)} vs {format_rational(expected)}",
        )
    )
    return records


def _verify_name(doc: dict[str, Any], tag: str, depth: int) -> list[dict]:
    z = serialize.name_from_json(doc)
    d = min(depth, 16)
    ok, detail = True, ""
    for n in range(d + 1):
        for k in range(n, d + 1):
            gap = abs(z.at(k) - z.at(n))
            if gap > Fraction(1, 2**n):
                ok, detail = False, f"|q_{k} - q_{n}| = {format_rational(gap)}"
                break
        if not ok:
            break
    return [_record(f"{tag}:cauchy_contract_to_{d}", ok, detail)]


_VERIFIERS = {
    "test_family": _verify_test_family,
    "measure": _verify_measure,
    "martingale": _verify_martingale,
    "cauchy_name": _verify_name,
}


def verify_fixture(path: str, depth: int) -> list[dict]:
    doc = serialize.load_fixture(_resolve(path))
    kind = doc.get("type")
    verifier = _VERIFIERS.get(kind)
    if verifier is None:
        raise ParseError(f"{path}: unknown fixture type {kind!r}")
    tag = os.path.basename(path)
    return verifier(doc, tag, depth)


def cmd_verify(args: argparse.Namespace) -> tuple[list[dict], dict]:
    records: list[dict] = []
    for path in args.fixture:
        records.extend(verify_fixture(path, args.depth))
    return records, {}


def cmd_evaluate(args: argparse.Namespace) -> tuple[list[dict], dict]:
    t = serialize.test_family_from_json(serialize.load_fixture(_resolve(args.fixture[0])))
    z = serialize.name_from_json(serialize.load_fixture(_resolve(args.name)))
    summary = randomness.evaluate(t, z, args.depth)
    records = [
        _record(
            f"component[m={m}]",
            v.result is not randomness.VerdictResult.UNDECIDED_AT_DEPTH,
            v.result.value
            + "".join(f" via {format_interval(iv)}" for _, iv in v.witnesses),
        )
        for m, v in sorted(summary.per_component.items())
    ]
    output = {
        "captured": list(summary.captured),
        "escaped": list(summary.escaped),
        "undecided": list(summary.undecided),
        "convention": summary.convention,
        "note": summary.note,
    }
    return records, output


def cmd_transport(args: argparse.Namespace) -> tuple[list[dict], dict]:
    mu = serialize.measure_from_json(serialize.load_fixture(_resolve(args.measure)))
    res = ttmeasures.transport(mu, args.prefix)
    output = {
        "c_prefix": res.c_prefix,
        "status": res.status.value,
        "image": format_interval(
            RationalInterval(res.image_lo, res.image_hi, False, True)
        ),
    }
    records = [
        _record(
            f"transport[{args.prefix}]",
            res.status is ttmeasures.TransportStatus.OK,
            f"-> {res.c_prefix!r}, image {output['image']}",
        )
    ]
    return records, output


def cmd_derive(args: argparse.Namespace) -> tuple[list[dict], dict]:
    f = markov.function_by_name(args.function)
    from .cauchy import const_name

    z = const_name(parse_rational(args.at))
    est = derivatives.pseudo_derivative(
        f, z, parse_rational(args.scale), args.precision
    )
    verdict = derivatives.classify_denjoy(est, parse_rational(args.tol))
    output = {
        "upper": "inf" if est.upper_infinite else format_rational(est.upper),
        "lower": "-inf" if est.lower_infinite else format_rational(est.lower),
        "scale": format_rational(est.scale),
        "grid": est.grid_denominator,
        "flags": [est.upper_infinite, est.lower_infinite],
        "verdict": verdict.value,
    }
    records = [
        _record(
            f"derive[{args.function}@{args.at}]",
            verdict is not derivatives.DenjoyVerdict.UNRESOLVED,
            verdict.value,
        )
    ]
    return records, output


def cmd_tree(args: argparse.Namespace) -> tuple[list[dict], dict]:
    f = markov.function_by_name(args.function)
    tree = markov.oscillation_tree(f, args.precision, args.depth)
    closed = all(s[:-1] in tree or s == "" for s in tree)
    records = [_record("downward_closed", closed, f"{len(tree)} strings")]
    return records, {"strings": sorted(tree, key=lambda s: (len(s), s))}


def cmd_convert(args: argparse.Namespace) -> tuple[list[dict], dict]:
    t = serialize.test_family_from_json(serialize.load_fixture(_resolve(args.fixture[0])))
    if t.kind is randomness.TestKind.SOLOVAY:
        out = randomness.convert_solovay_to_ml(t, args.depth)
    elif t.kind is randomness.TestKind.INTERVAL_SEQUENCE:
        out = randomness.interval_sequence_to_schnorr(t, args.depth)
    else:
        raise ParseError(f"no conversion from kind {t.kind.value}")
    rep = randomness.validate(out)
    records = [
        _record(f"converted:{r.name}", r.passed, r.detail) for r in rep.records
    ]
    return records, {"result": serialize.test_family_to_json(out)}


def cmd_report(args: argparse.Namespace) -> tuple[list[dict], dict]:
    base = args.fixture_dir or os.environ.get(FIXTURE_DIR_ENV) or "fixtures"
    paths = sorted(
        os.path.join(base, f) for f in os.listdir(base) if f.endswith(".json")
    )
    workers = max(1, args.workers)
    if workers == 1:
        batches = [verify_fixture(p, args.depth) for p in paths]
    else:
        with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
            batches = list(pool.map(lambda p: verify_fixture(p, args.depth), paths))
    records = [r for batch in batches for r in batch]
    records.sort(key=lambda r: r["name"])
    return records, {"fixtures": [os.path.basename(p) for p in paths]}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="labcli",
        description="exact-arithmetic lab for interval tests, transports, "
        "and derivative estimates",
    )
    parser.add_argument("--format", choices=("json", "text"), default="json")
    parser.add_argument("--out", default=None)
    # accepted on either side of the subcommand; SUPPRESS keeps the
    # subparser from clobbering a value parsed at the top level
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--format", choices=("json", "text"), default=argparse.SUPPRESS
    )
    common.add_argument("--out", default=argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser(
        "verify", help="validate fixture invariants exactly", parents=[common]
    )
    p.add_argument("--fixture", action="append", required=True)
    p.add_argument("--depth", type=int, default=8)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("evaluate", help="membership of a point in a test", parents=[common])
    p.add_argument("--fixture", action="append", required=True)
    p.add_argument("--name", required=True, help="cauchy_name fixture path")
    p.add_argument("--depth", type=int, default=8)
    p.set_defaults(fn=cmd_evaluate)

    p = sub.add_parser("transport", help="transport a dyadic prefix along a cdf", parents=[common])
    p.add_argument("--measure", required=True)
    p.add_argument("--prefix", required=True)
    p.set_defaults(fn=cmd_transport)

    p = sub.add_parser("derive", help="pseudo-derivative estimate", parents=[common])
    p.add_argument("--function", required=True)
    p.add_argument("--at", required=True)
    p.add_argument("--scale", default="1/1024")
    p.add_argument("--precision", type=int, default=14)
    p.add_argument("--tol", default="1/16")
    p.set_defaults(fn=cmd_derive)

    p = sub.add_parser("tree", help="oscillation tree of a function", parents=[common])
    p.add_argument("--function", required=True)
    p.add_argument("--precision", type=int, default=0)
    p.add_argument("--depth", type=int, default=8)
    p.set_defaults(fn=cmd_tree)

    p = sub.add_parser("convert", help="between test formalisms", parents=[common])
    p.add_argument("--fixture", action="append", required=True)
    p.add_argument("--depth", type=int, default=8)
    p.set_defaults(fn=cmd_convert)

    p = sub.add_parser("report", help="verify every fixture in a directory", parents=[common])
    p.add_argument("--fixture-dir", default=None)
    p.add_argument("--depth", type=int, default=8)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(fn=cmd_report)

    return parser


def render(command: str, records: list[dict], output: dict, fmt: str) -> str:
    records = sorted(records, key=lambda r: r["name"])
    failed = sum(1 for r in records if r["status"] == "FAIL")
    doc = {
        "command": command,
        "version": VERSION,
        "records": records,
        "summary": {"total": len(records), "passed": len(records) - failed, "failed": failed},
    }
    if output:
        doc["output"] = output
    if fmt == "json":
        return serialize.canonical_json(doc)
    lines = [f"{r['status']} {r['name']} {r['detail']}".rstrip() for r in records]
    lines.append(f"{len(records) - failed}/{len(records)} checks passed")
    return "\n".join(lines) + "\n"


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        records, output = args.fn(args)
    except ParseError as exc:
        sys.stderr.write(f"labcli: {exc}\n")
        return 2
    except RandlabError as exc:
        sys.stderr.write(f"labcli: {exc}\n")
        return 1
    text = render(args.command, records, output, args.format)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if all(r["status"] == "PASS" for r in records) else 1


if __name__ == "__main__":
    sys.exit(main())
