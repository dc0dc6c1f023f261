"""JSON fixture schemas and deterministic report encoding.

Every rational is serialized as "p/q" and every interval as a bracketed
string, so round-trips are exact and reports are reproducible bytes.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

from .cauchy import CauchyName, const_name, scripted_name
from .errors import ParseError
from .intervals import (
    IntervalUnion,
    RationalInterval,
    format_interval,
    format_rational,
    normalize_union,
    parse_interval,
    parse_rational,
)
from .martingales import Martingale, all_in_on_0, constant_martingale, split_bet, table_martingale
from .randomness import TestFamily, TestKind
from .ttmeasures import (
    CylinderMeasure,
    bernoulli_measure,
    table_measure,
    uniform_measure,
)

SCHEMA_VERSION = "0.1.0"


def _union_to_json(u: IntervalUnion) -> list[str]:
    return [format_interval(p) for p in u.parts]


def _union_from_json(parts: list[str]) -> IntervalUnion:
    return normalize_union(parse_interval(p) for p in parts)


def test_family_to_json(t: TestFamily) -> dict[str, Any]:
    doc: dict[str, Any] = {
        "type": "test_family",
        "schema": SCHEMA_VERSION,
        "kind": t.kind.value,
        "label": t.label,
        "components": {
            str(m): [_union_to_json(u) for u in versions]
            for m, versions in sorted(t.components.items())
        },
    }
    kd = t.kind_data
    payload: dict[str, Any] = {}
    if t.kind is TestKind.SCHNORR:
        payload["declared_measures"] = {
            str(m): format_rational(q)
            for m, q in sorted(kd.get("declared_measures", {}).items())
        }
        if kd.get("relativized"):
            payload["relativized"] = True
    elif t.kind is TestKind.SOLOVAY:
        payload["total_bound"] = format_rational(kd["total_bound"])
    elif t.kind is TestKind.INTERVAL_SEQUENCE:
        payload["blocks"] = [
            {
                "m": m,
                "r": r,
                "table": {str(k): format_interval(iv) for k, iv in sorted(tab.items())},
                "excluded": sorted(kd.get("excluded", {}).get((m, r), ())),
            }
            for (m, r), tab in sorted(kd["blocks"].items())
        ]
    elif t.kind is TestKind.PI1:
        payload["q"] = [format_rational(x) for x in kd["q"]]
        payload["C"] = [sorted(c) for c in kd["C"]]
    elif t.kind in (TestKind.DEMUTH, TestKind.WEAK_DEMUTH):
        payload["budgets"] = {
            str(m): b for m, b in sorted(kd.get("budgets", {}).items())
        }
    doc["kind_data"] = payload
    return doc


def test_family_from_json(doc: dict[str, Any]) -> TestFamily:
    if doc.get("type") != "test_family":
        raise ParseError("expected a test_family document")
    try:
        kind = TestKind(doc["kind"])
        components = {
            int(m): [_union_from_json(v) for v in versions]
            for m, versions in doc.get("components", {}).items()
        }
        payload = doc.get("kind_data", {})
        kd: dict[str, Any] = {}
        if kind is TestKind.SCHNORR:
            kd["declared_measures"] = {
                int(m): parse_rational(q)
                for m, q in payload.get("declared_measures", {}).items()
            }
            if payload.get("relativized"):
                kd["relativized"] = True
        elif kind is TestKind.SOLOVAY:
            kd["total_bound"] = parse_rational(payload["total_bound"])
        elif kind is TestKind.INTERVAL_SEQUENCE:
            blocks: dict[tuple[int, int], dict[int, RationalInterval]] = {}
            excluded: dict[tuple[int, int], frozenset[int]] = {}
            for rec in payload.get("blocks", []):
                key = (rec["m"], rec["r"])
                blocks[key] = {
                    int(k): parse_interval(iv) for k, iv in rec["table"].items()
                }
                excluded[key] = frozenset(rec.get("excluded", []))
            kd["blocks"] = blocks
            kd["excluded"] = excluded
        elif kind is TestKind.PI1:
            kd["q"] = [parse_rational(x) for x in payload["q"]]
            kd["C"] = [frozenset(c) for c in payload["C"]]
        elif kind in (TestKind.DEMUTH, TestKind.WEAK_DEMUTH):
            kd["budgets"] = {
                int(m): int(b) for m, b in payload.get("budgets", {}).items()
            }
        return TestFamily(kind, components, kd, doc.get("label", ""))
    except (KeyError, ValueError, TypeError) as exc:
        raise ParseError(f"malformed test_family fixture: {exc}") from exc


def measure_from_json(doc: dict[str, Any]) -> CylinderMeasure:
    if doc.get("type") != "measure":
        raise ParseError("expected a measure document")
    try:
        rule = doc["rule"]
        if rule == "uniform":
            return uniform_measure()
        if rule == "bernoulli":
            return bernoulli_measure(parse_rational(doc["p"]))
        if rule == "table":
            table = {s: parse_rational(q) for s, q in doc["table"].items()}
            return table_measure(doc.get("name", "table"), table)
    except (KeyError, ValueError) as exc:
        raise ParseError(f"malformed measure fixture: {exc}") from exc
    raise ParseError(f"unknown measure rule {doc.get('rule')!r}")


def martingale_from_json(doc: dict[str, Any]) -> Martingale:
    if doc.get("type") != "martingale":
        raise ParseError("expected a martingale document")
    try:
        rule = doc["rule"]
        if rule == "constant":
            return constant_martingale(parse_rational(doc["value"]))
        if rule == "all_in_on_0":
            return all_in_on_0()
        if rule == "split_bet":
            return split_bet(parse_rational(doc["p"]))
        if rule == "table":
            table = {s: parse_rational(q) for s, q in doc["table"].items()}
            return table_martingale(table, doc.get("name", "table"))
    except (KeyError, ValueError) as exc:
        raise ParseError(f"malformed martingale fixture: {exc}") from exc
    raise ParseError(f"unknown martingale rule {doc.get('rule')!r}")


def name_from_json(doc: dict[str, Any]) -> CauchyName:
    if doc.get("type") != "cauchy_name":
        raise ParseError("expected a cauchy_name document")
    try:
        if "exact" in doc and "values" not in doc:
            return const_name(parse_rational(doc["exact"]))
        values = [parse_rational(q) for q in doc["values"]]
        exact = parse_rational(doc["exact"]) if doc.get("exact") else None
        return scripted_name(values, doc.get("provenance", "fixture"), exact)
    except (KeyError, ValueError) as exc:
        raise ParseError(f"malformed cauchy_name fixture: {exc}") from exc


def load_fixture(path: str) -> dict[str, Any]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read fixture {path!r}: {exc}") from exc


def canonical_json(doc: Any) -> str:
    """Deterministic encoding: sorted keys, no locale-sensitive formatting,
    newline-terminated."""
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
