"""CSV, JSON and text rendering for verdicts, tables and sweep reports."""

from __future__ import annotations

import json
from math import comb
from typing import Any, Iterable, Optional, Sequence

import pandas as pd

from k3curves.bn import BnVerdict, Witness
from k3curves.existence import MUKAI_MODELS, ExistenceVerdict
from k3curves.families import (
    FamilyVerdict,
    LinearClause,
    QuadraticClause,
    TheoremConditions,
    node_rows,
    registry,
)

OUTPUT_FORMATS = ("json", "csv", "text")

SURFACE_COLUMNS = ("n", "d", "g", "exists", "bn_general", "case_label")
FAMILY_COLUMNS = ("family", "d", "g", "admissible", "case_label")


def _cell(value: Any) -> Any:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    return value


def to_frame(rows: Iterable[dict[str, Any]], columns: Sequence[str]) -> pd.DataFrame:
    records = [[_cell(row.get(column)) for column in columns] for row in rows]
    return pd.DataFrame(records, columns=list(columns), dtype=object)


def render_csv(rows: Iterable[dict[str, Any]], columns: Sequence[str]) -> str:
    return to_frame(rows, columns).to_csv(index=False, lineterminator="\n")


def render_json(payload: Any) -> str:
    return json.dumps(payload, ensure_ascii=False) + "\n"


def render_json_lines(rows: Iterable[dict[str, Any]]) -> str:
    return "".join(render_json(row) for row in rows)


def render_text(rows: Sequence[dict[str, Any]], columns: Sequence[str]) -> str:
    if not rows:
        return " | ".join(columns) + "\n"
    frame = to_frame(rows, columns)
    return frame.to_string(index=False) + "\n"


def render_rows(rows: Sequence[dict[str, Any]], columns: Sequence[str], output: str) -> str:
    if output == "csv":
        return render_csv(rows, columns)
    if output == "json":
        return render_json_lines(_compact({column: row.get(column) for column in columns}) for row in rows)
    if output == "text":
        return render_text(rows, columns)
    raise ValueError(f"unknown output format {output!r}")


def _compact(payload: dict[str, Any]) -> dict[str, Any]:
    return {key: value for key, value in payload.items() if value is not None and value != [] and value != {}}


def witness_payload(witness: Witness) -> dict[str, Any]:
    return {
        "first": str(witness.first),
        "second": str(witness.second),
        "h0_first": witness.h0_first,
        "h0_second": witness.h0_second,
        "product": witness.product,
        "normal_form": witness.normal_form,
    }


def existence_payload(verdict: ExistenceVerdict) -> dict[str, Any]:
    return _compact(
        {
            "exists": verdict.exists,
            "case": verdict.case_label,
            "certificate": verdict.certificate,
            "picard": verdict.picard_note,
            "notes": verdict.notes,
        }
    )


def bn_payload(verdict: BnVerdict) -> dict[str, Any]:
    return _compact(
        {
            "bn_general": verdict.bn_general,
            "bn_route": verdict.route,
            "bn_detail": verdict.detail or None,
            "reduced": list(verdict.reduced) if verdict.reduced and verdict.steps else None,
            "steps": list(verdict.steps),
            "witness": witness_payload(verdict.witness) if verdict.witness else None,
        }
    )


def surface_payload(
    n: int,
    d: int,
    g: int,
    verdict: ExistenceVerdict,
    *,
    bn: Optional[BnVerdict] = None,
    bn_error: Optional[str] = None,
) -> dict[str, Any]:
    payload: dict[str, Any] = {"query": "surface", "n": n, "d": d, "g": g}
    payload.update(existence_payload(verdict))
    if bn is not None:
        payload.update(bn_payload(bn))
    if bn_error:
        payload["bn_undecided"] = bn_error
    return payload


def family_payload(label: str, d: int, g: int, literal: FamilyVerdict, derived: FamilyVerdict) -> dict[str, Any]:
    construction = derived.construction_used
    payload = {
        "query": "family",
        "family": label,
        "d": d,
        "g": g,
        "admissible": literal.admissible,
        "case": literal.clause,
        "derived_admissible": derived.admissible,
        "derived_case": derived.clause,
        "construction": construction.k3_descriptor if construction is not None else None,
        "mu": construction.mu if construction is not None else None,
        "m": construction.m if construction is not None else None,
        "rigid_curves": comb(construction.m - 2, g) if construction is not None else None,
        "notes": sorted(set(literal.notes) | set(derived.notes)),
    }
    return _compact(payload)


def _clause_text(clause: QuadraticClause | LinearClause) -> str:
    if isinstance(clause, QuadraticClause):
        sign = ">" if clause.strict else ">="
        tail = f" - {clause.offset}" if clause.offset else ""
        body = f"d^2 {sign} {clause.coefficient}g{tail}"
    else:
        slope = "g" if clause.slope_divisor == 1 else f"g/{clause.slope_divisor}"
        body = f"d > {slope} + {clause.constant}"
    return f"{body} for {clause.g_low} <= g <= {clause.g_high}"


def conditions_text(conditions: TheoremConditions) -> str:
    parts = [f"(d,g) = {pair}" for pair in sorted(conditions.special_pairs)]
    parts.extend(_clause_text(clause) for clause in (conditions.quadratic, conditions.linear))
    return "; ".join(parts)


def table_rows(which: str) -> tuple[list[dict[str, Any]], tuple[str, ...]]:
    if which == "models":
        rows = [{"genus": model.genus, "model": model.model} for model in MUKAI_MODELS.values()]
        return rows, ("genus", "model")
    if which == "families":
        rows = [
            {
                "family": item.label,
                "calabi_yau": item.cy_descriptor,
                "constructions": ", ".join(str(row) for row in item.constructions),
                "conditions": conditions_text(item.theorem_conditions),
            }
            for item in registry()
        ]
        return rows, ("family", "calabi_yau", "constructions", "conditions")
    if which == "nodes":
        rows = [{"calabi_yau": cy, "k3": k3, "m": m} for cy, k3, m in node_rows()]
        return rows, ("calabi_yau", "k3", "m")
    raise ValueError(f"unknown table {which!r}; expected models, families or nodes")


def render_table(which: str, output: str) -> str:
    rows, columns = table_rows(which)
    if output == "text":
        return "".join(" | ".join(str(row[column]) for column in columns) + "\n" for row in rows)
    return render_rows(rows, columns, output)


def _flat(value: Any) -> Any:
    if isinstance(value, (dict, list)):
        return json.dumps(value, ensure_ascii=False, sort_keys=True)
    return value


def render_payload(payload: dict[str, Any], output: str) -> str:
    """One query result in the requested format."""
    if output == "json":
        return render_json(payload)
    if output == "csv":
        return render_csv([{key: _flat(value) for key, value in payload.items()}], tuple(payload))
    if output == "text":
        return "".join(f"{key}: {_cell(_flat(value))}\n" for key, value in payload.items())
    raise ValueError(f"unknown output format {output!r}")


REPORT_COLUMNS = ("suite", "point", "message", "known")


def render_report(report: dict[str, Any], output: str) -> str:
    if output == "json":
        return render_json(report)
    rows = [
        {"suite": report["suite"], "point": " ".join(str(part) for part in item["point"]), "message": item["message"], "known": item["known"]}
        for item in report["discrepancies"]
    ]
    if output == "csv":
        return render_csv(rows, REPORT_COLUMNS)
    if output == "text":
        head = {key: value for key, value in report.items() if key != "discrepancies"}
        lines = render_payload(head, "text")
        return lines + "".join(f"- {row['point']}: {row['message']}{' (known)' if row['known'] else ''}\n" for row in rows)
    raise ValueError(f"unknown output format {output!r}")
