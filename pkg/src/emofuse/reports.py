"""Render evaluation reports as byte-stable JSON, CSV, or Markdown.

Floats are written with exactly six decimals everywhere so identical reports
always serialize to identical bytes.
"""

from __future__ import annotations

import csv
import io
import json

from .core import CANONICAL_LABELS, TieBreakPolicy
from .errors import SchemaError, UnsupportedFormat
from .evaluation import METHOD_ORDER, EvaluationReport, MethodMetrics
from .fusion import DynamicMode, FusionConfig

CSV_HEADER = (
    "method",
    "n_clips",
    "accuracy",
    "macro_f1",
    "weighted_f1",
    "macro_precision",
    "macro_recall",
)

REPORT_FORMATS = ("json", "csv", "markdown")
_FORMAT_ALIASES = {"md": "markdown"}


def _ordered_methods(report: EvaluationReport) -> list[str]:
    return [m for m in METHOD_ORDER if m in report.per_method]


def _config_dict(config: FusionConfig) -> dict:
    return {
        "method": config.method,
        "video_conf_threshold": config.video_conf_threshold,
        "agreement_threshold": config.agreement_threshold,
        "weight_audio": config.weight_audio,
        "weight_video": config.weight_video,
        "dynamic_mode": config.dynamic_mode.value,
        "tie_break": config.tie_break.value,
    }


def report_to_dict(report: EvaluationReport) -> dict:
    return {
        "config_echo": _config_dict(report.config_echo),
        "manifest_digest": report.manifest_digest,
        "per_method": {
            method: {
                "accuracy": row.accuracy,
                "macro_f1": row.macro_f1,
                "weighted_f1": row.weighted_f1,
                "macro_precision": row.macro_precision,
                "macro_recall": row.macro_recall,
                "confusion": [list(r) for r in row.confusion],
                "n_clips": row.n_clips,
            }
            for method, row in report.per_method.items()
        },
    }


def _emit_json(value, indent: int) -> str:
    """json.dumps with sorted keys and floats pinned to six decimals."""
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(value, float):
        return f"{value:.6f}"
    if value is None or isinstance(value, (bool, int, str)):
        return json.dumps(value)
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        items = [f"{inner}{_emit_json(v, indent + 1)}" for v in value]
        return "[\n" + ",\n".join(items) + f"\n{pad}]"
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [
            f"{inner}{json.dumps(str(k))}: {_emit_json(value[k], indent + 1)}"
            for k in sorted(value)
        ]
        return "{\n" + ",\n".join(items) + f"\n{pad}}}"
    raise TypeError(f"cannot serialize {type(value).__name__}")


def _render_json(report: EvaluationReport) -> bytes:
    return (_emit_json(report_to_dict(report), 0) + "\n").encode("utf-8")


def _render_csv(report: EvaluationReport) -> bytes:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for method in _ordered_methods(report):
        row = report.per_method[method]
        writer.writerow(
            [
                method,
                row.n_clips,
                f"{row.accuracy:.6f}",
                f"{row.macro_f1:.6f}",
                f"{row.weighted_f1:.6f}",
                f"{row.macro_precision:.6f}",
                f"{row.macro_recall:.6f}",
            ]
        )
    return out.getvalue().encode("utf-8")


def _render_markdown(report: EvaluationReport) -> bytes:
    lines = ["# Evaluation report", ""]
    lines.append(f"Manifest digest: `{report.manifest_digest}`")
    lines.append("")
    lines.append("| " + " | ".join(CSV_HEADER) + " |")
    lines.append("|" + "|".join(["---"] * len(CSV_HEADER)) + "|")
    for method in _ordered_methods(report):
        row = report.per_method[method]
        lines.append(
            f"| {method} | {row.n_clips} | {row.accuracy:.6f} | {row.macro_f1:.6f} "
            f"| {row.weighted_f1:.6f} | {row.macro_precision:.6f} | {row.macro_recall:.6f} |"
        )
    names = [label.value for label in CANONICAL_LABELS]
    for method in _ordered_methods(report):
        lines.append("")
        lines.append(f"## Confusion: {method}")
        lines.append("")
        lines.append("| truth \\ predicted | " + " | ".join(names) + " |")
        lines.append("|" + "|".join(["---"] * (len(names) + 1)) + "|")
        for name, counts in zip(names, report.per_method[method].confusion):
            lines.append(f"| {name} | " + " | ".join(str(c) for c in counts) + " |")
    return ("\n".join(lines) + "\n").encode("utf-8")


def render_report(report: EvaluationReport, format: str) -> bytes:
    """Serialize a report; identical inputs always give identical bytes."""
    fmt = _FORMAT_ALIASES.get(format, format)
    if fmt == "json":
        return _render_json(report)
    if fmt == "csv":
        return _render_csv(report)
    if fmt == "markdown":
        return _render_markdown(report)
    raise UnsupportedFormat(f"unknown report format {format!r}")


def report_from_json(data: bytes | str) -> EvaluationReport:
    """Rebuild a report from its JSON rendering (used by the report command)."""
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"report is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise SchemaError("report root must be an object")
    try:
        cfg = doc["config_echo"]
        config = FusionConfig(
            method=cfg["method"],
            video_conf_threshold=float(cfg["video_conf_threshold"]),
            agreement_threshold=float(cfg["agreement_threshold"]),
            weight_audio=None if cfg["weight_audio"] is None else float(cfg["weight_audio"]),
            weight_video=None if cfg["weight_video"] is None else float(cfg["weight_video"]),
            dynamic_mode=DynamicMode(cfg["dynamic_mode"]),
            tie_break=TieBreakPolicy(cfg["tie_break"]),
        )
        per_method = {}
        for method, row in doc["per_method"].items():
            if method not in METHOD_ORDER:
                raise SchemaError(f"unknown method row {method!r}")
            per_method[method] = MethodMetrics(
                accuracy=float(row["accuracy"]),
                macro_f1=float(row["macro_f1"]),
                weighted_f1=float(row["weighted_f1"]),
                macro_precision=float(row["macro_precision"]),
                macro_recall=float(row["macro_recall"]),
                confusion=tuple(tuple(int(c) for c in r) for r in row["confusion"]),
                n_clips=int(row["n_clips"]),
            )
        return EvaluationReport(
            per_method=per_method,
            config_echo=config,
            manifest_digest=str(doc["manifest_digest"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"report document malformed: {exc}") from exc
