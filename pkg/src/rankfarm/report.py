"""Text, JSON and CSV renderings of a ranking report, plus radar-chart data."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from typing import Any, Iterable, Sequence

import numpy as np

from .ahp import RRRV, Choice, RankingReport
from .errors import SchemaError, UnsupportedFormat

SECTIONS = ("sub", "top", "groups", "final")
FORMATS = ("text", "json", "csv")

_TITLES = {
    "sub": "Relative Ranking Vectors: Sub-level Attributes",
    "top": "Group Relative Ranking Vectors: Top-level Attributes",
    "groups": "Aggregated Relative Ranking Vectors: QoS Groups",
    "final": "Final Overall AHP Ranking",
}
_FIELDS = {"sub": "sub_level_vectors", "top": "top_level_vectors", "groups": "group_vectors"}


@dataclass(frozen=True)
class KiviatData:
    service_id: str
    axes: tuple[tuple[str, float], ...]


def kiviat_export(report: RankingReport) -> list[KiviatData]:
    """One radar-chart record per service; axes are the top-level attributes."""
    names = list(report.top_level_vectors)
    return [
        KiviatData(sid, tuple((name, report.top_level_vectors[name][sid]) for name in names))
        for sid in report.service_order
    ]


def render_kiviat(records: Sequence[KiviatData], fmt: str = "json") -> bytes:
    if fmt == "json":
        payload = [
            {"service_id": r.service_id, "axes": [{"axis": a, "value": v} for a, v in r.axes]}
            for r in records
        ]
        return (json.dumps(payload, indent=2) + "\n").encode("utf-8")
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\r\n")
        axes = [a for a, _ in records[0].axes] if records else []
        writer.writerow(["service", *axes])
        for r in records:
            writer.writerow([r.service_id, *(repr(v) for _, v in r.axes)])
        return buf.getvalue().encode("utf-8")
    raise UnsupportedFormat(f"kiviat format must be json or csv, got {fmt!r}")


def _resolve_sections(sections: Iterable[str] | None) -> list[str]:
    if sections is None:
        return list(SECTIONS)
    chosen = set()
    for s in sections:
        if s == "all":
            chosen.update(SECTIONS)
        elif s in SECTIONS:
            chosen.add(s)
        else:
            raise UnsupportedFormat(f"unknown report section {s!r}")
    return [s for s in SECTIONS if s in chosen]


def _vectors_to_dict(vectors: dict[str, RRRV]) -> dict[str, dict[str, float]]:
    return {name: vec.as_dict() for name, vec in vectors.items()}


def report_to_dict(report: RankingReport, sections: Iterable[str] | None = None) -> dict[str, Any]:
    chosen = _resolve_sections(sections)
    out: dict[str, Any] = {"service_order": list(report.service_order)}
    for key in ("sub", "top", "groups"):
        if key in chosen:
            out[_FIELDS[key]] = _vectors_to_dict(getattr(report, _FIELDS[key]))
    if "final" in chosen:
        out["final"] = report.final.as_dict()
        out["choices"] = [
            {"rank": c.rank, "service_id": c.service_id, "value": c.value, "label": c.label}
            for c in report.choices
        ]
    out["warnings"] = list(report.warnings)
    out["weights"] = dict(report.weights)
    out["requested"] = dict(report.requested)
    out["consistency"] = dict(report.consistency)
    return out


def _vectors_from_dict(data: dict[str, dict[str, float]], order: tuple[str, ...]) -> dict[str, RRRV]:
    return {
        name: RRRV(name, order, np.array([float(col[s]) for s in order])) for name, col in data.items()
    }


def report_from_dict(data: dict[str, Any]) -> RankingReport:
    """Inverse of :func:`report_to_dict` for a full (all-sections) report."""
    try:
        order = tuple(data["service_order"])
        final = data["final"]
        return RankingReport(
            service_order=order,
            sub_level_vectors=_vectors_from_dict(data["sub_level_vectors"], order),
            top_level_vectors=_vectors_from_dict(data["top_level_vectors"], order),
            group_vectors=_vectors_from_dict(data["group_vectors"], order),
            final=RRRV("final", order, np.array([float(final[s]) for s in order])),
            choices=tuple(Choice(**c) for c in data["choices"]),
            warnings=tuple(data.get("warnings", [])),
            weights=dict(data.get("weights", {})),
            requested=dict(data.get("requested", {})),
            consistency=dict(data.get("consistency", {})),
        )
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"malformed report: {exc}") from None


def _text_table(header: list[str], rows: list[list[str]]) -> list[str]:
    widths = [max(len(r[i]) for r in [header, *rows]) for i in range(len(header))]

    def line(row: list[str]) -> str:
        # first column left-aligned, numbers right-aligned
        cells = [c.ljust(w) if i == 0 else c.rjust(w) for i, (c, w) in enumerate(zip(row, widths))]
        return "  ".join(cells).rstrip()

    return [line(header), "  ".join("-" * w for w in widths), *(line(r) for r in rows)]


def _render_text(report: RankingReport, chosen: list[str]) -> str:
    lines: list[str] = []
    for key in chosen:
        lines.append(_TITLES[key])
        lines.append("=" * len(_TITLES[key]))
        if key == "final":
            rows = [[c.service_id, f"{c.value:.4f}", c.label] for c in report.choices]
            lines += _text_table(["Service", "FinalRank", "DecisionPreference"], rows)
        else:
            vectors = getattr(report, _FIELDS[key])
            names = list(vectors)
            rows = [[sid] + [f"{vectors[n][sid]:.4f}" for n in names] for sid in report.service_order]
            lines += _text_table(["Service", *names], rows)
        lines.append("")
    if report.warnings:
        lines.append("Warnings")
        lines.append("========")
        lines += [f"- {w}" for w in report.warnings]
        lines.append("")
    return "\n".join(lines)


def _render_csv(report: RankingReport, chosen: list[str]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    for i, key in enumerate(chosen):
        if len(chosen) > 1:
            if i:
                writer.writerow([])
            writer.writerow([f"section={key}"])
        if key == "final":
            writer.writerow(["rank", "service", "value", "label"])
            for c in report.choices:
                writer.writerow([c.rank, c.service_id, repr(c.value), c.label])
        else:
            vectors = getattr(report, _FIELDS[key])
            names = list(vectors)
            writer.writerow(["service", *names])
            for sid in report.service_order:
                writer.writerow([sid, *(repr(vectors[n][sid]) for n in names)])
    return buf.getvalue()


def render_report(
    report: RankingReport, fmt: str = "text", sections: Iterable[str] | None = None
) -> bytes:
    if fmt not in FORMATS:
        raise UnsupportedFormat(f"format must be one of {FORMATS}, got {fmt!r}")
    chosen = _resolve_sections(sections)
    if fmt == "json":
        text = json.dumps(report_to_dict(report, chosen), indent=2) + "\n"
    elif fmt == "csv":
        text = _render_csv(report, chosen)
    else:
        text = _render_text(report, chosen)
    return text.encode("utf-8")
