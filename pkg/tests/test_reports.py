"""Byte stability and structure of the JSON/CSV/Markdown report renderers."""

import pytest

from emofuse.errors import UnsupportedFormat
from emofuse.evaluation import EvaluationReport, MethodMetrics
from emofuse.fusion import FusionConfig
from emofuse.reports import CSV_HEADER, render_report, report_from_json


def _row(accuracy, n_clips=105):
    diag = int(round(accuracy * n_clips))
    confusion = [[0] * 6 for _ in range(6)]
    confusion[0][0] = diag
    confusion[1][0] = n_clips - diag
    return MethodMetrics(
        accuracy=accuracy,
        macro_f1=accuracy,
        weighted_f1=accuracy,
        macro_precision=accuracy,
        macro_recall=accuracy,
        confusion=tuple(tuple(r) for r in confusion),
        n_clips=n_clips,
    )


@pytest.fixture
def report():
    return EvaluationReport(
        per_method={
            "audio_only": _row(0.722633),
            "average": _row(0.5),
        },
        config_echo=FusionConfig(weight_audio=0.59, weight_video=0.88),
        manifest_digest="abc123",
    )


def test_json_render_is_byte_stable(report):
    assert render_report(report, "json") == render_report(report, "json")


def test_json_round_trip_is_byte_identical(report):
    rendered = render_report(report, "json")
    parsed = report_from_json(rendered)
    assert render_report(parsed, "json") == rendered


def test_json_fixed_six_decimal_floats(report):
    text = render_report(report, "json").decode()
    assert '"accuracy": 0.722633' in text
    assert '"macro_f1": 0.500000' in text
    assert '"weight_audio": 0.590000' in text


def test_csv_header_and_formatting(report):
    lines = render_report(report, "csv").decode().splitlines()
    assert lines[0] == ",".join(CSV_HEADER)
    assert lines[1].startswith("audio_only,105,0.722633,")
    assert lines[2].startswith("average,105,0.500000,")
    assert len(lines) == 3


def test_csv_unimodal_rows_precede_fusion_rows(report):
    lines = render_report(report, "csv").decode().splitlines()
    assert [line.split(",")[0] for line in lines[1:]] == ["audio_only", "average"]


def test_markdown_structure(report):
    text = render_report(report, "md").decode()
    summary = text.split("## Confusion:")[0].splitlines()
    data_rows = [l for l in summary if l.startswith("| audio_only") or l.startswith("| average")]
    assert len(data_rows) == 2
    assert text.count("## Confusion:") == 2
    assert "| anger | 76 | 0 | 0 | 0 | 0 | 0 |" in text


def test_unsupported_format(report):
    with pytest.raises(UnsupportedFormat):
        render_report(report, "xml")


def test_report_rendering_is_deterministic_across_formats(report):
    for fmt in ("json", "csv", "md", "markdown"):
        assert render_report(report, fmt) == render_report(report, fmt)
