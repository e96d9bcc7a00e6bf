"""Command-line entry point: parsing, splitting, validation, fusion,
evaluation, synthetic benchmarking, and report rendering.

Exit codes: 0 success, 1 domain/validation error (including usage errors),
2 I/O or schema error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from dataclasses import replace

from . import datasets
from .core import Modality, ModalityPrediction, ProbabilityVector, ingest, mass_from_mapping
from .errors import DomainError, EmofuseError, IoError, MalformedName, SchemaError
from .evaluation import (
    ClipRecord,
    evaluate,
    load_manifest,
    manifest_digest,
    save_manifest,
)
from .fusion import DynamicMode, FUSION_METHODS, FusionConfig, fuse
from .reports import render_report, report_from_json
from .synth import SynthParams, generate_manifest

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_IO = 2

_LOG_LEVELS = {
    "error": logging.ERROR,
    "warn": logging.WARNING,
    "info": logging.INFO,
    "debug": logging.DEBUG,
}


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; the documented contract is 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_DOMAIN)


def _configure_logging() -> None:
    level = _LOG_LEVELS.get(os.environ.get("EMOFUSE_LOG", "warn").lower(), logging.WARNING)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def _write_output(data: bytes, out: str | None) -> None:
    if out is None:
        sys.stdout.write(data.decode("utf-8"))
        return
    try:
        with open(out, "wb") as fh:
            fh.write(data)
    except OSError as exc:
        raise IoError(f"cannot write {out!r}: {exc}") from exc


def _build_config(args) -> FusionConfig:
    return FusionConfig(
        video_conf_threshold=args.video_threshold,
        agreement_threshold=args.agreement_threshold,
        weight_audio=args.weight_audio,
        weight_video=args.weight_video,
        dynamic_mode=DynamicMode(args.dynamic_mode),
    )


def _add_fusion_flags(parser) -> None:
    parser.add_argument("--video-threshold", type=float, default=0.7,
                        help="video confidence needed to bypass averaging (default 0.7)")
    parser.add_argument("--agreement-threshold", type=float, default=0.5,
                        help="confidence both models need for an agreed answer (default 0.5)")
    parser.add_argument("--weight-audio", type=float, default=None,
                        help="audio weight for weighted averaging (default: manifest model accuracy)")
    parser.add_argument("--weight-video", type=float, default=None,
                        help="video weight for weighted averaging (default: manifest model accuracy)")
    parser.add_argument("--dynamic-mode", choices=[m.value for m in DynamicMode],
                        default=DynamicMode.INVERSE_CONFIDENCE.value,
                        help="weighting rule for the dynamic method")


# --- subcommands -------------------------------------------------------------

def _cmd_parse(args) -> int:
    name = args.filename
    dataset = args.dataset
    if dataset == "auto":
        stem = os.path.splitext(os.path.basename(name))[0]
        if "_" in stem:
            dataset = "crema"
        elif "-" in stem:
            dataset = "ravdess"
        else:
            raise MalformedName(f"{name!r} matches neither filename grammar")
    if dataset == "crema":
        meta = datasets.parse_crema_filename(name)
        label = datasets.canonical_label(meta)
        doc = {
            "dataset": "crema_d",
            "actor_id": meta.actor_id,
            "sentence_code": meta.sentence_code,
            "emotion_code": meta.emotion_code,
            "intensity": meta.intensity,
            "emotion": label.value,
            "canonical": label.value,
        }
    else:
        meta = datasets.parse_ravdess_filename(name)
        label = datasets.canonical_label(meta)
        doc = {
            "dataset": "ravdess",
            "modality": meta.modality.name.lower(),
            "vocal_channel": meta.vocal_channel.name.lower(),
            "emotion_code": meta.emotion_code,
            "emotion": meta.emotion_name,
            "intensity": meta.intensity.name.lower(),
            "statement": meta.statement,
            "repetition": meta.repetition,
            "actor": meta.actor,
            "sex": meta.sex,
            "canonical": label.value if label is not None else "unsupported",
        }
    print(json.dumps(doc, sort_keys=True))
    return EXIT_OK


def _read_file_list(args) -> list[str]:
    if args.files is not None:
        try:
            with open(args.files, encoding="utf-8") as fh:
                return [line.strip() for line in fh if line.strip()]
        except OSError as exc:
            raise IoError(f"cannot read {args.files!r}: {exc}") from exc
    try:
        return sorted(os.listdir(args.dir))
    except OSError as exc:
        raise IoError(f"cannot list {args.dir!r}: {exc}") from exc


def _cmd_split(args) -> int:
    files = _read_file_list(args)
    manifest = datasets.build_holdout_split(
        files, holdout_size=args.holdout_size, seed=args.seed, include_song=args.include_song
    )
    data = (json.dumps(manifest.to_dict(), sort_keys=True, indent=2) + "\n").encode("utf-8")
    _write_output(data, args.out)
    return EXIT_OK


def _cmd_validate(args) -> int:
    manifest = load_manifest(args.manifest)
    bimodal = sum(1 for c in manifest.clips if c.audio is not None and c.video is not None)
    doc = {
        "valid": True,
        "n_clips": len(manifest.clips),
        "n_bimodal": bimodal,
        "digest": manifest_digest(manifest),
    }
    print(json.dumps(doc, sort_keys=True))
    return EXIT_OK


def _parse_probs_flag(text: str, flag: str) -> ProbabilityVector:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DomainError(f"{flag} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise DomainError(f"{flag} must be a JSON object of label -> probability")
    return ingest(mass_from_mapping(doc), context=f"{flag}: ")


def _cmd_fuse(args) -> int:
    audio = ModalityPrediction.from_probs(
        Modality.AUDIO, _parse_probs_flag(args.audio_probs, "--audio-probs")
    )
    video = ModalityPrediction.from_probs(
        Modality.VIDEO, _parse_probs_flag(args.video_probs, "--video-probs")
    )
    config = replace(_build_config(args), method=args.method)
    # Fusion never looks at the ground truth; any label satisfies the record.
    clip = ClipRecord(
        clip_id="cli", dataset="synthetic", ground_truth=audio.label, audio=audio, video=video
    )
    result = fuse(clip, config)
    doc = {
        "method": result.method,
        "label": result.label.value,
        "confidence": round(result.confidence, 6),
        "provenance": result.provenance.value,
        "fused_probs": (
            None
            if result.fused_probs is None
            else {k: round(v, 6) for k, v in result.fused_probs.as_dict().items()}
        ),
    }
    print(json.dumps(doc, sort_keys=True))
    return EXIT_OK


def _cmd_evaluate(args) -> int:
    manifest = load_manifest(args.manifest)
    report = evaluate(manifest, args.methods, _build_config(args))
    _write_output(render_report(report, args.format), args.out)
    return EXIT_OK


def _cmd_synth(args) -> int:
    params = SynthParams(
        n_clips=args.n,
        acc_audio=args.acc_audio,
        acc_video=args.acc_video,
        seed=args.seed,
        peak_low=args.peak_low,
        peak_high=args.peak_high,
        confidence_informativeness=args.confidence_informativeness,
    )
    manifest = generate_manifest(params)
    digest = save_manifest(manifest, args.out)
    print(digest)
    return EXIT_OK


def _cmd_report(args) -> int:
    try:
        with open(args.report, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise IoError(f"cannot read {args.report!r}: {exc}") from exc
    report = report_from_json(data)
    _write_output(render_report(report, args.format), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="emofuse", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("parse", help="decode a dataset filename")
    p.add_argument("filename")
    p.add_argument("--dataset", choices=["crema", "ravdess", "auto"], default="auto")
    p.set_defaults(func=_cmd_parse)

    p = sub.add_parser("split", help="build a train/holdout split from RAVDESS names")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--files", help="newline-delimited list of file names")
    group.add_argument("--dir", help="directory whose listing supplies the names")
    p.add_argument("--holdout-size", type=int, default=105)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--include-song", action="store_true",
                   help="keep song-channel files instead of dropping them")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_split)

    p = sub.add_parser("validate", help="validate a probability manifest")
    p.add_argument("--manifest", required=True)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("fuse", help="fuse one pair of probability vectors")
    p.add_argument("--audio-probs", required=True, help='JSON object, e.g. {"anger": 0.6, "happy": 0.4}')
    p.add_argument("--video-probs", required=True)
    p.add_argument("--method", choices=list(FUSION_METHODS), default="average")
    _add_fusion_flags(p)
    p.set_defaults(func=_cmd_fuse)

    p = sub.add_parser("evaluate", help="score fusion methods over a manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--methods", default="all", help='"all" or a comma-separated list')
    p.add_argument("--format", choices=["json", "csv", "md"], default="json")
    p.add_argument("--out", default=None)
    _add_fusion_flags(p)
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("synth", help="generate a synthetic manifest")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--acc-audio", type=float, required=True)
    p.add_argument("--acc-video", type=float, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--peak-low", type=float, default=0.5)
    p.add_argument("--peak-high", type=float, default=0.95)
    p.add_argument("--confidence-informativeness", type=float, default=0.25)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("report", help="re-render a saved JSON report")
    p.add_argument("report", help="path to a report rendered as JSON")
    p.add_argument("--format", choices=["json", "csv", "md"], default="md")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_report)

    return parser


def main(argv=None) -> int:
    _configure_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (SchemaError, IoError) as exc:
        print(f"emofuse: error: {exc}", file=sys.stderr)
        return EXIT_IO
    except DomainError as exc:
        print(f"emofuse: error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except EmofuseError as exc:  # pragma: no cover - defensive catch-all
        print(f"emofuse: error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"emofuse: error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
