"""Command line: run the checkpoints over RAVDESS files and write a manifest."""

from __future__ import annotations

import argparse
import logging
import sys

from .errors import AdapterError
from .export import export_manifest
from .models import AudioClassifier, VideoClassifier, DEFAULT_AUDIO_WINDOW_SECONDS


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="emofuse-adapter",
        description="Export per-clip emotion probability vectors for the fusion engine",
    )
    parser.add_argument("files", nargs="+", help="RAVDESS media files (full-AV mp4)")
    parser.add_argument("--audio-checkpoint", required=True)
    parser.add_argument("--video-checkpoint", required=True)
    parser.add_argument("--out", required=True, help="manifest JSON to write")
    parser.add_argument("--device", choices=["cpu", "gpu"], default="cpu")
    parser.add_argument("--audio-accuracy", type=float, default=None,
                        help="holdout accuracy to record for the audio model")
    parser.add_argument("--video-accuracy", type=float, default=None,
                        help="holdout accuracy to record for the video model")
    parser.add_argument("--audio-window", type=float, default=DEFAULT_AUDIO_WINDOW_SECONDS,
                        help="seconds of audio fed to the model (center crop / symmetric pad)")
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        audio = AudioClassifier(args.audio_checkpoint, device=args.device,
                                window_seconds=args.audio_window)
        video = VideoClassifier(args.video_checkpoint, device=args.device)
        result = export_manifest(
            args.files,
            args.out,
            audio=audio,
            video=video,
            audio_accuracy=args.audio_accuracy,
            video_accuracy=args.video_accuracy,
        )
    except AdapterError as exc:
        print(f"emofuse-adapter: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"emofuse-adapter: error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {result.manifest_path}: {len(result.exported)} clips"
          f" ({len(result.skipped)} skipped)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
