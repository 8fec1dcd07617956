"""Command-line interface: segment, recognize, train, synth, eval."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from vidtext.errors import VidTextError
from vidtext.imaging import read_image
from vidtext.model import RecognitionModel
from vidtext.pipeline import (
    PipelineConfig,
    TranscriptionResult,
    dump_overlays,
    evaluate,
    run_pipeline,
    train_from_corpus,
)
from vidtext.synth import GroundTruth, SynthSpec, read_corpus, write_corpus

IMAGE_SUFFIXES = (".pgm", ".png")


def _add_tunables(p: argparse.ArgumentParser) -> None:
    d = PipelineConfig()
    p.add_argument("--min-gap-width", type=int, default=d.min_gap_width, help="narrowest word gap in columns")
    p.add_argument("--matra-band", type=float, default=d.matra_band, help="headline band as fraction of peak")
    p.add_argument("--max-dev", type=int, default=d.max_dev, help="max seam deviation for kerned pairs")
    p.add_argument("--width-tol", type=float, default=d.width_tol, help="template width tolerance")
    p.add_argument("--dump-overlays", metavar="DIR", help="write debug PNGs here")


def _config(args) -> PipelineConfig:
    return PipelineConfig(
        min_gap_width=args.min_gap_width,
        matra_band=args.matra_band,
        max_dev=args.max_dev,
        width_tol=args.width_tol,
    )


def _inputs(path: Path) -> list[Path]:
    if path.is_dir():
        return sorted(p for p in path.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES)
    return [path]


def _process(args, model: RecognitionModel | None) -> int:
    src = Path(args.image)
    config = _config(args)
    inputs = _inputs(src)
    out = Path(args.out)
    if src.is_dir():
        out.mkdir(parents=True, exist_ok=True)
    failed = 0
    for path in inputs:
        line = read_image(path)
        result = run_pipeline(line, model, config)
        failed += not result.ok
        target = out / f"{path.stem}.json" if src.is_dir() else out
        target.write_text(result.dumps())
        if args.dump_overlays:
            dump_overlays(args.dump_overlays, path.stem, line, result)
    if failed:
        print(f"{failed} of {len(inputs)} line(s) failed structurally", file=sys.stderr)
    return 0


def cmd_segment(args) -> int:
    return _process(args, None)


def cmd_recognize(args) -> int:
    return _process(args, RecognitionModel.load(args.model))


def cmd_train(args) -> int:
    lines = [(img, truth) for _, img, truth in read_corpus(args.corpus)]
    if not lines:
        raise VidTextError(f"no *.truth.json files in {args.corpus}")
    model = train_from_corpus(
        lines, PipelineConfig(width_tol=args.width_tol), max_iter=args.max_iter, metadata={"lines": len(lines)}
    )
    model.save(args.out)
    return 0


def cmd_synth(args) -> int:
    spec = SynthSpec()
    if args.spec:
        spec = SynthSpec.from_json(json.loads(Path(args.spec).read_text()))
    spec = SynthSpec.from_json({**spec.to_json(), "seed": args.seed})
    write_corpus(spec, args.lines, args.out)
    return 0


def cmd_eval(args) -> int:
    pred_dir, truth_dir = Path(args.pred), Path(args.truth)
    truth_files = {p.name[: -len(".truth.json")]: p for p in truth_dir.glob("*.truth.json")}
    pred_files = {p.stem: p for p in pred_dir.glob("*.json") if not p.name.endswith(".truth.json")}
    pred_files.pop("corpus", None)
    if set(truth_files) != set(pred_files):
        missing = sorted(set(truth_files) ^ set(pred_files))
        raise VidTextError(f"prediction/truth ids differ: {missing[:5]}")
    ids = sorted(truth_files)
    results = [TranscriptionResult.from_json(json.loads(pred_files[i].read_text())) for i in ids]
    truths = [GroundTruth.from_json(json.loads(truth_files[i].read_text())) for i in ids]
    metrics = evaluate(results, truths, args.iou)
    print(json.dumps(metrics.to_json(), sort_keys=True, indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vidtext", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("segment", help="find words, headline, baseline and character boxes")
    p.add_argument("image", help="PNG/PGM line image, or a directory of them")
    p.add_argument("--out", required=True, help="output JSON (directory when IMAGE is one)")
    _add_tunables(p)
    p.set_defaults(func=cmd_segment)

    p = sub.add_parser("recognize", help="segment and recognize characters")
    p.add_argument("image", help="PNG/PGM line image, or a directory of them")
    p.add_argument("--model", required=True)
    p.add_argument("--out", required=True, help="output JSON (directory when IMAGE is one)")
    _add_tunables(p)
    p.set_defaults(func=cmd_recognize)

    p = sub.add_parser("train", help="train a recognition model from a labelled corpus")
    p.add_argument("--corpus", required=True, help="directory of NNNN.pgm + NNNN.truth.json")
    p.add_argument("--out", required=True, help="model JSON path")
    p.add_argument("--width-tol", type=float, default=PipelineConfig().width_tol)
    p.add_argument("--max-iter", type=int, default=10_000, help="perceptron update cap")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("synth", help="generate a synthetic corpus with ground truth")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--lines", type=int, required=True)
    p.add_argument("--spec", help="SynthSpec JSON (fields override defaults)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("eval", help="score predictions against ground truth")
    p.add_argument("--pred", required=True, help="directory of NNNN.json results")
    p.add_argument("--truth", required=True, help="directory of NNNN.truth.json")
    p.add_argument("--iou", type=float, default=PipelineConfig().iou)
    p.set_defaults(func=cmd_eval)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (VidTextError, OSError, ValueError, KeyError) as exc:
        print(f"vidtext {args.command}: {exc}", file=sys.stderr)
        return 1


cli_main = main


if __name__ == "__main__":
    sys.exit(main())
