"""Train on one synthetic corpus, segment and recognize a fresh one, print metrics.

    python scripts/closed_loop.py --train-lines 30 --test-lines 100 --sigma 10
"""

import argparse
import json
import time

from vidtext.pipeline import PipelineConfig, evaluate, run_pipeline, train_from_corpus
from vidtext.synth import SynthSpec, generate_corpus


def lines(spec, n):
    return [(img, truth) for _, img, truth in generate_corpus(spec, n)]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--train-seed", type=int, default=1)
    ap.add_argument("--test-seed", type=int, default=2)
    ap.add_argument("--train-lines", type=int, default=30)
    ap.add_argument("--test-lines", type=int, default=100)
    ap.add_argument("--sigma", type=float, default=0.0, help="test-corpus noise")
    ap.add_argument("--ramp", type=float, default=0.0, help="test-corpus background ramp")
    ap.add_argument("--polarity", default="dark-on-light", choices=["dark-on-light", "light-on-dark"])
    ap.add_argument("--alphabet-size", type=int, default=10)
    ap.add_argument("--max-dev", type=int, default=PipelineConfig().max_dev)
    args = ap.parse_args()

    config = PipelineConfig(max_dev=args.max_dev)
    t0 = time.perf_counter()
    train = lines(SynthSpec(seed=args.train_seed, alphabet_size=args.alphabet_size), args.train_lines)
    model = train_from_corpus(train, config)
    t_train = time.perf_counter() - t0

    test_spec = SynthSpec(
        seed=args.test_seed,
        alphabet_size=args.alphabet_size,
        noise_sigma=args.sigma,
        background_ramp=args.ramp,
        polarity=args.polarity,
    )
    test = lines(test_spec, args.test_lines)
    t0 = time.perf_counter()
    results = [run_pipeline(img, model, config) for img, _ in test]
    t_run = time.perf_counter() - t0
    metrics = evaluate(results, [t for _, t in test], config.iou)

    report = metrics.to_json()
    report["train_seconds"] = round(t_train, 2)
    report["pipeline_seconds"] = round(t_run, 2)
    print(json.dumps(report, indent=2, sort_keys=True))


if __name__ == "__main__":
    main()
