"""Recognition and segmentation rates as Gaussian noise grows.

Trains once on clean renders, then evaluates fresh corpora at each sigma.

    python scripts/noise_sweep.py --sigmas 0 10 20 30 40 50 --lines 50
"""

import argparse

from vidtext.pipeline import evaluate, format_rate, run_pipeline, train_from_corpus
from vidtext.synth import SynthSpec, generate_corpus


def lines(spec, n):
    return [(img, truth) for _, img, truth in generate_corpus(spec, n)]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sigmas", type=float, nargs="+", default=[0, 10, 20, 30, 40, 50])
    ap.add_argument("--lines", type=int, default=50)
    ap.add_argument("--train-lines", type=int, default=30)
    ap.add_argument("--seed", type=int, default=32)
    args = ap.parse_args()

    model = train_from_corpus(lines(SynthSpec(seed=31), args.train_lines))
    print(f"{'sigma':>6} {'gaps':>9} {'boxes':>8} {'recog':>8} {'failed':>6}")
    for sigma in args.sigmas:
        test = lines(SynthSpec(seed=args.seed, noise_sigma=sigma), args.lines)
        m = evaluate([run_pipeline(img, model) for img, _ in test], [t for _, t in test])
        print(
            f"{sigma:6.1f} {m.gaps_recovered:>4}/{m.total_gaps:<4} "
            f"{format_rate(m.segmentation_rate):>8} {format_rate(m.recognition_rate):>8} {m.failed_lines:>6}"
        )


if __name__ == "__main__":
    main()
