"""Track reconstruction quality while structures are removed gradually.

Every step removes 5 to 10 percent of the structures found in the current
mask. The small 64x64 mask and nearest-neighbour reconstruction keep this
quick; pass ``--algorithm fsr --mask-size 256`` for the full-size run
(several minutes per image).

    python3 demos/03_stepwise.py
"""
import argparse

from skimage import data

from quartermask import OptimizerConfig, make_random
from quartermask.evaluation import experiment_stepwise


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--mask-size", type=int, default=64)
    parser.add_argument("--steps", type=int, default=10)
    parser.add_argument("--algorithm", default="nearest")
    args = parser.parse_args()

    corpus = [("camera", data.camera().astype(float)), ("brick", data.brick().astype(float))]
    variants = {
        "all": OptimizerConfig(seed=0, mode="fractional"),
        "8void": OptimizerConfig(seed=0, mode="fractional", enabled_kinds="8void"),
    }
    start = make_random(args.mask_size, args.mask_size, 0)
    res = experiment_stepwise(start, variants, corpus, args.algorithm, num_steps=args.steps)
    for name, curve in res.curves.items():
        totals = [row.total for row in res.traces[name]]
        print(f"{name}: structures {totals[0]} -> {totals[-1]}, "
              f"PSNR {curve[0]:.3f} -> {curve[-1]:.3f} dB, slope {res.slope(name):+.4f} dB/step")
    print()
    print(res.curves_csv(), end="")


if __name__ == "__main__":
    main()
