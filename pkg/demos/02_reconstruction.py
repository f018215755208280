"""Subsample one photograph and compare the three reconstructors.

Uses the scikit-image camera picture, or any grayscale image given on the
command line.

    python3 demos/02_reconstruction.py [image.pgm]
"""
import argparse
import time

from quartermask import OptimizerConfig, make_random, make_regular, optimize_until_structure_free
from quartermask.evaluation import psnr
from quartermask.pnm import read_image
from quartermask.reconstruct import reconstruct
from quartermask.sampling import crop_even, subsample


def load(path):
    if path:
        return crop_even(read_image(path))
    from skimage import data

    return data.camera().astype(float)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("image", nargs="?")
    args = parser.parse_args()
    image = load(args.image)

    masks = {
        "regular": make_regular(32, 32),
        "random": make_random(32, 32, 0),
        "structure-free": optimize_until_structure_free(make_random(32, 32, 0), OptimizerConfig(seed=0)).mask,
    }
    print(f"image {image.shape[0]}x{image.shape[1]}\n")
    print(f"{'mask':>15} {'nearest':>9} {'linear':>9} {'fsr':>9}")
    for label, mask in masks.items():
        sampled = subsample(image, mask)
        scores = []
        for alg in ("nearest", "linear", "fsr"):
            t = time.perf_counter()
            scores.append(psnr(image, reconstruct(sampled, alg)))
            if alg == "fsr" and label == "regular":
                print(f"(fsr took {time.perf_counter() - t:.1f} s)")
        print(f"{label:>15} " + " ".join(f"{s:9.2f}" for s in scores))


if __name__ == "__main__":
    main()
