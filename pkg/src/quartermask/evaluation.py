"""PSNR evaluation of masks and the two mask experiments.

``experiment_table`` compares several masks under several reconstruction
algorithms on an image corpus. ``experiment_stepwise`` follows the PSNR of
a mask while structures are removed from it a fraction at a time.

Reports are written as CSV:

* rows:       ``mask,algorithm,image,psnr_db``
* aggregates: ``mask,algorithm,mean_psnr_db,gain_vs_baseline_db``
* curves:     ``variant,step,mean_psnr_db``
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .mask import QuarterMask
from .optimize import OptimizerConfig, optimize_fractional
from .pnm import PNM_SUFFIXES, read_image, to_uint8
from .reconstruct import reconstruct
from .sampling import crop_even, subsample

__all__ = [
    "EvalRow",
    "ExperimentReport",
    "MaskEvaluation",
    "StepwiseResult",
    "evaluate_mask",
    "experiment_stepwise",
    "experiment_table",
    "format_db",
    "load_corpus",
    "psnr",
]

log = logging.getLogger(__name__)

IMAGE_SUFFIXES = PNM_SUFFIXES + (".png", ".tif", ".tiff", ".bmp", ".jpg", ".jpeg")


def psnr(reference, test, peak=255.0) -> float:
    """Peak signal-to-noise ratio in dB; ``inf`` for identical images."""
    reference = np.asarray(reference, dtype=np.float64)
    test = np.asarray(test, dtype=np.float64)
    if reference.shape != test.shape:
        raise ValueError(f"shape mismatch: {reference.shape} vs {test.shape}")
    mse = np.mean((reference - test) ** 2)
    if mse == 0:
        return math.inf
    return float(10.0 * np.log10(peak**2 / mse))


def format_db(value) -> str:
    if value is None:
        return ""
    return f"{value:.6f}"


def load_corpus(directory, limit=None) -> list:
    """Read all images in ``directory`` as ``(name, gray image)`` pairs.

    Files are taken in lexicographic order, so ``limit=10`` means the first
    ten. Odd dimensions are cropped by one row/column to make them even.
    """
    paths = sorted(
        p for p in Path(directory).iterdir() if p.suffix.lower() in IMAGE_SUFFIXES
    )
    if limit is not None:
        paths = paths[:limit]
    if not paths:
        raise ValueError(f"no images found in {directory}")
    return [(p.stem, crop_even(read_image(p))) for p in paths]


@dataclass(frozen=True)
class EvalRow:
    mask: str
    algorithm: str
    image: str
    psnr_db: float


@dataclass
class MaskEvaluation:
    rows: list

    @property
    def mean(self) -> float:
        return float(np.mean([r.psnr_db for r in self.rows]))


def _score(task):
    mask, name, image, algorithm, params = task
    image = crop_even(np.asarray(image, dtype=np.float64))
    # scored as the 8-bit image a user would write out
    return psnr(image, to_uint8(reconstruct(subsample(image, mask), algorithm, params)))


def _run(tasks, threads):
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(_score, tasks))
    return [_score(t) for t in tasks]


def _check_corpus(corpus):
    corpus = list(corpus)
    if not corpus:
        raise ValueError("empty corpus")
    return corpus


def evaluate_mask(
    mask: QuarterMask, corpus, algorithm, params=None, mask_id=None, threads=1
) -> MaskEvaluation:
    """PSNR of ``algorithm`` for every corpus image sampled through ``mask``.

    ``corpus`` is a sequence of ``(image_id, image)`` pairs.
    """
    corpus = _check_corpus(corpus)
    mask_id = mask.label if mask_id is None else mask_id
    tasks = [(mask, name, img, algorithm, params) for name, img in corpus]
    values = _run(tasks, threads)
    return MaskEvaluation(
        [EvalRow(mask_id, algorithm, name, v) for (name, _), v in zip(corpus, values)]
    )


@dataclass
class ExperimentReport:
    rows: list = field(default_factory=list)
    baseline: str | None = "random"

    def aggregates(self) -> list:
        """``(mask, algorithm, mean_psnr_db, gain_vs_baseline_db)`` tuples.

        Means are plain arithmetic means of the per-image dB values. Order
        follows first appearance in ``rows``.
        """
        groups = {}
        for row in self.rows:
            groups.setdefault((row.mask, row.algorithm), []).append(row.psnr_db)
        means = {key: float(np.mean(v)) for key, v in groups.items()}
        out = []
        for (mask, alg), mean in means.items():
            base = means.get((self.baseline, alg))
            gain = None if base is None else mean - base
            out.append((mask, alg, mean, gain))
        return out

    def mean(self, mask, algorithm) -> float:
        for m, a, mean, _ in self.aggregates():
            if (m, a) == (mask, algorithm):
                return mean
        raise KeyError((mask, algorithm))

    def gain(self, mask, algorithm) -> float:
        for m, a, _, gain in self.aggregates():
            if (m, a) == (mask, algorithm):
                return gain
        raise KeyError((mask, algorithm))

    def rows_csv(self) -> str:
        lines = ["mask,algorithm,image,psnr_db"]
        lines += [
            f"{r.mask},{r.algorithm},{r.image},{format_db(r.psnr_db)}" for r in self.rows
        ]
        return "\n".join(lines) + "\n"

    def aggregates_csv(self) -> str:
        lines = ["mask,algorithm,mean_psnr_db,gain_vs_baseline_db"]
        lines += [
            f"{m},{a},{format_db(mean)},{format_db(gain)}"
            for m, a, mean, gain in self.aggregates()
        ]
        return "\n".join(lines) + "\n"


def experiment_table(
    masks, corpus, algorithms, params=None, baseline="random", threads=1
) -> ExperimentReport:
    """Evaluate every labelled mask with every algorithm on every image.

    Parameters
    ----------
    masks : sequence of (label, QuarterMask)
        Labels may repeat (e.g. several random seeds under ``"random"``);
        repeated labels are pooled in the aggregates.
    algorithms : sequence of str
    baseline : str
        Label the gains are measured against.
    """
    corpus = _check_corpus(corpus)
    keys, tasks = [], []
    for alg in algorithms:
        for label, mask in masks:
            for name, img in corpus:
                keys.append((label, alg, name))
                tasks.append((mask, name, img, alg, params))
    values = _run(tasks, threads)
    rows = [EvalRow(m, a, i, v) for (m, a, i), v in zip(keys, values)]
    return ExperimentReport(rows, baseline)


@dataclass
class StepwiseResult:
    curves: dict  # variant -> list of mean PSNR per step
    traces: dict  # variant -> list of TraceRow
    masks: dict  # variant -> list of QuarterMask snapshots

    def curves_csv(self) -> str:
        lines = ["variant,step,mean_psnr_db"]
        for variant, curve in self.curves.items():
            lines += [f"{variant},{i},{format_db(v)}" for i, v in enumerate(curve)]
        return "\n".join(lines) + "\n"

    def slope(self, variant) -> float:
        """Least-squares slope of the curve in dB per step."""
        curve = np.asarray(self.curves[variant])
        return float(np.polyfit(np.arange(len(curve)), curve, 1)[0])


def experiment_stepwise(
    initial_mask,
    variants,
    corpus,
    algorithm="fsr",
    num_steps=25,
    params=None,
    threads=1,
) -> StepwiseResult:
    """Mean PSNR after each step of fractional structure removal.

    Parameters
    ----------
    initial_mask : QuarterMask or dict
        One start mask shared by all variants, or a ``variant -> mask`` map
        for independent starts.
    variants : dict
        ``name -> OptimizerConfig`` (fractional mode settings).
    """
    corpus = _check_corpus(corpus)
    cache = {}
    curves, traces, snapshots = {}, {}, {}
    for name, config in variants.items():
        start = initial_mask[name] if isinstance(initial_mask, dict) else initial_mask
        if not isinstance(config, OptimizerConfig):
            config = OptimizerConfig(**config)
        seq = optimize_fractional(start, config, num_steps)
        curve = []
        for step, (mask, row) in enumerate(seq):
            key = (mask.shape, mask.grid.tobytes())
            if key not in cache:
                cache[key] = evaluate_mask(
                    mask, corpus, algorithm, params, mask_id=name, threads=threads
                ).mean
            curve.append(cache[key])
            log.info("%s step %d: %d structures, %.4f dB", name, step, row.total, curve[-1])
        curves[name] = curve
        traces[name] = [row for _, row in seq]
        snapshots[name] = [m for m, _ in seq]
    return StepwiseResult(curves, traces, snapshots)
