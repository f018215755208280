"""Optimization and evaluation of quarter-sampling masks."""

__version__ = "0.1.0"

from .evaluation import (
    ExperimentReport,
    evaluate_mask,
    experiment_stepwise,
    experiment_table,
    load_corpus,
    psnr,
)
from .mask import (
    QuarterMask,
    make_random,
    make_regular,
    mask_space_size,
    parse,
    read_mask,
    serialize,
    tile_to,
    write_mask,
)
from .optimize import (
    OptimizerConfig,
    optimize_fractional,
    optimize_until_structure_free,
    removal_step,
)
from .reconstruct import (
    FsrParams,
    reconstruct,
    reconstruct_fsr,
    reconstruct_linear,
    reconstruct_nearest,
)
from .sampling import SampledImage, box_downscale_2x2, subsample
from .structures import StructureInstance, StructureKind, count_by_kind, detect
