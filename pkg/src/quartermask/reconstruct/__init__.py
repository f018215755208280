"""Reconstruction of the unknown 3/4 of a quarter-sampled image."""

from .fsr import FsrParams, fsr_block, reconstruct_fsr
from .interp import ReconstructionError, reconstruct_linear, reconstruct_nearest

__all__ = [
    "ALGORITHMS",
    "FsrParams",
    "ReconstructionError",
    "fsr_block",
    "reconstruct",
    "reconstruct_fsr",
    "reconstruct_linear",
    "reconstruct_nearest",
]

ALGORITHMS = ("nearest", "linear", "fsr")


def reconstruct(sampled, algorithm, params=None):
    """Dispatch by algorithm name; ``params`` is used by ``fsr`` only."""
    if algorithm == "nearest":
        return reconstruct_nearest(sampled)
    if algorithm == "linear":
        return reconstruct_linear(sampled)
    if algorithm == "fsr":
        return reconstruct_fsr(sampled, params)
    raise ValueError(f"unknown algorithm {algorithm!r}; choose from {ALGORITHMS}")
