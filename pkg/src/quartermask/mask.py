"""Quarter-sampling masks.

A quarter-sampling mask lives on the high-resolution grid. Every aligned
2x2 quarter-block (one low-resolution sensor pixel) has exactly one
transparent pixel; the other three are covered.

Masks are small periodic tiles. They are repeated over an image with
:func:`tile_to` and stored on disk in the plain-text ``.qsm`` format::

    QSM1 <height> <width>
    1000...
    ...

where ``1`` marks a transparent pixel and ``0`` a masked one.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = [
    "CORNERS",
    "DimensionError",
    "MaskFormatError",
    "QuarterConditionError",
    "QuarterMask",
    "make_random",
    "make_regular",
    "mask_space_size",
    "parse",
    "read_mask",
    "serialize",
    "tile_to",
    "write_mask",
]

CORNERS = {"TL": (0, 0), "TR": (0, 1), "BL": (1, 0), "BR": (1, 1)}
MAGIC = "QSM1"


class DimensionError(ValueError):
    """A mask or image dimension is odd, zero or otherwise unusable."""


class MaskFormatError(ValueError):
    """A ``.qsm`` text could not be parsed."""


class QuarterConditionError(MaskFormatError):
    """A quarter-block does not hold exactly one transparent pixel."""

    def __init__(self, block, count):
        self.block = block
        self.count = count
        super().__init__(
            f"quarter-block {block} has {count} transparent pixels, expected 1"
        )


def _check_even(*dims):
    for d in dims:
        if int(d) != d or d < 2 or d % 2:
            raise DimensionError(f"dimension must be an even integer >= 2, got {d}")


def _block_counts(grid):
    h, w = grid.shape
    return grid.reshape(h // 2, 2, w // 2, 2).sum(axis=(1, 3))


@dataclass(frozen=True, eq=False)
class QuarterMask:
    """Immutable binary mask obeying the quarter-sampling condition.

    Parameters
    ----------
    grid : array_like of shape (height, width)
        Non-zero entries are transparent.
    label : str, optional
        Free-form kind label (``regular``, ``random``, ``structure-free``,
        ``custom``). Metadata only.
    note : str, optional
        Provenance, e.g. the seed or source file. Metadata only.
    """

    grid: np.ndarray
    label: str = field(default="custom", compare=False)
    note: str = field(default="", compare=False)

    def __post_init__(self):
        grid = np.array(self.grid, dtype=bool)
        if grid.ndim != 2:
            raise DimensionError("mask grid must be two-dimensional")
        _check_even(*grid.shape)
        counts = _block_counts(grid)
        bad = np.argwhere(counts != 1)
        if len(bad):
            i, j = (int(v) for v in bad[0])
            raise QuarterConditionError((i, j), int(counts[i, j]))
        grid.flags.writeable = False
        object.__setattr__(self, "grid", grid)

    @property
    def height(self) -> int:
        return self.grid.shape[0]

    @property
    def width(self) -> int:
        return self.grid.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.grid.shape

    @property
    def transparent(self) -> set[tuple[int, int]]:
        return {(int(r), int(c)) for r, c in zip(*np.nonzero(self.grid))}

    def __eq__(self, other):
        if not isinstance(other, QuarterMask):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.grid, other.grid))

    def __hash__(self):
        return hash((self.shape, self.grid.tobytes()))

    def __repr__(self):
        return f"QuarterMask({self.height}x{self.width}, label={self.label!r})"

    def with_grid(self, grid, label=None, note=None) -> "QuarterMask":
        return QuarterMask(
            grid,
            label=self.label if label is None else label,
            note=self.note if note is None else note,
        )


def make_regular(height, width, corner="TL") -> QuarterMask:
    """Mask with the transparent pixel in the same corner of every block."""
    _check_even(height, width)
    try:
        dr, dc = CORNERS[corner.upper()]
    except KeyError:
        raise ValueError(f"corner must be one of {sorted(CORNERS)}, got {corner!r}")
    grid = np.zeros((height, width), dtype=bool)
    grid[dr::2, dc::2] = True
    return QuarterMask(grid, label="regular", note=f"corner={corner.upper()}")


def make_random(height, width, seed=None) -> QuarterMask:
    """Mask with the transparent pixel of each block drawn uniformly.

    Randomness comes from ``numpy.random.default_rng(seed)`` (PCG64), so a
    given seed always gives the same mask. One integer in ``[0, 4)`` is
    drawn per block in row-major block order; it encodes the position as
    ``2 * row_offset + col_offset``.
    """
    _check_even(height, width)
    rng = np.random.default_rng(seed)
    pos = rng.integers(0, 4, size=(height // 2, width // 2))
    grid = np.zeros((height // 2, 2, width // 2, 2), dtype=bool)
    bi, bj = np.indices(pos.shape)
    grid[bi, pos // 2, bj, pos % 2] = True
    return QuarterMask(grid.reshape(height, width), label="random", note=f"seed={seed}")


def tile_to(mask: QuarterMask, target_height, target_width) -> QuarterMask:
    """Repeat ``mask`` periodically and crop to the target size."""
    _check_even(target_height, target_width)
    reps = (-(-target_height // mask.height), -(-target_width // mask.width))
    grid = np.tile(mask.grid, reps)[:target_height, :target_width]
    return mask.with_grid(grid)


def mask_space_size(b) -> int:
    """Number of distinct ``b x b`` quarter-sampling masks, ``4 ** (b*b/4)``."""
    _check_even(b)
    return 4 ** (b * b // 4)


def serialize(mask: QuarterMask) -> str:
    lines = [f"{MAGIC} {mask.height} {mask.width}"]
    lines += ["".join("1" if v else "0" for v in row) for row in mask.grid]
    return "\n".join(lines) + "\n"


def parse(text: str, label="custom", note="") -> QuarterMask:
    """Parse ``.qsm`` text. The header line may be omitted.

    Raises
    ------
    MaskFormatError
        On a malformed header or grid.
    DimensionError
        On odd or zero dimensions.
    QuarterConditionError
        If some quarter-block does not have exactly one transparent pixel.
    """
    if not text.endswith("\n"):
        raise MaskFormatError("mask text must end with a newline")
    lines = text[:-1].split("\n")
    expected = None
    if lines and lines[0].startswith("QSM"):
        parts = lines[0].split()
        if len(parts) != 3 or parts[0] != MAGIC:
            raise MaskFormatError(f"bad header line {lines[0]!r}")
        try:
            expected = (int(parts[1]), int(parts[2]))
        except ValueError:
            raise MaskFormatError(f"bad header line {lines[0]!r}") from None
        lines = lines[1:]
    if not lines or not lines[0]:
        raise MaskFormatError("empty mask grid")
    width = len(lines[0])
    for i, line in enumerate(lines):
        if len(line) != width:
            raise MaskFormatError(f"row {i} has {len(line)} characters, expected {width}")
        if set(line) - {"0", "1"}:
            raise MaskFormatError(f"row {i} contains characters other than 0/1")
    if expected is not None and expected != (len(lines), width):
        raise MaskFormatError(
            f"header says {expected[0]}x{expected[1]}, grid is {len(lines)}x{width}"
        )
    grid = np.array([[ch == "1" for ch in line] for line in lines], dtype=bool)
    return QuarterMask(grid, label=label, note=note)


def write_mask(mask: QuarterMask, path) -> None:
    Path(path).write_bytes(serialize(mask).encode("ascii"))


def read_mask(path, label="custom") -> QuarterMask:
    path = Path(path)
    return parse(path.read_bytes().decode("ascii"), label=label, note=str(path))
