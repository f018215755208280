"""Detection of unfavorable local structures in quarter-sampling masks.

Six structure kinds are recognised. Each is described by one or more
templates: a list of pixel offsets from an anchor that must all be
transparent (or all masked, for voids), plus optional offsets that must be
masked without belonging to the structure. Templates are slid over every
anchor of the mask with periodic wrap-around, because masks are tiled over
the image.

=============  =====================================================
kind           templates
=============  =====================================================
2spx           horizontal or vertical pair of transparent pixels
4spx           2x2 transparent square
8void          2x4 or 4x2 window with every pixel masked
3regular       three transparent pixels at stride 3 in a row or
               column, the two pixels between each pair masked
3diag          three transparent pixels on a diagonal or anti-diagonal
5zigzag        five transparent pixels alternating between two
               adjacent rows (or columns), both phases
=============  =====================================================
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .mask import QuarterMask

__all__ = [
    "ALL_KINDS",
    "StructureInstance",
    "StructureKind",
    "Template",
    "TEMPLATES",
    "count_by_kind",
    "detect",
    "parse_kinds",
    "total_count",
]


class StructureKind(enum.Enum):
    TwoSpx = "2spx"
    FourSpx = "4spx"
    EightVoid = "8void"
    ThreeRegular = "3regular"
    ThreeDiag = "3diag"
    FiveZigzag = "5zigzag"

    @property
    def transparent(self) -> bool:
        """True if the structure's pixels are transparent, False for voids."""
        return self is not StructureKind.EightVoid

    @property
    def size(self) -> int:
        return _SIZES[self]


ALL_KINDS = tuple(StructureKind)
_ORDER = {k: i for i, k in enumerate(ALL_KINDS)}
_SIZES = {
    StructureKind.TwoSpx: 2,
    StructureKind.FourSpx: 4,
    StructureKind.EightVoid: 8,
    StructureKind.ThreeRegular: 3,
    StructureKind.ThreeDiag: 3,
    StructureKind.FiveZigzag: 5,
}


@dataclass(frozen=True)
class Template:
    kind: StructureKind
    pixels: tuple  # offsets that form the structure
    masked: tuple = ()  # extra offsets that must be masked


def _transpose(offsets):
    return tuple((c, r) for r, c in offsets)


def _build_templates():
    K = StructureKind
    two_h = ((0, 0), (0, 1))
    void_h = tuple((i, j) for i in range(2) for j in range(4))
    reg_h = ((0, 0), (0, 3), (0, 6))
    reg_gap_h = ((0, 1), (0, 2), (0, 4), (0, 5))
    zig_down = ((0, 0), (1, 1), (0, 2), (1, 3), (0, 4))
    zig_up = ((0, 0), (-1, 1), (0, 2), (-1, 3), (0, 4))
    return (
        Template(K.TwoSpx, two_h),
        Template(K.TwoSpx, _transpose(two_h)),
        Template(K.FourSpx, ((0, 0), (0, 1), (1, 0), (1, 1))),
        Template(K.EightVoid, void_h),
        Template(K.EightVoid, _transpose(void_h)),
        Template(K.ThreeRegular, reg_h, reg_gap_h),
        Template(K.ThreeRegular, _transpose(reg_h), _transpose(reg_gap_h)),
        Template(K.ThreeDiag, ((0, 0), (1, 1), (2, 2))),
        Template(K.ThreeDiag, ((0, 0), (1, -1), (2, -2))),
        Template(K.FiveZigzag, zig_down),
        Template(K.FiveZigzag, zig_up),
        Template(K.FiveZigzag, _transpose(zig_down)),
        Template(K.FiveZigzag, _transpose(zig_up)),
    )


TEMPLATES = _build_templates()

# Every template spans at most 7 pixels along an axis. On masks with both
# sides >= 8 no wrapped template degenerates and no two anchors of one
# template produce the same pixel set, so anchors can be counted directly.
_SAFE_SIDE = 8


@dataclass(frozen=True)
class StructureInstance:
    """One occurrence of a structure.

    ``pixels`` are reduced modulo the mask shape and sorted; the anchor is
    the lexicographically smallest of them.
    """

    kind: StructureKind
    pixels: tuple

    @property
    def anchor(self) -> tuple[int, int]:
        return self.pixels[0]

    def sort_key(self):
        return (_ORDER[self.kind], self.pixels)

    def is_consistent(self, mask: QuarterMask) -> bool:
        """True if every pixel still has the value the kind requires."""
        want = self.kind.transparent
        return all(bool(mask.grid[p]) == want for p in self.pixels)


def parse_kinds(spec) -> frozenset:
    """Turn ``"all"``, ``"2spx,8void"`` or an iterable of kinds/names into a set."""
    if spec is None:
        return frozenset(ALL_KINDS)
    if isinstance(spec, str):
        if spec.strip().lower() == "all":
            return frozenset(ALL_KINDS)
        spec = [s.strip() for s in spec.split(",") if s.strip()]
    out = set()
    for item in spec:
        if isinstance(item, StructureKind):
            out.add(item)
            continue
        key = str(item).lower().replace("-", "")
        for kind in ALL_KINDS:
            if key in (kind.value, kind.name.lower()):
                out.add(kind)
                break
        else:
            raise ValueError(f"unknown structure kind {item!r}")
    return frozenset(out)


def _match_map(grid, template: Template):
    """Boolean map of anchors where ``template`` matches ``grid``."""
    want = template.kind.transparent
    src = grid if want else ~grid
    hit = np.ones(grid.shape, dtype=bool)
    for dr, dc in template.pixels:
        hit &= np.roll(src, (-dr, -dc), axis=(0, 1))
    for dr, dc in template.masked:
        hit &= ~np.roll(grid, (-dr, -dc), axis=(0, 1))
    return hit


def _templates_for(kinds):
    kinds = parse_kinds(kinds)
    return [t for t in TEMPLATES if t.kind in kinds]


def detect(mask: QuarterMask, kinds=None) -> list[StructureInstance]:
    """All distinct occurrences of the requested structure kinds.

    Parameters
    ----------
    mask : QuarterMask
    kinds : iterable of StructureKind or str, optional
        Defaults to all six kinds.

    Returns
    -------
    list of StructureInstance
        Sorted by kind, then by pixel coordinates. Each geometric occurrence
        appears once; wrapped templates whose pixels coincide are dropped.
    """
    grid = mask.grid
    h, w = grid.shape
    seen = set()
    out = []
    for tpl in _templates_for(kinds):
        rows, cols = np.nonzero(_match_map(grid, tpl))
        if not len(rows):
            continue
        offs = np.array(tpl.pixels)
        pr = (rows[:, None] + offs[None, :, 0]) % h
        pc = (cols[:, None] + offs[None, :, 1]) % w
        for r_list, c_list in zip(pr.tolist(), pc.tolist()):
            pixels = tuple(sorted(zip(r_list, c_list)))
            if len(set(pixels)) != len(pixels):
                continue
            key = (tpl.kind, pixels)
            if key in seen:
                continue
            seen.add(key)
            out.append(StructureInstance(tpl.kind, pixels))
    out.sort(key=StructureInstance.sort_key)
    return out


def count_by_kind(mask: QuarterMask, kinds=None) -> dict:
    """Number of instances per kind, in canonical kind order."""
    kinds = parse_kinds(kinds)
    counts = {k: 0 for k in ALL_KINDS if k in kinds}
    if min(mask.shape) >= _SAFE_SIDE:
        for tpl in _templates_for(kinds):
            counts[tpl.kind] += int(_match_map(mask.grid, tpl).sum())
    else:
        for inst in detect(mask, kinds):
            counts[inst.kind] += 1
    return counts


def total_count(mask: QuarterMask, kinds=None) -> int:
    return sum(count_by_kind(mask, kinds).values())


def anchor_arrays(grid, kinds):
    """Per-template anchor coordinates, for callers that sample instances.

    Only valid when both mask sides are at least 8 (see ``_SAFE_SIDE``);
    there every (template, anchor) pair is a distinct instance.
    """
    out = []
    for tpl in _templates_for(kinds):
        rows, cols = np.nonzero(_match_map(grid, tpl))
        if len(rows):
            out.append((tpl, rows, cols))
    return out
