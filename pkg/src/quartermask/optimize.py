"""Iterative removal of unfavorable structures from a quarter-sampling mask.

One removal works on a single detected structure instance:

1. pick one of its pixels uniformly at random,
2. cover the whole quarter-block containing that pixel,
3. uncover one of the block's four pixels, chosen uniformly.

With probability 1/4 step 3 restores the original pixel, so a removal may
leave the mask unchanged; it may also create new structures elsewhere. On
average the structure count still goes down.

Two drivers are provided. :func:`optimize_until_structure_free` repeats
detection and a single removal until nothing is left (or a step cap is
hit). :func:`optimize_fractional` removes a random 5-10 % of the detected
instances per step and yields a snapshot after every step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .mask import QuarterMask
from .structures import ALL_KINDS, StructureInstance, count_by_kind, detect, parse_kinds

__all__ = [
    "OptimizerConfig",
    "OptimizerResult",
    "OptimizerTrace",
    "StaleInstanceError",
    "TraceRow",
    "optimize_fractional",
    "optimize_until_structure_free",
    "removal_step",
]

UNTIL_STRUCTURE_FREE = "until_structure_free"
FRACTIONAL = "fractional"


class StaleInstanceError(ValueError):
    """The structure instance no longer matches the mask."""


@dataclass(frozen=True)
class OptimizerConfig:
    """Settings for both optimization drivers.

    ``kind_weights`` optionally biases step (A): an instance of kind ``k``
    is drawn with probability proportional to ``kind_weights[k]``. The
    default draws uniformly over all detected instances.
    """

    seed: int | None = 0
    enabled_kinds: frozenset = frozenset(ALL_KINDS)
    mode: str = UNTIL_STRUCTURE_FREE
    fraction_low: float = 0.05
    fraction_high: float = 0.10
    max_steps: int = 1_000_000
    record_trace: bool = True
    kind_weights: dict | None = None

    def __post_init__(self):
        object.__setattr__(self, "enabled_kinds", parse_kinds(self.enabled_kinds))
        mode = self.mode.replace("-", "_")
        if mode not in (UNTIL_STRUCTURE_FREE, FRACTIONAL):
            raise ValueError(f"unknown mode {self.mode!r}")
        object.__setattr__(self, "mode", mode)
        if not 0 < self.fraction_low <= self.fraction_high <= 1:
            raise ValueError("need 0 < fraction_low <= fraction_high <= 1")
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")


@dataclass(frozen=True)
class TraceRow:
    step: int
    counts: dict  # StructureKind -> count
    attempts: int

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def as_csv_row(self):
        return [self.step] + [self.counts.get(k, 0) for k in ALL_KINDS]


@dataclass
class OptimizerTrace:
    rows: list = field(default_factory=list)

    CSV_HEADER = (
        "step",
        "count_2spx",
        "count_4spx",
        "count_8void",
        "count_3regular",
        "count_3diag",
        "count_5zigzag",
    )

    def append(self, row: TraceRow):
        self.rows.append(row)

    def __len__(self):
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def __getitem__(self, i):
        return self.rows[i]

    def to_csv(self) -> str:
        lines = [",".join(self.CSV_HEADER)]
        lines += [",".join(str(v) for v in row.as_csv_row()) for row in self.rows]
        return "\n".join(lines) + "\n"


@dataclass
class OptimizerResult:
    mask: QuarterMask
    trace: OptimizerTrace
    steps: int
    structure_free: bool
    cap_reached: bool

    def __iter__(self):
        # allows ``mask, trace = optimize_until_structure_free(...)``
        return iter((self.mask, self.trace))


def _as_rng(rng):
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def removal_step(mask: QuarterMask, instance: StructureInstance, rng) -> QuarterMask:
    """Re-place the transparent pixel of one block touched by ``instance``.

    Raises
    ------
    StaleInstanceError
        If the instance's pixels no longer have the values its kind needs.
    """
    if not instance.is_consistent(mask):
        raise StaleInstanceError(f"{instance.kind.value} at {instance.anchor} is stale")
    rng = _as_rng(rng)
    r, c = instance.pixels[rng.integers(len(instance.pixels))]
    br, bc = r - r % 2, c - c % 2
    pos = rng.integers(4)
    grid = mask.grid.copy()
    grid[br : br + 2, bc : bc + 2] = False
    grid[br + pos // 2, bc + pos % 2] = True
    return mask.with_grid(grid)


def _pick(instances, rng, weights):
    if weights is None:
        return instances[rng.integers(len(instances))]
    p = np.array([float(weights.get(inst.kind, 0.0)) for inst in instances])
    if p.sum() <= 0:
        return instances[rng.integers(len(instances))]
    return instances[rng.choice(len(instances), p=p / p.sum())]


def _counts(instances, kinds):
    counts = {k: 0 for k in ALL_KINDS if k in kinds}
    for inst in instances:
        counts[inst.kind] += 1
    return counts


def optimize_until_structure_free(
    mask: QuarterMask, config: OptimizerConfig | None = None, on_step=None
) -> OptimizerResult:
    """Remove single structures until none of the enabled kinds remain.

    Detection is repeated after every removal. If ``config.max_steps``
    removals do not suffice, the mask with the fewest structures seen
    (earliest on ties) is returned with ``cap_reached=True``.

    ``on_step(step, mask)`` is called after every removal, if given.
    The result unpacks as ``(mask, trace)``.
    """
    config = config or OptimizerConfig()
    kinds = config.enabled_kinds
    rng = np.random.default_rng(config.seed)
    trace = OptimizerTrace()
    best, best_total = mask, None
    current = mask
    for step in range(config.max_steps + 1):
        instances = detect(current, kinds)
        if config.record_trace:
            trace.append(TraceRow(step, _counts(instances, kinds), 1 if instances else 0))
        if best_total is None or len(instances) < best_total:
            best, best_total = current, len(instances)
        if not instances:
            return OptimizerResult(current, trace, step, True, False)
        if step == config.max_steps:
            break
        current = removal_step(current, _pick(instances, rng, config.kind_weights), rng)
        if on_step is not None:
            on_step(step + 1, current)
    return OptimizerResult(best, trace, config.max_steps, False, True)


def optimize_fractional(
    mask: QuarterMask, config: OptimizerConfig | None = None, num_steps=25, on_step=None
) -> list:
    """Remove a random fraction of the detected structures per step.

    Each step detects the enabled kinds once (N instances), draws
    ``f ~ U[fraction_low, fraction_high]`` and removes ``ceil(f * N)``
    instances chosen without replacement, in the drawn order. Instances
    invalidated by an earlier removal within the same step are skipped.

    Returns
    -------
    list of (QuarterMask, TraceRow)
        ``num_steps + 1`` entries: the initial mask followed by the mask
        after each step. Row ``i`` holds the structure counts of snapshot
        ``i`` and the number of removals that produced it.
    """
    config = config or OptimizerConfig(mode=FRACTIONAL)
    kinds = config.enabled_kinds
    rng = np.random.default_rng(config.seed)
    current = mask
    instances = detect(current, kinds)
    out = [(current, TraceRow(0, _counts(instances, kinds), 0))]
    for step in range(1, num_steps + 1):
        applied = 0
        if instances:
            frac = rng.uniform(config.fraction_low, config.fraction_high)
            n = min(len(instances), math.ceil(frac * len(instances)))
            for idx in rng.choice(len(instances), size=n, replace=False):
                inst = instances[idx]
                if not inst.is_consistent(current):
                    continue
                current = removal_step(current, inst, rng)
                applied += 1
                if on_step is not None:
                    on_step(step, current)
        instances = detect(current, kinds)
        out.append((current, TraceRow(step, _counts(instances, kinds), applied)))
    return out


def count_row(mask: QuarterMask, step=0, kinds=None) -> TraceRow:
    return TraceRow(step, count_by_kind(mask, kinds), 0)
