"""Generate quarter-sampling masks and count their unfavorable structures.

A regular mask has no structures at all, a random one has many. Removing
them one at a time eventually yields a mask that is both irregular and
structure-free.

    python3 demos/01_masks_and_structures.py
"""
from quartermask import (
    OptimizerConfig,
    count_by_kind,
    make_random,
    make_regular,
    mask_space_size,
    optimize_until_structure_free,
    serialize,
)


def show(label, mask):
    counts = count_by_kind(mask)
    summary = ", ".join(f"{k.value}={v}" for k, v in counts.items())
    print(f"{label:>15}: total {sum(counts.values()):5d}  [{summary}]")


def main():
    for b in (2, 4, 8):
        print(f"{b}x{b} masks: {mask_space_size(b)} possibilities")

    print("\nAn 8x8 random mask:")
    print(serialize(make_random(8, 8, seed=1)), end="")

    show("regular", make_regular(32, 32))
    random_mask = make_random(32, 32, seed=0)
    show("random", random_mask)

    res = optimize_until_structure_free(random_mask, OptimizerConfig(seed=0))
    show("structure-free", res.mask)
    print(f"\n{res.steps} removal steps; total count every 500 steps:")
    print([row.total for row in res.trace.rows[::500]] + [res.trace.rows[-1].total])


if __name__ == "__main__":
    main()
