import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_grid
from oracles import all_quarter_masks, brute_force_counts, brute_force_instances
from quartermask.mask import QuarterMask, make_random, make_regular, tile_to
from quartermask.structures import (
    ALL_KINDS,
    StructureKind,
    count_by_kind,
    detect,
    parse_kinds,
)

K = StructureKind


def counts_by_name(mask):
    return {k.value: n for k, n in count_by_kind(mask).items()}


def detect_as_sets(mask):
    return {(i.kind.value, frozenset(i.pixels)) for i in detect(mask)}


def test_six_kinds():
    assert len(ALL_KINDS) == 6
    assert [k.size for k in ALL_KINDS] == [2, 4, 8, 3, 3, 5]


def test_regular_mask_has_no_structures():
    m = make_regular(4, 4, "TL")
    assert detect(m) == []
    assert brute_force_instances(m.grid) == set()


def test_superpixel_square(mask_from):
    m = mask_from({(1, 1), (1, 2), (2, 1), (2, 2)}, 4, 4)
    found = detect(m, {K.TwoSpx, K.FourSpx})
    kinds = [i.kind for i in found]
    # frozen from the brute-force oracle
    assert kinds.count(K.TwoSpx) == 4
    assert kinds.count(K.FourSpx) == 1
    oracle = {
        (k, s) for k, s in brute_force_instances(m.grid) if k in ("2spx", "4spx")
    }
    assert {(i.kind.value, frozenset(i.pixels)) for i in found} == oracle


def test_wrapped_pair_counted_once(mask_from):
    m = mask_from({(0, 1), (0, 2)}, 2, 4)
    found = detect(m, {K.TwoSpx})
    assert len(found) == 1
    assert found[0].pixels == ((0, 1), (0, 2))


def test_wrap_across_border(mask_from):
    # transparent at columns 3 and 0 of the same row touch through the border
    m = mask_from({(0, 3), (0, 0), (2, 1), (2, 3)}, 4, 4)
    pairs = [i.pixels for i in detect(m, {K.TwoSpx})]
    assert ((0, 0), (0, 3)) in pairs


def test_instance_fields():
    m = make_random(16, 16, 4)
    for inst in detect(m):
        assert len(inst.pixels) == inst.kind.size
        assert len(set(inst.pixels)) == len(inst.pixels)
        assert inst.anchor == min(inst.pixels)
        assert inst.is_consistent(m)
        assert all(0 <= r < 16 and 0 <= c < 16 for r, c in inst.pixels)


def test_output_order():
    found = detect(make_random(16, 16, 8))
    assert found == sorted(found, key=lambda i: i.sort_key())


def test_three_regular_needs_masked_gaps():
    grid = np.zeros((2, 8), dtype=bool)
    grid[0, [0, 3, 6]] = True
    grid[1, 5] = True  # block (0, 2): gap pixels (0, 4), (0, 5) stay masked
    found = detect(QuarterMask(grid), {K.ThreeRegular})
    assert [i.pixels for i in found] == [((0, 0), (0, 3), (0, 6))]

    grid[1, 5] = False
    grid[0, 4] = True  # now a gap pixel is transparent
    assert detect(QuarterMask(grid), {K.ThreeRegular}) == []


def test_parse_kinds():
    assert parse_kinds("all") == frozenset(ALL_KINDS)
    assert parse_kinds("2spx,8void") == {K.TwoSpx, K.EightVoid}
    assert parse_kinds(["FiveZigzag", K.ThreeDiag]) == {K.FiveZigzag, K.ThreeDiag}
    assert parse_kinds("3-diag") == {K.ThreeDiag}
    with pytest.raises(ValueError):
        parse_kinds("7spx")


class TestOracleEquivalence:
    def test_every_4x4_mask(self):
        for grid in all_quarter_masks(4, 4):
            m = QuarterMask(grid)
            assert detect_as_sets(m) == brute_force_instances(grid)

    @pytest.mark.parametrize("shape", [(2, 2), (2, 4), (4, 2), (2, 8), (6, 2), (2, 6)])
    def test_every_thin_mask(self, shape):
        for grid in all_quarter_masks(*shape):
            m = QuarterMask(grid)
            assert detect_as_sets(m) == brute_force_instances(grid)
            assert counts_by_name(m) == brute_force_counts(grid)

    @given(
        st.sampled_from([(4, 6), (6, 6), (6, 8), (8, 8), (8, 10), (10, 8), (12, 12)]),
        st.integers(0, 2**32 - 1),
    )
    @settings(max_examples=150, deadline=None)
    def test_random_masks(self, shape, seed):
        grid = random_grid(np.random.default_rng(seed), *shape)
        m = QuarterMask(grid)
        assert detect_as_sets(m) == brute_force_instances(grid)
        assert counts_by_name(m) == brute_force_counts(grid)


class TestCounts:
    def test_structure_free_all_zero(self):
        counts = count_by_kind(make_regular(8, 8, "BL"))
        assert set(counts) == set(ALL_KINDS)
        assert all(v == 0 for v in counts.values())

    def test_counts_match_detect(self):
        m = make_random(20, 20, 11)
        grouped = {k: 0 for k in ALL_KINDS}
        for inst in detect(m):
            grouped[inst.kind] += 1
        assert count_by_kind(m) == grouped

    def test_subset_of_kinds(self):
        m = make_random(16, 16, 2)
        assert set(count_by_kind(m, {K.EightVoid})) == {K.EightVoid}

    def test_random_masks_have_superpixels(self):
        twos = [count_by_kind(make_random(32, 32, s))[K.TwoSpx] for s in range(100)]
        assert np.mean(twos) > 0
        assert min(twos) > 0


class TestSymmetries:
    @given(st.integers(0, 2**32 - 1), st.sampled_from([(8, 8), (8, 12), (10, 16), (4, 6)]))
    @settings(max_examples=60, deadline=None)
    def test_rotation(self, seed, shape):
        m = QuarterMask(random_grid(np.random.default_rng(seed), *shape))
        rotated = QuarterMask(np.rot90(m.grid))
        assert count_by_kind(rotated) == count_by_kind(m)

    @given(st.integers(0, 2**32 - 1), st.integers(1, 3), st.integers(1, 3))
    @settings(max_examples=40, deadline=None)
    def test_tiling_scales_counts(self, seed, ky, kx):
        m = QuarterMask(random_grid(np.random.default_rng(seed), 8, 8))
        t = tile_to(m, 8 * ky, 8 * kx)
        base = count_by_kind(m)
        assert count_by_kind(t) == {k: v * ky * kx for k, v in base.items()}

    def test_no_degenerate_instances_on_tiny_masks(self):
        for shape in [(2, 2), (2, 4), (4, 2), (4, 4), (2, 6)]:
            for grid in all_quarter_masks(*shape):
                for inst in detect(QuarterMask(grid)):
                    assert len(set(inst.pixels)) == inst.kind.size
