import numpy as np
import pytest

from lcv.errors import DegenerateBlocks
from lcv.jackknife import block_sums, jackknife_scalar, loo_sums, make_blocks


def test_make_blocks_partitions_evenly():
    blocks = make_blocks(103, 10)
    assert blocks[0][0] == 0 and blocks[-1][1] == 103
    sizes = [b - a for a, b in blocks]
    assert max(sizes) - min(sizes) <= 1
    # contiguity
    for (_, stop), (start, _) in zip(blocks[:-1], blocks[1:]):
        assert stop == start


def test_make_blocks_too_few_items():
    with pytest.raises(DegenerateBlocks):
        make_blocks(3, 5)
    with pytest.raises(DegenerateBlocks):
        make_blocks(100, 1)


def test_constant_statistic_has_zero_se():
    est, se = jackknife_scalar(lambda idx: 3.14, make_blocks(50, 10))
    assert est == 3.14 and se == 0.0


def test_single_block_raises():
    with pytest.raises(DegenerateBlocks):
        jackknife_scalar(lambda idx: 1.0, [(0, 10)])


def test_jackknife_se_of_mean_matches_closed_form():
    # For the sample mean the delete-one-block jackknife SE equals the usual
    # sd/sqrt(n) estimate up to block-size granularity; check over replicates.
    rng = np.random.default_rng(7)
    ratios = []
    for _ in range(500):
        x = rng.standard_normal(200)
        _, se = jackknife_scalar(lambda idx: x[idx].mean(), make_blocks(200, 20))
        ratios.append(se / (x.std(ddof=1) / np.sqrt(len(x))))
    assert abs(np.mean(ratios) - 1) < 0.2


def test_block_and_loo_sums():
    vals = np.arange(12, dtype=float).reshape(6, 2)
    blocks = make_blocks(6, 3)
    bs = block_sums(vals, blocks)
    np.testing.assert_allclose(bs.sum(axis=0), vals.sum(axis=0))
    loo = loo_sums(bs)
    np.testing.assert_allclose(loo[0], vals[2:].sum(axis=0))
