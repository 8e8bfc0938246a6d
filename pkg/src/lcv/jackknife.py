"""Delete-one-block jackknife over contiguous SNP blocks.

Summary statistics are locally dependent along the genome, so resampling is
done by leaving out contiguous blocks of SNPs rather than single SNPs. The
standard error uses the usual delete-one scaling sqrt((k-1)/k * sum of squared
deviations of the leave-one-out values around their mean).
"""

from __future__ import annotations

import numpy as np

from .errors import DegenerateBlocks


def make_blocks(n_items: int, k: int) -> list[tuple[int, int]]:
    """Partition range(n_items) into k contiguous blocks of equal size (+-1).

    Returns half-open (start, stop) index pairs. Raises DegenerateBlocks when
    fewer than 2 blocks are requested or any block would be empty.
    """
    if k < 2:
        raise DegenerateBlocks(f"need at least 2 jackknife blocks, got {k}")
    if k > n_items:
        raise DegenerateBlocks(f"cannot split {n_items} items into {k} non-empty blocks")
    edges = np.linspace(0, n_items, k + 1).round().astype(int)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:])]


def jackknife_se(loo_values: np.ndarray, axis: int = 0) -> np.ndarray:
    """Standard error from an array of leave-one-block-out statistics."""
    loo = np.asarray(loo_values, dtype=float)
    k = loo.shape[axis]
    if k < 2:
        raise DegenerateBlocks("jackknife needs at least 2 blocks")
    dev = loo - loo.mean(axis=axis, keepdims=True)
    return np.sqrt((k - 1.0) / k * (dev * dev).sum(axis=axis))


def jackknife_scalar(statistic, block_bounds) -> tuple[float, float]:
    """Jackknife a scalar statistic of a SNP index subset.

    ``statistic`` is called with an integer index array; the point estimate is
    its value on all SNPs and the standard error comes from the delete-one-block
    values.
    """
    bounds = list(block_bounds)
    if len(bounds) < 2:
        raise DegenerateBlocks("jackknife needs at least 2 blocks")
    if any(stop <= start for start, stop in bounds):
        raise DegenerateBlocks("empty jackknife block")
    n = max(stop for _, stop in bounds)
    idx = np.arange(n)
    estimate = float(statistic(idx))
    loo = np.empty(len(bounds))
    for j, (start, stop) in enumerate(bounds):
        keep = np.concatenate([idx[:start], idx[stop:]])
        loo[j] = statistic(keep)
    return estimate, float(jackknife_se(loo))


def block_sums(values: np.ndarray, block_bounds) -> np.ndarray:
    """Per-block sums of ``values`` (1-d or 2-d with SNPs on axis 0)."""
    starts = np.array([start for start, _ in block_bounds])
    return np.add.reduceat(np.asarray(values, dtype=float), starts, axis=0)


def loo_sums(per_block: np.ndarray) -> np.ndarray:
    """Leave-one-block-out sums from per-block sums (blocks on axis 0)."""
    return per_block.sum(axis=0, keepdims=True) - per_block
