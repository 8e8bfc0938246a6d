"""Benjamini-Hochberg step-up false discovery rate control."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def bh_rejections(p_values, level: float) -> tuple[np.ndarray, np.ndarray]:
    """Step-up rejection set and monotone q-values for a family of p-values.

    Rejects the hypotheses with the m* smallest p-values, where m* is the
    largest i such that p_(i) <= (i/m)*level. Returns (rejected mask, q-values)
    in the input order.
    """
    p = np.asarray(p_values, dtype=float)
    m = len(p)
    rejected = np.zeros(m, dtype=bool)
    q = np.ones(m)
    if m == 0:
        return rejected, q
    order = np.argsort(p, kind="stable")
    ranked = p[order]
    thresholds = level * (np.arange(1, m + 1) / m)
    passing = np.flatnonzero(ranked <= thresholds)
    if passing.size:
        rejected[order[: passing[-1] + 1]] = True
    raw_q = ranked * m / np.arange(1, m + 1)
    q[order] = np.minimum.accumulate(raw_q[::-1])[::-1].clip(max=1.0)
    return rejected, q


@dataclass
class FdrDecision:
    """Per-pair BH outcome at a given level: (pair id, p, q, rejected)."""

    pairs: list[tuple[str, float, float, bool]]
    level: float

    def n_rejected(self) -> int:
        return sum(1 for *_, r in self.pairs if r)

    @classmethod
    def from_pvalues(cls, ids, p_values, level: float) -> "FdrDecision":
        rejected, q = bh_rejections(p_values, level)
        pairs = [
            (str(i), float(p), float(qv), bool(r))
            for i, p, qv, r in zip(ids, p_values, q, rejected)
        ]
        return cls(pairs=pairs, level=level)
