"""End-to-end pair analysis: normalization, cross-trait fit, causal inference, MR.

This is the composition layer the CLI and the benchmark runner share. A
PairReport is oriented for reporting: trait1 is the putatively causal trait
(positive posterior mean), with the underlying statistics mirrored
accordingly.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import mr as mr_mod
from .inference import LcvResult, lcv_fit
from .ldsc import (
    CrossTraitFit,
    TraitNormalization,
    compute_weights,
    fit_cross_trait,
    fit_trait_normalization,
    normalize_pair,
)
from .sumstats import AlignedPair

MR_METHODS = ("mr", "egger", "bidir")

LCV_TSV_COLUMNS = (
    "trait1",
    "trait2",
    "p",
    "gcp",
    "gcp_se",
    "rho_g",
    "rho_se",
    "zh1",
    "zh2",
    "flags",
)


@dataclass
class PairReport:
    """One analyzed trait pair, oriented so trait1 is the putatively causal trait."""

    trait1: str
    trait2: str
    lcv: LcvResult
    mr: list[mr_mod.MrResult] = field(default_factory=list)
    runtime_ms: int = 0
    norm1: TraitNormalization | None = None
    norm2: TraitNormalization | None = None
    cross: CrossTraitFit | None = None

    def lcv_row(self) -> dict:
        return {
            "trait1": self.trait1,
            "trait2": self.trait2,
            "p": self.lcv.p_partial_causality,
            "gcp": self.lcv.gcp_mean,
            "gcp_se": self.lcv.gcp_se,
            "rho_g": self.lcv.rho_g,
            "rho_se": self.lcv.rho_se,
            "zh1": self.lcv.z_h1,
            "zh2": self.lcv.z_h2,
            "flags": ",".join(sorted(self.lcv.flags)) or ".",
        }

    def to_dict(self) -> dict:
        d = {
            "trait1": self.trait1,
            "trait2": self.trait2,
            "lcv": self.lcv.to_dict(),
            "mr": [r.to_dict() for r in self.mr],
            "runtime_ms": self.runtime_ms,
        }
        if self.norm1 is not None:
            d["normalization"] = {
                "trait1": self.norm1.to_dict(),
                "trait2": self.norm2.to_dict(),
            }
        if self.cross is not None:
            d["cross_trait"] = self.cross.to_dict()
        return d


def run_mr_suite(
    pair: AlignedPair,
    methods=MR_METHODS,
    threshold_p: float = mr_mod.GENOME_WIDE_P,
    prune_window_cm: float | None = None,
) -> list[mr_mod.MrResult]:
    """Run the requested MR baselines on an aligned pair, exposure = trait1.

    With prune_window_cm set, candidate instruments are greedily pruned by
    genetic-map distance before the regressions (real-data protocol).
    """
    results = []
    for method in methods:
        if method == "bidir":
            res = mr_mod.bidirectional_mr(pair.z1, pair.n1, pair.z2, pair.n2, threshold_p)
        else:
            inst = mr_mod.select_instruments(pair.z1, pair.n1, pair.z2, pair.n2, threshold_p)
            if prune_window_cm is not None:
                idx = inst.snp_indices
                kept_local = mr_mod.prune_instruments(
                    pair.chrom[idx], pair.position_cm[idx], pair.z1[idx] ** 2, prune_window_cm
                )
                inst = mr_mod.InstrumentSet(
                    snp_indices=idx[kept_local],
                    beta_exposure=inst.beta_exposure[kept_local],
                    beta_outcome=inst.beta_outcome[kept_local],
                    source="PRUNED",
                )
            res = mr_mod.two_sample_mr(inst) if method == "mr" else mr_mod.mr_egger(inst)
        res.exposure = pair.label1
        res.outcome = pair.label2
        results.append(res)
    return results


def analyze_pair(
    pair: AlignedPair,
    k_blocks: int = 100,
    grid_step: float = 0.01,
    constrained_intercepts: bool = False,
    exclusion_multiplier: float = 30.0,
    mr_methods=(),
    mr_threshold_p: float = mr_mod.GENOME_WIDE_P,
    mr_prune_window_cm: float | None = None,
    orient: bool = True,
) -> PairReport:
    """Full pipeline on an aligned pair; see module docstring for orientation."""
    t0 = time.perf_counter()
    weights = compute_weights(pair.ell_regression)
    norm1 = fit_trait_normalization(
        pair.z1,
        pair.n1,
        pair.ell,
        weights=weights,
        exclusion_multiplier=exclusion_multiplier,
        k_blocks=k_blocks,
        constrained_intercept=constrained_intercepts,
        label=pair.label1,
    )
    norm2 = fit_trait_normalization(
        pair.z2,
        pair.n2,
        pair.ell,
        weights=weights,
        exclusion_multiplier=exclusion_multiplier,
        k_blocks=k_blocks,
        constrained_intercept=constrained_intercepts,
        label=pair.label2,
    )
    cross = fit_cross_trait(
        pair,
        norm1,
        norm2,
        weights=weights,
        exclusion_multiplier=exclusion_multiplier,
        k_blocks=k_blocks,
        constrained_intercept=constrained_intercepts,
    )
    norm_pair = normalize_pair(pair, norm1, norm2, cross, weights=weights, k_blocks=k_blocks)
    result = lcv_fit(norm_pair, cross, norm1, norm2, grid_step=grid_step)

    swap = orient and result.gcp_mean < 0
    if swap:
        result = result.mirrored()
        pair_out = pair.swapped()
        norm1, norm2 = norm2, norm1
    else:
        pair_out = pair

    mr_results = list(run_mr_suite(pair_out, mr_methods, mr_threshold_p, mr_prune_window_cm)) if mr_methods else []
    runtime_ms = int((time.perf_counter() - t0) * 1000)
    return PairReport(
        trait1=pair_out.label1,
        trait2=pair_out.label2,
        lcv=result,
        mr=mr_results,
        runtime_ms=runtime_ms,
        norm1=norm1,
        norm2=norm2,
        cross=cross,
    )


