"""Mendelian randomization baselines: two-sample MR, MR-Egger, bidirectional MR.

All three operate on genome-wide significant SNPs for the exposure and on
standardized effect sizes beta = z/sqrt(n). The two-sample and Egger standard
errors allow the residuals to be overdispersed relative to the GWAS sampling
noise, so the t statistics are valid even when instruments are heterogeneous.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

from .errors import MissingGeneticMap, NoInstruments, TooFewInstruments

GENOME_WIDE_P = 5e-8


@dataclass
class InstrumentSet:
    """Instrument SNPs for one exposure/outcome direction, on the standardized scale."""

    snp_indices: np.ndarray
    beta_exposure: np.ndarray
    beta_outcome: np.ndarray
    source: str = "EXPOSURE_SIGNIFICANT"

    def __len__(self):
        return len(self.snp_indices)

    def oriented(self) -> "InstrumentSet":
        """Flip instrument coding so every exposure effect is positive."""
        sign = np.where(self.beta_exposure < 0, -1.0, 1.0)
        return InstrumentSet(
            snp_indices=self.snp_indices,
            beta_exposure=self.beta_exposure * sign,
            beta_outcome=self.beta_outcome * sign,
            source=self.source,
        )


@dataclass
class MrResult:
    method: str
    estimate: float
    se: float
    p: float
    k_instruments: int
    intercept: float | None = None
    k_pair: tuple[int, int] | None = None
    exposure: str = ""
    outcome: str = ""

    def to_dict(self) -> dict:
        d = {
            "method": self.method,
            "exposure": self.exposure,
            "outcome": self.outcome,
            "estimate": self.estimate,
            "se": self.se,
            "p": self.p,
            "k_instruments": self.k_instruments,
        }
        if self.intercept is not None:
            d["intercept"] = self.intercept
        if self.k_pair is not None:
            d["k1"], d["k2"] = self.k_pair
        return d


def chi2_p(z: np.ndarray) -> np.ndarray:
    """Two-tailed association p-value from a Z score (1-df chi-square test)."""
    return stats.chi2.sf(np.asarray(z, dtype=float) ** 2, df=1)


def select_instruments(z_exp, n_exp, z_out, n_out, threshold_p: float = GENOME_WIDE_P) -> InstrumentSet:
    """SNPs significant for the exposure, with standardized effects on both traits.

    Raises NoInstruments when nothing clears the threshold, the usual failure
    mode for underpowered exposure GWAS.
    """
    z_exp = np.asarray(z_exp, dtype=float)
    z_out = np.asarray(z_out, dtype=float)
    sig = chi2_p(z_exp) < threshold_p
    idx = np.flatnonzero(sig)
    if idx.size == 0:
        raise NoInstruments(f"no SNPs significant at p < {threshold_p:g} on the exposure")
    return InstrumentSet(
        snp_indices=idx,
        beta_exposure=z_exp[idx] / np.sqrt(np.asarray(n_exp, dtype=float)[idx]),
        beta_outcome=z_out[idx] / np.sqrt(np.asarray(n_out, dtype=float)[idx]),
    )


def prune_instruments(chrom, position_cm, chi2, window_cm: float = 1.0) -> np.ndarray:
    """Greedy distance pruning of candidate instruments.

    Rank by chi-square descending (ties keep input order); repeatedly accept
    the top SNP and remove all same-chromosome SNPs within window_cm of it.
    Returns indices of the kept SNPs in input order; the kept set is pairwise
    separated by more than window_cm on each chromosome.
    """
    chrom = np.asarray(chrom)
    cm = np.asarray(position_cm, dtype=float)
    chi2 = np.asarray(chi2, dtype=float)
    if np.any(~np.isfinite(cm)):
        raise MissingGeneticMap("genetic-map (cM) positions are required for pruning")
    order = np.argsort(-chi2, kind="stable")
    removed = np.zeros(len(chi2), dtype=bool)
    kept = []
    for i in order:
        if removed[i]:
            continue
        kept.append(i)
        removed |= (chrom == chrom[i]) & (np.abs(cm - cm[i]) <= window_cm)
    return np.array(sorted(kept), dtype=int)


def two_sample_mr(instruments: InstrumentSet) -> MrResult:
    """Zero-intercept unweighted regression of outcome effects on exposure effects.

    se = sqrt(mean squared residual / sum of squared exposure effects); the
    slope is tested with a two-tailed t test on K-1 degrees of freedom.
    """
    x, y = instruments.beta_exposure, instruments.beta_outcome
    k = len(x)
    if k < 2:
        raise TooFewInstruments(f"two-sample MR needs >= 2 instruments, got {k}")
    sxx = float(x @ x)
    b = float(x @ y) / sxx
    resid = y - b * x
    se = float(np.sqrt((resid @ resid / k) / sxx))
    if se == 0:
        p = 0.0 if b != 0 else 1.0
    else:
        p = float(2.0 * stats.t.sf(abs(b) / se, df=k - 1))
    return MrResult(method="MR", estimate=b, se=se, p=p, k_instruments=k)


def mr_egger(instruments: InstrumentSet) -> MrResult:
    """Free-intercept regression on instruments oriented to positive exposure effects.

    The intercept absorbs directional pleiotropy; the slope is tested with K-2
    degrees of freedom, with the residual scale computed as in two-sample MR
    but around the fitted line and against the centered exposure variance.
    """
    k = len(instruments)
    if k < 3:
        raise TooFewInstruments(f"MR-Egger needs >= 3 instruments, got {k}")
    inst = instruments.oriented()
    x, y = inst.beta_exposure, inst.beta_outcome
    mx, my = x.mean(), y.mean()
    sxx = float(((x - mx) ** 2).sum())
    if sxx == 0:
        raise TooFewInstruments("exposure effects are all identical after orientation")
    slope = float(((x - mx) * (y - my)).sum()) / sxx
    intercept = float(my - slope * mx)
    resid = y - (intercept + slope * x)
    se = float(np.sqrt((resid @ resid / k) / sxx))
    if se == 0:
        p = 0.0 if slope != 0 else 1.0
    else:
        p = float(2.0 * stats.t.sf(abs(slope) / se, df=k - 2))
    return MrResult(method="EGGER", estimate=slope, se=se, p=p, k_instruments=k, intercept=intercept)


def _descending_rank(values: np.ndarray) -> np.ndarray:
    """Rank positions (0 = largest), ties broken by input order."""
    order = np.argsort(-values, kind="stable")
    ranks = np.empty(len(values), dtype=int)
    ranks[order] = np.arange(len(values))
    return ranks


def bidirectional_mr(z1, n1, z2, n2, threshold_p: float = GENOME_WIDE_P) -> MrResult:
    """Compare the cross-trait rank correlation of each trait's top SNPs.

    Significant SNPs are assigned to the trait where they rank higher by
    chi-square (a SNP ranking equally high for both is excluded from both
    sets). The Spearman correlations r1, r2 between the two z-score series on
    each set are compared with a 1-df chi-square test on the difference of
    their atanh transforms.
    """
    z1 = np.asarray(z1, dtype=float)
    z2 = np.asarray(z2, dtype=float)
    sig1 = chi2_p(z1) < threshold_p
    sig2 = chi2_p(z2) < threshold_p
    idx1 = np.flatnonzero(sig1)
    idx2 = np.flatnonzero(sig2)
    if idx1.size == 0 or idx2.size == 0:
        raise NoInstruments("one of the traits has no significant SNPs")

    rank1 = dict(zip(idx1, _descending_rank(z1[idx1] ** 2)))
    rank2 = dict(zip(idx2, _descending_rank(z2[idx2] ** 2)))
    set1, set2 = [], []
    for i in idx1:
        if i in rank2:
            if rank1[i] < rank2[i]:
                set1.append(i)
            # equal ranks: excluded from both sets
        else:
            set1.append(i)
    for i in idx2:
        if i in rank1:
            if rank2[i] < rank1[i]:
                set2.append(i)
        else:
            set2.append(i)

    k1, k2 = len(set1), len(set2)
    if k1 < 4 or k2 < 4:
        raise TooFewInstruments(
            f"bidirectional MR needs >= 4 SNPs assigned to each trait, got {k1} and {k2}"
        )
    r1 = stats.spearmanr(z1[set1], z2[set1]).statistic
    r2 = stats.spearmanr(z1[set2], z2[set2]).statistic
    diff = float(np.arctanh(r1) - np.arctanh(r2))
    var = 1.0 / (k1 - 3) + 1.0 / (k2 - 3)
    chi2 = diff * diff / var
    p = float(stats.chi2.sf(chi2, df=1))
    return MrResult(
        method="BIDIR",
        estimate=diff,
        se=float(np.sqrt(var)),
        p=p,
        k_instruments=k1 + k2,
        k_pair=(k1, k2),
    )
