"""Weighted LD score regressions.

Per-trait: regress chi-square statistics on LD scores to split the mean signal
into a polygenic part and a noise intercept, yielding the scalar s used to put
summary statistics on a unit-genetic-variance scale, and a jackknife Z score
for nonzero heritability. Cross-trait: regress z1*z2 on LD scores to estimate
the genetic correlation and the sample-overlap intercept.

Two intercept modes exist. Estimated mode fits free intercepts by weighted
least squares (real data, or simulations with LD). Constrained mode pins the
per-trait intercept at 1 and the cross-trait intercept at 0, appropriate for
simulated statistics with no LD and no sample overlap, where the noise in each
Z score is exactly standard normal.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

from .errors import DataError, ZeroHeritability
from .jackknife import block_sums, jackknife_se, loo_sums, make_blocks
from .sumstats import AlignedPair

DEFAULT_EXCLUSION_MULTIPLIER = 30.0
DEFAULT_BLOCKS = 100


def compute_weights(ell_regression: np.ndarray) -> np.ndarray:
    """Regression weight per SNP: 1 for ell <= 1, else 1/ell.

    Down-weights SNPs in high LD with other regression SNPs, which would
    otherwise be over-counted.
    """
    ell = np.asarray(ell_regression, dtype=float)
    if np.any(~np.isfinite(ell)) or np.any(ell < 0):
        raise DataError("regression LD scores must be finite and non-negative")
    return 1.0 / np.maximum(1.0, ell)


@dataclass
class TraitNormalization:
    """Result of the per-trait regression: the normalization scalar and intercept.

    s is the square root of the weighted mean per-SNP genetic chi-square signal
    (weighted mean chi2 minus the intercept); z/s has unit genetic variance.
    """

    s: float
    intercept: float
    z_h: float
    excluded_count: int
    mean_chi2: float
    slope: float
    h2_hat: float | None = None
    h2_se: float | None = None
    label: str = ""

    def noise_var(self) -> float:
        """Noise variance on the normalized (z/s) scale."""
        return self.intercept / (self.s * self.s)

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "s": self.s,
            "intercept": self.intercept,
            "z_h": self.z_h,
            "excluded_count": self.excluded_count,
            "mean_chi2": self.mean_chi2,
            "h2_hat": self.h2_hat,
            "h2_se": self.h2_se,
        }


@dataclass
class CrossTraitFit:
    """Genetic correlation and cross-trait intercept on the normalized scale."""

    rho_g: float
    rho_se: float
    intercept_12: float
    rho_p: float
    clamped: bool = False

    def to_dict(self) -> dict:
        return {
            "rho_g": self.rho_g,
            "rho_se": self.rho_se,
            "rho_p": self.rho_p,
            "intercept_12": self.intercept_12,
            "clamped": self.clamped,
        }


@dataclass
class NormalizedPair:
    """Two unit-variance effect series with their noise moments and jackknife blocks."""

    a1: np.ndarray
    a2: np.ndarray
    noise_var_1: float
    noise_var_2: float
    noise_cov_12: float
    weights: np.ndarray
    block_bounds: list[tuple[int, int]]

    def __len__(self):
        return len(self.a1)

    def swapped(self) -> "NormalizedPair":
        return NormalizedPair(
            a1=self.a2,
            a2=self.a1,
            noise_var_1=self.noise_var_2,
            noise_var_2=self.noise_var_1,
            noise_cov_12=self.noise_cov_12,
            weights=self.weights,
            block_bounds=self.block_bounds,
        )


def _wls_line(x, y, w):
    """Slope and intercept minimizing sum w*(y - a - b*x)^2."""
    sw = w.sum()
    if sw <= 0:
        raise DataError("no SNPs left to fit the intercept regression")
    mx = (w * x).sum() / sw
    my = (w * y).sum() / sw
    sxx = (w * (x - mx) ** 2).sum()
    if sxx <= 0:
        raise DataError(
            "LD scores are constant; a free-intercept fit is unidentifiable "
            "(use constrained intercepts for no-LD data)"
        )
    slope = (w * (x - mx) * (y - my)).sum() / sxx
    return slope, my - slope * mx


def _loo_wls_line(bsums):
    """Vectorized leave-one-block WLS lines from per-block sums.

    bsums columns: [w, w*x, w*y, w*x^2, w*x*y]. Returns (slope, intercept)
    arrays with one entry per left-out block.
    """
    t = loo_sums(bsums)
    sw, swx, swy, swxx, swxy = t.T
    sxx = swxx - swx * swx / sw
    sxy = swxy - swx * swy / sw
    slope = sxy / sxx
    intercept = (swy - slope * swx) / sw
    return slope, intercept


def fit_trait_normalization(
    z,
    n=None,
    ell=None,
    ell_regression=None,
    weights=None,
    exclusion_multiplier: float = DEFAULT_EXCLUSION_MULTIPLIER,
    k_blocks: int = DEFAULT_BLOCKS,
    constrained_intercept: bool = False,
    label: str = "",
) -> TraitNormalization:
    """Fit the per-trait LD score regression and normalization scalar.

    The intercept is fitted on SNPs whose chi-square is at most
    exclusion_multiplier times the weighted mean (large-effect exclusion), but
    the weighted mean chi-square itself uses all SNPs. s^2 = mean chi2 minus
    intercept; raises ZeroHeritability when that is not positive. z_h is s over
    its delete-one-block jackknife standard error.
    """
    z = np.asarray(z, dtype=float)
    m = len(z)
    if ell is None:
        ell = np.ones(m)
    ell = np.asarray(ell, dtype=float)
    if weights is None:
        weights = compute_weights(ell if ell_regression is None else ell_regression)
    w = np.asarray(weights, dtype=float)
    chi2 = z * z

    sw = w.sum()
    mean_chi2 = float((w * chi2).sum() / sw)
    bounds = make_blocks(m, k_blocks)

    # All-SNP per-block sums for the weighted mean chi2.
    bs_all = block_sums(np.column_stack([w, w * chi2]), bounds)
    loo_all = loo_sums(bs_all)
    loo_mean_chi2 = loo_all[:, 1] / loo_all[:, 0]

    if constrained_intercept:
        intercept = 1.0
        excluded = 0
        loo_intercept = np.ones(k_blocks)
        wl = (w * ell).sum() / sw
        slope = (mean_chi2 - intercept) / wl
        loo_slope = None
    else:
        include = chi2 <= exclusion_multiplier * mean_chi2
        excluded = int(m - include.sum())
        wi = np.where(include, w, 0.0)
        slope, intercept = _wls_line(ell, chi2, wi)
        cols = np.column_stack([wi, wi * ell, wi * chi2, wi * ell * ell, wi * ell * chi2])
        loo_slope, loo_intercept = _loo_wls_line(block_sums(cols, bounds))

    s2 = mean_chi2 - intercept
    if s2 <= 0:
        raise ZeroHeritability(
            f"trait {label!r}: weighted mean chi2 {mean_chi2:.4f} does not exceed "
            f"intercept {intercept:.4f}"
        )
    s = float(np.sqrt(s2))

    loo_s = np.sqrt(np.maximum(loo_mean_chi2 - loo_intercept, 0.0))
    s_se = float(jackknife_se(loo_s))
    z_h = s / s_se if s_se > 0 else np.inf

    h2_hat = h2_se = None
    if n is not None:
        n_bar = float(np.mean(n))
        h2_hat = float(slope * m / n_bar)
        if loo_slope is not None:
            h2_se = float(jackknife_se(loo_slope) * m / n_bar)
        else:
            wl_loo = loo_sums(block_sums(np.column_stack([w, w * ell]), bounds))
            loo_wl = wl_loo[:, 1] / wl_loo[:, 0]
            h2_se = float(jackknife_se((loo_mean_chi2 - 1.0) / loo_wl) * m / n_bar)

    return TraitNormalization(
        s=s,
        intercept=float(intercept),
        z_h=float(z_h),
        excluded_count=excluded,
        mean_chi2=mean_chi2,
        slope=float(slope),
        h2_hat=h2_hat,
        h2_se=h2_se,
        label=label,
    )


def fit_cross_trait(
    pair: AlignedPair,
    norm1: TraitNormalization,
    norm2: TraitNormalization,
    weights=None,
    exclusion_multiplier: float = DEFAULT_EXCLUSION_MULTIPLIER,
    k_blocks: int = DEFAULT_BLOCKS,
    constrained_intercept: bool = False,
) -> CrossTraitFit:
    """Cross-trait LD score regression on the normalized scale.

    rho_g is the weighted mean of z1*z2/(s1*s2) net of the fitted cross-trait
    intercept, clamped to [-1, 1] with a flag. A SNP is excluded from the
    intercept fit when either trait's chi-square exceeds the large-effect
    threshold. rho_se and rho_p come from the block jackknife (normal
    approximation, two tailed).
    """
    z1, z2, ell = pair.z1, pair.z2, pair.ell
    m = len(z1)
    if weights is None:
        weights = compute_weights(pair.ell_regression)
    w = np.asarray(weights, dtype=float)
    y = z1 * z2
    s1s2 = norm1.s * norm2.s

    sw = w.sum()
    mean_y = float((w * y).sum() / sw)
    bounds = make_blocks(m, k_blocks)
    bs_all = block_sums(np.column_stack([w, w * y]), bounds)
    loo_all = loo_sums(bs_all)
    loo_mean_y = loo_all[:, 1] / loo_all[:, 0]

    if constrained_intercept:
        c12 = 0.0
        loo_c12 = np.zeros(k_blocks)
    else:
        chi1, chi2_ = z1 * z1, z2 * z2
        m1 = (w * chi1).sum() / sw
        m2 = (w * chi2_).sum() / sw
        include = (chi1 <= exclusion_multiplier * m1) & (chi2_ <= exclusion_multiplier * m2)
        wi = np.where(include, w, 0.0)
        _, c12 = _wls_line(ell, y, wi)
        cols = np.column_stack([wi, wi * ell, wi * y, wi * ell * ell, wi * ell * y])
        _, loo_c12 = _loo_wls_line(block_sums(cols, bounds))

    rho_raw = (mean_y - c12) / s1s2
    loo_rho = (loo_mean_y - loo_c12) / s1s2
    rho_se = float(jackknife_se(loo_rho))
    if rho_se > 0:
        rho_p = float(2.0 * stats.norm.sf(abs(rho_raw) / rho_se))
    else:
        rho_p = 0.0 if rho_raw != 0 else 1.0

    clamped = bool(abs(rho_raw) > 1.0)
    rho_g = float(np.clip(rho_raw, -1.0, 1.0))
    return CrossTraitFit(
        rho_g=rho_g,
        rho_se=rho_se,
        intercept_12=float(c12 / s1s2),
        rho_p=rho_p,
        clamped=clamped,
    )


def normalize_pair(
    pair: AlignedPair,
    norm1: TraitNormalization,
    norm2: TraitNormalization,
    cross: CrossTraitFit,
    weights=None,
    k_blocks: int = DEFAULT_BLOCKS,
) -> NormalizedPair:
    """Divide each trait's Z scores by its s and carry the rescaled noise moments.

    On the normalized scale the noise variance of trait k is intercept_k/s_k^2
    and the noise covariance is the cross-trait intercept (already normalized
    by the cross fit).
    """
    if weights is None:
        weights = compute_weights(pair.ell_regression)
    return NormalizedPair(
        a1=pair.z1 / norm1.s,
        a2=pair.z2 / norm2.s,
        noise_var_1=norm1.noise_var(),
        noise_var_2=norm2.noise_var(),
        noise_cov_12=cross.intercept_12,
        weights=np.asarray(weights, dtype=float),
        block_bounds=make_blocks(len(pair), k_blocks),
    )
