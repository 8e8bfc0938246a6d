"""Causal inference from mixed fourth moments of a normalized effect-size pair.

The engine compares the two mixed fourth moments E(a1^3*a2) and E(a1*a2^3).
If trait 1 drives the shared genetic component, SNPs with large effects on
trait 1 have proportional effects on trait 2 but not vice versa, so the first
moment exceeds the second. A grid statistic S(x) is built so that its mean is
zero at the true genetic causality proportion x; a block jackknife turns the
grid into an approximate likelihood, and a uniform prior on [-1, 1] yields a
posterior mean and SD. Partial causality is tested with S(0).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy import stats

from .errors import UndefinedGcp, ZeroRho
from .jackknife import block_sums, jackknife_se, loo_sums
from .ldsc import CrossTraitFit, NormalizedPair, TraitNormalization

DEFAULT_GRID_STEP = 0.01
ZH_FLOOR = 7.0
RHO_ALPHA = 0.05

FLAG_RHO_NONSIG = "RHO_NONSIG"
FLAG_LOW_ZH = "LOW_ZH"
FLAG_CLAMPED_RHO = "CLAMPED_RHO"
FLAG_BIMODAL = "BIMODAL_LIKELIHOOD"


def make_grid(step: float = DEFAULT_GRID_STEP) -> np.ndarray:
    """Symmetric grid over [-1, 1] with the given step; always contains 0."""
    n = int(round(1.0 / step))
    if n < 1 or abs(n * step - 1.0) > 1e-9:
        raise ValueError(f"grid step {step} does not divide 1")
    return np.linspace(-1.0, 1.0, 2 * n + 1)


def gcp_from_q(q1: float, q2: float, rho: float | None = None) -> float:
    """Genetic causality proportion implied by the latent-variable loadings.

    Returns (log|q2| - log|q1|) / (log|q2| + log|q1|), the exponent x solving
    q2^2/q1^2 = (rho^2)^x with rho = q1*q2. Equal loadings give 0; q1 = 1 gives
    full causality of trait 1 (gcp = 1).
    """
    if q1 == 0 or q2 == 0:
        raise UndefinedGcp("gcp is undefined when either latent loading is zero")
    l1, l2 = np.log(abs(q1)), np.log(abs(q2))
    if l1 + l2 == 0:
        raise UndefinedGcp("gcp is undefined when |q1| = |q2| = 1 (|rho| = 1)")
    if rho is not None and abs(rho) >= 1:
        raise UndefinedGcp("gcp is undefined at |rho| = 1")
    return float((l2 - l1) / (l2 + l1))


def q_from_gcp(gcp: float, rho: float) -> tuple[float, float]:
    """Latent loadings (q1, q2) with q1*q2 = rho and the given gcp. Inverse of gcp_from_q."""
    if rho == 0 or abs(rho) >= 1:
        raise UndefinedGcp("loadings are undefined for rho = 0 or |rho| >= 1")
    r = abs(rho)
    q1 = r ** ((1.0 - gcp) / 2.0)
    q2 = np.sign(rho) * r ** ((1.0 + gcp) / 2.0)
    return float(q1), float(q2)


def theoretical_m31(q1: float, q2: float, kappa_pi: float) -> float:
    """Model value of E(a1^3*a2): kappa_pi*q1^3*q2 + 3*q1*q2.

    kappa_pi is the excess kurtosis of the latent effect distribution; at 0 the
    mixed fourth moments carry no directional information.
    """
    return kappa_pi * q1**3 * q2 + 3.0 * q1 * q2


def theoretical_m13(q1: float, q2: float, kappa_pi: float) -> float:
    """Model value of E(a1*a2^3); the mirror of theoretical_m31."""
    return theoretical_m31(q2, q1, kappa_pi)


@dataclass
class MomentEstimates:
    """Noise-corrected mixed fourth moments and the derived k statistics."""

    m31: float
    m13: float
    k1: float
    k2: float


def _weighted_means(pair: NormalizedPair) -> np.ndarray:
    """Weighted means of [a1*a2, a1^2, a2^2, a1^3*a2, a1*a2^3] over all SNPs."""
    a1, a2, w = pair.a1, pair.a2, pair.weights
    cols = np.column_stack([a1 * a2, a1 * a1, a2 * a2, a1**3 * a2, a1 * a2**3])
    return (w[:, None] * cols).sum(axis=0) / w.sum()


def _corrected_moments(means, nv1, nv2, ncov):
    """Bias-correct raw weighted product means for estimation noise.

    means columns: [a1a2, a1^2, a2^2, a1^3a2, a1a2^3] (any leading shape).
    Returns (rho, m31, m13).
    """
    m = np.asarray(means)
    rho = m[..., 0] - ncov
    est_a1sq = m[..., 1] - nv1
    est_a2sq = m[..., 2] - nv2
    m31 = m[..., 3] - 3.0 * ncov * nv1 - 3.0 * nv1 * rho - ncov * est_a1sq
    m13 = m[..., 4] - 3.0 * ncov * nv2 - 3.0 * nv2 * rho - ncov * est_a2sq
    return rho, m31, m13


def estimate_moments(pair: NormalizedPair, rho_hat: float) -> MomentEstimates:
    """Estimate the mixed fourth moments of the true effects from noisy ones.

    Raw weighted means of a1^3*a2 and a1*a2^3 are corrected for the noise
    variance/covariance terms they absorb; the k statistics are the plug-in
    inversion k_j = (m_j - 3*rho)/rho of the fourth-moment identity.
    """
    if rho_hat == 0:
        raise ZeroRho("k statistics are undefined at rho = 0")
    means = _weighted_means(pair)
    _, m31, m13 = _corrected_moments(
        means, pair.noise_var_1, pair.noise_var_2, pair.noise_cov_12
    )
    return MomentEstimates(
        m31=float(m31),
        m13=float(m13),
        k1=float((m31 - 3.0 * rho_hat) / rho_hat),
        k2=float((m13 - 3.0 * rho_hat) / rho_hat),
    )


def s_statistic(x: float, k1: float, k2: float, rho_hat: float) -> float:
    """Grid statistic S(x) whose mean is zero when x is the true gcp.

    A(x) = |rho|^x * k1 and B(x) = |rho|^-x * k2 are compared and
    self-normalized; the denominator is floored at 1/|rho| so that the
    statistic stays conservative when the genetic correlation is weak.
    """
    if rho_hat == 0:
        raise ZeroRho("S(x) is undefined at rho = 0")
    r = min(abs(rho_hat), 1.0)
    a = r**x * k1
    b = r ** (-x) * k2
    return float((a - b) / max(1.0 / r, np.hypot(a, b)))


def _s_grid(rho, m31, m13, xs):
    """S(x) for every grid x, vectorized over leading axes of rho/m31/m13.

    Uses the rearrangement S = sign(rho)*(alpha - beta)/max(1, hypot) with
    alpha = |rho|^x*(m31 - 3rho), beta = |rho|^-x*(m13 - 3rho), which avoids
    dividing by small rho.
    """
    rho = np.atleast_1d(np.asarray(rho, dtype=float))[..., None]
    m31 = np.atleast_1d(np.asarray(m31, dtype=float))[..., None]
    m13 = np.atleast_1d(np.asarray(m13, dtype=float))[..., None]
    r = np.minimum(np.abs(rho), 1.0)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        alpha = r**xs * (m31 - 3.0 * rho)
        beta = r ** (-xs) * (m13 - 3.0 * rho)
        s = np.sign(rho) * (alpha - beta) / np.maximum(1.0, np.hypot(alpha, beta))
    return np.where(np.isfinite(s), s, 0.0)


def posterior_moments(xs: np.ndarray, likelihood: np.ndarray) -> tuple[float, float]:
    """Mean and SD of the grid posterior; the likelihood must sum to 1."""
    mean = float((xs * likelihood).sum())
    sd = float(np.sqrt(((xs - mean) ** 2 * likelihood).sum()))
    return mean, sd


@dataclass
class GcpGrid:
    """Per-grid-point statistics, standard errors, and the normalized likelihood."""

    xs: np.ndarray
    s_values: np.ndarray
    s_ses: np.ndarray
    likelihood: np.ndarray

    def mirrored(self) -> "GcpGrid":
        return GcpGrid(
            xs=self.xs,
            s_values=-self.s_values[::-1],
            s_ses=self.s_ses[::-1],
            likelihood=self.likelihood[::-1],
        )


@dataclass
class LcvResult:
    """Full output of a pair analysis: test, posterior, and context statistics."""

    p_partial_causality: float
    gcp_mean: float
    gcp_se: float
    rho_g: float
    rho_se: float
    z_h1: float
    z_h2: float
    flags: frozenset[str]
    grid: GcpGrid | None = None
    s0: float = 0.0
    s0_se: float = 0.0

    def test_chi2(self) -> float:
        """Squared standardized S(0), the partial-causality test statistic."""
        if self.s0_se == 0:
            return 0.0 if self.s0 == 0 else np.inf
        return (self.s0 / self.s0_se) ** 2

    def mirrored(self) -> "LcvResult":
        """The same result with trait order reversed."""
        return replace(
            self,
            gcp_mean=-self.gcp_mean,
            z_h1=self.z_h2,
            z_h2=self.z_h1,
            grid=self.grid.mirrored() if self.grid is not None else None,
            s0=-self.s0,
        )

    def to_dict(self) -> dict:
        return {
            "p": self.p_partial_causality,
            "gcp": self.gcp_mean,
            "gcp_se": self.gcp_se,
            "rho_g": self.rho_g,
            "rho_se": self.rho_se,
            "zh1": self.z_h1,
            "zh2": self.z_h2,
            "flags": sorted(self.flags),
        }


def _local_maxima(y: np.ndarray) -> list[int]:
    idx = []
    n = len(y)
    for i in range(n):
        left = y[i - 1] if i > 0 else -np.inf
        right = y[i + 1] if i < n - 1 else -np.inf
        if y[i] > left and y[i] >= right:
            idx.append(i)
    return idx


def _is_bimodal(like: np.ndarray) -> bool:
    """Two local maxima separated by a trough below half the smaller peak."""
    peaks = _local_maxima(like)
    for a, b in zip(peaks[:-1], peaks[1:]):
        trough = like[a + 1 : b].min() if b > a + 1 else min(like[a], like[b])
        if trough < 0.5 * min(like[a], like[b]):
            return True
    return False


def lcv_fit(
    pair: NormalizedPair,
    cross: CrossTraitFit,
    norm1: TraitNormalization,
    norm2: TraitNormalization,
    grid_step: float = DEFAULT_GRID_STEP,
    dof: int | None = None,
    jackknife_rho: bool = True,
) -> LcvResult:
    """Grid statistics, jackknife likelihood, posterior gcp, and the S(0) test.

    For every grid x the statistic S(x) is jackknifed over the pair's blocks
    (re-estimating the weighted moments, and rho unless jackknife_rho=False,
    on each retained subset while holding the normalization constants fixed).
    The likelihood at x is the t density of S(x)/se(x) with dof degrees of
    freedom (defaults to blocks - 2), normalized to sum 1 over the grid. The
    posterior mean/SD use a uniform prior; the p-value is a two-tailed t test
    on S(0).
    """
    xs = make_grid(grid_step)
    k = len(pair.block_bounds)
    if dof is None:
        dof = k - 2

    w = pair.weights
    a1, a2 = pair.a1, pair.a2
    cols = np.column_stack([a1 * a2, a1 * a1, a2 * a2, a1**3 * a2, a1 * a2**3])
    wcols = np.column_stack([w, w[:, None] * cols])
    bsums = block_sums(wcols, pair.block_bounds)

    total = bsums.sum(axis=0)
    full_means = total[1:] / total[0]
    loo = loo_sums(bsums)
    loo_means = loo[:, 1:] / loo[:, :1]

    nv1, nv2, ncov = pair.noise_var_1, pair.noise_var_2, pair.noise_cov_12
    rho_full, m31_full, m13_full = _corrected_moments(full_means, nv1, nv2, ncov)
    rho_loo, m31_loo, m13_loo = _corrected_moments(loo_means, nv1, nv2, ncov)
    if not jackknife_rho:
        rho_loo = np.full(k, rho_full)

    s_full = _s_grid(rho_full, m31_full, m13_full, xs)[0]
    s_loo = _s_grid(rho_loo, m31_loo, m13_loo, xs)
    s_se = jackknife_se(s_loo, axis=0)

    with np.errstate(divide="ignore", invalid="ignore"):
        stat = np.where(s_se > 0, s_full / s_se, np.where(s_full == 0, 0.0, np.inf))
    loglike = stats.t.logpdf(stat, dof)
    finite = np.isfinite(loglike)
    if not finite.any():
        like = np.full_like(xs, 1.0 / len(xs))
    else:
        like = np.exp(loglike - loglike[finite].max())
        like[~finite] = 0.0
        like = like / like.sum()

    gcp_mean, gcp_se = posterior_moments(xs, like)

    i0 = len(xs) // 2
    s0, s0_se = float(s_full[i0]), float(s_se[i0])
    if s0_se > 0:
        p = float(2.0 * stats.t.sf(abs(s0) / s0_se, dof))
    else:
        p = 1.0 if s0 == 0 else 0.0

    flags = set()
    if cross.rho_p >= RHO_ALPHA:
        flags.add(FLAG_RHO_NONSIG)
    if min(norm1.z_h, norm2.z_h) <= ZH_FLOOR:
        flags.add(FLAG_LOW_ZH)
    if cross.clamped:
        flags.add(FLAG_CLAMPED_RHO)
    if _is_bimodal(like):
        flags.add(FLAG_BIMODAL)

    return LcvResult(
        p_partial_causality=p,
        gcp_mean=gcp_mean,
        gcp_se=gcp_se,
        rho_g=cross.rho_g,
        rho_se=cross.rho_se,
        z_h1=norm1.z_h,
        z_h2=norm2.z_h,
        flags=frozenset(flags),
        grid=GcpGrid(xs=xs, s_values=s_full, s_ses=s_se, likelihood=like),
        s0=s0,
        s0_se=s0_se,
    )
