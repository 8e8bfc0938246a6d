"""Generative model for bivariate GWAS summary statistics.

Effect sizes follow a latent-intermediary architecture: per-SNP effects on one
or more heritable intermediaries (point-normal, sparse) load onto both traits
through per-intermediary coefficient pairs, plus trait-specific direct effects
with optional colocalization. Alternatively a Gaussian-mixture specification
replaces the point-normal machinery. Summary statistics are then drawn either
with no LD (independent unit noise per SNP) or through synthetic block-diagonal
LD with optional sample overlap.

Nonzero effect draws are empirically centered and rescaled, so realized
variances (and total heritability) are exact rather than statistical.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

from .errors import DataError, InfeasibleScenario, OverlapInfeasible, SingularDiagonal
from .sumstats import LdScoreTable, SnpRecord, SumstatsTable

LD_MODE_NONE = "none"
LD_MODE_BLOCKS = "blocks"


@dataclass
class SimScenario:
    """Complete description of one bivariate genetic architecture."""

    name: str = "custom"
    m_snps: int = 10_000
    n1: float = 100_000.0
    n2: float = 100_000.0
    h2_1: float = 0.3
    h2_2: float = 0.3
    # One (q1, q2) pair per intermediary; empty list means no shared component.
    q: list[tuple[float, float]] = field(default_factory=list)
    p_pi: list[float] = field(default_factory=list)
    p_gamma1: float = 0.0
    p_gamma2: float = 0.0
    p_gamma_shared: float = 0.0
    mixture_spec: list[tuple[float, float, float, float]] | None = None
    ld_mode: str = LD_MODE_NONE
    ld_block_size: int = 50
    # Scalar or per-block cycle of AR(1) correlations for synthetic LD.
    rho_ld: float | tuple[float, ...] = 0.5
    n_shared: float = 0.0
    rho_total: float = 0.0
    true_gcp: float | None = None
    is_null: bool = True
    seed: int = 0

    def rho(self) -> float:
        """Genetic correlation implied by the intermediary loadings."""
        return float(sum(q1 * q2 for q1, q2 in self.q))

    def validate(self) -> None:
        if self.m_snps < 10:
            raise InfeasibleScenario("m_snps too small")
        if not (0 <= self.h2_1 <= 1 and 0 <= self.h2_2 <= 1):
            raise InfeasibleScenario("heritabilities must lie in [0, 1]")
        if self.mixture_spec is not None:
            total = sum(w for w, *_ in self.mixture_spec)
            if total > 1 + 1e-12:
                raise InfeasibleScenario("mixture weights exceed 1")
            for w, v1, v2, cov in self.mixture_spec:
                if w < 0 or v1 < 0 or v2 < 0:
                    raise InfeasibleScenario("mixture weights and variances must be >= 0")
                if cov * cov > v1 * v2 + 1e-12:
                    raise InfeasibleScenario("mixture covariance exceeds sqrt(var1*var2)")
            return
        if len(self.q) != len(self.p_pi):
            raise InfeasibleScenario("need one causal proportion per intermediary")
        for q1, q2 in self.q:
            if abs(q1) > 1 or abs(q2) > 1:
                raise InfeasibleScenario("intermediary loadings must lie in [-1, 1]")
        for p in (*self.p_pi, self.p_gamma1, self.p_gamma2, self.p_gamma_shared):
            if not 0 <= p <= 1:
                raise InfeasibleScenario("causal proportions must lie in [0, 1]")
        if self.p_gamma_shared > min(self.p_gamma1, self.p_gamma2) + 1e-12:
            raise InfeasibleScenario("shared direct-effect proportion exceeds a trait total")
        for k, resid in enumerate(self._residual_vars()):
            if resid < -1e-9:
                raise InfeasibleScenario(
                    f"trait {k + 1}: intermediary loadings leave negative residual variance"
                )

    def _residual_vars(self) -> tuple[float, float]:
        r1 = 1.0 - sum(q1 * q1 for q1, _ in self.q)
        r2 = 1.0 - sum(q2 * q2 for _, q2 in self.q)
        return r1, r2

    def constrained_intercepts(self) -> bool:
        """No-LD statistics have exactly unit noise; pin the intercepts there."""
        return self.ld_mode == LD_MODE_NONE

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "m_snps": self.m_snps,
            "n1": self.n1,
            "n2": self.n2,
            "h2_1": self.h2_1,
            "h2_2": self.h2_2,
            "q": [list(pair) for pair in self.q],
            "p_pi": list(self.p_pi),
            "p_gamma1": self.p_gamma1,
            "p_gamma2": self.p_gamma2,
            "p_gamma_shared": self.p_gamma_shared,
            "mixture_spec": None
            if self.mixture_spec is None
            else [list(c) for c in self.mixture_spec],
            "ld_mode": self.ld_mode,
            "ld_block_size": self.ld_block_size,
            "rho_ld": list(self.rho_ld) if not np.isscalar(self.rho_ld) else self.rho_ld,
            "n_shared": self.n_shared,
            "rho_total": self.rho_total,
            "true_gcp": self.true_gcp,
            "is_null": self.is_null,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SimScenario":
        known = set(cls.__dataclass_fields__)
        bad = set(d) - known
        if bad:
            raise DataError(f"unknown scenario keys: {sorted(bad)}")
        d = dict(d)
        if "q" in d:
            d["q"] = [tuple(pair) for pair in d["q"]]
        if d.get("mixture_spec") is not None:
            d["mixture_spec"] = [tuple(c) for c in d["mixture_spec"]]
        if "rho_ld" in d and isinstance(d["rho_ld"], list):
            d["rho_ld"] = tuple(d["rho_ld"])
        return cls(**d)

    @classmethod
    def from_json(cls, path) -> "SimScenario":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


@dataclass
class SimTruth:
    """Ground truth recorded alongside simulated statistics."""

    beta1: np.ndarray
    beta2: np.ndarray
    gcp: float | None
    rho_target: float
    rho_realized: float
    kappa_pi: list[float]
    h2: tuple[float, float]
    assignments: dict
    is_null: bool

    def to_dict(self) -> dict:
        return {
            "gcp": self.gcp,
            "rho_target": self.rho_target,
            "rho_realized": self.rho_realized,
            "kappa_pi": self.kappa_pi,
            "h2_1": self.h2[0],
            "h2_2": self.h2[1],
            "is_null": self.is_null,
        }


@dataclass
class SimOutput:
    sumstats1: SumstatsTable
    sumstats2: SumstatsTable
    ld_scores: LdScoreTable
    truth: SimTruth


def _standardized_sparse(m: int, p: float, target_var: float, rng) -> np.ndarray:
    """Point-normal vector whose full-length empirical variance is exactly target_var.

    Nonzero entries are drawn at expected proportion p, then centered and
    rescaled. Redraws when fewer than 2 SNPs come up causal for a nonzero
    target, since a single entry cannot be centered.
    """
    v = np.zeros(m)
    if target_var <= 0 or p <= 0:
        return v
    for _ in range(100):
        mask = rng.random(m) < p
        if mask.sum() >= 2:
            break
    else:
        raise InfeasibleScenario(f"causal proportion {p} draws < 2 causal SNPs at M={m}")
    vals = rng.standard_normal(int(mask.sum()))
    vals -= vals.mean()
    vals *= np.sqrt(target_var * m / (vals @ vals))
    v[mask] = vals
    return v


def _excess_kurtosis(v: np.ndarray) -> float:
    var = float(v @ v) / len(v)
    if var == 0:
        return 0.0
    return float((v**4).mean() / var**2 - 3.0)


def _draw_mixture(scenario: SimScenario, rng):
    m = scenario.m_snps
    spec = scenario.mixture_spec
    weights = np.array([w for w, *_ in spec])
    cum = np.cumsum(weights)
    u = rng.random(m)
    comp = np.searchsorted(cum, u, side="right")  # == len(spec) -> point mass at (0, 0)
    b1 = np.zeros(m)
    b2 = np.zeros(m)
    for c, (_, v1, v2, cov) in enumerate(spec):
        idx = np.flatnonzero(comp == c)
        if idx.size == 0:
            continue
        x = rng.standard_normal(idx.size)
        y = rng.standard_normal(idx.size)
        if v1 > 0:
            b1[idx] = np.sqrt(v1) * x
            resid = max(v2 - cov * cov / v1, 0.0)
            b2[idx] = cov / np.sqrt(v1) * x + np.sqrt(resid) * y
        else:
            b2[idx] = np.sqrt(v2) * y
    return b1, b2, comp


def draw_effects(scenario: SimScenario, rng) -> tuple[np.ndarray, np.ndarray, SimTruth]:
    """Draw per-SNP causal effects for both traits and record ground truth.

    Each trait's effects are finally rescaled so the summed squared effects
    equal the scenario heritability exactly.
    """
    scenario.validate()
    m = scenario.m_snps

    if scenario.mixture_spec is not None:
        g1, g2, comp = _draw_mixture(scenario, rng)
        assignments = {"component": comp}
        kappas = []
    else:
        r1, r2 = scenario._residual_vars()
        pis = [_standardized_sparse(m, p, 1.0, rng) for p in scenario.p_pi]
        kappas = [_excess_kurtosis(pi) for pi in pis]

        # One uniform per SNP places the colocalized direct effects: the first
        # p_shared of mass carries both traits, then each trait's exclusive slice.
        u = rng.random(m)
        p_sh = scenario.p_gamma_shared
        mask1 = u < scenario.p_gamma1
        mask2 = (u < p_sh) | (
            (u >= scenario.p_gamma1) & (u < scenario.p_gamma1 + scenario.p_gamma2 - p_sh)
        )

        def _gamma(mask, target_var):
            v = np.zeros(m)
            nz = int(mask.sum())
            if target_var <= 0 or nz == 0:
                return v
            if nz < 2:
                raise InfeasibleScenario("direct-effect proportion draws < 2 causal SNPs")
            vals = rng.standard_normal(nz)
            vals -= vals.mean()
            vals *= np.sqrt(target_var * m / (vals @ vals))
            v[mask] = vals
            return v

        gamma1 = _gamma(mask1, r1)
        gamma2 = _gamma(mask2, r2)
        g1 = sum((q1 * pi for (q1, _), pi in zip(scenario.q, pis)), gamma1)
        g2 = sum((q2 * pi for (_, q2), pi in zip(scenario.q, pis)), gamma2)
        assignments = {
            "pi_nonzero": [np.flatnonzero(pi != 0) for pi in pis],
            "gamma1_nonzero": np.flatnonzero(gamma1 != 0),
            "gamma2_nonzero": np.flatnonzero(gamma2 != 0),
        }

    def _scaled(g, h2):
        beta = np.sqrt(h2 / m) * g
        ss = float(beta @ beta)
        if h2 > 0:
            if ss == 0:
                raise InfeasibleScenario("architecture produced a zero effect vector")
            beta *= np.sqrt(h2 / ss)
        return beta

    beta1 = _scaled(g1, scenario.h2_1)
    beta2 = _scaled(g2, scenario.h2_2)

    ss1, ss2 = float(beta1 @ beta1), float(beta2 @ beta2)
    if ss1 > 0 and ss2 > 0:
        rho_realized = float(beta1 @ beta2 / np.sqrt(ss1 * ss2))
    else:
        rho_realized = 0.0

    gcp = scenario.true_gcp
    if gcp is None and scenario.mixture_spec is None and len(scenario.q) == 1:
        from .inference import gcp_from_q
        from .errors import UndefinedGcp

        q1, q2 = scenario.q[0]
        try:
            gcp = gcp_from_q(q1, q2)
        except UndefinedGcp:
            gcp = None

    truth = SimTruth(
        beta1=beta1,
        beta2=beta2,
        gcp=gcp,
        rho_target=scenario.rho() if scenario.mixture_spec is None else rho_realized,
        rho_realized=rho_realized,
        kappa_pi=kappas,
        h2=(scenario.h2_1, scenario.h2_2),
        assignments=assignments,
        is_null=scenario.is_null,
    )
    return beta1, beta2, truth


def sample_sumstats_no_ld(beta1, beta2, n1: float, n2: float, rng):
    """Z scores with independent unit noise: z_k = sqrt(N_k)*beta_k + N(0, 1)."""
    m = len(beta1)
    z1 = np.sqrt(n1) * np.asarray(beta1) + rng.standard_normal(m)
    z2 = np.sqrt(n2) * np.asarray(beta2) + rng.standard_normal(m)
    return z1, z2


@dataclass
class LdBlockSet:
    """Block-diagonal LD: per-block correlation matrices, square roots, LD scores."""

    blocks: list[np.ndarray]
    block_sqrts: list[np.ndarray]
    ld_scores: np.ndarray
    bounds: list[tuple[int, int]]

    def __len__(self):
        return int(self.ld_scores.shape[0])


def build_ld_blocks(raw_blocks) -> LdBlockSet:
    """Project each raw block to the nearest-in-spirit PSD correlation matrix.

    Per block: symmetrize, eigendecompose, clip negative eigenvalues to zero,
    then renormalize to unit diagonal (without the renormalization the diagonal
    correlates with the LD scores and heritability estimates are biased).
    LD scores are the row sums of squared correlations within each block.
    """
    blocks, sqrts, scores, bounds = [], [], [], []
    offset = 0
    for raw in raw_blocks:
        a = np.asarray(raw, dtype=float)
        a = 0.5 * (a + a.T)
        vals, vecs = np.linalg.eigh(a)
        b = (vecs * np.maximum(vals, 0.0)) @ vecs.T
        d = np.diag(b).copy()
        if np.any(d <= 0):
            raise SingularDiagonal("block has a non-positive diagonal after clipping")
        inv_sqrt_d = 1.0 / np.sqrt(d)
        c = b * np.outer(inv_sqrt_d, inv_sqrt_d)
        c = 0.5 * (c + c.T)
        cvals, cvecs = np.linalg.eigh(c)
        root = (cvecs * np.sqrt(np.maximum(cvals, 0.0))) @ cvecs.T
        blocks.append(c)
        sqrts.append(root)
        scores.append((c * c).sum(axis=1))
        bounds.append((offset, offset + len(c)))
        offset += len(c)
    return LdBlockSet(
        blocks=blocks,
        block_sqrts=sqrts,
        ld_scores=np.concatenate(scores) if scores else np.zeros(0),
        bounds=bounds,
    )


def ar1_block(size: int, rho: float) -> np.ndarray:
    idx = np.arange(size)
    return rho ** np.abs(idx[:, None] - idx[None, :])


def synthetic_ld_blocks(
    m_snps: int,
    block_size: int = 50,
    rho_ld=0.5,
    n_perturbed: int = 3,
    perturb_scale: float = 0.3,
    seed: int = 1234,
) -> list[np.ndarray]:
    """Raw AR(1) correlation blocks covering m_snps, a few deliberately non-PSD.

    rho_ld may be a scalar or a sequence cycled across blocks; heterogeneous
    block correlations give the LD scores enough spread for a free-intercept
    regression to be identified, which homogeneous blocks do not. The perturbed
    blocks exercise the eigenvalue clipping that real windowed LD estimates
    require.
    """
    rng = np.random.default_rng(seed)
    rhos = np.atleast_1d(np.asarray(rho_ld, dtype=float))
    sizes = [block_size] * (m_snps // block_size)
    if m_snps % block_size:
        sizes.append(m_snps % block_size)
    raw = []
    for i, size in enumerate(sizes):
        block = ar1_block(size, float(rhos[i % len(rhos)]))
        if i < n_perturbed and size >= 2:
            noise = rng.standard_normal((size, size)) * perturb_scale / np.sqrt(size)
            noise = 0.5 * (noise + noise.T)
            np.fill_diagonal(noise, 0.0)
            block = block + noise
        raw.append(block)
    return raw


@lru_cache(maxsize=8)
def _cached_ld(m_snps: int, block_size: int, rho_ld) -> LdBlockSet:
    return build_ld_blocks(synthetic_ld_blocks(m_snps, block_size, rho_ld))


def scenario_ld(scenario: SimScenario) -> LdBlockSet:
    """The (cached) LD block set a scenario samples through; fixed across replicates."""
    rho = scenario.rho_ld
    return _cached_ld(scenario.m_snps, scenario.ld_block_size, rho if np.isscalar(rho) else tuple(rho))


def overlap_correlation(n1: float, n2: float, n_shared: float, rho_total: float) -> float:
    """Per-SNP noise correlation induced by shared samples."""
    c = rho_total * n_shared / np.sqrt(n1 * n2)
    if abs(c) > 1:
        raise OverlapInfeasible(f"implied noise correlation {c:.3f} outside [-1, 1]")
    return float(c)


def _correlated_standard_normals(size: int, c: float, rng):
    """Two standard-normal vectors with correlation c, from a shared component."""
    g = rng.standard_normal(size)
    e1 = rng.standard_normal(size)
    e2 = rng.standard_normal(size)
    ac = abs(c)
    u1 = np.sqrt(ac) * g + np.sqrt(1.0 - ac) * e1
    u2 = np.sign(c) * np.sqrt(ac) * g + np.sqrt(1.0 - ac) * e2 if c != 0 else e2
    return u1, u2


def sample_sumstats_ld(
    beta1,
    beta2,
    ld: LdBlockSet,
    n1: float,
    n2: float,
    rng,
    n_shared: float = 0.0,
    rho_total: float = 0.0,
):
    """Z scores through block LD: mean sqrt(N)*C*beta, noise covariance C per trait.

    With sample overlap the noise of the two traits is correlated as
    C_ij * rho_total * n_shared / sqrt(n1*n2), generated by pushing a shared
    standard-normal component through the same block square root.
    """
    c = overlap_correlation(n1, n2, n_shared, rho_total)
    m = len(beta1)
    z1 = np.empty(m)
    z2 = np.empty(m)
    for (start, stop), corr, root in zip(ld.bounds, ld.blocks, ld.block_sqrts):
        b1 = np.asarray(beta1[start:stop])
        b2 = np.asarray(beta2[start:stop])
        u1, u2 = _correlated_standard_normals(stop - start, c, rng)
        z1[start:stop] = np.sqrt(n1) * (corr @ b1) + root @ u1
        z2[start:stop] = np.sqrt(n2) * (corr @ b2) + root @ u2
    return z1, z2


def simulate_arrays(scenario: SimScenario, seed: int | None = None) -> dict:
    """One replicate as raw arrays: z/n/ld series plus the truth record."""
    if seed is None:
        seed = scenario.seed
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    beta1, beta2, truth = draw_effects(scenario, rng)
    if scenario.ld_mode == LD_MODE_BLOCKS:
        ld = scenario_ld(scenario)
        z1, z2 = sample_sumstats_ld(
            beta1, beta2, ld, scenario.n1, scenario.n2, rng,
            n_shared=scenario.n_shared, rho_total=scenario.rho_total,
        )
        ell = ld.ld_scores
    elif scenario.ld_mode == LD_MODE_NONE:
        c = overlap_correlation(scenario.n1, scenario.n2, scenario.n_shared, scenario.rho_total)
        if c == 0:
            z1, z2 = sample_sumstats_no_ld(beta1, beta2, scenario.n1, scenario.n2, rng)
        else:
            u1, u2 = _correlated_standard_normals(scenario.m_snps, c, rng)
            z1 = np.sqrt(scenario.n1) * beta1 + u1
            z2 = np.sqrt(scenario.n2) * beta2 + u2
        ell = np.ones(scenario.m_snps)
    else:
        raise DataError(f"unknown ld_mode {scenario.ld_mode!r}")
    return {
        "z1": z1,
        "z2": z2,
        "n1": scenario.n1,
        "n2": scenario.n2,
        "ell": ell,
        "truth": truth,
    }


def _snp_metadata(m: int):
    ids = [f"rs{i + 1}" for i in range(m)]
    chrom = np.ones(m, dtype=int)
    bp = (np.arange(m) + 1) * 1000
    cm = (np.arange(m) + 1) * 0.01
    return ids, chrom, bp, cm


def simulate(scenario: SimScenario, seed: int | None = None) -> SimOutput:
    """One replicate packaged as summary-statistics tables plus an LD score table."""
    arrays = simulate_arrays(scenario, seed)
    m = scenario.m_snps
    ids, chrom, bp, cm = _snp_metadata(m)

    def _table(z, n, label):
        records = [
            SnpRecord(
                snp_id=ids[i],
                chrom=int(chrom[i]),
                position_bp=int(bp[i]),
                allele_a1="A",
                allele_a2="G",
                z=float(z[i]),
                n=float(n),
                position_cm=float(cm[i]),
            )
            for i in range(m)
        ]
        return SumstatsTable(records, trait_label=label)

    ld_table = LdScoreTable.from_arrays(ids, arrays["ell"])
    return SimOutput(
        sumstats1=_table(arrays["z1"], arrays["n1"], f"{scenario.name}:trait1"),
        sumstats2=_table(arrays["z2"], arrays["n2"], f"{scenario.name}:trait2"),
        ld_scores=ld_table,
        truth=arrays["truth"],
    )
