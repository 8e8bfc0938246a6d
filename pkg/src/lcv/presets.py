"""Named benchmark scenarios at desk scale.

These reproduce the structure of the calibration/power/violation benchmark
grid at M = 10k SNPs so that full suites run in minutes. Parameters that the
benchmark definitions leave open (the causal proportion of the shared
component in the no-LD null/power scenarios, the exact mixture variances of
the noisy-proportionality scenario, and the amount of sample overlap in the
LD rows) are fixed here with the defaults below and are plain fields on the
returned scenarios, so sensitivity analyses can override them.

Naming: fig2* are no-LD calibration nulls, fig3a is the no-LD power scenario,
fig4* are model-violation scenarios (Gaussian mixtures and two intermediaries),
table3-* are the LD rows a..bb.
"""

from __future__ import annotations

from dataclasses import replace

from .sim import LD_MODE_BLOCKS, LD_MODE_NONE, SimScenario

DESK_M = 10_000

# Desk-scale defaults for parameters the benchmark grid leaves open. The LD
# null rows use a sparser shared component than the no-LD scenarios: at
# M = 10k the mixed-fourth-moment signal would otherwise be too diffuse for
# the estimator to retain its full-scale precision.
DEFAULT_P_PI = 0.01
DEFAULT_P_PI_LD = 0.003
# In the no-LD scenarios the trait-specific effects are as polygenic as the
# shared component, so per-SNP effect magnitudes are comparable across the two
# classes; with sparser direct effects the desk-scale instrument sets mix two
# very different effect scales and the rank-correlation baseline overdisperses.
DEFAULT_P_GAMMA_NOLD = 0.04
DEFAULT_P_GAMMA_LD = 0.004

# Per-block AR(1) correlations for the synthetic LD rows (mean 0.5). At desk
# scale a single homogeneous correlation leaves the LD scores nearly constant,
# and the free-intercept regression is then so noisy that heritability-driven
# variance swamps the estimates; mixing block correlations restores the spread
# that genome-wide LD scores have.
LD_RHO_PROFILE = (0.2, 0.35, 0.5, 0.65, 0.8)

_SQ02 = 0.2**0.5  # loading giving rho = 0.2 with equal q


def _fig2_base(**kw) -> SimScenario:
    base = dict(
        m_snps=DESK_M,
        n1=100_000.0,
        n2=100_000.0,
        h2_1=0.3,
        h2_2=0.3,
        q=[(_SQ02, _SQ02)],
        p_pi=[DEFAULT_P_PI],
        p_gamma1=DEFAULT_P_GAMMA_NOLD,
        p_gamma2=DEFAULT_P_GAMMA_NOLD,
        ld_mode=LD_MODE_NONE,
        is_null=True,
        true_gcp=0.0,
    )
    base.update(kw)
    return SimScenario(**base)


def _table3_base(**kw) -> SimScenario:
    base = dict(
        m_snps=DESK_M,
        n1=100_000.0,
        n2=100_000.0,
        h2_1=0.3,
        h2_2=0.3,
        q=[(_SQ02, _SQ02)],
        p_pi=[DEFAULT_P_PI_LD],
        p_gamma1=DEFAULT_P_GAMMA_LD,
        p_gamma2=DEFAULT_P_GAMMA_LD,
        ld_mode=LD_MODE_BLOCKS,
        rho_ld=LD_RHO_PROFILE,
        n_shared=100_000.0,
        rho_total=0.2,
        is_null=True,
        true_gcp=0.0,
    )
    base.update(kw)
    return SimScenario(**base)


def _q_for(rho: float) -> list[tuple[float, float]]:
    """Symmetric loadings (null architecture) realizing a genetic correlation rho."""
    if rho == 0:
        return []
    mag = abs(rho) ** 0.5
    return [(mag, (1 if rho > 0 else -1) * mag)]


def _partial_q(rho: float, gcp: float) -> list[tuple[float, float]]:
    """Loadings with q1*q2 = rho realizing a given causality proportion."""
    q1 = abs(rho) ** ((1 - gcp) / 2)
    q2 = rho / q1
    return [(q1, q2)]


def preset_scenarios() -> dict[str, SimScenario]:
    """The named benchmark grid; every returned scenario validates."""
    s: dict[str, SimScenario] = {}

    # --- no-LD calibration nulls -------------------------------------------------
    s["fig2a"] = _fig2_base(name="fig2a", q=[], p_pi=[], p_gamma_shared=0.003)
    s["fig2b"] = _fig2_base(name="fig2b")
    # 4x polygenicity difference; the sparser side stays above the significance
    # threshold, the denser side does not, which is what distorts rank-based
    # instrument assignment.
    s["fig2c"] = _fig2_base(name="fig2c", p_gamma1=0.04, p_gamma2=0.16)
    # 5x sample-size difference. Direct effects are sparser (larger per SNP)
    # than the shared component here so that the underpowered trait still
    # yields instruments; the resulting class asymmetry at N2 = 20k is the
    # power-imbalance failure mode the scenario exists to exhibit.
    s["fig2d"] = _fig2_base(name="fig2d", n2=20_000.0, p_gamma1=0.008, p_gamma2=0.008)

    # --- no-LD power -------------------------------------------------------------
    s["fig3a"] = _fig2_base(
        name="fig3a",
        n1=25_000.0,
        n2=25_000.0,
        q=[(1.0, 0.2)],
        p_gamma1=0.0,
        is_null=False,
        true_gcp=1.0,
    )

    # --- model violations (Gaussian mixtures, two intermediaries) -----------------
    # Correlated component: 1% of SNPs, within-component correlation 0.5,
    # explaining 20% of each trait's heritability.
    mix_shared = (0.01, 20.0, 20.0, 10.0)
    s["fig4a"] = _fig2_base(
        name="fig4a",
        q=[],
        p_pi=[],
        mixture_spec=[mix_shared, (0.04, 20.0, 0.0, 0.0), (0.04, 0.0, 20.0, 0.0)],
    )
    s["fig4b"] = _fig2_base(
        name="fig4b",
        q=[],
        p_pi=[],
        mixture_spec=[mix_shared, (0.02, 40.0, 0.0, 0.0), (0.08, 0.0, 10.0, 0.0)],
    )
    s["fig4c"] = replace(s["fig4a"], name="fig4c", n2=20_000.0)
    s["fig4d"] = _fig2_base(
        name="fig4d",
        q=[(0.5, 0.2), (0.2, 0.5)],
        p_pi=[0.02, 0.02],
        p_gamma1=0.04,
        p_gamma2=0.04,
        true_gcp=0.0,
    )
    s["fig4e"] = replace(s["fig4d"], name="fig4e", p_pi=[0.01, 0.08])
    # Causal with noisy proportionality: every SNP affecting trait 1 also affects
    # trait 2 with correlation 0.9; the shared block carries 20% of trait 2.
    s["fig4f"] = _fig2_base(
        name="fig4f",
        n1=25_000.0,
        n2=25_000.0,
        q=[],
        p_pi=[],
        mixture_spec=[
            (0.01, 100.0, 4.0, 0.9 * 20.0),
            (0.04, 0.0, 24.0, 0.0),
        ],
        is_null=False,
        true_gcp=1.0,
    )
    # Causal plus a genetic confounder mediating part of the correlation.
    s["fig4g"] = _fig2_base(
        name="fig4g",
        n1=25_000.0,
        n2=25_000.0,
        q=[(0.9, 0.18), (0.3, 0.3)],
        p_pi=[0.01, 0.01],
        p_gamma1=0.0,
        is_null=False,
        true_gcp=None,
    )

    # --- LD rows ------------------------------------------------------------------
    s["table3-a"] = _table3_base(name="table3-a", q=[], p_pi=[], rho_total=0.0)
    s["table3-b"] = _table3_base(name="table3-b", q=_q_for(0.1), rho_total=0.1)
    s["table3-c"] = _table3_base(name="table3-c")
    s["table3-d"] = _table3_base(name="table3-d", q=_q_for(0.4), rho_total=0.4)
    s["table3-e"] = _table3_base(name="table3-e", q=_q_for(0.8), rho_total=0.8)
    # Colocalized rows carry denser direct effects so the 0.3% shared SNPs do
    # not individually dominate the fourth moments at M = 10k.
    s["table3-f"] = _table3_base(
        name="table3-f", p_gamma1=0.012, p_gamma2=0.012, p_gamma_shared=0.003
    )
    s["table3-g"] = _table3_base(name="table3-g", p_gamma1=0.002, p_gamma2=0.008)
    s["table3-h"] = _table3_base(name="table3-h", p_gamma1=0.001, p_gamma2=0.016)
    s["table3-i"] = _table3_base(name="table3-i", n1=20_000.0, n_shared=20_000.0)
    s["table3-j"] = _table3_base(name="table3-j", n1=4_000.0, n_shared=4_000.0)
    s["table3-k"] = _table3_base(name="table3-k", h2_1=0.1, h2_2=0.5)
    s["table3-l"] = _table3_base(name="table3-l", rho_total=0.4)
    s["table3-m"] = _table3_base(name="table3-m", rho_total=0.0)
    s["table3-n"] = _table3_base(
        name="table3-n",
        q=[],
        p_pi=[],
        rho_total=0.0,
        p_gamma1=0.012,
        p_gamma2=0.012,
        p_gamma_shared=0.003,
    )
    s["table3-o"] = _table3_base(
        name="table3-o", q=[], p_pi=[], rho_total=0.0, p_gamma1=0.002, p_gamma2=0.008
    )
    s["table3-p"] = _table3_base(
        name="table3-p", q=[], p_pi=[], rho_total=0.0, p_gamma1=0.001, p_gamma2=0.016
    )
    s["table3-q"] = _table3_base(
        name="table3-q", q=[], p_pi=[], rho_total=0.0, n1=20_000.0, n_shared=20_000.0
    )
    s["table3-r"] = _table3_base(
        name="table3-r", q=[], p_pi=[], rho_total=0.0, n1=4_000.0, n_shared=4_000.0
    )
    s["table3-s"] = _table3_base(name="table3-s", q=[], p_pi=[], rho_total=0.0, h2_1=0.1, h2_2=0.5)

    causal = dict(q=[(1.0, 0.2)], p_pi=[0.005], p_gamma1=0.0, is_null=False, true_gcp=1.0)
    s["table3-t"] = _table3_base(name="table3-t", **causal)
    s["table3-u"] = _table3_base(
        name="table3-u",
        q=_partial_q(0.2, 0.5),
        p_pi=[0.005],
        is_null=False,
        true_gcp=0.5,
    )
    s["table3-v"] = _table3_base(name="table3-v", n1=20_000.0, n_shared=20_000.0, **causal)
    s["table3-w"] = _table3_base(name="table3-w", n1=4_000.0, n_shared=4_000.0, **causal)
    s["table3-x"] = _table3_base(name="table3-x", n2=20_000.0, n_shared=20_000.0, **causal)
    s["table3-y"] = _table3_base(
        name="table3-y",
        q=[(1.0, 0.1)],
        p_pi=[0.005],
        p_gamma1=0.0,
        rho_total=0.1,
        is_null=False,
        true_gcp=1.0,
    )
    s["table3-z"] = _table3_base(name="table3-z", **{**causal, "p_pi": [0.0005]})
    s["table3-aa"] = _table3_base(name="table3-aa", **{**causal, "p_pi": [0.05]})
    s["table3-bb"] = _table3_base(name="table3-bb", **{**causal, "p_pi": [1.0]})

    for scenario in s.values():
        scenario.validate()
    return s


def get_scenario(name: str) -> SimScenario:
    scenarios = preset_scenarios()
    if name not in scenarios:
        from .errors import DataError

        raise DataError(
            f"unknown scenario {name!r}; available: {', '.join(sorted(scenarios))}"
        )
    return scenarios[name]
