"""Distinguishing genetic correlation from genetic causation with GWAS summary statistics.

The package provides: summary-statistics ingestion and harmonization
(sumstats), weighted LD score regressions for normalization and genetic
correlation (ldsc), causal inference from mixed fourth moments (inference),
Mendelian randomization baselines (mr), a generative simulator with LD and
model-violation scenarios (sim, presets), benchmark suites (bench), and a CLI
(cli).
"""

from . import errors
from .bench import BenchmarkSummary, run_benchmark, run_gcp_sweep, run_matrix
from .fdr import FdrDecision, bh_rejections
from .inference import (
    GcpGrid,
    LcvResult,
    MomentEstimates,
    estimate_moments,
    gcp_from_q,
    lcv_fit,
    q_from_gcp,
    s_statistic,
    theoretical_m13,
    theoretical_m31,
)
from .jackknife import jackknife_scalar, make_blocks
from .ldsc import (
    CrossTraitFit,
    NormalizedPair,
    TraitNormalization,
    compute_weights,
    fit_cross_trait,
    fit_trait_normalization,
    normalize_pair,
)
from .mr import (
    InstrumentSet,
    MrResult,
    bidirectional_mr,
    mr_egger,
    prune_instruments,
    select_instruments,
    two_sample_mr,
)
from .pipeline import PairReport, analyze_pair, run_mr_suite
from .presets import get_scenario, preset_scenarios
from .sim import (
    LdBlockSet,
    SimOutput,
    SimScenario,
    build_ld_blocks,
    draw_effects,
    sample_sumstats_ld,
    sample_sumstats_no_ld,
    simulate,
    synthetic_ld_blocks,
)
from .sumstats import (
    AlignedPair,
    ColumnMap,
    LdScoreTable,
    SnpRecord,
    SumstatsTable,
    align_pair,
    filter_snps,
    parse_ld_scores,
    parse_sumstats,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
