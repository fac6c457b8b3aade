"""Bunching comparisons for restricted Beta families and GB2 income fits."""

from ._core import (
    BunchingReport,
    Error,
    FitResult,
    GB2,
    GroupedTable,
    RestrictedBeta,
    ShapePair,
    bin_probabilities,
    census_edges_kusd,
    conjecture_scan,
    crossing_point,
    density_crossings,
    estimate_median_from_groups,
    fit_gb2,
    gamma_mc_oracle,
    inv_reg_inc_beta,
    load_grouped_csv,
    log_beta,
    model_gini,
    push_forward_map,
    reg_inc_beta,
    reg_inc_beta_complement,
    sign_changes,
    synthesize_table,
    verify_bunching,
    xstar_curve,
)

__all__ = [name for name in dir() if not name.startswith("_")]
