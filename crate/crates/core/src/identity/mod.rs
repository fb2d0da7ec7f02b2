//! Residual checkers for every identity the crate verifies, plus the
//! numerical limit experiments.

mod addition;
mod charlier;
mod classical;
mod limits;
mod series_ids;

pub use addition::{
    addition_lhs, addition_residual, addition_rhs, product_block, product_residual, product_rhs,
    AdditionCase,
};
pub use charlier::{
    hansen_lommel_q_residual, qcharlier_extension_residual, qcharlier_extension_special_residual,
    qlaguerre_relation_residual,
};
pub use classical::{
    graf_classical_residual, graf_lhs, graf_product_classical_residual,
    hansen_lommel_classical_residual, GrafInstance,
};
pub use limits::{
    asc_on_spectrum_diagnostic, asc_ratio_limit_diagnostic, deviation_trend_ok,
    ks_addition_residual, q_to_1_limit_table, LimitRow, OnSpectrumRow, RatioRow,
};
pub use series_ids::{
    heine_b0_residual, lemma2_residual, one_phi_one_shift_residual, series_inversion_residual,
};
