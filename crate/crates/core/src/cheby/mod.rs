//! Chebyshev machinery: root grids, the cosine transform of sampled
//! functions, truncation, conversion to Taylor coefficients and evaluation of
//! operator functions on states.

mod operator;
mod series;
mod taylor;

pub(crate) use operator::apply_series_slices;
pub use operator::{
    apply_operator_series, apply_operator_series_multi, exp_series, scalar_func_series, FrozenOperator,
    DIVERGENCE_FACTOR, INITIAL_SAMPLES,
};
pub use series::{
    chebyshev_at_root, chebyshev_roots, chebyshev_values, samples_to_cheb, truncate, ChebyshevSeries, LocalTimeGrid,
    ZERO_SERIES,
};
pub(crate) use taylor::inverse_factorials;
pub use taylor::{cheb_to_taylor, eval_taylor, monomial_table, MAX_TAYLOR_ORDER};
