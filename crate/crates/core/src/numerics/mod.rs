//! Log-space special functions and scalar solvers.
//!
//! Everything here is pure after one-time lazy table initialization
//! (`OnceLock`-published, so concurrent first use is safe).

pub mod brent;
pub mod logspace;
pub mod polylog;
pub mod quad;
pub mod special;
pub mod stirling;

pub use brent::{brent_min, brent_root, DEFAULT_TOL};
pub use logspace::{log1mexp, lssum, lsum, LogValue, SignedLogValue};
pub use polylog::polylog_neg;
pub use quad::adaptive_quad;
pub use special::{
    chi2_cdf, debye1, gamma_cdf, inc_gamma_reg, inc_gamma_reg_upper, lchoose, lfactorial, lgamma,
    log_inc_gamma_reg_upper, norm_cdf, norm_quantile, poisson_log_cdf,
};
pub use stirling::{stirling1, stirling2, STIRLING_BOUND};
