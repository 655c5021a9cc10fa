//! Shared numerical machinery: bracketing solvers, golden-section
//! search, log-domain accumulation, normal special functions and
//! sample statistics.

pub mod logsum;
pub mod roots;
pub mod special;
pub mod stats;

pub use logsum::{logsumexp, CompensatedSum, StreamingLogSumExp};
pub use roots::{bisect, bracket_geometric, golden_max};
pub use stats::{hill_tail_fit, ks_statistic, moments, Moments, TailFit};
