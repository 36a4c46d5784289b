//! Exact cone enumeration and the intelligence metrics built on it.
//!
//! Only tractable on small discrete systems: every reachable state of every
//! slice is visited.

mod cone;
mod empirical;
mod metrics;

pub use cone::{enumerate_cone, enumerate_cone_with_budget, SliceEntry, SliceRow, SliceTable, TabularPolicy, DEFAULT_BUDGET};
pub use empirical::{empirical_slices, total_variation, EmpiricalSlices};
pub use metrics::{
    decision_suboptimality, empirical_scan_suboptimality, global_suboptimality, intelligent_decision,
    iq, scan_score, scan_suboptimality, PolicyMetrics,
};
