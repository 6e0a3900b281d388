//! Interference alignment: feasibility by properness counting and precoder
//! design with full or incomplete CSIT.

pub mod feasibility;
pub mod incomplete;
pub mod solver;

pub use feasibility::{is_proper, is_proper_network, is_tightly_feasible, ConstraintSystem, SubIc};
pub use incomplete::{ia_solve_incomplete, tx_view, AlignmentPlan, IncompleteSolution};
pub use solver::{
    ia_solve, leakage, receive_filters, BlockSource, EstimateView, IaInit, IaOptions, IaSolution,
};
