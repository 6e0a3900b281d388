//! CSIT allocation policies.

pub mod subic;
pub mod wyner;

pub use subic::{
    allocation_from_plan, smallest_tf_subic, smallest_tf_subic_in, superfeasible_heuristic_allocation,
    tightly_feasible_allocation, IaAllocation,
};
pub use wyner::{
    clustered_allocation, conventional_allocation, distance_based_allocation, distance_based_bits,
    uniform_allocation,
};
