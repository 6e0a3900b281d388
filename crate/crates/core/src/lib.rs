//! Simulation library for CSIT sharing among cooperating transmitters.
//!
//! Two families of cooperation are covered:
//!
//! * MIMO interference channels, where transmitters align interference
//!   ([`ia`]) and the feedback needed by each transmitter can be restricted to a
//!   tightly-feasible sub-network ([`allocation`]).
//! * Single-antenna network MIMO on the one-dimensional Wyner model, where
//!   every transmitter holds its own quantized estimate of the network channel
//!   ([`csit`]) and builds its row of a zero-forcing or Active-Passive
//!   zero-forcing precoder from it ([`precoding`]).
//!
//! [`eval`] ties the pieces together into seeded Monte-Carlo experiments.
//!
//! All indices (users, transmitters, receivers) are zero-based.

pub mod allocation;
pub mod csit;
pub mod error;
pub mod eval;
pub mod ia;
pub mod linalg;
pub mod model;
pub mod precoding;
pub mod rng;

pub use error::{Error, Result};
pub use model::{AntennaConfig, ChannelRealization, CMatrix, Topology, C64};
