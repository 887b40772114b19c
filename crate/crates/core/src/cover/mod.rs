//! Weighted set cover for cylinder and Bowen-ball covers.

mod build;
mod exact;
mod greedy;
mod instance;
pub mod laminar;
mod window;

pub use build::{build_metric_instance, build_symbolic_instance, Caps, Itineraries};
pub use exact::{cardinality_cover, solve_exact, DEFAULT_NODE_BUDGET};
pub use greedy::{dual_lower_bound, solve_greedy};
pub use instance::{compensated_sum, Candidate, CoverInstance, CoverSolution, Provenance, REL_SLACK};
pub use window::{LengthWindow, Theta};
