//! Linear feasibility and optimization engine plus the convex-geometry
//! tasks built on it: distinguishing measurements, capacity certificates,
//! tight effects and relative-interior tests.

mod simplex;
mod tasks;

pub use simplex::{solve, LpProblem, LpResult, LpStatus, Relation};
pub use tasks::{
    capacity, find_distinguishing_measurement, find_tight_effect, is_completely_mixed,
    CapacityCertificate, Distinguishing,
};
