//! Core entropy of polynomials described by critical portraits.
//!
//! * [`angle`]: exact rational angles and the map `θ ↦ dθ mod 1`.
//! * [`portrait`]: critical portraits, primitive majors, separation, metrics.
//! * [`entropy`]: Thurston's algorithm on rational portraits.
//! * [`wedge`]: labeled wedges, truncated wedge graphs and growth rates.
//! * [`scan`]: parameter slices and continuity probes.
//! * [`cli`]: the `core-entropy` command line.

pub mod angle;
pub mod cli;
pub mod entropy;
pub mod linalg;
pub mod portrait;
pub mod scan;
pub mod wedge;

pub use angle::{cyclic_order, orbit, tau, Angle, OrbitSummary};
pub use entropy::{core_entropy, transition_matrix, FiniteEntropy};
pub use portrait::{
    hausdorff_distance, major_metric_md, met_pseudometric, separation_vector, validate_portrait,
    CriticalPortrait, Leaf, PortraitError, PrimitiveMajor, SeparationVector,
};
