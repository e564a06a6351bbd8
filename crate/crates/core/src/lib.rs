//! Exact triply graded Khovanov–Rozansky homology of `(m, n)` torus knots.
//!
//! Two independent evaluators produce the same series:
//!
//! * [`formula`] sums a closed expression over `(m, n)` Dyck paths, using the
//!   path statistics from [`dyck`];
//! * [`sweep`] runs the coloring recursion, branching at every lattice point
//!   strictly inside an interval.
//!
//! [`verify`] cross-checks them and evaluates the counting identities that
//! relate the statistics. Values live in [`laurent`].

pub mod dyck;
pub mod error;
pub mod formula;
pub mod laurent;
pub mod sweep;
pub mod verify;

pub use dyck::{enumerate_paths, DyckPath, KnotParams, PathStats, Point, Step};
pub use error::{KhrError, Result};
pub use laurent::{ExponentTriple, Invariant, LaurentPoly, MonomialRatio};
pub use sweep::{HhhProfile, IProfile, WeightProfile};
