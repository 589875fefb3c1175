//! Exact computations around Borsuk–Ulam and Bourgin–Yang bounds for the
//! cyclic groups `Z/p^{k+1}`.
//!
//! * [`group_rep`]: groups, representations, valuation profiles and `δ(V)`.
//! * [`cyclic_ring`]: `Z[z]/(z^N − 1)` and membership in `((1 − z)^n)` via
//!   a Smith normal form ([`smith`]).
//! * [`euler`]: Euler classes, the nonvanishing oracle and threshold scans.
//! * [`constructions`]: certificates for equivariant sphere maps.
//! * [`bounds`]: zero-set bounds and comparisons.
//! * [`cli`]: the `equibound` command line.

pub mod bounds;
pub mod cli;
pub mod constructions;
pub mod cyclic_ring;
pub mod error;
pub mod euler;
pub mod group_rep;
pub mod smith;

pub use cyclic_ring::{CyclicPoly, Locality, QuotientCtx};
pub use error::{Error, Result};
pub use group_rep::{GroupSpec, RepSpec};
