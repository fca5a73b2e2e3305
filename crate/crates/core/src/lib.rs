//! Exact computation with left orderings of ℤⁿ and braid groups.

pub mod cohmaps;
pub mod convexity;
pub mod dynamics;
pub mod error;
pub mod exactreal;
pub mod groups;
pub mod json;
pub mod linalg;
pub mod orderings;
pub mod quasimorph;

pub use cohmaps::{PsiTildeValue, PsiValue, SikoraPoint};
pub use convexity::{ConvexityVerdict, ExponentMatrix};
pub use dynamics::{CircleSampleAction, EquivalenceVerdict, RealizationTable};
pub use error::{Error, Result};
pub use exactreal::{q_rank, RealConstant, Rational, Sign};
pub use groups::{braid_delta_sq, parse_element, BraidWord, Element, GroupRef, LatticeElement};
pub use json::{emit_ordering, parse_ordering};
pub use orderings::{Cone, Decision, DehornoyOrdering, Density, FlagOrdering};
pub use quasimorph::{RhoContext, StableValue};
