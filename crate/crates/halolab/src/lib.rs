//! Computational laboratory for halo products over ℤ^d: exact arithmetic,
//! word metrics, Følner tilings, tiling-induced orbit-equivalence couplings,
//! cocycle lifts and isoperimetric profiles.

pub mod bignum;
pub mod cli;
pub mod coupling;
pub mod error;
pub mod field;
pub mod group;
pub mod halo;
pub mod lamp;
pub mod lift;
pub mod profile;
pub mod tiling;
pub mod word;

/// Schema tag written into every JSON output.
pub const SCHEMA: &str = "halolab/1";

pub use error::{HaloError, Result};
pub use field::{DenseMatrix, PrimeField};
pub use group::{FiniteGroup, Group, Zd};
pub use halo::{canonical_text, Family, GroupDescriptor, Halo, HaloElem, Lamp};
