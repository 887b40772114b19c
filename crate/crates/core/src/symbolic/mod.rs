//! Shift spaces, symbolic map sequences and cylinder-cover strings.

mod map;
mod point;
mod system;
mod target;

pub use map::{BlockCode, MapSpec, DEFAULT_TABLE_CAP};
pub use point::{Alphabet, Symbol, TailedPoint};
pub use system::{CoverString, CylinderConstraint, Relabeling, SymbolicNDS, DEFAULT_COMPOSITION_CAP};
pub use target::TargetSet;
