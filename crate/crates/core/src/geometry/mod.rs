//! Exact H-representation polyhedra over named rate variables.

pub mod compare;
pub mod cone;
pub mod fm;
pub mod lp;
pub mod matroid;
pub mod system;
pub mod var;

pub use compare::{region_equal, remove_redundant, RegionVerdict, Side};
pub use cone::{minkowski_sum_with_cone, restrict_to_embedding, ConeGenerators};
pub use fm::{fm_eliminate, FmOptions, Pruning};
pub use matroid::{contrapolymatroid_check, polymatroid_check, Verdict};
pub use system::{Inequality, InequalitySystem, LinearForm};
pub use var::{Var, VarKind};
