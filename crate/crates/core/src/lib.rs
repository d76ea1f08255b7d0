//! Achievable-rate polyhedra for broadcast channels with groupcast message
//! sets, built and projected in exact rational arithmetic.
#![no_std]

extern crate alloc;

pub mod channels;
pub mod covering;
pub mod error;
pub mod expr;
pub mod geometry;
pub mod info;
pub mod order;
pub mod rational;
pub mod region;

pub use error::{Error, Result};
pub use expr::{EntropyAssignment, EntropyExpr, Symbol, SymSet};
pub use order::{Family, Label, LabelSet, LatticeFamily, Order, OrderKind};
pub use rational::Rational;
