//! Polymatroid and contra-polymatroid checks on lattice families.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{bail, Result};
use crate::order::{LabelSet, LatticeFamily};

/// Outcome of a set-function check; `violations` is empty on success.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Verdict {
    pub violations: Vec<String>,
}

impl Verdict {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

fn values(lattice: &LatticeFamily, f: &dyn Fn(LabelSet) -> Option<f64>) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(lattice.len());
    for &m in &lattice.members {
        match f(m) {
            Some(v) => out.push(v),
            None => bail!(MissingValue, "no value for lattice member {:#x}", m.bits()),
        }
    }
    if !lattice.contains(LabelSet::EMPTY) {
        bail!(MissingValue, "lattice has no empty member");
    }
    Ok(out)
}

/// `f(∅) = 0`, monotone, submodular over the lattice members.
pub fn polymatroid_check(
    lattice: &LatticeFamily,
    f: &dyn Fn(LabelSet) -> Option<f64>,
    tol: f64,
) -> Result<Verdict> {
    check(lattice, f, tol, false)
}

/// `γ(∅) = 0`, non-decreasing, supermodular over the lattice members.
pub fn contrapolymatroid_check(
    lattice: &LatticeFamily,
    gamma: &dyn Fn(LabelSet) -> Option<f64>,
    tol: f64,
) -> Result<Verdict> {
    check(lattice, gamma, tol, true)
}

fn check(
    lattice: &LatticeFamily,
    f: &dyn Fn(LabelSet) -> Option<f64>,
    tol: f64,
    contra: bool,
) -> Result<Verdict> {
    let vals = values(lattice, f)?;
    let ms = &lattice.members;
    let at = |s: LabelSet| -> Option<f64> { ms.iter().position(|&m| m == s).map(|i| vals[i]) };
    let mut v = Verdict::default();
    let empty = at(LabelSet::EMPTY).unwrap_or(0.0);
    if libm::fabs(empty) > tol {
        v.violations.push(format!("normalization: value at the empty set is {empty}"));
    }
    for (i, &a) in ms.iter().enumerate() {
        for (j, &b) in ms.iter().enumerate() {
            if i != j && a.is_subset(b) && vals[i] > vals[j] + tol {
                v.violations.push(format!("monotonicity: f({:#x}) = {} > f({:#x}) = {}", a.bits(), vals[i], b.bits(), vals[j]));
            }
            if j <= i {
                continue;
            }
            let (Some(u), Some(n)) = (at(a.union(b)), at(a.intersection(b))) else {
                v.violations.push(format!("lattice not closed for {:#x}, {:#x}", a.bits(), b.bits()));
                continue;
            };
            let lhs = u + n;
            let rhs = vals[i] + vals[j];
            let bad = if contra { lhs < rhs - tol } else { lhs > rhs + tol };
            if bad {
                let name = if contra { "supermodularity" } else { "submodularity" };
                v.violations.push(format!(
                    "{name}: {:#x}, {:#x}: f(union) + f(meet) = {lhs}, f(a) + f(b) = {rhs}",
                    a.bits(),
                    b.bits()
                ));
            }
        }
    }
    Ok(v)
}
