//! Redundancy removal and region comparison by exact LP.

use alloc::string::String;
use alloc::vec::Vec;

use num_traits::Zero;

use super::lp::{self, LpOutcome};
use super::system::{vec_zero, Inequality, InequalitySystem};
use super::var::Var;
use crate::error::Result;
use crate::expr::{EntropyAssignment, EntropyExpr};
use crate::rational::{self, Rational};

/// Indices of an irredundant subsystem of `Ax <= b`, in input order, or
/// `None` when the system is infeasible. A row is dropped when the rows still
/// kept imply it up to `tol`.
pub fn irredundant_rows(a: &[Vec<Rational>], b: &[Rational], tol: &Rational) -> Option<Vec<usize>> {
    let n = a.first().map_or(0, Vec::len);
    lp::feasible_point(a, b, n)?;
    let mut keep: Vec<bool> = a.iter().map(|_| true).collect();
    for i in 0..a.len() {
        if a[i].iter().all(Zero::is_zero) {
            keep[i] = false;
            continue;
        }
        let idx: Vec<usize> = (0..a.len()).filter(|&k| k != i && keep[k]).collect();
        let sub_a: Vec<Vec<Rational>> = idx.iter().map(|&k| a[k].clone()).collect();
        let sub_b: Vec<Rational> = idx.iter().map(|&k| b[k].clone()).collect();
        if let LpOutcome::Optimal { value, .. } = lp::maximize(&sub_a, &sub_b, &a[i]) {
            if value <= &b[i] + tol {
                keep[i] = false;
            }
        }
    }
    Some((0..a.len()).filter(|&i| keep[i]).collect())
}

/// Binds every right-hand side to an exact rational.
pub fn bind_rows(
    system: &InequalitySystem,
    assignment: Option<&dyn EntropyAssignment>,
) -> Result<(Vec<Vec<Rational>>, Vec<Rational>)> {
    let a = system.rows().iter().map(|r| r.coeffs.clone()).collect();
    let mut b = Vec::with_capacity(system.len());
    for r in system.rows() {
        if r.rhs.is_constant() {
            b.push(r.rhs.constant_part().clone());
        } else {
            match assignment {
                Some(asg) => b.push(r.rhs.evaluate_rational(asg)?),
                None => crate::error::bail!(
                    MissingSymbol,
                    "row `{}` has a symbolic right-hand side and no assignment was given",
                    system.format_row(r)
                ),
            }
        }
    }
    Ok((a, b))
}

/// An irredundant subsystem defining the same set. Rows keep their symbolic
/// right-hand sides; the assignment (if any) only decides which rows stay.
/// An infeasible system collapses to the single row `0 <= -1`.
pub fn remove_redundant(
    system: &InequalitySystem,
    assignment: Option<&dyn EntropyAssignment>,
    tol: f64,
) -> Result<InequalitySystem> {
    let mut sys = system.clone();
    sys.tidy();
    let (a, b) = bind_rows(&sys, assignment)?;
    let tol = if tol > 0.0 { rational::from_f64(tol) } else { rational::zero() };
    let mut out = sys.clone();
    match irredundant_rows(&a, &b, &tol) {
        Some(keep) => {
            *out.rows_mut() = keep.into_iter().map(|i| sys.rows()[i].clone()).collect();
        }
        None => {
            *out.rows_mut() = alloc::vec![Inequality {
                coeffs: vec_zero(sys.vars().len()),
                rhs: EntropyExpr::constant(-rational::one()),
                note: String::from("infeasible"),
            }];
        }
    }
    Ok(out)
}

/// Which side of a comparison a witness belongs to.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Side {
    /// The witness lies in the first region but not the second.
    FirstOnly,
    SecondOnly,
}

#[derive(Clone, Debug, PartialEq)]
pub enum RegionVerdict {
    Equal,
    Unequal {
        side: Side,
        /// A point of one region, by variable.
        witness: Vec<(Var, Rational)>,
        /// The row of the other region it violates, rendered as text.
        violated: String,
    },
}

impl RegionVerdict {
    pub fn is_equal(&self) -> bool {
        matches!(self, RegionVerdict::Equal)
    }
}

/// Decides whether the two evaluated polyhedra coincide within `tol`.
///
/// Every row of each region is maximized over the other; a row whose maximum
/// exceeds its bound by more than `tol` (or is unbounded) yields a witness.
pub fn region_equal(
    first: &InequalitySystem,
    second: &InequalitySystem,
    assignment: Option<&dyn EntropyAssignment>,
    tol: f64,
) -> Result<RegionVerdict> {
    let mut vars: Vec<Var> = first.vars().to_vec();
    for v in second.vars() {
        if !vars.contains(v) {
            vars.push(*v);
        }
    }
    let a_sys = first.realign(&vars)?;
    let b_sys = second.realign(&vars)?;
    let tol = rational::from_f64(tol);
    if let Some(v) = contained(&b_sys, &a_sys, &vars, assignment, &tol, Side::SecondOnly)? {
        return Ok(v);
    }
    if let Some(v) = contained(&a_sys, &b_sys, &vars, assignment, &tol, Side::FirstOnly)? {
        return Ok(v);
    }
    Ok(RegionVerdict::Equal)
}

/// Checks `inner ⊆ outer`; returns a witness from `inner` otherwise.
fn contained(
    inner: &InequalitySystem,
    outer: &InequalitySystem,
    vars: &[Var],
    assignment: Option<&dyn EntropyAssignment>,
    tol: &Rational,
    side: Side,
) -> Result<Option<RegionVerdict>> {
    let (ia, ib) = bind_rows(inner, assignment)?;
    let (oa, ob) = bind_rows(outer, assignment)?;
    for (k, (row, bound)) in oa.iter().zip(&ob).enumerate() {
        let witness = match lp::maximize(&ia, &ib, row) {
            LpOutcome::Infeasible => return Ok(None),
            LpOutcome::Optimal { value, point } => {
                if value <= bound + tol {
                    continue;
                }
                point
            }
            LpOutcome::Unbounded { point, direction } => {
                // step far enough along the ray to break the row
                let slope = lp::dot(row, &direction);
                let gap = bound - lp::dot(row, &point) + rational::one();
                let t = if gap > rational::zero() { gap / slope } else { rational::zero() };
                point.iter().zip(&direction).map(|(p, d)| p + &t * d).collect()
            }
        };
        return Ok(Some(RegionVerdict::Unequal {
            side,
            witness: vars.iter().copied().zip(witness).collect(),
            violated: outer.format_row(&outer.rows()[k]),
        }));
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::Label;
    use crate::rational::{int, ratio};

    fn r1() -> Var {
        Var::Rate(Label::parse("1").unwrap())
    }

    fn sys(bounds: &[Rational]) -> InequalitySystem {
        let mut s = InequalitySystem::new([r1()]).unwrap();
        for b in bounds {
            s.push_le(&[(r1(), int(1))], EntropyExpr::constant(b.clone()), "").unwrap();
        }
        s.push_nonneg(r1()).unwrap();
        s
    }

    #[test]
    fn redundant_row_removed() {
        let s = sys(&[int(1), int(2)]);
        let out = remove_redundant(&s, None, 0.0).unwrap();
        assert_eq!(alloc::format!("{out}"), "R_1 <= 1\n-R_1 <= 0    [nonnegativity]\n");
    }

    #[test]
    fn duplicates_collapse() {
        let s = sys(&[int(1), int(1)]);
        assert_eq!(remove_redundant(&s, None, 0.0).unwrap().len(), 2);
    }

    #[test]
    fn equality_verdicts() {
        let a = sys(&[int(1)]);
        assert!(region_equal(&a, &a, None, 1e-9).unwrap().is_equal());
        assert!(region_equal(&a, &sys(&[int(1), int(2)]), None, 1e-9).unwrap().is_equal());
        match region_equal(&a, &sys(&[ratio(9, 10)]), None, 1e-9).unwrap() {
            RegionVerdict::Unequal { side, witness, .. } => {
                assert_eq!(side, Side::FirstOnly);
                assert_eq!(witness, [(r1(), int(1))]);
            }
            RegionVerdict::Equal => panic!("regions differ"),
        }
    }

    #[test]
    fn unbounded_witness() {
        let mut open = InequalitySystem::new([r1()]).unwrap();
        open.push_nonneg(r1()).unwrap();
        match region_equal(&sys(&[int(1)]), &open, None, 1e-9).unwrap() {
            RegionVerdict::Unequal { side, witness, .. } => {
                assert_eq!(side, Side::SecondOnly);
                assert!(witness[0].1 > int(1));
            }
            RegionVerdict::Equal => panic!("regions differ"),
        }
    }

    #[test]
    fn infeasible_collapses() {
        let mut s = sys(&[int(-1)]);
        s = remove_redundant(&s, None, 0.0).unwrap();
        assert_eq!(s.len(), 1);
        assert!(s.rows()[0].is_infeasible());
    }
}
