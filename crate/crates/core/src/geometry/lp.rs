//! Exact rational linear programming.
//!
//! Problems of the form `max cᵀx  s.t. Ax <= b` with `x` free are solved
//! through their duals `min bᵀy  s.t. Aᵀy = c, y >= 0`, which have one row per
//! variable. Rate systems have few variables and many rows, so the dual
//! tableau stays small. The simplex uses Bland's rule throughout, so it
//! terminates; the primal solution is read off the dual multipliers.

use alloc::vec::Vec;

use num_traits::{Signed, Zero};

use super::system::vec_zero;
use crate::rational::{self, Rational};

/// Result of [`maximize`].
#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Infeasible,
    /// Feasible `point` and a direction `d` with `A d <= 0`, `cᵀd > 0`.
    Unbounded { point: Vec<Rational>, direction: Vec<Rational> },
    Optimal { value: Rational, point: Vec<Rational> },
}

enum StdOutcome {
    /// `Mᵀπ <= 0` and `dᵀπ > 0`.
    Infeasible { farkas: Vec<Rational> },
    Unbounded,
    /// Optimal value and multipliers `π` with `Mᵀπ <= cost`, `dᵀπ = value`.
    Optimal { value: Rational, duals: Vec<Rational> },
}

/// Solves `min costᵀy  s.t.  M y = d, y >= 0` where `M` is given by columns.
fn solve_standard(cols: &[Vec<Rational>], d: &[Rational], cost: &[Rational]) -> StdOutcome {
    let r = d.len();
    let m = cols.len();
    let width = m + r + 1;
    let rhs = m + r;
    let sign: Vec<bool> = d.iter().map(|v| v.is_negative()).collect();
    let mut t: Vec<Vec<Rational>> = (0..r)
        .map(|i| {
            let mut row = vec_zero(width);
            for (j, col) in cols.iter().enumerate() {
                row[j] = if sign[i] { -col[i].clone() } else { col[i].clone() };
            }
            row[m + i] = rational::one();
            row[rhs] = d[i].abs();
            row
        })
        .collect();
    let mut basis: Vec<usize> = (m..m + r).collect();

    let phase1_cost: Vec<Rational> =
        (0..m + r).map(|j| if j < m { rational::zero() } else { rational::one() }).collect();
    run_simplex(&mut t, &mut basis, &phase1_cost, m);
    let value1: Rational = (0..r).map(|i| &phase1_cost[basis[i]] * &t[i][rhs]).sum();
    if value1.is_positive() {
        let farkas = multipliers(&t, &basis, &phase1_cost, m, &sign);
        return StdOutcome::Infeasible { farkas };
    }

    // drive zero-level artificials out of the basis where possible
    for i in 0..r {
        if basis[i] < m {
            continue;
        }
        if let Some(j) = (0..m).find(|&j| !t[i][j].is_zero()) {
            pivot(&mut t, &mut basis, i, j);
        }
    }

    let mut phase2_cost = vec_zero(m + r);
    phase2_cost[..m].clone_from_slice(cost);
    if !run_simplex(&mut t, &mut basis, &phase2_cost, m) {
        return StdOutcome::Unbounded;
    }
    let value: Rational = (0..r).map(|i| &phase2_cost[basis[i]] * &t[i][rhs]).sum();
    let duals = multipliers(&t, &basis, &phase2_cost, m, &sign);
    StdOutcome::Optimal { value, duals }
}

/// `π = c_Bᵀ B⁻¹`, mapped back through the row sign flips; `B⁻¹` sits in the
/// artificial columns.
fn multipliers(
    t: &[Vec<Rational>],
    basis: &[usize],
    cost: &[Rational],
    m: usize,
    sign: &[bool],
) -> Vec<Rational> {
    let r = basis.len();
    (0..r)
        .map(|k| {
            let mut v = rational::zero();
            for i in 0..r {
                let c = &cost[basis[i]];
                if !c.is_zero() {
                    v += c * &t[i][m + k];
                }
            }
            if sign[k] {
                -v
            } else {
                v
            }
        })
        .collect()
}

/// Bland's rule over the first `m` columns. Returns false when unbounded.
fn run_simplex(t: &mut [Vec<Rational>], basis: &mut [usize], cost: &[Rational], m: usize) -> bool {
    let r = basis.len();
    let rhs = t.first().map_or(0, |row| row.len() - 1);
    loop {
        let mut entering = None;
        for j in 0..m {
            if basis.contains(&j) {
                continue;
            }
            let mut red = cost[j].clone();
            for i in 0..r {
                let c = &cost[basis[i]];
                if !c.is_zero() && !t[i][j].is_zero() {
                    red -= c * &t[i][j];
                }
            }
            if red.is_negative() {
                entering = Some(j);
                break;
            }
        }
        let Some(q) = entering else {
            return true;
        };
        let mut leave: Option<(usize, Rational)> = None;
        for i in 0..r {
            if !t[i][q].is_positive() {
                continue;
            }
            let ratio = &t[i][rhs] / &t[i][q];
            let better = match &leave {
                None => true,
                Some((li, best)) => ratio < *best || (ratio == *best && basis[i] < basis[*li]),
            };
            if better {
                leave = Some((i, ratio));
            }
        }
        let Some((p, _)) = leave else {
            return false;
        };
        pivot(t, basis, p, q);
    }
}

fn pivot(t: &mut [Vec<Rational>], basis: &mut [usize], p: usize, q: usize) {
    let piv = t[p][q].clone();
    for v in t[p].iter_mut() {
        if !v.is_zero() {
            *v = &*v / &piv;
        }
    }
    let prow = t[p].clone();
    for (i, row) in t.iter_mut().enumerate() {
        if i == p || row[q].is_zero() {
            continue;
        }
        let f = row[q].clone();
        for (v, pv) in row.iter_mut().zip(&prow) {
            if !pv.is_zero() {
                *v -= &f * pv;
            }
        }
    }
    basis[p] = q;
}

fn columns_of_transpose(a: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    // the columns of Aᵀ are the rows of A
    a.to_vec()
}

/// A point of `{x : Ax <= b}` over `n` variables, if any.
pub fn feasible_point(a: &[Vec<Rational>], b: &[Rational], n: usize) -> Option<Vec<Rational>> {
    if a.is_empty() {
        return Some(vec_zero(n));
    }
    // max t  s.t.  Ax + t·1 <= b,  t <= 1; always feasible and bounded
    let mut rows: Vec<Vec<Rational>> = a
        .iter()
        .map(|row| {
            let mut v = row.clone();
            v.push(rational::one());
            v
        })
        .collect();
    let mut cap = vec_zero(n + 1);
    cap[n] = rational::one();
    rows.push(cap);
    let mut rhs = b.to_vec();
    rhs.push(rational::one());
    let mut c = vec_zero(n + 1);
    c[n] = rational::one();
    match solve_standard(&columns_of_transpose(&rows), &c, &rhs) {
        StdOutcome::Optimal { value, mut duals } => {
            if value.is_negative() {
                None
            } else {
                duals.truncate(n);
                Some(duals)
            }
        }
        // the auxiliary problem is feasible and bounded by construction
        _ => unreachable!("auxiliary feasibility problem must have an optimum"),
    }
}

/// `max cᵀx  s.t.  Ax <= b`, `x` free.
pub fn maximize(a: &[Vec<Rational>], b: &[Rational], c: &[Rational]) -> LpOutcome {
    let n = c.len();
    match solve_standard(&columns_of_transpose(a), c, b) {
        StdOutcome::Optimal { value, duals } => LpOutcome::Optimal { value, point: duals },
        StdOutcome::Unbounded => LpOutcome::Infeasible,
        StdOutcome::Infeasible { farkas } => match feasible_point(a, b, n) {
            Some(point) => LpOutcome::Unbounded { point, direction: farkas },
            None => LpOutcome::Infeasible,
        },
    }
}

pub fn dot(a: &[Rational], x: &[Rational]) -> Rational {
    a.iter().zip(x).filter(|(c, _)| !c.is_zero()).map(|(c, v)| c * v).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn m(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect()
    }

    fn v(xs: &[i64]) -> Vec<Rational> {
        xs.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn box_optimum() {
        // x <= 3, y <= 2, x + y <= 4, x,y >= 0: max x + 2y = 2 + 4 = 6 at (2,2)
        let a = m(&[&[1, 0], &[0, 1], &[1, 1], &[-1, 0], &[0, -1]]);
        let b = v(&[3, 2, 4, 0, 0]);
        match maximize(&a, &b, &v(&[1, 2])) {
            LpOutcome::Optimal { value, point } => {
                assert_eq!(value, int(6));
                assert_eq!(dot(&v(&[1, 2]), &point), int(6));
                for (row, bi) in a.iter().zip(&b) {
                    assert!(dot(row, &point) <= *bi);
                }
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unbounded_direction_certificate() {
        let a = m(&[&[-1, 0], &[0, -1], &[0, 1]]);
        let b = v(&[0, 0, 5]);
        match maximize(&a, &b, &v(&[1, 1])) {
            LpOutcome::Unbounded { point, direction } => {
                for (row, bi) in a.iter().zip(&b) {
                    assert!(dot(row, &point) <= *bi);
                    assert!(!dot(row, &direction).is_positive());
                }
                assert!(dot(&v(&[1, 1]), &direction).is_positive());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn infeasible_system() {
        let a = m(&[&[1], &[-1]]);
        let b = v(&[1, -2]);
        assert_eq!(maximize(&a, &b, &v(&[1])), LpOutcome::Infeasible);
        assert!(feasible_point(&a, &b, 1).is_none());
    }

    #[test]
    fn degenerate_dependent_columns() {
        // x + y <= 1 with x,y >= 0 and a duplicated row
        let a = m(&[&[1, 1], &[1, 1], &[-1, 0], &[0, -1]]);
        let b = v(&[1, 1, 0, 0]);
        match maximize(&a, &b, &v(&[1, 1])) {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, int(1)),
            other => panic!("{other:?}"),
        }
        // objective orthogonal to a free direction: max x over {x + y <= 1, -x - y <= 0, x <= 3}
        let a = m(&[&[1, 1], &[-1, -1], &[1, 0]]);
        let b = v(&[1, 0, 3]);
        match maximize(&a, &b, &v(&[1, 1])) {
            LpOutcome::Optimal { value, point } => {
                assert_eq!(value, int(1));
                for (row, bi) in a.iter().zip(&b) {
                    assert!(dot(row, &point) <= *bi);
                }
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn no_constraints() {
        assert!(matches!(maximize(&[], &[], &v(&[0, 0])), LpOutcome::Optimal { .. }));
        assert!(matches!(maximize(&[], &[], &v(&[1, 0])), LpOutcome::Unbounded { .. }));
        assert_eq!(feasible_point(&[], &[], 2), Some(v(&[0, 0])));
    }

    #[test]
    fn feasible_point_is_feasible() {
        let a = m(&[&[1, 1], &[-1, 0], &[0, -1], &[-1, -1]]);
        let b = v(&[2, 0, 0, -2]);
        let p = feasible_point(&a, &b, 2).unwrap();
        for (row, bi) in a.iter().zip(&b) {
            assert!(dot(row, &p) <= *bi);
        }
    }
}
