//! Fourier–Motzkin elimination over symbolic right-hand sides.
//!
//! Equalities (a row together with its exact negation) are used first to
//! substitute variables away. The remaining variables are eliminated by
//! pairing rows of opposite sign; every derived row remembers which input
//! rows it combines, and a row whose history strictly contains another
//! row's history is dropped (it is a non-extreme combination, hence implied).
//! When every right-hand side is a number, exact LP redundancy removal runs
//! after each step instead.

use alloc::vec::Vec;

use num_traits::{Signed, Zero};

use super::compare::irredundant_rows;
use super::system::{Inequality, InequalitySystem, LinearForm};
use super::var::Var;
use crate::error::{bail, Result};
use crate::rational::{self, Rational};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum Pruning {
    /// Only exact duplicates are removed.
    None,
    /// Duplicates plus history-based (Chernikov–Kohler) pruning.
    #[default]
    Syntactic,
    /// Syntactic pruning, plus exact LP redundancy removal after every step
    /// when the right-hand sides are constants.
    Exact,
}

#[derive(Clone, Copy, Debug)]
pub struct FmOptions {
    pub pruning: Pruning,
    /// Abort with a resource error when a step would produce more rows.
    pub row_cap: usize,
}

impl Default for FmOptions {
    fn default() -> Self {
        FmOptions { pruning: Pruning::Syntactic, row_cap: 1 << 20 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct History(Vec<u64>);

impl History {
    fn single(i: usize, words: usize) -> History {
        let mut v = Vec::with_capacity(words);
        v.resize(words, 0);
        v[i / 64] |= 1 << (i % 64);
        History(v)
    }

    fn union(&self, o: &History) -> History {
        History(self.0.iter().zip(&o.0).map(|(a, b)| a | b).collect())
    }

    fn is_subset(&self, o: &History) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a & !b == 0)
    }
}

struct Tracked {
    row: Inequality,
    hist: History,
}

/// Projects `system` onto the variables not listed in `eliminate`.
///
/// Variables that are not declared are ignored. The result keeps rows of the
/// form `0 <= e` when `e` is symbolic; `0 <= c` with a negative constant
/// marks an infeasible system.
pub fn fm_eliminate(
    system: &InequalitySystem,
    eliminate: &[Var],
    opts: &FmOptions,
) -> Result<InequalitySystem> {
    let mut sys = system.clone();
    sys.tidy();
    let mut pending: Vec<Var> = Vec::new();
    for v in eliminate {
        if sys.index_of(*v).is_some() && !pending.contains(v) {
            pending.push(*v);
        }
    }
    substitute_equalities(&mut sys, &mut pending)?;

    let exact = opts.pruning == Pruning::Exact && sys.constant_rhs().is_some();
    let mut tracked = start_histories(&sys);
    if exact {
        tracked = prune_exact(&sys, tracked);
    }

    while !pending.is_empty() {
        let vars = sys.vars().to_vec();
        let (pos, var) = choose_variable(&vars, &tracked, &pending);
        pending.remove(pos);
        let col = vars.iter().position(|w| *w == var).expect("pending variable is declared");

        let mut plus = Vec::new();
        let mut minus = Vec::new();
        let mut next: Vec<Tracked> = Vec::new();
        for t in tracked {
            let c = &t.row.coeffs[col];
            if c.is_positive() {
                plus.push(t);
            } else if c.is_negative() {
                minus.push(t);
            } else {
                next.push(t);
            }
        }
        if next.len() + plus.len() * minus.len() > opts.row_cap {
            bail!(
                Resource,
                "eliminating {var} would produce {} rows (cap {})",
                next.len() + plus.len() * minus.len(),
                opts.row_cap
            );
        }
        for p in &plus {
            for m in &minus {
                let hist = p.hist.union(&m.hist);
                let a = p.row.coeffs[col].clone();
                let b = -m.row.coeffs[col].clone();
                let coeffs: Vec<Rational> =
                    p.row.coeffs.iter().zip(&m.row.coeffs).map(|(x, y)| &b * x + &a * y).collect();
                let mut rhs = p.row.rhs.scaled(&b);
                rhs.add_scaled(&m.row.rhs, &a);
                let mut row = Inequality { coeffs, rhs, note: combined_note(&p.row.note, &m.row.note) };
                row.coeffs[col] = rational::zero();
                row.normalize();
                next.push(Tracked { row, hist });
            }
        }
        tracked = dedup(next);
        if opts.pruning != Pruning::None {
            tracked = prune_histories(tracked);
        }
        sys = rebuild(&sys, &tracked);
        sys.remove_var(col);
        for t in &mut tracked {
            t.row.coeffs.remove(col);
        }
        if exact {
            sys = rebuild(&sys, &tracked);
            tracked = prune_exact(&sys, tracked);
        }
    }

    let mut out = rebuild(&sys, &tracked);
    out.tidy();
    if out.rows().iter().any(Inequality::is_infeasible) {
        let n = out.vars().len();
        let vars = out.vars().to_vec();
        let mut e = InequalitySystem::new(vars)?;
        e.push_row(Inequality {
            coeffs: super::system::vec_zero(n),
            rhs: crate::expr::EntropyExpr::constant(-rational::one()),
            note: alloc::string::String::from("infeasible"),
        })?;
        return Ok(e);
    }
    Ok(out)
}

fn combined_note(a: &str, b: &str) -> alloc::string::String {
    let mut parts: Vec<&str> = Vec::new();
    for p in a.split(" + ").chain(b.split(" + ")) {
        if !p.is_empty() && p != "nonnegativity" && !parts.contains(&p) {
            parts.push(p);
        }
    }
    if parts.is_empty() {
        return alloc::string::String::from(if a.is_empty() && b.is_empty() { "" } else { "nonnegativity" });
    }
    parts.join(" + ")
}

fn start_histories(sys: &InequalitySystem) -> Vec<Tracked> {
    let words = sys.len().div_ceil(64).max(1);
    sys.rows()
        .iter()
        .enumerate()
        .map(|(i, r)| Tracked { row: r.clone(), hist: History::single(i, words) })
        .collect()
}

fn rebuild(sys: &InequalitySystem, tracked: &[Tracked]) -> InequalitySystem {
    let mut out = sys.clone();
    *out.rows_mut() = tracked.iter().map(|t| t.row.clone()).collect();
    out
}

fn dedup(rows: Vec<Tracked>) -> Vec<Tracked> {
    let mut kept: Vec<Tracked> = Vec::with_capacity(rows.len());
    for t in rows {
        match kept.iter_mut().find(|k| k.row.same_constraint(&t.row)) {
            Some(k) => {
                // keep the lineage that is easier to dominate
                if t.hist.is_subset(&k.hist) {
                    k.hist = t.hist;
                }
            }
            None => kept.push(t),
        }
    }
    kept
}

fn prune_histories(rows: Vec<Tracked>) -> Vec<Tracked> {
    let keep: Vec<bool> = rows
        .iter()
        .map(|t| {
            !rows.iter().any(|o| o.hist != t.hist && o.hist.is_subset(&t.hist))
        })
        .collect();
    rows.into_iter().zip(keep).filter_map(|(t, k)| k.then_some(t)).collect()
}

fn prune_exact(sys: &InequalitySystem, tracked: Vec<Tracked>) -> Vec<Tracked> {
    let a: Vec<Vec<Rational>> = tracked.iter().map(|t| t.row.coeffs.clone()).collect();
    let b: Vec<Rational> = tracked.iter().map(|t| t.row.rhs.constant_part().clone()).collect();
    let rows: Vec<Inequality> = match irredundant_rows(&a, &b, &rational::zero()) {
        Some(keep) => keep.into_iter().map(|i| tracked[i].row.clone()).collect(),
        None => {
            let mut row = tracked
                .first()
                .map(|t| t.row.clone())
                .unwrap_or_else(|| Inequality {
                    coeffs: super::system::vec_zero(sys.vars().len()),
                    rhs: crate::expr::EntropyExpr::zero(),
                    note: alloc::string::String::new(),
                });
            row.coeffs.iter_mut().for_each(|c| *c = rational::zero());
            row.rhs = crate::expr::EntropyExpr::constant(-rational::one());
            row.note = alloc::string::String::from("infeasible");
            alloc::vec![row]
        }
    };
    let words = rows.len().div_ceil(64).max(1);
    rows.into_iter()
        .enumerate()
        .map(|(i, row)| Tracked { row, hist: History::single(i, words) })
        .collect()
}

/// Smallest net growth `p·n − p − n`, then fewest rows touched, then the
/// canonical variable order.
fn choose_variable(vars: &[Var], rows: &[Tracked], pending: &[Var]) -> (usize, Var) {
    let mut best: Option<(i64, usize, Var, usize)> = None;
    for (k, v) in pending.iter().enumerate() {
        let col = vars.iter().position(|w| w == v).expect("declared");
        let p = rows.iter().filter(|t| t.row.coeffs[col].is_positive()).count() as i64;
        let n = rows.iter().filter(|t| t.row.coeffs[col].is_negative()).count() as i64;
        let growth = p * n - p - n;
        let touched = (p + n) as usize;
        let cand = (growth, touched, *v, k);
        let better = match &best {
            None => true,
            Some(b) => (cand.0, cand.1, cand.2) < (b.0, b.1, b.2),
        };
        if better {
            best = Some(cand);
        }
    }
    let (_, _, v, k) = best.expect("pending is nonempty");
    (k, v)
}

/// Uses every equality that involves a pending variable to substitute one
/// such variable away.
fn substitute_equalities(sys: &mut InequalitySystem, pending: &mut Vec<Var>) -> Result<()> {
    loop {
        let mut found = None;
        'search: for (i, r) in sys.rows().iter().enumerate() {
            let Some(col) = pick_pending_col(sys, r, pending) else {
                continue;
            };
            for (j, s) in sys.rows().iter().enumerate().skip(i + 1) {
                if r.is_negation_of(s) {
                    found = Some((i, j, col));
                    break 'search;
                }
            }
        }
        let Some((i, j, col)) = found else {
            return Ok(());
        };
        let row = sys.rows()[i].clone();
        let v = sys.vars()[col];
        let a = row.coeffs[col].clone();
        // v = (rhs - Σ_{w≠v} c_w w) / a
        let inv = rational::one() / &a;
        let terms: Vec<(Var, Rational)> = sys
            .vars()
            .iter()
            .zip(&row.coeffs)
            .enumerate()
            .filter(|(k, (_, c))| *k != col && !c.is_zero())
            .map(|(_, (w, c))| (*w, -(c * &inv)))
            .collect();
        let form = LinearForm { terms, offset: row.rhs.scaled(&inv) };
        sys.rows_mut().remove(j);
        sys.rows_mut().remove(i);
        sys.substitute(v, &form)?;
        pending.retain(|w| *w != v);
        sys.tidy();
    }
}

fn pick_pending_col(sys: &InequalitySystem, r: &Inequality, pending: &[Var]) -> Option<usize> {
    // the first pending variable (in declaration order) with a nonzero coefficient
    sys.vars()
        .iter()
        .enumerate()
        .filter(|(k, v)| pending.contains(v) && !r.coeffs[*k].is_zero())
        .map(|(k, _)| k)
        .next()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::EntropyExpr;
    use crate::order::Label;
    use crate::rational::int;

    fn r(s: &str) -> Var {
        Var::Rate(Label::parse(s).unwrap())
    }

    fn c(v: i64) -> EntropyExpr {
        EntropyExpr::constant(int(v))
    }

    #[test]
    fn single_pairing() {
        // {y <= 3, x - y <= 1, -y <= 0} eliminate y -> {x <= 4}
        let (x, y) = (r("1"), r("2"));
        let mut s = InequalitySystem::new([x, y]).unwrap();
        s.push_le(&[(y, int(1))], c(3), "").unwrap();
        s.push_le(&[(x, int(1)), (y, int(-1))], c(1), "").unwrap();
        s.push_le(&[(y, int(-1))], c(0), "").unwrap();
        for pruning in [Pruning::None, Pruning::Syntactic, Pruning::Exact] {
            let out = fm_eliminate(&s, &[y], &FmOptions { pruning, ..Default::default() }).unwrap();
            assert_eq!(out.vars(), &[x]);
            assert_eq!(out.len(), 1, "{out}");
            assert_eq!(out.format_row(&out.rows()[0]), "R_1 <= 4");
        }
    }

    #[test]
    fn absent_variable_is_noop() {
        let mut s = InequalitySystem::new([r("1")]).unwrap();
        s.push_le(&[(r("1"), int(1))], c(2), "").unwrap();
        let out = fm_eliminate(&s, &[r("2")], &FmOptions::default()).unwrap();
        assert_eq!(out, s);
    }

    #[test]
    fn equality_substitution() {
        // R1 = a + b, a <= 2, b <= 3, a,b >= 0 -> 0 <= R1 <= 5
        let (r1, a, b) = (r("1"), Var::Split(Label::parse("1").unwrap(), Label::parse("1").unwrap()), Var::Split(Label::parse("1").unwrap(), Label::parse("12").unwrap()));
        let mut s = InequalitySystem::new([r1, a, b]).unwrap();
        s.push_eq(&[(r1, int(1)), (a, int(-1)), (b, int(-1))], c(0), "").unwrap();
        s.push_le(&[(a, int(1))], c(2), "").unwrap();
        s.push_le(&[(b, int(1))], c(3), "").unwrap();
        s.push_nonneg(a).unwrap();
        s.push_nonneg(b).unwrap();
        let out = fm_eliminate(&s, &[a, b], &FmOptions::default()).unwrap();
        let text = alloc::format!("{out}");
        assert!(text.contains("R_1 <= 5"), "{text}");
        assert!(text.contains("-R_1 <= 0"), "{text}");
        assert_eq!(out.len(), 2, "{text}");
    }

    #[test]
    fn infeasibility_surfaces() {
        let (x, y) = (r("1"), r("2"));
        let mut s = InequalitySystem::new([x, y]).unwrap();
        s.push_le(&[(y, int(1))], c(1), "").unwrap();
        s.push_le(&[(y, int(-1))], c(-2), "").unwrap();
        let out = fm_eliminate(&s, &[y], &FmOptions::default()).unwrap();
        assert!(out.rows().iter().any(Inequality::is_infeasible));
    }
}
