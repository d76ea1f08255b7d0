use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::var::Var;
use crate::error::{bail, Result};
use crate::expr::{EntropyAssignment, EntropyExpr};
use crate::rational::{self, Rational};

/// One row `⟨coeffs, x⟩ <= rhs`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Inequality {
    /// Dense coefficients aligned with the owning system's variables.
    pub coeffs: Vec<Rational>,
    pub rhs: EntropyExpr,
    pub note: String,
}

impl Inequality {
    pub fn is_zero_lhs(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// `0 <= c` with `c >= 0` a constant.
    pub fn is_trivially_true(&self) -> bool {
        self.is_zero_lhs() && self.rhs.is_constant() && !self.rhs.constant_part().is_negative()
    }

    /// `0 <= c` with `c < 0` a constant.
    pub fn is_infeasible(&self) -> bool {
        self.is_zero_lhs() && self.rhs.is_constant() && self.rhs.constant_part().is_negative()
    }

    /// Scales by a positive factor so the coefficients are coprime integers.
    pub fn normalize(&mut self) {
        if self.is_zero_lhs() {
            if self.rhs.is_constant() {
                let c = self.rhs.constant_part();
                let unit = if c.is_zero() {
                    rational::zero()
                } else if c.is_negative() {
                    -rational::one()
                } else {
                    rational::one()
                };
                self.rhs = EntropyExpr::constant(unit);
            }
            return;
        }
        let mut lcm = BigInt::one();
        for c in &self.coeffs {
            if !c.is_zero() {
                lcm = lcm.lcm(c.denom());
            }
        }
        let mut gcd = BigInt::zero();
        for c in &self.coeffs {
            if !c.is_zero() {
                let v = c.numer() * (&lcm / c.denom());
                gcd = gcd.gcd(&v);
            }
        }
        let factor = Rational::new(lcm, gcd.abs());
        if factor.is_one() {
            return;
        }
        for c in &mut self.coeffs {
            *c = &*c * &factor;
        }
        self.rhs = self.rhs.scaled(&factor);
    }

    /// Same row with every coefficient and the right-hand side negated.
    pub fn is_negation_of(&self, other: &Inequality) -> bool {
        self.coeffs.len() == other.coeffs.len()
            && !self.is_zero_lhs()
            && self.coeffs.iter().zip(&other.coeffs).all(|(a, b)| (a + b).is_zero())
            && self.rhs.plus(&other.rhs).is_zero()
    }

    pub fn same_constraint(&self, other: &Inequality) -> bool {
        self.coeffs == other.coeffs && self.rhs == other.rhs
    }
}

/// An H-representation polyhedron over named variables with symbolic
/// right-hand sides.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct InequalitySystem {
    vars: Vec<Var>,
    rows: Vec<Inequality>,
}

/// A linear form `Σ c_i v_i + e` used for substitutions.
#[derive(Clone, Debug, Default)]
pub struct LinearForm {
    pub terms: Vec<(Var, Rational)>,
    pub offset: EntropyExpr,
}

impl InequalitySystem {
    pub fn new(vars: impl IntoIterator<Item = Var>) -> Result<InequalitySystem> {
        let mut s = InequalitySystem::default();
        for v in vars {
            if s.vars.contains(&v) {
                bail!(Domain, "variable {v} declared twice");
            }
            s.vars.push(v);
        }
        Ok(s)
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn rows(&self) -> &[Inequality] {
        &self.rows
    }

    pub fn rows_mut(&mut self) -> &mut Vec<Inequality> {
        &mut self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn index_of(&self, v: Var) -> Option<usize> {
        self.vars.iter().position(|&w| w == v)
    }

    /// Declares `v` if absent and returns its column.
    pub fn ensure_var(&mut self, v: Var) -> usize {
        if let Some(i) = self.index_of(v) {
            return i;
        }
        self.vars.push(v);
        for r in &mut self.rows {
            r.coeffs.push(rational::zero());
        }
        self.vars.len() - 1
    }

    fn dense(&self, terms: &[(Var, Rational)]) -> Result<Vec<Rational>> {
        let mut coeffs = vec_zero(self.vars.len());
        for (v, c) in terms {
            match self.index_of(*v) {
                Some(i) => coeffs[i] += c,
                None => bail!(Domain, "row references undeclared variable {v}"),
            }
        }
        Ok(coeffs)
    }

    /// Appends `Σ terms <= rhs`.
    pub fn push_le(&mut self, terms: &[(Var, Rational)], rhs: EntropyExpr, note: &str) -> Result<()> {
        let coeffs = self.dense(terms)?;
        self.rows.push(Inequality { coeffs, rhs, note: String::from(note) });
        Ok(())
    }

    /// Appends `Σ terms >= rhs`, stored negated.
    pub fn push_ge(&mut self, terms: &[(Var, Rational)], rhs: EntropyExpr, note: &str) -> Result<()> {
        let neg: Vec<(Var, Rational)> = terms.iter().map(|(v, c)| (*v, -c.clone())).collect();
        self.push_le(&neg, rhs.negated(), note)
    }

    /// Appends `Σ terms = rhs` as a pair of opposite rows.
    pub fn push_eq(&mut self, terms: &[(Var, Rational)], rhs: EntropyExpr, note: &str) -> Result<()> {
        self.push_le(terms, rhs.clone(), note)?;
        self.push_ge(terms, rhs, note)
    }

    /// `v >= 0`.
    pub fn push_nonneg(&mut self, v: Var) -> Result<()> {
        self.push_ge(&[(v, rational::one())], EntropyExpr::zero(), "nonnegativity")
    }

    pub fn push_row(&mut self, row: Inequality) -> Result<()> {
        if row.coeffs.len() != self.vars.len() {
            bail!(Shape, "row has {} coefficients, system has {} variables", row.coeffs.len(), self.vars.len());
        }
        self.rows.push(row);
        Ok(())
    }

    /// Whether the row is exactly `-v <= 0` for some variable `v`.
    pub fn nonneg_var(&self, row: &Inequality) -> Option<usize> {
        if !row.rhs.is_zero() {
            return None;
        }
        let mut hit = None;
        for (i, c) in row.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if hit.is_some() || !c.is_negative() {
                return None;
            }
            hit = Some(i);
        }
        hit
    }

    /// Rows with their coefficients looked up by variable.
    pub fn coeff(&self, row: usize, v: Var) -> Rational {
        match self.index_of(v) {
            Some(i) => self.rows[row].coeffs[i].clone(),
            None => rational::zero(),
        }
    }

    /// Substitutes `v := form` and removes `v`.
    pub fn substitute(&mut self, v: Var, form: &LinearForm) -> Result<()> {
        let Some(col) = self.index_of(v) else {
            return Ok(());
        };
        for (w, _) in &form.terms {
            if *w == v {
                bail!(Domain, "substitution for {v} refers to itself");
            }
            self.ensure_var(*w);
        }
        let cols: Vec<(usize, Rational)> =
            form.terms.iter().map(|(w, c)| (self.index_of(*w).unwrap(), c.clone())).collect();
        for r in &mut self.rows {
            let a = core::mem::replace(&mut r.coeffs[col], rational::zero());
            if a.is_zero() {
                continue;
            }
            for (j, c) in &cols {
                r.coeffs[*j] += &a * c;
            }
            r.rhs.add_scaled(&form.offset, &-a);
        }
        self.remove_var(col);
        Ok(())
    }

    /// Drops the column; callers make sure it is zero in every row.
    pub(crate) fn remove_var(&mut self, col: usize) {
        self.vars.remove(col);
        for r in &mut self.rows {
            r.coeffs.remove(col);
        }
    }

    /// Removes every variable whose column is identically zero.
    pub fn drop_unused_vars(&mut self) {
        let mut col = self.vars.len();
        while col > 0 {
            col -= 1;
            if self.rows.iter().all(|r| r.coeffs[col].is_zero()) {
                self.remove_var(col);
            }
        }
    }

    /// Reorders/extends the columns to exactly `vars`; fails if a dropped
    /// variable carries a nonzero coefficient.
    pub fn realign(&self, vars: &[Var]) -> Result<InequalitySystem> {
        let mut out = InequalitySystem::new(vars.iter().copied())?;
        for (i, v) in self.vars.iter().enumerate() {
            if !vars.contains(v) && self.rows.iter().any(|r| !r.coeffs[i].is_zero()) {
                bail!(Domain, "variable {v} is used but not retained");
            }
        }
        for r in &self.rows {
            let mut coeffs = vec_zero(vars.len());
            for (i, v) in self.vars.iter().enumerate() {
                if let Some(j) = vars.iter().position(|w| w == v) {
                    coeffs[j] = r.coeffs[i].clone();
                }
            }
            out.rows.push(Inequality { coeffs, rhs: r.rhs.clone(), note: r.note.clone() });
        }
        Ok(out)
    }

    /// Conjunction of both systems over the union of their variables.
    pub fn intersect(&self, other: &InequalitySystem) -> InequalitySystem {
        let mut vars = self.vars.clone();
        for v in &other.vars {
            if !vars.contains(v) {
                vars.push(*v);
            }
        }
        let mut out = self.realign(&vars).expect("superset of variables");
        let b = other.realign(&vars).expect("superset of variables");
        out.rows.extend(b.rows);
        out
    }

    /// Same rows with every variable renamed by `f`.
    pub fn rename(&self, f: impl Fn(Var) -> Var) -> Result<InequalitySystem> {
        let mut out = InequalitySystem::new(self.vars.iter().map(|&v| f(v)))?;
        out.rows = self.rows.clone();
        Ok(out)
    }

    /// Replaces every right-hand side by its exact value under `a`.
    pub fn bind(&self, a: &dyn EntropyAssignment) -> Result<InequalitySystem> {
        let mut out = self.clone();
        for r in &mut out.rows {
            r.rhs = EntropyExpr::constant(r.rhs.evaluate_rational(a)?);
        }
        Ok(out)
    }

    /// Right-hand sides when every one is a constant.
    pub fn constant_rhs(&self) -> Option<Vec<Rational>> {
        self.rows
            .iter()
            .map(|r| r.rhs.is_constant().then(|| r.rhs.constant_part().clone()))
            .collect()
    }

    /// Normalizes rows, drops `0 <= c` (c >= 0) and exact duplicates.
    pub fn tidy(&mut self) {
        for r in &mut self.rows {
            r.normalize();
        }
        let mut kept: Vec<Inequality> = Vec::with_capacity(self.rows.len());
        for r in core::mem::take(&mut self.rows) {
            if r.is_trivially_true() || kept.iter().any(|k| k.same_constraint(&r)) {
                continue;
            }
            kept.push(r);
        }
        self.rows = kept;
    }

    /// Rows other than plain `v >= 0`.
    pub fn count_non_nonneg(&self) -> usize {
        self.rows.iter().filter(|r| self.nonneg_var(r).is_none()).count()
    }

    /// Whether `point` (keyed by column) satisfies every row within `tol`.
    pub fn evaluate(
        &self,
        a: &dyn EntropyAssignment,
        point: &dyn Fn(Var) -> Option<f64>,
        tol: f64,
    ) -> Result<bool> {
        let mut x = Vec::with_capacity(self.vars.len());
        for v in &self.vars {
            match point(*v) {
                Some(val) => x.push(val),
                None => bail!(Domain, "point has no value for {v}"),
            }
        }
        for r in &self.rows {
            let lhs: f64 = r.coeffs.iter().zip(&x).map(|(c, v)| rational::to_f64(c) * v).sum();
            if lhs > r.rhs.evaluate(a)? + tol {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn format_row(&self, r: &Inequality) -> String {
        let mut lhs = String::new();
        for (c, v) in r.coeffs.iter().zip(&self.vars) {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if lhs.is_empty() {
                if neg {
                    lhs.push('-');
                }
            } else {
                lhs.push_str(if neg { " - " } else { " + " });
            }
            if !mag.is_one() {
                lhs.push_str(&rational::format_short(&mag));
                lhs.push(' ');
            }
            lhs.push_str(&v.name());
        }
        if lhs.is_empty() {
            lhs.push('0');
        }
        alloc::format!("{lhs} <= {}", r.rhs)
    }
}

impl fmt::Display for InequalitySystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rows {
            let line = self.format_row(r);
            if r.note.is_empty() {
                writeln!(f, "{line}")?;
            } else {
                writeln!(f, "{line}    [{}]", r.note)?;
            }
        }
        Ok(())
    }
}

pub(crate) fn vec_zero(n: usize) -> Vec<Rational> {
    let mut v = Vec::with_capacity(n);
    v.resize(n, rational::zero());
    v
}
