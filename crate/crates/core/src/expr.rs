//! Symbolic joint-entropy expressions.
//!
//! Every information quantity that appears on the right-hand side of a rate
//! constraint is a rational combination of joint entropies `H(T)` over the
//! symbol universe `{Q} ∪ {U_S} ∪ {X} ∪ {Y_j}`. Keeping them symbolic lets
//! Fourier–Motzkin elimination stay exact; numbers are bound only when a
//! region is evaluated.

use alloc::collections::btree_map::Entry;
use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{Signed, Zero};

use crate::error::{bail, Result};
use crate::order::Label;
use crate::rational::{self, Rational};

/// One random variable of the model.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Symbol {
    /// Coded time sharing.
    Q,
    /// Auxiliary carrying the message (or reconstructed message) labelled `S`.
    U(Label),
    /// Channel input.
    X,
    /// Output of receiver `j`.
    Y(u8),
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Q => f.write_str("Q"),
            Symbol::U(l) => write!(f, "U_{l}"),
            Symbol::X => f.write_str("X"),
            Symbol::Y(j) => write!(f, "Y_{j}"),
        }
    }
}

impl Symbol {
    pub fn parse(s: &str) -> Result<Symbol> {
        let s = s.trim();
        match s {
            "Q" => return Ok(Symbol::Q),
            "X" => return Ok(Symbol::X),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix("U_") {
            return Ok(Symbol::U(Label::parse(rest)?));
        }
        if let Some(rest) = s.strip_prefix("Y_") {
            if let Ok(j) = rest.parse::<u8>() {
                if j >= 1 {
                    return Ok(Symbol::Y(j));
                }
            }
        }
        bail!(Parse, "unknown symbol `{s}`")
    }
}

/// A set of symbols, kept sorted and duplicate-free.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct SymSet(Vec<Symbol>);

impl SymSet {
    pub fn new(symbols: impl IntoIterator<Item = Symbol>) -> SymSet {
        let mut v: Vec<Symbol> = symbols.into_iter().collect();
        v.sort();
        v.dedup();
        SymSet(v)
    }

    pub fn empty() -> SymSet {
        SymSet(Vec::new())
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn contains(&self, s: Symbol) -> bool {
        self.0.binary_search(&s).is_ok()
    }

    pub fn union(&self, other: &SymSet) -> SymSet {
        SymSet::new(self.0.iter().chain(other.0.iter()).copied())
    }

    pub fn without(&self, s: Symbol) -> SymSet {
        SymSet(self.0.iter().copied().filter(|&t| t != s).collect())
    }

    /// Parses `"H(Q,U_1)"` or the bare list `"Q,U_1"`; `"H()"` is empty.
    pub fn parse(s: &str) -> Result<SymSet> {
        let s = s.trim();
        let inner = s
            .strip_prefix("H(")
            .and_then(|r| r.strip_suffix(')'))
            .unwrap_or(s);
        if inner.trim().is_empty() {
            return Ok(SymSet::empty());
        }
        inner.split(',').map(Symbol::parse).collect::<Result<Vec<_>>>().map(SymSet::new)
    }

    /// `"H(Q,U_1)"`.
    pub fn key(&self) -> String {
        alloc::format!("H({})", self.list())
    }

    fn list(&self) -> String {
        let mut out = String::new();
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(&alloc::format!("{s}"));
        }
        out
    }
}

impl fmt::Display for SymSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.list())
    }
}

/// Source of numeric joint-entropy values (in bits).
pub trait EntropyAssignment {
    fn entropy(&self, set: &SymSet) -> Result<f64>;

    /// Exact value used when binding a system to rationals; the default
    /// rounds [`EntropyAssignment::entropy`] onto a dyadic grid.
    fn entropy_rational(&self, set: &SymSet) -> Result<Rational> {
        self.entropy(set).map(rational::from_f64)
    }
}

/// A plain table of entropy values; missing sets are an error, `H(∅) = 0`.
#[derive(Clone, Default, Debug)]
pub struct EntropyTable {
    pub values: BTreeMap<SymSet, f64>,
}

impl EntropyAssignment for EntropyTable {
    fn entropy(&self, set: &SymSet) -> Result<f64> {
        if set.is_empty() {
            return Ok(0.0);
        }
        match self.values.get(set) {
            Some(&v) => Ok(v),
            None => bail!(MissingSymbol, "{}", set.key()),
        }
    }
}

/// Exact table of rational entropy values.
#[derive(Clone, Default, Debug)]
pub struct RationalEntropyTable {
    pub values: BTreeMap<SymSet, Rational>,
}

impl EntropyAssignment for RationalEntropyTable {
    fn entropy(&self, set: &SymSet) -> Result<f64> {
        self.entropy_rational(set).map(|r| rational::to_f64(&r))
    }

    fn entropy_rational(&self, set: &SymSet) -> Result<Rational> {
        if set.is_empty() {
            return Ok(rational::zero());
        }
        match self.values.get(set) {
            Some(v) => Ok(v.clone()),
            None => bail!(MissingSymbol, "{}", set.key()),
        }
    }
}

/// A rational linear combination of joint entropies plus a constant.
///
/// Canonical: no zero coefficients and no `H(∅)` term.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct EntropyExpr {
    terms: BTreeMap<SymSet, Rational>,
    constant: Rational,
}

impl EntropyExpr {
    pub fn zero() -> EntropyExpr {
        EntropyExpr::default()
    }

    pub fn constant(c: Rational) -> EntropyExpr {
        EntropyExpr { terms: BTreeMap::new(), constant: c }
    }

    /// `H(T)`.
    pub fn h(set: SymSet) -> EntropyExpr {
        let mut e = EntropyExpr::zero();
        e.add_term(set, rational::one());
        e
    }

    /// `H(A | C) = H(A ∪ C) - H(C)`.
    pub fn cond_h(a: &SymSet, c: &SymSet) -> EntropyExpr {
        let mut e = EntropyExpr::h(a.union(c));
        e.add_term(c.clone(), -rational::one());
        e
    }

    /// `I(A; B | C) = H(A∪C) + H(B∪C) - H(A∪B∪C) - H(C)`.
    pub fn mi(a: &SymSet, b: &SymSet, c: &SymSet) -> EntropyExpr {
        let mut e = EntropyExpr::zero();
        let one = rational::one();
        e.add_term(a.union(c), one.clone());
        e.add_term(b.union(c), one.clone());
        e.add_term(a.union(b).union(c), -one.clone());
        e.add_term(c.clone(), -one);
        e
    }

    pub fn from_parts(
        terms: impl IntoIterator<Item = (SymSet, Rational)>,
        constant: Rational,
    ) -> EntropyExpr {
        let mut e = EntropyExpr::constant(constant);
        for (s, c) in terms {
            e.add_term(s, c);
        }
        e
    }

    pub fn terms(&self) -> &BTreeMap<SymSet, Rational> {
        &self.terms
    }

    pub fn constant_part(&self) -> &Rational {
        &self.constant
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty() && self.constant.is_zero()
    }

    pub fn add_term(&mut self, set: SymSet, coef: Rational) {
        if set.is_empty() || coef.is_zero() {
            return;
        }
        match self.terms.entry(set) {
            Entry::Vacant(v) => {
                v.insert(coef);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += coef;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_constant(&mut self, c: &Rational) {
        self.constant += c;
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, other: &EntropyExpr, c: &Rational) {
        if c.is_zero() {
            return;
        }
        for (s, v) in &other.terms {
            let slot = self.terms.entry(s.clone()).or_insert_with(Rational::zero);
            *slot += v * c;
        }
        self.terms.retain(|_, v| !v.is_zero());
        self.constant += &other.constant * c;
    }

    pub fn scaled(&self, c: &Rational) -> EntropyExpr {
        let mut e = EntropyExpr::zero();
        e.add_scaled(self, c);
        e
    }

    pub fn negated(&self) -> EntropyExpr {
        self.scaled(&-rational::one())
    }

    pub fn plus(&self, other: &EntropyExpr) -> EntropyExpr {
        let mut e = self.clone();
        e.add_scaled(other, &rational::one());
        e
    }

    pub fn minus(&self, other: &EntropyExpr) -> EntropyExpr {
        let mut e = self.clone();
        e.add_scaled(other, &-rational::one());
        e
    }

    /// Symbolic difference is a nonnegative constant.
    pub fn dominates_by_constant(&self, other: &EntropyExpr) -> Option<Rational> {
        if self.terms != other.terms {
            return None;
        }
        Some(&self.constant - &other.constant)
    }

    pub fn evaluate(&self, a: &dyn EntropyAssignment) -> Result<f64> {
        let mut v = rational::to_f64(&self.constant);
        for (s, c) in &self.terms {
            v += rational::to_f64(c) * a.entropy(s)?;
        }
        Ok(v)
    }

    pub fn evaluate_rational(&self, a: &dyn EntropyAssignment) -> Result<Rational> {
        let mut v = self.constant.clone();
        for (s, c) in &self.terms {
            v += c * a.entropy_rational(s)?;
        }
        Ok(v)
    }

    /// Every joint-entropy set mentioned.
    pub fn sets(&self) -> impl Iterator<Item = &SymSet> {
        self.terms.keys()
    }

    /// Rewrites each `H(T)` where `T` holds channel outputs and a subset that
    /// determines `X` as `H(T \ Y) + H(X, Y_T) - H(X)`.
    ///
    /// Valid whenever `X` is a function of the auxiliaries in `determines_x`
    /// and the outputs depend on everything else only through `X`.
    pub fn reduce_through_input(&self, determines_x: &dyn Fn(&SymSet) -> bool) -> EntropyExpr {
        let mut out = EntropyExpr::constant(self.constant.clone());
        for (s, c) in &self.terms {
            let (ys, rest): (Vec<Symbol>, Vec<Symbol>) =
                s.symbols().iter().partition(|t| matches!(t, Symbol::Y(_)));
            let rest = SymSet::new(rest);
            if ys.is_empty() || rest.contains(Symbol::X) || !determines_x(&rest) {
                out.add_term(s.clone(), c.clone());
                continue;
            }
            out.add_term(rest, c.clone());
            out.add_term(SymSet::new(ys.iter().copied().chain([Symbol::X])), c.clone());
            out.add_term(SymSet::new([Symbol::X]), -c.clone());
        }
        out
    }
}

impl fmt::Display for EntropyExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (s, c) in &self.terms {
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            if mag != rational::one() {
                write!(f, "{}*", rational::format_short(&mag))?;
            }
            write!(f, "H({s})")?;
            first = false;
        }
        if !self.constant.is_zero() || first {
            let neg = self.constant.is_negative();
            if first {
                write!(f, "{}", rational::format_short(&self.constant))?;
            } else {
                write!(
                    f,
                    "{}{}",
                    if neg { " - " } else { " + " },
                    rational::format_short(&self.constant.abs())
                )?;
            }
        }
        Ok(())
    }
}

/// Symbolic `I(A; B | C)` (the name used across the builders).
pub fn mi_symbol(a: &SymSet, b: &SymSet, c: &SymSet) -> EntropyExpr {
    EntropyExpr::mi(a, b, c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(s: &str) -> Symbol {
        Symbol::U(Label::parse(s).unwrap())
    }

    #[test]
    fn unconditional_mi() {
        let e = mi_symbol(&SymSet::new([u("1")]), &SymSet::new([Symbol::Y(1)]), &SymSet::empty());
        let mut want = EntropyExpr::h(SymSet::new([u("1")]));
        want.add_term(SymSet::new([Symbol::Y(1)]), rational::one());
        want.add_term(SymSet::new([u("1"), Symbol::Y(1)]), -rational::one());
        assert_eq!(e, want);
        assert_eq!(e.terms().len(), 3);
    }

    #[test]
    fn conditional_mi_with_time_sharing() {
        let c = SymSet::new([u("12"), Symbol::Q]);
        let e = mi_symbol(&SymSet::new([u("1")]), &SymSet::new([Symbol::Y(1)]), &c);
        let keys: Vec<String> = e.terms().keys().map(|k| k.key()).collect();
        assert_eq!(keys, ["H(Q,U_1,U_12)", "H(Q,U_1,U_12,Y_1)", "H(Q,U_12)", "H(Q,U_12,Y_1)"]);
        assert_eq!(alloc::format!("{e}"), "H(Q,U_1,U_12) - H(Q,U_1,U_12,Y_1) - H(Q,U_12) + H(Q,U_12,Y_1)");
    }

    #[test]
    fn cancellation_keeps_canonical_form() {
        let a = EntropyExpr::h(SymSet::new([Symbol::X]));
        let z = a.minus(&a);
        assert!(z.is_zero());
        assert_eq!(z, EntropyExpr::zero());
        let mut e = EntropyExpr::zero();
        e.add_term(SymSet::empty(), rational::int(3));
        assert!(e.is_zero());
    }

    #[test]
    fn symset_parse() {
        let s = SymSet::parse("H(U_12,Q,Y_3)").unwrap();
        assert_eq!(s.key(), "H(Q,U_12,Y_3)");
        assert!(SymSet::parse("H()").unwrap().is_empty());
        assert!(SymSet::parse("H(Z)").is_err());
    }

    #[test]
    fn table_evaluation() {
        let mut t = EntropyTable::default();
        t.values.insert(SymSet::new([u("1")]), 1.0);
        let e = EntropyExpr::h(SymSet::new([u("1")])).plus(&EntropyExpr::constant(rational::ratio(1, 2)));
        assert_eq!(e.evaluate(&t).unwrap(), 1.5);
        let missing = EntropyExpr::h(SymSet::new([Symbol::X]));
        assert!(matches!(missing.evaluate(&t), Err(crate::Error::MissingSymbol(_))));
    }

    #[test]
    fn reduction_through_input() {
        // I(U_1,U_12;Y_1) == I(U_1;Y_1) when U_1 determines X
        let det = |s: &SymSet| s.contains(u("1"));
        let y = SymSet::new([Symbol::Y(1)]);
        let a = mi_symbol(&SymSet::new([u("1"), u("12")]), &y, &SymSet::empty());
        let b = mi_symbol(&SymSet::new([u("1")]), &y, &SymSet::empty());
        assert_ne!(a, b);
        assert_eq!(a.reduce_through_input(&det), b.reduce_through_input(&det));
    }
}
