//! Minkowski sums with rate-transfer cones.

use alloc::vec::Vec;

use super::fm::{fm_eliminate, FmOptions};
use super::system::{InequalitySystem, LinearForm};
use super::var::Var;
use crate::error::{bail, Result};
use crate::expr::EntropyExpr;
use crate::order::{Family, Label};
use crate::rational::{self, Rational};

/// Generators `e_{S→S'}`: `+1` at `R_S`, `-1` at `R_S'`, with `S ⊂ S'`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConeGenerators {
    pairs: Vec<(Label, Label)>,
}

impl ConeGenerators {
    pub fn new(pairs: impl IntoIterator<Item = (Label, Label)>) -> Result<ConeGenerators> {
        let mut out = ConeGenerators::default();
        for (s, t) in pairs {
            if !s.is_proper_subset(t) {
                bail!(Domain, "generator {s}->{t} needs {s} to be a proper subset of {t}");
            }
            if !out.pairs.contains(&(s, t)) {
                out.pairs.push((s, t));
            }
        }
        Ok(out)
    }

    /// One generator per `S ∈ E`, `S' ∈ F` with `S ⊂ S'`.
    pub fn between(e: &Family, f: &Family) -> ConeGenerators {
        let mut pairs = Vec::new();
        for &s in e.labels() {
            for &t in f.labels() {
                if s.is_proper_subset(t) {
                    pairs.push((s, t));
                }
            }
        }
        ConeGenerators { pairs }
    }

    pub fn pairs(&self) -> &[(Label, Label)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// The generator as a vector over `vars`.
    pub fn vector(&self, i: usize, vars: &[Var]) -> Vec<Rational> {
        let (s, t) = self.pairs[i];
        vars.iter()
            .map(|v| {
                if *v == Var::Rate(s) {
                    rational::one()
                } else if *v == Var::Rate(t) {
                    -rational::one()
                } else {
                    rational::zero()
                }
            })
            .collect()
    }
}

/// `P + cone(C)`: lifts to `R = R̂ + Σ λ_i g_i`, `λ >= 0`, and eliminates `λ`.
pub fn minkowski_sum_with_cone(
    p: &InequalitySystem,
    cone: &ConeGenerators,
    opts: &FmOptions,
) -> Result<InequalitySystem> {
    for (s, t) in cone.pairs() {
        for l in [s, t] {
            if p.index_of(Var::Rate(*l)).is_none() {
                bail!(Shape, "generator refers to R_{l}, which the polyhedron does not declare");
            }
        }
    }
    if cone.is_empty() {
        return Ok(p.clone());
    }
    let mut lifted = p.clone();
    let lambdas: Vec<Var> = cone.pairs().iter().map(|(s, t)| Var::Lambda(*s, *t)).collect();
    for l in &lambdas {
        lifted.ensure_var(*l);
    }
    // R̂_S = R_S - Σ λ_i g_i[S]; substituting in place keeps the name R_S for R
    let vars: Vec<Var> = p.vars().to_vec();
    for v in &vars {
        let mut terms: Vec<(Var, Rational)> = Vec::new();
        for (i, (s, t)) in cone.pairs().iter().enumerate() {
            if *v == Var::Rate(*s) {
                terms.push((lambdas[i], -rational::one()));
            } else if *v == Var::Rate(*t) {
                terms.push((lambdas[i], rational::one()));
            }
        }
        if terms.is_empty() {
            continue;
        }
        shift_column(&mut lifted, *v, &terms)?;
    }
    for l in &lambdas {
        lifted.push_nonneg(*l)?;
    }
    let mut out = fm_eliminate(&lifted, &lambdas, opts)?;
    out = out.realign(&vars)?;
    Ok(out)
}

/// Replaces `v` by `v + Σ terms` in every row.
fn shift_column(sys: &mut InequalitySystem, v: Var, terms: &[(Var, Rational)]) -> Result<()> {
    let col = sys.index_of(v).expect("declared");
    let cols: Vec<(usize, Rational)> =
        terms.iter().map(|(w, c)| (sys.index_of(*w).expect("declared"), c.clone())).collect();
    for r in sys.rows_mut() {
        let a = r.coeffs[col].clone();
        if num_traits::Zero::is_zero(&a) {
            continue;
        }
        for (j, c) in &cols {
            r.coeffs[*j] += &a * c;
        }
    }
    Ok(())
}

/// Substitutes `0` for every listed variable and drops it. Rows such as
/// `0 <= -d` that expose infeasibility are kept.
pub fn restrict_to_embedding(system: &InequalitySystem, zero_vars: &[Var]) -> Result<InequalitySystem> {
    let mut out = system.clone();
    let zero = LinearForm { terms: Vec::new(), offset: EntropyExpr::zero() };
    for v in zero_vars {
        if out.index_of(*v).is_none() {
            bail!(Domain, "{v} is not a variable of the system");
        }
        out.substitute(*v, &zero)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::compare::region_equal;
    use crate::rational::int;

    fn r(s: &str) -> Var {
        Var::Rate(Label::parse(s).unwrap())
    }

    fn l(s: &str) -> Label {
        Label::parse(s).unwrap()
    }

    #[test]
    fn single_generator() {
        // {R1 <= 2, R12 <= 3, R >= 0} + cone(e_{1->12})
        let mut p = InequalitySystem::new([r("1"), r("12")]).unwrap();
        p.push_le(&[(r("1"), int(1))], EntropyExpr::constant(int(2)), "").unwrap();
        p.push_le(&[(r("12"), int(1))], EntropyExpr::constant(int(3)), "").unwrap();
        p.push_nonneg(r("1")).unwrap();
        p.push_nonneg(r("12")).unwrap();
        let cone = ConeGenerators::new([(l("1"), l("12"))]).unwrap();
        let mut sum = minkowski_sum_with_cone(&p, &cone, &FmOptions::default()).unwrap();
        sum.push_nonneg(r("1")).unwrap();
        sum.push_nonneg(r("12")).unwrap();
        let mut want = InequalitySystem::new([r("1"), r("12")]).unwrap();
        want.push_le(&[(r("12"), int(1))], EntropyExpr::constant(int(3)), "").unwrap();
        want.push_le(&[(r("1"), int(1)), (r("12"), int(1))], EntropyExpr::constant(int(5)), "").unwrap();
        want.push_nonneg(r("1")).unwrap();
        want.push_nonneg(r("12")).unwrap();
        assert!(region_equal(&sum, &want, None, 0.0).unwrap().is_equal());
    }

    #[test]
    fn empty_cone_is_identity() {
        let mut p = InequalitySystem::new([r("1")]).unwrap();
        p.push_le(&[(r("1"), int(1))], EntropyExpr::constant(int(2)), "").unwrap();
        let out = minkowski_sum_with_cone(&p, &ConeGenerators::default(), &FmOptions::default()).unwrap();
        assert_eq!(out, p);
    }

    #[test]
    fn bad_generator_and_dimension() {
        assert!(ConeGenerators::new([(l("12"), l("1"))]).is_err());
        let p = InequalitySystem::new([r("1")]).unwrap();
        let cone = ConeGenerators::new([(l("1"), l("12"))]).unwrap();
        assert!(minkowski_sum_with_cone(&p, &cone, &FmOptions::default()).is_err());
    }

    #[test]
    fn restriction_exposes_infeasibility() {
        let mut s = InequalitySystem::new([r("1"), r("13")]).unwrap();
        s.push_ge(&[(r("13"), int(1))], EntropyExpr::constant(int(2)), "").unwrap();
        let out = restrict_to_embedding(&s, &[r("13")]).unwrap();
        assert!(out.rows()[0].is_infeasible());
        assert_eq!(restrict_to_embedding(&s, &[]).unwrap(), s);
    }
}
