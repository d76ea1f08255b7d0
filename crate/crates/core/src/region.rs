//! Rate-region builders: receiver polyhedra, the split-rate system and its
//! Minkowski-sum form, covering and binning constraints, and reference
//! regions from the literature.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{bail, Result};
use crate::expr::{EntropyAssignment, EntropyExpr, SymSet, Symbol};
use crate::geometry::{
    fm_eliminate, minkowski_sum_with_cone, restrict_to_embedding, ConeGenerators, FmOptions, InequalitySystem,
    LinearForm, Var,
};
use crate::info::u_set;
use crate::order::{Family, Label, LabelSet, Order};
use crate::rational::{self, Rational};

/// Message set `E`, the ordered superset `F` and whether coded time sharing
/// conditions the bounds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProblemSpec {
    e: Family,
    order: Order,
    pub time_sharing: bool,
}

impl ProblemSpec {
    pub fn new(e: Family, order: Order, time_sharing: bool) -> Result<ProblemSpec> {
        if !e.is_subfamily_of(order.family()) {
            bail!(Domain, "E = {e} is not contained in F = {}", order.family());
        }
        if e.is_empty() {
            bail!(Domain, "message set is empty");
        }
        Ok(ProblemSpec { e, order, time_sharing })
    }

    pub fn e(&self) -> &Family {
        &self.e
    }

    pub fn f(&self) -> &Family {
        self.order.family()
    }

    pub fn order(&self) -> &Order {
        &self.order
    }

    pub fn k(&self) -> u8 {
        self.e.k()
    }

    fn q(&self) -> SymSet {
        if self.time_sharing {
            SymSet::new([Symbol::Q])
        } else {
            SymSet::empty()
        }
    }

    /// Pairs `(S, S')` with `S ∈ E`, `S' ∈ F`, `S ⊆ S'`.
    pub fn split_pairs(&self) -> Vec<(Label, Label)> {
        let mut out = Vec::new();
        for &s in self.e.labels() {
            for &t in self.f().labels() {
                if s.is_subset(t) {
                    out.push((s, t));
                }
            }
        }
        out
    }

    pub fn split_vars(&self) -> Vec<Var> {
        self.split_pairs().into_iter().map(|(s, t)| Var::Split(s, t)).collect()
    }
}

fn one() -> Rational {
    rational::one()
}

fn labels_of(f: &Family, set: LabelSet) -> Vec<Label> {
    f.labels_of(set)
}

/// `Σ_{S∈B} var(S) <= I(U_B; Y_j | U_{W_j∖B}, Q)` for every nonempty down-set
/// `B` of the order induced on the receiver window, plus nonnegativity of
/// every `F` rate. Variables are `R̂_S`.
pub fn receiver_polyhedron(spec: &ProblemSpec, j: u8) -> Result<InequalitySystem> {
    receiver_rows(spec, j, Var::Hat, false)
}

/// The variant with one row per arbitrary nonempty `B ⊆ W_j`, bounded by
/// `I(U_{↓B}; Y_j | U_{W_j∖↓B}, Q)`.
pub fn receiver_polyhedron_all_subsets(spec: &ProblemSpec, j: u8) -> Result<InequalitySystem> {
    receiver_rows(spec, j, Var::Hat, true)
}

fn receiver_rows(spec: &ProblemSpec, j: u8, var: fn(Label) -> Var, all_subsets: bool) -> Result<InequalitySystem> {
    let f = spec.f();
    let w = f.window_set(j)?;
    let mut sys = InequalitySystem::new(f.labels().iter().map(|&l| var(l)))?;
    let q = spec.q();
    let y = SymSet::new([Symbol::Y(j)]);
    let push = |b: LabelSet, c: LabelSet, sys: &mut InequalitySystem| -> Result<()> {
        let terms: Vec<(Var, Rational)> = labels_of(f, b).into_iter().map(|l| (var(l), one())).collect();
        let rest = u_set(labels_of(f, w.difference(c))).union(&q);
        let rhs = EntropyExpr::mi(&u_set(labels_of(f, c)), &y, &rest);
        sys.push_le(&terms, rhs, &format!("receiver {j}, B = {}", f.format_set(b)))
    };
    if all_subsets {
        let members: Vec<usize> = w.iter().collect();
        for mask in 1u64..(1u64 << members.len()) {
            let mut b = LabelSet::EMPTY;
            for (k, &i) in members.iter().enumerate() {
                if mask >> k & 1 == 1 {
                    b.insert(i);
                }
            }
            push(b, spec.order().down_closure_within(b, w), &mut sys)?;
        }
    } else {
        for b in spec.order().down_sets(w)?.nonempty() {
            push(b, b, &mut sys)?;
        }
    }
    for &l in f.labels() {
        sys.push_nonneg(var(l))?;
    }
    Ok(sys)
}

/// `∩_j` receiver polyhedra over `R̂_F`.
pub fn receiver_intersection(spec: &ProblemSpec) -> Result<InequalitySystem> {
    let mut sys = receiver_polyhedron(spec, 1)?;
    for j in 2..=spec.k() {
        sys = sys.intersect(&receiver_polyhedron(spec, j)?);
    }
    sys.tidy();
    Ok(sys)
}

/// `R̂_{S'} = Σ_{S∈E, S⊆S'} r_{S→S'}`.
fn reconstruction_form(spec: &ProblemSpec, t: Label) -> LinearForm {
    let terms = spec
        .split_pairs()
        .into_iter()
        .filter(|&(_, u)| u == t)
        .map(|(s, u)| (Var::Split(s, u), one()))
        .collect();
    LinearForm { terms, offset: EntropyExpr::zero() }
}

/// Rates `R_E` and split rates, with `R_S = Σ r_{S→S'}`, the receiver
/// polyhedra written in the reconstructed rates, and nonnegativity.
pub fn split_system(spec: &ProblemSpec) -> Result<InequalitySystem> {
    let vars: Vec<Var> =
        spec.e().labels().iter().map(|&l| Var::Rate(l)).chain(spec.split_vars()).collect();
    let mut sys = InequalitySystem::new(vars.clone())?;
    for &s in spec.e().labels() {
        let mut terms = alloc::vec![(Var::Rate(s), one())];
        for (a, b) in spec.split_pairs() {
            if a == s {
                terms.push((Var::Split(a, b), -one()));
            }
        }
        sys.push_eq(&terms, EntropyExpr::zero(), &format!("split of R_{s}"))?;
    }
    let mut recv = receiver_intersection(spec)?;
    for &t in spec.f().labels() {
        recv.substitute(Var::Hat(t), &reconstruction_form(spec, t))?;
    }
    sys = sys.intersect(&recv).realign(&vars)?;
    for v in spec.split_vars() {
        sys.push_nonneg(v)?;
    }
    for &s in spec.e().labels() {
        sys.push_nonneg(Var::Rate(s))?;
    }
    sys.tidy();
    Ok(sys)
}

/// [`split_system`] with the split rates eliminated.
pub fn split_region(spec: &ProblemSpec, opts: &FmOptions) -> Result<InequalitySystem> {
    fm_eliminate(&split_system(spec)?, &spec.split_vars(), opts)
}

pub fn cone_generators(e: &Family, f: &Family) -> ConeGenerators {
    ConeGenerators::between(e, f)
}

/// `(∩_j P_j + cone) ∩ R_+`, then `R_S = 0` for `S ∈ F∖E`.
pub fn cone_region(spec: &ProblemSpec, opts: &FmOptions) -> Result<InequalitySystem> {
    let p = receiver_intersection(spec)?.rename(|v| match v {
        Var::Hat(l) => Var::Rate(l),
        other => other,
    })?;
    let mut sum = minkowski_sum_with_cone(&p, &cone_generators(spec.e(), spec.f()), opts)?;
    for &l in spec.f().labels() {
        sum.push_nonneg(Var::Rate(l))?;
    }
    let outside: Vec<Var> =
        spec.f().labels().iter().filter(|l| !spec.e().contains(**l)).map(|&l| Var::Rate(l)).collect();
    let mut out = restrict_to_embedding(&sum, &outside)?;
    out.tidy();
    Ok(out)
}

/// Split-rate values keyed by `(S, S')`; missing legal pairs are zero.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SplitRateMap {
    pub values: BTreeMap<(Label, Label), f64>,
}

impl SplitRateMap {
    pub fn get(&self, s: Label, t: Label) -> f64 {
        self.values.get(&(s, t)).copied().unwrap_or(0.0)
    }

    pub fn validate(&self, e: &Family, f: &Family) -> Result<()> {
        for (&(s, t), &v) in &self.values {
            if !e.contains(s) || !f.contains(t) || !s.is_subset(t) {
                bail!(Domain, "split {s}->{t} is not legal");
            }
            if !(v >= 0.0) {
                bail!(Domain, "split {s}->{t} is negative");
            }
        }
        Ok(())
    }

    /// `R_S = Σ_{S'} r_{S→S'}` on `E`, zero on `F∖E`.
    pub fn message_rates(&self, f: &Family) -> BTreeMap<Label, f64> {
        let mut out: BTreeMap<Label, f64> = f.labels().iter().map(|&l| (l, 0.0)).collect();
        for (&(s, _), &v) in &self.values {
            *out.entry(s).or_insert(0.0) += v;
        }
        out
    }

    /// `R̂_{S'} = Σ_{S} r_{S→S'}`.
    pub fn reconstructed_rates(&self, f: &Family) -> BTreeMap<Label, f64> {
        let mut out: BTreeMap<Label, f64> = f.labels().iter().map(|&l| (l, 0.0)).collect();
        for (&(_, t), &v) in &self.values {
            *out.entry(t).or_insert(0.0) += v;
        }
        out
    }
}

/// The exchange vector of a split map.
#[derive(Clone, Debug, PartialEq)]
pub struct Exchange {
    pub delta: BTreeMap<Label, f64>,
    /// `Δ = Σ weight · e_{S→S'}` with nonnegative weights.
    pub certificate: Vec<((Label, Label), f64)>,
}

pub fn split_to_exchange(splits: &SplitRateMap, e: &Family, f: &Family) -> Result<Exchange> {
    splits.validate(e, f)?;
    let mut delta: BTreeMap<Label, f64> = f.labels().iter().map(|&l| (l, 0.0)).collect();
    let mut certificate = Vec::new();
    for (&(s, t), &v) in &splits.values {
        if s == t {
            continue;
        }
        *delta.get_mut(&s).expect("label of F") += v;
        *delta.get_mut(&t).expect("label of F") -= v;
        certificate.push(((s, t), v));
    }
    Ok(Exchange { delta, certificate })
}

/// `γ(G) = Σ_{S∈G} H(U_S | U_{↑S∖S}) - H(U_G)` as an entropy expression.
pub fn gamma_expr(order: &Order, g: LabelSet) -> Result<EntropyExpr> {
    if !g.is_subset(order.family().all()) {
        bail!(Domain, "set is not part of the family");
    }
    if !order.is_up_set(g) {
        bail!(Domain, "{} is not an up-set", order.family().format_set(g));
    }
    Ok(gamma_like(order, g, g))
}

/// `Σ_{S∈A} H(U_S | U_{↑S∖S}) - H(U_G)`.
fn gamma_like(order: &Order, a: LabelSet, g: LabelSet) -> EntropyExpr {
    let f = order.family();
    let mut e = EntropyExpr::zero();
    for i in a.iter() {
        let parents = u_set(labels_of(f, order.strict_up_of(i)));
        let with = u_set(labels_of(f, order.up_of(i)));
        e = e.plus(&EntropyExpr::cond_h(&with, &parents));
    }
    e.add_term(u_set(labels_of(f, g)), -one());
    e
}

pub fn gamma(dist: &dyn EntropyAssignment, order: &Order, g: LabelSet) -> Result<f64> {
    gamma_expr(order, g)?.evaluate(dist)
}

/// `γ` on every up-set of the order, in lattice order.
pub fn gamma_table(dist: &dyn EntropyAssignment, order: &Order) -> Result<Vec<(LabelSet, f64)>> {
    let ups = order.up_sets(order.family().all())?;
    ups.members.iter().map(|&g| Ok((g, gamma(dist, order, g)?))).collect()
}

/// `Σ_{S∈G} r_S >= γ(G)` for every nonempty up-set, and `r >= 0`.
pub fn covering_region(order: &Order) -> Result<InequalitySystem> {
    let f = order.family();
    let mut sys = InequalitySystem::new(f.labels().iter().map(|&l| Var::Excess(l)))?;
    for g in order.up_sets(f.all())?.nonempty() {
        let terms: Vec<(Var, Rational)> = labels_of(f, g).into_iter().map(|l| (Var::Excess(l), one())).collect();
        sys.push_ge(&terms, gamma_expr(order, g)?, &format!("covering, G = {}", f.format_set(g)))?;
    }
    for &l in f.labels() {
        sys.push_nonneg(Var::Excess(l))?;
    }
    Ok(sys)
}

/// Every nonempty subset `G`, bounded by the `γ`-like expression over the
/// largest up-set inside `G`.
pub fn covering_region_all_subsets(order: &Order) -> Result<InequalitySystem> {
    let f = order.family();
    let mut sys = InequalitySystem::new(f.labels().iter().map(|&l| Var::Excess(l)))?;
    if f.len() > 20 {
        bail!(Resource, "too many labels to enumerate every subset");
    }
    for mask in 1u128..(1u128 << f.len()) {
        let g = LabelSet::from_bits(mask);
        let terms: Vec<(Var, Rational)> = labels_of(f, g).into_iter().map(|l| (Var::Excess(l), one())).collect();
        let rhs = gamma_like(order, order.max_up_subset(g), g);
        sys.push_ge(&terms, rhs, &format!("covering, G = {}", f.format_set(g)))?;
    }
    for &l in f.labels() {
        sys.push_nonneg(Var::Excess(l))?;
    }
    Ok(sys)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BinningOptions {
    /// Also require `R̃_S >= R̂_S` for every label.
    pub excess_nonneg: bool,
}

/// Rates, splits, reconstructed rates `R̂` and codebook rates `R̃`, with the
/// binning rows over the up-sets of `(F, ≤)` and `R̃` inside the receiver
/// polyhedra (no time sharing).
pub fn binning_system(spec: &ProblemSpec, opts: &BinningOptions) -> Result<InequalitySystem> {
    let spec = ProblemSpec { time_sharing: false, ..spec.clone() };
    let f = spec.f().clone();
    let vars: Vec<Var> = spec
        .e()
        .labels()
        .iter()
        .map(|&l| Var::Rate(l))
        .chain(spec.split_vars())
        .chain(f.labels().iter().map(|&l| Var::Hat(l)))
        .chain(f.labels().iter().map(|&l| Var::Tilde(l)))
        .collect();
    let mut sys = InequalitySystem::new(vars.clone())?;
    for &s in spec.e().labels() {
        let mut terms = alloc::vec![(Var::Rate(s), one())];
        for (a, b) in spec.split_pairs() {
            if a == s {
                terms.push((Var::Split(a, b), -one()));
            }
        }
        sys.push_eq(&terms, EntropyExpr::zero(), &format!("split of R_{s}"))?;
    }
    for &t in f.labels() {
        let mut terms = alloc::vec![(Var::Hat(t), one())];
        for (v, c) in reconstruction_form(&spec, t).terms {
            terms.push((v, -c));
        }
        sys.push_eq(&terms, EntropyExpr::zero(), &format!("reconstruction of R_{t}"))?;
    }
    for g in spec.order().up_sets(f.all())?.nonempty() {
        let mut terms = Vec::new();
        for l in labels_of(&f, g) {
            terms.push((Var::Tilde(l), one()));
            terms.push((Var::Hat(l), -one()));
        }
        sys.push_ge(&terms, gamma_expr(spec.order(), g)?, &format!("binning, G = {}", f.format_set(g)))?;
    }
    if opts.excess_nonneg {
        for &l in f.labels() {
            sys.push_ge(&[(Var::Tilde(l), one()), (Var::Hat(l), -one())], EntropyExpr::zero(), "excess")?;
        }
    }
    let mut recv = receiver_rows(&spec, 1, Var::Tilde, false)?;
    for j in 2..=spec.k() {
        recv = recv.intersect(&receiver_rows(&spec, j, Var::Tilde, false)?);
    }
    sys = sys.intersect(&recv).realign(&vars)?;
    for v in spec.split_vars() {
        sys.push_nonneg(v)?;
    }
    for &s in spec.e().labels() {
        sys.push_nonneg(Var::Rate(s))?;
    }
    sys.tidy();
    Ok(sys)
}

/// Variables eliminated to bring [`binning_system`] down to `R_E`.
pub fn binning_aux_vars(spec: &ProblemSpec) -> Vec<Var> {
    spec.split_vars()
        .into_iter()
        .chain(spec.f().labels().iter().map(|&l| Var::Hat(l)))
        .chain(spec.f().labels().iter().map(|&l| Var::Tilde(l)))
        .collect()
}

/// Reference regions from the literature.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KnownRegion {
    /// Degraded message sets, `E = {1, 12}`, `X = U_1`.
    KornerMarton,
    /// `E = {1, 2, 12}`, conditionally independent auxiliaries.
    Cover,
    /// `E = {1, 2, 12}` under inclusion, split rates projected away.
    TwoUserFm,
    /// Three receivers, `E = {1, 123}`, `U = U_123`, `V = U_13`.
    NairElGamal,
}

impl KnownRegion {
    pub fn parse(name: &str) -> Result<KnownRegion> {
        Ok(match name {
            "korner_marton" => KnownRegion::KornerMarton,
            "cover" => KnownRegion::Cover,
            "two_user_fm" => KnownRegion::TwoUserFm,
            "nair_elgamal" => KnownRegion::NairElGamal,
            _ => bail!(Domain, "unknown region `{name}`"),
        })
    }
}

fn l(s: &str) -> Label {
    Label::parse(s).expect("static label")
}

fn u(labels: &[&str]) -> SymSet {
    u_set(labels.iter().map(|s| l(s)))
}

fn y(j: u8) -> SymSet {
    SymSet::new([Symbol::Y(j)])
}

fn mi(a: &SymSet, b: &SymSet, c: &SymSet) -> EntropyExpr {
    EntropyExpr::mi(a, b, c)
}

/// The region as published, with nonnegativity.
pub fn known_region(which: KnownRegion) -> Result<InequalitySystem> {
    let r = |s: &str| Var::Rate(l(s));
    let q = SymSet::new([Symbol::Q]);
    let none = SymSet::empty();
    let x = SymSet::new([Symbol::X]);
    let rows: Vec<(Vec<Var>, EntropyExpr)>;
    let vars: Vec<Var>;
    match which {
        KnownRegion::KornerMarton => {
            vars = alloc::vec![r("1"), r("12")];
            rows = alloc::vec![
                (alloc::vec![r("12")], mi(&u(&["12"]), &y(2), &none)),
                (alloc::vec![r("1")], mi(&u(&["1"]), &y(1), &u(&["12"]))),
                (alloc::vec![r("1"), r("12")], mi(&u(&["1"]), &y(1), &none)),
            ];
        }
        KnownRegion::Cover => {
            vars = alloc::vec![r("1"), r("2"), r("12")];
            rows = alloc::vec![
                (alloc::vec![r("1")], mi(&u(&["1"]), &u(&["12"]).union(&y(1)), &q)),
                (alloc::vec![r("12")], mi(&u(&["12"]), &u(&["1"]).union(&y(1)), &q)),
                (alloc::vec![r("1"), r("12")], mi(&u(&["1", "12"]), &y(1), &q)),
                (alloc::vec![r("2")], mi(&u(&["2"]), &u(&["12"]).union(&y(2)), &q)),
                (alloc::vec![r("12")], mi(&u(&["12"]), &u(&["2"]).union(&y(2)), &q)),
                (alloc::vec![r("2"), r("12")], mi(&u(&["2", "12"]), &y(2), &q)),
            ];
        }
        KnownRegion::TwoUserFm => {
            vars = alloc::vec![r("1"), r("2"), r("12")];
            let a1 = mi(&u(&["1", "12"]), &y(1), &q);
            let a2 = mi(&u(&["2", "12"]), &y(2), &q);
            let b1 = mi(&u(&["1"]), &y(1), &u(&["12"]).union(&q));
            let b2 = mi(&u(&["2"]), &y(2), &u(&["12"]).union(&q));
            rows = alloc::vec![
                (alloc::vec![r("1"), r("12")], a1.clone()),
                (alloc::vec![r("2"), r("12")], a2.clone()),
                (alloc::vec![r("1"), r("2"), r("12")], a2.plus(&b1)),
                (alloc::vec![r("1"), r("2"), r("12")], b2.plus(&a1)),
            ];
        }
        KnownRegion::NairElGamal => {
            vars = alloc::vec![r("1"), r("123")];
            let uu = u(&["123"]);
            let vv = u(&["13"]);
            rows = alloc::vec![
                (alloc::vec![r("123")], mi(&uu, &y(2), &none)),
                (alloc::vec![r("123")], mi(&vv, &y(3), &none)),
                (alloc::vec![r("1")], mi(&x, &y(1), &uu)),
                (alloc::vec![r("1"), r("123")], mi(&vv, &y(3), &none).plus(&mi(&x, &y(1), &vv))),
                (alloc::vec![r("1")], mi(&x, &y(1), &vv).plus(&mi(&vv, &y(3), &uu))),
            ];
        }
    }
    let mut sys = InequalitySystem::new(vars.clone())?;
    for (lhs, rhs) in rows {
        let terms: Vec<(Var, Rational)> = lhs.into_iter().map(|v| (v, one())).collect();
        sys.push_le(&terms, rhs, "")?;
    }
    for v in vars {
        sys.push_nonneg(v)?;
    }
    Ok(sys)
}

/// Hand-built Marton region for two private messages.
pub fn marton_region() -> Result<InequalitySystem> {
    let r1 = Var::Rate(l("1"));
    let r2 = Var::Rate(l("2"));
    let none = SymSet::empty();
    let i1 = mi(&u(&["1"]), &y(1), &none);
    let i2 = mi(&u(&["2"]), &y(2), &none);
    let i12 = mi(&u(&["1"]), &u(&["2"]), &none);
    let mut sys = InequalitySystem::new([r1, r2])?;
    sys.push_le(&[(r1, one())], i1.clone(), "")?;
    sys.push_le(&[(r2, one())], i2.clone(), "")?;
    sys.push_le(&[(r1, one()), (r2, one())], i1.plus(&i2).minus(&i12), "")?;
    sys.push_nonneg(r1)?;
    sys.push_nonneg(r2)?;
    Ok(sys)
}

/// Renders rows for humans, e.g. `R_1 + R_12 <= I-expression    [note]`.
pub fn describe(sys: &InequalitySystem) -> String {
    format!("{sys}")
}
