//! Finite joint distributions, entropies and superposition-admitting inputs.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::cell::RefCell;

use rand::Rng;

use crate::channels::{random_pmf, TabularBC};
use crate::error::{bail, Result};
use crate::expr::{EntropyAssignment, EntropyExpr, SymSet, Symbol};
use crate::order::{Label, Order};

/// Default cap on the number of cells of a dense table.
pub const DEFAULT_CELL_CAP: usize = 1 << 24;

/// Allowed deviation of a pmf's total mass from one.
pub const MASS_TOL: f64 = 1e-12;

/// Ordered symbols with their alphabet sizes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VariableUniverse {
    symbols: Vec<Symbol>,
    alphabets: Vec<usize>,
}

impl VariableUniverse {
    pub fn new(entries: impl IntoIterator<Item = (Symbol, usize)>) -> Result<VariableUniverse> {
        let mut u = VariableUniverse { symbols: Vec::new(), alphabets: Vec::new() };
        for (s, a) in entries {
            if a == 0 {
                bail!(Domain, "alphabet of {s} is empty");
            }
            if u.symbols.contains(&s) {
                bail!(Domain, "symbol {s} listed twice");
            }
            u.symbols.push(s);
            u.alphabets.push(a);
        }
        Ok(u)
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn alphabets(&self) -> &[usize] {
        &self.alphabets
    }

    pub fn position(&self, s: Symbol) -> Option<usize> {
        self.symbols.iter().position(|&t| t == s)
    }

    pub fn alphabet(&self, s: Symbol) -> Option<usize> {
        self.position(s).map(|i| self.alphabets[i])
    }

    /// Number of cells, or `None` on overflow.
    pub fn cells(&self) -> Option<usize> {
        self.alphabets.iter().try_fold(1usize, |acc, &a| acc.checked_mul(a))
    }
}

/// A dense pmf over a product alphabet, row-major with the first symbol most
/// significant.
#[derive(Clone, Debug, PartialEq)]
pub struct JointDistribution {
    universe: VariableUniverse,
    pmf: Vec<f64>,
}

impl JointDistribution {
    pub fn new(universe: VariableUniverse, pmf: Vec<f64>) -> Result<JointDistribution> {
        let cells = universe.cells().unwrap_or(usize::MAX);
        if pmf.len() != cells {
            bail!(Shape, "pmf has {} entries, universe has {cells} cells", pmf.len());
        }
        if pmf.iter().any(|&p| !(p >= 0.0)) {
            bail!(Domain, "pmf has a negative or NaN entry");
        }
        let mass: f64 = pmf.iter().sum();
        if libm::fabs(mass - 1.0) > MASS_TOL * libm::sqrt(1.0 + pmf.len() as f64) {
            bail!(Domain, "pmf sums to {mass}");
        }
        Ok(JointDistribution { universe, pmf })
    }

    pub fn universe(&self) -> &VariableUniverse {
        &self.universe
    }

    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    /// The pmf of the listed symbols, in the listed order.
    pub fn marginal(&self, symbols: &[Symbol]) -> Result<JointDistribution> {
        let mut pos = Vec::with_capacity(symbols.len());
        for &s in symbols {
            match self.universe.position(s) {
                Some(p) => pos.push(p),
                None => bail!(MissingSymbol, "{s} is not part of the distribution"),
            }
        }
        let sub = VariableUniverse::new(symbols.iter().map(|&s| (s, self.universe.alphabet(s).unwrap())))?;
        let pmf = self.marginal_table(&pos);
        Ok(JointDistribution { universe: sub, pmf })
    }

    fn marginal_table(&self, pos: &[usize]) -> Vec<f64> {
        let al = &self.universe.alphabets;
        let n = al.len();
        // stride of each universe position inside the marginal table
        let mut mstride = alloc::vec![0usize; n];
        let mut acc = 1;
        for &p in pos.iter().rev() {
            mstride[p] = acc;
            acc *= al[p];
        }
        let mut out = alloc::vec![0.0; acc];
        let mut digits = alloc::vec![0usize; n];
        let mut m = 0usize;
        for &p in &self.pmf {
            out[m] += p;
            // odometer increment, last symbol fastest
            let mut i = n;
            while i > 0 {
                i -= 1;
                digits[i] += 1;
                m += mstride[i];
                if digits[i] < al[i] {
                    break;
                }
                m -= mstride[i] * digits[i];
                digits[i] = 0;
            }
        }
        out
    }

    /// Shannon entropy (bits) of the marginal on `set`; `0 log 0 = 0`.
    pub fn entropy_of(&self, set: &SymSet) -> Result<f64> {
        if set.is_empty() {
            return Ok(0.0);
        }
        let mut pos = Vec::with_capacity(set.len());
        for &s in set.symbols() {
            match self.universe.position(s) {
                Some(p) => pos.push(p),
                None => bail!(MissingSymbol, "{s} is not part of the distribution"),
            }
        }
        Ok(shannon(&self.marginal_table(&pos)))
    }

    /// A memoizing view for repeated evaluation.
    pub fn cached(&self) -> CachedEntropy<'_> {
        CachedEntropy { dist: self, cache: RefCell::new(BTreeMap::new()) }
    }
}

fn shannon(p: &[f64]) -> f64 {
    let mut h = 0.0;
    for &v in p {
        if v > 0.0 {
            h -= v * libm::log2(v);
        }
    }
    h
}

impl EntropyAssignment for JointDistribution {
    fn entropy(&self, set: &SymSet) -> Result<f64> {
        self.entropy_of(set)
    }
}

/// Entropy lookups memoized per symbol set.
pub struct CachedEntropy<'a> {
    dist: &'a JointDistribution,
    cache: RefCell<BTreeMap<SymSet, f64>>,
}

impl EntropyAssignment for CachedEntropy<'_> {
    fn entropy(&self, set: &SymSet) -> Result<f64> {
        if let Some(&v) = self.cache.borrow().get(set) {
            return Ok(v);
        }
        let v = self.dist.entropy_of(set)?;
        self.cache.borrow_mut().insert(set.clone(), v);
        Ok(v)
    }
}

/// `H(dist restricted to T)` in bits.
pub fn entropy(dist: &JointDistribution, t: &SymSet) -> Result<f64> {
    dist.entropy_of(t)
}

/// `I(A; B | C) = H(A∪C) + H(B∪C) - H(A∪B∪C) - H(C)`.
pub fn cond_mutual_information(dist: &JointDistribution, a: &SymSet, b: &SymSet, c: &SymSet) -> Result<f64> {
    EntropyExpr::mi(a, b, c).evaluate(dist)
}

/// How the auxiliaries are generated.
#[derive(Clone, Debug, PartialEq)]
pub enum AuxLaw {
    /// One table `p(u_S | u_{↑S∖S}, q)` per label in family order. Rows are
    /// indexed row-major over `(q, parents in family order)`.
    Factored { alphabets: Vec<usize>, conditionals: Vec<Vec<f64>> },
    /// An arbitrary joint `p(q, u_F)` (row-major, `q` first).
    Joint { alphabets: Vec<usize>, pmf: Vec<f64> },
}

/// `(X, U_F, Q)` together with a channel.
#[derive(Clone, Debug, PartialEq)]
pub struct AdmissibleSpec {
    pub order: Order,
    pub q_pmf: Vec<f64>,
    pub aux: AuxLaw,
    pub x_alphabet: usize,
    /// `X = f(q, u_F)`, row-major over `(q, u_F in family order)`.
    pub input_map: Vec<usize>,
    pub channel: Option<TabularBC>,
}

impl AdmissibleSpec {
    pub fn aux_alphabets(&self) -> &[usize] {
        match &self.aux {
            AuxLaw::Factored { alphabets, .. } | AuxLaw::Joint { alphabets, .. } => alphabets,
        }
    }

    /// Indices (in family order) of `↑{S} ∖ {S}`.
    pub fn parents(&self, i: usize) -> Vec<usize> {
        self.order.strict_up_of(i).iter().collect()
    }

    pub fn validate(&self) -> Result<()> {
        let f = self.order.family();
        let al = self.aux_alphabets();
        if al.len() != f.len() || al.iter().any(|&a| a == 0) {
            bail!(Shape, "need one nonempty alphabet per label ({} labels)", f.len());
        }
        check_pmf(&self.q_pmf, "q_pmf")?;
        let nq = self.q_pmf.len();
        match &self.aux {
            AuxLaw::Factored { conditionals, .. } => {
                if conditionals.len() != f.len() {
                    bail!(Shape, "need one conditional table per label");
                }
                for (i, table) in conditionals.iter().enumerate() {
                    let rows: usize = nq * self.parents(i).iter().map(|&p| al[p]).product::<usize>();
                    if table.len() != rows * al[i] {
                        bail!(Shape, "conditional for {} has {} entries, expected {}", f.label(i), table.len(), rows * al[i]);
                    }
                    for (r, row) in table.chunks(al[i]).enumerate() {
                        check_pmf(row, &alloc::format!("conditional for {} row {r}", f.label(i)))?;
                    }
                }
            }
            AuxLaw::Joint { pmf, .. } => {
                if pmf.len() != nq * al.iter().product::<usize>() {
                    bail!(Shape, "aux joint has the wrong number of entries");
                }
                check_pmf(pmf, "aux joint")?;
            }
        }
        let cells = nq * al.iter().product::<usize>();
        if self.input_map.len() != cells {
            bail!(Shape, "input map has {} entries, expected {cells}", self.input_map.len());
        }
        if let Some(&x) = self.input_map.iter().find(|&&x| x >= self.x_alphabet) {
            bail!(Shape, "input map produces {x} outside the input alphabet");
        }
        if let Some(ch) = &self.channel {
            if ch.input_size() != self.x_alphabet {
                bail!(Shape, "channel input alphabet {} differs from X alphabet {}", ch.input_size(), self.x_alphabet);
            }
            if ch.receivers() != f.k() {
                bail!(Shape, "channel has {} outputs, K = {}", ch.receivers(), f.k());
            }
        }
        Ok(())
    }

    /// `p(q, u_F)` as a flat table.
    pub fn aux_pmf(&self) -> Vec<f64> {
        let al = self.aux_alphabets().to_vec();
        match &self.aux {
            AuxLaw::Joint { pmf, .. } => pmf.clone(),
            AuxLaw::Factored { conditionals, .. } => {
                let parents: Vec<Vec<usize>> = (0..al.len()).map(|i| self.parents(i)).collect();
                let nu: usize = al.iter().product();
                let mut out = Vec::with_capacity(self.q_pmf.len() * nu);
                for (q, &pq) in self.q_pmf.iter().enumerate() {
                    for ui in 0..nu {
                        let u = crate::channels::mixed_radix(ui, &al);
                        let mut p = pq;
                        for i in 0..al.len() {
                            let mut row = q;
                            for &par in &parents[i] {
                                row = row * al[par] + u[par];
                            }
                            p *= conditionals[i][row * al[i] + u[i]];
                        }
                        out.push(p);
                    }
                }
                out
            }
        }
    }

    /// Makes `p(u_S | parents, q)` ignore every parent not in `keep` by
    /// copying the row where the ignored parents take value 0.
    pub fn restrict_parents(&mut self, i: usize, keep: &[usize]) -> Result<()> {
        let parents = self.parents(i);
        let al = self.aux_alphabets().to_vec();
        let AuxLaw::Factored { conditionals, .. } = &mut self.aux else {
            bail!(Domain, "only factored laws have conditional tables");
        };
        let sizes: Vec<usize> =
            core::iter::once(self.q_pmf.len()).chain(parents.iter().map(|&p| al[p])).collect();
        let rows: usize = sizes.iter().product();
        let table = conditionals[i].clone();
        for r in 0..rows {
            let mut d = crate::channels::mixed_radix(r, &sizes);
            for (k, p) in parents.iter().enumerate() {
                if !keep.contains(p) {
                    d[k + 1] = 0;
                }
            }
            let src = d.iter().zip(&sizes).fold(0, |acc, (v, s)| acc * s + v);
            conditionals[i][r * al[i]..(r + 1) * al[i]].copy_from_slice(&table[src * al[i]..(src + 1) * al[i]]);
        }
        Ok(())
    }

    /// A random admissible input with conditionals drawn from the simplex.
    pub fn random(
        order: Order,
        q_size: usize,
        aux_sizes: &[usize],
        x_size: usize,
        rng: &mut impl Rng,
    ) -> Result<AdmissibleSpec> {
        let f = order.family().clone();
        if aux_sizes.len() != f.len() {
            bail!(Shape, "need one alphabet size per label");
        }
        let mut conditionals = Vec::with_capacity(f.len());
        for i in 0..f.len() {
            let rows: usize = q_size * order.strict_up_of(i).iter().map(|p| aux_sizes[p]).product::<usize>();
            let mut t = Vec::with_capacity(rows * aux_sizes[i]);
            for _ in 0..rows {
                t.extend(random_pmf(aux_sizes[i], rng));
            }
            conditionals.push(t);
        }
        let cells = q_size * aux_sizes.iter().product::<usize>();
        let input_map = (0..cells).map(|_| rng.gen_range(0..x_size)).collect();
        let spec = AdmissibleSpec {
            order,
            q_pmf: random_pmf(q_size, rng),
            aux: AuxLaw::Factored { alphabets: aux_sizes.to_vec(), conditionals },
            x_alphabet: x_size,
            input_map,
            channel: None,
        };
        spec.validate()?;
        Ok(spec)
    }
}

fn check_pmf(p: &[f64], what: &str) -> Result<()> {
    if p.is_empty() || p.iter().any(|&v| !(v >= 0.0)) {
        bail!(Domain, "{what} is not a probability vector");
    }
    let s: f64 = p.iter().sum();
    if libm::fabs(s - 1.0) > MASS_TOL * libm::sqrt(1.0 + p.len() as f64) {
        bail!(Domain, "{what} sums to {s}");
    }
    Ok(())
}

/// Universe `(Q, U_S for S in family order, X, Y_1..Y_K)`.
pub fn spec_universe(spec: &AdmissibleSpec) -> Result<VariableUniverse> {
    let f = spec.order.family();
    let mut entries: Vec<(Symbol, usize)> = alloc::vec![(Symbol::Q, spec.q_pmf.len())];
    for (i, &l) in f.labels().iter().enumerate() {
        entries.push((Symbol::U(l), spec.aux_alphabets()[i]));
    }
    entries.push((Symbol::X, spec.x_alphabet));
    if let Some(ch) = &spec.channel {
        for (j, &a) in ch.output_sizes().iter().enumerate() {
            entries.push((Symbol::Y(j as u8 + 1), a));
        }
    }
    VariableUniverse::new(entries)
}

/// The joint pmf of `(Q, U_F, X, Y)` implied by the generation law, the input
/// map and the channel. Without a channel the outputs are omitted.
pub fn assemble_joint(spec: &AdmissibleSpec) -> Result<JointDistribution> {
    assemble_joint_capped(spec, DEFAULT_CELL_CAP)
}

pub fn assemble_joint_capped(spec: &AdmissibleSpec, cap: usize) -> Result<JointDistribution> {
    spec.validate()?;
    let universe = spec_universe(spec)?;
    let cells = match universe.cells() {
        Some(c) if c <= cap => c,
        other => bail!(Resource, "joint table needs {} cells (cap {cap})", other.map_or(alloc::string::String::from("too many"), |c| alloc::format!("{c}"))),
    };
    let aux = spec.aux_pmf();
    let nx = spec.x_alphabet;
    let width = spec.channel.as_ref().map_or(1, |c| c.output_sizes().iter().product());
    let mut pmf = alloc::vec![0.0; cells];
    for (k, &p) in aux.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        let x = spec.input_map[k];
        let base = (k * nx + x) * width;
        match &spec.channel {
            Some(ch) => {
                for (y, &w) in ch.row(x).iter().enumerate() {
                    pmf[base + y] = p * w;
                }
            }
            None => pmf[base] = p,
        }
    }
    JointDistribution::new(universe, pmf)
}

/// Result of [`check_admissible`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdmissibleVerdict {
    /// `H(X | U_F, Q)`.
    pub input_uncertainty: f64,
    /// KL divergence between `p(u_F, q)` and its generation-law factorization.
    pub divergence: f64,
    pub passed: bool,
}

/// Checks that `X` is a function of `(U_F, Q)` and that `p(u_F, q)` factors
/// along the order. A distribution without `Q` is treated as `Q` constant.
pub fn check_admissible(dist: &JointDistribution, order: &Order, tol: f64) -> Result<AdmissibleVerdict> {
    let h = dist.cached();
    let f = order.family();
    let q: Vec<Symbol> = if dist.universe().position(Symbol::Q).is_some() { alloc::vec![Symbol::Q] } else { Vec::new() };
    let u = |idx: &mut dyn Iterator<Item = usize>| -> SymSet {
        SymSet::new(idx.map(|i| Symbol::U(f.label(i))).chain(q.iter().copied()))
    };
    let all = u(&mut (0..f.len()));
    let input_uncertainty = h.entropy(&all.union(&SymSet::new([Symbol::X])))? - h.entropy(&all)?;
    // D(p || Π) = H(Q) + Σ_S H(U_S | U_{↑S∖S}, Q) - H(U_F, Q)
    let mut divergence = h.entropy(&SymSet::new(q.iter().copied()))? - h.entropy(&all)?;
    for i in 0..f.len() {
        let parents = u(&mut order.strict_up_of(i).iter());
        let with = parents.union(&SymSet::new([Symbol::U(f.label(i))]));
        divergence += h.entropy(&with)? - h.entropy(&parents)?;
    }
    Ok(AdmissibleVerdict {
        input_uncertainty,
        divergence,
        passed: input_uncertainty < tol && divergence < tol,
    })
}

/// `U_S` for each label.
pub fn u_set(labels: impl IntoIterator<Item = Label>) -> SymSet {
    SymSet::new(labels.into_iter().map(Symbol::U))
}
