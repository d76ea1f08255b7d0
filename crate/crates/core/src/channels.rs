//! Channel instances: transition tables, degraded cascades and combination
//! networks.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{bail, Result};
use crate::expr::{EntropyAssignment, SymSet, Symbol};
use crate::geometry::lp;
use crate::order::{Family, Label};
use crate::rational::{self, Rational};

/// Row-stochastic `W(y_1..y_K | x)`; each row is row-major over the outputs
/// with `y_1` most significant.
#[derive(Clone, Debug, PartialEq)]
pub struct TabularBC {
    input: usize,
    outputs: Vec<usize>,
    w: Vec<f64>,
}

pub const ROW_TOL: f64 = 1e-12;

impl TabularBC {
    pub fn new(input: usize, outputs: Vec<usize>, w: Vec<f64>) -> Result<TabularBC> {
        if input == 0 || outputs.is_empty() || outputs.iter().any(|&a| a == 0) {
            bail!(Shape, "alphabets must be nonempty and there must be at least one output");
        }
        let width: usize = outputs.iter().product();
        if w.len() != input * width {
            bail!(Shape, "table has {} entries, expected {}", w.len(), input * width);
        }
        for (x, row) in w.chunks(width).enumerate() {
            if row.iter().any(|&p| !(p >= 0.0)) {
                bail!(Domain, "row {x} has a negative or NaN entry");
            }
            let s: f64 = row.iter().sum();
            if libm::fabs(s - 1.0) > ROW_TOL {
                bail!(Domain, "row {x} sums to {s}");
            }
        }
        Ok(TabularBC { input, outputs, w })
    }

    pub fn input_size(&self) -> usize {
        self.input
    }

    pub fn output_sizes(&self) -> &[usize] {
        &self.outputs
    }

    pub fn receivers(&self) -> u8 {
        self.outputs.len() as u8
    }

    /// Entries of the joint output row for input `x`.
    pub fn row(&self, x: usize) -> &[f64] {
        let width: usize = self.outputs.iter().product();
        &self.w[x * width..(x + 1) * width]
    }

    pub fn table(&self) -> &[f64] {
        &self.w
    }

    /// `W_j(y | x)` as an `input × |Y_j|` matrix.
    pub fn marginal(&self, j: u8) -> Result<Vec<Vec<f64>>> {
        if j == 0 || j as usize > self.outputs.len() {
            bail!(Domain, "receiver {j} out of range");
        }
        let j = j as usize - 1;
        let inner: usize = self.outputs[j + 1..].iter().product();
        let size = self.outputs[j];
        let mut out = Vec::with_capacity(self.input);
        for x in 0..self.input {
            let mut m = alloc::vec![0.0; size];
            for (idx, p) in self.row(x).iter().enumerate() {
                m[(idx / inner) % size] += p;
            }
            out.push(m);
        }
        Ok(out)
    }

    /// A channel with independent random rows.
    pub fn random(input: usize, outputs: Vec<usize>, rng: &mut impl Rng) -> TabularBC {
        let width: usize = outputs.iter().product();
        let mut w = Vec::with_capacity(input * width);
        for _ in 0..input {
            w.extend(random_pmf(width, rng));
        }
        TabularBC { input, outputs, w }
    }
}

/// A pmf drawn uniformly from the simplex.
pub fn random_pmf(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n).map(|_| -libm::log(1.0 - rng.gen::<f64>())).collect();
    let s: f64 = v.iter().sum();
    for p in &mut v {
        *p /= s;
    }
    v
}

fn check_stochastic(m: &[Vec<f64>], rows: usize, what: &str) -> Result<usize> {
    if m.len() != rows {
        bail!(Shape, "{what} has {} rows, expected {rows}", m.len());
    }
    let cols = m.first().map_or(0, Vec::len);
    for (i, r) in m.iter().enumerate() {
        let s: f64 = r.iter().sum();
        if r.len() != cols || cols == 0 || r.iter().any(|&p| !(p >= 0.0)) || libm::fabs(s - 1.0) > ROW_TOL {
            bail!(Domain, "{what} row {i} is not a probability vector");
        }
    }
    Ok(cols)
}

/// `x → y_1` by `first`, `y_1 → y_2` by `second`, and optionally further
/// outputs `x → y_k` drawn independently by each matrix in `side`.
pub fn degraded_bc_instance(
    first: &[Vec<f64>],
    second: &[Vec<f64>],
    side: &[Vec<Vec<f64>>],
) -> Result<TabularBC> {
    let input = first.len();
    let y1 = check_stochastic(first, input, "first stage")?;
    let y2 = check_stochastic(second, y1, "second stage")?;
    let mut outputs = alloc::vec![y1, y2];
    for (k, s) in side.iter().enumerate() {
        outputs.push(check_stochastic(s, input, &alloc::format!("side channel {k}"))?);
    }
    let width: usize = outputs.iter().product();
    let mut w = Vec::with_capacity(input * width);
    for x in 0..input {
        for idx in 0..width {
            let mut digits = Vec::with_capacity(outputs.len());
            let mut rest = idx;
            for &a in outputs.iter().rev() {
                digits.push(rest % a);
                rest /= a;
            }
            digits.reverse();
            let mut p = first[x][digits[0]] * second[digits[0]][digits[1]];
            for (k, s) in side.iter().enumerate() {
                p *= s[x][digits[2 + k]];
            }
            w.push(p);
        }
    }
    TabularBC::new(input, outputs, w)
}

/// Binary symmetric channel matrix.
pub fn bsc(p: f64) -> Vec<Vec<f64>> {
    alloc::vec![alloc::vec![1.0 - p, p], alloc::vec![p, 1.0 - p]]
}

/// A stochastic `T` with `W_weak = W_strong · T` within `tol`, if one exists.
pub fn degradedness_certificate(
    chan: &TabularBC,
    strong: u8,
    weak: u8,
    tol: f64,
) -> Result<Option<Vec<Vec<f64>>>> {
    let ws = chan.marginal(strong)?;
    let ww = chan.marginal(weak)?;
    let (a, b) = (ws[0].len(), ww[0].len());
    let n = a * b;
    let var = |i: usize, k: usize| i * b + k;
    let tol = rational::from_f64(tol);
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    let mut rhs: Vec<Rational> = Vec::new();
    let zero_row = || crate::geometry::system::vec_zero(n);
    for i in 0..a {
        for k in 0..b {
            let mut r = zero_row();
            r[var(i, k)] = -rational::one();
            rows.push(r);
            rhs.push(rational::zero());
        }
        let mut r = zero_row();
        for k in 0..b {
            r[var(i, k)] = rational::one();
        }
        rows.push(r.clone());
        rhs.push(rational::one());
        rows.push(r.iter().map(|c| -c.clone()).collect());
        rhs.push(-rational::one());
    }
    for x in 0..chan.input_size() {
        for k in 0..b {
            let mut r = zero_row();
            for i in 0..a {
                r[var(i, k)] = rational::from_f64(ws[x][i]);
            }
            let target = rational::from_f64(ww[x][k]);
            rows.push(r.clone());
            rhs.push(&target + &tol);
            rows.push(r.iter().map(|c| -c.clone()).collect());
            rhs.push(-(&target - &tol));
        }
    }
    Ok(lp::feasible_point(&rows, &rhs, n).map(|t| {
        (0..a).map(|i| (0..b).map(|k| rational::to_f64(&t[var(i, k)])).collect()).collect()
    }))
}

/// Deterministic broadcast channel whose input has one component `V_S` of
/// `c_S` bits per label, seen noiselessly by exactly the receivers in `S`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CombinationNetwork {
    k: u8,
    bits: BTreeMap<Label, u32>,
}

impl CombinationNetwork {
    pub fn new(k: u8, components: impl IntoIterator<Item = (Label, u32)>) -> Result<CombinationNetwork> {
        let mut bits = BTreeMap::new();
        for (l, c) in components {
            if l.max_receiver() > k {
                bail!(Domain, "component {l} mentions a receiver beyond K = {k}");
            }
            if bits.insert(l, c).is_some() {
                bail!(Domain, "component {l} given twice");
            }
        }
        Ok(CombinationNetwork { k, bits })
    }

    pub fn k(&self) -> u8 {
        self.k
    }

    pub fn components(&self) -> &BTreeMap<Label, u32> {
        &self.bits
    }

    pub fn capacity(&self, s: Label) -> u32 {
        self.bits.get(&s).copied().unwrap_or(0)
    }

    /// Exact entropies under independent uniform auxiliaries `U_S = V_S` for
    /// `S ∈ F`, `X` the concatenation, `Q` constant; components outside `F`
    /// are held constant.
    pub fn uniform_aux_entropies(&self, f: &Family) -> Result<CombinationEntropy> {
        for &s in f.labels() {
            if !self.bits.contains_key(&s) {
                bail!(MissingValue, "no component for label {s}");
            }
        }
        if f.k() != self.k {
            bail!(Domain, "family has K = {}, network has K = {}", f.k(), self.k);
        }
        Ok(CombinationEntropy { net: self.clone(), family: f.clone() })
    }

    /// The deterministic transition table, with `X` encoded as the mixed-radix
    /// tuple of the `F` components in family order (first most significant).
    pub fn to_table(&self, f: &Family) -> Result<TabularBC> {
        let sizes: Vec<usize> = f.labels().iter().map(|&s| 1usize << self.capacity(s)).collect();
        let input: usize = sizes.iter().product();
        let outputs: Vec<usize> = (1..=self.k)
            .map(|j| {
                f.labels().iter().filter(|s| s.contains(j)).map(|&s| 1usize << self.capacity(s)).product()
            })
            .collect();
        let width: usize = outputs.iter().product();
        if input.saturating_mul(width) > 1 << 24 {
            bail!(Resource, "combination table would need {input} x {width} entries");
        }
        let mut w = alloc::vec![0.0; input * width];
        for x in 0..input {
            let digits = mixed_radix(x, &sizes);
            let mut idx = 0;
            for (j, &osize) in outputs.iter().enumerate() {
                let mut y = 0;
                for (i, &s) in f.labels().iter().enumerate() {
                    if s.contains(j as u8 + 1) {
                        y = y * sizes[i] + digits[i];
                    }
                }
                idx = idx * osize + y;
            }
            w[x * width + idx] = 1.0;
        }
        TabularBC::new(input, outputs, w)
    }
}

pub(crate) fn mixed_radix(mut v: usize, sizes: &[usize]) -> Vec<usize> {
    let mut d = alloc::vec![0; sizes.len()];
    for i in (0..sizes.len()).rev() {
        d[i] = v % sizes[i];
        v /= sizes[i];
    }
    d
}

/// Analytic entropy assignment of a combination network with uniform
/// auxiliaries: `H(T)` is the total size of the components `T` reveals.
#[derive(Clone, Debug)]
pub struct CombinationEntropy {
    net: CombinationNetwork,
    family: Family,
}

impl CombinationEntropy {
    fn bits(&self, set: &SymSet) -> Result<u64> {
        let mut seen: Vec<Label> = Vec::new();
        for s in set.symbols() {
            match *s {
                Symbol::Q => {}
                Symbol::X => seen.extend(self.family.labels()),
                Symbol::U(l) => {
                    if !self.family.contains(l) {
                        bail!(MissingSymbol, "U_{l} is not an auxiliary of this network");
                    }
                    seen.push(l);
                }
                Symbol::Y(j) => {
                    if j == 0 || j > self.net.k {
                        bail!(MissingSymbol, "Y_{j} is not an output of this network");
                    }
                    seen.extend(self.family.labels().iter().filter(|l| l.contains(j)));
                }
            }
        }
        seen.sort();
        seen.dedup();
        Ok(seen.iter().map(|&l| u64::from(self.net.capacity(l))).sum())
    }
}

impl EntropyAssignment for CombinationEntropy {
    fn entropy(&self, set: &SymSet) -> Result<f64> {
        self.bits(set).map(|b| b as f64)
    }

    fn entropy_rational(&self, set: &SymSet) -> Result<Rational> {
        self.bits(set).map(|b| rational::int(b as i64))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::EntropyExpr;

    fn l(s: &str) -> Label {
        Label::parse(s).unwrap()
    }

    #[test]
    fn cascade_crossover() {
        let c = degraded_bc_instance(&bsc(0.1), &bsc(0.2), &[]).unwrap();
        let y2 = c.marginal(2).unwrap();
        assert!((y2[0][1] - 0.26).abs() < 1e-12);
        let c0 = degraded_bc_instance(&bsc(0.0), &bsc(0.0), &[]).unwrap();
        assert_eq!(c0.marginal(1).unwrap(), c0.marginal(2).unwrap());
        assert_eq!(c0.marginal(1).unwrap(), [[1.0, 0.0], [0.0, 1.0]]);
    }

    #[test]
    fn degraded_certificate_exists() {
        let c = degraded_bc_instance(&bsc(0.1), &bsc(0.2), &[bsc(0.3)]).unwrap();
        let t = degradedness_certificate(&c, 1, 2, 1e-9).unwrap().unwrap();
        assert!((t[0][1] - 0.2).abs() < 1e-6);
        // a noisier receiver cannot be upgraded
        assert!(degradedness_certificate(&c, 2, 1, 1e-9).unwrap().is_none());
    }

    #[test]
    fn shape_errors() {
        assert!(TabularBC::new(2, alloc::vec![2], alloc::vec![1.0, 0.0, 0.5]).is_err());
        assert!(TabularBC::new(1, alloc::vec![2], alloc::vec![0.6, 0.6]).is_err());
        assert!(degraded_bc_instance(&bsc(0.1), &[alloc::vec![1.0]], &[]).is_err());
    }

    #[test]
    fn combination_mutual_information() {
        let net = CombinationNetwork::new(2, [(l("1"), 2), (l("2"), 1), (l("12"), 3)]).unwrap();
        let f = Family::parse(2, &["1", "2", "12"]).unwrap();
        let h = net.uniform_aux_entropies(&f).unwrap();
        let u = |s: &str| Symbol::U(l(s));
        let i = EntropyExpr::mi(&SymSet::new([u("1"), u("12")]), &SymSet::new([Symbol::Y(1)]), &SymSet::empty());
        assert_eq!(i.evaluate_rational(&h).unwrap(), rational::int(5));
        let i = EntropyExpr::mi(&SymSet::new([u("12")]), &SymSet::new([Symbol::Y(1)]), &SymSet::new([u("1")]));
        assert_eq!(i.evaluate_rational(&h).unwrap(), rational::int(3));
        let g = Family::parse(2, &["1", "3"]);
        assert!(g.is_err() || net.uniform_aux_entropies(&g.unwrap()).is_err());
    }

    #[test]
    fn combination_table_is_deterministic() {
        let net = CombinationNetwork::new(2, [(l("1"), 1), (l("12"), 1)]).unwrap();
        let f = Family::parse(2, &["1", "12"]).unwrap();
        let t = net.to_table(&f).unwrap();
        assert_eq!(t.input_size(), 4);
        assert_eq!(t.output_sizes(), &[4, 2]);
        assert!(t.table().iter().all(|&p| p == 0.0 || p == 1.0));
    }
}
