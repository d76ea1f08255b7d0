//! Monte Carlo estimate of the probability that a superposition codebook
//! covers a target joint law.
//!
//! Codewords are generated lazily: the codeword of label `S` under the index
//! tuple of its up-set is a deterministic function of the seed, the trial,
//! `S` and that tuple. Each trial searches a balanced prefix of the index
//! space (at most `search_budget` tuples) for a jointly typical tuple and
//! stops at the first hit. A trial whose search had to be truncated and found
//! nothing counts as a failure, so the estimate is a lower bound.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{bail, Result};
use crate::order::Order;

pub const DEFAULT_SEARCH_BUDGET: u64 = 1 << 20;
pub const DEFAULT_MAX_CODEBOOK_BITS: u32 = 62;
pub const DEFAULT_TUPLE_CAP: u64 = 1 << 20;
const CACHE_BYTES: usize = 64 << 20;
const MASS_TOL: f64 = 1e-9;

/// Joint law of `U_E`, row-major over the alphabets (last label fastest).
#[derive(Clone, Debug, PartialEq)]
pub struct TypicalityTarget {
    alphabets: Vec<usize>,
    pmf: Vec<f64>,
}

impl TypicalityTarget {
    pub fn new(alphabets: Vec<usize>, pmf: Vec<f64>) -> Result<TypicalityTarget> {
        if alphabets.iter().any(|&a| a == 0 || a > 256) {
            bail!(Domain, "alphabet sizes must lie in 1..=256");
        }
        let cells: usize = alphabets.iter().product();
        if pmf.len() != cells {
            bail!(Shape, "target has {} cells, alphabets need {cells}", pmf.len());
        }
        if pmf.iter().any(|p| !p.is_finite() || *p < 0.0) {
            bail!(Domain, "target probabilities must be finite and nonnegative");
        }
        let total: f64 = pmf.iter().sum();
        if libm::fabs(total - 1.0) > MASS_TOL {
            bail!(Domain, "target sums to {total}");
        }
        Ok(TypicalityTarget { alphabets, pmf })
    }

    pub fn alphabets(&self) -> &[usize] {
        &self.alphabets
    }

    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    /// Marginal on the coordinates `keep`, laid out in the order given.
    pub fn marginal(&self, keep: &[usize]) -> Vec<f64> {
        let sizes: Vec<usize> = keep.iter().map(|&i| self.alphabets[i]).collect();
        let mut out = vec![0.0; sizes.iter().product()];
        for (cell, p) in self.pmf.iter().enumerate() {
            let digits = crate::channels::mixed_radix(cell, &self.alphabets);
            out[flat(keep.iter().map(|&i| digits[i]), &sizes)] += p;
        }
        out
    }

    /// Entropy in bits of the marginal on `keep`.
    pub fn entropy(&self, keep: &[usize]) -> f64 {
        self.marginal(keep).iter().filter(|p| **p > 0.0).map(|p| -p * libm::log2(*p)).sum()
    }
}

fn flat(digits: impl Iterator<Item = usize>, sizes: &[usize]) -> usize {
    digits.zip(sizes).fold(0, |acc, (d, s)| acc * s + d)
}

/// Robust typicality: every cell frequency is within `(1 ± eps)` of its
/// probability, and zero-probability cells never occur.
fn typical(words: &[&[u8]], sizes: &[usize], pmf: &[f64], eps: f64, counts: &mut Vec<u32>) -> bool {
    let n = words[0].len();
    counts.clear();
    counts.resize(pmf.len(), 0);
    for t in 0..n {
        let c = flat(words.iter().map(|w| w[t] as usize), sizes);
        if pmf[c] == 0.0 {
            return false;
        }
        counts[c] += 1;
    }
    counts.iter().zip(pmf).all(|(&k, &p)| libm::fabs(k as f64 / n as f64 - p) <= eps * p)
}

/// Parameters of a covering experiment.
#[derive(Clone, Debug)]
pub struct CoveringExperiment {
    pub order: Order,
    pub target: TypicalityTarget,
    /// Excess rate per label, in family order.
    pub rates: Vec<f64>,
    pub n: usize,
    pub epsilon: f64,
    pub trials: usize,
    pub seed: u64,
    pub search_budget: u64,
    pub max_codebook_bits: u32,
}

impl CoveringExperiment {
    pub fn new(order: Order, target: TypicalityTarget, rates: Vec<f64>, n: usize) -> CoveringExperiment {
        CoveringExperiment {
            order,
            target,
            rates,
            n,
            epsilon: 0.1,
            trials: 500,
            seed: 0,
            search_budget: DEFAULT_SEARCH_BUDGET,
            max_codebook_bits: DEFAULT_MAX_CODEBOOK_BITS,
        }
    }

    /// `ceil(n r_S)` per label.
    pub fn codebook_bits(&self) -> Result<Vec<u32>> {
        let mut out = Vec::with_capacity(self.rates.len());
        for (i, r) in self.rates.iter().enumerate() {
            let b = libm::ceil(self.n as f64 * r - 1e-9).max(0.0);
            if b > self.max_codebook_bits as f64 {
                bail!(
                    Resource,
                    "codebook of {} needs 2^{b} codewords (cap 2^{})",
                    self.order.family().label(i),
                    self.max_codebook_bits
                );
            }
            out.push(b as u32);
        }
        Ok(out)
    }

    fn validate(&self) -> Result<()> {
        let m = self.order.family().len();
        if self.target.alphabets.len() != m {
            bail!(Shape, "target has {} coordinates, family has {m} labels", self.target.alphabets.len());
        }
        if self.rates.len() != m {
            bail!(Shape, "{} rates for {m} labels", self.rates.len());
        }
        if self.rates.iter().any(|r| !r.is_finite() || *r < 0.0) {
            bail!(Domain, "rates must be finite and nonnegative");
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            bail!(Domain, "epsilon must lie in (0, 1)");
        }
        if self.n == 0 || self.trials == 0 {
            bail!(Domain, "block length and trial count must be positive");
        }
        if self.search_budget == 0 {
            bail!(Domain, "search budget must be positive");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoveringResult {
    pub estimate: f64,
    pub half_width: f64,
    pub lower: f64,
    pub upper: f64,
    pub successes: usize,
    pub trials: usize,
    /// Failed trials whose search covered only part of the index space.
    pub truncated: usize,
    pub n: usize,
    pub seed: u64,
    /// Index bits actually searched per label.
    pub searched_bits: Vec<u32>,
}

/// Wilson score interval; returns `(center, half_width)`.
pub fn wilson_interval(successes: usize, trials: usize, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.5, 0.5);
    }
    let t = trials as f64;
    let p = successes as f64 / t;
    let z2 = z * z;
    let denom = 1.0 + z2 / t;
    let center = (p + z2 / (2.0 * t)) / denom;
    let hw = z * libm::sqrt(p * (1.0 - p) / t + z2 / (4.0 * t * t)) / denom;
    (center, hw)
}

/// Spread `total` bits over the labels, never exceeding a label's own width.
fn balanced_box(bits: &[u32], total: u32) -> Vec<u32> {
    let mut out = vec![0u32; bits.len()];
    let mut left = total;
    while left > 0 {
        let pick = (0..bits.len()).filter(|&i| out[i] < bits[i]).min_by_key(|&i| (out[i], i));
        match pick {
            Some(i) => {
                out[i] += 1;
                left -= 1;
            }
            None => break,
        }
    }
    out
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// One generation step: label `label` drawn given the symbols of `parents`.
struct Stage {
    label: usize,
    parents: Vec<usize>,
    parent_sizes: Vec<usize>,
    /// Cumulative conditional law, one row per parent configuration.
    cdf: Vec<Vec<f64>>,
    /// Marginal of the labels generated so far (this one included).
    prefix_sizes: Vec<usize>,
    prefix_pmf: Vec<f64>,
}

struct Plan {
    stages: Vec<Stage>,
    /// For each stage, the stage positions of its ancestors and itself in
    /// family-index order (the codeword key).
    keys: Vec<Vec<usize>>,
}

fn plan(exp: &CoveringExperiment) -> Plan {
    let order = &exp.order;
    let m = order.family().len();
    let mut seq: Vec<usize> = (0..m).collect();
    // larger down-sets first puts every ancestor before its descendants
    seq.sort_by_key(|&i| (core::cmp::Reverse(order.down_of(i).len()), i));
    let pos_of = |i: usize| seq.iter().position(|&s| s == i).expect("label in sequence");
    let mut stages = Vec::with_capacity(m);
    let mut keys = Vec::with_capacity(m);
    for (d, &label) in seq.iter().enumerate() {
        let parents: Vec<usize> = order.strict_up_of(label).iter().collect();
        let parent_sizes: Vec<usize> = parents.iter().map(|&p| exp.target.alphabets[p]).collect();
        let mut keep = parents.clone();
        keep.push(label);
        let joint = exp.target.marginal(&keep);
        let a = exp.target.alphabets[label];
        let configs: usize = parent_sizes.iter().product();
        let cdf = (0..configs)
            .map(|c| {
                let row = &joint[c * a..(c + 1) * a];
                let mass: f64 = row.iter().sum();
                let mut acc = 0.0;
                row.iter()
                    .map(|p| {
                        acc += if mass > 0.0 { p / mass } else { 1.0 / a as f64 };
                        acc
                    })
                    .collect()
            })
            .collect();
        let prefix: Vec<usize> = seq[..=d].to_vec();
        let prefix_sizes = prefix.iter().map(|&i| exp.target.alphabets[i]).collect();
        let prefix_pmf = exp.target.marginal(&prefix);
        let mut key: Vec<usize> = order.up_of(label).iter().collect();
        key.sort_unstable();
        keys.push(key.iter().map(|&i| pos_of(i)).collect());
        stages.push(Stage { label, parents, parent_sizes, cdf, prefix_sizes, prefix_pmf });
    }
    Plan { stages, keys }
}

struct Trial<'a> {
    exp: &'a CoveringExperiment,
    plan: &'a Plan,
    trial: u64,
    widths: Vec<u64>,
    chosen: Vec<u64>,
    words: Vec<Vec<u8>>,
    cache: BTreeMap<(usize, Vec<u64>), Vec<u8>>,
    cached_bytes: usize,
    counts: Vec<u32>,
}

impl Trial<'_> {
    fn codeword(&mut self, depth: usize) -> Vec<u8> {
        let key: Vec<u64> = self.plan.keys[depth].iter().map(|&p| self.chosen[p]).collect();
        let ck = (depth, key);
        if let Some(w) = self.cache.get(&ck) {
            return w.clone();
        }
        let plan = self.plan;
        let st = &plan.stages[depth];
        let mut h = splitmix(self.exp.seed);
        h = splitmix(h ^ self.trial);
        h = splitmix(h ^ st.label as u64);
        for &i in &ck.1 {
            h = splitmix(h ^ i);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(h);
        let parent_words: Vec<usize> = st
            .parents
            .iter()
            .map(|p| plan.stages.iter().position(|s| s.label == *p).expect("parent stage"))
            .collect();
        let w: Vec<u8> = (0..self.exp.n)
            .map(|t| {
                let c = flat(parent_words.iter().map(|&d| self.words[d][t] as usize), &st.parent_sizes);
                let row = &st.cdf[c];
                let x: f64 = rng.gen();
                row.iter().position(|&v| x < v).unwrap_or(row.len() - 1) as u8
            })
            .collect();
        if self.cached_bytes + w.len() <= CACHE_BYTES {
            self.cached_bytes += w.len();
            self.cache.insert(ck, w.clone());
        }
        w
    }

    fn search(&mut self, depth: usize) -> bool {
        if depth == self.plan.stages.len() {
            return true;
        }
        for idx in 0..self.widths[depth] {
            self.chosen[depth] = idx;
            let w = self.codeword(depth);
            self.words[depth] = w;
            let plan = self.plan;
            let st = &plan.stages[depth];
            let refs: Vec<&[u8]> = self.words[..=depth].iter().map(|w| w.as_slice()).collect();
            if typical(&refs, &st.prefix_sizes, &st.prefix_pmf, self.exp.epsilon, &mut self.counts)
                && self.search(depth + 1)
            {
                return true;
            }
        }
        false
    }
}

/// Runs the experiment; deterministic in `exp.seed`.
pub fn run_covering(exp: &CoveringExperiment) -> Result<CoveringResult> {
    exp.validate()?;
    let bits = exp.codebook_bits()?;
    let plan = plan(exp);
    let budget_bits = 63 - exp.search_budget.leading_zeros();
    let full: u32 = bits.iter().sum();
    let searched = balanced_box(&bits, budget_bits.min(full));
    let truncated_search = searched != bits;
    let widths: Vec<u64> = plan.stages.iter().map(|s| 1u64 << searched[s.label]).collect();
    let m = plan.stages.len();

    let mut successes = 0;
    let mut truncated = 0;
    for trial in 0..exp.trials {
        let mut t = Trial {
            exp,
            plan: &plan,
            trial: trial as u64,
            widths: widths.clone(),
            chosen: vec![0; m],
            words: vec![Vec::new(); m],
            cache: BTreeMap::new(),
            cached_bytes: 0,
            counts: Vec::new(),
        };
        if t.search(0) {
            successes += 1;
        } else if truncated_search {
            truncated += 1;
        }
    }
    let (center, half_width) = wilson_interval(successes, exp.trials, 1.96);
    Ok(CoveringResult {
        estimate: successes as f64 / exp.trials as f64,
        half_width,
        lower: (center - half_width).max(0.0),
        upper: (center + half_width).min(1.0),
        successes,
        trials: exp.trials,
        truncated,
        n: exp.n,
        seed: exp.seed,
        searched_bits: searched,
    })
}

/// The codewords of one index tuple (indices and output in family order),
/// exactly as trial `trial` of `exp` would generate them.
pub fn draw_tuple(exp: &CoveringExperiment, trial: u64, indices: &[u64]) -> Result<Vec<Vec<u8>>> {
    exp.validate()?;
    let plan = plan(exp);
    let m = plan.stages.len();
    if indices.len() != m {
        bail!(Shape, "{} indices for {m} labels", indices.len());
    }
    let mut t = Trial {
        exp,
        plan: &plan,
        trial,
        widths: vec![0; m],
        chosen: plan.stages.iter().map(|s| indices[s.label]).collect(),
        words: vec![Vec::new(); m],
        cache: BTreeMap::new(),
        cached_bytes: 0,
        counts: Vec::new(),
    };
    for d in 0..m {
        t.words[d] = t.codeword(d);
    }
    let mut out = vec![Vec::new(); m];
    for (d, st) in plan.stages.iter().enumerate() {
        out[st.label] = core::mem::take(&mut t.words[d]);
    }
    Ok(out)
}

/// Whether some tuple `(c_0[i_0], c_1[i_1], ...)` of independent codebooks
/// is jointly `eps`-typical for `target`.
pub fn exhaustive_joint_typicality(
    codebooks: &[Vec<Vec<u8>>],
    target: &TypicalityTarget,
    eps: f64,
    tuple_cap: u64,
) -> Result<bool> {
    if codebooks.len() != target.alphabets.len() {
        bail!(Shape, "{} codebooks for {} coordinates", codebooks.len(), target.alphabets.len());
    }
    let mut total: u64 = 1;
    for c in codebooks {
        total = total.saturating_mul(c.len() as u64);
    }
    if total > tuple_cap {
        bail!(Resource, "{total} codeword tuples exceed the cap {tuple_cap}");
    }
    if total == 0 {
        return Ok(false);
    }
    let n = codebooks[0][0].len();
    for (j, c) in codebooks.iter().enumerate() {
        for w in c {
            if w.len() != n {
                bail!(Shape, "codeword lengths differ");
            }
            if w.iter().any(|&s| s as usize >= target.alphabets[j]) {
                bail!(Domain, "codeword symbol outside the alphabet of coordinate {j}");
            }
        }
    }
    let prefixes: Vec<(Vec<usize>, Vec<f64>)> = (0..codebooks.len())
        .map(|d| {
            let keep: Vec<usize> = (0..=d).collect();
            (keep.iter().map(|&i| target.alphabets[i]).collect(), target.marginal(&keep))
        })
        .collect();
    let mut stack: Vec<&[u8]> = Vec::with_capacity(codebooks.len());
    let mut counts = Vec::new();
    Ok(exhaustive_step(codebooks, &prefixes, eps, &mut stack, &mut counts))
}

fn exhaustive_step<'a>(
    codebooks: &'a [Vec<Vec<u8>>],
    prefixes: &[(Vec<usize>, Vec<f64>)],
    eps: f64,
    stack: &mut Vec<&'a [u8]>,
    counts: &mut Vec<u32>,
) -> bool {
    let d = stack.len();
    if d == codebooks.len() {
        return true;
    }
    for w in &codebooks[d] {
        stack.push(w);
        let (sizes, pmf) = &prefixes[d];
        if typical(stack, sizes, pmf, eps, counts) && exhaustive_step(codebooks, prefixes, eps, stack, counts) {
            return true;
        }
        stack.pop();
    }
    false
}
