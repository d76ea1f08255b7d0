//! End-to-end acceptance suite: one line per criterion, nonzero exit if any
//! fails. Reference values are built here independently of the pipelines
//! under test: entropies come from a direct marginalization of the joint
//! pmf, reference regions are written out by hand.

use std::cell::RefCell;
use std::collections::HashMap;
use std::process::ExitCode;
use std::time::Instant;

use groupcast::demos::chain_spec;
use groupcast::instances::{self, label};
use groupcast_core::covering::{run_covering, CoveringExperiment, TypicalityTarget};
use groupcast_core::geometry::{
    contrapolymatroid_check, fm_eliminate, polymatroid_check, region_equal, remove_redundant, FmOptions,
    InequalitySystem, Pruning, Var,
};
use groupcast_core::info::{AdmissibleSpec, AuxLaw, JointDistribution};
use groupcast_core::rational::{self, Rational};
use groupcast_core::region::{
    gamma, receiver_polyhedron, receiver_polyhedron_all_subsets, split_region, split_system,
    cone_region, binning_aux_vars, binning_system, BinningOptions, ProblemSpec,
};
use groupcast_core::{EntropyAssignment, EntropyExpr, Family, Label, LabelSet, Order, SymSet, Symbol};
use rand::seq::SliceRandom;
use rand::Rng;

type Outcome = Result<String, String>;

/// Entropies by brute-force marginalization of the joint table.
struct Oracle {
    symbols: Vec<Symbol>,
    alphabets: Vec<usize>,
    pmf: Vec<f64>,
    memo: RefCell<HashMap<SymSet, f64>>,
}

impl Oracle {
    fn new(d: &JointDistribution) -> Oracle {
        Oracle {
            symbols: d.universe().symbols().to_vec(),
            alphabets: d.universe().alphabets().to_vec(),
            pmf: d.pmf().to_vec(),
            memo: RefCell::new(HashMap::new()),
        }
    }

    fn h(&self, symbols: &[Symbol]) -> f64 {
        self.entropy(&SymSet::new(symbols.iter().copied())).expect("symbols present")
    }

    fn mi(&self, a: &[Symbol], b: &[Symbol], c: &[Symbol]) -> f64 {
        let cat = |x: &[Symbol], y: &[Symbol]| -> Vec<Symbol> { x.iter().chain(y).copied().collect() };
        self.h(&cat(a, c)) + self.h(&cat(b, c)) - self.h(&cat(&cat(a, b), c)) - self.h(c)
    }
}

impl EntropyAssignment for Oracle {
    fn entropy(&self, set: &SymSet) -> groupcast_core::Result<f64> {
        if let Some(v) = self.memo.borrow().get(set) {
            return Ok(*v);
        }
        let mut pos = Vec::new();
        for s in set.symbols() {
            match self.symbols.iter().position(|t| t == s) {
                Some(p) => pos.push(p),
                None => return Err(groupcast_core::Error::MissingSymbol(set.key())),
            }
        }
        let mut marg: HashMap<Vec<usize>, f64> = HashMap::new();
        for (cell, &p) in self.pmf.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let mut digits = vec![0; self.alphabets.len()];
            let mut rest = cell;
            for i in (0..self.alphabets.len()).rev() {
                digits[i] = rest % self.alphabets[i];
                rest /= self.alphabets[i];
            }
            *marg.entry(pos.iter().map(|&i| digits[i]).collect()).or_insert(0.0) += p;
        }
        let v = marg.values().filter(|p| **p > 0.0).map(|p| -p * p.log2()).sum();
        self.memo.borrow_mut().insert(set.clone(), v);
        Ok(v)
    }
}

fn u(labels: &[&str]) -> Vec<Symbol> {
    labels.iter().map(|s| Symbol::U(label(s))).collect()
}

fn one() -> Rational {
    rational::one()
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn exact() -> FmOptions {
    FmOptions { pruning: Pruning::Exact, ..FmOptions::default() }
}

fn criterion1() -> Outcome {
    let (net, f) = instances::combination3().map_err(err)?;
    let spec = ProblemSpec::new(f.clone(), Order::inclusion(f.clone()), false).map_err(err)?;
    let h = net.uniform_aux_entropies(&f).map_err(err)?;
    let bound = split_system(&spec).map_err(err)?.bind(&h).map_err(err)?;
    let projected = fm_eliminate(&bound, &spec.split_vars(), &exact()).map_err(err)?;
    let region = remove_redundant(&projected, None, 0.0).map_err(err)?;
    let n = region.count_non_nonneg();
    let msg = format!("{n} inequalities beyond nonnegativity (expected 15)");
    if n == 15 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

/// The two-user region with `E = {1, 2, 12}` under inclusion, transcribed.
fn two_user_reference() -> InequalitySystem {
    let r = |s: &str| Var::Rate(label(s));
    let q = [Symbol::Q];
    let y = |j| SymSet::new([Symbol::Y(j)]);
    let set = |xs: &[Symbol]| SymSet::new(xs.iter().copied());
    let mi = |a: &[Symbol], j: u8, c: &[Symbol]| EntropyExpr::mi(&set(a), &y(j), &set(c));
    let with_q = |xs: Vec<Symbol>| -> Vec<Symbol> { xs.into_iter().chain(q).collect() };
    let a1 = mi(&u(&["1", "12"]), 1, &q);
    let a2 = mi(&u(&["2", "12"]), 2, &q);
    let b1 = mi(&u(&["1"]), 1, &with_q(u(&["12"])));
    let b2 = mi(&u(&["2"]), 2, &with_q(u(&["12"])));
    let mut sys = InequalitySystem::new([r("1"), r("2"), r("12")]).unwrap();
    let all = [(r("1"), one()), (r("2"), one()), (r("12"), one())];
    sys.push_le(&[(r("1"), one()), (r("12"), one())], a1.clone(), "").unwrap();
    sys.push_le(&[(r("2"), one()), (r("12"), one())], a2.clone(), "").unwrap();
    sys.push_le(&all, a2.plus(&b1), "").unwrap();
    sys.push_le(&all, b2.plus(&a1), "").unwrap();
    for v in ["1", "2", "12"] {
        sys.push_nonneg(r(v)).unwrap();
    }
    sys
}

fn criterion2() -> Outcome {
    let f = Family::parse(2, &["1", "2", "12"]).map_err(err)?;
    let spec = ProblemSpec::new(f.clone(), Order::inclusion(f), true).map_err(err)?;
    let projected = split_region(&spec, &FmOptions::default()).map_err(err)?;
    let reference = two_user_reference();
    let mut rng = instances::rng(0x2_0015);
    for i in 0..20 {
        let q = rng.gen_range(1..=3);
        let x = rng.gen_range(2..=3);
        let (_, dist) = instances::random_instance(spec.order(), q, 3, x, 3, &mut rng).map_err(err)?;
        let oracle = Oracle::new(&dist);
        let v = region_equal(&projected, &reference, Some(&oracle), 1e-9).map_err(err)?;
        if !v.is_equal() {
            return Err(format!("instance {i}: {v:?}"));
        }
    }
    Ok("20 random inputs: projection equals the transcribed region".into())
}

/// `(coefficients on Rhat_1, Rhat_13, Rhat_123; bound)`, written out.
fn chain_reference() -> Vec<([i64; 3], EntropyExpr)> {
    let set = |xs: Vec<Symbol>| SymSet::new(xs);
    let y = |j| set(vec![Symbol::Y(j)]);
    vec![
        ([1, 0, 0], EntropyExpr::mi(&set(u(&["1"])), &y(1), &set(u(&["13", "123"])))),
        ([1, 1, 0], EntropyExpr::mi(&set(u(&["1", "13"])), &y(1), &set(u(&["123"])))),
        ([1, 1, 1], EntropyExpr::mi(&set(u(&["1", "13", "123"])), &y(1), &SymSet::empty())),
        ([0, 0, 1], EntropyExpr::mi(&set(u(&["123"])), &y(2), &SymSet::empty())),
        ([0, 1, 0], EntropyExpr::mi(&set(u(&["13"])), &y(3), &set(u(&["123"])))),
        ([0, 1, 1], EntropyExpr::mi(&set(u(&["13", "123"])), &y(3), &SymSet::empty())),
    ]
}

fn vertices(sys: &InequalitySystem) -> Vec<(f64, f64)> {
    let rows: Vec<(f64, f64, f64)> = sys
        .rows()
        .iter()
        .map(|r| {
            let f = |i: usize| rational::to_f64(&r.coeffs[i]);
            (f(0), f(1), rational::to_f64(r.rhs.constant_part()))
        })
        .collect();
    let mut out = Vec::new();
    for (i, a) in rows.iter().enumerate() {
        for b in &rows[i + 1..] {
            let det = a.0 * b.1 - a.1 * b.0;
            if det.abs() < 1e-12 {
                continue;
            }
            let x = (a.2 * b.1 - a.1 * b.2) / det;
            let y = (a.0 * b.2 - a.2 * b.0) / det;
            if rows.iter().all(|r| r.0 * x + r.1 * y <= r.2 + 1e-9) {
                out.push((x, y));
            }
        }
    }
    out
}

fn criterion3() -> Outcome {
    let spec = chain_spec().map_err(err)?;
    let order = [Var::Hat(label("1")), Var::Hat(label("13")), Var::Hat(label("123"))];
    let mut emitted: Vec<([i64; 3], EntropyExpr)> = Vec::new();
    for j in 1..=3 {
        let p = receiver_polyhedron(&spec, j).map_err(err)?;
        for r in p.rows() {
            if p.nonneg_var(r).is_some() {
                continue;
            }
            let mut c = [0i64; 3];
            for (k, v) in order.iter().enumerate() {
                let x = p.coeff(p.rows().iter().position(|s| s == r).unwrap(), *v);
                c[k] = if x == one() { 1 } else if x == Rational::default() { 0 } else { 99 };
            }
            emitted.push((c, r.rhs.clone()));
        }
    }
    let expected = chain_reference();
    if emitted.len() != 6 || expected.iter().any(|e| !emitted.contains(e)) {
        return Err(format!("receiver rows differ from the six expected rows: {emitted:?}"));
    }

    let mut checked = 0;
    for seed in 0..5u64 {
        let (ch, dist) = instances::chain_instance(1000 + seed).map_err(err)?;
        let channel = ch.channel.as_ref().unwrap();
        if groupcast_core::channels::degradedness_certificate(channel, 1, 2, 1e-9).map_err(err)?.is_none() {
            return Err(format!("seed {seed}: Y_2 is not degraded with respect to Y_1"));
        }
        let o = Oracle::new(&dist);
        let mut sys = split_system(&spec).map_err(err)?;
        // the construction uses only the splits 1->1, 1->13 and 123->123
        sys.push_eq(&[(Var::Split(label("1"), label("123")), one())], EntropyExpr::zero(), "").map_err(err)?;
        let projected = fm_eliminate(&sys.bind(&o).map_err(err)?, &spec.split_vars(), &exact()).map_err(err)?;
        let region = remove_redundant(&projected, None, 1e-12).map_err(err)?;
        let i1 = region.index_of(Var::Rate(label("1"))).ok_or("R_1 missing")?;
        let uu = u(&["123"]);
        let vv = u(&["13"]);
        let x = [Symbol::X];
        let y = |j| [Symbol::Y(j)];
        let b16a = o.mi(&uu, &y(2), &[]).min(o.mi(&vv, &y(3), &[]));
        let b16b = o.mi(&x, &y(1), &uu);
        let b16c = o.mi(&vv, &y(3), &[]) + o.mi(&x, &y(1), &vv);
        let b17 = o.mi(&x, &y(1), &vv) + o.mi(&vv, &y(3), &uu);
        let vs = vertices(&region);
        if vs.len() < 3 {
            return Err(format!("seed {seed}: degenerate region with {} vertices", vs.len()));
        }
        for p in vs {
            let (r1, r123) = if i1 == 0 { (p.0, p.1) } else { (p.1, p.0) };
            let tol = 1e-9;
            if r123 > b16a + tol || r1 > b16b + tol || r1 + r123 > b16c + tol || r1 > b17 + tol {
                return Err(format!("seed {seed}: vertex ({r1}, {r123}) violates the outer bounds"));
            }
            checked += 1;
        }
    }
    Ok(format!("six receiver rows match; {checked} vertices of 5 degraded instances satisfy the bounds"))
}

/// Random `K <= 3` problem: `E`, `F ⊇ E` with at most four labels, an order
/// drawn from inclusion, discrete, or a random inclusion-compatible relation.
fn random_problem(rng: &mut impl Rng) -> ProblemSpec {
    loop {
        let k = rng.gen_range(2..=3u8);
        let all = Family::full(k).unwrap();
        let mut labels: Vec<Label> = all.labels().to_vec();
        labels.shuffle(rng);
        let nf = rng.gen_range(2..=4.min(labels.len()));
        let f_labels: Vec<Label> = labels[..nf].to_vec();
        let ne = rng.gen_range(1..=nf.min(3));
        let e_labels: Vec<Label> = f_labels[..ne].to_vec();
        let Ok(f) = Family::new(k, f_labels.clone()) else { continue };
        // every receiver needs a nonempty window
        if (1..=k).any(|j| !f.labels().iter().any(|l| l.contains(j))) {
            continue;
        }
        let e = Family::new(k, e_labels).unwrap();
        let order = match rng.gen_range(0..3) {
            0 => Order::inclusion(f),
            1 => Order::discrete(f),
            _ => {
                let mut pairs = Vec::new();
                for &a in f.labels() {
                    for &b in f.labels() {
                        if a.is_proper_subset(b) && rng.gen_bool(0.5) {
                            pairs.push((a, b));
                        }
                    }
                }
                Order::explicit(f, &pairs).unwrap()
            }
        };
        return ProblemSpec::new(e, order, rng.gen_bool(0.5)).unwrap();
    }
}

fn criterion4() -> Outcome {
    let mut rng = instances::rng(0x4_0001);
    let opts = FmOptions::default();
    for i in 0..30 {
        let spec = random_problem(&mut rng);
        let q = if spec.time_sharing { 2 } else { 1 };
        let (_, dist) = instances::random_instance(spec.order(), q, 2, 3, 2, &mut rng).map_err(err)?;
        let o = Oracle::new(&dist);
        let a = split_region(&spec, &opts).map_err(err)?;
        let b = cone_region(&spec, &opts).map_err(err)?;
        let v = region_equal(&a, &b, Some(&o), 1e-9).map_err(err)?;
        if !v.is_equal() {
            return Err(format!("instance {i} (E = {}, F = {}): {v:?}", spec.e(), spec.f()));
        }
    }
    Ok("30 random instances: split projection equals the cone-sum region".into())
}

fn criterion5() -> Outcome {
    let mut rng = instances::rng(0x5_0001);
    for i in 0..50 {
        let spec = random_problem(&mut rng);
        let q = if spec.time_sharing { 2 } else { 1 };
        let (_, dist) = instances::random_instance(spec.order(), q, 3, 3, 3, &mut rng).map_err(err)?;
        let o = Oracle::new(&dist);
        let f = spec.f();
        let qs: Vec<Symbol> = if spec.time_sharing { vec![Symbol::Q] } else { vec![] };
        for j in 1..=spec.k() {
            let w = f.window_set(j).map_err(err)?;
            let lattice = spec.order().down_sets(w).map_err(err)?;
            let rank = |b: LabelSet| -> Option<f64> {
                let ub: Vec<Symbol> = f.labels_of(b).into_iter().map(Symbol::U).collect();
                let mut rest: Vec<Symbol> = f.labels_of(w.difference(b)).into_iter().map(Symbol::U).collect();
                rest.extend(&qs);
                Some(o.mi(&ub, &[Symbol::Y(j)], &rest))
            };
            let v = polymatroid_check(&lattice, &rank, 1e-9).map_err(err)?;
            if !v.passed() {
                return Err(format!("instance {i}, receiver {j}: {:?}", v.violations));
            }
        }
    }
    for i in 0..50 {
        let spec = random_problem(&mut rng);
        let order = spec.order().clone();
        let sizes: Vec<usize> = (0..order.family().len()).map(|_| rng.gen_range(2..=3)).collect();
        let cells: usize = sizes.iter().product();
        let pmf = groupcast_core::channels::random_pmf(cells, &mut rng);
        let target = AdmissibleSpec {
            order: order.clone(),
            q_pmf: vec![1.0],
            aux: AuxLaw::Joint { alphabets: sizes, pmf },
            x_alphabet: 1,
            input_map: vec![0; cells],
            channel: None,
        };
        let dist = groupcast_core::info::assemble_joint(&target).map_err(err)?;
        let o = Oracle::new(&dist);
        let lattice = order.up_sets(order.family().all()).map_err(err)?;
        let g = |s: LabelSet| gamma(&o, &order, s).ok();
        let v = contrapolymatroid_check(&lattice, &g, 1e-9).map_err(err)?;
        if !v.passed() {
            return Err(format!("target {i}: {:?}", v.violations));
        }
    }
    Ok("receiver rank functions are polymatroids (50 inputs); gamma is a contra-polymatroid (50 targets)".into())
}

fn criterion6() -> Outcome {
    let e = Family::parse(2, &["1", "2"]).map_err(err)?;
    let spec = ProblemSpec::new(e.clone(), Order::discrete(e), false).map_err(err)?;
    let system = binning_system(&spec, &BinningOptions::default()).map_err(err)?;
    let mut rng = instances::rng(0x6_0001);
    for i in 0..10 {
        let (_, dist) = instances::marton_instance(3, 0.3, &mut rng).map_err(err)?;
        let o = Oracle::new(&dist);
        let (u1, u2) = (u(&["1"]), u(&["2"]));
        let i1 = o.mi(&u1, &[Symbol::Y(1)], &[]);
        let i2 = o.mi(&u2, &[Symbol::Y(2)], &[]);
        let i12 = o.mi(&u1, &u2, &[]);
        if i1 + i2 - i12 <= 1e-6 || i12 <= 1e-6 {
            return Err(format!("instance {i} is degenerate (I1 + I2 - I12 = {})", i1 + i2 - i12));
        }
        let (r1, r2) = (Var::Rate(label("1")), Var::Rate(label("2")));
        let c = |x: f64| EntropyExpr::constant(rational::from_f64(x));
        let mut marton = InequalitySystem::new([r1, r2]).map_err(err)?;
        marton.push_le(&[(r1, one())], c(i1), "").map_err(err)?;
        marton.push_le(&[(r2, one())], c(i2), "").map_err(err)?;
        marton.push_le(&[(r1, one()), (r2, one())], c(i1 + i2 - i12), "").map_err(err)?;
        marton.push_nonneg(r1).map_err(err)?;
        marton.push_nonneg(r2).map_err(err)?;
        let projected =
            fm_eliminate(&system.bind(&o).map_err(err)?, &binning_aux_vars(&spec), &exact()).map_err(err)?;
        let v = region_equal(&projected, &marton, None, 1e-9).map_err(err)?;
        if !v.is_equal() {
            return Err(format!("instance {i}: {v:?}"));
        }
    }
    Ok("10 dependent (U_1, U_2) instances: binning region equals Marton's region".into())
}

fn criterion7() -> Outcome {
    let target = TypicalityTarget::new(vec![2, 2], vec![0.3, 0.2, 0.2, 0.3]).map_err(err)?;
    let h = |p: &[f64]| -> f64 { p.iter().map(|x| -x * x.log2()).sum() };
    let i = h(&[0.5, 0.5]) + h(&[0.5, 0.5]) - h(&[0.3, 0.2, 0.2, 0.3]);
    let order = Order::discrete(Family::parse(2, &["1", "2"]).map_err(err)?);
    let r = (i + 0.2) / 2.0;
    let run = |n: usize, rate: f64| {
        let mut exp = CoveringExperiment::new(order.clone(), target.clone(), vec![rate, rate], n);
        exp.trials = 500;
        exp.seed = 20_241;
        run_covering(&exp)
    };
    let mut ests = Vec::new();
    for n in [50, 100, 200] {
        ests.push(run(n, r).map_err(err)?);
    }
    let again = run(200, r).map_err(err)?;
    let below = run(200, (i - 0.2).max(0.0) / 2.0).map_err(err)?;
    let line = format!(
        "I = {i:.4}; success at n = 50/100/200: {:.3}/{:.3}/{:.3} (+-{:.3}); below threshold: {:.3}",
        ests[0].estimate, ests[1].estimate, ests[2].estimate, ests[2].half_width, below.estimate
    );
    if ests[2].estimate < 0.9 {
        return Err(format!("{line}; n = 200 below 0.9"));
    }
    for w in ests.windows(2) {
        if w[1].estimate + w[1].half_width + w[0].half_width < w[0].estimate {
            return Err(format!("{line}; estimate decreased beyond the half-widths"));
        }
    }
    if again != ests[2] {
        return Err(format!("{line}; rerun with the same seed differs"));
    }
    if below.estimate + below.half_width + ests[2].half_width >= ests[2].estimate {
        return Err(format!("{line}; below-threshold run is not markedly lower"));
    }
    Ok(line)
}

fn criterion8() -> Outcome {
    let mut rng = instances::rng(0x8_0001);
    for i in 0..20 {
        let spec = random_problem(&mut rng);
        let q = if spec.time_sharing { 2 } else { 1 };
        let (_, dist) = instances::random_instance(spec.order(), q, 2, 3, 3, &mut rng).map_err(err)?;
        let o = Oracle::new(&dist);
        for j in 1..=spec.k() {
            let all = receiver_polyhedron_all_subsets(&spec, j).map_err(err)?;
            let down = receiver_polyhedron(&spec, j).map_err(err)?;
            let v = region_equal(&all, &down, Some(&o), 1e-9).map_err(err)?;
            if !v.is_equal() {
                return Err(format!("instance {i}, receiver {j}: {v:?}"));
            }
        }
    }
    Ok("20 random instances: every-subset and down-set receiver systems coincide".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("combination network facet count", criterion1),
        ("two-user projection", criterion2),
        ("Nair-El Gamal structure", criterion3),
        ("split projection vs cone sum", criterion4),
        ("polymatroid / contra-polymatroid", criterion5),
        ("Marton specialization", criterion6),
        ("covering simulation", criterion7),
        ("redundancy equivalence", criterion8),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("criterion {}: PASS [{name}] {msg} ({secs:.1}s)", k + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {}: FAIL [{name}] {msg} ({secs:.1}s)", k + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
