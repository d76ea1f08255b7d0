//! Packaged end-to-end examples. Inputs come from the JSON fixtures compiled
//! into the binary, so every run is reproducible.

use anyhow::{anyhow, bail, Result};
use groupcast_core::covering::{run_covering, CoveringExperiment, TypicalityTarget};
use groupcast_core::geometry::{
    fm_eliminate, region_equal, remove_redundant, FmOptions, InequalitySystem, Pruning, RegionVerdict, Var,
};
use groupcast_core::info::u_set;
use groupcast_core::region::{
    gamma, known_region, marton_region, receiver_intersection, receiver_polyhedron, split_region,
    split_system, binning_aux_vars, binning_system, BinningOptions, KnownRegion, ProblemSpec,
};
use groupcast_core::{EntropyAssignment, EntropyExpr, Family, LabelSet, Order, SymSet, Symbol};
use serde::Deserialize;
use serde_json::Value;

use crate::commands::{problem_spec, Options, Report};
use crate::instances::{self, label};
use crate::io::{self, ChannelJson, ExperimentJson, ProblemJson};

pub const NAMES: &[&str] =
    &["combination3", "two_user", "nair_elgamal", "marton", "cover", "korner_marton", "covering"];

pub fn fixture(name: &str) -> Option<&'static str> {
    Some(match name {
        "combination3" => include_str!("../fixtures/combination3.json"),
        "two_user" => include_str!("../fixtures/two_user.json"),
        "nair_elgamal" => include_str!("../fixtures/nair_elgamal.json"),
        "marton" => include_str!("../fixtures/marton.json"),
        "cover" => include_str!("../fixtures/cover.json"),
        "korner_marton" => include_str!("../fixtures/korner_marton.json"),
        "covering" => include_str!("../fixtures/covering.json"),
        _ => return None,
    })
}

pub fn run(name: &str, opts: &Options) -> Result<Report> {
    let text = fixture(name).ok_or_else(|| anyhow!("unknown demo `{name}` (known: {})", NAMES.join(", ")))?;
    let v: Value = serde_json::from_str(text)?;
    match name {
        "combination3" => combination3(&v),
        "two_user" => two_user(&v, opts),
        "nair_elgamal" => nair_elgamal(&v, opts),
        "marton" => marton(&v, opts),
        "cover" => cover(&v, opts),
        "korner_marton" => korner_marton(&v, opts),
        "covering" => covering(text, opts),
        _ => unreachable!("fixture exists for every demo"),
    }
}

#[derive(Deserialize)]
struct Combination {
    problem: ProblemJson,
    channel: ChannelJson,
}

/// Projects the split rates out of the full-message-set system on a
/// combination network and removes every redundant row exactly.
pub fn combination_region(problem: &ProblemJson, channel: &ChannelJson) -> Result<InequalitySystem> {
    let ChannelJson::Combination(c) = channel else {
        bail!("the combination demo needs a combination network");
    };
    let spec = problem_spec(problem, None)?;
    let h = c.build()?.uniform_aux_entropies(spec.f())?;
    let bound = split_system(&spec)?.bind(&h)?;
    let opts = FmOptions { pruning: Pruning::Exact, ..FmOptions::default() };
    let projected = fm_eliminate(&bound, &spec.split_vars(), &opts)?;
    Ok(remove_redundant(&projected, None, 0.0)?)
}

fn combination3(v: &Value) -> Result<Report> {
    let c: Combination = serde_json::from_value(v.clone())?;
    let region = combination_region(&c.problem, &c.channel)?;
    let count = region.count_non_nonneg();
    Ok(Report {
        text: format!("{count} inequalities beyond nonnegativity\n{region}"),
        json: Some(io::to_pretty(&io::system_to_json(&region))?),
        negative: count != 15,
    })
}

#[derive(Deserialize)]
struct Seeded {
    problem: ProblemJson,
    seed: u64,
    #[serde(default = "one")]
    q_size: usize,
    #[serde(default = "two")]
    aux_max: usize,
    #[serde(default = "two")]
    x_size: usize,
    #[serde(default = "two")]
    out_max: usize,
}

fn one() -> usize {
    1
}

fn two() -> usize {
    2
}

fn seeded(v: &Value, opts: &Options) -> Result<(ProblemSpec, groupcast_core::info::JointDistribution, u64)> {
    let s: Seeded = serde_json::from_value(v.clone())?;
    let spec = problem_spec(&s.problem, None)?;
    let seed = opts.seed.unwrap_or(s.seed);
    let mut rng = instances::rng(seed);
    let (_, dist) = instances::random_instance(spec.order(), s.q_size, s.aux_max, s.x_size, s.out_max, &mut rng)?;
    Ok((spec, dist, seed))
}

fn verdict_report(header: String, verdict: &RegionVerdict) -> Result<Report> {
    let tail = match verdict {
        RegionVerdict::Equal => "equal".to_string(),
        RegionVerdict::Unequal { side, violated, .. } => format!("differ ({side:?}), violated: {violated}"),
    };
    Ok(Report {
        text: match header.split_once('\n') {
            Some((first, rest)) => format!("{first}: {tail}\n{rest}"),
            None => format!("{header}: {tail}"),
        },
        json: Some(io::to_pretty(&io::VerdictJson::from(verdict))?),
        negative: !verdict.is_equal(),
    })
}

fn two_user(v: &Value, opts: &Options) -> Result<Report> {
    let (spec, dist, seed) = seeded(v, opts)?;
    let projected = split_region(&spec, &FmOptions::default())?;
    let reference = known_region(KnownRegion::TwoUserFm)?;
    let verdict = region_equal(&projected, &reference, Some(&dist), opts.tol)?;
    verdict_report(format!("projected split system vs. the two-user region (seed {seed})\n{projected}"), &verdict)
}

fn cover(v: &Value, opts: &Options) -> Result<Report> {
    let (spec, dist, seed) = seeded(v, opts)?;
    let region = hats_to_rates(&receiver_intersection(&spec)?)?;
    let verdict = region_equal(&region, &known_region(KnownRegion::Cover)?, Some(&dist), opts.tol)?;
    verdict_report(format!("receiver polyhedra vs. Cover's region (seed {seed})\n{region}"), &verdict)
}

fn korner_marton(v: &Value, opts: &Options) -> Result<Report> {
    #[derive(Deserialize)]
    struct Km {
        problem: ProblemJson,
        seed: u64,
    }
    let km: Km = serde_json::from_value(v.clone())?;
    let spec = problem_spec(&km.problem, None)?;
    let seed = opts.seed.unwrap_or(km.seed);
    let dist = degraded_message_instance(&spec, seed)?;
    let region = hats_to_rates(&receiver_intersection(&spec)?)?;
    let verdict = region_equal(&region, &known_region(KnownRegion::KornerMarton)?, Some(&dist), opts.tol)?;
    verdict_report(format!("receiver polyhedra vs. the Korner-Marton region (seed {seed})\n{region}"), &verdict)
}

/// `U_12` then `U_1` given `U_12`, with `X = U_1`.
pub fn degraded_message_instance(spec: &ProblemSpec, seed: u64) -> Result<groupcast_core::info::JointDistribution> {
    let mut rng = instances::rng(seed);
    let mut s = groupcast_core::info::AdmissibleSpec::random(spec.order().clone(), 1, &[3, 2], 3, &mut rng)?;
    s.input_map = (0..6).map(|cell| cell / 2).collect();
    s.channel = Some(groupcast_core::channels::TabularBC::random(3, vec![2, 3], &mut rng));
    Ok(groupcast_core::info::assemble_joint(&s)?)
}

pub fn hats_to_rates(sys: &InequalitySystem) -> Result<InequalitySystem> {
    Ok(sys.rename(|v| match v {
        Var::Hat(l) => Var::Rate(l),
        other => other,
    })?)
}

fn marton(v: &Value, opts: &Options) -> Result<Report> {
    let s: Seeded = serde_json::from_value(v.clone())?;
    let spec = problem_spec(&s.problem, None)?;
    let seed = opts.seed.unwrap_or(s.seed);
    let (_, dist) = instances::marton_instance(s.aux_max, 0.3, &mut instances::rng(seed))?;
    let region = binning_region(&spec, &dist)?;
    let verdict = region_equal(&region, &marton_region()?, Some(&dist), opts.tol)?;
    verdict_report(format!("binning region vs. Marton's region (seed {seed})\n{region}"), &verdict)
}

/// The binning system with every auxiliary rate projected out, bound to
/// `dist` and cleaned of redundant rows.
pub fn binning_region(spec: &ProblemSpec, dist: &dyn EntropyAssignment) -> Result<InequalitySystem> {
    let sys = binning_system(spec, &BinningOptions::default())?.bind(dist)?;
    let opts = FmOptions { pruning: Pruning::Exact, ..FmOptions::default() };
    let projected = fm_eliminate(&sys, &binning_aux_vars(spec), &opts)?;
    Ok(remove_redundant(&projected, None, 1e-12)?)
}

/// `F = {1, 13, 123}` under the chain order, no time sharing.
pub fn chain_spec() -> Result<ProblemSpec> {
    let e = Family::parse(3, &["1", "123"])?;
    Ok(ProblemSpec::new(e, instances::chain_order()?, false)?)
}

/// The split system with `r_{1->123} = 0`, projected onto `(R_1, R_123)`.
pub fn chain_region(spec: &ProblemSpec, dist: &dyn EntropyAssignment) -> Result<InequalitySystem> {
    let mut sys = split_system(spec)?;
    sys.push_eq(&[(Var::Split(label("1"), label("123")), groupcast_core::rational::one())], EntropyExpr::zero(), "unused split")?;
    let bound = sys.bind(dist)?;
    let opts = FmOptions { pruning: Pruning::Exact, ..FmOptions::default() };
    let projected = fm_eliminate(&bound, &spec.split_vars(), &opts)?;
    Ok(remove_redundant(&projected, None, 1e-12)?)
}

/// Vertices of a bounded two-variable region, by intersecting row pairs.
pub fn vertices_2d(sys: &InequalitySystem, tol: f64) -> Result<Vec<[f64; 2]>> {
    if sys.vars().len() != 2 {
        bail!("expected two variables, found {}", sys.vars().len());
    }
    let rows: Vec<([f64; 2], f64)> = sys
        .rows()
        .iter()
        .map(|r| {
            let c = |i: usize| groupcast_core::rational::to_f64(&r.coeffs[i]);
            let b = r.rhs.constant_part();
            ([c(0), c(1)], groupcast_core::rational::to_f64(b))
        })
        .collect();
    if sys.rows().iter().any(|r| !r.rhs.is_constant()) {
        bail!("bind the system before enumerating vertices");
    }
    let mut out: Vec<[f64; 2]> = Vec::new();
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            let (a, b) = (rows[i], rows[j]);
            let det = a.0[0] * b.0[1] - a.0[1] * b.0[0];
            if det.abs() < 1e-12 {
                continue;
            }
            let x = (a.1 * b.0[1] - a.0[1] * b.1) / det;
            let y = (a.0[0] * b.1 - a.1 * b.0[0]) / det;
            let inside = rows.iter().all(|(c, r)| c[0] * x + c[1] * y <= r + tol);
            if inside && !out.iter().any(|p| (p[0] - x).abs() < tol && (p[1] - y).abs() < tol) {
                out.push([x, y]);
            }
        }
    }
    Ok(out)
}

fn h(symbols: &[Symbol]) -> SymSet {
    SymSet::new(symbols.iter().copied())
}

/// The Nair-El Gamal bounds with `U = U_123`, `V = U_13`, evaluated.
pub fn chain_bounds(dist: &dyn EntropyAssignment) -> Result<[f64; 5]> {
    let u = u_set([label("123")]);
    let v = u_set([label("13")]);
    let x = h(&[Symbol::X]);
    let y = |j: u8| h(&[Symbol::Y(j)]);
    let none = SymSet::empty();
    let mi = |a: &SymSet, b: &SymSet, c: &SymSet| EntropyExpr::mi(a, b, c).evaluate(dist);
    Ok([
        mi(&u, &y(2), &none)?,
        mi(&v, &y(3), &none)?,
        mi(&x, &y(1), &u)?,
        mi(&v, &y(3), &none)? + mi(&x, &y(1), &v)?,
        mi(&x, &y(1), &v)? + mi(&v, &y(3), &u)?,
    ])
}

fn nair_elgamal(v: &Value, opts: &Options) -> Result<Report> {
    #[derive(Deserialize)]
    struct Neg {
        seed: u64,
    }
    let n: Neg = serde_json::from_value(v.clone())?;
    let seed = opts.seed.unwrap_or(n.seed);
    let spec = chain_spec()?;
    let mut text = String::from("receiver rows over F = {1, 13, 123}:\n");
    for j in 1..=3 {
        let p = receiver_polyhedron(&spec, j)?;
        for r in p.rows() {
            if p.nonneg_var(r).is_none() {
                text.push_str(&format!("  {}\n", p.format_row(r)));
            }
        }
    }
    let (_, dist) = instances::chain_instance(seed)?;
    let region = chain_region(&spec, &dist)?;
    let b = chain_bounds(&dist)?;
    let verts = vertices_2d(&region, 1e-9)?;
    let mut ok = true;
    text.push_str(&format!("projected region (seed {seed}):\n{region}vertices:\n"));
    let (i1, i123) = (region.index_of(Var::Rate(label("1"))), region.index_of(Var::Rate(label("123"))));
    let (Some(i1), Some(i123)) = (i1, i123) else {
        bail!("projection lost a rate variable");
    };
    for p in &verts {
        let (r1, r123) = (p[i1], p[i123]);
        let good = r123 <= b[0].min(b[1]) + opts.tol
            && r1 <= b[2] + opts.tol
            && r1 + r123 <= b[3] + opts.tol
            && r1 <= b[4] + opts.tol;
        ok &= good;
        text.push_str(&format!("  R_1 = {r1:.6}, R_123 = {r123:.6}: {}\n", if good { "inside" } else { "OUTSIDE" }));
    }
    Ok(Report { text, json: Some(io::to_pretty(&io::system_to_json(&region))?), negative: !ok })
}

fn covering(text: &str, opts: &Options) -> Result<Report> {
    let e: ExperimentJson = serde_json::from_str(text)?;
    let mut base = e.build()?;
    if let Some(s) = opts.seed {
        base.seed = s;
    }
    let threshold = pair_threshold(&base)?;
    let mut out = format!("gamma({{1, 2}}) = {threshold:.6} bits\n");
    let mut results = Vec::new();
    for n in [50, 100, 200] {
        let exp = CoveringExperiment { n, ..base.clone() };
        let r = run_covering(&exp)?;
        out.push_str(&format!(
            "n = {n:3}, r1 + r2 = {:.4}: success {:.3} +- {:.3}\n",
            exp.rates.iter().sum::<f64>(),
            r.estimate,
            r.half_width
        ));
        results.push(io::CoveringResultJson::from(&r));
    }
    let below = CoveringExperiment { rates: vec![0.0; base.rates.len()], ..base.clone() };
    let r = run_covering(&below)?;
    out.push_str(&format!("n = {:3}, r1 + r2 = 0.0000: success {:.3} +- {:.3}\n", below.n, r.estimate, r.half_width));
    let negative = results.last().is_some_and(|r| r.estimate < 0.9);
    Ok(Report { text: out, json: Some(io::to_pretty(&results)?), negative })
}

/// `γ` of the full family for a covering experiment's target, computed from
/// the target's own entropies.
pub fn pair_threshold(exp: &CoveringExperiment) -> Result<f64> {
    let order: &Order = &exp.order;
    let target: &TypicalityTarget = &exp.target;
    let fam = order.family();
    let entropies = TargetEntropy { target, family: fam.clone() };
    Ok(gamma(&entropies, order, LabelSet::full(fam.len()))?)
}

struct TargetEntropy<'a> {
    target: &'a TypicalityTarget,
    family: Family,
}

impl EntropyAssignment for TargetEntropy<'_> {
    fn entropy(&self, set: &SymSet) -> groupcast_core::Result<f64> {
        let mut keep = Vec::new();
        for s in set.symbols() {
            match s {
                Symbol::U(l) => match self.family.index_of(*l) {
                    Some(i) => keep.push(i),
                    None => return Err(groupcast_core::Error::MissingSymbol(set.key())),
                },
                _ => return Err(groupcast_core::Error::MissingSymbol(set.key())),
            }
        }
        Ok(self.target.entropy(&keep))
    }
}
