//! Verb implementations. Each returns a [`Report`]; the binary decides where
//! the text and the JSON artifact go.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Result};
use groupcast_core::geometry::{
    fm_eliminate, region_equal, remove_redundant, FmOptions, InequalitySystem, Pruning, RegionVerdict, Var,
};
use groupcast_core::info::{assemble_joint_capped, check_admissible, DEFAULT_CELL_CAP};
use groupcast_core::region::{
    covering_region, gamma_table, receiver_intersection, split_region, split_system, cone_region,
    binning_system, BinningOptions, ProblemSpec,
};
use groupcast_core::{EntropyAssignment, Order};
use log::info;

use crate::io::{self, AdmissibleJson, DistributionJson, ExperimentJson, ProblemJson, SystemJson};

/// Outcome of one verb.
#[derive(Debug, Default)]
pub struct Report {
    /// Human-readable summary, printed to standard output.
    pub text: String,
    /// Machine-readable artifact, written to `--output` when given.
    pub json: Option<String>,
    /// A negative verdict (regions differ, a check failed): exit code 1.
    pub negative: bool,
}

#[derive(Clone, Debug)]
pub struct Options {
    pub order: Option<String>,
    pub eliminate: Vec<String>,
    pub tol: f64,
    pub redundancy: Pruning,
    pub seed: Option<u64>,
    pub cap: Option<u64>,
    pub assign: Option<PathBuf>,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            order: None,
            eliminate: Vec::new(),
            tol: 1e-9,
            redundancy: Pruning::Syntactic,
            seed: None,
            cap: None,
            assign: None,
        }
    }
}

impl Options {
    fn fm(&self) -> FmOptions {
        let mut o = FmOptions { pruning: self.redundancy, ..FmOptions::default() };
        if let Some(c) = self.cap {
            o.row_cap = c as usize;
        }
        o
    }

    fn cell_cap(&self) -> usize {
        self.cap.map_or(DEFAULT_CELL_CAP, |c| c as usize)
    }

    fn assignment(&self) -> Result<Option<Box<dyn EntropyAssignment>>> {
        match &self.assign {
            Some(p) => Ok(Some(io::parse_assignment(&io::read_value(p)?, self.cell_cap())?)),
            None => Ok(None),
        }
    }
}

/// Exit status for an error: 3 when a resource cap was hit, 2 otherwise.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if let Some(groupcast_core::Error::Resource(_)) = cause.downcast_ref::<groupcast_core::Error>() {
            return 3;
        }
    }
    2
}

fn system_report(sys: &InequalitySystem, header: &str) -> Result<Report> {
    Ok(Report {
        text: format!("{header}\n{sys}"),
        json: Some(io::to_pretty(&io::system_to_json(sys))?),
        negative: false,
    })
}

pub fn problem_spec(p: &ProblemJson, order_override: Option<&str>) -> Result<ProblemSpec> {
    let (e, f) = io::problem_family(p)?;
    let order = match (order_override, &p.order) {
        (Some(name), _) => io::parse_order_name(name, f)?,
        (None, Some(o)) => o.build(f)?,
        (None, None) => Order::inclusion(f),
    };
    Ok(ProblemSpec::new(e, order, p.time_sharing)?)
}

pub fn build(input: &Path, opts: &Options) -> Result<Report> {
    let p: ProblemJson = io::read_json(input)?;
    let spec = problem_spec(&p, opts.order.as_deref())?;
    let construction = p.construction.as_deref().unwrap_or("split");
    info!("building `{construction}` for E = {}, F = {}", spec.e(), spec.f());
    let sys = match construction {
        "split" => split_system(&spec)?,
        "split_region" => split_region(&spec, &opts.fm())?,
        "cone" => cone_region(&spec, &opts.fm())?,
        "receivers" => receiver_intersection(&spec)?,
        "binning" => binning_system(&spec, &BinningOptions::default())?,
        "covering" => covering_region(spec.order())?,
        other => bail!("unknown construction `{other}`"),
    };
    system_report(&sys, &format!("{} rows over {} variables", sys.len(), sys.vars().len()))
}

/// Parses `--eliminate`: variable names, or the groups `splits`, `hats`,
/// `tildes`, `aux` (all three).
pub fn elimination_targets(sys: &InequalitySystem, names: &[String]) -> Result<Vec<Var>> {
    let mut out = Vec::new();
    for n in names {
        let group: Option<fn(&Var) -> bool> = match n.as_str() {
            "splits" => Some(|v| matches!(v, Var::Split(..))),
            "hats" => Some(|v| matches!(v, Var::Hat(_))),
            "tildes" => Some(|v| matches!(v, Var::Tilde(_))),
            "aux" => Some(|v| matches!(v, Var::Split(..) | Var::Hat(_) | Var::Tilde(_))),
            _ => None,
        };
        match group {
            Some(keep) => out.extend(sys.vars().iter().copied().filter(keep)),
            None => {
                let v = Var::parse(n)?;
                if sys.index_of(v).is_none() {
                    bail!("variable {n} does not occur in the system");
                }
                out.push(v);
            }
        }
    }
    Ok(out)
}

pub fn eliminate(input: &Path, opts: &Options) -> Result<Report> {
    let j: SystemJson = io::read_json(input)?;
    let sys = io::system_from_json(&j)?;
    let targets = elimination_targets(&sys, &opts.eliminate)?;
    if targets.is_empty() {
        bail!("nothing to eliminate (use --eliminate)");
    }
    let assignment = opts.assignment()?;
    let mut out = match (&assignment, opts.redundancy) {
        (Some(a), Pruning::Exact) => fm_eliminate(&sys.bind(a.as_ref())?, &targets, &opts.fm())?,
        _ => fm_eliminate(&sys, &targets, &opts.fm())?,
    };
    if opts.redundancy == Pruning::Exact {
        if assignment.is_some() || out.constant_rhs().is_some() {
            out = remove_redundant(&out, assignment.as_deref(), opts.tol)?;
        } else {
            log::warn!("symbolic right-hand sides and no --assign: skipping LP redundancy removal");
        }
    }
    system_report(&out, &format!("{} rows, {} beyond nonnegativity", out.len(), out.count_non_nonneg()))
}

pub fn compare(first: &Path, second: &Path, opts: &Options) -> Result<Report> {
    let a = io::system_from_json(&io::read_json(first)?)?;
    let b = io::system_from_json(&io::read_json(second)?)?;
    let assignment = opts.assignment()?;
    let verdict = region_equal(&a, &b, assignment.as_deref(), opts.tol)?;
    let text = match &verdict {
        RegionVerdict::Equal => "regions are equal".to_string(),
        RegionVerdict::Unequal { side, witness, violated } => {
            let pts: Vec<String> = witness
                .iter()
                .map(|(v, c)| format!("{v} = {}", groupcast_core::rational::format_short(c)))
                .collect();
            format!("regions differ ({side:?}): point [{}] violates {violated}", pts.join(", "))
        }
    };
    Ok(Report {
        text,
        json: Some(io::to_pretty(&io::VerdictJson::from(&verdict))?),
        negative: !verdict.is_equal(),
    })
}

/// A distribution file or an admissible-input file, with the order taken
/// from the file, the `--order` flag, or inclusion.
fn distribution_and_order(input: &Path, opts: &Options) -> Result<(groupcast_core::info::JointDistribution, Order)> {
    let v = io::read_value(input)?;
    if v.get("aux").is_some() {
        let a: AdmissibleJson = serde_json::from_value(v)?;
        let spec = a.build()?;
        let order = match &opts.order {
            Some(name) => io::parse_order_name(name, spec.order.family().clone())?,
            None => spec.order.clone(),
        };
        return Ok((assemble_joint_capped(&spec, opts.cell_cap())?, order));
    }
    let d: DistributionJson = serde_json::from_value(v)?;
    let dist = d.build()?;
    let fam = io::family_of(&dist)?;
    let order = io::parse_order_name(opts.order.as_deref().unwrap_or("inclusion"), fam)?;
    Ok((dist, order))
}

pub fn gamma(input: &Path, opts: &Options) -> Result<Report> {
    let (dist, order) = distribution_and_order(input, opts)?;
    let rows = gamma_table(&dist, &order)?;
    let f = order.family();
    let mut text = String::new();
    for (g, v) in &rows {
        text.push_str(&format!("gamma({}) = {v:.9}\n", f.format_set(*g)));
    }
    Ok(Report { text, json: Some(io::to_pretty(&io::gamma_table_json(&order, &rows))?), negative: false })
}

pub fn admissible(input: &Path, opts: &Options) -> Result<Report> {
    let (dist, order) = distribution_and_order(input, opts)?;
    let v = check_admissible(&dist, &order, opts.tol)?;
    let text = format!(
        "H(X | U_F, Q) = {:.3e}, divergence from the generation law = {:.3e}: {}",
        v.input_uncertainty,
        v.divergence,
        if v.passed { "admissible" } else { "not admissible" }
    );
    let json = io::AdmissibleVerdictJson { input_uncertainty: v.input_uncertainty, divergence: v.divergence, passed: v.passed };
    Ok(Report { text, json: Some(io::to_pretty(&json)?), negative: !v.passed })
}

pub fn covering(input: &Path, opts: &Options) -> Result<Report> {
    let e: ExperimentJson = io::read_json(input)?;
    let mut exp = e.build()?;
    if let Some(s) = opts.seed {
        exp.seed = s;
    }
    if let Some(c) = opts.cap {
        exp.max_codebook_bits = u32::try_from(c).map_err(|_| anyhow!("--cap is too large for codebook bits"))?;
    }
    info!("covering: n = {}, {} trials, seed {}", exp.n, exp.trials, exp.seed);
    let r = groupcast_core::covering::run_covering(&exp)?;
    let text = format!(
        "success {}/{} = {:.4} +- {:.4} (n = {}, seed {}, {} truncated failures)",
        r.successes, r.trials, r.estimate, r.half_width, r.n, r.seed, r.truncated
    );
    Ok(Report { text, json: Some(io::to_pretty(&io::CoveringResultJson::from(&r))?), negative: false })
}

pub fn demo(name: &str, opts: &Options) -> Result<Report> {
    crate::demos::run(name, opts)
}
