//! JSON formats. Rationals are written as `"p/q"` strings; probabilities
//! and entropies that come from floating-point data are plain numbers.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use groupcast_core::channels::{CombinationNetwork, TabularBC};
use groupcast_core::covering::{CoveringExperiment, CoveringResult, TypicalityTarget};
use groupcast_core::expr::{EntropyTable, RationalEntropyTable};
use groupcast_core::geometry::{Inequality, InequalitySystem, RegionVerdict, Side, Var};
use groupcast_core::info::{AdmissibleSpec, AuxLaw, JointDistribution, VariableUniverse};
use groupcast_core::rational::{format_pq, parse_pq};
use groupcast_core::{EntropyAssignment, EntropyExpr, Family, Label, LabelSet, Order, OrderKind, Rational, SymSet, Symbol};
use serde::{Deserialize, Serialize};
use serde_json::Value;

/// How an order is written: `"inclusion"`, `"discrete"`, or explicit strict
/// pairs `{"pairs": [["1", "12"], ...]}` (the reflexive part is implied).
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum OrderJson {
    Named(String),
    Pairs { pairs: Vec<(String, String)> },
}

impl OrderJson {
    pub fn build(&self, family: Family) -> Result<Order> {
        match self {
            OrderJson::Named(n) => parse_order_name(n, family),
            OrderJson::Pairs { pairs } => {
                let ps = pairs
                    .iter()
                    .map(|(a, b)| Ok((Label::parse(a)?, Label::parse(b)?)))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Order::explicit(family, &ps)?)
            }
        }
    }

    pub fn of(order: &Order) -> OrderJson {
        match order.kind() {
            OrderKind::Inclusion => OrderJson::Named("inclusion".into()),
            OrderKind::Discrete => OrderJson::Named("discrete".into()),
            OrderKind::Explicit => OrderJson::Pairs {
                pairs: order.strict_pairs().iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
            },
        }
    }
}

pub fn parse_order_name(name: &str, family: Family) -> Result<Order> {
    match name {
        "inclusion" => Ok(Order::inclusion(family)),
        "discrete" => Ok(Order::discrete(family)),
        other => bail!("unknown order `{other}` (expected inclusion or discrete)"),
    }
}

pub fn family(k: u8, labels: &[String]) -> Result<Family> {
    let ls = labels.iter().map(|s| Label::parse(s)).collect::<groupcast_core::Result<Vec<_>>>()?;
    Ok(Family::new(k, ls)?)
}

fn label_strings(f: &Family) -> Vec<String> {
    f.labels().iter().map(|l| l.to_string()).collect()
}

/// Input of `build`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProblemJson {
    #[serde(rename = "K")]
    pub k: u8,
    #[serde(rename = "E")]
    pub e: Vec<String>,
    /// Defaults to `E`.
    #[serde(rename = "F", default, skip_serializing_if = "Option::is_none")]
    pub f: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<OrderJson>,
    #[serde(default = "yes")]
    pub time_sharing: bool,
    /// `split` (default), `cone`, `receivers`, `binning` or `covering`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub construction: Option<String>,
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct RhsJson {
    #[serde(default)]
    pub terms: BTreeMap<String, String>,
    #[serde(rename = "const", default = "zero_str")]
    pub constant: String,
}

fn zero_str() -> String {
    "0".into()
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct RowJson {
    /// Row reads `Σ coeffs · var <= rhs`.
    pub coeffs: BTreeMap<String, String>,
    pub rhs: RhsJson,
    #[serde(default)]
    pub note: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SystemJson {
    pub variables: Vec<String>,
    pub rows: Vec<RowJson>,
}

pub fn expr_to_json(e: &EntropyExpr) -> RhsJson {
    RhsJson {
        terms: e.terms().iter().map(|(s, c)| (s.key(), format_pq(c))).collect(),
        constant: format_pq(e.constant_part()),
    }
}

pub fn expr_from_json(r: &RhsJson) -> Result<EntropyExpr> {
    let mut terms = Vec::new();
    for (k, v) in &r.terms {
        terms.push((SymSet::parse(k)?, parse_pq(v)?));
    }
    Ok(EntropyExpr::from_parts(terms, parse_pq(&r.constant)?))
}

pub fn system_to_json(sys: &InequalitySystem) -> SystemJson {
    let vars = sys.vars();
    SystemJson {
        variables: vars.iter().map(|v| v.name()).collect(),
        rows: sys
            .rows()
            .iter()
            .map(|r| RowJson {
                coeffs: vars
                    .iter()
                    .zip(&r.coeffs)
                    .filter(|(_, c)| !num_traits::Zero::is_zero(*c))
                    .map(|(v, c)| (v.name(), format_pq(c)))
                    .collect(),
                rhs: expr_to_json(&r.rhs),
                note: r.note.clone(),
            })
            .collect(),
    }
}

pub fn system_from_json(j: &SystemJson) -> Result<InequalitySystem> {
    let vars = j.variables.iter().map(|s| Var::parse(s)).collect::<groupcast_core::Result<Vec<_>>>()?;
    let mut sys = InequalitySystem::new(vars.clone())?;
    for (i, row) in j.rows.iter().enumerate() {
        let mut coeffs = vec![Rational::default(); vars.len()];
        for (name, c) in &row.coeffs {
            let v = Var::parse(name)?;
            let pos = vars
                .iter()
                .position(|w| *w == v)
                .ok_or_else(|| anyhow!("row {i} uses undeclared variable {name}"))?;
            coeffs[pos] = parse_pq(c)?;
        }
        sys.push_row(Inequality { coeffs, rhs: expr_from_json(&row.rhs)?, note: row.note.clone() })?;
    }
    Ok(sys)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SymbolJson {
    pub name: String,
    pub size: usize,
}

/// A joint pmf, row-major over `symbols` (last symbol fastest).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DistributionJson {
    pub symbols: Vec<SymbolJson>,
    pub pmf: Vec<f64>,
}

impl DistributionJson {
    pub fn build(&self) -> Result<JointDistribution> {
        let entries = self
            .symbols
            .iter()
            .map(|s| Ok((Symbol::parse(&s.name)?, s.size)))
            .collect::<Result<Vec<_>>>()?;
        Ok(JointDistribution::new(VariableUniverse::new(entries)?, self.pmf.clone())?)
    }

    pub fn of(d: &JointDistribution) -> DistributionJson {
        let u = d.universe();
        DistributionJson {
            symbols: u
                .symbols()
                .iter()
                .zip(u.alphabets())
                .map(|(s, &size)| SymbolJson { name: s.to_string(), size })
                .collect(),
            pmf: d.pmf().to_vec(),
        }
    }
}

/// The labels carried by `U_S` symbols of a distribution, and the number of
/// receivers (largest receiver index among labels and outputs).
pub fn family_of(d: &JointDistribution) -> Result<Family> {
    let mut labels = Vec::new();
    let mut k = 1u8;
    for s in d.universe().symbols() {
        match s {
            Symbol::U(l) => {
                k = k.max(l.max_receiver());
                labels.push(*l);
            }
            Symbol::Y(j) => k = k.max(*j),
            _ => {}
        }
    }
    if labels.is_empty() {
        bail!("distribution has no auxiliary U_S symbols");
    }
    labels.sort();
    Ok(Family::new(k, labels)?)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CombinationJson {
    #[serde(rename = "K")]
    pub k: u8,
    /// Keys like `"[1,2]"`, values in bits.
    pub components: BTreeMap<String, u32>,
}

/// Transition table row-major over `(x, y_1, ..., y_K)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TableJson {
    pub input: usize,
    pub outputs: Vec<usize>,
    pub w: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelJson {
    Combination(CombinationJson),
    Table(TableJson),
}

pub fn parse_bracket_label(s: &str) -> Result<Label> {
    let inner = s.trim().strip_prefix('[').and_then(|r| r.strip_suffix(']'));
    let Some(inner) = inner else {
        return Ok(Label::parse(s.trim())?);
    };
    let members = inner
        .split(',')
        .map(|p| p.trim().parse::<u8>().map_err(|_| anyhow!("bad receiver index in `{s}`")))
        .collect::<Result<Vec<_>>>()?;
    Ok(Label::from_members(&members)?)
}

pub fn bracket_label(l: Label) -> String {
    let m: Vec<String> = l.members().map(|j| j.to_string()).collect();
    format!("[{}]", m.join(","))
}

impl CombinationJson {
    pub fn build(&self) -> Result<CombinationNetwork> {
        let comps = self
            .components
            .iter()
            .map(|(k, &b)| Ok((parse_bracket_label(k)?, b)))
            .collect::<Result<Vec<_>>>()?;
        Ok(CombinationNetwork::new(self.k, comps)?)
    }
}

impl ChannelJson {
    pub fn table(&self, f: Option<&Family>) -> Result<TabularBC> {
        match self {
            ChannelJson::Table(t) => Ok(TabularBC::new(t.input, t.outputs.clone(), t.w.clone())?),
            ChannelJson::Combination(c) => {
                let net = c.build()?;
                let fam = match f {
                    Some(f) => f.clone(),
                    None => Family::new(c.k, net.components().keys().copied())?,
                };
                Ok(net.to_table(&fam)?)
            }
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AuxJson {
    /// One conditional table per label, rows over `(q, parents)`.
    Factored { alphabets: Vec<usize>, conditionals: Vec<Vec<f64>> },
    Joint { alphabets: Vec<usize>, pmf: Vec<f64> },
}

/// Auxiliaries, input map and (optionally) a channel.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AdmissibleJson {
    #[serde(rename = "K")]
    pub k: u8,
    #[serde(rename = "F")]
    pub f: Vec<String>,
    pub order: OrderJson,
    pub q_pmf: Vec<f64>,
    pub aux: AuxJson,
    pub x_alphabet: usize,
    pub input_map: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channel: Option<ChannelJson>,
}

impl AdmissibleJson {
    pub fn build(&self) -> Result<AdmissibleSpec> {
        let fam = family(self.k, &self.f)?;
        let order = self.order.build(fam.clone())?;
        let aux = match &self.aux {
            AuxJson::Factored { alphabets, conditionals } => {
                AuxLaw::Factored { alphabets: alphabets.clone(), conditionals: conditionals.clone() }
            }
            AuxJson::Joint { alphabets, pmf } => AuxLaw::Joint { alphabets: alphabets.clone(), pmf: pmf.clone() },
        };
        let channel = self.channel.as_ref().map(|c| c.table(Some(&fam))).transpose()?;
        let spec = AdmissibleSpec {
            order,
            q_pmf: self.q_pmf.clone(),
            aux,
            x_alphabet: self.x_alphabet,
            input_map: self.input_map.clone(),
            channel,
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Anything that yields entropy values: a distribution, an admissible input
/// (assembled into its joint law), a table of `H(...)` values, or a
/// combination network with uniform auxiliaries over `F`.
pub fn parse_assignment(v: &Value, cell_cap: usize) -> Result<Box<dyn EntropyAssignment>> {
    let obj = v.as_object().ok_or_else(|| anyhow!("assignment must be a JSON object"))?;
    if obj.contains_key("symbols") {
        let d: DistributionJson = serde_json::from_value(v.clone())?;
        return Ok(Box::new(d.build()?));
    }
    if obj.contains_key("aux") {
        let a: AdmissibleJson = serde_json::from_value(v.clone())?;
        let spec = a.build()?;
        return Ok(Box::new(groupcast_core::info::assemble_joint_capped(&spec, cell_cap)?));
    }
    if let Some(c) = obj.get("combination") {
        let c: CombinationJson = serde_json::from_value(c.clone())?;
        let net = c.build()?;
        let labels: Vec<String> = serde_json::from_value(
            obj.get("F").cloned().ok_or_else(|| anyhow!("combination assignment needs the family F"))?,
        )?;
        return Ok(Box::new(net.uniform_aux_entropies(&family(c.k, &labels)?)?));
    }
    if let Some(Value::Object(m)) = obj.get("entropies") {
        let exact = m.values().all(Value::is_string);
        if exact {
            let mut t = RationalEntropyTable::default();
            for (k, val) in m {
                t.values.insert(SymSet::parse(k)?, parse_pq(val.as_str().unwrap_or_default())?);
            }
            return Ok(Box::new(t));
        }
        let mut t = EntropyTable::default();
        for (k, val) in m {
            let x = match val {
                Value::Number(n) => n.as_f64().unwrap_or(f64::NAN),
                Value::String(s) => groupcast_core::rational::to_f64(&parse_pq(s)?),
                _ => bail!("entropy of {k} must be a number or \"p/q\""),
            };
            t.values.insert(SymSet::parse(k)?, x);
        }
        return Ok(Box::new(t));
    }
    bail!("unrecognized assignment (expected symbols/pmf, aux, combination or entropies)")
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TargetJson {
    pub alphabets: Vec<usize>,
    pub pmf: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentJson {
    #[serde(rename = "K")]
    pub k: u8,
    #[serde(rename = "E")]
    pub e: Vec<String>,
    pub order: OrderJson,
    pub target: TargetJson,
    pub rates: Vec<f64>,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub search_budget: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_codebook_bits: Option<u32>,
}

impl ExperimentJson {
    pub fn build(&self) -> Result<CoveringExperiment> {
        let order = self.order.build(family(self.k, &self.e)?)?;
        let target = TypicalityTarget::new(self.target.alphabets.clone(), self.target.pmf.clone())?;
        let mut exp = CoveringExperiment::new(order, target, self.rates.clone(), self.n);
        if let Some(e) = self.epsilon {
            exp.epsilon = e;
        }
        if let Some(t) = self.trials {
            exp.trials = t;
        }
        if let Some(s) = self.seed {
            exp.seed = s;
        }
        if let Some(b) = self.search_budget {
            exp.search_budget = b;
        }
        if let Some(b) = self.max_codebook_bits {
            exp.max_codebook_bits = b;
        }
        Ok(exp)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CoveringResultJson {
    pub estimate: f64,
    pub half_width: f64,
    pub trials: usize,
    pub n: usize,
    pub seed: u64,
    pub successes: usize,
    pub truncated: usize,
    pub lower: f64,
    pub upper: f64,
    pub searched_bits: Vec<u32>,
}

impl From<&CoveringResult> for CoveringResultJson {
    fn from(r: &CoveringResult) -> Self {
        CoveringResultJson {
            estimate: r.estimate,
            half_width: r.half_width,
            trials: r.trials,
            n: r.n,
            seed: r.seed,
            successes: r.successes,
            truncated: r.truncated,
            lower: r.lower,
            upper: r.upper,
            searched_bits: r.searched_bits.clone(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct GammaRowJson {
    #[serde(rename = "G")]
    pub g: Vec<String>,
    pub gamma: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct GammaTableJson {
    pub order: OrderJson,
    pub rows: Vec<GammaRowJson>,
}

pub fn gamma_table_json(order: &Order, rows: &[(LabelSet, f64)]) -> GammaTableJson {
    let f = order.family();
    GammaTableJson {
        order: OrderJson::of(order),
        rows: rows
            .iter()
            .map(|(g, v)| GammaRowJson { g: f.labels_of(*g).iter().map(|l| l.to_string()).collect(), gamma: *v })
            .collect(),
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct VerdictJson {
    pub equal: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub side: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub witness: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub violated: Option<String>,
}

impl From<&RegionVerdict> for VerdictJson {
    fn from(v: &RegionVerdict) -> Self {
        match v {
            RegionVerdict::Equal => {
                VerdictJson { equal: true, side: None, witness: BTreeMap::new(), violated: None }
            }
            RegionVerdict::Unequal { side, witness, violated } => VerdictJson {
                equal: false,
                side: Some(
                    match side {
                        Side::FirstOnly => "first_only",
                        Side::SecondOnly => "second_only",
                    }
                    .into(),
                ),
                witness: witness.iter().map(|(v, c)| (v.name(), format_pq(c))).collect(),
                violated: Some(violated.clone()),
            },
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct AdmissibleVerdictJson {
    pub input_uncertainty: f64,
    pub divergence: f64,
    pub passed: bool,
}

pub fn problem_family(p: &ProblemJson) -> Result<(Family, Family)> {
    let e = family(p.k, &p.e)?;
    let f = match &p.f {
        Some(f) => family(p.k, f)?,
        None => e.clone(),
    };
    Ok((e, f))
}

pub fn family_json(f: &Family) -> Vec<String> {
    label_strings(f)
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn read_value(path: &Path) -> Result<Value> {
    read_json(path)
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => std::path::PathBuf::from("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).with_context(|| format!("creating a file in {}", dir.display()))?;
    std::io::Write::write_all(&mut tmp, contents.as_bytes())?;
    tmp.persist(path).map_err(|e| anyhow!("writing {}: {}", path.display(), e.error))?;
    Ok(())
}

pub fn to_pretty<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}
