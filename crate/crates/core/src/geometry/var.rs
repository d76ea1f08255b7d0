use alloc::string::String;
use core::fmt;

use crate::error::{bail, Result};
use crate::order::Label;

/// Variable kinds, for reporting.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum VarKind {
    Rate,
    Split,
    Aux,
    Slack,
}

/// A named coordinate of an inequality system.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Var {
    /// Desired rate `R_S`.
    Rate(Label),
    /// Split rate `r_{S->S'}` with `S ⊆ S'`.
    Split(Label, Label),
    /// Reconstructed rate `R̂_S`.
    Hat(Label),
    /// Codebook rate with binning `R̃_S`.
    Tilde(Label),
    /// Covering rate `r_S`.
    Excess(Label),
    /// Cone multiplier for the generator `e_{S->S'}`.
    Lambda(Label, Label),
}

impl Var {
    pub fn kind(self) -> VarKind {
        match self {
            Var::Rate(_) | Var::Excess(_) => VarKind::Rate,
            Var::Split(..) => VarKind::Split,
            Var::Hat(_) | Var::Tilde(_) => VarKind::Aux,
            Var::Lambda(..) => VarKind::Slack,
        }
    }

    pub fn split(s: Label, t: Label) -> Result<Var> {
        if !s.is_subset(t) {
            bail!(Domain, "split r_{s}->{t} needs {s} ⊆ {t}");
        }
        Ok(Var::Split(s, t))
    }

    pub fn parse(s: &str) -> Result<Var> {
        let s = s.trim();
        let pair = |rest: &str| -> Result<(Label, Label)> {
            match rest.split_once("->") {
                Some((a, b)) => Ok((Label::parse(a)?, Label::parse(b)?)),
                None => bail!(Parse, "bad variable `{s}`"),
            }
        };
        if let Some(rest) = s.strip_prefix("Rhat_") {
            return Ok(Var::Hat(Label::parse(rest)?));
        }
        if let Some(rest) = s.strip_prefix("Rtilde_") {
            return Ok(Var::Tilde(Label::parse(rest)?));
        }
        if let Some(rest) = s.strip_prefix("R_") {
            return Ok(Var::Rate(Label::parse(rest)?));
        }
        if let Some(rest) = s.strip_prefix("lambda_") {
            let (a, b) = pair(rest)?;
            return Ok(Var::Lambda(a, b));
        }
        if let Some(rest) = s.strip_prefix("r_") {
            if rest.contains("->") {
                let (a, b) = pair(rest)?;
                return Var::split(a, b);
            }
            return Ok(Var::Excess(Label::parse(rest)?));
        }
        bail!(Parse, "bad variable `{s}`")
    }

    pub fn name(self) -> String {
        alloc::format!("{self}")
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::Rate(l) => write!(f, "R_{l}"),
            Var::Split(a, b) => write!(f, "r_{a}->{b}"),
            Var::Hat(l) => write!(f, "Rhat_{l}"),
            Var::Tilde(l) => write!(f, "Rtilde_{l}"),
            Var::Excess(l) => write!(f, "r_{l}"),
            Var::Lambda(a, b) => write!(f, "lambda_{a}->{b}"),
        }
    }
}
