//! Hypercyclicity of unilateral weighted backward shifts:
//! `B_w` is hypercyclic iff `liminf_n [ln a_{j,n} - sum_{v<=n} ln|w_v|] = -inf` for every `j`.

use serde::Serialize;

use crate::certified::lex_sign;
use crate::error::{Error, Result};
use crate::spaces::{RowFamily, SpaceModel};
use crate::weights::WeightSequence;

/// Largest row index scanned for a non-hypercyclicity witness on infinite row families.
pub const WITNESS_ROW_LIMIT: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Hypercyclicity {
    Hypercyclic,
    NotHypercyclic,
    Unknown,
}

/// Minimum of `g_j(n) = ln a_{j,n} - S_n` over `1 <= n <= horizon`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowEvidence {
    pub j: usize,
    #[serde(serialize_with = "crate::certified::ser_ext")]
    pub min_log: f64,
    pub argmin_n: usize,
    /// `g_j(horizon)`.
    #[serde(serialize_with = "crate::certified::ser_ext")]
    pub last_log: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypercyclicityReport {
    pub outcome: Hypercyclicity,
    pub certified: bool,
    /// Row whose `g_j` stays bounded below.
    pub witness_j: Option<usize>,
    pub horizon: usize,
    pub evidence: Vec<RowEvidence>,
    pub note: String,
}

impl HypercyclicityReport {
    pub fn certified_hypercyclic(&self) -> bool {
        self.certified && self.outcome == Hypercyclicity::Hypercyclic
    }

    pub fn certified_not_hypercyclic(&self) -> bool {
        self.certified && self.outcome == Hypercyclicity::NotHypercyclic
    }
}

fn evidence(w: &WeightSequence, space: &SpaceModel, j_max: usize, horizon: usize) -> Vec<RowEvidence> {
    let mut partial = Vec::with_capacity(horizon);
    let mut s = 0.0;
    for v in 1..=horizon as i64 {
        s += w.log_at_unchecked(v);
        partial.push(s);
    }
    (1..=j_max)
        .map(|j| {
            let mut best = (f64::INFINITY, 1usize);
            let mut last = f64::NAN;
            for (i, s) in partial.iter().enumerate() {
                let n = i + 1;
                let g = space.log_a_unchecked(j, n as i64) - s;
                if g < best.0 {
                    best = (g, n);
                }
                last = g;
            }
            RowEvidence {
                j,
                min_log: best.0,
                argmin_n: best.1,
                last_log: last,
            }
        })
        .collect()
}

/// Decides hypercyclicity from growth exponents, named generator facts or, failing
/// those, reports horizon evidence for rows `j <= j_max`.
pub fn hypercyclicity_test(
    w: &WeightSequence,
    space: &SpaceModel,
    j_max: usize,
    horizon: usize,
) -> Result<HypercyclicityReport> {
    if w.is_bilateral() || space.bilateral {
        return Err(Error::domain(
            "hypercyclicity of bilateral shifts is decided by the bilateral verdict",
        ));
    }
    if j_max == 0 || horizon == 0 {
        return Err(Error::domain("j_max and horizon must be positive"));
    }
    let mut report = HypercyclicityReport {
        outcome: Hypercyclicity::Unknown,
        certified: false,
        witness_j: None,
        horizon,
        evidence: evidence(w, space, j_max, horizon),
        note: String::new(),
    };

    if let Some(g) = w.named_generator() {
        if matches!(space.rows, RowFamily::Unit) && g.partial_sums_diverge() {
            report.outcome = Hypercyclicity::Hypercyclic;
            report.certified = true;
            report.note = format!("partial sums of the {} weights are unbounded above", g.name());
        } else {
            report.note = "named weights on weighted rows are only checked on the horizon".into();
        }
        return Ok(report);
    }

    let (Some(a), Some(sup)) = (w.asymptotics(), space.row_sup()) else {
        report.note = "no growth exponents for these weights or rows; horizon evidence only".into();
        return Ok(report);
    };
    let row_sign = |alpha: f64, beta: f64| lex_sign(&[-a.quad, -a.nlogn, beta - a.lin, alpha - a.log]);
    if row_sign(sup.alpha, sup.beta) < 0 {
        report.outcome = Hypercyclicity::Hypercyclic;
        report.certified = true;
        report.note = "sum of log weights outgrows every row".into();
        return Ok(report);
    }
    let limit = space.row_count().unwrap_or(WITNESS_ROW_LIMIT);
    for j in 1..=limit {
        let Some(g) = space.row_growth(j) else { break };
        if row_sign(g.alpha, g.beta) >= 0 {
            report.outcome = Hypercyclicity::NotHypercyclic;
            report.certified = true;
            report.witness_j = Some(j);
            report.note = format!("row {j} keeps ln a_(j,n) - S_n bounded below");
            return Ok(report);
        }
    }
    report.note = format!("no row up to {limit} bounds the partial sums and the rows are not dominated");
    Ok(report)
}
