//! Hypercyclic-subspace verdicts for unilateral and bilateral weighted shifts.

use serde::Serialize;

use crate::certified::{lex_sign, LOG_TOL};
use crate::criteria::certificates::{blockcert_to_growthcert, pump, GrowthCertificate, PumpedCertificate};
use crate::criteria::hyper::{hypercyclicity_test, HypercyclicityReport};
use crate::criteria::tail::{theta, Criterion, CriterionValue, Route, Theta};
use crate::error::{Error, Result};
use crate::spaces::{check_condition_b, ConditionReport, Holds, Horizons, RowFamily, SpaceModel};
use crate::weights::WeightSequence;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Outcome {
    HasSubspace,
    NoSubspace,
    NotHypercyclic,
    UnknownAtHorizon,
    Boundary,
}

impl Outcome {
    /// Whether the outcome is a proven statement rather than a horizon report.
    pub fn is_definitive(self) -> bool {
        matches!(self, Outcome::HasSubspace | Outcome::NoSubspace | Outcome::NotHypercyclic)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct VerdictCertificate {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_m: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub block: Option<crate::criteria::tail::BlockCertificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pumped: Option<PumpedCertificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub growth: Option<GrowthCertificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bilateral: Option<BilateralReport>,
    pub rule: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub outcome: Outcome,
    pub weights: String,
    pub space: String,
    #[serde(rename = "J")]
    pub big_j: usize,
    /// Criterion values of the deciding `(J, m)` pair.
    pub criterion_values: Vec<CriterionValue>,
    pub theta: Vec<Theta>,
    pub certificate: VerdictCertificate,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hypercyclicity: Option<HypercyclicityReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub condition_b: Option<ConditionReport>,
    pub horizons: Horizons,
    pub notes: Vec<String>,
}

impl Verdict {
    fn new(w: &WeightSequence, space: &SpaceModel, big_j: usize, h: &Horizons) -> Self {
        Verdict {
            outcome: Outcome::UnknownAtHorizon,
            weights: w.render(),
            space: space.render(),
            big_j,
            criterion_values: Vec::new(),
            theta: Vec::new(),
            certificate: VerdictCertificate::default(),
            hypercyclicity: None,
            condition_b: None,
            horizons: *h,
            notes: Vec::new(),
        }
    }

    pub fn theta_for(&self, m: usize) -> Option<&Theta> {
        self.theta.iter().find(|t| t.m == m)
    }
}

fn check_horizons(h: &Horizons) -> Result<()> {
    if h.j_max == 0 || h.m_max == 0 || h.n_max == 0 || h.k_horizon < 1 {
        return Err(Error::domain("horizons must be positive"));
    }
    Ok(())
}

/// Verdict with the canonical seminorm index `J = 1`.
pub fn subspace_verdict(w: &WeightSequence, space: &SpaceModel, h: &Horizons) -> Result<Verdict> {
    subspace_verdict_at(w, space, 1, h)
}

/// Growth exponents force `theta(J, m) = +inf` for every `m`.
fn symbolic_no_subspace(w: &WeightSequence, space: &SpaceModel, big_j: usize) -> bool {
    let (Some(a), Some(gj), Some(sup)) = (w.asymptotics(), space.row_growth(big_j), space.row_sup()) else {
        return false;
    };
    a.quad > LOG_TOL || (sup.beta <= gj.beta + LOG_TOL && a.nlogn > LOG_TOL)
}

pub fn subspace_verdict_at(
    w: &WeightSequence,
    space: &SpaceModel,
    big_j: usize,
    h: &Horizons,
) -> Result<Verdict> {
    check_horizons(h)?;
    if w.is_bilateral() || space.bilateral {
        return bilateral_verdict(w, space, h.k_horizon);
    }
    let mut v = Verdict::new(w, space, big_j, h);
    let identical = space.rows_identical();
    if !identical {
        let cb = check_condition_b(space, big_j, h)?;
        let ok = cb.certified && cb.holds == Holds::Holds;
        v.condition_b = Some(cb);
        if !ok {
            v.notes.push("condition (B) unverified".into());
            return Ok(v);
        }
    }

    let hyp = hypercyclicity_test(w, space, h.j_max, h.k_horizon.max(1) as usize)?;
    let ms: Vec<usize> = if identical { vec![big_j] } else { (1..=h.m_max).collect() };
    for &m in &ms {
        v.theta.push(theta(&Criterion::new(w, space, big_j, m)?, h.n_max, h.k_horizon)?);
    }
    let certified_hyp = hyp.certified_hypercyclic();
    let not_hyp = hyp.certified_not_hypercyclic();
    v.hypercyclicity = Some(hyp);
    v.criterion_values = v.theta[0].criterion_values.clone();

    if not_hyp {
        v.outcome = Outcome::NotHypercyclic;
        v.certificate.rule = "partial sums of the log weights stay dominated by a row".into();
        return Ok(v);
    }

    let bounded = v
        .theta
        .iter()
        .find(|t| t.value.status.is_certified() && t.value.log_value <= LOG_TOL);
    if let Some(t) = bounded {
        let m = t.m;
        v.criterion_values = t.criterion_values.clone();
        if certified_hyp {
            v.outcome = Outcome::HasSubspace;
            v.certificate.witness_m = Some(m);
            v.certificate.rule = format!("theta(J = {big_j}, m = {m}) <= 1 is certified for a hypercyclic shift");
        } else {
            v.notes.push(format!("theta(J = {big_j}, m = {m}) <= 1 but hypercyclicity is not certified"));
        }
        return Ok(v);
    }

    let jj = &v.theta[0];
    let jj_infinite = jj.value.status.is_certified() && jj.value.log_value == f64::INFINITY;
    if jj_infinite {
        if let Some(block) = jj.block.clone() {
            let pumped = pump(&block, &block, w, space, h.k_horizon)?;
            if identical {
                v.certificate.growth = blockcert_to_growthcert(&block, w, space, h.k_horizon).ok();
            }
            v.certificate.pumped = pumped;
            v.certificate.block = Some(block);
        }
    }
    let pumped_exact = v.certificate.pumped.as_ref().is_some_and(|p| {
        p.block_jj.exact && p.lower_bound > p.log_k && p.checked_inf >= p.lower_bound - LOG_TOL
    });
    if identical && jj_infinite && (pumped_exact || matches!(jj.route, Route::SymbolicGrowth)) {
        v.outcome = Outcome::NoSubspace;
        v.certificate.rule = if pumped_exact {
            "a window block pumps past every bound, so theta = +inf".into()
        } else {
            "growth exponents drive every window to +inf, so theta = +inf".into()
        };
        return Ok(v);
    }
    if !identical && symbolic_no_subspace(w, space, big_j) {
        v.outcome = Outcome::NoSubspace;
        v.certificate.rule = "growth exponents drive every (J, m) window to +inf".into();
        return Ok(v);
    }

    if v
        .theta
        .iter()
        .any(|t| !t.value.status.is_certified() && t.value.log_value.abs() <= LOG_TOL)
    {
        v.outcome = Outcome::Boundary;
        v.notes.push("theta is within the tolerance band of 1 without a structural certificate".into());
        return Ok(v);
    }
    if v.theta.iter().all(|t| t.value.status.is_certified()) && !identical {
        v.notes.push(format!("no m <= {} certifies a finite theta", h.m_max));
    }
    Ok(v)
}

/// Per-index evidence for the bilateral product conditions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BilateralRow {
    pub j: i64,
    /// `min_{n <= H} sum_{v=0}^{n-1} ln|w_{j-v}| + ln a_{j-n} - ln a_j`.
    #[serde(serialize_with = "crate::certified::ser_ext")]
    pub backward_min: f64,
    #[serde(serialize_with = "crate::certified::ser_ext")]
    pub backward_at_h: f64,
    /// `max_{n <= H} sum_{v=1}^{n} ln|w_{j+v}| + ln a_j - ln a_{j+n}`.
    #[serde(serialize_with = "crate::certified::ser_ext")]
    pub forward_max: f64,
    #[serde(serialize_with = "crate::certified::ser_ext")]
    pub forward_at_h: f64,
    /// Backward product below `1/H` and forward product above `H` at `n = H`.
    pub met_at_h: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BilateralReport {
    pub horizon: i64,
    /// Eventual sign of the backward log-products (`-1`: to `-inf`).
    pub backward_sign: Option<i8>,
    /// Eventual sign of the forward log-products (`1`: to `+inf`).
    pub forward_sign: Option<i8>,
    pub rows: Vec<BilateralRow>,
}

/// Rows of the bilateral test set.
pub const BILATERAL_TEST_SET: std::ops::RangeInclusive<i64> = -3..=3;

fn bilateral_row(w: &WeightSequence, space: &SpaceModel, j: i64, horizon: i64) -> BilateralRow {
    let la = |k: i64| space.log_a_unchecked(1, k);
    let (mut back, mut fwd) = (0.0, 0.0);
    let mut row = BilateralRow {
        j,
        backward_min: f64::INFINITY,
        backward_at_h: f64::NAN,
        forward_max: f64::NEG_INFINITY,
        forward_at_h: f64::NAN,
        met_at_h: false,
    };
    for n in 1..=horizon {
        back += w.log_at_unchecked(j - n + 1);
        fwd += w.log_at_unchecked(j + n);
        let b = back + la(j - n) - la(j);
        let f = fwd + la(j) - la(j + n);
        row.backward_min = row.backward_min.min(b);
        row.forward_max = row.forward_max.max(f);
        row.backward_at_h = b;
        row.forward_at_h = f;
    }
    let ln_h = (horizon as f64).ln();
    row.met_at_h = row.backward_at_h <= -ln_h && row.forward_at_h >= ln_h;
    row
}

/// Eventual signs of the backward and forward log-products from growth exponents.
fn bilateral_signs(w: &WeightSequence, space: &SpaceModel) -> Option<(i8, i8)> {
    let (pos, nonpos) = w.bilateral_halves()?;
    let (ap, an) = (pos.asymptotics()?, nonpos.asymptotics()?);
    let ((alpha_p, beta_p), (alpha_n, beta_n)) = match &space.rows {
        RowFamily::Unit => ((0.0, 0.0), (0.0, 0.0)),
        RowFamily::WeightVector { v, inv_p } => {
            let (vp, vn) = v.bilateral_halves()?;
            let (gp, gn) = (vp.log_term_growth()?, vn.log_term_growth()?);
            ((inv_p * gp.0, inv_p * gp.1), (inv_p * gn.0, inv_p * gn.1))
        }
        _ => return None,
    };
    let back = lex_sign(&[an.quad, an.nlogn, an.lin + beta_n, an.log + alpha_n]);
    let fwd = lex_sign(&[ap.quad, ap.nlogn, ap.lin - beta_p, ap.log - alpha_p]);
    Some((back, fwd))
}

/// Verdict for bilateral shifts: hypercyclic ones always carry a hypercyclic subspace.
pub fn bilateral_verdict(w: &WeightSequence, space: &SpaceModel, horizon: i64) -> Result<Verdict> {
    if !w.is_bilateral() || !space.bilateral {
        return Err(Error::domain(
            "the bilateral verdict needs bilateral weights on a bilateral space",
        ));
    }
    if horizon < 1 {
        return Err(Error::domain("horizon must be positive"));
    }
    let h = Horizons {
        k_horizon: horizon,
        ..Horizons::default()
    };
    let mut v = Verdict::new(w, space, 1, &h);
    let signs = bilateral_signs(w, space);
    let report = BilateralReport {
        horizon,
        backward_sign: signs.map(|s| s.0),
        forward_sign: signs.map(|s| s.1),
        rows: BILATERAL_TEST_SET.map(|j| bilateral_row(w, space, j, horizon)).collect(),
    };
    match signs {
        Some((-1, 1)) => {
            v.outcome = Outcome::HasSubspace;
            v.certificate.rule =
                "backward products tend to 0 and forward products to infinity at every index".into();
        }
        Some((b, f)) if b >= 0 || f <= 0 => {
            v.outcome = Outcome::NotHypercyclic;
            v.certificate.rule = if b >= 0 {
                "backward products stay bounded away from 0".into()
            } else {
                "forward products stay bounded".into()
            };
        }
        _ => {
            let met = report.rows.iter().all(|r| r.met_at_h);
            v.notes.push(format!(
                "no growth exponents; product conditions {} at the horizon for every test index",
                if met { "met" } else { "not met" }
            ));
        }
    }
    v.certificate.bilateral = Some(report);
    Ok(v)
}
