//! Both sides of the tail-start equivalence
//! `sup_n sup_N inf_{k>=N} q(n, k) > 0  <=>  sup_n inf_{k>=base} q(n, k) = +inf`,
//! evaluated exactly on eventually periodic weights.
//!
//! On spaces with distinct rows the statement is a conjunction over `m`; it is
//! evaluated for `m in [1, j]`, which contains the `(j, j)` block the pumping uses.

use serde::Serialize;

use crate::certified::{trend, Trend, LOG_TOL};
use crate::criteria::tail::Criterion;
use crate::error::{Error, Result};
use crate::spaces::SpaceModel;
use crate::weights::{PeriodicTail, WeightSequence};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TriState {
    Holds,
    Fails,
    Unknown,
}

impl TriState {
    fn from_bool(b: bool) -> Self {
        if b {
            TriState::Holds
        } else {
            TriState::Fails
        }
    }

    fn and(self, other: TriState) -> TriState {
        match (self, other) {
            (TriState::Fails, _) | (_, TriState::Fails) => TriState::Fails,
            (TriState::Holds, TriState::Holds) => TriState::Holds,
            _ => TriState::Unknown,
        }
    }
}

/// One `(j, m)` pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CondNRow {
    pub m: usize,
    pub lhs: TriState,
    pub rhs: TriState,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CondNReport {
    pub weights: String,
    pub space: String,
    pub j: usize,
    pub lhs: TriState,
    pub rhs: TriState,
    /// False only when both sides are decided and differ.
    pub agree: bool,
    pub rows: Vec<CondNRow>,
    pub period: Option<usize>,
    #[serde(serialize_with = "crate::certified::ser_ext_opt")]
    pub drift: Option<f64>,
}

/// Exact `inf_{k in [lo, ...)} W(n, k)` on a periodic weight tail: the window
/// repeats with period `l` once `k >= start - 1`.
fn window_inf(w: &WeightSequence, t: &PeriodicTail, n: usize, lo: i64) -> f64 {
    let hi = lo.max(t.start - 1) + t.period() as i64 - 1;
    (lo..=hi).map(|k| w.window_log_unchecked(n, k)).fold(f64::INFINITY, f64::min)
}

fn decided(lhs: TriState, rhs: TriState) -> bool {
    !(lhs != TriState::Unknown && rhs != TriState::Unknown && lhs != rhs)
}

fn rows_identical_check(c: &Criterion) -> Option<(TriState, TriState, String)> {
    let f = c.frame()?;
    let l = f.l;
    let n_star = f.n_star();
    let tail = |n: usize| c.exact_periodic_inf(&f, n, n_star).0;
    let best = (1..=l).map(tail).fold(f64::NEG_INFINITY, f64::max);
    let growth = tail(1 + l) - tail(1);
    let lhs = growth > LOG_TOL || best > LOG_TOL;
    let full = |n: usize| c.exact_periodic_inf(&f, n, c.base()).0;
    let n_a = f.n_a();
    let rhs_growth = full(n_a + l) - full(n_a);
    let rhs = rhs_growth > LOG_TOL;
    Some((
        TriState::from_bool(lhs),
        TriState::from_bool(rhs),
        format!("best tail window {best:.6}, per-period growth {rhs_growth:.6}"),
    ))
}

/// `(lhs, rhs)` for one `(j, m)` pair on rows with growth exponents.
fn kothe_pair(w: &WeightSequence, space: &SpaceModel, t: &PeriodicTail, j: usize, m: usize) -> CondNRow {
    let (Some(gj), Some(gm)) = (space.row_growth(j), space.row_growth(m)) else {
        return CondNRow {
            m,
            lhs: TriState::Unknown,
            rhs: TriState::Unknown,
            reason: "rows without growth exponents".into(),
        };
    };
    let l = t.period();
    let base = space.index_base;
    let row = |lhs, rhs, reason: String| CondNRow { m, lhs, rhs, reason };
    let tr = trend(gj.beta - gm.beta, gj.alpha - gm.alpha);
    if tr == Trend::ToMinusInf {
        return row(TriState::Fails, TriState::Fails, "every window decays to 0 in k".into());
    }
    // rhs: inf over k >= base grows like n (D / l - beta_m) up to O(ln n).
    let n_a = ((t.start - 1 - base).max(1)) as usize;
    let d_rhs = window_inf(w, t, n_a + l, base) - window_inf(w, t, n_a, base);
    let slope = d_rhs / l as f64 - gm.beta;
    let rhs = if slope > LOG_TOL {
        TriState::Holds
    } else if slope < -LOG_TOL || (gj.alpha == 0.0 && gm.alpha == 0.0) {
        TriState::Fails
    } else {
        TriState::Unknown
    };
    if tr == Trend::ToPlusInf {
        return row(TriState::Holds, rhs, format!("windows grow without bound in k; rhs slope {slope:.6}"));
    }
    // Bounded trend: liminf_k q(n, k) = inf over the periodic tail of W(n, .) - n beta_m + gamma_j - gamma_m.
    let n_star = (t.start - 1).max(base);
    let gd = gj.gamma - gm.gamma;
    let lim = |n: usize| window_inf(w, t, n, n_star) - n as f64 * gm.beta + gd;
    let best = (1..=l).map(lim).fold(f64::NEG_INFINITY, f64::max);
    let lhs_slope = lim(1 + l) - lim(1);
    let lhs = TriState::from_bool(lhs_slope > LOG_TOL || best > LOG_TOL);
    row(lhs, rhs, format!("best liminf {best:.6}, liminf growth {lhs_slope:.6}, rhs slope {slope:.6}"))
}

/// Evaluates both sides for row `j`; `space = None` means `l^1`.
pub fn cond_n_check(w: &WeightSequence, space: Option<&SpaceModel>, j: Option<usize>) -> Result<CondNReport> {
    let default_space;
    let space = match space {
        Some(s) => s,
        None => {
            default_space = SpaceModel::lp(1.0)?;
            &default_space
        }
    };
    let j = j.unwrap_or(1);
    if j == 0 {
        return Err(Error::domain("row index j starts at 1"));
    }
    let tail = w.periodic_tail();
    let mut report = CondNReport {
        weights: w.render(),
        space: space.render(),
        j,
        lhs: TriState::Unknown,
        rhs: TriState::Unknown,
        agree: true,
        rows: Vec::new(),
        period: tail.as_ref().map(|t| t.period()),
        drift: tail.as_ref().map(|t| t.drift()),
    };
    if space.rows_identical() {
        let c = Criterion::new(w, space, j, j)?;
        let (lhs, rhs, reason) = rows_identical_check(&c).unwrap_or((
            TriState::Unknown,
            TriState::Unknown,
            "weights or rows are not eventually periodic".into(),
        ));
        report.rows.push(CondNRow { m: j, lhs, rhs, reason });
    } else if let Some(t) = &tail {
        if w.is_bilateral() || space.bilateral {
            return Err(Error::domain("the tail-start equivalence is stated for unilateral shifts"));
        }
        report.rows = (1..=j).map(|m| kothe_pair(w, space, t, j, m)).collect();
    } else {
        report.rows = (1..=j)
            .map(|m| CondNRow {
                m,
                lhs: TriState::Unknown,
                rhs: TriState::Unknown,
                reason: "weights are not eventually periodic".into(),
            })
            .collect();
    }
    report.lhs = report.rows.iter().fold(TriState::Holds, |a, r| a.and(r.lhs));
    report.rhs = report.rows.iter().fold(TriState::Holds, |a, r| a.and(r.rhs));
    report.agree = decided(report.lhs, report.rhs);
    Ok(report)
}
