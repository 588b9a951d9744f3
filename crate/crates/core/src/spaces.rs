//! Sequence spaces as Köthe matrices `a_{j,k}` with their seminorms, plus the
//! structural checks on `A` that the Köthe-space criteria need.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::certified::{lex_sign, trend, Trend, LOG_TOL};
use crate::error::{Error, Result};
use crate::weights::{parse_weight_spec, PeriodicTail, WeightSequence};

/// `log a_{j,k} = alpha ln k + beta k + gamma` (exact) for one row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthRow {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "tag", rename_all = "snake_case")]
pub enum CustomRow {
    Growth(GrowthRow),
    /// Explicit `log a_{j,k}` for `k = base, base+1, ...`; the last value
    /// repeats past the end.
    Values { logs: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "tag", rename_all = "snake_case")]
pub enum RowFamily {
    /// `a_{j,k} = 1`.
    Unit,
    /// `a_{j,k} = j^k`.
    PowerOfJ,
    /// `a_{j,k} = k^j`.
    PowerOfK,
    /// `a_{j,k} = k^{1 - 1/j}`.
    FracPowerOfK,
    /// `a_{j,k} = |v_k|^{inv_p}` for every `j`.
    WeightVector { v: WeightSequence, inv_p: f64 },
    /// Rows from a file; rows past the last repeat the last one.
    Custom { source: String, rows: Vec<CustomRow> },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "tag", content = "p", rename_all = "snake_case")]
pub enum Norm {
    Lp(f64),
    C0,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpaceModel {
    pub rows: RowFamily,
    pub norm: Norm,
    pub index_base: i64,
    pub bilateral: bool,
    #[serde(skip)]
    spec: String,
}

/// `(sup_j alpha_j, sup_j beta_j)`; either may be `+inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RowSup {
    pub alpha: f64,
    pub beta: f64,
}

impl SpaceModel {
    pub fn lp(p: f64) -> Result<Self> {
        check_p(p)?;
        Ok(Self::new(RowFamily::Unit, Norm::Lp(p), 1, false, format!("lp:{p}")))
    }

    pub fn c0() -> Self {
        Self::new(RowFamily::Unit, Norm::C0, 1, false, "c0".into())
    }

    pub fn lpv(p: f64, v: WeightSequence) -> Result<Self> {
        check_p(p)?;
        let spec = format!("lpv:{p}:{v}");
        Ok(Self::new(RowFamily::WeightVector { v, inv_p: 1.0 / p }, Norm::Lp(p), 1, false, spec))
    }

    pub fn c0v(v: WeightSequence) -> Self {
        let spec = format!("c0v:{v}");
        Self::new(RowFamily::WeightVector { v, inv_p: 1.0 }, Norm::C0, 1, false, spec)
    }

    /// `H(C)` as `lambda^1(A)` with `a_{j,k} = j^k`, `k >= 0`.
    pub fn entire() -> Self {
        Self::new(RowFamily::PowerOfJ, Norm::Lp(1.0), 0, false, "entire".into())
    }

    /// `s` as `lambda^1(A)` with `a_{j,k} = k^j`, `k >= 1`.
    pub fn rapid() -> Self {
        Self::new(RowFamily::PowerOfK, Norm::Lp(1.0), 1, false, "rapid".into())
    }

    /// `lambda^1(A)` with `a_{j,k} = k^{1-1/j}`, which violates condition (B).
    pub fn frac_power_of_k() -> Self {
        Self::new(RowFamily::FracPowerOfK, Norm::Lp(1.0), 1, false, "fracpow".into())
    }

    pub fn custom(source: &str, rows: Vec<CustomRow>, norm: Norm, index_base: i64) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::domain("Köthe matrix needs at least one row"));
        }
        let prefix = match norm {
            Norm::C0 => "kothe-c0",
            Norm::Lp(_) => "kothe",
        };
        let s = Self::new(
            RowFamily::Custom {
                source: source.into(),
                rows,
            },
            norm,
            index_base,
            false,
            format!("{prefix}:{source}"),
        );
        s.check_monotone_in_j(s.row_count().unwrap_or(1) + 1, 256)?;
        Ok(s)
    }

    fn new(rows: RowFamily, norm: Norm, index_base: i64, bilateral: bool, spec: String) -> Self {
        SpaceModel {
            rows,
            norm,
            index_base,
            bilateral,
            spec,
        }
    }

    /// Bilateral counterpart; only defined for spaces with `j`-independent rows.
    pub fn into_bilateral(mut self) -> Result<Self> {
        match &self.rows {
            RowFamily::Unit => {}
            RowFamily::WeightVector { v, .. } if v.is_bilateral() => {}
            RowFamily::WeightVector { .. } => {
                return Err(Error::domain("bilateral weighted spaces need a bilateral weight vector"))
            }
            _ => {
                return Err(Error::domain(
                    "bilateral variants exist only for lp, c0, lpv and c0v",
                ))
            }
        }
        self.bilateral = true;
        self.spec = format!("bi-{}", self.spec);
        Ok(self)
    }

    pub fn render(&self) -> String {
        self.spec.clone()
    }

    pub fn kind_name(&self) -> &'static str {
        match (&self.rows, self.norm) {
            (RowFamily::Unit, Norm::Lp(_)) => "lp",
            (RowFamily::Unit, Norm::C0) => "c0",
            (RowFamily::WeightVector { .. }, Norm::Lp(_)) => "lpv",
            (RowFamily::WeightVector { .. }, Norm::C0) => "c0v",
            (RowFamily::PowerOfJ, _) => "entire",
            (RowFamily::PowerOfK, _) => "rapid",
            (RowFamily::FracPowerOfK, _) => "fracpow",
            (RowFamily::Custom { .. }, Norm::Lp(_)) => "kothe",
            (RowFamily::Custom { .. }, Norm::C0) => "kothe-c0",
        }
    }

    pub fn index_valid(&self, k: i64) -> bool {
        self.bilateral || k >= self.index_base
    }

    /// Whether every seminorm is the same (single-norm spaces).
    pub fn rows_identical(&self) -> bool {
        match &self.rows {
            RowFamily::Unit | RowFamily::WeightVector { .. } => true,
            RowFamily::Custom { rows, .. } => rows.iter().all(|r| r == &rows[0]),
            _ => false,
        }
    }

    /// Number of distinct rows for finite matrices.
    pub(crate) fn row_count(&self) -> Option<usize> {
        match &self.rows {
            RowFamily::Custom { rows, .. } => Some(rows.len()),
            RowFamily::Unit | RowFamily::WeightVector { .. } => Some(1),
            _ => None,
        }
    }

    pub fn log_a(&self, j: usize, k: i64) -> Result<f64> {
        if j == 0 {
            return Err(Error::domain("seminorm index j starts at 1"));
        }
        if !self.index_valid(k) {
            return Err(Error::domain(format!(
                "index {k} is below the index base {} of {}",
                self.index_base, self.spec
            )));
        }
        Ok(self.log_a_unchecked(j, k))
    }

    #[inline]
    pub(crate) fn log_a_unchecked(&self, j: usize, k: i64) -> f64 {
        match &self.rows {
            RowFamily::Unit => 0.0,
            RowFamily::PowerOfJ => k as f64 * (j as f64).ln(),
            RowFamily::PowerOfK => j as f64 * (k as f64).ln(),
            RowFamily::FracPowerOfK => (1.0 - 1.0 / j as f64) * (k as f64).ln(),
            RowFamily::WeightVector { v, inv_p } => inv_p * v.log_at_unchecked(k),
            RowFamily::Custom { rows, .. } => {
                let row = &rows[(j - 1).min(rows.len() - 1)];
                match row {
                    CustomRow::Growth(g) => {
                        let lk = if g.alpha == 0.0 { 0.0 } else { g.alpha * (k as f64).ln() };
                        lk + g.beta * k as f64 + g.gamma
                    }
                    CustomRow::Values { logs } => {
                        let i = (k - self.index_base).max(0) as usize;
                        logs[i.min(logs.len() - 1)]
                    }
                }
            }
        }
    }

    /// Growth form of row `j`, when declared.
    pub fn row_growth(&self, j: usize) -> Option<GrowthRow> {
        let g = |alpha, beta| Some(GrowthRow { alpha, beta, gamma: 0.0 });
        match &self.rows {
            RowFamily::Unit => g(0.0, 0.0),
            RowFamily::PowerOfJ => g(0.0, (j as f64).ln()),
            RowFamily::PowerOfK => g(j as f64, 0.0),
            RowFamily::FracPowerOfK => g(1.0 - 1.0 / j as f64, 0.0),
            RowFamily::WeightVector { v, inv_p } => {
                let (a, b) = v.log_term_growth()?;
                g(inv_p * a, inv_p * b)
            }
            RowFamily::Custom { rows, .. } => match &rows[(j - 1).min(rows.len() - 1)] {
                CustomRow::Growth(r) => Some(*r),
                CustomRow::Values { .. } => g(0.0, 0.0),
            },
        }
    }

    /// Periodic structure of row `j`: `log a_{j,k} = logs[(k - start) mod p]`
    /// for `k >= start`.
    pub fn row_periodic(&self, j: usize) -> Option<PeriodicTail> {
        let flat = |start: i64, v: f64| {
            Some(PeriodicTail {
                start,
                logs: vec![v],
            })
        };
        match &self.rows {
            RowFamily::Unit => flat(self.index_base, 0.0),
            RowFamily::PowerOfJ if j == 1 => flat(self.index_base, 0.0),
            RowFamily::FracPowerOfK if j == 1 => flat(self.index_base, 0.0),
            RowFamily::WeightVector { v, inv_p } => {
                let pt = v.periodic_tail()?;
                Some(PeriodicTail {
                    start: pt.start,
                    logs: pt.logs.iter().map(|l| inv_p * l).collect(),
                })
            }
            RowFamily::Custom { rows, .. } => match &rows[(j - 1).min(rows.len() - 1)] {
                CustomRow::Growth(g) if g.alpha == 0.0 && g.beta == 0.0 => flat(self.index_base, g.gamma),
                CustomRow::Values { logs } => flat(self.index_base + logs.len() as i64 - 1, *logs.last().unwrap()),
                _ => None,
            },
            _ => None,
        }
    }

    /// `log a_{j,k} = slope * k + tail(k)` with `tail` periodic from its start.
    pub fn row_affine_periodic(&self, j: usize) -> Option<(f64, PeriodicTail)> {
        let flat = |slope: f64, v: f64| {
            Some((
                slope,
                PeriodicTail {
                    start: self.index_base,
                    logs: vec![v],
                },
            ))
        };
        match &self.rows {
            RowFamily::PowerOfJ => flat((j as f64).ln(), 0.0),
            RowFamily::Custom { rows, .. } => match &rows[(j - 1).min(rows.len() - 1)] {
                CustomRow::Growth(g) if g.alpha == 0.0 => flat(g.beta, g.gamma),
                _ => self.row_periodic(j).map(|t| (0.0, t)),
            },
            _ => self.row_periodic(j).map(|t| (0.0, t)),
        }
    }

    /// Suprema of the growth exponents over all rows.
    pub fn row_sup(&self) -> Option<RowSup> {
        match &self.rows {
            RowFamily::PowerOfJ => Some(RowSup {
                alpha: 0.0,
                beta: f64::INFINITY,
            }),
            RowFamily::PowerOfK => Some(RowSup {
                alpha: f64::INFINITY,
                beta: 0.0,
            }),
            RowFamily::FracPowerOfK => Some(RowSup { alpha: 1.0, beta: 0.0 }),
            _ => {
                let n = self.row_count()?;
                let mut sup = RowSup {
                    alpha: f64::NEG_INFINITY,
                    beta: f64::NEG_INFINITY,
                };
                for j in 1..=n {
                    let g = self.row_growth(j)?;
                    sup.alpha = sup.alpha.max(g.alpha);
                    sup.beta = sup.beta.max(g.beta);
                }
                Some(sup)
            }
        }
    }

    /// Whether `a_{j,k} <= a_{j,k+1}` for all `j, k`, when decidable.
    pub fn rows_nondecreasing_in_k(&self) -> Option<bool> {
        match &self.rows {
            RowFamily::Unit | RowFamily::PowerOfJ | RowFamily::PowerOfK | RowFamily::FracPowerOfK => Some(true),
            RowFamily::WeightVector { v, .. } => v.is_nondecreasing(),
            RowFamily::Custom { rows, .. } => Some(rows.iter().all(|r| match r {
                CustomRow::Growth(g) => g.alpha >= 0.0 && g.beta >= 0.0,
                CustomRow::Values { logs } => logs.windows(2).all(|w| w[0] <= w[1]),
            })),
        }
    }

    /// Checks `a_{j,k} <= a_{j+1,k}` on a sample grid.
    pub fn check_monotone_in_j(&self, j_max: usize, k_span: i64) -> Result<()> {
        let lo = if self.bilateral { -k_span } else { self.index_base };
        for j in 1..j_max {
            for k in lo..=lo + 2 * k_span {
                let (a, b) = (self.log_a_unchecked(j, k), self.log_a_unchecked(j + 1, k));
                if a > b + LOG_TOL {
                    return Err(Error::domain(format!(
                        "Köthe rows must be non-decreasing in j: a({j},{k}) > a({},{k})",
                        j + 1
                    )));
                }
            }
        }
        Ok(())
    }

    /// `log p_j(x)` for `x = sum_k x_k e_k` given as `(k, ln|x_k|)`.
    pub fn seminorm_log<I>(&self, j: usize, entries: I) -> f64
    where
        I: IntoIterator<Item = (i64, f64)>,
    {
        let terms = entries
            .into_iter()
            .map(|(k, lx)| lx + self.log_a_unchecked(j, k));
        match self.norm {
            Norm::C0 => terms.fold(f64::NEG_INFINITY, f64::max),
            Norm::Lp(p) => {
                let scaled: Vec<f64> = terms.map(|t| p * t).collect();
                log_sum_exp(&scaled) / p
            }
        }
    }
}

fn check_p(p: f64) -> Result<()> {
    if !(p.is_finite() && p >= 1.0) {
        return Err(Error::domain(format!("norm exponent p = {p} must lie in [1, inf)")));
    }
    Ok(())
}

pub(crate) fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

impl fmt::Display for SpaceModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.spec)
    }
}

// ---------------------------------------------------------------------------
// Parsing

pub fn parse_space_spec(spec: &str) -> Result<SpaceModel> {
    let spec = spec.trim_end();
    let (bi, body, off) = match spec.strip_prefix("bi-") {
        Some(rest) => (true, rest, 3),
        None => (false, spec, 0),
    };
    let (head, rest) = match body.find(':') {
        Some(i) => (&body[..i], Some(&body[i + 1..])),
        None => (body, None),
    };
    let rest_pos = off + head.len() + 1;
    let need = |what: &str| rest.ok_or_else(|| Error::parse(spec, off + head.len(), format!("`{head}` expects `:{what}`")));
    let no_arg = |s: SpaceModel| match rest {
        None => Ok(s),
        Some(_) => Err(Error::parse(spec, rest_pos, format!("`{head}` takes no argument"))),
    };
    let parse_p = |s: &str, pos: usize| -> Result<f64> {
        let p: f64 = s
            .parse()
            .map_err(|_| Error::parse(spec, pos, format!("expected exponent p, found `{s}`")))?;
        check_p(p).map_err(|e| Error::parse(spec, pos, e.to_string()))?;
        Ok(p)
    };
    let shift_weight_err = |e: Error, base: usize| match e {
        Error::Parse { pos, msg, .. } => Error::parse(spec, base + pos, msg),
        other => other,
    };
    let space = match head {
        "lp" => SpaceModel::lp(parse_p(need("<p>")?, rest_pos)?)?,
        "c0" => no_arg(SpaceModel::c0())?,
        "lpv" => {
            let r = need("<p>:<weight-spec>")?;
            let (ps, ws) = r
                .split_once(':')
                .ok_or_else(|| Error::parse(spec, rest_pos, "expected `lpv:<p>:<weight-spec>`"))?;
            let p = parse_p(ps, rest_pos)?;
            let v = parse_weight_spec(ws).map_err(|e| shift_weight_err(e, rest_pos + ps.len() + 1))?;
            SpaceModel::lpv(p, v)?
        }
        "c0v" => {
            let ws = need("<weight-spec>")?;
            SpaceModel::c0v(parse_weight_spec(ws).map_err(|e| shift_weight_err(e, rest_pos))?)
        }
        "entire" => no_arg(SpaceModel::entire())?,
        "rapid" => no_arg(SpaceModel::rapid())?,
        "kothe" | "kothe-c0" => {
            let path = need("<path>")?;
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::parse(spec, rest_pos, format!("cannot read `{path}`: {e}")))?;
            parse_kothe_text(path, &text, head == "kothe-c0")?
        }
        "" => return Err(Error::parse(spec, off, "empty space spec")),
        other => return Err(Error::parse(spec, off, format!("unknown space `{other}`"))),
    };
    if bi {
        space.into_bilateral().map_err(|e| Error::parse(spec, 0, e.to_string()))
    } else {
        Ok(space)
    }
}

/// Köthe CSV: optional `base=<b>` and `p=<p>` headers, then one row per line,
/// either `growth,alpha,beta,gamma` (`log a = alpha ln k + beta k + gamma`) or
/// `values,l0,l1,...` (explicit logs from the index base, last value repeated).
pub fn parse_kothe_text(source: &str, text: &str, c0: bool) -> Result<SpaceModel> {
    let mut base = 1i64;
    let mut p = 1.0;
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        let lineno = lineno + 1;
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |msg: String| Error::parse(line, 0, format!("line {lineno}: {msg}"));
        if let Some(b) = line.strip_prefix("base=") {
            base = match b.trim() {
                "0" => 0,
                "1" => 1,
                other => return Err(bad(format!("index base must be 0 or 1, found `{other}`"))),
            };
            continue;
        }
        if let Some(ps) = line.strip_prefix("p=") {
            p = ps.trim().parse().map_err(|_| bad(format!("bad exponent `{ps}`")))?;
            check_p(p).map_err(|e| bad(e.to_string()))?;
            continue;
        }
        let mut cells = line.split(',').map(str::trim);
        let tag = cells.next().unwrap_or("");
        let nums: Vec<f64> = cells
            .map(|c| {
                c.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| bad(format!("expected a finite number, found `{c}`")))
            })
            .collect::<Result<_>>()?;
        match tag {
            "growth" => {
                let [alpha, beta, gamma] = nums[..] else {
                    return Err(bad("growth rows take alpha,beta,gamma".into()));
                };
                if alpha != 0.0 && base == 0 {
                    return Err(bad("ln k growth needs index base 1".into()));
                }
                rows.push(CustomRow::Growth(GrowthRow { alpha, beta, gamma }));
            }
            "values" => {
                if nums.is_empty() {
                    return Err(bad("values row is empty".into()));
                }
                rows.push(CustomRow::Values { logs: nums });
            }
            other => return Err(bad(format!("unknown row tag `{other}`"))),
        }
    }
    let norm = if c0 { Norm::C0 } else { Norm::Lp(p) };
    SpaceModel::custom(source, rows, norm, base)
}

/// Built-in spaces for `presets`.
pub fn presets() -> Vec<(&'static str, &'static str)> {
    vec![
        ("lp:<p>", "l^p, a_{j,k} = 1, k >= 1"),
        ("c0", "c_0, a_{j,k} = 1, k >= 1"),
        ("lpv:<p>:<weight-spec>", "l^p(v), a_{j,k} = v_k^{1/p}"),
        ("c0v:<weight-spec>", "c_0(v), a_{j,k} = v_k"),
        ("entire", "H(C) as lambda^1(A), a_{j,k} = j^k, k >= 0"),
        ("rapid", "s as lambda^1(A), a_{j,k} = k^j, k >= 1"),
        ("kothe:<path>", "lambda^p(A) from a CSV of row rules"),
        ("kothe-c0:<path>", "c_0(A) from a CSV of row rules"),
        ("bi-<lp|c0|lpv|c0v>", "bilateral counterpart indexed by Z"),
    ]
}

// ---------------------------------------------------------------------------
// Structural conditions on A

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Holds {
    Holds,
    FailsAtWitness,
    UnknownAtHorizon,
}

/// One `(m, j) -> m_j` assignment with its numeric evidence.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MjWitness {
    pub m: usize,
    pub j: usize,
    pub m_j: Option<usize>,
    /// Largest log ratio seen on the horizon grid for this assignment.
    #[serde(serialize_with = "crate::certified::ser_ext")]
    pub sup_log: f64,
    /// Symbolic limit behaviour in `k` (when the rows carry growth forms).
    pub trend: Option<Trend>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub condition: &'static str,
    pub holds: Holds,
    /// Whether `holds` rests on symbolic structure rather than the horizon alone.
    pub certified: bool,
    #[serde(rename = "J", skip_serializing_if = "Option::is_none")]
    pub big_j: Option<usize>,
    pub witnesses: Vec<MjWitness>,
    /// The `(m, j)` pair with no admissible `m_j`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failing: Option<(usize, usize)>,
    pub rule: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Horizons {
    pub j_max: usize,
    pub m_max: usize,
    pub n_max: usize,
    pub k_horizon: i64,
}

impl Default for Horizons {
    fn default() -> Self {
        Horizons {
            j_max: 8,
            m_max: 8,
            n_max: 32,
            k_horizon: 1024,
        }
    }
}

/// Which ratio limit the search demands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum RatioGoal {
    /// `sup_n limsup_k` finite.
    Bounded,
    /// `lim_k = 0` for every `n`.
    Vanishing,
}

/// Symbolic classification of
/// `log a_{j,k} + log a_{m,n+k} - log a_{J,k} - log a_{mj,n+k}` as `k -> inf`.
fn ratio_trend(s: &SpaceModel, big_j: usize, m: usize, j: usize, mj: usize) -> Option<(Trend, f64)> {
    let (gj, gm, gbj, gmj) = (s.row_growth(j)?, s.row_growth(m)?, s.row_growth(big_j)?, s.row_growth(mj)?);
    let kcoef = gj.beta - gbj.beta + gm.beta - gmj.beta;
    let lncoef = gj.alpha - gbj.alpha + gm.alpha - gmj.alpha;
    // In the bounded case the limit grows like n (beta_m - beta_mj).
    Some((trend(kcoef, lncoef), gm.beta - gmj.beta))
}

fn admissible(goal: RatioGoal, t: Trend, n_slope: f64) -> bool {
    match goal {
        RatioGoal::Vanishing => t == Trend::ToMinusInf,
        RatioGoal::Bounded => match t {
            Trend::ToMinusInf => true,
            Trend::Bounded => n_slope <= LOG_TOL,
            Trend::ToPlusInf => false,
        },
    }
}

/// Proves that no `m_j` at all is admissible for `(m, j)` using row suprema.
fn no_mj_exists(s: &SpaceModel, goal: RatioGoal, big_j: usize, m: usize, j: usize) -> bool {
    let (Some(sup), Some(gj), Some(gm), Some(gbj)) = (s.row_sup(), s.row_growth(j), s.row_growth(m), s.row_growth(big_j)) else {
        return false;
    };
    if !sup.alpha.is_finite() || !sup.beta.is_finite() {
        return false;
    }
    let k_lb = gj.beta - gbj.beta + gm.beta - sup.beta;
    let ln_lb = gj.alpha - gbj.alpha + gm.alpha - sup.alpha;
    match goal {
        // Any m_j leaves kcoef >= k_lb; equality forces beta_mj = sup beta.
        RatioGoal::Bounded => lex_sign(&[k_lb, ln_lb]) > 0,
        RatioGoal::Vanishing => lex_sign(&[k_lb, ln_lb]) >= 0,
    }
}

fn grid_sup(s: &SpaceModel, big_j: usize, m: usize, j: usize, mj: usize, h: &Horizons) -> f64 {
    let mut sup = f64::NEG_INFINITY;
    for n in 0..=h.n_max as i64 {
        let lo = (n + 1).max(s.index_base);
        for k in lo..=h.k_horizon {
            let r = s.log_a_unchecked(j, k) + s.log_a_unchecked(m, n + k)
                - s.log_a_unchecked(big_j, k)
                - s.log_a_unchecked(mj, n + k);
            sup = sup.max(r);
        }
    }
    sup
}

/// Canonical `m_j` for preset families, valid for every `(m, j)`.
fn canonical_mj(s: &SpaceModel, goal: RatioGoal, big_j: usize, m: usize, j: usize) -> Option<(usize, &'static str)> {
    if s.rows_identical() {
        return match goal {
            RatioGoal::Bounded => Some((j, "rows identical: ratio = 1 with m_j = j")),
            RatioGoal::Vanishing => None,
        };
    }
    match s.rows {
        // j^k m^{n+k} / (J^k (2jm)^{n+k}) -> 0.
        RowFamily::PowerOfJ => Some((2 * j * m, "a = j^k: m_j = 2jm")),
        // k^j (n+k)^m / (k^J (n+k)^{m_j}) bounded iff m_j >= j + m - J.
        RowFamily::PowerOfK => {
            let base = (j + m).saturating_sub(big_j);
            let mj = match goal {
                RatioGoal::Bounded => base.max(1),
                RatioGoal::Vanishing => base + 1,
            };
            Some((mj, "a = k^j: least m_j from exponent comparison"))
        }
        _ => None,
    }
}

fn search_conditions(s: &SpaceModel, goal: RatioGoal, name: &'static str, big_j: usize, h: &Horizons) -> ConditionReport {
    let bound = 2 * h.j_max * h.m_max;
    let pairs: Vec<(usize, usize)> = (1..=h.m_max)
        .flat_map(|m| (1..=h.j_max).map(move |j| (m, j)))
        .collect();
    let finite_rows = s.row_count();
    let all_symbolic = (1..=bound.max(finite_rows.unwrap_or(0))).all(|i| s.row_growth(i).is_some());

    let results: Vec<(MjWitness, bool, bool)> = pairs
        .par_iter()
        .map(|&(m, j)| {
            // (witness, symbolically admissible, symbolically impossible)
            if let Some((mj, _)) = canonical_mj(s, goal, big_j, m, j) {
                let t = ratio_trend(s, big_j, m, j, mj).map(|x| x.0);
                return (
                    MjWitness {
                        m,
                        j,
                        m_j: Some(mj),
                        sup_log: grid_sup(s, big_j, m, j, mj, h),
                        trend: t,
                    },
                    true,
                    false,
                );
            }
            if all_symbolic {
                for mj in 1..=bound {
                    let (t, slope) = ratio_trend(s, big_j, m, j, mj).expect("symbolic rows");
                    if admissible(goal, t, slope) {
                        return (
                            MjWitness {
                                m,
                                j,
                                m_j: Some(mj),
                                sup_log: grid_sup(s, big_j, m, j, mj, h),
                                trend: Some(t),
                            },
                            true,
                            false,
                        );
                    }
                }
                let impossible = no_mj_exists(s, goal, big_j, m, j);
                return (
                    MjWitness {
                        m,
                        j,
                        m_j: None,
                        sup_log: grid_sup(s, big_j, m, j, bound, h),
                        trend: ratio_trend(s, big_j, m, j, bound).map(|x| x.0),
                    },
                    false,
                    impossible,
                );
            }
            // Horizon only: least m_j whose grid sup does not grow between the
            // half and full horizon.
            let half = Horizons {
                k_horizon: (h.k_horizon / 2).max(s.index_base + 1),
                ..*h
            };
            for mj in 1..=bound {
                let full = grid_sup(s, big_j, m, j, mj, h);
                let part = grid_sup(s, big_j, m, j, mj, &half);
                let ok = match goal {
                    RatioGoal::Bounded => full <= part + LOG_TOL,
                    RatioGoal::Vanishing => full < part - 1.0,
                };
                if ok {
                    return (
                        MjWitness {
                            m,
                            j,
                            m_j: Some(mj),
                            sup_log: full,
                            trend: None,
                        },
                        false,
                        false,
                    );
                }
            }
            (
                MjWitness {
                    m,
                    j,
                    m_j: None,
                    sup_log: grid_sup(s, big_j, m, j, bound, h),
                    trend: None,
                },
                false,
                false,
            )
        })
        .collect();

    let failing = results.iter().find(|r| r.0.m_j.is_none()).map(|r| (r.0.m, r.0.j));
    let certified_fail = results.iter().find(|r| r.2).map(|r| (r.0.m, r.0.j));
    let all_sym = results.iter().all(|r| r.1);
    let canonical = canonical_mj(s, goal, big_j, 1, 1).map(|c| c.1);
    // Finite matrices: every (m, j) beyond the last row repeats a covered pair.
    let covers_all = canonical.is_some()
        || finite_rows.is_some_and(|r| r <= h.j_max && r <= h.m_max);

    let (holds, certified, failing, rule) = if let Some(fw) = certified_fail {
        (Holds::FailsAtWitness, true, Some(fw), "no m_j can compensate the growth of the (m, j) rows".to_string())
    } else if failing.is_some() {
        (Holds::UnknownAtHorizon, false, failing, format!("no admissible m_j <= {bound} on the horizon"))
    } else if all_sym && covers_all {
        (
            Holds::Holds,
            true,
            None,
            canonical.unwrap_or("least m_j from exponent comparison").to_string(),
        )
    } else {
        (Holds::UnknownAtHorizon, false, None, "empirical bound on the horizon only".to_string())
    };
    ConditionReport {
        condition: name,
        holds,
        certified,
        big_j: Some(big_j),
        witnesses: results.into_iter().map(|r| r.0).collect(),
        failing,
        rule,
    }
}

/// Condition (B) for the seminorm index `big_j`.
pub fn check_condition_b(space: &SpaceModel, big_j: usize, h: &Horizons) -> Result<ConditionReport> {
    check_horizons(big_j, h)?;
    Ok(search_conditions(space, RatioGoal::Bounded, "B", big_j, h))
}

/// Ratio limit `0` instead of boundedness (Schwartz-type condition).
pub fn check_schwartz_condition(space: &SpaceModel, big_j: usize, h: &Horizons) -> Result<ConditionReport> {
    check_horizons(big_j, h)?;
    Ok(search_conditions(space, RatioGoal::Vanishing, "schwartz", big_j, h))
}

fn check_horizons(big_j: usize, h: &Horizons) -> Result<()> {
    if big_j == 0 || h.j_max == 0 || h.m_max == 0 || h.n_max == 0 || h.k_horizon <= 0 {
        return Err(Error::domain("indices and horizons must be positive"));
    }
    Ok(())
}

/// `a_{j,k} <= a_{j,k+1}` and `sup_k a_{j,k}^2 / a_{m_j,k} < inf` for each
/// `j <= j_max`, searching `m_j <= m_map_max`.
pub fn check_condition_b_sufficient(space: &SpaceModel, j_max: usize, m_map_max: usize, k_horizon: i64) -> Result<ConditionReport> {
    if j_max == 0 || m_map_max == 0 || k_horizon <= 0 {
        return Err(Error::domain("indices and horizons must be positive"));
    }
    let lo = space.index_base.max(1);
    let emp = |j: usize, mj: usize, hi: i64| -> f64 {
        (lo..=hi)
            .map(|k| 2.0 * space.log_a_unchecked(j, k) - space.log_a_unchecked(mj, k))
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let monotone = space.rows_nondecreasing_in_k();
    let mut witnesses = Vec::new();
    let mut failing = None;
    let mut certified = monotone.is_some();
    let mut impossible = false;
    for j in 1..=j_max {
        let mut found = None;
        for mj in 1..=m_map_max {
            match (space.row_growth(j), space.row_growth(mj)) {
                (Some(gj), Some(gm)) => {
                    let t = trend(2.0 * gj.beta - gm.beta, 2.0 * gj.alpha - gm.alpha);
                    if t != Trend::ToPlusInf {
                        found = Some((mj, Some(t)));
                        break;
                    }
                }
                _ => {
                    certified = false;
                    if emp(j, mj, k_horizon) <= emp(j, mj, k_horizon / 2) + LOG_TOL {
                        found = Some((mj, None));
                        break;
                    }
                }
            }
        }
        match found {
            Some((mj, t)) => witnesses.push(MjWitness {
                m: 0,
                j,
                m_j: Some(mj),
                sup_log: emp(j, mj, k_horizon),
                trend: t,
            }),
            None => {
                failing.get_or_insert((0, j));
                if let (Some(sup), Some(gj)) = (space.row_sup(), space.row_growth(j)) {
                    if sup.alpha.is_finite() && sup.beta.is_finite() && lex_sign(&[2.0 * gj.beta - sup.beta, 2.0 * gj.alpha - sup.alpha]) > 0 {
                        impossible = true;
                    }
                }
                witnesses.push(MjWitness {
                    m: 0,
                    j,
                    m_j: None,
                    sup_log: emp(j, m_map_max, k_horizon),
                    trend: None,
                });
            }
        }
    }
    let finite_cover = space.row_count().is_some_and(|r| r <= j_max && r <= m_map_max);
    let preset_cover = matches!(space.rows, RowFamily::PowerOfJ | RowFamily::PowerOfK) || space.rows_identical();
    let (holds, certified, rule) = if monotone == Some(false) {
        (Holds::FailsAtWitness, true, "rows are not non-decreasing in k".to_string())
    } else if impossible {
        (Holds::FailsAtWitness, true, "a_{j,k}^2 outgrows every row".to_string())
    } else if failing.is_some() {
        (Holds::UnknownAtHorizon, false, format!("no m_j <= {m_map_max} bounds a_j^2 / a_m_j"))
    } else if certified && (finite_cover || preset_cover) {
        (Holds::Holds, true, "monotone rows with bounded a_j^2 / a_m_j".to_string())
    } else {
        (Holds::UnknownAtHorizon, false, "empirical bound on the horizon only".to_string())
    };
    Ok(ConditionReport {
        condition: "B-sufficient",
        holds,
        certified,
        big_j: None,
        witnesses,
        failing,
        rule,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const LN2: f64 = std::f64::consts::LN_2;

    fn small() -> Horizons {
        Horizons {
            j_max: 4,
            m_max: 4,
            n_max: 8,
            k_horizon: 128,
        }
    }

    #[test]
    fn log_a_examples() {
        let e = parse_space_spec("entire").unwrap();
        assert!((e.log_a(2, 3).unwrap() - 3.0 * LN2).abs() < 1e-15);
        let r = parse_space_spec("rapid").unwrap();
        assert!((r.log_a(3, 2).unwrap() - 3.0 * LN2).abs() < 1e-15);
        let l = parse_space_spec("lp:2").unwrap();
        assert_eq!(l.log_a(7, 11).unwrap(), 0.0);
        assert!(r.log_a(1, 0).is_err());
        assert!(e.log_a(0, 1).is_err());
    }

    #[test]
    fn parse_rejects_bad_specs() {
        assert!(matches!(parse_space_spec("lp:0.5"), Err(Error::Parse { .. })));
        assert!(matches!(parse_space_spec("bi-entire"), Err(Error::Parse { .. })));
        assert!(matches!(parse_space_spec("hilbert"), Err(Error::Parse { .. })));
        assert!(matches!(parse_space_spec("lpv:2:const:0"), Err(Error::Parse { .. })));
        let bi = parse_space_spec("bi-lp:2").unwrap();
        assert!(bi.bilateral);
        assert_eq!(bi.render(), "bi-lp:2");
    }

    #[test]
    fn lpv_rows_scale_by_inverse_p() {
        let s = parse_space_spec("lpv:2:geom:3").unwrap();
        assert!((s.log_a(5, 4).unwrap() - 2.0 * 3f64.ln()).abs() < 1e-12);
        assert_eq!(s.log_a(1, 4).unwrap(), s.log_a(9, 4).unwrap());
    }

    #[test]
    fn seminorm_examples() {
        let l2 = SpaceModel::lp(2.0).unwrap();
        let v = l2.seminorm_log(1, [(1, 3f64.ln()), (2, 4f64.ln())]).exp();
        assert!((v - 5.0).abs() < 1e-12);
        let c0 = SpaceModel::c0();
        assert!((c0.seminorm_log(1, [(1, 3f64.ln()), (2, 4f64.ln())]).exp() - 4.0).abs() < 1e-12);
        let e = SpaceModel::entire();
        assert!((e.seminorm_log(2, [(3, 0.0)]).exp() - 8.0).abs() < 1e-12);
    }

    #[test]
    fn condition_b_presets() {
        let r = check_condition_b(&SpaceModel::entire(), 1, &small()).unwrap();
        assert_eq!(r.holds, Holds::Holds);
        assert!(r.certified);
        let w = r.witnesses.iter().find(|w| w.m == 3 && w.j == 2).unwrap();
        assert_eq!(w.m_j, Some(12));

        let r = check_condition_b(&SpaceModel::lp(2.0).unwrap(), 1, &small()).unwrap();
        assert_eq!(r.holds, Holds::Holds);
        assert!(r.witnesses.iter().all(|w| w.m_j == Some(w.j)));

        let r = check_condition_b(&SpaceModel::frac_power_of_k(), 1, &small()).unwrap();
        assert_eq!(r.holds, Holds::FailsAtWitness);
        assert!(r.failing.is_some());

        let r = check_condition_b(&SpaceModel::rapid(), 1, &small()).unwrap();
        assert_eq!(r.holds, Holds::Holds);
    }

    #[test]
    fn sufficient_condition_presets() {
        let r = check_condition_b_sufficient(&SpaceModel::rapid(), 8, 128, 256).unwrap();
        assert_eq!(r.holds, Holds::Holds);
        for w in &r.witnesses {
            assert_eq!(w.m_j, Some(2 * w.j));
        }
        let r = check_condition_b_sufficient(&SpaceModel::entire(), 8, 128, 256).unwrap();
        assert_eq!(r.holds, Holds::Holds);
        for w in &r.witnesses {
            assert_eq!(w.m_j, Some(w.j * w.j));
        }
        let r = check_condition_b_sufficient(&SpaceModel::frac_power_of_k(), 8, 128, 256).unwrap();
        assert_eq!(r.holds, Holds::FailsAtWitness);
        assert_eq!(r.failing, Some((0, 2)));
    }

    #[test]
    fn schwartz_condition_presets() {
        let r = check_schwartz_condition(&SpaceModel::entire(), 1, &small()).unwrap();
        assert_eq!(r.holds, Holds::Holds);
        let v = parse_weight_spec("periodic:[1,2]").unwrap();
        let r = check_schwartz_condition(&SpaceModel::lpv(2.0, v).unwrap(), 1, &small()).unwrap();
        assert_eq!(r.holds, Holds::FailsAtWitness);
        let r = check_schwartz_condition(&SpaceModel::rapid(), 1, &small()).unwrap();
        assert_eq!(r.holds, Holds::Holds);
    }

    #[test]
    fn kothe_csv() {
        let s = parse_kothe_text("a.csv", "base=1\ngrowth,0,0,0\ngrowth,1,0,0\n", false).unwrap();
        assert!((s.log_a(2, 5).unwrap() - 5f64.ln()).abs() < 1e-15);
        assert!((s.log_a(9, 5).unwrap() - 5f64.ln()).abs() < 1e-15);
        // J = 1 cannot absorb a_{2,k} a_{2,n+k} = k (n+k); J = 2 can.
        let r = check_condition_b(&s, 1, &small()).unwrap();
        assert_eq!(r.holds, Holds::FailsAtWitness);
        let r = check_condition_b(&s, 2, &small()).unwrap();
        assert_eq!(r.holds, Holds::Holds);
        assert!(parse_kothe_text("a.csv", "growth,1,0,0\ngrowth,0,0,0\n", false).is_err());
        assert!(parse_kothe_text("a.csv", "wobble,1\n", false).is_err());
    }
}
