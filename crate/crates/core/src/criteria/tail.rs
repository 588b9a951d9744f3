//! Tail infima of the criterion quantity
//! `q(n, k) = sum_{v=1..n} ln|w_{k+v}| + ln a_{J,k} - ln a_{m,n+k}`
//! and its supremum over window lengths.

use rayon::prelude::*;
use serde::Serialize;

use crate::certified::{lcm, trend, CertifiedValue, Provenance, Status, Trend, LOG_TOL};
use crate::error::{Error, Result};
use crate::spaces::SpaceModel;
use crate::weights::{NamedGenerator, WeightSequence};

/// How an infimum or supremum over the infinite index range was decided.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    /// Exact evaluation over one joint period past the prefixes.
    Periodic,
    /// Criterion non-decreasing in `k`: the infimum sits at the first index.
    Monotone,
    /// Growth exponents force `q -> -inf` as `k -> inf`.
    SymbolicDecay,
    /// Growth exponents force `q -> +inf` and a pumping argument applies.
    SymbolicGrowth,
    /// Closed-form facts of a named generator.
    Named,
    Horizon,
}

/// One `(n, inf_k q(n, k))` entry of a report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionValue {
    pub n: usize,
    #[serde(serialize_with = "crate::certified::ser_ext")]
    pub inf_log: f64,
    pub status: Status,
    pub argmin_k: Option<i64>,
    pub route: Route,
    /// Minimum over the inspected horizon only.
    #[serde(serialize_with = "crate::certified::ser_ext")]
    pub horizon_min: f64,
}

/// The pair `(w, A)` with seminorm indices `(J, m)`.
#[derive(Debug, Clone, Copy)]
pub struct Criterion<'a> {
    pub w: &'a WeightSequence,
    pub space: &'a SpaceModel,
    pub big_j: usize,
    pub m: usize,
}

/// Joint periodic structure of `w` and rows `J`, `m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct PeriodicFrame {
    pub w_start: i64,
    pub aj_start: i64,
    pub am_start: i64,
    pub l: usize,
    /// `q(n + l, k) - q(n, k)`: `sum ln|w|` over `l` periodic indices minus the
    /// linear part of row `m`.
    pub drift: f64,
    /// `q(n, k + l) - q(n, k) = k_slope * l`, never negative.
    pub k_slope: f64,
    pub base: i64,
}

impl PeriodicFrame {
    /// `q(n, k + l) = q(n, k) + k_slope l` for all `k >= k0(n)`.
    pub fn k0(&self, n: usize) -> i64 {
        (self.w_start - 1)
            .max(self.aj_start)
            .max(self.am_start - n as i64)
            .max(self.base)
    }

    /// `q(n + l, k) = q(n, k) + drift` for all `k >= base` once `n >= n_a`.
    pub fn n_a(&self) -> usize {
        (self.w_start - 1 - self.base)
            .max(self.am_start - self.base)
            .max(1) as usize
    }

    /// Tail start past every prefix: `q(n + l, k) = q(n, k) + drift` and
    /// `q(n, k + l) = q(n, k) + k_slope l` for all `n >= 1`, `k >= n_star`.
    pub fn n_star(&self) -> i64 {
        (self.w_start - 1).max(self.aj_start).max(self.am_start).max(self.base)
    }
}

/// `kcoef(n) = ka n + kb`, `lncoef(n) = la n + lb` in `q(n, k) ~ kcoef k + lncoef ln k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct TrendLines {
    pub ka: f64,
    pub kb: f64,
    pub la: f64,
    pub lb: f64,
}

impl TrendLines {
    pub fn at(&self, n: usize) -> Trend {
        let n = n as f64;
        trend(self.ka * n + self.kb, self.la * n + self.lb)
    }

    /// Past this `n` both coefficients keep their sign.
    fn n_stable(&self) -> usize {
        let cross = |a: f64, b: f64| if a.abs() > LOG_TOL { (b.abs() / a.abs()).ceil() } else { 0.0 };
        (cross(self.ka, self.kb).max(cross(self.la, self.lb)) as usize + 2).min(1 << 20)
    }

    pub fn for_all_n(&self, t: Trend) -> bool {
        (1..=self.n_stable()).all(|n| self.at(n) == t)
    }

    pub fn first_n(&self, t: Trend) -> Option<usize> {
        (1..=self.n_stable()).find(|&n| self.at(n) == t)
    }
}

impl<'a> Criterion<'a> {
    pub fn new(w: &'a WeightSequence, space: &'a SpaceModel, big_j: usize, m: usize) -> Result<Self> {
        if w.is_bilateral() || space.bilateral {
            return Err(Error::domain(
                "bilateral weights or spaces go through the bilateral verdict",
            ));
        }
        if big_j == 0 || m == 0 {
            return Err(Error::domain("seminorm indices start at 1"));
        }
        Ok(Criterion { w, space, big_j, m })
    }

    pub fn base(&self) -> i64 {
        self.space.index_base
    }

    pub fn with_m(&self, m: usize) -> Self {
        Criterion { m, ..*self }
    }

    /// `q(n, k)`.
    #[inline]
    pub fn value(&self, n: usize, k: i64) -> f64 {
        self.w.window_log_unchecked(n, k) + self.space.log_a_unchecked(self.big_j, k)
            - self.space.log_a_unchecked(self.m, n as i64 + k)
    }

    pub fn checked_value(&self, n: usize, k: i64) -> Result<f64> {
        if n == 0 || k < self.base() {
            return Err(Error::domain(format!("criterion needs n >= 1 and k >= {}", self.base())));
        }
        Ok(self.value(n, k))
    }

    /// `None` when the rows make `q(n, .)` decay linearly in `k`.
    pub(crate) fn frame(&self) -> Option<PeriodicFrame> {
        let wp = self.w.periodic_tail()?;
        let (sj, aj) = self.space.row_affine_periodic(self.big_j)?;
        let (sm, am) = self.space.row_affine_periodic(self.m)?;
        let k_slope = sj - sm;
        if k_slope < 0.0 {
            return None;
        }
        let l = lcm(lcm(wp.period(), aj.period()), am.period());
        let drift = self.w.window_log_unchecked(l, wp.start - 1) - sm * l as f64;
        Some(PeriodicFrame {
            w_start: wp.start,
            aj_start: aj.start,
            am_start: am.start,
            l,
            drift,
            k_slope,
            base: self.base(),
        })
    }

    pub(crate) fn lines(&self) -> Option<TrendLines> {
        let a = self.w.asymptotics()?;
        let gj = self.space.row_growth(self.big_j)?;
        let gm = self.space.row_growth(self.m)?;
        Some(TrendLines {
            ka: 2.0 * a.quad,
            kb: gj.beta - gm.beta,
            la: a.nlogn,
            lb: gj.alpha - gm.alpha,
        })
    }

    /// `ln a_{J,k} - ln a_{m,k'}` when both rows are constant from the base on.
    pub(crate) fn rows_constant(&self) -> Option<f64> {
        let aj = self.space.row_periodic(self.big_j)?;
        let am = self.space.row_periodic(self.m)?;
        let base = self.base();
        (aj.period() == 1 && am.period() == 1 && aj.start <= base && am.start <= base)
            .then(|| aj.logs[0] - am.logs[0])
    }

    /// `q(n, .)` non-decreasing in `k`.
    fn monotone(&self) -> bool {
        self.rows_constant().is_some() && self.w.is_nondecreasing() == Some(true)
    }

    pub(crate) fn named(&self) -> Option<(NamedGenerator, f64)> {
        Some((self.w.named_generator()?, self.rows_constant()?))
    }

    /// `min_{k in [lo, hi]} q(n, k)` with the first minimiser.
    pub(crate) fn range_min(&self, n: usize, lo: i64, hi: i64) -> (f64, i64) {
        let mut best = (f64::INFINITY, lo);
        for k in lo..=hi {
            let v = self.value(n, k);
            if v < best.0 {
                best = (v, k);
            }
        }
        best
    }

    pub(crate) fn exact_periodic_inf(&self, f: &PeriodicFrame, n: usize, big_n: i64) -> (f64, i64) {
        let start = big_n.max(f.k0(n));
        self.range_min(n, big_n, start + f.l as i64 - 1)
    }
}

fn check_tail_args(c: &Criterion, n: usize, big_n: i64) -> Result<()> {
    if n == 0 {
        return Err(Error::domain("window length n must be positive"));
    }
    if big_n < c.base() {
        return Err(Error::domain(format!(
            "tail start N = {big_n} is below the index base {}",
            c.base()
        )));
    }
    Ok(())
}

/// Closed-form start of a window realizing the named infimum.
fn named_argmin(g: NamedGenerator, n: usize, big_n: i64) -> Option<i64> {
    match g {
        NamedGenerator::Blocks => {
            // 1/2-run [2*4^i, 4^{i+1}) of length 2*4^i.
            let mut i = 0u32;
            loop {
                let start = 2 * 4i64.pow(i);
                if start > big_n && 2 * 4i64.pow(i) >= n as i64 {
                    return Some(start - 1);
                }
                i += 1;
            }
        }
        NamedGenerator::Dips => None,
    }
}

/// `inf_{k >= N} q(n, k)`.
pub fn tail_inf(c: &Criterion, n: usize, big_n: i64, k_horizon: i64) -> Result<CriterionValue> {
    check_tail_args(c, n, big_n)?;
    let (hmin, hk) = c.range_min(n, big_n, k_horizon.max(big_n));
    let done = |inf_log: f64, status: Status, argmin_k: Option<i64>, route: Route| CriterionValue {
        n,
        inf_log,
        status,
        argmin_k,
        route,
        horizon_min: hmin,
    };
    if let Some(f) = c.frame() {
        let (v, k) = c.exact_periodic_inf(&f, n, big_n);
        return Ok(done(v, Status::Exact, Some(k), Route::Periodic));
    }
    if let Some((g, shift)) = c.named() {
        let v = g.tail_window_inf(n) + shift;
        let k = named_argmin(g, n, big_n).or(Some(hk));
        return Ok(done(v, Status::Exact, k, Route::Named));
    }
    if c.monotone() {
        return Ok(done(c.value(n, big_n), Status::Exact, Some(big_n), Route::Monotone));
    }
    if let Some(lines) = c.lines() {
        if lines.at(n) == Trend::ToMinusInf {
            return Ok(done(f64::NEG_INFINITY, Status::Exact, Some(hk), Route::SymbolicDecay));
        }
    }
    Ok(done(hmin, Status::HorizonOnly, Some(hk), Route::Horizon))
}

/// Witness `(C, m, N)` for `inf_{k >= N} q(m, k) >= ln C > 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockCertificate {
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "log_C")]
    pub log_c: f64,
    pub m: usize,
    #[serde(rename = "N")]
    pub big_n: i64,
    #[serde(rename = "J")]
    pub big_j: usize,
    /// Seminorm index of the denominator.
    pub j: usize,
    /// Whether the infimum over the whole tail is exact (otherwise `N` was
    /// located on the horizon).
    pub exact: bool,
}

impl BlockCertificate {
    pub fn new(log_c: f64, m: usize, big_n: i64, big_j: usize, j: usize, exact: bool) -> Self {
        BlockCertificate {
            c: log_c.exp(),
            log_c,
            m,
            big_n,
            big_j,
            j,
            exact,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Theta {
    #[serde(rename = "J")]
    pub big_j: usize,
    pub m: usize,
    pub value: CertifiedValue,
    pub route: Route,
    #[serde(skip)]
    pub criterion_values: Vec<CriterionValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub block: Option<BlockCertificate>,
    /// `q(n + l, k) - q(n, k)` over one joint period, when periodic.
    #[serde(serialize_with = "crate::certified::ser_ext_opt", skip_serializing_if = "Option::is_none")]
    pub drift: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

/// Least `n` with `inf_{k >= N*} q(n, k) > 0` on a periodic frame with positive drift.
pub(crate) fn periodic_block(c: &Criterion, f: &PeriodicFrame) -> Option<BlockCertificate> {
    if f.drift <= LOG_TOL {
        return None;
    }
    let n_star = f.n_star();
    let mut best: Option<usize> = None;
    for r in 1..=f.l {
        let (t, _) = c.exact_periodic_inf(f, r, n_star);
        let periods = if t > LOG_TOL {
            0
        } else {
            ((LOG_TOL - t) / f.drift).floor() as usize + 1
        };
        let n = r + periods * f.l;
        best = Some(best.map_or(n, |b| b.min(n)));
    }
    let mut n = best?;
    for _ in 0..4 {
        let (t, _) = c.exact_periodic_inf(f, n, n_star);
        if t > LOG_TOL {
            return Some(BlockCertificate::new(t, n, n_star, c.big_j, c.m, true));
        }
        n += f.l;
    }
    None
}

/// Smallest `N` with `min_{k in [N, H]} q(n, k) > 0`, scanning suffix minima.
pub(crate) fn horizon_block(c: &Criterion, n: usize, k_horizon: i64) -> Option<BlockCertificate> {
    let base = c.base();
    let hi = k_horizon.max(base + 1);
    let vals: Vec<f64> = (base..=hi).map(|k| c.value(n, k)).collect();
    let mut suffix_min = f64::INFINITY;
    let mut found = None;
    for (i, v) in vals.iter().enumerate().rev() {
        suffix_min = suffix_min.min(*v);
        if suffix_min > LOG_TOL {
            found = Some((base + i as i64, suffix_min));
        } else {
            break;
        }
    }
    // Keep the second half of the horizon free so the block is not a boundary artefact.
    let (big_n, log_c) = found?;
    (big_n <= base + (hi - base) / 2).then(|| BlockCertificate::new(log_c, n, big_n, c.big_j, c.m, false))
}

/// `theta = sup_{n >= 1} inf_{k >= base} q(n, k)`.
pub fn theta(c: &Criterion, n_max: usize, k_horizon: i64) -> Result<Theta> {
    if n_max == 0 {
        return Err(Error::domain("n_max must be positive"));
    }
    let base = c.base();
    let criterion_values: Vec<CriterionValue> = (1..=n_max)
        .into_par_iter()
        .map(|n| tail_inf(c, n, base, k_horizon))
        .collect::<Result<_>>()?;
    let (hmax, hn) = criterion_values
        .iter()
        .fold((f64::NEG_INFINITY, 1), |acc, cv| if cv.horizon_min > acc.0 { (cv.horizon_min, cv.n) } else { acc });
    let h = k_horizon;
    let prov = |n: Option<usize>, k: Option<i64>| Provenance {
        n,
        k,
        m: Some(c.m),
        ..Default::default()
    };
    let mut out = Theta {
        big_j: c.big_j,
        m: c.m,
        value: CertifiedValue::horizon_only(hmax, prov(Some(hn), None), h),
        route: Route::Horizon,
        criterion_values,
        block: None,
        drift: None,
        notes: Vec::new(),
    };
    let set = |out: &mut Theta, v: f64, route: Route, p: Provenance| {
        out.value = CertifiedValue::exact(v, p, h, hmax);
        out.route = route;
    };

    if let Some(f) = c.frame() {
        out.drift = Some(f.drift);
        if f.drift > LOG_TOL {
            set(&mut out, f64::INFINITY, Route::Periodic, prov(None, None));
            out.block = periodic_block(c, &f);
            return Ok(out);
        }
        let mut best = (f64::NEG_INFINITY, 1usize, base);
        for n in 1..f.n_a() + f.l {
            let (v, k) = c.exact_periodic_inf(&f, n, base);
            if v > best.0 {
                best = (v, n, k);
            }
        }
        if f.drift != 0.0 && f.drift.abs() <= LOG_TOL {
            out.value = CertifiedValue::horizon_only(best.0, prov(Some(best.1), Some(best.2)), h);
            out.route = Route::Periodic;
            out.notes.push(format!("per-period drift {:e} lies inside the tolerance band", f.drift));
        } else {
            set(&mut out, best.0, Route::Periodic, prov(Some(best.1), Some(best.2)));
        }
        return Ok(out);
    }
    if let Some((g, shift)) = c.named() {
        // Blocks: -n ln 2 + shift is largest at n = 1; dips: -inf for every n.
        let v = g.tail_window_inf(1) + shift;
        set(&mut out, v, Route::Named, prov(Some(1), None));
        return Ok(out);
    }
    if c.monotone()
        && c.w.asymptotics().is_some_and(|a| a.sign() > 0) {
            set(&mut out, f64::INFINITY, Route::Monotone, prov(None, None));
            out.block = (1..=1 << 16)
                .map(|n| (n, c.value(n, base)))
                .find(|(_, v)| *v > LOG_TOL)
                .map(|(n, v)| BlockCertificate::new(v, n, base, c.big_j, c.m, true));
            return Ok(out);
        }
    if let Some(lines) = c.lines() {
        if lines.for_all_n(Trend::ToMinusInf) {
            set(&mut out, f64::NEG_INFINITY, Route::SymbolicDecay, prov(None, None));
            return Ok(out);
        }
        let jj = c.with_m(c.big_j).lines();
        if let (Some(n_jm), Some(n_jj)) = (
            lines.first_n(Trend::ToPlusInf),
            jj.and_then(|l| l.first_n(Trend::ToPlusInf)),
        ) {
            set(&mut out, f64::INFINITY, Route::SymbolicGrowth, prov(Some(n_jm), None));
            out.block = horizon_block(c, n_jm, k_horizon);
            if c.m != c.big_j {
                out.notes.push(format!(
                    "pumped with (J, J) windows of length {n_jj} and (J, m) windows of length {n_jm}"
                ));
            }
            return Ok(out);
        }
    }
    Ok(out)
}

/// `inf_{k >= N} max_{1 <= i <= n} q(i, k)`.
pub fn window_max_inf(c: &Criterion, n: usize, big_n: i64, k_horizon: i64) -> Result<CertifiedValue> {
    check_tail_args(c, n, big_n)?;
    let f_at = |k: i64| (1..=n).map(|i| c.value(i, k)).fold(f64::NEG_INFINITY, f64::max);
    let range = |lo: i64, hi: i64| {
        (lo..=hi).fold((f64::INFINITY, lo), |acc, k| {
            let v = f_at(k);
            if v < acc.0 {
                (v, k)
            } else {
                acc
            }
        })
    };
    let (hmin, hk) = range(big_n, k_horizon.max(big_n));
    let prov = |k: Option<i64>| Provenance {
        n: Some(n),
        k,
        big_n: Some(big_n),
        m: Some(c.m),
    };
    if let Some(f) = c.frame() {
        let start = big_n.max(f.k0(1));
        let (v, k) = range(big_n, start + f.l as i64 - 1);
        return Ok(CertifiedValue::exact(v, prov(Some(k)), k_horizon, hmin));
    }
    if let Some((g, shift)) = c.named() {
        let v = match g {
            NamedGenerator::Blocks => -std::f64::consts::LN_2 + shift,
            NamedGenerator::Dips => f64::NEG_INFINITY,
        };
        return Ok(CertifiedValue::exact(v, prov(None), k_horizon, hmin));
    }
    if c.monotone() {
        return Ok(CertifiedValue::exact(f_at(big_n), prov(Some(big_n)), k_horizon, hmin));
    }
    if let Some(lines) = c.lines() {
        if (1..=n).all(|i| lines.at(i) == Trend::ToMinusInf) {
            return Ok(CertifiedValue::exact(f64::NEG_INFINITY, prov(Some(hk)), k_horizon, hmin));
        }
    }
    Ok(CertifiedValue::horizon_only(hmin, prov(Some(hk)), k_horizon))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::parse_space_spec;
    use crate::weights::parse_weight_spec;

    const LN2: f64 = std::f64::consts::LN_2;

    fn ws(s: &str) -> WeightSequence {
        parse_weight_spec(s).unwrap()
    }

    fn sp(s: &str) -> SpaceModel {
        parse_space_spec(s).unwrap()
    }

    #[test]
    fn tail_inf_examples() {
        let (w, s) = (ws("linear"), sp("entire"));
        let c = Criterion::new(&w, &s, 1, 2).unwrap();
        let t = tail_inf(&c, 1, 0, 256).unwrap();
        assert_eq!(t.inf_log, f64::NEG_INFINITY);
        assert_eq!(t.status, Status::Exact);

        let (w, s) = (ws("const:2"), sp("lp:2"));
        let c = Criterion::new(&w, &s, 1, 1).unwrap();
        let t = tail_inf(&c, 5, 1, 256).unwrap();
        assert!((t.inf_log - 5.0 * LN2).abs() < 1e-12);
        assert_eq!(t.status, Status::Exact);

        let (w, s) = (ws("periodic:[3,0.5]"), sp("lp:1"));
        let c = Criterion::new(&w, &s, 1, 1).unwrap();
        let t = tail_inf(&c, 2, 1, 256).unwrap();
        assert!((t.inf_log - 1.5f64.ln()).abs() < 1e-12);
        assert_eq!(t.status, Status::Exact);
    }

    #[test]
    fn theta_examples() {
        let (w, s) = (ws("const:2"), sp("lp:2"));
        let th = theta(&Criterion::new(&w, &s, 1, 1).unwrap(), 8, 128).unwrap();
        assert_eq!(th.value.log_value, f64::INFINITY);
        assert_eq!(th.value.status, Status::Exact);
        let b = th.block.unwrap();
        assert_eq!((b.m, b.big_n), (1, 1));
        assert!((b.c - 2.0).abs() < 1e-12);

        let (w, s) = (ws("const:1"), sp("lp:2"));
        let th = theta(&Criterion::new(&w, &s, 1, 1).unwrap(), 8, 128).unwrap();
        assert_eq!(th.value.log_value, 0.0);
        assert_eq!(th.value.status, Status::Exact);

        let (w, s) = (ws("named:blocks"), sp("lp:2"));
        let th = theta(&Criterion::new(&w, &s, 1, 1).unwrap(), 8, 128).unwrap();
        assert!((th.value.log_value + LN2).abs() < 1e-15);
        assert_eq!(th.value.provenance.n, Some(1));

        let (w, s) = (ws("linear"), sp("entire"));
        let th = theta(&Criterion::new(&w, &s, 1, 1).unwrap(), 8, 128).unwrap();
        assert_eq!(th.value.log_value, f64::INFINITY);
        let th = theta(&Criterion::new(&w, &s, 1, 2).unwrap(), 8, 128).unwrap();
        assert_eq!(th.value.log_value, f64::NEG_INFINITY);
        assert_eq!(th.route, Route::SymbolicDecay);
    }

    #[test]
    fn window_max_inf_examples() {
        let (w, s) = (ws("const:2"), sp("lp:2"));
        let c = Criterion::new(&w, &s, 1, 1).unwrap();
        let v = window_max_inf(&c, 3, 1, 64).unwrap();
        assert!((v.log_value - 3.0 * LN2).abs() < 1e-12);

        // k = 1 starts on the 0.5: max(ln 0.5, ln 1.5) = ln 1.5.
        let (w, s) = (ws("periodic:[3,0.5]"), sp("lp:1"));
        let c = Criterion::new(&w, &s, 1, 1).unwrap();
        let v = window_max_inf(&c, 2, 1, 64).unwrap();
        assert!((v.log_value - 1.5f64.ln()).abs() < 1e-12);
        assert_eq!(v.status, Status::Exact);

        let (w, s) = (ws("const:1"), sp("lp:2"));
        let c = Criterion::new(&w, &s, 1, 1).unwrap();
        assert_eq!(window_max_inf(&c, 4, 1, 64).unwrap().log_value, 0.0);
    }

    #[test]
    fn periodic_block_is_least_window() {
        let (w, s) = (ws("periodic:[0.5,8]"), sp("lp:2"));
        let c = Criterion::new(&w, &s, 1, 1).unwrap();
        let b = periodic_block(&c, &c.frame().unwrap()).unwrap();
        assert_eq!(b.m, 2);
        assert!((b.c - 4.0).abs() < 1e-12);
    }
}
