//! Block, growth and pumped certificates and their re-verification.

use serde::Serialize;

use crate::certified::{Status, LOG_TOL};
use crate::criteria::tail::{BlockCertificate, Criterion, PeriodicFrame};
use crate::error::{Error, Result};
use crate::spaces::SpaceModel;
use crate::weights::WeightSequence;

/// Number of `C_n` values materialised in a growth certificate.
pub const GROWTH_TERMS: usize = 64;

/// Lower bound `pumped` windows must exceed, `ln 10`.
pub const PUMP_LOG_K: f64 = std::f64::consts::LN_10;

const PUMP_MAX_WINDOW: usize = 1 << 20;

fn criterion<'a>(
    cert: &BlockCertificate,
    w: &'a WeightSequence,
    space: &'a SpaceModel,
) -> Result<Criterion<'a>> {
    Criterion::new(w, space, cert.big_j, cert.j)
}

fn check_block_shape(cert: &BlockCertificate, space: &SpaceModel) -> Result<()> {
    // NaN fails too.
    if cert.log_c.is_nan() || cert.log_c <= LOG_TOL {
        return Err(Error::InvalidCertificate(format!(
            "block constant C = {} must exceed 1",
            cert.c
        )));
    }
    if cert.m == 0 {
        return Err(Error::InvalidCertificate("window length m must be positive".into()));
    }
    if cert.big_n < space.index_base {
        return Err(Error::InvalidCertificate(format!(
            "tail start N = {} lies below the index base {}",
            cert.big_n, space.index_base
        )));
    }
    Ok(())
}

/// Re-checks `min_{k in [N, N + k_check]} q(m, k) >= ln C`.
pub fn verify_block(
    cert: &BlockCertificate,
    w: &WeightSequence,
    space: &SpaceModel,
    k_check: i64,
) -> Result<bool> {
    check_block_shape(cert, space)?;
    let c = criterion(cert, w, space)?;
    let (min, _) = c.range_min(cert.m, cert.big_n, cert.big_n + k_check.max(0));
    Ok(min >= cert.log_c - LOG_TOL)
}

/// `||T^n x|| >= C_n ||x||` on the tails `x in span{e_k : k >= E_n + n}`,
/// with `C_n = C^{floor(n/m)} / K`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthCertificate {
    pub block: BlockCertificate,
    #[serde(rename = "K")]
    pub k: f64,
    #[serde(rename = "log_K")]
    pub log_k: f64,
    /// Status of `K`: exact on periodic frames, otherwise read off the horizon.
    pub k_status: Status,
    /// `ln C_n` for `n = 1..=GROWTH_TERMS`.
    #[serde(rename = "log_C_n", serialize_with = "crate::certified::ser_ext_vec")]
    pub log_c_n: Vec<f64>,
    #[serde(rename = "E_n")]
    pub e_n: Vec<i64>,
}

impl GrowthCertificate {
    /// Closed form `ln C_n` for any `n >= 1`.
    pub fn log_c_at(&self, n: usize) -> f64 {
        (n / self.block.m) as f64 * self.block.log_c - self.log_k
    }

    pub fn e_at(&self, _n: usize) -> i64 {
        self.block.big_n
    }
}

fn sup_tail(c: &Criterion, frame: Option<&PeriodicFrame>, s: usize, big_n: i64, k_horizon: i64) -> f64 {
    let hi = match frame {
        Some(f) => big_n.max(f.k0(s)) + f.l as i64 - 1,
        None => k_horizon.max(big_n),
    };
    (big_n..=hi).map(|k| c.value(s, k)).fold(f64::NEG_INFINITY, f64::max)
}

/// Turns a block certificate into a growth certificate on the same seminorm.
pub fn blockcert_to_growthcert(
    cert: &BlockCertificate,
    w: &WeightSequence,
    space: &SpaceModel,
    k_horizon: i64,
) -> Result<GrowthCertificate> {
    check_block_shape(cert, space)?;
    if !space.rows_identical() && cert.big_j != cert.j {
        return Err(Error::InvalidCertificate(format!(
            "growth certificates need matching seminorms, got J = {} and j = {}",
            cert.big_j, cert.j
        )));
    }
    let c = criterion(cert, w, space)?;
    // Same seminorm on both sides, so the frame has no slope in k.
    let frame = c.frame().filter(|f| f.k_slope == 0.0);
    let k_check = (k_horizon - cert.big_n).max(cert.m as i64);
    let check_span = frame.map_or(k_check, |f| (f.k0(cert.m) - cert.big_n).max(0) + f.l as i64);
    if !verify_block(cert, w, space, check_span.max(k_check.min(1024)))? {
        return Err(Error::InvalidCertificate(format!(
            "window of length {} drops below ln C = {} past N = {}",
            cert.m, cert.log_c, cert.big_n
        )));
    }
    // q(n, k) = q((a+1)m, k) - q(m - r, k + n) for n = am + r, 0 < r < m.
    let log_k = (1..cert.m)
        .map(|s| sup_tail(&c, frame.as_ref(), s, cert.big_n, k_horizon))
        .fold(0.0f64, f64::max);
    let mut g = GrowthCertificate {
        block: cert.clone(),
        k: log_k.exp(),
        log_k,
        k_status: if frame.is_some() || cert.m == 1 { Status::Exact } else { Status::HorizonOnly },
        log_c_n: Vec::with_capacity(GROWTH_TERMS),
        e_n: Vec::with_capacity(GROWTH_TERMS),
    };
    for n in 1..=GROWTH_TERMS {
        g.log_c_n.push(g.log_c_at(n));
        g.e_n.push(g.e_at(n));
    }
    Ok(g)
}

/// Per-`n` comparison of the direct window minimum against `ln C_n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthCheck {
    pub n: usize,
    #[serde(rename = "log_C_n", serialize_with = "crate::certified::ser_ext")]
    pub log_c_n: f64,
    #[serde(serialize_with = "crate::certified::ser_ext")]
    pub direct_min: f64,
    pub status: Status,
    pub ok: bool,
}

/// Checks every stored `C_n` against the direct minimum of `q(n, k)` over `k >= E_n`.
pub fn verify_growthcert(
    g: &GrowthCertificate,
    w: &WeightSequence,
    space: &SpaceModel,
    k_horizon: i64,
) -> Result<Vec<GrowthCheck>> {
    let c = criterion(&g.block, w, space)?;
    let frame = c.frame();
    Ok(g
        .log_c_n
        .iter()
        .zip(&g.e_n)
        .enumerate()
        .map(|(i, (&log_c_n, &e))| {
            let n = i + 1;
            let (direct_min, status) = match &frame {
                Some(f) => (c.exact_periodic_inf(f, n, e).0, Status::Exact),
                None => (c.range_min(n, e, k_horizon.max(e)).0, Status::HorizonOnly),
            };
            GrowthCheck {
                n,
                log_c_n,
                direct_min,
                status,
                ok: direct_min >= log_c_n - LOG_TOL,
            }
        })
        .collect())
}

/// Window of length `(l1 + l2) n_J + n_m` whose criterion value exceeds `ln K`
/// for every `k >= base`, built from a `(J, J)` and a `(J, m)` block.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PumpedCertificate {
    pub block_jj: BlockCertificate,
    pub block_jm: BlockCertificate,
    #[serde(rename = "log_K")]
    pub log_k: f64,
    pub l1: usize,
    pub l2: usize,
    #[serde(serialize_with = "crate::certified::ser_ext")]
    pub lambda0: f64,
    pub n_total: usize,
    /// `min(l1 ln C_J, lambda0) + l2 ln C_J + ln C_m`.
    pub lower_bound: f64,
    /// Infimum of the pumped window: exact on periodic frames, else on the horizon.
    #[serde(serialize_with = "crate::certified::ser_ext")]
    pub checked_inf: f64,
    pub status: Status,
}

/// Pumps two blocks into a window exceeding `ln K` from the first index on.
pub fn pump(
    block_jj: &BlockCertificate,
    block_jm: &BlockCertificate,
    w: &WeightSequence,
    space: &SpaceModel,
    k_horizon: i64,
) -> Result<Option<PumpedCertificate>> {
    check_block_shape(block_jj, space)?;
    check_block_shape(block_jm, space)?;
    if block_jj.big_j != block_jj.j || block_jm.big_j != block_jj.big_j {
        return Err(Error::InvalidCertificate(
            "pumping needs a (J, J) block and a (J, m) block with the same J".into(),
        ));
    }
    let cjj = criterion(block_jj, w, space)?;
    let cjm = criterion(block_jm, w, space)?;
    let base = space.index_base;
    let n_j = block_jj.m;
    let reach = block_jj.big_n.max(block_jm.big_n).max(base);
    let mut l1 = 1usize;
    while ((l1 * n_j) as i64) < reach || l1 as f64 * block_jj.log_c <= PUMP_LOG_K {
        l1 += 1;
        if l1 * n_j > PUMP_MAX_WINDOW {
            return Ok(None);
        }
    }
    let first = l1 * n_j;
    let lambda0 = if (first as i64) > base {
        cjj.range_min(first, base, first as i64 - 1).0
    } else {
        f64::INFINITY
    };
    if !lambda0.is_finite() && lambda0 < 0.0 {
        return Ok(None);
    }
    let head = lambda0.min(l1 as f64 * block_jj.log_c);
    let l2 = ((PUMP_LOG_K - head) / block_jj.log_c).floor().max(0.0) as usize + 1;
    let n_total = (l1 + l2) * n_j + block_jm.m;
    if n_total > PUMP_MAX_WINDOW {
        return Ok(None);
    }
    let lower_bound = head + l2 as f64 * block_jj.log_c + block_jm.log_c;
    let (checked_inf, status) = match cjm.frame() {
        Some(f) => (cjm.exact_periodic_inf(&f, n_total, base).0, Status::Exact),
        None => {
            let exact = block_jj.exact && block_jm.exact;
            let min = cjm.range_min(n_total, base, k_horizon.max(base)).0;
            (min, if exact { Status::LowerBounded } else { Status::HorizonOnly })
        }
    };
    Ok(Some(PumpedCertificate {
        block_jj: block_jj.clone(),
        block_jm: block_jm.clone(),
        log_k: PUMP_LOG_K,
        l1,
        l2,
        lambda0,
        n_total,
        lower_bound,
        checked_inf,
        status,
    }))
}

/// `inf_{k in [base, H - times m]} q(times m, k)` next to the pumping bound
/// `times ln C - slack`, where the slack comes from the prefix below `N`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PumpingCheck {
    pub times: usize,
    pub window: usize,
    #[serde(serialize_with = "crate::certified::ser_ext")]
    pub observed_inf: f64,
    #[serde(serialize_with = "crate::certified::ser_ext")]
    pub bound: f64,
    pub ok: bool,
}

/// Pumping soundness on horizon data for a `(J, J)` block.
///
/// Windows starting below `N` lose at most the most negative value of
/// `q(i, k)` over starts `k < N` and lengths `i <= N - k`.
pub fn pumping_check(
    cert: &BlockCertificate,
    w: &WeightSequence,
    space: &SpaceModel,
    times: usize,
    horizon: i64,
) -> Result<PumpingCheck> {
    check_block_shape(cert, space)?;
    let c = criterion(cert, w, space)?;
    let base = space.index_base;
    let window = times * cert.m;
    let hi = horizon - window as i64;
    if hi < base {
        return Err(Error::domain(format!("horizon {horizon} too short for a window of {window}")));
    }
    let observed_inf = c.range_min(window, base, hi).0;
    // For k < N: q(tm, k) = q(N - k, k) + q(tm - (N - k), N) and the tail part keeps
    // floor((tm - (N - k)) / m) full blocks; the remainder costs at most one block slack.
    let mut bound = times as f64 * cert.log_c;
    let mut slack = 0.0f64;
    for k in base..cert.big_n.min(hi + 1) {
        let lead = (cert.big_n - k) as usize;
        if lead >= window {
            slack = slack.max(times as f64 * cert.log_c - c.value(window, k));
            continue;
        }
        let rest = window - lead;
        let full = rest / cert.m;
        let tail_rem = rest % cert.m;
        let rem_min = if tail_rem == 0 {
            0.0
        } else {
            c.value(tail_rem, cert.big_n + (full * cert.m) as i64)
                .min(0.0)
        };
        let lower = c.value(lead, k) + full as f64 * cert.log_c + rem_min;
        slack = slack.max(times as f64 * cert.log_c - lower);
    }
    bound -= slack;
    Ok(PumpingCheck {
        times,
        window,
        observed_inf,
        bound,
        ok: observed_inf >= bound - LOG_TOL,
    })
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

    #[test]
    fn growth_from_constant_two() {
        let (w, s) = (ws("const:2"), parse_space_spec("lp:2").unwrap());
        let cert = BlockCertificate::new(LN2, 1, 1, 1, 1, true);
        let g = blockcert_to_growthcert(&cert, &w, &s, 256).unwrap();
        assert_eq!(g.log_k, 0.0);
        assert!((g.log_c_at(7) - 7.0 * LN2).abs() < 1e-12);
        assert!(verify_growthcert(&g, &w, &s, 256).unwrap().iter().all(|c| c.ok));
    }

    #[test]
    fn growth_from_periodic() {
        let (w, s) = (ws("periodic:[0.5,8]"), parse_space_spec("lp:2").unwrap());
        let cert = BlockCertificate::new(4f64.ln(), 2, 1, 1, 1, true);
        let g = blockcert_to_growthcert(&cert, &w, &s, 256).unwrap();
        assert!((g.k - 8.0).abs() < 1e-9);
        assert!((g.log_c_at(5) - 2f64.ln()).abs() < 1e-12);
        let checks = verify_growthcert(&g, &w, &s, 256).unwrap();
        assert!((checks[4].direct_min - 8f64.ln()).abs() < 1e-12);
        assert!(checks.iter().all(|c| c.ok));
    }

    #[test]
    fn unit_constant_rejected() {
        let (w, s) = (ws("const:2"), parse_space_spec("lp:2").unwrap());
        let cert = BlockCertificate::new(0.0, 1, 1, 1, 1, true);
        assert!(matches!(
            blockcert_to_growthcert(&cert, &w, &s, 64),
            Err(Error::InvalidCertificate(_))
        ));
    }

    #[test]
    fn pump_periodic() {
        let (w, s) = (ws("periodic:[0.5,8]"), parse_space_spec("lp:2").unwrap());
        let cert = BlockCertificate::new(4f64.ln(), 2, 1, 1, 1, true);
        let p = pump(&cert, &cert, &w, &s, 256).unwrap().unwrap();
        assert!(p.lower_bound > PUMP_LOG_K);
        assert!(p.checked_inf >= p.lower_bound - LOG_TOL);
        assert_eq!(p.status, Status::Exact);
    }

    #[test]
    fn pumping_check_eventually_periodic() {
        let (w, s) = (ws("evper:[0.1,0.1]:[3]"), parse_space_spec("lp:2").unwrap());
        let cert = BlockCertificate::new(3f64.ln(), 1, 3, 1, 1, true);
        assert!(verify_block(&cert, &w, &s, 100).unwrap());
        for times in 1..6 {
            assert!(pumping_check(&cert, &w, &s, times, 200).unwrap().ok);
        }
    }
}
