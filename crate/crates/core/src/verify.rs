//! Seeded oracle suites over random structured weight families.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::criteria::certificates::{blockcert_to_growthcert, verify_growthcert};
use crate::criteria::condn::{cond_n_check, TriState};
use crate::criteria::tail::{theta, Criterion};
use crate::dynamics::poly::{apply_poly, PolyMode};
use crate::dynamics::vector::TruncatedVector;
use crate::error::{Error, Result};
use crate::spaces::SpaceModel;
use crate::weights::WeightSequence;

/// Failures listed in a report before truncation.
const MAX_LISTED: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub suite: String,
    pub seed: u64,
    pub count: usize,
    pub agreements: usize,
    pub violations: usize,
    pub undecided: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_error: Option<f64>,
    pub failures: Vec<String>,
    pub passed: bool,
}

impl VerifyReport {
    fn new(suite: &str, seed: u64, count: usize) -> Self {
        VerifyReport {
            suite: suite.into(),
            seed,
            count,
            agreements: 0,
            violations: 0,
            undecided: 0,
            max_error: None,
            failures: Vec::new(),
            passed: false,
        }
    }

    fn fail(&mut self, msg: String) {
        self.violations += 1;
        if self.failures.len() < MAX_LISTED {
            self.failures.push(msg);
        }
    }

    fn finish(mut self) -> Self {
        self.passed = self.violations == 0 && self.undecided == 0;
        self
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn log_weights<R: RngExt>(rng: &mut R, len: usize, log_range: f64) -> Vec<f64> {
    (0..len)
        .map(|_| rng.random_range(-log_range..=log_range).exp())
        .collect()
}

/// Eventually periodic weights with prefix `<= max_prefix`, period in
/// `[1, max_period]` and `ln|w_k|` uniform in `[-log_range, log_range]`.
pub fn random_eventually_periodic<R: RngExt>(
    rng: &mut R,
    max_prefix: usize,
    max_period: usize,
    log_range: f64,
) -> WeightSequence {
    let prefix_len = rng.random_range(0..=max_prefix);
    let period_len = rng.random_range(1..=max_period);
    let prefix = log_weights(rng, prefix_len, log_range);
    let period = log_weights(rng, period_len, log_range);
    let w = if prefix.is_empty() {
        WeightSequence::periodic(period)
    } else {
        WeightSequence::eventually_periodic(prefix, period)
    };
    w.expect("weights drawn from exp of a bounded range are valid")
}

pub fn random_periodic<R: RngExt>(rng: &mut R, max_period: usize, log_range: f64) -> WeightSequence {
    let period_len = rng.random_range(1..=max_period);
    WeightSequence::periodic(log_weights(rng, period_len, log_range))
        .expect("weights drawn from exp of a bounded range are valid")
}

fn tally(report: &mut VerifyReport, label: String, lhs: TriState, rhs: TriState) {
    match (lhs, rhs) {
        (TriState::Unknown, _) | (_, TriState::Unknown) => {
            report.undecided += 1;
            if report.failures.len() < MAX_LISTED {
                report.failures.push(format!("{label}: undecided"));
            }
        }
        (a, b) if a == b => report.agreements += 1,
        (a, b) => report.fail(format!("{label}: lhs {a:?}, rhs {b:?}")),
    }
}

/// Both sides of the tail-start equivalence on `l^1` for `count` random families.
pub fn verify_condn(seed: u64, count: usize) -> Result<VerifyReport> {
    let mut r = VerifyReport::new("condn", seed, count);
    let mut g = rng(seed);
    for i in 0..count {
        let w = random_eventually_periodic(&mut g, 8, 8, 2.0);
        let rep = cond_n_check(&w, None, None)?;
        tally(&mut r, format!("case {i} ({})", w.render()), rep.lhs, rep.rhs);
    }
    Ok(r.finish())
}

/// The same equivalence on `entire` and `rapid`, rows `j = 1..=4`.
pub fn verify_prop44(seed: u64, count: usize) -> Result<VerifyReport> {
    let spaces = [SpaceModel::entire(), SpaceModel::rapid()];
    let mut r = VerifyReport::new("prop44", seed, count);
    let mut g = rng(seed);
    for i in 0..count {
        let w = random_eventually_periodic(&mut g, 8, 8, 2.0);
        for s in &spaces {
            for j in 1..=4 {
                let rep = cond_n_check(&w, Some(s), Some(j))?;
                tally(&mut r, format!("case {i} ({}, {}, j = {j})", w.render(), s.render()), rep.lhs, rep.rhs);
            }
        }
    }
    Ok(r.finish())
}

/// Block certificate to growth certificate on `l^2`, checked for `n <= 64`.
pub fn verify_certtransform(seed: u64, count: usize) -> Result<VerifyReport> {
    let space = SpaceModel::lp(2.0)?;
    let mut r = VerifyReport::new("certtransform", seed, count);
    let mut g = rng(seed);
    let mut accepted = 0;
    let mut attempts = 0;
    while accepted < count {
        attempts += 1;
        if attempts > 100 * count.max(1) {
            return Err(Error::domain("too few random families admit a block certificate"));
        }
        let w = random_periodic(&mut g, 8, 2.0);
        let c = Criterion::new(&w, &space, 1, 1)?;
        let th = theta(&c, 8, 64)?;
        let Some(block) = th.block else { continue };
        accepted += 1;
        let gc = blockcert_to_growthcert(&block, &w, &space, 1024)?;
        let checks = verify_growthcert(&gc, &w, &space, 1024)?;
        match checks.iter().find(|c| !c.ok) {
            None => r.agreements += 1,
            Some(bad) => r.fail(format!(
                "{}: n = {} minimum {} below ln C_n = {}",
                w.render(),
                bad.n,
                bad.direct_min,
                bad.log_c_n
            )),
        }
    }
    Ok(r.finish())
}

/// Relative coefficient-wise distance `max |a_k - b_k| / max |a_k|`.
pub fn relative_distance(a: &TruncatedVector, b: &TruncatedVector) -> f64 {
    let scale = a
        .pairs()
        .iter()
        .chain(b.pairs().iter())
        .map(|(_, c)| c.abs())
        .fold(0.0f64, f64::max);
    if scale == 0.0 {
        return 0.0;
    }
    let mut idx: Vec<i64> = a.pairs().iter().chain(b.pairs().iter()).map(|(k, _)| *k).collect();
    idx.sort_unstable();
    idx.dedup();
    idx.iter()
        .map(|&k| (a.coefficient(k) - b.coefficient(k)).abs())
        .fold(0.0f64, f64::max)
        / scale
}

/// Expanded against iterated `P(B_w)^n x` with `deg P <= 4`, `n <= 8`, support `<= 128`.
pub fn verify_polyorbit(seed: u64, count: usize) -> Result<VerifyReport> {
    let space = SpaceModel::lp(2.0)?;
    let mut r = VerifyReport::new("polyorbit", seed, count);
    let mut g = rng(seed);
    let mut worst = 0.0f64;
    for i in 0..count {
        let w = random_eventually_periodic(&mut g, 4, 4, 1.0);
        let d = g.random_range(1..=4usize);
        let mut p: Vec<f64> = (0..=d).map(|_| g.random_range(-2.0..=2.0)).collect();
        if p[d] == 0.0 {
            p[d] = 1.0;
        }
        let n = g.random_range(1..=8usize);
        let support = g.random_range(1..=128usize);
        let mut idx: Vec<i64> = (0..support).map(|_| g.random_range(1..=256i64)).collect();
        idx.sort_unstable();
        idx.dedup();
        let pairs: Vec<(i64, f64)> = idx.iter().map(|&k| (k, g.random_range(-1.0..=1.0))).collect();
        let x = TruncatedVector::from_pairs(&space, &pairs)?;
        let a = apply_poly(&x, &w, &p, n, PolyMode::Expanded)?;
        let b = apply_poly(&x, &w, &p, n, PolyMode::Iterated)?;
        let err = relative_distance(&a, &b);
        worst = worst.max(err);
        if err <= 1e-9 {
            r.agreements += 1;
        } else {
            r.fail(format!("case {i}: relative distance {err:e} (n = {n}, deg P = {d})"));
        }
    }
    r.max_error = Some(worst);
    Ok(r.finish())
}

/// Suite names accepted by [`run_suite`].
pub const SUITES: [&str; 4] = ["condn", "prop44", "certtransform", "polyorbit"];

pub fn default_count(suite: &str) -> usize {
    match suite {
        "condn" => 200,
        "prop44" | "polyorbit" => 100,
        _ => 50,
    }
}

pub fn run_suite(suite: &str, seed: u64, count: usize) -> Result<VerifyReport> {
    match suite {
        "condn" => verify_condn(seed, count),
        "prop44" => verify_prop44(seed, count),
        "certtransform" => verify_certtransform(seed, count),
        "polyorbit" => verify_polyorbit(seed, count),
        other => Err(Error::domain(format!(
            "unknown suite `{other}`; expected one of {}",
            SUITES.join(", ")
        ))),
    }
}
