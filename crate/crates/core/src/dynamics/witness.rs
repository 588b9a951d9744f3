//! Constructive witnesses: a finite hypercyclic-vector prefix and a vector whose
//! orbit diverges at a certified rate.

use serde::Serialize;

use crate::certified::LOG_TOL;
use crate::criteria::certificates::{verify_growthcert, GrowthCertificate};
use crate::dynamics::vector::{apply_shift, right_inverse, seminorm_log, TruncatedVector};
use crate::error::{Error, Result};
use crate::spaces::SpaceModel;
use crate::weights::WeightSequence;

/// Upper bound on witness stages.
pub const MAX_STAGES: usize = 4096;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrefixReport {
    pub z: TruncatedVector,
    pub times: Vec<usize>,
    /// `p_j(B^{n_i} z - y_i)` per target.
    pub errors: Vec<f64>,
    /// `p_j(z)`.
    pub smallness: f64,
    pub j: usize,
}

/// `z = sum_i R^{n_i} y_i` with `R^n` the right inverse of `B_w^n`.
pub fn build_hypercyclic_prefix(
    w: &WeightSequence,
    space: &SpaceModel,
    targets: &[TruncatedVector],
    times: &[usize],
    j: usize,
) -> Result<PrefixReport> {
    if targets.len() != times.len() || targets.is_empty() {
        return Err(Error::domain("need one time per target and at least one target"));
    }
    if times.windows(2).any(|p| p[0] >= p[1]) {
        return Err(Error::domain("times must be strictly increasing"));
    }
    let mut z = TruncatedVector::zero(space);
    let mut prev_top: Option<(usize, i64)> = None;
    for (i, (y, &n)) in targets.iter().zip(times).enumerate() {
        let block = right_inverse(y, w, n)?;
        if let (Some((pi, top)), Some(lo)) = (prev_top, block.min_index()) {
            if lo <= top {
                return Err(Error::domain(format!(
                    "targets {pi} and {i}: block for time {n} starts at index {lo}, not above index {top} of the previous block"
                )));
            }
        }
        if let Some(hi) = block.max_index() {
            prev_top = Some((i, hi));
        }
        z = z.add(&block)?;
    }
    let errors = targets
        .iter()
        .zip(times)
        .map(|(y, &n)| Ok(seminorm_log(&apply_shift(&z, w, n)?.sub(y)?, space, j)?.exp()))
        .collect::<Result<Vec<_>>>()?;
    Ok(PrefixReport {
        smallness: seminorm_log(&z, space, j)?.exp(),
        z,
        times: times.to_vec(),
        errors,
        j,
    })
}

/// Stage `n` covers `j in (from, to]` with `p(B^j x) >= exp(log_bound(j))`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Band {
    pub n: usize,
    pub from: usize,
    pub to: usize,
    /// Index of the stage vector.
    pub position: i64,
    /// `ln p(e'_n)`, with `p_n(e'_n) = 1/n^2` before switching to the certificate seminorm.
    pub log_stage_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DivergenceWitness {
    pub x: TruncatedVector,
    /// `k_0, k_1, ..., k_stages`.
    pub schedule: Vec<usize>,
    pub bands: Vec<Band>,
    /// Seminorm index the bound refers to.
    pub q: usize,
    /// The general-subspace loss factor `1/((1+eps)(2+eps))` as `eps -> 0`; disjoint
    /// coordinate supports avoid it here.
    pub general_loss_factor: f64,
    #[serde(skip)]
    pub gcert: GrowthCertificate,
}

impl DivergenceWitness {
    /// `ln` of the predicted lower bound for `p_q(B^j x)`, if `j` lies in a band.
    pub fn log_bound(&self, j: usize) -> Option<f64> {
        let b = self.bands.iter().find(|b| b.from < j && j <= b.to)?;
        Some(self.gcert.log_c_at(j) + b.log_stage_norm)
    }
}

/// Least `j >= 1` with `C_j >= n^3`.
fn first_reach(g: &GrowthCertificate, n: usize) -> usize {
    let target = 3.0 * (n as f64).ln();
    let per = g.block.log_c;
    let blocks = ((target + g.log_k) / per).ceil().max(0.0) as usize;
    let mut j = (blocks * g.block.m).max(1);
    while j > 1 && g.log_c_at(j - 1) >= target {
        j -= 1;
    }
    while g.log_c_at(j) < target {
        j += 1;
    }
    j
}

pub fn build_divergence_witness(
    gcert: &GrowthCertificate,
    w: &WeightSequence,
    space: &SpaceModel,
    stages: usize,
    k_horizon: i64,
) -> Result<DivergenceWitness> {
    if stages == 0 || stages > MAX_STAGES {
        return Err(Error::domain(format!("stages must lie in [1, {MAX_STAGES}]")));
    }
    let checks = verify_growthcert(gcert, w, space, k_horizon)?;
    if let Some(bad) = checks.iter().find(|c| !c.ok) {
        return Err(Error::InvalidCertificate(format!(
            "growth bound fails at n = {}: window minimum {} below ln C_n = {}",
            bad.n, bad.direct_min, bad.log_c_n
        )));
    }
    let q = gcert.block.big_j;
    let single_norm = space.rows_identical();
    // Band n = (k_{n-1}, k_n] needs C_j >= n^3 for every j > k_{n-1}.
    let mut schedule = vec![first_reach(gcert, 1) - 1];
    for n in 1..=stages {
        let prev = schedule[n - 1];
        schedule.push((prev + 1).max(first_reach(gcert, n + 1) - 1));
    }
    let mut x = TruncatedVector::zero(space);
    let mut bands = Vec::with_capacity(stages);
    let mut last_pos = i64::MIN;
    for n in 1..=stages {
        let to = schedule[n];
        // B^j e_s obeys the certificate while s - j >= E_j for j <= k_n.
        let position = (gcert.e_at(to) + to as i64).max(last_pos + 1);
        last_pos = position;
        let scale_row = if single_norm { q } else { n.max(q) };
        let e = TruncatedVector::basis(space, position)?;
        let log_unit = seminorm_log(&e, space, scale_row)?;
        let log_coef = -2.0 * (n as f64).ln() - log_unit;
        let stage = TruncatedVector::scaled_basis(space, position, log_coef)?;
        let log_stage_norm = seminorm_log(&stage, space, q)?;
        x = x.add(&stage)?;
        bands.push(Band {
            n,
            from: schedule[n - 1],
            to,
            position,
            log_stage_norm,
        });
    }
    Ok(DivergenceWitness {
        x,
        schedule,
        bands,
        q,
        general_loss_factor: 0.5,
        gcert: gcert.clone(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessCheck {
    pub j: usize,
    #[serde(serialize_with = "crate::certified::ser_ext")]
    pub log_value: f64,
    #[serde(serialize_with = "crate::certified::ser_ext")]
    pub log_bound: f64,
    pub ok: bool,
}

/// Compares `p_q(B^j x)` with the predicted bound for `1 <= j <= horizon`.
pub fn verify_witness(
    wit: &DivergenceWitness,
    w: &WeightSequence,
    space: &SpaceModel,
    horizon: usize,
) -> Result<Vec<WitnessCheck>> {
    let mut y = wit.x.clone();
    let mut out = Vec::new();
    for j in 1..=horizon {
        y = apply_shift(&y, w, 1)?;
        let Some(log_bound) = wit.log_bound(j) else { continue };
        let log_value = seminorm_log(&y, space, wit.q)?;
        out.push(WitnessCheck {
            j,
            log_value,
            log_bound,
            ok: log_value >= log_bound - LOG_TOL,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria::certificates::blockcert_to_growthcert;
    use crate::criteria::tail::BlockCertificate;
    use crate::spaces::parse_space_spec;
    use crate::weights::parse_weight_spec;

    #[test]
    fn prefix_two_targets() {
        let s = parse_space_spec("lp:2").unwrap();
        let w = parse_weight_spec("const:2").unwrap();
        let t1 = TruncatedVector::basis(&s, 1).unwrap();
        let t2 = TruncatedVector::from_pairs(&s, &[(1, 1.0), (2, 1.0)]).unwrap();
        let r = build_hypercyclic_prefix(&w, &s, &[t1.clone(), t2], &[10, 20], 1).unwrap();
        assert!((r.errors[0] - 2f64.sqrt() / 1024.0).abs() < 1e-15);
        assert_eq!(r.errors[1], 0.0);
        let single = build_hypercyclic_prefix(&w, &s, std::slice::from_ref(&t1), &[7], 1).unwrap();
        assert_eq!(single.errors, vec![0.0]);
        assert!(build_hypercyclic_prefix(&w, &s, &[t1.clone(), t1], &[3, 3], 1).is_err());
    }

    #[test]
    fn prefix_spacing_violation() {
        let s = parse_space_spec("lp:2").unwrap();
        let w = parse_weight_spec("const:2").unwrap();
        let far = TruncatedVector::basis(&s, 30).unwrap();
        let near = TruncatedVector::basis(&s, 1).unwrap();
        let err = build_hypercyclic_prefix(&w, &s, &[far, near], &[5, 6], 1).unwrap_err();
        assert!(err.to_string().contains("targets 0 and 1"));
    }

    #[test]
    fn witness_constant_two() {
        let s = parse_space_spec("lp:2").unwrap();
        let w = parse_weight_spec("const:2").unwrap();
        let cert = BlockCertificate::new(std::f64::consts::LN_2, 1, 1, 1, 1, true);
        let g = blockcert_to_growthcert(&cert, &w, &s, 256).unwrap();
        let wit = build_divergence_witness(&g, &w, &s, 50, 256).unwrap();
        let checks = verify_witness(&wit, &w, &s, wit.schedule[50]).unwrap();
        assert!(!checks.is_empty());
        assert!(checks.iter().all(|c| c.ok));
        for b in &wit.bands {
            for j in b.from + 1..=b.to {
                assert!(wit.log_bound(j).unwrap() >= (b.n as f64).ln() - 1e-9);
            }
        }
    }
}
