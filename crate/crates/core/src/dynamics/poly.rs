//! Exact convolution powers of `P` and the action of `P(B_w)^n`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::dynamics::vector::{apply_shift, Coef, TruncatedVector};
use crate::error::{Error, Result};
use crate::weights::WeightSequence;

/// Largest `n * deg P` expanded exactly.
pub const MAX_POLY_TERMS: usize = 4096;

/// `P^n = sum_{i=0}^{nd} c_i^(n) t^i` with `K_n = max_{k<=n, i<=kd} |c_i^(k)|`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolyPower {
    pub base: Vec<f64>,
    pub n: usize,
    pub coeffs: Vec<f64>,
    #[serde(rename = "K_n")]
    pub k_n: f64,
    #[serde(skip)]
    pub exact: Vec<BigRational>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PolyMode {
    /// `sum_i c_i^(n) B^i x`.
    Expanded,
    /// `P(B)` applied `n` times.
    Iterated,
}

fn to_rational(c: f64) -> Result<BigRational> {
    BigRational::from_float(c).ok_or_else(|| Error::domain(format!("coefficient {c} is not finite")))
}

fn to_f64(r: &BigRational, n: usize, d: usize) -> Result<f64> {
    r.to_f64().filter(|v| v.is_finite()).ok_or_else(|| {
        Error::Overflow(format!(
            "a coefficient of P^{n} leaves the double range; use a smaller n * deg P than {}",
            n * d
        ))
    })
}

fn convolve(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

pub fn poly_power(p: &[f64], n: usize) -> Result<PolyPower> {
    let d = p.len().saturating_sub(1);
    if n == 0 || d == 0 {
        return Err(Error::domain("poly_power needs n >= 1 and deg P >= 1"));
    }
    if n * d > MAX_POLY_TERMS {
        return Err(Error::Overflow(format!(
            "n * deg P = {} exceeds the exact expansion budget {MAX_POLY_TERMS}; use a smaller n",
            n * d
        )));
    }
    let base: Vec<BigRational> = p.iter().map(|&c| to_rational(c)).collect::<Result<_>>()?;
    let mut cur = base.clone();
    let mut k_max = cur.iter().map(|c| c.abs()).max().unwrap_or_else(BigRational::zero);
    for _ in 1..n {
        cur = convolve(&cur, &base);
        if let Some(m) = cur.iter().map(|c| c.abs()).max() {
            if m > k_max {
                k_max = m;
            }
        }
    }
    Ok(PolyPower {
        base: p.to_vec(),
        n,
        coeffs: cur.iter().map(|c| to_f64(c, n, d)).collect::<Result<_>>()?,
        k_n: to_f64(&k_max, n, d)?,
        exact: cur,
    })
}

fn apply_once(x: &TruncatedVector, w: &WeightSequence, coeffs: &[f64]) -> Result<TruncatedVector> {
    let mut powers = Vec::with_capacity(coeffs.len());
    let mut y = x.clone();
    for (i, _) in coeffs.iter().enumerate() {
        if i > 0 {
            y = apply_shift(&y, w, 1)?;
        }
        powers.push(y.clone());
    }
    let parts: Vec<(Coef, &TruncatedVector)> = coeffs
        .iter()
        .zip(&powers)
        .filter_map(|(&c, v)| Coef::from_value(c).map(|c| (c, v)))
        .collect();
    if parts.is_empty() {
        return Ok(x.scale(0.0));
    }
    TruncatedVector::combine(&parts)
}

/// `P(B_w)^n x`.
pub fn apply_poly(
    x: &TruncatedVector,
    w: &WeightSequence,
    p: &[f64],
    n: usize,
    mode: PolyMode,
) -> Result<TruncatedVector> {
    if p.iter().any(|c| !c.is_finite()) {
        return Err(Error::domain("polynomial coefficients must be finite"));
    }
    if n == 0 {
        return Ok(x.clone());
    }
    match mode {
        PolyMode::Expanded => {
            let pp = poly_power(p, n)?;
            apply_once(x, w, &pp.coeffs)
        }
        PolyMode::Iterated => {
            let mut y = x.clone();
            for _ in 0..n {
                y = apply_once(&y, w, p)?;
            }
            Ok(y)
        }
    }
}

/// Binomial coefficient as a rational, used by tests and oracles.
pub fn binomial(n: u64, k: u64) -> BigRational {
    let mut num = BigInt::from(1);
    let mut den = BigInt::from(1);
    for i in 0..k {
        num *= n - i;
        den *= i + 1;
    }
    BigRational::new(num, den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::parse_space_spec;
    use crate::weights::parse_weight_spec;

    #[test]
    fn power_examples() {
        let p = poly_power(&[1.0, 1.0], 2).unwrap();
        assert_eq!((p.coeffs.clone(), p.k_n), (vec![1.0, 2.0, 1.0], 2.0));
        let p = poly_power(&[0.0, 2.0], 3).unwrap();
        assert_eq!((p.coeffs.clone(), p.k_n), (vec![0.0, 0.0, 0.0, 8.0], 8.0));
        let p = poly_power(&[1.0, 2.0, 1.0], 2).unwrap();
        assert_eq!((p.coeffs.clone(), p.k_n), (vec![1.0, 4.0, 6.0, 4.0, 1.0], 6.0));
        let p40 = poly_power(&[1.0, 1.0], 40).unwrap();
        assert!((0..=40).all(|k| p40.exact[k as usize] == binomial(40, k)));
        assert!(matches!(poly_power(&[1.0, 1.0], MAX_POLY_TERMS + 1), Err(Error::Overflow(_))));
    }

    #[test]
    fn apply_examples() {
        let s = parse_space_spec("lp:2").unwrap();
        let e2 = TruncatedVector::basis(&s, 2).unwrap();
        let y = apply_poly(&e2, &parse_weight_spec("const:1").unwrap(), &[1.0, 1.0], 1, PolyMode::Expanded).unwrap();
        assert_eq!(y.pairs(), vec![(1, 1.0), (2, 1.0)]);

        let s = parse_space_spec("entire").unwrap();
        let e3 = TruncatedVector::basis(&s, 3).unwrap();
        let y = apply_poly(&e3, &parse_weight_spec("linear").unwrap(), &[0.0, 1.0], 2, PolyMode::Iterated).unwrap();
        assert_eq!(y.support_len(), 1);
        assert!((y.coefficient(1) - 6.0).abs() < 1e-12);

        let s = parse_space_spec("lp:2").unwrap();
        let e4 = TruncatedVector::basis(&s, 4).unwrap();
        let w = parse_weight_spec("const:2").unwrap();
        for mode in [PolyMode::Expanded, PolyMode::Iterated] {
            let y = apply_poly(&e4, &w, &[1.0, 1.0], 2, mode).unwrap();
            for (k, c) in [(2, 4.0), (3, 4.0), (4, 1.0)] {
                assert!((y.coefficient(k) - c).abs() < 1e-12, "{mode:?}");
            }
        }
    }
}
