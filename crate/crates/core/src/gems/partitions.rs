//! The partition function `p(n)`: exact values and the leading asymptotics.

use std::f64::consts::PI;

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{domain, Result};
use crate::numerics::ln_biguint;

/// `p(0..=n)` by Euler's pentagonal recurrence
/// `p(m) = Σ_{k≥1} (−1)^{k+1} [p(m − k(3k−1)/2) + p(m − k(3k+1)/2)]`.
pub fn partition_table(n: usize) -> Vec<BigUint> {
    let mut p: Vec<BigInt> = Vec::with_capacity(n + 1);
    p.push(BigInt::from(1));
    for m in 1..=n {
        let mut acc = BigInt::zero();
        let mut k = 1usize;
        loop {
            let g1 = k * (3 * k - 1) / 2;
            if g1 > m {
                break;
            }
            let g2 = k * (3 * k + 1) / 2;
            let mut term = p[m - g1].clone();
            if g2 <= m {
                term += &p[m - g2];
            }
            if k % 2 == 1 {
                acc += term;
            } else {
                acc -= term;
            }
            k += 1;
        }
        p.push(acc);
    }
    p.into_iter().map(|v| v.to_biguint().expect("partition counts are positive")).collect()
}

pub fn partition_exact(n: usize) -> BigUint {
    partition_table(n).pop().expect("table holds p(0)")
}

/// `p(0..=n)` by counting partitions into parts of size at most `k`, one
/// part size at a time.
pub fn partition_dp(n: usize) -> Vec<BigUint> {
    let mut ways = vec![BigUint::zero(); n + 1];
    ways[0] = BigUint::from(1u32);
    for part in 1..=n {
        for m in part..=n {
            let add = ways[m - part].clone();
            ways[m] += add;
        }
    }
    ways
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UspenskyEstimate {
    pub ln_simple: f64,
    pub ln_refined: f64,
    pub simple: f64,
    pub refined: f64,
}

/// `exp(π√(2n/3)) / (4n√3)` and the shifted form
/// `exp(π√((2/3)(n − 1/24))) / (4√3 (n − 1/24)) · (1 − √3 / (π√(2n − 1/12)))`,
/// both evaluated through their logarithms.
pub fn partition_uspensky(n: u64) -> Result<UspenskyEstimate> {
    if n == 0 {
        return Err(domain("the asymptotic formulas need n >= 1"));
    }
    let x = n as f64;
    let s3 = 3f64.sqrt();
    let ln_simple = PI * (2.0 * x / 3.0).sqrt() - (4.0 * x * s3).ln();
    let shifted = x - 1.0 / 24.0;
    let correction = 1.0 - s3 / (PI * (2.0 * x - 1.0 / 12.0).sqrt());
    let ln_refined = PI * (2.0 * shifted / 3.0).sqrt() - (4.0 * s3 * shifted).ln() + correction.ln();
    Ok(UspenskyEstimate { ln_simple, ln_refined, simple: ln_simple.exp(), refined: ln_refined.exp() })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartitionValue {
    pub n: u64,
    pub exact: String,
    pub asymptotic_simple: f64,
    pub asymptotic_refined: f64,
    pub ratio_simple: f64,
    pub ratio_refined: f64,
}

pub fn partition_value(n: u64) -> Result<PartitionValue> {
    let exact = partition_exact(n as usize);
    let est = partition_uspensky(n)?;
    let ln_exact = ln_biguint(&exact);
    Ok(PartitionValue {
        n,
        exact: exact.to_string(),
        asymptotic_simple: est.simple,
        asymptotic_refined: est.refined,
        ratio_simple: (est.ln_simple - ln_exact).exp(),
        ratio_refined: (est.ln_refined - ln_exact).exp(),
    })
}

/// `|estimate/p(n) − 1|` without forming `p(n)` as a float.
pub fn relative_error(ln_estimate: f64, exact: &BigUint) -> f64 {
    let ratio = match exact.to_f64() {
        Some(v) if v.is_finite() => ln_estimate.exp() / v,
        _ => (ln_estimate - ln_biguint(exact)).exp(),
    };
    (ratio - 1.0).abs()
}
