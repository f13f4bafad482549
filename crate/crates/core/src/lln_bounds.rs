//! Sample-size bounds for the weak law of large numbers: the block/geometric
//! argument attributed to James Bernoulli, and Cantelli's strong bound.
//!
//! Bernoulli's bound picks the least `α ≥ 1` with `(p/(p+ε))^α ≤ η`, then
//! guarantees `P(m ≥ ⌈Np + Nε⌉) < η` for every
//! `N ≥ (α(1+ε) − q) / (ε(p+ε))`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use crate::error::{domain, Result};
use crate::numerics::{binom_tail_exact, ceil_rational, pow_rational, Scalar};

/// Accuracy `ε` and confidence slack `η` for a `p`-coin.
#[derive(Debug, Clone, PartialEq)]
pub struct LlnQuery {
    p: Scalar,
    eps: Scalar,
    eta: Scalar,
}

impl LlnQuery {
    pub fn new(p: Scalar, eps: Scalar, eta: Scalar) -> Result<Self> {
        for (name, v) in [("p", &p), ("eps", &eps), ("eta", &eta)] {
            let x = v.to_f64();
            if !(x > 0.0 && x < 1.0) {
                return Err(domain(format!("{name} must lie in (0, 1), got {v}")));
            }
        }
        let over = match (p.as_exact(), eps.as_exact()) {
            (Some(a), Some(b)) => a + b > BigRational::one(),
            _ => p.to_f64() + eps.to_f64() > 1.0,
        };
        if over {
            return Err(domain(format!(
                "p + eps = {} exceeds 1; the upper-tail event is empty",
                p.to_f64() + eps.to_f64()
            )));
        }
        Ok(Self { p, eps, eta })
    }

    pub fn from_f64(p: f64, eps: f64, eta: f64) -> Result<Self> {
        Self::new(p.into(), eps.into(), eta.into())
    }

    pub fn p(&self) -> &Scalar {
        &self.p
    }

    pub fn eps(&self) -> &Scalar {
        &self.eps
    }

    pub fn eta(&self) -> &Scalar {
        &self.eta
    }

    fn exact(&self) -> Option<(&BigRational, &BigRational, &BigRational)> {
        Some((self.p.as_exact()?, self.eps.as_exact()?, self.eta.as_exact()?))
    }
}

/// Least `α ≥ 1` with `(p/(p+ε))^α ≤ η`.
///
/// A logarithmic estimate is corrected by direct power comparisons, in exact
/// rational arithmetic when all inputs are rational.
pub fn bernoulli_alpha(query: &LlnQuery) -> u64 {
    let (p, eps, eta) = (query.p.to_f64(), query.eps.to_f64(), query.eta.to_f64());
    let r = p / (p + eps);
    let guess = (eta.ln() / r.ln()).ceil().max(1.0) as u64;
    match query.exact() {
        Some((p, eps, eta)) => {
            let r = p / (p + eps);
            let holds = |a: u64| pow_rational(&r, a) <= *eta;
            adjust_least(guess, holds)
        }
        None => {
            let holds = |a: u64| r.powf(a as f64) <= eta;
            adjust_least(guess, holds)
        }
    }
}

/// Moves `guess` to the least `a ≥ 1` satisfying a monotone predicate.
fn adjust_least(mut a: u64, holds: impl Fn(u64) -> bool) -> u64 {
    while !holds(a) {
        a += 1;
    }
    while a > 1 && holds(a - 1) {
        a -= 1;
    }
    a
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BernoulliBound {
    pub alpha: u64,
    pub n: u64,
}

/// `N = ⌈(α(1+ε) − q) / (ε(p+ε))⌉`, at least 1.
pub fn bernoulli_n_bound(query: &LlnQuery) -> BernoulliBound {
    let alpha = bernoulli_alpha(query);
    let n = match query.exact() {
        Some((p, eps, _)) => {
            let one = BigRational::one();
            let a = BigRational::from_integer(BigInt::from(alpha));
            let q = &one - p;
            let bound = (a * (&one + eps) - q) / (eps * (p + eps));
            ceil_rational(&bound).to_u64().unwrap_or(0)
        }
        None => {
            let (p, eps) = (query.p.to_f64(), query.eps.to_f64());
            let bound = (alpha as f64 * (1.0 + eps) - (1.0 - p)) / (eps * (p + eps));
            bound.ceil().max(0.0) as u64
        }
    };
    BernoulliBound { alpha, n: n.max(1) }
}

/// `μ = ⌈Np + Nε⌉`, the first success count of the upper deviation event.
pub fn upper_event_threshold(query: &LlnQuery, n: u64) -> u64 {
    match query.exact() {
        Some((p, eps, _)) => {
            let nn = BigRational::from_integer(BigInt::from(n));
            ceil_rational(&(nn * (p + eps))).to_u64().unwrap_or(u64::MAX)
        }
        None => (n as f64 * (query.p.to_f64() + query.eps.to_f64())).ceil() as u64,
    }
}

/// `P(S_N ≥ ⌈Np + Nε⌉)` by exact summation.
pub fn upper_deviation_probability(query: &LlnQuery, n: u64) -> Result<f64> {
    let mu = upper_event_threshold(query, n);
    Ok(binom_tail_exact(n, mu as i64 - 1, query.p.to_f64())?.probability)
}

/// Two-sided companion to [`bernoulli_n_bound`].
///
/// Runs the one-sided bound at `η` on both the success and the failure coin
/// and takes the larger `N`. By the union bound the two-sided deviation
/// probability at that `N` is below `2η`; this is a convention, reported in
/// `certified_level`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoSidedBound {
    pub n: u64,
    pub upper: BernoulliBound,
    /// `None` when `q + ε > 1`, so the lower deviation event is empty.
    pub lower: Option<BernoulliBound>,
    pub certified_level: f64,
}

pub fn bernoulli_n_two_sided(query: &LlnQuery) -> Result<TwoSidedBound> {
    let upper = bernoulli_n_bound(query);
    let flipped = LlnQuery::new(query.p.complement(), query.eps.clone(), query.eta.clone());
    let lower = flipped.ok().map(|q| bernoulli_n_bound(&q));
    let n = upper.n.max(lower.map_or(1, |b| b.n));
    Ok(TwoSidedBound { n, upper, lower, certified_level: (2.0 * query.eta.to_f64()).min(1.0) })
}

/// Smallest integer `N > (2/ε²) ln(4/(ε²η)) + 2`.
pub fn cantelli_n(eps: f64, eta: f64) -> Result<u64> {
    if !(eps > 0.0 && eps < 1.0) || !(eta > 0.0 && eta < 1.0) {
        return Err(domain(format!("eps and eta must lie in (0, 1), got {eps}, {eta}")));
    }
    let e2 = eps * eps;
    let bound = 2.0 / e2 * (4.0 / (e2 * eta)).ln() + 2.0;
    Ok(bound.floor() as u64 + 1)
}

/// Single-time Chebyshev requirement `⌈pq / (ε²η)⌉`.
pub fn chebyshev_n(p: f64, eps: f64, eta: f64) -> u64 {
    (p * (1.0 - p) / (eps * eps * eta)).ceil() as u64
}
