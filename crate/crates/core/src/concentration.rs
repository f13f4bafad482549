//! Bernstein's inequality for sums of independent zero-mean variables,
//! `P(|S_n| > t) < 2 exp(−t² / (2B_n² + 2ct))`, where `B_n² = Var S_n` and
//! `E|X_j|^k ≤ k! (σ_j²/2) c^{k−2}` for all `k ≥ 3`.
//!
//! Centering is the caller's job: every routine here assumes `E X_j = 0`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::numerics::ln_factorial;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BernsteinInput {
    b_n_sq: f64,
    c: f64,
    t: f64,
    m: Option<f64>,
}

impl BernsteinInput {
    pub fn new(b_n_sq: f64, c: f64, t: f64) -> Result<Self> {
        if !(b_n_sq > 0.0 && b_n_sq.is_finite()) {
            return Err(domain(format!("B_n^2 must be positive, got {b_n_sq}")));
        }
        if !(c > 0.0 && c.is_finite()) {
            return Err(domain(format!("c must be positive, got {c}")));
        }
        if !(t >= 0.0) {
            return Err(domain(format!("t must be non-negative, got {t}")));
        }
        Ok(Self { b_n_sq, c, t, m: None })
    }

    /// Variables bounded by `M` in absolute value, for which `c = M/3`.
    pub fn bounded(b_n_sq: f64, m: f64, t: f64) -> Result<Self> {
        if !(m > 0.0 && m.is_finite()) {
            return Err(domain(format!("M must be positive, got {m}")));
        }
        let mut input = Self::new(b_n_sq, m / 3.0, t)?;
        input.m = Some(m);
        Ok(input)
    }

    pub fn b_n_sq(&self) -> f64 {
        self.b_n_sq
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn m(&self) -> Option<f64> {
        self.m
    }
}

pub fn bernstein_bound(input: &BernsteinInput) -> f64 {
    let t = input.t;
    2.0 * (-t * t / (2.0 * input.b_n_sq + 2.0 * input.c * t)).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentEntry {
    pub variable: usize,
    pub k: u32,
    pub moment: f64,
    pub bound: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentReport {
    pub entries: Vec<MomentEntry>,
    pub all_hold: bool,
}

impl MomentReport {
    pub fn first_failure(&self) -> Option<&MomentEntry> {
        self.entries.iter().find(|e| !e.holds)
    }
}

/// Checks `E|X_j|^k ≤ k! (σ_j²/2) c^{k−2}` for every variable and
/// `3 ≤ k ≤ k_max`. `moment_fn(j, k)` returns `E|X_j|^k`.
pub fn moment_condition_check<F>(sigma_sq: &[f64], c: f64, moment_fn: F, k_max: u32) -> Result<MomentReport>
where
    F: Fn(usize, u32) -> Result<f64>,
{
    if !(c > 0.0) {
        return Err(domain(format!("c must be positive, got {c}")));
    }
    if k_max < 3 {
        return Err(domain(format!("k_max must be at least 3, got {k_max}")));
    }
    let mut entries = Vec::new();
    for (j, &s2) in sigma_sq.iter().enumerate() {
        if !(s2 > 0.0) {
            return Err(domain(format!("sigma_sq[{j}] must be positive, got {s2}")));
        }
        for k in 3..=k_max {
            let moment = moment_fn(j, k).map_err(|e| Error::Numeric(format!("moment of variable {j} at k = {k}: {e}")))?;
            let ln_bound = ln_factorial(k as u64) + (s2 / 2.0).ln() + (k - 2) as f64 * c.ln();
            let bound = ln_bound.exp();
            // compare in log space so k! c^{k−2} cannot overflow the verdict
            let holds = moment <= 0.0 || moment.ln() <= ln_bound + 1e-12;
            entries.push(MomentEntry { variable: j, k, moment, bound, holds });
        }
    }
    let all_hold = entries.iter().all(|e| e.holds);
    Ok(MomentReport { entries, all_hold })
}

/// `E|X|^k = M^k/(k+1)` for `X` uniform on `(−M, M)`.
pub fn uniform_abs_moment(m: f64, k: u32) -> f64 {
    m.powi(k as i32) / (k as f64 + 1.0)
}

/// Bounded zero-mean summands for the Monte Carlo harness.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Summand {
    /// Uniform on `(−M, M)`: variance `M²/3`.
    Uniform { m: f64 },
    /// `±M` with equal probability: variance `M²`.
    Rademacher { m: f64 },
}

impl Summand {
    pub fn bound(&self) -> f64 {
        match *self {
            Summand::Uniform { m } | Summand::Rademacher { m } => m,
        }
    }

    pub fn variance(&self) -> f64 {
        match *self {
            Summand::Uniform { m } => m * m / 3.0,
            Summand::Rademacher { m } => m * m,
        }
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        match *self {
            Summand::Uniform { m } => m * (2.0 * rng.gen::<f64>() - 1.0),
            Summand::Rademacher { m } => {
                if rng.gen::<bool>() {
                    m
                } else {
                    -m
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonteCarloConfig {
    pub summand: Summand,
    pub n: usize,
    pub t: f64,
    pub samples: u64,
    pub seed: u64,
    pub partitions: u64,
}

impl MonteCarloConfig {
    pub fn new(summand: Summand, n: usize, t: f64, seed: u64) -> Self {
        Self { summand, n, t, samples: 1_000_000, seed, partitions: 16 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonteCarloTail {
    pub estimate: f64,
    pub std_error: f64,
    pub hits: u64,
    pub samples: u64,
    pub bound: f64,
    /// `estimate − 3·std_error ≤ bound`.
    pub consistent: bool,
}

/// Estimates `P(|S_n| > t)` by simulation.
///
/// Partition `k` draws from a ChaCha stream seeded with the master seed on
/// stream `k`, so the result does not depend on thread scheduling.
pub fn monte_carlo_tail(cfg: &MonteCarloConfig) -> Result<MonteCarloTail> {
    if cfg.n == 0 || cfg.samples == 0 || cfg.partitions == 0 {
        return Err(domain("n, samples and partitions must be positive"));
    }
    if !(cfg.summand.bound() > 0.0) {
        return Err(domain("summand bound must be positive"));
    }
    let input = BernsteinInput::bounded(cfg.n as f64 * cfg.summand.variance(), cfg.summand.bound(), cfg.t)?;
    let per = cfg.samples / cfg.partitions;
    let extra = cfg.samples % cfg.partitions;
    let hits: u64 = (0..cfg.partitions)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(k);
            let count = per + u64::from(k < extra);
            let mut hits = 0u64;
            for _ in 0..count {
                let s: f64 = (0..cfg.n).map(|_| cfg.summand.draw(&mut rng)).sum();
                hits += u64::from(s.abs() > cfg.t);
            }
            hits
        })
        .sum();
    let n = cfg.samples as f64;
    let estimate = hits as f64 / n;
    let std_error = (estimate * (1.0 - estimate) / n).sqrt();
    let bound = bernstein_bound(&input);
    Ok(MonteCarloTail {
        estimate,
        std_error,
        hits,
        samples: cfg.samples,
        bound,
        consistent: estimate - 3.0 * std_error <= bound,
    })
}
