//! Lexis dispersion theory for `n` independent series of `s` trials each.
//!
//! * `Q = Σ(m_i − sp)² / (Np(1−p))`, the coefficient of dispersion;
//! * `D = E(Q)`, decomposed as
//!   `1 + (s−1)/(np(1−p)) Σ_i (p − p_i)² − 1/(Np(1−p)) Σ_i Σ_j (p_i − p_ij)²`;
//! * `Q̂`, the plug-in statistic, with its exact Bernoulli-case moments.

use serde::Serialize;

use crate::error::{check_open_unit, domain, Error, Result};
use crate::numerics::{log_binom_pmf_raw, CompensatedSum};

/// Absolute tolerance for deciding that two trial probabilities are equal.
pub const REGIME_TOL: f64 = 1e-12;

/// Success probabilities `p_ij`: one row per series, one column per trial.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialMatrix {
    rows: Vec<Vec<f64>>,
}

impl TrialMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let s = rows.first().map(Vec::len).unwrap_or(0);
        if rows.is_empty() || s == 0 {
            return Err(domain("trial matrix needs at least one series of at least one trial"));
        }
        if let Some(i) = rows.iter().position(|r| r.len() != s) {
            return Err(domain(format!("series {i} has {} trials, expected {s}", rows[i].len())));
        }
        if let Some(x) = rows.iter().flatten().find(|x| !(0.0..=1.0).contains(*x)) {
            return Err(domain(format!("trial probability {x} outside [0, 1]")));
        }
        Ok(Self { rows })
    }

    /// Every entry equal to `p`.
    pub fn uniform(n: usize, s: usize, p: f64) -> Result<Self> {
        Self::new(vec![vec![p; s]; n])
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn s(&self) -> usize {
        self.rows[0].len()
    }

    pub fn total_trials(&self) -> usize {
        self.n() * self.s()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// `p_i`, the mean probability of each series.
    pub fn row_means(&self) -> Vec<f64> {
        let s = self.s() as f64;
        self.rows.iter().map(|r| r.iter().copied().collect::<CompensatedSum>().total() / s).collect()
    }

    /// `p`, the mean of the row means.
    pub fn grand_mean(&self) -> f64 {
        let means = self.row_means();
        means.iter().copied().collect::<CompensatedSum>().total() / means.len() as f64
    }
}

/// Success counts `m_i` of each series of `s` trials.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountVector {
    m: Vec<u64>,
    s: u64,
}

impl CountVector {
    pub fn new(m: Vec<u64>, s: u64) -> Result<Self> {
        if m.is_empty() || s == 0 {
            return Err(domain("need at least one series of at least one trial"));
        }
        if let Some(&x) = m.iter().find(|&&x| x > s) {
            return Err(domain(format!("count {x} exceeds series length {s}")));
        }
        Ok(Self { m, s })
    }

    pub fn counts(&self) -> &[u64] {
        &self.m
    }

    pub fn n(&self) -> usize {
        self.m.len()
    }

    pub fn s(&self) -> u64 {
        self.s
    }

    /// `M = Σ m_i`.
    pub fn total_successes(&self) -> u64 {
        self.m.iter().sum()
    }

    pub fn total_trials(&self) -> u64 {
        self.s * self.m.len() as u64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    /// All `p_ij` equal: normal dispersion, `D = 1`.
    Bernoulli,
    /// Constant within series, varying across: supernormal, `D > 1`.
    Lexis,
    /// Same within-series pattern in every series: subnormal, `D < 1`.
    Poisson,
    Mixed,
}

/// `Q = Σ(m_i − sp)² / (Np(1−p))`.
pub fn dispersion_q(counts: &CountVector, p: f64) -> Result<f64> {
    check_open_unit("p", p)?;
    let s = counts.s as f64;
    let ss: CompensatedSum = counts.m.iter().map(|&m| (m as f64 - s * p).powi(2)).collect();
    Ok(ss.total() / (counts.total_trials() as f64 * p * (1.0 - p)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpectedDispersion {
    /// `E(Q)` from the per-series variances.
    pub d: f64,
    /// The three-term decomposition (second sum over the `n` series).
    pub d_formula: f64,
    pub regime: Regime,
}

/// `D = E(Q)` when `Q` is formed with the grand mean `p`.
///
/// Since `m_i` is a sum of independent Bernoulli(p_ij) trials,
/// `E(m_i − sp)² = Σ_j p_ij(1−p_ij) + s²(p_i − p)²`, which gives `d`
/// directly; `d_formula` is the decomposition into Bernoulli, between-series
/// and within-series terms.
pub fn expected_d(trials: &TrialMatrix) -> Result<ExpectedDispersion> {
    let p = trials.grand_mean();
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Degenerate(format!("mean probability {p} leaves Q undefined")));
    }
    let means = trials.row_means();
    let (n, s) = (trials.n() as f64, trials.s() as f64);
    let big_n = n * s;
    let pq = p * (1.0 - p);

    let var_sum: CompensatedSum = trials.rows.iter().flatten().map(|&x| x * (1.0 - x)).collect();
    let between: CompensatedSum = means.iter().map(|&pi| (pi - p).powi(2)).collect();
    let within: CompensatedSum = trials
        .rows
        .iter()
        .zip(&means)
        .flat_map(|(row, &pi)| row.iter().map(move |&x| (pi - x).powi(2)))
        .collect();

    let d = (var_sum.total() + s * s * between.total()) / (big_n * pq);
    let d_formula = 1.0 + (s - 1.0) / (n * pq) * between.total() - within.total() / (big_n * pq);
    Ok(ExpectedDispersion { d, d_formula, regime: classify(trials) })
}

pub fn classify(trials: &TrialMatrix) -> Regime {
    let eq = |a: f64, b: f64| (a - b).abs() <= REGIME_TOL;
    let first = trials.rows[0][0];
    if trials.rows.iter().flatten().all(|&x| eq(x, first)) {
        return Regime::Bernoulli;
    }
    if trials.rows.iter().all(|r| r.iter().all(|&x| eq(x, r[0]))) {
        return Regime::Lexis;
    }
    let head = &trials.rows[0];
    if trials.rows.iter().all(|r| r.iter().zip(head).all(|(&a, &b)| eq(a, b))) {
        return Regime::Poisson;
    }
    Regime::Mixed
}

/// `Q̂ = n(N−1)/(n−1) · Σ(m_i − sM/N)² / (M(N−M))`, and 1 when `M ∈ {0, N}`.
pub fn empirical_q_hat(counts: &CountVector) -> Result<f64> {
    let n = counts.n();
    if n < 2 {
        return Err(domain("Q-hat needs at least two series"));
    }
    let big_n = counts.total_trials();
    let big_m = counts.total_successes();
    if big_m == 0 || big_m == big_n {
        return Ok(1.0);
    }
    let share = counts.s as f64 * big_m as f64 / big_n as f64;
    let ss: CompensatedSum = counts.m.iter().map(|&m| (m as f64 - share).powi(2)).collect();
    let nf = n as f64;
    let scale = nf * (big_n as f64 - 1.0) / (nf - 1.0);
    Ok(scale * ss.total() / (big_m as f64 * (big_n - big_m) as f64))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QHatMoments {
    pub mean: f64,
    pub variance: f64,
    /// `2N(N−n) / ((n−1)(N−2)(N−3))`.
    pub bound1: f64,
    /// `2/(n−1)`, stated for `n ≥ 5`.
    pub bound2: Option<f64>,
}

/// Exact mean and variance of `Q̂` in the Bernoulli case:
///
/// ```text
/// Var Q̂ = 2N(N−n)/((n−1)(N−2)(N−3)) · Σ_{M=1}^{N−1} (M−1)/M · (N−M−1)/(N−M) · C(N,M) p^M q^(N−M)
/// ```
pub fn moments_q_hat(n: u64, s: u64, p: f64) -> Result<QHatMoments> {
    check_open_unit("p", p)?;
    if n < 2 || s == 0 {
        return Err(domain("need n >= 2 series of s >= 1 trials"));
    }
    let big_n = n * s;
    if big_n <= 3 {
        return Err(domain(format!("N = ns = {big_n} must exceed 3")));
    }
    let (nf, bn) = (n as f64, big_n as f64);
    let bound1 = 2.0 * bn * (bn - nf) / ((nf - 1.0) * (bn - 2.0) * (bn - 3.0));
    let sum: CompensatedSum = (1..big_n)
        .map(|m| {
            let mf = m as f64;
            let rest = (big_n - m) as f64;
            (mf - 1.0) / mf * (rest - 1.0) / rest * log_binom_pmf_raw(big_n, m, p).exp()
        })
        .collect();
    Ok(QHatMoments {
        mean: 1.0,
        variance: bound1 * sum.total(),
        bound1,
        bound2: (n >= 5).then(|| 2.0 / (nf - 1.0)),
    })
}

/// Dispersion statistics of observed counts against the probabilities that
/// generated them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DispersionReport {
    pub q: f64,
    pub q_hat: f64,
    pub d: f64,
    pub regime: Regime,
}

pub fn dispersion_report(trials: &TrialMatrix, counts: &CountVector) -> Result<DispersionReport> {
    if trials.n() != counts.n() || trials.s() as u64 != counts.s {
        return Err(domain("trial matrix and count vector disagree on n or s"));
    }
    let expected = expected_d(trials)?;
    Ok(DispersionReport {
        q: dispersion_q(counts, trials.grand_mean())?,
        q_hat: empirical_q_hat(counts)?,
        d: expected.d,
        regime: expected.regime,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn q_vanishes_on_exact_expectation() {
        let c = CountVector::new(vec![3, 3, 3], 6).unwrap();
        assert_eq!(dispersion_q(&c, 0.5).unwrap(), 0.0);
    }

    #[test]
    fn q_hand_substitution() {
        let c = CountVector::new(vec![2, 0], 2).unwrap();
        assert!((dispersion_q(&c, 0.5).unwrap() - 2.0).abs() < 1e-15);
        assert!(dispersion_q(&c, 1.0).is_err());
    }

    #[test]
    fn q_has_mean_one_under_bernoulli_sampling() {
        let (n, s, p) = (10usize, 20u64, 0.3);
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_1e153);
        let draws = 20_000;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..draws {
            let m: Vec<u64> = (0..n).map(|_| (0..s).filter(|_| rng.gen::<f64>() < p).count() as u64).collect();
            let q = dispersion_q(&CountVector::new(m, s).unwrap(), p).unwrap();
            sum += q;
            sum_sq += q * q;
        }
        let mean = sum / draws as f64;
        let se = ((sum_sq / draws as f64 - mean * mean) / draws as f64).sqrt();
        assert!((mean - 1.0).abs() < 3.0 * se, "mean {mean} se {se}");
    }

    #[test]
    fn bernoulli_regime() {
        let e = expected_d(&TrialMatrix::uniform(4, 3, 0.3).unwrap()).unwrap();
        assert_eq!(e.regime, Regime::Bernoulli);
        assert!((e.d - 1.0).abs() < 1e-12);
        assert!((e.d_formula - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lexis_regime() {
        let t = TrialMatrix::new(vec![vec![0.2; 5], vec![0.8; 5]]).unwrap();
        let e = expected_d(&t).unwrap();
        assert_eq!(e.regime, Regime::Lexis);
        // E(Q) = [10·(0.16) + 25·2·0.09] / (10·0.25) = 6.1 / 2.5
        assert!((e.d - 2.44).abs() < 1e-12);
        assert!((e.d_formula - e.d).abs() < 1e-12);
    }

    #[test]
    fn poisson_regime() {
        let t = TrialMatrix::new(vec![vec![0.1, 0.9]; 3]).unwrap();
        let e = expected_d(&t).unwrap();
        assert_eq!(e.regime, Regime::Poisson);
        // E(Q) = 3·(0.09 + 0.09) / (6·0.25)
        assert!((e.d - 0.36).abs() < 1e-12);
        assert!((e.d_formula - e.d).abs() < 1e-12);
    }

    #[test]
    fn mixed_regime_and_degenerate_mean() {
        let t = TrialMatrix::new(vec![vec![0.1, 0.9], vec![0.5, 0.4]]).unwrap();
        assert_eq!(classify(&t), Regime::Mixed);
        assert!(matches!(expected_d(&TrialMatrix::uniform(2, 2, 0.0).unwrap()), Err(Error::Degenerate(_))));
    }

    #[test]
    fn q_hat_conventions() {
        assert_eq!(empirical_q_hat(&CountVector::new(vec![0, 0, 0], 4).unwrap()).unwrap(), 1.0);
        assert_eq!(empirical_q_hat(&CountVector::new(vec![4, 4], 4).unwrap()).unwrap(), 1.0);
        assert_eq!(empirical_q_hat(&CountVector::new(vec![2, 2, 2], 4).unwrap()).unwrap(), 0.0);
        assert!((empirical_q_hat(&CountVector::new(vec![2, 1], 2).unwrap()).unwrap() - 1.0).abs() < 1e-15);
        assert!(empirical_q_hat(&CountVector::new(vec![2], 4).unwrap()).is_err());
    }

    #[test]
    fn moments_small_case() {
        let m = moments_q_hat(2, 2, 0.5).unwrap();
        assert!((m.variance - 0.75).abs() < 1e-15);
        assert!((m.bound1 - 8.0).abs() < 1e-15);
        assert!(m.bound2.is_none());
        assert!(moments_q_hat(3, 1, 0.5).is_err());
    }

    #[test]
    fn moments_simpler_bound() {
        let m = moments_q_hat(5, 4, 0.3).unwrap();
        assert_eq!(m.bound2, Some(0.5));
        assert!(m.variance < 0.5 && m.variance < m.bound1);
    }

    #[test]
    fn matrix_validation() {
        assert!(TrialMatrix::new(vec![]).is_err());
        assert!(TrialMatrix::new(vec![vec![0.1, 0.2], vec![0.3]]).is_err());
        assert!(TrialMatrix::new(vec![vec![1.2]]).is_err());
        assert!(CountVector::new(vec![5], 4).is_err());
    }
}
