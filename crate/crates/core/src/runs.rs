//! Probability `y_n` of at least `r` consecutive successes in `n` trials,
//! by four independent routes:
//!
//! 1. the difference equation `y_{n+1} = y_n + (1 − y_{n−r}) q p^r`;
//! 2. the closed-form coefficients `z_n = β_{n,r} − p^r β_{n−r,r}` of the
//!    generating function `φ(ξ) = (1 − p^r ξ^r) / (1 − ξ + q p^r ξ^{r+1})`;
//! 3. De Moivre's series `p^r / (1 − q − c q² − … − c^{r−1} q^r)`, `c = p/q`,
//!    summed over its first `n − r + 1` terms;
//! 4. a dynamic program over the length of the trailing success streak.

use std::ops::{Add, Mul};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{check_open_unit, domain, Result};
use crate::numerics::{binomial_coefficient, ln_factorial, pow_rational, CompensatedSum};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RunSpec {
    n: u64,
    r: u64,
    p: f64,
}

impl RunSpec {
    pub fn new(n: u64, r: u64, p: f64) -> Result<Self> {
        check_open_unit("p", p)?;
        if r == 0 || r > n {
            return Err(domain(format!("run length r = {r} must satisfy 1 <= r <= n = {n}")));
        }
        Ok(Self { n, r, p })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn r(&self) -> u64 {
        self.r
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        1.0 - self.p
    }
}

/// Forward iteration of the difference equation, with `y_j = 0` for `j < r`
/// and `y_r = p^r`.
pub fn run_prob_recursive(spec: &RunSpec) -> f64 {
    let (n, r) = (spec.n as usize, spec.r as usize);
    let pr = spec.p.powi(r as i32);
    let step = spec.q() * pr;
    let mut y = vec![0.0; n + 1];
    y[r] = pr;
    for m in r..n {
        y[m + 1] = y[m] + (1.0 - y[m - r]) * step;
    }
    y[n].min(1.0)
}

/// `β_{m,r} = Σ_k (−1)^k C(m − kr, k) x^k` with `x = q p^r`, summed while the
/// binomial is non-zero (`k ≤ m/(r+1)`).
fn beta_coefficient(m: u64, r: u64, x: f64) -> f64 {
    let mut acc = CompensatedSum::new();
    let mut k = 0;
    while k * (r + 1) <= m {
        let top = m - k * r;
        let ln_c = ln_factorial(top) - ln_factorial(k) - ln_factorial(top - k);
        let mag = (ln_c + k as f64 * x.ln()).exp();
        acc.add(if k % 2 == 0 { mag } else { -mag });
        k += 1;
    }
    acc.total()
}

/// `1 − z_n` with `z_n = β_{n,r} − p^r β_{n−r,r}`.
pub fn run_prob_beta(spec: &RunSpec) -> f64 {
    let pr = spec.p.powi(spec.r as i32);
    let x = spec.q() * pr;
    let z = beta_coefficient(spec.n, spec.r, x) - pr * beta_coefficient(spec.n - spec.r, spec.r, x);
    (1.0 - z).clamp(0.0, 1.0)
}

/// [`run_prob_beta`] in exact rational arithmetic.
pub fn run_prob_beta_exact(n: u64, r: u64, p: &BigRational) -> Result<BigRational> {
    check_exact_spec(n, r, p)?;
    let one = BigRational::one();
    let pr = pow_rational(p, r);
    let x = (&one - p) * &pr;
    let beta = |m: u64| {
        let mut acc = BigRational::zero();
        let mut k = 0;
        while k * (r + 1) <= m {
            let c = BigRational::from_integer(BigInt::from(binomial_coefficient(m - k * r, k)));
            let term = c * pow_rational(&x, k);
            if k % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
            k += 1;
        }
        acc
    };
    Ok(&one - (beta(n) - &pr * beta(n - r)))
}

fn check_exact_spec(n: u64, r: u64, p: &BigRational) -> Result<()> {
    if !(*p > BigRational::zero() && *p < BigRational::one()) {
        return Err(domain("p must lie in (0, 1)"));
    }
    if r == 0 || r > n {
        return Err(domain(format!("run length r = {r} must satisfy 1 <= r <= n = {n}")));
    }
    Ok(())
}

/// De Moivre's series in floating point.
///
/// With `1/(1 − Σ_{j=1}^r c^{j−1} x^j) = Σ a_m x^m`, the `m`-th term at
/// `x = q` is `b_m = a_m q^m`, and `c^{j−1} q^j = p^{j−1} q` turns the
/// division recurrence into `b_m = Σ_j p^{j−1} q b_{m−j}`: every term is
/// non-negative, so the partial sum has no cancellation.
pub fn run_prob_demoivre(spec: &RunSpec) -> f64 {
    let r = spec.r as usize;
    let terms = (spec.n - spec.r) as usize + 1;
    let weights: Vec<f64> = (0..r).map(|j| spec.p.powi(j as i32) * spec.q()).collect();
    let b = series_terms(&weights, terms);
    let s: CompensatedSum = b.into_iter().collect();
    (spec.p.powi(r as i32) * s.total()).min(1.0)
}

/// De Moivre's series with exact rational coefficients: the power series of
/// `1/(1 − x − c x² − … − c^{r−1} x^r)` in `x`, evaluated termwise at `x = q`.
pub fn run_prob_demoivre_exact(n: u64, r: u64, p: &BigRational) -> Result<BigRational> {
    check_exact_spec(n, r, p)?;
    let q = BigRational::one() - p;
    let c = p / &q;
    let weights: Vec<BigRational> = (0..r).map(|j| pow_rational(&c, j)).collect();
    let a = series_terms(&weights, (n - r) as usize + 1);
    let mut sum = BigRational::zero();
    let mut q_pow = BigRational::one();
    for coeff in a {
        sum += coeff * &q_pow;
        q_pow *= &q;
    }
    Ok(pow_rational(p, r) * sum)
}

/// Coefficients of `1 / (1 − Σ_{j=1}^{len} w_{j−1} x^j)` up to `x^{count−1}`.
fn series_terms<T>(weights: &[T], count: usize) -> Vec<T>
where
    T: Clone + Zero + One + Add<Output = T> + Mul<Output = T>,
{
    let mut out: Vec<T> = Vec::with_capacity(count);
    for m in 0..count {
        if m == 0 {
            out.push(T::one());
            continue;
        }
        let mut acc = T::zero();
        for (j, w) in weights.iter().enumerate().take(m) {
            acc = acc + w.clone() * out[m - 1 - j].clone();
        }
        out.push(acc);
    }
    out
}

/// Dynamic program over the trailing streak length `0..r`, with `r` absorbing.
pub fn run_prob_oracle(spec: &RunSpec) -> f64 {
    let r = spec.r as usize;
    let (p, q) = (spec.p, spec.q());
    let mut state = vec![0.0; r + 1];
    state[0] = 1.0;
    for _ in 0..spec.n {
        let mut next = vec![0.0; r + 1];
        next[r] = state[r];
        for (len, &mass) in state.iter().enumerate().take(r) {
            next[0] += mass * q;
            next[len + 1] += mass * p;
        }
        state = next;
    }
    state[r]
}

/// [`run_prob_oracle`] in exact rational arithmetic.
pub fn run_prob_oracle_exact(n: u64, r: u64, p: &BigRational) -> Result<BigRational> {
    check_exact_spec(n, r, p)?;
    let r = r as usize;
    let q = BigRational::one() - p;
    let mut state = vec![BigRational::zero(); r + 1];
    state[0] = BigRational::one();
    for _ in 0..n {
        let mut next = vec![BigRational::zero(); r + 1];
        next[r] = state[r].clone();
        for (len, mass) in state.iter().enumerate().take(r) {
            next[0] += mass * &q;
            next[len + 1] += mass * p;
        }
        state = next;
    }
    Ok(state.swap_remove(r))
}

/// The first `count` power-series coefficients of `φ(ξ)` by long division.
pub fn generating_function_coefficients(r: u64, p: f64, count: usize) -> Result<Vec<f64>> {
    check_open_unit("p", p)?;
    if r == 0 {
        return Err(domain("run length must be positive"));
    }
    let r = r as usize;
    let pr = p.powi(r as i32);
    // numerator 1 − p^r ξ^r, denominator 1 − ξ + q p^r ξ^{r+1}
    let mut num = vec![0.0; count.max(r + 1)];
    num[0] = 1.0;
    num[r] -= pr;
    let mut den = vec![0.0; r + 2];
    den[0] = 1.0;
    den[1] -= 1.0;
    den[r + 1] += (1.0 - p) * pr;
    let mut out = vec![0.0; count];
    for m in 0..count {
        let mut acc = num[m];
        for j in 1..den.len().min(m + 1) {
            acc -= den[j] * out[m - j];
        }
        out[m] = acc / den[0];
    }
    Ok(out)
}

/// All four routes side by side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RunReport {
    pub recursive: f64,
    pub beta: f64,
    pub demoivre: f64,
    pub oracle: f64,
}

pub fn run_report(spec: &RunSpec) -> RunReport {
    RunReport {
        recursive: run_prob_recursive(spec),
        beta: run_prob_beta(spec),
        demoivre: run_prob_demoivre(spec),
        oracle: run_prob_oracle(spec),
    }
}
