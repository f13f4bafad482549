//! Certified brackets for the right binomial tail `P(S_n > l)` by Markov's
//! continued fraction, and Bahadur's hypergeometric representation.
//!
//! For `l > np` the tail factors as `b(l+1; n, p) · S`, where the series
//! factor `S = F(−n+l+1, 1; l+2; −p/q)` has the alternating expansion
//!
//! ```text
//! S = 1 / (1 − c₁ / (1 + d₁ / (1 − c₂ / (1 + d₂ / …))))
//! ```
//!
//! Its truncations `C_k` (ending in `−c_k`) and `D_k` (ending in
//! `−c_k/(1+d_k)`) interleave around `S`:
//!
//! ```text
//! C₂ < D₂ < C₄ < D₄ < … < S < … < D₃ < C₃ < D₁ < C₁
//! ```
//!
//! with `D_{n−l−1} = S`. Convergents are produced by the forward two-step
//! recurrence on numerators and denominators, so refinement never restarts.

use std::ops::{Add, Div, Mul, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{check_open_unit, domain, Error, Result};
use crate::numerics::{log_binom_pmf_raw, LogProb};

/// A right-tail problem `P(S_n > l)` with `np < l < n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailQuery {
    n: u64,
    l: u64,
    p: f64,
}

impl TailQuery {
    pub fn new(n: u64, l: i64, p: f64) -> Result<Self> {
        check_open_unit("p", p)?;
        if n == 0 {
            return Err(domain("n must be positive"));
        }
        if l < 0 || l as u64 >= n {
            return Err(domain(format!("l = {l} must satisfy 0 <= l < n = {n}")));
        }
        if (l as f64) <= n as f64 * p {
            return Err(Error::MethodInapplicable(format!(
                "l = {l} is not greater than np = {}; use left_tail_bracket on the flipped \
                 coin or binom_tail_exact",
                n as f64 * p
            )));
        }
        Ok(Self { n, l: l as u64, p })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn l(&self) -> u64 {
        self.l
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        1.0 - self.p
    }

    /// Index of the last `d` coefficient; `D` at this index equals `S`.
    pub fn terminal_index(&self) -> u64 {
        self.n - self.l - 1
    }

    /// `ln b(l+1; n, p)`, the factored-out lead term.
    pub fn lead_term_log(&self) -> LogProb {
        LogProb::from_clamped(log_binom_pmf_raw(self.n, self.l + 1, self.p))
    }
}

/// The pair `(c_k, d_k)` of the expansion.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CfCoefficients<T = f64> {
    pub k: u64,
    pub c: T,
    pub d: T,
}

fn check_coefficient_index(n: u64, l: u64, k: u64) -> Result<()> {
    if k == 0 || k > n - l {
        return Err(domain(format!("coefficient index k = {k} outside [1, {}]", n - l)));
    }
    Ok(())
}

/// `c_k = (n−k−l)(l+k) / ((l+2k−1)(l+2k)) · p/q`,
/// `d_k = k(n+k) / ((l+2k)(l+2k+1)) · p/q`.
pub fn cf_coefficients(query: &TailQuery, k: u64) -> Result<CfCoefficients> {
    let (n, l) = (query.n, query.l);
    check_coefficient_index(n, l, k)?;
    let ratio = query.p / query.q();
    let (nf, lf, kf) = (n as f64, l as f64, k as f64);
    let c = (n - k - l) as f64 * (lf + kf) / ((lf + 2.0 * kf - 1.0) * (lf + 2.0 * kf)) * ratio;
    let d = kf * (nf + kf) / ((lf + 2.0 * kf) * (lf + 2.0 * kf + 1.0)) * ratio;
    Ok(CfCoefficients { k, c, d })
}

/// The same coefficients in exact rational arithmetic.
pub fn cf_coefficients_rational(
    n: u64,
    l: u64,
    p: &BigRational,
    k: u64,
) -> Result<CfCoefficients<BigRational>> {
    if l >= n {
        return Err(domain("l must be below n"));
    }
    check_coefficient_index(n, l, k)?;
    let int = |x: u64| BigRational::from_integer(BigInt::from(x));
    let ratio = p / (BigRational::one() - p);
    let c = int((n - k - l) * (l + k)) / int((l + 2 * k - 1) * (l + 2 * k)) * &ratio;
    let d = int(k * (n + k)) / int((l + 2 * k) * (l + 2 * k + 1)) * &ratio;
    Ok(CfCoefficients { k, c, d })
}

/// Arithmetic needed by the convergent recurrence.
///
/// Floats renormalize by powers of two when the numerator/denominator pair
/// drifts out of range; rationals never need to.
pub trait CfScalar:
    Clone
    + PartialOrd
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
    /// Returns the binary exponent `e` by which the pair should be scaled
    /// (multiplied by `2^e`), if any.
    fn renormalization(_magnitude: &Self) -> Option<i32> {
        None
    }

    fn scale_pow2(self, _e: i32) -> Self {
        self
    }

    fn magnitude(&self) -> Self {
        if *self < Self::zero() {
            Self::zero() - self.clone()
        } else {
            self.clone()
        }
    }
}

/// Pairs whose magnitude leaves `[2^-498, 2^498]` (about `10^±150`) are
/// brought back by a factor `2^∓498`, which is exact in binary.
const RESCALE_EXP: i32 = 498;

impl CfScalar for f64 {
    fn renormalization(magnitude: &f64) -> Option<i32> {
        let hi = 2f64.powi(RESCALE_EXP);
        let lo = 2f64.powi(-RESCALE_EXP);
        if *magnitude > hi {
            Some(-RESCALE_EXP)
        } else if *magnitude < lo && *magnitude > 0.0 {
            Some(RESCALE_EXP)
        } else {
            None
        }
    }

    fn scale_pow2(self, e: i32) -> f64 {
        self * 2f64.powi(e)
    }
}

impl CfScalar for BigRational {}

/// Two consecutive convergents `Q_{m−1} = A_{m−1}/B_{m−1}` and `Q_m = A_m/B_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergentState<T = f64> {
    m: u64,
    prev: (T, T),
    cur: (T, T),
    /// Net binary exponent applied to all of A and B by renormalization.
    scale_exp: i64,
}

impl<T: CfScalar> Default for ConvergentState<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: CfScalar> ConvergentState<T> {
    /// `A₀ = 0, A₁ = 1, B₀ = B₁ = 1`.
    pub fn new() -> Self {
        Self { m: 1, prev: (T::zero(), T::one()), cur: (T::one(), T::one()), scale_exp: 0 }
    }

    pub fn index(&self) -> u64 {
        self.m
    }

    /// Next coefficient index this state expects.
    pub fn next_k(&self) -> u64 {
        self.m.div_ceil(2)
    }

    pub fn scale_exp(&self) -> i64 {
        self.scale_exp
    }

    pub fn numerator(&self) -> &T {
        &self.cur.0
    }

    pub fn denominator(&self) -> &T {
        &self.cur.1
    }

    /// `Q_m`.
    pub fn current(&self) -> Result<T> {
        ratio(&self.cur)
    }

    /// `Q_{m−1}`.
    pub fn previous(&self) -> Result<T> {
        ratio(&self.prev)
    }

    /// Multiplies every stored numerator and denominator by `factor`.
    pub fn rescale(&mut self, factor: T) {
        for x in [&mut self.prev.0, &mut self.prev.1, &mut self.cur.0, &mut self.cur.1] {
            *x = x.clone() * factor.clone();
        }
    }

    fn renormalize(&mut self) {
        let mags = [&self.prev.0, &self.prev.1, &self.cur.0, &self.cur.1].map(|x| x.magnitude());
        let mut biggest = mags[0].clone();
        for m in &mags[1..] {
            if *m > biggest {
                biggest = m.clone();
            }
        }
        if let Some(e) = T::renormalization(&biggest) {
            for x in [&mut self.prev.0, &mut self.prev.1, &mut self.cur.0, &mut self.cur.1] {
                *x = x.clone().scale_pow2(e);
            }
            self.scale_exp += i64::from(e);
        }
    }
}

fn ratio<T: CfScalar>(pair: &(T, T)) -> Result<T> {
    if pair.1.is_zero() {
        return Err(Error::Numeric("convergent denominator vanished".into()));
    }
    Ok(pair.0.clone() / pair.1.clone())
}

/// Advances two steps:
///
/// ```text
/// X_{2k}   = X_{2k−1} − c_k X_{2k−2}
/// X_{2k+1} = X_{2k}   + d_k X_{2k−1}
/// ```
///
/// Afterwards `previous()` is `C_k` and `current()` is `D_k`.
pub fn advance_convergents<T: CfScalar>(
    mut state: ConvergentState<T>,
    coeffs: &CfCoefficients<T>,
) -> Result<ConvergentState<T>> {
    if coeffs.k != state.next_k() {
        return Err(Error::Precondition(format!(
            "state at index {} expects coefficient k = {}, got {}",
            state.m,
            state.next_k(),
            coeffs.k
        )));
    }
    let (a_prev, b_prev) = state.prev;
    let (a_cur, b_cur) = state.cur;
    let a_even = a_cur.clone() - coeffs.c.clone() * a_prev;
    let b_even = b_cur.clone() - coeffs.c.clone() * b_prev;
    let a_odd = a_even.clone() + coeffs.d.clone() * a_cur;
    let b_odd = b_even.clone() + coeffs.d.clone() * b_cur;
    if b_even.is_zero() || b_odd.is_zero() {
        return Err(Error::Numeric(format!("zero denominator at coefficient k = {}", coeffs.k)));
    }
    state.prev = (a_even, b_even);
    state.cur = (a_odd, b_odd);
    state.m += 2;
    state.renormalize();
    Ok(state)
}

/// Which side of `S` a convergent falls on.
fn is_upper(k: u64) -> bool {
    k % 2 == 1
}

/// A two-sided certified answer for `P(S_n > l)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailBracket {
    pub lower: f64,
    pub upper: f64,
    /// Deepest coefficient index used.
    pub k_used: u64,
    pub lead_term_log: LogProb,
    /// Bounds on the series factor `S` (before the lead term is applied).
    pub series_lower: f64,
    pub series_upper: f64,
    /// Relative width target reached, or the expansion was exhausted.
    pub converged: bool,
    /// The expansion was run to its terminal index, where `D = S`.
    pub exact: bool,
}

/// Relative allowance for floating-point error in the recurrence (a few ulps
/// per step) and in the lead term (a few ulps of its logarithm). Applied
/// outward so the bracket stays certified after rounding.
fn rounding_slack(k: u64, lead_log: f64) -> f64 {
    16.0 * f64::EPSILON * (k as f64 + 8.0) + 8.0 * f64::EPSILON * (lead_log.abs() + 1.0)
}

/// Outward widening, in units of the smallest subnormal.
const SUBNORMAL_ULPS: f64 = 64.0;

/// Brackets `P(S_n > l)` between even- and odd-side convergents.
///
/// Stops when `upper − lower ≤ tol · upper`, at the terminal index, or at
/// `k_max` (in which case `converged` is false).
pub fn bracket_tail(query: &TailQuery, tol: f64, k_max: Option<u64>) -> Result<TailBracket> {
    if !(tol > 0.0) {
        return Err(domain(format!("tol must be positive, got {tol}")));
    }
    let terminal = query.terminal_index();
    let lead = query.lead_term_log();
    // S ≥ 1: every term of the series factor is non-negative
    let mut lower = 1.0f64;
    let mut upper = f64::INFINITY;
    let mut k_used = 0;
    let mut exact = terminal == 0;
    let mut converged = exact;
    if exact {
        upper = 1.0;
    }
    let limit = k_max.unwrap_or(u64::MAX).min(terminal);
    let mut state = ConvergentState::<f64>::new();
    let mut k = 1;
    while !converged && k <= limit {
        let coeffs = cf_coefficients(query, k)?;
        state = advance_convergents(state, &coeffs)?;
        let c_k = state.previous()?;
        let d_k = state.current()?;
        k_used = k;
        if k == terminal {
            lower = d_k;
            upper = d_k;
            exact = true;
            converged = true;
            break;
        }
        for v in [c_k, d_k] {
            if is_upper(k) {
                upper = upper.min(v);
            } else {
                lower = lower.max(v);
            }
        }
        if upper - lower <= tol * upper {
            converged = true;
        }
        k += 1;
    }
    let slack = rounding_slack(k_used, lead.value());
    let series_lower = lower * (1.0 - slack);
    let series_upper = upper * (1.0 + slack);
    let to_prob = |s: f64| (lead.value() + s.ln()).exp();
    // exp loses relative accuracy once the result is subnormal; the absolute
    // widening vanishes into rounding for normal results
    let tiny = SUBNORMAL_ULPS * f64::from_bits(1);
    Ok(TailBracket {
        lower: (to_prob(series_lower) - tiny).clamp(0.0, 1.0),
        upper: (to_prob(series_upper) + tiny).clamp(0.0, 1.0),
        k_used,
        lead_term_log: lead,
        series_lower,
        series_upper,
        converged,
        exact,
    })
}

/// Brackets the left tail `P(S_n < m)` as the right tail `P(F_n > n − m)` of
/// the failure count `F_n ~ Bin(n, q)`.
pub fn left_tail_bracket(n: u64, m: i64, p: f64, tol: f64, k_max: Option<u64>) -> Result<TailBracket> {
    check_open_unit("p", p)?;
    let flipped = TailQuery::new(n, n as i64 - m, 1.0 - p)?;
    bracket_tail(&flipped, tol, k_max)
}

/// Every convergent `(C_k, D_k)` for `k = 1 ..= terminal` in exact arithmetic.
///
/// Runs the recurrence on integers: with `p/q = a/(b − a)`, write
/// `c_k = cn_k/cd_k` and `d_k = dn_k/dd_k`, and scale `X_m` by the product
/// of every coefficient denominator used so far. Then
///
/// ```text
/// I_{2k}   = cd_k I_{2k−1} − cn_k dd_{k−1} I_{2k−2}
/// I_{2k+1} = dd_k I_{2k}   + dn_k cd_k   I_{2k−1}
/// ```
///
/// and no intermediate gcd is needed; only the reported ratios are reduced.
pub fn rational_convergents(
    n: u64,
    l: u64,
    p: &BigRational,
) -> Result<Vec<(BigRational, BigRational)>> {
    if l >= n {
        return Err(domain("l must be below n"));
    }
    if !(*p > BigRational::zero() && *p < BigRational::one()) {
        return Err(domain("p must lie in (0, 1)"));
    }
    let a = p.numer().clone();
    let q_num = p.denom() - &a;
    let big = |x: u64| BigInt::from(x);
    let (mut a_prev, mut b_prev) = (BigInt::zero(), BigInt::one());
    let (mut a_cur, mut b_cur) = (BigInt::one(), BigInt::one());
    let mut dd_last = BigInt::one();
    let mut out = Vec::new();
    for k in 1..n - l {
        let cn = big((n - k - l) * (l + k)) * &a;
        let cd = big((l + 2 * k - 1) * (l + 2 * k)) * &q_num;
        let dn = big(k * (n + k)) * &a;
        let dd = big((l + 2 * k) * (l + 2 * k + 1)) * &q_num;
        let back = &cn * &dd_last;
        let a_even = &cd * &a_cur - &back * &a_prev;
        let b_even = &cd * &b_cur - &back * &b_prev;
        let fwd = &dn * &cd;
        let a_odd = &dd * &a_even + &fwd * &a_cur;
        let b_odd = &dd * &b_even + &fwd * &b_cur;
        if b_even.is_zero() || b_odd.is_zero() {
            return Err(Error::Numeric(format!("zero denominator at coefficient k = {k}")));
        }
        out.push((
            BigRational::new(a_even.clone(), b_even.clone()),
            BigRational::new(a_odd.clone(), b_odd.clone()),
        ));
        (a_prev, b_prev, a_cur, b_cur) = (a_even, b_even, a_odd, b_odd);
        dd_last = dd;
    }
    Ok(out)
}

/// Upper limit on series terms in [`bahadur_tail`].
const BAHADUR_MAX_TERMS: u64 = 10_000_000;

/// `P(S_n ≥ j) = b(j; n, p) · q · F(n+1, 1; j+1; p)`.
///
/// The series is summed relative to its largest term, so neither the tiny
/// lead term nor the possibly huge hypergeometric factor is formed directly.
pub fn bahadur_tail(n: u64, j: u64, p: f64) -> Result<f64> {
    check_open_unit("p", p)?;
    if n == 0 || j == 0 || j > n {
        return Err(domain(format!("j = {j} must lie in [1, n = {n}]")));
    }
    let q = 1.0 - p;
    let (nf, jf) = (n as f64, j as f64);
    // term ratio t_{k+1}/t_k = (n+1+k) p / (j+1+k) drops below 1 after the peak
    let peak = (((nf + 1.0) * p - jf - 1.0) / q).ceil().max(0.0) as u64;
    if peak >= BAHADUR_MAX_TERMS {
        return Err(Error::NotConverged {
            iterations: BAHADUR_MAX_TERMS as usize,
            detail: format!("series terms still increasing at index {peak}"),
        });
    }
    let step = |k: u64| (nf + 1.0 + k as f64) * p / (jf + 1.0 + k as f64);

    // ln t_peak relative to t_0 = 1
    let mut ln_peak = 0.0;
    for k in 0..peak {
        ln_peak += step(k).ln();
    }
    // walk down from the peak in both directions, adding t_k / t_peak
    let mut below = Vec::with_capacity(peak as usize);
    let mut t = 1.0;
    for k in (0..peak).rev() {
        t /= step(k);
        below.push(t);
        if t < 1e-17 {
            break;
        }
    }
    let mut above = Vec::new();
    let mut t = 1.0;
    let mut k = peak;
    loop {
        t *= step(k);
        k += 1;
        if t < 1e-17 || t == 0.0 {
            break;
        }
        above.push(t);
        if k - peak > BAHADUR_MAX_TERMS {
            return Err(Error::NotConverged {
                iterations: BAHADUR_MAX_TERMS as usize,
                detail: "series tail did not fall below 1e-17 relative".into(),
            });
        }
    }
    let mut acc = crate::numerics::CompensatedSum::new();
    for &x in below.iter().rev().chain(above.iter().rev()) {
        acc.add(x);
    }
    acc.add(1.0);
    let ln_f = ln_peak + acc.total().ln();
    let ln_lead = log_binom_pmf_raw(n, j, p);
    Ok((ln_lead + q.ln() + ln_f).exp().min(1.0))
}
