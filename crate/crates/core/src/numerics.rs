//! Shared numeric kernel: log-space binomial masses, the exact tail
//! summation oracle, compensated summation, and exact-or-float scalars.
//!
//! The binomial mass is evaluated in the saddle-point form
//!
//! ```text
//! ln b(k; n, p) = δ(n) − δ(k) − δ(n−k) − D(k, np) − D(n−k, nq)
//!                 − ½ ln(2π k (n−k) / n)
//! ```
//!
//! where `δ(m) = ln m! − (m + ½) ln m + m − ½ ln 2π` is the Stirling-series
//! remainder and `D(x, μ) = x ln(x/μ) + μ − x` is the binomial deviance.
//! Both pieces are small and computed without cancellation, so the result is
//! accurate to a few ulps even when `ln C(n, k)` itself is in the thousands.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{check_open_unit, domain, Error, Result};

/// ½ ln(2π).
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Natural log of a probability. `-inf` encodes probability zero.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct LogProb(f64);

impl LogProb {
    pub const ZERO_PROB: LogProb = LogProb(f64::NEG_INFINITY);
    pub const ONE: LogProb = LogProb(0.0);

    pub fn new(value: f64) -> Result<Self> {
        if value <= 0.0 || value == f64::NEG_INFINITY {
            Ok(LogProb(value))
        } else {
            Err(domain(format!("log-probability must be <= 0, got {value}")))
        }
    }

    /// Clamps tiny positive round-off (a mass of 1 computed as `1 + ε`).
    pub(crate) fn from_clamped(value: f64) -> Self {
        LogProb(value.min(0.0))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn prob(self) -> f64 {
        self.0.exp()
    }
}

// ---------------------------------------------------------------------------
// Gamma family
// ---------------------------------------------------------------------------

/// Lanczos coefficients for g = 7, n = 9 (the Godfrey set).
const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln |Γ(x)|` by the Lanczos approximation, with reflection below ½.
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // Γ(x)Γ(1−x) = π / sin(πx)
        let s = (PI * x).sin().abs();
        return PI.ln() - s.ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS_COEF[0];
    let t = x + LANCZOS_G + 0.5;
    for (i, &c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    LN_SQRT_2PI + (x + 0.5) * t.ln() - t + acc.ln()
}

/// `ln m!`, exact to rounding for m ≤ 20 and Stirling-series based beyond.
pub fn ln_factorial(m: u64) -> f64 {
    if m <= 20 {
        let mut f: u64 = 1;
        for i in 2..=m {
            f *= i;
        }
        (f as f64).ln()
    } else {
        let mf = m as f64;
        stirlerr(m) + (mf + 0.5) * mf.ln() - mf + LN_SQRT_2PI
    }
}

/// Stirling-series remainder `ln m! − (m + ½) ln m + m − ½ ln 2π` for m ≥ 1.
fn stirlerr(m: u64) -> f64 {
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;
    debug_assert!(m >= 1);
    let n = m as f64;
    if m <= 15 {
        return ln_factorial(m) - (n + 0.5) * n.ln() + n - LN_SQRT_2PI;
    }
    let nn = n * n;
    if m > 500 {
        (S0 - S1 / nn) / n
    } else if m > 80 {
        (S0 - (S1 - S2 / nn) / nn) / n
    } else if m > 35 {
        (S0 - (S1 - (S2 - S3 / nn) / nn) / nn) / n
    } else {
        (S0 - (S1 - (S2 - (S3 - S4 / nn) / nn) / nn) / nn) / n
    }
}

/// Deviance `x ln(x/μ) + μ − x`, by series when x ≈ μ.
fn bd0(x: f64, mu: f64) -> f64 {
    if (x - mu).abs() < 0.1 * (x + mu) {
        let v = (x - mu) / (x + mu);
        let mut s = (x - mu) * v;
        let mut ej = 2.0 * x * v;
        let v2 = v * v;
        for j in 1..1000 {
            ej *= v2;
            let s1 = s + ej / f64::from(2 * j + 1);
            if s1 == s {
                return s1;
            }
            s = s1;
        }
        s
    } else {
        x * (x / mu).ln() + mu - x
    }
}

// ---------------------------------------------------------------------------
// Binomial mass and tail
// ---------------------------------------------------------------------------

/// `ln [C(n,k) p^k (1−p)^(n−k)]`.
pub fn log_binom_pmf(n: u64, k: u64, p: f64) -> Result<LogProb> {
    check_open_unit("p", p)?;
    if n == 0 {
        return Err(domain("n must be positive"));
    }
    if k > n {
        return Err(domain(format!("k = {k} outside [0, {n}]")));
    }
    Ok(LogProb::from_clamped(log_binom_pmf_raw(n, k, p)))
}

pub(crate) fn log_binom_pmf_raw(n: u64, k: u64, p: f64) -> f64 {
    let q = 1.0 - p;
    let nf = n as f64;
    if k == 0 {
        return nf * (-p).ln_1p();
    }
    if k == n {
        return nf * p.ln();
    }
    let kf = k as f64;
    let rest = (n - k) as f64;
    let lc = stirlerr(n) - stirlerr(k) - stirlerr(n - k) - bd0(kf, nf * p) - bd0(rest, nf * q);
    let lf = (2.0 * PI).ln() + kf.ln() + (-kf / nf).ln_1p();
    lc - 0.5 * lf
}

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.carry
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// Result of the exact tail summation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailSum {
    pub probability: f64,
    /// Set when `l > n`, where the tail is empty and 0 is returned by convention.
    pub beyond_support: bool,
}

/// `P(S_n > l)` by direct summation of the masses `k = l+1 ..= n`.
///
/// Terms are added smallest first: the mass sequence is unimodal, so the two
/// monotone runs on either side of the mode are merged from their small ends.
pub fn binom_tail_exact(n: u64, l: i64, p: f64) -> Result<TailSum> {
    check_open_unit("p", p)?;
    if n == 0 {
        return Err(domain("n must be positive"));
    }
    if l < 0 {
        return Ok(TailSum { probability: 1.0, beyond_support: false });
    }
    let l = l as u64;
    if l >= n {
        return Ok(TailSum { probability: 0.0, beyond_support: l > n });
    }
    let first = l + 1;
    // mode of the binomial: floor((n+1)p), clipped into the summation range
    let mode = (((n + 1) as f64 * p).floor() as u64).clamp(first, n);
    let term = |k: u64| log_binom_pmf_raw(n, k, p).exp();

    let mut acc = CompensatedSum::new();
    let mut lo = first; // rising run: first..mode
    let mut hi = n; // falling run: mode..=n, walked downward
    let mut lo_term = if lo < mode { Some(term(lo)) } else { None };
    let mut hi_term = Some(term(hi));
    loop {
        match (lo_term, hi_term) {
            (Some(a), Some(b)) if a <= b => {
                acc.add(a);
                lo += 1;
                lo_term = if lo < mode { Some(term(lo)) } else { None };
            }
            (_, Some(b)) => {
                acc.add(b);
                if hi == mode {
                    hi_term = None;
                } else {
                    hi -= 1;
                    hi_term = Some(term(hi));
                }
            }
            (Some(a), None) => {
                acc.add(a);
                lo += 1;
                lo_term = if lo < mode { Some(term(lo)) } else { None };
            }
            (None, None) => break,
        }
    }
    Ok(TailSum { probability: acc.total().clamp(0.0, 1.0), beyond_support: false })
}

/// Exact `C(n, k)` as a big integer.
pub fn binomial_coefficient(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Exact binomial mass in rational arithmetic.
pub fn binom_pmf_rational(n: u64, k: u64, p: &BigRational) -> BigRational {
    let q = BigRational::one() - p;
    let c = BigRational::from_integer(BigInt::from(binomial_coefficient(n, k)));
    c * pow_rational(p, k) * pow_rational(&q, n - k)
}

/// Exact `P(S_n > l)` in rational arithmetic. Intended for n up to a few hundred.
///
/// With `p = a/b` every term shares the denominator `b^n`, so the sum runs
/// over integers `C(n,k) a^k (b−a)^(n−k)`.
pub fn binom_tail_rational(n: u64, l: i64, p: &BigRational) -> BigRational {
    if l < 0 {
        return BigRational::one();
    }
    let l = l as u64;
    if l >= n {
        return BigRational::zero();
    }
    let a = p.numer().clone();
    let fail = p.denom() - &a;
    let mut binom = BigInt::from(binomial_coefficient(n, l + 1));
    let mut a_pow = num_traits::pow::Pow::pow(&a, BigUint::from(l + 1));
    let mut acc = BigInt::zero();
    // fail^(n−k) from the top down, so build the list of powers once
    let mut fail_pows = Vec::with_capacity((n - l) as usize);
    let mut f = BigInt::one();
    for _ in 0..(n - l) {
        fail_pows.push(f.clone());
        f *= &fail;
    }
    for k in (l + 1)..=n {
        acc += &binom * &a_pow * &fail_pows[(n - k) as usize];
        binom = binom * (n - k) / (k + 1);
        a_pow *= &a;
    }
    BigRational::new(acc, num_traits::pow::Pow::pow(p.denom(), BigUint::from(n)))
}

pub(crate) fn pow_rational(x: &BigRational, e: u64) -> BigRational {
    num_traits::pow::Pow::pow(x, BigUint::from(e))
}

/// `ln x` for a big unsigned integer, accurate to f64 rounding of the result.
pub fn ln_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 64 {
        return x.to_f64().unwrap_or(f64::NAN).ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().unwrap_or(f64::NAN);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// `ln(a/b)` for a positive rational, without forming either logarithm separately.
pub fn ln_rational(x: &BigRational) -> f64 {
    assert!(x.is_positive(), "ln of a non-positive rational");
    let num = x.numer().magnitude();
    let den = x.denom().magnitude();
    // scale so the integer quotient carries 64 or 65 significant bits
    let shift = (den.bits() + 64) as i64 - num.bits() as i64;
    let q = if shift >= 0 { (num << shift as u64) / den } else { num / (den << (-shift) as u64) };
    q.to_f64().unwrap_or(f64::NAN).ln() - shift as f64 * std::f64::consts::LN_2
}

// ---------------------------------------------------------------------------
// Exact-or-float scalars
// ---------------------------------------------------------------------------

/// A real argument that stays an exact rational when it was given as one.
#[derive(Debug, Clone, PartialEq)]
pub enum Scalar {
    Exact(BigRational),
    Float(f64),
}

impl Scalar {
    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => rational_to_f64(r),
            Scalar::Float(x) => *x,
        }
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            Scalar::Exact(r) => Some(r),
            Scalar::Float(_) => None,
        }
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Scalar::Exact(BigRational::new(num.into(), den.into()))
    }

    /// `1 − self`, exact when possible.
    pub fn complement(&self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(BigRational::one() - r),
            Scalar::Float(x) => Scalar::Float(1.0 - x),
        }
    }
}

impl From<f64> for Scalar {
    fn from(x: f64) -> Self {
        Scalar::Float(x)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Scalar::Exact(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Scalar::Float(x) => write!(f, "{x}"),
        }
    }
}

/// Correctly rounded conversion of a rational to f64 (to within one ulp).
pub fn rational_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    let sign = if r.is_negative() { -1.0 } else { 1.0 };
    let num = r.numer().magnitude();
    let den = r.denom().magnitude();
    let shift = (den.bits() as i64 + 64) - num.bits() as i64;
    let q = if shift >= 0 { (num << shift as u64) / den } else { (num >> (-shift) as u64) / den };
    let (top, extra) = if q.bits() > 64 {
        let e = q.bits() - 64;
        ((&q >> e).to_f64().unwrap_or(f64::NAN), e as i64)
    } else {
        (q.to_f64().unwrap_or(f64::NAN), 0)
    };
    sign * ldexp(top, extra - shift)
}

/// `x · 2^e` without intermediate overflow or underflow of the power.
pub(crate) fn ldexp(mut x: f64, mut e: i64) -> f64 {
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
    }
    x * 2f64.powi(e as i32)
}

impl FromStr for Scalar {
    type Err = Error;

    /// Accepts `a/b`, decimals, and scientific notation as exact rationals;
    /// anything else `f64` understands falls back to a float.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((a, b)) = s.split_once('/') {
            let num = parse_decimal(a.trim())
                .ok_or_else(|| domain(format!("cannot parse numerator in {s:?}")))?;
            let den = parse_decimal(b.trim())
                .ok_or_else(|| domain(format!("cannot parse denominator in {s:?}")))?;
            if den.is_zero() {
                return Err(domain(format!("zero denominator in {s:?}")));
            }
            return Ok(Scalar::Exact(num / den));
        }
        if let Some(r) = parse_decimal(s) {
            return Ok(Scalar::Exact(r));
        }
        s.parse::<f64>()
            .map(Scalar::Float)
            .map_err(|_| domain(format!("cannot parse number {s:?}")))
    }
}

fn parse_decimal(s: &str) -> Option<BigRational> {
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let all: String = format!("{int_part}{frac_part}");
    let mut value = BigInt::from_str(if all.is_empty() { "0" } else { &all }).ok()?;
    if neg {
        value = -value;
    }
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10u32);
    let r = if scale >= 0 {
        BigRational::from_integer(value * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(value, num_traits::pow(ten, (-scale) as usize))
    };
    Some(r)
}

/// Smallest integer `≥ r`.
pub(crate) fn ceil_rational(r: &BigRational) -> BigInt {
    let (q, rem) = r.numer().div_mod_floor(r.denom());
    if rem.is_zero() {
        q
    } else {
        q + 1
    }
}
