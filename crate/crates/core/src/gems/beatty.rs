//! Beatty spectra `⌊nα⌋`, the complementary pair theorem, the failure of
//! triples, and Wythoff's cold positions.
//!
//! Quadratic irrationals `(a + b√d)/c` are carried exactly so every floor is
//! an integer computation; plain floats are accepted with an explicit
//! ambiguity check.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_integer::{Integer, Roots};
use serde::Serialize;

use crate::error::{domain, Result};

/// `(a + b√d) / c` with `c > 0`, `d ≥ 2` square-free-or-not but not a
/// perfect square, and `gcd(a, b, c) = 1`. `b = 0` encodes a rational.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct QuadIrrational {
    a: i128,
    b: i128,
    d: i128,
    c: i128,
}

impl QuadIrrational {
    pub fn new(a: i128, b: i128, d: i128, c: i128) -> Result<Self> {
        if c == 0 {
            return Err(domain("denominator must be nonzero"));
        }
        if b != 0 {
            if d < 2 {
                return Err(domain(format!("radicand must be at least 2, got {d}")));
            }
            let r = Roots::sqrt(&d);
            if r * r == d {
                return Err(domain(format!("{d} is a perfect square")));
            }
        }
        Ok(Self::normalized(a, b, if b == 0 { 0 } else { d }, c))
    }

    pub fn rational(num: i128, den: i128) -> Result<Self> {
        Self::new(num, 0, 0, den)
    }

    /// `(1 + √5)/2`.
    pub fn golden_ratio() -> Self {
        Self::normalized(1, 1, 5, 2)
    }

    pub fn sqrt(d: i128) -> Result<Self> {
        Self::new(0, 1, d, 1)
    }

    fn normalized(mut a: i128, mut b: i128, d: i128, mut c: i128) -> Self {
        if c < 0 {
            a = -a;
            b = -b;
            c = -c;
        }
        let g = a.gcd(&b).gcd(&c);
        if g > 1 {
            a /= g;
            b /= g;
            c /= g;
        }
        Self { a, b, d: if b == 0 { 0 } else { d }, c }
    }

    pub fn parts(&self) -> (i128, i128, i128, i128) {
        (self.a, self.b, self.d, self.c)
    }

    pub fn is_rational(&self) -> bool {
        self.b == 0
    }

    pub fn to_f64(&self) -> f64 {
        (self.a as f64 + self.b as f64 * (self.d as f64).sqrt()) / self.c as f64
    }

    /// Sign of `x + y√d`, computed without rounding.
    fn sign_of(x: i128, y: i128, d: i128) -> Ordering {
        let sx = x.cmp(&0);
        let sy = y.cmp(&0);
        match (sx, sy) {
            (Ordering::Equal, _) => sy,
            (_, Ordering::Equal) => sx,
            (a, b) if a == b => a,
            _ => {
                // opposite signs: compare x² with y²d
                let lhs = x * x;
                let rhs = y * y * d;
                if sx == Ordering::Greater {
                    lhs.cmp(&rhs)
                } else {
                    rhs.cmp(&lhs)
                }
            }
        }
    }

    pub fn signum(&self) -> Ordering {
        Self::sign_of(self.a, self.b, self.d)
    }

    /// `⌊x + y√d⌋` for integers `x`, `y`.
    fn floor_surd(x: i128, y: i128, d: i128) -> i128 {
        if y == 0 {
            return x;
        }
        let s = Roots::sqrt(&(y * y * d)); // ⌊|y|√d⌋, never exact since d is not square
        if y > 0 {
            x + s
        } else {
            x - s - 1
        }
    }

    pub fn floor(&self) -> i128 {
        Integer::div_floor(&Self::floor_surd(self.a, self.b, self.d), &self.c)
    }

    /// `⌊n·x⌋`.
    pub fn floor_mul(&self, n: i128) -> i128 {
        Integer::div_floor(&Self::floor_surd(n * self.a, n * self.b, self.d), &self.c)
    }

    fn compatible(&self, other: &Self) -> Result<i128> {
        match (self.b, other.b) {
            (0, 0) => Ok(0),
            (0, _) => Ok(other.d),
            (_, 0) => Ok(self.d),
            _ if self.d == other.d => Ok(self.d),
            _ => Err(domain(format!("different radicands {} and {}", self.d, other.d))),
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        let d = self.compatible(other)?;
        Ok(Self::normalized(
            self.a * other.c + other.a * self.c,
            self.b * other.c + other.b * self.c,
            d,
            self.c * other.c,
        ))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        let d = self.compatible(other)?;
        Ok(Self::normalized(
            self.a * other.a + self.b * other.b * d,
            self.a * other.b + self.b * other.a,
            d,
            self.c * other.c,
        ))
    }

    pub fn recip(&self) -> Result<Self> {
        // c/(a + b√d) = c(a − b√d)/(a² − b²d)
        let den = self.a * self.a - self.b * self.b * self.d;
        if den == 0 {
            return Err(domain("division by zero"));
        }
        Ok(Self::normalized(self.c * self.a, -self.c * self.b, self.d, den))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        self.checked_mul(&other.recip()?)
    }

    /// `β = α/(α − 1)`, so that `1/α + 1/β = 1`.
    pub fn beatty_complement(&self) -> Result<Self> {
        let (a, b, d, c) = (self.a, self.b, self.d, self.c);
        let den = (a - c) * (a - c) - b * b * d;
        if den == 0 {
            return Err(domain("alpha = 1 has no complement"));
        }
        Ok(Self::normalized(a * (a - c) - b * b * d, -b * c, d, den))
    }
}

impl Neg for QuadIrrational {
    type Output = Self;
    fn neg(self) -> Self {
        Self::normalized(-self.a, -self.b, self.d, self.c)
    }
}

impl Add for QuadIrrational {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.checked_add(&rhs).expect("mismatched radicands")
    }
}

impl Sub for QuadIrrational {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Mul for QuadIrrational {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.checked_mul(&rhs).expect("mismatched radicands")
    }
}

impl Div for QuadIrrational {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        self.checked_div(&rhs).expect("bad division")
    }
}

impl PartialOrd for QuadIrrational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        let diff = self.checked_add(&(-*other)).ok()?;
        Some(diff.signum())
    }
}

impl fmt::Display for QuadIrrational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b == 0 {
            return if self.c == 1 { write!(f, "{}", self.a) } else { write!(f, "{}/{}", self.a, self.c) };
        }
        let sign = if self.b < 0 { "-" } else { "+" };
        let body = format!("{} {} {}*sqrt({})", self.a, sign, self.b.abs(), self.d);
        if self.c == 1 {
            write!(f, "{body}")
        } else {
            write!(f, "({body})/{}", self.c)
        }
    }
}

/// A real number for spectrum work: exact quadratic or plain float.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum BeattyNumber {
    Exact(QuadIrrational),
    Float(f64),
}

impl BeattyNumber {
    pub fn to_f64(&self) -> f64 {
        match self {
            BeattyNumber::Exact(q) => q.to_f64(),
            BeattyNumber::Float(x) => *x,
        }
    }

    fn exceeds_one(&self) -> bool {
        match self {
            BeattyNumber::Exact(q) => q.checked_add(&QuadIrrational::normalized(-1, 0, 0, 1)).map_or(false, |x| x.signum() == Ordering::Greater),
            BeattyNumber::Float(x) => *x > 1.0,
        }
    }

    pub fn complement(&self) -> Result<BeattyNumber> {
        if !self.exceeds_one() {
            return Err(domain(format!("alpha must exceed 1, got {}", self.to_f64())));
        }
        Ok(match self {
            BeattyNumber::Exact(q) => BeattyNumber::Exact(q.beatty_complement()?),
            BeattyNumber::Float(x) => BeattyNumber::Float(x / (x - 1.0)),
        })
    }
}

/// Floor of a float product closer than this to an integer is ambiguous.
pub const FLOOR_MARGIN: f64 = 1e-9;

/// `⌊nα⌋` for `n = 1, 2, …` up to the horizon.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    pub alpha: f64,
    pub horizon: u64,
    pub values: Vec<u64>,
    /// Indices `n` whose float product fell within [`FLOOR_MARGIN`] of an
    /// integer. Always empty for exact inputs.
    pub ambiguous: Vec<u64>,
}

impl Spectrum {
    pub fn new(alpha: &BeattyNumber, horizon: u64) -> Result<Self> {
        if !alpha.exceeds_one() {
            return Err(domain(format!("alpha must exceed 1, got {}", alpha.to_f64())));
        }
        let mut values = Vec::new();
        let mut ambiguous = Vec::new();
        let mut n = 1u64;
        loop {
            let v = match alpha {
                BeattyNumber::Exact(q) => q.floor_mul(n as i128) as u64,
                BeattyNumber::Float(x) => {
                    let prod = n as f64 * x;
                    if (prod - prod.round()).abs() < FLOOR_MARGIN * prod.max(1.0) {
                        ambiguous.push(n);
                    }
                    prod.floor() as u64
                }
            };
            if v > horizon {
                break;
            }
            values.push(v);
            n += 1;
        }
        Ok(Self { alpha: alpha.to_f64(), horizon, values, ambiguous })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairReport {
    pub alpha: f64,
    pub beta: f64,
    pub horizon: u64,
    pub disjoint: bool,
    pub covers: bool,
    pub first_collision: Option<u64>,
    pub first_gap: Option<u64>,
    /// Some floor was too close to call at float precision.
    pub inconclusive: bool,
}

fn coverage(spectra: &[&Spectrum], horizon: u64) -> Vec<u8> {
    let mut hits = vec![0u8; horizon as usize + 1];
    for s in spectra {
        for &v in &s.values {
            hits[v as usize] = hits[v as usize].saturating_add(1);
        }
    }
    hits
}

/// Generates the spectra of `α` and `α/(α−1)` and checks that they split
/// `{1..horizon}`.
pub fn beatty_pair_check(alpha: &BeattyNumber, horizon: u64) -> Result<PairReport> {
    if horizon == 0 {
        return Err(domain("horizon must be positive"));
    }
    let beta = alpha.complement()?;
    let sa = Spectrum::new(alpha, horizon)?;
    let sb = Spectrum::new(&beta, horizon)?;
    let hits = coverage(&[&sa, &sb], horizon);
    let first_collision = (1..=horizon).find(|&i| hits[i as usize] > 1);
    let first_gap = (1..=horizon).find(|&i| hits[i as usize] == 0);
    Ok(PairReport {
        alpha: alpha.to_f64(),
        beta: beta.to_f64(),
        horizon,
        disjoint: first_collision.is_none(),
        covers: first_gap.is_none(),
        first_collision,
        first_gap,
        inconclusive: !(sa.ambiguous.is_empty() && sb.ambiguous.is_empty()),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessKind {
    Missed,
    DoublyCovered,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TripleReport {
    pub horizon: u64,
    pub witness: Option<u64>,
    pub kind: Option<WitnessKind>,
    pub inconclusive: bool,
}

/// Smallest integer in `1..=horizon` that three spectra fail to cover
/// exactly once.
pub fn triple_spectrum_search(alphas: &[BeattyNumber; 3], horizon: u64) -> Result<TripleReport> {
    for a in alphas {
        if !a.exceeds_one() {
            return Err(domain(format!("every alpha must exceed 1, got {}", a.to_f64())));
        }
    }
    if horizon == 0 {
        return Ok(TripleReport { horizon, witness: None, kind: None, inconclusive: true });
    }
    let spectra: Vec<Spectrum> = alphas.iter().map(|a| Spectrum::new(a, horizon)).collect::<Result<_>>()?;
    let refs: Vec<&Spectrum> = spectra.iter().collect();
    let hits = coverage(&refs, horizon);
    let witness = (1..=horizon).find(|&i| hits[i as usize] != 1);
    let kind = witness.map(|w| if hits[w as usize] == 0 { WitnessKind::Missed } else { WitnessKind::DoublyCovered });
    let ambiguous = spectra.iter().any(|s| {
        let w = witness.unwrap_or(u64::MAX);
        s.ambiguous.iter().any(|&n| (n as f64 * s.alpha) <= w as f64 + 1.0)
    });
    Ok(TripleReport { horizon, witness, kind, inconclusive: witness.is_none() || ambiguous })
}

/// `(0, 0)` followed by the first `count` pairs `(⌊nφ⌋, ⌊nφ²⌋)`.
pub fn wythoff_cold(count: u64) -> Vec<(u64, u64)> {
    let phi = QuadIrrational::golden_ratio();
    let mut out = Vec::with_capacity(count as usize + 1);
    out.push((0, 0));
    for n in 1..=count {
        let x = phi.floor_mul(n as i128) as u64;
        // φ² = φ + 1
        out.push((x, x + n));
    }
    out
}

/// Cold positions `(x, y)` with `x ≤ y ≤ size` of Wythoff's game, by
/// retrograde analysis: a position is cold when no move reaches a cold one.
pub fn wythoff_retrograde(size: usize) -> Vec<(u64, u64)> {
    let n = size + 1;
    let mut cold = vec![vec![false; n]; n];
    for x in 0..n {
        for y in 0..n {
            let mut reaches_cold = false;
            for k in 1..=x {
                reaches_cold |= cold[x - k][y];
            }
            for k in 1..=y {
                reaches_cold |= cold[x][y - k];
            }
            for k in 1..=x.min(y) {
                reaches_cold |= cold[x - k][y - k];
            }
            cold[x][y] = !reaches_cold;
        }
    }
    let mut out = Vec::new();
    for x in 0..n {
        for y in x..n {
            if cold[x][y] {
                out.push((x as u64, y as u64));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exact(q: QuadIrrational) -> BeattyNumber {
        BeattyNumber::Exact(q)
    }

    #[test]
    fn golden_spectrum_start() {
        let s = Spectrum::new(&exact(QuadIrrational::golden_ratio()), 8).unwrap();
        assert_eq!(s.values, vec![1, 3, 4, 6, 8]);
    }

    #[test]
    fn golden_pair_to_hundred() {
        let r = beatty_pair_check(&exact(QuadIrrational::golden_ratio()), 100).unwrap();
        assert!(r.disjoint && r.covers && !r.inconclusive);
        assert!((r.beta - 2.618_033_988_749_895).abs() < 1e-15);
    }

    #[test]
    fn sqrt_two_complement() {
        let a = QuadIrrational::sqrt(2).unwrap();
        assert_eq!(a.beatty_complement().unwrap(), QuadIrrational::new(2, 1, 2, 1).unwrap());
        let r = beatty_pair_check(&exact(a), 10_000).unwrap();
        assert!(r.disjoint && r.covers);
    }

    #[test]
    fn rational_alpha_collides() {
        let r = beatty_pair_check(&exact(QuadIrrational::rational(3, 2).unwrap()), 20).unwrap();
        assert!(!r.disjoint);
        assert_eq!(r.first_collision, Some(3));
        let f = beatty_pair_check(&BeattyNumber::Float(1.5), 20).unwrap();
        assert!(!f.disjoint && f.inconclusive);
    }

    #[test]
    fn float_mode_agrees_on_golden() {
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let r = beatty_pair_check(&BeattyNumber::Float(phi), 1000).unwrap();
        assert!(r.disjoint && r.covers && !r.inconclusive);
    }

    #[test]
    fn exact_floor_matches_float_away_from_integers() {
        let q = QuadIrrational::new(-3, 7, 11, 4).unwrap();
        for n in -200..200 {
            let f = n as f64 * q.to_f64();
            if (f - f.round()).abs() > 1e-6 {
                assert_eq!(q.floor_mul(n), f.floor() as i128, "n = {n}");
            }
        }
    }

    #[test]
    fn field_arithmetic() {
        let phi = QuadIrrational::golden_ratio();
        let one = QuadIrrational::rational(1, 1).unwrap();
        assert_eq!(phi * phi, phi + one);
        assert_eq!(phi.recip().unwrap(), phi - one);
        let s = QuadIrrational::sqrt(3).unwrap();
        assert_eq!((s * s).parts(), (3, 0, 0, 1));
        assert!(phi > one && s < one + one);
        assert_eq!(s.partial_cmp(&phi), None);
    }

    #[test]
    fn invalid_inputs() {
        assert!(QuadIrrational::new(1, 1, 4, 1).is_err());
        assert!(QuadIrrational::new(1, 1, 5, 0).is_err());
        assert!(beatty_pair_check(&BeattyNumber::Float(0.9), 10).is_err());
        assert!(beatty_pair_check(&exact(QuadIrrational::rational(1, 1).unwrap()), 10).is_err());
    }

    #[test]
    fn triple_with_golden_pair() {
        let phi = QuadIrrational::golden_ratio();
        let alphas = [exact(phi), exact(phi * phi), BeattyNumber::Float(7.3)];
        let r = triple_spectrum_search(&alphas, 100).unwrap();
        assert_eq!(r.witness, Some(7));
        assert_eq!(r.kind, Some(WitnessKind::DoublyCovered));
    }

    #[test]
    fn triple_horizon_zero() {
        let phi = QuadIrrational::golden_ratio();
        let r = triple_spectrum_search(&[exact(phi); 3], 0).unwrap();
        assert!(r.inconclusive && r.witness.is_none());
    }

    #[test]
    fn wythoff_first_pairs() {
        let w = wythoff_cold(4);
        assert_eq!(w, vec![(0, 0), (1, 2), (3, 5), (4, 7), (6, 10)]);
    }

    #[test]
    fn wythoff_matches_retrograde() {
        let oracle = wythoff_retrograde(50);
        let formula: Vec<(u64, u64)> = wythoff_cold(40).into_iter().filter(|&(_, y)| y <= 50).collect();
        assert_eq!(oracle, formula);
    }
}
