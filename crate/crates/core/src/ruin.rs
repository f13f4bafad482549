//! Gambler's ruin with unequal stakes.
//!
//! A starts with `a`, B with `b`. Each game A wins with probability `p` and
//! collects B's stake `β`, or loses and pays its own stake `α`. A is ruined
//! once its capital drops below `α`, B once its capital drops below `β`.

use num_complex::Complex64;
use num_integer::Integer;
use serde::Serialize;

use crate::error::{check_open_unit, domain, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RuinGame {
    a: u64,
    b: u64,
    alpha: u64,
    beta: u64,
    p: f64,
}

impl RuinGame {
    pub fn new(a: u64, b: u64, alpha: u64, beta: u64, p: f64) -> Result<Self> {
        check_open_unit("p", p)?;
        if alpha == 0 || beta == 0 {
            return Err(domain("stakes must be positive"));
        }
        if a < alpha || b < beta {
            return Err(domain(format!(
                "each player must cover one stake: a = {a} >= alpha = {alpha}, b = {b} >= beta = {beta}"
            )));
        }
        Ok(Self { a, b, alpha, beta, p })
    }

    pub fn a(&self) -> u64 {
        self.a
    }

    pub fn b(&self) -> u64 {
        self.b
    }

    pub fn alpha(&self) -> u64 {
        self.alpha
    }

    pub fn beta(&self) -> u64 {
        self.beta
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        1.0 - self.p
    }

    /// `pβ − qα`, A's expected gain per game.
    pub fn drift(&self) -> f64 {
        self.p * self.beta as f64 - self.q() * self.alpha as f64
    }

    pub fn is_fair(&self) -> bool {
        self.drift().abs() <= 1e-12
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RuinBounds {
    pub lower: f64,
    pub upper: f64,
}

/// `(b − β + 1)/(a + b − β + 1) ≤ y_a ≤ b/(a + b − α + 1)` for a fair game.
pub fn ruin_bounds_fair(game: &RuinGame) -> Result<RuinBounds> {
    if !game.is_fair() {
        return Err(Error::Precondition(format!(
            "game is not fair (p*beta - q*alpha = {:e}); use the exact chain instead",
            game.drift()
        )));
    }
    let (a, b, al, be) = (game.a as f64, game.b as f64, game.alpha as f64, game.beta as f64);
    Ok(RuinBounds { lower: (b - be + 1.0) / (a + b - be + 1.0), upper: b / (a + b - al + 1.0) })
}

/// Above this many transient states the banded solve is followed by
/// iterative refinement to the caller's tolerance.
const DIRECT_LIMIT: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Absorb {
    A,
    B,
}

/// Probability that A is ruined first.
pub fn ruin_exact_chain(game: &RuinGame, tol: f64) -> Result<f64> {
    absorption(game, Absorb::A, tol)
}

/// Probability that B is ruined first.
pub fn ruin_b_chain(game: &RuinGame, tol: f64) -> Result<f64> {
    absorption(game, Absorb::B, tol)
}

/// Solves `y(x) − p y(x+β) − q y(x−α) = 0` on the transient capitals
/// `α ≤ x ≤ a+b−β`, with `y = 1` on the target absorbing set and 0 on the
/// other.
fn absorption(game: &RuinGame, target: Absorb, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(domain(format!("tol must be positive, got {tol}")));
    }
    let total = game.a + game.b;
    let (al, be) = (game.alpha as usize, game.beta as usize);
    let lo = game.alpha;
    let hi = total - game.beta;
    if lo > hi {
        // no transient state: both players are ruined by any single game
        return Err(domain("stakes exceed the combined capital; no game can be completed"));
    }
    let m = (hi - lo + 1) as usize;
    let (p, q) = (game.p, game.q());
    let a_rhs = if target == Absorb::A { 1.0 } else { 0.0 };
    let b_rhs = 1.0 - a_rhs;

    // row i holds x = lo + i; unknown y(x−α) is column i−α, y(x+β) is i+β
    let mut band = Band::new(m, al, be);
    let mut rhs = vec![0.0; m];
    for i in 0..m {
        band.set(i, i, 1.0);
        if i >= al {
            band.set(i, i - al, -q);
        } else {
            rhs[i] += q * a_rhs;
        }
        if i + be < m {
            band.set(i, i + be, -p);
        } else {
            rhs[i] += p * b_rhs;
        }
    }
    let original = band.clone();
    band.factor()?;
    let mut y = band.solve(&rhs);
    if m as u64 > DIRECT_LIMIT {
        let mut residual = f64::INFINITY;
        for _ in 0..20 {
            let r: Vec<f64> = original.residual(&y, &rhs);
            residual = r.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
            if residual <= tol {
                break;
            }
            let dy = band.solve(&r);
            for (yi, d) in y.iter_mut().zip(dy) {
                *yi += d;
            }
        }
        if residual > tol {
            return Err(Error::NotConverged {
                iterations: 20,
                detail: format!("absorption residual {residual:e} above tol {tol:e}"),
            });
        }
    }
    Ok(y[(game.a - lo) as usize].clamp(0.0, 1.0))
}

/// Banded matrix with `kl` sub- and `ku` super-diagonals, factored in place
/// without pivoting. The ruin system is a diagonally dominant M-matrix, so
/// no pivots are needed and fill stays inside the band.
#[derive(Debug, Clone)]
struct Band {
    n: usize,
    kl: usize,
    ku: usize,
    data: Vec<f64>,
}

impl Band {
    fn new(n: usize, kl: usize, ku: usize) -> Self {
        Self { n, kl, ku, data: vec![0.0; n * (kl + ku + 1)] }
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        i * (self.kl + self.ku + 1) + (j + self.kl - i)
    }

    fn get(&self, i: usize, j: usize) -> f64 {
        if j + self.kl < i || j > i + self.ku {
            0.0
        } else {
            self.data[self.idx(i, j)]
        }
    }

    fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.data[k] = v;
    }

    fn factor(&mut self) -> Result<()> {
        for k in 0..self.n {
            let pivot = self.get(k, k);
            if pivot.abs() < 1e-300 {
                return Err(Error::Numeric(format!("zero pivot at row {k}")));
            }
            let last_row = (k + self.kl).min(self.n - 1);
            let last_col = (k + self.ku).min(self.n - 1);
            for i in k + 1..=last_row {
                let l = self.get(i, k) / pivot;
                if l == 0.0 {
                    continue;
                }
                self.set(i, k, l);
                for j in k + 1..=last_col {
                    let v = self.get(i, j) - l * self.get(k, j);
                    self.set(i, j, v);
                }
            }
        }
        Ok(())
    }

    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let mut y = rhs.to_vec();
        for i in 0..self.n {
            let start = i.saturating_sub(self.kl);
            for j in start..i {
                y[i] -= self.get(i, j) * y[j];
            }
        }
        for i in (0..self.n).rev() {
            let end = (i + self.ku).min(self.n - 1);
            for j in i + 1..=end {
                y[i] -= self.get(i, j) * y[j];
            }
            y[i] /= self.get(i, i);
        }
        y
    }

    /// `rhs − A y` for an unfactored matrix.
    fn residual(&self, y: &[f64], rhs: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                let start = i.saturating_sub(self.kl);
                let end = (i + self.ku).min(self.n - 1);
                rhs[i] - (start..=end).map(|j| self.get(i, j) * y[j]).sum::<f64>()
            })
            .collect()
    }
}

/// The classical equal-stakes answer `((q/p)^a − (q/p)^{a+b}) / (1 − (q/p)^{a+b})`.
pub fn classical_ruin(a: u64, b: u64, p: f64) -> Result<f64> {
    check_open_unit("p", p)?;
    let n = (a + b) as f64;
    if (p - 0.5).abs() < 1e-15 {
        return Ok(b as f64 / n);
    }
    let ln_r = ((1.0 - p) / p).ln();
    // divide through by the dominant power to stay finite
    if ln_r > 0.0 {
        let num = (-(b as f64) * ln_r).exp() - 1.0;
        let den = (-n * ln_r).exp() - 1.0;
        Ok(num / den)
    } else {
        let num = (a as f64 * ln_r).exp_m1() - (n * ln_r).exp_m1();
        let den = -(n * ln_r).exp_m1();
        Ok(num / den)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Root {
    pub re: f64,
    pub im: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootReport {
    pub degree: usize,
    pub roots: Vec<Root>,
    pub max_residual: f64,
}

impl RootReport {
    pub fn complex_roots(&self) -> Vec<Complex64> {
        self.roots.iter().map(|r| Complex64::new(r.re, r.im)).collect()
    }
}

const ROOT_RESIDUAL: f64 = 1e-10;

/// All `α + β` roots of `p z^{α+β} − z^α + q`.
///
/// With `g = gcd(α, β)` the polynomial is one in `w = z^g`. Its root `w = 1`
/// is divided out (twice when the game is fair, where it is double), the
/// rest is solved by simultaneous (Aberth) iteration, and every `g`-th root
/// of those is polished by Newton steps on the original polynomial.
pub fn ruin_root_equation(game: &RuinGame) -> Result<RootReport> {
    let deg = (game.alpha + game.beta) as usize;
    let g = game.alpha.gcd(&game.beta) as usize;
    let reduced_deg = deg / g;
    let mut coeffs = vec![0.0; reduced_deg + 1]; // coeffs[k] multiplies w^k
    coeffs[reduced_deg] = game.p;
    coeffs[game.alpha as usize / g] -= 1.0;
    coeffs[0] += game.q();

    let unit = if game.is_fair() { 2 } else { 1 };
    let mut deflated = coeffs.clone();
    for _ in 0..unit {
        deflated = deflate_unit_root(&deflated);
    }
    let mut full = vec![Complex64::new(0.0, 0.0); deg + 1];
    for (k, &c) in coeffs.iter().enumerate() {
        full[k * g] = Complex64::new(c, 0.0);
    }
    let turn = |j: usize| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / g as f64);
    let mut roots = Vec::with_capacity(deg);
    for _ in 0..unit {
        roots.extend((0..g).map(turn));
    }
    for w in aberth(&deflated)? {
        let base = w.powf(1.0 / g as f64);
        roots.extend((0..g).map(|j| polish(&full, base * turn(j))));
    }
    let mut out = Vec::with_capacity(deg);
    let mut worst: f64 = 0.0;
    for z in roots {
        let res = horner(&full, z).norm();
        worst = worst.max(res);
        out.push(Root { re: z.re, im: z.im, residual: res });
    }
    if worst > ROOT_RESIDUAL {
        return Err(Error::Numeric(format!(
            "root finder residual {worst:e} exceeds {ROOT_RESIDUAL:e}"
        )));
    }
    Ok(RootReport { degree: deg, roots: out, max_residual: worst })
}

/// Synthetic division by `z − 1`, dropping the remainder `P(1)`.
fn deflate_unit_root(coeffs: &[f64]) -> Vec<f64> {
    let deg = coeffs.len() - 1;
    let mut out = vec![0.0; deg];
    let mut carry = 0.0;
    for k in (1..=deg).rev() {
        carry += coeffs[k];
        out[k - 1] = carry;
    }
    out
}

fn horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

fn horner_with_derivative(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let zero = Complex64::new(0.0, 0.0);
    coeffs.iter().rev().fold((zero, zero), |(v, d), &c| (v * z + c, d * z + v))
}

fn aberth(coeffs: &[f64]) -> Result<Vec<Complex64>> {
    let deg = coeffs.len() - 1;
    if deg == 0 {
        return Ok(Vec::new());
    }
    let c: Vec<Complex64> = coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let lead = coeffs[deg].abs();
    // Cauchy bound on root moduli
    let radius = 1.0 + coeffs[..deg].iter().fold(0.0f64, |m, x| m.max(x.abs())) / lead;
    let start = radius.min(2.0);
    let mut z: Vec<Complex64> = (0..deg)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / deg as f64 + 0.4;
            Complex64::from_polar(start, theta)
        })
        .collect();
    for _ in 0..1000 {
        let mut moved: f64 = 0.0;
        for k in 0..deg {
            let (v, d) = horner_with_derivative(&c, z[k]);
            if v.norm() == 0.0 {
                continue;
            }
            let ratio = v / d;
            let repulsion: Complex64 = (0..deg).filter(|&j| j != k).map(|j| (z[k] - z[j]).inv()).sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if step.is_finite() {
                z[k] -= step;
                moved = moved.max(step.norm() / z[k].norm().max(1.0));
            }
        }
        if moved < 1e-15 {
            return Ok(z);
        }
    }
    let worst = z.iter().map(|&r| horner(&c, r).norm()).fold(0.0f64, f64::max);
    if worst <= ROOT_RESIDUAL {
        Ok(z)
    } else {
        Err(Error::NotConverged { iterations: 1000, detail: format!("Aberth residual {worst:e}") })
    }
}

/// Newton steps that are kept only while they shrink the residual.
fn polish(coeffs: &[Complex64], mut z: Complex64) -> Complex64 {
    let mut best = horner(coeffs, z).norm();
    for _ in 0..8 {
        let (v, d) = horner_with_derivative(coeffs, z);
        let next = z - v / d;
        if !next.is_finite() {
            break;
        }
        let r = horner(coeffs, next).norm();
        if r >= best {
            break;
        }
        z = next;
        best = r;
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_classical_game() {
        let g = RuinGame::new(5, 5, 1, 1, 0.5).unwrap();
        let b = ruin_bounds_fair(&g).unwrap();
        assert_eq!((b.lower, b.upper), (0.5, 0.5));
        assert!((ruin_exact_chain(&g, 1e-12).unwrap() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn unfair_game_rejected() {
        let g = RuinGame::new(6, 4, 2, 1, 1.0 / 3.0).unwrap();
        assert!(matches!(ruin_bounds_fair(&g), Err(Error::Precondition(_))));
    }

    #[test]
    fn fair_unequal_stakes_contained() {
        let g = RuinGame::new(6, 4, 2, 1, 2.0 / 3.0).unwrap();
        let b = ruin_bounds_fair(&g).unwrap();
        let y = ruin_exact_chain(&g, 1e-12).unwrap();
        assert!(b.lower <= y && y <= b.upper, "{b:?} {y}");
    }

    #[test]
    fn classical_unequal_p() {
        let g = RuinGame::new(3, 3, 1, 1, 0.6).unwrap();
        let r: f64 = 0.4 / 0.6;
        let want = (r.powi(3) - r.powi(6)) / (1.0 - r.powi(6));
        assert!((ruin_exact_chain(&g, 1e-12).unwrap() - want).abs() < 1e-14);
        assert!((classical_ruin(3, 3, 0.6).unwrap() - want).abs() < 1e-15);
        assert!((classical_ruin(3, 3, 0.4).unwrap() - (1.0 - want)).abs() < 1e-15);
    }

    #[test]
    fn a_and_b_ruin_complement() {
        for &(a, b, al, be, p) in &[(7u64, 9u64, 3u64, 2u64, 0.45), (20, 3, 1, 3, 0.2), (4, 4, 4, 4, 0.5)] {
            let g = RuinGame::new(a, b, al, be, p).unwrap();
            let s = ruin_exact_chain(&g, 1e-12).unwrap() + ruin_b_chain(&g, 1e-12).unwrap();
            assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn large_chain_uses_refinement() {
        let g = RuinGame::new(8000, 7000, 2, 3, 0.6).unwrap();
        let y = ruin_exact_chain(&g, 1e-12).unwrap();
        let z = ruin_b_chain(&g, 1e-12).unwrap();
        assert!((y + z - 1.0).abs() < 1e-9);
    }

    #[test]
    fn quadratic_roots() {
        let g = RuinGame::new(3, 3, 1, 1, 0.6).unwrap();
        let rep = ruin_root_equation(&g).unwrap();
        let mut re: Vec<f64> = rep.roots.iter().map(|r| r.re).collect();
        re.sort_by(f64::total_cmp);
        assert!((re[0] - 0.4 / 0.6).abs() < 1e-12);
        assert!((re[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cubic_roots_and_vieta() {
        let g = RuinGame::new(6, 4, 2, 1, 1.0 / 3.0).unwrap();
        let rep = ruin_root_equation(&g).unwrap();
        assert_eq!(rep.roots.len(), 3);
        assert!(rep.max_residual <= 1e-10);
        let roots = rep.complex_roots();
        let prod: Complex64 = roots.iter().product();
        let sum: Complex64 = roots.iter().sum();
        let p = 1.0 / 3.0;
        assert!((prod - Complex64::new(-(1.0 - p) / p, 0.0)).norm() < 1e-9);
        assert!((sum - Complex64::new(1.0 / p, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn fair_game_has_double_unit_root() {
        let g = RuinGame::new(6, 4, 2, 1, 2.0 / 3.0).unwrap();
        let rep = ruin_root_equation(&g).unwrap();
        let near_one = rep.complex_roots().iter().filter(|z| (**z - 1.0).norm() < 1e-6).count();
        assert_eq!(near_one, 2);
    }

    #[test]
    fn invalid_games() {
        assert!(RuinGame::new(1, 5, 2, 1, 0.5).is_err());
        assert!(RuinGame::new(5, 5, 0, 1, 0.5).is_err());
        assert!(RuinGame::new(5, 5, 1, 1, 1.5).is_err());
    }
}
