//! Acceptance criteria. Each test prints one `criterion N: PASS|FAIL` line.
//! Run with `cargo test --test acceptance -- --nocapture --test-threads 1`
//! to see the lines in order.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use probgems::binom_tail::{bahadur_tail, bracket_tail, rational_convergents, TailQuery};
use probgems::concentration::{bernstein_bound, monte_carlo_tail, BernsteinInput, MonteCarloConfig, Summand};
use probgems::gems::beatty::{beatty_pair_check, triple_spectrum_search, BeattyNumber, QuadIrrational};
use probgems::gems::partitions::{partition_dp, partition_table, partition_uspensky, relative_error};
use probgems::gems::shuffle::{perfect_in_shuffle, shuffle_order, Deck};
use probgems::lexis::{empirical_q_hat, moments_q_hat, CountVector};
use probgems::lln_bounds::{bernoulli_n_bound, cantelli_n, upper_deviation_probability, LlnQuery};
use probgems::numerics::{binom_pmf_rational, binom_tail_exact, binom_tail_rational, CompensatedSum, Scalar};
use probgems::ruin::{classical_ruin, ruin_bounds_fair, ruin_exact_chain, RuinGame};
use probgems::runs::{
    run_prob_beta, run_prob_demoivre, run_prob_oracle, run_prob_oracle_exact, run_prob_recursive, RunSpec,
};

fn report(n: u32, failures: &[String], summary: String) {
    if failures.is_empty() {
        println!("criterion {n}: PASS ({summary})");
    } else {
        println!("criterion {n}: FAIL ({summary}); {}", failures.join("; "));
        panic!("criterion {n} failed: {}", failures.join("; "));
    }
}

fn round5(x: f64) -> f64 {
    (x * 1e5).round() / 1e5
}

fn rat(a: i64, b: i64) -> BigRational {
    BigRational::new(a.into(), b.into())
}

/// `x < y` by cross-multiplication (denominators are positive).
fn lt(x: &BigRational, y: &BigRational) -> bool {
    x.numer() * y.denom() < y.numer() * x.denom()
}

#[test]
fn criterion_01_flagship_bracket() {
    let start = Instant::now();
    let query = TailQuery::new(9000, 3090, 1.0 / 3.0).unwrap();
    let exact = binom_tail_exact(9000, 3090, 1.0 / 3.0).unwrap().probability;
    let bracket = bracket_tail(&query, 1e-12, Some(6)).unwrap();
    let elapsed = start.elapsed();
    let mut failures = Vec::new();
    if round5(exact) != 0.02170 {
        failures.push(format!("exact tail {exact:.7} does not round to 0.02170"));
    }
    if !(bracket.lower <= exact && exact <= bracket.upper) {
        failures.push(format!("bracket [{}, {}] misses exact {exact}", bracket.lower, bracket.upper));
    }
    if round5(bracket.lower) != 0.02161 || round5(bracket.upper) != 0.02175 {
        let depths: Vec<String> = (1..=8)
            .map(|k| {
                let b = bracket_tail(&query, 1e-12, Some(k)).unwrap();
                format!("k={k}: [{:.5}, {:.5}]", b.lower, b.upper)
            })
            .collect();
        failures.push(format!(
            "bracket at depth 6 is [{:.5}, {:.5}], expected [0.02161, 0.02175]; exact convergents give {}",
            bracket.lower,
            bracket.upper,
            depths.join(", ")
        ));
    }
    if elapsed >= Duration::from_secs(1) {
        failures.push(format!("runtime {elapsed:?} >= 1 s"));
    }
    report(1, &failures, format!("exact {exact:.5}, {elapsed:?}"));
}

/// Checks `C_2 < D_2 < C_4 < … < S < … < D_3 < C_3 < D_1 < C_1`, where the
/// final convergent `D_{n−l−1}` equals `S`.
fn ping_pong_violations(n: u64, l: u64, p: &BigRational) -> Vec<String> {
    let conv = rational_convergents(n, l, p).unwrap();
    let s = binom_tail_rational(n, l as i64, p) / binom_pmf_rational(n, l + 1, p);
    let mut out = Vec::new();
    let last = conv.len();
    let mut low: Vec<&BigRational> = Vec::new();
    let mut high: Vec<&BigRational> = Vec::new();
    for (i, (c, d)) in conv.iter().enumerate() {
        let k = i + 1;
        let side = if k % 2 == 0 { &mut low } else { &mut high };
        side.push(c);
        if k < last {
            side.push(d);
        } else if *d != s {
            out.push(format!("n={n} l={l} p={p}: terminal D_{k} != S"));
        }
    }
    for w in low.windows(2) {
        if !lt(w[0], w[1]) {
            out.push(format!("n={n} l={l} p={p}: lower side not increasing"));
        }
    }
    for w in high.windows(2) {
        if !lt(w[1], w[0]) {
            out.push(format!("n={n} l={l} p={p}: upper side not decreasing"));
        }
    }
    if let Some(x) = low.last() {
        if !lt(x, &s) {
            out.push(format!("n={n} l={l} p={p}: lower side reaches S"));
        }
    }
    if let Some(x) = high.last() {
        if !lt(&s, x) {
            out.push(format!("n={n} l={l} p={p}: upper side reaches S"));
        }
    }
    out
}

#[test]
fn criterion_02_ping_pong_suite() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x9196_9096);
    let mut failures = Vec::new();
    let mut queries = 0;
    let mut comparisons = 0usize;
    while queries < 1000 {
        let n: u64 = rng.gen_range(2..=500);
        let den: i64 = rng.gen_range(2..=40);
        let num: i64 = rng.gen_range(1..den);
        let p = rat(num, den);
        // l > np strictly, l < n
        let lo = (n as i64 * num).div_euclid(den) as u64 + 1;
        if lo >= n {
            continue;
        }
        let l = rng.gen_range(lo..n);
        assert!(TailQuery::new(n, l as i64, num as f64 / den as f64).is_ok());
        failures.extend(ping_pong_violations(n, l, &p));
        comparisons += 2 * (n - l) as usize;
        queries += 1;
    }
    let elapsed = start.elapsed();
    if elapsed >= Duration::from_secs(30) {
        failures.push(format!("runtime {elapsed:?} >= 30 s"));
    }
    report(2, &failures, format!("{queries} queries, ~{comparisons} convergents, {elapsed:?}"));
}

#[test]
fn criterion_03_bahadur_cross_representation() {
    let ns = [10u64, 50, 100, 300, 700, 1000, 1500, 2000];
    let ps = [0.1, 0.25, 1.0 / 3.0, 0.5, 0.9];
    let zs = [-2.0, 0.0, 1.0, 3.0, 6.0];
    let mut failures = Vec::new();
    let mut points = 0;
    let mut worst: f64 = 0.0;
    for &n in &ns {
        for &p in &ps {
            for &z in &zs {
                let sd = (n as f64 * p * (1.0 - p)).sqrt();
                let j = ((n as f64 * p + z * sd).round() as i64).clamp(1, n as i64) as u64;
                let b = bahadur_tail(n, j, p).unwrap();
                let e = binom_tail_exact(n, j as i64 - 1, p).unwrap().probability;
                let rel = ((b - e) / e).abs();
                worst = worst.max(rel);
                if !(rel <= 1e-11) {
                    failures.push(format!("n={n} j={j} p={p}: bahadur {b:e} vs exact {e:e} (rel {rel:e})"));
                }
                points += 1;
            }
        }
    }
    report(3, &failures, format!("{points} points, worst relative error {worst:e}"));
}

const TABLE_ONE: [(u64, u64); 26] = [
    (2, 2),
    (4, 4),
    (6, 3),
    (8, 6),
    (10, 10),
    (12, 12),
    (14, 4),
    (16, 8),
    (18, 18),
    (20, 6),
    (22, 11),
    (24, 20),
    (26, 18),
    (28, 28),
    (30, 5),
    (32, 10),
    (34, 12),
    (36, 36),
    (38, 12),
    (40, 20),
    (42, 14),
    (44, 12),
    (46, 23),
    (48, 21),
    (50, 8),
    (52, 52),
];

#[test]
fn criterion_04_shuffle_table() {
    let start = Instant::now();
    let mut failures = Vec::new();
    for &(two_n, r) in &TABLE_ONE {
        let got = shuffle_order(two_n).unwrap();
        if got != r {
            failures.push(format!("2n={two_n}: order {got}, table says {r}"));
        }
        let mut deck = Deck::new(two_n as usize).unwrap();
        for _ in 0..r {
            deck = perfect_in_shuffle(&deck);
        }
        if !deck.is_identity() {
            failures.push(format!("2n={two_n}: {r} shuffles do not restore the deck"));
        }
    }
    let elapsed = start.elapsed();
    if elapsed >= Duration::from_secs(1) {
        failures.push(format!("runtime {elapsed:?} >= 1 s"));
    }
    report(4, &failures, format!("26 entries, {elapsed:?}"));
}

#[test]
fn criterion_05_runs_four_way() {
    let ps = [(1i64, 10i64), (3, 10), (1, 2), (2, 3), (9, 10)];
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    for &(a, b) in &ps {
        let p = a as f64 / b as f64;
        for n in 1..=30u64 {
            for r in 1..=n {
                let spec = RunSpec::new(n, r, p).unwrap();
                let vals = [run_prob_recursive(&spec), run_prob_beta(&spec), run_prob_demoivre(&spec), run_prob_oracle(&spec)];
                let spread = vals.iter().cloned().fold(f64::MIN, f64::max) - vals.iter().cloned().fold(f64::MAX, f64::min);
                worst = worst.max(spread);
                if !(spread <= 1e-10) {
                    failures.push(format!("n={n} r={r} p={p}: {vals:?}"));
                }
            }
        }
    }
    // dp against full enumeration, exactly, for n ≤ 20
    for n in 1..=20u32 {
        // longest-run histogram indexed by [longest run][heads]
        let mut hist = vec![vec![0u64; n as usize + 1]; n as usize + 1];
        for bits in 0u32..(1 << n) {
            let (mut cur, mut best) = (0u32, 0u32);
            for i in 0..n {
                cur = if bits >> i & 1 == 1 { cur + 1 } else { 0 };
                best = best.max(cur);
            }
            hist[best as usize][bits.count_ones() as usize] += 1;
        }
        for &(a, b) in &ps {
            let p = rat(a, b);
            let q = BigRational::one() - &p;
            let pows_p: Vec<BigRational> = (0..=n).map(|h| num_traits::pow(p.clone(), h as usize)).collect();
            let pows_q: Vec<BigRational> = (0..=n).map(|h| num_traits::pow(q.clone(), h as usize)).collect();
            for r in 1..=n {
                let mut want = BigRational::zero();
                for row in hist.iter().skip(r as usize) {
                    for (h, &count) in row.iter().enumerate() {
                        if count > 0 {
                            want += BigRational::from_integer(BigInt::from(count)) * &pows_p[h] * &pows_q[n as usize - h];
                        }
                    }
                }
                let got = run_prob_oracle_exact(n as u64, r as u64, &p).unwrap();
                if got != want {
                    failures.push(format!("n={n} r={r} p={p}: dp differs from enumeration"));
                }
            }
        }
    }
    report(5, &failures, format!("worst spread {worst:e}; dp exact for n <= 20"));
}

#[test]
fn criterion_06_lexis_exactness() {
    let mut failures = Vec::new();
    let mut configs = 0;
    let mut worst: f64 = 0.0;
    for n in 2..=20u32 {
        for s in 1..=20u32 {
            let big_n = n * s;
            if big_n > 20 || big_n <= 3 {
                continue;
            }
            // multiplicity of each per-series count vector over all 2^N outcomes
            let mask = (1u32 << s) - 1;
            let mut mult: HashMap<Vec<u64>, u64> = HashMap::new();
            for bits in 0u32..(1 << big_n) {
                let counts: Vec<u64> = (0..n).map(|i| u64::from((bits >> (i * s) & mask).count_ones())).collect();
                *mult.entry(counts).or_insert(0) += 1;
            }
            for &p in &[0.3f64, 0.5, 0.8] {
                let weighted: Vec<(f64, f64)> = mult
                    .iter()
                    .map(|(counts, &m)| {
                        let successes: u64 = counts.iter().sum();
                        let w = m as f64 * p.powi(successes as i32) * (1.0 - p).powi((big_n as u64 - successes) as i32);
                        let qh = empirical_q_hat(&CountVector::new(counts.clone(), s as u64).unwrap()).unwrap();
                        (w, qh)
                    })
                    .collect();
                let mean = weighted.iter().map(|&(w, qh)| w * qh).collect::<CompensatedSum>().total();
                let var = weighted.iter().map(|&(w, qh)| w * (qh - mean) * (qh - mean)).collect::<CompensatedSum>().total();
                let m = moments_q_hat(n as u64, s as u64, p).unwrap();
                let err = (mean - 1.0).abs().max((var - m.variance).abs());
                worst = worst.max(err);
                if !(err <= 1e-12) {
                    failures.push(format!("n={n} s={s} p={p}: E={mean} Var={var} vs {}", m.variance));
                }
                if s == 1 {
                    // one trial per series: Q̂ is identically 1 and both sides of the bound vanish
                    if m.bound1 != 0.0 || var > 1e-12 {
                        failures.push(format!("n={n} s=1 p={p}: expected a degenerate Q-hat, Var={var}"));
                    }
                    continue;
                }
                if !(var < m.bound1) {
                    failures.push(format!("n={n} s={s} p={p}: Var {var} not below {}", m.bound1));
                }
                if let Some(b2) = m.bound2 {
                    if !(var < b2) {
                        failures.push(format!("n={n} s={s} p={p}: Var {var} not below 2/(n-1) = {b2}"));
                    }
                }
            }
            configs += 1;
        }
    }
    report(6, &failures, format!("{configs} (n, s) layouts x 3 p, worst error {worst:e}"));
}

#[test]
fn criterion_07_ruin_containment() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7275_696e);
    let mut failures = Vec::new();
    let mut games = 0;
    for alpha in 1..=5u64 {
        for beta in 1..=5u64 {
            if alpha == beta {
                continue;
            }
            let p = alpha as f64 / (alpha + beta) as f64;
            for _ in 0..3 {
                let a = rng.gen_range(alpha..=150);
                let b = rng.gen_range(beta..=(200 - a).max(beta));
                let game = RuinGame::new(a, b, alpha, beta, p).unwrap();
                let bounds = ruin_bounds_fair(&game).unwrap();
                let y = ruin_exact_chain(&game, 1e-12).unwrap();
                if !(bounds.lower <= y && y <= bounds.upper) {
                    failures.push(format!("{game:?}: {y} outside [{}, {}]", bounds.lower, bounds.upper));
                }
                games += 1;
            }
        }
    }
    let mut worst: f64 = 0.0;
    for &p in &[0.3, 0.45, 0.5, 0.55, 0.7] {
        for &(a, b) in &[(1u64, 1u64), (3, 3), (10, 5), (50, 150), (120, 80)] {
            let game = RuinGame::new(a, b, 1, 1, p).unwrap();
            let err = (ruin_exact_chain(&game, 1e-12).unwrap() - classical_ruin(a, b, p).unwrap()).abs();
            worst = worst.max(err);
            if !(err <= 1e-12) {
                failures.push(format!("a={a} b={b} p={p}: chain differs from closed form by {err:e}"));
            }
        }
    }
    report(7, &failures, format!("{games} fair unequal-stakes games; classical worst {worst:e}"));
}

#[test]
fn criterion_08_lln_validity() {
    let mut failures = Vec::new();
    let mut cases = 0;
    let ps = [(1, 10), (1, 4), (1, 3), (1, 2), (2, 3), (4, 5)];
    let epss = [(1, 20), (1, 10), (1, 5)];
    let etas = [(1, 100), (1, 20), (1, 10)];
    for &p in &ps {
        for &e in &epss {
            for &h in &etas {
                let Ok(query) = LlnQuery::new(
                    Scalar::from_ratio(p.0, p.1),
                    Scalar::from_ratio(e.0, e.1),
                    Scalar::from_ratio(h.0, h.1),
                ) else {
                    continue;
                };
                let bound = bernoulli_n_bound(&query);
                if bound.n > 100_000 {
                    continue;
                }
                let tail = upper_deviation_probability(&query, bound.n).unwrap();
                let eta = h.0 as f64 / h.1 as f64;
                if !(tail < eta) {
                    failures.push(format!("p={p:?} eps={e:?} eta={h:?}: tail {tail} at N={} not below eta", bound.n));
                }
                cases += 1;
            }
        }
    }
    for &eps in &[0.01f64, 0.05, 0.1, 0.2, 0.3, 0.5, 0.9] {
        for &eta in &[0.001f64, 0.01, 0.05, 0.1, 0.5] {
            let e2 = eps * eps;
            let direct = 2.0 / e2 * (4.0 / (e2 * eta)).ln() + 2.0;
            // smallest integer strictly greater than the bound
            let want = if direct.fract() == 0.0 { direct as u64 + 1 } else { direct.ceil() as u64 };
            let got = cantelli_n(eps, eta).unwrap();
            if got != want {
                failures.push(format!("cantelli eps={eps} eta={eta}: {got} vs {want}"));
            }
        }
    }
    report(8, &failures, format!("{cases} grid points with N <= 1e5; 35 Cantelli values"));
}

#[test]
fn criterion_09_bernstein_validity() {
    let mut failures = Vec::new();
    let mut runs = Vec::new();
    let mut plan: Vec<(Summand, usize, f64)> = Vec::new();
    for &n in &[10usize, 100] {
        for &z in &[1.0, 2.5, 4.0] {
            plan.push((Summand::Uniform { m: 1.0 }, n, z));
            plan.push((Summand::Rademacher { m: 1.0 }, n, z));
        }
    }
    plan.push((Summand::Uniform { m: 1.0 }, 1000, 2.5));
    for (i, (summand, n, z)) in plan.into_iter().enumerate() {
        let t = z * (n as f64 * summand.variance()).sqrt();
        let cfg = MonteCarloConfig::new(summand, n, t, 0xbe75 + i as u64);
        let mc = monte_carlo_tail(&cfg).unwrap();
        let direct = bernstein_bound(&BernsteinInput::bounded(n as f64 * summand.variance(), summand.bound(), t).unwrap());
        assert_eq!(mc.bound, direct);
        if !(mc.estimate - 3.0 * mc.std_error <= mc.bound) {
            failures.push(format!("{summand:?} n={n} t={t}: tail {} +- {} above bound {}", mc.estimate, mc.std_error, mc.bound));
        }
        runs.push(format!("n={n} t={t:.2}: {:.5} <= {:.5}", mc.estimate, mc.bound));
    }
    report(9, &failures, format!("{} runs of 1e6 samples", runs.len()));
}

#[test]
fn criterion_10_partitions() {
    let mut failures = Vec::new();
    let pent = partition_table(500);
    let dp = partition_dp(500);
    if pent != dp {
        let first = (0..=500).find(|&i| pent[i] != dp[i]).unwrap();
        failures.push(format!("pentagonal and DP differ first at n={first}"));
    }
    let mut worst_ratio: f64 = 0.0;
    for n in 10..=500u64 {
        let est = partition_uspensky(n).unwrap();
        let exact = &pent[n as usize];
        let (es, er) = (relative_error(est.ln_simple, exact), relative_error(est.ln_refined, exact));
        if !(er < es) {
            failures.push(format!("n={n}: refined error {er:e} not below simple {es:e}"));
        }
        if n >= 100 {
            worst_ratio = worst_ratio.max(er);
            if !(er < 0.01) {
                failures.push(format!("n={n}: refined/exact off by {er:e}"));
            }
        }
    }
    report(10, &failures, format!("p(500) = {}, worst refined error for n >= 100: {worst_ratio:e}", pent[500]));
}

fn random_quadratic(rng: &mut ChaCha8Rng) -> QuadIrrational {
    const NON_SQUARES: [i128; 12] = [2, 3, 5, 6, 7, 10, 11, 13, 17, 19, 23, 29];
    loop {
        let d = NON_SQUARES[rng.gen_range(0..NON_SQUARES.len())];
        let a = rng.gen_range(-20..=20);
        let b = rng.gen_range(1..=6) * if rng.gen::<bool>() { 1 } else { -1 };
        let c = rng.gen_range(1..=12);
        let x = QuadIrrational::new(a, b, d, c).unwrap();
        let v = x.to_f64();
        if v > 1.0 && v < 40.0 {
            return x;
        }
    }
}

/// Three quadratic irrationals in one field with `Σ 1/α_i = 1`.
fn random_unit_triple(rng: &mut ChaCha8Rng) -> [QuadIrrational; 3] {
    const NON_SQUARES: [i128; 6] = [2, 3, 5, 7, 11, 13];
    let one = QuadIrrational::rational(1, 1).unwrap();
    loop {
        let d = NON_SQUARES[rng.gen_range(0..NON_SQUARES.len())];
        let mut pick = || {
            let b = rng.gen_range(1..=4) * if rng.gen::<bool>() { 1 } else { -1 };
            QuadIrrational::new(rng.gen_range(-10..=10), b, d, rng.gen_range(2..=30)).unwrap()
        };
        let (x, y) = (pick(), pick());
        let z = one - x - y;
        let inside = |w: &QuadIrrational| w.to_f64() > 0.02 && w.to_f64() < 0.98;
        if inside(&x) && inside(&y) && inside(&z) && !z.is_rational() {
            return [x.recip().unwrap(), y.recip().unwrap(), z.recip().unwrap()];
        }
    }
}

#[test]
fn criterion_11_beatty() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xbea7);
    let mut failures = Vec::new();
    for _ in 0..50 {
        let alpha = random_quadratic(&mut rng);
        let r = beatty_pair_check(&BeattyNumber::Exact(alpha), 100_000).unwrap();
        if !(r.disjoint && r.covers) || r.inconclusive {
            failures.push(format!("alpha = {alpha}: {r:?}"));
        }
    }
    let mut triples: Vec<[BeattyNumber; 3]> = Vec::new();
    for _ in 0..40 {
        triples.push(random_unit_triple(&mut rng).map(BeattyNumber::Exact));
    }
    let phi = QuadIrrational::golden_ratio();
    for _ in 0..10 {
        triples.push([BeattyNumber::Exact(phi), BeattyNumber::Exact(phi * phi), BeattyNumber::Exact(random_quadratic(&mut rng))]);
    }
    let mut deepest = 0;
    for t in &triples {
        let r = triple_spectrum_search(t, 10_000).unwrap();
        match r.witness {
            Some(w) if !r.inconclusive => deepest = deepest.max(w),
            _ => failures.push(format!("no witness for {t:?}: {r:?}")),
        }
    }
    report(11, &failures, format!("50 pairs to 1e5; {} triples, largest witness {deepest}", triples.len()));
}
