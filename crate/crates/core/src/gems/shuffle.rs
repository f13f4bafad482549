//! Perfect in-shuffles and the Monge (over-under) shuffle.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;
use serde::Serialize;

use crate::error::{domain, Result};

/// A deck of `2n` cards labelled `1..=2n`, listed top-down.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Deck {
    order: Vec<u32>,
}

impl Deck {
    pub fn new(size: usize) -> Result<Self> {
        check_size(size)?;
        Ok(Self { order: (1..=size as u32).collect() })
    }

    pub fn from_order(order: Vec<u32>) -> Result<Self> {
        check_size(order.len())?;
        let mut seen = vec![false; order.len() + 1];
        for &c in &order {
            let c = c as usize;
            if c == 0 || c > order.len() || seen[c] {
                return Err(domain(format!("{order:?} is not a permutation of 1..={}", order.len())));
            }
            seen[c] = true;
        }
        Ok(Self { order })
    }

    pub fn size(&self) -> usize {
        self.order.len()
    }

    pub fn order(&self) -> &[u32] {
        &self.order
    }

    pub fn is_identity(&self) -> bool {
        self.order.iter().enumerate().all(|(i, &c)| c as usize == i + 1)
    }

    /// Positions (1-based) holding their own label.
    pub fn fixed_points(&self) -> Vec<usize> {
        (1..=self.size()).filter(|&i| self.order[i - 1] as usize == i).collect()
    }

    fn permute(&self, target: impl Fn(usize) -> usize) -> Deck {
        let mut out = vec![0; self.size()];
        for (i, &card) in self.order.iter().enumerate() {
            out[target(i + 1) - 1] = card;
        }
        Deck { order: out }
    }
}

fn check_size(size: usize) -> Result<()> {
    if size == 0 || size % 2 == 1 {
        return Err(domain(format!("deck size must be even and positive, got {size}")));
    }
    Ok(())
}

/// The card at position `i` moves to position `2i mod (2n+1)`.
pub fn perfect_in_shuffle(deck: &Deck) -> Deck {
    let m = deck.size() + 1;
    deck.permute(|i| 2 * i % m)
}

/// Over-under: the top card is laid down, the next goes on top of the new
/// pile, the next beneath it, and so on.
pub fn monge_shuffle(deck: &Deck) -> Deck {
    let two_n = deck.size();
    let n = two_n / 2;
    // the k-th dealt card (1-based) lands at n+1 + (k−1)/2 when k is odd,
    // and at n+1 − k/2 when k is even
    deck.permute(|k| if k % 2 == 1 { n + 1 + (k - 1) / 2 } else { n + 1 - k / 2 })
}

/// The Monge shuffle by literally dealing onto a double-ended pile.
pub fn monge_shuffle_by_dealing(deck: &Deck) -> Deck {
    let mut pile = std::collections::VecDeque::with_capacity(deck.size());
    for (k, &card) in deck.order.iter().enumerate() {
        if k % 2 == 0 {
            pile.push_back(card);
        } else {
            pile.push_front(card);
        }
    }
    Deck { order: pile.into() }
}

/// Multiplicative order of 2 modulo `2n + 1`.
///
/// Starts from Euler's totient and strips prime factors while `2^e ≡ 1`
/// still holds.
pub fn shuffle_order(two_n: u64) -> Result<u64> {
    if two_n == 0 || two_n % 2 == 1 {
        return Err(domain(format!("deck size must be even and positive, got {two_n}")));
    }
    let m = two_n + 1;
    let phi = totient(m);
    let mut e = phi;
    for (f, _) in factor(phi) {
        while e % f == 0 && pow_mod(2, e / f, m) == 1 {
            e /= f;
        }
    }
    Ok(e)
}

/// Order of 2 by repeated doubling, for cross-checking.
pub fn shuffle_order_by_iteration(two_n: u64) -> u64 {
    let m = two_n + 1;
    let mut x = 2 % m;
    let mut k = 1;
    while x != 1 {
        x = 2 * x % m;
        k += 1;
    }
    k
}

fn pow_mod(base: u64, mut e: u64, m: u64) -> u64 {
    let m128 = m as u128;
    let mut b = base as u128 % m128;
    let mut acc = 1u128 % m128;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m128;
        }
        b = b * b % m128;
        e >>= 1;
    }
    acc as u64
}

/// Prime factorization by trial division, as `(prime, exponent)` pairs.
fn factor(mut x: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut f = 2u64;
    while f.saturating_mul(f) <= x {
        if x % f == 0 {
            let mut e = 0;
            while x % f == 0 {
                x /= f;
                e += 1;
            }
            out.push((f, e));
        }
        f += if f == 2 { 1 } else { 2 };
    }
    if x > 1 {
        out.push((x, 1));
    }
    out
}

fn totient(m: u64) -> u64 {
    factor(m).into_iter().fold(m, |acc, (p, _)| acc / p * (p - 1))
}

pub fn is_prime(x: u64) -> bool {
    x >= 2 && factor(x) == [(x, 1)]
}

/// Order of a permutation given as target positions (0-based), as the lcm of
/// its cycle lengths.
pub fn permutation_order(perm: &[usize]) -> BigUint {
    let mut seen = vec![false; perm.len()];
    let mut acc = BigUint::one();
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0u64;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = perm[i];
            len += 1;
        }
        acc = acc.lcm(&BigUint::from(len));
    }
    acc
}

/// Number of applications of `step` until the deck is back in order.
pub fn iterate_until_identity(size: usize, step: impl Fn(&Deck) -> Deck) -> Result<u64> {
    let start = Deck::new(size)?;
    let mut deck = step(&start);
    let mut k = 1;
    while !deck.is_identity() {
        deck = step(&deck);
        k += 1;
    }
    Ok(k)
}

/// Order of the Monge shuffle on `size` cards.
pub fn monge_order(size: usize) -> Result<BigUint> {
    check_size(size)?;
    let dealt = monge_shuffle(&Deck::new(size)?);
    // card c sits at position j, so the card from position c goes to j
    let mut perm = vec![0; size];
    for (j, &c) in dealt.order().iter().enumerate() {
        perm[c as usize - 1] = j;
    }
    Ok(permutation_order(&perm))
}

/// How often 2 is a primitive root among primes `2n + 1` up to a limit.
///
/// Artin's conjecture predicts the share tends to about 0.3739558; this is
/// a tally, not evidence either way.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ArtinReport {
    pub limit: u64,
    pub primes: u64,
    pub full_period: u64,
    pub share: f64,
    pub artin_constant: f64,
}

pub fn artin_scan(limit: u64) -> ArtinReport {
    let mut primes = 0;
    let mut full = 0;
    let mut m = 3;
    while m <= limit {
        if is_prime(m) {
            primes += 1;
            if shuffle_order(m - 1).map_or(false, |r| r == m - 1) {
                full += 1;
            }
        }
        m += 2;
    }
    ArtinReport {
        limit,
        primes,
        full_period: full,
        share: if primes == 0 { 0.0 } else { full as f64 / primes as f64 },
        artin_constant: 0.373_955_813_619_202_3,
    }
}
