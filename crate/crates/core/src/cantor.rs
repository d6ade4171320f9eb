//! The Cantor-function value of an infinite word over {a,b} as an exact
//! rational, and a cross-check of its kernel against the θ₃ decider.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::congruences::theta::theta3_equiv;
use crate::words::{normalize, KWord, KWordView};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CantorError {
    #[error("finite words have no binary expansion")]
    Finite,
    #[error("letter `{0}` is outside the alphabet {{a,b}}")]
    ForeignLetter(char),
    #[error("malformed rational `{0}`")]
    Parse(String),
}

/// A reduced fraction with positive denominator, shown as `p/q`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExactRational(BigRational);

impl ExactRational {
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Self {
        ExactRational(BigRational::new(numer.into(), denom.into()))
    }

    pub fn zero() -> Self {
        ExactRational(BigRational::zero())
    }

    pub fn one() -> Self {
        ExactRational(BigRational::one())
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
    }
}

impl From<BigRational> for ExactRational {
    fn from(r: BigRational) -> Self {
        ExactRational(r)
    }
}

impl fmt::Display for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl FromStr for ExactRational {
    type Err = CantorError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || CantorError::Parse(s.to_string());
        let (p, q) = s.split_once('/').ok_or_else(bad)?;
        let p: BigInt = p.parse().map_err(|_| bad())?;
        let q: BigInt = q.parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        Ok(ExactRational::new(p, q))
    }
}

impl Serialize for ExactRational {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ExactRational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

fn digits(w: &[char]) -> Result<BigInt, CantorError> {
    let mut v = BigInt::zero();
    for &c in w {
        let d = match c {
            'a' => 0u8,
            'b' => 1,
            other => return Err(CantorError::ForeignLetter(other)),
        };
        v = (v << 1usize) + d;
    }
    Ok(v)
}

/// `Σ d_i 2^{-i}` with `d_i = 0` for `a` and `1` for `b`: the preperiod
/// contributes its binary value, the period a geometric series.
pub fn phi(x: &KWord) -> Result<ExactRational, CantorError> {
    let KWordView::Omega { pre, per } = x.view() else {
        return Err(CantorError::Finite);
    };
    let one = BigInt::one();
    let head = BigRational::new(digits(pre)?, &one << pre.len());
    let cycle = (&one << per.len()) - &one;
    let tail = BigRational::new(digits(per)?, cycle * (&one << pre.len()));
    Ok(ExactRational(head + tail))
}

/// The first `m` binary digits as a rational.
pub fn prefix_value(x: &KWord, m: usize) -> Result<ExactRational, CantorError> {
    let w = x.truncate(m);
    Ok(ExactRational(BigRational::new(digits(&w)?, BigInt::one() << w.len())))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelMismatch {
    pub x: KWord,
    pub y: KWord,
    pub phi_x: ExactRational,
    pub phi_y: ExactRational,
    pub theta3: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelReport {
    pub exhaustive_words: usize,
    pub exhaustive_pairs: usize,
    pub random_pairs: usize,
    pub adversarial_pairs: usize,
    /// Distinct pairs found θ₃-related, over all sources.
    pub related_pairs: usize,
    pub mismatches: Vec<KernelMismatch>,
}

impl KernelReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

fn all_words(max: usize, min: usize) -> Vec<Vec<char>> {
    let mut out = Vec::new();
    for len in min..=max {
        for mask in 0u32..(1 << len) {
            out.push((0..len).map(|i| if mask >> (len - 1 - i) & 1 == 0 { 'a' } else { 'b' }).collect());
        }
    }
    out
}

/// Distinct infinite words with a presentation of preperiod at most
/// `max_pre` and period at most `max_per`.
pub fn omega_words(max_pre: usize, max_per: usize) -> Vec<KWord> {
    let mut out: Vec<KWord> = Vec::new();
    for p in all_words(max_pre, 0) {
        for q in all_words(max_per, 1) {
            out.push(normalize(&p, &q).expect("nonempty period"));
        }
    }
    out.sort();
    out.dedup();
    out
}

struct Tally {
    related: usize,
    mismatches: Vec<KernelMismatch>,
}

impl Tally {
    fn check(&mut self, x: &KWord, y: &KWord, px: &ExactRational, py: &ExactRational) {
        let t = theta3_equiv(x, y).expect("words over {a,b}");
        if t && x != y {
            self.related += 1;
        }
        if (px == py) != t {
            self.mismatches.push(KernelMismatch {
                x: x.clone(),
                y: y.clone(),
                phi_x: px.clone(),
                phi_y: py.clone(),
                theta3: t,
            });
        }
    }

    fn check_fresh(&mut self, x: &KWord, y: &KWord) {
        let (px, py) = (phi(x).expect("infinite"), phi(y).expect("infinite"));
        self.check(x, y, &px, &py);
    }
}

fn random_word(rng: &mut ChaCha8Rng, min: usize, max: usize) -> Vec<char> {
    let len = rng.gen_range(min..=max);
    (0..len).map(|_| if rng.gen() { 'a' } else { 'b' }).collect()
}

/// A θ₃ pair `p·α·β^ω, p·β·α^ω` built from padded, non-canonical
/// presentations (extra period copies, period unrolled into the
/// preperiod).
fn random_related_pair(rng: &mut ChaCha8Rng) -> (KWord, KWord) {
    let p = random_word(rng, 0, 8);
    let (al, be) = if rng.gen() { ('a', 'b') } else { ('b', 'a') };
    let side = |rng: &mut ChaCha8Rng, first: char, rest: char| {
        let mut pre = p.clone();
        pre.push(first);
        pre.extend(std::iter::repeat_n(rest, rng.gen_range(0..4)));
        let per = vec![rest; rng.gen_range(1..4)];
        normalize(&pre, &per).expect("nonempty period")
    };
    (side(rng, al, be), side(rng, be, al))
}

/// Hamming-1 neighbours of the presentation `pre·(per)^ω`.
fn flips(pre: &[char], per: &[char]) -> Vec<KWord> {
    let flip = |c: char| if c == 'a' { 'b' } else { 'a' };
    let mut out = Vec::new();
    for i in 0..pre.len() + per.len() {
        let (mut p, mut q) = (pre.to_vec(), per.to_vec());
        if i < p.len() {
            p[i] = flip(p[i]);
        } else {
            q[i - p.len()] = flip(q[i - p.len()]);
        }
        out.push(normalize(&p, &q).expect("nonempty period"));
    }
    out
}

/// Compares `phi(x) = phi(y)` with θ₃ on: every pair of infinite words with
/// preperiod at most 6 and period at most 4; `samples` seeded random pairs,
/// half of them θ₃-related by construction; and Hamming-1 perturbations of
/// short related pairs.
pub fn kernel_crosscheck(samples: usize, seed: u64) -> KernelReport {
    let mut tally = Tally {
        related: 0,
        mismatches: Vec::new(),
    };
    let words = omega_words(6, 4);
    let values: Vec<ExactRational> = words.iter().map(|w| phi(w).expect("infinite")).collect();
    for i in 0..words.len() {
        for j in i..words.len() {
            tally.check(&words[i], &words[j], &values[i], &values[j]);
        }
    }
    let exhaustive_pairs = words.len() * (words.len() + 1) / 2;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for s in 0..samples {
        let (x, y) = if s % 2 == 0 {
            random_related_pair(&mut rng)
        } else {
            let a = normalize(&random_word(&mut rng, 0, 12), &random_word(&mut rng, 1, 6));
            let b = normalize(&random_word(&mut rng, 0, 12), &random_word(&mut rng, 1, 6));
            (a.expect("nonempty period"), b.expect("nonempty period"))
        };
        tally.check_fresh(&x, &y);
    }

    let mut adversarial_pairs = 0;
    for p in all_words(3, 0) {
        for (al, be) in [('a', 'b'), ('b', 'a')] {
            let (mut px, mut py) = (p.clone(), p.clone());
            px.push(al);
            py.push(be);
            let (x, y) = (
                normalize(&px, &[be]).expect("nonempty period"),
                normalize(&py, &[al]).expect("nonempty period"),
            );
            for (pre, per, other) in [(&px, be, &y), (&py, al, &x)] {
                // Present the period twice so flips can land inside it.
                for z in flips(pre, &[per, per]) {
                    tally.check_fresh(&z, other);
                    adversarial_pairs += 1;
                }
            }
            tally.check_fresh(&x, &y);
            adversarial_pairs += 1;
        }
    }

    KernelReport {
        exhaustive_words: words.len(),
        exhaustive_pairs,
        random_pairs: samples,
        adversarial_pairs,
        related_pairs: tally.related,
        mismatches: tally.mismatches,
    }
}
