//! Separating pseudowords by finite quotients of K_n.
//!
//! At level `n` the relation is the congruence on K_n generated by the
//! length-`n` prefixes of all substitution instances `(σ(u), σ(v))` of the
//! generator pairs, where `σ` maps each letter to a word of length at most
//! the substitution depth.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::derivation::Pair;
use super::scripts::defining_pair;
use super::theta::theta4_equiv;
use crate::finsgp::{congruence_closure, Congruence, KnSemigroup};
use crate::words::{Alphabet, KWord, Substitution};

/// Nonempty words over {a,b} of length at most `depth`, in length-lex
/// order.
fn short_words(depth: usize) -> Vec<KWord> {
    let mut out = Vec::new();
    let mut layer = vec![String::new()];
    for _ in 0..depth {
        layer = layer
            .iter()
            .flat_map(|w| ['a', 'b'].map(|c| format!("{w}{c}")))
            .collect();
        out.extend(layer.iter().map(|w| KWord::lit(w)));
    }
    out
}

/// All substitutions of {a,b} with images of length at most `depth`; depth
/// 0 gives only the identity.
pub fn substitutions(depth: usize) -> Vec<Substitution> {
    if depth == 0 {
        return vec![Substitution::identity()];
    }
    let words = short_words(depth);
    let mut out = Vec::with_capacity(words.len() * words.len());
    for wa in &words {
        for wb in &words {
            out.push(Substitution::new([('a', wa.clone()), ('b', wb.clone())]));
        }
    }
    out
}

/// Substitution depth used by the shipped experiments; depth 1 already
/// yields the full quotient on every level up to 12.
pub const DEFAULT_SUBST_DEPTH: usize = 2;

/// The defining pairs `G_1..G_count` of the fully invariant congruence
/// classified by shortest full-content prefixes.
pub fn theta4_generators(count: usize) -> Vec<Pair> {
    (1..=count).map(defining_pair).collect()
}

/// The single generator `(ab^ω, ba^ω)`.
pub fn theta3_generators() -> Vec<Pair> {
    vec![(KWord::lit("a(b)^w"), KWord::lit("b(a)^w"))]
}

/// Caches one congruence per level so many pairs can be tested cheaply.
pub struct Separator {
    generators: Vec<Pair>,
    substitutions: Vec<Substitution>,
    levels: BTreeMap<usize, (KnSemigroup, Congruence)>,
}

impl Separator {
    pub fn new(generators: Vec<Pair>, subst_depth: usize) -> Self {
        Separator {
            generators,
            substitutions: substitutions(subst_depth),
            levels: BTreeMap::new(),
        }
    }

    fn level(&mut self, n: usize) -> &(KnSemigroup, Congruence) {
        let (generators, substitutions) = (&self.generators, &self.substitutions);
        self.levels.entry(n).or_insert_with(|| {
            let kn = KnSemigroup::new(Alphabet::ab(), n).expect("n >= 1");
            let mut pairs = Vec::new();
            for sigma in substitutions {
                for (u, v) in generators {
                    let x = kn.project(&sigma.apply(u)).expect("letters of {a,b}");
                    let y = kn.project(&sigma.apply(v)).expect("letters of {a,b}");
                    if x != y {
                        pairs.push((x, y));
                    }
                }
            }
            pairs.sort_unstable();
            pairs.dedup();
            let c = congruence_closure(&kn, &pairs);
            (kn, c)
        })
    }

    /// Number of classes at level `n`.
    pub fn classes_at(&mut self, n: usize) -> usize {
        self.level(n).1.num_classes()
    }

    pub fn separates_at(&mut self, x: &KWord, y: &KWord, n: usize) -> bool {
        let (kn, c) = self.level(n);
        match (kn.project(x), kn.project(y)) {
            (Some(i), Some(j)) => !c.related(i, j),
            _ => true,
        }
    }

    /// The least `n ≤ n_max` whose quotient separates `x` from `y`.
    pub fn search(&mut self, x: &KWord, y: &KWord, n_max: usize) -> Option<usize> {
        (1..=n_max).find(|&n| self.separates_at(x, y, n))
    }
}

pub fn separation_search(
    x: &KWord,
    y: &KWord,
    generators: &[Pair],
    n_max: usize,
    subst_depth: usize,
) -> Option<usize> {
    Separator::new(generators.to_vec(), subst_depth).search(x, y, n_max)
}

fn random_letters<R: Rng>(letters: &[char], len: usize, rng: &mut R) -> Vec<char> {
    (0..len).map(|_| *letters.choose(rng).expect("nonempty")).collect()
}

/// A short random pseudoword over {a,b}: finite of length 1..=5, or with
/// a prefix of length at most 3 and a period of length 1..=3.
fn random_word<R: Rng>(rng: &mut R) -> KWord {
    let ab = ['a', 'b'];
    if rng.gen_bool(0.3) {
        let len = rng.gen_range(1..=5);
        KWord::finite(random_letters(&ab, len, rng)).expect("nonempty")
    } else {
        let (p, q) = (rng.gen_range(0..=3), rng.gen_range(1..=3));
        KWord::omega(&random_letters(&ab, p, rng), &random_letters(&ab, q, rng)).expect("nonempty period")
    }
}

/// `count` pairs outside the prefix-content congruence, starting with
/// `(a^ω, b^ω)` and `(ab^ω, ba^ω)`, and `count` distinct pairs inside it.
pub fn sample_theta4_pairs(count: usize, seed: u64) -> (Vec<Pair>, Vec<Pair>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut apart: Vec<Pair> = [("(a)^w", "(b)^w"), ("a(b)^w", "b(a)^w")]
        .into_iter()
        .map(|(x, y)| (KWord::lit(x), KWord::lit(y)))
        .take(count)
        .collect();
    while apart.len() < count {
        let (x, y) = (random_word(&mut rng), random_word(&mut rng));
        if !theta4_equiv(&x, &y).expect("letters of {a,b}") && !apart.contains(&(x.clone(), y.clone())) {
            apart.push((x, y));
        }
    }
    let mut together: Vec<Pair> = Vec::new();
    while together.len() < count {
        let (p, q) = (rng.gen_range(0..=3), rng.gen_range(1..=3));
        let ab = ['a', 'b'];
        let x = KWord::omega(&random_letters(&ab, p, &mut rng), &random_letters(&ab, q, &mut rng)).expect("period");
        // Same shortest full-content prefix, any continuation over the same letters.
        let content: Vec<char> = x.content().into_iter().collect();
        let mut pre = x.tilde0();
        let extra = rng.gen_range(0..=3);
        pre.extend(random_letters(&content, extra, &mut rng));
        let per_len = rng.gen_range(1..=3);
        let y = KWord::omega(&pre, &random_letters(&content, per_len, &mut rng)).expect("period");
        if x != y && !together.contains(&(x.clone(), y.clone())) {
            debug_assert!(theta4_equiv(&x, &y).expect("letters of {a,b}"));
            together.push((x, y));
        }
    }
    (apart, together)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeparationCase {
    pub x: KWord,
    pub y: KWord,
    pub equivalent: bool,
    /// Least separating level, if any up to the bound.
    pub level: Option<usize>,
}

impl SeparationCase {
    pub fn ok(&self) -> bool {
        self.equivalent == self.level.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeparationReport {
    pub n_max: usize,
    pub subst_depth: usize,
    pub generators: usize,
    pub classes: Vec<(usize, usize)>,
    pub cases: Vec<SeparationCase>,
}

impl SeparationReport {
    pub fn failures(&self) -> impl Iterator<Item = &SeparationCase> {
        self.cases.iter().filter(|c| !c.ok())
    }
}

/// Samples `count` pairs on each side of the prefix-content congruence and
/// searches each for a separating level up to `n_max`, using the first
/// `n_max` defining pairs as generators.
pub fn separation_experiment(count: usize, n_max: usize, subst_depth: usize, seed: u64) -> SeparationReport {
    let mut sep = Separator::new(theta4_generators(n_max), subst_depth);
    let (apart, together) = sample_theta4_pairs(count, seed);
    let mut cases = Vec::new();
    for (pairs, equivalent) in [(apart, false), (together, true)] {
        for (x, y) in pairs {
            let level = sep.search(&x, &y, n_max);
            cases.push(SeparationCase { x, y, equivalent, level });
        }
    }
    let classes = (1..=n_max).map(|n| (n, sep.classes_at(n))).collect();
    SeparationReport {
        n_max,
        subst_depth,
        generators: n_max,
        classes,
        cases,
    }
}
