//! Terms over a graded signature and their parenthesis-free preorder
//! encoding.
//!
//! Tokens are a head character followed by any run of ASCII digits,
//! subscript digits or primes, so `x₁`, `u'` and `f2` are single tokens and
//! a concatenated word splits back uniquely. Tokens headed by `x`, `y` or
//! `z` are variables; every other token must be a declared symbol.

mod algebra;
mod counterexample;
mod separation;

pub use algebra::{all_unary_algebras, evaluate, two_point_algebra, AlgebraError, EvalError, FiniteAlgebra, Operation};
pub use counterexample::{
    build_counterexample, omega_identity_check, omega_identity_sides, self_map_corpus, Counterexample,
    CounterexampleError, Exponent, OmegaExpr, OmegaReport, OmegaViolation, XiReport, xi_check,
};
pub use separation::{
    mechanism_sweep, polish_image, separating_monoid, verify_unary_separation, MechanismReport,
    SeparatingMonoid, SeparationError, UnarySeparationReport,
};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SignatureError {
    #[error("`{0}` is not a single token")]
    BadToken(String),
    #[error("`{0}` would shadow a variable")]
    Shadowing(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("input ends at token {position}; `{symbol}` at {opened} still needs {missing} argument(s)")]
    Truncated {
        position: usize,
        symbol: String,
        opened: usize,
        missing: usize,
    },
    #[error("a complete term ends before token {position}")]
    TrailingSurplus { position: usize },
    #[error("unknown symbol `{token}` at token {position}")]
    UnknownSymbol { position: usize, token: String },
    #[error("empty input")]
    Empty,
}

fn is_suffix_char(c: char) -> bool {
    c.is_ascii_digit() || ('₀'..='₉').contains(&c) || c == '\''
}

/// Splits text into tokens, skipping whitespace.
pub fn tokenize(s: &str) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for c in s.chars().filter(|c| !c.is_whitespace()) {
        match out.last_mut() {
            Some(t) if is_suffix_char(c) => t.push(c),
            _ => out.push(c.to_string()),
        }
    }
    out
}

fn is_token(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| !is_suffix_char(c) && !c.is_whitespace()) && chars.all(is_suffix_char)
}

pub fn is_variable(token: &str) -> bool {
    is_token(token) && matches!(token.chars().next(), Some('x' | 'y' | 'z'))
}

/// Operation symbols with their arities.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SignatureJson", into = "SignatureJson")]
pub struct Signature {
    arity: BTreeMap<String, usize>,
}

#[derive(Serialize, Deserialize)]
struct SignatureJson {
    symbols: BTreeMap<String, usize>,
}

impl TryFrom<SignatureJson> for Signature {
    type Error = SignatureError;

    fn try_from(j: SignatureJson) -> Result<Self, Self::Error> {
        Signature::new(j.symbols)
    }
}

impl From<Signature> for SignatureJson {
    fn from(s: Signature) -> Self {
        SignatureJson { symbols: s.arity }
    }
}

impl Signature {
    pub fn new(arity: BTreeMap<String, usize>) -> Result<Self, SignatureError> {
        for name in arity.keys() {
            if !is_token(name) {
                return Err(SignatureError::BadToken(name.clone()));
            }
            if is_variable(name) {
                return Err(SignatureError::Shadowing(name.clone()));
            }
        }
        Ok(Signature { arity })
    }

    pub fn from_pairs(pairs: &[(&str, usize)]) -> Result<Self, SignatureError> {
        Self::new(pairs.iter().map(|&(s, n)| (s.to_string(), n)).collect())
    }

    pub fn arity(&self, symbol: &str) -> Option<usize> {
        self.arity.get(symbol).copied()
    }

    pub fn symbols(&self) -> impl Iterator<Item = (&str, usize)> {
        self.arity.iter().map(|(s, &n)| (s.as_str(), n))
    }

    pub fn of_arity(&self, n: usize) -> Vec<&str> {
        self.symbols().filter(|&(_, m)| m == n).map(|(s, _)| s).collect()
    }

    pub fn max_arity(&self) -> usize {
        self.arity.values().copied().max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    /// A symbol applied to its arguments; constants have none.
    App(String, Vec<Term>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn constant(name: &str) -> Term {
        Term::App(name.to_string(), Vec::new())
    }

    pub fn app(name: &str, args: Vec<Term>) -> Term {
        Term::App(name.to_string(), args)
    }

    /// Node count.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    /// Leaves have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::App(_, args) => args.iter().map(|t| 1 + t.depth()).max().unwrap_or(0),
        }
    }

    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(x) => {
                out.insert(x.clone());
            }
            Term::App(_, args) => args.iter().for_each(|t| t.collect_vars(out)),
        }
    }

    /// Replaces variables by terms; unmapped variables stay.
    pub fn substitute(&self, map: &BTreeMap<String, Term>) -> Term {
        match self {
            Term::Var(x) => map.get(x).cloned().unwrap_or_else(|| self.clone()),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|t| t.substitute(map)).collect()),
        }
    }

    pub fn well_formed(&self, sig: &Signature) -> bool {
        match self {
            Term::Var(x) => is_variable(x),
            Term::App(f, args) => sig.arity(f) == Some(args.len()) && args.iter().all(|t| t.well_formed(sig)),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(x) => f.write_str(x),
            Term::App(s, args) if args.is_empty() => f.write_str(s),
            Term::App(s, args) => {
                write!(f, "{s}(")?;
                for (i, t) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{t}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// A sequence of variable and symbol tokens; validity is for `decode`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PolishWord(pub Vec<String>);

impl PolishWord {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn tokens(&self) -> &[String] {
        &self.0
    }
}

impl fmt::Display for PolishWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|t| f.write_str(t))
    }
}

impl FromStr for PolishWord {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(PolishWord(tokenize(s)))
    }
}

pub fn encode(t: &Term) -> PolishWord {
    fn go(t: &Term, out: &mut Vec<String>) {
        match t {
            Term::Var(x) => out.push(x.clone()),
            Term::App(f, args) => {
                out.push(f.clone());
                args.iter().for_each(|a| go(a, out));
            }
        }
    }
    let mut out = Vec::with_capacity(t.size());
    go(t, &mut out);
    PolishWord(out)
}

/// Arity-driven decoding, iterative so deep terms do not exhaust the stack.
pub fn decode(w: &PolishWord, sig: &Signature) -> Result<Term, DecodeError> {
    // Open applications: (symbol, position, arity, children so far).
    let mut stack: Vec<(String, usize, usize, Vec<Term>)> = Vec::new();
    let tokens = w.tokens();
    if tokens.is_empty() {
        return Err(DecodeError::Empty);
    }
    for (pos, tok) in tokens.iter().enumerate() {
        let mut done = if is_variable(tok) {
            Term::Var(tok.clone())
        } else {
            match sig.arity(tok) {
                None => {
                    return Err(DecodeError::UnknownSymbol {
                        position: pos,
                        token: tok.clone(),
                    })
                }
                Some(0) => Term::App(tok.clone(), Vec::new()),
                Some(n) => {
                    stack.push((tok.clone(), pos, n, Vec::with_capacity(n)));
                    continue;
                }
            }
        };
        loop {
            match stack.last_mut() {
                None => {
                    if pos + 1 < tokens.len() {
                        return Err(DecodeError::TrailingSurplus { position: pos + 1 });
                    }
                    return Ok(done);
                }
                Some((_, _, n, children)) => {
                    children.push(done);
                    if children.len() < *n {
                        break;
                    }
                    let (f, _, _, children) = stack.pop().expect("nonempty");
                    done = Term::App(f, children);
                }
            }
        }
    }
    let (symbol, opened, n, children) = stack.pop().expect("an unfinished application");
    Err(DecodeError::Truncated {
        position: tokens.len(),
        symbol,
        opened,
        missing: n - children.len(),
    })
}

/// A random term of depth at most `max_depth` over `vars` and `sig`.
pub fn random_term<R: Rng + ?Sized>(sig: &Signature, vars: &[&str], max_depth: usize, rng: &mut R) -> Term {
    let leaves: Vec<Term> = vars
        .iter()
        .map(|x| Term::var(x))
        .chain(sig.of_arity(0).into_iter().map(Term::constant))
        .collect();
    let ops: Vec<(&str, usize)> = sig.symbols().filter(|&(_, n)| n > 0).collect();
    assert!(!leaves.is_empty(), "need a variable or constant");
    fn go<R: Rng + ?Sized>(leaves: &[Term], ops: &[(&str, usize)], depth: usize, rng: &mut R) -> Term {
        if depth == 0 || ops.is_empty() || rng.gen_bool(0.3) {
            return leaves[rng.gen_range(0..leaves.len())].clone();
        }
        let (f, n) = ops[rng.gen_range(0..ops.len())];
        Term::app(f, (0..n).map(|_| go(leaves, ops, depth - 1, rng)).collect())
    }
    go(&leaves, &ops, max_depth, rng)
}

/// `count` random terms from a fixed seed.
pub fn random_terms(sig: &Signature, vars: &[&str], max_depth: usize, count: usize, seed: u64) -> Vec<Term> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_term(sig, vars, max_depth, &mut rng)).collect()
}

/// Every term of depth at most `depth` over the given leaves.
pub fn all_terms(sig: &Signature, vars: &[&str], depth: usize) -> Vec<Term> {
    let leaves: Vec<Term> = vars
        .iter()
        .map(|x| Term::var(x))
        .chain(sig.of_arity(0).into_iter().map(Term::constant))
        .collect();
    let mut terms = leaves.clone();
    for _ in 0..depth {
        let mut next = leaves.clone();
        for (f, n) in sig.symbols().filter(|&(_, n)| n > 0) {
            let mut tuples: Vec<Vec<Term>> = vec![Vec::new()];
            for _ in 0..n {
                tuples = tuples
                    .into_iter()
                    .flat_map(|t| {
                        terms.iter().map(move |s| {
                            let mut t = t.clone();
                            t.push(s.clone());
                            t
                        })
                    })
                    .collect();
            }
            next.extend(tuples.into_iter().map(|args| Term::app(f, args)));
        }
        terms = next;
    }
    terms
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CodecReport {
    pub random_terms: usize,
    pub round_trip_failures: usize,
    pub exhaustive_terms: usize,
    pub exhaustive_collisions: usize,
    pub truncated: usize,
    pub trailing: usize,
    pub unknown: usize,
    /// Corrupted words that decoded anyway, or to the wrong error class.
    pub misclassified: usize,
}

impl CodecReport {
    pub fn passed(&self) -> bool {
        self.round_trip_failures == 0
            && self.exhaustive_collisions == 0
            && self.misclassified == 0
            && self.truncated > 0
            && self.trailing > 0
            && self.unknown > 0
    }
}

/// The mixed-arity signature used by the codec checks.
pub fn codec_signature() -> Signature {
    Signature::from_pairs(&[("f", 2), ("g", 1), ("h", 3), ("c", 0)]).expect("valid symbols")
}

/// Round trips on `samples` seeded random terms of depth at most
/// `max_depth`, injectivity on every term of depth at most
/// `exhaustive_depth` over one binary and one unary symbol, and each random
/// encoding corrupted three ways to provoke each decode error.
pub fn codec_check(samples: usize, max_depth: usize, exhaustive_depth: usize, seed: u64) -> CodecReport {
    use rand::SeedableRng;
    let sig = codec_signature();
    let vars = ["x", "y", "z₁"];
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut r = CodecReport {
        random_terms: samples,
        ..CodecReport::default()
    };
    for _ in 0..samples {
        let t = random_term(&sig, &vars, max_depth, &mut rng);
        let w = encode(&t);
        let text: PolishWord = w.to_string().parse().expect("infallible");
        if decode(&w, &sig).as_ref() != Ok(&t) || text != w || w.len() != t.size() {
            r.round_trip_failures += 1;
        }
        let mut cut = w.clone();
        cut.0.pop();
        match decode(&cut, &sig) {
            Err(DecodeError::Truncated { .. }) => r.truncated += 1,
            // A bare leaf has nothing left once cut.
            Err(DecodeError::Empty) if w.len() == 1 => {}
            _ => r.misclassified += 1,
        }
        let mut long = w.clone();
        long.0.push("x".into());
        match decode(&long, &sig) {
            Err(DecodeError::TrailingSurplus { position }) if position == w.len() => r.trailing += 1,
            _ => r.misclassified += 1,
        }
        let mut bad = w.clone();
        let at = rng.gen_range(0..bad.len());
        bad.0[at] = "q".into();
        match decode(&bad, &sig) {
            Err(DecodeError::UnknownSymbol { position, .. }) if position == at => r.unknown += 1,
            _ => r.misclassified += 1,
        }
    }
    let small = Signature::from_pairs(&[("f", 2), ("g", 1)]).expect("valid symbols");
    let terms = all_terms(&small, &["x"], exhaustive_depth);
    r.exhaustive_terms = terms.len();
    let mut seen = std::collections::HashSet::with_capacity(terms.len());
    for t in &terms {
        let w = encode(t);
        if !seen.insert(w.clone()) || decode(&w, &small).as_ref() != Ok(t) {
            r.exhaustive_collisions += 1;
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn uv() -> Signature {
        Signature::from_pairs(&[("u", 2), ("v", 3), ("c", 0)]).unwrap()
    }

    fn example() -> Term {
        let x = |i: &str| Term::var(i);
        Term::app(
            "u",
            vec![
                Term::app("v", vec![x("x₁"), Term::app("u", vec![x("x₂"), x("x₁")]), x("x₃")]),
                Term::app("u", vec![x("x₃"), x("x₂")]),
            ],
        )
    }

    #[test]
    fn encode_examples() {
        assert_eq!(encode(&example()).to_string(), "uvx₁ux₂x₁x₃ux₃x₂");
        assert_eq!(encode(&example()).len(), example().size());
        let chain = Term::app("u", vec![Term::app("v", vec![Term::var("x")])]);
        assert_eq!(encode(&chain).to_string(), "uvx");
        assert_eq!(encode(&Term::constant("c")).to_string(), "c");
    }

    #[test]
    fn decode_examples() {
        let w: PolishWord = "uvx₁ux₂x₁x₃ux₃x₂".parse().unwrap();
        assert_eq!(w.len(), 10);
        assert_eq!(decode(&w, &uv()).unwrap(), example());
        assert_eq!(decode(&w, &uv()).unwrap().to_string(), "u(v(x₁,u(x₂,x₁),x₃),u(x₃,x₂))");
    }

    #[test]
    fn decode_errors() {
        let sig = uv();
        let parse = |s: &str| decode(&s.parse().unwrap(), &sig);
        assert_eq!(
            parse("uu"),
            Err(DecodeError::Truncated {
                position: 2,
                symbol: "u".into(),
                opened: 1,
                missing: 2
            })
        );
        assert_eq!(parse("xy"), Err(DecodeError::TrailingSurplus { position: 1 }));
        assert_eq!(
            parse("uxq"),
            Err(DecodeError::UnknownSymbol {
                position: 2,
                token: "q".into()
            })
        );
        assert_eq!(parse(""), Err(DecodeError::Empty));
        assert_eq!(parse("ux c"), Ok(Term::app("u", vec![Term::var("x"), Term::constant("c")])));
    }

    #[test]
    fn signature_rules() {
        assert_eq!(
            Signature::from_pairs(&[("x", 1)]),
            Err(SignatureError::Shadowing("x".into()))
        );
        assert!(matches!(Signature::from_pairs(&[("ab", 1)]), Err(SignatureError::BadToken(_))));
        assert!(Signature::from_pairs(&[("u₁", 1), ("f'", 2)]).is_ok());
        let json = r#"{"symbols":{"c":0,"u":2}}"#;
        let sig: Signature = serde_json::from_str(json).unwrap();
        assert_eq!(serde_json::to_string(&sig).unwrap(), json);
        assert!(serde_json::from_str::<Signature>(r#"{"symbols":{"y":0}}"#).is_err());
    }

    #[test]
    fn random_round_trip() {
        let sig = uv();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..500 {
            let t = random_term(&sig, &["x", "y₂"], 6, &mut rng);
            assert!(t.depth() <= 6 && t.well_formed(&sig));
            let w = encode(&t);
            assert_eq!(decode(&w, &sig).unwrap(), t);
            let text: PolishWord = w.to_string().parse().unwrap();
            assert_eq!(text, w);
        }
    }

    #[test]
    fn unique_readability_small() {
        let sig = Signature::from_pairs(&[("f", 2), ("g", 1)]).unwrap();
        let terms = all_terms(&sig, &["x"], 3);
        assert_eq!(terms.len(), 183);
        let words: BTreeSet<String> = terms.iter().map(|t| encode(t).to_string()).collect();
        assert_eq!(words.len(), terms.len());
    }

    #[test]
    fn codec_check_small() {
        let r = codec_check(300, 8, 3, 9);
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.exhaustive_terms, 183);
        assert_eq!(r, codec_check(300, 8, 3, 9));
    }

    #[test]
    fn substitution() {
        let t = Term::app("u", vec![Term::var("x"), Term::var("y")]);
        let s = t.substitute(&BTreeMap::from([("x".to_string(), Term::constant("c"))]));
        assert_eq!(s.to_string(), "u(c,y)");
        assert_eq!(s.variables(), BTreeSet::from(["y".to_string()]));
    }
}
