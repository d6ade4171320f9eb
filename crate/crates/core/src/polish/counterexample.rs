use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{encode, evaluate, two_point_algebra, PolishWord, Signature, Term};
use crate::finsgp::{omega_power_fin, FinSemigroup, Semigroup};
use crate::unary::{all_maps, gamma_functor, UnaryAlgebra};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CounterexampleError {
    #[error("the symbol needs arity at least 2, got {0}")]
    ArityTooSmall(usize),
    #[error("k must be positive")]
    ZeroK,
    #[error("corpus member {0} has no identity")]
    NotAMonoid(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub k: usize,
    pub n: usize,
    /// In the variables `x`, `y`, `z`.
    pub w: Term,
    pub t: Term,
    pub s: Term,
}

impl Counterexample {
    pub fn signature(&self) -> Signature {
        Signature::from_pairs(&[("u", self.n)]).expect("valid symbol")
    }

    /// `u^k (u^k x^m)^m` with `m = k(n-1) + 1`, as a token sequence.
    pub fn expected_encoding(&self) -> PolishWord {
        let m = self.k * (self.n - 1) + 1;
        let mut inner = vec!["u".to_string(); self.k];
        inner.extend(std::iter::repeat_n("x".to_string(), m));
        let mut out = vec!["u".to_string(); self.k];
        for _ in 0..m {
            out.extend(inner.iter().cloned());
        }
        PolishWord(out)
    }
}

/// `w_k(x,y,z)` nests `k` applications of `u`: the innermost takes `x` and
/// `n-1` copies of `y`, each outer one adds `n-1` copies of `z`.
pub fn build_counterexample(k: usize, n: usize) -> Result<Counterexample, CounterexampleError> {
    if n < 2 {
        return Err(CounterexampleError::ArityTooSmall(n));
    }
    if k == 0 {
        return Err(CounterexampleError::ZeroK);
    }
    let fill = |first: Term, rest: &str| {
        let mut args = vec![first];
        args.extend(std::iter::repeat_n(Term::var(rest), n - 1));
        Term::app("u", args)
    };
    let mut w = fill(Term::var("x"), "y");
    for _ in 1..k {
        w = fill(w, "z");
    }
    let at = |x: &Term, y: &Term, z: &Term| {
        w.substitute(&BTreeMap::from([
            ("x".to_string(), x.clone()),
            ("y".to_string(), y.clone()),
            ("z".to_string(), z.clone()),
        ]))
    };
    let x = Term::var("x");
    let www = at(&x, &x, &x);
    let t = at(&www, &www, &www);
    let s = at(&t, &x, &x);
    Ok(Counterexample { k, n, w, t, s })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct XiCase {
    pub k: usize,
    pub n: usize,
    pub encoding_matches: bool,
    pub xi_t: String,
    pub xi_s: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct XiReport {
    pub cases: Vec<XiCase>,
    pub violations: usize,
}

/// For each `k ≤ k_max` and arity in `arities`: the encoding of `t_k`
/// matches its closed form, and on the two-point algebra with `x ↦ a`,
/// `t_k ↦ a` while `s_k ↦ b`.
pub fn xi_check(k_max: usize, arities: &[usize]) -> Result<XiReport, CounterexampleError> {
    let mut cases = Vec::new();
    for &n in arities {
        for k in 1..=k_max {
            let c = build_counterexample(k, n)?;
            let alg = two_point_algebra(&c.signature(), n);
            let env = BTreeMap::from([("x".to_string(), alg.element("a").expect("a"))]);
            let name = |t: &Term| alg.elements()[evaluate(t, &alg, &env).expect("closed in x")].clone();
            cases.push(XiCase {
                k,
                n,
                encoding_matches: encode(&c.t) == c.expected_encoding(),
                xi_t: name(&c.t),
                xi_s: name(&c.s),
            });
        }
    }
    let violations = cases
        .iter()
        .filter(|c| !c.encoding_matches || c.xi_t != "a" || c.xi_s != "b")
        .count();
    Ok(XiReport { cases, violations })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Exponent {
    Finite(u32),
    Omega,
    OmegaPlusOne,
}

/// Products and powers over single-letter variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OmegaExpr {
    Var(char),
    Product(Vec<OmegaExpr>),
    Power(Box<OmegaExpr>, Exponent),
}

impl OmegaExpr {
    pub fn pow(self, e: Exponent) -> Self {
        OmegaExpr::Power(Box::new(self), e)
    }

    /// Value in a monoid with identity `one`; `env` assigns the variables.
    pub fn eval<S: Semigroup + ?Sized>(&self, s: &S, one: usize, env: &impl Fn(char) -> usize) -> usize {
        match self {
            OmegaExpr::Var(c) => env(*c),
            OmegaExpr::Product(fs) => fs.iter().fold(one, |acc, f| s.mul(acc, f.eval(s, one, env))),
            OmegaExpr::Power(base, e) => {
                let b = base.eval(s, one, env);
                match e {
                    Exponent::Finite(k) => (0..*k).fold(one, |acc, _| s.mul(acc, b)),
                    Exponent::Omega => omega_power_fin(s, b),
                    Exponent::OmegaPlusOne => s.mul(b, omega_power_fin(s, b)),
                }
            }
        }
    }
}

impl fmt::Display for OmegaExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OmegaExpr::Var(c) => write!(f, "{c}"),
            OmegaExpr::Product(fs) => fs.iter().try_for_each(|x| write!(f, "{x}")),
            OmegaExpr::Power(base, e) => {
                match **base {
                    OmegaExpr::Var(c) => write!(f, "{c}")?,
                    _ => write!(f, "({base})")?,
                }
                match e {
                    Exponent::Finite(1) => Ok(()),
                    Exponent::Finite(k) => write!(f, "^{k}"),
                    Exponent::Omega => f.write_str("^ω"),
                    Exponent::OmegaPlusOne => f.write_str("^(ω+1)"),
                }
            }
        }
    }
}

/// `u^ω(u^ω x^{ω+1})^{ω+1}`, `(u^ω x^{ω+1})^{ω+1}` and
/// `u^ω u^ω (u^ω x^{ω+1})^{ω+1} x^ω`, equal because ω-powers are
/// idempotent.
pub fn omega_identity_sides() -> [OmegaExpr; 3] {
    use Exponent::*;
    let u = || OmegaExpr::Var('u');
    let x = || OmegaExpr::Var('x');
    let core = || OmegaExpr::Product(vec![u().pow(Omega), x().pow(OmegaPlusOne)]).pow(OmegaPlusOne);
    [
        OmegaExpr::Product(vec![u().pow(Omega), core()]),
        core(),
        OmegaExpr::Product(vec![u().pow(Omega), u().pow(Omega), core(), x().pow(Omega)]),
    ]
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OmegaViolation {
    pub monoid: usize,
    pub u: usize,
    pub x: usize,
    pub values: [usize; 3],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OmegaReport {
    pub monoids: usize,
    pub pairs: usize,
    pub violations: Vec<OmegaViolation>,
}

pub fn omega_identity_check(corpus: &[FinSemigroup]) -> Result<OmegaReport, CounterexampleError> {
    let sides = omega_identity_sides();
    let mut report = OmegaReport {
        monoids: corpus.len(),
        pairs: 0,
        violations: Vec::new(),
    };
    for (i, m) in corpus.iter().enumerate() {
        let one = m.identity().ok_or(CounterexampleError::NotAMonoid(i))?;
        for u in 0..m.order() {
            for x in 0..m.order() {
                let env = |c: char| if c == 'u' { u } else { x };
                let values = sides.clone().map(|e| e.eval(m, one, &env));
                report.pairs += 1;
                if values[1] != values[0] || values[2] != values[0] {
                    report.violations.push(OmegaViolation { monoid: i, u, x, values });
                }
            }
        }
    }
    Ok(report)
}

/// Every distinct monoid of self-maps of `1..=max_points` points generated
/// by at most two maps.
pub fn self_map_corpus(max_points: usize) -> Vec<FinSemigroup> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for n in 1..=max_points {
        let maps = all_maps(n);
        for f in &maps {
            for g in &maps {
                let u = UnaryAlgebra::new(n, BTreeMap::from([('a', f.clone()), ('b', g.clone())]), None)
                    .expect("total maps");
                let gamma = gamma_functor(&u);
                let mut key: Vec<Vec<usize>> = gamma.maps.iter().map(|t| t.images().to_vec()).collect();
                key.sort();
                if seen.insert(key) {
                    out.push(gamma.monoid.table().clone());
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polish::decode;

    #[test]
    fn k1_n2_terms() {
        let c = build_counterexample(1, 2).unwrap();
        let uxx = Term::app("u", vec![Term::var("x"), Term::var("x")]);
        assert_eq!(c.t, Term::app("u", vec![uxx.clone(), uxx]));
        assert_eq!(encode(&c.t).to_string(), "uuxxuxx");
        assert_eq!(c.s, Term::app("u", vec![c.t.clone(), Term::var("x")]));
        assert_eq!(c.w.to_string(), "u(x,y)");
    }

    #[test]
    fn w_shape() {
        let c = build_counterexample(3, 3).unwrap();
        assert_eq!(c.w.to_string(), "u(u(u(x,y,y),z,z),z,z)");
    }

    #[test]
    fn encodings_match_closed_form() {
        assert_eq!(encode(&build_counterexample(2, 2).unwrap().t).len(), 17);
        for n in 2..=4 {
            for k in 1..=6 {
                let c = build_counterexample(k, n).unwrap();
                let w = encode(&c.t);
                assert_eq!(w, c.expected_encoding(), "k={k} n={n}");
                assert_eq!(decode(&w, &c.signature()).unwrap(), c.t);
            }
        }
    }

    #[test]
    fn arity_and_k_are_checked() {
        assert_eq!(build_counterexample(1, 1), Err(CounterexampleError::ArityTooSmall(1)));
        assert_eq!(build_counterexample(0, 2), Err(CounterexampleError::ZeroK));
    }

    #[test]
    fn xi_separates() {
        let r = xi_check(8, &[2, 3]).unwrap();
        assert_eq!(r.cases.len(), 16);
        assert_eq!(r.violations, 0);
    }

    #[test]
    fn omega_sides_in_groups_reduce_to_x() {
        let z3 = FinSemigroup::cyclic_group(3);
        let one = z3.identity().unwrap();
        for u in 0..3 {
            for x in 0..3 {
                let env = |c: char| if c == 'u' { u } else { x };
                for side in omega_identity_sides() {
                    assert_eq!(side.eval(&z3, one, &env), x);
                }
            }
        }
        let r = omega_identity_check(&[FinSemigroup::trivial(), z3]).unwrap();
        assert_eq!((r.pairs, r.violations.len()), (10, 0));
    }

    #[test]
    fn omega_display() {
        let [a, b, c] = omega_identity_sides();
        assert_eq!(a.to_string(), "u^ω(u^ωx^(ω+1))^(ω+1)");
        assert_eq!(b.to_string(), "(u^ωx^(ω+1))^(ω+1)");
        assert_eq!(c.to_string(), "u^ωu^ω(u^ωx^(ω+1))^(ω+1)x^ω");
    }

    #[test]
    fn non_monoids_are_rejected() {
        let zero_sg = FinSemigroup::from_rows(vec![vec![0, 0], vec![0, 0]]).unwrap();
        assert_eq!(
            omega_identity_check(&[zero_sg]),
            Err(CounterexampleError::NotAMonoid(0))
        );
    }

    #[test]
    fn corpus_is_deduplicated() {
        let c = self_map_corpus(2);
        // One on a single point; on two: {id}, ⟨swap⟩, ⟨c0⟩, ⟨c1⟩, ⟨c0, c1⟩
        // and the full monoid.
        assert_eq!(c.len(), 7);
        assert!(omega_identity_check(&c).unwrap().violations.is_empty());
    }
}
