use std::collections::{BTreeMap, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{all_unary_algebras, encode, evaluate, is_variable, random_term, EvalError, FiniteAlgebra, PolishWord, Signature, Term};
use crate::finsgp::{FinSemigroup, Semigroup, SemigroupError};
use crate::unary::all_maps;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeparationError {
    #[error("operation `{0}` is not unary or constant")]
    NotUnary(String),
    #[error(transparent)]
    Table(#[from] SemigroupError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// All self-maps of `F`, then the points of `F`, a zero, and an adjoined
/// identity. Maps compose, a map applied to a point gives a point, and
/// every other product is zero.
///
/// The extra identity is needed: with `s·g = 0` for every map `g`, no
/// element of the other three parts can act as an identity, not even the
/// identity map.
#[derive(Debug, Clone)]
pub struct SeparatingMonoid {
    algebra: FiniteAlgebra,
    maps: usize,
    monoid: FinSemigroup,
    identity: usize,
}

impl SeparatingMonoid {
    pub fn monoid(&self) -> &FinSemigroup {
        &self.monoid
    }

    pub fn algebra(&self) -> &FiniteAlgebra {
        &self.algebra
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn order(&self) -> usize {
        self.monoid.order()
    }

    pub fn map_index(&self, images: &[usize]) -> usize {
        let n = self.algebra.size();
        images.iter().fold(0, |acc, &y| acc * n + y)
    }

    pub fn point(&self, s: usize) -> usize {
        self.maps + s
    }

    pub fn zero(&self) -> usize {
        self.maps + self.algebra.size()
    }

    pub fn is_point(&self, x: usize) -> bool {
        (self.maps..self.zero()).contains(&x)
    }

    pub fn mul(&self, x: usize, y: usize) -> usize {
        self.monoid.mul(x, y)
    }
}

pub fn separating_monoid(f: &FiniteAlgebra) -> Result<SeparatingMonoid, SeparationError> {
    if let Some((name, _)) = f.ops().find(|(_, op)| op.arity > 1) {
        return Err(SeparationError::NotUnary(name.to_string()));
    }
    let n = f.size();
    let maps = all_maps(n);
    let m = maps.len();
    let index = |g: &[usize]| g.iter().fold(0, |acc, &y| acc * n + y);
    let zero = m + n;
    let identity = zero + 1;
    let mul = |x: usize, y: usize| -> usize {
        if x == identity {
            return y;
        }
        if y == identity {
            return x;
        }
        match (x < m, y < m, y < zero) {
            (true, true, _) => index(&maps[y].iter().map(|&s| maps[x][s]).collect::<Vec<_>>()),
            (true, false, true) => m + maps[x][y - m],
            _ => zero,
        }
    };
    let rows = (0..=identity).map(|x| (0..=identity).map(|y| mul(x, y)).collect()).collect();
    let mut names: Vec<String> = maps.iter().map(|g| format!("{g:?}")).collect();
    names.extend(f.elements().iter().map(|e| format!("@{e}")));
    names.push("0".into());
    names.push("1".into());
    let monoid = FinSemigroup::new(names, rows)?;
    debug_assert_eq!(monoid.identity(), Some(identity));
    Ok(SeparatingMonoid {
        algebra: f.clone(),
        maps: m,
        monoid,
        identity,
    })
}

/// The product, in the separating monoid, of the token images: variables
/// go to their assigned points, constants to their values, unary symbols
/// to their self-maps.
pub fn polish_image(
    m: &SeparatingMonoid,
    word: &PolishWord,
    assignment: &BTreeMap<String, usize>,
) -> Result<usize, SeparationError> {
    let f = m.algebra();
    word.tokens().iter().try_fold(m.identity(), |acc, tok| {
        let image = if is_variable(tok) {
            m.point(*assignment.get(tok).ok_or_else(|| EvalError::Unassigned(tok.clone()))?)
        } else {
            let op = f.op(tok).ok_or_else(|| EvalError::UnknownSymbol(tok.clone()))?;
            match op.arity {
                0 => m.point(op.table[0]),
                1 => m.map_index(&op.table),
                _ => return Err(SeparationError::NotUnary(tok.clone())),
            }
        };
        Ok(m.mul(acc, image))
    })
}

/// `ψ̂(encode(t)) = φ(t)` for one term, one algebra and one assignment.
fn commutes(m: &SeparatingMonoid, t: &Term, w: &PolishWord, env: &BTreeMap<String, usize>) -> Result<bool, SeparationError> {
    let value = evaluate(t, m.algebra(), env)?;
    Ok(polish_image(m, w, env)? == m.point(value))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnarySeparationReport {
    pub pairs: usize,
    pub identical: usize,
    /// Distinct pairs told apart by some algebra in the corpus.
    pub separated: usize,
    pub polish_separated: usize,
    pub violations: Vec<(String, String)>,
}

fn assignments(vars: &[String], size: usize) -> Vec<BTreeMap<String, usize>> {
    let mut out = vec![BTreeMap::new()];
    for v in vars {
        out = out
            .into_iter()
            .flat_map(|env| {
                (0..size).map(move |s| {
                    let mut env = env.clone();
                    env.insert(v.clone(), s);
                    env
                })
            })
            .collect();
    }
    out
}

/// For each pair of distinct terms split by some algebra of `corpus`, the
/// polish images in that algebra's separating monoid equal the term values
/// and so differ too.
pub fn verify_unary_separation(
    sig: &Signature,
    pairs: &[(Term, Term)],
    corpus: &[FiniteAlgebra],
) -> Result<UnarySeparationReport, SeparationError> {
    if let Some((name, _)) = sig.symbols().find(|&(_, n)| n > 1) {
        return Err(SeparationError::NotUnary(name.to_string()));
    }
    let mut monoids: HashMap<usize, SeparatingMonoid> = HashMap::new();
    let mut report = UnarySeparationReport {
        pairs: pairs.len(),
        identical: 0,
        separated: 0,
        polish_separated: 0,
        violations: Vec::new(),
    };
    for (t, t2) in pairs {
        if t == t2 {
            report.identical += 1;
            continue;
        }
        let vars: Vec<String> = t.variables().union(&t2.variables()).cloned().collect();
        let witness = corpus.iter().enumerate().find_map(|(i, f)| {
            assignments(&vars, f.size()).into_iter().find_map(|env| {
                let a = evaluate(t, f, &env).ok()?;
                let b = evaluate(t2, f, &env).ok()?;
                (a != b).then_some((i, env))
            })
        });
        let Some((i, env)) = witness else { continue };
        report.separated += 1;
        let m = match monoids.entry(i) {
            std::collections::hash_map::Entry::Occupied(e) => e.into_mut(),
            std::collections::hash_map::Entry::Vacant(e) => e.insert(separating_monoid(&corpus[i])?),
        };
        let (w, w2) = (encode(t), encode(t2));
        let ok = commutes(m, t, &w, &env)? && commutes(m, t2, &w2, &env)?;
        let apart = polish_image(m, &w, &env)? != polish_image(m, &w2, &env)?;
        if ok && apart {
            report.polish_separated += 1;
        } else {
            report.violations.push((t.to_string(), t2.to_string()));
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MechanismReport {
    pub algebras: usize,
    pub terms: usize,
    pub checks: usize,
    /// Algebras whose separating monoid failed to build.
    pub monoid_failures: usize,
    pub commutation_failures: usize,
}

impl MechanismReport {
    pub fn passed(&self) -> bool {
        self.monoid_failures == 0 && self.commutation_failures == 0
    }
}

/// Every algebra over `sig` on at most `max_points` points: its separating
/// monoid builds, and `ψ̂ ∘ encode = φ` on `terms` seeded random terms,
/// each under a random assignment.
pub fn mechanism_sweep(
    sig: &Signature,
    vars: &[&str],
    max_points: usize,
    terms: usize,
    max_depth: usize,
    seed: u64,
) -> Result<MechanismReport, SeparationError> {
    if let Some((name, _)) = sig.symbols().find(|&(_, n)| n > 1) {
        return Err(SeparationError::NotUnary(name.to_string()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let corpus: Vec<(Term, PolishWord)> = (0..terms)
        .map(|_| {
            let t = random_term(sig, vars, max_depth, &mut rng);
            let w = encode(&t);
            (t, w)
        })
        .collect();
    let algebras = all_unary_algebras(sig, max_points);
    let mut report = MechanismReport {
        algebras: algebras.len(),
        terms,
        checks: 0,
        monoid_failures: 0,
        commutation_failures: 0,
    };
    for f in &algebras {
        let Ok(m) = separating_monoid(f) else {
            report.monoid_failures += 1;
            continue;
        };
        for (t, w) in &corpus {
            let env = vars.iter().map(|x| (x.to_string(), rng.gen_range(0..f.size()))).collect();
            report.checks += 1;
            if !commutes(&m, t, w, &env)? {
                report.commutation_failures += 1;
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polish::Operation;

    fn flip() -> FiniteAlgebra {
        let ops = BTreeMap::from([("u".to_string(), Operation { arity: 1, table: vec![1, 0] })]);
        FiniteAlgebra::new(vec!["0".into(), "1".into()], ops).unwrap()
    }

    #[test]
    fn two_point_monoid_has_seven_elements() {
        let m = separating_monoid(&flip()).unwrap();
        assert_eq!(m.order(), 4 + 2 + 1 + 1);
        assert_eq!(m.monoid().identity(), Some(m.identity()));
        let swap = m.map_index(&[1, 0]);
        let c0 = m.map_index(&[0, 0]);
        let s = m.point(1);
        assert_eq!(m.mul(swap, m.mul(c0, s)), m.mul(m.mul(swap, c0), s));
        assert_eq!(m.mul(swap, s), m.point(0));
        for g in [swap, c0, m.map_index(&[0, 1])] {
            assert_eq!(m.mul(s, g), m.zero());
        }
        assert_eq!(m.mul(s, m.point(0)), m.zero());
    }

    #[test]
    fn flip_separates_ux_from_x() {
        let f = flip();
        let m = separating_monoid(&f).unwrap();
        let env = BTreeMap::from([("x".to_string(), 0)]);
        let ux = Term::app("u", vec![Term::var("x")]);
        assert_eq!(polish_image(&m, &encode(&ux), &env).unwrap(), m.point(1));
        assert_eq!(polish_image(&m, &encode(&Term::var("x")), &env).unwrap(), m.point(0));

        let sig = Signature::from_pairs(&[("u", 1)]).unwrap();
        let pairs = [(ux.clone(), Term::var("x")), (ux.clone(), ux)];
        let r = verify_unary_separation(&sig, &pairs, &[f]).unwrap();
        assert_eq!((r.identical, r.separated, r.polish_separated), (1, 1, 1));
    }

    #[test]
    fn binary_symbols_are_rejected() {
        let sig = Signature::from_pairs(&[("u", 2)]).unwrap();
        let f = crate::polish::two_point_algebra(&sig, 2);
        assert!(matches!(separating_monoid(&f), Err(SeparationError::NotUnary(_))));
        assert!(verify_unary_separation(&sig, &[], &[]).is_err());
    }

    #[test]
    fn small_mechanism_sweep() {
        let sig = Signature::from_pairs(&[("u", 1), ("v", 1), ("c", 0)]).unwrap();
        let r = mechanism_sweep(&sig, &["x", "y"], 2, 50, 6, 3).unwrap();
        assert_eq!(r.algebras, 1 + 4 * 4 * 2);
        assert!(r.passed());
        assert_eq!(r.checks, r.algebras * 50);
    }
}
