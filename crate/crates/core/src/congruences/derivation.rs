//! Checkable derivations of pairs in a congruence generated by a finite
//! list of pairs of pseudowords.
//!
//! A script is a list of steps, each stating the pair it proves and the
//! rule that justifies it. Steps may only cite earlier steps. Limits are
//! handled by `limit-family` steps, which carry proofs of finitely many
//! instances of a pumped family and are validated at the first `K` of them.

#![allow(clippy::result_large_err)]

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::template::{PumpTemplate, TemplateError};
use crate::words::{KWord, Substitution};

pub type Pair = (KWord, KWord);

/// Which closure the script derives in: a fully invariant congruence also
/// admits substitution instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Invariance {
    FullyInvariant,
    Congruence,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivationScript {
    pub name: String,
    pub invariance: Invariance,
    pub generators: Vec<Pair>,
    /// Pairs that some top-level step must prove.
    #[serde(default)]
    pub claims: Vec<Pair>,
    pub steps: Vec<Step>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub proves: Pair,
    #[serde(flatten)]
    pub rule: Rule,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum Rule {
    /// `(l·σ(g₀)·r, l·σ(g₁)·r)` for the cited generator `g`.
    Generator {
        generator: usize,
        #[serde(default, skip_serializing_if = "Substitution::is_identity")]
        map: Substitution,
        #[serde(default, skip_serializing_if = "String::is_empty")]
        left: String,
        #[serde(default, skip_serializing_if = "String::is_empty")]
        right: String,
    },
    Refl,
    Sym {
        of: usize,
    },
    Trans {
        chain: Vec<usize>,
    },
    Mul {
        of: usize,
        #[serde(default, skip_serializing_if = "String::is_empty")]
        left: String,
        #[serde(default, skip_serializing_if = "String::is_empty")]
        right: String,
    },
    Subst {
        of: usize,
        map: Substitution,
    },
    /// Inside a family instance: a top-level step proved before the family.
    Outer {
        step: usize,
    },
    LimitFamily {
        left: PumpTemplate,
        right: PumpTemplate,
        instances: Vec<Instance>,
    },
}

impl Rule {
    pub fn kind(&self) -> &'static str {
        match self {
            Rule::Generator { .. } => "generator",
            Rule::Refl => "refl",
            Rule::Sym { .. } => "sym",
            Rule::Trans { .. } => "trans",
            Rule::Mul { .. } => "mul",
            Rule::Subst { .. } => "subst",
            Rule::Outer { .. } => "outer",
            Rule::LimitFamily { .. } => "limit-family",
        }
    }
}

/// A proof of `(left(k), right(k))` for one value of `k`. Its last step
/// must prove exactly that pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub k: usize,
    pub steps: Vec<Step>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DerivationError {
    #[error("step {step} cites step {target}, which is not earlier")]
    ForwardReference { step: usize, target: usize },
    #[error("step {step} cites step {target}, which failed")]
    DependsOnFailed { step: usize, target: usize },
    #[error("step {step}: generator {index} does not exist")]
    NoSuchGenerator { step: usize, index: usize },
    #[error("step {step}: substitutions are not allowed in a congruence script")]
    NotInvariant { step: usize },
    #[error("step {step}: `{right}` ends link {link} but the next starts with `{left}`")]
    EndpointMismatch {
        step: usize,
        link: usize,
        right: KWord,
        left: KWord,
    },
    #[error("step {step}: empty transitivity chain")]
    EmptyChain { step: usize },
    #[error("step {step}: multiplier `{word}` contains a reserved character")]
    BadMultiplier { step: usize, word: String },
    #[error("step {step}: claims ({}, {}) but the rule gives ({}, {})", .claimed.0, .claimed.1, .derived.0, .derived.1)]
    WrongPair {
        step: usize,
        claimed: Pair,
        derived: Pair,
    },
    #[error("step {step}: outer references are only allowed inside family instances")]
    OuterAtTopLevel { step: usize },
    #[error("step {step}: families cannot be nested")]
    NestedFamily { step: usize },
    #[error("step {step}: {found} instances given, {bound} required")]
    TooFewInstances { step: usize, found: usize, bound: usize },
    #[error("step {step}: instance parameters must be positive and strictly increasing")]
    NonIncreasing { step: usize },
    #[error("step {step}: instance k={k} does not agree with the limit on its guaranteed prefix")]
    NoConvergence { step: usize, k: usize },
    #[error("step {step}: instance k={k} ends with ({}, {}) instead of ({}, {})", .found.0, .found.1, .expected.0, .expected.1)]
    InstanceMismatch {
        step: usize,
        k: usize,
        found: Pair,
        expected: Pair,
    },
    #[error("step {step}: instance k={k}, local step {local}: {source}")]
    InInstance {
        step: usize,
        k: usize,
        local: usize,
        source: Box<DerivationError>,
    },
    #[error("step {step}: instance k={k} has no steps")]
    EmptyInstance { step: usize, k: usize },
    #[error("step {step}: {source}")]
    Template { step: usize, source: TemplateError },
    #[error("claim ({}, {}) is not proved by any step", .0.0, .0.1)]
    ClaimNotProved(Pair),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckOptions {
    /// Number of leading family instances that are checked.
    pub bound: usize,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions { bound: 8 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepStatus {
    pub index: usize,
    pub rule: String,
    pub proves: Pair,
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClaimStatus {
    pub pair: Pair,
    pub proved: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub bound: usize,
    pub steps: Vec<StepStatus>,
    pub claims: Vec<ClaimStatus>,
    pub valid: bool,
    #[serde(skip)]
    errors: Vec<DerivationError>,
}

impl CheckReport {
    pub fn failed_steps(&self) -> usize {
        self.steps.iter().filter(|s| !s.ok).count()
    }

    pub fn errors(&self) -> &[DerivationError] {
        &self.errors
    }

    /// The proved pairs, or the first error.
    pub fn into_result(self) -> Result<Vec<Pair>, DerivationError> {
        match self.errors.into_iter().next() {
            Some(e) => Err(e),
            None => Ok(self.steps.into_iter().map(|s| s.proves).collect()),
        }
    }
}

/// What a step may see: the script header, earlier pairs at its own level
/// and, inside an instance, the top-level pairs before the family.
pub(crate) struct Env<'a> {
    pub generators: &'a [Pair],
    pub invariance: Invariance,
    pub bound: usize,
    pub outer: Option<&'a [Option<Pair>]>,
}

fn cite(proved: &[Option<Pair>], step: usize, target: usize) -> Result<Pair, DerivationError> {
    if target >= step {
        return Err(DerivationError::ForwardReference { step, target });
    }
    proved[target]
        .clone()
        .ok_or(DerivationError::DependsOnFailed { step, target })
}

fn multiplier(step: usize, w: &str) -> Result<Option<KWord>, DerivationError> {
    if w.is_empty() {
        return Ok(None);
    }
    match w.parse::<KWord>() {
        Ok(x) if x.is_finite() => Ok(Some(x)),
        _ => Err(DerivationError::BadMultiplier {
            step,
            word: w.to_string(),
        }),
    }
}

fn sandwich(l: &Option<KWord>, x: &KWord, r: &Option<KWord>) -> KWord {
    let x = match l {
        Some(l) => l.multiply(x),
        None => x.clone(),
    };
    match r {
        Some(r) => x.multiply(r),
        None => x,
    }
}

/// The pair a rule yields from the earlier steps. For `refl` the stated
/// left side is reflected.
pub(crate) fn derive(
    env: &Env<'_>,
    proved: &[Option<Pair>],
    step: usize,
    stated: &Pair,
    rule: &Rule,
) -> Result<(Pair, Option<String>), DerivationError> {
    let plain = |p: Pair| Ok((p, None));
    match rule {
        Rule::Generator {
            generator,
            map,
            left,
            right,
        } => {
            let (x, y) = env
                .generators
                .get(*generator)
                .ok_or(DerivationError::NoSuchGenerator {
                    step,
                    index: *generator,
                })?;
            if !map.is_identity() && env.invariance == Invariance::Congruence {
                return Err(DerivationError::NotInvariant { step });
            }
            let (l, r) = (multiplier(step, left)?, multiplier(step, right)?);
            plain((
                sandwich(&l, &map.apply(x), &r),
                sandwich(&l, &map.apply(y), &r),
            ))
        }
        Rule::Refl => plain((stated.0.clone(), stated.0.clone())),
        Rule::Sym { of } => {
            let (x, y) = cite(proved, step, *of)?;
            plain((y, x))
        }
        Rule::Trans { chain } => {
            let (&first, rest) = chain
                .split_first()
                .ok_or(DerivationError::EmptyChain { step })?;
            let (x, mut y) = cite(proved, step, first)?;
            for (link, &next) in rest.iter().enumerate() {
                let (u, v) = cite(proved, step, next)?;
                if u != y {
                    return Err(DerivationError::EndpointMismatch {
                        step,
                        link,
                        right: y,
                        left: u,
                    });
                }
                y = v;
            }
            plain((x, y))
        }
        Rule::Mul { of, left, right } => {
            let (x, y) = cite(proved, step, *of)?;
            let (l, r) = (multiplier(step, left)?, multiplier(step, right)?);
            plain((sandwich(&l, &x, &r), sandwich(&l, &y, &r)))
        }
        Rule::Subst { of, map } => {
            if env.invariance == Invariance::Congruence {
                return Err(DerivationError::NotInvariant { step });
            }
            let (x, y) = cite(proved, step, *of)?;
            plain((map.apply(&x), map.apply(&y)))
        }
        Rule::Outer { step: target } => match env.outer {
            None => Err(DerivationError::OuterAtTopLevel { step }),
            Some(outer) => plain(cite(outer, outer.len(), *target)?),
        },
        Rule::LimitFamily {
            left,
            right,
            instances,
        } => {
            if env.outer.is_some() {
                return Err(DerivationError::NestedFamily { step });
            }
            let tpl = |source| DerivationError::Template { step, source };
            if instances.len() < env.bound {
                return Err(DerivationError::TooFewInstances {
                    step,
                    found: instances.len(),
                    bound: env.bound,
                });
            }
            let mut last_k = 0;
            for inst in &instances[..env.bound] {
                let k = inst.k;
                if k <= last_k {
                    return Err(DerivationError::NonIncreasing { step });
                }
                last_k = k;
                if !left.converges_at(k).map_err(tpl)? || !right.converges_at(k).map_err(tpl)? {
                    return Err(DerivationError::NoConvergence { step, k });
                }
                let expected = (left.eval(k).map_err(tpl)?, right.eval(k).map_err(tpl)?);
                let inner = Env {
                    outer: Some(&proved[..step]),
                    ..*env
                };
                let mut local = Vec::with_capacity(inst.steps.len());
                for (i, s) in inst.steps.iter().enumerate() {
                    let wrap = |source| DerivationError::InInstance {
                        step,
                        k,
                        local: i,
                        source: Box::new(source),
                    };
                    let (p, _) = derive(&inner, &local, i, &s.proves, &s.rule).map_err(wrap)?;
                    if p != s.proves {
                        return Err(wrap(DerivationError::WrongPair {
                            step: i,
                            claimed: s.proves.clone(),
                            derived: p,
                        }));
                    }
                    local.push(Some(p));
                }
                let found = local
                    .pop()
                    .flatten()
                    .ok_or(DerivationError::EmptyInstance { step, k })?;
                if found != expected {
                    return Err(DerivationError::InstanceMismatch {
                        step,
                        k,
                        found,
                        expected,
                    });
                }
            }
            let note = format!(
                "validated at {} instances (k = {}..{}) and exact template convergence",
                env.bound,
                instances.first().map_or(0, |i| i.k),
                last_k
            );
            Ok(((left.limit().map_err(tpl)?, right.limit().map_err(tpl)?), Some(note)))
        }
    }
}

/// Checks every step and claim. Failed steps are reported and cannot be
/// cited; checking continues past them.
pub fn check_derivation(script: &DerivationScript, options: CheckOptions) -> CheckReport {
    let env = Env {
        generators: &script.generators,
        invariance: script.invariance,
        bound: options.bound,
        outer: None,
    };
    let mut proved: Vec<Option<Pair>> = Vec::with_capacity(script.steps.len());
    let mut statuses = Vec::with_capacity(script.steps.len());
    let mut errors = Vec::new();
    for (i, s) in script.steps.iter().enumerate() {
        let outcome = derive(&env, &proved, i, &s.proves, &s.rule).and_then(|(p, note)| {
            if p == s.proves {
                Ok(note)
            } else {
                Err(DerivationError::WrongPair {
                    step: i,
                    claimed: s.proves.clone(),
                    derived: p,
                })
            }
        });
        let (ok, error, note) = match outcome {
            Ok(note) => (true, None, note),
            Err(e) => {
                let msg = e.to_string();
                errors.push(e);
                (false, Some(msg), None)
            }
        };
        proved.push(ok.then(|| s.proves.clone()));
        statuses.push(StepStatus {
            index: i,
            rule: s.rule.kind().to_string(),
            proves: s.proves.clone(),
            ok,
            error,
            note,
        });
    }
    let claims: Vec<ClaimStatus> = script
        .claims
        .iter()
        .map(|c| ClaimStatus {
            pair: c.clone(),
            proved: proved.iter().any(|p| p.as_ref() == Some(c)),
        })
        .collect();
    for c in claims.iter().filter(|c| !c.proved) {
        errors.push(DerivationError::ClaimNotProved(c.pair.clone()));
    }
    CheckReport {
        name: script.name.clone(),
        bound: options.bound,
        valid: errors.is_empty(),
        steps: statuses,
        claims,
        errors,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> KWord {
        KWord::lit(s)
    }

    fn pair(x: &str, y: &str) -> Pair {
        (w(x), w(y))
    }

    fn step(x: &str, y: &str, rule: Rule) -> Step {
        Step {
            proves: pair(x, y),
            rule,
        }
    }

    fn script(steps: Vec<Step>) -> DerivationScript {
        DerivationScript {
            name: "test".into(),
            invariance: Invariance::FullyInvariant,
            generators: vec![pair("abab(b)^w", "abb(a)^w")],
            claims: vec![],
            steps,
        }
    }

    fn gen(map: &[(char, &str)], left: &str) -> Rule {
        Rule::Generator {
            generator: 0,
            map: Substitution::parse(map),
            left: left.into(),
            right: String::new(),
        }
    }

    #[test]
    fn basic_rules_check() {
        let s = script(vec![
            step("abab(b)^w", "abb(a)^w", gen(&[], "")),
            step("abb(a)^w", "abab(b)^w", Rule::Sym { of: 0 }),
            step("(b)^w", "(b)^w", Rule::Refl),
            step("abab(b)^w", "abab(b)^w", Rule::Trans { chain: vec![0, 1] }),
            step("babab(b)^w", "babb(a)^w", Rule::Mul { of: 0, left: "b".into(), right: "aa".into() }),
            step("baba(a)^w", "baa(b)^w", Rule::Subst { of: 0, map: Substitution::parse(&[('a', "b"), ('b', "a")]) }),
            step("aabaab(b)^w", "aabb(a)^w", gen(&[('a', "aa")], "")),
        ]);
        let report = check_derivation(&s, CheckOptions::default());
        assert!(report.valid, "{:?}", report.errors());
        assert_eq!(report.into_result().unwrap().len(), 7);
    }

    #[test]
    fn trans_with_mismatched_endpoints_fails() {
        let s = script(vec![
            step("abab(b)^w", "abb(a)^w", gen(&[], "")),
            step("abab(b)^w", "abb(a)^w", Rule::Trans { chain: vec![0, 0] }),
        ]);
        let report = check_derivation(&s, CheckOptions::default());
        assert!(!report.valid);
        assert_eq!(report.failed_steps(), 1);
        assert!(matches!(
            report.into_result(),
            Err(DerivationError::EndpointMismatch { step: 1, link: 0, .. })
        ));
    }

    #[test]
    fn forward_and_failed_references() {
        let s = script(vec![
            step("abb(a)^w", "abab(b)^w", Rule::Sym { of: 1 }),
            step("abab(b)^w", "abb(b)^w", gen(&[], "")),
            step("abb(b)^w", "abab(b)^w", Rule::Sym { of: 1 }),
        ]);
        let report = check_derivation(&s, CheckOptions::default());
        let errs = report.errors();
        assert!(matches!(errs[0], DerivationError::ForwardReference { step: 0, target: 1 }));
        assert!(matches!(errs[1], DerivationError::WrongPair { step: 1, .. }));
        assert!(matches!(errs[2], DerivationError::DependsOnFailed { step: 2, target: 1 }));
    }

    #[test]
    fn congruence_scripts_reject_substitutions() {
        let mut s = script(vec![step("aabaab(b)^w", "aabb(a)^w", gen(&[('a', "aa")], ""))]);
        s.invariance = Invariance::Congruence;
        assert!(matches!(
            check_derivation(&s, CheckOptions::default()).into_result(),
            Err(DerivationError::NotInvariant { step: 0 })
        ));
    }

    /// `ab^ω ≈ (ab)^k·ab^ω` for every k from one generator instance, then
    /// the limit `ab^ω ≈ (ab)^ω`.
    fn family_script(ks: &[usize], tamper: Option<usize>) -> DerivationScript {
        let g = pair("a(b)^w", "aba(b)^w");
        let mut inst = Vec::new();
        for &k in ks {
            let mut steps = Vec::new();
            let ab_k = |k: usize| "ab".repeat(k);
            steps.push(step("a(b)^w", "aba(b)^w", Rule::Outer { step: 0 }));
            let mut chain = vec![0];
            for j in 1..k {
                steps.push(step(
                    &format!("{}a(b)^w", ab_k(j)),
                    &format!("{}a(b)^w", ab_k(j + 1)),
                    Rule::Mul { of: 0, left: ab_k(j), right: String::new() },
                ));
                chain.push(j);
            }
            let end = if Some(k) == tamper { k + 1 } else { k };
            steps.push(step(
                "a(b)^w",
                &format!("{}a(b)^w", ab_k(end)),
                Rule::Trans { chain },
            ));
            inst.push(Instance { k, steps });
        }
        DerivationScript {
            name: "family".into(),
            invariance: Invariance::Congruence,
            generators: vec![g],
            claims: vec![pair("a(b)^w", "(ab)^w")],
            steps: vec![
                step("a(b)^w", "aba(b)^w", Rule::Generator { generator: 0, map: Substitution::identity(), left: String::new(), right: String::new() }),
                step(
                    "a(b)^w",
                    "(ab)^w",
                    Rule::LimitFamily {
                        left: "a(b)^w".parse().unwrap(),
                        right: "(ab)^ka(b)^w".parse().unwrap(),
                        instances: inst,
                    },
                ),
            ],
        }
    }

    #[test]
    fn limit_families() {
        let ok = family_script(&[1, 2, 3, 4, 5, 6, 7, 8], None);
        let report = check_derivation(&ok, CheckOptions::default());
        assert!(report.valid, "{:?}", report.errors());
        assert!(report.steps[1].note.as_deref().unwrap().contains("validated at 8 instances"));

        let few = family_script(&[1, 2, 3], None);
        assert!(matches!(
            check_derivation(&few, CheckOptions::default()).errors()[0],
            DerivationError::TooFewInstances { found: 3, bound: 8, .. }
        ));
        assert!(check_derivation(&few, CheckOptions { bound: 3 }).valid);

        let unordered = family_script(&[2, 1, 3], None);
        assert!(matches!(
            check_derivation(&unordered, CheckOptions { bound: 3 }).errors()[0],
            DerivationError::NonIncreasing { .. }
        ));

        let bad = family_script(&[1, 2, 3], Some(2));
        let errs = check_derivation(&bad, CheckOptions { bound: 3 });
        assert!(matches!(errs.errors()[0], DerivationError::InInstance { k: 2, .. }));
    }

    #[test]
    fn json_round_trip() {
        let s = family_script(&[1, 2], None);
        let json = serde_json::to_string(&s).unwrap();
        assert!(json.contains(r#""rule":"limit-family""#));
        assert!(json.contains(r#""right":"(ab)^ka(b)^w""#));
        let back: DerivationScript = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
        let minimal = r#"{"name":"x","invariance":"congruence","generators":[["a(b)^w","b(a)^w"]],
            "steps":[{"proves":["a(b)^w","b(a)^w"],"rule":"generator","generator":0}]}"#;
        let s: DerivationScript = serde_json::from_str(minimal).unwrap();
        assert!(check_derivation(&s, CheckOptions::default()).valid);
    }
}
