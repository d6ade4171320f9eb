use std::path::Path;

use anyhow::{bail, Context, Result};
use serde_json::{json, Value};

use profinite::cantor::kernel_crosscheck;
use profinite::congruences::scripts::shipped_scripts;
use profinite::congruences::separation::separation_experiment;
use profinite::congruences::{check_derivation, theta3_equiv, theta4_equiv, CheckOptions, DerivationScript};
use profinite::finsgp::{commuting_omega_sweep, make_kn, power_merge};
use profinite::polish::{
    all_unary_algebras, codec_check, mechanism_sweep, omega_identity_check, random_terms, self_map_corpus,
    verify_unary_separation, xi_check, Signature,
};
use profinite::unary::{adjunction_sweep, collapse_check, countdown_tower, truncation_tower, tower_check};
use profinite::words::{Alphabet, KWord};

use crate::report::ExperimentConfig;

/// Numeric flags as given on the command line.
#[derive(Debug, Clone, Default)]
pub struct Flags {
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub points: Option<usize>,
    pub samples: Option<usize>,
    pub depth: Option<usize>,
    pub seed: Option<u64>,
}

pub struct Outcome {
    pub stats: Value,
    pub violations: Vec<Value>,
}

impl Outcome {
    fn new(stats: Value, violations: Vec<Value>) -> Self {
        Outcome { stats, violations }
    }
}

/// Marks errors that should exit with the usage status.
#[derive(Debug)]
pub struct Usage(pub String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

macro_rules! usage {
    ($($t:tt)*) => { return Err(Usage(format!($($t)*)).into()) };
}

/// Resolves flags against what a command accepts, recording the effective
/// values in the config.
struct Params<'a> {
    flags: &'a Flags,
    config: &'a mut ExperimentConfig,
}

impl Params<'_> {
    fn reject_others(&self, allowed: &[&str]) -> Result<()> {
        let given = [
            ("n", self.flags.n.is_some()),
            ("k", self.flags.k.is_some()),
            ("points", self.flags.points.is_some()),
            ("samples", self.flags.samples.is_some()),
            ("depth", self.flags.depth.is_some()),
            ("seed", self.flags.seed.is_some()),
        ];
        if let Some((name, _)) = given.iter().find(|(name, set)| *set && !allowed.contains(name)) {
            usage!("`{}` does not take --{name}", self.config.command);
        }
        Ok(())
    }

    fn bounded(value: Option<usize>, default: usize, lo: usize, hi: usize, name: &str) -> Result<usize> {
        let v = value.unwrap_or(default);
        if !(lo..=hi).contains(&v) {
            usage!("--{name} must lie in {lo}..={hi}, got {v}");
        }
        Ok(v)
    }

    fn n(&mut self, default: usize, lo: usize, hi: usize) -> Result<usize> {
        let v = Self::bounded(self.flags.n, default, lo, hi, "n")?;
        self.config.n = Some(v);
        Ok(v)
    }

    fn k(&mut self, default: usize, lo: usize, hi: usize) -> Result<usize> {
        let v = Self::bounded(self.flags.k, default, lo, hi, "k")?;
        self.config.k = Some(v);
        Ok(v)
    }

    fn points(&mut self, default: usize, hi: usize) -> Result<usize> {
        let v = Self::bounded(self.flags.points, default, 1, hi, "points")?;
        self.config.points = Some(v);
        Ok(v)
    }

    fn samples(&mut self, default: usize, hi: usize) -> Result<usize> {
        let v = Self::bounded(self.flags.samples, default, 1, hi, "samples")?;
        self.config.samples = Some(v);
        Ok(v)
    }

    fn depth(&mut self, default: usize, lo: usize, hi: usize) -> Result<usize> {
        let v = Self::bounded(self.flags.depth, default, lo, hi, "depth")?;
        self.config.depth = Some(v);
        Ok(v)
    }

    fn seed(&mut self, default: u64) -> u64 {
        let v = self.flags.seed.unwrap_or(default);
        self.config.seed = Some(v);
        v
    }
}

fn to_json<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn parse_word(s: &str) -> Result<KWord> {
    match s.parse::<KWord>() {
        Ok(w) => Ok(w),
        Err(e) => usage!("cannot parse `{s}`: {e}"),
    }
}

pub fn omega_commute(flags: &Flags, config: &mut ExperimentConfig) -> Result<Outcome> {
    let mut p = Params { flags, config };
    p.reject_others(&["n"])?;
    let n_max = p.n(6, 2, 8)?;
    let mut levels = Vec::new();
    let mut violations = Vec::new();
    for n in 2..=n_max {
        let kn = make_kn(&Alphabet::ab(), n)?;
        let r = commuting_omega_sweep(&kn, n)?;
        levels.push(json!({
            "n": n,
            "order": r.order,
            "pairs": r.pairs_examined,
            "hypothesis_pairs": r.hypothesis_pairs.len(),
        }));
        violations.extend(r.violations.iter().map(|v| json!({"n": n, "violation": to_json(v)})));
    }
    Ok(Outcome::new(json!({ "levels": levels }), violations))
}

pub fn power_merge_cmd(flags: &Flags, config: &mut ExperimentConfig) -> Result<Outcome> {
    let mut p = Params { flags, config };
    p.reject_others(&["n"])?;
    let n_max = p.n(10, 2, 14)?;
    let mut levels = Vec::new();
    let mut violations = Vec::new();
    for n in 2..=n_max {
        let r = power_merge(n)?;
        if !r.merged {
            violations.push(json!({"n": n, "reason": "a^n and b^n stay apart"}));
        }
        levels.push(to_json(&r));
    }
    Ok(Outcome::new(json!({ "levels": levels }), violations))
}

pub fn theta(which: u8, x: &str, y: &str, flags: &Flags, config: &mut ExperimentConfig) -> Result<Outcome> {
    Params { flags, config }.reject_others(&[])?;
    config.inputs = vec![x.to_string(), y.to_string()];
    let (wx, wy) = (parse_word(x)?, parse_word(y)?);
    let equivalent = match which {
        3 => theta3_equiv(&wx, &wy),
        _ => theta4_equiv(&wx, &wy),
    };
    let equivalent = match equivalent {
        Ok(b) => b,
        Err(e) => usage!("{e}"),
    };
    let stats = json!({ "x": wx.to_string(), "y": wy.to_string(), "equivalent": equivalent });
    let violations = if equivalent {
        Vec::new()
    } else {
        vec![json!({ "reason": "not equivalent" })]
    };
    Ok(Outcome::new(stats, violations))
}

pub fn cantor_kernel(flags: &Flags, config: &mut ExperimentConfig) -> Result<Outcome> {
    let mut p = Params { flags, config };
    p.reject_others(&["samples", "seed"])?;
    let samples = p.samples(10_000, 10_000_000)?;
    let seed = p.seed(7);
    let r = kernel_crosscheck(samples, seed);
    let stats = json!({
        "exhaustive_words": r.exhaustive_words,
        "exhaustive_pairs": r.exhaustive_pairs,
        "random_pairs": r.random_pairs,
        "adversarial_pairs": r.adversarial_pairs,
        "related_pairs": r.related_pairs,
    });
    Ok(Outcome::new(stats, r.mismatches.iter().map(to_json).collect()))
}

pub fn check_derivation_cmd(file: &Path, flags: &Flags, config: &mut ExperimentConfig) -> Result<Outcome> {
    let mut p = Params { flags, config };
    p.reject_others(&["k"])?;
    let bound = p.k(8, 1, 64)?;
    config.inputs = vec![file.display().to_string()];
    let text = match std::fs::read_to_string(file) {
        Ok(t) => t,
        Err(e) => usage!("cannot read {}: {e}", file.display()),
    };
    let script: DerivationScript = match serde_json::from_str(&text) {
        Ok(s) => s,
        Err(e) => usage!("{} is not a derivation script: {e}", file.display()),
    };
    let r = check_derivation(&script, CheckOptions { bound });
    let mut violations: Vec<Value> = r
        .steps
        .iter()
        .filter(|s| !s.ok)
        .map(|s| json!({"step": s.index, "rule": s.rule, "error": s.error}))
        .collect();
    violations.extend(
        r.claims
            .iter()
            .filter(|c| !c.proved)
            .map(|c| json!({"unproved_claim": to_json(&c.pair)})),
    );
    let stats = json!({
        "name": r.name,
        "steps": r.steps.len(),
        "failed_steps": r.failed_steps(),
        "claims": r.claims.len(),
        "valid": r.valid,
    });
    Ok(Outcome::new(stats, violations))
}

pub fn separation(flags: &Flags, config: &mut ExperimentConfig) -> Result<Outcome> {
    let mut p = Params { flags, config };
    p.reject_others(&["n", "samples", "depth", "seed"])?;
    let n_max = p.n(12, 1, 14)?;
    let count = p.samples(20, 1000)?;
    let depth = p.depth(2, 0, 3)?;
    let seed = p.seed(1);
    let r = separation_experiment(count, n_max, depth, seed);
    let levels: Vec<Value> = r
        .cases
        .iter()
        .filter(|c| !c.equivalent)
        .map(|c| json!(c.level))
        .collect();
    let stats = json!({
        "classes": r.classes,
        "separated_pairs": r.cases.iter().filter(|c| !c.equivalent).count(),
        "equivalent_pairs": r.cases.iter().filter(|c| c.equivalent).count(),
        "separating_levels": levels,
    });
    Ok(Outcome::new(stats, r.failures().map(to_json).collect()))
}

pub fn adjunction(flags: &Flags, config: &mut ExperimentConfig) -> Result<Outcome> {
    let mut p = Params { flags, config };
    p.reject_others(&["points"])?;
    let points = p.points(3, 3)?;
    let r = adjunction_sweep(points);
    let mut violations: Vec<Value> = r.exceptions.iter().map(to_json).collect();
    if r.iso_failures > 0 {
        violations.push(json!({"iso_failures": r.iso_failures}));
    }
    if r.beta_failures > 0 {
        violations.push(json!({"beta_failures": r.beta_failures}));
    }
    let stats = json!({
        "algebras": r.algebras,
        "monoids": r.monoids,
        "pairs": r.pairs,
        "homs_found": r.homs_found,
    });
    Ok(Outcome::new(stats, violations))
}

pub fn collapse(flags: &Flags, config: &mut ExperimentConfig) -> Result<Outcome> {
    let mut p = Params { flags, config };
    p.reject_others(&["n", "points"])?;
    let n = p.n(50, 1, 10_000)?;
    let points = p.points(4, 5)?;
    let r = collapse_check(n, points);
    let stats = json!({ "targets": r.targets, "homomorphisms": r.homomorphisms });
    Ok(Outcome::new(stats, r.violations.iter().map(to_json).collect()))
}

pub fn tower(flags: &Flags, config: &mut ExperimentConfig) -> Result<Outcome> {
    let mut p = Params { flags, config };
    p.reject_others(&["n"])?;
    let top = p.n(5, 3, 6)?;
    let mut stats = serde_json::Map::new();
    let mut violations = Vec::new();
    let towers = [
        ("truncation", truncation_tower(&Alphabet::ab(), top, 2)?),
        ("countdown", countdown_tower(top, 2)),
    ];
    for (name, t) in towers {
        match tower_check(&t) {
            Ok(r) => {
                stats.insert(name.into(), to_json(&r));
            }
            Err(e) => violations.push(json!({"tower": name, "error": e.to_string()})),
        }
    }
    Ok(Outcome::new(Value::Object(stats), violations))
}

pub fn polish_roundtrip(flags: &Flags, config: &mut ExperimentConfig) -> Result<Outcome> {
    let mut p = Params { flags, config };
    p.reject_others(&["samples", "depth", "seed"])?;
    let samples = p.samples(10_000, 1_000_000)?;
    let depth = p.depth(8, 0, 10)?;
    let seed = p.seed(1);
    let r = codec_check(samples, depth, 4, seed);
    let mut violations = Vec::new();
    if !r.passed() {
        violations.push(to_json(&r));
    }
    Ok(Outcome::new(to_json(&r), violations))
}

pub fn polish_counterexample(flags: &Flags, config: &mut ExperimentConfig) -> Result<Outcome> {
    let mut p = Params { flags, config };
    p.reject_others(&["k", "n"])?;
    let k = p.k(8, 1, 12)?;
    let n_max = p.n(3, 2, 5)?;
    let arities: Vec<usize> = (2..=n_max).collect();
    let r = xi_check(k, &arities)?;
    let violations = r
        .cases
        .iter()
        .filter(|c| !c.encoding_matches || c.xi_t != "a" || c.xi_s != "b")
        .map(to_json)
        .collect();
    let stats = json!({ "cases": r.cases.len(), "arities": arities });
    Ok(Outcome::new(stats, violations))
}

pub fn omega_identity(flags: &Flags, config: &mut ExperimentConfig) -> Result<Outcome> {
    let mut p = Params { flags, config };
    p.reject_others(&["points"])?;
    let points = p.points(3, 3)?;
    let corpus = self_map_corpus(points);
    let r = omega_identity_check(&corpus)?;
    let stats = json!({ "monoids": r.monoids, "pairs": r.pairs });
    Ok(Outcome::new(stats, r.violations.iter().map(to_json).collect()))
}

pub fn unary_separation(flags: &Flags, config: &mut ExperimentConfig) -> Result<Outcome> {
    let mut p = Params { flags, config };
    p.reject_others(&["points", "samples", "depth", "seed"])?;
    let points = p.points(3, 3)?;
    let samples = p.samples(1000, 100_000)?;
    let depth = p.depth(6, 0, 12)?;
    let seed = p.seed(1);
    let sig = Signature::from_pairs(&[("u", 1), ("v", 1), ("c", 0)])?;
    let vars = ["x", "y"];
    let mech = mechanism_sweep(&sig, &vars, points, samples, depth, seed)?;
    let terms = random_terms(&sig, &vars, depth, 20 * samples, seed.wrapping_add(1));
    let pairs: Vec<_> = terms.chunks(2).map(|c| (c[0].clone(), c[1].clone())).collect();
    let sep = verify_unary_separation(&sig, &pairs, &all_unary_algebras(&sig, points))?;
    let mut violations: Vec<Value> = sep
        .violations
        .iter()
        .map(|(a, b)| json!({"pair": [a, b], "reason": "polish images agree"}))
        .collect();
    if !mech.passed() {
        violations.push(to_json(&mech));
    }
    let stats = json!({ "mechanism": to_json(&mech), "pairs": to_json(&sep) });
    Ok(Outcome::new(stats, violations))
}

/// Writes each shipped script to `<dir>/<name>.json`.
pub fn export_scripts(dir: &Path, flags: &Flags, config: &mut ExperimentConfig) -> Result<Outcome> {
    Params { flags, config }.reject_others(&[])?;
    config.inputs = vec![dir.display().to_string()];
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut written = Vec::new();
    for script in shipped_scripts() {
        let path = dir.join(format!("{}.json", script.name));
        let mut text = serde_json::to_string_pretty(&script)?;
        text.push('\n');
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        written.push(format!("{}.json", script.name));
    }
    if written.is_empty() {
        bail!("no scripts to export");
    }
    Ok(Outcome::new(json!({ "written": written }), Vec::new()))
}
