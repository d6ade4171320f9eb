//! The ten acceptance criteria, each run at full size against its time
//! limit. Prints one PASS/FAIL line per criterion and exits nonzero if any
//! fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use profinite::cantor::kernel_crosscheck;
use profinite::congruences::scripts::shipped_scripts;
use profinite::congruences::separation::separation_experiment;
use profinite::congruences::{check_derivation, CheckOptions};
use profinite::finsgp::{commuting_omega_sweep, make_kn, power_merge};
use profinite::polish::{codec_check, mechanism_sweep, omega_identity_check, self_map_corpus, xi_check, Signature};
use profinite::unary::{adjunction_sweep, collapse_check};
use profinite::words::{Alphabet, KWord};

const SEED: u64 = 20;

struct Criterion {
    id: u8,
    title: &'static str,
    limit: Duration,
    run: fn() -> Result<String, String>,
}

fn ensure(ok: bool, detail: String) -> Result<String, String> {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn omega_commute() -> Result<String, String> {
    let mut pairs = 0;
    let mut violations = 0;
    for n in 2..=6 {
        let kn = make_kn(&Alphabet::ab(), n).map_err(|e| e.to_string())?;
        let r = commuting_omega_sweep(&kn, n).map_err(|e| e.to_string())?;
        pairs += r.pairs_examined;
        violations += r.violations.len();
    }
    ensure(violations == 0, format!("{pairs} pairs over n = 2..6, {violations} violations"))
}

fn power_merge_all() -> Result<String, String> {
    let unmerged: Vec<usize> = (2..=10)
        .filter(|&n| !power_merge(n).map(|r| r.merged).unwrap_or(false))
        .collect();
    ensure(unmerged.is_empty(), format!("a^n ~ b^n for n = 2..10, exceptions {unmerged:?}"))
}

fn cantor() -> Result<String, String> {
    let r = kernel_crosscheck(10_000, SEED);
    ensure(
        r.passed() && r.random_pairs >= 10_000,
        format!(
            "{} exhaustive words, {} random pairs, {} mismatches",
            r.exhaustive_words,
            r.random_pairs,
            r.mismatches.len()
        ),
    )
}

fn scripts() -> Result<String, String> {
    let scripts = shipped_scripts();
    let mut failed = 0;
    let mut steps = 0;
    for s in &scripts {
        let r = check_derivation(s, CheckOptions { bound: 8 });
        steps += r.steps.len();
        failed += r.failed_steps() + usize::from(!r.valid);
    }
    ensure(failed == 0, format!("{} scripts, {steps} steps, {failed} failures", scripts.len()))
}

fn separation() -> Result<String, String> {
    let r = separation_experiment(20, 12, 2, SEED);
    let pinned = [("(a)^w", "(b)^w"), ("a(b)^w", "b(a)^w")];
    let pinned_ok = pinned.iter().all(|(x, y)| {
        r.cases
            .iter()
            .any(|c| c.x == KWord::lit(x) && c.y == KWord::lit(y) && c.level.is_some())
    });
    let failures = r.failures().count();
    let deepest = r.cases.iter().filter_map(|c| c.level).max().unwrap_or(0);
    ensure(
        failures == 0 && pinned_ok && r.cases.len() == 40,
        format!("{} pairs, deepest separating level {deepest}, {failures} failures", r.cases.len()),
    )
}

fn adjunction() -> Result<String, String> {
    let r = adjunction_sweep(3);
    ensure(
        r.passed(),
        format!(
            "{} algebras x {} monoids, {} exceptions, {} iso / {} surjection failures",
            r.algebras,
            r.monoids,
            r.exceptions.len(),
            r.iso_failures,
            r.beta_failures
        ),
    )
}

fn collapse() -> Result<String, String> {
    let r = collapse_check(50, 4);
    ensure(
        r.violations.is_empty(),
        format!("{} targets, {} homomorphisms, {} violations", r.targets, r.homomorphisms, r.violations.len()),
    )
}

fn codec() -> Result<String, String> {
    let r = codec_check(10_000, 8, 4, SEED);
    ensure(
        r.passed(),
        format!(
            "{} random terms, {} exhaustive, errors seen {}/{}/{}",
            r.random_terms, r.exhaustive_terms, r.truncated, r.trailing, r.unknown
        ),
    )
}

fn counterexample() -> Result<String, String> {
    let xi = xi_check(8, &[2, 3]).map_err(|e| e.to_string())?;
    let omega = omega_identity_check(&self_map_corpus(3)).map_err(|e| e.to_string())?;
    ensure(
        xi.violations == 0 && omega.violations.is_empty(),
        format!(
            "{} term cases, {} monoids / {} pairs, {} + {} violations",
            xi.cases.len(),
            omega.monoids,
            omega.pairs,
            xi.violations,
            omega.violations.len()
        ),
    )
}

fn unary_mechanism() -> Result<String, String> {
    let sig = Signature::from_pairs(&[("u", 1), ("v", 1), ("c", 0)]).map_err(|e| e.to_string())?;
    let r = mechanism_sweep(&sig, &["x", "y"], 3, 1000, 6, SEED).map_err(|e| e.to_string())?;
    ensure(
        r.passed(),
        format!(
            "{} algebras, {} checks, {} monoid / {} commutation failures",
            r.algebras, r.checks, r.monoid_failures, r.commutation_failures
        ),
    )
}

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let criteria = [
        Criterion { id: 1, title: "commuting ω-powers force nilpotency in K_2..K_6", limit: secs(60), run: omega_commute },
        Criterion { id: 2, title: "a^n and b^n merge modulo (ab^ω, ba^ω) in K_2..K_10", limit: secs(120), run: power_merge_all },
        Criterion { id: 3, title: "Cantor kernel equals θ₃", limit: secs(10), run: cantor },
        Criterion { id: 4, title: "shipped derivation scripts check with 8 instances", limit: secs(5), run: scripts },
        Criterion { id: 5, title: "K_n quotients separate exactly the non-θ₄ pairs, n ≤ 12", limit: secs(600), run: separation },
        Criterion { id: 6, title: "unary adjunction on all 1-generated algebras, ≤ 3 points", limit: secs(60), run: adjunction },
        Criterion { id: 7, title: "countdown homomorphisms collapse, N = 50, ≤ 4 points", limit: secs(30), run: collapse },
        Criterion { id: 8, title: "Polish codec round trips and unique readability", limit: secs(5), run: codec },
        Criterion { id: 9, title: "t_k, s_k split by the two-point algebra; ω-identity holds", limit: secs(60), run: counterexample },
        Criterion { id: 10, title: "separating monoids realize unary term values", limit: secs(60), run: unary_mechanism },
    ];
    let mut all_ok = true;
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let in_time = elapsed <= c.limit;
        let (ok, detail) = match outcome {
            Ok(d) => (in_time, d),
            Err(d) => (false, d),
        };
        all_ok &= ok;
        println!(
            "{} {:>2}. {}: {} [{:.2} s, limit {} s{}]",
            if ok { "PASS" } else { "FAIL" },
            c.id,
            c.title,
            detail,
            elapsed.as_secs_f64(),
            c.limit.as_secs(),
            if in_time { "" } else { ", over time" }
        );
    }
    if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
