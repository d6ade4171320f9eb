//! Builders for the shipped derivation scripts over {a,b}.
//!
//! The defining pairs are `G_m = (ab^m·ab^ω, ab^{m+1}·a^ω)` for `m ≥ 1`.
//! Each builder states its pairs by running the same rule evaluation the
//! checker uses, so a builder bug shows up as a panic here and a corrupted
//! file shows up in the checker.

use super::derivation::{derive, DerivationScript, Env, Instance, Invariance, Pair, Rule, Step};
use super::template::PumpTemplate;
use crate::words::{KWord, Substitution};

/// Number of instances the builders emit per family.
pub const INSTANCES: usize = 8;

/// The pair `(ab^m·ab^ω, ab^{m+1}·a^ω)`.
pub fn defining_pair(m: usize) -> Pair {
    let b = "b".repeat(m);
    (
        KWord::lit(&format!("a{b}a(b)^w")),
        KWord::lit(&format!("a{b}b(a)^w")),
    )
}

type Ref = usize;

struct Builder {
    generators: Vec<Pair>,
    /// `Some(m)` when generator `i` is `G_m`.
    families: Vec<Option<usize>>,
    steps: Vec<Step>,
    /// Top-level pairs visible to a family instance under construction.
    outer: Option<Vec<Option<Pair>>>,
}

fn sub(map: &[(char, &str)]) -> Substitution {
    Substitution::parse(map)
}

fn swap() -> Substitution {
    sub(&[('a', "b"), ('b', "a")])
}

impl Builder {
    fn new() -> Self {
        Builder {
            generators: Vec::new(),
            families: Vec::new(),
            steps: Vec::new(),
            outer: None,
        }
    }

    fn child(&self) -> Self {
        Builder {
            generators: self.generators.clone(),
            families: self.families.clone(),
            steps: Vec::new(),
            outer: Some(self.steps.iter().map(|s| Some(s.proves.clone())).collect()),
        }
    }

    fn pair(&self, r: Ref) -> &Pair {
        &self.steps[r].proves
    }

    fn push(&mut self, rule: Rule) -> Ref {
        let proved: Vec<Option<Pair>> = self.steps.iter().map(|s| Some(s.proves.clone())).collect();
        let env = Env {
            generators: &self.generators,
            invariance: Invariance::FullyInvariant,
            bound: INSTANCES,
            outer: self.outer.as_deref(),
        };
        let dummy = (KWord::letter('a'), KWord::letter('a'));
        let ((x, y), _) = derive(&env, &proved, self.steps.len(), &dummy, &rule)
            .unwrap_or_else(|e| panic!("builder produced an invalid step: {e}"));
        self.steps.push(Step { proves: (x, y), rule });
        self.steps.len() - 1
    }

    fn g_index(&mut self, m: usize) -> usize {
        if let Some(i) = self.families.iter().position(|&f| f == Some(m)) {
            return i;
        }
        self.generators.push(defining_pair(m));
        self.families.push(Some(m));
        self.generators.len() - 1
    }

    fn add_generator(&mut self, p: Pair) -> usize {
        self.generators.push(p);
        self.families.push(None);
        self.generators.len() - 1
    }

    fn gen_raw(&mut self, generator: usize, map: Substitution, left: &str) -> Ref {
        self.push(Rule::Generator {
            generator,
            map,
            left: left.into(),
            right: String::new(),
        })
    }

    fn gen(&mut self, m: usize, map: Substitution, left: &str) -> Ref {
        let g = self.g_index(m);
        self.gen_raw(g, map, left)
    }

    fn sym(&mut self, of: Ref) -> Ref {
        self.push(Rule::Sym { of })
    }

    fn trans(&mut self, chain: &[Ref]) -> Ref {
        if chain.len() == 1 {
            return chain[0];
        }
        self.push(Rule::Trans { chain: chain.to_vec() })
    }

    fn mul(&mut self, of: Ref, left: &str) -> Ref {
        if left.is_empty() {
            return of;
        }
        self.push(Rule::Mul {
            of,
            left: left.into(),
            right: String::new(),
        })
    }

    fn subst(&mut self, of: Ref, map: Substitution) -> Ref {
        self.push(Rule::Subst { of, map })
    }

    fn outer(&mut self, step: Ref) -> Ref {
        self.push(Rule::Outer { step })
    }

    /// A family over `ks`; `instance` builds the proof for one `k` in a
    /// child builder and returns its final step.
    fn family(
        &mut self,
        left: &str,
        right: &str,
        ks: &[usize],
        mut instance: impl FnMut(&mut Builder, usize) -> Ref,
    ) -> Ref {
        let mut instances = Vec::new();
        for &k in ks {
            let mut child = self.child();
            let last = instance(&mut child, k);
            assert_eq!(last, child.steps.len() - 1, "instance must end with its result");
            // Instances may register generators on the fly.
            self.generators = child.generators.clone();
            self.families = child.families.clone();
            instances.push(Instance { k, steps: child.steps });
        }
        self.push(Rule::LimitFamily {
            left: left.parse::<PumpTemplate>().expect("left template"),
            right: right.parse::<PumpTemplate>().expect("right template"),
            instances,
        })
    }

    /// Iterates a pair `(x, u·x)` into `(x, u^k·x)` for one `k`, inside an
    /// instance whose outer step `base` proves `(x, u·x)`.
    fn iterate(&mut self, base: Ref, u: &str, k: usize) -> Ref {
        let b = self.outer(base);
        let mut acc = b;
        for j in 1..k {
            let m = self.mul(b, &u.repeat(j));
            acc = self.trans(&[acc, m]);
        }
        acc
    }

    fn finish(self, name: &str, claims: Vec<Pair>) -> DerivationScript {
        DerivationScript {
            name: name.into(),
            invariance: Invariance::FullyInvariant,
            generators: self.generators,
            claims,
            steps: self.steps,
        }
    }

    fn claim(&self, r: Ref) -> Pair {
        self.pair(r).clone()
    }
}

fn ks() -> Vec<usize> {
    (1..=INSTANCES).collect()
}

/// `(ab^n·a^ω, ab^ω)` for `n ≥ 3`.
fn b_power_before_a_tail(b: &mut Builder, n: usize) -> Ref {
    assert!(n >= 3);
    // ab^m·a^ω ≈ ab^{m-1}·ab^ω ≈ ab^{2(m-1)}·a^ω, the second by G_1 under
    // b ↦ b^{m-1}.
    let mut exponents = vec![n];
    let mut cumulative = Vec::new();
    let mut acc: Option<Ref> = None;
    for _ in 0..INSTANCES {
        let m = *exponents.last().unwrap();
        let back = b.gen(m - 1, Substitution::identity(), "");
        let back = b.sym(back);
        let stretch = b.gen(1, sub(&[('b', &"b".repeat(m - 1))]), "");
        let e = b.trans(&[back, stretch]);
        let c = match acc {
            None => e,
            Some(prev) => b.trans(&[prev, e]),
        };
        acc = Some(c);
        cumulative.push(c);
        exponents.push(2 * (m - 1));
    }
    let left = format!("a{}(a)^w", "b".repeat(n));
    let ks: Vec<usize> = exponents[1..].to_vec();
    let fam = b.family(&left, "a(b)^k(a)^w", &ks, |child, k| {
        let j = ks.iter().position(|&x| x == k).unwrap();
        child.outer(cumulative[j])
    });
    fam
}

/// `(ab^ω, (ab^n)^ω)` for `n ≥ 2`.
fn b_tail_to_abn_omega(b: &mut Builder, n: usize) -> Ref {
    assert!(n >= 2);
    let bn = "b".repeat(n);
    // ab^ω ≈ ab^{2n}·a^ω ≈ ab^n·a·(b^n)^ω = ab^n·ab^ω.
    let long = b_power_before_a_tail(b, 2 * n);
    let long = b.sym(long);
    let g = b.gen(1, sub(&[('b', &bn)]), "");
    let g = b.sym(g);
    let step = b.trans(&[long, g]);
    let u = format!("a{bn}");
    b.family("a(b)^w", &format!("({u})^ka(b)^w"), &ks(), |child, k| child.iterate(step, &u, k))
}

/// `((ab)^2·a^ω, (ab)^ω)`.
fn abab_a_tail(b: &mut Builder) -> Ref {
    let two = b_tail_to_abn_omega(b, 2);
    let x = b.subst(two, sub(&[('a', "bab"), ('b', "a")]));
    let x = b.mul(x, "a");
    let y = b.subst(two, sub(&[('b', "ba")]));
    let y = b.sym(y);
    b.trans(&[x, y])
}

/// `((ab)^ω, (aba)^ω)`.
fn ab_omega_to_aba_omega(b: &mut Builder) -> Ref {
    let three = abab_a_tail(b);
    let g = b.gen(1, sub(&[('b', "ba")]), "");
    let q = b.trans(&[g, three]);
    let q = b.sym(q);
    b.family("(ab)^w", "(aba)^k(ab)^w", &ks(), |child, k| child.iterate(q, "aba", k))
}

/// `((aba)^ω, aba^ω)`.
fn aba_omega_to_aba_a_tail(b: &mut Builder) -> Ref {
    let one = b_power_before_a_tail(b, 3);
    let x = b.subst(one, swap());
    let x = b.mul(x, "a");
    let x = b.sym(x);
    let y = b.gen(2, swap(), "a");
    let y = b.sym(y);
    let r = b.trans(&[x, y]);
    let fam = b.family("ab(a)^w", "(aba)^kab(a)^w", &ks(), |child, k| child.iterate(r, "aba", k));
    b.sym(fam)
}

/// `((ab)^ω, aba^ω)`.
fn ab_omega_to_aba_a_tail(b: &mut Builder) -> Ref {
    let four = ab_omega_to_aba_omega(b);
    let five = aba_omega_to_aba_a_tail(b);
    b.trans(&[four, five])
}

/// `(ab^ω, aba^ω)`.
fn b_tail_to_aba_tail(b: &mut Builder) -> Ref {
    let two = b_tail_to_abn_omega(b, 2);
    let six = ab_omega_to_aba_a_tail(b);
    // ab^ω ≈ (ab²)^ω ≈ ab²(ab)^ω ≈ ab²aba^ω ≈ ab²a·ab^ω.
    let s1 = b.subst(six, sub(&[('a', "ab")]));
    let s2 = b.mul(six, "abb");
    let s3 = b.gen(1, swap(), "ab");
    let u = b.trans(&[two, s1, s2, s3]);
    let f1 = b.family("a(b)^w", "(abba)^ka(b)^w", &ks(), |child, k| child.iterate(u, "abba", k));
    // (ab²a)^ω ≈ ab²a^ω ≈ ab·ab^ω.
    let t = b.subst(two, sub(&[('a', "bb"), ('b', "a")]));
    let t = b.mul(t, "a");
    let t = b.sym(t);
    let g = b.gen(1, Substitution::identity(), "");
    let g = b.sym(g);
    let v = b.trans(&[f1, t, g]);
    let f2 = b.family("a(b)^w", "(ab)^ka(b)^w", &ks(), |child, k| child.iterate(v, "ab", k));
    b.trans(&[f2, six])
}

/// In a builder where `base` proves `(ab^ω, aba^ω)`: the pair
/// `(ab^ω, ab^m·a^j·ab^ω)` for `m ≥ 1`, `j ≥ 0`.
fn block(b: &mut Builder, base: Ref, m: usize, j: usize) -> Ref {
    let x = b.subst(base, sub(&[('b', &"b".repeat(m))]));
    let y = b.subst(base, sub(&[('a', "b"), ('b', &"a".repeat(j + 1))]));
    let y = b.mul(y, &format!("a{}", "b".repeat(m - 1)));
    b.trans(&[x, y])
}

/// Splits a word starting with `ab` before every occurrence of `ab`; each
/// piece is `ab^m·a^j`.
fn blocks(u: &[char]) -> Vec<(usize, usize)> {
    assert!(u.starts_with(&['a', 'b']));
    let mut cuts: Vec<usize> = (0..u.len() - 1)
        .filter(|&i| u[i] == 'a' && u[i + 1] == 'b')
        .collect();
    cuts.push(u.len());
    cuts.windows(2)
        .map(|w| {
            let piece = &u[w[0]..w[1]];
            let m = piece[1..].iter().take_while(|&&c| c == 'b').count();
            (m, piece.len() - 1 - m)
        })
        .collect()
}

/// In a builder where `base` proves `(ab^ω, aba^ω)`: `(ab^ω, u·ab^ω)` for a
/// finite `u` starting with `ab`, assembled block by block from the right.
fn prefix_chain(b: &mut Builder, base: Ref, u: &[char]) -> Ref {
    let mut acc: Option<Ref> = None;
    for (m, j) in blocks(u).into_iter().rev() {
        let piece = block(b, base, m, j);
        acc = Some(match acc {
            None => piece,
            Some(rest) => {
                let shifted = b.mul(rest, &format!("a{}{}", "b".repeat(m), "a".repeat(j)));
                b.trans(&[piece, shifted])
            }
        });
    }
    acc.expect("nonempty prefix")
}

/// The eventually periodic targets of the prefix-class script.
pub fn prefix_class_targets() -> Vec<KWord> {
    [
        "ab(a)^w",
        "(ab)^w",
        "(abb)^w",
        "ab(aab)^w",
        "abab(baa)^w",
        "abbbaab(ab)^w",
        "aba(b)^w",
        "abaab(bbaba)^w",
    ]
    .iter()
    .map(|s| KWord::lit(s))
    .collect()
}

/// `(ab^ω, z)` for each target `z` starting with `ab`.
fn prefix_class(b: &mut Builder, base: Ref, targets: &[KWord]) -> Vec<Ref> {
    let mut out = Vec::new();
    for z in targets {
        let crate::words::KWordView::Omega { pre, per } = z.view() else {
            panic!("targets are infinite");
        };
        let (pre, per): (String, String) = (pre.iter().collect(), per.iter().collect());
        let right = format!("{pre}({per})^ka(b)^w");
        let fam = b.family("a(b)^w", &right, &ks(), |child, k| {
            let base = child.outer(base);
            let u: Vec<char> = format!("{pre}{}", per.repeat(k)).chars().collect();
            prefix_chain(child, base, &u)
        });
        out.push(fam);
    }
    out
}

pub fn b_power_before_a_tail_script(n: usize) -> DerivationScript {
    let mut b = Builder::new();
    let r = b_power_before_a_tail(&mut b, n);
    let c = b.claim(r);
    b.finish("b-power-before-a-tail", vec![c])
}

pub fn b_tail_to_abn_omega_script(n: usize) -> DerivationScript {
    let mut b = Builder::new();
    let r = b_tail_to_abn_omega(&mut b, n);
    let c = b.claim(r);
    b.finish("b-tail-to-abn-omega", vec![c])
}

pub fn abab_a_tail_script() -> DerivationScript {
    let mut b = Builder::new();
    let r = abab_a_tail(&mut b);
    let c = b.claim(r);
    b.finish("abab-a-tail", vec![c])
}

pub fn ab_omega_to_aba_omega_script() -> DerivationScript {
    let mut b = Builder::new();
    let r = ab_omega_to_aba_omega(&mut b);
    let c = b.claim(r);
    b.finish("ab-omega-to-aba-omega", vec![c])
}

pub fn aba_omega_to_aba_a_tail_script() -> DerivationScript {
    let mut b = Builder::new();
    let r = aba_omega_to_aba_a_tail(&mut b);
    let c = b.claim(r);
    b.finish("aba-omega-to-aba-a-tail", vec![c])
}

pub fn ab_omega_to_aba_a_tail_script() -> DerivationScript {
    let mut b = Builder::new();
    let r = ab_omega_to_aba_a_tail(&mut b);
    let c = b.claim(r);
    b.finish("ab-omega-to-aba-a-tail", vec![c])
}

pub fn b_tail_to_aba_tail_script() -> DerivationScript {
    let mut b = Builder::new();
    let r = b_tail_to_aba_tail(&mut b);
    let c = b.claim(r);
    b.finish("b-tail-to-aba-tail", vec![c])
}

pub fn prefix_class_script() -> DerivationScript {
    let mut b = Builder::new();
    let base = b_tail_to_aba_tail(&mut b);
    let rs = prefix_class(&mut b, base, &prefix_class_targets());
    let claims = rs.iter().map(|&r| b.claim(r)).collect();
    b.finish("ab-prefix-class", claims)
}

/// Recovers `G_1..G_max` from the single pair `(aba^ω, ab^ω)`.
pub fn single_generator_script(max: usize) -> DerivationScript {
    let mut b = Builder::new();
    let h = b.add_generator((KWord::lit("ab(a)^w"), KWord::lit("a(b)^w")));
    let v = b.gen_raw(h, Substitution::identity(), "");
    let v = b.sym(v);
    let mut claims = Vec::new();
    for n in 1..=max {
        // ab^n·ab^ω ≈ ab^ω ≈ ab^{n+1}·a^ω.
        let t = block(&mut b, v, n, 0);
        let t = b.sym(t);
        let tail = b.gen_raw(h, sub(&[('b', &"b".repeat(n + 1))]), "");
        let tail = b.sym(tail);
        let g = b.trans(&[t, tail]);
        assert_eq!(*b.pair(g), defining_pair(n));
        claims.push(b.claim(g));
    }
    b.finish("single-generator", claims)
}

/// Every shipped script, keyed by file stem.
pub fn shipped_scripts() -> Vec<DerivationScript> {
    vec![
        b_power_before_a_tail_script(3),
        b_tail_to_abn_omega_script(2),
        abab_a_tail_script(),
        ab_omega_to_aba_omega_script(),
        aba_omega_to_aba_a_tail_script(),
        ab_omega_to_aba_a_tail_script(),
        b_tail_to_aba_tail_script(),
        prefix_class_script(),
        single_generator_script(8),
    ]
}
