//! Finite semigroups given by a multiplication table, the truncated-word
//! semigroups K_n, congruence closure and quotients.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::union_find::UnionFind;
use crate::words::{Alphabet, KWord};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemigroupError {
    #[error("table must be {order}x{order} with entries below {order}")]
    BadTable { order: usize },
    #[error("a semigroup needs at least one element")]
    Empty,
    #[error("element names must be distinct, `{0}` repeats")]
    DuplicateName(String),
    #[error("({x}*{y})*{z} differs from {x}*({y}*{z})")]
    NotAssociative { x: usize, y: usize, z: usize },
    #[error("the truncation length n must be at least 1")]
    ZeroLength,
    #[error("element index {0} out of range")]
    OutOfRange(usize),
    #[error("no element named `{0}`")]
    UnknownElement(String),
    #[error("the generating set is empty")]
    NoGenerators,
    #[error("the semigroup does not satisfy x1...x{0}y = x1...x{0}")]
    NotInKn(usize),
    #[error("partition is not a congruence: {x}~{x2} but {x}*{s} !~ {x2}*{s} or {s}*{x} !~ {s}*{x2}")]
    Incompatible { x: usize, x2: usize, s: usize },
    #[error("not a partition of 0..{0}")]
    NotAPartition(usize),
}

/// Anything with a finite set of elements `0..order()` and an associative
/// product.
pub trait Semigroup {
    fn order(&self) -> usize;
    fn mul(&self, x: usize, y: usize) -> usize;
    fn name(&self, x: usize) -> String;

    fn find(&self, name: &str) -> Option<usize> {
        (0..self.order()).find(|&x| self.name(x) == name)
    }

    fn product(&self, xs: &[usize]) -> Option<usize> {
        let (&first, rest) = xs.split_first()?;
        Some(rest.iter().fold(first, |acc, &x| self.mul(acc, x)))
    }
}

/// A semigroup stored as a full multiplication table.
#[derive(Clone, PartialEq, Eq)]
pub struct FinSemigroup {
    names: Vec<String>,
    table: Vec<u32>,
}

impl FinSemigroup {
    /// Builds from a row-major table, checking shape and associativity.
    pub fn new(names: Vec<String>, rows: Vec<Vec<usize>>) -> Result<Self, SemigroupError> {
        let order = names.len();
        if order == 0 {
            return Err(SemigroupError::Empty);
        }
        let mut seen = std::collections::HashSet::new();
        for n in &names {
            if !seen.insert(n) {
                return Err(SemigroupError::DuplicateName(n.clone()));
            }
        }
        if rows.len() != order || rows.iter().any(|r| r.len() != order || r.iter().any(|&v| v >= order)) {
            return Err(SemigroupError::BadTable { order });
        }
        let table = rows.into_iter().flatten().map(|v| v as u32).collect();
        let s = FinSemigroup { names, table };
        s.check_associative()?;
        Ok(s)
    }

    /// Builds from a table with numeric names `0..order`.
    pub fn from_rows(rows: Vec<Vec<usize>>) -> Result<Self, SemigroupError> {
        let names = (0..rows.len()).map(|i| i.to_string()).collect();
        Self::new(names, rows)
    }

    /// Copies any semigroup into table form.
    pub fn tabulate<S: Semigroup + ?Sized>(s: &S) -> Self {
        let order = s.order();
        let mut table = Vec::with_capacity(order * order);
        for x in 0..order {
            for y in 0..order {
                table.push(s.mul(x, y) as u32);
            }
        }
        FinSemigroup {
            names: (0..order).map(|x| s.name(x)).collect(),
            table,
        }
    }

    /// The cyclic group of the given order under addition.
    pub fn cyclic_group(order: usize) -> Self {
        let rows = (0..order)
            .map(|x| (0..order).map(|y| (x + y) % order).collect())
            .collect();
        Self::from_rows(rows).expect("cyclic group")
    }

    pub fn trivial() -> Self {
        Self::from_rows(vec![vec![0]]).expect("trivial semigroup")
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        let n = self.names.len();
        self.table
            .chunks(n)
            .map(|r| r.iter().map(|&v| v as usize).collect())
            .collect()
    }

    pub fn identity(&self) -> Option<usize> {
        let n = self.order();
        (0..n).find(|&e| (0..n).all(|x| self.mul(e, x) == x && self.mul(x, e) == x))
    }

    fn check_associative(&self) -> Result<(), SemigroupError> {
        let n = self.order();
        // Light's test: it suffices to check the middle factor over a
        // generating set.
        for g in generating_set(self) {
            for x in 0..n {
                let xg = self.mul(x, g);
                for y in 0..n {
                    if self.mul(xg, y) != self.mul(x, self.mul(g, y)) {
                        return Err(SemigroupError::NotAssociative { x, y: g, z: y });
                    }
                }
            }
        }
        Ok(())
    }
}

impl Semigroup for FinSemigroup {
    fn order(&self) -> usize {
        self.names.len()
    }

    fn mul(&self, x: usize, y: usize) -> usize {
        self.table[x * self.names.len() + y] as usize
    }

    fn name(&self, x: usize) -> String {
        self.names[x].clone()
    }
}

impl fmt::Debug for FinSemigroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FinSemigroup")
            .field("elements", &self.names)
            .field("table", &self.rows())
            .finish()
    }
}

#[derive(Serialize, Deserialize)]
struct TableJson {
    elements: Vec<String>,
    table: Vec<Vec<usize>>,
}

impl Serialize for FinSemigroup {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        TableJson {
            elements: self.names.clone(),
            table: self.rows(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FinSemigroup {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = TableJson::deserialize(d)?;
        FinSemigroup::new(j.elements, j.table).map_err(serde::de::Error::custom)
    }
}

/// Elements not expressible as products, extended greedily until they
/// generate everything.
pub fn generating_set<S: Semigroup + ?Sized>(s: &S) -> Vec<usize> {
    let n = s.order();
    let mut decomposable = vec![false; n];
    for x in 0..n {
        for y in 0..n {
            decomposable[s.mul(x, y)] = true;
        }
    }
    let mut gens: Vec<usize> = (0..n).filter(|&x| !decomposable[x]).collect();
    let mut reached = closure(s, &gens);
    while let Some(missing) = (0..n).find(|&x| !reached[x]) {
        gens.push(missing);
        reached = closure(s, &gens);
    }
    gens
}

fn closure<S: Semigroup + ?Sized>(s: &S, gens: &[usize]) -> Vec<bool> {
    let mut reached = vec![false; s.order()];
    let mut queue = VecDeque::new();
    for &g in gens {
        if !reached[g] {
            reached[g] = true;
            queue.push_back(g);
        }
    }
    while let Some(x) = queue.pop_front() {
        for &g in gens {
            let y = s.mul(x, g);
            if !reached[y] {
                reached[y] = true;
                queue.push_back(y);
            }
        }
    }
    reached
}

/// Nonempty words of length at most `n` under truncated concatenation.
///
/// Elements are ordered by length, then lexicographically in alphabet
/// order, and multiplied arithmetically without a stored table.
#[derive(Clone, PartialEq, Eq)]
pub struct KnSemigroup {
    alphabet: Alphabet,
    n: usize,
    /// `offset[l]` is the index of the first word of length `l`.
    offset: Vec<usize>,
    /// `radix_pow[k]` is |A|^k.
    radix_pow: Vec<usize>,
    len_of: Vec<u8>,
}

pub fn make_kn(alphabet: &Alphabet, n: usize) -> Result<KnSemigroup, SemigroupError> {
    KnSemigroup::new(alphabet.clone(), n)
}

impl KnSemigroup {
    pub fn new(alphabet: Alphabet, n: usize) -> Result<Self, SemigroupError> {
        if n == 0 {
            return Err(SemigroupError::ZeroLength);
        }
        let r = alphabet.len();
        let radix_pow: Vec<usize> = (0..=n).map(|k| r.pow(k as u32)).collect();
        let mut offset = vec![0; n + 2];
        for l in 1..=n {
            offset[l + 1] = offset[l] + radix_pow[l];
        }
        let total = offset[n + 1];
        let mut len_of = Vec::with_capacity(total);
        for (l, &count) in radix_pow.iter().enumerate().skip(1) {
            len_of.extend(std::iter::repeat_n(l as u8, count));
        }
        Ok(KnSemigroup {
            alphabet,
            n,
            offset,
            radix_pow,
            len_of,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn word(&self, x: usize) -> Vec<char> {
        let l = self.len_of[x] as usize;
        let mut v = x - self.offset[l];
        let letters = self.alphabet.letters();
        let mut out = vec![' '; l];
        for slot in out.iter_mut().rev() {
            *slot = letters[v % letters.len()];
            v /= letters.len();
        }
        out
    }

    /// Index of the word, after truncating it to `n` letters. `None` for the
    /// empty word or foreign letters.
    pub fn index(&self, word: &[char]) -> Option<usize> {
        let w = &word[..word.len().min(self.n)];
        if w.is_empty() {
            return None;
        }
        let mut v = 0;
        for &c in w {
            v = v * self.alphabet.len() + self.alphabet.index_of(c)?;
        }
        Some(self.offset[w.len()] + v)
    }

    /// The image of a pseudoword under the natural projection.
    pub fn project(&self, w: &KWord) -> Option<usize> {
        self.index(&w.truncate(self.n))
    }
}

impl Semigroup for KnSemigroup {
    fn order(&self) -> usize {
        self.len_of.len()
    }

    fn mul(&self, x: usize, y: usize) -> usize {
        let lx = self.len_of[x] as usize;
        if lx == self.n {
            return x;
        }
        let ly = self.len_of[y] as usize;
        let take = (self.n - lx).min(ly);
        let vx = x - self.offset[lx];
        let vy = (y - self.offset[ly]) / self.radix_pow[ly - take];
        self.offset[lx + take] + vx * self.radix_pow[take] + vy
    }

    fn name(&self, x: usize) -> String {
        self.word(x).into_iter().collect()
    }

    fn find(&self, name: &str) -> Option<usize> {
        let w: Vec<char> = name.chars().collect();
        if w.len() > self.n {
            return None;
        }
        self.index(&w)
    }
}

impl fmt::Debug for KnSemigroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "K_{}({})", self.n, String::from(self.alphabet.clone()))
    }
}

#[derive(Serialize, Deserialize)]
struct KnJson {
    alphabet: Alphabet,
    n: usize,
}

impl Serialize for KnSemigroup {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        KnJson {
            alphabet: self.alphabet.clone(),
            n: self.n,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for KnSemigroup {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = KnJson::deserialize(d)?;
        KnSemigroup::new(j.alphabet, j.n).map_err(serde::de::Error::custom)
    }
}

/// The idempotent power of `s`.
pub fn omega_power_fin<S: Semigroup + ?Sized>(s: &S, x: usize) -> usize {
    let mut p = x;
    for _ in 0..=s.order() {
        if s.mul(p, p) == p {
            return p;
        }
        p = s.mul(p, x);
    }
    unreachable!("every element of a finite semigroup has an idempotent power")
}

/// The set of all products of exactly `k` elements, as a membership mask.
fn product_set<S: Semigroup + ?Sized>(s: &S, k: usize) -> Vec<bool> {
    let n = s.order();
    let mut cur = vec![true; n];
    for _ in 1..k {
        let mut next = vec![false; n];
        for p in (0..n).filter(|&p| cur[p]) {
            for y in 0..n {
                next[s.mul(p, y)] = true;
            }
        }
        if next == cur {
            break;
        }
        cur = next;
    }
    cur
}

/// Whether `p·y = p` for every product `p` of `n` elements and every `y`.
pub fn satisfies_kn_identity<S: Semigroup + ?Sized>(s: &S, n: usize) -> bool {
    let ps = product_set(s, n.max(1));
    (0..s.order())
        .filter(|&p| ps[p])
        .all(|p| (0..s.order()).all(|y| s.mul(p, y) == p))
}

/// Whether some set of k-fold products is a single element.
pub fn is_nilpotent<S: Semigroup + ?Sized>(s: &S) -> bool {
    let n = s.order();
    let mut cur = vec![true; n];
    let mut size = n;
    loop {
        if size == 1 {
            return true;
        }
        let mut next = vec![false; n];
        for p in (0..n).filter(|&p| cur[p]) {
            for y in 0..n {
                next[s.mul(p, y)] = true;
            }
        }
        // The product sets decrease, so a repeat means they are stuck.
        if next == cur {
            return false;
        }
        size = next.iter().filter(|&&b| b).count();
        cur = next;
    }
}

/// A partition of `0..order` with classes numbered by least element.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Congruence {
    class_of: Vec<usize>,
    classes: Vec<Vec<usize>>,
}

impl Congruence {
    pub fn identity(order: usize) -> Self {
        Congruence {
            class_of: (0..order).collect(),
            classes: (0..order).map(|x| vec![x]).collect(),
        }
    }

    pub fn full(order: usize) -> Self {
        Congruence {
            class_of: vec![0; order],
            classes: vec![(0..order).collect()],
        }
    }

    /// Takes any partition; compatibility is checked by [`quotient`].
    pub fn from_classes(order: usize, classes: Vec<Vec<usize>>) -> Result<Self, SemigroupError> {
        let mut uf = UnionFind::new(order);
        let mut seen = vec![false; order];
        for class in &classes {
            if class.is_empty() {
                return Err(SemigroupError::NotAPartition(order));
            }
            for &x in class {
                if x >= order || std::mem::replace(&mut seen[x], true) {
                    return Err(SemigroupError::NotAPartition(order));
                }
                uf.union(class[0], x);
            }
        }
        if seen.iter().any(|&b| !b) {
            return Err(SemigroupError::NotAPartition(order));
        }
        Ok(Self::from_union_find(&mut uf))
    }

    fn from_union_find(uf: &mut UnionFind) -> Self {
        let n = uf.len();
        let mut class_of = vec![usize::MAX; n];
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for x in 0..n {
            let r = uf.find(x);
            // Roots are least elements, so a root is met before its class.
            if r == x {
                class_of[x] = classes.len();
                classes.push(vec![x]);
            } else {
                class_of[x] = class_of[r];
                classes[class_of[r]].push(x);
            }
        }
        Congruence { class_of, classes }
    }

    pub fn class_of(&self, x: usize) -> usize {
        self.class_of[x]
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn related(&self, x: usize, y: usize) -> bool {
        self.class_of[x] == self.class_of[y]
    }

    pub fn projection(&self) -> &[usize] {
        &self.class_of
    }
}

/// The least congruence containing `pairs`.
pub fn congruence_closure<S: Semigroup + ?Sized>(s: &S, pairs: &[(usize, usize)]) -> Congruence {
    let n = s.order();
    let mut uf = UnionFind::new(n);
    // Only successful unions are queued; their translates are what keeps the
    // partition compatible, so the stack never exceeds `n` entries.
    let mut pending: Vec<(usize, usize)> = pairs.iter().copied().filter(|&(x, y)| uf.union(x, y)).collect();
    while let Some((x, y)) = pending.pop() {
        for z in 0..n {
            for (p, q) in [(s.mul(z, x), s.mul(z, y)), (s.mul(x, z), s.mul(y, z))] {
                if uf.union(p, q) {
                    pending.push((p, q));
                }
            }
        }
    }
    Congruence::from_union_find(&mut uf)
}

/// The quotient table on classes, named after each class's least element.
pub fn quotient<S: Semigroup + ?Sized>(s: &S, c: &Congruence) -> Result<FinSemigroup, SemigroupError> {
    let n = s.order();
    if c.class_of.len() != n {
        return Err(SemigroupError::NotAPartition(n));
    }
    let k = c.num_classes();
    let mut table = vec![u32::MAX; k * k];
    for x in 0..n {
        let cx = c.class_of(x);
        let rep = c.classes[cx][0];
        for z in 0..n {
            let cz = c.class_of(z);
            let v = c.class_of(s.mul(x, z)) as u32;
            let slot = &mut table[cx * k + cz];
            if *slot == u32::MAX {
                *slot = v;
            } else if *slot != v {
                // The slot was filled by the two least elements, so either
                // the right translate by `zrep` or the left one by `x` splits.
                let zrep = c.classes[cz][0];
                let err = if c.class_of(s.mul(rep, zrep)) != c.class_of(s.mul(x, zrep)) {
                    SemigroupError::Incompatible { x: rep, x2: x, s: zrep }
                } else {
                    SemigroupError::Incompatible { x: zrep, x2: z, s: x }
                };
                return Err(err);
            }
        }
    }
    Ok(FinSemigroup {
        names: c.classes.iter().map(|cl| s.name(cl[0])).collect(),
        table,
    })
}

/// A subsemigroup as a table together with its inclusion map.
#[derive(Debug, Clone)]
pub struct Subsemigroup {
    pub semigroup: FinSemigroup,
    pub embedding: Vec<usize>,
}

pub fn generated_subsemigroup<S: Semigroup + ?Sized>(
    s: &S,
    gens: &[usize],
) -> Result<Subsemigroup, SemigroupError> {
    if gens.is_empty() {
        return Err(SemigroupError::NoGenerators);
    }
    if let Some(&g) = gens.iter().find(|&&g| g >= s.order()) {
        return Err(SemigroupError::OutOfRange(g));
    }
    let reached = closure(s, gens);
    let embedding: Vec<usize> = (0..s.order()).filter(|&x| reached[x]).collect();
    let mut local = vec![usize::MAX; s.order()];
    for (i, &x) in embedding.iter().enumerate() {
        local[x] = i;
    }
    let k = embedding.len();
    let mut table = Vec::with_capacity(k * k);
    for &x in &embedding {
        for &y in &embedding {
            table.push(local[s.mul(x, y)] as u32);
        }
    }
    Ok(Subsemigroup {
        semigroup: FinSemigroup {
            names: embedding.iter().map(|&x| s.name(x)).collect(),
            table,
        },
        embedding,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepViolationKind {
    NotNilpotent,
    OmegaPowersDiffer,
    /// `u s v != u t v` for some `{s,t}`-word `uv` of length n-1.
    MiddleFactor { u: Vec<String>, v: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepViolation {
    pub s: String,
    pub t: String,
    pub kind: SweepViolationKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepReport {
    pub n: usize,
    pub order: usize,
    pub pairs_examined: usize,
    /// Ordered pairs with `s·t^ω = t·s^ω`.
    pub hypothesis_pairs: Vec<(String, String)>,
    pub violations: Vec<SweepViolation>,
}

/// For every ordered pair with `s·t^ω = t·s^ω`, checks that `⟨s,t⟩` is
/// nilpotent, that `s^ω = t^ω`, and that `usv = utv` for every
/// `{s,t}`-word `uv` with n-1 factors.
pub fn commuting_omega_sweep<S: Semigroup + ?Sized>(s: &S, n: usize) -> Result<SweepReport, SemigroupError> {
    if n == 0 || !satisfies_kn_identity(s, n) {
        return Err(SemigroupError::NotInKn(n));
    }
    let order = s.order();
    let omega: Vec<usize> = (0..order).map(|x| omega_power_fin(s, x)).collect();
    let mut report = SweepReport {
        n,
        order,
        pairs_examined: 0,
        hypothesis_pairs: Vec::new(),
        violations: Vec::new(),
    };
    for a in 0..order {
        for b in 0..order {
            report.pairs_examined += 1;
            if s.mul(a, omega[b]) != s.mul(b, omega[a]) {
                continue;
            }
            report.hypothesis_pairs.push((s.name(a), s.name(b)));
            let mut flag = |kind| {
                report.violations.push(SweepViolation {
                    s: s.name(a),
                    t: s.name(b),
                    kind,
                })
            };
            let sub = generated_subsemigroup(s, &[a, b])?;
            if !is_nilpotent(&sub.semigroup) {
                flag(SweepViolationKind::NotNilpotent);
            }
            if omega[a] != omega[b] {
                flag(SweepViolationKind::OmegaPowersDiffer);
            }
            if let Some((u, v)) = middle_factor_failure(s, a, b, n - 1) {
                let names = |xs: Vec<usize>| xs.into_iter().map(|x| s.name(x)).collect();
                flag(SweepViolationKind::MiddleFactor {
                    u: names(u),
                    v: names(v),
                });
            }
        }
    }
    Ok(report)
}

/// Searches words `w` of length `len` over `{a,b}` and splits `w = uv` with
/// `u·a·v != u·b·v`.
fn middle_factor_failure<S: Semigroup + ?Sized>(
    s: &S,
    a: usize,
    b: usize,
    len: usize,
) -> Option<(Vec<usize>, Vec<usize>)> {
    for mask in 0u64..(1u64 << len) {
        let w: Vec<usize> = (0..len).map(|i| if mask >> i & 1 == 0 { a } else { b }).collect();
        for cut in 0..=len {
            let (u, v) = w.split_at(cut);
            let side = |m: usize| {
                let mut xs = u.to_vec();
                xs.push(m);
                xs.extend_from_slice(v);
                s.product(&xs).expect("nonempty")
            };
            if side(a) != side(b) {
                return Some((u.to_vec(), v.to_vec()));
            }
        }
    }
    None
}

/// Outcome of quotienting K_n by the relation `ab^{n-1} = ba^{n-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PowerMergeReport {
    pub n: usize,
    pub order: usize,
    pub classes: usize,
    pub merged: bool,
}

/// Quotients K_n on {a,b} by the congruence generated by the length-n
/// prefixes of `ab^ω` and `ba^ω` and reports whether `a^n` and `b^n` fall
/// in the same class.
pub fn power_merge(n: usize) -> Result<PowerMergeReport, SemigroupError> {
    let kn = KnSemigroup::new(Alphabet::ab(), n)?;
    let lhs = kn.project(&KWord::lit("a(b)^w")).expect("letters of {a,b}");
    let rhs = kn.project(&KWord::lit("b(a)^w")).expect("letters of {a,b}");
    let c = congruence_closure(&kn, &[(lhs, rhs)]);
    let q = quotient(&kn, &c)?;
    let an = kn.project(&KWord::lit("(a)^w")).expect("letter a");
    let bn = kn.project(&KWord::lit("(b)^w")).expect("letter b");
    Ok(PowerMergeReport {
        n,
        order: kn.order(),
        classes: q.order(),
        merged: c.related(an, bn),
    })
}

#[cfg(test)]
#[allow(clippy::needless_range_loop)]
mod tests {
    use super::*;

    fn k(n: usize) -> KnSemigroup {
        make_kn(&Alphabet::ab(), n).unwrap()
    }

    fn el(s: &impl Semigroup, name: &str) -> usize {
        s.find(name).unwrap_or_else(|| panic!("no element {name}"))
    }

    fn names(s: &impl Semigroup, xs: &[usize]) -> Vec<String> {
        xs.iter().map(|&x| s.name(x)).collect()
    }

    #[test]
    fn kn_enumeration() {
        let k2 = k(2);
        assert_eq!(k2.order(), 6);
        assert_eq!(
            names(&k2, &(0..6).collect::<Vec<_>>()),
            ["a", "b", "aa", "ab", "ba", "bb"]
        );
        assert_eq!(k(10).order(), 2046);
        assert!(matches!(make_kn(&Alphabet::ab(), 0), Err(SemigroupError::ZeroLength)));
    }

    #[test]
    fn kn_product_truncates() {
        let k3 = k(3);
        assert_eq!(k3.name(k3.mul(el(&k3, "ab"), el(&k3, "ba"))), "abb");
        let unary = make_kn(&Alphabet::new(['a']).unwrap(), 3).unwrap();
        assert_eq!(names(&unary, &[0, 1, 2]), ["a", "aa", "aaa"]);
        for y in 0..3 {
            assert_eq!(unary.mul(2, y), 2);
        }
        assert_eq!(unary.mul(0, 1), 2);
    }

    #[test]
    fn kn_product_matches_string_truncation() {
        let k4 = make_kn(&Alphabet::new(['a', 'b', 'c']).unwrap(), 4).unwrap();
        for x in 0..k4.order() {
            for y in 0..k4.order() {
                let mut w = k4.word(x);
                w.extend(k4.word(y));
                w.truncate(4);
                assert_eq!(k4.word(k4.mul(x, y)), w);
            }
        }
    }

    #[test]
    fn kn_tabulates_to_an_associative_table() {
        let t = FinSemigroup::tabulate(&k(4));
        FinSemigroup::new(t.names().to_vec(), t.rows()).unwrap();
    }

    #[test]
    fn rejects_non_associative_tables() {
        // x*y = y-x mod 3 fails associativity.
        let rows = (0..3).map(|x| (0..3).map(|y| (3 + y - x) % 3).collect()).collect();
        assert!(matches!(
            FinSemigroup::from_rows(rows),
            Err(SemigroupError::NotAssociative { .. })
        ));
        assert!(matches!(
            FinSemigroup::from_rows(vec![vec![0, 2], vec![1, 1]]),
            Err(SemigroupError::BadTable { order: 2 })
        ));
    }

    #[test]
    fn full_associativity_agrees_with_light_test() {
        // All binary operations on two points: 16 tables, 8 associative.
        let mut assoc = 0;
        for code in 0..16u32 {
            let rows: Vec<Vec<usize>> = (0..2)
                .map(|x| (0..2).map(|y| (code >> (2 * x + y) & 1) as usize).collect())
                .collect();
            let brute = (0..2).all(|x| {
                (0..2).all(|y| (0..2).all(|z| rows[rows[x][y]][z] == rows[x][rows[y][z]]))
            });
            assert_eq!(FinSemigroup::from_rows(rows).is_ok(), brute);
            assoc += brute as usize;
        }
        assert_eq!(assoc, 8);
    }

    #[test]
    fn omega_powers() {
        let k3 = k(3);
        let ab = el(&k3, "ab");
        // Oracle: the first three letters of (ab)^w.
        let expect: String = KWord::lit("ab").omega_power().truncate(3).into_iter().collect();
        assert_eq!(k3.name(omega_power_fin(&k3, ab)), expect);
        assert_eq!(expect, "aba");
        let aaa = el(&k3, "aaa");
        assert_eq!(omega_power_fin(&k3, aaa), aaa);
        let z3 = FinSemigroup::cyclic_group(3);
        for x in 0..3 {
            assert_eq!(omega_power_fin(&z3, x), 0);
        }
    }

    #[test]
    fn kn_identity() {
        assert!(satisfies_kn_identity(&k(3), 3));
        assert!(!satisfies_kn_identity(&k(3), 2));
        assert!(satisfies_kn_identity(&k(3), 5));
        assert!(!satisfies_kn_identity(&FinSemigroup::cyclic_group(2), 1));
        assert!(satisfies_kn_identity(&FinSemigroup::trivial(), 1));
        assert!(satisfies_kn_identity(&FinSemigroup::trivial(), 7));
    }

    /// Closes a relation under translation and transitivity by naive
    /// iteration over the full relation matrix.
    fn naive_closure(s: &impl Semigroup, pairs: &[(usize, usize)]) -> Vec<Vec<bool>> {
        let n = s.order();
        let mut r = vec![vec![false; n]; n];
        for x in 0..n {
            r[x][x] = true;
        }
        for &(x, y) in pairs {
            r[x][y] = true;
            r[y][x] = true;
        }
        loop {
            let mut changed = false;
            for x in 0..n {
                for y in 0..n {
                    if !r[x][y] {
                        continue;
                    }
                    for z in 0..n {
                        for (p, q) in [(s.mul(z, x), s.mul(z, y)), (s.mul(x, z), s.mul(y, z))] {
                            if !r[p][q] {
                                r[p][q] = true;
                                changed = true;
                            }
                        }
                        if r[y][z] && !r[x][z] {
                            r[x][z] = true;
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                return r;
            }
        }
    }

    #[test]
    fn closure_of_ab_ba_in_k2() {
        let k2 = k(2);
        let pairs = [(el(&k2, "ab"), el(&k2, "ba"))];
        let c = congruence_closure(&k2, &pairs);
        let classes: Vec<Vec<String>> = c.classes().iter().map(|cl| names(&k2, cl)).collect();
        assert_eq!(classes, [vec!["a"], vec!["b"], vec!["aa", "ab", "ba", "bb"]]);
        let oracle = naive_closure(&k2, &pairs);
        for x in 0..6 {
            for y in 0..6 {
                assert_eq!(c.related(x, y), oracle[x][y]);
            }
        }
        assert_eq!(quotient(&k2, &c).unwrap().order(), 3);
    }

    #[test]
    fn closure_matches_naive_on_k3() {
        let k3 = k(3);
        let cases = [
            vec![(el(&k3, "abb"), el(&k3, "baa"))],
            vec![(el(&k3, "a"), el(&k3, "ab"))],
            vec![(el(&k3, "ba"), el(&k3, "bb")), (el(&k3, "aab"), el(&k3, "aba"))],
        ];
        for pairs in cases {
            let c = congruence_closure(&k3, &pairs);
            let oracle = naive_closure(&k3, &pairs);
            for x in 0..k3.order() {
                for y in 0..k3.order() {
                    assert_eq!(c.related(x, y), oracle[x][y]);
                }
            }
        }
    }

    #[test]
    fn extreme_closures() {
        let k2 = k(2);
        assert_eq!(congruence_closure(&k2, &[]), Congruence::identity(6));
        let all: Vec<_> = (0..6).flat_map(|x| (0..6).map(move |y| (x, y))).collect();
        assert_eq!(congruence_closure(&k2, &all), Congruence::full(6));
        let same = quotient(&k2, &Congruence::identity(6)).unwrap();
        assert_eq!(same, FinSemigroup::tabulate(&k2));
        assert_eq!(quotient(&k2, &Congruence::full(6)).unwrap().order(), 1);
    }

    #[test]
    fn quotient_rejects_incompatible_partitions() {
        let k2 = k(2);
        // {a,b} merged but aa and ba kept apart.
        let mut classes = vec![vec![0, 1]];
        classes.extend((2..6).map(|x| vec![x]));
        let c = Congruence::from_classes(6, classes).unwrap();
        assert!(matches!(quotient(&k2, &c), Err(SemigroupError::Incompatible { .. })));
        assert!(Congruence::from_classes(3, vec![vec![0, 1]]).is_err());
        assert!(Congruence::from_classes(2, vec![vec![0, 1], vec![1]]).is_err());
    }

    #[test]
    fn quotient_projection_is_a_homomorphism() {
        let k3 = k(3);
        let c = congruence_closure(&k3, &[(el(&k3, "abb"), el(&k3, "baa"))]);
        let q = quotient(&k3, &c).unwrap();
        for x in 0..k3.order() {
            for y in 0..k3.order() {
                assert_eq!(
                    c.class_of(k3.mul(x, y)),
                    q.mul(c.class_of(x), c.class_of(y))
                );
            }
        }
    }

    #[test]
    fn subsemigroups() {
        let k3 = k(3);
        let a = generated_subsemigroup(&k3, &[el(&k3, "a")]).unwrap();
        assert_eq!(a.semigroup.names(), ["a", "aa", "aaa"]);
        assert!(is_nilpotent(&a.semigroup));
        let all: Vec<usize> = (0..k3.order()).collect();
        assert_eq!(
            generated_subsemigroup(&k3, &all).unwrap().semigroup,
            FinSemigroup::tabulate(&k3)
        );
        let k2 = k(2);
        let aa = generated_subsemigroup(&k2, &[el(&k2, "aa")]).unwrap();
        assert_eq!(aa.semigroup.names(), ["aa"]);
        assert!(generated_subsemigroup(&k2, &[]).is_err());
    }

    #[test]
    fn nilpotency() {
        assert!(!is_nilpotent(&FinSemigroup::cyclic_group(2)));
        assert!(is_nilpotent(&FinSemigroup::trivial()));
        // Left-zero band on two points: every product set is everything.
        let lz = FinSemigroup::from_rows(vec![vec![0, 0], vec![1, 1]]).unwrap();
        assert!(!is_nilpotent(&lz));
        assert!(!is_nilpotent(&k(2)));
    }

    #[test]
    fn sweep_hypothesis_pair_a_aa() {
        let k3 = k(3);
        let (a, aa) = (el(&k3, "a"), el(&k3, "aa"));
        let om = |x| omega_power_fin(&k3, x);
        assert_eq!(k3.name(k3.mul(a, om(aa))), "aaa");
        assert_eq!(k3.name(k3.mul(aa, om(a))), "aaa");
        let report = commuting_omega_sweep(&k3, 3).unwrap();
        assert!(report.hypothesis_pairs.contains(&("a".into(), "aa".into())));
        assert!(report.violations.is_empty());
        assert_eq!(report.pairs_examined, 14 * 14);
    }

    #[test]
    fn sweep_on_small_kn_and_a_quotient() {
        for n in 1..=4 {
            let r = commuting_omega_sweep(&k(n), n).unwrap();
            assert!(r.violations.is_empty(), "{n}: {:?}", r.violations);
        }
        let k3 = k(3);
        let c = congruence_closure(&k3, &[(el(&k3, "abb"), el(&k3, "baa"))]);
        let q = quotient(&k3, &c).unwrap();
        assert!(commuting_omega_sweep(&q, 3).unwrap().violations.is_empty());
    }

    #[test]
    fn sweep_requires_kn_membership() {
        assert_eq!(
            commuting_omega_sweep(&FinSemigroup::cyclic_group(2), 3),
            Err(SemigroupError::NotInKn(3))
        );
        assert!(commuting_omega_sweep(&k(3), 2).is_err());
    }

    #[test]
    fn power_merge_small() {
        for n in 2..=5 {
            let r = power_merge(n).unwrap();
            assert!(r.merged, "{r:?}");
            assert!(r.classes < r.order);
        }
    }

    #[test]
    fn serde_shapes() {
        let k2 = k(2);
        assert_eq!(
            serde_json::to_string(&k2).unwrap(),
            r#"{"alphabet":"ab","n":2}"#
        );
        let back: KnSemigroup = serde_json::from_str(r#"{"alphabet":"ab","n":2}"#).unwrap();
        assert_eq!(back, k2);
        let z2 = FinSemigroup::cyclic_group(2);
        let json = serde_json::to_string(&z2).unwrap();
        assert_eq!(json, r#"{"elements":["0","1"],"table":[[0,1],[1,0]]}"#);
        assert_eq!(serde_json::from_str::<FinSemigroup>(&json).unwrap(), z2);
        assert!(serde_json::from_str::<FinSemigroup>(
            r#"{"elements":["0","1","2"],"table":[[0,1,2],[2,0,1],[1,2,0]]}"#
        )
        .is_err());
    }
}
