//! Finite unary algebras over an alphabet, the monoids they generate, and
//! the two functors between them.
//!
//! A word `a_1⋯a_k` acts on an algebra as `a_1 ∘ ⋯ ∘ a_k`, so the
//! rightmost letter is applied first, and the transformation monoid
//! multiplies by composition.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::finsgp::{FinSemigroup, KnSemigroup, Semigroup, SemigroupError};
use crate::words::Alphabet;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UnaryError {
    #[error("the carrier must be nonempty")]
    EmptyCarrier,
    #[error("operation `{0}` is not a total self-map of the carrier")]
    BadOp(char),
    #[error("distinguished element {0} is out of range")]
    BadDistinguished(usize),
    #[error("the algebra has no distinguished element")]
    NoDistinguished,
    #[error("the algebra is not generated by its distinguished element")]
    NotOneGenerated,
    #[error("letters differ: {0:?} vs {1:?}")]
    AlphabetMismatch(Vec<char>, Vec<char>),
    #[error("map is not a homomorphism at letter `{letter}`, element {element}")]
    NotHomomorphism { letter: char, element: usize },
    #[error("map is not onto")]
    NotOnto,
    #[error("map has length {found}, expected {expected}")]
    BadMap { found: usize, expected: usize },
    #[error(transparent)]
    Table(#[from] SemigroupError),
    #[error("element {0} is not an identity")]
    NotIdentity(usize),
    #[error("generator image of `{letter}` is out of range")]
    BadGamma { letter: char },
    #[error("the generator images do not generate the monoid")]
    NotGenerated,
    #[error("tower maps do not compose functorially at levels {0}..{1}")]
    NotFunctorial(usize, usize),
}

/// A total self-map of `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Transformation(Vec<usize>);

impl Transformation {
    pub fn new(images: Vec<usize>) -> Option<Self> {
        let n = images.len();
        images.iter().all(|&x| x < n).then_some(Transformation(images))
    }

    pub fn identity(n: usize) -> Self {
        Transformation((0..n).collect())
    }

    pub fn apply(&self, x: usize) -> usize {
        self.0[x]
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Transformation) -> Transformation {
        Transformation(other.0.iter().map(|&x| self.0[x]).collect())
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }
}

/// A finite set with one self-map per letter and an optional
/// distinguished element.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "AlgebraJson")]
pub struct UnaryAlgebra {
    size: usize,
    ops: BTreeMap<char, Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    distinguished: Option<usize>,
}

#[derive(Deserialize)]
struct AlgebraJson {
    size: usize,
    ops: BTreeMap<char, Vec<usize>>,
    #[serde(default)]
    distinguished: Option<usize>,
}

impl TryFrom<AlgebraJson> for UnaryAlgebra {
    type Error = UnaryError;

    fn try_from(j: AlgebraJson) -> Result<Self, Self::Error> {
        UnaryAlgebra::new(j.size, j.ops, j.distinguished)
    }
}

impl UnaryAlgebra {
    pub fn new(
        size: usize,
        ops: BTreeMap<char, Vec<usize>>,
        distinguished: Option<usize>,
    ) -> Result<Self, UnaryError> {
        if size == 0 {
            return Err(UnaryError::EmptyCarrier);
        }
        for (&c, f) in &ops {
            if f.len() != size || f.iter().any(|&x| x >= size) {
                return Err(UnaryError::BadOp(c));
            }
        }
        if let Some(d) = distinguished.filter(|&d| d >= size) {
            return Err(UnaryError::BadDistinguished(d));
        }
        Ok(UnaryAlgebra {
            size,
            ops,
            distinguished,
        })
    }

    /// Shorthand for ops given as `(letter, images)` pairs.
    pub fn from_ops(size: usize, ops: &[(char, &[usize])], distinguished: Option<usize>) -> Result<Self, UnaryError> {
        Self::new(size, ops.iter().map(|&(c, f)| (c, f.to_vec())).collect(), distinguished)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn letters(&self) -> Vec<char> {
        self.ops.keys().copied().collect()
    }

    pub fn op(&self, c: char) -> Option<&[usize]> {
        self.ops.get(&c).map(|v| v.as_slice())
    }

    pub fn distinguished(&self) -> Option<usize> {
        self.distinguished
    }

    pub fn with_distinguished(mut self, d: usize) -> Result<Self, UnaryError> {
        if d >= self.size {
            return Err(UnaryError::BadDistinguished(d));
        }
        self.distinguished = Some(d);
        Ok(self)
    }

    /// `w(x)`, applying the rightmost letter first. Unknown letters act as
    /// the identity.
    pub fn act(&self, word: &[char], x: usize) -> usize {
        word.iter()
            .rev()
            .fold(x, |y, c| self.ops.get(c).map_or(y, |f| f[y]))
    }

    pub fn reachable_from(&self, x: usize) -> Vec<bool> {
        let mut seen = vec![false; self.size];
        seen[x] = true;
        let mut queue = VecDeque::from([x]);
        while let Some(y) = queue.pop_front() {
            for f in self.ops.values() {
                if !seen[f[y]] {
                    seen[f[y]] = true;
                    queue.push_back(f[y]);
                }
            }
        }
        seen
    }

    pub fn is_one_generated(&self) -> bool {
        self.distinguished
            .is_some_and(|d| self.reachable_from(d).iter().all(|&b| b))
    }

    fn require_one_generated(&self) -> Result<usize, UnaryError> {
        let d = self.distinguished.ok_or(UnaryError::NoDistinguished)?;
        if !self.is_one_generated() {
            return Err(UnaryError::NotOneGenerated);
        }
        Ok(d)
    }

    /// Whether `phi` commutes with every operation.
    pub fn check_homomorphism(&self, target: &UnaryAlgebra, phi: &[usize]) -> Result<(), UnaryError> {
        same_letters(&self.letters(), &target.letters())?;
        if phi.len() != self.size || phi.iter().any(|&y| y >= target.size) {
            return Err(UnaryError::BadMap {
                found: phi.len(),
                expected: self.size,
            });
        }
        for (&c, f) in &self.ops {
            let g = &target.ops[&c];
            if let Some(x) = (0..self.size).find(|&x| phi[f[x]] != g[phi[x]]) {
                return Err(UnaryError::NotHomomorphism { letter: c, element: x });
            }
        }
        Ok(())
    }
}

fn same_letters(a: &[char], b: &[char]) -> Result<(), UnaryError> {
    if a != b {
        return Err(UnaryError::AlphabetMismatch(a.to_vec(), b.to_vec()));
    }
    Ok(())
}

fn onto(phi: &[usize], target_size: usize) -> bool {
    let mut hit = vec![false; target_size];
    for &y in phi {
        hit[y] = true;
    }
    hit.into_iter().all(|b| b)
}

/// A finite monoid generated by the images of the letters.
///
/// Each element carries its shortlex-least witnessing word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AGenMonoid {
    table: FinSemigroup,
    identity: usize,
    gamma: BTreeMap<char, usize>,
    witnesses: Vec<Vec<char>>,
}

#[derive(Serialize, Deserialize)]
struct MonoidJson {
    table: Vec<Vec<usize>>,
    identity: usize,
    gamma: BTreeMap<char, usize>,
}

impl Serialize for AGenMonoid {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        MonoidJson {
            table: self.table.rows(),
            identity: self.identity,
            gamma: self.gamma.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for AGenMonoid {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = MonoidJson::deserialize(d)?;
        AGenMonoid::new(j.table, j.identity, j.gamma).map_err(serde::de::Error::custom)
    }
}

impl AGenMonoid {
    pub fn new(rows: Vec<Vec<usize>>, identity: usize, gamma: BTreeMap<char, usize>) -> Result<Self, UnaryError> {
        let table = FinSemigroup::from_rows(rows)?;
        Self::from_semigroup(table, identity, gamma)
    }

    pub fn from_semigroup(
        table: FinSemigroup,
        identity: usize,
        gamma: BTreeMap<char, usize>,
    ) -> Result<Self, UnaryError> {
        let n = table.order();
        if identity >= n || (0..n).any(|x| table.mul(identity, x) != x || table.mul(x, identity) != x) {
            return Err(UnaryError::NotIdentity(identity));
        }
        if let Some((&letter, _)) = gamma.iter().find(|&(_, &m)| m >= n) {
            return Err(UnaryError::BadGamma { letter });
        }
        let mut witnesses: Vec<Option<Vec<char>>> = vec![None; n];
        witnesses[identity] = Some(Vec::new());
        let mut queue = VecDeque::from([identity]);
        while let Some(x) = queue.pop_front() {
            for (&c, &g) in &gamma {
                let y = table.mul(x, g);
                if witnesses[y].is_none() {
                    let mut w = witnesses[x].clone().expect("visited");
                    w.push(c);
                    witnesses[y] = Some(w);
                    queue.push_back(y);
                }
            }
        }
        let witnesses = witnesses
            .into_iter()
            .collect::<Option<Vec<_>>>()
            .ok_or(UnaryError::NotGenerated)?;
        Ok(AGenMonoid {
            table,
            identity,
            gamma,
            witnesses,
        })
    }

    /// The trivial monoid over the given letters.
    pub fn trivial(letters: &[char]) -> Self {
        let gamma = letters.iter().map(|&c| (c, 0)).collect();
        Self::new(vec![vec![0]], 0, gamma).expect("trivial monoid")
    }

    pub fn order(&self) -> usize {
        self.table.order()
    }

    pub fn mul(&self, x: usize, y: usize) -> usize {
        self.table.mul(x, y)
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn gamma(&self, c: char) -> Option<usize> {
        self.gamma.get(&c).copied()
    }

    pub fn letters(&self) -> Vec<char> {
        self.gamma.keys().copied().collect()
    }

    pub fn table(&self) -> &FinSemigroup {
        &self.table
    }

    pub fn witness(&self, x: usize) -> &[char] {
        &self.witnesses[x]
    }

    /// The product of the generator images along `word`.
    pub fn eval(&self, word: &[char]) -> Option<usize> {
        word.iter()
            .try_fold(self.identity, |acc, c| Some(self.mul(acc, self.gamma(*c)?)))
    }

    /// Elements renumbered in witness order, so isomorphic monoids (with
    /// matching generators) get identical tables.
    pub fn canonical(&self) -> AGenMonoid {
        let mut order: Vec<usize> = (0..self.order()).collect();
        order.sort_by(|&x, &y| {
            let (wx, wy) = (&self.witnesses[x], &self.witnesses[y]);
            wx.len().cmp(&wy.len()).then_with(|| wx.cmp(wy))
        });
        let mut rank = vec![0; self.order()];
        for (i, &x) in order.iter().enumerate() {
            rank[x] = i;
        }
        let rows = order
            .iter()
            .map(|&x| order.iter().map(|&y| rank[self.mul(x, y)]).collect())
            .collect();
        let gamma = self.gamma.iter().map(|(&c, &g)| (c, rank[g])).collect();
        AGenMonoid::new(rows, rank[self.identity], gamma).expect("relabelling preserves structure")
    }
}

/// The monoid of transformations generated by the letter actions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransformationMonoid {
    pub monoid: AGenMonoid,
    pub maps: Vec<Transformation>,
}

impl TransformationMonoid {
    pub fn index_of(&self, t: &Transformation) -> Option<usize> {
        self.maps.iter().position(|m| m == t)
    }
}

/// Γ: the transformation monoid of an algebra, enumerated breadth-first
/// from the identity, with `γ(a) = a_U`.
pub fn gamma_functor(u: &UnaryAlgebra) -> TransformationMonoid {
    let n = u.size();
    let gens: Vec<(char, Transformation)> = u
        .ops
        .iter()
        .map(|(&c, f)| (c, Transformation(f.clone())))
        .collect();
    let mut maps = vec![Transformation::identity(n)];
    let mut index: HashMap<Transformation, usize> = HashMap::from([(maps[0].clone(), 0)]);
    let mut i = 0;
    while i < maps.len() {
        for (_, g) in &gens {
            let h = maps[i].compose(g);
            if !index.contains_key(&h) {
                index.insert(h.clone(), maps.len());
                maps.push(h);
            }
        }
        i += 1;
    }
    let rows = maps
        .iter()
        .map(|f| maps.iter().map(|g| index[&f.compose(g)]).collect())
        .collect();
    let gamma = gens.iter().map(|(c, g)| (*c, index[g])).collect();
    let monoid = AGenMonoid::new(rows, 0, gamma).expect("composition is associative");
    TransformationMonoid { monoid, maps }
}

/// Ψ: the monoid acting on itself by left multiplication, distinguished at
/// the identity.
pub fn psi_functor(g: &AGenMonoid) -> UnaryAlgebra {
    let ops = g
        .gamma
        .iter()
        .map(|(&c, &m)| (c, (0..g.order()).map(|x| g.mul(m, x)).collect()))
        .collect();
    UnaryAlgebra::new(g.order(), ops, Some(g.identity)).expect("left multiplications are total")
}

/// A monoid homomorphism given elementwise.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonoidHom(pub Vec<usize>);

impl MonoidHom {
    /// `self ∘ first`.
    pub fn after(&self, first: &MonoidHom) -> MonoidHom {
        MonoidHom(first.0.iter().map(|&x| self.0[x]).collect())
    }
}

/// Checks that `map` is a homomorphism `g → h` preserving identity and
/// generators.
fn check_monoid_hom(g: &AGenMonoid, h: &AGenMonoid, map: &[usize]) -> bool {
    map.len() == g.order()
        && map[g.identity] == h.identity
        && g.gamma.iter().all(|(c, &x)| h.gamma(*c) == Some(map[x]))
        && (0..g.order()).all(|x| (0..g.order()).all(|y| map[g.mul(x, y)] == h.mul(map[x], map[y])))
}

/// The monoid map `w_U ↦ w_V` induced by an onto homomorphism `U → V`.
pub fn induced_hom(
    u: &UnaryAlgebra,
    v: &UnaryAlgebra,
    phi: &[usize],
) -> Result<(TransformationMonoid, TransformationMonoid, MonoidHom), UnaryError> {
    u.check_homomorphism(v, phi)?;
    if !onto(phi, v.size()) {
        return Err(UnaryError::NotOnto);
    }
    let (gu, gv) = (gamma_functor(u), gamma_functor(v));
    let map: Vec<usize> = (0..gu.monoid.order())
        .map(|x| gv.monoid.eval(gu.monoid.witness(x)).expect("same letters"))
        .collect();
    // Multiplicativity forces every word, not only the witness, to land on
    // the same image.
    assert!(
        check_monoid_hom(&gu.monoid, &gv.monoid, &map),
        "an onto homomorphism induces a well-defined monoid map"
    );
    Ok((gu, gv, MonoidHom(map)))
}

/// β: `Ψ(Γ(U)) → U`, `f ↦ f(1^U)`, checked to be an onto homomorphism
/// sending the identity to the distinguished element.
pub fn beta_map(u: &UnaryAlgebra) -> Result<Vec<usize>, UnaryError> {
    let d = u.require_one_generated()?;
    let gamma = gamma_functor(u);
    let psi = psi_functor(&gamma.monoid);
    let beta: Vec<usize> = gamma.maps.iter().map(|f| f.apply(d)).collect();
    psi.check_homomorphism(u, &beta)?;
    if !onto(&beta, u.size()) {
        return Err(UnaryError::NotOnto);
    }
    assert_eq!(beta[gamma.monoid.identity], d);
    Ok(beta)
}

/// Γ(Ψ(g)) ≅ g via `L_m ↦ L_m(1)`. Returns the map indexed by elements of
/// Γ(Ψ(g)), or `None` if it is not an isomorphism.
pub fn check_gamma_psi_iso(g: &AGenMonoid) -> Option<Vec<usize>> {
    let gp = gamma_functor(&psi_functor(g));
    let map: Vec<usize> = gp.maps.iter().map(|f| f.apply(g.identity)).collect();
    let bijective = map.len() == g.order() && onto(&map, g.order());
    (bijective && check_monoid_hom(&gp.monoid, g, &map)).then_some(map)
}

/// The unique homomorphism `U → V` matching distinguished elements, if
/// any.
pub fn algebra_hom(u: &UnaryAlgebra, v: &UnaryAlgebra) -> Result<Option<Vec<usize>>, UnaryError> {
    same_letters(&u.letters(), &v.letters())?;
    let du = u.require_one_generated()?;
    let dv = v.require_one_generated()?;
    let mut phi: Vec<Option<usize>> = vec![None; u.size()];
    phi[du] = Some(dv);
    let mut queue = VecDeque::from([du]);
    while let Some(x) = queue.pop_front() {
        let y = phi[x].expect("visited");
        for (c, f) in &u.ops {
            let (x2, y2) = (f[x], v.ops[c][y]);
            match phi[x2] {
                None => {
                    phi[x2] = Some(y2);
                    queue.push_back(x2);
                }
                Some(z) if z != y2 => return Ok(None),
                Some(_) => {}
            }
        }
    }
    Ok(Some(phi.into_iter().map(|p| p.expect("one-generated")).collect()))
}

pub fn hom_exists_algebra(u: &UnaryAlgebra, v: &UnaryAlgebra) -> Result<bool, UnaryError> {
    Ok(algebra_hom(u, v)?.is_some())
}

/// Whether `γ_g(a) ↦ γ_h(a)` extends to a monoid homomorphism, i.e. the
/// word kernel of `g` is contained in that of `h`.
pub fn hom_exists_monoid(g: &AGenMonoid, h: &AGenMonoid) -> Result<bool, UnaryError> {
    same_letters(&g.letters(), &h.letters())?;
    let mut map: Vec<Option<usize>> = vec![None; g.order()];
    map[g.identity] = Some(h.identity);
    let mut queue = VecDeque::from([g.identity]);
    while let Some(x) = queue.pop_front() {
        let y = map[x].expect("visited");
        for (c, &gx) in &g.gamma {
            let (x2, y2) = (g.mul(x, gx), h.mul(y, h.gamma[c]));
            match map[x2] {
                None => {
                    map[x2] = Some(y2);
                    queue.push_back(x2);
                }
                Some(z) if z != y2 => return Ok(false),
                Some(_) => {}
            }
        }
    }
    Ok(true)
}

/// `(Ψ(g) → U exists, g → Γ(U) exists)`; the two always agree.
pub fn adjunction_check(g: &AGenMonoid, u: &UnaryAlgebra) -> Result<(bool, bool), UnaryError> {
    let left = hom_exists_algebra(&psi_functor(g), u)?;
    let right = hom_exists_monoid(g, &gamma_functor(u).monoid)?;
    Ok((left, right))
}

/// Every self-map of `0..n`, in lexicographic order of image vectors.
pub fn all_maps(n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|f: Vec<usize>| {
                (0..n).map(move |x| {
                    let mut g = f.clone();
                    g.push(x);
                    g
                })
            })
            .collect();
    }
    out
}

/// All algebras over `letters` on `1..=max_points` points, with no
/// distinguished element.
pub fn all_algebras(letters: &[char], max_points: usize) -> Vec<UnaryAlgebra> {
    let mut out = Vec::new();
    for n in 1..=max_points {
        let maps = all_maps(n);
        let mut choices: Vec<Vec<&Vec<usize>>> = vec![Vec::new()];
        for _ in letters {
            choices = choices
                .into_iter()
                .flat_map(|c| {
                    maps.iter().map(move |f| {
                        let mut c = c.clone();
                        c.push(f);
                        c
                    })
                })
                .collect();
        }
        for c in choices {
            let ops = letters.iter().copied().zip(c.into_iter().cloned()).collect();
            out.push(UnaryAlgebra::new(n, ops, None).expect("total maps"));
        }
    }
    out
}

/// All 1-generated algebras over `letters` on at most `max_points` points.
pub fn one_generated_algebras(letters: &[char], max_points: usize) -> Vec<UnaryAlgebra> {
    all_algebras(letters, max_points)
        .into_iter()
        .flat_map(|u| {
            (0..u.size())
                .filter_map(|d| u.clone().with_distinguished(d).ok())
                .filter(|u| u.is_one_generated())
                .collect::<Vec<_>>()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdjunctionException {
    pub monoid: AGenMonoid,
    pub algebra: UnaryAlgebra,
    pub algebra_side: bool,
    pub monoid_side: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdjunctionReport {
    pub max_points: usize,
    pub algebras: usize,
    pub monoids: usize,
    pub pairs: usize,
    pub homs_found: usize,
    pub exceptions: Vec<AdjunctionException>,
    pub iso_failures: usize,
    pub beta_failures: usize,
}

impl AdjunctionReport {
    pub fn passed(&self) -> bool {
        self.exceptions.is_empty() && self.iso_failures == 0 && self.beta_failures == 0
    }
}

/// Every 1-generated algebra on at most `max_points` points over {a,b},
/// against every distinct monoid among their Γ-images.
pub fn adjunction_sweep(max_points: usize) -> AdjunctionReport {
    let letters = ['a', 'b'];
    let algebras = one_generated_algebras(&letters, max_points);
    let gammas: Vec<AGenMonoid> = algebras.iter().map(|u| gamma_functor(u).monoid).collect();
    let mut seen = BTreeSet::new();
    let mut monoids = Vec::new();
    for g in &gammas {
        let c = g.canonical();
        if seen.insert(serde_json::to_string(&c).expect("serializable")) {
            monoids.push(c);
        }
    }
    let psis: Vec<UnaryAlgebra> = monoids.iter().map(psi_functor).collect();
    let mut report = AdjunctionReport {
        max_points,
        algebras: algebras.len(),
        monoids: monoids.len(),
        pairs: 0,
        homs_found: 0,
        exceptions: Vec::new(),
        iso_failures: monoids.iter().filter(|g| check_gamma_psi_iso(g).is_none()).count(),
        beta_failures: algebras.iter().filter(|u| beta_map(u).is_err()).count(),
    };
    for (g, psi) in monoids.iter().zip(&psis) {
        for (u, gu) in algebras.iter().zip(&gammas) {
            let left = hom_exists_algebra(psi, u).expect("one-generated");
            let right = hom_exists_monoid(g, gu).expect("same letters");
            report.pairs += 1;
            report.homs_found += left as usize;
            if left != right {
                report.exceptions.push(AdjunctionException {
                    monoid: g.clone(),
                    algebra: u.clone(),
                    algebra_side: left,
                    monoid_side: right,
                });
            }
        }
    }
    report
}

/// `({0..n}, a(k) = max(0, k-1))`, distinguished at `n`.
pub fn countdown(n: usize) -> UnaryAlgebra {
    let a = (0..=n).map(|k| k.saturating_sub(1)).collect();
    UnaryAlgebra::new(n + 1, BTreeMap::from([('a', a)]), Some(n)).expect("total map")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollapseViolation {
    pub target: UnaryAlgebra,
    pub phi: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollapseReport {
    pub n: usize,
    pub max_points: usize,
    pub targets: usize,
    pub homomorphisms: usize,
    pub violations: Vec<CollapseViolation>,
}

/// For every homomorphism φ from the countdown algebra on `0..=n` into a
/// one-letter algebra on at most `max_points` points: once φ(m) = φ(k) for
/// some k < m, φ is constant on `0..=m`.
pub fn collapse_check(n: usize, max_points: usize) -> CollapseReport {
    let c = countdown(n);
    let mut report = CollapseReport {
        n,
        max_points,
        targets: 0,
        homomorphisms: 0,
        violations: Vec::new(),
    };
    for f in all_algebras(&['a'], max_points) {
        report.targets += 1;
        let a = f.op('a').expect("letter a").to_vec();
        // φ is fixed by the image of the generator n: φ(k) = a^{n-k}(φ(n)).
        for top in 0..f.size() {
            let mut phi = vec![0; n + 1];
            phi[n] = top;
            for k in (0..n).rev() {
                phi[k] = a[phi[k + 1]];
            }
            if c.check_homomorphism(&f, &phi).is_err() {
                continue;
            }
            report.homomorphisms += 1;
            let first_repeat = (1..=n).find(|&m| phi[..m].contains(&phi[m]));
            if let Some(m) = first_repeat {
                if phi[..=m].iter().any(|&y| y != phi[0]) {
                    report.violations.push(CollapseViolation {
                        target: f.clone(),
                        phi: phi.clone(),
                    });
                }
            }
        }
    }
    report
}

/// A chain `U_0 → U_1 → ⋯` of onto homomorphisms; `maps[i]` goes from
/// level `i` to level `i + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tower {
    pub levels: Vec<UnaryAlgebra>,
    pub maps: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerReport {
    pub levels: usize,
    pub compositions_checked: usize,
    /// Pairs `(w_U, w'_U, u)` at the top with `w_U(u) ≠ w'_U(u)`.
    pub separations_checked: usize,
    /// How many of those are separated only at the top level.
    pub separated_only_at_top: usize,
}

fn compose_maps(first: &[usize], second: &[usize]) -> Vec<usize> {
    first.iter().map(|&x| second[x]).collect()
}

/// Checks that each map is an onto homomorphism, that induced monoid maps
/// compose like the algebra maps, and that the top's distinct values
/// `w_U(u) ≠ w'_U(u)` stay apart somewhere down the tower.
pub fn tower_check(tower: &Tower) -> Result<TowerReport, UnaryError> {
    let n = tower.levels.len();
    if tower.maps.len() + 1 != n {
        return Err(UnaryError::BadMap {
            found: tower.maps.len(),
            expected: n.saturating_sub(1),
        });
    }
    // to_level[i][j]: composite map from level i to level j ≥ i.
    let mut to_level: Vec<Vec<Vec<usize>>> = Vec::new();
    for i in 0..n {
        let mut row = vec![(0..tower.levels[i].size()).collect::<Vec<_>>()];
        for j in i..n - 1 {
            let next = compose_maps(row.last().expect("nonempty"), &tower.maps[j]);
            row.push(next);
        }
        to_level.push(row);
    }
    let mut induced = Vec::new();
    for i in 0..n - 1 {
        induced.push(induced_hom(&tower.levels[i], &tower.levels[i + 1], &tower.maps[i])?.2);
    }
    let mut compositions = 0;
    for i in 0..n {
        let mut acc: Option<MonoidHom> = None;
        for j in i + 1..n {
            let step = &induced[j - 1];
            acc = Some(match acc {
                None => step.clone(),
                Some(prev) => step.after(&prev),
            });
            if j > i + 1 {
                let direct = induced_hom(&tower.levels[i], &tower.levels[j], &to_level[i][j - i])?.2;
                if Some(&direct) != acc.as_ref() {
                    return Err(UnaryError::NotFunctorial(i, j));
                }
                compositions += 1;
            }
        }
    }
    let top = &tower.levels[0];
    let maps = gamma_functor(top).maps;
    let mut report = TowerReport {
        levels: n,
        compositions_checked: compositions,
        separations_checked: 0,
        separated_only_at_top: 0,
    };
    for (x, f) in maps.iter().enumerate() {
        for g in &maps[x + 1..] {
            for u in 0..top.size() {
                let (p, q) = (f.apply(u), g.apply(u));
                if p == q {
                    continue;
                }
                report.separations_checked += 1;
                if (1..n).all(|j| to_level[0][j][p] == to_level[0][j][q]) {
                    report.separated_only_at_top += 1;
                }
            }
        }
    }
    Ok(report)
}

/// K_n with an identity adjoined, generated by its letters.
pub fn kn_monoid(alphabet: &Alphabet, n: usize) -> Result<AGenMonoid, UnaryError> {
    let kn = KnSemigroup::new(alphabet.clone(), n)?;
    let m = kn.order();
    let rows = (0..=m)
        .map(|x| {
            (0..=m)
                .map(|y| match (x, y) {
                    (0, _) => y,
                    (_, 0) => x,
                    _ => 1 + kn.mul(x - 1, y - 1),
                })
                .collect()
        })
        .collect();
    let mut names = vec!["1".to_string()];
    names.extend((0..m).map(|x| kn.name(x)));
    let table = FinSemigroup::new(names, rows)?;
    let gamma = alphabet
        .letters()
        .iter()
        .map(|&c| (c, 1 + kn.index(&[c]).expect("letter")))
        .collect();
    AGenMonoid::from_semigroup(table, 0, gamma)
}

/// The tower `Ψ(K_top^I) → ⋯ → Ψ(K_bottom^I)` with truncation maps.
pub fn truncation_tower(alphabet: &Alphabet, top: usize, bottom: usize) -> Result<Tower, UnaryError> {
    let mut levels = Vec::new();
    let mut semigroups = Vec::new();
    for n in (bottom..=top).rev() {
        levels.push(psi_functor(&kn_monoid(alphabet, n)?));
        semigroups.push(KnSemigroup::new(alphabet.clone(), n)?);
    }
    let maps = semigroups
        .windows(2)
        .map(|w| {
            let (hi, lo) = (&w[0], &w[1]);
            let mut m = vec![0];
            m.extend((0..hi.order()).map(|x| 1 + lo.index(&hi.word(x)).expect("same letters")));
            m
        })
        .collect();
    Ok(Tower { levels, maps })
}

/// A tower of countdown algebras `C_top → ⋯ → C_bottom`, each map sending
/// generator to generator.
pub fn countdown_tower(top: usize, bottom: usize) -> Tower {
    let levels: Vec<UnaryAlgebra> = (bottom..=top).rev().map(countdown).collect();
    let maps = (bottom + 1..=top)
        .rev()
        .map(|n| (0..=n).map(|k: usize| k.saturating_sub(1)).collect())
        .collect();
    Tower { levels, maps }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alg(size: usize, a: &[usize], b: &[usize], d: Option<usize>) -> UnaryAlgebra {
        UnaryAlgebra::from_ops(size, &[('a', a), ('b', b)], d).unwrap()
    }

    #[test]
    fn gamma_examples() {
        let u = alg(2, &[1, 1], &[0, 1], Some(0));
        let g = gamma_functor(&u);
        assert_eq!(g.monoid.order(), 2);
        assert_eq!(g.maps[g.monoid.gamma('a').unwrap()].images(), [1, 1]);
        assert_eq!(g.monoid.gamma('b'), Some(g.monoid.identity()));

        assert_eq!(gamma_functor(&alg(1, &[0], &[0], Some(0))).monoid.order(), 1);

        let dec = alg(4, &[0, 0, 1, 2], &[0, 1, 2, 3], Some(3));
        let g = gamma_functor(&dec);
        assert_eq!(g.monoid.order(), 4);
        let witnesses: Vec<String> = (0..4).map(|x| g.monoid.witness(x).iter().collect()).collect();
        assert_eq!(witnesses, ["", "a", "aa", "aaa"]);
    }

    #[test]
    fn witnesses_are_shortlex_least() {
        // Oracle: enumerate words in shortlex order and record first hits.
        let u = alg(3, &[1, 2, 0], &[0, 0, 2], Some(0));
        let g = gamma_functor(&u);
        let mut first: BTreeMap<Transformation, String> = BTreeMap::new();
        let mut words = vec![String::new()];
        for _ in 0..10 {
            for w in &words {
                let t = Transformation((0..3).map(|x| u.act(&w.chars().collect::<Vec<_>>(), x)).collect());
                first.entry(t).or_insert_with(|| w.clone());
            }
            words = words.iter().flat_map(|w| [format!("{w}a"), format!("{w}b")]).collect();
        }
        assert_eq!(first.len(), g.monoid.order());
        for (x, t) in g.maps.iter().enumerate() {
            assert_eq!(&first[t], &g.monoid.witness(x).iter().collect::<String>());
        }
    }

    #[test]
    fn psi_examples() {
        let t = AGenMonoid::trivial(&['a', 'b']);
        let p = psi_functor(&t);
        assert_eq!((p.size(), p.distinguished()), (1, Some(0)));

        let m = AGenMonoid::new(vec![vec![0, 1], vec![1, 1]], 0, BTreeMap::from([('a', 1), ('b', 0)])).unwrap();
        let p = psi_functor(&m);
        assert_eq!(p.op('a').unwrap(), [1, 1]);
        assert_eq!(p.op('b').unwrap(), [0, 1]);
        assert_eq!(p.distinguished(), Some(0));

        let k2 = kn_monoid(&Alphabet::ab(), 2).unwrap();
        let p = psi_functor(&k2);
        assert_eq!(p.size(), 7);
        // Every element is its witness acting on the distinguished point.
        for x in 0..p.size() {
            assert_eq!(p.act(k2.witness(x), 0), x);
        }
    }

    #[test]
    fn monoid_validation() {
        let g = BTreeMap::from([('a', 1)]);
        assert!(matches!(
            AGenMonoid::new(vec![vec![0, 1], vec![1, 1]], 1, g.clone()),
            Err(UnaryError::NotIdentity(1))
        ));
        assert!(matches!(
            AGenMonoid::new(vec![vec![0, 1], vec![1, 1]], 0, BTreeMap::from([('a', 0)])),
            Err(UnaryError::NotGenerated)
        ));
        let json = r#"{"table":[[0,1],[1,0]],"identity":0,"gamma":{"a":1,"b":0}}"#;
        let z2: AGenMonoid = serde_json::from_str(json).unwrap();
        assert_eq!(serde_json::to_string(&z2).unwrap(), json);
        assert!(check_gamma_psi_iso(&z2).is_some());
    }

    #[test]
    fn algebra_json() {
        let json = r#"{"size":2,"ops":{"a":[1,1],"b":[0,1]},"distinguished":0}"#;
        let u: UnaryAlgebra = serde_json::from_str(json).unwrap();
        assert_eq!(serde_json::to_string(&u).unwrap(), json);
        assert!(serde_json::from_str::<UnaryAlgebra>(r#"{"size":2,"ops":{"a":[2,0]}}"#).is_err());
    }

    #[test]
    fn induced_homomorphisms() {
        let u = alg(2, &[1, 0], &[0, 1], Some(0));
        let (gu, _, id) = induced_hom(&u, &u, &[0, 1]).unwrap();
        assert_eq!(id, MonoidHom((0..gu.monoid.order()).collect()));

        let point = alg(1, &[0], &[0], Some(0));
        let (_, gv, h) = induced_hom(&u, &point, &[0, 0]).unwrap();
        assert_eq!(gv.monoid.order(), 1);
        assert!(h.0.iter().all(|&x| x == 0));

        let dec = UnaryAlgebra::from_ops(4, &[('a', &[0, 0, 1, 2])], Some(3)).unwrap();
        let two = UnaryAlgebra::from_ops(2, &[('a', &[0, 0])], Some(1)).unwrap();
        let (gu, gv, h) = induced_hom(&dec, &two, &[0, 0, 0, 1]).unwrap();
        for k in 0..4 {
            let src = gu.monoid.eval(&vec!['a'; k]).unwrap();
            assert_eq!(h.0[src], gv.monoid.eval(&vec!['a'; k.min(1)]).unwrap());
        }
        assert!(matches!(
            induced_hom(&dec, &two, &[0, 1, 0, 1]),
            Err(UnaryError::NotHomomorphism { .. })
        ));
        let coarse = UnaryAlgebra::from_ops(3, &[('a', &[0, 0, 1])], Some(2)).unwrap();
        assert!(matches!(induced_hom(&two, &coarse, &[0, 1]), Err(UnaryError::NotOnto)));
    }

    #[test]
    fn beta_examples() {
        let point = alg(1, &[0], &[0], Some(0));
        assert_eq!(beta_map(&point).unwrap(), [0]);
        let u = alg(2, &[0, 0], &[0, 1], Some(1));
        let b = beta_map(&u).unwrap();
        assert_eq!(b.len(), 2);
        assert!(onto(&b, 2));
        let stuck = alg(2, &[0, 1], &[0, 1], Some(0));
        assert_eq!(beta_map(&stuck), Err(UnaryError::NotOneGenerated));
        // On Ψ(g) it is a bijection.
        let k2 = kn_monoid(&Alphabet::ab(), 2).unwrap();
        let b = beta_map(&psi_functor(&k2)).unwrap();
        assert_eq!(b.iter().copied().collect::<BTreeSet<_>>().len(), 7);
    }

    /// Oracle: kernel inclusion on all word pairs up to a length bound.
    fn kernel_included(u: &UnaryAlgebra, v: &UnaryAlgebra, max_len: usize) -> bool {
        let mut words: Vec<Vec<char>> = vec![Vec::new()];
        let mut all = words.clone();
        for _ in 0..max_len {
            words = words
                .iter()
                .flat_map(|w| ['a', 'b'].map(|c| [w.clone(), vec![c]].concat()))
                .collect();
            all.extend(words.iter().cloned());
        }
        let (du, dv) = (u.distinguished().unwrap(), v.distinguished().unwrap());
        let mut image: HashMap<usize, usize> = HashMap::new();
        all.iter().all(|w| {
            let (x, y) = (u.act(w, du), v.act(w, dv));
            *image.entry(x).or_insert(y) == y
        })
    }

    #[test]
    fn hom_existence_matches_kernel_oracle() {
        let algebras = one_generated_algebras(&['a', 'b'], 2);
        let mut found = 0;
        for u in &algebras {
            assert!(hom_exists_algebra(u, u).unwrap());
            for v in &algebras {
                let bound = u.size() * v.size();
                let h = hom_exists_algebra(u, v).unwrap();
                assert_eq!(h, kernel_included(u, v, bound));
                found += h as usize;
            }
        }
        assert!(found > algebras.len());
        let g = gamma_functor(&algebras[3]).monoid;
        assert!(hom_exists_monoid(&g, &AGenMonoid::trivial(&['a', 'b'])).unwrap());
    }

    #[test]
    fn quotients_map_down_not_up() {
        let big = alg(3, &[1, 2, 2], &[0, 1, 2], Some(0));
        let small = alg(2, &[1, 1], &[0, 1], Some(0));
        assert!(hom_exists_algebra(&big, &small).unwrap());
        assert!(!hom_exists_algebra(&small, &big).unwrap());
    }

    #[test]
    fn adjunction_examples() {
        let t = AGenMonoid::trivial(&['a', 'b']);
        let point = alg(1, &[0], &[0], Some(0));
        assert_eq!(adjunction_check(&t, &point).unwrap(), (true, true));
        for u in one_generated_algebras(&['a', 'b'], 2) {
            let g = gamma_functor(&u).monoid;
            assert_eq!(adjunction_check(&g, &u).unwrap(), (true, true));
        }
    }

    #[test]
    fn small_adjunction_sweep() {
        let r = adjunction_sweep(2);
        assert!(r.passed(), "{:?}", r.exceptions.first());
        assert_eq!(r.pairs, r.algebras * r.monoids);
    }

    #[test]
    fn collapse_small() {
        let r = collapse_check(6, 3);
        assert!(r.violations.is_empty());
        assert!(r.homomorphisms > r.targets);
        let point = collapse_check(5, 1);
        assert_eq!((point.targets, point.homomorphisms), (1, 1));
    }

    #[test]
    fn towers() {
        let r = tower_check(&countdown_tower(4, 2)).unwrap();
        assert_eq!(r.levels, 3);
        assert_eq!(r.compositions_checked, 1);

        let u = alg(3, &[1, 2, 0], &[0, 0, 2], Some(0));
        let flat = Tower {
            levels: vec![u.clone(), u.clone(), u],
            maps: vec![vec![0, 1, 2]; 2],
        };
        let r = tower_check(&flat).unwrap();
        assert_eq!(r.separated_only_at_top, 0);

        let t = truncation_tower(&Alphabet::ab(), 4, 2).unwrap();
        let r = tower_check(&t).unwrap();
        assert!(r.separations_checked > 0);

        let mut bad = countdown_tower(3, 2);
        bad.maps[0] = vec![0, 1, 0, 1];
        assert!(tower_check(&bad).is_err());
    }
}
