//! Pseudowords over the pseudovariety K.
//!
//! The free pro-K semigroup on a finite alphabet consists of the finite
//! nonempty words together with the right-infinite words, where every
//! infinite word is a left zero and everything else multiplies by
//! concatenation. Only eventually periodic infinite words `pre·per·per·…`
//! are representable here; they are kept in a canonical form so that
//! structural equality is equality of pseudowords.

use std::borrow::Cow;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("empty period")]
    EmptyPeriod,
    #[error("finite pseudowords are nonempty")]
    EmptyWord,
    #[error("alphabet must be nonempty")]
    EmptyAlphabet,
    #[error("letter {0:?} occurs twice in the alphabet")]
    DuplicateLetter(char),
    #[error("letter {0:?} cannot be used in literals")]
    ReservedLetter(char),
    #[error("parse error at {position}: {message}")]
    Parse { position: usize, message: String },
}

fn is_reserved(c: char) -> bool {
    matches!(c, '(' | ')' | '^') || c.is_whitespace()
}

/// An ordered finite set of single-character letters.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(into = "String")]
pub struct Alphabet(Vec<char>);

impl Alphabet {
    pub fn new(letters: impl IntoIterator<Item = char>) -> Result<Self, WordError> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for c in letters {
            if is_reserved(c) {
                return Err(WordError::ReservedLetter(c));
            }
            if !seen.insert(c) {
                return Err(WordError::DuplicateLetter(c));
            }
            out.push(c);
        }
        if out.is_empty() {
            return Err(WordError::EmptyAlphabet);
        }
        Ok(Alphabet(out))
    }

    /// The two-letter alphabet `{a, b}` used throughout.
    pub fn ab() -> Self {
        Alphabet(vec!['a', 'b'])
    }

    pub fn letters(&self) -> &[char] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, c: char) -> bool {
        self.0.contains(&c)
    }

    pub fn index_of(&self, c: char) -> Option<usize> {
        self.0.iter().position(|&l| l == c)
    }
}

impl From<Alphabet> for String {
    fn from(a: Alphabet) -> String {
        a.0.into_iter().collect()
    }
}

impl<'de> Deserialize<'de> for Alphabet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Alphabet::new(s.chars()).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Repr {
    Finite(Vec<char>),
    Omega { pre: Vec<char>, per: Vec<char> },
}

/// A pseudoword of Ω_A K in canonical form.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KWord(Repr);

/// Borrowed view of a [`KWord`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KWordView<'a> {
    Finite(&'a [char]),
    Omega { pre: &'a [char], per: &'a [char] },
}

/// Length of the shortest `d` with `per = (per[..d])^(len/d)`.
fn primitive_root_len(per: &[char]) -> usize {
    let n = per.len();
    (1..=n)
        .find(|&d| n.is_multiple_of(d) && per.chunks(d).all(|chunk| chunk == &per[..d]))
        .unwrap_or(n)
}

/// Canonical form of the infinite word `pre·per·per·…`: the period is
/// primitive and the preperiod cannot be shortened by rotating the period.
pub fn normalize(pre: &[char], per: &[char]) -> Result<KWord, WordError> {
    if per.is_empty() {
        return Err(WordError::EmptyPeriod);
    }
    let mut per = per[..primitive_root_len(per)].to_vec();
    let mut pre = pre.to_vec();
    while let (Some(&p), Some(&q)) = (pre.last(), per.last()) {
        if p != q {
            break;
        }
        pre.pop();
        per.rotate_right(1);
    }
    Ok(KWord(Repr::Omega { pre, per }))
}

impl KWord {
    pub fn finite(letters: impl Into<Vec<char>>) -> Result<Self, WordError> {
        let letters = letters.into();
        if letters.is_empty() {
            return Err(WordError::EmptyWord);
        }
        Ok(KWord(Repr::Finite(letters)))
    }

    pub fn omega(pre: &[char], per: &[char]) -> Result<Self, WordError> {
        normalize(pre, per)
    }

    pub fn letter(c: char) -> Self {
        KWord(Repr::Finite(vec![c]))
    }

    /// Parses a literal; panics on malformed input. Meant for constants in
    /// code and tests.
    pub fn lit(s: &str) -> Self {
        s.parse()
            .unwrap_or_else(|e| panic!("bad pseudoword literal {s:?}: {e}"))
    }

    pub fn view(&self) -> KWordView<'_> {
        match &self.0 {
            Repr::Finite(w) => KWordView::Finite(w),
            Repr::Omega { pre, per } => KWordView::Omega { pre, per },
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.0, Repr::Finite(_))
    }

    pub fn is_omega(&self) -> bool {
        !self.is_finite()
    }

    /// Length of a finite word; `None` for infinite ones.
    pub fn len(&self) -> Option<usize> {
        match &self.0 {
            Repr::Finite(w) => Some(w.len()),
            Repr::Omega { .. } => None,
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The letters of the (possibly infinite) expansion, in order.
    pub fn letters(&self) -> Box<dyn Iterator<Item = char> + '_> {
        match &self.0 {
            Repr::Finite(w) => Box::new(w.iter().copied()),
            Repr::Omega { pre, per } => Box::new(pre.iter().chain(per.iter().cycle()).copied()),
        }
    }

    pub fn content(&self) -> BTreeSet<char> {
        match &self.0 {
            Repr::Finite(w) => w.iter().copied().collect(),
            Repr::Omega { pre, per } => pre.iter().chain(per).copied().collect(),
        }
    }

    /// Finite-or-infinite product. Infinite words are left zeros.
    pub fn multiply(&self, other: &KWord) -> KWord {
        match (&self.0, &other.0) {
            (Repr::Omega { .. }, _) => self.clone(),
            (Repr::Finite(u), Repr::Finite(v)) => {
                let mut w = u.clone();
                w.extend_from_slice(v);
                KWord(Repr::Finite(w))
            }
            (Repr::Finite(u), Repr::Omega { pre, per }) => {
                let mut p = u.clone();
                p.extend_from_slice(pre);
                normalize(&p, per).expect("canonical period is nonempty")
            }
        }
    }

    /// `self^k` for `k >= 1`.
    pub fn pow(&self, k: usize) -> KWord {
        assert!(k >= 1, "pseudowords have no empty power");
        let mut acc = self.clone();
        for _ in 1..k {
            acc = acc.multiply(self);
        }
        acc
    }

    /// The idempotent `x^ω`: a finite word `u` goes to `u^∞`, infinite
    /// words are fixed.
    pub fn omega_power(&self) -> KWord {
        match &self.0 {
            Repr::Finite(u) => normalize(&[], u).expect("finite words are nonempty"),
            Repr::Omega { .. } => self.clone(),
        }
    }

    /// The shortest prefix with the same content as the whole word.
    pub fn tilde0(&self) -> Vec<char> {
        let content = self.content();
        let mut seen = BTreeSet::new();
        let mut prefix = Vec::new();
        for c in self.letters() {
            prefix.push(c);
            seen.insert(c);
            if seen.len() == content.len() {
                break;
            }
        }
        prefix
    }

    /// Image in Ω_A K_n: the first `min(n, |x|)` letters.
    pub fn truncate(&self, n: usize) -> Vec<char> {
        self.letters().take(n).collect()
    }

    pub fn substitute(&self, sigma: &Substitution) -> KWord {
        sigma.apply(self)
    }
}

impl fmt::Display for KWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Finite(w) => write!(f, "{}", w.iter().collect::<String>()),
            Repr::Omega { pre, per } => write!(
                f,
                "{}({})^w",
                pre.iter().collect::<String>(),
                per.iter().collect::<String>()
            ),
        }
    }
}

impl fmt::Debug for KWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "KWord({self})")
    }
}

impl FromStr for KWord {
    type Err = WordError;

    /// `finite := letter+`, `omega := finite? '(' finite ')^w'` (`^ω` is
    /// accepted as well).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let chars: Vec<char> = s.chars().collect();
        let err = |position: usize, message: &str| WordError::Parse {
            position,
            message: message.to_string(),
        };
        let mut i = 0;
        let mut pre = Vec::new();
        while i < chars.len() && !is_reserved(chars[i]) {
            pre.push(chars[i]);
            i += 1;
        }
        if i == chars.len() {
            return if pre.is_empty() {
                Err(err(0, "empty literal"))
            } else {
                Ok(KWord(Repr::Finite(pre)))
            };
        }
        if chars[i] != '(' {
            return Err(err(i, "unexpected character"));
        }
        let open = i;
        i += 1;
        let mut per = Vec::new();
        while i < chars.len() && !is_reserved(chars[i]) {
            per.push(chars[i]);
            i += 1;
        }
        if i == chars.len() || chars[i] != ')' {
            return Err(err(i, "expected ')'"));
        }
        if per.is_empty() {
            return Err(err(open, "empty period"));
        }
        i += 1;
        if i == chars.len() || chars[i] != '^' {
            return Err(err(i, "expected '^w'"));
        }
        i += 1;
        if i == chars.len() || !matches!(chars[i], 'w' | 'ω') {
            return Err(err(i, "expected 'w' after '^'"));
        }
        i += 1;
        if i != chars.len() {
            return Err(err(i, "trailing characters"));
        }
        normalize(&pre, &per)
    }
}

impl Serialize for KWord {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for KWord {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = Cow::<str>::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A continuous endomorphism of Ω_A K, given by the images of letters.
/// Letters without an explicit image are fixed.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Substitution(BTreeMap<char, KWord>);

enum Image {
    Finite(Vec<char>),
    Absorbed(KWord),
}

impl Substitution {
    pub fn identity() -> Self {
        Substitution(BTreeMap::new())
    }

    pub fn new(images: impl IntoIterator<Item = (char, KWord)>) -> Self {
        Substitution(images.into_iter().collect())
    }

    /// Shorthand: `Substitution::parse(&[('a', "ab"), ('b', "(b)^w")])`.
    pub fn parse(images: &[(char, &str)]) -> Self {
        Substitution::new(images.iter().map(|&(c, w)| (c, KWord::lit(w))))
    }

    pub fn image(&self, c: char) -> Cow<'_, KWord> {
        match self.0.get(&c) {
            Some(w) => Cow::Borrowed(w),
            None => Cow::Owned(KWord::letter(c)),
        }
    }

    pub fn images(&self) -> &BTreeMap<char, KWord> {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|(&c, w)| *w == KWord::letter(c))
    }

    /// Image of a finite (possibly empty) letter sequence. Stops at the
    /// first infinite image, which absorbs everything to its right.
    fn image_of_seq(&self, seq: &[char]) -> Image {
        let mut acc = Vec::new();
        for &c in seq {
            match self.image(c).view() {
                KWordView::Finite(w) => acc.extend_from_slice(w),
                KWordView::Omega { pre, per } => {
                    acc.extend_from_slice(pre);
                    return Image::Absorbed(normalize(&acc, per).expect("nonempty period"));
                }
            }
        }
        Image::Finite(acc)
    }

    pub fn apply(&self, x: &KWord) -> KWord {
        match x.view() {
            KWordView::Finite(w) => match self.image_of_seq(w) {
                Image::Finite(v) => KWord::finite(v).expect("images are nonempty"),
                Image::Absorbed(z) => z,
            },
            KWordView::Omega { pre, per } => match self.image_of_seq(pre) {
                Image::Absorbed(z) => z,
                Image::Finite(p) => match self.image_of_seq(per) {
                    Image::Finite(q) => normalize(&p, &q).expect("images are nonempty"),
                    Image::Absorbed(z) => match KWord::finite(p) {
                        Ok(prefix) => prefix.multiply(&z),
                        Err(_) => z,
                    },
                },
            },
        }
    }

    /// `(self ∘ other)(x) = self(other(x))`.
    pub fn compose(&self, other: &Substitution) -> Substitution {
        let mut letters: BTreeSet<char> = self.0.keys().copied().collect();
        letters.extend(other.0.keys().copied());
        Substitution(
            letters
                .into_iter()
                .map(|c| (c, self.apply(&other.image(c))))
                .collect(),
        )
    }
}

/// Shorthand for letter sequences in code: `seq("abba")`.
pub fn seq(s: &str) -> Vec<char> {
    s.chars().collect()
}
