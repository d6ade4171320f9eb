//! Words with a pumped parameter `k`, such as `a(b)^k(a)^w`, and their
//! limits as `k` grows.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::words::{normalize, KWord};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TemplateError {
    #[error("template syntax error at {position}: {message}")]
    Parse { position: usize, message: String },
    #[error("template evaluates to the empty word")]
    Empty,
    #[error("the parameter k must be at least 1")]
    ZeroK,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exponent {
    One,
    K,
    Omega,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Atom {
    pub base: Vec<char>,
    pub exponent: Exponent,
}

/// A sequence of atoms `w`, `(w)^k` and a final optional `(w)^w`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PumpTemplate {
    atoms: Vec<Atom>,
}

impl PumpTemplate {
    pub fn new(atoms: Vec<Atom>) -> Result<Self, TemplateError> {
        for (i, atom) in atoms.iter().enumerate() {
            if atom.exponent == Exponent::Omega {
                if i + 1 != atoms.len() {
                    return Err(parse_err(0, "an ω atom must come last"));
                }
                if atom.base.is_empty() {
                    return Err(parse_err(0, "an ω atom needs a nonempty base"));
                }
            }
        }
        Ok(PumpTemplate { atoms })
    }

    /// A template that ignores `k`.
    pub fn constant(w: &KWord) -> Self {
        w.to_string().parse().expect("word literals are templates")
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    /// Whether the value depends on `k`.
    pub fn is_pumped(&self) -> bool {
        self.first_pump().is_some()
    }

    fn first_pump(&self) -> Option<usize> {
        self.atoms
            .iter()
            .position(|a| a.exponent == Exponent::K && !a.base.is_empty())
    }

    pub fn eval(&self, k: usize) -> Result<KWord, TemplateError> {
        if k == 0 {
            return Err(TemplateError::ZeroK);
        }
        let mut letters = Vec::new();
        for atom in &self.atoms {
            match atom.exponent {
                Exponent::One => letters.extend_from_slice(&atom.base),
                Exponent::K => {
                    for _ in 0..k {
                        letters.extend_from_slice(&atom.base);
                    }
                }
                Exponent::Omega => {
                    return Ok(normalize(&letters, &atom.base).expect("nonempty base"));
                }
            }
        }
        KWord::finite(letters).map_err(|_| TemplateError::Empty)
    }

    /// The limit as `k → ∞`: the first pumped atom becomes an ω tail that
    /// absorbs everything after it.
    pub fn limit(&self) -> Result<KWord, TemplateError> {
        let Some(i) = self.first_pump() else {
            return self.eval(1);
        };
        let prefix = self.prefix_before(i);
        Ok(normalize(&prefix, &self.atoms[i].base).expect("nonempty base"))
    }

    /// Letters before atom `i`, with pumps taken once (only empty pumps can
    /// precede the first real one).
    fn prefix_before(&self, i: usize) -> Vec<char> {
        self.atoms[..i]
            .iter()
            .flat_map(|a| a.base.iter().copied())
            .collect()
    }

    /// How many leading letters `eval(k)` is guaranteed to share with the
    /// limit; `None` when the template is constant.
    pub fn agreement_depth(&self, k: usize) -> Option<usize> {
        let i = self.first_pump()?;
        Some(self.prefix_before(i).len() + k * self.atoms[i].base.len())
    }

    /// Checks the guaranteed agreement of `eval(k)` with the limit.
    pub fn converges_at(&self, k: usize) -> Result<bool, TemplateError> {
        let (v, l) = (self.eval(k)?, self.limit()?);
        Ok(match self.agreement_depth(k) {
            None => v == l,
            Some(d) => v.truncate(d) == l.truncate(d),
        })
    }
}

fn parse_err(position: usize, message: &str) -> TemplateError {
    TemplateError::Parse {
        position,
        message: message.to_string(),
    }
}

fn is_plain(c: char) -> bool {
    !matches!(c, '(' | ')' | '^') && !c.is_whitespace()
}

impl FromStr for PumpTemplate {
    type Err = TemplateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let chars: Vec<char> = s.chars().collect();
        let mut atoms = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            if is_plain(chars[i]) {
                let start = i;
                while i < chars.len() && is_plain(chars[i]) {
                    i += 1;
                }
                atoms.push(Atom {
                    base: chars[start..i].to_vec(),
                    exponent: Exponent::One,
                });
                continue;
            }
            if chars[i] != '(' {
                return Err(parse_err(i, "unexpected character"));
            }
            let open = i;
            i += 1;
            let start = i;
            while i < chars.len() && is_plain(chars[i]) {
                i += 1;
            }
            let base = chars[start..i].to_vec();
            if chars.get(i) != Some(&')') {
                return Err(parse_err(i, "expected ')'"));
            }
            if chars.get(i + 1) != Some(&'^') {
                return Err(parse_err(i + 1, "expected '^'"));
            }
            let exponent = match chars.get(i + 2) {
                Some('k') => Exponent::K,
                Some('w' | 'ω') => Exponent::Omega,
                _ => return Err(parse_err(i + 2, "expected exponent 'k' or 'w'")),
            };
            if exponent == Exponent::Omega {
                if base.is_empty() {
                    return Err(parse_err(open, "an ω atom needs a nonempty base"));
                }
                if i + 3 != chars.len() {
                    return Err(parse_err(i + 3, "an ω atom must come last"));
                }
            }
            atoms.push(Atom { base, exponent });
            i += 3;
        }
        if atoms.is_empty() {
            return Err(parse_err(0, "empty template"));
        }
        Ok(PumpTemplate { atoms })
    }
}

impl fmt::Display for PumpTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for atom in &self.atoms {
            let base: String = atom.base.iter().collect();
            match atom.exponent {
                Exponent::One => write!(f, "{base}")?,
                Exponent::K => write!(f, "({base})^k")?,
                Exponent::Omega => write!(f, "({base})^w")?,
            }
        }
        Ok(())
    }
}

impl Serialize for PumpTemplate {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PumpTemplate {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
