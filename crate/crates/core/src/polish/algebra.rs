use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Signature, Term};
use crate::unary::all_maps;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("the carrier must be nonempty")]
    EmptyCarrier,
    #[error("table of `{0}` has the wrong length or leaves the carrier")]
    BadTable(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("variable `{0}` is unassigned")]
    Unassigned(String),
    #[error("the algebra has no operation `{0}`")]
    UnknownSymbol(String),
    #[error("`{0}` applied to the wrong number of arguments")]
    ArityMismatch(String),
}

/// An operation table, indexed by the argument tuple read as a base-|A|
/// numeral with the first argument most significant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Operation {
    pub arity: usize,
    pub table: Vec<usize>,
}

impl Operation {
    pub fn apply(&self, size: usize, args: &[usize]) -> usize {
        self.table[args.iter().fold(0, |acc, &a| acc * size + a)]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteAlgebra {
    elements: Vec<String>,
    ops: BTreeMap<String, Operation>,
}

impl FiniteAlgebra {
    pub fn new(elements: Vec<String>, ops: BTreeMap<String, Operation>) -> Result<Self, AlgebraError> {
        let n = elements.len();
        if n == 0 {
            return Err(AlgebraError::EmptyCarrier);
        }
        for (name, op) in &ops {
            let expected = u32::try_from(op.arity).ok().and_then(|a| n.checked_pow(a));
            if Some(op.table.len()) != expected || op.table.iter().any(|&x| x >= n) {
                return Err(AlgebraError::BadTable(name.clone()));
            }
        }
        Ok(FiniteAlgebra { elements, ops })
    }

    /// Tabulates `f(symbol, args)` for every symbol of `sig`.
    pub fn from_fn(
        elements: Vec<String>,
        sig: &Signature,
        f: impl Fn(&str, &[usize]) -> usize,
    ) -> Result<Self, AlgebraError> {
        let n = elements.len();
        let mut ops = BTreeMap::new();
        for (name, arity) in sig.symbols() {
            let mut table = Vec::with_capacity(n.pow(arity as u32));
            let mut args = vec![0; arity];
            for _ in 0..n.pow(arity as u32) {
                table.push(f(name, &args));
                for slot in args.iter_mut().rev() {
                    *slot += 1;
                    if *slot < n {
                        break;
                    }
                    *slot = 0;
                }
            }
            ops.insert(name.to_string(), Operation { arity, table });
        }
        Self::new(elements, ops)
    }

    pub fn size(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn element(&self, name: &str) -> Option<usize> {
        self.elements.iter().position(|e| e == name)
    }

    pub fn op(&self, name: &str) -> Option<&Operation> {
        self.ops.get(name)
    }

    pub fn ops(&self) -> impl Iterator<Item = (&str, &Operation)> {
        self.ops.iter().map(|(s, o)| (s.as_str(), o))
    }

    pub fn apply(&self, name: &str, args: &[usize]) -> Result<usize, EvalError> {
        let op = self.op(name).ok_or_else(|| EvalError::UnknownSymbol(name.to_string()))?;
        if op.arity != args.len() {
            return Err(EvalError::ArityMismatch(name.to_string()));
        }
        Ok(op.apply(self.size(), args))
    }
}

pub fn evaluate(t: &Term, algebra: &FiniteAlgebra, assignment: &BTreeMap<String, usize>) -> Result<usize, EvalError> {
    match t {
        Term::Var(x) => assignment.get(x).copied().ok_or_else(|| EvalError::Unassigned(x.clone())),
        Term::App(f, args) => {
            let values = args
                .iter()
                .map(|a| evaluate(a, algebra, assignment))
                .collect::<Result<Vec<_>, _>>()?;
            algebra.apply(f, &values)
        }
    }
}

/// The algebra on `{a, b}` where arity-`n` symbols flip their last
/// argument and all other symbols are constantly `a`.
pub fn two_point_algebra(sig: &Signature, n: usize) -> FiniteAlgebra {
    FiniteAlgebra::from_fn(vec!["a".into(), "b".into()], sig, |_, args| {
        if args.len() == n {
            1 - args[n - 1]
        } else {
            0
        }
    })
    .expect("values stay in {a, b}")
}

/// Every algebra for an at most unary signature on `1..=max_points`
/// points, elements named `0, 1, …`.
pub fn all_unary_algebras(sig: &Signature, max_points: usize) -> Vec<FiniteAlgebra> {
    assert!(sig.max_arity() <= 1, "signature must be at most unary");
    let mut out = Vec::new();
    for n in 1..=max_points {
        let elements: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let mut choices: Vec<BTreeMap<String, Operation>> = vec![BTreeMap::new()];
        for (name, arity) in sig.symbols() {
            let tables: Vec<Vec<usize>> = if arity == 0 {
                (0..n).map(|c| vec![c]).collect()
            } else {
                all_maps(n)
            };
            choices = choices
                .into_iter()
                .flat_map(|ops| {
                    tables.iter().map(move |t| {
                        let mut ops = ops.clone();
                        ops.insert(name.to_string(), Operation { arity, table: t.clone() });
                        ops
                    })
                })
                .collect();
        }
        out.extend(
            choices
                .into_iter()
                .map(|ops| FiniteAlgebra::new(elements.clone(), ops).expect("tables are total")),
        );
    }
    out
}
