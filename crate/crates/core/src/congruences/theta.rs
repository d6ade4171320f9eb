//! Deciders for the two congruences on pseudowords over {a,b}.

use thiserror::Error;

use crate::words::{KWord, KWordView};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ThetaError {
    #[error("letter `{0}` is outside the alphabet {{a,b}}")]
    ForeignLetter(char),
}

fn check_ab(x: &KWord) -> Result<(), ThetaError> {
    match x.content().into_iter().find(|&c| c != 'a' && c != 'b') {
        Some(c) => Err(ThetaError::ForeignLetter(c)),
        None => Ok(()),
    }
}

/// The congruence generated by `(ab^ω, ba^ω)`: the diagonal plus the pairs
/// `(p·α·β^ω, p·β·α^ω)` with `α ≠ β`.
pub fn theta3_equiv(x: &KWord, y: &KWord) -> Result<bool, ThetaError> {
    check_ab(x)?;
    check_ab(y)?;
    if x == y {
        return Ok(true);
    }
    // In canonical form `p·α·β^ω` has preperiod `pα` and period `β`.
    let (KWordView::Omega { pre: p1, per: q1 }, KWordView::Omega { pre: p2, per: q2 }) =
        (x.view(), y.view())
    else {
        return Ok(false);
    };
    Ok(match (p1.split_last(), p2.split_last()) {
        (Some((&a1, w1)), Some((&a2, w2))) => {
            q1.len() == 1 && q2.len() == 1 && w1 == w2 && a1 == q2[0] && a2 == q1[0] && a1 != a2
        }
        _ => false,
    })
}

/// The fully invariant congruence generated by `(ab^n·ab^ω, ab^{n+1}·a^ω)`:
/// finite words are alone in their class, infinite ones are classified by
/// their shortest full-content prefix.
pub fn theta4_equiv(x: &KWord, y: &KWord) -> Result<bool, ThetaError> {
    check_ab(x)?;
    check_ab(y)?;
    Ok(x == y || (x.is_omega() && y.is_omega() && x.tilde0() == y.tilde0()))
}
