//! Congruences on pseudowords over {a,b}: deciders, checkable derivations
//! and separation by finite quotients.

pub mod derivation;
pub mod scripts;
pub mod separation;
pub mod template;
pub mod theta;

pub use derivation::{check_derivation, CheckOptions, CheckReport, DerivationScript};
pub use template::PumpTemplate;
pub use theta::{theta3_equiv, theta4_equiv, ThetaError};
