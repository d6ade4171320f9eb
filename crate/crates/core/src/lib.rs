//! Pseudowords over the pseudovariety K and the finite structures used to
//! compute with them.

pub mod cantor;
pub mod congruences;
pub mod finsgp;
pub mod polish;
mod union_find;
pub mod unary;
pub mod words;
