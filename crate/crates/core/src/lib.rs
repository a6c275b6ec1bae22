//! Symbolic toolkit for positive allowable Lefschetz fibrations (PALFs):
//! curves on handle-decomposed surfaces, Dehn twist calculus, mapping class
//! equality via a filling family, monodromy factorizations with Hurwitz moves
//! and partial twists, and exact algebraic-topology invariants of the total
//! spaces (homology, intersection forms, boundary homology, first Chern
//! cocycle, adjunction genus bounds).

pub mod word;
pub mod surface;
pub mod curve;
pub mod models;
pub mod mcg;
pub mod factorization;
pub mod invariants;
pub mod snf;
pub mod tietze;
pub mod algorithm;
