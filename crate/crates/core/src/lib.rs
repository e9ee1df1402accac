//! Exact computation with corings over finite-dimensional algebras, semi-free
//! curved differential graded algebras, and the constructions passing between
//! them: comodule complexes with their connections and contramodules with their
//! divergences.
//!
//! All arithmetic is over the rationals and exact. Graded objects are truncated
//! at a maximal degree and every identity is verified inside that window.

pub mod algmod;
pub mod catalog;
pub mod cli;
pub mod exactla;
pub mod par;
pub mod cdga;
pub mod comod;
pub mod contra;
pub mod coring;
pub mod equiv;
pub mod io;
pub mod report;
