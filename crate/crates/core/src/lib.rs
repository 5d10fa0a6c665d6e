//! Rational toral ranks of Sullivan models and their Hasse diagrams.

pub mod error;
pub mod gca;
pub mod ellipticity;
pub mod format;
pub mod groebner;
pub mod linalg;
pub mod sullivan;
pub mod toral_rank;
pub mod hasse;
pub mod graph;

pub use error::{Error, Result};
pub use gca::{Element, Generator, GeneratorSet, Monomial, Rational};
