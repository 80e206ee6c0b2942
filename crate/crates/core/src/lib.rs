//! Exact computations for rational complexity-one torus singularities given
//! by proper polyhedral divisors on the projective line.

pub mod error;
pub mod coxalg;
pub mod exactalg;
pub mod fundgrp;
pub mod grouppres;
pub mod iteration;
pub mod pdiv;
pub mod polyhedra;

pub use error::{Error, Result};
