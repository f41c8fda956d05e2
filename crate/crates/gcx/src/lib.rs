//! Directed graph complexes and their satellites: operadic insertion, the
//! Maurer–Cartan solver, polydifferential representations, the D-prop of Lie
//! bialgebras, biassociahedra and Monte Carlo weights of configuration-space
//! integrals.

pub mod error;
pub mod gcomplex;
pub mod graphcore;
pub mod integrals;
pub mod linalg;
pub mod polyrep;
pub mod polytopes;
pub mod props;
pub mod q;
pub mod verify;

pub use error::{Error, Result};
