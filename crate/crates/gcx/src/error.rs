use thiserror::Error;

use crate::graphcore::GraphVector;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("structural error: {0}")]
    Structural(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("flavor mismatch: d={0} vs d={1}")]
    FlavorMismatch(i32, i32),
    #[error("resource guard: {0}")]
    Resource(String),
    #[error("obstruction not exact at order {order} ({} classes in the residual)", .residual.len())]
    NotExact { order: usize, residual: Box<GraphVector> },
    #[error("arity error: {0}")]
    Arity(String),
    #[error("spec mismatch: {0}")]
    SpecMismatch(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("sampling failure: {0}")]
    Sampling(String),
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
}
