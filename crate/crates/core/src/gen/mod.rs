//! Instance generators built from hardness reductions. Every generator comes
//! with an independent brute-force evaluator for its source problem, so the
//! generated machines carry known ground truth.

mod linear;
mod pcp;
mod pi2;
mod qsos;
mod random;

pub use linear::{
    diophantine_to_zvas, qslde_to_zvas_inclusion, qsos2_to_qslde, qsos2_to_qslde_printed,
    random_linear_system, Encoding, LinearSystem, Qslde,
};
pub use pcp::{pcp_to_affine_rm, pcp_word, PcpInstance};
pub use pi2::{pi2pa_to_inclusion, random_pi2, Pi2Formula, Pi2Term, PosBool};
pub use qsos::{qbf_to_qsos, random_qsos2, Literal, Qbf, QsosInstance};
pub use random::{random_normal_form, random_zvassr};

use thiserror::Error;

use crate::model::{Configuration, Machine, ModelError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenError {
    #[error("malformed instance: {0}")]
    Shape(String),
    #[error("clause {0} has {1} literals, expected 3")]
    Arity(usize, usize),
    #[error("numbers do not fit in 64 bits")]
    Overflow,
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A reachability-style query on a generated machine.
#[derive(Clone, Debug)]
pub struct ReachInstance {
    pub machine: Machine,
    pub src: Configuration,
    pub dst: Configuration,
}

/// `reach(a, src_a) ⊆ reach(b, src_b)`.
#[derive(Clone, Debug)]
pub struct InclusionInstance {
    pub a: Machine,
    pub src_a: Configuration,
    pub b: Machine,
    pub src_b: Configuration,
}

#[cfg(test)]
mod tests;
