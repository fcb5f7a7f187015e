//! Genus-g surface data: period matrix, loop words, nerve cocycles and the
//! Ueda form read off from a pair of holonomy representations.

mod loops;
mod nerve;
mod ueda;

pub use loops::{Generator, Letter, LoopWord};
pub use nerve::{coboundary, cocycle_with_periods, period, period_map_p, Nerve, NerveCocycle};
pub use ueda::{a_normalize_class, ueda_form_from_pair, UedaFormData};

use thiserror::Error;

use crate::jet::JetError;
use crate::linalg::{leading_minors, mat_vec};
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SurfaceError {
    #[error("genus must be at least 2, got {0}")]
    GenusTooSmall(usize),
    #[error("period matrix must be {0}x{0}")]
    TauShape(usize),
    #[error("period matrix is not symmetric at ({0}, {1})")]
    TauNotSymmetric(usize, usize),
    #[error("imaginary part of the period matrix is not positive definite (leading minor {0})")]
    ImTauNotPositive(usize),
    #[error("expected {expected} zero labels, got {got}")]
    ZeroCount { expected: usize, got: usize },
    #[error("walk step {from} -> {to} is not an edge of the nerve")]
    WalkNotInNerve { from: usize, to: usize },
    #[error("walk is not closed")]
    WalkNotClosed,
    #[error("invalid nerve: {0}")]
    InvalidNerve(String),
    #[error("edge ({0}, {1}) has no label")]
    MissingLabel(usize, usize),
    #[error("cocycle condition fails on triangle ({0}, {1}, {2})")]
    NotACocycle(usize, usize, usize),
    #[error("no cocycle on this nerve has the requested periods")]
    PeriodsNotRealizable,
    #[error("loop word is not reduced at position {0}")]
    NotReduced(usize),
    #[error("generator index {index} out of range for genus {genus}")]
    GeneratorOutOfRange { index: usize, genus: usize },
    #[error("invalid loop word `{0}`")]
    BadWord(String),
    #[error("expected a tuple of size {expected}, got {got}")]
    WrongTupleSize { expected: usize, got: usize },
    #[error("the two representations coincide at the truncation order")]
    PairsCoincide,
    #[error("B-periods differ from tau times A-periods at loop b{0}")]
    HolomorphicityViolated(usize),
    #[error(transparent)]
    Jet(#[from] JetError),
}

/// Genus, normalized period matrix and the labels of the zeros of ω.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurfaceModel {
    genus: usize,
    tau: Vec<Vec<Scalar>>,
    zeros: Vec<String>,
}

impl SurfaceModel {
    pub fn new(genus: usize, tau: Vec<Vec<Scalar>>, zeros: Vec<String>) -> Result<Self, SurfaceError> {
        if genus < 2 {
            return Err(SurfaceError::GenusTooSmall(genus));
        }
        if tau.len() != genus || tau.iter().any(|r| r.len() != genus) {
            return Err(SurfaceError::TauShape(genus));
        }
        let pairs = (0..genus).flat_map(|i| ((i + 1)..genus).map(move |j| (i, j)));
        if let Some((i, j)) = pairs.into_iter().find(|&(i, j)| tau[i][j] != tau[j][i]) {
            return Err(SurfaceError::TauNotSymmetric(i, j));
        }
        let im: Vec<Vec<Scalar>> = tau
            .iter()
            .map(|r| r.iter().map(|x| Scalar::from_real(x.im().clone())).collect())
            .collect();
        for (j, minor) in leading_minors(&im).iter().enumerate() {
            if minor.re().cmp0() != std::cmp::Ordering::Greater {
                return Err(SurfaceError::ImTauNotPositive(j + 1));
            }
        }
        let expected = 2 * genus - 2;
        if zeros.len() != expected {
            return Err(SurfaceError::ZeroCount {
                expected,
                got: zeros.len(),
            });
        }
        Ok(SurfaceModel { genus, tau, zeros })
    }

    /// `τ = i·Id` with zeros labelled `p1, p2, ...`.
    pub fn standard(genus: usize) -> Result<Self, SurfaceError> {
        let tau = (0..genus)
            .map(|i| {
                (0..genus)
                    .map(|j| if i == j { Scalar::i() } else { Scalar::zero() })
                    .collect()
            })
            .collect();
        SurfaceModel::new(genus, tau, default_zero_labels(genus))
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn tau(&self) -> &[Vec<Scalar>] {
        &self.tau
    }

    pub fn zeros(&self) -> &[String] {
        &self.zeros
    }

    pub fn tau_times(&self, a: &[Scalar]) -> Vec<Scalar> {
        mat_vec(&self.tau, a)
    }
}

pub fn default_zero_labels(genus: usize) -> Vec<String> {
    (1..=2 * genus - 2).map(|j| format!("p{j}")).collect()
}
