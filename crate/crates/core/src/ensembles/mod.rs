//! Pure states, prior-weighted ensembles, POVMs and response maps.

mod constellations;
pub mod json;
mod random;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c64, HermitianOperator, C64};

pub use constellations::{
    bloch_state, make_two_state_ensemble, symmetric_bloch_directions, symmetric_qubit_ensemble,
};
pub use random::{
    haar_state, haar_unitary, random_ensemble, random_isometry_elements, random_isometry_povm, random_povm,
    seeded_rng, SeededRng,
};

/// Default cap on the number of states in an ensemble.
pub const MAX_ENSEMBLE_SIZE: usize = 4096;

const NORM_TOL: f64 = 1e-12;
const PRIOR_SUM_TOL: f64 = 1e-12;
pub const POVM_PSD_TOL: f64 = 1e-9;
pub const POVM_COMPLETENESS_TOL: f64 = 1e-8;
const RESPONSE_TRACE_TOL: f64 = 1e-10;

/// A unit vector in `C^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amplitudes: Vec<C64>,
}

impl PureState {
    /// Requires the squared norm to be 1 within 1e-12.
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidInput("state dimension must be >= 1".into()));
        }
        if amplitudes.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::InvalidInput("state has non-finite amplitudes".into()));
        }
        let residual = (linalg::norm_sqr(&amplitudes) - 1.0).abs();
        if residual > NORM_TOL {
            return Err(Error::NotNormalized { residual });
        }
        Ok(Self { amplitudes })
    }

    /// Rescales a non-zero vector to unit norm.
    pub fn normalized(mut amplitudes: Vec<C64>) -> Result<Self> {
        let n = linalg::norm_sqr(&amplitudes).sqrt();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::InvalidInput("cannot normalize a zero or non-finite vector".into()));
        }
        amplitudes.iter_mut().for_each(|a| *a /= n);
        Ok(Self { amplitudes })
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::new(amplitudes.iter().map(|&a| c64(a, 0.0)).collect())
    }

    /// Computational basis vector `|k>` in dimension `dim`.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut amplitudes = vec![C64::default(); dim];
        amplitudes[k] = c64(1.0, 0.0);
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    /// `<self|other>`
    pub fn overlap(&self, other: &PureState) -> C64 {
        linalg::inner(&self.amplitudes, &other.amplitudes)
    }

    pub fn projector(&self) -> HermitianOperator {
        HermitianOperator::projector(&self.amplitudes)
    }

    /// Applies a unitary; the result is renormalized to absorb rounding.
    pub fn transformed(&self, u: &linalg::CMatrix) -> Self {
        let v = u.mat_vec(&self.amplitudes);
        Self::normalized(v).expect("unitary image of a unit vector")
    }
}

/// Pure states with prior probabilities.
#[derive(Clone, Debug, PartialEq)]
pub struct Ensemble {
    dim: usize,
    priors: Vec<f64>,
    states: Vec<PureState>,
}

impl Ensemble {
    pub fn new(priors: Vec<f64>, states: Vec<PureState>) -> Result<Self> {
        Self::with_limit(priors, states, MAX_ENSEMBLE_SIZE)
    }

    pub fn with_limit(priors: Vec<f64>, states: Vec<PureState>, limit: usize) -> Result<Self> {
        let Some(first) = states.first() else {
            return Err(Error::InvalidInput("ensemble needs at least one state".into()));
        };
        if states.len() > limit {
            return Err(Error::TooManyStates {
                size: states.len(),
                limit,
            });
        }
        if priors.len() != states.len() {
            return Err(Error::InvalidInput(format!(
                "{} priors for {} states",
                priors.len(),
                states.len()
            )));
        }
        let dim = first.dim();
        if let Some(s) = states.iter().find(|s| s.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: s.dim(),
            });
        }
        if let Some(&p) = priors.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
            return Err(Error::OutOfRange {
                name: "prior",
                value: p,
                range: "[0, 1]",
            });
        }
        let total: f64 = priors.iter().sum();
        if (total - 1.0).abs() > PRIOR_SUM_TOL {
            return Err(Error::OutOfRange {
                name: "sum of priors",
                value: total,
                range: "1 +- 1e-12",
            });
        }
        Ok(Self { dim, priors, states })
    }

    pub fn uniform(states: Vec<PureState>) -> Result<Self> {
        let n = states.len().max(1);
        Self::new(vec![1.0 / n as f64; states.len()], states)
    }

    /// Same states, new priors.
    pub fn reweighted(&self, priors: Vec<f64>) -> Result<Self> {
        Self::with_limit(priors, self.states.clone(), usize::MAX)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn priors(&self) -> &[f64] {
        &self.priors
    }

    pub fn states(&self) -> &[PureState] {
        &self.states
    }

    pub fn items(&self) -> impl Iterator<Item = (f64, &PureState)> + '_ {
        self.priors.iter().copied().zip(&self.states)
    }

    /// `rho = sum_i pi_i |psi_i><psi_i|`
    pub fn density(&self) -> HermitianOperator {
        let mut rho = HermitianOperator::zeros(self.dim);
        for (p, s) in self.items() {
            rho.add_projector(p, s.amplitudes());
        }
        rho
    }
}

/// A measurement: PSD elements summing to the identity.
///
/// `Povm::from_elements` only checks that dimensions agree, so invalid
/// element lists can still be inspected with [`validate_povm`].
#[derive(Clone, Debug, PartialEq)]
pub struct Povm {
    dim: usize,
    elements: Vec<HermitianOperator>,
}

impl Povm {
    pub fn from_elements(elements: Vec<HermitianOperator>) -> Result<Self> {
        let Some(first) = elements.first() else {
            return Err(Error::InvalidInput("POVM needs at least one element".into()));
        };
        let dim = first.dim();
        if let Some(e) = elements.iter().find(|e| e.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: e.dim(),
            });
        }
        Ok(Self { dim, elements })
    }

    /// Builds and validates.
    pub fn new(elements: Vec<HermitianOperator>) -> Result<Self> {
        let povm = Self::from_elements(elements)?;
        let diags = validate_povm(&povm);
        if diags.is_empty() {
            Ok(povm)
        } else {
            Err(Error::InvalidPovm(diags))
        }
    }

    /// Projective measurement onto an orthonormal basis given as states.
    pub fn from_basis(basis: &[PureState]) -> Result<Self> {
        Self::new(basis.iter().map(PureState::projector).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[HermitianOperator] {
        &self.elements
    }

    pub fn into_elements(self) -> Vec<HermitianOperator> {
        self.elements
    }

    /// Every element conjugated by `u`.
    pub fn conjugated(&self, u: &linalg::CMatrix) -> Self {
        Self {
            dim: self.dim,
            elements: self.elements.iter().map(|e| e.conjugate_by(u)).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PovmDiagnostic {
    NotPsd { element: usize, min_eigenvalue: f64 },
    Incomplete { residual: f64 },
    NonFinite { element: usize },
}

impl fmt::Display for PovmDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PovmDiagnostic::NotPsd {
                element,
                min_eigenvalue,
            } => write!(f, "element {element} has min eigenvalue {min_eigenvalue:e}"),
            PovmDiagnostic::Incomplete { residual } => {
                write!(f, "elements sum to identity only within {residual:e}")
            }
            PovmDiagnostic::NonFinite { element } => {
                write!(f, "element {element} has non-finite entries")
            }
        }
    }
}

/// Lists every POVM invariant violation with its measured residual.
///
/// The completeness residual is the largest elementwise deviation of
/// `sum_b E_b` from the identity.
pub fn validate_povm(povm: &Povm) -> Vec<PovmDiagnostic> {
    let mut out = Vec::new();
    let mut sum = HermitianOperator::zeros(povm.dim);
    for (b, e) in povm.elements.iter().enumerate() {
        match linalg::eigendecompose(e) {
            Ok(eig) => {
                let min = eig.min();
                if min < -POVM_PSD_TOL {
                    out.push(PovmDiagnostic::NotPsd {
                        element: b,
                        min_eigenvalue: min,
                    });
                }
            }
            Err(_) => out.push(PovmDiagnostic::NonFinite { element: b }),
        }
        sum = sum.add(e);
    }
    let residual = sum.max_abs_diff(&HermitianOperator::identity(povm.dim));
    if !(residual <= POVM_COMPLETENESS_TOL) {
        out.push(PovmDiagnostic::Incomplete { residual });
    }
    out
}

/// The single-outcome measurement `{I}`.
pub fn trivial_povm(dim: usize) -> Result<Povm> {
    if dim == 0 {
        return Err(Error::InvalidInput("dimension must be >= 1".into()));
    }
    Povm::from_elements(vec![HermitianOperator::identity(dim)])
}

/// Reprepared density operators, one per measurement outcome.
#[derive(Clone, Debug, PartialEq)]
pub struct ResponseMap {
    responses: Vec<HermitianOperator>,
}

impl ResponseMap {
    pub fn new(responses: Vec<HermitianOperator>) -> Result<Self> {
        for sigma in &responses {
            if !linalg::is_psd(sigma, POVM_PSD_TOL) {
                return Err(Error::NotPsd {
                    min_eigenvalue: linalg::eigendecompose(sigma).map_or(f64::NAN, |e| e.min()),
                });
            }
            let tr = sigma.trace();
            if (tr - 1.0).abs() > RESPONSE_TRACE_TOL {
                return Err(Error::OutOfRange {
                    name: "response trace",
                    value: tr,
                    range: "1 +- 1e-10",
                });
            }
        }
        Ok(Self { responses })
    }

    pub fn from_pure(states: &[PureState]) -> Self {
        Self {
            responses: states.iter().map(PureState::projector).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.responses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.responses.is_empty()
    }

    pub fn responses(&self) -> &[HermitianOperator] {
        &self.responses
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_state_requires_unit_norm() {
        assert!(PureState::from_real(&[1.0, 0.0]).is_ok());
        let err = PureState::from_real(&[1.0, 1.0]).unwrap_err();
        assert!(matches!(err, Error::NotNormalized { residual } if (residual - 1.0).abs() < 1e-15));
        assert!(PureState::new(vec![]).is_err());
    }

    #[test]
    fn ensemble_invariants() {
        let s = || PureState::basis(2, 0);
        assert!(Ensemble::new(vec![0.5, 0.5], vec![s(), s()]).is_ok());
        assert!(Ensemble::new(vec![0.6, 0.5], vec![s(), s()]).is_err());
        assert!(Ensemble::new(vec![-0.1, 1.1], vec![s(), s()]).is_err());
        assert!(Ensemble::new(vec![], vec![]).is_err());
        assert!(matches!(
            Ensemble::new(vec![0.5, 0.5], vec![s(), PureState::basis(3, 0)]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            Ensemble::with_limit(vec![0.5, 0.5], vec![s(), s()], 1),
            Err(Error::TooManyStates { size: 2, limit: 1 })
        ));
    }

    #[test]
    fn density_of_basis_is_maximally_mixed() {
        let ens = Ensemble::uniform((0..3).map(|k| PureState::basis(3, k)).collect()).unwrap();
        let rho = ens.density();
        assert!(rho.max_abs_diff(&HermitianOperator::identity(3).scale(1.0 / 3.0)) < 1e-15);
    }

    #[test]
    fn trivial_povm_examples() {
        let p1 = trivial_povm(1).unwrap();
        assert_eq!(p1.len(), 1);
        assert_eq!(p1.elements()[0], HermitianOperator::identity(1));
        assert_eq!(trivial_povm(2).unwrap().elements()[0], HermitianOperator::identity(2));
        assert!(validate_povm(&trivial_povm(3).unwrap()).is_empty());
        assert!(validate_povm(&trivial_povm(4).unwrap()).is_empty());
        assert!(trivial_povm(0).is_err());
    }

    #[test]
    fn validate_reports_incompleteness() {
        let povm = Povm::from_elements(vec![HermitianOperator::identity(2); 2]).unwrap();
        let diags = validate_povm(&povm);
        assert_eq!(diags, vec![PovmDiagnostic::Incomplete { residual: 1.0 }]);
        assert!(Povm::new(povm.into_elements()).is_err());
    }

    #[test]
    fn validate_reports_negative_elements() {
        let povm = Povm::from_elements(vec![
            HermitianOperator::diag(&[1.5, 1.0]),
            HermitianOperator::diag(&[-0.5, 0.0]),
        ])
        .unwrap();
        let diags = validate_povm(&povm);
        assert_eq!(
            diags,
            vec![PovmDiagnostic::NotPsd {
                element: 1,
                min_eigenvalue: -0.5
            }]
        );
    }

    #[test]
    fn basis_projectors_are_valid() {
        let basis = [PureState::basis(2, 0), PureState::basis(2, 1)];
        let povm = Povm::from_basis(&basis).unwrap();
        assert!(validate_povm(&povm).is_empty());
    }

    #[test]
    fn response_map_checks() {
        assert!(ResponseMap::new(vec![HermitianOperator::diag(&[0.5, 0.5])]).is_ok());
        assert!(ResponseMap::new(vec![HermitianOperator::diag(&[0.5, 0.6])]).is_err());
        assert!(ResponseMap::new(vec![HermitianOperator::diag(&[1.5, -0.5])]).is_err());
    }
}
