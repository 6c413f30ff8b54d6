//! Closed-form benchmarks and computable bounds on the accessible fidelity.

use serde::{Deserialize, Serialize};

use crate::ensembles::{make_two_state_ensemble, Ensemble, Povm};
use crate::error::{Error, Result};
use crate::fidelity::{achievable_unchecked, conditional_unchecked};
use crate::linalg::{self, c64, CMatrix, HermitianOperator, C64, SUPPORT_TOL};

const UNITARY_TOL: f64 = 1e-10;
/// Agreement demanded between the two square-root-measurement routes.
pub const PGM_ROUTE_TOL: f64 = 1e-9;
const HIERARCHY_TOL: f64 = 1e-7;

/// `lambda_1(rho)`, attained by the trivial measurement.
pub fn trivial_bound(ens: &Ensemble) -> f64 {
    linalg::lambda_max(&ens.density()).expect("finite density operator")
}

/// Square-root measurement `E_i = pi_i rho^{-1/2} Pi_i rho^{-1/2}`.
///
/// When `rho` is rank-deficient the projector onto its kernel is appended
/// as an extra outcome so that the elements sum to the identity.
pub fn srm_povm(ens: &Ensemble) -> Povm {
    let rho = ens.density();
    let b = linalg::inv_sqrt_psd(&rho, SUPPORT_TOL).expect("density operator is PSD");
    let mut elements: Vec<HermitianOperator> = ens
        .items()
        .map(|(p, s)| s.projector().scale(p).sandwiched_by(&b))
        .collect();
    let support = linalg::support_projector(&rho, SUPPORT_TOL).expect("finite density operator");
    let kernel = HermitianOperator::identity(ens.dim()).sub(&support);
    if kernel.trace() > 0.5 {
        elements.push(kernel);
    }
    Povm::from_elements(elements).expect("non-empty ensemble")
}

/// Achievable fidelity of the square-root measurement.
pub fn pgm_fidelity(ens: &Ensemble) -> f64 {
    achievable_unchecked(ens, srm_povm(ens).elements()).value
}

/// `sum_i lambda_1(sum_j pi_i pi_j Pi_j rho^{-1/2} Pi_i rho^{-1/2} Pi_j)`,
/// evaluated with full matrix products.
pub fn pgm_fidelity_direct(ens: &Ensemble) -> f64 {
    let rho = ens.density();
    let b = linalg::inv_sqrt_psd(&rho, SUPPORT_TOL).expect("density operator is PSD");
    let projectors: Vec<CMatrix> = ens.states().iter().map(|s| s.projector().into_matrix()).collect();
    let mut total = 0.0;
    for (pi_i, proj_i) in ens.priors().iter().zip(&projectors) {
        let inner = &(b.matrix() * proj_i) * b.matrix();
        let mut sum = CMatrix::zeros(ens.dim());
        for (pi_j, proj_j) in ens.priors().iter().zip(&projectors) {
            let term = &(proj_j * &inner) * proj_j;
            sum = &sum + &term.scale(pi_i * pi_j);
        }
        let h = HermitianOperator::new(sum).expect("finite operator");
        total += linalg::lambda_max(&h).expect("finite operator");
    }
    total.clamp(0.0, 1.0)
}

fn check_overlap(x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::OutOfRange {
            name: "x",
            value: x,
            range: "[0, 1]",
        });
    }
    Ok(())
}

/// Optimal success probability for two equiprobable pure states with
/// overlap `x`: `(1 + sqrt(1 - x^2)) / 2`.
pub fn helstrom_success(x: f64) -> Result<f64> {
    check_overlap(x)?;
    Ok(0.5 * (1.0 + (1.0 - x * x).sqrt()))
}

/// Optimal two-copy cloning fidelity for two states with overlap `x`:
/// `(1 + x^3 + (1 - x^2) sqrt(1 + x^2)) / 2`.
pub fn clone_fidelity(x: f64) -> Result<f64> {
    check_overlap(x)?;
    Ok(0.5 * (1.0 + x.powi(3) + (1.0 - x * x) * (1.0 + x * x).sqrt()))
}

/// Grid minimizer of [`clone_fidelity`] on `[0, 1]`; lowest grid point wins
/// ties.
pub fn clone_fidelity_argmin(grid_step: f64) -> Result<f64> {
    if !(grid_step > 0.0 && grid_step <= 1.0) {
        return Err(Error::OutOfRange {
            name: "grid_step",
            value: grid_step,
            range: "(0, 1]",
        });
    }
    let points = (1.0 / grid_step).floor() as usize;
    let mut best = (0.0, clone_fidelity(0.0)?);
    for k in 1..=points {
        let x = (k as f64 * grid_step).min(1.0);
        let f = clone_fidelity(x)?;
        if f < best.1 {
            best = (x, f);
        }
    }
    Ok(best.0)
}

/// The canonical pair `|psi_{0,1}> = (cos(t/2), +-sin(t/2))`, `cos t = x`.
pub fn canonical_pair(x: f64) -> Result<[[C64; 2]; 2]> {
    let ens = make_two_state_ensemble(x, 0.5)?;
    let a = ens.states()[0].amplitudes();
    let b = ens.states()[1].amplitudes();
    Ok([[a[0], a[1]], [b[0], b[1]]])
}

/// `(|<Psi_0|psi_0 psi_0>|^2 +|<Psi_1|psi_1 psi_1>|^2) / 2` with
/// `|Psi_i> = U (|psi_i> ⊗ |0>)`, for a 4x4 unitary `U`.
pub fn clone_try_fidelity(x: f64, u: &CMatrix) -> Result<f64> {
    check_overlap(x)?;
    if u.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: u.dim(),
        });
    }
    let residual = u.unitarity_residual();
    if !(residual <= UNITARY_TOL) {
        return Err(Error::NonUnitary { residual });
    }
    Ok(clone_try_unchecked(&canonical_pair(x)?, u))
}

pub(crate) fn clone_try_unchecked(pair: &[[C64; 2]; 2], u: &CMatrix) -> f64 {
    let zero = [c64(1.0, 0.0), C64::default()];
    let mut total = 0.0;
    for psi in pair {
        let input = kron2(psi, &zero);
        let target = kron2(psi, psi);
        let output = u.mat_vec(&input);
        total += 0.5 * linalg::inner(&output, &target).norm_sqr();
    }
    total.clamp(0.0, 1.0)
}

fn kron2(a: &[C64; 2], b: &[C64; 2]) -> [C64; 4] {
    [a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]]
}

/// Bound chain for one ensemble. `hierarchy` flags are `None` when the
/// quantity they compare against was not supplied.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub lambda1_rho: f64,
    pub pgm_fidelity: f64,
    pub pgm_fidelity_direct: f64,
    pub pgm_routes_agree: bool,
    pub optimal_success_lower: Option<f64>,
    pub hierarchy: HierarchyFlags,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HierarchyFlags {
    /// `1/d <= lambda_1(rho) <= 1`
    pub lambda1_in_range: bool,
    /// `F_PGM >= lambda_1(rho) - 1e-10` is not claimed; recorded only.
    pub pgm_above_lambda1: bool,
    pub accessible_above_lambda1: Option<bool>,
    pub accessible_above_pgm: Option<bool>,
    pub accessible_above_success: Option<bool>,
}

impl HierarchyFlags {
    /// True if no asserted inequality failed.
    pub fn ok(&self) -> bool {
        self.lambda1_in_range
            && self.accessible_above_lambda1 != Some(false)
            && self.accessible_above_pgm != Some(false)
            && self.accessible_above_success != Some(false)
    }
}

pub fn bounds_report(ens: &Ensemble, accessible: Option<f64>, optimal_success: Option<f64>) -> BoundsReport {
    let lambda1 = trivial_bound(ens);
    let pgm = pgm_fidelity(ens);
    let pgm_direct = pgm_fidelity_direct(ens);
    let d = ens.dim() as f64;
    let above = |lower: f64| accessible.map(|f| f >= lower - HIERARCHY_TOL);
    BoundsReport {
        lambda1_rho: lambda1,
        pgm_fidelity: pgm,
        pgm_fidelity_direct: pgm_direct,
        pgm_routes_agree: (pgm - pgm_direct).abs() <= PGM_ROUTE_TOL,
        optimal_success_lower: optimal_success,
        hierarchy: HierarchyFlags {
            lambda1_in_range: lambda1 >= 1.0 / d - 1e-12 && lambda1 <= 1.0 + 1e-12,
            pgm_above_lambda1: pgm >= lambda1 - 1e-10,
            accessible_above_lambda1: above(lambda1),
            accessible_above_pgm: above(pgm),
            accessible_above_success: optimal_success.and_then(above),
        },
    }
}

/// `M_b` for every element, for callers that want the raw operators.
pub fn conditional_operators(ens: &Ensemble, povm: &Povm) -> Vec<HermitianOperator> {
    povm.elements().iter().map(|e| conditional_unchecked(ens, e)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{trivial_povm, validate_povm, PureState};
    use crate::fidelity::achievable_fidelity;

    fn basis_ensemble(d: usize) -> Ensemble {
        Ensemble::uniform((0..d).map(|k| PureState::basis(d, k)).collect()).unwrap()
    }

    #[test]
    fn trivial_bound_examples() {
        let single = Ensemble::uniform(vec![PureState::from_real(&[0.6, 0.8]).unwrap()]).unwrap();
        assert!((trivial_bound(&single) - 1.0).abs() < 1e-12);
        assert!((trivial_bound(&basis_ensemble(2)) - 0.5).abs() < 1e-15);
        let pair = make_two_state_ensemble(0.6, 0.5).unwrap();
        assert!((trivial_bound(&pair) - 0.8).abs() < 1e-12);
        let via_povm = achievable_fidelity(&pair, &trivial_povm(2).unwrap()).unwrap().value;
        assert!((trivial_bound(&pair) - via_povm).abs() < 1e-10);
    }

    #[test]
    fn srm_of_basis_is_basis() {
        let ens = basis_ensemble(3);
        let povm = srm_povm(&ens);
        assert_eq!(povm.len(), 3);
        for (e, s) in povm.elements().iter().zip(ens.states()) {
            assert!(e.max_abs_diff(&s.projector()) < 1e-12);
        }
    }

    #[test]
    fn srm_of_single_state_is_completed() {
        let s = PureState::from_real(&[0.6, 0.8]).unwrap();
        let ens = Ensemble::uniform(vec![s.clone()]).unwrap();
        let povm = srm_povm(&ens);
        assert_eq!(povm.len(), 2);
        assert!(povm.elements()[0].max_abs_diff(&s.projector()) < 1e-12);
        let rest = HermitianOperator::identity(2).sub(&s.projector());
        assert!(povm.elements()[1].max_abs_diff(&rest) < 1e-12);
        assert!(validate_povm(&povm).is_empty());
    }

    #[test]
    fn srm_of_two_states_is_symmetric() {
        let ens = make_two_state_ensemble(0.6, 0.5).unwrap();
        let povm = srm_povm(&ens);
        assert_eq!(povm.len(), 2);
        assert!(validate_povm(&povm).is_empty());
        for e in povm.elements() {
            let eig = linalg::eigendecompose(e).unwrap();
            assert!(eig.values[1].abs() < 1e-12, "rank one");
        }
        // Reflection z -> -z swaps the two states and the two elements.
        let flip = CMatrix::diag(&[1.0, -1.0]);
        let swapped = povm.elements()[0].conjugate_by(&flip);
        assert!(swapped.max_abs_diff(&povm.elements()[1]) < 1e-12);
        // For equal priors the SRM is the Helstrom measurement.
        let ps = crate::fidelity::success_probability(&ens, &povm).unwrap();
        assert!((ps - 0.9).abs() < 1e-12);
    }

    #[test]
    fn pgm_examples() {
        assert!((pgm_fidelity(&basis_ensemble(3)) - 1.0).abs() < 1e-12);
        let single = Ensemble::uniform(vec![PureState::from_real(&[0.6, 0.8]).unwrap()]).unwrap();
        assert!((pgm_fidelity(&single) - 1.0).abs() < 1e-12);
        assert!((pgm_fidelity_direct(&single) - 1.0).abs() < 1e-12);
        let pair = make_two_state_ensemble(0.6, 0.5).unwrap();
        assert!((pgm_fidelity(&pair) - pgm_fidelity_direct(&pair)).abs() < 1e-9);
    }

    #[test]
    fn helstrom_examples() {
        assert_eq!(helstrom_success(0.0).unwrap(), 1.0);
        assert_eq!(helstrom_success(1.0).unwrap(), 0.5);
        assert!((helstrom_success(0.6).unwrap() - 0.9).abs() < 1e-15);
        assert!(helstrom_success(1.5).is_err());
        let mut prev = 1.0;
        for k in 0..=100 {
            let p = helstrom_success(k as f64 / 100.0).unwrap();
            assert!(p <= prev && (0.5..=1.0).contains(&p));
            prev = p;
        }
    }

    #[test]
    fn clone_fidelity_examples() {
        assert!((clone_fidelity(0.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((clone_fidelity(1.0).unwrap() - 1.0).abs() < 1e-12);
        let f = clone_fidelity(1.0 / 3f64.sqrt()).unwrap();
        assert!((f - 0.9811252243).abs() < 1e-9, "{f}");
        assert!(clone_fidelity(-0.1).is_err());
    }

    #[test]
    fn clone_argmin() {
        let target = 1.0 / 3f64.sqrt();
        let a = clone_fidelity_argmin(1e-3).unwrap();
        assert!((a - target).abs() <= 1e-3 + 1e-6, "{a}");
        let a = clone_fidelity_argmin(1e-4).unwrap();
        assert!((a - target).abs() <= 1e-4 + 1e-6, "{a}");
        // Coarse grid {0, 0.5, 1}: documented behavior only.
        assert_eq!(clone_fidelity_argmin(0.5).unwrap(), 0.5);
        assert!(clone_fidelity_argmin(0.0).is_err());
    }

    /// U = (W ⊗ W) CNOT (W^dag ⊗ I), W|k> = |psi_k>, copies orthogonal inputs.
    #[test]
    fn clone_try_perfect_for_orthogonal_pair() {
        let [a, b] = canonical_pair(0.0).unwrap();
        let w = CMatrix::from_rows(&[vec![a[0], b[0]], vec![a[1], b[1]]]).unwrap();
        let mut cnot = CMatrix::zeros(4);
        for (i, j) in [(0, 0), (1, 1), (2, 3), (3, 2)] {
            cnot[(i, j)] = c64(1.0, 0.0);
        }
        let u = &(&w.kron(&w) * &cnot) * &w.adjoint().kron(&CMatrix::identity(2));
        let f = clone_try_fidelity(0.0, &u).unwrap();
        assert!((f - 1.0).abs() < 1e-12);
    }

    #[test]
    fn clone_try_identity_matches_hand_value() {
        // U = I: <psi psi|psi 0> = <psi|psi> <psi|0> = c for both states.
        for k in 0..=10 {
            let x = k as f64 / 10.0;
            let c2 = (1.0 + x) / 2.0;
            let f = clone_try_fidelity(x, &CMatrix::identity(4)).unwrap();
            assert!((f - c2).abs() < 1e-12, "x={x}");
        }
    }

    #[test]
    fn clone_try_rejects_non_unitary() {
        let err = clone_try_fidelity(0.5, &CMatrix::identity(4).scale(1.1)).unwrap_err();
        assert!(matches!(err, Error::NonUnitary { .. }));
        assert!(clone_try_fidelity(0.5, &CMatrix::identity(2)).is_err());
    }

    #[test]
    fn bounds_report_flags() {
        let pair = make_two_state_ensemble(0.6, 0.5).unwrap();
        let r = bounds_report(&pair, Some(0.95), Some(0.9));
        assert!(r.pgm_routes_agree);
        assert!(r.hierarchy.ok());
        let r = bounds_report(&pair, Some(0.5), None);
        assert_eq!(r.hierarchy.accessible_above_lambda1, Some(false));
        assert!(!r.hierarchy.ok());
    }
}
