//! Seeded random states, ensembles and POVMs.
//!
//! All randomness comes from `ChaCha8Rng`, a portable counter-based stream
//! cipher generator. Callers own their generator; nothing here touches
//! global state.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{self, c64, HermitianOperator, C64};

use super::{Ensemble, Povm, PureState};

pub type SeededRng = ChaCha8Rng;

/// Generator for `(seed, stream)`; streams are independent sequences.
pub fn seeded_rng(seed: u64, stream: u64) -> SeededRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub(crate) fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<C64> {
    (0..dim)
        .map(|_| c64(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect()
}

/// Haar-distributed pure state (normalized complex Gaussian vector).
pub fn haar_state<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> PureState {
    loop {
        let v = gaussian_vector(rng, dim);
        if let Ok(s) = PureState::normalized(v) {
            return s;
        }
    }
}

/// `n` Haar states in dimension `d`; priors uniform or flat-Dirichlet.
pub fn random_ensemble(d: usize, n: usize, seed: u64, uniform_priors: bool) -> Result<Ensemble> {
    if d == 0 || n == 0 {
        return Err(Error::InvalidInput("random_ensemble needs d >= 1 and n >= 1".into()));
    }
    let mut rng = seeded_rng(seed, 0);
    let states: Vec<_> = (0..n).map(|_| haar_state(&mut rng, d)).collect();
    if uniform_priors {
        return Ensemble::uniform(states);
    }
    let raw: Vec<f64> = (0..n)
        .map(|_| -(1.0 - rng.random::<f64>()).ln())
        .collect();
    let total: f64 = raw.iter().sum();
    let mut priors: Vec<f64> = raw.iter().map(|w| w / total).collect();
    // Fold the rounding error into the largest entry.
    let drift = 1.0 - priors.iter().sum::<f64>();
    let largest = (0..n)
        .max_by(|&i, &j| priors[i].total_cmp(&priors[j]))
        .unwrap_or(0);
    priors[largest] += drift;
    Ensemble::new(priors, states)
}

/// Orthonormal columns of a Haar `rows x cols` isometry, via modified
/// Gram-Schmidt on Gaussian columns. Requires `rows >= cols`.
pub(crate) fn haar_isometry<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> Vec<Vec<C64>> {
    debug_assert!(rows >= cols);
    let mut columns: Vec<Vec<C64>> = Vec::with_capacity(cols);
    while columns.len() < cols {
        let mut v = gaussian_vector(rng, rows);
        for _ in 0..2 {
            for q in &columns {
                let proj = linalg::inner(q, &v);
                for (a, b) in v.iter_mut().zip(q) {
                    *a -= proj * b;
                }
            }
        }
        let n = linalg::norm_sqr(&v).sqrt();
        if n > 1e-8 {
            v.iter_mut().for_each(|a| *a /= n);
            columns.push(v);
        }
    }
    columns
}

/// Haar-random `dim x dim` unitary.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> linalg::CMatrix {
    let cols = haar_isometry(rng, dim, dim);
    linalg::CMatrix::from_fn(dim, |i, j| cols[j][i])
}

/// Rank-one POVM elements from the rows of a Haar `k x d` isometry.
///
/// When `k < d` no rank-one POVM exists; a random orthonormal basis is then
/// split round-robin into `k` projectors.
pub fn random_isometry_elements<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    outcomes: usize,
) -> Vec<HermitianOperator> {
    if outcomes >= dim {
        let cols = haar_isometry(rng, outcomes, dim);
        (0..outcomes)
            .map(|b| {
                let w: Vec<C64> = cols.iter().map(|col| col[b].conj()).collect();
                HermitianOperator::projector(&w)
            })
            .collect()
    } else {
        let basis = haar_isometry(rng, dim, dim);
        let mut elements = vec![HermitianOperator::zeros(dim); outcomes.max(1)];
        for (k, v) in basis.iter().enumerate() {
            elements[k % outcomes.max(1)].add_projector(1.0, v);
        }
        elements
    }
}

pub fn random_isometry_povm<R: Rng + ?Sized>(rng: &mut R, dim: usize, outcomes: usize) -> Povm {
    Povm::from_elements(random_isometry_elements(rng, dim, outcomes))
        .expect("non-empty element list")
}

/// Generic random POVM: `E_b = S^{-1/2} G_b S^{-1/2}` with Wishart-like
/// `G_b` of random rank and `S = sum_b G_b`.
pub fn random_povm<R: Rng + ?Sized>(rng: &mut R, dim: usize, outcomes: usize) -> Povm {
    loop {
        let grams: Vec<HermitianOperator> = (0..outcomes)
            .map(|_| {
                let rank = rng.random_range(1..=dim);
                let mut g = HermitianOperator::zeros(dim);
                for _ in 0..rank {
                    g.add_projector(1.0, &gaussian_vector(rng, dim));
                }
                g
            })
            .collect();
        let total = grams
            .iter()
            .fold(HermitianOperator::zeros(dim), |acc, g| acc.add(g));
        let Ok(eig) = linalg::eigendecompose(&total) else {
            continue;
        };
        // Resample if the elements fail to span the space.
        if eig.min() < 1e-8 * eig.values[0] {
            continue;
        }
        let b = eig.reconstruct_with(|l| l.sqrt().recip());
        let elements = grams.iter().map(|g| g.sandwiched_by(&b)).collect();
        return Povm::from_elements(elements).expect("non-empty element list");
    }
}
