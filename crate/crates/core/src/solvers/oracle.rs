//! Brute-force accessible fidelity for qubit ensembles.
//!
//! Uses its own closed-form 2x2 arithmetic rather than the general
//! eigensolver and seesaw, so agreement with the solver is meaningful.

use num_complex::Complex64 as C;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensembles::{seeded_rng, Ensemble};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    /// Angular spacing of the Bloch-direction grid, in radians.
    pub resolution: f64,
    pub random_povms: usize,
    pub refine_steps: usize,
    pub seed: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            resolution: 1e-3,
            random_povms: 100_000,
            refine_steps: 50,
            seed: 0,
        }
    }
}

const CHUNK: usize = 1024;

/// Hermitian `[[a, b], [conj b, d]]`.
#[derive(Clone, Copy, Debug, Default)]
struct H2 {
    a: f64,
    d: f64,
    b: C,
}

impl H2 {
    fn projector(v: [C; 2]) -> Self {
        H2 {
            a: v[0].norm_sqr(),
            d: v[1].norm_sqr(),
            b: v[0] * v[1].conj(),
        }
    }

    fn add_scaled(&mut self, w: f64, o: &H2) {
        self.a += w * o.a;
        self.d += w * o.d;
        self.b += o.b * w;
    }

    fn expect(&self, v: [C; 2]) -> f64 {
        self.a * v[0].norm_sqr() + self.d * v[1].norm_sqr() + 2.0 * (self.b * v[1] * v[0].conj()).re
    }

    fn apply(&self, v: [C; 2]) -> [C; 2] {
        [
            v[0] * self.a + self.b * v[1],
            self.b.conj() * v[0] + v[1] * self.d,
        ]
    }

    fn top(&self) -> f64 {
        let m = 0.5 * (self.a + self.d);
        let h = 0.5 * (self.a - self.d);
        m + (h * h + self.b.norm_sqr()).sqrt()
    }

    fn top_vector(&self) -> [C; 2] {
        let lambda = self.top();
        let v = if self.b.norm() > 1e-300 {
            [self.b, C::new(lambda - self.a, 0.0)]
        } else if self.a >= self.d {
            [C::new(1.0, 0.0), C::new(0.0, 0.0)]
        } else {
            [C::new(0.0, 0.0), C::new(1.0, 0.0)]
        };
        let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
        [v[0] / n, v[1] / n]
    }

    /// `A^{-1/2}` for positive definite `A`, via Cayley-Hamilton:
    /// `sqrt(A) = (A + s I) / t` with `s = sqrt(det A)`, `t = sqrt(tr A + 2 s)`.
    fn inv_sqrt(&self) -> Option<H2> {
        let det = self.a * self.d - self.b.norm_sqr();
        let tr = self.a + self.d;
        if !(det > 1e-14 * tr * tr) {
            return None;
        }
        let s = det.sqrt();
        let t = (tr + 2.0 * s).sqrt();
        let (ra, rd, rb) = ((self.a + s) / t, (self.d + s) / t, self.b / t);
        let rdet = ra * rd - rb.norm_sqr();
        Some(H2 {
            a: rd / rdet,
            d: ra / rdet,
            b: -rb / rdet,
        })
    }
}

struct Qubits {
    priors: Vec<f64>,
    states: Vec<[C; 2]>,
    projectors: Vec<H2>,
}

impl Qubits {
    /// Achievable fidelity of rank-one elements `w_b w_b^dagger`.
    fn fidelity(&self, ws: &[[C; 2]]) -> f64 {
        ws.iter().map(|&w| self.conditional(|s| overlap2(w, s)).top()).sum()
    }

    fn conditional(&self, weight: impl Fn([C; 2]) -> f64) -> H2 {
        let mut m = H2::default();
        for ((p, s), pr) in self.priors.iter().zip(&self.states).zip(&self.projectors) {
            m.add_scaled(p * weight(*s), pr);
        }
        m
    }

    /// Projective measurement along Bloch direction `n`.
    fn projective(&self, n: [f64; 3]) -> f64 {
        let plus = H2 {
            a: 0.5 * (1.0 + n[2]),
            d: 0.5 * (1.0 - n[2]),
            b: C::new(0.5 * n[0], -0.5 * n[1]),
        };
        let mut total = 0.0;
        for sign in [1.0, -1.0] {
            let m = self.conditional(|s| {
                let e = plus.expect(s);
                if sign > 0.0 {
                    e
                } else {
                    1.0 - e
                }
            });
            total += m.top();
        }
        total
    }

    /// Rank-one fixed-point steps `w_b <- L^{-1/2} R_b w_b`; returns the
    /// best fidelity seen along the trajectory.
    fn refine(&self, mut ws: Vec<[C; 2]>, steps: usize) -> f64 {
        let mut best = self.fidelity(&ws);
        for _ in 0..steps {
            let moved: Vec<[C; 2]> = ws
                .iter()
                .map(|&w| {
                    let phi = self.conditional(|s| overlap2(w, s)).top_vector();
                    self.conditional(|s| overlap2(phi, s)).apply(w)
                })
                .collect();
            let mut lambda = H2::default();
            for &v in &moved {
                lambda.add_scaled(1.0, &H2::projector(v));
            }
            let Some(b) = lambda.inv_sqrt() else { break };
            ws = moved.into_iter().map(|v| b.apply(v)).collect();
            best = best.max(self.fidelity(&ws));
        }
        best
    }
}

fn overlap2(u: [C; 2], v: [C; 2]) -> f64 {
    (u[0].conj() * v[0] + u[1].conj() * v[1]).norm_sqr()
}

fn random_rank_one<R: Rng>(rng: &mut R) -> Option<Vec<[C; 2]>> {
    let k = rng.random_range(2..=4);
    let mut g: Vec<[C; 2]> = Vec::with_capacity(k);
    for _ in 0..k {
        let mut z = || C::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
        g.push([z(), z()]);
    }
    let mut s = H2::default();
    for &v in &g {
        s.add_scaled(1.0, &H2::projector(v));
    }
    let b = s.inv_sqrt()?;
    Some(g.into_iter().map(|v| b.apply(v)).collect())
}

/// [`brute_force_qubit_fidelity_with`] at the given grid resolution and
/// default random-search budget.
pub fn brute_force_qubit_fidelity(ens: &Ensemble, resolution: f64) -> Result<f64> {
    brute_force_qubit_fidelity_with(
        ens,
        &OracleConfig {
            resolution,
            ..OracleConfig::default()
        },
    )
}

/// Maximum achievable fidelity over a grid of projective measurements
/// (Bloch upper hemisphere, spacing `resolution`) and over seeded random
/// rank-one POVMs with 2 to 4 outcomes, each followed by fixed-point steps.
/// A lower bound on the accessible fidelity.
pub fn brute_force_qubit_fidelity_with(ens: &Ensemble, cfg: &OracleConfig) -> Result<f64> {
    if ens.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: ens.dim(),
        });
    }
    if !(cfg.resolution > 0.0 && cfg.resolution <= 0.5) {
        return Err(Error::OutOfRange {
            name: "resolution",
            value: cfg.resolution,
            range: "(0, 0.5]",
        });
    }
    let states: Vec<[C; 2]> = ens
        .states()
        .iter()
        .map(|s| [s.amplitudes()[0], s.amplitudes()[1]])
        .collect();
    let q = Qubits {
        priors: ens.priors().to_vec(),
        projectors: states.iter().map(|&s| H2::projector(s)).collect(),
        states,
    };

    let polar_steps = (std::f64::consts::FRAC_PI_2 / cfg.resolution).ceil() as usize;
    let grid = (0..=polar_steps)
        .into_par_iter()
        .map(|k| {
            let theta = std::f64::consts::FRAC_PI_2 * k as f64 / polar_steps as f64;
            let ring = ((std::f64::consts::TAU * theta.sin()) / cfg.resolution).ceil().max(1.0) as usize;
            (0..ring)
                .map(|j| {
                    let phi = std::f64::consts::TAU * j as f64 / ring as f64;
                    q.projective([theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()])
                })
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .reduce(|| f64::NEG_INFINITY, f64::max);

    let chunks = cfg.random_povms.div_ceil(CHUNK);
    let random = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = seeded_rng(cfg.seed, c as u64);
            let count = CHUNK.min(cfg.random_povms - c * CHUNK);
            (0..count)
                .filter_map(|_| random_rank_one(&mut rng))
                .map(|ws| q.refine(ws, cfg.refine_steps))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .reduce(|| f64::NEG_INFINITY, f64::max);

    Ok(grid.max(random).min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{make_two_state_ensemble, Ensemble, PureState};

    fn light(resolution: f64) -> OracleConfig {
        OracleConfig {
            resolution,
            random_povms: 2000,
            ..OracleConfig::default()
        }
    }

    #[test]
    fn endpoints_are_perfect() {
        for x in [0.0, 1.0] {
            let ens = make_two_state_ensemble(x, 0.5).unwrap();
            let v = brute_force_qubit_fidelity_with(&ens, &light(1e-2)).unwrap();
            assert!((v - 1.0).abs() < 1e-9, "x={x}: {v}");
        }
    }

    #[test]
    fn two_state_closed_form() {
        for x in [0.3, 0.6, 0.9] {
            let ens = make_two_state_ensemble(x, 0.5).unwrap();
            let v = brute_force_qubit_fidelity_with(&ens, &light(1e-3)).unwrap();
            let expected = 0.5 * (1.0 + (1.0 - x * x + x.powi(4)).sqrt());
            assert!((v - expected).abs() < 1e-5, "x={x}: {v} vs {expected}");
        }
    }

    #[test]
    fn inverse_square_root_closed_form() {
        let m = H2 {
            a: 2.0,
            d: 1.0,
            b: C::new(0.3, -0.4),
        };
        let b = m.inv_sqrt().unwrap();
        let v = [C::new(0.2, 0.1), C::new(-0.7, 0.5)];
        let out = b.apply(m.apply(b.apply(v)));
        assert!((out[0] - v[0]).norm() < 1e-12 && (out[1] - v[1]).norm() < 1e-12);
    }

    #[test]
    fn rejects_other_dimensions() {
        let ens = Ensemble::uniform(vec![PureState::basis(3, 0)]).unwrap();
        assert!(brute_force_qubit_fidelity(&ens, 1e-2).is_err());
    }
}
