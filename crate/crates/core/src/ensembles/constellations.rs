//! Canonical ensemble families: overlap-x pairs and qubit constellations.

use crate::error::{Error, Result};
use crate::linalg::c64;

use super::{Ensemble, PureState};

/// Two real qubit states `(cos(t/2), +-sin(t/2))` with `cos t = x`, so that
/// `|<psi0|psi1>| = x`, with priors `(prior0, 1 - prior0)`.
pub fn make_two_state_ensemble(x: f64, prior0: f64) -> Result<Ensemble> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::OutOfRange {
            name: "x",
            value: x,
            range: "[0, 1]",
        });
    }
    if !(0.0..=1.0).contains(&prior0) {
        return Err(Error::OutOfRange {
            name: "prior0",
            value: prior0,
            range: "[0, 1]",
        });
    }
    let c = ((1.0 + x) / 2.0).sqrt();
    let s = ((1.0 - x) / 2.0).sqrt();
    Ensemble::new(
        vec![prior0, 1.0 - prior0],
        vec![
            PureState::normalized(vec![c64(c, 0.0), c64(s, 0.0)])?,
            PureState::normalized(vec![c64(c, 0.0), c64(-s, 0.0)])?,
        ],
    )
}

/// Qubit state with Bloch vector `r` (normalized first).
pub fn bloch_state(r: [f64; 3]) -> Result<PureState> {
    let n = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
    if !(n.is_finite() && n > 0.0) {
        return Err(Error::InvalidInput("Bloch vector must be non-zero".into()));
    }
    let [x, y, z] = r.map(|a| a / n);
    let up = ((1.0 + z) / 2.0).max(0.0).sqrt();
    let down = ((1.0 - z) / 2.0).max(0.0).sqrt();
    let rho = x.hypot(y);
    let phase = if rho > 0.0 { c64(x / rho, y / rho) } else { c64(1.0, 0.0) };
    PureState::normalized(vec![c64(up, 0.0), phase * down])
}

/// Equal-prior qubit constellation of `n` states.
///
/// `n` in {2, 4, 6, 8, 12} gives the antipodal pair and the tetrahedron,
/// octahedron, cube and icosahedron vertices; other `n` use the directions
/// from [`symmetric_bloch_directions`].
pub fn symmetric_qubit_ensemble(n: usize) -> Result<Ensemble> {
    if n == 0 {
        return Err(Error::InvalidInput("constellation needs n >= 1".into()));
    }
    let states = symmetric_bloch_directions(n)
        .into_iter()
        .map(bloch_state)
        .collect::<Result<Vec<_>>>()?;
    Ensemble::uniform(states)
}

/// Unit Bloch vectors for an `n`-point constellation.
///
/// For generic `n >= 6` the Fibonacci lattice is moved (Gauss-Newton on the
/// tangent planes) until its first moment vanishes and its second moment is
/// exactly `n/3 * I`, i.e. until it is a spherical 2-design. `n` of 1, 3
/// and 5 admit no 2-design and use the raw lattice.
pub fn symmetric_bloch_directions(n: usize) -> Vec<[f64; 3]> {
    match n {
        2 => vec![[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]],
        4 => normalize_all(vec![
            [1.0, 1.0, 1.0],
            [1.0, -1.0, -1.0],
            [-1.0, 1.0, -1.0],
            [-1.0, -1.0, 1.0],
        ]),
        6 => vec![
            [1.0, 0.0, 0.0],
            [-1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, -1.0, 0.0],
            [0.0, 0.0, 1.0],
            [0.0, 0.0, -1.0],
        ],
        8 => {
            let mut v = Vec::with_capacity(8);
            for sx in [1.0, -1.0] {
                for sy in [1.0, -1.0] {
                    for sz in [1.0, -1.0] {
                        v.push([sx, sy, sz]);
                    }
                }
            }
            normalize_all(v)
        }
        12 => {
            let phi = (1.0 + 5f64.sqrt()) / 2.0;
            let mut v = Vec::with_capacity(12);
            for a in [1.0, -1.0] {
                for b in [phi, -phi] {
                    v.push([0.0, a, b]);
                    v.push([a, b, 0.0]);
                    v.push([b, 0.0, a]);
                }
            }
            normalize_all(v)
        }
        _ => {
            let lattice = fibonacci_lattice(n);
            if n >= 6 {
                refine_to_two_design(&lattice).unwrap_or(lattice)
            } else {
                lattice
            }
        }
    }
}

fn normalize_all(v: Vec<[f64; 3]>) -> Vec<[f64; 3]> {
    v.into_iter().map(normalize).collect()
}

fn normalize(p: [f64; 3]) -> [f64; 3] {
    let n = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
    p.map(|a| a / n)
}

fn fibonacci_lattice(n: usize) -> Vec<[f64; 3]> {
    let golden_angle = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|k| {
            let z = 1.0 - (2 * k + 1) as f64 / n as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden_angle * k as f64;
            normalize([r * phi.cos(), r * phi.sin(), z])
        })
        .collect()
}

const MOMENTS: usize = 8;

/// First moments, off-diagonal second moments, and xx, yy deviations from n/3.
fn moment_residual(points: &[[f64; 3]]) -> [f64; MOMENTS] {
    let third = points.len() as f64 / 3.0;
    let mut r = [0.0; MOMENTS];
    for &[x, y, z] in points {
        r[0] += x;
        r[1] += y;
        r[2] += z;
        r[3] += x * y;
        r[4] += x * z;
        r[5] += y * z;
        r[6] += x * x;
        r[7] += y * y;
    }
    r[6] -= third;
    r[7] -= third;
    r
}

fn tangent_basis(p: [f64; 3]) -> ([f64; 3], [f64; 3]) {
    let a = if p[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let dot = a[0] * p[0] + a[1] * p[1] + a[2] * p[2];
    let u = normalize([a[0] - dot * p[0], a[1] - dot * p[1], a[2] - dot * p[2]]);
    let v = [
        p[1] * u[2] - p[2] * u[1],
        p[2] * u[0] - p[0] * u[2],
        p[0] * u[1] - p[1] * u[0],
    ];
    (u, v)
}

/// Gradient of each moment with respect to a point's Cartesian coordinates.
fn moment_gradients([x, y, z]: [f64; 3]) -> [[f64; 3]; MOMENTS] {
    [
        [1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, 0.0, 1.0],
        [y, x, 0.0],
        [z, 0.0, x],
        [0.0, z, y],
        [2.0 * x, 0.0, 0.0],
        [0.0, 2.0 * y, 0.0],
    ]
}

fn refine_to_two_design(start: &[[f64; 3]]) -> Option<Vec<[f64; 3]>> {
    let n = start.len();
    let tol = 1e-13 * n as f64;
    let mut points = start.to_vec();
    for _ in 0..60 {
        let r = moment_residual(&points);
        if r.iter().all(|v| v.abs() < tol) {
            return Some(points);
        }
        // Jacobian with respect to two tangent coordinates per point.
        let mut jac = vec![[0.0; MOMENTS]; 2 * n];
        let mut bases = Vec::with_capacity(n);
        for (k, &p) in points.iter().enumerate() {
            let (u, v) = tangent_basis(p);
            let grads = moment_gradients(p);
            for m in 0..MOMENTS {
                let g = grads[m];
                jac[2 * k][m] = g[0] * u[0] + g[1] * u[1] + g[2] * u[2];
                jac[2 * k + 1][m] = g[0] * v[0] + g[1] * v[1] + g[2] * v[2];
            }
            bases.push((u, v));
        }
        // Minimum-norm step: dt = -J^T (J J^T)^{-1} r.
        let mut normal = [[0.0; MOMENTS]; MOMENTS];
        for col in &jac {
            for a in 0..MOMENTS {
                for b in 0..MOMENTS {
                    normal[a][b] += col[a] * col[b];
                }
            }
        }
        let y = solve_dense(normal, r)?;
        for (k, p) in points.iter_mut().enumerate() {
            let du: f64 = (0..MOMENTS).map(|m| jac[2 * k][m] * y[m]).sum();
            let dv: f64 = (0..MOMENTS).map(|m| jac[2 * k + 1][m] * y[m]).sum();
            let (u, v) = bases[k];
            *p = normalize([
                p[0] - du * u[0] - dv * v[0],
                p[1] - du * u[1] - dv * v[1],
                p[2] - du * u[2] - dv * v[2],
            ]);
        }
    }
    None
}

/// Gaussian elimination with partial pivoting.
fn solve_dense<const N: usize>(mut a: [[f64; N]; N], mut b: [f64; N]) -> Option<[f64; N]> {
    for col in 0..N {
        let pivot = (col..N).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in (col + 1)..N {
            let f = a[row][col] / a[col][col];
            for k in col..N {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; N];
    for row in (0..N).rev() {
        let s: f64 = ((row + 1)..N).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}
