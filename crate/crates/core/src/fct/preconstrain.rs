//! Zeroing of antidiffusive fluxes that would steepen a discontinuity.

use crate::grid::{CellField, FaceField};
use crate::velocity::FaceVelocity;

/// Right-hand side of the magnitude test at a face: the CTU dissipation
/// term `(|u|/2)(1 - sigma) * avg(d2q)` in flux units.
pub fn dissipation_bound(u: f64, sigma_face: f64, d2q_lo: f64, d2q_hi: f64) -> f64 {
    0.5 * u.abs() * (1.0 - sigma_face) * 0.5 * (d2q_lo + d2q_hi).abs()
}

/// Whether the face `k + 1/2 e^d` meets all three constraint conditions.
pub fn face_is_constrained(
    a: f64,
    q_td: &CellField,
    d2q: &[f64],
    u: f64,
    sigma_face: f64,
    stride: usize,
    k: usize,
) -> bool {
    let s = stride;
    let steepens = a * (q_td[k + s] - q_td[k]) <= 0.0;
    let curvature_flips = f64::min(
        f64::min(d2q[k + s] * d2q[k], d2q[k] * d2q[k - s]),
        d2q[k + s] * d2q[k + 2 * s],
    ) < 0.0;
    steepens && curvature_flips && a.abs() <= dissipation_bound(u, sigma_face, d2q[k], d2q[k + s])
}

/// Returns the constrained fluxes and the number of interior faces zeroed.
pub fn preconstrain(
    a: &FaceField,
    q_td: &CellField,
    d2q: &[Vec<f64>],
    u_face: &FaceVelocity,
    dt: f64,
) -> (FaceField, usize) {
    let grid = *a.grid();
    let mut out = a.clone();
    let mut zeroed = 0;
    for (d, d2) in d2q.iter().enumerate() {
        let s = grid.stride(d);
        let u = u_face.component(d);
        let comp = out.component_mut(d);
        for k in grid.interior() {
            let sigma = u_face.face_cfl(d, k, dt);
            if comp[k] != 0.0 && face_is_constrained(comp[k], q_td, d2, u[k], sigma, s, k) {
                comp[k] = 0.0;
                zeroed += 1;
            }
        }
        grid.fill_periodic(comp);
    }
    (out, zeroed)
}
