//! Unlimited method-of-lines RK4 step and its combined face flux.
//!
//! The four stages are computed without any limiting. The step is returned
//! both as the stage combination `q0 + (k1 + 2 k2 + 2 k3 + k4)/6` and as the
//! time-averaged flux `F_H = (F0 + 2 F1 + 2 F2 + F3)/6`, whose divergence
//! reproduces the same update.

use crate::grid::{flux_divergence, CellField, FaceField};
use crate::schemes::{face_interpolate, product_rule_flux, ProductOrder, StencilScheme};
use crate::velocity::FaceVelocity;

/// Face fluxes `<q u^d>` for every dimension. `q` must have ghosts filled.
pub fn spatial_flux(
    q: &CellField,
    u_face: &FaceVelocity,
    scheme: &StencilScheme,
    order: ProductOrder,
) -> FaceField {
    let grid = *q.grid();
    let comps = (0..grid.dim())
        .map(|d| {
            let qf = face_interpolate(q, scheme, d, u_face);
            product_rule_flux(&grid, &qf, u_face.component(d), order, d)
        })
        .collect();
    FaceField::from_components(grid, comps)
}

/// Everything produced by one RK4 step.
#[derive(Clone, Debug)]
pub struct Rk4StageSet {
    /// Stage states `q^0..q^3`, ghosts filled.
    pub stages: [CellField; 4],
    /// Stage fluxes `F^(0)..F^(3)`.
    pub stage_fluxes: [FaceField; 4],
    /// Combined high-order flux.
    pub flux: FaceField,
    /// Stage-combination update.
    pub q_high: CellField,
}

/// One unlimited RK4 step of size `dt`.
pub fn rk4_high_order_step(
    qn: &CellField,
    u_face: &FaceVelocity,
    dt: f64,
    scheme: &StencilScheme,
    order: ProductOrder,
) -> Rk4StageSet {
    let grid = *qn.grid();
    let q0 = qn.clone();

    let stage = |base: &CellField, k: &CellField, w: f64| -> CellField {
        let mut q = base.clone();
        for i in grid.interior() {
            q[i] = base[i] + w * k[i];
        }
        q.fill_ghosts();
        q
    };
    // k_s = -D . F(q^s) dt
    let rate = |flux: &FaceField| -> CellField {
        let mut k = flux_divergence(flux, dt);
        for v in k.data_mut() {
            *v = -*v;
        }
        k
    };

    let f0 = spatial_flux(&q0, u_face, scheme, order);
    let k1 = rate(&f0);
    let q1 = stage(&q0, &k1, 0.5);
    let f1 = spatial_flux(&q1, u_face, scheme, order);
    let k2 = rate(&f1);
    let q2 = stage(&q0, &k2, 0.5);
    let f2 = spatial_flux(&q2, u_face, scheme, order);
    let k3 = rate(&f2);
    let q3 = stage(&q0, &k3, 1.0);
    let f3 = spatial_flux(&q3, u_face, scheme, order);
    let k4 = rate(&f3);

    let mut q_high = q0.clone();
    for i in grid.interior() {
        q_high[i] = q0[i] + (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) / 6.0;
    }
    q_high.fill_ghosts();

    let mut flux = FaceField::zeros(grid);
    for d in 0..grid.dim() {
        let (a, b, c, e) = (
            f0.component(d),
            f1.component(d),
            f2.component(d),
            f3.component(d),
        );
        for (i, out) in flux.component_mut(d).iter_mut().enumerate() {
            *out = (a[i] + 2.0 * b[i] + 2.0 * c[i] + e[i]) / 6.0;
        }
    }

    #[cfg(debug_assertions)]
    {
        let via_flux = flux_divergence(&flux, dt);
        let scale = q0.max_abs().max(q_high.max_abs()).max(1.0);
        for i in grid.interior() {
            let alt = q0[i] - via_flux[i];
            debug_assert!(
                !scale.is_finite() || (alt - q_high[i]).abs() <= 1e-13 * scale,
                "flux-form and stage-form RK4 disagree at {i}: {alt} vs {}",
                q_high[i]
            );
        }
    }

    Rk4StageSet {
        stages: [q0, q1, q2, q3],
        stage_fluxes: [f0, f1, f2, f3],
        flux,
        q_high,
    }
}
