//! Flux-corrected transport: hybridizes the RK4 high-order flux with the CTU
//! low-order flux so that the update stays inside local solution bounds.
//!
//! One step runs, in order: high-order fluxes, low-order fluxes and `q^td`,
//! antidiffusive fluxes, pre-constraint, bounds with extremum relaxation,
//! Laplacian flags, the `P/Q/R` least upper bounds, face coefficients `eta`,
//! and the update `q^{n+1} = q^td - dt/h div(eta A)`.

mod bounds;
mod preconstrain;

pub use bounds::{
    compute_bounds, extremum_along, extremum_bound_correction, laplacian_flags, second_differences,
    smooth_extremum_flags, stencil_size, BoundsPair,
};
pub use preconstrain::{dissipation_bound, face_is_constrained, preconstrain};

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::grid::{flux_divergence, CellField, FaceField};
use crate::highorder::rk4_high_order_step;
use crate::loworder::{low_order_step, low_order_update};
use crate::schemes::{ProductOrder, StencilScheme};
use crate::velocity::FaceVelocity;

/// `A = F_H - F_L` on every face, ghosts included.
pub fn antidiffusive(high: &FaceField, low: &FaceField) -> FaceField {
    high.combine(1.0, low, -1.0)
}

/// Antidiffusive in/outflow, distance to the bounds, and least upper bounds.
#[derive(Clone, Debug)]
pub struct Pqr {
    pub p_plus: CellField,
    pub p_minus: CellField,
    pub q_plus: CellField,
    pub q_minus: CellField,
    pub r_plus: CellField,
    pub r_minus: CellField,
}

/// `P`, `Q` and `R` for constrained fluxes `a`. `R` is zero where `P` is
/// not positive and at flagged cells.
pub fn compute_pqr(
    a: &FaceField,
    q_td: &CellField,
    bounds: &BoundsPair,
    flags: &[bool],
    dt: f64,
) -> Pqr {
    let grid = *a.grid();
    let scale = grid.h() / dt;
    let mut p_plus = CellField::zeros(grid);
    let mut p_minus = CellField::zeros(grid);
    let mut q_plus = CellField::zeros(grid);
    let mut q_minus = CellField::zeros(grid);
    let mut r_plus = CellField::zeros(grid);
    let mut r_minus = CellField::zeros(grid);
    for k in grid.interior() {
        let (mut pp, mut pm) = (0.0, 0.0);
        for d in 0..grid.dim() {
            let c = a.component(d);
            let (lo, hi) = (c[k - grid.stride(d)], c[k]);
            pp += lo.max(0.0) - hi.min(0.0);
            pm += hi.max(0.0) - lo.min(0.0);
        }
        p_plus[k] = pp;
        p_minus[k] = pm;
        q_plus[k] = (bounds.q_max[k] - q_td[k]) * scale;
        q_minus[k] = (q_td[k] - bounds.q_min[k]) * scale;
        if !flags[k] {
            r_plus[k] = if pp > 0.0 {
                f64::min(1.0, q_plus[k] / pp)
            } else {
                0.0
            };
            r_minus[k] = if pm > 0.0 {
                f64::min(1.0, q_minus[k] / pm)
            } else {
                0.0
            };
        }
    }
    for f in [
        &mut p_plus,
        &mut p_minus,
        &mut q_plus,
        &mut q_minus,
        &mut r_plus,
        &mut r_minus,
    ] {
        f.fill_ghosts();
    }
    Pqr {
        p_plus,
        p_minus,
        q_plus,
        q_minus,
        r_plus,
        r_minus,
    }
}

/// Face coefficients from the most restrictive bound of the two cells the
/// face separates: the receiving cell's `R+` and the giving cell's `R-`.
pub fn hybridize(a: &FaceField, r_plus: &CellField, r_minus: &CellField) -> FaceField {
    let grid = *a.grid();
    let mut eta = FaceField::zeros(grid);
    for d in 0..grid.dim() {
        let s = grid.stride(d);
        let c = a.component(d);
        let out = eta.component_mut(d);
        for k in grid.interior() {
            out[k] = if c[k] > 0.0 {
                r_plus[k + s].min(r_minus[k])
            } else {
                r_plus[k].min(r_minus[k + s])
            };
        }
        grid.fill_periodic(out);
    }
    eta
}

/// Which flux the step applies.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum LimiterMode {
    /// Full FCT hybridization.
    #[default]
    On,
    /// Unlimited high-order update.
    Off,
    /// Low-order CTU update only.
    OffLow,
}

impl FromStr for LimiterMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "on" => Ok(Self::On),
            "off" => Ok(Self::Off),
            "off-low" => Ok(Self::OffLow),
            other => Err(Error::config(
                "limiter",
                format!("unknown limiter mode '{other}' (expected on, off or off-low)"),
            )),
        }
    }
}

impl fmt::Display for LimiterMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::On => "on",
            Self::Off => "off",
            Self::OffLow => "off-low",
        })
    }
}

/// Where Laplacian sign changes zero `R`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum LaplacianRule {
    /// Every cell whose neighbourhood sees a sign change.
    Everywhere,
    /// Only cells that are also smooth extrema of `q^td`.
    #[default]
    SmoothExtrema,
    /// Never.
    Off,
}

/// Switches for diagnosing the limiter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LimiterOptions {
    pub preconstrain: bool,
    /// Apply the parabolic extremum relaxation to the bounds.
    pub extremum_correction: bool,
    pub laplacian: LaplacianRule,
    /// Replaces the computed `eta` on every face.
    pub eta_override: Option<f64>,
}

impl Default for LimiterOptions {
    fn default() -> Self {
        Self {
            preconstrain: true,
            extremum_correction: true,
            laplacian: LaplacianRule::default(),
            eta_override: None,
        }
    }
}

/// Intermediate results of one limited step.
#[derive(Clone, Debug)]
pub struct LimiterState {
    pub d2q: Vec<Vec<f64>>,
    pub antidiffusive: FaceField,
    pub constrained: FaceField,
    pub faces_constrained: usize,
    pub q_td: CellField,
    pub bounds: BoundsPair,
    pub extremum_flags: Vec<bool>,
    pub laplacian_flags: Vec<bool>,
    pub pqr: Pqr,
    pub eta: FaceField,
}

/// Summary of `eta` over interior faces.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EtaStats {
    pub min: f64,
    pub mean: f64,
    pub frac_below_one: f64,
}

impl EtaStats {
    pub fn of(eta: &FaceField) -> Self {
        let grid = eta.grid();
        let (mut min, mut sum, mut below, mut count) = (f64::INFINITY, 0.0, 0usize, 0usize);
        for d in 0..grid.dim() {
            for k in grid.interior() {
                let e = eta.component(d)[k];
                min = min.min(e);
                sum += e;
                below += usize::from(e < 1.0);
                count += 1;
            }
        }
        Self {
            min,
            mean: sum / count as f64,
            frac_below_one: below as f64 / count as f64,
        }
    }
}

#[derive(Clone, Debug)]
pub struct FctStep {
    pub q_next: CellField,
    /// Present only when the limiter ran.
    pub state: Option<LimiterState>,
}

/// Runs the limiter on precomputed fluxes. `qn` needs all ghosts filled.
pub fn limit(
    qn: &CellField,
    u_face: &FaceVelocity,
    dt: f64,
    high: &FaceField,
    low: &FaceField,
    options: LimiterOptions,
) -> LimiterState {
    let grid = *qn.grid();
    let q_td = low_order_update(qn, low, dt);
    let d2q = second_differences(qn);
    let a = antidiffusive(high, low);
    let (constrained, faces_constrained) = if options.preconstrain {
        preconstrain(&a, &q_td, &d2q, u_face, dt)
    } else {
        (a.clone(), 0)
    };

    let sigma = u_face.max_abs() * dt / grid.h();
    let raw = compute_bounds(qn, &q_td, u_face, sigma);
    let extremum_flags = smooth_extremum_flags(&q_td);
    let bounds = if options.extremum_correction {
        extremum_bound_correction(&extremum_flags, qn, &d2q, &raw)
    } else {
        raw
    };
    let mut lap = laplacian_flags(&grid, &d2q);
    match options.laplacian {
        LaplacianRule::Everywhere => {}
        LaplacianRule::SmoothExtrema => {
            for (f, e) in lap.iter_mut().zip(&extremum_flags) {
                *f &= *e;
            }
        }
        LaplacianRule::Off => lap.fill(false),
    }
    let pqr = compute_pqr(&constrained, &q_td, &bounds, &lap, dt);

    let eta = match options.eta_override {
        Some(v) => FaceField::constant(grid, v),
        None => hybridize(&constrained, &pqr.r_plus, &pqr.r_minus),
    };
    for d in 0..grid.dim() {
        assert!(
            eta.component(d).iter().all(|e| (0.0..=1.0).contains(e)),
            "hybridization coefficient outside [0, 1]"
        );
    }
    LimiterState {
        d2q,
        antidiffusive: a,
        constrained,
        faces_constrained,
        q_td,
        bounds,
        extremum_flags,
        laplacian_flags: lap,
        pqr,
        eta,
    }
}

/// `q^td - dt/h div(eta A)`.
pub fn limited_update(state: &LimiterState, dt: f64) -> CellField {
    let grid = *state.q_td.grid();
    let mut correction = FaceField::zeros(grid);
    for d in 0..grid.dim() {
        let (a, e) = (state.constrained.component(d), state.eta.component(d));
        for (out, (a, e)) in correction.component_mut(d).iter_mut().zip(a.iter().zip(e)) {
            *out = e * a;
        }
    }
    // an exact zero correction leaves q^td bitwise intact
    if correction.interior_abs_sum() == 0.0 {
        return state.q_td.clone();
    }
    let div = flux_divergence(&correction, dt);
    let mut q = state.q_td.clone();
    for k in grid.interior() {
        q[k] = state.q_td[k] - div[k];
    }
    q.fill_ghosts();
    q
}

/// One time step of size `dt` in the given mode.
pub fn fct_advance(
    qn: &CellField,
    u_face: &FaceVelocity,
    dt: f64,
    scheme: &StencilScheme,
    order: ProductOrder,
    mode: LimiterMode,
    options: LimiterOptions,
) -> FctStep {
    match mode {
        LimiterMode::Off => FctStep {
            q_next: rk4_high_order_step(qn, u_face, dt, scheme, order).q_high,
            state: None,
        },
        LimiterMode::OffLow => FctStep {
            q_next: low_order_step(qn, u_face, dt).q_td,
            state: None,
        },
        LimiterMode::On => {
            let high = rk4_high_order_step(qn, u_face, dt, scheme, order).flux;
            let low = low_order_step(qn, u_face, dt).flux;
            let state = limit(qn, u_face, dt, &high, &low, options);
            FctStep {
                q_next: limited_update(&state, dt),
                state: Some(state),
            }
        }
    }
}
