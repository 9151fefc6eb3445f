//! Local solution bounds for the limiter: windowed max/min over a variable
//! stencil, relaxation at smooth extrema, and Laplacian sign-change flags.

use crate::grid::{CellField, Grid};
use crate::velocity::FaceVelocity;

/// Per-cell limiter bounds and the stencil half-width used for each cell.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundsPair {
    pub q_max: CellField,
    pub q_min: CellField,
    /// `s_i` in `{1, 2}`; zero on ghost cells.
    pub stencil: Vec<u8>,
    /// Cells whose bounds were relaxed by [`extremum_bound_correction`].
    pub relaxed: Vec<bool>,
}

/// Undivided second differences `q_{i+e} + q_{i-e} - 2 q_i` per dimension,
/// ghosts filled. `q` needs one ghost layer.
pub fn second_differences(q: &CellField) -> Vec<Vec<f64>> {
    let grid = *q.grid();
    (0..grid.dim())
        .map(|d| {
            let s = grid.stride(d);
            let mut out = vec![0.0; grid.len()];
            for k in grid.interior() {
                out[k] = q[k + s] + q[k - s] - 2.0 * q[k];
            }
            grid.fill_periodic(&mut out);
            out
        })
        .collect()
}

fn block_offsets(grid: &Grid, s: isize) -> Vec<isize> {
    let p = grid.padded_n() as isize;
    let mut offs = Vec::new();
    if grid.dim() == 1 {
        offs.extend(-s..=s);
    } else {
        for dj in -s..=s {
            for di in -s..=s {
                offs.push(dj * p + di);
            }
        }
    }
    offs
}

/// Stencil half-width for cell `k`: 2 when `sigma * max_d |u^d_i| >= 0.5`.
pub fn stencil_size(u_face: &FaceVelocity, sigma: f64, k: usize) -> u8 {
    let grid = u_face.grid();
    let umax = (0..grid.dim())
        .map(|d| u_face.cell_component(d, k).abs())
        .fold(0.0, f64::max);
    if sigma * umax >= 0.5 {
        2
    } else {
        1
    }
}

/// Max/min of both `q^n` and `q^td` over the `[2 s_i + 1]^D` block around
/// each cell. Both inputs need two ghost layers.
pub fn compute_bounds(
    qn: &CellField,
    q_td: &CellField,
    u_face: &FaceVelocity,
    sigma: f64,
) -> BoundsPair {
    let grid = *qn.grid();
    let small = block_offsets(&grid, 1);
    let large = block_offsets(&grid, 2);
    let mut q_max = CellField::zeros(grid);
    let mut q_min = CellField::zeros(grid);
    let mut stencil = vec![0u8; grid.len()];
    for k in grid.interior() {
        let s = stencil_size(u_face, sigma, k);
        stencil[k] = s;
        let offs = if s == 2 { &large } else { &small };
        let (mut hi, mut lo) = (f64::NEG_INFINITY, f64::INFINITY);
        for &o in offs {
            let j = (k as isize + o) as usize;
            hi = hi.max(qn[j]).max(q_td[j]);
            lo = lo.min(qn[j]).min(q_td[j]);
        }
        q_max[k] = hi;
        q_min[k] = lo;
    }
    q_max.fill_ghosts();
    q_min.fill_ghosts();
    BoundsPair {
        q_max,
        q_min,
        stencil,
        relaxed: vec![false; grid.len()],
    }
}

/// One-dimensional smooth-extremum test along `d` at cell `k`: the first
/// difference changes sign nearby, and the local variation is not that of a
/// jump.
pub fn extremum_along(q: &CellField, d: usize, k: usize) -> bool {
    let s = q.grid().stride(d) as isize;
    let at = |o: isize| q[(k as isize + o * s) as usize];
    // dq_j = q_j - q_{j-1}
    let dq = |o: isize| at(o) - at(o - 1);
    let sign_change = f64::min(dq(0) * dq(1), dq(-1) * dq(2)) <= 0.0;
    let dq_tot = (at(2) - at(-2)).abs();
    let tv = dq(2).abs() + dq(1).abs() + dq(0).abs() + dq(-1).abs();
    sign_change && 1.25 * dq_tot < tv
}

/// `q^td` is constant to 1e-14 across the three cells along `d` at `k`.
fn constant_along(q: &CellField, d: usize, k: usize) -> bool {
    let s = q.grid().stride(d);
    let (a, b, c) = (q[k - s], q[k], q[k + s]);
    let hi = a.max(b).max(c);
    let lo = a.min(b).min(c);
    f64::max((hi - b).abs(), (lo - b).abs()) <= 1e-14
}

/// Smooth extrema of `q^td`: flagged in every dimension, or flagged in some
/// dimension and constant along all the others. `q_td` needs three ghost
/// layers.
pub fn smooth_extremum_flags(q_td: &CellField) -> Vec<bool> {
    let grid = *q_td.grid();
    let mut flags = vec![false; grid.len()];
    for k in grid.interior() {
        let mut any = false;
        let mut ok = true;
        for d in 0..grid.dim() {
            if extremum_along(q_td, d, k) {
                any = true;
            } else if !constant_along(q_td, d, k) {
                ok = false;
            }
        }
        flags[k] = any && ok;
    }
    flags
}

/// Relaxes the bounds at flagged cells using the vertex of the local
/// parabola through `q^n`, corrected from cell average to point value.
///
/// Dimensions with `d2q <= 0` raise `q_max`; dimensions with `d2q > 0`
/// lower `q_min`. A dimension whose `|d2q|` is below `1e-14 max|q^n|` has
/// no usable vertex and is skipped.
pub fn extremum_bound_correction(
    flags: &[bool],
    qn: &CellField,
    d2q: &[Vec<f64>],
    bounds: &BoundsPair,
) -> BoundsPair {
    let grid = *qn.grid();
    let tiny = 1e-14 * qn.max_abs();
    let mut out = bounds.clone();
    for k in grid.interior().filter(|&k| flags[k]) {
        let q0 = qn[k];
        let mut hi_ext: Option<f64> = None;
        let mut lo_ext: Option<f64> = None;
        for (d, dd) in d2q.iter().enumerate() {
            let a2 = dd[k];
            if a2.abs() <= tiny || a2 == 0.0 {
                continue;
            }
            let s = grid.stride(d);
            let slope = 0.5 * (qn[k + s] - qn[k - s]);
            let xc = (-slope / a2).clamp(-0.5, 0.5);
            let q_ext = 0.5 * a2 * xc * xc + slope * xc + q0 - a2 / 24.0;
            if a2 <= 0.0 {
                hi_ext = Some(hi_ext.map_or(q_ext, |v| v.max(q_ext)));
            } else {
                lo_ext = Some(lo_ext.map_or(q_ext, |v| v.min(q_ext)));
            }
        }
        if let Some(e) = hi_ext {
            let e = e.max(bounds.q_max[k]);
            out.q_max[k] = q0 + f64::max(0.0, 2.0 * (e - q0).abs());
            out.relaxed[k] = true;
        }
        if let Some(e) = lo_ext {
            let e = e.min(bounds.q_min[k]);
            out.q_min[k] = q0 - f64::max(0.0, 2.0 * (e - q0).abs());
            out.relaxed[k] = true;
        }
    }
    out.q_max.fill_ghosts();
    out.q_min.fill_ghosts();
    out
}

/// Cells where the discrete Laplacian `sum_d d2q_d / h^2` is strictly
/// positive somewhere and strictly negative somewhere in the surrounding
/// `3^D` block.
pub fn laplacian_flags(grid: &Grid, d2q: &[Vec<f64>]) -> Vec<bool> {
    // h^2 > 0 leaves signs unchanged, so the undivided sum is enough
    let mut lap = vec![0.0; grid.len()];
    for k in grid.interior() {
        lap[k] = d2q.iter().map(|dd| dd[k]).sum();
    }
    grid.fill_periodic(&mut lap);
    let offs = block_offsets(grid, 1);
    let mut flags = vec![false; grid.len()];
    for k in grid.interior() {
        let (mut pos, mut neg) = (false, false);
        for &o in &offs {
            let v = lap[(k as isize + o) as usize];
            pos |= v > 0.0;
            neg |= v < 0.0;
        }
        flags[k] = pos && neg;
    }
    flags
}
