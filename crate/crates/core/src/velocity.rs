//! Steady, divergence-free advecting velocities and their face averages.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::grid::{FaceField, Grid};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VelocityKind {
    /// `u = (1, 1)` (or `u = 1` in one dimension).
    ConstantDiagonal,
    /// `u = 2 pi (y - yc, xc - x)`, one revolution per unit time.
    SolidBodyRotation,
}

impl FromStr for VelocityKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "constant" | "constant-diagonal" => Ok(Self::ConstantDiagonal),
            "rotation" | "solid-body-rotation" => Ok(Self::SolidBodyRotation),
            other => Err(Error::config(
                "velocity",
                format!("unknown velocity '{other}' (expected constant or rotation)"),
            )),
        }
    }
}

impl fmt::Display for VelocityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::ConstantDiagonal => "constant",
            Self::SolidBodyRotation => "rotation",
        })
    }
}

/// An analytic velocity field. Both kinds are affine in position, so the
/// value at a face centroid is the exact face average.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VelocityField {
    kind: VelocityKind,
    center: [f64; 2],
}

impl VelocityField {
    pub fn constant_diagonal() -> Self {
        Self {
            kind: VelocityKind::ConstantDiagonal,
            center: [0.0; 2],
        }
    }

    /// Solid-body rotation about `center`.
    pub fn rotation(center: [f64; 2]) -> Self {
        Self {
            kind: VelocityKind::SolidBodyRotation,
            center,
        }
    }

    /// The field of `kind` suited to `grid`: rotation turns about the
    /// domain center, which is `(0.5, 0.5)` on the unit square.
    pub fn for_grid(kind: VelocityKind, grid: &Grid) -> Result<Self> {
        match kind {
            VelocityKind::ConstantDiagonal => Ok(Self::constant_diagonal()),
            VelocityKind::SolidBodyRotation => {
                if grid.dim() != 2 {
                    return Err(Error::InvalidProblem(
                        "solid-body rotation needs a two-dimensional grid".into(),
                    ));
                }
                let c = 0.5 * (grid.lo() + grid.hi());
                Ok(Self::rotation([c, c]))
            }
        }
    }

    pub fn kind(&self) -> VelocityKind {
        self.kind
    }

    pub fn center(&self) -> [f64; 2] {
        self.center
    }

    /// Point value at `x`.
    pub fn eval(&self, x: [f64; 2]) -> [f64; 2] {
        match self.kind {
            VelocityKind::ConstantDiagonal => [1.0, 1.0],
            VelocityKind::SolidBodyRotation => [
                2.0 * PI * (x[1] - self.center[1]),
                2.0 * PI * (self.center[0] - x[0]),
            ],
        }
    }

    /// Backward characteristic: the point that reaches `x` after time `t`.
    pub fn trace_back(&self, x: [f64; 2], t: f64) -> [f64; 2] {
        match self.kind {
            VelocityKind::ConstantDiagonal => [x[0] - t, x[1] - t],
            VelocityKind::SolidBodyRotation => {
                // Clockwise rotation by 2 pi t; undo it.
                let turns = t.rem_euclid(1.0);
                if turns == 0.0 {
                    return x;
                }
                let theta = 2.0 * PI * turns;
                let (s, c) = theta.sin_cos();
                let dx = x[0] - self.center[0];
                let dy = x[1] - self.center[1];
                [
                    self.center[0] + c * dx - s * dy,
                    self.center[1] + s * dx + c * dy,
                ]
            }
        }
    }
}

/// Face-averaged normal velocities `<u^d>_{i+1/2 e^d}`.
#[derive(Clone, Debug, PartialEq)]
pub struct FaceVelocity {
    faces: FaceField,
}

impl FaceVelocity {
    pub fn from_faces(faces: FaceField) -> Self {
        Self { faces }
    }

    pub fn faces(&self) -> &FaceField {
        &self.faces
    }

    pub fn grid(&self) -> &Grid {
        self.faces.grid()
    }

    pub fn component(&self, d: usize) -> &[f64] {
        self.faces.component(d)
    }

    /// Per-face Courant number `|u^d| dt / h`.
    pub fn face_cfl(&self, d: usize, k: usize, dt: f64) -> f64 {
        self.faces.component(d)[k].abs() * dt / self.grid().h()
    }

    /// Cell-averaged velocity component: the mean of the two bounding faces,
    /// exact for affine fields.
    pub fn cell_component(&self, d: usize, k: usize) -> f64 {
        let u = self.faces.component(d);
        0.5 * (u[k] + u[k - self.grid().stride(d)])
    }

    pub fn max_abs(&self) -> f64 {
        let grid = self.grid();
        (0..grid.dim())
            .flat_map(|d| grid.interior().map(move |k| self.component(d)[k].abs()))
            .fold(0.0, f64::max)
    }

    /// [`FaceVelocity::max_abs`], rejecting a motionless field.
    pub fn max_speed(&self) -> Result<f64> {
        let s = self.max_abs();
        if s > 0.0 {
            Ok(s)
        } else {
            Err(Error::DegenerateVelocity)
        }
    }
}

/// Exact face averages of `v` on every interior face; ghost faces hold
/// periodic images.
pub fn face_average_velocity(v: &VelocityField, grid: &Grid) -> FaceVelocity {
    let mut faces = FaceField::zeros(*grid);
    for d in 0..grid.dim() {
        let comp = faces.component_mut(d);
        for (cell, k) in grid.interior_cells() {
            comp[k] = v.eval(grid.face_centroid(d, cell))[d];
        }
    }
    faces.fill_ghosts();
    FaceVelocity { faces }
}

/// Largest `|u^d|` over all interior faces; `dt = sigma h / max_speed`.
pub fn max_speed(v: &VelocityField, grid: &Grid) -> Result<f64> {
    face_average_velocity(v, grid).max_speed()
}
