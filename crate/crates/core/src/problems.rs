//! Test problems: initial conditions as cell averages, exact solutions by
//! back-tracing characteristics, and max-norm errors.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::grid::{CellField, Grid};
use crate::velocity::{VelocityField, VelocityKind};

pub use crate::solver::convergence_study;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum IcKind {
    Cosine8,
    Square,
    SemiEllipse,
    SlottedCylinder,
}

impl FromStr for IcKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "cosine8" | "cos8" => Ok(Self::Cosine8),
            "square" => Ok(Self::Square),
            "semi-ellipse" | "semiellipse" => Ok(Self::SemiEllipse),
            "slotted-cylinder" | "cylinder" => Ok(Self::SlottedCylinder),
            other => Err(Error::config(
                "ic",
                format!("unknown initial condition '{other}' (expected cosine8, square, semi-ellipse or slotted-cylinder)"),
            )),
        }
    }
}

impl fmt::Display for IcKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Cosine8 => "cosine8",
            Self::Square => "square",
            Self::SemiEllipse => "semi-ellipse",
            Self::SlottedCylinder => "slotted-cylinder",
        })
    }
}

/// A length given either physically or in cells of the run's grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Length {
    Physical(f64),
    Cells(f64),
}

impl Length {
    pub fn resolve(self, h: f64) -> f64 {
        match self {
            Self::Physical(v) => v,
            Self::Cells(c) => c * h,
        }
    }
}

/// Half-width of the square.
pub const SQUARE_HALF_WIDTH: f64 = 0.15;
pub const SEMI_ELLIPSE_RADIUS: f64 = 0.25;
/// Default cosine-bump radius: 15 cells at `N = 128`, fixed across grids.
pub const COSINE8_RADIUS: f64 = 15.0 / 128.0;
pub const CYLINDER_RADIUS: f64 = 30.0 / 256.0;
pub const SLOT_WIDTH: f64 = 10.0 / 256.0;
/// Measured upward from the bottom of the cylinder.
pub const SLOT_LENGTH: f64 = 50.0 / 256.0;

const GAUSS_POINTS: usize = 8;
const SUBSAMPLES: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProblemSpec {
    pub ic: IcKind,
    pub velocity: VelocityKind,
    pub dim: usize,
    pub lo: f64,
    pub hi: f64,
    pub cosine_radius: Length,
}

impl ProblemSpec {
    /// Unit domain, except the semi-ellipse under rotation which uses
    /// `[0, 2]^2` to keep it clear of the boundary.
    pub fn new(ic: IcKind, velocity: VelocityKind, dim: usize) -> Result<Self> {
        let hi = if ic == IcKind::SemiEllipse && velocity == VelocityKind::SolidBodyRotation {
            2.0
        } else {
            1.0
        };
        let spec = Self {
            ic,
            velocity,
            dim,
            lo: 0.0,
            hi,
            cosine_radius: Length::Physical(COSINE8_RADIUS),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_cosine_radius(mut self, r: Length) -> Result<Self> {
        self.cosine_radius = r;
        self.validate()?;
        Ok(self)
    }

    pub fn with_domain(mut self, lo: f64, hi: f64) -> Result<Self> {
        self.lo = lo;
        self.hi = hi;
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        if self.dim != 1 && self.dim != 2 {
            return Err(Error::InvalidProblem(format!(
                "dimension {} not supported",
                self.dim
            )));
        }
        if self.velocity == VelocityKind::SolidBodyRotation && self.dim != 2 {
            return Err(Error::InvalidProblem(
                "solid-body rotation needs dim = 2".into(),
            ));
        }
        if self.ic == IcKind::SlottedCylinder
            && (self.dim != 2 || self.velocity != VelocityKind::SolidBodyRotation)
        {
            return Err(Error::InvalidProblem(
                "the slotted cylinder needs dim = 2 and solid-body rotation".into(),
            ));
        }
        if self.hi <= self.lo || self.hi.is_nan() || self.lo.is_nan() {
            return Err(Error::InvalidProblem("empty domain".into()));
        }
        if let Length::Physical(r) = self.cosine_radius {
            if !(r > 0.0 && r < 0.5 * (self.hi - self.lo)) {
                return Err(Error::InvalidProblem(format!(
                    "cosine radius {r} must lie inside the domain"
                )));
            }
        }
        Ok(())
    }

    pub fn extent(&self) -> f64 {
        self.hi - self.lo
    }

    /// Grid with `n` cells per dimension on this problem's domain.
    pub fn grid(&self, n: usize) -> Result<Grid> {
        Grid::new(self.dim, n, self.lo, self.hi)
    }

    /// Domain center for constant velocity; a quarter of the domain above it
    /// for rotation.
    pub fn center(&self) -> [f64; 2] {
        let mid = self.lo + 0.5 * self.extent();
        match self.velocity {
            VelocityKind::ConstantDiagonal => [mid, mid],
            VelocityKind::SolidBodyRotation => [mid, mid + 0.25 * self.extent()],
        }
    }

    pub fn velocity_field(&self, grid: &Grid) -> Result<VelocityField> {
        VelocityField::for_grid(self.velocity, grid)
    }

    /// Point value of the initial condition, periodic in the domain.
    pub fn point_value(&self, x: [f64; 2], h: f64) -> f64 {
        let c = self.center();
        let l = self.extent();
        // minimum-image offsets from the center
        let mut dx = [0.0; 2];
        for d in 0..self.dim {
            dx[d] = (x[d] - c[d] + 0.5 * l).rem_euclid(l) - 0.5 * l;
        }
        let r = (dx[0] * dx[0] + dx[1] * dx[1]).sqrt();
        match self.ic {
            IcKind::Cosine8 => {
                let r0 = self.cosine_radius.resolve(h);
                if r <= r0 {
                    (0.5 * PI * r / r0).cos().powi(8)
                } else {
                    0.0
                }
            }
            IcKind::Square => {
                f64::from(dx[..self.dim].iter().all(|v| v.abs() <= SQUARE_HALF_WIDTH))
            }
            IcKind::SemiEllipse => {
                let s = r / SEMI_ELLIPSE_RADIUS;
                if s <= 1.0 {
                    (1.0 - s * s).sqrt()
                } else {
                    0.0
                }
            }
            IcKind::SlottedCylinder => {
                let in_disk = r <= CYLINDER_RADIUS;
                let in_slot =
                    dx[0].abs() <= 0.5 * SLOT_WIDTH && dx[1] <= -CYLINDER_RADIUS + SLOT_LENGTH;
                f64::from(in_disk && !in_slot)
            }
        }
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` by Newton iteration.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let step = p1 / dp;
                x -= step;
                if step.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

/// Averaging rule: tensor Gauss-Legendre or uniform midpoint subsamples.
#[derive(Clone, Copy, Debug, PartialEq)]
enum Rule {
    Gauss(usize),
    Midpoint(usize),
}

fn rule_points(rule: Rule) -> Vec<(f64, f64)> {
    // offsets in [0, 1]; weights are normalized by their total afterwards
    match rule {
        Rule::Gauss(n) => gauss_legendre(n)
            .into_iter()
            .map(|(x, w)| (0.5 * (x + 1.0), w))
            .collect(),
        Rule::Midpoint(m) => (0..m).map(|i| ((i as f64 + 0.5) / m as f64, 1.0)).collect(),
    }
}

fn average_field(grid: Grid, rule: Rule, f: impl Fn([f64; 2]) -> f64) -> CellField {
    let pts = rule_points(rule);
    let h = grid.h();
    let one = [(0.0, 1.0)];
    CellField::from_fn(grid, |c| {
        let ys: &[(f64, f64)] = if grid.dim() == 2 { &pts } else { &one };
        let (x0, y0) = (grid.edge(c[0]), grid.edge(c[1]));
        let (mut acc, mut total) = (0.0, 0.0);
        for &(oy, wy) in ys {
            for &(ox, wx) in &pts {
                let y = if grid.dim() == 2 { y0 + oy * h } else { 0.0 };
                acc += wx * wy * f([x0 + ox * h, y]);
                total += wx * wy;
            }
        }
        acc / total
    })
}

/// Exact fraction of `[a, b]` covered by the periodic images of
/// `[c - w, c + w]`.
fn interval_overlap(a: f64, b: f64, c: f64, w: f64, period: f64) -> f64 {
    let base = (c - a).div_euclid(period);
    (-2..=2)
        .map(|m| {
            let cc = c - (base + m as f64) * period;
            ((b.min(cc + w) - a.max(cc - w)).max(0.0)) / (b - a)
        })
        .sum()
}

fn check_grid(spec: &ProblemSpec, grid: &Grid) -> Result<()> {
    if grid.dim() != spec.dim || grid.lo() != spec.lo || grid.hi() != spec.hi {
        return Err(Error::GridMismatch(format!(
            "problem is {}D on [{}, {}], grid is {}D on [{}, {}]",
            spec.dim,
            spec.lo,
            spec.hi,
            grid.dim(),
            grid.lo(),
            grid.hi()
        )));
    }
    Ok(())
}

fn square_by_overlap(spec: &ProblemSpec, grid: Grid, center: [f64; 2]) -> CellField {
    CellField::from_fn(grid, |c| {
        (0..grid.dim())
            .map(|d| {
                interval_overlap(
                    grid.edge(c[d]),
                    grid.edge(c[d] + 1),
                    center[d],
                    SQUARE_HALF_WIDTH,
                    spec.extent(),
                )
            })
            .product()
    })
}

fn default_rule(ic: IcKind) -> Rule {
    match ic {
        IcKind::Cosine8 => Rule::Gauss(GAUSS_POINTS),
        _ => Rule::Midpoint(SUBSAMPLES),
    }
}

/// Cell averages of the initial condition.
pub fn initial_condition(spec: &ProblemSpec, grid: &Grid) -> Result<CellField> {
    check_grid(spec, grid)?;
    let h = grid.h();
    Ok(match spec.ic {
        IcKind::Square => square_by_overlap(spec, *grid, spec.center()),
        ic => average_field(*grid, default_rule(ic), |x| spec.point_value(x, h)),
    })
}

/// Cell averages of the exact solution at time `t`, traced back along the
/// characteristics of the problem's velocity.
pub fn exact_solution(spec: &ProblemSpec, grid: &Grid, t: f64) -> Result<CellField> {
    check_grid(spec, grid)?;
    let v = spec.velocity_field(grid)?;
    let h = grid.h();
    match spec.velocity {
        VelocityKind::ConstantDiagonal => {
            let shift = t.rem_euclid(spec.extent());
            if shift == 0.0 {
                return initial_condition(spec, grid);
            }
            if spec.ic == IcKind::Square {
                let c = spec.center();
                return Ok(square_by_overlap(spec, *grid, [c[0] + shift, c[1] + shift]));
            }
            Ok(average_field(*grid, default_rule(spec.ic), |x| {
                spec.point_value(v.trace_back(x, shift), h)
            }))
        }
        VelocityKind::SolidBodyRotation => {
            if t.rem_euclid(1.0) == 0.0 {
                return initial_condition(spec, grid);
            }
            Ok(average_field(*grid, default_rule(spec.ic), |x| {
                spec.point_value(v.trace_back(x, t), h)
            }))
        }
    }
}

/// Max over interior cells of `|num - exact|`.
pub fn max_norm_error(num: &CellField, exact: &CellField) -> Result<f64> {
    if num.grid() != exact.grid() {
        return Err(Error::GridMismatch("fields live on different grids".into()));
    }
    Ok(num
        .grid()
        .interior()
        .map(|k| (num[k] - exact[k]).abs())
        .fold(0.0, f64::max))
}

/// Error at one resolution and the observed order against the previous one.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorReport {
    pub n: usize,
    pub error: f64,
    pub order: Option<f64>,
}

/// Observed orders `log2(e_{k-1}/e_k) / log2(N_k/N_{k-1})` for a sequence
/// of `(N, error)` pairs.
pub fn observed_orders(results: &[(usize, f64)]) -> Vec<ErrorReport> {
    results
        .iter()
        .enumerate()
        .map(|(i, &(n, error))| ErrorReport {
            n,
            error,
            order: (i > 0).then(|| {
                let (n0, e0) = results[i - 1];
                (e0 / error).ln() / (n as f64 / n0 as f64).ln()
            }),
        })
        .collect()
}
