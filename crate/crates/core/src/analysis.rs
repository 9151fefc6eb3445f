//! Von Neumann analysis of the semi-discrete schemes under RK4.
//!
//! For a Fourier mode `e^{i beta j}` the flux divergence of a stencil with
//! coefficients `a_s` gives `d<q>/dt = lambda <q>` with
//!
//! ```text
//! lambda = -(u/h) sum_s a_s e^{i s beta} (1 - e^{-i beta})
//! ```
//!
//! summed over dimensions. A step of size `dt` multiplies the mode by
//! `g = P(dt lambda)` where `P` is the RK4 polynomial.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::schemes::{SchemeName, StencilScheme};

/// Eigenvalue for one dimension built from the stencil coefficients.
pub fn stencil_eigenvalue_1d(scheme: &StencilScheme, beta: f64, u: f64, h: f64) -> Complex64 {
    let symbol: Complex64 = scheme
        .coefficients()
        .into_iter()
        .map(|(s, a)| a * Complex64::from_polar(1.0, s as f64 * beta))
        .sum();
    let shift = Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, -beta);
    -(u / h) * symbol * shift
}

/// Eigenvalue for one dimension from the trigonometric closed forms.
pub fn closed_form_eigenvalue_1d(name: SchemeName, beta: f64, u: f64, h: f64) -> Complex64 {
    let c = |m: f64| (m * beta).cos();
    let s = |m: f64| (m * beta).sin();
    let (re, im, den) = match name {
        SchemeName::C4 => (0.0, 16.0 * s(1.0) - 2.0 * s(2.0), 12.0),
        SchemeName::U5 => (
            -2.0 * c(3.0) + 12.0 * c(2.0) - 30.0 * c(1.0) + 20.0,
            2.0 * s(3.0) - 18.0 * s(2.0) + 90.0 * s(1.0),
            60.0,
        ),
        SchemeName::C6 => (0.0, 2.0 * s(3.0) - 18.0 * s(2.0) + 90.0 * s(1.0), 60.0),
        SchemeName::U7 => (
            3.0 * c(4.0) - 24.0 * c(3.0) + 84.0 * c(2.0) - 168.0 * c(1.0) + 105.0,
            -3.0 * s(4.0) + 32.0 * s(3.0) - 168.0 * s(2.0) + 672.0 * s(1.0),
            420.0,
        ),
        SchemeName::U9 => (
            -4.0 * c(5.0) + 40.0 * c(4.0) - 180.0 * c(3.0) + 480.0 * c(2.0) - 840.0 * c(1.0)
                + 504.0,
            4.0 * s(5.0) - 50.0 * s(4.0) + 300.0 * s(3.0) - 1200.0 * s(2.0) + 4200.0 * s(1.0),
            2520.0,
        ),
    };
    // the brackets are written for d/dx; the advection eigenvalue is its negative
    -(u / (den * h)) * Complex64::new(re, im)
}

/// Sum over dimensions of [`closed_form_eigenvalue_1d`].
pub fn scheme_eigenvalue(name: SchemeName, beta: &[f64], u: &[f64], h: f64) -> Complex64 {
    beta.iter()
        .zip(u)
        .map(|(&b, &v)| closed_form_eigenvalue_1d(name, b, v, h))
        .sum()
}

/// Sum over dimensions of [`stencil_eigenvalue_1d`].
pub fn stencil_eigenvalue(scheme: &StencilScheme, beta: &[f64], u: &[f64], h: f64) -> Complex64 {
    beta.iter()
        .zip(u)
        .map(|(&b, &v)| stencil_eigenvalue_1d(scheme, b, v, h))
        .sum()
}

/// RK4 amplification `P(z) = 1 + z + z^2/2 + z^3/6 + z^4/24`.
pub fn rk4_amplification(z: Complex64) -> Complex64 {
    1.0 + z * (1.0 + z * (0.5 + z * (1.0 / 6.0 + z / 24.0)))
}

/// `P(x + iy)` expanded into real and imaginary parts.
pub fn rk4_amplification_parts(x: f64, y: f64) -> (f64, f64) {
    let re = (1.0 + x + x * x / 2.0 + x.powi(3) / 6.0 + x.powi(4) / 24.0)
        - y * y / 2.0 * (1.0 + x + x * x / 2.0)
        + y.powi(4) / 24.0;
    let im = y * (1.0 + x + x * x / 2.0 + x.powi(3) / 6.0) - y.powi(3) / 6.0 * (1.0 + x);
    (re, im)
}

/// Intervals per `[-pi, pi]` in the stability scan; both endpoints sampled.
pub const BETA_INTERVALS: usize = 1024;
const STABILITY_TOL: f64 = 1e-12;

/// Unit-speed, unit-spacing eigenvalues `h lambda / u` on the beta grid.
fn normalized_spectrum(scheme: &StencilScheme, intervals: usize) -> Vec<Complex64> {
    (0..=intervals)
        .map(|k| {
            let beta = -PI + 2.0 * PI * k as f64 / intervals as f64;
            stencil_eigenvalue_1d(scheme, beta, 1.0, 1.0)
        })
        .collect()
}

fn stable_at(spectrum: &[Complex64], dim: usize, sigma: f64) -> bool {
    let ok = |z: Complex64| rk4_amplification(sigma * z).norm() <= 1.0 + STABILITY_TOL;
    match dim {
        1 => spectrum.iter().all(|&l| ok(l)),
        _ => spectrum
            .iter()
            .all(|&a| spectrum.iter().all(|&b| ok(a + b))),
    }
}

/// Largest `sigma = |u^d| dt / h` for which every mode on a
/// `BETA_INTERVALS`-point grid is stable, with equal speeds in every
/// dimension. Scans in steps of 0.01, then bisects to 1e-4.
pub fn max_stable_sigma(scheme: &StencilScheme, dim: usize) -> f64 {
    max_stable_sigma_with(scheme, dim, BETA_INTERVALS)
}

/// [`max_stable_sigma`] on a beta grid of `intervals` intervals.
pub fn max_stable_sigma_with(scheme: &StencilScheme, dim: usize, intervals: usize) -> f64 {
    assert!(dim == 1 || dim == 2, "dimension must be 1 or 2");
    let spectrum = normalized_spectrum(scheme, intervals);
    let mut lo = 0.0;
    let mut hi = 0.01;
    while stable_at(&spectrum, dim, hi) {
        lo = hi;
        hi += 0.01;
        assert!(hi < 10.0, "no stability limit found");
    }
    while hi - lo > 1e-4 {
        let mid = 0.5 * (lo + hi);
        if stable_at(&spectrum, dim, mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// One sample of the one-dimensional dispersion and dissipation curves.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModeSample {
    pub beta: f64,
    pub lambda: Complex64,
    /// `z = dt lambda`.
    pub z: Complex64,
    pub g: Complex64,
    /// `1 - |g|`.
    pub dissipation: f64,
    /// Normalized phase speed; `None` when `Re(g) = 0`.
    pub alpha: Option<f64>,
}

impl ModeSample {
    pub fn new(scheme: &StencilScheme, sigma: f64, beta: f64) -> Self {
        let lambda = stencil_eigenvalue_1d(scheme, beta, 1.0, 1.0);
        let z = sigma * lambda;
        let (re, im) = rk4_amplification_parts(z.re, z.im);
        let g = Complex64::new(re, im);
        let alpha = (re != 0.0).then(|| -im / (sigma * beta * re));
        Self {
            beta,
            lambda,
            z,
            g,
            dissipation: 1.0 - g.norm(),
            alpha,
        }
    }

    /// `|1 - alpha|`.
    pub fn phase_error(&self) -> Option<f64> {
        self.alpha.map(|a| (1.0 - a).abs())
    }
}

/// Samples at `beta = pi k / samples`, `k = 1..=samples`.
pub fn phase_dissipation_curve(
    scheme: &StencilScheme,
    sigma: f64,
    samples: usize,
) -> Vec<ModeSample> {
    (1..=samples)
        .map(|k| ModeSample::new(scheme, sigma, PI * k as f64 / samples as f64))
        .collect()
}
