//! Linear face-interpolation stencils and the product rule that turns face
//! averages of `q` and `u^d` into face averages of the flux `q u^d`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::grid::{CellField, Grid};
use crate::velocity::FaceVelocity;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SchemeName {
    C4,
    U5,
    C6,
    U7,
    U9,
}

impl SchemeName {
    pub const ALL: [SchemeName; 5] = [Self::C4, Self::U5, Self::C6, Self::U7, Self::U9];
}

impl FromStr for SchemeName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "c4" => Ok(Self::C4),
            "u5" => Ok(Self::U5),
            "c6" => Ok(Self::C6),
            "u7" => Ok(Self::U7),
            "u9" => Ok(Self::U9),
            _ => Err(Error::UnknownScheme(s.to_string())),
        }
    }
}

impl fmt::Display for SchemeName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::C4 => "c4",
            Self::U5 => "u5",
            Self::C6 => "c6",
            Self::U7 => "u7",
            Self::U9 => "u9",
        })
    }
}

/// Accuracy of the face-average product `<q u^d>`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProductOrder {
    Second,
    Fourth,
    Sixth,
}

impl ProductOrder {
    pub fn as_usize(self) -> usize {
        match self {
            Self::Second => 2,
            Self::Fourth => 4,
            Self::Sixth => 6,
        }
    }

    pub fn from_usize(order: usize) -> Result<Self> {
        match order {
            2 => Ok(Self::Second),
            4 => Ok(Self::Fourth),
            6 => Ok(Self::Sixth),
            _ => Err(Error::config(
                "product-order",
                format!("product order must be 2, 4 or 6, got {order}"),
            )),
        }
    }
}

/// A face stencil `<q>_{i+1/2} = sum_s a_s <q>_{i+s}` for `u >= 0`, with
/// coefficients stored as exact rationals.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StencilScheme {
    name: SchemeName,
    first_offset: isize,
    numerators: &'static [i64],
    denominator: i64,
    order: usize,
    upwind: bool,
}

impl StencilScheme {
    pub fn name(&self) -> SchemeName {
        self.name
    }

    /// Half-width `S`: odd orders use offsets `-S..=S`, even orders `-S+1..=S`.
    pub fn half_width(&self) -> usize {
        self.last_offset() as usize
    }

    pub fn first_offset(&self) -> isize {
        self.first_offset
    }

    pub fn last_offset(&self) -> isize {
        self.first_offset + self.numerators.len() as isize - 1
    }

    pub fn numerators(&self) -> &'static [i64] {
        self.numerators
    }

    pub fn denominator(&self) -> i64 {
        self.denominator
    }

    /// `(s, a_s)` pairs in increasing `s`.
    pub fn coefficients(&self) -> Vec<(isize, f64)> {
        let den = self.denominator as f64;
        self.numerators
            .iter()
            .enumerate()
            .map(|(j, &num)| (self.first_offset + j as isize, num as f64 / den))
            .collect()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn is_upwind(&self) -> bool {
        self.upwind
    }

    /// Product-rule order paired with this stencil.
    pub fn default_product_order(&self) -> ProductOrder {
        match self.name {
            SchemeName::C4 | SchemeName::U5 => ProductOrder::Fourth,
            _ => ProductOrder::Sixth,
        }
    }
}

pub fn scheme_coefficients(name: SchemeName) -> StencilScheme {
    let (first_offset, numerators, denominator, order, upwind): (
        isize,
        &'static [i64],
        i64,
        usize,
        bool,
    ) = match name {
        SchemeName::C4 => (-1, &[-1, 7, 7, -1], 12, 4, false),
        SchemeName::U5 => (-2, &[2, -13, 47, 27, -3], 60, 5, true),
        SchemeName::C6 => (-2, &[1, -8, 37, 37, -8, 1], 60, 6, false),
        SchemeName::U7 => (-3, &[-3, 25, -101, 319, 214, -38, 4], 420, 7, true),
        SchemeName::U9 => (
            -4,
            &[4, -41, 199, -641, 1879, 1375, -305, 55, -5],
            2520,
            9,
            true,
        ),
    };
    StencilScheme {
        name,
        first_offset,
        numerators,
        denominator,
        order,
        upwind,
    }
}

impl FromStr for StencilScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.parse::<SchemeName>().map(scheme_coefficients)
    }
}

/// Face averages `<q>_{i+1/2 e^d}` on every interior face, ghosts filled.
///
/// Upwind stencils are mirrored about the face (`s -> 1 - s`) where
/// `u^d < 0`; a zero velocity takes the `u >= 0` orientation.
pub fn face_interpolate(
    q: &CellField,
    scheme: &StencilScheme,
    d: usize,
    u_face: &FaceVelocity,
) -> Vec<f64> {
    let grid = *q.grid();
    let stride = grid.stride(d) as isize;
    let coeffs = scheme.coefficients();
    let u = u_face.component(d);
    let data = q.data();
    let mut out = vec![0.0; grid.len()];
    for k in grid.interior() {
        let ki = k as isize;
        let mirrored = scheme.is_upwind() && u[k] < 0.0;
        let mut acc = 0.0;
        for &(s, a) in &coeffs {
            let off = if mirrored { 1 - s } else { s };
            acc += a * data[(ki + off * stride) as usize];
        }
        out[k] = acc;
    }
    grid.fill_periodic(&mut out);
    out
}

/// Undivided transverse derivatives of a face array, evaluated
/// at face `k`. Each is `h^m d^m f / dx^m` for a point value at the face
/// center, reconstructed from neighbouring face averages.
struct Transverse<'a> {
    f: &'a [f64],
    k: usize,
    stride: usize,
}

impl Transverse<'_> {
    fn at(&self, off: isize) -> f64 {
        self.f[(self.k as isize + off * self.stride as isize) as usize]
    }

    /// Second-order first derivative.
    fn first2(&self) -> f64 {
        0.5 * (self.at(1) - self.at(-1))
    }

    /// Fourth-order first derivative of the point value. The plain
    /// five-point difference of averages carries an extra `h^2/24 f'''`.
    fn first4(&self) -> f64 {
        (34.0 * (self.at(1) - self.at(-1)) - 5.0 * (self.at(2) - self.at(-2))) / 48.0
    }

    fn second2(&self) -> f64 {
        self.at(1) - 2.0 * self.at(0) + self.at(-1)
    }

    fn third2(&self) -> f64 {
        0.5 * (self.at(2) - 2.0 * self.at(1) + 2.0 * self.at(-1) - self.at(-2))
    }
}

/// Face averages of `q u^d` from face averages of `q` and `u^d`, using the
/// product rule of the requested order with transverse corrections summed
/// over every `d' != d`. Both inputs must have ghost faces filled.
pub fn product_rule_flux(
    grid: &Grid,
    q_face: &[f64],
    u_face: &[f64],
    order: ProductOrder,
    d: usize,
) -> Vec<f64> {
    let mut out = vec![0.0; grid.len()];
    for k in grid.interior() {
        let mut flux = q_face[k] * u_face[k];
        for dp in (0..grid.dim()).filter(|&e| e != d) {
            let stride = grid.stride(dp);
            let q = Transverse {
                f: q_face,
                k,
                stride,
            };
            let u = Transverse {
                f: u_face,
                k,
                stride,
            };
            match order {
                ProductOrder::Second => {}
                ProductOrder::Fourth => {
                    flux += q.first2() * u.first2() / 12.0;
                }
                ProductOrder::Sixth => {
                    flux += q.first4() * u.first4() / 12.0;
                    flux += (3.0 * q.third2() * u.first2()
                        + 3.0 * u.third2() * q.first2()
                        + 2.0 * u.second2() * q.second2())
                        / 1440.0;
                }
            }
        }
        out[k] = flux;
    }
    grid.fill_periodic(&mut out);
    out
}
