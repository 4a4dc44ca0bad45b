//! Archimedean side: branch points, periods, Abel–Jacobi map, Riemann theta
//! function and the theta Green function on `J(ℂ)`.

mod abel_jacobi;
mod green;
mod linalg;
mod periods;
mod roots;
mod theta;

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Complex, Float, Rational};

use crate::error::{Error, Result};
use crate::exact_algebra::UniPoly;

pub use abel_jacobi::{abel_jacobi, JacobianPoint};
pub use green::{archimedean_pairing, green_pairing, green_at_points, ArchimedeanOptions, MAX_RESAMPLES};
pub use linalg::{complex_inverse, real_inverse};
pub use periods::{homology_and_periods, PeriodData};
pub use roots::polynomial_roots;
pub use theta::{log_abs_theta, theta, theta_value, ThetaContext, ThetaValue};

/// Decimal working precision with guard digits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Precision {
    pub digits: u32,
    pub guard: u32,
}

pub const DEFAULT_GUARD: u32 = 10;
pub const MIN_DIGITS: u32 = 15;

impl Precision {
    pub fn new(digits: u32) -> Result<Self> {
        Self::with_guard(digits, DEFAULT_GUARD)
    }

    pub fn with_guard(digits: u32, guard: u32) -> Result<Self> {
        if digits < MIN_DIGITS {
            return Err(Error::invalid(format!("precision must be at least {MIN_DIGITS} digits, got {digits}")));
        }
        if guard == 0 {
            return Err(Error::invalid("guard digits must be positive"));
        }
        Ok(Precision { digits, guard })
    }

    /// Binary precision of all multiprecision arithmetic.
    pub fn bits(&self) -> u32 {
        ((self.digits + self.guard) as f64 * std::f64::consts::LOG2_10).ceil() as u32 + 16
    }

    pub fn working_digits(&self) -> u32 {
        self.digits + self.guard
    }

    /// `10^{-e}` at working precision.
    pub fn ten_to_minus(&self, e: i32) -> Float {
        Float::with_val(self.bits(), 10).pow(-e)
    }
}

/// A point of `y² = f(x)` over ℂ.
#[derive(Clone, Debug, PartialEq)]
pub enum CurvePoint {
    Infinity,
    Affine { x: Complex, y: Complex },
}

impl CurvePoint {
    pub fn affine(x: Complex, y: Complex) -> Self {
        CurvePoint::Affine { x, y }
    }

    /// Image under `(x, y) ↦ (x, −y)`.
    pub fn involution(&self) -> Self {
        match self {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine { x, y } => CurvePoint::Affine { x: x.clone(), y: -y.clone() },
        }
    }
}

pub(crate) fn pi(bits: u32) -> Float {
    Float::with_val(bits, Constant::Pi)
}

pub(crate) fn rational_to_complex(q: &Rational, bits: u32) -> Complex {
    Complex::with_val(bits, (Float::with_val(bits, q), 0))
}

/// `f(z)` for a rational polynomial and complex `z`.
pub fn eval_poly(f: &UniPoly, z: &Complex) -> Complex {
    let bits = z.prec().0;
    let mut acc = Complex::new(bits);
    for c in f.coeffs().iter().rev() {
        acc *= z;
        acc += Float::with_val(bits, c);
    }
    acc
}

pub(crate) fn eval_complex_poly(c: &[Complex], z: &Complex) -> Complex {
    let bits = z.prec().0;
    let mut acc = Complex::new(bits);
    for a in c.iter().rev() {
        acc *= z;
        acc += a;
    }
    acc
}

pub(crate) fn abs(z: &Complex) -> Float {
    Float::with_val(z.prec().0, z.abs_ref())
}

/// `x` rounded to `places` digits after the decimal point.
pub fn format_fixed(x: &Float, places: usize) -> String {
    let bits = x.prec().max(64);
    let scaled = Float::with_val(bits, x * Float::with_val(bits, 10).pow(places as u32));
    let n = scaled.to_integer().unwrap_or_default();
    let neg = n < 0;
    let digits = n.abs().to_string();
    let digits = if digits.len() <= places { format!("{}{digits}", "0".repeat(places + 1 - digits.len())) } else { digits };
    let (int, frac) = digits.split_at(digits.len() - places);
    let sign = if neg { "-" } else { "" };
    if places == 0 {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{frac}")
    }
}
