use rug::{Complex, Float};

use super::{abs, eval_complex_poly, pi, CurvePoint, PeriodData};
use crate::error::{Error, Result};

const DIRECTIONS: u32 = 64;
const MAX_LEVEL: u32 = 14;

/// A point of `ℂ^g`, taken modulo the period lattice `ℤ^g + Ωℤ^g`.
#[derive(Clone, Debug, PartialEq)]
pub struct JacobianPoint {
    pub z: Vec<Complex>,
}

/// `α(p) = ∫_∞^p (ω_1, …, ω_g)`.
///
/// The path is the ray from `p` to infinity in the direction that stays
/// furthest from the branch points, with `y` continued along it; the integral
/// over `r ∈ [0, ∞)` is taken with the double-exponential substitution
/// `r = exp(2π sinh u)`.
pub fn abel_jacobi(p: &CurvePoint, data: &PeriodData) -> Result<JacobianPoint> {
    let g = data.genus;
    let bits = data.bits();
    let (xp, yp) = match p {
        CurvePoint::Infinity => return Ok(JacobianPoint { z: vec![Complex::new(bits); g] }),
        CurvePoint::Affine { x, y } => (Complex::with_val(bits, x), Complex::with_val(bits, y)),
    };
    let fx = eval_complex_poly(&data.f, &xp);
    let resid = abs(&Complex::with_val(bits, Complex::with_val(bits, yp.square_ref()) - &fx));
    let bound = data.precision.ten_to_minus((data.precision.digits / 2) as i32) * (abs(&fx) + 1u32);
    if resid > bound {
        return Err(Error::invalid("point is not on the curve to working precision"));
    }

    let dir = best_direction(&xp, &data.branch_points, bits);
    let w: Vec<Complex> = data
        .branch_points
        .iter()
        .map(|e| Complex::with_val(bits, Complex::with_val(bits, e - &xp) / &dir))
        .collect();
    let n = w.len() as u32;
    let mut c = Complex::with_val(bits, rug::ops::Pow::pow(Complex::with_val(bits, dir.sqrt_ref()), n));
    let mut y0 = c.clone();
    for wk in &w {
        y0 *= Complex::with_val(bits, -wk).sqrt();
    }
    let plus = abs(&Complex::with_val(bits, &y0 - &yp));
    let minus = abs(&Complex::with_val(bits, &y0 + &yp));
    if plus > minus {
        c = -c;
    }

    let integrand = |u: &Float| -> Vec<Complex> {
        let two_pi = Float::with_val(bits, pi(bits) * 2u32);
        let s = Float::with_val(bits, u.sinh_ref());
        let r = Float::with_val(bits, &two_pi * &s).exp();
        let dr = Float::with_val(bits, &two_pi * Float::with_val(bits, u.cosh_ref())) * &r;
        let rc = Complex::with_val(bits, (&r, 0));
        let mut y = c.clone();
        for wk in &w {
            y *= Complex::with_val(bits, &rc - wk).sqrt();
        }
        let x = Complex::with_val(bits, &xp + Complex::with_val(bits, &rc * &dir));
        let mut factor = Complex::with_val(bits, &dir * &dr);
        factor /= y;
        let mut out = Vec::with_capacity(g);
        for _ in 0..g {
            out.push(factor.clone());
            factor *= &x;
        }
        out
    };

    let raw = double_exponential(integrand, g, data)?;
    let nm = &data.normalization_matrix;
    let z = (0..g)
        .map(|j| {
            let mut s = Complex::new(bits);
            for (m, v) in raw.iter().enumerate() {
                s -= Complex::with_val(bits, v * &nm[m][j]);
            }
            s
        })
        .collect();
    Ok(JacobianPoint { z })
}

fn best_direction(xp: &Complex, roots: &[Complex], bits: u32) -> Complex {
    let (px, py) = (xp.real().to_f64(), xp.imag().to_f64());
    let mut best = (f64::NEG_INFINITY, 0u32);
    for k in 0..DIRECTIONS {
        let th = 2.0 * std::f64::consts::PI * k as f64 / DIRECTIONS as f64;
        let (dc, ds) = (th.cos(), th.sin());
        let mut clearance = f64::INFINITY;
        for e in roots {
            let (ex, ey) = (e.real().to_f64() - px, e.imag().to_f64() - py);
            let dist = ex.hypot(ey);
            if dist < 1e-12 {
                continue;
            }
            // coordinates of e − p in the rotated frame
            let along = ex * dc + ey * ds;
            let across = -ex * ds + ey * dc;
            let m = if along > 0.0 { across.abs() } else { dist };
            clearance = clearance.min(m);
        }
        if clearance > best.0 {
            best = (clearance, k);
        }
    }
    let two_pi = Float::with_val(bits, pi(bits) * 2u32);
    let th = two_pi * best.1 / DIRECTIONS;
    Complex::with_val(bits, (0, th)).exp()
}

/// `∫_{−∞}^{∞} F(u) du` for a double-exponentially decaying vector integrand,
/// by the trapezoidal rule with step halving.
fn double_exponential<F>(f: F, g: usize, data: &PeriodData) -> Result<Vec<Complex>>
where
    F: Fn(&Float) -> Vec<Complex>,
{
    let bits = data.bits();
    let prec = data.precision;
    let target = prec.ten_to_minus((prec.digits + prec.guard / 2) as i32);
    // beyond |u| = U the integrand is below 10^{-(digits+guard)} relative
    let decay = (prec.working_digits() as f64 + 5.0) * std::f64::consts::LN_10 / std::f64::consts::PI;
    let u_max = decay.asinh() + 1.0;

    let mut h = 0.5f64;
    let mut sum: Vec<Complex> = vec![Complex::new(bits); g];
    let add = |sum: &mut Vec<Complex>, u: f64| {
        let vals = f(&Float::with_val(bits, u));
        for (s, v) in sum.iter_mut().zip(vals) {
            *s += v;
        }
    };
    let steps = (u_max / h).ceil() as i64;
    for k in -steps..=steps {
        add(&mut sum, k as f64 * h);
    }
    let mut estimate: Vec<Complex> = sum.iter().map(|s| Complex::with_val(bits, s * h)).collect();
    for _ in 1..=MAX_LEVEL {
        h /= 2.0;
        let steps = (u_max / h).ceil() as i64;
        let mut k = -steps + if steps % 2 == 0 { 1 } else { 0 };
        while k <= steps {
            add(&mut sum, k as f64 * h);
            k += 2;
        }
        let next: Vec<Complex> = sum.iter().map(|s| Complex::with_val(bits, s * h)).collect();
        let mut diff = Float::new(bits);
        let mut size = Float::with_val(bits, 1);
        for (a, b) in estimate.iter().zip(&next) {
            let d = abs(&Complex::with_val(bits, a - b));
            if d > diff {
                diff = d;
            }
            size = size.max(&abs(b));
        }
        estimate = next;
        if diff < Float::with_val(bits, &target * &size) {
            return Ok(estimate);
        }
    }
    Err(Error::Numerical("Abel–Jacobi quadrature did not converge".into()))
}
