use nalgebra::DMatrix;
use rug::{Complex, Float};

use super::linalg::real_inverse;
use super::{pi, PeriodData, Precision};
use crate::error::{Error, Result};

/// Enumeration cap; beyond this many lattice points the period matrix is too
/// badly conditioned for direct summation.
const MAX_TERMS: usize = 20_000_000;

/// `Ω` with the derived data needed to sum `θ(z; Ω)`.
#[derive(Clone, Debug)]
pub struct ThetaContext {
    pub omega: Vec<Vec<Complex>>,
    y_inv: Vec<Vec<Float>>,
    /// Upper-triangular `R` with `Im Ω = RᵀR`.
    chol: DMatrix<f64>,
    y64: DMatrix<f64>,
    prec: Precision,
}

/// `θ(z)` in factored form: `log |θ(z)|`, the phase-carrying value, and the
/// size of the reduced sum relative to its largest term.
#[derive(Clone, Debug)]
pub struct ThetaValue {
    pub log_abs: Float,
    /// `log_{10}` of `|Σ| / max |term|` for the reduced argument.
    pub log10_relative: f64,
}

impl ThetaContext {
    pub fn new(omega: Vec<Vec<Complex>>, prec: Precision) -> Result<Self> {
        let g = omega.len();
        if g == 0 || omega.iter().any(|r| r.len() != g) {
            return Err(Error::invalid("Ω must be a nonempty square matrix"));
        }
        let bits = prec.bits();
        let omega: Vec<Vec<Complex>> =
            omega.into_iter().map(|r| r.into_iter().map(|v| Complex::with_val(bits, v)).collect()).collect();
        let y: Vec<Vec<Float>> = omega.iter().map(|r| r.iter().map(|v| v.imag().clone()).collect()).collect();
        let y64 = DMatrix::from_fn(g, g, |i, j| (y[i][j].to_f64() + y[j][i].to_f64()) / 2.0);
        let chol = y64
            .clone()
            .cholesky()
            .ok_or_else(|| Error::invalid("Im Ω is not positive definite"))?
            .l()
            .transpose();
        let y_inv = real_inverse(&y).ok_or_else(|| Error::invalid("Im Ω is singular"))?;
        Ok(ThetaContext { omega, y_inv, chol, y64, prec })
    }

    pub fn from_periods(data: &PeriodData) -> Result<Self> {
        Self::new(data.period_matrix.clone(), data.precision)
    }

    pub fn genus(&self) -> usize {
        self.omega.len()
    }

    pub fn precision(&self) -> Precision {
        self.prec
    }

    pub fn im_inverse(&self) -> &[Vec<Float>] {
        &self.y_inv
    }

    fn bits(&self) -> u32 {
        self.prec.bits()
    }

    /// Split `z = z'' + m0 + Ω·n0` with `Y⁻¹ Im z''` and `Re z''` in `[−½, ½]^g`.
    fn reduce(&self, z: &[Complex]) -> (Vec<Complex>, Vec<i64>, Vec<Complex>) {
        let g = self.genus();
        let bits = self.bits();
        let n0: Vec<i64> = (0..g)
            .map(|i| {
                let mut c = Float::new(bits);
                for j in 0..g {
                    c += Float::with_val(bits, &self.y_inv[i][j] * z[j].imag());
                }
                c.round().to_f64() as i64
            })
            .collect();
        let zp: Vec<Complex> = (0..g)
            .map(|i| {
                let mut v = z[i].clone();
                for j in 0..g {
                    if n0[j] != 0 {
                        v -= Complex::with_val(bits, &self.omega[i][j] * n0[j]);
                    }
                }
                v
            })
            .collect();
        let zpp = zp
            .iter()
            .map(|v| {
                let m = Float::with_val(bits, v.real().round_ref());
                Complex::with_val(bits, v - m)
            })
            .collect();
        (zp, n0, zpp)
    }

    /// `−πi n0Ωn0 − 2πi n0·z'`, the exponent relating `θ(z)` to `θ(z')`.
    fn shift_exponent(&self, n0: &[i64], zp: &[Complex]) -> Complex {
        let g = self.genus();
        let bits = self.bits();
        let mut quad = Complex::new(bits);
        let mut lin = Complex::new(bits);
        for i in 0..g {
            if n0[i] == 0 {
                continue;
            }
            lin += Complex::with_val(bits, &zp[i] * n0[i]);
            for j in 0..g {
                if n0[j] != 0 {
                    quad += Complex::with_val(bits, &self.omega[i][j] * (n0[i] * n0[j]));
                }
            }
        }
        let s = quad + lin * 2u32;
        let i_pi = Complex::with_val(bits, (0, pi(bits)));
        -(s * i_pi)
    }

    /// Sum of the series at a reduced argument, with the largest term's log-modulus.
    fn reduced_sum(&self, z: &[Complex]) -> Result<(Complex, f64)> {
        let g = self.genus();
        let bits = self.bits();
        // c = Y⁻¹ Im z, so that |term(n)| = exp(−π(n+c)ᵀY(n+c) + π cᵀYc)
        let c: Vec<f64> = (0..g)
            .map(|i| {
                let mut s = Float::new(bits);
                for j in 0..g {
                    s += Float::with_val(bits, &self.y_inv[i][j] * z[j].imag());
                }
                s.to_f64()
            })
            .collect();
        let cv = nalgebra::DVector::from_vec(c.clone());
        let cyc = (cv.transpose() * &self.y64 * &cv)[(0, 0)];
        let budget = (self.prec.working_digits() as f64 + 2.0) * std::f64::consts::LN_10
            + 2.0 * g as f64
            + 3.0;
        let bound = budget / std::f64::consts::PI + cyc;
        let rows = enumerate_ellipsoid(&self.chol, &c, bound * (1.0 + 1e-12) + 1e-9)?;

        let pi_f = pi(bits);
        let i_pi = Complex::with_val(bits, (0, &pi_f));
        let step_q = Complex::with_val(bits, &i_pi * &self.omega[0][0]) * 2u32;
        let step_q = step_q.exp();
        let mut total = Complex::new(bits);
        let mut best = f64::NEG_INFINITY;
        for Row { tail, lo, hi, used, s0 } in rows {
            let mut n: Vec<i64> = Vec::with_capacity(g);
            n.push(lo);
            n.extend_from_slice(&tail);
            // Ωn, nΩn and n·z at the first point of the row
            let mut omega_n = vec![Complex::new(bits); g];
            for i in 0..g {
                for j in 0..g {
                    if n[j] != 0 {
                        omega_n[i] += Complex::with_val(bits, &self.omega[i][j] * n[j]);
                    }
                }
            }
            let mut expo = Complex::new(bits);
            for i in 0..g {
                if n[i] != 0 {
                    expo += Complex::with_val(bits, &omega_n[i] * n[i]);
                    expo += Complex::with_val(bits, &z[i] * (2 * n[i]));
                }
            }
            let mut term = Complex::with_val(bits, &expo * &i_pi).exp();
            // term(n + e_0) / term(n) = exp(πi(2(Ωn)_0 + Ω_00 + 2 z_0))
            let mut ratio_exp = Complex::with_val(bits, &omega_n[0] * 2u32);
            ratio_exp += &self.omega[0][0];
            ratio_exp += Complex::with_val(bits, &z[0] * 2u32);
            let mut ratio = Complex::with_val(bits, &ratio_exp * &i_pi).exp();
            for k in lo..=hi {
                total += &term;
                if k < hi {
                    term *= &ratio;
                    ratio *= &step_q;
                }
            }
            // the largest term of the row sits at the n_0 closest to the centre
            let d = self.chol[(0, 0)];
            let k = ((-s0 / d - c[0]).round() as i64).clamp(lo, hi);
            let t = d * (k as f64 + c[0]) + s0;
            best = best.max(std::f64::consts::PI * (cyc - used - t * t));
        }
        Ok((total, best))
    }

    /// `θ(z; Ω)`.
    pub fn value(&self, z: &[Complex]) -> Result<Complex> {
        self.check_len(z)?;
        let (zp, n0, zpp) = self.reduce(z);
        let (s, _) = self.reduced_sum(&zpp)?;
        Ok(s * self.shift_exponent(&n0, &zp).exp())
    }

    /// `log |θ(z; Ω)|` with the relative size of the reduced sum.
    pub fn log_abs(&self, z: &[Complex]) -> Result<ThetaValue> {
        self.check_len(z)?;
        let bits = self.bits();
        let (zp, n0, zpp) = self.reduce(z);
        let (s, best) = self.reduced_sum(&zpp)?;
        let modulus = Float::with_val(bits, s.abs_ref());
        if modulus.is_zero() {
            return Ok(ThetaValue { log_abs: Float::with_val(bits, f64::NEG_INFINITY), log10_relative: f64::NEG_INFINITY });
        }
        let log_s = modulus.ln();
        let rel = (log_s.to_f64() - best) / std::f64::consts::LN_10;
        let shift = self.shift_exponent(&n0, &zp);
        Ok(ThetaValue { log_abs: log_s + shift.real(), log10_relative: rel })
    }

    fn check_len(&self, z: &[Complex]) -> Result<()> {
        if z.len() != self.genus() {
            return Err(Error::invalid(format!("z has length {}, expected {}", z.len(), self.genus())));
        }
        Ok(())
    }
}

/// A run of consecutive `n_0` with the other coordinates fixed; `used` is the
/// contribution of coordinates `1..g` to the quadratic form and `s0` the
/// off-diagonal part of the first coordinate of `R(n + c)`.
struct Row {
    tail: Vec<i64>,
    lo: i64,
    hi: i64,
    used: f64,
    s0: f64,
}

/// Integer vectors `n` with `(n + c)ᵀ RᵀR (n + c) ≤ bound`, grouped into rows.
fn enumerate_ellipsoid(r: &DMatrix<f64>, c: &[f64], bound: f64) -> Result<Vec<Row>> {
    let g = c.len();
    let mut rows = Vec::new();
    let mut tail = vec![0i64; g];
    let mut count = 0usize;
    recurse(r, c, bound, g - 1, 0.0, &mut tail, &mut rows, &mut count)?;
    Ok(rows)
}

#[allow(clippy::too_many_arguments)]
fn recurse(
    r: &DMatrix<f64>,
    c: &[f64],
    bound: f64,
    level: usize,
    used: f64,
    n: &mut [i64],
    rows: &mut Vec<Row>,
    count: &mut usize,
) -> Result<()> {
    let g = c.len();
    // (Rv)_level = R_ll v_l + Σ_{j>l} R_lj v_j,  v = n + c
    let mut s = 0.0;
    for j in level + 1..g {
        s += r[(level, j)] * (n[j] as f64 + c[j]);
    }
    let rem = bound - used;
    if rem < 0.0 {
        return Ok(());
    }
    let rad = rem.sqrt();
    let d = r[(level, level)];
    let lo = ((-rad - s) / d - c[level]).ceil() as i64;
    let hi = ((rad - s) / d - c[level]).floor() as i64;
    if lo > hi {
        return Ok(());
    }
    if level == 0 {
        *count += (hi - lo + 1) as usize;
        if *count > MAX_TERMS {
            return Err(Error::Numerical(format!(
                "theta series needs more than {MAX_TERMS} terms; Im Ω is too badly conditioned"
            )));
        }
        rows.push(Row { tail: n[1..].to_vec(), lo, hi, used, s0: s });
        return Ok(());
    }
    for k in lo..=hi {
        n[level] = k;
        let t = d * (k as f64 + c[level]) + s;
        recurse(r, c, bound, level - 1, used + t * t, n, rows, count)?;
    }
    n[level] = 0;
    Ok(())
}

/// `θ(z; Ω)` for the period matrix of a curve.
pub fn theta(z: &[Complex], data: &PeriodData) -> Result<Complex> {
    ThetaContext::from_periods(data)?.value(z)
}

/// `θ(z; Ω)` for an arbitrary `Ω` with positive definite imaginary part.
pub fn theta_value(z: &[Complex], omega: &[Vec<Complex>], prec: Precision) -> Result<Complex> {
    ThetaContext::new(omega.to_vec(), prec)?.value(z)
}

/// `log |θ(z; Ω)|` with the near-zero diagnostic.
pub fn log_abs_theta(z: &[Complex], ctx: &ThetaContext) -> Result<ThetaValue> {
    ctx.log_abs(z)
}
