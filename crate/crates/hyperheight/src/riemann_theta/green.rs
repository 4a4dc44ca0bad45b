use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::{Complex, Float, Rational};

use super::theta::ThetaContext;
use super::{abel_jacobi, eval_complex_poly, pi, CurvePoint, JacobianPoint, PeriodData};
use crate::error::{Error, Result};

/// Attempts with fresh auxiliary points before giving up.
pub const MAX_RESAMPLES: u32 = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ArchimedeanOptions {
    pub seed: u64,
}

impl Default for ArchimedeanOptions {
    fn default() -> Self {
        ArchimedeanOptions { seed: 0 }
    }
}

fn sum_points(points: &[JacobianPoint], g: usize, bits: u32) -> Vec<Complex> {
    let mut s = vec![Complex::new(bits); g];
    for p in points {
        for (a, b) in s.iter_mut().zip(&p.z) {
            *a += b;
        }
    }
    s
}

/// `4π (Y⁻¹ Im u) · Im v`.
fn linear_term(ctx: &ThetaContext, u: &[Complex], v: &[Complex]) -> Float {
    let g = u.len();
    let bits = ctx.precision().bits();
    let yi = ctx.im_inverse();
    let mut s = Float::new(bits);
    for i in 0..g {
        let mut w = Float::new(bits);
        for j in 0..g {
            w += Float::with_val(bits, &yi[i][j] * u[j].imag());
        }
        s += w * v[i].imag();
    }
    s * pi(bits) * 4u32
}

fn near_zero_check(v: &super::ThetaValue, digits: u32) -> Result<()> {
    if v.log10_relative < -(digits as f64) / 2.0 {
        return Err(Error::ThetaNearZero { log10_relative: v.log10_relative });
    }
    Ok(())
}

/// `Σ_p c_p · g_{D1−D0}(p)` with
/// `g(p) = 2 log |θ(α(p)+Δ−α(D1)) / θ(α(p)+Δ−α(D0))| + 4π (Y⁻¹ Im(α(D1)−α(D0)))·Im α(p)`.
pub fn green_pairing(
    d1: &[CurvePoint],
    d0: &[CurvePoint],
    eval: &[(CurvePoint, Rational)],
    data: &PeriodData,
) -> Result<Float> {
    let g = data.genus;
    if d1.len() != g || d0.len() != g {
        return Err(Error::invalid(format!("D1 and D0 must each have {g} points")));
    }
    let total: Rational = eval.iter().map(|(_, c)| c.clone()).sum();
    if total != 0 {
        return Err(Error::invalid("evaluation divisor must have degree 0"));
    }
    let ctx = ThetaContext::from_periods(data)?;
    let bits = data.bits();
    let aj = |ps: &[CurvePoint]| -> Result<Vec<JacobianPoint>> { ps.iter().map(|p| abel_jacobi(p, data)).collect() };
    let a1 = sum_points(&aj(d1)?, g, bits);
    let a0 = sum_points(&aj(d0)?, g, bits);
    let diff: Vec<Complex> = a1.iter().zip(&a0).map(|(x, y)| Complex::with_val(bits, x - y)).collect();
    let mut out = Float::new(bits);
    for (p, c) in eval {
        let ap = abel_jacobi(p, data)?;
        let arg = |a: &[Complex]| -> Vec<Complex> {
            (0..g)
                .map(|i| {
                    let mut v = Complex::with_val(bits, &ap.z[i] + &data.riemann_constant[i]);
                    v -= &a[i];
                    v
                })
                .collect()
        };
        let t1 = ctx.log_abs(&arg(&a1))?;
        let t0 = ctx.log_abs(&arg(&a0))?;
        near_zero_check(&t1, data.precision.digits)?;
        near_zero_check(&t0, data.precision.digits)?;
        let val = Float::with_val(bits, &t1.log_abs - &t0.log_abs) * 2u32 + linear_term(&ctx, &diff, &ap.z);
        out += val * Float::with_val(bits, c);
    }
    Ok(out)
}

/// `g_E(P)` for each evaluation point, `E = Σ e_Q Q` of degree zero, with the
/// auxiliary effective divisor `B` of degree `g − 1` given by its Abel–Jacobi sum.
///
/// Writing `E = Σ e_Q (Q − R)` and `D1 = Q + B`, `D0 = R + B`, the reference
/// point `R` cancels, leaving one theta value per point of `E`.
pub fn green_at_points(
    eval: &[JacobianPoint],
    e: &[(JacobianPoint, Rational)],
    aux_sum: &[Complex],
    data: &PeriodData,
    ctx: &ThetaContext,
) -> Result<Vec<Float>> {
    let g = data.genus;
    let bits = data.bits();
    let mut out = Vec::with_capacity(eval.len());
    for ap in eval {
        let mut acc = Float::new(bits);
        for (aq, coef) in e {
            let z: Vec<Complex> = (0..g)
                .map(|i| {
                    let mut v = Complex::with_val(bits, &ap.z[i] + &data.riemann_constant[i]);
                    v -= &aq.z[i];
                    v -= &aux_sum[i];
                    v
                })
                .collect();
            let t = ctx.log_abs(&z)?;
            near_zero_check(&t, data.precision.digits)?;
            let val = t.log_abs * 2u32 + linear_term(ctx, &aq.z, &ap.z);
            acc += val * Float::with_val(bits, coef);
        }
        out.push(acc);
    }
    Ok(out)
}

/// Random auxiliary points `(x, √f(x))` with `x` in the square `[−2, 2]²`.
fn auxiliary_points(n: usize, data: &PeriodData, rng: &mut ChaCha8Rng) -> Vec<CurvePoint> {
    let bits = data.bits();
    (0..n)
        .map(|_| {
            let re: f64 = rng.gen_range(-2.0..2.0);
            let im: f64 = rng.gen_range(-2.0..2.0);
            let x = Complex::with_val(bits, (re, im));
            let y = eval_complex_poly(&data.f, &x).sqrt();
            CurvePoint::affine(x, y)
        })
        .collect()
}

/// `½ Σ_P d_P g_E(P)` for degree-zero divisors `D` and `E` with disjoint
/// supports; `B` is resampled when a theta value comes too close to zero.
pub fn archimedean_pairing(
    d: &[(CurvePoint, Rational)],
    e: &[(CurvePoint, Rational)],
    data: &PeriodData,
    options: ArchimedeanOptions,
) -> Result<Float> {
    let g = data.genus;
    let bits = data.bits();
    for side in [d, e] {
        if side.iter().map(|(_, c)| c.clone()).sum::<Rational>() != 0 {
            return Err(Error::invalid("archimedean pairing needs degree-zero divisors"));
        }
    }
    let ctx = ThetaContext::from_periods(data)?;
    let ad: Vec<JacobianPoint> = d.iter().map(|(p, _)| abel_jacobi(p, data)).collect::<Result<_>>()?;
    let ae: Vec<(JacobianPoint, Rational)> =
        e.iter().map(|(p, c)| Ok((abel_jacobi(p, data)?, c.clone()))).collect::<Result<_>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut last = None;
    for _ in 0..MAX_RESAMPLES {
        let aux = auxiliary_points(g.saturating_sub(1), data, &mut rng);
        let aux_aj: Vec<JacobianPoint> = aux.iter().map(|p| abel_jacobi(p, data)).collect::<Result<_>>()?;
        let sb = sum_points(&aux_aj, g, bits);
        match green_at_points(&ad, &ae, &sb, data, &ctx) {
            Ok(vals) => {
                let mut total = Float::new(bits);
                for (v, (_, c)) in vals.into_iter().zip(d) {
                    total += v * Float::with_val(bits, c);
                }
                return Ok(total / 2u32);
            }
            Err(err @ Error::ThetaNearZero { .. }) => last = Some(err),
            Err(other) => return Err(other),
        }
    }
    Err(Error::Numerical(format!(
        "theta stayed near zero for {MAX_RESAMPLES} choices of auxiliary points ({})",
        last.map(|e| e.to_string()).unwrap_or_default()
    )))
}
