use rug::{Complex, Float, Rational};

use super::{eval_complex_poly, pi};

/// All complex roots of a square-free rational polynomial, by Aberth–Ehrlich
/// iteration at `bits` of precision. Roots are sorted by real part, then by
/// imaginary part.
pub fn polynomial_roots(coeffs: &[Rational], bits: u32) -> Vec<Complex> {
    let n = coeffs.len() - 1;
    let lc = coeffs[n].clone();
    let c: Vec<Complex> = coeffs
        .iter()
        .map(|a| Complex::with_val(bits, (Float::with_val(bits, &Rational::from(a / &lc)), 0)))
        .collect();
    let dc: Vec<Complex> = (1..=n).map(|i| Complex::with_val(bits, &c[i] * i as u32)).collect();

    let radius = 1.0
        + c[..n]
            .iter()
            .map(|a| Float::with_val(53, a.abs_ref()).to_f64())
            .fold(0.0, f64::max);
    let two_pi = Float::with_val(bits, pi(bits) * 2u32);
    let mut z: Vec<Complex> = (0..n)
        .map(|k| {
            let angle = Float::with_val(bits, &two_pi * k as u32) / n as u32 + 0.4f64;
            let unit = Complex::with_val(bits, (0, angle)).exp();
            unit * radius
        })
        .collect();

    let tol = Float::with_val(bits, Float::i_exp(1, -(bits as i32) + 12));
    let mut settled = 0;
    for _ in 0..2000 {
        let mut worst = Float::new(bits);
        for k in 0..n {
            let p = eval_complex_poly(&c, &z[k]);
            let dp = eval_complex_poly(&dc, &z[k]);
            if p.is_zero() {
                continue;
            }
            let ratio = Complex::with_val(bits, &p / &dp);
            let mut s = Complex::new(bits);
            for j in 0..n {
                if j != k {
                    let d = Complex::with_val(bits, &z[k] - &z[j]);
                    s += Complex::with_val(bits, d.recip_ref());
                }
            }
            let denom = Complex::with_val(bits, 1) - Complex::with_val(bits, &ratio * &s);
            let w = ratio / denom;
            let scale = Float::with_val(bits, z[k].abs_ref()) + 1u32;
            let rel = Float::with_val(bits, w.abs_ref()) / scale;
            if rel > worst {
                worst = rel;
            }
            z[k] -= w;
        }
        if worst < tol {
            settled += 1;
            if settled >= 2 {
                break;
            }
        }
    }
    sort_points(&mut z);
    z
}

/// Order by real part, treating real parts within `10^{-(prec/2)}` as equal,
/// then by imaginary part.
pub(crate) fn sort_points(z: &mut [Complex]) {
    let bits = z.first().map_or(64, |v| v.prec().0);
    let eps = Float::with_val(bits, Float::i_exp(1, -(bits as i32) / 2));
    z.sort_by(|a, b| {
        let d = Float::with_val(bits, a.real() - b.real());
        if Float::with_val(bits, d.abs_ref()) < eps {
            a.imag().partial_cmp(b.imag()).unwrap()
        } else {
            a.real().partial_cmp(b.real()).unwrap()
        }
    });
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_roots() {
        let c: Vec<Rational> = [0, -1, 0, 1].iter().map(|&v| Rational::from(v)).collect();
        let r = polynomial_roots(&c, 200);
        let want = [-1.0, 0.0, 1.0];
        for (z, w) in r.iter().zip(want) {
            let d = Complex::with_val(200, z - w);
            assert!(Float::with_val(200, d.abs_ref()) < 1e-50);
        }
    }

    #[test]
    fn septic_residuals() {
        let c: Vec<Rational> = [25, -13, 11, -15, 0, 0, 0, 1].iter().map(|&v| Rational::from(v)).collect();
        let cc: Vec<Complex> = c.iter().map(|a| Complex::with_val(200, (Float::with_val(200, a), 0))).collect();
        for z in polynomial_roots(&c, 200) {
            let v = eval_complex_poly(&cc, &z);
            assert!(Float::with_val(200, v.abs_ref()) < 1e-50);
        }
    }
}
