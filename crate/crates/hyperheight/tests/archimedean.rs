mod common;

use common::{abs, agm_tau, curve, reduce_tau, theta_series};
use hyperheight::riemann_theta::{abel_jacobi, homology_and_periods, theta_value, CurvePoint, PeriodData, Precision};
use rug::{Complex, Float};

fn periods(c: &[i64], digits: u32) -> PeriodData {
    homology_and_periods(&curve(c), Precision::new(digits).unwrap()).unwrap()
}

fn genus3(digits: u32) -> PeriodData {
    periods(&[25, -13, 11, -15, 0, 0, 0, 1], digits)
}

#[test]
fn lemniscatic_period_is_i() {
    let data = periods(&[0, -1, 0, 1], 40);
    let bits = data.bits();
    let oracle = agm_tau(1, 0, -1);
    let i = Complex::with_val(bits, (0, 1));
    assert!(abs(&Complex::with_val(bits, &oracle - &i)) < 1e-60);
    assert!(abs(&Complex::with_val(bits, &data.period_matrix[0][0] - &i)) < 1e-30);
}

#[test]
fn elliptic_period_matches_agm() {
    // y² = (x − 2)(x − 1)(x + 3)
    let data = periods(&[6, -7, 0, 1], 40);
    let tau = reduce_tau(Complex::with_val(common::BITS, &data.period_matrix[0][0]));
    let oracle = agm_tau(2, 1, -3);
    assert!(abs(&Complex::with_val(common::BITS, &tau - &oracle)) < 1e-30);
}

#[test]
fn theta_at_i_matches_series() {
    let prec = Precision::new(40).unwrap();
    let b = prec.bits();
    let tau = Complex::with_val(b, (0, 1));
    for z in [Complex::new(b), Complex::with_val(b, (0.25, 0.1)), Complex::with_val(b, (-0.4, 0.3))] {
        let v = theta_value(&[z.clone()], &[vec![tau.clone()]], prec).unwrap();
        let w = theta_series(&Complex::with_val(common::BITS, &z), &Complex::with_val(common::BITS, &tau));
        assert!(abs(&Complex::with_val(common::BITS, &v - &w)) < 1e-30);
    }
}

/// `θ(z + e_j) = θ(z)` and `θ(z + Ω e_j) = exp(−πi Ω_jj − 2πi z_j) θ(z)`.
#[test]
fn quasi_periodicity() {
    let data = genus3(40);
    let prec = data.precision;
    let bits = data.bits();
    let g = data.genus;
    let omega = &data.period_matrix;
    let pi = Float::with_val(bits, rug::float::Constant::Pi);
    let i = Complex::with_val(bits, (0, 1));
    let z: Vec<Complex> = (0..g).map(|k| Complex::with_val(bits, (0.1 * k as f64 - 0.2, 0.05 * k as f64 + 0.1))).collect();
    let base = theta_value(&z, omega, prec).unwrap();
    let scale = abs(&base);
    for j in 0..g {
        let mut zr = z.clone();
        zr[j] += 1u32;
        let d = Complex::with_val(bits, &theta_value(&zr, omega, prec).unwrap() - &base);
        assert!(abs(&d) / &scale < 1e-35, "real period {j}");

        let zq: Vec<Complex> = (0..g).map(|k| Complex::with_val(bits, &z[k] + &omega[k][j])).collect();
        let arg = Complex::with_val(bits, &omega[j][j] + Complex::with_val(bits, &z[j] * 2u32));
        let ipi = Complex::with_val(bits, &i * &pi);
        let factor = Complex::with_val(bits, -(ipi * arg)).exp();
        let expected = Complex::with_val(bits, &factor * &base);
        let got = theta_value(&zq, omega, prec).unwrap();
        let d = Complex::with_val(bits, &got - &expected);
        assert!(abs(&d) / abs(&expected) < 1e-35, "lattice period {j}");
    }
}

#[test]
fn period_matrices_are_riemann_matrices() {
    for c in [
        vec![25, -13, 11, -15, 0, 0, 0, 1],
        vec![11, -10, 2, 1],
        vec![11, -10, 2, 0, 0, 1],
        vec![1, -4, 6, 0, 0, 0, 0, 1],
        vec![1, 1, 0, 0, 0, 1],
        vec![-2, 0, 3, -1, 0, 1],
    ] {
        let data = periods(&c, 30);
        assert!(data.symmetry_defect < 1e-25, "{c:?}");
        assert!(data.min_eigenvalue > 0.0, "{c:?}");
    }
}

#[test]
fn recomputation_at_higher_precision_agrees() {
    let lo = genus3(30);
    let hi = genus3(40);
    for (r1, r2) in lo.period_matrix.iter().zip(&hi.period_matrix) {
        for (a, b) in r1.iter().zip(r2) {
            assert!(abs(&Complex::with_val(hi.bits(), a - b)) < 1e-30);
        }
    }
}

#[test]
fn abel_jacobi_is_odd_under_the_involution() {
    let data = genus3(30);
    let bits = data.bits();
    let p = CurvePoint::affine(Complex::with_val(bits, 1), Complex::with_val(bits, 3));
    let a = abel_jacobi(&p, &data).unwrap();
    let b = abel_jacobi(&p.involution(), &data).unwrap();
    let s: Vec<Complex> = a.z.iter().zip(&b.z).map(|(x, y)| Complex::with_val(bits, x + y)).collect();
    // the sum lies in ℤ^g + Ωℤ^g: solve with Im Ω and check integrality
    let g = data.genus;
    let mut n = vec![Float::new(bits); g];
    for i in 0..g {
        for j in 0..g {
            n[i] += Float::with_val(bits, &data.im_inverse[i][j] * s[j].imag());
        }
    }
    for v in &n {
        let frac = Float::with_val(bits, v - Float::with_val(bits, v.round_ref())).abs();
        assert!(frac < 1e-25);
    }
    let mut re = s.iter().map(|c| c.real().clone()).collect::<Vec<_>>();
    for (k, r) in re.iter_mut().enumerate() {
        for (j, m) in n.iter().enumerate() {
            *r -= Float::with_val(bits, data.period_matrix[k][j].real() * Float::with_val(bits, m.round_ref()));
        }
        let frac = Float::with_val(bits, &*r - Float::with_val(bits, r.round_ref())).abs();
        assert!(frac < 1e-25);
    }
}
