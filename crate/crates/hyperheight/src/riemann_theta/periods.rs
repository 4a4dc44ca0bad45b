use nalgebra::DMatrix;
use rug::{Complex, Float};

use super::linalg::{complex_inverse, mat_mul, real_inverse};
use super::roots::polynomial_roots;
use super::{abs, pi, rational_to_complex, Precision};
use crate::curve_mumford::HyperellipticCurve;
use crate::error::{Error, Result};

const MAX_NODES: usize = 1 << 16;

/// Periods of `y² = f(x)` in a symplectic basis built from the chain of
/// branch points sorted by real part.
#[derive(Clone, Debug)]
pub struct PeriodData {
    pub genus: usize,
    /// The `2g + 1` finite branch points; `∞` is the last, implicit one.
    pub branch_points: Vec<Complex>,
    /// Each cycle as a signed sum of loops around consecutive branch points.
    pub homology_paths: Vec<String>,
    /// `Ω_{ij} = ∫_{B_i} ω_j`.
    pub period_matrix: Vec<Vec<Complex>>,
    /// `∫_{A_i} x^m dx / y`.
    pub a_periods: Vec<Vec<Complex>>,
    /// `N` with `ω_j = Σ_m N_{mj} x^m dx / y`, so `∫_{A_i} ω_j = δ_{ij}`.
    pub normalization_matrix: Vec<Vec<Complex>>,
    /// `Δ = Ω·δ′ + δ″`.
    pub riemann_constant: Vec<Complex>,
    /// `(Im Ω)^{-1}`.
    pub im_inverse: Vec<Vec<Float>>,
    /// `max |Ω_ij − Ω_ji|`.
    pub symmetry_defect: Float,
    /// Smallest eigenvalue of `Im Ω`.
    pub min_eigenvalue: f64,
    /// Coefficients of `f`, constant first.
    pub f: Vec<Complex>,
    pub precision: Precision,
}

impl PeriodData {
    pub fn bits(&self) -> u32 {
        self.precision.bits()
    }

    /// `Im Ω` at working precision.
    pub fn im_omega(&self) -> Vec<Vec<Float>> {
        self.period_matrix
            .iter()
            .map(|r| r.iter().map(|v| v.imag().clone()).collect())
            .collect()
    }

    /// `Im Ω` as an `f64` matrix.
    pub fn im_omega_f64(&self) -> DMatrix<f64> {
        let g = self.genus;
        DMatrix::from_fn(g, g, |i, j| self.period_matrix[i][j].imag().to_f64())
    }
}

struct Segments<'a> {
    roots: &'a [Complex],
    bits: u32,
}

impl Segments<'_> {
    /// `y` along the segment `e_j → e_{j+1}` parametrised by `t ∈ [−1, 1]`,
    /// without the factor `√(1 − t²)`.
    fn y_reduced(&self, j: usize, t: &Complex) -> Complex {
        let bits = self.bits;
        let (a, b) = (&self.roots[j], &self.roots[j + 1]);
        let half = Complex::with_val(bits, b - a) / 2u32;
        let h = half.clone().sqrt();
        let n = self.roots.len() as u32;
        let mut v = Complex::with_val(bits, rug::ops::Pow::pow(&h, n));
        v *= Complex::with_val(bits, (0, 1));
        let mid = Complex::with_val(bits, a + b);
        for (k, e) in self.roots.iter().enumerate() {
            if k == j || k == j + 1 {
                continue;
            }
            let u = Complex::with_val(bits, Complex::with_val(bits, e * 2u32) - &mid) / &half / 2u32;
            // keep the factor continuous on [−1, 1]
            let factor = if u.real().is_sign_positive() {
                Complex::with_val(bits, &u - t).sqrt() * Complex::with_val(bits, (0, 1))
            } else {
                Complex::with_val(bits, t - &u).sqrt()
            };
            v *= factor;
        }
        v
    }

    /// `∫ x^m dx / y` along the segment for `m < g`, with `nodes` Chebyshev nodes.
    fn integrals(&self, j: usize, g: usize, nodes: usize) -> Vec<Complex> {
        let bits = self.bits;
        let (a, b) = (&self.roots[j], &self.roots[j + 1]);
        let half = Complex::with_val(bits, b - a) / 2u32;
        let mid = Complex::with_val(bits, a + b) / 2u32;
        let pi = pi(bits);
        let mut acc = vec![Complex::new(bits); g];
        for k in 1..=nodes {
            let angle = Float::with_val(bits, &pi * (2 * k - 1) as u32) / (2 * nodes) as u32;
            let t = Complex::with_val(bits, (angle.cos(), 0));
            let x = Complex::with_val(bits, &mid + Complex::with_val(bits, &half * &t));
            let w = Complex::with_val(bits, &half / self.y_reduced(j, &t));
            let mut xm = Complex::with_val(bits, 1);
            for slot in acc.iter_mut() {
                *slot += Complex::with_val(bits, &xm * &w);
                xm *= &x;
            }
        }
        let scale = pi / nodes as u32;
        acc.into_iter().map(|v| v * &scale).collect()
    }

    fn converged_integrals(&self, j: usize, g: usize, tol: &Float) -> Result<Vec<Complex>> {
        let mut nodes = 32;
        let mut prev = self.integrals(j, g, nodes);
        while nodes < MAX_NODES {
            nodes *= 2;
            let next = self.integrals(j, g, nodes);
            let diff = prev
                .iter()
                .zip(&next)
                .map(|(p, q)| abs(&Complex::with_val(self.bits, p - q)))
                .fold(Float::new(self.bits), |m, d| if d > m { d } else { m });
            if diff < *tol {
                return Ok(next);
            }
            prev = next;
        }
        Err(Error::Numerical(format!(
            "period quadrature on segment {j} did not converge with {MAX_NODES} nodes"
        )))
    }
}

/// Branch points, symplectic basis and normalized period matrix.
pub fn homology_and_periods(curve: &HyperellipticCurve, prec: Precision) -> Result<PeriodData> {
    let bits = prec.bits();
    let g = curve.genus();
    let roots = polynomial_roots(curve.f().coeffs(), bits);
    let f: Vec<Complex> = curve.f().coeffs().iter().map(|c| rational_to_complex(c, bits)).collect();

    let sep = prec.ten_to_minus((prec.digits / 2) as i32);
    for i in 0..roots.len() {
        for j in 0..i {
            if abs(&Complex::with_val(bits, &roots[i] - &roots[j])) < sep {
                return Err(Error::Numerical(format!(
                    "branch points {i} and {j} are closer than 1e-{}; the curve is ill-conditioned at this precision",
                    prec.digits / 2
                )));
            }
        }
    }

    let segs = Segments { roots: &roots, bits };
    let tol = prec.ten_to_minus((prec.digits + prec.guard / 2) as i32);
    let n = 2 * g;
    let raw: Vec<Vec<Complex>> = (0..n)
        .map(|j| segs.converged_integrals(j, g, &tol))
        .collect::<Result<_>>()?;

    // orient consecutive loops so that c_j · c_{j+1} = +1
    let mut eps = vec![1i32; n];
    for j in 0..n.saturating_sub(1) {
        let e = &roots[j + 1];
        let mut fp = Complex::with_val(bits, 1);
        for (k, r) in roots.iter().enumerate() {
            if k != j + 1 {
                fp *= Complex::with_val(bits, e - r);
            }
        }
        let w0 = fp.sqrt();
        let one = Complex::with_val(bits, (1, 0));
        let end = segs.y_reduced(j, &one);
        let start = segs.y_reduced(j + 1, &Complex::with_val(bits, (-1, 0)));
        let phi1 = Complex::with_val(bits, &end / &w0).arg().real().to_f64();
        let psi2 = Complex::with_val(bits, &start / &w0).arg().real().to_f64();
        let inter = -(psi2 - phi1).sin().signum() as i32;
        eps[j + 1] = eps[j] * inter;
    }
    let cycles: Vec<Vec<Complex>> = raw
        .iter()
        .zip(&eps)
        .map(|(row, &s)| row.iter().map(|v| Complex::with_val(bits, v * (2 * s))).collect())
        .collect();

    let mut a = vec![vec![Complex::new(bits); g]; g];
    let mut b = vec![vec![Complex::new(bits); g]; g];
    let mut paths = Vec::with_capacity(2 * g);
    for i in 0..g {
        for m in 0..g {
            a[i][m] = cycles[2 * i][m].clone();
            for k in i..g {
                b[i][m] += &cycles[2 * k + 1][m];
            }
        }
        paths.push(format!("A_{} = {}loop(e{}, e{})", i + 1, sign(eps[2 * i]), 2 * i, 2 * i + 1));
    }
    for i in 0..g {
        let terms: Vec<String> = (i..g)
            .map(|k| format!("{}loop(e{}, e{})", sign(eps[2 * k + 1]), 2 * k + 1, 2 * k + 2))
            .collect();
        paths.push(format!("B_{} = {}", i + 1, terms.join(" + ")));
    }
    let ainv = complex_inverse(&a).ok_or_else(|| Error::Numerical("A-period matrix is singular".into()))?;
    let omega = mat_mul(&b, &ainv);

    let mut defect = Float::new(bits);
    for i in 0..g {
        for j in 0..g {
            let d = abs(&Complex::with_val(bits, &omega[i][j] - &omega[j][i]));
            if d > defect {
                defect = d;
            }
        }
    }
    let y: Vec<Vec<Float>> = omega.iter().map(|r| r.iter().map(|v| v.imag().clone()).collect()).collect();
    let y64 = DMatrix::from_fn(g, g, |i, j| y[i][j].to_f64());
    let sym = (&y64 + y64.transpose()) * 0.5;
    let min_eigenvalue = sym.symmetric_eigenvalues().min();
    if min_eigenvalue <= 0.0 {
        return Err(Error::Numerical(format!(
            "Im Ω is not positive definite (smallest eigenvalue {min_eigenvalue:e})"
        )));
    }
    let im_inverse = real_inverse(&y).ok_or_else(|| Error::Numerical("Im Ω is singular".into()))?;

    let riemann_constant = (0..g)
        .map(|i| {
            let mut s = Complex::new(bits);
            for j in 0..g {
                s += &omega[i][j];
            }
            s /= 2u32;
            s + Float::with_val(bits, (g - i) as f64 / 2.0)
        })
        .collect();

    Ok(PeriodData {
        genus: g,
        branch_points: roots,
        homology_paths: paths,
        period_matrix: omega,
        a_periods: a,
        normalization_matrix: ainv,
        riemann_constant,
        im_inverse,
        symmetry_defect: defect,
        min_eigenvalue,
        f,
        precision: prec,
    })
}

fn sign(s: i32) -> &'static str {
    if s < 0 {
        "-"
    } else {
        ""
    }
}
