//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

use hyperheight::curve_mumford::{HyperellipticCurve, MumfordDivisor};
use rug::ops::Pow;
use rug::{Complex, Float, Integer, Rational};

pub const BITS: u32 = 256;

pub fn curve(c: &[i64]) -> HyperellipticCurve {
    HyperellipticCurve::from_ints(c).expect("valid curve")
}

pub fn divisor(c: &HyperellipticCurve, pts: &[(i64, i64)]) -> MumfordDivisor {
    let pts: Vec<(Rational, Rational)> = pts.iter().map(|&(x, y)| (Rational::from(x), Rational::from(y))).collect();
    MumfordDivisor::from_points(&pts, c).expect("points on the curve")
}

/// `x^{2g+1} + Σ c_i x^i` from the low coefficients `c_0, c_1, …`.
pub fn family(g: usize, low: &[i64]) -> HyperellipticCurve {
    let mut c = vec![0i64; 2 * g + 2];
    c[..low.len()].copy_from_slice(low);
    c[2 * g + 1] = 1;
    curve(&c)
}

/// A point on `y² = x³ + a2 x² + a4 x + a6`; `None` is the identity.
pub type EcPoint = Option<(Rational, Rational)>;

/// Canonical height on an elliptic curve by local decomposition: a multiple
/// with everywhere nonsingular reduction, the denominator of its `x`, and
/// Tate's series at the real place. Normalized so that `ĥ ≈ ½ h(x)`.
pub struct EllipticOracle {
    pub a2: Integer,
    pub a4: Integer,
    pub a6: Integer,
}

impl EllipticOracle {
    pub fn new(a2: i64, a4: i64, a6: i64) -> Self {
        EllipticOracle { a2: a2.into(), a4: a4.into(), a6: a6.into() }
    }

    pub fn contains(&self, p: &(Rational, Rational)) -> bool {
        let (x, y) = p;
        let rhs = Rational::from(x * x) * x + Rational::from(x * x) * &self.a2 + Rational::from(x * &self.a4) + &self.a6;
        Rational::from(y * y) == rhs
    }

    pub fn add(&self, p: &EcPoint, q: &EcPoint) -> EcPoint {
        let (Some((x1, y1)), Some((x2, y2))) = (p, q) else {
            return p.clone().or_else(|| q.clone());
        };
        let m = if x1 == x2 {
            if Rational::from(y1 + y2) == 0 {
                return None;
            }
            let num = Rational::from(x1 * x1) * 3u32 + Rational::from(x1 * &self.a2) * 2u32 + &self.a4;
            num / Rational::from(y1 * 2u32)
        } else {
            Rational::from(y2 - y1) / Rational::from(x2 - x1)
        };
        let x3 = Rational::from(&m * &m) - &self.a2 - x1 - x2;
        let y3 = -(Rational::from(&m * Rational::from(&x3 - x1)) + y1);
        Some((x3, y3))
    }

    pub fn mul(&self, p: &EcPoint, n: u32) -> EcPoint {
        let mut acc = None;
        for _ in 0..n {
            acc = self.add(&acc, p);
        }
        acc
    }

    fn discriminant(&self) -> Integer {
        let (b, c, d) = (&self.a2, &self.a4, &self.a6);
        let t1 = Integer::from(b * b) * c * c;
        let t2 = Integer::from(c * c) * c * 4u32;
        let t3 = Integer::from(b * b) * b * d * 4u32;
        let t4 = Integer::from(d * d) * 27u32;
        let t5 = Integer::from(b * c) * d * 18u32;
        (t1 - t2 - t3 - t4 + t5) * 16u32
    }

    fn bad_primes(&self) -> Vec<u32> {
        let mut n = self.discriminant().abs();
        let mut out = Vec::new();
        let mut p = 2u32;
        while n > 1 {
            assert!(p < 10_000_000, "oracle expects a smooth discriminant");
            if n.is_divisible_u(p) {
                out.push(p);
                while n.is_divisible_u(p) {
                    n /= p;
                }
            }
            p += 1;
        }
        out
    }

    fn reduces_nonsingular(&self, p: &EcPoint, prime: u32) -> bool {
        let Some((x, y)) = p else { return true };
        let pr = Integer::from(prime);
        let v = |q: &Rational| -> i64 {
            if *q == 0 {
                return i64::MAX;
            }
            let mut e = 0i64;
            let (mut n, mut d) = (q.numer().clone(), q.denom().clone());
            while n.is_divisible(&pr) {
                n /= &pr;
                e += 1;
            }
            while d.is_divisible(&pr) {
                d /= &pr;
                e -= 1;
            }
            e
        };
        if v(x) < 0 {
            return true;
        }
        let fy = Rational::from(y * 2u32);
        let fx = Rational::from(x * x) * 3u32 + Rational::from(x * &self.a2) * 2u32 + &self.a4;
        !(v(&fy) > 0 && v(&fx) > 0)
    }

    fn smallest_real_root(&self) -> f64 {
        let f = |x: f64| x * x * x + self.a2.to_f64() * x * x + self.a4.to_f64() * x + self.a6.to_f64();
        let bound = 1.0 + self.a2.to_f64().abs() + self.a4.to_f64().abs() + self.a6.to_f64().abs();
        let mut x = -bound;
        let step = bound / 4096.0;
        while f(x) < 0.0 {
            x += step;
        }
        let (mut a, mut b) = (x - step, x);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if f(m) < 0.0 {
                a = m;
            } else {
                b = m;
            }
        }
        b
    }

    /// `½ log|x| + ⅛ Σ 4^{−n} log|z(2ⁿ P)|` on the model shifted so that real
    /// points have `x > 1`.
    fn archimedean(&self, p: &(Rational, Rational)) -> Float {
        let r = Integer::from((self.smallest_real_root().floor() as i64) - 2);
        let a2 = Integer::from(&self.a2 + Integer::from(&r * 3u32));
        let a4 = Integer::from(&r * &r) * 3u32 + Integer::from(&self.a2 * &r) * 2u32 + &self.a4;
        let a6 = Integer::from(&r * &r) * &r + Integer::from(&r * &r) * &self.a2 + Integer::from(&self.a4 * &r) + &self.a6;
        let f = |v: Integer| Float::with_val(BITS, v);
        let b2 = f(a2.clone() * 4u32);
        let b4 = f(a4.clone() * 2u32);
        let b6 = f(a6.clone() * 4u32);
        let b8 = f(Integer::from(&a2 * &a6) * 4u32 - Integer::from(&a4 * &a4));
        let x = Float::with_val(BITS, Rational::from(&p.0 - &r));
        let mut t = Float::with_val(BITS, 1) / &x;
        let mut mu = Float::new(BITS);
        let mut scale = Float::with_val(BITS, 1);
        for _ in 0..80 {
            let t2 = Float::with_val(BITS, &t * &t);
            let t3 = Float::with_val(BITS, &t2 * &t);
            let t4 = Float::with_val(BITS, &t3 * &t);
            let w = Float::with_val(BITS, &t * 4u32) + &b2 * t2.clone() + Float::with_val(BITS, &b4 * &t3) * 2u32 + &b6 * t4.clone();
            let z = Float::with_val(BITS, 1) - &b4 * t2 - Float::with_val(BITS, &b6 * &t3) * 2u32 - &b8 * t4;
            mu += Float::with_val(BITS, z.abs_ref()).ln() * &scale;
            scale /= 4u32;
            t = w / z;
        }
        Float::with_val(BITS, x.abs_ref()).ln() / 2u32 + mu / 8u32
    }

    pub fn height(&self, p: &(Rational, Rational)) -> Float {
        assert!(self.contains(p));
        let bad = self.bad_primes();
        let base = Some(p.clone());
        let mut m = 1u32;
        let q = loop {
            let q = self.mul(&base, m);
            if bad.iter().all(|&l| self.reduces_nonsingular(&q, l)) {
                break q;
            }
            m += 1;
            assert!(m < 200, "no multiple with nonsingular reduction");
        };
        let Some(q) = q else { return Float::new(BITS) };
        let den = Float::with_val(BITS, q.0.denom()).ln() / 2u32;
        (self.archimedean(&q) + den) / (m * m)
    }
}

/// `τ` of `y² = (x − e1)(x − e2)(x − e3)`, `e1 > e2 > e3` real, by the
/// arithmetic–geometric mean, reduced to the fundamental domain.
pub fn agm_tau(e1: i64, e2: i64, e3: i64) -> Complex {
    let s = |v: i64| Float::with_val(BITS, v).sqrt();
    let a1 = s(e1 - e3).agm(&s(e1 - e2));
    let a2 = s(e1 - e3).agm(&s(e2 - e3));
    reduce_tau(Complex::with_val(BITS, (Float::new(BITS), a1 / a2)))
}

/// Representative of `τ` modulo `SL₂(ℤ)` in the standard fundamental domain.
pub fn reduce_tau(mut t: Complex) -> Complex {
    for _ in 0..100 {
        let shift = Float::with_val(BITS, t.real().round_ref());
        t -= shift;
        let norm = Float::with_val(BITS, t.norm_ref());
        if norm < Float::with_val(BITS, 1) - Float::with_val(BITS, 1e-60) {
            t = Complex::with_val(BITS, -1) / t;
        } else {
            break;
        }
    }
    t
}

/// `Σ_n exp(πi n² τ + 2πi n z)`, summed until terms fall below `2^{−BITS}`.
pub fn theta_series(z: &Complex, tau: &Complex) -> Complex {
    let pi = Float::with_val(BITS, rug::float::Constant::Pi);
    let i = Complex::with_val(BITS, (0, 1));
    let mut sum = Complex::with_val(BITS, 1);
    let eps = Float::with_val(BITS, 2).pow(-(BITS as i32) - 10);
    for n in 1..10_000i64 {
        let mut done = true;
        for k in [n, -n] {
            let e = Complex::with_val(BITS, tau * (k * k)) + Complex::with_val(BITS, z * (2 * k));
            let term = (Complex::with_val(BITS, &i * &pi) * e).exp();
            if Float::with_val(BITS, term.abs_ref()) > eps {
                done = false;
            }
            sum += term;
        }
        if done {
            break;
        }
    }
    sum
}

pub fn abs(z: &Complex) -> Float {
    Float::with_val(z.prec().0, z.abs_ref())
}

pub fn close(a: &Float, b: f64, tol: f64) -> bool {
    Float::with_val(a.prec(), a - b).abs() < tol
}
