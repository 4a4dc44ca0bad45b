use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rug::{Integer, Rational};

/// Dense univariate polynomial over ℚ, lowest degree first.
///
/// The coefficient vector never ends in a zero, so the zero polynomial is the
/// empty vector and `coeffs().last()` is the leading coefficient.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct UniPoly {
    coeffs: Vec<Rational>,
}

impl UniPoly {
    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::from(1))
    }

    /// The polynomial `x`.
    pub fn x() -> Self {
        Self::from_coeffs(vec![Rational::new(), Rational::from(1)])
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// `x - r`
    pub fn linear_root(r: &Rational) -> Self {
        Self::from_coeffs(vec![Rational::from(-r), Rational::from(1)])
    }

    pub fn from_coeffs(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| *c == 0) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Self::from_coeffs(c.iter().map(|&v| Rational::from(v)).collect())
    }

    pub fn from_integers(c: &[Integer]) -> Self {
        Self::from_coeffs(c.iter().map(|v| Rational::from(v)).collect())
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Rational> {
        self.coeffs
    }

    /// Coefficient of `x^i`, zero beyond the degree.
    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == 1
    }

    /// Degree, with `-1` for the zero polynomial.
    pub fn degree(&self) -> isize {
        self.coeffs.len() as isize - 1
    }

    /// Degree as `usize`; zero for the zero polynomial.
    pub fn deg(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn lc(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(|c| *c == 1)
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let inv = Rational::from(1) / self.lc();
        self.scale(&inv)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|a| Rational::from(a * c)).collect())
    }

    /// Multiply by `x^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut c = vec![Rational::new(); k];
        c.extend(self.coeffs.iter().cloned());
        UniPoly { coeffs: c }
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::new();
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Self::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| Rational::from(c * i as u64))
                .collect(),
        )
    }

    /// `self(x + t)`
    pub fn translate(&self, t: &Rational) -> Self {
        let mut acc = UniPoly::zero();
        let lin = Self::from_coeffs(vec![t.clone(), Rational::from(1)]);
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * &lin) + &Self::constant(c.clone());
        }
        acc
    }

    /// `self(c·x)`
    pub fn scale_var(&self, c: &Rational) -> Self {
        let mut pw = Rational::from(1);
        let mut out = Vec::with_capacity(self.coeffs.len());
        for a in &self.coeffs {
            out.push(Rational::from(a * &pw));
            pw *= c;
        }
        Self::from_coeffs(out)
    }

    /// `x^deg · self(1/x)` for the given nominal degree `n ≥ deg`.
    pub fn reverse(&self, n: usize) -> Self {
        let mut c = vec![Rational::new(); n + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            c[n - i] = a.clone();
        }
        Self::from_coeffs(c)
    }

    pub fn div_rem(&self, d: &UniPoly) -> (UniPoly, UniPoly) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let dd = d.deg();
        if self.degree() < d.degree() {
            return (UniPoly::zero(), self.clone());
        }
        let inv = Rational::from(1) / d.lc();
        let mut r = self.coeffs.clone();
        let mut q = vec![Rational::new(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let t = Rational::from(&r[k + dd] * &inv);
            if t != 0 {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    r[k + j] -= Rational::from(&t * dc);
                }
            }
            q[k] = t;
        }
        r.truncate(dd);
        (UniPoly::from_coeffs(q), UniPoly::from_coeffs(r))
    }

    pub fn rem(&self, d: &UniPoly) -> UniPoly {
        self.div_rem(d).1
    }

    /// Exact quotient; panics in debug builds if the division leaves a remainder.
    pub fn exact_div(&self, d: &UniPoly) -> UniPoly {
        let (q, r) = self.div_rem(d);
        debug_assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    pub fn divides(&self, other: &UniPoly) -> bool {
        other.rem(self).is_zero()
    }

    /// Monic gcd; `gcd(0, 0) = 0`.
    pub fn gcd(a: &UniPoly, b: &UniPoly) -> UniPoly {
        let (mut r0, mut r1) = (a.clone(), b.clone());
        while !r1.is_zero() {
            let r = r0.rem(&r1);
            r0 = r1;
            r1 = r;
        }
        r0.monic()
    }

    /// Returns `(g, s, t)` with `s·a + t·b = g` and `g` monic.
    pub fn ext_gcd(a: &UniPoly, b: &UniPoly) -> (UniPoly, UniPoly, UniPoly) {
        let (mut r0, mut r1) = (a.clone(), b.clone());
        let (mut s0, mut s1) = (UniPoly::one(), UniPoly::zero());
        let (mut t0, mut t1) = (UniPoly::zero(), UniPoly::one());
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            let s = &s0 - &(&q * &s1);
            let t = &t0 - &(&q * &t1);
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
            t0 = t1;
            t1 = t;
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let inv = Rational::from(1) / r0.lc();
        (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
    }

    /// Inverse of `self` modulo `m`, if it exists.
    pub fn inv_mod(&self, m: &UniPoly) -> Option<UniPoly> {
        let (g, s, _) = UniPoly::ext_gcd(&self.rem(m), m);
        if g.is_one() {
            Some(s.rem(m))
        } else {
            None
        }
    }

    pub fn mul_mod(&self, other: &UniPoly, m: &UniPoly) -> UniPoly {
        (self * other).rem(m)
    }

    pub fn pow(&self, e: u32) -> UniPoly {
        let mut acc = UniPoly::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Square-free decomposition `self = lc · ∏ s_i^i` (Yun); entries `(s_i, i)`
    /// with `s_i` monic and nonconstant.
    pub fn squarefree_decomposition(&self) -> Vec<(UniPoly, u32)> {
        let mut out = Vec::new();
        if self.degree() < 1 {
            return out;
        }
        let f = self.monic();
        let df = f.derivative();
        let mut a = UniPoly::gcd(&f, &df);
        let mut b = f.exact_div(&a);
        let mut c = df.exact_div(&a).scale(&(Rational::from(1) / f.lc()));
        let mut d = &c - &b.derivative();
        let mut i = 1;
        loop {
            a = UniPoly::gcd(&b, &d);
            if a.degree() > 0 {
                out.push((a.clone(), i));
            }
            b = b.exact_div(&a);
            if b.degree() < 1 {
                break;
            }
            c = d.exact_div(&a);
            d = &c - &b.derivative();
            i += 1;
        }
        out
    }

    pub fn is_squarefree(&self) -> bool {
        self.degree() < 1 || UniPoly::gcd(self, &self.derivative()).degree() == 0
    }

    /// Write `self = c · P` with `P` a primitive integer polynomial and positive
    /// leading coefficient. Zero maps to `(0, [])`.
    pub fn primitive_part(&self) -> (Rational, Vec<Integer>) {
        if self.is_zero() {
            return (Rational::new(), Vec::new());
        }
        let mut den = Integer::from(1);
        for c in &self.coeffs {
            den.lcm_mut(c.denom());
        }
        let ints: Vec<Integer> = self
            .coeffs
            .iter()
            .map(|c| Integer::from(c.numer() * Integer::from(&den / c.denom())))
            .collect();
        let mut g = Integer::new();
        for v in &ints {
            g.gcd_mut(v);
        }
        if ints.last().unwrap().is_negative() {
            g = -g;
        }
        let prim = ints.iter().map(|v| Integer::from(v / &g)).collect();
        (Rational::from((g, den)), prim)
    }

    /// Integer polynomial `P` of [`primitive_part`](Self::primitive_part) as a `UniPoly`.
    pub fn primitive(&self) -> UniPoly {
        UniPoly::from_integers(&self.primitive_part().1)
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| *c.denom() == 1)
    }

    /// Least common multiple of the coefficient denominators.
    pub fn denominator(&self) -> Integer {
        let mut den = Integer::from(1);
        for c in &self.coeffs {
            den.lcm_mut(c.denom());
        }
        den
    }

    pub fn resultant(a: &UniPoly, b: &UniPoly) -> Rational {
        resultant(a, b)
    }

    pub fn discriminant(&self) -> Rational {
        let n = self.deg() as u64;
        let r = resultant(self, &self.derivative());
        let sign = if (n * (n.saturating_sub(1)) / 2) % 2 == 1 { -1 } else { 1 };
        r * Rational::from(sign) / self.lc()
    }
}

/// Sylvester resultant, computed by the Euclidean remainder sequence over ℚ.
///
/// Equals `lc(a)^deg(b) · ∏ b(α)` over the roots `α` of `a`. A zero argument
/// gives zero except that a nonzero constant `c` against the zero polynomial
/// is also zero.
pub fn resultant(a: &UniPoly, b: &UniPoly) -> Rational {
    if a.is_zero() || b.is_zero() {
        return Rational::new();
    }
    let mut a = a.clone();
    let mut b = b.clone();
    let mut acc = Rational::from(1);
    loop {
        let m = a.deg();
        let n = b.deg();
        if n == 0 {
            let c = b.lc();
            let mut p = Rational::from(1);
            for _ in 0..m {
                p *= &c;
            }
            return acc * p;
        }
        if m == 0 {
            let c = a.lc();
            let mut p = Rational::from(1);
            for _ in 0..n {
                p *= &c;
            }
            return acc * p;
        }
        if m < n {
            if (m * n) % 2 == 1 {
                acc = -acc;
            }
            std::mem::swap(&mut a, &mut b);
            continue;
        }
        let r = a.rem(&b);
        if r.is_zero() {
            return Rational::new();
        }
        // res(a, b) = (-1)^{mn} lc(b)^{m - deg r} res(b, r)
        if (m * n) % 2 == 1 {
            acc = -acc;
        }
        let lb = b.lc();
        for _ in 0..(m - r.deg()) {
            acc *= &lb;
        }
        a = b;
        b = r;
    }
}

impl fmt::Debug for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if *c == 0 {
                continue;
            }
            let neg = *c < 0;
            let abs = Rational::from(c.abs_ref());
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let show_coeff = i == 0 || abs != 1;
            if show_coeff {
                if *abs.denom() == 1 {
                    write!(f, "{}", abs.numer())?;
                } else {
                    write!(f, "({abs})")?;
                }
            }
            match i {
                0 => {}
                1 => write!(f, "{}x", if show_coeff { "*" } else { "" })?,
                _ => write!(f, "{}x^{i}", if show_coeff { "*" } else { "" })?,
            }
        }
        Ok(())
    }
}

impl Add for &UniPoly {
    type Output = UniPoly;
    fn add(self, o: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        let mut c = Vec::with_capacity(n);
        for i in 0..n {
            match (self.coeffs.get(i), o.coeffs.get(i)) {
                (Some(a), Some(b)) => c.push(Rational::from(a + b)),
                (Some(a), None) => c.push(a.clone()),
                (None, Some(b)) => c.push(b.clone()),
                (None, None) => unreachable!(),
            }
        }
        UniPoly::from_coeffs(c)
    }
}

impl Sub for &UniPoly {
    type Output = UniPoly;
    fn sub(self, o: &UniPoly) -> UniPoly {
        self + &(-o)
    }
}

impl Neg for &UniPoly {
    type Output = UniPoly;
    fn neg(self) -> UniPoly {
        UniPoly {
            coeffs: self.coeffs.iter().map(|c| Rational::from(-c)).collect(),
        }
    }
}

impl Mul for &UniPoly {
    type Output = UniPoly;
    fn mul(self, o: &UniPoly) -> UniPoly {
        if self.is_zero() || o.is_zero() {
            return UniPoly::zero();
        }
        let mut c = vec![Rational::new(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == 0 {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                c[i + j] += Rational::from(a * b);
            }
        }
        UniPoly::from_coeffs(c)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for UniPoly {
            type Output = UniPoly;
            fn $m(self, o: UniPoly) -> UniPoly {
                (&self).$m(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for UniPoly {
    type Output = UniPoly;
    fn neg(self) -> UniPoly {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> UniPoly {
        UniPoly::from_ints(c)
    }

    #[test]
    fn resultant_small_cases() {
        assert_eq!(resultant(&p(&[-1, 1]), &p(&[1, 1])), 2);
        assert_eq!(resultant(&p(&[-1, 1]), &p(&[-2, 1])), -1);
        assert_eq!(resultant(&p(&[-1, 1]), &p(&[-6])), -6);
        assert_eq!(resultant(&p(&[-1, 0, 1]), &p(&[-1, 1])), 0);
    }

    #[test]
    fn division_roundtrip() {
        let a = p(&[3, -2, 0, 5, 1]);
        let b = p(&[1, 0, 2]);
        let (q, r) = a.div_rem(&b);
        assert_eq!(&(&q * &b) + &r, a);
        assert!(r.degree() < b.degree());
    }

    #[test]
    fn squarefree_parts() {
        // (x-1)^2 (x+2)^3 x
        let f = &(&p(&[-1, 1]).pow(2) * &p(&[2, 1]).pow(3)) * &p(&[0, 1]);
        let sq = f.squarefree_decomposition();
        assert_eq!(sq, vec![(p(&[0, 1]), 1), (p(&[-1, 1]), 2), (p(&[2, 1]), 3)]);
    }

    #[test]
    fn discriminant_of_quadratic() {
        assert_eq!(p(&[1, 3, 2]).discriminant(), 1);
        assert_eq!(p(&[-2, 0, 1]).discriminant(), 8);
    }

    #[test]
    fn translate_and_reverse() {
        let f = p(&[1, 2, 3]);
        assert_eq!(f.translate(&Rational::from(1)), p(&[6, 8, 3]));
        assert_eq!(f.reverse(2), p(&[3, 2, 1]));
    }
}
