//! Polynomials over a prime field 𝔽_p, with `p` of any size.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::integer::Order;
use rug::{Integer, Rational};

use super::factor::ipow;
use super::poly::UniPoly;
use crate::error::{Error, Result};

/// Polynomial over 𝔽_p; coefficients in `[0, p)`, lowest first, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FpPoly {
    pub c: Vec<Integer>,
}

/// Reduce a p-integral rational modulo `p`; `None` if `p` divides the denominator.
pub fn reduce_rational(x: &Rational, p: &Integer) -> Option<Integer> {
    let d = Integer::from(x.denom() % p);
    let inv = d.invert(p).ok()?;
    let mut v = Integer::from(x.numer() * inv);
    v %= p;
    if v < 0 {
        v += p;
    }
    Some(v)
}

impl FpPoly {
    pub fn zero() -> Self {
        FpPoly { c: Vec::new() }
    }

    pub fn one() -> Self {
        FpPoly { c: vec![Integer::from(1)] }
    }

    pub fn x() -> Self {
        FpPoly { c: vec![Integer::new(), Integer::from(1)] }
    }

    fn trimmed(mut c: Vec<Integer>) -> Self {
        while c.last().is_some_and(|v| *v == 0) {
            c.pop();
        }
        FpPoly { c }
    }

    pub fn from_ints(c: &[Integer], p: &Integer) -> Self {
        Self::trimmed(
            c.iter()
                .map(|v| {
                    let mut r = Integer::from(v % p);
                    if r < 0 {
                        r += p;
                    }
                    r
                })
                .collect(),
        )
    }

    /// Reduction of a p-integral polynomial; `None` if some denominator is divisible by `p`.
    pub fn reduce(f: &UniPoly, p: &Integer) -> Option<Self> {
        let mut c = Vec::with_capacity(f.coeffs().len());
        for a in f.coeffs() {
            c.push(reduce_rational(a, p)?);
        }
        Some(Self::trimmed(c))
    }

    /// Lift with coefficients in `[0, p)`.
    pub fn lift(&self) -> UniPoly {
        UniPoly::from_integers(&self.c)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> isize {
        self.c.len() as isize - 1
    }

    pub fn deg(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    pub fn lc(&self) -> Integer {
        self.c.last().cloned().unwrap_or_default()
    }

    pub fn is_one(&self) -> bool {
        self.c.len() == 1 && self.c[0] == 1
    }

    pub fn monic(&self, p: &Integer) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let inv = self.lc().invert(p).expect("nonzero leading coefficient is invertible");
        self.scale(&inv, p)
    }

    pub fn scale(&self, s: &Integer, p: &Integer) -> Self {
        Self::trimmed(self.c.iter().map(|v| Integer::from(v * s) % p).collect())
    }

    pub fn add(&self, o: &Self, p: &Integer) -> Self {
        let n = self.c.len().max(o.c.len());
        let mut c = Vec::with_capacity(n);
        for i in 0..n {
            let mut v = Integer::new();
            if let Some(a) = self.c.get(i) {
                v += a;
            }
            if let Some(b) = o.c.get(i) {
                v += b;
            }
            if v >= *p {
                v -= p;
            }
            c.push(v);
        }
        Self::trimmed(c)
    }

    pub fn sub(&self, o: &Self, p: &Integer) -> Self {
        self.add(&o.neg(p), p)
    }

    pub fn neg(&self, p: &Integer) -> Self {
        Self::trimmed(
            self.c
                .iter()
                .map(|v| if *v == 0 { Integer::new() } else { Integer::from(p - v) })
                .collect(),
        )
    }

    pub fn mul(&self, o: &Self, p: &Integer) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut c = vec![Integer::new(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if *a == 0 {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                c[i + j] += Integer::from(a * b);
            }
        }
        for v in c.iter_mut() {
            *v %= p;
        }
        Self::trimmed(c)
    }

    pub fn div_rem(&self, d: &Self, p: &Integer) -> (Self, Self) {
        assert!(!d.is_zero(), "division by zero polynomial mod p");
        if self.degree() < d.degree() {
            return (Self::zero(), self.clone());
        }
        let dd = d.deg();
        let inv = d.lc().invert(p).expect("invertible leading coefficient");
        let mut r = self.c.clone();
        let mut q = vec![Integer::new(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let t = Integer::from(&r[k + dd] * &inv) % p;
            if t != 0 {
                for (j, dc) in d.c.iter().enumerate() {
                    r[k + j] -= Integer::from(&t * dc);
                    r[k + j] %= p;
                    if r[k + j] < 0 {
                        r[k + j] += p;
                    }
                }
            }
            q[k] = t;
        }
        r.truncate(dd);
        (Self::trimmed(q), Self::trimmed(r))
    }

    pub fn rem(&self, d: &Self, p: &Integer) -> Self {
        self.div_rem(d, p).1
    }

    pub fn gcd(a: &Self, b: &Self, p: &Integer) -> Self {
        let (mut r0, mut r1) = (a.clone(), b.clone());
        while !r1.is_zero() {
            let r = r0.rem(&r1, p);
            r0 = r1;
            r1 = r;
        }
        r0.monic(p)
    }

    /// `(g, s, t)` with `s·a + t·b = g`, `g` monic.
    pub fn ext_gcd(a: &Self, b: &Self, p: &Integer) -> (Self, Self, Self) {
        let (mut r0, mut r1) = (a.clone(), b.clone());
        let (mut s0, mut s1) = (Self::one(), Self::zero());
        let (mut t0, mut t1) = (Self::zero(), Self::one());
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1, p);
            let s = s0.sub(&q.mul(&s1, p), p);
            let t = t0.sub(&q.mul(&t1, p), p);
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
        let inv = r0.lc().invert(p).unwrap();
        (r0.scale(&inv, p), s0.scale(&inv, p), t0.scale(&inv, p))
    }

    pub fn derivative(&self, p: &Integer) -> Self {
        Self::trimmed(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, v)| Integer::from(v * i as u64) % p)
                .collect(),
        )
    }

    pub fn pow_mod(&self, e: &Integer, m: &Self, p: &Integer) -> Self {
        let mut result = Self::one().rem(m, p);
        let base = self.rem(m, p);
        let digits = e.to_digits::<u8>(Order::MsfBe);
        for byte in digits {
            for bit in (0..8).rev() {
                result = result.mul(&result, p).rem(m, p);
                if (byte >> bit) & 1 == 1 {
                    result = result.mul(&base, p).rem(m, p);
                }
            }
        }
        result
    }

    pub fn eval(&self, x: &Integer, p: &Integer) -> Integer {
        let mut acc = Integer::new();
        for c in self.c.iter().rev() {
            acc *= x;
            acc += c;
            acc %= p;
        }
        acc
    }
}

/// Square-free factorization over 𝔽_p of a monic polynomial.
fn squarefree_fp(f: &FpPoly, p: &Integer) -> Vec<(FpPoly, u32)> {
    let mut out = Vec::new();
    if f.degree() < 1 {
        return out;
    }
    let df = f.derivative(p);
    let mut c = FpPoly::gcd(f, &df, p);
    let mut w = f.div_rem(&c, p).0;
    let mut i = 1u32;
    while !w.is_one() && w.degree() > 0 {
        let y = FpPoly::gcd(&w, &c, p);
        let fac = w.div_rem(&y, p).0;
        if fac.degree() > 0 {
            out.push((fac.monic(p), i));
        }
        w = y;
        c = c.div_rem(&w, p).0;
        i += 1;
    }
    if c.degree() > 0 {
        // c is a p-th power; on 𝔽_p the Frobenius fixes coefficients
        let pu = p.to_usize().expect("p-th root only arises for small p");
        let root = FpPoly::trimmed(c.c.iter().step_by(pu).cloned().collect());
        for (g, e) in squarefree_fp(&root.monic(p), p) {
            out.push((g, e * pu as u32));
        }
    }
    out
}

/// Distinct-degree factorization of a monic square-free polynomial.
fn distinct_degree(f: &FpPoly, p: &Integer) -> Vec<(FpPoly, usize)> {
    let mut out = Vec::new();
    let mut rest = f.clone();
    let x = FpPoly::x();
    let mut h = x.rem(&rest, p);
    let mut d = 0;
    while rest.degree() >= 2 * (d as isize + 1) {
        d += 1;
        h = h.pow_mod(p, &rest, p);
        let g = FpPoly::gcd(&h.sub(&x, p), &rest, p);
        if g.degree() > 0 {
            out.push((g.clone(), d));
            rest = rest.div_rem(&g, p).0;
            h = h.rem(&rest, p);
        }
    }
    if rest.degree() > 0 {
        let dd = rest.deg();
        out.push((rest, dd));
    }
    out
}

/// Equal-degree splitting (Cantor–Zassenhaus) of a product of degree-`d` irreducibles.
fn equal_degree(f: &FpPoly, d: usize, p: &Integer, rng: &mut ChaCha8Rng) -> Vec<FpPoly> {
    if f.deg() == d {
        return vec![f.clone()];
    }
    let n = f.deg();
    loop {
        let mut a = FpPoly::trimmed(
            (0..n)
                .map(|_| {
                    let mut v = Integer::from(rng.gen::<u64>());
                    v %= p;
                    v
                })
                .collect(),
        );
        if a.degree() < 1 {
            continue;
        }
        a = a.rem(f, p);
        let b = if *p == 2 {
            // trace map 𝔽_{2^d} → 𝔽_2
            let mut t = a.clone();
            let mut acc = a.clone();
            for _ in 1..d {
                t = t.mul(&t, p).rem(f, p);
                acc = acc.add(&t, p);
            }
            acc
        } else {
            let e = (ipow(p, d as u32) - 1u32) / 2u32;
            a.pow_mod(&e, f, p).sub(&FpPoly::one(), p)
        };
        let g = FpPoly::gcd(&b, f, p);
        if g.degree() > 0 && g.deg() < n {
            let h = f.div_rem(&g, p).0.monic(p);
            let mut out = equal_degree(&g, d, p, rng);
            out.extend(equal_degree(&h, d, p, rng));
            return out;
        }
    }
}

/// Factor a nonzero polynomial over 𝔽_p into monic irreducibles with multiplicities.
/// Returns `(leading coefficient, factors)` with factors sorted by degree then coefficients.
pub fn factor_fp(f: &FpPoly, p: &Integer) -> (Integer, Vec<(FpPoly, u32)>) {
    let lc = f.lc();
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_f00d);
    for (s, e) in squarefree_fp(&f.monic(p), p) {
        for (g, d) in distinct_degree(&s, p) {
            for h in equal_degree(&g, d, p, &mut rng) {
                out.push((h, e));
            }
        }
    }
    out.sort_by(|a, b| a.0.c.len().cmp(&b.0.c.len()).then_with(|| a.0.c.iter().rev().cmp(b.0.c.iter().rev())));
    (lc, out)
}

/// Factor the reduction of `f` modulo `prime` into monic irreducible factors.
///
/// The leading coefficient of `f` must survive the reduction; a degree drop is
/// reported as an error rather than silently factoring a lower-degree polynomial.
pub fn factor_mod_p(f: &UniPoly, prime: &Integer) -> Result<Vec<(UniPoly, u32)>> {
    let r = FpPoly::reduce(f, prime).ok_or_else(|| {
        Error::invalid(format!("polynomial {f} is not {prime}-integral"))
    })?;
    if r.is_zero() {
        return Err(Error::invalid(format!("polynomial {f} vanishes mod {prime}")));
    }
    if r.deg() != f.deg() {
        return Err(Error::invalid(format!(
            "leading coefficient vanishes mod {prime}: degree drops from {} to {}",
            f.deg(),
            r.deg()
        )));
    }
    Ok(factor_fp(&r, prime).1.into_iter().map(|(g, e)| (g.lift(), e)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fac(c: &[i64], p: u32) -> Vec<(UniPoly, u32)> {
        factor_mod_p(&UniPoly::from_ints(c), &Integer::from(p)).unwrap()
    }

    #[test]
    fn small_examples() {
        assert_eq!(
            fac(&[1, 0, 1], 5),
            vec![(UniPoly::from_ints(&[2, 1]), 1), (UniPoly::from_ints(&[3, 1]), 1)]
        );
        assert_eq!(fac(&[1, 0, 1], 3), vec![(UniPoly::from_ints(&[1, 0, 1]), 1)]);
        assert_eq!(fac(&[0, 0, 1], 7), vec![(UniPoly::x(), 2)]);
    }

    #[test]
    fn degree_drop_is_reported() {
        let e = factor_mod_p(&UniPoly::from_ints(&[1, 1, 3]), &Integer::from(3)).unwrap_err();
        assert!(e.to_string().contains("degree drops"));
    }

    #[test]
    fn characteristic_two_powers() {
        // (x^2 + x + 1)^2 (x + 1)^3 over F_2
        let p = Integer::from(2);
        let a = FpPoly::from_ints(&[1.into(), 1.into(), 1.into()], &p);
        let b = FpPoly::from_ints(&[1.into(), 1.into()], &p);
        let f = a.mul(&a, &p).mul(&b, &p).mul(&b, &p).mul(&b, &p);
        let (_, fs) = factor_fp(&f, &p);
        assert_eq!(fs, vec![(b, 3), (a, 2)]);
    }

    #[test]
    fn large_prime_split() {
        let p = Integer::from_str_radix("340282366920938463463374607431768211507", 10).unwrap();
        // (x - 5)(x + 7)(x^2 - 3)
        let f = UniPoly::from_ints(&[-5, 1])
            * UniPoly::from_ints(&[7, 1])
            * UniPoly::from_ints(&[-3, 0, 1]);
        let fs = factor_mod_p(&f, &p).unwrap();
        let prod = fs.iter().fold(FpPoly::one(), |acc, (g, e)| {
            let mut acc = acc;
            for _ in 0..*e {
                acc = acc.mul(&FpPoly::reduce(g, &p).unwrap(), &p);
            }
            acc
        });
        assert_eq!(prod, FpPoly::reduce(&f, &p).unwrap());
    }
}
