//! Odd-degree hyperelliptic curves `y² = f(x)` over ℚ, Mumford divisors with
//! Cantor arithmetic, and the auxiliary divisor `E` paired against `D`.

use std::fmt;

use rug::{Integer, Rational};

use crate::error::{Error, Result};
use crate::exact_algebra::UniPoly;

/// `y² = f(x)` with `f` monic, integral, square-free, of odd degree `2g + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HyperellipticCurve {
    f: UniPoly,
    genus: usize,
    discriminant: Integer,
}

/// Build a curve from integer coefficients, constant term first.
pub fn make_curve(coefficients: &[Integer]) -> Result<HyperellipticCurve> {
    HyperellipticCurve::new(UniPoly::from_integers(coefficients))
}

impl HyperellipticCurve {
    pub fn new(f: UniPoly) -> Result<Self> {
        if f.degree() < 3 {
            return Err(Error::invalid(format!("f = {f} must have odd degree at least 3")));
        }
        if f.deg() % 2 == 0 {
            return Err(Error::invalid(format!(
                "f has even degree {}; only odd-degree models are supported",
                f.deg()
            )));
        }
        if !f.is_monic() {
            return Err(Error::invalid(format!("f = {f} is not monic")));
        }
        if !f.is_integral() {
            return Err(Error::invalid(format!("f = {f} has non-integer coefficients")));
        }
        if !f.is_squarefree() {
            return Err(Error::invalid(format!("f = {f} is not square-free")));
        }
        let disc = f.discriminant();
        debug_assert_eq!(*disc.denom(), 1);
        Ok(HyperellipticCurve {
            genus: (f.deg() - 1) / 2,
            discriminant: disc.numer().clone(),
            f,
        })
    }

    pub fn from_ints(c: &[i64]) -> Result<Self> {
        Self::new(UniPoly::from_ints(c))
    }

    pub fn f(&self) -> &UniPoly {
        &self.f
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    /// Discriminant of `f`.
    pub fn discriminant(&self) -> &Integer {
        &self.discriminant
    }

    pub fn contains(&self, x: &Rational, y: &Rational) -> bool {
        Rational::from(y * y) == self.f.eval(x)
    }

    /// Compact identifier, e.g. `y^2 = x^7 - 15*x^3 + ...`.
    pub fn id(&self) -> String {
        format!("y^2 = {}", self.f)
    }
}

impl fmt::Display for HyperellipticCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.id())
    }
}

/// `D = D′ − d·∞` in Mumford form: `D′ = {a(x) = 0, y = b(x)}`, `d = deg a`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MumfordDivisor {
    a: UniPoly,
    b: UniPoly,
}

impl MumfordDivisor {
    pub fn identity() -> Self {
        MumfordDivisor { a: UniPoly::one(), b: UniPoly::zero() }
    }

    /// Validate `a` monic, `deg b < deg a`, `a | b² − f`. Divisors of degree
    /// above the genus are accepted and reduced.
    pub fn new(a: UniPoly, b: UniPoly, curve: &HyperellipticCurve) -> Result<Self> {
        if a.is_zero() || !a.is_monic() {
            return Err(Error::invalid(format!("a = {a} must be monic")));
        }
        let b = b.rem(&a);
        let check = &(&b * &b) - curve.f();
        if !a.divides(&check) {
            return Err(Error::invalid(format!("a = {a} does not divide b^2 - f for b = {b}")));
        }
        Ok(reduce(MumfordDivisor { a, b }, curve))
    }

    /// `P − ∞` for an affine rational point `P`.
    pub fn from_point(x: &Rational, y: &Rational, curve: &HyperellipticCurve) -> Result<Self> {
        if !curve.contains(x, y) {
            return Err(Error::invalid(format!("({x}, {y}) is not on {curve}")));
        }
        Ok(MumfordDivisor { a: UniPoly::linear_root(x), b: UniPoly::constant(y.clone()) })
    }

    /// `Σ P_i − n·∞` for affine rational points.
    pub fn from_points(points: &[(Rational, Rational)], curve: &HyperellipticCurve) -> Result<Self> {
        let mut acc = Self::identity();
        for (x, y) in points {
            acc = cantor_add(&acc, &Self::from_point(x, y, curve)?, curve);
        }
        Ok(acc)
    }

    pub fn a(&self) -> &UniPoly {
        &self.a
    }

    pub fn b(&self) -> &UniPoly {
        &self.b
    }

    /// `d = deg a`.
    pub fn degree(&self) -> usize {
        self.a.deg()
    }

    pub fn is_identity(&self) -> bool {
        self.a.is_one()
    }

    /// Square-free blocks `(s_i, b mod s_i, i)` with `a = ∏ s_i^i`.
    pub fn blocks(&self) -> Vec<(UniPoly, UniPoly, u32)> {
        self.a
            .squarefree_decomposition()
            .into_iter()
            .map(|(s, m)| {
                let bs = self.b.rem(&s);
                (s, bs, m)
            })
            .collect()
    }

    /// `D` as a formal divisor: the blocks of `D′` and `−d·∞`.
    pub fn to_formal(&self) -> FormalDivisor {
        FormalDivisor {
            terms: self
                .blocks()
                .into_iter()
                .map(|(a, b, m)| DivisorTerm::point(a, b, Rational::from(m)))
                .collect(),
            infinity_coefficient: Rational::from(-(self.degree() as i64)),
        }
    }
}

impl fmt::Debug for MumfordDivisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for MumfordDivisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.a, self.b)
    }
}

fn reduce(mut d: MumfordDivisor, curve: &HyperellipticCurve) -> MumfordDivisor {
    let g = curve.genus() as isize;
    d.b = d.b.rem(&d.a);
    while d.a.degree() > g {
        let num = curve.f() - &(&d.b * &d.b);
        let a2 = num.exact_div(&d.a).monic();
        let b2 = (-&d.b).rem(&a2);
        d = MumfordDivisor { a: a2, b: b2 };
    }
    d
}

/// Sum in the Jacobian (Cantor composition followed by reduction).
pub fn cantor_add(d1: &MumfordDivisor, d2: &MumfordDivisor, curve: &HyperellipticCurve) -> MumfordDivisor {
    let (g1, e1, e2) = UniPoly::ext_gcd(&d1.a, &d2.a);
    let (d, c1, c2) = UniPoly::ext_gcd(&g1, &(&d1.b + &d2.b));
    let s1 = &c1 * &e1;
    let s2 = &c1 * &e2;
    let s3 = c2;
    let a = (&d1.a * &d2.a).exact_div(&(&d * &d));
    let num = &(&(&s1 * &(&d1.a * &d2.b)) + &(&s2 * &(&d2.a * &d1.b)))
        + &(&s3 * &(&(&d1.b * &d2.b) + curve.f()));
    let b = num.exact_div(&d).rem(&a);
    reduce(MumfordDivisor { a, b }, curve)
}

/// `n·D` by double-and-add; negative `n` goes through the involution.
pub fn multiply(d: &MumfordDivisor, n: i64, curve: &HyperellipticCurve) -> MumfordDivisor {
    let mut base = if n < 0 { involution(d) } else { d.clone() };
    let mut k = n.unsigned_abs();
    let mut acc = MumfordDivisor::identity();
    while k > 0 {
        if k & 1 == 1 {
            acc = cantor_add(&acc, &base, curve);
        }
        base = cantor_add(&base, &base, curve);
        k >>= 1;
    }
    acc
}

/// `D1 − D2`.
pub fn cantor_sub(d1: &MumfordDivisor, d2: &MumfordDivisor, curve: &HyperellipticCurve) -> MumfordDivisor {
    cantor_add(d1, &involution(d2), curve)
}

/// `(a, b) ↦ (a, −b mod a)`.
pub fn involution(d: &MumfordDivisor) -> MumfordDivisor {
    MumfordDivisor { a: d.a.clone(), b: (-&d.b).rem(&d.a) }
}

/// True iff some point `(x₀, 0)` with `f(x₀) = 0` lies in the support of `D′`.
pub fn has_weierstrass_support(d: &MumfordDivisor, _curve: &HyperellipticCurve) -> bool {
    UniPoly::gcd(&d.a, &d.b).degree() > 0
}

/// Largest multiplier tried by [`ensure_weierstrass_free`].
pub const MAX_MULTIPLIER: u32 = 16;

/// Smallest `n ≤ 16` with `n·D` free of Weierstrass points, returned with `n`.
///
/// A torsion class may reach the identity first; it is returned as is, and the
/// caller reads the height as zero.
pub fn ensure_weierstrass_free(d: &MumfordDivisor, curve: &HyperellipticCurve) -> Result<(MumfordDivisor, u32)> {
    if d.is_identity() {
        return Err(Error::invalid("the identity divisor has no height to compute"));
    }
    let mut acc = d.clone();
    for n in 1..=MAX_MULTIPLIER {
        if acc.is_identity() || !has_weierstrass_support(&acc, curve) {
            return Ok((acc, n));
        }
        acc = cantor_add(&acc, d, curve);
    }
    Err(Error::invalid(format!(
        "every multiple n·D with n ≤ {MAX_MULTIPLIER} has a Weierstrass point in its support"
    )))
}

/// Shape of a term of a [`FormalDivisor`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TermKind {
    /// The points `{a(x) = 0, y = b(x)}`, `a` monic square-free, `a | b² − f`.
    Point { a: UniPoly, b: UniPoly },
    /// Both points over each root of the monic square-free `c`: the affine
    /// zeros of the function `c(x)`.
    Fibre { c: UniPoly },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DivisorTerm {
    pub kind: TermKind,
    pub coefficient: Rational,
}

impl DivisorTerm {
    pub fn point(a: UniPoly, b: UniPoly, coefficient: Rational) -> Self {
        DivisorTerm { kind: TermKind::Point { a, b }, coefficient }
    }

    pub fn fibre(c: UniPoly, coefficient: Rational) -> Self {
        DivisorTerm { kind: TermKind::Fibre { c }, coefficient }
    }

    /// The x-polynomial of the term.
    pub fn x_poly(&self) -> &UniPoly {
        match &self.kind {
            TermKind::Point { a, .. } => a,
            TermKind::Fibre { c } => c,
        }
    }

    /// Number of geometric points in the term.
    pub fn point_count(&self) -> usize {
        match &self.kind {
            TermKind::Point { a, .. } => a.deg(),
            TermKind::Fibre { c } => 2 * c.deg(),
        }
    }
}

impl fmt::Display for DivisorTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            TermKind::Point { a, b } => write!(f, "{}*[{a}, y - ({b})]", self.coefficient),
            TermKind::Fibre { c } => write!(f, "{}*zeros({c})", self.coefficient),
        }
    }
}

/// Formal ℚ-linear combination of closed points, plus a multiple of `∞`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct FormalDivisor {
    pub terms: Vec<DivisorTerm>,
    pub infinity_coefficient: Rational,
}

impl FormalDivisor {
    pub fn degree(&self) -> Rational {
        let mut s = self.infinity_coefficient.clone();
        for t in &self.terms {
            s += Rational::from(&t.coefficient * t.point_count() as u64);
        }
        s
    }

    pub fn scaled(&self, c: &Rational) -> FormalDivisor {
        FormalDivisor {
            terms: self
                .terms
                .iter()
                .map(|t| DivisorTerm { kind: t.kind.clone(), coefficient: Rational::from(&t.coefficient * c) })
                .collect(),
            infinity_coefficient: Rational::from(&self.infinity_coefficient * c),
        }
    }

    /// Product of the x-polynomials of all finite terms.
    pub fn x_support(&self) -> UniPoly {
        self.terms.iter().fold(UniPoly::one(), |acc, t| &acc * t.x_poly())
    }
}

impl fmt::Display for FormalDivisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.terms.iter().map(|t| t.to_string()).collect();
        if self.infinity_coefficient != 0 {
            parts.push(format!("{}*inf", self.infinity_coefficient));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// `E = inv(D′) − (d/2)·zeros(x − λ)`, a degree-zero ℚ-divisor linearly
/// equivalent to `−D` whose support avoids that of `D` and `∞`.
pub fn construct_e(d: &MumfordDivisor, lambda: &Rational, curve: &HyperellipticCurve) -> Result<FormalDivisor> {
    if d.a.eval(lambda) == 0 {
        return Err(Error::invalid(format!("a(λ) = 0 for λ = {lambda}")));
    }
    if curve.f().eval(lambda) == 0 {
        return Err(Error::invalid(format!("λ = {lambda} is a root of f")));
    }
    if has_weierstrass_support(d, curve) {
        return Err(Error::invalid("D has a Weierstrass point in its support"));
    }
    let inv = involution(d);
    let mut terms: Vec<DivisorTerm> = inv
        .blocks()
        .into_iter()
        .map(|(a, b, m)| DivisorTerm::point(a, b, Rational::from(m)))
        .collect();
    if d.degree() > 0 {
        terms.push(DivisorTerm::fibre(
            UniPoly::linear_root(lambda),
            Rational::from((-(d.degree() as i64), 2)),
        ));
    }
    Ok(FormalDivisor { terms, infinity_coefficient: Rational::new() })
}

/// Residual construction: with `c = b + τ·a`, the function `y − c(x)` has
/// divisor `D′ + R − (2g+1)·∞`, so `E = R − (deg R / 2)·zeros(x − λ)` is
/// again equivalent to `−D`. Used when the plain `E` meets a point where the
/// naive model is not regular.
pub fn construct_residual_e(
    d: &MumfordDivisor,
    tau: &Rational,
    lambda: &Rational,
    curve: &HyperellipticCurve,
) -> Result<FormalDivisor> {
    let c = &d.b + &d.a.scale(tau);
    let r = (curve.f() - &(&c * &c)).exact_div(&d.a);
    if !r.is_monic() {
        return Err(Error::invalid("residual divisor is not monic"));
    }
    if UniPoly::gcd(&r, &d.a).degree() > 0 {
        return Err(Error::invalid(format!("residual for τ = {tau} meets D")));
    }
    if d.a.eval(lambda) == 0 || curve.f().eval(lambda) == 0 {
        return Err(Error::invalid(format!("λ = {lambda} not admissible")));
    }
    let mut terms: Vec<DivisorTerm> = r
        .squarefree_decomposition()
        .into_iter()
        .map(|(s, m)| {
            let bs = c.rem(&s);
            DivisorTerm::point(s, bs, Rational::from(m))
        })
        .collect();
    terms.push(DivisorTerm::fibre(UniPoly::linear_root(lambda), Rational::from((-(r.deg() as i64), 2))));
    Ok(FormalDivisor { terms, infinity_coefficient: Rational::new() })
}

/// Integers `0, 1, −1, 2, −2, …`.
pub fn small_integers() -> impl Iterator<Item = i64> {
    (0i64..).flat_map(|k| if k == 0 { vec![0] } else { vec![k, -k] })
}

/// Smallest admissible `λ` in the order `0, 1, −1, 2, …`; a nonzero `seed`
/// selects a later admissible candidate instead.
pub fn choose_lambda(d: &MumfordDivisor, curve: &HyperellipticCurve, seed: u64) -> Rational {
    let skip = (seed % 8) as usize;
    small_integers()
        .map(Rational::from)
        .filter(|l| d.a.eval(l) != 0 && curve.f().eval(l) != 0)
        .nth(skip)
        .expect("only finitely many integers are excluded")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn genus3() -> HyperellipticCurve {
        HyperellipticCurve::from_ints(&[25, -13, 11, -15, 0, 0, 0, 1]).unwrap()
    }

    fn q(v: i64) -> Rational {
        Rational::from(v)
    }

    #[test]
    fn curve_validation() {
        assert_eq!(genus3().genus(), 3);
        assert_eq!(HyperellipticCurve::from_ints(&[11, -10, 2, 1]).unwrap().genus(), 1);
        assert!(HyperellipticCurve::from_ints(&[1, 0, 0, 0, 1]).is_err());
        assert!(HyperellipticCurve::from_ints(&[0, 0, 1, 1]).is_err());
    }

    #[test]
    fn identity_and_inverse() {
        let c = genus3();
        let d = MumfordDivisor::from_point(&q(1), &q(3), &c).unwrap();
        assert_eq!(cantor_add(&d, &MumfordDivisor::identity(), &c), d);
        assert!(cantor_add(&d, &involution(&d), &c).is_identity());
        assert_eq!(involution(&involution(&d)), d);
    }

    #[test]
    fn doubling_on_genus_one() {
        // y^2 = x^3 + 2x^2 - 10x + 11, P = (1, 2): tangent slope -3/4
        let c = HyperellipticCurve::from_ints(&[11, -10, 2, 1]).unwrap();
        let p = MumfordDivisor::from_point(&q(1), &q(2), &c).unwrap();
        let two = cantor_add(&p, &p, &c);
        let s = Rational::from((-3, 4));
        let x3: Rational = Rational::from(&s * &s) - 4;
        let y3: Rational = -(Rational::from(2) + s * Rational::from(&x3 - 1));
        assert_eq!(two, MumfordDivisor::from_point(&x3, &y3, &c).unwrap());
    }

    #[test]
    fn e_has_degree_zero() {
        let c = genus3();
        let d = MumfordDivisor::from_point(&q(1), &q(3), &c).unwrap();
        let lam = choose_lambda(&d, &c, 0);
        assert_eq!(lam, 0);
        let e = construct_e(&d, &lam, &c).unwrap();
        assert_eq!(e.degree(), 0);
        let d2 = MumfordDivisor::from_point(&q(0), &q(-5), &c).unwrap();
        assert_eq!(choose_lambda(&d2, &c, 0), 1);
        assert!(construct_e(&d2, &q(0), &c).is_err());
    }

    #[test]
    fn residual_e_degree() {
        let c = genus3();
        let d = MumfordDivisor::from_points(&[(q(1), q(3)), (q(0), q(-5))], &c).unwrap();
        let e = construct_residual_e(&d, &q(0), &q(2), &c).unwrap();
        assert_eq!(e.degree(), 0);
    }

    #[test]
    fn weierstrass_multiplier() {
        // y^2 = x^3 - x: (0,0) is 2-torsion
        let c = HyperellipticCurve::from_ints(&[0, -1, 0, 1]).unwrap();
        let t = MumfordDivisor::from_point(&q(0), &q(0), &c).unwrap();
        assert!(has_weierstrass_support(&t, &c));
        let (m, n) = ensure_weierstrass_free(&t, &c).unwrap();
        assert_eq!(n, 2);
        assert!(m.is_identity());
        assert!(ensure_weierstrass_free(&MumfordDivisor::identity(), &c).is_err());
    }
}
