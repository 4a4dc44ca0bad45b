//! p-adic polynomial factorization: 𝔽_p factorization, Newton lifting of
//! coprime factorizations, and Newton-polygon slope splitting.
//!
//! p-adic numbers are carried as exact rationals whose p-adic expansion has
//! been truncated at a fixed absolute precision, so all arithmetic stays exact
//! and deterministic.

use rug::{Integer, Rational};

use super::factor::{ipow, valuation};
use super::linalg::solve_rational;
use super::modp::{factor_fp, FpPoly};
use super::poly::UniPoly;
use crate::error::{Error, Result};

/// Truncate `x` at absolute p-adic precision `n`: the result agrees with `x`
/// modulo `p^n` and has only powers of `p` in its denominator.
pub fn truncate(x: &Rational, p: &Integer, n: i64) -> Rational {
    let Some(v) = valuation(x, p) else {
        return Rational::new();
    };
    if v >= n {
        return Rational::new();
    }
    let k = (n - v) as u32;
    let pk = ipow(p, k);
    let unit = x.clone() * pow_rat(p, -v);
    let d = Integer::from(unit.denom() % &pk);
    let inv = d.invert(&pk).expect("unit denominator");
    let mut r = Integer::from(unit.numer() * inv) % &pk;
    if r < 0 {
        r += &pk;
    }
    // symmetric representative keeps small negative numbers small
    let half = Integer::from(&pk >> 1);
    if r > half {
        r -= &pk;
    }
    Rational::from(r) * pow_rat(p, v)
}

pub fn truncate_poly(f: &UniPoly, p: &Integer, n: i64) -> UniPoly {
    UniPoly::from_coeffs(f.coeffs().iter().map(|c| truncate(c, p, n)).collect())
}

/// `p^e` as a rational, `e` of either sign.
pub fn pow_rat(p: &Integer, e: i64) -> Rational {
    let pe = ipow(p, e.unsigned_abs() as u32);
    if e >= 0 {
        Rational::from(pe)
    } else {
        Rational::from((Integer::from(1), pe))
    }
}

/// Minimal coefficient valuation; `None` for the zero polynomial.
pub fn min_valuation(f: &UniPoly, p: &Integer) -> Option<i64> {
    f.coeffs().iter().filter_map(|c| valuation(c, p)).min()
}

/// One edge of a Newton polygon, from index `start` to `end`, with rational slope.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segment {
    pub start: usize,
    pub end: usize,
    pub slope: Rational,
}

impl Segment {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end == self.start
    }

    /// Valuation of each of the `len()` roots attached to this edge.
    pub fn root_valuation(&self) -> Rational {
        -self.slope.clone()
    }
}

/// Lower convex hull of `(i, v_p(c_i))`. Zero low-order coefficients are
/// ignored, so the polygon starts at the first nonzero coefficient.
pub fn newton_polygon(f: &UniPoly, p: &Integer) -> Vec<Segment> {
    let pts: Vec<(usize, i64)> = f
        .coeffs()
        .iter()
        .enumerate()
        .filter_map(|(i, c)| valuation(c, p).map(|v| (i, v)))
        .collect();
    let mut hull: Vec<(usize, i64)> = Vec::new();
    for &pt in &pts {
        while hull.len() >= 2 {
            let (x1, y1) = hull[hull.len() - 2];
            let (x2, y2) = hull[hull.len() - 1];
            // drop middle point if it lies on or above the chord
            let lhs = (y2 - y1) as i128 * (pt.0 - x1) as i128;
            let rhs = (pt.1 - y1) as i128 * (x2 - x1) as i128;
            if lhs >= rhs {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    hull.windows(2)
        .map(|w| Segment {
            start: w[0].0,
            end: w[1].0,
            slope: Rational::from((w[1].1 - w[0].1, (w[1].0 - w[0].0) as i64)),
        })
        .collect()
}

/// Sum of `min(0, v(θ))` over the roots θ of `f`, read off the Newton polygon.
pub fn negative_root_valuation_sum(f: &UniPoly, p: &Integer) -> Rational {
    let mut s = Rational::new();
    for seg in newton_polygon(f, p) {
        let rv = seg.root_valuation();
        if rv < 0 {
            s += rv * Rational::from(seg.len() as u64);
        }
    }
    s
}

/// Newton's method for the factorization map `(A, B) ↦ A·B` with `A`, `B`
/// monic: refine `a0·b0 ≈ f` until `f − A·B` vanishes to absolute precision
/// `target`. Works both for factorizations coprime modulo `p` and for
/// Newton-polygon slope splittings.
pub fn lift_factorization(
    f: &UniPoly,
    a0: &UniPoly,
    b0: &UniPoly,
    p: &Integer,
    target: i64,
) -> Result<(UniPoly, UniPoly)> {
    let n = f.deg();
    let k = a0.deg();
    debug_assert!(f.is_monic() && a0.is_monic() && b0.is_monic());
    debug_assert_eq!(k + b0.deg(), n);
    // truncation of factors with p in the denominators costs that many digits in the product
    let lo = [f, a0, b0].iter().filter_map(|q| min_valuation(q, p)).min().unwrap_or(0).min(0);
    let work = target + 8 - 2 * lo;
    let mut a = truncate_poly(a0, p, work);
    let mut b = truncate_poly(b0, p, work);
    let mut last = i64::MIN;
    let mut stalls = 0;
    for _ in 0..200 {
        let e = f - &(&a * &b);
        let ve = min_valuation(&e, p).unwrap_or(i64::MAX);
        if ve >= target {
            return Ok((a, b));
        }
        if ve <= last {
            stalls += 1;
            if stalls > 3 {
                break;
            }
        } else {
            stalls = 0;
        }
        last = ve;
        // columns: x^i·b (i < k) then x^j·a (j < n-k); rows: coefficients 0..n-1
        let mut m = vec![vec![Rational::new(); n]; n];
        for i in 0..k {
            for (t, c) in b.coeffs().iter().enumerate() {
                if i + t < n {
                    m[i + t][i] = c.clone();
                }
            }
        }
        for j in 0..(n - k) {
            for (t, c) in a.coeffs().iter().enumerate() {
                if j + t < n {
                    m[j + t][k + j] = c.clone();
                }
            }
        }
        let rhs: Vec<Rational> = (0..n).map(|i| e.coeff(i)).collect();
        let sol = solve_rational(&m, &rhs)
            .ok_or_else(|| Error::PadicPrecision { prime: p.clone(), digits: target.max(0) as u32 })?;
        let da = UniPoly::from_coeffs(sol[..k].to_vec());
        let db = UniPoly::from_coeffs(sol[k..].to_vec());
        a = truncate_poly(&(&a + &da), p, work);
        b = truncate_poly(&(&b + &db), p, work);
    }
    Err(Error::PadicPrecision { prime: p.clone(), digits: target.max(0) as u32 })
}

/// Split monic `f = A·B` where the roots of `A` have valuation `≥ 0` and
/// those of `B` are negative. Exact when no splitting is needed.
pub fn split_integral_roots(f: &UniPoly, p: &Integer, digits: i64) -> Result<(UniPoly, UniPoly)> {
    let f = f.monic();
    let (x_pow, rest) = strip_x(&f);
    let segs = newton_polygon(&rest, p);
    // roots of valuation >= 0 sit on the edges of non-positive slope, on the left
    let k = segs.iter().filter(|s| s.slope <= 0).map(|s| s.end).max().unwrap_or(0);
    let n = rest.deg();
    let (a, b) = if k == n {
        (rest.clone(), UniPoly::one())
    } else if k == 0 {
        (UniPoly::one(), rest.clone())
    } else {
        let (a0, b0) = np_initial_split(&rest, k);
        let spread = coeff_spread(&rest, p);
        lift_factorization(&rest, &a0, &b0, p, digits + spread)?
    };
    Ok((&a * &UniPoly::x().pow(x_pow as u32), b))
}

fn strip_x(f: &UniPoly) -> (usize, UniPoly) {
    let z = f.coeffs().iter().take_while(|c| **c == 0).count();
    (z, UniPoly::from_coeffs(f.coeffs()[z..].to_vec()))
}

fn coeff_spread(f: &UniPoly, p: &Integer) -> i64 {
    let vals: Vec<i64> = f.coeffs().iter().filter_map(|c| valuation(c, p)).collect();
    let lo = vals.iter().copied().min().unwrap_or(0);
    let hi = vals.iter().copied().max().unwrap_or(0);
    (hi - lo).abs() + lo.abs() + 4
}

/// Initial factors for a split at Newton-polygon vertex `k`.
fn np_initial_split(f: &UniPoly, k: usize) -> (UniPoly, UniPoly) {
    let ck = f.coeff(k);
    let a0 = UniPoly::from_coeffs((0..=k).map(|i| f.coeff(i) / ck.clone()).collect());
    let b0 = UniPoly::from_coeffs((k..=f.deg()).map(|i| f.coeff(i)).collect());
    (a0, b0)
}

/// One p-adic factor, with its ramification data when known.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PadicFactor {
    pub poly: UniPoly,
    pub multiplicity: u32,
    /// Ramification index; `0` when the block is not certified irreducible.
    pub ramification: u32,
    /// Residue degree; `0` when the block is not certified irreducible.
    pub residue_degree: u32,
    pub certified: bool,
}

/// Factorization of a square-free polynomial over ℚ_p.
#[derive(Clone, Debug)]
pub struct PAdicFactorization {
    pub prime: Integer,
    pub precision: u32,
    pub factors: Vec<PadicFactor>,
    pub unit: Rational,
}

impl PAdicFactorization {
    pub fn all_certified(&self) -> bool {
        self.factors.iter().all(|f| f.certified)
    }

    /// Product of the factors times the unit.
    pub fn product(&self) -> UniPoly {
        let mut acc = UniPoly::constant(self.unit.clone());
        for f in &self.factors {
            for _ in 0..f.multiplicity {
                acc = &acc * &f.poly;
            }
        }
        acc
    }
}

/// Factor a square-free `f` over ℚ_p to `digits` p-adic digits.
///
/// Coprime-mod-p parts are separated by Newton lifting; a repeated linear
/// factor mod p is resolved through the Newton polygon of the translated
/// block, recursing after integral-slope rescaling. Blocks whose
/// irreducibility cannot be certified this way are returned whole with
/// `certified = false`.
pub fn padic_factor(f: &UniPoly, prime: &Integer, digits: u32) -> Result<PAdicFactorization> {
    if f.degree() < 1 {
        return Err(Error::invalid("cannot factor a constant polynomial"));
    }
    if !f.is_squarefree() {
        return Err(Error::invalid(format!("{f} is not square-free")));
    }
    if *prime < 2 {
        return Err(Error::invalid("prime must be at least 2"));
    }
    let unit = f.lc();
    let monic = f.monic();
    let n = monic.deg();
    // x = X / p^s makes the polynomial integral
    let mut s: i64 = 0;
    for (i, c) in monic.coeffs().iter().enumerate().take(n) {
        if let Some(v) = valuation(c, prime) {
            if v < 0 {
                let need = (-v + (n - i) as i64 - 1) / (n - i) as i64;
                s = s.max(need);
            }
        }
    }
    let scaled = if s == 0 {
        monic.clone()
    } else {
        monic.scale_var(&pow_rat(prime, -s)).scale(&pow_rat(prime, s * n as i64))
    };
    let work = digits as i64 + s * n as i64;
    let mut factors = Vec::new();
    factor_integral(&scaled, prime, work, &mut factors)?;
    for fac in factors.iter_mut() {
        if s != 0 {
            let d = fac.poly.deg() as i64;
            fac.poly = fac.poly.scale_var(&pow_rat(prime, s)).scale(&pow_rat(prime, -s * d));
        }
        fac.poly = truncate_poly(&fac.poly, prime, digits as i64);
    }
    factors.sort_by(|a, b| {
        a.poly
            .deg()
            .cmp(&b.poly.deg())
            .then_with(|| format!("{}", a.poly).cmp(&format!("{}", b.poly)))
    });
    Ok(PAdicFactorization { prime: prime.clone(), precision: digits, factors, unit })
}

fn irreducible(poly: UniPoly, e: u32, f: u32) -> PadicFactor {
    PadicFactor { poly, multiplicity: 1, ramification: e, residue_degree: f, certified: true }
}

fn factor_integral(q: &UniPoly, p: &Integer, prec: i64, out: &mut Vec<PadicFactor>) -> Result<()> {
    if q.deg() == 1 {
        out.push(irreducible(q.clone(), 1, 1));
        return Ok(());
    }
    let qbar = FpPoly::reduce(q, p).expect("integral polynomial");
    let (_, fs) = factor_fp(&qbar, p);
    if fs.len() > 1 {
        let mut rest = q.clone();
        let k = fs.len();
        for (idx, (phi, e)) in fs.iter().enumerate() {
            let block0 = phi.lift().pow(*e);
            let block = if idx + 1 == k {
                rest.clone()
            } else {
                let rest_bar = FpPoly::reduce(&rest, p).unwrap();
                let blk_bar = FpPoly::reduce(&block0, p).unwrap();
                let cof0 = rest_bar.div_rem(&blk_bar, p).0.lift();
                let (a, b) = lift_factorization(&rest, &block0, &cof0, p, prec + 4)?;
                rest = b;
                a
            };
            if *e == 1 {
                out.push(irreducible(block, 1, phi.deg() as u32));
            } else {
                factor_block(&block, phi, p, prec, out)?;
            }
        }
        return Ok(());
    }
    let (phi, e) = &fs[0];
    if *e == 1 {
        out.push(irreducible(q.clone(), 1, phi.deg() as u32));
        Ok(())
    } else {
        factor_block(q, phi, p, prec, out)
    }
}

/// Factor a block congruent to `phi^e` modulo `p`, `e > 1`.
fn factor_block(
    q: &UniPoly,
    phi: &FpPoly,
    p: &Integer,
    prec: i64,
    out: &mut Vec<PadicFactor>,
) -> Result<()> {
    if phi.deg() > 1 {
        out.push(PadicFactor {
            poly: q.clone(),
            multiplicity: 1,
            ramification: 0,
            residue_degree: 0,
            certified: false,
        });
        return Ok(());
    }
    // phi = x - r
    let r = Rational::from(Integer::from(p - &phi.c[0]) % p);
    let t = q.translate(&r);
    let segs = newton_polygon(&t, p);
    let back = |g: &UniPoly| truncate_poly(&g.translate(&Rational::from(-&r)), p, prec);
    if segs.len() > 1 {
        let mut rest = t.clone();
        let mut pieces = Vec::new();
        // peel off the lowest edge repeatedly
        for seg in &segs[..segs.len() - 1] {
            let rel = newton_polygon(&rest, p);
            let k = rel[0].len();
            let (a0, b0) = np_initial_split(&rest, k);
            let (a, b) = lift_factorization(&rest, &a0, &b0, p, prec + coeff_spread(&rest, p))?;
            debug_assert_eq!(k, seg.len());
            pieces.push(a);
            rest = b;
        }
        pieces.push(rest);
        for piece in pieces {
            let mut sub = Vec::new();
            single_slope(&piece, p, prec, &mut sub)?;
            for mut fac in sub {
                fac.poly = back(&fac.poly);
                out.push(fac);
            }
        }
        return Ok(());
    }
    let mut sub = Vec::new();
    single_slope(&t, p, prec, &mut sub)?;
    for mut fac in sub {
        fac.poly = back(&fac.poly);
        out.push(fac);
    }
    Ok(())
}

/// Factor a monic polynomial whose Newton polygon is a single edge.
fn single_slope(t: &UniPoly, p: &Integer, prec: i64, out: &mut Vec<PadicFactor>) -> Result<()> {
    let l = t.deg();
    if l == 1 {
        out.push(irreducible(t.clone(), 1, 1));
        return Ok(());
    }
    let (xz, rest) = strip_x(t);
    if xz > 0 {
        // square-free input: at most a simple root at 0
        out.push(irreducible(UniPoly::x(), 1, 1));
        if rest.deg() > 0 {
            single_slope(&rest, p, prec, out)?;
        }
        return Ok(());
    }
    let segs = newton_polygon(t, p);
    let rv = segs[0].root_valuation();
    let den = rv.denom().to_u32().unwrap_or(0);
    if den as usize == l {
        out.push(irreducible(t.clone(), l as u32, 1));
        return Ok(());
    }
    if den == 1 {
        let h = rv.numer().to_i64().expect("small slope");
        if h == 0 {
            return factor_integral(t, p, prec, out);
        }
        // x = p^h X
        let scaled = t.scale_var(&pow_rat(p, h)).scale(&pow_rat(p, -h * l as i64));
        let mut sub = Vec::new();
        factor_integral(&scaled, p, prec + h * l as i64, &mut sub)?;
        for mut fac in sub {
            let d = fac.poly.deg() as i64;
            fac.poly = fac.poly.scale_var(&pow_rat(p, -h)).scale(&pow_rat(p, h * d));
            out.push(fac);
        }
        return Ok(());
    }
    // fractional slope with denominator below the degree: check the residual polynomial
    let e = den as usize;
    let h = rv.numer().to_i64().unwrap();
    let m = l / e;
    let mut resid = Vec::with_capacity(m + 1);
    for j in 0..=m {
        let c = t.coeff(j * e);
        // normalise c by p^{h(l - j e)/e}
        let shift = h * (l - j * e) as i64 / e as i64;
        let r = if c == 0 { Rational::new() } else { c * pow_rat(p, -shift) };
        resid.push(super::modp::reduce_rational(&r, p).unwrap_or_default());
    }
    let rp = FpPoly::from_ints(&resid, p);
    let (_, rf) = factor_fp(&rp, p);
    if rf.len() == 1 && rf[0].1 == 1 {
        out.push(irreducible(t.clone(), e as u32, rf[0].0.deg() as u32));
    } else {
        out.push(PadicFactor {
            poly: t.clone(),
            multiplicity: 1,
            ramification: e as u32,
            residue_degree: 0,
            certified: false,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn congruent(a: &UniPoly, b: &UniPoly, p: &Integer, n: i64) -> bool {
        min_valuation(&(a - b), p).is_none_or(|v| v >= n)
    }

    #[test]
    fn lifts_factors_with_large_denominators() {
        let q = |n: i64, d: i64| Rational::from((n, d));
        let f = UniPoly::from_coeffs(vec![q(1378285, 1752192), q(-2166713, 584064), q(13994543, 6230016), q(1, 1)]);
        let a0 = UniPoly::from_coeffs(vec![q(44105120, 125950887), q(-69334816, 41983629), q(1, 1)]);
        let b0 = UniPoly::from_coeffs(vec![q(13994543, 6230016), q(1, 1)]);
        let p = Integer::from(2);
        let (a, b) = lift_factorization(&f, &a0, &b0, &p, 68).unwrap();
        assert!(congruent(&(&a * &b), &f, &p, 68));
    }

    #[test]
    fn examples() {
        let p3 = Integer::from(3);
        let f = UniPoly::from_ints(&[-1, 0, 1]);
        let fac = padic_factor(&f, &p3, 10).unwrap();
        assert_eq!(fac.factors.len(), 2);
        assert!(fac.all_certified());

        let g = UniPoly::from_ints(&[-3, 0, 1]);
        let fac = padic_factor(&g, &p3, 10).unwrap();
        assert_eq!(fac.factors.len(), 1);
        assert_eq!(fac.factors[0].ramification, 2);

        let p5 = Integer::from(5);
        let h = UniPoly::from_ints(&[1, 0, 1]);
        let fac = padic_factor(&h, &p5, 4).unwrap();
        assert_eq!(fac.factors.len(), 2);
        let roots: Vec<Integer> = fac
            .factors
            .iter()
            .map(|f| super::super::linalg::to_residue(&(-f.poly.coeff(0)), &Integer::from(625)))
            .collect();
        for r in &roots {
            assert_eq!((Integer::from(r * r) + 1u32) % 625u32, 0);
        }
        let mut mod5: Vec<u32> = roots.iter().map(|r| Integer::from(r % 5u32).to_u32().unwrap()).collect();
        mod5.sort();
        assert_eq!(mod5, vec![2, 3]);
    }

    #[test]
    fn slopes_and_rescaling() {
        let p = Integer::from(2);
        // (x - 2)(x - 4)(x - 8)(x^2 + x + 1)
        let f = UniPoly::from_ints(&[-2, 1])
            * UniPoly::from_ints(&[-4, 1])
            * UniPoly::from_ints(&[-8, 1])
            * UniPoly::from_ints(&[1, 1, 1]);
        let fac = padic_factor(&f, &p, 20).unwrap();
        assert_eq!(fac.factors.len(), 4);
        assert!(fac.all_certified());
        assert!(congruent(&fac.product(), &f, &p, 18));
    }

    #[test]
    fn same_slope_split_after_rescaling() {
        let p = Integer::from(3);
        // (x - 3)(x - 6)(x - 9 - 27): slope-1 edge of length 2 then slope 3
        let f = UniPoly::from_ints(&[-3, 1]) * UniPoly::from_ints(&[-6, 1]) * UniPoly::from_ints(&[-36, 1]);
        let fac = padic_factor(&f, &p, 12).unwrap();
        assert_eq!(fac.factors.len(), 3);
        assert!(congruent(&fac.product(), &f, &p, 10));
    }

    #[test]
    fn split_by_root_valuation() {
        let p = Integer::from(2);
        // roots 1/4, 3, 1/2 (x - 1/4)(x - 3)(x - 1/2)
        let f = UniPoly::from_coeffs(vec![Rational::from((-1, 4)), Rational::from(1)])
            * UniPoly::from_ints(&[-3, 1])
            * UniPoly::from_coeffs(vec![Rational::from((-1, 2)), Rational::from(1)]);
        let (a, b) = split_integral_roots(&f, &p, 20).unwrap();
        assert_eq!(a.deg(), 1);
        assert_eq!(b.deg(), 2);
        assert!(congruent(&a, &UniPoly::from_ints(&[-3, 1]), &p, 18));
    }

    #[test]
    fn newton_polygon_edges() {
        let p = Integer::from(2);
        let f = UniPoly::from_ints(&[8, 2, 0, 1]);
        let segs = newton_polygon(&f, &p);
        assert_eq!(segs.len(), 2);
        assert_eq!(segs[0].slope, -2);
        assert_eq!(segs[1].slope, Rational::from((-1, 2)));
        let collinear = newton_polygon(&UniPoly::from_ints(&[8, 4, 0, 1]), &p);
        assert_eq!(collinear.len(), 1);
    }
}
