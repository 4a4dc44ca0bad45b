//! Non-Archimedean intersection numbers on the plane model `y² = f(x)` over
//! `ℤ_p`, and the fibral correction `⟨Φ(D), Ē⟩_p` from supplied reduction data.
//!
//! Horizontal intersections are computed as lengths: for a closed point `X`
//! with closure `Spec O_X` and the ideal `I_Y` of the closure of `Y`,
//! `⟨X̄, Ȳ⟩_p = v_p [O_X : I_Y·O_X]`. The affine chart `x` carries the points
//! with `v(x) ≥ 0`; the chart `t = 1/x`, `w = y·t^{g+1}` carries the rest.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::curve_mumford::{FormalDivisor, HyperellipticCurve, TermKind};
use crate::error::{Error, Result};
use crate::exact_algebra::factor::valuation;
use crate::exact_algebra::linalg::{echelon_zp, rank_rational, solve_rational};
use crate::exact_algebra::modp::{factor_fp, FpPoly};
use crate::exact_algebra::padic::{negative_root_valuation_sum, pow_rat, split_integral_roots};
use crate::exact_algebra::{padic_factor, resultant, UniPoly};

/// Default p-adic working precision, in digits.
pub const DEFAULT_PADIC_DIGITS: i64 = 40;
const MAX_DOUBLINGS: u32 = 4;

/// A closed point of the special fibre at which the plane model is not regular.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonRegularPoint {
    pub prime: Integer,
    /// Monic irreducible polynomial over 𝔽_p cutting out the x-coordinate.
    pub q: FpPoly,
}

/// Closed points where `y² − f` lies in the square of the maximal ideal.
///
/// The point at infinity is always regular for a monic odd-degree model.
pub fn non_regular_points(curve: &HyperellipticCurve, p: &Integer) -> Vec<NonRegularPoint> {
    let f = curve.f();
    let fbar = FpPoly::reduce(f, p).expect("integral model");
    let mut out = Vec::new();
    if *p == 2 {
        let df = fbar.derivative(p);
        for (q, _) in factor_fp(&df, p).1 {
            let e = Integer::from(1) << (q.deg() as u32 - 1);
            let y0 = fbar.pow_mod(&e, &q, p).lift();
            let h = &(&y0 * &y0) - f;
            if all_divisible(&h.rem(&q.lift()), &Integer::from(4)) {
                out.push(NonRegularPoint { prime: p.clone(), q });
            }
        }
    } else {
        let p2 = Integer::from(p * p);
        for (q, e) in factor_fp(&fbar, p).1 {
            if e >= 2 && all_divisible(&f.rem(&q.lift()), &p2) {
                out.push(NonRegularPoint { prime: p.clone(), q });
            }
        }
    }
    out
}

fn all_divisible(f: &UniPoly, m: &Integer) -> bool {
    f.coeffs().iter().all(|c| *c.denom() == 1 && c.numer().is_divisible(m))
}

/// Whether the closure of a divisor term passes through one of `points`.
pub fn term_hits(x_poly: &UniPoly, points: &[NonRegularPoint]) -> bool {
    let Some(pt) = points.first() else {
        return false;
    };
    let p = &pt.prime;
    if x_poly.is_constant() {
        return false;
    }
    let Some(abar) = FpPoly::reduce(&x_poly.primitive(), p) else {
        return true;
    };
    points.iter().any(|pt| FpPoly::gcd(&abar, &pt.q, p).degree() > 0)
}

/// Whether some finite term of `divisor` passes through a non-regular point.
pub fn divisor_hits(divisor: &FormalDivisor, points: &[NonRegularPoint]) -> bool {
    divisor.terms.iter().any(|t| term_hits(t.x_poly(), points))
}

/// A term of a formal divisor after factoring its x-polynomial over ℚ_p.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalPrimeDivisor {
    pub prime: Integer,
    pub a_local: UniPoly,
    /// `y = b_local(x)` on the points; `None` for both sheets over `a_local`.
    pub b_local: Option<UniPoly>,
    pub multiplicity: Rational,
    pub ramification: u32,
    pub residue_degree: u32,
    /// Index of the originating term.
    pub term: usize,
}

/// Factor each finite term of `divisor` over ℚ_p.
pub fn split_padic(divisor: &FormalDivisor, prime: &Integer, digits: u32) -> Result<Vec<LocalPrimeDivisor>> {
    if *prime < 2 {
        return Err(Error::invalid("prime must be at least 2"));
    }
    let mut out = Vec::new();
    for (i, t) in divisor.terms.iter().enumerate() {
        let fac = padic_factor(t.x_poly(), prime, digits)?;
        for pf in fac.factors {
            let b_local = match &t.kind {
                TermKind::Point { b, .. } => Some(b.rem(&pf.poly)),
                TermKind::Fibre { .. } => None,
            };
            out.push(LocalPrimeDivisor {
                prime: prime.clone(),
                a_local: pf.poly,
                b_local,
                multiplicity: t.coefficient.clone(),
                ramification: pf.ramification,
                residue_degree: pf.residue_degree,
                term: i,
            });
        }
    }
    Ok(out)
}

/// Norm of `g₀(x) + y·g₁(x)` on `Y`, as a resultant. `None` when the function
/// vanishes on `Y`, in which case the generator is excluded.
pub fn norm_on_divisor(
    g0: &UniPoly,
    g1: &UniPoly,
    y: &LocalPrimeDivisor,
    curve: &HyperellipticCurve,
) -> Option<Rational> {
    let h = match &y.b_local {
        Some(b) => g0 + &(b * g1),
        None => &(g0 * g0) - &(&(g1 * g1) * curve.f()),
    };
    let r = resultant(&y.a_local, &h);
    (r != 0).then_some(r)
}

/// `⟨X, Y⟩_p` by the minimum rule over the generators `a_X(x)` and `y − b_X(x)`,
/// weighted by both multiplicities.
pub fn horizontal_pair(
    x: &LocalPrimeDivisor,
    y: &LocalPrimeDivisor,
    prime: &Integer,
    curve: &HyperellipticCurve,
) -> Result<Rational> {
    if let (Some(ax), Some(ay)) = (FpPoly::reduce(&x.a_local, prime), FpPoly::reduce(&y.a_local, prime)) {
        if ax.deg() == x.a_local.deg()
            && ay.deg() == y.a_local.deg()
            && FpPoly::gcd(&ax, &ay, prime).degree() <= 0
        {
            return Ok(Rational::new());
        }
    }
    let mut gens = vec![(x.a_local.clone(), UniPoly::zero())];
    if let Some(b) = &x.b_local {
        gens.push((-b, UniPoly::one()));
    }
    let best = gens
        .iter()
        .filter_map(|(g0, g1)| norm_on_divisor(g0, g1, y, curve))
        .filter_map(|n| valuation(&n, prime))
        .min()
        .ok_or_else(|| Error::invalid("every generator vanishes on Y: supports are not disjoint"))?;
    let scale = Rational::from(&x.multiplicity * &y.multiplicity);
    Ok(Rational::from(best.max(0)) * scale)
}

/// One chart's share of a term: `a` monic with integral roots, and the
/// y-coordinate (`w` in the chart at infinity) as a polynomial in the chart variable.
#[derive(Clone, Debug)]
struct ChartPiece {
    a: UniPoly,
    b: Option<UniPoly>,
}

struct SplitTerm {
    finite: Option<ChartPiece>,
    infinite: Option<ChartPiece>,
    exact: bool,
}

fn split_term(a: &UniPoly, b: Option<&UniPoly>, genus: usize, p: &Integer, digits: i64) -> Result<SplitTerm> {
    let (a0, ainf) = split_integral_roots(a, p, digits)?;
    let exact = a0.deg() == 0 || ainf.deg() == 0;
    let finite = (a0.deg() > 0).then(|| ChartPiece { b: b.map(|b| b.rem(&a0)), a: a0 });
    let infinite = if ainf.deg() > 0 {
        let n = ainf.deg();
        let at = ainf.reverse(n).monic();
        let bt = b.map(|b| {
            let tinv = UniPoly::x().inv_mod(&at).expect("t is invertible off t = 0");
            let mut acc = UniPoly::zero();
            for c in b.coeffs().iter().rev() {
                acc = &acc.mul_mod(&tinv, &at) + &UniPoly::constant(c.clone());
            }
            acc.mul_mod(&UniPoly::x().pow(genus as u32 + 1), &at)
        });
        Some(ChartPiece { a: at, b: bt })
    } else {
        None
    };
    Ok(SplitTerm { finite, infinite, exact })
}

fn coords(f: &UniPoly, n: usize) -> Vec<Rational> {
    (0..n).map(|i| f.coeff(i)).collect()
}

fn from_coords(v: &[Rational]) -> UniPoly {
    UniPoly::from_coeffs(v.to_vec())
}

/// `v_p` of the index in `ℤ_pⁿ` of a full-rank lattice given by an echelon basis.
fn echelon_index(rows: &[Vec<Rational>], p: &Integer) -> i64 {
    rows.iter()
        .map(|r| {
            let piv = r.iter().find(|v| **v != 0).expect("nonzero row");
            valuation(piv, p).expect("nonzero pivot")
        })
        .sum()
}

/// Basis of `{h ∈ ℤ_p^m : (b·h mod a) ∈ ℤ_p^m}`.
fn integral_multipliers(a: &UniPoly, b: &UniPoly, p: &Integer) -> Vec<UniPoly> {
    let m = a.deg();
    let cols: Vec<Vec<Rational>> = (0..m).map(|j| coords(&b.mul_mod(&UniPoly::x().pow(j as u32), a), m)).collect();
    let k = cols
        .iter()
        .flatten()
        .filter_map(|c| valuation(c, p))
        .map(|v| -v)
        .max()
        .unwrap_or(0)
        .max(0);
    if k == 0 {
        return (0..m).map(|j| UniPoly::x().pow(j as u32)).collect();
    }
    let pk = pow_rat(p, k);
    // rows (p^k·U·e_j | p^k·e_j) and (p^k·e_i | 0): the ones with vanishing
    // left block after echelon have right block p^k·h with h in the module
    let mut rows = Vec::with_capacity(2 * m);
    for (j, col) in cols.iter().enumerate() {
        let mut r: Vec<Rational> = col.iter().map(|c| Rational::from(c * &pk)).collect();
        r.extend((0..m).map(|i| if i == j { pk.clone() } else { Rational::new() }));
        rows.push(r);
    }
    for i in 0..m {
        let mut r = vec![Rational::new(); 2 * m];
        r[i] = pk.clone();
        rows.push(r);
    }
    let ech = echelon_zp(&rows, p);
    ech.into_iter()
        .filter(|r| r[..m].iter().all(|v| *v == 0))
        .map(|r| from_coords(&r[m..].iter().map(|v| Rational::from(v / &pk)).collect::<Vec<_>>()))
        .collect()
}

/// `v_p [O_X : I_Y·O_X]` for two pieces in the same chart.
fn point_point_length(x: &ChartPiece, y: &ChartPiece, p: &Integer) -> Result<i64> {
    let n = x.a.deg();
    if let (Some(ax), Some(ay)) = (FpPoly::reduce(&x.a, p), FpPoly::reduce(&y.a, p)) {
        if FpPoly::gcd(&ax, &ay, p).degree() <= 0 {
            return Ok(0);
        }
    }
    let bx = x.b.as_ref().expect("point piece");
    let mut basis_rows = Vec::with_capacity(2 * n);
    for i in 0..n {
        let xi = UniPoly::x().pow(i as u32);
        basis_rows.push(coords(&xi, n));
        basis_rows.push(coords(&bx.mul_mod(&xi, &x.a), n));
    }
    let order = echelon_zp(&basis_rows, p);
    let mut gens = vec![y.a.rem(&x.a)];
    match &y.b {
        Some(by) => {
            for h in integral_multipliers(&y.a, by, p) {
                let r = by.mul_mod(&h, &y.a);
                gens.push((&bx.mul_mod(&h, &x.a) - &r).rem(&x.a));
            }
        }
        None => {}
    }
    let mut j_rows = Vec::with_capacity(gens.len() * n);
    for g in &gens {
        for w in &order {
            j_rows.push(coords(&g.mul_mod(&from_coords(w), &x.a), n));
        }
    }
    let ideal = echelon_zp(&j_rows, p);
    if ideal.len() < n {
        return Err(Error::invalid("divisor supports meet on the generic fibre"));
    }
    Ok(echelon_index(&ideal, p) - echelon_index(&order, p))
}

/// `⟨∞, Y⟩_p` for a term with x-polynomial `a`; `sheets` is 1 for point terms
/// and 2 for fibre terms.
fn infinity_pair(a: &UniPoly, sheets: i64, p: &Integer) -> Rational {
    let s = negative_root_valuation_sum(&a.monic(), p);
    -s * Rational::from((sheets, 2))
}

/// `⟨X, zeros(C)⟩_p` for a point term `X` with x-polynomial `a`.
fn point_fibre_pair(a: &UniPoly, c: &UniPoly, p: &Integer) -> Result<Rational> {
    if !c.is_integral() || !c.is_monic() {
        return Err(Error::invalid(format!("fibre polynomial {c} must be monic and integral")));
    }
    let r = resultant(&a.monic(), c);
    let v = valuation(&r, p).ok_or_else(|| Error::invalid("divisor supports meet on the generic fibre"))?;
    let s = negative_root_valuation_sum(&a.monic(), p);
    Ok(Rational::from(v) - s * Rational::from(c.deg() as u64))
}

/// Horizontal part `⟨D̄, Ē⟩_p` on the plane model, exact in ℚ.
pub fn horizontal_intersection(
    d: &FormalDivisor,
    e: &FormalDivisor,
    curve: &HyperellipticCurve,
    p: &Integer,
    digits: i64,
) -> Result<Rational> {
    let mut digits = digits.max(8);
    let mut previous: Option<Rational> = None;
    for _ in 0..=MAX_DOUBLINGS {
        let (value, exact) = horizontal_at(d, e, curve, p, digits)?;
        if exact || previous.as_ref() == Some(&value) {
            return Ok(value);
        }
        previous = Some(value);
        digits *= 2;
    }
    Err(Error::PadicPrecision { prime: p.clone(), digits: digits as u32 })
}

fn horizontal_at(
    d: &FormalDivisor,
    e: &FormalDivisor,
    curve: &HyperellipticCurve,
    p: &Integer,
    digits: i64,
) -> Result<(Rational, bool)> {
    let g = curve.genus();
    let mut total = Rational::new();
    let mut exact = true;
    let mut split_cache: BTreeMap<(usize, usize), SplitTerm> = BTreeMap::new();
    let mut split = |side: usize, idx: usize, div: &FormalDivisor| -> Result<()> {
        if let std::collections::btree_map::Entry::Vacant(slot) = split_cache.entry((side, idx)) {
            let t = &div.terms[idx];
            let st = match &t.kind {
                TermKind::Point { a, b } => split_term(a, Some(b), g, p, digits)?,
                TermKind::Fibre { c } => split_term(c, None, g, p, digits)?,
            };
            slot.insert(st);
        }
        Ok(())
    };
    for i in 0..d.terms.len() {
        split(0, i, d)?;
    }
    for j in 0..e.terms.len() {
        split(1, j, e)?;
    }
    for (i, x) in d.terms.iter().enumerate() {
        for (j, y) in e.terms.iter().enumerate() {
            let w = Rational::from(&x.coefficient * &y.coefficient);
            let value = match (&x.kind, &y.kind) {
                (TermKind::Point { a, .. }, TermKind::Fibre { c }) => point_fibre_pair(a, c, p)?,
                (TermKind::Fibre { c }, TermKind::Point { a, .. }) => point_fibre_pair(a, c, p)?,
                (TermKind::Fibre { .. }, TermKind::Fibre { .. }) => {
                    return Err(Error::invalid("pairing of two fibre terms is not supported"));
                }
                (TermKind::Point { .. }, TermKind::Point { .. }) => {
                    let sx = &split_cache[&(0, i)];
                    let sy = &split_cache[&(1, j)];
                    exact &= sx.exact && sy.exact;
                    let mut len = 0i64;
                    if let (Some(px), Some(py)) = (&sx.finite, &sy.finite) {
                        len += point_point_length(px, py, p)?;
                    }
                    if let (Some(px), Some(py)) = (&sx.infinite, &sy.infinite) {
                        len += point_point_length(px, py, p)?;
                    }
                    Rational::from(len)
                }
            };
            total += w * value;
        }
    }
    for (inf, other) in [(&d.infinity_coefficient, e), (&e.infinity_coefficient, d)] {
        if *inf == 0 {
            continue;
        }
        if other.infinity_coefficient != 0 {
            return Err(Error::invalid("both divisors contain the point at infinity"));
        }
        for t in &other.terms {
            let sheets = if matches!(t.kind, TermKind::Fibre { .. }) { 2 } else { 1 };
            total += Rational::from(inf * &t.coefficient) * infinity_pair(t.x_poly(), sheets, p);
        }
    }
    Ok((total, exact))
}

/// One irreducible component of a special fibre.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Component {
    pub id: String,
    pub multiplicity: u32,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum IntegerField {
    Number(u64),
    Text(String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ReductionDataDocument {
    schema: u32,
    prime: IntegerField,
    components: Vec<Component>,
    matrix: Vec<i64>,
    infinity_component: String,
    #[serde(default)]
    assignments: BTreeMap<String, String>,
}

/// Special fibre of a regular model at one prime: components with
/// multiplicities, their intersection matrix, and which component each
/// divisor term meets.
///
/// Term identifiers are `D:i` and `E:i`, the `i`-th finite term of the
/// respective formal divisor; the point at infinity always lies on
/// `infinity_component`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionData {
    pub prime: Integer,
    pub components: Vec<Component>,
    pub intersection_matrix: Vec<Vec<i64>>,
    pub infinity_component: String,
    pub assignments: BTreeMap<String, String>,
}

/// Current reduction-data schema version.
pub const REDUCTION_SCHEMA: u32 = 1;

impl ReductionData {
    pub fn new(
        prime: Integer,
        components: Vec<Component>,
        intersection_matrix: Vec<Vec<i64>>,
        infinity_component: impl Into<String>,
        assignments: BTreeMap<String, String>,
    ) -> Result<Self> {
        let data = ReductionData {
            prime,
            components,
            intersection_matrix,
            infinity_component: infinity_component.into(),
            assignments,
        };
        data.validate()?;
        Ok(data)
    }

    /// Parse and validate a JSON document.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ReductionDataDocument =
            serde_json::from_str(text).map_err(|e| Error::ReductionData(e.to_string()))?;
        if doc.schema != REDUCTION_SCHEMA {
            return Err(Error::ReductionData(format!(
                "unsupported schema {} (expected {REDUCTION_SCHEMA})",
                doc.schema
            )));
        }
        let prime = match doc.prime {
            IntegerField::Number(n) => Integer::from(n),
            IntegerField::Text(s) => s
                .trim()
                .parse::<Integer>()
                .map_err(|e| Error::ReductionData(format!("prime {s:?}: {e}")))?,
        };
        let n = doc.components.len();
        if doc.matrix.len() != n * n {
            return Err(Error::ReductionData(format!(
                "matrix has {} entries, expected {n}×{n}",
                doc.matrix.len()
            )));
        }
        let matrix = doc.matrix.chunks(n.max(1)).map(|r| r.to_vec()).collect();
        Self::new(prime, doc.components, matrix, doc.infinity_component, doc.assignments)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::ReductionData(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        let doc = serde_json::json!({
            "schema": REDUCTION_SCHEMA,
            "prime": self.prime.to_string(),
            "components": self.components,
            "matrix": self.intersection_matrix.iter().flatten().collect::<Vec<_>>(),
            "infinity_component": self.infinity_component,
            "assignments": self.assignments,
        });
        serde_json::to_string_pretty(&doc).expect("serializable")
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.components.iter().position(|c| c.id == id)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::ReductionData(m));
        if self.prime < 2 || self.prime.is_probably_prime(30) == rug::integer::IsPrime::No {
            return bad(format!("{} is not prime", self.prime));
        }
        let n = self.components.len();
        if n == 0 {
            return bad("no components".into());
        }
        for (i, c) in self.components.iter().enumerate() {
            if c.multiplicity == 0 {
                return bad(format!("component {} has multiplicity 0", c.id));
            }
            if self.components[..i].iter().any(|o| o.id == c.id) {
                return bad(format!("duplicate component id {}", c.id));
            }
        }
        let m = &self.intersection_matrix;
        if m.len() != n || m.iter().any(|r| r.len() != n) {
            return bad(format!("intersection matrix must be {n}×{n}"));
        }
        for i in 0..n {
            for j in 0..i {
                if m[i][j] != m[j][i] {
                    return bad(format!("intersection matrix not symmetric at ({i}, {j})"));
                }
            }
            let s: i64 = (0..n).map(|j| m[i][j] * self.components[j].multiplicity as i64).sum();
            if s != 0 {
                return bad(format!("row {i} of M·multiplicities is {s}, not 0"));
            }
        }
        let qm: Vec<Vec<Rational>> = m.iter().map(|r| r.iter().map(|&v| Rational::from(v)).collect()).collect();
        if rank_rational(&qm) + 1 != n {
            return bad(format!("intersection matrix must have rank {}", n - 1));
        }
        if self.index_of(&self.infinity_component).is_none() {
            return bad(format!("unknown infinity component {}", self.infinity_component));
        }
        for (term, comp) in &self.assignments {
            if self.index_of(comp).is_none() {
                return bad(format!("term {term} is assigned to unknown component {comp}"));
            }
            if parse_term_id(term).is_none() {
                return bad(format!("term identifier {term:?} is not of the form D:i or E:i"));
            }
        }
        Ok(())
    }
}

fn parse_term_id(s: &str) -> Option<(char, usize)> {
    let (side, idx) = s.split_once(':')?;
    let side = match side {
        "D" => 'D',
        "E" => 'E',
        _ => return None,
    };
    Some((side, idx.parse().ok()?))
}

/// `φ · e_incidence`, where `M·φ = −d_incidence` and `φ` vanishes on the
/// component containing infinity.
pub fn phi_correction(data: &ReductionData, d_incidence: &[Rational], e_incidence: &[Rational]) -> Result<Rational> {
    let n = data.components.len();
    if d_incidence.len() != n || e_incidence.len() != n {
        return Err(Error::ReductionData("incidence vector length does not match the components".into()));
    }
    let weighted: Rational = d_incidence
        .iter()
        .zip(&data.components)
        .map(|(d, c)| Rational::from(d * c.multiplicity))
        .sum();
    if weighted != 0 {
        return Err(Error::ReductionData(format!(
            "incidence of D has total fibre degree {weighted}, not 0"
        )));
    }
    if n == 1 {
        return Ok(Rational::new());
    }
    let inf = data.index_of(&data.infinity_component).expect("validated");
    let keep: Vec<usize> = (0..n).filter(|&i| i != inf).collect();
    let m: Vec<Vec<Rational>> = keep
        .iter()
        .map(|&i| keep.iter().map(|&j| Rational::from(data.intersection_matrix[i][j])).collect())
        .collect();
    let rhs: Vec<Rational> = keep.iter().map(|&i| -d_incidence[i].clone()).collect();
    let phi = solve_rational(&m, &rhs)
        .ok_or_else(|| Error::ReductionData("intersection matrix is singular off the infinity component".into()))?;
    Ok(keep.iter().zip(phi).map(|(&i, v)| v * &e_incidence[i]).sum())
}

/// Intersection of each fibre component with the closure of `divisor`, whose
/// terms are labelled `side:i` in the assignments.
pub fn component_incidence(divisor: &FormalDivisor, side: char, data: &ReductionData) -> Result<Vec<Rational>> {
    let n = data.components.len();
    let mut out = vec![Rational::new(); n];
    let inf = data.index_of(&data.infinity_component).expect("validated");
    out[inf] += Rational::from(&divisor.infinity_coefficient / data.components[inf].multiplicity);
    for (i, t) in divisor.terms.iter().enumerate() {
        let id = format!("{side}:{i}");
        let j = if n == 1 {
            0
        } else {
            let comp = data.assignments.get(&id).ok_or_else(|| Error::MissingReductionData {
                prime: data.prime.clone(),
                reason: format!("no component assigned to term {id} ({t})"),
            })?;
            data.index_of(comp).expect("validated")
        };
        let deg = Rational::from(&t.coefficient * t.point_count() as u64);
        out[j] += deg / data.components[j].multiplicity;
    }
    Ok(out)
}

/// `⟨D̄ + Φ(D), Ē⟩_p` split into its horizontal and fibral parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalPairing {
    pub prime: Integer,
    pub horizontal: Rational,
    pub fibral: Rational,
    pub total: Rational,
}

impl fmt::Display for LocalPairing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p = {}: {} + {} = {}", self.prime, self.horizontal, self.fibral, self.total)
    }
}

/// Local non-Archimedean pairing at `prime`.
///
/// Where the plane model is regular, or where one of the divisors avoids every
/// non-regular point, the fibral term is zero and the horizontal term is read
/// on the plane model. Otherwise reduction data must be supplied.
pub fn local_nonarch_pairing(
    curve: &HyperellipticCurve,
    d: &FormalDivisor,
    e: &FormalDivisor,
    prime: &Integer,
    data: Option<&ReductionData>,
    digits: i64,
) -> Result<LocalPairing> {
    if let Some(rd) = data {
        if rd.prime != *prime {
            return Err(Error::ReductionData(format!("data is for p = {}, not {prime}", rd.prime)));
        }
    }
    let horizontal = horizontal_intersection(d, e, curve, prime, digits)?;
    let fibral = match data {
        Some(rd) => phi_correction(rd, &component_incidence(d, 'D', rd)?, &component_incidence(e, 'E', rd)?)?,
        None => {
            let bad = non_regular_points(curve, prime);
            if !bad.is_empty() && divisor_hits(d, &bad) && divisor_hits(e, &bad) {
                return Err(Error::MissingReductionData {
                    prime: prime.clone(),
                    reason: "both divisors meet a point where the plane model is not regular".into(),
                });
            }
            Rational::new()
        }
    };
    let total = Rational::from(&horizontal + &fibral);
    Ok(LocalPairing { prime: prime.clone(), horizontal, fibral, total })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve_mumford::{construct_e, DivisorTerm, MumfordDivisor};

    fn q(v: i64) -> Rational {
        Rational::from(v)
    }

    fn genus3() -> HyperellipticCurve {
        HyperellipticCurve::from_ints(&[25, -13, 11, -15, 0, 0, 0, 1]).unwrap()
    }

    fn point_term(x: i64, y: i64, c: i64) -> DivisorTerm {
        DivisorTerm::point(UniPoly::linear_root(&q(x)), UniPoly::constant(q(y)), q(c))
    }

    #[test]
    fn opposite_points_meet_over_six() {
        let c = genus3();
        let d = FormalDivisor { terms: vec![point_term(1, 3, 1)], infinity_coefficient: q(0) };
        let e = FormalDivisor { terms: vec![point_term(1, -3, 1)], infinity_coefficient: q(0) };
        for (p, v) in [(2, 1), (3, 1), (5, 0), (7, 0)] {
            let h = horizontal_intersection(&d, &e, &c, &Integer::from(p), 20).unwrap();
            assert_eq!(h, v, "p = {p}");
        }
    }

    #[test]
    fn min_rule_examples() {
        let c = genus3();
        let d = FormalDivisor { terms: vec![point_term(1, 3, 1)], infinity_coefficient: q(0) };
        let e = FormalDivisor { terms: vec![point_term(1, -3, 1)], infinity_coefficient: q(0) };
        for (p, v) in [(3, 1), (2, 1), (5, 0)] {
            let p = Integer::from(p);
            let x = &split_padic(&d, &p, 10).unwrap()[0];
            let y = &split_padic(&e, &p, 10).unwrap()[0];
            assert_eq!(horizontal_pair(x, y, &p, &c).unwrap(), v);
        }
        let x = &split_padic(&d, &Integer::from(3), 10).unwrap()[0];
        assert!(norm_on_divisor(&UniPoly::linear_root(&q(1)), &UniPoly::zero(), x, &c).is_none());
    }

    #[test]
    fn split_examples() {
        let div = FormalDivisor {
            terms: vec![DivisorTerm::fibre(UniPoly::from_ints(&[-1, 0, 1]), q(1))],
            infinity_coefficient: q(0),
        };
        assert_eq!(split_padic(&div, &Integer::from(3), 10).unwrap().len(), 2);
        let div = FormalDivisor {
            terms: vec![DivisorTerm::fibre(UniPoly::from_ints(&[-3, 0, 1]), q(1))],
            infinity_coefficient: q(0),
        };
        assert_eq!(split_padic(&div, &Integer::from(3), 10).unwrap().len(), 1);
    }

    #[test]
    fn two_component_fixture() {
        let data = ReductionData::from_json(
            r#"{"schema":1,"prime":3,
                "components":[{"id":"A","multiplicity":1},{"id":"B","multiplicity":1}],
                "matrix":[-2,2,2,-2],"infinity_component":"A",
                "assignments":{"D:0":"B","E:0":"B"}}"#,
        )
        .unwrap();
        let v = phi_correction(&data, &[q(-1), q(1)], &[q(-1), q(1)]).unwrap();
        assert_eq!(v, Rational::from((1, 2)));
        let d = FormalDivisor { terms: vec![point_term(1, 3, 1)], infinity_coefficient: q(-1) };
        assert_eq!(component_incidence(&d, 'D', &data).unwrap(), vec![q(-1), q(1)]);
    }

    #[test]
    fn reduction_data_rejects_bad_documents() {
        let base = r#"{"schema":1,"prime":3,"components":[{"id":"A","multiplicity":1}],"matrix":[0],"infinity_component":"A","assignments":{}"#;
        assert!(ReductionData::from_json(&format!("{base}}}")).is_ok());
        assert!(ReductionData::from_json(&format!("{base},\"extra\":1}}")).is_err());
        assert!(ReductionData::from_json(&base.replace("\"schema\":1", "\"schema\":2").to_string().replace("{}", "{}}")).is_err());
        let asym = r#"{"schema":1,"prime":3,"components":[{"id":"A","multiplicity":1},{"id":"B","multiplicity":1}],"matrix":[-2,2,1,-2],"infinity_component":"A"}"#;
        assert!(ReductionData::from_json(asym).is_err());
    }

    #[test]
    fn regularity_of_genus3_model() {
        let c = genus3();
        let fac = crate::exact_algebra::factor_integer(c.discriminant(), std::time::Duration::from_secs(10)).unwrap();
        for p in fac.primes().chain(std::iter::once(&Integer::from(2))) {
            let _ = non_regular_points(&c, p);
        }
        let d = MumfordDivisor::from_point(&q(1), &q(3), &c).unwrap();
        let e = construct_e(&d, &q(0), &c).unwrap();
        let pair = local_nonarch_pairing(&c, &d.to_formal(), &e, &Integer::from(5), None, 20).unwrap();
        assert_eq!(pair.fibral, 0);
    }
}
