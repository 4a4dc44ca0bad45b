//! Assembly of the local pairings into the canonical height.

use std::collections::BTreeMap;
use std::thread;
use std::time::Duration;

use rug::{Complex, Float, Integer, Rational};
use serde_json::{json, Value};

use crate::curve_mumford::{
    cantor_add, cantor_sub, choose_lambda, construct_e, construct_residual_e, ensure_weierstrass_free, has_weierstrass_support, small_integers,
    FormalDivisor, HyperellipticCurve, MumfordDivisor, TermKind, MAX_MULTIPLIER,
};
use crate::error::{Error, Result, StepContext};
use crate::local_intersections::{
    divisor_hits, local_nonarch_pairing, non_regular_points, NonRegularPoint, ReductionData, DEFAULT_PADIC_DIGITS,
};
use crate::exact_algebra::{factor_integer, DEFAULT_FACTOR_BUDGET};
use crate::place_select::{candidate_places_with_budget, PlaceReport};
use crate::riemann_theta::{
    archimedean_pairing, eval_poly, homology_and_periods, polynomial_roots, ArchimedeanOptions, CurvePoint,
    PeriodData, Precision,
};

pub const DEFAULT_DIGITS: u32 = 40;

/// Admissible `λ` tried before giving up on avoiding non-regular points.
const LAMBDA_TRIES: usize = 8;
/// Shifts `τ` tried for the residual construction, per `λ`.
const TAU_TRIES: usize = 9;
/// Factorization budget while comparing choices of `E`.
const TRIAL_BUDGET: Duration = Duration::from_secs(2);
/// Choices of `E` whose factorization may stall before settling for the first.
const MAX_TRIALS: usize = 12;

#[derive(Clone, Debug)]
pub struct HeightOptions {
    pub precision: Precision,
    /// Reduction data keyed by prime.
    pub reduction_data: BTreeMap<Integer, ReductionData>,
    /// Offsets the choice of `λ` and seeds the auxiliary points.
    pub seed: u64,
    pub padic_digits: i64,
    /// Time allowed for each integer factorization.
    pub factor_budget: Duration,
}

impl HeightOptions {
    pub fn new(digits: u32) -> Result<Self> {
        Ok(HeightOptions {
            precision: Precision::new(digits)?,
            reduction_data: BTreeMap::new(),
            seed: 0,
            padic_digits: DEFAULT_PADIC_DIGITS,
            factor_budget: DEFAULT_FACTOR_BUDGET,
        })
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_reduction_data(mut self, data: ReductionData) -> Self {
        self.reduction_data.insert(data.prime.clone(), data);
        self
    }
}

impl Default for HeightOptions {
    fn default() -> Self {
        Self::new(DEFAULT_DIGITS).expect("default precision is valid")
    }
}

/// Contribution of one prime: `log p · (horizontal + fibral)`.
#[derive(Clone, Debug)]
pub struct LocalTerm {
    pub prime: Integer,
    pub horizontal: Rational,
    pub fibral: Rational,
    pub weight: Float,
}

#[derive(Clone, Debug)]
pub struct HeightBreakdown {
    pub curve_id: String,
    pub divisor_description: String,
    pub multiplier: u32,
    /// `E` as used, or `None` for a torsion class.
    pub e_description: Option<String>,
    pub local_terms: Vec<LocalTerm>,
    /// `−½ g_E(D)`.
    pub archimedean_term: Float,
    pub total_height: Float,
    pub precision_used: Precision,
}

impl HeightBreakdown {
    /// JSON form; rationals and reals are strings, reals at full working precision.
    pub fn to_json(&self) -> Value {
        let digits = Some(self.precision_used.working_digits() as usize);
        self.to_json_with(|x| x.to_string_radix(10, digits))
    }

    /// JSON form with reals rendered by `real`.
    pub fn to_json_with(&self, real: impl Fn(&Float) -> String) -> Value {
        json!({
            "curve_id": self.curve_id,
            "divisor": self.divisor_description,
            "multiplier": self.multiplier,
            "e": self.e_description,
            "local_terms": self.local_terms.iter().map(|t| json!({
                "prime": t.prime.to_string(),
                "horizontal": t.horizontal.to_string(),
                "fibral": t.fibral.to_string(),
                "weight": real(&t.weight),
            })).collect::<Vec<_>>(),
            "archimedean_term": real(&self.archimedean_term),
            "total_height": real(&self.total_height),
            "precision": {"digits": self.precision_used.digits, "guard": self.precision_used.guard},
        })
    }
}

/// The curve with its period data, reused across several heights.
pub struct HeightContext<'a> {
    pub curve: &'a HyperellipticCurve,
    pub periods: PeriodData,
    pub options: HeightOptions,
}

impl<'a> HeightContext<'a> {
    pub fn new(curve: &'a HyperellipticCurve, options: HeightOptions) -> Result<Self> {
        let periods = homology_and_periods(curve, options.precision).step("period matrix")?;
        Ok(HeightContext { curve, periods, options })
    }

    pub fn height(&self, d: &MumfordDivisor) -> Result<HeightBreakdown> {
        let Selection { divisor: dm, multiplier: n, e, places } = select_auxiliary(self.curve, d, &self.options)?;
        let prec = self.options.precision;
        let bits = prec.bits();
        let Some(e) = e else {
            return Ok(HeightBreakdown {
                curve_id: self.curve.id(),
                divisor_description: d.to_string(),
                multiplier: n,
                e_description: None,
                local_terms: Vec::new(),
                archimedean_term: Float::new(bits),
                total_height: Float::new(bits),
                precision_used: prec,
            });
        };
        self.assemble(d, &dm, n, &e, places)
    }

    /// Height of `D` from a chosen multiple `n·D` and divisor `E ∼ −n·D`.
    pub fn height_with_e(&self, d: &MumfordDivisor, multiple: &MumfordDivisor, n: u32, e: &FormalDivisor) -> Result<HeightBreakdown> {
        let places =
            candidate_places_with_budget(self.curve, multiple, e, self.options.factor_budget).step("candidate places")?;
        self.assemble(d, multiple, n, e, places)
    }

    fn assemble(
        &self,
        d: &MumfordDivisor,
        dm: &MumfordDivisor,
        n: u32,
        e: &FormalDivisor,
        places: Vec<PlaceReport>,
    ) -> Result<HeightBreakdown> {
        let prec = self.options.precision;
        let bits = prec.bits();
        let d_formal = dm.to_formal();

        let d_pts = complex_points(&d_formal, self.curve, bits).step("archimedean pairing")?;
        let e_pts = complex_points(e, self.curve, bits).step("archimedean pairing")?;
        let arch_opts = ArchimedeanOptions { seed: self.options.seed };
        let (locals, arch) = thread::scope(|s| {
            let arch = s.spawn(|| archimedean_pairing(&d_pts, &e_pts, &self.periods, arch_opts));
            let handles: Vec<_> = places
                .iter()
                .map(|pl| {
                    let (d_formal, e) = (&d_formal, e);
                    s.spawn(move || {
                        local_nonarch_pairing(
                            self.curve,
                            d_formal,
                            e,
                            &pl.prime,
                            self.options.reduction_data.get(&pl.prime),
                            self.options.padic_digits,
                        )
                    })
                })
                .collect();
            let locals: Vec<_> = handles.into_iter().map(|h| h.join().expect("local pairing thread")).collect();
            (locals, arch.join().expect("archimedean thread"))
        });

        let mut total = Float::new(bits);
        let mut local_terms = Vec::with_capacity(locals.len());
        for lp in locals {
            let lp = lp.step("local non-archimedean pairing")?;
            let weight = Float::with_val(bits, &lp.prime).ln();
            total += Float::with_val(bits, &lp.total) * &weight;
            local_terms.push(LocalTerm { prime: lp.prime, horizontal: lp.horizontal, fibral: lp.fibral, weight });
        }
        let archimedean_term = -arch.step("archimedean pairing")?;
        total += &archimedean_term;
        total /= n * n;
        Ok(HeightBreakdown {
            curve_id: self.curve.id(),
            divisor_description: d.to_string(),
            multiplier: n,
            e_description: Some(e.to_string()),
            local_terms,
            archimedean_term,
            total_height: total,
            precision_used: prec,
        })
    }
}

/// The multiple of `D` and the divisor `E` a height computation works with.
#[derive(Clone, Debug)]
pub struct Selection {
    pub divisor: MumfordDivisor,
    pub multiplier: u32,
    /// `None` for a torsion class.
    pub e: Option<FormalDivisor>,
    pub places: Vec<PlaceReport>,
}

/// Smallest multiple `n·D` that is free of Weierstrass points and admits an
/// acceptable `E` whose candidate places factor within a short budget.
/// Without any acceptable `E`, the first Weierstrass-free multiple is used
/// with the plain `E`, so that the local step reports the missing data.
pub fn select_auxiliary(curve: &HyperellipticCurve, d: &MumfordDivisor, options: &HeightOptions) -> Result<Selection> {
    let (first, n0) = ensure_weierstrass_free(d, curve).step("Weierstrass-free multiple")?;
    if first.is_identity() {
        return Ok(Selection { divisor: first, multiplier: n0, e: None, places: Vec::new() });
    }
    let mut bad = vec![Integer::from(2)];
    for p in factor_integer(curve.discriminant(), options.factor_budget).step("candidate places")?.primes() {
        if !bad.contains(p) {
            bad.push(p.clone());
        }
    }
    let nonregular: Vec<_> = bad
        .iter()
        .filter(|p| !options.reduction_data.contains_key(*p))
        .map(|p| non_regular_points(curve, p))
        .filter(|pts| !pts.is_empty())
        .collect();

    let mut stalled: Option<(MumfordDivisor, u32, FormalDivisor)> = None;
    let mut trials = 0;
    let mut acc = first.clone();
    'outer: for n in n0..=MAX_MULTIPLIER {
        if acc.is_identity() {
            return Ok(Selection { divisor: acc, multiplier: n, e: None, places: Vec::new() });
        }
        if !has_weierstrass_support(&acc, curve) {
            for e in e_candidates(curve, &acc, &nonregular, options).step("construction of E")? {
                match candidate_places_with_budget(curve, &acc, &e, TRIAL_BUDGET) {
                    Ok(places) => return Ok(Selection { divisor: acc, multiplier: n, e: Some(e), places }),
                    Err(Error::FactorizationBudget { .. }) => {
                        stalled.get_or_insert_with(|| (acc.clone(), n, e.clone()));
                        trials += 1;
                        if trials >= MAX_TRIALS {
                            break 'outer;
                        }
                    }
                    Err(other) => return Err(other).step("candidate places"),
                }
            }
        }
        acc = cantor_add(&acc, d, curve);
    }
    let (divisor, multiplier, e) = match stalled {
        Some(s) => s,
        None => {
            let l = choose_lambda(&first, curve, options.seed);
            let e = construct_e(&first, &l, curve).step("construction of E")?;
            (first, n0, e)
        }
    };
    let places = candidate_places_with_budget(curve, &divisor, &e, options.factor_budget).step("candidate places")?;
    Ok(Selection { divisor, multiplier, e: Some(e), places })
}

/// Divisors `E ∼ −D` that, at every prime without reduction data, avoid the
/// non-regular points of the plane model wherever `D` meets them; plain
/// constructions first, then residual ones.
fn e_candidates(
    curve: &HyperellipticCurve,
    d: &MumfordDivisor,
    nonregular: &[Vec<NonRegularPoint>],
    options: &HeightOptions,
) -> Result<Vec<FormalDivisor>> {
    let d_formal = d.to_formal();
    let hit: Vec<_> = nonregular.iter().filter(|pts| divisor_hits(&d_formal, pts)).collect();
    let acceptable = |e: &FormalDivisor| hit.iter().all(|pts| !divisor_hits(e, pts));

    let lambdas: Vec<Rational> = small_integers()
        .map(Rational::from)
        .filter(|l| d.a().eval(l) != 0 && curve.f().eval(l) != 0)
        .skip((options.seed % 8) as usize)
        .take(LAMBDA_TRIES)
        .collect();
    let mut out = Vec::new();
    for l in &lambdas {
        let e = construct_e(d, l, curve)?;
        if acceptable(&e) {
            out.push(e);
        }
    }
    for l in &lambdas {
        for tau in small_integers().take(TAU_TRIES) {
            if let Ok(e) = construct_residual_e(d, &Rational::from(tau), l, curve) {
                if acceptable(&e) {
                    out.push(e);
                }
            }
        }
    }
    Ok(out)
}

/// Geometric points of a formal divisor over ℂ with their coefficients.
fn complex_points(div: &FormalDivisor, curve: &HyperellipticCurve, bits: u32) -> Result<Vec<(CurvePoint, Rational)>> {
    let mut out = Vec::new();
    for t in &div.terms {
        let roots = polynomial_roots(t.x_poly().coeffs(), bits);
        for r in roots {
            match &t.kind {
                TermKind::Point { b, .. } => {
                    let y = eval_poly(b, &r);
                    out.push((CurvePoint::affine(r, y), t.coefficient.clone()));
                }
                TermKind::Fibre { .. } => {
                    let y = Complex::with_val(bits, eval_poly(curve.f(), &r).sqrt_ref());
                    out.push((CurvePoint::affine(r.clone(), -y.clone()), t.coefficient.clone()));
                    out.push((CurvePoint::affine(r, y), t.coefficient.clone()));
                }
            }
        }
    }
    if div.infinity_coefficient != 0 {
        out.push((CurvePoint::Infinity, div.infinity_coefficient.clone()));
    }
    Ok(out)
}

/// Canonical height of `D`.
pub fn neron_tate_height(curve: &HyperellipticCurve, d: &MumfordDivisor, options: &HeightOptions) -> Result<HeightBreakdown> {
    if d.is_identity() {
        return Err(Error::invalid("the identity divisor has no height to compute"));
    }
    HeightContext::new(curve, options.clone())?.height(d)
}

impl HeightContext<'_> {
    /// `ĥ(D)`, zero for the identity.
    pub fn height_value(&self, d: &MumfordDivisor) -> Result<Float> {
        if d.is_identity() {
            return Ok(Float::new(self.options.precision.bits()));
        }
        Ok(self.height(d)?.total_height)
    }

    pub fn pairing(&self, d1: &MumfordDivisor, d2: &MumfordDivisor) -> Result<Float> {
        let sum = cantor_add(d1, d2, self.curve);
        let mut v = self.height_value(&sum)?;
        v -= self.height_value(d1)?;
        v -= self.height_value(d2)?;
        Ok(v / 2u32)
    }

    pub fn parallelogram_residual(&self, d: &MumfordDivisor, e: &MumfordDivisor) -> Result<Float> {
        let mut v = Float::with_val(self.options.precision.bits(), self.height_value(d)? + self.height_value(e)?) * 2u32;
        v -= self.height_value(&cantor_add(d, e, self.curve))?;
        v -= self.height_value(&cantor_sub(d, e, self.curve))?;
        Ok(v.abs())
    }

    /// Gram matrix of the height pairing on `points`.
    pub fn gram(&self, points: &[MumfordDivisor]) -> Result<Vec<Vec<Float>>> {
        let n = points.len();
        let h: Vec<Float> = points.iter().map(|p| self.height_value(p)).collect::<Result<_>>()?;
        let mut m = vec![vec![Float::new(self.options.precision.bits()); n]; n];
        for i in 0..n {
            m[i][i] = h[i].clone();
            for j in 0..i {
                let s = self.height_value(&cantor_add(&points[i], &points[j], self.curve))?;
                let v = (s - &h[i] - &h[j]) / 2u32;
                m[i][j] = v.clone();
                m[j][i] = v;
            }
        }
        Ok(m)
    }

    pub fn regulator(&self, points: &[MumfordDivisor]) -> Result<Float> {
        if points.is_empty() {
            return Err(Error::invalid("the regulator needs at least one point"));
        }
        Ok(determinant(self.gram(points)?))
    }
}

fn check_nonidentity(ds: &[&MumfordDivisor]) -> Result<()> {
    if ds.iter().any(|d| d.is_identity()) {
        return Err(Error::invalid("the identity divisor has no height to compute"));
    }
    Ok(())
}

/// `½ (ĥ(D1 + D2) − ĥ(D1) − ĥ(D2))`.
pub fn height_pairing(
    curve: &HyperellipticCurve,
    d1: &MumfordDivisor,
    d2: &MumfordDivisor,
    options: &HeightOptions,
) -> Result<Float> {
    check_nonidentity(&[d1, d2])?;
    HeightContext::new(curve, options.clone())?.pairing(d1, d2)
}

/// `|2ĥ(D) + 2ĥ(E) − ĥ(D + E) − ĥ(D − E)|`.
pub fn parallelogram_residual(
    curve: &HyperellipticCurve,
    d: &MumfordDivisor,
    e: &MumfordDivisor,
    options: &HeightOptions,
) -> Result<Float> {
    check_nonidentity(&[d, e])?;
    HeightContext::new(curve, options.clone())?.parallelogram_residual(d, e)
}

/// Determinant of the Gram matrix of the height pairing.
pub fn regulator(curve: &HyperellipticCurve, points: &[MumfordDivisor], options: &HeightOptions) -> Result<Float> {
    check_nonidentity(&points.iter().collect::<Vec<_>>())?;
    HeightContext::new(curve, options.clone())?.regulator(points)
}

/// Gaussian elimination with partial pivoting.
pub fn determinant(mut m: Vec<Vec<Float>>) -> Float {
    let n = m.len();
    let bits = m.first().and_then(|r| r.first()).map_or(64, |v| v.prec());
    let mut det = Float::with_val(bits, 1);
    for c in 0..n {
        let p = (c..n)
            .max_by(|&i, &j| m[i][c].clone().abs().partial_cmp(&m[j][c].clone().abs()).unwrap())
            .unwrap();
        if m[p][c].is_zero() {
            return Float::new(bits);
        }
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        det *= &m[c][c];
        for r in c + 1..n {
            let f = Float::with_val(bits, &m[r][c] / &m[c][c]);
            for k in c..n {
                let t = Float::with_val(bits, &f * &m[c][k]);
                m[r][k] -= t;
            }
        }
    }
    det
}
