//! The finite set of primes outside which the local pairing `⟨D̄ + Φ(D), Ē⟩_p`
//! vanishes, read off from integer resultants of the plane model.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::time::Duration;

use rug::{Integer, Rational};
use serde::Serialize;

use crate::curve_mumford::{FormalDivisor, HyperellipticCurve, MumfordDivisor, TermKind};
use crate::error::Result;
use crate::exact_algebra::{factor_integer, resultant, UniPoly, DEFAULT_FACTOR_BUDGET};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PlaceReason {
    BadReduction,
    SupportCollision,
    Denominator,
}

impl fmt::Display for PlaceReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PlaceReason::BadReduction => "BAD_REDUCTION",
            PlaceReason::SupportCollision => "SUPPORT_COLLISION",
            PlaceReason::Denominator => "DENOMINATOR",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlaceReport {
    pub prime: Integer,
    pub reasons: BTreeSet<PlaceReason>,
}

impl Serialize for PlaceReport {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("PlaceReport", 2)?;
        st.serialize_field("prime", &self.prime.to_string())?;
        st.serialize_field("reasons", &self.reasons)?;
        st.end()
    }
}

/// Accumulates integers whose prime divisors are candidate places.
struct Collector {
    budget: Duration,
    places: BTreeMap<Integer, BTreeSet<PlaceReason>>,
}

impl Collector {
    fn add(&mut self, n: &Integer, reason: PlaceReason) -> Result<()> {
        let n = Integer::from(n.abs_ref());
        if n <= 1 {
            return Ok(());
        }
        for (p, _) in factor_integer(&n, self.budget)?.factors {
            self.places.entry(p).or_default().insert(reason);
        }
        Ok(())
    }

    fn add_rational(&mut self, x: &Rational, reason: PlaceReason) -> Result<()> {
        self.add(x.numer(), reason)?;
        self.add(x.denom(), reason)
    }

    fn add_denominators(&mut self, f: &UniPoly) -> Result<()> {
        self.add(&f.denominator(), PlaceReason::Denominator)
    }
}

/// Integer-normalized (primitive) version of `f`.
fn integral(f: &UniPoly) -> UniPoly {
    if f.is_constant() {
        UniPoly::one()
    } else {
        f.primitive()
    }
}

/// Candidate places for `⟨D̄ + Φ(D), Ē⟩`, sorted by prime.
pub fn candidate_places(
    curve: &HyperellipticCurve,
    d: &MumfordDivisor,
    e: &FormalDivisor,
) -> Result<Vec<PlaceReport>> {
    candidate_places_with_budget(curve, d, e, DEFAULT_FACTOR_BUDGET)
}

pub fn candidate_places_with_budget(
    curve: &HyperellipticCurve,
    d: &MumfordDivisor,
    e: &FormalDivisor,
    budget: Duration,
) -> Result<Vec<PlaceReport>> {
    let mut c = Collector { budget, places: BTreeMap::new() };
    c.add(&Integer::from(2), PlaceReason::BadReduction)?;
    c.add(curve.discriminant(), PlaceReason::BadReduction)?;

    let d_blocks = d.blocks();
    for (a, b, _) in &d_blocks {
        c.add_denominators(a)?;
        c.add_denominators(b)?;
    }
    for t in &e.terms {
        match &t.kind {
            TermKind::Point { a, b } => {
                c.add_denominators(a)?;
                c.add_denominators(b)?;
            }
            TermKind::Fibre { c: poly } => c.add_denominators(poly)?,
        }
    }

    for (ax, bx, _) in &d_blocks {
        for t in &e.terms {
            match &t.kind {
                TermKind::Point { a: ay, b: by } => collision_point(&mut c, ax, bx, ay, by)?,
                TermKind::Fibre { c: cy } => {
                    let r = resultant(&integral(ax), &integral(cy));
                    c.add_rational(&r, PlaceReason::SupportCollision)?;
                }
            }
        }
    }
    Ok(c.places
        .into_iter()
        .map(|(prime, reasons)| PlaceReport { prime, reasons })
        .collect())
}

fn collision_point(c: &mut Collector, ax: &UniPoly, bx: &UniPoly, ay: &UniPoly, by: &UniPoly) -> Result<()> {
    let g = UniPoly::gcd(ax, ay);
    let sc = PlaceReason::SupportCollision;
    if g.degree() <= 0 {
        return c.add_rational(&resultant(&integral(ax), &integral(ay)), sc);
    }
    // common x-coordinates: the pieces off the shared factor meet like coprime
    // pairs, while on it the y-values separate except over Res(g, b_X − b_Y)
    let u = ax.exact_div(&g);
    let w = ay.exact_div(&g);
    c.add_rational(&resultant(&integral(&u), &integral(ay)), sc)?;
    c.add_rational(&resultant(&integral(&g), &integral(&w)), sc)?;
    if g.deg() > 1 {
        c.add_rational(&integral(&g).discriminant(), sc)?;
        c.add(&integral(&g).lc().numer().clone(), sc)?;
    }
    let diff = bx - by;
    let (content, _) = diff.primitive_part();
    c.add_rational(&content, sc)?;
    c.add_rational(&resultant(&integral(&g), &integral(&diff)), sc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve_mumford::construct_e;

    #[test]
    fn genus3_single_point() {
        let curve = HyperellipticCurve::from_ints(&[25, -13, 11, -15, 0, 0, 0, 1]).unwrap();
        let d = MumfordDivisor::from_point(&Rational::from(1), &Rational::from(3), &curve).unwrap();
        let e = construct_e(&d, &Rational::new(), &curve).unwrap();
        let places = candidate_places(&curve, &d, &e).unwrap();
        let find = |p: u32| places.iter().find(|r| r.prime == p).map(|r| r.reasons.clone());
        assert!(find(2).unwrap().contains(&PlaceReason::SupportCollision));
        assert!(find(3).unwrap().contains(&PlaceReason::SupportCollision));
        for r in &places {
            assert!(!r.reasons.is_empty());
            if !r.reasons.contains(&PlaceReason::SupportCollision) {
                assert!(r.prime == 2 || curve.discriminant().is_divisible(&r.prime));
            }
        }
    }
}
