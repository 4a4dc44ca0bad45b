use std::time::{Duration, Instant};

use rug::integer::IsPrime;
use rug::{Integer, Rational};

use super::ecm::ecm_factor;
use crate::error::{Error, Result};

pub const DEFAULT_FACTOR_BUDGET: Duration = Duration::from_secs(30);
const TRIAL_LIMIT: u32 = 1_000_000;
/// Time given to Pollard rho on each composite before switching to ECM.
const RHO_SLICE: Duration = Duration::from_millis(300);

/// `|n| = ∏ p^e`, with the sign of `n` kept separately.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegerFactorization {
    pub negative: bool,
    pub factors: Vec<(Integer, u32)>,
}

impl IntegerFactorization {
    pub fn primes(&self) -> impl Iterator<Item = &Integer> {
        self.factors.iter().map(|(p, _)| p)
    }
}

fn is_prime(n: &Integer) -> bool {
    n.is_probably_prime(30) != IsPrime::No
}

/// Factor a nonzero integer: trial division up to 10⁶, then Pollard rho with
/// Brent's cycle detection, then ECM until `budget` runs out.
pub fn factor_integer(n: &Integer, budget: Duration) -> Result<IntegerFactorization> {
    if *n == 0 {
        return Err(Error::invalid("cannot factor 0"));
    }
    let start = Instant::now();
    let negative = *n < 0;
    let mut m = Integer::from(n.abs_ref());
    let mut found: Vec<(Integer, u32)> = Vec::new();

    let push = |found: &mut Vec<(Integer, u32)>, p: Integer, e: u32| {
        if let Some(slot) = found.iter_mut().find(|(q, _)| *q == p) {
            slot.1 += e;
        } else {
            found.push((p, e));
        }
    };

    let mut d = 2u32;
    while d <= TRIAL_LIMIT && Integer::from(d) * d <= m {
        if m.is_divisible_u(d) {
            let mut e = 0;
            while m.is_divisible_u(d) {
                m /= d;
                e += 1;
            }
            push(&mut found, Integer::from(d), e);
        }
        d += if d == 2 { 1 } else { 2 };
    }

    let mut stack = Vec::new();
    if m > 1 {
        stack.push(m);
    }
    while let Some(c) = stack.pop() {
        if c == 1 {
            continue;
        }
        if is_prime(&c) {
            push(&mut found, c, 1);
            continue;
        }
        if let Some(r) = perfect_power_root(&c) {
            let (base, k) = r;
            for _ in 0..k {
                stack.push(base.clone());
            }
            continue;
        }
        let deadline = start + budget;
        let rho_until = deadline.min(Instant::now() + RHO_SLICE);
        match pollard_brent(&c, rho_until).or_else(|| ecm_factor(&c, deadline)) {
            Some(f) => {
                let g = Integer::from(&c / &f);
                stack.push(f);
                stack.push(g);
            }
            None => {
                found.sort();
                let mut cofactor = c;
                for s in stack {
                    cofactor *= s;
                }
                return Err(Error::FactorizationBudget { found, cofactor });
            }
        }
    }
    found.sort();
    Ok(IntegerFactorization { negative, factors: found })
}

fn perfect_power_root(n: &Integer) -> Option<(Integer, u32)> {
    for k in 2..=n.significant_bits() {
        let (r, rem) = n.clone().root_rem(Integer::new(), k);
        if rem == 0 {
            return Some((r, k));
        }
        if r < 2 {
            break;
        }
    }
    None
}

/// A nontrivial factor of the odd composite `n`, or `None` if time runs out.
fn pollard_brent(n: &Integer, deadline: Instant) -> Option<Integer> {
    let mut c = Integer::from(1);
    loop {
        let mut y = Integer::from(2);
        let mut r: u64 = 1;
        let mut q = Integer::from(1);
        let mut g = Integer::from(1);
        let mut x = Integer::new();
        let mut ys = Integer::new();
        let m = 128u64;
        let step = |v: &Integer| -> Integer {
            let mut w = Integer::from(v * v);
            w += &c;
            w %= n;
            w
        };
        while g == 1 {
            x.clone_from(&y);
            for _ in 0..r {
                y = step(&y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys.clone_from(&y);
                for _ in 0..m.min(r - k) {
                    y = step(&y);
                    let diff = Integer::from(&x - &y).abs();
                    q *= diff;
                    q %= n;
                }
                g = Integer::from(q.gcd_ref(n));
                k += m;
            }
            r *= 2;
            if Instant::now() > deadline {
                return None;
            }
        }
        if g == *n {
            loop {
                ys = step(&ys);
                g = Integer::from(Integer::from(&x - &ys).abs().gcd_ref(n));
                if g > 1 {
                    break;
                }
            }
        }
        if g != *n {
            return Some(g);
        }
        c += 1;
    }
}

/// `p^k`
pub fn ipow(p: &Integer, k: u32) -> Integer {
    use rug::ops::Pow;
    Integer::from(p.pow(k))
}

/// `v_p(x)`; `None` stands for `+∞` at `x = 0`.
pub fn valuation(x: &Rational, p: &Integer) -> Option<i64> {
    if *x == 0 {
        return None;
    }
    Some(int_val(x.numer(), p) as i64 - int_val(x.denom(), p) as i64)
}

/// `v_p(n)` for nonzero integer `n`.
pub fn int_val(n: &Integer, p: &Integer) -> u32 {
    if *n == 0 {
        return u32::MAX;
    }
    let mut m = n.clone();
    let mut e = 0;
    while m.is_divisible(p) {
        m /= p;
        e += 1;
    }
    e
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fac(n: i64) -> IntegerFactorization {
        factor_integer(&Integer::from(n), DEFAULT_FACTOR_BUDGET).unwrap()
    }

    #[test]
    fn small_numbers() {
        assert_eq!(fac(561).factors, vec![(3.into(), 1), (11.into(), 1), (17.into(), 1)]);
        let m6 = fac(-6);
        assert!(m6.negative);
        assert_eq!(m6.factors, vec![(2.into(), 1), (3.into(), 1)]);
        assert!(fac(1).factors.is_empty());
    }

    #[test]
    fn semiprime_beyond_trial_division() {
        let p = Integer::from(1_000_003u32);
        let q = Integer::from(999_999_937u32);
        let n = Integer::from(&p * &q) * &p;
        let f = factor_integer(&n, DEFAULT_FACTOR_BUDGET).unwrap();
        assert_eq!(f.factors, vec![(p, 2), (q, 1)]);
    }

    #[test]
    fn budget_error_carries_partial_result() {
        let p = Integer::from_str_radix("2305843009213693951", 10).unwrap();
        let q = Integer::from_str_radix("618970019642690137449562111", 10).unwrap();
        let n = Integer::from(&p * &q) * 12;
        match factor_integer(&n, Duration::from_millis(1)) {
            Err(Error::FactorizationBudget { found, cofactor }) => {
                assert_eq!(found, vec![(2.into(), 2), (3.into(), 1)]);
                assert_eq!(cofactor, p * q);
            }
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn valuations() {
        let p3 = Integer::from(3);
        assert_eq!(valuation(&Rational::from(-6), &p3), Some(1));
        assert_eq!(valuation(&Rational::from((9, 2)), &p3), Some(2));
        assert_eq!(valuation(&Rational::from((5, 3)), &p3), Some(-1));
        assert_eq!(valuation(&Rational::new(), &p3), None);
    }
}
