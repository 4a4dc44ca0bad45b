//! Lenstra's elliptic curve method on Montgomery curves in `(X : Z)` coordinates.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::Integer;

/// `(B1, curves)` per stage; the last stage repeats until the deadline.
const SCHEDULE: [(u64, u32); 6] = [(2_000, 25), (11_000, 90), (50_000, 300), (250_000, 700), (1_000_000, 1800), (3_000_000, 5000)];
/// Width of a giant step in stage two.
const WHEEL: u64 = 2310;

struct Curve<'a> {
    n: &'a Integer,
    a24: Integer,
}

#[derive(Clone)]
struct Pt {
    x: Integer,
    z: Integer,
}

impl Curve<'_> {
    fn reduce(&self, v: Integer) -> Integer {
        let mut v = v % self.n;
        if v < 0 {
            v += self.n;
        }
        v
    }

    fn double(&self, p: &Pt) -> Pt {
        let s = self.reduce(Integer::from(&p.x + &p.z).square());
        let d = self.reduce(Integer::from(&p.x - &p.z).square());
        let t = Integer::from(&s - &d);
        let x = self.reduce(Integer::from(&s * &d));
        let z = self.reduce(Integer::from(&t * &self.a24) + &d);
        let z = self.reduce(z * t);
        Pt { x, z }
    }

    /// `p + q` given `diff = p − q`.
    fn add(&self, p: &Pt, q: &Pt, diff: &Pt) -> Pt {
        let u = self.reduce(Integer::from(&p.x - &p.z) * Integer::from(&q.x + &q.z));
        let v = self.reduce(Integer::from(&p.x + &p.z) * Integer::from(&q.x - &q.z));
        let x = self.reduce(Integer::from(&u + &v).square() * &diff.z);
        let z = self.reduce(Integer::from(&u - &v).square() * &diff.x);
        Pt { x, z }
    }

    fn mul(&self, p: &Pt, k: u64) -> Pt {
        if k == 1 {
            return p.clone();
        }
        let mut r0 = p.clone();
        let mut r1 = self.double(p);
        for i in (0..63 - k.leading_zeros()).rev() {
            if (k >> i) & 1 == 1 {
                r0 = self.add(&r1, &r0, p);
                r1 = self.double(&r1);
            } else {
                r1 = self.add(&r1, &r0, p);
                r0 = self.double(&r0);
            }
        }
        r0
    }
}

fn primes_up_to(n: u64) -> Vec<u64> {
    let n = n as usize;
    let mut sieve = vec![true; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if sieve[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
    }
    out
}

fn gcd(a: &Integer, n: &Integer) -> Integer {
    Integer::from(a.gcd_ref(n))
}

/// Outcome of one curve.
enum Trial {
    Factor(Integer),
    Nothing,
}

fn split(g: Integer, n: &Integer) -> Trial {
    if g > 1 && g < *n {
        Trial::Factor(g)
    } else {
        Trial::Nothing
    }
}

/// One curve from Suyama's family with parameter `sigma`.
fn one_curve(n: &Integer, sigma: &Integer, b1: u64, primes: &[u64]) -> Trial {
    let red = |v: Integer| {
        let mut v = v % n;
        if v < 0 {
            v += n;
        }
        v
    };
    let u = red(Integer::from(sigma.square_ref()) - 5u32);
    let v = red(Integer::from(sigma * 4u32));
    let x0 = red(Integer::from(u.square_ref()) * &u);
    let z0 = red(Integer::from(v.square_ref()) * &v);
    let vmu = red(Integer::from(&v - &u));
    let num = red(red(Integer::from(vmu.square_ref()) * &vmu) * red(Integer::from(&u * 3u32) + &v));
    let den = red(red(Integer::from(&x0 * &v)) * 16u32);
    let inv = match den.clone().invert(n) {
        Ok(i) => i,
        Err(_) => return split(gcd(&den, n), n),
    };
    let curve = Curve { n, a24: red(num * inv) };

    let mut q = Pt { x: x0, z: z0 };
    for &p in primes.iter().take_while(|&&p| p <= b1) {
        let mut pk = p;
        while pk <= b1 / p {
            pk *= p;
        }
        q = curve.mul(&q, pk);
    }
    let g = gcd(&q.z, n);
    if g > 1 {
        return split(g, n);
    }

    // stage two: primes in (B1, 100·B1] as m·WHEEL ± j
    let b2 = b1 * 100;
    let half = WHEEL / 2;
    let mut baby: Vec<Option<Pt>> = vec![None; half as usize + 1];
    let q2 = curve.double(&q);
    let mut prev = q.clone();
    let mut cur = curve.add(&q2, &q, &q);
    baby[1] = Some(q.clone());
    let mut j = 3;
    while j <= half {
        baby[j as usize] = Some(cur.clone());
        let next = curve.add(&cur, &q2, &prev);
        prev = cur;
        cur = next;
        j += 2;
    }
    let baby: Vec<(u64, Integer)> = baby
        .into_iter()
        .enumerate()
        .filter_map(|(j, p)| {
            let j = j as u64;
            let p = p?;
            if gcd_u64(j, WHEEL) != 1 {
                return None;
            }
            let zi = p.z.clone().invert(n).ok()?;
            Some((j, curve.reduce(p.x * zi)))
        })
        .collect();
    let step = curve.mul(&q, WHEEL);
    let m0 = (b1 / WHEEL).max(1);
    let mut giant_prev = curve.mul(&q, WHEEL * m0);
    let mut giant = curve.mul(&q, WHEEL * (m0 + 1));
    let mut m = m0 + 1;
    let mut acc = Integer::from(1);
    for (_, bx) in &baby {
        let t = curve.reduce(Integer::from(&giant_prev.x - Integer::from(bx * &giant_prev.z)));
        acc = curve.reduce(acc * t);
    }
    while m * WHEEL <= b2 + half {
        for (_, bx) in &baby {
            let t = curve.reduce(Integer::from(&giant.x - Integer::from(bx * &giant.z)));
            acc = curve.reduce(acc * t);
        }
        let next = curve.add(&giant, &step, &giant_prev);
        giant_prev = giant;
        giant = next;
        m += 1;
    }
    split(gcd(&acc, n), n)
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// A proper factor of the odd composite `n`, or `None` once `deadline` passes.
pub fn ecm_factor(n: &Integer, deadline: Instant) -> Option<Integer> {
    let mut rng = ChaCha8Rng::seed_from_u64(n.significant_bits() as u64);
    let primes = primes_up_to(SCHEDULE[SCHEDULE.len() - 1].0);
    for (i, &(b1, curves)) in SCHEDULE.iter().enumerate() {
        let last = i + 1 == SCHEDULE.len();
        let mut c = 0;
        while c < curves || last {
            if Instant::now() > deadline {
                return None;
            }
            let sigma = Integer::from(rng.gen_range(6u64..u64::MAX / 2)) % n;
            if let Trial::Factor(f) = one_curve(n, &sigma, b1, &primes) {
                return Some(f);
            }
            c += 1;
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::time::Duration;

    #[test]
    fn splits_product_of_two_large_primes() {
        let p = Integer::from_str_radix("1000000000000000003", 10).unwrap();
        let q = Integer::from_str_radix("100000000000000000039", 10).unwrap();
        let n = Integer::from(&p * &q);
        let f = ecm_factor(&n, Instant::now() + Duration::from_secs(60)).expect("factor");
        assert!(f == p || f == q);
    }
}
