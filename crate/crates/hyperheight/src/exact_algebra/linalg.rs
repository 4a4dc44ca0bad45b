//! Exact linear algebra over ℚ and over the local ring ℤ_(p).

use rug::{Integer, Rational};

use super::factor::{ipow, valuation};

/// Solve the square system `m · x = rhs` over ℚ. `None` if `m` is singular.
pub fn solve_rational(m: &[Vec<Rational>], rhs: &[Rational]) -> Option<Vec<Rational>> {
    let n = m.len();
    let mut a: Vec<Vec<Rational>> = m
        .iter()
        .zip(rhs)
        .map(|(row, r)| {
            let mut v = row.clone();
            v.push(r.clone());
            v
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| a[r][col] != 0)?;
        a.swap(col, piv);
        let inv = Rational::from(1) / &a[col][col];
        for j in col..=n {
            a[col][j] *= &inv;
        }
        for r in 0..n {
            if r != col && a[r][col] != 0 {
                let f = a[r][col].clone();
                for j in col..=n {
                    let t = Rational::from(&f * &a[col][j]);
                    a[r][j] -= t;
                }
            }
        }
    }
    Some(a.into_iter().map(|mut row| row.pop().unwrap()).collect())
}

/// Rank of a rational matrix.
pub fn rank_rational(m: &[Vec<Rational>]) -> usize {
    let mut a: Vec<Vec<Rational>> = m.to_vec();
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..cols {
        let Some(piv) = (rank..rows).find(|&r| a[r][col] != 0) else {
            continue;
        };
        a.swap(rank, piv);
        for r in rank + 1..rows {
            if a[r][col] != 0 {
                let f = Rational::from(&a[r][col] / &a[rank][col]);
                for j in col..cols {
                    let t = Rational::from(&f * &a[rank][j]);
                    a[r][j] -= t;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Reduce a p-integral rational to an integer in `[0, p^k)`.
pub fn to_residue(x: &Rational, pk: &Integer) -> Integer {
    let d = Integer::from(x.denom() % pk);
    let inv = d.invert(pk).expect("denominator must be a p-adic unit");
    let mut v = Integer::from(x.numer() * inv) % pk;
    if v < 0 {
        v += pk;
    }
    v
}

/// Row echelon basis over ℤ/p^k of the span of `rows` together with `p^k·ℤⁿ`.
///
/// Pivots are chosen by minimal p-adic valuation, so every elimination step is
/// a unimodular ℤ_(p)-operation. Columns are processed in the order given by
/// `col_order`. Returns the echelon rows (one per column, possibly with pivot
/// `p^k` when the column is saturated by the `p^k` part) in that order.
pub fn echelon_mod_pk(
    rows: &[Vec<Integer>],
    p: &Integer,
    k: u32,
    col_order: &[usize],
) -> Vec<Vec<Integer>> {
    let pk = ipow(p, k);
    let n = col_order.len();
    let mut work: Vec<Vec<Integer>> = rows
        .iter()
        .map(|r| r.iter().map(|v| reduce(v, &pk)).collect())
        .collect();
    let mut out = Vec::with_capacity(n);
    for &col in col_order {
        // pick row with minimal valuation at this column
        let mut best: Option<(usize, u32)> = None;
        for (i, r) in work.iter().enumerate() {
            if r[col] != 0 {
                let v = val_int(&r[col], p);
                if best.is_none_or(|(_, bv)| v < bv) {
                    best = Some((i, v));
                    if v == 0 {
                        break;
                    }
                }
            }
        }
        let mut pivot = match best {
            Some((i, _)) => work.swap_remove(i),
            None => {
                let mut e = vec![Integer::new(); rows.first().map_or(n, |r| r.len())];
                e[col] = pk.clone();
                out.push(e);
                continue;
            }
        };
        let pv = val_int(&pivot[col], p);
        // normalise the pivot entry to p^v
        let unit = Integer::from(&pivot[col] / ipow(p, pv));
        let uinv = unit.invert(&pk).expect("unit");
        for v in pivot.iter_mut() {
            *v = reduce(&Integer::from(&*v * &uinv), &pk);
        }
        let ppv = ipow(p, pv);
        for r in work.iter_mut() {
            if r[col] != 0 {
                let f = Integer::from(&r[col] / &ppv);
                for (j, v) in r.iter_mut().enumerate() {
                    if pivot[j] != 0 {
                        *v -= Integer::from(&f * &pivot[j]);
                        *v = reduce(v, &pk);
                    }
                }
            }
        }
        // p^{k-v}·pivot lies in p^k·ℤⁿ only in this column; keep the remainder
        let mut extra: Vec<Integer> = pivot
            .iter()
            .map(|v| reduce(&Integer::from(v * ipow(p, k - pv)), &pk))
            .collect();
        extra[col] = Integer::new();
        if extra.iter().any(|v| *v != 0) {
            work.push(extra);
        }
        work.retain(|r| r.iter().any(|v| *v != 0));
        out.push(pivot);
    }
    out
}

fn reduce(v: &Integer, pk: &Integer) -> Integer {
    let mut r = Integer::from(v % pk);
    if r < 0 {
        r += pk;
    }
    r
}

fn val_int(v: &Integer, p: &Integer) -> u32 {
    let mut m = v.clone();
    let mut e = 0;
    while m != 0 && m.is_divisible(p) {
        m /= p;
        e += 1;
    }
    e
}

/// Valuation of the index of the ℤ_p-lattice spanned by integral `rows` in ℤ_pⁿ,
/// computed modulo `p^k`. Exact whenever the returned value is below `k`.
pub fn index_valuation_mod_pk(rows: &[Vec<Integer>], p: &Integer, k: u32, n: usize) -> u32 {
    let order: Vec<usize> = (0..n).collect();
    let ech = echelon_mod_pk(rows, p, k, &order);
    ech.iter()
        .zip(order)
        .map(|(r, c)| if r[c] == 0 { k } else { val_int(&r[c], p).min(k) })
        .sum()
}

/// Echelon basis over ℤ_(p) of the rational span (as a ℤ_(p)-module) of `rows`,
/// with exact rational entries. Rows of the result are in pivot-column order;
/// zero columns are skipped.
pub fn echelon_zp(rows: &[Vec<Rational>], p: &Integer) -> Vec<Vec<Rational>> {
    let mut work: Vec<Vec<Rational>> = rows.iter().filter(|r| r.iter().any(|v| *v != 0)).cloned().collect();
    let cols = rows.first().map_or(0, |r| r.len());
    let mut out = Vec::new();
    for col in 0..cols {
        let mut best: Option<(usize, i64)> = None;
        for (i, r) in work.iter().enumerate() {
            if let Some(v) = valuation(&r[col], p) {
                if best.is_none_or(|(_, bv)| v < bv) {
                    best = Some((i, v));
                }
            }
        }
        let Some((bi, _)) = best else { continue };
        let pivot = work.swap_remove(bi);
        for r in work.iter_mut() {
            if r[col] != 0 {
                let f = Rational::from(&r[col] / &pivot[col]);
                for (j, v) in r.iter_mut().enumerate() {
                    if pivot[j] != 0 {
                        *v -= Rational::from(&f * &pivot[j]);
                    }
                }
            }
        }
        work.retain(|r| r.iter().any(|v| *v != 0));
        out.push(pivot);
    }
    out
}

/// Determinant of a square rational matrix.
pub fn det_rational(m: &[Vec<Rational>]) -> Rational {
    let n = m.len();
    let mut a = m.to_vec();
    let mut det = Rational::from(1);
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| a[r][col] != 0) else {
            return Rational::new();
        };
        if piv != col {
            a.swap(col, piv);
            det = -det;
        }
        det *= &a[col][col];
        for r in col + 1..n {
            if a[r][col] != 0 {
                let f = Rational::from(&a[r][col] / &a[col][col]);
                for j in col..n {
                    let t = Rational::from(&f * &a[col][j]);
                    a[r][j] -= t;
                }
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: i64) -> Rational {
        Rational::from(v)
    }

    #[test]
    fn solve_small_system() {
        let m = vec![vec![q(2), q(1)], vec![q(1), q(3)]];
        let x = solve_rational(&m, &[q(3), q(5)]).unwrap();
        assert_eq!(x, vec![Rational::from((4, 5)), Rational::from((7, 5))]);
    }

    #[test]
    fn lattice_index() {
        // span{(2,0),(0,6),(2,6)} has index 12 in Z^2
        let rows = vec![
            vec![Integer::from(2), Integer::from(0)],
            vec![Integer::from(0), Integer::from(6)],
            vec![Integer::from(2), Integer::from(6)],
        ];
        assert_eq!(index_valuation_mod_pk(&rows, &Integer::from(2), 10, 2), 2);
        assert_eq!(index_valuation_mod_pk(&rows, &Integer::from(3), 10, 2), 1);
        // rank-deficient lattice saturates at the cap
        let flat = vec![vec![Integer::from(1), Integer::from(1)]];
        assert_eq!(index_valuation_mod_pk(&flat, &Integer::from(5), 7, 2), 7);
    }

    #[test]
    fn determinant() {
        let m = vec![vec![q(1), q(2)], vec![q(3), q(4)]];
        assert_eq!(det_rational(&m), -2);
    }
}
