use rug::{Complex, Float};

/// Inverse by Gauss–Jordan elimination with partial pivoting; `None` if singular.
pub fn complex_inverse(m: &[Vec<Complex>]) -> Option<Vec<Vec<Complex>>> {
    let n = m.len();
    let bits = m.first()?.first()?.prec().0;
    let mut a: Vec<Vec<Complex>> = m.to_vec();
    let mut inv: Vec<Vec<Complex>> = (0..n)
        .map(|i| (0..n).map(|j| Complex::with_val(bits, if i == j { 1 } else { 0 })).collect())
        .collect();
    for col in 0..n {
        let piv = (col..n).max_by(|&r, &s| {
            let x = Float::with_val(bits, a[r][col].abs_ref());
            let y = Float::with_val(bits, a[s][col].abs_ref());
            x.partial_cmp(&y).unwrap()
        })?;
        if a[piv][col].is_zero() {
            return None;
        }
        a.swap(col, piv);
        inv.swap(col, piv);
        let p = Complex::with_val(bits, 1) / &a[col][col];
        for j in 0..n {
            a[col][j] *= &p;
            inv[col][j] *= &p;
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for j in 0..n {
                let t = Complex::with_val(bits, &f * &a[col][j]);
                a[r][j] -= t;
                let t = Complex::with_val(bits, &f * &inv[col][j]);
                inv[r][j] -= t;
            }
        }
    }
    Some(inv)
}

/// Real counterpart of [`complex_inverse`].
pub fn real_inverse(m: &[Vec<Float>]) -> Option<Vec<Vec<Float>>> {
    let n = m.len();
    let bits = m.first()?.first()?.prec();
    let mut a: Vec<Vec<Float>> = m.to_vec();
    let mut inv: Vec<Vec<Float>> = (0..n)
        .map(|i| (0..n).map(|j| Float::with_val(bits, if i == j { 1 } else { 0 })).collect())
        .collect();
    for col in 0..n {
        let piv = (col..n).max_by(|&r, &s| {
            Float::with_val(bits, a[r][col].abs_ref())
                .partial_cmp(&Float::with_val(bits, a[s][col].abs_ref()))
                .unwrap()
        })?;
        if a[piv][col].is_zero() {
            return None;
        }
        a.swap(col, piv);
        inv.swap(col, piv);
        let p = Float::with_val(bits, 1) / &a[col][col];
        for j in 0..n {
            a[col][j] *= &p;
            inv[col][j] *= &p;
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for j in 0..n {
                let t = Float::with_val(bits, &f * &a[col][j]);
                a[r][j] -= t;
                let t = Float::with_val(bits, &f * &inv[col][j]);
                inv[r][j] -= t;
            }
        }
    }
    Some(inv)
}

pub(crate) fn mat_mul(a: &[Vec<Complex>], b: &[Vec<Complex>]) -> Vec<Vec<Complex>> {
    let bits = a[0][0].prec().0;
    let k = b.len();
    (0..a.len())
        .map(|i| {
            (0..b[0].len())
                .map(|j| {
                    let mut s = Complex::new(bits);
                    for t in 0..k {
                        s += Complex::with_val(bits, &a[i][t] * &b[t][j]);
                    }
                    s
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_roundtrip() {
        let c = |re: f64, im: f64| Complex::with_val(100, (re, im));
        let m = vec![vec![c(1.0, 2.0), c(0.5, 0.0)], vec![c(0.0, -1.0), c(3.0, 1.0)]];
        let inv = complex_inverse(&m).unwrap();
        let id = mat_mul(&m, &inv);
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { 1.0 } else { 0.0 };
                let d = Complex::with_val(100, &id[i][j] - want);
                assert!(Float::with_val(100, d.abs_ref()) < 1e-25);
            }
        }
    }
}
