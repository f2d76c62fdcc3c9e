//! Dense integer and rational matrix routines.
//!
//! Small matrices (rank at most a few dozen) are the only use case, so
//! everything is row-major `Vec<Vec<_>>`. Integer entries that feed Hermite
//! or Smith normal forms are promoted to `BigInt` so coefficient growth never
//! overflows.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type IMat = Vec<Vec<i64>>;
pub type BMat = Vec<Vec<BigInt>>;
pub type QMat = Vec<Vec<BigRational>>;
pub type QVec = Vec<BigRational>;

pub fn identity(n: usize) -> IMat {
    (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect()
}

pub fn transpose<T: Clone>(a: &[Vec<T>]) -> Vec<Vec<T>> {
    if a.is_empty() {
        return Vec::new();
    }
    (0..a[0].len())
        .map(|j| a.iter().map(|row| row[j].clone()).collect())
        .collect()
}

pub fn mat_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> IMat {
    let inner = b.len();
    let cols = if inner == 0 { 0 } else { b[0].len() };
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).map(|k| row[k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

/// Row vector times matrix.
pub fn vec_mat(v: &[i64], m: &[Vec<i64>]) -> Vec<i64> {
    let cols = if m.is_empty() { 0 } else { m[0].len() };
    let mut out = vec![0i64; cols];
    for (k, &c) in v.iter().enumerate() {
        if c == 0 {
            continue;
        }
        for (o, x) in out.iter_mut().zip(&m[k]) {
            *o += c * x;
        }
    }
    out
}

pub fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `a * g * a^T` for an integer change of basis.
pub fn congruence(a: &[Vec<i64>], g: &[Vec<i64>]) -> IMat {
    mat_mul(&mat_mul(a, g), &transpose(a))
}

pub fn to_big(a: &[Vec<i64>]) -> BMat {
    a.iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect()
}

pub fn to_rat(a: &[Vec<i64>]) -> QMat {
    a.iter()
        .map(|r| r.iter().map(|&x| BigRational::from_integer(x.into())).collect())
        .collect()
}

pub fn to_rat_big(a: &[Vec<BigInt>]) -> QMat {
    a.iter()
        .map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect())
        .collect()
}

pub fn big_to_i64(a: &[Vec<BigInt>]) -> Option<IMat> {
    a.iter()
        .map(|r| r.iter().map(|x| x.to_i64()).collect::<Option<Vec<_>>>())
        .collect()
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

pub fn rat_int(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

pub fn rat_to_string(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Determinant by fraction-free Bareiss elimination.
pub fn det_big(a: &[Vec<BigInt>]) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut m: BMat = a.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                return BigInt::zero();
            };
            m.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    sign * m[n - 1][n - 1].clone()
}

pub fn det_i64(a: &[Vec<i64>]) -> BigInt {
    det_big(&to_big(a))
}

pub fn det_rat(a: &[Vec<BigRational>]) -> BigRational {
    let n = a.len();
    let mut m = a.to_vec();
    let mut det = BigRational::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !m[i][k].is_zero()) else {
            return BigRational::zero();
        };
        if p != k {
            m.swap(k, p);
            det = -det;
        }
        let piv = m[k][k].clone();
        det *= &piv;
        for i in k + 1..n {
            if m[i][k].is_zero() {
                continue;
            }
            let f = &m[i][k] / &piv;
            for j in k..n {
                let t = &f * &m[k][j];
                m[i][j] -= t;
            }
        }
    }
    det
}

/// Inverse of a square rational matrix, `None` when singular.
pub fn inverse_rat(a: &[Vec<BigRational>]) -> Option<QMat> {
    let n = a.len();
    let mut m: QMat = a.to_vec();
    let mut inv: QMat = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigRational::one() } else { BigRational::zero() })
                .collect()
        })
        .collect();
    for k in 0..n {
        let p = (k..n).find(|&i| !m[i][k].is_zero())?;
        m.swap(k, p);
        inv.swap(k, p);
        let piv = m[k][k].clone();
        for j in 0..n {
            m[k][j] = &m[k][j] / &piv;
            inv[k][j] = &inv[k][j] / &piv;
        }
        for i in 0..n {
            if i == k || m[i][k].is_zero() {
                continue;
            }
            let f = m[i][k].clone();
            for j in 0..n {
                let t = &f * &m[k][j];
                m[i][j] -= t;
                let t = &f * &inv[k][j];
                inv[i][j] -= t;
            }
        }
    }
    Some(inv)
}

pub fn qmat_mul(a: &[Vec<BigRational>], b: &[Vec<BigRational>]) -> QMat {
    let inner = b.len();
    let cols = if inner == 0 { 0 } else { b[0].len() };
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut s = BigRational::zero();
                    for k in 0..inner {
                        if !row[k].is_zero() && !b[k][j].is_zero() {
                            s += &row[k] * &b[k][j];
                        }
                    }
                    s
                })
                .collect()
        })
        .collect()
}

pub fn qvec_mat(v: &[BigRational], m: &[Vec<BigRational>]) -> QVec {
    let cols = if m.is_empty() { 0 } else { m[0].len() };
    let mut out = vec![BigRational::zero(); cols];
    for (k, c) in v.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        for (o, x) in out.iter_mut().zip(&m[k]) {
            if !x.is_zero() {
                *o += c * x;
            }
        }
    }
    out
}

pub fn qdot(a: &[BigRational], b: &[BigRational]) -> BigRational {
    let mut s = BigRational::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            s += x * y;
        }
    }
    s
}

pub fn ivec_to_q(v: &[i64]) -> QVec {
    v.iter().map(|&x| rat_int(x)).collect()
}

/// Least common multiple of all denominators in a rational matrix.
pub fn common_denominator(a: &[Vec<BigRational>]) -> BigInt {
    let mut d = BigInt::one();
    for row in a {
        for x in row {
            d = d.lcm(x.denom());
        }
    }
    d
}

/// Row-style Hermite normal form with the unimodular transform: returns
/// `(h, u, rank)` with `u * a = h`; the first `rank` rows of `h` are the
/// nonzero echelon rows, the remaining rows are zero.
pub fn hnf_with_transform(a: &[Vec<BigInt>]) -> (BMat, BMat, usize) {
    let m = a.len();
    let n = if m == 0 { 0 } else { a[0].len() };
    let mut h: BMat = a.to_vec();
    let mut u: BMat = (0..m)
        .map(|i| (0..m).map(|j| BigInt::from(i64::from(i == j))).collect())
        .collect();
    let mut r = 0usize;
    for c in 0..n {
        if r == m {
            break;
        }
        loop {
            // pick row with smallest nonzero |entry| in column c among r..m
            let mut best: Option<usize> = None;
            for i in r..m {
                if !h[i][c].is_zero()
                    && best.map_or(true, |b| h[i][c].abs() < h[b][c].abs())
                {
                    best = Some(i);
                }
            }
            let Some(b) = best else { break };
            h.swap(r, b);
            u.swap(r, b);
            let mut done = true;
            for i in r + 1..m {
                if h[i][c].is_zero() {
                    continue;
                }
                let q = h[i][c].div_floor(&h[r][c]);
                for j in c..n {
                    let t = &q * &h[r][j];
                    h[i][j] -= t;
                }
                for j in 0..m {
                    let t = &q * &u[r][j];
                    u[i][j] -= t;
                }
                if !h[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if r < m && !h[r][c].is_zero() {
            if h[r][c].is_negative() {
                for j in c..n {
                    h[r][j] = -h[r][j].clone();
                }
                for j in 0..m {
                    u[r][j] = -u[r][j].clone();
                }
            }
            for i in 0..r {
                let q = h[i][c].div_floor(&h[r][c]);
                if q.is_zero() {
                    continue;
                }
                for j in c..n {
                    let t = &q * &h[r][j];
                    h[i][j] -= t;
                }
                for j in 0..m {
                    let t = &q * &u[r][j];
                    u[i][j] -= t;
                }
            }
            r += 1;
        }
    }
    (h, u, r)
}

/// Nonzero rows of the Hermite normal form: a canonical basis of the row
/// lattice.
pub fn hnf_basis(a: &[Vec<BigInt>]) -> BMat {
    let (h, _, r) = hnf_with_transform(a);
    h.into_iter().take(r).collect()
}

/// Basis of `{x in Z^m : x * a = 0}`. The result is saturated.
pub fn left_kernel(a: &[Vec<BigInt>]) -> BMat {
    let (_, u, r) = hnf_with_transform(a);
    let k: BMat = u.into_iter().skip(r).collect();
    if k.is_empty() {
        k
    } else {
        hnf_basis(&k)
    }
}

/// Basis of the rational row space of `a` intersected with `Z^n`.
pub fn saturation(a: &[Vec<BigInt>]) -> BMat {
    if a.is_empty() {
        return Vec::new();
    }
    let n = a[0].len();
    // right kernel of a, then left kernel of that
    let at = transpose(a);
    let k = left_kernel(&at); // rows y with y * a^T = 0, i.e. a * y^T = 0
    if k.is_empty() {
        return (0..n)
            .map(|i| (0..n).map(|j| BigInt::from(i64::from(i == j))).collect())
            .collect();
    }
    left_kernel(&transpose(&k))
}

/// Smith normal form: returns `(u, d, v)` with `u * a * v = diag(d)`,
/// `d[i] | d[i+1]`, all `d[i] >= 0`.
pub fn smith(a: &[Vec<BigInt>]) -> (BMat, Vec<BigInt>, BMat) {
    let m = a.len();
    let n = if m == 0 { 0 } else { a[0].len() };
    let mut s: BMat = a.to_vec();
    let mut u: BMat = (0..m)
        .map(|i| (0..m).map(|j| BigInt::from(i64::from(i == j))).collect())
        .collect();
    let mut v: BMat = (0..n)
        .map(|i| (0..n).map(|j| BigInt::from(i64::from(i == j))).collect())
        .collect();
    let t_max = m.min(n);
    for t in 0..t_max {
        loop {
            // smallest nonzero entry in the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    if !s[i][j].is_zero()
                        && best.map_or(true, |(bi, bj)| s[i][j].abs() < s[bi][bj].abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else { break };
            s.swap(t, bi);
            u.swap(t, bi);
            for row in s.iter_mut() {
                row.swap(t, bj);
            }
            for row in v.iter_mut() {
                row.swap(t, bj);
            }
            let mut clean = true;
            for i in t + 1..m {
                if s[i][t].is_zero() {
                    continue;
                }
                let q = s[i][t].div_floor(&s[t][t]);
                for j in t..n {
                    let x = &q * &s[t][j];
                    s[i][j] -= x;
                }
                for j in 0..m {
                    let x = &q * &u[t][j];
                    u[i][j] -= x;
                }
                if !s[i][t].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..n {
                if s[t][j].is_zero() {
                    continue;
                }
                let q = s[t][j].div_floor(&s[t][t]);
                for i in t..m {
                    let x = &q * &s[i][t];
                    s[i][j] -= x;
                }
                for i in 0..n {
                    let x = &q * &v[i][t];
                    v[i][j] -= x;
                }
                if !s[t][j].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // divisibility of the remaining block by the pivot
            let mut bad: Option<usize> = None;
            'outer: for i in t + 1..m {
                for j in t + 1..n {
                    if !(&s[i][j] % &s[t][t]).is_zero() {
                        bad = Some(i);
                        break 'outer;
                    }
                }
            }
            match bad {
                Some(i) => {
                    for j in t..n {
                        let x = s[i][j].clone();
                        s[t][j] += x;
                    }
                    for j in 0..m {
                        let x = u[i][j].clone();
                        u[t][j] += x;
                    }
                }
                None => break,
            }
        }
        if s[t][t].is_negative() {
            for j in t..n {
                s[t][j] = -s[t][j].clone();
            }
            for j in 0..m {
                u[t][j] = -u[t][j].clone();
            }
        }
    }
    let d = (0..t_max).map(|i| s[i][i].clone()).collect();
    (u, d, v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(a: &[&[i64]]) -> BMat {
        a.iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect()
    }

    #[test]
    fn bareiss_matches_rational_det() {
        let a = b(&[&[2, -1, 0], &[-1, 2, -1], &[0, -1, 2]]);
        assert_eq!(det_big(&a), BigInt::from(4));
        let q: QMat = a
            .iter()
            .map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect())
            .collect();
        assert_eq!(det_rat(&q), rat_int(4));
    }

    #[test]
    fn smith_of_small_matrix() {
        let a = b(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
        let (u, d, v) = smith(&a);
        assert_eq!(d, vec![BigInt::from(2), BigInt::from(6), BigInt::from(12)]);
        let prod = {
            let ua: BMat = u
                .iter()
                .map(|r| {
                    (0..3)
                        .map(|j| (0..3).map(|k| &r[k] * &a[k][j]).sum())
                        .collect()
                })
                .collect();
            ua.iter()
                .map(|r| {
                    (0..3)
                        .map(|j| (0..3).map(|k| &r[k] * &v[k][j]).sum::<BigInt>())
                        .collect::<Vec<_>>()
                })
                .collect::<BMat>()
        };
        for i in 0..3 {
            for j in 0..3 {
                let e = if i == j { d[i].clone() } else { BigInt::zero() };
                assert_eq!(prod[i][j], e);
            }
        }
    }

    #[test]
    fn kernel_and_saturation() {
        let a = b(&[&[2, 0], &[0, 2]]);
        let sat = saturation(&a);
        assert_eq!(sat, b(&[&[1, 0], &[0, 1]]));
        let k = left_kernel(&b(&[&[1, 1], &[1, 1], &[0, 1]]));
        assert_eq!(k.len(), 1);
        assert_eq!(k[0], vec![BigInt::from(1), BigInt::from(-1), BigInt::from(0)]);
    }
}
