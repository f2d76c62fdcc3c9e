//! LLL reduction of a positive definite integer Gram matrix.
//!
//! The Gram matrix and the transform are updated in exact integers; only the
//! Gram–Schmidt data used to choose reduction steps is floating point.

use crate::matrix::IMat;

/// Returns `(t, reduced)` with `reduced = t * gram * t^T` and `t` unimodular.
pub fn lll_gram(gram: &IMat, delta: f64) -> (IMat, IMat) {
    let n = gram.len();
    let mut g = gram.clone();
    let mut t: IMat = (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect();
    if n <= 1 {
        return (t, g);
    }
    let mut k = 1usize;
    let mut guard = 0usize;
    while k < n {
        guard += 1;
        if guard > 1_000_000 {
            break;
        }
        for j in (0..k).rev() {
            let (mu, _) = gso(&g, k);
            let r = mu[j].round();
            if r != 0.0 {
                let r = r as i64;
                sub_row(&mut g, &mut t, k, j, r);
            }
        }
        let (mu, b) = gso(&g, k);
        if b[k] < (delta - mu[k - 1] * mu[k - 1]) * b[k - 1] {
            swap_rows(&mut g, &mut t, k, k - 1);
            k = k.saturating_sub(1).max(1);
        } else {
            k += 1;
        }
    }
    (t, g)
}

/// Gram–Schmidt coefficients of row `k` against earlier rows, and squared
/// lengths `b[0..=k]`.
fn gso(g: &IMat, k: usize) -> (Vec<f64>, Vec<f64>) {
    let mut mu = vec![vec![0.0f64; k + 1]; k + 1];
    let mut b = vec![0.0f64; k + 1];
    for i in 0..=k {
        for j in 0..i {
            let mut s = g[i][j] as f64;
            for l in 0..j {
                s -= mu[j][l] * mu[i][l] * b[l];
            }
            mu[i][j] = s / b[j];
        }
        let mut s = g[i][i] as f64;
        for l in 0..i {
            s -= mu[i][l] * mu[i][l] * b[l];
        }
        b[i] = s;
    }
    (mu[k].clone(), b)
}

fn sub_row(g: &mut IMat, t: &mut IMat, k: usize, j: usize, r: i64) {
    let n = g.len();
    for c in 0..n {
        t[k][c] -= r * t[j][c];
    }
    let new_kk = g[k][k] - 2 * r * g[k][j] + r * r * g[j][j];
    for c in 0..n {
        if c != k {
            g[k][c] -= r * g[j][c];
            g[c][k] = g[k][c];
        }
    }
    g[k][k] = new_kk;
}

fn swap_rows(g: &mut IMat, t: &mut IMat, a: usize, b: usize) {
    g.swap(a, b);
    for row in g.iter_mut() {
        row.swap(a, b);
    }
    t.swap(a, b);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::congruence;

    #[test]
    fn reduces_skewed_basis() {
        // A2 in a bad basis
        let g = vec![vec![2, -1], vec![-1, 2]];
        let b = vec![vec![1, 0], vec![7, 1]];
        let bad = congruence(&b, &g);
        let (t, red) = lll_gram(&bad, 0.99);
        assert_eq!(congruence(&t, &bad), red);
        assert!(red[0][0] == 2 && red[1][1] == 2);
    }
}
