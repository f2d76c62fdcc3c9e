//! Exact rational feasibility for cone membership, by a phase-one simplex
//! with Bland's rule.

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::matrix::QVec;

/// Whether `v` is a nonnegative combination of `gens`.
pub fn in_cone(gens: &[QVec], v: &[BigRational]) -> bool {
    let d = v.len();
    let m = gens.len();
    // rows: sum_i lambda_i gens[i][j] + a_j = v_j, with v_j >= 0 after sign flips
    let cols = m + d;
    let mut t: Vec<QVec> = Vec::with_capacity(d);
    let mut rhs: QVec = Vec::with_capacity(d);
    for j in 0..d {
        let flip = v[j].is_negative();
        let mut row: QVec = (0..m)
            .map(|i| if flip { -gens[i][j].clone() } else { gens[i][j].clone() })
            .collect();
        row.extend((0..d).map(|k| if k == j { one() } else { BigRational::zero() }));
        t.push(row);
        rhs.push(if flip { -v[j].clone() } else { v[j].clone() });
    }
    let mut basis: Vec<usize> = (m..cols).collect();
    // phase one: minimize the sum of artificials; reduced cost of column c is
    // -(sum of column c over rows) for non-artificial columns
    loop {
        let mut enter = None;
        for c in 0..m {
            if basis.contains(&c) {
                continue;
            }
            let mut cost = BigRational::zero();
            for (r, row) in t.iter().enumerate() {
                if basis[r] >= m {
                    cost -= &row[c];
                }
            }
            if cost.is_negative() {
                enter = Some(c);
                break;
            }
        }
        let Some(c) = enter else { break };
        let mut leave: Option<(usize, BigRational)> = None;
        for r in 0..d {
            if t[r][c].is_positive() {
                let ratio = &rhs[r] / &t[r][c];
                let better = match &leave {
                    None => true,
                    Some((lr, best)) => ratio < *best || (ratio == *best && basis[r] < basis[*lr]),
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
        }
        let Some((r, _)) = leave else {
            // unbounded direction in phase one cannot occur; treat as infeasible
            return false;
        };
        pivot(&mut t, &mut rhs, r, c);
        basis[r] = c;
    }
    // feasible iff all artificials still in the basis are at zero
    (0..d).all(|r| basis[r] < m || rhs[r].is_zero())
}

fn one() -> BigRational {
    BigRational::from_integer(1.into())
}

fn pivot(t: &mut [QVec], rhs: &mut [BigRational], r: usize, c: usize) {
    let p = t[r][c].clone();
    for x in t[r].iter_mut() {
        *x = &*x / &p;
    }
    rhs[r] = &rhs[r] / &p;
    let prow = t[r].clone();
    let prhs = rhs[r].clone();
    for i in 0..t.len() {
        if i == r || t[i][c].is_zero() {
            continue;
        }
        let f = t[i][c].clone();
        for (x, y) in t[i].iter_mut().zip(&prow) {
            if !y.is_zero() {
                *x -= &f * y;
            }
        }
        rhs[i] -= &f * &prhs;
    }
}

/// Indices of the generators that are not in the cone spanned by the others
/// (the extremal rays, for a pointed cone with pairwise non-proportional
/// generators).
pub fn extremal(gens: &[QVec]) -> Vec<usize> {
    (0..gens.len())
        .filter(|&i| {
            let others: Vec<QVec> = gens.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, g)| g.clone()).collect();
            !in_cone(&others, &gens[i])
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::ivec_to_q;

    #[test]
    fn square_cone() {
        let g: Vec<QVec> = [[1, 0, 1], [0, 1, 1], [-1, 0, 1], [0, -1, 1], [0, 0, 1]]
            .iter()
            .map(|v| ivec_to_q(v))
            .collect();
        assert!(in_cone(&g[..4], &ivec_to_q(&[0, 0, 1])));
        assert!(!in_cone(&g[..4], &ivec_to_q(&[0, 0, -1])));
        assert!(!in_cone(&g[..2], &ivec_to_q(&[1, 1, 1])));
        assert_eq!(extremal(&g), vec![0, 1, 2, 3]);
    }
}
