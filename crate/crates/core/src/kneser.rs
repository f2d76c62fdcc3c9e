//! Kneser p-neighbors of definite even lattices and genus enumeration by
//! closure of the neighbor graph.

use std::collections::{BTreeMap, VecDeque};

use num_bigint::BigInt;
use num_traits::Zero;
use rand::Rng;

use crate::error::{Error, Result};
use crate::genus::is_prime;
use crate::isom;
use crate::lattice::Lattice;
use crate::lll::lll_gram;
use crate::matrix::{self, IMat};
use crate::vectors::vectors_up_to;

fn mod_inv(a: i64, p: i64) -> i64 {
    let a = a.rem_euclid(p);
    (1..p).find(|x| (a * x) % p == 1).expect("invertible mod p")
}

fn norm(g: &IMat, v: &[i64]) -> i64 {
    matrix::dot(&matrix::vec_mat(v, g), v)
}

/// The p-neighbor `{x : <x,v> ≡ 0 mod p} + Z v/p` of a positive definite
/// even lattice, for `v` isotropic mod p and not in `pL`. Returns an
/// LLL-reduced Gram matrix, or `None` if `v` is not isotropic mod p.
pub fn neighbor(g: &IMat, p: i64, v: &[i64]) -> Result<Option<IMat>> {
    let n = g.len();
    let mut v: Vec<i64> = v.iter().map(|x| x.rem_euclid(p)).collect();
    if v.iter().all(|&x| x == 0) || norm(g, &v) % p != 0 {
        return Ok(None);
    }
    let f: Vec<i64> = matrix::vec_mat(&v, g).iter().map(|x| x.rem_euclid(p)).collect();
    let Some(k) = (0..n).find(|&i| f[i] != 0) else {
        return Err(Error::InvalidArgument("p divides the determinant".into()));
    };
    let q = norm(g, &v);
    if q % (p * p) != 0 {
        // v + p c e_k has norm q + 2 p c f_k mod p^2
        let c = ((-(q / p)).rem_euclid(p) * mod_inv(2 * f[k], p)).rem_euclid(p);
        v[k] += p * c;
    }
    debug_assert_eq!(norm(g, &v) % (2 * p * p), 0);
    let fk_inv = mod_inv(f[k], p);
    let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(n + 1);
    for i in 0..n {
        let mut r = vec![BigInt::zero(); n];
        if i == k {
            r[k] = BigInt::from(p * p);
        } else {
            r[i] = BigInt::from(p);
            r[k] = BigInt::from(-p * ((f[i] * fk_inv) % p));
        }
        rows.push(r);
    }
    rows.push(v.iter().map(|&x| BigInt::from(x)).collect());
    let basis = matrix::hnf_basis(&rows);
    let b = matrix::big_to_i64(&basis).ok_or_else(|| Error::InvalidArgument("overflow".into()))?;
    let scaled = matrix::congruence(&b, g);
    let pp = p * p;
    let mut out = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in 0..n {
            if scaled[i][j] % pp != 0 {
                return Err(Error::Validation("neighbor form is not integral".into()));
            }
            out[i][j] = scaled[i][j] / pp;
        }
    }
    Ok(Some(lll_gram(&out, 0.99).1))
}

/// Counts of vectors of the smallest few norms; an isometry invariant.
fn invariant(g: &IMat) -> Result<Vec<(i64, usize)>> {
    let min_diag = (0..g.len()).map(|i| g[i][i]).min().unwrap_or(0);
    let short = vectors_up_to(g, min_diag + 4)?;
    Ok(short.into_iter().map(|(k, v)| (k, v.len())).collect())
}

fn smallest_good_prime(det: &BigInt) -> i64 {
    (3i64..).step_by(2).find(|&p| is_prime(p as u64) && !(det % BigInt::from(p)).is_zero()).unwrap()
}

/// Definite even lattice as a positive definite integer Gram matrix, with
/// the sign needed to restore it.
fn positive_form(l: &Lattice) -> Result<(IMat, i64)> {
    if !l.is_definite() {
        return Err(Error::Unsupported("genus enumeration needs a definite lattice".into()));
    }
    if !l.is_even() {
        return Err(Error::NotEven);
    }
    let g = l.int_gram()?;
    if l.is_positive_definite() {
        Ok((g, 1))
    } else {
        Ok((isom::negate(&g), -1))
    }
}

/// Representatives of the isometry classes reachable from `l` by iterated
/// p-neighbors at the smallest odd prime `p` not dividing `det l`.
///
/// The closure of the neighbor graph is the whole genus unless the genus
/// splits into several spinor genera; this is not checked.
pub fn enumerate_definite_genus(l: &Lattice) -> Result<Vec<Lattice>> {
    enumerate_definite_genus_limited(l, 500)
}

pub fn enumerate_definite_genus_limited(l: &Lattice, max_classes: usize) -> Result<Vec<Lattice>> {
    let (g0, sign) = positive_form(l)?;
    let n = g0.len();
    let p = smallest_good_prime(&l.determinant().to_integer());
    log::info!("neighbor closure at p = {p}; spinor genera are not separated");
    let g0 = lll_gram(&g0, 0.99).1;
    let mut classes: Vec<IMat> = vec![g0.clone()];
    let mut inv: BTreeMap<Vec<(i64, usize)>, Vec<usize>> = BTreeMap::new();
    inv.entry(invariant(&g0)?).or_default().push(0);
    let mut queue = VecDeque::from([0usize]);
    while let Some(ci) = queue.pop_front() {
        let g = classes[ci].clone();
        for v in projective_points(n, p) {
            let Some(h) = neighbor(&g, p, &v)? else { continue };
            let key = invariant(&h)?;
            let hl = Lattice::from_int(&h)?;
            let mut known = false;
            for &j in inv.get(&key).map(|v| v.as_slice()).unwrap_or(&[]) {
                if isom::isometry_test(&Lattice::from_int(&classes[j])?, &hl)?.is_some() {
                    known = true;
                    break;
                }
            }
            if !known {
                let idx = classes.len();
                if idx >= max_classes {
                    return Err(Error::Budget(format!("more than {max_classes} classes")));
                }
                classes.push(h);
                inv.entry(key).or_default().push(idx);
                queue.push_back(idx);
            }
        }
    }
    classes
        .iter()
        .map(|g| {
            let gg: IMat = if sign < 0 { isom::negate(g) } else { g.clone() };
            Lattice::from_int(&gg)
        })
        .collect()
}

/// Representatives of the points of projective space over `F_p`: first
/// nonzero coordinate equal to 1.
pub fn projective_points(n: usize, p: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    for lead in 0..n {
        let free = n - lead - 1;
        let count = (p as u64).pow(free as u32);
        for mut c in 0..count {
            let mut v = vec![0i64; n];
            v[lead] = 1;
            for x in v.iter_mut().skip(lead + 1) {
                *x = (c % p as u64) as i64;
                c /= p as u64;
            }
            out.push(v);
        }
    }
    out
}

/// A random p-neighbor of a definite even lattice.
pub fn random_neighbor<R: Rng>(l: &Lattice, p: i64, rng: &mut R) -> Result<Lattice> {
    let (g, sign) = positive_form(l)?;
    if (l.determinant().to_integer() % BigInt::from(p)).is_zero() {
        return Err(Error::InvalidArgument(format!("{p} divides the determinant")));
    }
    loop {
        let v: Vec<i64> = (0..g.len()).map(|_| rng.gen_range(0..p)).collect();
        if let Some(h) = neighbor(&g, p, &v)? {
            let h = if sign < 0 { isom::negate(&h) } else { h };
            return Lattice::from_int(&h);
        }
    }
}
