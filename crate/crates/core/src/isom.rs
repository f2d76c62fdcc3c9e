//! Isometries of lattices: reflections, automorphism groups and isometry
//! tests for definite lattices, actions on discriminant groups.
//!
//! Matrices act on row vectors from the right: `v -> v * g`.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::lattice::{Lattice, TorsionQuadraticForm};
use crate::lll::lll_gram;
use crate::matrix::{self, IMat};
use crate::vectors::{positive_integer_form, vectors_up_to};

pub fn preserves_gram(g: &IMat, gram: &IMat) -> bool {
    matrix::congruence(g, gram) == *gram
}

pub fn preserves_lattice_gram(g: &IMat, l: &Lattice) -> bool {
    let gq = matrix::to_rat(g);
    let gram = l.gram();
    matrix::qmat_mul(&matrix::qmat_mul(&gq, &gram), &matrix::transpose(&gq)) == gram
}

/// Reflection `x -> x - 2<x,r>/<r,r> r`, which for `<r,r> = -2` is
/// `x -> x + <x,r> r`.
pub fn reflection(l: &Lattice, r: &[i64]) -> Result<IMat> {
    let rq = matrix::ivec_to_q(r);
    let rr = l.inner(&rq, &rq);
    if rr.is_zero() {
        return Err(Error::InvalidArgument("cannot reflect in an isotropic vector".into()));
    }
    let n = l.rank();
    let gram = l.gram();
    let gr = matrix::qvec_mat(&rq, &gram);
    let mut out = vec![vec![0i64; n]; n];
    for i in 0..n {
        let c = matrix::rat_int(2) * &gr[i] / &rr;
        if !c.is_integer() {
            return Err(Error::InvalidArgument("reflection is not integral on this lattice".into()));
        }
        let c = c.to_integer().to_i64().unwrap();
        for j in 0..n {
            out[i][j] = i64::from(i == j) - c * r[j];
        }
    }
    Ok(out)
}

/// Reflection in a (−2)-vector, checking the norm.
pub fn root_reflection(l: &Lattice, r: &[i64]) -> Result<IMat> {
    if l.inner_int(r, r) != matrix::rat_int(-2) {
        return Err(Error::InvalidArgument("reflection vector must have norm -2".into()));
    }
    reflection(l, r)
}

pub fn mat_inverse_int(g: &IMat) -> Option<IMat> {
    let inv = matrix::inverse_rat(&matrix::to_rat(g))?;
    inv.iter()
        .map(|r| r.iter().map(|x| if x.is_integer() { x.to_integer().to_i64() } else { None }).collect())
        .collect()
}

pub fn is_identity(g: &IMat) -> bool {
    g.iter().enumerate().all(|(i, r)| r.iter().enumerate().all(|(j, &x)| x == i64::from(i == j)))
}

pub fn negate(g: &IMat) -> IMat {
    g.iter().map(|r| r.iter().map(|x| -x).collect()).collect()
}

/// Finite group of integer matrices with a certified order.
#[derive(Clone, Debug)]
pub struct MatrixGroup {
    pub gens: Vec<IMat>,
    pub order: BigInt,
}

/// Backtracking data: a basis of the source lattice, and candidate image
/// vectors in the target lattice.
struct Search<'a> {
    n: usize,
    /// Gram matrix of the chosen source basis.
    a: IMat,
    vecs: Vec<Vec<i64>>,
    /// `vecs[i] * G_target`, for pairings.
    vg: Vec<Vec<i64>>,
    index: HashMap<Vec<i64>, usize>,
    /// Candidate indices per basis position (norm match and filter).
    base_cands: Vec<Vec<usize>>,
    nodes: u64,
    node_limit: u64,
    _marker: std::marker::PhantomData<&'a ()>,
}

impl<'a> Search<'a> {
    fn pair(&self, i: usize, j: usize) -> i64 {
        matrix::dot(&self.vg[i], &self.vecs[j])
    }

    /// Completes a partial assignment of images; returns the full list of
    /// image indices if one exists.
    fn extend(&mut self, images: &mut Vec<usize>, cands: Vec<Vec<usize>>) -> Result<Option<Vec<usize>>> {
        let k = images.len();
        if k == self.n {
            return Ok(Some(images.clone()));
        }
        self.nodes += 1;
        if self.nodes > self.node_limit {
            return Err(Error::Budget("isometry search node limit reached".into()));
        }
        let choices = cands[k].clone();
        for y in choices {
            let mut next: Vec<Vec<usize>> = Vec::with_capacity(self.n);
            let mut dead = false;
            for (j, cj) in cands.iter().enumerate() {
                if j <= k {
                    next.push(Vec::new());
                    continue;
                }
                let want = self.a[k][j];
                let f: Vec<usize> = cj.iter().copied().filter(|&v| self.pair(y, v) == want).collect();
                if f.is_empty() {
                    dead = true;
                    break;
                }
                next.push(f);
            }
            if dead {
                continue;
            }
            images.push(y);
            if let Some(found) = self.extend(images, next)? {
                images.pop();
                return Ok(Some(found));
            }
            images.pop();
        }
        Ok(None)
    }

    /// Candidate lists for levels `>= fixed.len()` consistent with the fixed
    /// images.
    fn initial_cands(&self, fixed: &[usize]) -> Option<Vec<Vec<usize>>> {
        let mut out = Vec::with_capacity(self.n);
        for j in 0..self.n {
            if j < fixed.len() {
                out.push(Vec::new());
                continue;
            }
            let f: Vec<usize> = self.base_cands[j]
                .iter()
                .copied()
                .filter(|&v| fixed.iter().enumerate().all(|(i, &x)| self.pair(x, v) == self.a[i][j]))
                .collect();
            if f.is_empty() {
                return None;
            }
            out.push(f);
        }
        Some(out)
    }

    fn find_with_prefix(&mut self, prefix: &[usize]) -> Result<Option<Vec<usize>>> {
        let Some(c) = self.initial_cands(prefix) else { return Ok(None) };
        let mut images = prefix.to_vec();
        self.extend(&mut images, c)
    }
}

/// Options for isometry searches.
#[derive(Clone, Copy, Debug)]
pub struct SearchLimits {
    pub node_limit: u64,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits { node_limit: 50_000_000 }
    }
}

type Filter<'f> = &'f dyn Fn(usize, &[i64]) -> bool;

/// Source basis (LLL reduced unless given) and its Gram matrix.
fn source_basis(g1: &IMat, basis: Option<&IMat>) -> (IMat, IMat) {
    match basis {
        Some(b) => (b.clone(), matrix::congruence(b, g1)),
        None => {
            let (t, red) = lll_gram(g1, 0.99);
            // sort by norm so short vectors come first
            let mut idx: Vec<usize> = (0..t.len()).collect();
            idx.sort_by_key(|&i| red[i][i]);
            let t2: IMat = idx.iter().map(|&i| t[i].clone()).collect();
            let red2 = matrix::congruence(&t2, g1);
            (t2, red2)
        }
    }
}

fn build_search<'a>(
    a: &IMat,
    g2: &IMat,
    filter: Option<Filter<'_>>,
    limits: SearchLimits,
) -> Result<Search<'a>> {
    let n = a.len();
    let maxn = (0..n).map(|i| a[i][i]).max().unwrap_or(0);
    let by_norm = vectors_up_to(g2, maxn)?;
    let mut vecs = Vec::new();
    for v in by_norm.values() {
        vecs.extend(v.iter().cloned());
    }
    let vg: Vec<Vec<i64>> = vecs.iter().map(|v| matrix::vec_mat(v, g2)).collect();
    let index: HashMap<Vec<i64>, usize> = vecs.iter().cloned().enumerate().map(|(i, v)| (v, i)).collect();
    let base_cands = (0..n)
        .map(|k| {
            (0..vecs.len())
                .filter(|&v| matrix::dot(&vg[v], &vecs[v]) == a[k][k])
                .filter(|&v| filter.map_or(true, |f| f(k, &vecs[v])))
                .collect()
        })
        .collect();
    Ok(Search {
        n,
        a: a.clone(),
        vecs,
        vg,
        index,
        base_cands,
        nodes: 0,
        node_limit: limits.node_limit,
        _marker: std::marker::PhantomData,
    })
}

/// Positive definite integer Gram matrices of two lattices with a common
/// scale, or `None` if their signatures or scales make them non-isometric.
fn common_forms(l1: &Lattice, l2: &Lattice) -> Result<Option<(IMat, IMat)>> {
    if l1.rank() != l2.rank() || l1.signature() != l2.signature() || l1.determinant() != l2.determinant() {
        return Ok(None);
    }
    let (g1, s1) = positive_integer_form(l1)?;
    let (g2, s2) = positive_integer_form(l2)?;
    if s1 == s2 {
        return Ok(Some((g1, g2)));
    }
    // bring both to the same scale
    let l = s1.numer().lcm(s2.numer());
    let f1 = (BigRational::from_integer(l.clone()) / &s1).to_integer().to_i64().unwrap().abs();
    let f2 = (BigRational::from_integer(l) / &s2).to_integer().to_i64().unwrap().abs();
    let sc = |g: &IMat, f: i64| g.iter().map(|r| r.iter().map(|x| x * f).collect()).collect::<IMat>();
    Ok(Some((sc(&g1, f1), sc(&g2, f2))))
}

/// An isometry `L1 -> L2` as a matrix `m` with `m G2 m^T = G1`, or `None`.
pub fn isometry_test(l1: &Lattice, l2: &Lattice) -> Result<Option<IMat>> {
    isometry_test_with(l1, l2, SearchLimits::default())
}

pub fn isometry_test_with(l1: &Lattice, l2: &Lattice, limits: SearchLimits) -> Result<Option<IMat>> {
    if !l1.is_definite() || !l2.is_definite() {
        return Err(Error::NotDefinite);
    }
    let Some((g1, g2)) = common_forms(l1, l2)? else { return Ok(None) };
    let (b, a) = source_basis(&g1, None);
    let mut s = build_search(&a, &g2, None, limits)?;
    let Some(img) = s.find_with_prefix(&[])? else { return Ok(None) };
    let m: IMat = img.iter().map(|&i| s.vecs[i].clone()).collect();
    // m maps basis b of L1; express on the standard basis: e = b^{-1} b
    let binv = mat_inverse_int(&b).expect("unimodular basis");
    Ok(Some(matrix::mat_mul(&binv, &m)))
}

/// Automorphism group of a definite lattice with a certified order.
pub fn definite_orthogonal_group(l: &Lattice) -> Result<MatrixGroup> {
    let (g, _) = positive_integer_form(l)?;
    automorphism_group_filtered(&g, None, None, SearchLimits::default())
}

/// Subgroup of automorphisms of a positive definite form `g` whose images of
/// the chosen basis vectors pass `filter`. The filter must define a subgroup
/// (for instance a congruence condition preserved under composition) for the
/// reported order to be meaningful.
pub fn automorphism_group_filtered(
    g: &IMat,
    basis: Option<&IMat>,
    filter: Option<Filter<'_>>,
    limits: SearchLimits,
) -> Result<MatrixGroup> {
    let (b, a) = source_basis(g, basis);
    let n = a.len();
    let binv = mat_inverse_int(&b).expect("unimodular basis");
    let mut s = build_search(&a, g, filter, limits)?;
    // images of the basis vectors themselves
    let base: Vec<usize> = (0..n)
        .map(|i| {
            *s.index
                .get(&b[i])
                .ok_or_else(|| Error::Validation("basis vector missing from candidate set".into()))
                .unwrap()
        })
        .collect();
    // gens act on candidate vectors: v -> v * M where M is in standard coordinates
    let mut gens: Vec<IMat> = Vec::new();
    let mut order = BigInt::one();
    for k in (0..n).rev() {
        // group generated by gens fixes base[0..k]
        let mut orbit: Vec<usize> = vec![base[k]];
        let mut in_orbit: HashMap<usize, ()> = HashMap::new();
        in_orbit.insert(base[k], ());
        let mut failed: HashMap<usize, ()> = HashMap::new();
        let prefix: Vec<usize> = base[..k].to_vec();
        let Some(cands) = s.initial_cands(&prefix) else {
            return Err(Error::Validation("identity is not an automorphism".into()));
        };
        for &y in &cands[k] {
            if in_orbit.contains_key(&y) || failed.contains_key(&y) {
                continue;
            }
            let mut pre = prefix.clone();
            pre.push(y);
            match s.find_with_prefix(&pre)? {
                Some(img) => {
                    let m: IMat = img.iter().map(|&i| s.vecs[i].clone()).collect();
                    let std_m = matrix::mat_mul(&binv, &m);
                    gens.push(std_m);
                    // recompute the orbit of base[k] under all gens
                    orbit_closure(&s, &gens, &mut orbit, &mut in_orbit)?;
                }
                None => {
                    let mut forb = vec![y];
                    let mut fset: HashMap<usize, ()> = HashMap::new();
                    fset.insert(y, ());
                    orbit_closure(&s, &gens, &mut forb, &mut fset)?;
                    failed.extend(fset);
                }
            }
        }
        order *= BigInt::from(orbit.len());
    }
    Ok(MatrixGroup { gens, order })
}

fn orbit_closure(s: &Search, gens: &[IMat], orbit: &mut Vec<usize>, seen: &mut HashMap<usize, ()>) -> Result<()> {
    let mut i = 0;
    while i < orbit.len() {
        let v = &s.vecs[orbit[i]];
        for g in gens {
            let w = matrix::vec_mat(v, g);
            let idx = *s
                .index
                .get(&w)
                .ok_or_else(|| Error::Validation("orbit left the candidate set".into()))?;
            if seen.insert(idx, ()).is_none() {
                orbit.push(idx);
            }
        }
        i += 1;
    }
    Ok(())
}

/// Action of an isometry on the discriminant group: row `i` holds the
/// coefficients of the image of generator `i`.
pub fn discriminant_action(form: &TorsionQuadraticForm, g: &IMat) -> Result<Vec<Vec<BigInt>>> {
    let gq = matrix::to_rat(g);
    form.gens
        .iter()
        .map(|x| form.coefficients(&matrix::qvec_mat(x, &gq)))
        .collect()
}

/// Whether the induced action on the discriminant group is `+1` or `-1`.
pub fn acts_as_pm1(form: &TorsionQuadraticForm, g: &IMat) -> Result<bool> {
    let act = discriminant_action(form, g)?;
    let k = form.num_gens();
    let check = |sign: i64| {
        (0..k).all(|i| {
            (0..k).all(|j| {
                let want = if i == j { BigInt::from(sign) } else { BigInt::zero() };
                (&act[i][j] - want).mod_floor(&form.orders[j]).is_zero()
            })
        })
    };
    Ok(check(1) || check(-1))
}

/// For isometries `g` of `A` and each `h` in `hs` (isometries of `B`),
/// those `h` for which `g ⊕ h` preserves the overlattice `C` of `A ⊕ B`
/// given by rational basis rows in `A ⊕ B` coordinates. Returns the pairs
/// `(h, g ⊕ h on C)`.
pub fn glue_compatible_extensions(g: &IMat, hs: &[IMat], c_basis: &[Vec<BigRational>]) -> Result<Vec<(IMat, IMat)>> {
    let cinv = matrix::inverse_rat(c_basis).ok_or(Error::Degenerate)?;
    let na = g.len();
    let mut out = Vec::new();
    for h in hs {
        let nb = h.len();
        let mut gh = vec![vec![0i64; na + nb]; na + nb];
        for i in 0..na {
            gh[i][..na].copy_from_slice(&g[i]);
        }
        for i in 0..nb {
            gh[na + i][na..].copy_from_slice(&h[i]);
        }
        let m = matrix::qmat_mul(&matrix::qmat_mul(c_basis, &matrix::to_rat(&gh)), &cinv);
        if m.iter().all(|r| r.iter().all(|x| x.is_integer())) {
            let mi = m.iter().map(|r| r.iter().map(|x| x.to_integer().to_i64().unwrap()).collect()).collect();
            out.push((h.clone(), mi));
        }
    }
    Ok(out)
}

/// Lists all elements of a finite matrix group by closure (small groups).
pub fn enumerate_elements(gens: &[IMat], n: usize, limit: usize) -> Result<Vec<IMat>> {
    let id = matrix::identity(n);
    let mut seen: HashMap<IMat, ()> = HashMap::new();
    seen.insert(id.clone(), ());
    let mut out = vec![id];
    let mut i = 0;
    while i < out.len() {
        for g in gens {
            let x = matrix::mat_mul(&out[i], g);
            if !seen.contains_key(&x) {
                if out.len() >= limit {
                    return Err(Error::Budget(format!("group has more than {limit} elements")));
                }
                seen.insert(x.clone(), ());
                out.push(x);
            }
        }
        i += 1;
    }
    Ok(out)
}

/// Multiplicative order of an integer matrix (bounded search).
pub fn matrix_order(g: &IMat, max: u64) -> Option<u64> {
    let mut x = g.clone();
    for k in 1..=max {
        if is_identity(&x) {
            return Some(k);
        }
        x = matrix::mat_mul(&x, g);
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::standard::*;

    #[test]
    fn small_orders() {
        assert_eq!(definite_orthogonal_group(&a(2)).unwrap().order, BigInt::from(12));
        assert_eq!(definite_orthogonal_group(&d(4)).unwrap().order, BigInt::from(1152));
        assert_eq!(definite_orthogonal_group(&scaled(&a(3), -2)).unwrap().order, BigInt::from(48));
    }

    #[test]
    fn generators_preserve_gram() {
        let l = scaled(&a(4), -2);
        let grp = definite_orthogonal_group(&l).unwrap();
        assert_eq!(grp.order, BigInt::from(240));
        for g in &grp.gens {
            assert!(preserves_lattice_gram(g, &l));
        }
    }

    #[test]
    fn isometry_between_bases() {
        let l = a(2);
        let b = vec![vec![1, 0], vec![3, 1]];
        let l2 = l.sublattice_gram(&b).unwrap();
        let m = isometry_test(&l2, &l).unwrap().unwrap();
        assert_eq!(matrix::congruence(&m, &l.int_gram().unwrap()), l2.int_gram().unwrap());
        assert!(isometry_test(&scaled(&a(2), -2), &scaled(&a(2), 2)).unwrap().is_none());
    }

    #[test]
    fn root_lattice_orders() {
        let cases = [(scaled(&a(6), -2), 10080u64), (scaled(&e(6), -2), 103680), (scaled(&a(8), -2), 725760)];
        for (l, want) in cases {
            assert_eq!(definite_orthogonal_group(&l).unwrap().order, BigInt::from(want));
        }
    }

    #[test]
    fn reflections() {
        let l = hyperbolic_plane().direct_sum(&scaled(&a(2), -1));
        let r = vec![0, 0, 1, 0];
        let s = root_reflection(&l, &r).unwrap();
        assert!(is_identity(&matrix::mat_mul(&s, &s)));
        assert_eq!(matrix::vec_mat(&r, &s), vec![0, 0, -1, 0]);
        assert_eq!(matrix::vec_mat(&[1, 0, 0, 0], &s), vec![1, 0, 0, 0]);
        assert_eq!(matrix::vec_mat(&[0, 1, 0, 0], &s), vec![0, 1, 0, 0]);
    }

    #[test]
    fn discriminant_actions() {
        let l = scaled(&a(2), -2);
        let form = l.discriminant_form().unwrap();
        let id = matrix::identity(2);
        assert!(acts_as_pm1(&form, &id).unwrap());
        assert!(acts_as_pm1(&form, &negate(&id)).unwrap());
        // A2(-2) has discriminant (Z/2)^2 x Z/3 -> Z/2 x Z/6; a reflection in
        // a primitive root swaps two of the order-2 elements
        let s = reflection(&l, &[1, 0]).unwrap();
        assert!(!acts_as_pm1(&form, &s).unwrap());
    }
}
