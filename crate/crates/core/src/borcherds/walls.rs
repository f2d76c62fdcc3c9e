//! Conway chambers of the even unimodular lattice of signature (1,25) and
//! the chambers they induce on an embedded `S_Y(2)`.
//!
//! Coordinates: `L26` vectors are integer rows in the basis of the stored
//! Gram matrix; `S_Y(2)` and its complement `P` are given by basis rows in
//! those coordinates. A vector of `S_Y ⊗ Q` is written in the `S_Y` basis.

use std::collections::BTreeMap;

use num_traits::Signed;

use crate::borcherds::lp;
use crate::error::{Error, Result};
use crate::lattice::{Lattice, Sublattice};
use crate::matrix::{self, IMat, QVec};
use crate::vectors::{affine_coset_slice_each, short_vectors, solve_linear, LinearSystem, SliceEnumerator};

/// `L26 ⊃ S_Y(2) ⊕ P` with the data needed for projections.
#[derive(Clone, Debug)]
pub struct Frame {
    pub l26: IMat,
    /// Gram matrix of `S_Y` (unimodular, hyperbolic).
    pub sy: IMat,
    sy_inv: IMat,
    /// `S_Y(2)` basis in `L26` coordinates.
    pub es: IMat,
    /// `P` basis in `L26` coordinates.
    pub ep: IMat,
    pub p_gram: IMat,
    /// `2 P^{-1}`, integral since `P^v ⊂ P/2`.
    p_inv2: IMat,
}

fn int_inverse_scaled(g: &IMat, scale: i64) -> Result<IMat> {
    let inv = matrix::inverse_rat(&matrix::to_rat(g)).ok_or(Error::Degenerate)?;
    let s = matrix::rat_int(scale);
    inv.iter()
        .map(|r| {
            r.iter()
                .map(|x| {
                    let y = x * &s;
                    if y.is_integer() {
                        Ok(num_traits::ToPrimitive::to_i64(&y.to_integer()).unwrap())
                    } else {
                        Err(Error::Validation(format!("inverse Gram is not in (1/{scale})Z")))
                    }
                })
                .collect()
        })
        .collect()
}

pub(crate) fn norm(g: &IMat, v: &[i64]) -> i64 {
    matrix::dot(&matrix::vec_mat(v, g), v)
}

pub(crate) fn pair(g: &IMat, u: &[i64], v: &[i64]) -> i64 {
    matrix::dot(&matrix::vec_mat(u, g), v)
}

impl Frame {
    /// Checks that `L26` is even unimodular of signature (1,25), that `es`
    /// spans a primitive copy of `S_Y(2)` and that its complement `P` is
    /// negative definite with `2 P^v ⊂ P`.
    pub fn new(l26: IMat, es: IMat) -> Result<Self> {
        let lat = Lattice::from_int(&l26)?;
        if lat.rank() != 26 || lat.signature() != (1, 25) || !lat.is_even() || lat.determinant().abs() != matrix::rat_int(1) {
            return Err(Error::Validation("L26 must be even unimodular of signature (1,25)".into()));
        }
        let s = Sublattice::new(&lat, &es)?;
        if !s.is_primitive() {
            return Err(Error::Validation("S_Y(2) is not primitive in L26".into()));
        }
        let sy2 = matrix::congruence(&es, &l26);
        if sy2.iter().flatten().any(|x| x % 2 != 0) {
            return Err(Error::Validation("embedded S_Y(2) form is not divisible by 2".into()));
        }
        let sy: IMat = sy2.iter().map(|r| r.iter().map(|x| x / 2).collect()).collect();
        let syl = Lattice::from_int(&sy)?;
        if syl.signature() != (1, 9) || !syl.is_even() || syl.determinant().abs() != matrix::rat_int(1) {
            return Err(Error::Validation("S_Y must be even unimodular of signature (1,9)".into()));
        }
        let sy_inv = int_inverse_scaled(&sy, 1)?;
        let ep = s.orthogonal_complement().basis;
        let p_gram = matrix::congruence(&ep, &l26);
        let pl = Lattice::from_int(&p_gram)?;
        if pl.rank() != 16 || !pl.is_negative_definite() {
            return Err(Error::Validation("P must be negative definite of rank 16".into()));
        }
        let p_inv2 = int_inverse_scaled(&p_gram, 2)?;
        Ok(Frame { l26, sy, sy_inv, es, ep, p_gram, p_inv2 })
    }

    /// Twice the `S_Y(2)` component of `v`, in `S_Y` coordinates.
    pub fn s2(&self, v: &[i64]) -> Vec<i64> {
        let pairings: Vec<i64> = self.es.iter().map(|e| pair(&self.l26, v, e)).collect();
        matrix::vec_mat(&pairings, &self.sy_inv)
    }

    /// Twice the `P` component of `v`, in `P` coordinates.
    pub fn p2(&self, v: &[i64]) -> Vec<i64> {
        let pairings: Vec<i64> = self.ep.iter().map(|e| pair(&self.l26, v, e)).collect();
        matrix::vec_mat(&pairings, &self.p_inv2)
    }

    /// Image in `L26` of a vector of `S_Y` (through `S_Y(2)`).
    pub fn push_sy(&self, y: &[i64]) -> Vec<i64> {
        matrix::vec_mat(y, &self.es)
    }

    /// `S_Y` coordinates `v` (mod 2) with `v es + x ep ≡ 0 (mod 2)`, if any.
    fn partner_class(&self, x: &[i64]) -> Option<Vec<i64>> {
        let target: Vec<i64> = matrix::vec_mat(x, &self.ep).iter().map(|c| c.rem_euclid(2)).collect();
        solve_mod2(&self.es, &target)
    }

    /// Leech roots of the Conway chamber of `w` whose `P` component is
    /// `x/2` with `x^2 = -4`, returned as `S_Y` vectors `v` with
    /// `v^2 = -2` defining the hyperplanes `v^⊥` in `S_Y ⊗ R`. These are
    /// the only Leech roots meeting `P_Y` in a hyperplane.
    pub fn induced_wall_candidates(&self, w: &[i64]) -> Result<Vec<Vec<i64>>> {
        let a: Vec<i64> = self.es.iter().map(|e| pair(&self.l26, e, w)).collect();
        let b: Vec<i64> = self.ep.iter().map(|e| pair(&self.l26, e, w)).collect();
        let z = self.s2(w);
        if norm(&self.sy, &z) <= 0 {
            return Err(Error::NonCompact("Weyl vector does not project into the positive cone".into()));
        }
        let pl = Lattice::from_int(&self.p_gram)?;
        let mut groups: BTreeMap<(Vec<i64>, i64), ()> = BTreeMap::new();
        for x0 in short_vectors(&pl, &matrix::rat_int(-4))? {
            for sign in [1i64, -1] {
                let x: Vec<i64> = x0.iter().map(|c| sign * c).collect();
                let Some(cls) = self.partner_class(&x) else { continue };
                groups.insert((cls, 2 - matrix::dot(&x, &b)), ());
            }
        }
        let mut out = Vec::new();
        for (cls, t) in groups.keys() {
            affine_coset_slice_each(&self.sy, &[a.clone()], &[*t], 2, cls, &matrix::rat_int(-2), |v| {
                out.push(v.to_vec());
                true
            })?;
        }
        out.sort();
        out.dedup();
        Ok(out)
    }

    /// Walls of the chamber induced by the Conway chamber of `w`: the
    /// candidates that are not implied by the others.
    pub fn induced_walls(&self, w: &[i64]) -> Result<Vec<Vec<i64>>> {
        let cands = self.induced_wall_candidates(w)?;
        Ok(irredundant(&self.sy, &cands))
    }

    /// A Leech root `r` (with `r^2 = -2`, `<w,r> = 1`) with `<a,r> < 0`.
    pub fn negative_leech_root(&self, w: &[i64], a: &[i64]) -> Result<Option<Vec<i64>>> {
        let wa = pair(&self.l26, w, a);
        let aa = norm(&self.l26, a);
        if wa <= 0 || aa <= 0 {
            return Err(Error::InvalidArgument("w and a must pair positively, a in the positive cone".into()));
        }
        // the projection to span(w, a) has norm 2k/W - A/W^2 >= -2
        let lower = div_ceil(aa - 2 * wa * wa, 2 * wa);
        let cw = matrix::vec_mat(w, &self.l26);
        let ca = matrix::vec_mat(a, &self.l26);
        let sys = LinearSystem::new(&[cw, ca], 26)?;
        let en = SliceEnumerator::new(&self.l26, &sys.kernel)?;
        let m2 = matrix::rat_int(-2);
        for k in lower..0 {
            let Some(x0) = sys.solve(&[1, k]) else { continue };
            let mut found = None;
            en.each(&x0, &m2, |r| {
                found = Some(r.to_vec());
                false
            })?;
            if found.is_some() {
                return Ok(found);
            }
        }
        Ok(None)
    }

    /// Moves the Weyl vector `w` across Leech roots until `a` lies in its
    /// Conway chamber. Each step lowers `<w,a>`.
    pub fn descend(&self, mut w: Vec<i64>, a: &[i64]) -> Result<Vec<i64>> {
        while let Some(r) = self.negative_leech_root(&w, a)? {
            for (x, y) in w.iter_mut().zip(&r) {
                *x += y;
            }
        }
        Ok(w)
    }
}

fn div_ceil(a: i64, b: i64) -> i64 {
    -((-a).div_euclid(b))
}

/// Solves `v M ≡ t (mod 2)` for `v`, with `M` of full row rank mod 2.
pub(crate) fn solve_mod2(m: &IMat, t: &[i64]) -> Option<Vec<i64>> {
    let k = m.len();
    let n = t.len();
    // columns of the augmented system: n equations in k unknowns
    let mut rows: Vec<(u128, u8)> = (0..n)
        .map(|j| {
            let mut r = 0u128;
            for (i, mi) in m.iter().enumerate() {
                if mi[j].rem_euclid(2) == 1 {
                    r |= 1 << i;
                }
            }
            (r, (t[j].rem_euclid(2)) as u8)
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r0 = 0;
    for c in 0..k {
        let Some(p) = (r0..n).find(|&i| rows[i].0 >> c & 1 == 1) else { continue };
        rows.swap(r0, p);
        for i in 0..n {
            if i != r0 && rows[i].0 >> c & 1 == 1 {
                rows[i].0 ^= rows[r0].0;
                rows[i].1 ^= rows[r0].1;
            }
        }
        pivots.push(c);
        r0 += 1;
    }
    if rows[r0..].iter().any(|&(_, b)| b == 1) {
        return None;
    }
    let mut v = vec![0i64; k];
    for (i, &c) in pivots.iter().enumerate() {
        v[c] = i64::from(rows[i].1);
    }
    Some(v)
}

/// Wall vectors `v` (defining `y G v >= 0`) that are extremal among `cands`.
pub fn irredundant(g: &IMat, cands: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let forms: Vec<QVec> = cands.iter().map(|v| matrix::ivec_to_q(&matrix::vec_mat(v, g))).collect();
    lp::extremal(&forms).into_iter().map(|i| cands[i].clone()).collect()
}

/// Whether `y` lies strictly inside the cone `{y : y G v > 0}`.
pub fn strictly_inside(g: &IMat, walls: &[Vec<i64>], y: &[i64]) -> bool {
    walls.iter().all(|v| pair(g, y, v) > 0)
}

/// A Weyl vector of `L26` built from a primitive isotropic `e`: with
/// `f` isotropic and `<e,f> = 1`, the complement of `{e, f}` is a Niemeier
/// lattice `N(-1)` with Weyl vector `rho` and Coxeter number `h`, and one of
/// `rho + h e + (h+1) f`, `rho + (h+1) e + h f` (up to sign) has a rootless
/// Leech lattice as `w^⊥/w`.
pub fn weyl_vector_from_isotropic(l26: &IMat, e: &[i64]) -> Result<Vec<i64>> {
    let n = l26.len();
    if norm(l26, e) != 0 {
        return Err(Error::InvalidArgument("e must be isotropic".into()));
    }
    let ce = matrix::vec_mat(e, l26);
    let Some((mut f, _)) = solve_linear(&[ce], &[1], n)? else {
        return Err(Error::InvalidArgument("e is not primitive".into()));
    };
    let ff = norm(l26, &f);
    for (x, y) in f.iter_mut().zip(e) {
        *x -= ff / 2 * y;
    }
    let lat = Lattice::from_int(l26)?;
    let comp = Sublattice::new(&lat, &[e.to_vec(), f.clone()])?.orthogonal_complement();
    let ng = matrix::congruence(&comp.basis, l26);
    let nl = Lattice::from_int(&ng)?;
    let roots = short_vectors(&nl, &matrix::rat_int(-2))?;
    let h = (2 * roots.len() / 24) as i64;
    // positive roots for a generic functional
    let func: Vec<i64> = (0..ng.len()).map(|i| 1 + (i as i64) * 1009 + (i as i64 * i as i64) * 7919).collect();
    let mut rho2 = vec![0i64; ng.len()];
    for r in &roots {
        let s = matrix::dot(r, &func);
        if s == 0 {
            return Err(Error::Validation("functional vanishes on a root".into()));
        }
        let sign = if s > 0 { 1 } else { -1 };
        for (x, y) in rho2.iter_mut().zip(r) {
            *x += sign * y;
        }
    }
    if rho2.iter().any(|x| x % 2 != 0) {
        return Err(Error::Validation("Weyl vector of the Niemeier lattice is not integral".into()));
    }
    let rho_n: Vec<i64> = rho2.iter().map(|x| x / 2).collect();
    let rho = matrix::vec_mat(&rho_n, &comp.basis);
    for (a, b) in [(h, h + 1), (h + 1, h)] {
        let w: Vec<i64> = (0..n).map(|i| rho[i] + a * e[i] + b * f[i]).collect();
        if norm(l26, &w) == 0 && is_weyl_vector(l26, &w)? {
            return Ok(w);
        }
    }
    Err(Error::Validation("no Weyl vector found from the Niemeier frame".into()))
}

/// Primitive isotropic `w` with `w^⊥/w` free of roots.
pub fn is_weyl_vector(l26: &IMat, w: &[i64]) -> Result<bool> {
    let n = l26.len();
    if w.iter().all(|&x| x == 0) || norm(l26, w) != 0 {
        return Ok(false);
    }
    let cw = matrix::vec_mat(w, l26);
    let Some((w2, _)) = solve_linear(&[cw], &[1], n)? else { return Ok(false) };
    let lat = Lattice::from_int(l26)?;
    let comp = Sublattice::new(&lat, &[w.to_vec(), w2])?.orthogonal_complement();
    let g = matrix::congruence(&comp.basis, l26);
    Ok(short_vectors(&Lattice::from_int(&g)?, &matrix::rat_int(-2))?.is_empty())
}
