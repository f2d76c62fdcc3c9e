//! Construction of the three embeddings `S_Y(2) ⊂ S_X ⊂ L26` used as
//! fixtures.
//!
//! `P` is a negative definite lattice in the genus `II_(0,16)2^10` with a
//! prescribed root type, found among the 3-neighbors of an explicit
//! member. `L26` glues `S_Y(2) = U(2) ⊕ E8(-2)` to `P` along an isometry of
//! the two discriminant forms (both are quadratic spaces of dimension 10
//! over F2 with trivial Arf invariant). `Q ≅ K(-2)` is a primitive sublattice
//! of `P` with `Q/2 ⊂ P^v`, and `S_X` is the saturation of `S_Y(2) ⊕ Q`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::borcherds::walls::{self, norm, pair, Frame};
use crate::error::{Error, Result};
use crate::kneser::random_neighbor;
use crate::lattice::standard::{a, d, e, hyperbolic_plane, sum};
use crate::lattice::{overlattice_from_glue, Lattice, Sublattice};
use crate::lll::lll_gram;
use crate::matrix::{self, IMat, QVec};
use crate::vectors::{root_type, short_vectors};

/// Which of the three surfaces.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    F7,
    Rho16,
    Rho18,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::F7 => "f7",
            Kind::Rho16 => "rho16",
            Kind::Rho18 => "rho18",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "f7" => Ok(Kind::F7),
            "rho16" => Ok(Kind::Rho16),
            "rho18" => Ok(Kind::Rho18),
            _ => Err(Error::InvalidArgument(format!("unknown fixture kind {s}"))),
        }
    }

    pub fn p_root_type(self) -> &'static str {
        match self {
            Kind::F7 => "8A1+2D4",
            Kind::Rho16 => "D4+D5",
            Kind::Rho18 => "A3+A4",
        }
    }

    /// The lattice `K` with `Q ≅ K(-2)`.
    pub fn q_root_lattice(self) -> Lattice {
        match self {
            Kind::F7 => a(6),
            Kind::Rho16 => e(6),
            Kind::Rho18 => a(8),
        }
    }

    pub fn oq_order(self) -> u64 {
        match self {
            Kind::F7 => 10080,
            Kind::Rho16 => 103680,
            Kind::Rho18 => 725760,
        }
    }

    pub fn r_count(self) -> usize {
        match self {
            Kind::F7 => 2,
            Kind::Rho16 => 20,
            Kind::Rho18 => 1,
        }
    }
}

/// `S_Y = U ⊕ E8(-1)`.
pub fn sy_gram() -> IMat {
    hyperbolic_plane().direct_sum(&e(8).rescale_int(-1).unwrap()).int_gram().unwrap()
}

/// A member of `II_(0,16)2^10` with root type `8A1+2D4`: `(8A1 ⊕ 2D4)(-1)`
/// glued along the sum of the eight `A1` halves.
pub fn base_p() -> Result<Lattice> {
    let a8 = sum(&vec![a(1); 8]).rescale_int(-1)?;
    let d44 = sum(&[d(4), d(4)]).rescale_int(-1)?;
    let x: QVec = (0..8).map(|_| BigRational::new(1.into(), 2.into())).collect();
    let y: QVec = vec![BigRational::zero(); 8];
    Ok(overlattice_from_glue(&a8, &d44, &[(x, y)])?.lattice)
}

fn reduce_negative(l: &Lattice) -> Result<IMat> {
    let g = l.int_gram()?;
    let pos = crate::isom::negate(&g);
    Ok(crate::isom::negate(&lll_gram(&pos, 0.99).1))
}

/// A lattice in the genus of [`base_p`] with the given root type, from
/// seeded random 3-neighbors of the base.
pub fn find_p(root: &str, seed: u64, max_tries: usize) -> Result<IMat> {
    let p0 = base_p()?;
    if root_type(&p0)?.to_string() == root {
        return reduce_negative(&p0);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..max_tries {
        let n = random_neighbor(&p0, 3, &mut rng)?;
        if root_type(&n)?.to_string() == root {
            return reduce_negative(&n);
        }
    }
    Err(Error::Budget(format!("no neighbor with root type {root} in {max_tries} tries")))
}

/// Quadratic space over F2: values `q` of the basis vectors and the polar
/// bilinear form, basis vectors as bit positions.
#[derive(Clone, Debug)]
pub struct F2Quadratic {
    pub q: Vec<u8>,
    pub b: Vec<u64>,
}

impl F2Quadratic {
    pub fn dim(&self) -> usize {
        self.q.len()
    }

    pub fn bil(&self, u: u64, v: u64) -> u8 {
        let mut s = 0u32;
        for i in 0..self.dim() {
            if u >> i & 1 == 1 {
                s += (self.b[i] & v).count_ones();
            }
        }
        (s % 2) as u8
    }

    pub fn value(&self, v: u64) -> u8 {
        let n = self.dim();
        let mut s = 0u32;
        for i in 0..n {
            if v >> i & 1 == 0 {
                continue;
            }
            s += u32::from(self.q[i]);
            for j in i + 1..n {
                if v >> j & 1 == 1 {
                    s += (self.b[i] >> j & 1) as u32;
                }
            }
        }
        (s % 2) as u8
    }

    /// Symplectic basis `e1, f1, e2, f2, ...` of hyperbolic pairs
    /// (`q(e) = q(f) = 0`, `b(e,f) = 1`). Fails for a degenerate form or
    /// nontrivial Arf invariant.
    pub fn hyperbolic_basis(&self) -> Result<Vec<u64>> {
        let n = self.dim();
        let mut space: Vec<u64> = (0..n).map(|i| 1u64 << i).collect();
        let mut out = Vec::new();
        while !space.is_empty() {
            let span = span_elements(&space);
            let e = span
                .iter()
                .copied()
                .find(|&v| v != 0 && self.value(v) == 0)
                .ok_or_else(|| Error::Validation("anisotropic residue: Arf invariant is 1".into()))?;
            let mut f = span
                .iter()
                .copied()
                .find(|&v| self.bil(e, v) == 1)
                .ok_or_else(|| Error::Validation("degenerate F2 quadratic form".into()))?;
            if self.value(f) == 1 {
                f ^= e;
            }
            out.push(e);
            out.push(f);
            // complement of <e, f> inside the current space
            let mut rest = Vec::new();
            for &v in &space {
                let mut x = v;
                if self.bil(x, f) == 1 {
                    x ^= e;
                }
                if self.bil(x, e) == 1 {
                    x ^= f;
                }
                rest.push(x);
            }
            space = independent(&rest);
            space.retain(|&v| v != 0);
        }
        Ok(out)
    }
}

fn span_elements(basis: &[u64]) -> Vec<u64> {
    let mut out = vec![0u64];
    for &b in basis {
        let k = out.len();
        for i in 0..k {
            out.push(out[i] ^ b);
        }
    }
    out
}

fn independent(vs: &[u64]) -> Vec<u64> {
    let mut basis: Vec<u64> = Vec::new();
    for &v in vs {
        let mut x = v;
        for &b in &basis {
            let top = 63 - b.leading_zeros();
            if x >> top & 1 == 1 {
                x ^= b;
            }
        }
        if x != 0 {
            basis.push(x);
            basis.sort_by(|a, b| b.cmp(a));
        }
    }
    // return original-style vectors: any basis of the span will do
    basis
}

/// Inverse of an invertible F2 matrix given by rows (as bit masks).
fn f2_inverse(rows: &[u64]) -> Result<Vec<u64>> {
    let n = rows.len();
    let mut a: Vec<(u64, u64)> = rows.iter().enumerate().map(|(i, &r)| (r, 1u64 << i)).collect();
    for c in 0..n {
        let p = (c..n).find(|&i| a[i].0 >> c & 1 == 1).ok_or(Error::Degenerate)?;
        a.swap(c, p);
        for i in 0..n {
            if i != c && a[i].0 >> c & 1 == 1 {
                a[i].0 ^= a[c].0;
                a[i].1 ^= a[c].1;
            }
        }
    }
    Ok(a.into_iter().map(|(_, inv)| inv).collect())
}

/// `S_Y/2S_Y` with `q(v) = v^2/2 mod 2`: the discriminant form of `S_Y(2)`.
pub fn sy_mod2_form(sy: &IMat) -> F2Quadratic {
    let n = sy.len();
    F2Quadratic {
        q: (0..n).map(|i| ((sy[i][i] / 2).rem_euclid(2)) as u8).collect(),
        b: (0..n)
            .map(|i| (0..n).fold(0u64, |acc, j| acc | (((sy[i][j].rem_euclid(2)) as u64) << j)))
            .collect(),
    }
}

/// The discriminant form of a lattice with 2-elementary discriminant group
/// and integer-valued `q`, with its generators.
pub fn two_elementary_form(l: &Lattice) -> Result<(F2Quadratic, Vec<QVec>)> {
    let f = l.discriminant_form()?;
    if f.orders.iter().any(|o| *o != BigInt::from(2)) {
        return Err(Error::Validation("discriminant group is not 2-elementary".into()));
    }
    let n = f.num_gens();
    let two = BigRational::from_integer(2.into());
    let mut q = Vec::with_capacity(n);
    for g in &f.gens {
        let v = f.q_value(g);
        if !v.is_integer() {
            return Err(Error::Validation("discriminant form is not of even type".into()));
        }
        q.push(v.to_integer().to_u8().unwrap() % 2);
    }
    let b = (0..n)
        .map(|i| {
            (0..n).fold(0u64, |acc, j| {
                let x = f.b_value(&f.gens[i], &f.gens[j]) * &two;
                acc | ((x.to_integer().to_u64().unwrap() % 2) << j)
            })
        })
        .collect();
    Ok((F2Quadratic { q, b }, f.gens.clone()))
}

/// An isometry `S_Y/2S_Y -> P^v/P` of F2 quadratic spaces, as the images
/// of the standard basis vectors (bit masks over the generators of `P^v/P`).
pub fn discriminant_isometry(src: &F2Quadratic, dst: &F2Quadratic) -> Result<Vec<u64>> {
    if src.dim() != dst.dim() {
        return Err(Error::Dimension("discriminant ranks differ".into()));
    }
    let hs = src.hyperbolic_basis()?;
    let hd = dst.hyperbolic_basis()?;
    // standard vector i = sum_k c_ik hs_k, with c = inverse of the matrix of hs
    let inv = f2_inverse(&hs)?;
    let n = src.dim();
    let mut out = Vec::with_capacity(n);
    for &row in inv.iter().take(n) {
        let mut img = 0u64;
        for (k, &h) in hd.iter().enumerate() {
            if row >> k & 1 == 1 {
                img ^= h;
            }
        }
        out.push(img);
    }
    // verify
    for i in 0..n {
        if src.value(1 << i) != dst.value(out[i]) {
            return Err(Error::Validation("discriminant map does not preserve q".into()));
        }
        for j in 0..n {
            if src.bil(1 << i, 1 << j) != dst.bil(out[i], out[j]) {
                return Err(Error::Validation("discriminant map does not preserve b".into()));
            }
        }
    }
    Ok(out)
}

/// `L26` as an overlattice of `S_Y(2) ⊕ P` and the coordinates of both
/// summands in its basis.
pub struct Gluing {
    pub l26: IMat,
    pub es: IMat,
    pub ep: IMat,
}

pub fn glue_l26(p_gram: &IMat) -> Result<Gluing> {
    let sy = sy_gram();
    let sy2 = Lattice::from_int(&sy)?.rescale_int(2)?;
    let pl = Lattice::from_int(p_gram)?;
    let (fp, gens) = two_elementary_form(&pl)?;
    let fs = sy_mod2_form(&sy);
    let delta = discriminant_isometry(&fs, &fp)?;
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let mut glue = Vec::new();
    for (i, &img) in delta.iter().enumerate() {
        let x: QVec = (0..10).map(|j| if j == i { half.clone() } else { BigRational::zero() }).collect();
        let mut y: QVec = vec![BigRational::zero(); 16];
        for (k, g) in gens.iter().enumerate() {
            if img >> k & 1 == 1 {
                for (yj, gj) in y.iter_mut().zip(g) {
                    *yj += gj;
                }
            }
        }
        glue.push((x, y));
    }
    let ov = overlattice_from_glue(&sy2, &pl, &glue)?;
    let l26 = ov.lattice.int_gram()?;
    let binv = matrix::inverse_rat(&ov.basis).ok_or(Error::Degenerate)?;
    let coords = |i: usize| -> Result<Vec<i64>> {
        binv[i]
            .iter()
            .map(|x| {
                if x.is_integer() {
                    Ok(x.to_integer().to_i64().unwrap())
                } else {
                    Err(Error::Validation("summand vector is not in L26".into()))
                }
            })
            .collect()
    };
    let es = (0..10).map(coords).collect::<Result<IMat>>()?;
    let ep = (10..26).map(coords).collect::<Result<IMat>>()?;
    Ok(Gluing { l26, es, ep })
}

/// Vectors `v_1..v_n` of `P` with Gram matrix `target` spanning a primitive
/// sublattice with `v_i P ⊂ 2Z`; the first in a fixed search order.
pub fn find_scaled_root_sublattice(p_gram: &IMat, target: &IMat, skip: usize) -> Result<Option<IMat>> {
    let pl = Lattice::from_int(p_gram)?;
    let n = target.len();
    let norm_t = target[0][0];
    let mut cands: Vec<Vec<i64>> = Vec::new();
    for v in short_vectors(&pl, &matrix::rat_int(norm_t))? {
        if matrix::vec_mat(&v, p_gram).iter().all(|c| c % 2 == 0) {
            cands.push(v.clone());
            cands.push(v.iter().map(|x| -x).collect());
        }
    }
    let cg: Vec<Vec<i64>> = cands.iter().map(|v| matrix::vec_mat(v, p_gram)).collect();
    let mut chosen: Vec<usize> = Vec::new();
    let mut found = 0usize;
    fn rec(
        k: usize,
        n: usize,
        target: &IMat,
        cands: &[Vec<i64>],
        cg: &[Vec<i64>],
        chosen: &mut Vec<usize>,
        pl: &Lattice,
        skip: usize,
        found: &mut usize,
    ) -> Option<IMat> {
        if k == n {
            let rows: IMat = chosen.iter().map(|&i| cands[i].clone()).collect();
            let s = Sublattice::new(pl, &rows).ok()?;
            if !s.is_primitive() {
                return None;
            }
            if *found == skip {
                return Some(rows);
            }
            *found += 1;
            return None;
        }
        for i in 0..cands.len() {
            if chosen.iter().enumerate().all(|(j, &c)| matrix::dot(&cg[c], &cands[i]) == target[j][k]) {
                chosen.push(i);
                let r = rec(k + 1, n, target, cands, cg, chosen, pl, skip, found);
                chosen.pop();
                if r.is_some() {
                    return r;
                }
            }
        }
        None
    }
    // the first vector can be fixed up to the automorphisms we ignore; try all
    Ok(rec(0, n, target, &cands, &cg, &mut chosen, &pl, skip, &mut found))
}

/// Assembled embedding data before serialization.
#[derive(Clone, Debug)]
pub struct Built {
    pub kind: Kind,
    pub l26: IMat,
    pub sx_in_l26: IMat,
    pub sy2_in_sx: IMat,
    pub alpha: Vec<i64>,
    pub weyl: Vec<i64>,
}

/// Default search parameters per kind.
pub fn seed_for(kind: Kind) -> u64 {
    match kind {
        Kind::F7 => 0,
        Kind::Rho16 => 1,
        Kind::Rho18 => 2,
    }
}

const PERTURBATION: [i64; 10] = [1, 2, -1, 3, 1, -2, 1, 1, -1, 2];

/// Starting ample class in `S_Y = U ⊕ E8(-1)`: generic, positive norm.
pub fn initial_alpha() -> Vec<i64> {
    vec![9, 13, 1, -2, 3, 1, -1, 2, 0, 1]
}

pub fn build(kind: Kind, q_choice: usize) -> Result<Built> {
    build_seeded(kind, q_choice, seed_for(kind))
}

/// [`build`] with an explicit seed for the search for `P`.
pub fn build_seeded(kind: Kind, q_choice: usize, seed: u64) -> Result<Built> {
    let p = find_p(kind.p_root_type(), seed, 20_000)?;
    let gl = glue_l26(&p)?;
    let frame = Frame::new(gl.l26.clone(), gl.es.clone())?;
    let target = kind.q_root_lattice().rescale_int(-2)?.int_gram()?;
    let q = find_scaled_root_sublattice(&frame.p_gram, &target, q_choice)?
        .ok_or_else(|| Error::Validation("no primitive K(-2) in P".into()))?;
    let mut rows = frame.es.clone();
    for v in &q {
        rows.push(matrix::vec_mat(v, &frame.ep));
    }
    let lat = Lattice::from_int(&frame.l26)?;
    let sx = Sublattice::new(&lat, &rows)?.primitive_closure().basis;
    let sy2_in_sx = express_rows(&frame.es, &sx)?;
    // Weyl vector from the isotropic first vector of U(2)
    let w0 = walls::weyl_vector_from_isotropic(&frame.l26, &frame.es[0])?;
    let mut alpha = initial_alpha();
    let al = frame.push_sy(&alpha);
    let w0 = if pair(&frame.l26, &w0, &al) < 0 { w0.iter().map(|x| -x).collect() } else { w0 };
    let mut w = frame.descend(w0, &al)?;
    let mut wall_set = frame.induced_walls(&w)?;
    if !walls::strictly_inside(&frame.sy, &wall_set, &alpha) {
        // alpha sits on a wall: a nearby generic point picks one chamber
        alpha = alpha.iter().zip(PERTURBATION).map(|(x, y)| 97 * x + y).collect();
        w = frame.descend(w, &frame.push_sy(&alpha))?;
        wall_set = frame.induced_walls(&w)?;
        if !walls::strictly_inside(&frame.sy, &wall_set, &alpha) {
            return Err(Error::Validation("initial ample class lies on a wall".into()));
        }
    }
    // prefer a short interior point
    let z = frame.s2(&w);
    let g = z.iter().fold(0i64, |acc, &x| num_integer::Integer::gcd(&acc, &x));
    let zr: Vec<i64> = z.iter().map(|x| x / g.max(1)).collect();
    if norm(&frame.sy, &zr) > 0 && walls::strictly_inside(&frame.sy, &wall_set, &zr) {
        alpha = zr;
    }
    Ok(Built { kind, l26: frame.l26.clone(), sx_in_l26: sx, sy2_in_sx, alpha, weyl: w })
}

/// Coordinates of the rows of `a` in the row basis `b` (integral).
pub fn express_rows(a: &IMat, b: &IMat) -> Result<IMat> {
    // a = c b; solve via rational least squares on b b^T
    let bq = matrix::to_rat(b);
    let bbt = matrix::qmat_mul(&bq, &matrix::transpose(&bq));
    let inv = matrix::inverse_rat(&bbt).ok_or(Error::Degenerate)?;
    let c = matrix::qmat_mul(&matrix::qmat_mul(&matrix::to_rat(a), &matrix::transpose(&bq)), &inv);
    let ci: IMat = c
        .iter()
        .map(|r| {
            r.iter()
                .map(|x| {
                    if x.is_integer() {
                        Ok(x.to_integer().to_i64().unwrap())
                    } else {
                        Err(Error::Validation("rows are not in the span".into()))
                    }
                })
                .collect::<Result<Vec<i64>>>()
        })
        .collect::<Result<IMat>>()?;
    if matrix::mat_mul(&ci, b) != *a {
        return Err(Error::Validation("rows are not in the lattice".into()));
    }
    Ok(ci)
}
