//! Lattices with an isometry of cyclotomic characteristic polynomial: the
//! principal trace form on `Z[ζ_n]`, its twists by elements of the real
//! subring `Z[ζ + ζ^-1]`, and enumeration of twists under constraints.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::cyclo::{cyclotomic, euler_phi, IntPoly};
use crate::error::{Error, Result};
use crate::genus::{genus_symbol, jordan_decomposition, GenusSymbol};
use crate::isom;
use crate::lattice::Lattice;
use crate::matrix::{self, BMat, IMat, QMat};
use crate::vectors::{vectors_up_to, Ellipsoid};

/// A lattice together with an isometry whose characteristic polynomial is
/// `Φ_n`; the isometry acts on row vectors.
#[derive(Clone, Debug)]
pub struct PhiLattice {
    pub n: u64,
    pub lattice: Lattice,
    pub isometry: IMat,
    /// Coordinates of the twisting element in the power basis of
    /// `ζ + ζ^-1`, relative to the principal lattice.
    pub twist: Vec<i64>,
}

impl PhiLattice {
    pub fn check(&self) -> Result<()> {
        if !isom::preserves_lattice_gram(&self.isometry, &self.lattice) {
            return Err(Error::Validation("isometry does not preserve the form".into()));
        }
        if charpoly(&self.isometry) != cyclotomic(self.n as i64)? {
            return Err(Error::Validation("characteristic polynomial is not cyclotomic".into()));
        }
        if !self.lattice.is_even() {
            return Err(Error::NotEven);
        }
        Ok(())
    }
}

/// Characteristic polynomial `det(x - M)` (Faddeev-LeVerrier).
pub fn charpoly(m: &IMat) -> IntPoly {
    let n = m.len();
    let a = matrix::to_rat(m);
    let mut c = vec![BigRational::zero(); n + 1];
    c[n] = BigRational::one();
    let mut mk: QMat = vec![vec![BigRational::zero(); n]; n];
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = matrix::qmat_mul(&a, &mk);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += &c[n - k + 1];
        }
        mk = next;
        let am = matrix::qmat_mul(&a, &mk);
        let tr: BigRational = (0..n).map(|i| am[i][i].clone()).sum();
        c[n - k] = -tr / BigRational::from_integer(BigInt::from(k));
    }
    IntPoly::new(c.into_iter().map(|x| x.to_integer()).collect())
}

pub fn mobius(m: u64) -> i64 {
    let mut n = m;
    let mut r = 1;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            r = -r;
        }
        p += 1;
    }
    if n > 1 {
        r = -r;
    }
    r
}

/// `Tr_{Q(ζ_n)/Q}(ζ_n^k)`.
pub fn ramanujan_sum(n: u64, k: i64) -> i64 {
    let g = (k.rem_euclid(n as i64) as u64).gcd(&n);
    let g = if g == 0 { n } else { g };
    mobius(n / g) * (euler_phi(n) / euler_phi(n / g)) as i64
}

/// Remainder of `p` modulo the monic polynomial `m`.
fn reduce(p: &IntPoly, m: &IntPoly) -> IntPoly {
    p.divrem_monic(m).1
}

fn padded(p: &IntPoly, d: usize) -> Vec<BigInt> {
    let mut v = p.0.clone();
    v.resize(d, BigInt::zero());
    v
}

/// Matrix of multiplication by `a` on `Z[x]/(m)`, rows are images of the
/// power basis.
fn mult_matrix(a: &IntPoly, m: &IntPoly) -> BMat {
    let d = m.degree();
    let mut cur = reduce(a, m);
    let x = IntPoly::from_i64(&[0, 1]);
    let mut rows = Vec::with_capacity(d);
    for _ in 0..d {
        rows.push(padded(&cur, d));
        cur = reduce(&cur.mul(&x), m);
    }
    rows
}

/// The real subfield `Q(ζ_n + ζ_n^-1)` with its power basis in
/// `θ = ζ_n + ζ_n^-1`.
#[derive(Clone, Debug)]
pub struct RealSubfield {
    pub n: u64,
    /// Minimal polynomial of θ.
    pub minpoly: IntPoly,
    /// Real embeddings `θ -> 2 cos(2πk/n)`.
    pub embeddings: Vec<f64>,
}

impl RealSubfield {
    pub fn new(n: u64) -> Result<Self> {
        if n <= 2 {
            return Err(Error::InvalidArgument(format!("need n > 2, got {n}")));
        }
        let phi = cyclotomic(n as i64)?;
        let d = phi.degree() / 2;
        // Φ_n(x) = x^d r(x + 1/x), expanded with x^k + x^-k = D_k(x + 1/x)
        let t = IntPoly::from_i64(&[0, 1]);
        let mut dk = vec![IntPoly::from_i64(&[2]), t.clone()];
        for k in 2..=d {
            let next = t.mul(&dk[k - 1]);
            let prev = &dk[k - 2];
            let len = next.0.len().max(prev.0.len());
            let mut c = padded(&next, len);
            for (i, x) in prev.0.iter().enumerate() {
                c[i] -= x;
            }
            dk.push(IntPoly::new(c));
        }
        let mut r = vec![BigInt::zero(); d + 1];
        r[0] = phi.0[d].clone();
        for k in 1..=d {
            for (i, x) in dk[k].0.iter().enumerate() {
                r[i] += &phi.0[d + k] * x;
            }
        }
        let minpoly = IntPoly::new(r);
        let embeddings = (1..n)
            .filter(|&k| k.gcd(&n) == 1 && 2 * k < n)
            .map(|k| 2.0 * (2.0 * std::f64::consts::PI * k as f64 / n as f64).cos())
            .collect();
        Ok(RealSubfield { n, minpoly, embeddings })
    }

    pub fn degree(&self) -> usize {
        self.minpoly.degree()
    }

    pub fn poly(&self, a: &[i64]) -> IntPoly {
        IntPoly::from_i64(a)
    }

    pub fn norm(&self, a: &[i64]) -> BigInt {
        matrix::det_big(&mult_matrix(&self.poly(a), &self.minpoly))
    }

    /// Integer Gram matrix of the trace form `Tr(xy)` on the power basis.
    pub fn trace_gram(&self) -> IMat {
        let d = self.degree();
        let tr = |k: usize| -> i64 {
            let mut c = vec![0i64; k + 1];
            c[k] = 1;
            let m = mult_matrix(&IntPoly::from_i64(&c), &self.minpoly);
            (0..d).map(|i| m[i][i].to_i64().unwrap()).sum()
        };
        (0..d).map(|i| (0..d).map(|j| tr(i + j)).collect()).collect()
    }

    pub fn embed(&self, a: &[i64]) -> Vec<f64> {
        self.embeddings
            .iter()
            .map(|&t| a.iter().rev().fold(0.0, |acc, &c| acc * t + c as f64))
            .collect()
    }

    pub fn log_embedding(&self, a: &[i64]) -> Vec<f64> {
        self.embed(a).iter().map(|x| x.abs().ln()).collect()
    }

    /// Independent units generating a subgroup of finite index in the unit
    /// group, found among elements of small trace norm.
    pub fn units(&self) -> Result<Vec<Vec<i64>>> {
        let d = self.degree();
        let rank = d - 1;
        if rank == 0 {
            return Ok(Vec::new());
        }
        let gram = self.trace_gram();
        let mut bound = 4 * d as i64;
        loop {
            let mut found: Vec<(f64, Vec<i64>)> = Vec::new();
            for vs in vectors_up_to(&gram, bound)?.values() {
                for v in vs {
                    if self.norm(v).abs().is_one() {
                        let l: f64 = self.log_embedding(v).iter().map(|x| x.abs()).sum();
                        if l > 1e-6 {
                            found.push((l, v.clone()));
                        }
                    }
                }
            }
            found.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
            let mut chosen: Vec<Vec<i64>> = Vec::new();
            let mut logs: Vec<Vec<f64>> = Vec::new();
            for (_, v) in found {
                let lv: Vec<f64> = self.log_embedding(&v)[..rank].to_vec();
                let mut trial = logs.clone();
                trial.push(lv.clone());
                if gram_det_f64(&trial) > 1e-8 {
                    logs = trial;
                    chosen.push(v);
                    if chosen.len() == rank {
                        return Ok(chosen);
                    }
                }
            }
            if bound > 1 << 20 {
                return Err(Error::Budget("unit search did not reach full rank".into()));
            }
            bound *= 2;
        }
    }
}

fn gram_det_f64(rows: &[Vec<f64>]) -> f64 {
    let k = rows.len();
    let mut g: Vec<Vec<f64>> = (0..k)
        .map(|i| (0..k).map(|j| rows[i].iter().zip(&rows[j]).map(|(a, b)| a * b).sum()).collect())
        .collect();
    let mut det = 1.0;
    for i in 0..k {
        let p = g[i][i];
        if p.abs() < 1e-12 {
            return 0.0;
        }
        det *= p;
        for r in i + 1..k {
            let f = g[r][i] / p;
            for c in i..k {
                g[r][c] -= f * g[i][c];
            }
        }
    }
    det
}

/// Expresses `θ^k` in the power basis of `ζ`, for `k < d`.
fn theta_powers_in_zeta(n: u64, d: usize, phi: &IntPoly) -> Vec<IntPoly> {
    let mut theta = vec![BigInt::zero(); n as usize];
    theta[1] += 1;
    theta[n as usize - 1] += 1;
    let theta = reduce(&IntPoly::new(theta), phi);
    let mut out = vec![IntPoly::one()];
    for k in 1..d {
        out.push(reduce(&out[k - 1].mul(&theta), phi));
    }
    out
}

fn to_zeta_basis(n: u64, coeffs_theta: &[BigRational]) -> Result<Vec<BigRational>> {
    let phi = cyclotomic(n as i64)?;
    let m = phi.degree();
    let pows = theta_powers_in_zeta(n, coeffs_theta.len(), &phi);
    let mut out = vec![BigRational::zero(); m];
    for (c, p) in coeffs_theta.iter().zip(&pows) {
        for (i, x) in p.0.iter().enumerate() {
            out[i] += c * BigRational::from_integer(x.clone());
        }
    }
    Ok(out)
}

/// Matrix of multiplication by ζ on the power basis of `Z[ζ_n]`.
pub fn zeta_matrix(n: u64) -> Result<IMat> {
    let phi = cyclotomic(n as i64)?;
    let m = mult_matrix(&IntPoly::from_i64(&[0, 1]), &phi);
    matrix::big_to_i64(&m).ok_or_else(|| Error::InvalidArgument("coefficient overflow".into()))
}

/// The principal Φ_n-lattice: `Z[ζ_n]` with `<x, y> = Tr(x ȳ / r'(θ))` where
/// `r` is the minimal polynomial of `θ = ζ + ζ^-1`; the isometry is
/// multiplication by ζ.
pub fn principal_phi_lattice(n: u64) -> Result<PhiLattice> {
    let k = RealSubfield::new(n)?;
    let d = k.degree();
    let rp = k.minpoly.derivative();
    let m = matrix::to_rat_big(&mult_matrix(&rp, &k.minpoly));
    let inv = matrix::inverse_rat(&m).ok_or(Error::Degenerate)?;
    let s_theta: Vec<BigRational> = inv[0].clone();
    debug_assert_eq!(s_theta.len(), d);
    let s = to_zeta_basis(n, &s_theta)?;
    let deg = 2 * d;
    let mut gram = vec![vec![BigRational::zero(); deg]; deg];
    for (i, row) in gram.iter_mut().enumerate() {
        for (j, e) in row.iter_mut().enumerate() {
            let shift = i as i64 - j as i64;
            for (t, c) in s.iter().enumerate() {
                if !c.is_zero() {
                    *e += c * BigRational::from_integer(BigInt::from(ramanujan_sum(n, shift + t as i64)));
                }
            }
        }
    }
    let lattice = Lattice::new(gram)?.named(&format!("L0(Phi{n})"));
    let mut one = vec![0i64; d];
    one[0] = 1;
    Ok(PhiLattice { n, lattice, isometry: zeta_matrix(n)?, twist: one })
}

/// Twist `<x, y>_a = <a x, y>` by `a = Σ a_k θ^k`, `θ = f + f^-1`.
pub fn twist(p: &PhiLattice, a: &[i64]) -> Result<PhiLattice> {
    let n = p.isometry.len();
    let f = &p.isometry;
    let finv = isom::mat_inverse_int(f).ok_or_else(|| Error::InvalidArgument("isometry not invertible".into()))?;
    let theta: IMat = (0..n).map(|i| (0..n).map(|j| f[i][j] + finv[i][j]).collect()).collect();
    let mut acc: IMat = vec![vec![0; n]; n];
    let mut pow = matrix::identity(n);
    for &c in a {
        for i in 0..n {
            for j in 0..n {
                acc[i][j] += c * pow[i][j];
            }
        }
        pow = matrix::mat_mul(&pow, &theta);
    }
    let g = matrix::qmat_mul(&matrix::to_rat(&acc), p.lattice.gram().as_slice());
    for i in 0..n {
        for j in 0..i {
            if g[i][j] != g[j][i] {
                return Err(Error::NotSymmetric);
            }
        }
    }
    let lattice = Lattice::new(g)?;
    if lattice.determinant().is_zero() {
        return Err(Error::Degenerate);
    }
    if !lattice.is_even() {
        return Err(Error::NotEven);
    }
    let base_twist = if p.twist.iter().skip(1).all(|&x| x == 0) && p.twist.first() == Some(&1) {
        a.to_vec()
    } else {
        Vec::new()
    };
    Ok(PhiLattice { n: p.n, lattice, isometry: p.isometry.clone(), twist: base_twist })
}

/// Constraints on an enumeration of Φ_n-lattices.
#[derive(Clone, Debug)]
pub struct PhiConstraints {
    /// `|det L|` must divide this.
    pub det_divisor: BigInt,
    /// Allowed `(s+, s-)`; empty means any.
    pub signatures: Vec<(usize, usize)>,
    /// Allowed range for the rank of the scale-2 constituent at 2.
    pub n2_window: Option<(usize, usize)>,
}

/// One isometry class (or genus, for indefinite lattices) of twists.
#[derive(Clone, Debug)]
pub struct PhiClass {
    pub phi: PhiLattice,
    pub genus: GenusSymbol,
    /// Set when classes were separated only up to genus.
    pub genus_level_only: bool,
}

fn satisfies(l: &Lattice, c: &PhiConstraints) -> Result<Option<GenusSymbol>> {
    if !c.signatures.is_empty() && !c.signatures.contains(&l.signature()) {
        return Ok(None);
    }
    let det = l.determinant().to_integer().abs();
    if !(&c.det_divisor % &det).is_zero() {
        return Ok(None);
    }
    match jordan_decomposition(l, 2) {
        Ok(j) => {
            if let Some((lo, hi)) = c.n2_window {
                let n2 = j.rank_at(1);
                if n2 < lo || n2 > hi {
                    return Ok(None);
                }
            }
        }
        Err(Error::Unsupported(msg)) => {
            log::debug!("twist skipped, 2-adic form not completely even: {msg}");
            return Ok(None);
        }
        Err(e) => return Err(e),
    }
    Ok(Some(genus_symbol(l)?))
}

/// All twists of the principal Φ_n-lattice meeting the constraints, one per
/// isometry class (definite case) or genus (indefinite case).
///
/// Twisting by `a u²` for a unit `u` gives an isometric lattice, so `a`
/// runs over a fundamental domain for the squares of a finite-index unit
/// subgroup, intersected with `|N(a)| ≤ B`.
pub fn enumerate_phi_lattices(n: u64, c: &PhiConstraints) -> Result<Vec<PhiClass>> {
    if c.det_divisor.is_zero() {
        return Err(Error::InvalidArgument("determinant bound required".into()));
    }
    let p0 = principal_phi_lattice(n)?;
    let det0 = p0.lattice.determinant().to_integer().abs();
    let field = RealSubfield::new(n)?;
    let d = field.degree();
    if !(&c.det_divisor % &det0).is_zero() {
        return Ok(Vec::new());
    }
    let quotient = &c.det_divisor / &det0;
    // admissible |N(a)|: N^2 divides det_divisor / det L0
    let mut norms = BTreeSet::new();
    let mut k = BigInt::one();
    while &k * &k <= quotient {
        if (&quotient % (&k * &k)).is_zero() {
            norms.insert(k.clone());
        }
        k += 1;
    }
    let nmax = norms.iter().max().unwrap().to_f64().unwrap();
    let units = field.units()?;
    let mut cbound = vec![0.0f64; d];
    for u in &units {
        for (ci, l) in cbound.iter_mut().zip(field.log_embedding(u)) {
            *ci += l.abs();
        }
    }
    let b: Vec<f64> = cbound.iter().map(|ci| nmax.powf(1.0 / d as f64) * ci.exp() * 1.001 + 1e-6).collect();
    let candidates = box_points(&field, &b)?;
    log::debug!("Phi{n}: {} candidate twist elements", candidates.len());

    let mut classes: Vec<PhiClass> = Vec::new();
    for a in candidates {
        if !norms.contains(&field.norm(&a).abs()) {
            continue;
        }
        let t = match twist(&p0, &a) {
            Ok(t) => t,
            Err(Error::NotEven) | Err(Error::NotIntegral) => continue,
            Err(e) => return Err(e),
        };
        let Some(genus) = satisfies(&t.lattice, c)? else { continue };
        let definite = t.lattice.is_definite();
        let mut new = true;
        for cl in classes.iter().filter(|cl| cl.genus == genus) {
            if !definite || isom::isometry_test(&cl.phi.lattice, &t.lattice)?.is_some() {
                new = false;
                break;
            }
        }
        if new {
            classes.push(PhiClass { phi: t, genus, genus_level_only: !definite });
        }
    }
    classes.sort_by(|x, y| {
        (x.genus.signature, x.genus.det.clone(), x.genus.to_string(), x.phi.twist.clone()).cmp(&(
            y.genus.signature,
            y.genus.det.clone(),
            y.genus.to_string(),
            y.phi.twist.clone(),
        ))
    });
    Ok(classes)
}

/// Integer points `a` of the real subfield with `|σ_i(a)| ≤ b_i` for every
/// embedding (a superset is returned), sorted by weighted size.
fn box_points(field: &RealSubfield, b: &[f64]) -> Result<Vec<Vec<i64>>> {
    let d = field.degree();
    // weighted trace form Σ σ_i(x)^2 / b_i^2 scaled to integers; the box lies
    // in the region where it is at most d
    let emb: Vec<Vec<f64>> = (0..d)
        .map(|k| {
            let mut e = vec![0i64; d];
            e[k] = 1;
            field.embed(&e)
        })
        .collect();
    let scale = 1e6;
    let raw: Vec<Vec<f64>> = (0..d)
        .map(|k| (0..d).map(|l| (0..d).map(|i| emb[k][i] * emb[l][i] / (b[i] * b[i])).sum::<f64>() * scale).collect())
        .collect();
    let slack = d as i64 + 1;
    let gram: IMat = (0..d)
        .map(|k| (0..d).map(|l| raw[k][l].round() as i64 - if k == l { slack } else { 0 }).collect())
        .collect();
    let radius = (d as f64 * scale * 1.0001).ceil() as i64;
    let e = Ellipsoid::new(&gram)?;
    let mut out: Vec<(i64, Vec<i64>)> = Vec::new();
    e.for_each_close(&vec![BigRational::zero(); d], &matrix::rat_int(radius), |y| {
        if y.iter().any(|&x| x != 0) {
            let w = matrix::dot(&matrix::vec_mat(y, &gram), y);
            out.push((w, y.to_vec()));
        }
        true
    });
    out.sort();
    Ok(out.into_iter().map(|(_, v)| v).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::standard;

    #[test]
    fn principal_determinants() {
        for (n, det) in [(3, 3), (5, 5), (7, 7), (9, 3), (15, 1), (8, 4), (12, 1)] {
            let p = principal_phi_lattice(n).unwrap();
            p.check().unwrap();
            assert_eq!(p.lattice.determinant().to_integer().abs(), BigInt::from(det), "n={n}");
        }
        assert!(principal_phi_lattice(2).is_err());
    }

    #[test]
    fn principal_phi3_is_a2() {
        let p = principal_phi_lattice(3).unwrap();
        assert!(isom::isometry_test(&p.lattice, &standard::a(2)).unwrap().is_some());
        let t = twist(&p, &[-2]).unwrap();
        assert!(isom::isometry_test(&t.lattice, &standard::a(2).rescale_int(-2).unwrap()).unwrap().is_some());
        assert_eq!(twist(&p, &[1]).unwrap().lattice, p.lattice);
    }

    #[test]
    fn ramanujan_sums() {
        assert_eq!(ramanujan_sum(15, 0), 8);
        assert_eq!(ramanujan_sum(15, 1), 1);
        assert_eq!(ramanujan_sum(9, 3), -3);
        assert_eq!(ramanujan_sum(7, 2), -1);
    }

    #[test]
    fn real_subfields() {
        let k = RealSubfield::new(15).unwrap();
        assert_eq!(k.degree(), 4);
        assert_eq!(k.units().unwrap().len(), 3);
        let k7 = RealSubfield::new(7).unwrap();
        assert_eq!(k7.minpoly, IntPoly::from_i64(&[-1, -2, 1, 1]));
    }

    #[test]
    fn charpolys() {
        assert_eq!(charpoly(&zeta_matrix(9).unwrap()), cyclotomic(9).unwrap());
    }
}
