//! Lattices given by rational Gram matrices, sublattices, discriminant forms
//! and overlattices.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::matrix::{self, BMat, IMat, QMat, QVec};

/// A non-degenerate lattice. The Gram matrix is stored as an integer
/// numerator over one positive common denominator.
#[derive(Clone, Debug)]
pub struct Lattice {
    num: BMat,
    den: BigInt,
    pub name: Option<String>,
}

/// Equality of Gram matrices; the name is ignored.
impl PartialEq for Lattice {
    fn eq(&self, other: &Self) -> bool {
        self.num == other.num && self.den == other.den
    }
}

impl Eq for Lattice {}

impl Lattice {
    pub fn new(gram: QMat) -> Result<Self> {
        let n = gram.len();
        if gram.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension("Gram matrix must be square".into()));
        }
        for i in 0..n {
            for j in 0..i {
                if gram[i][j] != gram[j][i] {
                    return Err(Error::NotSymmetric);
                }
            }
        }
        if matrix::det_rat(&gram).is_zero() {
            return Err(Error::Degenerate);
        }
        let den = matrix::common_denominator(&gram);
        let num = gram
            .iter()
            .map(|r| {
                r.iter()
                    .map(|x| (x * BigRational::from_integer(den.clone())).to_integer())
                    .collect()
            })
            .collect();
        Ok(Lattice { num, den, name: None })
    }

    pub fn from_int(gram: &[Vec<i64>]) -> Result<Self> {
        Self::new(matrix::to_rat(gram))
    }

    /// Rank-zero lattice, the neutral element for direct sums.
    pub fn zero() -> Self {
        Lattice { num: Vec::new(), den: BigInt::one(), name: None }
    }

    pub fn named(mut self, name: &str) -> Self {
        self.name = Some(name.to_string());
        self
    }

    pub fn rank(&self) -> usize {
        self.num.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> BigRational {
        BigRational::new(self.num[i][j].clone(), self.den.clone())
    }

    pub fn gram(&self) -> QMat {
        (0..self.rank())
            .map(|i| (0..self.rank()).map(|j| self.entry(i, j)).collect())
            .collect()
    }

    pub fn is_integral(&self) -> bool {
        self.den.is_one()
    }

    pub fn is_even(&self) -> bool {
        self.is_integral() && self.num.iter().enumerate().all(|(i, r)| r[i].is_even())
    }

    /// Integer Gram matrix; fails for non-integral lattices or entries that
    /// do not fit in `i64`.
    pub fn int_gram(&self) -> Result<IMat> {
        if !self.is_integral() {
            return Err(Error::NotIntegral);
        }
        matrix::big_to_i64(&self.num)
            .ok_or_else(|| Error::Unsupported("Gram entries exceed 64 bits".into()))
    }

    pub fn determinant(&self) -> BigRational {
        let n = self.rank() as u32;
        BigRational::new(matrix::det_big(&self.num), num_traits::pow(self.den.clone(), n as usize))
    }

    /// `(s_plus, s_minus)` by exact symmetric elimination.
    pub fn signature(&self) -> (usize, usize) {
        let pivots = symmetric_pivots(&self.num);
        let pos = pivots.iter().filter(|p| p.is_positive()).count();
        (pos, pivots.len() - pos)
    }

    pub fn is_positive_definite(&self) -> bool {
        self.signature().1 == 0
    }

    pub fn is_negative_definite(&self) -> bool {
        self.signature().0 == 0
    }

    pub fn is_definite(&self) -> bool {
        let (p, m) = self.signature();
        p == 0 || m == 0
    }

    pub fn rescale(&self, r: &BigRational) -> Result<Self> {
        if r.is_zero() {
            return Err(Error::InvalidArgument("scale factor must be nonzero".into()));
        }
        let g = self
            .gram()
            .into_iter()
            .map(|row| row.into_iter().map(|x| x * r).collect())
            .collect();
        Self::new(g)
    }

    pub fn rescale_int(&self, r: i64) -> Result<Self> {
        self.rescale(&matrix::rat_int(r))
    }

    pub fn direct_sum(&self, other: &Lattice) -> Lattice {
        let n = self.rank();
        let m = other.rank();
        let mut g = vec![vec![BigRational::zero(); n + m]; n + m];
        for i in 0..n {
            for j in 0..n {
                g[i][j] = self.entry(i, j);
            }
        }
        for i in 0..m {
            for j in 0..m {
                g[n + i][n + j] = other.entry(i, j);
            }
        }
        if n + m == 0 {
            return Lattice::zero();
        }
        Lattice::new(g).expect("direct sum of non-degenerate lattices")
    }

    /// The dual lattice in the dual basis; its Gram matrix is the inverse.
    pub fn dual(&self) -> Lattice {
        let inv = matrix::inverse_rat(&self.gram()).expect("non-degenerate");
        Lattice::new(inv).expect("inverse is non-degenerate")
    }

    pub fn inner(&self, x: &[BigRational], y: &[BigRational]) -> BigRational {
        matrix::qdot(&matrix::qvec_mat(x, &self.gram()), y)
    }

    pub fn inner_int(&self, x: &[i64], y: &[i64]) -> BigRational {
        self.inner(&matrix::ivec_to_q(x), &matrix::ivec_to_q(y))
    }

    pub fn discriminant_form(&self) -> Result<TorsionQuadraticForm> {
        if !self.is_integral() {
            return Err(Error::NotIntegral);
        }
        if !self.is_even() {
            return Err(Error::NotEven);
        }
        TorsionQuadraticForm::of_lattice(self)
    }

    /// Lattice spanned by the given integer rows.
    pub fn sublattice_gram(&self, rows: &[Vec<i64>]) -> Result<Lattice> {
        let b = matrix::to_rat(rows);
        let g = matrix::qmat_mul(&matrix::qmat_mul(&b, &self.gram()), &matrix::transpose(&b));
        Lattice::new(g)
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let rows = v
            .get("gram")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("missing \"gram\" array".into()))?;
        let gram = parse_qmat(rows)?;
        let mut l = Lattice::new(gram)?;
        if let Some(name) = v.get("name").and_then(Value::as_str) {
            l.name = Some(name.to_string());
        }
        Ok(l)
    }

    pub fn to_json(&self) -> Value {
        let gram: Vec<Value> = self
            .gram()
            .iter()
            .map(|r| Value::Array(r.iter().map(rat_to_json).collect()))
            .collect();
        let mut obj = serde_json::Map::new();
        obj.insert("gram".into(), Value::Array(gram));
        if let Some(n) = &self.name {
            obj.insert("name".into(), Value::String(n.clone()));
        }
        Value::Object(obj)
    }
}

pub fn rat_to_json(q: &BigRational) -> Value {
    if q.is_integer() {
        if let Some(i) = q.numer().to_i64() {
            return Value::from(i);
        }
    }
    Value::String(matrix::rat_to_string(q))
}

pub fn parse_rat(v: &Value) -> Result<BigRational> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(matrix::rat_int)
            .ok_or_else(|| Error::Parse(format!("non-integer number {n}"))),
        Value::String(s) => parse_rat_str(s),
        other => Err(Error::Parse(format!("expected rational, got {other}"))),
    }
}

pub fn parse_rat_str(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("bad rational {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

pub fn parse_qmat(rows: &[Value]) -> Result<QMat> {
    rows.iter()
        .map(|r| {
            r.as_array()
                .ok_or_else(|| Error::Parse("matrix row must be an array".into()))?
                .iter()
                .map(parse_rat)
                .collect()
        })
        .collect()
}

pub fn parse_imat(v: &Value) -> Result<IMat> {
    v.as_array()
        .ok_or_else(|| Error::Parse("expected matrix".into()))?
        .iter()
        .map(parse_ivec)
        .collect()
}

pub fn parse_ivec(v: &Value) -> Result<Vec<i64>> {
    v.as_array()
        .ok_or_else(|| Error::Parse("expected integer vector".into()))?
        .iter()
        .map(|x| x.as_i64().ok_or_else(|| Error::Parse(format!("expected integer, got {x}"))))
        .collect()
}

/// Pivots of an exact symmetric Gaussian elimination (congruence
/// diagonalization). Their signs give the signature.
fn symmetric_pivots(a: &[Vec<BigInt>]) -> Vec<BigRational> {
    let n = a.len();
    let mut m: QMat = a
        .iter()
        .map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect())
        .collect();
    let mut pivots = Vec::with_capacity(n);
    for k in 0..n {
        if let Some(p) = (k..n).find(|&i| !m[i][i].is_zero()) {
            m.swap(k, p);
            for row in m.iter_mut() {
                row.swap(k, p);
            }
        } else {
            let found = (k..n).find_map(|i| (k..n).find(|&j| !m[i][j].is_zero()).map(|j| (i, j)));
            let Some((i, j)) = found else { break };
            // replace e_i by e_i + e_j, making the diagonal entry 2 m_ij
            for c in 0..n {
                let t = m[j][c].clone();
                m[i][c] += t;
            }
            for r in 0..n {
                let t = m[r][j].clone();
                m[r][i] += t;
            }
            m.swap(k, i);
            for row in m.iter_mut() {
                row.swap(k, i);
            }
        }
        let piv = m[k][k].clone();
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
        for j in k + 1..n {
            m[k][j] = BigRational::zero();
        }
        for i in k + 1..n {
            m[i][k] = BigRational::zero();
        }
        pivots.push(piv);
    }
    pivots
}

/// Reduce `x` into `[0, 2)`.
pub fn mod2(x: &BigRational) -> BigRational {
    let two = matrix::rat_int(2);
    let q = (x / &two).floor();
    x - q * two
}

/// Reduce `x` into `[0, 1)`.
pub fn mod1(x: &BigRational) -> BigRational {
    x - x.floor()
}

/// Finite quadratic form `L^v / L` with values in `Q/2Z`.
#[derive(Clone, Debug)]
pub struct TorsionQuadraticForm {
    /// Orders of the cyclic generators, `d_1 | d_2 | ...`, all `> 1`.
    pub orders: Vec<BigInt>,
    /// Generators as rational coordinates in the lattice basis.
    pub gens: Vec<QVec>,
    pub q: Vec<BigRational>,
    pub b: QMat,
    /// `gram * v`, restricted to the nontrivial columns: maps rational
    /// coordinates to generator coefficients.
    reducer: QMat,
    gram: QMat,
}

impl TorsionQuadraticForm {
    fn of_lattice(l: &Lattice) -> Result<Self> {
        let g = l.num.clone();
        let (u, d, v) = matrix::smith(&g);
        let gram = l.gram();
        let mut orders = Vec::new();
        let mut gens = Vec::new();
        let mut cols = Vec::new();
        for (i, di) in d.iter().enumerate() {
            if di.is_one() {
                continue;
            }
            orders.push(di.clone());
            gens.push(
                u[i].iter()
                    .map(|x| BigRational::new(x.clone(), di.clone()))
                    .collect::<QVec>(),
            );
            cols.push(i);
        }
        let gv = matrix::qmat_mul(&gram, &matrix::to_rat_big(&v));
        let reducer: QMat = gv
            .iter()
            .map(|row| cols.iter().map(|&c| row[c].clone()).collect())
            .collect();
        let q = gens.iter().map(|x| mod2(&l.inner(x, x))).collect();
        let b = gens
            .iter()
            .map(|x| gens.iter().map(|y| mod1(&l.inner(x, y))).collect())
            .collect();
        Ok(TorsionQuadraticForm { orders, gens, q, b, reducer, gram })
    }

    pub fn order(&self) -> BigInt {
        self.orders.iter().fold(BigInt::one(), |a, b| a * b)
    }

    pub fn num_gens(&self) -> usize {
        self.orders.len()
    }

    /// Coefficients of a dual vector in terms of the generators, each reduced
    /// modulo its order. Fails if `x` is not in the dual lattice.
    pub fn coefficients(&self, x: &[BigRational]) -> Result<Vec<BigInt>> {
        let y = matrix::qvec_mat(x, &self.reducer);
        y.iter()
            .zip(&self.orders)
            .map(|(c, d)| {
                if !c.is_integer() {
                    return Err(Error::InvalidArgument("vector is not in the dual lattice".into()));
                }
                Ok(c.to_integer().mod_floor(d))
            })
            .collect()
    }

    pub fn element(&self, coeffs: &[BigInt]) -> QVec {
        let n = self.gram.len();
        let mut out = vec![BigRational::zero(); n];
        for (c, g) in coeffs.iter().zip(&self.gens) {
            if c.is_zero() {
                continue;
            }
            let c = BigRational::from_integer(c.clone());
            for (o, x) in out.iter_mut().zip(g) {
                *o += &c * x;
            }
        }
        out
    }

    pub fn q_value(&self, x: &[BigRational]) -> BigRational {
        mod2(&matrix::qdot(&matrix::qvec_mat(x, &self.gram), x))
    }

    pub fn b_value(&self, x: &[BigRational], y: &[BigRational]) -> BigRational {
        mod1(&matrix::qdot(&matrix::qvec_mat(x, &self.gram), y))
    }

    /// Lists every element as a coefficient vector. Intended for small groups.
    pub fn elements(&self) -> Vec<Vec<BigInt>> {
        let mut out = vec![Vec::new()];
        for d in &self.orders {
            let d = d.to_i64().expect("small discriminant group");
            let mut next = Vec::with_capacity(out.len() * d as usize);
            for e in &out {
                for c in 0..d {
                    let mut e2 = e.clone();
                    e2.push(BigInt::from(c));
                    next.push(e2);
                }
            }
            out = next;
        }
        out
    }
}

/// A sublattice of an ambient lattice, stored by a Hermite-normal-form basis
/// of integer coordinate rows.
#[derive(Clone, Debug)]
pub struct Sublattice {
    pub ambient: Lattice,
    pub basis: IMat,
}

impl Sublattice {
    pub fn new(ambient: &Lattice, rows: &[Vec<i64>]) -> Result<Self> {
        if rows.iter().any(|r| r.len() != ambient.rank()) {
            return Err(Error::Dimension("row length differs from ambient rank".into()));
        }
        let h = matrix::hnf_basis(&matrix::to_big(rows));
        let basis = matrix::big_to_i64(&h)
            .ok_or_else(|| Error::Unsupported("basis entries exceed 64 bits".into()))?;
        let s = Sublattice { ambient: ambient.clone(), basis };
        if s.rank() > 0 {
            s.lattice()?;
        }
        Ok(s)
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Induced lattice on the stored basis.
    pub fn lattice(&self) -> Result<Lattice> {
        self.ambient.sublattice_gram(&self.basis)
    }

    pub fn primitive_closure(&self) -> Sublattice {
        let sat = matrix::saturation(&matrix::to_big(&self.basis));
        Sublattice {
            ambient: self.ambient.clone(),
            basis: matrix::big_to_i64(&sat).expect("small entries"),
        }
    }

    pub fn is_primitive(&self) -> bool {
        self.primitive_closure().basis == self.basis
    }

    /// Index of the sublattice in its primitive closure.
    pub fn closure_index(&self) -> BigInt {
        let c = self.primitive_closure();
        // both are HNF bases of lattices of the same rank; compare Gram dets
        let a = matrix::det_i64(&matrix::congruence(&self.basis, &matrix::identity(self.ambient.rank())));
        let b = matrix::det_i64(&matrix::congruence(&c.basis, &matrix::identity(self.ambient.rank())));
        (a / b).sqrt()
    }

    pub fn orthogonal_complement(&self) -> Sublattice {
        let n = self.ambient.rank();
        let gram = self.ambient.gram();
        let gb = matrix::qmat_mul(&gram, &matrix::transpose(&matrix::to_rat(&self.basis)));
        let den = matrix::common_denominator(&gb);
        let int: BMat = gb
            .iter()
            .map(|r| {
                r.iter()
                    .map(|x| (x * BigRational::from_integer(den.clone())).to_integer())
                    .collect()
            })
            .collect();
        let k = if self.rank() == 0 {
            (0..n)
                .map(|i| (0..n).map(|j| BigInt::from(i64::from(i == j))).collect())
                .collect()
        } else {
            matrix::left_kernel(&int)
        };
        Sublattice {
            ambient: self.ambient.clone(),
            basis: matrix::big_to_i64(&k).expect("small entries"),
        }
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        let mut rows = self.basis.clone();
        rows.push(v.to_vec());
        let h = matrix::hnf_basis(&matrix::to_big(&rows));
        h.len() == self.rank() && matrix::big_to_i64(&h).as_deref() == Some(&self.basis[..])
    }
}

/// Overlattice of a direct sum. `basis` expresses the new basis in rational
/// coordinates of `A ⊕ B`.
#[derive(Clone, Debug)]
pub struct Overlattice {
    pub lattice: Lattice,
    pub basis: QMat,
    pub index: BigInt,
}

/// Glue `A ⊕ B` along the subgroup generated by the given pairs of dual
/// vectors (rational coordinates in the bases of `A` and `B`).
pub fn overlattice_from_glue(
    a: &Lattice,
    b: &Lattice,
    glue: &[(QVec, QVec)],
) -> Result<Overlattice> {
    let sum = a.direct_sum(b);
    let n = sum.rank();
    let mut gens: QMat = (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect())
        .collect();
    let mut glue_vecs = Vec::new();
    for (x, y) in glue {
        if x.len() != a.rank() || y.len() != b.rank() {
            return Err(Error::Dimension("glue vector length".into()));
        }
        let mut v = x.clone();
        v.extend(y.iter().cloned());
        glue_vecs.push(v);
    }
    for (i, u) in glue_vecs.iter().enumerate() {
        let q = mod2(&sum.inner(u, u));
        if !q.is_zero() {
            return Err(Error::NonIsotropicGlue(format!(
                "glue element {i} has q = {}",
                matrix::rat_to_string(&q)
            )));
        }
        for (j, w) in glue_vecs.iter().enumerate().take(i) {
            let bv = mod1(&sum.inner(u, w));
            if !bv.is_zero() {
                return Err(Error::NonIsotropicGlue(format!(
                    "glue elements {j}, {i} pair to {}",
                    matrix::rat_to_string(&bv)
                )));
            }
        }
        // the glue must lie in the dual
        let row = matrix::qvec_mat(u, &sum.gram());
        if row.iter().any(|c| !c.is_integer()) {
            return Err(Error::InvalidArgument(format!("glue element {i} is not in the dual")));
        }
    }
    gens.extend(glue_vecs);
    let basis = rational_row_basis(&gens);
    let g = matrix::qmat_mul(&matrix::qmat_mul(&basis, &sum.gram()), &matrix::transpose(&basis));
    let lattice = Lattice::new(g)?;
    let index = (sum.determinant() / lattice.determinant()).to_integer().abs().sqrt();
    Ok(Overlattice { lattice, basis, index })
}

/// Hermite basis of the Z-span of rational rows of full rank.
pub fn rational_row_basis(rows: &[QVec]) -> QMat {
    let den = matrix::common_denominator(rows);
    let dq = BigRational::from_integer(den.clone());
    let int: BMat = rows
        .iter()
        .map(|r| r.iter().map(|x| (x * &dq).to_integer()).collect())
        .collect();
    matrix::hnf_basis(&int)
        .into_iter()
        .map(|r| r.into_iter().map(|x| BigRational::new(x, den.clone())).collect())
        .collect()
}

/// Standard root lattices and small building blocks (positive definite).
pub mod standard {
    use super::*;

    pub fn hyperbolic_plane() -> Lattice {
        Lattice::from_int(&[vec![0, 1], vec![1, 0]]).unwrap().named("U")
    }

    pub fn a(n: usize) -> Lattice {
        let mut g = vec![vec![0i64; n]; n];
        for i in 0..n {
            g[i][i] = 2;
            if i + 1 < n {
                g[i][i + 1] = -1;
                g[i + 1][i] = -1;
            }
        }
        Lattice::from_int(&g).unwrap().named(&format!("A{n}"))
    }

    pub fn d(n: usize) -> Lattice {
        assert!(n >= 2);
        let mut g = vec![vec![0i64; n]; n];
        for i in 0..n {
            g[i][i] = 2;
        }
        for i in 0..n.saturating_sub(2) {
            g[i][i + 1] = -1;
            g[i + 1][i] = -1;
        }
        if n >= 3 {
            g[n - 3][n - 1] = -1;
            g[n - 1][n - 3] = -1;
        }
        Lattice::from_int(&g).unwrap().named(&format!("D{n}"))
    }

    /// E6, E7, E8 with the branch node attached to the third node of a chain.
    pub fn e(n: usize) -> Lattice {
        assert!((6..=8).contains(&n));
        let mut g = vec![vec![0i64; n]; n];
        for i in 0..n {
            g[i][i] = 2;
        }
        for i in 0..n - 2 {
            g[i][i + 1] = -1;
            g[i + 1][i] = -1;
        }
        g[2][n - 1] = -1;
        g[n - 1][2] = -1;
        Lattice::from_int(&g).unwrap().named(&format!("E{n}"))
    }

    /// The even unimodular lattice `D16^+` (positive definite), built in
    /// doubled coordinates of `Z^16` from `2(e_i - e_{i+1})`, `2(e_15 + e_16)`
    /// and the all-ones vector.
    pub fn gamma16() -> Lattice {
        let mut gens: Vec<Vec<BigInt>> = Vec::new();
        for i in 0..15 {
            let mut v = vec![0i64; 16];
            v[i] = 2;
            v[i + 1] = -2;
            gens.push(v.into_iter().map(Into::into).collect());
        }
        let mut v = vec![0i64; 16];
        v[14] = 2;
        v[15] = 2;
        gens.push(v.into_iter().map(Into::into).collect());
        gens.push(vec![BigInt::one(); 16]);
        let b = matrix::big_to_i64(&matrix::hnf_basis(&gens)).expect("small entries");
        let g: QMat = matrix::mat_mul(&b, &matrix::transpose(&b))
            .iter()
            .map(|r| r.iter().map(|x| matrix::rat(*x, 4)).collect())
            .collect();
        Lattice::new(g).unwrap().named("Gamma16")
    }

    /// Direct sum of many lattices.
    pub fn sum(parts: &[Lattice]) -> Lattice {
        parts.iter().fold(Lattice::zero(), |acc, l| acc.direct_sum(l))
    }

    pub fn scaled(l: &Lattice, r: i64) -> Lattice {
        l.rescale_int(r).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::standard::*;
    use super::*;
    use crate::matrix::{rat, rat_int};

    #[test]
    fn determinants() {
        assert_eq!(hyperbolic_plane().determinant(), rat_int(-1));
        assert_eq!(a(2).determinant(), rat_int(3));
        assert_eq!(e(8).determinant(), rat_int(1));
        assert_eq!(e(6).determinant(), rat_int(3));
        assert_eq!(d(4).determinant(), rat_int(4));
        assert_eq!(scaled(&e(8), -2).determinant(), rat_int(256));
    }

    #[test]
    fn signatures() {
        let u = hyperbolic_plane();
        assert_eq!(u.signature(), (1, 1));
        let n = sum(&[u.clone(), scaled(&u, 2), scaled(&e(8), -2)]);
        assert_eq!(n.signature(), (2, 10));
        // (-1) * (-4) * 2^8
        assert_eq!(n.determinant(), rat_int(1024));
        assert_eq!(scaled(&a(6), -2).signature(), (0, 6));
    }

    #[test]
    fn dual_of_a2() {
        let d2 = a(2).dual();
        assert_eq!(d2.gram(), vec![vec![rat(2, 3), rat(1, 3)], vec![rat(1, 3), rat(2, 3)]]);
        assert_eq!(d2.dual(), a(2));
    }

    #[test]
    fn discriminant_forms() {
        assert_eq!(hyperbolic_plane().discriminant_form().unwrap().num_gens(), 0);
        let u2 = scaled(&hyperbolic_plane(), 2).discriminant_form().unwrap();
        assert_eq!(u2.orders, vec![BigInt::from(2), BigInt::from(2)]);
        assert!(u2.q.iter().all(|x| x.is_zero()));
        assert_eq!(u2.b[0][1], rat(1, 2));
        let a2 = a(2).discriminant_form().unwrap();
        assert_eq!(a2.orders, vec![BigInt::from(3)]);
        // q(k g) = 2k^2/3 mod 2 takes only the value 2/3 on generators
        assert_eq!(a2.q[0], rat(2, 3));
        let a2m = scaled(&a(2), -1).discriminant_form().unwrap();
        assert_eq!(a2m.q[0], rat(4, 3));
    }

    #[test]
    fn complement_and_closure() {
        let l = hyperbolic_plane().direct_sum(&a(2));
        let s = Sublattice::new(&l, &[vec![1, 0, 0, 0], vec![0, 1, 0, 0]]).unwrap();
        let c = s.orthogonal_complement();
        assert_eq!(c.lattice().unwrap().gram(), a(2).gram());
        assert_eq!(c.orthogonal_complement().basis, s.basis);
        let u = hyperbolic_plane();
        let two_u = Sublattice::new(&u, &[vec![2, 0], vec![0, 2]]).unwrap();
        assert_eq!(two_u.primitive_closure().basis, vec![vec![1, 0], vec![0, 1]]);
        assert_eq!(two_u.closure_index(), BigInt::from(4));
    }

    #[test]
    fn glue_rejects_odd() {
        let a1 = Lattice::from_int(&[vec![2]]).unwrap();
        let r = overlattice_from_glue(&a1, &a1, &[(vec![rat(1, 2)], vec![rat(1, 2)])]);
        assert!(matches!(r, Err(Error::NonIsotropicGlue(_))));
        let e = overlattice_from_glue(&a1, &a1, &[]).unwrap();
        assert_eq!(e.lattice, a1.direct_sum(&a1));
    }

    #[test]
    fn json_roundtrip() {
        let l = a(2).dual().named("A2 dual");
        let v = l.to_json();
        assert_eq!(Lattice::from_json(&v).unwrap(), l);
    }
}
