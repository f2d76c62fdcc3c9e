//! Integer polynomials, cyclotomic polynomials, resultants and the mod-2
//! factor calculus for characteristic polynomials.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::matrix;

/// Polynomial with integer coefficients, lowest degree first, no trailing
/// zeros (the zero polynomial is empty).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntPoly(pub Vec<BigInt>);

impl IntPoly {
    pub fn new(mut c: Vec<BigInt>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        IntPoly(c)
    }

    pub fn from_i64(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn one() -> Self {
        IntPoly(vec![BigInt::one()])
    }

    pub fn x_minus(a: i64) -> Self {
        Self::from_i64(&[-a, 1])
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn lead(&self) -> &BigInt {
        self.0.last().expect("nonzero polynomial")
    }

    pub fn mul(&self, o: &IntPoly) -> IntPoly {
        if self.is_zero() || o.is_zero() {
            return IntPoly(Vec::new());
        }
        let mut c = vec![BigInt::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        IntPoly::new(c)
    }

    pub fn pow(&self, e: usize) -> IntPoly {
        (0..e).fold(IntPoly::one(), |acc, _| acc.mul(self))
    }

    /// Exact division by a monic polynomial; `None` if there is a remainder.
    pub fn div_exact(&self, d: &IntPoly) -> Option<IntPoly> {
        let (q, r) = self.divrem_monic(d);
        if r.is_zero() {
            Some(q)
        } else {
            None
        }
    }

    pub fn divrem_monic(&self, d: &IntPoly) -> (IntPoly, IntPoly) {
        assert!(d.lead().is_one(), "divisor must be monic");
        let mut r = self.0.clone();
        let dd = d.degree();
        if self.is_zero() || self.degree() < dd {
            return (IntPoly(Vec::new()), self.clone());
        }
        let mut q = vec![BigInt::zero(); self.degree() - dd + 1];
        for k in (0..q.len()).rev() {
            let c = r[k + dd].clone();
            if c.is_zero() {
                continue;
            }
            for (j, dj) in d.0.iter().enumerate() {
                r[k + j] -= &c * dj;
            }
            q[k] = c;
        }
        (IntPoly::new(q), IntPoly::new(r))
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.0.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> IntPoly {
        IntPoly::new(self.0.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect())
    }

    pub fn mod2(&self) -> F2Poly {
        F2Poly(self.0.iter().enumerate().fold(0u128, |acc, (i, c)| {
            if c.is_odd() {
                acc | (1u128 << i)
            } else {
                acc
            }
        }))
    }

    pub fn coeffs_i64(&self) -> Vec<i64> {
        self.0.iter().map(|c| c.to_i64().expect("small coefficient")).collect()
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        for (i, c) in self.0.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mon = match i {
                0 => String::new(),
                1 => "x".into(),
                _ => format!("x^{i}"),
            };
            let abs = c.abs();
            let body = if i > 0 && abs.is_one() { mon } else if i == 0 { abs.to_string() } else { format!("{abs}*{mon}") };
            parts.push((c.is_negative(), body));
        }
        for (k, (neg, body)) in parts.iter().enumerate() {
            match (k, neg) {
                (0, true) => write!(f, "-{body}")?,
                (0, false) => write!(f, "{body}")?,
                (_, true) => write!(f, " - {body}")?,
                (_, false) => write!(f, " + {body}")?,
            }
        }
        Ok(())
    }
}

pub fn euler_phi(m: u64) -> u64 {
    let mut n = m;
    let mut r = m;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            r -= r / p;
        }
        p += 1;
    }
    if n > 1 {
        r -= r / n;
    }
    r
}

pub fn divisors(m: u64) -> Vec<u64> {
    (1..=m).filter(|d| m % d == 0).collect()
}

/// The m-th cyclotomic polynomial.
pub fn cyclotomic(m: i64) -> Result<IntPoly> {
    if m <= 0 {
        return Err(Error::InvalidArgument(format!("cyclotomic index must be positive, got {m}")));
    }
    let m = m as u64;
    let mut p = {
        let mut c = vec![BigInt::zero(); m as usize + 1];
        c[0] = BigInt::from(-1);
        c[m as usize] = BigInt::one();
        IntPoly::new(c)
    };
    for d in divisors(m) {
        if d < m {
            p = p.div_exact(&cyclotomic(d as i64)?).expect("x^m - 1 is divisible by each Φ_d");
        }
    }
    Ok(p)
}

/// Resultant as the determinant of the Sylvester matrix.
pub fn resultant(p: &IntPoly, q: &IntPoly) -> BigInt {
    if p.is_zero() || q.is_zero() {
        return BigInt::zero();
    }
    let (m, n) = (p.degree(), q.degree());
    if m + n == 0 {
        return BigInt::one();
    }
    let size = m + n;
    let mut s = vec![vec![BigInt::zero(); size]; size];
    for i in 0..n {
        for (j, c) in p.0.iter().rev().enumerate() {
            s[i][i + j] = c.clone();
        }
    }
    for i in 0..m {
        for (j, c) in q.0.iter().rev().enumerate() {
            s[n + i][i + j] = c.clone();
        }
    }
    matrix::det_big(&s)
}

/// Bound `|res(Φ_n, μ)|` on the order of an equivariant glue group between a
/// Φ_n-lattice and a lattice whose isometry has minimal polynomial `μ`.
pub fn glue_bound(n: i64, mu: &IntPoly) -> Result<BigInt> {
    let r = resultant(&cyclotomic(n)?, mu);
    if r.is_zero() {
        return Err(Error::InvalidArgument("polynomials have a common factor".into()));
    }
    Ok(r.abs())
}

/// Polynomial over the field with two elements, bit `i` is the coefficient
/// of `x^i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct F2Poly(pub u128);

impl F2Poly {
    pub fn degree(self) -> i32 {
        127 - self.0.leading_zeros() as i32
    }

    pub fn mul(self, o: F2Poly) -> F2Poly {
        let mut r = 0u128;
        let mut a = self.0;
        let mut i = 0;
        while a != 0 {
            if a & 1 == 1 {
                r ^= o.0 << i;
            }
            a >>= 1;
            i += 1;
        }
        F2Poly(r)
    }

    pub fn divrem(self, d: F2Poly) -> (F2Poly, F2Poly) {
        assert!(d.0 != 0);
        let dd = d.degree();
        let mut r = self.0;
        let mut q = 0u128;
        while r != 0 && F2Poly(r).degree() >= dd {
            let s = F2Poly(r).degree() - dd;
            q |= 1 << s;
            r ^= d.0 << s;
        }
        (F2Poly(q), F2Poly(r))
    }

    pub fn pow(self, e: usize) -> F2Poly {
        (0..e).fold(F2Poly(1), |a, _| a.mul(self))
    }

    pub fn is_irreducible(self) -> bool {
        let d = self.degree();
        if d < 1 {
            return false;
        }
        for deg in 1..=d / 2 {
            for c in (1u128 << deg)..(1u128 << (deg + 1)) {
                if self.divrem(F2Poly(c)).1 .0 == 0 {
                    return false;
                }
            }
        }
        true
    }

    /// Factorization into irreducibles with multiplicities.
    pub fn factor(self) -> BTreeMap<F2Poly, usize> {
        let mut out = BTreeMap::new();
        let mut f = self;
        let mut deg = 1;
        while f.degree() >= 1 {
            if 2 * deg > f.degree() {
                *out.entry(f).or_insert(0) += 1;
                break;
            }
            let mut advanced = false;
            for c in (1u128 << deg)..(1u128 << (deg + 1)) {
                let g = F2Poly(c);
                if !g.is_irreducible() {
                    continue;
                }
                while f.degree() >= 1 {
                    let (q, r) = f.divrem(g);
                    if r.0 != 0 {
                        break;
                    }
                    *out.entry(g).or_insert(0) += 1;
                    f = q;
                    advanced = true;
                }
            }
            if !advanced || f.degree() < 2 * (deg + 1) {
                deg += 1;
            }
            if f.degree() >= 1 && 2 * deg > f.degree() {
                *out.entry(f).or_insert(0) += 1;
                break;
            }
        }
        out
    }

    pub fn coeffs(self) -> Vec<u8> {
        let d = self.degree().max(0) as usize;
        (0..=d).map(|i| (self.0 >> i & 1) as u8).collect()
    }
}

impl fmt::Display for F2Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == 0 {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        for i in (0..=self.degree()).rev() {
            if self.0 >> i & 1 == 1 {
                parts.push(match i {
                    0 => "1".to_string(),
                    1 => "x".to_string(),
                    _ => format!("x^{i}"),
                });
            }
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// The allowed mod-2 factors `F1, F3, F5, F7, F9`, each the reduction of the
/// corresponding cyclotomic polynomial.
pub fn allowed_factor(k: u64) -> F2Poly {
    cyclotomic(k as i64).unwrap().mod2()
}

pub const ALLOWED_INDICES: [u64; 5] = [1, 3, 5, 7, 9];

/// Outcome of the mod-2 factor check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Mod2Check {
    /// Exponents of `F1, F3, F5, F7, F9`.
    Product(BTreeMap<u64, usize>),
    /// An irreducible factor that is not accounted for.
    Refused { offending: F2Poly },
}

impl Mod2Check {
    pub fn is_ok(&self) -> bool {
        matches!(self, Mod2Check::Product(_))
    }
}

/// Decomposes `p mod 2` as a product of `F1, F3, F5, F7, F9`.
pub fn mod2_factor_check(p: &IntPoly) -> Mod2Check {
    let f = p.mod2();
    if f.0 == 0 {
        return Mod2Check::Refused { offending: F2Poly(0) };
    }
    let fac = f.factor();
    let f1 = allowed_factor(1);
    let f3 = allowed_factor(3);
    let f5 = allowed_factor(5);
    let f9 = allowed_factor(9);
    let c1 = F2Poly(0b1011); // x^3 + x + 1
    let c2 = F2Poly(0b1101); // x^3 + x^2 + 1
    let mut exps: BTreeMap<u64, usize> = BTreeMap::new();
    for (g, &e) in &fac {
        let idx = if *g == f1 {
            1
        } else if *g == f3 {
            3
        } else if *g == f5 {
            5
        } else if *g == f9 {
            9
        } else if *g == c1 || *g == c2 {
            continue;
        } else {
            return Mod2Check::Refused { offending: *g };
        };
        exps.insert(idx, e);
    }
    let e1 = fac.get(&c1).copied().unwrap_or(0);
    let e2 = fac.get(&c2).copied().unwrap_or(0);
    if e1 != e2 {
        let offending = if e1 > e2 { c1 } else { c2 };
        return Mod2Check::Refused { offending };
    }
    if e1 > 0 {
        exps.insert(7, e1);
    }
    Mod2Check::Product(exps)
}

/// Cyclotomic indices with `φ(m) <= max_degree`.
pub fn small_cyclotomic_indices(max_degree: u64) -> Vec<u64> {
    // φ(m) >= sqrt(m/2), so m <= 2 max_degree^2 suffices
    (1..=2 * max_degree * max_degree).filter(|&m| euler_phi(m) <= max_degree).collect()
}

/// Lowest common multiple of a list of positive integers.
pub fn lcm_list(v: &[u64]) -> u64 {
    v.iter().fold(1u64, |a, &b| a.lcm(&b))
}

/// Orders of finite-order isometries of the rank-12 lattice that earlier
/// work bounds to divisors of these integers (imported, not derived here).
pub const IMPORTED_ORDER_BOUNDS: [u64; 6] = [48, 56, 72, 84, 90, 120];

/// Upper bound on the degree of each cyclotomic factor (imported).
pub const MAX_FACTOR_DEGREE: u64 = 8;

pub const CHAR_POLY_DEGREE: u64 = 12;

/// Multisets of cyclotomic indices `m` with `φ(m) <= 8` and total degree 12,
/// each sorted ascending.
pub fn cyclotomic_multisets() -> Vec<Vec<u64>> {
    let idx = small_cyclotomic_indices(MAX_FACTOR_DEGREE);
    let mut out = Vec::new();
    fn rec(idx: &[u64], start: usize, left: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..idx.len() {
            let d = euler_phi(idx[i]);
            if d <= left {
                cur.push(idx[i]);
                rec(idx, i, left - d, cur, out);
                cur.pop();
            }
        }
    }
    rec(&idx, 0, CHAR_POLY_DEGREE, &mut Vec::new(), &mut out);
    out
}

pub fn product_of(ms: &[u64]) -> IntPoly {
    ms.iter().fold(IntPoly::one(), |acc, &m| acc.mul(&cyclotomic(m as i64).unwrap()))
}

/// Why a multiset of cyclotomic indices was rejected.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rejection {
    Mod2(F2Poly),
    F9WithoutF1SquaredF3,
    Phi8WithPhi9,
    NotDividingImported,
}

pub fn classify_multiset(ms: &[u64]) -> Option<Rejection> {
    let p = product_of(ms);
    let exps = match mod2_factor_check(&p) {
        Mod2Check::Product(e) => e,
        Mod2Check::Refused { offending } => return Some(Rejection::Mod2(offending)),
    };
    let e = |k: u64| exps.get(&k).copied().unwrap_or(0);
    if e(9) > 0 && (e(1) < 2 || e(3) < 1) {
        return Some(Rejection::F9WithoutF1SquaredF3);
    }
    if ms.contains(&8) && (ms.contains(&9) || ms.contains(&18)) {
        return Some(Rejection::Phi8WithPhi9);
    }
    let order = lcm_list(ms);
    if !IMPORTED_ORDER_BOUNDS.iter().any(|b| b % order == 0) {
        return Some(Rejection::NotDividingImported);
    }
    None
}

/// Sorted list of possible orders: lcm's of the index multisets that pass
/// the mod-2 factor check, the `F9 => F1^2 F3 F9` divisibility, the Φ8
/// twist obstruction and the imported divisibility bound.
///
/// The Φ8 rule is applied only after confirming by exhaustive twist search
/// that no Φ8-lattice has genus `II_(2,2)2^2 9^1`.
pub fn admissible_orders() -> Result<Vec<u64>> {
    if !phi8_obstruction_holds()? {
        return Err(Error::Validation("a Phi8-twist lies in II_(2,2)2^2 9^1".into()));
    }
    let set: std::collections::BTreeSet<u64> =
        cyclotomic_multisets().iter().filter(|ms| classify_multiset(ms).is_none()).map(|ms| lcm_list(ms)).collect();
    Ok(set.into_iter().collect())
}

/// No twist of the principal Φ8-lattice has genus `II_(2,2)2^2 9^1`.
pub fn phi8_obstruction_holds() -> Result<bool> {
    let target: crate::genus::GenusSymbol = "II_(2,2)2^2 9^1".parse()?;
    target.check_consistency()?;
    let c = crate::phi::PhiConstraints {
        det_divisor: BigInt::from(36),
        signatures: vec![(2, 2)],
        n2_window: None,
    };
    let found = crate::phi::enumerate_phi_lattices(8, &c)?;
    Ok(found.iter().all(|cl| cl.genus != target))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn phi(m: i64) -> IntPoly {
        cyclotomic(m).unwrap()
    }

    #[test]
    fn cyclotomic_polys() {
        assert_eq!(phi(1), IntPoly::from_i64(&[-1, 1]));
        assert_eq!(phi(9), IntPoly::from_i64(&[1, 0, 0, 1, 0, 0, 1]));
        assert_eq!(phi(15), IntPoly::from_i64(&[1, -1, 0, 1, -1, 1, 0, -1, 1]));
        assert!(cyclotomic(0).is_err());
    }

    #[test]
    fn resultants() {
        assert_eq!(resultant(&phi(15), &phi(1)), BigInt::from(1));
        assert_eq!(resultant(&phi(15), &phi(3)), BigInt::from(25));
        assert_eq!(resultant(&phi(1), &phi(7)).abs(), BigInt::from(7));
        assert_eq!(resultant(&phi(3), &phi(1)).abs(), BigInt::from(3));
        assert_eq!(resultant(&phi(9), &phi(3).mul(&phi(1))).abs(), BigInt::from(27));
        assert_eq!(glue_bound(15, &phi(3)).unwrap(), BigInt::from(25));
        assert!(glue_bound(3, &phi(3)).is_err());
    }

    #[test]
    fn mod2_reductions() {
        assert_eq!(phi(7).mod2(), F2Poly(0b1111111));
        assert_eq!(phi(15).mod2(), F2Poly(0b110111011));
        assert_eq!(phi(30).mod2(), phi(15).mod2());
        let f15 = phi(15).mod2().factor();
        assert_eq!(f15.len(), 2);
        assert!(f15.keys().all(|g| g.degree() == 4));
    }

    #[test]
    fn factor_check() {
        let p = phi(9).mul(&phi(3)).mul(&phi(1).pow(4));
        let mut want = BTreeMap::new();
        want.insert(1, 4);
        want.insert(3, 1);
        want.insert(9, 1);
        assert_eq!(mod2_factor_check(&p), Mod2Check::Product(want));
        let bad = phi(15).mul(&phi(1).pow(4));
        match mod2_factor_check(&bad) {
            Mod2Check::Refused { offending } => assert_eq!(offending.degree(), 4),
            other => panic!("unexpected {other:?}"),
        }
        assert!(mod2_factor_check(&IntPoly::from_i64(&[1, 1])).is_ok());
    }

    #[test]
    fn orders() {
        let o = admissible_orders().unwrap();
        let want = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 12, 14, 15, 16, 18, 20, 21, 24, 28, 30, 36, 40, 42, 48, 56, 60, 84, 120];
        assert_eq!(o, want.to_vec());
    }
}
