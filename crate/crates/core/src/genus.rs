//! p-adic Jordan symbols and genus symbols of even lattices.
//!
//! Only completely even 2-adic lattices are handled: every 2-adic Jordan
//! constituent must be a scaled even unimodular lattice. Odd constituents
//! are reported as [`Error::Unsupported`].

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::matrix::QMat;

pub use crate::kneser::enumerate_definite_genus;
pub use crate::vectors::has_roots;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Constituent {
    pub scale_exp: u32,
    pub rank: usize,
    pub sign: i8,
}

/// Jordan symbol at one prime, constituents sorted by scale (rank-zero
/// constituents are not stored).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct JordanSymbol {
    pub p: u64,
    pub constituents: Vec<Constituent>,
    pub completely_even: bool,
}

impl JordanSymbol {
    pub fn new(p: u64, mut constituents: Vec<Constituent>) -> Self {
        constituents.retain(|c| c.rank > 0);
        constituents.sort();
        JordanSymbol { p, constituents, completely_even: p == 2 }
    }

    pub fn rank(&self) -> usize {
        self.constituents.iter().map(|c| c.rank).sum()
    }

    pub fn constituent(&self, scale_exp: u32) -> Option<&Constituent> {
        self.constituents.iter().find(|c| c.scale_exp == scale_exp)
    }

    /// Rank of the constituent of the given scale exponent (0 if absent).
    pub fn rank_at(&self, scale_exp: u32) -> usize {
        self.constituent(scale_exp).map_or(0, |c| c.rank)
    }

    /// Valuation of the determinant.
    pub fn det_valuation(&self) -> u64 {
        self.constituents.iter().map(|c| c.scale_exp as u64 * c.rank as u64).sum()
    }

    /// Non-unimodular constituents rendered as `q^n` / `q^-n`.
    pub fn tokens(&self, with_unimodular: bool) -> Vec<String> {
        self.constituents
            .iter()
            .filter(|c| with_unimodular || c.scale_exp > 0)
            .map(|c| {
                let q = BigInt::from(self.p).pow(c.scale_exp);
                if c.sign < 0 {
                    format!("{q}^-{}", c.rank)
                } else {
                    format!("{q}^{}", c.rank)
                }
            })
            .collect()
    }
}

impl fmt::Display for JordanSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.tokens(true).join(" "))
    }
}

/// Direct sum of Jordan symbols at the same prime: ranks add and signs
/// multiply scale by scale.
pub fn symbol_direct_sum(a: &JordanSymbol, b: &JordanSymbol) -> Result<JordanSymbol> {
    if a.p != b.p {
        return Err(Error::InvalidArgument(format!("prime mismatch: {} vs {}", a.p, b.p)));
    }
    let mut out: Vec<Constituent> = a.constituents.clone();
    for c in &b.constituents {
        match out.iter_mut().find(|x| x.scale_exp == c.scale_exp) {
            Some(x) => {
                x.rank += c.rank;
                x.sign *= c.sign;
            }
            None => out.push(*c),
        }
    }
    Ok(JordanSymbol::new(a.p, out))
}

fn delta(p: u64) -> i8 {
    if p % 4 == 3 {
        -1
    } else {
        1
    }
}

/// Whether the two local symbols admit a gluing along their full
/// discriminant groups into a unimodular lattice: for every scale `q > 1`
/// the ranks agree and `ε'_q = δ^{n_q} ε_q`.
pub fn unimodular_glue_exists(a: &JordanSymbol, b: &JordanSymbol) -> bool {
    if a.p != b.p {
        return false;
    }
    let d = delta(a.p);
    let scales: std::collections::BTreeSet<u32> = a
        .constituents
        .iter()
        .chain(&b.constituents)
        .map(|c| c.scale_exp)
        .filter(|&e| e > 0)
        .collect();
    scales.into_iter().all(|e| match (a.constituent(e), b.constituent(e)) {
        (Some(x), Some(y)) => {
            let factor = if x.rank % 2 == 1 { d } else { 1 };
            x.rank == y.rank && y.sign == factor * x.sign
        }
        _ => false,
    })
}

/// Necessary condition on the 2-adic symbol of a lattice carrying an
/// isometry of minimal polynomial Φ3: each constituent has even rank `n` and
/// sign `(-1)^{n/2}`.
pub fn phi3_symbol_constraint(a: &JordanSymbol) -> bool {
    a.constituents.iter().all(|c| {
        c.rank % 2 == 0 && c.sign == if (c.rank / 2) % 2 == 0 { 1 } else { -1 }
    })
}

/// Kronecker-type sign of a p-adic unit given as a rational with numerator
/// and denominator prime to p: Legendre symbol for odd p, and for p = 2 the
/// value +1 iff the unit is ±1 mod 8.
pub fn unit_sign(p: u64, u: &BigRational) -> i8 {
    let v = u.numer() * u.denom();
    if p == 2 {
        let r = v.mod_floor(&BigInt::from(8)).to_u64().unwrap();
        if r == 1 || r == 7 {
            1
        } else {
            -1
        }
    } else {
        legendre(&v, p)
    }
}

pub fn legendre(a: &BigInt, p: u64) -> i8 {
    let pb = BigInt::from(p);
    let a = a.mod_floor(&pb);
    if a.is_zero() {
        return 0;
    }
    let e = (&pb - 1u32) / 2u32;
    if a.modpow(&e, &pb).is_one() {
        1
    } else {
        -1
    }
}

pub fn valuation(x: &BigInt, p: u64) -> u32 {
    assert!(!x.is_zero());
    let pb = BigInt::from(p);
    let mut x = x.clone();
    let mut v = 0;
    while (&x % &pb).is_zero() {
        x /= &pb;
        v += 1;
    }
    v
}

fn qval(x: &BigRational, p: u64) -> i64 {
    valuation(x.numer(), p) as i64 - valuation(x.denom(), p) as i64
}

fn strip(x: &BigRational, p: u64, v: i64) -> BigRational {
    let pv = BigRational::from_integer(BigInt::from(p).pow(v.unsigned_abs() as u32));
    if v >= 0 {
        x / pv
    } else {
        x * pv
    }
}

/// p-adic Jordan decomposition of an even lattice.
pub fn jordan_decomposition(l: &Lattice, p: u64) -> Result<JordanSymbol> {
    if !l.is_even() {
        return Err(Error::NotEven);
    }
    if p < 2 || !is_prime(p) {
        return Err(Error::InvalidArgument(format!("{p} is not prime")));
    }
    let mut m: QMat = l.gram();
    let mut blocks: Vec<(i64, usize, BigRational)> = Vec::new(); // (valuation, rank, unit)
    let mut active: Vec<usize> = (0..l.rank()).collect();
    while !active.is_empty() {
        // minimal valuation among remaining entries
        let mut best: Option<(i64, usize, usize)> = None;
        for (ai, &i) in active.iter().enumerate() {
            for &j in &active[ai..] {
                if m[i][j].is_zero() {
                    continue;
                }
                let v = qval(&m[i][j], p);
                let better = match best {
                    None => true,
                    Some((bv, bi, bj)) => v < bv || (v == bv && i == j && bi != bj),
                };
                if better {
                    best = Some((v, i, j));
                }
            }
        }
        let (v, i, j) = best.expect("non-degenerate");
        if p != 2 {
            let piv = if i == j {
                i
            } else {
                // e_i <- e_i + e_j raises the diagonal to valuation v
                add_to(&mut m, i, j);
                i
            };
            eliminate(&mut m, &active, &[piv]);
            blocks.push((v, 1, strip(&m[piv][piv], p, v)));
            active.retain(|&x| x != piv);
        } else {
            if i == j {
                return Err(Error::Unsupported(format!(
                    "2-adic constituent of scale 2^{v} is odd (not completely even)"
                )));
            }
            eliminate(&mut m, &active, &[i, j]);
            let det = &m[i][i] * &m[j][j] - &m[i][j] * &m[j][i];
            blocks.push((v, 2, strip(&det, p, 2 * v)));
            active.retain(|&x| x != i && x != j);
        }
    }
    let mut cons: Vec<(i64, usize, BigRational)> = Vec::new();
    for (v, r, u) in blocks {
        match cons.iter_mut().find(|c| c.0 == v) {
            Some(c) => {
                c.1 += r;
                c.2 = &c.2 * &u;
            }
            None => cons.push((v, r, u)),
        }
    }
    let constituents = cons
        .into_iter()
        .map(|(v, r, u)| {
            if v < 0 {
                return Err(Error::NotIntegral);
            }
            Ok(Constituent { scale_exp: v as u32, rank: r, sign: unit_sign(p, &u) })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(JordanSymbol::new(p, constituents))
}

fn add_to(m: &mut QMat, i: usize, j: usize) {
    let n = m.len();
    for c in 0..n {
        let t = m[j][c].clone();
        m[i][c] += t;
    }
    for r in 0..n {
        let t = m[r][j].clone();
        m[r][i] += t;
    }
}

/// Clears the rows/columns of `active` against the pivot block `piv`.
fn eliminate(m: &mut QMat, active: &[usize], piv: &[usize]) {
    let others: Vec<usize> = active.iter().copied().filter(|x| !piv.contains(x)).collect();
    if piv.len() == 1 {
        let i = piv[0];
        for &k in &others {
            if m[k][i].is_zero() {
                continue;
            }
            let f = &m[k][i] / &m[i][i];
            row_op(m, k, i, &f);
        }
    } else {
        let (i, j) = (piv[0], piv[1]);
        let (a, b, c) = (m[i][i].clone(), m[i][j].clone(), m[j][j].clone());
        let det = &a * &c - &b * &b;
        for &k in &others {
            let (gi, gj) = (m[k][i].clone(), m[k][j].clone());
            if gi.is_zero() && gj.is_zero() {
                continue;
            }
            let x = (&c * &gi - &b * &gj) / &det;
            let y = (&a * &gj - &b * &gi) / &det;
            row_op(m, k, i, &x);
            row_op(m, k, j, &y);
        }
    }
}

/// Congruence operation e_k <- e_k - f e_i.
fn row_op(m: &mut QMat, k: usize, i: usize, f: &BigRational) {
    if f.is_zero() {
        return;
    }
    let n = m.len();
    for c in 0..n {
        let t = f * &m[i][c];
        m[k][c] -= t;
    }
    for r in 0..n {
        let t = f * &m[r][i];
        m[r][k] -= t;
    }
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub fn prime_factors(n: &BigInt) -> Vec<u64> {
    let mut n = n.abs();
    let mut out = Vec::new();
    let mut d = 2u64;
    while BigInt::from(d) * BigInt::from(d) <= n {
        let db = BigInt::from(d);
        if (&n % &db).is_zero() {
            out.push(d);
            while (&n % &db).is_zero() {
                n /= &db;
            }
        }
        d += 1;
    }
    if n > BigInt::one() {
        out.push(n.to_u64().expect("prime factor fits in u64"));
    }
    out
}

/// Genus symbol: signature, determinant and Jordan symbols at every prime
/// dividing `2 det`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GenusSymbol {
    pub signature: (usize, usize),
    pub det: BigInt,
    pub local: Vec<JordanSymbol>,
}

impl GenusSymbol {
    pub fn rank(&self) -> usize {
        self.signature.0 + self.signature.1
    }

    /// Local symbol at any prime; primes not dividing `2 det` give a
    /// unimodular symbol with sign `(det | p)`.
    pub fn local_at(&self, p: u64) -> JordanSymbol {
        if let Some(s) = self.local.iter().find(|s| s.p == p) {
            return s.clone();
        }
        let sign = legendre(&self.det, p);
        JordanSymbol::new(p, vec![Constituent { scale_exp: 0, rank: self.rank(), sign }])
    }

    /// Consistency of determinant, signature and local signs.
    pub fn check_consistency(&self) -> Result<()> {
        let neg = self.signature.1 % 2 == 1;
        if self.det.is_negative() != neg {
            return Err(Error::Validation("determinant sign does not match signature".into()));
        }
        for s in &self.local {
            if s.rank() != self.rank() {
                return Err(Error::Validation(format!("rank mismatch at p = {}", s.p)));
            }
            let v = valuation(&self.det, s.p) as u64;
            if v != s.det_valuation() {
                return Err(Error::Validation(format!("determinant valuation mismatch at p = {}", s.p)));
            }
            let unit = BigRational::from_integer(self.det.clone() / BigInt::from(s.p).pow(v as u32));
            let prod: i8 = s.constituents.iter().map(|c| c.sign).product();
            if prod != unit_sign(s.p, &unit) {
                return Err(Error::Validation(format!("sign product mismatch at p = {}", s.p)));
            }
            if s.p == 2 && s.constituents.iter().any(|c| c.rank % 2 == 1) {
                return Err(Error::Validation("odd-rank constituent at p = 2".into()));
            }
        }
        if !self.oddity_formula_holds() {
            return Err(Error::Validation("oddity formula fails".into()));
        }
        Ok(())
    }

    /// `s+ - s- + Σ_{p odd} excess_p ≡ oddity_2 (mod 8)` for completely even
    /// 2-adic symbols, whose oddity is `4 #{odd-power scales with ε = -1}`.
    pub fn oddity_formula_holds(&self) -> bool {
        let mut lhs = self.signature.0 as i64 - self.signature.1 as i64;
        let mut primes: Vec<u64> = self.local.iter().map(|s| s.p).collect();
        for p in crate::genus::prime_factors(&self.det) {
            if !primes.contains(&p) {
                primes.push(p);
            }
        }
        for p in primes.into_iter().filter(|&p| p != 2) {
            for c in &self.local_at(p).constituents {
                let q = (p as i64).pow(c.scale_exp);
                lhs += c.rank as i64 * (q - 1);
                if c.scale_exp % 2 == 1 && c.sign < 0 {
                    lhs += 4;
                }
            }
        }
        let oddity: i64 =
            self.local_at(2).constituents.iter().filter(|c| c.scale_exp % 2 == 1 && c.sign < 0).count() as i64 * 4;
        (lhs - oddity).rem_euclid(8) == 0
    }

    pub fn direct_sum(&self, other: &GenusSymbol) -> Result<GenusSymbol> {
        let mut primes: Vec<u64> = self.local.iter().chain(&other.local).map(|s| s.p).collect();
        primes.sort();
        primes.dedup();
        let local = primes
            .into_iter()
            .map(|p| symbol_direct_sum(&self.local_at(p), &other.local_at(p)))
            .collect::<Result<Vec<_>>>()?;
        Ok(GenusSymbol {
            signature: (self.signature.0 + other.signature.0, self.signature.1 + other.signature.1),
            det: &self.det * &other.det,
            local,
        })
    }
}

impl fmt::Display for GenusSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "II_({},{})", self.signature.0, self.signature.1)?;
        let toks: Vec<String> = self.local.iter().flat_map(|s| s.tokens(false)).collect();
        write!(f, "{}", toks.join(" "))
    }
}

impl FromStr for GenusSymbol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |m: &str| Error::Parse(format!("genus symbol {s:?}: {m}"));
        let rest = s.trim().strip_prefix("II_(").ok_or_else(|| bad("must start with II_("))?;
        let (sig, rest) = rest.split_once(')').ok_or_else(|| bad("unclosed signature"))?;
        let (sp, sm) = sig.split_once(',').ok_or_else(|| bad("signature needs two entries"))?;
        let sp: usize = sp.trim().parse().map_err(|_| bad("signature"))?;
        let sm: usize = sm.trim().parse().map_err(|_| bad("signature"))?;
        let n = sp + sm;
        let mut by_prime: std::collections::BTreeMap<u64, Vec<Constituent>> = Default::default();
        let mut det = BigInt::one();
        for tok in rest.split_whitespace() {
            let (q, e) = tok.split_once('^').ok_or_else(|| bad("token needs ^"))?;
            let q: u64 = q.parse().map_err(|_| bad("scale"))?;
            let (sign, e) = match e.strip_prefix('-') {
                Some(e) => (-1i8, e),
                None => (1i8, e.strip_prefix('+').unwrap_or(e)),
            };
            let rank: usize = e.parse().map_err(|_| bad("rank"))?;
            let ps = prime_factors(&BigInt::from(q));
            if ps.len() != 1 {
                return Err(bad("scale must be a prime power > 1"));
            }
            let p = ps[0];
            let k = valuation(&BigInt::from(q), p);
            det *= BigInt::from(q).pow(rank as u32);
            let list = by_prime.entry(p).or_default();
            if list.iter().any(|c| c.scale_exp == k) {
                return Err(bad("repeated scale"));
            }
            list.push(Constituent { scale_exp: k, rank, sign });
        }
        if sm % 2 == 1 {
            det = -det;
        }
        by_prime.entry(2).or_default();
        let mut local = Vec::new();
        for (&p, cons) in &by_prime {
            let used: usize = cons.iter().map(|c| c.rank).sum();
            if used > n {
                return Err(bad("constituent ranks exceed the rank"));
            }
            let v = valuation(&det, p);
            let unit = BigRational::from_integer(det.clone() / BigInt::from(p).pow(v));
            let prod: i8 = cons.iter().map(|c| c.sign).product();
            let mut all = cons.clone();
            if used < n {
                all.push(Constituent { scale_exp: 0, rank: n - used, sign: unit_sign(p, &unit) * prod });
            } else if prod != unit_sign(p, &unit) {
                return Err(bad("inconsistent signs"));
            }
            local.push(JordanSymbol::new(p, all));
        }
        Ok(GenusSymbol { signature: (sp, sm), det, local })
    }
}

pub fn genus_symbol(l: &Lattice) -> Result<GenusSymbol> {
    if !l.is_even() {
        return Err(Error::NotEven);
    }
    let det = l.determinant().to_integer();
    let mut primes = prime_factors(&det);
    if !primes.contains(&2) {
        primes.insert(0, 2);
    }
    let local = primes
        .into_iter()
        .map(|p| jordan_decomposition(l, p))
        .collect::<Result<Vec<_>>>()?;
    Ok(GenusSymbol { signature: l.signature(), det, local })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::standard::*;

    fn diag(v: &[i64]) -> Lattice {
        let n = v.len();
        let g: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| if i == j { v[i] } else { 0 }).collect()).collect();
        Lattice::from_int(&g).unwrap()
    }

    #[test]
    fn three_adic_symbols() {
        let a2 = jordan_decomposition(&a(2), 3).unwrap();
        assert_eq!(a2.to_string(), "1^-1 3^-1");
        // even version of diag(1,1,6,3,27,...): scale by 2 does not change
        // the 3-adic symbol up to the square class of 2, so use it directly
        let l = diag(&[2, 2, 12, 6, 54, 54, 54, 54, 54]);
        let s = jordan_decomposition(&l, 3).unwrap();
        let plain: Vec<(u32, usize)> = s.constituents.iter().map(|c| (c.scale_exp, c.rank)).collect();
        assert_eq!(plain, vec![(0, 2), (1, 2), (3, 5)]);
    }

    #[test]
    fn genus_strings() {
        assert_eq!(genus_symbol(&a(2)).unwrap().to_string(), "II_(2,0)3^-1");
        let u = hyperbolic_plane();
        let n = sum(&[u.clone(), scaled(&u, 2), scaled(&e(8), -2)]);
        assert_eq!(genus_symbol(&n).unwrap().to_string(), "II_(2,10)2^10");
        assert_eq!(genus_symbol(&scaled(&a(6), -2)).unwrap().to_string(), "II_(0,6)2^6 7^1");
        // q = 8/9 on the A8 discriminant forces a non-square unit at scale 9;
        // rescaling by -2 (a square mod 3) keeps the sign
        assert_eq!(genus_symbol(&scaled(&a(8), -2)).unwrap().to_string(), "II_(0,8)2^8 9^-1");
        assert_eq!(genus_symbol(&sum(&[u.clone(), scaled(&u, 2)])).unwrap().to_string(), "II_(2,2)2^2");
    }

    #[test]
    fn parse_roundtrip() {
        for s in ["II_(2,0)3^-1", "II_(2,10)2^10", "II_(0,6)2^-6 3^1", "II_(0,8)2^8 9^1", "II_(2,4)2^-6 3^-1"] {
            let g: GenusSymbol = s.parse().unwrap();
            assert_eq!(g.to_string(), s);
            g.check_consistency().unwrap();
        }
        let a2: GenusSymbol = "II_(2,0)3^-1".parse().unwrap();
        assert_eq!(a2, genus_symbol(&a(2)).unwrap());
    }

    #[test]
    fn odd_two_adic_is_unsupported() {
        let l = diag(&[2, 6]);
        assert!(matches!(jordan_decomposition(&l, 2), Err(Error::Unsupported(_))));
    }

    #[test]
    fn glue_and_phi3_rules() {
        let s7p = JordanSymbol::new(7, vec![Constituent { scale_exp: 1, rank: 1, sign: 1 }]);
        let s7m = JordanSymbol::new(7, vec![Constituent { scale_exp: 1, rank: 1, sign: -1 }]);
        assert!(unimodular_glue_exists(&s7p, &s7m));
        let s3 = JordanSymbol::new(3, vec![Constituent { scale_exp: 1, rank: 1, sign: 1 }]);
        assert!(!unimodular_glue_exists(&s3, &s3));
        let t = |v: &[(u32, usize, i8)]| {
            JordanSymbol::new(2, v.iter().map(|&(e, r, s)| Constituent { scale_exp: e, rank: r, sign: s }).collect())
        };
        assert!(unimodular_glue_exists(&t(&[(1, 10, 1)]), &t(&[(1, 10, 1)])));
        assert!(phi3_symbol_constraint(&t(&[(0, 2, -1)])));
        assert!(phi3_symbol_constraint(&t(&[(0, 2, -1), (1, 2, -1)])));
        assert!(phi3_symbol_constraint(&t(&[(1, 4, 1)])));
        assert!(phi3_symbol_constraint(&t(&[(0, 2, -1), (2, 2, -1)])));
        assert!(!phi3_symbol_constraint(&t(&[(0, 2, 1)])));
        let sum = symbol_direct_sum(&t(&[(1, 2, -1)]), &t(&[(1, 2, -1)])).unwrap();
        assert_eq!(sum, t(&[(1, 4, 1)]));
        let sum = symbol_direct_sum(&t(&[(1, 6, -1)]), &t(&[(1, 4, -1)])).unwrap();
        assert_eq!(sum, t(&[(1, 10, 1)]));
    }
}
