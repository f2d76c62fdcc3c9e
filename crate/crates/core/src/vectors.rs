//! Vector enumeration: short and close vectors in definite lattices, vectors
//! on affine slices of hyperbolic lattices, roots and root systems.
//!
//! Search trees are pruned with a floating point Cholesky factor of an
//! LLL-reduced Gram matrix (with a safety margin); every candidate that
//! survives is checked in exact integer arithmetic before it is reported.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::lll::lll_gram;
use crate::matrix::{self, IMat, QMat, QVec};

/// Positive definite integer quadratic form prepared for enumeration.
pub struct Ellipsoid {
    t: IMat,
    tinv: IMat,
    red: IMat,
    d: Vec<f64>,
    mu: Vec<Vec<f64>>,
}

impl Ellipsoid {
    pub fn new(gram: &IMat) -> Result<Self> {
        let n = gram.len();
        let (t, red) = lll_gram(gram, 0.99);
        let tinv_q = matrix::inverse_rat(&matrix::to_rat(&t))
            .ok_or_else(|| Error::InvalidArgument("singular transform".into()))?;
        let tinv: IMat = tinv_q
            .iter()
            .map(|r| r.iter().map(|x| x.to_integer().to_i64().unwrap()).collect())
            .collect();
        // LDL^T of the reduced Gram matrix
        let mut l = vec![vec![0.0f64; n]; n];
        let mut d = vec![0.0f64; n];
        for j in 0..n {
            let mut s = red[j][j] as f64;
            for k in 0..j {
                s -= l[j][k] * l[j][k] * d[k];
            }
            if s <= 0.0 {
                return Err(Error::NotDefinite);
            }
            d[j] = s;
            l[j][j] = 1.0;
            for i in j + 1..n {
                let mut s = red[i][j] as f64;
                for k in 0..j {
                    s -= l[i][k] * l[j][k] * d[k];
                }
                l[i][j] = s / d[j];
            }
        }
        // mu[i][j] = L[j][i] for j > i
        let mu = (0..n).map(|i| (0..n).map(|j| if j > i { l[j][i] } else { 0.0 }).collect()).collect();
        Ok(Ellipsoid { t, tinv, red, d, mu })
    }

    pub fn dim(&self) -> usize {
        self.red.len()
    }

    /// Calls `f(y)` for every integer vector `y` (original coordinates) with
    /// `(y - c) G (y - c) <= radius`. Enumeration stops early if `f` returns
    /// `false`.
    pub fn for_each_close<F: FnMut(&[i64]) -> bool>(&self, center: &[BigRational], radius: &BigRational, mut f: F) {
        let n = self.dim();
        if radius.is_negative() {
            return;
        }
        if n == 0 {
            if center.is_empty() {
                f(&[]);
            }
            return;
        }
        // center in reduced coordinates, with a common denominator
        let cz = matrix::qvec_mat(center, &matrix::to_rat(&self.tinv));
        let cd = cz.iter().fold(BigInt::one(), |a, x| a.lcm(x.denom()));
        let cn: Vec<BigInt> = cz.iter().map(|x| (x * BigRational::from_integer(cd.clone())).to_integer()).collect();
        let cf: Vec<f64> = cz.iter().map(|x| x.to_f64().unwrap()).collect();
        let rf = radius.to_f64().unwrap();
        let margin = rf * 1e-9 + 1e-9;
        let exact = ExactCheck::new(&self.red, &cn, &cd, radius);
        let mut z = vec![0i64; n];
        let mut y = vec![0i64; n];
        let mut go = true;
        self.recurse(n - 1, rf + margin, &cf, &mut z, &mut y, &exact, &mut f, &mut go);
    }

    #[allow(clippy::too_many_arguments)]
    fn recurse<F: FnMut(&[i64]) -> bool>(
        &self,
        i: usize,
        rem: f64,
        c: &[f64],
        z: &mut Vec<i64>,
        y: &mut Vec<i64>,
        exact: &ExactCheck,
        f: &mut F,
        go: &mut bool,
    ) {
        let n = self.dim();
        let mut ctr = c[i];
        for j in i + 1..n {
            ctr -= self.mu[i][j] * (z[j] as f64 - c[j]);
        }
        let span = (rem.max(0.0) / self.d[i]).sqrt();
        let lo = (ctr - span).ceil() as i64;
        let hi = (ctr + span).floor() as i64;
        for xi in lo..=hi {
            if !*go {
                return;
            }
            let dx = xi as f64 - ctr;
            let used = self.d[i] * dx * dx;
            if used > rem {
                continue;
            }
            z[i] = xi;
            if i == 0 {
                if exact.accept(z) {
                    for (k, yk) in y.iter_mut().enumerate() {
                        *yk = (0..n).map(|r| z[r] * self.t[r][k]).sum();
                    }
                    if !f(y) {
                        *go = false;
                        return;
                    }
                }
            } else {
                self.recurse(i - 1, rem - used, c, z, y, exact, f, go);
            }
        }
        z[i] = 0;
    }
}

/// Exact test `(cd z - cn) G (cd z - cn) <= radius * cd^2`.
struct ExactCheck {
    g: IMat,
    small: Option<(Vec<i128>, i128, i128, i128)>,
    cn: Vec<BigInt>,
    cd: BigInt,
    rn: BigInt,
    rd: BigInt,
}

impl ExactCheck {
    fn new(g: &IMat, cn: &[BigInt], cd: &BigInt, radius: &BigRational) -> Self {
        let small = (|| {
            let cn: Vec<i128> = cn.iter().map(|x| x.to_i128()).collect::<Option<_>>()?;
            let cd = cd.to_i128()?;
            let rn = radius.numer().to_i128()?;
            let rd = radius.denom().to_i128()?;
            if cd.abs() > 1 << 30 || cn.iter().any(|x| x.abs() > 1 << 40) || rn.abs() > 1 << 60 || rd > 1 << 30 {
                return None;
            }
            Some((cn, cd, rn, rd))
        })();
        ExactCheck {
            g: g.clone(),
            small,
            cn: cn.to_vec(),
            cd: cd.clone(),
            rn: radius.numer().clone(),
            rd: radius.denom().clone(),
        }
    }

    fn accept(&self, z: &[i64]) -> bool {
        let n = z.len();
        if let Some((cn, cd, rn, rd)) = &self.small {
            let v: Vec<i128> = (0..n).map(|i| cd * z[i] as i128 - cn[i]).collect();
            let mut s: Option<i128> = Some(0);
            for i in 0..n {
                if v[i] == 0 {
                    continue;
                }
                let mut row = 0i128;
                for j in 0..n {
                    row += self.g[i][j] as i128 * v[j];
                }
                s = s.and_then(|s| v[i].checked_mul(row).and_then(|p| s.checked_add(p)));
            }
            if let Some(s) = s {
                let lhs = s.checked_mul(*rd);
                let rhs = rn.checked_mul(cd * cd);
                if let (Some(l), Some(r)) = (lhs, rhs) {
                    return l <= r;
                }
            }
        }
        let v: Vec<BigInt> = (0..n).map(|i| &self.cd * z[i] - &self.cn[i]).collect();
        let mut s = BigInt::zero();
        for i in 0..n {
            for j in 0..n {
                s += &v[i] * &v[j] * self.g[i][j];
            }
        }
        s * &self.rd <= &self.rn * &self.cd * &self.cd
    }
}

/// Integer Gram matrix of a definite lattice scaled to be positive definite
/// and integral: returns `(gram, scale)` where `gram = scale * L.gram()`.
pub fn positive_integer_form(l: &Lattice) -> Result<(IMat, BigRational)> {
    let (p, m) = l.signature();
    let sign: i64 = if m == 0 {
        1
    } else if p == 0 {
        -1
    } else {
        return Err(Error::NotDefinite);
    };
    let g = l.gram();
    let den = matrix::common_denominator(&g);
    let scale = BigRational::from_integer(den * sign);
    let gi: IMat = g
        .iter()
        .map(|r| r.iter().map(|x| (x * &scale).to_integer().to_i64().unwrap()).collect())
        .collect();
    Ok((gi, scale))
}

fn canonical_sign(v: &mut [i64]) {
    if let Some(&first) = v.iter().find(|&&x| x != 0) {
        if first < 0 {
            for x in v.iter_mut() {
                *x = -*x;
            }
        }
    }
}

fn norm_i(g: &IMat, v: &[i64]) -> i64 {
    matrix::dot(&matrix::vec_mat(v, g), v)
}

/// All nonzero vectors of norm at most `bound` in a positive definite
/// integer form, both signs, grouped by norm.
pub fn vectors_up_to(gram: &IMat, bound: i64) -> Result<BTreeMap<i64, Vec<Vec<i64>>>> {
    let e = Ellipsoid::new(gram)?;
    let n = gram.len();
    let mut out: BTreeMap<i64, Vec<Vec<i64>>> = BTreeMap::new();
    e.for_each_close(&vec![BigRational::zero(); n], &matrix::rat_int(bound), |y| {
        if y.iter().any(|&x| x != 0) {
            out.entry(norm_i(gram, y)).or_default().push(y.to_vec());
        }
        true
    });
    for v in out.values_mut() {
        v.sort();
    }
    Ok(out)
}

/// All `v` with `<v,v> = norm`, one of each pair `±v` (first nonzero
/// coordinate positive), sorted lexicographically.
pub fn short_vectors(l: &Lattice, norm: &BigRational) -> Result<Vec<Vec<i64>>> {
    let (g, scale) = positive_integer_form(l)?;
    let target = norm * &scale;
    if target.is_negative() || !target.is_integer() {
        return Ok(Vec::new());
    }
    let t = target.to_integer().to_i64().unwrap();
    if t == 0 {
        return Ok(Vec::new());
    }
    let e = Ellipsoid::new(&g)?;
    let mut out = Vec::new();
    e.for_each_close(&vec![BigRational::zero(); g.len()], &target, |y| {
        if norm_i(&g, y) == t {
            let mut v = y.to_vec();
            canonical_sign(&mut v);
            out.push(v);
        }
        true
    });
    out.sort();
    out.dedup();
    Ok(out)
}

/// Roots: vectors of norm 2 (positive definite) or −2 (negative definite).
pub fn roots(l: &Lattice) -> Result<Vec<Vec<i64>>> {
    let (p, _) = l.signature();
    let norm = if p == 0 { -2 } else { 2 };
    short_vectors(l, &matrix::rat_int(norm))
}

pub fn has_roots(l: &Lattice) -> Result<bool> {
    let (g, scale) = positive_integer_form(l)?;
    let target = matrix::rat_int(2) * scale.abs();
    if !target.is_integer() {
        return Ok(false);
    }
    let t = target.to_integer().to_i64().unwrap();
    let e = Ellipsoid::new(&g)?;
    let mut found = false;
    e.for_each_close(&vec![BigRational::zero(); g.len()], &target, |y| {
        if norm_i(&g, y) == t {
            found = true;
            return false;
        }
        true
    });
    Ok(found)
}

/// ADE component of a root system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RootComponent {
    A(usize),
    D(usize),
    E(usize),
}

impl RootComponent {
    fn key(&self) -> (u8, usize) {
        match *self {
            RootComponent::A(n) => (0, n),
            RootComponent::D(n) => (1, n),
            RootComponent::E(n) => (2, n),
        }
    }
}

/// Multiset of ADE components.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct RootType(pub Vec<RootComponent>);

impl RootType {
    pub fn rank(&self) -> usize {
        self.0
            .iter()
            .map(|c| match *c {
                RootComponent::A(n) | RootComponent::D(n) | RootComponent::E(n) => n,
            })
            .sum()
    }

    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "0" || s == "none" {
            return Ok(RootType::default());
        }
        let mut comps = Vec::new();
        for tok in s.split('+') {
            let tok = tok.trim();
            let pos = tok
                .find(|c: char| c.is_ascii_alphabetic())
                .ok_or_else(|| Error::Parse(format!("bad root type token {tok:?}")))?;
            let mult: usize = if pos == 0 { 1 } else { tok[..pos].parse().map_err(|_| Error::Parse(tok.into()))? };
            let letter = tok.as_bytes()[pos];
            let rank: usize = tok[pos + 1..].parse().map_err(|_| Error::Parse(tok.into()))?;
            let c = match letter {
                b'A' => RootComponent::A(rank),
                b'D' => RootComponent::D(rank),
                b'E' => RootComponent::E(rank),
                _ => return Err(Error::Parse(format!("unknown root letter in {tok:?}"))),
            };
            for _ in 0..mult {
                comps.push(c);
            }
        }
        comps.sort_by_key(RootComponent::key);
        Ok(RootType(comps))
    }
}

impl std::fmt::Display for RootType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        let mut i = 0;
        while i < self.0.len() {
            let c = self.0[i];
            let mut k = i;
            while k < self.0.len() && self.0[k] == c {
                k += 1;
            }
            let (letter, n) = match c {
                RootComponent::A(n) => ('A', n),
                RootComponent::D(n) => ('D', n),
                RootComponent::E(n) => ('E', n),
            };
            let m = k - i;
            if m == 1 {
                parts.push(format!("{letter}{n}"));
            } else {
                parts.push(format!("{m}{letter}{n}"));
            }
            i = k;
        }
        write!(f, "{}", parts.join("+"))
    }
}

/// Simple roots of the root system of a definite lattice with respect to a
/// generic linear functional, in lattice coordinates.
pub fn simple_roots(l: &Lattice) -> Result<Vec<Vec<i64>>> {
    let rs = roots(l)?;
    if rs.is_empty() {
        return Ok(Vec::new());
    }
    let (g, _) = positive_integer_form(l)?;
    let n = g.len();
    // generic functional: pairing with a vector that is orthogonal to no root
    let mut func: Vec<i64> = (0..n as i64).map(|i| 1 + 37 * i * i + 11 * i).collect();
    let mut attempt = 0i64;
    let pair = |f: &[i64], r: &[i64]| matrix::dot(&matrix::vec_mat(f, &g), r);
    while rs.iter().any(|r| pair(&func, r) == 0) {
        attempt += 1;
        func = (0..n as i64).map(|i| 1 + (attempt * 7919 + 104729 * i) % 100003 + i * attempt).collect();
    }
    let pos: Vec<Vec<i64>> = rs
        .iter()
        .map(|r| if pair(&func, r) > 0 { r.clone() } else { r.iter().map(|x| -x).collect() })
        .collect();
    let set: std::collections::HashSet<Vec<i64>> = pos.iter().cloned().collect();
    let mut simple = Vec::new();
    for r in &pos {
        let decomposable = pos.iter().any(|s| {
            let d: Vec<i64> = r.iter().zip(s).map(|(a, b)| a - b).collect();
            set.contains(&d)
        });
        if !decomposable {
            simple.push(r.clone());
        }
    }
    simple.sort();
    Ok(simple)
}

/// ADE type of the sublattice generated by the roots.
pub fn root_type(l: &Lattice) -> Result<RootType> {
    let simple = simple_roots(l)?;
    let (g, _) = positive_integer_form(l)?;
    let k = simple.len();
    let mut adj = vec![Vec::new(); k];
    for i in 0..k {
        for j in 0..i {
            let p = matrix::dot(&matrix::vec_mat(&simple[i], &g), &simple[j]);
            if p != 0 {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
    }
    let mut seen = vec![false; k];
    let mut comps = Vec::new();
    for s in 0..k {
        if seen[s] {
            continue;
        }
        let mut stack = vec![s];
        let mut nodes = Vec::new();
        seen[s] = true;
        while let Some(v) = stack.pop() {
            nodes.push(v);
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        comps.push(classify_dynkin(&nodes, &adj)?);
    }
    comps.sort_by_key(RootComponent::key);
    Ok(RootType(comps))
}

fn classify_dynkin(nodes: &[usize], adj: &[Vec<usize>]) -> Result<RootComponent> {
    let n = nodes.len();
    let branch: Vec<usize> = nodes.iter().copied().filter(|&v| adj[v].len() >= 3).collect();
    if branch.is_empty() {
        return Ok(RootComponent::A(n));
    }
    if branch.len() > 1 || adj[branch[0]].len() != 3 {
        return Err(Error::Validation("root system is not simply laced ADE".into()));
    }
    let b = branch[0];
    let mut arms: Vec<usize> = adj[b]
        .iter()
        .map(|&start| {
            let mut len = 1;
            let (mut prev, mut cur) = (b, start);
            loop {
                let next: Vec<usize> = adj[cur].iter().copied().filter(|&x| x != prev).collect();
                if next.is_empty() {
                    break;
                }
                prev = cur;
                cur = next[0];
                len += 1;
            }
            len
        })
        .collect();
    arms.sort();
    match (arms[0], arms[1], arms[2]) {
        (1, 1, _) => Ok(RootComponent::D(n)),
        (1, 2, 2) => Ok(RootComponent::E(6)),
        (1, 2, 3) => Ok(RootComponent::E(7)),
        (1, 2, 4) => Ok(RootComponent::E(8)),
        _ => Err(Error::Validation("unexpected Dynkin diagram".into())),
    }
}

/// Integer vectors `x` with `C x = t` (rows of `C` are linear forms on
/// coordinates) and `x G x = norm`, assuming `G` is definite on `ker C`.
pub fn affine_slice(gram: &IMat, c: &[Vec<i64>], t: &[i64], norm: &BigRational) -> Result<Vec<Vec<i64>>> {
    let mut out = Vec::new();
    affine_slice_each(gram, c, t, norm, |x| {
        out.push(x.to_vec());
        true
    })?;
    out.sort();
    Ok(out)
}

/// Callback form of [`affine_slice`].
pub fn affine_slice_each<F: FnMut(&[i64]) -> bool>(
    gram: &IMat,
    c: &[Vec<i64>],
    t: &[i64],
    norm: &BigRational,
    f: F,
) -> Result<()> {
    let n = gram.len();
    let k = c.len();
    if k == 0 {
        return Err(Error::InvalidArgument("at least one linear constraint required".into()));
    }
    let Some((x0, kernel)) = solve_linear(c, t, n)? else { return Ok(()) };
    coset_slice_each(gram, &x0, &kernel, norm, f)
}

/// Integer points `x0 + y B` (rows of `B` span a lattice on which `G` is
/// definite) with `x G x = norm`.
pub fn coset_slice_each<F: FnMut(&[i64]) -> bool>(
    gram: &IMat,
    x0: &[i64],
    kernel: &IMat,
    norm: &BigRational,
    f: F,
) -> Result<()> {
    SliceEnumerator::new(gram, kernel)?.each(x0, norm, f)
}

/// Enumeration of `x0 + y B` with `x G x = norm` for a fixed `B` and many
/// offsets `x0`; the reduction of the form on `B` is done once.
pub struct SliceEnumerator {
    gram: IMat,
    gq: QMat,
    kernel: IMat,
    sigma: i64,
    pmat: QMat,
    pinv: QMat,
    ellipsoid: Option<Ellipsoid>,
}

impl SliceEnumerator {
    pub fn new(gram: &IMat, kernel: &IMat) -> Result<Self> {
        let gq = matrix::to_rat(gram);
        if kernel.is_empty() {
            return Ok(SliceEnumerator {
                gram: gram.clone(),
                gq,
                kernel: Vec::new(),
                sigma: 1,
                pmat: Vec::new(),
                pinv: Vec::new(),
                ellipsoid: None,
            });
        }
        let gk = matrix::congruence(kernel, gram);
        let kl = Lattice::from_int(&gk).map_err(|_| Error::NonCompact("degenerate slice".into()))?;
        let (p, m) = kl.signature();
        let sigma: i64 = if m == 0 {
            1
        } else if p == 0 {
            -1
        } else {
            return Err(Error::NonCompact("form is indefinite on the constraint kernel".into()));
        };
        let pmat: IMat = gk.iter().map(|r| r.iter().map(|x| sigma * x).collect()).collect();
        let pq = matrix::to_rat(&pmat);
        let pinv = matrix::inverse_rat(&pq).unwrap();
        let ellipsoid = Some(Ellipsoid::new(&pmat)?);
        Ok(SliceEnumerator { gram: gram.clone(), gq, kernel: kernel.clone(), sigma, pmat: pq, pinv, ellipsoid })
    }

    pub fn each<F: FnMut(&[i64]) -> bool>(&self, x0: &[i64], norm: &BigRational, mut f: F) -> Result<()> {
        let n = self.gram.len();
        let x0q = matrix::ivec_to_q(x0);
        let a = matrix::qdot(&matrix::qvec_mat(&x0q, &self.gq), &x0q);
        let Some(e) = &self.ellipsoid else {
            if a == *norm {
                f(x0);
            }
            return Ok(());
        };
        let sigma = self.sigma;
        // b = K G x0
        let gx0 = matrix::vec_mat(x0, &matrix::transpose(&self.gram));
        let b: Vec<i64> = self.kernel.iter().map(|row| matrix::dot(row, &gx0)).collect();
        let sb: QVec = b.iter().map(|&x| matrix::rat_int(-sigma * x)).collect();
        let center = matrix::qvec_mat(&sb, &self.pinv);
        let cpc = matrix::qdot(&matrix::qvec_mat(&center, &self.pmat), &center);
        let radius = (norm - &a) * matrix::rat_int(sigma) + cpc;
        if radius.is_negative() {
            return Ok(());
        }
        let mut x = vec![0i64; n];
        let target = norm.clone();
        e.for_each_close(&center, &radius, |y| {
            for (j, xj) in x.iter_mut().enumerate() {
                *xj = x0[j] + y.iter().zip(&self.kernel).map(|(yi, row)| yi * row[j]).sum::<i64>();
            }
            let v = matrix::ivec_to_q(&x);
            if matrix::qdot(&matrix::qvec_mat(&v, &self.gq), &v) == target {
                return f(&x);
            }
            true
        });
        Ok(())
    }
}

/// Like [`affine_slice_each`], restricted to `x ≡ residue (mod modulus)`.
pub fn affine_coset_slice_each<F: FnMut(&[i64]) -> bool>(
    gram: &IMat,
    c: &[Vec<i64>],
    t: &[i64],
    modulus: i64,
    residue: &[i64],
    norm: &BigRational,
    f: F,
) -> Result<()> {
    let n = gram.len();
    // x = residue + m u, m C u = t - C residue
    let mc: IMat = c.iter().map(|r| r.iter().map(|x| x * modulus).collect()).collect();
    let rhs: Vec<i64> = c.iter().zip(t).map(|(r, ti)| ti - matrix::dot(r, residue)).collect();
    let Some((u0, kernel)) = solve_linear(&mc, &rhs, n)? else { return Ok(()) };
    let x0: Vec<i64> = residue.iter().zip(&u0).map(|(r, u)| r + modulus * u).collect();
    let basis: IMat = kernel.iter().map(|r| r.iter().map(|x| x * modulus).collect()).collect();
    coset_slice_each(gram, &x0, &basis, norm, f)
}

/// Particular integer solution of `C x = t` and a basis of the integer
/// kernel of `C`; `None` if there is no integer solution.
pub fn solve_linear(c: &[Vec<i64>], t: &[i64], n: usize) -> Result<Option<(Vec<i64>, IMat)>> {
    let sys = LinearSystem::new(c, n)?;
    Ok(sys.solve(t).map(|x0| (x0, sys.kernel.clone())))
}

/// Integer linear system `C x = t` with fixed `C` (independent rows),
/// prepared for many right-hand sides.
pub struct LinearSystem {
    k: usize,
    n: usize,
    h: matrix::BMat,
    u: matrix::BMat,
    pivots: Vec<usize>,
    pub kernel: IMat,
}

impl LinearSystem {
    pub fn new(c: &[Vec<i64>], n: usize) -> Result<Self> {
        let k = c.len();
        // u * C^T = H with H echelon
        let ct = matrix::to_big(&matrix::transpose(c));
        let (h, u, r) = matrix::hnf_with_transform(&ct);
        if r < k {
            return Err(Error::InvalidArgument("linear constraints are dependent".into()));
        }
        let pivots = h.iter().take(r).map(|row| row.iter().position(|x| !x.is_zero()).unwrap()).collect();
        let kernel_big: matrix::BMat = u.iter().skip(r).cloned().collect();
        let kernel = if kernel_big.is_empty() {
            Vec::new()
        } else {
            matrix::big_to_i64(&matrix::hnf_basis(&kernel_big))
                .ok_or_else(|| Error::Unsupported("kernel entries exceed 64 bits".into()))?
        };
        let h = h.into_iter().take(r).collect();
        let u = u.into_iter().take(r).collect();
        Ok(LinearSystem { k, n, h, u, pivots, kernel })
    }

    /// A particular integer solution, or `None`.
    pub fn solve(&self, t: &[i64]) -> Option<Vec<i64>> {
        let r = self.h.len();
        // x = z u; C x^T = H^T z^T, solved along the pivots
        let mut z = vec![BigInt::zero(); r];
        for (i, &pc) in self.pivots.iter().enumerate() {
            let mut rhs = BigInt::from(t[pc]);
            for (i2, zi) in z.iter().enumerate().take(i) {
                rhs -= zi * &self.h[i2][pc];
            }
            if !(&rhs % &self.h[i][pc]).is_zero() {
                return None;
            }
            z[i] = rhs / &self.h[i][pc];
        }
        for j in 0..self.k {
            let s: BigInt = (0..r).map(|i| &z[i] * &self.h[i][j]).sum();
            if s != BigInt::from(t[j]) {
                return None;
            }
        }
        Some(
            (0..self.n)
                .map(|j| (0..r).map(|i| &z[i] * &self.u[i][j]).sum::<BigInt>().to_i64().unwrap())
                .collect(),
        )
    }
}

/// Linear form `x -> den * <w, x>` as integer coefficients, and `den`.
fn pairing_form(l: &Lattice, w: &[BigRational]) -> (Vec<i64>, BigInt) {
    let row = matrix::qvec_mat(w, &l.gram());
    let den = row.iter().fold(BigInt::one(), |a, x| a.lcm(x.denom()));
    let dq = BigRational::from_integer(den.clone());
    let c = row.iter().map(|x| (x * &dq).to_integer().to_i64().unwrap()).collect();
    (c, den)
}

/// Vectors `v` of `L` (or of `L^v`, in dual-basis coordinates, when `dual`
/// is set) with `<v,v> = norm` and `<v,w> = pairing`. The form must be
/// definite on `w^perp`, which holds for definite `L` and for hyperbolic `L`
/// with `<w,w> > 0`.
pub fn fixed_pairing_vectors(
    l: &Lattice,
    norm: &BigRational,
    w: &[BigRational],
    pairing: &BigRational,
    dual: bool,
) -> Result<Vec<Vec<i64>>> {
    let lat = if dual { l.dual() } else { l.clone() };
    let wl: QVec = if dual {
        // coordinates of w in the dual basis: w * G
        matrix::qvec_mat(w, &l.gram())
    } else {
        w.to_vec()
    };
    let (c, den) = pairing_form(&lat, &wl);
    let t = pairing * BigRational::from_integer(den);
    if !t.is_integer() {
        return Ok(Vec::new());
    }
    let gq = lat.gram();
    let gd = matrix::common_denominator(&gq);
    let gdq = BigRational::from_integer(gd);
    let gi: IMat = gq
        .iter()
        .map(|r| r.iter().map(|x| (x * &gdq).to_integer().to_i64().unwrap()).collect())
        .collect();
    let wn = lat.inner(&wl, &wl);
    if !lat.is_definite() && !wn.is_positive() {
        return Err(Error::NonCompact("pairing vector must have positive norm".into()));
    }
    affine_slice(&gi, &[c], &[t.to_integer().to_i64().unwrap()], &(norm * &gdq))
}

/// All `r` with `<r,r> = -2`, `<a,r> > 0`, `<b,r> < 0` in a hyperbolic
/// even lattice, for `a`, `b` in the same positive cone.
pub fn separating_roots(l: &Lattice, a: &[i64], b: &[i64]) -> Result<Vec<Vec<i64>>> {
    let g = l.int_gram()?;
    let aa = norm_i(&g, a);
    let bb = norm_i(&g, b);
    let ab = matrix::dot(&matrix::vec_mat(a, &g), b);
    if aa <= 0 || bb <= 0 || ab <= 0 {
        return Err(Error::InvalidArgument("a and b must lie in the same positive cone".into()));
    }
    let det = (aa as i128) * (bb as i128) - (ab as i128) * (ab as i128);
    if det >= 0 {
        // a, b proportional
        return Ok(Vec::new());
    }
    let bound = -2 * det; // b² s² - 2ab s t + a² t² <= bound for the span part
    let ca = matrix::vec_mat(a, &g);
    let cb = matrix::vec_mat(b, &g);
    let ga = ca.iter().fold(0i64, |x, &y| x.gcd(&y));
    let gb = cb.iter().fold(0i64, |x, &y| x.gcd(&y));
    let sys = LinearSystem::new(&[ca.clone(), cb.clone()], g.len())?;
    let en = SliceEnumerator::new(&g, &sys.kernel)?;
    let m2 = matrix::rat_int(-2);
    let mut out = Vec::new();
    let mut s = ga;
    while (bb as i128) * (s as i128) * (s as i128) <= bound {
        let mut t = -gb;
        loop {
            let (si, ti) = (s as i128, t as i128);
            let q = (bb as i128) * si * si - 2 * (ab as i128) * si * ti + (aa as i128) * ti * ti;
            if q > bound {
                break;
            }
            if let Some(x0) = sys.solve(&[s, t]) {
                en.each(&x0, &m2, |x| {
                    out.push(x.to_vec());
                    true
                })?;
            }
            t -= gb;
        }
        s += ga;
    }
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::standard::*;
    use crate::matrix::rat_int;

    #[test]
    fn a2_and_e8_roots() {
        assert_eq!(short_vectors(&a(2), &rat_int(2)).unwrap().len(), 3);
        assert_eq!(short_vectors(&e(8), &rat_int(2)).unwrap().len(), 120);
        assert!(short_vectors(&scaled(&e(8), -2), &rat_int(-2)).unwrap().is_empty());
        assert_eq!(short_vectors(&scaled(&e(8), -2), &rat_int(-4)).unwrap().len(), 120);
    }

    #[test]
    fn root_types() {
        assert_eq!(root_type(&e(8)).unwrap().to_string(), "E8");
        let l = sum(&[a(1), a(1), d(4), e(6), a(3)]);
        assert_eq!(root_type(&scaled(&l, -1)).unwrap().to_string(), "2A1+A3+D4+E6");
        assert_eq!(RootType::parse("8A1+2D4").unwrap().to_string(), "8A1+2D4");
        assert_eq!(root_type(&d(5)).unwrap().to_string(), "D5");
        assert_eq!(root_type(&e(7)).unwrap().to_string(), "E7");
    }

    #[test]
    fn fixed_pairing_in_u_and_a2() {
        let u = hyperbolic_plane();
        let w = vec![rat_int(1), rat_int(1)];
        let v = fixed_pairing_vectors(&u, &rat_int(0), &w, &rat_int(1), false).unwrap();
        assert_eq!(v, vec![vec![0, 1], vec![1, 0]]);
        let r = vec![rat_int(1), rat_int(0)];
        let v = fixed_pairing_vectors(&a(2), &rat_int(2), &r, &rat_int(1), false).unwrap();
        assert_eq!(v.len(), 2);
    }

    #[test]
    fn separating_roots_flip() {
        // U + A1(-1): a = (1,1,0) ample-ish, reflection of a in r0 = (0,0,1)
        let l = hyperbolic_plane().direct_sum(&scaled(&a(1), -1));
        let a = vec![1, 2, -1];
        let r0 = vec![0, 0, 1];
        let g = l.int_gram().unwrap();
        let ar = matrix::dot(&matrix::vec_mat(&a, &g), &r0);
        let b: Vec<i64> = a.iter().zip(&r0).map(|(x, y)| x + ar * y).collect();
        let s = separating_roots(&l, &a, &b).unwrap();
        assert!(s.contains(&r0));
        let back = separating_roots(&l, &b, &a).unwrap();
        let neg: Vec<Vec<i64>> = s.iter().map(|v| v.iter().map(|x| -x).collect()).collect();
        let mut neg = neg;
        neg.sort();
        assert_eq!(back, neg);
        assert!(separating_roots(&l, &a, &a).unwrap().is_empty());
    }
}
