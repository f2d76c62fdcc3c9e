//! Permutation groups via deterministic Schreier–Sims, and matrix groups
//! over the field with two elements acting on nonzero vectors.

use std::collections::{BTreeMap, HashMap, HashSet};

use num_bigint::BigInt;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::matrix::IMat;

pub type Perm = Vec<u32>;

pub fn identity_perm(n: usize) -> Perm {
    (0..n as u32).collect()
}

/// `a` then `b`.
pub fn compose(a: &Perm, b: &Perm) -> Perm {
    a.iter().map(|&x| b[x as usize]).collect()
}

pub fn invert(a: &Perm) -> Perm {
    let mut out = vec![0u32; a.len()];
    for (i, &x) in a.iter().enumerate() {
        out[x as usize] = i as u32;
    }
    out
}

fn is_id(a: &Perm) -> bool {
    a.iter().enumerate().all(|(i, &x)| i as u32 == x)
}

struct Level {
    base: u32,
    gens: Vec<Perm>,
    /// coset representative for each orbit point, mapping `base` there
    reps: HashMap<u32, Perm>,
    orbit: Vec<u32>,
    /// number of generators already processed for each orbit position
    done: Vec<usize>,
}

/// Base and strong generating set.
pub struct StabChain {
    degree: usize,
    levels: Vec<Level>,
}

impl StabChain {
    pub fn new(degree: usize, gens: &[Perm]) -> Self {
        let mut sc = StabChain { degree, levels: Vec::new() };
        for g in gens {
            let (r, j) = sc.sift(g, 0);
            if !is_id(&r) {
                sc.add(0, j, r);
            }
        }
        sc
    }

    pub fn order(&self) -> BigInt {
        self.levels.iter().fold(BigInt::one(), |acc, l| acc * BigInt::from(l.orbit.len()))
    }

    /// Orbit lengths along the base.
    pub fn orbit_lengths(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.orbit.len()).collect()
    }

    pub fn contains(&self, g: &Perm) -> bool {
        is_id(&self.sift(g, 0).0)
    }

    fn sift(&self, g: &Perm, from: usize) -> (Perm, usize) {
        let mut h = g.clone();
        for (j, lev) in self.levels.iter().enumerate().skip(from) {
            let b = h[lev.base as usize];
            match lev.reps.get(&b) {
                Some(u) => h = compose(&h, &invert(u)),
                None => return (h, j),
            }
        }
        let n = self.levels.len();
        (h, n)
    }

    /// Adds `g` (which fixes the base points before `j`) as a strong
    /// generator to levels `from..=j` and restores the orbit/Schreier
    /// closure at those levels.
    fn add(&mut self, from: usize, j: usize, g: Perm) {
        if j == self.levels.len() {
            let base = g.iter().enumerate().find(|(k, &x)| *k as u32 != x).map(|(k, _)| k as u32).expect("non-identity");
            let mut reps = HashMap::new();
            reps.insert(base, identity_perm(self.degree));
            self.levels.push(Level { base, gens: Vec::new(), reps, orbit: vec![base], done: vec![0] });
        }
        for k in from..=j {
            self.levels[k].gens.push(g.clone());
        }
        for k in (from..=j).rev() {
            self.close_level(k);
        }
    }

    fn close_level(&mut self, i: usize) {
        let mut pos = 0;
        while pos < self.levels[i].orbit.len() {
            while self.levels[i].done[pos] < self.levels[i].gens.len() {
                let s_idx = self.levels[i].done[pos];
                self.levels[i].done[pos] += 1;
                let beta = self.levels[i].orbit[pos];
                let s = self.levels[i].gens[s_idx].clone();
                let u = self.levels[i].reps[&beta].clone();
                let us = compose(&u, &s);
                let gamma = s[beta as usize];
                if let Some(ug) = self.levels[i].reps.get(&gamma) {
                    let h = compose(&us, &invert(ug));
                    let (r, j) = self.sift(&h, i + 1);
                    if !is_id(&r) {
                        self.add(i + 1, j, r);
                    }
                } else {
                    self.levels[i].reps.insert(gamma, us);
                    self.levels[i].orbit.push(gamma);
                    self.levels[i].done.push(0);
                }
            }
            pos += 1;
        }
    }
}

/// Square matrix over F2, rows as bit masks (bit `j` of row `i` is entry
/// `(i, j)`), acting on row vectors.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct F2Matrix {
    pub n: usize,
    pub rows: Vec<u64>,
}

impl F2Matrix {
    pub fn from_int(m: &IMat) -> Self {
        let n = m.len();
        let rows = m
            .iter()
            .map(|r| r.iter().enumerate().fold(0u64, |acc, (j, &x)| acc | (((x.rem_euclid(2)) as u64) << j)))
            .collect();
        F2Matrix { n, rows }
    }

    pub fn identity(n: usize) -> Self {
        F2Matrix { n, rows: (0..n).map(|i| 1u64 << i).collect() }
    }

    pub fn apply(&self, v: u64) -> u64 {
        let mut out = 0u64;
        for i in 0..self.n {
            if v >> i & 1 == 1 {
                out ^= self.rows[i];
            }
        }
        out
    }

    pub fn mul(&self, other: &F2Matrix) -> F2Matrix {
        F2Matrix { n: self.n, rows: self.rows.iter().map(|&r| other.apply(r)).collect() }
    }

    pub fn is_identity(&self) -> bool {
        *self == F2Matrix::identity(self.n)
    }

    /// Permutation of the nonzero vectors (point `v - 1` for vector `v`).
    pub fn to_perm(&self) -> Perm {
        let total = (1u64 << self.n) - 1;
        (1..=total).map(|v| (self.apply(v) - 1) as u32).collect()
    }

    pub fn order(&self) -> u64 {
        let mut x = self.clone();
        let mut k = 1;
        while !x.is_identity() {
            x = x.mul(self);
            k += 1;
        }
        k
    }

    /// Characteristic polynomial over F2 as a bit mask (bit `i` is the
    /// coefficient of `x^i`).
    pub fn charpoly(&self) -> u64 {
        charpoly_f2(self)
    }
}

/// Characteristic polynomial of an F2 matrix via reduction to upper
/// Hessenberg form and the standard recurrence.
fn charpoly_f2(m: &F2Matrix) -> u64 {
    let n = m.n;
    // dense copy, column-vector convention does not matter for charpoly
    let mut a: Vec<Vec<u8>> = (0..n).map(|i| (0..n).map(|j| (m.rows[i] >> j & 1) as u8).collect()).collect();
    for k in 0..n.saturating_sub(2) {
        // find pivot in column k below row k+1
        let Some(p) = (k + 1..n).find(|&i| a[i][k] == 1) else { continue };
        if p != k + 1 {
            a.swap(p, k + 1);
            for row in a.iter_mut() {
                row.swap(p, k + 1);
            }
        }
        for i in k + 2..n {
            if a[i][k] == 1 {
                // row_i += row_{k+1}; col_{k+1} += col_i
                for j in 0..n {
                    a[i][j] ^= a[k + 1][j];
                }
                for row in a.iter_mut() {
                    row[k + 1] ^= row[i];
                }
            }
        }
    }
    // p_0 = 1, p_{k+1} = x p_k - sum_{i<=k} a[i][k] (prod_{j=i+1..k} a[j][j-1]) p_i
    let mut p: Vec<u64> = vec![1];
    for k in 0..n {
        let mut next = (p[k] << 1) ^ if a[k][k] == 1 { p[k] } else { 0 };
        let mut prod = 1u8;
        for i in (0..k).rev() {
            prod &= a[i + 1][i];
            if prod == 0 {
                break;
            }
            if a[i][k] == 1 {
                next ^= p[i];
            }
        }
        p.push(next);
    }
    p[n]
}

/// Group generated by F2 matrices, with certified order from a stabilizer
/// chain on the nonzero vectors.
pub struct F2Group {
    pub n: usize,
    pub gens: Vec<F2Matrix>,
    chain: StabChain,
}

impl F2Group {
    pub fn new(n: usize, gens: Vec<F2Matrix>) -> Self {
        let perms: Vec<Perm> = gens.iter().map(F2Matrix::to_perm).collect();
        let chain = StabChain::new((1usize << n) - 1, &perms);
        F2Group { n, gens, chain }
    }

    pub fn order(&self) -> BigInt {
        self.chain.order()
    }

    pub fn contains(&self, m: &F2Matrix) -> bool {
        m.n == self.n && self.chain.contains(&m.to_perm())
    }

    /// Orbits on nonzero vectors.
    pub fn vector_orbits(&self) -> Vec<Vec<u64>> {
        let total = (1u64 << self.n) - 1;
        let mut seen = vec![false; total as usize + 1];
        let mut out = Vec::new();
        for v in 1..=total {
            if seen[v as usize] {
                continue;
            }
            seen[v as usize] = true;
            let mut orb = vec![v];
            let mut i = 0;
            while i < orb.len() {
                for g in &self.gens {
                    let w = g.apply(orb[i]);
                    if !seen[w as usize] {
                        seen[w as usize] = true;
                        orb.push(w);
                    }
                }
                i += 1;
            }
            out.push(orb);
        }
        out
    }

    /// Order of the permutation action on one orbit.
    pub fn action_order(&self, orbit: &[u64]) -> BigInt {
        let pos: HashMap<u64, u32> = orbit.iter().enumerate().map(|(i, &v)| (v, i as u32)).collect();
        let perms: Vec<Perm> = self.gens.iter().map(|g| orbit.iter().map(|&v| pos[&g.apply(v)]).collect()).collect();
        StabChain::new(orbit.len(), &perms).order()
    }

    /// If some orbit of size `k` carries a faithful action of order `k!`,
    /// the group is the full symmetric group on that orbit.
    pub fn symmetric_degree(&self) -> Option<usize> {
        let ord = self.order();
        for orb in self.vector_orbits() {
            let k = orb.len();
            if k > 20 {
                continue;
            }
            let fact: BigInt = (1..=k).fold(BigInt::one(), |a, i| a * BigInt::from(i));
            if fact == ord && self.action_order(&orb) == ord {
                return Some(k);
            }
        }
        None
    }

    /// Number of elements of each order, from the full closure; `None` if
    /// the group has more than `limit` elements.
    pub fn element_order_counts(&self, limit: usize) -> Option<BTreeMap<u64, u64>> {
        let id = F2Matrix::identity(self.n);
        let mut seen: HashSet<F2Matrix> = HashSet::from([id.clone()]);
        let mut queue = vec![id];
        while let Some(x) = queue.pop() {
            for g in &self.gens {
                let y = x.mul(g);
                if seen.insert(y.clone()) {
                    if seen.len() > limit {
                        return None;
                    }
                    queue.push(y);
                }
            }
        }
        let mut out = BTreeMap::new();
        for x in &seen {
            *out.entry(x.order()).or_insert(0) += 1;
        }
        Some(out)
    }

    /// Pseudo-random elements as products of generators (seeded).
    pub fn random_elements(&self, count: usize, seed: u64) -> Vec<F2Matrix> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut x = F2Matrix::identity(self.n);
        let mut out = Vec::with_capacity(count);
        for _ in 0..count {
            let len = rng.gen_range(1..20);
            for _ in 0..len {
                let g = &self.gens[rng.gen_range(0..self.gens.len())];
                x = x.mul(g);
            }
            out.push(x.clone());
        }
        out
    }
}

/// Number of elements of each order in the symmetric group of degree `k`,
/// summed over cycle types.
pub fn symmetric_order_counts(k: usize) -> BTreeMap<u64, u64> {
    fn rec(left: usize, max: usize, parts: &mut Vec<usize>, k: usize, out: &mut BTreeMap<u64, u64>) {
        if left == 0 {
            let mut mult: BTreeMap<usize, u32> = BTreeMap::new();
            for &p in parts.iter() {
                *mult.entry(p).or_insert(0) += 1;
            }
            let mut size = BigInt::one();
            for i in 1..=k {
                size *= i;
            }
            for (&p, &m) in &mult {
                for j in 1..=m {
                    size /= BigInt::from(p) * j;
                }
            }
            let ord = parts.iter().fold(1u64, |a, &p| num_integer::Integer::lcm(&a, &(p as u64)));
            let size: u64 = size.try_into().expect("fits");
            *out.entry(ord).or_insert(0) += size;
            return;
        }
        for p in (1..=max.min(left)).rev() {
            parts.push(p);
            rec(left - p, p, parts, k, out);
            parts.pop();
        }
    }
    let mut out = BTreeMap::new();
    rec(k, k, &mut Vec::new(), k, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_counts_small() {
        let s4 = symmetric_order_counts(4);
        assert_eq!(s4, BTreeMap::from([(1, 1), (2, 9), (3, 8), (4, 6)]));
        assert_eq!(symmetric_order_counts(5).values().sum::<u64>(), 120);
    }

    #[test]
    fn symmetric_group_orders() {
        // S5 on 5 points from a transposition and a 5-cycle
        let t: Perm = vec![1, 0, 2, 3, 4];
        let c: Perm = vec![1, 2, 3, 4, 0];
        assert_eq!(StabChain::new(5, &[t, c]).order(), BigInt::from(120));
        let t: Perm = vec![1, 0, 2, 3, 4, 5, 6, 7, 8];
        let c: Perm = vec![1, 2, 3, 4, 5, 6, 7, 8, 0];
        assert_eq!(StabChain::new(9, &[t, c]).order(), BigInt::from(362880));
    }

    #[test]
    fn permutation_matrices_mod_two() {
        // S7 permuting coordinates of F2^7
        let perm_mat = |p: &[usize]| {
            let n = p.len();
            let m: IMat = (0..n).map(|i| (0..n).map(|j| i64::from(p[i] == j)).collect()).collect();
            F2Matrix::from_int(&m)
        };
        let g = F2Group::new(7, vec![perm_mat(&[1, 0, 2, 3, 4, 5, 6]), perm_mat(&[1, 2, 3, 4, 5, 6, 0])]);
        assert_eq!(g.order(), BigInt::from(5040));
        assert_eq!(g.symmetric_degree(), Some(7));
        let c = perm_mat(&[1, 2, 3, 4, 5, 6, 0]);
        assert_eq!(c.order(), 7);
        // charpoly of the 7-cycle is x^7 + 1
        assert_eq!(c.charpoly(), (1 << 7) | 1);
    }
}
