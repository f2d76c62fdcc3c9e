//! Condition (i) of the lift criterion, decided modulo 2.
//!
//! `S_X` is an overlattice of `S_Y(2) ⊕ Q` with glue `H` inside the
//! 2-parts of the discriminant groups. Identifying the 2-part of
//! `S_Y(2)^v / S_Y(2)` with `S_Y / 2S_Y` and that of `Q^v / Q` with
//! `Q / 2Q` (valid when `Q = K(-2)` with `det K` odd), `H` is the graph of
//! an isomorphism `phi: H_S -> Q/2Q`. Then `g ⊕ h` preserves `S_X` iff
//! `g` preserves `H_S` and `h = phi g phi^{-1}` mod 2, and it acts
//! trivially on the 2-part of `S_X^v / S_X` iff `g` fixes `H_S^⊥`
//! pointwise. On the odd part every `h` in `O(K) = W(K) x {±1}` acts as
//! `±1`, and `-h` has the same reduction, so the sign can always be
//! matched.

use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::matrix::{self, IMat};
use crate::permgroup::{F2Group, F2Matrix};

fn bits(v: &[i64]) -> u64 {
    v.iter().enumerate().fold(0u64, |acc, (i, &x)| acc | ((x.rem_euclid(2) as u64) << i))
}

#[derive(Clone, Debug)]
struct Pivoted {
    /// Basis vectors with pairwise distinct pivots (lowest set bit), each
    /// pivot cleared in all other vectors.
    rows: Vec<u64>,
    /// A second coordinate carried along with the row operations.
    tags: Vec<u64>,
}

impl Pivoted {
    fn new() -> Self {
        Pivoted { rows: Vec::new(), tags: Vec::new() }
    }

    /// Adds `(u, t)`; returns the reduced pair when `u` is in the span.
    fn insert(&mut self, u: u64, t: u64) -> Option<u64> {
        let (mut u, mut t) = (u, t);
        for (&r, &s) in self.rows.iter().zip(&self.tags) {
            if u >> r.trailing_zeros() & 1 == 1 {
                u ^= r;
                t ^= s;
            }
        }
        if u == 0 {
            return Some(t);
        }
        let low = u.trailing_zeros();
        for (r, s) in self.rows.iter_mut().zip(self.tags.iter_mut()) {
            if *r >> low & 1 == 1 {
                *r ^= u;
                *s ^= t;
            }
        }
        self.rows.push(u);
        self.tags.push(t);
        None
    }

    /// Tag of `u` (linear extension), or `None` if `u` is outside the span.
    fn tag_of(&self, u: u64) -> Option<u64> {
        let (mut u, mut t) = (u, 0u64);
        for (&r, &s) in self.rows.iter().zip(&self.tags) {
            if u >> r.trailing_zeros() & 1 == 1 {
                u ^= r;
                t ^= s;
            }
        }
        (u == 0).then_some(t)
    }
}

/// Mod-2 glue data of `S_X ⊃ S_Y(2) ⊕ Q`.
pub struct LiftData {
    n_q: usize,
    /// `H_S` with `phi` as tags.
    graph: Pivoted,
    /// `Q/2Q` with `phi^{-1}` as tags.
    inverse: Pivoted,
    /// Basis of the orthogonal complement of `H_S` in `S_Y / 2S_Y`.
    perp: Vec<u64>,
    /// Image of `O(Q)` in `GL(Q/2Q)`.
    oq_mod2: F2Group,
}

impl LiftData {
    /// `sy`: Gram of `S_Y`; `sy2_in_sx`, `q_in_sx`: bases in `S_X`
    /// coordinates; `oq_gens`: generators of `O(Q)` in the `q_in_sx` basis.
    pub fn new(sy: &IMat, sy2_in_sx: &IMat, q_in_sx: &IMat, oq_gens: &[IMat]) -> Result<Self> {
        let n_s = sy2_in_sx.len();
        let n_q = q_in_sx.len();
        let mut m = sy2_in_sx.clone();
        m.extend(q_in_sx.iter().cloned());
        let minv = matrix::inverse_rat(&matrix::to_rat(&m)).ok_or(Error::Degenerate)?;
        let two = matrix::rat_int(2);
        let mut graph = Pivoted::new();
        for row in &minv {
            let doubled: Vec<BigRational> = row.iter().map(|x| x * &two).collect();
            if doubled.iter().any(|x| !x.is_integer()) {
                return Err(Error::Validation("S_X / (S_Y(2) ⊕ Q) is not 2-elementary".into()));
            }
            let iv: Vec<i64> = doubled.iter().map(|x| x.to_integer().to_i64().unwrap()).collect();
            if let Some(t) = graph.insert(bits(&iv[..n_s]), bits(&iv[n_s..])) {
                if t != 0 {
                    return Err(Error::Validation("Q is not primitive in S_X".into()));
                }
            }
        }
        if graph.rows.len() != n_q {
            return Err(Error::Validation(format!(
                "glue over 2 has rank {} but Q has rank {n_q}",
                graph.rows.len()
            )));
        }
        let mut inverse = Pivoted::new();
        for (&u, &t) in graph.rows.iter().zip(&graph.tags) {
            if inverse.insert(t, u).is_some() {
                return Err(Error::Validation("glue map to Q/2Q is not injective".into()));
            }
        }
        let bmat: Vec<u64> = sy.iter().map(|r| bits(r)).collect();
        let bil = |u: u64, v: u64| -> u32 {
            let mut s = 0;
            for (i, row) in bmat.iter().enumerate() {
                if u >> i & 1 == 1 {
                    s += (row & v).count_ones();
                }
            }
            s % 2
        };
        let mut perp_span = Pivoted::new();
        for v in 1u64..(1 << n_s) {
            if graph.rows.iter().all(|&u| bil(u, v) == 0) {
                perp_span.insert(v, 0);
            }
        }
        let perp = perp_span.rows;
        if perp.len() + n_q != n_s {
            return Err(Error::Validation("S_Y/2S_Y form is degenerate".into()));
        }
        let gens: Vec<F2Matrix> = oq_gens.iter().map(F2Matrix::from_int).collect();
        let oq_mod2 = F2Group::new(n_q, gens);
        Ok(LiftData { n_q, graph, inverse, perp, oq_mod2 })
    }

    pub fn oq_mod2(&self) -> &F2Group {
        &self.oq_mod2
    }

    /// The forced reduction `phi g phi^{-1}` of `h`, if `g` preserves `H_S`
    /// and fixes `H_S^⊥`.
    pub fn required_h(&self, g: &F2Matrix) -> Option<F2Matrix> {
        for &u in &self.perp {
            if g.apply(u) != u {
                return None;
            }
        }
        let mut rows = Vec::with_capacity(self.n_q);
        for k in 0..self.n_q {
            let s = self.inverse.tag_of(1 << k).expect("phi is onto");
            let t = self.graph.tag_of(g.apply(s))?;
            rows.push(t);
        }
        Some(F2Matrix { n: self.n_q, rows })
    }

    /// Condition (i) for `g` given by its reduction mod 2.
    pub fn satisfies(&self, g: &F2Matrix) -> bool {
        self.required_h(g).is_some_and(|h| self.oq_mod2.contains(&h))
    }
}
