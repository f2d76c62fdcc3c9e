//! Genus bookkeeping used by the case analyses: complements in a primitive
//! extension, candidate genera with prescribed local data, representatives
//! of definite genera and equivariant gluing over a prime.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::genus::{genus_symbol, valuation, Constituent, GenusSymbol, JordanSymbol};
use crate::kneser::enumerate_definite_genus;
use crate::lattice::{overlattice_from_glue, Lattice};
use crate::matrix::{self, IMat, QVec};
use crate::vectors::has_roots;

fn delta(p: u64) -> i8 {
    if p % 4 == 3 {
        -1
    } else {
        1
    }
}

fn render(sig: (usize, usize), locals: &[(u64, Vec<Constituent>)]) -> String {
    let mut toks = Vec::new();
    for (p, cons) in locals {
        let mut cons: Vec<&Constituent> = cons.iter().filter(|c| c.scale_exp > 0 && c.rank > 0).collect();
        cons.sort();
        for c in cons {
            let q = BigInt::from(*p).pow(c.scale_exp);
            toks.push(if c.sign < 0 { format!("{q}^-{}", c.rank) } else { format!("{q}^{}", c.rank) });
        }
    }
    format!("II_({},{}){}", sig.0, sig.1, toks.join(" "))
}

/// Genus of `B` in a primitive extension `A ⊕ B ⊂ C`. At the primes in
/// `glued`, `C` must be `p`-unimodular and the discriminant groups of `A`
/// and `B` are glued completely; at every other prime `C ⊗ Z_p = A ⊕ B`.
pub fn complement_genus(c: &GenusSymbol, a: &GenusSymbol, glued: &[u64]) -> Result<GenusSymbol> {
    let (cp, cm) = c.signature;
    let (ap, am) = a.signature;
    if ap > cp || am > cm {
        return Err(Error::Dimension("complement signature would be negative".into()));
    }
    let sig = (cp - ap, cm - am);
    let mut primes: BTreeSet<u64> = c.local.iter().chain(&a.local).map(|s| s.p).collect();
    primes.extend(glued.iter().copied());
    let mut locals = Vec::new();
    let mut expected_units = Vec::new();
    for &p in &primes {
        let ls_c = c.local_at(p);
        let ls_a = a.local_at(p);
        if glued.contains(&p) {
            if ls_c.constituents.iter().any(|x| x.scale_exp > 0) {
                return Err(Error::InvalidArgument(format!("ambient is not unimodular at {p}")));
            }
            let d = delta(p);
            let cons = ls_a
                .constituents
                .iter()
                .filter(|x| x.scale_exp > 0)
                .map(|x| Constituent { sign: if x.rank % 2 == 1 { d * x.sign } else { x.sign }, ..*x })
                .collect();
            locals.push((p, cons));
        } else {
            let scales: BTreeSet<u32> =
                ls_c.constituents.iter().chain(&ls_a.constituents).map(|x| x.scale_exp).collect();
            let mut cons = Vec::new();
            for e in scales {
                let (nc, sc) = ls_c.constituent(e).map_or((0, 1), |x| (x.rank, x.sign));
                let (na, sa) = ls_a.constituent(e).map_or((0, 1), |x| (x.rank, x.sign));
                if na > nc {
                    return Err(Error::Validation(format!("no complement: scale {p}^{e} too large")));
                }
                let sign = sc * sa;
                if na == nc && sign != 1 {
                    return Err(Error::Validation(format!("no complement: sign at scale {p}^{e}")));
                }
                cons.push(Constituent { scale_exp: e, rank: nc - na, sign });
            }
            expected_units.push((p, cons.iter().find(|x| x.scale_exp == 0).copied()));
            locals.push((p, cons));
        }
    }
    let g: GenusSymbol = render(sig, &locals).parse()?;
    for (p, unit) in expected_units {
        let got = g.local_at(p).constituent(0).copied();
        let want = unit.filter(|u| u.rank > 0);
        if got != want {
            return Err(Error::Validation(format!("no complement: unimodular part at {p}")));
        }
    }
    g.check_consistency()?;
    Ok(g)
}

/// Non-unimodular constituent lists at `p` with determinant valuation `v`
/// and total rank at most `rank`, every sign choice included.
fn constituent_lists(p: u64, rank: usize, v: u32) -> Vec<Vec<Constituent>> {
    fn rec(p: u64, rank: usize, v: u32, min_e: u32, cur: &mut Vec<Constituent>, out: &mut Vec<Vec<Constituent>>) {
        if v == 0 {
            out.push(cur.clone());
            return;
        }
        for e in min_e..=v {
            for n in 1..=rank {
                if e as usize * n > v as usize {
                    break;
                }
                if p == 2 && n % 2 == 1 {
                    continue;
                }
                for sign in [1i8, -1] {
                    cur.push(Constituent { scale_exp: e, rank: n, sign });
                    rec(p, rank - n, v - e * n as u32, e + 1, cur, out);
                    cur.pop();
                }
            }
        }
    }
    let mut out = Vec::new();
    rec(p, rank, v, 1, &mut Vec::new(), &mut out);
    out
}

/// Every consistent genus of the given signature whose 2-adic symbol is
/// `two_adic` and whose `|det|` is `2^{v_2} p^k` with `k` in `p_vals`.
pub fn genera_with(sig: (usize, usize), two_adic: &JordanSymbol, p: u64, p_vals: &[u32]) -> Result<Vec<GenusSymbol>> {
    let rank = sig.0 + sig.1;
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for &v in p_vals {
        for cons in constituent_lists(p, rank, v) {
            let text = render(sig, &[(2, two_adic.constituents.clone()), (p, cons)]);
            let Ok(g) = text.parse::<GenusSymbol>() else { continue };
            if g.check_consistency().is_err() || g.local_at(2) != *two_adic {
                continue;
            }
            if seen.insert(g.to_string()) {
                out.push(g);
            }
        }
    }
    out.sort_by_key(|g| g.to_string());
    Ok(out)
}

/// Sublattice `{x : x·c_i ≡ 0 mod p}` for the functionals `c_i`.
fn kernel_sublattice(ambient: &Lattice, p: i64, funcs: &[Vec<i64>]) -> Result<Lattice> {
    let n = ambient.rank();
    let mut gens: Vec<Vec<BigInt>> = (0..n)
        .map(|i| (0..n).map(|j| BigInt::from(if i == j { p } else { 0 })).collect())
        .collect();
    let total = (p as u64).pow(n as u32);
    for code in 0..total {
        let mut x = vec![0i64; n];
        let mut c = code;
        for xi in x.iter_mut() {
            *xi = (c % p as u64) as i64;
            c /= p as u64;
        }
        if funcs.iter().all(|f| matrix::dot(f, &x).rem_euclid(p) == 0) {
            gens.push(x.into_iter().map(BigInt::from).collect());
        }
    }
    let basis = matrix::big_to_i64(&matrix::hnf_basis(&gens)).ok_or_else(|| Error::InvalidArgument("overflow".into()))?;
    ambient.sublattice_gram(&basis)
}

/// First sublattice of index `p^k` cut out by `k` functionals mod `p` (in
/// lexicographic order) that lies in `target`.
pub fn sublattice_in_genus(ambient: &Lattice, p: i64, k: usize, target: &GenusSymbol) -> Result<Option<Lattice>> {
    let n = ambient.rank();
    let vectors: Vec<Vec<i64>> = (1..(p as u64).pow(n as u32))
        .map(|mut c| {
            (0..n)
                .map(|_| {
                    let d = (c % p as u64) as i64;
                    c /= p as u64;
                    d
                })
                .collect()
        })
        .collect();
    let want_det = target.det.clone();
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        let funcs: Vec<Vec<i64>> = idx.iter().map(|&i| vectors[i].clone()).collect();
        let sub = kernel_sublattice(ambient, p, &funcs)?;
        if sub.determinant() == BigRational::from_integer(want_det.clone())
            && sub.is_even()
            && genus_symbol(&sub).ok().as_ref() == Some(target)
        {
            return Ok(Some(sub));
        }
        // next k-subset
        let mut i = k;
        loop {
            if i == 0 {
                return Ok(None);
            }
            i -= 1;
            if idx[i] < vectors.len() - k + i {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Number of classes in the genus of a definite lattice and whether every
/// class has a root.
pub fn classes_and_roots(l: &Lattice) -> Result<(usize, bool)> {
    let classes = enumerate_definite_genus(l)?;
    let mut all = true;
    for c in &classes {
        all &= has_roots(c)?;
    }
    Ok((classes.len(), all))
}

/// Elements of exact order `p` of the discriminant group, as rational
/// coordinates, optionally restricted to those fixed by `g`.
fn p_torsion(l: &Lattice, p: u64, g: Option<&IMat>) -> Result<Vec<QVec>> {
    let form = l.discriminant_form()?;
    let pq = BigRational::from_integer(BigInt::from(p));
    let mut out = Vec::new();
    for coeffs in form.elements() {
        if coeffs.iter().all(|c| c.is_zero()) {
            continue;
        }
        let x = form.element(&coeffs);
        if !x.iter().all(|c| (c * &pq).is_integer()) {
            continue;
        }
        if let Some(g) = g {
            let gx = matrix::qvec_mat(&x, &matrix::to_rat(g));
            if !gx.iter().zip(&x).all(|(a, b)| (a - b).is_integer()) {
                continue;
            }
        }
        out.push(x);
    }
    Ok(out)
}

/// Genera of the overlattices of `A ⊕ B` of index `index` (1 or the prime
/// `p`) that are equivariant for `g ⊕ 1`: the glue is a cyclic group of
/// order `p` whose `A`-part is fixed by `g`.
pub fn equivariant_glue_genera(a: &Lattice, g: &IMat, b: &Lattice, p: u64, index: u64) -> Result<BTreeSet<String>> {
    let mut out = BTreeSet::new();
    if index == 1 {
        out.insert(genus_symbol(&a.direct_sum(b))?.to_string());
        return Ok(out);
    }
    if index != p {
        return Err(Error::Unsupported(format!("glue of index {index} over {p}")));
    }
    let fa = a.discriminant_form()?;
    let fb = b.discriminant_form()?;
    let xs = p_torsion(a, p, Some(g))?;
    let ys = p_torsion(b, p, None)?;
    for x in &xs {
        let qx = fa.q_value(x);
        for y in &ys {
            let s = &qx + fb.q_value(y);
            if !crate::lattice::mod2(&s).is_zero() {
                continue;
            }
            let over = overlattice_from_glue(a, b, &[(x.clone(), y.clone())])?;
            out.insert(genus_symbol(&over.lattice)?.to_string());
        }
    }
    Ok(out)
}

/// Needed glue index from `det A · det B = [C : A ⊕ B]^2 · det C`.
pub fn glue_index(det_a: &BigInt, det_b: &BigInt, det_c: &BigInt) -> Result<u64> {
    let num = (det_a * det_b).magnitude().clone();
    let den = det_c.magnitude().clone();
    if (&num % &den) != num_bigint::BigUint::zero() {
        return Err(Error::Validation("determinants are incompatible".into()));
    }
    let sq = &num / &den;
    let r = sq.sqrt();
    if &r * &r != sq {
        return Err(Error::Validation("index is not an integer".into()));
    }
    r.to_u64().ok_or_else(|| Error::InvalidArgument("index too large".into()))
}

/// Whether some completely even 2-adic symbol `B` has `A ⊕ B = C`.
pub fn is_two_adic_summand(a: &JordanSymbol, c: &JordanSymbol) -> bool {
    let scales: BTreeSet<u32> = a.constituents.iter().chain(&c.constituents).map(|x| x.scale_exp).collect();
    scales.into_iter().all(|e| {
        let (nc, sc) = c.constituent(e).map_or((0, 1), |x| (x.rank, x.sign));
        let (na, sa) = a.constituent(e).map_or((0, 1), |x| (x.rank, x.sign));
        nc >= na && (nc - na) % 2 == 0 && (nc > na || sc == sa)
    })
}

/// 2-adic symbols allowed for a rank-`n` lattice with an isometry of
/// minimal polynomial Φ3 and scales at most `2^max_scale`: even ranks `n_i`
/// and signs `(-1)^{n_i/2}`.
pub fn phi3_two_adic_symbols(n: usize, max_scale: u32) -> Vec<JordanSymbol> {
    fn rec(e: u32, max: u32, left: usize, cur: &mut Vec<Constituent>, out: &mut Vec<JordanSymbol>) {
        if e > max {
            if left == 0 {
                out.push(JordanSymbol::new(2, cur.clone()));
            }
            return;
        }
        for r in (0..=left).step_by(2) {
            let sign = if (r / 2) % 2 == 0 { 1 } else { -1 };
            cur.push(Constituent { scale_exp: e, rank: r, sign });
            rec(e + 1, max, left - r, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n % 2 == 0 {
        rec(0, max_scale, n, &mut Vec::new(), &mut out);
    }
    out.sort_by_key(|s| std::cmp::Reverse(s.rank_at(0)));
    out
}

/// `p`-part of the discriminant group as invariant factors.
pub fn discriminant_p_part(l: &Lattice, p: u64) -> Result<Vec<BigInt>> {
    let form = l.discriminant_form()?;
    let mut out = Vec::new();
    for d in &form.orders {
        let v = valuation(d, p);
        if v > 0 {
            out.push(BigInt::from(p).pow(v));
        }
    }
    Ok(out)
}


/// Order of the action of `g` on the `p`-part of the discriminant group.
pub fn order_on_p_part(l: &Lattice, g: &IMat, p: u64) -> Result<u64> {
    let form = l.discriminant_form()?;
    let pv = BigRational::from_integer(BigInt::from(p).pow(valuation(&l.determinant().to_integer(), p)));
    let xs: Vec<QVec> = form
        .elements()
        .iter()
        .map(|c| form.element(c))
        .filter(|x| x.iter().all(|c| (c * &pv).is_integer()))
        .collect();
    let gq = matrix::to_rat(g);
    let mut cur: Vec<QVec> = xs.clone();
    for k in 1..=1000u64 {
        cur = cur.iter().map(|x| matrix::qvec_mat(x, &gq)).collect();
        if cur.iter().zip(&xs).all(|(a, b)| a.iter().zip(b).all(|(s, t)| (s - t).is_integer())) {
            return Ok(k);
        }
    }
    Err(Error::Validation("action on the discriminant group has order above 1000".into()))
}

/// Shortest vectors of `L^∨` whose class in `L^∨/L` has order exactly `m`,
/// for a definite `L`: their norm, their number and the rank of their span.
/// The set is preserved by `O(L)`, so an isometry without eigenvalues of
/// small degree cannot exist when the span has the wrong dimension.
pub fn shortest_in_order_classes(l: &Lattice, m: u64) -> Result<Option<(BigRational, usize, usize)>> {
    let pos = if l.is_negative_definite() { l.rescale_int(-1)? } else { l.clone() };
    let g = pos.int_gram()?;
    let ginv = matrix::inverse_rat(&matrix::to_rat(&g)).ok_or(Error::Degenerate)?;
    let d = pos.determinant().to_integer();
    let dq = BigRational::from_integer(d.clone());
    let scaled: IMat = ginv
        .iter()
        .map(|r| r.iter().map(|x| (x * &dq).to_integer().to_i64().expect("small")).collect())
        .collect();
    let d64 = d.to_i64().ok_or_else(|| Error::InvalidArgument("determinant too large".into()))?;
    let mq = BigInt::from(m);
    let mut bound = d64;
    for _ in 0..12 {
        for (norm, vs) in crate::vectors::vectors_up_to(&scaled, bound)? {
            let hits: Vec<QVec> = vs
                .iter()
                .map(|c| matrix::qvec_mat(&matrix::ivec_to_q(c), &ginv))
                .filter(|x| {
                    let den = x.iter().fold(BigInt::from(1), |a, c| num_integer::Integer::lcm(&a, c.denom()));
                    den == mq
                })
                .collect();
            if !hits.is_empty() {
                let rank = crate::lattice::rational_row_basis(&hits).len();
                return Ok(Some((BigRational::new(BigInt::from(norm), d.clone()), hits.len(), rank)));
            }
        }
        bound *= 2;
    }
    Ok(None)
}
