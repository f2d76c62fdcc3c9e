//! Induced chambers, the lift test between chambers and the breadth-first
//! search over chambers inside the nef cone.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use super::walls::pair;
use super::EnriquesSetup;
use crate::error::{Error, Result};
use crate::isom;
use crate::matrix::{self, IMat, QMat};
use crate::permgroup::{F2Group, F2Matrix};
use crate::vectors::separating_roots;

/// The induced chamber `D0^tau`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Chamber {
    pub tau: IMat,
    /// Wall vectors `r` (the chamber lies in `<x, r> >= 0`), sorted.
    pub walls: Vec<Vec<i64>>,
    /// `alpha^tau`.
    pub interior_point: Vec<i64>,
}

/// An orbit of walls under the stabilizer of a chamber.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WallOrbit {
    pub representative: Vec<i64>,
    pub size: usize,
    pub outer: bool,
}

/// Output of the chamber search.
#[derive(Clone, Debug, Serialize)]
pub struct BorcherdsRun {
    /// Representatives of the equivalence classes of chambers in `N_Y`.
    pub reps: Vec<Chamber>,
    /// Generators of `aut_s(Y)` in the order they were found.
    pub gens: Vec<IMat>,
    /// `aut_s(Y, D)` for each representative.
    pub stabilizers: Vec<Vec<IMat>>,
    /// Wall orbits of each representative, by representative wall.
    pub orbits: Vec<Vec<WallOrbit>>,
}

impl BorcherdsRun {
    /// `(|aut_s(Y, D)|, outer walls, inner walls)` for each representative.
    pub fn chamber_profiles(&self) -> Vec<(usize, usize, usize)> {
        self.stabilizers
            .iter()
            .zip(&self.orbits)
            .map(|(s, o)| {
                let outer = o.iter().filter(|w| w.outer).map(|w| w.size).sum();
                let inner = o.iter().filter(|w| !w.outer).map(|w| w.size).sum();
                (s.len(), outer, inner)
            })
            .collect()
    }
}

fn chamber_from_tau(setup: &EnriquesSetup, tau: IMat) -> Chamber {
    let mut walls: Vec<Vec<i64>> = setup.walls0.iter().map(|v| matrix::vec_mat(v, &tau)).collect();
    walls.sort();
    let interior_point = matrix::vec_mat(&setup.alpha, &tau);
    Chamber { tau, walls, interior_point }
}

pub fn initial_chamber(setup: &EnriquesSetup) -> Chamber {
    chamber_from_tau(setup, matrix::identity(setup.frame.sy.len()))
}

/// `x -> x + <x, r> r` as a matrix.
fn reflection(g: &IMat, r: &[i64]) -> IMat {
    let gr = matrix::vec_mat(r, g);
    let n = r.len();
    (0..n).map(|i| (0..n).map(|j| i64::from(i == j) + gr[i] * r[j]).collect()).collect()
}

/// The chamber on the other side of the wall `r` of `d`.
pub fn adjacent_chamber(setup: &EnriquesSetup, d: &Chamber, r: &[i64]) -> Result<Chamber> {
    if d.walls.binary_search_by(|w| w.as_slice().cmp(r)).is_err() {
        return Err(Error::InvalidArgument("vector does not define a wall of the chamber".into()));
    }
    let s = reflection(&setup.frame.sy, r);
    Ok(chamber_from_tau(setup, matrix::mat_mul(&d.tau, &s)))
}

/// Whether `D ⊂ N_Y`: no (-2)-vector of `S_X` separates `pi^* alpha` from
/// `pi^*(alpha^tau)`.
pub fn is_in_nef_cone(setup: &EnriquesSetup, d: &Chamber) -> Result<bool> {
    let a = setup.pull(&setup.alpha);
    let b = setup.pull(&d.interior_point);
    if a == b {
        return Ok(true);
    }
    Ok(separating_roots(&setup.sx_lattice(), &a, &b)?.is_empty())
}

/// Whether `alpha` and `alpha^g` lie in the same chamber of `S_X`.
pub fn preserves_nef_cone(setup: &EnriquesSetup, g: &IMat) -> Result<bool> {
    let a = setup.pull(&setup.alpha);
    let b = setup.pull(&matrix::vec_mat(&setup.alpha, g));
    if a == b {
        return Ok(true);
    }
    Ok(separating_roots(&setup.sx_lattice(), &a, &b)?.is_empty())
}

fn inverse(setup: &EnriquesSetup, tau: &IMat) -> IMat {
    // tau G tau^T = G gives tau^{-1} = G tau^T G^{-1}
    isom::mat_inverse_int(tau).unwrap_or_else(|| panic!("chamber map of {} is not unimodular", setup.name))
}

/// Elements of `Isom(D, D') = tau_D^{-1} O(S_Y, D0) tau_D'` that satisfy
/// condition (i), for chambers already known to lie in `N_Y`.
pub(crate) fn lifts_between(setup: &EnriquesSetup, d: &Chamber, d2: &Chamber, first_only: bool) -> Vec<IMat> {
    let tinv = inverse(setup, &d.tau);
    let t2 = F2Matrix::from_int(&d2.tau);
    let tinv2 = F2Matrix::from_int(&tinv);
    let mut out = Vec::new();
    for o in &setup.o_sy_d0 {
        let m = tinv2.mul(&F2Matrix::from_int(o)).mul(&t2);
        if setup.lift.satisfies(&m) {
            out.push(matrix::mat_mul(&matrix::mat_mul(&tinv, o), &d2.tau));
            if first_only {
                break;
            }
        }
    }
    out.sort();
    out
}

/// `{ g in aut_s(Y) : D' = D^g }`.
pub fn semisymplectic_lifts(setup: &EnriquesSetup, d: &Chamber, d2: &Chamber) -> Result<Vec<IMat>> {
    for c in [d, d2] {
        if !is_in_nef_cone(setup, c)? {
            return Err(Error::InvalidArgument("chamber is not contained in the nef cone".into()));
        }
    }
    Ok(lifts_between(setup, d, d2, false))
}

fn wall_orbits(d: &Chamber, group: &[IMat]) -> Vec<Vec<usize>> {
    let k = d.walls.len();
    let mut seen = vec![false; k];
    let mut out = Vec::new();
    for start in 0..k {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut orb = vec![start];
        let mut i = 0;
        while i < orb.len() {
            for g in group {
                let img = matrix::vec_mat(&d.walls[orb[i]], g);
                let j = d.walls.binary_search(&img).expect("stabilizer permutes the walls");
                if !seen[j] {
                    seen[j] = true;
                    orb.push(j);
                }
            }
            i += 1;
        }
        orb.sort();
        out.push(orb);
    }
    out
}

/// Orbits of the walls of `D` under `aut_s(Y, D)`, each marked outer when
/// the adjacent chamber leaves `N_Y`.
pub fn wall_orbit_report(setup: &EnriquesSetup, d: &Chamber) -> Result<Vec<WallOrbit>> {
    let stab = semisymplectic_lifts(setup, d, d)?;
    orbit_table(setup, d, &stab)
}

fn orbit_table(setup: &EnriquesSetup, d: &Chamber, stab: &[IMat]) -> Result<Vec<WallOrbit>> {
    let mut out = Vec::new();
    for orb in wall_orbits(d, stab) {
        let r = d.walls[orb[0]].clone();
        let next = adjacent_chamber(setup, d, &r)?;
        let outer = !is_in_nef_cone(setup, &next)?;
        out.push(WallOrbit { representative: r, size: orb.len(), outer });
    }
    Ok(out)
}

/// Breadth-first search over chambers in `N_Y` up to `aut_s(Y)`: returns
/// representatives and generators. Fails once more than `budget`
/// representatives would be needed.
pub fn main_borcherds(setup: &EnriquesSetup, budget: usize) -> Result<BorcherdsRun> {
    let (run, status) = borcherds_search(setup, budget);
    status.map(|_| run)
}

/// Like [`main_borcherds`], but also returns the state reached when the
/// search stops early (budget exhausted or an error).
pub fn borcherds_search(setup: &EnriquesSetup, budget: usize) -> (BorcherdsRun, Result<()>) {
    let mut run = BorcherdsRun { reps: vec![initial_chamber(setup)], gens: Vec::new(), stabilizers: Vec::new(), orbits: Vec::new() };
    let status = search_into(setup, budget, &mut run);
    (run, status)
}

fn search_into(setup: &EnriquesSetup, budget: usize, run: &mut BorcherdsRun) -> Result<()> {
    let mut gen_set: HashSet<IMat> = HashSet::new();
    let id = matrix::identity(setup.frame.sy.len());
    let mut i = 0;
    while i < run.reps.len() {
        let d = run.reps[i].clone();
        let stab = lifts_between(setup, &d, &d, false);
        for g in &stab {
            if *g != id && gen_set.insert(g.clone()) {
                run.gens.push(g.clone());
            }
        }
        let mut table = Vec::new();
        for orb in wall_orbits(&d, &stab) {
            let r = d.walls[orb[0]].clone();
            let next = adjacent_chamber(setup, &d, &r)?;
            let outer = !is_in_nef_cone(setup, &next)?;
            table.push(WallOrbit { representative: r, size: orb.len(), outer });
            if outer {
                continue;
            }
            let mut known = false;
            for e in &run.reps {
                if let Some(g) = lifts_between(setup, e, &next, true).into_iter().next() {
                    if g != id && gen_set.insert(g.clone()) {
                        run.gens.push(g);
                    }
                    known = true;
                    break;
                }
            }
            if !known {
                if run.reps.len() >= budget {
                    return Err(Error::Budget(format!(
                        "{} representatives found, {} processed, {} generators",
                        run.reps.len(),
                        i,
                        run.gens.len()
                    )));
                }
                run.reps.push(next);
            }
        }
        run.stabilizers.push(stab);
        run.orbits.push(table);
        i += 1;
    }
    Ok(())
}

/// Order of the image of the group generated by `gens` in `O(S_Y / 2 S_Y)`.
pub fn mod2_image_order(gens: &[IMat], n: usize) -> BigInt {
    F2Group::new(n, gens.iter().map(F2Matrix::from_int).collect()).order()
}

/// Rank-increasing subset of rows, in order.
fn basis_indices(rows: &[Vec<i64>]) -> Vec<usize> {
    let mut echelon: QMat = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    let mut picked = Vec::new();
    for (idx, r) in rows.iter().enumerate() {
        let mut v = matrix::ivec_to_q(r);
        for (e, &p) in echelon.iter().zip(&pivots) {
            if !v[p].is_zero() {
                let f = &v[p] / &e[p];
                for (x, y) in v.iter_mut().zip(e) {
                    *x -= &f * y;
                }
            }
        }
        if let Some(p) = v.iter().position(|x| !x.is_zero()) {
            echelon.push(v);
            pivots.push(p);
            picked.push(idx);
        }
    }
    picked
}

/// All isometries of `S_Y` preserving the chamber cut out by `walls` (the
/// component containing `alpha`), identity first.
pub fn chamber_symmetries(g: &IMat, walls: &[Vec<i64>], alpha: &[i64]) -> Result<Vec<IMat>> {
    let k = walls.len();
    let n = g.len();
    let m: Vec<Vec<i64>> = walls.iter().map(|u| walls.iter().map(|v| pair(g, u, v)).collect()).collect();
    let profile: Vec<Vec<i64>> = m
        .iter()
        .map(|row| {
            let mut p = row.clone();
            p.sort();
            p
        })
        .collect();
    let basis = basis_indices(walls);
    if basis.len() != n {
        return Err(Error::Validation("walls do not span S_Y".into()));
    }
    let bmat: IMat = basis.iter().map(|&i| walls[i].clone()).collect();
    let binv = matrix::inverse_rat(&matrix::to_rat(&bmat)).ok_or(Error::Degenerate)?;
    let wall_set: HashSet<&Vec<i64>> = walls.iter().collect();
    let mut out: Vec<IMat> = Vec::new();
    let mut images: Vec<usize> = Vec::with_capacity(n);
    fn rec(
        level: usize,
        images: &mut Vec<usize>,
        basis: &[usize],
        m: &[Vec<i64>],
        profile: &[Vec<i64>],
        k: usize,
        leaf: &mut dyn FnMut(&[usize]),
    ) {
        if level == basis.len() {
            leaf(images);
            return;
        }
        let b = basis[level];
        for c in 0..k {
            if profile[c] != profile[b] || images.contains(&c) {
                continue;
            }
            if (0..level).any(|i| m[c][images[i]] != m[b][basis[i]]) {
                continue;
            }
            images.push(c);
            rec(level + 1, images, basis, m, profile, k, leaf);
            images.pop();
        }
    }
    let ga = matrix::vec_mat(alpha, g);
    let mut leaf = |imgs: &[usize]| {
        let target: IMat = imgs.iter().map(|&i| walls[i].clone()).collect();
        let t = matrix::qmat_mul(&binv, &matrix::to_rat(&target));
        if t.iter().flatten().any(|x| !x.is_integer()) {
            return;
        }
        let t: IMat = t.iter().map(|r| r.iter().map(|x| num_traits::ToPrimitive::to_i64(&x.to_integer()).unwrap()).collect()).collect();
        if matrix::dot(&ga, &matrix::vec_mat(alpha, &t)) <= 0 {
            return;
        }
        if walls.iter().all(|v| wall_set.contains(&matrix::vec_mat(v, &t))) && isom::preserves_gram(&t, g) {
            out.push(t);
        }
    };
    rec(0, &mut images, &basis, &m, &profile, k, &mut leaf);
    out.sort();
    let id = matrix::identity(n);
    let pos = out.iter().position(|x| *x == id).ok_or_else(|| Error::Validation("identity missing".into()))?;
    let idm = out.remove(pos);
    out.insert(0, idm);
    Ok(out)
}
