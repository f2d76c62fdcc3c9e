use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};

use super::genera::{complement_genus, is_two_adic_summand, phi3_two_adic_symbols};
use super::{det_of, factored, join, n_lattice, phi_product, res, sym, Trace, VerificationReport};
use crate::cyclo::{cyclotomic, euler_phi, product_of, small_cyclotomic_indices, F2Poly};
use crate::error::Result;
use crate::genus::{genus_symbol, valuation};
use crate::isom::isometry_test;
use crate::lattice::standard;
use crate::phi::{enumerate_phi_lattices, principal_phi_lattice, PhiClass, PhiConstraints};
use crate::vectors::{has_roots, roots};

fn f2_gcd(a: F2Poly, b: F2Poly) -> F2Poly {
    if b.0 == 0 {
        a
    } else {
        f2_gcd(b, a.divrem(b).1)
    }
}

/// Multisets of indices from `idx` (ascending) with total degree `degree`.
pub(crate) fn multisets(idx: &[u64], degree: u64) -> Vec<Vec<u64>> {
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
    let mut out = Vec::new();
    rec(idx, 0, degree, &mut Vec::new(), &mut out);
    out
}

/// Cyclotomic indices of `g^k` when `g` has the given indices.
pub(crate) fn power_indices(ms: &[u64], k: u64) -> Vec<u64> {
    let mut out = Vec::new();
    for &m in ms {
        let m2 = m / m.gcd(&k);
        for _ in 0..euler_phi(m) / euler_phi(m2) {
            out.push(m2);
        }
    }
    out.sort();
    out
}

fn f2_divides(d: F2Poly, p: F2Poly) -> bool {
    p.divrem(d).1 .0 == 0
}

fn describe(classes: &[PhiClass], e8m2: &crate::lattice::Lattice) -> Result<String> {
    let mut out = Vec::new();
    for c in classes {
        let l = &c.phi.lattice;
        if l.is_definite() && isometry_test(l, e8m2)?.is_some() {
            out.push("E8(-2)".to_string());
        } else {
            out.push(c.genus.to_string());
        }
    }
    Ok(join(out))
}

pub fn verify_f15_exclusion() -> Result<VerificationReport> {
    let mut t = Trace::new(
        "f15",
        "F15 never divides the mod-2 reduction of the characteristic polynomial of an automorphism",
    );
    let f15 = cyclotomic(15)?.mod2();
    let f1 = cyclotomic(1)?.mod2();
    let target = f15.mul(f1.pow(2));

    t.case("reduction to the cyclotomic part");
    t.check("Φ15 mod 2", f15, "x^8 + x^7 + x^5 + x^4 + x^3 + x + 1");
    t.external(
        "p_N is a product of cyclotomic polynomials of degree at most 8, and F15 | p_f mod 2 gives p_M mod 2 = F15 F1^2 dividing p_N mod 2",
        "[hor] Lemmas 2.1, 2.5 and Remark 2.4",
    );
    let small = small_cyclotomic_indices(8);
    let hits: Vec<u64> = small
        .iter()
        .copied()
        .filter(|&m| f2_gcd(cyclotomic(m as i64).unwrap().mod2(), f15).degree() > 0)
        .collect();
    t.check("indices m with φ(m) ≤ 8 and gcd(Φm mod 2, F15) ≠ 1", join(&hits), "15, 30");
    let cands: Vec<Vec<u64>> = multisets(&[1, 3, 5, 15], 12)
        .into_iter()
        .filter(|ms| ms.contains(&15) && f2_divides(target, product_of(ms).mod2()))
        .collect();
    let shown: Vec<String> = cands.iter().map(|ms| phi_product(ms)).collect();
    t.check("p_N over Φ1, Φ3, Φ5, Φ15 with F15 F1^2 | p_N mod 2", shown.join("; "), "Φ15 Φ1^4; Φ15 Φ3 Φ1^2");
    t.check("res(Φ15, Φ1)", res(&[15], &[1]), 1);
    t.check("res(Φ15, Φ3)", res(&[15], &[3]), 25);
    let sigs: Vec<String> =
        (0..=4).map(|k| (2 * k, 8 - 2 * k)).filter(|&(p, m)| p <= 2 && m <= 10).map(|(p, m)| format!("({p},{m})")).collect();
    t.check("signatures (2k, 8-2k) of N15 inside signature (2,10)", join(&sigs), "(0,8), (2,6)");
    let glued: Vec<String> = cands
        .iter()
        .filter(|ms| {
            let rest: Vec<u64> = ms.iter().copied().filter(|&m| m != 15).collect();
            res(&[15], &rest) > BigInt::one()
        })
        .map(|ms| phi_product(ms))
        .collect();
    t.check("p_N admitting nontrivial glue", join(glued), "Φ15 Φ3 Φ1^2");

    let n = n_lattice();
    let n_genus = genus_symbol(&n)?;
    let e8m2 = standard::scaled(&standard::e(8), -2);
    let both = vec![(0, 8), (2, 6)];

    t.case("trivial glue");
    // n2(N15) + n2(N15^perp) = 10 with n2(N15^perp) <= 4
    let window = (10 - 4, 8);
    t.check("range of the rank of the 2-modular constituent of N15", format!("{}..{}", window.0, window.1), "6..8");
    let classes = enumerate_phi_lattices(
        15,
        &PhiConstraints { det_divisor: BigInt::from(1024), signatures: both.clone(), n2_window: Some(window) },
    )?;
    t.check("Φ15-lattices in that range", describe(&classes, &e8m2)?, "E8(-2)");
    let g15 = genus_symbol(&e8m2)?;
    t.check("genus of E8(-2)", &g15, "II_(0,8)2^8");
    let perp = complement_genus(&n_genus, &g15, &[])?;
    t.check("genus of N15^perp", &perp, "II_(2,2)2^2");
    let uu2 = standard::hyperbolic_plane().direct_sum(&standard::scaled(&standard::hyperbolic_plane(), 2));
    t.check("genus of U ⊕ U(2)", genus_symbol(&uu2)?, "II_(2,2)2^2");
    t.external("II_(2,2)2^2 consists of the single class U ⊕ U(2)", "Conway-Sloane, Thm 15.19");
    t.external("with N15 ≅ E8(-2) and N15^perp ≅ U ⊕ U(2) the spectral radius of f_M is one", "[oguiso-yu] Lemma 7.7");
    let pm: BTreeSet<String> = multisets(&small, 10)
        .into_iter()
        .filter(|ms| (ms.contains(&15) || ms.contains(&30)) && product_of(ms).mod2() == target)
        .map(|ms| phi_product(&power_indices(&ms, 4)))
        .collect();
    t.check("p_M of the fourth power, over all cyclotomic p_M with p_M mod 2 = F15 F1^2", join(pm), "Φ15 Φ1^2");
    let m_lattice = standard::scaled(&standard::hyperbolic_plane(), 2).direct_sum(&e8m2);
    let m15 = enumerate_phi_lattices(
        15,
        &PhiConstraints { det_divisor: BigInt::from(1024), signatures: vec![(0, 8)], n2_window: Some((8, 8)) },
    )?;
    // M = M1 ⊕ M15 with M 2-elementary of n2 = 10 and M1 of rank 2
    t.check("negative definite Φ15-lattices M15 with n2 = 8", describe(&m15, &e8m2)?, "E8(-2)");
    let m1 = complement_genus(&genus_symbol(&m_lattice)?, &g15, &[])?;
    t.check("genus of M1", &m1, "II_(1,1)2^2");
    t.check("res(Φ15, Φ3 Φ1)", res(&[15], &[3, 1]), 25);
    let d = det_of(&e8m2) * det_of(&e8m2);
    t.check("det(M15 ⊕ N15)", factored(&d), "2^16");
    t.check("det H15 = gcd(det(M15 ⊕ N15), res(Φ15, Φ3 Φ1))", d.gcd(&res(&[15], &[3, 1])), 1);
    let e8 = standard::e(8).rescale_int(-1)?;
    let rank16 = [("E8(-1)^2", e8.direct_sum(&e8)), ("Γ16(-1)", standard::gamma16().rescale_int(-1)?)];
    // theta series of an even unimodular rank-16 lattice is the weight-8
    // Eisenstein series 1 + 480 Σ σ7(n) q^n
    let eisenstein_q1 = 480;
    for (name, l) in &rank16 {
        t.check(format!("genus of {name}"), genus_symbol(l)?, "II_(0,16)");
        t.check(format!("{name} has roots"), has_roots(l)?, true);
        // short_vectors lists one vector of each pair ±v
        t.check(format!("roots of {name} against the weight-8 Eisenstein coefficient"), 2 * roots(l)?.len(), eisenstein_q1);
    }
    t.external(
        "a root in NS(X) is effective up to sign and its f-orbit sums to zero, contradicting ampleness",
        "Riemann-Roch; [mcmullen16] §2",
    );

    t.case("nontrivial glue");
    let det0 = det_of(&principal_phi_lattice(15)?.lattice);
    t.check("det of the principal Φ15-lattice", &det0, 1);
    // det N15 = det L0 · N(a)^2, and N is 5-unimodular, so v5|G| = v5 det N15
    let g_orders: Vec<u64> = [5u64, 25].into_iter().filter(|g| valuation(&BigInt::from(*g), 5) % 2 == 0).collect();
    t.check("|G| among 5, 25 with det N15 a square times det L0", join(&g_orders), "25");
    let prod = det_of(&n).abs() * BigInt::from(25 * 25);
    t.check("det N15 · det N15^perp", factored(&prod), "2^10 · 5^4");
    let classes = enumerate_phi_lattices(
        15,
        &PhiConstraints { det_divisor: BigInt::from(1024 * 25), signatures: both, n2_window: Some(window) },
    )?;
    // no glue over 2, so the window of the trivial case applies again
    let hits: Vec<_> = classes.iter().filter(|c| valuation(&det_of(&c.phi.lattice), 5) == 2).collect();
    let dets: BTreeSet<String> = hits.iter().map(|c| factored(&det_of(&c.phi.lattice))).collect();
    let genera: BTreeSet<String> = hits.iter().map(|c| c.genus.to_string()).collect();
    t.check("det N15", join(dets), "2^8 · 5^2");
    t.check("genera of Φ15-lattices with that determinant", join(&genera), "II_(2,6)2^8 5^-2");
    let g15 = sym("II_(2,6)2^8 5^-2")?;
    let perp = complement_genus(&n_genus, &g15, &[5])?;
    t.check("genus of N15^perp", &perp, "II_(0,4)2^2 5^-2");
    t.check("res(Φ3, Φ1)", res(&[3], &[1]), 3);
    let perp2 = perp.local_at(2);
    t.check("2-adic symbol of N15^perp", &perp2, "1^2 2^2");
    let max_scale = perp2.constituents.iter().map(|c| c.scale_exp).max().unwrap_or(0);
    let n3 = phi3_two_adic_symbols(2, max_scale);
    t.check("2-adic symbols of N3 up to that scale", join(&n3), "1^-2, 2^-2");
    let fits: Vec<String> = n3.iter().filter(|s| is_two_adic_summand(s, &perp2)).map(|s| s.to_string()).collect();
    t.check("N3 symbols that are summands of N15^perp ⊗ Z_2", join(fits), "none");
    Ok(t.finish())
}
