use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::Signed;

use super::f15::multisets;
use super::genera::{
    classes_and_roots, complement_genus, discriminant_p_part, equivariant_glue_genera, genera_with, glue_index,
    is_two_adic_summand, order_on_p_part, phi3_two_adic_symbols, shortest_in_order_classes,
};
use super::{
    definite_rep, det_of, factored, join, mod2_product, n_lattice, phi_product, rank4_rep, res, sym, BundledRun,
    Runs, Trace, VerificationReport,
};
use crate::cyclo::{cyclotomic, product_of, IntPoly};
use crate::error::Result;
use crate::genus::{genus_symbol, prime_factors, GenusSymbol, JordanSymbol};
use crate::isom::isometry_test;
use crate::kneser::enumerate_definite_genus;
use crate::lattice::{standard, Lattice};
use crate::permgroup::symmetric_order_counts;
use crate::phi::{enumerate_phi_lattices, principal_phi_lattice, twist, PhiConstraints, PhiLattice};

fn class_summary((n, roots): (usize, bool)) -> String {
    format!("{n} class{}, {}", if n == 1 { "" } else { "es" }, if roots { "roots" } else { "no roots in some class" })
}

/// Genus of the transcendental lattice, the complement of `S_X` in the K3
/// lattice.
pub(crate) fn transcendental_genus(run: &BundledRun) -> Result<GenusSymbol> {
    let sx = genus_symbol(&run.setup.sx_lattice())?;
    let mut primes = prime_factors(&sx.det);
    primes.sort();
    primes.dedup();
    complement_genus(&sym("II_(3,19)")?, &sx, &primes)
}

/// Order of the mod-2 image and its identification as a symmetric group:
/// either a faithful action on an orbit of size `k` with order `k!`, or
/// order `k!` with the element-order statistics of `S_k`.
pub(crate) fn image_summary(run: &BundledRun) -> String {
    let ord = run.image.order();
    if let Some(k) = run.image.symmetric_degree() {
        return format!("order {ord}, S{k}");
    }
    let mut fact = BigInt::from(1);
    for k in 1..=12usize {
        fact *= k;
        if fact == ord && run.image.element_order_counts(1 << 16) == Some(symmetric_order_counts(k)) {
            return format!("order {ord}, S{k}");
        }
    }
    format!("order {ord}")
}

fn a2(p3: &PhiLattice, n: i64) -> Result<PhiLattice> {
    twist(p3, &[n])
}

/// N1 genera among `options` for which some equivariant glue with `n3`
/// lands in `target`.
fn glue_survivors(n3: &PhiLattice, options: &[GenusSymbol], target: &GenusSymbol) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for g in options {
        let rep = rank4_rep(g)?;
        let Ok(index) = glue_index(&det_of(&n3.lattice), &det_of(&rep), &target.det) else { continue };
        if equivariant_glue_genera(&n3.lattice, &n3.isometry, &rep, 3, index)?.contains(&target.to_string()) {
            out.push(g.to_string());
        }
    }
    Ok(out)
}

/// `p(x + 1)`.
fn shift_by_one(p: &IntPoly) -> IntPoly {
    let y = IntPoly::from_i64(&[1, 1]);
    let mut acc: Vec<BigInt> = Vec::new();
    for c in p.0.iter().rev() {
        acc = IntPoly::new(acc).mul(&y).0;
        if acc.is_empty() {
            acc.push(BigInt::from(0));
        }
        acc[0] += c;
    }
    IntPoly::new(acc)
}

fn is_eisenstein_at(p: &IntPoly, q: i64) -> bool {
    let q = BigInt::from(q);
    let c = &p.0;
    let n = c.len() - 1;
    c[..n].iter().all(|a| (a % &q) == BigInt::from(0)) && (&c[0] % (&q * &q)) != BigInt::from(0) && (&c[n] % &q) != BigInt::from(0)
}

pub fn verify_f9_analysis() -> Result<VerificationReport> {
    verify_f9_analysis_with(&Runs::bundled()?)
}

pub fn verify_f9_analysis_with(runs: &Runs) -> Result<VerificationReport> {
    let mut t = Trace::new(
        "f9",
        "if F9 divides p_f mod 2 then F9 F3 F1^2 divides it, and the K3 cover has N1^perp ≅ A8(-2)",
    );
    let n_genus = genus_symbol(&n_lattice())?;
    let f9 = cyclotomic(9)?.mod2();
    let f1 = cyclotomic(1)?.mod2();

    t.case("characteristic polynomial of f_N");
    t.external("after passing to a power prime to 3, f_N has order 9 and F9 F1^2 divides p_N mod 2", "[hor] Remark 2.4");
    let want = f9.mul(f1.pow(2));
    let cands: Vec<String> = multisets(&[1, 3, 9], 12)
        .into_iter()
        .filter(|ms| ms.contains(&9) && product_of(ms).mod2().divrem(want).1 .0 == 0)
        .map(|ms| phi_product(&ms))
        .collect();
    t.check("p_N over Φ1, Φ3, Φ9 with F9 F1^2 | p_N mod 2", cands.join("; "), "Φ9 Φ1^6; Φ9 Φ3 Φ1^4; Φ9 Φ3^2 Φ1^2");
    t.check("res(Φ9, Φ3 Φ1)", res(&[9], &[3, 1]), 27);
    let bound = BigInt::from(64 * 27);
    t.check("bound on det N9", factored(&bound), "2^6 · 3^3");

    t.case("genera of N9");
    // N9^perp has rank 6, so n2(N9) >= 10 - 6
    let classes = enumerate_phi_lattices(
        9,
        &PhiConstraints { det_divisor: bound.clone(), signatures: vec![(0, 6), (2, 4)], n2_window: Some((4, 6)) },
    )?;
    let genera: BTreeSet<String> = classes.iter().map(|c| c.genus.to_string()).collect();
    let pairs = [
        ("II_(0,6)2^-6 3^1", "II_(2,4)2^-4 3^-1"),
        ("II_(0,6)2^-6 3^-3", "II_(2,4)2^-4 3^3"),
        ("II_(2,4)2^-6 3^-1", "II_(0,6)2^-4 3^1"),
        ("II_(2,4)2^-6 3^3", "II_(0,6)2^-4 3^-3"),
    ];
    let stated: BTreeSet<&str> = pairs.iter().map(|p| p.0).collect();
    t.check("genera of Φ9-lattices N9", join(&genera), join(&stated));
    for (g9, perp) in pairs {
        let c = complement_genus(&n_genus, &sym(g9)?, &[3])?;
        t.check(format!("genus of N9^perp for N9 ∈ {g9}"), c, perp);
    }
    let a2m = standard::scaled(&standard::a(2), -1);
    let e6m = standard::scaled(&standard::e(6), -1);
    let rep5 = definite_rep(&sym("II_(0,6)2^-4 3^1")?, &[(e6m.clone(), 2, 2), (a2m.direct_sum(&standard::scaled(&standard::d(4), -1)), 2, 1)])?;
    // index prime to 3 keeps the 3-adic symbol, so the ambient carries 3^-3
    let amb6 = standard::sum(&[a2m.clone(), a2m.clone(), standard::scaled(&standard::a(2), -2)]);
    let rep6 = definite_rep(&sym("II_(0,6)2^-4 3^-3")?, &[(amb6, 2, 1)])?;
    t.check("genus II_(0,6)2^-4 3^1", class_summary(classes_and_roots(&rep5)?), "1 class, roots");
    t.check("genus II_(0,6)2^-4 3^-3", class_summary(classes_and_roots(&rep6)?), "1 class, roots");

    t.case("p_N = Φ9 Φ3^2 Φ1^2");
    let perp2: BTreeSet<String> = pairs[..2]
        .iter()
        .map(|(g9, _)| complement_genus(&n_genus, &sym(g9).unwrap(), &[3]).map(|c| c.local_at(2).to_string()))
        .collect::<Result<_>>()?;
    t.check("2-adic symbol of N9^perp in the remaining cases", join(&perp2), "1^2 2^-4");
    let perp2: JordanSymbol = sym("II_(2,4)2^-4 3^-1")?.local_at(2);
    let n3 = phi3_two_adic_symbols(4, 1);
    t.check("2-adic symbols of a rank-4 N3 with scales up to 2", join(&n3), "1^4, 1^-2 2^-2, 2^4");
    let fits: Vec<String> = n3.iter().filter(|s| is_two_adic_summand(s, &perp2)).map(|s| s.to_string()).collect();
    t.check("N3 symbols that are summands of N9^perp ⊗ Z_2", join(fits), "none");

    t.case("p_N = Φ9 Φ1^6");
    let one_glue: Vec<&str> = pairs
        .iter()
        .filter(|(g9, _)| {
            let g = sym(g9).unwrap();
            g.signature == (0, 6) && (BigInt::from(64 * 3) % &g.det.abs()) == BigInt::from(0)
        })
        .map(|p| p.0)
        .collect();
    t.check("N9 with det | 2^6 res(Φ9, Φ1) and N1 = N9^perp of signature (2,4)", join(one_glue), "II_(0,6)2^-6 3^1");
    t.external("for a general K3 cover N1 is the transcendental lattice and f is semi-symplectic", "Torelli theorem; geometric step");
    let rho16 = runs.rho16;
    let e6m2 = standard::scaled(&standard::e(6), -2);
    let q16 = Lattice::from_int(&rho16.setup.q)?;
    t.check("Q of the rho16 fixture is isometric to E6(-2)", isometry_test(&q16, &e6m2)?.is_some(), true);
    t.check("genus of E6(-2)", genus_symbol(&e6m2)?, "II_(0,6)2^-6 3^1");
    t.check("genus of T(X) for the rho16 fixture", transcendental_genus(rho16)?, "II_(2,4)2^-4 3^-1");
    let u = standard::hyperbolic_plane();
    let t16 = standard::sum(&[u.clone(), standard::scaled(&u, 2), standard::scaled(&standard::a(2), -2)]);
    t.check("genus of U ⊕ U(2) ⊕ A2(-2)", genus_symbol(&t16)?, "II_(2,4)2^-4 3^-1");
    t.check("image of aut_s(Y) in O(Num(Y) ⊗ F2), rho16", image_summary(rho16), "order 120, S5");
    t.check("9 divides the order of that image", (rho16.image.order() % BigInt::from(9)) == BigInt::from(0), false);

    t.case("p_N = Φ9 Φ3 Φ1^4: twists of A2");
    let p3 = principal_phi_lattice(3)?;
    t.check("principal Φ3-lattice is isometric to A2", isometry_test(&p3.lattice, &standard::a(2))?.is_some(), true);
    let det_bound = BigInt::from(4) * res(&[3], &[9, 1]);
    t.check("bound 2^2 res(Φ3, Φ9 Φ1) on det N3", factored(&det_bound), "2^2 · 3^3");
    let n3_syms = phi3_two_adic_symbols(2, 1);
    let ok2: Vec<&JordanSymbol> = n3_syms.iter().filter(|s| is_two_adic_summand(s, &perp2)).collect();
    t.check("2-adic symbols of N3 that are summands of N9^perp ⊗ Z_2", join(&ok2), "2^-2");
    let mut twists = Vec::new();
    for n in -12i64..=12 {
        if n == 0 || (&det_bound % BigInt::from(3 * n * n)) != BigInt::from(0) {
            continue;
        }
        let l = a2(&p3, n)?;
        if ok2.iter().any(|s| genus_symbol(&l.lattice).map(|g| g.local_at(2) == **s).unwrap_or(false)) {
            twists.push(n);
        }
    }
    let names = |ns: &[i64]| join(ns.iter().map(|n| format!("A2({n})")));
    t.check("twists A2(n) meeting both conditions", names(&twists), "A2(-6), A2(-2), A2(2), A2(6)");

    t.case("N9 ∈ II_(0,6)2^-6 3^1");
    let target = sym("II_(2,4)2^-4 3^-1")?;
    let lim = res(&[3], &[1]) * &target.det.abs();
    let small: Vec<i64> = twists.iter().copied().filter(|&n| (&lim % BigInt::from(3 * n * n)) == BigInt::from(0)).collect();
    t.check("A2(n) with det | res(Φ3, Φ1) det N9^perp", names(&small), "A2(-2), A2(2)");
    let n1_bound = (res(&[3], &[1]).pow(2) * &target.det.abs()) / BigInt::from(12);
    t.check("bound on det N1", factored(&n1_bound), "2^2 · 3^2");
    let uu2: JordanSymbol = sym("II_(2,2)2^2")?.local_at(2);
    t.check("genus of A2(2)", genus_symbol(&a2(&p3, 2)?.lattice)?, "II_(2,0)2^-2 3^1");
    let pos = genera_with((0, 4), &uu2, 3, &[0, 1, 2])?;
    t.check("N1 genera for N3 = A2(2)", join(&pos), "II_(0,4)2^2 3^2");
    let a2m1 = standard::scaled(&standard::a(2), -1);
    let rep = definite_rep(&sym("II_(0,4)2^2 3^2")?, &[(a2m1.direct_sum(&a2m1), 2, 1)])?;
    t.check("genus II_(0,4)2^2 3^2", class_summary(classes_and_roots(&rep)?), "1 class, roots");
    let neg = genera_with((2, 2), &uu2, 3, &[0, 1, 2])?;
    t.check("N1 genera for N3 = A2(-2)", join(&neg), "II_(2,2)2^2, II_(2,2)2^2 9^-1, II_(2,2)2^2 9^1");
    let survivors = glue_survivors(&a2(&p3, -2)?, &neg, &target)?;
    t.check("N1 genera that glue equivariantly with A2(-2) into N9^perp", join(&survivors), "II_(2,2)2^2");
    let uu = standard::hyperbolic_plane().direct_sum(&standard::scaled(&standard::hyperbolic_plane(), 2));
    t.check("genus of U ⊕ U(2)", genus_symbol(&uu)?, "II_(2,2)2^2");
    t.external("II_(2,2)2^2 consists of the single class U ⊕ U(2)", "Conway-Sloane, Thm 15.19");
    t.external("with T(X) = U ⊕ U(2) the spectral radius of the lift is one", "[oguiso-yu] Lemma 7.7");
    t.external("no Enriques surface has an automorphism of order 9 of this kind", "[MO1]");

    t.case("N9 ∈ II_(0,6)2^-6 3^-3");
    t.check("F9 = Φ9 mod 2 is irreducible", f9.is_irreducible(), true);
    let phi9_shift = shift_by_one(&cyclotomic(9)?);
    t.check("Φ9(x+1) is Eisenstein at 3", is_eisenstein_at(&phi9_shift, 3), true);
    t.external(
        "N9^∨/N9 ≅ Z[ζ9]/I as Z[ζ9]-modules, so I is the unique ideal 2(1-ζ9)^3 of norm det N9",
        "structure of discriminant groups of Φn-lattices",
    );
    let norm_i = BigInt::from(64) * cyclotomic(9)?.eval(&BigInt::from(1)).pow(3);
    t.check("norm of 2(1-ζ9)^3", factored(&norm_i), "2^6 · 3^3");
    t.check("det N9", factored(&sym("II_(0,6)2^-6 3^-3")?.det), "2^6 · 3^3");
    let n9 = classes.iter().find(|c| c.genus.to_string() == "II_(0,6)2^-6 3^-3").map(|c| &c.phi);
    let ord9 = match n9 {
        Some(p) => order_on_p_part(&p.lattice, &p.isometry, 3)?.to_string(),
        None => "no such Φ9-lattice".into(),
    };
    t.check("order of ζ9 on (N9^∨/N9)_3", ord9, 3);
    let mut order3 = Vec::new();
    for &n in &twists {
        let l = a2(&p3, n)?;
        if order_on_p_part(&l.lattice, &l.isometry, 3)? == 3 {
            order3.push(n);
        }
    }
    t.check("A2(n) on whose 3-part ζ3 acts with order 3", names(&order3), "A2(-6), A2(6)");
    let target = sym("II_(2,4)2^-4 3^3")?;
    let pos = genera_with((0, 4), &uu2, 3, &[2])?;
    t.check("N1 genera for N3 = A2(6)", join(&pos), "II_(0,4)2^2 3^2");
    let neg = genera_with((2, 2), &uu2, 3, &[2])?;
    t.check("N1 genera for N3 = A2(-6)", join(&neg), "II_(2,2)2^2 3^-2, II_(2,2)2^2 9^-1, II_(2,2)2^2 9^1");
    let a6 = a2(&p3, -6)?;
    let survivors = glue_survivors(&a6, &neg, &target)?;
    t.check("N1 genera that glue equivariantly with A2(-6) into N9^perp", join(&survivors), "II_(2,2)2^2 9^1");
    let n1 = sym("II_(2,2)2^2 9^1")?;
    let n1_perp = complement_genus(&n_genus, &n1, &[3])?;
    let a8m2 = standard::scaled(&standard::a(8), -2);
    t.check("A8(-2) lies in the genus of N1^perp", genus_symbol(&a8m2)? == n1_perp, true);
    // a class whose shortest vectors of order 9 in L^∨/L span a line has
    // an O(L)-invariant line, so no isometry with characteristic
    // polynomial Φ9 Φ3
    let mut admissible = Vec::new();
    for c in enumerate_definite_genus(&a8m2)? {
        if matches!(shortest_in_order_classes(&c, 9)?, Some((_, _, 1))) {
            continue;
        }
        admissible.push(if isometry_test(&c, &a8m2)?.is_some() { "A8(-2)".to_string() } else { "another class".into() });
    }
    t.check("classes of the genus of N1^perp without an invariant line", join(admissible), "A8(-2)");

    t.case("consequence for p_N mod 2");
    let two_part = join(discriminant_p_part(&a6.lattice, 2)?);
    t.check("(N3^∨/N3)_2 for N3 = A2(-6)", two_part, "2, 2");
    t.check("p_N mod 2", mod2_product(&[9, 3, 1, 1, 1, 1]), "F9 F3 F1^4");

    t.case("realization");
    let rho18 = runs.rho18;
    let q18 = Lattice::from_int(&rho18.setup.q)?;
    t.check("Q of the rho18 fixture is isometric to A8(-2)", isometry_test(&q18, &a8m2)?.is_some(), true);
    t.check("genus of T(X) for the rho18 fixture", transcendental_genus(rho18)?, n1);
    t.check("image of aut_s(Y) in O(Num(Y) ⊗ F2), rho18", image_summary(rho18), "order 362880, S9");
    Ok(t.finish())
}
