use std::collections::BTreeSet;

use num_bigint::BigInt;

use super::f9::image_summary;
use super::genera::{classes_and_roots, complement_genus};
use super::{definite_rep, det_of, join, n_lattice, res, sym, Runs, Trace, VerificationReport};
use crate::error::Result;
use crate::genus::{genus_symbol, valuation};
use crate::isom::isometry_test;
use crate::kneser::enumerate_definite_genus;
use crate::lattice::{standard, Lattice};
use crate::phi::{enumerate_phi_lattices, principal_phi_lattice, PhiConstraints};

pub fn verify_f7_analysis() -> Result<VerificationReport> {
    verify_f7_analysis_with(&Runs::bundled()?)
}

pub fn verify_f7_analysis_with(runs: &Runs) -> Result<VerificationReport> {
    let mut t = Trace::new(
        "f7",
        "if F7 divides p_f mod 2 then NS(X) contains an invariant sublattice in II_(1,15)2^4 7^1 and N ∩ NS(X) contains A6(-2)",
    );
    let n_genus = genus_symbol(&n_lattice())?;

    t.case("glue between N7 and N1");
    t.external("after passing to a power prime to 7, p_N = Φ7 Φ1^6", "[hor] Lemma 2.1");
    t.check("res(Φ1, Φ7)", res(&[1], &[7]), 7);
    let det0 = det_of(&principal_phi_lattice(7)?.lattice);
    t.check("det of the principal Φ7-lattice", &det0, 7);
    // 7 | det N7 and N is 7-unimodular, so the glue is all of (N7^∨/N7)_7
    let index = if valuation(&det0, 7) > 0 { 7 } else { 1 };
    t.check("[N : N7 ⊕ N1]", index, 7);

    t.case("genera");
    // N ⊗ Z_2 = N7 ⊗ Z_2 ⊕ N1 ⊗ Z_2 and N1 has rank 6
    let classes = enumerate_phi_lattices(
        7,
        &PhiConstraints { det_divisor: BigInt::from(64 * 7), signatures: vec![(0, 6), (2, 4)], n2_window: Some((4, 6)) },
    )?;
    let genera: BTreeSet<String> = classes.iter().map(|c| c.genus.to_string()).collect();
    t.check("genera of Φ7-lattices N7", join(&genera), "II_(0,6)2^6 7^1, II_(2,4)2^6 7^-1");
    let pairs = [("II_(2,4)2^6 7^-1", "II_(0,6)2^4 7^1"), ("II_(0,6)2^6 7^1", "II_(2,4)2^4 7^-1")];
    for (g7, g1) in pairs {
        t.check(format!("genus of N1 for N7 ∈ {g7}"), complement_genus(&n_genus, &sym(g7)?, &[7])?, g1);
    }
    let rep = definite_rep(&sym("II_(0,6)2^4 7^1")?, &[(standard::scaled(&standard::a(6), -1), 2, 2)])?;
    let (count, roots) = classes_and_roots(&rep)?;
    t.check("classes in II_(0,6)2^4 7^1", count, 1);
    t.check("II_(0,6)2^4 7^1 has roots", roots, true);
    t.external("N ∩ NS(X) contains no (-2)-vectors", "Riemann-Roch; geometric step");
    t.external("II_(2,4)2^4 7^-1 consists of a single class", "Conway-Sloane, Thm 15.19");
    let a6m2 = standard::scaled(&standard::a(6), -2);
    t.check("genus of A6(-2)", genus_symbol(&a6m2)?, "II_(0,6)2^6 7^1");
    let mut n7 = Vec::new();
    for c in enumerate_definite_genus(&a6m2)? {
        n7.push(if isometry_test(&c, &a6m2)?.is_some() { "A6(-2)".to_string() } else { genus_symbol(&c)?.to_string() });
    }
    t.check("classes in II_(0,6)2^6 7^1", join(n7), "A6(-2)");

    t.case("Néron-Severi lattice");
    t.external("N1 has signature (2,4), so it contains T(X) and f is semi-symplectic", "Hodge theory; geometric step");
    let ns = complement_genus(&sym("II_(3,19)")?, &sym("II_(2,4)2^4 7^-1")?, &[2, 7])?;
    t.check("genus of the orthogonal complement of N1 in H^2(X, Z)", ns, "II_(1,15)2^4 7^1");
    let f7 = runs.f7;
    t.check("genus of S_X for the f7 fixture", genus_symbol(&f7.setup.sx_lattice())?, "II_(1,15)2^4 7^1");
    let q = Lattice::from_int(&f7.setup.q)?;
    t.check("Q of the f7 fixture is isometric to A6(-2)", isometry_test(&q, &a6m2)?.is_some(), true);
    t.check("image of aut_s(Y) in O(Num(Y) ⊗ F2), f7", image_summary(f7), "order 5040, S7");
    Ok(t.finish())
}
