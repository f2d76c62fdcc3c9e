use enriques_core::verifier::{verify, Status, VerificationReport};

fn citations(r: &VerificationReport) -> Vec<String> {
    r.external_facts().iter().map(|row| row.citation.clone().unwrap_or_default()).collect()
}

fn row<'a>(r: &'a VerificationReport, step: &str) -> &'a str {
    &r.trace.iter().find(|row| row.step == step).unwrap_or_else(|| panic!("no row {step:?}")).computed
}

#[test]
fn f15_exclusion_is_verified() {
    let r = verify("f15").unwrap();
    assert_eq!(r.status, Status::Verified, "{}", r.to_text());
    assert!(r.mismatches().is_empty());
    assert_eq!(row(&r, "det N15"), "2^8 · 5^2");
    assert_eq!(row(&r, "Φ15-lattices in that range"), "E8(-2)");
    assert_eq!(
        citations(&r),
        [
            "[hor] Lemmas 2.1, 2.5 and Remark 2.4",
            "Conway-Sloane, Thm 15.19",
            "[oguiso-yu] Lemma 7.7",
            "Riemann-Roch; [mcmullen16] §2"
        ]
    );
}

#[test]
fn f15_report_is_reproducible() {
    assert_eq!(verify("f15").unwrap().to_json(), verify("f15").unwrap().to_json());
}

// The genus II_(2,2)2^2 3^-2 (represented by U(2) ⊕ U(3)) also glues with
// A2(-2); the stated list omits it. Every other row matches.
#[test]
fn f9_analysis_mismatches_only_on_the_missing_genus() {
    let r = verify("f9").unwrap();
    assert_eq!(r.status, Status::Refuted);
    let bad: Vec<&str> = r.mismatches().iter().map(|row| row.step.as_str()).collect();
    assert_eq!(
        bad,
        ["N1 genera for N3 = A2(-2)", "N1 genera that glue equivariantly with A2(-2) into N9^perp"]
    );
    for row in r.mismatches() {
        assert!(row.computed.contains("II_(2,2)2^2 3^-2"), "{row:?}");
    }
    let cites = citations(&r);
    for c in ["[hor] Remark 2.4", "Conway-Sloane, Thm 15.19", "[oguiso-yu] Lemma 7.7", "[MO1]"] {
        assert!(cites.iter().any(|x| x == c), "missing {c}");
    }
    assert_eq!(row(&r, "image of aut_s(Y) in O(Num(Y) ⊗ F2), rho18"), "order 362880, S9");
}

#[test]
fn f7_analysis_is_verified() {
    let r = verify("f7").unwrap();
    assert_eq!(r.status, Status::Verified, "{}", r.to_text());
    assert_eq!(row(&r, "[N : N7 ⊕ N1]"), "7");
    assert_eq!(row(&r, "Q of the f7 fixture is isometric to A6(-2)"), "true");
    assert_eq!(r.external_facts().len(), 4);
    assert!(citations(&r).iter().any(|c| c == "Conway-Sloane, Thm 15.19"));
}

#[test]
fn headline_is_verified() {
    let r = verify("headline").unwrap();
    assert_eq!(r.status, Status::Verified, "{}", r.to_text());
    assert_eq!(row(&r, "maximal admissible orders"), "36, 48, 56, 84, 120");
    assert_eq!(citations(&r), ["[hor] Theorems 1.1 and 1.2", "[dolgachev16]"]);
}

#[test]
fn unknown_claim_is_an_error() {
    assert!(verify("f11").is_err());
}

#[test]
fn json_mirrors_the_trace() {
    let r = verify("f15").unwrap();
    let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
    assert_eq!(v["claim"], "f15");
    assert_eq!(v["status"], "verified");
    assert_eq!(v["trace"].as_array().unwrap().len(), r.trace.len());
    assert_eq!(r.external_facts()[0].status.to_string(), "external-fact");
}
