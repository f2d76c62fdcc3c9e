//! One PASS/FAIL line per acceptance criterion. Values are exact; the
//! runtime limits below are the only tolerances. Criteria that fail for a
//! documented reason are listed in `EXPECTED_FAILURES` and the run asserts
//! that exactly those fail.

mod props;

use std::collections::{BTreeMap, BTreeSet};
use std::thread;
use std::time::{Duration, Instant};

use enriques_core::borcherds::{bundled_fixture_dir, WallOrbit};
use enriques_core::cyclo::{cyclotomic, resultant};
use enriques_core::genus::genus_symbol;
use enriques_core::isom::{definite_orthogonal_group, is_identity, isometry_test};
use enriques_core::lattice::standard::{a, e, hyperbolic_plane, scaled, sum};
use enriques_core::matrix;
use enriques_core::phi::{enumerate_phi_lattices, principal_phi_lattice, PhiConstraints};
use enriques_core::verifier::{self, BundledRun, Status, RUN_BUDGET};
use enriques_core::Lattice;
use num_bigint::BigInt;
use num_traits::Signed;

/// 1: the stated A8(-2) symbol has the wrong sign at 9 (see the decision
/// log). 9: the f9 replay finds a glue partner genus the case analysis
/// omits, so that report is refuted.
const EXPECTED_FAILURES: [u8; 2] = [1, 9];

const SECOND: Duration = Duration::from_secs(1);
const MINUTES: Duration = Duration::from_secs(600);
const HOUR: Duration = Duration::from_secs(3600);

type Verdict = Result<(), String>;

struct Outcome {
    id: u8,
    title: &'static str,
    verdict: Verdict,
    elapsed: Duration,
}

fn expect<T: PartialEq + std::fmt::Debug>(what: &str, got: T, want: T) -> Verdict {
    if got == want {
        Ok(())
    } else {
        Err(format!("{what}: got {got:?}, expected {want:?}"))
    }
}

/// Runs each item under a per-item time limit and collects all failures.
fn items<'a>(limit: Duration, list: Vec<(&'a str, Box<dyn FnOnce() -> Verdict + 'a>)>) -> Verdict {
    let mut errs = Vec::new();
    for (name, f) in list {
        let t = Instant::now();
        let v = f();
        let dt = t.elapsed();
        if let Err(e) = v {
            errs.push(e);
        } else if dt > limit {
            errs.push(format!("{name} took {dt:.2?}, limit {limit:?}"));
        }
    }
    if errs.is_empty() {
        Ok(())
    } else {
        Err(errs.join("; "))
    }
}

fn genus_symbols() -> Verdict {
    let u = hyperbolic_plane();
    let cases: Vec<(&str, Lattice, &str)> = vec![
        ("A2", a(2), "II_(2,0)3^-1"),
        ("U+U(2)+E8(-2)", sum(&[u.clone(), scaled(&u, 2), scaled(&e(8), -2)]), "II_(2,10)2^10"),
        ("E8(-2)", scaled(&e(8), -2), "II_(0,8)2^8"),
        ("A6(-2)", scaled(&a(6), -2), "II_(0,6)2^6 7^1"),
        ("A8(-2)", scaled(&a(8), -2), "II_(0,8)2^8 9^1"),
        ("U+U(2)", u.direct_sum(&scaled(&u, 2)), "II_(2,2)2^2"),
    ];
    items(
        SECOND,
        cases
            .into_iter()
            .map(|(name, l, want)| {
                let f: Box<dyn FnOnce() -> Verdict> =
                    Box::new(move || expect(name, genus_symbol(&l).map_err(|e| e.to_string())?.to_string(), want.to_string()));
                (name, f)
            })
            .collect(),
    )
}

fn product(ms: &[i64]) -> enriques_core::cyclo::IntPoly {
    ms.iter().fold(enriques_core::cyclo::IntPoly::one(), |acc, &m| acc.mul(&cyclotomic(m).unwrap()))
}

fn resultants() -> Verdict {
    let cases: [(&[i64], &[i64], i64); 5] =
        [(&[15], &[1], 1), (&[15], &[3], 25), (&[1], &[7], 7), (&[3], &[1], 3), (&[9], &[3, 1], 27)];
    items(
        SECOND,
        cases
            .iter()
            .map(|&(p, q, want)| {
                let f: Box<dyn FnOnce() -> Verdict> = Box::new(move || {
                    expect(&format!("res({p:?}, {q:?})"), resultant(&product(p), &product(q)).abs(), BigInt::from(want))
                });
                ("resultant", f)
            })
            .collect(),
    )
}

fn principal_determinants() -> Verdict {
    let cases = [(3u64, 3i64), (5, 5), (7, 7), (9, 3), (15, 1)];
    items(
        SECOND,
        cases
            .iter()
            .map(|&(n, want)| {
                let f: Box<dyn FnOnce() -> Verdict> = Box::new(move || {
                    let l = principal_phi_lattice(n).map_err(|e| e.to_string())?.lattice;
                    expect(&format!("det L0(Φ{n})"), l.determinant().to_integer().abs(), BigInt::from(want))
                });
                ("principal", f)
            })
            .collect(),
    )
}

fn genera_of(n: u64, det: i64, sigs: Vec<(usize, usize)>, window: (usize, usize)) -> Result<BTreeSet<String>, String> {
    let c = PhiConstraints { det_divisor: BigInt::from(det), signatures: sigs, n2_window: Some(window) };
    let classes = enumerate_phi_lattices(n, &c).map_err(|e| e.to_string())?;
    Ok(classes.iter().map(|c| c.genus.to_string()).collect())
}

fn set(xs: &[&str]) -> BTreeSet<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

fn phi_enumerations() -> Verdict {
    items(
        MINUTES,
        vec![
            (
                "Φ15",
                Box::new(|| {
                    let c = PhiConstraints {
                        det_divisor: BigInt::from(1024),
                        signatures: vec![(0, 8), (2, 6)],
                        n2_window: Some((6, 8)),
                    };
                    let classes = enumerate_phi_lattices(15, &c).map_err(|e| e.to_string())?;
                    expect("Φ15 classes", classes.len(), 1)?;
                    let iso = isometry_test(&classes[0].phi.lattice, &scaled(&e(8), -2)).map_err(|e| e.to_string())?;
                    expect("Φ15 class is E8(-2)", iso.is_some(), true)
                }),
            ),
            (
                "Φ7",
                Box::new(|| {
                    let got = genera_of(7, 64 * 7, vec![(0, 6), (2, 4)], (4, 6))?;
                    expect("Φ7 genera", got, set(&["II_(0,6)2^6 7^1", "II_(2,4)2^6 7^-1"]))
                }),
            ),
            (
                "Φ9",
                Box::new(|| {
                    let got = genera_of(9, 64 * 27, vec![(0, 6), (2, 4)], (4, 6))?;
                    let want = set(&["II_(0,6)2^-6 3^1", "II_(0,6)2^-6 3^-3", "II_(2,4)2^-6 3^-1", "II_(2,4)2^-6 3^3"]);
                    expect("Φ9 genera", got, want)
                }),
            ),
        ],
    )
}

fn orthogonal_group_orders() -> Verdict {
    let cases = [("A6(-2)", scaled(&a(6), -2), 10080u64), ("E6(-2)", scaled(&e(6), -2), 103680), ("A8(-2)", scaled(&a(8), -2), 725760)];
    items(
        MINUTES,
        cases
            .into_iter()
            .map(|(name, l, want)| {
                let f: Box<dyn FnOnce() -> Verdict> = Box::new(move || {
                    let g = definite_orthogonal_group(&l).map_err(|e| e.to_string())?;
                    expect(&format!("|O({name})|"), g.order, BigInt::from(want))
                });
                (name, f)
            })
            .collect(),
    )
}

fn load(name: &str) -> Result<BundledRun, String> {
    BundledRun::load(&bundled_fixture_dir().join(format!("{name}.json")), RUN_BUDGET).map_err(|e| e.to_string())
}

fn orbit_sizes(o: &[WallOrbit], outer: bool) -> Vec<usize> {
    let mut v: Vec<usize> = o.iter().filter(|w| w.outer == outer).map(|w| w.size).collect();
    v.sort();
    v
}

fn borcherds_f7() -> Verdict {
    let b = load("f7")?;
    let run = &b.run;
    expect("|R|", run.reps.len(), 2)?;
    for (k, st) in run.stabilizers.iter().enumerate() {
        expect(&format!("stabilizer order, D{k}"), st.len(), 4)?;
        let klein = st.iter().all(|g| is_identity(&matrix::mat_mul(g, g)));
        expect(&format!("stabilizer of D{k} is Z/2 x Z/2"), klein, true)?;
        expect(&format!("walls of D{k}"), run.reps[k].walls.len(), 40)?;
        expect(&format!("wall orbits of D{k}"), run.orbits[k].len(), 10)?;
    }
    expect("profiles", run.chamber_profiles(), vec![(4, 12, 28), (4, 12, 28)])?;
    expect("mod-2 image order", b.image.order(), BigInt::from(5040))
}

fn borcherds_rho18() -> Verdict {
    let b = load("rho18")?;
    let run = &b.run;
    expect("|R|", run.reps.len(), 1)?;
    expect("stabilizer order", run.stabilizers[0].len(), 6)?;
    expect("outer orbits", orbit_sizes(&run.orbits[0], true), vec![3, 3, 6])?;
    expect("inner orbits", orbit_sizes(&run.orbits[0], false), vec![2, 3, 3])?;
    expect("mod-2 image order", b.image.order(), BigInt::from(362880))
}

fn borcherds_rho16() -> Verdict {
    let b = load("rho16")?;
    let run = &b.run;
    expect("|R|", run.reps.len(), 20)?;
    let mut types: BTreeMap<(usize, usize, usize), usize> = BTreeMap::new();
    for p in run.chamber_profiles() {
        *types.entry(p).or_default() += 1;
    }
    let want: BTreeMap<(usize, usize, usize), usize> = [((1, 7, 13), 2), ((1, 5, 15), 6), ((2, 6, 14), 12)].into();
    expect("chamber types (stabilizer, outer, inner) -> count", types, want)?;
    for (st, orb) in run.stabilizers.iter().zip(&run.orbits) {
        if st.len() == 2 {
            expect("outer orbits, order-2 type", orbit_sizes(orb, true), vec![1, 1, 2, 2])?;
            expect("inner orbits, order-2 type", orbit_sizes(orb, false), vec![1, 1, 2, 2, 2, 2, 2, 2])?;
        }
    }
    expect("mod-2 image order", b.image.order(), BigInt::from(120))
}

/// External-fact citations each report is allowed to carry.
fn expected_citations(claim: &str) -> Vec<&'static str> {
    match claim {
        "f15" => vec![
            "[hor] Lemmas 2.1, 2.5 and Remark 2.4",
            "Conway-Sloane, Thm 15.19",
            "[oguiso-yu] Lemma 7.7",
            "Riemann-Roch; [mcmullen16] §2",
        ],
        "f9" => vec![
            "[hor] Remark 2.4",
            "Torelli theorem; geometric step",
            "Conway-Sloane, Thm 15.19",
            "[oguiso-yu] Lemma 7.7",
            "[MO1]",
            "structure of discriminant groups of Φn-lattices",
        ],
        "f7" => vec![
            "[hor] Lemma 2.1",
            "Riemann-Roch; geometric step",
            "Conway-Sloane, Thm 15.19",
            "Hodge theory; geometric step",
        ],
        _ => vec!["[hor] Theorems 1.1 and 1.2", "[dolgachev16]"],
    }
}

fn verifier_reports() -> Verdict {
    let mut errs = Vec::new();
    for claim in verifier::CLAIMS {
        let r = verifier::verify(claim).map_err(|e| e.to_string())?;
        if r.status != Status::Verified {
            let steps: Vec<&str> = r.mismatches().iter().map(|m| m.step.as_str()).collect();
            errs.push(format!("{claim} {}: {}", r.status, steps.join(" | ")));
        }
        let cites: BTreeSet<&str> = r.external_facts().iter().filter_map(|x| x.citation.as_deref()).collect();
        let want: BTreeSet<&str> = expected_citations(claim).into_iter().collect();
        if cites != want {
            errs.push(format!("{claim} external facts {cites:?}, expected {want:?}"));
        }
    }
    if errs.is_empty() {
        Ok(())
    } else {
        Err(errs.join("; "))
    }
}

fn property_suites() -> Verdict {
    let mut errs = Vec::new();
    for (name, suite) in props::SUITES {
        if let Err(e) = suite() {
            errs.push(format!("{name}: {e}"));
        }
    }
    if errs.is_empty() {
        Ok(())
    } else {
        Err(errs.join("; "))
    }
}

type Criterion = (u8, &'static str, Duration, fn() -> Verdict);

const CRITERIA: [Criterion; 10] = [
    (1, "genus symbols", MINUTES, genus_symbols),
    (2, "resultants", MINUTES, resultants),
    (3, "principal Φn-lattice determinants", MINUTES, principal_determinants),
    (4, "Φ15, Φ7 and Φ9 enumerations", MINUTES, phi_enumerations),
    (5, "definite orthogonal group orders", MINUTES, orthogonal_group_orders),
    (6, "Borcherds run, f7", HOUR, borcherds_f7),
    (7, "Borcherds run, rho18", HOUR, borcherds_rho18),
    (8, "Borcherds run, rho16", HOUR, borcherds_rho16),
    (9, "verifier reports", MINUTES, verifier_reports),
    (10, "property suites", MINUTES, property_suites),
];

#[test]
fn acceptance() {
    let outcomes: Vec<Outcome> = thread::scope(|s| {
        let handles: Vec<_> = CRITERIA
            .iter()
            .map(|&(id, title, limit, f)| {
                s.spawn(move || {
                    let t = Instant::now();
                    let mut verdict = f();
                    let elapsed = t.elapsed();
                    if verdict.is_ok() && elapsed > limit {
                        verdict = Err(format!("took {elapsed:.1?}, limit {limit:?}"));
                    }
                    Outcome { id, title, verdict, elapsed }
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("criterion panicked")).collect()
    });
    println!("acceptance ({} property cases per suite)", props::CASES);
    let mut failed = Vec::new();
    for o in &outcomes {
        match &o.verdict {
            Ok(()) => println!("criterion {:>2}: PASS  {} ({:.1?})", o.id, o.title, o.elapsed),
            Err(e) => {
                failed.push(o.id);
                let note = if EXPECTED_FAILURES.contains(&o.id) { " [expected]" } else { "" };
                println!("criterion {:>2}: FAIL  {} ({:.1?}){note}: {e}", o.id, o.title, o.elapsed);
            }
        }
    }
    assert_eq!(failed, EXPECTED_FAILURES, "failing criteria differ from the documented set");
}
