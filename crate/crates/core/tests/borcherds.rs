use num_traits::Signed;
use std::collections::BTreeMap;
use std::sync::OnceLock;

use enriques_core::borcherds::{self, lift, search, *};
use enriques_core::genus::genus_symbol;
use enriques_core::isom::{self, acts_as_pm1, enumerate_elements, glue_compatible_extensions, isometry_test};
use enriques_core::lattice::standard::{a, e};
use enriques_core::lattice::Lattice;
use enriques_core::matrix::{self, IMat};
use enriques_core::permgroup::F2Matrix;

fn setup(name: &str) -> &'static EnriquesSetup {
    static F7: OnceLock<EnriquesSetup> = OnceLock::new();
    static RHO16: OnceLock<EnriquesSetup> = OnceLock::new();
    static RHO18: OnceLock<EnriquesSetup> = OnceLock::new();
    let cell = match name {
        "f7" => &F7,
        "rho16" => &RHO16,
        _ => &RHO18,
    };
    cell.get_or_init(|| {
        let fx = Fixture::read(&bundled_fixture_dir().join(format!("{name}.json"))).unwrap();
        load_setup(&fx).unwrap()
    })
}

fn is_identity(g: &IMat) -> bool {
    isom::is_identity(g)
}

#[test]
fn fixture_invariants() {
    let cases = [("f7", 16, a(6), "8A1+2D4", 10080u64, 40usize), ("rho16", 16, e(6), "D4+D5", 103680, 20), ("rho18", 18, a(8), "A3+A4", 725760, 20)];
    for (name, rank, k, rt, oq, nw) in cases {
        let s = setup(name);
        assert_eq!(s.sx.len(), rank, "{name}");
        assert_eq!(s.p_root_type.to_string(), rt, "{name}");
        assert_eq!(s.o_q.order, oq.into(), "{name}");
        assert_eq!(s.walls0.len(), nw, "{name}");
        let q = Lattice::from_int(&s.q).unwrap();
        assert!(isometry_test(&q, &k.rescale_int(-2).unwrap()).unwrap().is_some(), "{name}");
        for w in &s.walls0 {
            assert_eq!(matrix::dot(&matrix::vec_mat(w, &s.frame.sy), w), -2);
        }
    }
}

#[test]
fn f7_neron_severi_genus() {
    let s = setup("f7");
    assert_eq!(genus_symbol(&s.sx_lattice()).unwrap().to_string(), "II_(1,15)2^4 7^1");
}

#[test]
fn rho_determinants() {
    assert_eq!(setup("rho16").sx_lattice().determinant().abs(), matrix::rat_int(48));
    assert_eq!(setup("rho18").sx_lattice().determinant().abs(), matrix::rat_int(36));
}

#[test]
fn corrupted_fixture_names_the_failed_clause() {
    let fx = Fixture::read(&bundled_fixture_dir().join("rho18.json")).unwrap();
    let mut bad = fx.clone();
    bad.expected.oq_order = 1;
    let err = load_setup(&bad).err().unwrap().to_string();
    assert!(err.contains("|O(Q)|"), "{err}");
    let mut bad = fx.clone();
    bad.expected.root_type = "A7".into();
    let err = load_setup(&bad).err().unwrap().to_string();
    assert!(err.contains("root type"), "{err}");
    let mut bad = fx;
    bad.alpha = bad.alpha.iter().map(|x| -x).collect();
    assert!(load_setup(&bad).is_err());
}

#[test]
fn chamber_basics() {
    let s = setup("rho18");
    let d0 = initial_chamber(s);
    assert!(is_in_nef_cone(s, &d0).unwrap());
    for r in &s.walls0 {
        let d1 = adjacent_chamber(s, &d0, r).unwrap();
        let side = |y: &[i64]| matrix::dot(&matrix::vec_mat(y, &s.frame.sy), r).signum();
        assert_eq!(side(&d0.interior_point), 1);
        assert_eq!(side(&d1.interior_point), -1);
        let minus: Vec<i64> = r.iter().map(|x| -x).collect();
        assert!(d1.walls.contains(&minus));
        let back = adjacent_chamber(s, &d1, &minus).unwrap();
        assert_eq!(back, d0);
    }
    assert!(adjacent_chamber(s, &d0, &vec![0; 10]).is_err());
}

#[test]
fn chamber_symmetries_preserve_everything() {
    for name in ["f7", "rho16", "rho18"] {
        let s = setup(name);
        assert!(is_identity(&s.o_sy_d0[0]));
        for g in &s.o_sy_d0 {
            assert!(isom::preserves_gram(g, &s.frame.sy));
            let mut img: Vec<Vec<i64>> = s.walls0.iter().map(|w| matrix::vec_mat(w, g)).collect();
            img.sort();
            assert_eq!(img, s.walls0);
        }
    }
}

fn is_abelian(g: &[IMat]) -> bool {
    g.iter().all(|x| g.iter().all(|y| matrix::mat_mul(x, y) == matrix::mat_mul(y, x)))
}

#[test]
fn f7_stabilizer_is_klein_four() {
    let s = setup("f7");
    let d0 = initial_chamber(s);
    let st = semisymplectic_lifts(s, &d0, &d0).unwrap();
    assert_eq!(st.len(), 4);
    assert!(st.iter().any(|g| is_identity(g)));
    assert!(st.iter().all(|g| is_identity(&matrix::mat_mul(g, g))));
    assert!(is_abelian(&st));
}

#[test]
fn rho18_stabilizer_is_s3() {
    let s = setup("rho18");
    let d0 = initial_chamber(s);
    let st = semisymplectic_lifts(s, &d0, &d0).unwrap();
    assert_eq!(st.len(), 6);
    assert!(!is_abelian(&st));
}

fn orbit_summary(o: &[WallOrbit]) -> (Vec<usize>, Vec<usize>) {
    let mut outer: Vec<usize> = o.iter().filter(|w| w.outer).map(|w| w.size).collect();
    let mut inner: Vec<usize> = o.iter().filter(|w| !w.outer).map(|w| w.size).collect();
    outer.sort();
    inner.sort();
    (outer, inner)
}

#[test]
fn rho18_orbit_table() {
    let s = setup("rho18");
    let rep = wall_orbit_report(s, &initial_chamber(s)).unwrap();
    assert_eq!(orbit_summary(&rep), (vec![3, 3, 6], vec![2, 3, 3]));
}

#[test]
fn f7_orbit_table_and_inner_walls() {
    let s = setup("f7");
    let d0 = initial_chamber(s);
    let rep = wall_orbit_report(s, &d0).unwrap();
    assert_eq!(rep.len(), 10);
    assert_eq!(rep.iter().map(|w| w.size).sum::<usize>(), 40);
    assert_eq!(rep.iter().filter(|w| w.outer).map(|w| w.size).sum::<usize>(), 12);
    for w in rep.iter().filter(|w| !w.outer) {
        let d1 = adjacent_chamber(s, &d0, &w.representative).unwrap();
        assert!(semisymplectic_lifts(s, &d0, &d1).unwrap().is_empty());
    }
}

#[test]
fn f7_search() {
    let s = setup("f7");
    let run = main_borcherds(s, 50).unwrap();
    assert_eq!(run.reps.len(), 2);
    assert_eq!(run.chamber_profiles(), vec![(4, 12, 28), (4, 12, 28)]);
    assert!(run.orbits.iter().all(|o| o.len() == 10));
    assert_eq!(mod2_image_order(&run.gens, 10), 5040.into());
    for g in &run.gens {
        assert!(isom::preserves_gram(g, &s.frame.sy));
        assert!(search::preserves_nef_cone(s, g).unwrap());
    }
}

#[test]
fn rho18_search() {
    let s = setup("rho18");
    let run = main_borcherds(s, 50).unwrap();
    assert_eq!(run.reps.len(), 1);
    assert_eq!(run.stabilizers[0].len(), 6);
    assert_eq!(mod2_image_order(&run.gens, 10), 362880.into());
    for g in &run.gens {
        assert!(search::preserves_nef_cone(s, g).unwrap());
    }
}

#[test]
fn rho16_search() {
    let s = setup("rho16");
    let run = main_borcherds(s, 50).unwrap();
    assert_eq!(run.reps.len(), 20);
    let mut types: BTreeMap<(usize, usize, usize), usize> = BTreeMap::new();
    for p in run.chamber_profiles() {
        *types.entry(p).or_default() += 1;
    }
    let want: BTreeMap<(usize, usize, usize), usize> = [((1, 7, 13), 2), ((1, 5, 15), 6), ((2, 6, 14), 12)].into();
    assert_eq!(types, want);
    for (st, orb) in run.stabilizers.iter().zip(&run.orbits) {
        if st.len() == 2 {
            let (outer, inner) = orbit_summary(orb);
            assert_eq!(outer, vec![1, 1, 2, 2]);
            assert_eq!(inner, vec![1, 1, 2, 2, 2, 2, 2, 2]);
        }
    }
    assert_eq!(mod2_image_order(&run.gens, 10), 120.into());
}

#[test]
fn budget_exhaustion_is_reported() {
    let s = setup("f7");
    assert!(matches!(main_borcherds(s, 1), Err(enriques_core::Error::Budget(_))));
}

/// `g ⊕ h` on `S_X` when it is integral.
fn glued_action(s: &EnriquesSetup, g: &IMat, h: &IMat, m2inv: &IMat, m: &IMat) -> Option<IMat> {
    let n = m.len();
    let mut gh = vec![vec![0i64; n]; n];
    for i in 0..10 {
        gh[i][..10].copy_from_slice(&g[i]);
    }
    for i in 0..h.len() {
        gh[10 + i][10..].copy_from_slice(&h[i]);
    }
    // (2 M^{-1}) (g ⊕ h) M must be divisible by 2
    let x = matrix::mat_mul(&matrix::mat_mul(m2inv, &gh), m);
    let _ = s;
    x.iter().flatten().all(|v| v % 2 == 0).then(|| x.iter().map(|r| r.iter().map(|v| v / 2).collect()).collect())
}

/// Condition (i) by trying every `h` in `O(Q)`, against the mod-2 test.
#[test]
fn f7_lift_criterion_matches_brute_force() {
    let s = setup("f7");
    let hs = enumerate_elements(&s.o_q.gens, s.q.len(), 20000).unwrap();
    assert_eq!(hs.len(), 10080);
    let mut m = s.sy2_in_sx.clone();
    m.extend(s.q_in_sx.iter().cloned());
    let minv = matrix::inverse_rat(&matrix::to_rat(&m)).unwrap();
    let m2inv: IMat = minv.iter().map(|r| r.iter().map(|x| (x * matrix::rat_int(2)).to_integer().try_into().unwrap()).collect()).collect();
    let form = s.sx_lattice().discriminant_form().unwrap();
    let brute = |g: &IMat| -> Option<IMat> {
        for h in &hs {
            if let Some(x) = glued_action(s, g, h, &m2inv, &m) {
                if acts_as_pm1(&form, &x).unwrap() {
                    return Some(h.clone());
                }
            }
        }
        None
    };
    let mut yes = 0;
    for (i, g) in s.o_sy_d0.iter().enumerate() {
        let fast = s.lift.satisfies(&F2Matrix::from_int(g));
        if fast || i % 48 == 0 {
            let b = brute(g);
            assert_eq!(fast, b.is_some(), "element {i}");
            if let Some(h) = b {
                yes += 1;
                // S_X basis rows in S_Y(2) ⊕ Q coordinates
                let ext = glue_compatible_extensions(g, &[h], &minv).unwrap();
                assert_eq!(ext.len(), 1);
                assert!(acts_as_pm1(&form, &ext[0].1).unwrap());
            }
        }
    }
    assert_eq!(yes, 4);
}

#[test]
fn lift_data_rejects_non_two_elementary_glue() {
    let s = setup("rho18");
    let mut q = s.q_in_sx.clone();
    for x in q[0].iter_mut() {
        *x *= 3;
    }
    assert!(lift::LiftData::new(&s.frame.sy, &s.sy2_in_sx, &q, &s.o_q.gens).is_err());
}

#[test]
fn fixture_roundtrip() {
    let path = bundled_fixture_dir().join("f7.json");
    let fx = Fixture::read(&path).unwrap();
    let again = Fixture::parse(&fx.to_json()).unwrap();
    assert_eq!(again.l26, fx.l26);
    assert_eq!(again.expected, fx.expected);
    assert!(Fixture::parse("{\"L26\": 3}").is_err());
    let _ = borcherds::build::Kind::parse("f7").unwrap();
}
