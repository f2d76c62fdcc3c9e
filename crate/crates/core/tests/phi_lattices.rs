use enriques_core::cyclo::{cyclotomic, phi8_obstruction_holds};
use enriques_core::isom::isometry_test;
use enriques_core::lattice::standard::e;
use enriques_core::phi::{enumerate_phi_lattices, principal_phi_lattice, twist, PhiConstraints};
use num_bigint::BigInt;
use num_traits::Signed;

fn genera(n: u64, det: i64, sigs: &[(usize, usize)], window: Option<(usize, usize)>) -> Vec<String> {
    let c = PhiConstraints { det_divisor: BigInt::from(det), signatures: sigs.to_vec(), n2_window: window };
    let classes = enumerate_phi_lattices(n, &c).unwrap();
    for cl in &classes {
        cl.phi.check().unwrap();
    }
    classes.iter().map(|c| c.genus.to_string()).collect()
}

#[test]
fn principal_determinants_match_cyclotomic_values() {
    for n in 3..=30u64 {
        let p = principal_phi_lattice(n).unwrap();
        p.check().unwrap();
        let phi = cyclotomic(n as i64).unwrap();
        let want = (phi.eval(&BigInt::from(1)) * phi.eval(&BigInt::from(-1))).abs();
        assert_eq!(p.lattice.determinant().to_integer().abs(), want, "n={n}");
    }
}

#[test]
fn phi15_unique_class_is_e8_scaled() {
    let c = PhiConstraints { det_divisor: BigInt::from(256), signatures: vec![(0, 8), (2, 6)], n2_window: Some((6, 8)) };
    let classes = enumerate_phi_lattices(15, &c).unwrap();
    assert_eq!(classes.len(), 1);
    let e8 = e(8).rescale_int(-2).unwrap();
    assert!(isometry_test(&classes[0].phi.lattice, &e8).unwrap().is_some());
    assert!(!classes[0].genus_level_only);
    let again = twist(&principal_phi_lattice(15).unwrap(), &classes[0].phi.twist).unwrap();
    assert_eq!(again.lattice, classes[0].phi.lattice);
}

#[test]
fn phi9_four_genera() {
    let got = genera(9, 64 * 27, &[(0, 6), (2, 4)], Some((4, 6)));
    assert_eq!(got, ["II_(0,6)2^-6 3^1", "II_(0,6)2^-6 3^-3", "II_(2,4)2^-6 3^-1", "II_(2,4)2^-6 3^3"]);
}

#[test]
fn phi7_two_genera() {
    let got = genera(7, 64 * 7, &[(0, 6), (2, 4)], Some((4, 6)));
    assert_eq!(got, ["II_(0,6)2^6 7^1", "II_(2,4)2^6 7^-1"]);
}

#[test]
fn phi3_twists_are_scaled_a2() {
    let got = genera(3, 36, &[], None);
    assert_eq!(got.len(), 4);
    let p = principal_phi_lattice(3).unwrap();
    for k in [-6, -2, 2, 6] {
        let t = twist(&p, &[k]).unwrap();
        assert_eq!(t.lattice, p.lattice.rescale_int(k).unwrap());
    }
}

#[test]
fn phi8_has_no_twist_in_target_genus() {
    assert!(phi8_obstruction_holds().unwrap());
}

#[test]
fn unbounded_constraints_rejected() {
    let c = PhiConstraints { det_divisor: BigInt::from(0), signatures: vec![], n2_window: None };
    assert!(enumerate_phi_lattices(7, &c).is_err());
}
