use enriques_core::genus::{enumerate_definite_genus, genus_symbol, has_roots};
use enriques_core::isom::isometry_test;
use enriques_core::lattice::standard::{a, e, gamma16, sum};
use enriques_core::lattice::Lattice;
use enriques_core::matrix;
use enriques_core::vectors::root_type;

fn sublattice(ambient: &Lattice, rows: &[Vec<i64>]) -> Lattice {
    Lattice::from_int(&matrix::congruence(rows, &ambient.int_gram().unwrap())).unwrap()
}

fn check_single_class(l: &Lattice, symbol: &str) -> Lattice {
    assert_eq!(genus_symbol(l).unwrap().to_string(), symbol);
    let classes = enumerate_definite_genus(l).unwrap();
    assert_eq!(classes.len(), 1, "{symbol}");
    assert_eq!(genus_symbol(&classes[0]).unwrap().to_string(), symbol);
    classes[0].clone()
}

#[test]
fn a2_genus_has_one_class() {
    check_single_class(&a(2), "II_(2,0)3^-1");
}

#[test]
fn rank4_genus_with_roots() {
    let amb = sum(&[a(2), a(2)]).rescale_int(-1).unwrap();
    let l = sublattice(&amb, &[vec![1, 0, 0, 1], vec![0, 1, 0, 0], vec![0, 0, 1, 1], vec![0, 0, 0, 2]]);
    let c = check_single_class(&l, "II_(0,4)2^2 3^2");
    assert!(has_roots(&c).unwrap());
}

#[test]
fn rank6_genus_with_roots() {
    let amb = a(6).rescale_int(-1).unwrap();
    let rows = vec![
        vec![1, 0, 0, 0, 0, 1],
        vec![0, 1, 0, 0, 1, 0],
        vec![0, 0, 1, 0, 1, 1],
        vec![0, 0, 0, 1, 0, 1],
        vec![0, 0, 0, 0, 2, 0],
        vec![0, 0, 0, 0, 0, 2],
    ];
    let l = sublattice(&amb, &rows);
    let c = check_single_class(&l, "II_(0,6)2^4 7^1");
    assert!(has_roots(&c).unwrap());
}

#[test]
fn e8_scaled_genus() {
    let l = e(8).rescale_int(-2).unwrap();
    let c = check_single_class(&l, "II_(0,8)2^8");
    assert!(isometry_test(&c, &l).unwrap().is_some());
    assert!(!has_roots(&l).unwrap());
}

#[test]
fn rank16_unimodular_have_roots() {
    let e8e8 = sum(&[e(8), e(8)]).rescale_int(-1).unwrap();
    let g16 = gamma16().rescale_int(-1).unwrap();
    for l in [&e8e8, &g16] {
        assert_eq!(genus_symbol(l).unwrap().to_string(), "II_(0,16)");
        assert!(has_roots(l).unwrap());
    }
    let types: Vec<String> = [&e8e8, &g16].iter().map(|l| root_type(l).unwrap().to_string()).collect();
    assert_eq!(types, ["2E8", "D16"]);
}

#[test]
fn indefinite_input_is_rejected() {
    let u = enriques_core::lattice::standard::hyperbolic_plane();
    assert!(enumerate_definite_genus(&u).is_err());
    assert!(has_roots(&u).is_err());
}
