//! Property checks shared by the property suites and the acceptance run.

#![allow(dead_code)]

use enriques_core::genus::{genus_symbol, jordan_decomposition, prime_factors, symbol_direct_sum};
use enriques_core::isom::{preserves_gram, reflection};
use enriques_core::lattice::standard;
use enriques_core::matrix::{self, IMat};
use enriques_core::vectors::vectors_up_to;
use enriques_core::{Lattice, Sublattice};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

pub const CASES: u32 = 256;

pub fn cfg() -> Config {
    Config { cases: CASES, max_global_rejects: 100_000, failure_persistence: None, ..Config::default() }
}

fn symmetric(n: usize, diag: i64, off: i64, even: bool) -> impl Strategy<Value = IMat> {
    let k = n * (n + 1) / 2;
    prop::collection::vec(-off..=off, k)
        .prop_flat_map(move |offs| (Just(offs), prop::collection::vec(-diag..=diag, n)))
        .prop_map(move |(offs, diags)| {
            let mut g = vec![vec![0i64; n]; n];
            let mut it = offs.into_iter();
            for i in 0..n {
                for j in i..n {
                    let x = it.next().unwrap();
                    g[i][j] = x;
                    g[j][i] = x;
                }
                g[i][i] = if even { 2 * diags[i] } else { diags[i] };
            }
            g
        })
        .prop_filter("nondegenerate", |g| !matrix::det_i64(g).is_zero())
}

fn gram_with_rows(max_rank: usize) -> impl Strategy<Value = (IMat, IMat)> {
    (2..=max_rank).prop_flat_map(|n| {
        (symmetric(n, 3, 3, true), 1..n).prop_flat_map(move |(g, k)| {
            (Just(g), prop::collection::vec(prop::collection::vec(-3i64..=3, n), k))
        })
    })
}

fn det(l: &Lattice) -> BigInt {
    l.determinant().to_integer()
}

// det A det B = [C : A ⊕ B]^2 det C for A primitive, B = A^perp
pub fn determinant_index_identity() -> Result<(), String> {
    let strategy = gram_with_rows(6);
    TestRunner::new(cfg())
        .run(&strategy, |(g, rows)| {
            let c = Lattice::from_int(&g).unwrap();
            let sub = Sublattice::new(&c, &rows);
            prop_assume!(sub.as_ref().is_ok_and(|s| s.rank() == rows.len()));
            let sub = sub.unwrap();
            let a_sub = sub.primitive_closure();
            let a = a_sub.lattice().unwrap();
            prop_assume!(!a.determinant().is_zero());
            let b_sub = a_sub.orthogonal_complement();
            let b = b_sub.lattice().unwrap();
            let mut stacked = a_sub.basis.clone();
            stacked.extend(b_sub.basis.clone());
            let index = matrix::det_i64(&stacked).abs();
            prop_assert!(!index.is_zero());
            let (da, db, dc) = (det(&a), det(&b), det(&c));
            prop_assert_eq!(&da * &db, &index * &index * &dc);
            prop_assert!((&index * &dc).is_multiple_of(&da));
            for p in prime_factors(&(&da * &db)) {
                if p == 2 || index.is_multiple_of(&BigInt::from(p)) {
                    continue;
                }
                let split = symbol_direct_sum(&jordan_decomposition(&a, p).unwrap(), &jordan_decomposition(&b, p).unwrap()).unwrap();
                prop_assert_eq!(jordan_decomposition(&c, p).unwrap(), split);
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

fn piece() -> impl Strategy<Value = Lattice> {
    let base = prop_oneof![
        Just(standard::hyperbolic_plane()),
        Just(standard::a(2)),
        Just(standard::a(4)),
        Just(standard::d(4)),
        Just(standard::e(6)),
        Just(Lattice::from_int(&[vec![2, 1], vec![1, 4]]).unwrap()),
        Just(Lattice::from_int(&[vec![4, 1], vec![1, 4]]).unwrap()),
    ];
    (base, prop::sample::select(vec![1i64, -1, 2, -2, 3, -3, 5, 6, -6, 7]))
        .prop_map(|(l, k)| standard::scaled(&l, k))
}

pub fn genus_symbol_is_additive() -> Result<(), String> {
    let strategy = (piece(), piece());
    TestRunner::new(cfg())
        .run(&strategy, |(a, b)| {
            let (ga, gb) = (genus_symbol(&a).unwrap(), genus_symbol(&b).unwrap());
            let sum = genus_symbol(&a.direct_sum(&b)).unwrap();
            prop_assert_eq!(&sum, &ga.direct_sum(&gb).unwrap());
            prop_assert!(sum.check_consistency().is_ok());
            Ok(())
        })
        .map_err(|e| e.to_string())
}

// at odd p, L(-1) multiplies the sign of a rank-n constituent by δ^n,
// δ = -1 exactly when -1 is not a square mod p
pub fn negation_twists_odd_signs() -> Result<(), String> {
    let strategy = piece();
    TestRunner::new(cfg())
        .run(&strategy, |a| {
            let neg = a.rescale_int(-1).unwrap();
            for p in prime_factors(&det(&a)) {
                if p == 2 {
                    continue;
                }
                let delta: i8 = if p % 4 == 3 { -1 } else { 1 };
                let s = jordan_decomposition(&a, p).unwrap();
                let t = jordan_decomposition(&neg, p).unwrap();
                prop_assert_eq!(s.constituents.len(), t.constituents.len());
                for (x, y) in s.constituents.iter().zip(&t.constituents) {
                    prop_assert_eq!((x.scale_exp, x.rank), (y.scale_exp, y.rank));
                    prop_assert_eq!(y.sign, x.sign * delta.pow(x.rank as u32));
                }
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

fn pairing(g: &IMat, x: &[i64], y: &[i64]) -> i64 {
    matrix::dot(&matrix::vec_mat(x, g), y)
}

fn reflectable(g: &IMat, r: &[i64]) -> bool {
    let rr = pairing(g, r, r);
    rr != 0 && matrix::vec_mat(r, g).iter().all(|&x| (2 * x) % rr == 0)
}

fn gram_and_two_vectors() -> impl Strategy<Value = (IMat, Vec<i64>, Vec<i64>)> {
    (2usize..=5).prop_flat_map(|n| {
        (symmetric(n, 3, 2, true), prop::collection::vec(-2i64..=2, n), prop::collection::vec(-2i64..=2, n))
    })
}

pub fn reflections_are_involutive_isometries() -> Result<(), String> {
    let strategy = gram_and_two_vectors();
    TestRunner::new(cfg())
        .run(&strategy, |(g, r, _)| {
            prop_assume!(reflectable(&g, &r));
            let l = Lattice::from_int(&g).unwrap();
            let s = reflection(&l, &r).unwrap();
            prop_assert!(preserves_gram(&s, &g));
            prop_assert_eq!(matrix::mat_mul(&s, &s), matrix::identity(g.len()));
            let minus: Vec<i64> = r.iter().map(|x| -x).collect();
            prop_assert_eq!(matrix::vec_mat(&r, &s), minus);
            Ok(())
        })
        .map_err(|e| e.to_string())
}

// row convention: s_{r h} = h^{-1} s_r h for an isometry h, here h = s_t
pub fn reflections_conjugate() -> Result<(), String> {
    let strategy = gram_and_two_vectors();
    TestRunner::new(cfg())
        .run(&strategy, |(g, r, t)| {
            prop_assume!(reflectable(&g, &r) && reflectable(&g, &t));
            let l = Lattice::from_int(&g).unwrap();
            let sr = reflection(&l, &r).unwrap();
            let st = reflection(&l, &t).unwrap();
            let rt = matrix::vec_mat(&r, &st);
            let lhs = reflection(&l, &rt).unwrap();
            prop_assert_eq!(lhs, matrix::mat_mul(&matrix::mat_mul(&st, &sr), &st));
            Ok(())
        })
        .map_err(|e| e.to_string())
}

fn positive_gram() -> impl Strategy<Value = IMat> {
    (1usize..=4).prop_flat_map(|n| prop::collection::vec(prop::collection::vec(-2i64..=2, n), n)).prop_filter_map(
        "full rank",
        |b| {
            if matrix::det_i64(&b).is_zero() {
                return None;
            }
            Some(matrix::mat_mul(&b, &matrix::transpose(&b)))
        },
    )
}

pub fn short_vectors_match_naive_search() -> Result<(), String> {
    let strategy = (positive_gram(), 1i64..=12);
    TestRunner::new(cfg())
        .run(&strategy, |(g, bound)| {
            let found = vectors_up_to(&g, bound).unwrap();
            let n = g.len();
            // |x_i| <= sqrt(bound (G^-1)_ii)
            let inv = matrix::inverse_rat(&matrix::to_rat(&g)).unwrap();
            let box_: Vec<i64> = (0..n)
                .map(|i| {
                    let t = &inv[i][i] * BigRational::from_integer(bound.into());
                    let mut k = 0i64;
                    while BigRational::from_integer(((k + 1) * (k + 1)).into()) <= t {
                        k += 1;
                    }
                    k
                })
                .collect();
            let mut naive: std::collections::BTreeMap<i64, Vec<Vec<i64>>> = Default::default();
            let mut x: Vec<i64> = box_.iter().map(|b| -b).collect();
            loop {
                let q = pairing(&g, &x, &x);
                if q > 0 && q <= bound {
                    naive.entry(q).or_default().push(x.clone());
                }
                let mut i = 0;
                while i < n && x[i] == box_[i] {
                    x[i] = -box_[i];
                    i += 1;
                }
                if i == n {
                    break;
                }
                x[i] += 1;
            }
            for v in naive.values_mut() {
                v.sort();
            }
            prop_assert_eq!(found, naive);
            Ok(())
        })
        .map_err(|e| e.to_string())
}

fn rat(k: i64) -> BigRational {
    BigRational::from_integer(k.into())
}

pub fn dual_and_rescale_identities() -> Result<(), String> {
    let strategy = ((1usize..=5).prop_flat_map(|n| symmetric(n, 4, 3, true)), prop::sample::select(vec![-3i64, -2, -1, 2, 3, 5]));
    TestRunner::new(cfg())
        .run(&strategy, |(g, k)| {
            let l = Lattice::from_int(&g).unwrap();
            let n = g.len() as i32;
            let d = l.dual();
            prop_assert_eq!(d.dual().gram(), l.gram());
            prop_assert_eq!(d.determinant() * l.determinant(), BigRational::one());
            let lk = l.rescale_int(k).unwrap();
            prop_assert_eq!(lk.determinant(), l.determinant() * rat(k).pow(n));
            prop_assert_eq!(lk.dual().gram(), d.rescale(&(BigRational::one() / rat(k))).unwrap().gram());
            let (p, m) = l.signature();
            prop_assert_eq!(lk.signature(), if k > 0 { (p, m) } else { (m, p) });
            prop_assert_eq!(l.discriminant_form().unwrap().order(), l.determinant().to_integer().abs());
            Ok(())
        })
        .map_err(|e| e.to_string())
}

pub type Suite = (&'static str, fn() -> Result<(), String>);

/// Every suite, each run for [`CASES`] accepted cases.
pub const SUITES: [Suite; 7] = [
    ("determinant-index identity", determinant_index_identity),
    ("genus symbol additivity", genus_symbol_is_additive),
    ("sign change of odd symbols under L(-1)", negation_twists_odd_signs),
    ("reflections are involutive isometries", reflections_are_involutive_isometries),
    ("conjugation of reflections", reflections_conjugate),
    ("short vectors against naive search", short_vectors_match_naive_search),
    ("dual and rescale identities", dual_and_rescale_identities),
];
