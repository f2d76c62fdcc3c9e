use std::collections::BTreeSet;

use num_bigint::BigInt;

use super::{join, BundledRun, Runs, Trace, VerificationReport};
use crate::cyclo::{
    allowed_factor, admissible_orders, classify_multiset, cyclotomic_multisets, divisors, mod2_factor_check,
    phi8_obstruction_holds, product_of, F2Poly,
};
use crate::error::Result;
use crate::permgroup::F2Matrix;

const ORDER_BOUNDS: [u64; 5] = [36, 48, 56, 84, 120];
const REALIZED: [u64; 14] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 12, 14, 15, 20];
const SAMPLES: usize = 400;
const SEED: u64 = 0x5eed;

/// An element of order exactly `k` found as a power of a sampled word, and
/// whether `F_k` divides its characteristic polynomial.
fn realizing_element(run: &BundledRun, k: u64) -> Option<(u64, bool)> {
    let fk = allowed_factor(k);
    for x in run.image.random_elements(SAMPLES, SEED) {
        let ord = x.order();
        if ord % k != 0 {
            continue;
        }
        let mut y = F2Matrix::identity(x.n);
        for _ in 0..ord / k {
            y = y.mul(&x);
        }
        let cp = F2Poly(y.charpoly() as u128);
        return Some((y.order(), cp.divrem(fk).1 .0 == 0));
    }
    None
}

fn describe(found: Option<(u64, bool)>) -> String {
    match found {
        Some((o, d)) => format!("order {o}, divisible {d}"),
        None => "no element found".into(),
    }
}

pub fn verify_headline() -> Result<VerificationReport> {
    verify_headline_with(&Runs::bundled()?)
}

pub fn verify_headline_with(runs: &Runs) -> Result<VerificationReport> {
    let mut t = Trace::new(
        "headline",
        "p_f mod 2 is a product of F1, F3, F5, F7, F9, each of them occurs, and the order of f_N divides one of 36, 48, 56, 84, 120",
    );

    t.case("mod-2 factors");
    t.external(
        "each factor of p_f mod 2 is one of F1, F3, F5, F7, F9, F15, and ord f_N divides one of 48, 56, 72, 84, 90, 120",
        "[hor] Theorems 1.1 and 1.2",
    );
    let all = cyclotomic_multisets();
    let kept: Vec<&Vec<u64>> = all.iter().filter(|ms| classify_multiset(ms).is_none()).collect();
    let closed = kept.iter().all(|ms| mod2_factor_check(&product_of(ms)).is_ok());
    t.check("every admissible p_N reduces to a product of F1, F3, F5, F7, F9", closed, true);
    let f15 = allowed_factor(15);
    let with_f15 = kept.iter().filter(|ms| product_of(ms).mod2().divrem(f15).1 .0 == 0).count();
    t.check("admissible p_N with F15 | p_N mod 2", with_f15, 0);
    t.check("no Φ8-twist lies in II_(2,2)2^2 9^1", phi8_obstruction_holds()?, true);

    t.case("orders");
    let orders = admissible_orders()?;
    t.check("number of admissible orders", orders.len(), 28);
    let maximal: Vec<u64> =
        orders.iter().copied().filter(|&o| !orders.iter().any(|&p| p != o && p % o == 0)).collect();
    t.check("maximal admissible orders", join(&maximal), join(ORDER_BOUNDS));
    let divs: BTreeSet<u64> = ORDER_BOUNDS.iter().flat_map(|&b| divisors(b)).collect();
    t.check("admissible orders are the divisors of 36, 48, 56, 84, 120", orders.iter().copied().eq(divs), true);
    t.check("realized orders are admissible", REALIZED.iter().all(|o| orders.contains(o)), true);
    let open: Vec<u64> = orders.iter().copied().filter(|o| !REALIZED.contains(o)).collect();
    t.check("admissible orders not known to be realized", join(open), "16, 18, 21, 24, 28, 30, 36, 40, 42, 48, 56, 60, 84, 120");

    t.case("realization");
    t.external("F1, F3 and F5 occur", "[dolgachev16]");
    let images = [("rho16", runs.rho16, 120), ("f7", runs.f7, 5040), ("rho18", runs.rho18, 362880)];
    for (name, run, order) in images {
        t.check(format!("order of the mod-2 image, {name}"), run.image.order(), BigInt::from(order));
    }
    for (name, run, k) in [("rho16", runs.rho16, 5), ("f7", runs.f7, 7), ("rho18", runs.rho18, 9)] {
        t.check(
            format!("element of order {k} in the {name} image and F{k} | its characteristic polynomial"),
            describe(realizing_element(run, k)),
            format!("order {k}, divisible true"),
        );
    }
    Ok(t.finish())
}
