//! Names for definite root lattices up to rescaling, used to label output.

use enriques_core::isom::isometry_test;
use enriques_core::lattice::standard;
use enriques_core::{Lattice, Result};
use num_bigint::BigInt;
use num_traits::Signed;

fn catalogue(rank: usize) -> Vec<(String, Lattice)> {
    let mut out = vec![(format!("A{rank}"), standard::a(rank))];
    if rank >= 4 {
        out.push((format!("D{rank}"), standard::d(rank)));
    }
    if (6..=8).contains(&rank) {
        out.push((format!("E{rank}"), standard::e(rank)));
    }
    out
}

/// `X(k)` if `l` is isometric to the root lattice `X` rescaled by an
/// integer `k`.
pub fn recognize(l: &Lattice) -> Result<Option<String>> {
    if !l.is_definite() {
        return Ok(None);
    }
    let r = l.rank();
    let sign: i64 = if l.is_positive_definite() { 1 } else { -1 };
    let det = l.determinant().to_integer().abs();
    for (name, base) in catalogue(r) {
        let d0 = base.determinant().to_integer();
        if (&det % &d0) != BigInt::from(0) {
            continue;
        }
        let q = &det / &d0;
        // q = k^r
        let k = (1..=64i64).find(|k| BigInt::from(*k).pow(r as u32) == q);
        let Some(k) = k else { continue };
        let scaled = standard::scaled(&base, sign * k);
        if isometry_test(l, &scaled)?.is_some() {
            return Ok(Some(if sign * k == 1 { name } else { format!("{name}({})", sign * k) }));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_scaled_root_lattices() {
        let e8 = standard::scaled(&standard::e(8), -2);
        assert_eq!(recognize(&e8).unwrap().as_deref(), Some("E8(-2)"));
        assert_eq!(recognize(&standard::a(2)).unwrap().as_deref(), Some("A2"));
        assert_eq!(recognize(&standard::hyperbolic_plane()).unwrap(), None);
    }
}
