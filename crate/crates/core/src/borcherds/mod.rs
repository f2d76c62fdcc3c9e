//! Borcherds' method for the semi-symplectic automorphism group of an
//! Enriques surface: chambers of `P_Y` induced from Conway chambers, nef
//! tests, the lift criterion and the chamber search.
//!
//! Isometries act on row vectors from the right, `x -> x g`, and a chamber
//! is `D = D0^tau = { x tau : x in D0 }`.

pub mod build;
pub mod lift;
pub mod lp;
pub mod search;
pub mod walls;

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::isom::{self, MatrixGroup};
use crate::lattice::{Lattice, Sublattice};
use crate::matrix::{self, IMat};
use crate::vectors::{affine_slice, root_type, RootType};
use lift::LiftData;
use walls::{norm, Frame};

pub use search::{
    adjacent_chamber, borcherds_search, initial_chamber, is_in_nef_cone, main_borcherds, mod2_image_order, semisymplectic_lifts,
    wall_orbit_report, BorcherdsRun, Chamber, WallOrbit,
};

/// Directory of the fixtures shipped with the crate.
pub fn bundled_fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

/// On-disk description of `S_Y(2) ⊂ S_X ⊂ L26` with an ample class and a
/// Weyl vector.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Fixture {
    #[serde(default)]
    pub name: String,
    #[serde(rename = "L26")]
    pub l26: IMat,
    #[serde(rename = "SX_in_L26")]
    pub sx_in_l26: IMat,
    #[serde(rename = "SY2_in_SX")]
    pub sy2_in_sx: IMat,
    pub alpha: Vec<i64>,
    pub weyl: Vec<i64>,
    pub expected: Expected,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct Expected {
    pub root_type: String,
    #[serde(rename = "OQ_order")]
    pub oq_order: u64,
    #[serde(rename = "R_count")]
    pub r_count: usize,
}

impl Fixture {
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("fixture serializes")
    }

    pub fn from_built(b: &build::Built) -> Self {
        Fixture {
            name: b.kind.name().to_string(),
            l26: b.l26.clone(),
            sx_in_l26: b.sx_in_l26.clone(),
            sy2_in_sx: b.sy2_in_sx.clone(),
            alpha: b.alpha.clone(),
            weyl: b.weyl.clone(),
            expected: Expected {
                root_type: b.kind.p_root_type().to_string(),
                oq_order: b.kind.oq_order(),
                r_count: b.kind.r_count(),
            },
        }
    }
}

/// Validated data for the chamber search.
pub struct EnriquesSetup {
    pub name: String,
    pub frame: Frame,
    /// `S_X` basis in `L26` coordinates and its Gram matrix.
    pub sx_in_l26: IMat,
    pub sx: IMat,
    /// `pi^*`: the `S_Y(2)` basis in `S_X` coordinates.
    pub sy2_in_sx: IMat,
    /// `Q` basis in `S_X` coordinates and its Gram matrix.
    pub q_in_sx: IMat,
    pub q: IMat,
    pub p_root_type: RootType,
    pub alpha: Vec<i64>,
    pub weyl: Vec<i64>,
    pub expected: Expected,
    pub o_q: MatrixGroup,
    /// Wall vectors of `D0`, sorted.
    pub walls0: Vec<Vec<i64>>,
    /// All elements of `O(S_Y, D0)`, identity first.
    pub o_sy_d0: Vec<IMat>,
    pub lift: LiftData,
}

fn clause(name: &str, ok: bool) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Validation(name.to_string()))
    }
}

/// Checks every structural assumption of the fixture and precomputes
/// `O(Q)`, the walls of `D0` and `O(S_Y, D0)`.
pub fn load_setup(fx: &Fixture) -> Result<EnriquesSetup> {
    let l26 = Lattice::from_int(&fx.l26)?;
    let sx_sub = Sublattice::new(&l26, &fx.sx_in_l26)?;
    clause("S_X is primitive in L26", sx_sub.is_primitive())?;
    let sx = matrix::congruence(&fx.sx_in_l26, &fx.l26);
    let sx_lat = Lattice::from_int(&sx)?;
    clause("S_X is hyperbolic", sx_lat.signature().0 == 1)?;
    let sy2 = Sublattice::new(&sx_lat, &fx.sy2_in_sx)?;
    clause("S_Y(2) has rank 10", sy2.rank() == 10)?;
    clause("S_Y(2) is primitive in S_X", sy2.is_primitive())?;
    let es = matrix::mat_mul(&fx.sy2_in_sx, &fx.sx_in_l26);
    let frame = Frame::new(fx.l26.clone(), es)?;
    let q_in_sx = sy2.orthogonal_complement().basis;
    let q = matrix::congruence(&q_in_sx, &sx);
    let q_lat = Lattice::from_int(&q)?;
    clause("Q is negative definite", q_lat.is_negative_definite())?;
    let p_root_type = root_type(&Lattice::from_int(&frame.p_gram)?)?;
    let want = RootType::parse(&fx.expected.root_type)?;
    clause(
        &format!("root type of P is {} (found {})", fx.expected.root_type, p_root_type),
        p_root_type == want,
    )?;
    let o_q = isom::definite_orthogonal_group(&q_lat)?;
    clause(
        &format!("|O(Q)| = {} (found {})", fx.expected.oq_order, o_q.order),
        o_q.order == fx.expected.oq_order.into(),
    )?;
    clause("weyl is a Weyl vector of L26", walls::is_weyl_vector(&fx.l26, &fx.weyl)?)?;
    clause("alpha has positive norm", norm(&frame.sy, &fx.alpha) > 0)?;
    let mut walls0 = frame.induced_walls(&fx.weyl)?;
    walls0.sort();
    clause("alpha lies strictly inside D0", walls::strictly_inside(&frame.sy, &walls0, &fx.alpha))?;
    // ample: no (-2)-vector of S_X is orthogonal to pi^* alpha
    let pa = matrix::vec_mat(&matrix::vec_mat(&fx.alpha, &fx.sy2_in_sx), &sx);
    let perp_roots = affine_slice(&sx, &[pa], &[0], &matrix::rat_int(-2))?;
    clause("pi^* alpha is orthogonal to no (-2)-vector of S_X", perp_roots.is_empty())?;
    let lift = LiftData::new(&frame.sy, &fx.sy2_in_sx, &q_in_sx, &o_q.gens)?;
    let o_sy_d0 = search::chamber_symmetries(&frame.sy, &walls0, &fx.alpha)?;
    Ok(EnriquesSetup {
        name: fx.name.clone(),
        frame,
        sx_in_l26: fx.sx_in_l26.clone(),
        sx,
        sy2_in_sx: fx.sy2_in_sx.clone(),
        q_in_sx,
        q,
        p_root_type,
        alpha: fx.alpha.clone(),
        weyl: fx.weyl.clone(),
        expected: fx.expected.clone(),
        o_q,
        walls0,
        o_sy_d0,
        lift,
    })
}

impl EnriquesSetup {
    /// `pi^* y` in `S_X` coordinates.
    pub fn pull(&self, y: &[i64]) -> Vec<i64> {
        matrix::vec_mat(y, &self.sy2_in_sx)
    }

    pub fn sy_lattice(&self) -> Lattice {
        Lattice::from_int(&self.frame.sy).expect("S_Y Gram is valid")
    }

    pub fn sx_lattice(&self) -> Lattice {
        Lattice::from_int(&self.sx).expect("S_X Gram is valid")
    }
}
