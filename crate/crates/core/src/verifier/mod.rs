//! Replays of the lattice-theoretic case analyses that restrict the mod-2
//! characteristic polynomials of Enriques surface automorphisms. Each
//! report is a trace of computed values next to the stated ones; steps that
//! rest on results proved elsewhere are recorded as external facts with a
//! citation and never counted as verified.

mod f15;
mod f7;
mod f9;
pub mod genera;
mod headline;

use std::collections::BTreeMap;
use std::fmt::{self, Display};
use std::path::Path;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{One, Signed};
use serde::Serialize;

use crate::borcherds::{bundled_fixture_dir, load_setup, main_borcherds, BorcherdsRun, EnriquesSetup, Fixture};
use crate::cyclo::{mod2_factor_check, product_of, resultant, Mod2Check};
use crate::error::{Error, Result};
use crate::genus::{genus_symbol, prime_factors, valuation, GenusSymbol};
use crate::lattice::{standard, Lattice};
use crate::permgroup::{F2Group, F2Matrix};

pub use f15::verify_f15_exclusion;
pub use f7::{verify_f7_analysis, verify_f7_analysis_with};
pub use f9::{verify_f9_analysis, verify_f9_analysis_with};
pub use headline::{verify_headline, verify_headline_with};

/// Claim ids accepted by [`verify`].
pub const CLAIMS: [&str; 4] = ["f15", "f9", "f7", "headline"];

/// Chamber budget for the bundled Borcherds runs.
pub const RUN_BUDGET: usize = 50;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Verified,
    Refuted,
    ExternalFact,
}

impl Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Verified => "verified",
            Status::Refuted => "refuted",
            Status::ExternalFact => "external-fact",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceRow {
    /// Branch of the case analysis the step belongs to.
    pub case: String,
    pub step: String,
    pub computed: String,
    pub expected: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub citation: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub claim: String,
    pub statement: String,
    pub status: Status,
    pub trace: Vec<TraceRow>,
}

impl VerificationReport {
    pub fn mismatches(&self) -> Vec<&TraceRow> {
        self.trace.iter().filter(|r| r.status == Status::Refuted).collect()
    }

    pub fn external_facts(&self) -> Vec<&TraceRow> {
        self.trace.iter().filter(|r| r.status == Status::ExternalFact).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("claim {}: {}\nstatus: {}\n", self.claim, self.statement, self.status);
        let mut case = "";
        for r in &self.trace {
            if r.case != case {
                case = &r.case;
                out.push_str(&format!("\n  {case}\n"));
            }
            match r.status {
                Status::ExternalFact => {
                    let cite = r.citation.as_deref().unwrap_or("");
                    out.push_str(&format!("    [external] {} ({cite})\n", r.step));
                }
                Status::Verified => out.push_str(&format!("    [ok] {}: {}\n", r.step, r.computed)),
                Status::Refuted => out.push_str(&format!(
                    "    [MISMATCH] {}: computed {}, expected {}\n",
                    r.step, r.computed, r.expected
                )),
            }
        }
        out
    }
}

/// Runs one report by claim id.
pub fn verify(claim: &str) -> Result<VerificationReport> {
    match claim {
        "f15" => verify_f15_exclusion(),
        "f9" => verify_f9_analysis(),
        "f7" => verify_f7_analysis(),
        "headline" => verify_headline(),
        other => Err(Error::InvalidArgument(format!("unknown claim {other:?}; expected one of {}", CLAIMS.join(", ")))),
    }
}

pub(crate) struct Trace {
    claim: String,
    statement: String,
    case: String,
    rows: Vec<TraceRow>,
}

impl Trace {
    pub(crate) fn new(claim: &str, statement: &str) -> Self {
        Trace { claim: claim.into(), statement: statement.into(), case: String::new(), rows: Vec::new() }
    }

    pub(crate) fn case(&mut self, name: &str) {
        self.case = name.into();
    }

    /// Records a computed value; the row matches iff both render the same.
    pub(crate) fn check(&mut self, step: impl Into<String>, computed: impl Display, expected: impl Display) {
        let (computed, expected) = (computed.to_string(), expected.to_string());
        let status = if computed == expected { Status::Verified } else { Status::Refuted };
        self.rows.push(TraceRow { case: self.case.clone(), step: step.into(), computed, expected, status, citation: None });
    }

    pub(crate) fn external(&mut self, step: impl Into<String>, citation: &str) {
        self.rows.push(TraceRow {
            case: self.case.clone(),
            step: step.into(),
            computed: "not computed".into(),
            expected: "assumed".into(),
            status: Status::ExternalFact,
            citation: Some(citation.into()),
        });
    }

    pub(crate) fn finish(self) -> VerificationReport {
        let status = if self.rows.iter().any(|r| r.status == Status::Refuted) {
            Status::Refuted
        } else if self.rows.iter().all(|r| r.status == Status::ExternalFact) {
            Status::ExternalFact
        } else {
            Status::Verified
        };
        VerificationReport { claim: self.claim, statement: self.statement, status, trace: self.rows }
    }
}

/// A fixture together with its completed chamber search and the image of
/// the generators in `GL(S_Y / 2 S_Y)`.
pub struct BundledRun {
    pub setup: EnriquesSetup,
    pub run: BorcherdsRun,
    pub image: F2Group,
}

impl BundledRun {
    pub fn load(path: &Path, budget: usize) -> Result<Self> {
        let setup = load_setup(&Fixture::read(path)?)?;
        let run = main_borcherds(&setup, budget)?;
        let n = setup.frame.sy.len();
        let image = F2Group::new(n, run.gens.iter().map(F2Matrix::from_int).collect());
        Ok(BundledRun { setup, run, image })
    }
}

/// The three runs used by the reports.
pub struct Runs<'a> {
    pub f7: &'a BundledRun,
    pub rho16: &'a BundledRun,
    pub rho18: &'a BundledRun,
}

fn cached(cell: &'static OnceLock<BundledRun>, name: &str) -> Result<&'static BundledRun> {
    if let Some(r) = cell.get() {
        return Ok(r);
    }
    let r = BundledRun::load(&bundled_fixture_dir().join(format!("{name}.json")), RUN_BUDGET)?;
    let _ = cell.set(r);
    Ok(cell.get().expect("just set"))
}

impl Runs<'static> {
    /// Runs on the shipped fixtures, computed once per process.
    pub fn bundled() -> Result<Self> {
        static F7: OnceLock<BundledRun> = OnceLock::new();
        static RHO16: OnceLock<BundledRun> = OnceLock::new();
        static RHO18: OnceLock<BundledRun> = OnceLock::new();
        Ok(Runs { f7: cached(&F7, "f7")?, rho16: cached(&RHO16, "rho16")?, rho18: cached(&RHO18, "rho18")? })
    }
}

pub(crate) fn join<T: Display>(items: impl IntoIterator<Item = T>) -> String {
    let v: Vec<String> = items.into_iter().map(|x| x.to_string()).collect();
    if v.is_empty() {
        "none".into()
    } else {
        v.join(", ")
    }
}

/// `2^8 · 5^2` style factorization of `|n|`.
pub(crate) fn factored(n: &BigInt) -> String {
    let n = n.abs();
    if n.is_one() {
        return "1".into();
    }
    let mut ps = prime_factors(&n);
    ps.sort();
    ps.dedup();
    let parts: Vec<String> = ps
        .into_iter()
        .map(|p| match valuation(&n, p) {
            1 => p.to_string(),
            e => format!("{p}^{e}"),
        })
        .collect();
    parts.join(" · ")
}

/// `Φ15 Φ3 Φ1^2` for a multiset of cyclotomic indices.
pub(crate) fn phi_product(ms: &[u64]) -> String {
    let mut counts: BTreeMap<u64, usize> = BTreeMap::new();
    for &m in ms {
        *counts.entry(m).or_default() += 1;
    }
    let parts: Vec<String> = counts
        .iter()
        .rev()
        .map(|(m, &e)| if e == 1 { format!("Φ{m}") } else { format!("Φ{m}^{e}") })
        .collect();
    parts.join(" ")
}

/// `F9 F3 F1^4` for the reduction of a product of cyclotomic polynomials.
pub(crate) fn mod2_product(ms: &[u64]) -> String {
    match mod2_factor_check(&product_of(ms)) {
        Mod2Check::Product(exps) => {
            let parts: Vec<String> = exps
                .iter()
                .rev()
                .map(|(k, &e)| if e == 1 { format!("F{k}") } else { format!("F{k}^{e}") })
                .collect();
            parts.join(" ")
        }
        Mod2Check::Refused { offending } => format!("contains {offending}"),
    }
}

pub(crate) fn res(a: &[u64], b: &[u64]) -> BigInt {
    resultant(&product_of(a), &product_of(b)).abs()
}

pub(crate) fn sym(s: &str) -> Result<GenusSymbol> {
    let g: GenusSymbol = s.parse()?;
    g.check_consistency()?;
    Ok(g)
}

pub(crate) fn det_of(l: &Lattice) -> BigInt {
    l.determinant().to_integer()
}

/// `N = U ⊕ U(2) ⊕ E8(-2)`, the anti-invariant part of the K3 lattice
/// under the Enriques involution.
pub(crate) fn n_lattice() -> Lattice {
    let u = standard::hyperbolic_plane();
    standard::sum(&[u.clone(), standard::scaled(&u, 2), standard::scaled(&standard::e(8), -2)])
}

/// First sublattice found in `target` among the candidates `(ambient, p, k)`.
pub(crate) fn definite_rep(target: &GenusSymbol, ambients: &[(Lattice, i64, usize)]) -> Result<Lattice> {
    for (amb, p, k) in ambients {
        if let Some(l) = genera::sublattice_in_genus(amb, *p, *k, target)? {
            return Ok(l);
        }
    }
    Err(Error::Validation(format!("no representative found for {target}")))
}

/// A lattice `U(2) ⊕ B` with `B` binary of signature `(1,1)` lying in the
/// given genus of signature `(2,2)`.
pub(crate) fn rank4_rep(target: &GenusSymbol) -> Result<Lattice> {
    let u2 = standard::scaled(&standard::hyperbolic_plane(), 2);
    for a in -4i64..=4 {
        for b in 0i64..=8 {
            for c in -4i64..=4 {
                if 4 * a * c - b * b >= 0 {
                    continue;
                }
                let l = u2.direct_sum(&Lattice::from_int(&[vec![2 * a, b], vec![b, 2 * c]])?);
                if genus_symbol(&l).ok().as_ref() == Some(target) {
                    return Ok(l);
                }
            }
        }
    }
    Err(Error::Validation(format!("no representative found for {target}")))
}
