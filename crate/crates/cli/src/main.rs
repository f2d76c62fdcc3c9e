mod names;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::thread;

use clap::{Args, Parser, Subcommand, ValueEnum};
use enriques_core::borcherds::build::{build_seeded, seed_for, Kind};
use enriques_core::borcherds::{borcherds_search, bundled_fixture_dir, load_setup, BorcherdsRun, Fixture};
use enriques_core::cyclo::euler_phi;
use enriques_core::genus::genus_symbol;
use enriques_core::permgroup::{F2Group, F2Matrix};
use enriques_core::phi::{enumerate_phi_lattices, principal_phi_lattice, PhiConstraints};
use enriques_core::verifier::{self, Runs, Status, VerificationReport, CLAIMS, RUN_BUDGET};
use enriques_core::{Error, Lattice};
use serde_json::{json, Value};

const EXIT_REFUTED: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_BUDGET: u8 = 3;

#[derive(Parser)]
#[command(name = "enriques", version, about = "Lattice computations for automorphisms of Enriques surfaces")]
struct Cli {
    #[command(flatten)]
    config: Config,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Config {
    /// Directory holding fixture files.
    #[arg(long, global = true, env = "ENRIQUES_FIXTURE_DIR")]
    fixture_dir: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Maximal number of chamber representatives in a Borcherds run.
    #[arg(long, global = true, default_value_t = RUN_BUDGET, value_parser = positive)]
    budget: usize,
    /// Worker threads for `verify all`.
    #[arg(long, global = true, env = "ENRIQUES_THREADS", default_value_t = 1, value_parser = positive)]
    threads: usize,
    /// Seed for randomized searches (fixture construction, element sampling).
    #[arg(long, global = true, env = "ENRIQUES_SEED")]
    seed: Option<u64>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Genus symbol of a lattice given as {"gram": [[...], ...]}.
    Genus { file: PathBuf },
    /// Twists of the principal Φn-lattice meeting the constraints.
    Phi(PhiArgs),
    /// Chamber search on a fixture (name or path).
    Borcherds {
        fixture: String,
        /// Also write the report to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Replay a case analysis: f15, f9, f7, headline or all.
    Verify { claim: String },
    /// Construct a fixture (f7, rho16, rho18) and write it as JSON.
    Fixture {
        kind: String,
        #[arg(long, default_value_t = 0)]
        q_choice: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct PhiArgs {
    #[arg(long)]
    n: u64,
    /// Expected rank; must equal φ(n).
    #[arg(long)]
    rank: Option<u64>,
    /// Allowed signature `s+,s-`; repeatable.
    #[arg(long = "sig", value_parser = parse_sig)]
    sigs: Vec<(usize, usize)>,
    /// |det| must divide this (default 2^φ(n) · 9 · |det L0|).
    #[arg(long)]
    det: Option<u64>,
    #[arg(long)]
    n2_min: Option<usize>,
    #[arg(long)]
    n2_max: Option<usize>,
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be positive".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

fn parse_sig(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or("expected s+,s-")?;
    Ok((a.trim().parse().map_err(|_| "bad s+")?, b.trim().parse().map_err(|_| "bad s-")?))
}

enum Failure {
    Input(String),
    Budget(String, Value),
    Refuted(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Budget(m) => Failure::Budget(m, Value::Null),
            e => Failure::Input(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = match &cli.command {
        Command::Genus { file } => cmd_genus(&cli.config, file),
        Command::Phi(a) => cmd_phi(&cli.config, a),
        Command::Borcherds { fixture, out } => cmd_borcherds(&cli.config, fixture, out.as_deref()),
        Command::Verify { claim } => cmd_verify(&cli.config, claim),
        Command::Fixture { kind, q_choice, out } => cmd_fixture(&cli.config, kind, *q_choice, out.as_deref()),
    };
    match out {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(Failure::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_INPUT)
        }
        Err(Failure::Budget(m, partial)) => {
            if !partial.is_null() {
                println!("{}", serde_json::to_string_pretty(&partial).expect("json"));
            }
            eprintln!("error: budget exhausted: {m}");
            ExitCode::from(EXIT_BUDGET)
        }
        Err(Failure::Refuted(text)) => {
            print!("{text}");
            eprintln!("error: claim refuted");
            ExitCode::from(EXIT_REFUTED)
        }
    }
}

fn render(cfg: &Config, v: &Value, text: String) -> String {
    match cfg.format {
        Format::Json => format!("{}\n", serde_json::to_string_pretty(v).expect("json")),
        Format::Text => text,
    }
}

fn read_lattice(path: &Path) -> Result<Lattice, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    Ok(Lattice::from_json(&v)?)
}

fn cmd_genus(cfg: &Config, file: &Path) -> Result<String, Failure> {
    let l = read_lattice(file)?;
    let g = genus_symbol(&l)?;
    Ok(render(cfg, &json!({ "genus": g.to_string() }), format!("{g}\n")))
}

fn cmd_phi(cfg: &Config, a: &PhiArgs) -> Result<String, Failure> {
    if a.n <= 2 {
        return Err(Failure::Input("n > 2 required".into()));
    }
    let deg = euler_phi(a.n);
    if let Some(r) = a.rank {
        if r != deg {
            return Err(Failure::Input(format!("Φ{}-lattices have rank {deg}, not {r}", a.n)));
        }
    }
    let det0 = principal_phi_lattice(a.n)?.lattice.determinant().to_integer();
    let det = match a.det {
        Some(d) => d.into(),
        None => (num_bigint::BigInt::from(1u64 << deg) * 9u32 * det0).magnitude().clone().into(),
    };
    let window = match (a.n2_min, a.n2_max) {
        (None, None) => None,
        (lo, hi) => Some((lo.unwrap_or(0), hi.unwrap_or(deg as usize))),
    };
    let c = PhiConstraints { det_divisor: det, signatures: a.sigs.clone(), n2_window: window };
    let classes = enumerate_phi_lattices(a.n, &c)?;
    let mut rows = Vec::new();
    let mut text = String::new();
    for cl in &classes {
        let name = names::recognize(&cl.phi.lattice)?;
        let label = name.clone().unwrap_or_else(|| cl.genus.to_string());
        text.push_str(&format!("{label}\t{}\ttwist {:?}\n", cl.genus, cl.phi.twist));
        rows.push(json!({
            "name": name,
            "genus": cl.genus.to_string(),
            "twist": cl.phi.twist,
            "genus_level_only": cl.genus_level_only,
            "gram": cl.phi.lattice.to_json()["gram"],
        }));
    }
    text.push_str(&format!("{} class(es)\n", classes.len()));
    Ok(render(cfg, &json!({ "n": a.n, "classes": rows }), text))
}

fn fixture_path(cfg: &Config, name: &str) -> PathBuf {
    let p = PathBuf::from(name);
    if p.is_file() {
        return p;
    }
    cfg.fixture_dir.clone().unwrap_or_else(bundled_fixture_dir).join(format!("{name}.json"))
}

fn run_json(name: &str, run: &BorcherdsRun, image_order: &str, complete: bool) -> Value {
    let profiles: Vec<Value> = run
        .chamber_profiles()
        .iter()
        .map(|(s, o, i)| json!({ "stabilizer_order": s, "outer_walls": o, "inner_walls": i }))
        .collect();
    json!({
        "fixture": name,
        "complete": complete,
        "R_count": run.reps.len(),
        "processed": run.stabilizers.len(),
        "chambers": profiles,
        "wall_orbits": run.orbits,
        "generators": run.gens,
        "mod2_image_order": image_order,
    })
}

fn cmd_borcherds(cfg: &Config, fixture: &str, out: Option<&Path>) -> Result<String, Failure> {
    let fx = Fixture::read(&fixture_path(cfg, fixture))?;
    let setup = load_setup(&fx)?;
    let (run, status) = borcherds_search(&setup, cfg.budget);
    let n = setup.frame.sy.len();
    let image = F2Group::new(n, run.gens.iter().map(F2Matrix::from_int).collect());
    let v = run_json(&fx.name, &run, &image.order().to_string(), status.is_ok());
    if let Some(path) = out {
        std::fs::write(path, serde_json::to_string_pretty(&v).expect("json"))
            .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    }
    match status {
        Ok(()) => {}
        Err(Error::Budget(m)) => return Err(Failure::Budget(m, v)),
        Err(e) => return Err(e.into()),
    }
    let mut text = format!("fixture {}\nR_count {}\n", fx.name, run.reps.len());
    for (k, (s, o, i)) in run.chamber_profiles().iter().enumerate() {
        let sizes: Vec<String> = run.orbits[k].iter().map(|w| format!("{}{}", w.size, if w.outer { "o" } else { "i" })).collect();
        text.push_str(&format!("D{k}: stabilizer {s}, outer walls {o}, inner walls {i}, orbits [{}]\n", sizes.join(" ")));
    }
    text.push_str(&format!("generators {}\nmod-2 image order {}\n", run.gens.len(), image.order()));
    if let Some(seed) = cfg.seed {
        let orders: std::collections::BTreeSet<u64> = image.random_elements(200, seed).iter().map(F2Matrix::order).collect();
        let shown: Vec<String> = orders.iter().map(u64::to_string).collect();
        text.push_str(&format!("sampled element orders {}\n", shown.join(" ")));
    }
    Ok(render(cfg, &v, text))
}

fn cmd_verify(cfg: &Config, claim: &str) -> Result<String, Failure> {
    let claims: Vec<&str> = if claim == "all" {
        CLAIMS.to_vec()
    } else if CLAIMS.contains(&claim) {
        vec![claim]
    } else {
        return Err(Failure::Input(format!("unknown claim {claim:?}; expected one of {}, all", CLAIMS.join(", "))));
    };
    // share one set of chamber searches between the reports
    if claims.iter().any(|c| *c != "f15") {
        Runs::bundled()?;
    }
    let mut reports: Vec<Option<VerificationReport>> = vec![None; claims.len()];
    let mut first_err = None;
    for chunk in claims.iter().zip(reports.iter_mut()).collect::<Vec<_>>().chunks_mut(cfg.threads) {
        let results: Vec<_> = thread::scope(|s| {
            let handles: Vec<_> = chunk.iter().map(|(c, _)| s.spawn(move || verifier::verify(c))).collect();
            handles.into_iter().map(|h| h.join().expect("verifier thread panicked")).collect()
        });
        for ((_, slot), r) in chunk.iter_mut().zip(results) {
            match r {
                Ok(rep) => **slot = Some(rep),
                Err(e) => first_err = first_err.or(Some(e)),
            }
        }
    }
    if let Some(e) = first_err {
        return Err(e.into());
    }
    let reports: Vec<VerificationReport> = reports.into_iter().flatten().collect();
    let text = match cfg.format {
        Format::Json if reports.len() == 1 => format!("{}\n", reports[0].to_json()),
        Format::Json => {
            let parts: Vec<String> = reports.iter().map(|r| r.to_json()).collect();
            format!("[\n{}\n]\n", parts.join(",\n"))
        }
        Format::Text => reports.iter().map(|r| r.to_text()).collect::<Vec<_>>().join("\n"),
    };
    if reports.iter().any(|r| r.status == Status::Refuted) {
        return Err(Failure::Refuted(text));
    }
    Ok(text)
}

fn cmd_fixture(cfg: &Config, kind: &str, q_choice: usize, out: Option<&Path>) -> Result<String, Failure> {
    let kind = Kind::parse(kind)?;
    let built = build_seeded(kind, q_choice, cfg.seed.unwrap_or_else(|| seed_for(kind)))?;
    let fx = Fixture::from_built(&built);
    let path = out
        .map(Path::to_path_buf)
        .unwrap_or_else(|| cfg.fixture_dir.clone().unwrap_or_else(|| PathBuf::from(".")).join(format!("{}.json", kind.name())));
    std::fs::write(&path, fx.to_json()).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let v = json!({ "fixture": kind.name(), "path": path.display().to_string() });
    Ok(render(cfg, &v, format!("wrote {}\n", path.display())))
}
