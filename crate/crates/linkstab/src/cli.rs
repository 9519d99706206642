//! Command-line front end.
//!
//! Six commands over a shared `-f <file>` input: `eval`, `entropy`,
//! `ghz`, `check-stabilizer`, `tableau`, and the file-free `verlinde`.
//! The file kind (manifold or network) is detected from its statement
//! keywords. `--json` switches every command to a JSON object with
//! sorted keys, so output is byte-stable for a fixed input.
//!
//! Exit status: 0 on success, 2 when the input presentation is
//! ill-defined (it annihilates every state), 1 on usage and parse
//! errors.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::cyclo::CycScalar;
use crate::doc::{self, DocKind};
use crate::entanglement::{self, EntropyValue};
use crate::error::{Error, Result};
use crate::so3;
use crate::stabilizer::{self, StabilizerTableau};
use crate::state::DenseState;
use crate::surgery::{self, SurgeryPresentation};
use crate::tensornet::TensorNetwork;

#[derive(Parser)]
#[command(name = "linkstab", version, about = "Exact states, tableaux, and entanglement from manifold and network files")]
struct Cli {
    #[command(flatten)]
    common: Common,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Manifold or network description file.
    #[arg(short = 'f', long = "file", global = true, value_name = "FILE")]
    file: Option<PathBuf>,

    /// Emit a JSON object instead of text.
    #[arg(long, global = true)]
    json: bool,

    /// Flip the sign of the surgery exponent.
    #[arg(long = "sign-flip", global = true)]
    sign_flip: bool,

    /// Random seed, reserved for property sweeps; current commands are
    /// deterministic and ignore it.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the file to a state and print its amplitudes.
    Eval,
    /// Entanglement entropy of a region of the evaluated state.
    Entropy {
        /// Comma-separated site names.
        #[arg(long, value_delimiter = ',', required = true, value_name = "SITES")]
        region: Vec<String>,
    },
    /// GHZ count of a tripartition of the evaluated state.
    Ghz {
        /// Comma-separated site names of the first region.
        #[arg(long = "A", value_delimiter = ',', required = true, value_name = "SITES")]
        a: Vec<String>,
        /// Comma-separated site names of the second region.
        #[arg(long = "B", value_delimiter = ',', required = true, value_name = "SITES")]
        b: Vec<String>,
        /// Comma-separated site names of the third region.
        #[arg(long = "C", value_delimiter = ',', required = true, value_name = "SITES")]
        c: Vec<String>,
    },
    /// Decide whether the evaluated state is a stabilizer state.
    CheckStabilizer,
    /// Print a stabilizer tableau for the file.
    Tableau,
    /// Verlinde dimension of the genus-g space at odd prime r.
    Verlinde {
        #[arg(long)]
        r: u64,
        #[arg(long)]
        genus: u64,
    },
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = i32::from(e.use_stderr());
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(output) => {
            print!("{output}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(e, Error::IllDefined(_)) {
                2
            } else {
                1
            }
        }
    }
}

fn dispatch(cli: &Cli) -> Result<String> {
    match &cli.command {
        Command::Eval => eval_cmd(&cli.common),
        Command::Entropy { region } => entropy_cmd(&cli.common, region),
        Command::Ghz { a, b, c } => ghz_cmd(&cli.common, a, b, c),
        Command::CheckStabilizer => check_cmd(&cli.common),
        Command::Tableau => tableau_cmd(&cli.common),
        Command::Verlinde { r, genus } => verlinde_cmd(&cli.common, *r, *genus),
    }
}

enum Doc {
    Manifold(SurgeryPresentation),
    Network(TensorNetwork),
}

fn load(common: &Common) -> Result<Doc> {
    let Some(path) = &common.file else {
        return Err(Error::Usage(
            "-f/--file is required for this command".into(),
        ));
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Usage(format!("--file {}: {e}", path.display())))?;
    Ok(match doc::sniff(&text) {
        DocKind::Manifold => Doc::Manifold(doc::parse_manifold(&text)?),
        DocKind::Network => Doc::Network(doc::parse_network(&text)?),
    })
}

/// Evaluates the document. A manifold whose amplitudes all vanish is
/// rejected here; a network is allowed to contract to zero and the
/// commands that cannot use a zero state reject it themselves.
fn state_of(d: &Doc, sign_flip: bool) -> Result<DenseState> {
    match d {
        Doc::Manifold(p) => {
            let s = surgery::state_from_presentation(p, sign_flip)?;
            if s.is_zero() {
                return Err(Error::IllDefined(
                    "surgery sums annihilate every boundary amplitude".into(),
                ));
            }
            Ok(s)
        }
        Doc::Network(t) => t.contract(),
    }
}

fn nonzero_state(d: &Doc, sign_flip: bool) -> Result<DenseState> {
    let s = state_of(d, sign_flip)?;
    if s.is_zero() {
        return Err(Error::IllDefined("the network contracts to zero".into()));
    }
    Ok(s)
}

fn json_line(v: serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(&v).expect("JSON rendering cannot fail");
    s.push('\n');
    s
}

fn amp_json(values: &[u64], a: &CycScalar) -> serde_json::Value {
    let z = a.to_complex();
    json!({
        "values": values,
        "coeffs": a.coeffs(),
        "kden": a.kden(),
        "re": z.re,
        "im": z.im,
    })
}

fn entropy_json(s: &EntropyValue) -> serde_json::Value {
    json!({
        "dits": s.dits,
        "nats": s.nats,
        "exact_dits": s.exact_dits,
    })
}

fn entropy_text(s: &EntropyValue) -> String {
    match s.exact_dits {
        Some(1) => format!("1 dit = {} nats", s.nats),
        Some(t) => format!("{t} dits = {} nats", s.nats),
        None => format!("{} dits = {} nats", s.dits, s.nats),
    }
}

fn site_names(state: &DenseState) -> Vec<String> {
    state.sites().iter().map(|s| s.name.clone()).collect()
}

fn to_refs(names: &[String]) -> Vec<&str> {
    names.iter().map(String::as_str).collect()
}

fn eval_cmd(common: &Common) -> Result<String> {
    let state = state_of(&load(common)?, common.sign_flip)?;
    let k = state.level().k();
    let names = site_names(&state);
    if common.json {
        let amps: Vec<serde_json::Value> = state
            .amps()
            .iter()
            .enumerate()
            .filter(|(_, a)| !a.is_zero())
            .map(|(i, a)| amp_json(&state.values_at(i), a))
            .collect();
        return Ok(json_line(json!({
            "level": k,
            "sites": names,
            "amplitudes": amps,
        })));
    }
    let mut out = String::new();
    writeln!(out, "level {k}").unwrap();
    if !names.is_empty() {
        writeln!(out, "sites {}", names.join(" ")).unwrap();
    }
    let mut nonzero = 0usize;
    for (i, a) in state.amps().iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        nonzero += 1;
        let values: Vec<String> = state
            .values_at(i)
            .iter()
            .map(u64::to_string)
            .collect();
        let z = a.to_complex();
        writeln!(out, "|{}> = {a}  ({}, {})", values.join(" "), z.re, z.im).unwrap();
    }
    if nonzero == 0 {
        writeln!(out, "all amplitudes are zero").unwrap();
    }
    Ok(out)
}

fn entropy_cmd(common: &Common, region: &[String]) -> Result<String> {
    let state = nonzero_state(&load(common)?, common.sign_flip)?;
    let s = entanglement::flat_entropy(&state, &to_refs(region))?;
    if common.json {
        return Ok(json_line(json!({
            "region": region,
            "entropy": entropy_json(&s),
        })));
    }
    Ok(format!("S({}) = {}\n", region.join(","), entropy_text(&s)))
}

fn ghz_cmd(common: &Common, a: &[String], b: &[String], c: &[String]) -> Result<String> {
    let state = nonzero_state(&load(common)?, common.sign_flip)?;
    let g = entanglement::ghz_count(&state, &to_refs(a), &to_refs(b), &to_refs(c))?;
    let sa = entanglement::flat_entropy(&state, &to_refs(a))?;
    let sb = entanglement::flat_entropy(&state, &to_refs(b))?;
    let sc = entanglement::flat_entropy(&state, &to_refs(c))?;
    if common.json {
        return Ok(json_line(json!({
            "g": g,
            "regions": { "A": a, "B": b, "C": c },
            "entropies": {
                "A": entropy_json(&sa),
                "B": entropy_json(&sb),
                "C": entropy_json(&sc),
            },
        })));
    }
    let mut out = String::new();
    writeln!(out, "S(A) = {}", entropy_text(&sa)).unwrap();
    writeln!(out, "S(B) = {}", entropy_text(&sb)).unwrap();
    writeln!(out, "S(C) = {}", entropy_text(&sc)).unwrap();
    writeln!(out, "g = {g}").unwrap();
    Ok(out)
}

fn check_cmd(common: &Common) -> Result<String> {
    let state = nonzero_state(&load(common)?, common.sign_flip)?;
    let verdict = stabilizer::is_stabilizer(&state)?;
    let proven = stabilizer::hudson_converse_proven(state.level());
    if common.json {
        return Ok(json_line(json!({
            "level": state.level().k(),
            "stabilizer": verdict,
            "hudson_converse_proven": proven,
        })));
    }
    Ok(format!(
        "stabilizer: {}\nhudson converse proven at this level: {}\n",
        if verdict { "yes" } else { "no" },
        if proven { "yes" } else { "no" },
    ))
}

fn tableau_cmd(common: &Common) -> Result<String> {
    let d = load(common)?;
    let (tab, names): (StabilizerTableau, Vec<String>) = match &d {
        Doc::Manifold(p) => {
            let tab = surgery::tableau_from_presentation(p, common.sign_flip)?;
            let names = p.boundary_sites().iter().map(|s| s.to_string()).collect();
            (tab, names)
        }
        Doc::Network(_) => {
            let state = nonzero_state(&d, common.sign_flip)?;
            (stabilizer::stabilizer_group_search(&state)?, site_names(&state))
        }
    };
    if common.json {
        let gens: Vec<serde_json::Value> = tab
            .generators()
            .iter()
            .map(|g| {
                json!({
                    "phase": g.phase(),
                    "x": g.x_exp(),
                    "z": g.z_exp(),
                })
            })
            .collect();
        return Ok(json_line(json!({
            "level": tab.level().k(),
            "sites": names,
            "generators": gens,
        })));
    }
    let mut out = String::new();
    writeln!(out, "level {}", tab.level().k()).unwrap();
    writeln!(out, "sites {}", names.join(" ")).unwrap();
    out.push_str(&tab.to_text());
    Ok(out)
}

fn verlinde_cmd(common: &Common, r: u64, genus: u64) -> Result<String> {
    let table = so3::fusion_rules(r)?;
    let dim = so3::verlinde_dim(r, genus)?;
    let inequality = so3::dimension_inequality(r)?;
    let anyons = table.anyon_count();
    if common.json {
        return Ok(json_line(json!({
            "r": r,
            "genus": genus,
            "anyons": anyons,
            "dim": dim,
            "inequality": inequality,
        })));
    }
    let mut out = String::new();
    writeln!(out, "r = {r}").unwrap();
    writeln!(out, "anyons = {anyons}").unwrap();
    writeln!(out, "genus = {genus}").unwrap();
    writeln!(out, "dim = {dim}").unwrap();
    writeln!(
        out,
        "anyons^2 <= genus-2 dim: {}",
        if inequality { "yes" } else { "no" }
    )
    .unwrap();
    Ok(out)
}
