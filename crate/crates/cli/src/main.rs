use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use horofano::enumerate::{self, MAX_BOX};
use horofano::instance::InstanceFile;
use horofano::report::{self, Analysis, Outcome};
use horofano::Rational;

/// Pseudo-index checks for Q-factorial horospherical Fano varieties.
#[derive(Parser)]
#[command(name = "horofano", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline on an instance file.
    Check {
        file: PathBuf,
        /// Also write the JSON report here.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Print the equality-case classification; exit 4 if there is none.
    Classify { file: PathBuf },
    /// Enumerate simplicial reflexive polytopes in a box and check each.
    EnumerateToric {
        #[arg(long, value_parser = clap::value_parser!(u8).range(2..=3))]
        dim: u8,
        #[arg(long = "box", value_parser = clap::value_parser!(i64).range(1..=MAX_BOX))]
        bound: i64,
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

const INCONSISTENT: u8 = 3;
const NOT_EQUALITY: u8 = 4;

fn load(path: &Path) -> Result<InstanceFile, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    InstanceFile::parse(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn check(file: &Path, json: Option<&Path>) -> Result<u8> {
    let instance = match load(file) {
        Ok(i) => i,
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(2);
        }
    };
    let analysis: Analysis<Rational> = report::analyze(&instance);
    print!("{}", analysis.to_text());
    if let Some(out) = json {
        write_json(out, &analysis.to_json())?;
    }
    Ok(analysis.outcome.exit_code() as u8)
}

fn classify(file: &Path) -> Result<u8> {
    let instance = match load(file) {
        Ok(i) => i,
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(2);
        }
    };
    let analysis: Analysis<Rational> = report::analyze(&instance);
    if analysis.outcome != Outcome::Verified {
        eprintln!("{}", analysis.to_text().trim_end());
        return Ok(analysis.outcome.exit_code() as u8);
    }
    let r = analysis.report.as_ref().expect("verified analyses carry a report");
    println!("{}", report::classification_line(r));
    Ok(if r.classification.is_some() { 0 } else { NOT_EQUALITY })
}

fn enumerate_toric(dim: usize, bound: i64, json: Option<&Path>) -> Result<u8> {
    let entries = enumerate::survey(dim, bound);
    println!("{:>3}  {:<6} {:<4} {:<10} vertices", "#", "iota", "rho", "(i-1)r/d");
    for (k, e) in entries.iter().enumerate() {
        let verts: Vec<String> = e
            .class
            .vertices
            .iter()
            .map(|v| format!("({})", v.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")))
            .collect();
        match &e.analysis.report {
            Some(r) => {
                let label = r.classification.as_ref().map(|c| format!("  {c}")).unwrap_or_default();
                println!(
                    "{:>3}  {:<6} {:<4} {:<10} {}{label}",
                    k + 1,
                    r.pseudo_index.value,
                    r.picard_number,
                    format!("{}/{}", r.lhs, r.dimension),
                    verts.join(" ")
                );
            }
            None => println!("{:>3}  {}: {}", k + 1, verts.join(" "), e.analysis.failure.as_deref().unwrap_or("?")),
        }
    }
    let summary = enumerate::survey_json(dim, bound, &entries);
    println!(
        "{} classes, {} equality cases, distribution of (iota, rho): {}",
        summary["classes"], summary["equality_cases"], summary["distribution"]
    );
    if let Some(out) = json {
        write_json(out, &summary)?;
    }
    let bad = summary["not_verified"].as_u64().unwrap_or(0);
    Ok(if bad == 0 { 0 } else { INCONSISTENT })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Check { file, json } => check(file, json.as_deref()),
        Command::Classify { file } => classify(file),
        Command::EnumerateToric { dim, bound, json } => enumerate_toric(*dim as usize, *bound, json.as_deref()),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
