//! `credal`: inspect credal sets of lower-prevision assessments.
//!
//! Subcommands: `check` (sure loss / coherence), `extremes` (vertex
//! enumeration), `maxdist` (worst-case distance between coherent
//! extensions) and `bench` (random-instance benchmark).
//!
//! Exit codes: 0 ok/coherent, 1 incoherent but avoiding sure loss,
//! 2 sure loss, 64 usage or parse error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use credal::bench::run_benchmark_with;
use credal::extension::check;
use credal::io::{parse_assessment, AssessmentDoc};
use credal::maxdist::{maximal_distance_on, prepare, MaxDistOptions};
use credal::polytope::CredalSet;
use credal::{Error as CredalError, Tolerances};

const EXIT_OK: u8 = 0;
const EXIT_INCOHERENT: u8 = 1;
const EXIT_SURE_LOSS: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(
    name = "credal",
    version,
    about = "Credal sets of lower previsions: vertices, coherence and worst-case extension distances"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, ValueEnum)]
enum Format {
    #[default]
    Text,
    Records,
}

#[derive(Subcommand)]
enum Command {
    /// Check an assessment for sure loss and coherence.
    Check {
        /// Assessment document (JSON).
        path: PathBuf,
        /// Tolerate unknown keys in the document.
        #[arg(long)]
        lenient: bool,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Enumerate the extreme points of the credal set.
    Extremes {
        path: PathBuf,
        #[arg(long)]
        lenient: bool,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Worst-case normed distance between coherent extensions.
    Maxdist {
        path: PathBuf,
        /// Constraint-tightness tolerance override.
        #[arg(long)]
        tolerance: Option<f64>,
        /// Disable dominance pruning (the result must be identical).
        #[arg(long = "no-filter")]
        no_filter: bool,
        /// Worker count for the vertex loop.
        #[arg(long, default_value_t = 1)]
        threads: usize,
        /// Also print the witness vertex, face and gamble.
        #[arg(long)]
        witness: bool,
        #[arg(long)]
        lenient: bool,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Benchmark random coherent lower probabilities.
    Bench {
        /// Sample-space sizes, comma separated (each in 2..=8).
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(usize))]
        trials: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let code = match cli.command {
        Command::Check {
            path,
            lenient,
            format,
        } => cmd_check(&path, lenient, format),
        Command::Extremes {
            path,
            lenient,
            format,
        } => cmd_extremes(&path, lenient, format),
        Command::Maxdist {
            path,
            tolerance,
            no_filter,
            threads,
            witness,
            lenient,
            format,
        } => cmd_maxdist(&path, tolerance, no_filter, threads, witness, lenient, format),
        Command::Bench {
            sizes,
            trials,
            seed,
            format,
        } => cmd_bench(&sizes, trials, seed, format),
    };
    ExitCode::from(code)
}

/// Six decimals everywhere; records carry the same rounded values so both
/// modes report identical numbers. Negative zero is normalized away.
fn r6(x: f64) -> f64 {
    (x * 1e6).round() / 1e6 + 0.0
}

fn fmt6(x: f64) -> String {
    format!("{:.6}", r6(x))
}

fn fmt_vec(values: &[f64]) -> String {
    values
        .iter()
        .map(|&v| fmt6(v))
        .collect::<Vec<_>>()
        .join(" ")
}

fn load(path: &PathBuf, lenient: bool) -> Result<(AssessmentDoc, credal::Assessment), String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    parse_assessment(&text, !lenient).map_err(|e| e.to_string())
}

fn cmd_check(path: &PathBuf, lenient: bool, format: Format) -> u8 {
    let (doc, assessment) = match load(path, lenient) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let report = check(&assessment, &Tolerances::DEFAULT);
    match format {
        Format::Text => {
            println!(
                "avoids sure loss: {}",
                if report.avoids_sure_loss { "yes" } else { "no" }
            );
            println!("coherent: {}", if report.coherent { "yes" } else { "no" });
            for (i, s) in report.slack_per_item.iter().enumerate() {
                println!("slack {}: {}", doc.gamble_name(i), fmt6(*s));
            }
        }
        Format::Records => {
            let rec = json!({
                "type": "check",
                "avoids_sure_loss": report.avoids_sure_loss,
                "coherent": report.coherent,
                "slacks": report.slack_per_item.iter().map(|&s| r6(s)).collect::<Vec<_>>(),
            });
            println!("{rec}");
        }
    }
    if !report.avoids_sure_loss {
        EXIT_SURE_LOSS
    } else if !report.coherent {
        EXIT_INCOHERENT
    } else {
        EXIT_OK
    }
}

fn cmd_extremes(path: &PathBuf, lenient: bool, format: Format) -> u8 {
    let (_, assessment) = match load(path, lenient) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let cs = CredalSet::from_assessment(&assessment, &Tolerances::DEFAULT);
    if cs.is_empty() {
        match format {
            Format::Text => println!("EMPTY"),
            Format::Records => println!("{}", json!({"type": "extremes", "empty": true})),
        }
        return EXIT_SURE_LOSS;
    }
    let order = cs.sorted_vertex_order();
    match format {
        Format::Text => {
            for (rank, &j) in order.iter().enumerate() {
                println!("E{} {}", rank + 1, fmt_vec(cs.vertices()[j].mass()));
            }
        }
        Format::Records => {
            for (rank, &j) in order.iter().enumerate() {
                let rec = json!({
                    "type": "vertex",
                    "index": rank,
                    "mass": cs.vertices()[j].mass().iter().map(|&v| r6(v)).collect::<Vec<_>>(),
                });
                println!("{rec}");
            }
        }
    }
    EXIT_OK
}

fn credal_error_exit(e: &CredalError) -> u8 {
    match e {
        CredalError::SureLoss => EXIT_SURE_LOSS,
        _ => EXIT_USAGE,
    }
}

fn cmd_maxdist(
    path: &PathBuf,
    tolerance: Option<f64>,
    no_filter: bool,
    threads: usize,
    witness: bool,
    lenient: bool,
    format: Format,
) -> u8 {
    let (doc, assessment) = match load(path, lenient) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let tol = match tolerance {
        Some(t) if t > 0.0 && t.is_finite() => Tolerances::with_tight(t),
        Some(t) => {
            eprintln!("error: --tolerance must be positive and finite, got {t}");
            return EXIT_USAGE;
        }
        None => Tolerances::DEFAULT,
    };
    let opts = MaxDistOptions {
        tol,
        filter_dominance: !no_filter,
        threads,
    };
    let prepared = match prepare(&assessment, &tol) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return credal_error_exit(&e);
        }
    };
    if prepared.corrected {
        eprintln!(
            "warning: assessment is not coherent; lower values were replaced by their natural extension"
        );
    }
    let report = match maximal_distance_on(&prepared, &opts) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return credal_error_exit(&e);
        }
    };
    match format {
        Format::Text => {
            println!("max distance: {}", fmt6(report.max_distance));
            println!("qp calls: {}", report.counters.qp_calls);
            println!("distances needed: {}", report.counters.distances_needed);
            println!("dominance skips: {}", report.counters.dominance_skips);
            if witness {
                match &report.witness {
                    Some(w) => {
                        let cs = &prepared.credal;
                        println!("witness vertex: {}", fmt_vec(cs.vertices()[w.vertex].mass()));
                        println!("witness face: {}", face_name(&doc, cs, w.face_row));
                        println!(
                            "witness far vertex: {}",
                            fmt_vec(cs.vertices()[w.far_vertex].mass())
                        );
                        println!("witness gamble: {}", fmt_vec(w.gamble.values()));
                    }
                    None => println!("witness: none (distance is zero)"),
                }
            }
        }
        Format::Records => {
            let witness_rec = report.witness.as_ref().map(|w| {
                json!({
                    "vertex": w.vertex,
                    "vertex_mass": prepared.credal.vertices()[w.vertex].mass().iter().map(|&v| r6(v)).collect::<Vec<_>>(),
                    "face": face_name(&doc, &prepared.credal, w.face_row),
                    "far_vertex": w.far_vertex,
                    "far_vertex_mass": prepared.credal.vertices()[w.far_vertex].mass().iter().map(|&v| r6(v)).collect::<Vec<_>>(),
                    "gamble": w.gamble.values().iter().map(|&v| r6(v)).collect::<Vec<_>>(),
                })
            });
            let rec = json!({
                "type": "maxdist",
                "max_distance": r6(report.max_distance),
                "qp_calls": report.counters.qp_calls,
                "distances_needed": report.counters.distances_needed,
                "dominance_skips": report.counters.dominance_skips,
                "corrected": report.corrected,
                "witness": witness_rec,
            });
            println!("{rec}");
        }
    }
    if report.corrected {
        EXIT_INCOHERENT
    } else {
        EXIT_OK
    }
}

/// Human name of the face's constraint row: the gamble label for assessed
/// rows, the state name for coordinate rows.
fn face_name(doc: &AssessmentDoc, cs: &CredalSet, row: usize) -> String {
    let originals = cs.original_rows();
    if let Some(pos) = originals.iter().position(|&r| r == row) {
        doc.gamble_name(pos)
    } else {
        format!("non-negativity row {row}")
    }
}

fn cmd_bench(sizes: &[usize], trials: usize, seed: u64, format: Format) -> u8 {
    if trials == 0 {
        eprintln!("error: --trials must be >= 1");
        return EXIT_USAGE;
    }
    if sizes.iter().any(|&s| !(2..=8).contains(&s)) {
        eprintln!("error: every size must be between 2 and 8");
        return EXIT_USAGE;
    }
    let stats = match run_benchmark_with(sizes, trials, seed, &MaxDistOptions::default()) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    match format {
        Format::Text => {
            println!(
                "{:>4} {:>7} {:>14} {:>14} {:>14} {:>9}",
                "size", "trials", "avg_vertices", "avg_qp_calls", "avg_needed", "ratio"
            );
            for st in &stats {
                println!(
                    "{:>4} {:>7} {:>14.6} {:>14.6} {:>14.6} {:>8.2}%",
                    st.space_size,
                    st.trials,
                    st.avg_vertices,
                    st.avg_qp_calls,
                    st.avg_distances_needed,
                    st.ratio * 100.0
                );
            }
        }
        Format::Records => {
            for st in &stats {
                let rec = json!({
                    "type": "bench",
                    "size": st.space_size,
                    "trials": st.trials,
                    "avg_vertices": r6(st.avg_vertices),
                    "avg_qp_calls": r6(st.avg_qp_calls),
                    "avg_distances_needed": r6(st.avg_distances_needed),
                    "ratio": r6(st.ratio),
                });
                println!("{rec}");
            }
        }
    }
    EXIT_OK
}
