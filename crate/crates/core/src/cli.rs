//! Command-line front end. [`run`] does all the work and returns the exit code with
//! the text to print, so the binary is a thin wrapper and tests can call it directly.

use std::fmt::Write as _;
use std::path::Path;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::bundle_file::parse_bundle;
use crate::bundles::{decompose_bundle, end_summary, hom_bundle, verify_suite, HomogeneousBundle, Suite};
use crate::catalog::{atlas_csv, atlas_json, classify_small_rank, enumerate_g1, CatalogEntry};
use crate::error::Error;
use crate::field::Field;
use crate::hom_algebra::{is_indecomposable, DEFAULT_SEED};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "hvb",
    version,
    about = "Homogeneous vector bundles on abelian varieties, computed through commuting nilpotent operators"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Scalar field: `q` for the rationals or `fp:<p>` for a prime field.
    #[arg(long, global = true, default_value = "q")]
    field: Field,
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Summands, ranks and labels of a bundle file.
    Info { file: String },
    /// Rank and label blocks of Hom(E, E').
    Hom { file1: String, file2: String },
    /// End(E): rank, blocks and fiber algebra fingerprint.
    End { file: String },
    /// Krull-Schmidt decomposition into indecomposable bundles.
    Decompose { file: String },
    /// Run the structural checks on a bundle.
    Verify {
        file: String,
        #[arg(long, default_value = "all", value_parser = ["all", "ranks", "algebras"])]
        suite: String,
    },
    /// All g = 1 modules up to a rank, with End fingerprints.
    Enumerate {
        /// Single operator case; the only one that can be listed exhaustively.
        #[arg(long, required = true)]
        g1: bool,
        /// Largest module dimension to list.
        #[arg(long = "max-rank")]
        max_rank: usize,
    },
    /// Rank 2 and 3 classification report.
    Classify {
        /// Largest number of operators to sample.
        #[arg(long)]
        gmax: usize,
        /// Indecomposable samples per (g, rank) cell.
        #[arg(long)]
        samples: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

/// Parses `args` (without the program name) and runs the command.
pub fn run<I, S>(args: I) -> (i32, String)
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let argv = std::iter::once(std::ffi::OsString::from("hvb")).chain(args.into_iter().map(Into::into));
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_INPUT,
            };
            return (code, e.render().to_string());
        }
    };
    match execute(&cli) {
        Ok(out) => out,
        Err(e) => (EXIT_INPUT, format!("error: {e}\n")),
    }
}

fn load(path: &str, field: Field) -> Result<HomogeneousBundle, String> {
    let text = std::fs::read_to_string(Path::new(path)).map_err(|e| format!("{path}: {e}"))?;
    parse_bundle(&text, field).map_err(|e| format!("{path}: {e}"))
}

type CsvRows<'a> = (Vec<&'a str>, Vec<Vec<String>>);

fn execute(cli: &Cli) -> Result<(i32, String), String> {
    let err = |e: Error| e.to_string();
    let field = cli.field;
    let (value, csv_rows, text, code): (Value, CsvRows, String, i32) = match &cli.command {
        Command::Info { file } => {
            let b = load(file, field)?;
            let summands: Vec<Value> = b
                .summands()
                .iter()
                .map(|(label, m)| {
                    Ok(json!({
                        "label": label,
                        "dim": m.dim(),
                        "partition": if m.g() == 1 { Some(m.partition()?.to_string()) } else { None },
                        "indecomposable": is_indecomposable(m)?,
                    }))
                })
                .collect::<Result<_, Error>>()
                .map_err(err)?;
            let mut text = format!(
                "g = {}, labels = {}, field = {}\nrank {}\n",
                b.context().g,
                b.context().label_rank,
                field,
                b.rank()
            );
            for s in &summands {
                let _ = writeln!(
                    text,
                    "  {} : dim {}{}{}",
                    label_text(&s["label"]),
                    s["dim"],
                    s["partition"].as_str().map(|p| format!(", partition {p}")).unwrap_or_default(),
                    if s["indecomposable"] == true { ", indecomposable" } else { "" },
                );
            }
            let rows = summands
                .iter()
                .map(|s| vec![label_text(&s["label"]), s["dim"].to_string(), s["indecomposable"].to_string()])
                .collect();
            let value = json!({ "bundle": b, "rank": b.rank(), "summands": summands });
            (value, (vec!["label", "dim", "indecomposable"], rows), text, EXIT_OK)
        }
        Command::Hom { file1, file2 } => {
            let (a, b) = (load(file1, field)?, load(file2, field)?);
            let hom = hom_bundle(&a, &b).map_err(err)?;
            let blocks = hom.block_summary();
            let mut text = format!("rank {}\n", hom.rank());
            for blk in &blocks {
                let _ = writeln!(text, "  {} : dim {}", blk.label, blk.dim);
            }
            let rows = blocks.iter().map(|b| vec![b.label.to_string(), b.dim.to_string()]).collect();
            (json!({ "rank": hom.rank(), "blocks": blocks }), (vec!["label", "dim"], rows), text, EXIT_OK)
        }
        Command::End { file } => {
            let b = load(file, field)?;
            let end = end_summary(&b).map_err(err)?;
            let mut text = format!("rank {}\n", end.rank);
            for blk in &end.blocks {
                let _ = writeln!(text, "  {} : dim {}", blk.label, blk.dim);
            }
            if let Some(fp) = &end.fingerprint {
                let _ = writeln!(
                    text,
                    "fiber: {} (dim {}, radical {}, radical index {}, {})",
                    fp.template,
                    fp.dim,
                    fp.radical_dim,
                    fp.radical_index,
                    if fp.commutative { "commutative" } else { "noncommutative" }
                );
            }
            let rows = end.blocks.iter().map(|b| vec![b.label.to_string(), b.dim.to_string()]).collect();
            (serde_json::to_value(&end).map_err(|e| e.to_string())?, (vec!["label", "dim"], rows), text, EXIT_OK)
        }
        Command::Decompose { file } => {
            let b = load(file, field)?;
            let d = decompose_bundle(&b, cli.seed).map_err(err)?;
            let factors: Vec<Value> = d
                .factors
                .iter()
                .map(|f| {
                    let (label, m) = &f.summands()[0];
                    let partition = if m.g() == 1 { m.partition().ok().map(|p| p.to_string()) } else { None };
                    json!({ "label": label, "dim": m.dim(), "partition": partition, "module": m })
                })
                .collect();
            let mut text = format!(
                "seed {}\n{} factors{}\n",
                cli.seed,
                factors.len(),
                if d.complete { "" } else { " (incomplete)" }
            );
            for f in &factors {
                let _ = writeln!(
                    text,
                    "  {} : dim {}{}",
                    label_text(&f["label"]),
                    f["dim"],
                    f["partition"].as_str().map(|p| format!(", partition {p}")).unwrap_or_default()
                );
            }
            let rows = factors
                .iter()
                .map(|f| {
                    vec![
                        label_text(&f["label"]),
                        f["dim"].to_string(),
                        f["partition"].as_str().unwrap_or("").to_string(),
                    ]
                })
                .collect();
            let value = json!({ "seed": cli.seed, "rank": b.rank(), "complete": d.complete, "factors": factors });
            let code = if d.complete { EXIT_OK } else { EXIT_VERIFY_FAILED };
            (value, (vec!["label", "dim", "partition"], rows), text, code)
        }
        Command::Verify { file, suite } => {
            let b = load(file, field)?;
            let suite: Suite = suite.parse().map_err(err)?;
            let report = verify_suite(&b, suite, cli.seed).map_err(err)?;
            let mut text = format!("seed {}\nrank {}, End rank {}\n", cli.seed, report.rank, report.end.rank);
            for c in &report.checks {
                let _ = writeln!(text, "  [{}] {}", if c.pass { "pass" } else { "FAIL" }, c.name);
            }
            let rows = report.checks.iter().map(|c| vec![c.name.to_string(), c.pass.to_string()]).collect();
            let code = if report.all_pass() { EXIT_OK } else { EXIT_VERIFY_FAILED };
            let mut value = serde_json::to_value(&report).map_err(|e| e.to_string())?;
            value["seed"] = json!(cli.seed);
            (value, (vec!["name", "pass"], rows), text, code)
        }
        Command::Enumerate { max_rank, .. } => {
            let entries = enumerate_g1(*max_rank, field).map_err(err)?;
            let text = entry_table(&entries);
            let csv = atlas_csv(&entries).map_err(err)?;
            return Ok((EXIT_OK, render(cli.format, &atlas_json(&entries), csv, text)));
        }
        Command::Classify { gmax, samples } => {
            let report = classify_small_rank(*gmax, *samples, cli.seed, field).map_err(err)?;
            let mut text = format!(
                "{} seed {} field {} gmax {} samples {}\n",
                report.header.version,
                report.header.seed,
                report.header.field,
                report.header.g_max,
                report.header.samples_per_cell
            );
            for c in &report.cells {
                let templates: Vec<String> = c.templates.iter().map(|(t, n)| format!("{t} x{n}")).collect();
                let _ = writeln!(
                    text,
                    "g={} rank={} {}: {} indecomposable of {} examined; {}; violations {}",
                    c.g,
                    c.rank,
                    c.source,
                    c.indecomposable,
                    c.examined,
                    templates.join(", "),
                    c.violations.len()
                );
            }
            for w in &report.witnesses {
                let _ = writeln!(
                    text,
                    "witness {} -> {} ({})",
                    w.name,
                    w.template,
                    if w.matches { "ok" } else { "MISMATCH" }
                );
            }
            let _ = writeln!(text, "rank 3 with End of dim 2: {}", report.rank3_dim2.statement);
            let _ = writeln!(text, "{}", if report.pass { "pass" } else { "FAIL" });
            let csv = atlas_csv(&report.entries).map_err(err)?;
            let code = if report.pass { EXIT_OK } else { EXIT_VERIFY_FAILED };
            let value = serde_json::to_value(&report).map_err(|e| e.to_string())?;
            return Ok((code, render(cli.format, &value, csv, text)));
        }
    };
    let (header, rows) = csv_rows;
    let csv = write_csv(&header, &rows).map_err(err)?;
    Ok((code, render(cli.format, &value, csv, text)))
}

fn render(format: Format, value: &Value, csv: String, text: String) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(value).expect("json values serialize");
            s.push('\n');
            s
        }
        Format::Csv => csv,
        Format::Text => text,
    }
}

fn write_csv(header: &[&str], rows: &[Vec<String>]) -> Result<String, Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::InvalidArgument(format!("csv: {e}"));
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(r).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::InvalidArgument(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// A serialized label (array of integers) in the `O` / `(1,0)` display form.
fn label_text(v: &Value) -> String {
    let coords: Vec<i64> = v.as_array().map(|a| a.iter().filter_map(Value::as_i64).collect()).unwrap_or_default();
    crate::bundles::Label::new(coords).to_string()
}

fn entry_table(entries: &[CatalogEntry]) -> String {
    let mut out = format!(
        "{:<16} {:>4} {:>7} {:>7} {:>6}  {:<18} {}\n",
        "partition", "rank", "end_dim", "rad_dim", "index", "template", "indecomposable"
    );
    for e in entries {
        let _ = writeln!(
            out,
            "{:<16} {:>4} {:>7} {:>7} {:>6}  {:<18} {}",
            e.descriptor,
            e.rank,
            e.end_dim,
            e.radical_dim,
            e.radical_index,
            e.template.to_string(),
            e.indecomposable
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_command_is_a_usage_error() {
        let (code, out) = run(["frobnicate"]);
        assert_eq!(code, EXIT_INPUT);
        assert!(out.contains("Usage"), "{out}");
        let (code, _) = run(["enumerate", "--g1", "--max-rank", "2", "--bogus"]);
        assert_eq!(code, EXIT_INPUT);
    }

    #[test]
    fn missing_file_is_an_input_error() {
        let (code, out) = run(["info", "/nonexistent/file.hb"]);
        assert_eq!(code, EXIT_INPUT);
        assert!(out.starts_with("error: /nonexistent/file.hb"), "{out}");
    }

    #[test]
    fn enumerate_formats() {
        let (code, out) = run(["enumerate", "--g1", "--max-rank", "2", "--format", "csv"]);
        assert_eq!(code, EXIT_OK);
        assert_eq!(out.lines().count(), 4);
        let (_, out) = run(["enumerate", "--g1", "--max-rank", "2", "--format", "json"]);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v[1]["template"], "TruncatedPoly(2)");
        let (_, out) = run(["enumerate", "--g1", "--max-rank", "2"]);
        assert!(out.contains("FullMatrix(2)"));
    }

    #[test]
    fn bad_field_is_rejected() {
        let (code, _) = run(["enumerate", "--g1", "--max-rank", "2", "--field", "fp:8"]);
        assert_eq!(code, EXIT_INPUT);
    }

    #[test]
    fn classify_is_byte_stable() {
        let args = ["classify", "--gmax", "2", "--samples", "4", "--seed", "3", "--format", "json"];
        let a = run(args);
        assert_eq!(a.0, EXIT_OK);
        assert_eq!(a, run(args));
        let v: Value = serde_json::from_str(&a.1).unwrap();
        assert_eq!(v["header"]["seed"], 3);
    }
}
