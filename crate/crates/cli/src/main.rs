//! `mubs`: generate, verify, analyze and export sets of mutually unbiased bases.
//!
//! Exit codes: 0 success, 1 a requested check failed, 2 usage or document
//! error, 3 unsupported dimension.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use mubs_core::entanglement::{classify_set_with_tolerance, haar_average_purity, Bipartition, CLASS_TOL};
use mubs_core::io::{parse_split, read_set, render_latex, render_text, AnalysisDocument, BasisSetDocument};
use mubs_core::methods::{generate, Method, Params};
use mubs_core::verification::{check_2design, check_mub_set, DEFAULT_TOL};
use mubs_core::{MubError, MubSet};
use serde_json::json;

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_UNSUPPORTED: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "mubs", version, about = "Mutually unbiased bases: construction, verification and entanglement analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a set and write it as a JSON document.
    Generate {
        /// prime, prime-squared, two-qubit, three-qubit, wocjan-beth, product or blocking-pair
        #[arg(long)]
        method: Method,
        #[arg(long)]
        p: Option<u64>,
        /// Control-phase exponent; defaults to the smallest valid value.
        #[arg(long)]
        theta: Option<u64>,
        #[arg(long = "dA")]
        d_a: Option<u64>,
        #[arg(long = "dB")]
        d_b: Option<u64>,
        /// Number of subsystems for blocking-pair.
        #[arg(long)]
        r: Option<u64>,
        /// Recorded in the document; constructions are deterministic.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check orthonormality and pairwise unbiasedness of a document.
    Verify {
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        /// Also require the frame potential to meet the Welch bound.
        #[arg(long)]
        design: bool,
        /// Also require d + 1 bases.
        #[arg(long)]
        complete: bool,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        format: ReportFormat,
    },
    /// Reduced purities of every state across a bipartition.
    Analyze {
        input: PathBuf,
        /// Subsystem dimensions, e.g. 3x3.
        #[arg(long)]
        split: String,
        /// Purity tolerance for the product / maximal classes.
        #[arg(long, default_value_t = CLASS_TOL)]
        tol: f64,
        /// Haar samples for the average-purity estimate; 0 skips it.
        #[arg(long, default_value_t = 0)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render a document as canonical JSON, plain text or LaTeX.
    Export {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = ExportFormat::Json)]
        format: ExportFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ExportFormat {
    Json,
    Text,
    Latex,
}

fn exit_code(err: &MubError) -> u8 {
    match err {
        MubError::UnsupportedDimension(_) => EXIT_UNSUPPORTED,
        _ => EXIT_USAGE,
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), MubError> {
    match out {
        Some(path) => Ok(std::fs::write(path, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn verify(set: &MubSet, tol: f64, design: bool, complete: bool, format: ReportFormat) -> (bool, String) {
    let report = check_mub_set(set, tol);
    let design_verdict = design.then(|| check_2design(set, tol));
    let passed = report.passed()
        && design_verdict.as_ref().is_none_or(|v| v.design)
        && (!complete || set.is_complete());
    let text = match format {
        ReportFormat::Json => {
            let mut doc = json!({
                "passed": passed,
                "verification": report,
            });
            if complete {
                doc["complete"] = json!({ "required": set.dim() + 1, "bases": set.len(), "passed": set.is_complete() });
            }
            if let Some(v) = &design_verdict {
                doc["design"] = json!(v);
            }
            mubs_core::io::canonical_json(&doc)
        }
        ReportFormat::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "dimension {}, {} bases ({})", set.dim(), set.len(), set.provenance());
            let residual = report.orthonormality.iter().copied().fold(0.0, f64::max);
            let _ = writeln!(s, "orthonormal: {} (max residual {residual:.3e})", yes_no(report.orthonormal()));
            let _ = writeln!(
                s,
                "unbiased: {} (max deviation {:.3e} over {} pairs, tolerance {tol:.1e})",
                yes_no(report.unbiased()),
                report.max_deviation(),
                report.pairs.len()
            );
            for (label, r) in report.labels.iter().zip(&report.orthonormality) {
                if *r >= tol {
                    let _ = writeln!(s, "  basis '{label}' is not orthonormal: residual {r:.3e}");
                }
            }
            for pair in report.pairs.iter().filter(|p| p.max_deviation >= tol) {
                let _ = writeln!(
                    s,
                    "  {} vs {}: deviation {:.3e}",
                    report.labels[pair.basis_a], report.labels[pair.basis_b], pair.max_deviation
                );
            }
            for w in &report.witnesses {
                let _ = writeln!(
                    s,
                    "  witness: |<{}[{}]|{}[{}]>|^2 = {:.6} (want {:.6})",
                    w.label_a,
                    w.state_a,
                    w.label_b,
                    w.state_b,
                    w.overlap_sq,
                    1.0 / set.dim() as f64
                );
            }
            if complete {
                let _ = writeln!(s, "complete: {} ({} of {} bases)", yes_no(set.is_complete()), set.len(), set.dim() + 1);
            }
            if let Some(v) = &design_verdict {
                let _ = writeln!(
                    s,
                    "2-design: {} (frame potential {:.10} vs Welch value {:.10}, excess {:.3e})",
                    yes_no(v.design),
                    v.frame_potential,
                    v.welch_value,
                    v.excess()
                );
            }
            let _ = writeln!(s, "{}", if passed { "PASS" } else { "FAIL" });
            s
        }
    };
    (passed, text)
}

fn analyze(set: &MubSet, split: &str, tol: f64, samples: usize, seed: u64) -> Result<(AnalysisDocument, String), MubError> {
    let (d_a, d_b) = parse_split(split)?;
    let split = Bipartition::new(d_a, d_b)?;
    let profile = classify_set_with_tolerance(set, &split, tol)?;
    let mut doc = AnalysisDocument::new(&profile, &check_2design(set, DEFAULT_TOL));
    if samples > 0 {
        doc = doc.with_haar(&haar_average_purity(&split, samples, seed)?, seed);
    }
    let mut s = String::new();
    let _ = writeln!(s, "dimension {} split {d_a}x{d_b}, {} bases ({})", doc.dim, doc.bases.len(), set.provenance());
    let width = doc.bases.iter().map(|b| b.label.chars().count()).max().unwrap_or(0);
    for b in &doc.bases {
        let class = serde_json::to_value(b.class).expect("enum");
        let _ = writeln!(
            s,
            "  {:<width$}  {:<8}  {:.10}",
            b.label,
            class.as_str().unwrap_or_default(),
            b.sum
        );
    }
    let _ = writeln!(
        s,
        "{} product, {} maximally entangled, {} mixed",
        doc.product_bases, doc.maximal_bases, doc.mixed_bases
    );
    if let Some(h) = &doc.haar {
        let _ = writeln!(
            s,
            "haar average purity {:.6} ± {:.6} ({} samples) vs {:.6}",
            h.mean, h.std_err, h.samples, h.lubkin
        );
    }
    let _ = writeln!(s, "{}", doc.summary_line());
    Ok((doc, s))
}

fn run(cli: Cli) -> Result<u8, MubError> {
    match cli.command {
        Command::Generate {
            method,
            p,
            theta,
            d_a,
            d_b,
            r,
            seed,
            out,
        } => {
            let params = Params { p, theta, d_a, d_b, r };
            let mut doc = BasisSetDocument::from_set(&generate(method, &params)?);
            doc.provenance.seed = seed;
            emit(&doc.to_canonical_json(), out.as_deref())?;
            if let Some(path) = &out {
                eprintln!("wrote {} bases in dimension {} to {}", doc.bases.len(), doc.dim, path.display());
            }
            Ok(0)
        }
        Command::Verify {
            input,
            tol,
            design,
            complete,
            format,
        } => {
            let set = read_set(&input)?;
            let (passed, text) = verify(&set, tol, design, complete, format);
            print!("{text}");
            Ok(if passed { 0 } else { EXIT_CHECK_FAILED })
        }
        Command::Analyze {
            input,
            split,
            tol,
            samples,
            seed,
            out,
        } => {
            let set = read_set(&input)?;
            let (doc, text) = analyze(&set, &split, tol, samples, seed)?;
            if let Some(path) = &out {
                std::fs::write(path, doc.to_canonical_json())?;
            }
            print!("{text}");
            Ok(0)
        }
        Command::Export { input, format, out } => {
            let doc = BasisSetDocument::from_json(&std::fs::read_to_string(&input)?)?;
            let text = match format {
                ExportFormat::Json => {
                    doc.to_set()?;
                    doc.to_canonical_json()
                }
                ExportFormat::Text => render_text(&doc)?,
                ExportFormat::Latex => render_latex(&doc)?,
            };
            emit(&text, out.as_deref())?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("mubs: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
