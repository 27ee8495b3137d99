//! Regression against the shipped reference tables.
//!
//! `manifest.json` lists one entry per dimension: the table file, the
//! construction that should reproduce it, how table labels map to construction
//! labels, and printed entries known to be wrong. Those corrections are applied
//! before the exact comparison, and each must match the printed value it
//! replaces. Any other difference fails.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::entanglement::{classify_set, Bipartition};
use crate::error::{MubError, Result};
use crate::io::BasisSetDocument;
use crate::matrix::{MubSet, Provenance};
use crate::methods::regenerate;
use crate::verification::{check_2design, check_mub_set};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnownTypo {
    pub basis: String,
    pub row: usize,
    pub col: usize,
    pub printed: Option<u32>,
    pub corrected: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FixtureMode {
    Exact,
    Properties,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub dim: usize,
    pub file: Option<String>,
    pub mode: FixtureMode,
    pub construction: Provenance,
    #[serde(default)]
    pub labels: BTreeMap<String, String>,
    #[serde(default)]
    pub known_typos: Vec<KnownTypo>,
    #[serde(default)]
    pub reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub fixtures: Vec<ManifestEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum FixtureOutcome {
    Matched { bases: usize, corrections: usize },
    PropertiesHold { detail: String },
    Skipped { reason: String },
    Failed { problems: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixtureResult {
    pub dim: usize,
    pub file: Option<String>,
    pub outcome: FixtureOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixtureReport {
    pub results: Vec<FixtureResult>,
}

impl FixtureReport {
    pub fn passed(&self) -> bool {
        !self.results.iter().any(|r| matches!(r.outcome, FixtureOutcome::Failed { .. }))
    }

    pub fn result(&self, dim: usize) -> Option<&FixtureResult> {
        self.results.iter().find(|r| r.dim == dim)
    }
}

pub fn read_manifest(dir: &Path) -> Result<Manifest> {
    let text = std::fs::read_to_string(dir.join("manifest.json"))?;
    Ok(serde_json::from_str(&text)?)
}

/// The table as printed, with the manifest's corrections applied.
pub fn load_corrected(dir: &Path, entry: &ManifestEntry) -> Result<BasisSetDocument> {
    let file = entry
        .file
        .as_deref()
        .ok_or_else(|| MubError::Format(format!("no table file for d = {}", entry.dim)))?;
    let mut doc = BasisSetDocument::from_json(&std::fs::read_to_string(dir.join(file))?)?;
    for typo in &entry.known_typos {
        let cell = doc
            .bases
            .iter_mut()
            .find(|b| b.label == typo.basis)
            .and_then(|b| b.exact.as_mut())
            .and_then(|g| g.get_mut(typo.row))
            .and_then(|row| row.get_mut(typo.col))
            .ok_or_else(|| MubError::Format(format!("typo location {}[{}][{}] does not exist", typo.basis, typo.row, typo.col)))?;
        if *cell != typo.printed {
            return Err(MubError::Format(format!(
                "{}[{}][{}] reads {:?}, manifest expects printed {:?}",
                typo.basis, typo.row, typo.col, cell, typo.printed
            )));
        }
        *cell = typo.corrected;
    }
    Ok(doc)
}

fn compare_exact(table: &MubSet, built: &MubSet, labels: &BTreeMap<String, String>) -> Vec<String> {
    let mut problems = Vec::new();
    if table.len() != built.len() || labels.len() != table.len() {
        problems.push(format!(
            "table has {} bases, construction {}, label map {}",
            table.len(),
            built.len(),
            labels.len()
        ));
    }
    for (table_label, built_label) in labels {
        let (Some(i), Some(j)) = (table.position(table_label), built.position(built_label)) else {
            problems.push(format!("cannot pair table '{table_label}' with construction '{built_label}'"));
            continue;
        };
        let (Some(t), Some(b)) = (table.exact(i), built.exact(j)) else {
            problems.push(format!("'{table_label}' has no exact form"));
            continue;
        };
        let order = crate::field::lcm(u64::from(t.matrix().root_order()), u64::from(b.matrix().root_order())) as u32;
        let (tm, bm) = (
            t.matrix().with_root_order(order).expect("multiple"),
            b.matrix().with_root_order(order).expect("multiple"),
        );
        if tm.scale() != bm.scale() {
            problems.push(format!("'{table_label}' scale differs"));
            continue;
        }
        let d = tm.dim();
        for r in 0..d {
            for c in 0..d {
                if tm.get(r, c) != bm.get(r, c) {
                    problems.push(format!(
                        "'{table_label}' vs '{built_label}' at ({r}, {c}): table {:?}, constructed {:?} (order {order})",
                        tm.get(r, c),
                        bm.get(r, c)
                    ));
                }
            }
        }
    }
    problems
}

fn check_properties(built: &MubSet) -> std::result::Result<String, Vec<String>> {
    let mut problems = Vec::new();
    let report = check_mub_set(built, 1e-10);
    if !report.passed() {
        problems.push(format!("not unbiased (max deviation {:.3e})", report.max_deviation()));
    }
    if !built.is_complete() {
        problems.push(format!("{} bases, expected {}", built.len(), built.dim() + 1));
    }
    if !check_2design(built, 1e-9).design {
        problems.push("frame potential misses the design value".to_string());
    }
    // every single-qubit cut of a qubit register
    let mut detail = Vec::new();
    let qubits = built.dim().trailing_zeros() as usize;
    if built.dim().is_power_of_two() && qubits >= 2 {
        for k in 0..qubits {
            let split = Bipartition::of_subsystems(&vec![2; qubits], &[k]).expect("valid split");
            match classify_set(built, &split) {
                Ok(profile) => {
                    let (prod, maximal) = (profile.product_bases(), profile.maximal_bases());
                    detail.push(format!("cut {k}: {prod} product, {maximal} maximal"));
                    if prod + maximal != built.len() {
                        problems.push(format!("cut {k}: {} bases are neither product nor maximal", profile.mixed_bases()));
                    }
                }
                Err(e) => problems.push(e.to_string()),
            }
        }
    }
    if problems.is_empty() {
        Ok(format!("unbiased, complete, 2-design; {}", detail.join("; ")))
    } else {
        Err(problems)
    }
}

fn run_entry(dir: &Path, entry: &ManifestEntry) -> FixtureOutcome {
    let built = match regenerate(&entry.construction) {
        Ok(set) => set,
        Err(e) => return FixtureOutcome::Failed { problems: vec![format!("construction failed: {e}")] },
    };
    match entry.mode {
        FixtureMode::Properties => match check_properties(&built) {
            Ok(detail) => FixtureOutcome::PropertiesHold { detail },
            Err(problems) => FixtureOutcome::Failed { problems },
        },
        FixtureMode::Exact => {
            let Some(file) = entry.file.as_deref() else {
                return FixtureOutcome::Skipped { reason: "manifest lists no table file".into() };
            };
            if !dir.join(file).exists() {
                return FixtureOutcome::Skipped { reason: format!("{file} is missing") };
            }
            let table = match load_corrected(dir, entry).and_then(|doc| doc.to_set()) {
                Ok(t) => t,
                Err(e) => return FixtureOutcome::Failed { problems: vec![e.to_string()] },
            };
            let problems = compare_exact(&table, &built, &entry.labels);
            if problems.is_empty() {
                FixtureOutcome::Matched {
                    bases: table.len(),
                    corrections: entry.known_typos.len(),
                }
            } else {
                FixtureOutcome::Failed { problems }
            }
        }
    }
}

/// Checks every manifest entry; a missing table file is a skip, not a failure.
pub fn run_fixture_suite(dir: &Path) -> Result<FixtureReport> {
    let manifest = read_manifest(dir)?;
    let results = manifest
        .fixtures
        .iter()
        .map(|entry| FixtureResult {
            dim: entry.dim,
            file: entry.file.clone(),
            outcome: run_entry(dir, entry),
        })
        .collect();
    Ok(FixtureReport { results })
}

/// The fixture directory shipped with this crate.
pub fn default_fixture_dir() -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_tables_match() {
        let report = run_fixture_suite(&default_fixture_dir()).unwrap();
        for r in &report.results {
            assert!(
                !matches!(r.outcome, FixtureOutcome::Failed { .. } | FixtureOutcome::Skipped { .. }),
                "d = {}: {:?}",
                r.dim,
                r.outcome
            );
        }
        assert!(matches!(report.result(8).unwrap().outcome, FixtureOutcome::PropertiesHold { .. }));
        assert!(matches!(report.result(9).unwrap().outcome, FixtureOutcome::Matched { bases: 10, corrections: 3 }));
    }

    #[test]
    fn uncorrected_tables_are_not_unitary() {
        let dir = default_fixture_dir();
        let manifest = read_manifest(&dir).unwrap();
        for entry in manifest.fixtures.iter().filter(|e| !e.known_typos.is_empty()) {
            let mut raw = entry.clone();
            raw.known_typos.clear();
            let printed = load_corrected(&dir, &raw).unwrap();
            assert!(printed.to_set().is_err(), "d = {}", entry.dim);
        }
    }

    #[test]
    fn missing_files_are_skipped() {
        let tmp = std::env::temp_dir().join(format!("mubs-fixtures-{}", std::process::id()));
        std::fs::create_dir_all(&tmp).unwrap();
        std::fs::copy(default_fixture_dir().join("manifest.json"), tmp.join("manifest.json")).unwrap();
        let report = run_fixture_suite(&tmp).unwrap();
        assert!(matches!(report.result(3).unwrap().outcome, FixtureOutcome::Skipped { .. }));
        assert!(report.passed());
        std::fs::remove_dir_all(&tmp).unwrap();
    }

    #[test]
    fn wrong_printed_value_is_rejected() {
        let dir = default_fixture_dir();
        let mut manifest = read_manifest(&dir).unwrap();
        let entry = manifest.fixtures.iter_mut().find(|e| e.dim == 6).unwrap();
        entry.known_typos[0].printed = Some(0);
        assert!(load_corrected(&dir, entry).is_err());
    }
}
