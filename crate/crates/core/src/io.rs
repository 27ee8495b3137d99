//! Basis-set and analysis documents: canonical JSON, plain-text and LaTeX rendering.
//!
//! Canonical JSON has sorted keys, two-space indentation, scalar rows written
//! on one line, exponents as integers and floats in shortest round-trip form.
//! Serializing the same document twice gives identical bytes.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::entanglement::{lubkin_average, BasisClass, EntanglementProfile, HaarEstimate};
use crate::error::{MubError, Result};
use crate::field::lcm;
use crate::matrix::{unitarity_residual, Basis, CMatrix, ExactBasis, ExactMatrix, MubSet, Provenance, Scale, UNITARITY_TOL};
use crate::verification::DesignVerdict;

pub const SCHEMA_VERSION: u32 = 1;

fn format_err(msg: impl Into<String>) -> MubError {
    MubError::Format(msg.into())
}

/// One basis: exactly one of `exact` (with `scale`) or `float` is present.
///
/// Grids are row-major with columns as states; `exact[r][c]` is `null` for a
/// zero entry or the exponent `k` of `scale·α_L^k`, `float[r][c]` is `[re, im]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisRecord {
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<Vec<Vec<Option<u32>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub float: Option<Vec<Vec<[f64; 2]>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisSetDocument {
    pub schema_version: u32,
    pub dim: usize,
    /// `L` in `α_L = exp(2πi/L)` shared by every exact grid.
    pub root_order: u32,
    pub provenance: Provenance,
    pub bases: Vec<BasisRecord>,
}

/// `unit` for 1, `inv_sqrt_d` for `1/√dim`, otherwise `inv_sqrt_<n>`.
pub fn scale_tag(scale: Scale, dim: usize) -> String {
    if scale.is_unit() {
        "unit".to_string()
    } else if scale.radicand() == dim as u64 {
        "inv_sqrt_d".to_string()
    } else {
        format!("inv_sqrt_{}", scale.radicand())
    }
}

pub fn parse_scale_tag(tag: &str, dim: usize) -> Result<Scale> {
    match tag {
        "unit" => Ok(Scale::UNIT),
        "inv_sqrt_d" => Scale::inv_sqrt(dim as u64),
        other => other
            .strip_prefix("inv_sqrt_")
            .and_then(|n| n.parse::<u64>().ok())
            .filter(|&n| n > 0)
            .map(|n| Scale::inv_sqrt(n).expect("positive"))
            .ok_or_else(|| format_err(format!("unknown scale tag '{tag}'"))),
    }
}

impl BasisSetDocument {
    pub fn from_set(set: &MubSet) -> Self {
        let root_order = set
            .members()
            .iter()
            .filter_map(|m| m.exact())
            .fold(1u64, |l, e| lcm(l, u64::from(e.matrix().root_order()))) as u32;
        let dim = set.dim();
        let bases = set
            .members()
            .iter()
            .map(|m| match m.exact() {
                Some(e) => {
                    let mat = e.matrix().with_root_order(root_order).expect("order divides the lcm");
                    BasisRecord {
                        label: e.label().to_string(),
                        scale: Some(scale_tag(mat.scale(), dim)),
                        exact: Some((0..dim).map(|r| mat.row(r).to_vec()).collect()),
                        float: None,
                    }
                }
                None => {
                    let b = m.basis().matrix();
                    BasisRecord {
                        label: m.basis().label().to_string(),
                        scale: None,
                        exact: None,
                        float: Some(
                            (0..dim)
                                .map(|r| (0..dim).map(|c| [b[(r, c)].re, b[(r, c)].im]).collect())
                                .collect(),
                        ),
                    }
                }
            })
            .collect();
        Self {
            schema_version: SCHEMA_VERSION,
            dim,
            root_order,
            provenance: set.provenance().clone(),
            bases,
        }
    }

    /// Rebuilds the set, rejecting malformed grids and non-unitary bases.
    pub fn to_set(&self) -> Result<MubSet> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(format_err(format!("unsupported schema_version {}", self.schema_version)));
        }
        if self.dim == 0 || self.root_order == 0 {
            return Err(format_err("dim and root_order must be positive"));
        }
        let d = self.dim;
        let mut set = MubSet::new(d, self.provenance.clone());
        for rec in &self.bases {
            let name = &rec.label;
            match (&rec.exact, &rec.float) {
                (Some(grid), None) => {
                    let tag = rec
                        .scale
                        .as_deref()
                        .ok_or_else(|| format_err(format!("basis '{name}' has an exact grid but no scale")))?;
                    let scale = parse_scale_tag(tag, d)?;
                    check_shape(grid, d, name)?;
                    if grid.iter().flatten().flatten().any(|&k| k >= self.root_order) {
                        return Err(format_err(format!(
                            "basis '{name}' has an exponent outside 0..{}",
                            self.root_order
                        )));
                    }
                    let m = ExactMatrix::new(d, self.root_order, scale, grid.iter().flatten().copied().collect())
                        .map_err(|e| format_err(e.to_string()))?;
                    check_unitary(&m.to_complex(), name)?;
                    set.push_exact(ExactBasis::new(name.clone(), m))
                        .map_err(|e| format_err(e.to_string()))?;
                }
                (None, Some(grid)) => {
                    if rec.scale.is_some() {
                        return Err(format_err(format!("basis '{name}' has a scale on a float grid")));
                    }
                    check_shape(grid, d, name)?;
                    let m = CMatrix::from_fn(d, d, |r, c| {
                        let [re, im] = grid[r][c];
                        num_complex::Complex64::new(re, im)
                    });
                    check_unitary(&m, name)?;
                    set.push(Basis::new(name.clone(), m).map_err(|e| format_err(e.to_string()))?)
                        .map_err(|e| format_err(e.to_string()))?;
                }
                _ => {
                    return Err(format_err(format!(
                        "basis '{name}' must carry exactly one of an exact or a float grid"
                    )))
                }
            }
        }
        Ok(set)
    }

    pub fn to_canonical_json(&self) -> String {
        canonical_json(&serde_json::to_value(self).expect("plain data"))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

fn check_shape<T>(grid: &[Vec<T>], d: usize, name: &str) -> Result<()> {
    if grid.len() != d || grid.iter().any(|row| row.len() != d) {
        return Err(format_err(format!("basis '{name}' is not a {d} x {d} grid")));
    }
    Ok(())
}

fn check_unitary(m: &CMatrix, name: &str) -> Result<()> {
    let residual = unitarity_residual(m);
    if residual > UNITARITY_TOL || residual.is_nan() {
        return Err(format_err(format!("basis '{name}' is not unitary (residual {residual:.3e})")));
    }
    Ok(())
}

pub fn read_set(path: &Path) -> Result<MubSet> {
    let text = std::fs::read_to_string(path)?;
    BasisSetDocument::from_json(&text)?.to_set()
}

pub fn write_set(set: &MubSet, path: &Path) -> Result<()> {
    std::fs::write(path, BasisSetDocument::from_set(set).to_canonical_json())?;
    Ok(())
}

fn depth(v: &Value) -> usize {
    match v {
        Value::Array(items) => 1 + items.iter().map(depth).max().unwrap_or(0),
        Value::Object(_) => usize::MAX / 2,
        _ => 0,
    }
}

fn is_inline(items: &[Value]) -> bool {
    items.iter().all(|v| match v {
        Value::Array(inner) => inner.len() <= 2 && inner.iter().all(|x| depth(x) == 0),
        Value::Object(_) => false,
        _ => true,
    })
}

/// Sorted-key JSON with one-line scalar rows and a trailing newline.
pub fn canonical_json(value: &Value) -> String {
    let mut out = String::new();
    write_value(value, 0, &mut out);
    out.push('\n');
    out
}

fn write_value(v: &Value, indent: usize, out: &mut String) {
    let pad = |n: usize| "  ".repeat(n);
    match v {
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            // serde_json::Map without preserve_order is a BTreeMap, so keys iterate sorted
            out.push_str("{\n");
            for (i, (k, val)) in map.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                write_value(val, indent + 1, out);
                if i + 1 < map.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Array(items) if is_inline(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_value(item, indent, out);
            }
            out.push(']');
        }
        Value::Array(items) => {
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_value(item, indent + 1, out);
                if i + 1 < items.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        scalar => out.push_str(&scalar.to_string()),
    }
}

fn phase_symbol(order: u32, k: u32) -> String {
    if k == 0 {
        "1".into()
    } else if 2 * k == order {
        "-1".into()
    } else if 4 * k == order {
        "i".into()
    } else if 4 * k == 3 * order {
        "-i".into()
    } else if k == 1 {
        "α".into()
    } else {
        format!("α^{k}")
    }
}

fn phase_latex(order: u32, k: u32) -> String {
    match phase_symbol(order, k).as_str() {
        "α" => format!("\\alpha_{{{order}}}"),
        s if s.starts_with("α^") => format!("\\alpha_{{{order}}}^{{{k}}}"),
        s => s.to_string(),
    }
}

fn scale_text(scale: Scale) -> String {
    if scale.is_unit() {
        String::new()
    } else {
        format!("1/√{} × ", scale.radicand())
    }
}

fn float_text(re: f64, im: f64) -> String {
    format!("{re:+.6}{im:+.6}i")
}

/// Matrices with entries written as powers of `α = exp(2πi/L)`; columns are states.
pub fn render_text(doc: &BasisSetDocument) -> Result<String> {
    let set = doc.to_set()?;
    let mut out = String::new();
    let _ = writeln!(out, "dimension {}, {} bases ({})", doc.dim, doc.bases.len(), doc.provenance);
    if doc.bases.iter().any(|b| b.exact.is_some()) && doc.root_order > 2 {
        let _ = writeln!(out, "α = exp(2πi/{})", doc.root_order);
    }
    for (i, rec) in doc.bases.iter().enumerate() {
        out.push('\n');
        let cells: Vec<Vec<String>> = match (&rec.exact, set.exact(i)) {
            (Some(grid), Some(e)) => {
                let scale = scale_text(e.matrix().scale());
                let _ = writeln!(out, "{}", format!("B_{i}  {}  {}", rec.label, scale.trim_end_matches(" × ")).trim_end());
                grid.iter()
                    .map(|row| {
                        row.iter()
                            .map(|e| e.map_or_else(|| "0".to_string(), |k| phase_symbol(doc.root_order, k)))
                            .collect()
                    })
                    .collect()
            }
            _ => {
                let _ = writeln!(out, "B_{i}  {}", rec.label);
                let m = set.basis(i).matrix();
                (0..doc.dim)
                    .map(|r| (0..doc.dim).map(|c| float_text(m[(r, c)].re, m[(r, c)].im)).collect())
                    .collect()
            }
        };
        let width = cells.iter().flatten().map(|s| s.chars().count()).max().unwrap_or(1);
        for row in cells {
            let line: Vec<String> = row.iter().map(|s| format!("{s:>width$}")).collect();
            let _ = writeln!(out, "  {}", line.join("  "));
        }
    }
    Ok(out)
}

/// One `array` environment per basis, inside display math.
pub fn render_latex(doc: &BasisSetDocument) -> Result<String> {
    let set = doc.to_set()?;
    let mut out = String::new();
    for (i, rec) in doc.bases.iter().enumerate() {
        let _ = writeln!(out, "% {}", rec.label);
        let _ = write!(out, "\\[\nB_{{{i}}} = ");
        let rows: Vec<String> = match (&rec.exact, set.exact(i)) {
            (Some(grid), Some(e)) => {
                let s = e.matrix().scale();
                if !s.is_unit() {
                    let _ = write!(out, "\\frac{{1}}{{\\sqrt{{{}}}}}", s.radicand());
                }
                grid.iter()
                    .map(|row| {
                        row.iter()
                            .map(|e| e.map_or_else(|| "0".to_string(), |k| phase_latex(doc.root_order, k)))
                            .collect::<Vec<_>>()
                            .join(" & ")
                    })
                    .collect()
            }
            _ => {
                let m = set.basis(i).matrix();
                (0..doc.dim)
                    .map(|r| {
                        (0..doc.dim)
                            .map(|c| format!("{:.6}{:+.6}i", m[(r, c)].re, m[(r, c)].im))
                            .collect::<Vec<_>>()
                            .join(" & ")
                    })
                    .collect()
            }
        };
        let _ = writeln!(out, "\\left(\\begin{{array}}{{{}}}", "c".repeat(doc.dim));
        let _ = writeln!(out, "{}", rows.join(" \\\\\n"));
        let _ = writeln!(out, "\\end{{array}}\\right)\n\\]");
    }
    Ok(out)
}

/// Parses a split written `3x3`, `2 x 4` or `2×4`.
pub fn parse_split(text: &str) -> Result<(usize, usize)> {
    let cleaned: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let parts: Vec<&str> = cleaned.split(['x', 'X', '×']).collect();
    match parts.as_slice() {
        [a, b] => match (a.parse::<usize>(), b.parse::<usize>()) {
            (Ok(a), Ok(b)) if a > 0 && b > 0 => Ok((a, b)),
            _ => Err(crate::error::invalid(format!("bad split '{text}'"))),
        },
        _ => Err(crate::error::invalid(format!("bad split '{text}', expected e.g. 3x3"))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitRecord {
    pub d_a: usize,
    pub d_b: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisPurityRecord {
    pub label: String,
    pub class: BasisClass,
    pub purities: Vec<f64>,
    pub sum: f64,
}

/// Haar Monte Carlo estimate of the average purity beside its closed form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HaarRecord {
    pub samples: usize,
    pub seed: u64,
    pub mean: f64,
    pub std_err: f64,
    pub lubkin: f64,
}

/// Purity table of one set under one split, with the conservation and design references.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisDocument {
    pub schema_version: u32,
    pub dim: usize,
    pub split: SplitRecord,
    pub tolerance: f64,
    pub complete: bool,
    pub bases: Vec<BasisPurityRecord>,
    pub product_bases: usize,
    pub maximal_bases: usize,
    pub mixed_bases: usize,
    pub total: f64,
    /// `d_A·d_B·(d_A + d_B)`, reached by complete sets.
    pub reference_total: f64,
    pub frame_potential: f64,
    pub welch_value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub haar: Option<HaarRecord>,
}

impl AnalysisDocument {
    pub fn new(profile: &EntanglementProfile, design: &DesignVerdict) -> Self {
        let bases: Vec<BasisPurityRecord> = profile
            .labels
            .iter()
            .zip(&profile.purities)
            .zip(&profile.basis_classes)
            .map(|((label, p), class)| BasisPurityRecord {
                label: label.clone(),
                class: *class,
                purities: p.clone(),
                sum: p.iter().sum(),
            })
            .collect();
        let total = bases.iter().map(|b| b.sum).sum();
        Self {
            schema_version: SCHEMA_VERSION,
            dim: profile.d_a * profile.d_b,
            split: SplitRecord {
                d_a: profile.d_a,
                d_b: profile.d_b,
            },
            tolerance: profile.tolerance,
            complete: profile.complete,
            product_bases: profile.product_bases(),
            maximal_bases: profile.maximal_bases(),
            mixed_bases: profile.mixed_bases(),
            bases,
            total,
            reference_total: profile.reference_total(),
            frame_potential: design.frame_potential,
            welch_value: design.welch_value,
            haar: None,
        }
    }

    pub fn with_haar(mut self, estimate: &HaarEstimate, seed: u64) -> Self {
        self.haar = Some(HaarRecord {
            samples: estimate.samples,
            seed,
            mean: estimate.mean,
            std_err: estimate.std_err,
            lubkin: lubkin_average(self.split.d_a, self.split.d_b),
        });
        self
    }

    pub fn to_canonical_json(&self) -> String {
        canonical_json(&serde_json::to_value(self).expect("plain data"))
    }

    /// The comparison line printed by `analyze`.
    pub fn summary_line(&self) -> String {
        format!(
            "total purity {:.10} vs reference {:.10} (difference {:.3e})",
            self.total,
            self.reference_total,
            self.total - self.reference_total
        )
    }
}
