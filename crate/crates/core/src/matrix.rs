//! Bases as dense complex matrices, their exact root-of-unity form, and the
//! handful of linear-algebra operations the constructions need.
//!
//! Column `j` of a basis matrix is the `j`-th state. In tensor products the
//! left factor is the slow index: column `a·d_B + b` is `|a⟩ ⊗ |b⟩`.

use std::collections::HashSet;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::field::{lcm, unit_phase};

pub type CMatrix = DMatrix<Complex64>;

/// Absolute tolerance on Gram-matrix entries when checking unitarity.
pub const UNITARITY_TOL: f64 = 1e-10;

/// A positive prefactor `1/√n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Scale {
    radicand: u64,
}

impl Scale {
    pub const UNIT: Scale = Scale { radicand: 1 };

    pub fn inv_sqrt(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(invalid("scale radicand must be positive"));
        }
        Ok(Scale { radicand: n })
    }

    pub fn radicand(&self) -> u64 {
        self.radicand
    }

    pub fn value(&self) -> f64 {
        1.0 / (self.radicand as f64).sqrt()
    }

    pub fn is_unit(&self) -> bool {
        self.radicand == 1
    }

    /// Scale of a Kronecker product.
    pub fn tensor(&self, other: &Scale) -> Scale {
        Scale {
            radicand: self.radicand * other.radicand,
        }
    }
}

/// A square matrix whose entries are `scale · α_L^k` or zero, `α_L = exp(2πi/L)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExactMatrix {
    dim: usize,
    root_order: u32,
    scale: Scale,
    /// Row-major exponents; `None` is a zero entry.
    entries: Vec<Option<u32>>,
}

impl ExactMatrix {
    pub fn new(dim: usize, root_order: u32, scale: Scale, entries: Vec<Option<u32>>) -> Result<Self> {
        if root_order == 0 {
            return Err(invalid("root order must be positive"));
        }
        if entries.len() != dim * dim {
            return Err(invalid(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                entries.len()
            )));
        }
        if let Some(bad) = entries.iter().flatten().find(|&&k| k >= root_order) {
            return Err(invalid(format!("exponent {bad} out of range for root order {root_order}")));
        }
        Ok(Self {
            dim,
            root_order,
            scale,
            entries,
        })
    }

    /// Builds from a function of `(row, col)` returning an unreduced exponent.
    pub fn from_fn(
        dim: usize,
        root_order: u32,
        scale: Scale,
        mut f: impl FnMut(usize, usize) -> Option<i64>,
    ) -> Self {
        let l = i64::from(root_order);
        let mut entries = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                entries.push(f(r, c).map(|k| k.rem_euclid(l) as u32));
            }
        }
        Self {
            dim,
            root_order,
            scale,
            entries,
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, 1, Scale::UNIT, |r, c| (r == c).then_some(0))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn root_order(&self) -> u32 {
        self.root_order
    }

    pub fn scale(&self) -> Scale {
        self.scale
    }

    pub fn get(&self, row: usize, col: usize) -> Option<u32> {
        self.entries[row * self.dim + col]
    }

    pub fn entries(&self) -> &[Option<u32>] {
        &self.entries
    }

    pub fn row(&self, row: usize) -> &[Option<u32>] {
        &self.entries[row * self.dim..(row + 1) * self.dim]
    }

    /// Smallest root order that still expresses every entry.
    pub fn minimal_root_order(&self) -> u32 {
        let l = u64::from(self.root_order);
        let g = self
            .entries
            .iter()
            .flatten()
            .fold(l, |g, &k| crate::field::gcd(g, u64::from(k)));
        (l / g.max(1)) as u32
    }

    /// Re-expresses the entries over `order`, which must be a multiple or divisor of the current order.
    pub fn with_root_order(&self, order: u32) -> Result<Self> {
        if order == self.root_order {
            return Ok(self.clone());
        }
        if order == 0 {
            return Err(invalid("root order must be positive"));
        }
        if order.is_multiple_of(self.root_order) {
            let f = order / self.root_order;
            return Ok(Self {
                entries: self.entries.iter().map(|e| e.map(|k| k * f)).collect(),
                root_order: order,
                ..*self
            });
        }
        if self.root_order.is_multiple_of(order) {
            let f = self.root_order / order;
            if self.entries.iter().flatten().all(|k| k % f == 0) {
                return Ok(Self {
                    entries: self.entries.iter().map(|e| e.map(|k| k / f)).collect(),
                    root_order: order,
                    ..*self
                });
            }
        }
        Err(invalid(format!(
            "entries over order {} cannot be written over order {order}",
            self.root_order
        )))
    }

    pub fn to_complex(&self) -> CMatrix {
        let s = self.scale.value();
        CMatrix::from_fn(self.dim, self.dim, |r, c| match self.get(r, c) {
            Some(k) => unit_phase(self.root_order, k) * s,
            None => Complex64::new(0.0, 0.0),
        })
    }

    /// Kronecker product `self ⊗ other`.
    pub fn tensor(&self, other: &ExactMatrix) -> ExactMatrix {
        let order = lcm(u64::from(self.root_order), u64::from(other.root_order)) as u32;
        let fa = order / self.root_order;
        let fb = order / other.root_order;
        let (da, db) = (self.dim, other.dim);
        let dim = da * db;
        let mut entries = Vec::with_capacity(dim * dim);
        for ra in 0..da {
            for rb in 0..db {
                for ca in 0..da {
                    for cb in 0..db {
                        entries.push(match (self.get(ra, ca), other.get(rb, cb)) {
                            (Some(x), Some(y)) => Some((x * fa + y * fb) % order),
                            _ => None,
                        });
                    }
                }
            }
        }
        ExactMatrix {
            dim,
            root_order: order,
            scale: self.scale.tensor(&other.scale),
            entries,
        }
    }

    /// Left multiplication by an exact diagonal unitary.
    pub fn apply_diagonal(&self, diag: &DiagonalPhases) -> Result<ExactMatrix> {
        if diag.dim() != self.dim {
            return Err(invalid(format!(
                "diagonal of size {} applied to a {}-dimensional matrix",
                diag.dim(),
                self.dim
            )));
        }
        let order = lcm(u64::from(self.root_order), u64::from(diag.root_order)) as u32;
        let fm = order / self.root_order;
        let fd = order / diag.root_order;
        let mut entries = Vec::with_capacity(self.entries.len());
        for r in 0..self.dim {
            let phase = diag.exponents[r] * fd;
            entries.extend(self.row(r).iter().map(|e| e.map(|k| (k * fm + phase) % order)));
        }
        Ok(ExactMatrix {
            dim: self.dim,
            root_order: order,
            scale: self.scale,
            entries,
        })
    }

    /// Reorders rows so that output row `perm[r]` holds input row `r`.
    pub fn permute_rows(&self, perm: &[usize]) -> ExactMatrix {
        let mut entries = vec![None; self.entries.len()];
        for (r, &target) in perm.iter().enumerate() {
            entries[target * self.dim..(target + 1) * self.dim].copy_from_slice(self.row(r));
        }
        ExactMatrix { entries, ..*self }
    }

    /// Recovers exact form from floats, or `None` when some entry is not `scale·α_L^k` or zero.
    pub fn from_complex(m: &CMatrix, root_order: u32, scale: Scale, tol: f64) -> Option<Self> {
        if !m.is_square() || root_order == 0 {
            return None;
        }
        let dim = m.nrows();
        let s = scale.value();
        let l = f64::from(root_order);
        let mut entries = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                let z = m[(r, c)];
                if z.norm() < tol {
                    entries.push(None);
                    continue;
                }
                let k = (z.arg() / std::f64::consts::TAU * l).round().rem_euclid(l) as u32;
                if (unit_phase(root_order, k) * s - z).norm() > tol {
                    return None;
                }
                entries.push(Some(k));
            }
        }
        Some(ExactMatrix {
            dim,
            root_order,
            scale,
            entries,
        })
    }
}

/// Exact diagonal unitary `diag(α_L^{k_0}, α_L^{k_1}, ...)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DiagonalPhases {
    root_order: u32,
    exponents: Vec<u32>,
}

impl DiagonalPhases {
    pub fn new(root_order: u32, exponents: impl IntoIterator<Item = i64>) -> Result<Self> {
        if root_order == 0 {
            return Err(invalid("root order must be positive"));
        }
        let l = i64::from(root_order);
        Ok(Self {
            root_order,
            exponents: exponents.into_iter().map(|k| k.rem_euclid(l) as u32).collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.exponents.len()
    }

    pub fn root_order(&self) -> u32 {
        self.root_order
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn pow(&self, n: i64) -> DiagonalPhases {
        let l = i64::from(self.root_order);
        DiagonalPhases {
            root_order: self.root_order,
            exponents: self
                .exponents
                .iter()
                .map(|&k| (i64::from(k) * n).rem_euclid(l) as u32)
                .collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.exponents.iter().all(|&k| k == 0)
    }

    pub fn to_matrix(&self) -> CMatrix {
        let d = self.dim();
        let mut m = CMatrix::zeros(d, d);
        for (i, &k) in self.exponents.iter().enumerate() {
            m[(i, i)] = unit_phase(self.root_order, k);
        }
        m
    }
}

/// An exactly represented basis (columns are states).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExactBasis {
    label: String,
    matrix: ExactMatrix,
}

impl ExactBasis {
    pub fn new(label: impl Into<String>, matrix: ExactMatrix) -> Self {
        Self {
            label: label.into(),
            matrix,
        }
    }

    pub fn standard(dim: usize) -> Self {
        Self::new("standard", ExactMatrix::identity(dim))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn matrix(&self) -> &ExactMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim
    }

    pub fn to_basis(&self) -> Basis {
        Basis {
            label: self.label.clone(),
            matrix: self.matrix.to_complex(),
        }
    }

    pub fn tensor(&self, other: &ExactBasis) -> ExactBasis {
        ExactBasis {
            label: format!("{} ⊗ {}", self.label, other.label),
            matrix: self.matrix.tensor(&other.matrix),
        }
    }

    pub fn apply_diagonal(&self, diag: &DiagonalPhases) -> Result<ExactBasis> {
        Ok(ExactBasis {
            label: self.label.clone(),
            matrix: self.matrix.apply_diagonal(diag)?,
        })
    }
}

/// A dense orthonormal basis; column `j` is the `j`-th state.
#[derive(Debug, Clone, PartialEq)]
pub struct Basis {
    label: String,
    matrix: CMatrix,
}

impl Basis {
    /// Checks orthonormality of the columns within [`UNITARITY_TOL`].
    pub fn new(label: impl Into<String>, matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(invalid(format!(
                "basis matrix must be square, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let residual = unitarity_residual(&matrix);
        if residual > UNITARITY_TOL {
            return Err(invalid(format!("columns are not orthonormal (residual {residual:.3e})")));
        }
        Ok(Self {
            label: label.into(),
            matrix,
        })
    }

    pub(crate) fn new_unchecked(label: impl Into<String>, matrix: CMatrix) -> Self {
        Self {
            label: label.into(),
            matrix,
        }
    }

    pub fn standard(dim: usize) -> Self {
        Self::new_unchecked("standard", CMatrix::identity(dim, dim))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn state(&self, j: usize) -> Vec<Complex64> {
        self.matrix.column(j).iter().copied().collect()
    }

    pub fn states(&self) -> impl Iterator<Item = Vec<Complex64>> + '_ {
        (0..self.dim()).map(move |j| self.state(j))
    }
}

/// Largest absolute deviation of `M†M` from the identity.
pub fn unitarity_residual(m: &CMatrix) -> f64 {
    let gram = m.adjoint() * m;
    let mut worst = 0.0f64;
    for r in 0..gram.nrows() {
        for c in 0..gram.ncols() {
            let target = if r == c { 1.0 } else { 0.0 };
            worst = worst.max((gram[(r, c)] - Complex64::new(target, 0.0)).norm());
        }
    }
    worst
}

/// Basis whose column `a·d_B + b` is `left_a ⊗ right_b`.
pub fn tensor(left: &Basis, right: &Basis) -> Basis {
    Basis::new_unchecked(
        format!("{} ⊗ {}", left.label, right.label),
        left.matrix.kronecker(&right.matrix),
    )
}

/// `|⟨v|w⟩|²`.
pub fn overlap_sq(v: &[Complex64], w: &[Complex64]) -> Result<f64> {
    if v.len() != w.len() {
        return Err(invalid(format!("dimension mismatch: {} vs {}", v.len(), w.len())));
    }
    Ok(inner(v, w).norm_sqr())
}

/// `⟨v|w⟩`, conjugate-linear in the first argument.
pub fn inner(v: &[Complex64], w: &[Complex64]) -> Complex64 {
    v.iter().zip(w).map(|(a, b)| a.conj() * b).sum()
}

/// Maps every column through `u`, which must be unitary within [`UNITARITY_TOL`].
pub fn apply_unitary(u: &CMatrix, basis: &Basis) -> Result<Basis> {
    if u.nrows() != basis.dim() || u.ncols() != basis.dim() {
        return Err(invalid(format!(
            "{}x{} operator applied to a {}-dimensional basis",
            u.nrows(),
            u.ncols(),
            basis.dim()
        )));
    }
    let residual = unitarity_residual(u);
    if residual > UNITARITY_TOL {
        return Err(invalid(format!("operator is not unitary (residual {residual:.3e})")));
    }
    Ok(Basis::new_unchecked(basis.label.clone(), u * &basis.matrix))
}

/// Index permutation of the subsystem swap: `a·d_B + b ↦ b·d_A + a`.
pub fn swap_permutation(dim: usize, d_a: usize, d_b: usize) -> Result<Vec<usize>> {
    if d_a == 0 || d_b == 0 || d_a * d_b != dim {
        return Err(invalid(format!("dimension {dim} does not factor as {d_a} x {d_b}")));
    }
    Ok((0..dim).map(|i| (i % d_b) * d_a + i / d_b).collect())
}

/// Exchanging the two tensor factors of a state or of every state in a basis.
pub trait SwapSubsystems: Sized {
    fn swap_subsystems(&self, d_a: usize, d_b: usize) -> Result<Self>;
}

impl SwapSubsystems for Vec<Complex64> {
    fn swap_subsystems(&self, d_a: usize, d_b: usize) -> Result<Self> {
        let perm = swap_permutation(self.len(), d_a, d_b)?;
        let mut out = vec![Complex64::new(0.0, 0.0); self.len()];
        for (i, &target) in perm.iter().enumerate() {
            out[target] = self[i];
        }
        Ok(out)
    }
}

impl SwapSubsystems for Basis {
    fn swap_subsystems(&self, d_a: usize, d_b: usize) -> Result<Self> {
        let perm = swap_permutation(self.dim(), d_a, d_b)?;
        let mut m = CMatrix::zeros(self.dim(), self.dim());
        for (i, &target) in perm.iter().enumerate() {
            m.set_row(target, &self.matrix.row(i));
        }
        Ok(Basis::new_unchecked(self.label.clone(), m))
    }
}

impl SwapSubsystems for ExactBasis {
    fn swap_subsystems(&self, d_a: usize, d_b: usize) -> Result<Self> {
        let perm = swap_permutation(self.dim(), d_a, d_b)?;
        Ok(ExactBasis {
            label: self.label.clone(),
            matrix: self.matrix.permute_rows(&perm),
        })
    }
}

/// Which construction produced a set, and with what parameters.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub method: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_a: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_b: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Provenance {
    pub fn method(method: impl Into<String>) -> Self {
        Self {
            method: method.into(),
            ..Self::default()
        }
    }

    pub fn with_p(mut self, p: u64) -> Self {
        self.p = Some(p);
        self
    }

    pub fn with_theta(mut self, theta: u64) -> Self {
        self.theta = Some(theta);
        self
    }

    pub fn with_split(mut self, d_a: u64, d_b: u64) -> Self {
        self.d_a = Some(d_a);
        self.d_b = Some(d_b);
        self
    }

    pub fn with_r(mut self, r: u64) -> Self {
        self.r = Some(r);
        self
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.method)?;
        for (name, v) in [
            ("p", self.p),
            ("theta", self.theta),
            ("dA", self.d_a),
            ("dB", self.d_b),
            ("r", self.r),
            ("seed", self.seed),
        ] {
            if let Some(v) = v {
                write!(f, " {name}={v}")?;
            }
        }
        Ok(())
    }
}

/// One basis of a set, with its exact form when the construction produced one.
#[derive(Debug, Clone, PartialEq)]
pub struct Member {
    basis: Basis,
    exact: Option<ExactBasis>,
}

impl Member {
    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn exact(&self) -> Option<&ExactBasis> {
        self.exact.as_ref()
    }
}

/// An ordered collection of bases over one dimension; labels are unique.
#[derive(Debug, Clone, PartialEq)]
pub struct MubSet {
    dim: usize,
    provenance: Provenance,
    members: Vec<Member>,
}

impl MubSet {
    pub fn new(dim: usize, provenance: Provenance) -> Self {
        Self {
            dim,
            provenance,
            members: Vec::new(),
        }
    }

    pub fn from_exact(dim: usize, provenance: Provenance, bases: Vec<ExactBasis>) -> Result<Self> {
        let mut set = Self::new(dim, provenance);
        for b in bases {
            set.push_exact(b)?;
        }
        Ok(set)
    }

    fn check_member(&self, label: &str, dim: usize) -> Result<()> {
        if dim != self.dim {
            return Err(invalid(format!(
                "basis '{label}' has dimension {dim}, set has {}",
                self.dim
            )));
        }
        if self.members.iter().any(|m| m.basis.label == label) {
            return Err(invalid(format!("duplicate basis label '{label}'")));
        }
        Ok(())
    }

    pub fn push_exact(&mut self, basis: ExactBasis) -> Result<()> {
        self.check_member(basis.label(), basis.dim())?;
        self.members.push(Member {
            basis: basis.to_basis(),
            exact: Some(basis),
        });
        Ok(())
    }

    pub fn push(&mut self, basis: Basis) -> Result<()> {
        self.check_member(basis.label(), basis.dim())?;
        self.members.push(Member { basis, exact: None });
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// A complete set has `d + 1` bases.
    pub fn is_complete(&self) -> bool {
        self.members.len() == self.dim + 1
    }

    pub fn members(&self) -> &[Member] {
        &self.members
    }

    pub fn basis(&self, i: usize) -> &Basis {
        &self.members[i].basis
    }

    pub fn exact(&self, i: usize) -> Option<&ExactBasis> {
        self.members[i].exact.as_ref()
    }

    pub fn bases(&self) -> impl Iterator<Item = &Basis> {
        self.members.iter().map(|m| &m.basis)
    }

    pub fn labels(&self) -> Vec<&str> {
        self.members.iter().map(|m| m.basis.label()).collect()
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.members.iter().position(|m| m.basis.label == label)
    }

    /// The subset keeping only the listed indices, in the given order.
    pub fn select(&self, indices: &[usize]) -> Result<MubSet> {
        let mut seen = HashSet::new();
        let mut members = Vec::with_capacity(indices.len());
        for &i in indices {
            if i >= self.members.len() || !seen.insert(i) {
                return Err(invalid(format!("bad or repeated basis index {i}")));
            }
            members.push(self.members[i].clone());
        }
        Ok(MubSet {
            dim: self.dim,
            provenance: self.provenance.clone(),
            members,
        })
    }

    /// The set with one basis removed.
    pub fn without(&self, index: usize) -> Result<MubSet> {
        let keep: Vec<usize> = (0..self.len()).filter(|&i| i != index).collect();
        if keep.len() == self.len() {
            return Err(invalid(format!("no basis at index {index}")));
        }
        self.select(&keep)
    }
}
