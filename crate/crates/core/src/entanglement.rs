//! Purity-based entanglement analysis of states and basis sets.
//!
//! The purity `Tr ρ_A²` of a reduced state is 1 for product states and
//! `1/min(d_A, d_B)` for maximally entangled ones. Summed over every state of
//! a complete set of MUBs it always equals `d_A·d_B·(d_A + d_B)`.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::matrix::{Basis, CMatrix, MubSet};
use crate::random::haar_state;

/// Default tolerance separating product, partially and maximally entangled states.
pub const CLASS_TOL: f64 = 1e-6;

const NORM_TOL: f64 = 1e-8;
const BATCH: usize = 1024;

/// A split of the global index space into `d_A × d_B`.
///
/// `embedding[i]` is the row-major position `a·d_B + b` of global index `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bipartition {
    d_a: usize,
    d_b: usize,
    embedding: Vec<usize>,
}

impl Bipartition {
    /// The plain split where global index `i` is `(i / d_B, i % d_B)`.
    pub fn new(d_a: usize, d_b: usize) -> Result<Self> {
        if d_a == 0 || d_b == 0 {
            return Err(invalid("subsystem dimensions must be positive"));
        }
        Ok(Self {
            d_a,
            d_b,
            embedding: (0..d_a * d_b).collect(),
        })
    }

    /// Groups the listed subsystems of a multi-qudit register into `A`, the rest into `B`.
    ///
    /// Global indices are row-major over `dims` (first subsystem slowest).
    pub fn of_subsystems(dims: &[usize], part_a: &[usize]) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(invalid("subsystem dimensions must be positive"));
        }
        if part_a.iter().any(|&k| k >= dims.len()) {
            return Err(invalid("subsystem index out of range"));
        }
        let in_a = |k: usize| part_a.contains(&k);
        let d_a: usize = (0..dims.len()).filter(|&k| in_a(k)).map(|k| dims[k]).product();
        let d_b: usize = (0..dims.len()).filter(|&k| !in_a(k)).map(|k| dims[k]).product();
        let total: usize = dims.iter().product();
        let mut embedding = Vec::with_capacity(total);
        for i in 0..total {
            let mut rest = i;
            let mut digits = vec![0usize; dims.len()];
            for k in (0..dims.len()).rev() {
                digits[k] = rest % dims[k];
                rest /= dims[k];
            }
            let (mut a, mut b) = (0, 0);
            for k in 0..dims.len() {
                if in_a(k) {
                    a = a * dims[k] + digits[k];
                } else {
                    b = b * dims[k] + digits[k];
                }
            }
            embedding.push(a * d_b + b);
        }
        Ok(Self { d_a, d_b, embedding })
    }

    pub fn d_a(&self) -> usize {
        self.d_a
    }

    pub fn d_b(&self) -> usize {
        self.d_b
    }

    pub fn dim(&self) -> usize {
        self.d_a * self.d_b
    }

    /// `(a, b)` for global index `i`.
    pub fn split_index(&self, i: usize) -> (usize, usize) {
        let pos = self.embedding[i];
        (pos / self.d_b, pos % self.d_b)
    }

    /// The `d_A × d_B` coefficient matrix `C` with `|ψ⟩ = Σ C_ab |a⟩|b⟩`.
    pub fn coefficients(&self, state: &[Complex64]) -> Result<CMatrix> {
        if state.len() != self.dim() {
            return Err(invalid(format!(
                "state of dimension {} does not fit a {} x {} split",
                state.len(),
                self.d_a,
                self.d_b
            )));
        }
        let mut c = CMatrix::zeros(self.d_a, self.d_b);
        for (i, z) in state.iter().enumerate() {
            let (a, b) = self.split_index(i);
            c[(a, b)] = *z;
        }
        Ok(c)
    }

    pub fn min_dim(&self) -> usize {
        self.d_a.min(self.d_b)
    }
}

fn check_unit(state: &[Complex64]) -> Result<()> {
    let n: f64 = state.iter().map(|z| z.norm_sqr()).sum();
    if (n - 1.0).abs() > NORM_TOL {
        return Err(invalid(format!("state is not normalized (norm² = {n})")));
    }
    Ok(())
}

fn purity_of_gram(g: &CMatrix) -> f64 {
    g.iter().map(|z| z.norm_sqr()).sum()
}

/// `Tr ρ_A² = Tr (CC†)²`.
pub fn reduced_purity(state: &[Complex64], split: &Bipartition) -> Result<f64> {
    check_unit(state)?;
    let c = split.coefficients(state)?;
    Ok(purity_of_gram(&(&c * c.adjoint())))
}

/// Purity of the `B` marginal, `Tr (C†C)²`.
pub fn reduced_purity_b(state: &[Complex64], split: &Bipartition) -> Result<f64> {
    check_unit(state)?;
    let c = split.coefficients(state)?;
    Ok(purity_of_gram(&(c.adjoint() * &c)))
}

/// `d_A·d_B·(d_A + d_B)`, the total purity of any complete set.
pub fn conservation_value(d_a: usize, d_b: usize) -> f64 {
    (d_a * d_b * (d_a + d_b)) as f64
}

/// Haar average of the reduced purity, `(d_A + d_B)/(d_A·d_B + 1)`.
pub fn lubkin_average(d_a: usize, d_b: usize) -> f64 {
    (d_a + d_b) as f64 / (d_a * d_b + 1) as f64
}

fn basis_purities(basis: &Basis, split: &Bipartition) -> Result<Vec<f64>> {
    basis.states().map(|s| reduced_purity(&s, split)).collect()
}

/// Sum of reduced purities over every state of every basis.
pub fn entanglement_sum(set: &MubSet, split: &Bipartition) -> Result<f64> {
    if set.is_empty() {
        return Err(invalid("empty set"));
    }
    if split.dim() != set.dim() {
        return Err(invalid(format!(
            "a {} x {} split does not match dimension {}",
            split.d_a,
            split.d_b,
            set.dim()
        )));
    }
    let per_basis: Vec<f64> = set
        .bases()
        .map(|b| basis_purities(b, split).map(|v| v.iter().sum()))
        .collect::<Result<_>>()?;
    Ok(per_basis.iter().sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateClass {
    Product,
    Partial,
    Maximal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisClass {
    Product,
    Maximal,
    Mixed,
}

pub fn classify_purity(purity: f64, split: &Bipartition, eps: f64) -> StateClass {
    if purity >= 1.0 - eps {
        StateClass::Product
    } else if purity <= 1.0 / split.min_dim() as f64 + eps {
        StateClass::Maximal
    } else {
        StateClass::Partial
    }
}

/// Per-state purities and classes of a set under one bipartition.
#[derive(Debug, Clone, PartialEq)]
pub struct EntanglementProfile {
    pub d_a: usize,
    pub d_b: usize,
    pub tolerance: f64,
    pub complete: bool,
    pub labels: Vec<String>,
    pub purities: Vec<Vec<f64>>,
    pub classes: Vec<Vec<StateClass>>,
    pub basis_classes: Vec<BasisClass>,
    pub total: f64,
}

impl EntanglementProfile {
    pub fn count(&self, class: BasisClass) -> usize {
        self.basis_classes.iter().filter(|&&c| c == class).count()
    }

    pub fn product_bases(&self) -> usize {
        self.count(BasisClass::Product)
    }

    pub fn maximal_bases(&self) -> usize {
        self.count(BasisClass::Maximal)
    }

    pub fn mixed_bases(&self) -> usize {
        self.count(BasisClass::Mixed)
    }

    /// For a complete set holding `min(d_A, d_B) + 1` product bases, whether all
    /// other bases are maximally entangled. `None` when the premise does not apply.
    pub fn rest_maximally_entangled(&self) -> Option<bool> {
        let dmin = self.d_a.min(self.d_b);
        if !self.complete || self.product_bases() != dmin + 1 {
            return None;
        }
        Some(self.product_bases() + self.maximal_bases() == self.basis_classes.len())
    }

    pub fn reference_total(&self) -> f64 {
        conservation_value(self.d_a, self.d_b)
    }
}

pub fn classify_set(set: &MubSet, split: &Bipartition) -> Result<EntanglementProfile> {
    classify_set_with_tolerance(set, split, CLASS_TOL)
}

pub fn classify_set_with_tolerance(set: &MubSet, split: &Bipartition, eps: f64) -> Result<EntanglementProfile> {
    if split.dim() != set.dim() {
        return Err(invalid(format!(
            "a {} x {} split does not match dimension {}",
            split.d_a,
            split.d_b,
            set.dim()
        )));
    }
    let purities: Vec<Vec<f64>> = set
        .bases()
        .map(|b| basis_purities(b, split))
        .collect::<Result<_>>()?;
    let classes: Vec<Vec<StateClass>> = purities
        .iter()
        .map(|row| row.iter().map(|&p| classify_purity(p, split, eps)).collect())
        .collect();
    let basis_classes = classes
        .iter()
        .map(|row| {
            if row.iter().all(|&c| c == StateClass::Product) {
                BasisClass::Product
            } else if row.iter().all(|&c| c == StateClass::Maximal) {
                BasisClass::Maximal
            } else {
                BasisClass::Mixed
            }
        })
        .collect();
    let total = purities.iter().flatten().sum();
    Ok(EntanglementProfile {
        d_a: split.d_a,
        d_b: split.d_b,
        tolerance: eps,
        complete: set.is_complete(),
        labels: set.labels().into_iter().map(String::from).collect(),
        purities,
        classes,
        basis_classes,
        total,
    })
}

/// Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HaarEstimate {
    pub mean: f64,
    pub std_err: f64,
    pub samples: usize,
}

/// Mean reduced purity of Haar-random pure states.
///
/// Samples are drawn in fixed-size batches; batch `k` uses stream `k` of a
/// ChaCha8 generator seeded with `seed`, so the result depends only on `seed`
/// and `samples`, not on how batches are scheduled across threads.
pub fn haar_average_purity(split: &Bipartition, samples: usize, seed: u64) -> Result<HaarEstimate> {
    if samples < 100 {
        return Err(invalid(format!("need at least 100 samples, got {samples}")));
    }
    let batches = samples.div_ceil(BATCH);
    let sums: Vec<(f64, f64)> = (0..batches)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let n = BATCH.min(samples - k * BATCH);
            let mut acc = (0.0, 0.0);
            for _ in 0..n {
                let psi = haar_state(split.dim(), &mut rng);
                let c = split.coefficients(&psi).expect("dimension matches");
                let p = purity_of_gram(&(&c * c.adjoint()));
                acc.0 += p;
                acc.1 += p * p;
            }
            acc
        })
        .collect();
    let (s1, s2) = sums.iter().fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let n = samples as f64;
    let mean = s1 / n;
    let var = ((s2 - n * mean * mean) / (n - 1.0)).max(0.0);
    Ok(HaarEstimate {
        mean,
        std_err: (var / n).sqrt(),
        samples,
    })
}
