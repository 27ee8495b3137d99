//! Unbiasedness, set validation and the 2-design test.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::matrix::{unitarity_residual, Basis, CMatrix, MubSet};

pub mod fixtures;

/// Default tolerance for unbiasedness and frame-potential equality.
pub const DEFAULT_TOL: f64 = 1e-9;

/// One overlap that breaks unbiasedness.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub basis_a: usize,
    pub basis_b: usize,
    pub label_a: String,
    pub label_b: String,
    pub state_a: usize,
    pub state_b: usize,
    pub overlap_sq: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnbiasedVerdict {
    pub unbiased: bool,
    pub max_deviation: f64,
    /// The overlap with the largest deviation.
    pub worst: (usize, usize, f64),
}

/// All `|⟨a_i|b_j⟩|²` as a `d × d` grid.
pub fn overlap_grid(a: &Basis, b: &Basis) -> Result<Vec<Vec<f64>>> {
    if a.dim() != b.dim() {
        return Err(invalid(format!("dimension mismatch: {} vs {}", a.dim(), b.dim())));
    }
    let g = a.matrix().adjoint() * b.matrix();
    Ok((0..g.nrows())
        .map(|i| (0..g.ncols()).map(|j| g[(i, j)].norm_sqr()).collect())
        .collect())
}

/// Whether every overlap² between the two bases is within `tol` of `1/d`.
pub fn check_unbiased_pair(a: &Basis, b: &Basis, tol: f64) -> Result<UnbiasedVerdict> {
    let grid = overlap_grid(a, b)?;
    let target = 1.0 / a.dim() as f64;
    let mut worst = (0, 0, grid[0][0]);
    let mut max_deviation = -1.0;
    for (i, row) in grid.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            let dev = (v - target).abs();
            if dev > max_deviation {
                max_deviation = dev;
                worst = (i, j, v);
            }
        }
    }
    Ok(UnbiasedVerdict {
        unbiased: max_deviation < tol,
        max_deviation,
        worst,
    })
}

/// Whether two bases contain the same rays, in any column order and with any phases.
pub fn same_states(a: &Basis, b: &Basis, tol: f64) -> bool {
    let Ok(grid) = overlap_grid(a, b) else {
        return false;
    };
    let mut used = vec![false; b.dim()];
    for row in &grid {
        match row.iter().enumerate().find(|&(j, &v)| !used[j] && v > 1.0 - tol) {
            Some((j, _)) => used[j] = true,
            None => return false,
        }
    }
    true
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairDeviation {
    pub basis_a: usize,
    pub basis_b: usize,
    pub max_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub dim: usize,
    pub bases: usize,
    pub tolerance: f64,
    pub complete: bool,
    pub labels: Vec<String>,
    /// Largest deviation of `B†B` from the identity, per basis.
    pub orthonormality: Vec<f64>,
    pub pairs: Vec<PairDeviation>,
    pub witnesses: Vec<Witness>,
}

impl VerificationReport {
    pub fn orthonormal(&self) -> bool {
        self.orthonormality.iter().all(|&r| r < self.tolerance)
    }

    pub fn unbiased(&self) -> bool {
        self.pairs.iter().all(|p| p.max_deviation < self.tolerance)
    }

    pub fn passed(&self) -> bool {
        self.orthonormal() && self.unbiased()
    }

    pub fn max_deviation(&self) -> f64 {
        self.pairs.iter().map(|p| p.max_deviation).fold(0.0, f64::max)
    }
}

/// Orthonormality of every basis and unbiasedness of every pair.
pub fn check_mub_set(set: &MubSet, tol: f64) -> VerificationReport {
    let n = set.len();
    let orthonormality: Vec<f64> = set.bases().map(|b| unitarity_residual(b.matrix())).collect();
    let index_pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let verdicts: Vec<(PairDeviation, Option<Witness>)> = index_pairs
        .par_iter()
        .map(|&(i, j)| {
            let v = check_unbiased_pair(set.basis(i), set.basis(j), tol).expect("same dimension");
            let witness = (!v.unbiased).then(|| Witness {
                basis_a: i,
                basis_b: j,
                label_a: set.basis(i).label().to_string(),
                label_b: set.basis(j).label().to_string(),
                state_a: v.worst.0,
                state_b: v.worst.1,
                overlap_sq: v.worst.2,
            });
            (
                PairDeviation {
                    basis_a: i,
                    basis_b: j,
                    max_deviation: v.max_deviation,
                },
                witness,
            )
        })
        .collect();
    let (pairs, witnesses): (Vec<_>, Vec<_>) = verdicts.into_iter().unzip();
    VerificationReport {
        dim: set.dim(),
        bases: n,
        tolerance: tol,
        complete: set.is_complete(),
        labels: set.labels().into_iter().map(String::from).collect(),
        orthonormality,
        pairs,
        witnesses: witnesses.into_iter().flatten().collect(),
    }
}

/// `Σ_{i,j} |⟨ψ_i|ψ_j⟩|⁴` over all ordered pairs, including `i = j`.
pub fn frame_potential(states: &[Vec<Complex64>]) -> f64 {
    let n = states.len();
    if n == 0 {
        return 0.0;
    }
    let d = states[0].len();
    let m = CMatrix::from_fn(d, n, |r, c| states[c][r]);
    let g = m.adjoint() * &m;
    g.iter().map(|z| z.norm_sqr().powi(2)).sum()
}

/// The lower bound `2N²/(d(d+1))` on the frame potential of `N` unit vectors,
/// attained exactly by 2-designs.
pub fn welch_value(states: usize, dim: usize) -> f64 {
    2.0 * (states * states) as f64 / (dim * (dim + 1)) as f64
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DesignVerdict {
    pub design: bool,
    pub frame_potential: f64,
    pub welch_value: f64,
    pub states: usize,
}

impl DesignVerdict {
    pub fn excess(&self) -> f64 {
        self.frame_potential - self.welch_value
    }
}

/// Frame potential of all states of the set, summed block by block over basis pairs.
pub fn set_frame_potential(set: &MubSet) -> f64 {
    let n = set.len();
    let blocks: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut row = 0.0;
            for j in i..n {
                let g = set.basis(i).matrix().adjoint() * set.basis(j).matrix();
                let s: f64 = g.iter().map(|z| z.norm_sqr().powi(2)).sum();
                row += if i == j { s } else { 2.0 * s };
            }
            row
        })
        .collect();
    blocks.iter().sum()
}

/// Whether the set's states form a 2-design, i.e. meet the Welch bound within `tol`.
pub fn check_2design(set: &MubSet, tol: f64) -> DesignVerdict {
    let states = set.len() * set.dim();
    let fp = set_frame_potential(set);
    let welch = welch_value(states, set.dim());
    DesignVerdict {
        design: (fp - welch).abs() < tol,
        frame_potential: fp,
        welch_value: welch,
        states,
    }
}

/// Largest entry of `(1/N)Σ (|ψ⟩⟨ψ|)^{⊗2} − Π_sym/dim(Sym²)`, the direct second-moment test.
///
/// Builds `d² × d²` operators, so it is limited to `d ≤ 4`.
pub fn moment_operator_deviation(set: &MubSet) -> Result<f64> {
    let d = set.dim();
    if d > 4 {
        return Err(invalid(format!("moment operator check is limited to d <= 4, got {d}")));
    }
    if set.is_empty() {
        return Err(invalid("empty set"));
    }
    let dd = d * d;
    let mut acc = CMatrix::zeros(dd, dd);
    let mut count = 0usize;
    for b in set.bases() {
        for psi in b.states() {
            let v = CMatrix::from_fn(d, 1, |r, _| psi[r]);
            let vv = v.kronecker(&v);
            acc += &vv * vv.adjoint();
            count += 1;
        }
    }
    acc.unscale_mut(count as f64);
    let sym_dim = (d * (d + 1) / 2) as f64;
    let mut worst = 0.0f64;
    for r in 0..dd {
        for c in 0..dd {
            let (i, j) = (r / d, r % d);
            let (k, l) = (c / d, c % d);
            // Π_sym = (I + SWAP)/2
            let mut target = 0.0;
            if i == k && j == l {
                target += 0.5;
            }
            if i == l && j == k {
                target += 0.5;
            }
            worst = worst.max((acc[(r, c)] - Complex64::new(target / sym_dim, 0.0)).norm());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::composite::two_qubit_complete_set;
    use crate::matrix::Provenance;
    use crate::prime::{complete_prime_set, qubit_mubs};
    use crate::random::haar_state;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn qubit_pair_is_unbiased() {
        let set = qubit_mubs();
        let v = check_unbiased_pair(set.basis(0), set.basis(1), 1e-12).unwrap();
        assert!(v.unbiased);
        assert!(v.max_deviation < 1e-15);
    }

    #[test]
    fn basis_is_biased_against_itself() {
        let s = Basis::standard(4);
        let v = check_unbiased_pair(&s, &s, DEFAULT_TOL).unwrap();
        assert!(!v.unbiased);
        assert_eq!(v.worst.2, 1.0);
        assert!(check_unbiased_pair(&s, &Basis::standard(3), DEFAULT_TOL).is_err());
    }

    #[test]
    fn duplicated_basis_fails_with_witness() {
        let set = complete_prime_set(3).unwrap();
        let mut dup = set.select(&[0, 1]).unwrap();
        dup.push(set.basis(0).clone().with_label("copy")).unwrap();
        let report = check_mub_set(&dup, DEFAULT_TOL);
        assert!(!report.passed());
        assert_eq!(report.witnesses.len(), 1);
        let w = &report.witnesses[0];
        assert_eq!((w.basis_a, w.basis_b), (0, 2));
        assert!((w.overlap_sq - 1.0).abs() < 1e-12);
    }

    #[test]
    fn qubit_frame_potential_is_twelve() {
        // 6 self terms of 1 plus 24 cross terms of 1/4
        let set = qubit_mubs();
        let v = check_2design(&set, DEFAULT_TOL);
        assert!((v.frame_potential - 12.0).abs() < 1e-12);
        assert!(v.design);
        let states: Vec<_> = set.bases().flat_map(|b| b.states()).collect();
        assert!((frame_potential(&states) - 12.0).abs() < 1e-12);
    }

    #[test]
    fn welch_bound_holds_for_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (n, d) in [(3, 2), (10, 3), (20, 4), (7, 7)] {
            let states: Vec<_> = (0..n).map(|_| haar_state(d, &mut rng)).collect();
            assert!(frame_potential(&states) >= welch_value(n, d) - 1e-12);
        }
    }

    #[test]
    fn moment_operator_agrees_with_frame_potential() {
        for set in [qubit_mubs(), complete_prime_set(3).unwrap(), two_qubit_complete_set()] {
            assert!(moment_operator_deviation(&set).unwrap() < 1e-12);
            let partial = set.without(0).unwrap();
            assert!(moment_operator_deviation(&partial).unwrap() > 1e-3);
            assert!(!check_2design(&partial, DEFAULT_TOL).design);
        }
        let big = MubSet::new(5, Provenance::method("empty"));
        assert!(moment_operator_deviation(&big).is_err());
    }

    #[test]
    fn same_states_ignores_order_and_phase() {
        let a = complete_prime_set(3).unwrap().basis(1).clone();
        let mut m = a.matrix().clone();
        m.swap_columns(0, 2);
        m.column_mut(1).iter_mut().for_each(|z| *z *= Complex64::new(0.0, 1.0));
        let b = Basis::new("b", m).unwrap();
        assert!(same_states(&a, &b, 1e-9));
        assert!(!same_states(&a, &Basis::standard(3), 1e-9));
    }
}
