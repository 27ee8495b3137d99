//! Product bases: factorization, direct versus indirect structure, product MUB
//! sets in composite dimension, and blocking sets.
//!
//! A direct product basis is `A ⊗ B` for local bases `A`, `B`. An indirect one
//! consists of product states `|a⟩|b(a)⟩` whose second-factor basis depends on
//! the first factor, so it is not a tensor product of two matrices.
//!
//! Blockedness is decided against an explicit finite catalog of candidate
//! product bases. Bases unbiased to a given set form a continuum, so a `true`
//! answer means only that no catalog member extends the set.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::entanglement::{reduced_purity, Bipartition};
use crate::error::{invalid, unsupported, Result};
use crate::field::is_prime;
use crate::matrix::{apply_unitary, overlap_sq, tensor, Basis, CMatrix, ExactBasis, ExactMatrix, MubSet, Provenance, Scale};
use crate::prime::{complete_prime_set, local_basis};
use crate::random::{haar_basis, haar_unitary};
use crate::verification::check_unbiased_pair;

/// Two rays are equal when their overlap² exceeds `1 − RAY_TOL`.
pub const RAY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProductVerdict {
    Direct,
    Indirect,
    NotProduct,
}

/// A product state `a ⊗ b` with unit-norm factors.
#[derive(Debug, Clone, PartialEq)]
pub struct Factors {
    pub first: Vec<Complex64>,
    pub second: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProductClassification {
    pub verdict: ProductVerdict,
    /// Per-column factors when every column is a product state.
    pub factors: Option<Vec<Factors>>,
    /// Local bases `A`, `B` for a direct basis.
    pub local: Option<(Basis, Basis)>,
    /// For a direct basis, column `j` is `A_a ⊗ B_b` up to phase with `(a, b) = index[j]`.
    pub index: Option<Vec<(usize, usize)>>,
}

fn same_ray(v: &[Complex64], w: &[Complex64]) -> bool {
    overlap_sq(v, w).is_ok_and(|o| o > 1.0 - RAY_TOL)
}

/// Splits a product state into unit factors; the first factor carries the phase.
fn factorize(state: &[Complex64], split: &Bipartition) -> Result<Factors> {
    let c = split.coefficients(state)?;
    let pivot = (0..c.nrows())
        .max_by(|&x, &y| c.row(x).norm().total_cmp(&c.row(y).norm()))
        .expect("nonempty");
    let row_norm = c.row(pivot).norm();
    let second: Vec<Complex64> = c.row(pivot).iter().map(|z| z / row_norm).collect();
    let first: Vec<Complex64> = (0..c.nrows())
        .map(|a| (0..c.ncols()).map(|b| c[(a, b)] * second[b].conj()).sum())
        .collect();
    Ok(Factors { first, second })
}

/// Ray classes of `vectors`: the representative index of each vector's class.
fn ray_classes(vectors: &[&[Complex64]]) -> (Vec<usize>, Vec<usize>) {
    let mut reps: Vec<usize> = Vec::new();
    let class = vectors
        .iter()
        .enumerate()
        .map(|(i, v)| match reps.iter().position(|&r| same_ray(vectors[r], v)) {
            Some(k) => k,
            None => {
                reps.push(i);
                reps.len() - 1
            }
        })
        .collect();
    (reps, class)
}

fn columns_to_basis(label: &str, cols: &[&[Complex64]]) -> Basis {
    let d = cols.len();
    Basis::new(label, CMatrix::from_fn(d, d, |r, c| cols[c][r])).expect("orthonormal local states")
}

/// Classifies `basis` under the `d_A × d_B` split.
pub fn classify_product_basis(basis: &Basis, d_a: usize, d_b: usize) -> Result<ProductClassification> {
    if d_a * d_b != basis.dim() {
        return Err(invalid(format!("dimension {} does not factor as {d_a} x {d_b}", basis.dim())));
    }
    let split = Bipartition::new(d_a, d_b)?;
    let not_product = ProductClassification {
        verdict: ProductVerdict::NotProduct,
        factors: None,
        local: None,
        index: None,
    };
    let mut factors = Vec::with_capacity(basis.dim());
    for state in basis.states() {
        if reduced_purity(&state, &split)? < 1.0 - RAY_TOL {
            return Ok(not_product);
        }
        factors.push(factorize(&state, &split)?);
    }
    let firsts: Vec<&[Complex64]> = factors.iter().map(|f| f.first.as_slice()).collect();
    let seconds: Vec<&[Complex64]> = factors.iter().map(|f| f.second.as_slice()).collect();
    let (first_reps, first_class) = ray_classes(&firsts);
    let (second_reps, second_class) = ray_classes(&seconds);
    // A ⊗ B holds exactly d_A first rays and d_B second rays, each pair used once.
    let mut pairs: Vec<(usize, usize)> = first_class.iter().copied().zip(second_class.iter().copied()).collect();
    let index = pairs.clone();
    pairs.sort_unstable();
    pairs.dedup();
    let direct = first_reps.len() == d_a && second_reps.len() == d_b && pairs.len() == d_a * d_b;
    if !direct {
        return Ok(ProductClassification {
            verdict: ProductVerdict::Indirect,
            factors: Some(factors),
            local: None,
            index: None,
        });
    }
    let a = columns_to_basis("A", &first_reps.iter().map(|&i| firsts[i]).collect::<Vec<_>>());
    let b = columns_to_basis("B", &second_reps.iter().map(|&i| seconds[i]).collect::<Vec<_>>());
    Ok(ProductClassification {
        verdict: ProductVerdict::Direct,
        factors: Some(factors),
        local: Some((a, b)),
        index: Some(index),
    })
}

/// Largest `1 − |⟨col_j | A_a ⊗ B_b⟩|²` over the columns of a direct basis.
pub fn recomposition_error(basis: &Basis, class: &ProductClassification) -> Option<f64> {
    let (a, b) = class.local.as_ref()?;
    let index = class.index.as_ref()?;
    let ab = tensor(a, b);
    let d_b = b.dim();
    let worst = index
        .iter()
        .enumerate()
        .map(|(j, &(x, y))| 1.0 - overlap_sq(&basis.state(j), &ab.state(x * d_b + y)).expect("same dimension"))
        .fold(0.0, f64::max);
    Some(worst)
}

/// `{|a_m⟩ ⊗ |b_m⟩}` for `m < min(p_A, p_B)`, then the standard basis.
pub fn product_mub_set(p_a: u64, p_b: u64) -> Result<MubSet> {
    for p in [p_a, p_b] {
        if !is_prime(p) {
            return Err(unsupported(format!("{p} is not prime")));
        }
    }
    let mut bases = (0..p_a.min(p_b))
        .map(|m| Ok(local_basis(p_a, m)?.tensor(&local_basis(p_b, m)?)))
        .collect::<Result<Vec<_>>>()?;
    bases.push(ExactBasis::standard((p_a * p_b) as usize));
    MubSet::from_exact((p_a * p_b) as usize, Provenance::method("product").with_split(p_a, p_b), bases)
}

/// Whether `A ⊗ B` and `A′ ⊗ B′` are mutually unbiased.
pub fn unbiased_product_pair_check(a: &Basis, a2: &Basis, b: &Basis, b2: &Basis, tol: f64) -> Result<bool> {
    if a.dim() != a2.dim() || b.dim() != b2.dim() {
        return Err(invalid("local bases must pair up by dimension"));
    }
    Ok(check_unbiased_pair(&tensor(a, b), &tensor(a2, b2), tol)?.unbiased)
}

/// Outcome of one randomized product-versus-factor unbiasedness comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FactorTrial {
    pub product_unbiased: bool,
    pub factors_unbiased: bool,
}

/// Two local bases that are either a rotated pair of canonical MUBs or independent Haar bases.
fn local_pair(p: u64, unbiased: bool, rng: &mut ChaCha8Rng) -> Result<(Basis, Basis)> {
    let d = p as usize;
    let u = haar_unitary(d, rng);
    let m1 = rng.random_range(0..=p);
    let first = apply_unitary(&u, &local_basis(p, m1)?.to_basis())?;
    let second = if unbiased {
        let m2 = (m1 + rng.random_range(1..=p)) % (p + 1);
        apply_unitary(&u, &local_basis(p, m2)?.to_basis())?
    } else {
        haar_basis(d, rng)
    };
    Ok((first, second))
}

/// Randomized comparison of product-level and factor-level unbiasedness.
///
/// Each side independently gets an unbiased or a random local pair with equal
/// probability, so all four factor combinations occur.
pub fn factor_trials(p_a: u64, p_b: u64, trials: usize, seed: u64, tol: f64) -> Result<Vec<FactorTrial>> {
    for p in [p_a, p_b] {
        if !is_prime(p) {
            return Err(unsupported(format!("{p} is not prime")));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..trials)
        .map(|_| {
            let (a, a2) = local_pair(p_a, rng.random_bool(0.5), &mut rng)?;
            let (b, b2) = local_pair(p_b, rng.random_bool(0.5), &mut rng)?;
            let factors_unbiased =
                check_unbiased_pair(&a, &a2, tol)?.unbiased && check_unbiased_pair(&b, &b2, tol)?.unbiased;
            Ok(FactorTrial {
                product_unbiased: unbiased_product_pair_check(&a, &a2, &b, &b2, tol)?,
                factors_unbiased,
            })
        })
        .collect()
}

/// `{|(j_1)_0⟩|(j_2)_{j_1}⟩ ⋯ |(j_r)_{j_{r−1}}⟩}`, where `|(j)_m⟩` is state `j`
/// of local basis `m`. Columns run over `(j_1, …, j_r)` with `j_r` fastest.
pub fn chained_basis(p: u64, r: u32) -> Result<ExactBasis> {
    if !is_prime(p) {
        return Err(unsupported(format!("{p} is not prime")));
    }
    if r < 2 {
        return Err(invalid("a chained basis needs at least two subsystems"));
    }
    let locals = (0..p).map(|m| local_basis(p, m)).collect::<Result<Vec<_>>>()?;
    let order = locals[0].matrix().root_order();
    let pd = p as usize;
    let dim = pd.pow(r);
    let digits = |mut x: usize| {
        let mut out = vec![0usize; r as usize];
        for k in (0..r as usize).rev() {
            out[k] = x % pd;
            x /= pd;
        }
        out
    };
    let matrix = ExactMatrix::from_fn(dim, order, Scale::inv_sqrt(dim as u64)?, |row, col| {
        let (s, j) = (digits(row), digits(col));
        let mut exp = 0i64;
        for k in 0..r as usize {
            // subsystem k sits in basis j_{k-1} (basis 0 for the first), state j_k
            let m = if k == 0 { 0 } else { j[k - 1] % pd };
            exp += i64::from(locals[m].matrix().get(s[k], j[k])?);
        }
        Some(exp)
    });
    Ok(ExactBasis::new("chained", matrix))
}

/// The standard basis and the chained indirect basis in dimension `p^r`.
pub fn blocking_pair(p: u64, r: u32) -> Result<MubSet> {
    let chained = chained_basis(p, r)?;
    let dim = chained.dim();
    MubSet::from_exact(
        dim,
        Provenance::method("blocking-pair").with_p(p).with_r(u64::from(r)),
        vec![ExactBasis::standard(dim), chained],
    )
}

/// All tensor products of the canonical complete sets of the given prime local dimensions.
pub fn canonical_product_catalog(local_primes: &[u64]) -> Result<Vec<Basis>> {
    let (&first, rest) = local_primes
        .split_first()
        .ok_or_else(|| invalid("catalog needs at least one subsystem"))?;
    let mut catalog: Vec<ExactBasis> = complete_prime_set(first)?.members().iter().filter_map(|m| m.exact().cloned()).collect();
    for &p in rest {
        let locals: Vec<ExactBasis> = complete_prime_set(p)?.members().iter().filter_map(|m| m.exact().cloned()).collect();
        catalog = catalog
            .iter()
            .flat_map(|c| locals.iter().map(move |l| c.tensor(l)))
            .collect();
    }
    Ok(catalog.iter().map(ExactBasis::to_basis).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockedVerdict {
    pub blocked: bool,
    /// Catalog index and label of the first basis unbiased to the whole set.
    pub witness: Option<(usize, String)>,
}

/// Whether no catalog basis is unbiased to every basis of `set`.
pub fn is_blocked(set: &MubSet, catalog: &[Basis], tol: f64) -> Result<BlockedVerdict> {
    if let Some(b) = catalog.iter().find(|b| b.dim() != set.dim()) {
        return Err(invalid(format!("catalog basis '{}' has dimension {}, set has {}", b.label(), b.dim(), set.dim())));
    }
    let extends: Vec<bool> = catalog
        .par_iter()
        .map(|cand| {
            set.bases()
                .all(|b| check_unbiased_pair(b, cand, tol).is_ok_and(|v| v.unbiased))
        })
        .collect();
    let witness = extends
        .iter()
        .position(|&e| e)
        .map(|i| (i, catalog[i].label().to_string()));
    Ok(BlockedVerdict {
        blocked: witness.is_none(),
        witness,
    })
}
