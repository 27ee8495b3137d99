//! Complete sets of `p + 1` mutually unbiased bases in prime dimension.
//!
//! Bases are indexed by `m = 0..p`; `m = p` is the standard basis and the
//! others have the Fourier–Gauss form `|j_m⟩ = p^{-1/2} Σ_s α_p^{js + ms²} |s⟩`.
//! For `p = 2` the formula is replaced by the σ_x and σ_y eigenbases.

use crate::error::{invalid, unsupported, Result};
use crate::field::is_prime;
use crate::matrix::{DiagonalPhases, ExactBasis, ExactMatrix, MubSet, Provenance, Scale};

pub fn standard_basis(d: usize) -> Result<ExactBasis> {
    if d == 0 {
        return Err(invalid("dimension must be positive"));
    }
    Ok(ExactBasis::standard(d))
}

/// Label of the `m`-th basis in prime dimension `p`.
pub fn basis_label(p: u64, m: u64) -> String {
    if m == p {
        "standard".to_string()
    } else {
        format!("m={m}")
    }
}

/// Column `j`, row `s` holds `α_p^{js + ms²} / √p`.
pub fn fourier_gauss_basis(p: u64, m: u64) -> Result<ExactBasis> {
    if p == 2 {
        return Err(unsupported("the Fourier–Gauss formula does not apply to p = 2; use qubit_mubs"));
    }
    if !is_prime(p) {
        return Err(invalid(format!("{p} is not prime")));
    }
    if m >= p {
        return Err(invalid(format!("m = {m} out of range for p = {p}")));
    }
    let (pi, mi) = (p as i64, m as i64);
    let matrix = ExactMatrix::from_fn(p as usize, p as u32, Scale::inv_sqrt(p)?, |s, j| {
        let (s, j) = (s as i64, j as i64);
        Some((j * s + mi * s * s) % pi)
    });
    Ok(ExactBasis::new(basis_label(p, m), matrix))
}

/// Qubit bases over the fourth roots of unity: `m = 0` is the σ_x eigenbasis,
/// `m = 1` the σ_y eigenbasis and `m = 2` the standard basis.
pub fn qubit_basis(m: u64) -> Result<ExactBasis> {
    let entries = match m {
        0 => vec![Some(0), Some(0), Some(0), Some(2)],
        1 => vec![Some(0), Some(0), Some(1), Some(3)],
        2 => return Ok(ExactBasis::standard(2)),
        _ => return Err(invalid(format!("qubit basis index {m} out of range 0..=2"))),
    };
    Ok(ExactBasis::new(
        basis_label(2, m),
        ExactMatrix::new(2, 4, Scale::inv_sqrt(2)?, entries)?,
    ))
}

/// The `m`-th member of the complete set in prime dimension `p` (`m = p` is standard).
pub fn local_basis(p: u64, m: u64) -> Result<ExactBasis> {
    if !is_prime(p) {
        return Err(unsupported(format!("{p} is not prime")));
    }
    match m {
        _ if m > p => Err(invalid(format!("basis index {m} out of range 0..={p}"))),
        _ if m == p => standard_basis(p as usize),
        _ if p == 2 => qubit_basis(m),
        _ => fourier_gauss_basis(p, m),
    }
}

pub fn qubit_mubs() -> MubSet {
    let bases = (0..=2).map(qubit_basis).collect::<Result<Vec<_>>>().expect("qubit bases");
    MubSet::from_exact(2, Provenance::method("prime").with_p(2), bases).expect("distinct labels")
}

/// `W = diag(1, α_p, α_p^4, ..., α_p^{(p-1)²})`, which sends basis `m` to `m + 1 mod p`.
pub fn w_operator(p: u64) -> Result<DiagonalPhases> {
    if p == 2 {
        return Err(unsupported("W cycles the Fourier–Gauss bases, which need an odd prime"));
    }
    if !is_prime(p) {
        return Err(invalid(format!("{p} is not prime")));
    }
    DiagonalPhases::new(p as u32, (0..p as i64).map(|s| s * s))
}

/// Fourier–Gauss bases `m = 0..p-1` followed by the standard basis; the qubit triple for `p = 2`.
pub fn complete_prime_set(p: u64) -> Result<MubSet> {
    if !is_prime(p) {
        return Err(invalid(format!("{p} is not prime")));
    }
    if p == 2 {
        return Ok(qubit_mubs());
    }
    let bases = (0..=p).map(|m| local_basis(p, m)).collect::<Result<Vec<_>>>()?;
    MubSet::from_exact(p as usize, Provenance::method("prime").with_p(p), bases)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qutrit_columns() {
        let b0 = fourier_gauss_basis(3, 0).unwrap();
        let col1: Vec<_> = (0..3).map(|s| b0.matrix().get(s, 1)).collect();
        assert_eq!(col1, vec![Some(0), Some(1), Some(2)]);
        let b1 = fourier_gauss_basis(3, 1).unwrap();
        let col0: Vec<_> = (0..3).map(|s| b1.matrix().get(s, 0)).collect();
        assert_eq!(col0, vec![Some(0), Some(1), Some(1)]);
        assert_eq!(b1.matrix().scale(), Scale::inv_sqrt(3).unwrap());
    }

    #[test]
    fn quint_m4_first_column() {
        let b = fourier_gauss_basis(5, 4).unwrap();
        let col: Vec<_> = (0..5).map(|s| b.matrix().get(s, 0)).collect();
        assert_eq!(col, vec![Some(0), Some(4), Some(1), Some(1), Some(4)]);
    }

    #[test]
    fn qubit_special_case() {
        assert!(fourier_gauss_basis(2, 0).is_err());
        let b1 = qubit_basis(1).unwrap().to_basis();
        let s = 0.5f64.sqrt();
        assert!((b1.matrix()[(1, 0)].im - s).abs() < 1e-15);
        assert!((b1.matrix()[(1, 1)].im + s).abs() < 1e-15);
        assert_eq!(qubit_mubs().labels(), vec!["m=0", "m=1", "standard"]);
    }

    #[test]
    fn w_diagonal() {
        assert_eq!(w_operator(3).unwrap().exponents(), &[0, 1, 1]);
        assert_eq!(w_operator(5).unwrap().exponents(), &[0, 1, 4, 4, 1]);
        assert!(w_operator(2).is_err());
    }

    #[test]
    fn w_cycles_bases_exactly() {
        for p in [3u64, 5, 7] {
            let w = w_operator(p).unwrap();
            for m in 0..p {
                let next = fourier_gauss_basis(p, m).unwrap().apply_diagonal(&w).unwrap();
                let want = fourier_gauss_basis(p, (m + 1) % p).unwrap();
                assert_eq!(next.matrix(), want.matrix(), "p={p} m={m}");
            }
        }
    }

    #[test]
    fn complete_set_shape() {
        let set = complete_prime_set(5).unwrap();
        assert_eq!(set.len(), 6);
        assert!(set.is_complete());
        assert_eq!(set.labels().last(), Some(&"standard"));
        assert!(matches!(complete_prime_set(6), Err(crate::MubError::InvalidArgument(_))));
    }
}
