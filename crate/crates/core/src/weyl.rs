//! Heisenberg–Weyl shift and phase operators in prime dimension.
//!
//! `X|s⟩ = |s+1⟩`, `Z|s⟩ = α_p^s |s⟩`. Labels `(a, b)` name `X^a Z^b` up to phase;
//! the partition into commuting classes only needs that projective structure.

use std::fmt;

use crate::error::{invalid, unsupported, Result};
use crate::field::{is_prime, PrimeField};
use crate::matrix::{ExactBasis, ExactMatrix, MubSet, Provenance, Scale};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeylLabel {
    p: u64,
    a: u64,
    b: u64,
}

impl WeylLabel {
    pub fn new(p: u64, a: i64, b: i64) -> Result<Self> {
        if !is_prime(p) {
            return Err(invalid(format!("{p} is not prime")));
        }
        let pi = p as i64;
        Ok(Self {
            p,
            a: a.rem_euclid(pi) as u64,
            b: b.rem_euclid(pi) as u64,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn shift(&self) -> u64 {
        self.a
    }

    pub fn phase(&self) -> u64 {
        self.b
    }

    pub fn is_identity(&self) -> bool {
        self.a == 0 && self.b == 0
    }
}

impl fmt::Display for WeylLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "X^{} Z^{}", self.a, self.b)
    }
}

/// `X^a Z^b` as an exact matrix: column `s` has `α_p^{bs}` in row `s + a`.
pub fn weyl_matrix(label: WeylLabel) -> ExactMatrix {
    let p = label.p as usize;
    let (a, b) = (label.a as usize, label.b as i64);
    ExactMatrix::from_fn(p, label.p as u32, Scale::UNIT, |row, col| {
        ((col + a) % p == row).then(|| b * col as i64)
    })
}

/// `X^{a1}Z^{b1}` and `X^{a2}Z^{b2}` commute iff `a1·b2 − a2·b1 ≡ 0 (mod p)`.
pub fn commutes(l1: WeylLabel, l2: WeylLabel) -> Result<bool> {
    if l1.p != l2.p {
        return Err(invalid(format!("labels over p = {} and p = {}", l1.p, l2.p)));
    }
    let f = PrimeField::new(l1.p)?;
    Ok(f.mul(l1.a, l2.b) == f.mul(l2.a, l1.b))
}

/// The `p + 1` classes of commuting non-identity operators: powers of `Z`, then of `XZ^c` for `c = 0..p`.
pub fn commuting_classes(p: u64) -> Result<Vec<Vec<WeylLabel>>> {
    if !is_prime(p) {
        return Err(invalid(format!("{p} is not prime")));
    }
    let pi = p as i64;
    let mut classes = Vec::with_capacity(p as usize + 1);
    classes.push((1..pi).map(|n| WeylLabel::new(p, 0, n)).collect::<Result<Vec<_>>>()?);
    for c in 0..pi {
        classes.push((1..pi).map(|n| WeylLabel::new(p, n, n * c)).collect::<Result<Vec<_>>>()?);
    }
    Ok(classes)
}

/// Eigenbasis of `X Z^k` for odd prime `p`, from the closed form
/// `|j⟩ = p^{-1/2} Σ_s α_p^{(j+m)s − 2mξ_s} |s⟩` with `2m ≡ k` and `ξ_s = (p−s)(p+s−1)/2`.
pub fn eigenbasis_xz(p: u64, k: u64) -> Result<ExactBasis> {
    if p == 2 {
        return Err(unsupported("p = 2 eigenbases are the qubit set"));
    }
    let f = PrimeField::new(p)?;
    if k >= p {
        return Err(invalid(format!("k = {k} out of range for p = {p}")));
    }
    let m = f.mul(k, f.inv(2).expect("2 is invertible for odd p")) as i64;
    let pi = p as i64;
    let xi = |s: i64| (pi - s) * (pi + s - 1) / 2;
    let matrix = ExactMatrix::from_fn(p as usize, p as u32, Scale::inv_sqrt(p)?, |s, j| {
        let (s, j) = (s as i64, j as i64);
        Some(((j + m) * s - 2 * m * (xi(s) % pi)) % pi)
    });
    Ok(ExactBasis::new(format!("XZ^{k}"), matrix))
}

/// Joint eigenbases of the commuting classes: standard for `Z`, then `XZ^c`.
pub fn class_eigenbases(p: u64) -> Result<MubSet> {
    let mut bases = vec![ExactBasis::standard(p as usize).with_label("Z")];
    for c in 0..p {
        bases.push(eigenbasis_xz(p, c)?);
    }
    MubSet::from_exact(p as usize, Provenance::method("weyl").with_p(p), bases)
}
