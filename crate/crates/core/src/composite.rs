//! Complete sets in composite dimension obtained from product bases and
//! diagonal entangling gates: two qubits, two qupits (`d = p²`) and three qubits.

use crate::error::{invalid, unsupported, MubError, Result};
use crate::field::{find_theta, is_prime, is_valid_theta};
use crate::matrix::{
    Basis, DiagonalPhases, ExactBasis, MubSet, Provenance, SwapSubsystems,
};
use crate::prime::local_basis;

/// `P_p^power`: the diagonal gate `|s,t⟩ ↦ α_p^{s·t·power} |s,t⟩` on two qupits.
///
/// For `p = 2` this is the controlled sign.
pub fn control_phase(p: u64, power: i64) -> Result<DiagonalPhases> {
    if !is_prime(p) {
        return Err(invalid(format!("{p} is not prime")));
    }
    let pi = p as i64;
    let pw = power.rem_euclid(pi);
    DiagonalPhases::new(
        p as u32,
        (0..pi).flat_map(|s| (0..pi).map(move |t| (s * t % pi) * pw)),
    )
}

/// `G_klm = ½(I⊗I⊗I + Z^k⊗Z^l⊗Z^m + Z^{1−k}⊗Z^{1−l}⊗Z^{1−m} − Z⊗Z⊗Z)` on three qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ThreeQubitGate {
    pub k: u8,
    pub l: u8,
    pub m: u8,
}

impl ThreeQubitGate {
    pub fn new(k: u8, l: u8, m: u8) -> Result<Self> {
        if k > 1 || l > 1 || m > 1 {
            return Err(invalid("three-qubit gate indices are bits"));
        }
        Ok(Self { k, l, m })
    }

    /// The diagonal, evaluated term by term; every entry comes out as ±1.
    pub fn diagonal(&self) -> DiagonalPhases {
        let z = |e: u8, bit: usize| if e == 1 && bit == 1 { -1i64 } else { 1 };
        let exps = (0..8usize).map(|idx| {
            let (s, t, u) = (idx >> 2 & 1, idx >> 1 & 1, idx & 1);
            let first = z(self.k, s) * z(self.l, t) * z(self.m, u);
            let second = z(1 - self.k, s) * z(1 - self.l, t) * z(1 - self.m, u);
            let zzz = z(1, s) * z(1, t) * z(1, u);
            let twice = 1 + first + second - zzz;
            debug_assert!(twice == 2 || twice == -2);
            if twice > 0 {
                0
            } else {
                1
            }
        });
        DiagonalPhases::new(2, exps).expect("order 2")
    }
}

/// `{a0b0}, {a1b1}, P₂{a0b1}, P₂{a1b0}` and the standard basis, with qubit bases m = 0, 1.
pub fn two_qubit_complete_set() -> MubSet {
    let q = |m| local_basis(2, m).expect("qubit basis");
    let cz = control_phase(2, 1).expect("p = 2 is prime");
    let bases = vec![
        q(0).tensor(&q(0)).with_label("a0b0"),
        q(1).tensor(&q(1)).with_label("a1b1"),
        q(0).tensor(&q(1)).apply_diagonal(&cz).expect("dims").with_label("P·a0b1"),
        q(1).tensor(&q(0)).apply_diagonal(&cz).expect("dims").with_label("P·a1b0"),
        ExactBasis::standard(4),
    ];
    MubSet::from_exact(4, Provenance::method("two-qubit").with_p(2), bases).expect("distinct labels")
}

/// Label of basis `P^{θν} {|a_μ b_{μ+ν}⟩}`.
pub fn two_qudit_label(mu: u64, nu: u64) -> String {
    format!("mu={mu},nu={nu}")
}

/// `P_p^{θν} {|a_μ b_{μ+ν mod p}⟩}` for `ν = 0..p` (outer) and `μ = 0..p` (inner),
/// followed by the standard basis. `θ` defaults to [`find_theta`].
pub fn two_qudit_complete_set(p: u64, theta: Option<u64>) -> Result<MubSet> {
    if !is_prime(p) {
        return Err(unsupported(format!("{p} is not prime")));
    }
    if p == 2 {
        return Err(unsupported("p = 2 uses the two-qubit construction"));
    }
    let theta = match theta {
        Some(t) if !is_valid_theta(p, t)? => return Err(MubError::InvalidTheta { p, theta: t }),
        Some(t) => t,
        None => find_theta(p)?,
    };
    let locals = (0..p).map(|m| local_basis(p, m)).collect::<Result<Vec<_>>>()?;
    let gate = control_phase(p, theta as i64)?;
    let mut bases = Vec::with_capacity((p * p + 1) as usize);
    for nu in 0..p {
        let power = gate.pow(nu as i64);
        for mu in 0..p {
            let product = locals[mu as usize].tensor(&locals[((mu + nu) % p) as usize]);
            bases.push(product.apply_diagonal(&power)?.with_label(two_qudit_label(mu, nu)));
        }
    }
    bases.push(ExactBasis::standard((p * p) as usize));
    MubSet::from_exact(
        (p * p) as usize,
        Provenance::method("prime-squared").with_p(p).with_theta(theta),
        bases,
    )
}

/// `G_lmk {|a_k b_l c_m⟩}` for all bit triples `klm` in binary order, then the standard basis.
///
/// The gate indices are the product indices shifted cyclically; pairing `G_klm`
/// with `|a_k b_l c_m⟩` leaves 24 of the 36 basis pairs biased.
pub fn three_qubit_set() -> MubSet {
    let q = |m| local_basis(2, m).expect("qubit basis");
    let mut bases = Vec::with_capacity(9);
    for idx in 0..8u8 {
        let (k, l, m) = (idx >> 2 & 1, idx >> 1 & 1, idx & 1);
        let gate = ThreeQubitGate::new(l, m, k).expect("bits");
        let product = q(u64::from(k)).tensor(&q(u64::from(l))).tensor(&q(u64::from(m)));
        let label = format!("klm={k}{l}{m}");
        bases.push(product.apply_diagonal(&gate.diagonal()).expect("dims").with_label(label));
    }
    bases.push(ExactBasis::standard(8));
    MubSet::from_exact(8, Provenance::method("three-qubit").with_p(2).with_r(3), bases)
        .expect("distinct labels")
}

/// Swaps the two subsystems in every state of `basis`.
pub fn swap_partner_basis(basis: &Basis, d_a: usize, d_b: usize) -> Result<Basis> {
    if d_a != d_b {
        return Err(invalid(format!("swap partner needs equal subsystems, got {d_a} x {d_b}")));
    }
    basis.swap_subsystems(d_a, d_b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{tensor, CMatrix};
    use crate::verification::{check_unbiased_pair, same_states};
    use crate::weyl::{weyl_matrix, WeylLabel};
    use num_complex::Complex64;

    /// `P_p = (1/p) Σ_{a,b} α_p^{−ab} Z^a ⊗ Z^b`, or the four-term form for p = 2.
    fn control_phase_by_expansion(p: u64) -> CMatrix {
        let d = (p * p) as usize;
        let z = |b: i64| weyl_matrix(WeylLabel::new(p, 0, b).unwrap()).to_complex();
        let mut acc = CMatrix::zeros(d, d);
        if p == 2 {
            let id = CMatrix::identity(2, 2);
            let sz = z(1);
            acc = (id.kronecker(&id) + id.kronecker(&sz) + sz.kronecker(&id) - sz.kronecker(&sz))
                * Complex64::new(0.5, 0.0);
            return acc;
        }
        for a in 0..p as i64 {
            for b in 0..p as i64 {
                let phase = crate::field::root_value(p as u32, -a * b).unwrap();
                acc += z(a).kronecker(&z(b)) * phase;
            }
        }
        acc * Complex64::new(1.0 / p as f64, 0.0)
    }

    fn mat_pow(m: &CMatrix, n: u64) -> CMatrix {
        let mut acc = CMatrix::identity(m.nrows(), m.ncols());
        for _ in 0..n {
            acc = &acc * m;
        }
        acc
    }

    #[test]
    fn cz_diagonal() {
        assert_eq!(control_phase(2, 1).unwrap().exponents(), &[0, 0, 0, 1]);
        assert!(control_phase(3, 3).unwrap().is_identity());
        assert!(control_phase(3, 0).unwrap().is_identity());
    }

    #[test]
    fn gate_matches_zz_expansion() {
        for p in [2u64, 3, 5, 7] {
            let expanded = control_phase_by_expansion(p);
            for power in 0..p {
                let direct = control_phase(p, power as i64).unwrap().to_matrix();
                let want = mat_pow(&expanded, power);
                assert!((direct - want).norm() < 1e-12, "p={p} power={power}");
            }
        }
    }

    #[test]
    fn cz_conjugates_sigma_x() {
        let cz = control_phase(2, 1).unwrap().to_matrix();
        let x = weyl_matrix(WeylLabel::new(2, 1, 0).unwrap()).to_complex();
        let z = weyl_matrix(WeylLabel::new(2, 0, 1).unwrap()).to_complex();
        let id = CMatrix::identity(2, 2);
        let lhs = &cz * x.kronecker(&id) * &cz;
        assert!((lhs - x.kronecker(&z)).norm() < 1e-14);
        let y = CMatrix::from_row_slice(
            2,
            2,
            &[Complex64::new(0.0, 0.0), Complex64::new(0.0, -1.0), Complex64::new(0.0, 1.0), Complex64::new(0.0, 0.0)],
        );
        let lhs = &cz * id.kronecker(&y) * &cz;
        assert!((lhs - z.kronecker(&y)).norm() < 1e-14);
    }

    #[test]
    fn gate_commutes_with_local_w() {
        for p in [3u64, 5] {
            let theta = find_theta(p).unwrap() as i64;
            let g = control_phase(p, theta).unwrap().to_matrix();
            let w = crate::prime::w_operator(p).unwrap().to_matrix();
            let id = CMatrix::identity(p as usize, p as usize);
            for op in [w.kronecker(&id), id.kronecker(&w)] {
                assert!((&g * &op - &op * &g).norm() < 1e-12);
            }
        }
    }

    /// `P^{θn}(X^α ⊗ X^β Z^{2βn})P^{−θn} = X^α Z^{βθn} ⊗ X^β Z^{2βn+αθn}` up to a global phase.
    #[test]
    fn conjugation_law_p3() {
        let p = 3u64;
        let pi = p as i64;
        let w = |a: i64, b: i64| weyl_matrix(WeylLabel::new(p, a, b).unwrap()).to_complex();
        for theta in [1i64, 2] {
            for n in 1..pi {
                let g = control_phase(p, theta * n).unwrap().to_matrix();
                let g_inv = g.adjoint();
                for alpha in 0..pi {
                    for beta in 0..pi {
                        let before = w(alpha, 0).kronecker(&w(beta, 2 * beta * n));
                        let after = &g * before * &g_inv;
                        let want = w(alpha, beta * theta * n).kronecker(&w(beta, 2 * beta * n + alpha * theta * n));
                        let phase = (want.adjoint() * &after).trace() / Complex64::new(9.0, 0.0);
                        assert!((phase.norm() - 1.0).abs() < 1e-12);
                        assert!((after - want * phase).norm() < 1e-12, "θ={theta} n={n} α={alpha} β={beta}");
                    }
                }
            }
        }
    }

    /// The reduced assumption set: |⟨a_m b_m|U^n|a_0' b_n'⟩|² = 1/p² for U = P^θ.
    #[test]
    fn reduced_unbiasedness_conditions() {
        for p in [3u64, 5] {
            let theta = find_theta(p).unwrap() as i64;
            let locals: Vec<Basis> = (0..=p).map(|m| local_basis(p, m).unwrap().to_basis()).collect();
            for n in 1..p {
                let u = control_phase(p, theta * n as i64).unwrap().to_matrix();
                let rotated = crate::matrix::apply_unitary(&u, &tensor(&locals[0], &locals[n as usize])).unwrap();
                for (m, local) in locals.iter().enumerate() {
                    let product = tensor(local, local);
                    let v = check_unbiased_pair(&product, &rotated, 1e-10).unwrap();
                    assert!(v.unbiased, "p={p} n={n} m={m} dev={}", v.max_deviation);
                }
            }
        }
    }

    #[test]
    fn three_qubit_gates() {
        assert!(ThreeQubitGate::new(0, 0, 0).unwrap().diagonal().is_identity());
        assert!(ThreeQubitGate::new(1, 1, 1).unwrap().diagonal().is_identity());
        assert!(!ThreeQubitGate::new(0, 1, 1).unwrap().diagonal().is_identity());
        assert!(ThreeQubitGate::new(2, 0, 0).is_err());
        let set = three_qubit_set();
        assert_eq!(set.len(), 9);
        let product = local_basis(2, 0).unwrap();
        let product = product.tensor(&product).tensor(&product);
        assert_eq!(set.exact(0).unwrap().matrix(), product.matrix());
    }

    #[test]
    fn two_qubit_bell_column() {
        let set = two_qubit_complete_set();
        let b2 = set.basis(2);
        let col: Vec<Complex64> = b2.state(0);
        let want = [
            Complex64::new(0.5, 0.0),
            Complex64::new(0.0, 0.5),
            Complex64::new(0.5, 0.0),
            Complex64::new(0.0, -0.5),
        ];
        for (a, b) in col.iter().zip(want) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn swap_partners() {
        let set = two_qubit_complete_set();
        let b3 = swap_partner_basis(set.basis(2), 2, 2).unwrap();
        assert!(same_states(&b3, set.basis(3), 1e-12));
        assert!(!same_states(set.basis(2), set.basis(3), 1e-12));
        let twice = swap_partner_basis(&b3, 2, 2).unwrap();
        assert!(same_states(&twice, set.basis(2), 1e-12));
        let sym = set.basis(0);
        assert!(same_states(&swap_partner_basis(sym, 2, 2).unwrap(), sym, 1e-12));
        assert!(swap_partner_basis(&Basis::standard(6), 2, 3).is_err());
    }

    #[test]
    fn theta_validation() {
        assert!(matches!(two_qudit_complete_set(7, Some(1)), Err(MubError::InvalidTheta { p: 7, theta: 1 })));
        assert!(two_qudit_complete_set(2, None).is_err());
        let set = two_qudit_complete_set(3, Some(2)).unwrap();
        assert_eq!(set.len(), 10);
        assert_eq!(set.provenance().theta, Some(2));
    }
}
