//! MUBs in dimension `d²` from families of incident vectors and orthogonal phase vectors.
//!
//! Slot `s` of a `d²`-dimensional vector is the cell `(s / d, s % d)` of a
//! `d × d` grid; that is also the split used when classifying entanglement.
//! An incident vector marks `d` cells. Lifting a phase vector `h` onto it puts
//! `h_k/√d` on the `k`-th marked cell in ascending slot order.

use num_complex::Complex64;

use crate::error::{invalid, unsupported, Result};
use crate::field::{is_prime, unit_phase};
use crate::matrix::{inner, Basis, CMatrix, ExactBasis, ExactMatrix, MubSet, Provenance, Scale};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IncidentVector {
    dim: usize,
    support: Vec<usize>,
}

impl IncidentVector {
    /// `support` lists `d` distinct slots below `d²`, in any order.
    pub fn new(dim: usize, support: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut support: Vec<usize> = support.into_iter().collect();
        support.sort_unstable();
        support.dedup();
        if dim < 2 || support.len() != dim || support.iter().any(|&s| s >= dim * dim) {
            return Err(invalid(format!("an incident vector in dimension {dim} marks {dim} distinct slots below {}", dim * dim)));
        }
        Ok(Self { dim, support })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Marked slots, ascending.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn intersection(&self, other: &IncidentVector) -> usize {
        self.support.iter().filter(|s| other.support.binary_search(s).is_ok()).count()
    }

    /// The 0/1 vector of length `d²`.
    pub fn indicator(&self) -> Vec<u8> {
        let mut v = vec![0; self.dim * self.dim];
        for &s in &self.support {
            v[s] = 1;
        }
        v
    }
}

/// `d` incident vectors with disjoint supports covering all `d²` slots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncidentFamily {
    name: String,
    dim: usize,
    members: Vec<IncidentVector>,
}

impl IncidentFamily {
    pub fn new(name: impl Into<String>, members: Vec<IncidentVector>) -> Result<Self> {
        let dim = members.first().map_or(0, IncidentVector::dim);
        if members.len() != dim || members.iter().any(|v| v.dim() != dim) {
            return Err(invalid("a family holds d incident vectors of dimension d"));
        }
        let mut seen = vec![false; dim * dim];
        for &s in members.iter().flat_map(|v| v.support()) {
            if std::mem::replace(&mut seen[s], true) {
                return Err(invalid(format!("slot {s} is marked twice within one family")));
            }
        }
        Ok(Self {
            name: name.into(),
            dim,
            members,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn members(&self) -> &[IncidentVector] {
        &self.members
    }
}

/// Every cross-family pair of incident vectors shares exactly one slot.
pub fn check_families(families: &[IncidentFamily]) -> Result<()> {
    for (i, f) in families.iter().enumerate() {
        for g in &families[i + 1..] {
            for v in f.members() {
                for w in g.members() {
                    let n = v.intersection(w);
                    if n != 1 {
                        return Err(invalid(format!(
                            "families '{}' and '{}' have members sharing {n} slots",
                            f.name(),
                            g.name()
                        )));
                    }
                }
            }
        }
    }
    Ok(())
}

/// The row family (vector `i` marks row `i`) and the column family.
pub fn natural_families(d: usize) -> Result<[IncidentFamily; 2]> {
    if d < 2 {
        return Err(invalid("dimension must be at least 2"));
    }
    let rows = (0..d).map(|i| IncidentVector::new(d, (0..d).map(|j| i * d + j))).collect::<Result<_>>()?;
    let cols = (0..d).map(|j| IncidentVector::new(d, (0..d).map(|i| i * d + j))).collect::<Result<_>>()?;
    Ok([IncidentFamily::new("rows", rows)?, IncidentFamily::new("columns", cols)?])
}

/// For prime `d`, family `k = 1..d` with vector `v` marking the cells `i + k·j ≡ v (mod d)`.
pub fn mols_families(d: usize) -> Result<Vec<IncidentFamily>> {
    if !is_prime(d as u64) {
        return Err(unsupported(format!("Latin-square families need prime d, got {d}")));
    }
    (1..d)
        .map(|k| {
            let members = (0..d)
                .map(|v| {
                    IncidentVector::new(
                        d,
                        (0..d).map(|j| {
                            let i = (v + d * d - k * j % d) % d;
                            i * d + j
                        }),
                    )
                })
                .collect::<Result<_>>()?;
            IncidentFamily::new(format!("mols k={k}"), members)
        })
        .collect()
}

/// `d` unit-modulus entries, kept exactly when they are roots of unity.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseVector {
    entries: Vec<Complex64>,
    exact: Option<(u32, Vec<u32>)>,
}

impl PhaseVector {
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        if let Some(z) = entries.iter().find(|z| (z.norm() - 1.0).abs() > 1e-12) {
            return Err(invalid(format!("phase entry {z} does not have modulus 1")));
        }
        Ok(Self { entries, exact: None })
    }

    /// Entries `α_L^{k_i}`.
    pub fn roots(order: u32, exponents: Vec<u32>) -> Result<Self> {
        if order == 0 {
            return Err(invalid("root order must be positive"));
        }
        let exponents: Vec<u32> = exponents.into_iter().map(|k| k % order).collect();
        Ok(Self {
            entries: exponents.iter().map(|&k| unit_phase(order, k)).collect(),
            exact: Some((order, exponents)),
        })
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }
}

/// Rows of the `d`-dimensional Fourier matrix: `h_r[k] = α_d^{rk}`.
pub fn fourier_phases(d: usize) -> Vec<PhaseVector> {
    (0..d)
        .map(|r| PhaseVector::roots(d as u32, (0..d).map(|k| (r * k % d) as u32).collect()).expect("d > 0"))
        .collect()
}

/// The `d²`-dimensional state with `h_k/√d` on the `k`-th marked slot.
pub fn lift(h: &PhaseVector, v: &IncidentVector) -> Result<Vec<Complex64>> {
    if h.dim() != v.dim() {
        return Err(invalid(format!("phase vector of length {} lifted onto dimension {}", h.dim(), v.dim())));
    }
    let s = 1.0 / (v.dim() as f64).sqrt();
    let mut out = vec![Complex64::new(0.0, 0.0); v.dim() * v.dim()];
    for (k, &slot) in v.support().iter().enumerate() {
        out[slot] = h.entries[k] * s;
    }
    Ok(out)
}

fn check_phases(d: usize, phases: &[PhaseVector]) -> Result<()> {
    if phases.len() != d || phases.iter().any(|h| h.dim() != d) {
        return Err(invalid(format!("need {d} phase vectors of length {d}")));
    }
    for (i, h) in phases.iter().enumerate() {
        for g in &phases[i + 1..] {
            if inner(h.entries(), g.entries()).norm() > 1e-10 {
                return Err(invalid("phase vectors are not pairwise orthogonal"));
            }
        }
    }
    Ok(())
}

/// Basis whose column `v·d + r` lifts phase vector `r` onto incident vector `v`.
pub fn family_basis(family: &IncidentFamily, phases: &[PhaseVector]) -> Result<Basis> {
    let d = family.dim();
    check_phases(d, phases)?;
    let mut m = CMatrix::zeros(d * d, d * d);
    for (v, iv) in family.members().iter().enumerate() {
        for (r, h) in phases.iter().enumerate() {
            let col = lift(h, iv)?;
            for (s, z) in col.into_iter().enumerate() {
                m[(s, v * d + r)] = z;
            }
        }
    }
    Basis::new(family.name(), m)
}

fn exact_family_basis(family: &IncidentFamily, order: u32, exps: &[&[u32]]) -> Result<ExactBasis> {
    let d = family.dim();
    let mut entries = vec![None; d * d * d * d];
    for (v, iv) in family.members().iter().enumerate() {
        for (r, e) in exps.iter().enumerate() {
            for (k, &slot) in iv.support().iter().enumerate() {
                entries[slot * d * d + v * d + r] = Some(e[k]);
            }
        }
    }
    let m = ExactMatrix::new(d * d, order, Scale::inv_sqrt(d as u64)?, entries)?;
    Ok(ExactBasis::new(family.name(), m))
}

/// One basis per family (rows, columns, then the `d − 1` Latin-square families).
///
/// `phases` defaults to [`fourier_phases`]; bases are exact when every phase vector is.
pub fn wocjan_beth_mubs(d: usize, phases: Option<&[PhaseVector]>) -> Result<MubSet> {
    if !is_prime(d as u64) {
        return Err(unsupported(format!("the Latin-square construction needs prime d, got {d}")));
    }
    let default;
    let phases = match phases {
        Some(p) => p,
        None => {
            default = fourier_phases(d);
            &default
        }
    };
    check_phases(d, phases)?;
    let mut families: Vec<IncidentFamily> = natural_families(d)?.into();
    families.extend(mols_families(d)?);
    let provenance = Provenance::method("wocjan-beth").with_p(d as u64);
    let common_order = phases
        .iter()
        .map(|h| h.exact.as_ref().map(|(o, _)| *o))
        .collect::<Option<Vec<u32>>>()
        .and_then(|orders| orders.iter().all(|&o| o == orders[0]).then_some(orders[0]));
    match common_order {
        Some(order) => {
            let exps: Vec<&[u32]> = phases.iter().map(|h| h.exact.as_ref().expect("exact").1.as_slice()).collect();
            let bases = families
                .iter()
                .map(|f| exact_family_basis(f, order, &exps))
                .collect::<Result<Vec<_>>>()?;
            MubSet::from_exact(d * d, provenance, bases)
        }
        None => {
            let mut set = MubSet::new(d * d, provenance);
            for f in &families {
                set.push(family_basis(f, phases)?)?;
            }
            Ok(set)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verification::check_mub_set;

    fn indicators(f: &IncidentFamily) -> Vec<Vec<u8>> {
        f.members().iter().map(IncidentVector::indicator).collect()
    }

    #[test]
    fn qubit_pair_families() {
        let [rows, cols] = natural_families(2).unwrap();
        assert_eq!(indicators(&rows), vec![vec![1, 1, 0, 0], vec![0, 0, 1, 1]]);
        assert_eq!(indicators(&cols), vec![vec![1, 0, 1, 0], vec![0, 1, 0, 1]]);
        let mols = mols_families(2).unwrap();
        assert_eq!(indicators(&mols[0]), vec![vec![1, 0, 0, 1], vec![0, 1, 1, 0]]);
    }

    #[test]
    fn families_are_valid() {
        for d in [2, 3, 5] {
            let mut all: Vec<IncidentFamily> = natural_families(d).unwrap().into();
            all.extend(mols_families(d).unwrap());
            assert_eq!(all.len(), d + 1);
            check_families(&all).unwrap();
        }
        assert!(mols_families(4).is_err());
    }

    #[test]
    fn family_validation() {
        let v = IncidentVector::new(2, [0, 1]).unwrap();
        assert!(IncidentFamily::new("bad", vec![v.clone(), v]).is_err());
        assert!(IncidentVector::new(2, [0, 0]).is_err());
        assert!(IncidentVector::new(2, [0, 4]).is_err());
        let [rows, _] = natural_families(3).unwrap();
        assert!(check_families(&[rows.clone(), rows]).is_err());
    }

    #[test]
    fn lift_rule() {
        let h = PhaseVector::new(vec![Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)]).unwrap();
        let v = IncidentVector::new(2, [3, 0]).unwrap();
        let s = 0.5f64.sqrt();
        let got = lift(&h, &v).unwrap();
        let want = [s, 0.0, 0.0, -s].map(|x| Complex64::new(x, 0.0));
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).norm() < 1e-15);
        }
        assert!(PhaseVector::new(vec![Complex64::new(0.5, 0.0)]).is_err());
    }

    #[test]
    fn exact_and_float_paths_agree() {
        let exact = wocjan_beth_mubs(3, None).unwrap();
        let floats: Vec<PhaseVector> = fourier_phases(3)
            .into_iter()
            .map(|h| PhaseVector::new(h.entries().to_vec()).unwrap())
            .collect();
        let float = wocjan_beth_mubs(3, Some(&floats)).unwrap();
        assert!(exact.exact(0).is_some() && float.exact(0).is_none());
        for i in 0..exact.len() {
            assert!((exact.basis(i).matrix() - float.basis(i).matrix()).norm() < 1e-14);
        }
    }

    #[test]
    fn rejects_non_orthogonal_phases() {
        let ones = PhaseVector::roots(2, vec![0, 0]).unwrap();
        assert!(wocjan_beth_mubs(2, Some(&[ones.clone(), ones])).is_err());
        assert!(matches!(wocjan_beth_mubs(4, None), Err(crate::MubError::UnsupportedDimension(_))));
    }

    #[test]
    fn sets_are_unbiased() {
        for d in [2, 3, 5] {
            let set = wocjan_beth_mubs(d, None).unwrap();
            assert_eq!(set.len(), d + 1);
            assert!(check_mub_set(&set, 1e-10).passed());
        }
    }
}
