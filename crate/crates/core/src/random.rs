//! Haar-random states and unitaries from seeded generators.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::matrix::{Basis, CMatrix};

fn gaussian(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Independent standard complex Gaussian amplitudes, normalized.
pub fn haar_state(dim: usize, rng: &mut impl Rng) -> Vec<Complex64> {
    let mut v: Vec<Complex64> = (0..dim).map(|_| gaussian(rng)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|z| *z /= norm);
    v
}

/// Gram–Schmidt on a complex Ginibre matrix; the column order fixes the phases.
pub fn haar_unitary(dim: usize, rng: &mut impl Rng) -> CMatrix {
    let mut m = CMatrix::from_fn(dim, dim, |_, _| gaussian(rng));
    for j in 0..dim {
        for k in 0..j {
            let proj = m.column(k).dotc(&m.column(j));
            let prev = m.column(k).clone_owned();
            let mut col = m.column_mut(j);
            col -= prev * proj;
        }
        let norm = m.column(j).norm();
        m.column_mut(j).unscale_mut(norm);
    }
    m
}

pub fn haar_basis(dim: usize, rng: &mut impl Rng) -> Basis {
    Basis::new_unchecked("haar", haar_unitary(dim, rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::unitarity_residual;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn unitary_and_reproducible() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let u = haar_unitary(6, &mut rng);
        assert!(unitarity_residual(&u) < 1e-12);
        let mut again = ChaCha8Rng::seed_from_u64(7);
        assert_eq!(haar_unitary(6, &mut again), u);
        let v = haar_state(5, &mut rng);
        let n: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        assert!((n - 1.0).abs() < 1e-14);
    }
}
