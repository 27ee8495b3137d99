//! Exact arithmetic on roots of unity and on the prime field `F_p`.
//!
//! Everything constructed in this crate is a scaled integer power of a
//! primitive root of unity, so exponents are the lossless currency and the
//! floating value is only produced at the very end.

use std::f64::consts::TAU;
use std::fmt;
use std::ops::Mul;

use num_complex::Complex64;

use crate::error::{invalid, unsupported, Result};

/// Deterministic primality test by trial division.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut f = 3u64;
    while f.saturating_mul(f) <= n {
        if n.is_multiple_of(f) {
            return false;
        }
        f += 2;
    }
    true
}

/// Infinite iterator over the odd primes `3, 5, 7, 11, ...`.
pub fn odd_primes() -> impl Iterator<Item = u64> {
    (3u64..).step_by(2).filter(|&n| is_prime(n))
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub(crate) fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// `exp(2πi k / L)`, with exact values returned on the four quarter turns.
pub(crate) fn unit_phase(order: u32, exponent: u32) -> Complex64 {
    let k = u64::from(exponent % order);
    let l = u64::from(order);
    if (4 * k) % l == 0 {
        return match (4 * k) / l {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    Complex64::from_polar(1.0, TAU * k as f64 / l as f64)
}

/// An element `exp(2πi·exponent/order)` of the cyclic group of `order`-th roots of unity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RootOfUnity {
    order: u32,
    exponent: u32,
}

impl RootOfUnity {
    pub fn new(order: u32, exponent: i64) -> Result<Self> {
        if order == 0 {
            return Err(invalid("root of unity order must be positive"));
        }
        let exponent = exponent.rem_euclid(i64::from(order)) as u32;
        Ok(Self { order, exponent })
    }

    pub fn one(order: u32) -> Result<Self> {
        Self::new(order, 0)
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    /// The same value written over a multiple of the current order.
    pub fn lift(&self, order: u32) -> Result<Self> {
        if order == 0 || !order.is_multiple_of(self.order) {
            return Err(invalid(format!(
                "cannot lift an order-{} root to order {order}",
                self.order
            )));
        }
        Ok(Self {
            order,
            exponent: self.exponent * (order / self.order),
        })
    }

    pub fn conj(&self) -> Self {
        Self {
            order: self.order,
            exponent: (self.order - self.exponent) % self.order,
        }
    }

    pub fn pow(&self, n: i64) -> Self {
        let l = i64::from(self.order);
        let e = (i64::from(self.exponent) * n.rem_euclid(l)).rem_euclid(l);
        Self {
            order: self.order,
            exponent: e as u32,
        }
    }

    pub fn value(&self) -> Complex64 {
        unit_phase(self.order, self.exponent)
    }
}

impl Mul for RootOfUnity {
    type Output = RootOfUnity;

    /// Equal orders add exponents; otherwise both sides are lifted to the common multiple.
    fn mul(self, rhs: RootOfUnity) -> RootOfUnity {
        let order = lcm(u64::from(self.order), u64::from(rhs.order)) as u32;
        let a = self.exponent * (order / self.order);
        let b = rhs.exponent * (order / rhs.order);
        RootOfUnity {
            order,
            exponent: (a + b) % order,
        }
    }
}

impl fmt::Display for RootOfUnity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "α_{}^{}", self.order, self.exponent)
    }
}

/// `exp(i·2π·(exponent mod order)/order)`.
pub fn root_value(order: u32, exponent: i64) -> Result<Complex64> {
    Ok(RootOfUnity::new(order, exponent)?.value())
}

/// The prime field `F_p`, elements held as integers in `0..p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeField {
    modulus: u64,
}

impl PrimeField {
    pub fn new(modulus: u64) -> Result<Self> {
        if !is_prime(modulus) {
            return Err(invalid(format!("{modulus} is not prime")));
        }
        Ok(Self { modulus })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn reduce(&self, x: i64) -> u64 {
        x.rem_euclid(self.modulus as i64) as u64
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        ((u128::from(a) + u128::from(b)) % u128::from(self.modulus)) as u64
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        self.add(a % self.modulus, self.neg(b))
    }

    pub fn neg(&self, a: u64) -> u64 {
        (self.modulus - a % self.modulus) % self.modulus
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((u128::from(a) * u128::from(b)) % u128::from(self.modulus)) as u64
    }

    pub fn pow(&self, base: u64, mut exp: u64) -> u64 {
        let mut acc = 1 % self.modulus;
        let mut b = base % self.modulus;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: u64) -> Option<u64> {
        let a = a % self.modulus;
        if a == 0 {
            None
        } else {
            Some(self.pow(a, self.modulus - 2))
        }
    }

    /// Euler's criterion. Zero counts as a square.
    pub fn is_square(&self, x: u64) -> bool {
        let x = x % self.modulus;
        if x == 0 || self.modulus == 2 {
            return true;
        }
        self.pow(x, (self.modulus - 1) / 2) == 1
    }
}

/// Whether `x` is a square modulo the prime `p`; `x = 0` counts as a residue.
pub fn is_quadratic_residue(x: u64, p: u64) -> Result<bool> {
    let field = PrimeField::new(p)?;
    if x >= p {
        return Err(invalid(format!("{x} is not a canonical element of F_{p}")));
    }
    Ok(field.is_square(x))
}

/// Whether `θ` makes `1 + θ²` a non-residue mod `p`.
pub fn is_valid_theta(p: u64, theta: u64) -> Result<bool> {
    let field = PrimeField::new(p)?;
    if p == 2 {
        return Err(unsupported("the control-phase exponent is only defined for odd p"));
    }
    let t = theta % p;
    Ok(!field.is_square(field.add(1, field.mul(t, t))))
}

/// Smallest `θ ≥ 1` such that `1 + θ²` is a quadratic non-residue modulo the odd prime `p`.
pub fn find_theta(p: u64) -> Result<u64> {
    let field = PrimeField::new(p)?;
    if p == 2 {
        return Err(unsupported("p = 2 has no control-phase exponent; use the two-qubit set"));
    }
    // At most (p+1)/2 squares, so a non-residue of the form 1 + θ² exists below p.
    (1..p)
        .find(|&t| !field.is_square(field.add(1, field.mul(t, t))))
        .ok_or_else(|| invalid(format!("no theta found for p = {p}")))
}

/// Number of the first `n` odd primes for which `θ = 1` fails, i.e. 2 is a square mod p.
pub fn count_theta1_failures(n: usize) -> u64 {
    odd_primes()
        .take(n)
        .filter(|&p| PrimeField { modulus: p }.is_square(2))
        .count() as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn squares_by_enumeration(p: u64) -> Vec<bool> {
        let mut res = vec![false; p as usize];
        for y in 0..p {
            res[((y * y) % p) as usize] = true;
        }
        res
    }

    #[test]
    fn root_values() {
        let i = root_value(4, 1).unwrap();
        assert_eq!(i, Complex64::new(0.0, 1.0));
        for p in [2u32, 3, 5, 7, 11] {
            let one = root_value(p, i64::from(p)).unwrap();
            assert!((one - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        }
        let w = root_value(3, 1).unwrap();
        assert!((w.re + 0.5).abs() < 1e-15);
        assert!((w.im - 3f64.sqrt() / 2.0).abs() < 1e-15);
        assert!((root_value(7, -1).unwrap() - root_value(7, 6).unwrap()).norm() < 1e-15);
        assert!(root_value(0, 1).is_err());
    }

    #[test]
    fn root_modulus_is_one() {
        for order in 1..40u32 {
            for k in 0..order {
                let v = root_value(order, i64::from(k)).unwrap();
                assert!((v.norm() - 1.0).abs() < 4.0 * f64::EPSILON);
            }
        }
    }

    #[test]
    fn root_products() {
        let a = RootOfUnity::new(5, 3).unwrap();
        let b = RootOfUnity::new(5, 4).unwrap();
        assert_eq!((a * b).exponent(), 2);
        let i = RootOfUnity::new(4, 1).unwrap();
        let w = RootOfUnity::new(3, 1).unwrap();
        let iw = i * w;
        assert_eq!(iw.order(), 12);
        assert_eq!(iw.exponent(), 7);
        assert!((iw.value() - i.value() * w.value()).norm() < 1e-15);
        assert_eq!(a * a.conj(), RootOfUnity::one(5).unwrap());
    }

    #[test]
    fn primality() {
        let primes: Vec<u64> = (0..50).filter(|&n| is_prime(n)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47]);
        assert!(is_prime(104_729));
        assert!(!is_prime(104_730));
        assert!(PrimeField::new(9).is_err());
    }

    #[test]
    fn residues_mod_7() {
        // squares mod 7 = {0, 1, 2, 4}
        assert!(is_quadratic_residue(2, 7).unwrap());
        assert!(!is_quadratic_residue(5, 7).unwrap());
        assert!(is_quadratic_residue(0, 7).unwrap());
        for p in [3, 5, 7, 11, 13] {
            assert!(is_quadratic_residue(1, p).unwrap());
        }
        assert!(is_quadratic_residue(2, 9).is_err());
        assert!(is_quadratic_residue(7, 7).is_err());
    }

    #[test]
    fn euler_criterion_matches_enumeration() {
        for p in odd_primes().take_while(|&p| p < 400) {
            let squares = squares_by_enumeration(p);
            for x in 0..p {
                assert_eq!(is_quadratic_residue(x, p).unwrap(), squares[x as usize], "x={x} p={p}");
            }
            let count = squares.iter().filter(|&&s| s).count() as u64;
            assert_eq!(count, p.div_ceil(2));
        }
    }

    #[test]
    fn theta_examples() {
        assert_eq!(find_theta(5).unwrap(), 1);
        assert_eq!(find_theta(7).unwrap(), 2);
        assert_eq!(find_theta(17).unwrap(), 2);
        assert_eq!(find_theta(3).unwrap(), 1);
        assert!(matches!(find_theta(2), Err(crate::MubError::UnsupportedDimension(_))));
        assert!(find_theta(15).is_err());
    }

    #[test]
    fn theta_is_minimal() {
        for p in odd_primes().take_while(|&p| p <= 1000) {
            let squares = squares_by_enumeration(p);
            let theta = find_theta(p).unwrap();
            assert!(!squares[((1 + theta * theta) % p) as usize]);
            for t in 1..theta {
                assert!(squares[((1 + t * t) % p) as usize]);
            }
        }
    }

    #[test]
    fn theta1_first_failures() {
        let failing: Vec<u64> = odd_primes()
            .take_while(|&p| p < 30)
            .filter(|&p| !is_valid_theta(p, 1).unwrap())
            .collect();
        assert_eq!(failing, vec![7, 17, 23]);
        assert_eq!(count_theta1_failures(3), 1);
    }

    #[test]
    fn field_axioms_small() {
        let f = PrimeField::new(11).unwrap();
        for a in 0..11 {
            assert_eq!(f.add(a, f.neg(a)), 0);
            if a != 0 {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
            }
            for b in 0..11 {
                assert_eq!(f.sub(f.add(a, b), b), a);
            }
        }
        assert_eq!(f.inv(0), None);
    }
}
