//! Arithmetic and interpolation over GF(q), q prime.

use crate::error::{Error, Result};
use crate::quantum::is_prime;

/// A prime field GF(q). Elements are plain integers in 0..q.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Gf {
    q: u64,
}

impl Gf {
    pub fn new(q: u64) -> Result<Self> {
        if !is_prime(q) {
            return Err(Error::InvalidParams(format!("{q} is not prime")));
        }
        Ok(Gf { q })
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        (a + b) % self.q
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        (a % self.q + self.q - b % self.q) % self.q
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        a % self.q * (b % self.q) % self.q
    }

    pub fn neg(&self, a: u64) -> u64 {
        (self.q - a % self.q) % self.q
    }

    pub fn pow(&self, mut base: u64, mut exponent: u64) -> u64 {
        base %= self.q;
        let mut acc = 1u64;
        while exponent > 0 {
            if exponent & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exponent >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: u64) -> Result<u64> {
        if a % self.q == 0 {
            return Err(Error::InvalidParams("zero has no inverse".into()));
        }
        Ok(self.pow(a, self.q - 2))
    }

    /// Evaluate a polynomial given by coefficients (constant first).
    pub fn eval(&self, coefficients: &[u64], x: u64) -> u64 {
        coefficients
            .iter()
            .rev()
            .fold(0, |acc, &c| self.add(self.mul(acc, x), c))
    }

    /// The unique polynomial of degree < points.len() through all points,
    /// as coefficients (constant first). Lagrange expansion.
    pub fn interpolate(&self, points: &[(u64, u64)]) -> Result<Vec<u64>> {
        if points.is_empty() {
            return Err(Error::InvalidParams("interpolation needs a point".into()));
        }
        for (i, (xi, _)) in points.iter().enumerate() {
            for (xj, _) in points.iter().skip(i + 1) {
                if xi % self.q == xj % self.q {
                    return Err(Error::InvalidParams(format!(
                        "repeated evaluation point {xi}"
                    )));
                }
            }
        }
        let m = points.len();
        let mut coeffs = vec![0u64; m];
        for (i, &(xi, yi)) in points.iter().enumerate() {
            // Build the numerator polynomial prod_{j != i} (x - x_j).
            let mut basis = vec![0u64; m];
            basis[0] = 1;
            let mut degree = 0;
            let mut denominator = 1u64;
            for (j, &(xj, _)) in points.iter().enumerate() {
                if j == i {
                    continue;
                }
                // Multiply basis by (x - x_j).
                for d in (0..=degree).rev() {
                    let carry = basis[d];
                    basis[d + 1] = self.add(basis[d + 1], carry);
                    basis[d] = self.mul(carry, self.neg(xj));
                }
                degree += 1;
                denominator = self.mul(denominator, self.sub(xi, xj));
            }
            let scale = self.mul(yi, self.inv(denominator)?);
            for d in 0..m {
                coeffs[d] = self.add(coeffs[d], self.mul(basis[d], scale));
            }
        }
        Ok(coeffs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_composite_modulus() {
        assert!(Gf::new(9).is_err());
        assert!(Gf::new(7).is_ok());
    }

    #[test]
    fn interpolates_the_hand_worked_example() {
        // Through (1,1) and (3,0) over GF(7): f(x) = 5 + 3x.
        let gf = Gf::new(7).unwrap();
        let coeffs = gf.interpolate(&[(1, 1), (3, 0)]).unwrap();
        assert_eq!(coeffs, vec![5, 3]);
    }

    #[test]
    fn single_point_is_a_constant() {
        let gf = Gf::new(5).unwrap();
        assert_eq!(gf.interpolate(&[(0, 4)]).unwrap(), vec![4]);
    }

    #[test]
    fn repeated_x_is_rejected() {
        let gf = Gf::new(5).unwrap();
        assert!(gf.interpolate(&[(1, 2), (1, 3)]).is_err());
    }

    #[test]
    fn interpolation_round_trips_random_polynomials() {
        let gf = Gf::new(11).unwrap();
        let mut rng = crate::rng::RngStream::from_seed(4);
        for _ in 0..50 {
            let degree = rng.below(4) as usize;
            let coeffs: Vec<u64> = (0..=degree).map(|_| rng.below(11)).collect();
            let points: Vec<(u64, u64)> = (0..=degree as u64)
                .map(|x| (x, gf.eval(&coeffs, x)))
                .collect();
            assert_eq!(gf.interpolate(&points).unwrap(), coeffs);
        }
    }

    #[test]
    fn inverse_is_correct() {
        let gf = Gf::new(13).unwrap();
        for a in 1..13 {
            assert_eq!(gf.mul(a, gf.inv(a).unwrap()), 1);
        }
        assert!(gf.inv(0).is_err());
    }
}
