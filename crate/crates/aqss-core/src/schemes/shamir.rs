//! Shamir secret sharing over a prime field.
//!
//! Classical convention: the secret sits in the constant term, evaluation
//! points are the nonzero field elements 1..=n, and the k−1 blinding
//! coefficients are uniform.

use super::gf::Gf;
use crate::error::{Error, Result};
use crate::rng::RngStream;
use serde::{Deserialize, Serialize};

/// One classical share: the evaluation point, the value there, and the field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassicalShare {
    pub index: u64,
    pub value: u64,
    pub field: u64,
}

fn validate(secret: u64, k: usize, n: usize, q: u64) -> Result<Gf> {
    let gf = Gf::new(q)?;
    if k < 1 || n < k {
        return Err(Error::InvalidParams(format!(
            "need 1 <= k <= n, got k={k}, n={n}"
        )));
    }
    if q <= n as u64 {
        return Err(Error::InvalidParams(format!(
            "field size {q} must exceed the share count {n}"
        )));
    }
    if secret >= q {
        return Err(Error::InvalidParams(format!(
            "secret {secret} is not a GF({q}) element"
        )));
    }
    Ok(gf)
}

/// Split with uniform blinding coefficients.
pub fn shamir_split(
    secret: u64,
    k: usize,
    n: usize,
    q: u64,
    rng: &mut RngStream,
) -> Result<Vec<ClassicalShare>> {
    let blinding: Vec<u64> = (1..k).map(|_| rng.below(q)).collect();
    shamir_split_with_blinding(secret, &blinding, k, n, q)
}

/// Split with explicit blinding coefficients (degree 1..k−1), for replay and
/// for the privacy enumeration tests.
pub fn shamir_split_with_blinding(
    secret: u64,
    blinding: &[u64],
    k: usize,
    n: usize,
    q: u64,
) -> Result<Vec<ClassicalShare>> {
    let gf = validate(secret, k, n, q)?;
    if blinding.len() != k - 1 {
        return Err(Error::InvalidParams(format!(
            "expected {} blinding coefficients, got {}",
            k - 1,
            blinding.len()
        )));
    }
    let mut coeffs = Vec::with_capacity(k);
    coeffs.push(secret);
    coeffs.extend(blinding.iter().map(|&b| b % q));
    Ok((1..=n as u64)
        .map(|x| ClassicalShare {
            index: x,
            value: gf.eval(&coeffs, x),
            field: q,
        })
        .collect())
}

/// Reconstruct the secret from at least k shares.
pub fn shamir_reconstruct(shares: &[ClassicalShare], k: usize) -> Result<u64> {
    if shares.len() < k {
        return Err(Error::InvalidParams(format!(
            "reconstruction needs {k} shares, got {}",
            shares.len()
        )));
    }
    let q = shares[0].field;
    if shares.iter().any(|s| s.field != q) {
        return Err(Error::InvalidParams("shares come from different fields".into()));
    }
    let gf = Gf::new(q)?;
    // Any k shares determine the polynomial; sort for a deterministic choice.
    let mut sorted: Vec<&ClassicalShare> = shares.iter().collect();
    sorted.sort_by_key(|s| s.index);
    sorted.dedup_by_key(|s| s.index);
    if sorted.len() < k {
        return Err(Error::InvalidParams("fewer than k distinct shares".into()));
    }
    let points: Vec<(u64, u64)> = sorted[..k].iter().map(|s| (s.index, s.value)).collect();
    let coeffs = gf.interpolate(&points)?;
    Ok(coeffs[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    #[test]
    fn hand_worked_shares() {
        // Secret 5, k=2, n=3, q=7, blinding coefficient 3: f(x) = 5 + 3x.
        let shares = shamir_split_with_blinding(5, &[3], 2, 3, 7).unwrap();
        let values: Vec<(u64, u64)> = shares.iter().map(|s| (s.index, s.value)).collect();
        assert_eq!(values, vec![(1, 1), (2, 4), (3, 0)]);
        let secret = shamir_reconstruct(&[shares[0], shares[2]], 2).unwrap();
        assert_eq!(secret, 5);
    }

    #[test]
    fn k_equals_one_replicates_the_secret() {
        let mut rng = crate::rng::RngStream::from_seed(0);
        let shares = shamir_split(4, 1, 3, 5, &mut rng).unwrap();
        assert!(shares.iter().all(|s| s.value == 4));
    }

    #[test]
    fn too_few_shares_is_an_error() {
        let shares = shamir_split_with_blinding(2, &[1], 2, 3, 5).unwrap();
        assert!(shamir_reconstruct(&shares[..1], 2).is_err());
    }

    #[test]
    fn round_trip_over_small_fields() {
        let mut rng = crate::rng::RngStream::from_seed(8);
        for q in [5u64, 7, 11, 13] {
            for k in 1..=3usize {
                for n in k..(q as usize).min(k + 3) {
                    for secret in 0..q {
                        let shares = shamir_split(secret, k, n, q, &mut rng).unwrap();
                        // Reconstruct from the last k shares as well as the first.
                        let tail = &shares[n - k..];
                        assert_eq!(shamir_reconstruct(tail, k).unwrap(), secret);
                        assert_eq!(shamir_reconstruct(&shares, k).unwrap(), secret);
                    }
                }
            }
        }
    }

    #[test]
    fn below_threshold_share_distribution_is_secret_independent() {
        // k=2, n=3, q=5: for each single share position, the multiset of
        // values over all blinding choices must not depend on the secret.
        let q = 5u64;
        for position in 0..3usize {
            let mut histograms: Vec<BTreeMap<u64, usize>> = Vec::new();
            for secret in 0..q {
                let mut hist = BTreeMap::new();
                for blind in 0..q {
                    let shares = shamir_split_with_blinding(secret, &[blind], 2, 3, q).unwrap();
                    *hist.entry(shares[position].value).or_insert(0) += 1;
                }
                histograms.push(hist);
            }
            assert!(histograms.windows(2).all(|w| w[0] == w[1]));
        }
        // Same for pairs of shares under k=3 (two blinding coefficients).
        for positions in [[0usize, 1], [0, 2], [1, 2]] {
            let mut histograms: Vec<BTreeMap<(u64, u64), usize>> = Vec::new();
            for secret in 0..q {
                let mut hist = BTreeMap::new();
                for b1 in 0..q {
                    for b2 in 0..q {
                        let shares =
                            shamir_split_with_blinding(secret, &[b1, b2], 3, 3, q).unwrap();
                        let pair = (shares[positions[0]].value, shares[positions[1]].value);
                        *hist.entry(pair).or_insert(0) += 1;
                    }
                }
                histograms.push(hist);
            }
            assert!(histograms.windows(2).all(|w| w[0] == w[1]));
        }
    }
}
