//! The ((k, n)) quantum threshold scheme as a polynomial code.
//!
//! A basis secret |s⟩ of dimension q maps to the uniform superposition over
//! the evaluation tuples (f(0), …, f(2k−2)) of all degree-<k polynomials
//! whose degree-(k−1) coefficient is s, extended linearly. Encoding the
//! secret in the leading coefficient permits q = n while keeping the code
//! MDS: any k evaluations determine f, and any k−1 are consistent with every
//! leading coefficient equally often.
//!
//! Schemes with n < 2k−1, including the ((m, m)) AND gates, are built at
//! n′ = 2k−1 with the surplus sites labeled environment: they stay in the
//! register as the purification and are never measured, exactly like
//! discarding shares of a pure scheme.
//!
//! Reconstruction from k held shares is a basis permutation on those sites:
//! (y₁ … y_k) ↦ (s, w) where w lists the values the code takes at the k−1
//! unheld points. The pair (s, w) determines f, so the map is a bijection,
//! and after it the unheld sites depend on w alone — the output site carries
//! the secret exactly, disentangled from everything else.

use super::gf::Gf;
use crate::error::{Error, Result};
use crate::quantum::{is_prime, QuditRegister, SiteLabel};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Threshold-scheme parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QtsParams {
    pub k: usize,
    pub n: usize,
    pub q: u64,
}

impl QtsParams {
    /// Validates 1 ≤ k ≤ n ≤ 2k−1 (no-cloning: k > n/2) and that the field
    /// covers the realized code: q prime, q ≥ 2k−1.
    pub fn new(k: usize, n: usize, q: u64) -> Result<Self> {
        if k < 1 || n < k {
            return Err(Error::InvalidParams(format!(
                "need 1 <= k <= n, got k={k}, n={n}"
            )));
        }
        if n > 2 * k - 1 {
            return Err(Error::InvalidParams(format!(
                "(({k},{n})) violates no-cloning: n <= 2k-1 required (k > n/2)"
            )));
        }
        if !is_prime(q) {
            return Err(Error::InvalidParams(format!("field size {q} is not prime")));
        }
        if q < (2 * k - 1) as u64 {
            return Err(Error::InvalidParams(format!(
                "field size {q} too small: the (({k},{n})) scheme is built at \
                 n'={} and needs that many evaluation points",
                2 * k - 1
            )));
        }
        Ok(QtsParams { k, n, q })
    }

    /// Realized site count 2k−1.
    pub fn realized_n(&self) -> usize {
        2 * self.k - 1
    }

    /// Surplus sites labeled environment.
    pub fn environment_count(&self) -> usize {
        self.realized_n() - self.n
    }
}

/// Encode the qudit at `site` (dimension q) into the threshold code. The
/// site keeps evaluation point 0; points 1..n′−1 are appended at the end of
/// the register in order, with the last n′−n labeled environment.
///
/// Returns the new register and the sites of the n real shares, point order.
pub fn qts_encode(
    reg: &QuditRegister,
    site: usize,
    params: &QtsParams,
) -> Result<(QuditRegister, Vec<usize>)> {
    let q = params.q;
    if site >= reg.site_count() {
        return Err(Error::InvalidParams(format!("site {site} out of range")));
    }
    if reg.dims()[site] != q {
        return Err(Error::InvalidParams(format!(
            "secret site has dimension {}, scheme field is {q}",
            reg.dims()[site]
        )));
    }
    let k = params.k;
    let n_prime = params.realized_n();
    if n_prime == 1 {
        // ((1,1)) is the identity embedding.
        return Ok((reg.clone(), vec![site]));
    }

    let gf = Gf::new(q)?;
    // Enumerate the q^(k-1) polynomials per leading coefficient once; store
    // each as its evaluation tuple (point 0 first).
    let lower_count = (q as usize).pow(k as u32 - 1);
    let mut evaluations: Vec<Vec<u64>> = Vec::with_capacity((q as usize) * lower_count);
    for s in 0..q {
        for mut lower in 0..lower_count as u64 {
            // Coefficients a_0 .. a_{k-2} from the mixed-radix index, then s.
            let mut coeffs = Vec::with_capacity(k);
            for _ in 0..k - 1 {
                coeffs.push(lower % q);
                lower /= q;
            }
            coeffs.push(s);
            evaluations.push((0..n_prime as u64).map(|x| gf.eval(&coeffs, x)).collect());
        }
    }

    let old_dims = reg.dims();
    let old_total = reg.total_dim();
    let appended = n_prime - 1;
    let mut dims = old_dims.to_vec();
    dims.extend(std::iter::repeat(q).take(appended));
    let mut labels = reg.labels().to_vec();
    for extra in 0..appended {
        labels.push(if 1 + extra < params.n {
            SiteLabel::Unassigned
        } else {
            SiteLabel::Environment
        });
    }

    let strides = reg.strides();
    let site_stride = strides[site];
    let d = q as usize;
    let scale = 1.0 / (lower_count as f64).sqrt();
    // Appended sites come after the old register, most significant first
    // among themselves: new index = old_base * q^(appended) + appended value.
    let tail: usize = d.pow(appended as u32);
    let mut amps = vec![Complex64::new(0.0, 0.0); old_total * tail];
    for (index, amp) in reg.amplitudes().iter().enumerate() {
        if amp.norm_sqr() == 0.0 {
            continue;
        }
        let s = index / site_stride % d;
        let base = index - s * site_stride;
        let weighted = amp * scale;
        for evaluation in &evaluations[s * lower_count..(s + 1) * lower_count] {
            let head = base + evaluation[0] as usize * site_stride;
            let mut tail_value = 0usize;
            for &v in &evaluation[1..] {
                tail_value = tail_value * d + v as usize;
            }
            amps[head * tail + tail_value] = weighted;
        }
    }

    let share_sites: Vec<usize> = std::iter::once(site)
        .chain((0..params.n - 1).map(|i| old_dims.len() + i))
        .collect();
    Ok((
        QuditRegister::from_parts(dims, labels, amps),
        share_sites,
    ))
}

/// Reconstruct from exactly k held shares, given as (site, evaluation point)
/// pairs. Applies the interpolation permutation on the held sites; the first
/// held site then carries the secret, disentangled.
///
/// Returns the new register and the output site.
pub fn qts_reconstruct(
    reg: &QuditRegister,
    shares: &[(usize, u64)],
    params: &QtsParams,
) -> Result<(QuditRegister, usize)> {
    let k = params.k;
    let q = params.q;
    let n_prime = params.realized_n() as u64;
    if shares.len() != k {
        return Err(Error::InvalidParams(format!(
            "reconstruction needs exactly k={k} shares, got {}",
            shares.len()
        )));
    }
    for &(site, point) in shares {
        if site >= reg.site_count() || reg.dims()[site] != q {
            return Err(Error::InvalidParams(format!(
                "share site {site} is missing or has the wrong dimension"
            )));
        }
        if point >= n_prime {
            return Err(Error::InvalidParams(format!(
                "evaluation point {point} is not part of this encoding"
            )));
        }
    }
    {
        let mut points: Vec<u64> = shares.iter().map(|&(_, p)| p).collect();
        points.sort_unstable();
        points.dedup();
        if points.len() != k {
            return Err(Error::InvalidParams("duplicate evaluation points".into()));
        }
    }
    if k == 1 {
        return Ok((reg.clone(), shares[0].0));
    }

    let gf = Gf::new(q)?;
    let held_points: Vec<u64> = shares.iter().map(|&(_, p)| p).collect();
    let unheld_points: Vec<u64> =
        (0..n_prime).filter(|p| !held_points.contains(p)).collect();

    // Permutation over the joint values of the held sites, in share order.
    let d = q as usize;
    let joint = d.pow(k as u32);
    let mut table = vec![0usize; joint];
    for (value, entry) in table.iter_mut().enumerate() {
        let mut digits = Vec::with_capacity(k);
        let mut rest = value;
        for _ in 0..k {
            digits.push(rest % d);
            rest /= d;
        }
        digits.reverse(); // first held site is the most significant digit
        let points: Vec<(u64, u64)> = held_points
            .iter()
            .zip(&digits)
            .map(|(&x, &y)| (x, y as u64))
            .collect();
        let coeffs = gf.interpolate(&points)?;
        let secret = coeffs[k - 1];
        let mut target = secret as usize;
        for &u in &unheld_points {
            target = target * d + gf.eval(&coeffs, u) as usize;
        }
        *entry = target;
    }

    let sites: Vec<usize> = shares.iter().map(|&(s, _)| s).collect();
    let out = reg.apply_basis_permutation(&sites, &table)?;
    Ok((out, sites[0]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::linalg;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn params_enforce_no_cloning_and_field_size() {
        assert!(QtsParams::new(2, 3, 3).is_ok());
        assert!(QtsParams::new(1, 1, 2).is_ok());
        assert!(QtsParams::new(2, 4, 5).is_err()); // k <= n/2
        assert!(QtsParams::new(3, 5, 3).is_err()); // q too small
        assert!(QtsParams::new(2, 3, 4).is_err()); // not prime
    }

    #[test]
    fn qutrit_code_of_basis_one() {
        // ((2,3)), q=3, |1⟩ → (|012⟩ + |120⟩ + |201⟩)/√3.
        let params = QtsParams::new(2, 3, 3).unwrap();
        let reg = QuditRegister::basis_state(&[3], &[1]).unwrap();
        let (encoded, sites) = qts_encode(&reg, 0, &params).unwrap();
        assert_eq!(sites, vec![0, 1, 2]);
        let w = 1.0 / 3.0f64.sqrt();
        let mut expected = vec![Complex64::new(0.0, 0.0); 27];
        expected[5] = c(w); // |0,1,2⟩
        expected[15] = c(w); // |1,2,0⟩
        expected[19] = c(w); // |2,0,1⟩
        for (a, b) in encoded.amplitudes().iter().zip(&expected) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn one_of_one_is_identity() {
        let params = QtsParams::new(1, 1, 3).unwrap();
        let reg = QuditRegister::basis_state(&[3], &[2]).unwrap();
        let (encoded, sites) = qts_encode(&reg, 0, &params).unwrap();
        assert_eq!(sites, vec![0]);
        assert_eq!(encoded.amplitudes(), reg.amplitudes());
    }

    #[test]
    fn two_of_two_labels_an_environment_site() {
        let params = QtsParams::new(2, 2, 3).unwrap();
        let reg = QuditRegister::basis_state(&[3], &[0]).unwrap();
        let (encoded, sites) = qts_encode(&reg, 0, &params).unwrap();
        assert_eq!(sites, vec![0, 1]);
        assert_eq!(encoded.site_count(), 3);
        assert_eq!(encoded.labels()[2], SiteLabel::Environment);
    }

    #[test]
    fn encode_is_an_isometry() {
        // Gram matrix of encoded basis states is the identity.
        for (k, n, q) in [(2, 3, 3), (3, 5, 5), (2, 2, 3)] {
            let params = QtsParams::new(k, n, q).unwrap();
            let encoded: Vec<QuditRegister> = (0..q)
                .map(|s| {
                    let reg = QuditRegister::basis_state(&[q], &[s]).unwrap();
                    qts_encode(&reg, 0, &params).unwrap().0
                })
                .collect();
            for (i, a) in encoded.iter().enumerate() {
                for (j, b) in encoded.iter().enumerate() {
                    let overlap = a.inner_product(b).unwrap();
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!(
                        (overlap - c(expect)).norm() < 1e-10,
                        "(({k},{n})) Gram defect at ({i},{j})"
                    );
                }
            }
        }
    }

    #[test]
    fn any_two_of_three_reconstruct_a_basis_secret() {
        let params = QtsParams::new(2, 3, 3).unwrap();
        let reg = QuditRegister::basis_state(&[3], &[1]).unwrap();
        let (encoded, sites) = qts_encode(&reg, 0, &params).unwrap();
        for pair in [[0usize, 1], [0, 2], [1, 2], [2, 0]] {
            let shares: Vec<(usize, u64)> =
                pair.iter().map(|&i| (sites[i], i as u64)).collect();
            let (recovered, out) = qts_reconstruct(&encoded, &shares, &params).unwrap();
            let fid = recovered
                .site_fidelity(out, &[c(0.0), c(1.0), c(0.0)])
                .unwrap();
            assert!((fid - 1.0).abs() < 1e-10, "pair {pair:?}: fidelity {fid}");
        }
    }

    #[test]
    fn superposition_secret_survives() {
        let params = QtsParams::new(2, 3, 3).unwrap();
        let w = std::f64::consts::FRAC_1_SQRT_2;
        let target = vec![c(w), c(0.0), c(w)];
        let reg = QuditRegister::prepare(&[3], target.clone()).unwrap();
        let (encoded, sites) = qts_encode(&reg, 0, &params).unwrap();
        for pair in [[0usize, 1], [0, 2], [1, 2]] {
            let shares: Vec<(usize, u64)> =
                pair.iter().map(|&i| (sites[i], i as u64)).collect();
            let (recovered, out) = qts_reconstruct(&encoded, &shares, &params).unwrap();
            let fid = recovered.site_fidelity(out, &target).unwrap();
            assert!((fid - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn one_share_is_rejected() {
        let params = QtsParams::new(2, 3, 3).unwrap();
        let reg = QuditRegister::basis_state(&[3], &[0]).unwrap();
        let (encoded, sites) = qts_encode(&reg, 0, &params).unwrap();
        assert!(qts_reconstruct(&encoded, &[(sites[0], 0)], &params).is_err());
    }

    #[test]
    fn sub_threshold_subsets_see_nothing() {
        // Reduced states of every subset of fewer than k shares agree across
        // two orthogonal secrets and a superposition, within 1e-10.
        let params = QtsParams::new(2, 3, 3).unwrap();
        let w = std::f64::consts::FRAC_1_SQRT_2;
        let secrets: Vec<Vec<Complex64>> = vec![
            vec![c(1.0), c(0.0), c(0.0)],
            vec![c(0.0), c(1.0), c(0.0)],
            vec![c(w), c(0.0), c(w)],
        ];
        let encoded: Vec<QuditRegister> = secrets
            .iter()
            .map(|amps| {
                let reg = QuditRegister::prepare(&[3], amps.clone()).unwrap();
                qts_encode(&reg, 0, &params).unwrap().0
            })
            .collect();
        for subset in [[0usize].as_slice(), &[1], &[2]] {
            let views: Vec<_> = encoded
                .iter()
                .map(|r| r.reduced_density(subset).unwrap())
                .collect();
            for pair in views.windows(2) {
                let (_, td) = crate::quantum::distance(&pair[0], &pair[1]).unwrap();
                assert!(td < 1e-10, "subset {subset:?} leaks {td}");
            }
        }
    }

    #[test]
    fn three_of_five_code_round_trips() {
        let params = QtsParams::new(3, 5, 5).unwrap();
        let w = std::f64::consts::FRAC_1_SQRT_2;
        let target = vec![c(w), c(0.0), c(0.0), c(0.0), c(w)];
        let reg = QuditRegister::prepare(&[5], target.clone()).unwrap();
        let (encoded, sites) = qts_encode(&reg, 0, &params).unwrap();
        assert_eq!(sites.len(), 5);
        let shares: Vec<(usize, u64)> = vec![(sites[4], 4), (sites[1], 1), (sites[3], 3)];
        let (recovered, out) = qts_reconstruct(&encoded, &shares, &params).unwrap();
        let fid = recovered.site_fidelity(out, &target).unwrap();
        assert!((fid - 1.0).abs() < 1e-10);
        // The other sites are untouched by whose-shares bookkeeping: the
        // output really is disentangled.
        let view = recovered.reduced_density(&[out]).unwrap();
        let eigs = linalg::eigvalsh(&view.matrix);
        assert!((eigs.last().unwrap() - 1.0).abs() < 1e-10);
    }
}
