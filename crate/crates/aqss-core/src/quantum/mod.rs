//! Dense statevector simulation of registers of prime-dimension qudits.
//!
//! A register is an amplitude vector over the mixed-radix basis of its sites,
//! site 0 most significant, together with an ownership label per site. All
//! gates here are either basis permutations (automatically unitary), per-site
//! diagonal phases, or the d-dimensional discrete Fourier transform; that is
//! enough to express every interpolation, correction, and one-time-pad
//! operation the schemes need. Registers are immutable-in, new-value-out.

mod density;
pub(crate) mod linalg;

pub use density::{distance, DensityView};

use crate::error::{Error, Result};
use crate::rng::RngStream;
use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;

pub const NORM_TOLERANCE: f64 = 1e-10;

/// Who holds a site.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum SiteLabel {
    Unassigned,
    Player(String),
    Dealer,
    Environment,
}

impl fmt::Display for SiteLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SiteLabel::Unassigned => f.write_str("unassigned"),
            SiteLabel::Player(name) => f.write_str(name),
            SiteLabel::Dealer => f.write_str("dealer"),
            SiteLabel::Environment => f.write_str("environment"),
        }
    }
}

impl Serialize for SiteLabel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for SiteLabel {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Ok(match String::deserialize(d)?.as_str() {
            "unassigned" => SiteLabel::Unassigned,
            "dealer" => SiteLabel::Dealer,
            "environment" => SiteLabel::Environment,
            name => SiteLabel::Player(name.to_string()),
        })
    }
}

/// Measurement basis. The diagonal basis is the Fourier basis (Hadamard for
/// qubits).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    Computational,
    Diagonal,
}

/// One measurement result: a value per measured site, in call order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Outcome {
    pub values: Vec<u64>,
    pub basis: Basis,
}

/// A pure state over an ordered list of prime-dimension qudits.
#[derive(Debug, Clone)]
pub struct QuditRegister {
    dims: Vec<u64>,
    labels: Vec<SiteLabel>,
    amps: Vec<Complex64>,
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn smallest_prime_at_least(n: u64) -> u64 {
    (n.max(2)..).find(|&p| is_prime(p)).unwrap()
}

impl QuditRegister {
    /// Build a register from explicit amplitudes. The vector must have length
    /// ∏dims and be normalized within [`NORM_TOLERANCE`]. Labels default to
    /// unassigned.
    pub fn prepare(dims: &[u64], amplitudes: Vec<Complex64>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidRegister(
                "register needs at least one site".into(),
            ));
        }
        for &d in dims {
            if !is_prime(d) {
                return Err(Error::InvalidRegister(format!(
                    "site dimension {d} is not prime"
                )));
            }
        }
        let total: u128 = dims.iter().map(|&d| d as u128).product();
        if total != amplitudes.len() as u128 {
            return Err(Error::InvalidRegister(format!(
                "amplitude vector has length {}, expected {total}",
                amplitudes.len()
            )));
        }
        let norm_sq: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sq.sqrt() - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidRegister(format!(
                "state norm {} is not 1 within {NORM_TOLERANCE}",
                norm_sq.sqrt()
            )));
        }
        Ok(QuditRegister {
            labels: vec![SiteLabel::Unassigned; dims.len()],
            dims: dims.to_vec(),
            amps: amplitudes,
        })
    }

    /// |v₁ v₂ … vₙ⟩.
    pub fn basis_state(dims: &[u64], values: &[u64]) -> Result<Self> {
        if values.len() != dims.len() {
            return Err(Error::InvalidRegister("one value per site required".into()));
        }
        for (v, d) in values.iter().zip(dims) {
            if v >= d {
                return Err(Error::InvalidRegister(format!(
                    "value {v} out of range for dimension {d}"
                )));
            }
        }
        let total: usize = dims.iter().map(|&d| d as usize).product();
        let mut amps = vec![Complex64::new(0.0, 0.0); total];
        let mut index = 0usize;
        for (v, d) in values.iter().zip(dims) {
            index = index * *d as usize + *v as usize;
        }
        amps[index] = Complex64::new(1.0, 0.0);
        QuditRegister::prepare(dims, amps)
    }

    /// The n-party qubit state (|0…0⟩ + |1…1⟩)/√2.
    pub fn ghz(n: usize) -> Self {
        let dims = vec![2u64; n];
        let total = 1usize << n;
        let mut amps = vec![Complex64::new(0.0, 0.0); total];
        let x = std::f64::consts::FRAC_1_SQRT_2;
        amps[0] = Complex64::new(x, 0.0);
        amps[total - 1] = Complex64::new(x, 0.0);
        QuditRegister {
            dims,
            labels: vec![SiteLabel::Unassigned; n],
            amps,
        }
    }

    pub fn site_count(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[u64] {
        &self.dims
    }

    pub fn total_dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub(crate) fn from_parts(
        dims: Vec<u64>,
        labels: Vec<SiteLabel>,
        amps: Vec<Complex64>,
    ) -> Self {
        debug_assert_eq!(
            dims.iter().map(|&d| d as usize).product::<usize>(),
            amps.len()
        );
        debug_assert_eq!(dims.len(), labels.len());
        QuditRegister { dims, labels, amps }
    }

    pub fn labels(&self) -> &[SiteLabel] {
        &self.labels
    }

    pub fn set_label(&mut self, site: usize, label: SiteLabel) {
        self.labels[site] = label;
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn inner_product(&self, other: &QuditRegister) -> Result<Complex64> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch("registers differ in shape".into()));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Stride of each site in the flat index (site 0 most significant).
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1usize; self.dims.len()];
        for i in (0..self.dims.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.dims[i + 1] as usize;
        }
        strides
    }

    /// Tensor product; `self` sites first.
    pub fn tensor(&self, other: &QuditRegister) -> QuditRegister {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        let mut labels = self.labels.clone();
        labels.extend_from_slice(&other.labels);
        let mut amps = Vec::with_capacity(self.amps.len() * other.amps.len());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        QuditRegister { dims, labels, amps }
    }

    fn check_sites(&self, sites: &[usize]) -> Result<()> {
        let mut seen = std::collections::BTreeSet::new();
        for &s in sites {
            if s >= self.dims.len() {
                return Err(Error::InvalidParams(format!("site {s} out of range")));
            }
            if !seen.insert(s) {
                return Err(Error::InvalidParams(format!("site {s} listed twice")));
            }
        }
        Ok(())
    }

    /// Apply a permutation of the joint computational basis of `sites`:
    /// joint value v ↦ permutation[v]. Unitarity is automatic for any
    /// bijection; non-bijective tables are rejected.
    pub fn apply_basis_permutation(&self, sites: &[usize], permutation: &[usize]) -> Result<Self> {
        self.check_sites(sites)?;
        let joint: usize = sites.iter().map(|&s| self.dims[s] as usize).product();
        if permutation.len() != joint {
            return Err(Error::InvalidParams(format!(
                "permutation table has {} entries, expected {joint}",
                permutation.len()
            )));
        }
        let mut seen = vec![false; joint];
        for &t in permutation {
            if t >= joint || seen[t] {
                return Err(Error::InvalidParams(
                    "permutation table is not a bijection".into(),
                ));
            }
            seen[t] = true;
        }

        let strides = self.strides();
        let site_strides: Vec<usize> = sites.iter().map(|&s| strides[s]).collect();
        let site_dims: Vec<usize> = sites.iter().map(|&s| self.dims[s] as usize).collect();
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (index, amp) in self.amps.iter().enumerate() {
            if amp.norm_sqr() == 0.0 {
                continue;
            }
            let mut joint_value = 0usize;
            let mut base = index;
            for (stride, dim) in site_strides.iter().zip(&site_dims) {
                let digit = index / stride % dim;
                joint_value = joint_value * dim + digit;
                base -= digit * stride;
            }
            let mut target_joint = permutation[joint_value];
            let mut target = base;
            for (stride, dim) in site_strides.iter().zip(&site_dims).rev() {
                target += target_joint % dim * stride;
                target_joint /= dim;
            }
            out[target] = *amp;
        }
        Ok(QuditRegister {
            dims: self.dims.clone(),
            labels: self.labels.clone(),
            amps: out,
        })
    }

    /// Multiply each basis state by `phases[v]` where v is the value at
    /// `site`. The phases must have unit modulus.
    pub fn apply_phases(&self, site: usize, phases: &[Complex64]) -> Result<Self> {
        self.check_sites(&[site])?;
        let d = self.dims[site] as usize;
        if phases.len() != d {
            return Err(Error::InvalidParams(format!(
                "phase table has {} entries, expected {d}",
                phases.len()
            )));
        }
        if phases.iter().any(|p| (p.norm() - 1.0).abs() > 1e-12) {
            return Err(Error::InvalidParams("phases must have unit modulus".into()));
        }
        let stride = self.strides()[site];
        let mut amps = self.amps.clone();
        for (index, amp) in amps.iter_mut().enumerate() {
            *amp *= phases[index / stride % d];
        }
        Ok(QuditRegister {
            dims: self.dims.clone(),
            labels: self.labels.clone(),
            amps,
        })
    }

    /// d-dimensional discrete Fourier transform on one site (the Hadamard
    /// when d = 2): |x⟩ ↦ Σ_y ω^{xy} |y⟩ / √d.
    pub fn apply_fourier(&self, site: usize) -> Result<Self> {
        self.fourier_impl(site, 1.0)
    }

    /// Inverse Fourier transform on one site.
    pub fn apply_fourier_inverse(&self, site: usize) -> Result<Self> {
        self.fourier_impl(site, -1.0)
    }

    fn fourier_impl(&self, site: usize, sign: f64) -> Result<Self> {
        self.check_sites(&[site])?;
        let d = self.dims[site] as usize;
        let stride = self.strides()[site];
        let scale = 1.0 / (d as f64).sqrt();
        let omega: Vec<Complex64> = (0..d)
            .map(|k| {
                Complex64::from_polar(scale, sign * std::f64::consts::TAU * k as f64 / d as f64)
            })
            .collect();
        let mut amps = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        let block = stride * d;
        for base in (0..self.amps.len()).step_by(block) {
            for offset in 0..stride {
                let start = base + offset;
                for y in 0..d {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for x in 0..d {
                        acc += omega[x * y % d] * self.amps[start + x * stride];
                    }
                    amps[start + y * stride] = acc;
                }
            }
        }
        Ok(QuditRegister {
            dims: self.dims.clone(),
            labels: self.labels.clone(),
            amps,
        })
    }

    /// Measure `sites` in the given basis. Returns the sampled outcome and
    /// the collapsed, renormalized register (expressed back in the
    /// computational frame). A diagonal measurement applies the Fourier
    /// transform, measures computationally, and reports the outcome in the
    /// diagonal labels.
    pub fn measure(
        &self,
        sites: &[usize],
        basis: Basis,
        rng: &mut RngStream,
    ) -> Result<(Outcome, Self)> {
        self.check_sites(sites)?;
        let mut frame = self.clone();
        if basis == Basis::Diagonal {
            for &s in sites {
                frame = frame.apply_fourier(s)?;
            }
        }
        let strides = frame.strides();
        let site_strides: Vec<usize> = sites.iter().map(|&s| strides[s]).collect();
        let site_dims: Vec<usize> = sites.iter().map(|&s| frame.dims[s] as usize).collect();
        let joint: usize = site_dims.iter().product();

        let mut probabilities = vec![0.0f64; joint];
        for (index, amp) in frame.amps.iter().enumerate() {
            let p = amp.norm_sqr();
            if p == 0.0 {
                continue;
            }
            let mut joint_value = 0usize;
            for (stride, dim) in site_strides.iter().zip(&site_dims) {
                joint_value = joint_value * dim + index / stride % dim;
            }
            probabilities[joint_value] += p;
        }

        let draw = rng.unit();
        let mut cumulative = 0.0;
        let mut picked = joint - 1;
        for (value, &p) in probabilities.iter().enumerate() {
            cumulative += p;
            if draw < cumulative {
                picked = value;
                break;
            }
        }

        let weight = probabilities[picked].sqrt();
        for (index, amp) in frame.amps.iter_mut().enumerate() {
            let mut joint_value = 0usize;
            for (stride, dim) in site_strides.iter().zip(&site_dims) {
                joint_value = joint_value * dim + index / stride % dim;
            }
            if joint_value == picked {
                *amp /= weight;
            } else {
                *amp = Complex64::new(0.0, 0.0);
            }
        }

        if basis == Basis::Diagonal {
            for &s in sites {
                frame = frame.apply_fourier_inverse(s)?;
            }
        }

        let mut values = vec![0u64; sites.len()];
        let mut rest = picked;
        for (slot, dim) in site_dims.iter().enumerate().rev() {
            values[slot] = (rest % dim) as u64;
            rest /= dim;
        }
        Ok((Outcome { values, basis }, frame))
    }

    /// Partial trace onto `sites` (in the order given).
    pub fn reduced_density(&self, sites: &[usize]) -> Result<DensityView> {
        self.check_sites(sites)?;
        let strides = self.strides();
        let site_strides: Vec<usize> = sites.iter().map(|&s| strides[s]).collect();
        let site_dims: Vec<usize> = sites.iter().map(|&s| self.dims[s] as usize).collect();
        let kept: usize = site_dims.iter().product();
        let rest_total = self.amps.len() / kept;

        // Gather into a kept-major matrix, then contract the rest index.
        let rest_sites: Vec<usize> = (0..self.dims.len())
            .filter(|s| !sites.contains(s))
            .collect();
        let mut gathered = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (index, amp) in self.amps.iter().enumerate() {
            if amp.norm_sqr() == 0.0 {
                continue;
            }
            let mut joint_value = 0usize;
            for (stride, dim) in site_strides.iter().zip(&site_dims) {
                joint_value = joint_value * dim + index / stride % dim;
            }
            let mut rest_value = 0usize;
            for &s in &rest_sites {
                rest_value = rest_value * self.dims[s] as usize + index / strides[s] % self.dims[s] as usize;
            }
            gathered[joint_value * rest_total + rest_value] = *amp;
        }

        let mut matrix = linalg::CMatrix::zeros(kept);
        for a in 0..kept {
            for b in a..kept {
                let mut acc = Complex64::new(0.0, 0.0);
                for r in 0..rest_total {
                    acc += gathered[a * rest_total + r] * gathered[b * rest_total + r].conj();
                }
                matrix[(a, b)] = acc;
                matrix[(b, a)] = acc.conj();
            }
        }
        DensityView::new(sites.to_vec(), matrix)
    }

    /// Drop a site that is known to sit in the basis state |value⟩,
    /// shrinking the register. Fails if any amplitude lives elsewhere.
    pub fn project_out(&self, site: usize, value: u64) -> Result<Self> {
        self.check_sites(&[site])?;
        let d = self.dims[site] as usize;
        if value >= self.dims[site] {
            return Err(Error::InvalidParams(format!("value {value} out of range")));
        }
        if self.dims.len() == 1 {
            return Err(Error::InvalidParams(
                "cannot project out the last site".into(),
            ));
        }
        let stride = self.strides()[site];
        let mut kept = Vec::with_capacity(self.amps.len() / d);
        let mut kept_weight = 0.0f64;
        for (index, amp) in self.amps.iter().enumerate() {
            if (index / stride % d) as u64 == value {
                kept.push(*amp);
                kept_weight += amp.norm_sqr();
            } else if amp.norm_sqr() > NORM_TOLERANCE * NORM_TOLERANCE {
                return Err(Error::InvalidRegister(format!(
                    "site {site} is not fixed at |{value}⟩"
                )));
            }
        }
        let scale = 1.0 / kept_weight.sqrt();
        for amp in kept.iter_mut() {
            *amp *= scale;
        }
        let mut dims = self.dims.clone();
        dims.remove(site);
        let mut labels = self.labels.clone();
        labels.remove(site);
        Ok(QuditRegister {
            dims,
            labels,
            amps: kept,
        })
    }

    /// Rearrange the tensor factors: new site i is old site `order[i]`.
    pub fn reorder_sites(&self, order: &[usize]) -> Result<Self> {
        self.check_sites(order)?;
        if order.len() != self.dims.len() {
            return Err(Error::InvalidParams(
                "reordering must list every site exactly once".into(),
            ));
        }
        let old_strides = self.strides();
        let dims: Vec<u64> = order.iter().map(|&s| self.dims[s]).collect();
        let labels: Vec<SiteLabel> = order.iter().map(|&s| self.labels[s].clone()).collect();
        let mut new_strides = vec![1usize; dims.len()];
        for i in (0..dims.len().saturating_sub(1)).rev() {
            new_strides[i] = new_strides[i + 1] * dims[i + 1] as usize;
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (index, amp) in self.amps.iter().enumerate() {
            if amp.norm_sqr() == 0.0 {
                continue;
            }
            let mut target = 0usize;
            for (slot, &old_site) in order.iter().enumerate() {
                let digit = index / old_strides[old_site] % self.dims[old_site] as usize;
                target += digit * new_strides[slot];
            }
            amps[target] = *amp;
        }
        Ok(QuditRegister { dims, labels, amps })
    }

    /// Fidelity ⟨φ|ρ|φ⟩ of one site's reduced state against a pure target.
    pub fn site_fidelity(&self, site: usize, target: &[Complex64]) -> Result<f64> {
        let d = self.dims[site] as usize;
        if target.len() != d {
            return Err(Error::DimensionMismatch(format!(
                "target has {} amplitudes, site has dimension {d}",
                target.len()
            )));
        }
        let view = self.reduced_density(&[site])?;
        let mut acc = Complex64::new(0.0, 0.0);
        for a in 0..d {
            for b in 0..d {
                acc += target[a].conj() * view.matrix[(a, b)] * target[b];
            }
        }
        Ok(acc.re)
    }
}

/// A generalized Pauli key: per-site exponents (a, b) of X^a Z^b, worth
/// 2·log(d) bits of randomness per site.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PauliKey {
    pub entries: Vec<(u64, u64)>,
}

impl PauliKey {
    pub fn zero(sites: usize) -> Self {
        PauliKey {
            entries: vec![(0, 0); sites],
        }
    }

    /// Uniform key for the given site dimensions.
    pub fn random(dims: &[u64], rng: &mut RngStream) -> Self {
        PauliKey {
            entries: dims.iter().map(|&d| (rng.below(d), rng.below(d))).collect(),
        }
    }

    /// Pack into a bitstring, 2·⌈log₂ d⌉ bits per site (2 bits per qubit).
    pub fn to_bits(&self, dims: &[u64]) -> Vec<bool> {
        let mut bits = Vec::new();
        for (&(a, b), &d) in self.entries.iter().zip(dims) {
            let width = bit_width(d);
            for value in [a, b] {
                for k in (0..width).rev() {
                    bits.push(value >> k & 1 == 1);
                }
            }
        }
        bits
    }

    pub fn from_bits(bits: &[bool], dims: &[u64]) -> Result<Self> {
        let mut entries = Vec::with_capacity(dims.len());
        let mut cursor = 0;
        for &d in dims {
            let width = bit_width(d);
            let mut pair = [0u64; 2];
            for slot in &mut pair {
                if cursor + width > bits.len() {
                    return Err(Error::InvalidParams("key bitstring too short".into()));
                }
                for _ in 0..width {
                    *slot = *slot << 1 | u64::from(bits[cursor]);
                    cursor += 1;
                }
                if *slot >= d {
                    return Err(Error::InvalidParams("key value out of range".into()));
                }
            }
            entries.push((pair[0], pair[1]));
        }
        if cursor != bits.len() {
            return Err(Error::InvalidParams("key bitstring too long".into()));
        }
        Ok(PauliKey { entries })
    }
}

fn bit_width(d: u64) -> usize {
    64 - (d - 1).leading_zeros() as usize
}

/// Encrypt: apply X^a Z^b on each listed site (Z first, then the X shift).
pub fn qotp_encrypt(reg: &QuditRegister, sites: &[usize], key: &PauliKey) -> Result<QuditRegister> {
    if key.entries.len() != sites.len() {
        return Err(Error::DimensionMismatch(format!(
            "key has {} entries for {} sites",
            key.entries.len(),
            sites.len()
        )));
    }
    let mut out = reg.clone();
    for (&site, &(a, b)) in sites.iter().zip(&key.entries) {
        let d = reg.dims()[site];
        out = out.apply_phases(site, &z_phases(d, b))?;
        out = out.apply_basis_permutation(&[site], &x_shift(d, a))?;
    }
    Ok(out)
}

/// Decrypt: the exact inverse, so decrypt ∘ encrypt is the identity.
pub fn qotp_decrypt(reg: &QuditRegister, sites: &[usize], key: &PauliKey) -> Result<QuditRegister> {
    if key.entries.len() != sites.len() {
        return Err(Error::DimensionMismatch(format!(
            "key has {} entries for {} sites",
            key.entries.len(),
            sites.len()
        )));
    }
    let mut out = reg.clone();
    for (&site, &(a, b)) in sites.iter().zip(&key.entries).rev() {
        let d = reg.dims()[site];
        out = out.apply_basis_permutation(&[site], &x_shift(d, (d - a % d) % d))?;
        out = out.apply_phases(site, &z_phases(d, (d - b % d) % d))?;
    }
    Ok(out)
}

fn x_shift(d: u64, a: u64) -> Vec<usize> {
    (0..d).map(|v| ((v + a) % d) as usize).collect()
}

fn z_phases(d: u64, b: u64) -> Vec<Complex64> {
    (0..d)
        .map(|v| {
            Complex64::from_polar(1.0, std::f64::consts::TAU * (b * v % d) as f64 / d as f64)
        })
        .collect()
}

// --- serde: amplitudes as (re, im) pairs ---

#[derive(Serialize, Deserialize)]
struct RegisterWire {
    dims: Vec<u64>,
    labels: Vec<SiteLabel>,
    amplitudes: Vec<(f64, f64)>,
}

impl Serialize for QuditRegister {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RegisterWire {
            dims: self.dims.clone(),
            labels: self.labels.clone(),
            amplitudes: self.amps.iter().map(|a| (a.re, a.im)).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for QuditRegister {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let wire = RegisterWire::deserialize(d)?;
        let amps = wire
            .amplitudes
            .iter()
            .map(|&(re, im)| Complex64::new(re, im))
            .collect();
        let mut reg = QuditRegister::prepare(&wire.dims, amps).map_err(D::Error::custom)?;
        if wire.labels.len() != reg.site_count() {
            return Err(D::Error::custom("one label per site required"));
        }
        for (site, label) in wire.labels.into_iter().enumerate() {
            reg.set_label(site, label);
        }
        Ok(reg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn prepare_validates_inputs() {
        assert!(QuditRegister::prepare(&[2], vec![c(1.0, 0.0), c(0.0, 0.0)]).is_ok());
        assert!(matches!(
            QuditRegister::prepare(&[4], vec![c(1.0, 0.0); 4]),
            Err(Error::InvalidRegister(_))
        ));
        assert!(matches!(
            QuditRegister::prepare(&[2], vec![c(1.0, 0.0)]),
            Err(Error::InvalidRegister(_))
        ));
        assert!(matches!(
            QuditRegister::prepare(&[2], vec![c(0.9, 0.0), c(0.1, 0.0)]),
            Err(Error::InvalidRegister(_))
        ));
    }

    #[test]
    fn balanced_qutrit() {
        let w = 1.0 / 3.0f64.sqrt();
        let reg = QuditRegister::prepare(&[3], vec![c(w, 0.0); 3]).unwrap();
        assert!(close(reg.norm(), 1.0, 1e-12));
    }

    #[test]
    fn cnot_as_permutation() {
        // |10⟩ ↔ |11⟩ on two qubits, control = site 0.
        let reg = QuditRegister::basis_state(&[2, 2], &[1, 0]).unwrap();
        let cnot = vec![0, 1, 3, 2];
        let out = reg.apply_basis_permutation(&[0, 1], &cnot).unwrap();
        assert!(close(out.amplitudes()[3].re, 1.0, 1e-12));
        // Identity permutation leaves the state unchanged.
        let id = reg.apply_basis_permutation(&[0, 1], &[0, 1, 2, 3]).unwrap();
        assert_eq!(reg.amplitudes(), id.amplitudes());
    }

    #[test]
    fn modular_add_on_qutrits_is_unitary() {
        // |x, y⟩ → |x, y + x mod 3⟩.
        let table: Vec<usize> = (0..9)
            .map(|v| {
                let (x, y) = (v / 3, v % 3);
                x * 3 + (y + x) % 3
            })
            .collect();
        let w = 1.0 / 3.0;
        let amps: Vec<Complex64> = (0..9).map(|_| c(w, 0.0)).collect();
        let reg = QuditRegister::prepare(&[3, 3], amps).unwrap();
        let out = reg.apply_basis_permutation(&[0, 1], &table).unwrap();
        assert!(close(out.norm(), 1.0, 1e-12));
        for x in 0..3usize {
            for y in 0..3usize {
                let source =
                    QuditRegister::basis_state(&[3, 3], &[x as u64, y as u64]).unwrap();
                let moved = source.apply_basis_permutation(&[0, 1], &table).unwrap();
                let expect = x * 3 + (y + x) % 3;
                assert!(close(moved.amplitudes()[expect].re, 1.0, 1e-12));
            }
        }
    }

    #[test]
    fn non_bijective_table_rejected() {
        let reg = QuditRegister::basis_state(&[2], &[0]).unwrap();
        assert!(matches!(
            reg.apply_basis_permutation(&[0], &[0, 0]),
            Err(Error::InvalidParams(_))
        ));
    }

    #[test]
    fn hadamard_on_zero() {
        let reg = QuditRegister::basis_state(&[2], &[0]).unwrap();
        let out = reg.apply_fourier(0).unwrap();
        let x = std::f64::consts::FRAC_1_SQRT_2;
        assert!(close(out.amplitudes()[0].re, x, 1e-12));
        assert!(close(out.amplitudes()[1].re, x, 1e-12));
    }

    #[test]
    fn fourier_round_trip() {
        let w = 1.0 / 3.0f64.sqrt();
        let reg =
            QuditRegister::prepare(&[3], vec![c(w, 0.0), c(0.0, w), c(-w, 0.0)]).unwrap();
        let back = reg
            .apply_fourier(0)
            .unwrap()
            .apply_fourier_inverse(0)
            .unwrap();
        for (a, b) in reg.amplitudes().iter().zip(back.amplitudes()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn hadamards_on_ghz_give_even_parity_support() {
        let mut reg = QuditRegister::ghz(3);
        for s in 0..3 {
            reg = reg.apply_fourier(s).unwrap();
        }
        for (index, amp) in reg.amplitudes().iter().enumerate() {
            let parity = (index as u32).count_ones() % 2;
            if parity == 0 {
                assert!(close(amp.norm(), 0.5, 1e-12), "even strings carry weight 1/2");
            } else {
                assert!(amp.norm() < 1e-12, "odd strings vanish");
            }
        }
    }

    #[test]
    fn measurement_of_basis_state_is_deterministic() {
        let reg = QuditRegister::basis_state(&[2], &[0]).unwrap();
        let mut rng = RngStream::from_seed(5);
        for _ in 0..20 {
            let (outcome, post) = reg.measure(&[0], Basis::Computational, &mut rng).unwrap();
            assert_eq!(outcome.values, vec![0]);
            assert!(close(post.amplitudes()[0].re, 1.0, 1e-12));
        }
    }

    #[test]
    fn epr_pair_measures_correlated() {
        let reg = QuditRegister::ghz(2);
        let mut rng = RngStream::from_seed(11);
        for _ in 0..50 {
            let (outcome, _) = reg
                .measure(&[0, 1], Basis::Computational, &mut rng)
                .unwrap();
            assert_eq!(outcome.values[0], outcome.values[1]);
        }
    }

    #[test]
    fn ghz_diagonal_outcomes_have_even_parity() {
        let reg = QuditRegister::ghz(3);
        let mut rng = RngStream::from_seed(2);
        for _ in 0..200 {
            let (outcome, _) = reg.measure(&[0, 1, 2], Basis::Diagonal, &mut rng).unwrap();
            let parity: u64 = outcome.values.iter().sum::<u64>() % 2;
            assert_eq!(parity, 0);
        }
    }

    #[test]
    fn measurement_collapse_is_consistent() {
        // After measuring one half of an EPR pair, the other half is fixed.
        let reg = QuditRegister::ghz(2);
        let mut rng = RngStream::from_seed(9);
        let (outcome, post) = reg.measure(&[0], Basis::Computational, &mut rng).unwrap();
        let (second, _) = post.measure(&[1], Basis::Computational, &mut rng).unwrap();
        assert_eq!(outcome.values[0], second.values[0]);
    }

    #[test]
    fn reduced_half_of_epr_is_maximally_mixed() {
        let reg = QuditRegister::ghz(2);
        let view = reg.reduced_density(&[0]).unwrap();
        for a in 0..2 {
            for b in 0..2 {
                let expect = if a == b { 0.5 } else { 0.0 };
                assert!((view.matrix[(a, b)] - c(expect, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn reduced_full_register_is_rank_one() {
        let reg = QuditRegister::ghz(2);
        let view = reg.reduced_density(&[0, 1]).unwrap();
        let eigs = super::linalg::eigvalsh(&view.matrix);
        assert!(close(eigs[3], 1.0, 1e-12));
        assert!(eigs[..3].iter().all(|l| l.abs() < 1e-12));
    }

    #[test]
    fn qotp_zero_key_is_identity() {
        let reg = QuditRegister::ghz(2);
        let out = qotp_encrypt(&reg, &[0, 1], &PauliKey::zero(2)).unwrap();
        assert_eq!(reg.amplitudes(), out.amplitudes());
    }

    #[test]
    fn qotp_round_trip() {
        let w = 1.0 / 3.0f64.sqrt();
        let reg =
            QuditRegister::prepare(&[3], vec![c(w, 0.0), c(0.0, w), c(-w, 0.0)]).unwrap();
        let mut rng = RngStream::from_seed(21);
        for _ in 0..20 {
            let key = PauliKey::random(&[3], &mut rng);
            let enc = qotp_encrypt(&reg, &[0], &key).unwrap();
            let dec = qotp_decrypt(&enc, &[0], &key).unwrap();
            for (a, b) in reg.amplitudes().iter().zip(dec.amplitudes()) {
                assert!((a - b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn qotp_key_average_is_maximally_mixed() {
        // Average of X^a Z^b |S⟩⟨S| over all d² keys equals I/d.
        for (dims, amps) in [
            (vec![2u64], vec![c(0.6, 0.0), c(0.0, 0.8)]),
            (vec![3u64], vec![c(0.5, 0.0), c(0.5, 0.5), c(0.0, 0.5)]),
        ] {
            let reg = QuditRegister::prepare(&dims, amps).unwrap();
            let d = dims[0];
            let mut average = linalg::CMatrix::zeros(d as usize);
            for a in 0..d {
                for b in 0..d {
                    let key = PauliKey {
                        entries: vec![(a, b)],
                    };
                    let enc = qotp_encrypt(&reg, &[0], &key).unwrap();
                    let view = enc.reduced_density(&[0]).unwrap();
                    average = average.add(&view.matrix);
                }
            }
            average = average.scale(1.0 / (d * d) as f64);
            let target = linalg::CMatrix::identity(d as usize).scale(1.0 / d as f64);
            assert!(average.sub(&target).frobenius_norm() < 1e-12);
        }
    }

    #[test]
    fn pauli_key_bit_round_trip() {
        let mut rng = RngStream::from_seed(14);
        for dims in [vec![2u64, 2], vec![3u64], vec![2u64, 3, 5]] {
            let key = PauliKey::random(&dims, &mut rng);
            let bits = key.to_bits(&dims);
            let back = PauliKey::from_bits(&bits, &dims).unwrap();
            assert_eq!(key, back);
        }
        // Qubit sites use exactly 2 bits per site.
        let key = PauliKey::zero(3);
        assert_eq!(key.to_bits(&[2, 2, 2]).len(), 6);
    }

    #[test]
    fn project_out_drops_a_fixed_site() {
        // |0⟩ ⊗ EPR: site 0 is fixed, sites 1,2 stay entangled.
        let fixed = QuditRegister::basis_state(&[2], &[0]).unwrap();
        let reg = fixed.tensor(&QuditRegister::ghz(2));
        let smaller = reg.project_out(0, 0).unwrap();
        assert_eq!(smaller.site_count(), 2);
        let x = std::f64::consts::FRAC_1_SQRT_2;
        assert!(close(smaller.amplitudes()[0].re, x, 1e-12));
        assert!(close(smaller.amplitudes()[3].re, x, 1e-12));
        // An entangled site cannot be projected out.
        assert!(reg.project_out(1, 0).is_err());
    }

    #[test]
    fn reorder_sites_transposes_factors() {
        let reg = QuditRegister::basis_state(&[2, 3], &[1, 2]).unwrap();
        let swapped = reg.reorder_sites(&[1, 0]).unwrap();
        assert_eq!(swapped.dims(), &[3, 2]);
        // |1,2⟩ becomes |2,1⟩: index 2*2 + 1 = 5.
        assert!(close(swapped.amplitudes()[5].re, 1.0, 1e-12));
    }

    #[test]
    fn register_json_round_trip() {
        let mut reg = QuditRegister::ghz(2);
        reg.set_label(0, SiteLabel::Player("A".into()));
        reg.set_label(1, SiteLabel::Environment);
        let json = serde_json::to_string(&reg).unwrap();
        let back: QuditRegister = serde_json::from_str(&json).unwrap();
        assert_eq!(back.labels()[0], SiteLabel::Player("A".into()));
        assert_eq!(back.labels()[1], SiteLabel::Environment);
        for (a, b) in reg.amplitudes().iter().zip(back.amplitudes()) {
            assert!((a - b).norm() == 0.0);
        }
    }
}
