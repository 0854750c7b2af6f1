//! Reduced density matrices and distances between them.

use super::linalg::{self, CMatrix};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

pub const HERMITICITY_TOLERANCE: f64 = 1e-10;
pub const TRACE_TOLERANCE: f64 = 1e-10;
pub const PSD_TOLERANCE: f64 = 1e-8;

/// A reduced state on a subset of register sites: Hermitian, trace one,
/// positive semidefinite (all within tolerance, checked at construction).
#[derive(Debug, Clone)]
pub struct DensityView {
    pub sites: Vec<usize>,
    pub matrix: CMatrix,
}

impl DensityView {
    pub fn new(sites: Vec<usize>, matrix: CMatrix) -> Result<Self> {
        let defect = matrix.hermiticity_defect();
        if defect > HERMITICITY_TOLERANCE {
            return Err(Error::InvalidRegister(format!(
                "density matrix is not Hermitian (defect {defect:.2e})"
            )));
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > TRACE_TOLERANCE || trace.im.abs() > TRACE_TOLERANCE {
            return Err(Error::InvalidRegister(format!(
                "density matrix trace {trace} is not 1"
            )));
        }
        let min_eig = linalg::eigvalsh(&matrix)
            .first()
            .copied()
            .unwrap_or(0.0);
        if min_eig < -PSD_TOLERANCE {
            return Err(Error::InvalidRegister(format!(
                "density matrix has negative eigenvalue {min_eig:.2e}"
            )));
        }
        Ok(DensityView { sites, matrix })
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }
}

impl Serialize for DensityView {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Wire<'a> {
            sites: &'a [usize],
            dim: usize,
            entries: Vec<Vec<(f64, f64)>>,
        }
        let n = self.matrix.dim();
        let entries = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let z = self.matrix[(i, j)];
                        (z.re, z.im)
                    })
                    .collect()
            })
            .collect();
        Wire {
            sites: &self.sites,
            dim: n,
            entries,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DensityView {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Wire {
            sites: Vec<usize>,
            dim: usize,
            entries: Vec<Vec<(f64, f64)>>,
        }
        let wire = Wire::deserialize(d)?;
        let mut matrix = CMatrix::zeros(wire.dim);
        for (i, row) in wire.entries.iter().enumerate() {
            for (j, &(re, im)) in row.iter().enumerate() {
                matrix[(i, j)] = num_complex::Complex64::new(re, im);
            }
        }
        DensityView::new(wire.sites, matrix).map_err(serde::de::Error::custom)
    }
}

/// Standard fidelity and trace distance between two states of equal
/// dimension; both land in [0, 1].
pub fn distance(a: &DensityView, b: &DensityView) -> Result<(f64, f64)> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!(
            "density matrices have dimensions {} and {}",
            a.dim(),
            b.dim()
        )));
    }
    Ok((
        linalg::fidelity(&a.matrix, &b.matrix),
        linalg::trace_distance(&a.matrix, &b.matrix),
    ))
}
