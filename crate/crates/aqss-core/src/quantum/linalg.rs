//! Small dense complex matrices and a Hermitian eigensolver.
//!
//! Everything here is desk-scale (a few hundred rows at most); a cyclic
//! Jacobi sweep is accurate and plenty fast at these sizes, and keeps the
//! crate free of external linear-algebra backends.

use num_complex::Complex64;

/// Column-major is irrelevant at this scale; row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        CMatrix {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMatrix::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "matrix must be square");
        CMatrix {
            n,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, factor: f64) -> Self {
        CMatrix {
            n: self.n,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn sub(&self, other: &CMatrix) -> Self {
        assert_eq!(self.n, other.n);
        CMatrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn add(&self, other: &CMatrix) -> Self {
        assert_eq!(self.n, other.n);
        CMatrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn matmul(&self, other: &CMatrix) -> Self {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        let n = self.n;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = self[(j, i)].conj();
            }
        }
        out
    }

    /// Largest |A[i,j] − A[j,i]*| over all pairs.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

/// Eigenvalues of a Hermitian matrix, ascending. Cyclic Jacobi.
pub fn eigvalsh(matrix: &CMatrix) -> Vec<f64> {
    let (values, _) = eigh_impl(matrix, false);
    values
}

/// Eigenvalues (ascending) and matching eigenvector columns of a Hermitian
/// matrix.
pub fn eigh(matrix: &CMatrix) -> (Vec<f64>, CMatrix) {
    let (values, vectors) = eigh_impl(matrix, true);
    (values, vectors.expect("vectors requested"))
}

fn eigh_impl(matrix: &CMatrix, want_vectors: bool) -> (Vec<f64>, Option<CMatrix>) {
    let n = matrix.dim();
    let mut a = matrix.clone();
    let mut v = want_vectors.then(|| CMatrix::identity(n));
    let scale = a.frobenius_norm().max(1.0);
    let tol = 1e-15 * scale;

    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in p + 1..n {
                off += a[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() <= tol {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag <= tol * 1e-2 {
                    continue;
                }
                let phi = apq.im.atan2(apq.re);
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = 0.5 * (2.0 * mag).atan2(app - aqq);
                let c = Complex64::new(theta.cos(), 0.0);
                // J = [[c, -conj(s)], [s, c]] zeroes A[p,q].
                let s = Complex64::from_polar(theta.sin(), -phi);
                // A <- J^dagger A J, applied as column then row updates.
                for r in 0..n {
                    let arp = a[(r, p)];
                    let arq = a[(r, q)];
                    a[(r, p)] = c * arp + s * arq;
                    a[(r, q)] = -s.conj() * arp + c * arq;
                }
                for r in 0..n {
                    let apr = a[(p, r)];
                    let aqr = a[(q, r)];
                    a[(p, r)] = c * apr + s.conj() * aqr;
                    a[(q, r)] = -s * apr + c * aqr;
                }
                if let Some(v) = v.as_mut() {
                    for r in 0..n {
                        let vrp = v[(r, p)];
                        let vrq = v[(r, q)];
                        v[(r, p)] = c * vrp + s * vrq;
                        v[(r, q)] = -s.conj() * vrp + c * vrq;
                    }
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let raw: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| raw[i].total_cmp(&raw[j]));
    let values: Vec<f64> = order.iter().map(|&i| raw[i]).collect();
    let vectors = v.map(|v| {
        let mut sorted = CMatrix::zeros(n);
        for (new_col, &old_col) in order.iter().enumerate() {
            for r in 0..n {
                sorted[(r, new_col)] = v[(r, old_col)];
            }
        }
        sorted
    });
    (values, vectors)
}

/// Hermitian square root via eigendecomposition; negative eigenvalue dust is
/// clamped to zero.
pub fn sqrtm_psd(matrix: &CMatrix) -> CMatrix {
    let n = matrix.dim();
    let (values, vectors) = eigh(matrix);
    let mut out = CMatrix::zeros(n);
    for (k, &lambda) in values.iter().enumerate() {
        let root = lambda.max(0.0).sqrt();
        if root == 0.0 {
            continue;
        }
        for i in 0..n {
            let vik = vectors[(i, k)];
            if vik.norm_sqr() == 0.0 {
                continue;
            }
            for j in 0..n {
                out[(i, j)] += root * vik * vectors[(j, k)].conj();
            }
        }
    }
    out
}

/// Trace distance (1/2)‖a − b‖₁ of two Hermitian matrices.
pub fn trace_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    let diff = a.sub(b);
    0.5 * eigvalsh(&diff).iter().map(|l| l.abs()).sum::<f64>()
}

/// Uhlmann fidelity (Tr √(√a b √a))² of two density matrices.
pub fn fidelity(a: &CMatrix, b: &CMatrix) -> f64 {
    let root = sqrtm_psd(a);
    let inner = root.matmul(b).matmul(&root);
    let trace: f64 = eigvalsh(&inner).iter().map(|l| l.max(0.0).sqrt()).sum();
    (trace * trace).clamp(0.0, 1.0 + 1e-9).min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn eigh_diagonalizes_a_pauli_like_matrix() {
        // [[1, i], [-i, 1]] has eigenvalues 0 and 2.
        let m = CMatrix::from_rows(vec![
            vec![c(1.0, 0.0), c(0.0, 1.0)],
            vec![c(0.0, -1.0), c(1.0, 0.0)],
        ]);
        let values = eigvalsh(&m);
        assert!((values[0] - 0.0).abs() < 1e-12);
        assert!((values[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn eigh_vectors_reconstruct_the_matrix() {
        let m = CMatrix::from_rows(vec![
            vec![c(2.0, 0.0), c(0.5, 0.25), c(0.0, -1.0)],
            vec![c(0.5, -0.25), c(-1.0, 0.0), c(0.3, 0.0)],
            vec![c(0.0, 1.0), c(0.3, 0.0), c(0.5, 0.0)],
        ]);
        let (values, vectors) = eigh(&m);
        let mut rebuilt = CMatrix::zeros(3);
        for k in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    rebuilt[(i, j)] += values[k] * vectors[(i, k)] * vectors[(j, k)].conj();
                }
            }
        }
        assert!(rebuilt.sub(&m).frobenius_norm() < 1e-12);
    }

    #[test]
    fn sqrtm_squares_back() {
        let m = CMatrix::from_rows(vec![
            vec![c(2.0, 0.0), c(0.5, 0.5)],
            vec![c(0.5, -0.5), c(1.0, 0.0)],
        ]);
        let root = sqrtm_psd(&m);
        assert!(root.matmul(&root).sub(&m).frobenius_norm() < 1e-12);
    }

    #[test]
    fn distance_of_orthogonal_pure_states() {
        let ket0 = CMatrix::from_rows(vec![
            vec![c(1.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0)],
        ]);
        let ket1 = CMatrix::from_rows(vec![
            vec![c(0.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(1.0, 0.0)],
        ]);
        assert!((trace_distance(&ket0, &ket1) - 1.0).abs() < 1e-12);
        assert!(fidelity(&ket0, &ket1).abs() < 1e-12);
        assert!((fidelity(&ket0, &ket0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pure_versus_maximally_mixed() {
        let ket0 = CMatrix::from_rows(vec![
            vec![c(1.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0)],
        ]);
        let mixed = CMatrix::identity(2).scale(0.5);
        assert!((fidelity(&ket0, &mixed) - 0.5).abs() < 1e-12);
        assert!((trace_distance(&ket0, &mixed) - 0.5).abs() < 1e-12);
    }
}
