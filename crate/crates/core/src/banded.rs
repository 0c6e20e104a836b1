//! Real symmetric band matrices stored by their lower diagonals.

use nalgebra::DMatrix;

/// A real symmetric matrix that is nonzero only on a few diagonals.
///
/// Each stored band is a pair `(offset, values)` with `values[i] = A[i + offset][i]`;
/// the upper triangle is implied by symmetry, so the matrix equals its transpose
/// by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedSymmetricMatrix {
    dim: usize,
    bands: Vec<(usize, Vec<f64>)>,
}

impl BandedSymmetricMatrix {
    /// Builds a matrix from `(offset, values)` pairs. Offsets must be distinct and
    /// each value vector must have length `dim - offset`.
    pub fn from_bands(dim: usize, mut bands: Vec<(usize, Vec<f64>)>) -> Self {
        bands.sort_by_key(|(offset, _)| *offset);
        for window in bands.windows(2) {
            assert!(window[0].0 != window[1].0, "duplicate band offset {}", window[0].0);
        }
        for (offset, values) in &bands {
            assert!(*offset < dim.max(1), "band offset {offset} out of range for dim {dim}");
            assert_eq!(values.len(), dim - offset, "band {offset} has wrong length");
        }
        Self { dim, bands }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bands(&self) -> &[(usize, Vec<f64>)] {
        &self.bands
    }

    /// Largest stored offset.
    pub fn half_bandwidth(&self) -> usize {
        self.bands.iter().map(|(o, _)| *o).max().unwrap_or(0)
    }

    /// Entry `(row, col)`; zero outside the stored bands.
    pub fn get(&self, row: usize, col: usize) -> f64 {
        let (hi, lo) = if row >= col { (row, col) } else { (col, row) };
        let offset = hi - lo;
        self.bands
            .iter()
            .find(|(o, _)| *o == offset)
            .map_or(0.0, |(_, values)| values[lo])
    }

    pub fn diagonal(&self) -> Vec<f64> {
        self.bands
            .iter()
            .find(|(o, _)| *o == 0)
            .map_or_else(|| vec![0.0; self.dim], |(_, v)| v.clone())
    }

    /// `y = A x`.
    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.dim);
        assert_eq!(y.len(), self.dim);
        y.iter_mut().for_each(|v| *v = 0.0);
        for (offset, values) in &self.bands {
            if *offset == 0 {
                for ((yi, xi), a) in y.iter_mut().zip(x).zip(values) {
                    *yi += a * xi;
                }
            } else {
                let o = *offset;
                for (i, a) in values.iter().enumerate() {
                    y[i + o] += a * x[i];
                    y[i] += a * x[i + o];
                }
            }
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim];
        self.matvec_into(x, &mut y);
        y
    }

    /// `x^T A x` for a vector of matching length.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        let y = self.matvec(x);
        x.iter().zip(&y).map(|(a, b)| a * b).sum()
    }

    /// Lower bound on the spectrum from Gershgorin discs.
    pub fn gershgorin_lower(&self) -> f64 {
        let mut radius = vec![0.0; self.dim];
        for (offset, values) in &self.bands {
            if *offset == 0 {
                continue;
            }
            for (i, a) in values.iter().enumerate() {
                radius[i] += a.abs();
                radius[i + offset] += a.abs();
            }
        }
        self.diagonal()
            .iter()
            .zip(&radius)
            .map(|(d, r)| d - r)
            .fold(f64::INFINITY, f64::min)
    }

    /// Upper bound on the spectrum from Gershgorin discs.
    pub fn gershgorin_upper(&self) -> f64 {
        let mut radius = vec![0.0; self.dim];
        for (offset, values) in &self.bands {
            if *offset == 0 {
                continue;
            }
            for (i, a) in values.iter().enumerate() {
                radius[i] += a.abs();
                radius[i + offset] += a.abs();
            }
        }
        self.diagonal()
            .iter()
            .zip(&radius)
            .map(|(d, r)| d + r)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (offset, values) in &self.bands {
            for (i, a) in values.iter().enumerate() {
                m[(i + offset, i)] = *a;
                m[(i, i + offset)] = *a;
            }
        }
        m
    }

    /// Cholesky factor of `A - shift * I`, or `None` when the shifted matrix is
    /// not numerically positive definite.
    pub fn shifted_cholesky(&self, shift: f64) -> Option<BandCholesky> {
        BandCholesky::factor(self, shift)
    }
}

/// Lower-triangular band Cholesky factor `L` with `A - shift I = L L^T`.
#[derive(Debug, Clone)]
pub struct BandCholesky {
    dim: usize,
    width: usize,
    // row-major: l[i * (width + 1) + d] = L[i][i - d]
    l: Vec<f64>,
}

impl BandCholesky {
    fn factor(a: &BandedSymmetricMatrix, shift: f64) -> Option<Self> {
        let n = a.dim;
        let p = a.half_bandwidth();
        let stride = p + 1;
        let mut l = vec![0.0; n * stride];
        for (offset, values) in &a.bands {
            for (j, v) in values.iter().enumerate() {
                l[(j + offset) * stride + offset] = *v;
            }
        }
        for i in 0..n {
            l[i * stride] -= shift;
        }
        for j in 0..n {
            let kmin = j.saturating_sub(p);
            let mut s = l[j * stride];
            for k in kmin..j {
                let ljk = l[j * stride + (j - k)];
                s -= ljk * ljk;
            }
            if !(s > 0.0) || !s.is_finite() {
                return None;
            }
            let djj = s.sqrt();
            l[j * stride] = djj;
            let imax = (j + p).min(n - 1);
            for i in (j + 1)..=imax {
                let kmin = i.saturating_sub(p);
                let mut s = l[i * stride + (i - j)];
                for k in kmin..j {
                    s -= l[i * stride + (i - k)] * l[j * stride + (j - k)];
                }
                l[i * stride + (i - j)] = s / djj;
            }
        }
        Some(Self { dim: n, width: p, l })
    }

    /// Solves `(A - shift I) x = b` in place.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.dim;
        let p = self.width;
        let stride = p + 1;
        for i in 0..n {
            let mut s = b[i];
            for k in i.saturating_sub(p)..i {
                s -= self.l[i * stride + (i - k)] * b[k];
            }
            b[i] = s / self.l[i * stride];
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            let kmax = (i + p).min(n - 1);
            for k in (i + 1)..=kmax {
                s -= self.l[k * stride + (k - i)] * b[k];
            }
            b[i] = s / self.l[i * stride];
        }
    }
}
