use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Largest total dimension accepted unless a caller opts into more.
pub const DEFAULT_MAX_DIM: usize = 1 << 14;

/// Square dense complex matrix, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        ComplexMatrix {
            dim,
            data: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        ComplexMatrix { dim, data }
    }

    /// Builds a matrix from row-major entries; `data.len()` must be a square.
    pub fn from_row_major(dim: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::arg(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                data.len()
            )));
        }
        let m = ComplexMatrix { dim, data };
        m.check_finite()?;
        Ok(m)
    }

    /// Builds a matrix from separate real and imaginary row lists.
    pub fn from_parts(re: &[Vec<f64>], im: &[Vec<f64>]) -> Result<Self> {
        let dim = re.len();
        if dim == 0 {
            return Err(Error::arg("matrix must have at least one row"));
        }
        if im.len() != dim {
            return Err(Error::arg("real and imaginary parts differ in row count"));
        }
        let mut data = Vec::with_capacity(dim * dim);
        for (r, (re_row, im_row)) in re.iter().zip(im).enumerate() {
            if re_row.len() != dim || im_row.len() != dim {
                return Err(Error::arg(format!("row {r} is not of length {dim}")));
            }
            data.extend(re_row.iter().zip(im_row).map(|(&a, &b)| C64::new(a, b)));
        }
        Self::from_row_major(dim, data)
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        m
    }

    /// |v⟩⟨v|
    pub fn outer(v: &[C64]) -> Self {
        Self::from_fn(v.len(), |i, j| v[i] * v[j].conj())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn real_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.dim).map(|r| r.iter().map(|z| z.re).collect()).collect()
    }

    pub fn imag_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.dim).map(|r| r.iter().map(|z| z.im).collect()).collect()
    }

    pub fn check_finite(&self) -> Result<()> {
        if self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            Ok(())
        } else {
            Err(Error::arg("matrix contains NaN or infinite entries"))
        }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn diagonal_real(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self[(i, i)].re).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// max |A − A†| over entries.
    pub fn hermiticity_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// (A + A†)/2
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.dim, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    pub fn scaled(&self, s: C64) -> Self {
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scaled_real(&self, s: f64) -> Self {
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    /// self += s · other
    pub fn add_scaled(&mut self, s: C64, other: &Self) {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            let out_row = &mut out.data[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let b_row = &other.data[k * n..(k + 1) * n];
                for (o, b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// self · other†
    pub fn matmul_adjoint(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let n = self.dim;
        Self::from_fn(n, |i, j| {
            let a = &self.data[i * n..(i + 1) * n];
            let b = &other.data[j * n..(j + 1) * n];
            a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
        })
    }

    /// [A, B] = AB − BA
    pub fn commutator(&self, other: &Self) -> Self {
        &self.matmul(other) - &other.matmul(self)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    /// Σ_ij conj(A_ij) B_ij = Tr(A† B)
    pub fn inner(&self, other: &Self) -> C64 {
        self.data.iter().zip(&other.data).map(|(a, b)| a.conj() * b).sum()
    }

    /// Σ_{i≠j} |A_ij|
    pub fn l1_off_diagonal(&self) -> f64 {
        let mut total = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                if i != j {
                    total += self[(i, j)].norm();
                }
            }
        }
        total
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

/// Kronecker product `a ⊗ b`, refusing results larger than [`DEFAULT_MAX_DIM`].
pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    tensor_product_with_limit(a, b, DEFAULT_MAX_DIM)
}

pub fn tensor_product_with_limit(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    max_dim: usize,
) -> Result<ComplexMatrix> {
    a.check_finite()?;
    b.check_finite()?;
    let dim = a
        .dim
        .checked_mul(b.dim)
        .filter(|&d| d <= max_dim)
        .ok_or_else(|| {
            Error::capacity(format!(
                "tensor product dimension {}x{} exceeds maximum {max_dim}",
                a.dim, b.dim
            ))
        })?;
    let nb = b.dim;
    Ok(ComplexMatrix::from_fn(dim, |i, j| {
        a[(i / nb, j / nb)] * b[(i % nb, j % nb)]
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn identity_kron_identity() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(tensor_product(&i2, &i2).unwrap(), ComplexMatrix::identity(4));
    }

    #[test]
    fn kron_block_structure() {
        let a = ComplexMatrix::from_row_major(2, vec![c(1.0), c(2.0), c(3.0), c(4.0)]).unwrap();
        let b = ComplexMatrix::from_row_major(2, vec![c(0.0), c(1.0), c(1.0), c(0.0)]).unwrap();
        let k = tensor_product(&a, &b).unwrap();
        for bi in 0..2 {
            for bj in 0..2 {
                for i in 0..2 {
                    for j in 0..2 {
                        assert_eq!(k[(2 * bi + i, 2 * bj + j)], a[(bi, bj)] * b[(i, j)]);
                    }
                }
            }
        }
    }

    #[test]
    fn ghz_marginal_product_layout() {
        // (I/2) ⊗ diag(1/2, 0, 0, 1/2) puts 1/4 on indices 0, 3, 4, 7.
        let a = ComplexMatrix::from_real_diagonal(&[0.5, 0.5]);
        let bc = ComplexMatrix::from_real_diagonal(&[0.5, 0.0, 0.0, 0.5]);
        let k = tensor_product(&a, &bc).unwrap();
        let expected = ComplexMatrix::from_real_diagonal(&[0.25, 0.0, 0.0, 0.25, 0.25, 0.0, 0.0, 0.25]);
        assert!(k.max_abs_diff(&expected) <= 1e-12);
    }

    #[test]
    fn w_marginal_cube() {
        let m = ComplexMatrix::from_real_diagonal(&[2.0 / 3.0, 1.0 / 3.0]);
        let k = tensor_product(&tensor_product(&m, &m).unwrap(), &m).unwrap();
        let expected = ComplexMatrix::from_real_diagonal(
            &[8.0, 4.0, 4.0, 2.0, 4.0, 2.0, 2.0, 1.0].map(|x| x / 27.0),
        );
        assert!(k.max_abs_diff(&expected) <= 1e-12);
    }

    #[test]
    fn capacity_limit() {
        let a = ComplexMatrix::identity(128);
        let b = ComplexMatrix::identity(256);
        assert!(matches!(tensor_product(&a, &b), Err(Error::Capacity(_))));
        assert!(tensor_product_with_limit(&a, &ComplexMatrix::identity(2), 256).is_ok());
    }

    #[test]
    fn rejects_non_finite() {
        let r = ComplexMatrix::from_row_major(1, vec![C64::new(f64::NAN, 0.0)]);
        assert!(r.is_err());
    }

    #[test]
    fn matmul_adjoint_matches_explicit() {
        let a = ComplexMatrix::from_fn(3, |i, j| C64::new(i as f64 + 1.0, j as f64 - 0.5));
        let b = ComplexMatrix::from_fn(3, |i, j| C64::new((i * j) as f64, 1.0));
        assert!(a.matmul_adjoint(&b).max_abs_diff(&a.matmul(&b.adjoint())) < 1e-14);
    }
}
