use super::matrix::{ComplexMatrix, C64};
use crate::error::{Error, Result};

/// Default support cutoff, relative to the largest eigenvalue magnitude.
pub const DEFAULT_SUPPORT_TOLERANCE: f64 = 1e-12;

const HERMITIAN_TOLERANCE: f64 = 1e-10;
const MAX_SWEEPS: usize = 100;

/// Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian matrix.
///
/// Eigenvector `k` is column `k` of `eigenvectors`.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
    pub support_rank: usize,
    support_cutoff: f64,
}

impl SpectralDecomposition {
    /// Absolute eigenvalue threshold separating support from kernel.
    pub fn support_cutoff(&self) -> f64 {
        self.support_cutoff
    }

    pub fn eigenvector(&self, k: usize) -> Vec<C64> {
        let n = self.eigenvectors.dim();
        (0..n).map(|i| self.eigenvectors[(i, k)]).collect()
    }

    pub fn in_support(&self, k: usize) -> bool {
        self.eigenvalues[k] > self.support_cutoff
    }

    /// V diag(f(λ)) V†
    pub fn map_eigenvalues(&self, f: impl Fn(f64) -> C64) -> ComplexMatrix {
        let n = self.eigenvectors.dim();
        let weights: Vec<C64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let v = &self.eigenvectors;
        let mut out = ComplexMatrix::zeros(n);
        for (k, w) in weights.iter().enumerate() {
            if w.re == 0.0 && w.im == 0.0 {
                continue;
            }
            for i in 0..n {
                let vik = v[(i, k)] * w;
                if vik.re == 0.0 && vik.im == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += vik * v[(j, k)].conj();
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map_eigenvalues(|l| C64::new(l, 0.0))
    }

    /// Projector onto the span of eigenvectors with eigenvalue above the cutoff.
    pub fn support_projector(&self) -> ComplexMatrix {
        let cut = self.support_cutoff;
        self.map_eigenvalues(|l| C64::new(if l > cut { 1.0 } else { 0.0 }, 0.0))
    }

    /// ⟨v_k|M|v_k⟩ for each eigenvector, real part.
    pub fn expectations(&self, m: &ComplexMatrix) -> Vec<f64> {
        let n = self.eigenvectors.dim();
        let v = &self.eigenvectors;
        (0..n)
            .map(|k| {
                let mut acc = C64::new(0.0, 0.0);
                for i in 0..n {
                    let vi = v[(i, k)].conj();
                    if vi.re == 0.0 && vi.im == 0.0 {
                        continue;
                    }
                    let mut row = C64::new(0.0, 0.0);
                    for j in 0..n {
                        row += m[(i, j)] * v[(j, k)];
                    }
                    acc += vi * row;
                }
                acc.re
            })
            .collect()
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// Fails if `a` deviates from Hermitian by more than 1e-10 (scaled by max|a|
/// when that exceeds one). The input is symmetrized before rotating.
pub fn hermitian_eig(a: &ComplexMatrix) -> Result<SpectralDecomposition> {
    hermitian_eig_with_tolerance(a, DEFAULT_SUPPORT_TOLERANCE)
}

pub fn hermitian_eig_with_tolerance(
    a: &ComplexMatrix,
    support_tolerance: f64,
) -> Result<SpectralDecomposition> {
    a.check_finite()?;
    let scale = a.max_abs().max(1.0);
    let herm = a.hermiticity_error();
    if herm > HERMITIAN_TOLERANCE * scale {
        return Err(Error::arg(format!(
            "matrix is not Hermitian (max |A - A†| = {herm:e})"
        )));
    }
    Ok(jacobi(a.hermitian_part(), support_tolerance))
}

fn jacobi(mut a: ComplexMatrix, support_tolerance: f64) -> SpectralDecomposition {
    let n = a.dim();
    let mut v = ComplexMatrix::identity(n);

    let total: f64 = a.as_slice().iter().map(|z| z.norm_sqr()).sum();
    let threshold = (f64::EPSILON * f64::EPSILON) * total;

    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += a[(p, q)].norm_sqr();
            }
        }
        if off <= threshold || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag = a.diagonal_real();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, |i, k| v[(i, order[k])]);

    let largest = eigenvalues.iter().map(|l| l.abs()).fold(0.0, f64::max);
    let support_cutoff = support_tolerance * largest;
    let support_rank = eigenvalues.iter().filter(|&&l| l > support_cutoff).count();
    SpectralDecomposition {
        eigenvalues,
        eigenvectors,
        support_rank,
        support_cutoff,
    }
}

/// Zeroes a[p][q] with the unitary J = diag(1, e^{-iφ}) · R(θ) acting on (p, q).
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let n = a.dim();
    let phase = apq / r;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;

    let tau = (aqq - app) / (2.0 * r);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // J restricted to (p, q): [[c, s], [-s e^{-iφ}, c e^{-iφ}]]
    let jpp = C64::new(c, 0.0);
    let jpq = C64::new(s, 0.0);
    let jqp = -phase.conj() * s;
    let jqq = phase.conj() * c;

    // A ← A J
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * jpp + akq * jqp;
        a[(k, q)] = akp * jpq + akq * jqq;
    }
    // A ← J† A
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
        a[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);

    // V ← V J
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * jpp + vkq * jqp;
        v[(k, q)] = vkp * jpq + vkq * jqq;
    }
}
