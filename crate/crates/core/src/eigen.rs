//! Symmetric tridiagonal eigensolver (implicit-shift QL with eigenvector
//! accumulation).

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 60;

/// Threshold below which an eigenvector component is treated as zero when
/// fixing the overall sign.
const SIGN_THRESHOLD: f64 = 1e-6;

/// Ascending eigenvalues with orthonormal eigenvectors stored column-wise;
/// column `k` belongs to `eigenvalues[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSystem {
    pub eigenvalues: DVector<f64>,
    pub eigenvectors: DMatrix<f64>,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `e_max - e_min`.
    pub fn bandwidth(&self) -> f64 {
        let n = self.dim();
        self.eigenvalues[n - 1] - self.eigenvalues[0]
    }

    pub fn eigenvector(&self, k: usize) -> nalgebra::DVectorView<'_, f64> {
        self.eigenvectors.column(k)
    }

    /// Flips each column so that its leftmost non-negligible component is
    /// positive, then orders columns by ascending eigenvalue. Exact ties are
    /// broken by the signed leftmost amplitude (never reached under
    /// continuous disorder).
    pub(crate) fn canonicalize(mut self) -> Self {
        let n = self.dim();
        for k in 0..n {
            let col = self.eigenvectors.column(k);
            let scale = col.amax();
            let lead = col
                .iter()
                .copied()
                .find(|v| v.abs() > SIGN_THRESHOLD * scale)
                .unwrap_or(0.0);
            if lead < 0.0 {
                self.eigenvectors.column_mut(k).neg_mut();
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| {
            self.eigenvalues[i]
                .total_cmp(&self.eigenvalues[j])
                .then(self.eigenvectors[(0, j)].total_cmp(&self.eigenvectors[(0, i)]))
        });
        let eigenvalues = DVector::from_iterator(n, order.iter().map(|&i| self.eigenvalues[i]));
        let eigenvectors = DMatrix::from_fn(n, n, |r, c| self.eigenvectors[(r, order[c])]);
        EigenSystem {
            eigenvalues,
            eigenvectors,
        }
    }
}

/// Diagonalizes the symmetric tridiagonal matrix with the given diagonal and
/// off-diagonal (`off[i]` couples `i` and `i + 1`).
pub fn tridiagonal_eigen(diagonal: &[f64], off: &[f64]) -> Result<EigenSystem> {
    let n = diagonal.len();
    if n == 0 {
        return Err(Error::InvalidDimension { dim: 0, min: 1 });
    }
    if off.len() + 1 != n {
        return Err(Error::DimensionMismatch {
            expected: n - 1,
            found: off.len(),
        });
    }

    let mut d = diagonal.to_vec();
    let mut e = off.to_vec();
    e.push(0.0);
    let mut z = DMatrix::<f64>::identity(n, n);

    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            if sweeps == MAX_SWEEPS {
                return Err(Error::Convergence {
                    index: l,
                    iterations: sweeps,
                    residual: e[l].abs(),
                });
            }
            sweeps += 1;

            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for k in 0..n {
                    let f = z[(k, i + 1)];
                    z[(k, i + 1)] = s * z[(k, i)] + c * f;
                    z[(k, i)] = c * z[(k, i)] - s * f;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    Ok(EigenSystem {
        eigenvalues: DVector::from_vec(d),
        eigenvectors: z,
    }
    .canonicalize())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn dense(diagonal: &[f64], off: &[f64]) -> DMatrix<f64> {
        let n = diagonal.len();
        DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                diagonal[i]
            } else if j == i + 1 {
                off[i]
            } else if i == j + 1 {
                off[j]
            } else {
                0.0
            }
        })
    }

    #[test]
    fn single_site() {
        let eig = tridiagonal_eigen(&[3.5], &[]).unwrap();
        assert_eq!(eig.eigenvalues[0], 3.5);
        assert_eq!(eig.eigenvectors[(0, 0)], 1.0);
    }

    #[test]
    fn matches_dense_symmetric_eigen() {
        let diagonal = [0.3, -1.2, 2.0, 0.7, -0.4, 1.1];
        let off = [-0.5, 0.25, -0.5, 1.5, -0.5];
        let eig = tridiagonal_eigen(&diagonal, &off).unwrap();
        let reference = nalgebra::SymmetricEigen::new(dense(&diagonal, &off));
        let mut expected: Vec<f64> = reference.eigenvalues.iter().copied().collect();
        expected.sort_by(f64::total_cmp);
        for (a, b) in eig.eigenvalues.iter().zip(&expected) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
        let h = dense(&diagonal, &off);
        let residual =
            &h * &eig.eigenvectors - &eig.eigenvectors * DMatrix::from_diagonal(&eig.eigenvalues);
        assert!(residual.amax() < 1e-12);
    }

    #[test]
    fn wrong_off_diagonal_length() {
        assert!(matches!(
            tridiagonal_eigen(&[1.0, 2.0], &[]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn decoupled_blocks_are_handled() {
        let eig = tridiagonal_eigen(&[1.0, 2.0, 5.0], &[0.0, 0.0]).unwrap();
        assert_eq!(eig.eigenvalues.as_slice(), &[1.0, 2.0, 5.0]);
    }
}
