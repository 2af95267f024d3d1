//! Symmetric positive definite matrices and their orthogonal diagonalization
//! `Σ = Qᵀ diag(a₁², …, aₙ²) Q`.

use super::StatsError;

/// Matrices whose smallest eigenvalue is at or below this fraction of the
/// largest are rejected as not (numerically) positive definite.
pub const PD_RATIO_FLOOR: f64 = 1e-12;

const SYMMETRY_TOL: f64 = 1e-12;
const JACOBI_TOL: f64 = 1e-14;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Principal axes of a symmetric positive definite matrix.
///
/// Rows of `rotation` are the unit eigenvectors; `semi_axes[k]²` is the
/// eigenvalue belonging to row `k`. Axes are sorted by decreasing length.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    dim: usize,
    rotation: Vec<f64>,
    semi_axes: Vec<f64>,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Row-major `dim × dim` orthogonal matrix `Q`.
    pub fn rotation(&self) -> &[f64] {
        &self.rotation
    }

    /// Unit eigenvector for the `k`-th longest axis.
    pub fn axis(&self, k: usize) -> &[f64] {
        &self.rotation[k * self.dim..(k + 1) * self.dim]
    }

    pub fn semi_axes(&self) -> &[f64] {
        &self.semi_axes
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.semi_axes.iter().map(|a| a * a).collect()
    }

    /// `Q y`: coordinates of `x` along the principal axes.
    pub fn to_principal(&self, x: &[f64]) -> Vec<f64> {
        (0..self.dim)
            .map(|k| self.axis(k).iter().zip(x).map(|(q, v)| q * v).sum())
            .collect()
    }

    /// `Qᵀ y`: inverse of [`to_principal`](Self::to_principal).
    pub fn from_principal(&self, y: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; self.dim];
        for (k, yk) in y.iter().enumerate() {
            for (xi, q) in x.iter_mut().zip(self.axis(k)) {
                *xi += q * yk;
            }
        }
        x
    }

    /// Row-major `Qᵀ D Q`.
    pub fn reconstruct(&self) -> Vec<f64> {
        let n = self.dim;
        let mut out = vec![0.0; n * n];
        for k in 0..n {
            let lambda = self.semi_axes[k] * self.semi_axes[k];
            let v = self.axis(k);
            for i in 0..n {
                for j in 0..n {
                    out[i * n + j] += lambda * v[i] * v[j];
                }
            }
        }
        out
    }
}

/// Symmetric positive definite matrix, validated on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SymPosDefMatrix {
    dim: usize,
    entries: Vec<f64>,
    eigen: EigenDecomposition,
}

impl SymPosDefMatrix {
    /// Builds from row-major entries. Asymmetry beyond rounding noise, non-finite
    /// entries and eigenvalue ratios at or below [`PD_RATIO_FLOOR`] are rejected.
    pub fn new(dim: usize, entries: Vec<f64>) -> Result<Self, StatsError> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(StatsError::Shape {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        let mut entries = entries;
        for i in 0..dim {
            for j in 0..dim {
                if !entries[i * dim + j].is_finite() {
                    return Err(StatsError::NotSymmetric { row: i, col: j });
                }
            }
            for j in (i + 1)..dim {
                let (a, b) = (entries[i * dim + j], entries[j * dim + i]);
                let scale = a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
                if (a - b).abs() > SYMMETRY_TOL * scale {
                    return Err(StatsError::NotSymmetric { row: i, col: j });
                }
                let mean = 0.5 * (a + b);
                entries[i * dim + j] = mean;
                entries[j * dim + i] = mean;
            }
        }
        let (values, rotation) = symmetric_eigen(dim, &entries)?;
        let max = values[0];
        let min = values[dim - 1];
        if !(max > 0.0) || min <= PD_RATIO_FLOOR * max {
            return Err(StatsError::NotPositiveDefinite {
                min_eigenvalue: min,
                max_eigenvalue: max,
            });
        }
        let eigen = EigenDecomposition {
            dim,
            rotation,
            semi_axes: values.iter().map(|v| v.sqrt()).collect(),
        };
        Ok(Self {
            dim,
            entries,
            eigen,
        })
    }

    pub fn from_2x2(a: f64, b: f64, c: f64) -> Result<Self, StatsError> {
        Self::new(2, vec![a, b, b, c])
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![0.0; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = 1.0;
        }
        Self::new(dim, entries).expect("identity is positive definite")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn eigen(&self) -> &EigenDecomposition {
        &self.eigen
    }

    pub fn determinant(&self) -> f64 {
        self.eigen.semi_axes.iter().map(|a| a * a).product()
    }

    /// `xᵀ Σ x`.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        let n = self.dim;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += x[i] * self.entries[i * n + j] * x[j];
            }
        }
        acc
    }

    /// `xᵀ Σ⁻¹ x`, evaluated in the principal frame as `Σ yₖ² / aₖ²`.
    pub fn inverse_quadratic_form(&self, x: &[f64]) -> f64 {
        self.eigen
            .to_principal(x)
            .iter()
            .zip(&self.eigen.semi_axes)
            .map(|(y, a)| (y / a) * (y / a))
            .sum()
    }
}

/// Orthogonal diagonalization of a validated matrix.
pub fn sym_eigen(matrix: &SymPosDefMatrix) -> EigenDecomposition {
    matrix.eigen.clone()
}

/// Eigenvalues (descending) and row-eigenvectors of a symmetric matrix.
fn symmetric_eigen(dim: usize, a: &[f64]) -> Result<(Vec<f64>, Vec<f64>), StatsError> {
    if dim == 1 {
        return Ok((vec![a[0]], vec![1.0]));
    }
    if dim == 2 {
        return Ok(eigen_2x2(a[0], a[1], a[3]));
    }
    jacobi_eigen(dim, a)
}

fn eigen_2x2(a: f64, b: f64, c: f64) -> (Vec<f64>, Vec<f64>) {
    // The rotation angle puts the first row on the major axis; equal diagonal
    // and zero coupling gives θ = 0, keeping the coordinate order.
    let theta = 0.5 * (2.0 * b).atan2(a - c);
    let (s, co) = theta.sin_cos();
    let major = a * co * co + 2.0 * b * s * co + c * s * s;
    let minor = a * s * s - 2.0 * b * s * co + c * co * co;
    (vec![major, minor], vec![co, s, -s, co])
}

fn jacobi_eigen(n: usize, input: &[f64]) -> Result<(Vec<f64>, Vec<f64>), StatsError> {
    let mut a = input.to_vec();
    // Columns of v accumulate the eigenvectors.
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let frobenius: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let threshold = JACOBI_TOL * frobenius;

    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j] * a[i * n + j])
            .sum::<f64>()
            .sqrt();
        if off <= threshold {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    if !converged {
        return Err(StatsError::NoConvergence("Jacobi eigenvalue sweeps"));
    }

    let mut order: Vec<usize> = (0..n).collect();
    // Stable sort: equal eigenvalues keep their original axis order.
    order.sort_by(|&i, &j| a[j * n + j].total_cmp(&a[i * n + i]));
    let values = order.iter().map(|&k| a[k * n + k]).collect();
    let mut rows = Vec::with_capacity(n * n);
    for &k in &order {
        let mut col: Vec<f64> = (0..n).map(|i| v[i * n + k]).collect();
        let lead = col
            .iter()
            .copied()
            .fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
        if lead < 0.0 {
            col.iter_mut().for_each(|x| *x = -*x);
        }
        rows.extend(col);
    }
    Ok((values, rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_orthogonal(e: &EigenDecomposition) {
        let n = e.dim();
        for i in 0..n {
            for j in 0..n {
                let dot: f64 = e.axis(i).iter().zip(e.axis(j)).map(|(a, b)| a * b).sum();
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((dot - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn identity_is_trivial() {
        for dim in 1..5 {
            let e = sym_eigen(&SymPosDefMatrix::identity(dim));
            assert!(e.semi_axes().iter().all(|&a| a == 1.0));
            for k in 0..dim {
                for (i, &q) in e.axis(k).iter().enumerate() {
                    assert_eq!(q, if i == k { 1.0 } else { 0.0 });
                }
            }
        }
    }

    #[test]
    fn diagonal_axes_align_with_coordinates() {
        let e = sym_eigen(&SymPosDefMatrix::from_2x2(4.0, 0.0, 1.0).unwrap());
        assert_eq!(e.semi_axes(), &[2.0, 1.0]);
        assert_eq!(e.axis(0), &[1.0, 0.0]);
        let e = sym_eigen(&SymPosDefMatrix::from_2x2(1.0, 0.0, 4.0).unwrap());
        assert!((e.semi_axes()[0] - 2.0).abs() < 1e-15);
        assert!(e.axis(0)[0].abs() < 1e-15 && (e.axis(0)[1].abs() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn jacobi_handles_three_by_three() {
        let m = SymPosDefMatrix::new(3, vec![4.0, 1.0, 0.5, 1.0, 3.0, 0.2, 0.5, 0.2, 2.0]).unwrap();
        let e = m.eigen();
        assert_orthogonal(e);
        for (r, x) in e.reconstruct().iter().zip(m.entries()) {
            assert!((r - x).abs() < 1e-12);
        }
        assert!(e.semi_axes().windows(2).all(|w| w[0] >= w[1]));
        let trace: f64 = e.eigenvalues().iter().sum();
        assert!((trace - 9.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_singular_and_asymmetric() {
        assert!(matches!(
            SymPosDefMatrix::from_2x2(1.0, 1.0, 1.0),
            Err(StatsError::NotPositiveDefinite { .. })
        ));
        assert!(matches!(
            SymPosDefMatrix::from_2x2(0.0, 0.0, 0.0),
            Err(StatsError::NotPositiveDefinite { .. })
        ));
        assert!(matches!(
            SymPosDefMatrix::new(2, vec![1.0, 0.1, 0.2, 1.0]),
            Err(StatsError::NotSymmetric { .. })
        ));
        assert!(matches!(
            SymPosDefMatrix::new(2, vec![1.0, 0.0, 0.0]),
            Err(StatsError::Shape { .. })
        ));
    }

    #[test]
    fn quadratic_forms_are_inverse_pair() {
        let m = SymPosDefMatrix::from_2x2(2.0, 1.0, 2.0).unwrap();
        let x = [0.3, -1.2];
        let direct = {
            // Σ⁻¹ = [[2, -1], [-1, 2]] / 3
            (2.0 * x[0] * x[0] - 2.0 * x[0] * x[1] + 2.0 * x[1] * x[1]) / 3.0
        };
        assert!((m.inverse_quadratic_form(&x) - direct).abs() < 1e-14);
        assert!((m.determinant() - 3.0).abs() < 1e-14);
    }
}
