//! Covariance matrices of stationary Gaussian vectors and their analysis
//! toolkit: Toeplitz and circulant builders, the analytic circulant
//! eigensystem, partial-circulant and split constructions, symmetric square
//! roots, the localization kernel and matrix norms.

use crate::error::{LabError, Result};
use crate::spectra::{SpectralModel, TWO_PI};
use nalgebra::{DMatrix, DVector};


/// Dense symmetric positive-semidefinite covariance matrix.
#[derive(Debug, Clone)]
pub struct CovMatrix {
    pub mat: DMatrix<f64>,
}

/// Analytic eigensystem of a circulant covariance: eigenvalues on the
/// Fourier grid ω_j = 2πj/n, indexed j = -(n-1)/2 .. (n-1)/2.
#[derive(Debug, Clone)]
pub struct CirculantSpectrum {
    pub n: usize,
    /// λ_j stored in index order j = -(n-1)/2 .. (n-1)/2.
    pub eigenvalues: Vec<f64>,
    /// ω_j in the same order.
    pub frequencies: Vec<f64>,
}

impl CirculantSpectrum {
    /// Half-width (n-1)/2.
    pub fn half(&self) -> i64 {
        (self.n as i64 - 1) / 2
    }

    /// λ_j for j in -(n-1)/2 ..= (n-1)/2.
    pub fn lambda(&self, j: i64) -> f64 {
        self.eigenvalues[(j + self.half()) as usize]
    }
}

/// Scalar summary of a matrix: (‖·‖_F, operator norm, λ_min, λ_max).
///
/// λ_min/λ_max are eigenvalues of the symmetric part; the operator norm is
/// the largest singular value (from the eigensystem of AᵀA).
#[derive(Debug, Clone, Copy)]
pub struct MatrixNorms {
    pub frobenius: f64,
    pub operator: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
}

fn require_odd(n: usize, what: &str) -> Result<()> {
    if n % 2 == 0 {
        return Err(LabError::Parity(format!("{what} requires odd size, got {n}")));
    }
    Ok(())
}

/// Toeplitz covariance Γ_n with entries γ(k-j).
pub fn toeplitz(model: &SpectralModel, n: usize) -> CovMatrix {
    let mat = DMatrix::from_fn(n, n, |j, k| model.gamma(k as i64 - j as i64));
    CovMatrix { mat }
}

/// Wrapped lag γ̃_{(n)}(h) of the circulant approximation.
fn wrapped_gamma(model: &SpectralModel, n: usize, h: i64) -> f64 {
    let h = h.rem_euclid(n as i64);
    let half = (n as i64 - 1) / 2;
    if h <= half {
        model.gamma(h)
    } else {
        model.gamma(n as i64 - h)
    }
}

/// Circulant covariance Γ̃_n with wrapped lags; n must be odd.
pub fn circulant(model: &SpectralModel, n: usize) -> Result<CovMatrix> {
    require_odd(n, "circulant")?;
    let mat = DMatrix::from_fn(n, n, |j, k| wrapped_gamma(model, n, k as i64 - j as i64));
    Ok(CovMatrix { mat })
}

/// Analytic eigensystem of Γ̃_n: eigenvalues λ_j = γ(0) + 2Σ γ(k)cos(kω_j)
/// and the orthogonal cosine/sine eigenvector matrix U_n with columns in the
/// index order j = -(n-1)/2 .. (n-1)/2.
pub fn circulant_eigensystem(
    model: &SpectralModel,
    n: usize,
) -> Result<(CirculantSpectrum, DMatrix<f64>)> {
    require_odd(n, "circulant eigensystem")?;
    let half = (n as i64 - 1) / 2;
    let mut eigenvalues = Vec::with_capacity(n);
    let mut frequencies = Vec::with_capacity(n);
    for j in -half..=half {
        let omega = TWO_PI * j as f64 / n as f64;
        let mut lam = model.gamma(0);
        for k in 1..=half {
            lam += 2.0 * model.gamma(k) * (k as f64 * omega).cos();
        }
        eigenvalues.push(lam);
        frequencies.push(omega);
    }
    let mut u = DMatrix::zeros(n, n);
    for (col, j) in (-half..=half).enumerate() {
        let omega = TWO_PI * j.unsigned_abs() as f64 / n as f64;
        for t in 0..n {
            let phase = t as f64 * omega;
            u[(t, col)] = if j == 0 {
                (n as f64).powf(-0.5)
            } else if j > 0 {
                (2.0 / n as f64).sqrt() * phase.cos()
            } else {
                (2.0 / n as f64).sqrt() * phase.sin()
            };
        }
    }
    Ok((CirculantSpectrum { n, eigenvalues, frequencies }, u))
}

/// Upper-left n×n block Γ̃_{n,m} of the circulant of size m > n (m odd).
pub fn circulant_partial(model: &SpectralModel, n: usize, m: usize) -> Result<CovMatrix> {
    if m <= n {
        return Err(LabError::Argument(format!("partial circulant needs m > n, got n={n}, m={m}")));
    }
    if m % 2 == 0 {
        return Err(LabError::Argument(format!("partial circulant needs odd m, got {m}")));
    }
    let mat = DMatrix::from_fn(n, n, |j, k| wrapped_gamma(model, m, k as i64 - j as i64));
    Ok(CovMatrix { mat })
}

/// Sample-splitting covariances: delete r central observations from a series
/// of length n, leaving halves of length m = (n-r)/2.  Returns the joint
/// 2m×2m covariance, the block-diagonal independent version, and the corner
/// coupling block A (which holds only lags ≥ r+1).
pub fn split_covariances(
    model: &SpectralModel,
    n: usize,
    r: usize,
) -> Result<(CovMatrix, CovMatrix, DMatrix<f64>)> {
    if n % 2 == 0 || r % 2 == 0 {
        return Err(LabError::Argument(format!("splitting needs odd n and odd r, got n={n}, r={r}")));
    }
    if r >= n {
        return Err(LabError::Argument(format!("splitting needs r < n, got n={n}, r={r}")));
    }
    let m = (n - r) / 2;
    if m < 1 {
        return Err(LabError::Argument("splitting left no observations per half".into()));
    }
    // indices 1..m and n-m+1..n; the gap between the halves is r
    let joined = DMatrix::from_fn(2 * m, 2 * m, |a, b| {
        let idx = |i: usize| if i < m { i as i64 } else { (i - m + m + r) as i64 };
        model.gamma(idx(b) - idx(a))
    });
    let gamma_m = toeplitz(model, m).mat;
    let mut independent = DMatrix::zeros(2 * m, 2 * m);
    independent.view_mut((0, 0), (m, m)).copy_from(&gamma_m);
    independent.view_mut((m, m), (m, m)).copy_from(&gamma_m);
    let corner = joined.view((0, m), (m, m)).into_owned();
    Ok((CovMatrix { mat: joined }, CovMatrix { mat: independent }, corner))
}

fn check_symmetric(a: &DMatrix<f64>, what: &str) -> Result<()> {
    if !a.is_square() {
        return Err(LabError::Contract(format!("{what} requires a square matrix")));
    }
    let scale = a.iter().fold(0.0f64, |acc, x| acc.max(x.abs())).max(1e-300);
    for j in 0..a.nrows() {
        for k in (j + 1)..a.ncols() {
            if (a[(j, k)] - a[(k, j)]).abs() > 1e-12 * scale {
                return Err(LabError::Contract(format!(
                    "{what} requires a symmetric matrix; entry ({j},{k}) differs"
                )));
            }
        }
    }
    Ok(())
}

/// Denman-Beavers iteration: Y → A^{1/2}, Z → A^{-1/2}.  Chosen over an
/// eigendecomposition because the eigen solver is unreliable on matrices
/// with repeated eigenvalues, and circulant covariances always have
/// doubly degenerate spectra.
fn sqrt_pair(a: &DMatrix<f64>, what: &str) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    check_symmetric(a, what)?;
    if a.clone().cholesky().is_none() {
        return Err(LabError::Conditioning(format!(
            "{what}: matrix is not positive definite at working precision"
        )));
    }
    let n = a.nrows();
    let mut y = a.clone();
    let mut z = DMatrix::identity(n, n);
    for _ in 0..100 {
        let yi = y.clone().try_inverse().ok_or_else(|| {
            LabError::Conditioning(format!("{what}: iterate became singular"))
        })?;
        let zi = z.clone().try_inverse().ok_or_else(|| {
            LabError::Conditioning(format!("{what}: iterate became singular"))
        })?;
        let y_next = 0.5 * (&y + zi);
        let delta = (&y_next - &y).norm() / y_next.norm().max(1e-300);
        z = 0.5 * (&z + yi);
        y = y_next;
        if delta < 1e-15 {
            break;
        }
    }
    y = 0.5 * (&y + y.transpose());
    z = 0.5 * (&z + z.transpose());
    let residual = (&y * &y - a).norm() / a.norm().max(1e-300);
    if residual > 1e-10 {
        return Err(LabError::Conditioning(format!(
            "{what}: square-root iteration stalled at relative residual {residual:.3e}"
        )));
    }
    Ok((y, z))
}

/// Symmetric PD square root.
pub fn sym_sqrt(a: &CovMatrix) -> Result<CovMatrix> {
    let (y, _) = sqrt_pair(&a.mat, "sym_sqrt")?;
    Ok(CovMatrix { mat: y })
}

/// Symmetric inverse square root; a non-PD input is a conditioning error
/// (never silently regularized).
pub fn inv_sym_sqrt(a: &CovMatrix) -> Result<CovMatrix> {
    let (_, z) = sqrt_pair(&a.mat, "inv_sym_sqrt")?;
    Ok(CovMatrix { mat: z })
}

/// Localization kernel K_n = Γ̃_n(f0)^{1/2} · Γ_n(f0)^{-1/2}; maps the
/// stationary law at the center f0 onto the circulant law exactly.
pub fn localization_kernel(f0: &SpectralModel, n: usize) -> Result<DMatrix<f64>> {
    require_odd(n, "localization kernel")?;
    let gamma0 = toeplitz(f0, n);
    let tilde0 = circulant(f0, n)?;
    let root_tilde = sym_sqrt(&tilde0)?;
    let inv_root = inv_sym_sqrt(&gamma0)?;
    Ok(root_tilde.mat * inv_root.mat)
}

/// Frobenius/operator norms and extreme symmetric-part eigenvalues.
pub fn matrix_norms(a: &DMatrix<f64>) -> MatrixNorms {
    let frobenius = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let gram = a.transpose() * a;
    let operator = gram
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .fold(0.0f64, |acc, &l| acc.max(l))
        .max(0.0)
        .sqrt();
    let sym = 0.5 * (a + a.transpose());
    let eig = sym.symmetric_eigen();
    let lambda_min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    let lambda_max = eig.eigenvalues.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    MatrixNorms { frobenius, operator, lambda_min, lambda_max }
}

/// Frobenius norm of the difference of two equally sized matrices.
pub fn frobenius_gap(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Lower Cholesky factor of a banded Toeplitz matrix in compact storage:
/// only the entries l(i, j) with i - band ≤ j ≤ i are kept.
#[derive(Debug, Clone)]
pub struct BandedCholesky {
    pub n: usize,
    pub band: usize,
    /// Row i stores l(i, i-band..=i) left-padded with zeros, width band+1.
    rows: Vec<f64>,
}

impl BandedCholesky {
    /// l(i, j); zero outside the band or above the diagonal.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if j > i || i - j > self.band {
            return 0.0;
        }
        self.rows[i * (self.band + 1) + (self.band - (i - j))]
    }

    pub fn log_det_of_product(&self) -> f64 {
        2.0 * (0..self.n).map(|i| self.get(i, i).ln()).sum::<f64>()
    }

    /// y = L x for a banded lower-triangular L.
    pub fn multiply(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.band);
                (lo..=i).map(|j| self.get(i, j) * x[j]).sum()
            })
            .collect()
    }

    /// Solve L w = y by forward substitution.
    pub fn solve_forward(&self, y: &[f64]) -> Vec<f64> {
        let mut w = y.to_vec();
        for i in 0..self.n {
            let lo = i.saturating_sub(self.band);
            let mut s = w[i];
            for j in lo..i {
                s -= self.get(i, j) * w[j];
            }
            w[i] = s / self.get(i, i);
        }
        w
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }
}

/// Banded Cholesky factorization of Γ_n(model); O(n·K²) for bandwidth K.
pub fn toeplitz_cholesky(model: &SpectralModel, n: usize) -> Result<BandedCholesky> {
    let band = model.max_lag().min(n.saturating_sub(1));
    let width = band + 1;
    let mut l = BandedCholesky { n, band, rows: vec![0.0; n * width] };
    for i in 0..n {
        let lo = i.saturating_sub(band);
        for j in lo..=i {
            let mut s = model.gamma(i as i64 - j as i64);
            let inner_lo = lo.max(j.saturating_sub(band));
            for p in inner_lo..j {
                s -= l.get(i, p) * l.get(j, p);
            }
            let value = if i == j {
                if s <= 0.0 {
                    return Err(LabError::Conditioning(format!(
                        "Toeplitz matrix is not positive definite at pivot {i} (value {s:.3e})"
                    )));
                }
                s.sqrt()
            } else {
                s / l.get(j, j)
            };
            l.rows[i * width + (band - (i - j))] = value;
        }
    }
    Ok(l)
}

/// Row-major CSV with "%.17g" entries.
pub fn matrix_to_csv(a: &DMatrix<f64>) -> String {
    let mut out = String::new();
    for j in 0..a.nrows() {
        let row: Vec<String> =
            (0..a.ncols()).map(|k| crate::fmt_g17(a[(j, k)])).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Parse a row-major numeric CSV into a matrix.
pub fn matrix_from_csv(s: &str) -> Result<DMatrix<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in s.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row: std::result::Result<Vec<f64>, _> =
            line.split(',').map(|t| t.trim().parse::<f64>()).collect();
        let row = row.map_err(|e| {
            LabError::Parse(format!("csv line {}: {e}", lineno + 1))
        })?;
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(LabError::Parse(format!(
                    "csv line {} has {} fields, expected {}",
                    lineno + 1,
                    row.len(),
                    first.len()
                )));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(LabError::Parse("empty csv matrix".into()));
    }
    let (nr, nc) = (rows.len(), rows[0].len());
    Ok(DMatrix::from_fn(nr, nc, |j, k| rows[j][k]))
}

/// Quadratic form xᵀAx.
pub fn quad_form(a: &DMatrix<f64>, x: &DVector<f64>) -> f64 {
    (x.transpose() * a * x)[(0, 0)]
}
