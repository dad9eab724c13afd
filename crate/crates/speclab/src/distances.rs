//! Exact Hellinger distances between the laws that arise in the equivalence
//! chain: centered multivariate Gaussians (via simultaneous diagonalization)
//! and Gamma families (closed forms), plus an adaptive quadrature oracle.

use crate::covariance::CovMatrix;
use crate::error::{LabError, Result};
use nalgebra::DMatrix;
use std::f64::consts::PI;

/// Shape/scale parameter pair of a Γ(a, s) law.
#[derive(Debug, Clone, Copy)]
pub struct GammaLaw {
    pub shape: f64,
    pub scale: f64,
}

impl GammaLaw {
    pub fn new(shape: f64, scale: f64) -> Result<Self> {
        if !(shape > 0.0 && shape.is_finite() && scale > 0.0 && scale.is_finite()) {
            return Err(LabError::Domain(format!(
                "gamma law needs positive finite shape/scale, got ({shape}, {scale})"
            )));
        }
        Ok(GammaLaw { shape, scale })
    }

    fn log_density(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return f64::NEG_INFINITY;
        }
        (self.shape - 1.0) * x.ln() - x / self.scale
            - self.shape * self.scale.ln()
            - ln_gamma(self.shape)
    }
}

/// How a Hellinger value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HellingerMethod {
    ClosedForm,
    Eigensystem,
    Quadrature,
}

/// Squared Hellinger distance and Bhattacharyya affinity; always satisfies
/// h_squared = 2(1 - affinity).
#[derive(Debug, Clone, Copy)]
pub struct HellingerResult {
    pub h_squared: f64,
    pub affinity: f64,
    pub method: HellingerMethod,
}

impl HellingerResult {
    fn from_affinity(affinity: f64, method: HellingerMethod) -> Self {
        let affinity = affinity.clamp(0.0, 1.0);
        HellingerResult { h_squared: 2.0 * (1.0 - affinity), affinity, method }
    }

    /// Affinity of a product experiment is the product of affinities.
    pub fn product(parts: &[HellingerResult]) -> HellingerResult {
        // accumulate in log space so long products cannot underflow
        let log_aff: f64 = parts.iter().map(|p| p.affinity.max(1e-300).ln()).sum();
        HellingerResult::from_affinity(log_aff.exp(), HellingerMethod::ClosedForm)
    }
}

/// log Γ(x) via the Lanczos approximation (g = 7, 9 coefficients).
pub fn ln_gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // reflection Γ(x)Γ(1-x) = π/sin(πx)
        return PI.ln() - (PI * x).sin().abs().ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = COEF[0];
    for (i, &c) in COEF.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + G + 0.5;
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

fn affinity_from_eigens(lambda_tilde: &[f64]) -> Result<f64> {
    let mut log_aff = 0.0;
    for &l in lambda_tilde {
        if l <= 0.0 {
            return Err(LabError::Conditioning(format!(
                "simultaneous diagonalization produced a nonpositive eigenvalue {l:.3e}"
            )));
        }
        // (2√λ / (1+λ))^{1/2} per coordinate
        log_aff += 0.5 * ((2.0 * l.sqrt()).ln() - (1.0 + l).ln());
    }
    Ok(log_aff.exp())
}

/// Eigenvalues λ̃ of B in the metric of A: whiten with the Cholesky factor
/// A = LLᵀ and diagonalize L⁻¹ B L⁻ᵀ (similar to A⁻¹B).  Cholesky is used
/// deliberately: an eigendecomposition of A is unreliable when A has
/// repeated eigenvalues, which circulant covariances always do.
pub fn simultaneous_eigenvalues(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<Vec<f64>> {
    let chol = a.clone().cholesky().ok_or_else(|| {
        LabError::Conditioning("first covariance is not positive definite at working precision".into())
    })?;
    let half = chol
        .l()
        .solve_lower_triangular(b)
        .ok_or_else(|| LabError::Conditioning("singular Cholesky factor".into()))?;
    let b_tilde = chol
        .l()
        .solve_lower_triangular(&half.transpose())
        .ok_or_else(|| LabError::Conditioning("singular Cholesky factor".into()))?;
    // symmetrize away the triangular-solve roundoff before diagonalizing
    let sym = 0.5 * (&b_tilde + b_tilde.transpose());
    Ok(sym.symmetric_eigen().eigenvalues.iter().cloned().collect())
}

fn gaussian_affinity_one_way(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<f64> {
    affinity_from_eigens(&simultaneous_eigenvalues(a, b)?)
}

/// Hellinger distance between N(0, A) and N(0, B), computed exactly through
/// simultaneous diagonalization.  Both orderings are evaluated and averaged;
/// a discrepancy above 1e-9 signals a near-singular input.
pub fn hellinger_gaussian(a: &CovMatrix, b: &CovMatrix) -> Result<HellingerResult> {
    if a.mat.shape() != b.mat.shape() {
        return Err(LabError::Argument(format!(
            "covariance dimensions differ: {:?} vs {:?}",
            a.mat.shape(),
            b.mat.shape()
        )));
    }
    let ab = gaussian_affinity_one_way(&a.mat, &b.mat)?;
    let ba = gaussian_affinity_one_way(&b.mat, &a.mat)?;
    if (ab - ba).abs() > 1e-9 {
        return Err(LabError::Conditioning(format!(
            "affinity asymmetry {:.3e} exceeds tolerance; inputs are too ill-conditioned",
            (ab - ba).abs()
        )));
    }
    Ok(HellingerResult::from_affinity(0.5 * (ab + ba), HellingerMethod::Eigensystem))
}

/// Hellinger distance between Γ(a, s) and Γ(a, t):
/// h² = 2(1 - (1 - (√s - √t)²/(s + t))^a).
pub fn hellinger_gamma_same_shape(a: f64, s: f64, t: f64) -> Result<HellingerResult> {
    if !(a > 0.0 && s > 0.0 && t > 0.0) {
        return Err(LabError::Domain(format!(
            "gamma parameters must be positive, got a={a}, s={s}, t={t}"
        )));
    }
    let gap = (s.sqrt() - t.sqrt()).powi(2) / (s + t);
    let affinity = (1.0 - gap).powf(a);
    Ok(HellingerResult::from_affinity(affinity, HellingerMethod::ClosedForm))
}

/// Hellinger distance between Γ(a, s) and Γ(b, s):
/// h² = 2(1 - Γ((a+b)/2)/√(Γ(a)Γ(b))), independent of the common scale.
pub fn hellinger_gamma_same_scale(a: f64, b: f64, s: f64) -> Result<HellingerResult> {
    if !(a > 0.0 && b > 0.0 && s > 0.0) {
        return Err(LabError::Domain(format!(
            "gamma parameters must be positive, got a={a}, b={b}, s={s}"
        )));
    }
    let log_aff = ln_gamma(0.5 * (a + b)) - 0.5 * (ln_gamma(a) + ln_gamma(b));
    Ok(HellingerResult::from_affinity(log_aff.exp(), HellingerMethod::ClosedForm))
}

/// Hellinger distance between products of independent centered Gaussians
/// with the given per-coordinate variances.
pub fn hellinger_diag_gaussians(vars_p: &[f64], vars_q: &[f64]) -> Result<HellingerResult> {
    if vars_p.len() != vars_q.len() {
        return Err(LabError::Argument(format!(
            "variance vectors differ in length: {} vs {}",
            vars_p.len(),
            vars_q.len()
        )));
    }
    let mut log_aff = 0.0;
    for (&p, &q) in vars_p.iter().zip(vars_q) {
        if !(p > 0.0 && q > 0.0) {
            return Err(LabError::Domain(format!("variances must be positive, got ({p}, {q})")));
        }
        // affinity of N(0,p) vs N(0,q): (2√(pq)/(p+q))^{1/2}
        log_aff += 0.5 * ((2.0 * (p * q).sqrt()).ln() - (p + q).ln());
    }
    Ok(HellingerResult::from_affinity(log_aff.exp(), HellingerMethod::ClosedForm))
}

/// Density families accepted by the quadrature oracle.
#[derive(Debug, Clone, Copy)]
pub enum OracleDensity {
    /// Centered normal with the given variance.
    Gaussian0 { variance: f64 },
    /// Gamma law.
    Gamma(GammaLaw),
}

impl OracleDensity {
    fn sqrt_product(self, other: OracleDensity, x: f64) -> f64 {
        (0.5 * (self.log_density(x) + other.log_density(x))).exp()
    }

    fn log_density(self, x: f64) -> f64 {
        match self {
            OracleDensity::Gaussian0 { variance } => {
                -0.5 * (2.0 * PI * variance).ln() - x * x / (2.0 * variance)
            }
            OracleDensity::Gamma(g) => g.log_density(x),
        }
    }

    fn is_gamma(self) -> bool {
        matches!(self, OracleDensity::Gamma(_))
    }

    fn upper_limit(self) -> f64 {
        match self {
            OracleDensity::Gamma(g) => g.shape * g.scale + 60.0 * g.scale,
            OracleDensity::Gaussian0 { variance } => 40.0 * variance.sqrt(),
        }
    }
}

fn simpson(_f: &impl Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive_simpson(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    if depth == 0 {
        return Err(LabError::Numeric("adaptive quadrature failed to converge".into()));
    }
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(f, a, m, fa, flm, fm);
    let right = simpson(f, m, b, fm, frm, fb);
    if (left + right - whole).abs() <= 15.0 * tol {
        return Ok(left + right + (left + right - whole) / 15.0);
    }
    let half_tol = (0.5 * tol).max(5e-16);
    Ok(adaptive_simpson(f, a, m, fa, flm, fm, left, half_tol, depth - 1)?
        + adaptive_simpson(f, m, b, fm, frm, fb, right, half_tol, depth - 1)?)
}

/// Independent quadrature oracle: h² from ∫√(p·q) by adaptive Simpson with
/// absolute tolerance 1e-11.  Intended for tests and cross-checks only.
pub fn quadrature_hellinger(p: OracleDensity, q: OracleDensity) -> Result<HellingerResult> {
    let hi = p.upper_limit().max(q.upper_limit());
    let mut affinity = 0.0;
    if p.is_gamma() || q.is_gamma() {
        // substitute x = u^k with k large enough that the integrable x^{a-1}
        // singularity at the origin becomes u^{ka-1} with ka-1 >= 3
        let min_shape = [p, q]
            .iter()
            .filter_map(|d| match d {
                OracleDensity::Gamma(g) => Some(g.shape),
                _ => None,
            })
            .fold(f64::INFINITY, f64::min);
        let k = (4.0 / min_shape).ceil().max(2.0);
        let f = |u: f64| {
            if u <= 0.0 {
                return 0.0;
            }
            k * u.powf(k - 1.0) * p.sqrt_product(q, u.powf(k))
        };
        let top = hi.powf(1.0 / k);
        let seams = [0.0, 0.1 * top, 0.5 * top, top];
        for w in seams.windows(2) {
            affinity += integrate_panel(&f, w[0], w[1])?;
        }
    } else {
        let f = |x: f64| p.sqrt_product(q, x);
        let seams = [-hi, -0.1 * hi, 0.0, 0.1 * hi, hi];
        for w in seams.windows(2) {
            affinity += integrate_panel(&f, w[0], w[1])?;
        }
    }
    Ok(HellingerResult::from_affinity(affinity, HellingerMethod::Quadrature))
}

fn integrate_panel(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> Result<f64> {
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson(f, a, b, fa, fm, fb);
    adaptive_simpson(f, a, b, fa, fm, fb, whole, 1e-11, 60)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DVector;

    fn cov(entries: &[f64], n: usize) -> CovMatrix {
        CovMatrix { mat: DMatrix::from_row_slice(n, n, entries) }
    }

    #[test]
    fn ln_gamma_reference_values() {
        // factorials and the half-integer ladder Γ(n+1/2) = (2n)!√π/(4^n n!)
        let sqrt_pi = PI.sqrt();
        let mut cases: Vec<(f64, f64)> = vec![(1.0, 1.0), (0.5, sqrt_pi)];
        let mut fact = 1.0f64;
        for n in 1..=9u32 {
            fact *= n as f64;
            cases.push(((n + 1) as f64, fact)); // Γ(n+1) = n!
        }
        let mut half = sqrt_pi;
        for n in 0..=8u32 {
            half *= n as f64 + 0.5;
            cases.push((n as f64 + 1.5, half)); // Γ(x+1) = xΓ(x)
        }
        assert!(cases.len() >= 20);
        for (x, want) in cases {
            let got = ln_gamma(x);
            assert!(
                (got - want.ln()).abs() <= 1e-12 * want.ln().abs().max(1.0),
                "ln_gamma({x}) = {got}, want {}",
                want.ln()
            );
        }
    }

    #[test]
    fn gaussian_identical_laws() {
        let a = cov(&[2.0, 0.3, 0.3, 1.0], 2);
        let r = hellinger_gaussian(&a, &a).unwrap();
        assert!(r.h_squared.abs() < 1e-12);
    }

    #[test]
    fn gaussian_one_dim_closed_form() {
        let r = hellinger_gaussian(&cov(&[1.0], 1), &cov(&[4.0], 1)).unwrap();
        let want = 2.0 * (1.0 - (4.0f64 / 5.0).sqrt());
        assert!((r.h_squared - want).abs() < 1e-12, "{}", r.h_squared);
        assert!((r.h_squared - 0.2111456).abs() < 1e-6);
        // against the quadrature oracle
        let q = quadrature_hellinger(
            OracleDensity::Gaussian0 { variance: 1.0 },
            OracleDensity::Gaussian0 { variance: 4.0 },
        )
        .unwrap();
        assert!((r.affinity - q.affinity).abs() < 1e-9);
        assert!((q.affinity - 0.8944272).abs() < 1e-7);
    }

    #[test]
    fn gaussian_block_diagonal_product_rule() {
        let a1 = cov(&[1.0, 0.2, 0.2, 1.5], 2);
        let b1 = cov(&[1.1, 0.1, 0.1, 1.4], 2);
        let a2 = cov(&[0.7], 1);
        let b2 = cov(&[0.9], 1);
        let mut a = DMatrix::zeros(3, 3);
        a.view_mut((0, 0), (2, 2)).copy_from(&a1.mat);
        a[(2, 2)] = a2.mat[(0, 0)];
        let mut b = DMatrix::zeros(3, 3);
        b.view_mut((0, 0), (2, 2)).copy_from(&b1.mat);
        b[(2, 2)] = b2.mat[(0, 0)];
        let joint = hellinger_gaussian(&CovMatrix { mat: a }, &CovMatrix { mat: b }).unwrap();
        let p1 = hellinger_gaussian(&a1, &b1).unwrap();
        let p2 = hellinger_gaussian(&a2, &b2).unwrap();
        let prod = HellingerResult::product(&[p1, p2]);
        assert!((joint.affinity - prod.affinity).abs() < 1e-12);
    }

    #[test]
    fn gaussian_guards() {
        assert!(matches!(
            hellinger_gaussian(&cov(&[1.0], 1), &cov(&[1.0, 0.0, 0.0, 1.0], 2)),
            Err(LabError::Argument(_))
        ));
        let singular = CovMatrix { mat: DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 0.0])) };
        let ok = CovMatrix { mat: DMatrix::identity(2, 2) };
        assert!(matches!(hellinger_gaussian(&singular, &ok), Err(LabError::Conditioning(_))));
    }

    #[test]
    fn gamma_same_shape_values() {
        assert!(hellinger_gamma_same_shape(1.0, 3.0, 3.0).unwrap().h_squared.abs() < 1e-15);
        let r = hellinger_gamma_same_shape(0.5, 2.0, 8.0).unwrap();
        let want = 2.0 * (1.0 - 0.8f64.sqrt());
        assert!((r.h_squared - want).abs() < 1e-14);
        let q = quadrature_hellinger(
            OracleDensity::Gamma(GammaLaw::new(0.5, 2.0).unwrap()),
            OracleDensity::Gamma(GammaLaw::new(0.5, 8.0).unwrap()),
        )
        .unwrap();
        assert!((r.affinity - q.affinity).abs() < 1e-8, "{} vs {}", r.affinity, q.affinity);
        assert!(hellinger_gamma_same_shape(-1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn gamma_same_scale_values() {
        assert!(hellinger_gamma_same_scale(2.0, 2.0, 1.0).unwrap().h_squared.abs() < 1e-14);
        for s in [0.1, 1.0, 10.0] {
            let r = hellinger_gamma_same_scale(0.5, 1.5, s).unwrap();
            let want = 2.0 * (1.0 - 1.0 / (PI / 2.0).sqrt());
            assert!((r.h_squared - want).abs() < 1e-13, "s={s}");
            assert!((r.h_squared - 0.4042309).abs() < 1e-6);
        }
        // symmetry in the shapes
        let ab = hellinger_gamma_same_scale(0.7, 2.3, 1.0).unwrap();
        let ba = hellinger_gamma_same_scale(2.3, 0.7, 1.0).unwrap();
        assert!((ab.h_squared - ba.h_squared).abs() < 1e-15);
    }

    #[test]
    fn gaussian_gamma_sufficiency_identity() {
        // H²(N(0,s), N(0,t)) = H²(Γ(1/2, 2s), Γ(1/2, 2t))
        let mut rng = crate::rng::CounterRng::new(3);
        for _ in 0..100 {
            let s = rng.uniform_in(0.1, 10.0);
            let t = rng.uniform_in(0.1, 10.0);
            let g = hellinger_diag_gaussians(&[s], &[t]).unwrap();
            let gam = hellinger_gamma_same_shape(0.5, 2.0 * s, 2.0 * t).unwrap();
            assert!((g.h_squared - gam.h_squared).abs() < 1e-10, "s={s}, t={t}");
        }
    }

    #[test]
    fn result_invariant_and_products() {
        let r = hellinger_gamma_same_shape(2.0, 1.0, 1.3).unwrap();
        assert!((r.h_squared - 2.0 * (1.0 - r.affinity)).abs() < 1e-12);
        let prod = HellingerResult::product(&vec![r; 50]);
        assert!((prod.affinity - r.affinity.powi(50)).abs() < 1e-12);
    }
}
