//! Estimation layer: empirical autocovariances, the truncated series
//! estimator with its class projection, Whittle and exact Gaussian
//! log-likelihoods, and the schedule constants (truncation index, shrinking
//! rate, split/bracket gaps).

use crate::error::{LabError, Result};
use crate::simulate::{PeriodogramData, SamplePath};
use crate::spectra::{class_membership, SmoothnessClassSpec, SpectralModel, TWO_PI};
use std::f64::consts::PI;

/// All rate/schedule constants for a given (n, α, β).
#[derive(Debug, Clone, Copy)]
pub struct ScheduleConfig {
    pub n: usize,
    pub alpha: f64,
    pub beta: f64,
    /// (α − 1/2) / (2(2α + 1)).
    pub gamma_rate: f64,
    /// κ(n) = n^{-gamma_rate}.
    pub kappa: f64,
    /// Odd central gap 2⌊(ln n)/2⌋ + 1 removed by sample splitting.
    pub r_split: usize,
    /// Even bracket widening 2⌊ln(n/2)⌋ (keeps n + r odd).
    pub r_upper: usize,
    /// Half length (n − r_split)/2 after splitting.
    pub m_split: usize,
    /// Truncation index ñ = ⌊n^{1/(2α+1)}⌋.
    pub n_trunc: usize,
}

/// Shrinking neighborhood Σ_n(f0) around a center density.
#[derive(Debug, Clone)]
pub struct NeighborhoodSpec {
    pub center: SpectralModel,
    pub radius: f64,
}

impl NeighborhoodSpec {
    pub fn new(center: SpectralModel, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(LabError::Domain(format!("neighborhood radius must be positive, got {radius}")));
        }
        Ok(NeighborhoodSpec { center, radius })
    }

    /// Membership: grid sup-distance plus the 1/2-seminorm of the difference
    /// stays within the radius.
    pub fn contains(&self, model: &SpectralModel, grid_points: usize) -> bool {
        let sup = self.center.sup_distance(model, grid_points);
        let diff = model.difference(&self.center);
        let (semi, _) = diff.sobolev_norm(0.5).expect("index valid");
        sup + semi.sqrt() <= self.radius
    }
}

/// Evaluate all schedule constants; n must be odd and at least 3, and the
/// smoothness pair must satisfy 1/2 < β < α.
pub fn compute_schedule(n: usize, alpha: f64, beta: f64) -> Result<ScheduleConfig> {
    if n < 3 || n % 2 == 0 {
        return Err(LabError::Argument(format!("schedule needs odd n >= 3, got {n}")));
    }
    if !(0.5 < beta && beta < alpha) {
        return Err(LabError::Argument(format!(
            "schedule needs 1/2 < beta < alpha, got beta={beta}, alpha={alpha}"
        )));
    }
    let gamma_rate = (alpha - 0.5) / (2.0 * (2.0 * alpha + 1.0));
    let nf = n as f64;
    let r_split = 2 * ((nf.ln() / 2.0).floor() as usize) + 1;
    let r_upper = 2 * ((nf / 2.0).ln().floor() as usize);
    if r_split >= n {
        return Err(LabError::Argument(format!("n={n} is too small for the split gap {r_split}")));
    }
    // nudge before flooring so exact powers (e.g. 1000^(1/3)) are not lost
    let n_trunc = (nf.powf(1.0 / (2.0 * alpha + 1.0)) + 1e-9).floor() as usize;
    Ok(ScheduleConfig {
        n,
        alpha,
        beta,
        gamma_rate,
        kappa: nf.powf(-gamma_rate),
        r_split,
        r_upper,
        m_split: (n - r_split) / 2,
        n_trunc: n_trunc.max(1),
    })
}

/// Empirical autocovariances γ̂(k) = (n−k)^{-1} Σ_j y(j)y(j+k), k = 0..K.
pub fn empirical_autocov(path: &SamplePath, max_lag: usize) -> Result<Vec<f64>> {
    let n = path.n();
    if max_lag >= n {
        return Err(LabError::Argument(format!(
            "max lag {max_lag} must be below the path length {n}"
        )));
    }
    let y = &path.values;
    Ok((0..=max_lag)
        .map(|k| {
            let s: f64 = (0..n - k).map(|j| y[j] * y[j + k]).sum();
            s / (n - k) as f64
        })
        .collect())
}

/// Truncated orthogonal-series estimator: the model with coefficients
/// γ̂(0..ñ) at the schedule's truncation index.
pub fn series_estimator(path: &SamplePath, schedule: &ScheduleConfig) -> Result<SpectralModel> {
    if path.n() < 3 {
        return Err(LabError::Argument(format!("series estimator needs n >= 3, got {}", path.n())));
    }
    let k = schedule.n_trunc.min(path.n() - 1);
    let autocov = empirical_autocov(path, k)?;
    SpectralModel::new(
        format!("est[{}]", path.model_name),
        autocov,
        schedule.alpha,
        1e6, // metadata only; class constants come from the projection spec
    )
}

/// Project a raw estimate into Σ_{α,M} by alternating two nonexpansive
/// steps: Lagrange shrinkage onto the Sobolev ellipsoid (multiplier solved
/// by bisection) and a convex combination toward a safe constant density to
/// restore the lower bound.  Members are returned unchanged.
pub fn project_to_class(
    raw: &SpectralModel,
    spec: &SmoothnessClassSpec,
    beta: f64,
) -> Result<SpectralModel> {
    if !(0.5 < beta && beta < spec.alpha) {
        return Err(LabError::Argument(format!(
            "projection needs 1/2 < beta < alpha, got beta={beta}, alpha={}",
            spec.alpha
        )));
    }
    let mut current = raw.clone();
    current.alpha = spec.alpha;
    current.big_m = spec.big_m;
    for _ in 0..500 {
        let verdict = class_membership(&current, spec);
        if verdict.member {
            return Ok(current);
        }
        let (_, norm_sq) = current.sobolev_norm(spec.alpha)?;
        if norm_sq > spec.big_m {
            current = shrink_to_ellipsoid(&current, spec, beta)?;
            continue;
        }
        current = lift_positivity(&current, spec);
    }
    Err(LabError::Numeric(format!(
        "class projection did not converge in 500 iterations (norm² = {:.6}, min f = {:.6})",
        current.sobolev_norm(spec.alpha)?.1,
        current.min_on_grid(spec.grid_points).1
    )))
}

/// Shrink coefficients as γ_k / (1 + μ·k^{2α}/max(1, k^{2β})) with μ chosen
/// by bisection so the α-norm lands on the ellipsoid boundary.
fn shrink_to_ellipsoid(
    model: &SpectralModel,
    spec: &SmoothnessClassSpec,
    beta: f64,
) -> Result<SpectralModel> {
    let weight = |k: usize| -> f64 {
        if k == 0 {
            1.0
        } else {
            (k as f64).powf(2.0 * spec.alpha) / (k as f64).powf(2.0 * beta).max(1.0)
        }
    };
    let norm_at = |mu: f64| -> f64 {
        let shrunk: Vec<f64> = model
            .autocov
            .iter()
            .enumerate()
            .map(|(k, g)| g / (1.0 + mu * weight(k)))
            .collect();
        let semi: f64 = shrunk
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, g)| 2.0 * (k as f64).powf(2.0 * spec.alpha) * g * g)
            .sum();
        shrunk[0] * shrunk[0] + semi
    };
    let mut hi = 1.0;
    while norm_at(hi) > spec.big_m {
        hi *= 2.0;
        if hi > 1e18 {
            return Err(LabError::Numeric("ellipsoid multiplier bisection diverged".into()));
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if norm_at(mid) > spec.big_m {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-14 * hi.max(1.0) {
            break;
        }
    }
    let mu = hi;
    let autocov = model
        .autocov
        .iter()
        .enumerate()
        .map(|(k, g)| g / (1.0 + mu * weight(k)))
        .collect();
    SpectralModel::new(model.name.clone(), autocov, spec.alpha, spec.big_m)
}

/// Convex combination with the constant density of level max(γ(0), 2π/M),
/// using the smallest mixing weight that restores min f ≥ 1/M.
fn lift_positivity(model: &SpectralModel, spec: &SmoothnessClassSpec) -> SpectralModel {
    let (_, min_f) = model.min_on_grid(spec.grid_points);
    let floor = 1.0 / spec.big_m;
    if min_f >= floor {
        return model.clone();
    }
    let c0 = model.autocov[0].max(TWO_PI / spec.big_m);
    let c_level = c0 / TWO_PI; // the constant density value, >= 1/M
    // (1-t)·min_f + t·c_level = floor
    let t = ((floor - min_f) / (c_level - min_f)).clamp(0.0, 1.0);
    let mut autocov: Vec<f64> = model.autocov.iter().map(|g| (1.0 - t) * g).collect();
    autocov[0] += t * c0;
    SpectralModel {
        name: model.name.clone(),
        autocov,
        alpha: spec.alpha,
        big_m: spec.big_m,
    }
}

/// Whittle likelihood flavour.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WhittleVariant {
    /// (1/4π)∫(log f + I_n/f) dω by a 16n-point trapezoid rule.
    Continuous,
    /// n^{-1} Σ_{j=1..(n-1)/2} (log f(ω_j) + I_n(ω_j)/f(ω_j)).
    Discrete,
}

/// Whittle likelihood of a model given periodogram data.
pub fn whittle_likelihood(
    model: &SpectralModel,
    pgram: &PeriodogramData,
    variant: WhittleVariant,
) -> Result<f64> {
    let n = pgram.n();
    match variant {
        WhittleVariant::Discrete => {
            let mut s = 0.0;
            for (j, (&omega, &i_n)) in pgram
                .frequencies
                .iter()
                .zip(&pgram.ordinates)
                .enumerate()
                .skip(1)
            {
                let f = model.eval_density(omega)?;
                if f <= 0.0 {
                    return Err(LabError::Domain(format!(
                        "density must be positive at grid point {j}: f({omega:.6}) = {f:.6e}"
                    )));
                }
                s += f.ln() + i_n / f;
            }
            Ok(s / n as f64)
        }
        WhittleVariant::Continuous => {
            let points = 16 * n;
            let mut s = 0.0;
            for i in 0..=points {
                let omega = -PI + TWO_PI * i as f64 / points as f64;
                let f = model.eval_density(omega)?;
                if f <= 0.0 {
                    return Err(LabError::Domain(format!(
                        "density must be positive on the quadrature grid: f({omega:.6}) = {f:.6e}"
                    )));
                }
                let weight = if i == 0 || i == points { 0.5 } else { 1.0 };
                s += weight * (f.ln() + pgram.ordinate_at(omega) / f);
            }
            Ok(s * TWO_PI / points as f64 / (4.0 * PI))
        }
    }
}

/// Exact Gaussian log-likelihood of a path under the stationary law:
/// −(n/2)log 2π − ½ log det Γ_n − ½ yᵀΓ_n^{-1}y, through the banded
/// Cholesky factor.
pub fn exact_loglik(model: &SpectralModel, path: &SamplePath) -> Result<f64> {
    let n = path.n();
    let l = crate::covariance::toeplitz_cholesky(model, n)?;
    let w = l.solve_forward(&path.values);
    let log_det = l.log_det_of_product();
    let quad: f64 = w.iter().map(|x| x * x).sum();
    Ok(-(n as f64) / 2.0 * TWO_PI.ln() - 0.5 * log_det - 0.5 * quad)
}

/// Whittle residual R_n = L_n + n·L^W + n·log 2π.
pub fn whittle_residual(model: &SpectralModel, path: &SamplePath) -> Result<f64> {
    let pgram = crate::simulate::dft_periodogram(path)?;
    let lw = whittle_likelihood(model, &pgram, WhittleVariant::Continuous)?;
    let ln_exact = exact_loglik(model, path)?;
    Ok(ln_exact + path.n() as f64 * lw + path.n() as f64 * TWO_PI.ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulate::{sample_stationary, Experiment, SamplePath};

    fn path_of(values: Vec<f64>) -> SamplePath {
        SamplePath { values, experiment: Experiment::Stationary, model_name: "fixed".into(), seed: 0 }
    }

    fn ma1() -> SpectralModel {
        SpectralModel::new("ma1", vec![1.25, 0.5], 1.0, 30.0).unwrap()
    }

    #[test]
    fn schedule_values() {
        let s = compute_schedule(1001, 1.0, 0.75).unwrap();
        assert!((s.gamma_rate - 1.0 / 12.0).abs() < 1e-15);
        assert_eq!(s.r_split, 7);
        assert_eq!(s.m_split, 497);
        assert_eq!(s.r_upper, 12);
        assert_eq!((1001 + s.r_upper) % 2, 1);
        // ñ at an exact cube
        let s2 = compute_schedule(1001, 1.0, 0.75).unwrap();
        assert!((s2.kappa - 1001f64.powf(-1.0 / 12.0)).abs() < 1e-15);
        let nf = 1000f64;
        assert_eq!((nf.powf(1.0 / 3.0) + 1e-9).floor() as usize, 10);
        assert!(compute_schedule(1000, 1.0, 0.75).is_err());
        assert!(compute_schedule(1001, 0.75, 1.0).is_err());
        assert!(compute_schedule(1001, 1.0, 0.4).is_err());
    }

    #[test]
    fn truncation_index_example() {
        // hand-checked: ñ = ⌊1001^{1/3}⌋ = 10 for α = 1
        let s = compute_schedule(1001, 1.0, 0.75).unwrap();
        assert_eq!(s.n_trunc, 10);
    }

    #[test]
    fn empirical_autocov_hand_values() {
        let p = path_of(vec![1.0, -1.0, 1.0]);
        let g = empirical_autocov(&p, 2).unwrap();
        assert_eq!(g, vec![1.0, -1.0, 1.0]);
        // k = n-1 is the single product y(1)y(n)
        assert_eq!(g[2], 1.0);
        assert!(empirical_autocov(&p, 3).is_err());
    }

    #[test]
    fn autocov_monte_carlo() {
        let long = sample_stationary(&ma1(), 100_000, 4).unwrap();
        let g = empirical_autocov(&long, 1).unwrap();
        assert!((g[1] - 0.5).abs() < 0.02, "lag1 {}", g[1]);
    }

    #[test]
    fn series_estimator_recovers_band_limited_truth() {
        let long = sample_stationary(&ma1(), 100_001, 8).unwrap();
        let schedule = compute_schedule(100_001, 1.0, 0.75).unwrap();
        let est = series_estimator(&long, &schedule).unwrap();
        assert_eq!(est.max_lag(), schedule.n_trunc);
        for k in 0..=schedule.n_trunc {
            let want = ma1().gamma(k as i64);
            assert!((est.gamma(k as i64) - want).abs() < 0.02, "lag {k}");
        }
    }

    #[test]
    fn projection_fixes_members() {
        let spec = SmoothnessClassSpec::new(1.0, 30.0, 1024).unwrap();
        let m = ma1();
        let out = project_to_class(&m, &spec, 0.75).unwrap();
        assert_eq!(out.autocov, m.autocov);
    }

    #[test]
    fn projection_handles_norm_violation() {
        let spec = SmoothnessClassSpec::new(1.0, 4.0, 1024).unwrap();
        let big = SpectralModel::new("big", vec![1.5, 0.9, 0.5, 0.2], 1.0, 4.0).unwrap();
        let out = project_to_class(&big, &spec, 0.75).unwrap();
        assert!(class_membership(&out, &spec).member);
        let (_, norm_sq) = out.sobolev_norm(1.0).unwrap();
        assert!(norm_sq <= 4.0 + 1e-8);
    }

    #[test]
    fn projection_handles_positivity_violation() {
        let spec = SmoothnessClassSpec::new(1.0, 10.0, 1024).unwrap();
        // f(π) < 0.1: needs the lower-bound lift
        let m = SpectralModel::new("low", vec![1.25, 0.5], 1.0, 10.0).unwrap();
        let out = project_to_class(&m, &spec, 0.75).unwrap();
        assert!(class_membership(&out, &spec).member);
        let (_, min_f) = out.min_on_grid(1024);
        assert!(min_f >= 0.1 - 1e-10, "min f {min_f}");
    }

    #[test]
    fn whittle_zero_path_constant_density() {
        // f ≡ 1/(2π): L^W = (1/2) log(1/2π)
        let unit = SpectralModel::new("unit", vec![1.0], 1.0, 10.0).unwrap();
        let p = crate::simulate::dft_periodogram(&path_of(vec![0.0; 7])).unwrap();
        let lw = whittle_likelihood(&unit, &p, WhittleVariant::Continuous).unwrap();
        let want = 0.5 * (1.0 / TWO_PI).ln();
        assert!((lw - want).abs() < 1e-12, "{lw} vs {want}");
    }

    #[test]
    fn whittle_discrete_hand_sum() {
        let y = vec![1.0, 2.0, -0.5];
        let p = crate::simulate::dft_periodogram(&path_of(y)).unwrap();
        let m = ma1();
        let got = whittle_likelihood(&m, &p, WhittleVariant::Discrete).unwrap();
        let omega1 = TWO_PI / 3.0;
        let f1 = m.eval_density(omega1).unwrap();
        let want = (f1.ln() + p.ordinates[1] / f1) / 3.0;
        assert!((got - want).abs() < 1e-14);
    }

    #[test]
    fn whittle_rejects_nonpositive_density() {
        // γ = (1, 0.5): f(π) = 0
        let zeroed = SpectralModel::new("zero-at-pi", vec![1.0, 0.5], 1.0, 10.0).unwrap();
        let p = crate::simulate::dft_periodogram(&path_of(vec![1.0, 0.0, 0.0])).unwrap();
        assert!(matches!(
            whittle_likelihood(&zeroed, &p, WhittleVariant::Continuous),
            Err(LabError::Domain(_))
        ));
    }

    #[test]
    fn exact_loglik_closed_forms() {
        let unit = SpectralModel::new("unit", vec![1.0], 1.0, 10.0).unwrap();
        let y = vec![0.3, -1.2, 0.8];
        let got = exact_loglik(&unit, &path_of(y.clone())).unwrap();
        let want = -1.5 * TWO_PI.ln() - 0.5 * y.iter().map(|v| v * v).sum::<f64>();
        assert!((got - want).abs() < 1e-12);
        let single = exact_loglik(&unit, &path_of(vec![0.0])).unwrap();
        assert!((single + 0.5 * TWO_PI.ln()).abs() < 1e-12);
        assert!((single + 0.9189385).abs() < 1e-7);
    }

    #[test]
    fn whittle_residual_reproducible_and_small_for_white_noise() {
        let unit = SpectralModel::new("unit", vec![1.0], 1.0, 10.0).unwrap();
        let path = sample_stationary(&unit, 129, 6).unwrap();
        let r1 = whittle_residual(&unit, &path).unwrap();
        let r2 = whittle_residual(&unit, &path).unwrap();
        assert_eq!(r1, r2);
        assert!(r1.is_finite());
        // for white noise the Whittle approximation is exact up to quadrature
        assert!(r1.abs() < 1e-6, "residual {r1}");
    }

    #[test]
    fn neighborhood_membership() {
        let center = ma1();
        let nb = NeighborhoodSpec::new(center.clone(), 0.1).unwrap();
        assert!(nb.contains(&ma1(), 2048));
        let far = SpectralModel::new("far", vec![2.0, 0.7], 1.0, 30.0).unwrap();
        assert!(!nb.contains(&far, 2048));
        assert!(NeighborhoodSpec::new(center, -1.0).is_err());
    }
}
