//! Seeded samplers for the five experiment forms (stationary series,
//! periodic process, Gaussian scale model, white-noise-with-drift
//! increments), DFT/periodogram computation, and the explicit equivalence
//! maps between the periodic and scale experiments.

use crate::covariance;
use crate::error::{LabError, Result};
use crate::rng::CounterRng;
use crate::spectra::{SpectralModel, TWO_PI};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Which experiment generated a path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Stationary,
    Periodic,
    Scale,
    Whitenoise,
}

/// A generated observation vector together with its provenance.
#[derive(Debug, Clone)]
pub struct SamplePath {
    pub values: Vec<f64>,
    pub experiment: Experiment,
    pub model_name: String,
    pub seed: u64,
}

impl SamplePath {
    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,value\n");
        for (i, v) in self.values.iter().enumerate() {
            out.push_str(&format!("{},{}\n", i + 1, crate::fmt_g17(*v)));
        }
        out
    }
}

/// DFT values and periodogram ordinates on the nonnegative Fourier grid.
#[derive(Debug, Clone)]
pub struct PeriodogramData {
    /// ω_j = 2πj/n for j = 0..(n-1)/2.
    pub frequencies: Vec<f64>,
    pub dft: Vec<Complex64>,
    /// I_n(ω_j) = |d_n(ω_j)|² / (2πn).
    pub ordinates: Vec<f64>,
    /// The path the periodogram was computed from (needed by the
    /// continuous-variant Whittle quadrature).
    pub path: Vec<f64>,
}

impl PeriodogramData {
    pub fn n(&self) -> usize {
        self.path.len()
    }

    /// I_n at an arbitrary frequency, by direct summation with an
    /// incremental phase rotation (no per-term trig).
    pub fn ordinate_at(&self, omega: f64) -> f64 {
        let n = self.path.len();
        let rot = Complex64::from_polar(1.0, -omega);
        let mut phase = Complex64::new(1.0, 0.0);
        let mut d = Complex64::new(0.0, 0.0);
        for y in &self.path {
            d += phase * *y;
            phase *= rot;
        }
        d.norm_sqr() / (TWO_PI * n as f64)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("omega,I\n");
        for (w, i) in self.frequencies.iter().zip(&self.ordinates) {
            out.push_str(&format!("{},{}\n", crate::fmt_g17(*w), crate::fmt_g17(*i)));
        }
        out
    }
}

/// Exact draw from N_n(0, Γ_n(model)) via the Cholesky factor of the
/// Toeplitz covariance; deterministic given (model, n, seed).
pub fn sample_stationary(model: &SpectralModel, n: usize, seed: u64) -> Result<SamplePath> {
    if n == 0 {
        return Err(LabError::Argument("sample size must be >= 1".into()));
    }
    let l = covariance::toeplitz_cholesky(model, n)?;
    let mut rng = CounterRng::new(seed);
    let xi = rng.normal_vec(n);
    let values = l.multiply(&xi);
    Ok(SamplePath { values, experiment: Experiment::Stationary, model_name: model.name.clone(), seed })
}

/// Exact draw from the periodic experiment N_n(0, Γ̃_n(model)) built from the
/// finite cosine/sine spectral sum: ỹ = Σ_j λ_j^{1/2} ξ_j u_j over the
/// analytic circulant eigensystem.  Requires odd n.
pub fn sample_periodic(model: &SpectralModel, n: usize, seed: u64) -> Result<SamplePath> {
    let (spec, _) = covariance::circulant_eigensystem(model, n)?;
    if let Some(bad) = spec.eigenvalues.iter().find(|&&l| l <= 0.0) {
        return Err(LabError::Conditioning(format!(
            "circulant eigenvalue {bad:.6e} is not positive; the model leaves the class"
        )));
    }
    let half = spec.half();
    let mut rng = CounterRng::new(seed);
    let xi = rng.normal_vec(n);
    // accumulate the weighted eigenvector sum directly (O(n²), no dense U);
    // cosine/sine columns for ±j are walked together with one incremental
    // phase rotation instead of per-entry trig calls
    let scale = (2.0 / n as f64).sqrt();
    let mut values = vec![xi[half as usize] * spec.lambda(0).sqrt() / (n as f64).sqrt(); n];
    for j in 1..=half {
        let a = scale * spec.lambda(j).sqrt() * xi[(half + j) as usize];
        let b = scale * spec.lambda(-j).sqrt() * xi[(half - j) as usize];
        let omega = TWO_PI * j as f64 / n as f64;
        let (rot_im, rot_re) = omega.sin_cos();
        let (mut ph_re, mut ph_im) = (1.0f64, 0.0f64);
        for v in values.iter_mut() {
            *v += a * ph_re + b * ph_im;
            let next_re = ph_re * rot_re - ph_im * rot_im;
            ph_im = ph_re * rot_im + ph_im * rot_re;
            ph_re = next_re;
        }
    }
    Ok(SamplePath { values, experiment: Experiment::Periodic, model_name: model.name.clone(), seed })
}

/// Independent scale observations z_j = J_{j,n}^{1/2} ξ_j.
pub fn sample_scale(model: &SpectralModel, n: usize, seed: u64) -> Result<SamplePath> {
    let cells = model.cell_averages(n);
    if let Some((j, bad)) = cells.iter().enumerate().find(|(_, &c)| c <= 0.0) {
        return Err(LabError::Domain(format!(
            "cell average J_{} = {bad:.6e} is not positive",
            j + 1
        )));
    }
    let mut rng = CounterRng::new(seed);
    let values = cells.iter().map(|c| c.sqrt() * rng.standard_normal()).collect();
    Ok(SamplePath { values, experiment: Experiment::Scale, model_name: model.name.clone(), seed })
}

/// Discretized white-noise-with-drift experiment: increments
/// ΔZ_i = log f(ω_i)·Δω + 2√π·n^{-1/2}·√Δω·ξ_i on the uniform m-cell
/// midpoint grid of [-π, π], Δω = 2π/m.
pub fn sample_whitenoise_model(
    model: &SpectralModel,
    n: usize,
    m: usize,
    seed: u64,
) -> Result<SamplePath> {
    if m < n || n == 0 {
        return Err(LabError::Argument(format!("white-noise grid needs m >= n >= 1, got n={n}, m={m}")));
    }
    let dw = TWO_PI / m as f64;
    let noise_scale = 2.0 * PI.sqrt() / (n as f64).sqrt() * dw.sqrt();
    let mut rng = CounterRng::new(seed);
    let mut values = Vec::with_capacity(m);
    for i in 0..m {
        let omega = -PI + (i as f64 + 0.5) * dw;
        let f_val = model.eval_density(omega)?;
        if f_val <= 0.0 {
            return Err(LabError::Domain(format!(
                "density must be positive on the drift grid; f({omega:.6}) = {f_val:.6e}"
            )));
        }
        values.push(f_val.ln() * dw + noise_scale * rng.standard_normal());
    }
    Ok(SamplePath { values, experiment: Experiment::Whitenoise, model_name: model.name.clone(), seed })
}

/// Discrete Fourier transform and periodogram of an odd-length path,
/// by direct O(n²) summation.
pub fn dft_periodogram(path: &SamplePath) -> Result<PeriodogramData> {
    let n = path.n();
    if n % 2 == 0 {
        return Err(LabError::Parity(format!("periodogram requires odd length, got {n}")));
    }
    let half = (n - 1) / 2;
    let mut frequencies = Vec::with_capacity(half + 1);
    let mut dft = Vec::with_capacity(half + 1);
    let mut ordinates = Vec::with_capacity(half + 1);
    for j in 0..=half {
        let omega = TWO_PI * j as f64 / n as f64;
        let mut d = Complex64::new(0.0, 0.0);
        for (k, y) in path.values.iter().enumerate() {
            d += Complex64::from_polar(*y, -(k as f64) * omega);
        }
        frequencies.push(omega);
        ordinates.push(d.norm_sqr() / (TWO_PI * n as f64));
        dft.push(d);
    }
    Ok(PeriodogramData { frequencies, dft, ordinates, path: path.values.clone() })
}

/// Direction of an explicit equivalence map.
pub enum MapDirection<'a> {
    /// z = (2π)^{-1/2} U_nᵀ ỹ.
    PeriodicToScale,
    /// ỹ = (2π)^{1/2} U_n z.
    ScaleToPeriodic,
    /// y ↦ K_n(f̂)·y with f̂ estimated from a companion path.
    Localize {
        companion: Option<&'a SamplePath>,
        class: crate::spectra::SmoothnessClassSpec,
        beta: f64,
    },
}

/// Apply an equivalence map to a path.  The orthogonal trig matrix U_n
/// depends only on n; the localization direction estimates a center f̂ from
/// the companion path, projects it into the class, and applies K_n(f̂).
pub fn apply_equivalence_map(direction: MapDirection, input: &SamplePath) -> Result<SamplePath> {
    let n = input.n();
    if n % 2 == 0 {
        return Err(LabError::Parity(format!("equivalence maps require odd length, got {n}")));
    }
    // the eigenvector matrix is model-independent; any model works here
    let unit = SpectralModel::new("unit", vec![1.0], 1.0, 10.0).expect("static model");
    let y = DVector::from_vec(input.values.clone());
    let (values, experiment) = match direction {
        MapDirection::PeriodicToScale => {
            let (_, u) = covariance::circulant_eigensystem(&unit, n)?;
            let z = u.transpose() * y / TWO_PI.sqrt();
            (z.iter().cloned().collect(), Experiment::Scale)
        }
        MapDirection::ScaleToPeriodic => {
            let (_, u) = covariance::circulant_eigensystem(&unit, n)?;
            let w = u * y * TWO_PI.sqrt();
            (w.iter().cloned().collect(), Experiment::Periodic)
        }
        MapDirection::Localize { companion, class, beta } => {
            let companion = companion.ok_or_else(|| {
                LabError::Argument("localize requires a companion path to estimate the center".into())
            })?;
            let schedule = crate::estimate::compute_schedule(
                companion.n() | 1, // schedules require odd n
                class.alpha,
                beta,
            )?;
            let raw = crate::estimate::series_estimator(companion, &schedule)?;
            let center = crate::estimate::project_to_class(&raw, &class, beta)?;
            let k = covariance::localization_kernel(&center, n)?;
            let moved = k * y;
            (moved.iter().cloned().collect(), input.experiment)
        }
    };
    Ok(SamplePath { values, experiment, model_name: input.model_name.clone(), seed: input.seed })
}

/// The circulant covariance of a transformed path (2π)^{-1/2}U_nᵀỹ in
/// closed form: (2π)^{-1}·U_nᵀ(Γ_n - Γ̃_n)U_n measures the elementwise gap
/// between the stationary and periodic z-vectors.
pub fn z_cov_gap(model: &SpectralModel, n: usize) -> Result<DMatrix<f64>> {
    let (_, u) = covariance::circulant_eigensystem(model, n)?;
    let gamma = covariance::toeplitz(model, n).mat;
    let tilde = covariance::circulant(model, n)?.mat;
    Ok(u.transpose() * (gamma - tilde) * u / TWO_PI)
}

/// Empirical covariance matrix of repeated draws produced by `gen`.
pub fn empirical_covariance(trials: usize, dim: usize, mut gen: impl FnMut(u64) -> Vec<f64>) -> DMatrix<f64> {
    let mut acc = DMatrix::zeros(dim, dim);
    for t in 0..trials {
        let x = gen(t as u64);
        for a in 0..dim {
            for b in a..dim {
                acc[(a, b)] += x[a] * x[b];
            }
        }
    }
    for a in 0..dim {
        for b in 0..a {
            acc[(a, b)] = acc[(b, a)];
        }
        for b in a..dim {
            acc[(a, b)] /= trials as f64;
            if b > a {
                acc[(b, a)] = acc[(a, b)];
            }
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covariance::frobenius_gap;

    fn ma1() -> SpectralModel {
        SpectralModel::new("ma1", vec![1.25, 0.5], 1.0, 30.0).unwrap()
    }

    fn wn() -> SpectralModel {
        SpectralModel::new("wn", vec![1.0], 1.0, 10.0).unwrap()
    }

    #[test]
    fn stationary_determinism_and_moments() {
        let a = sample_stationary(&ma1(), 500, 9).unwrap();
        let b = sample_stationary(&ma1(), 500, 9).unwrap();
        assert_eq!(a.values, b.values);
        let c = sample_stationary(&ma1(), 500, 10).unwrap();
        assert_ne!(a.values, c.values);
        // n = 1e5 moment checks
        let long = sample_stationary(&ma1(), 100_000, 1).unwrap();
        let n = long.n();
        let var = long.values.iter().map(|y| y * y).sum::<f64>() / n as f64;
        assert!((var - 1.25).abs() < 0.025, "var {var}");
        let lag1 = long.values.windows(2).map(|w| w[0] * w[1]).sum::<f64>() / (n - 1) as f64;
        assert!((lag1 - 0.5).abs() < 0.02, "lag1 {lag1}");
    }

    #[test]
    fn stationary_rejects_invalid_model() {
        let bad = SpectralModel::new("bad", vec![1.0, 0.9], 1.0, 30.0).unwrap();
        assert!(matches!(sample_stationary(&bad, 64, 0), Err(LabError::Conditioning(_))));
    }

    #[test]
    fn periodic_law_matches_circulant() {
        // empirical covariance over many draws approaches Γ̃_n
        let n = 11;
        let trials = 20_000;
        let cov = empirical_covariance(trials, n, |t| {
            sample_periodic(&ma1(), n, 1000 + t).unwrap().values
        });
        let target = covariance::circulant(&ma1(), n).unwrap().mat;
        let err = frobenius_gap(&cov, &target) / (n as f64);
        assert!(err < 0.05, "mean entry error {err}");
        assert!(matches!(sample_periodic(&ma1(), 10, 0), Err(LabError::Parity(_))));
    }

    #[test]
    fn scale_sampler_matches_cells() {
        let m = ma1();
        let n = 16;
        let cells = m.cell_averages(n);
        let trials = 10_000;
        let mut ratio = 0.0;
        for t in 0..trials {
            let z = sample_scale(&m, n, t).unwrap();
            for (j, c) in cells.iter().enumerate() {
                ratio += z.values[j] * z.values[j] / c;
            }
        }
        ratio /= (trials * n as u64) as f64;
        assert!((ratio - 1.0).abs() < 0.03, "chi-square mean {ratio}");
        let fixed_a = sample_scale(&m, n, 3).unwrap();
        let fixed_b = sample_scale(&m, n, 3).unwrap();
        assert_eq!(fixed_a.values, fixed_b.values);
    }

    #[test]
    fn whitenoise_drift_and_noise() {
        let c = 2.0;
        let model = SpectralModel::new("const", vec![TWO_PI * c], 1.0, 30.0).unwrap();
        let n = 50;
        let m = 16 * n;
        let dw = TWO_PI / m as f64;
        // average increments over trials: drift log(c)·Δω
        let trials = 4000;
        let mut mean = vec![0.0; m];
        let mut var = 0.0;
        for t in 0..trials {
            let seed = crate::rng::CounterRng::substream(77, t).next_u64();
            let p = sample_whitenoise_model(&model, n, m, seed).unwrap();
            for (i, v) in p.values.iter().enumerate() {
                mean[i] += v;
            }
            let drift = c.ln() * dw;
            var += p.values.iter().map(|v| (v - drift) * (v - drift)).sum::<f64>() / m as f64;
        }
        let drift = c.ln() * dw;
        let worst = mean
            .iter()
            .map(|s| (s / trials as f64 - drift).abs())
            .fold(0.0f64, f64::max);
        // noise std per increment is 2√π·n^{-1/2}·√Δω ≈ 0.044, so the
        // 4000-trial mean has standard error ≈ 7e-4; allow five of those
        // for the maximum over the m cells
        assert!(worst < 3.5e-3, "drift error {worst}");
        var /= trials as f64;
        let want = 4.0 * PI * dw / n as f64;
        assert!((var / want - 1.0).abs() < 0.05, "variance ratio {}", var / want);
        assert!(sample_whitenoise_model(&model, 50, 10, 0).is_err());
    }

    #[test]
    fn periodogram_hand_values() {
        let path = SamplePath {
            values: vec![0.0; 5],
            experiment: Experiment::Stationary,
            model_name: "zero".into(),
            seed: 0,
        };
        let p = dft_periodogram(&path).unwrap();
        assert!(p.ordinates.iter().all(|&i| i == 0.0));
        let ones = SamplePath {
            values: vec![1.0, 1.0, 1.0],
            experiment: Experiment::Stationary,
            model_name: "ones".into(),
            seed: 0,
        };
        let p3 = dft_periodogram(&ones).unwrap();
        assert!((p3.ordinates[0] - 9.0 / (6.0 * PI)).abs() < 1e-12);
        assert!(p3.ordinates[1].abs() < 1e-12);
        let even = SamplePath { values: vec![1.0; 4], ..ones };
        assert!(matches!(dft_periodogram(&even), Err(LabError::Parity(_))));
    }

    #[test]
    fn periodogram_parseval() {
        for seed in 0..5u64 {
            let path = sample_stationary(&ma1(), 101, seed).unwrap();
            let p = dft_periodogram(&path).unwrap();
            let full_sum = p.ordinates[0] + 2.0 * p.ordinates[1..].iter().sum::<f64>();
            let energy = path.values.iter().map(|y| y * y).sum::<f64>() / TWO_PI;
            assert!((full_sum - energy).abs() < 1e-10 * energy.max(1.0), "seed {seed}");
        }
    }

    #[test]
    fn equivalence_map_round_trip() {
        let path = sample_periodic(&ma1(), 31, 5).unwrap();
        let z = apply_equivalence_map(MapDirection::PeriodicToScale, &path).unwrap();
        let back = apply_equivalence_map(MapDirection::ScaleToPeriodic, &z).unwrap();
        let err: f64 = path
            .values
            .iter()
            .zip(&back.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-12, "round-trip error {err}");
    }

    #[test]
    fn z_cov_gap_shrinks_with_n() {
        let g33 = z_cov_gap(&ma1(), 33).unwrap();
        let g129 = z_cov_gap(&ma1(), 129).unwrap();
        let max33 = g33.iter().map(|x| x.abs()).fold(0.0f64, f64::max);
        let max129 = g129.iter().map(|x| x.abs()).fold(0.0f64, f64::max);
        assert!(max129 < max33, "{max33} -> {max129}");
    }

    #[test]
    fn localize_on_white_noise_is_identity() {
        let path = sample_stationary(&wn(), 31, 2).unwrap();
        let companion = sample_stationary(&wn(), 513, 3).unwrap();
        let class = crate::spectra::SmoothnessClassSpec::new(1.0, 10.0, 1024).unwrap();
        let moved = apply_equivalence_map(
            MapDirection::Localize { companion: Some(&companion), class, beta: 0.75 },
            &path,
        )
        .unwrap();
        // the estimated center is near white noise, so the kernel is near I
        let err: f64 = path
            .values
            .iter()
            .zip(&moved.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(err < 0.5, "localize drift {err}");
        let class2 = crate::spectra::SmoothnessClassSpec::new(1.0, 10.0, 1024).unwrap();
        assert!(matches!(
            apply_equivalence_map(
                MapDirection::Localize { companion: None, class: class2, beta: 0.75 },
                &path
            ),
            Err(LabError::Argument(_))
        ));
    }
}
