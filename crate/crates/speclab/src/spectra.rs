//! Spectral densities represented by finite symmetric autocovariance sequences.
//!
//! A model stores the lags `γ(0..=K)`; the induced density is the even trig
//! polynomial `f(ω) = (1/2π)(γ(0) + 2 Σ_k γ(k) cos kω)` on `[-π, π]`.
//! All function-space quantities (Sobolev norms, truncated series, cell
//! averages, the Besov modulus machinery and class membership) are computed
//! from the coefficients, in closed form wherever one exists.

use crate::error::{LabError, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub const TWO_PI: f64 = 2.0 * PI;

/// Band-limited spectral density with smoothness metadata.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectralModel {
    pub name: String,
    /// Lags γ(0), γ(1), ..., γ(K); γ(-k) = γ(k) is implied.
    pub autocov: Vec<f64>,
    /// Smoothness index α > 1/2 of the class the model is meant to live in.
    pub alpha: f64,
    /// Class constant M > 0.
    #[serde(rename = "M")]
    pub big_m: f64,
}

/// Membership criteria for the class Σ_{α,M}: Sobolev ball ∩ lower bound.
#[derive(Debug, Clone)]
pub struct SmoothnessClassSpec {
    pub alpha: f64,
    pub big_m: f64,
    /// Resolution of the positivity check grid.
    pub grid_points: usize,
}

impl SmoothnessClassSpec {
    pub fn new(alpha: f64, big_m: f64, grid_points: usize) -> Result<Self> {
        if !(alpha > 0.5) {
            return Err(LabError::Domain(format!("alpha must exceed 1/2, got {alpha}")));
        }
        if !(big_m > 0.0) {
            return Err(LabError::Domain(format!("M must be positive, got {big_m}")));
        }
        if grid_points < 1024 {
            return Err(LabError::Argument(format!(
                "positivity grid needs at least 1024 points, got {grid_points}"
            )));
        }
        Ok(SmoothnessClassSpec { alpha, big_m, grid_points })
    }
}

/// Outcome of a class membership test, with named violations.
#[derive(Debug, Clone)]
pub struct MembershipVerdict {
    pub member: bool,
    pub violations: Vec<String>,
}

impl SpectralModel {
    pub fn new(name: impl Into<String>, autocov: Vec<f64>, alpha: f64, big_m: f64) -> Result<Self> {
        if autocov.is_empty() {
            return Err(LabError::Argument("autocovariance sequence must be nonempty".into()));
        }
        if autocov.iter().any(|g| !g.is_finite()) {
            return Err(LabError::Argument("autocovariances must be finite".into()));
        }
        if !(alpha > 0.5) {
            return Err(LabError::Domain(format!("alpha must exceed 1/2, got {alpha}")));
        }
        if !(big_m > 0.0) {
            return Err(LabError::Domain(format!("M must be positive, got {big_m}")));
        }
        Ok(SpectralModel { name: name.into(), autocov, alpha, big_m })
    }

    /// Largest stored lag K.
    pub fn max_lag(&self) -> usize {
        self.autocov.len() - 1
    }

    /// γ(k) with the symmetric/zero extension.
    pub fn gamma(&self, k: i64) -> f64 {
        let k = k.unsigned_abs() as usize;
        self.autocov.get(k).copied().unwrap_or(0.0)
    }

    /// f(ω) = (1/2π)(γ(0) + 2 Σ γ(k) cos kω) for |ω| ≤ π.
    pub fn eval_density(&self, omega: f64) -> Result<f64> {
        if !(omega.abs() <= PI + 1e-15) {
            return Err(LabError::Domain(format!("omega {omega} outside [-pi, pi]")));
        }
        let mut s = self.autocov[0];
        for (k, g) in self.autocov.iter().enumerate().skip(1) {
            s += 2.0 * g * (k as f64 * omega).cos();
        }
        Ok(s / TWO_PI)
    }

    /// (seminorm², norm²) for the index-s Sobolev scale:
    /// seminorm² = 2 Σ_{k≥1} k^{2s} γ(k)², norm² = γ(0)² + seminorm².
    pub fn sobolev_norm(&self, s: f64) -> Result<(f64, f64)> {
        if s < 0.0 {
            return Err(LabError::Domain(format!("Sobolev index must be >= 0, got {s}")));
        }
        let semi: f64 = self
            .autocov
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, g)| 2.0 * (k as f64).powf(2.0 * s) * g * g)
            .sum();
        Ok((semi, self.autocov[0] * self.autocov[0] + semi))
    }

    /// Truncated Fourier series: keep only lags |k| ≤ (n-1)/2.
    pub fn truncated_series(&self, n: usize) -> Result<SpectralModel> {
        if n == 0 || n % 2 == 0 {
            return Err(LabError::Parity(format!("truncation size must be odd and >= 1, got {n}")));
        }
        let keep = (n - 1) / 2;
        if self.max_lag() <= keep {
            return Ok(self.clone());
        }
        let autocov = self.autocov[..=keep].to_vec();
        SpectralModel::new(format!("{}~trunc{}", self.name, n), autocov, self.alpha, self.big_m)
    }

    /// Local cell averages J_j = n ∫_{(j-1)/n}^{j/n} f(2πx - π) dx, j = 1..n,
    /// in closed form: every cosine integrates analytically.
    pub fn cell_averages(&self, n: usize) -> Vec<f64> {
        assert!(n >= 1, "cell count must be >= 1");
        let mut out = Vec::with_capacity(n);
        for j in 1..=n {
            let wa = TWO_PI * (j - 1) as f64 / n as f64 - PI;
            let wb = TWO_PI * j as f64 / n as f64 - PI;
            let mut val = self.autocov[0] / TWO_PI;
            for (k, g) in self.autocov.iter().enumerate().skip(1) {
                let k = k as f64;
                val += n as f64 * g * ((k * wb).sin() - (k * wa).sin()) / (TWO_PI * PI * k);
            }
            out.push(val);
        }
        out
    }

    /// Midpoints of the n cells, mapped back to [-π, π].
    pub fn cell_midpoints(n: usize) -> Vec<f64> {
        (1..=n)
            .map(|j| TWO_PI * (j as f64 - 0.5) / n as f64 - PI)
            .collect()
    }

    /// Uniform inclusive grid of f values on [-π, π].
    pub fn density_grid(&self, points: usize) -> Vec<f64> {
        assert!(points >= 2);
        (0..points)
            .map(|i| {
                let w = -PI + TWO_PI * i as f64 / (points - 1) as f64;
                self.eval_density(w).expect("grid point inside domain")
            })
            .collect()
    }

    /// Minimum of f over the inclusive uniform grid, with its witness point.
    pub fn min_on_grid(&self, points: usize) -> (f64, f64) {
        let mut best = (0.0, f64::INFINITY);
        for i in 0..points {
            let w = -PI + TWO_PI * i as f64 / (points - 1) as f64;
            let v = self.eval_density(w).expect("grid point inside domain");
            if v < best.1 {
                best = (w, v);
            }
        }
        best
    }

    /// Grid sup-distance between two densities.
    pub fn sup_distance(&self, other: &SpectralModel, points: usize) -> f64 {
        (0..points)
            .map(|i| {
                let w = -PI + TWO_PI * i as f64 / (points - 1) as f64;
                (self.eval_density(w).unwrap() - other.eval_density(w).unwrap()).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Model scaled by c (density and autocovariances scale together).
    pub fn scaled(&self, c: f64) -> SpectralModel {
        SpectralModel {
            name: format!("{}*{c}", self.name),
            autocov: self.autocov.iter().map(|g| c * g).collect(),
            alpha: self.alpha,
            big_m: self.big_m,
        }
    }

    /// Coefficientwise difference (this - other), padded with zeros.
    pub fn difference(&self, other: &SpectralModel) -> SpectralModel {
        let len = self.autocov.len().max(other.autocov.len());
        let autocov = (0..len)
            .map(|k| self.gamma(k as i64) - other.gamma(k as i64))
            .collect();
        SpectralModel {
            name: format!("{}-{}", self.name, other.name),
            autocov,
            alpha: self.alpha,
            big_m: self.big_m,
        }
    }

    /// Besov B_{2,2}^α seminorm of x ↦ f(2πx - π) on [0,1], for 0 < α < 1.
    ///
    /// The modulus of smoothness ω(f,t)_2 is computed on a log-spaced t-grid
    /// in [2^-16, 1] from a fine evaluation grid; the defining integral
    /// ∫ (ω(f,t)/t^α)² dt/t is done by the trapezoid rule on that grid and
    /// the exact tail ω(f,1)²/(2α) is added for t > 1.  Both grids are
    /// doubled until the result changes by less than 0.5%.
    pub fn besov_seminorm_22(&self, alpha: f64) -> Result<f64> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(LabError::Domain(format!("Besov index must be in (0,1), got {alpha}")));
        }
        let mut grid = 8192usize;
        let mut tnodes = 64usize;
        let mut prev = self.besov_seminorm_once(alpha, grid, tnodes);
        for _ in 0..4 {
            grid *= 2;
            tnodes *= 2;
            let next = self.besov_seminorm_once(alpha, grid, tnodes);
            let scale = prev.abs().max(next.abs()).max(1e-300);
            if (next - prev).abs() / scale < 5e-3 {
                return Ok(next);
            }
            prev = next;
        }
        Ok(prev)
    }

    fn besov_seminorm_once(&self, alpha: f64, grid: usize, tnodes: usize) -> f64 {
        // g on the inclusive grid x_i = i/grid.
        let g: Vec<f64> = (0..=grid)
            .map(|i| {
                let x = i as f64 / grid as f64;
                self.eval_density(TWO_PI * x - PI).unwrap()
            })
            .collect();
        // Squared increment integral for every grid-aligned shift d, then the
        // running maximum gives the squared modulus at t = d/grid.
        let mut mod_sq = vec![0.0f64; grid + 1];
        let mut running = 0.0f64;
        for d in 1..=grid {
            let m = grid - d; // integrate over [0, 1-h] with h = d/grid
            let mut s = 0.0;
            for i in 0..=m {
                let diff = g[i] - g[i + d];
                let w = if i == 0 || i == m { 0.5 } else { 1.0 };
                s += w * diff * diff;
            }
            s /= grid as f64;
            running = running.max(s);
            mod_sq[d] = running;
        }
        let modulus_sq = |t: f64| -> f64 {
            let d = t * grid as f64;
            if d <= 1.0 {
                // below grid resolution the increment scales linearly in h
                return mod_sq[1] * d * d;
            }
            let lo = d.floor() as usize;
            if lo >= grid {
                return mod_sq[grid];
            }
            let frac = d - lo as f64;
            mod_sq[lo] + frac * (mod_sq[lo + 1] - mod_sq[lo])
        };
        // trapezoid of (ω(t)/t^α)² dt/t on log-spaced nodes in [2^-16, 1]
        let t_lo: f64 = 2f64.powi(-16);
        let ts: Vec<f64> = (0..tnodes)
            .map(|i| t_lo * (1.0 / t_lo).powf(i as f64 / (tnodes - 1) as f64))
            .collect();
        let integrand: Vec<f64> =
            ts.iter().map(|&t| modulus_sq(t) / t.powf(2.0 * alpha + 1.0)).collect();
        let mut integral = 0.0;
        for i in 1..tnodes {
            integral += 0.5 * (integrand[i - 1] + integrand[i]) * (ts[i] - ts[i - 1]);
        }
        // exact tail for t > 1: modulus constant at ω(f,1)
        integral += mod_sq[grid] / (2.0 * alpha);
        integral.sqrt()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn from_json(s: &str) -> Result<SpectralModel> {
        let m: SpectralModel =
            serde_json::from_str(s).map_err(|e| LabError::Parse(format!("model json: {e}")))?;
        SpectralModel::new(m.name, m.autocov, m.alpha, m.big_m)
    }

    /// Parse a preset string, e.g. "ma1:theta=0.5,var=1" or "whitenoise:var=1"
    /// or "ar1:phi=0.6,var=1,tail=1e-10"; keys `alpha` and `M` are optional
    /// (defaults 1.0 and 30.0).  "ma1-in-sigma" is shorthand for the MA(1)
    /// model γ=(1.25, 0.5) with α=1, M=30.
    pub fn from_preset(spec: &str) -> Result<SpectralModel> {
        let (family, rest) = match spec.split_once(':') {
            Some((f, r)) => (f, r),
            None => (spec, ""),
        };
        let mut kv = std::collections::BTreeMap::new();
        if !rest.is_empty() {
            for part in rest.split(',') {
                let (k, v) = part
                    .split_once('=')
                    .ok_or_else(|| LabError::Parse(format!("malformed preset token '{part}'")))?;
                let val: f64 = v
                    .parse()
                    .map_err(|_| LabError::Parse(format!("non-numeric preset value '{v}'")))?;
                kv.insert(k.trim().to_string(), val);
            }
        }
        let get = |key: &str, default: f64| kv.get(key).copied().unwrap_or(default);
        let alpha = get("alpha", 1.0);
        let big_m = get("M", 30.0);
        match family {
            "whitenoise" => {
                let var = get("var", 1.0);
                SpectralModel::new(format!("whitenoise:var={var}"), vec![var], alpha, big_m)
            }
            "ma1" => {
                let theta = get("theta", 0.5);
                let var = get("var", 1.0);
                SpectralModel::new(
                    format!("ma1:theta={theta},var={var}"),
                    vec![var * (1.0 + theta * theta), var * theta],
                    alpha,
                    big_m,
                )
            }
            "ar1" => {
                let phi = get("phi", 0.6);
                if !(phi.abs() < 1.0) {
                    return Err(LabError::Parse(format!("ar1 needs |phi| < 1, got {phi}")));
                }
                let var = get("var", 1.0);
                let tail = get("tail", 1e-10);
                let g0 = var / (1.0 - phi * phi);
                // smallest K with tail seminorm 2 Σ_{k>K} k^{2α} γ(k)² < tail
                let mut autocov = vec![g0];
                let mut k = 1usize;
                loop {
                    let gk = g0 * phi.powi(k as i32);
                    autocov.push(gk);
                    // geometric-decay remainder bound on the tail seminorm
                    let r = phi.abs().powi(k as i32 + 1);
                    let tail_bound = 2.0
                        * g0
                        * g0
                        * r
                        * r
                        * ((k + 1) as f64).powf(2.0 * alpha)
                        * 2.0
                        / (1.0 - phi * phi);
                    if tail_bound < tail || k > 10_000 {
                        break;
                    }
                    k += 1;
                }
                SpectralModel::new(
                    format!("ar1:phi={phi},var={var}[K={}]", autocov.len() - 1),
                    autocov,
                    alpha,
                    big_m,
                )
            }
            "ma1-in-sigma" => {
                SpectralModel::new("ma1-in-sigma", vec![1.25, 0.5], 1.0, 30.0)
            }
            other => Err(LabError::Parse(format!("unknown preset family '{other}'"))),
        }
    }
}

/// Membership test for Σ_{α,M}: ‖f‖²_{2,α} ≤ M and min f ≥ 1/M on the grid.
pub fn class_membership(model: &SpectralModel, spec: &SmoothnessClassSpec) -> MembershipVerdict {
    const TOL: f64 = 1e-10;
    let mut violations = Vec::new();
    let (_, norm_sq) = model.sobolev_norm(spec.alpha).expect("alpha validated");
    if norm_sq > spec.big_m + TOL {
        violations.push(format!(
            "sobolev norm violated: ||f||^2_{{2,{}}} = {:.6} > M = {}",
            spec.alpha, norm_sq, spec.big_m
        ));
    }
    let (witness, min_f) = model.min_on_grid(spec.grid_points);
    if min_f < 1.0 / spec.big_m - TOL {
        violations.push(format!(
            "positivity violated: min f = {:.6} at omega = {:.6} < 1/M = {:.6}",
            min_f,
            witness,
            1.0 / spec.big_m
        ));
    }
    MembershipVerdict { member: violations.is_empty(), violations }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ma1() -> SpectralModel {
        SpectralModel::new("ma1", vec![1.25, 0.5], 1.0, 30.0).unwrap()
    }

    #[test]
    fn white_noise_density_is_flat() {
        let m = SpectralModel::new("wn", vec![1.0], 1.0, 10.0).unwrap();
        for w in [-PI, -1.0, 0.0, 0.7, PI] {
            assert!((m.eval_density(w).unwrap() - 1.0 / TWO_PI).abs() < 1e-15);
        }
    }

    #[test]
    fn ma1_density_values() {
        let m = ma1();
        assert!((m.eval_density(0.0).unwrap() - 2.25 / TWO_PI).abs() < 1e-12);
        assert!((m.eval_density(PI).unwrap() - 0.25 / TWO_PI).abs() < 1e-12);
    }

    #[test]
    fn density_rejects_outside_domain() {
        assert!(matches!(ma1().eval_density(3.5), Err(LabError::Domain(_))));
    }

    #[test]
    fn density_is_even() {
        let m = ma1();
        for i in 0..100 {
            let w = PI * i as f64 / 99.0;
            assert_eq!(m.eval_density(w).unwrap(), m.eval_density(-w).unwrap());
        }
    }

    #[test]
    fn sobolev_norms() {
        let wn = SpectralModel::new("wn", vec![1.0], 1.0, 10.0).unwrap();
        assert_eq!(wn.sobolev_norm(2.0).unwrap(), (0.0, 1.0));
        let (semi, norm) = ma1().sobolev_norm(1.0).unwrap();
        assert!((semi - 0.5).abs() < 1e-15 && (norm - 2.0625).abs() < 1e-15);
        // the single k=1 term is insensitive to the index
        let (semi_h, norm_h) = ma1().sobolev_norm(0.5).unwrap();
        assert!((semi_h - 0.5).abs() < 1e-15 && (norm_h - 2.0625).abs() < 1e-15);
    }

    #[test]
    fn truncation_fixed_point_and_drop() {
        let m = ma1();
        let t = m.truncated_series(5).unwrap();
        assert_eq!(t.autocov, m.autocov);
        let wide = SpectralModel::new("w", vec![1.0, 0.0, 0.3], 1.0, 10.0).unwrap();
        let t3 = wide.truncated_series(3).unwrap();
        assert_eq!(t3.autocov, vec![1.0, 0.0]);
        assert!(matches!(wide.truncated_series(4), Err(LabError::Parity(_))));
        // sup gap attained where cos(2w) = ±1
        let gap = wide.sup_distance(&t3, 4097);
        assert!((gap - 0.6 / TWO_PI).abs() < 1e-6, "gap {gap}");
    }

    #[test]
    fn cell_average_values() {
        let m = ma1();
        let j1 = m.cell_averages(1);
        assert!((j1[0] - 1.25 / TWO_PI).abs() < 1e-14);
        let j2 = m.cell_averages(2);
        assert!((j2[0] - 1.25 / TWO_PI).abs() < 1e-14);
        assert!((j2[1] - 1.25 / TWO_PI).abs() < 1e-14);
        // mean identity at several cell counts
        for n in [1usize, 3, 8, 101, 1024] {
            let js = m.cell_averages(n);
            let mean = js.iter().sum::<f64>() / n as f64;
            assert!((mean - m.autocov[0] / TWO_PI).abs() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn cell_average_refinement_consistency() {
        let m = SpectralModel::new("w", vec![1.0, 0.4, -0.2, 0.1], 1.0, 10.0).unwrap();
        for n in [4usize, 16, 64] {
            let coarse = m.cell_averages(n);
            let fine = m.cell_averages(2 * n);
            for j in 0..n {
                let pair = 0.5 * (fine[2 * j] + fine[2 * j + 1]);
                assert!((coarse[j] - pair).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn besov_seminorm_basics() {
        let constant = SpectralModel::new("c", vec![2.0], 1.0, 10.0).unwrap();
        assert!(constant.besov_seminorm_22(0.7).unwrap() < 1e-12);
        let m = ma1();
        let s1 = m.besov_seminorm_22(0.7).unwrap();
        let s3 = m.scaled(3.0).besov_seminorm_22(0.7).unwrap();
        assert!((s3 / s1 - 3.0).abs() < 1e-6, "homogeneity: {s1} {s3}");
        assert!(matches!(m.besov_seminorm_22(1.5), Err(LabError::Domain(_))));
    }

    #[test]
    fn besov_seminorm_matches_dense_oracle() {
        // independent oracle: direct non-grid-aligned shifts, denser t sampling
        let m = ma1();
        let alpha = 0.7;
        let grid = 20_000usize;
        let g = |x: f64| m.eval_density(TWO_PI * x - PI).unwrap();
        let increment = |h: f64| {
            let pts = 8000usize;
            let mut s = 0.0;
            let span = 1.0 - h;
            for i in 0..=pts {
                let x = span * i as f64 / pts as f64;
                let d = g(x) - g(x + h);
                let w = if i == 0 || i == pts { 0.5 } else { 1.0 };
                s += w * d * d;
            }
            s * span / pts as f64
        };
        let _ = grid;
        let t_lo: f64 = 2f64.powi(-16);
        let tnodes = 96usize;
        let ts: Vec<f64> = (0..tnodes)
            .map(|i| t_lo * (1.0 / t_lo).powf(i as f64 / (tnodes - 1) as f64))
            .collect();
        let mut running: f64 = 0.0;
        let mut vals = Vec::new();
        for &t in &ts {
            running = running.max(increment(t));
            vals.push(running / t.powf(2.0 * alpha + 1.0));
        }
        let mut integral = 0.0;
        for i in 1..tnodes {
            integral += 0.5 * (vals[i - 1] + vals[i]) * (ts[i] - ts[i - 1]);
        }
        integral += running / (2.0 * alpha);
        let oracle = integral.sqrt();
        let ours = m.besov_seminorm_22(alpha).unwrap();
        assert!(
            (ours - oracle).abs() / oracle < 0.01,
            "ours {ours} oracle {oracle}"
        );
    }

    #[test]
    fn membership_examples() {
        let wn = SpectralModel::new("wn", vec![1.0], 1.0, 10.0).unwrap();
        let spec10 = SmoothnessClassSpec::new(1.0, 10.0, 2048).unwrap();
        assert!(class_membership(&wn, &spec10).member);
        let spec2 = SmoothnessClassSpec::new(1.0, 2.0, 2048).unwrap();
        let v = class_membership(&wn, &spec2);
        assert!(!v.member);
        assert!(v.violations[0].contains("positivity"));
        let m = ma1();
        assert!(!class_membership(&m, &spec10).member);
        let spec30 = SmoothnessClassSpec::new(1.0, 30.0, 2048).unwrap();
        assert!(class_membership(&m, &spec30).member);
    }

    #[test]
    fn preset_parsing() {
        let m = SpectralModel::from_preset("ma1:theta=0.5,var=1").unwrap();
        assert_eq!(m.autocov, vec![1.25, 0.5]);
        let wn = SpectralModel::from_preset("whitenoise:var=2").unwrap();
        assert_eq!(wn.autocov, vec![2.0]);
        let ar = SpectralModel::from_preset("ar1:phi=0.6,var=1,tail=1e-10").unwrap();
        assert!(ar.max_lag() > 10);
        assert!((ar.autocov[0] - 1.0 / (1.0 - 0.36)).abs() < 1e-12);
        assert!(ar.name.contains("K="));
        assert!(SpectralModel::from_preset("nope:x=1").is_err());
        assert!(SpectralModel::from_preset("ma1:theta").is_err());
    }

    #[test]
    fn json_round_trip() {
        let m = ma1();
        let j = m.to_json();
        let back = SpectralModel::from_json(&j).unwrap();
        assert_eq!(back.autocov, m.autocov);
        assert_eq!(back.big_m, m.big_m);
    }
}
