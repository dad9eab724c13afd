//! Numerical laboratory for stationary Gaussian spectral experiments:
//! spectral densities from autocovariances, Toeplitz/circulant covariance
//! matrices, exact Hellinger distances, seeded samplers, estimators, and a
//! catalog of executable bound checks.

pub mod covariance;
pub mod distances;
pub mod error;
pub mod estimate;
pub mod rng;
pub mod simulate;
pub mod spectra;
pub mod verify;

pub use error::{LabError, Result};

/// Shortest round-trippable decimal rendering with up to 17 significant
/// digits (the C "%.17g" convention used by all CSV/text output).
pub fn fmt_g17(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    // try increasing precision until the value round-trips
    for prec in 1..=17 {
        let s = format!("{:.*e}", prec - 1, x);
        if s.parse::<f64>() == Ok(x) {
            return tidy_g(&s, x);
        }
    }
    format!("{x:e}")
}

/// Convert Rust's `1.25e0` style into the compact %g form: plain decimal for
/// moderate exponents, `e`-notation otherwise.
fn tidy_g(sci: &str, x: f64) -> String {
    let exp = x.abs().log10().floor() as i32;
    if (-5..17).contains(&exp) {
        // plain decimal round-trips at 17 significant digits in this range
        let digits = (17 - 1 - exp).clamp(0, 40) as usize;
        let mut s = format!("{x:.digits$}");
        if s.contains('.') {
            while s.ends_with('0') {
                s.pop();
            }
            if s.ends_with('.') {
                s.pop();
            }
        }
        if s.parse::<f64>() == Ok(x) {
            return s;
        }
    }
    sci.to_string()
}

#[cfg(test)]
mod tests {
    use super::fmt_g17;

    #[test]
    fn g17_round_trips() {
        for &x in &[
            0.0,
            1.0,
            -1.0,
            0.5,
            1.0 / 3.0,
            2.0_f64.powi(-60),
            1e300,
            -2.5e-9,
            std::f64::consts::PI,
            f64::MIN_POSITIVE,
        ] {
            let s = fmt_g17(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "render {s}");
        }
        assert_eq!(fmt_g17(1.25), "1.25");
        assert_eq!(fmt_g17(0.0), "0");
        assert_eq!(fmt_g17(-4.0), "-4");
    }
}
