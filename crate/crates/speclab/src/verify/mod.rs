//! Check orchestration: a catalog of named numerical bound checks, parameter
//! sweeps, and report assembly.
//!
//! Every check is a deterministic function of its parameter map (including
//! the seed) and produces a [`VerificationReport`]: a list of rows, each a
//! grid label with a measured value and, for inequality rows, a bound.  A
//! report passes when every bounded row satisfies
//! `measured <= bound * (1 + tol)` with the tolerance recorded in the
//! parameters.  Rows without bounds carry trend/diagnostic values only; a
//! report made solely of such rows gets the `info` verdict.

pub mod checks;

use crate::error::{LabError, Result};
use crate::rng::stable_hash;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

pub use checks::bracket_chain_report;

/// Outcome of a check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Info,
}

/// One measured quantity at one grid point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportRow {
    pub grid: String,
    pub measured: f64,
    pub bound: Option<f64>,
    pub margin: Option<f64>,
}

impl ReportRow {
    /// Row carrying a value with no bound (trend/diagnostic).
    pub fn info(grid: impl Into<String>, measured: f64) -> Self {
        ReportRow { grid: grid.into(), measured, bound: None, margin: None }
    }

    /// Row asserting measured <= bound; margin = bound - measured.
    pub fn bounded(grid: impl Into<String>, measured: f64, bound: f64) -> Self {
        ReportRow { grid: grid.into(), measured, bound: Some(bound), margin: Some(bound - measured) }
    }
}

/// Full result of one check run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check_id: String,
    pub params: BTreeMap<String, String>,
    pub rows: Vec<ReportRow>,
    pub verdict: Verdict,
    /// Wall-clock time; excluded from serialized reports so reruns with the
    /// same seed are byte-identical.
    #[serde(skip)]
    pub runtime_seconds: f64,
}

impl VerificationReport {
    /// Assemble a report and derive the verdict from the rows.  The relative
    /// tolerance is read from params["tol"] (defaults to 0).
    pub fn evaluate(
        check_id: impl Into<String>,
        params: BTreeMap<String, String>,
        rows: Vec<ReportRow>,
    ) -> VerificationReport {
        let tol: f64 = params.get("tol").and_then(|s| s.parse().ok()).unwrap_or(0.0);
        let mut any_bound = false;
        let mut all_ok = true;
        for row in &rows {
            if let Some(b) = row.bound {
                any_bound = true;
                if !(row.measured <= b + tol * b.abs()) {
                    all_ok = false;
                }
            }
        }
        let verdict = if !any_bound {
            Verdict::Info
        } else if all_ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        VerificationReport { check_id: check_id.into(), params, rows, verdict, runtime_seconds: 0.0 }
    }

    pub fn passed(&self) -> bool {
        self.verdict != Verdict::Fail
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Flat CSV rows: check_id,grid,measured,bound,margin,verdict.
    pub fn to_csv_rows(&self) -> String {
        let verdict = match self.verdict {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Info => "info",
        };
        let mut out = String::new();
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                self.check_id,
                row.grid,
                crate::fmt_g17(row.measured),
                row.bound.map(crate::fmt_g17).unwrap_or_default(),
                row.margin.map(crate::fmt_g17).unwrap_or_default(),
                verdict
            ));
        }
        out
    }
}

/// Catalog entry for one named check.
#[derive(Debug, Clone, Copy)]
pub struct CheckInfo {
    pub id: &'static str,
    pub module: &'static str,
    pub description: &'static str,
}

/// The full check catalog, in stable run order.
pub const CATALOG: &[CheckInfo] = &[
    CheckInfo {
        id: "hellinger-frobenius-bracket",
        module: "distances",
        description: "h\u{b2} between N(0,A) and N(0,A+\u{3b5}E) stays within a 10M\u{b2} factor of \u{2016}A-B\u{2016}\u{b2} for eigenvalue-banded A",
    },
    CheckInfo {
        id: "appendix-diagonalization-bounds",
        module: "distances",
        description: "M\u{207b}\u{b2}\u{2016}A-B\u{2016}\u{b2} \u{2264} \u{2016}I-\u{39b}\u{303}\u{2016}\u{b2} \u{2264} M\u{b2}\u{2016}A-B\u{2016}\u{b2} via simultaneous diagonalization, plus the small-gap h\u{b2} \u{2248} \u{2016}I-\u{39b}\u{303}\u{2016}\u{b2}/8 expansion",
    },
    CheckInfo {
        id: "circulant-gap-equality",
        module: "covariance",
        description: "band-limited models: \u{2016}\u{393}_n-\u{393}\u{303}_n\u{2016}\u{b2} equals the 1/2-index Sobolev seminorm exactly",
    },
    CheckInfo {
        id: "circulant-gap-upper",
        module: "covariance",
        description: "general models: \u{2016}\u{393}_n-\u{393}\u{303}_n\u{2016}\u{b2} \u{2264} 2|f|\u{b2}_{2,1/2}, and the same bound for differences of model pairs",
    },
    CheckInfo {
        id: "fails-negative-result",
        module: "covariance",
        description: "negative control: h\u{b2}(\u{393}_n,\u{393}\u{303}_n) does not vanish as n grows when |f|\u{b2}_{2,1/2} is held at 0.3",
    },
    CheckInfo {
        id: "upper-bracket-bound",
        module: "covariance",
        description: "\u{2016}\u{393}_n-\u{393}\u{303}_{n,m}\u{2016}\u{b2} \u{2264} 4(m-n+1)^{1-2\u{3b1}}|f|\u{b2}_{2,\u{3b1}} over the (n,m) sweep; h\u{b2} non-increasing in m-n",
    },
    CheckInfo {
        id: "midpoints-rate",
        module: "spectra",
        description: "\u{3a3}_j (J_{j,n} - f\u{303}_n(midpoint_j))\u{b2} \u{b7} n^{2\u{3b1}-1} stays in a 4\u{d7} band across a doubling n-grid",
    },
    CheckInfo {
        id: "equivalence-map-roundtrip",
        module: "simulate",
        description: "periodic\u{2192}scale\u{2192}periodic round trip is the identity to 1e-12",
    },
    CheckInfo {
        id: "localization-rate",
        module: "simulate",
        description: "h\u{b2}(K\u{393}_m(f)K\u{1d40}, \u{393}\u{303}_m(f)) shrinks by \u{2265}1.8\u{d7} per halving of the perturbation, and vanishes at the center",
    },
    CheckInfo {
        id: "splitting-frobenius-bound",
        module: "covariance",
        description: "\u{2016}joined-independent\u{2016}\u{b2} \u{2264} (r+1)^{1-2\u{3b1}}|f|\u{b2}_{2,\u{3b1}} for the sample-splitting covariances",
    },
    CheckInfo {
        id: "estimator-variance-bound",
        module: "estimate",
        description: "Monte-Carlo Var \u{3b3}\u{302}_n(k) \u{2264} 1.05\u{b7}(5/(n-k))\u{3a3}\u{3b3}\u{b2}(j), with unbiasedness side rows",
    },
    CheckInfo {
        id: "estimator-rate-slope",
        module: "estimate",
        description: "log-log slope of the series-estimator risk on stationary data meets the rate exponent",
    },
    CheckInfo {
        id: "estimator-rate-slope-periodic",
        module: "estimate",
        description: "log-log slope of the series-estimator risk on periodic data meets the rate exponent",
    },
    CheckInfo {
        id: "projection-contraction",
        module: "estimate",
        description: "class projection does not increase the \u{3b2}-norm distance to members",
    },
    CheckInfo {
        id: "whittle-residual-bounded",
        module: "estimate",
        description: "median |L_n + n\u{b7}L^W + n\u{b7}log 2\u{3c0}| does not grow with n (10\u{d7} cap between n=129 and n=1025)",
    },
    CheckInfo {
        id: "periodogram-independence",
        module: "simulate",
        description: "periodogram ordinates at distinct frequencies are nearly uncorrelated and I/f is near Exp(1)",
    },
    CheckInfo {
        id: "gamma-closed-forms",
        module: "distances",
        description: "closed-form Gamma Hellinger distances match the quadrature oracle to 1e-8 on 200 random parameter rows",
    },
    CheckInfo {
        id: "gamma-gaussian-sufficiency-identity",
        module: "distances",
        description: "H\u{b2}(N(0,s),N(0,t)) = H\u{b2}(\u{393}(1/2,2s),\u{393}(1/2,2t)) to 1e-10 on 100 random pairs",
    },
    CheckInfo {
        id: "scale-merge-hellinger",
        module: "distances",
        description: "product Hellinger between doubled coarse-cell scale models and the refined scale model decreases in n",
    },
    CheckInfo {
        id: "gamma-count-change-bound",
        module: "distances",
        description: "count-change Gamma product h\u{b2} \u{b7} m/r\u{b2} stays in a 4\u{d7} band across the n-grid",
    },
    CheckInfo {
        id: "sqrt-perturbation",
        module: "covariance",
        description: "\u{2016}A^{1/2}-B^{1/2}\u{2016}\u{b7}\u{3bb}_min(A^{1/2}+B^{1/2}) \u{2264} \u{2016}A-B\u{2016} on 100 random PSD pairs",
    },
    CheckInfo {
        id: "besov-piecewise-constant-4",
        module: "spectra",
        description: "\u{2016}f-f\u{304}_n\u{2016}\u{b2} \u{2264} 4n^{-2\u{3b1}}|f|\u{b2}_{B22} with the explicit constant 4, exact left side",
    },
    CheckInfo {
        id: "besov-sup-rate",
        module: "spectra",
        description: "sup-norm gap to the piecewise-constant approximation scales as n^{1/2-\u{3b1}} (4\u{d7} band)",
    },
    CheckInfo {
        id: "sobolev-besov-embedding-rate",
        module: "spectra",
        description: "Besov/Sobolev seminorm ratio is stable across random models (embedding with a bounded constant)",
    },
];

/// Stable catalog listing.
pub fn list_checks() -> &'static [CheckInfo] {
    CATALOG
}

/// Run one check by id with parameter overrides (seed, sizes, ...).
pub fn run_check(
    check_id: &str,
    overrides: &BTreeMap<String, String>,
) -> Result<VerificationReport> {
    if !CATALOG.iter().any(|c| c.id == check_id) {
        let ids: Vec<&str> = CATALOG.iter().map(|c| c.id).collect();
        return Err(LabError::Lookup(format!(
            "unknown check '{check_id}'; valid checks: {}",
            ids.join(", ")
        )));
    }
    let start = std::time::Instant::now();
    let mut report = match check_id {
        "hellinger-frobenius-bracket" => checks::hellinger_frobenius_bracket(overrides),
        "appendix-diagonalization-bounds" => checks::appendix_diagonalization_bounds(overrides),
        "circulant-gap-equality" => checks::circulant_gap_equality(overrides),
        "circulant-gap-upper" => checks::circulant_gap_upper(overrides),
        "fails-negative-result" => checks::fails_negative_result(overrides),
        "upper-bracket-bound" => checks::upper_bracket_bound(overrides),
        "midpoints-rate" => checks::midpoints_rate(overrides),
        "equivalence-map-roundtrip" => checks::equivalence_map_roundtrip(overrides),
        "localization-rate" => checks::localization_rate(overrides),
        "splitting-frobenius-bound" => checks::splitting_frobenius_bound(overrides),
        "estimator-variance-bound" => checks::estimator_variance_bound(overrides),
        "estimator-rate-slope" => checks::estimator_rate_slope(overrides),
        "estimator-rate-slope-periodic" => checks::estimator_rate_slope_periodic(overrides),
        "projection-contraction" => checks::projection_contraction(overrides),
        "whittle-residual-bounded" => checks::whittle_residual_bounded(overrides),
        "periodogram-independence" => checks::periodogram_independence(overrides),
        "gamma-closed-forms" => checks::gamma_closed_forms(overrides),
        "gamma-gaussian-sufficiency-identity" => checks::gamma_gaussian_sufficiency_identity(overrides),
        "scale-merge-hellinger" => checks::scale_merge_hellinger(overrides),
        "gamma-count-change-bound" => checks::gamma_count_change_bound(overrides),
        "sqrt-perturbation" => checks::sqrt_perturbation(overrides),
        "besov-piecewise-constant-4" => checks::besov_piecewise_constant_4(overrides),
        "besov-sup-rate" => checks::besov_sup_rate(overrides),
        "sobolev-besov-embedding-rate" => checks::sobolev_besov_embedding_rate(overrides),
        _ => unreachable!("catalog membership checked above"),
    }?;
    report.runtime_seconds = start.elapsed().as_secs_f64();
    Ok(report)
}

/// Run the whole catalog concurrently.  Each check draws its randomness from
/// the substream `master_seed ^ hash(check_id)`, so the merged result is
/// independent of scheduling and identical to sequential execution.
pub fn run_all(master_seed: u64) -> Result<Vec<VerificationReport>> {
    let results: Vec<Result<VerificationReport>> = CATALOG
        .par_iter()
        .map(|info| {
            let mut overrides = BTreeMap::new();
            overrides.insert("seed".to_string(), (master_seed ^ stable_hash(info.id)).to_string());
            run_check(info.id, &overrides)
        })
        .collect();
    results.into_iter().collect()
}

/// Serialize a batch of reports as a JSON array.
pub fn reports_to_json(reports: &[VerificationReport]) -> String {
    serde_json::to_string_pretty(reports).expect("reports serialize")
}

/// Flatten a batch of reports to CSV with a header row.
pub fn reports_to_csv(reports: &[VerificationReport]) -> String {
    let mut out = String::from("check_id,grid,measured,bound,margin,verdict\n");
    for r in reports {
        out.push_str(&r.to_csv_rows());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_is_complete_and_stable() {
        assert!(CATALOG.len() >= 16);
        let mut ids: Vec<&str> = CATALOG.iter().map(|c| c.id).collect();
        assert!(ids.contains(&"hellinger-frobenius-bracket"));
        assert!(ids.contains(&"localization-rate"));
        ids.sort_unstable();
        ids.dedup();
        assert_eq!(ids.len(), CATALOG.len(), "duplicate check ids");
    }

    #[test]
    fn unknown_check_is_a_lookup_error() {
        let err = run_check("no-such-check", &BTreeMap::new()).unwrap_err();
        match err {
            LabError::Lookup(msg) => assert!(msg.contains("circulant-gap-equality")),
            other => panic!("expected lookup error, got {other:?}"),
        }
    }

    #[test]
    fn verdict_rules() {
        let rows = vec![ReportRow::bounded("a", 1.0, 2.0), ReportRow::info("b", 5.0)];
        let r = VerificationReport::evaluate("x", BTreeMap::new(), rows);
        assert_eq!(r.verdict, Verdict::Pass);
        let rows = vec![ReportRow::bounded("a", 3.0, 2.0)];
        let r = VerificationReport::evaluate("x", BTreeMap::new(), rows);
        assert_eq!(r.verdict, Verdict::Fail);
        let rows = vec![ReportRow::info("a", 3.0)];
        let r = VerificationReport::evaluate("x", BTreeMap::new(), rows);
        assert_eq!(r.verdict, Verdict::Info);
        // relative tolerance rescues a marginal overshoot
        let mut params = BTreeMap::new();
        params.insert("tol".to_string(), "0.05".to_string());
        let rows = vec![ReportRow::bounded("a", 2.04, 2.0)];
        let r = VerificationReport::evaluate("x", params, rows);
        assert_eq!(r.verdict, Verdict::Pass);
    }

    #[test]
    fn csv_and_json_shapes() {
        let rows = vec![ReportRow::bounded("n=3", 0.5, 1.0)];
        let r = VerificationReport::evaluate("demo", BTreeMap::new(), rows);
        let json = r.to_json();
        assert!(json.contains("\"check_id\""));
        assert!(json.contains("\"verdict\": \"pass\""));
        assert!(!json.contains("runtime"));
        let csv = reports_to_csv(&[r]);
        assert!(csv.starts_with("check_id,grid,measured,bound,margin,verdict\n"));
        assert!(csv.contains("demo,n=3,0.5,1,0.5,pass"));
    }
}
