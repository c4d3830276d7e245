//! Certification of the analysis constants behind the rounding guarantees:
//! the averaged-cost curve and its maximum, dual certificates for the
//! window-restricted profile bounds, the golden-ratio recurrence for the
//! per-window constants, the lower-bound density construction, and
//! randomized audits that stress the certified inequalities.

pub mod audit;
pub mod duals;
pub mod limitation;
pub mod mubar;
pub mod recurrence;

pub use audit::{random_config_audit, random_profile_audit, AuditReport};
pub use duals::{clique_depth_value, dual_value, window5_certificate, window6_certificate, DualFamily};
pub use limitation::{cumulative_f, cumulative_tf, density_f, limitation_gamma, limitation_grid_min};
pub use mubar::{mu, mu_bar, mu_bar_max, stationarity_factor, MuBarMethod, MuParams};
pub use recurrence::{recurrence_table, Q5, RecurrenceTable};

use crate::rational::{format_decimal, format_f64_sig, rat, Rat};
use serde::Serialize;
use std::error::Error;
use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum AnalysisError {
    LevelSumNotOne { level: usize },
    OverlappingLevelIntervals { level: usize },
    NegativeWeight { index: usize },
    IndexOutOfRange { clique: usize, index: usize },
    BadParameter { detail: String },
}

impl fmt::Display for AnalysisError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnalysisError::LevelSumNotOne { level } => {
                write!(f, "dual weights on level {level} do not sum to one")
            }
            AnalysisError::OverlappingLevelIntervals { level } => {
                write!(f, "intervals on level {level} are not pairwise disjoint")
            }
            AnalysisError::NegativeWeight { index } => {
                write!(f, "dual weight {index} is negative")
            }
            AnalysisError::IndexOutOfRange { clique, index } => {
                write!(f, "clique {clique} names member {index} beyond the weight vector")
            }
            AnalysisError::BadParameter { detail } => write!(f, "{detail}"),
        }
    }
}

impl Error for AnalysisError {}

/// One certified inequality: a named quantity, the bound it must respect,
/// and whether it does. Field order keeps the serialized keys alphabetical.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRow {
    pub bound: String,
    pub check: String,
    pub pass: bool,
    pub value: String,
}

impl CheckRow {
    /// Exact-rational comparison `value <= bound`.
    pub fn rat_le(check: &str, value: &Rat, bound: &Rat) -> CheckRow {
        CheckRow {
            bound: format_decimal(bound, 12),
            check: check.to_string(),
            pass: value <= bound,
            value: format_decimal(value, 12),
        }
    }

    /// Exact-rational equality `value == bound`.
    pub fn rat_eq(check: &str, value: &Rat, bound: &Rat) -> CheckRow {
        CheckRow {
            bound: format_decimal(bound, 12),
            check: check.to_string(),
            pass: value == bound,
            value: format_decimal(value, 12),
        }
    }

    /// Float comparison against a band `[lo, hi)`.
    pub fn float_band(check: &str, value: f64, lo: f64, hi: f64) -> CheckRow {
        CheckRow {
            bound: format!("[{}, {})", format_f64_sig(lo, 12), format_f64_sig(hi, 12)),
            check: check.to_string(),
            pass: value >= lo && value < hi,
            value: format_f64_sig(value, 12),
        }
    }

    /// Float upper bound `value <= bound`.
    pub fn float_le(check: &str, value: f64, bound: f64) -> CheckRow {
        CheckRow {
            bound: format_f64_sig(bound, 12),
            check: check.to_string(),
            pass: value <= bound,
            value: format_f64_sig(value, 12),
        }
    }
}

/// A bundle of named checks; passes only if every row does.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateReport {
    pub rows: Vec<CheckRow>,
    pub title: String,
}

impl CertificateReport {
    pub fn new(title: &str) -> CertificateReport {
        CertificateReport {
            rows: Vec::new(),
            title: title.to_string(),
        }
    }

    pub fn pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }
}

/// Compose a per-window profile bound into an unrestricted one: a window
/// guarantee of `piece_bound` on length-`window` pieces yields
/// `piece_bound + 2/window` globally.
pub fn compose_window_bound(piece_bound: &Rat, window: u32) -> Result<Rat, AnalysisError> {
    if window < 2 {
        return Err(AnalysisError::BadParameter {
            detail: format!("window must be at least 2, got {window}"),
        });
    }
    Ok(piece_bound + rat(2, i64::from(window)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    #[test]
    fn window_composition_matches_known_constants() {
        assert_eq!(
            compose_window_bound(&rat(19, 12), 5).unwrap(),
            rat(119, 60)
        );
        assert_eq!(compose_window_bound(&rat(8, 5), 6).unwrap(), rat(29, 15));
        assert_eq!(compose_window_bound(&int(1), 2).unwrap(), int(2));
    }

    #[test]
    fn window_composition_rejects_degenerate_windows() {
        assert!(compose_window_bound(&int(1), 1).is_err());
        assert!(compose_window_bound(&int(1), 0).is_err());
    }

    #[test]
    fn check_rows_format_both_sides() {
        let row = CheckRow::rat_le("demo", &rat(19, 12), &rat(8, 5));
        assert!(row.pass);
        assert_eq!(row.value, "1.58333333333");
        let eq = CheckRow::rat_eq("demo-eq", &rat(1, 2), &rat(1, 2));
        assert!(eq.pass);
        let band = CheckRow::float_band("demo-band", 1.9347, 1.934, 1.935);
        assert!(band.pass);
        let mut report = CertificateReport::new("demo");
        report.rows.push(CheckRow::float_le("demo-le", 2.0, 1.0));
        assert!(!report.pass());
    }
}
