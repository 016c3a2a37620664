//! Large-`N` representations of lacunary Toeplitz determinant ratios as small
//! correction determinants, plus the strong Szegő baseline.
//!
//! Every contour integral is a trapezoidal sum on circles. Powers of the
//! integration variable are evaluated as an exact unit phase times a radius
//! factor kept in log form, so `z^{-N}` on a small circle never overflows.

mod epsilon;
mod general;
mod kernel;
mod line;
mod method;
mod quadrature;
mod szego;

use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

use crate::lacunary::LacunaryError;
use crate::linalg::{condition_estimate, log_determinant, ComplexMatrix, LinalgError};
use crate::symbol::Annulus;
use crate::wiener_hopf::WienerHopfError;

pub use epsilon::epsilon_block_matrices;
pub use general::general_correction_matrix;
pub use kernel::{resolvent_kernel_r00, Family, PerturbationBasis};
pub use line::{corollary_matrices, line_correction_matrix};
pub use method::{
    asymptotic_ratio, method_by_name, method_names, AsymptoticRatio, RatioMethod,
};
pub use quadrature::{circle_quadrature, double_circle_quadrature};
pub use szego::szego_log_asymptotics;

/// Correction determinants with a condition estimate above this are flagged.
pub const SINGULAR_CONDITION: f64 = 1e12;

/// Smallest default `eta_z`.
pub const ETA_Z_MIN: f64 = 0.5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AsymptoticsError {
    #[error("contour radii coincide (|z| = |s| = {0})")]
    EqualRadii(f64),
    #[error("kernel evaluated at coincident points (|z - s| = {0:e})")]
    CoincidentPoints(f64),
    #[error("radii eta_z = {eta_z}, eta_s = {eta_s} violate inner radius {inner} < eta_s < eta_z < 1")]
    RadiiOutsideAnnulus { eta_z: f64, eta_s: f64, inner: f64 },
    #[error("invalid quadrature configuration: {0}")]
    InvalidConfig(String),
    #[error("quadrature did not converge: relative change {change:e} at {nodes} nodes{}", entry_suffix(.entry))]
    NoConvergence {
        value: Complex64,
        change: f64,
        nodes: usize,
        entry: Option<(usize, usize)>,
    },
    #[error("method {method} is not applicable: {reason}")]
    NotApplicable { method: &'static str, reason: String },
    #[error("unknown method {0}")]
    UnknownMethod(String),
    #[error(transparent)]
    Lacunary(#[from] LacunaryError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    WienerHopf(#[from] WienerHopfError),
}

fn entry_suffix(entry: &Option<(usize, usize)>) -> String {
    match entry {
        Some((i, j)) => format!(" (worst entry ({i}, {j}))"),
        None => String::new(),
    }
}

/// Quadrature settings. Radii left as `None` are derived from the symbol's
/// annulus by [`QuadratureConfig::radii`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub eta_z: Option<f64>,
    pub eta_s: Option<f64>,
    /// Initial points per circle; a power of two.
    pub nodes: usize,
    pub tol: f64,
    pub max_doublings: u32,
    /// Distance of the inner contour from the unit circle in the general
    /// construction; `None` picks it from `N` and the annulus.
    pub general_gap: Option<f64>,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            eta_z: None,
            eta_s: None,
            nodes: 64,
            tol: 1e-12,
            max_doublings: 8,
            general_gap: None,
        }
    }
}

/// Resolved contour radii.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Radii {
    pub eta_z: f64,
    pub eta_s: f64,
    /// `max(r_minus, 1/r_plus)` of the conservative annulus.
    pub inner: f64,
}

impl Radii {
    /// Offset `delta` of the side-limit contours `1 -+ delta`.
    pub fn side_offset(&self) -> f64 {
        (1.0 - self.eta_z) / 4.0
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<(), AsymptoticsError> {
        if self.nodes < 4 || !self.nodes.is_power_of_two() {
            return Err(AsymptoticsError::InvalidConfig(format!(
                "nodes must be a power of two >= 4 (got {})",
                self.nodes
            )));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(AsymptoticsError::InvalidConfig(format!(
                "tol must be positive (got {})",
                self.tol
            )));
        }
        if self.nodes.checked_shl(self.max_doublings).is_none() || self.max_doublings > 24 {
            return Err(AsymptoticsError::InvalidConfig(format!(
                "max_doublings too large ({})",
                self.max_doublings
            )));
        }
        Ok(())
    }

    pub fn radii(&self, annulus: Annulus) -> Result<Radii, AsymptoticsError> {
        self.validate()?;
        let inner = annulus.inner_safety_radius();
        let eta_z = self
            .eta_z
            .unwrap_or_else(|| ETA_Z_MIN.max((1.0 + 2.0 * inner) / 3.0));
        let eta_s = self.eta_s.unwrap_or((eta_z + inner) / 2.0);
        if !(eta_s > inner && eta_s > 0.0 && eta_s < eta_z && eta_z < 1.0) {
            return Err(AsymptoticsError::RadiiOutsideAnnulus {
                eta_z,
                eta_s,
                inner,
            });
        }
        Ok(Radii {
            eta_z,
            eta_s,
            inner,
        })
    }

    /// Gap `1 - |s|` for the general construction.
    pub fn general_gap(
        &self,
        annulus: Annulus,
        size: usize,
        max_index: i64,
    ) -> Result<f64, AsymptoticsError> {
        self.validate()?;
        let inner = annulus.inner_safety_radius();
        let gap = self.general_gap.unwrap_or_else(|| {
            let reach = (size as f64).max(max_index as f64).max(1.0);
            ((1.0 - inner) / 2.0).min(1.0 / reach)
        });
        if !(gap > 0.0 && 1.0 - gap > inner) {
            return Err(AsymptoticsError::RadiiOutsideAnnulus {
                eta_z: 1.0,
                eta_s: 1.0 - gap,
                inner,
            });
        }
        Ok(gap)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CorrectionKind {
    LineM,
    CorollaryPlus,
    CorollaryMinus,
    GeneralN,
    EpsilonPlus,
    EpsilonMinus,
}

impl fmt::Display for CorrectionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CorrectionKind::LineM => "LINE_M",
            CorrectionKind::CorollaryPlus => "COROLLARY_PLUS",
            CorrectionKind::CorollaryMinus => "COROLLARY_MINUS",
            CorrectionKind::GeneralN => "GENERAL_N",
            CorrectionKind::EpsilonPlus => "EPSILON_PLUS",
            CorrectionKind::EpsilonMinus => "EPSILON_MINUS",
        })
    }
}

/// Nodes per circle at the accepted level and the relative change from the
/// previous level.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct QuadratureReport {
    pub nodes: usize,
    pub change: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrectionMatrix {
    pub kind: CorrectionKind,
    pub matrix: ComplexMatrix,
    /// 1-norm condition estimate; infinite for an exactly singular matrix.
    pub condition: f64,
    pub singular: bool,
    pub quadrature_report: QuadratureReport,
}

impl CorrectionMatrix {
    pub(crate) fn new(
        kind: CorrectionKind,
        matrix: ComplexMatrix,
        quadrature_report: QuadratureReport,
    ) -> Result<Self, AsymptoticsError> {
        let condition = match condition_estimate(&matrix) {
            Ok(c) => c,
            Err(LinalgError::ExactlySingular) => f64::INFINITY,
            Err(e) => return Err(e.into()),
        };
        Ok(Self {
            kind,
            matrix,
            condition,
            singular: !(condition <= SINGULAR_CONDITION),
            quadrature_report,
        })
    }

    pub fn size(&self) -> usize {
        self.matrix.rows()
    }

    pub fn determinant(&self) -> Result<Complex64, AsymptoticsError> {
        if self.size() == 0 {
            return Ok(Complex64::new(1.0, 0.0));
        }
        Ok(log_determinant(&self.matrix)?.value())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_radii_follow_the_annulus() {
        let cfg = QuadratureConfig::default();
        let whole = cfg.radii(Annulus::WHOLE_PLANE).unwrap();
        assert_eq!((whole.eta_z, whole.eta_s), (0.5, 0.25));
        let tight = cfg
            .radii(Annulus {
                inner: 0.7,
                outer: 1.2,
            })
            .unwrap();
        let inner = 1.0 / 1.2;
        assert!((tight.eta_z - (1.0 + 2.0 * inner) / 3.0).abs() < 1e-15);
        assert!(tight.eta_s > inner && tight.eta_s < tight.eta_z);
    }

    #[test]
    fn bad_radii_are_rejected() {
        let annulus = Annulus {
            inner: 0.5,
            outer: 3.0,
        };
        let cfg = QuadratureConfig {
            eta_z: Some(0.8),
            eta_s: Some(0.4),
            ..Default::default()
        };
        assert!(matches!(
            cfg.radii(annulus),
            Err(AsymptoticsError::RadiiOutsideAnnulus { .. })
        ));
        let cfg = QuadratureConfig {
            eta_z: Some(0.6),
            eta_s: Some(0.7),
            ..Default::default()
        };
        assert!(cfg.radii(annulus).is_err());
        let cfg = QuadratureConfig {
            nodes: 100,
            ..Default::default()
        };
        assert!(matches!(cfg.validate(), Err(AsymptoticsError::InvalidConfig(_))));
    }

    #[test]
    fn general_gap_shrinks_with_size() {
        let cfg = QuadratureConfig::default();
        let annulus = Annulus {
            inner: 0.3,
            outer: 2.5,
        };
        assert!((cfg.general_gap(annulus, 64, 65).unwrap() - 1.0 / 65.0).abs() < 1e-15);
        assert!((cfg.general_gap(annulus, 2, 1).unwrap() - 0.3).abs() < 1e-15);
    }
}
