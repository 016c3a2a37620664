//! Named strategies for the asymptotic ratio, selectable at runtime.

use num_complex::Complex64;

use super::{
    epsilon_block_matrices, general_correction_matrix, line_correction_matrix,
    AsymptoticsError, CorrectionMatrix, QuadratureConfig,
};
use crate::lacunary::{split_edge_anchored, LacunaryError, LacunarySpec};
use crate::wiener_hopf::WienerHopfFactorization;

/// Asymptotic value of `det[c_{ell_a - m_b}] / det[c_{a-b}]` and the
/// correction matrices it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticRatio {
    pub value: Complex64,
    /// Name of the method that produced the value (never `"auto"`).
    pub method: &'static str,
    pub matrices: Vec<CorrectionMatrix>,
}

impl AsymptoticRatio {
    fn from_matrices(
        method: &'static str,
        matrices: Vec<CorrectionMatrix>,
    ) -> Result<Self, AsymptoticsError> {
        let mut value = Complex64::new(1.0, 0.0);
        for m in &matrices {
            value *= m.determinant()?;
        }
        Ok(Self {
            value,
            method,
            matrices,
        })
    }

    /// Worst condition estimate over the correction matrices.
    pub fn condition(&self) -> f64 {
        self.matrices.iter().map(|m| m.condition).fold(1.0, f64::max)
    }

    /// Largest node count used by any correction matrix.
    pub fn nodes(&self) -> usize {
        self.matrices
            .iter()
            .map(|m| m.quadrature_report.nodes)
            .max()
            .unwrap_or(0)
    }

    pub fn singular(&self) -> bool {
        self.matrices.iter().any(|m| m.singular)
    }
}

pub trait RatioMethod: Send + Sync {
    fn name(&self) -> &'static str;

    fn evaluate(
        &self,
        fact: &WienerHopfFactorization,
        spec: &LacunarySpec,
        config: &QuadratureConfig,
    ) -> Result<AsymptoticRatio, AsymptoticsError>;
}

struct Line;
struct General;
struct Split;
struct Auto;

impl RatioMethod for Line {
    fn name(&self) -> &'static str {
        "line"
    }

    fn evaluate(
        &self,
        fact: &WienerHopfFactorization,
        spec: &LacunarySpec,
        config: &QuadratureConfig,
    ) -> Result<AsymptoticRatio, AsymptoticsError> {
        let m = line_correction_matrix(fact, spec, config)?;
        AsymptoticRatio::from_matrices(self.name(), vec![m])
    }
}

impl RatioMethod for General {
    fn name(&self) -> &'static str {
        "general"
    }

    fn evaluate(
        &self,
        fact: &WienerHopfFactorization,
        spec: &LacunarySpec,
        config: &QuadratureConfig,
    ) -> Result<AsymptoticRatio, AsymptoticsError> {
        let m = general_correction_matrix(fact, spec, config)?;
        AsymptoticRatio::from_matrices(self.name(), vec![m])
    }
}

impl RatioMethod for Split {
    fn name(&self) -> &'static str {
        "split"
    }

    fn evaluate(
        &self,
        fact: &WienerHopfFactorization,
        spec: &LacunarySpec,
        config: &QuadratureConfig,
    ) -> Result<AsymptoticRatio, AsymptoticsError> {
        let split = split_edge_anchored(spec).map_err(|e| match e {
            LacunaryError::MixedAnchor { .. } => AsymptoticsError::NotApplicable {
                method: "split",
                reason: e.to_string(),
            },
            other => other.into(),
        })?;
        let (plus, minus) = epsilon_block_matrices(fact, &split, config)?;
        AsymptoticRatio::from_matrices(self.name(), vec![plus, minus])
    }
}

impl RatioMethod for Auto {
    fn name(&self) -> &'static str {
        "auto"
    }

    /// Split when the data is edge-anchored, otherwise the general matrix;
    /// the line matrix is the last resort for row-free specs.
    fn evaluate(
        &self,
        fact: &WienerHopfFactorization,
        spec: &LacunarySpec,
        config: &QuadratureConfig,
    ) -> Result<AsymptoticRatio, AsymptoticsError> {
        if split_edge_anchored(spec).is_ok() {
            return Split.evaluate(fact, spec, config);
        }
        match General.evaluate(fact, spec, config) {
            Err(
                e @ (AsymptoticsError::NoConvergence { .. }
                | AsymptoticsError::RadiiOutsideAnnulus { .. }),
            ) => {
                if spec.rows().is_empty() {
                    Line.evaluate(fact, spec, config)
                } else {
                    Err(e)
                }
            }
            other => other,
        }
    }
}

static REGISTRY: [&dyn RatioMethod; 4] = [&Auto, &Line, &General, &Split];

pub fn method_names() -> Vec<&'static str> {
    REGISTRY.iter().map(|m| m.name()).collect()
}

/// Looks a method up by (case-insensitive) name.
pub fn method_by_name(name: &str) -> Result<&'static dyn RatioMethod, AsymptoticsError> {
    REGISTRY
        .iter()
        .copied()
        .find(|m| m.name().eq_ignore_ascii_case(name))
        .ok_or_else(|| AsymptoticsError::UnknownMethod(name.to_string()))
}

pub fn asymptotic_ratio(
    fact: &WienerHopfFactorization,
    spec: &LacunarySpec,
    config: &QuadratureConfig,
    method: &str,
) -> Result<AsymptoticRatio, AsymptoticsError> {
    method_by_name(method)?.evaluate(fact, spec, config)
}
