//! Lacunary Toeplitz determinants `det[c_{ell_a - m_b}[f]]` for symbols `f`
//! holomorphic on an annulus around the unit circle.
//!
//! The crate provides a brute-force reference ([`lacunary::exact_ratio`]) and
//! the large-`N` asymptotic representations as small correction determinants
//! built from contour integrals of the Wiener–Hopf factor of `f`.

pub mod asymptotics;
pub mod lacunary;
pub mod linalg;
pub mod symbol;
pub mod wiener_hopf;

pub use asymptotics::{
    asymptotic_ratio, corollary_matrices, epsilon_block_matrices, general_correction_matrix,
    line_correction_matrix, method_by_name, method_names, szego_log_asymptotics,
    AsymptoticRatio, AsymptoticsError, CorrectionKind, CorrectionMatrix, QuadratureConfig, QuadratureReport,
    RatioMethod,
};
pub use lacunary::{
    exact_ratio, split_edge_anchored, validate_and_normalize, EdgePart, ExactRatio, Lacuna,
    LacunaryError, LacunarySpec, LacunarySplit,
};
pub use linalg::{log_determinant, ComplexMatrix, LinalgError, LogDet};
pub use symbol::{
    build_symbol_from_log_coeffs, build_symbol_from_samples, fourier_coefficients, Annulus,
    CoefficientTable, Symbol, SymbolError,
};
pub use wiener_hopf::{factorize, verify_jump, WienerHopfError, WienerHopfFactorization};
