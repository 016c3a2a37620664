//! Scalar Wiener–Hopf factor `alpha` of a symbol.
//!
//! Inside the unit disc `alpha = exp(-sum_{n>=0} c_n[ln f] z^n)`, outside it is
//! `exp(sum_{n>=1} c_{-n}[ln f] z^{-n})`. The constant term lives in the
//! interior branch only, so `alpha -> 1` at infinity and `alpha_- = f alpha_+`
//! on the circle. Both exponents converge through the symbol's annulus, which
//! is what makes the analytic continuations used by the asymptotics available.

use num_complex::Complex64;
use thiserror::Error;

use crate::symbol::{unit_grid, Annulus, Symbol};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WienerHopfError {
    #[error("|z| = {radius} is outside the convergence domain of the {branch} branch")]
    OutsideDomain { radius: f64, branch: &'static str },
}

#[derive(Debug, Clone, PartialEq)]
pub struct WienerHopfFactorization {
    /// `plus_coeffs[n]` multiplies `z^n` in the interior exponent.
    plus_coeffs: Vec<Complex64>,
    /// `minus_coeffs[n-1]` multiplies `z^{-n}` in the exterior exponent.
    minus_coeffs: Vec<Complex64>,
    annulus: Annulus,
}

pub fn factorize(symbol: &Symbol) -> WienerHopfFactorization {
    let k = symbol.order() as i64;
    WienerHopfFactorization {
        plus_coeffs: (0..=k).map(|n| -symbol.log_coeff(n)).collect(),
        minus_coeffs: (1..=k).map(|n| symbol.log_coeff(-n)).collect(),
        annulus: symbol.annulus(),
    }
}

impl WienerHopfFactorization {
    pub fn plus_coeffs(&self) -> &[Complex64] {
        &self.plus_coeffs
    }

    pub fn minus_coeffs(&self) -> &[Complex64] {
        &self.minus_coeffs
    }

    pub fn annulus(&self) -> Annulus {
        self.annulus
    }

    /// Interior exponent `-sum_{n>=0} c_n z^n`, without a domain check.
    pub fn interior_exponent(&self, z: Complex64) -> Complex64 {
        self.plus_coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Exterior exponent `sum_{n>=1} c_{-n} z^{-n}`, without a domain check.
    pub fn exterior_exponent(&self, z: Complex64) -> Complex64 {
        let w = z.inv();
        self.minus_coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * w + c)
            * w
    }

    /// `alpha` on the interior branch (and its continuation up to the outer radius).
    pub fn alpha_interior(&self, z: Complex64) -> Result<Complex64, WienerHopfError> {
        let radius = z.norm();
        if radius >= self.annulus.outer {
            return Err(WienerHopfError::OutsideDomain {
                radius,
                branch: "interior",
            });
        }
        Ok(self.interior_exponent(z).exp())
    }

    /// `alpha` on the exterior branch (and its continuation down to the inner radius).
    pub fn alpha_exterior(&self, z: Complex64) -> Result<Complex64, WienerHopfError> {
        let radius = z.norm();
        if radius <= self.annulus.inner {
            return Err(WienerHopfError::OutsideDomain {
                radius,
                branch: "exterior",
            });
        }
        Ok(self.exterior_exponent(z).exp())
    }
}

/// Largest relative residual `|alpha_-(z) - f(z) alpha_+(z)| / |alpha_-(z)|`
/// over a uniform grid of the unit circle.
pub fn verify_jump(fact: &WienerHopfFactorization, symbol: &Symbol, grid_size: usize) -> f64 {
    unit_grid(grid_size.max(8))
        .map(|z| {
            let minus = fact.exterior_exponent(z).exp();
            let plus = fact.interior_exponent(z).exp();
            (minus - symbol.eval(z) * plus).norm() / minus.norm()
        })
        .fold(0.0, f64::max)
}
