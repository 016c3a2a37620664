//! The approximate resolvent kernel and the functions `u`, `v`, `U` that feed
//! the general correction matrix.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::quadrature::circle_quadrature;
use super::{AsymptoticsError, QuadratureConfig};
use crate::lacunary::LacunarySpec;
use crate::symbol::Symbol;
use crate::wiener_hopf::WienerHopfFactorization;

const TWO_PI_I: Complex64 = Complex64::new(0.0, 2.0 * PI);

/// `z^{e}` for a real exponent, through the principal logarithm.
fn real_power(z: Complex64, e: f64) -> Complex64 {
    (z.ln() * e).exp()
}

/// `R_0^{(0)}(z, s)`: the leading part of the resolvent kernel, including the
/// `(f(z) - 1) / 2i pi` prefactor. Half-integer powers use principal branches.
pub fn resolvent_kernel_r00(
    fact: &WienerHopfFactorization,
    symbol: &Symbol,
    size: usize,
    z: Complex64,
    s: Complex64,
) -> Result<Complex64, AsymptoticsError> {
    let distance = (z - s).norm();
    if distance <= 1e-12 * z.norm().max(1.0) {
        return Err(AsymptoticsError::CoincidentPoints(distance));
    }
    let half = size as f64 / 2.0;
    let log_ratio = z.ln() - s.ln();
    let forward = (log_ratio * half).exp();
    let backward = (-log_ratio * half).exp();
    let plus = |x: Complex64| fact.interior_exponent(x).exp();
    let minus = |x: Complex64| fact.exterior_exponent(x).exp();
    let bracket = forward * plus(s) / minus(z) - backward * plus(z) / minus(s);
    Ok((symbol.eval(z) - 1.0) / TWO_PI_I * bracket / (z - s))
}

/// Line rows/columns (`I`) or row rows/columns (`II`) of the general matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    I,
    II,
}

/// The functions `u_{A;a}`, `v_{B;b}` and `U_{A;a}` for one lacunary spec.
///
/// `phi` and `psi` are the same functions with the `z^{N/2}` factors stripped
/// (`u = z^{N/2} phi / 2i pi`, `v = z^{-N/2-1} psi`); the matrix builder only
/// ever uses these integer-power forms.
pub struct PerturbationBasis<'a> {
    fact: &'a WienerHopfFactorization,
    spec: &'a LacunarySpec,
}

impl<'a> PerturbationBasis<'a> {
    pub fn new(fact: &'a WienerHopfFactorization, spec: &'a LacunarySpec) -> Self {
        Self { fact, spec }
    }

    pub fn count(&self, family: Family) -> usize {
        match family {
            Family::I => self.spec.lines().len(),
            Family::II => self.spec.rows().len(),
        }
    }

    fn symbol_at(&self, z: Complex64) -> Complex64 {
        (self.fact.exterior_exponent(z) - self.fact.interior_exponent(z)).exp()
    }

    pub fn phi(&self, family: Family, a: usize, s: Complex64) -> Complex64 {
        let f = self.symbol_at(s);
        match family {
            Family::I => {
                let line = self.spec.lines()[a];
                let tail = if a < self.spec.overlap() { 1.0.into() } else { f };
                f * s.powi(-line.replacement as i32) - s.powi(-line.index as i32) * tail
            }
            Family::II => (f - 1.0) * s.powi(-self.spec.rows()[a].index as i32),
        }
    }

    pub fn psi(&self, family: Family, b: usize, z: Complex64) -> Complex64 {
        let shared = b < self.spec.overlap();
        match family {
            Family::I if shared => z.powi(self.spec.rows()[b].replacement as i32),
            Family::I => z.powi(self.spec.lines()[b].index as i32),
            Family::II if shared => -z.powi(self.spec.rows()[b].index as i32),
            Family::II => z.powi(self.spec.rows()[b].replacement as i32),
        }
    }

    pub fn u(&self, family: Family, a: usize, z: Complex64) -> Complex64 {
        real_power(z, self.spec.size() as f64 / 2.0) * self.phi(family, a, z) / TWO_PI_I
    }

    pub fn v(&self, family: Family, b: usize, z: Complex64) -> Complex64 {
        real_power(z, -(self.spec.size() as f64) / 2.0 - 1.0) * self.psi(family, b, z)
    }

    /// `U = (I - R_0^{(0)})[u]` at `z`, with the `s` integral taken over
    /// `|s| = s_radius` (the kernel is regular on the diagonal, so any circle
    /// inside the annulus gives the same value).
    pub fn big_u(
        &self,
        symbol: &Symbol,
        family: Family,
        a: usize,
        z: Complex64,
        s_radius: f64,
        config: &QuadratureConfig,
    ) -> Result<Complex64, AsymptoticsError> {
        let size = self.spec.size();
        let integral = circle_quadrature(
            |s| {
                resolvent_kernel_r00(self.fact, symbol, size, z, s)
                    .map(|k| k * self.u(family, a, s))
                    .unwrap_or(Complex64::new(f64::NAN, f64::NAN))
            },
            s_radius,
            config,
        )?;
        Ok(self.u(family, a, z) - TWO_PI_I * integral)
    }

    /// Constant part of the `(A, a; B, b)` entry.
    pub fn delta(&self, row: Family, a: usize, col: Family, b: usize) -> f64 {
        let c = self.spec.overlap();
        match (row, col) {
            (Family::I, Family::I) if a == b && b >= c => 1.0,
            (Family::II, Family::II) if a == b && b < c => 1.0,
            _ => 0.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lacunary::{validate_and_normalize, Lacuna};
    use crate::symbol::{build_symbol_from_log_coeffs, CoefficientTable};
    use crate::wiener_hopf::factorize;

    fn tridiagonal() -> Symbol {
        let pairs = (1..=60i32).flat_map(|n| {
            [
                (n as i64, Complex64::new(-(-0.4f64).powi(n) / n as f64, 0.0)),
                (-(n as i64), Complex64::new(-(-0.3f64).powi(n) / n as f64, 0.0)),
            ]
        });
        build_symbol_from_log_coeffs(&CoefficientTable::from_pairs(pairs), 1e-16).unwrap()
    }

    #[test]
    fn identity_kernel_vanishes() {
        let s = Symbol::identity(1e-14);
        let f = crate::wiener_hopf::factorize(&s);
        let z = Complex64::from_polar(1.0, 0.3);
        let w = Complex64::from_polar(0.9, 1.1);
        assert_eq!(resolvent_kernel_r00(&f, &s, 8, z, w).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn kernel_against_closed_form_factors() {
        let sym = tridiagonal();
        let fact = factorize(&sym);
        let z = Complex64::from_polar(1.0, 0.4);
        let s = Complex64::from_polar(0.95, -1.3);
        let n = 8;
        let plus = |x: Complex64| 1.0 / (1.0 + 0.4 * x);
        let minus = |x: Complex64| 1.0 + 0.3 / x;
        let f = |x: Complex64| (1.0 + 0.4 * x) * (1.0 + 0.3 / x);
        let expected = (f(z) - 1.0) / TWO_PI_I
            * ((z / s).powi(4) * plus(s) / minus(z) - (s / z).powi(4) * plus(z) / minus(s))
            / (z - s);
        let got = resolvent_kernel_r00(&fact, &sym, n, z, s).unwrap();
        assert!((got - expected).norm() < 1e-13 * expected.norm().max(1.0));
    }

    #[test]
    fn kernel_is_regular_near_the_diagonal() {
        let sym = tridiagonal();
        let fact = factorize(&sym);
        let z = Complex64::from_polar(1.0, 0.2);
        let near = resolvent_kernel_r00(&fact, &sym, 8, z, z * Complex64::from_polar(1.0, 1e-6))
            .unwrap();
        let nearer = resolvent_kernel_r00(&fact, &sym, 8, z, z * Complex64::from_polar(1.0, 1e-7))
            .unwrap();
        assert!(near.is_finite() && (near - nearer).norm() < 1e-5);
        assert!(matches!(
            resolvent_kernel_r00(&fact, &sym, 8, z, z),
            Err(AsymptoticsError::CoincidentPoints(_))
        ));
    }

    #[test]
    fn v_selectors_follow_the_overlap() {
        let sym = tridiagonal();
        let fact = factorize(&sym);
        let spec =
            validate_and_normalize(&[Lacuna::new(2, 0), Lacuna::new(5, -3)], &[Lacuna::new(2, -1), Lacuna::new(7, 12)], 10)
                .unwrap();
        let basis = PerturbationBasis::new(&fact, &spec);
        let z = Complex64::from_polar(1.0, 0.7);
        let zh = |e: i32| z.powi(e);
        assert!((basis.psi(Family::I, 0, z) - zh(-1)).norm() < 1e-15);
        assert!((basis.psi(Family::I, 1, z) - zh(5)).norm() < 1e-15);
        assert!((basis.psi(Family::II, 0, z) + zh(2)).norm() < 1e-15);
        assert!((basis.psi(Family::II, 1, z) - zh(12)).norm() < 1e-13);
        assert!((basis.v(Family::I, 1, z) - zh(5 - 5 - 1)).norm() < 1e-13);
        assert_eq!(basis.delta(Family::I, 1, Family::I, 1), 1.0);
        assert_eq!(basis.delta(Family::I, 0, Family::I, 0), 0.0);
        assert_eq!(basis.delta(Family::II, 0, Family::II, 0), 1.0);
        assert_eq!(basis.delta(Family::II, 1, Family::II, 1), 0.0);
    }

    #[test]
    fn without_rows_u_matches_the_line_case() {
        let sym = tridiagonal();
        let fact = factorize(&sym);
        let spec = validate_and_normalize(&[Lacuna::new(3, -1)], &[], 8).unwrap();
        let basis = PerturbationBasis::new(&fact, &spec);
        let z = Complex64::from_polar(1.0, 0.9);
        let expected = sym.eval(z) * (z.powi(4 + 1) - z.powi(4 - 3)) / TWO_PI_I;
        assert!((basis.u(Family::I, 0, z) - expected).norm() < 1e-13);
    }
}
