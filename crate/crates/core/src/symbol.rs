//! Symbols on the unit circle, stored through the Laurent coefficients of
//! their logarithm.
//!
//! Keeping `ln f` rather than `f` means every [`Symbol`] is non-vanishing with
//! zero winding on the circle by construction. Samples supplied by a user are
//! checked for both properties before the logarithm is taken.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use num_complex::Complex64;
use rustfft::FftPlanner;
use thiserror::Error;

/// Coefficients beyond this order are never retained.
pub const MAX_TRUNCATION: usize = 4096;

/// Radii are pulled toward the unit circle by this factor after the decay fit.
pub const ANNULUS_SAFETY: f64 = 0.9;

/// A fitted decay radius at or below this ratio counts as "no decay".
const MIN_DECAY_RATIO: f64 = 1.02;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SymbolError {
    #[error("coefficient table is empty")]
    EmptyCoefficients,
    #[error("coefficients of ln f do not decay geometrically ({0})")]
    NoDecay(String),
    #[error("symbol vanishes on the unit circle (min |f| = {0:e})")]
    VanishingSymbol(f64),
    #[error("symbol has nonzero winding number {0} around the origin")]
    NonzeroWinding(i64),
    #[error("sample grid must be a power of two with at least 8 points (got {0})")]
    InvalidGrid(usize),
    #[error("phase increment between neighbouring samples exceeds pi/2; refine the grid")]
    UnderResolved,
    #[error("tolerance must be positive and finite (got {0})")]
    InvalidTolerance(f64),
    #[error("non-finite value in input")]
    NonFinite,
    #[error("invalid coefficient range [{0}, {1}]")]
    InvalidRange(i64, i64),
}

/// Contiguous Laurent/Fourier coefficients `c_{offset} .. c_{offset + len - 1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTable {
    offset: i64,
    values: Vec<Complex64>,
    certified_tail: Option<f64>,
}

impl CoefficientTable {
    pub fn new(offset: i64, values: Vec<Complex64>) -> Self {
        Self {
            offset,
            values,
            certified_tail: None,
        }
    }

    /// Builds a table from sparse `(n, c_n)` pairs; gaps are filled with zeros.
    /// Later duplicates overwrite earlier ones.
    pub fn from_pairs<I>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (i64, Complex64)>,
    {
        let pairs: Vec<_> = pairs.into_iter().collect();
        let Some(lo) = pairs.iter().map(|p| p.0).min() else {
            return Self::new(0, Vec::new());
        };
        let hi = pairs.iter().map(|p| p.0).max().unwrap_or(lo);
        let mut values = vec![Complex64::new(0.0, 0.0); (hi - lo + 1) as usize];
        for (n, c) in pairs {
            values[(n - lo) as usize] = c;
        }
        Self::new(lo, values)
    }

    /// Declares that every coefficient outside the table is bounded by `bound`.
    pub fn with_certified_tail(mut self, bound: f64) -> Self {
        self.certified_tail = Some(bound);
        self
    }

    pub fn certified_tail(&self) -> Option<f64> {
        self.certified_tail
    }

    pub fn n_min(&self) -> i64 {
        self.offset
    }

    pub fn n_max(&self) -> i64 {
        self.offset + self.values.len() as i64 - 1
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn contains(&self, n: i64) -> bool {
        !self.is_empty() && n >= self.n_min() && n <= self.n_max()
    }

    pub fn get(&self, n: i64) -> Option<Complex64> {
        self.contains(n).then(|| self.values[(n - self.offset) as usize])
    }

    /// Coefficient `n`, or zero when `n` is outside the table.
    pub fn get_or_zero(&self, n: i64) -> Complex64 {
        self.get(n).unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(j, &c)| (self.offset + j as i64, c))
    }
}

/// Open annulus `inner < |z| < outer` on which `ln f` is taken to be holomorphic.
/// `inner == 0` and `outer == inf` mark sides with no detected singularity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Annulus {
    pub inner: f64,
    pub outer: f64,
}

impl Annulus {
    pub const WHOLE_PLANE: Annulus = Annulus {
        inner: 0.0,
        outer: f64::INFINITY,
    };

    pub fn contains(&self, radius: f64) -> bool {
        radius > self.inner && radius < self.outer
    }

    /// Largest radius below one that mirrors onto both edges: `max(inner, 1/outer)`.
    pub fn inner_safety_radius(&self) -> f64 {
        self.inner.max(1.0 / self.outer)
    }

    fn shrunk(raw: Annulus) -> Annulus {
        let inner = if raw.inner > 0.0 {
            1.0 - ANNULUS_SAFETY * (1.0 - raw.inner)
        } else {
            0.0
        };
        let outer = if raw.outer.is_finite() {
            1.0 + ANNULUS_SAFETY * (raw.outer - 1.0)
        } else {
            f64::INFINITY
        };
        Annulus { inner, outer }
    }
}

impl fmt::Display for Annulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.inner, self.outer)
    }
}

/// A holomorphic, non-vanishing, winding-zero symbol, immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct Symbol {
    log_coeffs: CoefficientTable,
    order: usize,
    tol: f64,
    annulus: Annulus,
    fitted: Annulus,
}

impl Symbol {
    /// The constant symbol `f = 1`.
    pub fn identity(tol: f64) -> Self {
        Self {
            log_coeffs: CoefficientTable::new(0, vec![Complex64::new(0.0, 0.0)]),
            order: 0,
            tol,
            annulus: Annulus::WHOLE_PLANE,
            fitted: Annulus::WHOLE_PLANE,
        }
    }

    /// Coefficients of `ln f` over `[-K, K]`.
    pub fn log_coeffs(&self) -> &CoefficientTable {
        &self.log_coeffs
    }

    pub fn log_coeff(&self, n: i64) -> Complex64 {
        self.log_coeffs.get_or_zero(n)
    }

    /// Truncation order `K`.
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// Conservative annulus (after the safety shrink).
    pub fn annulus(&self) -> Annulus {
        self.annulus
    }

    /// Radii straight from the decay fit, before the safety shrink.
    pub fn fitted_annulus(&self) -> Annulus {
        self.fitted
    }

    /// `sum_{n>=1} c_n z^n`, evaluated by Horner.
    pub(crate) fn positive_series(&self, z: Complex64) -> Complex64 {
        horner((1..=self.order as i64).rev().map(|n| self.log_coeff(n)), z) * z
    }

    /// `sum_{n>=1} c_{-n} z^{-n}`.
    pub(crate) fn negative_series(&self, z: Complex64) -> Complex64 {
        let w = z.inv();
        horner((1..=self.order as i64).rev().map(|n| self.log_coeff(-n)), w) * w
    }

    /// `ln f(z)` from the truncated Laurent series.
    pub fn log_eval(&self, z: Complex64) -> Complex64 {
        self.log_coeff(0) + self.positive_series(z) + self.negative_series(z)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.log_eval(z).exp()
    }
}

fn horner<I: Iterator<Item = Complex64>>(coeffs_high_to_low: I, z: Complex64) -> Complex64 {
    coeffs_high_to_low.fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
}

/// Builds a [`Symbol`] from Laurent coefficients of `ln f`.
pub fn build_symbol_from_log_coeffs(
    coeffs: &CoefficientTable,
    tol: f64,
) -> Result<Symbol, SymbolError> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(SymbolError::InvalidTolerance(tol));
    }
    if coeffs.is_empty() {
        return Err(SymbolError::EmptyCoefficients);
    }
    if coeffs.values().iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(SymbolError::NonFinite);
    }

    let last_significant = |sign: i64| {
        coeffs
            .iter()
            .filter(|&(n, c)| n * sign > 0 && c.norm() >= tol)
            .map(|(n, _)| (n * sign) as usize)
            .max()
            .unwrap_or(0)
    };
    let k_plus = last_significant(1);
    let k_minus = last_significant(-1);
    let order = k_plus.max(k_minus);
    if order > MAX_TRUNCATION {
        return Err(SymbolError::NoDecay(format!(
            "coefficients above tolerance up to order {order} (cap {MAX_TRUNCATION})"
        )));
    }

    let outer = fit_decay_radius(coeffs, 1, k_plus)?;
    let inner = fit_decay_radius(coeffs, -1, k_minus)?.recip();
    let fitted = Annulus { inner, outer };

    let k = order as i64;
    let values = (-k..=k).map(|n| coeffs.get_or_zero(n)).collect();
    Ok(Symbol {
        log_coeffs: CoefficientTable::new(-k, values),
        order,
        tol,
        annulus: Annulus::shrunk(fitted),
        fitted,
    })
}

/// Least-squares fit of `ln|c_{sign*n}|` against `n` over the last half of the
/// retained range; returns the decay radius `exp(-slope)` (infinite when the
/// side has fewer than two usable points).
fn fit_decay_radius(
    coeffs: &CoefficientTable,
    sign: i64,
    retained: usize,
) -> Result<f64, SymbolError> {
    if retained == 0 {
        return Ok(f64::INFINITY);
    }
    let start = retained.div_ceil(2).max(1);
    let points: Vec<(f64, f64)> = (start..=retained)
        .filter_map(|n| {
            let m = coeffs.get_or_zero(sign * n as i64).norm();
            (m > f64::MIN_POSITIVE).then(|| (n as f64, m.ln()))
        })
        .collect();
    if points.len() < 2 {
        return Ok(f64::INFINITY);
    }
    let count = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / count;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / count;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let slope = sxy / sxx;
    let radius = (-slope).exp();
    if !(radius > MIN_DECAY_RATIO) {
        let side = if sign > 0 { "positive" } else { "negative" };
        return Err(SymbolError::NoDecay(format!(
            "{side}-index coefficients fit a decay ratio of {radius:.4}"
        )));
    }
    Ok(radius)
}

/// Winding number of samples taken on a uniform grid of the unit circle.
///
/// Every neighbouring pair (including the wrap-around) must differ in phase by
/// less than `pi/2`; otherwise the grid is too coarse to resolve the argument.
pub fn winding_number(values: &[Complex64], tol: f64) -> Result<i64, SymbolError> {
    let increments = phase_increments(values, tol)?;
    let total: f64 = increments.iter().sum();
    Ok((total / (2.0 * PI)).round() as i64)
}

/// Winding number of `f` around the unit circle, refining the grid until
/// every phase step is below `pi/2`.
pub fn winding_number_of<F>(f: F, tol: f64) -> Result<i64, SymbolError>
where
    F: Fn(Complex64) -> Complex64,
{
    let mut size = 64usize;
    loop {
        let samples: Vec<_> = unit_grid(size).map(&f).collect();
        match winding_number(&samples, tol) {
            Err(SymbolError::UnderResolved) if size < (1 << 22) => size *= 2,
            other => return other,
        }
    }
}

fn phase_increments(values: &[Complex64], tol: f64) -> Result<Vec<f64>, SymbolError> {
    if values.is_empty() {
        return Err(SymbolError::EmptyCoefficients);
    }
    if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(SymbolError::NonFinite);
    }
    let min_modulus = values.iter().map(|v| v.norm()).fold(f64::INFINITY, f64::min);
    if min_modulus <= tol {
        return Err(SymbolError::VanishingSymbol(min_modulus));
    }
    let n = values.len();
    let increments: Vec<f64> = (0..n)
        .map(|j| (values[(j + 1) % n] / values[j]).arg())
        .collect();
    if increments.iter().any(|d| d.abs() >= FRAC_PI_2) {
        return Err(SymbolError::UnderResolved);
    }
    Ok(increments)
}

pub(crate) fn unit_grid(size: usize) -> impl Iterator<Item = Complex64> {
    (0..size).map(move |j| Complex64::from_polar(1.0, 2.0 * PI * j as f64 / size as f64))
}

/// Builds a [`Symbol`] from samples of `f` on a uniform grid of the unit
/// circle, taking the logarithm with continuous phase tracking.
pub fn build_symbol_from_samples(values: &[Complex64], tol: f64) -> Result<Symbol, SymbolError> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(SymbolError::InvalidTolerance(tol));
    }
    let size = values.len();
    if size < 8 || !size.is_power_of_two() {
        return Err(SymbolError::InvalidGrid(size));
    }
    let increments = phase_increments(values, tol)?;
    let winding = (increments.iter().sum::<f64>() / (2.0 * PI)).round() as i64;
    if winding != 0 {
        return Err(SymbolError::NonzeroWinding(winding));
    }

    let mut phase = values[0].arg();
    let mut logs = Vec::with_capacity(size);
    for (j, v) in values.iter().enumerate() {
        logs.push(Complex64::new(v.norm().ln(), phase));
        phase += increments[j];
    }

    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(size).process(&mut logs);
    let scale = 1.0 / size as f64;
    let half = (size / 2) as i64;
    // The Nyquist bin is dropped: it cannot be attributed to +M/2 or -M/2.
    let pairs = (-(half - 1)..half).map(|n| {
        let bin = n.rem_euclid(size as i64) as usize;
        (n, logs[bin] * scale)
    });
    build_symbol_from_log_coeffs(&CoefficientTable::from_pairs(pairs), tol)
}

/// Fourier coefficients `c_n[f]` for `n` in `[n_min, n_max]`.
///
/// `f = exp(ln f)` is sampled on the unit circle and transformed; the grid is
/// doubled until two successive grids agree to the symbol tolerance.
pub fn fourier_coefficients(
    symbol: &Symbol,
    n_min: i64,
    n_max: i64,
) -> Result<CoefficientTable, SymbolError> {
    if n_min > n_max {
        return Err(SymbolError::InvalidRange(n_min, n_max));
    }
    let reach = n_min.unsigned_abs().max(n_max.unsigned_abs()) as usize;
    let mut size = (2 * reach + 2).max(4 * symbol.order() + 4).max(64).next_power_of_two();
    let mut planner = FftPlanner::new();
    let mut previous = coefficients_on_grid(symbol, size, n_min, n_max, &mut planner);
    loop {
        size *= 2;
        let current = coefficients_on_grid(symbol, size, n_min, n_max, &mut planner);
        let change = previous
            .iter()
            .zip(&current)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        if change <= symbol.tol() || size >= 1 << 22 {
            return Ok(CoefficientTable::new(n_min, current));
        }
        previous = current;
    }
}

fn coefficients_on_grid(
    symbol: &Symbol,
    size: usize,
    n_min: i64,
    n_max: i64,
    planner: &mut FftPlanner<f64>,
) -> Vec<Complex64> {
    // Place the log-coefficients on the grid and invert to get ln f at the nodes.
    let mut buffer = vec![Complex64::new(0.0, 0.0); size];
    for (n, c) in symbol.log_coeffs().iter() {
        buffer[n.rem_euclid(size as i64) as usize] += c;
    }
    planner.plan_fft_inverse(size).process(&mut buffer);
    for v in buffer.iter_mut() {
        *v = v.exp();
    }
    planner.plan_fft_forward(size).process(&mut buffer);
    let scale = 1.0 / size as f64;
    (n_min..=n_max)
        .map(|n| buffer[n.rem_euclid(size as i64) as usize] * scale)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn tridiagonal_log(order: i64) -> CoefficientTable {
        CoefficientTable::from_pairs((1..=order).flat_map(|n| {
            let nf = n as f64;
            [
                (n, c(-(-0.4f64).powi(n as i32) / nf)),
                (-n, c(-(-0.3f64).powi(n as i32) / nf)),
            ]
        }))
    }

    #[test]
    fn identity_symbol_has_whole_plane_annulus() {
        let s = build_symbol_from_log_coeffs(&CoefficientTable::new(0, vec![c(0.0)]), 1e-14).unwrap();
        assert_eq!(s.order(), 0);
        assert_eq!(s.annulus(), Annulus::WHOLE_PLANE);
        assert_eq!(s.eval(Complex64::new(0.3, 0.2)), c(1.0));
    }

    #[test]
    fn tridiagonal_annulus_is_recovered_by_the_fit() {
        let s = build_symbol_from_log_coeffs(&tridiagonal_log(60), 1e-15).unwrap();
        let fitted = s.fitted_annulus();
        assert!((fitted.outer - 2.5).abs() < 0.15, "{fitted}");
        assert!((fitted.inner - 0.3).abs() < 0.03, "{fitted}");
        let a = s.annulus();
        assert!(a.inner > fitted.inner && a.inner < 1.0);
        assert!(a.outer < fitted.outer && a.outer > 1.0);
        // tail beyond K is below tol
        assert!(s.order() < 60);
        assert!(s.log_coeff(s.order() as i64 + 1).norm() < 1e-15);
    }

    #[test]
    fn entire_log_symbol_reports_unbounded_radii() {
        let table = CoefficientTable::from_pairs([(1, c(0.25)), (-1, c(0.25))]);
        let s = build_symbol_from_log_coeffs(&table, 1e-14).unwrap();
        assert!(s.annulus().outer > 1e6);
        assert!(s.annulus().inner < 1e-6);
    }

    #[test]
    fn construction_errors() {
        assert_eq!(
            build_symbol_from_log_coeffs(&CoefficientTable::new(0, vec![]), 1e-14),
            Err(SymbolError::EmptyCoefficients)
        );
        let flat = CoefficientTable::from_pairs((-20..=20).map(|n| (n, c(0.5))));
        assert!(matches!(
            build_symbol_from_log_coeffs(&flat, 1e-14),
            Err(SymbolError::NoDecay(_))
        ));
        assert!(matches!(
            build_symbol_from_log_coeffs(&CoefficientTable::new(0, vec![c(0.0)]), 0.0),
            Err(SymbolError::InvalidTolerance(_))
        ));
    }

    #[test]
    fn winding_numbers() {
        let grid: Vec<_> = unit_grid(64).collect();
        let ones = vec![c(1.0); 64];
        assert_eq!(winding_number(&ones, 1e-12), Ok(0));
        let sq: Vec<_> = grid.iter().map(|z| z * z).collect();
        assert_eq!(winding_number(&sq, 1e-12), Ok(2));
        let inv: Vec<_> = grid.iter().map(|z| z.inv()).collect();
        assert_eq!(winding_number(&inv, 1e-12), Ok(-1));
        let coarse: Vec<_> = unit_grid(8).map(|z| z.powi(3)).collect();
        assert_eq!(winding_number(&coarse, 1e-12), Err(SymbolError::UnderResolved));
        assert_eq!(winding_number_of(|z| z.powi(3), 1e-12), Ok(3));
        let with_zero = vec![c(1.0), c(0.0), c(1.0), c(1.0)];
        assert!(matches!(
            winding_number(&with_zero, 1e-12),
            Err(SymbolError::VanishingSymbol(_))
        ));
    }

    #[test]
    fn samples_of_identity_and_of_z() {
        let ones = vec![c(1.0); 16];
        let s = build_symbol_from_samples(&ones, 1e-14).unwrap();
        assert_eq!(s.order(), 0);
        assert_eq!(s.log_coeff(0), c(0.0));
        let z: Vec<_> = unit_grid(16).collect();
        assert_eq!(
            build_symbol_from_samples(&z, 1e-14),
            Err(SymbolError::NonzeroWinding(1))
        );
        assert_eq!(
            build_symbol_from_samples(&ones[..12], 1e-14),
            Err(SymbolError::InvalidGrid(12))
        );
    }

    #[test]
    fn samples_of_tridiagonal_match_closed_form_log_series() {
        let samples: Vec<_> = unit_grid(256)
            .map(|z| (1.0 + 0.4 * z) * (1.0 + 0.3 / z))
            .collect();
        let s = build_symbol_from_samples(&samples, 1e-15).unwrap();
        let exact = tridiagonal_log(80);
        for n in -40..=40 {
            assert!(
                (s.log_coeff(n) - exact.get_or_zero(n)).norm() <= 1e-12,
                "n = {n}"
            );
        }
    }

    #[test]
    fn fourier_coefficients_of_identity_is_a_delta() {
        let s = Symbol::identity(1e-14);
        let t = fourier_coefficients(&s, -2, 2).unwrap();
        for (n, v) in t.iter() {
            let expected = if n == 0 { 1.0 } else { 0.0 };
            assert!((v - c(expected)).norm() < 1e-15);
        }
        assert_eq!(
            fourier_coefficients(&s, 2, -2),
            Err(SymbolError::InvalidRange(2, -2))
        );
    }

    #[test]
    fn fourier_coefficients_of_exponential_symbol_match_series() {
        let table = CoefficientTable::from_pairs([(1, c(0.25)), (-1, c(0.25))]);
        let s = build_symbol_from_log_coeffs(&table, 1e-15).unwrap();
        let t = fourier_coefficients(&s, -6, 6).unwrap();
        // exp(x(z+1/z)) = sum_n I_n(2x) z^n; sum the Bessel series directly
        let bessel = |n: i64| -> f64 {
            let n = n.unsigned_abs();
            let mut term = (0..n).fold(1.0, |acc, j| acc * 0.25 / (j + 1) as f64);
            let mut total = 0.0;
            for k in 0..40u64 {
                total += term;
                term *= 0.25 * 0.25 / (((k + 1) * (k + 1 + n)) as f64);
            }
            total
        };
        for n in -6..=6 {
            assert!((t.get(n).unwrap() - c(bessel(n))).norm() < 1e-15, "n = {n}");
            assert!((t.get(n).unwrap() - t.get(-n).unwrap()).norm() < 1e-15);
        }
        assert!(t.get(0).unwrap().re > 1.0);
    }

    #[test]
    fn table_indexing() {
        let t = CoefficientTable::new(-2, vec![c(1.0), c(2.0), c(3.0)]);
        assert_eq!(t.n_min(), -2);
        assert_eq!(t.n_max(), 0);
        assert_eq!(t.get(-1), Some(c(2.0)));
        assert_eq!(t.get(1), None);
        assert_eq!(t.get_or_zero(5), c(0.0));
        let sparse = CoefficientTable::from_pairs([(3, c(1.0)), (-1, c(2.0))]);
        assert_eq!(sparse.len(), 5);
        assert_eq!(sparse.get(0), Some(c(0.0)));
    }
}
