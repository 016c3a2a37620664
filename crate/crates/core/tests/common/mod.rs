#![allow(dead_code)]

use lactoep_core::{build_symbol_from_log_coeffs, CoefficientTable, Symbol};
use num_complex::Complex64;

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn identity() -> Symbol {
    Symbol::identity(1e-14)
}

/// `(1 + a z)(1 + b / z)` through `ln f = ln(1 + a z) + ln(1 + b/z)`.
pub fn two_factor(a: f64, b: f64) -> Symbol {
    let pairs = (1..=80i32).flat_map(|n| {
        [
            (n as i64, c(-(-a).powi(n) / n as f64)),
            (-(n as i64), c(-(-b).powi(n) / n as f64)),
        ]
    });
    build_symbol_from_log_coeffs(&CoefficientTable::from_pairs(pairs), 1e-15).unwrap()
}

/// `(1 + 0.4 z)(1 + 0.3 / z)`.
pub fn tridiagonal() -> Symbol {
    two_factor(0.4, 0.3)
}

/// `exp(0.25 (z + 1/z))`.
pub fn exponential() -> Symbol {
    let table = CoefficientTable::from_pairs([(-1, c(0.25)), (1, c(0.25))]);
    build_symbol_from_log_coeffs(&table, 1e-15).unwrap()
}

pub fn corpus() -> Vec<(&'static str, Symbol)> {
    vec![
        ("identity", identity()),
        ("tridiagonal", tridiagonal()),
        ("exponential", exponential()),
    ]
}

/// `D_N` for the tridiagonal symbol: `(1 - (ab)^{N+1}) / (1 - ab)`.
pub fn tridiagonal_plain(n: i32) -> f64 {
    (1.0 - 0.12f64.powi(n + 1)) / (1.0 - 0.12)
}

/// `f(1/z)`: the coefficients of `ln f` mirrored.
pub fn reflected(symbol: &Symbol) -> Symbol {
    let pairs: Vec<_> = symbol.log_coeffs().iter().map(|(n, v)| (-n, v)).collect();
    build_symbol_from_log_coeffs(&CoefficientTable::from_pairs(pairs), symbol.tol()).unwrap()
}
