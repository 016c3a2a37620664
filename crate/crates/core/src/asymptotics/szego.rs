use num_complex::Complex64;

use crate::symbol::Symbol;

/// `N c_0 + sum_{k>=1} k c_k c_{-k}` over the coefficients of `ln f`: the log
/// of the strong Szegő approximation to the plain `N x N` determinant.
pub fn szego_log_asymptotics(symbol: &Symbol, size: usize) -> Complex64 {
    let tail: Complex64 = (1..=symbol.order() as i64)
        .map(|k| symbol.log_coeff(k) * symbol.log_coeff(-k) * k as f64)
        .sum();
    symbol.log_coeff(0) * size as f64 + tail
}
