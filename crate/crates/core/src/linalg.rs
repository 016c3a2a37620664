//! Dense complex matrices, LU with partial pivoting, overflow-safe
//! log-determinants, and the lacunary Toeplitz builder used by the exact oracle.

use std::f64::consts::PI;
use std::ops::{Index, IndexMut, Mul};

use num_complex::Complex64;
use thiserror::Error;

use crate::symbol::CoefficientTable;

/// Pivots with modulus below this are treated as exact zeros.
pub const PIVOT_UNDERFLOW: f64 = 1e-300;

/// Largest matrix accepted by [`determinant_small`].
pub const SMALL_DETERMINANT_LIMIT: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix is {rows}x{cols}, expected square")]
    NonSquare { rows: usize, cols: usize },
    #[error("matrix of size {0} exceeds the small-determinant limit")]
    TooLarge(usize),
    #[error("matrix is exactly singular")]
    ExactlySingular,
    #[error("data length {len} does not match {rows}x{cols}")]
    ShapeMismatch { rows: usize, cols: usize, len: usize },
    #[error("non-finite matrix entry at ({0}, {1})")]
    NonFinite(usize, usize),
    #[error("sequence lengths {0} and {1} do not match the matrix size {2}")]
    SequenceLength(usize, usize, usize),
    #[error("coefficient c_{0} is outside the table and its tail is not certified small")]
    CoefficientRangeTooSmall(i64),
}

/// Row-major dense complex matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self, LinalgError> {
        if data.len() != rows * cols {
            return Err(LinalgError::ShapeMismatch {
                rows,
                cols,
                len: data.len(),
            });
        }
        if let Some(k) = data.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(LinalgError::NonFinite(k / cols.max(1), k % cols.max(1)));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn<F>(rows: usize, cols: usize, mut f: F) -> Result<Self, LinalgError>
    where
        F: FnMut(usize, usize) -> Complex64,
    {
        let data = (0..rows * cols).map(|k| f(k / cols, k % cols)).collect();
        Self::new(rows, cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    fn require_square(&self) -> Result<(), LinalgError> {
        if self.is_square() {
            Ok(())
        } else {
            Err(LinalgError::NonSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "inner dimensions differ");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

/// `log|det|` and `arg det`, with an exact-zero flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogDet {
    pub log_modulus: f64,
    pub phase: f64,
    pub is_zero: bool,
}

impl LogDet {
    pub const ZERO: LogDet = LogDet {
        log_modulus: f64::NEG_INFINITY,
        phase: 0.0,
        is_zero: true,
    };

    pub fn value(&self) -> Complex64 {
        if self.is_zero {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::from_polar(self.log_modulus.exp(), self.phase)
        }
    }

    /// `self / other` as a plain complex number; `None` when `other` is zero.
    pub fn ratio(&self, other: &LogDet) -> Option<Complex64> {
        if other.is_zero {
            return None;
        }
        if self.is_zero {
            return Some(Complex64::new(0.0, 0.0));
        }
        Some(Complex64::from_polar(
            (self.log_modulus - other.log_modulus).exp(),
            wrap_phase(self.phase - other.phase),
        ))
    }
}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_phase(theta: f64) -> f64 {
    let mut t = theta.rem_euclid(2.0 * PI);
    if t > PI {
        t -= 2.0 * PI;
    }
    t
}

/// LU factors `P A = L U` stored compactly (unit lower triangle implicit).
#[derive(Debug, Clone)]
pub struct LuFactors {
    lu: ComplexMatrix,
    perm: Vec<usize>,
    swaps: usize,
    singular: bool,
}

impl LuFactors {
    pub fn new(matrix: &ComplexMatrix) -> Result<Self, LinalgError> {
        matrix.require_square()?;
        let n = matrix.rows();
        let mut lu = matrix.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0;
        let mut singular = false;
        for k in 0..n {
            let (p, best) = (k..n)
                .map(|i| (i, lu[(i, k)].norm()))
                .fold((k, -1.0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
            if p != k {
                lu.swap_rows(p, k);
                perm.swap(p, k);
                swaps += 1;
            }
            if best < PIVOT_UNDERFLOW {
                singular = true;
                continue;
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let factor = lu[(i, k)] / pivot;
                lu[(i, k)] = factor;
                if factor.norm() == 0.0 {
                    continue;
                }
                for j in k + 1..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] -= factor * u;
                }
            }
        }
        Ok(Self {
            lu,
            perm,
            swaps,
            singular,
        })
    }

    pub fn is_singular(&self) -> bool {
        self.singular
    }

    pub fn log_det(&self) -> LogDet {
        if self.singular {
            return LogDet::ZERO;
        }
        let n = self.lu.rows();
        let mut log_modulus = 0.0;
        let mut phase = if self.swaps % 2 == 1 { PI } else { 0.0 };
        for k in 0..n {
            let p = self.lu[(k, k)];
            log_modulus += p.norm().ln();
            phase = wrap_phase(phase + p.arg());
        }
        LogDet {
            log_modulus,
            phase: wrap_phase(phase),
            is_zero: false,
        }
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.lu.rows();
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let l = self.lu[(i, j)];
                x[i] = x[i] - l * x[j];
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let u = self.lu[(i, j)];
                x[i] = x[i] - u * x[j];
            }
            x[i] /= self.lu[(i, i)];
        }
        x
    }

    /// Solves `A^H x = b`.
    pub fn solve_adjoint(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.lu.rows();
        // A^H = U^H L^H P, so solve U^H y = b, L^H w = y, then x = P^T w.
        let mut y = b.to_vec();
        for i in 0..n {
            for j in 0..i {
                let u = self.lu[(j, i)].conj();
                y[i] = y[i] - u * y[j];
            }
            y[i] /= self.lu[(i, i)].conj();
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let l = self.lu[(j, i)].conj();
                y[i] = y[i] - l * y[j];
            }
        }
        let mut x = vec![Complex64::new(0.0, 0.0); n];
        for (k, &p) in self.perm.iter().enumerate() {
            x[p] = y[k];
        }
        x
    }
}

pub fn log_determinant(matrix: &ComplexMatrix) -> Result<LogDet, LinalgError> {
    Ok(LuFactors::new(matrix)?.log_det())
}

/// Plain determinant for the small correction matrices; the 0x0 determinant is 1.
pub fn determinant_small(matrix: &ComplexMatrix) -> Result<Complex64, LinalgError> {
    matrix.require_square()?;
    if matrix.rows() > SMALL_DETERMINANT_LIMIT {
        return Err(LinalgError::TooLarge(matrix.rows()));
    }
    let lu = LuFactors::new(matrix)?;
    if lu.is_singular() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let n = matrix.rows();
    let mut det = (0..n).fold(Complex64::new(1.0, 0.0), |acc, k| acc * lu.lu[(k, k)]);
    if lu.swaps % 2 == 1 {
        det = -det;
    }
    Ok(det)
}

/// Hager/Higham estimate of the 1-norm condition number.
pub fn condition_estimate(matrix: &ComplexMatrix) -> Result<f64, LinalgError> {
    let lu = LuFactors::new(matrix)?;
    if lu.is_singular() {
        return Err(LinalgError::ExactlySingular);
    }
    let n = matrix.rows();
    if n == 0 {
        return Ok(1.0);
    }
    Ok(matrix.norm_one() * inverse_norm_one_estimate(&lu, n))
}

fn inverse_norm_one_estimate(lu: &LuFactors, n: usize) -> f64 {
    let mut x = vec![Complex64::new(1.0 / n as f64, 0.0); n];
    let mut estimate = 0.0;
    for _ in 0..5 {
        let y = lu.solve(&x);
        estimate = y.iter().map(|v| v.norm()).sum::<f64>();
        let xi: Vec<_> = y
            .iter()
            .map(|v| {
                let m = v.norm();
                if m > 0.0 {
                    v / m
                } else {
                    Complex64::new(1.0, 0.0)
                }
            })
            .collect();
        let z = lu.solve_adjoint(&xi);
        let (j, zmax) = z
            .iter()
            .map(|v| v.norm())
            .enumerate()
            .fold((0, -1.0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
        let ztx: f64 = z.iter().zip(&x).map(|(a, b)| (a.conj() * b).re).sum();
        if zmax <= ztx {
            break;
        }
        x = vec![Complex64::new(0.0, 0.0); n];
        x[j] = Complex64::new(1.0, 0.0);
    }
    estimate
}

/// The `N x N` matrix with entries `c_{ell_a - m_b}`.
pub fn build_lacunary_toeplitz(
    coeffs: &CoefficientTable,
    size: usize,
    ell: &[i64],
    m: &[i64],
) -> Result<ComplexMatrix, LinalgError> {
    if ell.len() != size || m.len() != size {
        return Err(LinalgError::SequenceLength(ell.len(), m.len(), size));
    }
    let mut data = Vec::with_capacity(size * size);
    for &a in ell {
        for &b in m {
            let n = a - b;
            let value = match coeffs.get(n) {
                Some(v) => v,
                None if coeffs.certified_tail().is_some() => Complex64::new(0.0, 0.0),
                None => return Err(LinalgError::CoefficientRangeTooSmall(n)),
            };
            data.push(value);
        }
    }
    ComplexMatrix::new(size, size, data)
}
