//! Lacunary data, its well-ordered normal form, the edge-anchored split, and
//! the brute-force determinant ratio that serves as ground truth.

use std::collections::HashSet;
use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

use crate::linalg::{build_lacunary_toeplitz, log_determinant, LinalgError, LogDet};
use crate::symbol::{fourier_coefficients, Symbol, SymbolError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LacunaryError {
    #[error("matrix size must be at least 1")]
    InvalidSize,
    #[error("{what} = {value} is out of range for N = {size}")]
    OutOfRange {
        what: &'static str,
        value: i64,
        size: usize,
    },
    #[error("duplicate {what} = {value}")]
    DuplicateIndex { what: &'static str, value: i64 },
    #[error("pair ({index}, {replacement}) does not anchor to a single edge of [1, {size}]")]
    MixedAnchor {
        index: i64,
        replacement: i64,
        size: usize,
    },
    #[error("the unperturbed Toeplitz determinant vanishes")]
    PlainSingular,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Symbol(#[from] SymbolError),
}

/// One modified index: position `index` of a sequence takes the value `replacement`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Lacuna {
    pub index: i64,
    pub replacement: i64,
}

impl Lacuna {
    pub const fn new(index: i64, replacement: i64) -> Self {
        Self { index, replacement }
    }
}

impl fmt::Display for Lacuna {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.index, self.replacement)
    }
}

/// Validated lacunary data in well-ordered form.
///
/// `lines` are the pairs `(h_a, p_a)` acting on the row sequence `ell`;
/// `rows` are the pairs `(t_b, k_b)` acting on the column sequence `m`. The
/// first `overlap` lines and rows share their positions (`h_a = t_a`), the
/// remaining positions are disjoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LacunarySpec {
    size: usize,
    lines: Vec<Lacuna>,
    rows: Vec<Lacuna>,
    overlap: usize,
}

impl LacunarySpec {
    pub fn empty(size: usize) -> Self {
        Self {
            size,
            lines: Vec::new(),
            rows: Vec::new(),
            overlap: 0,
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn lines(&self) -> &[Lacuna] {
        &self.lines
    }

    pub fn rows(&self) -> &[Lacuna] {
        &self.rows
    }

    pub fn overlap(&self) -> usize {
        self.overlap
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty() && self.rows.is_empty()
    }

    /// Row sequence `ell_1..ell_N`.
    pub fn ell(&self) -> Vec<i64> {
        modified_sequence(self.size, &self.lines)
    }

    /// Column sequence `m_1..m_N`.
    pub fn m(&self) -> Vec<i64> {
        modified_sequence(self.size, &self.rows)
    }

    /// Largest |index| or |replacement| appearing in the data.
    pub fn max_abs_index(&self) -> i64 {
        self.lines
            .iter()
            .chain(&self.rows)
            .map(|l| l.index.abs().max(l.replacement.abs()))
            .max()
            .unwrap_or(0)
    }
}

fn modified_sequence(size: usize, changes: &[Lacuna]) -> Vec<i64> {
    let mut seq: Vec<i64> = (1..=size as i64).collect();
    for c in changes {
        seq[(c.index - 1) as usize] = c.replacement;
    }
    seq
}

/// Checks ranges and distinctness, then reorders lines and rows jointly so
/// shared positions come first (in ascending order) followed by the rest.
pub fn validate_and_normalize(
    lines: &[Lacuna],
    rows: &[Lacuna],
    size: usize,
) -> Result<LacunarySpec, LacunaryError> {
    if size == 0 {
        return Err(LacunaryError::InvalidSize);
    }
    let n = size as i64;
    let inside = |v: i64| (1..=n).contains(&v);
    for (set, index_name, value_name) in [(lines, "h", "p"), (rows, "t", "k")] {
        let mut seen_index = HashSet::new();
        let mut seen_value = HashSet::new();
        for l in set {
            if !inside(l.index) {
                return Err(LacunaryError::OutOfRange {
                    what: index_name,
                    value: l.index,
                    size,
                });
            }
            if inside(l.replacement) {
                return Err(LacunaryError::OutOfRange {
                    what: value_name,
                    value: l.replacement,
                    size,
                });
            }
            if !seen_index.insert(l.index) {
                return Err(LacunaryError::DuplicateIndex {
                    what: index_name,
                    value: l.index,
                });
            }
            if !seen_value.insert(l.replacement) {
                return Err(LacunaryError::DuplicateIndex {
                    what: value_name,
                    value: l.replacement,
                });
            }
        }
    }

    let (lines, rows, overlap) = well_order(lines, rows);
    Ok(LacunarySpec {
        size,
        lines,
        rows,
        overlap,
    })
}

fn well_order(lines: &[Lacuna], rows: &[Lacuna]) -> (Vec<Lacuna>, Vec<Lacuna>, usize) {
    let row_positions: HashSet<i64> = rows.iter().map(|r| r.index).collect();
    let line_positions: HashSet<i64> = lines.iter().map(|l| l.index).collect();
    let split = |set: &[Lacuna], other: &HashSet<i64>| {
        let (mut shared, mut rest): (Vec<Lacuna>, Vec<Lacuna>) =
            set.iter().partition(|l| other.contains(&l.index));
        shared.sort_by_key(|l| l.index);
        rest.sort_by_key(|l| l.index);
        (shared, rest)
    };
    let (mut ordered_lines, line_rest) = split(lines, &row_positions);
    let (mut ordered_rows, row_rest) = split(rows, &line_positions);
    let overlap = ordered_lines.len();
    ordered_lines.extend(line_rest);
    ordered_rows.extend(row_rest);
    (ordered_lines, ordered_rows, overlap)
}

/// Lacunary data anchored to one edge, in `N`-independent offsets.
///
/// On the lower edge a pair is stored as `(h^-, p^-)` with `h = h^-`,
/// `p = 1 - p^-`; on the upper edge as `(h^+, p^+)` with `h = N + 1 - h^+`,
/// `p = N + p^+`. Rows use the same encoding.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EdgePart {
    pub lines: Vec<Lacuna>,
    pub rows: Vec<Lacuna>,
    pub overlap: usize,
}

impl EdgePart {
    pub fn line_count(&self) -> usize {
        self.lines.len()
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty() && self.rows.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LacunarySplit {
    pub minus: EdgePart,
    pub plus: EdgePart,
}

impl LacunarySplit {
    /// Rebuilds lacunary data of size `size` from the edge offsets.
    pub fn recombine(&self, size: usize) -> Result<LacunarySpec, LacunaryError> {
        let n = size as i64;
        let lower = |l: &Lacuna| Lacuna::new(l.index, 1 - l.replacement);
        let upper = |l: &Lacuna| Lacuna::new(n + 1 - l.index, n + l.replacement);
        let lines: Vec<_> = self
            .minus
            .lines
            .iter()
            .map(lower)
            .chain(self.plus.lines.iter().map(upper))
            .collect();
        let rows: Vec<_> = self
            .minus
            .rows
            .iter()
            .map(lower)
            .chain(self.plus.rows.iter().map(upper))
            .collect();
        validate_and_normalize(&lines, &rows, size)
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Edge {
    Lower,
    Upper,
}

fn anchor(l: &Lacuna, size: usize) -> Result<(Edge, Lacuna), LacunaryError> {
    let n = size as i64;
    if l.replacement <= 0 && 2 * l.index <= n {
        Ok((Edge::Lower, Lacuna::new(l.index, 1 - l.replacement)))
    } else if l.replacement > n && 2 * l.index > n {
        Ok((Edge::Upper, Lacuna::new(n + 1 - l.index, l.replacement - n)))
    } else {
        Err(LacunaryError::MixedAnchor {
            index: l.index,
            replacement: l.replacement,
            size,
        })
    }
}

/// Splits normalized data into lower- and upper-edge parts. A pair anchors
/// to the lower edge when `p <= 0` and `h <= N/2`, to the upper edge when
/// `p > N` and `h > N/2`; anything else is [`LacunaryError::MixedAnchor`].
pub fn split_edge_anchored(spec: &LacunarySpec) -> Result<LacunarySplit, LacunaryError> {
    let mut split = LacunarySplit::default();
    for (i, l) in spec.lines.iter().enumerate() {
        let (edge, offsets) = anchor(l, spec.size)?;
        let part = match edge {
            Edge::Lower => &mut split.minus,
            Edge::Upper => &mut split.plus,
        };
        part.lines.push(offsets);
        if i < spec.overlap {
            part.overlap += 1;
        }
    }
    for r in &spec.rows {
        let (edge, offsets) = anchor(r, spec.size)?;
        match edge {
            Edge::Lower => split.minus.rows.push(offsets),
            Edge::Upper => split.plus.rows.push(offsets),
        }
    }
    Ok(split)
}

/// Ratio of the lacunary determinant to the plain Toeplitz determinant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactRatio {
    pub value: Complex64,
    pub is_zero: bool,
    /// Log-determinant of the plain `N x N` Toeplitz matrix.
    pub plain: LogDet,
}

/// Builds both `N x N` matrices and returns their determinant ratio.
pub fn exact_ratio(symbol: &Symbol, spec: &LacunarySpec) -> Result<ExactRatio, LacunaryError> {
    let size = spec.size();
    let ell = spec.ell();
    let m = spec.m();
    let plain_seq: Vec<i64> = (1..=size as i64).collect();
    let lo = ell.iter().min().unwrap() - m.iter().max().unwrap();
    let hi = ell.iter().max().unwrap() - m.iter().min().unwrap();
    let reach = (size as i64 - 1).max(-lo).max(hi);
    let coeffs = fourier_coefficients(symbol, -reach, reach)?;

    let plain = log_determinant(&build_lacunary_toeplitz(&coeffs, size, &plain_seq, &plain_seq)?)?;
    if plain.is_zero {
        return Err(LacunaryError::PlainSingular);
    }
    if spec.is_empty() {
        return Ok(ExactRatio {
            value: Complex64::new(1.0, 0.0),
            is_zero: false,
            plain,
        });
    }
    let lacunary = log_determinant(&build_lacunary_toeplitz(&coeffs, size, &ell, &m)?)?;
    let value = lacunary.ratio(&plain).ok_or(LacunaryError::PlainSingular)?;
    Ok(ExactRatio {
        value,
        is_zero: lacunary.is_zero,
        plain,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(h: i64, p: i64) -> Lacuna {
        Lacuna::new(h, p)
    }

    #[test]
    fn normalization_puts_shared_positions_first() {
        let spec = validate_and_normalize(&[l(5, 12), l(2, 0)], &[l(7, 11), l(2, -1)], 10).unwrap();
        assert_eq!(spec.overlap(), 1);
        assert_eq!(spec.lines(), &[l(2, 0), l(5, 12)]);
        assert_eq!(spec.rows(), &[l(2, -1), l(7, 11)]);
        assert_eq!(spec.ell(), vec![1, 0, 3, 4, 12, 6, 7, 8, 9, 10]);
        assert_eq!(spec.m(), vec![1, -1, 3, 4, 5, 6, 11, 8, 9, 10]);
    }

    #[test]
    fn validation_errors() {
        assert_eq!(
            validate_and_normalize(&[l(3, 3)], &[], 10),
            Err(LacunaryError::OutOfRange {
                what: "p",
                value: 3,
                size: 10
            })
        );
        assert!(matches!(
            validate_and_normalize(&[l(11, 0)], &[], 10),
            Err(LacunaryError::OutOfRange { what: "h", .. })
        ));
        assert!(matches!(
            validate_and_normalize(&[l(1, 0), l(1, -1)], &[], 10),
            Err(LacunaryError::DuplicateIndex { what: "h", value: 1 })
        ));
        assert!(matches!(
            validate_and_normalize(&[], &[l(1, 0), l(2, 0)], 10),
            Err(LacunaryError::DuplicateIndex { what: "k", value: 0 })
        ));
        assert_eq!(validate_and_normalize(&[], &[], 0), Err(LacunaryError::InvalidSize));
        let empty = validate_and_normalize(&[], &[], 10).unwrap();
        assert!(empty.is_empty());
        assert_eq!(empty.overlap(), 0);
    }

    #[test]
    fn edge_split_examples() {
        let spec = validate_and_normalize(&[l(1, 0)], &[], 64).unwrap();
        let split = split_edge_anchored(&spec).unwrap();
        assert_eq!(split.minus.lines, vec![l(1, 1)]);
        assert!(split.plus.is_empty());

        let spec = validate_and_normalize(&[l(64, 65)], &[], 64).unwrap();
        let split = split_edge_anchored(&spec).unwrap();
        assert_eq!(split.plus.lines, vec![l(1, 1)]);
        assert!(split.minus.is_empty());

        let spec = validate_and_normalize(&[l(1, 65)], &[], 64).unwrap();
        assert!(matches!(
            split_edge_anchored(&spec),
            Err(LacunaryError::MixedAnchor { index: 1, replacement: 65, .. })
        ));
    }

    #[test]
    fn split_tracks_overlap_per_edge() {
        let spec = validate_and_normalize(
            &[l(1, 0), l(3, -2), l(63, 66)],
            &[l(63, 70), l(1, -1), l(60, 65)],
            64,
        )
        .unwrap();
        assert_eq!(spec.overlap(), 2);
        let split = split_edge_anchored(&spec).unwrap();
        assert_eq!(split.minus.overlap, 1);
        assert_eq!(split.plus.overlap, 1);
        assert_eq!(split.minus.lines, vec![l(1, 1), l(3, 3)]);
        assert_eq!(split.plus.lines, vec![l(2, 2)]);
        assert_eq!(split.plus.rows, vec![l(2, 6), l(5, 1)]);
        assert_eq!(split.recombine(64).unwrap(), spec);
    }

    #[test]
    fn exact_ratio_of_identity_symbol() {
        let one = Symbol::identity(1e-14);
        let empty = LacunarySpec::empty(8);
        let r = exact_ratio(&one, &empty).unwrap();
        assert_eq!(r.value, Complex64::new(1.0, 0.0));
        let spec = validate_and_normalize(&[l(1, 0)], &[], 8).unwrap();
        let r = exact_ratio(&one, &spec).unwrap();
        assert!(r.is_zero);
        assert_eq!(r.value, Complex64::new(0.0, 0.0));
    }
}
