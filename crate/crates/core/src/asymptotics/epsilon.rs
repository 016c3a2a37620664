//! Edge-decoupled correction matrices for lines and rows together.
//!
//! For `eps = +1` the index sets are `{p^+, h^+, k^+, t^+}`; for `eps = -1`
//! they are `{p^- - 1, h^- - 1, k^- - 1, t^- - 1}`. Every entry is a sum of
//! `± ∮∮ x(z)^eps y(s)^{-eps} s^m z^q / (z - s)` with `x, y` one of
//! `alpha_eps`, `alpha_{-eps}`. Side limits onto the unit circle are taken by
//! moving `z` to radius `1 - eps*delta` ("inside" terms) or `1 + eps*delta`
//! ("outside" terms) with `s` on the circle itself.

use std::collections::HashMap;

use num_complex::Complex64;

use super::quadrature::{converge_matrix, Circle, NodeFn, Torus};
use super::{AsymptoticsError, CorrectionKind, CorrectionMatrix, QuadratureConfig};
use crate::lacunary::{EdgePart, LacunarySplit};
use crate::linalg::ComplexMatrix;
use crate::wiener_hopf::WienerHopfFactorization;

/// `alpha_eps` (`Own`) or `alpha_{-eps}` (`Other`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Branch {
    Own,
    Other,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Side {
    Inside,
    Outside,
}

#[derive(Debug, Clone, Copy)]
struct Term {
    sign: f64,
    side: Side,
    z: (Branch, i64),
    s: (Branch, i64),
}

/// Index sets after the edge shift.
struct Indices {
    p: Vec<i64>,
    h: Vec<i64>,
    k: Vec<i64>,
    t: Vec<i64>,
    overlap: usize,
}

impl Indices {
    fn new(part: &EdgePart, eps: i64) -> Self {
        let shift = if eps > 0 { 0 } else { 1 };
        Self {
            p: part.lines.iter().map(|l| l.replacement - shift).collect(),
            h: part.lines.iter().map(|l| l.index - shift).collect(),
            k: part.rows.iter().map(|r| r.replacement - shift).collect(),
            t: part.rows.iter().map(|r| r.index - shift).collect(),
            overlap: part.overlap,
        }
    }
}

fn entry_terms(ix: &Indices, eps: i64, i: usize, j: usize) -> Vec<Term> {
    use Branch::{Other, Own};
    let nl = ix.p.len();
    let c = ix.overlap;
    let e = eps as f64;
    let mut terms = Vec::new();
    let mut inside = |sign: f64, z: (Branch, i64), s: (Branch, i64)| {
        terms.push(Term {
            sign: -e * sign,
            side: Side::Inside,
            z,
            s,
        })
    };
    match (i < nl, j < nl) {
        (true, true) => {
            let (a, b) = (i, j);
            if a < c && b < c {
                inside(1.0, (Other, eps * ix.k[b] - 1), (Other, eps * ix.h[a] - 1));
            }
            if b >= c {
                inside(1.0, (Own, -eps * ix.h[b]), (Own, -eps * ix.p[a]));
                if a < c {
                    inside(-1.0, (Own, -eps * ix.h[b]), (Other, eps * ix.h[a] - 1));
                }
            }
            if b < c {
                terms.push(Term {
                    sign: e,
                    side: Side::Outside,
                    z: (Other, eps * ix.k[b] - 1),
                    s: (Own, -eps * ix.p[a]),
                });
            }
        }
        (true, false) => {
            let (a, b) = (i, j - nl);
            if a < c && b < c {
                inside(1.0, (Own, -eps * ix.t[b]), (Other, eps * ix.h[a] - 1));
            }
            if a < c && b >= c {
                inside(1.0, (Other, eps * ix.k[b] - 1), (Other, eps * ix.h[a] - 1));
            }
            if b < c {
                inside(-1.0, (Own, -eps * ix.t[b]), (Own, -eps * ix.p[a]));
            }
            if b >= c {
                terms.push(Term {
                    sign: e,
                    side: Side::Outside,
                    z: (Other, eps * ix.k[b] - 1),
                    s: (Own, -eps * ix.p[a]),
                });
            }
        }
        (false, true) => {
            let (a, b) = (i - nl, j);
            let s = (Other, eps * ix.t[a] - 1);
            if b < c {
                inside(1.0, (Other, eps * ix.k[b] - 1), s);
            } else {
                inside(-1.0, (Own, -eps * ix.h[b]), s);
            }
        }
        (false, false) => {
            let (a, b) = (i - nl, j - nl);
            let s = (Other, eps * ix.t[a] - 1);
            if b < c {
                inside(1.0, (Own, -eps * ix.t[b]), s);
            } else {
                inside(1.0, (Other, eps * ix.k[b] - 1), s);
            }
        }
    }
    terms
}

/// `exp(sign * log alpha_branch)` at each node.
fn branch_power(
    fact: &WienerHopfFactorization,
    circle: &Circle,
    eps: i64,
    branch: Branch,
    sign: f64,
) -> Vec<Complex64> {
    let plus = (eps > 0) == (branch == Branch::Own);
    circle.map(|z| {
        let log = if plus {
            fact.interior_exponent(z)
        } else {
            fact.exterior_exponent(z)
        };
        (log * sign).exp()
    })
}

fn assemble(
    fact: &WienerHopfFactorization,
    ix: &Indices,
    eps: i64,
    delta: f64,
    nodes: usize,
) -> ComplexMatrix {
    let dim = ix.p.len() + ix.t.len();
    let e = eps as f64;
    let terms: Vec<Vec<Vec<Term>>> = (0..dim)
        .map(|i| (0..dim).map(|j| entry_terms(ix, eps, i, j)).collect())
        .collect();

    let sides = [
        (Side::Inside, Torus::new(1.0 - e * delta, 1.0, nodes)),
        (Side::Outside, Torus::new(1.0 + e * delta, 1.0, nodes)),
    ];
    let s_circle = &sides[0].1.s;
    let s_factor: HashMap<Branch, Vec<Complex64>> = [Branch::Own, Branch::Other]
        .into_iter()
        .map(|b| (b, branch_power(fact, s_circle, eps, b, -e)))
        .collect();

    let mut values = vec![Complex64::new(0.0, 0.0); dim * dim];
    for (side, torus) in &sides {
        let mut s_keys: Vec<(Branch, i64)> = Vec::new();
        let mut z_keys: Vec<(Branch, i64)> = Vec::new();
        for t in terms.iter().flatten().flatten().filter(|t| t.side == *side) {
            if !s_keys.contains(&t.s) {
                s_keys.push(t.s);
            }
            if !z_keys.contains(&t.z) {
                z_keys.push(t.z);
            }
        }
        if s_keys.is_empty() {
            continue;
        }
        let s_fns: Vec<NodeFn> = s_keys
            .iter()
            .map(|(b, m)| torus.s.monomial_times(*m, &s_factor[b]))
            .collect();
        let slices: Vec<&[Complex64]> = s_fns.iter().map(|f| f.values.as_slice()).collect();
        let transforms = torus.cauchy_transforms(&slices);
        let z_factor: HashMap<Branch, Vec<Complex64>> = [Branch::Own, Branch::Other]
            .into_iter()
            .map(|b| (b, branch_power(fact, &torus.z, eps, b, e)))
            .collect();
        let z_fns: Vec<NodeFn> = z_keys
            .iter()
            .map(|(b, q)| torus.z.monomial_times(*q, &z_factor[b]))
            .collect();

        for i in 0..dim {
            for j in 0..dim {
                for t in terms[i][j].iter().filter(|t| t.side == *side) {
                    let si = s_keys.iter().position(|k| *k == t.s).unwrap();
                    let zi = z_keys.iter().position(|k| *k == t.z).unwrap();
                    let scale = (s_fns[si].log_scale + z_fns[zi].log_scale).exp();
                    values[i * dim + j] +=
                        torus.pair(&z_fns[zi].values, &transforms[si]) * (scale * t.sign);
                }
            }
        }
    }
    ComplexMatrix::new(dim, dim, values).expect("finite entries")
}

/// `(N^(+), N^(-))` for an edge-anchored split. With no rows their
/// determinants reproduce the corollary matrices.
pub fn epsilon_block_matrices(
    fact: &WienerHopfFactorization,
    split: &LacunarySplit,
    config: &QuadratureConfig,
) -> Result<(CorrectionMatrix, CorrectionMatrix), AsymptoticsError> {
    let radii = config.radii(fact.annulus())?;
    let delta = radii.side_offset();
    let build = |part: &EdgePart, eps: i64, kind: CorrectionKind| {
        let ix = Indices::new(part, eps);
        let (matrix, report) =
            converge_matrix(config.nodes, config, |n| assemble(fact, &ix, eps, delta, n))?;
        CorrectionMatrix::new(kind, matrix, report)
    };
    Ok((
        build(&split.plus, 1, CorrectionKind::EpsilonPlus)?,
        build(&split.minus, -1, CorrectionKind::EpsilonMinus)?,
    ))
}
