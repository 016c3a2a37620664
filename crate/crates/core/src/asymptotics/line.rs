//! Line-only correction matrices: the finite-`N` matrix `M` and its
//! edge-decoupled limits `M^(+)`, `M^(-)`.

use num_complex::Complex64;

use super::quadrature::{converge_matrix, Torus};
use super::{AsymptoticsError, CorrectionKind, CorrectionMatrix, QuadratureConfig, Radii};
use crate::lacunary::{LacunarySpec, LacunarySplit};
use crate::linalg::ComplexMatrix;
use crate::wiener_hopf::WienerHopfFactorization;

/// Which pair of circles an entry lives on.
///
/// Upper-edge integrals are stated on `|z| = eta_z`, `|s| = eta_s`, where the
/// powers of `z` and `s` are all negative. Pushing `z` out to `1/eta_s` and then
/// `s` out to `1/eta_z` crosses no singularity and keeps every monomial below
/// one in modulus. Lower-edge integrals are mirrored onto `|z| = eta_s`,
/// `|s| = eta_z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Edge {
    /// Interior branch, overall sign `-1`.
    Upper,
    /// Exterior branch, overall sign `+1`.
    Lower,
}

/// Row `a`: its edge and the power of `s`. Column `b`: the power of `z` on
/// each edge.
struct EdgeLayout {
    rows: Vec<(Edge, i64)>,
    cols: Vec<(i64, i64)>,
}

struct EdgeNodes {
    torus: Torus,
    /// `alpha_+(z)` or `1/alpha_-(z)`.
    z_factor: Vec<Complex64>,
    /// `1/alpha_+(s)` or `alpha_-(s)`.
    s_factor: Vec<Complex64>,
    sign: f64,
}

impl EdgeNodes {
    fn new(fact: &WienerHopfFactorization, radii: &Radii, edge: Edge, nodes: usize) -> Self {
        match edge {
            Edge::Upper => {
                let torus = Torus::new(1.0 / radii.eta_s, 1.0 / radii.eta_z, nodes);
                let z_factor = torus.z.map(|z| fact.interior_exponent(z).exp());
                let s_factor = torus.s.map(|s| (-fact.interior_exponent(s)).exp());
                Self {
                    torus,
                    z_factor,
                    s_factor,
                    sign: -1.0,
                }
            }
            Edge::Lower => {
                let torus = Torus::new(radii.eta_s, radii.eta_z, nodes);
                let z_factor = torus.z.map(|z| (-fact.exterior_exponent(z)).exp());
                let s_factor = torus.s.map(|s| fact.exterior_exponent(s).exp());
                Self {
                    torus,
                    z_factor,
                    s_factor,
                    sign: 1.0,
                }
            }
        }
    }
}

fn edge_matrix(
    fact: &WienerHopfFactorization,
    radii: &Radii,
    layout: &EdgeLayout,
    nodes: usize,
) -> ComplexMatrix {
    let n = layout.rows.len();
    let mut out = ComplexMatrix::zeros(n, layout.cols.len());
    for edge in [Edge::Upper, Edge::Lower] {
        let rows: Vec<usize> = (0..n).filter(|&a| layout.rows[a].0 == edge).collect();
        if rows.is_empty() {
            continue;
        }
        let en = EdgeNodes::new(fact, radii, edge, nodes);
        let s_fns: Vec<_> = rows
            .iter()
            .map(|&a| en.torus.s.monomial_times(layout.rows[a].1, &en.s_factor))
            .collect();
        let slices: Vec<&[Complex64]> = s_fns.iter().map(|f| f.values.as_slice()).collect();
        let transforms = en.torus.cauchy_transforms(&slices);
        let z_fns: Vec<_> = layout
            .cols
            .iter()
            .map(|&(upper, lower)| {
                let power = if edge == Edge::Upper { upper } else { lower };
                en.torus.z.monomial_times(power, &en.z_factor)
            })
            .collect();
        for (i, &a) in rows.iter().enumerate() {
            for (b, zf) in z_fns.iter().enumerate() {
                let scale = (zf.log_scale + s_fns[i].log_scale).exp();
                out[(a, b)] = en.torus.pair(&zf.values, &transforms[i]) * (scale * en.sign);
            }
        }
    }
    out
}

/// `M` for a spec without rows. Rows with `p_a > N` use the interior branch,
/// rows with `p_a <= 0` the exterior branch.
pub fn line_correction_matrix(
    fact: &WienerHopfFactorization,
    spec: &LacunarySpec,
    config: &QuadratureConfig,
) -> Result<CorrectionMatrix, AsymptoticsError> {
    if !spec.rows().is_empty() {
        return Err(AsymptoticsError::NotApplicable {
            method: "line",
            reason: format!("spec has {} row lacunae", spec.rows().len()),
        });
    }
    let radii = config.radii(fact.annulus())?;
    let n = spec.size() as i64;
    let layout = EdgeLayout {
        rows: spec
            .lines()
            .iter()
            .map(|l| {
                if l.replacement > n {
                    (Edge::Upper, n - l.replacement)
                } else {
                    (Edge::Lower, -l.replacement)
                }
            })
            .collect(),
        cols: spec
            .lines()
            .iter()
            .map(|l| (l.index - n - 1, l.index - 1))
            .collect(),
    };
    let (matrix, report) =
        converge_matrix(config.nodes, config, |nodes| edge_matrix(fact, &radii, &layout, nodes))?;
    CorrectionMatrix::new(CorrectionKind::LineM, matrix, report)
}

/// `(M^(+), M^(-))` for an edge-anchored split; both are independent of `N`.
pub fn corollary_matrices(
    fact: &WienerHopfFactorization,
    split: &LacunarySplit,
    config: &QuadratureConfig,
) -> Result<(CorrectionMatrix, CorrectionMatrix), AsymptoticsError> {
    let radii = config.radii(fact.annulus())?;
    let plus = EdgeLayout {
        rows: split
            .plus
            .lines
            .iter()
            .map(|l| (Edge::Upper, -l.replacement))
            .collect(),
        cols: split.plus.lines.iter().map(|l| (-l.index, 0)).collect(),
    };
    let minus = EdgeLayout {
        rows: split
            .minus
            .lines
            .iter()
            .map(|l| (Edge::Lower, l.replacement - 1))
            .collect(),
        cols: split.minus.lines.iter().map(|l| (0, l.index - 1)).collect(),
    };
    let (mp, rp) = converge_matrix(config.nodes, config, |n| edge_matrix(fact, &radii, &plus, n))?;
    let (mm, rm) = converge_matrix(config.nodes, config, |n| edge_matrix(fact, &radii, &minus, n))?;
    Ok((
        CorrectionMatrix::new(CorrectionKind::CorollaryPlus, mp, rp)?,
        CorrectionMatrix::new(CorrectionKind::CorollaryMinus, mm, rm)?,
    ))
}
