//! The `(n + r) x (n + r)` correction matrix for simultaneous line and row
//! lacunae.
//!
//! Entry `(A, a; B, b)` is `delta + ∮ psi_b phi_a dz / z` minus a double
//! integral of `(f(z) - 1) psi_b(z) phi_a(s) / (z - s)` against
//! `z^{-1} alpha_+(s) / alpha_-(z) - z^{-N-1} s^N alpha_+(z) / alpha_-(s)`.
//! That combination is the leading resolvent kernel with the `z^{+-N/2}`
//! factors of `u` and `v` absorbed, so only integer powers appear. The `z`
//! contour is the unit circle and `s` runs on a slightly smaller circle.

use num_complex::Complex64;

use super::kernel::{Family, PerturbationBasis};
use super::quadrature::{converge_matrix, Circle, Torus};
use super::{AsymptoticsError, CorrectionKind, CorrectionMatrix, QuadratureConfig};
use crate::lacunary::LacunarySpec;
use crate::linalg::ComplexMatrix;
use crate::wiener_hopf::WienerHopfFactorization;

fn families(spec: &LacunarySpec) -> Vec<(Family, usize)> {
    (0..spec.lines().len())
        .map(|a| (Family::I, a))
        .chain((0..spec.rows().len()).map(|a| (Family::II, a)))
        .collect()
}

struct Branches {
    f: Vec<Complex64>,
    plus: Vec<Complex64>,
    minus: Vec<Complex64>,
}

impl Branches {
    fn on(circle: &Circle, fact: &WienerHopfFactorization) -> Self {
        let logs: Vec<(Complex64, Complex64)> = circle
            .points()
            .iter()
            .map(|&z| (fact.interior_exponent(z), fact.exterior_exponent(z)))
            .collect();
        Self {
            f: logs.iter().map(|(i, e)| (e - i).exp()).collect(),
            plus: logs.iter().map(|(i, _)| i.exp()).collect(),
            minus: logs.iter().map(|(_, e)| e.exp()).collect(),
        }
    }
}

/// Node values of `phi` (rows) or `psi` (columns) for every index.
fn phi_values(spec: &LacunarySpec, circle: &Circle, f: &[Complex64]) -> Vec<Vec<Complex64>> {
    let one = Complex64::new(1.0, 0.0);
    let mut out = Vec::new();
    for (a, line) in spec.lines().iter().enumerate() {
        let p = circle.monomial(-line.replacement);
        let h = circle.monomial(-line.index);
        out.push(
            (0..circle.len())
                .map(|k| {
                    let tail = if a < spec.overlap() { one } else { f[k] };
                    f[k] * p[k] - h[k] * tail
                })
                .collect(),
        );
    }
    for row in spec.rows() {
        let t = circle.monomial(-row.index);
        out.push((0..circle.len()).map(|k| (f[k] - 1.0) * t[k]).collect());
    }
    out
}

fn psi_values(spec: &LacunarySpec, circle: &Circle) -> Vec<Vec<Complex64>> {
    let c = spec.overlap();
    let mut out = Vec::new();
    for (b, line) in spec.lines().iter().enumerate() {
        let power = if b < c {
            spec.rows()[b].replacement
        } else {
            line.index
        };
        out.push(circle.monomial(power));
    }
    for (b, row) in spec.rows().iter().enumerate() {
        if b < c {
            out.push(circle.monomial(row.index).iter().map(|v| -v).collect());
        } else {
            out.push(circle.monomial(row.replacement));
        }
    }
    out
}

fn assemble(
    fact: &WienerHopfFactorization,
    spec: &LacunarySpec,
    gap: f64,
    nodes: usize,
) -> ComplexMatrix {
    let index = families(spec);
    let dim = index.len();
    let size = spec.size() as i64;
    let basis = PerturbationBasis::new(fact, spec);
    let torus = Torus::new(1.0, 1.0 - gap, nodes);

    let on_z = Branches::on(&torus.z, fact);
    let on_s = Branches::on(&torus.s, fact);
    let phi_z = phi_values(spec, &torus.z, &on_z.f);
    let phi_s = phi_values(spec, &torus.s, &on_s.f);
    let psi_z = psi_values(spec, &torus.z);

    let s_pow_n = torus.s.monomial(size);
    let mut s_fns = Vec::with_capacity(2 * dim);
    for phi in &phi_s {
        s_fns.push((0..nodes).map(|k| phi[k] * on_s.plus[k]).collect::<Vec<_>>());
        s_fns.push(
            (0..nodes)
                .map(|k| phi[k] * s_pow_n[k] / on_s.minus[k])
                .collect::<Vec<_>>(),
        );
    }
    let slices: Vec<&[Complex64]> = s_fns.iter().map(Vec::as_slice).collect();
    let transforms = torus.cauchy_transforms(&slices);

    let z_pow = torus.z.monomial(-size - 1);
    let z_points = torus.z.points();
    let z_fns: Vec<(Vec<Complex64>, Vec<Complex64>)> = psi_z
        .iter()
        .map(|psi| {
            let first = (0..nodes)
                .map(|k| (on_z.f[k] - 1.0) * psi[k] / (z_points[k] * on_z.minus[k]))
                .collect();
            let second = (0..nodes)
                .map(|k| (on_z.f[k] - 1.0) * psi[k] * z_pow[k] * on_z.plus[k])
                .collect();
            (first, second)
        })
        .collect();

    ComplexMatrix::from_fn(dim, dim, |i, j| {
        let (row_family, a) = index[i];
        let (col_family, b) = index[j];
        let single: Complex64 =
            (0..nodes).map(|k| psi_z[j][k] * phi_z[i][k]).sum::<Complex64>() / nodes as f64;
        let double = torus.pair(&z_fns[j].0, &transforms[2 * i])
            - torus.pair(&z_fns[j].1, &transforms[2 * i + 1]);
        basis.delta(row_family, a, col_family, b) + single - double
    })
    .expect("finite entries")
}

/// The general correction matrix; with no rows it coincides with the line
/// matrix `M`.
pub fn general_correction_matrix(
    fact: &WienerHopfFactorization,
    spec: &LacunarySpec,
    config: &QuadratureConfig,
) -> Result<CorrectionMatrix, AsymptoticsError> {
    let gap = config.general_gap(fact.annulus(), spec.size(), spec.max_abs_index())?;
    let reach = spec.size() as i64 + spec.max_abs_index();
    let start = (2 * reach.max(1) as usize).next_power_of_two();
    let (matrix, report) =
        converge_matrix(start, config, |nodes| assemble(fact, spec, gap, nodes))?;
    CorrectionMatrix::new(CorrectionKind::GeneralN, matrix, report)
}
