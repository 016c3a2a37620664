//! Trapezoidal rules on circles and the node machinery shared by the
//! correction-matrix builders.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::{AsymptoticsError, QuadratureConfig, QuadratureReport};
use crate::linalg::ComplexMatrix;

/// Equispaced nodes `z_k = r exp(2 i pi k / n)`.
#[derive(Debug, Clone)]
pub(crate) struct Circle {
    radius: f64,
    roots: Vec<Complex64>,
}

impl Circle {
    pub fn new(radius: f64, nodes: usize) -> Self {
        let roots = (0..nodes)
            .map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / nodes as f64))
            .collect();
        Self { radius, roots }
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn point(&self, k: usize) -> Complex64 {
        self.roots[k] * self.radius
    }

    pub fn points(&self) -> Vec<Complex64> {
        (0..self.len()).map(|k| self.point(k)).collect()
    }

    /// Unit-modulus part of `z_k^m`, from the root table.
    pub fn phase(&self, k: usize, m: i64) -> Complex64 {
        let n = self.len() as i64;
        self.roots[((k as i64 % n) * m.rem_euclid(n)).rem_euclid(n) as usize]
    }

    /// `factor_k * z_k^m` with the radius part `r^m` split off into the log scale.
    pub fn monomial_times(&self, m: i64, factor: &[Complex64]) -> NodeFn {
        NodeFn {
            values: factor
                .iter()
                .enumerate()
                .map(|(k, f)| f * self.phase(k, m))
                .collect(),
            log_scale: m as f64 * self.radius.ln(),
        }
    }

    /// `z_k^m` with the full modulus applied.
    pub fn monomial(&self, m: i64) -> Vec<Complex64> {
        let scale = (m as f64 * self.radius.ln()).exp();
        (0..self.len()).map(|k| self.phase(k, m) * scale).collect()
    }

    pub fn map<F>(&self, f: F) -> Vec<Complex64>
    where
        F: Fn(Complex64) -> Complex64 + Sync,
    {
        (0..self.len()).into_par_iter().map(|k| f(self.point(k))).collect()
    }
}

/// Node values times `exp(log_scale)`.
#[derive(Debug, Clone)]
pub(crate) struct NodeFn {
    pub values: Vec<Complex64>,
    pub log_scale: f64,
}

/// Inner sums of `∮∮ A(z) B(s) / (z - s)` over the torus `z x s`.
pub(crate) struct Torus {
    pub z: Circle,
    pub s: Circle,
}

impl Torus {
    pub fn new(radius_z: f64, radius_s: f64, nodes: usize) -> Self {
        Self {
            z: Circle::new(radius_z, nodes),
            s: Circle::new(radius_s, nodes),
        }
    }

    /// For each `B`, the values `z_k (1/n) sum_j B_j s_j / (z_k - s_j)`.
    pub fn cauchy_transforms(&self, bs: &[&[Complex64]]) -> Vec<Vec<Complex64>> {
        let n = self.s.len();
        let s_points = self.s.points();
        let weighted: Vec<Vec<Complex64>> = bs
            .iter()
            .map(|b| b.iter().zip(&s_points).map(|(v, s)| v * s).collect())
            .collect();
        let scale = 1.0 / n as f64;
        let per_z: Vec<Vec<Complex64>> = (0..self.z.len())
            .into_par_iter()
            .map(|k| {
                let z = self.z.point(k);
                let mut acc = vec![Complex64::new(0.0, 0.0); bs.len()];
                for (j, s) in s_points.iter().enumerate() {
                    let w = (z - s).inv();
                    for (a, b) in acc.iter_mut().zip(&weighted) {
                        *a += b[j] * w;
                    }
                }
                acc.iter().map(|a| a * z * scale).collect()
            })
            .collect();
        (0..bs.len())
            .map(|i| per_z.iter().map(|row| row[i]).collect())
            .collect()
    }

    /// `(1/n) sum_k a_k t_k`, with `t` from [`Torus::cauchy_transforms`].
    pub fn pair(&self, a: &[Complex64], transform: &[Complex64]) -> Complex64 {
        let sum: Complex64 = a.iter().zip(transform).map(|(x, y)| x * y).sum();
        sum / self.z.len() as f64
    }
}

/// `(1/2i pi) ∮_{|z|=radius} g(z) dz` by the trapezoidal rule, doubling the
/// node count until the relative change drops below `config.tol`.
pub fn circle_quadrature<F>(
    g: F,
    radius: f64,
    config: &QuadratureConfig,
) -> Result<Complex64, AsymptoticsError>
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    config.validate()?;
    let rule = |n: usize| {
        let circle = Circle::new(radius, n);
        let sum: Complex64 = circle
            .map(|z| g(z) * z)
            .into_iter()
            .sum();
        sum / n as f64
    };
    converge_scalar(config, rule)
}

/// `(1/2i pi)^2 ∮∮ g(z, s) ds dz` over `|z| = radius_z`, `|s| = radius_s`
/// with a tensor-product trapezoidal rule.
pub fn double_circle_quadrature<F>(
    g: F,
    radius_z: f64,
    radius_s: f64,
    config: &QuadratureConfig,
) -> Result<Complex64, AsymptoticsError>
where
    F: Fn(Complex64, Complex64) -> Complex64 + Sync,
{
    config.validate()?;
    if (radius_z - radius_s).abs() <= 1e-14 * radius_z.max(radius_s) {
        return Err(AsymptoticsError::EqualRadii(radius_z));
    }
    let rule = |n: usize| {
        let torus = Torus::new(radius_z, radius_s, n);
        let s_points = torus.s.points();
        let rows: Vec<Complex64> = torus.z.map(|z| {
            let inner: Complex64 = s_points.iter().map(|&s| g(z, s) * s).sum();
            inner * z
        });
        rows.into_iter().sum::<Complex64>() / (n * n) as f64
    };
    converge_scalar(config, rule)
}

fn converge_scalar<F>(config: &QuadratureConfig, rule: F) -> Result<Complex64, AsymptoticsError>
where
    F: Fn(usize) -> Complex64,
{
    let mut nodes = config.nodes;
    let mut previous = rule(nodes);
    let mut change = f64::INFINITY;
    for _ in 0..config.max_doublings {
        nodes *= 2;
        let current = rule(nodes);
        change = (current - previous).norm() / current.norm().max(1.0);
        previous = current;
        if change < config.tol {
            return Ok(current);
        }
    }
    Err(AsymptoticsError::NoConvergence {
        value: previous,
        change,
        nodes,
        entry: None,
    })
}

/// Rebuilds a matrix at doubling node counts until every entry settles
/// (relative to `max(1, |entry|)`).
pub(crate) fn converge_matrix<F>(
    start: usize,
    config: &QuadratureConfig,
    build: F,
) -> Result<(ComplexMatrix, QuadratureReport), AsymptoticsError>
where
    F: Fn(usize) -> ComplexMatrix,
{
    let mut nodes = start.max(config.nodes).next_power_of_two();
    let mut previous = build(nodes);
    if previous.rows() == 0 || previous.cols() == 0 {
        return Ok((previous, QuadratureReport { nodes: 0, change: 0.0 }));
    }
    let mut worst = (f64::INFINITY, (0, 0));
    for _ in 0..config.max_doublings {
        nodes *= 2;
        let current = build(nodes);
        worst = (0.0, (0, 0));
        for i in 0..current.rows() {
            for j in 0..current.cols() {
                let c = current[(i, j)];
                let change = (c - previous[(i, j)]).norm() / c.norm().max(1.0);
                if !(change <= worst.0) {
                    worst = (change, (i, j));
                }
            }
        }
        previous = current;
        if worst.0 < config.tol {
            return Ok((
                previous,
                QuadratureReport {
                    nodes,
                    change: worst.0,
                },
            ));
        }
    }
    Err(AsymptoticsError::NoConvergence {
        value: previous[worst.1],
        change: worst.0,
        nodes,
        entry: Some(worst.1),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn single_circle_examples() {
        let cfg = QuadratureConfig::default();
        let v = circle_quadrature(|z| z.inv(), 0.7, &cfg).unwrap();
        assert!((v - 1.0).norm() < 1e-14);
        let v = circle_quadrature(|_| c(1.0, 0.0), 2.0, &cfg).unwrap();
        assert!(v.norm() < 1e-14);
        let v = circle_quadrature(|z| z.exp() / (z * z * z), 1.0, &cfg).unwrap();
        assert!((v - 0.5).norm() < 1e-14);
    }

    #[test]
    fn double_circle_examples() {
        let cfg = QuadratureConfig::default();
        let v = double_circle_quadrature(|z, s| (z - s).inv(), 0.8, 0.4, &cfg).unwrap();
        assert!(v.norm() < 1e-14);
        // Inner residue at s = 0 leaves 1/z^2, whose outer integral vanishes.
        let v = double_circle_quadrature(|z, s| (s * z * (z - s)).inv(), 0.8, 0.4, &cfg).unwrap();
        assert!(v.norm() < 1e-14);
        // Inner residue at s = 0 leaves 1/z^2; with an extra z the outer picks 1.
        let v = double_circle_quadrature(|z, s| z * (s * z * (z - s)).inv(), 0.8, 0.4, &cfg).unwrap();
        assert!((v - 1.0).norm() < 1e-14);
        let g = |z: Complex64, s: Complex64| (1.0 + 0.3 / s) / ((1.0 + 0.3 / z) * (z - s));
        let v = double_circle_quadrature(g, 1.5, 2.5, &cfg).unwrap();
        assert!((v - 0.3).norm() < 1e-13, "{v}");
    }

    #[test]
    fn equal_radii_rejected() {
        let cfg = QuadratureConfig::default();
        assert_eq!(
            double_circle_quadrature(|z, s| z + s, 0.5, 0.5, &cfg),
            Err(AsymptoticsError::EqualRadii(0.5))
        );
    }

    #[test]
    fn non_convergence_carries_the_last_value() {
        let cfg = QuadratureConfig {
            max_doublings: 1,
            ..Default::default()
        };
        // Pole just outside the contour: far too slow for two levels.
        let err = circle_quadrature(|z| (1.0001 - z).inv(), 1.0, &cfg).unwrap_err();
        match err {
            AsymptoticsError::NoConvergence { change, nodes, .. } => {
                assert!(change > cfg.tol);
                assert_eq!(nodes, 128);
            }
            other => panic!("{other}"),
        }
    }

    #[test]
    fn monomials_use_exact_phases() {
        let circle = Circle::new(0.5, 16);
        for k in 0..16 {
            assert_eq!(circle.phase(k, 16), c(1.0, 0.0));
            assert_eq!(circle.phase(k, -3), circle.phase((16 - (3 * k) % 16) % 16, 1));
        }
        let f = circle.monomial_times(-4, &[c(1.0, 0.0); 16]);
        assert!((f.log_scale - 4.0 * 2f64.ln()).abs() < 1e-15);
        let full = circle.monomial(-4);
        assert!((full[3] - circle.point(3).powi(-4)).norm() < 1e-12);
    }

    #[test]
    fn cauchy_transform_matches_direct_sum() {
        let torus = Torus::new(0.9, 0.6, 256);
        let b: Vec<Complex64> = torus.s.points().iter().map(|s| s * s + 1.0).collect();
        let a: Vec<Complex64> = torus.z.points().iter().map(|z| z.inv()).collect();
        let t = torus.cauchy_transforms(&[&b]);
        let fast = torus.pair(&a, &t[0]);
        let cfg = QuadratureConfig {
            nodes: 32,
            ..Default::default()
        };
        let slow = double_circle_quadrature(|z, s| (s * s + 1.0) / (z * (z - s)), 0.9, 0.6, &cfg)
            .unwrap();
        assert!((fast - slow).norm() < 1e-13);
    }
}
