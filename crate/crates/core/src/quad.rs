//! Gauss-Legendre quadrature and tensor-product integration over rotated boxes.

use crate::error::{Error, Result};
use crate::grid::RotatedBox;

/// Nodes and weights of an M-point Gauss-Legendre rule on `[a, b]`.
#[derive(Debug, Clone)]
pub struct Quadrature1D {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Quadrature1D {
    /// Build the rule by Newton iteration on the Legendre polynomial roots.
    pub fn gauss_legendre(m: usize, a: f64, b: f64) -> Result<Self> {
        if m < 1 {
            return Err(Error::InvalidArgument("quadrature order must be >= 1".into()));
        }
        if !(a.is_finite() && b.is_finite()) || a >= b {
            return Err(Error::InvalidArgument(format!(
                "invalid quadrature interval [{a}, {b}]"
            )));
        }
        let mut nodes = vec![0.0; m];
        let mut weights = vec![0.0; m];
        let n = m as f64;
        for i in 0..m.div_ceil(2) {
            // Tricomi initial guess for the i-th root of P_m.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n + 0.5)).cos();
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(m, x);
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            let (_, dp) = legendre_with_derivative(m, x);
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[m - 1 - i] = x;
            weights[i] = w;
            weights[m - 1 - i] = w;
        }
        // Map [-1,1] onto [a,b].
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        for i in 0..m {
            nodes[i] = mid + half * nodes[i];
            weights[i] *= half;
        }
        Ok(Self { nodes, weights })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

fn legendre_with_derivative(m: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=m {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Per-axis node/weight sets for one axis split at interior breakpoints.
fn axis_rule(range: (f64, f64), nodes: usize, kinks: Option<&[f64]>) -> Result<(Vec<f64>, Vec<f64>)> {
    let (lo, hi) = range;
    let mut cuts = vec![lo];
    if let Some(ks) = kinks {
        let mut interior: Vec<f64> = ks
            .iter()
            .copied()
            .filter(|&k| k > lo + 1e-14 && k < hi - 1e-14)
            .collect();
        interior.sort_by(|a, b| a.partial_cmp(b).unwrap());
        interior.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
        cuts.extend(interior);
    }
    cuts.push(hi);
    let mut xs = Vec::new();
    let mut ws = Vec::new();
    for pair in cuts.windows(2) {
        let rule = Quadrature1D::gauss_legendre(nodes, pair[0], pair[1])?;
        xs.extend_from_slice(rule.nodes());
        ws.extend_from_slice(rule.weights());
    }
    Ok((xs, ws))
}

/// Tensor Gauss-Legendre integral of `integrand(u, v, tau)` over `bx`,
/// with the rule applied piecewise between the supplied kink breakpoints.
pub fn quad_box(
    integrand: impl Fn(f64, f64, f64) -> f64,
    bx: &RotatedBox,
    nodes_per_axis: usize,
    breakpoints: Option<[&[f64]; 3]>,
) -> Result<f64> {
    if nodes_per_axis < 2 {
        return Err(Error::InvalidArgument(
            "nodes_per_axis must be >= 2".into(),
        ));
    }
    let (xu, wu) = axis_rule(bx.range(0), nodes_per_axis, breakpoints.map(|b| b[0]))?;
    let (xv, wv) = axis_rule(bx.range(1), nodes_per_axis, breakpoints.map(|b| b[1]))?;
    let (xt, wt) = axis_rule(bx.range(2), nodes_per_axis, breakpoints.map(|b| b[2]))?;
    let mut total = 0.0;
    for (u, cu) in xu.iter().zip(&wu) {
        for (v, cv) in xv.iter().zip(&wv) {
            let cuv = cu * cv;
            for (t, ct) in xt.iter().zip(&wt) {
                let f = integrand(*u, *v, *t);
                if !f.is_finite() {
                    return Err(Error::NumericalDomain(format!(
                        "non-finite integrand value at ({u}, {v}, {t})"
                    )));
                }
                total += f * cuv * ct;
            }
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn weights_sum_to_interval_length() {
        for m in [2, 5, 16, 32, 64] {
            let q = Quadrature1D::gauss_legendre(m, -3.0, 7.5).unwrap();
            let s: f64 = q.weights().iter().sum();
            assert_relative_eq!(s, 10.5, max_relative = 1e-12);
            assert!(q.weights().iter().all(|&w| w > 0.0));
        }
    }

    #[test]
    fn polynomial_exactness_degree_2m_minus_1() {
        // M-point rule integrates x^(2M-1) and x^(2M-2) exactly.
        for m in [2usize, 4, 8] {
            let q = Quadrature1D::gauss_legendre(m, 0.0, 1.0).unwrap();
            let d = 2 * m - 2;
            let got = q.integrate(|x| x.powi(d as i32));
            assert_relative_eq!(got, 1.0 / (d as f64 + 1.0), max_relative = 1e-12);
        }
    }

    #[test]
    fn unit_cube_constant() {
        let bx = RotatedBox::new((0.0, 1.0), (0.0, 1.0), (0.0, 1.0)).unwrap();
        let got = quad_box(|_, _, _| 1.0, &bx, 4, None).unwrap();
        assert_relative_eq!(got, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn u_squared_over_unit_cube() {
        let bx = RotatedBox::new((0.0, 1.0), (0.0, 1.0), (0.0, 1.0)).unwrap();
        let got = quad_box(|u, _, _| u * u, &bx, 2, None).unwrap();
        assert_relative_eq!(got, 1.0 / 3.0, max_relative = 1e-12);
    }

    #[test]
    fn breakpoints_split_kinked_integrand() {
        // |u - 1/2| over [0,1]^3 = 1/4; a kink at 1/2 spoils plain GL but the
        // piecewise rule is exact.
        let bx = RotatedBox::new((0.0, 1.0), (0.0, 1.0), (0.0, 1.0)).unwrap();
        let kinks = [0.5];
        let got = quad_box(
            |u, _, _| (u - 0.5).abs(),
            &bx,
            4,
            Some([&kinks, &[], &[]]),
        )
        .unwrap();
        assert_relative_eq!(got, 0.25, max_relative = 1e-12);
    }

    #[test]
    fn non_finite_integrand_is_an_error() {
        let bx = RotatedBox::new((0.0, 1.0), (0.0, 1.0), (0.0, 1.0)).unwrap();
        assert!(quad_box(|u, _, _| 1.0 / (u - u), &bx, 2, None).is_err());
    }

    #[test]
    fn spectral_convergence_on_analytic_integrand() {
        let bx = RotatedBox::new((0.0, 1.0), (0.0, 1.0), (0.0, 1.0)).unwrap();
        let f = |u: f64, v: f64, t: f64| (u * v + t).sin().exp();
        let i4 = quad_box(f, &bx, 4, None).unwrap();
        let i8 = quad_box(f, &bx, 8, None).unwrap();
        let i16 = quad_box(f, &bx, 16, None).unwrap();
        let c1 = (i8 - i4).abs();
        let c2 = (i16 - i8).abs();
        assert!(c2 <= c1 * c1.max(1e-15) || c2 < 1e-14);
    }
}
