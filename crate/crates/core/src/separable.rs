//! Exact separable spectra: scalar x (profile in u) x (profile in v) x
//! (profile in tau) with piecewise-linear profiles.  Box indicators and the
//! hat functions arising from their correlations are represented without
//! discretization error.

use crate::error::{Error, Result};
use crate::grid::RotatedBox;
use crate::quad::quad_box;
use crate::weight::{xsb_weight, NormParams};

/// Piecewise-linear profile given by sorted breakpoint/value pairs; zero
/// outside the first and last breakpoint.  An indicator of `[a,b]` is the
/// two-point profile `(a,1),(b,1)` (the jump lives at the endpoints).
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinear {
    points: Vec<(f64, f64)>,
}

impl PiecewiseLinear {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidArgument(
                "a profile needs at least two breakpoints".into(),
            ));
        }
        for w in points.windows(2) {
            if !(w[0].0 < w[1].0) {
                return Err(Error::InvalidArgument(
                    "profile breakpoints must be strictly increasing".into(),
                ));
            }
        }
        if points.iter().any(|&(x, y)| !x.is_finite() || !y.is_finite() || y < 0.0) {
            return Err(Error::InvalidArgument(
                "profile values must be finite and nonnegative".into(),
            ));
        }
        Ok(Self { points })
    }

    pub fn indicator(a: f64, b: f64) -> Result<Self> {
        Self::new(vec![(a, 1.0), (b, 1.0)])
    }

    /// Symmetric hat centered at `center`: peak at the center, linear to zero
    /// at `center +- half_width`.
    pub fn hat(center: f64, half_width: f64, peak: f64) -> Result<Self> {
        Self::new(vec![
            (center - half_width, 0.0),
            (center, peak),
            (center + half_width, 0.0),
        ])
    }

    pub fn eval(&self, x: f64) -> f64 {
        let first = self.points[0];
        let last = self.points[self.points.len() - 1];
        if x < first.0 || x > last.0 {
            return 0.0;
        }
        for w in self.points.windows(2) {
            let (x0, y0) = w[0];
            let (x1, y1) = w[1];
            if x <= x1 {
                return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
            }
        }
        last.1
    }

    pub fn support(&self) -> (f64, f64) {
        (self.points[0].0, self.points[self.points.len() - 1].0)
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        self.points.iter().map(|&(x, _)| x).collect()
    }

    /// The profile `x -> self(-x)`.
    pub fn reflected(&self) -> Self {
        let mut pts: Vec<(f64, f64)> = self.points.iter().map(|&(x, y)| (-x, y)).collect();
        pts.reverse();
        Self { points: pts }
    }

    pub fn is_zero(&self) -> bool {
        self.points.iter().all(|&(_, y)| y == 0.0)
    }
}

/// `scale * p_u(u) * p_v(v) * p_tau(tau)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparableSpectrum {
    pub scale: f64,
    pub profile_u: PiecewiseLinear,
    pub profile_v: PiecewiseLinear,
    pub profile_tau: PiecewiseLinear,
}

impl SeparableSpectrum {
    pub fn new(
        scale: f64,
        profile_u: PiecewiseLinear,
        profile_v: PiecewiseLinear,
        profile_tau: PiecewiseLinear,
    ) -> Result<Self> {
        if !(scale.is_finite() && scale >= 0.0) {
            return Err(Error::InvalidArgument(
                "spectrum scale must be finite and nonnegative".into(),
            ));
        }
        Ok(Self {
            scale,
            profile_u,
            profile_v,
            profile_tau,
        })
    }

    /// Indicator of a rotated box.
    pub fn box_indicator(bx: &RotatedBox) -> Result<Self> {
        let (u0, u1) = bx.u_range();
        let (v0, v1) = bx.v_range();
        let (t0, t1) = bx.tau_range();
        Self::new(
            1.0,
            PiecewiseLinear::indicator(u0, u1)?,
            PiecewiseLinear::indicator(v0, v1)?,
            PiecewiseLinear::indicator(t0, t1)?,
        )
    }

    pub fn eval(&self, u: f64, v: f64, tau: f64) -> f64 {
        self.scale * self.profile_u.eval(u) * self.profile_v.eval(v) * self.profile_tau.eval(tau)
    }

    pub fn support_box(&self) -> Result<RotatedBox> {
        RotatedBox::new(
            self.profile_u.support(),
            self.profile_v.support(),
            self.profile_tau.support(),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.scale == 0.0
            || self.profile_u.is_zero()
            || self.profile_v.is_zero()
            || self.profile_tau.is_zero()
    }
}

/// X^{s,b}-type norm of an exact separable spectrum by piecewise tensor
/// quadrature over the support box, split at profile kinks.
pub fn xsb_norm_separable(
    spec: &SeparableSpectrum,
    params: &NormParams,
    nodes: usize,
) -> Result<f64> {
    if spec.is_zero() {
        return Ok(0.0);
    }
    let bx = spec.support_box()?;
    let bu = spec.profile_u.breakpoints();
    let bv = spec.profile_v.breakpoints();
    let bt = spec.profile_tau.breakpoints();
    let integrand = |u: f64, v: f64, t: f64| {
        let w = xsb_weight(u, v, t, params) * spec.eval(u, v, t);
        w * w
    };
    let val = quad_box(
        integrand,
        &bx,
        nodes,
        Some([&bu, &bv, &bt]),
    )?;
    Ok(val.max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::knapp::knapp_box;
    use crate::weight::NormParams;
    use approx::assert_relative_eq;

    #[test]
    fn indicator_eval() {
        let p = PiecewiseLinear::indicator(-1.0, 2.0).unwrap();
        assert_eq!(p.eval(-1.0), 1.0);
        assert_eq!(p.eval(0.5), 1.0);
        assert_eq!(p.eval(2.0), 1.0);
        assert_eq!(p.eval(2.1), 0.0);
        assert_eq!(p.eval(-1.1), 0.0);
    }

    #[test]
    fn hat_eval_and_reflection() {
        let p = PiecewiseLinear::hat(1.0, 2.0, 3.0).unwrap();
        assert_relative_eq!(p.eval(1.0), 3.0);
        assert_relative_eq!(p.eval(0.0), 1.5);
        assert_relative_eq!(p.eval(3.0), 0.0);
        let r = p.reflected();
        assert_relative_eq!(r.eval(-1.0), 3.0);
        assert_relative_eq!(r.eval(0.0), 1.5);
    }

    #[test]
    fn q_box_indicator_l2_norm_is_half() {
        // sqrt(volume) = sqrt(1/4) = 1/2, exactly, for every N.
        for n in [1.0, 4.0, 64.0] {
            let bx = knapp_box(n).unwrap();
            let spec = SeparableSpectrum::box_indicator(&bx).unwrap();
            let p = NormParams::hyperbolic(0.0, 0.0);
            let got = xsb_norm_separable(&spec, &p, 8).unwrap();
            assert_relative_eq!(got, 0.5, max_relative = 1e-12);
        }
    }

    #[test]
    fn empty_spectrum_has_zero_norm() {
        let z = SeparableSpectrum::new(
            0.0,
            PiecewiseLinear::indicator(0.0, 1.0).unwrap(),
            PiecewiseLinear::indicator(0.0, 1.0).unwrap(),
            PiecewiseLinear::indicator(0.0, 1.0).unwrap(),
        )
        .unwrap();
        let p = NormParams::hyperbolic(-0.5, 0.75);
        assert_eq!(xsb_norm_separable(&z, &p, 8).unwrap(), 0.0);
    }

    #[test]
    fn norm_monotone_in_b() {
        let bx = knapp_box(4.0).unwrap();
        let spec = SeparableSpectrum::box_indicator(&bx).unwrap();
        let p0 = NormParams::hyperbolic(-0.5, 0.0);
        let p1 = NormParams::hyperbolic(-0.5, 1.0);
        let n0 = xsb_norm_separable(&spec, &p0, 16).unwrap();
        let n1 = xsb_norm_separable(&spec, &p1, 16).unwrap();
        assert!(n1 >= n0);
    }

    #[test]
    fn quadrature_converges_with_nodes() {
        let bx = knapp_box(16.0).unwrap();
        let spec = SeparableSpectrum::box_indicator(&bx).unwrap();
        let p = NormParams::hyperbolic(-0.5, 0.75);
        let a = xsb_norm_separable(&spec, &p, 16).unwrap();
        let b = xsb_norm_separable(&spec, &p, 32).unwrap();
        let c = xsb_norm_separable(&spec, &p, 64).unwrap();
        assert!((c - b).abs() <= (b - a).abs() + 1e-14);
        assert!((c - b).abs() / c < 1e-10);
    }
}
