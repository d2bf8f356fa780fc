//! The X^{s,b} weight and the grid-path norm.

use serde::Serialize;

use crate::grid::{to_rotated, SpectralField};

/// Dispersion symbol: hyperbolic `a(xi) = xi1^2 - xi2^2` or elliptic
/// `a(xi) = xi1^2 + xi2^2`.  In rotated coordinates these are `2uv` and
/// `u^2 + v^2`; both are even in `xi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SymbolKind {
    Hyperbolic,
    Elliptic,
}

impl SymbolKind {
    pub fn eval_rotated(self, u: f64, v: f64) -> f64 {
        match self {
            SymbolKind::Hyperbolic => 2.0 * u * v,
            SymbolKind::Elliptic => u * u + v * v,
        }
    }

    pub fn eval_xi(self, xi1: f64, xi2: f64) -> f64 {
        match self {
            SymbolKind::Hyperbolic => xi1 * xi1 - xi2 * xi2,
            SymbolKind::Elliptic => xi1 * xi1 + xi2 * xi2,
        }
    }
}

impl std::fmt::Display for SymbolKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SymbolKind::Hyperbolic => write!(f, "hyperbolic"),
            SymbolKind::Elliptic => write!(f, "elliptic"),
        }
    }
}

/// Signature sign, `+1` or `-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl std::fmt::Display for Sign {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Sign::Plus => write!(f, "+"),
            Sign::Minus => write!(f, "-"),
        }
    }
}

/// Parameters of the norm `|| <tau - sigma a(xi)>^b <xi>^s f~ ||_2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormParams {
    pub s: f64,
    pub b: f64,
    pub sign: Sign,
    pub symbol: SymbolKind,
}

impl NormParams {
    pub fn new(s: f64, b: f64, sign: Sign, symbol: SymbolKind) -> Self {
        Self { s, b, sign, symbol }
    }

    pub fn hyperbolic(s: f64, b: f64) -> Self {
        Self::new(s, b, Sign::Plus, SymbolKind::Hyperbolic)
    }

    /// `B = max(1, |b|)`, the constant appearing in the explicit bounds.
    pub fn b_cap(&self) -> f64 {
        self.b.abs().max(1.0)
    }
}

/// Coordinate frame the grid axes are read in: `(xi1, xi2, tau)` or the
/// rotated `(u, v, tau)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frame {
    Standard,
    Rotated,
}

/// The weight `<tau - sigma a>^b <xi>^s` at a rotated-coordinate point.
/// Total: finite for all finite inputs, strictly positive.
pub fn xsb_weight(u: f64, v: f64, tau: f64, params: &NormParams) -> f64 {
    let a = params.symbol.eval_rotated(u, v);
    let m = tau - params.sign.value() * a;
    let bracket_tau = 1.0 + m * m;
    let bracket_xi = 1.0 + u * u + v * v;
    bracket_tau.powf(0.5 * params.b) * bracket_xi.powf(0.5 * params.s)
}

/// Riemann-sum approximation of the X^{s,b} norm of a gridded spectrum.
/// `frame` states how the grid's first two axes are to be interpreted; in the
/// standard frame each sample point is rotated before weighting.
pub fn xsb_norm_grid(field: &SpectralField, params: &NormParams, frame: Frame) -> f64 {
    let g = field.grid();
    let [n1, n2, nt] = g.sizes();
    let mut total = 0.0;
    for k1 in 0..n1 {
        for k2 in 0..n2 {
            let (u, v) = match frame {
                Frame::Standard => to_rotated(g.coord(0, k1), g.coord(1, k2)),
                Frame::Rotated => (g.coord(0, k1), g.coord(1, k2)),
            };
            for kt in 0..nt {
                let tau = g.coord(2, kt);
                let w = xsb_weight(u, v, tau, params);
                total += w * w * field.values()[g.flat(k1, k2, kt)].norm_sqr();
            }
        }
    }
    (total * g.cell_volume()).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid3;
    use approx::assert_relative_eq;
    use num_complex::Complex64;
    use proptest::prelude::*;

    #[test]
    fn unit_at_origin() {
        for (s, b) in [(0.3, -1.2), (-0.5, 0.75), (2.0, 2.0)] {
            let p = NormParams::hyperbolic(s, b);
            assert_eq!(xsb_weight(0.0, 0.0, 0.0, &p), 1.0);
        }
    }

    #[test]
    fn identity_for_zero_exponents() {
        let p = NormParams::hyperbolic(0.0, 0.0);
        for (u, v, t) in [(1.0, -2.0, 3.0), (0.1, 0.2, -7.0)] {
            assert_eq!(xsb_weight(u, v, t, &p), 1.0);
        }
    }

    #[test]
    fn on_shifted_hyperbola() {
        // a = 2uv = 2 at (1,1); tau = 2 puts the modulation bracket at 1.
        let p = NormParams::hyperbolic(0.0, 1.0);
        assert_relative_eq!(xsb_weight(1.0, 1.0, 2.0, &p), 1.0, max_relative = 1e-15);
    }

    #[test]
    fn symbol_forms_agree_across_frames() {
        for sym in [SymbolKind::Hyperbolic, SymbolKind::Elliptic] {
            for (x1, x2) in [(0.3, -1.1), (2.0, 2.0), (-0.7, 0.2)] {
                let (u, v) = crate::grid::to_rotated(x1, x2);
                assert_relative_eq!(
                    sym.eval_xi(x1, x2),
                    sym.eval_rotated(u, v),
                    max_relative = 1e-12,
                    epsilon = 1e-14
                );
                // evenness
                assert_relative_eq!(
                    sym.eval_xi(-x1, -x2),
                    sym.eval_xi(x1, x2),
                    max_relative = 1e-15
                );
            }
        }
    }

    #[test]
    fn zero_field_has_zero_norm() {
        let g = Grid3::cubic(1.0, 8).unwrap();
        let f = SpectralField::zeros(g);
        let p = NormParams::hyperbolic(-0.5, 0.75);
        assert_eq!(xsb_norm_grid(&f, &p, Frame::Standard), 0.0);
    }

    #[test]
    fn zero_exponents_reduce_to_l2() {
        let g = Grid3::cubic(2.0, 8).unwrap();
        let f = SpectralField::from_fn(g, |x, y, t| Complex64::new(x * y + t, x - y)).unwrap();
        let p = NormParams::hyperbolic(0.0, 0.0);
        assert_relative_eq!(
            xsb_norm_grid(&f, &p, Frame::Standard),
            f.l2_norm(),
            max_relative = 1e-14
        );
    }

    #[test]
    fn reflection_swaps_sign() {
        // Norm of f~(-xi,-tau) with sign sigma equals norm of f~ with -sigma.
        let g = Grid3::cubic(2.0, 16).unwrap();
        let f = SpectralField::from_fn(g.clone(), |x, y, t| {
            Complex64::from_polar((-6.0 * (x * x + y * y + t * t)).exp(), 0.3 * x)
        })
        .unwrap();
        // Reflected samples: index k -> n-k, with the k=0 layer wrapping; use a
        // field supported away from the boundary so the wrap carries no mass.
        let [n1, n2, nt] = g.sizes();
        let mut refl = SpectralField::zeros(g.clone());
        for k1 in 1..n1 {
            for k2 in 1..n2 {
                for kt in 1..nt {
                    refl.values_mut()[g.flat(n1 - k1, n2 - k2, nt - kt)] =
                        f.values()[g.flat(k1, k2, kt)];
                }
            }
        }
        let p_plus = NormParams::hyperbolic(-0.4, 0.8);
        let p_minus = NormParams {
            sign: Sign::Minus,
            ..p_plus
        };
        let a = xsb_norm_grid(&f, &p_plus, Frame::Standard);
        let b = xsb_norm_grid(&refl, &p_minus, Frame::Standard);
        assert_relative_eq!(a, b, max_relative = 1e-10);
    }

    proptest! {
        #[test]
        fn weight_positive_and_monotone(
            u in -10.0..10.0f64,
            v in -10.0..10.0f64,
            tau in -10.0..10.0f64,
            s in -2.0..2.0f64,
            b in -2.0..2.0f64,
            ds in 0.0..1.0f64,
            db in 0.0..1.0f64,
        ) {
            let p = NormParams::hyperbolic(s, b);
            let w = xsb_weight(u, v, tau, &p);
            prop_assert!(w > 0.0);
            let p_up_s = NormParams::hyperbolic(s + ds, b);
            let p_up_b = NormParams::hyperbolic(s, b + db);
            prop_assert!(xsb_weight(u, v, tau, &p_up_s) >= w * (1.0 - 1e-12));
            prop_assert!(xsb_weight(u, v, tau, &p_up_b) >= w * (1.0 - 1e-12));
        }
    }
}
