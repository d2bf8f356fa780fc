//! Free evolution `exp(i sigma t a(D))`, a closed-form Gaussian oracle, and
//! the space-time L4 / L2 ratio probe.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fft::centered_synthesis;
use crate::grid::{Grid2, SpatialField2};
use crate::weight::{Sign, SymbolKind};

/// Which side of the transform [`free_propagate`] reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputSide {
    Frequency,
    Space,
}

/// Apply the frequency multiplier `exp(i sigma t a(xi))` to frequency samples
/// `phi_hat`, then optionally synthesize the spatial field on the dual grid.
pub fn free_propagate(
    phi_hat: &SpatialField2,
    t: f64,
    symbol: SymbolKind,
    sign: Sign,
    side: OutputSide,
) -> Result<SpatialField2> {
    if !t.is_finite() {
        return Err(Error::InvalidArgument("propagation time must be finite".into()));
    }
    let g = phi_hat.grid();
    let [n1, n2] = g.sizes();
    let sigma = sign.value();
    let mut vals = phi_hat.values().to_vec();
    for k1 in 0..n1 {
        let x1 = g.coord(0, k1);
        for k2 in 0..n2 {
            let x2 = g.coord(1, k2);
            let a = symbol.eval_xi(x1, x2);
            vals[g.flat(k1, k2)] *= Complex64::from_polar(1.0, sigma * t * a);
        }
    }
    match side {
        OutputSide::Frequency => SpatialField2::new(g.clone(), vals),
        OutputSide::Space => {
            let factor = g.cell_area() / (2.0 * std::f64::consts::PI);
            let mut out = centered_synthesis(&vals, &g.sizes());
            for z in &mut out {
                *z *= factor;
            }
            SpatialField2::new(g.dual(), out)
        }
    }
}

/// Gaussian state given on the frequency side as
/// `phi_hat(xi) = amplitude * exp(-xi^T A xi / 2)` with complex symmetric `A`
/// whose real part is positive definite.  Closed under free evolution, which
/// makes it an exact oracle for the propagated spatial field.
#[derive(Debug, Clone, Copy)]
pub struct GaussianState {
    pub amplitude: Complex64,
    /// `[a11, a12, a22]`.
    pub a: [Complex64; 3],
}

impl GaussianState {
    pub fn new(amplitude: Complex64, a: [Complex64; 3]) -> Result<Self> {
        let re_det = a[0].re * a[2].re - a[1].re * a[1].re;
        if !(a[0].re > 0.0 && re_det > 0.0) {
            return Err(Error::NumericalDomain(
                "gaussian quadratic form must have positive definite real part".into(),
            ));
        }
        Ok(Self { amplitude, a })
    }

    /// Isotropic real state of spatial width `w`: `phi_hat = w^2 exp(-w^2|xi|^2/2)`,
    /// normalized so the spatial field at `t = 0` has `phi(0) = 1`.
    pub fn isotropic(width: f64) -> Result<Self> {
        if !(width.is_finite() && width > 0.0) {
            return Err(Error::InvalidArgument("width must be positive".into()));
        }
        let w2 = width * width;
        Self::new(
            Complex64::new(w2, 0.0),
            [Complex64::new(w2, 0.0), Complex64::new(0.0, 0.0), Complex64::new(w2, 0.0)],
        )
    }

    pub fn eval_hat(&self, xi1: f64, xi2: f64) -> Complex64 {
        let q = self.a[0] * xi1 * xi1 + 2.0 * self.a[1] * xi1 * xi2 + self.a[2] * xi2 * xi2;
        self.amplitude * (-0.5 * q).exp()
    }

    pub fn sample_hat(&self, grid: &Grid2) -> Result<SpatialField2> {
        SpatialField2::from_fn(grid.clone(), |x1, x2| self.eval_hat(x1, x2))
    }

    /// Evolve by the multiplier `exp(i sigma t a(xi))`.
    pub fn evolved(&self, t: f64, symbol: SymbolKind, sign: Sign) -> Self {
        let shift = Complex64::new(0.0, -2.0 * sign.value() * t);
        let mut a = self.a;
        match symbol {
            SymbolKind::Hyperbolic => {
                a[0] += shift;
                a[2] -= shift;
            }
            SymbolKind::Elliptic => {
                a[0] += shift;
                a[2] += shift;
            }
        }
        Self {
            amplitude: self.amplitude,
            a,
        }
    }

    fn det(&self) -> Complex64 {
        self.a[0] * self.a[2] - self.a[1] * self.a[1]
    }

    /// `sqrt(lambda_1) * sqrt(lambda_2)` over the eigenvalues of `A`, each by
    /// the principal branch; continuous in `t` along free evolution, unlike
    /// the principal square root of the determinant.
    fn sqrt_det(&self) -> Complex64 {
        let tr = self.a[0] + self.a[2];
        let disc = (tr * tr - 4.0 * self.det()).sqrt();
        let l1 = 0.5 * (tr + disc);
        let l2 = 0.5 * (tr - disc);
        l1.sqrt() * l2.sqrt()
    }

    /// Spatial field `phi(x) = (2 pi)^{-1} integral exp(i x.xi) phi_hat dxi`,
    /// in closed form.
    pub fn spatial_value(&self, x1: f64, x2: f64) -> Complex64 {
        let det = self.det();
        // A^{-1} = [[a22, -a12], [-a12, a11]] / det
        let q = (self.a[2] * x1 * x1 - 2.0 * self.a[1] * x1 * x2 + self.a[0] * x2 * x2) / det;
        self.amplitude / self.sqrt_det() * (-0.5 * q).exp()
    }

    /// Supremum of the spatial field modulus, attained at the origin.
    pub fn spatial_sup(&self) -> f64 {
        self.amplitude.norm() / self.sqrt_det().norm()
    }

    /// Squared 1/e-width of `|phi|^2` along axis 1: the reciprocal of the
    /// `(1,1)` entry of `Re(A^{-1})`.
    pub fn spatial_width_sq(&self) -> f64 {
        let det = self.det();
        let inv11 = (self.a[2] / det).re;
        1.0 / inv11
    }

    pub fn l2_norm(&self) -> f64 {
        // ||phi||_2 = (2 pi)^{-1} ... equals ||phi_hat||_2 / (2 pi)?  No:
        // Plancherel with the (2 pi)^{-1} convention is isometric, and
        // ||phi_hat||_2^2 = |c|^2 integral exp(-xi^T Re(A) xi) dxi
        //                 = |c|^2 pi / sqrt(det Re A).
        let re_det = self.a[0].re * self.a[2].re - self.a[1].re * self.a[1].re;
        self.amplitude.norm() * (std::f64::consts::PI / re_det.sqrt()).sqrt()
    }
}

/// Sup-norm decay of a narrow Gaussian under the evolution: pairs
/// `(t, sup_x |e^{i sigma t a(D)} phi|)` from the closed-form oracle.
/// Every requested time must be nonzero and positive.
pub fn dispersion_sup(times: &[f64], symbol: SymbolKind, width: f64) -> Result<Vec<(f64, f64)>> {
    if times.is_empty() {
        return Err(Error::InvalidArgument("empty time list".into()));
    }
    if times.iter().any(|&t| !(t.is_finite() && t > 0.0)) {
        return Err(Error::InvalidArgument(
            "dispersion probe times must be positive".into(),
        ));
    }
    let state = GaussianState::isotropic(width)?;
    Ok(times
        .iter()
        .map(|&t| (t, state.evolved(t, symbol, Sign::Plus).spatial_sup()))
        .collect())
}

/// Time window for the space-time L4 norm: midpoint rule with `nt` steps
/// on `[t0, t1]`.
#[derive(Debug, Clone, Copy)]
pub struct TimeWindow {
    pub t0: f64,
    pub t1: f64,
    pub steps: usize,
}

impl TimeWindow {
    pub fn new(t0: f64, t1: f64, steps: usize) -> Result<Self> {
        if !(t0.is_finite() && t1.is_finite() && t1 > t0) || steps == 0 {
            return Err(Error::InvalidArgument(format!(
                "bad time window [{t0}, {t1}] with {steps} steps"
            )));
        }
        Ok(Self { t0, t1, steps })
    }

    pub fn midpoints(&self) -> Vec<f64> {
        let dt = (self.t1 - self.t0) / self.steps as f64;
        (0..self.steps)
            .map(|j| self.t0 + (j as f64 + 0.5) * dt)
            .collect()
    }

    pub fn dt(&self) -> f64 {
        (self.t1 - self.t0) / self.steps as f64
    }
}

/// `||e^{i sigma t a(D)} phi||_{L4(window x R^2)} / ||phi||_{L2}` for
/// frequency-side data `phi_hat`.
pub fn strichartz_ratio(
    phi_hat: &SpatialField2,
    symbol: SymbolKind,
    sign: Sign,
    window: &TimeWindow,
) -> Result<f64> {
    let l2 = phi_hat.l2_norm();
    if l2 == 0.0 {
        return Err(Error::ZeroField);
    }
    let cell_x = phi_hat.grid().dual().cell_area();
    let slabs: Result<Vec<f64>> = window
        .midpoints()
        .par_iter()
        .map(|&t| {
            let u = free_propagate(phi_hat, t, symbol, sign, OutputSide::Space)?;
            Ok(u.values().iter().map(|z| z.norm_sqr().powi(2)).sum::<f64>())
        })
        .collect();
    let total: f64 = slabs?.iter().sum();
    let l4 = (total * cell_x * window.dt()).powf(0.25);
    Ok(l4 / l2)
}

/// Ratio statistics over a data library: `(max, median)` of
/// [`strichartz_ratio`] over the entries.
pub fn ratio_spread(
    library: &[SpatialField2],
    symbol: SymbolKind,
    sign: Sign,
    window: &TimeWindow,
) -> Result<(f64, f64)> {
    if library.is_empty() {
        return Err(Error::InvalidArgument("empty data library".into()));
    }
    let mut ratios: Vec<f64> = library
        .iter()
        .map(|phi| strichartz_ratio(phi, symbol, sign, window))
        .collect::<Result<_>>()?;
    ratios.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let max = *ratios.last().unwrap();
    let median = if ratios.len() % 2 == 1 {
        ratios[ratios.len() / 2]
    } else {
        0.5 * (ratios[ratios.len() / 2 - 1] + ratios[ratios.len() / 2])
    };
    Ok((max, median))
}
