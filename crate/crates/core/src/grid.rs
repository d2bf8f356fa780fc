//! Uniform symmetric grids for space-time spectra and the boxes used by the
//! counterexample construction.

use num_complex::Complex64;

use crate::error::{Error, Result};

fn check_axis(extent: f64, size: usize, axis: &str) -> Result<()> {
    if !(extent.is_finite() && extent > 0.0) {
        return Err(Error::InvalidGrid(format!(
            "extent along {axis} must be positive and finite, got {extent}"
        )));
    }
    if size < 8 || size % 2 != 0 {
        return Err(Error::InvalidGrid(format!(
            "size along {axis} must be even and >= 8, got {size}"
        )));
    }
    Ok(())
}

/// Uniform grid on the symmetric box `[-L1,L1) x [-L2,L2) x [-Lt,Lt)` with
/// points `xi_k = -L + k*delta`, `delta = 2L/n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid3 {
    extents: [f64; 3],
    sizes: [usize; 3],
}

impl Grid3 {
    pub fn new(extents: [f64; 3], sizes: [usize; 3]) -> Result<Self> {
        for (i, axis) in ["xi1", "xi2", "tau"].iter().enumerate() {
            check_axis(extents[i], sizes[i], axis)?;
        }
        Ok(Self { extents, sizes })
    }

    /// Cubic grid: same extent and size along all three axes.
    pub fn cubic(extent: f64, size: usize) -> Result<Self> {
        Self::new([extent; 3], [size; 3])
    }

    pub fn extents(&self) -> [f64; 3] {
        self.extents
    }

    pub fn sizes(&self) -> [usize; 3] {
        self.sizes
    }

    pub fn spacings(&self) -> [f64; 3] {
        [
            2.0 * self.extents[0] / self.sizes[0] as f64,
            2.0 * self.extents[1] / self.sizes[1] as f64,
            2.0 * self.extents[2] / self.sizes[2] as f64,
        ]
    }

    pub fn cell_volume(&self) -> f64 {
        let d = self.spacings();
        d[0] * d[1] * d[2]
    }

    pub fn len(&self) -> usize {
        self.sizes[0] * self.sizes[1] * self.sizes[2]
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Coordinate of sample `k` along `axis`.
    pub fn coord(&self, axis: usize, k: usize) -> f64 {
        let d = 2.0 * self.extents[axis] / self.sizes[axis] as f64;
        -self.extents[axis] + k as f64 * d
    }

    /// Row-major flat index, `k1` slowest, `kt` fastest.
    pub fn flat(&self, k1: usize, k2: usize, kt: usize) -> usize {
        (k1 * self.sizes[1] + k2) * self.sizes[2] + kt
    }

    pub fn point(&self, k1: usize, k2: usize, kt: usize) -> [f64; 3] {
        [self.coord(0, k1), self.coord(1, k2), self.coord(2, kt)]
    }

    /// Spacings of the dual (space-time) grid under the discrete Fourier pairing.
    pub fn dual_spacings(&self) -> [f64; 3] {
        let d = self.spacings();
        [
            2.0 * std::f64::consts::PI / (self.sizes[0] as f64 * d[0]),
            2.0 * std::f64::consts::PI / (self.sizes[1] as f64 * d[1]),
            2.0 * std::f64::consts::PI / (self.sizes[2] as f64 * d[2]),
        ]
    }

    pub fn dual_cell_volume(&self) -> f64 {
        let d = self.dual_spacings();
        d[0] * d[1] * d[2]
    }
}

/// Complex samples of a space-time Fourier transform on a [`Grid3`].
#[derive(Debug, Clone)]
pub struct SpectralField {
    grid: Grid3,
    values: Vec<Complex64>,
}

impl SpectralField {
    pub fn new(grid: Grid3, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "value count {} does not match grid size {}",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NumericalDomain(
                "non-finite sample in spectral field".into(),
            ));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Grid3) -> Self {
        let n = grid.len();
        Self {
            grid,
            values: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    pub fn from_fn(grid: Grid3, f: impl Fn(f64, f64, f64) -> Complex64) -> Result<Self> {
        let [n1, n2, nt] = grid.sizes();
        let mut values = Vec::with_capacity(grid.len());
        for k1 in 0..n1 {
            for k2 in 0..n2 {
                for kt in 0..nt {
                    let p = grid.point(k1, k2, kt);
                    values.push(f(p[0], p[1], p[2]));
                }
            }
        }
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &Grid3 {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// Discrete L2 norm with the grid's cell volume as measure.
    pub fn l2_norm(&self) -> f64 {
        let s: f64 = self.values.iter().map(|z| z.norm_sqr()).sum();
        (s * self.grid.cell_volume()).sqrt()
    }

    /// True if any sample on the outermost layer of the grid is nonzero
    /// (relative to the field's maximum) -- the aliasing hazard flag.
    pub fn support_touches_boundary(&self, rel_tol: f64) -> bool {
        let max = self
            .values
            .iter()
            .map(|z| z.norm())
            .fold(0.0_f64, f64::max);
        if max == 0.0 {
            return false;
        }
        let [n1, n2, nt] = self.grid.sizes();
        for k1 in 0..n1 {
            for k2 in 0..n2 {
                for kt in 0..nt {
                    let edge = k1 == 0 || k1 == n1 - 1 || k2 == 0 || k2 == n2 - 1 || kt == 0
                        || kt == nt - 1;
                    if edge && self.values[self.grid.flat(k1, k2, kt)].norm() > rel_tol * max {
                        return true;
                    }
                }
            }
        }
        false
    }
}

/// Two-dimensional analogue of [`Grid3`], for initial data and propagated states.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid2 {
    extents: [f64; 2],
    sizes: [usize; 2],
}

impl Grid2 {
    pub fn new(extents: [f64; 2], sizes: [usize; 2]) -> Result<Self> {
        for (i, axis) in ["x1", "x2"].iter().enumerate() {
            check_axis(extents[i], sizes[i], axis)?;
        }
        Ok(Self { extents, sizes })
    }

    pub fn square(extent: f64, size: usize) -> Result<Self> {
        Self::new([extent; 2], [size; 2])
    }

    pub fn extents(&self) -> [f64; 2] {
        self.extents
    }

    pub fn sizes(&self) -> [usize; 2] {
        self.sizes
    }

    pub fn spacings(&self) -> [f64; 2] {
        [
            2.0 * self.extents[0] / self.sizes[0] as f64,
            2.0 * self.extents[1] / self.sizes[1] as f64,
        ]
    }

    pub fn cell_area(&self) -> f64 {
        let d = self.spacings();
        d[0] * d[1]
    }

    pub fn len(&self) -> usize {
        self.sizes[0] * self.sizes[1]
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn coord(&self, axis: usize, k: usize) -> f64 {
        let d = 2.0 * self.extents[axis] / self.sizes[axis] as f64;
        -self.extents[axis] + k as f64 * d
    }

    pub fn flat(&self, k1: usize, k2: usize) -> usize {
        k1 * self.sizes[1] + k2
    }

    /// The grid dual to this one under the discrete Fourier pairing.
    pub fn dual(&self) -> Grid2 {
        let d = self.spacings();
        let e0 = std::f64::consts::PI / d[0];
        let e1 = std::f64::consts::PI / d[1];
        Grid2 {
            extents: [e0, e1],
            sizes: self.sizes,
        }
    }
}

/// Complex samples of a two-dimensional field, on either side of the transform.
#[derive(Debug, Clone)]
pub struct SpatialField2 {
    grid: Grid2,
    values: Vec<Complex64>,
}

impl SpatialField2 {
    pub fn new(grid: Grid2, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "value count {} does not match grid size {}",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NumericalDomain(
                "non-finite sample in 2d field".into(),
            ));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Grid2, f: impl Fn(f64, f64) -> Complex64) -> Result<Self> {
        let [n1, n2] = grid.sizes();
        let mut values = Vec::with_capacity(grid.len());
        for k1 in 0..n1 {
            for k2 in 0..n2 {
                values.push(f(grid.coord(0, k1), grid.coord(1, k2)));
            }
        }
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &Grid2 {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn l2_norm(&self) -> f64 {
        let s: f64 = self.values.iter().map(|z| z.norm_sqr()).sum();
        (s * self.grid.cell_area()).sqrt()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Axis-aligned box in the orthonormal rotated coordinates
/// `u = (xi1+xi2)/sqrt(2)`, `v = (xi1-xi2)/sqrt(2)`, `tau`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotatedBox {
    ranges: [(f64, f64); 3],
}

impl RotatedBox {
    pub fn new(u: (f64, f64), v: (f64, f64), tau: (f64, f64)) -> Result<Self> {
        for (lo, hi) in [u, v, tau] {
            if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
                return Err(Error::InvalidArgument(format!(
                    "degenerate box range [{lo}, {hi}]"
                )));
            }
        }
        Ok(Self {
            ranges: [u, v, tau],
        })
    }

    pub fn range(&self, axis: usize) -> (f64, f64) {
        self.ranges[axis]
    }

    pub fn u_range(&self) -> (f64, f64) {
        self.ranges[0]
    }

    pub fn v_range(&self) -> (f64, f64) {
        self.ranges[1]
    }

    pub fn tau_range(&self) -> (f64, f64) {
        self.ranges[2]
    }

    pub fn volume(&self) -> f64 {
        self.ranges
            .iter()
            .map(|(lo, hi)| hi - lo)
            .product()
    }

    pub fn contains(&self, u: f64, v: f64, tau: f64) -> bool {
        let p = [u, v, tau];
        self.ranges
            .iter()
            .zip(p)
            .all(|(&(lo, hi), x)| lo <= x && x <= hi)
    }
}

/// Rotation between the standard frequency frame `(xi1, xi2)` and the
/// orthonormal rotated frame `(u, v)`; the Jacobian is 1 in both directions.
pub fn to_rotated(xi1: f64, xi2: f64) -> (f64, f64) {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    ((xi1 + xi2) * r, (xi1 - xi2) * r)
}

pub fn to_standard(u: f64, v: f64) -> (f64, f64) {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    ((u + v) * r, (u - v) * r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_points_are_extent_symmetric() {
        let g = Grid3::cubic(4.0, 16).unwrap();
        assert_eq!(g.coord(0, 0), -4.0);
        assert_eq!(g.coord(0, 8), 0.0);
        let d = g.spacings();
        assert!((d[0] - 0.5).abs() < 1e-15);
        assert!((g.coord(0, 15) - (4.0 - 0.5)).abs() < 1e-15);
    }

    #[test]
    fn grid_rejects_odd_or_small_sizes() {
        assert!(Grid3::cubic(1.0, 7).is_err());
        assert!(Grid3::cubic(1.0, 9).is_err());
        assert!(Grid3::cubic(1.0, 6).is_err());
        assert!(Grid3::cubic(-1.0, 16).is_err());
    }

    #[test]
    fn field_rejects_wrong_count() {
        let g = Grid3::cubic(1.0, 8).unwrap();
        assert!(SpectralField::new(g, vec![Complex64::new(1.0, 0.0); 7]).is_err());
    }

    #[test]
    fn rotation_round_trip() {
        let (u, v) = to_rotated(1.3, -0.4);
        let (x, y) = to_standard(u, v);
        assert!((x - 1.3).abs() < 1e-15);
        assert!((y + 0.4).abs() < 1e-15);
    }

    #[test]
    fn box_volume() {
        let b = RotatedBox::new((0.0, 2.0), (-1.0, 1.0), (0.0, 0.5)).unwrap();
        assert_eq!(b.volume(), 2.0);
        assert!(RotatedBox::new((1.0, 1.0), (0.0, 1.0), (0.0, 1.0)).is_err());
    }
}
