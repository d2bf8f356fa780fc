//! Discrete Fourier transforms on centered grids.
//!
//! Grids hold samples at `xi_k = -L + k*delta`, so the plain index-space DFT
//! acquires alternating-sign twiddles and a constant phase per axis.  Two
//! layers are exposed: the unitary transform [`fft3`] (round trip and discrete
//! Plancherel are exact), and continuum-normalized transforms that approximate
//! the Fourier integral with its `(2 pi)^{-3/2}` convention.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::grid::{Grid3, SpectralField};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

/// Apply an unnormalized FFT along `axis` of row-major `data` with shape `sizes`.
fn fft_along_axis(data: &mut [Complex64], sizes: &[usize], axis: usize, direction: Direction) {
    let n = sizes[axis];
    let stride: usize = sizes[axis + 1..].iter().product();
    let outer: usize = sizes[..axis].iter().product();
    let mut planner = FftPlanner::new();
    let fft = match direction {
        Direction::Forward => planner.plan_fft_forward(n),
        Direction::Inverse => planner.plan_fft_inverse(n),
    };
    let mut lane = vec![Complex64::new(0.0, 0.0); n];
    for o in 0..outer {
        let base_o = o * n * stride;
        for i in 0..stride {
            let base = base_o + i;
            for k in 0..n {
                lane[k] = data[base + k * stride];
            }
            fft.process(&mut lane);
            for k in 0..n {
                data[base + k * stride] = lane[k];
            }
        }
    }
}

fn alternate_signs(data: &mut [Complex64], sizes: &[usize]) {
    // Multiply entry (k_0, ..., k_d) by (-1)^(k_0 + ... + k_d).
    let total: usize = sizes.iter().product();
    for flat in 0..total {
        let mut rem = flat;
        let mut parity = 0usize;
        for &s in sizes.iter().rev() {
            parity += rem % s;
            rem /= s;
        }
        if parity % 2 == 1 {
            data[flat] = -data[flat];
        }
    }
}

fn center_phase(sizes: &[usize]) -> f64 {
    // Product over axes of i^n = (-1)^(n/2) for even n.
    let mut p = 1.0;
    for &n in sizes {
        debug_assert!(n % 2 == 0);
        if (n / 2) % 2 == 1 {
            p = -p;
        }
    }
    p
}

/// Plain centered synthesis `S_j = sum_k exp(+i x_j . xi_k) F_k`, where both
/// grids are extent-symmetric and dual to each other.  No volume factors.
pub fn centered_synthesis(values: &[Complex64], sizes: &[usize]) -> Vec<Complex64> {
    let mut data = values.to_vec();
    alternate_signs(&mut data, sizes);
    for axis in 0..sizes.len() {
        fft_along_axis(&mut data, sizes, axis, Direction::Inverse);
    }
    alternate_signs(&mut data, sizes);
    let c = center_phase(sizes);
    if c < 0.0 {
        for z in &mut data {
            *z = -*z;
        }
    }
    data
}

/// Plain centered analysis `F_k = sum_j exp(-i x_j . xi_k) f_j`; the adjoint
/// of [`centered_synthesis`] (their composition is `n_total * identity`).
pub fn centered_analysis(values: &[Complex64], sizes: &[usize]) -> Vec<Complex64> {
    let mut data = values.to_vec();
    alternate_signs(&mut data, sizes);
    for axis in 0..sizes.len() {
        fft_along_axis(&mut data, sizes, axis, Direction::Forward);
    }
    alternate_signs(&mut data, sizes);
    let c = center_phase(sizes);
    if c < 0.0 {
        for z in &mut data {
            *z = -*z;
        }
    }
    data
}

/// Unitary centered DFT of a spectral field.  `forward` followed by `inverse`
/// is the identity, and the discrete Plancherel identity holds: the sum of
/// squared moduli times the cell volume is preserved (the output is reported
/// on the same grid).
pub fn fft3(field: &SpectralField, direction: Direction) -> Result<SpectralField> {
    let sizes = field.grid().sizes();
    let scale = 1.0 / (field.grid().len() as f64).sqrt();
    let mut out = match direction {
        Direction::Forward => centered_analysis(field.values(), &sizes),
        Direction::Inverse => centered_synthesis(field.values(), &sizes),
    };
    for z in &mut out {
        *z *= scale;
    }
    SpectralField::new(field.grid().clone(), out)
}

/// Grid dual to `g` under the discrete pairing: extents `pi / delta`, same sizes.
pub fn dual_grid3(g: &Grid3) -> Grid3 {
    let d = g.spacings();
    let e = [
        std::f64::consts::PI / d[0],
        std::f64::consts::PI / d[1],
        std::f64::consts::PI / d[2],
    ];
    Grid3::new(e, g.sizes()).expect("dual of a valid grid is valid")
}

/// Continuum-normalized inverse transform: approximates
/// `(2 pi)^{-3/2} * integral exp(+i x.xi) F(xi) dxi` on the dual grid.
pub fn inverse_ft3(field: &SpectralField) -> Result<SpectralField> {
    let g = field.grid();
    let factor = (2.0 * std::f64::consts::PI).powf(-1.5) * g.cell_volume();
    let mut out = centered_synthesis(field.values(), &g.sizes());
    for z in &mut out {
        *z *= factor;
    }
    SpectralField::new(dual_grid3(g), out)
}

/// Continuum-normalized forward transform, inverse of [`inverse_ft3`].
pub fn forward_ft3(field: &SpectralField) -> Result<SpectralField> {
    let g = field.grid();
    let factor = (2.0 * std::f64::consts::PI).powf(-1.5) * g.cell_volume();
    let mut out = centered_analysis(field.values(), &g.sizes());
    for z in &mut out {
        *z *= factor;
    }
    SpectralField::new(dual_grid3(g), out)
}

/// Discrete approximation of the continuum convolution
/// `(a * b)(xi_m) = integral a(eta) b(xi_m - eta) d eta` on the common grid.
/// Supports must stay inside the inner half of the grid to avoid wrap-around.
pub fn convolve3(a: &SpectralField, b: &SpectralField) -> Result<SpectralField> {
    if a.grid() != b.grid() {
        return Err(Error::GridMismatch(
            "convolution requires a common grid".into(),
        ));
    }
    let g = a.grid();
    let sizes = g.sizes();
    let n_total = g.len() as f64;
    let mut fa = a.values().to_vec();
    let mut fb = b.values().to_vec();
    for axis in 0..3 {
        fft_along_axis(&mut fa, &sizes, axis, Direction::Forward);
        fft_along_axis(&mut fb, &sizes, axis, Direction::Forward);
    }
    let scale = g.cell_volume() / n_total;
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= *y * scale;
    }
    for axis in 0..3 {
        fft_along_axis(&mut fa, &sizes, axis, Direction::Inverse);
    }
    // The centered index origin sits at n/2, so the circular result is rolled
    // by half the grid along each axis.
    let mut out = vec![Complex64::new(0.0, 0.0); fa.len()];
    let [n1, n2, nt] = sizes;
    for k1 in 0..n1 {
        let s1 = (k1 + n1 / 2) % n1;
        for k2 in 0..n2 {
            let s2 = (k2 + n2 / 2) % n2;
            for kt in 0..nt {
                let st = (kt + nt / 2) % nt;
                out[g.flat(k1, k2, kt)] = fa[(s1 * n2 + s2) * nt + st];
            }
        }
    }
    SpectralField::new(g.clone(), out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_field(grid: Grid3, seed: u64) -> SpectralField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let vals = (0..grid.len())
            .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        SpectralField::new(grid, vals).unwrap()
    }

    #[test]
    fn round_trip_identity_16() {
        let f = random_field(Grid3::cubic(2.0, 16).unwrap(), 1);
        let g = fft3(&fft3(&f, Direction::Forward).unwrap(), Direction::Inverse).unwrap();
        let num: f64 = f
            .values()
            .iter()
            .zip(g.values())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        let den: f64 = f.values().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        assert!(num / den < 1e-12);
    }

    #[test]
    fn constant_field_concentrates_at_zero_frequency() {
        let grid = Grid3::cubic(1.0, 8).unwrap();
        let f = SpectralField::from_fn(grid.clone(), |_, _, _| Complex64::new(1.0, 0.0)).unwrap();
        let hat = fft3(&f, Direction::Forward).unwrap();
        let dc = grid.flat(4, 4, 4); // center index = zero frequency
        let total: f64 = hat.values().iter().map(|z| z.norm_sqr()).sum();
        assert_relative_eq!(hat.values()[dc].norm_sqr(), total, max_relative = 1e-12);
    }

    #[test]
    fn plancherel_32() {
        let f = random_field(Grid3::cubic(3.0, 32).unwrap(), 2);
        let hat = fft3(&f, Direction::Forward).unwrap();
        assert_relative_eq!(hat.l2_norm(), f.l2_norm(), max_relative = 1e-10);
    }

    #[test]
    fn unitarity_over_random_fields() {
        for seed in 0..100 {
            let f = random_field(Grid3::cubic(1.5, 8).unwrap(), seed);
            let hat = fft3(&f, Direction::Forward).unwrap();
            let rel = (hat.l2_norm() - f.l2_norm()).abs() / f.l2_norm();
            assert!(rel <= 1e-10, "seed {seed}: rel {rel}");
        }
    }

    #[test]
    fn continuum_round_trip() {
        let f = random_field(Grid3::cubic(2.0, 16).unwrap(), 3);
        let back = forward_ft3(&inverse_ft3(&f).unwrap()).unwrap();
        for (a, b) in f.values().iter().zip(back.values()) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn continuum_transform_matches_gaussian() {
        // 1D-separable Gaussian: exp(-(x^2+y^2+t^2)/2) transforms to itself.
        let grid = Grid3::cubic(8.0, 32).unwrap();
        let f = SpectralField::from_fn(grid, |x, y, t| {
            Complex64::new((-0.5 * (x * x + y * y + t * t)).exp(), 0.0)
        })
        .unwrap();
        let hat = forward_ft3(&f).unwrap();
        let g = hat.grid().clone();
        let [n1, n2, nt] = g.sizes();
        for k1 in (0..n1).step_by(5) {
            for k2 in (0..n2).step_by(7) {
                for kt in (0..nt).step_by(3) {
                    let p = g.point(k1, k2, kt);
                    let want = (-0.5 * (p[0] * p[0] + p[1] * p[1] + p[2] * p[2])).exp();
                    let got = hat.values()[g.flat(k1, k2, kt)];
                    // The floor is periodization of the Gaussian tail, ~3e-9
                    // at the edge of this dual grid.
                    assert!((got.re - want).abs() < 1e-8, "{:?}", p);
                    assert!(got.im.abs() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn convolution_of_centered_indicators() {
        // Indicators of [-1/2,1/2)^3 and (-1/2,1/2]^3 convolved: a product of
        // hats, exactly, at lattice points (the two opposite half-open
        // samplings make the Riemann sum an exact interval-overlap count).
        let grid = Grid3::cubic(4.0, 64).unwrap();
        let left = SpectralField::from_fn(grid.clone(), |x, y, t| {
            let inside = x >= -0.5 && x < 0.5 && y >= -0.5 && y < 0.5 && t >= -0.5 && t < 0.5;
            Complex64::new(if inside { 1.0 } else { 0.0 }, 0.0)
        })
        .unwrap();
        let right = SpectralField::from_fn(grid.clone(), |x, y, t| {
            let inside = x > -0.5 && x <= 0.5 && y > -0.5 && y <= 0.5 && t > -0.5 && t <= 0.5;
            Complex64::new(if inside { 1.0 } else { 0.0 }, 0.0)
        })
        .unwrap();
        let c = convolve3(&left, &right).unwrap();
        let hat = |x: f64| (1.0 - x.abs()).max(0.0);
        let [n1, n2, nt] = grid.sizes();
        for k1 in (0..n1).step_by(9) {
            for k2 in (0..n2).step_by(11) {
                for kt in (0..nt).step_by(7) {
                    let p = grid.point(k1, k2, kt);
                    let want = hat(p[0]) * hat(p[1]) * hat(p[2]);
                    let got = c.values()[grid.flat(k1, k2, kt)].re;
                    assert!((got - want).abs() < 1e-10, "{:?}: {got} vs {want}", p);
                }
            }
        }
    }
}
