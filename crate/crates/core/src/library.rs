//! Deterministic test-data families: Gaussians, smooth bumps, and seeded
//! random band-limited spectra.  All entries are frequency-side samples.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::grid::{Grid2, Grid3, SpatialField2, SpectralField};

fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller from two uniforms.
    let u1: f64 = rng.random::<f64>().max(1e-300);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

fn complex_normal(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(standard_normal(rng), standard_normal(rng))
}

/// Random spectrum with unit-variance complex Gaussian entries supported where
/// every index offset from the grid center is below `support_frac` of the
/// half-size.  `support_frac < 1/2` keeps the support strictly inside the
/// inner half of the grid.
pub fn random_band_limited_3(grid: &Grid3, seed: u64, support_frac: f64) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let [n1, n2, nt] = grid.sizes();
    let mut vals = vec![Complex64::new(0.0, 0.0); grid.len()];
    let inner = |k: usize, n: usize| {
        let off = k as isize - (n / 2) as isize;
        (off.unsigned_abs() as f64) < support_frac * n as f64 / 2.0
    };
    for k1 in 0..n1 {
        for k2 in 0..n2 {
            for kt in 0..nt {
                if inner(k1, n1) && inner(k2, n2) && inner(kt, nt) {
                    vals[grid.flat(k1, k2, kt)] = complex_normal(&mut rng);
                }
            }
        }
    }
    SpectralField::new(grid.clone(), vals).expect("finite samples")
}

/// Frequency samples of an anisotropic, possibly shifted and modulated
/// Gaussian: `exp(-(w1^2 (xi1-c1)^2 + w2^2 (xi2-c2)^2)/2) * exp(-i x0.xi)`.
pub fn gaussian_spectrum_2(
    grid: &Grid2,
    widths: [f64; 2],
    freq_center: [f64; 2],
    space_shift: [f64; 2],
) -> Result<SpatialField2> {
    SpatialField2::from_fn(grid.clone(), |x1, x2| {
        let e = -0.5
            * ((widths[0] * (x1 - freq_center[0])).powi(2)
                + (widths[1] * (x2 - freq_center[1])).powi(2));
        let phase = -(space_shift[0] * x1 + space_shift[1] * x2);
        Complex64::from_polar(e.exp(), phase)
    })
}

/// Frequency samples of a compactly supported smooth bump of radius `r`.
pub fn bump_spectrum_2(grid: &Grid2, r: f64) -> Result<SpatialField2> {
    SpatialField2::from_fn(grid.clone(), |x1, x2| {
        let q = (x1 * x1 + x2 * x2) / (r * r);
        if q >= 1.0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new((-1.0 / (1.0 - q)).exp(), 0.0)
        }
    })
}

/// Random band-limited 2D spectrum with a Gaussian envelope.
pub fn random_band_limited_2(grid: &Grid2, seed: u64, support_frac: f64) -> SpatialField2 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let [n1, n2] = grid.sizes();
    let mut vals = vec![Complex64::new(0.0, 0.0); grid.len()];
    let inner = |k: usize, n: usize| {
        let off = k as isize - (n / 2) as isize;
        (off.unsigned_abs() as f64) < support_frac * n as f64 / 2.0
    };
    let ext = grid.extents();
    for k1 in 0..n1 {
        for k2 in 0..n2 {
            if inner(k1, n1) && inner(k2, n2) {
                let x1 = grid.coord(0, k1) / ext[0];
                let x2 = grid.coord(1, k2) / ext[1];
                let env = (-2.0 * (x1 * x1 + x2 * x2)).exp();
                vals[grid.flat(k1, k2)] = complex_normal(&mut rng) * env;
            }
        }
    }
    SpatialField2::new(grid.clone(), vals).expect("finite samples")
}

/// The 20-item data library used for uniformity probes of the space-time L4
/// estimates: Gaussians of several widths, shifted and modulated Gaussians,
/// smooth bumps, and seeded random band-limited spectra.
pub fn data_library_2(grid: &Grid2, seed: u64) -> Result<Vec<SpatialField2>> {
    let mut out = Vec::with_capacity(20);
    for w in [0.5, 0.75, 1.0, 1.5, 2.0] {
        out.push(gaussian_spectrum_2(grid, [w, w], [0.0; 2], [0.0; 2])?);
    }
    out.push(gaussian_spectrum_2(grid, [0.6, 1.4], [0.0; 2], [0.0; 2])?);
    out.push(gaussian_spectrum_2(grid, [1.4, 0.6], [0.0; 2], [0.0; 2])?);
    out.push(gaussian_spectrum_2(grid, [1.0, 1.0], [0.8, -0.5], [0.0; 2])?);
    out.push(gaussian_spectrum_2(grid, [1.0, 1.0], [-0.6, 0.6], [0.0; 2])?);
    out.push(gaussian_spectrum_2(grid, [1.0, 1.0], [0.0; 2], [1.0, -2.0])?);
    out.push(gaussian_spectrum_2(grid, [0.8, 0.8], [0.5, 0.5], [0.5, 0.5])?);
    out.push(bump_spectrum_2(grid, 1.0)?);
    out.push(bump_spectrum_2(grid, 2.0)?);
    out.push(bump_spectrum_2(grid, 3.0)?);
    for i in 0..6 {
        out.push(random_band_limited_2(grid, seed.wrapping_add(i), 0.4));
    }
    debug_assert_eq!(out.len(), 20);
    Ok(out)
}

/// A 20-item 3D spectrum library for the weighted-field boundedness probe.
pub fn data_library_3(grid: &Grid3, seed: u64) -> Result<Vec<SpectralField>> {
    let mut out = Vec::with_capacity(20);
    for (i, w) in [0.5, 0.8, 1.0, 1.3, 1.7, 2.2].iter().enumerate() {
        let f = SpectralField::from_fn(grid.clone(), |x, y, t| {
            let e = -0.5 * w * w * (x * x + y * y + t * t);
            let phase = 0.3 * i as f64 * (x + y - t);
            Complex64::from_polar(e.exp(), phase)
        })?;
        out.push(f);
    }
    for c in [[1.0, 0.0, 0.5], [-0.5, 1.0, 0.0], [0.0, -1.0, -0.5], [0.7, 0.7, 0.7]] {
        let f = SpectralField::from_fn(grid.clone(), |x, y, t| {
            let e = -0.5 * ((x - c[0]).powi(2) + (y - c[1]).powi(2) + (t - c[2]).powi(2));
            Complex64::new(e.exp(), 0.0)
        })?;
        out.push(f);
    }
    for i in 0..10 {
        out.push(random_band_limited_3(grid, seed.wrapping_add(i), 0.45));
    }
    debug_assert_eq!(out.len(), 20);
    Ok(out)
}
