//! The duality-side trilinear form, its weighted space-time factors, and the
//! grid path for the bilinear product estimate.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fft::{centered_synthesis, dual_grid3, forward_ft3, inverse_ft3};
use crate::grid::{Grid3, SpectralField};
use crate::library::random_band_limited_3;
use crate::weight::{xsb_norm_grid, Frame, NormParams, Sign, SymbolKind};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// The signs in the factor weights `<tau_1 +- a(mu_1)>` and `<tau_2 +- a(mu_2)>`.
/// `(Minus, Minus)`, `(Plus, Plus)` and `(Plus, Minus)` correspond to the
/// plain, doubly conjugated and singly conjugated product estimates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SignPair {
    pub first: Sign,
    pub second: Sign,
}

impl SignPair {
    pub const ALL: [SignPair; 3] = [
        SignPair { first: Sign::Minus, second: Sign::Minus },
        SignPair { first: Sign::Plus, second: Sign::Plus },
        SignPair { first: Sign::Plus, second: Sign::Minus },
    ];
}

impl std::fmt::Display for SignPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}{})", self.first, self.second)
    }
}

fn bracket(x: f64) -> f64 {
    (1.0 + x * x).sqrt()
}

/// `|g(mu, tau)| / <tau + sigma a(mu)>^b` sampled on `g`'s grid.
fn weighted_modulus(g: &SpectralField, b: f64, sign: Sign, symbol: SymbolKind) -> Vec<f64> {
    let grid = g.grid();
    let [n1, n2, nt] = grid.sizes();
    let sigma = sign.value();
    let mut out = vec![0.0; grid.len()];
    for k1 in 0..n1 {
        let x1 = grid.coord(0, k1);
        for k2 in 0..n2 {
            let x2 = grid.coord(1, k2);
            let a = symbol.eval_xi(x1, x2);
            for kt in 0..nt {
                let tau = grid.coord(2, kt);
                let idx = grid.flat(k1, k2, kt);
                out[idx] = g.values()[idx].norm() / bracket(tau + sigma * a).powf(b);
            }
        }
    }
    out
}

/// Space-time field `G(x,t) = iint e^{i(x.mu + t tau)} |g| / <tau + sigma a>^b`,
/// as a Riemann sum on the dual grid (no `2 pi` prefactor).
pub fn weighted_field(
    g: &SpectralField,
    b: f64,
    sign: Sign,
    symbol: SymbolKind,
) -> Result<SpectralField> {
    let grid = g.grid();
    let w = weighted_modulus(g, b, sign, symbol);
    let cw: Vec<Complex64> = w.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let mut out = centered_synthesis(&cw, &grid.sizes());
    let factor = grid.cell_volume();
    for z in &mut out {
        *z *= factor;
    }
    SpectralField::new(dual_grid3(grid), out)
}

/// Discrete L4 norm with the field's cell volume as measure.
pub fn l4_norm(field: &SpectralField) -> f64 {
    let s: f64 = field.values().iter().map(|z| z.norm_sqr().powi(2)).sum();
    (s * field.grid().cell_volume()).powf(0.25)
}

/// Grid that makes the modulation substitution an exact reindexing: equal
/// frequency spacings `delta` along both space axes and `delta_tau = delta^2`,
/// so the symbol values land on the `tau` lattice.
pub fn matched_grid(extent_xi: f64, size: usize) -> Result<Grid3> {
    let delta = 2.0 * extent_xi / size as f64;
    let tau_extent = 0.5 * size as f64 * delta * delta;
    Grid3::new([extent_xi, extent_xi, tau_extent], [size; 3])
}

/// `G` computed by the layer formula: for each time, sum over modulation
/// layers `lambda = tau + sigma a(mu)` (an exact lattice reindexing on a
/// [`matched_grid`]) of `e^{i t lambda} <lambda>^{-b}` times the freely
/// counter-propagated layer slice.
pub fn weighted_field_layered(
    g: &SpectralField,
    b: f64,
    sign: Sign,
    symbol: SymbolKind,
) -> Result<SpectralField> {
    let grid = g.grid();
    let d = grid.spacings();
    if (d[0] - d[1]).abs() > 1e-12 * d[0] || (d[2] - d[0] * d[0]).abs() > 1e-9 * d[2] {
        return Err(Error::GridMismatch(
            "layer formula needs a matched grid (equal xi spacings, tau spacing = delta^2)"
                .into(),
        ));
    }
    let [n1, n2, nt] = grid.sizes();
    let dual = dual_grid3(grid);
    let sigma = sign.value();
    let w = weighted_modulus(g, 0.0, sign, symbol);

    // Quantized symbol per frequency point, in units of the tau spacing.
    let mut a_q = vec![0.0; n1 * n2];
    for k1 in 0..n1 {
        for k2 in 0..n2 {
            let a = symbol.eval_xi(grid.coord(0, k1), grid.coord(1, k2));
            a_q[k1 * n2 + k2] = (a / d[2]).round() * d[2];
        }
    }

    let mut out = vec![Complex64::new(0.0, 0.0); grid.len()];
    let factor = grid.cell_volume();
    for jt in 0..nt {
        let t = dual.coord(2, jt);
        let mut slab = vec![Complex64::new(0.0, 0.0); n1 * n2];
        for k1 in 0..n1 {
            for k2 in 0..n2 {
                let a = a_q[k1 * n2 + k2];
                let mut acc = Complex64::new(0.0, 0.0);
                for kt in 0..nt {
                    let lambda = grid.coord(2, kt) + sigma * a;
                    let amp = w[grid.flat(k1, k2, kt)] / bracket(lambda).powf(b);
                    acc += Complex64::from_polar(amp, t * lambda);
                }
                // counter-propagation e^{-i sigma t a(D)} undoes the phase
                // introduced by the substitution.
                slab[k1 * n2 + k2] = acc * Complex64::from_polar(1.0, -sigma * t * a);
            }
        }
        let spatial = centered_synthesis(&slab, &[n1, n2]);
        for k1 in 0..n1 {
            for k2 in 0..n2 {
                out[grid.flat(k1, k2, jt)] = spatial[k1 * n2 + k2] * factor;
            }
        }
    }
    SpectralField::new(dual, out)
}

/// Both sides of the layer Plancherel identity on a matched grid:
/// `(sum over layers of delta_lambda ||psi_lambda||_2^2, (2 pi)^2 ||g||_2^2)`,
/// with `psi_lambda` the `2 pi |g|` slice at `tau = lambda - sigma a`.
pub fn layer_plancherel(g: &SpectralField, sign: Sign, symbol: SymbolKind) -> Result<(f64, f64)> {
    let grid = g.grid();
    let d = grid.spacings();
    if (d[0] - d[1]).abs() > 1e-12 * d[0] || (d[2] - d[0] * d[0]).abs() > 1e-9 * d[2] {
        return Err(Error::GridMismatch("layer identity needs a matched grid".into()));
    }
    let [n1, n2, nt] = grid.sizes();
    let sigma = sign.value();
    let mut layers: std::collections::HashMap<i64, f64> = std::collections::HashMap::new();
    for k1 in 0..n1 {
        for k2 in 0..n2 {
            let a = symbol.eval_xi(grid.coord(0, k1), grid.coord(1, k2));
            let a_int = (sigma * a / d[2]).round() as i64;
            for kt in 0..nt {
                let psi = TWO_PI * g.values()[grid.flat(k1, k2, kt)].norm();
                *layers.entry(kt as i64 + a_int).or_insert(0.0) += psi * psi * d[0] * d[1];
            }
        }
    }
    let lhs: f64 = layers.values().sum::<f64>() * d[2];
    let l2 = g.l2_norm();
    Ok((lhs, TWO_PI * TWO_PI * l2 * l2))
}

/// Evaluation path for [`trilinear_form`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrilinearPath {
    /// Transform-based x-space product (the production path).
    Fast,
    /// Brute-force constrained frequency sum (the oracle).
    Direct,
}

fn check_common_grid(f: &SpectralField, g: &SpectralField, h: &SpectralField) -> Result<()> {
    if f.grid() != g.grid() || f.grid() != h.grid() {
        return Err(Error::GridMismatch(
            "trilinear form requires a common grid".into(),
        ));
    }
    Ok(())
}

/// The modulus-weighted trilinear form
/// `2^s iint |f(-mu_1-mu_2, -tau_1-tau_2)| gw(mu_1,tau_1) hw(mu_2,tau_2)`
/// with `gw = |g| <tau + sigma_1 a>^{-b}` and likewise `hw`; the frequency
/// triple is constrained to sum to zero.
pub fn trilinear_form(
    f: &SpectralField,
    g: &SpectralField,
    h: &SpectralField,
    s: f64,
    b: f64,
    signs: SignPair,
    symbol: SymbolKind,
    path: TrilinearPath,
) -> Result<f64> {
    check_common_grid(f, g, h)?;
    let grid = f.grid();
    let prefactor = 2.0f64.powf(s);
    match path {
        TrilinearPath::Fast => {
            let fabs = SpectralField::new(
                grid.clone(),
                f.values().iter().map(|z| Complex64::new(z.norm(), 0.0)).collect(),
            )?;
            let finv = inverse_ft3(&fabs)?;
            let gw = weighted_field(g, b, signs.first, symbol)?;
            let hw = weighted_field(h, b, signs.second, symbol)?;
            let acc: Complex64 = finv
                .values()
                .iter()
                .zip(gw.values())
                .zip(hw.values())
                .map(|((a, b), c)| a * b * c)
                .sum();
            Ok(prefactor * TWO_PI.powf(-1.5) * finv.grid().cell_volume() * acc.re)
        }
        TrilinearPath::Direct => {
            let fabs: Vec<f64> = f.values().iter().map(|z| z.norm()).collect();
            let gw = weighted_modulus(g, b, signs.first, symbol);
            let hw = weighted_modulus(h, b, signs.second, symbol);
            let [n1, n2, nt] = grid.sizes();
            let zero_sum = |k1: usize, k2: usize, n: usize| -> Option<usize> {
                // mu_0 = -(mu_1 + mu_2) sits at index 3n/2 - k1 - k2.
                (3 * n / 2).checked_sub(k1 + k2).filter(|&k| k < n)
            };
            let mut acc = 0.0;
            for a1 in 0..n1 {
                for a2 in 0..n2 {
                    for at in 0..nt {
                        let wg = gw[grid.flat(a1, a2, at)];
                        if wg == 0.0 {
                            continue;
                        }
                        for b1 in 0..n1 {
                            let Some(c1) = zero_sum(a1, b1, n1) else { continue };
                            for b2 in 0..n2 {
                                let Some(c2) = zero_sum(a2, b2, n2) else { continue };
                                for bt in 0..nt {
                                    let Some(ct) = zero_sum(at, bt, nt) else { continue };
                                    acc += fabs[grid.flat(c1, c2, ct)]
                                        * wg
                                        * hw[grid.flat(b1, b2, bt)];
                                }
                            }
                        }
                    }
                }
            }
            Ok(prefactor * grid.cell_volume().powi(2) * acc)
        }
    }
}

/// Signed variant of the form: no moduli, actual complex samples.
pub fn trilinear_form_raw(
    f: &SpectralField,
    g: &SpectralField,
    h: &SpectralField,
    s: f64,
    b: f64,
    signs: SignPair,
    symbol: SymbolKind,
) -> Result<Complex64> {
    check_common_grid(f, g, h)?;
    let grid = f.grid();
    let apply = |field: &SpectralField, sign: Sign| -> Vec<Complex64> {
        let w = weighted_modulus(field, b, sign, symbol);
        field
            .values()
            .iter()
            .zip(&w)
            .zip(field.values().iter().map(|z| z.norm()))
            .map(|((z, &w), n)| if n == 0.0 { Complex64::new(0.0, 0.0) } else { z * w / n })
            .collect()
    };
    let synth = |vals: Vec<Complex64>| -> Result<SpectralField> {
        let mut out = centered_synthesis(&vals, &grid.sizes());
        for z in &mut out {
            *z *= grid.cell_volume();
        }
        SpectralField::new(dual_grid3(grid), out)
    };
    let finv = inverse_ft3(f)?;
    let gsp = synth(apply(g, signs.first))?;
    let hsp = synth(apply(h, signs.second))?;
    let acc: Complex64 = finv
        .values()
        .iter()
        .zip(gsp.values())
        .zip(hsp.values())
        .map(|((a, b), c)| a * b * c)
        .sum();
    Ok(2.0f64.powf(s) * TWO_PI.powf(-1.5) * finv.grid().cell_volume() * acc)
}

/// Left and right side of the bounding chain:
/// `(|I|, 2^s ||f||_2 ||G||_4 ||H||_4)`.
pub fn holder_chain(
    f: &SpectralField,
    g: &SpectralField,
    h: &SpectralField,
    s: f64,
    b: f64,
    signs: SignPair,
    symbol: SymbolKind,
) -> Result<(f64, f64)> {
    let i = trilinear_form(f, g, h, s, b, signs, symbol, TrilinearPath::Fast)?;
    let gw = weighted_field(g, b, signs.first, symbol)?;
    let hw = weighted_field(h, b, signs.second, symbol)?;
    let rhs = 2.0f64.powf(s) * f.l2_norm() * l4_norm(&gw) * l4_norm(&hw);
    Ok((i.abs(), rhs))
}

/// `<mu_1 + mu_2>^s <= 2^s <mu_1>^s <mu_2>^s` for `s >= 0`, checked on seeded
/// random pairs; returns the worst ratio of left to right (should be <= 1).
pub fn bracket_submultiplicative_worst(s: f64, pairs: usize, seed: u64) -> Result<f64> {
    if s < 0.0 {
        return Err(Error::InvalidArgument(
            "sub-multiplicativity holds for s >= 0".into(),
        ));
    }
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..pairs {
        let p = [
            200.0 * (rng.random::<f64>() - 0.5),
            200.0 * (rng.random::<f64>() - 0.5),
        ];
        let q = [
            200.0 * (rng.random::<f64>() - 0.5),
            200.0 * (rng.random::<f64>() - 0.5),
        ];
        let br = |x: [f64; 2]| (1.0 + x[0] * x[0] + x[1] * x[1]).sqrt();
        let lhs = br([p[0] + q[0], p[1] + q[1]]).powf(s);
        let rhs = 2.0f64.powf(s) * br(p).powf(s) * br(q).powf(s);
        worst = worst.max(lhs / rhs);
    }
    Ok(worst)
}

/// Spectrum of the complex conjugate field: reflected and conjugated samples.
pub fn conjugate_spectrum(f: &SpectralField) -> SpectralField {
    let grid = f.grid();
    let [n1, n2, nt] = grid.sizes();
    let mut out = SpectralField::zeros(grid.clone());
    for k1 in 0..n1 {
        for k2 in 0..n2 {
            for kt in 0..nt {
                let r = grid.flat((n1 - k1) % n1, (n2 - k2) % n2, (nt - kt) % nt);
                out.values_mut()[r] = f.values()[grid.flat(k1, k2, kt)].conj();
            }
        }
    }
    out
}

/// Fully grid-based product-estimate ratio
/// `||w||_{s, b-1} / (||u|| ||v||)` where `w` is the space-time spectrum of
/// the pointwise product of the (possibly conjugated) physical fields, and
/// every norm is taken in the fixed `sigma = +1` space.  A `Plus` entry in
/// `signs` conjugates the corresponding factor.
pub fn bilinear_ratio(
    u: &SpectralField,
    v: &SpectralField,
    s: f64,
    b: f64,
    signs: SignPair,
    symbol: SymbolKind,
    frame: Frame,
) -> Result<f64> {
    if u.grid() != v.grid() {
        return Err(Error::GridMismatch("product ratio requires a common grid".into()));
    }
    let cu = match signs.first {
        Sign::Plus => conjugate_spectrum(u),
        Sign::Minus => u.clone(),
    };
    let cv = match signs.second {
        Sign::Plus => conjugate_spectrum(v),
        Sign::Minus => v.clone(),
    };
    let factor_params = NormParams::new(s, b, Sign::Plus, symbol);
    let nu = xsb_norm_grid(&cu, &factor_params, frame);
    let nv = xsb_norm_grid(&cv, &factor_params, frame);
    if nu == 0.0 || nv == 0.0 {
        return Err(Error::ZeroField);
    }
    let up = inverse_ft3(&cu)?;
    let vp = inverse_ft3(&cv)?;
    let prod = SpectralField::new(
        up.grid().clone(),
        up.values()
            .iter()
            .zip(vp.values())
            .map(|(a, b)| a * b)
            .collect(),
    )?;
    let w = forward_ft3(&prod)?;
    let product_params = NormParams::new(s, b - 1.0, Sign::Plus, symbol);
    let nw = xsb_norm_grid(&w, &product_params, frame);
    Ok(nw / (nu * nv))
}

/// Max of [`bilinear_ratio`] over seeded random band-limited pairs: an
/// empirical lower estimate of the best product-estimate constant.
pub fn bilinear_constant_probe(
    grid: &Grid3,
    s: f64,
    b: f64,
    signs: SignPair,
    symbol: SymbolKind,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    if trials < 10 {
        return Err(Error::InvalidArgument("probe needs at least 10 trials".into()));
    }
    let ratios: Result<Vec<f64>> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let u = random_band_limited_3(grid, seed.wrapping_add(2 * i as u64), 0.45);
            let v = random_band_limited_3(grid, seed.wrapping_add(2 * i as u64 + 1), 0.45);
            match bilinear_ratio(&u, &v, s, b, signs, symbol, Frame::Standard) {
                Ok(r) => Ok(r),
                Err(Error::ZeroField) => Ok(0.0),
                Err(e) => Err(e),
            }
        })
        .collect();
    Ok(ratios?.into_iter().fold(0.0, f64::max))
}

/// [`bilinear_ratio`] with the counterexample pair inserted as gridded data,
/// on an anisotropic grid native to the rotated frame.  Case `j = 1`.
pub fn knapp_insertion_ratio(n: f64, s: f64, b: f64) -> Result<f64> {
    let pair = crate::knapp::KnappPair::new(n, 1)?;
    let (su, sv) = crate::knapp::factor_spectra(&pair)?;
    let grid = Grid3::new([6.0 * n, 0.75 / n, 2.5], [128, 64, 48])?;
    let sample = |sp: &crate::separable::SeparableSpectrum| {
        SpectralField::from_fn(grid.clone(), |u, v, tau| {
            Complex64::new(sp.eval(u, v, tau), 0.0)
        })
    };
    let u = sample(&su)?;
    let v = sample(&sv)?;
    bilinear_ratio(
        &u,
        &v,
        s,
        b,
        SignPair { first: Sign::Minus, second: Sign::Minus },
        SymbolKind::Hyperbolic,
        Frame::Rotated,
    )
}
