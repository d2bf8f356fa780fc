//! The Knapp-type counterexample family: the boxes Q_N and R_N in rotated
//! coordinates, the exact closed-form product spectrum, the explicit upper and
//! lower bounds, and the ratio scaling experiment.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fft::convolve3;
use crate::grid::{Grid3, RotatedBox, SpectralField};
use crate::quad::quad_box;
use crate::separable::{PiecewiseLinear, SeparableSpectrum};
use crate::weight::{NormParams, Sign, SymbolKind};

const SQRT2: f64 = std::f64::consts::SQRT_2;

/// Default Gauss-Legendre nodes per axis piece for the exact norm path.
pub const DEFAULT_NODES: usize = 32;

/// The box Q_N in rotated coordinates:
/// `u in [N/sqrt2, 2N/sqrt2]`, `|v| <= 1/(4 sqrt2 N)`, `|tau| <= 1/2`.
/// Its volume is exactly 1/4 for every N.
pub fn knapp_box(n: f64) -> Result<RotatedBox> {
    if !(n.is_finite() && n >= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "Knapp scale must satisfy N >= 1, got {n}"
        )));
    }
    RotatedBox::new(
        (n / SQRT2, 2.0 * n / SQRT2),
        (-1.0 / (4.0 * SQRT2 * n), 1.0 / (4.0 * SQRT2 * n)),
        (-0.5, 0.5),
    )
}

/// The box R_N carrying the convolution lower bound:
/// `|u| <= N/(2 sqrt2)`, `|v| <= 1/(8 sqrt2 N)`, `|tau| <= 1/4`; volume 1/16.
pub fn r_box(n: f64) -> Result<RotatedBox> {
    if !(n.is_finite() && n >= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "Knapp scale must satisfy N >= 1, got {n}"
        )));
    }
    RotatedBox::new(
        (-n / (2.0 * SQRT2), n / (2.0 * SQRT2)),
        (-1.0 / (8.0 * SQRT2 * n), 1.0 / (8.0 * SQRT2 * n)),
        (-0.25, 0.25),
    )
}

fn halton(mut index: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while index > 0 {
        f /= base as f64;
        r += f * (index % base) as f64;
        index /= base;
    }
    r
}

fn halton_point(bx: &RotatedBox, i: u64) -> (f64, f64, f64) {
    let map = |axis: usize, b: u64| {
        let (lo, hi) = bx.range(axis);
        lo + (hi - lo) * halton(i + 1, b)
    };
    (map(0, 2), map(1, 3), map(2, 5))
}

/// True iff every quasi-random sample in `bx` satisfies `predicate`.
pub fn membership_check(
    bx: &RotatedBox,
    samples: usize,
    predicate: impl Fn(f64, f64, f64) -> bool,
) -> Result<bool> {
    if samples < 1000 {
        return Err(Error::InvalidArgument(
            "membership check needs at least 1000 samples".into(),
        ));
    }
    for i in 0..samples as u64 {
        let (u, v, t) = halton_point(bx, i);
        if !predicate(u, v, t) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The inclusion conditions for Q_N: `|tau +- a(xi)| <= 1` for both signs and
/// `N/2 <= |xi| <= 2N`.
pub fn q_inclusion_predicate(n: f64) -> impl Fn(f64, f64, f64) -> bool {
    move |u, v, tau| {
        let a = 2.0 * u * v;
        let r2 = u * u + v * v;
        (tau + a).abs() <= 1.0
            && (tau - a).abs() <= 1.0
            && r2 >= n * n / 4.0
            && r2 <= 4.0 * n * n
    }
}

/// The inclusion conditions for R_N: `|tau +- a(xi)| <= 1` and `|xi| <= N/2`.
pub fn r_inclusion_predicate(n: f64) -> impl Fn(f64, f64, f64) -> bool {
    move |u, v, tau| {
        let a = 2.0 * u * v;
        let r2 = u * u + v * v;
        (tau + a).abs() <= 1.0 && (tau - a).abs() <= 1.0 && r2 <= n * n / 4.0
    }
}

/// One member of the counterexample family: scale N and case index j, with
/// the reflection pattern of the two factors fixed by j:
/// j=1 -> (plain, reflected), j=2 -> (reflected, plain), j=3 -> both reflected.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KnappPair {
    n: f64,
    j: u8,
}

impl KnappPair {
    pub fn new(n: f64, j: u8) -> Result<Self> {
        if !(1..=3).contains(&j) {
            return Err(Error::InvalidArgument(format!("case index j must be 1, 2 or 3, got {j}")));
        }
        if !(n.is_finite() && n >= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "Knapp scale must satisfy N >= 1, got {n}"
            )));
        }
        Ok(Self { n, j })
    }

    pub fn scale(&self) -> f64 {
        self.n
    }

    pub fn case(&self) -> u8 {
        self.j
    }

    pub fn u_reflected(&self) -> bool {
        matches!(self.j, 2 | 3)
    }

    pub fn v_reflected(&self) -> bool {
        matches!(self.j, 1 | 3)
    }
}

fn indicator_of(bx: &RotatedBox, reflected: bool) -> Result<SeparableSpectrum> {
    let spec = SeparableSpectrum::box_indicator(bx)?;
    if !reflected {
        return Ok(spec);
    }
    SeparableSpectrum::new(
        spec.scale,
        spec.profile_u.reflected(),
        spec.profile_v.reflected(),
        spec.profile_tau.reflected(),
    )
}

/// The two factor spectra (indicators of Q_N, reflected per the case index).
pub fn factor_spectra(pair: &KnappPair) -> Result<(SeparableSpectrum, SeparableSpectrum)> {
    let q = knapp_box(pair.n)?;
    Ok((
        indicator_of(&q, pair.u_reflected())?,
        indicator_of(&q, pair.v_reflected())?,
    ))
}

/// Closed-form spectrum of the product u_N v_N: `(2 pi)^{-3/2}` times the
/// correlation of the two box indicators, a product of three 1D hats.  The
/// reflections only move the support center; the hat shapes are independent
/// of j.
pub fn product_spectrum(pair: &KnappPair) -> Result<SeparableSpectrum> {
    let n = pair.n;
    let hu = n / SQRT2; // u half-width and peak
    let hv = 1.0 / (2.0 * SQRT2 * n); // v half-width and peak
    let center = |reflected: bool| if reflected { -1.5 * n / SQRT2 } else { 1.5 * n / SQRT2 };
    let cu = center(pair.u_reflected()) + center(pair.v_reflected());
    let scale = (2.0 * std::f64::consts::PI).powf(-1.5);
    SeparableSpectrum::new(
        scale,
        PiecewiseLinear::hat(cu, hu, hu)?,
        PiecewiseLinear::hat(0.0, hv, hv)?,
        PiecewiseLinear::hat(0.0, 1.0, 1.0)?,
    )
}

/// Box on which the product spectrum obeys its pointwise lower bound: R_N,
/// translated to the product's support center.
pub fn lower_bound_box(pair: &KnappPair) -> Result<RotatedBox> {
    let r = r_box(pair.n)?;
    let prod = product_spectrum(pair)?;
    let (u0, u1) = prod.profile_u.support();
    let cu = 0.5 * (u0 + u1);
    let (a, b) = r.u_range();
    RotatedBox::new((a + cu, b + cu), r.v_range(), r.tau_range())
}

/// The pointwise constant `2^{-6-1/2} pi^{-3/2}` the product dominates on R_N.
pub fn pointwise_lower_constant() -> f64 {
    2f64.powf(-6.5) * std::f64::consts::PI.powf(-1.5)
}

/// Count of quasi-random samples of the (translated) R_N box where the
/// closed-form product falls below the pointwise constant.
pub fn lower_bound_violations(pair: &KnappPair, samples: usize) -> Result<usize> {
    let bx = lower_bound_box(pair)?;
    let prod = product_spectrum(pair)?;
    let c = pointwise_lower_constant();
    let mut bad = 0usize;
    for i in 0..samples as u64 {
        let (u, v, t) = halton_point(&bx, i);
        if prod.eval(u, v, t) < c {
            bad += 1;
        }
    }
    Ok(bad)
}

/// One row of a scaling experiment.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentRecord {
    pub n: f64,
    pub s: f64,
    pub b: f64,
    pub j: u8,
    pub symbol: SymbolKind,
    pub norm_u: f64,
    pub norm_v: f64,
    pub norm_prod: f64,
    /// product-norm / (norm_u * norm_v)
    pub ratio: f64,
    /// `2^{B-s-1} N^s`
    pub paper_upper: f64,
    /// `2^{B-8-1/2} pi^{-3/2} N^s`
    pub paper_lower: f64,
    /// Aliasing hazard flag for grid-path records; the exact separable path
    /// never truncates.
    pub truncated: bool,
    pub valid: bool,
}

/// Compute one record of the ratio experiment.  All three norms are standard
/// `<tau - a>` norms of the actual (possibly reflected, possibly translated)
/// supports; the sign flips of the explicit bounds arise from pulling the
/// reflected spectra back to Q_N.
pub fn knapp_record(
    s: f64,
    b: f64,
    j: u8,
    symbol: SymbolKind,
    n: f64,
    nodes: usize,
) -> Result<ExperimentRecord> {
    let pair = KnappPair::new(n, j)?;
    let (fu, fv) = factor_spectra(&pair)?;
    let prod = product_spectrum(&pair)?;
    let factor_params = NormParams::new(s, b, Sign::Plus, symbol);
    let prod_params = NormParams::new(s, b - 1.0, Sign::Plus, symbol);
    let norm_u = crate::separable::xsb_norm_separable(&fu, &factor_params, nodes)?;
    let norm_v = crate::separable::xsb_norm_separable(&fv, &factor_params, nodes)?;
    let norm_prod = crate::separable::xsb_norm_separable(&prod, &prod_params, nodes)?;
    let denom = norm_u * norm_v;
    let valid = denom > 0.0;
    let ratio = if valid { norm_prod / denom } else { f64::NAN };
    let b_cap = factor_params.b_cap();
    Ok(ExperimentRecord {
        n,
        s,
        b,
        j,
        symbol,
        norm_u,
        norm_v,
        norm_prod,
        ratio,
        paper_upper: 2f64.powf(b_cap - s - 1.0) * n.powf(s),
        paper_lower: 2f64.powf(b_cap - 8.5) * std::f64::consts::PI.powf(-1.5) * n.powf(s),
        truncated: false,
        valid,
    })
}

/// The full scaling experiment over an increasing list of N, in parallel,
/// output ordered by N.
pub fn ratio_curve(
    s: f64,
    b: f64,
    j: u8,
    symbol: SymbolKind,
    n_list: &[f64],
    nodes: usize,
) -> Result<Vec<ExperimentRecord>> {
    if n_list.is_empty() {
        return Err(Error::InvalidArgument("empty N list".into()));
    }
    if n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("N list must be strictly increasing".into()));
    }
    if n_list[0] < 4.0 {
        return Err(Error::InvalidArgument("N list must start at N >= 4".into()));
    }
    n_list
        .par_iter()
        .map(|&n| knapp_record(s, b, j, symbol, n, nodes))
        .collect()
}

/// Slack allowed for quadrature error when checking the explicit bounds.
pub const BOUND_SLACK: f64 = 1e-6;

/// True iff the record satisfies the explicit bound chain: both factor norms
/// below the upper bound and the product norm above the lower bound.
pub fn bound_check(record: &ExperimentRecord) -> bool {
    record.symbol == SymbolKind::Hyperbolic
        && record.valid
        && record.norm_u <= record.paper_upper + BOUND_SLACK
        && record.norm_v <= record.paper_upper + BOUND_SLACK
        && record.norm_prod >= record.paper_lower - BOUND_SLACK
}

/// Smallest N in the curve from which every later record passes
/// [`bound_check`], if any.
pub fn smallest_valid_n(records: &[ExperimentRecord]) -> Option<f64> {
    let mut first = None;
    for r in records {
        if bound_check(r) {
            if first.is_none() {
                first = Some(r.n);
            }
        } else {
            first = None;
        }
    }
    first
}

/// Volume of a box by quadrature of the constant 1 (cross-check of the
/// closed-form volume).
pub fn box_volume_quadrature(bx: &RotatedBox, nodes: usize) -> Result<f64> {
    quad_box(|_, _, _| 1.0, bx, nodes, None)
}

/// Brute-force verification path for the closed-form product spectrum: sample
/// the two factor indicators on an anisotropic rotated-frame grid, convolve
/// via FFT, and report the sup-norm deviation from the closed form, relative
/// to the closed form's peak.
pub fn convolution_oracle_error(pair: &KnappPair, size: usize) -> Result<f64> {
    let n = pair.n;
    // Extents chosen so every box edge falls on the sample lattice and the
    // Minkowski sum of the factor supports stays inside the grid.
    let grid = Grid3::new([4.0 * n / SQRT2, 1.0 / (SQRT2 * n), 2.0], [size; 3])?;
    if size % 8 != 0 {
        return Err(Error::InvalidArgument(
            "oracle grid size must be divisible by 8 for lattice-aligned edges".into(),
        ));
    }
    let (fu, fv) = factor_spectra(pair)?;
    // Opposite half-open samplings of the two indicator boxes: with
    // lattice-aligned edges the discrete convolution then counts interval
    // overlaps exactly, matching the continuum hats at every sample point.
    let sample = |spec: &SeparableSpectrum, left_closed: bool| -> Result<SpectralField> {
        let sb = spec.support_box()?;
        SpectralField::from_fn(grid.clone(), |u, v, t| {
            let inside = |x: f64, (lo, hi): (f64, f64)| {
                if left_closed {
                    x >= lo - 1e-12 && x < hi - 1e-12
                } else {
                    x > lo + 1e-12 && x <= hi + 1e-12
                }
            };
            let val = inside(u, sb.u_range()) && inside(v, sb.v_range()) && inside(t, sb.tau_range());
            num_complex::Complex64::new(if val { spec.scale } else { 0.0 }, 0.0)
        })
    };
    let gu = sample(&fu, true)?;
    let gv = sample(&fv, false)?;
    let conv = convolve3(&gu, &gv)?;
    let scale = (2.0 * std::f64::consts::PI).powf(-1.5);
    let closed = product_spectrum(pair)?;
    let peak = closed.scale * (n / SQRT2) * (1.0 / (2.0 * SQRT2 * n));
    let [n1, n2, nt] = grid.sizes();
    let mut worst = 0.0_f64;
    for k1 in 0..n1 {
        for k2 in 0..n2 {
            for kt in 0..nt {
                let p = grid.point(k1, k2, kt);
                let got = conv.values()[grid.flat(k1, k2, kt)] * scale;
                let want = closed.eval(p[0], p[1], p[2]);
                worst = worst.max((got.re - want).abs().max(got.im.abs()));
            }
        }
    }
    Ok(worst / peak)
}
