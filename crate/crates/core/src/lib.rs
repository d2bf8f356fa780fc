//! Numerical laboratory for space-time restriction norms with the nonelliptic
//! dispersion symbol `a(xi) = xi1^2 - xi2^2`: weighted norms, free evolution
//! and its decay/space-time-integrability probes, the duality-side trilinear
//! form, and the exact box-pair family exhibiting the `N^{-s}` blow-up of the
//! product-estimate ratio for `s < 0`.

pub mod error;
pub mod fft;
pub mod fit;
pub mod grid;
pub mod knapp;
pub mod library;
pub mod propagator;
pub mod quad;
pub mod separable;
pub mod trilinear;
pub mod weight;

pub use error::{Error, Result};
pub use fft::{convolve3, dual_grid3, fft3, forward_ft3, inverse_ft3, Direction};
pub use fit::fit_slope;
pub use grid::{
    to_rotated, to_standard, Grid2, Grid3, RotatedBox, SpatialField2, SpectralField,
};
pub use knapp::{
    bound_check, knapp_box, knapp_record, r_box, ratio_curve, smallest_valid_n, ExperimentRecord,
    KnappPair, BOUND_SLACK, DEFAULT_NODES,
};
pub use propagator::{
    dispersion_sup, free_propagate, ratio_spread, strichartz_ratio, GaussianState, OutputSide,
    TimeWindow,
};
pub use quad::Quadrature1D;
pub use separable::{xsb_norm_separable, PiecewiseLinear, SeparableSpectrum};
pub use trilinear::{
    bilinear_constant_probe, bilinear_ratio, holder_chain, layer_plancherel, matched_grid,
    trilinear_form, trilinear_form_raw, weighted_field, weighted_field_layered, SignPair,
    TrilinearPath,
};
pub use weight::{xsb_norm_grid, xsb_weight, Frame, NormParams, Sign, SymbolKind};
