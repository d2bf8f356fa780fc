//! The five experiment suites and their pass/fail flags.

use serde::Serialize;

use xsb_lab::knapp::BOUND_SLACK;
use xsb_lab::library::{data_library_2, data_library_3};
use xsb_lab::propagator::{
    dispersion_sup, free_propagate, ratio_spread, GaussianState, OutputSide, TimeWindow,
};
use xsb_lab::trilinear::{knapp_insertion_ratio, l4_norm};
use xsb_lab::{
    bilinear_constant_probe, fit_slope, holder_chain, knapp_record, layer_plancherel,
    matched_grid, ratio_curve, trilinear_form, weighted_field, Grid2, Grid3, Sign, SignPair,
    SymbolKind, TrilinearPath,
};

use crate::config::{ExperimentConfig, Suite};
use crate::output::fmt_num;

#[derive(Debug, Clone, Serialize)]
pub struct SlopeFit {
    pub label: String,
    pub slope: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Flag {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Serialize)]
pub struct ResultBundle {
    pub config: ExperimentConfig,
    pub csv_header: Vec<String>,
    pub records: Vec<Vec<String>>,
    pub fits: Vec<SlopeFit>,
    pub flags: Vec<Flag>,
    pub wall_ms: u128,
}

impl ResultBundle {
    pub fn all_pass(&self) -> bool {
        self.flags.iter().all(|f| f.pass)
    }
}

type AnyError = Box<dyn std::error::Error>;

pub fn run(config: &ExperimentConfig) -> Result<ResultBundle, AnyError> {
    let start = std::time::Instant::now();
    let (csv_header, records, fits, flags) = match config.suite {
        Suite::Knapp => run_knapp(config)?,
        Suite::Norms => run_norms(config)?,
        Suite::Propagator => run_propagator(config)?,
        Suite::Strichartz => run_strichartz(config)?,
        Suite::Trilinear => run_trilinear(config)?,
    };
    Ok(ResultBundle {
        config: config.clone(),
        csv_header,
        records,
        fits,
        flags,
        wall_ms: start.elapsed().as_millis(),
    })
}

type SuiteOutput = (Vec<String>, Vec<Vec<String>>, Vec<SlopeFit>, Vec<Flag>);

fn header(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn run_knapp(config: &ExperimentConfig) -> Result<SuiteOutput, AnyError> {
    let head = header(&[
        "N", "s", "b", "j", "symbol", "norm_u", "norm_v", "norm_prod", "ratio", "paper_upper",
        "paper_lower", "upper_ok", "lower_ok",
    ]);
    let mut rows = Vec::new();
    let mut fits = Vec::new();
    let mut flags = Vec::new();
    for &s in &config.s_list {
        for &b in &config.b_list {
            for &j in &config.j_list {
                let curve = ratio_curve(s, b, j, config.symbol, &config.n_list, config.nodes)?;
                let mut all_bounds = true;
                for r in &curve {
                    let upper_ok = r.norm_u <= r.paper_upper + BOUND_SLACK
                        && r.norm_v <= r.paper_upper + BOUND_SLACK;
                    let lower_ok = r.norm_prod >= r.paper_lower - BOUND_SLACK;
                    all_bounds &= upper_ok && lower_ok;
                    rows.push(vec![
                        fmt_num(r.n),
                        fmt_num(r.s),
                        fmt_num(r.b),
                        format!("{}", r.j),
                        format!("{}", r.symbol),
                        fmt_num(r.norm_u),
                        fmt_num(r.norm_v),
                        fmt_num(r.norm_prod),
                        fmt_num(r.ratio),
                        fmt_num(r.paper_upper),
                        fmt_num(r.paper_lower),
                        format!("{upper_ok}"),
                        format!("{lower_ok}"),
                    ]);
                }
                let label = format!("s={s} b={b} j={j} {}", config.symbol);
                if config.symbol == SymbolKind::Hyperbolic {
                    flags.push(Flag {
                        name: format!("bounds {label}"),
                        pass: all_bounds,
                        detail: "explicit upper/lower bound chain".into(),
                    });
                }
                let pts: Vec<(f64, f64)> = curve.iter().map(|r| (r.n, r.ratio)).collect();
                if s < 0.0 && pts.len() >= 4 {
                    let (slope, stderr) = fit_slope(&pts)?;
                    fits.push(SlopeFit {
                        label: label.clone(),
                        slope,
                        stderr,
                    });
                    if config.symbol == SymbolKind::Hyperbolic {
                        // The centered cases (j = 1, 2) straddle the origin
                        // where <xi>^{2s} is not scale-homogeneous, which
                        // steepens the fitted slope; only the separated case
                        // (j = 3) tracks the clean N^{-s} law.
                        let (pass, detail) = if j == 3 {
                            ((slope + s).abs() <= 0.05, format!("slope {slope:.4} vs {}", -s))
                        } else {
                            (slope >= -s - 0.05, format!("slope {slope:.4} >= {}", -s - 0.05))
                        };
                        flags.push(Flag {
                            name: format!("slope {label}"),
                            pass,
                            detail,
                        });
                    } else {
                        let mut nonincreasing = true;
                        for w in pts.windows(2) {
                            if w[0].0 >= 8.0 && w[1].1 > w[0].1 * (1.0 + 1e-9) {
                                nonincreasing = false;
                            }
                        }
                        flags.push(Flag {
                            name: format!("nonincreasing {label}"),
                            pass: nonincreasing,
                            detail: "elliptic ratio does not grow for N >= 8".into(),
                        });
                    }
                } else if s == 0.0 && config.symbol == SymbolKind::Hyperbolic {
                    let max = pts.iter().map(|p| p.1).fold(f64::MIN, f64::max);
                    let min = pts.iter().map(|p| p.1).fold(f64::MAX, f64::min);
                    flags.push(Flag {
                        name: format!("bounded-ratio {label}"),
                        pass: max <= 3.0 * min,
                        detail: format!("max/min = {:.4}", max / min),
                    });
                }
            }
        }
    }
    Ok((head, rows, fits, flags))
}

fn run_norms(config: &ExperimentConfig) -> Result<SuiteOutput, AnyError> {
    let head = header(&["N", "s", "b", "j", "symbol", "norm_u", "norm_v", "norm_prod"]);
    let mut rows = Vec::new();
    let mut all_valid = true;
    for &s in &config.s_list {
        for &b in &config.b_list {
            for &j in &config.j_list {
                for &n in &config.n_list {
                    let r = knapp_record(s, b, j, config.symbol, n, config.nodes)?;
                    all_valid &= r.valid && r.norm_u.is_finite() && r.norm_prod.is_finite();
                    rows.push(vec![
                        fmt_num(r.n),
                        fmt_num(r.s),
                        fmt_num(r.b),
                        format!("{}", r.j),
                        format!("{}", r.symbol),
                        fmt_num(r.norm_u),
                        fmt_num(r.norm_v),
                        fmt_num(r.norm_prod),
                    ]);
                }
            }
        }
    }
    let flags = vec![Flag {
        name: "norms finite and nonzero".into(),
        pass: all_valid,
        detail: "all factor and product norms evaluable".into(),
    }];
    Ok((head, rows, Vec::new(), flags))
}

fn run_propagator(config: &ExperimentConfig) -> Result<SuiteOutput, AnyError> {
    let head = header(&["t", "symbol", "sup"]);
    let times: Vec<f64> = {
        // t in [1, 10], geometric; dense enough for a stable fit.
        let mut ts = Vec::new();
        let mut t = 1.0;
        while t <= 10.0 * (1.0 + 1e-12) {
            ts.push(t);
            t *= 1.25;
        }
        ts
    };
    let mut rows = Vec::new();
    let mut fits = Vec::new();
    let mut flags = Vec::new();
    for symbol in [SymbolKind::Hyperbolic, SymbolKind::Elliptic] {
        let pts = dispersion_sup(&times, symbol, 0.05)?;
        for &(t, sup) in &pts {
            rows.push(vec![fmt_num(t), format!("{symbol}"), fmt_num(sup)]);
        }
        let (slope, stderr) = fit_slope(&pts)?;
        fits.push(SlopeFit {
            label: format!("dispersion {symbol}"),
            slope,
            stderr,
        });
        flags.push(Flag {
            name: format!("dispersion slope {symbol}"),
            pass: (slope + 1.0).abs() <= 0.1,
            detail: format!("slope {slope:.4}"),
        });
    }

    // Unitarity, group law and oracle agreement.  The oracle comparison needs
    // fine frequency spacing (spatial periodization sits at ~4e-6 on 64^2),
    // so the grid is floored at 192 per axis.
    let g = Grid2::new([12.0, 12.0], [config.grid[0].max(192), config.grid[1].max(192)])?;
    let state = GaussianState::isotropic(1.0)?;
    let phi = state.sample_hat(&g)?;
    let a = free_propagate(&phi, 0.4, config.symbol, Sign::Plus, OutputSide::Frequency)?;
    let unitary_err = (a.l2_norm() - phi.l2_norm()).abs() / phi.l2_norm();
    flags.push(Flag {
        name: "unitarity".into(),
        pass: unitary_err <= 1e-12,
        detail: format!("relative drift {unitary_err:.2e}"),
    });
    let ab = free_propagate(&a, 0.6, config.symbol, Sign::Plus, OutputSide::Frequency)?;
    let direct = free_propagate(&phi, 1.0, config.symbol, Sign::Plus, OutputSide::Frequency)?;
    let group_err = ab
        .values()
        .iter()
        .zip(direct.values())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0f64, f64::max);
    flags.push(Flag {
        name: "group law".into(),
        pass: group_err <= 1e-12,
        detail: format!("sup deviation {group_err:.2e}"),
    });
    let t = 0.7;
    let grid_path = free_propagate(&phi, t, config.symbol, Sign::Plus, OutputSide::Space)?;
    let oracle = state.evolved(t, config.symbol, Sign::Plus);
    let xg = grid_path.grid().clone();
    let [n1, n2] = xg.sizes();
    let mut oracle_err = 0.0f64;
    for k1 in 0..n1 {
        for k2 in 0..n2 {
            let want = oracle.spatial_value(xg.coord(0, k1), xg.coord(1, k2));
            let got = grid_path.values()[xg.flat(k1, k2)];
            oracle_err = oracle_err.max((want - got).norm());
        }
    }
    flags.push(Flag {
        name: "gaussian oracle".into(),
        pass: oracle_err <= 1e-8,
        detail: format!("sup deviation {oracle_err:.2e}"),
    });
    Ok((head, rows, fits, flags))
}

fn run_strichartz(config: &ExperimentConfig) -> Result<SuiteOutput, AnyError> {
    let head = header(&["item", "symbol", "ratio"]);
    let g = Grid2::new([8.0, 8.0], [config.grid[0], config.grid[1]])?;
    let library = data_library_2(&g, config.seed)?;
    let window = TimeWindow::new(0.0, 4.0, config.grid[2].max(8))?;
    let mut rows = Vec::new();
    let mut flags = Vec::new();
    for symbol in [SymbolKind::Hyperbolic, SymbolKind::Elliptic] {
        for (i, phi) in library.iter().enumerate() {
            let r = xsb_lab::strichartz_ratio(phi, symbol, Sign::Plus, &window)?;
            rows.push(vec![format!("{i}"), format!("{symbol}"), fmt_num(r)]);
        }
        let (max, median) = ratio_spread(&library, symbol, Sign::Plus, &window)?;
        flags.push(Flag {
            name: format!("uniform L4 ratio {symbol}"),
            pass: max <= 2.0 * median,
            detail: format!("max {max:.4}, median {median:.4}"),
        });
    }
    Ok((head, rows, Vec::new(), flags))
}

fn run_trilinear(config: &ExperimentConfig) -> Result<SuiteOutput, AnyError> {
    let head = header(&[
        "trial", "signs", "fast", "direct", "rel_err", "holder_lhs", "holder_rhs",
    ]);
    let grid = Grid3::cubic(3.0, 12)?;
    let mut rows = Vec::new();
    let mut flags = Vec::new();
    let mut worst_rel = 0.0f64;
    let mut worst_slack = 0.0f64;
    let trials = config.trials.max(10);
    for i in 0..trials {
        let base = config.seed.wrapping_add(3 * i as u64);
        let f = xsb_lab::library::random_band_limited_3(&grid, base, 0.45);
        let g = xsb_lab::library::random_band_limited_3(&grid, base + 1, 0.45);
        let h = xsb_lab::library::random_band_limited_3(&grid, base + 2, 0.45);
        for signs in SignPair::ALL {
            let fast =
                trilinear_form(&f, &g, &h, 0.5, 0.75, signs, config.symbol, TrilinearPath::Fast)?;
            let direct = trilinear_form(
                &f, &g, &h, 0.5, 0.75, signs, config.symbol, TrilinearPath::Direct,
            )?;
            let rel = (fast - direct).abs() / direct.abs().max(f64::MIN_POSITIVE);
            worst_rel = worst_rel.max(rel);
            let (lhs, rhs) = holder_chain(&f, &g, &h, 0.5, 0.75, signs, config.symbol)?;
            worst_slack = worst_slack.max((lhs - rhs) / rhs);
            rows.push(vec![
                format!("{i}"),
                format!("{signs}"),
                fmt_num(fast),
                fmt_num(direct),
                fmt_num(rel),
                fmt_num(lhs),
                fmt_num(rhs),
            ]);
        }
    }
    flags.push(Flag {
        name: "oracle equivalence".into(),
        pass: worst_rel <= 1e-8,
        detail: format!("worst relative error {worst_rel:.2e}"),
    });
    flags.push(Flag {
        name: "holder chain".into(),
        pass: worst_slack <= 1e-10,
        detail: format!("worst slack {worst_slack:.2e}"),
    });

    let mg = matched_grid(4.0, 16)?;
    let gdat = xsb_lab::library::random_band_limited_3(&mg, config.seed, 0.45);
    let (lhs, rhs) = layer_plancherel(&gdat, Sign::Plus, config.symbol)?;
    let rel = (lhs - rhs).abs() / rhs;
    flags.push(Flag {
        name: "layer plancherel".into(),
        pass: rel <= 1e-10,
        detail: format!("relative error {rel:.2e}"),
    });

    let lib = data_library_3(&mg, config.seed)?;
    let mut c1: Vec<f64> = Vec::new();
    for b in [0.6, 0.75, 0.9] {
        let mut cs: Vec<f64> = lib
            .iter()
            .map(|f| {
                let gw = weighted_field(f, b, Sign::Plus, config.symbol)?;
                Ok::<f64, AnyError>(l4_norm(&gw) / f.l2_norm())
            })
            .collect::<Result<_, _>>()?;
        cs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let max = *cs.last().unwrap();
        let median = 0.5 * (cs[cs.len() / 2 - 1] + cs[cs.len() / 2]);
        c1.push(max);
        flags.push(Flag {
            name: format!("weighted-field L4 bound b={b}"),
            pass: max <= 2.0 * median,
            detail: format!("max {max:.4}, median {median:.4}"),
        });
    }
    let (cmin, cmax) = (
        c1.iter().cloned().fold(f64::MAX, f64::min),
        c1.iter().cloned().fold(f64::MIN, f64::max),
    );
    // "Stable within +-10%": every value within 10% of the midrange,
    // equivalently max/min <= 1.1/0.9.
    let center = 0.5 * (cmax + cmin);
    flags.push(Flag {
        name: "weighted-field constant stable in b".into(),
        pass: cmax <= 1.1 * center && cmin >= 0.9 * center,
        detail: format!("C1 range [{cmin:.4}, {cmax:.4}]"),
    });

    let probe = bilinear_constant_probe(
        &Grid3::new(
            [4.0, 4.0, 4.0],
            [config.grid[0].min(32), config.grid[1].min(32), config.grid[2].min(32)],
        )?,
        0.0,
        0.75,
        SignPair { first: Sign::Minus, second: Sign::Minus },
        config.symbol,
        trials.max(10),
        config.seed,
    )?;
    let inserted = knapp_insertion_ratio(64.0, -0.5, 0.75)?;
    flags.push(Flag {
        name: "counterexample dominates s=0 probe".into(),
        pass: inserted >= 10.0 * probe,
        detail: format!("inserted {inserted:.4} vs probe {probe:.4}"),
    });
    Ok((head, rows, Vec::new(), flags))
}
