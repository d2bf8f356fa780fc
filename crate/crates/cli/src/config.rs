//! Experiment configuration: range syntax, key=value config files, and the
//! merged run configuration (flags win over file entries).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;
use xsb_lab::SymbolKind;

#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage<T>(msg: impl Into<String>) -> Result<T, UsageError> {
    Err(UsageError(msg.into()))
}

/// Parse a numeric list: either comma-separated values, a geometric range
/// `a:b:xk`, or an arithmetic range `a:b:+d`.  Ranges include both endpoints
/// (up to floating error on the last step).
pub fn parse_range(spec: &str) -> Result<Vec<f64>, UsageError> {
    let spec = spec.trim();
    if spec.is_empty() {
        return usage("empty range");
    }
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() == 3 {
        let a: f64 = parts[0]
            .parse()
            .map_err(|_| UsageError(format!("bad range start '{}'", parts[0])))?;
        let b: f64 = parts[1]
            .parse()
            .map_err(|_| UsageError(format!("bad range end '{}'", parts[1])))?;
        let step = parts[2];
        let mut out = Vec::new();
        if let Some(k) = step.strip_prefix('x') {
            let k: f64 = k
                .parse()
                .map_err(|_| UsageError(format!("bad geometric factor '{step}'")))?;
            if !(k > 1.0) || !(a > 0.0) || b < a {
                return usage(format!("bad geometric range '{spec}'"));
            }
            let mut x = a;
            while x <= b * (1.0 + 1e-12) {
                out.push(x);
                x *= k;
            }
        } else if let Some(d) = step.strip_prefix('+') {
            let d: f64 = d
                .parse()
                .map_err(|_| UsageError(format!("bad arithmetic step '{step}'")))?;
            if !(d > 0.0) || b < a {
                return usage(format!("bad arithmetic range '{spec}'"));
            }
            let mut x = a;
            let mut i = 0u32;
            while x <= b + 1e-12 * d {
                out.push(x);
                i += 1;
                x = a + f64::from(i) * d;
            }
        } else {
            return usage(format!("range step must be 'xk' or '+d', got '{step}'"));
        }
        if out.is_empty() {
            return usage(format!("range '{spec}' produced no values"));
        }
        return Ok(out);
    }
    if parts.len() != 1 {
        return usage(format!("malformed range '{spec}'"));
    }
    spec.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| UsageError(format!("bad number '{t}'")))
        })
        .collect()
}

pub fn parse_grid(spec: &str) -> Result<[usize; 3], UsageError> {
    let parts: Vec<&str> = spec.split(',').collect();
    if parts.len() != 3 {
        return usage(format!("grid must be n1,n2,nt, got '{spec}'"));
    }
    let mut out = [0usize; 3];
    for (i, p) in parts.iter().enumerate() {
        out[i] = p
            .trim()
            .parse()
            .map_err(|_| UsageError(format!("bad grid size '{p}'")))?;
        if out[i] > 256 {
            return usage(format!("grid size {} exceeds the 256 cap", out[i]));
        }
    }
    Ok(out)
}

pub fn parse_symbol(spec: &str) -> Result<SymbolKind, UsageError> {
    match spec.trim() {
        "hyperbolic" => Ok(SymbolKind::Hyperbolic),
        "elliptic" => Ok(SymbolKind::Elliptic),
        other => usage(format!("unknown symbol '{other}' (hyperbolic | elliptic)")),
    }
}

/// Plain key=value config file; `#` starts a comment.
pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>, UsageError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| UsageError(format!("cannot read config {}: {e}", path.display())))?;
    let mut map = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return usage(format!(
                "{}:{}: expected key=value",
                path.display(),
                lineno + 1
            ));
        };
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Norms,
    Propagator,
    Strichartz,
    Knapp,
    Trilinear,
}

impl std::fmt::Display for Suite {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Suite::Norms => "norms",
            Suite::Propagator => "propagator",
            Suite::Strichartz => "strichartz",
            Suite::Knapp => "knapp",
            Suite::Trilinear => "trilinear",
        };
        write!(f, "{name}")
    }
}

/// Fully resolved run configuration.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    pub suite: Suite,
    pub s_list: Vec<f64>,
    pub b_list: Vec<f64>,
    pub n_list: Vec<f64>,
    pub j_list: Vec<u8>,
    pub symbol: SymbolKind,
    pub grid: [usize; 3],
    pub nodes: usize,
    pub seed: u64,
    pub trials: usize,
    pub out: PathBuf,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), UsageError> {
        if self.s_list.is_empty() || self.b_list.is_empty() || self.n_list.is_empty() {
            return usage("parameter lists must be nonempty");
        }
        if self.n_list.iter().any(|&n| n > 256.0) {
            return usage("N exceeds the 256 cap");
        }
        if self.j_list.iter().any(|&j| !(1..=3).contains(&j)) {
            return usage("j must be 1, 2 or 3");
        }
        if self.nodes < 2 {
            return usage("nodes must be >= 2");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_range() {
        let v = parse_range("4:256:x2").unwrap();
        assert_eq!(v, vec![4.0, 8.0, 16.0, 32.0, 64.0, 128.0, 256.0]);
    }

    #[test]
    fn arithmetic_range() {
        let v = parse_range("0:1:+0.25").unwrap();
        assert_eq!(v.len(), 5);
        assert!((v[4] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn plain_list() {
        assert_eq!(parse_range("-0.5,0.75").unwrap(), vec![-0.5, 0.75]);
        assert_eq!(parse_range("3").unwrap(), vec![3.0]);
    }

    #[test]
    fn malformed_ranges_are_usage_errors() {
        assert!(parse_range("").is_err());
        assert!(parse_range("4:2:x2").is_err());
        assert!(parse_range("1:8:*2").is_err());
        assert!(parse_range("a:b:x2").is_err());
        assert!(parse_grid("32,32").is_err());
        assert!(parse_grid("32,32,999").is_err());
        assert!(parse_symbol("parabolic").is_err());
    }

    #[test]
    fn config_file_round_trip() {
        let dir = std::env::temp_dir().join("xsb-config-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.conf");
        std::fs::write(&path, "seed = 7  # rng\nN = 4:16:x2\n\n").unwrap();
        let map = read_config_file(&path).unwrap();
        assert_eq!(map["seed"], "7");
        assert_eq!(map["N"], "4:16:x2");
    }
}
