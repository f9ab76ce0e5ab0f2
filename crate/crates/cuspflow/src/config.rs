//! Experiment configuration: flat `key=value` text, merged as
//! flags over config file over defaults.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use cuspflow_core::lattice::Region;
use num_bigint::BigInt;
use num_rational::BigRational;

/// Problems with the configuration itself.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Model {
    Modular,
    Gaussian,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

const DEFAULTS: &[(&str, &str)] = &[
    ("model", "modular"),
    ("lo", "-2"),
    ("hi", "2"),
    ("theta", "1"),
    ("delta", "0.25"),
    ("h_max", "1000000"),
    ("depth", "6"),
    ("truncation", "10000"),
    ("workers", "0"),
    ("seed", "0"),
    ("format", "csv"),
];

/// Keys read by individual subcommands.
const EXTRA_KEYS: &[&str] = &[
    "x",
    "xs",
    "a",
    "a1",
    "a2",
    "a3",
    "t",
    "t_min",
    "t_max",
    "t_step",
    "budget",
    "N",
    "c",
    "c_prime",
    "X",
    "kind",
    "root",
    "eps",
    "per_node",
    "per_level",
    "h0",
    "mode",
    "s",
    "i",
    "j",
    "cusps",
    "k",
    "n",
    "set",
    "points",
    "scales",
    "t0",
    "t1",
    "min_quotient",
    "quick",
];

/// Parsed, validated settings plus the raw map for subcommand keys.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub model: Model,
    pub region: Region,
    pub theta: f64,
    pub delta: f64,
    pub h_max: BigInt,
    pub depth: usize,
    pub truncation: usize,
    /// `0` picks the machine default; `CUSPFLOW_WORKERS` overrides.
    pub workers: usize,
    pub seed: u64,
    pub format: Format,
    raw: BTreeMap<String, String>,
}

/// Parse `key=value` lines; blank lines and `#` comments are skipped.
pub fn parse_kv_text(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut out = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = split_kv(line).ok_or_else(|| ConfigError(format!("line {}: expected key=value", n + 1)))?;
        out.insert(k, v);
    }
    Ok(out)
}

fn split_kv(s: &str) -> Option<(String, String)> {
    let (k, v) = s.split_once('=')?;
    let k = k.trim();
    if k.is_empty() {
        return None;
    }
    Some((k.to_string(), v.trim().to_string()))
}

impl ExperimentConfig {
    /// Merge `flags` over the optional config file over the defaults.
    pub fn load(file: Option<&Path>, flags: &[String]) -> Result<Self, ConfigError> {
        let mut map: BTreeMap<String, String> = DEFAULTS.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
        if let Some(path) = file {
            let text = std::fs::read_to_string(path)
                .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
            map.extend(parse_kv_text(&text)?);
        }
        for f in flags {
            let (k, v) = split_kv(f).ok_or_else(|| ConfigError(format!("expected key=value, got `{f}`")))?;
            map.insert(k, v);
        }
        Self::from_map(map)
    }

    pub fn from_map(map: BTreeMap<String, String>) -> Result<Self, ConfigError> {
        for k in map.keys() {
            if !DEFAULTS.iter().any(|(d, _)| d == k) && !EXTRA_KEYS.contains(&k.as_str()) {
                return Err(ConfigError(format!("unknown key `{k}`")));
            }
        }
        let get = |k: &str| map.get(k).map(String::as_str).unwrap_or_default();
        let model = match get("model") {
            "modular" => Model::Modular,
            "gaussian" => Model::Gaussian,
            m => return Err(ConfigError(format!("model must be modular or gaussian, got `{m}`"))),
        };
        let format = match get("format") {
            "csv" => Format::Csv,
            "json" => Format::Json,
            f => return Err(ConfigError(format!("format must be csv or json, got `{f}`"))),
        };
        let lo = parse_rational("lo", get("lo"))?;
        let hi = parse_rational("hi", get("hi"))?;
        if lo >= hi {
            return Err(ConfigError("region needs lo < hi".into()));
        }
        let cfg = ExperimentConfig {
            model,
            region: Region::closed(lo, hi),
            theta: positive_f64("theta", get("theta"))?,
            delta: positive_f64("delta", get("delta"))?,
            h_max: positive_int("h_max", get("h_max"))?,
            depth: parse::<usize>("depth", get("depth"))?,
            truncation: parse::<usize>("truncation", get("truncation"))?,
            workers: parse::<usize>("workers", get("workers"))?,
            seed: parse::<u64>("seed", get("seed"))?,
            format,
            raw: map.clone(),
        };
        if cfg.depth == 0 || cfg.truncation == 0 {
            return Err(ConfigError("depth and truncation must be positive".into()));
        }
        Ok(cfg)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.raw.get(key).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str, default: T) -> Result<T, ConfigError> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => parse(key, v),
        }
    }

    pub fn require(&self, key: &str) -> Result<&str, ConfigError> {
        self.raw(key).ok_or_else(|| ConfigError(format!("missing key `{key}`")))
    }

    pub fn rational(&self, key: &str, default: &str) -> Result<BigRational, ConfigError> {
        parse_rational(key, self.raw(key).unwrap_or(default))
    }

    /// Worker count after the `CUSPFLOW_WORKERS` override.
    pub fn effective_workers(&self) -> usize {
        crate::parallel::worker_count(self.workers)
    }
}

fn parse<T: FromStr>(key: &str, v: &str) -> Result<T, ConfigError> {
    v.parse().map_err(|_| ConfigError(format!("cannot parse {key} = `{v}`")))
}

fn positive_f64(key: &str, v: &str) -> Result<f64, ConfigError> {
    let x: f64 = parse(key, v)?;
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(ConfigError(format!("{key} must be positive, got {v}")))
    }
}

fn positive_int(key: &str, v: &str) -> Result<BigInt, ConfigError> {
    let x: BigInt =
        parse(key, v.trim_start_matches('+')).or_else(|_| parse::<f64>(key, v).map(|f| BigInt::from(f as u128)))?;
    if x > BigInt::from(0) {
        Ok(x)
    } else {
        Err(ConfigError(format!("{key} must be positive, got {v}")))
    }
}

/// `p/q`, an integer, or a finite decimal.
pub fn parse_rational(key: &str, v: &str) -> Result<BigRational, ConfigError> {
    let bad = || ConfigError(format!("cannot parse {key} = `{v}` as a rational"));
    let v = v.trim();
    if let Some((p, q)) = v.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q == BigInt::from(0) {
            return Err(bad());
        }
        return Ok(BigRational::new(p, q));
    }
    if let Ok(n) = v.parse::<BigInt>() {
        return Ok(BigRational::from_integer(n));
    }
    // finite decimal, read exactly
    let (sign, body) = match v.strip_prefix('-') {
        Some(b) => (-1, b),
        None => (1, v),
    };
    let (mant, exp) = match body.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().map_err(|_| bad())?),
        None => (body, 0),
    };
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    if int.is_empty() && frac.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let r = if scale >= 0 {
        BigRational::from_integer(digits * ten.pow(scale as u32))
    } else {
        BigRational::new(digits, ten.pow((-scale) as u32))
    };
    Ok(r * BigRational::from_integer(sign.into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file_override_defaults() {
        let dir = std::env::temp_dir().join(format!("cuspflow-cfg-{}", std::process::id()));
        std::fs::write(&dir, "# test\ntheta = 2\ndepth=3\n").unwrap();
        let cfg = ExperimentConfig::load(Some(&dir), &["depth=4".into()]).unwrap();
        std::fs::remove_file(&dir).unwrap();
        assert_eq!(cfg.theta, 2.0);
        assert_eq!(cfg.depth, 4);
        assert_eq!(cfg.delta, 0.25);
        assert_eq!(cfg.format, Format::Csv);
    }

    #[test]
    fn bad_configs_are_rejected() {
        for flags in [vec!["theta=-1"], vec!["bogus=1"], vec!["format=xml"], vec!["lo=3"], vec!["depth"]] {
            let flags: Vec<String> = flags.into_iter().map(String::from).collect();
            assert!(ExperimentConfig::load(None, &flags).is_err(), "{flags:?}");
        }
    }

    #[test]
    fn rationals_parse_exactly() {
        let r = |s| parse_rational("x", s).unwrap();
        assert_eq!(r("2/7"), BigRational::new(2.into(), 7.into()));
        assert_eq!(r("-0.125"), BigRational::new((-1).into(), 8.into()));
        assert_eq!(r("1e-3"), BigRational::new(1.into(), 1000.into()));
        assert_eq!(r("3"), BigRational::from_integer(3.into()));
        assert!(parse_rational("x", "1/0").is_err());
        assert!(parse_rational("x", "abc").is_err());
    }
}
