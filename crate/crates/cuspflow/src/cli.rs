//! Subcommand dispatch for the `cuspflow` binary.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use num_bigint::BigInt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use cuspflow_core::cantor::{build_ddelta, build_slice, pair_digit_model, singular_pair, CantorTree, TreeCaps};
use cuspflow_core::counting::{build_net, count_annulus, dirichlet_witness, fit_growth};
use cuspflow_core::covering::{
    chain_extract, covering_crossing, covering_sum, make_node, successors, CoverParams, NoNets, Truncation,
};
use cuspflow_core::excursion::{spectrum, SpectrumLimit};
use cuspflow_core::product::{box_count_dimension, classify, geometric_scales, DigitSet, DirectionTuple, JointProfile};
use cuspflow_core::{Cusp, Direction, Error};

use crate::config::{parse_rational, ConfigError, ExperimentConfig, Format, Model};
use crate::output::{float, json_float, pretty, rational, Cell, Table};
use crate::parallel::try_par_map;
use crate::verify::{run_all, Scale};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Spectrum,
    Count,
    Net,
    Witness,
    Cantor,
    Cover,
    Classify,
    Dimbox,
    Verify,
    Targets,
}

#[derive(Debug, Parser)]
#[command(name = "cuspflow", about = "Cusp excursions, counting, Cantor trees and coverings")]
pub struct Args {
    #[arg(value_enum)]
    pub command: Command,
    /// Flat key=value config file; command-line settings take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Settings as key=value.
    pub settings: Vec<String>,
}

/// A failed run: exit status plus diagnostic.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
    /// Output still written to stdout.
    pub partial: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure { code, message: message.into(), partial: String::new() }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::new(2, e.to_string())
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Budget(_) => 3,
            Error::InvalidInput(_) => 2,
            _ => 1,
        };
        Failure::new(code, e.to_string())
    }
}

type Run = Result<String, Failure>;

/// Parse arguments, run, and write to `out`/`err`; returns the exit status.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let mut notes = Vec::new();
    let res = ExperimentConfig::load(args.config.as_deref(), &args.settings)
        .map_err(Failure::from)
        .and_then(|cfg| run(args.command, &cfg, &mut notes));
    for n in notes {
        let _ = writeln!(err, "# {n}");
    }
    match res {
        Ok(s) => {
            let _ = out.write_all(s.as_bytes());
            0
        }
        Err(f) => {
            let _ = out.write_all(f.partial.as_bytes());
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

/// Run one subcommand; `notes` collects summary lines for stderr.
pub fn run(cmd: Command, cfg: &ExperimentConfig, notes: &mut Vec<String>) -> Run {
    if cfg.model == Model::Gaussian {
        return Err(Failure::new(2, "the gaussian model is not available; use model=modular"));
    }
    match cmd {
        Command::Spectrum => cmd_spectrum(cfg),
        Command::Count => cmd_count(cfg, notes),
        Command::Net => cmd_net(cfg),
        Command::Witness => cmd_witness(cfg),
        Command::Cantor => cmd_cantor(cfg),
        Command::Cover => cmd_cover(cfg),
        Command::Classify => cmd_classify(cfg),
        Command::Dimbox => cmd_dimbox(cfg, notes),
        Command::Verify => cmd_verify(cfg),
        Command::Targets => cmd_targets(cfg),
    }
}

/// `p/q`, a decimal, or `[a0;a1,a2,...]`; a trailing `...` marks a truncated prefix.
pub fn parse_direction(key: &str, v: &str) -> Result<Direction, ConfigError> {
    let v = v.trim();
    let Some(body) = v.strip_prefix('[').and_then(|b| b.strip_suffix(']')) else {
        return Ok(Direction::from_ratio(&parse_rational(key, v)?));
    };
    let bad = || ConfigError(format!("cannot parse {key} = `{v}` as a continued fraction"));
    let (body, exact) = match body.strip_suffix("...") {
        Some(b) => (b.trim_end_matches([',', ' ']), false),
        None => (body, true),
    };
    let quotients =
        body.split([';', ',']).map(|s| s.trim().parse::<BigInt>().map_err(|_| bad())).collect::<Result<Vec<_>, _>>()?;
    Direction::from_quotients(quotients, exact).map_err(|e| ConfigError(format!("{key}: {e}")))
}

fn cusp(cfg: &ExperimentConfig, key: &str, default: &str) -> Result<Cusp, ConfigError> {
    Ok(Cusp::from_ratio(&cfg.rational(key, default)?))
}

fn cmd_spectrum(cfg: &ExperimentConfig) -> Run {
    let x = parse_direction("x", cfg.require("x")?)?;
    let s = spectrum(&x, cfg.theta, &SpectrumLimit { h_max: Some(cfg.h_max.clone()), depth: None })?;
    let mut t = Table::new(&["p", "q", "t_enter", "t_peak", "t_exit", "peak"]);
    for r in &s.records {
        t.push(vec![
            r.cusp.num().into(),
            r.cusp.den().into(),
            r.t_enter.into(),
            r.t_peak.into(),
            r.t_exit.into(),
            r.peak.into(),
        ]);
    }
    Ok(t.render(cfg.format))
}

fn t_grid(cfg: &ExperimentConfig) -> Result<Vec<f64>, ConfigError> {
    if let Some(t) = cfg.raw("t") {
        return t
            .split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|_| ConfigError(format!("cannot parse t = `{t}`"))))
            .collect();
    }
    let (lo, hi, step) = (cfg.get("t_min", 4.0f64)?, cfg.get("t_max", 14.0f64)?, cfg.get("t_step", 1.0f64)?);
    if !(step > 0.0) || hi < lo {
        return Err(ConfigError("need t_min <= t_max and t_step > 0".into()));
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|k| lo + k as f64 * step).collect())
}

fn cmd_count(cfg: &ExperimentConfig, notes: &mut Vec<String>) -> Run {
    let a = cusp(cfg, "a", "0")?;
    let (a1, a2, a3) = (cfg.get("a1", 1.0)?, cfg.get("a2", 4.0)?, cfg.get("a3", 1.0)?);
    let budget = cfg.get("budget", 10_000_000u64)?;
    let grid = t_grid(cfg)?;
    let counts = try_par_map(cfg.effective_workers(), &grid, |&t| count_annulus(&a, a1, a2, a3, t, budget))?;
    let mut t = Table::new(&["t", "count", "log_count"]);
    for (tv, &n) in grid.iter().zip(&counts) {
        t.push(vec![(*tv).into(), n.into(), (n as f64).ln().into()]);
    }
    let pts: Vec<(f64, u64)> = grid.iter().copied().zip(counts).collect();
    if let Ok(fit) = fit_growth(&pts) {
        notes.push(format!("growth exponent {} lower constant {}", float(fit.slope), float(fit.lower_constant)));
    }
    Ok(t.render(cfg.format))
}

fn cmd_net(cfg: &ExperimentConfig) -> Run {
    let n = cfg.get("N", 100u64)?;
    let net =
        build_net(&cfg.region, n, cfg.get("c", 1.0)?, cfg.get("c_prime", 0.25)?, cfg.get("budget", 10_000_000u64)?)?;
    let mut t = Table::new(&["p", "q", "location"]);
    for m in &net.members {
        t.push(vec![m.num().into(), m.den().into(), m.to_f64().into()]);
    }
    Ok(t.render(cfg.format))
}

fn cmd_witness(cfg: &ExperimentConfig) -> Run {
    let x = parse_direction("x", cfg.require("x")?)?;
    let big_x: BigInt = cfg.get("X", BigInt::from(10_000))?;
    let w = dirichlet_witness(&x, &big_x)?;
    let mut t = Table::new(&["p", "q", "height"]);
    t.push(vec![w.num().into(), w.den().into(), w.height().into()]);
    Ok(t.render(cfg.format))
}

fn tree_caps(cfg: &ExperimentConfig) -> Result<TreeCaps, ConfigError> {
    let d = TreeCaps::default();
    Ok(TreeCaps { per_node: cfg.get("per_node", d.per_node)?, per_level: cfg.get("per_level", d.per_level)?, ..d })
}

fn cmd_cantor(cfg: &ExperimentConfig) -> Run {
    let root = cusp(cfg, "root", "1/101")?;
    let eps = cfg.get("eps", 0.25)?;
    let caps = tree_caps(cfg)?;
    let tree = match cfg.raw("kind").unwrap_or("ddelta") {
        "ddelta" => build_ddelta(&root, cfg.delta, cfg.depth, eps, &caps)?,
        "slice" => {
            let one = TreeCaps { per_node: 1, per_level: 1, ..caps.clone() };
            let base = build_ddelta(&root, cfg.delta, cfg.depth, eps, &one)?.first_path();
            build_slice(&base, cfg.delta, cfg.depth, eps, &caps)?
        }
        k => return Err(ConfigError(format!("kind must be ddelta or slice, got `{k}`")).into()),
    };
    let report = tree.evaluate()?;
    let mut t = Table::new(&["j", "d_j", "Delta_j", "s_j"]);
    for j in 0..report.d.len() {
        let delta = report.delta.get(j).map_or(Cell::from(""), |&v| v.into());
        let s = if j == 0 { Cell::from("") } else { report.s[j - 1].into() };
        t.push(vec![j.into(), report.d[j].into(), delta, s]);
    }
    Ok(match cfg.format {
        Format::Csv => t.csv(),
        Format::Json => pretty(&json!({ "tree": tree_json(&tree), "bound": t.json_value() })),
    })
}

fn tree_json(tree: &CantorTree) -> Value {
    let nodes: Vec<Value> = tree
        .nodes
        .iter()
        .map(|n| {
            json!({
                "cusp": n.cusp.to_string(),
                "level": n.level,
                "parent": n.parent,
                "radius": rational(&n.radius),
                "intermediate": n.intermediate.as_ref().map(|c| c.to_string()),
            })
        })
        .collect();
    json!({
        "kind": format!("{:?}", tree.kind),
        "eps": rational(&tree.eps),
        "delta": json_float(tree.delta),
        "thinned": tree.thinned,
        "nodes": nodes,
    })
}

fn cmd_cover(cfg: &ExperimentConfig) -> Run {
    let params = CoverParams::new(cfg.get("c", 2.0)?, cfg.delta, cfg.get("min_quotient", 2u64)?)?;
    match cfg.raw("mode").unwrap_or("chain") {
        "chain" => {
            let h0: BigInt = cfg.get("h0", BigInt::from(10_000_000_000u64))?;
            let pair = singular_pair(&h0, 1.0, cfg.depth.max(2), cfg.get("eps", 0.25)?)?;
            let xs = vec![pair.x1.clone(), pair.x2.clone()];
            let prof = JointProfile::new(&DirectionTuple::new(xs.clone())?, cfg.theta)?;
            let chain = chain_extract(&xs, &prof, &params, pair.horizon, &mut NoNets)?;
            let mut t = Table::new(&["l", "i", "j", "a_i", "a_j", "diam", "ratio"]);
            for (l, n) in chain.nodes.iter().enumerate() {
                let ratio = chain.ratios.get(l).map_or(Cell::from(""), |&r| r.into());
                t.push(vec![
                    l.into(),
                    (n.i + 1).into(),
                    (n.j + 1).into(),
                    (&n.cusps[n.i]).into(),
                    (&n.cusps[n.j]).into(),
                    n.ln_diam(&params.c).exp().into(),
                    ratio,
                ]);
            }
            Ok(t.render(cfg.format))
        }
        "sum" => {
            let list = cfg.raw("cusps").unwrap_or("1/2,1/8");
            let cusps = list
                .split(',')
                .map(|s| parse_rational("cusps", s).map(|r| Cusp::from_ratio(&r)))
                .collect::<Result<Vec<_>, _>>()?;
            let (i, j) = (cfg.get("i", 2usize)?, cfg.get("j", 1usize)?);
            if i == 0 || j == 0 {
                return Err(ConfigError("components i and j count from 1".into()).into());
            }
            let node = make_node(cusps, i - 1, j - 1, &params, &mut NoNets)?
                .map_err(|r| Failure::new(1, format!("not a node: {r:?}")))?;
            let trunc = Truncation { max_height: cfg.h_max.clone(), max_nodes: cfg.truncation };
            let succ = successors(&node, &params, &trunc, &mut NoNets)?;
            let mut t = Table::new(&["s", "sum", "terms", "truncated"]);
            let grid: Vec<f64> = match cfg.raw("s") {
                Some(s) => vec![s.parse().map_err(|_| ConfigError(format!("cannot parse s = `{s}`")))?],
                None => (0..=8).map(|k| k as f64 * 0.25).collect(),
            };
            for s in grid {
                let r = covering_sum(&node, &succ, s);
                t.push(vec![r.s.into(), r.sum.into(), r.terms.into(), r.truncated.into()]);
            }
            if let Some(s) = covering_crossing(&node, &succ, 0.0, 2.0) {
                t.push(vec![s.into(), 1.0.into(), succ.nodes.len().into(), succ.truncated.into()]);
            }
            Ok(t.render(cfg.format))
        }
        m => Err(ConfigError(format!("mode must be chain or sum, got `{m}`")).into()),
    }
}

fn cmd_classify(cfg: &ExperimentConfig) -> Run {
    let spec = cfg.require("xs")?;
    let (xs, default_window) = if spec == "sing2" {
        let h0: BigInt = cfg.get("h0", BigInt::from(10_000_000_000u64))?;
        let pair = singular_pair(&h0, 1.0, cfg.depth.max(2), cfg.get("eps", 0.25)?)?;
        (vec![pair.x1, pair.x2], Some(pair.horizon))
    } else {
        let xs = spec.split(';').map(|s| parse_direction("xs", s)).collect::<Result<Vec<_>, _>>()?;
        (xs, None)
    };
    let window = match (cfg.raw("t0"), cfg.raw("t1"), default_window) {
        (None, None, Some(w)) => w,
        _ => (cfg.get("t0", 0.0)?, cfg.get::<f64>("t1", f64::NAN)?),
    };
    if !window.1.is_finite() {
        return Err(ConfigError("set the window with t0=... t1=...".into()).into());
    }
    let prof = JointProfile::new(&DirectionTuple::new(xs)?, cfg.theta)?;
    let verdict = classify(&prof, cfg.delta, window)?;
    let mut t = Table::new(&["verdict", "delta", "t0", "t1"]);
    t.push(vec![format!("{verdict:?}").to_lowercase().into(), cfg.delta.into(), window.0.into(), window.1.into()]);
    Ok(t.render(cfg.format))
}

fn cmd_dimbox(cfg: &ExperimentConfig, notes: &mut Vec<String>) -> Run {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let depth = cfg.depth as u32;
    let (set, coarse, scales) = match cfg.raw("set").unwrap_or("pair") {
        "segment" => (DigitSet { base: 10, digits: vec![(0..10).collect()] }, 3, geometric_scales(0.5, 2, 10)),
        "cantor" => (DigitSet { base: 3, digits: vec![vec![0, 2]] }, 10, geometric_scales(1.0 / 3.0, 1, 8)),
        "pair" => (pair_digit_model(), 2, geometric_scales(0.5, 1, 8)),
        s => return Err(ConfigError(format!("set must be segment, cantor or pair, got `{s}`")).into()),
    };
    if depth < coarse {
        return Err(ConfigError(format!("depth must be at least {coarse} for this set")).into());
    }
    let pts = set.sample(coarse, depth, &mut rng);
    let bc = box_count_dimension(&pts, &scales)?;
    notes.push(format!("slope {} similarity dimension {}", float(bc.slope), float(set.similarity_dimension())));
    let mut t = Table::new(&["eps", "count"]);
    for &(e, n) in &bc.counts {
        t.push(vec![e.into(), n.into()]);
    }
    Ok(t.render(cfg.format))
}

fn cmd_verify(cfg: &ExperimentConfig) -> Run {
    let scale = if cfg.get("quick", true)? { Scale::Quick } else { Scale::Full };
    let res = run_all(scale, cfg.effective_workers(), cfg.seed);
    let mut t = Table::new(&["id", "check", "passed", "detail"]);
    for r in &res {
        t.push(vec![r.id.into(), r.name.into(), r.passed.into(), r.detail.clone().into()]);
    }
    let text = t.render(cfg.format);
    if res.iter().all(|r| r.passed) {
        Ok(text)
    } else {
        let failed: Vec<String> = res.iter().filter(|r| !r.passed).map(|r| r.id.to_string()).collect();
        Err(Failure { code: 1, message: format!("checks failed: {}", failed.join(", ")), partial: text })
    }
}

fn cmd_targets(cfg: &ExperimentConfig) -> Run {
    let k: u64 = cfg.get("k", 2)?;
    let n: u64 = cfg.get("n", 2)?;
    if k == 0 || n < 2 {
        return Err(ConfigError("need k >= 1 and n >= 2".into()).into());
    }
    let half = (n - 1) as f64 / 2.0;
    let bounded = (k * (n - 1)) as f64 - half;
    let divergent = (k * (2 * n - 1)) as f64 - half;
    let mut t = Table::new(&["k", "n", "B", "D"]);
    t.push(vec![k.into(), n.into(), bounded.into(), divergent.into()]);
    Ok(t.render(cfg.format))
}
