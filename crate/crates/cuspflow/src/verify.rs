//! Invariant suite shared by the `verify` subcommand and the acceptance tests.
//!
//! Every check has a quick scale (seconds) and a full scale (the published
//! sample sizes and tolerances).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cuspflow_core::arith::{ln_ratio, ratio_to_f64};
use cuspflow_core::cantor::{
    build_ddelta, build_slice, evaluate_bound, ideal_ddelta_bound, level_separation, pair_digit_model, singular_pair,
    synthetic_bound, synthetic_levels, TreeCaps,
};
use cuspflow_core::counting::{count_annulus, dirichlet_witness, fit_growth, weighted_height_sum};
use cuspflow_core::covering::{chain_extract, make_node, successors, CoverNode, CoverParams, NoNets, Truncation};
use cuspflow_core::excursion::{consecutive_gap_check, spectrum, spectrum_by_enumeration, SpectrumLimit};
use cuspflow_core::geometry::{busemann, gromov_dist, moebius_apply, BoundaryPoint, FramePoint, Moebius};
use cuspflow_core::lattice::{enumerate_cusps, realize, IntMatrix, Region};
use cuspflow_core::product::{
    box_count_dimension, classify, geometric_scales, DigitSet, DirectionTuple, Divergence, JointProfile,
};
use cuspflow_core::{Cusp, Direction};

use crate::parallel::par_map;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scale {
    Quick,
    Full,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

pub const CHECKS: [&str; 11] = [
    "exact geometry",
    "spectrum via continued fractions matches enumeration",
    "distance to consecutive spectrum cusps",
    "cusp separation",
    "annulus growth",
    "Dirichlet witnesses",
    "weighted height sums",
    "Cantor bound evaluator",
    "slice tree trend",
    "covering chain and successors",
    "box counting",
];

type Outcome = Result<String, String>;

/// Run check `id` (1-based).
pub fn run_check(id: usize, scale: Scale, workers: usize, seed: u64) -> CheckResult {
    let f: fn(Scale, usize, u64) -> Outcome = match id {
        1 => geometry,
        2 => spectra_agree,
        3 => consecutive_distance,
        4 => separation,
        5 => growth,
        6 => witnesses,
        7 => weighted_sums,
        8 => cantor_bound,
        9 => slice_trend,
        10 => covering_chain,
        11 => box_counts,
        _ => panic!("no check {id}"),
    };
    let out = std::panic::catch_unwind(|| f(scale, workers, seed)).unwrap_or_else(|p| {
        let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
        Err(format!("panicked: {}", msg.unwrap_or_default()))
    });
    let (passed, detail) = match out {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    CheckResult { id, name: CHECKS[id - 1], passed, detail }
}

pub fn run_all(scale: Scale, workers: usize, seed: u64) -> Vec<CheckResult> {
    (1..=CHECKS.len()).map(|id| run_check(id, scale, workers, seed)).collect()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(p.into(), q.into())
}

fn random_modular(rng: &mut ChaCha8Rng, len: usize) -> IntMatrix {
    let gens = [
        IntMatrix::new(1, 1, 0, 1).unwrap(),
        IntMatrix::new(1, -1, 0, 1).unwrap(),
        IntMatrix::new(0, -1, 1, 0).unwrap(),
    ];
    let mut g = IntMatrix::new(1, 0, 0, 1).unwrap();
    for _ in 0..len {
        g = g.mul(&gens[rng.gen_range(0..3)]);
    }
    g
}

fn random_cusp(rng: &mut ChaCha8Rng) -> Cusp {
    let q = rng.gen_range(1..50i64);
    let p = rng.gen_range(-2 * q..=2 * q);
    Cusp::new(p, q).unwrap()
}

fn random_point(rng: &mut ChaCha8Rng) -> FramePoint<1> {
    FramePoint::new(rng.gen_range(0.2..5.0), [rng.gen_range(-3.0..3.0)]).unwrap()
}

fn busemann_height(c: &Cusp) -> Result<BigInt, String> {
    Ok(realize(c).map_err(|e| e.to_string())?.busemann_height())
}

fn geometry(scale: Scale, _workers: usize, seed: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sigma2 = Moebius::SIGMA.compose(&Moebius::SIGMA);
    ensure(sigma2.approx_eq(&Moebius::IDENTITY, 0.0), || "sigma squared is not the identity".into())?;
    let samples = if scale == Scale::Full { 1000 } else { 100 };
    let mut worst_cocycle = 0f64;
    let mut worst_equiv = 0f64;
    for _ in 0..samples {
        let (x, y, z) = (random_point(&mut rng), random_point(&mut rng), random_point(&mut rng));
        let xi =
            if rng.gen_bool(0.2) { BoundaryPoint::Infinity } else { BoundaryPoint::Finite([rng.gen_range(-3.0..3.0)]) };
        let b = |p: &FramePoint<1>, q: &FramePoint<1>| busemann(&xi, p, q);
        worst_cocycle = worst_cocycle.max((b(&x, &y) + b(&y, &z) - b(&x, &z)).abs()).max((b(&x, &y) + b(&y, &x)).abs());
        let g = random_modular(&mut rng, 4).to_moebius();
        let (gx, gy) =
            (moebius_apply(&g, &x).map_err(|e| e.to_string())?, moebius_apply(&g, &y).map_err(|e| e.to_string())?);
        let lhs = busemann(&g.apply_boundary(&xi), &gx, &gy);
        worst_equiv = worst_equiv.max((lhs - b(&x, &y)).abs() / (1.0 + b(&x, &y).abs()));
    }
    ensure(worst_cocycle <= 1e-9, || format!("Busemann cocycle defect {worst_cocycle:e}"))?;
    ensure(worst_equiv <= 1e-8, || format!("Busemann equivariance defect {worst_equiv:e}"))?;
    // d_o(γa, γb)² h̃(γa) h̃(γb) is Γ-invariant
    let o = FramePoint::<1>::origin();
    let mut worst = 0f64;
    let mut done = 0;
    while done < samples {
        let g = random_modular(&mut rng, 8);
        let (a, b) = (random_cusp(&mut rng), random_cusp(&mut rng));
        let (ga, gb) = (g.apply(&a), g.apply(&b));
        if a == b || ga.is_infinite() || gb.is_infinite() {
            continue;
        }
        let inv = |a: &Cusp, b: &Cusp| -> Result<f64, String> {
            let d = gromov_dist(&a.location(), &b.location(), &o).map_err(|e| e.to_string())?;
            let h = busemann_height(a)? * busemann_height(b)?;
            Ok(d * d * h.to_f64().unwrap())
        };
        let (l, r) = (inv(&ga, &gb)?, inv(&a, &b)?);
        worst = worst.max((l - r).abs() / r);
        done += 1;
    }
    ensure(worst <= 1e-8, || format!("Gromov invariance relative error {worst:e}"))?;
    // h ≤ h̃ ≤ 5h on [-2, 2]
    let h_max = if scale == Scale::Full { 10_000 } else { 1_000 };
    let cusps = enumerate_cusps(&Region::ints(-2, 2, true), &BigInt::from(h_max));
    for c in &cusps {
        let (h, ht) = (c.height(), busemann_height(c)?);
        ensure(h <= ht && ht <= &h * 5, || format!("height ratio out of [1, 5] at {c}"))?;
    }
    Ok(format!(
        "cocycle {worst_cocycle:.1e}, equivariance {worst_equiv:.1e}, invariance {worst:.1e} over {samples}; {} cusps with h <= {h_max}",
        cusps.len()
    ))
}

fn spectra_agree(scale: Scale, workers: usize, seed: u64) -> Outcome {
    let n = if scale == Scale::Full { 100 } else { 20 };
    let h_max: u64 = if scale == Scale::Full { 1_000_000 } else { 10_000 };
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 2);
    let xs: Vec<Direction> = (0..n).map(|_| Direction::random(&mut rng, 15)).collect();
    let jobs: Vec<(Direction, f64)> =
        [1.0, 2.0].iter().flat_map(|&th| xs.iter().map(move |x| (x.clone(), th))).collect();
    let res = par_map(workers, &jobs, |(x, theta)| -> Result<(usize, f64), String> {
        let s = spectrum(x, *theta, &SpectrumLimit::height(h_max)).map_err(|e| e.to_string())?;
        let v = x.value().unwrap();
        let mut via_cf: Vec<Cusp> = s.records.iter().map(|r| r.cusp.clone()).collect();
        via_cf.sort_by(|a, b| a.den().cmp(b.den()).then(a.cmp(b)));
        let via_enum = spectrum_by_enumeration(&v, *theta, h_max).map_err(|e| e.to_string())?;
        if via_cf != via_enum {
            return Err(format!("spectra differ at x = {v}, theta = {theta}"));
        }
        let mut worst = 0f64;
        for r in &s.records {
            let d = (&v - r.cusp.value().unwrap()).abs();
            if d.is_zero() {
                continue;
            }
            let ln_d = ln_ratio(&d);
            worst = worst.max((-r.t_enter - r.t_exit - 2.0 * ln_d).abs());
            let ln_peak = -(2f64.ln()) - r.cusp.ln_height() - ln_d;
            worst = worst.max((r.peak.ln() - ln_peak).abs());
        }
        Ok((via_cf.len(), worst))
    });
    let mut cusps = 0;
    let mut worst = 0f64;
    for r in res {
        let (c, w) = r?;
        cusps += c;
        worst = worst.max(w);
    }
    ensure(worst <= 1e-10, || format!("Vieta/peak relative error {worst:e}"))?;
    Ok(format!("{} spectra, {cusps} cusps identical; identity error {worst:.1e}", jobs.len()))
}

fn consecutive_distance(scale: Scale, _workers: usize, seed: u64) -> Outcome {
    let n = if scale == Scale::Full { 100 } else { 20 };
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 3);
    let (mut lo, mut hi, mut pairs) = (f64::INFINITY, 0f64, 0);
    for _ in 0..n {
        let x = Direction::random(&mut rng, 30);
        let s = spectrum(&x, 1.0, &SpectrumLimit::unbounded()).map_err(|e| e.to_string())?;
        let v = x.value().unwrap();
        // recomputed from exact distances rather than the stored bumps
        for w in s.records.windows(2) {
            let d = (&v - w[0].cusp.value().unwrap()).abs();
            if d.is_zero() {
                continue;
            }
            let r = (ln_ratio(&d) + 0.5 * (w[0].cusp.ln_height() + w[1].cusp.ln_height())).exp();
            lo = lo.min(r);
            hi = hi.max(r);
            pairs += 1;
        }
        let report = consecutive_gap_check(&s).map_err(|e| e.to_string())?;
        ensure(report.within_bounds, || format!("gap check fails at x = {v}"))?;
    }
    ensure(lo >= 0.5 && hi <= 2.0, || format!("ratio range [{lo}, {hi}] leaves [1/2, 2]"))?;
    Ok(format!("{pairs} consecutive pairs, ratios in [{lo:.4}, {hi:.4}]"))
}

fn separation(scale: Scale, _workers: usize, _seed: u64) -> Outcome {
    let h = if scale == Scale::Full { 400 } else { 100 };
    let cusps = enumerate_cusps(&Region::ints(0, 1, true), &BigInt::from(h));
    let vals: Vec<(BigRational, BigRational)> =
        cusps.iter().map(|c| (c.value().unwrap(), BigRational::from_integer(c.height()))).collect();
    let mut pairs = 0u64;
    let mut least: Option<BigRational> = None;
    for (k, (a, ha)) in vals.iter().enumerate() {
        for (b, hb) in &vals[k + 1..] {
            let d = a - b;
            let v = &d * &d * ha * hb;
            ensure(v >= BigRational::one(), || format!("pair {a}, {b} closer than 1/sqrt(h h')"))?;
            if least.as_ref().map_or(true, |l| v < *l) {
                least = Some(v);
            }
            pairs += 1;
        }
    }
    Ok(format!("{} cusps, {pairs} pairs, least |a-b|^2 h h' = {}", cusps.len(), least.unwrap()))
}

fn growth(scale: Scale, workers: usize, _seed: u64) -> Outcome {
    let top = if scale == Scale::Full { 14 } else { 9 };
    let grid: Vec<f64> = (4..=top).map(f64::from).collect();
    let a = Cusp::new(0, 1).unwrap();
    let counts: Vec<(f64, u64)> =
        par_map(workers, &grid, |&t| count_annulus(&a, 1.0, 4.0, 1.0, t, 10_000_000).map(|n| (t, n)))
            .into_iter()
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
    let fit = fit_growth(&counts).map_err(|e| e.to_string())?;
    let upsilon = counts.iter().map(|&(t, n)| n as f64 / t.exp()).fold(f64::INFINITY, f64::min);
    ensure((fit.slope - 1.0).abs() <= 0.1, || format!("growth exponent {}", fit.slope))?;
    ensure(upsilon > 0.0, || "a count vanished".into())?;
    Ok(format!("exponent {:.4} over t in [4, {top}], min count/e^t = {upsilon:.4}", fit.slope))
}

fn witnesses(scale: Scale, workers: usize, _seed: u64) -> Outcome {
    let n: i64 = if scale == Scale::Full { 10_000 } else { 1_000 };
    let xs: Vec<i64> = (0..n).collect();
    for big_x in [100i64, 10_000, 1_000_000] {
        let bx = BigInt::from(big_x);
        let xr = BigRational::from_integer(bx.clone());
        let bad = par_map(workers, &xs, |&k| {
            let x = rat(2 * k + 1, 2 * n);
            let w = match dirichlet_witness(&Direction::from_ratio(&x), &bx) {
                Ok(w) => w,
                Err(_) => return true,
            };
            let d = &x - w.value().unwrap();
            w.height() > bx || &d * &d * &xr > BigRational::one()
        });
        let fails = bad.iter().filter(|&&b| b).count();
        ensure(fails == 0, || format!("{fails} directions without a witness at X = {big_x}"))?;
    }
    Ok(format!("{n} grid directions at X = 1e2, 1e4, 1e6"))
}

fn weighted_sums(scale: Scale, _workers: usize, _seed: u64) -> Outcome {
    let top = if scale == Scale::Full { 6 } else { 4 };
    let mut last = 0.0;
    for e in 2..=top {
        let x = 10u64.pow(e);
        let s = weighted_height_sum(&Region::ints(0, 1, true), x, 1_000_000).map_err(|e| e.to_string())?;
        let bound = (x as f64).sqrt();
        ensure(s.sum <= bound, || format!("sum {} above sqrt(X) at X = {x}", s.sum))?;
        last = s.sum / bound;
    }
    Ok(format!("sum / sqrt(X) = {last:.4} at X = 1e{top}"))
}

fn cantor_bound(scale: Scale, _workers: usize, _seed: u64) -> Outcome {
    let mut worst = 0f64;
    for (d0, lambda, delta) in [(0.5, 0.1, 0.3), (0.01, 0.001, 0.05), (0.2, 0.5, 0.9)] {
        let lv = synthetic_levels(d0, lambda, delta, 8);
        let r = evaluate_bound(&lv, 1.0, "synthetic".into()).map_err(|e| e.to_string())?;
        for j in 1..=8 {
            worst = worst.max((r.s[j - 1] - synthetic_bound(1.0, d0, lambda, delta, j)).abs());
        }
    }
    ensure(worst <= 1e-12, || format!("synthetic mismatch {worst:e}"))?;
    let (root, depth) =
        if scale == Scale::Full { (Cusp::new(1, 1001).unwrap(), 6) } else { (Cusp::new(1, 101).unwrap(), 4) };
    let tree = build_ddelta(&root, 1.0, depth, 0.25, &TreeCaps::default()).map_err(|e| e.to_string())?;
    tree.verify_structure().map_err(|e| e.to_string())?;
    let r = tree.evaluate().map_err(|e| e.to_string())?;
    let dev = (1..=depth).map(|j| (r.s[j - 1] - ideal_ddelta_bound(1.0, 1.0, j)).abs()).fold(0f64, f64::max);
    ensure(dev <= 0.15, || format!("built tree deviates by {dev} from the ideal sequence"))?;
    Ok(format!("synthetic error {worst:.1e}; built depth {depth}: s = {:.4}, max deviation {dev:.4}", r.s[depth - 1]))
}

fn slice_trend(scale: Scale, _workers: usize, _seed: u64) -> Outcome {
    let depth = if scale == Scale::Full { 6 } else { 5 };
    let one = TreeCaps { per_node: 1, per_level: 1, ..TreeCaps::default() };
    let base =
        build_ddelta(&Cusp::new(1, 22027).unwrap(), 1.0, depth, 0.25, &one).map_err(|e| e.to_string())?.first_path();
    let tree = build_slice(&base, 1.0, depth, 0.25, &TreeCaps::default()).map_err(|e| e.to_string())?;
    tree.verify_structure().map_err(|e| e.to_string())?;
    let r = tree.evaluate().map_err(|e| e.to_string())?;
    let last = *r.ratio.last().unwrap();
    let sep = level_separation(&tree, &base).into_iter().fold(f64::INFINITY, f64::min);
    ensure(last <= 0.1, || format!("deepest ratio {last}"))?;
    ensure(sep >= 0.25, || format!("level separation {sep}"))?;
    Ok(format!("depth {depth}: deepest ratio {last:.4}, separation {sep:.3}"))
}

/// Successors of a `k = 2` node by filtering every cusp pair in a window.
pub fn brute_successors(node: &CoverNode, p: &CoverParams, h_max: &BigInt) -> Result<Vec<CoverNode>, String> {
    let (i, j) = (node.i, node.j);
    let (ai, aj) = (&node.cusps[i], &node.cusps[j]);
    let (hi, hj) = (ai.height(), aj.height());
    let (vi, vj) = (ai.value().unwrap(), aj.value().unwrap());
    let c = ratio_to_f64(&p.c);
    let two_c = &p.c * BigRational::from_integer(2.into());
    let window = |v: &BigRational| enumerate_cusps(&Region::closed(v - &two_c, v + &two_c), h_max);
    // steps a_j -> γ u(n) σ∞ with |n| below the threshold
    let g = realize(aj).map_err(|e| e.to_string())?;
    let small: Vec<Cusp> = {
        let m = p.min_quotient.to_i64().unwrap();
        (1 - m..m).map(|n| Cusp::canonical(&(&g.a * n + &g.b), &(&g.c * n + &g.d)).unwrap()).collect()
    };
    let ci_bound = &p.c / BigRational::from_integer(hi.clone());
    let cand_j: Vec<Cusp> = window(&vj)
        .into_iter()
        .filter(|b| aj.cross(b).abs().is_one() && !small.contains(b) && b.height() > hi)
        .collect();
    let cand_i: Vec<Cusp> = window(&vi)
        .into_iter()
        .filter(|b| b.height() >= hi && b.height() > hj && (b.value().unwrap() - &vi).abs() <= ci_bound)
        .collect();
    let near = |d: f64, r: f64| -> Result<bool, String> {
        if (d - r).abs() <= 1e-9 * r {
            Err(format!("box comparison too close to call: {d} vs {r}"))
        } else {
            Ok(d <= r)
        }
    };
    let mut out = Vec::new();
    for b in &cand_j {
        let hb = b.height();
        for a in &cand_i {
            let ha = a.height();
            if BigRational::from_integer(ha.clone()) >= &p.delta * BigRational::from_integer(hb.clone()) {
                continue;
            }
            if &hi * &hi > &hb * &ha {
                continue;
            }
            let (fhi, fhj, fha, fhb) =
                (hi.to_f64().unwrap(), hj.to_f64().unwrap(), ha.to_f64().unwrap(), hb.to_f64().unwrap());
            let di = ratio_to_f64(&(a.value().unwrap() - &vi).abs());
            let dj = ratio_to_f64(&(b.value().unwrap() - &vj).abs());
            if !near(di, c / fhi + c / (fha * fhb).sqrt())? || !near(dj, c / (fhi * fhj).sqrt() + c / fhb)? {
                continue;
            }
            let mut cusps = node.cusps.clone();
            cusps[j] = b.clone();
            cusps[i] = a.clone();
            out.push(CoverNode { cusps, i: j, j: i });
        }
    }
    out.sort();
    Ok(out)
}

fn covering_chain(scale: Scale, _workers: usize, _seed: u64) -> Outcome {
    let depth = if scale == Scale::Full { 8 } else { 6 };
    let delta = 0.25;
    let pair = singular_pair(&BigInt::from(10u64).pow(10), 1.0, depth, 0.25).map_err(|e| e.to_string())?;
    let xs = vec![pair.x1.clone(), pair.x2.clone()];
    let prof = JointProfile::new(&DirectionTuple::new(xs.clone()).map_err(|e| e.to_string())?, 1.0)
        .map_err(|e| e.to_string())?;
    let class = classify(&prof, delta, pair.horizon).map_err(|e| e.to_string())?;
    ensure(class == Divergence::Escaping, || format!("pair classifies as {class:?}"))?;
    let params = CoverParams::new(2.0, delta, 2).map_err(|e| e.to_string())?;
    let chain = chain_extract(&xs, &prof, &params, pair.horizon, &mut NoNets).map_err(|e| e.to_string())?;
    let worst = chain.ratios.iter().cloned().fold(0f64, f64::max);
    ensure(chain.nodes.len() >= 3, || format!("chain of {} nodes", chain.nodes.len()))?;
    ensure(worst <= delta.sqrt() * (1.0 + 1e-12), || format!("contraction {worst}"))?;
    // generated successors against the exhaustive filter
    let sp = CoverParams::new(2.0, 0.1, 2).map_err(|e| e.to_string())?;
    let seed = make_node(vec![Cusp::new(1, 2).unwrap(), Cusp::new(1, 8).unwrap()], 1, 0, &sp, &mut NoNets)
        .map_err(|e| e.to_string())?
        .map_err(|r| format!("seed rejected: {r:?}"))?;
    let h_max = BigInt::from(if scale == Scale::Full { 20_000 } else { 5_000 });
    let gen = successors(&seed, &sp, &Truncation { max_height: h_max.clone(), max_nodes: 10_000 }, &mut NoNets)
        .map_err(|e| e.to_string())?;
    ensure(!gen.truncated, || "successor generation truncated".into())?;
    let brute = brute_successors(&seed, &sp, &h_max)?;
    ensure(gen.nodes == brute, || format!("{} generated vs {} by exhaustive filter", gen.nodes.len(), brute.len()))?;
    Ok(format!(
        "escaping; chain of {} nodes, max contraction {worst:.3}; {} successors agree",
        chain.nodes.len(),
        brute.len()
    ))
}

fn box_counts(scale: Scale, _workers: usize, seed: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 11);
    let seg = DigitSet { base: 10, digits: vec![(0..10).collect()] }.sample(4, 8, &mut rng);
    let s1 = box_count_dimension(&seg, &geometric_scales(0.5, 2, 10)).map_err(|e| e.to_string())?.slope;
    ensure((s1 - 1.0).abs() <= 0.05, || format!("segment slope {s1}"))?;
    let cantor = DigitSet { base: 3, digits: vec![vec![0, 2]] }.sample(10, 10, &mut rng);
    let s2 = box_count_dimension(&cantor, &geometric_scales(1.0 / 3.0, 1, 8)).map_err(|e| e.to_string())?.slope;
    let target = 2f64.ln() / 3f64.ln();
    ensure((s2 - target).abs() <= 0.05, || format!("middle-thirds slope {s2}"))?;
    let coarse = if scale == Scale::Full { 2 } else { 2 };
    let pair = pair_digit_model().sample(coarse, 10, &mut rng);
    let s3 = box_count_dimension(&pair, &geometric_scales(0.5, 1, 8)).map_err(|e| e.to_string())?.slope;
    ensure((1.25..=1.75).contains(&s3), || format!("pair model slope {s3}"))?;
    Ok(format!("segment {s1:.4}, middle thirds {s2:.4}, pair model {s3:.4} (target 1.5)"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_suite_passes() {
        for r in run_all(Scale::Quick, 2, 1) {
            assert!(r.passed, "{} {}: {}", r.id, r.name, r.detail);
        }
    }
}
