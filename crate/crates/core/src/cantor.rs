//! Nested ball families built from cusps: the `D_δ` tree, the slice tree over
//! a `D_δ` base sequence, the bound sequence `s_j`, and the paired directions
//! of the singular-pair construction.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{
    ceil_ratio, count_coprime_in, floor_ratio, isqrt, isqrt_ceil, ln_big, prime_factors, ratio_from_f64,
};
use crate::excursion::Direction;
use crate::lattice::{next_cusp, realize, Cusp};
use crate::product::DigitSet;
use crate::real::{ceil, exp, ln, log_add_exp};
use crate::{Error, Result};

/// Budget knobs shared by both tree builders.
#[derive(Clone, Debug, PartialEq)]
pub struct TreeCaps {
    /// Most children materialized under one node.
    pub per_node: usize,
    /// Most children materialized on one level (at least one per node).
    pub per_level: usize,
    /// Largest `ln h` a child band may start at.
    pub max_ln_height: f64,
    /// Largest `v` range counted exactly in slice trees.
    pub exact_count_limit: u64,
}

impl Default for TreeCaps {
    fn default() -> Self {
        TreeCaps { per_node: 64, per_level: 512, max_ln_height: 20_000.0, exact_count_limit: 200_000 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TreeKind {
    DDelta,
    Slice,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CantorNode {
    pub cusp: Cusp,
    pub level: usize,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    /// `ε / h(cusp)`.
    pub radius: BigRational,
    /// Slice trees: the cusp whose ball holds the children.
    pub intermediate: Option<Cusp>,
    /// Size of the full child family, materialized or not.
    pub family: BigInt,
    /// `ln(1/Δ)` for this node's full child family.
    pub ln_inv_delta: Option<f64>,
    /// The family size was counted exactly.
    pub exact_count: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CantorTree {
    pub kind: TreeKind,
    pub eps: BigRational,
    pub delta: f64,
    pub nodes: Vec<CantorNode>,
    pub levels: Vec<Vec<usize>>,
    /// Candidates dropped by the disjointness and nesting checks.
    pub thinned: usize,
}

/// Per-level quantities feeding the bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LevelStat {
    /// `ln(1/d_j)`.
    pub ln_inv_d: f64,
    /// `ln(1/Δ_j)`; absent on the last level.
    pub ln_inv_delta: Option<f64>,
}

impl CantorTree {
    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    fn node(&self, k: usize) -> &CantorNode {
        &self.nodes[k]
    }

    /// `d_j = ε / min h` and `Δ_j = min` over materialized nodes.
    pub fn level_stats(&self) -> Vec<LevelStat> {
        let ln_eps = ln_big(self.eps.numer()) - ln_big(self.eps.denom());
        self.levels
            .iter()
            .enumerate()
            .map(|(j, lv)| {
                let min_ln_h = lv.iter().map(|&k| self.node(k).cusp.ln_height()).fold(f64::INFINITY, f64::min);
                let ln_inv_delta = if j + 1 < self.levels.len() {
                    lv.iter().filter_map(|&k| self.node(k).ln_inv_delta).reduce(f64::max)
                } else {
                    None
                };
                LevelStat { ln_inv_d: min_ln_h - ln_eps, ln_inv_delta }
            })
            .collect()
    }

    pub fn evaluate(&self) -> Result<BoundReport> {
        let prov =
            format!("{:?} tree, delta = {}, eps = {}, depth = {}", self.kind, self.delta, self.eps, self.depth());
        evaluate_bound(&self.level_stats(), 1.0, prov)
    }

    /// Cusps from the root to node `k`.
    pub fn path_to(&self, mut k: usize) -> Vec<Cusp> {
        let mut out = vec![self.node(k).cusp.clone()];
        while let Some(p) = self.node(k).parent {
            out.push(self.node(p).cusp.clone());
            k = p;
        }
        out.reverse();
        out
    }

    /// Root-to-leaf path through first children.
    pub fn first_path(&self) -> Vec<Cusp> {
        let mut k = 0;
        while let Some(&c) = self.node(k).children.first() {
            k = c;
        }
        self.path_to(k)
    }

    /// Nesting, sibling disjointness, finite levels and strictly shrinking `d_j`, exactly.
    pub fn verify_structure(&self) -> Result<()> {
        for (k, n) in self.nodes.iter().enumerate() {
            let x = n.cusp.value().unwrap();
            if let Some(p) = n.parent {
                let par = self.node(p);
                if !ball_inside(&x, &n.radius, &par.cusp.value().unwrap(), &par.radius) {
                    return Err(Error::Validation(format!("node {} not inside parent {}", n.cusp, par.cusp)));
                }
            }
            let mut kids: Vec<(BigRational, &BigRational)> =
                n.children.iter().map(|&c| (self.node(c).cusp.value().unwrap(), &self.node(c).radius)).collect();
            kids.sort_by(|a, b| a.0.cmp(&b.0));
            for w in kids.windows(2) {
                if !balls_disjoint(&w[0].0, w[0].1, &w[1].0, w[1].1) {
                    return Err(Error::Validation(format!("children of node {k} overlap")));
                }
            }
            if n.level + 1 < self.levels.len() && n.children.is_empty() {
                return Err(Error::Validation(format!("node {} has no children", n.cusp)));
            }
        }
        let stats = self.level_stats();
        for w in stats.windows(2) {
            if !(w[1].ln_inv_d > w[0].ln_inv_d) {
                return Err(Error::Validation("level diameters do not shrink".into()));
            }
        }
        Ok(())
    }
}

fn ball_inside(x: &BigRational, r: &BigRational, y: &BigRational, s: &BigRational) -> bool {
    (x - y).abs() + r <= *s
}

fn balls_disjoint(x: &BigRational, r: &BigRational, y: &BigRational, s: &BigRational) -> bool {
    (x - y).abs() > r + s
}

/// `s_j = dim - Σ_{i<j} ln(1/Δ_i) / ln(1/d_j)` for `j ≥ 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub dim: f64,
    pub d: Vec<f64>,
    pub delta: Vec<f64>,
    pub ln_inv_d: Vec<f64>,
    pub ln_inv_delta: Vec<f64>,
    /// `s[j - 1] = s_j`.
    pub s: Vec<f64>,
    /// `ratio[j - 1] = Σ_{i<j} ln(1/Δ_i) / ln(1/d_j)`.
    pub ratio: Vec<f64>,
    pub provenance: String,
}

pub fn evaluate_bound(levels: &[LevelStat], dim: f64, provenance: String) -> Result<BoundReport> {
    if levels.len() < 3 {
        return Err(Error::InvalidInput("the bound needs depth at least 2".into()));
    }
    let ln_inv_d: Vec<f64> = levels.iter().map(|l| l.ln_inv_d).collect();
    let ln_inv_delta: Vec<f64> = levels[..levels.len() - 1]
        .iter()
        .map(|l| l.ln_inv_delta.ok_or_else(|| Error::InvalidInput("inner level without Δ".into())))
        .collect::<Result<_>>()?;
    if ln_inv_delta.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
        return Err(Error::Validation("Δ outside (0, 1]".into()));
    }
    let mut s = Vec::new();
    let mut ratio = Vec::new();
    let mut acc = 0.0;
    for j in 1..levels.len() {
        acc += ln_inv_delta[j - 1];
        let r = acc / ln_inv_d[j];
        ratio.push(r);
        s.push(dim - r);
    }
    Ok(BoundReport {
        dim,
        d: ln_inv_d.iter().map(|v| exp(-v)).collect(),
        delta: ln_inv_delta.iter().map(|v| exp(-v)).collect(),
        ln_inv_d,
        ln_inv_delta,
        s,
        ratio,
        provenance,
    })
}

/// Levels of a tree with constant `Δ` and `d_j = d0 λ^j`.
pub fn synthetic_levels(d0: f64, lambda: f64, delta: f64, depth: usize) -> Vec<LevelStat> {
    (0..=depth)
        .map(|j| LevelStat {
            ln_inv_d: -(ln(d0) + j as f64 * ln(lambda)),
            ln_inv_delta: (j < depth).then(|| -ln(delta)),
        })
        .collect()
}

/// `s_j` of [`synthetic_levels`] in closed form.
pub fn synthetic_bound(dim: f64, d0: f64, lambda: f64, delta: f64, j: usize) -> f64 {
    dim - j as f64 * -ln(delta) / -(ln(d0) + j as f64 * ln(lambda))
}

/// `dim (1 - ½ ((1+δ)^j - 1) / (1+δ)^j)`, the `D_δ` sequence with ideal constants.
pub fn ideal_ddelta_bound(dim: f64, delta: f64, j: usize) -> f64 {
    let g = crate::real::powi(1.0 + delta, j as i32);
    dim * (1.0 - 0.5 * (g - 1.0) / g)
}

/// `δ ≈ a/b` with `b ≤ 64`.
pub fn delta_fraction(delta: f64) -> Result<(u32, u32)> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::InvalidInput(format!("delta = {delta} must be positive")));
    }
    let r = ratio_from_f64(delta).unwrap();
    let best = Direction::from_ratio(&r)
        .convergents()
        .into_iter()
        .take_while(|c| c.q <= BigInt::from(64))
        .last()
        .filter(|c| c.p.is_positive())
        .ok_or_else(|| Error::InvalidInput(format!("delta = {delta} too small")))?;
    Ok((best.p.to_u32().unwrap(), best.q.to_u32().unwrap()))
}

fn root_floor(n: &BigInt, k: u32) -> BigInt {
    BigInt::from_biguint(Sign::Plus, n.magnitude().nth_root(k))
}

fn root_ceil(n: &BigInt, k: u32) -> BigInt {
    let r = root_floor(n, k);
    if r.pow(k) == *n {
        r
    } else {
        r + 1
    }
}

/// `[w_min, w_max]` with `w² ∈ [h^{1+δ}, 2 h^{1+δ}]`.
fn height_band(h: &BigInt, (a, b): (u32, u32)) -> (BigInt, BigInt) {
    let base = h.pow(a + b);
    let lo = root_ceil(&base, 2 * b);
    let hi = root_floor(&(base * BigInt::from(2u32).pow(b)), 2 * b);
    (lo, hi)
}

/// Smallest `w > 0` with `1/(q w) + ε/w² ≤ ε/q²`.
fn nesting_floor(q: &BigInt, eps: &BigRational) -> BigInt {
    let (en, ed) = (eps.numer(), eps.denom());
    let ok = |w: &BigInt| en * w * w - ed * q * w - en * q * q >= BigInt::zero();
    // w* = q (ed + sqrt(ed² + 4 en²)) / (2 en)
    let disc = ed * ed * q * q + BigInt::from(4) * en * en * q * q;
    let mut w = (ed * q + isqrt(&disc)).div_floor(&(BigInt::from(2) * en)).max(BigInt::one());
    while !ok(&w) {
        w += 1;
    }
    while w > BigInt::one() && ok(&(&w - 1)) {
        w -= 1;
    }
    w
}

/// Smallest `w ≥ lo` with `w ≡ r (mod q)`.
fn first_in_class(lo: &BigInt, r: &BigInt, q: &BigInt) -> BigInt {
    lo + (r - lo).mod_floor(q)
}

/// `ln Σ_{k<len} 1/(a + k)²` for `a = w0/q > 0`.
fn ln_sum_inv_sq(w0: &BigInt, q: &BigInt, len: &BigInt) -> f64 {
    if len.is_zero() {
        return f64::NEG_INFINITY;
    }
    let a = BigRational::new(w0.clone(), q.clone());
    if a > BigRational::from_integer(BigInt::from(1_000_000_000_000u64)) {
        // Σ ≈ 1/(a - ½) - 1/(a + len - ½), relative error O(a^-2)
        let end = w0 + len * q;
        return ln_big(len) + 2.0 * ln_big(q) - ln_big(&(2 * w0 - q)) - ln_big(&(2 * &end - q)) + ln(4.0);
    }
    let mut x = crate::arith::ratio_to_f64(&a);
    let mut n = len.to_f64().unwrap_or(f64::INFINITY);
    let mut acc = 0.0;
    while n > 0.0 && (x < 10.0 || n <= 10_000.0) {
        acc += 1.0 / (x * x);
        x += 1.0;
        n -= 1.0;
        if n <= 10_000.0 && x >= 10.0 && n > 0.0 {
            // finish directly
            while n > 0.0 {
                acc += 1.0 / (x * x);
                x += 1.0;
                n -= 1.0;
            }
        }
    }
    if n > 0.0 {
        // ψ1(x) - ψ1(x + n) via the asymptotic series, written without cancellation
        let (r, s) = (1.0 / x, 1.0 / (x + n));
        let d = n * r * s;
        let p2 = d * (r + s);
        let p3 = d * (r * r + r * s + s * s);
        let p5 = d * (r * r * r * r + r * r * r * s + r * r * s * s + r * s * s * s + s * s * s * s);
        let p7 = d * (0..7).map(|i| crate::real::powi(r, 6 - i) * crate::real::powi(s, i)).sum::<f64>();
        acc += d + 0.5 * p2 + p3 / 6.0 - p5 / 30.0 + p7 / 42.0;
    }
    ln(acc)
}

fn spread(count: &BigInt, k: usize) -> Vec<BigInt> {
    if count.is_zero() || k == 0 {
        return Vec::new();
    }
    if *count <= BigInt::from(k) {
        let n = count.to_usize().unwrap();
        return (0..n).map(BigInt::from).collect();
    }
    if k == 1 {
        return vec![BigInt::zero()];
    }
    let last = count - 1;
    let mut out: Vec<BigInt> = (0..k).map(|i| &last * BigInt::from(i) / BigInt::from(k - 1)).collect();
    out.dedup();
    out
}

struct Builder {
    eps: BigRational,
    nodes: Vec<CantorNode>,
    levels: Vec<Vec<usize>>,
    thinned: usize,
}

impl Builder {
    fn new(root: &Cusp, eps: BigRational) -> Self {
        let radius = &eps / BigRational::from_integer(root.height());
        let node = CantorNode {
            cusp: root.clone(),
            level: 0,
            parent: None,
            children: Vec::new(),
            radius,
            intermediate: None,
            family: BigInt::zero(),
            ln_inv_delta: None,
            exact_count: true,
        };
        Builder { eps, nodes: vec![node], levels: vec![vec![0]], thinned: 0 }
    }

    /// Attach candidates to `parent` left to right, dropping any that leave
    /// `container` or touch the previous kept one.
    fn attach(&mut self, parent: usize, mut cands: Vec<Cusp>, container: (&BigRational, &BigRational), level: usize) {
        cands.sort();
        cands.dedup();
        let mut last: Option<(BigRational, BigRational)> = None;
        for c in cands {
            let x = c.value().unwrap();
            let r = &self.eps / BigRational::from_integer(c.height());
            let nested = ball_inside(&x, &r, container.0, container.1);
            let apart = last.as_ref().map_or(true, |(y, s)| balls_disjoint(&x, &r, y, s));
            if !nested || !apart {
                self.thinned += 1;
                continue;
            }
            let k = self.nodes.len();
            self.nodes.push(CantorNode {
                cusp: c,
                level,
                parent: Some(parent),
                children: Vec::new(),
                radius: r.clone(),
                intermediate: None,
                family: BigInt::zero(),
                ln_inv_delta: None,
                exact_count: true,
            });
            self.nodes[parent].children.push(k);
            self.levels[level].push(k);
            last = Some((x, r));
        }
    }

    fn finish(self, kind: TreeKind, delta: f64) -> CantorTree {
        CantorTree { kind, eps: self.eps, delta, nodes: self.nodes, levels: self.levels, thinned: self.thinned }
    }
}

fn eps_ratio(eps: f64) -> Result<BigRational> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidInput(format!("eps = {eps} must lie in (0, 1]")));
    }
    Ok(ratio_from_f64(eps).unwrap())
}

fn per_node(caps: &TreeCaps, nodes: usize) -> usize {
    (caps.per_level / nodes.max(1)).clamp(1, caps.per_node.max(1))
}

/// Children of `a`: the cusps `γ u(m) σ ∞` (`γ` realizing `a`) with
/// `h ∈ [h(a)^{1+δ}, 2 h(a)^{1+δ}]` whose `ε`-balls nest inside `a`'s.
pub fn build_ddelta(root: &Cusp, delta: f64, depth: usize, eps: f64, caps: &TreeCaps) -> Result<CantorTree> {
    if root.is_infinite() {
        return Err(Error::InvalidInput("root must be a finite cusp".into()));
    }
    let frac = delta_fraction(delta)?;
    let eps = eps_ratio(eps)?;
    let mut b = Builder::new(root, eps.clone());
    for level in 0..depth {
        let current = b.levels[level].clone();
        b.levels.push(Vec::new());
        let k = per_node(caps, current.len());
        for idx in current {
            let a = b.nodes[idx].cusp.clone();
            let g = realize(&a)?;
            let (q, qs) = (g.c.clone(), g.d.clone());
            let h = a.height();
            let (w_min, w_max) = height_band(&h, frac);
            let w_lo = w_min.max(nesting_floor(&q, &eps));
            if 2.0 * ln_big(&w_lo) > caps.max_ln_height {
                return Err(Error::EmptyBand(format!("child band of {a} lies beyond the height budget")));
            }
            if w_lo > w_max {
                return Err(Error::EmptyBand(format!("no nested child of {a} in its height band")));
            }
            // w = m q + q*; negative side uses |w| ≡ -q* (mod q)
            let mut sides = Vec::new();
            for (sign, r) in [(1i32, qs.clone()), (-1, (-&qs).mod_floor(&q))] {
                let first = first_in_class(&w_lo, &r, &q);
                let count = if first > w_max { BigInt::zero() } else { (&w_max - &first) / &q + 1 };
                sides.push((sign, first, count));
            }
            let family: BigInt = sides.iter().map(|s| &s.2).sum();
            if family.is_zero() {
                return Err(Error::EmptyBand(format!("no nested child of {a} in its height band")));
            }
            let ln_delta = sides.iter().map(|(_, f, n)| ln_sum_inv_sq(f, &q, n)).fold(f64::NEG_INFINITY, log_add_exp);
            let mut cands = Vec::new();
            for (sign, first, count) in &sides {
                for i in spread(count, k.div_ceil(2)) {
                    let aw = first + &i * &q;
                    let w = if *sign > 0 { aw } else { -aw };
                    let m = (&w - &qs) / &q;
                    cands.push(Cusp::canonical(&(&m * &g.a + &g.b), &w)?);
                }
            }
            let node = &mut b.nodes[idx];
            node.family = family;
            node.ln_inv_delta = Some(-ln_delta);
            let (x, r) = (node.cusp.value().unwrap(), node.radius.clone());
            b.attach(idx, cands, (&x, &r), level + 1);
            if b.nodes[idx].children.is_empty() {
                return Err(Error::EmptyBand(format!("every child of {a} was thinned")));
            }
        }
    }
    Ok(b.finish(TreeKind::DDelta, delta))
}

/// `h(a′) ∈ [h(a)^{1+δ}, 2 h(a)^{1+δ}]`, exactly.
pub fn satisfies_height_law(a: &Cusp, next: &Cusp, frac: (u32, u32)) -> bool {
    let (lo, hi) = (a.height().pow(frac.0 + frac.1), next.height().pow(frac.1));
    hi >= lo && hi <= lo * BigInt::from(2u32).pow(frac.1)
}

/// `⌊h / ln h⌋`, at least 1.
pub fn reduced_height(h: &BigInt) -> BigInt {
    let l = ln_big(h);
    if !(l > 1.0) {
        return BigInt::one();
    }
    let r = ratio_from_f64(1.0 / l).unwrap();
    floor_ratio(&(r * BigRational::from_integer(h.clone()))).max(BigInt::one())
}

/// Quotient of the step from a level-`p` node to its intermediate cusp.
pub fn intermediate_quotient(h_reduced: &BigInt) -> BigInt {
    BigInt::from((ceil(ln_big(h_reduced)) as i64).max(2))
}

/// Number of cusps `γ′(u/v)` with `w = q′u + q′*v`, `w² ∈ [w_lo², w_hi²]` and
/// `|v| q′ ≤ ε |w|`, counted over `1 ≤ v ≤ v_max`.
fn count_slice_children(
    qp: &BigInt,
    qps: &BigInt,
    w_lo: &BigInt,
    w_hi: &BigInt,
    eps: &BigRational,
    v_max: u64,
) -> BigInt {
    let (en, ed) = (eps.numer(), eps.denom());
    let mut total = BigInt::zero();
    let small = w_hi.bits() < 100 && qp.bits() < 100;
    for v in 1..=v_max {
        let vb = BigInt::from(v);
        // |w| ≥ v q′ / ε
        let near = (&vb * qp * ed).div_ceil(en);
        let lo = w_lo.max(&near).clone();
        if lo > *w_hi {
            break;
        }
        let primes = prime_factors(v);
        for sign in [1i32, -1] {
            let (a, b) = if sign > 0 { (lo.clone(), w_hi.clone()) } else { (-w_hi, -&lo) };
            // u = (w - q′* v) / q′
            let ulo = ceil_ratio(&BigRational::new(&a - qps * &vb, qp.clone()));
            let uhi = floor_ratio(&BigRational::new(&b - qps * &vb, qp.clone()));
            if small {
                total += count_coprime_in(ulo.to_i128().unwrap(), uhi.to_i128().unwrap(), &primes);
            } else {
                total += crate::arith::count_coprime_in_big(&ulo, &uhi, &primes);
            }
        }
    }
    total
}

/// Level-`p` nodes have `h ∈ [h̃_p, 2 h̃_p]` with `h̃_p = h_p / ln h_p` for the
/// base heights `h_p`. Each node `γ` steps to `γ′ = γ u(m) σ ∞` with
/// `m ≍ ln h̃_p`; its children are the cusps of the next band inside `B(γ′, ε)`.
pub fn build_slice(base: &[Cusp], delta: f64, depth: usize, eps: f64, caps: &TreeCaps) -> Result<CantorTree> {
    let frac = delta_fraction(delta)?;
    let eps = eps_ratio(eps)?;
    if base.len() < depth + 1 {
        return Err(Error::InvalidInput(format!("base has {} cusps, depth {depth} needs {}", base.len(), depth + 1)));
    }
    for w in base[..=depth].windows(2) {
        if !satisfies_height_law(&w[0], &w[1], frac) {
            return Err(Error::Validation(format!("base cusps {} -> {} break the height law", w[0], w[1])));
        }
    }
    let reduced: Vec<BigInt> = base[..=depth].iter().map(|c| reduced_height(&c.height())).collect();
    if reduced[0] < BigInt::from(4) {
        return Err(Error::InvalidInput("base heights too small".into()));
    }
    let root = Cusp::canonical(&BigInt::one(), &isqrt_ceil(&reduced[0]))?;
    let mut b = Builder::new(&root, eps.clone());
    for level in 0..depth {
        let current = b.levels[level].clone();
        b.levels.push(Vec::new());
        let k = per_node(caps, current.len());
        let (h_lo, h_hi) = (reduced[level + 1].clone(), &reduced[level + 1] * 2);
        let (w_lo, w_hi) = (isqrt_ceil(&h_lo), isqrt(&h_hi));
        if 2.0 * ln_big(&w_lo) > caps.max_ln_height {
            return Err(Error::EmptyBand(format!("level {} band lies beyond the height budget", level + 1)));
        }
        for idx in current {
            let a = b.nodes[idx].cusp.clone();
            let (x, r) = (a.value().unwrap(), b.nodes[idx].radius.clone());
            let mut m = intermediate_quotient(&reduced[level]);
            let gp = loop {
                let c = next_cusp(&a, &m)?;
                let rc = &eps / BigRational::from_integer(c.height());
                if ball_inside(&c.value().unwrap(), &rc, &x, &r) {
                    break c;
                }
                m += 1;
            };
            let g = realize(&gp)?;
            let (qp, qps) = (g.c.clone(), g.d.clone());
            let hp = gp.height();
            // |v| ≤ ε w_hi / q′
            let v_max = floor_ratio(&(&eps * BigRational::new(w_hi.clone(), qp.clone())));
            let (ln_count, exact) = match v_max.to_u64().filter(|&v| v <= caps.exact_count_limit) {
                Some(v) => (ln_big(&count_slice_children(&qp, &qps, &w_lo, &w_hi, &eps, v)), true),
                None => {
                    let ln_eps = ln_big(eps.numer()) - ln_big(eps.denom());
                    (ln(6.0) - 2.0 * ln(core::f64::consts::PI) + ln_eps + ln_big(&(&h_hi - &h_lo)) - ln_big(&hp), false)
                }
            };
            if ln_count == f64::NEG_INFINITY {
                return Err(Error::EmptyBand(format!("no child of {a} inside the ball of {gp}")));
            }
            // materialize from the smallest |v| upward
            let mut cands = Vec::new();
            let (en, ed) = (eps.numer(), eps.denom());
            let mut v = BigInt::one();
            while cands.len() < k && v <= v_max {
                let near = (&v * &qp * ed).div_ceil(en);
                let lo = w_lo.clone().max(near);
                for sign in [1i32, -1] {
                    if lo > w_hi {
                        break;
                    }
                    let (aa, bb) = if sign > 0 { (lo.clone(), w_hi.clone()) } else { (-&w_hi, -&lo) };
                    let mut u = ceil_ratio(&BigRational::new(&aa - &qps * &v, qp.clone()));
                    let uhi = floor_ratio(&BigRational::new(&bb - &qps * &v, qp.clone()));
                    while u <= uhi && cands.len() < k {
                        if u.gcd(&v).is_one() {
                            cands.push(Cusp::canonical(&(&g.a * &u + &g.b * &v), &(&qp * &u + &qps * &v))?);
                        }
                        u += 1;
                    }
                }
                v += 1;
            }
            let node = &mut b.nodes[idx];
            node.intermediate = Some(gp.clone());
            node.family = BigInt::from(exp(ln_count.min(700.0)) as u64).max(BigInt::one());
            node.exact_count = exact;
            // Δ = count · h(γ) / H_hi
            node.ln_inv_delta = Some(-(ln_count + a.ln_height() - ln_big(&h_hi)));
            let (gx, gr) = (gp.value().unwrap(), &eps / BigRational::from_integer(hp));
            let before = b.nodes[idx].children.len();
            b.attach(idx, cands, (&gx, &gr), level + 1);
            if b.nodes[idx].children.len() == before {
                return Err(Error::EmptyBand(format!("no child of {a} survived the ball of {gp}")));
            }
        }
    }
    Ok(b.finish(TreeKind::Slice, delta))
}

/// Per level, the least `max(h_p/h, h/h_p) / ln h_p` over nodes and their
/// intermediate cusps.
pub fn level_separation(tree: &CantorTree, base: &[Cusp]) -> Vec<f64> {
    tree.levels
        .iter()
        .enumerate()
        .map(|(p, lv)| {
            let lb = base[p].ln_height();
            let sep = |c: &Cusp| (c.ln_height() - lb).abs() - ln(lb);
            lv.iter()
                .flat_map(|&k| {
                    let n = &tree.nodes[k];
                    [Some(sep(&n.cusp)), n.intermediate.as_ref().map(sep)]
                })
                .flatten()
                .fold(f64::INFINITY, f64::min)
        })
        .map(exp)
        .collect()
}

/// One level of the paired construction: `x1`'s convergent and the two
/// convergents of `x2` around it.
#[derive(Clone, Debug, PartialEq)]
pub struct PairLevel {
    pub x1: Cusp,
    pub y: Cusp,
    pub intermediate: Cusp,
}

/// Directions `(x1, x2)` whose spectra interleave: `x1`'s convergents follow
/// the `D_δ` height law from `h0`, and `x2` alternates between heights
/// `≈ h̃_p` and `≈ h̃_p ln² h̃_p`, away from `x1`'s by a factor `≍ ln h_p`.
#[derive(Clone, Debug, PartialEq)]
pub struct SingularPair {
    pub x1: Direction,
    pub x2: Direction,
    pub levels: Vec<PairLevel>,
    pub delta: f64,
    /// Time window covered by fully resolved levels.
    pub horizon: (f64, f64),
}

pub fn singular_pair(h0: &BigInt, delta: f64, depth: usize, eps: f64) -> Result<SingularPair> {
    let frac = delta_fraction(delta)?;
    let eps = eps_ratio(eps)?;
    if depth < 2 {
        return Err(Error::InvalidInput("depth must be at least 2".into()));
    }
    if ln_big(h0) < 8.0 {
        return Err(Error::InvalidInput("h0 must exceed e^8".into()));
    }
    // x1 = [0; a1, a2, ...]
    let mut a1q = vec![BigInt::zero(), isqrt_ceil(h0)];
    let (mut q0, mut q1) = (BigInt::one(), a1q[1].clone());
    let mut x1_cusps = Vec::new();
    let conv = |qs: &[BigInt]| Direction::from_quotients(qs.to_vec(), false).map(|d| d.convergents());
    for _ in 0..depth + 2 {
        let (w, _) = height_band(&(&q1 * &q1), frac);
        let a = ceil_ratio(&BigRational::new(&w - &q0, q1.clone())).max(BigInt::one());
        let q2 = &a * &q1 + &q0;
        a1q.push(a);
        q0 = core::mem::replace(&mut q1, q2);
    }
    for c in conv(&a1q)?.iter().skip(1) {
        x1_cusps.push(c.cusp());
    }
    // x2 = [0; u0, m0, u1, m1, ...]
    let reduced: Vec<BigInt> = x1_cusps.iter().map(|c| reduced_height(&c.height())).collect();
    let mut x2q = vec![BigInt::zero(), isqrt_ceil(&reduced[0])];
    let (mut q_prev, mut q_y) = (BigInt::one(), x2q[1].clone());
    for p in 0..=depth {
        let m = intermediate_quotient(&reduced[p]);
        let q_g = &m * &q_y + &q_prev;
        let lo = isqrt_ceil(&reduced[p + 1]);
        // |w| ≥ q′/ε keeps the next convergent inside B(γ′, ε)
        let near = ceil_ratio(&(BigRational::from_integer(q_g.clone()) / &eps));
        let target = lo.max(near);
        let u = ceil_ratio(&BigRational::new(&target - &q_y, q_g.clone())).max(BigInt::one());
        let q_next = &u * &q_g + &q_y;
        if &q_next * &q_next > &reduced[p + 1] * 2 {
            return Err(Error::Internal(format!("level {} overshoots its band", p + 1)));
        }
        x2q.push(m);
        x2q.push(u);
        q_prev = core::mem::replace(&mut q_y, q_next);
        let _ = q_g;
    }
    let c2 = conv(&x2q)?;
    let mut levels = Vec::new();
    for p in 0..=depth {
        levels.push(PairLevel { x1: x1_cusps[p].clone(), y: c2[1 + 2 * p].cusp(), intermediate: c2[2 + 2 * p].cusp() });
    }
    let horizon = (x1_cusps[1].ln_height(), x1_cusps[depth].ln_height());
    Ok(SingularPair {
        x1: Direction::from_quotients(a1q, false)?,
        x2: Direction::from_quotients(x2q, false)?,
        levels,
        delta,
        horizon,
    })
}

/// Self-similar stand-in for the pair set at `k = 2, n = 2`: base 16 with a
/// four-digit first coordinate (dimension ½) and a fifteen-digit second one.
pub fn pair_digit_model() -> DigitSet {
    DigitSet { base: 16, digits: vec![vec![0, 5, 10, 15], (0..15).collect()] }
}
