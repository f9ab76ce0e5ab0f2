//! The indexed self-similar covering of escaping tuples: nodes, the successor
//! map, covering sums, and node chains read off a joint profile.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{ln_big, ratio_from_f64};
use crate::counting::{build_net, NetE};
use crate::excursion::Direction;
use crate::lattice::{for_each_cusp, realize, Cusp, Region};
use crate::product::{classify, minima_trace, Divergence, JointProfile, SwitchEvent};
use crate::real::{exp, ln};
use crate::{Error, Result};

/// Constants of the covering.
#[derive(Clone, Debug, PartialEq)]
pub struct CoverParams {
    /// Ball constant `c`.
    pub c: BigRational,
    /// `δ` of the node condition `h(a_j) < δ h(a_i)`.
    pub delta: BigRational,
    /// Least step quotient for `a_j ↦ a′_j`.
    pub min_quotient: BigInt,
}

impl CoverParams {
    pub fn new(c: f64, delta: f64, min_quotient: u64) -> Result<Self> {
        let pos = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(ratio_from_f64(v).unwrap())
            } else {
                Err(Error::InvalidInput(format!("{name} = {v} must be positive")))
            }
        };
        Ok(CoverParams { c: pos("c", c)?, delta: pos("delta", delta)?, min_quotient: BigInt::from(min_quotient) })
    }

    pub fn delta_f64(&self) -> f64 {
        crate::arith::ratio_to_f64(&self.delta)
    }
}

/// Why a tuple of cusps is not a node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rejection {
    BadIndex,
    /// `h(a_j) ≥ δ h(a_i)`.
    HeightRatio,
    /// Component `l` is not in its net.
    NotInNet(usize),
    Infinite,
}

/// `(a_1..a_k, i, j)`; indices are 0-based.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct CoverNode {
    pub cusps: Vec<Cusp>,
    pub i: usize,
    pub j: usize,
}

impl CoverNode {
    pub fn k(&self) -> usize {
        self.cusps.len()
    }

    /// `h(a_i) h(a_j)`.
    pub fn scale(&self) -> BigInt {
        self.cusps[self.i].height() * self.cusps[self.j].height()
    }

    /// `ln diam B = ln 2c - ½ ln(h_i h_j)`.
    pub fn ln_diam(&self, c: &BigRational) -> f64 {
        ln(2.0 * crate::arith::ratio_to_f64(c)) - 0.5 * ln_big(&self.scale())
    }

    /// Radius of the inner box `A` in component `l`.
    fn box_radius(&self, l: usize, c: &BigRational) -> Radius {
        if l == self.i {
            Radius::Exact(c / BigRational::from_integer(self.cusps[self.i].height()))
        } else {
            Radius::InvSqrt(self.scale())
        }
    }

    fn center(&self, l: usize) -> BigRational {
        self.cusps[l].value().unwrap()
    }
}

/// Net membership for components other than the node's two active ones.
pub trait NetLookup {
    fn contains(&mut self, component: usize, n: &BigInt, cusp: &Cusp) -> Result<bool>;
    /// Members with location in `[lo, hi]`.
    fn members(&mut self, component: usize, n: &BigInt, lo: &BigRational, hi: &BigRational) -> Result<Vec<Cusp>>;
}

/// No nets at all; enough for `k = 2`.
pub struct NoNets;

impl NetLookup for NoNets {
    fn contains(&mut self, _: usize, _: &BigInt, _: &Cusp) -> Result<bool> {
        Ok(false)
    }

    fn members(&mut self, _: usize, _: &BigInt, _: &BigRational, _: &BigRational) -> Result<Vec<Cusp>> {
        Ok(Vec::new())
    }
}

/// Greedy nets over one region, built on demand and cached by `(component, N)`.
pub struct GreedyNets {
    pub region: Region,
    pub c: f64,
    pub c_prime: f64,
    pub budget: u64,
    cache: BTreeMap<(usize, BigInt), NetE>,
}

impl GreedyNets {
    pub fn new(region: Region, c: f64, c_prime: f64, budget: u64) -> Self {
        GreedyNets { region, c, c_prime, budget, cache: BTreeMap::new() }
    }

    pub fn net(&mut self, component: usize, n: &BigInt) -> Result<&NetE> {
        let key = (component, n.clone());
        if !self.cache.contains_key(&key) {
            let nn = n.to_u64().ok_or_else(|| Error::Budget(format!("net order {n} too large")))?;
            let net = build_net(&self.region, nn, self.c, self.c_prime, self.budget)?;
            self.cache.insert(key.clone(), net);
        }
        Ok(&self.cache[&key])
    }
}

impl NetLookup for GreedyNets {
    fn contains(&mut self, component: usize, n: &BigInt, cusp: &Cusp) -> Result<bool> {
        Ok(self.net(component, n)?.contains(cusp))
    }

    fn members(&mut self, component: usize, n: &BigInt, lo: &BigRational, hi: &BigRational) -> Result<Vec<Cusp>> {
        let net = self.net(component, n)?;
        Ok(net
            .members
            .iter()
            .filter(|m| {
                let v = m.value().unwrap();
                v >= *lo && v <= *hi
            })
            .cloned()
            .collect())
    }
}

/// Validate `(cusps, i, j)` against the node conditions.
pub fn make_node(
    cusps: Vec<Cusp>,
    i: usize,
    j: usize,
    p: &CoverParams,
    nets: &mut dyn NetLookup,
) -> Result<core::result::Result<CoverNode, Rejection>> {
    let k = cusps.len();
    if i >= k || j >= k || i == j {
        return Ok(Err(Rejection::BadIndex));
    }
    if cusps.iter().any(Cusp::is_infinite) {
        return Ok(Err(Rejection::Infinite));
    }
    let (hi, hj) = (cusps[i].height(), cusps[j].height());
    if BigRational::from_integer(hj) >= &p.delta * BigRational::from_integer(hi.clone()) {
        return Ok(Err(Rejection::HeightRatio));
    }
    let n = &hi * cusps[j].height();
    for l in 0..k {
        if l != i && l != j && !nets.contains(l, &n, &cusps[l])? {
            return Ok(Err(Rejection::NotInNet(l)));
        }
    }
    Ok(Ok(CoverNode { cusps, i, j }))
}

/// A radius that is either rational or `c/√N`.
#[derive(Clone, Debug)]
enum Radius {
    Exact(BigRational),
    InvSqrt(BigInt),
}

/// `d ≤ r1 + r2`, exactly.
fn within(d: &BigRational, r1: &Radius, r2: &Radius, c: &BigRational) -> bool {
    use Radius::*;
    let d = d.abs();
    let c2 = c * c;
    match (r1, r2) {
        (Exact(a), Exact(b)) => d <= a + b,
        (Exact(a), InvSqrt(n)) | (InvSqrt(n), Exact(a)) => {
            // d - a ≤ c/√n
            let e = &d - a;
            !e.is_positive() || &e * &e * BigRational::from_integer(n.clone()) <= c2
        }
        (InvSqrt(n), InvSqrt(m)) => {
            // d² - c²/n - c²/m ≤ 2c²/√(nm)
            let (nr, mr) = (BigRational::from_integer(n.clone()), BigRational::from_integer(m.clone()));
            let e = &d * &d - &c2 / &nr - &c2 / &mr;
            !e.is_positive() || &e * &e * nr * mr <= BigRational::from_integer(4.into()) * &c2 * &c2
        }
    }
}

/// The step quotient `n` with `a′ = γ u(n) σ ∞` for `γ` realizing `a`, if `a′` is a Farey neighbour.
pub fn step_quotient(a: &Cusp, next: &Cusp) -> Option<BigInt> {
    if !a.cross(next).abs().is_one() {
        return None;
    }
    let g = realize(a).ok()?;
    // a′ = (n p + p*)/(n q + q*) up to a common sign
    for s in [1i32, -1] {
        let (num, den) = (next.num() * s, next.den() * s);
        let n = &den - &g.d;
        if (&n % &g.c).is_zero() {
            let n = n / &g.c;
            if &n * &g.a + &g.b == num {
                return Some(n);
            }
        }
    }
    None
}

/// The five successor conditions for `next` as a successor of `node`,
/// plus `next ∈ J` (net membership is checked by [`make_node`] callers).
pub fn successor_violation(node: &CoverNode, next: &CoverNode, p: &CoverParams) -> Option<&'static str> {
    let (i, j) = (node.i, node.j);
    if next.i != j || next.k() != node.k() {
        return Some("index shape");
    }
    let jp = next.j;
    let h = |n: &CoverNode, l: usize| n.cusps[l].height();
    if BigRational::from_integer(h(next, jp)) >= &p.delta * BigRational::from_integer(h(next, j)) {
        return Some("J: height ratio");
    }
    // (1)
    match step_quotient(&node.cusps[j], &next.cusps[j]) {
        Some(n) if n.abs() >= p.min_quotient => {}
        _ => return Some("(1) step"),
    }
    // (2)
    if jp == i {
        if h(next, i) < h(node, i) {
            return Some("(2) height");
        }
        let d = (node.center(i) - next.center(i)).abs();
        if d > &p.c / BigRational::from_integer(h(node, i)) {
            return Some("(2) distance");
        }
    }
    // (3)
    if h(node, i) >= h(next, j) || h(node, j) >= h(next, jp) {
        return Some("(3) heights");
    }
    // (4)
    for l in 0..node.k() {
        let d = node.center(l) - next.center(l);
        if !within(&d, &node.box_radius(l, &p.c), &next.box_radius(l, &p.c), &p.c) {
            return Some("(4) boxes");
        }
    }
    // (5)
    if h(node, i) * h(node, i) > h(next, j) * h(next, jp) {
        return Some("(5) product");
    }
    None
}

/// Caps on successor generation.
#[derive(Clone, Debug, PartialEq)]
pub struct Truncation {
    pub max_height: BigInt,
    pub max_nodes: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Successors {
    pub nodes: Vec<CoverNode>,
    /// `max_nodes` was hit; the list is a subset.
    pub truncated: bool,
}

fn cusps_in(lo: &BigRational, hi: &BigRational, h_min: &BigInt, h_max: &BigInt) -> Vec<Cusp> {
    let mut out = Vec::new();
    for_each_cusp(&Region::closed(lo.clone(), hi.clone()), h_max, |p, q| {
        if &q * &q >= *h_min {
            out.push(Cusp::from_reduced(p, q));
        }
    });
    out
}

/// Next cusps `γ u(n) σ ∞` of `a` with `|n| ≥ n_min` and height in `(h_above, h_max]`.
fn steps_of(a: &Cusp, n_min: &BigInt, h_above: &BigInt, h_max: &BigInt) -> Result<Vec<Cusp>> {
    let g = realize(a)?;
    let (q, qs) = (g.c.clone(), g.d.clone());
    let w_max = crate::arith::isqrt(h_max);
    let mut out = Vec::new();
    // |n q + q*| ≤ w_max
    let n_hi = (&w_max - &qs).div_euclid_floor(&q);
    let n_lo = -((&w_max + &qs).div_euclid_floor(&q));
    let mut n = n_lo;
    while n <= n_hi {
        if n.abs() >= *n_min {
            let c = Cusp::canonical(&(&n * &g.a + &g.b), &(&n * &q + &qs))?;
            let hc = c.height();
            if hc > *h_above && hc <= *h_max {
                out.push(c);
            }
        }
        n += 1;
    }
    Ok(out)
}

trait DivFloor {
    fn div_euclid_floor(&self, o: &BigInt) -> BigInt;
}

impl DivFloor for BigInt {
    fn div_euclid_floor(&self, o: &BigInt) -> BigInt {
        num_integer::Integer::div_floor(self, o)
    }
}

/// Every `(a′, j, j′)` in the successor set of `node` with heights up to the truncation.
pub fn successors(
    node: &CoverNode,
    p: &CoverParams,
    trunc: &Truncation,
    nets: &mut dyn NetLookup,
) -> Result<Successors> {
    let (i, j, k) = (node.i, node.j, node.k());
    let hi = node.cusps[i].height();
    let hj = node.cusps[j].height();
    let mut out = Vec::new();
    let mut truncated = false;
    let steps = steps_of(&node.cusps[j], &p.min_quotient, &hi, &trunc.max_height)?;
    'outer: for jp in (0..k).filter(|&l| l != j) {
        // candidates for a′_{j′}
        let (lo, up, h_min) = if jp == i {
            let r = &p.c / BigRational::from_integer(hi.clone());
            let x = node.center(i);
            (&x - &r, &x + &r, (&hj + BigInt::one()).max(hi.clone()))
        } else {
            // (4) with h′_j h′_{j′} ≥ h_i² > h_i h_j bounds the offset by 2c/√(h_i h_j)
            let r = two_c_over_sqrt(&p.c, &node.scale());
            let x = node.center(jp);
            (&x - &r, &x + &r, &hj + 1)
        };
        let pool = cusps_in(&lo, &up, &h_min, &trunc.max_height);
        for a_j in &steps {
            for a_jp in &pool {
                let mut cusps = node.cusps.clone();
                cusps[j] = a_j.clone();
                cusps[jp] = a_jp.clone();
                let n_new = a_j.height() * a_jp.height();
                let others: Vec<usize> = (0..k).filter(|&l| l != j && l != jp).collect();
                let mut combos = vec![cusps];
                for &l in &others {
                    let r = Radius::InvSqrt(n_new.clone());
                    let span = node.box_radius(l, &p.c);
                    let x = node.center(l);
                    let reach = match &span {
                        Radius::Exact(a) => a.clone(),
                        Radius::InvSqrt(_) => two_c_over_sqrt(&p.c, &node.scale()),
                    } + two_c_over_sqrt(&p.c, &n_new);
                    let members = nets.members(l, &n_new, &(&x - &reach), &(&x + &reach))?;
                    let mut next = Vec::new();
                    for base in &combos {
                        for m in &members {
                            let d = m.value().unwrap() - &x;
                            if within(&d, &span, &r, &p.c) {
                                let mut c2 = base.clone();
                                c2[l] = m.clone();
                                next.push(c2);
                            }
                        }
                    }
                    combos = next;
                }
                for cusps in combos {
                    let cand = CoverNode { cusps, i: j, j: jp };
                    if successor_violation(node, &cand, p).is_none() {
                        if out.len() >= trunc.max_nodes {
                            truncated = true;
                            break 'outer;
                        }
                        out.push(cand);
                    }
                }
            }
        }
    }
    out.sort();
    Ok(Successors { nodes: out, truncated })
}

/// A rational upper bound for `2c/√n` (used only to widen search windows).
fn two_c_over_sqrt(c: &BigRational, n: &BigInt) -> BigRational {
    let s = crate::arith::isqrt(n).max(BigInt::one());
    BigRational::from_integer(2.into()) * c / BigRational::from_integer(s)
}

/// `Σ (diam B(α′) / diam B(α))^s` over the successors, smallest terms first.
#[derive(Clone, Debug, PartialEq)]
pub struct CoveringSum {
    pub s: f64,
    pub sum: f64,
    pub terms: usize,
    pub truncated: bool,
}

fn ln_ratios(node: &CoverNode, succ: &Successors) -> Vec<f64> {
    let base = ln_big(&node.scale());
    let mut v: Vec<f64> = succ.nodes.iter().map(|n| 0.5 * (base - ln_big(&n.scale()))).collect();
    v.sort_by(f64::total_cmp);
    v
}

fn sum_at(ln_r: &[f64], s: f64) -> f64 {
    ln_r.iter().map(|&l| exp(s * l)).sum()
}

pub fn covering_sum(node: &CoverNode, succ: &Successors, s: f64) -> CoveringSum {
    let ln_r = ln_ratios(node, succ);
    CoveringSum { s, sum: sum_at(&ln_r, s), terms: ln_r.len(), truncated: succ.truncated }
}

/// `s*` in `[lo, hi]` where the truncated sum crosses 1; `None` without a sign change.
pub fn covering_crossing(node: &CoverNode, succ: &Successors, lo: f64, hi: f64) -> Option<f64> {
    let ln_r = ln_ratios(node, succ);
    let f = |s: f64| sum_at(&ln_r, s) - 1.0;
    let (mut a, mut b) = (lo, hi);
    if f(a) < 0.0 || f(b) > 0.0 {
        return None;
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if f(m) > 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    Some(0.5 * (a + b))
}

/// Node chain with its per-clause verification.
#[derive(Clone, Debug, PartialEq)]
pub struct Chain {
    pub nodes: Vec<CoverNode>,
    /// The switch events the nodes were read from.
    pub events: Vec<SwitchEvent>,
    /// `diam B(u(l+1)) / diam B(u(l))`.
    pub ratios: Vec<f64>,
}

/// The point represented by a direction prefix: its last convergent.
fn representative(x: &Direction) -> BigRational {
    let c = x.convergents();
    let last = c.last().unwrap();
    BigRational::new(last.p.clone(), last.q.clone())
}

/// Read the node chain off the switch events of an escaping tuple.
///
/// Event `p` switching from component `i` to `j` gives `b` (the record of `i`
/// after the one in force) and `a′` (the record of `j` taking over); events are
/// kept while `h(b_l)² ≤ h(b_p) h(a′_p)`, and each kept event becomes the node
/// with `a_i = b`, `a_j = a′`.
pub fn chain_extract(
    xs: &[Direction],
    profile: &JointProfile,
    p: &CoverParams,
    horizon: (f64, f64),
    nets: &mut dyn NetLookup,
) -> Result<Chain> {
    let delta = p.delta_f64();
    if classify(profile, delta, horizon)? != Divergence::Escaping {
        return Err(Error::InvalidInput("tuple is not escaping at delta over the horizon".into()));
    }
    let k = xs.len();
    let trace = minima_trace(profile, horizon.1)?;
    let evs: Vec<&SwitchEvent> =
        trace.events.iter().filter(|e| e.t >= horizon.0 && e.local_min && e.cusp_from.is_some()).collect();
    let mut kept: Vec<&SwitchEvent> = Vec::new();
    for e in evs {
        let ok = match kept.last() {
            None => true,
            Some(prev) => {
                let hb = prev.cusp_from.as_ref().unwrap().height();
                &hb * &hb <= e.cusp_from.as_ref().unwrap().height() * e.cusp_to.height()
            }
        };
        if ok {
            kept.push(e);
        }
    }
    let pts: Vec<BigRational> = xs.iter().map(representative).collect();
    let mut nodes = Vec::new();
    for e in &kept {
        let mut cusps: Vec<Cusp> = Vec::with_capacity(k);
        let n = e.cusp_from.as_ref().unwrap().height() * e.cusp_to.height();
        for l in 0..k {
            let c = if l == e.from {
                e.cusp_from.clone().unwrap()
            } else if l == e.to {
                e.cusp_to.clone()
            } else {
                nearest_member(nets, l, &n, &pts[l], &p.c)?
            };
            cusps.push(c);
        }
        match make_node(cusps, e.from, e.to, p, nets)? {
            Ok(node) => nodes.push(node),
            Err(r) => return Err(Error::Validation(format!("event at t = {} gives no node: {r:?}", e.t))),
        }
    }
    if nodes.len() < 2 {
        return Err(Error::InvalidInput("horizon too short: fewer than two chain nodes".into()));
    }
    // (i) the point lies in every B and A
    for node in &nodes {
        for l in 0..k {
            let d = &pts[l] - node.center(l);
            let zero = Radius::Exact(BigRational::zero());
            if !within(&d, &Radius::InvSqrt(node.scale()), &zero, &p.c) {
                return Err(Error::Validation(format!(
                    "clause (i): point outside B of node at {}",
                    node.cusps[node.i]
                )));
            }
            if !within(&d, &node.box_radius(l, &p.c), &zero, &p.c) {
                return Err(Error::Validation(format!(
                    "clause (i): point outside A of node at {}",
                    node.cusps[node.i]
                )));
            }
        }
    }
    let mut ratios = Vec::new();
    for w in nodes.windows(2) {
        // (ii)
        if let Some(v) = successor_violation(&w[0], &w[1], p) {
            return Err(Error::Validation(format!("clause (ii): successor condition {v} fails")));
        }
        // (iii) h_i h_j ≤ δ h′_i h′_j
        let (a, b) = (BigRational::from_integer(w[0].scale()), BigRational::from_integer(w[1].scale()));
        if a > &p.delta * b {
            return Err(Error::Validation("clause (iii): contraction above sqrt(delta)".into()));
        }
        ratios.push(exp(w[1].ln_diam(&p.c) - w[0].ln_diam(&p.c)));
    }
    Ok(Chain { nodes, events: kept.into_iter().cloned().collect(), ratios })
}

fn nearest_member(nets: &mut dyn NetLookup, l: usize, n: &BigInt, x: &BigRational, c: &BigRational) -> Result<Cusp> {
    let r = two_c_over_sqrt(c, n);
    let ms = nets.members(l, n, &(x - &r), &(x + &r))?;
    ms.into_iter()
        .min_by(|a, b| (a.value().unwrap() - x).abs().cmp(&(b.value().unwrap() - x).abs()))
        .ok_or_else(|| Error::Validation(format!("no net member of component {l} near the point")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cantor::singular_pair;
    use crate::product::DirectionTuple;

    fn cusp(p: i64, q: i64) -> Cusp {
        Cusp::new(p, q).unwrap()
    }

    #[test]
    fn node_conditions() {
        let p = CoverParams::new(2.0, 0.25, 2).unwrap();
        let ok = make_node(vec![cusp(0, 1), cusp(1, 3)], 1, 0, &p, &mut NoNets).unwrap();
        assert!(ok.is_ok());
        let bad = make_node(vec![cusp(1, 2), cusp(1, 3)], 1, 0, &p, &mut NoNets).unwrap();
        assert_eq!(bad, Err(Rejection::HeightRatio));
        assert_eq!(make_node(vec![cusp(1, 2), cusp(1, 3)], 1, 1, &p, &mut NoNets).unwrap(), Err(Rejection::BadIndex));
    }

    #[test]
    fn three_components_use_the_net() {
        let p = CoverParams::new(2.0, 0.25, 2).unwrap();
        let mut nets = GreedyNets::new(Region::unit(), 1.0, 0.25, 100_000);
        let n = BigInt::from(81);
        let member = nets.net(2, &n).unwrap().members[1].clone();
        let node = make_node(vec![cusp(1, 9), cusp(1, 1), member], 0, 1, &p, &mut nets).unwrap();
        assert!(node.is_ok());
        let stranger = cusp(4, 9);
        assert!(!nets.net(2, &n).unwrap().contains(&stranger));
        let node = make_node(vec![cusp(1, 9), cusp(1, 1), stranger], 0, 1, &p, &mut nets).unwrap();
        assert_eq!(node, Err(Rejection::NotInNet(2)));
    }

    #[test]
    fn step_quotient_inverts_next_cusp() {
        let a = cusp(3, 7);
        for n in [-9i64, -2, 2, 5] {
            let b = crate::lattice::next_cusp(&a, &BigInt::from(n)).unwrap();
            assert_eq!(step_quotient(&a, &b), Some(BigInt::from(n)));
        }
        assert_eq!(step_quotient(&a, &cusp(1, 5)), None);
    }

    #[test]
    fn exact_within_matches_float() {
        let c = BigRational::from_integer(2.into());
        for (d, n, m) in [(0.3, 100, 400), (0.31, 100, 100), (0.5, 25, 36), (0.1, 10_000, 10_000)] {
            let dr = ratio_from_f64(d).unwrap();
            let got = within(&dr, &Radius::InvSqrt(n.into()), &Radius::InvSqrt(m.into()), &c);
            let want = d <= 2.0 / (n as f64).sqrt() + 2.0 / (m as f64).sqrt();
            assert_eq!(got, want, "{d} {n} {m}");
        }
    }

    #[test]
    fn successors_shrink_with_delta_and_sum_falls_with_s() {
        let p = CoverParams::new(2.0, 0.1, 2).unwrap();
        let node = make_node(vec![cusp(1, 2), cusp(1, 8)], 1, 0, &p, &mut NoNets).unwrap().unwrap();
        let trunc = Truncation { max_height: BigInt::from(20_000), max_nodes: 100_000 };
        let wide = successors(&node, &p, &trunc, &mut NoNets).unwrap();
        assert!(!wide.nodes.is_empty());
        let tight = CoverParams::new(2.0, 0.05, 2).unwrap();
        let narrow = successors(&node, &tight, &trunc, &mut NoNets).unwrap();
        assert!(narrow.nodes.iter().all(|n| wide.nodes.contains(n)));
        assert!(narrow.nodes.len() < wide.nodes.len());
        let s1 = covering_sum(&node, &wide, 1.0).sum;
        let s2 = covering_sum(&node, &wide, 1.5).sum;
        assert!(s2 < s1);
        let low = Truncation { max_height: BigInt::from(64), max_nodes: 100 };
        assert!(successors(&node, &p, &low, &mut NoNets).unwrap().nodes.is_empty());
    }

    #[test]
    fn singular_pair_chain() {
        let pair = singular_pair(&BigInt::from(10u64).pow(10), 1.0, 6, 0.25).unwrap();
        let xs = vec![pair.x1.clone(), pair.x2.clone()];
        let prof = JointProfile::new(&DirectionTuple::new(xs.clone()).unwrap(), 1.0).unwrap();
        let p = CoverParams::new(2.0, 0.25, 2).unwrap();
        let chain = chain_extract(&xs, &prof, &p, pair.horizon, &mut NoNets).unwrap();
        assert!(chain.nodes.len() >= 3);
        assert!(chain.ratios.iter().all(|&r| r <= 0.5));
    }

    #[test]
    fn recurrent_tuple_is_refused() {
        let g = Direction::from_quadratic(&BigInt::from(-1), &BigInt::from(5), &BigInt::from(2), 50).unwrap();
        let xs = vec![g.clone(), g];
        let prof = JointProfile::new(&DirectionTuple::new(xs.clone()).unwrap(), 1.0).unwrap();
        let p = CoverParams::new(2.0, 0.25, 2).unwrap();
        assert!(matches!(chain_extract(&xs, &prof, &p, (2.0, 20.0), &mut NoNets), Err(Error::InvalidInput(_))));
    }
}
