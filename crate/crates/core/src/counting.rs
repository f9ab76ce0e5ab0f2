//! Exact cusp counts on the modular group: annuli, Dirichlet witnesses,
//! weighted height sums and separated nets.

use alloc::format;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::{
    ceil_ratio, count_coprime_in, count_coprime_in_big, floor_ratio, isqrt, isqrt_ceil, least_squares, prime_factors,
    ratio_from_f64, ratio_to_f64,
};
use crate::excursion::Direction;
use crate::lattice::{for_each_cusp, Cusp, Region};
use crate::real::{exp, ln, sqrt};
use crate::{Error, Result};

fn positive(name: &str, v: f64) -> Result<BigRational> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::InvalidInput(format!("{name} = {v} must be positive and finite")));
    }
    Ok(ratio_from_f64(v).unwrap())
}

/// Cusps `a′` with `|a′ - a| ≤ A3 / h(a)` and `h(a′) ∈ [A1 e^t h(a), A2 e^t h(a)]`.
#[derive(Clone, Debug)]
pub struct Annulus {
    pub center: Cusp,
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub t: f64,
    x0: BigRational,
    radius: BigRational,
    q_lo: BigInt,
    q_hi: BigInt,
}

impl Annulus {
    pub fn new(center: &Cusp, a1: f64, a2: f64, a3: f64, t: f64) -> Result<Self> {
        let x0 = center.value().ok_or_else(|| Error::InvalidInput("annulus center must be finite".into()))?;
        let h = BigRational::from_integer(center.height());
        let r3 = positive("A3", a3)?;
        let lo = positive("A1 e^t", a1 * exp(t))? * &h;
        let hi = positive("A2 e^t", a2 * exp(t))? * &h;
        let q_lo = isqrt_ceil(&ceil_ratio(&lo)).max(BigInt::one());
        let q_hi = isqrt(&floor_ratio(&hi));
        Ok(Annulus { center: center.clone(), a1, a2, a3, t, radius: r3 / h, x0, q_lo, q_hi })
    }

    /// Inclusive denominator range of the height shell.
    pub fn q_range(&self) -> (BigInt, BigInt) {
        (self.q_lo.clone(), self.q_hi.clone())
    }

    /// Cusps of denominator `q` inside the ball.
    pub fn count_at(&self, q: &BigInt) -> BigInt {
        let qr = BigRational::from_integer(q.clone());
        let lo = ceil_ratio(&((&self.x0 - &self.radius) * &qr));
        let hi = floor_ratio(&((&self.x0 + &self.radius) * &qr));
        match q.to_u64() {
            Some(qq) => count_coprime_in_big(&lo, &hi, &prime_factors(qq)),
            None => {
                let mut n = BigInt::zero();
                let mut p = lo;
                while p <= hi {
                    if p.gcd(q).is_one() {
                        n += 1;
                    }
                    p += 1;
                }
                n
            }
        }
    }

    /// Exact count, failing if the shell has more than `budget` denominators.
    pub fn count(&self, budget: u64) -> Result<u64> {
        let (lo, hi) = self.q_range();
        if hi < lo {
            return Ok(0);
        }
        let span = &hi - &lo + 1;
        if span > BigInt::from(budget) {
            return Err(Error::Budget(format!("annulus spans {span} denominators, budget {budget}")));
        }
        let mut total = BigInt::zero();
        let mut q = lo;
        while q <= hi {
            total += self.count_at(&q);
            q += 1;
        }
        total.to_u64().ok_or_else(|| Error::Budget("count overflows u64".into()))
    }
}

pub fn count_annulus(a: &Cusp, a1: f64, a2: f64, a3: f64, t: f64, budget: u64) -> Result<u64> {
    Annulus::new(a, a1, a2, a3, t)?.count(budget)
}

#[derive(Clone, Debug, PartialEq)]
pub struct GrowthFit {
    pub slope: f64,
    pub intercept: f64,
    /// `(t, count)` pairs used in the fit.
    pub points: Vec<(f64, u64)>,
    /// Grid times dropped for having fewer than [`MIN_FIT_COUNT`] cusps.
    pub dropped: Vec<f64>,
    pub residuals: Vec<f64>,
    /// `min count / e^t` over the fitted points.
    pub lower_constant: f64,
}

pub const MIN_FIT_COUNT: u64 = 5;

/// Least-squares slope of `ln count` against `t` from precomputed counts.
pub fn fit_growth(counts: &[(f64, u64)]) -> Result<GrowthFit> {
    if counts.len() < 5 {
        return Err(Error::InvalidInput("growth fit needs at least 5 grid points".into()));
    }
    let (kept, low): (Vec<(f64, u64)>, Vec<(f64, u64)>) =
        counts.iter().copied().partition(|(_, c)| *c >= MIN_FIT_COUNT);
    let dropped = low.into_iter().map(|(t, _)| t).collect();
    let xs: Vec<f64> = kept.iter().map(|(t, _)| *t).collect();
    let ys: Vec<f64> = kept.iter().map(|(_, c)| ln(*c as f64)).collect();
    let (slope, intercept) = match least_squares(&xs, &ys) {
        Some(f) => f,
        None if !ys.is_empty() => (0.0, ys[0]),
        None => return Err(Error::InvalidInput("no grid point has enough cusps to fit".into())),
    };
    let residuals = xs.iter().zip(&ys).map(|(x, y)| y - (slope * x + intercept)).collect();
    let lower_constant = kept.iter().map(|(t, c)| *c as f64 * exp(-t)).fold(f64::INFINITY, f64::min);
    Ok(GrowthFit { slope, intercept, points: kept, dropped, residuals, lower_constant })
}

pub fn growth_exponent(a: &Cusp, a1: f64, a2: f64, a3: f64, t_grid: &[f64], budget: u64) -> Result<GrowthFit> {
    let counts =
        t_grid.iter().map(|&t| Ok((t, count_annulus(a, a1, a2, a3, t, budget)?))).collect::<Result<Vec<_>>>()?;
    fit_growth(&counts)
}

/// The convergent `p_k/q_k` with `q_k ≤ √X < q_{k+1}`, checked to lie within `1/√X` of `x`.
pub fn dirichlet_witness(x: &Direction, big_x: &BigInt) -> Result<Cusp> {
    if *big_x < BigInt::from(4) {
        return Err(Error::InvalidInput(format!("X = {big_x} must be at least 4")));
    }
    let conv = x.convergents();
    let k = conv.iter().rposition(|c| &c.q * &c.q <= *big_x).unwrap_or(0);
    let c = &conv[k];
    let cusp = c.cusp();
    let a = BigRational::new(c.p.clone(), c.q.clone());
    let xr = BigRational::from_integer(big_x.clone());
    if let Some(v) = x.value() {
        let d = &v - &a;
        if &d * &d * &xr > BigRational::one() {
            return Err(Error::Validation(format!("witness {cusp} is farther than 1/sqrt(X) from x")));
        }
        return Ok(cusp);
    }
    // |x - p_k/q_k| < 1 / (q_k q_{k+1}) for any x in the cylinder
    let next = conv.get(k + 1).ok_or_else(|| {
        Error::Budget(format!("continued fraction prefix too short to certify a witness at X = {big_x}"))
    })?;
    let qq = &c.q * &next.q;
    if &qq * &qq < *big_x {
        return Err(Error::Validation(format!("witness {cusp} not certified")));
    }
    Ok(cusp)
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeightedSum {
    pub sum: f64,
    pub cusps: u64,
    /// `sum / (√X · |B|)`.
    pub ratio: f64,
}

/// `Σ 1/q` over reduced `p/q ∈ B` with `q² ≤ X`.
pub fn weighted_height_sum(region: &Region, big_x: u64, budget: u64) -> Result<WeightedSum> {
    let q_max = isqrt(&BigInt::from(big_x)).to_u64().unwrap();
    if q_max > budget {
        return Err(Error::Budget(format!("{q_max} denominators exceed budget {budget}")));
    }
    let (mut sum, mut cusps) = (0.0, 0u64);
    for q in 1..=q_max {
        let qr = BigRational::from_integer(q.into());
        let lo = ceil_ratio(&(&region.lo * &qr));
        let hi_r = &region.hi * &qr;
        let hi = if region.closed { floor_ratio(&hi_r) } else { ceil_ratio(&hi_r) - 1 };
        let n = match (lo.to_i128(), hi.to_i128()) {
            (Some(l), Some(h)) => count_coprime_in(l, h, &prime_factors(q)),
            _ => count_coprime_in_big(&lo, &hi, &prime_factors(q)).to_i128().unwrap_or(i128::MAX),
        };
        cusps += n as u64;
        sum += n as f64 / q as f64;
    }
    let vol = ratio_to_f64(&region.length());
    Ok(WeightedSum { sum, cusps, ratio: sum / (sqrt(big_x as f64) * vol) })
}

/// A separated, covering set of cusps of height at most `N`.
#[derive(Clone, Debug, PartialEq)]
pub struct NetE {
    pub n: BigInt,
    pub region: Region,
    /// Sorted by location.
    pub members: Vec<Cusp>,
    pub c: f64,
    pub c_prime: f64,
    pub covering_radius: f64,
    pub packing_radius: f64,
    locs: Vec<f64>,
}

impl NetE {
    pub fn contains(&self, a: &Cusp) -> bool {
        self.members.binary_search(a).is_ok()
    }

    /// Nearest member and its distance.
    pub fn nearest(&self, x: f64) -> Option<(&Cusp, f64)> {
        nearest_in(&self.locs, x).map(|k| (&self.members[k], (self.locs[k] - x).abs()))
    }
}

fn nearest_in(sorted: &[f64], x: f64) -> Option<usize> {
    if sorted.is_empty() {
        return None;
    }
    let k = sorted.partition_point(|&v| v < x);
    let mut best = None::<(usize, f64)>;
    for j in [k.wrapping_sub(1), k] {
        if let Some(v) = sorted.get(j) {
            let d = (v - x).abs();
            if best.map_or(true, |(_, b)| d < b) {
                best = Some((j, d));
            }
        }
    }
    best.map(|(j, _)| j)
}

/// Greedy net: cusps of height `≤ N` in the closed region, in increasing
/// height order, skipping any candidate closer than `c′/√N` to an accepted one.
/// Covering at radius `c/√N` is then checked on a grid of step `c/(4√N)`.
pub fn build_net(region: &Region, n: u64, c: f64, c_prime: f64, budget: u64) -> Result<NetE> {
    if n < 4 {
        return Err(Error::InvalidInput(format!("N = {n} must be at least 4")));
    }
    positive("c", c)?;
    positive("c'", c_prime)?;
    let hn = BigInt::from(n);
    let rn = sqrt(n as f64);
    let (cover_r, pack_r) = (c / rn, c_prime / rn);
    let hull = Region::closed(region.lo.clone(), region.hi.clone());
    let mut cands: Vec<(u64, BigInt)> = Vec::new();
    let mut over = false;
    for_each_cusp(&hull, &hn, |p, q| {
        if cands.len() as u64 >= budget {
            over = true;
            return;
        }
        cands.push((q.to_u64().unwrap(), p));
    });
    if over {
        return Err(Error::Budget(format!("more than {budget} cusps of height <= {n}")));
    }
    // stable sort keeps location order within a height
    cands.sort_by_key(|(q, _)| *q);
    let mut locs: Vec<f64> = Vec::new();
    let mut members: Vec<Cusp> = Vec::new();
    for (q, p) in cands {
        let x = p.to_f64().unwrap() / q as f64;
        if let Some(k) = nearest_in(&locs, x) {
            if (locs[k] - x).abs() < pack_r {
                continue;
            }
        }
        let at = locs.partition_point(|&v| v < x);
        locs.insert(at, x);
        members.insert(at, Cusp::from_reduced(p, BigInt::from(q)));
    }
    let lo = ratio_to_f64(&region.lo);
    let hi = ratio_to_f64(&region.hi);
    let step = c / (4.0 * rn);
    let steps = ((hi - lo) / step) as u64;
    for k in 0..=steps {
        let x = lo + k as f64 * step;
        if x >= hi && !(region.closed && x == hi) {
            break;
        }
        match nearest_in(&locs, x) {
            Some(j) if (locs[j] - x).abs() <= cover_r => {}
            _ => return Err(Error::Uncovered(x)),
        }
    }
    Ok(NetE {
        n: hn,
        region: region.clone(),
        members,
        c,
        c_prime,
        covering_radius: cover_r,
        packing_radius: pack_r,
        locs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn brute_annulus(p0: i64, q0: i64, a1: f64, a2: f64, a3: f64, t: f64) -> u64 {
        let h = (q0 * q0) as f64;
        let x0 = p0 as f64 / q0 as f64;
        let (lo, hi) = (a1 * exp(t) * h, a2 * exp(t) * h);
        let mut n = 0;
        for q in 1i64..=(sqrt(hi) as i64 + 2) {
            let qq = (q * q) as f64;
            if qq < lo || qq > hi {
                continue;
            }
            for p in (q as f64 * (x0 - a3 / h) - 2.0) as i64..=(q as f64 * (x0 + a3 / h) + 2.0) as i64 {
                if p.gcd(&q) == 1 && (p as f64 / q as f64 - x0).abs() <= a3 / h + 1e-15 {
                    n += 1;
                }
            }
        }
        n
    }

    #[test]
    fn annulus_matches_double_loop() {
        let a = Cusp::new(0, 1).unwrap();
        let n = count_annulus(&a, 1.0, 4.0, 1.0, ln(4.0), 1000).unwrap();
        assert_eq!(n, brute_annulus(0, 1, 1.0, 4.0, 1.0, ln(4.0)));
        let b = Cusp::new(2, 5).unwrap();
        for t in [1.0, 2.5, 4.0] {
            assert_eq!(count_annulus(&b, 1.0, 4.0, 1.0, t, 10_000).unwrap(), brute_annulus(2, 5, 1.0, 4.0, 1.0, t));
        }
    }

    #[test]
    fn annulus_monotone_and_thin() {
        let a = Cusp::new(0, 1).unwrap();
        let n4 = count_annulus(&a, 1.0, 4.0, 1.0, 5.0, 10_000).unwrap();
        let n8 = count_annulus(&a, 1.0, 8.0, 1.0, 5.0, 10_000).unwrap();
        assert!(n8 >= n4);
        let s = 2f64.sqrt();
        assert!(count_annulus(&a, s, s, 1.0, 3.0, 10_000).unwrap() <= 2);
        assert!(matches!(count_annulus(&a, 1.0, 4.0, 1.0, 30.0, 10), Err(Error::Budget(_))));
    }

    #[test]
    fn growth_is_linear_in_t() {
        let a = Cusp::new(0, 1).unwrap();
        let grid: Vec<f64> = (4..=14).map(|t| t as f64).collect();
        let fit = growth_exponent(&a, 1.0, 4.0, 1.0, &grid, 1_000_000).unwrap();
        assert!((fit.slope - 1.0).abs() < 0.1, "{}", fit.slope);
        assert!(fit.lower_constant > 1.0);
        let flat: Vec<(f64, u64)> = (0..6).map(|k| (k as f64, 42)).collect();
        assert_eq!(fit_growth(&flat).unwrap().slope, 0.0);
    }

    #[test]
    fn witness_examples() {
        let pi = Direction::from_interval(
            &BigRational::new(3141592653589793i64.into(), 1000000000000000i64.into()),
            &BigRational::new(3141592653589794i64.into(), 1000000000000000i64.into()),
        )
        .unwrap();
        let w = dirichlet_witness(&pi, &BigInt::from(10_000)).unwrap();
        assert_eq!(w, Cusp::new(22, 7).unwrap());
        let half = Direction::from_i64(1, 2).unwrap();
        for x in [4, 5, 100, 1_000_000] {
            assert_eq!(dirichlet_witness(&half, &BigInt::from(x)).unwrap(), Cusp::new(1, 2).unwrap());
        }
        let golden = Direction::from_quadratic(&BigInt::from(-1), &BigInt::from(5), &BigInt::from(2), 40).unwrap();
        let fib = [1i64, 1, 2, 3, 5, 8, 13, 21, 34, 55, 89];
        for k in 3..fib.len() {
            let w = dirichlet_witness(&golden, &BigInt::from(fib[k] * fib[k])).unwrap();
            assert_eq!(w, Cusp::new(fib[k - 1], fib[k]).unwrap());
        }
    }

    #[test]
    fn weighted_sum_examples() {
        let s = weighted_height_sum(&Region::unit(), 25, 100).unwrap();
        assert!((s.sum - (1.0 + 0.5 + 2.0 / 3.0 + 0.5 + 0.8)).abs() < 1e-12);
        assert_eq!(weighted_height_sum(&Region::unit(), 1, 100).unwrap().sum, 1.0);
        let closed = Region::ints(0, 1, true);
        assert_eq!(weighted_height_sum(&closed, 1, 100).unwrap().sum, 2.0);
        let a = weighted_height_sum(&Region::unit(), 10_000, 10_000).unwrap();
        let b = weighted_height_sum(&Region::unit(), 40_000, 10_000).unwrap();
        assert!(a.ratio / b.ratio < 2.0 && b.ratio / a.ratio < 2.0);
    }

    #[test]
    fn net_examples() {
        let net = build_net(&Region::unit(), 25, 1.0, 0.25, 10_000).unwrap();
        for c in [Cusp::new(0, 1).unwrap(), Cusp::new(1, 2).unwrap()] {
            assert!(net.contains(&c));
        }
        assert!(net.members.iter().all(|m| m.height() <= BigInt::from(25)));
        let big = build_net(&Region::unit(), 1_000_000, 1.0, 0.25, 1_000_000).unwrap();
        let expect = 1000.0 / 0.25;
        let got = big.members.len() as f64;
        assert!(got > expect / 4.0 && got < expect * 4.0, "{got}");
        for w in big.locs.windows(2) {
            assert!(w[1] - w[0] >= big.packing_radius);
        }
        let tiny = Region::half_open(
            BigRational::new(1.into(), 3.into()),
            BigRational::new(1.into(), 3.into()) + BigRational::new(1.into(), 1000.into()),
        );
        assert_eq!(build_net(&tiny, 25, 1.0, 0.25, 100).unwrap().members, vec![Cusp::new(1, 3).unwrap()]);
    }
}
