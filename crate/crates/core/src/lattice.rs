//! The modular group `PSL(2, Z)` acting on the upper half-plane.
//!
//! Cusps are reduced fractions `p/q` with `q > 0`, plus `∞ = 1/0`; the
//! height of `p/q` is `q²`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{ceil_ratio, ext_gcd, floor_ratio, isqrt, ln_big, ratio_to_f64};
use crate::geometry::{BoundaryPoint, Moebius};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cusp {
    num: BigInt,
    den: BigInt,
}

impl Cusp {
    pub fn infinity() -> Self {
        Cusp { num: BigInt::one(), den: BigInt::zero() }
    }

    /// Reduced, sign-normalized cusp `p/q`.
    pub fn canonical(p: &BigInt, q: &BigInt) -> Result<Self> {
        if p.is_zero() && q.is_zero() {
            return Err(Error::InvalidInput("0/0 is not a cusp".into()));
        }
        if q.is_zero() {
            return Ok(Cusp::infinity());
        }
        let g = p.gcd(q);
        let (mut p, mut q) = (p / &g, q / &g);
        if q.is_negative() {
            p = -p;
            q = -q;
        }
        Ok(Cusp { num: p, den: q })
    }

    pub fn new(p: i64, q: i64) -> Result<Self> {
        Cusp::canonical(&BigInt::from(p), &BigInt::from(q))
    }

    /// Build from parts already known to be coprime with `q > 0`.
    pub(crate) fn from_reduced(num: BigInt, den: BigInt) -> Self {
        debug_assert!(den.is_positive() && num.gcd(&den).is_one());
        Cusp { num, den }
    }

    pub fn from_ratio(r: &BigRational) -> Self {
        Cusp { num: r.numer().clone(), den: r.denom().clone() }
    }

    pub fn num(&self) -> &BigInt {
        &self.num
    }

    pub fn den(&self) -> &BigInt {
        &self.den
    }

    pub fn is_infinite(&self) -> bool {
        self.den.is_zero()
    }

    /// `h = q²`; `1` for `∞`.
    pub fn height(&self) -> BigInt {
        if self.is_infinite() {
            BigInt::one()
        } else {
            &self.den * &self.den
        }
    }

    pub fn ln_height(&self) -> f64 {
        if self.is_infinite() {
            0.0
        } else {
            2.0 * ln_big(&self.den)
        }
    }

    pub fn value(&self) -> Option<BigRational> {
        if self.is_infinite() {
            None
        } else {
            Some(BigRational::new_raw(self.num.clone(), self.den.clone()))
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self.value() {
            Some(v) => ratio_to_f64(&v),
            None => f64::INFINITY,
        }
    }

    pub fn location(&self) -> BoundaryPoint<1> {
        if self.is_infinite() {
            BoundaryPoint::Infinity
        } else {
            BoundaryPoint::Finite([self.to_f64()])
        }
    }

    /// `|p1 q2 - p2 q1|`; `1` exactly for Farey neighbours.
    pub fn cross(&self, o: &Cusp) -> BigInt {
        (&self.num * &o.den - &o.num * &self.den).abs()
    }
}

impl Ord for Cusp {
    fn cmp(&self, o: &Self) -> Ordering {
        match (self.is_infinite(), o.is_infinite()) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Greater,
            (false, true) => Ordering::Less,
            _ => (&self.num * &o.den).cmp(&(&o.num * &self.den)),
        }
    }
}

impl PartialOrd for Cusp {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Display for Cusp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Cusp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidInput(format!("cannot parse cusp {s:?}"));
        let s = s.trim();
        let (p, q) = match s.split_once('/') {
            Some((p, q)) => (p.trim(), q.trim()),
            None => (s, "1"),
        };
        let p: BigInt = p.parse().map_err(|_| bad())?;
        let q: BigInt = q.parse().map_err(|_| bad())?;
        Cusp::canonical(&p, &q)
    }
}

/// Integer matrix `(a b; c d)` of determinant one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub d: BigInt,
}

impl IntMatrix {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        let m = IntMatrix { a: a.into(), b: b.into(), c: c.into(), d: d.into() };
        if !m.det().is_one() {
            return Err(Error::InvalidInput(format!("({a} {b}; {c} {d}) is not unimodular")));
        }
        Ok(m)
    }

    pub fn det(&self) -> BigInt {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn mul(&self, o: &IntMatrix) -> IntMatrix {
        IntMatrix {
            a: &self.a * &o.a + &self.b * &o.c,
            b: &self.a * &o.b + &self.b * &o.d,
            c: &self.c * &o.a + &self.d * &o.c,
            d: &self.c * &o.b + &self.d * &o.d,
        }
    }

    pub fn inverse(&self) -> IntMatrix {
        IntMatrix { a: self.d.clone(), b: -&self.b, c: -&self.c, d: self.a.clone() }
    }

    /// Exact image of a cusp.
    pub fn apply(&self, c: &Cusp) -> Cusp {
        let p = &self.a * &c.num + &self.b * &c.den;
        let q = &self.c * &c.num + &self.d * &c.den;
        Cusp::canonical(&p, &q).expect("unimodular image is never 0/0")
    }

    pub fn to_moebius(&self) -> Moebius {
        let f = |v: &BigInt| v.to_f64().unwrap_or(f64::NAN);
        Moebius { a: f(&self.a), b: f(&self.b), c: f(&self.c), d: f(&self.d) }
    }

    /// `h̃(γ∞) = a² + c²`, exactly.
    pub fn busemann_height(&self) -> BigInt {
        &self.a * &self.a + &self.c * &self.c
    }
}

/// `(p p*; q q*)` with `p q* - p* q = 1` and `0 < q* ≤ q`.
pub fn realize(c: &Cusp) -> Result<IntMatrix> {
    if c.is_infinite() {
        return Ok(IntMatrix { a: BigInt::one(), b: BigInt::zero(), c: BigInt::zero(), d: BigInt::one() });
    }
    let (p, q) = (&c.num, &c.den);
    // p x - q y = 1
    let (_, x, y) = ext_gcd(p, q);
    let (mut qs, mut ps) = (x, -y);
    let shift = (&qs - BigInt::one()).div_floor(q);
    qs -= &shift * q;
    ps -= &shift * p;
    debug_assert!((p * &qs - &ps * q).is_one());
    Ok(IntMatrix { a: p.clone(), b: ps, c: q.clone(), d: qs })
}

/// Interval `[lo, hi)` or `[lo, hi]` of the boundary line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Region {
    pub lo: BigRational,
    pub hi: BigRational,
    pub closed: bool,
}

impl Region {
    pub fn half_open(lo: BigRational, hi: BigRational) -> Self {
        Region { lo, hi, closed: false }
    }

    pub fn closed(lo: BigRational, hi: BigRational) -> Self {
        Region { lo, hi, closed: true }
    }

    pub fn unit() -> Self {
        Region::half_open(BigRational::zero(), BigRational::one())
    }

    pub fn ints(lo: i64, hi: i64, closed: bool) -> Self {
        Region { lo: BigRational::from_integer(lo.into()), hi: BigRational::from_integer(hi.into()), closed }
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        *x >= self.lo && if self.closed { *x <= self.hi } else { *x < self.hi }
    }

    pub fn length(&self) -> BigRational {
        &self.hi - &self.lo
    }

    /// Split into `parts` adjacent pieces whose union is `self`.
    pub fn split(&self, parts: usize) -> Vec<Region> {
        let parts = parts.max(1);
        let step = self.length() / BigRational::from_integer(BigInt::from(parts));
        (0..parts)
            .map(|k| {
                let lo = &self.lo + &step * BigRational::from_integer(BigInt::from(k));
                let last = k + 1 == parts;
                let hi = if last { self.hi.clone() } else { &lo + &step };
                Region { lo, hi, closed: last && self.closed }
            })
            .collect()
    }
}

/// Consecutive pair `(a/b, c/d)` of the Farey sequence of order `order`
/// with `a/b < x ≤ c/d`.
fn farey_bracket(x: &BigRational, order: &BigInt) -> ((BigInt, BigInt), (BigInt, BigInt)) {
    let (u, v) = (x.numer(), x.denom());
    let top = ceil_ratio(x);
    let (mut a, mut b) = (&top - 1, BigInt::one());
    let (mut c, mut d) = (top, BigInt::one());
    loop {
        // advance the left end toward x: (a + k c)/(b + k d) < x
        let gap_r = &c * v - u * &d;
        let room = (order - &b).div_floor(&d);
        let kl = if gap_r.is_zero() {
            room
        } else {
            let lim: BigInt = ceil_ratio(&BigRational::new(u * &b - &a * v, gap_r.clone())) - 1;
            lim.min(room)
        };
        if kl.is_positive() {
            a += &kl * &c;
            b += &kl * &d;
        }
        // advance the right end toward x: (c + k a)/(d + k b) >= x
        let gap_l = u * &b - &a * v;
        let room = (order - &d).div_floor(&b);
        let kr = floor_ratio(&BigRational::new(&c * v - u * &d, gap_l)).min(room);
        if kr.is_positive() {
            c += &kr * &a;
            d += &kr * &b;
        }
        if !kl.is_positive() && !kr.is_positive() {
            return ((a, b), (c, d));
        }
    }
}

/// Reduced fractions in `region` with `q² ≤ h_max`, in increasing order.
pub fn enumerate_cusps(region: &Region, h_max: &BigInt) -> Vec<Cusp> {
    let mut out = Vec::new();
    for_each_cusp(region, h_max, |p, q| out.push(Cusp::from_reduced(p, q)));
    out
}

/// Number of cusps [`enumerate_cusps`] would return, without allocation.
pub fn count_cusps(region: &Region, h_max: &BigInt) -> u64 {
    let mut n = 0u64;
    for_each_cusp(region, h_max, |_, _| n += 1);
    n
}

/// Walk the Farey sequence of order `⌊√h_max⌋` through `region`.
pub fn for_each_cusp<F: FnMut(BigInt, BigInt)>(region: &Region, h_max: &BigInt, mut f: F) {
    if !h_max.is_positive() || region.hi < region.lo {
        return;
    }
    let order = isqrt(h_max);
    let (_, (c, d)) = farey_bracket(&region.lo, &order);
    let in_range = |p: &BigInt, q: &BigInt| {
        let lhs = p * region.hi.denom();
        let rhs = region.hi.numer() * q;
        if region.closed {
            lhs <= rhs
        } else {
            lhs < rhs
        }
    };
    // Left neighbour of c/d in F_order.
    let (_, x, y) = ext_gcd(&c, &d);
    // c x + d y = 1, so (a, b) = (-y, x) satisfies c b - a d = 1 up to shift.
    let (mut a, mut b) = (-y, x);
    let shift = (&order - &b).div_floor(&d);
    a += &shift * &c;
    b += &shift * &d;
    let (mut c, mut d) = (c, d);
    let small = order.bits() < 60 && c.bits() < 60 && region.hi.numer().bits() < 60 && region.hi.denom().bits() < 60;
    if small {
        let n = order.to_i128().unwrap();
        let (mut a, mut b) = (a.to_i128().unwrap(), b.to_i128().unwrap());
        let (mut c, mut d) = (c.to_i128().unwrap(), d.to_i128().unwrap());
        let (hn, hd) = (region.hi.numer().to_i128().unwrap(), region.hi.denom().to_i128().unwrap());
        loop {
            let ok = if region.closed { c * hd <= hn * d } else { c * hd < hn * d };
            if !ok {
                break;
            }
            f(BigInt::from(c), BigInt::from(d));
            let k = (n + b).div_euclid(d);
            let (e, g) = (k * c - a, k * d - b);
            (a, b, c, d) = (c, d, e, g);
        }
        return;
    }
    while in_range(&c, &d) {
        f(c.clone(), d.clone());
        let k = (&order + &b).div_floor(&d);
        let e = &k * &c - &a;
        let g = &k * &d - &b;
        a = core::mem::replace(&mut c, e);
        b = core::mem::replace(&mut d, g);
    }
}

/// Exact `|a - b|`; at least `1/√(h(a) h(b))` for distinct finite cusps.
pub fn cusp_gap(a: &Cusp, b: &Cusp) -> Result<BigRational> {
    match (a.value(), b.value()) {
        (Some(x), Some(y)) if x != y => Ok((x - y).abs()),
        (Some(_), Some(_)) => Err(Error::InvalidInput(format!("cusps {a} and {b} coincide"))),
        _ => Err(Error::InvalidInput("cusp gap needs finite cusps".into())),
    }
}

/// Continued-fraction successor `(m p_a + p_prev) / (m q_a + q_prev)`.
pub fn neighbor_step(a: &Cusp, prev: &Cusp, m: &BigInt) -> Result<Cusp> {
    if !m.is_positive() {
        return Err(Error::InvalidInput(format!("step quotient {m} must be positive")));
    }
    Cusp::canonical(&(m * &a.num + &prev.num), &(m * &a.den + &prev.den))
}

/// Farey neighbour of `a` reached by the parabolic step `m`: `γ u(m) σ ∞` with `γ = realize(a)`.
pub fn next_cusp(a: &Cusp, m: &BigInt) -> Result<Cusp> {
    let g = realize(a)?;
    Cusp::canonical(&(m * &g.a + &g.b), &(m * &g.c + &g.d))
}

/// Cusp label used in dumps: `p/q`.
pub fn label(c: &Cusp) -> String {
    format!("{c}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{bruhat_decompose, BruhatForm};
    use alloc::string::ToString;

    fn c(p: i64, q: i64) -> Cusp {
        Cusp::new(p, q).unwrap()
    }

    #[test]
    fn canonical_examples() {
        assert_eq!(c(2, 4), c(1, 2));
        assert_eq!(c(2, 4).height(), BigInt::from(4));
        assert_eq!(c(-1, -2), c(1, 2));
        assert!(c(3, 0).is_infinite());
        assert_eq!(c(3, 0).height(), BigInt::one());
        assert!(Cusp::new(0, 0).is_err());
    }

    #[test]
    fn realize_examples() {
        let s = realize(&c(0, 1)).unwrap();
        assert_eq!((s.a.clone(), s.c.clone()), (BigInt::zero(), BigInt::one()));
        let m = realize(&c(1, 2)).unwrap();
        assert_eq!((m.c.clone(), m.d.clone()), (BigInt::from(2), BigInt::one()));
        let m = realize(&c(1, 1)).unwrap();
        assert_eq!((m.c.clone(), m.d.clone()), (BigInt::one(), BigInt::one()));
        match bruhat_decompose(&realize(&c(3, 7)).unwrap().to_moebius()) {
            BruhatForm::Generic { x, r, .. } => {
                assert!((x - 3.0 / 7.0).abs() < 1e-15);
                assert!((crate::real::exp(r) - 49.0).abs() < 1e-9);
            }
            _ => panic!(),
        }
    }

    #[test]
    fn enumerate_unit_interval() {
        let got = enumerate_cusps(&Region::ints(0, 1, true), &BigInt::from(25));
        let want: Vec<Cusp> = [(0, 1), (1, 5), (1, 4), (1, 3), (2, 5), (1, 2), (3, 5), (2, 3), (3, 4), (4, 5), (1, 1)]
            .iter()
            .map(|&(p, q)| c(p, q))
            .collect();
        assert_eq!(got, want);
        assert_eq!(enumerate_cusps(&Region::unit(), &BigInt::one()), [c(0, 1)]);
    }

    #[test]
    fn enumerate_counts_match_totients() {
        let n = count_cusps(&Region::unit(), &BigInt::from(10_000));
        let want: u64 = (1..=100).map(crate::arith::totient).sum();
        assert_eq!(n, want);
    }

    #[test]
    fn enumerate_rational_bounds() {
        let r = Region::half_open(BigRational::new(1.into(), 3.into()), BigRational::new(5.into(), 7.into()));
        let got = enumerate_cusps(&r, &BigInt::from(144));
        let mut want = Vec::new();
        for q in 1..=12i64 {
            for p in 0..=q {
                let x = c(p, q);
                if x.den() == &BigInt::from(q) && r.contains(&x.value().unwrap()) {
                    want.push(x);
                }
            }
        }
        want.sort();
        assert_eq!(got, want);
    }

    #[test]
    fn gap_examples() {
        let g = cusp_gap(&c(0, 1), &c(1, 2)).unwrap();
        assert_eq!(g, BigRational::new(1.into(), 2.into()));
        assert_eq!(cusp_gap(&c(1, 3), &c(1, 2)).unwrap(), BigRational::new(1.into(), 6.into()));
        assert_eq!(cusp_gap(&c(1, 3), &c(2, 3)).unwrap(), BigRational::new(1.into(), 3.into()));
    }

    #[test]
    fn neighbor_step_examples() {
        let one = BigInt::one();
        assert_eq!(neighbor_step(&c(1, 1), &c(0, 1), &one).unwrap(), c(1, 2));
        assert_eq!(neighbor_step(&c(1, 2), &c(1, 1), &one).unwrap(), c(2, 3));
        let n = neighbor_step(&c(1, 2), &c(1, 1), &BigInt::from(3)).unwrap();
        assert_eq!(n.height(), BigInt::from(49));
    }

    #[test]
    fn parse_and_print() {
        let x: Cusp = " -6/4 ".parse().unwrap();
        assert_eq!(x.to_string(), "-3/2");
        assert!("1/x".parse::<Cusp>().is_err());
    }
}
