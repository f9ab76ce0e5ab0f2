use alloc::vec;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand_core::RngCore;

use crate::arith::{isqrt, ratio_to_f64};
use crate::lattice::Cusp;
use crate::{Error, Result};

/// A point of the boundary line given by its continued fraction
/// `[a0; a1, a2, ...]`.
///
/// `exact` directions are rationals whose expansion terminates after the
/// stored quotients. Otherwise the quotients are a certified prefix of an
/// irrational (or unknown) tail.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Direction {
    quotients: Vec<BigInt>,
    exact: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Convergent {
    pub index: usize,
    pub quotient: BigInt,
    pub p: BigInt,
    pub q: BigInt,
}

impl Convergent {
    pub fn cusp(&self) -> Cusp {
        Cusp::from_reduced(self.p.clone(), self.q.clone())
    }

    pub fn height(&self) -> BigInt {
        &self.q * &self.q
    }
}

/// Bracket of a complete quotient `ζ_k = [a_k; a_{k+1}, ...]`; `hi = None` is `+∞`.
#[derive(Clone, Debug)]
pub(crate) struct Bracket {
    pub lo: BigRational,
    pub hi: Option<BigRational>,
}

impl Direction {
    pub fn from_ratio(x: &BigRational) -> Self {
        let (mut n, mut d) = (x.numer().clone(), x.denom().clone());
        let mut quotients = Vec::new();
        while !d.is_zero() {
            let (a, r) = n.div_mod_floor(&d);
            quotients.push(a);
            n = core::mem::replace(&mut d, r);
        }
        Direction { quotients, exact: true }
    }

    pub fn from_i64(p: i64, q: i64) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidInput("zero denominator".into()));
        }
        Ok(Direction::from_ratio(&BigRational::new(p.into(), q.into())))
    }

    /// `quotients[k] ≥ 1` for `k ≥ 1` is required.
    pub fn from_quotients(quotients: Vec<BigInt>, exact: bool) -> Result<Self> {
        if quotients.is_empty() {
            return Err(Error::InvalidInput("empty continued fraction".into()));
        }
        if quotients.iter().skip(1).any(|a| !a.is_positive()) {
            return Err(Error::InvalidInput("partial quotients after a0 must be positive".into()));
        }
        let mut quotients = quotients;
        if exact && quotients.len() > 1 && quotients.last().unwrap().is_one() {
            quotients.pop();
            *quotients.last_mut().unwrap() += 1;
        }
        Ok(Direction { quotients, exact })
    }

    /// The first `terms` quotients of `(P + √D) / Q` for non-square `D > 0`.
    pub fn from_quadratic(p: &BigInt, d: &BigInt, q: &BigInt, terms: usize) -> Result<Self> {
        if !d.is_positive() || q.is_zero() {
            return Err(Error::InvalidInput("need D > 0 and Q ≠ 0".into()));
        }
        let s = isqrt(d);
        if &s * &s == *d {
            return Err(Error::InvalidInput("D is a perfect square; use a rational".into()));
        }
        let (mut p, mut d, mut q) = (p.clone(), d.clone(), q.clone());
        if !(&d - &p * &p).is_multiple_of(&q) {
            let aq = q.abs();
            p *= &aq;
            d *= &aq * &aq;
            q *= &aq;
        }
        let s = isqrt(&d);
        let mut quotients = Vec::with_capacity(terms);
        for _ in 0..terms.max(1) {
            let a = if q.is_positive() { (&p + &s).div_floor(&q) } else { -((&p + &s).div_floor(&-&q)) - 1 };
            p = &a * &q - &p;
            q = (&d - &p * &p) / &q;
            quotients.push(a);
        }
        Ok(Direction { quotients, exact: false })
    }

    /// Quotients shared by every point of `[lo, hi]`.
    pub fn from_interval(lo: &BigRational, hi: &BigRational) -> Result<Self> {
        if lo >= hi {
            return Err(Error::InvalidInput("interval must have lo < hi".into()));
        }
        let a = Direction::from_ratio(lo);
        let b = Direction::from_ratio(hi);
        let mut quotients = Vec::new();
        // Both endpoints lie in the cylinder of the common prefix; the last shared
        // quotient is only certain if neither expansion ends right there.
        for (k, (x, y)) in a.quotients.iter().zip(&b.quotients).enumerate() {
            let last_a = k + 1 == a.quotients.len();
            let last_b = k + 1 == b.quotients.len();
            if x != y || last_a || last_b {
                break;
            }
            quotients.push(x.clone());
        }
        if quotients.is_empty() {
            return Err(Error::InvalidInput("interval straddles an integer".into()));
        }
        Ok(Direction { quotients, exact: false })
    }

    /// Uniform-ish rational in `[0, 1)` with a denominator of about `digits` decimal digits.
    pub fn random<R: RngCore + ?Sized>(rng: &mut R, digits: u32) -> Self {
        let scale = BigUint::from(10u32).pow(digits.max(1));
        let den = &scale + random_below(rng, &scale);
        let num = random_below(rng, &den);
        Direction::from_ratio(&BigRational::new(
            BigInt::from_biguint(Sign::Plus, num),
            BigInt::from_biguint(Sign::Plus, den),
        ))
    }

    pub fn quotients(&self) -> &[BigInt] {
        &self.quotients
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    /// Exact value, for rational directions.
    pub fn value(&self) -> Option<BigRational> {
        if !self.exact {
            return None;
        }
        let c = self.convergents();
        let last = c.last().unwrap();
        Some(BigRational::new(last.p.clone(), last.q.clone()))
    }

    /// Best available `f64` approximation.
    pub fn approx(&self) -> f64 {
        let c = self.convergents();
        let last = c.last().unwrap();
        ratio_to_f64(&BigRational::new(last.p.clone(), last.q.clone()))
    }

    pub fn convergents(&self) -> Vec<Convergent> {
        let mut out = Vec::with_capacity(self.quotients.len());
        let (mut p0, mut q0) = (BigInt::one(), BigInt::zero());
        let (mut p1, mut q1) = (BigInt::zero(), BigInt::one());
        for (k, a) in self.quotients.iter().enumerate() {
            let p = a * &p0 + &p1;
            let q = a * &q0 + &q1;
            p1 = core::mem::replace(&mut p0, p.clone());
            q1 = core::mem::replace(&mut q0, q.clone());
            out.push(Convergent { index: k, quotient: a.clone(), p, q });
        }
        out
    }

    /// Brackets for `ζ_1, ..., ζ_{M+1}` where `M + 1` is the number of quotients.
    /// Entry `k - 1` holds `ζ_k`; an exact direction has no `ζ_{M+1}`.
    pub(crate) fn complete_quotients(&self) -> Vec<Bracket> {
        let m = self.quotients.len();
        let mut out: Vec<Bracket> = vec![];
        let mut next = if self.exact { None } else { Some(Bracket { lo: BigRational::one(), hi: None }) };
        if let Some(b) = &next {
            out.push(b.clone());
        }
        for k in (1..m).rev() {
            let a = BigRational::from_integer(self.quotients[k].clone());
            let cur = match &next {
                None => Bracket { lo: a.clone(), hi: Some(a) },
                Some(nb) => {
                    let lo = match &nb.hi {
                        None => a.clone(),
                        Some(h) => &a + h.recip(),
                    };
                    let hi = Some(&a + nb.lo.recip());
                    Bracket { lo, hi }
                }
            };
            out.push(cur.clone());
            next = Some(cur);
        }
        out.reverse();
        out
    }
}

fn random_below<R: RngCore + ?Sized>(rng: &mut R, bound: &BigUint) -> BigUint {
    let bits = bound.bits();
    let words = bits.div_ceil(64) as usize;
    loop {
        let mut limbs = Vec::with_capacity(words * 2);
        for _ in 0..words {
            let w = rng.next_u64();
            limbs.push(w as u32);
            limbs.push((w >> 32) as u32);
        }
        let mut v = BigUint::new(limbs);
        let excess = (words as u64) * 64 - bits;
        v >>= excess;
        if &v < bound {
            return v;
        }
    }
}

/// Convergents of `x` up to `depth` terms; `truncated` is set when the
/// direction's certified prefix runs out first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CfExpansion {
    pub convergents: Vec<Convergent>,
    pub truncated: bool,
}

pub fn cf_expand(x: &Direction, depth: usize) -> Result<CfExpansion> {
    if depth == 0 {
        return Err(Error::InvalidInput("depth must be at least 1".into()));
    }
    let all = x.convergents();
    let truncated = !x.exact && depth > all.len();
    let convergents = all.into_iter().take(depth).collect();
    Ok(CfExpansion { convergents, truncated })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qs(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&a| BigInt::from(a)).collect()
    }

    #[test]
    fn golden_conjugate_expansion() {
        let x = Direction::from_quadratic(&BigInt::from(-1), &BigInt::from(5), &BigInt::from(2), 12).unwrap();
        assert_eq!(x.quotients()[0], BigInt::zero());
        assert!(x.quotients()[1..].iter().all(|a| a.is_one()));
        let cv = cf_expand(&x, 6).unwrap();
        let got: Vec<(i64, i64)> =
            cv.convergents[1..].iter().map(|c| (i64::try_from(&c.p).unwrap(), i64::try_from(&c.q).unwrap())).collect();
        assert_eq!(got, [(1, 1), (1, 2), (2, 3), (3, 5), (5, 8)]);
    }

    #[test]
    fn rational_expansions() {
        let x = Direction::from_i64(2, 7).unwrap();
        assert_eq!(x.quotients(), qs(&[0, 3, 2]).as_slice());
        let c = x.convergents();
        assert_eq!((c[1].p.clone(), c[1].q.clone()), (BigInt::one(), BigInt::from(3)));
        let h = Direction::from_i64(1, 2).unwrap();
        assert_eq!(h.quotients(), qs(&[0, 2]).as_slice());
        assert_eq!(h.value(), Some(BigRational::new(1.into(), 2.into())));
        let t = cf_expand(&h, 10).unwrap();
        assert!(!t.truncated);
        assert_eq!(t.convergents.len(), 2);
    }

    #[test]
    fn trailing_one_is_normalized() {
        let x = Direction::from_quotients(qs(&[0, 3, 1]), true).unwrap();
        assert_eq!(x.quotients(), qs(&[0, 4]).as_slice());
    }

    #[test]
    fn sqrt2_minus_one() {
        let x = Direction::from_quadratic(&BigInt::from(-1), &BigInt::from(2), &BigInt::one(), 8).unwrap();
        assert_eq!(x.quotients()[0], BigInt::zero());
        assert!(x.quotients()[1..].iter().all(|a| *a == BigInt::from(2)));
    }

    #[test]
    fn interval_prefix_is_certified() {
        // 3.14159265358979 .. 3.14159265358980
        let lo = BigRational::new(BigInt::from(314159265358979i64), BigInt::from(100000000000000i64));
        let hi = BigRational::new(BigInt::from(314159265358980i64), BigInt::from(100000000000000i64));
        let x = Direction::from_interval(&lo, &hi).unwrap();
        assert_eq!(&x.quotients()[..5], qs(&[3, 7, 15, 1, 292]).as_slice());
        assert!(!x.is_exact());
        assert!(cf_expand(&x, 100).unwrap().truncated);
    }

    #[test]
    fn complete_quotients_bracket_value() {
        let x = Direction::from_i64(2, 7).unwrap();
        let z = x.complete_quotients();
        // ζ1 = 7/2, ζ2 = 2
        assert_eq!(z[0].lo, BigRational::new(7.into(), 2.into()));
        assert_eq!(z[1].hi, Some(BigRational::from_integer(2.into())));
    }
}
