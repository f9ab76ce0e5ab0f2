//! Big-number helpers shared by the exact modules.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::real::{ln, powi};

/// Natural logarithm of `|n|`, valid far outside the `f64` range.
///
/// Returns `-inf` for zero.
pub fn ln_big(n: &BigInt) -> f64 {
    ln_biguint(n.magnitude())
}

pub fn ln_biguint(n: &BigUint) -> f64 {
    if n.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = n.bits();
    if bits <= 900 {
        return ln(n.to_f64().unwrap_or(f64::INFINITY));
    }
    let shift = bits - 64;
    let top = (n >> shift).to_f64().unwrap_or(f64::INFINITY);
    ln(top) + (shift as f64) * core::f64::consts::LN_2
}

/// Natural logarithm of `|r|`.
pub fn ln_ratio(r: &BigRational) -> f64 {
    ln_big(r.numer()) - ln_big(r.denom())
}

/// `r` as `f64`, going through logarithms when the parts overflow.
pub fn ratio_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    let (n, d) = (r.numer().magnitude(), r.denom().magnitude());
    // integer quotient with 64+ significant bits, then rescale by 2^-k
    let k = d.bits() as i64 - n.bits() as i64 + 66;
    let q = if k >= 0 { (n << k as usize) / d } else { n / (d << (-k) as usize) };
    let mut v = q.to_f64().unwrap_or(f64::INFINITY);
    let mut e = -k;
    while e > 0 {
        let s = e.min(1000);
        v *= powi(2.0, s as i32);
        e -= s;
    }
    while e < 0 {
        let s = (-e).min(1000);
        v /= powi(2.0, s as i32);
        e += s;
    }
    if r.is_negative() {
        -v
    } else {
        v
    }
}

/// Exact rational value of a finite `f64`.
pub fn ratio_from_f64(x: f64) -> Option<BigRational> {
    if !x.is_finite() {
        return None;
    }
    if x == 0.0 {
        return Some(BigRational::zero());
    }
    let bits = x.to_bits();
    let sign = if bits >> 63 == 0 { Sign::Plus } else { Sign::Minus };
    let exp_bits = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & 0x000f_ffff_ffff_ffff;
    let (mant, exp) = if exp_bits == 0 { (frac, -1074) } else { (frac | (1u64 << 52), exp_bits - 1075) };
    let m = BigInt::from_biguint(sign, BigUint::from(mant));
    let r = if exp >= 0 {
        BigRational::from_integer(m << (exp as usize))
    } else {
        BigRational::new(m, BigInt::one() << ((-exp) as usize))
    };
    Some(r)
}

/// Floor of the square root of a non-negative integer.
pub fn isqrt(n: &BigInt) -> BigInt {
    if n.is_negative() {
        return BigInt::zero();
    }
    BigInt::from_biguint(Sign::Plus, n.magnitude().sqrt())
}

/// Ceiling of the square root of a non-negative integer.
pub fn isqrt_ceil(n: &BigInt) -> BigInt {
    let r = isqrt(n);
    if &r * &r == *n {
        r
    } else {
        r + 1
    }
}

pub fn floor_ratio(r: &BigRational) -> BigInt {
    r.numer().div_floor(r.denom())
}

pub fn ceil_ratio(r: &BigRational) -> BigInt {
    r.numer().div_ceil(r.denom())
}

/// Extended gcd on machine integers: returns `(g, x, y)` with `a x + b y = g`.
pub fn ext_gcd_i128(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

/// Extended gcd on big integers: returns `(g, x, y)` with `a x + b y = g`, `g >= 0`.
pub fn ext_gcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let e = a.extended_gcd(b);
    if e.gcd.is_negative() {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}

/// Euler's totient by trial division. Only used on small arguments.
pub fn totient(mut n: u64) -> u64 {
    let mut result = n;
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

/// Distinct prime factors of `n` by trial division.
pub fn prime_factors(mut n: u64) -> alloc::vec::Vec<u64> {
    let mut out = alloc::vec::Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Number of integers in `[lo, hi]` coprime to `n` (inclusion–exclusion over
/// the distinct primes of `n`).
pub fn count_coprime_in(lo: i128, hi: i128, primes: &[u64]) -> i128 {
    if hi < lo {
        return 0;
    }
    let k = primes.len();
    let mut total = 0i128;
    for mask in 0u32..(1u32 << k) {
        let mut d = 1i128;
        for (bit, &p) in primes.iter().enumerate() {
            if mask & (1 << bit) != 0 {
                d *= p as i128;
            }
        }
        let c = hi.div_euclid(d) - (lo - 1).div_euclid(d);
        if mask.count_ones() % 2 == 0 {
            total += c;
        } else {
            total -= c;
        }
    }
    total
}

/// Big-integer variant of [`count_coprime_in`]; `primes` are those of a small modulus.
pub fn count_coprime_in_big(lo: &BigInt, hi: &BigInt, primes: &[u64]) -> BigInt {
    if hi < lo {
        return BigInt::zero();
    }
    let k = primes.len();
    let mut total = BigInt::zero();
    let lo1: BigInt = lo - 1;
    for mask in 0u32..(1u32 << k) {
        let mut d = BigInt::one();
        for (bit, &p) in primes.iter().enumerate() {
            if mask & (1 << bit) != 0 {
                d *= p;
            }
        }
        let c = hi.div_floor(&d) - lo1.div_floor(&d);
        if mask.count_ones() % 2 == 0 {
            total += c;
        } else {
            total -= c;
        }
    }
    total
}

/// Ordinary least squares slope and intercept of `ys` against `xs`.
pub fn least_squares(xs: &[f64], ys: &[f64]) -> Option<(f64, f64)> {
    let n = xs.len();
    if n < 2 || ys.len() != n {
        return None;
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}
