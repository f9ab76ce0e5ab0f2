use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::arith::ln_ratio;
use crate::lattice::Cusp;
use crate::real::{exp, ln, log_add_exp, sqrt};
use crate::{Error, Result};

/// The excursion bump of a geodesic toward `x` in the horoball at one cusp:
/// `W(t) = e^{-t} / (h (d² + e^{-2t}))`, stored through `ln h` and `ln d`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bump {
    pub ln_h: f64,
    /// `-inf` when the direction is the cusp itself.
    pub ln_dist: f64,
}

impl Bump {
    pub fn new(ln_h: f64, ln_dist: f64) -> Self {
        Bump { ln_h, ln_dist }
    }

    pub fn from_floats(h: f64, dist: f64) -> Self {
        let ln_dist = if dist == 0.0 { f64::NEG_INFINITY } else { ln(dist) };
        Bump { ln_h: ln(h), ln_dist }
    }

    pub fn ln_value(&self, t: f64) -> f64 {
        -t - self.ln_h - log_add_exp(2.0 * self.ln_dist, -2.0 * t)
    }

    pub fn value(&self, t: f64) -> f64 {
        exp(self.ln_value(t))
    }

    pub fn hits_cusp(&self) -> bool {
        self.ln_dist == f64::NEG_INFINITY
    }

    /// `(t_peak, peak) = (log(1/d), 1/(2 h d))`.
    pub fn peak(&self) -> Result<(f64, f64)> {
        if self.hits_cusp() {
            return Err(Error::HitsCusp("profile grows without bound".into()));
        }
        let t = -self.ln_dist;
        Ok((t, exp(-core::f64::consts::LN_2 - self.ln_h - self.ln_dist)))
    }

    /// Entry and exit times of the horoball `{W ≥ θ}`; `None` if the bump stays below.
    pub fn crossing_times(&self, theta: f64) -> Option<(f64, f64)> {
        if self.hits_cusp() {
            // W = e^t / h reaches θ once and stays.
            return Some((ln(theta) + self.ln_h, f64::INFINITY));
        }
        let ln_r = core::f64::consts::LN_2 + ln(theta) + self.ln_h + self.ln_dist;
        if ln_r > 0.0 {
            return None;
        }
        let r = exp(ln_r);
        let disc = sqrt((1.0 - r * r).max(0.0));
        // larger root s+ = (1 + disc) / (2 θ h) of θ h s² - s + θ h d² = 0
        let ln_splus = ln(1.0 + disc) - core::f64::consts::LN_2 - ln(theta) - self.ln_h;
        let t_enter = -ln_splus;
        // Vieta: s+ s- = d²
        let t_exit = -2.0 * self.ln_dist - t_enter;
        Some((t_enter, t_exit))
    }

    /// `τ` with `f_a(τ) = f_b(τ)`; two distinct bumps cross at most once.
    pub fn crossing_with(&self, o: &Bump) -> Option<f64> {
        // s² = (h_b d_b² - h_a d_a²) / (h_a - h_b), s = e^{-t}
        let a_m = self.ln_h + 2.0 * self.ln_dist;
        let b_m = o.ln_h + 2.0 * o.ln_dist;
        let (num_sign, ln_num) = signed_log_diff(b_m, a_m);
        let (den_sign, ln_den) = signed_log_diff(self.ln_h, o.ln_h);
        if num_sign == 0 || den_sign == 0 || num_sign != den_sign {
            return None;
        }
        let ln_s = 0.5 * (ln_num - ln_den);
        Some(-ln_s)
    }
}

/// `(sign(e^a - e^b), ln|e^a - e^b|)`.
fn signed_log_diff(a: f64, b: f64) -> (i8, f64) {
    if a == b {
        return (0, f64::NEG_INFINITY);
    }
    let (hi, lo, s) = if a > b { (a, b, 1) } else { (b, a, -1) };
    if lo == f64::NEG_INFINITY {
        return (s, hi);
    }
    (s, hi + crate::real::ln_1p(-exp(lo - hi)))
}

/// Bump of the geodesic toward an exact rational `x` at cusp `a`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExcursionProfile {
    pub cusp: Cusp,
    pub dist: BigRational,
    pub bump: Bump,
}

impl ExcursionProfile {
    pub fn new(x: &BigRational, a: &Cusp) -> Result<Self> {
        let v = a.value().ok_or_else(|| Error::InvalidInput("profile needs a finite cusp".into()))?;
        let dist = (x - v).abs();
        let ln_dist = if dist.is_zero() { f64::NEG_INFINITY } else { ln_ratio(&dist) };
        Ok(ExcursionProfile { cusp: a.clone(), dist, bump: Bump::new(a.ln_height(), ln_dist) })
    }

    pub fn value(&self, t: f64) -> f64 {
        self.bump.value(t)
    }

    pub fn peak(&self) -> Result<(f64, f64)> {
        self.bump.peak().map_err(|_| Error::HitsCusp(alloc::format!("{}", self.cusp)))
    }

    pub fn crossing_times(&self, theta: f64) -> Option<(f64, f64)> {
        self.bump.crossing_times(theta)
    }
}

/// `W_a(x, t)` for a rational direction.
pub fn profile_value(x: &BigRational, a: &Cusp, t: f64) -> Result<f64> {
    Ok(ExcursionProfile::new(x, a)?.value(t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }

    #[test]
    fn value_examples() {
        let a = Cusp::new(0, 1).unwrap();
        let w = profile_value(&rat(1, 10), &a, ln(10.0)).unwrap();
        assert!((w - 5.0).abs() < 1e-12);
        let b = Cusp::new(1, 2).unwrap();
        let w = profile_value(&rat(51, 100), &b, 0.0).unwrap();
        assert!((w - 1.0 / (4.0 * (1e-4 + 1.0))).abs() < 1e-15);
        let on = profile_value(&rat(1, 2), &b, 3.0).unwrap();
        assert!((on - exp(3.0) / 4.0).abs() < 1e-12);
    }

    #[test]
    fn peak_examples() {
        let (t, v) = Bump::from_floats(1.0, 0.1).peak().unwrap();
        assert!((t - ln(10.0)).abs() < 1e-15 && (v - 5.0).abs() < 1e-12);
        let (t, v) = Bump::from_floats(4.0, 1.0 / 24.0).peak().unwrap();
        assert!((t - ln(24.0)).abs() < 1e-14 && (v - 3.0).abs() < 1e-12);
        let (t2, v2) = Bump::from_floats(4.0, 1.0 / 12.0).peak().unwrap();
        assert!((t2 - (t - ln(2.0))).abs() < 1e-14 && (v2 - v / 2.0).abs() < 1e-12);
        assert!(Bump::from_floats(4.0, 0.0).peak().is_err());
    }

    #[test]
    fn crossing_examples() {
        let (te, tx) = Bump::from_floats(1.0, 0.1).crossing_times(1.0).unwrap();
        assert!((exp(-te) - (1.0 + sqrt(0.96)) / 2.0).abs() < 1e-12);
        assert!((exp(-tx) - (1.0 - sqrt(0.96)) / 2.0).abs() < 1e-12);
        assert!((exp(-te) * exp(-tx) - 0.01).abs() < 1e-14);
        assert!(Bump::from_floats(1.0, 0.6).crossing_times(1.0).is_none());
        let (te, tx) = Bump::from_floats(1.0, 0.5).crossing_times(1.0).unwrap();
        assert!((te - tx).abs() < 1e-7 && (exp(-te) - 0.5).abs() < 1e-7);
    }

    #[test]
    fn bumps_cross_once() {
        let a = Bump::from_floats(4.0, 1e-3);
        let b = Bump::from_floats(100.0, 1e-5);
        let t = a.crossing_with(&b).unwrap();
        assert!((a.ln_value(t) - b.ln_value(t)).abs() < 1e-9);
        assert_eq!(b.crossing_with(&a).map(|s| (s - t).abs() < 1e-12), Some(true));
    }
}
