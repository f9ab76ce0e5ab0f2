use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::cf::{Bracket, Convergent, Direction};
use super::profile::Bump;
use crate::arith::{ln_big, ln_ratio, ratio_from_f64, ratio_to_f64};
use crate::lattice::Cusp;
use crate::real::{abs, exp, ln};
use crate::{Error, Result};

/// Relative distance to the threshold below which a record is flagged marginal.
pub const MARGINAL_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct ExcursionRecord {
    pub cusp: Cusp,
    /// Index of the convergent in the continued fraction of the direction.
    pub index: usize,
    pub t_enter: f64,
    pub t_peak: f64,
    pub t_exit: f64,
    pub peak: f64,
    pub bump: Bump,
    /// Peak within `MARGINAL_TOL` of the threshold.
    pub marginal: bool,
}

impl ExcursionRecord {
    pub fn ln_height(&self) -> f64 {
        self.bump.ln_h
    }

    pub fn ln_dist(&self) -> f64 {
        self.bump.ln_dist
    }

    pub fn hits_cusp(&self) -> bool {
        self.bump.hits_cusp()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    pub direction: Direction,
    pub records: Vec<ExcursionRecord>,
    pub theta: f64,
    /// The certified prefix ran out before the limit was reached.
    pub truncated: bool,
}

/// Stopping rule for [`spectrum`].
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SpectrumLimit {
    pub h_max: Option<BigInt>,
    pub depth: Option<usize>,
}

impl SpectrumLimit {
    pub fn height(h_max: impl Into<BigInt>) -> Self {
        SpectrumLimit { h_max: Some(h_max.into()), depth: None }
    }

    pub fn depth(depth: usize) -> Self {
        SpectrumLimit { h_max: None, depth: Some(depth) }
    }

    pub fn unbounded() -> Self {
        SpectrumLimit::default()
    }
}

fn theta_rational(theta: f64) -> Result<BigRational> {
    if !(theta > 0.0) {
        return Err(Error::InvalidInput(alloc::format!("threshold {theta} must be positive")));
    }
    ratio_from_f64(theta).ok_or_else(|| Error::InvalidInput("threshold must be finite".into()))
}

/// `ln(ζ + ρ)` with `ζ` possibly beyond `f64` range.
fn ln_sum(zeta: &BigRational, rho: f64) -> f64 {
    let z = ratio_to_f64(zeta);
    if z.is_finite() && z < 1e300 {
        ln(z + rho)
    } else {
        ln_ratio(zeta)
    }
}

/// Cusps visited by the geodesic toward `x` at level `θ`, via continued fractions.
///
/// Convergent `p_k/q_k` qualifies iff `ζ_{k+1} + q_{k-1}/q_k ≥ 2θ`, where `ζ` is
/// the complete quotient; this is `2θ q_k² |x - p_k/q_k| ≤ 1`.
pub fn spectrum(x: &Direction, theta: f64, limit: &SpectrumLimit) -> Result<Spectrum> {
    let two_theta = theta_rational(theta)? * BigRational::from_integer(2.into());
    let conv = x.convergents();
    let zetas = x.complete_quotients();
    let mut records = Vec::new();
    let mut truncated = false;
    let mut q_prev = BigInt::zero();
    for (k, c) in conv.iter().enumerate() {
        if let Some(d) = limit.depth {
            if k >= d {
                break;
            }
        }
        if k > 0 && zetas.get(k).is_none() {
            let alt = alternate_record(&conv[k - 1], c, &two_theta, theta, k);
            records.extend(alt.filter(|r| limit.h_max.as_ref().map_or(true, |h| r.cusp.height() <= *h)));
        }
        if let Some(h) = &limit.h_max {
            if &c.q * &c.q > *h {
                break;
            }
        }
        let ln_h = 2.0 * ln_big(&c.q);
        let rho = BigRational::new(q_prev.clone(), c.q.clone());
        q_prev = c.q.clone();
        let Some(z) = zetas.get(k) else {
            // x itself
            records.push(ExcursionRecord {
                cusp: c.cusp(),
                index: k,
                t_enter: ln(theta) + ln_h,
                t_peak: f64::INFINITY,
                t_exit: f64::INFINITY,
                peak: f64::INFINITY,
                bump: Bump::new(ln_h, f64::NEG_INFINITY),
                marginal: false,
            });
            break;
        };
        let Bracket { lo, hi } = z;
        let lo_s = lo + &rho;
        let pass_lo = lo_s >= two_theta;
        let pass_hi = match hi {
            None => true,
            Some(h) => h + &rho >= two_theta,
        };
        if pass_lo != pass_hi {
            truncated = true;
            break;
        }
        if !pass_lo {
            continue;
        }
        let zeta_mid = match hi {
            Some(h) => (lo + h) / BigRational::from_integer(2.into()),
            None => lo.clone(),
        };
        if hi.is_none() {
            // Tail unknown beyond this point: the distance is not certified.
            truncated = true;
            break;
        }
        let ln_s = ln_sum(&zeta_mid, ratio_to_f64(&rho));
        let ln_dist = -ln_h - ln_s;
        let bump = Bump::new(ln_h, ln_dist);
        let (t_enter, t_exit) = bump.crossing_times(theta).unwrap_or((-ln_dist, -ln_dist));
        let peak = exp(ln_s - core::f64::consts::LN_2);
        records.push(ExcursionRecord {
            cusp: c.cusp(),
            index: k,
            t_enter,
            t_peak: -ln_dist,
            t_exit,
            peak,
            bump,
            marginal: abs(peak / theta - 1.0) <= MARGINAL_TOL,
        });
    }
    records.sort_by(|a, b| a.t_enter.total_cmp(&b.t_enter));
    Ok(Spectrum { direction: x.clone(), records, theta, truncated })
}

/// For an exact `x = p_n/q_n`, the extra convergent `(p_n - p_{n-1}) / (q_n - q_{n-1})`
/// of the expansion `[.., a_n - 1, 1]`; it qualifies iff `2θ q' ≤ q_n`.
fn alternate_record(
    prev: &Convergent,
    c: &Convergent,
    two_theta: &BigRational,
    theta: f64,
    k: usize,
) -> Option<ExcursionRecord> {
    let q_alt = &c.q - &prev.q;
    // a last quotient of 1 makes the other expansion repeat an earlier convergent
    if c.quotient.is_one()
        || two_theta * BigRational::from_integer(q_alt.clone()) > BigRational::from_integer(c.q.clone())
    {
        return None;
    }
    let ln_dist = -ln_big(&c.q) - ln_big(&q_alt);
    let bump = Bump::new(2.0 * ln_big(&q_alt), ln_dist);
    let (t_enter, t_exit) = bump.crossing_times(theta).unwrap_or((-ln_dist, -ln_dist));
    let peak = exp(ln_big(&c.q) - ln_big(&q_alt) - core::f64::consts::LN_2);
    Some(ExcursionRecord {
        cusp: Cusp::from_reduced(&c.p - &prev.p, q_alt),
        index: k,
        t_enter,
        t_peak: -ln_dist,
        t_exit,
        peak,
        bump,
        marginal: abs(peak / theta - 1.0) <= MARGINAL_TOL,
    })
}

/// Cusps `p/q` with `q² ≤ h_max` and `2θ q² |x - p/q| ≤ 1`, by direct search over `q`.
pub fn spectrum_by_enumeration(x: &BigRational, theta: f64, h_max: u64) -> Result<Vec<Cusp>> {
    let two_theta = theta_rational(theta)? * BigRational::from_integer(2.into());
    let q_max = crate::arith::isqrt(&BigInt::from(h_max));
    let mut out = Vec::new();
    let mut q = BigInt::one();
    while q <= q_max {
        let qx = x * BigRational::from_integer(q.clone());
        let f = qx.floor().to_integer();
        for p in [f.clone(), f + 1] {
            if !p.gcd(&q).is_one() {
                continue;
            }
            let err = (&qx - BigRational::from_integer(p.clone())).abs();
            // 2θ q |qx - p| ≤ 1
            if &two_theta * BigRational::from_integer(q.clone()) * err <= BigRational::one() {
                out.push(Cusp::from_reduced(p, q.clone()));
            }
        }
        q += 1;
    }
    out.sort_by(|a, b| a.den().cmp(b.den()).then(a.cmp(b)));
    out.dedup();
    Ok(out)
}

/// Per-pair comparison `|x - a_p| √(h_p h_{p+1})` and the time between excursions.
#[derive(Clone, Debug, PartialEq)]
pub struct GapReport {
    pub ratios: Vec<f64>,
    pub time_gaps: Vec<f64>,
    /// Every ratio lies in `[1/2, 2]`.
    pub within_bounds: bool,
}

pub fn consecutive_gap_check(s: &Spectrum) -> Result<GapReport> {
    if s.records.len() < 2 {
        return Err(Error::InvalidInput("spectrum needs at least two records".into()));
    }
    let mut ratios = Vec::new();
    let mut time_gaps = Vec::new();
    for w in s.records.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if a.hits_cusp() {
            continue;
        }
        ratios.push(exp(a.ln_dist() + 0.5 * (a.ln_height() + b.ln_height())));
        time_gaps.push(b.t_enter - a.t_exit);
    }
    let within_bounds = ratios.iter().all(|&r| (0.5..=2.0).contains(&r));
    Ok(GapReport { ratios, time_gaps, within_bounds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::{String, ToString};
    use alloc::vec;

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }

    #[test]
    fn rational_spectrum_ends_at_x() {
        let x = Direction::from_i64(2, 7).unwrap();
        let s = spectrum(&x, 1.0, &SpectrumLimit::unbounded()).unwrap();
        let last = s.records.last().unwrap();
        assert_eq!(last.cusp, Cusp::new(2, 7).unwrap());
        assert!(last.peak.is_infinite());
        assert!(!s.truncated);
        // 0/1 at distance 2/7 ≤ 1/2 qualifies, 1/3 at 1/21 ≤ 1/18 qualifies
        let cusps: Vec<_> = s.records.iter().map(|r| r.cusp.to_string()).collect();
        assert_eq!(cusps, ["0/1", "1/3", "2/7"]);
    }

    #[test]
    fn golden_spectrum_every_convergent_qualifies() {
        let x = Direction::from_quadratic(&BigInt::from(-1), &BigInt::from(5), &BigInt::from(2), 40).unwrap();
        let s = spectrum(&x, 1.0, &SpectrumLimit::height(BigInt::from(10u64).pow(12))).unwrap();
        assert!(!s.truncated);
        let qs: Vec<String> = s.records.iter().map(|r| r.cusp.den().to_string()).collect();
        assert_eq!(&qs[..6], ["1", "2", "3", "5", "8", "13"]);
        for r in &s.records {
            // peak ≈ (φ + 1/φ)/2 = √5/2
            assert!((r.peak - 5f64.sqrt() / 2.0).abs() < 0.2, "{}", r.peak);
        }
        let g = consecutive_gap_check(&s).unwrap();
        assert!(g.within_bounds);
    }

    #[test]
    fn near_half_records_half_with_exact_peak() {
        let x = rat(1, 2) + rat(1, 1_000_000);
        let s = spectrum(&Direction::from_ratio(&x), 1.0, &SpectrumLimit::unbounded()).unwrap();
        let r = s.records.iter().find(|r| r.cusp == Cusp::new(1, 2).unwrap()).unwrap();
        assert!((r.peak - 125_000.0).abs() < 1e-6);
        assert!(r.t_enter < r.t_peak && r.t_peak < r.t_exit);
    }

    #[test]
    fn enumeration_agrees_on_small_rational() {
        for (p, q) in [(2, 7), (355, 113), (17, 1000), (99991, 100003)] {
            let x = rat(p, q);
            for theta in [1.0, 2.0] {
                let a: Vec<Cusp> = spectrum(&Direction::from_ratio(&x), theta, &SpectrumLimit::height(1_000_000u64))
                    .unwrap()
                    .records
                    .into_iter()
                    .map(|r| r.cusp)
                    .collect();
                let b = spectrum_by_enumeration(&x, theta, 1_000_000).unwrap();
                assert_eq!(a, b, "x = {p}/{q}, θ = {theta}");
            }
        }
    }

    #[test]
    fn truncated_prefix_flags() {
        let x = Direction::from_quotients(vec![0.into(), 3.into(), 5.into()], false).unwrap();
        let s = spectrum(&x, 1.0, &SpectrumLimit::unbounded()).unwrap();
        assert!(s.truncated);
    }
}
