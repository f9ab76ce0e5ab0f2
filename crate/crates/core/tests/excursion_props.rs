use cuspflow_core::arith::ln_ratio;
use cuspflow_core::excursion::{spectrum, spectrum_by_enumeration, SpectrumLimit};
use cuspflow_core::Direction;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

fn direction() -> impl Strategy<Value = Direction> {
    prop::collection::vec(1u32..40, 2..25).prop_map(|mut qs| {
        qs[0] = 0;
        Direction::from_quotients(qs.into_iter().map(BigInt::from).collect(), true).unwrap()
    })
}

fn theta() -> impl Strategy<Value = f64> {
    prop_oneof![Just(1.0), Just(2.0), 0.6f64..3.0]
}

proptest! {
    #[test]
    fn records_obey_vieta_peak_and_entry_laws(x in direction(), th in theta()) {
        let s = spectrum(&x, th, &SpectrumLimit::unbounded()).unwrap();
        let v = x.value().unwrap();
        for r in &s.records {
            prop_assert!(r.t_enter <= r.t_peak && r.t_peak <= r.t_exit);
            let d = (&v - r.cusp.value().unwrap()).abs();
            // the record lies in the horoball: 2θ h |x - a| ≤ 1
            let lhs = BigRational::from_integer(r.cusp.height()) * &d * cuspflow_core::arith::ratio_from_f64(2.0 * th).unwrap();
            prop_assert!(lhs <= BigRational::from_integer(1.into()));
            if d.is_zero() {
                continue;
            }
            let ln_d = ln_ratio(&d);
            prop_assert!((-r.t_enter - r.t_exit - 2.0 * ln_d).abs() < 1e-10);
            let peak_law = r.peak.ln() + 2f64.ln() + r.cusp.ln_height() + ln_d;
            prop_assert!(peak_law.abs() < 1e-12);
            let s2 = 2.0 * th * (r.cusp.ln_height() + ln_d).exp();
            if s2 <= 0.5 {
                let e = r.t_enter.exp() / (th * r.cusp.ln_height().exp());
                prop_assert!(e >= 1.0 - 1e-12 && e <= 2.0 / (1.0 + 0.75f64.sqrt()) + 1e-12, "{}", e);
            }
        }
    }

    #[test]
    fn consecutive_heights_follow_the_quotient(x in direction()) {
        let s = spectrum(&x, 1.0, &SpectrumLimit::unbounded()).unwrap();
        let qs = x.quotients();
        for w in s.records.windows(2) {
            if w[1].index != w[0].index + 1 {
                continue;
            }
            let m = &qs[w[1].index];
            if *m < BigInt::from(2) {
                continue;
            }
            let m = m.to_string().parse::<f64>().unwrap();
            let r = (w[1].cusp.ln_height() - w[0].cusp.ln_height()).exp() / (m * m);
            prop_assert!((0.25..=4.0).contains(&r), "{}", r);
        }
    }

    #[test]
    fn continued_fractions_match_enumeration(x in direction(), th in prop_oneof![Just(1.0), Just(2.0)]) {
        let h_max = 100_000u64;
        let s = spectrum(&x, th, &SpectrumLimit::height(h_max)).unwrap();
        let mut cf: Vec<_> = s.records.iter().map(|r| r.cusp.clone()).collect();
        cf.sort_by(|a, b| a.den().cmp(b.den()).then(a.cmp(b)));
        prop_assert_eq!(cf, spectrum_by_enumeration(&x.value().unwrap(), th, h_max).unwrap());
    }
}

#[test]
fn rational_spectra_include_tangent_cusps() {
    for q in 1i64..=60 {
        for p in 0..=q {
            let x = BigRational::new(p.into(), q.into());
            if x.denom() != &BigInt::from(q) {
                continue;
            }
            for th in [1.0, 1.5, 2.0] {
                let s = spectrum(&Direction::from_ratio(&x), th, &SpectrumLimit::height(100_000u64)).unwrap();
                let mut cf: Vec<_> = s.records.iter().map(|r| r.cusp.clone()).collect();
                cf.sort_by(|a, b| a.den().cmp(b.den()).then(a.cmp(b)));
                assert_eq!(cf, spectrum_by_enumeration(&x, th, 100_000).unwrap(), "x = {x}, theta = {th}");
            }
        }
    }
    let half = spectrum(&Direction::from_ratio(&BigRational::new(1.into(), 2.into())), 1.0, &SpectrumLimit::unbounded());
    let one = half.unwrap().records.into_iter().find(|r| r.cusp == cuspflow_core::Cusp::new(1, 1).unwrap()).unwrap();
    assert!(one.marginal && (one.peak - 1.0).abs() < 1e-12);
}
