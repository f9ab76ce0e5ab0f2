use cuspflow_core::geometry::*;
use cuspflow_core::lattice::{enumerate_cusps, realize, IntMatrix, Region};
use cuspflow_core::Cusp;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use proptest::prelude::*;

fn point() -> impl Strategy<Value = PlanePoint> {
    (0.05f64..20.0, -5.0f64..5.0).prop_map(|(h, x)| FramePoint::new(h, [x]).unwrap())
}

fn word() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0usize..3, 0..8)
}

fn matrix(w: &[usize]) -> IntMatrix {
    let gens = [
        IntMatrix::new(1, 1, 0, 1).unwrap(),
        IntMatrix::new(1, -1, 0, 1).unwrap(),
        IntMatrix::new(0, -1, 1, 0).unwrap(),
    ];
    w.iter().fold(IntMatrix::new(1, 0, 0, 1).unwrap(), |g, &k| g.mul(&gens[k]))
}

fn cusp() -> impl Strategy<Value = Cusp> {
    (-100i64..100, 1i64..50).prop_map(|(p, q)| Cusp::new(p, q).unwrap())
}

fn boundary() -> impl Strategy<Value = BoundaryPoint<1>> {
    prop_oneof![Just(BoundaryPoint::Infinity), (-4.0f64..4.0).prop_map(|x| BoundaryPoint::Finite([x]))]
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / (1.0 + b.abs())
}

proptest! {
    #[test]
    fn weyl_is_an_involution(p in point()) {
        let q = weyl_apply(&weyl_apply(&p));
        prop_assert!(rel(q.height, p.height) < 1e-12 && rel(q.base[0], p.base[0]) < 1e-12);
    }

    #[test]
    fn generators_are_isometries(p in point(), q in point()) {
        for g in [Moebius::translation(1.0), Moebius::SIGMA] {
            let d = hyperbolic_distance(&moebius_apply(&g, &p).unwrap(), &moebius_apply(&g, &q).unwrap());
            prop_assert!(rel(d, hyperbolic_distance(&p, &q)) < 1e-10);
        }
    }

    #[test]
    fn busemann_cocycle(xi in boundary(), x in point(), y in point(), z in point()) {
        let b = |p: &PlanePoint, q: &PlanePoint| busemann(&xi, p, q);
        prop_assert!((b(&x, &y) + b(&y, &z) - b(&x, &z)).abs() < 1e-12);
        prop_assert!((b(&x, &y) + b(&y, &x)).abs() < 1e-12);
    }

    #[test]
    fn busemann_equivariance(xi in boundary(), x in point(), y in point(), w in word()) {
        let g = matrix(&w).to_moebius();
        let lhs = busemann(&g.apply_boundary(&xi), &moebius_apply(&g, &x).unwrap(), &moebius_apply(&g, &y).unwrap());
        prop_assert!(rel(lhs, busemann(&xi, &x, &y)) < 1e-9);
    }

    #[test]
    fn gromov_scaled_by_busemann_heights_is_invariant(a in cusp(), b in cusp(), w in word()) {
        prop_assume!(a != b);
        let g = matrix(&w);
        let (ga, gb) = (g.apply(&a), g.apply(&b));
        prop_assume!(!ga.is_infinite() && !gb.is_infinite());
        let o = FramePoint::origin();
        let inv = |a: &Cusp, b: &Cusp| {
            let d = gromov_dist(&a.location(), &b.location(), &o).unwrap();
            let h = realize(a).unwrap().busemann_height() * realize(b).unwrap().busemann_height();
            d * d * h.to_f64().unwrap()
        };
        let (l, r) = (inv(&ga, &gb), inv(&a, &b));
        prop_assert!((l - r).abs() / r < 1e-8, "{} vs {}", l, r);
    }

    #[test]
    fn heights_are_at_least_one(c in cusp()) {
        prop_assert!(c.height() >= BigInt::from(1));
    }
}

#[test]
fn gromov_metric_is_comparable_to_euclidean() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    let o = FramePoint::origin();
    let (mut lo, mut hi) = (f64::INFINITY, 0f64);
    for _ in 0..10_000 {
        let (x, y): (f64, f64) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        if x == y {
            continue;
        }
        let d = gromov_dist(&BoundaryPoint::Finite([x]), &BoundaryPoint::Finite([y]), &o).unwrap();
        let r = d / (x - y).abs();
        lo = lo.min(r);
        hi = hi.max(r);
    }
    let c = hi.max(1.0 / lo);
    println!("d_o / |x - y| in [{lo:.4}, {hi:.4}], C = {c:.4}");
    assert!(c <= 10.0);
}

#[test]
fn busemann_height_within_five_heights() {
    for c in enumerate_cusps(&Region::ints(-2, 2, true), &BigInt::from(10_000)) {
        let ht = realize(&c).unwrap().busemann_height();
        assert!(c.height() <= ht && ht <= c.height() * 5, "{c}");
    }
}

#[test]
fn bruhat_height_matches_cusp_height() {
    for c in enumerate_cusps(&Region::ints(-2, 2, true), &BigInt::from(10_000)) {
        let g = realize(&c).unwrap().to_moebius();
        let h = bruhat_decompose(&g).height();
        let want = c.height().to_f64().unwrap();
        assert!((h - want).abs() <= 1e-12 * want, "{c}: {h}");
    }
}

#[test]
fn enumeration_matches_brute_force() {
    let found = enumerate_cusps(&Region::ints(0, 1, true), &BigInt::from(10_000));
    let mut brute = Vec::new();
    for q in 1i64..=100 {
        for p in 0..=q {
            if p.gcd(&q) == 1 {
                brute.push(Cusp::new(p, q).unwrap());
            }
        }
    }
    let mut found = found;
    found.sort();
    brute.sort();
    assert_eq!(found, brute);
}

#[test]
fn separation_of_cusps_with_small_height() {
    let cs = enumerate_cusps(&Region::ints(0, 1, true), &BigInt::from(400));
    for (k, a) in cs.iter().enumerate() {
        for b in &cs[k + 1..] {
            let d = a.value().unwrap() - b.value().unwrap();
            let v = &d * &d * num_rational::BigRational::from_integer(a.height() * b.height());
            assert!(v >= num_rational::BigRational::from_integer(1.into()), "{a} {b}");
        }
    }
}
