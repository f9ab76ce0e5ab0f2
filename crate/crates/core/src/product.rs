//! Diagonal geodesics on products: joint height, switch events, finite-horizon
//! divergence classification and box counting.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use rand_core::RngCore;

use crate::arith::least_squares;
use crate::excursion::{spectrum, Bump, Direction, Spectrum, SpectrumLimit};
use crate::lattice::Cusp;
use crate::real::{exp, floor, ln};
use crate::{Error, Result};

/// Directions `x_1..x_k`, one per modular factor.
#[derive(Clone, Debug, PartialEq)]
pub struct DirectionTuple {
    pub components: Vec<Direction>,
}

impl DirectionTuple {
    pub fn new(components: Vec<Direction>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidInput("a tuple needs at least one component".into()));
        }
        Ok(DirectionTuple { components })
    }

    pub fn k(&self) -> usize {
        self.components.len()
    }
}

/// One maximal interval of the joint envelope carried by a single bump.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment {
    pub t0: f64,
    pub t1: f64,
    pub component: usize,
    /// Index into that component's records.
    pub record: usize,
}

/// `W(x_1..x_k, t) = max_i W_i(x_i, t)` with each `W_i` the upper envelope of
/// the component's excursion bumps.
#[derive(Clone, Debug, PartialEq)]
pub struct JointProfile {
    pub spectra: Vec<Spectrum>,
}

impl JointProfile {
    pub fn new(xs: &DirectionTuple, theta: f64) -> Result<Self> {
        let spectra = xs
            .components
            .iter()
            .map(|x| spectrum(x, theta, &SpectrumLimit::unbounded()))
            .collect::<Result<Vec<_>>>()?;
        Ok(JointProfile { spectra })
    }

    pub fn from_spectra(spectra: Vec<Spectrum>) -> Result<Self> {
        if spectra.is_empty() {
            return Err(Error::InvalidInput("a tuple needs at least one component".into()));
        }
        Ok(JointProfile { spectra })
    }

    /// `ln W_i(t)`; `-inf` for a component without records.
    pub fn ln_component(&self, i: usize, t: f64) -> f64 {
        self.spectra[i].records.iter().map(|r| r.bump.ln_value(t)).fold(f64::NEG_INFINITY, f64::max)
    }

    /// `(ln W, argmax)`, ties to the lowest index.
    pub fn ln_value(&self, t: f64) -> (f64, usize) {
        let mut best = (f64::NEG_INFINITY, 0);
        for i in 0..self.spectra.len() {
            let v = self.ln_component(i, t);
            if v > best.0 {
                best = (v, i);
            }
        }
        best
    }

    pub fn value(&self, t: f64) -> (f64, usize) {
        let (v, i) = self.ln_value(t);
        (exp(v), i)
    }

    fn bumps(&self) -> Vec<(usize, usize, Bump)> {
        let mut out = Vec::new();
        for (i, s) in self.spectra.iter().enumerate() {
            for (r, rec) in s.records.iter().enumerate() {
                out.push((i, r, rec.bump));
            }
        }
        out
    }

    /// The upper envelope on `[t0, t1]` as maximal single-bump segments.
    pub fn envelope(&self, t0: f64, t1: f64) -> Vec<Segment> {
        let bumps = self.bumps();
        if bumps.is_empty() || !(t1 > t0) {
            return Vec::new();
        }
        let mut cuts = vec![t0, t1];
        for a in 0..bumps.len() {
            for b in a + 1..bumps.len() {
                if let Some(t) = bumps[a].2.crossing_with(&bumps[b].2) {
                    if t > t0 && t < t1 {
                        cuts.push(t);
                    }
                }
            }
        }
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let mut segs: Vec<Segment> = Vec::new();
        for w in cuts.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            let mut best = (f64::NEG_INFINITY, 0usize);
            for (k, (_, _, b)) in bumps.iter().enumerate() {
                let v = b.ln_value(mid);
                if v > best.0 {
                    best = (v, k);
                }
            }
            let (component, record, _) = bumps[best.1];
            match segs.last_mut() {
                Some(s) if s.component == component && s.record == record => s.t1 = w[1],
                _ => segs.push(Segment { t0: w[0], t1: w[1], component, record }),
            }
        }
        segs
    }

    fn bump(&self, s: &Segment) -> Bump {
        self.spectra[s.component].records[s.record].bump
    }

    /// Local minima `(t, ln W)` of the envelope strictly inside `(t0, t1)`.
    pub fn local_minima(&self, t0: f64, t1: f64) -> Vec<(f64, f64)> {
        let segs = self.envelope(t0, t1);
        let mut out = Vec::new();
        for w in segs.windows(2) {
            let t = w[0].t1;
            let (l, r) = (self.bump(&w[0]), self.bump(&w[1]));
            if falling(&l, t) && !falling(&r, t) {
                out.push((t, l.ln_value(t).max(r.ln_value(t))));
            }
        }
        out
    }
}

fn falling(b: &Bump, t: f64) -> bool {
    !b.hits_cusp() && t > -b.ln_dist
}

/// `W(x_1..x_k, t)` and the component attaining it.
pub fn joint_profile(p: &JointProfile, t: f64) -> (f64, usize) {
    p.value(t)
}

/// A change of the component carrying the joint maximum.
#[derive(Clone, Debug, PartialEq)]
pub struct SwitchEvent {
    pub t: f64,
    pub value: f64,
    pub from: usize,
    pub to: usize,
    /// Record of `from` following the one in force before the switch.
    pub cusp_from: Option<Cusp>,
    /// Record of `to` taking over.
    pub cusp_to: Cusp,
    pub local_min: bool,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct MinimaTrace {
    pub events: Vec<SwitchEvent>,
}

impl MinimaTrace {
    /// `value² h(a′)/h(b)` per event with a known `b`.
    pub fn value_law(&self) -> Vec<f64> {
        self.events
            .iter()
            .filter_map(|e| {
                let b = e.cusp_from.as_ref()?;
                Some(exp(2.0 * ln(e.value) + e.cusp_to.ln_height() - b.ln_height()))
            })
            .collect()
    }

    /// `e^{2t} / (h(b) h(a′))` per event with a known `b`.
    pub fn time_law(&self) -> Vec<f64> {
        self.events
            .iter()
            .filter_map(|e| {
                let b = e.cusp_from.as_ref()?;
                Some(exp(2.0 * e.t - e.cusp_to.ln_height() - b.ln_height()))
            })
            .collect()
    }
}

/// All switches of the joint argmax in `(0, t_max]`.
pub fn minima_trace(p: &JointProfile, t_max: f64) -> Result<MinimaTrace> {
    if !t_max.is_finite() {
        return Err(Error::InvalidInput("t_max must be finite".into()));
    }
    let segs = p.envelope(0.0, t_max);
    let mut events = Vec::new();
    for w in segs.windows(2) {
        let (l, r) = (&w[0], &w[1]);
        if l.component == r.component {
            continue;
        }
        let t = l.t1;
        let (lb, rb) = (p.bump(l), p.bump(r));
        let ln_v = lb.ln_value(t).max(rb.ln_value(t));
        let recs = &p.spectra[l.component].records;
        events.push(SwitchEvent {
            t,
            value: exp(ln_v),
            from: l.component,
            to: r.component,
            cusp_from: recs.get(l.record + 1).map(|x| x.cusp.clone()),
            cusp_to: p.spectra[r.component].records[r.record].cusp.clone(),
            local_min: falling(&lb, t) && !falling(&rb, t),
        });
    }
    Ok(MinimaTrace { events })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Divergence {
    Escaping,
    Recurrent,
    Undecided,
}

/// Finite-horizon surrogate for `W > 1/δ eventually` on the window `[t0, t1]`.
///
/// The envelope minimum over each half is the least of its interior local
/// minima and its endpoint values.
pub fn classify(p: &JointProfile, delta: f64, window: (f64, f64)) -> Result<Divergence> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::InvalidInput("delta must lie in (0, 1]".into()));
    }
    let (t0, t1) = window;
    if !(t1 > t0) {
        return Err(Error::InvalidInput("empty classification window".into()));
    }
    let mid = 0.5 * (t0 + t1);
    let half_min = |a: f64, b: f64| {
        p.local_minima(a, b)
            .into_iter()
            .map(|(_, v)| v)
            .chain([p.ln_value(a).0, p.ln_value(b).0])
            .fold(f64::INFINITY, f64::min)
    };
    let thr = -ln(delta);
    let first = half_min(t0, mid);
    let last = half_min(mid, t1);
    Ok(if last > thr {
        Divergence::Escaping
    } else if first < thr && last < thr {
        Divergence::Recurrent
    } else {
        Divergence::Undecided
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoxCount {
    pub slope: f64,
    pub intercept: f64,
    /// `(ε, N(ε))` per scale.
    pub counts: Vec<(f64, usize)>,
    pub residuals: Vec<f64>,
    /// All points coincide; the slope is reported as 0.
    pub degenerate: bool,
}

/// Slope of `ln N(ε)` against `ln(1/ε)` over grid boxes of side `ε`.
pub fn box_count_dimension<P: AsRef<[f64]>>(points: &[P], scales: &[f64]) -> Result<BoxCount> {
    if points.len() < 1000 {
        return Err(Error::InvalidInput("box counting needs at least 1000 points".into()));
    }
    if scales.len() < 4 || scales.iter().any(|&e| !(e > 0.0)) {
        return Err(Error::InvalidInput("box counting needs at least 4 positive scales".into()));
    }
    let dim = points[0].as_ref().len();
    if points.iter().any(|p| p.as_ref().len() != dim) {
        return Err(Error::InvalidInput("points have mixed dimensions".into()));
    }
    let first = points[0].as_ref();
    let degenerate = points.iter().all(|p| p.as_ref() == first);
    let mut counts = Vec::with_capacity(scales.len());
    for &eps in scales {
        let mut cells: BTreeMap<Vec<i64>, ()> = BTreeMap::new();
        for p in points {
            cells.insert(p.as_ref().iter().map(|x| floor(x / eps) as i64).collect(), ());
        }
        counts.push((eps, cells.len()));
    }
    if degenerate {
        return Ok(BoxCount { slope: 0.0, intercept: 0.0, residuals: vec![0.0; counts.len()], counts, degenerate });
    }
    let xs: Vec<f64> = counts.iter().map(|(e, _)| -ln(*e)).collect();
    let ys: Vec<f64> = counts.iter().map(|(_, n)| ln(*n as f64)).collect();
    let (slope, intercept) =
        least_squares(&xs, &ys).ok_or_else(|| Error::InvalidInput("scales must be distinct".into()))?;
    let residuals = xs.iter().zip(&ys).map(|(x, y)| y - (slope * x + intercept)).collect();
    Ok(BoxCount { slope, intercept, counts, residuals, degenerate })
}

/// Product of digit-restricted Cantor sets in base `base`: coordinate `i`
/// uses only the digits `digits[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DigitSet {
    pub base: u32,
    pub digits: Vec<Vec<u32>>,
}

impl DigitSet {
    pub fn similarity_dimension(&self) -> f64 {
        self.digits.iter().map(|d| ln(d.len() as f64) / ln(self.base as f64)).sum()
    }

    /// One point per cylinder of depth `coarse`, each refined to depth `depth`
    /// by uniformly random digits.
    pub fn sample<R: RngCore + ?Sized>(&self, coarse: u32, depth: u32, rng: &mut R) -> Vec<Vec<f64>> {
        let k = self.digits.len();
        let b = self.base as f64;
        let per_level: usize = self.digits.iter().map(Vec::len).product();
        let cells = per_level.pow(coarse);
        let mut out = Vec::with_capacity(cells);
        for mut idx in 0..cells {
            let mut pt = vec![0.0; k];
            let mut scale = 1.0;
            for level in 0..depth {
                scale /= b;
                for (i, ds) in self.digits.iter().enumerate() {
                    let d = if level < coarse {
                        let d = ds[idx % ds.len()];
                        idx /= ds.len();
                        d
                    } else {
                        ds[rng.next_u32() as usize % ds.len()]
                    };
                    pt[i] += d as f64 * scale;
                }
            }
            out.push(pt);
        }
        out
    }
}

/// `ε_j = ratio^j` for `j ∈ [from, to]`.
pub fn geometric_scales(ratio: f64, from: i32, to: i32) -> Vec<f64> {
    (from..=to).map(|j| crate::real::powi(ratio, j)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::excursion::profile_value;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use rand::SeedableRng;

    fn golden(terms: usize) -> Direction {
        Direction::from_quadratic(&BigInt::from(-1), &BigInt::from(5), &BigInt::from(2), terms).unwrap()
    }

    fn silver(terms: usize) -> Direction {
        Direction::from_quadratic(&BigInt::from(-1), &BigInt::from(2), &BigInt::from(1), terms).unwrap()
    }

    #[test]
    fn single_component_is_the_profile() {
        let x = DirectionTuple::new(vec![Direction::from_i64(2, 7).unwrap()]).unwrap();
        let p = JointProfile::new(&x, 1.0).unwrap();
        for t in [0.5, 1.5, 3.0] {
            let direct = p.ln_component(0, t);
            assert_eq!(p.ln_value(t), (direct, 0));
        }
        assert!(minima_trace(&p, 10.0).unwrap().events.is_empty());
    }

    #[test]
    fn identical_components_tie_to_first() {
        let x = DirectionTuple::new(vec![golden(30), golden(30)]).unwrap();
        let p = JointProfile::new(&x, 1.0).unwrap();
        for t in [1.0, 4.0, 9.0] {
            assert_eq!(p.value(t).1, 0);
        }
        assert!(minima_trace(&p, 20.0).unwrap().events.is_empty());
        assert_eq!(classify(&p, 0.25, (2.0, 20.0)).unwrap(), Divergence::Recurrent);
    }

    #[test]
    fn staggered_rationals_match_direct_evaluation() {
        let (a, b) = (BigRational::new(2.into(), 7.into()), BigRational::new(5.into(), 13.into()));
        let xs = DirectionTuple::new(vec![Direction::from_ratio(&a), Direction::from_ratio(&b)]).unwrap();
        let p = JointProfile::new(&xs, 1.0).unwrap();
        for t in [0.3, 1.1, 2.0, 2.7] {
            let mut best = f64::NEG_INFINITY;
            for (x, s) in [(&a, &p.spectra[0]), (&b, &p.spectra[1])] {
                for r in &s.records {
                    best = best.max(profile_value(x, &r.cusp, t).unwrap());
                }
            }
            assert!((p.value(t).0 / best - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn switch_laws_for_golden_against_sparse() {
        let sparse: Vec<BigInt> = [0u32, 10, 100, 10_000].iter().map(|&a| BigInt::from(a)).collect();
        let x2 = Direction::from_quotients(sparse, false).unwrap();
        let xs = DirectionTuple::new(vec![golden(60), x2]).unwrap();
        let p = JointProfile::new(&xs, 1.0).unwrap();
        let tr = minima_trace(&p, 20.0).unwrap();
        assert!(!tr.events.is_empty());
        for w in tr.events.windows(2) {
            assert!(w[0].t < w[1].t);
        }
        let checked: Vec<_> = tr.events.iter().filter(|e| e.local_min && e.cusp_from.is_some()).collect();
        assert!(checked.len() >= 2, "{:?}", tr.events);
        for e in checked {
            let b = e.cusp_from.as_ref().unwrap();
            let law = exp(2.0 * ln(e.value) + e.cusp_to.ln_height() - b.ln_height());
            assert!((1.0 / 16.0..=16.0).contains(&law), "{law}");
            let tl = exp(2.0 * e.t - e.cusp_to.ln_height() - b.ln_height());
            assert!((1.0 / 16.0..=16.0).contains(&tl), "{tl}");
        }
    }

    #[test]
    fn bounded_quotients_are_recurrent() {
        let xs = DirectionTuple::new(vec![golden(60), silver(60)]).unwrap();
        let p = JointProfile::new(&xs, 1.0).unwrap();
        assert_eq!(classify(&p, 0.25, (2.0, 30.0)).unwrap(), Divergence::Recurrent);
    }

    #[test]
    fn box_count_known_sets() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let seg = DigitSet { base: 10, digits: vec![(0..10).collect()] }.sample(4, 8, &mut rng);
        let scales = geometric_scales(0.5, 2, 10);
        assert!((box_count_dimension(&seg, &scales).unwrap().slope - 1.0).abs() < 0.05);
        let cantor = DigitSet { base: 3, digits: vec![vec![0, 2]] }.sample(10, 10, &mut rng);
        let scales3 = geometric_scales(1.0 / 3.0, 1, 8);
        let target = ln(2.0) / ln(3.0);
        assert!((box_count_dimension(&cantor, &scales3).unwrap().slope - target).abs() < 0.05);
        let prod = DigitSet { base: 3, digits: vec![(0..3).collect(), vec![0, 2]] }.sample(6, 10, &mut rng);
        let s = box_count_dimension(&prod, &geometric_scales(1.0 / 3.0, 1, 6)).unwrap().slope;
        assert!((s - 1.0 - target).abs() < 0.1, "{s}");
        let same = vec![[0.5, 0.5]; 1000];
        let d = box_count_dimension(&same, &scales).unwrap();
        assert!(d.degenerate && d.slope == 0.0);
    }
}
