//! Horospherical coordinates on hyperbolic space `H^n`, `D = n - 1`.
//!
//! Points are `(e^t, x)` with `x ∈ R^D`. Matrix convention for `n = 2`:
//! `a(t) = diag(e^{t/2}, e^{-t/2})`, `u(x) = (1 x; 0 1)`, `σ = (0 -1; 1 0)`,
//! so that `a(t)·i` sits at height `e^t`.

use crate::real::{abs, acosh, exp, ln, sqrt};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FramePoint<const D: usize> {
    pub height: f64,
    pub base: [f64; D],
}

/// Point of the upper half-plane.
pub type PlanePoint = FramePoint<1>;

impl<const D: usize> FramePoint<D> {
    pub fn new(height: f64, base: [f64; D]) -> Result<Self> {
        if !(height > 0.0) || !height.is_finite() {
            return Err(Error::InvalidInput(alloc::format!("height {height} must be positive")));
        }
        Ok(FramePoint { height, base })
    }

    /// The basepoint `o = (1, 0)`.
    pub fn origin() -> Self {
        FramePoint { height: 1.0, base: [0.0; D] }
    }

    pub fn base_norm_sq(&self) -> f64 {
        self.base.iter().map(|v| v * v).sum()
    }
}

fn dist_sq<const D: usize>(a: &[f64; D], b: &[f64; D]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BoundaryPoint<const D: usize> {
    Finite([f64; D]),
    Infinity,
}

/// `σ(h, x) = (h, -x) / (h² + |x|²)`.
pub fn weyl_apply<const D: usize>(p: &FramePoint<D>) -> FramePoint<D> {
    let denom = p.height * p.height + p.base_norm_sq();
    let mut base = p.base;
    for v in base.iter_mut() {
        *v = -*v / denom;
    }
    FramePoint { height: p.height / denom, base }
}

pub fn left_translate<const D: usize>(v: &[f64; D], p: &FramePoint<D>) -> FramePoint<D> {
    let mut base = p.base;
    for (b, s) in base.iter_mut().zip(v) {
        *b += s;
    }
    FramePoint { height: p.height, base }
}

pub fn left_dilate<const D: usize>(t: f64, p: &FramePoint<D>) -> FramePoint<D> {
    let s = exp(t);
    let mut base = p.base;
    for b in base.iter_mut() {
        *b *= s;
    }
    FramePoint { height: s * p.height, base }
}

/// `cosh d = 1 + (|x_p - x_q|² + (h_p - h_q)²) / (2 h_p h_q)`.
pub fn hyperbolic_distance<const D: usize>(p: &FramePoint<D>, q: &FramePoint<D>) -> f64 {
    let num = dist_sq(&p.base, &q.base) + (p.height - q.height) * (p.height - q.height);
    if num == 0.0 {
        return 0.0;
    }
    acosh(1.0 + num / (2.0 * p.height * q.height))
}

/// Busemann function `B_ξ(p, q)`, in closed form.
pub fn busemann<const D: usize>(xi: &BoundaryPoint<D>, p: &FramePoint<D>, q: &FramePoint<D>) -> f64 {
    match xi {
        BoundaryPoint::Infinity => ln(q.height / p.height),
        BoundaryPoint::Finite(x) => {
            let fp = (dist_sq(&p.base, x) + p.height * p.height) / p.height;
            let fq = (dist_sq(&q.base, x) + q.height * q.height) / q.height;
            ln(fp) - ln(fq)
        }
    }
}

/// Depth along the ray at which Gromov products are evaluated.
pub const RAY_DEPTH: f64 = 40.0;

/// Point at depth `t` on the vertical geodesic ray from `o`'s base toward `ξ`.
pub fn ray_point<const D: usize>(xi: &BoundaryPoint<D>, t: f64) -> FramePoint<D> {
    match xi {
        BoundaryPoint::Infinity => FramePoint { height: exp(t), base: [0.0; D] },
        BoundaryPoint::Finite(x) => FramePoint { height: exp(-t), base: *x },
    }
}

/// Gromov metric `d_o(ξ1, ξ2)`, evaluated on the ray to `ray`.
pub fn gromov_dist_on_ray<const D: usize>(
    xi1: &BoundaryPoint<D>,
    xi2: &BoundaryPoint<D>,
    o: &FramePoint<D>,
    ray: &BoundaryPoint<D>,
) -> Result<f64> {
    if matches!((xi1, xi2), (BoundaryPoint::Infinity, BoundaryPoint::Infinity)) {
        return Err(Error::InvalidInput("both boundary points are infinite".into()));
    }
    if xi1 == xi2 {
        return Ok(0.0);
    }
    let z = ray_point(ray, RAY_DEPTH);
    let s = busemann(xi1, o, &z) + busemann(xi2, o, &z);
    Ok(exp(-0.5 * s))
}

/// Gromov metric `d_o(ξ1, ξ2)` along the ray to `ξ1`.
pub fn gromov_dist<const D: usize>(xi1: &BoundaryPoint<D>, xi2: &BoundaryPoint<D>, o: &FramePoint<D>) -> Result<f64> {
    gromov_dist_on_ray(xi1, xi2, o, xi1)
}

/// Real 2×2 unimodular matrix acting on the upper half-plane, up to sign.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Moebius {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Moebius {
    pub const IDENTITY: Moebius = Moebius { a: 1.0, b: 0.0, c: 0.0, d: 1.0 };
    pub const SIGMA: Moebius = Moebius { a: 0.0, b: -1.0, c: 1.0, d: 0.0 };

    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let det = a * d - b * c;
        if !(det > 0.0) {
            return Err(Error::InvalidInput(alloc::format!("determinant {det} is not positive")));
        }
        let s = sqrt(det);
        let m = Moebius { a: a / s, b: b / s, c: c / s, d: d / s };
        Ok(m)
    }

    pub fn translation(x: f64) -> Self {
        Moebius { a: 1.0, b: x, c: 0.0, d: 1.0 }
    }

    pub fn dilation(t: f64) -> Self {
        Moebius { a: exp(t / 2.0), b: 0.0, c: 0.0, d: exp(-t / 2.0) }
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn compose(&self, o: &Moebius) -> Moebius {
        Moebius {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }

    pub fn inverse(&self) -> Moebius {
        Moebius { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    /// Entrywise equality up to the global sign.
    pub fn approx_eq(&self, o: &Moebius, tol: f64) -> bool {
        let close = |s: f64| {
            abs(self.a - s * o.a) <= tol
                && abs(self.b - s * o.b) <= tol
                && abs(self.c - s * o.c) <= tol
                && abs(self.d - s * o.d) <= tol
        };
        close(1.0) || close(-1.0)
    }

    /// Image of a boundary point.
    pub fn apply_boundary(&self, xi: &BoundaryPoint<1>) -> BoundaryPoint<1> {
        match xi {
            BoundaryPoint::Infinity => {
                if self.c == 0.0 {
                    BoundaryPoint::Infinity
                } else {
                    BoundaryPoint::Finite([self.a / self.c])
                }
            }
            BoundaryPoint::Finite([x]) => {
                let den = self.c * x + self.d;
                if den == 0.0 {
                    BoundaryPoint::Infinity
                } else {
                    BoundaryPoint::Finite([(self.a * x + self.b) / den])
                }
            }
        }
    }
}

/// Fractional-linear action `z ↦ (az + b)/(cz + d)` with `z = x + i h`.
pub fn moebius_apply(g: &Moebius, p: &PlanePoint) -> Result<PlanePoint> {
    let (x, h) = (p.base[0], p.height);
    let re = g.c * x + g.d;
    let im = g.c * h;
    let n = re * re + im * im;
    let height = g.det() * h / n;
    if !(height > 0.0) || !height.is_finite() {
        return Err(Error::Internal(alloc::format!("degenerate image height {height}")));
    }
    let base = ((g.a * x + g.b) * re + g.a * g.c * h * h) / n;
    Ok(FramePoint { height, base: [base] })
}

/// `u(x) σ u(y) a(r)` or `u(y) a(r)`; the `M` factor is trivial for `n = 2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BruhatForm {
    Generic { x: f64, y: f64, r: f64 },
    Parabolic { y: f64, r: f64 },
}

impl BruhatForm {
    pub fn compose(&self) -> Moebius {
        match *self {
            BruhatForm::Generic { x, y, r } => {
                let (e, ei) = (exp(r / 2.0), exp(-r / 2.0));
                Moebius { a: x * e, b: (x * y - 1.0) * ei, c: e, d: y * ei }
            }
            BruhatForm::Parabolic { y, r } => {
                let (e, ei) = (exp(r / 2.0), exp(-r / 2.0));
                Moebius { a: e, b: y * ei, c: 0.0, d: ei }
            }
        }
    }

    /// `e^r`, the height of the cusp `g·∞` for the generic cell.
    pub fn height(&self) -> f64 {
        match *self {
            BruhatForm::Generic { r, .. } | BruhatForm::Parabolic { r, .. } => exp(r),
        }
    }
}

pub fn bruhat_decompose(g: &Moebius) -> BruhatForm {
    if g.c != 0.0 {
        let s = if g.c > 0.0 { 1.0 } else { -1.0 };
        let (a, c, d) = (s * g.a, s * g.c, s * g.d);
        BruhatForm::Generic { x: a / c, y: d * c, r: 2.0 * ln(c) }
    } else {
        let s = if g.a > 0.0 { 1.0 } else { -1.0 };
        let (a, b) = (s * g.a, s * g.b);
        BruhatForm::Parabolic { y: b * a, r: 2.0 * ln(a) }
    }
}

/// `h̃(γ∞) = exp(B_∞(γ⁻¹o, o)) = a² + c²`.
pub fn busemann_height(g: &Moebius) -> f64 {
    g.a * g.a + g.c * g.c
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(h: f64, x: f64) -> PlanePoint {
        FramePoint { height: h, base: [x] }
    }

    #[test]
    fn weyl_examples() {
        assert_eq!(weyl_apply(&pt(1.0, 0.0)), pt(1.0, 0.0));
        assert_eq!(weyl_apply(&pt(2.0, 0.0)), pt(0.5, 0.0));
        assert_eq!(weyl_apply(&pt(1.0, 1.0)), pt(0.5, -0.5));
    }

    #[test]
    fn translate_and_dilate() {
        let p = left_dilate(ln(2.0), &pt(1.0, 1.0));
        assert!((p.height - 2.0).abs() < 1e-15 && (p.base[0] - 2.0).abs() < 1e-15);
        assert_eq!(left_translate(&[3.0], &pt(5.0, 1.0)), pt(5.0, 4.0));
        assert_eq!(left_dilate(0.0, &pt(5.0, 1.0)), pt(5.0, 1.0));
    }

    #[test]
    fn moebius_matches_generators() {
        let p = pt(0.7, -0.3);
        let s = moebius_apply(&Moebius::SIGMA, &p).unwrap();
        let w = weyl_apply(&p);
        assert!((s.height - w.height).abs() < 1e-14 && (s.base[0] - w.base[0]).abs() < 1e-14);
        let t = moebius_apply(&Moebius::translation(2.5), &p).unwrap();
        assert_eq!(t, left_translate(&[2.5], &p));
        let d = moebius_apply(&Moebius::dilation(0.8), &p).unwrap();
        let e = left_dilate(0.8, &p);
        assert!((d.height - e.height).abs() < 1e-14 && (d.base[0] - e.base[0]).abs() < 1e-14);
    }

    #[test]
    fn bruhat_examples() {
        assert_eq!(bruhat_decompose(&Moebius::SIGMA), BruhatForm::Generic { x: 0.0, y: 0.0, r: 0.0 });
        assert_eq!(bruhat_decompose(&Moebius::translation(1.0)), BruhatForm::Parabolic { y: 1.0, r: 0.0 });
        let g = Moebius { a: 1.0, b: 0.0, c: 2.0, d: 1.0 };
        let f = bruhat_decompose(&g);
        match f {
            BruhatForm::Generic { x, .. } => assert_eq!(x, 0.5),
            _ => panic!("expected generic cell"),
        }
        assert!((f.height() - 4.0).abs() < 1e-12);
        assert!(f.compose().approx_eq(&g, 1e-12));
    }

    #[test]
    fn busemann_examples() {
        let o = pt(1.0, 0.0);
        assert!((busemann(&BoundaryPoint::Infinity, &o, &pt(exp(2.0), 0.0)) - 2.0).abs() < 1e-15);
        let q = pt(1.0, 1.0);
        assert_eq!(busemann(&BoundaryPoint::Finite([0.3]), &q, &q), 0.0);
    }

    #[test]
    fn distance_examples() {
        assert_eq!(hyperbolic_distance(&pt(1.0, 0.0), &pt(1.0, 0.0)), 0.0);
        assert!((hyperbolic_distance(&pt(1.0, 0.0), &pt(exp(2.0), 0.0)) - 2.0).abs() < 1e-12);
        assert!((hyperbolic_distance(&pt(1.0, 0.0), &pt(1.0, 1.0)) - acosh(1.5)).abs() < 1e-15);
    }

    #[test]
    fn gromov_rejects_double_infinity() {
        let o = FramePoint::origin();
        assert!(gromov_dist::<1>(&BoundaryPoint::Infinity, &BoundaryPoint::Infinity, &o).is_err());
        assert_eq!(gromov_dist(&BoundaryPoint::Finite([0.0]), &BoundaryPoint::Finite([0.0]), &o), Ok(0.0));
    }

    #[test]
    fn busemann_height_examples() {
        assert_eq!(busemann_height(&Moebius::IDENTITY), 1.0);
        assert_eq!(busemann_height(&Moebius { a: 1.0, b: 0.0, c: 2.0, d: 1.0 }), 5.0);
        assert_eq!(busemann_height(&Moebius::translation(1.0)), 1.0);
    }
}
