//! Points, isometries and circles of the Poincaré disk.

use num_complex::Complex64;
use serde::Serialize;

use crate::geometry::inversive_distance;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Hyperbolic distance between two points of the open unit disk.
pub fn distance(z: Complex64, w: Complex64) -> f64 {
    let gz = (1.0 - z.norm()) * (1.0 + z.norm());
    let gw = (1.0 - w.norm()) * (1.0 + w.norm());
    2.0 * ((z - w).norm() / (gz * gw).sqrt()).asinh()
}

/// Point at hyperbolic distance `d` from the origin in direction `angle`.
pub fn polar(d: f64, angle: f64) -> Complex64 {
    Complex64::from_polar((0.5 * d).tanh(), angle)
}

/// `z -> (rot z + shift) / (1 + conj(shift) rot z)` with `|rot| = 1`, `|shift| < 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Isometry {
    rot: Complex64,
    shift: Complex64,
}

impl Isometry {
    pub fn identity() -> Self {
        Isometry { rot: ONE, shift: Complex64::new(0.0, 0.0) }
    }

    /// Takes the origin to `from` and the positive real axis onto the geodesic ray towards `toward`.
    pub fn frame(from: Complex64, toward: Complex64) -> Self {
        let w = (toward - from) / (ONE - from.conj() * toward);
        let n = w.norm();
        let rot = if n > 0.0 { w / n } else { ONE };
        Isometry { rot, shift: from }
    }

    pub fn apply(&self, z: Complex64) -> Complex64 {
        let w = self.rot * z;
        (w + self.shift) / (ONE + self.shift.conj() * w)
    }

    pub fn apply_inverse(&self, z: Complex64) -> Complex64 {
        (z - self.shift) / (ONE - self.shift.conj() * z) * self.rot.conj()
    }
}

/// A closed hyperbolic disk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HypCircle {
    pub center: Complex64,
    pub radius: f64,
}

/// Intersection of two closed disks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Lens {
    Empty,
    /// Externally tangent disks.
    Point(Complex64),
    /// One disk inside the other.
    Disk(HypCircle),
    /// Boundary crossing points and the midpoints of the two bounding arcs.
    Region { crossings: [Complex64; 2], midpoints: [Complex64; 2] },
}

impl HypCircle {
    pub fn new(center: Complex64, radius: f64) -> Self {
        HypCircle { center, radius }
    }

    pub fn contains(&self, z: Complex64, tol: f64) -> bool {
        distance(self.center, z) <= self.radius + tol
    }

    pub fn strictly_contains(&self, z: Complex64, tol: f64) -> bool {
        distance(self.center, z) < self.radius - tol
    }

    /// `(cosh d - cosh r cosh r') / (sinh r sinh r')`; 1 for external tangency.
    pub fn inversive_distance(&self, other: &HypCircle) -> f64 {
        let d = distance(self.center, other.center);
        inversive_distance(d, self.radius, other.radius).unwrap_or(f64::NAN)
    }

    /// Exterior intersection angle with `other`, clamped to `[0, pi]`.
    pub fn intersection_angle(&self, other: &HypCircle) -> f64 {
        let d = distance(self.center, other.center);
        angle_from_distance(d, self.radius, other.radius)
    }

    /// Center and radius of the same set viewed as a Euclidean circle.
    pub fn euclidean(&self) -> (Complex64, f64) {
        let s = self.center.norm();
        let dir = if s > 0.0 { self.center / s } else { ONE };
        let d = 2.0 * s.atanh();
        let far = (0.5 * (d + self.radius)).tanh();
        let near = (0.5 * (d - self.radius)).tanh();
        (dir * (0.5 * (far + near)), 0.5 * (far - near))
    }

    pub fn lens(&self, other: &HypCircle) -> Lens {
        let (ra, rb) = (self.radius, other.radius);
        let d = distance(self.center, other.center);
        let frame = Isometry::frame(self.center, other.center);
        if d > ra + rb {
            return Lens::Empty;
        }
        if d == ra + rb {
            return Lens::Point(frame.apply(polar(ra, 0.0)));
        }
        if d + rb <= ra {
            return Lens::Disk(*other);
        }
        if d + ra <= rb {
            return Lens::Disk(*self);
        }
        let cos_alpha = (ra.cosh() * d.cosh() - rb.cosh()) / (ra.sinh() * d.sinh());
        let alpha = cos_alpha.clamp(-1.0, 1.0).acos();
        Lens::Region {
            crossings: [frame.apply(polar(ra, alpha)), frame.apply(polar(ra, -alpha))],
            midpoints: [frame.apply(polar(ra, 0.0)), frame.apply(polar(d - rb, 0.0))],
        }
    }
}

/// Exterior intersection angle of circles of radii `r`, `s` whose centers are `d` apart.
///
/// Near tangency `1 - I` is formed directly from `r + s - d` so the angle keeps
/// full relative accuracy in that difference.
pub fn angle_from_distance(d: f64, r: f64, s: f64) -> f64 {
    let one_minus = 2.0 * (0.5 * (r + s + d)).sinh() * (0.5 * (r + s - d)).sinh() / (r.sinh() * s.sinh());
    if one_minus <= 0.0 {
        0.0
    } else if one_minus >= 2.0 {
        std::f64::consts::PI
    } else if one_minus < 1.0 {
        2.0 * (0.5 * one_minus).sqrt().asin()
    } else {
        (1.0 - one_minus).acos()
    }
}

/// Whether the lens `a ∩ b` lies in the closed disk `c`, up to `tol` in hyperbolic distance.
///
/// The lens is bounded by an arc of each circle. It lies in `c` when its two
/// corners and two arc midpoints do and no crossing of `c` with either circle
/// falls strictly inside the opposite disk.
pub fn lens_contained_in(a: &HypCircle, b: &HypCircle, c: &HypCircle, tol: f64) -> bool {
    match a.lens(b) {
        Lens::Empty => false,
        Lens::Point(p) => c.contains(p, tol),
        Lens::Disk(inner) => distance(c.center, inner.center) + inner.radius <= c.radius + tol,
        Lens::Region { crossings, midpoints } => {
            if !crossings.iter().chain(&midpoints).all(|p| c.contains(*p, tol)) {
                return false;
            }
            let escapes = |own: &HypCircle, other: &HypCircle| match own.lens(c) {
                Lens::Region { crossings, .. } => crossings.iter().any(|p| other.strictly_contains(*p, tol)),
                _ => false,
            };
            !(escapes(a, b) || escapes(b, a))
        }
    }
}
