//! Hyperbolic geometry of two and three mutually intersecting circles.
//!
//! Radii are stored as `q = ln tanh(r/2)`. Every quantity that grows like `e^r`
//! is evaluated in a rescaled form (`cosh r ~ e^r * a`, `sinh r ~ e^r * x`) so
//! the formulas stay finite and cancellation free for radii up to the f64 range.

use std::f64::consts::PI;

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Angles within this distance of an admissibility boundary are reported as
/// degenerate rather than silently clamped.
pub const BOUNDARY_TOL: f64 = 1e-12;

/// Above this sum of radii side lengths are computed in logarithmic form.
const LOG_FORM_THRESHOLD: f64 = 350.0;

/// `q = ln tanh(r / 2)`, accurate for tiny and huge radii.
pub fn q_of_r(r: f64) -> f64 {
    if r > 1.0 {
        let e = (-r).exp();
        (-2.0 * e / (1.0 + e)).ln_1p()
    } else {
        (0.5 * r).tanh().ln()
    }
}

/// Inverse of [`q_of_r`].
pub fn r_of_q(q: f64) -> f64 {
    let t = q.exp();
    if t < 0.5 {
        t.ln_1p() - (-t).ln_1p()
    } else {
        t.ln_1p() - (-q.exp_m1()).ln()
    }
}

/// A radius in the coordinate `q = ln tanh(r/2) < 0`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct QCoordinate(f64);

impl QCoordinate {
    pub fn new(q: f64) -> Result<Self> {
        if q.is_finite() && q < 0.0 {
            Ok(QCoordinate(q))
        } else {
            Err(Error::Domain(format!("q coordinate must be negative and finite, got {q}")))
        }
    }

    pub fn from_radius(r: f64) -> Result<Self> {
        check_radius(r)?;
        QCoordinate::new(q_of_r(r))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn radius(self) -> f64 {
        r_of_q(self.0)
    }
}

fn check_radius(r: f64) -> Result<()> {
    if r.is_finite() && r > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("radius must be positive and finite, got {r}")))
    }
}

fn check_angle(theta: f64) -> Result<()> {
    if theta.is_finite() && (0.0..PI).contains(&theta) {
        Ok(())
    } else {
        Err(Error::Domain(format!("intersection angle must lie in [0, pi), got {theta}")))
    }
}

/// Rescaled hyperbolic functions of a radius: `cosh r = e^r a`, `sinh r = e^r x`.
#[derive(Debug, Clone, Copy)]
struct Scaled {
    r: f64,
    a: f64,
    x: f64,
    /// `e^{-2r}`
    e2: f64,
}

impl Scaled {
    fn new(r: f64) -> Self {
        let e2 = (-2.0 * r).exp();
        Scaled { r, a: 0.5 * (1.0 + e2), x: -0.5 * (-2.0 * r).exp_m1(), e2 }
    }
}

fn side_length_unchecked(rj: f64, rk: f64, theta: f64) -> f64 {
    let c = theta.cos();
    if rj + rk > LOG_FORM_THRESHOLD {
        let (sj, sk) = (Scaled::new(rj), Scaled::new(rk));
        let l0 = rj + rk + (2.0 * (sj.a * sk.a + c * sj.x * sk.x)).ln();
        return l0 - (-2.0 * l0).exp().ln_1p();
    }
    let hj = (0.5 * rj).sinh();
    let hk = (0.5 * rk).sinh();
    // cosh l - 1, written without subtracting nearly equal numbers
    let delta = 2.0 * hj * hj * rk.cosh() + 2.0 * hk * hk + c * rj.sinh() * rk.sinh();
    2.0 * (0.5 * delta.max(0.0)).sqrt().asinh()
}

/// Distance between the centers of two circles of radii `rj`, `rk` meeting at
/// exterior intersection angle `theta`.
pub fn side_length(rj: f64, rk: f64, theta: f64) -> Result<f64> {
    check_radius(rj)?;
    check_radius(rk)?;
    check_angle(theta)?;
    Ok(side_length_unchecked(rj, rk, theta))
}

/// Three exterior intersection angles. Entry `i` belongs to the pair of circles
/// other than circle `i`, i.e. to the side opposite vertex `i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleTriple(pub [f64; 3]);

impl AngleTriple {
    pub fn new(theta_i: f64, theta_j: f64, theta_k: f64) -> Result<Self> {
        for t in [theta_i, theta_j, theta_k] {
            check_angle(t)?;
        }
        Ok(AngleTriple([theta_i, theta_j, theta_k]))
    }

    pub fn get(&self, i: usize) -> f64 {
        self.0[i]
    }

    /// `gamma_ijk = cos T_i + cos T_j cos T_k` and its two rotations.
    pub fn gamma(&self) -> [f64; 3] {
        let c = self.0.map(f64::cos);
        [c[0] + c[1] * c[2], c[1] + c[2] * c[0], c[2] + c[0] * c[1]]
    }
}

/// Three positive radii.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadiusTriple(pub [f64; 3]);

impl RadiusTriple {
    pub fn new(r_i: f64, r_j: f64, r_k: f64) -> Result<Self> {
        for r in [r_i, r_j, r_k] {
            check_radius(r)?;
        }
        Ok(RadiusTriple([r_i, r_j, r_k]))
    }

    pub fn from_q(q: [f64; 3]) -> Result<Self> {
        let r = q.map(r_of_q);
        RadiusTriple::new(r[0], r[1], r[2])
    }
}

/// Outcome of the admissibility test for an angle triple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AngleCheck {
    pub admissible: bool,
    /// Smallest of `pi + T_c - T_a - T_b` over the three rotations.
    pub margin: f64,
    pub gamma: [f64; 3],
    pub gamma_nonnegative: bool,
}

/// Admissible iff `T_i + T_j + T_k <= pi`, or every pair satisfies
/// `T_a + T_b < pi + T_c`. Both comparisons are exact in floating point.
pub fn check_angle_triple(angles: &AngleTriple) -> AngleCheck {
    let t = angles.0;
    let sum = t[0] + t[1] + t[2];
    let pair = |a: usize, b: usize, c: usize| PI + t[c] - t[a] - t[b];
    let strict = t[0] + t[1] < PI + t[2] && t[1] + t[2] < PI + t[0] && t[2] + t[0] < PI + t[1];
    let margin = pair(0, 1, 2).min(pair(1, 2, 0)).min(pair(2, 0, 1));
    let gamma = angles.gamma();
    AngleCheck {
        admissible: sum <= PI || strict,
        margin,
        gamma,
        gamma_nonnegative: gamma.iter().all(|&g| g >= 0.0),
    }
}

/// Geodesic triangle spanned by the centers of three intersecting circles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThreeCircleConfig {
    pub radii: [f64; 3],
    pub angles: [f64; 3],
    /// `sides[i]` is the side opposite vertex `i`.
    pub sides: [f64; 3],
    /// Interior angles of the triangle at its three vertices.
    pub inner: [f64; 3],
    /// `ln K` where `K = sinh l_j sinh l_k sin inner_i` (the same for every rotation).
    pub ln_k: f64,
}

impl ThreeCircleConfig {
    pub fn k(&self) -> f64 {
        self.ln_k.exp()
    }

    /// `sinh l_j sinh l_k sin inner_i`, evaluated for one rotation.
    pub fn k_rotation(&self, i: usize) -> f64 {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        self.sides[j].sinh() * self.sides[k].sinh() * self.inner[i].sin()
    }
}

/// Scaled quantities shared by the configuration and its Jacobian.
struct Scaled3 {
    s: [Scaled; 3],
    cos: [f64; 3],
    /// `K^2 e^{-2 (r_i + r_j + r_k)}`
    p: f64,
}

fn scaled3(radii: &RadiusTriple, angles: &AngleTriple) -> Result<Scaled3> {
    let s = radii.0.map(Scaled::new);
    let cos = angles.0.map(f64::cos);
    let sin2 = angles.0.map(|t| t.sin().powi(2));
    let g = angles.gamma();
    let x2 = s.map(|v| v.x * v.x);
    let mut terms = [0.0; 7];
    for i in 0..3 {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        terms[i] = sin2[i] * x2[j] * x2[k] * s[i].e2;
        terms[3 + i] = 2.0 * g[i] * s[j].a * s[k].a * s[j].x * s[k].x * x2[i];
    }
    terms[6] = (2.0 + 2.0 * cos[0] * cos[1] * cos[2]) * x2[0] * x2[1] * x2[2];
    let p: f64 = terms.iter().sum();
    let scale: f64 = terms.iter().map(|t| t.abs()).sum();
    if !(p > 0.0) {
        if p < -BOUNDARY_TOL * scale || p.is_nan() {
            return Err(Error::TriangleDegenerate {
                face: None,
                detail: format!("three circles do not bound a triangle (scaled K^2 = {p:e})"),
            });
        }
        return Err(Error::TriangleDegenerate {
            face: None,
            detail: "triangle is flat to working precision".into(),
        });
    }
    Ok(Scaled3 { s, cos, p })
}

/// Side lengths, inner angles and area factor of the triangle of centers.
pub fn three_circle_config(radii: &RadiusTriple, angles: &AngleTriple) -> Result<ThreeCircleConfig> {
    if !check_angle_triple(angles).admissible {
        return Err(Error::Domain(format!("angle triple {:?} is not admissible", angles.0)));
    }
    let Scaled3 { s, cos, p } = scaled3(radii, angles)?;
    let sq = p.sqrt();
    let mut sides = [0.0; 3];
    let mut inner = [0.0; 3];
    for i in 0..3 {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        sides[i] = side_length_unchecked(radii.0[j], radii.0[k], angles.0[i]);
        let n = (s[j].a * s[k].a + cos[j] * cos[k] * s[j].x * s[k].x) * s[i].x * s[i].x
            + (cos[j] * s[j].a * s[k].x + cos[k] * s[k].a * s[j].x) * s[i].a * s[i].x
            - cos[i] * s[j].x * s[k].x * s[i].e2;
        inner[i] = (sq * (-radii.0[i]).exp()).atan2(n);
    }
    let ln_k = radii.0.iter().sum::<f64>() + 0.5 * p.ln();
    Ok(ThreeCircleConfig { radii: radii.0, angles: angles.0, sides, inner, ln_k })
}

/// `-expm1(-2l)/2 = sinh(l) e^{-l}`
fn scaled_sinh(l: f64) -> f64 {
    -0.5 * (-2.0 * l).exp_m1()
}

/// Derivative of the three inner angles with respect to `q = ln tanh(r/2)`.
///
/// Entry `(a, b)` is `d inner_a / d q_b`. The matrix is symmetric and, for
/// admissible angles, negative definite.
pub fn angle_jacobian(radii: &RadiusTriple, angles: &AngleTriple) -> Result<Matrix3<f64>> {
    let cfg = three_circle_config(radii, angles)?;
    let Scaled3 { s, cos, p } = scaled3(radii, angles)?;
    let kt = p.sqrt();
    let r = radii.0;
    let l = cfg.sides;
    let st = l.map(scaled_sinh);
    let cosv = cfg.inner.map(f64::cos);
    let smat = Matrix3::new(
        -1.0, cosv[2], cosv[1], //
        cosv[2], -1.0, cosv[0], //
        cosv[1], cosv[0], -1.0,
    );
    // scaled d cosh l_c / d r_b, with o the remaining index
    let mt = |c: usize, b: usize| -> f64 {
        if c == b {
            return 0.0;
        }
        let o = 3 - c - b;
        s[b].x * s[o].a + cos[c] * s[b].a * s[o].x
    };
    let mut jac = Matrix3::zeros();
    for a in 0..3 {
        for b in 0..3 {
            let mut acc = 0.0;
            for c in 0..3 {
                if c == b {
                    continue;
                }
                acc += smat[(a, c)] * mt(c, b) / st[c] * (l[a] - l[c] - r[c] + r[b]).exp();
            }
            jac[(a, b)] = -st[a] * s[b].x / kt * acc;
        }
    }
    Ok(jac)
}

fn check_two_circle(r_i: f64, r_j: f64, theta_k: f64) -> Result<()> {
    check_radius(r_i)?;
    check_radius(r_j)?;
    if theta_k.is_finite() && theta_k > 0.0 && theta_k < PI {
        Ok(())
    } else {
        Err(Error::Domain(format!("two-circle angle must lie in (0, pi), got {theta_k}")))
    }
}

/// Inner angles at the two circle centers in the limit where the third
/// circle shrinks to a point on the intersection of the first two.
pub fn two_circle_angles(r_i: f64, r_j: f64, theta_k: f64) -> Result<(f64, f64)> {
    check_two_circle(r_i, r_j, theta_k)?;
    let (si, sj) = (Scaled::new(r_i), Scaled::new(r_j));
    let (c, s) = (theta_k.cos(), theta_k.sin());
    let vi = (s * sj.x * (-r_i).exp()).atan2(sj.a * si.x + c * si.a * sj.x);
    let vj = (s * si.x * (-r_j).exp()).atan2(si.a * sj.x + c * sj.a * si.x);
    Ok((vi, vj))
}

/// `d(inner_i, inner_j) / d(q_i, q_j)` for the two-circle limit. Symmetric.
pub fn two_circle_jacobian(r_i: f64, r_j: f64, theta_k: f64) -> Result<nalgebra::Matrix2<f64>> {
    check_two_circle(r_i, r_j, theta_k)?;
    let (si, sj) = (Scaled::new(r_i), Scaled::new(r_j));
    let (c, s) = (theta_k.cos(), theta_k.sin());
    // inner_u = atan2(Y, X), Y = s sinh r_v, X = cosh r_v sinh r_u + c cosh r_u sinh r_v,
    // everything divided by e^{r_u + r_v}
    let partials = |u: &Scaled, v: &Scaled| -> (f64, f64) {
        let eu = (-u.r).exp();
        let y = s * v.x * eu;
        let x = v.a * u.x + c * u.a * v.x;
        let n = x * x + y * y;
        let du = -y * (v.a * u.a + c * u.x * v.x) / n;
        let dv = (x * s * v.a * eu - y * (v.x * u.x + c * u.a * v.a)) / n;
        // dr/dq = sinh r
        (du * u.x * u.r.exp(), dv * v.x * v.r.exp())
    };
    let (dii, dij) = partials(&si, &sj);
    let (djj, dji) = partials(&sj, &si);
    Ok(nalgebra::Matrix2::new(dii, dij, dji, djj))
}

/// `(cosh d - cosh r_v cosh r_u) / (sinh r_v sinh r_u)`
pub fn inversive_distance(d: f64, r_v: f64, r_u: f64) -> Result<f64> {
    check_radius(r_v)?;
    check_radius(r_u)?;
    if !(d.is_finite() && d >= 0.0) {
        return Err(Error::Domain(format!("distance must be finite and non-negative, got {d}")));
    }
    let (sv, su) = (Scaled::new(r_v), Scaled::new(r_u));
    let sum = r_v + r_u;
    let ch = 0.5 * ((d - sum).exp() + (-d - sum).exp());
    Ok((ch - sv.a * su.a) / (sv.x * su.x))
}
