//! Discrete curvature, its Jacobian, the potential whose gradient it is, and
//! the strategies that drive the curvature to zero.

mod continuation;
mod flow;
mod ideal;
mod newton;
mod phi;

use std::f64::consts::PI;

use nalgebra::DMatrix;
use nalgebra_sparse::factorization::CscCholesky;
use nalgebra_sparse::{CooMatrix, CscMatrix};
use serde::Serialize;

use crate::complex::Triangulation;
use crate::conditions::{ensure_total, WeightFunction};
use crate::error::{Error, Result};
use crate::geometry::{angle_jacobian, q_of_r, r_of_q, three_circle_config, RadiusTriple, ThreeCircleConfig};

pub use continuation::{continuation_solve, ContinuationOptions};
pub use flow::{ricci_flow, FlowOptions};
pub use ideal::{ideal_solve, IdealOptions, IdealSolveResult, IdealStage};
pub use newton::{newton_solve, NewtonOptions};
pub use phi::{phi, phi_with_tol, PHI_TOL};

/// Radius of every vertex at the default starting point.
pub const DEFAULT_START_RADIUS: f64 = 1.0;

/// Per-vertex radii in the coordinate `q = ln tanh(r/2)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadiusVector(Vec<f64>);

impl RadiusVector {
    pub fn new(q: Vec<f64>) -> Result<Self> {
        if let Some((v, x)) = q.iter().enumerate().find(|(_, x)| !(x.is_finite() && **x < 0.0)) {
            return Err(Error::Domain(format!("q of vertex {v} must be negative and finite, got {x}")));
        }
        Ok(RadiusVector(q))
    }

    pub fn from_radii(r: &[f64]) -> Result<Self> {
        if let Some((v, x)) = r.iter().enumerate().find(|(_, x)| !(x.is_finite() && **x > 0.0)) {
            return Err(Error::Domain(format!("radius of vertex {v} must be positive and finite, got {x}")));
        }
        RadiusVector::new(r.iter().map(|&x| q_of_r(x)).collect())
    }

    pub fn uniform(n: usize, r: f64) -> Result<Self> {
        RadiusVector::from_radii(&vec![r; n])
    }

    pub fn q(&self) -> &[f64] {
        &self.0
    }

    pub fn radii(&self) -> Vec<f64> {
        self.0.iter().map(|&q| r_of_q(q)).collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

/// `k(v) = 2 pi - (sum of inner angles at v)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvatureVector {
    pub k: Vec<f64>,
    /// Sum of all inner angles over all faces.
    pub angle_total: f64,
}

impl CurvatureVector {
    pub fn max_abs(&self) -> f64 {
        self.k.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn norm_sq(&self) -> f64 {
        self.k.iter().map(|x| x * x).sum()
    }
}

fn check_q(tri: &Triangulation, q: &RadiusVector) -> Result<()> {
    if q.len() != tri.vertex_count() {
        return Err(Error::Domain(format!("expected {} radii, got {}", tri.vertex_count(), q.len())));
    }
    Ok(())
}

fn tag_face(f: usize) -> impl Fn(Error) -> Error {
    move |e| match e {
        Error::TriangleDegenerate { detail, .. } => Error::TriangleDegenerate { face: Some(f), detail },
        Error::Domain(msg) => Error::Precondition(format!("face {f}: {msg}")),
        other => other,
    }
}

/// Triangle of circle centers of face `f`.
pub fn face_config(tri: &Triangulation, w: &WeightFunction, radii: &[f64], f: usize) -> Result<ThreeCircleConfig> {
    let r = RadiusTriple(tri.face_vertices(f).map(|v| radii[v]));
    three_circle_config(&r, &w.face_angles(tri, f)).map_err(tag_face(f))
}

pub fn curvature(tri: &Triangulation, w: &WeightFunction, q: &RadiusVector) -> Result<CurvatureVector> {
    ensure_total(tri, w)?;
    check_q(tri, q)?;
    let radii = q.radii();
    let mut sigma = vec![0.0; tri.vertex_count()];
    let mut angle_total = 0.0;
    for f in 0..tri.face_count() {
        let cfg = face_config(tri, w, &radii, f)?;
        for (i, v) in tri.face_vertices(f).into_iter().enumerate() {
            sigma[v] += cfg.inner[i];
            angle_total += cfg.inner[i];
        }
    }
    Ok(CurvatureVector { k: sigma.iter().map(|s| 2.0 * PI - s).collect(), angle_total })
}

/// Sparse symmetric matrix of `d sigma(v) / d q(u) = -d k(v) / d q(u)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Hessian(CscMatrix<f64>);

impl Hessian {
    pub fn matrix(&self) -> &CscMatrix<f64> {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut d = DMatrix::zeros(self.0.nrows(), self.0.ncols());
        for (i, j, v) in self.0.triplet_iter() {
            d[(i, j)] += *v;
        }
        d
    }

    pub fn max_asymmetry(&self) -> f64 {
        let d = self.to_dense();
        (&d - d.transpose()).abs().max()
    }

    /// `-H + shift * I`, the Jacobian of `k` plus a Levenberg shift.
    fn negated_shifted(&self, shift: f64) -> CscMatrix<f64> {
        let n = self.dim();
        let mut coo = CooMatrix::new(n, n);
        for (i, j, v) in self.0.triplet_iter() {
            coo.push(i, j, -*v);
        }
        if shift != 0.0 {
            for i in 0..n {
                coo.push(i, i, shift);
            }
        }
        CscMatrix::from(&coo)
    }

    /// True when a Cholesky factorization of `-H` succeeds.
    pub fn is_negative_definite(&self) -> bool {
        CscCholesky::factor(&self.negated_shifted(0.0)).is_ok()
    }
}

pub fn hessian(tri: &Triangulation, w: &WeightFunction, q: &RadiusVector) -> Result<Hessian> {
    ensure_total(tri, w)?;
    check_q(tri, q)?;
    let radii = q.radii();
    let n = tri.vertex_count();
    let mut coo = CooMatrix::new(n, n);
    for f in 0..tri.face_count() {
        let vs = tri.face_vertices(f);
        let r = RadiusTriple(vs.map(|v| radii[v]));
        let j = angle_jacobian(&r, &w.face_angles(tri, f)).map_err(tag_face(f))?;
        for a in 0..3 {
            for b in 0..3 {
                coo.push(vs[a], vs[b], j[(a, b)]);
            }
        }
    }
    Ok(Hessian(CscMatrix::from(&coo)))
}

/// Sum over faces of `pi - (inner angle sum)`; equals `-2 pi chi` when `k = 0`.
pub fn total_deficit(tri: &Triangulation, w: &WeightFunction, q: &RadiusVector) -> Result<f64> {
    let c = curvature(tri, w, q)?;
    Ok(PI * tri.face_count() as f64 - c.angle_total)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Newton,
    Flow,
    Continuation,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Diagnostics {
    /// `max |k|` before each iteration and at the end.
    pub residual_history: Vec<f64>,
    /// Length of each accepted step in q.
    pub step_sizes: Vec<f64>,
    /// Levenberg shift (Newton) or time step (flow) used for each accepted step.
    pub damping_history: Vec<f64>,
    /// Steps taken along the least-squares fallback direction.
    pub fallback_steps: usize,
    pub rejected_steps: usize,
    /// Homotopy parameters reached, for continuation runs.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub stages: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveResult {
    pub q_star: RadiusVector,
    /// `max |k(q_star)|`
    pub residual: f64,
    pub iterations: usize,
    pub strategy: Strategy,
    pub diagnostics: Diagnostics,
}

/// Start point used when none is given: every radius 1.
pub fn default_start(tri: &Triangulation) -> RadiusVector {
    RadiusVector::uniform(tri.vertex_count(), DEFAULT_START_RADIUS).expect("radius 1 is valid")
}
