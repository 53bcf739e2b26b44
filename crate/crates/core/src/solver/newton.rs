use nalgebra::DVector;
use nalgebra_sparse::factorization::CscCholesky;
use nalgebra_sparse::CscMatrix;

use super::{curvature, hessian, CurvatureVector, Diagnostics, RadiusVector, SolveResult, Strategy};
use crate::complex::Triangulation;
use crate::conditions::{check_c1, WeightFunction};
use crate::error::{Error, Result};

/// Smallest step length in q before the iteration is declared stalled.
const MIN_STEP: f64 = 1e-14;
/// Levenberg shifts below this are reset to zero.
const SHIFT_FLOOR: f64 = 1e-12;
const ARMIJO: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions { tol: 1e-10, max_iter: 200 }
    }
}

fn solve_spd(m: &CscMatrix<f64>, rhs: &DVector<f64>) -> Option<DVector<f64>> {
    let chol = CscCholesky::factor(m).ok()?;
    let x = chol.solve(rhs);
    let x = DVector::from_column_slice(x.as_slice());
    x.iter().all(|v| v.is_finite()).then_some(x)
}

fn spmv(m: &CscMatrix<f64>, x: &DVector<f64>) -> DVector<f64> {
    let mut y = DVector::zeros(m.nrows());
    for (i, j, v) in m.triplet_iter() {
        y[i] += v * x[j];
    }
    y
}

/// `A^T A + mu I` for the symmetric `A`.
fn normal_matrix(a: &CscMatrix<f64>, mu: f64) -> CscMatrix<f64> {
    let mut d = nalgebra::DMatrix::zeros(a.nrows(), a.ncols());
    for (i, j, v) in a.triplet_iter() {
        d[(i, j)] += *v;
    }
    let mut n = d.transpose() * &d;
    for i in 0..n.nrows() {
        n[(i, i)] += mu;
    }
    CscMatrix::from(&n)
}

fn evaluate(tri: &Triangulation, w: &WeightFunction, q: &[f64]) -> Option<(RadiusVector, CurvatureVector)> {
    let rv = RadiusVector::new(q.to_vec()).ok()?;
    let k = curvature(tri, w, &rv).ok()?;
    Some((rv, k))
}

/// Damped Newton iteration on `k(q) = 0` with a Levenberg shift and a
/// backtracking line search on `|k|^2`.
///
/// The Jacobian of `k` is `A = -H`. Steps solve `(A + lambda I) d = -k` by
/// sparse Cholesky; if that fails the shift grows tenfold, and if the step is
/// not a descent direction for `|k|^2` the least-squares system
/// `(A^2 + lambda I) d = -A k` is used instead.
pub fn newton_solve(tri: &Triangulation, w: &WeightFunction, q0: &RadiusVector, opts: &NewtonOptions) -> Result<SolveResult> {
    if !(opts.tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {}", opts.tol)));
    }
    let c1 = check_c1(tri, w)?;
    if !c1.passed() {
        return Err(Error::Precondition(format!(
            "face admissibility fails at {} face(s)",
            c1.witnesses.len()
        )));
    }
    newton_core(tri, w, q0, opts)
}

pub(super) fn newton_core(tri: &Triangulation, w: &WeightFunction, q0: &RadiusVector, opts: &NewtonOptions) -> Result<SolveResult> {
    let mut q = q0.clone();
    let mut k = curvature(tri, w, &q)?;
    let mut diag = Diagnostics::default();
    let mut shift = 0.0f64;
    let mut iterations = 0;
    loop {
        let residual = k.max_abs();
        diag.residual_history.push(residual);
        if residual < opts.tol {
            return Ok(SolveResult { q_star: q, residual, iterations, strategy: Strategy::Newton, diagnostics: diag });
        }
        if iterations == opts.max_iter {
            return Err(Error::MaxIter { iterations, residual });
        }
        iterations += 1;

        let h = hessian(tri, w, &q)?;
        let a = h.negated_shifted(0.0);
        let kv = DVector::from_column_slice(&k.k);
        let grad = spmv(&a, &kv);
        let diag_scale = (0..a.nrows()).map(|i| a.get_entry(i, i).map_or(0.0, |e| e.into_value().abs())).fold(1e-300, f64::max);
        let f0 = 0.5 * k.norm_sq();

        let mut accepted = false;
        for _attempt in 0..40 {
            let (dir, fallback) = match solve_spd(&h.negated_shifted(shift), &(-&kv)) {
                Some(d) if grad.dot(&d) < 0.0 => (d, false),
                _ => {
                    let mu = shift.max(1e-10 * diag_scale * diag_scale);
                    match solve_spd(&normal_matrix(&a, mu), &(-&grad)) {
                        Some(d) => (d, true),
                        None => {
                            shift = if shift == 0.0 { 1e-8 * diag_scale } else { shift * 10.0 };
                            continue;
                        }
                    }
                }
            };
            let slope = grad.dot(&dir);
            let norm = dir.norm();
            let mut alpha = 1.0;
            while alpha * norm >= MIN_STEP {
                let trial: Vec<f64> = q.q().iter().zip(dir.iter()).map(|(x, d)| x + alpha * d).collect();
                if let Some((rv, kt)) = evaluate(tri, w, &trial) {
                    if 0.5 * kt.norm_sq() <= f0 + ARMIJO * alpha * slope {
                        q = rv;
                        k = kt;
                        accepted = true;
                        break;
                    }
                }
                diag.rejected_steps += 1;
                alpha *= 0.5;
            }
            if accepted {
                diag.step_sizes.push(alpha * norm);
                diag.damping_history.push(shift);
                if fallback {
                    diag.fallback_steps += 1;
                }
                if alpha == 1.0 {
                    shift /= 3.0;
                    if shift < SHIFT_FLOOR {
                        shift = 0.0;
                    }
                }
                break;
            }
            shift = if shift == 0.0 { 1e-8 * diag_scale } else { shift * 10.0 };
        }
        if !accepted {
            diag.residual_history.push(residual);
            return Err(Error::Stalled { residual });
        }
    }
}
