use super::newton::newton_core;
use super::{Diagnostics, RadiusVector, SolveResult, Strategy};
use crate::complex::Triangulation;
use crate::conditions::{check_c1, check_c2, WeightFunction, DEFAULT_SIZE_CAP};
use crate::error::{Error, Result};

use super::NewtonOptions;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuationOptions {
    /// Number of uniform intervals in `t` before any bisection.
    pub intervals: usize,
    /// Bisection stops, and the run is reported as stalled, below this step.
    pub min_dt: f64,
    pub newton: NewtonOptions,
    /// Size cap for the blocking-curve gate.
    pub size_cap: usize,
}

impl Default for ContinuationOptions {
    fn default() -> Self {
        ContinuationOptions { intervals: 10, min_dt: 1e-4, newton: NewtonOptions::default(), size_cap: DEFAULT_SIZE_CAP }
    }
}

/// Follows the homotopy `t -> t w` from the packing `t = 0` to `t = 1`,
/// warm-starting each Newton solve from the previous solution and halving the
/// `t` step after a failure.
pub fn continuation_solve(tri: &Triangulation, w: &WeightFunction, q0: &RadiusVector, opts: &ContinuationOptions) -> Result<SolveResult> {
    if opts.intervals == 0 || !(opts.min_dt > 0.0) {
        return Err(Error::Domain("continuation needs at least one interval and a positive minimum step".into()));
    }
    let c1 = check_c1(tri, w)?;
    if !c1.passed() {
        return Err(Error::Precondition(format!("face admissibility fails at {} face(s)", c1.witnesses.len())));
    }
    let c2 = check_c2(tri, w, opts.size_cap)?;
    if !c2.passed() {
        return Err(Error::Precondition(format!("blocking-curve bound fails on {} curve(s)", c2.witnesses.len())));
    }

    let mut diag = Diagnostics::default();
    let mut iterations = 0;
    let absorb = |diag: &mut Diagnostics, r: &SolveResult| {
        diag.residual_history.extend(&r.diagnostics.residual_history);
        diag.step_sizes.extend(&r.diagnostics.step_sizes);
        diag.damping_history.extend(&r.diagnostics.damping_history);
        diag.fallback_steps += r.diagnostics.fallback_steps;
        diag.rejected_steps += r.diagnostics.rejected_steps;
    };

    let first = newton_core(tri, &w.scaled(0.0), q0, &opts.newton).map_err(|e| match e {
        Error::MaxIter { residual, .. } | Error::Stalled { residual } => {
            Error::ContinuationStalled { last_t: 0.0, q: q0.q().to_vec(), residual }
        }
        other => other,
    })?;
    iterations += first.iterations;
    absorb(&mut diag, &first);
    diag.stages.push(0.0);
    let mut q = first.q_star;
    let mut residual = first.residual;
    if w.is_zero() {
        return Ok(SolveResult { q_star: q, residual, iterations, strategy: Strategy::Continuation, diagnostics: diag });
    }

    let base = 1.0 / opts.intervals as f64;
    let mut t = 0.0f64;
    let mut dt = base;
    while t < 1.0 {
        let target = if t + dt > 1.0 - 1e-12 { 1.0 } else { t + dt };
        match newton_core(tri, &w.scaled(target), &q, &opts.newton) {
            Ok(r) => {
                iterations += r.iterations;
                absorb(&mut diag, &r);
                diag.stages.push(target);
                q = r.q_star;
                residual = r.residual;
                t = target;
                dt = (dt * 2.0).min(base);
            }
            Err(Error::MaxIter { .. } | Error::Stalled { .. } | Error::TriangleDegenerate { .. }) => {
                dt *= 0.5;
                if dt < opts.min_dt {
                    return Err(Error::ContinuationStalled { last_t: t, q: q.into_inner(), residual });
                }
            }
            Err(other) => return Err(other),
        }
    }
    Ok(SolveResult { q_star: q, residual, iterations, strategy: Strategy::Continuation, diagnostics: diag })
}
