use super::{curvature, Diagnostics, RadiusVector, SolveResult, Strategy};
use crate::complex::Triangulation;
use crate::conditions::{check_c1, WeightFunction};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowOptions {
    pub tol: f64,
    pub max_steps: usize,
    pub initial_step: f64,
}

impl Default for FlowOptions {
    fn default() -> Self {
        FlowOptions { tol: 1e-10, max_steps: 100_000, initial_step: 0.1 }
    }
}

/// Explicit Euler integration of `dq/dt = -k`. A step is accepted only when it
/// keeps every `q < 0` and does not increase `max |k|`; rejected steps halve
/// the time step and every fifth consecutive acceptance grows it by 1.2.
pub fn ricci_flow(tri: &Triangulation, w: &WeightFunction, q0: &RadiusVector, opts: &FlowOptions) -> Result<SolveResult> {
    if !(opts.tol > 0.0 && opts.initial_step > 0.0) {
        return Err(Error::Domain("flow tolerance and step must be positive".into()));
    }
    let c1 = check_c1(tri, w)?;
    if !c1.passed() {
        return Err(Error::Precondition(format!("face admissibility fails at {} face(s)", c1.witnesses.len())));
    }
    let mut q = q0.clone();
    let mut k = curvature(tri, w, &q)?;
    let mut h = opts.initial_step;
    let mut streak = 0;
    let mut diag = Diagnostics::default();
    let mut steps = 0;
    loop {
        let residual = k.max_abs();
        diag.residual_history.push(residual);
        if residual < opts.tol {
            return Ok(SolveResult { q_star: q, residual, iterations: steps, strategy: Strategy::Flow, diagnostics: diag });
        }
        loop {
            if steps == opts.max_steps {
                return Err(Error::MaxSteps { steps, residual });
            }
            steps += 1;
            let trial: Vec<f64> = q.q().iter().zip(&k.k).map(|(x, kv)| x - h * kv).collect();
            let next = RadiusVector::new(trial).ok().and_then(|rv| curvature(tri, w, &rv).ok().map(|kt| (rv, kt)));
            match next {
                Some((rv, kt)) if kt.max_abs() <= residual => {
                    let moved: f64 = rv.q().iter().zip(q.q()).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
                    diag.step_sizes.push(moved);
                    diag.damping_history.push(h);
                    q = rv;
                    k = kt;
                    streak += 1;
                    if streak == 5 {
                        h *= 1.2;
                        streak = 0;
                    }
                    break;
                }
                _ => {
                    diag.rejected_steps += 1;
                    h *= 0.5;
                    streak = 0;
                    if h < f64::MIN_POSITIVE {
                        return Err(Error::Stalled { residual });
                    }
                }
            }
        }
    }
}
