use serde::Serialize;

use super::continuation::{continuation_solve, ContinuationOptions};
use super::newton::newton_core;
use super::{curvature, default_start, RadiusVector, SolveResult};
use crate::complex::{subdivide_cell_complex, CellComplex, SubdividedComplex};
use crate::conditions::{check_ideal_conditions, compensated_sum, ideal_weights, WeightFunction};
use crate::error::{Error, Result};
use crate::geometry::{inversive_distance, side_length};

/// Stages in a row without star-radius decay before the run is abandoned.
const NON_DECAY_LIMIT: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct IdealOptions {
    /// Strictly decreasing, positive.
    pub eps_schedule: Vec<f64>,
    pub continuation: ContinuationOptions,
}

impl Default for IdealOptions {
    fn default() -> Self {
        IdealOptions { eps_schedule: vec![0.1, 0.05, 0.025, 0.0125], continuation: ContinuationOptions::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdealStage {
    pub eps: f64,
    /// Radii of the star vertices, in cell order.
    pub star_radii: Vec<f64>,
    pub primal_q: Vec<f64>,
    pub primal_radii: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
    /// Per cell, sum of the measured intersection angles along its boundary edges.
    pub gap_angle_sums: Vec<f64>,
    /// Per cell, `(m - 2) pi` minus the gap angle sum.
    pub gap_defects: Vec<f64>,
    /// Whether the warm-started Newton solve had to fall back to continuation.
    pub used_continuation: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdealSolveResult {
    pub stages: Vec<IdealStage>,
    /// Star radii of each stage, in schedule order.
    pub star_radius_trace: Vec<Vec<f64>>,
    /// Every star radius strictly decreases from each stage to the next.
    pub star_radii_decreasing: bool,
    /// Primal q of the last stage.
    pub primal_q_star: Vec<f64>,
    /// Linear extrapolation of primal q to `eps = 0` from the last two stages.
    pub extrapolated_primal_q: Option<Vec<f64>>,
    /// Radii of the extrapolated q, absent if any extrapolated q is not negative.
    pub extrapolated_primal_radii: Option<Vec<f64>>,
    /// Full q on the subdivided complex at the last stage.
    pub final_q: RadiusVector,
    pub final_eps: f64,
}

fn gap_sums(sub: &SubdividedComplex, cells: &CellComplex, w: &WeightFunction, radii: &[f64]) -> Result<Vec<f64>> {
    let tri = &sub.triangulation;
    cells
        .cells()
        .iter()
        .map(|cell| {
            let angles = cell
                .iter()
                .map(|corner| {
                    let [a, b] = tri.edges()[corner.edge].endpoints;
                    let l = side_length(radii[a], radii[b], w.get(corner.edge))?;
                    let i = inversive_distance(l, radii[a], radii[b])?;
                    Ok(i.clamp(-1.0, 1.0).acos())
                })
                .collect::<Result<Vec<f64>>>()?;
            Ok(compensated_sum(angles))
        })
        .collect()
}

fn check_schedule(schedule: &[f64]) -> Result<()> {
    if schedule.is_empty() {
        return Err(Error::Domain("eps schedule is empty".into()));
    }
    if let Some(e) = schedule.iter().find(|e| !(e.is_finite() && **e > 0.0)) {
        return Err(Error::Domain(format!("eps values must be positive, got {e}")));
    }
    if schedule.windows(2).any(|p| p[1] >= p[0]) {
        return Err(Error::Domain("eps schedule must be strictly decreasing".into()));
    }
    Ok(())
}

/// Solves the star-subdivided problem with primal weights `w - eps` and zero
/// spoke weights for each `eps` of the schedule, warm-starting each stage from
/// the previous one.
pub fn ideal_solve(complex: &CellComplex, w: &WeightFunction, opts: &IdealOptions) -> Result<IdealSolveResult> {
    check_schedule(&opts.eps_schedule)?;
    let gate = check_ideal_conditions(complex, w, opts.continuation.size_cap, 0.0)?;
    if !gate.passed() {
        let which = if gate.h1.passed() { "blocking-curve bound" } else { "cell angle sums" };
        return Err(Error::Precondition(format!("ideal conditions fail: {which}")));
    }
    let sub = subdivide_cell_complex(complex)?;
    for &eps in &opts.eps_schedule {
        ideal_weights(&sub, w, eps)?;
    }
    let tri = &sub.triangulation;
    let np = sub.primal_vertex_count();

    let mut stages: Vec<IdealStage> = Vec::new();
    let mut q = default_start(tri);
    let mut non_decay = 0;
    let mut decreasing = true;
    for (n, &eps) in opts.eps_schedule.iter().enumerate() {
        let wd = ideal_weights(&sub, w, eps)?;
        let (result, used_continuation): (SolveResult, bool) = if n == 0 {
            (continuation_solve(tri, &wd, &q, &opts.continuation)?, true)
        } else {
            match newton_core(tri, &wd, &q, &opts.continuation.newton) {
                Ok(r) => (r, false),
                Err(Error::MaxIter { .. } | Error::Stalled { .. } | Error::TriangleDegenerate { .. }) => {
                    (continuation_solve(tri, &wd, &q, &opts.continuation)?, true)
                }
                Err(e) => return Err(e),
            }
        };
        let residual = curvature(tri, &wd, &result.q_star)?.max_abs();
        q = result.q_star;
        let radii = q.radii();
        let star_radii: Vec<f64> = sub.star_vertices.iter().map(|&s| radii[s]).collect();
        if let Some(prev) = stages.last() {
            let decayed = star_radii.iter().zip(&prev.star_radii).all(|(now, before)| now < before);
            if decayed {
                non_decay = 0;
            } else {
                decreasing = false;
                non_decay += 1;
                if non_decay >= NON_DECAY_LIMIT {
                    return Err(Error::NonDecayingStar { stage: n });
                }
            }
        }
        let gap_angle_sums = gap_sums(&sub, complex, &wd, &radii)?;
        let gap_defects = gap_angle_sums
            .iter()
            .zip(&sub.cell_sizes)
            .map(|(s, &m)| (m as f64 - 2.0) * std::f64::consts::PI - s)
            .collect();
        stages.push(IdealStage {
            eps,
            star_radii,
            primal_q: q.q()[..np].to_vec(),
            primal_radii: radii[..np].to_vec(),
            residual,
            iterations: result.iterations,
            gap_angle_sums,
            gap_defects,
            used_continuation,
        });
    }

    let last = stages.last().expect("schedule is nonempty");
    let extrapolated_primal_q = (stages.len() >= 2).then(|| {
        let prev = &stages[stages.len() - 2];
        let ratio = last.eps / (prev.eps - last.eps);
        last.primal_q.iter().zip(&prev.primal_q).map(|(qn, qp)| qn - ratio * (qp - qn)).collect::<Vec<f64>>()
    });
    let extrapolated_primal_radii = extrapolated_primal_q
        .as_ref()
        .and_then(|e| RadiusVector::new(e.clone()).ok())
        .map(|rv| rv.radii());
    Ok(IdealSolveResult {
        star_radius_trace: stages.iter().map(|s| s.star_radii.clone()).collect(),
        star_radii_decreasing: decreasing,
        primal_q_star: last.primal_q.clone(),
        extrapolated_primal_q,
        extrapolated_primal_radii,
        final_eps: last.eps,
        final_q: q,
        stages,
    })
}
