//! Seeded randomized checks of the three-circle geometry, runnable from the command line.

use std::f64::consts::PI;

use nalgebra::{Matrix3, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::geometry::{
    angle_jacobian, check_angle_triple, q_of_r, side_length, three_circle_config, AngleTriple, RadiusTriple,
};
use crate::layout::{lens_contained_in, polar, HypCircle};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub name: &'static str,
    pub samples: usize,
    pub failures: usize,
    /// Largest observed error of the suite's main quantity.
    pub max_error: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelfcheckOptions {
    pub seed: u64,
    pub configs: usize,
    pub jacobians: usize,
    pub lenses: usize,
}

impl Default for SelfcheckOptions {
    fn default() -> Self {
        SelfcheckOptions { seed: 0, configs: 10_000, jacobians: 1_000, lenses: 100 }
    }
}

/// Uniform angles in `[0, pi)`, redrawn until admissible.
pub fn random_admissible(rng: &mut impl Rng) -> AngleTriple {
    loop {
        let t = AngleTriple([0, 1, 2].map(|_| rng.random_range(0.0..PI)));
        if check_angle_triple(&t).admissible {
            return t;
        }
    }
}

/// Radii log-uniform in `[lo, hi]`.
pub fn random_radii(rng: &mut impl Rng, lo: f64, hi: f64) -> RadiusTriple {
    RadiusTriple([0, 1, 2].map(|_| rng.random_range(lo.ln()..hi.ln()).exp()))
}

pub fn three_circle_suite(rng: &mut impl Rng, n: usize) -> SuiteReport {
    let mut failures = 0;
    let mut worst = f64::INFINITY;
    for _ in 0..n {
        let t = random_admissible(rng);
        let r = random_radii(rng, 1e-3, 20.0);
        match three_circle_config(&r, &t) {
            Ok(c) => {
                let l = c.sides;
                let slack = (l[0] + l[1] - l[2]).min(l[1] + l[2] - l[0]).min(l[2] + l[0] - l[1]);
                let angles_ok = c.inner.iter().all(|a| *a > 0.0 && *a < PI);
                worst = worst.min(slack / l.iter().fold(0.0f64, |m, x| m.max(*x)));
                if !(slack > 0.0 && angles_ok) {
                    failures += 1;
                }
            }
            Err(_) => failures += 1,
        }
    }
    SuiteReport {
        name: "three-circle existence",
        samples: n,
        failures,
        max_error: 0.0,
        passed: failures == 0,
        note: Some(format!("smallest relative triangle-inequality slack {worst:.3e}")),
    }
}

fn inner_at(q: [f64; 3], t: &AngleTriple) -> Option<[f64; 3]> {
    let r = RadiusTriple::from_q(q).ok()?;
    three_circle_config(&r, t).ok().map(|c| c.inner)
}

/// Fourth-order central differences of the inner angles with respect to q.
pub fn finite_difference_jacobian(q: [f64; 3], t: &AngleTriple, h: f64) -> Option<Matrix3<f64>> {
    let mut m = Matrix3::zeros();
    for b in 0..3 {
        let at = |s: f64| {
            let mut x = q;
            x[b] += s * h;
            inner_at(x, t)
        };
        let (p1, m1, p2, m2) = (at(1.0)?, at(-1.0)?, at(2.0)?, at(-2.0)?);
        for a in 0..3 {
            m[(a, b)] = (8.0 * (p1[a] - m1[a]) - (p2[a] - m2[a])) / (12.0 * h);
        }
    }
    Some(m)
}

pub fn jacobian_suite(rng: &mut impl Rng, n: usize) -> SuiteReport {
    let mut failures = 0;
    let mut max_fd = 0.0f64;
    let mut max_asym = 0.0f64;
    let mut definite_cases = 0;
    let mut min_margin = f64::INFINITY;
    for _ in 0..n {
        let t = random_admissible(rng);
        let r = random_radii(rng, 0.05, 4.0);
        let q = r.0.map(q_of_r);
        let (Ok(j), Some(fd)) = (angle_jacobian(&r, &t), finite_difference_jacobian(q, &t, 1e-4)) else {
            failures += 1;
            continue;
        };
        let scale = j.abs().max().max(1e-300);
        let asym = (j - j.transpose()).abs().max() / scale;
        let fd_err = (j - fd).abs().max();
        max_asym = max_asym.max(asym);
        max_fd = max_fd.max(fd_err);
        let mut ok = asym <= 1e-10 && fd_err <= 1e-6;
        if check_angle_triple(&t).gamma_nonnegative {
            definite_cases += 1;
            let top = SymmetricEigen::new(0.5 * (j + j.transpose())).eigenvalues.max();
            min_margin = min_margin.min(-top);
            ok &= top < 0.0;
        }
        if !ok {
            failures += 1;
        }
    }
    SuiteReport {
        name: "angle Jacobian",
        samples: n,
        failures,
        max_error: max_fd,
        passed: failures == 0,
        note: Some(format!(
            "max relative asymmetry {max_asym:.3e}; {definite_cases} samples with nonnegative gamma, smallest eigenvalue margin {min_margin:.3e}"
        )),
    }
}

pub fn limit_law_suite(rng: &mut impl Rng, n: usize) -> SuiteReport {
    let mut failures = 0;
    let mut max_err = 0.0f64;
    let mut record = |err: f64, tol: f64, failures: &mut usize| {
        max_err = max_err.max(err / tol);
        if !(err < tol) {
            *failures += 1;
        }
    };
    for _ in 0..n {
        let t = random_admissible(rng);
        let (a, b) = (rng.random_range(0.2..3.0), rng.random_range(0.2..3.0));
        let cfg = |r: [f64; 3]| three_circle_config(&RadiusTriple(r), &t).map(|c| c.inner);
        match cfg([30.0, a, b]) {
            Ok(inner) => record(inner[0], 1e-10, &mut failures),
            Err(_) => failures += 1,
        }
        if t.0[0] >= 0.1 {
            match cfg([1e-8, a, b]) {
                Ok(inner) => record((inner[0] - (PI - t.0[0])).abs(), 1e-6, &mut failures),
                Err(_) => failures += 1,
            }
        }
        match cfg([1e-12, 1e-12, a]) {
            Ok(inner) => record((inner[0] + inner[1] - PI).abs(), 1e-5, &mut failures),
            Err(_) => failures += 1,
        }
        match cfg([1e-12, 1e-12, 1e-12]) {
            Ok(inner) => record((inner.iter().sum::<f64>() - PI).abs(), 1e-5, &mut failures),
            Err(_) => failures += 1,
        }
    }
    SuiteReport {
        name: "limit laws",
        samples: n,
        failures,
        max_error: max_err,
        passed: failures == 0,
        note: Some("max_error is relative to each limit's tolerance".into()),
    }
}

/// Three disks where the lens of the first two lies inside the third: the
/// third disk sits at the origin and the other two cross it at random obtuse
/// angles on nearly opposite sides.
pub fn covered_lens_triple(rng: &mut impl Rng) -> Option<[HypCircle; 3]> {
    let rw = rng.random_range(0.5..2.0);
    let (tv, tu) = (rng.random_range(0.75 * PI..0.98 * PI), rng.random_range(0.75 * PI..0.98 * PI));
    let (rv, ru) = (rng.random_range(0.2..1.5), rng.random_range(0.2..1.5));
    let (dv, du) = (side_length(rv, rw, tv).ok()?, side_length(ru, rw, tu).ok()?);
    let spread = rng.random_range(0.0..1.2);
    let phase = rng.random_range(0.0..2.0 * PI);
    let v = HypCircle::new(polar(dv, phase), rv);
    let u = HypCircle::new(polar(du, phase + PI - spread), ru);
    let w = HypCircle::new(Complex64::new(0.0, 0.0), rw);
    lens_contained_in(&v, &u, &w, 0.0).then_some([v, u, w])
}

pub fn covered_lens_suite(rng: &mut impl Rng, n: usize) -> SuiteReport {
    let mut found = 0;
    let mut failures = 0;
    let mut worst = f64::INFINITY;
    let mut attempts = 0;
    while found < n && attempts < 1000 * n.max(1) {
        attempts += 1;
        let Some([v, u, w]) = covered_lens_triple(rng) else { continue };
        if v.inversive_distance(&u) > 1.0 {
            continue;
        }
        found += 1;
        let margin = v.intersection_angle(&w) + u.intersection_angle(&w) - v.intersection_angle(&u) - PI;
        worst = worst.min(margin);
        if margin < -1e-9 {
            failures += 1;
        }
    }
    SuiteReport {
        name: "covered-lens angle inequality",
        samples: found,
        failures,
        max_error: (-worst).max(0.0),
        passed: failures == 0 && found == n,
        note: Some(format!("smallest margin {worst:.3e} after {attempts} draws")),
    }
}

/// Runs every suite from one seeded generator.
pub fn run(opts: &SelfcheckOptions) -> Vec<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    vec![
        three_circle_suite(&mut rng, opts.configs),
        jacobian_suite(&mut rng, opts.jacobians),
        limit_law_suite(&mut rng, opts.jacobians),
        covered_lens_suite(&mut rng, opts.lenses),
    ]
}
