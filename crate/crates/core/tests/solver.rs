use std::f64::consts::PI;

use hypcircle::complex::Triangulation;
use hypcircle::conditions::{check_r1, WeightFunction};
use hypcircle::samples::{genus2, octagon, Preset};
use hypcircle::solver::*;
use hypcircle::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn preset(p: Preset) -> (Triangulation, WeightFunction) {
    let d = genus2(p);
    (d.triangulation().unwrap(), d.weight_function().unwrap())
}

fn random_q(tri: &Triangulation, rng: &mut impl Rng) -> RadiusVector {
    let r: Vec<f64> = (0..tri.vertex_count()).map(|_| rng.random_range(0.3..2.0)).collect();
    RadiusVector::from_radii(&r).unwrap()
}

fn with_q(q: &RadiusVector, v: usize, dq: f64) -> RadiusVector {
    let mut x = q.q().to_vec();
    x[v] += dq;
    RadiusVector::new(x).unwrap()
}

#[test]
fn curvature_sum_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for p in Preset::ALL {
        let (tri, w) = preset(p);
        let q = random_q(&tri, &mut rng);
        let k = curvature(&tri, &w, &q).unwrap();
        let total: f64 = k.k.iter().sum();
        let expected = 2.0 * PI * tri.vertex_count() as f64 - k.angle_total;
        assert!((total - expected).abs() < 1e-9, "{p:?}: {total} vs {expected}");
    }
}

#[test]
fn hessian_matches_central_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for p in Preset::ALL {
        let (tri, w) = preset(p);
        let q = random_q(&tri, &mut rng);
        let h = hessian(&tri, &w, &q).unwrap().to_dense();
        let step = 1e-5;
        for u in 0..tri.vertex_count() {
            let kp = curvature(&tri, &w, &with_q(&q, u, step)).unwrap();
            let km = curvature(&tri, &w, &with_q(&q, u, -step)).unwrap();
            for v in 0..tri.vertex_count() {
                let fd = -(kp.k[v] - km.k[v]) / (2.0 * step);
                assert!((fd - h[(v, u)]).abs() < 1e-5, "{p:?} ({v},{u}): fd {fd} vs {}", h[(v, u)]);
            }
        }
    }
}

#[test]
fn hessian_is_symmetric() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for p in Preset::ALL {
        let (tri, w) = preset(p);
        let h = hessian(&tri, &w, &random_q(&tri, &mut rng)).unwrap();
        assert!(h.max_asymmetry() < 1e-9, "{p:?}: {}", h.max_asymmetry());
    }
}

#[test]
fn packing_hessian_is_diagonally_dominant() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (tri, w) = preset(Preset::Zero);
    for _ in 0..5 {
        let h = hessian(&tri, &w, &random_q(&tri, &mut rng)).unwrap().to_dense();
        for v in 0..tri.vertex_count() {
            let off: f64 = (0..tri.vertex_count()).filter(|&u| u != v).map(|u| h[(v, u)].abs()).sum();
            assert!(h[(v, v)] < 0.0);
            assert!(-h[(v, v)] > off, "row {v}: {} vs {off}", h[(v, v)]);
        }
    }
}

#[test]
fn hessian_negative_definite_under_nonnegative_gamma() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for p in [Preset::Zero, Preset::HalfPi] {
        let (tri, w) = preset(p);
        assert!(check_r1(&tri, &w).unwrap().passed());
        for _ in 0..10 {
            assert!(hessian(&tri, &w, &random_q(&tri, &mut rng)).unwrap().is_negative_definite());
        }
    }
}

#[test]
fn newton_converges_on_packing_preset() {
    let (tri, w) = preset(Preset::Zero);
    let r = newton_solve(&tri, &w, &default_start(&tri), &NewtonOptions::default()).unwrap();
    assert!(r.residual < 1e-10);
    assert!(r.iterations < 50, "{} iterations", r.iterations);
    let recomputed = curvature(&tri, &w, &r.q_star).unwrap().max_abs();
    assert!((recomputed - r.residual).abs() <= 1e-12);
    let deficit = total_deficit(&tri, &w, &r.q_star).unwrap();
    assert!((deficit - 4.0 * PI).abs() < 1e-8, "{deficit}");
}

#[test]
fn newton_is_rigid_under_r1() {
    let (tri, w) = preset(Preset::HalfPi);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let runs: Vec<Vec<f64>> = (0..5)
        .map(|_| {
            let r = newton_solve(&tri, &w, &random_q(&tri, &mut rng), &NewtonOptions::default()).unwrap();
            assert!(r.residual < 1e-10);
            r.q_star.into_inner()
        })
        .collect();
    for a in &runs {
        for b in &runs {
            for (x, y) in a.iter().zip(b) {
                assert!((x - y).abs() < 1e-8);
            }
        }
    }
}

#[test]
fn newton_iterates_keep_a_definite_hessian_under_r1() {
    let (tri, w) = preset(Preset::HalfPi);
    let mut q = default_start(&tri);
    for _ in 0..10 {
        assert!(hessian(&tri, &w, &q).unwrap().is_negative_definite());
        match newton_solve(&tri, &w, &q, &NewtonOptions { tol: 1e-10, max_iter: 1 }) {
            Ok(_) => break,
            Err(Error::MaxIter { .. }) => {
                let k = curvature(&tri, &w, &q).unwrap();
                let h = hessian(&tri, &w, &q).unwrap().to_dense();
                let kv = nalgebra::DVector::from_column_slice(&k.k);
                let d = h.lu().solve(&kv).unwrap();
                let next: Vec<f64> = q.q().iter().zip(d.iter()).map(|(a, b)| a + b).collect();
                q = RadiusVector::new(next).unwrap();
            }
            Err(e) => panic!("{e}"),
        }
    }
}

#[test]
fn newton_rejects_face_inadmissible_weights() {
    let (tri, _) = preset(Preset::Zero);
    let mut values = vec![0.9 * PI; tri.edge_count()];
    values[0] = 0.0;
    let w = WeightFunction::new(values).unwrap();
    let err = newton_solve(&tri, &w, &default_start(&tri), &NewtonOptions::default()).unwrap_err();
    assert!(matches!(err, Error::Precondition(_)), "{err}");
    let bad = newton_solve(&tri, &WeightFunction::uniform(tri.edge_count(), 0.0).unwrap(), &default_start(&tri), &NewtonOptions { tol: 0.0, max_iter: 10 });
    assert!(matches!(bad, Err(Error::Domain(_))));
}

#[test]
fn flow_decays_geometrically_and_agrees_with_newton() {
    for p in [Preset::Zero, Preset::HalfPi] {
        let (tri, w) = preset(p);
        let flow = ricci_flow(&tri, &w, &default_start(&tri), &FlowOptions::default()).unwrap();
        let hist = &flow.diagnostics.residual_history;
        assert!(hist.windows(2).all(|x| x[1] <= x[0]));
        // least-squares slope of ln residual against the step index
        let pts: Vec<(f64, f64)> = hist.iter().enumerate().map(|(i, r)| (i as f64, r.ln())).collect();
        let n = pts.len() as f64;
        let (sx, sy) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
        let (mx, my) = (sx / n, sy / n);
        let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
        assert!(slope < 0.0, "{p:?}: slope {slope}");
        let newton = newton_solve(&tri, &w, &default_start(&tri), &NewtonOptions::default()).unwrap();
        for (a, b) in flow.q_star.q().iter().zip(newton.q_star.q()) {
            assert!((a - b).abs() < 1e-7, "{p:?}: {a} vs {b}");
        }
    }
}

#[test]
fn flow_step_at_the_solution_is_negligible() {
    let (tri, w) = preset(Preset::HalfPi);
    let r = newton_solve(&tri, &w, &default_start(&tri), &NewtonOptions { tol: 1e-13, max_iter: 200 }).unwrap();
    let k = curvature(&tri, &w, &r.q_star).unwrap();
    let step = 0.1;
    let dq: f64 = k.k.iter().map(|x| (step * x).powi(2)).sum::<f64>().sqrt();
    assert!(dq <= 1e-10 * step);
}

#[test]
fn continuation_of_packing_is_a_single_newton_stage() {
    let (tri, w) = preset(Preset::Zero);
    let c = continuation_solve(&tri, &w, &default_start(&tri), &ContinuationOptions::default()).unwrap();
    let n = newton_solve(&tri, &w, &default_start(&tri), &NewtonOptions::default()).unwrap();
    assert_eq!(c.diagnostics.stages, vec![0.0]);
    assert_eq!(c.q_star, n.q_star);
}

#[test]
fn continuation_solves_the_obtuse_preset() {
    let (tri, w) = preset(Preset::Mixed);
    assert!(!check_r1(&tri, &w).unwrap().passed());
    let r = continuation_solve(&tri, &w, &default_start(&tri), &ContinuationOptions::default()).unwrap();
    assert!(r.residual < 1e-10);
    assert_eq!(r.diagnostics.stages.last(), Some(&1.0));
    let deficit = total_deficit(&tri, &w, &r.q_star).unwrap();
    assert!((deficit - 4.0 * PI).abs() < 1e-8);
}

#[test]
fn continuation_warm_start_matches_fresh_solve_at_half() {
    let (tri, w) = preset(Preset::HalfPi);
    let half = w.scaled(0.5);
    let warm = continuation_solve(&tri, &half, &default_start(&tri), &ContinuationOptions::default()).unwrap();
    let fresh = newton_solve(&tri, &half, &default_start(&tri), &NewtonOptions::default()).unwrap();
    for (a, b) in warm.q_star.q().iter().zip(fresh.q_star.q()) {
        assert!((a - b).abs() < 1e-7);
    }
}

#[test]
fn continuation_rejects_blocking_curve_violations() {
    let (tri, _) = preset(Preset::Zero);
    // link edges of one vertex whose angles overshoot the link bound while every face stays admissible
    let v = (0..tri.vertex_count())
        .find(|&v| {
            let link: Vec<usize> = tri.star(v).iter().map(|s| tri.opposite_edge(s.face, s.index)).collect();
            (0..tri.face_count()).all(|f| tri.opposite_edges(f).iter().filter(|e| link.contains(e)).count() <= 1)
        })
        .expect("some vertex has a link touching each face at most once");
    let d = tri.degree(v) as f64;
    let mut values = vec![0.0; tri.edge_count()];
    for s in tri.star(v) {
        values[tri.opposite_edge(s.face, s.index)] = PI * (d - 2.0) / d + 0.05;
    }
    let w = WeightFunction::new(values).unwrap();
    assert!(hypcircle::conditions::check_c1(&tri, &w).unwrap().passed());
    match continuation_solve(&tri, &w, &default_start(&tri), &ContinuationOptions::default()) {
        Err(Error::Precondition(msg)) => assert!(msg.contains("blocking"), "{msg}"),
        other => panic!("expected a precondition failure, got {other:?}"),
    }
}

#[test]
fn phi_examples_and_ascent() {
    let (tri, w) = preset(Preset::HalfPi);
    let q0 = default_start(&tri);
    assert_eq!(phi(&tri, &w, &q0, &q0).unwrap(), 0.0);
    let r = newton_solve(&tri, &w, &q0, &NewtonOptions::default()).unwrap();
    // Newton iterates climb the concave functional towards its maximum
    let gain = phi(&tri, &w, &r.q_star, &q0).unwrap();
    assert!(gain > 0.0);
    let flow = ricci_flow(&tri, &w, &q0, &FlowOptions { tol: 1e-3, ..Default::default() }).unwrap();
    assert!(phi(&tri, &w, &flow.q_star, &q0).unwrap() >= -PHI_TOL);
    assert!(phi(&tri, &w, &r.q_star, &flow.q_star).unwrap() >= -PHI_TOL);
}

#[test]
fn phi_is_path_independent_and_its_gradient_is_minus_k() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for p in Preset::ALL {
        let (tri, w) = preset(p);
        let (a, b, c) = (random_q(&tri, &mut rng), random_q(&tri, &mut rng), random_q(&tri, &mut rng));
        let direct = phi(&tri, &w, &b, &a).unwrap();
        let dogleg = phi(&tri, &w, &c, &a).unwrap() + phi(&tri, &w, &b, &c).unwrap();
        assert!((direct - dogleg).abs() < 1e-8, "{p:?}: {direct} vs {dogleg}");
        let k = curvature(&tri, &w, &b).unwrap();
        let h = 1e-4;
        for v in [0, 3, 7] {
            let plus = phi(&tri, &w, &with_q(&b, v, h), &b).unwrap();
            let minus = phi(&tri, &w, &with_q(&b, v, -h), &b).unwrap();
            let grad = (plus - minus) / (2.0 * h);
            assert!((grad + k.k[v]).abs() < 1e-6, "{p:?} v{v}: {grad} vs {}", -k.k[v]);
        }
    }
}

#[test]
fn ideal_octagon_star_radii_decay() {
    let d = octagon();
    let complex = d.cell_complex().unwrap();
    let w = d.weight_function().unwrap();
    let r = ideal_solve(&complex, &w, &IdealOptions::default()).unwrap();
    assert_eq!(r.stages.len(), 4);
    assert!(r.star_radii_decreasing);
    for pair in r.star_radius_trace.windows(2) {
        assert!(pair[1][0] < pair[0][0]);
    }
    for s in &r.stages {
        assert!(s.residual < 1e-10);
        // the cell's intersection angles fall short of (m - 2) pi by exactly m eps
        assert!((s.gap_defects[0] - 8.0 * s.eps).abs() < 1e-9, "{:?}", s.gap_defects);
    }
    assert!(r.extrapolated_primal_radii.is_some());
}

#[test]
fn ideal_rejects_bad_schedules_and_weights() {
    let d = octagon();
    let complex = d.cell_complex().unwrap();
    let w = d.weight_function().unwrap();
    for schedule in [vec![], vec![0.1, 0.2], vec![0.1, -0.05], vec![0.1, 0.1]] {
        let opts = IdealOptions { eps_schedule: schedule, ..Default::default() };
        assert!(matches!(ideal_solve(&complex, &w, &opts), Err(Error::Domain(_))));
    }
    let too_big = IdealOptions { eps_schedule: vec![3.0, 1.0], ..Default::default() };
    assert!(matches!(ideal_solve(&complex, &w, &too_big), Err(Error::WeightOutOfRange { .. })));
    let off = WeightFunction::uniform(complex.edge_count(), 0.7 * PI).unwrap();
    assert!(matches!(ideal_solve(&complex, &off, &IdealOptions::default()), Err(Error::Precondition(_))));
}

#[test]
fn radius_vector_rejects_invalid_entries() {
    assert!(RadiusVector::new(vec![-1.0, 0.0]).is_err());
    assert!(RadiusVector::new(vec![f64::NAN]).is_err());
    assert!(RadiusVector::from_radii(&[1.0, -2.0]).is_err());
    let q = RadiusVector::uniform(3, 1.0).unwrap();
    for r in q.radii() {
        assert!((r - 1.0).abs() < 1e-14);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn gradient_of_phi_along_random_directions(seed in 0u64..1000, scale in 0.01f64..0.3) {
        let (tri, w) = preset(Preset::Mixed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = random_q(&tri, &mut rng);
        let dir: Vec<f64> = (0..tri.vertex_count()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let moved = |t: f64| RadiusVector::new(q.q().iter().zip(&dir).map(|(a, d)| a + t * scale * d).collect()).unwrap();
        let h = 1e-4;
        let fd = (phi(&tri, &w, &moved(h), &q).unwrap() - phi(&tri, &w, &moved(-h), &q).unwrap()) / (2.0 * h);
        let k = curvature(&tri, &w, &q).unwrap();
        let exact: f64 = -k.k.iter().zip(&dir).map(|(kv, d)| kv * d * scale).sum::<f64>();
        prop_assert!((fd - exact).abs() < 1e-6);
    }

    #[test]
    fn curvature_is_invariant_under_weight_scaling_at_zero(seed in 0u64..1000) {
        let (tri, w) = preset(Preset::Zero);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = random_q(&tri, &mut rng);
        let a = curvature(&tri, &w, &q).unwrap();
        let b = curvature(&tri, &w.scaled(3.0), &q).unwrap();
        prop_assert_eq!(a, b);
    }
}
