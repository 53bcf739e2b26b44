use std::f64::consts::PI;

use hypcircle::complex::Triangulation;
use hypcircle::conditions::WeightFunction;
use hypcircle::geometry::{side_length, two_circle_angles};
use hypcircle::layout::*;
use hypcircle::samples::{genus2, Preset};
use hypcircle::solver::*;
use hypcircle::Error;
use num_complex::Complex64;
use proptest::prelude::*;

fn solved(p: Preset) -> (Triangulation, WeightFunction, RadiusVector) {
    let d = genus2(p);
    let tri = d.triangulation().unwrap();
    let w = d.weight_function().unwrap();
    let r = continuation_solve(&tri, &w, &default_start(&tri), &ContinuationOptions::default()).unwrap();
    (tri, w, r.q_star)
}

/// `cosh d = 1 + 2 |z - w|^2 / ((1 - |z|^2)(1 - |w|^2))`, evaluated naively.
fn naive_distance(z: Complex64, w: Complex64) -> f64 {
    (1.0 + 2.0 * (z - w).norm_sqr() / ((1.0 - z.norm_sqr()) * (1.0 - w.norm_sqr()))).acosh()
}

#[test]
fn disk_distance_matches_the_textbook_formula() {
    let pts = [Complex64::new(0.0, 0.0), Complex64::new(0.3, -0.2), Complex64::new(-0.5, 0.6), Complex64::new(0.9, 0.1)];
    for &a in &pts {
        for &b in &pts {
            if a != b {
                assert!((distance(a, b) - naive_distance(a, b)).abs() < 1e-12);
            }
        }
    }
    assert!((distance(Complex64::new(0.0, 0.0), polar(2.5, 1.0)) - 2.5).abs() < 1e-14);
}

#[test]
fn isometries_preserve_distance_and_invert() {
    let f = Isometry::frame(Complex64::new(0.2, 0.4), Complex64::new(-0.3, 0.1));
    let (a, b) = (Complex64::new(0.1, 0.1), Complex64::new(-0.6, 0.2));
    assert!((distance(f.apply(a), f.apply(b)) - distance(a, b)).abs() < 1e-13);
    assert!((f.apply_inverse(f.apply(a)) - a).norm() < 1e-15);
    assert!((f.apply(Complex64::new(0.0, 0.0)) - Complex64::new(0.2, 0.4)).norm() < 1e-16);
}

#[test]
fn euclidean_image_of_a_hyperbolic_circle() {
    let c = HypCircle::new(Complex64::new(0.4, -0.3), 0.8);
    let (center, r) = c.euclidean();
    for k in 0..12 {
        let p = center + Complex64::from_polar(r, k as f64 * PI / 6.0);
        assert!((distance(c.center, p) - c.radius).abs() < 1e-12);
    }
}

#[test]
fn seed_face_is_placed_canonically() {
    let (tri, w, q) = solved(Preset::HalfPi);
    let p = develop(&tri, &w, &q).unwrap();
    let seed = &p.faces[0];
    assert_eq!(seed.corners[0], Complex64::new(0.0, 0.0));
    assert_eq!(seed.corners[1].im, 0.0);
    assert!(seed.corners[1].re > 0.0);
    assert!(seed.corners[2].im > 0.0);
}

#[test]
fn placed_sides_match_computed_lengths() {
    for preset in Preset::ALL {
        let (tri, w, q) = solved(preset);
        let p = develop(&tri, &w, &q).unwrap();
        let radii = q.radii();
        for f in &p.faces {
            let vs = tri.face_vertices(f.face);
            let edges = tri.opposite_edges(f.face);
            for i in 0..3 {
                let (j, k) = ((i + 1) % 3, (i + 2) % 3);
                let expected = side_length(radii[vs[j]], radii[vs[k]], w.get(edges[i])).unwrap();
                assert!((naive_distance(f.corners[j], f.corners[k]) - expected).abs() < 1e-9);
            }
        }
        assert!(p.max_side_mismatch < 1e-9);
        assert!(p.max_copy_spread < 1e-9);
    }
}

#[test]
fn interior_vertices_close_up() {
    for preset in Preset::ALL {
        let (tri, w, q) = solved(preset);
        let p = develop(&tri, &w, &q).unwrap();
        assert!(!p.closures.is_empty());
        for c in &p.closures {
            assert!(c.error < 1e-8, "{preset:?}: {c:?}");
        }
        let v = verify_primitive_contact(&p, &tri, &w, &VerifyOptions::default()).unwrap();
        assert!(v.max_fan_drift < 1e-8);
    }
}

#[test]
fn measured_angles_reproduce_the_weights() {
    for preset in [Preset::HalfPi, Preset::Mixed] {
        let (tri, w, q) = solved(preset);
        let p = develop(&tri, &w, &q).unwrap();
        let angles = measure_edge_angles(&p).unwrap();
        assert_eq!(angles.len(), tri.edge_count());
        for a in &angles {
            assert!(a.error < 1e-8, "{preset:?}: {a:?}");
        }
    }
}

#[test]
fn packing_edges_are_tangent() {
    let (tri, w, q) = solved(Preset::Zero);
    let p = develop(&tri, &w, &q).unwrap();
    for a in measure_edge_angles(&p).unwrap() {
        assert!((a.inversive_distance - 1.0).abs() < 1e-12, "{a:?}");
        assert!(a.inversive_error < 1e-12);
    }
    let v = verify_primitive_contact(&p, &tri, &w, &VerifyOptions::default()).unwrap();
    assert!(v.all_kept);
    assert!(v.passed);
}

#[test]
fn perturbed_radius_shows_up_in_incident_angles() {
    let (tri, w, q) = solved(Preset::HalfPi);
    let mut p = develop(&tri, &w, &q).unwrap();
    let v = 0;
    p.radii[v] += 1e-3;
    for c in p.copies.iter_mut().filter(|c| c.vertex == v) {
        c.circle.radius += 1e-3;
    }
    let angles = measure_edge_angles(&p).unwrap();
    for (e, edge) in tri.edges().iter().enumerate() {
        if edge.endpoints.contains(&v) && edge.endpoints[0] != edge.endpoints[1] {
            assert!(angles[e].error > 1e-4, "edge {e}: {}", angles[e].error);
        }
    }
}

#[test]
fn developing_from_another_seed_is_an_isometry() {
    let (tri, w, q) = solved(Preset::Mixed);
    let a = develop(&tri, &w, &q).unwrap();
    let b = develop_with(&tri, &w, &q, &DevelopOptions { seed_face: 11, ..Default::default() }).unwrap();
    assert_eq!(a.copies.len(), b.copies.len());
    for i in 0..a.copies.len() {
        assert_eq!(a.copies[i].vertex, b.copies[i].vertex);
        for j in 0..i {
            let da = distance(a.copies[i].circle.center, a.copies[j].circle.center);
            let db = distance(b.copies[i].circle.center, b.copies[j].circle.center);
            assert!((da - db).abs() < 1e-8, "copies {i},{j}: {da} vs {db}");
        }
    }
}

#[test]
fn develop_gates_on_the_residual() {
    let (tri, w, _) = solved(Preset::HalfPi);
    let err = develop(&tri, &w, &default_start(&tri)).unwrap_err();
    assert!(matches!(err, Error::CurvatureGate { .. }), "{err}");
    let (tri, w, q) = solved(Preset::HalfPi);
    let bad = develop_with(&tri, &w, &q, &DevelopOptions { seed_face: 99, ..Default::default() });
    assert!(matches!(bad, Err(Error::Domain(_))));
}

#[test]
fn obtuse_preset_keeps_every_edge() {
    let (tri, w, q) = solved(Preset::Mixed);
    let p = develop(&tri, &w, &q).unwrap();
    let v = verify_primitive_contact(&p, &tri, &w, &VerifyOptions::default()).unwrap();
    assert!(v.all_kept);
    assert!(v.anomalies.is_empty());
    assert!(v.passed);
    assert_eq!(v.contacts.len(), tri.edge_count());
}

/// Two circles meeting a unit-ish circle at 0.9 pi on nearly opposite sides.
fn covered_configuration() -> [HypCircle; 3] {
    let (rw, rv, ru) = (1.0, 0.6, 0.6);
    let t = 0.9 * PI;
    let d = side_length(rv, rw, t).unwrap();
    let w = HypCircle::new(Complex64::new(0.0, 0.0), rw);
    let v = HypCircle::new(polar(d, 0.2), rv);
    let u = HypCircle::new(polar(d, PI - 0.2), ru);
    [v, u, w]
}

#[test]
fn hand_built_covered_lens() {
    let [v, u, w] = covered_configuration();
    // the crossing angles agree with the two-circle formulas used to place them
    let (a, b) = two_circle_angles(v.radius, w.radius, 0.9 * PI).unwrap();
    let placed = distance(v.center, w.center);
    let law = side_length(v.radius, w.radius, 0.9 * PI).unwrap();
    assert!((placed - law).abs() < 1e-12 && a > 0.0 && b > 0.0);
    assert!((v.intersection_angle(&w) - 0.9 * PI).abs() < 1e-9);
    assert!(v.inversive_distance(&u) < 1.0, "v and u must overlap");
    assert!(lens_contained_in(&v, &u, &w, 1e-10));
    let margin = v.intersection_angle(&w) + u.intersection_angle(&w) - v.intersection_angle(&u) - PI;
    assert!(margin >= -1e-9, "{margin}");
    // the lens is not inside either of its own disks' partners in the other order
    assert!(!lens_contained_in(&v, &w, &u, 1e-10));
}

#[test]
fn lens_cases() {
    let o = Complex64::new(0.0, 0.0);
    let big = HypCircle::new(o, 2.0);
    let small = HypCircle::new(polar(0.5, 0.3), 0.4);
    assert!(matches!(big.lens(&small), Lens::Disk(_)));
    let far = HypCircle::new(polar(5.0, 0.0), 0.5);
    assert!(matches!(big.lens(&far), Lens::Empty));
    assert!(!lens_contained_in(&big, &far, &small, 0.0));
    let touching = HypCircle::new(polar(2.5, 0.0), 0.5);
    match big.lens(&touching) {
        Lens::Point(p) | Lens::Region { crossings: [p, _], .. } => assert!((distance(o, p) - 2.0).abs() < 1e-9),
        other => panic!("{other:?}"),
    }
}

#[test]
fn angle_from_distance_handles_tangency() {
    assert_eq!(angle_from_distance(3.0, 1.0, 2.0), 0.0);
    let l = side_length(1.0, 2.0, 1e-6).unwrap();
    let got = angle_from_distance(l, 1.0, 2.0);
    assert!((got - 1e-6).abs() < 1e-9, "{got}");
    let l = side_length(1.0, 2.0, 2.5).unwrap();
    assert!((angle_from_distance(l, 1.0, 2.0) - 2.5).abs() < 1e-12);
}

#[test]
fn svg_output() {
    let (tri, w, q) = solved(Preset::Mixed);
    let p = develop(&tri, &w, &q).unwrap();
    let a = to_svg(&p, &SvgOptions::default());
    let b = to_svg(&p, &SvgOptions::default());
    assert_eq!(a, b);
    assert_eq!(a.matches("<circle class=\"vertex-circle\"").count(), p.copies.len());
    assert_eq!(a.matches("<path class=\"face\"").count(), tri.face_count());
    assert!(a.starts_with("<?xml") && a.trim_end().ends_with("</svg>"));
    let ring = to_svg(&p, &SvgOptions { draw_ring: true, ..Default::default() });
    assert_eq!(ring.matches("ring-face\"").count(), p.ring.len());
}

#[test]
fn empty_drawing_has_only_the_disk() {
    let (tri, w, q) = solved(Preset::Zero);
    let p = develop(&tri, &w, &q).unwrap();
    let s = to_svg(&p, &SvgOptions { draw_triangles: false, draw_circles: false, ..Default::default() });
    assert_eq!(s.matches("<circle").count(), 1);
    assert_eq!(s.matches("<path").count(), 0);
}

/// Screen-space arc endpoints and flags from a path segment `A rx ry 0 0 sweep x y`.
fn arc_passes_through(start: (f64, f64), seg: &str, target: (f64, f64)) -> bool {
    let v: Vec<f64> = seg.trim_start_matches("A ").split_whitespace().map(|s| s.parse().unwrap()).collect();
    let (rho, sweep, end) = (v[0], v[4], (v[5], v[6]));
    // both candidate centers of a circle of radius rho through start and end
    let mid = ((start.0 + end.0) / 2.0, (start.1 + end.1) / 2.0);
    let (dx, dy) = (end.0 - start.0, end.1 - start.1);
    let half = (dx * dx + dy * dy).sqrt() / 2.0;
    let h = (rho * rho - half * half).max(0.0).sqrt();
    let n = (-dy / (2.0 * half), dx / (2.0 * half));
    let ang = |c: (f64, f64), p: (f64, f64)| (p.1 - c.1).atan2(p.0 - c.0);
    for s in [1.0, -1.0] {
        let c = (mid.0 + s * h * n.0, mid.1 + s * h * n.1);
        let (a0, a1, at) = (ang(c, start), ang(c, end), ang(c, target));
        // sweep 1 increases the screen angle
        let span = |from: f64, to: f64| (to - from).rem_euclid(2.0 * PI);
        let (total, part) = if sweep == 1.0 { (span(a0, a1), span(a0, at)) } else { (span(a1, a0), span(at, a0)) };
        let on_circle = (((target.0 - c.0).powi(2) + (target.1 - c.1).powi(2)).sqrt() - rho).abs() < 1e-3;
        // small-arc flag 0 selects the center for which the arc is at most a half turn
        if total <= PI + 1e-9 && on_circle && part <= total {
            return true;
        }
    }
    false
}

proptest! {
    #[test]
    fn svg_geodesics_pass_through_the_hyperbolic_midpoint(
        a in (0.0f64..0.9, 0.0f64..std::f64::consts::TAU), b in (0.0f64..0.9, 0.0f64..std::f64::consts::TAU)
    ) {
        let (za, zb) = (Complex64::from_polar(a.0, a.1), Complex64::from_polar(b.0, b.1));
        prop_assume!((za - zb).norm() > 0.05);
        prop_assume!((za.re * zb.im - za.im * zb.re).abs() > 1e-3);
        let f = Isometry::frame(za, zb);
        let mid = f.apply(polar(distance(za, zb) / 2.0, 0.0));
        let pattern_svg = {
            let size = 800.0;
            let half = size / 2.0;
            let scale = 0.96 * half;
            let s = |z: Complex64| (half + scale * z.re, half - scale * z.im);
            (s(za), s(zb), s(mid))
        };
        let seg = geodesic_segment(za, zb);
        prop_assert!(arc_passes_through(pattern_svg.0, &seg, pattern_svg.2), "{seg}");
    }
}

/// The path segment the renderer emits for one triangle side, recovered from a
/// one-face drawing.
fn geodesic_segment(a: Complex64, b: Complex64) -> String {
    let pattern = DevelopedPattern {
        seed_face: 0,
        tree: vec![None],
        faces: vec![PlacedFace { face: 0, corners: [a, b, Complex64::new(0.0, 0.0)], copies: [0, 1, 2] }],
        copies: vec![],
        edges: vec![],
        ring: vec![],
        radii: vec![],
        weights: vec![],
        max_side_mismatch: 0.0,
        max_copy_spread: 0.0,
        closures: vec![],
        residual: 0.0,
    };
    let svg = to_svg(&pattern, &SvgOptions { draw_circles: false, ..Default::default() });
    let d = svg.split("d=\"").nth(1).unwrap();
    let first = d.split(" A ").nth(1).or_else(|| d.split(" L ").nth(1)).unwrap();
    let seg: String = first.split(" L ").next().unwrap().split(" A ").next().unwrap().to_string();
    format!("A {}", seg.trim())
}
