use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::disk::{distance, lens_contained_in, HypCircle};
use super::{face_configs, measure_edge_angles, place_across, DevelopedPattern, EdgeAngle};
use crate::complex::{Side, Triangulation};
use crate::conditions::WeightFunction;
use crate::error::{Error, Result};
use crate::geometry::ThreeCircleConfig;

/// Two centers closer than this are the same circle copy.
const SAME_POINT: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    /// An edge passes when its angle error or its inversive-distance error is below this.
    pub angle_tol: f64,
    /// Slack, in hyperbolic distance, of the lens containment test.
    pub containment_tol: f64,
    /// Largest accepted closure error of corner angles and fans.
    pub closure_tol: f64,
    /// Smallest accepted value of `Θ_vw + Θ_uw - Θ_vu - π` at a covered lens.
    pub lemma_tol: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { angle_tol: 1e-8, containment_tol: 1e-10, closure_tol: 1e-8, lemma_tol: 1e-9 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ContactStatus {
    Kept,
    Covered,
}

/// A lens `D_v ∩ D_u` found inside a third disk `D_w`, with the angle inequality at the triple.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContainmentIncident {
    pub edge: usize,
    pub covering_vertex: usize,
    pub covering_center: Complex64,
    pub theta_vw: f64,
    pub theta_uw: f64,
    pub theta_vu: f64,
    /// `Θ_vw + Θ_uw - Θ_vu - π`
    pub margin: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgeContact {
    pub edge: usize,
    pub status: ContactStatus,
    /// Index into the verdict's incidents when covered.
    pub incident: Option<usize>,
}

/// A lens covered by a disk outside the local search neighbourhood.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Anomaly {
    pub edge: usize,
    pub covering_vertex: usize,
    pub covering_center: Complex64,
    /// The covering disk belongs to a face placed across the domain boundary.
    pub boundary_copy: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FanClosure {
    pub vertex: usize,
    pub angle_sum: f64,
    /// Distance between the first placed face and its copy after one full turn.
    pub drift: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PatternVerdict {
    pub angles: Vec<EdgeAngle>,
    pub max_angle_error: f64,
    pub max_inversive_error: f64,
    /// Edges meeting neither the angle nor the inversive-distance tolerance.
    pub angle_failures: Vec<usize>,
    pub contacts: Vec<EdgeContact>,
    pub incidents: Vec<ContainmentIncident>,
    pub anomalies: Vec<Anomaly>,
    pub fans: Vec<FanClosure>,
    pub max_fan_drift: f64,
    pub max_closure_error: f64,
    pub max_side_mismatch: f64,
    pub all_kept: bool,
    pub lemma_holds: bool,
    pub passed: bool,
}

struct Fan {
    /// Every corner circle met while turning around the vertex, with its vertex id.
    circles: Vec<(usize, Complex64)>,
    angle_sum: f64,
    drift: f64,
}

/// Develops the faces around corner `i` of face `f`, turning counterclockwise
/// until the starting corner comes back.
fn fan(tri: &Triangulation, cfgs: &[ThreeCircleConfig], f: usize, i: usize, start: [Complex64; 3]) -> Fan {
    let mut circles = Vec::new();
    let mut angle_sum = 0.0;
    let (mut g, mut j, mut pos) = (f, i, start);
    for _ in 0..tri.degree(tri.face(f)[i].vertex) {
        for c in 0..3 {
            circles.push((tri.face(g)[c].vertex, pos[c]));
        }
        angle_sum += cfgs[g].inner[j];
        let (o, next) = place_across(tri, cfgs, Side { face: g, index: (j + 2) % 3 }, &pos);
        g = o.face;
        j = o.index;
        pos = next;
    }
    let drift = if (g, j) == (f, i) {
        (0..3).map(|c| distance(pos[c], start[c])).fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    Fan { circles, angle_sum, drift }
}

fn dedup(points: &mut Vec<(usize, Complex64)>) {
    let mut out: Vec<(usize, Complex64)> = Vec::with_capacity(points.len());
    for &(v, z) in points.iter() {
        if !out.iter().any(|&(u, y)| u == v && distance(y, z) < SAME_POINT) {
            out.push((v, z));
        }
    }
    *points = out;
}

/// Checks every edge's lens against the disks around both endpoints, compares
/// measured and prescribed angles, and scans the remaining placed disks for
/// coverings the local search would miss.
pub fn verify_primitive_contact(pattern: &DevelopedPattern, tri: &Triangulation, w: &WeightFunction, opts: &VerifyOptions) -> Result<PatternVerdict> {
    if pattern.faces.len() != tri.face_count() || pattern.weights.len() != w.len() {
        return Err(Error::Domain("pattern does not belong to this triangulation".into()));
    }
    let angles = measure_edge_angles(pattern)?;
    let cfgs = face_configs(tri, w, &pattern.radii)?;
    let radius = |v: usize| pattern.radii[v];

    let mut fans = Vec::new();
    for v in 0..tri.vertex_count() {
        let corner = tri.star(v)[0];
        let f = fan(tri, &cfgs, corner.face, corner.index, pattern.faces[corner.face].corners);
        fans.push(FanClosure { vertex: v, angle_sum: f.angle_sum, drift: f.drift });
    }

    let mut far: Vec<(usize, Complex64, bool)> = pattern.copies.iter().map(|c| (c.vertex, c.circle.center, false)).collect();
    for rf in &pattern.ring {
        for c in 0..3 {
            far.push((tri.face(rf.face)[c].vertex, rf.corners[c], true));
        }
    }

    let mut contacts = Vec::new();
    let mut incidents = Vec::new();
    let mut anomalies = Vec::new();
    for (de, measured) in pattern.edges.iter().zip(&angles) {
        let s = de.side;
        let start = pattern.faces[s.face].corners;
        let (iv, iu) = (s.index, (s.index + 1) % 3);
        let (v, u) = (tri.face(s.face)[iv].vertex, tri.face(s.face)[iu].vertex);
        let dv = HypCircle::new(start[iv], radius(v));
        let du = HypCircle::new(start[iu], radius(u));
        let mut local = fan(tri, &cfgs, s.face, iv, start).circles;
        local.extend(fan(tri, &cfgs, s.face, iu, start).circles);
        dedup(&mut local);
        let is_endpoint = |z: Complex64| distance(z, dv.center) < SAME_POINT || distance(z, du.center) < SAME_POINT;

        let mut covering = None;
        for &(x, z) in &local {
            if is_endpoint(z) {
                continue;
            }
            let dw = HypCircle::new(z, radius(x));
            if lens_contained_in(&dv, &du, &dw, opts.containment_tol) {
                covering = Some((x, dw));
                break;
            }
        }
        let incident = covering.map(|(x, dw)| {
            let theta_vw = dv.intersection_angle(&dw);
            let theta_uw = du.intersection_angle(&dw);
            let theta_vu = measured.measured;
            let margin = theta_vw + theta_uw - theta_vu - PI;
            incidents.push(ContainmentIncident {
                edge: de.edge,
                covering_vertex: x,
                covering_center: dw.center,
                theta_vw,
                theta_uw,
                theta_vu,
                margin,
                holds: margin >= -opts.lemma_tol,
            });
            incidents.len() - 1
        });
        contacts.push(EdgeContact {
            edge: de.edge,
            status: if incident.is_some() { ContactStatus::Covered } else { ContactStatus::Kept },
            incident,
        });

        for &(x, z, boundary_copy) in &far {
            if is_endpoint(z) || local.iter().any(|&(y, p)| y == x && distance(p, z) < SAME_POINT) {
                continue;
            }
            let dw = HypCircle::new(z, radius(x));
            if lens_contained_in(&dv, &du, &dw, opts.containment_tol) {
                anomalies.push(Anomaly { edge: de.edge, covering_vertex: x, covering_center: z, boundary_copy });
            }
        }
    }

    let max_angle_error = angles.iter().fold(0.0f64, |m, a| m.max(a.error));
    let max_inversive_error = angles.iter().fold(0.0f64, |m, a| m.max(a.inversive_error));
    let angle_failures: Vec<usize> = angles
        .iter()
        .filter(|a| !(a.error <= opts.angle_tol || a.inversive_error <= opts.angle_tol))
        .map(|a| a.edge)
        .collect();
    let max_fan_drift = fans.iter().fold(0.0f64, |m, f| m.max(f.drift));
    let max_closure_error = pattern
        .closures
        .iter()
        .map(|c| c.error)
        .chain(fans.iter().map(|f| (f.angle_sum - 2.0 * PI).abs()))
        .fold(0.0, f64::max);
    let all_kept = contacts.iter().all(|c| c.status == ContactStatus::Kept);
    let lemma_holds = incidents.iter().all(|i| i.holds);
    let passed = angle_failures.is_empty()
        && max_closure_error <= opts.closure_tol
        && max_fan_drift <= opts.closure_tol
        && lemma_holds
        && anomalies.is_empty();
    Ok(PatternVerdict {
        angles,
        max_angle_error,
        max_inversive_error,
        angle_failures,
        contacts,
        incidents,
        anomalies,
        fans,
        max_fan_drift,
        max_closure_error,
        max_side_mismatch: pattern.max_side_mismatch,
        all_kept,
        lemma_holds,
        passed,
    })
}
