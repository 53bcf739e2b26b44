//! Development of a solved pattern into the Poincaré disk, angle measurement,
//! primitive-contact verification and SVG output.

pub mod disk;
mod svg;
mod verify;

use std::collections::VecDeque;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::complex::{Side, Triangulation};
use crate::conditions::WeightFunction;
use crate::error::{Error, Result};
use crate::geometry::ThreeCircleConfig;
use crate::solver::{curvature, face_config, RadiusVector};

pub use disk::{angle_from_distance, distance, lens_contained_in, polar, HypCircle, Isometry, Lens};
pub use svg::{to_svg, SvgOptions};
pub use verify::{
    verify_primitive_contact, Anomaly, ContactStatus, ContainmentIncident, EdgeContact, FanClosure, PatternVerdict,
    VerifyOptions,
};

/// Default bound on `max |k|` accepted by [`develop`].
pub const LAYOUT_GATE: f64 = 1e-8;
/// Side-length mismatch above which development is abandoned.
pub const DRIFT_LIMIT: f64 = 1e-6;
/// `|I|` beyond `1 + NON_INTERSECTING_TOL` means two circles of an edge do not meet.
pub const NON_INTERSECTING_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DevelopOptions {
    pub gate: f64,
    /// Face placed first, with corner 0 at the origin and side 0 along the positive real axis.
    pub seed_face: usize,
}

impl Default for DevelopOptions {
    fn default() -> Self {
        DevelopOptions { gate: LAYOUT_GATE, seed_face: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlacedFace {
    pub face: usize,
    /// Centers of the three corner circles, in corner order.
    pub corners: [Complex64; 3],
    /// Vertex copy of each corner.
    pub copies: [usize; 3],
}

/// One vertex of the fundamental domain; corners glued across tree edges share a copy.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VertexCopy {
    pub vertex: usize,
    pub circle: HypCircle,
    /// `(face, corner)` pairs at this copy.
    pub corners: Vec<(usize, usize)>,
    /// All corners of the vertex belong to this copy.
    pub interior: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DevelopedEdge {
    pub edge: usize,
    /// Side of a placed face along which the edge is measured.
    pub side: Side,
    /// Copies at the start and end of that side.
    pub copies: [usize; 2],
    /// The edge is crossed by the face spanning tree.
    pub interior: bool,
}

/// A neighbouring face placed across a side of the fundamental domain.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RingFace {
    pub face: usize,
    pub across: Side,
    pub corners: [Complex64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VertexClosure {
    pub copy: usize,
    pub vertex: usize,
    pub angle_sum: f64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DevelopedPattern {
    pub seed_face: usize,
    /// Per face, the parent face and the side of this face shared with it.
    pub tree: Vec<Option<(usize, usize)>>,
    pub faces: Vec<PlacedFace>,
    pub copies: Vec<VertexCopy>,
    pub edges: Vec<DevelopedEdge>,
    pub ring: Vec<RingFace>,
    pub radii: Vec<f64>,
    pub weights: Vec<f64>,
    /// Largest difference between a placed side and its computed length.
    pub max_side_mismatch: f64,
    /// Largest distance between the placements of one copy from different faces.
    pub max_copy_spread: f64,
    /// Placed corner-angle sums at interior copies.
    pub closures: Vec<VertexClosure>,
    pub residual: f64,
}

/// Per-edge comparison of the measured and prescribed intersection angles.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgeAngle {
    pub edge: usize,
    pub distance: f64,
    pub inversive_distance: f64,
    pub measured: f64,
    pub prescribed: f64,
    /// `|measured - prescribed|`
    pub error: f64,
    /// `|I - cos(prescribed)|`, well conditioned near tangency where the angle is not.
    pub inversive_error: f64,
}

pub(crate) fn face_configs(tri: &Triangulation, w: &WeightFunction, radii: &[f64]) -> Result<Vec<ThreeCircleConfig>> {
    (0..tri.face_count()).map(|f| face_config(tri, w, radii, f)).collect()
}

/// Corner positions of a face with corner `t` at `from` and corner `t + 1` towards `toward`.
pub(crate) fn place(cfg: &ThreeCircleConfig, t: usize, from: Complex64, toward: Complex64) -> [Complex64; 3] {
    let (t1, t2) = ((t + 1) % 3, (t + 2) % 3);
    let frame = Isometry::frame(from, toward);
    let mut p = [Complex64::new(0.0, 0.0); 3];
    p[t] = from;
    p[t1] = frame.apply(disk::polar(cfg.sides[t2], 0.0));
    p[t2] = frame.apply(disk::polar(cfg.sides[t1], cfg.inner[t]));
    p
}

/// Placement of the face across side `s` of a placed face.
pub(crate) fn place_across(tri: &Triangulation, cfgs: &[ThreeCircleConfig], s: Side, pos: &[Complex64; 3]) -> (Side, [Complex64; 3]) {
    let other = tri.across(s);
    let p = place(&cfgs[other.face], other.index, pos[(s.index + 1) % 3], pos[s.index]);
    (other, p)
}

/// Interior angle at `apex` of the geodesic triangle with the other two corners `a`, `b`.
pub(crate) fn corner_angle(apex: Complex64, a: Complex64, b: Complex64) -> f64 {
    let f = Isometry::frame(apex, a);
    let z = f.apply_inverse(b);
    z.arg().abs()
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.0[hi] = lo;
        }
    }
}

/// Breadth-first spanning tree of the dual graph rooted at face 0; returns, per
/// face, the neighbouring faces across tree sides.
fn spanning_tree(tri: &Triangulation) -> Vec<Vec<(usize, Side)>> {
    let n = tri.face_count();
    let mut adj = vec![Vec::new(); n];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    while let Some(f) = queue.pop_front() {
        for index in 0..3 {
            let s = Side { face: f, index };
            let o = tri.across(s);
            if !seen[o.face] {
                seen[o.face] = true;
                adj[f].push((index, o));
                adj[o.face].push((o.index, s));
                queue.push_back(o.face);
            }
        }
    }
    for a in &mut adj {
        a.sort_by_key(|(i, _)| *i);
    }
    adj.into_iter().map(|a| a.into_iter().map(|(_, o)| (o.face, o)).collect()).collect()
}

fn tree_sides(tri: &Triangulation, adj: &[Vec<(usize, Side)>]) -> Vec<[bool; 3]> {
    let mut marks = vec![[false; 3]; tri.face_count()];
    for nbrs in adj {
        for (_, o) in nbrs {
            marks[o.face][o.index] = true;
        }
    }
    marks
}

/// Lays the solved triangles out in the Poincaré disk along a spanning tree of
/// the dual graph, one copy of every face.
pub fn develop(tri: &Triangulation, w: &WeightFunction, q: &RadiusVector) -> Result<DevelopedPattern> {
    develop_with(tri, w, q, &DevelopOptions::default())
}

pub fn develop_with(tri: &Triangulation, w: &WeightFunction, q: &RadiusVector, opts: &DevelopOptions) -> Result<DevelopedPattern> {
    if opts.seed_face >= tri.face_count() {
        return Err(Error::Domain(format!("seed face {} out of range", opts.seed_face)));
    }
    let residual = curvature(tri, w, q)?.max_abs();
    if !(residual < opts.gate) {
        return Err(Error::CurvatureGate { residual, gate: opts.gate });
    }
    let radii = q.radii();
    let cfgs = face_configs(tri, w, &radii)?;
    let adj = spanning_tree(tri);
    let in_tree = tree_sides(tri, &adj);
    let nf = tri.face_count();

    let mut pos: Vec<Option<[Complex64; 3]>> = vec![None; nf];
    let mut tree = vec![None; nf];
    let seed = opts.seed_face;
    pos[seed] = Some(place(&cfgs[seed], 0, Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)));
    let mut queue = VecDeque::from([seed]);
    let mut uf = UnionFind((0..3 * nf).collect());
    while let Some(f) = queue.pop_front() {
        let pf = pos[f].expect("queued faces are placed");
        for &(g, o) in &adj[f] {
            if pos[g].is_some() {
                continue;
            }
            let s = tri.across(o);
            let (_, pg) = place_across(tri, &cfgs, s, &pf);
            pos[g] = Some(pg);
            tree[g] = Some((f, o.index));
            queue.push_back(g);
        }
    }
    for f in 0..nf {
        for s in 0..3 {
            if in_tree[f][s] {
                let o = tri.across(Side { face: f, index: s });
                uf.union(3 * f + s, 3 * o.face + (o.index + 1) % 3);
                uf.union(3 * f + (s + 1) % 3, 3 * o.face + o.index);
            }
        }
    }
    let pos: Vec<[Complex64; 3]> = pos.into_iter().map(|p| p.expect("dual graph is connected")).collect();

    let mut copy_of_root = vec![usize::MAX; 3 * nf];
    let mut copies: Vec<VertexCopy> = Vec::new();
    let mut max_copy_spread = 0.0f64;
    for node in 0..3 * nf {
        let root = uf.find(node);
        let (f, i) = (node / 3, node % 3);
        let v = tri.face(f)[i].vertex;
        if copy_of_root[root] == usize::MAX {
            copy_of_root[root] = copies.len();
            copies.push(VertexCopy {
                vertex: v,
                circle: HypCircle::new(pos[f][i], radii[v]),
                corners: Vec::new(),
                interior: false,
            });
        }
        let c = &mut copies[copy_of_root[root]];
        max_copy_spread = max_copy_spread.max(distance(c.circle.center, pos[f][i]));
        c.corners.push((f, i));
    }
    for c in &mut copies {
        c.interior = c.corners.len() == tri.degree(c.vertex);
    }
    let faces: Vec<PlacedFace> = (0..nf)
        .map(|f| PlacedFace {
            face: f,
            corners: pos[f],
            copies: [0, 1, 2].map(|i| copy_of_root[uf.find(3 * f + i)]),
        })
        .collect();

    let mut max_side_mismatch = 0.0f64;
    for (f, cfg) in cfgs.iter().enumerate() {
        for i in 0..3 {
            let placed = distance(pos[f][(i + 1) % 3], pos[f][(i + 2) % 3]);
            max_side_mismatch = max_side_mismatch.max((placed - cfg.sides[i]).abs());
        }
    }
    if max_side_mismatch > DRIFT_LIMIT {
        return Err(Error::NumericDrift { mismatch: max_side_mismatch });
    }

    let edges = tri
        .edges()
        .iter()
        .enumerate()
        .map(|(e, edge)| {
            let side = edge.sides[0];
            let fc = &faces[side.face];
            DevelopedEdge {
                edge: e,
                side,
                copies: [fc.copies[side.index], fc.copies[(side.index + 1) % 3]],
                interior: in_tree[side.face][side.index],
            }
        })
        .collect();

    let mut ring = Vec::new();
    for f in 0..nf {
        for s in 0..3 {
            if !in_tree[f][s] {
                let across = Side { face: f, index: s };
                let (o, corners) = place_across(tri, &cfgs, across, &pos[f]);
                ring.push(RingFace { face: o.face, across, corners });
            }
        }
    }

    let closures = copies
        .iter()
        .enumerate()
        .filter(|(_, c)| c.interior)
        .map(|(id, c)| {
            let angle_sum: f64 = c
                .corners
                .iter()
                .map(|&(f, i)| corner_angle(pos[f][i], pos[f][(i + 1) % 3], pos[f][(i + 2) % 3]))
                .sum();
            VertexClosure { copy: id, vertex: c.vertex, angle_sum, error: (angle_sum - 2.0 * PI).abs() }
        })
        .collect();

    Ok(DevelopedPattern {
        seed_face: seed,
        tree,
        faces,
        copies,
        edges,
        ring,
        radii,
        weights: w.values().to_vec(),
        max_side_mismatch,
        max_copy_spread,
        closures,
        residual,
    })
}

/// Intersection angle of every edge measured from the placed circle centers.
pub fn measure_edge_angles(pattern: &DevelopedPattern) -> Result<Vec<EdgeAngle>> {
    pattern
        .edges
        .iter()
        .map(|de| {
            let [a, b] = de.copies.map(|c| &pattern.copies[c]);
            let fc = &pattern.faces[de.side.face];
            let za = fc.corners[de.side.index];
            let zb = fc.corners[(de.side.index + 1) % 3];
            let d = distance(za, zb);
            let (ra, rb) = (a.circle.radius, b.circle.radius);
            let one_minus = 2.0 * (0.5 * (ra + rb + d)).sinh() * (0.5 * (ra + rb - d)).sinh() / (ra.sinh() * rb.sinh());
            let inv = 1.0 - one_minus;
            if !(inv.abs() <= 1.0 + NON_INTERSECTING_TOL) {
                return Err(Error::NonIntersecting { edge: de.edge, value: inv });
            }
            let measured = angle_from_distance(d, ra, rb);
            let prescribed = pattern.weights[de.edge];
            let inversive_error = (one_minus - 2.0 * (0.5 * prescribed).sin().powi(2)).abs();
            Ok(EdgeAngle {
                edge: de.edge,
                distance: d,
                inversive_distance: inv,
                measured,
                prescribed,
                error: (measured - prescribed).abs(),
                inversive_error,
            })
        })
        .collect()
}
