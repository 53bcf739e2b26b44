//! Oriented closed surfaces given as triangulations or polygonal cell complexes.
//!
//! Multi-edges, loops and faces glued to themselves are allowed: edges are
//! first-class ids and are never inferred from vertex pairs.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One corner of an oriented polygon. The polygon's side starting at this
/// corner runs along `edge` from `vertex` to the next corner's vertex; it
/// follows the edge's own direction unless `reversed` is set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Corner {
    pub vertex: usize,
    pub edge: usize,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub reversed: bool,
}

impl Corner {
    pub fn new(vertex: usize, edge: usize, reversed: bool) -> Self {
        Corner { vertex, edge, reversed }
    }
}

/// Position of a polygon side: side `index` of polygon `face`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Side {
    pub face: usize,
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Edge {
    /// `[tail, head]`
    pub endpoints: [usize; 2],
    /// The side traversing the edge forward, then the one traversing it backward.
    pub sides: [Side; 2],
}

/// Unvalidated incidence data, as read from a document.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawComplex {
    pub vertex_count: usize,
    pub edges: Vec<[usize; 2]>,
    pub polygons: Vec<Vec<Corner>>,
}

impl RawComplex {
    /// Simplicial input given as counterclockwise vertex triples; an edge is
    /// created for every unordered vertex pair, directed from the smaller id.
    pub fn from_vertex_triples(vertex_count: usize, triples: &[[usize; 3]]) -> Self {
        let mut ids: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut edges = Vec::new();
        let mut polygons = Vec::new();
        for t in triples {
            let mut poly = Vec::with_capacity(3);
            for i in 0..3 {
                let (a, b) = (t[i], t[(i + 1) % 3]);
                let key = (a.min(b), a.max(b));
                let id = *ids.entry(key).or_insert_with(|| {
                    edges.push([key.0, key.1]);
                    edges.len() - 1
                });
                poly.push(Corner::new(a, id, a > b));
            }
            polygons.push(poly);
        }
        RawComplex { vertex_count, edges, polygons }
    }
}

/// Validated combinatorics shared by triangulations and cell complexes.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Surface {
    vertex_count: usize,
    edges: Vec<Edge>,
    polygons: Vec<Vec<Corner>>,
    /// Corners around each vertex in counterclockwise order, as `Side`s naming the corner.
    stars: Vec<Vec<Side>>,
    genus: u32,
}

fn validate_surface(raw: &RawComplex, triangles_only: bool) -> Result<Surface> {
    let n = raw.vertex_count;
    if raw.polygons.is_empty() || n == 0 {
        return Err(Error::EmptyComplex);
    }
    for (e, ends) in raw.edges.iter().enumerate() {
        if ends[0] >= n || ends[1] >= n {
            return Err(Error::Incidence(format!("edge {e} has an endpoint outside 0..{n}")));
        }
    }
    let mut sides: Vec<Vec<(Side, bool)>> = vec![Vec::new(); raw.edges.len()];
    for (f, poly) in raw.polygons.iter().enumerate() {
        let m = poly.len();
        if m < 3 || (triangles_only && m != 3) {
            return Err(Error::Incidence(format!("face {f} has {m} corners")));
        }
        for (i, c) in poly.iter().enumerate() {
            if c.vertex >= n {
                return Err(Error::Incidence(format!("face {f} uses vertex {} outside 0..{n}", c.vertex)));
            }
            let Some(ends) = raw.edges.get(c.edge) else {
                return Err(Error::NonManifold(format!("face {f} references undeclared edge {}", c.edge)));
            };
            let next = poly[(i + 1) % m].vertex;
            let (from, to) = if c.reversed { (ends[1], ends[0]) } else { (ends[0], ends[1]) };
            if from != c.vertex || to != next {
                return Err(Error::Incidence(format!(
                    "side {i} of face {f} runs {}->{next} but edge {} joins {}->{}",
                    c.vertex, c.edge, from, to
                )));
            }
            sides[c.edge].push((Side { face: f, index: i }, c.reversed));
        }
    }
    let mut edges = Vec::with_capacity(raw.edges.len());
    for (e, s) in sides.iter().enumerate() {
        if s.len() != 2 {
            return Err(Error::NonManifold(format!("edge {e} borders {} face sides", s.len())));
        }
        if s[0].1 == s[1].1 {
            return Err(Error::NonOrientable { edge: e });
        }
        let (fwd, back) = if s[0].1 { (s[1].0, s[0].0) } else { (s[0].0, s[1].0) };
        edges.push(Edge { endpoints: raw.edges[e], sides: [fwd, back] });
    }

    let polygons = raw.polygons.clone();
    let other = |s: Side| -> Side {
        let e = &edges[polygons[s.face][s.index].edge];
        if e.sides[0] == s {
            e.sides[1]
        } else {
            e.sides[0]
        }
    };

    // Rotation around each vertex: from corner (f, i) cross the incoming side i - 1.
    let mut stars: Vec<Vec<Side>> = vec![Vec::new(); n];
    let mut seen: BTreeSet<Side> = BTreeSet::new();
    for (f, poly) in polygons.iter().enumerate() {
        for (i, c) in poly.iter().enumerate() {
            let start = Side { face: f, index: i };
            if seen.contains(&start) {
                continue;
            }
            if !stars[c.vertex].is_empty() {
                return Err(Error::NonManifold(format!(
                    "the neighbourhood of vertex {} is not a disk",
                    c.vertex
                )));
            }
            let mut cur = start;
            loop {
                seen.insert(cur);
                stars[c.vertex].push(cur);
                let m = polygons[cur.face].len();
                let incoming = Side { face: cur.face, index: (cur.index + m - 1) % m };
                cur = other(incoming);
                if cur == start {
                    break;
                }
            }
        }
    }
    if stars.iter().any(Vec::is_empty) {
        return Err(Error::Disconnected);
    }

    let mut reached = vec![false; polygons.len()];
    let mut stack = vec![0];
    reached[0] = true;
    while let Some(f) = stack.pop() {
        for i in 0..polygons[f].len() {
            let g = other(Side { face: f, index: i }).face;
            if !reached[g] {
                reached[g] = true;
                stack.push(g);
            }
        }
    }
    if reached.iter().any(|r| !r) {
        return Err(Error::Disconnected);
    }

    let chi = n as i64 - edges.len() as i64 + polygons.len() as i64;
    if chi % 2 != 0 {
        return Err(Error::NonManifold(format!("odd Euler characteristic {chi}")));
    }
    let genus = (2 - chi) / 2;
    if genus <= 1 {
        return Err(Error::GenusTooLow { genus });
    }
    Ok(Surface { vertex_count: n, edges, polygons, stars, genus: genus as u32 })
}

/// A validated triangulation of a closed oriented surface of genus > 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Triangulation {
    surface: Surface,
    faces: Vec<[Corner; 3]>,
}

pub fn validate_triangulation(raw: &RawComplex) -> Result<Triangulation> {
    let surface = validate_surface(raw, true)?;
    let faces = surface.polygons.iter().map(|p| [p[0], p[1], p[2]]).collect();
    Ok(Triangulation { surface, faces })
}

impl Triangulation {
    pub fn vertex_count(&self) -> usize {
        self.surface.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.surface.edges.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn genus(&self) -> u32 {
        self.surface.genus
    }

    pub fn euler_characteristic(&self) -> i64 {
        2 - 2 * self.surface.genus as i64
    }

    pub fn edges(&self) -> &[Edge] {
        &self.surface.edges
    }

    pub fn faces(&self) -> &[[Corner; 3]] {
        &self.faces
    }

    pub fn face(&self, f: usize) -> &[Corner; 3] {
        &self.faces[f]
    }

    /// Vertex ids of a face, counterclockwise.
    pub fn face_vertices(&self, f: usize) -> [usize; 3] {
        self.faces[f].map(|c| c.vertex)
    }

    /// Edge of the side opposite corner `i` of face `f`.
    pub fn opposite_edge(&self, f: usize, i: usize) -> usize {
        self.faces[f][(i + 1) % 3].edge
    }

    /// Edge ids opposite the three corners of face `f`.
    pub fn opposite_edges(&self, f: usize) -> [usize; 3] {
        [self.opposite_edge(f, 0), self.opposite_edge(f, 1), self.opposite_edge(f, 2)]
    }

    /// The side on the other face across side `s`.
    pub fn across(&self, s: Side) -> Side {
        let e = &self.surface.edges[self.faces[s.face][s.index].edge];
        if e.sides[0] == s {
            e.sides[1]
        } else {
            e.sides[0]
        }
    }

    /// Corners at vertex `v`, counterclockwise, each named by its face and corner index.
    pub fn star(&self, v: usize) -> &[Side] {
        &self.surface.stars[v]
    }

    /// Number of corners at `v` (edge ends, counting loops twice).
    pub fn degree(&self, v: usize) -> usize {
        self.surface.stars[v].len()
    }

    /// Distinct neighbours of `v` along edges, excluding `v` itself.
    pub fn neighbors(&self, v: usize) -> BTreeSet<usize> {
        self.surface
            .edges
            .iter()
            .filter(|e| e.endpoints[0] != e.endpoints[1])
            .filter_map(|e| {
                if e.endpoints[0] == v {
                    Some(e.endpoints[1])
                } else if e.endpoints[1] == v {
                    Some(e.endpoints[0])
                } else {
                    None
                }
            })
            .collect()
    }

    pub fn to_raw(&self) -> RawComplex {
        RawComplex {
            vertex_count: self.vertex_count(),
            edges: self.surface.edges.iter().map(|e| e.endpoints).collect(),
            polygons: self.surface.polygons.clone(),
        }
    }
}

/// A validated polygonal decomposition of a closed oriented surface of genus > 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellComplex {
    surface: Surface,
}

pub fn validate_cell_complex(raw: &RawComplex) -> Result<CellComplex> {
    Ok(CellComplex { surface: validate_surface(raw, false)? })
}

impl CellComplex {
    pub fn vertex_count(&self) -> usize {
        self.surface.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.surface.edges.len()
    }

    pub fn cells(&self) -> &[Vec<Corner>] {
        &self.surface.polygons
    }

    pub fn edges(&self) -> &[Edge] {
        &self.surface.edges
    }

    pub fn genus(&self) -> u32 {
        self.surface.genus
    }
}

/// Star subdivision of a cell complex: one new vertex inside every cell,
/// joined to each of the cell's corners.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubdividedComplex {
    pub triangulation: Triangulation,
    /// Original edges; they keep their ids.
    pub primal_edges: Vec<usize>,
    /// Spokes from star vertices to cell corners.
    pub star_edges: Vec<usize>,
    /// One per cell, in cell order; ids follow the original vertices.
    pub star_vertices: Vec<usize>,
    /// Number of corners of the cell around each star vertex.
    pub cell_sizes: Vec<usize>,
    /// Cell containing each subdivided face.
    pub face_cell: Vec<usize>,
}

impl SubdividedComplex {
    pub fn primal_vertex_count(&self) -> usize {
        self.triangulation.vertex_count() - self.star_vertices.len()
    }

    pub fn is_star_vertex(&self, v: usize) -> bool {
        v >= self.primal_vertex_count()
    }

    pub fn is_primal_edge(&self, e: usize) -> bool {
        e < self.primal_edges.len()
    }
}

/// Face `k` of a cell `c` with corners `(v_k, e_k)` is `(star, v_k, v_{k+1})`,
/// with primal side `e_k` and spokes to `v_k` and `v_{k+1}`.
pub fn subdivide_cell_complex(complex: &CellComplex) -> Result<SubdividedComplex> {
    let n = complex.vertex_count();
    let e0 = complex.edge_count();
    let mut edges: Vec<[usize; 2]> = complex.edges().iter().map(|e| e.endpoints).collect();
    let mut polygons = Vec::new();
    let mut star_vertices = Vec::new();
    let mut star_edges = Vec::new();
    let mut cell_sizes = Vec::new();
    let mut face_cell = Vec::new();
    for (c, cell) in complex.cells().iter().enumerate() {
        let star = n + c;
        star_vertices.push(star);
        cell_sizes.push(cell.len());
        let first_spoke = edges.len();
        for corner in cell {
            star_edges.push(edges.len());
            edges.push([star, corner.vertex]);
        }
        let m = cell.len();
        for (k, corner) in cell.iter().enumerate() {
            let next = cell[(k + 1) % m];
            polygons.push(vec![
                Corner::new(star, first_spoke + k, false),
                *corner,
                Corner::new(next.vertex, first_spoke + (k + 1) % m, true),
            ]);
            face_cell.push(c);
        }
    }
    let raw = RawComplex { vertex_count: n + complex.cells().len(), edges, polygons };
    let triangulation = validate_triangulation(&raw)?;
    Ok(SubdividedComplex {
        triangulation,
        primal_edges: (0..e0).collect(),
        star_edges,
        star_vertices,
        cell_sizes,
        face_cell,
    })
}

/// Boundary of the closed neighbourhood of a connected vertex set whose open
/// star is a disk.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlockingCurve {
    /// Sorted vertex ids.
    pub vertex_set: Vec<usize>,
    /// Edges opposite the single inner corner of every face meeting the set in
    /// exactly one corner, in face order, with multiplicity.
    pub boundary_edges: Vec<usize>,
    pub s: usize,
}

/// Cell counts of the open star of a vertex set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StarCounts {
    pub vertices: usize,
    /// Edges with at least one endpoint in the set.
    pub edges: usize,
    /// Faces with at least one corner in the set.
    pub faces_meeting: usize,
    /// Faces with at least two corners in the set.
    pub faces_inner: usize,
    /// Faces with exactly one corner in the set.
    pub boundary: usize,
}

impl StarCounts {
    pub fn euler_characteristic(&self) -> i64 {
        self.vertices as i64 - self.edges as i64 + self.faces_meeting as i64
    }
}

pub fn star_counts(tri: &Triangulation, set: &[usize]) -> StarCounts {
    let mut inside = vec![false; tri.vertex_count()];
    for &v in set {
        inside[v] = true;
    }
    let edges = tri
        .edges()
        .iter()
        .filter(|e| inside[e.endpoints[0]] || inside[e.endpoints[1]])
        .count();
    let mut counts = StarCounts { vertices: set.len(), edges, faces_meeting: 0, faces_inner: 0, boundary: 0 };
    for face in tri.faces() {
        match face.iter().filter(|c| inside[c.vertex]).count() {
            0 => {}
            1 => {
                counts.faces_meeting += 1;
                counts.boundary += 1;
            }
            _ => {
                counts.faces_meeting += 1;
                counts.faces_inner += 1;
            }
        }
    }
    counts
}

fn blocking_curve(tri: &Triangulation, set: &[usize]) -> Option<BlockingCurve> {
    if star_counts(tri, set).euler_characteristic() != 1 {
        return None;
    }
    let mut boundary_edges = Vec::new();
    for (f, face) in tri.faces().iter().enumerate() {
        let mut hits = (0..3).filter(|&i| set.binary_search(&face[i].vertex).is_ok());
        if let (Some(i), None) = (hits.next(), hits.next()) {
            boundary_edges.push(tri.opposite_edge(f, i));
        }
    }
    let s = boundary_edges.len();
    Some(BlockingCurve { vertex_set: set.to_vec(), boundary_edges, s })
}

/// Every connected vertex set of size at most `size_cap` (clamped to `|V| - 1`)
/// whose open star is a disk, sorted lexicographically by vertex ids.
pub fn enumerate_blocking_curves(tri: &Triangulation, size_cap: usize) -> Vec<BlockingCurve> {
    let cap = size_cap.min(tri.vertex_count().saturating_sub(1));
    let adj: Vec<Vec<usize>> = (0..tri.vertex_count()).map(|v| tri.neighbors(v).into_iter().collect()).collect();
    let mut sets = Vec::new();
    if cap > 0 {
        for root in 0..tri.vertex_count() {
            let ext: Vec<usize> = adj[root].iter().copied().filter(|&u| u > root).collect();
            extend_connected(&adj, &mut vec![root], ext, root, cap, &mut sets);
        }
    }
    let mut curves: Vec<BlockingCurve> = sets
        .into_iter()
        .filter_map(|mut s| {
            s.sort_unstable();
            blocking_curve(tri, &s)
        })
        .collect();
    curves.sort_by(|a, b| a.vertex_set.cmp(&b.vertex_set));
    curves
}

/// Enumerates each connected induced subgraph containing `root` as its
/// smallest vertex exactly once.
fn extend_connected(
    adj: &[Vec<usize>],
    current: &mut Vec<usize>,
    mut ext: Vec<usize>,
    root: usize,
    cap: usize,
    out: &mut Vec<Vec<usize>>,
) {
    out.push(current.clone());
    if current.len() == cap {
        return;
    }
    while let Some(w) = ext.pop() {
        let mut next = ext.clone();
        for &u in &adj[w] {
            if u <= root || next.contains(&u) || current.contains(&u) {
                continue;
            }
            // only vertices not yet adjacent to the current set
            if current.iter().any(|&c| adj[c].binary_search(&u).is_ok()) {
                continue;
            }
            next.push(u);
        }
        current.push(w);
        extend_connected(adj, current, next, root, cap, out);
        current.pop();
    }
}
