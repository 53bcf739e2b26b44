//! Validators for weight functions: face admissibility, blocking-curve bounds,
//! quad bounds, the nonnegative-gamma condition and the ideal-pattern conditions.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::Serialize;

use crate::complex::{enumerate_blocking_curves, subdivide_cell_complex, BlockingCurve, CellComplex, SubdividedComplex, Triangulation};
use crate::error::{Error, Result};
use crate::geometry::{check_angle_triple, AngleTriple};

/// Default bound on the size of vertex sets searched for blocking curves.
pub const DEFAULT_SIZE_CAP: usize = 6;

/// Tolerance on the per-cell angle sum equality of ideal patterns.
pub const CELL_SUM_TOL: f64 = 1e-12;

/// Neumaier-compensated sum. For the short sums used here it returns the
/// correctly rounded total, so six copies of `2pi/3` compare equal to `4pi`.
pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Exterior intersection angle per edge id, each in `[0, pi)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightFunction(Vec<f64>);

impl WeightFunction {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        for (edge, &value) in values.iter().enumerate() {
            if !(value.is_finite() && (0.0..PI).contains(&value)) {
                return Err(Error::WeightOutOfRange { edge, value, range: "[0, pi)" });
            }
        }
        Ok(WeightFunction(values))
    }

    pub fn uniform(edge_count: usize, theta: f64) -> Result<Self> {
        WeightFunction::new(vec![theta; edge_count])
    }

    pub fn from_map(edge_count: usize, map: &BTreeMap<usize, f64>) -> Result<Self> {
        if let Some((&edge, _)) = map.range(edge_count..).next() {
            return Err(Error::Incidence(format!("weight given for unknown edge {edge}")));
        }
        let values = (0..edge_count)
            .map(|e| map.get(&e).copied().ok_or(Error::MissingWeight { edge: e }))
            .collect::<Result<Vec<_>>>()?;
        WeightFunction::new(values)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, edge: usize) -> f64 {
        self.0[edge]
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    /// `t * w`, for `t` in `[0, 1]`.
    pub fn scaled(&self, t: f64) -> Self {
        WeightFunction(self.0.iter().map(|w| w * t).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&w| w == 0.0)
    }

    /// Angles opposite the three corners of face `f`.
    pub fn face_angles(&self, tri: &Triangulation, f: usize) -> AngleTriple {
        AngleTriple(tri.opposite_edges(f).map(|e| self.0[e]))
    }

    pub fn to_map(&self) -> BTreeMap<usize, f64> {
        self.0.iter().copied().enumerate().collect()
    }
}

/// Errors unless `w` has exactly one value per edge of `tri`.
pub fn ensure_total(tri: &Triangulation, w: &WeightFunction) -> Result<()> {
    if w.len() < tri.edge_count() {
        return Err(Error::MissingWeight { edge: w.len() });
    }
    if w.len() > tri.edge_count() {
        return Err(Error::Incidence(format!("weight given for unknown edge {}", tri.edge_count())));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Condition {
    C1,
    C2,
    C3,
    R1,
    H1,
    H2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Pass,
    Fail,
    Unverified,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessKind {
    Face,
    Curve,
    Quad,
    Cell,
}

/// An edge set together with how far it is from violating its inequality
/// (negative or zero margins are violations).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub kind: WitnessKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub id: Option<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
    pub margin: f64,
}

/// How much of the blocking-curve family a capped check covered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Coverage {
    pub size_cap: usize,
    pub curves_checked: usize,
    /// True when the cap reaches `|V| - 1`, so no larger vertex set can bound a disk.
    pub complete: bool,
    pub beyond_cap: Status,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub condition: Condition,
    pub status: Status,
    /// Every violation on failure, otherwise the tightest item.
    pub witnesses: Vec<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coverage: Option<Coverage>,
}

impl ConditionReport {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    /// Smallest margin over the reported witnesses.
    pub fn margin(&self) -> Option<f64> {
        self.witnesses.iter().map(|w| w.margin).reduce(f64::min)
    }
}

/// Folds per-item results into a report. `ok` decides the pass/fail of each
/// item; margins are only used to pick the tightest witness.
fn summarize(condition: Condition, items: Vec<(bool, Witness)>, coverage: Option<Coverage>) -> ConditionReport {
    let failures: Vec<Witness> = items.iter().filter(|(ok, _)| !ok).map(|(_, w)| w.clone()).collect();
    if !failures.is_empty() {
        return ConditionReport { condition, status: Status::Fail, witnesses: failures, coverage };
    }
    let tightest = items
        .into_iter()
        .map(|(_, w)| w)
        .reduce(|a, b| if b.margin < a.margin { b } else { a });
    ConditionReport { condition, status: Status::Pass, witnesses: tightest.into_iter().collect(), coverage }
}

/// Each face is admissible: angle sum at most pi, or every pair sum strictly
/// below pi plus the third angle.
pub fn check_c1(tri: &Triangulation, w: &WeightFunction) -> Result<ConditionReport> {
    ensure_total(tri, w)?;
    let items = (0..tri.face_count())
        .map(|f| {
            let check = check_angle_triple(&w.face_angles(tri, f));
            let witness = Witness {
                kind: WitnessKind::Face,
                id: Some(f),
                vertices: tri.face_vertices(f).to_vec(),
                edges: tri.opposite_edges(f).to_vec(),
                margin: check.margin,
            };
            (check.admissible, witness)
        })
        .collect();
    Ok(summarize(Condition::C1, items, None))
}

fn curve_items(curves: &[BlockingCurve], w: &WeightFunction) -> Vec<(bool, Witness)> {
    curves
        .iter()
        .map(|c| {
            let sum = compensated_sum(c.boundary_edges.iter().map(|&e| w.get(e)));
            let bound = (c.s as f64 - 2.0) * PI;
            let witness = Witness {
                kind: WitnessKind::Curve,
                id: None,
                vertices: c.vertex_set.clone(),
                edges: c.boundary_edges.clone(),
                margin: bound - sum,
            };
            (sum < bound, witness)
        })
        .collect()
}

fn coverage(tri: &Triangulation, size_cap: usize, curves_checked: usize) -> Coverage {
    let cap = size_cap.min(tri.vertex_count().saturating_sub(1));
    let complete = cap + 1 >= tri.vertex_count();
    Coverage {
        size_cap: cap,
        curves_checked,
        complete,
        beyond_cap: if complete { Status::Pass } else { Status::Unverified },
    }
}

/// Every enumerated blocking curve of length `s` carries total weight strictly
/// below `(s - 2) pi`.
pub fn check_c2(tri: &Triangulation, w: &WeightFunction, size_cap: usize) -> Result<ConditionReport> {
    ensure_total(tri, w)?;
    let curves = enumerate_blocking_curves(tri, size_cap);
    let items = curve_items(&curves, w);
    Ok(summarize(Condition::C2, items, Some(coverage(tri, size_cap, curves.len()))))
}

/// The boundary of the union of the two faces at every edge carries total
/// weight strictly below `2 pi`. Edges with the same face on both sides bound
/// no such quadrilateral and are skipped.
pub fn check_c3(tri: &Triangulation, w: &WeightFunction) -> Result<ConditionReport> {
    ensure_total(tri, w)?;
    let mut items = Vec::new();
    for (e, edge) in tri.edges().iter().enumerate() {
        let [a, b] = edge.sides;
        if a.face == b.face {
            continue;
        }
        let boundary: Vec<usize> = [a, b]
            .iter()
            .flat_map(|s| [1, 2].map(|d| tri.face(s.face)[(s.index + d) % 3].edge))
            .collect();
        let sum = compensated_sum(boundary.iter().map(|&x| w.get(x)));
        let witness = Witness {
            kind: WitnessKind::Quad,
            id: Some(e),
            vertices: Vec::new(),
            edges: boundary,
            margin: 2.0 * PI - sum,
        };
        items.push((sum < 2.0 * PI, witness));
    }
    Ok(summarize(Condition::C3, items, None))
}

/// Every face has `cos T_i + cos T_j cos T_k >= 0` for all three rotations.
pub fn check_r1(tri: &Triangulation, w: &WeightFunction) -> Result<ConditionReport> {
    ensure_total(tri, w)?;
    let items = (0..tri.face_count())
        .map(|f| {
            let gamma = w.face_angles(tri, f).gamma();
            let margin = gamma[0].min(gamma[1]).min(gamma[2]);
            let witness = Witness {
                kind: WitnessKind::Face,
                id: Some(f),
                vertices: tri.face_vertices(f).to_vec(),
                edges: tri.opposite_edges(f).to_vec(),
                margin,
            };
            (margin >= 0.0, witness)
        })
        .collect();
    Ok(summarize(Condition::R1, items, None))
}

/// Weights on the star subdivision: `w(e) - eps` on original edges, 0 on spokes.
pub fn ideal_weights(sub: &SubdividedComplex, w: &WeightFunction, eps: f64) -> Result<WeightFunction> {
    if w.len() != sub.primal_edges.len() {
        return Err(Error::MissingWeight { edge: w.len().min(sub.primal_edges.len()) });
    }
    if !(eps.is_finite() && eps >= 0.0) {
        return Err(Error::Domain(format!("eps must be finite and non-negative, got {eps}")));
    }
    let mut values = vec![0.0; sub.triangulation.edge_count()];
    for &e in &sub.primal_edges {
        let v = w.get(e) - eps;
        if v < 0.0 {
            return Err(Error::WeightOutOfRange { edge: e, value: v, range: "[0, pi) after subtracting eps" });
        }
        values[e] = v;
    }
    WeightFunction::new(values)
}

/// Per-cell angle sum equality and the blocking-curve bound on the subdivision.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdealConditions {
    pub h1: ConditionReport,
    pub h2: ConditionReport,
    pub probe_eps: f64,
}

impl IdealConditions {
    pub fn passed(&self) -> bool {
        self.h1.passed() && self.h2.passed()
    }
}

pub fn check_ideal_conditions(
    complex: &CellComplex,
    w: &WeightFunction,
    size_cap: usize,
    probe_eps: f64,
) -> Result<IdealConditions> {
    if w.len() != complex.edge_count() {
        return Err(Error::MissingWeight { edge: w.len().min(complex.edge_count()) });
    }
    if let Some(edge) = w.values().iter().position(|&x| x == 0.0) {
        return Err(Error::ZeroWeight { edge });
    }
    let items = complex
        .cells()
        .iter()
        .enumerate()
        .map(|(c, cell)| {
            let edges: Vec<usize> = cell.iter().map(|k| k.edge).collect();
            let sum = compensated_sum(edges.iter().map(|&e| w.get(e)));
            let dev = (sum - (cell.len() as f64 - 2.0) * PI).abs();
            let witness = Witness {
                kind: WitnessKind::Cell,
                id: Some(c),
                vertices: cell.iter().map(|k| k.vertex).collect(),
                edges,
                margin: CELL_SUM_TOL - dev,
            };
            (dev <= CELL_SUM_TOL, witness)
        })
        .collect();
    let h1 = summarize(Condition::H1, items, None);

    let sub = subdivide_cell_complex(complex)?;
    let wd = ideal_weights(&sub, w, probe_eps)?;
    let tri = &sub.triangulation;
    let curves: Vec<BlockingCurve> = enumerate_blocking_curves(tri, size_cap)
        .into_iter()
        .filter(|c| !(c.vertex_set.len() == 1 && sub.is_star_vertex(c.vertex_set[0])))
        .collect();
    let items = curve_items(&curves, &wd);
    let h2 = summarize(Condition::H2, items, Some(coverage(tri, size_cap, curves.len())));
    Ok(IdealConditions { h1, h2, probe_eps })
}
