//! Flagged polygons: convex planar sets that need not be closed.
//!
//! A `FlaggedPolygon` stores the boundary cycle of a polygon together with
//! an inclusion flag per vertex and per open edge; the two-dimensional
//! interior is always included. The cycle may carry extra collinear
//! subdivision points, so sets like "open triangle plus one boundary point"
//! are representable even when the distinguished point is not a corner.
//!
//! Segments lying between two points x and y decompose along the face
//! structure, which reduces convexity checking and the visibility hull to a
//! finite face-to-face reachability table.

use std::collections::BTreeSet;

use num_traits::Zero;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::geometry::hull::ccw_hull_cycle_2d;
use crate::geometry::{format_point, Point, Polytope};
use crate::rational::{check_coefficient, complement, format_rational, parse_rational, Rational};

/// A face of the subdivided boundary-plus-interior structure.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Face {
    /// Cycle point `i`.
    Vertex(usize),
    /// Open segment from cycle point `i` to its successor.
    Edge(usize),
    /// The open two-dimensional interior (absent for flat polygons).
    Interior,
}

/// A convex planar set with per-face inclusion flags.
///
/// The canonical cycle runs counterclockwise from the lexicographically
/// smallest point (for genuinely two-dimensional polygons) or ascends
/// lexicographically (for collinear point sets). Constructors accept any
/// rotation or reflection of a valid boundary walk and canonicalize it.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FlaggedPolygon {
    cycle: Vec<Point>,
    vertex_flags: Vec<bool>,
    edge_flags: Vec<bool>,
    affdim: usize,
}

fn cross(o: &Point, a: &Point, b: &Point) -> Rational {
    (&a[0] - &o[0]) * (&b[1] - &o[1]) - (&a[1] - &o[1]) * (&b[0] - &o[0])
}

fn all_collinear(points: &[Point]) -> bool {
    if points.len() <= 2 {
        return true;
    }
    points[2..]
        .iter()
        .all(|p| cross(&points[0], &points[1], p).is_zero())
}

/// Strict betweenness for collinear points, using the fact that the
/// lexicographic order is monotone along any line.
fn strictly_between(a: &Point, b: &Point, p: &Point) -> bool {
    (a < p && p < b) || (b < p && p < a)
}

impl FlaggedPolygon {
    /// Build from a boundary walk with one flag per point and one per open
    /// edge (n edges for a polygon, n-1 for a flat path). The walk is
    /// validated, canonicalized, and the flagged set is checked for
    /// convexity and for having the whole polygon as its closure.
    pub fn new(
        cycle: Vec<Point>,
        vertex_flags: Vec<bool>,
        edge_flags: Vec<bool>,
    ) -> Result<Self> {
        if cycle.is_empty() {
            return Err(Error::EmptyInput("flagged polygon needs at least one point"));
        }
        for p in &cycle {
            if p.len() != 2 {
                return Err(Error::DimensionMismatch { expected: 2, got: p.len() });
            }
        }
        if vertex_flags.len() != cycle.len() {
            return Err(Error::InvalidFlags(format!(
                "{} vertex flags for {} cycle points",
                vertex_flags.len(),
                cycle.len()
            )));
        }
        let mut sorted = cycle.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != cycle.len() {
            return Err(Error::DuplicateElement("cycle point listed twice".into()));
        }
        let fp = if all_collinear(&cycle) {
            Self::new_path(cycle, vertex_flags, edge_flags)?
        } else {
            Self::new_polygon(cycle, vertex_flags, edge_flags)?
        };
        fp.check_closure_covered()?;
        fp.check_convex()?;
        Ok(fp)
    }

    /// The all-included flagged version of a closed polytope in the plane.
    pub fn closed(p: &Polytope) -> Result<Self> {
        if p.dim() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, got: p.dim() });
        }
        let cycle = if all_collinear(p.vertices()) {
            p.vertices().to_vec()
        } else {
            ccw_hull_cycle_2d(p.vertices())
        };
        let n = cycle.len();
        let edges = if all_collinear(&cycle) { n - 1 } else { n };
        Self::new(cycle, vec![true; n], vec![true; edges])
    }

    fn new_path(cycle: Vec<Point>, vertex_flags: Vec<bool>, edge_flags: Vec<bool>) -> Result<Self> {
        let n = cycle.len();
        if edge_flags.len() != n - 1 {
            return Err(Error::InvalidFlags(format!(
                "{} edge flags for a path with {} points",
                edge_flags.len(),
                n
            )));
        }
        if n == 1 {
            return Ok(FlaggedPolygon { cycle, vertex_flags, edge_flags, affdim: 0 });
        }
        let ascending = (0..n - 1).all(|i| cycle[i] < cycle[i + 1]);
        let descending = (0..n - 1).all(|i| cycle[i] > cycle[i + 1]);
        if ascending {
            Ok(FlaggedPolygon { cycle, vertex_flags, edge_flags, affdim: 1 })
        } else if descending {
            let mut c = cycle;
            c.reverse();
            let mut vf = vertex_flags;
            vf.reverse();
            let mut ef = edge_flags;
            ef.reverse();
            Ok(FlaggedPolygon { cycle: c, vertex_flags: vf, edge_flags: ef, affdim: 1 })
        } else {
            Err(Error::InvalidPolytope(
                "collinear cycle must walk its line monotonically".into(),
            ))
        }
    }

    fn new_polygon(
        cycle: Vec<Point>,
        vertex_flags: Vec<bool>,
        edge_flags: Vec<bool>,
    ) -> Result<Self> {
        let n = cycle.len();
        if edge_flags.len() != n {
            return Err(Error::InvalidFlags(format!(
                "{} edge flags for a polygon cycle with {} points",
                edge_flags.len(),
                n
            )));
        }
        // Rebuild the canonical subdivided cycle from the point set: hull
        // corners counterclockwise from the lexicographic minimum, with the
        // remaining points slotted into the open edges they lie on.
        let corners = ccw_hull_cycle_2d(&cycle);
        let m = corners.len();
        let mut canon: Vec<Point> = Vec::with_capacity(n);
        for j in 0..m {
            let a = &corners[j];
            let b = &corners[(j + 1) % m];
            canon.push(a.clone());
            let mut subs: Vec<Point> = cycle
                .iter()
                .filter(|p| {
                    *p != a && *p != b && cross(a, b, p).is_zero() && strictly_between(a, b, p)
                })
                .cloned()
                .collect();
            subs.sort();
            if b < a {
                subs.reverse();
            }
            canon.extend(subs);
        }
        if canon.len() != n {
            return Err(Error::InvalidPolytope(
                "cycle contains a point strictly inside its hull".into(),
            ));
        }
        let idx0 = cycle
            .iter()
            .position(|p| p == &canon[0])
            .expect("canonical start comes from the input points");
        let forward = (0..n).all(|j| cycle[(idx0 + j) % n] == canon[j]);
        let backward = (0..n).all(|j| cycle[(idx0 + n - j) % n] == canon[j % n]);
        let (vperm, eperm): (Vec<usize>, Vec<usize>) = if forward {
            ((0..n).map(|j| (idx0 + j) % n).collect(), (0..n).map(|j| (idx0 + j) % n).collect())
        } else if backward {
            (
                (0..n).map(|j| (idx0 + n - j) % n).collect(),
                (0..n).map(|j| (idx0 + 2 * n - j - 1) % n).collect(),
            )
        } else {
            return Err(Error::InvalidPolytope(
                "cycle does not walk the polygon boundary in order".into(),
            ));
        };
        let vf: Vec<bool> = vperm.iter().map(|&i| vertex_flags[i]).collect();
        let ef: Vec<bool> = eperm.iter().map(|&i| edge_flags[i]).collect();
        Ok(FlaggedPolygon { cycle: canon, vertex_flags: vf, edge_flags: ef, affdim: 2 })
    }

    /// Closure invariant: the closure of the flagged set must be the whole
    /// polygon. With the interior always included this is automatic in the
    /// two-dimensional case; flat shapes need all their open edges.
    fn check_closure_covered(&self) -> Result<()> {
        match self.affdim {
            0 => {
                if !self.vertex_flags[0] {
                    return Err(Error::InvalidFlags("a single point must be included".into()));
                }
            }
            1 => {
                if let Some(i) = self.edge_flags.iter().position(|f| !f) {
                    return Err(Error::InvalidFlags(format!(
                        "open edge {i} of a flat polygon is excluded, so the closure of the \
                         flagged set is not the whole polygon"
                    )));
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// Convexity: every open segment between included face representatives
    /// must meet only included faces.
    fn check_convex(&self) -> Result<()> {
        let inc = self.included_faces();
        let inc_set: BTreeSet<Face> = inc.iter().copied().collect();
        for &f in &inc {
            for &g in &inc {
                for h in self.met(f, g) {
                    if !inc_set.contains(&h) {
                        return Err(Error::InvalidFlags(format!(
                            "flagged set is not convex: {f:?} and {g:?} are included but the \
                             segment between them crosses excluded {h:?}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// The boundary walk (counterclockwise from the lexicographic minimum,
    /// or the ascending path for flat shapes).
    pub fn cycle(&self) -> &[Point] {
        &self.cycle
    }

    pub fn vertex_flags(&self) -> &[bool] {
        &self.vertex_flags
    }

    pub fn edge_flags(&self) -> &[bool] {
        &self.edge_flags
    }

    /// Affine dimension of the underlying polygon (0, 1, or 2).
    pub fn affine_dim(&self) -> usize {
        self.affdim
    }

    /// The closed polygon underlying the flagged set.
    pub fn closure(&self) -> Polytope {
        Polytope::hull(&self.cycle).expect("cycle is nonempty")
    }

    /// All faces of the subdivided structure.
    pub fn faces(&self) -> Vec<Face> {
        let mut out: Vec<Face> = (0..self.cycle.len()).map(Face::Vertex).collect();
        out.extend((0..self.edge_flags.len()).map(Face::Edge));
        if self.affdim == 2 {
            out.push(Face::Interior);
        }
        out
    }

    /// Whether a face belongs to the flagged set.
    pub fn face_flag(&self, face: Face) -> bool {
        match face {
            Face::Vertex(i) => self.vertex_flags[i],
            Face::Edge(i) => self.edge_flags[i],
            Face::Interior => self.affdim == 2,
        }
    }

    pub fn included_faces(&self) -> Vec<Face> {
        self.faces().into_iter().filter(|&f| self.face_flag(f)).collect()
    }

    /// An exact rational point in the relative interior of a face.
    pub fn face_representative(&self, face: Face) -> Point {
        let two = Rational::new(2.into(), 1.into());
        match face {
            Face::Vertex(i) => self.cycle[i].clone(),
            Face::Edge(i) => {
                let a = &self.cycle[i];
                let b = &self.cycle[(i + 1) % self.cycle.len()];
                vec![(&a[0] + &b[0]) / &two, (&a[1] + &b[1]) / &two]
            }
            Face::Interior => {
                let n = Rational::new((self.cycle.len() as i64).into(), 1.into());
                let mut x = Rational::zero();
                let mut y = Rational::zero();
                for p in &self.cycle {
                    x += &p[0];
                    y += &p[1];
                }
                vec![x / &n, y / &n]
            }
        }
    }

    /// Maximal collinear stretches of the boundary walk, each listed as an
    /// alternating vertex/edge face sequence including both end corners.
    fn runs(&self) -> Vec<Vec<Face>> {
        let n = self.cycle.len();
        if self.affdim <= 1 {
            let mut run = Vec::with_capacity(2 * n);
            for i in 0..n {
                run.push(Face::Vertex(i));
                if i + 1 < n {
                    run.push(Face::Edge(i));
                }
            }
            return vec![run];
        }
        let corners: Vec<usize> = (0..n)
            .filter(|&i| {
                let prev = &self.cycle[(i + n - 1) % n];
                let next = &self.cycle[(i + 1) % n];
                !cross(prev, &self.cycle[i], next).is_zero()
            })
            .collect();
        let m = corners.len();
        let mut out = Vec::with_capacity(m);
        for j in 0..m {
            let start = corners[j];
            let end = corners[(j + 1) % m];
            let mut run = vec![Face::Vertex(start)];
            let mut i = start;
            while i != end {
                run.push(Face::Edge(i));
                i = (i + 1) % n;
                run.push(Face::Vertex(i));
            }
            out.push(run);
        }
        out
    }

    /// The faces met by the open segment between representatives of two
    /// faces. Independent of the chosen representatives: along a common
    /// collinear run the segment sweeps everything strictly between (plus
    /// the endpoint faces themselves when they are edges); otherwise the
    /// open segment dives straight into the interior.
    fn met(&self, f: Face, g: Face) -> Vec<Face> {
        if f == g {
            return match f {
                Face::Vertex(_) => vec![],
                Face::Edge(_) | Face::Interior => vec![f],
            };
        }
        if f == Face::Interior || g == Face::Interior {
            return vec![Face::Interior];
        }
        for run in self.runs() {
            let pf = run.iter().position(|&x| x == f);
            let pg = run.iter().position(|&x| x == g);
            if let (Some(a), Some(b)) = (pf, pg) {
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                let mut out: Vec<Face> = run[lo + 1..hi].to_vec();
                if matches!(f, Face::Edge(_)) {
                    out.push(f);
                }
                if matches!(g, Face::Edge(_)) {
                    out.push(g);
                }
                out.sort();
                out.dedup();
                return out;
            }
        }
        vec![Face::Interior]
    }

    /// The visibility hull: the set of points x such that for every a in
    /// the flagged set, the whole open segment (x, a) stays inside it.
    /// Decided facewise over the subdivided structure; the result shares
    /// this polygon's cycle.
    pub fn vih(&self) -> FlaggedPolygon {
        let inc = self.included_faces();
        let inc_set: BTreeSet<Face> = inc.iter().copied().collect();
        let keep = |f: Face| {
            inc.iter().all(|&g| self.met(f, g).iter().all(|h| inc_set.contains(h)))
        };
        let vertex_flags: Vec<bool> = (0..self.cycle.len()).map(|i| keep(Face::Vertex(i))).collect();
        let edge_flags: Vec<bool> =
            (0..self.edge_flags.len()).map(|i| keep(Face::Edge(i))).collect();
        let out = FlaggedPolygon {
            cycle: self.cycle.clone(),
            vertex_flags,
            edge_flags,
            affdim: self.affdim,
        };
        debug_assert!(out.check_convex().is_ok());
        out
    }

    /// Exact membership of a point in the flagged set.
    pub fn contains(&self, p: &Point) -> Result<bool> {
        if p.len() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, got: p.len() });
        }
        Ok(match self.locate(p) {
            Some(face) => self.face_flag(face),
            None => false,
        })
    }

    /// Which face of the structure a point lies on, if any.
    fn locate(&self, p: &Point) -> Option<Face> {
        let n = self.cycle.len();
        match self.affdim {
            0 => (p == &self.cycle[0]).then_some(Face::Vertex(0)),
            1 => {
                if let Some(i) = self.cycle.iter().position(|c| c == p) {
                    return Some(Face::Vertex(i));
                }
                (0..n - 1)
                    .find(|&i| {
                        cross(&self.cycle[i], &self.cycle[i + 1], p).is_zero()
                            && strictly_between(&self.cycle[i], &self.cycle[i + 1], p)
                    })
                    .map(Face::Edge)
            }
            _ => {
                let mut boundary = false;
                for i in 0..n {
                    let c = cross(&self.cycle[i], &self.cycle[(i + 1) % n], p);
                    if c < Rational::zero() {
                        return None;
                    }
                    if c.is_zero() {
                        boundary = true;
                    }
                }
                if !boundary {
                    return Some(Face::Interior);
                }
                if let Some(i) = self.cycle.iter().position(|c| c == p) {
                    return Some(Face::Vertex(i));
                }
                (0..n)
                    .find(|&i| {
                        let a = &self.cycle[i];
                        let b = &self.cycle[(i + 1) % n];
                        cross(a, b, p).is_zero() && strictly_between(a, b, p)
                    })
                    .map(Face::Edge)
            }
        }
    }

    /// Remove subdivision points whose flag agrees with both neighboring
    /// edges, yielding the unique minimal representation of the same set.
    pub fn simplified(&self) -> FlaggedPolygon {
        let n = self.cycle.len();
        if self.affdim == 0 {
            return self.clone();
        }
        let removable: Vec<bool> = (0..n)
            .map(|i| {
                let (prev_edge, next_edge) = if self.affdim == 2 {
                    ((i + n - 1) % n, i)
                } else {
                    if i == 0 || i == n - 1 {
                        return false;
                    }
                    (i - 1, i)
                };
                if self.affdim == 2 {
                    let prev = &self.cycle[(i + n - 1) % n];
                    let next = &self.cycle[(i + 1) % n];
                    if !cross(prev, &self.cycle[i], next).is_zero() {
                        return false;
                    }
                }
                self.vertex_flags[i] == self.edge_flags[prev_edge]
                    && self.vertex_flags[i] == self.edge_flags[next_edge]
            })
            .collect();
        let kept: Vec<usize> = (0..n).filter(|&i| !removable[i]).collect();
        if kept.len() == n {
            return self.clone();
        }
        let cycle: Vec<Point> = kept.iter().map(|&i| self.cycle[i].clone()).collect();
        let vertex_flags: Vec<bool> = kept.iter().map(|&i| self.vertex_flags[i]).collect();
        let edge_count = if self.affdim == 2 { kept.len() } else { kept.len() - 1 };
        let edge_flags: Vec<bool> = (0..edge_count).map(|j| self.edge_flags[kept[j]]).collect();
        FlaggedPolygon { cycle, vertex_flags, edge_flags, affdim: self.affdim }
    }

    /// Whether two flagged polygons denote the same point set.
    pub fn set_eq(&self, other: &FlaggedPolygon) -> bool {
        self.simplified() == other.simplified()
    }

    /// The closure of the pointwise combination `p·A + (1-p)·B`, computed
    /// from the included faces only: the hull of pairwise combinations of
    /// the closed included faces. For valid inputs this must agree with the
    /// combination of the two closures.
    pub fn combine_closure(
        p: &Rational,
        a: &FlaggedPolygon,
        b: &FlaggedPolygon,
    ) -> Result<Polytope> {
        check_coefficient(p)?;
        let q = complement(p);
        let gen_a = a.included_generators();
        let gen_b = b.included_generators();
        let mut points = Vec::with_capacity(gen_a.len() * gen_b.len());
        for x in &gen_a {
            for y in &gen_b {
                points.push(vec![&x[0] * p + &y[0] * &q, &x[1] * p + &y[1] * &q]);
            }
        }
        Polytope::hull(&points)
    }

    /// Vertex points of the closures of all included faces.
    fn included_generators(&self) -> Vec<Point> {
        let n = self.cycle.len();
        let mut set: BTreeSet<Point> = BTreeSet::new();
        for face in self.included_faces() {
            match face {
                Face::Vertex(i) => {
                    set.insert(self.cycle[i].clone());
                }
                Face::Edge(i) => {
                    set.insert(self.cycle[i].clone());
                    set.insert(self.cycle[(i + 1) % n].clone());
                }
                Face::Interior => {
                    set.extend(self.cycle.iter().cloned());
                }
            }
        }
        set.into_iter().collect()
    }
}

#[derive(Serialize, Deserialize)]
struct FlaggedRepr {
    dim: usize,
    vertices: Vec<Vec<String>>,
    vertex_flags: Vec<bool>,
    edge_flags: Vec<bool>,
}

impl Serialize for FlaggedPolygon {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let repr = FlaggedRepr {
            dim: 2,
            vertices: self
                .cycle
                .iter()
                .map(|p| p.iter().map(format_rational).collect())
                .collect(),
            vertex_flags: self.vertex_flags.clone(),
            edge_flags: self.edge_flags.clone(),
        };
        repr.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for FlaggedPolygon {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as DeError;
        let repr = FlaggedRepr::deserialize(de)?;
        if repr.dim != 2 {
            return Err(D::Error::custom(format!(
                "flagged polygons live in the plane, got dim {}",
                repr.dim
            )));
        }
        let mut cycle: Vec<Point> = Vec::with_capacity(repr.vertices.len());
        for row in &repr.vertices {
            if row.len() != 2 {
                return Err(D::Error::custom(format!(
                    "cycle point has {} coordinates, expected 2",
                    row.len()
                )));
            }
            let mut p = Vec::with_capacity(2);
            for s in row {
                p.push(parse_rational(s).map_err(D::Error::custom)?);
            }
            cycle.push(p);
        }
        FlaggedPolygon::new(cycle, repr.vertex_flags, repr.edge_flags).map_err(D::Error::custom)
    }
}

impl std::fmt::Display for FlaggedPolygon {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = (0..self.cycle.len())
            .map(|i| {
                format!(
                    "{}{}",
                    format_point(&self.cycle[i]),
                    if self.vertex_flags[i] { "+" } else { "-" }
                )
            })
            .collect();
        let edges: Vec<&str> =
            self.edge_flags.iter().map(|&e| if e { "+" } else { "-" }).collect();
        write!(f, "cycle [{}] edges [{}]", parts.join(", "), edges.join(""))
    }
}
