//! Exact polytope geometry: canonical hulls, Minkowski combinations,
//! membership, simplex helpers, homothety normalization, and planar
//! decomposition. Everything is V-representation over exact rationals.

pub(crate) mod chart;
mod decompose;
mod flagged;
pub(crate) mod hull;
pub(crate) mod lp;
mod simplex;

pub use decompose::decompose_2d;
pub use flagged::{FlaggedPolygon, Face};
pub use simplex::{
    corner_simplex, drop_last_coordinate, homothety_normalize, in_standard_simplex, is_normal_form,
    standard_simplex, touches_all_faces,
};

use num_traits::Zero;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;

use crate::error::{Error, Result};
use crate::rational::{check_coefficient, complement, format_rational, parse_rational, Rational};

/// A point with exact rational coordinates.
pub type Point = Vec<Rational>;

pub(crate) fn format_point(p: &Point) -> String {
    let coords: Vec<String> = p.iter().map(format_rational).collect();
    format!("({})", coords.join(", "))
}

/// A nonempty bounded convex polytope in V-representation.
///
/// The stored vertex list is canonical: exactly the extreme points, sorted
/// lexicographically. Two polytopes are equal as sets iff they are equal as
/// values, so `Eq`/`Ord`/`Hash` all agree with geometric equality.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Polytope {
    dim: usize,
    vertices: Vec<Point>,
}

impl Polytope {
    /// Canonical convex hull of a nonempty point cloud.
    pub fn hull(points: &[Point]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyInput("polytope needs at least one point"));
        }
        let dim = points[0].len();
        if dim == 0 {
            return Err(Error::UnsupportedDimension(0));
        }
        for p in points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: p.len() });
            }
        }
        Ok(Polytope { dim, vertices: hull::extreme_points(points) })
    }

    /// The polytope consisting of a single point.
    pub fn singleton(point: Point) -> Result<Self> {
        Self::hull(std::slice::from_ref(&point))
    }

    /// Ambient dimension.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Canonical vertex list: extreme points in lexicographic order.
    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_singleton(&self) -> bool {
        self.vertices.len() == 1
    }

    /// Dimension of the affine hull (0 for a point, 1 for a segment, ...).
    pub fn affine_dim(&self) -> usize {
        chart::AffineChart::fit(&self.vertices).dim()
    }

    /// Exact membership of a point in the polytope.
    pub fn member(&self, x: &Point) -> Result<bool> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        if self.is_singleton() {
            return Ok(self.vertices[0] == *x);
        }
        // Bounding-box prefilter keeps the LP off the easy rejections.
        for coord in 0..self.dim {
            let mut lo = &self.vertices[0][coord];
            let mut hi = lo;
            for v in &self.vertices[1..] {
                if &v[coord] < lo {
                    lo = &v[coord];
                }
                if &v[coord] > hi {
                    hi = &v[coord];
                }
            }
            if x[coord] < *lo || x[coord] > *hi {
                return Ok(false);
            }
        }
        Ok(lp::convex_weights(&self.vertices, x).is_some())
    }

    /// Exact membership in the relative interior.
    pub fn relint_member(&self, x: &Point) -> Result<bool> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        if self.is_singleton() {
            // A point is its own relative interior.
            return Ok(self.vertices[0] == *x);
        }
        match lp::max_uniform_slack(&self.vertices, x) {
            Some(t) => Ok(t > Rational::zero()),
            None => Ok(false),
        }
    }

    /// Convex combination `p·a + (1-p)·b` (Minkowski-weighted), `p ∈ (0,1)`.
    pub fn combine(p: &Rational, a: &Polytope, b: &Polytope) -> Result<Polytope> {
        check_coefficient(p)?;
        if a.dim != b.dim {
            return Err(Error::DimensionMismatch { expected: a.dim, got: b.dim });
        }
        let q = complement(p);
        // A singleton operand is a pure scale-and-translate of the other
        // side, which preserves extremity and lexicographic order.
        if a.is_singleton() {
            let shift: Point = a.vertices[0].iter().map(|c| c * p).collect();
            let vertices = b
                .vertices
                .iter()
                .map(|v| v.iter().zip(shift.iter()).map(|(c, s)| c * &q + s).collect())
                .collect();
            return Ok(Polytope { dim: a.dim, vertices });
        }
        if b.is_singleton() {
            let shift: Point = b.vertices[0].iter().map(|c| c * &q).collect();
            let vertices = a
                .vertices
                .iter()
                .map(|v| v.iter().zip(shift.iter()).map(|(c, s)| c * p + s).collect())
                .collect();
            return Ok(Polytope { dim: a.dim, vertices });
        }
        let mut points = Vec::with_capacity(a.vertices.len() * b.vertices.len());
        for va in &a.vertices {
            for vb in &b.vertices {
                points.push(
                    va.iter()
                        .zip(vb.iter())
                        .map(|(ca, cb)| ca * p + cb * &q)
                        .collect::<Point>(),
                );
            }
        }
        Polytope::hull(&points)
    }

    /// Plain Minkowski sum `a + b`.
    pub fn sum(a: &Polytope, b: &Polytope) -> Result<Polytope> {
        if a.dim != b.dim {
            return Err(Error::DimensionMismatch { expected: a.dim, got: b.dim });
        }
        if a.is_singleton() {
            return Ok(b.translate(&a.vertices[0]));
        }
        if b.is_singleton() {
            return Ok(a.translate(&b.vertices[0]));
        }
        let mut points = Vec::with_capacity(a.vertices.len() * b.vertices.len());
        for va in &a.vertices {
            for vb in &b.vertices {
                points.push(va.iter().zip(vb.iter()).map(|(x, y)| x + y).collect::<Point>());
            }
        }
        Polytope::hull(&points)
    }

    /// Translation by a vector (order-preserving, no re-hull needed).
    pub fn translate(&self, v: &Point) -> Polytope {
        assert_eq!(v.len(), self.dim, "translation vector dimension");
        let vertices = self
            .vertices
            .iter()
            .map(|p| p.iter().zip(v.iter()).map(|(a, b)| a + b).collect())
            .collect();
        Polytope { dim: self.dim, vertices }
    }

    /// Scaling by a nonzero rational factor.
    pub fn scale(&self, s: &Rational) -> Polytope {
        assert!(!s.is_zero(), "scale factor must be nonzero");
        let mut vertices: Vec<Point> = self
            .vertices
            .iter()
            .map(|p| p.iter().map(|c| c * s).collect())
            .collect();
        vertices.sort();
        Polytope { dim: self.dim, vertices }
    }

    /// True iff every point of `self` lies in `other`.
    pub fn subset_of(&self, other: &Polytope) -> Result<bool> {
        for v in &self.vertices {
            if !other.member(v)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl fmt::Display for Polytope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verts: Vec<String> = self.vertices.iter().map(format_point).collect();
        write!(f, "{{{}}}", verts.join(", "))
    }
}

#[derive(Serialize, Deserialize)]
struct PolytopeRepr {
    dim: usize,
    vertices: Vec<Vec<String>>,
}

impl Serialize for Polytope {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let repr = PolytopeRepr {
            dim: self.dim,
            vertices: self
                .vertices
                .iter()
                .map(|p| p.iter().map(format_rational).collect())
                .collect(),
        };
        repr.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for Polytope {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as DeError;
        let repr = PolytopeRepr::deserialize(de)?;
        let mut points: Vec<Point> = Vec::with_capacity(repr.vertices.len());
        for row in &repr.vertices {
            if row.len() != repr.dim {
                return Err(D::Error::custom(format!(
                    "vertex has {} coordinates, dim is {}",
                    row.len(),
                    repr.dim
                )));
            }
            let mut p = Vec::with_capacity(row.len());
            for s in row {
                p.push(parse_rational(s).map_err(D::Error::custom)?);
            }
            points.push(p);
        }
        if points.is_empty() && repr.dim == 0 {
            return Err(D::Error::custom("polytope needs at least one vertex"));
        }
        Polytope::hull(&points).map_err(D::Error::custom)
    }
}
