//! Probability-simplex helpers: standard and corner simplices, exact
//! membership, coordinate projection, face contact, and the
//! scale-and-translate normal form for convex bodies inside a corner simplex.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::geometry::{format_point, Point, Polytope};
use crate::rational::Rational;

/// The standard probability simplex in `Q^n`: convex hull of the `n` unit
/// vectors. Points are full probability vectors.
pub fn standard_simplex(n: usize) -> Result<Polytope> {
    if n == 0 {
        return Err(Error::UnsupportedDimension(0));
    }
    let mut vertices = Vec::with_capacity(n);
    for i in 0..n {
        let mut v = vec![Rational::zero(); n];
        v[i] = Rational::one();
        vertices.push(v);
    }
    Polytope::hull(&vertices)
}

/// The corner simplex in `Q^d`: convex hull of the origin and the `d` unit
/// vectors. This is the image of the standard simplex in `Q^{d+1}` under
/// dropping the last coordinate.
pub fn corner_simplex(d: usize) -> Result<Polytope> {
    if d == 0 {
        return Err(Error::UnsupportedDimension(0));
    }
    let mut vertices = Vec::with_capacity(d + 1);
    vertices.push(vec![Rational::zero(); d]);
    for i in 0..d {
        let mut v = vec![Rational::zero(); d];
        v[i] = Rational::one();
        vertices.push(v);
    }
    Polytope::hull(&vertices)
}

/// Exact membership of a point in the standard simplex of its own dimension:
/// all coordinates nonnegative and summing to one.
pub fn in_standard_simplex(x: &Point) -> bool {
    if x.is_empty() {
        return false;
    }
    let mut total = Rational::zero();
    for c in x {
        if c < &Rational::zero() {
            return false;
        }
        total += c;
    }
    total.is_one()
}

/// Forget the last coordinate of every vertex. For subsets of the standard
/// simplex this is an affine isomorphism onto its image, but the function is
/// safe for arbitrary polytopes: the image is re-canonicalized.
pub fn drop_last_coordinate(p: &Polytope) -> Result<Polytope> {
    if p.dim() < 2 {
        return Err(Error::UnsupportedDimension(p.dim()));
    }
    let points: Vec<Point> = p
        .vertices()
        .iter()
        .map(|v| v[..v.len() - 1].to_vec())
        .collect();
    Polytope::hull(&points)
}

/// True iff `c`, a subset of the standard simplex in its ambient dimension,
/// meets every facet `{x : x_i = 0}`; equivalently each coordinate attains
/// minimum zero over the vertices.
pub fn touches_all_faces(c: &Polytope) -> Result<bool> {
    for v in c.vertices() {
        if !in_standard_simplex(v) {
            return Err(Error::OutsideDomain(format!(
                "vertex {} is not a probability vector",
                format_point(v)
            )));
        }
    }
    for coord in 0..c.dim() {
        let min = c
            .vertices()
            .iter()
            .map(|v| &v[coord])
            .min()
            .expect("polytope has vertices");
        if !min.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// True iff `a` is in normal form inside the corner simplex of its ambient
/// dimension: it lies in the corner simplex, every coordinate attains
/// minimum zero, and the coordinate sum attains maximum one.
pub fn is_normal_form(a: &Polytope) -> bool {
    let d = a.dim();
    for v in a.vertices() {
        let mut total = Rational::zero();
        for c in v {
            if c < &Rational::zero() {
                return false;
            }
            total += c;
        }
        if total > Rational::one() {
            return false;
        }
    }
    for coord in 0..d {
        let min = a.vertices().iter().map(|v| &v[coord]).min().unwrap();
        if !min.is_zero() {
            return false;
        }
    }
    let max_sum = a
        .vertices()
        .iter()
        .map(|v| v.iter().sum::<Rational>())
        .max()
        .unwrap();
    max_sum.is_one()
}

/// Normalize a non-singleton subset of the corner simplex by the unique
/// positive homothety `x ↦ (x - t) / s` taking it to normal form, where
/// `t_i = min_i(a)` and `s = max σ(a) - Σ t_i`.
///
/// The scale `s` is strictly positive for every non-singleton input, and the
/// map is an affine bijection, so extremity of vertices is preserved.
pub fn homothety_normalize(a: &Polytope) -> Result<Polytope> {
    if a.is_singleton() {
        return Err(Error::SingletonInput);
    }
    let d = a.dim();
    let mut t: Point = Vec::with_capacity(d);
    for coord in 0..d {
        let min = a.vertices().iter().map(|v| v[coord].clone()).min().unwrap();
        t.push(min);
    }
    let max_sum = a
        .vertices()
        .iter()
        .map(|v| v.iter().sum::<Rational>())
        .max()
        .unwrap();
    let t_sum: Rational = t.iter().sum();
    let s = max_sum - t_sum;
    if s <= Rational::zero() {
        // Only possible when every vertex equals t, i.e. a singleton, which
        // was rejected above.
        return Err(Error::SingletonInput);
    }
    let mut vertices: Vec<Point> = a
        .vertices()
        .iter()
        .map(|v| v.iter().zip(t.iter()).map(|(c, ti)| (c - ti) / &s).collect())
        .collect();
    vertices.sort();
    Polytope::hull(&vertices)
}
