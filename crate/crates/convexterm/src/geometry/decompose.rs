//! Minkowski decomposition of planar polytopes.
//!
//! A polygon with at least four edges always splits as a Minkowski sum of
//! two smaller polygons: the edge vectors of any polygon sum to zero, so for
//! four or more edges the kernel of the 2×k edge matrix has dimension at
//! least two and contains a direction independent of the all-ones vector.
//! Splitting each edge by such a direction (rescaled into [0,1]) yields two
//! edge walks that close up and sum back to the original polygon. Points,
//! segments, and triangles admit no such split.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::geometry::chart::AffineChart;
use crate::geometry::hull::ccw_hull_cycle_2d;
use crate::geometry::{Point, Polytope};
use crate::rational::Rational;

/// Split a polytope of affine dimension at most 2 into a nontrivial
/// Minkowski sum `P = B + C`, if one exists.
///
/// Returns `None` for points, segments, and triangles (the indecomposable
/// planar shapes) and `Some((b, c))` with `b + c = p` otherwise; neither
/// summand is a point or a homothet of `p`. Inputs of affine dimension 3 or
/// more are rejected.
pub fn decompose_2d(p: &Polytope) -> Result<Option<(Polytope, Polytope)>> {
    let affdim = p.affine_dim();
    if affdim > 2 {
        return Err(Error::UnsupportedDimension(affdim));
    }
    let k = p.vertex_count();
    if k <= 3 {
        return Ok(None);
    }

    // Work in planar coordinates: identity when the ambient space is the
    // plane, otherwise a chart onto the affine hull.
    let chart = if p.dim() == 2 { None } else { Some(AffineChart::fit(p.vertices())) };
    let local: Vec<Point> = match &chart {
        None => p.vertices().to_vec(),
        Some(ch) => p
            .vertices()
            .iter()
            .map(|v| ch.to_local(v).expect("vertex lies on its own affine hull"))
            .collect(),
    };
    let cycle = ccw_hull_cycle_2d(&local);
    debug_assert_eq!(cycle.len(), k);

    let edges: Vec<[Rational; 2]> = (0..k)
        .map(|i| {
            let a = &cycle[i];
            let b = &cycle[(i + 1) % k];
            [&b[0] - &a[0], &b[1] - &a[1]]
        })
        .collect();

    // A kernel direction independent of the all-ones vector; guaranteed to
    // exist because the kernel has dimension k - 2 >= 2.
    let w = kernel_direction(&edges).expect("edge matrix kernel has a free direction");
    let lo = w.iter().min().unwrap().clone();
    let hi = w.iter().max().unwrap().clone();
    debug_assert!(hi > lo);
    let span = &hi - &lo;
    let lambda: Vec<Rational> = w.iter().map(|wi| (wi - &lo) / &span).collect();

    let walk = |weights: &dyn Fn(usize) -> Rational, start: &Point| -> Vec<Point> {
        let mut pos = start.clone();
        let mut pts = vec![pos.clone()];
        for (i, e) in edges.iter().enumerate() {
            let t = weights(i);
            pos = vec![&pos[0] + &e[0] * &t, &pos[1] + &e[1] * &t];
            pts.push(pos.clone());
        }
        pts
    };
    let b_local = walk(&|i| lambda[i].clone(), &cycle[0]);
    let c_local = walk(&|i| Rational::one() - &lambda[i], &vec![Rational::zero(); 2]);

    let to_ambient_affine = |pts: &[Point]| -> Vec<Point> {
        match &chart {
            None => pts.to_vec(),
            Some(ch) => pts.iter().map(|q| ch.from_local(q)).collect(),
        }
    };
    let to_ambient_linear = |pts: &[Point]| -> Vec<Point> {
        match &chart {
            None => pts.to_vec(),
            Some(ch) => pts.iter().map(|q| ch.from_local_linear(q)).collect(),
        }
    };

    let b = Polytope::hull(&to_ambient_affine(&b_local))?;
    let c = Polytope::hull(&to_ambient_linear(&c_local))?;
    debug_assert_eq!(Polytope::sum(&b, &c)?, *p);
    Ok(Some((b, c)))
}

/// A vector in the kernel of the 2×k edge matrix that is not constant,
/// found by Gaussian elimination. Returns `None` when no non-constant
/// kernel vector exists (never the case for k >= 4 planar edge sets).
fn kernel_direction(edges: &[[Rational; 2]]) -> Option<Vec<Rational>> {
    let k = edges.len();
    let mut m: Vec<Vec<Rational>> = vec![
        edges.iter().map(|e| e[0].clone()).collect(),
        edges.iter().map(|e| e[1].clone()).collect(),
    ];
    // Reduced row echelon form.
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut row = 0;
    for col in 0..k {
        if row >= m.len() {
            break;
        }
        let Some(pr) = (row..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, pr);
        let inv = m[row][col].clone();
        for c in 0..k {
            m[row][c] = &m[row][c] / &inv;
        }
        for r in 0..m.len() {
            if r != row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in 0..k {
                    m[r][c] = &m[r][c] - &f * &m[row][c];
                }
            }
        }
        pivots.push((row, col));
        row += 1;
    }
    let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
    for f in 0..k {
        if pivot_cols.contains(&f) {
            continue;
        }
        let mut v = vec![Rational::zero(); k];
        v[f] = Rational::one();
        for &(r, c) in &pivots {
            v[c] = -m[r][f].clone();
        }
        let constant = v.iter().all(|x| x == &v[0]);
        if !constant {
            return Some(v);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn ipt(coords: &[i64]) -> Point {
        coords.iter().map(|&n| rat(n, 1)).collect()
    }

    #[test]
    fn indecomposables_return_none() {
        let point = Polytope::singleton(ipt(&[2, 3])).unwrap();
        let seg = Polytope::hull(&[ipt(&[0, 0]), ipt(&[2, 1])]).unwrap();
        let tri = Polytope::hull(&[ipt(&[0, 0]), ipt(&[1, 0]), ipt(&[0, 1])]).unwrap();
        assert!(decompose_2d(&point).unwrap().is_none());
        assert!(decompose_2d(&seg).unwrap().is_none());
        assert!(decompose_2d(&tri).unwrap().is_none());
    }

    #[test]
    fn unit_square_splits_into_its_sides() {
        let square =
            Polytope::hull(&[ipt(&[0, 0]), ipt(&[1, 0]), ipt(&[1, 1]), ipt(&[0, 1])]).unwrap();
        let (b, c) = decompose_2d(&square).unwrap().unwrap();
        let horizontal = Polytope::hull(&[ipt(&[0, 0]), ipt(&[1, 0])]).unwrap();
        let vertical = Polytope::hull(&[ipt(&[0, 0]), ipt(&[0, 1])]).unwrap();
        assert!(
            (b == horizontal && c == vertical) || (b == vertical && c == horizontal),
            "unexpected split {b} + {c}"
        );
        assert_eq!(Polytope::sum(&b, &c).unwrap(), square);
    }

    #[test]
    fn pentagon_splits_and_sums_back() {
        let p = Polytope::hull(&[
            ipt(&[0, 0]),
            ipt(&[2, 0]),
            ipt(&[3, 1]),
            ipt(&[1, 3]),
            ipt(&[0, 2]),
        ])
        .unwrap();
        let (b, c) = decompose_2d(&p).unwrap().unwrap();
        assert_eq!(Polytope::sum(&b, &c).unwrap(), p);
        assert!(b.vertex_count() > 1, "left summand must not be a point");
        assert!(c.vertex_count() > 1, "right summand must not be a point");
        assert!(b.vertex_count() < p.vertex_count() || c.vertex_count() < p.vertex_count());
    }

    #[test]
    fn embedded_quadrilateral_splits_in_its_plane() {
        // A square living on the plane x + y + z = 1 inside 3-space.
        let p = Polytope::hull(&[
            vec![rat(1, 2), rat(1, 2), rat(0, 1)],
            vec![rat(1, 2), rat(1, 4), rat(1, 4)],
            vec![rat(1, 4), rat(1, 2), rat(1, 4)],
            vec![rat(1, 4), rat(1, 4), rat(1, 2)],
        ])
        .unwrap();
        assert_eq!(p.vertex_count(), 4);
        let (b, c) = decompose_2d(&p).unwrap().unwrap();
        assert_eq!(Polytope::sum(&b, &c).unwrap(), p);
    }

    #[test]
    fn solid_shapes_are_rejected() {
        let cube = Polytope::hull(&[
            ipt(&[0, 0, 0]),
            ipt(&[1, 0, 0]),
            ipt(&[0, 1, 0]),
            ipt(&[0, 0, 1]),
            ipt(&[1, 1, 0]),
            ipt(&[1, 0, 1]),
            ipt(&[0, 1, 1]),
            ipt(&[1, 1, 1]),
        ])
        .unwrap();
        assert!(matches!(decompose_2d(&cube), Err(Error::UnsupportedDimension(3))));
    }

    #[test]
    fn hexagon_splits() {
        let p = Polytope::hull(&[
            ipt(&[1, 0]),
            ipt(&[2, 0]),
            ipt(&[3, 1]),
            ipt(&[2, 2]),
            ipt(&[1, 2]),
            ipt(&[0, 1]),
        ])
        .unwrap();
        let (b, c) = decompose_2d(&p).unwrap().unwrap();
        assert_eq!(Polytope::sum(&b, &c).unwrap(), p);
    }
}
