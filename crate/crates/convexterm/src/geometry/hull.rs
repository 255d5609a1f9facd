//! Extreme points of finite rational point sets.
//!
//! The engine dispatches on the affine dimension of the input: endpoints on a
//! line, monotone chain in the plane, supporting-plane enumeration in three
//! dimensions, and an exact-LP fallback above that. Arithmetic is exact
//! everywhere: coordinates are rescaled to integers once per call and run in
//! `i128` when a conservative magnitude bound allows, otherwise in `BigInt`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use std::collections::HashSet;

use crate::geometry::chart::AffineChart;
use crate::geometry::lp::convex_weights;
use crate::geometry::Point;
use crate::rational::Rational;

/// Returns the extreme points of `conv(points)` sorted lexicographically.
/// Callers guarantee a nonempty input of uniform dimension.
pub(crate) fn extreme_points(points: &[Point]) -> Vec<Point> {
    let mut unique: Vec<Point> = points.to_vec();
    unique.sort();
    unique.dedup();
    if unique.len() == 1 {
        return unique;
    }

    let chart = AffineChart::fit(&unique);
    let local: Vec<Vec<Rational>> = unique
        .iter()
        .map(|p| chart.to_local(p).expect("chart spans its own cloud"))
        .collect();

    let mut keep: Vec<usize> = match chart.dim() {
        0 => unreachable!("distinct points span at least a line"),
        1 => {
            let mut lo = 0;
            let mut hi = 0;
            for (i, c) in local.iter().enumerate() {
                if c[0] < local[lo][0] {
                    lo = i;
                }
                if c[0] > local[hi][0] {
                    hi = i;
                }
            }
            vec![lo, hi]
        }
        2 => {
            let scaled = scale_to_integers(&local);
            match shrink_to_i128(&scaled) {
                Some(small) => hull2d_indices(&small),
                None => hull2d_indices(&scaled),
            }
        }
        3 => {
            let scaled = scale_to_integers(&local);
            match shrink_to_i128(&scaled) {
                Some(small) => hull3d_indices(&small),
                None => hull3d_indices(&scaled),
            }
        }
        _ => lp_extreme_indices(&local),
    };

    keep.sort_unstable();
    keep.dedup();
    let mut out: Vec<Point> = keep.into_iter().map(|i| unique[i].clone()).collect();
    out.sort();
    out
}

/// Counterclockwise hull cycle of a planar point set (ambient dimension 2),
/// starting at the lexicographically smallest vertex.
pub(crate) fn ccw_hull_cycle_2d(points: &[Point]) -> Vec<Point> {
    debug_assert!(points.iter().all(|p| p.len() == 2));
    let mut unique: Vec<Point> = points.to_vec();
    unique.sort();
    unique.dedup();
    if unique.len() == 1 {
        return unique;
    }
    let scaled = scale_to_integers(&unique);
    let cycle = match shrink_to_i128(&scaled) {
        Some(small) => hull2d_indices(&small),
        None => hull2d_indices(&scaled),
    };
    // `hull2d_indices` emits a ccw cycle beginning at the lexicographic
    // minimum of the (sorted) input, which is exactly the canonical start.
    cycle.into_iter().map(|i| unique[i].clone()).collect()
}

/// Multiplies every coordinate by the least common denominator of the cloud.
fn scale_to_integers(rows: &[Vec<Rational>]) -> Vec<Vec<BigInt>> {
    let mut lcm = BigInt::from(1);
    for row in rows {
        for v in row {
            lcm = lcm.lcm(v.denom());
        }
    }
    rows.iter()
        .map(|row| {
            row.iter()
                .map(|v| v.numer() * (&lcm / v.denom()))
                .collect()
        })
        .collect()
}

/// Conservative `i128` downcast: succeeds only when every coordinate is small
/// enough that 3×3 determinants of differences cannot overflow.
fn shrink_to_i128(rows: &[Vec<BigInt>]) -> Option<Vec<Vec<i128>>> {
    const BOUND: i128 = 1 << 40;
    let mut out = Vec::with_capacity(rows.len());
    for row in rows {
        let mut r = Vec::with_capacity(row.len());
        for v in row {
            let x = v.to_i128()?;
            if x.abs() >= BOUND {
                return None;
            }
            r.push(x);
        }
        out.push(r);
    }
    Some(out)
}

/// Integer coordinate scalar usable by the hull routines.
pub(crate) trait HullScalar: Clone + Ord + Signed + std::fmt::Display {}
impl HullScalar for i128 {}
impl HullScalar for BigInt {}

fn cross2<T: HullScalar>(o: &[T], a: &[T], b: &[T]) -> T {
    (a[0].clone() - o[0].clone()) * (b[1].clone() - o[1].clone())
        - (a[1].clone() - o[1].clone()) * (b[0].clone() - o[0].clone())
}

/// Andrew's monotone chain over point indices. Returns the strict hull (no
/// collinear interior vertices) as a ccw cycle starting at the lexicographic
/// minimum. Input points must be distinct.
fn hull2d_indices<T: HullScalar>(pts: &[Vec<T>]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..pts.len()).collect();
    order.sort_by(|&a, &b| pts[a].cmp(&pts[b]));
    if order.len() <= 2 {
        return order;
    }
    let mut lower: Vec<usize> = Vec::new();
    for &i in &order {
        while lower.len() >= 2
            && !cross2(&pts[lower[lower.len() - 2]], &pts[lower[lower.len() - 1]], &pts[i])
                .is_positive()
        {
            lower.pop();
        }
        lower.push(i);
    }
    let mut upper: Vec<usize> = Vec::new();
    for &i in order.iter().rev() {
        while upper.len() >= 2
            && !cross2(&pts[upper[upper.len() - 2]], &pts[upper[upper.len() - 1]], &pts[i])
                .is_positive()
        {
            upper.pop();
        }
        upper.push(i);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

fn sub3<T: HullScalar>(a: &[T], b: &[T]) -> [T; 3] {
    [
        a[0].clone() - b[0].clone(),
        a[1].clone() - b[1].clone(),
        a[2].clone() - b[2].clone(),
    ]
}

fn cross3<T: HullScalar>(u: &[T; 3], v: &[T; 3]) -> [T; 3] {
    [
        u[1].clone() * v[2].clone() - u[2].clone() * v[1].clone(),
        u[2].clone() * v[0].clone() - u[0].clone() * v[2].clone(),
        u[0].clone() * v[1].clone() - u[1].clone() * v[0].clone(),
    ]
}

fn dot3<T: HullScalar>(u: &[T; 3], v: &[T]) -> T {
    u[0].clone() * v[0].clone() + u[1].clone() * v[1].clone() + u[2].clone() * v[2].clone()
}

/// Extreme points in affine dimension 3 via supporting-plane enumeration:
/// every plane spanned by three input points that has the whole cloud on one
/// side is a supporting plane, and the extreme points are exactly the 2D hull
/// vertices of the coplanar clusters. A cheap inner-point filter keeps the
/// triple enumeration small.
fn hull3d_indices<T: HullScalar>(pts: &[Vec<T>]) -> Vec<usize> {
    let n = pts.len();
    let candidates = candidate_indices(pts);
    let mut extreme = vec![false; n];
    let mut seen_planes: HashSet<(Vec<BigInt>, BigInt)> = HashSet::new();

    for ci in 0..candidates.len() {
        for cj in ci + 1..candidates.len() {
            for ck in cj + 1..candidates.len() {
                let (i, j, k) = (candidates[ci], candidates[cj], candidates[ck]);
                let u = sub3(&pts[j], &pts[i]);
                let v = sub3(&pts[k], &pts[i]);
                let normal = cross3(&u, &v);
                if normal.iter().all(|c| c.is_zero()) {
                    continue;
                }
                let offset = dot3(&normal, &pts[i]);
                if !seen_planes.insert(plane_key(&normal, &offset)) {
                    continue;
                }
                let mut any_pos = false;
                let mut any_neg = false;
                let mut coplanar: Vec<usize> = Vec::new();
                for (idx, p) in pts.iter().enumerate() {
                    let s = dot3(&normal, p) - offset.clone();
                    if s.is_positive() {
                        any_pos = true;
                    } else if s.is_negative() {
                        any_neg = true;
                    } else {
                        coplanar.push(idx);
                    }
                    if any_pos && any_neg {
                        break;
                    }
                }
                if any_pos && any_neg {
                    continue;
                }
                // Supporting plane: its extreme points are the planar hull
                // vertices of the coplanar cluster.
                let axis = dominant_axis(&normal);
                let flat: Vec<Vec<T>> = coplanar
                    .iter()
                    .map(|&idx| {
                        pts[idx]
                            .iter()
                            .enumerate()
                            .filter(|&(c, _)| c != axis)
                            .map(|(_, v)| v.clone())
                            .collect()
                    })
                    .collect();
                for local in hull2d_indices(&flat) {
                    extreme[coplanar[local]] = true;
                }
            }
        }
    }
    (0..n).filter(|&i| extreme[i]).collect()
}

/// Hashable canonical form of a plane `(normal, offset)`: divide by the gcd
/// and normalize the sign of the first nonzero entry.
fn plane_key<T: HullScalar>(normal: &[T; 3], offset: &T) -> (Vec<BigInt>, BigInt) {
    let mut vals: Vec<BigInt> = normal.iter().map(to_bigint).collect();
    vals.push(to_bigint(offset));
    let mut g = BigInt::zero();
    for v in &vals {
        g = g.gcd(v);
    }
    if !g.is_zero() {
        for v in vals.iter_mut() {
            *v = &*v / &g;
        }
    }
    if vals.iter().find(|v| !v.is_zero()).map(|v| v.is_negative()).unwrap_or(false) {
        for v in vals.iter_mut() {
            *v = -v.clone();
        }
    }
    let offset = vals.pop().expect("four entries");
    (vals, offset)
}

fn to_bigint<T: HullScalar>(v: &T) -> BigInt {
    // Round-trip through the decimal representation: `HullScalar` is only
    // implemented for integer types, so this is exact.
    v.to_string().parse().expect("integer scalar")
}

fn dominant_axis<T: HullScalar>(normal: &[T; 3]) -> usize {
    let mut best = 0;
    for axis in 1..3 {
        if normal[axis].abs() > normal[best].abs() {
            best = axis;
        }
    }
    best
}

/// Cheap pre-filter: points strictly inside the hull of a few guaranteed
/// extreme seeds (coordinate extremes) cannot be extreme themselves.
fn candidate_indices<T: HullScalar>(pts: &[Vec<T>]) -> Vec<usize> {
    let n = pts.len();
    let all: Vec<usize> = (0..n).collect();
    let mut seeds: Vec<usize> = Vec::new();
    for axis in 0..3 {
        let mut lo = 0;
        let mut hi = 0;
        for i in 1..n {
            if pts[i][axis] < pts[lo][axis] {
                lo = i;
            }
            if pts[i][axis] > pts[hi][axis] {
                hi = i;
            }
        }
        seeds.push(lo);
        seeds.push(hi);
    }
    seeds.sort_unstable();
    seeds.dedup();
    if seeds.len() < 4 {
        return all;
    }

    // Facets of the seed hull, each as (outward normal, offset).
    let mut facets: Vec<([T; 3], T)> = Vec::new();
    for a in 0..seeds.len() {
        for b in a + 1..seeds.len() {
            for c in b + 1..seeds.len() {
                let (i, j, k) = (seeds[a], seeds[b], seeds[c]);
                let u = sub3(&pts[j], &pts[i]);
                let v = sub3(&pts[k], &pts[i]);
                let mut normal = cross3(&u, &v);
                if normal.iter().all(|x| x.is_zero()) {
                    continue;
                }
                let mut offset = dot3(&normal, &pts[i]);
                let mut any_pos = false;
                let mut any_neg = false;
                for &s in &seeds {
                    let side = dot3(&normal, &pts[s]) - offset.clone();
                    if side.is_positive() {
                        any_pos = true;
                    }
                    if side.is_negative() {
                        any_neg = true;
                    }
                }
                if any_pos && any_neg {
                    continue;
                }
                if any_pos {
                    normal = [-normal[0].clone(), -normal[1].clone(), -normal[2].clone()];
                    offset = -offset;
                }
                facets.push((normal, offset));
            }
        }
    }
    if facets.is_empty() {
        // Seeds are flat; the filter cannot decide anything.
        return all;
    }
    (0..n)
        .filter(|&i| {
            // Keep unless strictly inside every seed facet.
            !facets
                .iter()
                .all(|(normal, offset)| (dot3(normal, &pts[i]) - offset.clone()).is_negative())
        })
        .collect()
}

/// Dimension-independent fallback: a point is extreme iff it is not a convex
/// combination of the others.
fn lp_extreme_indices(local: &[Vec<Rational>]) -> Vec<usize> {
    let n = local.len();
    (0..n)
        .filter(|&i| {
            let others: Vec<Vec<Rational>> = (0..n).filter(|&j| j != i).map(|j| local[j].clone()).collect();
            convex_weights(&others, &local[i]).is_none()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn pt(coords: &[i64]) -> Point {
        coords.iter().map(|&n| rat(n, 1)).collect()
    }

    fn pts(rows: &[&[i64]]) -> Vec<Point> {
        rows.iter().map(|r| pt(r)).collect()
    }

    #[test]
    fn segment_with_interior_points() {
        let out = extreme_points(&pts(&[&[0, 0], &[4, 4], &[1, 1], &[3, 3], &[0, 0]]));
        assert_eq!(out, pts(&[&[0, 0], &[4, 4]]));
    }

    #[test]
    fn square_with_noise() {
        let out = extreme_points(&pts(&[
            &[0, 0],
            &[2, 0],
            &[2, 2],
            &[0, 2],
            &[1, 1],
            &[1, 0],
            &[2, 1],
        ]));
        assert_eq!(out, pts(&[&[0, 0], &[0, 2], &[2, 0], &[2, 2]]));
    }

    #[test]
    fn cube_with_face_and_body_points() {
        let mut input = Vec::new();
        for x in [0, 2] {
            for y in [0, 2] {
                for z in [0, 2] {
                    input.push(pt(&[x, y, z]));
                }
            }
        }
        let corners = input.clone();
        input.push(pt(&[1, 1, 1])); // body center
        input.push(pt(&[1, 1, 0])); // face center
        input.push(pt(&[1, 0, 0])); // edge midpoint
        let mut expect = corners;
        expect.sort();
        assert_eq!(extreme_points(&input), expect);
    }

    #[test]
    fn tetrahedron_in_four_space_uses_lp_path() {
        let e = |i: usize| {
            let mut v = vec![rat(0, 1); 4];
            v[i] = rat(1, 1);
            v
        };
        let mut input: Vec<Point> = (0..4).map(e).collect();
        let center: Point = vec![rat(1, 4); 4];
        input.push(center);
        let out = extreme_points(&input);
        assert_eq!(out.len(), 4);
        assert!(out.iter().all(|p| p.iter().any(|c| c == &rat(1, 1))));
    }

    #[test]
    fn planar_cloud_embedded_in_three_space() {
        // Triangle in the plane x+y+z = 1 plus its barycenter.
        let input = pts(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        let mut with_center = input.clone();
        with_center.push(vec![rat(1, 3), rat(1, 3), rat(1, 3)]);
        let mut expect = input;
        expect.sort();
        assert_eq!(extreme_points(&with_center), expect);
    }

    #[test]
    fn ccw_cycle_of_square() {
        let cycle = ccw_hull_cycle_2d(&pts(&[&[0, 0], &[1, 0], &[1, 1], &[0, 1], &[0, 0]]));
        assert_eq!(cycle, pts(&[&[0, 0], &[1, 0], &[1, 1], &[0, 1]]));
    }

    #[test]
    fn big_coordinates_fall_back_to_bigint() {
        // Denominators chosen so the scaled integers exceed the i128 window.
        let big = rat(1, 1) + Rational::new(BigInt::from(1), BigInt::from(3u8).pow(40));
        let input = vec![
            vec![rat(0, 1), rat(0, 1)],
            vec![big.clone(), rat(0, 1)],
            vec![rat(0, 1), big.clone()],
            vec![&big / rat(3, 1), &big / rat(3, 1)],
        ];
        let out = extreme_points(&input);
        assert_eq!(out.len(), 3);
    }
}
