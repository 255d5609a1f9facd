//! Affine coordinate charts: express points of a flat in local coordinates.
//!
//! A chart is fitted to a point cloud by picking the first point as origin and
//! greedily collecting linearly independent difference vectors. `to_local`
//! solves exactly for the coefficients, so round-trips are lossless.

use num_traits::Zero;

use crate::geometry::Point;
use crate::rational::Rational;

pub(crate) struct AffineChart {
    origin: Point,
    basis: Vec<Vec<Rational>>,
}

impl AffineChart {
    /// Fits a chart spanning the affine hull of `points` (must be nonempty).
    pub fn fit(points: &[Point]) -> Self {
        let origin = points[0].clone();
        let ambient = origin.len();
        let mut basis: Vec<Vec<Rational>> = Vec::new();
        for p in &points[1..] {
            if basis.len() == ambient {
                break;
            }
            let v: Vec<Rational> = p.iter().zip(origin.iter()).map(|(a, b)| a - b).collect();
            if !in_span(&basis, &v) {
                basis.push(v);
            }
        }
        AffineChart { origin, basis }
    }

    /// Dimension of the affine hull the chart spans.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Exact local coordinates of `p`, or `None` when `p` is off the flat.
    pub fn to_local(&self, p: &Point) -> Option<Vec<Rational>> {
        let v: Vec<Rational> = p.iter().zip(self.origin.iter()).map(|(a, b)| a - b).collect();
        solve_in_span(&self.basis, &v)
    }

    /// Maps local coordinates back to an ambient point.
    pub fn from_local(&self, local: &[Rational]) -> Point {
        let mut out = self.origin.clone();
        for (c, v) in local.iter().zip(self.basis.iter()) {
            for (o, vi) in out.iter_mut().zip(v.iter()) {
                *o += c * vi;
            }
        }
        out
    }

    /// Applies only the linear part (no origin offset): `Σ local_i · basis_i`.
    pub fn from_local_linear(&self, local: &[Rational]) -> Point {
        let mut out = vec![Rational::zero(); self.origin.len()];
        for (c, v) in local.iter().zip(self.basis.iter()) {
            for (o, vi) in out.iter_mut().zip(v.iter()) {
                *o += c * vi;
            }
        }
        out
    }
}

fn in_span(basis: &[Vec<Rational>], v: &[Rational]) -> bool {
    solve_in_span(basis, v).is_some()
}

/// Solves `Σ x_i basis_i = v` exactly by Gaussian elimination on the
/// augmented system; returns `None` when `v` is outside the span.
fn solve_in_span(basis: &[Vec<Rational>], v: &[Rational]) -> Option<Vec<Rational>> {
    let k = basis.len();
    let d = v.len();
    if k == 0 {
        return if v.iter().all(|c| c.is_zero()) { Some(Vec::new()) } else { None };
    }
    // Rows are ambient coordinates, columns are basis vectors, augmented by v.
    let mut m: Vec<Vec<Rational>> = (0..d)
        .map(|row| {
            let mut r: Vec<Rational> = basis.iter().map(|b| b[row].clone()).collect();
            r.push(v[row].clone());
            r
        })
        .collect();
    let mut pivot_rows: Vec<usize> = Vec::with_capacity(k);
    let mut row = 0;
    for col in 0..k {
        let Some(pr) = (row..d).find(|&r| !m[r][col].is_zero()) else {
            // Dependent basis vectors never occur: `fit` keeps them independent.
            continue;
        };
        m.swap(row, pr);
        let inv = m[row][col].clone();
        for x in m[row].iter_mut() {
            *x /= &inv;
        }
        for r in 0..d {
            if r != row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c2 in 0..=k {
                    let delta = &f * &m[row][c2];
                    m[r][c2] -= delta;
                }
            }
        }
        pivot_rows.push(col);
        row += 1;
        if row == d {
            break;
        }
    }
    // Consistency: every zeroed row must have a zero augment.
    for r in row..d {
        if !m[r][k].is_zero() {
            return None;
        }
    }
    let mut x = vec![Rational::zero(); k];
    for (r, &col) in pivot_rows.iter().enumerate() {
        x[col] = m[r][k].clone();
    }
    Some(x)
}
