//! Small dense two-phase simplex over exact rationals.
//!
//! Solves `max c·x  s.t.  A x = b, x ≥ 0` with Bland's rule, so it terminates
//! on degenerate instances and never suffers rounding error. Problem sizes in
//! this crate are tiny (a handful of rows, a few dozen columns), so a plain
//! tableau is the right tool.

use num_traits::{One, Signed, Zero};

use crate::rational::Rational;

pub(crate) enum SimplexOutcome {
    Infeasible,
    Unbounded,
    Optimal { x: Vec<Rational>, objective: Rational },
}

/// Maximizes `c·x` subject to `A x = b`, `x ≥ 0`.
pub(crate) fn simplex_max(a: &[Vec<Rational>], b: &[Rational], c: &[Rational]) -> SimplexOutcome {
    let m = a.len();
    let n = c.len();
    debug_assert!(a.iter().all(|row| row.len() == n));
    debug_assert_eq!(b.len(), m);

    // Tableau columns: n structural variables, m artificials, then the rhs.
    let width = n + m + 1;
    let mut t: Vec<Vec<Rational>> = Vec::with_capacity(m);
    for i in 0..m {
        let mut row: Vec<Rational> = Vec::with_capacity(width);
        let flip = b[i].is_negative();
        for j in 0..n {
            row.push(if flip { -a[i][j].clone() } else { a[i][j].clone() });
        }
        for k in 0..m {
            row.push(if k == i { Rational::one() } else { Rational::zero() });
        }
        row.push(if flip { -b[i].clone() } else { b[i].clone() });
        t.push(row);
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    // Phase 1: maximize -(sum of artificials). Reduced costs for structural
    // columns are the column sums because every artificial is basic with
    // cost -1.
    let mut z: Vec<Rational> = vec![Rational::zero(); width];
    for j in 0..width {
        let mut s = Rational::zero();
        for row in t.iter() {
            s += &row[j];
        }
        z[j] = s;
    }
    for k in n..n + m {
        z[k] = Rational::zero();
    }
    if pivot_loop(&mut t, &mut basis, &mut z, n + m) == LoopEnd::Unbounded {
        return SimplexOutcome::Unbounded;
    }
    let infeasibility: Rational = basis
        .iter()
        .zip(t.iter())
        .filter(|(j, _)| **j >= n)
        .map(|(_, row)| row[width - 1].clone())
        .fold(Rational::zero(), |acc, v| acc + v);
    if !infeasibility.is_zero() {
        return SimplexOutcome::Infeasible;
    }

    // Drive basic artificials out of the basis; rows that cannot pivot on a
    // structural column are redundant and get dropped.
    let mut i = 0;
    while i < t.len() {
        if basis[i] >= n {
            match (0..n).find(|&j| !t[i][j].is_zero()) {
                Some(j) => pivot(&mut t, &mut basis, &mut vec![Rational::zero(); width], i, j),
                None => {
                    t.remove(i);
                    basis.remove(i);
                    continue;
                }
            }
        }
        i += 1;
    }

    // Phase 2 on the real objective; artificial columns may not re-enter.
    let mut z: Vec<Rational> = vec![Rational::zero(); width];
    for (j, zj) in z.iter_mut().enumerate().take(n) {
        *zj = c[j].clone();
    }
    for (i, &bj) in basis.iter().enumerate() {
        if c[bj].is_zero() {
            continue;
        }
        let coeff = c[bj].clone();
        for j in 0..width {
            let delta = &coeff * &t[i][j];
            z[j] -= delta;
        }
    }
    for k in n..n + m {
        z[k] = Rational::zero();
    }
    if pivot_loop(&mut t, &mut basis, &mut z, n) == LoopEnd::Unbounded {
        return SimplexOutcome::Unbounded;
    }

    let mut x = vec![Rational::zero(); n];
    for (i, &bj) in basis.iter().enumerate() {
        if bj < n {
            x[bj] = t[i][width - 1].clone();
        }
    }
    let mut objective = Rational::zero();
    for j in 0..n {
        objective += &c[j] * &x[j];
    }
    SimplexOutcome::Optimal { x, objective }
}

#[derive(PartialEq)]
enum LoopEnd {
    Optimal,
    Unbounded,
}

/// Bland pivoting until no reduced cost is positive. `enter_limit` bounds the
/// columns allowed to enter the basis.
fn pivot_loop(
    t: &mut Vec<Vec<Rational>>,
    basis: &mut [usize],
    z: &mut Vec<Rational>,
    enter_limit: usize,
) -> LoopEnd {
    let width = z.len();
    loop {
        let entering = (0..enter_limit).find(|&j| z[j].is_positive());
        let Some(j) = entering else {
            return LoopEnd::Optimal;
        };
        let mut leaving: Option<(usize, Rational)> = None;
        for (i, row) in t.iter().enumerate() {
            if row[j].is_positive() {
                let ratio = &row[width - 1] / &row[j];
                let better = match &leaving {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leaving = Some((i, ratio));
                }
            }
        }
        let Some((i, _)) = leaving else {
            return LoopEnd::Unbounded;
        };
        pivot(t, basis, z, i, j);
    }
}

fn pivot(t: &mut [Vec<Rational>], basis: &mut [usize], z: &mut [Rational], r: usize, j: usize) {
    let width = t[r].len();
    let inv = t[r][j].clone();
    for v in t[r].iter_mut() {
        *v /= &inv;
    }
    for i in 0..t.len() {
        if i == r || t[i][j].is_zero() {
            continue;
        }
        let factor = t[i][j].clone();
        for k in 0..width {
            let delta = &factor * &t[r][k];
            t[i][k] -= delta;
        }
    }
    if !z[j].is_zero() {
        let factor = z[j].clone();
        for k in 0..width {
            let delta = &factor * &t[r][k];
            z[k] -= delta;
        }
    }
    basis[r] = j;
}

/// Finds `λ ≥ 0` with `Σλ = 1` and `Σ λ_j column_j = target`, if any exist.
pub(crate) fn convex_weights(columns: &[Vec<Rational>], target: &[Rational]) -> Option<Vec<Rational>> {
    let k = columns.len();
    if k == 0 {
        return None;
    }
    let d = target.len();
    let mut a: Vec<Vec<Rational>> = Vec::with_capacity(d + 1);
    a.push(vec![Rational::one(); k]);
    for coord in 0..d {
        a.push(columns.iter().map(|col| col[coord].clone()).collect());
    }
    let mut b = Vec::with_capacity(d + 1);
    b.push(Rational::one());
    b.extend(target.iter().cloned());
    let c = vec![Rational::zero(); k];
    match simplex_max(&a, &b, &c) {
        SimplexOutcome::Optimal { x, .. } => Some(x),
        _ => None,
    }
}

/// Maximizes `t ≥ 0` such that `target = Σ λ_j column_j` with `Σλ = 1` and
/// every `λ_j ≥ t`. Returns `None` when no convex weights exist at all.
/// A positive result puts `target` in the relative interior of the hull.
pub(crate) fn max_uniform_slack(columns: &[Vec<Rational>], target: &[Rational]) -> Option<Rational> {
    let k = columns.len();
    if k == 0 {
        return None;
    }
    let d = target.len();
    // Substitute λ_j = μ_j + t with μ ≥ 0, t ≥ 0; variables are (μ_1..μ_k, t).
    let mut a: Vec<Vec<Rational>> = Vec::with_capacity(d + 1);
    let mut top = vec![Rational::one(); k];
    top.push(Rational::from_integer(k.into()));
    a.push(top);
    for coord in 0..d {
        let mut row: Vec<Rational> = columns.iter().map(|col| col[coord].clone()).collect();
        let mut s = Rational::zero();
        for col in columns {
            s += &col[coord];
        }
        row.push(s);
        a.push(row);
    }
    let mut b = Vec::with_capacity(d + 1);
    b.push(Rational::one());
    b.extend(target.iter().cloned());
    let mut c = vec![Rational::zero(); k];
    c.push(Rational::one());
    match simplex_max(&a, &b, &c) {
        SimplexOutcome::Optimal { objective, .. } => Some(objective),
        SimplexOutcome::Infeasible => None,
        SimplexOutcome::Unbounded => unreachable!("slack is bounded by 1/k"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn pt(coords: &[(i64, i64)]) -> Vec<Rational> {
        coords.iter().map(|&(n, d)| rat(n, d)).collect()
    }

    #[test]
    fn convex_weights_inside_triangle() {
        let cols = vec![pt(&[(0, 1), (0, 1)]), pt(&[(1, 1), (0, 1)]), pt(&[(0, 1), (1, 1)])];
        let target = pt(&[(1, 4), (1, 4)]);
        let w = convex_weights(&cols, &target).expect("inside");
        assert_eq!(w.len(), 3);
        let mut sum = rat(0, 1);
        for v in &w {
            assert!(!v.is_negative());
            sum += v;
        }
        assert_eq!(sum, rat(1, 1));
        for coord in 0..2 {
            let mut s = rat(0, 1);
            for (j, col) in cols.iter().enumerate() {
                s += &w[j] * &col[coord];
            }
            assert_eq!(s, target[coord]);
        }
    }

    #[test]
    fn convex_weights_outside() {
        let cols = vec![pt(&[(0, 1), (0, 1)]), pt(&[(1, 1), (0, 1)]), pt(&[(0, 1), (1, 1)])];
        assert!(convex_weights(&cols, &pt(&[(1, 1), (1, 1)])).is_none());
        assert!(convex_weights(&cols, &pt(&[(-1, 8), (0, 1)])).is_none());
    }

    #[test]
    fn convex_weights_degenerate_rows() {
        // Collinear columns in ambient dimension 2: one coordinate row is
        // redundant, which exercises the artificial drive-out path.
        let cols = vec![pt(&[(0, 1), (0, 1)]), pt(&[(1, 1), (1, 1)])];
        assert!(convex_weights(&cols, &pt(&[(1, 2), (1, 2)])).is_some());
        assert!(convex_weights(&cols, &pt(&[(1, 2), (1, 3)])).is_none());
    }

    #[test]
    fn slack_detects_relative_interior() {
        let cols = vec![pt(&[(0, 1)]), pt(&[(1, 1)])];
        assert!(max_uniform_slack(&cols, &pt(&[(1, 2)])).unwrap().is_positive());
        assert!(max_uniform_slack(&cols, &pt(&[(0, 1)])).unwrap().is_zero());
        assert!(max_uniform_slack(&cols, &pt(&[(2, 1)])).is_none());
    }

    #[test]
    fn slack_on_single_point() {
        let cols = vec![pt(&[(1, 2), (1, 2)])];
        // A singleton hull is its own relative interior.
        assert!(max_uniform_slack(&cols, &pt(&[(1, 2), (1, 2)])).unwrap().is_positive());
        assert!(max_uniform_slack(&cols, &pt(&[(1, 2), (1, 3)])).is_none());
    }
}
