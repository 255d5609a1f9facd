//! Deterministic sample generators for certification runs.
//!
//! Every generator is seeded explicitly, so a fixed seed reproduces the same
//! coefficients, distributions, polytopes, and automata byte for byte.

use rand::{Rng, SeedableRng};
pub use rand_chacha::ChaCha8Rng;

use std::collections::BTreeMap;

use crate::automata::PaSpec;
use crate::dist::Dist;
use crate::error::{Error, Result};
use crate::extension::ConvexMap;
use crate::geometry::{FlaggedPolygon, Point, Polytope};
use crate::rational::{check_coefficient, parse_rational, rat, Rational};

/// Environment variable holding a comma-separated coefficient grid override.
pub const PGRID_ENV: &str = "CONVEXTERM_PGRID";

/// The deterministic RNG used throughout: one seed, one stream.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// The fixed coefficients every certification run probes.
pub fn core_grid() -> Vec<Rational> {
    vec![
        rat(1, 5),
        rat(1, 4),
        rat(1, 3),
        rat(1, 2),
        rat(2, 3),
        rat(3, 4),
        rat(4, 5),
    ]
}

/// A random coefficient in the open unit interval with denominator at most
/// `max_den`.
pub fn random_coefficient(rng: &mut ChaCha8Rng, max_den: u64) -> Rational {
    let den = rng.gen_range(2..=max_den.max(2));
    let num = rng.gen_range(1..den);
    rat(num as i64, den as i64)
}

/// The core grid plus twenty seeded random coefficients (denominators up to
/// 64), deduplicated.
pub fn certification_grid(seed: u64) -> Vec<Rational> {
    let mut grid = core_grid();
    let mut r = rng(seed);
    for _ in 0..20 {
        let p = random_coefficient(&mut r, 64);
        if !grid.contains(&p) {
            grid.push(p);
        }
    }
    grid
}

/// Parse a comma-separated list of coefficients in the open unit interval.
pub fn parse_grid(text: &str) -> Result<Vec<Rational>> {
    let mut grid = Vec::new();
    for part in text.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let p = parse_rational(part)?;
        check_coefficient(&p)?;
        if !grid.contains(&p) {
            grid.push(p);
        }
    }
    if grid.is_empty() {
        return Err(Error::EmptyInput("coefficient grid"));
    }
    Ok(grid)
}

/// The grid a certification run uses: the environment override when set,
/// otherwise the seeded certification grid.
pub fn resolve_grid(seed: u64) -> Result<Vec<Rational>> {
    match std::env::var(PGRID_ENV) {
        Ok(text) => parse_grid(&text),
        Err(_) => Ok(certification_grid(seed)),
    }
}

/// Associativity pairs with a bounded budget: the full product of the first
/// seven grid entries plus consecutive pairs of the remainder. Keeps the
/// cubic law phase affordable on expensive carriers while still covering
/// every grid coefficient.
pub fn assoc_pairs(grid: &[Rational]) -> Vec<(Rational, Rational)> {
    let head = grid.len().min(7);
    let mut pairs = Vec::new();
    for p in &grid[..head] {
        for q in &grid[..head] {
            pairs.push((p.clone(), q.clone()));
        }
    }
    for window in grid[head..].windows(2) {
        pairs.push((window[0].clone(), window[1].clone()));
    }
    if grid.len() > head + 1 {
        pairs.push((grid[grid.len() - 1].clone(), grid[head].clone()));
    }
    pairs
}

/// Numbered state labels s1..sn.
pub fn state_labels(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("s{i}")).collect()
}

/// A random distribution over the given labels (all weights have
/// denominator at most 64).
pub fn random_dist(rng: &mut ChaCha8Rng, labels: &[String]) -> Dist {
    loop {
        let weights: Vec<i64> = labels.iter().map(|_| rng.gen_range(0..=64)).collect();
        let total: i64 = weights.iter().sum();
        if total == 0 {
            continue;
        }
        return Dist::new(
            labels
                .iter()
                .zip(&weights)
                .map(|(l, &w)| (l.clone(), rat(w, total))),
        )
        .expect("weights are nonnegative and sum to one");
    }
}

/// A random point of the standard belief simplex over n states.
pub fn random_simplex_point(rng: &mut ChaCha8Rng, n: usize) -> Point {
    let labels = state_labels(n);
    let d = random_dist(rng, &labels);
    d.to_point(&labels).expect("distribution is over exactly these labels")
}

/// A random polytope inside the standard simplex with at most `max_vertices`
/// generating points.
pub fn random_simplex_polytope(rng: &mut ChaCha8Rng, n: usize, max_vertices: usize) -> Polytope {
    let count = rng.gen_range(1..=max_vertices.max(1));
    let points: Vec<Point> = (0..count).map(|_| random_simplex_point(rng, n)).collect();
    Polytope::hull(&points).expect("the point set is nonempty and same-dimensional")
}

/// A random polytope with coordinates in [0, 1] on a 1/32 lattice.
pub fn random_box_polytope(rng: &mut ChaCha8Rng, dim: usize, max_vertices: usize) -> Polytope {
    let count = rng.gen_range(1..=max_vertices.max(1));
    let points: Vec<Point> = (0..count)
        .map(|_| (0..dim).map(|_| rat(rng.gen_range(0..=32), 32)).collect())
        .collect();
    Polytope::hull(&points).expect("the point set is nonempty and same-dimensional")
}

/// A random plane polygon with membership flags.
pub fn random_flagged_polygon(rng: &mut ChaCha8Rng, max_vertices: usize) -> FlaggedPolygon {
    let body = random_box_polytope(rng, 2, max_vertices.max(3));
    let closed =
        FlaggedPolygon::closed(&body).expect("a closed plane body is always a valid flagged shape");
    let cycle = closed.cycle().to_vec();
    let nv = closed.vertex_flags().len();
    let ne = closed.edge_flags().len();
    for _ in 0..40 {
        let vertex_flags: Vec<bool> = (0..nv).map(|_| rng.gen_bool(0.7)).collect();
        let edge_flags: Vec<bool> = (0..ne).map(|_| rng.gen_bool(0.7)).collect();
        if let Ok(fp) = FlaggedPolygon::new(cycle.clone(), vertex_flags, edge_flags) {
            return fp;
        }
    }
    closed
}

/// A random automaton over numbered states and letters a1..ak. When
/// `allow_disabled` is set, roughly a quarter of the pairs get no successor.
pub fn random_pa(
    rng: &mut ChaCha8Rng,
    n_states: usize,
    n_actions: usize,
    allow_disabled: bool,
) -> PaSpec {
    let states = state_labels(n_states);
    let actions: Vec<String> = (1..=n_actions).map(|i| format!("a{i}")).collect();
    let mut transitions = Vec::new();
    for s in &states {
        for a in &actions {
            if allow_disabled && rng.gen_range(0..4) == 0 {
                continue;
            }
            let branches = rng.gen_range(1..=3);
            for _ in 0..branches {
                transitions.push((s.clone(), a.clone(), random_dist(rng, &states)));
            }
        }
    }
    PaSpec::new(states, actions, transitions).expect("labels are distinct and closed")
}

/// A random affine map between free algebras, given by a random image
/// distribution per generator.
pub fn random_convex_map(
    rng: &mut ChaCha8Rng,
    dom_labels: &[String],
    cod_labels: &[String],
) -> ConvexMap {
    let table: BTreeMap<String, Dist> = dom_labels
        .iter()
        .map(|l| (l.clone(), random_dist(rng, cod_labels)))
        .collect();
    ConvexMap::new(table).expect("domain labels are nonempty")
}
