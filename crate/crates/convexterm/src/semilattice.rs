//! Finite meet-semilattices, the convex algebra they induce (combination =
//! meet, ignoring the coefficient), and the glueing construction: a
//! semilattice-indexed family of algebras with downward homomorphisms
//! becomes one algebra on the disjoint union, combining across fibers
//! through the meet fiber.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::algebra::Oracle;
use crate::error::{Error, Result};
use crate::rational::Rational;

/// A finite meet-semilattice over string labels. Stores the full order
/// relation and the meet table; construction takes any generating set of
/// order pairs and closes it reflexively and transitively.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Semilattice {
    labels: Vec<String>,
    le: Vec<Vec<bool>>,
    meet: Vec<Vec<usize>>,
}

impl Semilattice {
    /// Build from labels and order pairs `(a, b)` meaning `a ≤ b`. Fails on
    /// duplicate labels, unknown labels, order cycles, or a missing meet.
    pub fn new(elements: Vec<String>, order: Vec<(String, String)>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::EmptyInput("semilattice needs at least one element"));
        }
        let mut index: BTreeMap<&str, usize> = BTreeMap::new();
        for (i, l) in elements.iter().enumerate() {
            if index.insert(l.as_str(), i).is_some() {
                return Err(Error::DuplicateElement(l.clone()));
            }
        }
        let n = elements.len();
        let mut le = vec![vec![false; n]; n];
        for (i, row) in le.iter_mut().enumerate() {
            row[i] = true;
        }
        for (a, b) in &order {
            let &i = index
                .get(a.as_str())
                .ok_or_else(|| Error::InvalidOrder(format!("unknown element {a:?}")))?;
            let &j = index
                .get(b.as_str())
                .ok_or_else(|| Error::InvalidOrder(format!("unknown element {b:?}")))?;
            le[i][j] = true;
        }
        // Transitive closure.
        for k in 0..n {
            for i in 0..n {
                if le[i][k] {
                    for j in 0..n {
                        if le[k][j] {
                            le[i][j] = true;
                        }
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                if i != j && le[i][j] && le[j][i] {
                    return Err(Error::InvalidOrder(format!(
                        "order cycle between {:?} and {:?}",
                        elements[i], elements[j]
                    )));
                }
            }
        }
        // Meets: the greatest common lower bound must exist for every pair.
        let mut meet = vec![vec![0usize; n]; n];
        for i in 0..n {
            for j in 0..n {
                let lower: Vec<usize> =
                    (0..n).filter(|&k| le[k][i] && le[k][j]).collect();
                let greatest = lower
                    .iter()
                    .copied()
                    .find(|&g| lower.iter().all(|&k| le[k][g]));
                match greatest {
                    Some(g) => meet[i][j] = g,
                    None => {
                        return Err(Error::NotMeetSemilattice(format!(
                            "elements {:?} and {:?} have no greatest lower bound",
                            elements[i], elements[j]
                        )))
                    }
                }
            }
        }
        Ok(Semilattice { labels: elements, le, meet })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn le_idx(&self, a: usize, b: usize) -> bool {
        self.le[a][b]
    }

    pub fn meet_idx(&self, a: usize, b: usize) -> usize {
        self.meet[a][b]
    }

    pub fn le(&self, a: &str, b: &str) -> Result<bool> {
        let i = self.index_of(a).ok_or_else(|| Error::OutsideCarrier(a.to_string()))?;
        let j = self.index_of(b).ok_or_else(|| Error::OutsideCarrier(b.to_string()))?;
        Ok(self.le[i][j])
    }

    pub fn meet(&self, a: &str, b: &str) -> Result<&str> {
        let i = self.index_of(a).ok_or_else(|| Error::OutsideCarrier(a.to_string()))?;
        let j = self.index_of(b).ok_or_else(|| Error::OutsideCarrier(b.to_string()))?;
        Ok(&self.labels[self.meet[i][j]])
    }
}

#[derive(Serialize, Deserialize)]
struct SemilatticeRepr {
    elements: Vec<String>,
    order: Vec<(String, String)>,
}

impl Serialize for Semilattice {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let mut order = Vec::new();
        for i in 0..self.len() {
            for j in 0..self.len() {
                if i != j && self.le[i][j] {
                    order.push((self.labels[i].clone(), self.labels[j].clone()));
                }
            }
        }
        SemilatticeRepr { elements: self.labels.clone(), order }.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for Semilattice {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as DeError;
        let repr = SemilatticeRepr::deserialize(de)?;
        Semilattice::new(repr.elements, repr.order).map_err(D::Error::custom)
    }
}

/// The convex algebra of a meet-semilattice: every combination is the meet
/// of its arguments, regardless of the coefficient.
pub fn semilattice_algebra(s: &Semilattice) -> Oracle<String> {
    let labels = s.labels.clone();
    let meet = s.meet.clone();
    let index: BTreeMap<String, usize> =
        labels.iter().enumerate().map(|(i, l)| (l.clone(), i)).collect();
    let out_labels = labels.clone();
    Oracle::finite(labels, move |_, x: &String, y: &String| {
        let i = *index.get(x).expect("left operand is a carrier label");
        let j = *index.get(y).expect("right operand is a carrier label");
        out_labels[meet[i][j]].clone()
    })
    .expect("semilattice labels are distinct and nonempty")
}

/// An element of a glued algebra: a fiber slot (indexing the semilattice
/// labels) and a value in that fiber.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct Glued<E> {
    pub slot: usize,
    pub value: E,
}

/// A downward homomorphism between fibers: maps the fiber at `upper` into
/// the fiber at `lower` (requires `lower ≤ upper` in the semilattice).
pub struct FiberHom<E> {
    pub lower: usize,
    pub upper: usize,
    pub map: Arc<dyn Fn(&E) -> E + Send + Sync>,
}

impl<E> FiberHom<E> {
    pub fn new(
        lower: usize,
        upper: usize,
        map: impl Fn(&E) -> E + Send + Sync + 'static,
    ) -> Self {
        FiberHom { lower, upper, map: Arc::new(map) }
    }
}

/// Glue a semilattice-indexed family of algebras into one algebra on the
/// disjoint union: combining values from slots s and t maps both down into
/// the meet slot and combines there.
///
/// Validates, on the given per-fiber samples and coefficient grid, that the
/// maps land in their target fibers, compose correctly (`f ∘ g` along a
/// chain equals the direct map), fix everything when lower = upper, and are
/// homomorphisms for the fiber operations.
pub fn semilattice_glue<E>(
    order: &Semilattice,
    fibers: Vec<Oracle<E>>,
    homs: Vec<FiberHom<E>>,
    p_grid: &[Rational],
    fiber_samples: &[Vec<E>],
) -> Result<Oracle<Glued<E>>>
where
    E: Clone + Eq + fmt::Debug + Send + Sync + 'static,
{
    let n = order.len();
    if fibers.len() != n {
        return Err(Error::LengthMismatch { left: n, right: fibers.len() });
    }
    if fiber_samples.len() != n {
        return Err(Error::LengthMismatch { left: n, right: fiber_samples.len() });
    }
    for (s, samples) in fiber_samples.iter().enumerate() {
        for x in samples {
            if !fibers[s].contains(x) {
                return Err(Error::OutsideCarrier(format!("sample {x:?} not in fiber {s}")));
            }
        }
    }

    let mut map: BTreeMap<(usize, usize), Arc<dyn Fn(&E) -> E + Send + Sync>> = BTreeMap::new();
    for h in homs {
        if h.lower >= n || h.upper >= n {
            return Err(Error::FiberFamily(format!(
                "map slot ({}, {}) out of range for {} fibers",
                h.lower, h.upper, n
            )));
        }
        if !order.le_idx(h.lower, h.upper) {
            return Err(Error::FiberFamily(format!(
                "map from slot {} to slot {} does not go downward in the order",
                h.upper, h.lower
            )));
        }
        if map.insert((h.lower, h.upper), h.map).is_some() {
            return Err(Error::FiberFamily(format!(
                "duplicate map for slots ({}, {})",
                h.lower, h.upper
            )));
        }
    }
    // Identity maps may be omitted; if given they must fix the samples.
    for s in 0..n {
        if let Some(f) = map.get(&(s, s)) {
            for x in &fiber_samples[s] {
                if f(x) != *x {
                    return Err(Error::FiberFamily(format!(
                        "map for slot ({s}, {s}) moves {x:?}; it must be the identity"
                    )));
                }
            }
        }
    }
    // Every strictly-downward pair needs a map.
    for m in 0..n {
        for s in 0..n {
            if m != s && order.le_idx(m, s) && !map.contains_key(&(m, s)) {
                return Err(Error::FiberFamily(format!(
                    "missing map from slot {s} down to slot {m}"
                )));
            }
        }
    }
    let apply = |m: usize, s: usize, x: &E| -> E {
        if m == s {
            x.clone()
        } else {
            (map[&(m, s)])(x)
        }
    };
    // Maps land in their target fiber.
    for (&(m, s), _) in &map {
        for x in &fiber_samples[s] {
            let y = apply(m, s, x);
            if !fibers[m].contains(&y) {
                return Err(Error::FiberFamily(format!(
                    "map ({m}, {s}) sends {x:?} to {y:?}, outside fiber {m}"
                )));
            }
        }
    }
    // Composition along chains m ≤ s ≤ t.
    for m in 0..n {
        for s in 0..n {
            for t in 0..n {
                if m == s || s == t || !order.le_idx(m, s) || !order.le_idx(s, t) {
                    continue;
                }
                for x in &fiber_samples[t] {
                    let via = apply(m, s, &apply(s, t, x));
                    let direct = apply(m, t, x);
                    if via != direct {
                        return Err(Error::FiberFamily(format!(
                            "maps do not compose along {t} -> {s} -> {m} at {x:?}: \
                             {via:?} vs {direct:?}"
                        )));
                    }
                }
            }
        }
    }
    // Each map is a homomorphism for the fiber operations.
    for (&(m, s), _) in &map {
        if m == s {
            continue;
        }
        for p in p_grid {
            for x in &fiber_samples[s] {
                for y in &fiber_samples[s] {
                    let mapped = apply(m, s, &fibers[s].combine(p, x, y)?);
                    let combined =
                        fibers[m].combine(p, &apply(m, s, x), &apply(m, s, y))?;
                    if mapped != combined {
                        return Err(Error::FiberFamily(format!(
                            "map ({m}, {s}) is not a homomorphism at p={p}, x={x:?}, y={y:?}"
                        )));
                    }
                }
            }
        }
    }

    // Assemble the glued algebra.
    let finite_elems: Option<Vec<Glued<E>>> = {
        let mut out = Vec::new();
        let mut all = true;
        for (s, fiber) in fibers.iter().enumerate() {
            match fiber.elements() {
                Some(es) => {
                    out.extend(es.iter().map(|e| Glued { slot: s, value: e.clone() }))
                }
                None => {
                    all = false;
                    break;
                }
            }
        }
        all.then_some(out)
    };
    let meet = order.meet.clone();
    let fibers = Arc::new(fibers);
    let map = Arc::new(map);
    let op_fibers = Arc::clone(&fibers);
    let op = move |p: &Rational, a: &Glued<E>, b: &Glued<E>| {
        let m = meet[a.slot][b.slot];
        let xa = if m == a.slot { a.value.clone() } else { (map[&(m, a.slot)])(&a.value) };
        let xb = if m == b.slot { b.value.clone() } else { (map[&(m, b.slot)])(&b.value) };
        let value = op_fibers[m]
            .combine(p, &xa, &xb)
            .expect("coefficient was validated by the outer combine");
        Glued { slot: m, value }
    };
    match finite_elems {
        Some(elems) => Oracle::finite(elems, op),
        None => {
            let pred_fibers = Arc::clone(&fibers);
            Ok(Oracle::with_predicate(
                move |g: &Glued<E>| g.slot < n && pred_fibers[g.slot].contains(&g.value),
                op,
            ))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{check_axioms, extremal_points, interval_algebra};
    use crate::rational::rat;

    fn s(x: &str) -> String {
        x.to_string()
    }

    fn grid() -> Vec<Rational> {
        vec![rat(1, 4), rat(1, 2), rat(2, 3)]
    }

    fn chain2() -> Semilattice {
        Semilattice::new(vec![s("bot"), s("top")], vec![(s("bot"), s("top"))]).unwrap()
    }

    fn diamond() -> Semilattice {
        Semilattice::new(
            vec![s("bot"), s("l"), s("r"), s("top")],
            vec![
                (s("bot"), s("l")),
                (s("bot"), s("r")),
                (s("l"), s("top")),
                (s("r"), s("top")),
            ],
        )
        .unwrap()
    }

    #[test]
    fn chain_meets_are_minima() {
        let c = chain2();
        assert_eq!(c.meet("bot", "top").unwrap(), "bot");
        assert_eq!(c.meet("top", "top").unwrap(), "top");
        assert!(c.le("bot", "top").unwrap());
        assert!(!c.le("top", "bot").unwrap());
    }

    #[test]
    fn diamond_is_a_lattice_and_passes_axioms() {
        let d = diamond();
        assert_eq!(d.meet("l", "r").unwrap(), "bot");
        assert_eq!(d.meet("l", "top").unwrap(), "l");
        let alg = semilattice_algebra(&d);
        let labels: Vec<String> = d.labels().to_vec();
        let report = check_axioms(&alg, &grid(), &labels).unwrap();
        assert!(report.pass(), "{:?}", report.counterexample);
    }

    #[test]
    fn missing_meet_is_rejected() {
        // Two incomparable tops over two incomparable bottoms: {c,d} is the
        // lower-bound set of {a,b} but has no greatest element.
        let err = Semilattice::new(
            vec![s("a"), s("b"), s("c"), s("d")],
            vec![(s("c"), s("a")), (s("c"), s("b")), (s("d"), s("a")), (s("d"), s("b"))],
        );
        assert!(matches!(err, Err(Error::NotMeetSemilattice(_))));
    }

    #[test]
    fn order_cycles_and_unknowns_are_rejected() {
        assert!(matches!(
            Semilattice::new(vec![s("a"), s("b")], vec![(s("a"), s("b")), (s("b"), s("a"))]),
            Err(Error::InvalidOrder(_))
        ));
        assert!(matches!(
            Semilattice::new(vec![s("a")], vec![(s("a"), s("zzz"))]),
            Err(Error::InvalidOrder(_))
        ));
        assert!(matches!(
            Semilattice::new(vec![s("a"), s("a")], vec![]),
            Err(Error::DuplicateElement(_))
        ));
    }

    #[test]
    fn serde_round_trip() {
        let d = diamond();
        let json = serde_json::to_string(&d).unwrap();
        let back: Semilattice = serde_json::from_str(&json).unwrap();
        assert_eq!(d, back);
        let raw = r#"{"elements":["x","y"],"order":[["x","y"]]}"#;
        let parsed: Semilattice = serde_json::from_str(raw).unwrap();
        assert_eq!(parsed.meet("x", "y").unwrap(), "x");
    }

    #[test]
    fn glue_of_interval_over_point() {
        // Bottom fiber: one point. Top fiber: the interval [0,1] algebra.
        // The unique downward map collapses the interval to the point.
        let order = chain2();
        let bottom = Oracle::finite(vec![rat(0, 1)], |_, x: &Rational, _| x.clone()).unwrap();
        let top = interval_algebra(rat(0, 1), rat(1, 1));
        let homs = vec![FiberHom::new(0, 1, |_: &Rational| rat(0, 1))];
        let samples = vec![vec![rat(0, 1)], vec![rat(0, 1), rat(1, 2), rat(1, 1)]];
        let glued =
            semilattice_glue(&order, vec![bottom, top], homs, &grid(), &samples).unwrap();
        // Mixed combination lands in the bottom fiber.
        let a = Glued { slot: 1, value: rat(1, 2) };
        let b = Glued { slot: 0, value: rat(0, 1) };
        let r = glued.combine(&rat(1, 3), &a, &b).unwrap();
        assert_eq!(r, Glued { slot: 0, value: rat(0, 1) });
        // Same-fiber combination stays put and averages.
        let c = Glued { slot: 1, value: rat(1, 1) };
        let r = glued.combine(&rat(1, 2), &a, &c).unwrap();
        assert_eq!(r, Glued { slot: 1, value: rat(3, 4) });
        // The glued algebra passes the axiom suite on mixed samples.
        let mixed =
            vec![b.clone(), a.clone(), c.clone(), Glued { slot: 1, value: rat(0, 1) }];
        let report = check_axioms(&glued, &grid(), &mixed).unwrap();
        assert!(report.pass(), "{:?}", report.counterexample);
    }

    #[test]
    fn glue_with_two_singleton_fibers_has_top_extremal() {
        let order = chain2();
        let f0 = Oracle::finite(vec![0u8], |_, x: &u8, _| *x).unwrap();
        let f1 = Oracle::finite(vec![1u8], |_, x: &u8, _| *x).unwrap();
        let homs = vec![FiberHom::new(0, 1, |_: &u8| 0u8)];
        let samples = vec![vec![0], vec![1]];
        let glued = semilattice_glue(&order, vec![f0, f1], homs, &grid(), &samples).unwrap();
        let ext = extremal_points(&glued, &grid()).unwrap();
        assert_eq!(ext, vec![Glued { slot: 1, value: 1 }]);
    }

    #[test]
    fn broken_fiber_maps_are_rejected() {
        let order = chain2();
        let mk = || {
            (
                Oracle::finite(vec![0u8, 1], |_, x: &u8, y: &u8| *x.min(y)).unwrap(),
                Oracle::finite(vec![0u8, 1], |_, x: &u8, y: &u8| *x.min(y)).unwrap(),
            )
        };
        let samples = vec![vec![0, 1], vec![0, 1]];
        // Missing map.
        let (f0, f1) = mk();
        let err = semilattice_glue(&order, vec![f0, f1], vec![], &grid(), &samples);
        assert!(matches!(err, Err(Error::FiberFamily(_))));
        // Non-homomorphism: swaps 0 and 1, but min is not preserved.
        let (f0, f1) = mk();
        let homs = vec![FiberHom::new(0, 1, |x: &u8| 1 - *x)];
        let err = semilattice_glue(&order, vec![f0, f1], homs, &grid(), &samples);
        assert!(matches!(err, Err(Error::FiberFamily(_))));
        // Escapes the target fiber.
        let (f0, f1) = mk();
        let homs = vec![FiberHom::new(0, 1, |x: &u8| x + 10)];
        let err = semilattice_glue(&order, vec![f0, f1], homs, &grid(), &samples);
        assert!(matches!(err, Err(Error::FiberFamily(_))));
    }

    #[test]
    fn composition_violations_are_detected() {
        let order = Semilattice::new(
            vec![s("0"), s("1"), s("2")],
            vec![(s("0"), s("1")), (s("1"), s("2"))],
        )
        .unwrap();
        let fiber = || Oracle::finite(vec![0u8, 1], |_, x: &u8, y: &u8| *x.min(y)).unwrap();
        let samples = vec![vec![0, 1], vec![0, 1], vec![0, 1]];
        // 2 -> 1 keeps the value, 1 -> 0 keeps the value, but the direct
        // 2 -> 0 map flips it: composition breaks.
        let homs = vec![
            FiberHom::new(1, 2, |x: &u8| *x),
            FiberHom::new(0, 1, |x: &u8| *x),
            FiberHom::new(0, 2, |x: &u8| 1 - *x),
        ];
        let err = semilattice_glue(&order, vec![fiber(), fiber(), fiber()], homs, &grid(), &samples);
        match err {
            Err(Error::FiberFamily(msg)) => assert!(msg.contains("compose"), "{msg}"),
            other => panic!("expected a composition failure, got {other:?}"),
        }
    }
}
