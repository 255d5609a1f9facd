//! Convex-algebra oracles: a carrier plus a binary combination
//! `p·x + (1-p)·y`, together with derived n-ary combinations, axiom
//! certification on a coefficient grid, and the relational notions built
//! from the operation: adherence, cancellability, ideals, and extremal
//! sets/points.

use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{check_coefficient, complement, format_rational, Rational};

/// The element universe of an algebra: either an explicit finite list or a
/// membership predicate for carriers too big to enumerate.
pub enum Carrier<E> {
    Finite(Vec<E>),
    Predicate(Arc<dyn Fn(&E) -> bool + Send + Sync>),
}

/// A convex algebra presented operationally: a carrier and the binary
/// combination. All n-ary structure is derived from the binary one.
pub struct Oracle<E> {
    carrier: Carrier<E>,
    op: Arc<dyn Fn(&Rational, &E, &E) -> E + Send + Sync>,
}

impl<E> Clone for Oracle<E>
where
    E: Clone,
{
    fn clone(&self) -> Self {
        let carrier = match &self.carrier {
            Carrier::Finite(v) => Carrier::Finite(v.clone()),
            Carrier::Predicate(p) => Carrier::Predicate(Arc::clone(p)),
        };
        Oracle { carrier, op: Arc::clone(&self.op) }
    }
}

impl<E: fmt::Debug> fmt::Debug for Oracle<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.carrier {
            Carrier::Finite(v) => f.debug_struct("Oracle").field("carrier", v).finish(),
            Carrier::Predicate(_) => {
                f.debug_struct("Oracle").field("carrier", &"<predicate>").finish()
            }
        }
    }
}

impl<E: Clone + Eq + fmt::Debug> Oracle<E> {
    /// An algebra with an explicit finite carrier.
    pub fn finite(
        elements: Vec<E>,
        op: impl Fn(&Rational, &E, &E) -> E + Send + Sync + 'static,
    ) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::EmptyInput("algebra carrier must be nonempty"));
        }
        for (i, x) in elements.iter().enumerate() {
            if elements[..i].contains(x) {
                return Err(Error::DuplicateElement(format!("{x:?}")));
            }
        }
        Ok(Oracle { carrier: Carrier::Finite(elements), op: Arc::new(op) })
    }

    /// An algebra whose carrier is described by a membership predicate.
    pub fn with_predicate(
        member: impl Fn(&E) -> bool + Send + Sync + 'static,
        op: impl Fn(&Rational, &E, &E) -> E + Send + Sync + 'static,
    ) -> Self {
        Oracle { carrier: Carrier::Predicate(Arc::new(member)), op: Arc::new(op) }
    }

    /// The binary combination `p·x + (1-p)·y` for `p` strictly inside (0,1).
    pub fn combine(&self, p: &Rational, x: &E, y: &E) -> Result<E> {
        check_coefficient(p)?;
        Ok((self.op)(p, x, y))
    }

    /// Carrier membership.
    pub fn contains(&self, x: &E) -> bool {
        match &self.carrier {
            Carrier::Finite(v) => v.contains(x),
            Carrier::Predicate(f) => f(x),
        }
    }

    /// The element list, when the carrier is finite.
    pub fn elements(&self) -> Option<&[E]> {
        match &self.carrier {
            Carrier::Finite(v) => Some(v),
            Carrier::Predicate(_) => None,
        }
    }

    fn require_member(&self, x: &E) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::OutsideCarrier(format!("{x:?}")))
        }
    }

    fn require_finite(&self) -> Result<&[E]> {
        self.elements().ok_or(Error::InfiniteCarrier)
    }
}

/// A vector of convex coefficients: entries in [0,1] summing exactly to 1.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CoeffVector(Vec<Rational>);

impl CoeffVector {
    pub fn new(coeffs: Vec<Rational>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::EmptyInput("coefficient vector must be nonempty"));
        }
        for c in &coeffs {
            if c < &Rational::zero() || c > &Rational::one() {
                return Err(Error::CoefficientRange(format_rational(c)));
            }
        }
        let total: Rational = coeffs.iter().sum();
        if !total.is_one() {
            return Err(Error::CoefficientSum(format_rational(&total)));
        }
        Ok(CoeffVector(coeffs))
    }

    pub fn as_slice(&self) -> &[Rational] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// The n-ary combination `Σ pᵢ·xᵢ` derived from the binary operation: if
/// some coefficient is exactly 1 the combination projects onto its element;
/// otherwise the last element is peeled off via
/// `Σ pᵢxᵢ = (1-pₙ)·(Σ pⱼ/(1-pₙ)·xⱼ) + pₙ·xₙ` and zero coefficients drop
/// out without touching the operation.
pub fn derive_nary<E: Clone + Eq + fmt::Debug>(
    alg: &Oracle<E>,
    coeffs: &CoeffVector,
    elems: &[E],
) -> Result<E> {
    if coeffs.len() != elems.len() {
        return Err(Error::LengthMismatch { left: coeffs.len(), right: elems.len() });
    }
    for e in elems {
        alg.require_member(e)?;
    }
    if let Some(j) = coeffs.as_slice().iter().position(|c| c.is_one()) {
        return Ok(elems[j].clone());
    }
    peel(alg, coeffs.as_slice(), elems)
}

fn peel<E: Clone + Eq + fmt::Debug>(
    alg: &Oracle<E>,
    coeffs: &[Rational],
    elems: &[E],
) -> Result<E> {
    let n = coeffs.len();
    if n == 1 {
        // The sum invariant forces the lone coefficient to be 1.
        return Ok(elems[0].clone());
    }
    let last = &coeffs[n - 1];
    if last.is_zero() {
        return peel(alg, &coeffs[..n - 1], elems);
    }
    if last.is_one() {
        return Ok(elems[n - 1].clone());
    }
    let rest_weight = complement(last);
    let rescaled: Vec<Rational> = coeffs[..n - 1].iter().map(|c| c / &rest_weight).collect();
    let rest = peel(alg, &rescaled, elems)?;
    alg.combine(&rest_weight, &rest, &elems[n - 1])
}

/// The law an axiom-check counterexample violates, with the witnessing data.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum AxiomViolation<E> {
    Closure {
        #[serde(with = "crate::rational::rational_string")]
        p: Rational,
        x: E,
        y: E,
        result: E,
    },
    Idempotence {
        #[serde(with = "crate::rational::rational_string")]
        p: Rational,
        x: E,
        got: E,
    },
    Commutativity {
        #[serde(with = "crate::rational::rational_string")]
        p: Rational,
        x: E,
        y: E,
        left: E,
        right: E,
    },
    Associativity {
        #[serde(with = "crate::rational::rational_string")]
        p: Rational,
        #[serde(with = "crate::rational::rational_string")]
        q: Rational,
        x: E,
        y: E,
        z: E,
        left: E,
        right: E,
    },
}

/// Outcome of certifying the convex-algebra laws on a coefficient grid.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct AxiomReport<E> {
    /// Number of law instances evaluated.
    pub checked: usize,
    /// First violation found, in a fixed deterministic search order.
    pub counterexample: Option<AxiomViolation<E>>,
}

impl<E> AxiomReport<E> {
    pub fn pass(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// Certify closure, idempotence, commutativity, and parametric
/// associativity on the full grid: associativity ranges over all pairs
/// (p, q) from the grid.
pub fn check_axioms<E: Clone + Eq + fmt::Debug>(
    alg: &Oracle<E>,
    p_grid: &[Rational],
    samples: &[E],
) -> Result<AxiomReport<E>> {
    let mut pairs = Vec::with_capacity(p_grid.len() * p_grid.len());
    for p in p_grid {
        for q in p_grid {
            pairs.push((p.clone(), q.clone()));
        }
    }
    check_axioms_with_pairs(alg, p_grid, &pairs, samples)
}

/// Like [`check_axioms`] but with an explicit list of (p, q) pairs for the
/// associativity phase, so callers with expensive operations can budget the
/// cubic part separately.
pub fn check_axioms_with_pairs<E: Clone + Eq + fmt::Debug>(
    alg: &Oracle<E>,
    p_grid: &[Rational],
    assoc_pairs: &[(Rational, Rational)],
    samples: &[E],
) -> Result<AxiomReport<E>> {
    for p in p_grid {
        check_coefficient(p)?;
    }
    for (p, q) in assoc_pairs {
        check_coefficient(p)?;
        check_coefficient(q)?;
    }
    for s in samples {
        alg.require_member(s)?;
    }
    let mut checked = 0usize;
    let report = |cx: AxiomViolation<E>, checked: usize| AxiomReport {
        checked,
        counterexample: Some(cx),
    };

    // Closure: results must stay in the carrier.
    for p in p_grid {
        for x in samples {
            for y in samples {
                let r = alg.combine(p, x, y)?;
                checked += 1;
                if !alg.contains(&r) {
                    return Ok(report(
                        AxiomViolation::Closure {
                            p: p.clone(),
                            x: x.clone(),
                            y: y.clone(),
                            result: r,
                        },
                        checked,
                    ));
                }
            }
        }
    }

    // Idempotence: p·x + (1-p)·x = x.
    for p in p_grid {
        for x in samples {
            let got = alg.combine(p, x, x)?;
            checked += 1;
            if &got != x {
                return Ok(report(
                    AxiomViolation::Idempotence { p: p.clone(), x: x.clone(), got },
                    checked,
                ));
            }
        }
    }

    // Commutativity: p·x + (1-p)·y = (1-p)·y + p·x.
    for p in p_grid {
        let pbar = complement(p);
        for x in samples {
            for y in samples {
                let left = alg.combine(p, x, y)?;
                let right = alg.combine(&pbar, y, x)?;
                checked += 1;
                if left != right {
                    return Ok(report(
                        AxiomViolation::Commutativity {
                            p: p.clone(),
                            x: x.clone(),
                            y: y.clone(),
                            left,
                            right,
                        },
                        checked,
                    ));
                }
            }
        }
    }

    // Parametric associativity:
    // p(qx + (1-q)y) + (1-p)z = pq·x + (1-pq)·(ry + (1-r)z),
    // with r = p(1-q)/(1-pq); both pq and r stay strictly inside (0,1).
    for (p, q) in assoc_pairs {
        let pq = p * q;
        let r = (p * complement(q)) / complement(&pq);
        for x in samples {
            for y in samples {
                for z in samples {
                    let left = alg.combine(p, &alg.combine(q, x, y)?, z)?;
                    let inner = alg.combine(&r, y, z)?;
                    let right = alg.combine(&pq, x, &inner)?;
                    checked += 1;
                    if left != right {
                        return Ok(report(
                            AxiomViolation::Associativity {
                                p: p.clone(),
                                q: q.clone(),
                                x: x.clone(),
                                y: y.clone(),
                                z: z.clone(),
                                left,
                                right,
                            },
                            checked,
                        ));
                    }
                }
            }
        }
    }

    Ok(AxiomReport { checked, counterexample: None })
}

/// Whether `x` adheres to `y`: `p·x + (1-p)·y = y`. A single witness
/// coefficient strictly inside (0,1) decides the universally quantified
/// relation, because the set of witnesses is either empty or all of (0,1).
pub fn adheres<E: Clone + Eq + fmt::Debug>(
    alg: &Oracle<E>,
    x: &E,
    y: &E,
    p_witness: &Rational,
) -> Result<bool> {
    alg.require_member(x)?;
    alg.require_member(y)?;
    Ok(&alg.combine(p_witness, x, y)? == y)
}

/// `adheres` with the canonical witness 1/2.
pub fn adheres_half<E: Clone + Eq + fmt::Debug>(alg: &Oracle<E>, x: &E, y: &E) -> Result<bool> {
    adheres(alg, x, y, &Rational::new(1.into(), 2.into()))
}

/// Whether `z` can be cancelled from combinations: no two distinct elements
/// become equal after being combined with `z`. Exhaustive over a finite
/// carrier.
pub fn is_cancellable<E: Clone + Eq + fmt::Debug>(
    alg: &Oracle<E>,
    z: &E,
    p_grid: &[Rational],
) -> Result<bool> {
    let elems = alg.require_finite()?.to_vec();
    alg.require_member(z)?;
    Ok(cancellable_over(alg, z, &elems, p_grid)?.is_none())
}

/// Sampled variant of [`is_cancellable`] for infinite carriers: returns
/// true when no counterexample was found among the samples.
pub fn is_cancellable_sampled<E: Clone + Eq + fmt::Debug>(
    alg: &Oracle<E>,
    z: &E,
    samples: &[E],
    p_grid: &[Rational],
) -> Result<bool> {
    alg.require_member(z)?;
    for s in samples {
        alg.require_member(s)?;
    }
    Ok(cancellable_over(alg, z, samples, p_grid)?.is_none())
}

fn cancellable_over<E: Clone + Eq + fmt::Debug>(
    alg: &Oracle<E>,
    z: &E,
    pool: &[E],
    p_grid: &[Rational],
) -> Result<Option<(E, E, Rational)>> {
    for (i, x) in pool.iter().enumerate() {
        for y in &pool[i + 1..] {
            if x == y {
                continue;
            }
            for p in p_grid {
                if alg.combine(p, x, z)? == alg.combine(p, y, z)? {
                    return Ok(Some((x.clone(), y.clone(), p.clone())));
                }
            }
        }
    }
    Ok(None)
}

/// Classification of a subset of a convex algebra.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub struct SubsetReport {
    /// Combinations of a member with anything stay inside the subset.
    pub ideal: bool,
    /// An ideal whose complement is closed under combinations.
    pub prime: bool,
    /// Combinations only land in the subset when both arguments are in it.
    pub extremal: bool,
}

/// Classify a subset of a finite algebra exhaustively on the grid.
pub fn classify_subset<E: Clone + Eq + fmt::Debug>(
    alg: &Oracle<E>,
    subset: &[E],
    p_grid: &[Rational],
) -> Result<SubsetReport> {
    let elems = alg.require_finite()?.to_vec();
    for x in subset {
        alg.require_member(x)?;
    }
    let in_subset = |e: &E| subset.contains(e);
    classify_over(alg, &elems, &in_subset, p_grid)
}

/// Sampled classification for infinite carriers: membership is given by a
/// predicate and the universal quantifiers range over the samples.
pub fn classify_subset_sampled<E: Clone + Eq + fmt::Debug>(
    alg: &Oracle<E>,
    samples: &[E],
    in_subset: &dyn Fn(&E) -> bool,
    p_grid: &[Rational],
) -> Result<SubsetReport> {
    for s in samples {
        alg.require_member(s)?;
    }
    classify_over(alg, samples, in_subset, p_grid)
}

fn classify_over<E: Clone + Eq + fmt::Debug>(
    alg: &Oracle<E>,
    pool: &[E],
    in_subset: &dyn Fn(&E) -> bool,
    p_grid: &[Rational],
) -> Result<SubsetReport> {
    let mut ideal = true;
    'ideal: for x in pool.iter().filter(|e| in_subset(e)) {
        for y in pool {
            for p in p_grid {
                if !in_subset(&alg.combine(p, x, y)?) || !in_subset(&alg.combine(p, y, x)?) {
                    ideal = false;
                    break 'ideal;
                }
            }
        }
    }
    let mut complement_closed = true;
    'comp: for x in pool.iter().filter(|e| !in_subset(e)) {
        for y in pool.iter().filter(|e| !in_subset(e)) {
            for p in p_grid {
                if in_subset(&alg.combine(p, x, y)?) {
                    complement_closed = false;
                    break 'comp;
                }
            }
        }
    }
    let mut extremal = true;
    'ext: for x in pool {
        for y in pool {
            if in_subset(x) && in_subset(y) {
                continue;
            }
            for p in p_grid {
                if in_subset(&alg.combine(p, x, y)?) {
                    extremal = false;
                    break 'ext;
                }
            }
        }
    }
    Ok(SubsetReport { ideal, prime: ideal && complement_closed, extremal })
}

/// All elements that only arise as combinations of themselves: `z` is
/// extremal when `p·x + (1-p)·y = z` forces `x = y = z` on the grid.
pub fn extremal_points<E: Clone + Eq + fmt::Debug>(
    alg: &Oracle<E>,
    p_grid: &[Rational],
) -> Result<Vec<E>> {
    let elems = alg.require_finite()?.to_vec();
    let mut out = Vec::new();
    'cand: for z in &elems {
        for x in &elems {
            for y in &elems {
                if x == z && y == z {
                    continue;
                }
                for p in p_grid {
                    if &alg.combine(p, x, y)? == z {
                        continue 'cand;
                    }
                }
            }
        }
        out.push(z.clone());
    }
    Ok(out)
}

/// The convex algebra of exact rationals in a closed interval, combined by
/// genuine weighted averaging. Useful as a reference algebra: the derived
/// n-ary combination must equal the direct weighted sum.
pub fn interval_algebra(lo: Rational, hi: Rational) -> Oracle<Rational> {
    assert!(lo <= hi, "interval bounds out of order");
    Oracle::with_predicate(
        move |x: &Rational| *x >= lo && *x <= hi,
        |p, x, y| p * x + complement(p) * y,
    )
}
