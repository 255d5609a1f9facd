//! One-point extensions of convex algebras: operation tables, gluing,
//! classification probes, and naturality checks.
//!
//! An extension adjoins a single fresh point (displayed as `*`) to a carrier
//! and extends the mixing operations to it so that inner pairs mix exactly as
//! before. This module builds the standard extension tables over the free
//! algebra of distributions and over the algebra of polytopes inside a convex
//! domain, glues an extension of a prime ideal onto the whole algebra, and
//! recovers the construction behind an opaque extension oracle.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::de::DeserializeOwned;
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::algebra::{adheres_half, classify_subset_sampled, Oracle};
use crate::dist::Dist;
use crate::error::{Error, Result};
use crate::geometry::{
    decompose_2d, drop_last_coordinate, in_standard_simplex, standard_simplex, touches_all_faces,
    Polytope,
};
use crate::rational::{rat, Rational};

/// Element of a carrier enlarged by one fresh point.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum ExtElem<E> {
    /// An element of the original carrier.
    Inner(E),
    /// The adjoined point.
    Star,
}

impl<E> ExtElem<E> {
    /// The inner value, when this is not the adjoined point.
    pub fn inner(&self) -> Option<&E> {
        match self {
            ExtElem::Inner(e) => Some(e),
            ExtElem::Star => None,
        }
    }

    /// Whether this is the adjoined point.
    pub fn is_star(&self) -> bool {
        matches!(self, ExtElem::Star)
    }
}

impl<E: fmt::Display> fmt::Display for ExtElem<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtElem::Inner(e) => e.fmt(f),
            ExtElem::Star => write!(f, "*"),
        }
    }
}

impl<E: Serialize> Serialize for ExtElem<E> {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtElem::Inner(e) => e.serialize(ser),
            ExtElem::Star => {
                let mut map = ser.serialize_map(Some(1))?;
                map.serialize_entry("star", &true)?;
                map.end()
            }
        }
    }
}

impl<'de, E: DeserializeOwned> Deserialize<'de> for ExtElem<E> {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let value = serde_json::Value::deserialize(de)?;
        let is_star = value.as_object().is_some_and(|m| {
            m.len() == 1 && m.get("star").and_then(serde_json::Value::as_bool) == Some(true)
        });
        if is_star {
            return Ok(ExtElem::Star);
        }
        serde_json::from_value(value)
            .map(ExtElem::Inner)
            .map_err(serde::de::Error::custom)
    }
}

/// Blueprint for a one-point extension of the free algebra over a label set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FreeExtensionSpec {
    /// The adjoined point absorbs every mixture that involves it.
    BlackHole,
    /// The adjoined point mixes exactly like the stored distribution.
    Imitate(Dist),
    /// The adjoined point mixes like the stored point mass on every other
    /// element and absorbs mixtures with that point mass itself.
    Mixed(Dist),
}

impl Serialize for FreeExtensionSpec {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = ser.serialize_map(None)?;
        match self {
            FreeExtensionSpec::BlackHole => map.serialize_entry("kind", "black_hole")?,
            FreeExtensionSpec::Imitate(w) => {
                map.serialize_entry("kind", "imitate")?;
                map.serialize_entry("w", w)?;
            }
            FreeExtensionSpec::Mixed(w) => {
                map.serialize_entry("kind", "mixed")?;
                map.serialize_entry("w", w)?;
            }
        }
        map.end()
    }
}

#[derive(Deserialize)]
struct FreeSpecDoc {
    kind: String,
    #[serde(default)]
    w: Option<Dist>,
}

impl<'de> Deserialize<'de> for FreeExtensionSpec {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let doc = FreeSpecDoc::deserialize(de)?;
        let need_w = |w: Option<Dist>, kind: &str| {
            w.ok_or_else(|| serde::de::Error::custom(format!("kind {kind:?} requires field \"w\"")))
        };
        match doc.kind.as_str() {
            "black_hole" => Ok(FreeExtensionSpec::BlackHole),
            "imitate" => Ok(FreeExtensionSpec::Imitate(need_w(doc.w, "imitate")?)),
            "mixed" => Ok(FreeExtensionSpec::Mixed(need_w(doc.w, "mixed")?)),
            other => Err(serde::de::Error::custom(format!(
                "unknown extension kind {other:?} for a distribution carrier"
            ))),
        }
    }
}

/// Blueprint for a one-point extension of the polytope algebra in a domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CssExtensionSpec {
    /// The adjoined point absorbs every mixture that involves it.
    BlackHole,
    /// The adjoined point mixes exactly like the stored body.
    Imitate(Polytope),
    /// Imitation of a body in the visibility hull of the domain. A closed
    /// polytope domain is its own visibility hull, so this is normalized to
    /// plain imitation at build time.
    ImitateOuter(Polytope),
    /// The adjoined point mixes like the stored extremal body on every other
    /// body and absorbs mixtures with that body itself.
    Mixed(Polytope),
    /// Imitate the stored body (two or more points, extremal) on the
    /// canonical prime ideal of all other bodies; absorb the body itself.
    Case4(Polytope),
}

impl Serialize for CssExtensionSpec {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = ser.serialize_map(None)?;
        match self {
            CssExtensionSpec::BlackHole => map.serialize_entry("kind", "black_hole")?,
            CssExtensionSpec::Imitate(c) | CssExtensionSpec::ImitateOuter(c) => {
                map.serialize_entry("kind", "imitate")?;
                map.serialize_entry("C", c)?;
            }
            CssExtensionSpec::Mixed(c) => {
                map.serialize_entry("kind", "mixed")?;
                map.serialize_entry("C", c)?;
            }
            CssExtensionSpec::Case4(c) => {
                map.serialize_entry("kind", "case4")?;
                map.serialize_entry("C", c)?;
            }
        }
        map.end()
    }
}

#[derive(Deserialize)]
struct CssSpecDoc {
    kind: String,
    #[serde(default, rename = "C")]
    c: Option<Polytope>,
}

impl<'de> Deserialize<'de> for CssExtensionSpec {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let doc = CssSpecDoc::deserialize(de)?;
        let need_c = |c: Option<Polytope>, kind: &str| {
            c.ok_or_else(|| serde::de::Error::custom(format!("kind {kind:?} requires field \"C\"")))
        };
        match doc.kind.as_str() {
            "black_hole" => Ok(CssExtensionSpec::BlackHole),
            "imitate" => Ok(CssExtensionSpec::Imitate(need_c(doc.c, "imitate")?)),
            "imitate_outer" => Ok(CssExtensionSpec::ImitateOuter(need_c(doc.c, "imitate_outer")?)),
            "mixed" => Ok(CssExtensionSpec::Mixed(need_c(doc.c, "mixed")?)),
            "case4" => Ok(CssExtensionSpec::Case4(need_c(doc.c, "case4")?)),
            other => Err(serde::de::Error::custom(format!(
                "unknown extension kind {other:?} for a polytope carrier"
            ))),
        }
    }
}

/// The free algebra over `labels` extended by the table in `spec`.
///
/// Imitation parameters must be supported on `labels`; the mixed table
/// additionally requires its parameter to be a point mass — exactly the
/// extremal elements of the distribution algebra.
pub fn build_free_extension(
    labels: &[String],
    spec: &FreeExtensionSpec,
) -> Result<Oracle<ExtElem<Dist>>> {
    if let FreeExtensionSpec::Mixed(w) = spec {
        if w.as_dirac().is_none() {
            return Err(Error::NonExtremal(format!(
                "the mixed table needs a point mass, got {w}"
            )));
        }
    }
    build_free_extension_unchecked(labels, spec)
}

/// [`build_free_extension`] without the extremality guard on the mixed
/// table. A mixed table around a non-extremal parameter is not a convex
/// algebra; this entry point exists so the axiom checker can exhibit the
/// violation on demand.
pub fn build_free_extension_unchecked(
    labels: &[String],
    spec: &FreeExtensionSpec,
) -> Result<Oracle<ExtElem<Dist>>> {
    if labels.is_empty() {
        return Err(Error::EmptyInput("extension label set"));
    }
    match spec {
        FreeExtensionSpec::Imitate(w) | FreeExtensionSpec::Mixed(w) => {
            if !w.supported_on(labels) {
                return Err(Error::OutsideDomain(format!(
                    "imitated distribution {w} is not supported on the carrier labels"
                )));
            }
        }
        FreeExtensionSpec::BlackHole => {}
    }
    let member_labels = labels.to_vec();
    let member = move |e: &ExtElem<Dist>| match e {
        ExtElem::Star => true,
        ExtElem::Inner(d) => d.supported_on(&member_labels),
    };
    let oracle = match spec {
        FreeExtensionSpec::BlackHole => Oracle::with_predicate(member, |p, x, y| match (x, y) {
            (ExtElem::Inner(a), ExtElem::Inner(b)) => {
                ExtElem::Inner(Dist::combine_unchecked(p, a, b))
            }
            _ => ExtElem::Star,
        }),
        FreeExtensionSpec::Imitate(w) => {
            let w = w.clone();
            Oracle::with_predicate(member, move |p, x, y| match (x, y) {
                (ExtElem::Inner(a), ExtElem::Inner(b)) => {
                    ExtElem::Inner(Dist::combine_unchecked(p, a, b))
                }
                (ExtElem::Inner(a), ExtElem::Star) => {
                    ExtElem::Inner(Dist::combine_unchecked(p, a, &w))
                }
                (ExtElem::Star, ExtElem::Inner(b)) => {
                    ExtElem::Inner(Dist::combine_unchecked(p, &w, b))
                }
                (ExtElem::Star, ExtElem::Star) => ExtElem::Star,
            })
        }
        FreeExtensionSpec::Mixed(w) => {
            let w = w.clone();
            Oracle::with_predicate(member, move |p, x, y| match (x, y) {
                (ExtElem::Inner(a), ExtElem::Inner(b)) => {
                    ExtElem::Inner(Dist::combine_unchecked(p, a, b))
                }
                (ExtElem::Inner(a), ExtElem::Star) if *a != w => {
                    ExtElem::Inner(Dist::combine_unchecked(p, a, &w))
                }
                (ExtElem::Star, ExtElem::Inner(b)) if *b != w => {
                    ExtElem::Inner(Dist::combine_unchecked(p, &w, b))
                }
                _ => ExtElem::Star,
            })
        }
    };
    Ok(oracle)
}

/// Whether `domain` is the standard simplex of its ambient dimension.
fn is_standard_simplex(domain: &Polytope) -> bool {
    standard_simplex(domain.dim()).map(|s| s == *domain).unwrap_or(false)
}

/// Membership test for polytopes inside `domain`, with a coordinate fast
/// path when the domain is a standard simplex.
fn domain_membership(domain: &Polytope) -> Arc<dyn Fn(&Polytope) -> bool + Send + Sync> {
    let dim = domain.dim();
    let simplex = is_standard_simplex(domain);
    let domain = domain.clone();
    Arc::new(move |a: &Polytope| {
        if a.dim() != dim {
            return false;
        }
        if simplex {
            a.vertices().iter().all(in_standard_simplex)
        } else {
            a.subset_of(&domain).unwrap_or(false)
        }
    })
}

/// The algebra of nonempty closed polytopes inside `domain` under pointwise
/// mixing.
pub fn css_algebra(domain: &Polytope) -> Oracle<Polytope> {
    let member = domain_membership(domain);
    Oracle::with_predicate(
        move |a: &Polytope| member(a),
        |p, a, b| Polytope::combine(p, a, b).expect("mixing closed polytopes cannot fail"),
    )
}

/// Mix two bodies pointwise inside `domain`, checking that the arguments and
/// the result stay in the domain.
pub fn css_combine(p: &Rational, a: &Polytope, b: &Polytope, domain: &Polytope) -> Result<Polytope> {
    let member = domain_membership(domain);
    if !member(a) {
        return Err(Error::OutsideDomain(format!(
            "left body {a} is not contained in the domain"
        )));
    }
    if !member(b) {
        return Err(Error::OutsideDomain(format!(
            "right body {b} is not contained in the domain"
        )));
    }
    let out = Polytope::combine(p, a, b)?;
    if !member(&out) {
        return Err(Error::InconsistentOracle(format!(
            "mixture {out} escaped the domain, which therefore cannot be convex"
        )));
    }
    Ok(out)
}

/// Adherence between closed bodies: a closed polytope adheres only to
/// itself, so this is canonical equality.
pub fn css_adheres(a: &Polytope, c: &Polytope) -> bool {
    a == c
}

/// Whether `c` is an extremal element of the polytope algebra inside the
/// standard simplex with `n` corners (`n` must be 2 or 3).
///
/// The extremal bodies are exactly the corner singletons together with the
/// non-singleton bodies that touch every facet of the simplex and whose
/// shadow under dropping the last coordinate is indecomposable.
pub fn is_extremal_in_kd_simplex(c: &Polytope, n: usize) -> Result<bool> {
    if n != 2 && n != 3 {
        return Err(Error::UnsupportedDimension(n));
    }
    if c.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: c.dim() });
    }
    if c.is_singleton() {
        let point = &c.vertices()[0];
        if !in_standard_simplex(point) {
            return Err(Error::OutsideDomain(format!(
                "singleton {c} lies outside the standard simplex"
            )));
        }
        return Ok(standard_simplex(n)?.vertices().contains(point));
    }
    if !touches_all_faces(c)? {
        return Ok(false);
    }
    let shadow = drop_last_coordinate(c)?;
    Ok(decompose_2d(&shadow)?.is_none())
}

/// Result of the eligibility test for the absorb-one-body construction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Case4Report {
    /// Whether the construction applies to the queried body.
    pub eligible: bool,
    /// Description of the canonical prime ideal, when eligible.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub canonical_prime: Option<String>,
}

/// Whether the body `c` admits the absorb-one-body extension inside
/// `domain`, and the canonical prime ideal when it does.
///
/// `c` must be closed with at least two points, and `domain` must be a
/// standard simplex with 2 or 3 corners — the range where extremality of
/// bodies is decidable.
pub fn eligible_case4(c: &Polytope, domain: &Polytope) -> Result<Case4Report> {
    if c.is_singleton() {
        return Err(Error::SingletonParameter);
    }
    if !is_standard_simplex(domain) {
        return Err(Error::InvalidPolytope(
            "eligibility is only decided inside a standard simplex domain".into(),
        ));
    }
    if c.dim() != domain.dim() {
        return Err(Error::DimensionMismatch { expected: domain.dim(), got: c.dim() });
    }
    if !c.subset_of(domain)? {
        return Err(Error::OutsideDomain(format!(
            "body {c} is not contained in the domain"
        )));
    }
    let eligible = is_extremal_in_kd_simplex(c, domain.dim())?;
    Ok(Case4Report {
        eligible,
        canonical_prime: eligible
            .then(|| "all bodies in the domain except the absorbed body itself".to_string()),
    })
}

/// Check that `w` is an extremal element of the polytope algebra in `domain`.
fn require_css_extremal(domain: &Polytope, w: &Polytope) -> Result<()> {
    if w.is_singleton() {
        // a singleton is extremal in the set algebra exactly when its point
        // is an extreme point of the domain
        if domain.vertices().contains(&w.vertices()[0]) {
            Ok(())
        } else {
            Err(Error::NonExtremal(format!(
                "singleton {w} does not sit at a corner of the domain"
            )))
        }
    } else if is_standard_simplex(domain) {
        if is_extremal_in_kd_simplex(w, domain.dim())? {
            Ok(())
        } else {
            Err(Error::NonExtremal(format!(
                "body {w} is decomposable or misses a facet of the simplex"
            )))
        }
    } else {
        Err(Error::InvalidPolytope(
            "extremality of a non-singleton body is only decided inside a standard simplex domain"
                .into(),
        ))
    }
}

/// Shared mixed/absorb-one-body operation table over polytopes.
fn css_mixed_table(
    w: Polytope,
) -> impl Fn(&Rational, &ExtElem<Polytope>, &ExtElem<Polytope>) -> ExtElem<Polytope>
       + Send
       + Sync
       + 'static {
    move |p, x, y| match (x, y) {
        (ExtElem::Inner(a), ExtElem::Inner(b)) => ExtElem::Inner(
            Polytope::combine(p, a, b).expect("mixing closed polytopes cannot fail"),
        ),
        (ExtElem::Inner(a), ExtElem::Star) if *a != w => ExtElem::Inner(
            Polytope::combine(p, a, &w).expect("mixing closed polytopes cannot fail"),
        ),
        (ExtElem::Star, ExtElem::Inner(b)) if *b != w => ExtElem::Inner(
            Polytope::combine(p, &w, b).expect("mixing closed polytopes cannot fail"),
        ),
        _ => ExtElem::Star,
    }
}

/// The polytope algebra inside `domain` extended by the table in `spec`.
///
/// Validates the spec invariants: imitation bodies must live inside the
/// domain, mixed parameters must be extremal, and the absorb-one-body
/// construction must be eligible.
pub fn build_css_extension(
    domain: &Polytope,
    spec: &CssExtensionSpec,
) -> Result<Oracle<ExtElem<Polytope>>> {
    match spec {
        CssExtensionSpec::Mixed(w) => require_css_extremal(domain, w)?,
        CssExtensionSpec::Case4(c) => {
            let report = eligible_case4(c, domain)?;
            if !report.eligible {
                return Err(Error::NonExtremal(format!(
                    "body {c} is not extremal, so absorbing it does not leave a prime ideal"
                )));
            }
        }
        _ => {}
    }
    build_css_extension_unchecked(domain, spec)
}

/// [`build_css_extension`] without the extremality and eligibility guards.
/// Still checks containment in the domain. Tables built from rejected
/// parameters are not convex algebras; this entry point feeds them to the
/// axiom checker.
pub fn build_css_extension_unchecked(
    domain: &Polytope,
    spec: &CssExtensionSpec,
) -> Result<Oracle<ExtElem<Polytope>>> {
    let member = domain_membership(domain);
    let require_in_domain = |c: &Polytope| -> Result<()> {
        if c.dim() != domain.dim() {
            return Err(Error::DimensionMismatch { expected: domain.dim(), got: c.dim() });
        }
        if member(c) {
            Ok(())
        } else {
            Err(Error::OutsideDomain(format!(
                "extension body {c} is not contained in the domain"
            )))
        }
    };
    // a closed polytope domain is its own visibility hull, so outer
    // imitation collapses to inner imitation
    let spec = match spec {
        CssExtensionSpec::ImitateOuter(c) => CssExtensionSpec::Imitate(c.clone()),
        other => other.clone(),
    };
    let carrier_member = member.clone();
    let carrier = move |e: &ExtElem<Polytope>| match e {
        ExtElem::Star => true,
        ExtElem::Inner(a) => carrier_member(a),
    };
    let oracle = match spec {
        CssExtensionSpec::BlackHole => Oracle::with_predicate(carrier, |p, x, y| match (x, y) {
            (ExtElem::Inner(a), ExtElem::Inner(b)) => ExtElem::Inner(
                Polytope::combine(p, a, b).expect("mixing closed polytopes cannot fail"),
            ),
            _ => ExtElem::Star,
        }),
        CssExtensionSpec::Imitate(w) => {
            require_in_domain(&w)?;
            Oracle::with_predicate(carrier, move |p, x, y| match (x, y) {
                (ExtElem::Inner(a), ExtElem::Inner(b)) => ExtElem::Inner(
                    Polytope::combine(p, a, b).expect("mixing closed polytopes cannot fail"),
                ),
                (ExtElem::Inner(a), ExtElem::Star) => ExtElem::Inner(
                    Polytope::combine(p, a, &w).expect("mixing closed polytopes cannot fail"),
                ),
                (ExtElem::Star, ExtElem::Inner(b)) => ExtElem::Inner(
                    Polytope::combine(p, &w, b).expect("mixing closed polytopes cannot fail"),
                ),
                (ExtElem::Star, ExtElem::Star) => ExtElem::Star,
            })
        }
        CssExtensionSpec::Mixed(w) => {
            require_in_domain(&w)?;
            Oracle::with_predicate(carrier, css_mixed_table(w))
        }
        CssExtensionSpec::Case4(c) => {
            require_in_domain(&c)?;
            if c.is_singleton() {
                return Err(Error::SingletonParameter);
            }
            // the canonical prime ideal is everything except the absorbed
            // body, which makes the table the mixed one
            Oracle::with_predicate(carrier, css_mixed_table(c))
        }
        CssExtensionSpec::ImitateOuter(_) => unreachable!("normalized above"),
    };
    Ok(oracle)
}

/// The absorb-one-body table driven by a caller-supplied prime ideal
/// predicate. The predicate is validated on the samples only: it must
/// classify as a prime ideal and must exclude the absorbed body.
pub fn build_case4_with_prime(
    domain: &Polytope,
    c: &Polytope,
    in_prime: Arc<dyn Fn(&Polytope) -> bool + Send + Sync>,
    samples: &[Polytope],
    p_grid: &[Rational],
) -> Result<Oracle<ExtElem<Polytope>>> {
    if c.is_singleton() {
        return Err(Error::SingletonParameter);
    }
    let member = domain_membership(domain);
    if !member(c) {
        return Err(Error::OutsideDomain(format!(
            "absorbed body {c} is not contained in the domain"
        )));
    }
    if in_prime(c) {
        return Err(Error::NotPrime(
            "the prime ideal must not contain the absorbed body".into(),
        ));
    }
    let base = css_algebra(domain);
    let report = classify_subset_sampled(&base, samples, &|a| in_prime(a), p_grid)?;
    if !report.prime {
        return Err(Error::NotPrime(
            "the supplied predicate does not classify as a prime ideal on the samples".into(),
        ));
    }
    let carrier = move |e: &ExtElem<Polytope>| match e {
        ExtElem::Star => true,
        ExtElem::Inner(a) => member(a),
    };
    let w = c.clone();
    Ok(Oracle::with_predicate(carrier, move |p, x, y| match (x, y) {
        (ExtElem::Inner(a), ExtElem::Inner(b)) => ExtElem::Inner(
            Polytope::combine(p, a, b).expect("mixing closed polytopes cannot fail"),
        ),
        (ExtElem::Inner(a), ExtElem::Star) if in_prime(a) => ExtElem::Inner(
            Polytope::combine(p, a, &w).expect("mixing closed polytopes cannot fail"),
        ),
        (ExtElem::Star, ExtElem::Inner(b)) if in_prime(b) => ExtElem::Inner(
            Polytope::combine(p, &w, b).expect("mixing closed polytopes cannot fail"),
        ),
        _ => ExtElem::Star,
    }))
}

/// An extension of a sub-carrier whose adjoined point mixes like the fixed
/// element `w`. The element may lie outside the sub-carrier in the ambient
/// algebra whose operation is supplied; this is the standard inner
/// ingredient for [`glue`].
pub fn imitate_inner_extension<E: Clone + Eq + fmt::Debug + Send + Sync + 'static>(
    member: Arc<dyn Fn(&E) -> bool + Send + Sync>,
    ambient_op: Arc<dyn Fn(&Rational, &E, &E) -> E + Send + Sync>,
    w: E,
) -> Oracle<ExtElem<E>> {
    let op_w = w.clone();
    Oracle::with_predicate(
        move |e: &ExtElem<E>| match e {
            ExtElem::Star => true,
            ExtElem::Inner(x) => member(x),
        },
        move |p, x, y| match (x, y) {
            (ExtElem::Inner(a), ExtElem::Inner(b)) => ExtElem::Inner(ambient_op(p, a, b)),
            (ExtElem::Inner(a), ExtElem::Star) => ExtElem::Inner(ambient_op(p, a, &op_w)),
            (ExtElem::Star, ExtElem::Inner(b)) => ExtElem::Inner(ambient_op(p, &op_w, b)),
            (ExtElem::Star, ExtElem::Star) => ExtElem::Star,
        },
    )
}

/// Glue an extension of a prime ideal onto the whole algebra.
///
/// `in_prime` must classify as a prime ideal of `base` on the samples.
/// `inner` must extend the ideal (agreeing with `base` on inner pairs), its
/// adjoined point must adhere to nothing, and each mixture `p·x + p̄·y` of an
/// ideal element `x` with an outside element `y` must adhere to the inner
/// mixture `p·x ⊞ p̄·*`. The result extends `base`: inner pairs mix in
/// `base`, ideal elements mix with the adjoined point through `inner`, and
/// every other mixture involving the adjoined point absorbs into it.
pub fn glue<E: Clone + Eq + fmt::Debug + Send + Sync + 'static>(
    base: &Oracle<E>,
    in_prime: Arc<dyn Fn(&E) -> bool + Send + Sync>,
    inner: &Oracle<ExtElem<E>>,
    p_grid: &[Rational],
    samples: &[E],
) -> Result<Oracle<ExtElem<E>>> {
    if samples.is_empty() {
        return Err(Error::EmptyInput("glue validation samples"));
    }
    let report = classify_subset_sampled(base, samples, &|e| in_prime(e), p_grid)?;
    if !report.prime {
        return Err(Error::NotPrime(
            "the glued subset does not classify as a prime ideal on the samples".into(),
        ));
    }
    let prime_samples: Vec<&E> = samples.iter().filter(|e| in_prime(e)).collect();
    let outer_samples: Vec<&E> = samples.iter().filter(|e| !in_prime(e)).collect();
    for x in &prime_samples {
        for y in &prime_samples {
            for p in p_grid {
                let via_inner =
                    inner.combine(p, &ExtElem::Inner((*x).clone()), &ExtElem::Inner((*y).clone()))?;
                let via_base = ExtElem::Inner(base.combine(p, x, y)?);
                if via_inner != via_base {
                    return Err(Error::GlueCompatibility(format!(
                        "inner extension disagrees with the base algebra at p={p}, x={x:?}, y={y:?}"
                    )));
                }
            }
        }
    }
    for x in &prime_samples {
        if adheres_half(inner, &ExtElem::Inner((*x).clone()), &ExtElem::Star)? {
            return Err(Error::InnerAdherence(format!(
                "{x:?} adheres to the adjoined point inside the inner extension"
            )));
        }
    }
    for x in &prime_samples {
        for y in &outer_samples {
            for p in p_grid {
                let mixture = ExtElem::Inner(base.combine(p, x, y)?);
                let inner_mixture = inner.combine(p, &ExtElem::Inner((*x).clone()), &ExtElem::Star)?;
                if !adheres_half(inner, &mixture, &inner_mixture)? {
                    return Err(Error::GlueCompatibility(format!(
                        "mixture at p={p} of {x:?} and {y:?} does not adhere to the inner mixture with the adjoined point"
                    )));
                }
            }
        }
    }
    let base_for_op = base.clone();
    let inner_for_op = inner.clone();
    let prime_for_op = in_prime.clone();
    let op = move |p: &Rational, x: &ExtElem<E>, y: &ExtElem<E>| match (x, y) {
        (ExtElem::Inner(a), ExtElem::Inner(b)) => ExtElem::Inner(
            base_for_op.combine(p, a, b).expect("coefficient validated by the outer call"),
        ),
        (ExtElem::Inner(a), ExtElem::Star) if prime_for_op(a) => inner_for_op
            .combine(p, x, y)
            .expect("coefficient validated by the outer call"),
        (ExtElem::Star, ExtElem::Inner(b)) if prime_for_op(b) => inner_for_op
            .combine(p, x, y)
            .expect("coefficient validated by the outer call"),
        _ => ExtElem::Star,
    };
    match base.elements() {
        Some(elems) => {
            let mut extended: Vec<ExtElem<E>> =
                elems.iter().cloned().map(ExtElem::Inner).collect();
            extended.push(ExtElem::Star);
            Oracle::finite(extended, op)
        }
        None => {
            let base_for_member = base.clone();
            Ok(Oracle::with_predicate(
                move |e: &ExtElem<E>| match e {
                    ExtElem::Star => true,
                    ExtElem::Inner(x) => base_for_member.contains(x),
                },
                op,
            ))
        }
    }
}

/// Shape of the sampled adherence set of a probed extension.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdherenceSet {
    /// Every sampled element adheres to the adjoined point.
    Everything,
    /// No element adheres to the adjoined point.
    Empty,
    /// Exactly the recovered imitation target adheres.
    ExactlyW,
}

/// Which extension family a probed oracle over distributions belongs to.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtensionReport {
    /// 1: everything adheres (absorbing point); 2: nothing adheres and the
    /// point imitates `w`; 3: exactly the point mass `w` adheres.
    pub case: u8,
    /// The recovered imitation target, for cases 2 and 3.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w: Option<Dist>,
    /// Shape of the adherence set seen on the samples.
    pub adherence: AdherenceSet,
}

/// Recover the construction behind an opaque extension oracle over
/// distributions.
///
/// Probes adherence of each sample to the adjoined point; when something
/// does not adhere, reconstructs the imitated distribution from a single
/// half-half mixture with the adjoined point and verifies pure imitation on
/// all non-adhering samples across the grid.
pub fn probe_extension(
    ext: &Oracle<ExtElem<Dist>>,
    samples: &[Dist],
    p_grid: &[Rational],
) -> Result<ExtensionReport> {
    if samples.is_empty() {
        return Err(Error::EmptyInput("probe samples"));
    }
    let mut pool: Vec<Dist> = Vec::new();
    for s in samples {
        if !ext.contains(&ExtElem::Inner(s.clone())) {
            return Err(Error::OutsideCarrier(format!("{s:?}")));
        }
        if !pool.contains(s) {
            pool.push(s.clone());
        }
    }
    let half = rat(1, 2);
    for x in &pool {
        for y in &pool {
            let got = ext.combine(&half, &ExtElem::Inner(x.clone()), &ExtElem::Inner(y.clone()))?;
            let want = ExtElem::Inner(Dist::combine_unchecked(&half, x, y));
            if got != want {
                return Err(Error::InconsistentOracle(format!(
                    "oracle does not restrict to distribution mixing at x={x}, y={y}"
                )));
            }
        }
    }
    if ext.combine(&half, &ExtElem::Star, &ExtElem::Star)? != ExtElem::Star {
        return Err(Error::InconsistentOracle(
            "mixing the adjoined point with itself must stay at the adjoined point".into(),
        ));
    }
    let mut adhering: Vec<Dist> = Vec::new();
    let mut prime: Vec<Dist> = Vec::new();
    for s in &pool {
        if ext.combine(&half, &ExtElem::Inner(s.clone()), &ExtElem::Star)? == ExtElem::Star {
            adhering.push(s.clone());
        } else {
            prime.push(s.clone());
        }
    }
    if prime.is_empty() {
        return Ok(ExtensionReport { case: 1, w: None, adherence: AdherenceSet::Everything });
    }
    let z = &prime[0];
    let mixture = match ext.combine(&half, &ExtElem::Inner(z.clone()), &ExtElem::Star)? {
        ExtElem::Inner(e) => e,
        ExtElem::Star => {
            return Err(Error::InconsistentOracle(format!(
                "probe at {z} flipped between absorbing and not absorbing"
            )))
        }
    };
    // the half-half mixture m satisfies m = z/2 + w/2, so w = 2m − z
    let two = rat(2, 1);
    let mut weights: BTreeMap<String, Rational> = BTreeMap::new();
    for (label, q) in mixture.iter() {
        weights.insert(label.to_string(), q * &two);
    }
    for (label, q) in z.iter() {
        *weights.entry(label.to_string()).or_insert_with(|| rat(0, 1)) -= q;
    }
    let w = Dist::new(weights).map_err(|e| {
        Error::NotADistribution(format!("recovered imitation vector is invalid: {e}"))
    })?;
    for x in &prime {
        for p in p_grid {
            let want_right = ExtElem::Inner(Dist::combine_unchecked(p, x, &w));
            let got_right = ext.combine(p, &ExtElem::Inner(x.clone()), &ExtElem::Star)?;
            if got_right != want_right {
                return Err(Error::InconsistentOracle(format!(
                    "mixture at p={p} of {x} with the adjoined point is not imitation of {w}"
                )));
            }
            let want_left = ExtElem::Inner(Dist::combine_unchecked(p, &w, x));
            let got_left = ext.combine(p, &ExtElem::Star, &ExtElem::Inner(x.clone()))?;
            if got_left != want_left {
                return Err(Error::InconsistentOracle(format!(
                    "mixture at p={p} of the adjoined point with {x} is not imitation of {w}"
                )));
            }
        }
    }
    let w_adheres = ext.combine(&half, &ExtElem::Inner(w.clone()), &ExtElem::Star)? == ExtElem::Star;
    if w_adheres {
        if w.as_dirac().is_none() {
            return Err(Error::InconsistentOracle(format!(
                "absorbed imitation target {w} is not a point mass"
            )));
        }
        for a in &adhering {
            if *a != w {
                return Err(Error::InconsistentOracle(format!(
                    "sample {a} adheres but differs from the imitation target {w}"
                )));
            }
        }
        Ok(ExtensionReport { case: 3, w: Some(w), adherence: AdherenceSet::ExactlyW })
    } else {
        if let Some(a) = adhering.first() {
            return Err(Error::InconsistentOracle(format!(
                "sample {a} adheres although the adjoined point imitates {w} everywhere"
            )));
        }
        Ok(ExtensionReport { case: 2, w: Some(w), adherence: AdherenceSet::Empty })
    }
}

/// A map between free algebras determined by images of the generators and
/// extended to distributions by mixing those images.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ConvexMap {
    target_of: BTreeMap<String, Dist>,
}

impl ConvexMap {
    /// A map from the generator images.
    pub fn new(target_of: BTreeMap<String, Dist>) -> Result<ConvexMap> {
        if target_of.is_empty() {
            return Err(Error::EmptyInput("generator image table"));
        }
        Ok(ConvexMap { target_of })
    }

    /// The image of one generator.
    pub fn image_of(&self, label: &str) -> Option<&Dist> {
        self.target_of.get(label)
    }

    /// Apply the map to a distribution by mixing the generator images.
    pub fn apply(&self, d: &Dist) -> Result<Dist> {
        let mut acc: BTreeMap<String, Rational> = BTreeMap::new();
        for (label, q) in d.iter() {
            let image = self.target_of.get(label).ok_or_else(|| {
                Error::OutsideDomain(format!("no image assigned to generator {label:?}"))
            })?;
            for (target, r) in image.iter() {
                *acc.entry(target.to_string()).or_insert_with(|| rat(0, 1)) += q * r;
            }
        }
        Dist::new(acc)
    }

    /// Apply the map, sending the adjoined point to the adjoined point.
    pub fn apply_ext(&self, e: &ExtElem<Dist>) -> Result<ExtElem<Dist>> {
        match e {
            ExtElem::Star => Ok(ExtElem::Star),
            ExtElem::Inner(d) => Ok(ExtElem::Inner(self.apply(d)?)),
        }
    }
}

/// Whether the star-preserving lift of `map` is a homomorphism from the
/// `dom_spec` extension over `dom_labels` to the `cod_spec` extension over
/// `cod_labels`, tested on all grid coefficients and sample tuples
/// (including the adjoined point).
pub fn check_naturality(
    dom_labels: &[String],
    cod_labels: &[String],
    dom_spec: &FreeExtensionSpec,
    cod_spec: &FreeExtensionSpec,
    map: &ConvexMap,
    samples: &[Dist],
    p_grid: &[Rational],
) -> Result<bool> {
    let dom = build_free_extension(dom_labels, dom_spec)?;
    let cod = build_free_extension(cod_labels, cod_spec)?;
    for label in dom_labels {
        let image = map.apply(&Dist::dirac(label))?;
        if !image.supported_on(cod_labels) {
            return Err(Error::OutsideDomain(format!(
                "image of generator {label:?} leaves the codomain labels"
            )));
        }
    }
    for s in samples {
        if !dom.contains(&ExtElem::Inner(s.clone())) {
            return Err(Error::OutsideCarrier(format!("{s:?}")));
        }
    }
    for p in p_grid {
        for x in samples {
            for y in samples {
                let direct = map.apply(&Dist::combine_unchecked(p, x, y))?;
                let piecewise =
                    Dist::combine_unchecked(p, &map.apply(x)?, &map.apply(y)?);
                if direct != piecewise {
                    return Err(Error::InconsistentOracle(format!(
                        "map fails the homomorphism law at p={p}, x={x}, y={y}"
                    )));
                }
            }
        }
    }
    let mut points: Vec<ExtElem<Dist>> =
        samples.iter().cloned().map(ExtElem::Inner).collect();
    points.push(ExtElem::Star);
    for p in p_grid {
        for a in &points {
            for b in &points {
                let lhs = map.apply_ext(&dom.combine(p, a, b)?)?;
                let rhs = cod.combine(p, &map.apply_ext(a)?, &map.apply_ext(b)?)?;
                if lhs != rhs {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{check_axioms, AxiomViolation};
    use crate::dist::{free_algebra, uniform};
    use crate::geometry::tests_support::pt;

    fn labels() -> Vec<String> {
        vec!["a".to_string(), "b".to_string()]
    }

    fn d(pairs: &[(&str, (i64, i64))]) -> Dist {
        Dist::new(pairs.iter().map(|(l, (n, m))| (l.to_string(), rat(*n, *m)))).unwrap()
    }

    fn grid() -> Vec<Rational> {
        vec![rat(1, 4), rat(1, 3), rat(1, 2), rat(2, 3), rat(3, 4)]
    }

    fn free_samples() -> Vec<Dist> {
        vec![
            Dist::dirac("a"),
            Dist::dirac("b"),
            uniform(&labels()).unwrap(),
            d(&[("a", (1, 4)), ("b", (3, 4))]),
        ]
    }

    fn delta1() -> Polytope {
        Polytope::singleton(pt(&[(1, 1), (0, 1)])).unwrap()
    }

    fn delta2() -> Polytope {
        Polytope::singleton(pt(&[(0, 1), (1, 1)])).unwrap()
    }

    fn segment() -> Polytope {
        standard_simplex(2).unwrap()
    }

    fn css_samples() -> Vec<Polytope> {
        vec![
            delta1(),
            delta2(),
            Polytope::singleton(pt(&[(1, 2), (1, 2)])).unwrap(),
            Polytope::hull(&[pt(&[(1, 4), (3, 4)]), pt(&[(3, 4), (1, 4)])]).unwrap(),
            segment(),
        ]
    }

    #[test]
    fn black_hole_table_absorbs() {
        let ext = build_free_extension(&labels(), &FreeExtensionSpec::BlackHole).unwrap();
        let half = rat(1, 2);
        let a = ExtElem::Inner(Dist::dirac("a"));
        assert_eq!(ext.combine(&half, &a, &ExtElem::Star).unwrap(), ExtElem::Star);
        assert_eq!(ext.combine(&half, &ExtElem::Star, &a).unwrap(), ExtElem::Star);
        assert_eq!(ext.combine(&half, &ExtElem::Star, &ExtElem::Star).unwrap(), ExtElem::Star);
        let b = ExtElem::Inner(Dist::dirac("b"));
        assert_eq!(
            ext.combine(&half, &a, &b).unwrap(),
            ExtElem::Inner(uniform(&labels()).unwrap())
        );
    }

    #[test]
    fn imitate_table_substitutes_w() {
        let w = d(&[("a", (2, 3)), ("b", (1, 3))]);
        let ext = build_free_extension(&labels(), &FreeExtensionSpec::Imitate(w.clone())).unwrap();
        let half = rat(1, 2);
        let x = Dist::dirac("a");
        assert_eq!(
            ext.combine(&half, &ExtElem::Inner(x.clone()), &ExtElem::Star).unwrap(),
            ExtElem::Inner(Dist::combine_unchecked(&half, &x, &w))
        );
        assert_eq!(
            ext.combine(&half, &ExtElem::Star, &ExtElem::Inner(x.clone())).unwrap(),
            ExtElem::Inner(Dist::combine_unchecked(&half, &w, &x))
        );
        assert_eq!(ext.combine(&half, &ExtElem::Star, &ExtElem::Star).unwrap(), ExtElem::Star);
    }

    #[test]
    fn mixed_table_absorbs_only_its_parameter() {
        let w = Dist::dirac("a");
        let ext = build_free_extension(&labels(), &FreeExtensionSpec::Mixed(w.clone())).unwrap();
        let half = rat(1, 2);
        assert_eq!(
            ext.combine(&half, &ExtElem::Inner(w.clone()), &ExtElem::Star).unwrap(),
            ExtElem::Star
        );
        assert_eq!(
            ext.combine(&half, &ExtElem::Star, &ExtElem::Inner(w.clone())).unwrap(),
            ExtElem::Star
        );
        let x = Dist::dirac("b");
        assert_eq!(
            ext.combine(&half, &ExtElem::Inner(x.clone()), &ExtElem::Star).unwrap(),
            ExtElem::Inner(Dist::combine_unchecked(&half, &x, &w))
        );
    }

    #[test]
    fn mixed_rejects_non_extremal_parameter() {
        let err =
            build_free_extension(&labels(), &FreeExtensionSpec::Mixed(uniform(&labels()).unwrap()))
                .unwrap_err();
        assert!(matches!(err, Error::NonExtremal(_)));
    }

    #[test]
    fn forced_mixed_table_fails_associativity() {
        let spec = FreeExtensionSpec::Mixed(uniform(&labels()).unwrap());
        let ext = build_free_extension_unchecked(&labels(), &spec).unwrap();
        let samples = vec![
            ExtElem::Inner(Dist::dirac("a")),
            ExtElem::Inner(Dist::dirac("b")),
            ExtElem::Star,
        ];
        let report = check_axioms(&ext, &grid(), &samples).unwrap();
        assert!(
            matches!(report.counterexample, Some(AxiomViolation::Associativity { .. })),
            "expected an associativity counterexample, got {:?}",
            report.counterexample
        );
    }

    #[test]
    fn extension_oracles_pass_axioms() {
        let samples: Vec<ExtElem<Dist>> = free_samples()
            .into_iter()
            .map(ExtElem::Inner)
            .chain([ExtElem::Star])
            .collect();
        for spec in [
            FreeExtensionSpec::BlackHole,
            FreeExtensionSpec::Imitate(d(&[("a", (2, 3)), ("b", (1, 3))])),
            FreeExtensionSpec::Mixed(Dist::dirac("a")),
        ] {
            let ext = build_free_extension(&labels(), &spec).unwrap();
            let report = check_axioms(&ext, &grid(), &samples).unwrap();
            assert!(report.pass(), "{spec:?} violated {:?}", report.counterexample);
        }
    }

    #[test]
    fn probe_classifies_all_three_tables() {
        let samples = free_samples();
        let g = grid();

        let black = build_free_extension(&labels(), &FreeExtensionSpec::BlackHole).unwrap();
        let report = probe_extension(&black, &samples, &g).unwrap();
        assert_eq!(report.case, 1);
        assert_eq!(report.w, None);
        assert_eq!(report.adherence, AdherenceSet::Everything);

        let w = d(&[("a", (2, 3)), ("b", (1, 3))]);
        let imitate =
            build_free_extension(&labels(), &FreeExtensionSpec::Imitate(w.clone())).unwrap();
        let report = probe_extension(&imitate, &samples, &g).unwrap();
        assert_eq!(report.case, 2);
        assert_eq!(report.w, Some(w));
        assert_eq!(report.adherence, AdherenceSet::Empty);

        let mixed =
            build_free_extension(&labels(), &FreeExtensionSpec::Mixed(Dist::dirac("a"))).unwrap();
        let report = probe_extension(&mixed, &samples, &g).unwrap();
        assert_eq!(report.case, 3);
        assert_eq!(report.w, Some(Dist::dirac("a")));
        assert_eq!(report.adherence, AdherenceSet::ExactlyW);
    }

    #[test]
    fn probe_rejects_non_extension_tables() {
        // projection onto the left argument is not imitation of anything
        let fake: Oracle<ExtElem<Dist>> = Oracle::with_predicate(
            |_| true,
            |p, x, y| match (x, y) {
                (ExtElem::Inner(a), ExtElem::Inner(b)) => {
                    ExtElem::Inner(Dist::combine_unchecked(p, a, b))
                }
                (ExtElem::Inner(a), ExtElem::Star) | (ExtElem::Star, ExtElem::Inner(a)) => {
                    ExtElem::Inner(a.clone())
                }
                _ => ExtElem::Star,
            },
        );
        let err = probe_extension(&fake, &free_samples(), &grid()).unwrap_err();
        assert!(matches!(err, Error::InconsistentOracle(_)), "got {err:?}");
    }

    #[test]
    fn glue_reproduces_the_mixed_table() {
        let base = free_algebra(&labels());
        let w = Dist::dirac("a");
        let ideal_w = w.clone();
        let in_prime: Arc<dyn Fn(&Dist) -> bool + Send + Sync> =
            Arc::new(move |x: &Dist| *x != ideal_w);
        let member_w = w.clone();
        let member_labels = labels();
        let inner = imitate_inner_extension(
            Arc::new(move |x: &Dist| *x != member_w && x.supported_on(&member_labels)),
            Arc::new(|p: &Rational, a: &Dist, b: &Dist| Dist::combine_unchecked(p, a, b)),
            w.clone(),
        );
        let glued = glue(&base, in_prime, &inner, &grid(), &free_samples()).unwrap();
        let mixed = build_free_extension(&labels(), &FreeExtensionSpec::Mixed(w)).unwrap();
        let points: Vec<ExtElem<Dist>> = free_samples()
            .into_iter()
            .map(ExtElem::Inner)
            .chain([ExtElem::Star])
            .collect();
        for p in &grid() {
            for x in &points {
                for y in &points {
                    assert_eq!(
                        glued.combine(p, x, y).unwrap(),
                        mixed.combine(p, x, y).unwrap(),
                        "tables differ at p={p}, x={x}, y={y}"
                    );
                }
            }
        }
    }

    #[test]
    fn glue_rejects_bad_ingredients() {
        let base = free_algebra(&labels());
        let w = Dist::dirac("a");
        let inner_member: Arc<dyn Fn(&Dist) -> bool + Send + Sync> = {
            let w = w.clone();
            Arc::new(move |x: &Dist| *x != w)
        };
        let free_op: Arc<dyn Fn(&Rational, &Dist, &Dist) -> Dist + Send + Sync> =
            Arc::new(|p: &Rational, a: &Dist, b: &Dist| Dist::combine_unchecked(p, a, b));

        // a singleton that is not an ideal
        let not_ideal: Arc<dyn Fn(&Dist) -> bool + Send + Sync> = {
            let w = w.clone();
            Arc::new(move |x: &Dist| *x == w)
        };
        let inner = imitate_inner_extension(inner_member.clone(), free_op.clone(), w.clone());
        let err = glue(&base, not_ideal, &inner, &grid(), &free_samples()).unwrap_err();
        assert!(matches!(err, Error::NotPrime(_)), "got {err:?}");

        // an inner extension whose adjoined point absorbs
        let in_prime: Arc<dyn Fn(&Dist) -> bool + Send + Sync> = {
            let w = w.clone();
            Arc::new(move |x: &Dist| *x != w)
        };
        let absorbing: Oracle<ExtElem<Dist>> = Oracle::with_predicate(
            {
                let member = inner_member.clone();
                move |e: &ExtElem<Dist>| match e {
                    ExtElem::Star => true,
                    ExtElem::Inner(x) => member(x),
                }
            },
            |p, x, y| match (x, y) {
                (ExtElem::Inner(a), ExtElem::Inner(b)) => {
                    ExtElem::Inner(Dist::combine_unchecked(p, a, b))
                }
                _ => ExtElem::Star,
            },
        );
        let err = glue(&base, in_prime.clone(), &absorbing, &grid(), &free_samples()).unwrap_err();
        assert!(matches!(err, Error::InnerAdherence(_)), "got {err:?}");

        // imitating the wrong element breaks the compatibility law
        let wrong = imitate_inner_extension(inner_member, free_op, Dist::dirac("b"));
        let err = glue(&base, in_prime, &wrong, &grid(), &free_samples()).unwrap_err();
        assert!(matches!(err, Error::GlueCompatibility(_)), "got {err:?}");
    }

    #[test]
    fn css_combine_matches_known_mixtures() {
        let dom = segment();
        let half = rat(1, 2);
        let mid = Polytope::singleton(pt(&[(1, 2), (1, 2)])).unwrap();
        assert_eq!(css_combine(&half, &delta1(), &delta2(), &dom).unwrap(), mid);
        assert_eq!(css_combine(&half, &dom, &dom, &dom).unwrap(), dom);
        let expected = Polytope::hull(&[pt(&[(1, 1), (0, 1)]), pt(&[(1, 2), (1, 2)])]).unwrap();
        assert_eq!(css_combine(&half, &delta1(), &dom, &dom).unwrap(), expected);

        let outside = Polytope::singleton(pt(&[(2, 1), (0, 1)])).unwrap();
        let err = css_combine(&half, &outside, &dom, &dom).unwrap_err();
        assert!(matches!(err, Error::OutsideDomain(_)));
    }

    #[test]
    fn css_adherence_is_equality() {
        let sub = Polytope::hull(&[pt(&[(1, 4), (3, 4)]), pt(&[(3, 4), (1, 4)])]).unwrap();
        assert!(css_adheres(&segment(), &segment()));
        assert!(!css_adheres(&sub, &segment()));
        assert!(!css_adheres(&delta1(), &delta2()));
    }

    #[test]
    fn extremal_bodies_in_the_edge_algebra() {
        // the golden family over two labels: both corners and the full edge
        let family = css_samples();
        let extremal: Vec<&Polytope> = family
            .iter()
            .filter(|c| is_extremal_in_kd_simplex(c, 2).unwrap())
            .collect();
        assert_eq!(extremal, vec![&delta1(), &delta2(), &segment()]);
    }

    #[test]
    fn extremal_bodies_in_the_triangle_algebra() {
        let triangle = Polytope::hull(&[
            pt(&[(1, 2), (1, 2), (0, 1)]),
            pt(&[(0, 1), (1, 2), (1, 2)]),
            pt(&[(1, 2), (0, 1), (1, 2)]),
        ])
        .unwrap();
        assert!(is_extremal_in_kd_simplex(&triangle, 3).unwrap());

        // quadrilaterals always split into two summands
        let quad = Polytope::hull(&[
            pt(&[(1, 2), (1, 2), (0, 1)]),
            pt(&[(1, 2), (0, 1), (1, 2)]),
            pt(&[(0, 1), (1, 2), (1, 2)]),
            pt(&[(0, 1), (1, 4), (3, 4)]),
        ])
        .unwrap();
        assert_eq!(quad.vertex_count(), 4);
        assert!(!is_extremal_in_kd_simplex(&quad, 3).unwrap());

        let corner = Polytope::singleton(pt(&[(1, 1), (0, 1), (0, 1)])).unwrap();
        assert!(is_extremal_in_kd_simplex(&corner, 3).unwrap());
        let inner_point = Polytope::singleton(pt(&[(1, 3), (1, 3), (1, 3)])).unwrap();
        assert!(!is_extremal_in_kd_simplex(&inner_point, 3).unwrap());

        let err = is_extremal_in_kd_simplex(&corner, 4).unwrap_err();
        assert!(matches!(err, Error::UnsupportedDimension(4)));
    }

    #[test]
    fn case4_eligibility() {
        let dom = segment();
        let report = eligible_case4(&dom, &dom).unwrap();
        assert!(report.eligible);
        assert!(report.canonical_prime.is_some());

        let sub = Polytope::hull(&[pt(&[(1, 4), (3, 4)]), pt(&[(3, 4), (1, 4)])]).unwrap();
        let report = eligible_case4(&sub, &dom).unwrap();
        assert!(!report.eligible);
        assert_eq!(report.canonical_prime, None);

        let err = eligible_case4(&delta1(), &dom).unwrap_err();
        assert!(matches!(err, Error::SingletonParameter));

        let square = Polytope::hull(&[
            pt(&[(0, 1), (0, 1)]),
            pt(&[(1, 1), (0, 1)]),
            pt(&[(0, 1), (1, 1)]),
            pt(&[(1, 1), (1, 1)]),
        ])
        .unwrap();
        let err = eligible_case4(&sub, &square).unwrap_err();
        assert!(matches!(err, Error::InvalidPolytope(_)));
    }

    #[test]
    fn css_extension_tables() {
        let dom = segment();
        let half = rat(1, 2);
        let mid = Polytope::singleton(pt(&[(1, 2), (1, 2)])).unwrap();

        let black = build_css_extension(&dom, &CssExtensionSpec::BlackHole).unwrap();
        assert_eq!(
            black.combine(&half, &ExtElem::Inner(delta1()), &ExtElem::Star).unwrap(),
            ExtElem::Star
        );

        let imitate = build_css_extension(&dom, &CssExtensionSpec::Imitate(dom.clone())).unwrap();
        let expected = Polytope::hull(&[pt(&[(1, 1), (0, 1)]), pt(&[(1, 2), (1, 2)])]).unwrap();
        assert_eq!(
            imitate.combine(&half, &ExtElem::Inner(delta1()), &ExtElem::Star).unwrap(),
            ExtElem::Inner(expected)
        );

        let mixed = build_css_extension(&dom, &CssExtensionSpec::Mixed(delta1())).unwrap();
        assert_eq!(
            mixed.combine(&half, &ExtElem::Inner(delta1()), &ExtElem::Star).unwrap(),
            ExtElem::Star
        );
        assert_eq!(
            mixed.combine(&half, &ExtElem::Inner(delta2()), &ExtElem::Star).unwrap(),
            ExtElem::Inner(mid.clone())
        );

        // mixed around a non-corner singleton is rejected
        let err = build_css_extension(&dom, &CssExtensionSpec::Mixed(mid)).unwrap_err();
        assert!(matches!(err, Error::NonExtremal(_)));

        // outer imitation collapses to inner imitation over a closed domain
        let outer =
            build_css_extension(&dom, &CssExtensionSpec::ImitateOuter(dom.clone())).unwrap();
        for p in &grid() {
            for x in [ExtElem::Inner(delta1()), ExtElem::Inner(delta2()), ExtElem::Star] {
                assert_eq!(
                    outer.combine(p, &x, &ExtElem::Star).unwrap(),
                    imitate.combine(p, &x, &ExtElem::Star).unwrap()
                );
            }
        }

        // the absorb-one-body table equals the mixed table around the body
        let case4 = build_css_extension(&dom, &CssExtensionSpec::Case4(dom.clone())).unwrap();
        let mixed_dom = build_css_extension_unchecked(&dom, &CssExtensionSpec::Mixed(dom.clone()))
            .unwrap();
        let points: Vec<ExtElem<Polytope>> = css_samples()
            .into_iter()
            .map(ExtElem::Inner)
            .chain([ExtElem::Star])
            .collect();
        for p in &grid() {
            for x in &points {
                for y in &points {
                    assert_eq!(
                        case4.combine(p, x, y).unwrap(),
                        mixed_dom.combine(p, x, y).unwrap()
                    );
                }
            }
        }

        let sub = Polytope::hull(&[pt(&[(1, 4), (3, 4)]), pt(&[(3, 4), (1, 4)])]).unwrap();
        let err = build_css_extension(&dom, &CssExtensionSpec::Case4(sub)).unwrap_err();
        assert!(matches!(err, Error::NonExtremal(_)));
    }

    #[test]
    fn case4_with_custom_prime_matches_canonical() {
        let dom = segment();
        let body = dom.clone();
        let in_prime: Arc<dyn Fn(&Polytope) -> bool + Send + Sync> = {
            let body = body.clone();
            Arc::new(move |a: &Polytope| *a != body)
        };
        let custom =
            build_case4_with_prime(&dom, &body, in_prime, &css_samples(), &grid()).unwrap();
        let canonical = build_css_extension(&dom, &CssExtensionSpec::Case4(body)).unwrap();
        let points: Vec<ExtElem<Polytope>> = css_samples()
            .into_iter()
            .map(ExtElem::Inner)
            .chain([ExtElem::Star])
            .collect();
        for p in &grid() {
            for x in &points {
                for y in &points {
                    assert_eq!(custom.combine(p, x, y).unwrap(), canonical.combine(p, x, y).unwrap());
                }
            }
        }
    }

    #[test]
    fn naturality_of_the_three_tables_under_swap() {
        let swap = ConvexMap::new(BTreeMap::from([
            ("a".to_string(), Dist::dirac("b")),
            ("b".to_string(), Dist::dirac("a")),
        ]))
        .unwrap();
        let samples = free_samples();
        let g = grid();

        assert!(check_naturality(
            &labels(),
            &labels(),
            &FreeExtensionSpec::BlackHole,
            &FreeExtensionSpec::BlackHole,
            &swap,
            &samples,
            &g
        )
        .unwrap());

        let spec1 = FreeExtensionSpec::Imitate(Dist::dirac("a"));
        assert!(!check_naturality(&labels(), &labels(), &spec1, &spec1, &swap, &samples, &g)
            .unwrap());

        let spec_u = FreeExtensionSpec::Imitate(uniform(&labels()).unwrap());
        assert!(check_naturality(&labels(), &labels(), &spec_u, &spec_u, &swap, &samples, &g)
            .unwrap());
    }

    #[test]
    fn ext_elem_serde_round_trip() {
        let star: ExtElem<Dist> = ExtElem::Star;
        let json = serde_json::to_string(&star).unwrap();
        assert_eq!(json, r#"{"star":true}"#);
        assert_eq!(serde_json::from_str::<ExtElem<Dist>>(&json).unwrap(), star);

        let inner = ExtElem::Inner(d(&[("a", (2, 5)), ("b", (3, 5))]));
        let json = serde_json::to_string(&inner).unwrap();
        assert_eq!(json, r#"{"a":"2/5","b":"3/5"}"#);
        assert_eq!(serde_json::from_str::<ExtElem<Dist>>(&json).unwrap(), inner);

        // a weight keyed "star" is data, not the adjoined point
        let tricky: ExtElem<Dist> = serde_json::from_str(r#"{"star":"1/1"}"#).unwrap();
        assert_eq!(tricky, ExtElem::Inner(Dist::dirac("star")));
    }

    #[test]
    fn spec_serde_round_trips() {
        let spec = FreeExtensionSpec::Imitate(d(&[("a", (2, 3)), ("b", (1, 3))]));
        let json = serde_json::to_string(&spec).unwrap();
        assert_eq!(json, r#"{"kind":"imitate","w":{"a":"2/3","b":"1/3"}}"#);
        assert_eq!(serde_json::from_str::<FreeExtensionSpec>(&json).unwrap(), spec);

        let spec = FreeExtensionSpec::BlackHole;
        let json = serde_json::to_string(&spec).unwrap();
        assert_eq!(serde_json::from_str::<FreeExtensionSpec>(&json).unwrap(), spec);

        let err = serde_json::from_str::<FreeExtensionSpec>(r#"{"kind":"imitate"}"#).unwrap_err();
        assert!(err.to_string().contains("requires field"));

        let spec = CssExtensionSpec::Case4(segment());
        let json = serde_json::to_string(&spec).unwrap();
        assert_eq!(serde_json::from_str::<CssExtensionSpec>(&json).unwrap(), spec);

        let spec = CssExtensionSpec::Mixed(delta1());
        let json = serde_json::to_string(&spec).unwrap();
        assert_eq!(serde_json::from_str::<CssExtensionSpec>(&json).unwrap(), spec);
    }
}
