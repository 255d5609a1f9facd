//! Finitely supported probability distributions over string labels, with
//! exact rational weights: the elements of the free convex algebra over a
//! label set, combined by pointwise weighted averaging.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::algebra::Oracle;
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::rational::{check_coefficient, complement, format_rational, parse_rational, Rational};

/// A probability distribution with finite support. Weights are strictly
/// positive and sum exactly to one; zero entries are never stored, so equal
/// distributions are structurally equal.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Dist {
    weights: BTreeMap<String, Rational>,
}

impl Dist {
    /// Build from label/weight pairs. Zero weights are dropped; negative
    /// weights, an empty support, duplicate labels, or a total other than
    /// one are rejected.
    pub fn new(entries: impl IntoIterator<Item = (String, Rational)>) -> Result<Self> {
        let mut weights = BTreeMap::new();
        let mut total = Rational::zero();
        for (label, w) in entries {
            if w < Rational::zero() {
                return Err(Error::InvalidDistribution(format!(
                    "negative weight {} on {label:?}",
                    format_rational(&w)
                )));
            }
            if w.is_zero() {
                continue;
            }
            total += &w;
            if weights.insert(label.clone(), w).is_some() {
                return Err(Error::InvalidDistribution(format!("label {label:?} listed twice")));
            }
        }
        if weights.is_empty() {
            return Err(Error::InvalidDistribution("empty support".into()));
        }
        if !total.is_one() {
            return Err(Error::InvalidDistribution(format!(
                "weights sum to {}, not 1",
                format_rational(&total)
            )));
        }
        Ok(Dist { weights })
    }

    /// The point mass on one label.
    pub fn dirac(label: &str) -> Dist {
        let mut weights = BTreeMap::new();
        weights.insert(label.to_string(), Rational::one());
        Dist { weights }
    }

    /// Pointwise combination `p·a + (1-p)·b`.
    pub fn combine(p: &Rational, a: &Dist, b: &Dist) -> Result<Dist> {
        check_coefficient(p)?;
        Ok(Self::combine_unchecked(p, a, b))
    }

    pub(crate) fn combine_unchecked(p: &Rational, a: &Dist, b: &Dist) -> Dist {
        let q = complement(p);
        let mut weights: BTreeMap<String, Rational> = BTreeMap::new();
        for (l, w) in &a.weights {
            weights.insert(l.clone(), w * p);
        }
        for (l, w) in &b.weights {
            let scaled = w * &q;
            weights
                .entry(l.clone())
                .and_modify(|acc| *acc += &scaled)
                .or_insert(scaled);
        }
        Dist { weights }
    }

    /// The weight of a label (zero when outside the support).
    pub fn weight(&self, label: &str) -> Rational {
        self.weights.get(label).cloned().unwrap_or_else(Rational::zero)
    }

    /// Labels carrying positive weight, in sorted order.
    pub fn support(&self) -> impl Iterator<Item = &str> {
        self.weights.keys().map(String::as_str)
    }

    pub fn support_size(&self) -> usize {
        self.weights.len()
    }

    /// Whether the support is contained in the given label set.
    pub fn supported_on(&self, labels: &[String]) -> bool {
        self.weights.keys().all(|l| labels.contains(l))
    }

    /// The label of a point mass, if this is one.
    pub fn as_dirac(&self) -> Option<&str> {
        if self.weights.len() == 1 {
            self.weights.keys().next().map(String::as_str)
        } else {
            None
        }
    }

    /// Coordinates of the distribution in the probability simplex spanned
    /// by the given labels (one coordinate per label, in the given order).
    pub fn to_point(&self, labels: &[String]) -> Result<Point> {
        if !self.supported_on(labels) {
            let stray = self
                .weights
                .keys()
                .find(|l| !labels.contains(l))
                .expect("support escapes the label set");
            return Err(Error::InvalidDistribution(format!(
                "label {stray:?} is not among the coordinates"
            )));
        }
        Ok(labels.iter().map(|l| self.weight(l)).collect())
    }

    /// Rebuild a distribution from simplex coordinates over the labels.
    pub fn from_point(labels: &[String], point: &Point) -> Result<Dist> {
        if labels.len() != point.len() {
            return Err(Error::LengthMismatch { left: labels.len(), right: point.len() });
        }
        Dist::new(labels.iter().cloned().zip(point.iter().cloned()))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Rational)> {
        self.weights.iter().map(|(l, w)| (l.as_str(), w))
    }
}

impl fmt::Display for Dist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .weights
            .iter()
            .map(|(l, w)| format!("{l}: {}", format_rational(w)))
            .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

impl Serialize for Dist {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let repr: BTreeMap<&str, String> = self
            .weights
            .iter()
            .map(|(l, w)| (l.as_str(), format_rational(w)))
            .collect();
        repr.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for Dist {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as DeError;
        let repr: BTreeMap<String, String> = BTreeMap::deserialize(de)?;
        let mut entries = Vec::with_capacity(repr.len());
        for (l, s) in repr {
            entries.push((l, parse_rational(&s).map_err(D::Error::custom)?));
        }
        Dist::new(entries).map_err(D::Error::custom)
    }
}

/// The free convex algebra over a label set: all distributions supported on
/// the labels, combined pointwise.
pub fn free_algebra(labels: &[String]) -> Oracle<Dist> {
    let labels = labels.to_vec();
    Oracle::with_predicate(
        move |d: &Dist| d.supported_on(&labels),
        |p, a, b| Dist::combine_unchecked(p, a, b),
    )
}

/// The uniform distribution over a label set.
pub fn uniform(labels: &[String]) -> Result<Dist> {
    if labels.is_empty() {
        return Err(Error::EmptyInput("uniform distribution needs labels"));
    }
    let w = Rational::new(1.into(), (labels.len() as i64).into());
    Dist::new(labels.iter().map(|l| (l.clone(), w.clone())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{adheres_half, check_axioms};
    use crate::rational::rat;

    fn labels() -> Vec<String> {
        vec!["a".into(), "b".into(), "c".into()]
    }

    #[test]
    fn construction_validates_and_normalizes() {
        let d = Dist::new(vec![
            ("a".into(), rat(1, 2)),
            ("b".into(), rat(1, 2)),
            ("c".into(), rat(0, 1)),
        ])
        .unwrap();
        assert_eq!(d.support_size(), 2);
        assert_eq!(d.weight("c"), rat(0, 1));
        assert!(Dist::new(vec![("a".into(), rat(1, 2))]).is_err());
        assert!(Dist::new(vec![("a".into(), rat(3, 2)), ("b".into(), rat(-1, 2))]).is_err());
        assert!(Dist::new(Vec::<(String, Rational)>::new()).is_err());
        assert!(Dist::new(vec![("a".into(), rat(1, 2)), ("a".into(), rat(1, 2))]).is_err());
    }

    #[test]
    fn combination_is_pointwise() {
        let d = Dist::combine(&rat(1, 3), &Dist::dirac("a"), &Dist::dirac("b")).unwrap();
        assert_eq!(d.weight("a"), rat(1, 3));
        assert_eq!(d.weight("b"), rat(2, 3));
        let e = Dist::combine(&rat(1, 2), &d, &Dist::dirac("a")).unwrap();
        assert_eq!(e.weight("a"), rat(2, 3));
        assert_eq!(e.weight("b"), rat(1, 3));
    }

    #[test]
    fn dirac_detection() {
        assert_eq!(Dist::dirac("x").as_dirac(), Some("x"));
        let mix = Dist::combine(&rat(1, 2), &Dist::dirac("a"), &Dist::dirac("b")).unwrap();
        assert_eq!(mix.as_dirac(), None);
    }

    #[test]
    fn point_embedding_round_trips() {
        let ls = labels();
        let d = Dist::new(vec![("a".into(), rat(1, 4)), ("c".into(), rat(3, 4))]).unwrap();
        let p = d.to_point(&ls).unwrap();
        assert_eq!(p, vec![rat(1, 4), rat(0, 1), rat(3, 4)]);
        assert_eq!(Dist::from_point(&ls, &p).unwrap(), d);
        assert!(Dist::dirac("z").to_point(&ls).is_err());
    }

    #[test]
    fn free_algebra_passes_axioms_and_has_trivial_adherence() {
        let ls = labels();
        let alg = free_algebra(&ls);
        let u = uniform(&ls).unwrap();
        let samples = vec![
            Dist::dirac("a"),
            Dist::dirac("b"),
            u.clone(),
            Dist::combine(&rat(1, 4), &Dist::dirac("a"), &Dist::dirac("c")).unwrap(),
        ];
        let grid = vec![rat(1, 5), rat(1, 2), rat(3, 4)];
        let report = check_axioms(&alg, &grid, &samples).unwrap();
        assert!(report.pass(), "{:?}", report.counterexample);
        // Weighted averaging is cancellative, so adherence is equality.
        for x in &samples {
            for y in &samples {
                assert_eq!(adheres_half(&alg, x, y).unwrap(), x == y);
            }
        }
    }

    #[test]
    fn serde_round_trip() {
        let d = Dist::new(vec![("a".into(), rat(2, 5)), ("b".into(), rat(3, 5))]).unwrap();
        let json = serde_json::to_string(&d).unwrap();
        assert_eq!(json, r#"{"a":"2/5","b":"3/5"}"#);
        let back: Dist = serde_json::from_str(&json).unwrap();
        assert_eq!(d, back);
        assert!(serde_json::from_str::<Dist>(r#"{"a":"1/2"}"#).is_err());
    }
}
