//! Probabilistic automata as transformers of belief states.
//!
//! A parsed automaton assigns each (state, action) pair a finite set of
//! successor distributions. Lifting turns it into a transformer on belief
//! states: the successor set of a mixture of states is the matching mixture
//! of per-state successor polytopes, with pairs that have no successors
//! resolved through a chosen one-point extension of the polytope algebra.

use std::collections::BTreeMap;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::algebra::{derive_nary, CoeffVector};
use crate::dist::Dist;
use crate::error::{Error, Result};
use crate::extension::{build_css_extension, CssExtensionSpec, ExtElem};
use crate::geometry::{standard_simplex, Point, Polytope};

/// A validated probabilistic automaton.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PaSpec {
    states: Vec<String>,
    actions: Vec<String>,
    transitions: BTreeMap<(String, String), Vec<Dist>>,
}

impl PaSpec {
    /// Build and validate an automaton from its transition list. Duplicate
    /// successor distributions of the same (state, action) pair collapse.
    pub fn new(
        states: Vec<String>,
        actions: Vec<String>,
        transitions: Vec<(String, String, Dist)>,
    ) -> Result<PaSpec> {
        if states.is_empty() {
            return Err(Error::EmptyInput("automaton state set"));
        }
        if actions.is_empty() {
            return Err(Error::EmptyInput("automaton action set"));
        }
        for (i, s) in states.iter().enumerate() {
            if states[..i].contains(s) {
                return Err(Error::DuplicateElement(s.clone()));
            }
        }
        for (i, a) in actions.iter().enumerate() {
            if actions[..i].contains(a) {
                return Err(Error::DuplicateElement(a.clone()));
            }
        }
        let mut table: BTreeMap<(String, String), Vec<Dist>> = BTreeMap::new();
        for (from, action, to) in transitions {
            if !states.contains(&from) {
                return Err(Error::UnknownState(from));
            }
            if !actions.contains(&action) {
                return Err(Error::UnknownAction(action));
            }
            if let Some(stray) = to.support().find(|l| !states.contains(&l.to_string())) {
                return Err(Error::UnknownState(stray.to_string()));
            }
            let bucket = table.entry((from, action)).or_default();
            if !bucket.contains(&to) {
                bucket.push(to);
            }
        }
        Ok(PaSpec { states, actions, transitions: table })
    }

    /// The state labels, in declaration order.
    pub fn states(&self) -> &[String] {
        &self.states
    }

    /// The action labels, in declaration order.
    pub fn actions(&self) -> &[String] {
        &self.actions
    }

    /// The successor distributions of one (state, action) pair; empty when
    /// the pair is disabled.
    pub fn successors(&self, state: &str, action: &str) -> &[Dist] {
        self.transitions
            .get(&(state.to_string(), action.to_string()))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// All (state, action) pairs without successors — the termination points.
    pub fn disabled_pairs(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        for s in &self.states {
            for a in &self.actions {
                if self.successors(s, a).is_empty() {
                    out.push((s.clone(), a.clone()));
                }
            }
        }
        out
    }

    /// Whether every (state, action) pair has at least one successor.
    pub fn is_input_enabled(&self) -> bool {
        self.disabled_pairs().is_empty()
    }
}

#[derive(Serialize, Deserialize)]
struct TransitionRepr {
    from: String,
    action: String,
    to: Dist,
}

#[derive(Serialize, Deserialize)]
struct PaRepr {
    states: Vec<String>,
    actions: Vec<String>,
    transitions: Vec<TransitionRepr>,
}

impl Serialize for PaSpec {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let transitions = self
            .transitions
            .iter()
            .flat_map(|((from, action), dists)| {
                dists.iter().map(move |d| TransitionRepr {
                    from: from.clone(),
                    action: action.clone(),
                    to: d.clone(),
                })
            })
            .collect();
        PaRepr {
            states: self.states.clone(),
            actions: self.actions.clone(),
            transitions,
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for PaSpec {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let repr = PaRepr::deserialize(de)?;
        PaSpec::new(
            repr.states,
            repr.actions,
            repr.transitions.into_iter().map(|t| (t.from, t.action, t.to)).collect(),
        )
        .map_err(serde::de::Error::custom)
    }
}

/// Parse and validate an automaton from a JSON document.
pub fn parse_pa(document: &str) -> Result<PaSpec> {
    Ok(serde_json::from_str(document)?)
}

/// One step of the lifted transformer: a polytope of successor
/// distributions, or the adjoined termination point.
pub type StepResult = ExtElem<Polytope>;

/// Extensions admissible in the simulator. The absorb-one-body table acts on
/// bodies rather than belief states, so it stays outside.
fn check_simulator_extension(ext: &CssExtensionSpec) -> Result<()> {
    match ext {
        CssExtensionSpec::Case4(_) => Err(Error::UnsupportedExtension(
            "the absorb-one-body table acts on bodies, not belief states".into(),
        )),
        _ => Ok(()),
    }
}

/// The successor set of one state under one action, as a polytope in the
/// belief simplex, or the adjoined point when the pair is disabled.
fn state_step(pa: &PaSpec, state: &str, action: &str) -> Result<ExtElem<Polytope>> {
    let succ = pa.successors(state, action);
    if succ.is_empty() {
        return Ok(ExtElem::Star);
    }
    let points: Vec<Point> =
        succ.iter().map(|d| d.to_point(pa.states())).collect::<Result<_>>()?;
    Ok(ExtElem::Inner(Polytope::hull(&points)?))
}

/// Apply the lifted transformer of `pa` under `action` to the belief state
/// `xi`, resolving disabled states through the extension `ext`.
///
/// The result is the mixture, weighted by `xi`, of the per-state successor
/// polytopes, evaluated inside the one-point extension of the polytope
/// algebra over the belief simplex.
pub fn lift(pa: &PaSpec, action: &str, xi: &Dist, ext: &CssExtensionSpec) -> Result<StepResult> {
    check_simulator_extension(ext)?;
    if !pa.actions.iter().any(|a| a == action) {
        return Err(Error::UnknownAction(action.to_string()));
    }
    if let Some(stray) = xi.support().find(|l| !pa.states.contains(&l.to_string())) {
        return Err(Error::UnknownState(stray.to_string()));
    }
    let domain = standard_simplex(pa.states.len())?;
    let oracle = build_css_extension(&domain, ext)?;
    let mut coeffs = Vec::new();
    let mut elems = Vec::new();
    for (state, weight) in xi.iter() {
        coeffs.push(weight.clone());
        elems.push(state_step(pa, state, action)?);
    }
    derive_nary(&oracle, &CoeffVector::new(coeffs)?, &elems)
}

/// Run an action word from an initial belief state, stepping set-valued
/// states vertex-wise.
///
/// Each step lifts every vertex of the current polytope and takes the hull
/// of the resulting successor sets; if any vertex terminates, the whole step
/// terminates. Once at the adjoined point, black-hole and mixed extensions
/// stay there, while an imitating extension steps its imitated body. The
/// trajectory has one entry per action.
pub fn run_word(
    pa: &PaSpec,
    ext: &CssExtensionSpec,
    init: &Dist,
    word: &[String],
) -> Result<Vec<StepResult>> {
    check_simulator_extension(ext)?;
    if let Some(stray) = init.support().find(|l| !pa.states.contains(&l.to_string())) {
        return Err(Error::UnknownState(stray.to_string()));
    }
    let start = Polytope::singleton(init.to_point(pa.states())?)?;
    let mut current = ExtElem::Inner(start);
    let mut trajectory = Vec::with_capacity(word.len());
    for action in word {
        current = match &current {
            ExtElem::Inner(body) => step_body(pa, action, body, ext)?,
            ExtElem::Star => match ext {
                CssExtensionSpec::Imitate(c) | CssExtensionSpec::ImitateOuter(c) => {
                    step_body(pa, action, &c.clone(), ext)?
                }
                _ => ExtElem::Star,
            },
        };
        trajectory.push(current.clone());
    }
    Ok(trajectory)
}

/// Step a polytope of belief states: lift each vertex and hull the results;
/// any terminating vertex terminates the whole set.
fn step_body(
    pa: &PaSpec,
    action: &str,
    body: &Polytope,
    ext: &CssExtensionSpec,
) -> Result<StepResult> {
    let mut points: Vec<Point> = Vec::new();
    for vertex in body.vertices() {
        let xi = Dist::from_point(pa.states(), vertex)?;
        match lift(pa, action, &xi, ext)? {
            ExtElem::Star => return Ok(ExtElem::Star),
            ExtElem::Inner(p) => points.extend_from_slice(p.vertices()),
        }
    }
    Ok(ExtElem::Inner(Polytope::hull(&points)?))
}
