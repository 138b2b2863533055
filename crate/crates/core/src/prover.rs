//! Decision procedure: reduce a cirquent to a classical one by rule
//! applications read conclusion-to-premise, then either emit the reversed
//! derivation as a proof or read a countermodel off the classical residue.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

use crate::calculus::{
    apply_rule_backward, Annotation, CalculusError, ProofEntry, ProofScript, RuleApp, RuleKind,
};
use crate::cirquent::{Cirquent, ClusterId, CoreError, Dir, Path};
use crate::semantics::{
    classical_falsifier_with, true_under_with, Interpretation, Limits, SemanticsError,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProverError {
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("internal invariant broken: {0}")]
    Internal(String),
    #[error("countermodel {0:?} does not falsify the input")]
    CountermodelRejected(Interpretation),
    #[error(transparent)]
    Calculus(#[from] CalculusError),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

impl From<CoreError> for ProverError {
    fn from(e: CoreError) -> Self {
        ProverError::Calculus(e.into())
    }
}

/// Termination measure of one cluster-resolution loop. Only `(x, y, z, t)`
/// take part in the ordering; `m` is recorded for reference.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StateTuple {
    pub x: usize,
    pub y: usize,
    pub z: usize,
    pub t: usize,
    pub m: u8,
}

impl StateTuple {
    pub fn measure(&self) -> (usize, usize, usize, usize) {
        (self.x, self.y, self.z, self.t)
    }

    pub fn cmp_measure(&self, other: &StateTuple) -> Ordering {
        self.measure().cmp(&other.measure())
    }
}

impl fmt::Display for StateTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} {} {}", self.x, self.y, self.z, self.t, self.m)
    }
}

/// Computes the measure for cluster `k`. With `m = 2`, `a` and `b` are the
/// pair being brought together; with `m = 1`, `a` is the merged disjunction
/// and `b` is ignored.
pub fn state_tuple(
    c: &Cirquent,
    k: ClusterId,
    m: u8,
    a: &Path,
    b: Option<&Path>,
) -> Result<StateTuple, ProverError> {
    let table = c.clusters();
    let in_k = |p: &Path| table.members(k).is_some_and(|ms| ms.contains(p));
    if !in_k(a) {
        return Err(ProverError::PreconditionViolated(format!(
            "{a} is not in cluster {k}"
        )));
    }
    let x = table.size(k);
    let z = match (m, b) {
        (2, Some(b)) => {
            if !in_k(b) || b == a {
                return Err(ProverError::PreconditionViolated(format!(
                    "{b} is not a second member of cluster {k}"
                )));
            }
            a.len() + b.len()
        }
        (1, _) => a.len().saturating_sub(1),
        _ => {
            return Err(ProverError::PreconditionViolated(format!(
                "m = {m} needs {}",
                if m == 2 { "two members" } else { "m in {1, 2}" }
            )))
        }
    };
    let t = table
        .iter()
        .filter(|(id, members)| *id != k && members.len() > 1)
        .map(|(_, members)| members.len())
        .sum();
    Ok(StateTuple {
        x,
        y: x - m as usize,
        z,
        t,
        m,
    })
}

/// One backward step: the application and the premise it produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub app: RuleApp,
    pub premise: Cirquent,
}

/// The state trace of one `resolve_cluster` run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterRun {
    pub cluster: ClusterId,
    pub trace: Vec<StateTuple>,
}

/// A reduction recorded from the goal upward.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation {
    pub goal: Cirquent,
    pub steps: Vec<Step>,
    pub runs: Vec<ClusterRun>,
}

impl Derivation {
    pub fn new(goal: Cirquent) -> Derivation {
        Derivation {
            goal,
            steps: Vec::new(),
            runs: Vec::new(),
        }
    }

    pub fn result(&self) -> &Cirquent {
        self.steps.last().map_or(&self.goal, |s| &s.premise)
    }

    /// Every cirquent from the goal to the result.
    pub fn cirquents(&self) -> impl Iterator<Item = &Cirquent> {
        std::iter::once(&self.goal).chain(self.steps.iter().map(|s| &s.premise))
    }

    /// Re-applies every step and compares with the recorded premises.
    pub fn replays(&self) -> bool {
        let mut current = self.goal.clone();
        for step in &self.steps {
            match apply_rule_backward(&current, &step.app) {
                Ok(next) if next == step.premise => current = next,
                _ => return false,
            }
        }
        true
    }

    /// The proof obtained by reading the derivation top-down.
    pub fn to_proof(&self) -> ProofScript {
        let mut entries = vec![ProofEntry {
            cirquent: self.result().clone(),
            annotation: Annotation::Axiom,
        }];
        let conclusions = std::iter::once(&self.goal).chain(self.steps.iter().map(|s| &s.premise));
        let pairs: Vec<_> = self.steps.iter().zip(conclusions).collect();
        for (step, conclusion) in pairs.into_iter().rev() {
            entries.push(ProofEntry {
                cirquent: conclusion.clone(),
                annotation: Annotation::Rule(step.app.hint()),
            });
        }
        ProofScript::new(entries).expect("at least the axiom line")
    }

    fn push(&mut self, app: RuleApp, limits: &Limits) -> Result<&Cirquent, ProverError> {
        let premise = apply_rule_backward(self.result(), &app)?;
        limits.check_nodes(premise.size())?;
        self.steps.push(Step { app, premise });
        Ok(self.result())
    }
}

/// Removes every cluster disjunction nested inside another of the same
/// cluster, one backward Rule I at a time.
pub fn eliminate_nested(c: &Cirquent) -> Derivation {
    let mut d = Derivation::new(c.clone());
    eliminate_into(
        &mut d,
        &Limits {
            max_nodes: usize::MAX,
            ..Limits::default()
        },
    )
    .expect("Rule I only shrinks the cirquent");
    d
}

fn eliminate_into(d: &mut Derivation, limits: &Limits) -> Result<(), ProverError> {
    while let Some((outer, inner)) = d.result().nested_same_cluster_pairs().into_iter().next() {
        let rest = inner
            .strip_prefix(&outer)
            .ok_or_else(|| ProverError::Internal("nested pair is not nested".into()))?;
        let side = rest.dirs()[0];
        let k = d
            .result()
            .subcirquent_at(&outer)?
            .cluster_id()
            .expect("outer is a disjunction");
        let rule = if side == Dir::L {
            RuleKind::ILeft
        } else {
            RuleKind::IRight
        };
        let relative = Path::from(rest.dirs()[1..].to_vec());
        let app = RuleApp::new(rule, outer, k).with_inner(relative);
        d.push(app, limits)?;
    }
    Ok(())
}

/// Chooses the pair of cluster members whose nearest common ancestor is
/// deepest, breaking ties on `(ancestor, a, b)`. `a` is on the left.
fn pick_pair(c: &Cirquent, k: ClusterId) -> Option<(Path, Path, Path)> {
    let table = c.clusters();
    let members: Vec<&Path> = table.members(k)?.iter().collect();
    let mut best: Option<(Path, Path, Path)> = None;
    for (n, p) in members.iter().enumerate() {
        for q in &members[n + 1..] {
            let nca = p.common_prefix(q);
            let (a, b) = if p.dirs()[nca.len()] == Dir::L {
                (*p, *q)
            } else {
                (*q, *p)
            };
            let candidate = (nca, a.clone(), b.clone());
            let better = match &best {
                None => true,
                Some(current) => {
                    candidate.0.len() > current.0.len()
                        || (candidate.0.len() == current.0.len() && candidate < *current)
                }
            };
            if better {
                best = Some(candidate);
            }
        }
    }
    best
}

/// Turns cluster `k` into a singleton. Requires that no disjunction is
/// nested in another of its own cluster and that `k` has two or more
/// members.
pub fn resolve_cluster(c: &Cirquent, k: ClusterId) -> Result<Derivation, ProverError> {
    resolve_cluster_with(c, k, &Limits::default())
}

pub fn resolve_cluster_with(
    c: &Cirquent,
    k: ClusterId,
    limits: &Limits,
) -> Result<Derivation, ProverError> {
    if !c.nested_same_cluster_pairs().is_empty() {
        return Err(ProverError::PreconditionViolated(
            "a disjunction is nested inside another of its cluster".into(),
        ));
    }
    if c.clusters().size(k) < 2 {
        return Err(ProverError::PreconditionViolated(format!(
            "cluster {k} is not a non-singleton"
        )));
    }
    let mut d = Derivation::new(c.clone());
    resolve_into(&mut d, k, limits)?;
    Ok(d)
}

fn resolve_into(d: &mut Derivation, k: ClusterId, limits: &Limits) -> Result<(), ProverError> {
    let mut trace: Vec<StateTuple> = Vec::new();
    let record = |trace: &mut Vec<StateTuple>, state: StateTuple| -> Result<(), ProverError> {
        if let Some(prev) = trace.last() {
            if state.cmp_measure(prev) != Ordering::Less {
                return Err(ProverError::Internal(format!(
                    "state {state} does not decrease from {prev}"
                )));
            }
        }
        trace.push(state);
        Ok(())
    };

    while d.result().clusters().size(k) > 1 {
        let (nca, mut a, mut b) = pick_pair(d.result(), k)
            .ok_or_else(|| ProverError::Internal("no pair to merge".into()))?;
        record(&mut trace, state_tuple(d.result(), k, 2, &a, Some(&b))?)?;

        for lifting_b in [false, true] {
            loop {
                let key = if lifting_b { &b } else { &a };
                if key.len() <= nca.len() + 1 {
                    break;
                }
                let parent = key.parent().expect("below the ancestor");
                let side = key.last().expect("below the ancestor");
                let sibling = d.result().subcirquent_at(&parent.child(side.flip()))?;
                if sibling.clusters().contains(k) {
                    return Err(ProverError::Internal(format!(
                        "sibling of {key} contains a disjunction of cluster {k}"
                    )));
                }
                let rule = if side == Dir::L {
                    RuleKind::IILeft
                } else {
                    RuleKind::IIRight
                };
                d.push(RuleApp::new(rule, parent.clone(), k), limits)?;
                if lifting_b {
                    b = parent;
                } else {
                    a = parent;
                }
                record(&mut trace, state_tuple(d.result(), k, 2, &a, Some(&b))?)?;
            }
        }

        d.push(RuleApp::new(RuleKind::III, nca.clone(), k), limits)?;
        record(&mut trace, state_tuple(d.result(), k, 1, &nca, None)?)?;
    }
    d.runs.push(ClusterRun { cluster: k, trace });
    Ok(())
}

/// Reduces any cirquent to a classical one.
pub fn reduce_to_classical(c: &Cirquent) -> Result<Derivation, ProverError> {
    reduce_to_classical_with(c, &Limits::default())
}

pub fn reduce_to_classical_with(c: &Cirquent, limits: &Limits) -> Result<Derivation, ProverError> {
    limits.check_nodes(c.size())?;
    let mut d = Derivation::new(c.clone());
    eliminate_into(&mut d, limits)?;
    while let Some(k) = d.result().clusters().non_singleton_ids().next() {
        resolve_into(&mut d, k, limits)?;
    }
    Ok(d)
}

/// A proof of `c`, or `None` when `c` is not valid.
pub fn prove(c: &Cirquent) -> Result<Option<ProofScript>, ProverError> {
    prove_with(c, &Limits::default())
}

pub fn prove_with(c: &Cirquent, limits: &Limits) -> Result<Option<ProofScript>, ProverError> {
    let d = reduce_to_classical_with(c, limits)?;
    Ok(classical_falsifier_with(d.result(), limits)?
        .is_none()
        .then(|| d.to_proof()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decision {
    Valid(ProofScript),
    Invalid(Interpretation),
}

pub fn decide(c: &Cirquent) -> Result<Decision, ProverError> {
    decide_with(c, &Limits::default())
}

pub fn decide_with(c: &Cirquent, limits: &Limits) -> Result<Decision, ProverError> {
    let d = reduce_to_classical_with(c, limits)?;
    let Some(mut i) = classical_falsifier_with(d.result(), limits)? else {
        return Ok(Decision::Valid(d.to_proof()));
    };
    for atom in c.atoms() {
        if i.get(&atom).is_none() {
            i.set(atom, false);
        }
    }
    if true_under_with(c, &i, limits)? {
        return Err(ProverError::CountermodelRejected(i));
    }
    Ok(Decision::Invalid(i))
}
