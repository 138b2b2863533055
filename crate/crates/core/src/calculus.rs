//! The inference rules of the calculus, applied premise-to-conclusion and
//! conclusion-to-premise, plus step matching and proof checking.
//!
//! Schemas, with `Φ{}`/`Ψ{}` contexts addressed by paths and `∘` standing for
//! `∧`, a singleton `∨`, or `∨l` with cluster `l` non-singleton (the same at
//! every displayed occurrence):
//!
//! ```text
//! I-left    Φ{Ψ{A} ∨k C}                 ⟹  Φ{Ψ{A ∨k B} ∨k C}
//! I-right   Φ{C ∨k Ψ{A}}                 ⟹  Φ{C ∨k Ψ{B ∨k A}}
//! II-left   Φ{(A ∘ C) ∨k (B ∘ C)}        ⟹  Φ{(A ∨k B) ∘ C}
//! II-right  Φ{(C ∘ A) ∨k (C ∘ B)}        ⟹  Φ{C ∘ (A ∨k B)}
//! III       Φ{(A ∘ C) ∨k (B ∘ D)}        ⟹  Φ{(A ∨k B) ∘ (C ∨k D)}
//! ```
//!
//! The hole path of an application addresses the premise's key
//! disjunction, which is also where the conclusion's redex sits. Rule I
//! additionally carries the position of `A` relative to the disjunct that
//! contains it.
//!
//! Singleton cluster IDs are anonymous throughout: a premise key disjunction
//! in a singleton cluster may carry any ID and is renamed to `k`, and step
//! matching compares singletons by position only.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::cirquent::{Cirquent, ClusterId, ClusterTable, CoreError, Dir, FreshIds, Path};
use crate::semantics::{classical_tautology_with, Limits, SemanticsError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RuleKind {
    ILeft,
    IRight,
    IILeft,
    IIRight,
    III,
}

impl RuleKind {
    pub const ALL: [RuleKind; 5] = [
        RuleKind::ILeft,
        RuleKind::IRight,
        RuleKind::IILeft,
        RuleKind::IIRight,
        RuleKind::III,
    ];

    pub fn is_rule_one(self) -> bool {
        matches!(self, RuleKind::ILeft | RuleKind::IRight)
    }
}

impl fmt::Display for RuleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RuleKind::ILeft => "I-left",
            RuleKind::IRight => "I-right",
            RuleKind::IILeft => "II-left",
            RuleKind::IIRight => "II-right",
            RuleKind::III => "III",
        })
    }
}

impl FromStr for RuleKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RuleKind::ALL
            .into_iter()
            .find(|rule| rule.to_string() == s)
            .ok_or_else(|| format!("unknown rule {s:?}"))
    }
}

/// What `∘` stood for in a Rule II or Rule III application.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Circ {
    And,
    SingletonOr,
    ClusterOr(ClusterId),
}

/// One rule application.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleApp {
    pub rule: RuleKind,
    pub hole: Path,
    pub k: ClusterId,
    /// Position of `A` inside its disjunct; Rule I only.
    pub inner: Path,
    /// The `B` introduced by Rule I when applied premise-to-conclusion.
    pub new_subcirquent: Option<Cirquent>,
    pub circ: Option<Circ>,
}

impl RuleApp {
    pub fn new(rule: RuleKind, hole: Path, k: ClusterId) -> RuleApp {
        RuleApp {
            rule,
            hole,
            k,
            inner: Path::root(),
            new_subcirquent: None,
            circ: None,
        }
    }

    pub fn with_inner(mut self, inner: Path) -> RuleApp {
        self.inner = inner;
        self
    }

    pub fn with_new_subcirquent(mut self, b: Cirquent) -> RuleApp {
        self.new_subcirquent = Some(b);
        self
    }

    pub fn hint(&self) -> RuleHint {
        RuleHint {
            rule: self.rule,
            path: Some(self.hole.clone()),
            k: Some(self.k),
            inner: self.rule.is_rule_one().then(|| self.inner.clone()),
        }
    }
}

/// A partial rule application written next to a proof line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleHint {
    pub rule: RuleKind,
    pub path: Option<Path>,
    pub k: Option<ClusterId>,
    pub inner: Option<Path>,
}

impl RuleHint {
    pub fn new(rule: RuleKind) -> RuleHint {
        RuleHint {
            rule,
            path: None,
            k: None,
            inner: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Annotation {
    None,
    Axiom,
    Rule(RuleHint),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofEntry {
    pub cirquent: Cirquent,
    pub annotation: Annotation,
}

/// A nonempty sequence of cirquents, first one intended as the axiom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofScript(Vec<ProofEntry>);

impl ProofScript {
    pub fn new(entries: Vec<ProofEntry>) -> Option<ProofScript> {
        (!entries.is_empty()).then_some(ProofScript(entries))
    }

    pub fn entries(&self) -> &[ProofEntry] {
        &self.0
    }

    pub fn last(&self) -> &Cirquent {
        &self.0.last().expect("proof scripts are nonempty").cirquent
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CalculusError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("the two copies of C are not equivalent")]
    CopiesNotEquivalent,
    #[error("the connective ∘ violates its constraint: {0}")]
    CircConstraintViolated(String),
    #[error("key disjunction is in cluster {found}, which cannot be renamed to {k}")]
    KeyClusterConflict { found: ClusterId, k: ClusterId },
    #[error("Rule I applied forward needs the introduced subcirquent")]
    MissingSubcirquent,
    #[error(transparent)]
    Path(#[from] CoreError),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

fn mismatch<T>(what: impl Into<String>) -> Result<T, CalculusError> {
    Err(CalculusError::ShapeMismatch(what.into()))
}

/// Axioms are classical cirquents that are classical tautologies.
pub fn is_axiom(c: &Cirquent) -> Result<bool, SemanticsError> {
    is_axiom_with(c, &Limits::default())
}

pub fn is_axiom_with(c: &Cirquent, limits: &Limits) -> Result<bool, SemanticsError> {
    if !c.is_classical() {
        return Ok(false);
    }
    classical_tautology_with(c, limits)
}

pub fn apply_rule_forward(premise: &Cirquent, app: &RuleApp) -> Result<Cirquent, CalculusError> {
    forward(premise, app).map(|(c, _)| c)
}

pub fn apply_rule_backward(
    conclusion: &Cirquent,
    app: &RuleApp,
) -> Result<Cirquent, CalculusError> {
    backward(conclusion, app).map(|(c, _)| c)
}

/// Gives the premise key disjunction at `hole` the ID `k`. A singleton key
/// may be renamed; any other singleton already using `k` is moved aside.
fn align_key(premise: &Cirquent, hole: &Path, k: ClusterId) -> Result<Cirquent, CalculusError> {
    let found = match premise.subcirquent_at(hole)? {
        Cirquent::Or(id, ..) => *id,
        _ => return mismatch(format!("no disjunction at {hole}")),
    };
    if found == k {
        return Ok(premise.clone());
    }
    let table = premise.clusters();
    if !table.is_singleton(found) || table.size(k) > 1 {
        return Err(CalculusError::KeyClusterConflict { found, k });
    }
    let mut fresh = FreshIds::avoiding(premise);
    fresh.also_avoid(k);
    let moved = fresh.mint();
    let renamed = premise.map_ids(&mut |id| {
        if id == k {
            moved
        } else if id == found {
            k
        } else {
            id
        }
    });
    Ok(renamed)
}

/// Classifies the two displayed `∘` occurrences of a Rule II/III premise.
/// Returns the kind and the node to rebuild the conclusion's `∘` from.
fn premise_circ(
    table: &ClusterTable,
    left: &Cirquent,
    right: &Cirquent,
) -> Result<Circ, CalculusError> {
    match (left, right) {
        (Cirquent::And(..), Cirquent::And(..)) => Ok(Circ::And),
        (Cirquent::Or(i, ..), Cirquent::Or(j, ..)) if i == j => Ok(Circ::ClusterOr(*i)),
        (Cirquent::Or(i, ..), Cirquent::Or(j, ..)) => {
            if table.is_singleton(*i) && table.is_singleton(*j) {
                Ok(Circ::SingletonOr)
            } else {
                Err(CalculusError::CircConstraintViolated(format!(
                    "∨{i} and ∨{j} are different clusters, not both singletons"
                )))
            }
        }
        (Cirquent::Lit { .. }, _) | (_, Cirquent::Lit { .. }) => {
            mismatch("disjuncts of the key disjunction must be compound")
        }
        _ => Err(CalculusError::CircConstraintViolated(
            "∘ must be the same connective on both sides".into(),
        )),
    }
}

/// The two copies of `C` in a Rule II premise agree position by position,
/// with each disjunction pair either sharing an ID or both singletons.
fn copies_equivalent(table: &ClusterTable, x: &Cirquent, y: &Cirquent) -> bool {
    match (x, y) {
        (Cirquent::Lit { .. }, Cirquent::Lit { .. }) => x == y,
        (Cirquent::And(xl, xr), Cirquent::And(yl, yr)) => {
            copies_equivalent(table, xl, yl) && copies_equivalent(table, xr, yr)
        }
        (Cirquent::Or(i, xl, xr), Cirquent::Or(j, yl, yr)) => {
            (i == j || (table.is_singleton(*i) && table.is_singleton(*j)))
                && copies_equivalent(table, xl, yl)
                && copies_equivalent(table, xr, yr)
        }
        _ => false,
    }
}

fn or_node(k: ClusterId, left: Cirquent, right: Cirquent) -> Cirquent {
    Cirquent::Or(k, Box::new(left), Box::new(right))
}

fn split(node: &Cirquent) -> (&Cirquent, &Cirquent) {
    node.children().expect("checked to be compound")
}

fn forward(premise: &Cirquent, app: &RuleApp) -> Result<(Cirquent, Option<Circ>), CalculusError> {
    let premise = align_key(premise, &app.hole, app.k)?;
    let k = app.k;
    let redex = premise.subcirquent_at(&app.hole)?;
    match app.rule {
        RuleKind::ILeft | RuleKind::IRight => {
            let b = app
                .new_subcirquent
                .clone()
                .ok_or(CalculusError::MissingSubcirquent)?;
            let side = if app.rule == RuleKind::ILeft {
                Dir::L
            } else {
                Dir::R
            };
            let at = app.hole.child(side).join(&app.inner);
            let a = premise.subcirquent_at(&at)?.clone();
            let replacement = if side == Dir::L {
                or_node(k, a, b)
            } else {
                or_node(k, b, a)
            };
            Ok((premise.replace_at(&at, replacement)?, None))
        }
        RuleKind::IILeft | RuleKind::IIRight | RuleKind::III => {
            let table = premise.clusters();
            let (left, right) = split(redex);
            let circ = premise_circ(&table, left, right)?;
            let (ll, lr) = split(left);
            let (rl, rr) = split(right);
            let conclusion = match app.rule {
                RuleKind::IILeft => {
                    if !copies_equivalent(&table, lr, rr) {
                        return Err(CalculusError::CopiesNotEquivalent);
                    }
                    left.rebuild(or_node(k, ll.clone(), rl.clone()), lr.clone())
                }
                RuleKind::IIRight => {
                    if !copies_equivalent(&table, ll, rl) {
                        return Err(CalculusError::CopiesNotEquivalent);
                    }
                    left.rebuild(ll.clone(), or_node(k, lr.clone(), rr.clone()))
                }
                _ => left.rebuild(
                    or_node(k, ll.clone(), rl.clone()),
                    or_node(k, lr.clone(), rr.clone()),
                ),
            };
            Ok((premise.replace_at(&app.hole, conclusion)?, Some(circ)))
        }
    }
}

/// Reads `∘` off a conclusion node and produces its two premise copies'
/// connectives: `(left, right)` templates applied via `Cirquent::rebuild`.
fn conclusion_circ(
    table: &ClusterTable,
    circ_node: &Cirquent,
    fresh: &mut FreshIds,
    rule: RuleKind,
) -> (Circ, Cirquent, Cirquent) {
    let dummy = || Cirquent::atom("_");
    match circ_node {
        Cirquent::And(..) => (Circ::And, circ_node.clone(), circ_node.clone()),
        Cirquent::Or(l, ..) if !table.is_singleton(*l) => {
            (Circ::ClusterOr(*l), circ_node.clone(), circ_node.clone())
        }
        Cirquent::Or(m, ..) => {
            let left = if rule == RuleKind::III {
                fresh.mint()
            } else {
                *m
            };
            let right = fresh.mint();
            (
                Circ::SingletonOr,
                or_node(left, dummy(), dummy()),
                or_node(right, dummy(), dummy()),
            )
        }
        Cirquent::Lit { .. } => unreachable!("callers pass compound nodes"),
    }
}

fn backward(
    conclusion: &Cirquent,
    app: &RuleApp,
) -> Result<(Cirquent, Option<Circ>), CalculusError> {
    let k = app.k;
    let node = conclusion.subcirquent_at(&app.hole)?;
    let table = conclusion.clusters();
    let expect_key = |c: &Cirquent, at: &str| -> Result<(), CalculusError> {
        match c {
            Cirquent::Or(id, ..) if *id == k => Ok(()),
            _ => mismatch(format!("expected a ∨{k} at {at}")),
        }
    };
    match app.rule {
        RuleKind::ILeft | RuleKind::IRight => {
            expect_key(node, "the hole")?;
            let side = if app.rule == RuleKind::ILeft {
                Dir::L
            } else {
                Dir::R
            };
            let at = app.hole.child(side).join(&app.inner);
            let inner = conclusion.subcirquent_at(&at)?;
            expect_key(inner, "the inner position")?;
            let (a_left, a_right) = split(inner);
            let kept = if side == Dir::L { a_left } else { a_right };
            Ok((conclusion.replace_at(&at, kept.clone())?, None))
        }
        RuleKind::IILeft | RuleKind::IIRight => {
            let Some((l, r)) = node.children() else {
                return mismatch("Rule II needs a compound node at the hole");
            };
            let (key, c) = if app.rule == RuleKind::IILeft {
                (l, r)
            } else {
                (r, l)
            };
            expect_key(key, "the key position")?;
            let (a, b) = split(key);
            let mut fresh = FreshIds::avoiding(conclusion);
            let (circ, left_op, right_op) = conclusion_circ(&table, node, &mut fresh, app.rule);
            let copy = c.map_ids(&mut |id| {
                if table.is_singleton(id) {
                    fresh.mint()
                } else {
                    id
                }
            });
            let premise_node = if app.rule == RuleKind::IILeft {
                or_node(
                    k,
                    left_op.rebuild(a.clone(), c.clone()),
                    right_op.rebuild(b.clone(), copy),
                )
            } else {
                or_node(
                    k,
                    left_op.rebuild(c.clone(), a.clone()),
                    right_op.rebuild(copy, b.clone()),
                )
            };
            Ok((conclusion.replace_at(&app.hole, premise_node)?, Some(circ)))
        }
        RuleKind::III => {
            let Some((l, r)) = node.children() else {
                return mismatch("Rule III needs a compound node at the hole");
            };
            expect_key(l, "the left key position")?;
            expect_key(r, "the right key position")?;
            let (a, b) = split(l);
            let (c, d) = split(r);
            let mut fresh = FreshIds::avoiding(conclusion);
            let (circ, left_op, right_op) = conclusion_circ(&table, node, &mut fresh, app.rule);
            let premise_node = or_node(
                k,
                left_op.rebuild(a.clone(), c.clone()),
                right_op.rebuild(b.clone(), d.clone()),
            );
            Ok((conclusion.replace_at(&app.hole, premise_node)?, Some(circ)))
        }
    }
}

/// Applies a rule conclusion-to-premise and reports what `∘` stood for.
pub fn apply_rule_backward_traced(
    conclusion: &Cirquent,
    app: &RuleApp,
) -> Result<(Cirquent, Option<Circ>), CalculusError> {
    backward(conclusion, app)
}

/// Finds a rule application taking `premise` to `conclusion`, comparing
/// results with singleton IDs treated as anonymous. Candidates are tried in
/// `(rule, hole, k, inner)` order and the first success is returned. A hint
/// restricts the search to the fields it fixes.
pub fn match_step(
    premise: &Cirquent,
    conclusion: &Cirquent,
    hint: Option<&RuleHint>,
) -> Result<Option<RuleApp>, CalculusError> {
    match_step_with(premise, conclusion, hint, &Limits::default())
}

pub fn match_step_with(
    premise: &Cirquent,
    conclusion: &Cirquent,
    hint: Option<&RuleHint>,
    limits: &Limits,
) -> Result<Option<RuleApp>, CalculusError> {
    limits.check_nodes(premise.size())?;
    limits.check_nodes(conclusion.size())?;
    let concl_table = conclusion.clusters();

    let mut holes: Vec<(Path, ClusterId)> = premise.or_nodes();
    holes.sort();

    for rule in RuleKind::ALL {
        if hint.is_some_and(|h| h.rule != rule) {
            continue;
        }
        for (hole, premise_key) in &holes {
            if hint.is_some_and(|h| h.path.as_ref().is_some_and(|p| p != hole)) {
                continue;
            }
            let candidates =
                step_candidates(premise, conclusion, &concl_table, rule, hole, *premise_key);
            for (app, concl_key_singleton) in candidates {
                if let Some(h) = hint {
                    if h.inner.as_ref().is_some_and(|inner| *inner != app.inner) {
                        continue;
                    }
                    if h.k.is_some_and(|k| k != app.k) && !concl_key_singleton {
                        continue;
                    }
                }
                let Ok((result, circ)) = forward(premise, &app) else {
                    continue;
                };
                if result.matches_modulo_singletons(conclusion) {
                    return Ok(Some(RuleApp { circ, ..app }));
                }
            }
        }
    }
    Ok(None)
}

/// Candidate applications of `rule` at `hole`, with `k` and (for Rule I)
/// `B` read off the conclusion. Each candidate carries whether the
/// conclusion's key cluster is a singleton.
fn step_candidates(
    premise: &Cirquent,
    conclusion: &Cirquent,
    concl_table: &ClusterTable,
    rule: RuleKind,
    hole: &Path,
    premise_key: ClusterId,
) -> Vec<(RuleApp, bool)> {
    let mut out = Vec::new();
    let Ok(concl_node) = conclusion.subcirquent_at(hole) else {
        return out;
    };
    match rule {
        RuleKind::ILeft | RuleKind::IRight => {
            let Some(k) = concl_node.cluster_id() else {
                return out;
            };
            let side = if rule == RuleKind::ILeft {
                Dir::L
            } else {
                Dir::R
            };
            let disjunct = hole.child(side);
            let Ok(premise_disjunct) = premise.subcirquent_at(&disjunct) else {
                return out;
            };
            let mut inners = premise_disjunct.paths();
            inners.sort();
            // B comes from the conclusion; its singleton IDs must not collide
            // with anything already in play.
            let mut fresh = FreshIds::avoiding(premise);
            for (_, id) in conclusion.or_nodes() {
                fresh.also_avoid(id);
            }
            for inner in inners {
                let Ok(Cirquent::Or(id, x, y)) = conclusion.subcirquent_at(&disjunct.join(&inner))
                else {
                    continue;
                };
                if *id != k {
                    continue;
                }
                let b = if side == Dir::L { y } else { x };
                let mut local = fresh.clone();
                let b = b.map_ids(&mut |id| {
                    if concl_table.is_singleton(id) {
                        local.mint()
                    } else {
                        id
                    }
                });
                let app = RuleApp::new(rule, hole.clone(), k)
                    .with_inner(inner)
                    .with_new_subcirquent(b);
                out.push((app, concl_table.is_singleton(k)));
            }
        }
        RuleKind::IILeft | RuleKind::IIRight => {
            let side = if rule == RuleKind::IILeft {
                Dir::L
            } else {
                Dir::R
            };
            let Some(Cirquent::Or(concl_key, ..)) = concl_node.child(side) else {
                return out;
            };
            let singleton = concl_table.is_singleton(*concl_key);
            let k = if singleton { premise_key } else { *concl_key };
            out.push((RuleApp::new(rule, hole.clone(), k), singleton));
        }
        RuleKind::III => {
            let Some((Cirquent::Or(i, ..), Cirquent::Or(j, ..))) = concl_node.children() else {
                return out;
            };
            if i == j {
                out.push((
                    RuleApp::new(rule, hole.clone(), *i),
                    concl_table.is_singleton(*i),
                ));
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FailureReason {
    NotAnAxiom,
    NoRuleMatches,
    MisplacedAxiom,
    TooLarge(String),
}

impl fmt::Display for FailureReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FailureReason::NotAnAxiom => f.write_str("not-an-axiom"),
            FailureReason::NoRuleMatches => f.write_str("no-rule-matches"),
            FailureReason::MisplacedAxiom => f.write_str("axiom-after-first-line"),
            FailureReason::TooLarge(msg) => write!(f, "too-large ({msg})"),
        }
    }
}

/// The first line (1-based) at which a proof script fails.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {reason}")]
pub struct ProofFailure {
    pub line: usize,
    pub reason: FailureReason,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckOptions {
    pub use_hints: bool,
    pub limits: Limits,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            use_hints: true,
            limits: Limits::default(),
        }
    }
}

/// Checks a proof script; on success returns the matched application for
/// every step (one fewer than the number of lines).
pub fn check_proof(ps: &ProofScript) -> Result<Vec<RuleApp>, ProofFailure> {
    check_proof_with(ps, &CheckOptions::default())
}

pub fn check_proof_with(
    ps: &ProofScript,
    options: &CheckOptions,
) -> Result<Vec<RuleApp>, ProofFailure> {
    let entries = ps.entries();
    let fail = |line: usize, reason| ProofFailure { line, reason };
    match is_axiom_with(&entries[0].cirquent, &options.limits) {
        Ok(true) => {}
        Ok(false) => return Err(fail(1, FailureReason::NotAnAxiom)),
        Err(e) => return Err(fail(1, FailureReason::TooLarge(e.to_string()))),
    }
    let mut apps = Vec::with_capacity(entries.len() - 1);
    for (index, pair) in entries.windows(2).enumerate() {
        let line = index + 2;
        let hint = match &pair[1].annotation {
            Annotation::Axiom => return Err(fail(line, FailureReason::MisplacedAxiom)),
            Annotation::Rule(hint) if options.use_hints => Some(hint),
            _ => None,
        };
        match match_step_with(&pair[0].cirquent, &pair[1].cirquent, hint, &options.limits) {
            Ok(Some(app)) => apps.push(app),
            Ok(None) => return Err(fail(line, FailureReason::NoRuleMatches)),
            Err(e) => return Err(fail(line, FailureReason::TooLarge(e.to_string()))),
        }
    }
    Ok(apps)
}
