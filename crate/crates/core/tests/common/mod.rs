#![allow(dead_code)]

use std::collections::BTreeSet;

use ifp::calculus::{RuleApp, RuleKind};
use ifp::cirquent::{Cirquent, ClusterId, Dir, FreshIds, Path};
use ifp::semantics::{metatrue, Interpretation, Metaselection, Side};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const ATOMS: [&str; 6] = ["p", "q", "r", "s", "t", "u"];

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn id(n: u32) -> ClusterId {
    ClusterId::new(n).unwrap()
}

pub fn random_literal(rng: &mut impl Rng, atoms: usize) -> Cirquent {
    Cirquent::lit(ATOMS[rng.gen_range(0..atoms)], rng.gen())
}

/// A random tree with exactly `connectives` internal nodes. Disjunctions
/// draw IDs from `1..=ids`.
pub fn random_cirquent(rng: &mut impl Rng, atoms: usize, connectives: usize, ids: u32) -> Cirquent {
    if connectives == 0 {
        return random_literal(rng, atoms);
    }
    let left_size = rng.gen_range(0..connectives);
    let left = random_cirquent(rng, atoms, left_size, ids);
    let right = random_cirquent(rng, atoms, connectives - 1 - left_size, ids);
    if rng.gen_bool(0.5) {
        Cirquent::and(left, right)
    } else {
        Cirquent::Or(id(rng.gen_range(1..=ids)), Box::new(left), Box::new(right))
    }
}

/// Gives every disjunction its own cluster.
pub fn make_classical(c: &Cirquent) -> Cirquent {
    let mut next = 0;
    c.map_ids(&mut |_| {
        next += 1;
        id(next)
    })
}

pub fn random_classical(rng: &mut impl Rng, atoms: usize, connectives: usize) -> Cirquent {
    make_classical(&random_cirquent(rng, atoms, connectives, 1))
}

pub fn random_path(rng: &mut impl Rng, c: &Cirquent) -> Path {
    c.paths().choose(rng).unwrap().clone()
}

pub fn all_interpretations(atoms: &BTreeSet<String>) -> Vec<Interpretation> {
    let atoms: Vec<&String> = atoms.iter().collect();
    (0..1u32 << atoms.len())
        .map(|mask| {
            atoms
                .iter()
                .enumerate()
                .map(|(n, a)| (a.as_str(), mask >> n & 1 == 1))
                .collect()
        })
        .collect()
}

pub fn all_metaselections(ids: &BTreeSet<ClusterId>) -> Vec<Metaselection> {
    let ids: Vec<ClusterId> = ids.iter().copied().collect();
    (0..1u32 << ids.len())
        .map(|mask| {
            ids.iter()
                .enumerate()
                .map(|(n, &k)| {
                    (
                        k,
                        if mask >> n & 1 == 1 {
                            Side::Right
                        } else {
                            Side::Left
                        },
                    )
                })
                .collect()
        })
        .collect()
}

/// Truth by direct search over metaselections, independent of the
/// library's compiled evaluator.
pub fn oracle_true(c: &Cirquent, i: &Interpretation) -> bool {
    all_metaselections(&c.cluster_ids())
        .iter()
        .any(|f| metatrue(c, i, f).unwrap())
}

pub fn oracle_valid(c: &Cirquent) -> bool {
    all_interpretations(&c.atoms())
        .iter()
        .all(|i| oracle_true(c, i))
}

/// Classical truth by plain recursion, clusters ignored.
pub fn oracle_classical(c: &Cirquent, i: &Interpretation) -> bool {
    match c {
        Cirquent::Lit { atom, positive } => i.get(atom).unwrap() == *positive,
        Cirquent::And(l, r) => oracle_classical(l, i) && oracle_classical(r, i),
        Cirquent::Or(_, l, r) => oracle_classical(l, i) || oracle_classical(r, i),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CircKind {
    And,
    SingletonOr,
    ClusterOr,
}

pub const CIRC_KINDS: [CircKind; 3] = [CircKind::And, CircKind::SingletonOr, CircKind::ClusterOr];

/// A premise built to fit the schema of `rule` together with the
/// application taking it to its conclusion.
#[derive(Debug, Clone)]
pub struct RuleInstance {
    pub premise: Cirquent,
    pub app: RuleApp,
    pub circ: Option<CircKind>,
}

const POOL: u32 = 3;
const FRESH_FROM: u32 = 20;

fn small(rng: &mut impl Rng, max_connectives: usize) -> Cirquent {
    let n = rng.gen_range(0..=max_connectives);
    random_cirquent(rng, 5, n, POOL)
}

struct Fresh(u32);

impl Fresh {
    fn next(&mut self) -> ClusterId {
        self.0 += 1;
        id(self.0)
    }
}

/// Two copies of `c`: disjunctions keep their pool ID in both, or get a
/// distinct fresh singleton ID in each copy.
fn copies(rng: &mut impl Rng, c: &Cirquent, fresh: &mut Fresh) -> (Cirquent, Cirquent) {
    match c {
        Cirquent::Lit { .. } => (c.clone(), c.clone()),
        Cirquent::And(l, r) => {
            let (l1, l2) = copies(rng, l, fresh);
            let (r1, r2) = copies(rng, r, fresh);
            (Cirquent::and(l1, r1), Cirquent::and(l2, r2))
        }
        Cirquent::Or(k, l, r) => {
            let (l1, l2) = copies(rng, l, fresh);
            let (r1, r2) = copies(rng, r, fresh);
            let (i, j) = if rng.gen_bool(0.5) {
                (*k, *k)
            } else {
                (fresh.next(), fresh.next())
            };
            (
                Cirquent::Or(i, Box::new(l1), Box::new(r1)),
                Cirquent::Or(j, Box::new(l2), Box::new(r2)),
            )
        }
    }
}

type Join = Box<dyn Fn(Cirquent, Cirquent) -> Cirquent>;

fn circ_pair(kind: CircKind, k: ClusterId, rng: &mut impl Rng, fresh: &mut Fresh) -> (Join, Join) {
    match kind {
        CircKind::And => (Box::new(Cirquent::and), Box::new(Cirquent::and)),
        CircKind::SingletonOr => {
            let (i, j) = (fresh.next(), fresh.next());
            (
                Box::new(move |a, b| Cirquent::Or(i, Box::new(a), Box::new(b))),
                Box::new(move |a, b| Cirquent::Or(j, Box::new(a), Box::new(b))),
            )
        }
        CircKind::ClusterOr => {
            // Sometimes the key cluster itself.
            let l = if rng.gen_bool(0.25) {
                k
            } else {
                id(rng.gen_range(1..=POOL))
            };
            (
                Box::new(move |a, b| Cirquent::Or(l, Box::new(a), Box::new(b))),
                Box::new(move |a, b| Cirquent::Or(l, Box::new(a), Box::new(b))),
            )
        }
    }
}

pub fn random_rule_instance(rng: &mut impl Rng, rule: RuleKind, kind: CircKind) -> RuleInstance {
    let mut fresh = Fresh(FRESH_FROM);
    let k = id(rng.gen_range(1..=POOL));
    let context = small(rng, 3);
    let hole = random_path(rng, &context);
    let (redex, app, circ) = match rule {
        RuleKind::ILeft | RuleKind::IRight => {
            let disjunct = small(rng, 3);
            let other = small(rng, 2);
            let inner = random_path(rng, &disjunct);
            let b = small(rng, 2);
            let redex = if rule == RuleKind::ILeft {
                Cirquent::Or(k, Box::new(disjunct), Box::new(other))
            } else {
                Cirquent::Or(k, Box::new(other), Box::new(disjunct))
            };
            let app = RuleApp::new(rule, hole.clone(), k)
                .with_inner(inner)
                .with_new_subcirquent(b);
            (redex, app, None)
        }
        RuleKind::IILeft | RuleKind::IIRight => {
            let (a, b) = (small(rng, 2), small(rng, 2));
            let c = small(rng, 2);
            let (c1, c2) = copies(rng, &c, &mut fresh);
            let (left_op, right_op) = circ_pair(kind, k, rng, &mut fresh);
            let redex = if rule == RuleKind::IILeft {
                Cirquent::Or(k, Box::new(left_op(a, c1)), Box::new(right_op(b, c2)))
            } else {
                Cirquent::Or(k, Box::new(left_op(c1, a)), Box::new(right_op(c2, b)))
            };
            (redex, RuleApp::new(rule, hole.clone(), k), Some(kind))
        }
        RuleKind::III => {
            let (a, b, c, d) = (small(rng, 2), small(rng, 2), small(rng, 2), small(rng, 2));
            let (left_op, right_op) = circ_pair(kind, k, rng, &mut fresh);
            let redex = Cirquent::Or(k, Box::new(left_op(a, c)), Box::new(right_op(b, d)));
            (redex, RuleApp::new(rule, hole.clone(), k), Some(kind))
        }
    };
    let premise = context.replace_at(&hole, redex).unwrap();
    RuleInstance { premise, app, circ }
}

/// A random cirquent with no disjunction nested inside another of its
/// cluster.
pub fn random_unnested(rng: &mut impl Rng, atoms: usize, connectives: usize, ids: u32) -> Cirquent {
    let c = random_cirquent(rng, atoms, connectives, ids);
    let mut fresh = FreshIds::avoiding(&c);
    let mut out = c.clone();
    while let Some((_, inner)) = out.nested_same_cluster_pairs().into_iter().next() {
        let Cirquent::Or(_, l, r) = out.subcirquent_at(&inner).unwrap().clone() else {
            unreachable!()
        };
        out = out
            .replace_at(&inner, Cirquent::Or(fresh.mint(), l, r))
            .unwrap();
    }
    out
}

pub fn dir_path(dirs: &[Dir]) -> Path {
    Path::from(dirs.to_vec())
}
