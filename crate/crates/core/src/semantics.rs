//! Truth of cirquents: metatruth under an interpretation and a metaselection,
//! truth (some metaselection works), validity, and the brute-force helpers
//! built on them.
//!
//! Interpretations and metaselections are enumerated lexicographically:
//! atoms by name and clusters by ID, first one most significant, with
//! false before true and left before right. "First" results are the first
//! in that order.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::cirquent::{Cirquent, ClusterId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Left,
    Right,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

/// Assignment of truth values to atoms.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Interpretation(BTreeMap<String, bool>);

impl Interpretation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, atom: &str) -> Option<bool> {
        self.0.get(atom).copied()
    }

    pub fn set(&mut self, atom: impl Into<String>, value: bool) {
        self.0.insert(atom.into(), value);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, bool)> {
        self.0.iter().map(|(atom, value)| (atom.as_str(), *value))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl From<BTreeMap<String, bool>> for Interpretation {
    fn from(map: BTreeMap<String, bool>) -> Self {
        Interpretation(map)
    }
}

impl<S: Into<String>> FromIterator<(S, bool)> for Interpretation {
    fn from_iter<I: IntoIterator<Item = (S, bool)>>(iter: I) -> Self {
        Interpretation(iter.into_iter().map(|(a, v)| (a.into(), v)).collect())
    }
}

/// Left/right choice per cluster. Only the clusters of the cirquent under
/// evaluation matter; entries for other clusters are ignored.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Metaselection(BTreeMap<ClusterId, Side>);

impl Metaselection {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, id: ClusterId) -> Option<Side> {
        self.0.get(&id).copied()
    }

    pub fn set(&mut self, id: ClusterId, side: Side) {
        self.0.insert(id, side);
    }

    pub fn iter(&self) -> impl Iterator<Item = (ClusterId, Side)> + '_ {
        self.0.iter().map(|(id, side)| (*id, *side))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl From<BTreeMap<ClusterId, Side>> for Metaselection {
    fn from(map: BTreeMap<ClusterId, Side>) -> Self {
        Metaselection(map)
    }
}

impl FromIterator<(ClusterId, Side)> for Metaselection {
    fn from_iter<I: IntoIterator<Item = (ClusterId, Side)>>(iter: I) -> Self {
        Metaselection(iter.into_iter().collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("interpretation does not assign atom {0:?}")]
    MissingAtom(String),
    #[error("metaselection does not choose for cluster {0}")]
    MissingCluster(ClusterId),
    #[error("{count} {what} exceed the limit of {limit}")]
    TooLarge {
        what: &'static str,
        count: usize,
        limit: usize,
    },
    #[error("cirquent is not classical")]
    NotClassical,
}

/// Guards for brute-force enumeration and step matching.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_atoms: usize,
    pub max_clusters: usize,
    pub max_nodes: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_atoms: 20,
            max_clusters: 20,
            max_nodes: 4096,
        }
    }
}

impl Limits {
    pub fn check_atoms(&self, count: usize) -> Result<(), SemanticsError> {
        if count > self.max_atoms {
            return Err(SemanticsError::TooLarge {
                what: "atoms",
                count,
                limit: self.max_atoms,
            });
        }
        Ok(())
    }

    pub fn check_clusters(&self, count: usize) -> Result<(), SemanticsError> {
        if count > self.max_clusters {
            return Err(SemanticsError::TooLarge {
                what: "clusters",
                count,
                limit: self.max_clusters,
            });
        }
        Ok(())
    }

    pub fn check_nodes(&self, count: usize) -> Result<(), SemanticsError> {
        if count > self.max_nodes {
            return Err(SemanticsError::TooLarge {
                what: "nodes",
                count,
                limit: self.max_nodes,
            });
        }
        Ok(())
    }
}

pub fn metatrue(
    c: &Cirquent,
    i: &Interpretation,
    f: &Metaselection,
) -> Result<bool, SemanticsError> {
    match c {
        Cirquent::Lit { atom, positive } => i
            .get(atom)
            .map(|value| value == *positive)
            .ok_or_else(|| SemanticsError::MissingAtom(atom.clone())),
        Cirquent::And(l, r) => Ok(metatrue(l, i, f)? && metatrue(r, i, f)?),
        Cirquent::Or(id, l, r) => match f.get(*id) {
            Some(Side::Left) => metatrue(l, i, f),
            Some(Side::Right) => metatrue(r, i, f),
            None => Err(SemanticsError::MissingCluster(*id)),
        },
    }
}

#[derive(Debug, Clone, Copy)]
enum Node {
    Lit(usize, bool),
    And(usize, usize),
    Or(usize, usize, usize),
}

/// Index-based form of a cirquent for fast enumeration. Bit `j` of an
/// interpretation mask holds atom `j` counted from the last atom, so mask
/// order is lexicographic order; the same holds for metaselection masks.
struct Compiled {
    nodes: Vec<Node>,
    root: usize,
    atoms: Vec<String>,
    clusters: Vec<ClusterId>,
}

impl Compiled {
    fn new(c: &Cirquent, limits: &Limits) -> Result<Self, SemanticsError> {
        let atoms: Vec<String> = c.atoms().into_iter().collect();
        let clusters: Vec<ClusterId> = c.cluster_ids().into_iter().collect();
        limits.check_atoms(atoms.len())?;
        limits.check_clusters(clusters.len())?;
        // Masks are u64; classical evaluation never builds a cluster mask.
        let wide = |what, count| SemanticsError::TooLarge {
            what,
            count,
            limit: 63,
        };
        if atoms.len() > 63 {
            return Err(wide("atoms", atoms.len()));
        }
        if clusters.len() > 63 && limits.max_clusters != usize::MAX {
            return Err(wide("clusters", clusters.len()));
        }
        let mut compiled = Compiled {
            nodes: Vec::with_capacity(c.size()),
            root: 0,
            atoms,
            clusters,
        };
        compiled.root = compiled.push(c);
        Ok(compiled)
    }

    fn push(&mut self, c: &Cirquent) -> usize {
        let node = match c {
            Cirquent::Lit { atom, positive } => {
                let index = self.atoms.binary_search(atom).expect("atom collected");
                Node::Lit(self.bit(self.atoms.len(), index), *positive)
            }
            Cirquent::And(l, r) => Node::And(self.push(l), self.push(r)),
            Cirquent::Or(id, l, r) => {
                let index = self.clusters.binary_search(id).expect("cluster collected");
                Node::Or(
                    self.bit(self.clusters.len(), index),
                    self.push(l),
                    self.push(r),
                )
            }
        };
        self.nodes.push(node);
        self.nodes.len() - 1
    }

    fn bit(&self, count: usize, index: usize) -> usize {
        count - 1 - index
    }

    fn eval(&self, node: usize, imask: u64, fmask: u64) -> bool {
        match self.nodes[node] {
            Node::Lit(bit, positive) => ((imask >> bit) & 1 == 1) == positive,
            Node::And(l, r) => self.eval(l, imask, fmask) && self.eval(r, imask, fmask),
            Node::Or(bit, l, r) => {
                if (fmask >> bit) & 1 == 0 {
                    self.eval(l, imask, fmask)
                } else {
                    self.eval(r, imask, fmask)
                }
            }
        }
    }

    /// Classical reading: every disjunction is an ordinary `or`.
    fn eval_classical(&self, node: usize, imask: u64) -> bool {
        match self.nodes[node] {
            Node::Lit(bit, positive) => ((imask >> bit) & 1 == 1) == positive,
            Node::And(l, r) => self.eval_classical(l, imask) && self.eval_classical(r, imask),
            Node::Or(_, l, r) => self.eval_classical(l, imask) || self.eval_classical(r, imask),
        }
    }

    fn first_witness(&self, imask: u64) -> Option<u64> {
        (0..1u64 << self.clusters.len()).find(|&fmask| self.eval(self.root, imask, fmask))
    }

    fn interpretations(&self) -> std::ops::Range<u64> {
        0..1u64 << self.atoms.len()
    }

    fn mask_of(&self, i: &Interpretation) -> Result<u64, SemanticsError> {
        let mut mask = 0;
        for (index, atom) in self.atoms.iter().enumerate() {
            let value = i
                .get(atom)
                .ok_or_else(|| SemanticsError::MissingAtom(atom.clone()))?;
            if value {
                mask |= 1 << self.bit(self.atoms.len(), index);
            }
        }
        Ok(mask)
    }

    fn interpretation(&self, imask: u64) -> Interpretation {
        self.atoms
            .iter()
            .enumerate()
            .map(|(index, atom)| {
                (
                    atom.clone(),
                    (imask >> self.bit(self.atoms.len(), index)) & 1 == 1,
                )
            })
            .collect()
    }

    fn metaselection(&self, fmask: u64) -> Metaselection {
        self.clusters
            .iter()
            .enumerate()
            .map(|(index, id)| {
                let side = if (fmask >> self.bit(self.clusters.len(), index)) & 1 == 0 {
                    Side::Left
                } else {
                    Side::Right
                };
                (*id, side)
            })
            .collect()
    }
}

/// The lexicographically first metaselection making `c` metatrue under `i`.
pub fn witness_metaselection(
    c: &Cirquent,
    i: &Interpretation,
) -> Result<Option<Metaselection>, SemanticsError> {
    witness_metaselection_with(c, i, &Limits::default())
}

pub fn witness_metaselection_with(
    c: &Cirquent,
    i: &Interpretation,
    limits: &Limits,
) -> Result<Option<Metaselection>, SemanticsError> {
    let compiled = Compiled::new(c, limits)?;
    let imask = compiled.mask_of(i)?;
    Ok(compiled
        .first_witness(imask)
        .map(|f| compiled.metaselection(f)))
}

pub fn true_under(c: &Cirquent, i: &Interpretation) -> Result<bool, SemanticsError> {
    true_under_with(c, i, &Limits::default())
}

pub fn true_under_with(
    c: &Cirquent,
    i: &Interpretation,
    limits: &Limits,
) -> Result<bool, SemanticsError> {
    Ok(witness_metaselection_with(c, i, limits)?.is_some())
}

pub fn valid(c: &Cirquent) -> Result<bool, SemanticsError> {
    valid_with(c, &Limits::default())
}

pub fn valid_with(c: &Cirquent, limits: &Limits) -> Result<bool, SemanticsError> {
    Ok(countermodel_with(c, limits)?.is_none())
}

/// The lexicographically first interpretation under which `c` is not true.
pub fn countermodel(c: &Cirquent) -> Result<Option<Interpretation>, SemanticsError> {
    countermodel_with(c, &Limits::default())
}

pub fn countermodel_with(
    c: &Cirquent,
    limits: &Limits,
) -> Result<Option<Interpretation>, SemanticsError> {
    let compiled = Compiled::new(c, limits)?;
    Ok(compiled
        .interpretations()
        .find(|&imask| compiled.first_witness(imask).is_none())
        .map(|imask| compiled.interpretation(imask)))
}

/// Truth function of a cirquent over its sorted atoms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruthTable {
    atoms: Vec<String>,
    rows: Vec<bool>,
}

impl TruthTable {
    /// `rows[n]` is the value under the `n`-th interpretation in
    /// lexicographic order. Returns `None` unless `atoms` is nonempty,
    /// strictly sorted, and there are exactly `2^atoms` rows.
    pub fn new(atoms: Vec<String>, rows: Vec<bool>) -> Option<TruthTable> {
        let sorted = atoms.windows(2).all(|w| w[0] < w[1]);
        let sized = atoms.len() < 64 && rows.len() as u64 == 1u64 << atoms.len();
        (!atoms.is_empty() && sorted && sized).then_some(TruthTable { atoms, rows })
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    pub fn rows(&self) -> &[bool] {
        &self.rows
    }

    pub fn row_interpretation(&self, row: usize) -> Interpretation {
        let n = self.atoms.len();
        self.atoms
            .iter()
            .enumerate()
            .map(|(index, atom)| (atom.clone(), (row >> (n - 1 - index)) & 1 == 1))
            .collect()
    }

    pub fn true_rows(&self) -> usize {
        self.rows.iter().filter(|&&v| v).count()
    }
}

pub fn truth_table(c: &Cirquent) -> Result<TruthTable, SemanticsError> {
    truth_table_with(c, &Limits::default())
}

pub fn truth_table_with(c: &Cirquent, limits: &Limits) -> Result<TruthTable, SemanticsError> {
    let compiled = Compiled::new(c, limits)?;
    let rows = compiled
        .interpretations()
        .map(|imask| compiled.first_witness(imask).is_some())
        .collect();
    Ok(TruthTable {
        atoms: compiled.atoms,
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Dnf {
    Formula(Cirquent),
    /// No row is true; the language has no constant to express this.
    Unsatisfiable,
}

/// Classical disjunctive normal form with one minterm per true row, in row
/// order. Conjunctions and disjunctions nest to the left and every
/// disjunction is its own cluster.
pub fn compile_classical(tt: &TruthTable) -> Dnf {
    let minterm = |row: usize| {
        let i = tt.row_interpretation(row);
        i.iter()
            .map(|(atom, value)| Cirquent::lit(atom, value))
            .reduce(Cirquent::and)
            .expect("truth tables have at least one atom")
    };
    let mut next_id = 0;
    let formula = (0..tt.rows.len())
        .filter(|&row| tt.rows[row])
        .map(minterm)
        .reduce(|acc, term| {
            next_id += 1;
            Cirquent::or(next_id, acc, term)
        });
    match formula {
        Some(f) => Dnf::Formula(f.canonicalize_ids()),
        None => Dnf::Unsatisfiable,
    }
}

/// Classical validity, computed by evaluating every disjunction as plain
/// `or` rather than by searching metaselections.
pub fn classical_tautology(c: &Cirquent) -> Result<bool, SemanticsError> {
    classical_tautology_with(c, &Limits::default())
}

pub fn classical_tautology_with(c: &Cirquent, limits: &Limits) -> Result<bool, SemanticsError> {
    Ok(classical_falsifier_with(c, limits)?.is_none())
}

/// The lexicographically first interpretation falsifying a classical
/// cirquent.
pub fn classical_falsifier_with(
    c: &Cirquent,
    limits: &Limits,
) -> Result<Option<Interpretation>, SemanticsError> {
    if !c.is_classical() {
        return Err(SemanticsError::NotClassical);
    }
    // Clusters play no part in classical evaluation.
    let unbounded_clusters = Limits {
        max_clusters: usize::MAX,
        ..*limits
    };
    let compiled = Compiled::new(c, &unbounded_clusters)?;
    Ok(compiled
        .interpretations()
        .find(|&imask| !compiled.eval_classical(compiled.root, imask))
        .map(|imask| compiled.interpretation(imask)))
}
