//! The cirquent data model: NNF formulas whose disjunctions are labelled with
//! cluster IDs, together with path addressing and cluster bookkeeping.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Positive integer naming a cluster of disjunction occurrences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClusterId(u32);

impl ClusterId {
    pub fn new(id: u32) -> Option<Self> {
        (id > 0).then_some(ClusterId(id))
    }

    pub fn get(self) -> u32 {
        self.0
    }
}

impl fmt::Display for ClusterId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Dir {
    L,
    R,
}

impl Dir {
    pub fn flip(self) -> Dir {
        match self {
            Dir::L => Dir::R,
            Dir::R => Dir::L,
        }
    }
}

/// A position in a cirquent, as the sequence of left/right steps taken from
/// the root. The empty path is the root.
///
/// Paths order lexicographically with `L < R` and a prefix before its
/// extensions.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Path(Vec<Dir>);

impl Path {
    pub fn root() -> Path {
        Path(Vec::new())
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn dirs(&self) -> &[Dir] {
        &self.0
    }

    pub fn child(&self, dir: Dir) -> Path {
        let mut dirs = self.0.clone();
        dirs.push(dir);
        Path(dirs)
    }

    pub fn join(&self, rest: &Path) -> Path {
        let mut dirs = self.0.clone();
        dirs.extend_from_slice(&rest.0);
        Path(dirs)
    }

    pub fn parent(&self) -> Option<Path> {
        let (_, init) = self.0.split_last()?;
        Some(Path(init.to_vec()))
    }

    pub fn last(&self) -> Option<Dir> {
        self.0.last().copied()
    }

    pub fn is_prefix_of(&self, other: &Path) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn strip_prefix(&self, prefix: &Path) -> Option<Path> {
        self.0
            .strip_prefix(prefix.0.as_slice())
            .map(|rest| Path(rest.to_vec()))
    }

    pub fn common_prefix(&self, other: &Path) -> Path {
        let shared = self
            .0
            .iter()
            .zip(&other.0)
            .take_while(|(x, y)| x == y)
            .count();
        Path(self.0[..shared].to_vec())
    }
}

impl From<Vec<Dir>> for Path {
    fn from(dirs: Vec<Dir>) -> Self {
        Path(dirs)
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str(".");
        }
        for dir in &self.0 {
            f.write_str(match dir {
                Dir::L => "L",
                Dir::R => "R",
            })?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed path {0:?}: expected \".\" or a nonempty string over L and R")]
pub struct ParsePathError(pub String);

impl FromStr for Path {
    type Err = ParsePathError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "." {
            return Ok(Path::root());
        }
        if s.is_empty() {
            return Err(ParsePathError(s.to_owned()));
        }
        s.chars()
            .map(|ch| match ch {
                'L' => Ok(Dir::L),
                'R' => Ok(Dir::R),
                _ => Err(ParsePathError(s.to_owned())),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Path)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoreError {
    #[error("invalid path {0}")]
    InvalidPath(Path),
}

/// A formula in negation normal form with every disjunction assigned to a
/// cluster.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Cirquent {
    Lit { atom: String, positive: bool },
    And(Box<Cirquent>, Box<Cirquent>),
    Or(ClusterId, Box<Cirquent>, Box<Cirquent>),
}

/// The partition of disjunction occurrences induced by cluster labels.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ClusterTable(BTreeMap<ClusterId, BTreeSet<Path>>);

impl ClusterTable {
    pub fn members(&self, id: ClusterId) -> Option<&BTreeSet<Path>> {
        self.0.get(&id)
    }

    pub fn size(&self, id: ClusterId) -> usize {
        self.0.get(&id).map_or(0, BTreeSet::len)
    }

    pub fn is_singleton(&self, id: ClusterId) -> bool {
        self.size(id) == 1
    }

    pub fn contains(&self, id: ClusterId) -> bool {
        self.0.contains_key(&id)
    }

    pub fn ids(&self) -> impl Iterator<Item = ClusterId> + '_ {
        self.0.keys().copied()
    }

    pub fn non_singleton_ids(&self) -> impl Iterator<Item = ClusterId> + '_ {
        self.0
            .iter()
            .filter(|(_, members)| members.len() > 1)
            .map(|(id, _)| *id)
    }

    pub fn iter(&self) -> impl Iterator<Item = (ClusterId, &BTreeSet<Path>)> {
        self.0.iter().map(|(id, members)| (*id, members))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl Cirquent {
    pub fn lit(atom: impl Into<String>, positive: bool) -> Cirquent {
        Cirquent::Lit {
            atom: atom.into(),
            positive,
        }
    }

    pub fn atom(atom: impl Into<String>) -> Cirquent {
        Cirquent::lit(atom, true)
    }

    pub fn neg(atom: impl Into<String>) -> Cirquent {
        Cirquent::lit(atom, false)
    }

    pub fn and(left: Cirquent, right: Cirquent) -> Cirquent {
        Cirquent::And(Box::new(left), Box::new(right))
    }

    /// # Panics
    ///
    /// Panics if `id` is zero.
    pub fn or(id: u32, left: Cirquent, right: Cirquent) -> Cirquent {
        let id = ClusterId::new(id).expect("cluster IDs are positive");
        Cirquent::Or(id, Box::new(left), Box::new(right))
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, Cirquent::Lit { .. })
    }

    pub fn children(&self) -> Option<(&Cirquent, &Cirquent)> {
        match self {
            Cirquent::Lit { .. } => None,
            Cirquent::And(l, r) | Cirquent::Or(_, l, r) => Some((l, r)),
        }
    }

    pub fn child(&self, dir: Dir) -> Option<&Cirquent> {
        self.children().map(|(l, r)| match dir {
            Dir::L => l,
            Dir::R => r,
        })
    }

    /// Cluster ID of this node when it is a disjunction.
    pub fn cluster_id(&self) -> Option<ClusterId> {
        match self {
            Cirquent::Or(id, _, _) => Some(*id),
            _ => None,
        }
    }

    pub fn subcirquent_at(&self, path: &Path) -> Result<&Cirquent, CoreError> {
        let mut node = self;
        for &dir in path.dirs() {
            node = node
                .child(dir)
                .ok_or_else(|| CoreError::InvalidPath(path.clone()))?;
        }
        Ok(node)
    }

    pub fn is_valid_path(&self, path: &Path) -> bool {
        self.subcirquent_at(path).is_ok()
    }

    /// Returns a copy with the subtree at `path` replaced by `with`.
    pub fn replace_at(&self, path: &Path, with: Cirquent) -> Result<Cirquent, CoreError> {
        fn go(node: &Cirquent, dirs: &[Dir], with: Cirquent) -> Option<Cirquent> {
            let Some((&dir, rest)) = dirs.split_first() else {
                return Some(with);
            };
            let (l, r) = node.children()?;
            let (l, r) = match dir {
                Dir::L => (go(l, rest, with)?, r.clone()),
                Dir::R => (l.clone(), go(r, rest, with)?),
            };
            Some(node.rebuild(l, r))
        }
        go(self, path.dirs(), with).ok_or_else(|| CoreError::InvalidPath(path.clone()))
    }

    /// Same connective (and cluster ID) as `self`, over new children.
    ///
    /// # Panics
    ///
    /// Panics on a literal.
    pub fn rebuild(&self, left: Cirquent, right: Cirquent) -> Cirquent {
        match self {
            Cirquent::Lit { .. } => panic!("a literal has no children"),
            Cirquent::And(..) => Cirquent::and(left, right),
            Cirquent::Or(id, ..) => Cirquent::Or(*id, Box::new(left), Box::new(right)),
        }
    }

    /// Every node path in preorder.
    pub fn paths(&self) -> Vec<Path> {
        let mut out = Vec::new();
        self.walk(&mut Path::root(), &mut |path, _| out.push(path.clone()));
        out
    }

    /// Disjunction occurrences with their cluster IDs, in preorder.
    pub fn or_nodes(&self) -> Vec<(Path, ClusterId)> {
        let mut out = Vec::new();
        self.walk(&mut Path::root(), &mut |path, node| {
            if let Cirquent::Or(id, ..) = node {
                out.push((path.clone(), *id));
            }
        });
        out
    }

    fn walk(&self, path: &mut Path, visit: &mut impl FnMut(&Path, &Cirquent)) {
        visit(path, self);
        if let Some((l, r)) = self.children() {
            path.0.push(Dir::L);
            l.walk(path, visit);
            path.0.pop();
            path.0.push(Dir::R);
            r.walk(path, visit);
            path.0.pop();
        }
    }

    /// Disjunction cluster IDs in textual (left-to-right, in-order) order,
    /// one entry per occurrence.
    pub fn ids_in_text_order(&self) -> Vec<ClusterId> {
        fn go(node: &Cirquent, out: &mut Vec<ClusterId>) {
            match node {
                Cirquent::Lit { .. } => {}
                Cirquent::And(l, r) => {
                    go(l, out);
                    go(r, out);
                }
                Cirquent::Or(id, l, r) => {
                    go(l, out);
                    out.push(*id);
                    go(r, out);
                }
            }
        }
        let mut out = Vec::new();
        go(self, &mut out);
        out
    }

    pub fn clusters(&self) -> ClusterTable {
        let mut table: BTreeMap<ClusterId, BTreeSet<Path>> = BTreeMap::new();
        for (path, id) in self.or_nodes() {
            table.entry(id).or_default().insert(path);
        }
        ClusterTable(table)
    }

    pub fn cluster_ids(&self) -> BTreeSet<ClusterId> {
        self.or_nodes().into_iter().map(|(_, id)| id).collect()
    }

    pub fn max_cluster_id(&self) -> u32 {
        self.or_nodes()
            .into_iter()
            .map(|(_, id)| id.get())
            .max()
            .unwrap_or(0)
    }

    pub fn is_classical(&self) -> bool {
        self.clusters()
            .iter()
            .all(|(_, members)| members.len() == 1)
    }

    /// Number of connective nodes strictly above `path`.
    pub fn level(&self, path: &Path) -> Result<usize, CoreError> {
        self.subcirquent_at(path)?;
        Ok(path.len())
    }

    /// Longest common prefix of two valid paths. When one path is a prefix
    /// of the other, the shorter one is returned.
    pub fn nearest_common_ancestor(&self, a: &Path, b: &Path) -> Result<Path, CoreError> {
        self.subcirquent_at(a)?;
        self.subcirquent_at(b)?;
        Ok(a.common_prefix(b))
    }

    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<String>) {
        match self {
            Cirquent::Lit { atom, .. } => {
                out.insert(atom.clone());
            }
            Cirquent::And(l, r) | Cirquent::Or(_, l, r) => {
                l.collect_atoms(out);
                r.collect_atoms(out);
            }
        }
    }

    /// Total node count (literals and connectives).
    pub fn size(&self) -> usize {
        match self.children() {
            None => 1,
            Some((l, r)) => 1 + l.size() + r.size(),
        }
    }

    pub fn connective_count(&self) -> usize {
        match self.children() {
            None => 0,
            Some((l, r)) => 1 + l.connective_count() + r.connective_count(),
        }
    }

    /// Relabels every disjunction through `f`.
    pub fn map_ids(&self, f: &mut impl FnMut(ClusterId) -> ClusterId) -> Cirquent {
        match self {
            Cirquent::Lit { .. } => self.clone(),
            Cirquent::And(l, r) => Cirquent::and(l.map_ids(f), r.map_ids(f)),
            Cirquent::Or(id, l, r) => {
                let id = f(*id);
                let l = l.map_ids(f);
                let r = r.map_ids(f);
                Cirquent::Or(id, Box::new(l), Box::new(r))
            }
        }
    }

    /// Whether `self` and `other` have the same shape and literals and their
    /// cluster tables coincide up to a bijective renaming of IDs.
    pub fn cluster_iso(&self, other: &Cirquent) -> bool {
        let mut forward = HashMap::new();
        let mut backward = HashMap::new();
        fn go(
            x: &Cirquent,
            y: &Cirquent,
            fwd: &mut HashMap<ClusterId, ClusterId>,
            bwd: &mut HashMap<ClusterId, ClusterId>,
        ) -> bool {
            match (x, y) {
                (Cirquent::Lit { .. }, Cirquent::Lit { .. }) => x == y,
                (Cirquent::And(xl, xr), Cirquent::And(yl, yr)) => {
                    go(xl, yl, fwd, bwd) && go(xr, yr, fwd, bwd)
                }
                (Cirquent::Or(i, xl, xr), Cirquent::Or(j, yl, yr)) => {
                    *fwd.entry(*i).or_insert(*j) == *j
                        && *bwd.entry(*j).or_insert(*i) == *i
                        && go(xl, yl, fwd, bwd)
                        && go(xr, yr, fwd, bwd)
                }
                _ => false,
            }
        }
        go(self, other, &mut forward, &mut backward)
    }

    /// Whether `self` and `other` agree as cirquents when singleton cluster
    /// IDs are treated as anonymous: same shape and literals, the same
    /// positions are singletons, and every non-singleton position carries
    /// the same ID in both.
    pub fn matches_modulo_singletons(&self, other: &Cirquent) -> bool {
        let mine = self.clusters();
        let theirs = other.clusters();
        fn go(x: &Cirquent, y: &Cirquent, mine: &ClusterTable, theirs: &ClusterTable) -> bool {
            match (x, y) {
                (Cirquent::Lit { .. }, Cirquent::Lit { .. }) => x == y,
                (Cirquent::And(xl, xr), Cirquent::And(yl, yr)) => {
                    go(xl, yl, mine, theirs) && go(xr, yr, mine, theirs)
                }
                (Cirquent::Or(i, xl, xr), Cirquent::Or(j, yl, yr)) => {
                    let single = mine.is_singleton(*i);
                    single == theirs.is_singleton(*j)
                        && (single || i == j)
                        && go(xl, yl, mine, theirs)
                        && go(xr, yr, mine, theirs)
                }
                _ => false,
            }
        }
        go(self, other, &mine, &theirs)
    }

    /// Renumbers clusters 1, 2, … in order of their first textual
    /// occurrence. The result is cluster-iso to `self`, and two cirquents
    /// are cluster-iso exactly when their canonical forms are equal.
    pub fn canonicalize_ids(&self) -> Cirquent {
        let mut renaming: HashMap<ClusterId, ClusterId> = HashMap::new();
        for id in self.ids_in_text_order() {
            let next = ClusterId(renaming.len() as u32 + 1);
            renaming.entry(id).or_insert(next);
        }
        self.map_ids(&mut |id| renaming[&id])
    }

    /// Pairs `(outer, inner)` of disjunctions in the same cluster where
    /// `inner` lies strictly below `outer`, in lexicographic order.
    pub fn nested_same_cluster_pairs(&self) -> Vec<(Path, Path)> {
        let table = self.clusters();
        let mut pairs = Vec::new();
        for (_, members) in table.iter() {
            for outer in members {
                for inner in members {
                    if outer != inner && outer.is_prefix_of(inner) {
                        pairs.push((outer.clone(), inner.clone()));
                    }
                }
            }
        }
        pairs.sort();
        pairs
    }
}

/// Mints cluster IDs not used by a given cirquent, smallest first.
#[derive(Debug, Clone)]
pub struct FreshIds {
    used: BTreeSet<u32>,
    next: u32,
}

impl FreshIds {
    pub fn avoiding(c: &Cirquent) -> FreshIds {
        FreshIds {
            used: c.cluster_ids().into_iter().map(ClusterId::get).collect(),
            next: 1,
        }
    }

    pub fn also_avoid(&mut self, id: ClusterId) {
        self.used.insert(id.get());
    }

    pub fn mint(&mut self) -> ClusterId {
        while self.used.contains(&self.next) {
            self.next += 1;
        }
        self.used.insert(self.next);
        ClusterId(self.next)
    }
}
