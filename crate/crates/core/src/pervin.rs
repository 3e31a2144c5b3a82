//! Finite Pervin spaces: a carrier and a lattice of subsets closed under
//! finite unions and intersections.
//!
//! Subsets are bit masks over the carrier order ([`PointSet`]). Lattice
//! members are kept sorted by mask value, which is the canonical order used
//! for iteration, serialization and witness reporting. On a finite carrier a
//! lattice is already closed under arbitrary unions, so it is at the same
//! time an ω-topology and a topology; nothing extra is stored for that.
//!
//! Atoms are the classes of points with identical lattice membership. They
//! partition the carrier and generate the algebra `A(L)`; every atom is a
//! crescent `U \ V` with `V ⊆ U` both in the lattice.

use std::collections::{HashMap, HashSet};
use std::fmt;

use thiserror::Error;

/// Default cap on the carrier size.
pub const DEFAULT_MAX_POINTS: usize = 20;
/// Default cap on the number of lattice members produced by closure.
pub const DEFAULT_MAX_LATTICE: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpaceError {
    #[error("unknown element {0:?}")]
    UnknownElement(String),
    #[error("duplicate element {0:?}")]
    DuplicateElement(String),
    #[error("carrier has {points} points, more than the cap of {cap}")]
    TooManyPoints { points: usize, cap: usize },
    #[error("lattice closure exceeds {cap} members")]
    ClosureTooLarge { cap: usize },
    #[error("lattice is missing {0}")]
    MissingBound(&'static str),
    #[error("lattice is not closed: {op} of {left} and {right} is missing")]
    NotClosed {
        op: &'static str,
        left: PointSet,
        right: PointSet,
    },
    #[error("subset {0} is not a lattice member")]
    NotInLattice(PointSet),
    #[error("subset {0} splits an atom and is not in the generated algebra")]
    NotInAlgebra(PointSet),
    #[error("crescent inner set {inner} is not inside its outer set {outer}")]
    NotNested { outer: PointSet, inner: PointSet },
    #[error("crescents {0} and {1} overlap")]
    Overlapping(PointSet, PointSet),
    #[error("subset {0} is not contained in the carrier")]
    OutsideCarrier(PointSet),
}

/// A subset of the carrier, bit `i` standing for point `i`.
#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct PointSet(u64);

impl PointSet {
    pub const EMPTY: PointSet = PointSet(0);

    pub fn from_bits(bits: u64) -> Self {
        PointSet(bits)
    }

    /// The first `n` points.
    pub fn full(n: usize) -> Self {
        if n >= 64 {
            PointSet(u64::MAX)
        } else {
            PointSet((1u64 << n) - 1)
        }
    }

    pub fn singleton(point: usize) -> Self {
        PointSet(1u64 << point)
    }

    pub fn from_points<I: IntoIterator<Item = usize>>(points: I) -> Self {
        points
            .into_iter()
            .fold(PointSet::EMPTY, |acc, p| acc.union(PointSet::singleton(p)))
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn contains(self, point: usize) -> bool {
        point < 64 && self.0 & (1u64 << point) != 0
    }

    pub fn union(self, other: PointSet) -> PointSet {
        PointSet(self.0 | other.0)
    }

    pub fn intersection(self, other: PointSet) -> PointSet {
        PointSet(self.0 & other.0)
    }

    pub fn difference(self, other: PointSet) -> PointSet {
        PointSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: PointSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: PointSet) -> bool {
        self.0 & other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn first(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    pub fn points(self) -> impl Iterator<Item = usize> {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let p = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some(p)
        })
    }
}

impl fmt::Debug for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, p) in self.points().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str("}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_points: usize,
    pub max_lattice: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_points: DEFAULT_MAX_POINTS,
            max_lattice: DEFAULT_MAX_LATTICE,
        }
    }
}

/// A difference `outer \ inner` of lattice members with `inner ⊆ outer`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Crescent {
    pub outer: PointSet,
    pub inner: PointSet,
}

impl Crescent {
    pub fn set(&self) -> PointSet {
        self.outer.difference(self.inner)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Atom {
    pub index: usize,
    pub points: PointSet,
    /// `outer` is the least lattice member containing the atom and `inner`
    /// is `outer` intersected with the union of members missing the atom.
    pub witness: Crescent,
}

/// A member of the algebra generated by the lattice together with a
/// decomposition into pairwise disjoint crescents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraElement {
    set: PointSet,
    pieces: Vec<Crescent>,
}

impl AlgebraElement {
    pub fn set(&self) -> PointSet {
        self.set
    }

    pub fn pieces(&self) -> &[Crescent] {
        &self.pieces
    }
}

/// `x ≤ y` iff every lattice member containing `x` contains `y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecializationOrder {
    up: Vec<PointSet>,
}

impl SpecializationOrder {
    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.up[x].contains(y)
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.up
            .iter()
            .enumerate()
            .flat_map(|(x, up)| up.points().map(move |y| (x, y)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PervinSpace {
    elements: Vec<String>,
    index: HashMap<String, usize>,
    members: Vec<PointSet>,
    /// Least member containing each point.
    up: Vec<PointSet>,
    atoms: Vec<Atom>,
    atom_of: Vec<usize>,
}

impl PervinSpace {
    /// Smallest lattice over `elements` containing `generators`, `∅` and the
    /// carrier.
    pub fn close(elements: Vec<String>, generators: &[PointSet], limits: Limits) -> Result<Self, SpaceError> {
        let index = index_elements(&elements, limits)?;
        let full = PointSet::full(elements.len());
        if let Some(g) = generators.iter().find(|g| !g.is_subset(full)) {
            return Err(SpaceError::OutsideCarrier(*g));
        }
        let members = close_lattice(full, generators, limits.max_lattice)?;
        Ok(Self::build(elements, index, members))
    }

    /// Like [`PervinSpace::close`], naming generator points.
    pub fn close_named<S: AsRef<str>>(
        elements: &[S],
        generators: &[Vec<S>],
        limits: Limits,
    ) -> Result<Self, SpaceError> {
        let elements: Vec<String> = elements.iter().map(|s| s.as_ref().to_string()).collect();
        let index = index_elements(&elements, limits)?;
        let generators = generators
            .iter()
            .map(|g| set_from_index(&index, g))
            .collect::<Result<Vec<_>, _>>()?;
        Self::close(elements, &generators, limits)
    }

    /// Takes `members` as the lattice, checking that it contains `∅` and the
    /// carrier and is closed under pairwise union and intersection.
    pub fn from_lattice(elements: Vec<String>, members: &[PointSet], limits: Limits) -> Result<Self, SpaceError> {
        let index = index_elements(&elements, limits)?;
        let full = PointSet::full(elements.len());
        let mut sorted: Vec<PointSet> = members.to_vec();
        sorted.sort();
        sorted.dedup();
        if let Some(m) = sorted.iter().find(|m| !m.is_subset(full)) {
            return Err(SpaceError::OutsideCarrier(*m));
        }
        if sorted.len() > limits.max_lattice {
            return Err(SpaceError::ClosureTooLarge {
                cap: limits.max_lattice,
            });
        }
        if sorted.first() != Some(&PointSet::EMPTY) {
            return Err(SpaceError::MissingBound("the empty set"));
        }
        if sorted.last() != Some(&full) {
            return Err(SpaceError::MissingBound("the whole carrier"));
        }
        for (i, &a) in sorted.iter().enumerate() {
            for &b in &sorted[i + 1..] {
                if sorted.binary_search(&a.union(b)).is_err() {
                    return Err(SpaceError::NotClosed {
                        op: "union",
                        left: a,
                        right: b,
                    });
                }
                if sorted.binary_search(&a.intersection(b)).is_err() {
                    return Err(SpaceError::NotClosed {
                        op: "intersection",
                        left: a,
                        right: b,
                    });
                }
            }
        }
        Ok(Self::build(elements, index, sorted))
    }

    fn build(elements: Vec<String>, index: HashMap<String, usize>, members: Vec<PointSet>) -> Self {
        let n = elements.len();
        let full = PointSet::full(n);
        let mut up = vec![full; n];
        for &m in &members {
            for p in m.points() {
                up[p] = up[p].intersection(m);
            }
        }

        // Points with the same least neighbourhood have the same membership
        // signature. Canonical atom order is by least point.
        let mut atoms: Vec<Atom> = Vec::new();
        let mut atom_of = vec![usize::MAX; n];
        for p in 0..n {
            if atom_of[p] != usize::MAX {
                continue;
            }
            let points = PointSet::from_points((p..n).filter(|&q| up[q] == up[p]));
            let idx = atoms.len();
            for q in points.points() {
                atom_of[q] = idx;
            }
            let outer = up[p];
            let missing = members
                .iter()
                .filter(|m| m.is_disjoint(points))
                .fold(PointSet::EMPTY, |acc, &m| acc.union(m));
            atoms.push(Atom {
                index: idx,
                points,
                witness: Crescent {
                    outer,
                    inner: outer.intersection(missing),
                },
            });
        }

        PervinSpace {
            elements,
            index,
            members,
            up,
            atoms,
            atom_of,
        }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn full(&self) -> PointSet {
        PointSet::full(self.elements.len())
    }

    /// Lattice members in canonical (ascending mask) order.
    pub fn members(&self) -> &[PointSet] {
        &self.members
    }

    pub fn member_index(&self, set: PointSet) -> Option<usize> {
        self.members.binary_search(&set).ok()
    }

    pub fn is_member(&self, set: PointSet) -> bool {
        self.member_index(set).is_some()
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn atom_of(&self, point: usize) -> usize {
        self.atom_of[point]
    }

    /// Indices of the atoms contained in `set`, which must be a union of
    /// atoms.
    pub fn atoms_in(&self, set: PointSet) -> impl Iterator<Item = usize> + '_ {
        self.atoms
            .iter()
            .filter(move |a| a.points.is_subset(set))
            .map(|a| a.index)
    }

    pub fn is_union_of_atoms(&self, set: PointSet) -> bool {
        set.is_subset(self.full())
            && self
                .atoms
                .iter()
                .all(|a| a.points.is_subset(set) || a.points.is_disjoint(set))
    }

    /// Least lattice member containing `set`.
    pub fn up_closure(&self, set: PointSet) -> PointSet {
        set.points().fold(PointSet::EMPTY, |acc, p| acc.union(self.up[p]))
    }

    /// A pair `(U, V)` of members with `V ⊆ U` and `U \ V = set`, if one
    /// exists. `U` is the least member containing `set`.
    pub fn crescent_witness(&self, set: PointSet) -> Option<Crescent> {
        if !set.is_subset(self.full()) {
            return None;
        }
        let outer = self.up_closure(set);
        let inner = outer.difference(set);
        self.is_member(inner).then_some(Crescent { outer, inner })
    }

    pub fn is_crescent(&self, set: PointSet) -> bool {
        self.crescent_witness(set).is_some()
    }

    /// Splits `set` into pairwise disjoint crescents. Atoms are taken in
    /// canonical order and merged into the current piece while the piece
    /// stays a crescent.
    pub fn algebra_decompose(&self, set: PointSet) -> Result<AlgebraElement, SpaceError> {
        if !self.is_union_of_atoms(set) {
            return Err(SpaceError::NotInAlgebra(set));
        }
        if let Some(c) = self.crescent_witness(set) {
            let pieces = if set.is_empty() { Vec::new() } else { vec![c] };
            return Ok(AlgebraElement { set, pieces });
        }
        let mut pieces = Vec::new();
        let mut current: Option<(PointSet, Crescent)> = None;
        for atom in self.atoms.iter().filter(|a| a.points.is_subset(set)) {
            current = match current {
                None => Some((atom.points, atom.witness)),
                Some((piece, witness)) => {
                    let grown = piece.union(atom.points);
                    match self.crescent_witness(grown) {
                        Some(c) => Some((grown, c)),
                        None => {
                            pieces.push(witness);
                            Some((atom.points, atom.witness))
                        }
                    }
                }
            };
        }
        if let Some((_, witness)) = current {
            pieces.push(witness);
        }
        Ok(AlgebraElement { set, pieces })
    }

    /// One crescent per atom of `set`.
    pub fn atomwise_decompose(&self, set: PointSet) -> Result<AlgebraElement, SpaceError> {
        if !self.is_union_of_atoms(set) {
            return Err(SpaceError::NotInAlgebra(set));
        }
        let pieces = self
            .atoms
            .iter()
            .filter(|a| a.points.is_subset(set))
            .map(|a| a.witness)
            .collect();
        Ok(AlgebraElement { set, pieces })
    }

    /// Assembles an algebra element from caller-chosen crescents, checking
    /// that they are crescents of this lattice and pairwise disjoint.
    pub fn algebra_from_crescents(&self, pieces: Vec<Crescent>) -> Result<AlgebraElement, SpaceError> {
        let mut set = PointSet::EMPTY;
        for c in &pieces {
            if !self.is_member(c.outer) {
                return Err(SpaceError::NotInLattice(c.outer));
            }
            if !self.is_member(c.inner) {
                return Err(SpaceError::NotInLattice(c.inner));
            }
            if !c.inner.is_subset(c.outer) {
                return Err(SpaceError::NotNested {
                    outer: c.outer,
                    inner: c.inner,
                });
            }
            if !set.is_disjoint(c.set()) {
                return Err(SpaceError::Overlapping(set, c.set()));
            }
            set = set.union(c.set());
        }
        Ok(AlgebraElement { set, pieces })
    }

    pub fn specialization_order(&self) -> SpecializationOrder {
        SpecializationOrder { up: self.up.clone() }
    }

    pub fn point_index(&self, name: &str) -> Result<usize, SpaceError> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| SpaceError::UnknownElement(name.to_string()))
    }

    pub fn point_name(&self, point: usize) -> &str {
        &self.elements[point]
    }

    pub fn set_from_names<S: AsRef<str>>(&self, names: &[S]) -> Result<PointSet, SpaceError> {
        set_from_index(&self.index, names)
    }

    /// Point names of `set` in carrier order, joined by `,`.
    pub fn label(&self, set: PointSet) -> String {
        set.points()
            .map(|p| self.elements[p].as_str())
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Inverse of [`PervinSpace::label`]; surrounding braces and blanks are
    /// tolerated, order is not significant.
    pub fn parse_label(&self, label: &str) -> Result<PointSet, SpaceError> {
        let trimmed = label.trim();
        let inner = trimmed
            .strip_prefix('{')
            .and_then(|s| s.strip_suffix('}'))
            .unwrap_or(trimmed);
        let names: Vec<&str> = inner.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
        self.set_from_names(&names)
    }
}

fn index_elements(elements: &[String], limits: Limits) -> Result<HashMap<String, usize>, SpaceError> {
    let cap = limits.max_points.min(64);
    if elements.len() > cap {
        return Err(SpaceError::TooManyPoints {
            points: elements.len(),
            cap,
        });
    }
    let mut index = HashMap::with_capacity(elements.len());
    for (i, e) in elements.iter().enumerate() {
        if index.insert(e.clone(), i).is_some() {
            return Err(SpaceError::DuplicateElement(e.clone()));
        }
    }
    Ok(index)
}

fn set_from_index<S: AsRef<str>>(index: &HashMap<String, usize>, names: &[S]) -> Result<PointSet, SpaceError> {
    names.iter().try_fold(PointSet::EMPTY, |acc, name| {
        let name = name.as_ref();
        index
            .get(name)
            .map(|&i| acc.union(PointSet::singleton(i)))
            .ok_or_else(|| SpaceError::UnknownElement(name.to_string()))
    })
}

/// Sublattice generated by `generators`, `∅` and `full`: unions of
/// intersections of generators.
fn close_lattice(full: PointSet, generators: &[PointSet], cap: usize) -> Result<Vec<PointSet>, SpaceError> {
    let too_large = || SpaceError::ClosureTooLarge { cap };

    let mut meets: HashSet<PointSet> = HashSet::new();
    let mut queue: Vec<PointSet> = Vec::new();
    for &g in std::iter::once(&full).chain(generators) {
        if meets.insert(g) {
            queue.push(g);
        }
    }
    let mut done: Vec<PointSet> = Vec::new();
    while let Some(a) = queue.pop() {
        for &b in &done {
            let m = a.intersection(b);
            if meets.insert(m) {
                if meets.len() > cap {
                    return Err(too_large());
                }
                queue.push(m);
            }
        }
        done.push(a);
    }

    let mut joins: HashSet<PointSet> = HashSet::new();
    joins.insert(PointSet::EMPTY);
    let mut current: Vec<PointSet> = vec![PointSet::EMPTY];
    let mut meets: Vec<PointSet> = meets.into_iter().collect();
    meets.sort();
    for m in meets {
        let mut fresh = Vec::new();
        for &l in &current {
            let u = l.union(m);
            if joins.insert(u) {
                fresh.push(u);
            }
        }
        if joins.len() > cap {
            return Err(too_large());
        }
        current.extend(fresh);
    }
    current.sort();
    Ok(current)
}
