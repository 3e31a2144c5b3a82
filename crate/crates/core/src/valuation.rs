//! Valuations and signed valuations on a finite Pervin space.
//!
//! A [`Valuation`] is stored by its atom weights. The value of a lattice
//! member is the sum of the weights of the atoms it contains; the lattice
//! table is derived from the weights once, at construction. For bounded
//! valuations this representation is the unique extension to the generated
//! algebra. With infinite weights the extension to the algebra is not
//! determined by the lattice values, so tables containing `inf` are refused
//! by [`Valuation::from_lattice_table`] and infinite mass enters only through
//! explicit atom weights.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::exreal::{ExtValue, SignedRational};
use crate::pervin::{AlgebraElement, PervinSpace, PointSet, SpaceError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axiom {
    Strict,
    Monotone,
    Modular,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axiom::Strict => "strict",
            Axiom::Monotone => "monotone",
            Axiom::Modular => "modular",
        })
    }
}

/// The first failing axiom instance, witnessed by a pair of members.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{axiom} axiom fails on {left} and {right}")]
pub struct AxiomViolation {
    pub axiom: Axiom,
    pub left: PointSet,
    pub right: PointSet,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValuationError {
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Axiom(#[from] AxiomViolation),
    #[error("valuations live on different spaces")]
    SpaceMismatch,
    #[error("expected {expected} entries, got {got}")]
    WrongArity { expected: usize, got: usize },
    #[error("lattice table has no entry for {0}")]
    MissingEntry(PointSet),
    #[error("lattice table takes value inf on {0}; only bounded tables determine atom weights")]
    UnboundedInput(PointSet),
    #[error("valuation is unbounded")]
    UnboundedValuation,
    #[error("map is not a morphism: preimage of {0} is not in the source lattice")]
    NotMorphism(PointSet),
    #[error("map sends point {0} outside the target carrier")]
    BadMap(usize),
    #[error("scalar {0} is negative")]
    NegativeScalar(SignedRational),
}

pub(crate) fn same_space(a: &Arc<PervinSpace>, b: &Arc<PervinSpace>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// Per-member sums of atom weights, over a common denominator so that each
/// member costs one reduction.
fn member_sums(space: &PervinSpace, weights: &[BigRational]) -> Vec<BigRational> {
    let denom = weights.iter().fold(BigInt::one(), |acc, w| acc.lcm(w.denom()));
    let numers: Vec<BigInt> = weights.iter().map(|w| w.numer() * (&denom / w.denom())).collect();
    space
        .members()
        .iter()
        .map(|&u| {
            let total: BigInt = space.atoms_in(u).map(|a| &numers[a]).sum();
            BigRational::new(total, denom.clone())
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct Valuation {
    space: Arc<PervinSpace>,
    weights: Vec<ExtValue>,
    table: Vec<ExtValue>,
}

impl PartialEq for Valuation {
    fn eq(&self, other: &Self) -> bool {
        same_space(&self.space, &other.space) && self.weights == other.weights
    }
}

impl Eq for Valuation {}

impl Valuation {
    /// The valuation giving each atom the corresponding weight.
    pub fn from_atom_weights(space: Arc<PervinSpace>, weights: Vec<ExtValue>) -> Result<Self, ValuationError> {
        let expected = space.atoms().len();
        if weights.len() != expected {
            return Err(ValuationError::WrongArity {
                expected,
                got: weights.len(),
            });
        }
        let finite: Vec<BigRational> = weights
            .iter()
            .map(|w| w.finite().cloned().unwrap_or_else(BigRational::zero))
            .collect();
        let infinite = weights
            .iter()
            .enumerate()
            .filter(|(_, w)| w.is_infinite())
            .fold(PointSet::EMPTY, |acc, (a, _)| acc.union(space.atoms()[a].points));
        let table = space
            .members()
            .iter()
            .zip(member_sums(&space, &finite))
            .map(|(&u, sum)| {
                if u.is_disjoint(infinite) {
                    ExtValue::from_rational(sum).expect("sum of non-negative weights")
                } else {
                    ExtValue::infinity()
                }
            })
            .collect::<Vec<ExtValue>>();
        // A weight under an infinite least neighbourhood is invisible to the
        // lattice; pin it to inf so equal valuations have equal weights.
        let weights = space
            .atoms()
            .iter()
            .zip(weights)
            .map(|(a, w)| {
                let outer = space.member_index(a.witness.outer).expect("witness sets are members");
                if table[outer].is_infinite() {
                    ExtValue::infinity()
                } else {
                    w
                }
            })
            .collect();
        Ok(Valuation { space, weights, table })
    }

    pub fn zero(space: Arc<PervinSpace>) -> Self {
        let weights = vec![ExtValue::zero(); space.atoms().len()];
        Self::from_atom_weights(space, weights).expect("arity matches")
    }

    /// Recovers atom weights from a bounded lattice table given in canonical
    /// member order. Each atom weight is `ν(U) - ν(V)` for the atom's
    /// crescent witness `U \ V`.
    pub fn from_lattice_table(space: Arc<PervinSpace>, table: Vec<ExtValue>) -> Result<Self, ValuationError> {
        let expected = space.members().len();
        if table.len() != expected {
            return Err(ValuationError::WrongArity {
                expected,
                got: table.len(),
            });
        }
        if let Some(i) = table.iter().position(ExtValue::is_infinite) {
            return Err(ValuationError::UnboundedInput(space.members()[i]));
        }
        check_axioms(&space, &table)?;
        let value = |set: PointSet| -> &BigRational {
            let i = space.member_index(set).expect("witness sets are members");
            table[i].finite().expect("bounded")
        };
        let weights: Vec<ExtValue> = space
            .atoms()
            .iter()
            .map(|a| {
                let w = value(a.witness.outer) - value(a.witness.inner);
                ExtValue::from_rational(w).expect("monotone tables give non-negative weights")
            })
            .collect();
        let valuation = Self::from_atom_weights(space, weights)?;
        debug_assert_eq!(valuation.table, table);
        Ok(valuation)
    }

    /// Like [`Valuation::from_lattice_table`], keyed by member. Every member
    /// must be present.
    pub fn from_lattice_entries<I>(space: Arc<PervinSpace>, entries: I) -> Result<Self, ValuationError>
    where
        I: IntoIterator<Item = (PointSet, ExtValue)>,
    {
        let mut table: Vec<Option<ExtValue>> = vec![None; space.members().len()];
        for (set, value) in entries {
            let i = space.member_index(set).ok_or(SpaceError::NotInLattice(set))?;
            table[i] = Some(value);
        }
        let table = table
            .into_iter()
            .enumerate()
            .map(|(i, v)| v.ok_or(ValuationError::MissingEntry(space.members()[i])))
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_lattice_table(space, table)
    }

    /// `δ_x(U) = 1` if `x ∈ U`, else `0`.
    pub fn dirac(space: Arc<PervinSpace>, point: usize) -> Result<Self, ValuationError> {
        if point >= space.len() {
            return Err(SpaceError::UnknownElement(format!("#{point}")).into());
        }
        let mut weights = vec![ExtValue::zero(); space.atoms().len()];
        weights[space.atom_of(point)] = ExtValue::one();
        Self::from_atom_weights(space, weights)
    }

    pub fn dirac_named(space: Arc<PervinSpace>, name: &str) -> Result<Self, ValuationError> {
        let point = space.point_index(name)?;
        Self::dirac(space, point)
    }

    pub fn space(&self) -> &Arc<PervinSpace> {
        &self.space
    }

    pub fn atom_weights(&self) -> &[ExtValue] {
        &self.weights
    }

    /// Values on the lattice, in canonical member order.
    pub fn lattice_table(&self) -> &[ExtValue] {
        &self.table
    }

    pub fn value(&self, set: PointSet) -> Option<&ExtValue> {
        self.space.member_index(set).map(|i| &self.table[i])
    }

    /// Value of a lattice member. Panics if `set` is not a member.
    pub fn at(&self, set: PointSet) -> &ExtValue {
        self.value(set)
            .unwrap_or_else(|| panic!("{set} is not a lattice member"))
    }

    /// Value of any union of atoms under the atom-weight extension.
    pub fn algebra_value(&self, set: PointSet) -> Result<ExtValue, ValuationError> {
        if !self.space.is_union_of_atoms(set) {
            return Err(SpaceError::NotInAlgebra(set).into());
        }
        Ok(self.space.atoms_in(set).map(|a| &self.weights[a]).sum())
    }

    pub fn total(&self) -> &ExtValue {
        self.table.last().expect("lattice contains the carrier")
    }

    pub fn is_bounded(&self) -> bool {
        self.total().is_finite()
    }

    pub fn is_zero(&self) -> bool {
        self.weights.iter().all(ExtValue::is_zero)
    }

    fn require_same_space(&self, other: &Valuation) -> Result<(), ValuationError> {
        if same_space(&self.space, &other.space) {
            Ok(())
        } else {
            Err(ValuationError::SpaceMismatch)
        }
    }

    /// `a·μ + b·ν`, atom-wise, with `0·inf = 0`.
    pub fn linear_combo(a: &ExtValue, mu: &Valuation, b: &ExtValue, nu: &Valuation) -> Result<Self, ValuationError> {
        mu.require_same_space(nu)?;
        let weights = mu
            .weights
            .iter()
            .zip(&nu.weights)
            .map(|(wm, wn)| &(a * wm) + &(b * wn))
            .collect();
        Self::from_atom_weights(mu.space.clone(), weights)
    }

    pub fn scale(&self, factor: &ExtValue) -> Valuation {
        let weights = self.weights.iter().map(|w| factor * w).collect();
        Self::from_atom_weights(self.space.clone(), weights).expect("arity matches")
    }

    /// `ν|U₀(U) = ν(U ∩ U₀)`.
    pub fn restrict(&self, u0: PointSet) -> Result<Valuation, ValuationError> {
        if !self.space.is_member(u0) {
            return Err(SpaceError::NotInLattice(u0).into());
        }
        let weights = self
            .space
            .atoms()
            .iter()
            .map(|a| {
                if a.points.is_subset(u0) {
                    self.weights[a.index].clone()
                } else {
                    ExtValue::zero()
                }
            })
            .collect();
        Self::from_atom_weights(self.space.clone(), weights)
    }

    /// Image valuation `f[ν](V) = ν(f⁻¹(V))` along `map`, which sends source
    /// point `i` to target point `map[i]`.
    pub fn image(&self, map: &[usize], target: Arc<PervinSpace>) -> Result<Valuation, ValuationError> {
        let source = &self.space;
        if map.len() != source.len() {
            return Err(ValuationError::WrongArity {
                expected: source.len(),
                got: map.len(),
            });
        }
        if let Some(&bad) = map.iter().find(|&&t| t >= target.len()) {
            return Err(ValuationError::BadMap(bad));
        }
        let preimage = |v: PointSet| PointSet::from_points((0..map.len()).filter(|&i| v.contains(map[i])));
        if let Some(&v) = target.members().iter().find(|&&v| !source.is_member(preimage(v))) {
            return Err(ValuationError::NotMorphism(v));
        }
        // A morphism sends each source atom into a single target atom.
        let mut weights = vec![ExtValue::zero(); target.atoms().len()];
        for atom in source.atoms() {
            let p = atom.points.first().expect("atoms are non-empty");
            let t = target.atom_of(map[p]);
            weights[t] = &weights[t] + &self.weights[atom.index];
        }
        Self::from_atom_weights(target, weights)
    }

    /// `μ ≤ ν` iff `μ(U) ≤ ν(U)` for every member `U`.
    pub fn stochastic_leq(&self, other: &Valuation) -> Result<bool, ValuationError> {
        self.require_same_space(other)?;
        Ok(self.table.iter().zip(&other.table).all(|(a, b)| a <= b))
    }

    /// Value of the unique extension of a bounded valuation on an algebra
    /// element, `Σᵢ ν(Uᵢ) - ν(Vᵢ)` over its crescents.
    pub fn sht_extend(&self, element: &AlgebraElement) -> Result<ExtValue, ValuationError> {
        if !self.is_bounded() {
            return Err(ValuationError::UnboundedValuation);
        }
        let finite = |set: PointSet| self.at(set).finite().expect("bounded").clone();
        let total = element
            .pieces()
            .iter()
            .fold(BigRational::zero(), |acc, c| acc + finite(c.outer) - finite(c.inner));
        Ok(ExtValue::from_rational(total).expect("monotone valuation"))
    }

    /// Atom weights as signed rationals, if bounded.
    pub fn signed_weights(&self) -> Result<Vec<SignedRational>, ValuationError> {
        self.weights
            .iter()
            .map(|w| w.to_signed().map_err(|_| ValuationError::UnboundedValuation))
            .collect()
    }
}

/// Checks strictness, then monotonicity, then modularity of a table given in
/// canonical member order. Pairs are scanned lexicographically by member
/// index, so the reported witness is the first failing pair.
pub fn check_axioms(space: &PervinSpace, table: &[ExtValue]) -> Result<(), AxiomViolation> {
    let members = space.members();
    assert_eq!(members.len(), table.len(), "table must cover the lattice");
    if !table[0].is_zero() {
        return Err(AxiomViolation {
            axiom: Axiom::Strict,
            left: PointSet::EMPTY,
            right: PointSet::EMPTY,
        });
    }
    for (i, &u) in members.iter().enumerate() {
        for (j, &v) in members.iter().enumerate() {
            if u.is_subset(v) && table[i] > table[j] {
                return Err(AxiomViolation {
                    axiom: Axiom::Monotone,
                    left: u,
                    right: v,
                });
            }
        }
    }
    let at = |s: PointSet| &table[space.member_index(s).expect("lattice is closed")];
    for (i, &u) in members.iter().enumerate() {
        for (j, &v) in members.iter().enumerate().skip(i + 1) {
            if &table[i] + &table[j] != at(u.union(v)) + at(u.intersection(v)) {
                return Err(AxiomViolation {
                    axiom: Axiom::Modular,
                    left: u,
                    right: v,
                });
            }
        }
    }
    Ok(())
}

/// A strict modular map from the lattice to finite signed rationals, stored
/// by atom weights.
#[derive(Debug, Clone)]
pub struct SignedValuation {
    space: Arc<PervinSpace>,
    weights: Vec<SignedRational>,
    table: Vec<SignedRational>,
}

impl PartialEq for SignedValuation {
    fn eq(&self, other: &Self) -> bool {
        same_space(&self.space, &other.space) && self.weights == other.weights
    }
}

impl Eq for SignedValuation {}

impl SignedValuation {
    pub fn from_atom_weights(space: Arc<PervinSpace>, weights: Vec<SignedRational>) -> Result<Self, ValuationError> {
        let expected = space.atoms().len();
        if weights.len() != expected {
            return Err(ValuationError::WrongArity {
                expected,
                got: weights.len(),
            });
        }
        let raw: Vec<BigRational> = weights.iter().map(|w| w.value().clone()).collect();
        let table = member_sums(&space, &raw).into_iter().map(SignedRational::new).collect();
        Ok(SignedValuation { space, weights, table })
    }

    /// `ν - r·μ` for bounded `ν`, `μ` and `r ≥ 0`.
    pub fn from_pair(nu: &Valuation, r: &SignedRational, mu: &Valuation) -> Result<Self, ValuationError> {
        nu.require_same_space(mu)?;
        if r.is_negative() {
            return Err(ValuationError::NegativeScalar(r.clone()));
        }
        let wn = nu.signed_weights()?;
        let wm = mu.signed_weights()?;
        let weights = wn.iter().zip(&wm).map(|(n, m)| n - &r.scale(m)).collect();
        Self::from_atom_weights(nu.space.clone(), weights)
    }

    pub fn space(&self) -> &Arc<PervinSpace> {
        &self.space
    }

    pub fn atom_weights(&self) -> &[SignedRational] {
        &self.weights
    }

    pub fn lattice_table(&self) -> &[SignedRational] {
        &self.table
    }

    pub fn value(&self, set: PointSet) -> Option<&SignedRational> {
        self.space.member_index(set).map(|i| &self.table[i])
    }

    /// Panics if `set` is not a member.
    pub fn at(&self, set: PointSet) -> &SignedRational {
        self.value(set)
            .unwrap_or_else(|| panic!("{set} is not a lattice member"))
    }

    /// Extension to the algebra through the crescent formula
    /// `ς(U \ V) = ς(U) - ς(U ∩ V)`.
    pub fn extend(&self, element: &AlgebraElement) -> SignedRational {
        element
            .pieces()
            .iter()
            .map(|c| self.at(c.outer) - self.at(c.outer.intersection(c.inner)))
            .sum()
    }

    /// Sum of atom weights inside a union of atoms.
    pub fn algebra_value(&self, set: PointSet) -> Result<SignedRational, ValuationError> {
        if !self.space.is_union_of_atoms(set) {
            return Err(SpaceError::NotInAlgebra(set).into());
        }
        Ok(self.space.atoms_in(set).map(|a| &self.weights[a]).sum())
    }
}

/// A monotone chain of members with union `X`, each of finite mass for both
/// valuations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SigmaFinitenessWitness {
    pub chain: Vec<PointSet>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("valuations are not jointly sigma-finite")]
pub struct NotSigmaFinite;

/// On a finite lattice every monotone chain of members stabilizes, so a
/// chain exhausting `X` ends at `X` and joint σ-finiteness is joint
/// boundedness. The witness is then the one-element chain `[X]`.
pub fn sigma_finite_witness(nu: &Valuation, mu: &Valuation) -> Result<SigmaFinitenessWitness, NotSigmaFinite> {
    if nu.is_bounded() && mu.is_bounded() {
        Ok(SigmaFinitenessWitness {
            chain: vec![nu.space.full()],
        })
    } else {
        Err(NotSigmaFinite)
    }
}
