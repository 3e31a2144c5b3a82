//! Absolute continuity, Hahn decomposition witnesses and Radon-Nikodym
//! densities on finite Pervin spaces.
//!
//! For bounded `ν`, `μ` a lower semicontinuous density `g` with `ν = g·μ`
//! exists iff `ν` is absolutely continuous with respect to `μ` and every
//! `ν - r·μ`, `r ≥ 0`, has a Hahn witness. [`density_synthesize`] follows
//! that construction; [`density_oracle`] answers the same question directly
//! from atom ratios and is used to cross-check it.
//!
//! Reductions used on finite lattices:
//!
//! * Absolute continuity in ε–η form is equivalent to the null-set form
//!   (take η as the least positive `μ`-value below `U₀`), scoped to members
//!   of finite `ν`-mass.
//! * A member `U` is a Hahn witness for `ς` iff every atom inside has
//!   `ς ≥ 0` and every atom outside has `ς ≤ 0`, since crescents are unions
//!   of atoms and atoms are crescents.
//! * Witnesses are closed under union, so the union of all witnesses is the
//!   canonical (largest) one.
//! * The sign pattern of `ν(a) - r·μ(a)` only changes at atom ratios
//!   `ν(a)/μ(a)`, so checking `r` at the ratios, the midpoints between them
//!   and one point above the largest covers all of `[0, ∞[`.
//! * The σ-finiteness chain `E_n` is just `[X]`, so the construction runs
//!   with `n` fixed to 0.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::choquet::{gmul, lsc_check, ChoquetError, LscFunction};
use crate::exreal::{ExtValue, SignedRational};
use crate::pervin::{PervinSpace, PointSet};
use crate::valuation::{same_space, sigma_finite_witness, SignedValuation, Valuation, ValuationError};

/// Upper bound on assignments tried by [`density_oracle`].
pub const ORACLE_SEARCH_CAP: u64 = 1 << 22;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RadonError {
    #[error("valuations live on different spaces")]
    SpaceMismatch,
    #[error("valuations are not jointly sigma-finite (some total mass is infinite)")]
    NotSigmaFinite,
    #[error("valuation is unbounded")]
    UnboundedValuation,
    #[error(transparent)]
    Choquet(#[from] ChoquetError),
    #[error(transparent)]
    Valuation(#[from] ValuationError),
    #[error("density construction produced an invalid result: {0}")]
    ConstructionFailed(String),
    #[error("oracle search space of {0} assignments exceeds the cap")]
    OracleTooLarge(u64),
}

/// `U ⊆ U₀` with `ν(U₀) < ∞`, `μ(U) = 0` and `ν(U) > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AbsContViolation {
    pub within: PointSet,
    pub null_set: PointSet,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbsContVerdict {
    pub holds: bool,
    pub violation: Option<AbsContViolation>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HahnWitness {
    pub r: SignedRational,
    pub witness: Option<PointSet>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NoDensityReason {
    AcFails(AbsContViolation),
    /// `ν - r·μ` has no Hahn witness.
    HahnFails {
        r: SignedRational,
    },
    /// Oracle only: a `μ`-null atom carries `ν`-mass.
    MassOnNullAtom {
        atom: usize,
    },
    /// Oracle only: no assignment on `μ`-null atoms makes the atom ratios
    /// lower semicontinuous.
    NoLscAssignment,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DensityResult {
    Density(LscFunction),
    NoDensity(NoDensityReason),
}

impl DensityResult {
    pub fn is_density(&self) -> bool {
        matches!(self, DensityResult::Density(_))
    }

    pub fn density(&self) -> Option<&LscFunction> {
        match self {
            DensityResult::Density(g) => Some(g),
            DensityResult::NoDensity(_) => None,
        }
    }
}

fn require_same_space(a: &Valuation, b: &Valuation) -> Result<(), RadonError> {
    if same_space(a.space(), b.space()) {
        Ok(())
    } else {
        Err(RadonError::SpaceMismatch)
    }
}

fn require_bounded(v: &Valuation) -> Result<(), RadonError> {
    if v.is_bounded() {
        Ok(())
    } else {
        Err(RadonError::UnboundedValuation)
    }
}

/// Null-set form of absolute continuity: every member `U` inside some `U₀`
/// of finite `ν`-mass with `μ(U) = 0` has `ν(U) = 0`. The reported violation
/// is the first offending member, taken as its own `U₀`.
pub fn abs_continuous(nu: &Valuation, mu: &Valuation) -> Result<AbsContVerdict, RadonError> {
    require_same_space(nu, mu)?;
    let bad = nu
        .space()
        .members()
        .iter()
        .zip(nu.lattice_table().iter().zip(mu.lattice_table()))
        .find(|(_, (n, m))| m.is_zero() && n.is_finite() && !n.is_zero())
        .map(|(&u, _)| AbsContViolation { within: u, null_set: u });
    Ok(AbsContVerdict {
        holds: bad.is_none(),
        violation: bad,
    })
}

/// Atom-level witness test: atoms inside `set` have `ς ≥ 0`, atoms outside
/// have `ς ≤ 0`.
pub fn is_hahn_witness(sigma: &SignedValuation, set: PointSet) -> bool {
    let space = sigma.space();
    space.is_member(set)
        && space.atoms().iter().all(|a| {
            let w = &sigma.atom_weights()[a.index];
            if a.points.is_subset(set) {
                !w.is_negative()
            } else {
                !w.is_positive()
            }
        })
}

/// Witness test straight from the definition, over all crescents `W \ V`
/// with `V ⊆ W` members. Quadratic in the lattice size.
pub fn is_hahn_witness_by_crescents(sigma: &SignedValuation, set: PointSet) -> bool {
    let space = sigma.space();
    if !space.is_member(set) {
        return false;
    }
    let members = space.members();
    members.iter().all(|&outer| {
        members.iter().filter(|v| v.is_subset(outer)).all(|&inner| {
            let c = outer.difference(inner);
            let value = sigma.at(outer) - sigma.at(inner);
            let inside_ok = !c.is_subset(set) || !value.is_negative();
            let outside_ok = !c.is_disjoint(set) || !value.is_positive();
            inside_ok && outside_ok
        })
    })
}

/// Union of all Hahn witnesses found by exhaustive search over the
/// lattice, or `None` if there is none.
pub fn hahn_witness(sigma: &SignedValuation) -> Option<PointSet> {
    sigma
        .space()
        .members()
        .iter()
        .filter(|&&u| is_hahn_witness(sigma, u))
        .fold(None, |acc: Option<PointSet>, &u| Some(acc.map_or(u, |a| a.union(u))))
}

/// Distinct ratios `ν(a)/μ(a)` over atoms with `μ(a) > 0`, together with 0,
/// the midpoints between consecutive values and the largest value plus 1/2.
pub fn threshold_grid(nu: &Valuation, mu: &Valuation) -> Result<Vec<SignedRational>, RadonError> {
    require_same_space(nu, mu)?;
    require_bounded(nu)?;
    require_bounded(mu)?;
    let mut points: BTreeSet<BigRational> = BTreeSet::new();
    points.insert(BigRational::zero());
    for (wn, wm) in nu.atom_weights().iter().zip(mu.atom_weights()) {
        if !wm.is_zero() {
            points.insert(wn.finite().expect("bounded") / wm.finite().expect("bounded"));
        }
    }
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let sorted: Vec<BigRational> = points.iter().cloned().collect();
    for pair in sorted.windows(2) {
        points.insert((&pair[0] + &pair[1]) * &half);
    }
    points.insert(sorted.last().expect("contains 0") + &half);
    Ok(points.into_iter().map(SignedRational::new).collect())
}

/// Hahn verdict for `ν - r·μ` at every grid point.
pub fn hahn_grid(nu: &Valuation, mu: &Valuation) -> Result<Vec<HahnWitness>, RadonError> {
    threshold_grid(nu, mu)?
        .into_iter()
        .map(|r| {
            let sigma = SignedValuation::from_pair(nu, &r, mu)?;
            Ok(HahnWitness {
                witness: hahn_witness(&sigma),
                r,
            })
        })
        .collect()
}

/// Builds a density through Hahn witnesses: `V_q` is the union of the
/// witnesses at grid values `≥ q` and `g(x)` is the largest grid value `q`
/// with `x ∈ V_q`, or 0.
pub fn density_synthesize(nu: &Valuation, mu: &Valuation) -> Result<DensityResult, RadonError> {
    require_same_space(nu, mu)?;
    let chain = sigma_finite_witness(nu, mu).map_err(|_| RadonError::NotSigmaFinite)?;
    debug_assert_eq!(chain.chain, vec![nu.space().full()]);

    let grid = hahn_grid(nu, mu)?;
    let mut witnesses = Vec::with_capacity(grid.len());
    for HahnWitness { r, witness } in grid {
        match witness {
            Some(u) => witnesses.push((r, u)),
            None => return Ok(DensityResult::NoDensity(NoDensityReason::HahnFails { r })),
        }
    }
    let ac = abs_continuous(nu, mu)?;
    if let Some(v) = ac.violation {
        return Ok(DensityResult::NoDensity(NoDensityReason::AcFails(v)));
    }

    // Grid is ascending; sweep from the top accumulating V_q.
    let space = nu.space().clone();
    let mut values: Vec<Option<SignedRational>> = vec![None; space.len()];
    let mut level = PointSet::EMPTY;
    for (q, u) in witnesses.iter().rev() {
        level = level.union(*u);
        for p in level.points() {
            values[p].get_or_insert_with(|| q.clone());
        }
    }
    let values: Vec<ExtValue> = values
        .into_iter()
        .map(|v| v.and_then(|q| q.to_ext()).unwrap_or_else(ExtValue::zero))
        .collect();
    let g = lsc_check(space, values).map_err(|e| RadonError::ConstructionFailed(e.to_string()))?;
    let check = verify_density(&g, mu, nu)?;
    if !check.holds {
        return Err(RadonError::ConstructionFailed(format!(
            "g·μ differs from ν on {:?}",
            check.discrepancy
        )));
    }
    Ok(DensityResult::Density(g))
}

/// Direct density search: `g(a) = ν(a)/μ(a)` on `μ`-positive atoms is
/// forced; `μ`-null atoms must be `ν`-null and take values from
/// `{0} ∪ {ratios}`, tried exhaustively in lexicographic order until the
/// function is lower semicontinuous.
pub fn density_oracle(nu: &Valuation, mu: &Valuation) -> Result<DensityResult, RadonError> {
    require_same_space(nu, mu)?;
    require_bounded(nu)?;
    require_bounded(mu)?;
    let space = nu.space().clone();
    let atoms = space.atoms().len();

    let mut forced: Vec<Option<BigRational>> = vec![None; atoms];
    let mut free = Vec::new();
    for (a, (wn, wm)) in nu.atom_weights().iter().zip(mu.atom_weights()).enumerate() {
        let wn = wn.finite().expect("bounded");
        let wm = wm.finite().expect("bounded");
        if wm.is_zero() {
            if !wn.is_zero() {
                return Ok(DensityResult::NoDensity(NoDensityReason::MassOnNullAtom { atom: a }));
            }
            free.push(a);
        } else {
            forced[a] = Some(wn / wm);
        }
    }
    let mut candidates: Vec<BigRational> = forced.iter().flatten().cloned().collect();
    candidates.push(BigRational::zero());
    candidates.sort();
    candidates.dedup();

    let combos = (candidates.len() as u64)
        .checked_pow(free.len() as u32)
        .filter(|&c| c <= ORACLE_SEARCH_CAP)
        .ok_or(RadonError::OracleTooLarge(u64::MAX))?;

    let mut choice = vec![0usize; free.len()];
    for _ in 0..combos {
        let mut atom_values: Vec<ExtValue> = forced
            .iter()
            .map(|v| {
                v.clone().map_or_else(ExtValue::zero, |r| {
                    ExtValue::from_rational(r).expect("ratio of non-negatives")
                })
            })
            .collect();
        for (slot, &a) in free.iter().enumerate() {
            atom_values[a] = ExtValue::from_rational(candidates[choice[slot]].clone()).expect("non-negative");
        }
        if let Ok(g) = LscFunction::from_atom_values(space.clone(), atom_values) {
            if verify_density(&g, mu, nu)?.holds {
                return Ok(DensityResult::Density(g));
            }
        }
        // Odometer, last free atom fastest.
        for slot in (0..choice.len()).rev() {
            choice[slot] += 1;
            if choice[slot] < candidates.len() {
                break;
            }
            choice[slot] = 0;
        }
    }
    Ok(DensityResult::NoDensity(NoDensityReason::NoLscAssignment))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Discrepancy {
    pub set: PointSet,
    pub expected: ExtValue,
    pub actual: ExtValue,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DensityCheck {
    pub holds: bool,
    pub discrepancy: Option<Discrepancy>,
}

/// Compares `ν(U)` with `(g·μ)(U)` on every member, reporting the first
/// difference.
pub fn verify_density(g: &LscFunction, mu: &Valuation, nu: &Valuation) -> Result<DensityCheck, RadonError> {
    require_same_space(nu, mu)?;
    let density = gmul(g, mu)?;
    let discrepancy = nu
        .space()
        .members()
        .iter()
        .zip(nu.lattice_table().iter().zip(density.lattice_table()))
        .find(|(_, (n, d))| n != d)
        .map(|(&set, (n, d))| Discrepancy {
            set,
            expected: n.clone(),
            actual: d.clone(),
        });
    Ok(DensityCheck {
        holds: discrepancy.is_none(),
        discrepancy,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelSetWitness {
    pub r: SignedRational,
    pub level_set: PointSet,
    pub valid: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForwardReport {
    pub density: Valuation,
    pub abs_continuous: AbsContVerdict,
    pub witnesses: Vec<LevelSetWitness>,
}

impl ForwardReport {
    pub fn holds(&self) -> bool {
        self.abs_continuous.holds && self.witnesses.iter().all(|w| w.valid)
    }
}

/// With `ν = g·μ`: `ν` is absolutely continuous with respect to `μ`, and at
/// every grid `r` the level set `g⁻¹(]r, ∞])` is a Hahn witness for
/// `ν - r·μ`.
pub fn forward_direction_check(g: &LscFunction, mu: &Valuation) -> Result<ForwardReport, RadonError> {
    require_bounded(mu)?;
    let nu = gmul(g, mu)?;
    require_bounded(&nu)?;
    let abs = abs_continuous(&nu, mu)?;
    let witnesses = threshold_grid(&nu, mu)?
        .into_iter()
        .map(|r| {
            let sigma = SignedValuation::from_pair(&nu, &r, mu)?;
            let level_set = g.level_set(&r.to_ext().expect("grid is non-negative"));
            Ok(LevelSetWitness {
                valid: is_hahn_witness(&sigma, level_set),
                level_set,
                r,
            })
        })
        .collect::<Result<Vec<_>, RadonError>>()?;
    Ok(ForwardReport {
        density: nu,
        abs_continuous: abs,
        witnesses,
    })
}

/// The two-point space `{s0, s1}` with lattice `{∅, {s1}, X}`, counting
/// measure `μ` and `ν = g·μ` for the antitone `g = (1, 0)`, which has no
/// lower semicontinuous density.
pub fn sierpinski_no_density() -> (Arc<PervinSpace>, Valuation, Valuation) {
    let space =
        Arc::new(PervinSpace::close_named(&["s0", "s1"], &[vec!["s1"]], Default::default()).expect("two points"));
    let mu = Valuation::from_atom_weights(space.clone(), vec![ExtValue::one(), ExtValue::one()]).expect("two atoms");
    let nu = Valuation::from_atom_weights(space.clone(), vec![ExtValue::one(), ExtValue::zero()]).expect("two atoms");
    (space, nu, mu)
}

/// Points `z, x1, …, x_depth` standing for `0` and `1/2ⁿ`; a member
/// containing `z` must contain `x_depth`. `μ = δ_z + Σ 2⁻ⁿ δ_{xₙ}` and
/// `ν = δ_z`.
pub fn halfpow_no_density(depth: usize) -> Result<(Arc<PervinSpace>, Valuation, Valuation), RadonError> {
    assert!(depth >= 1, "depth must be positive");
    let mut names = vec!["z".to_string()];
    names.extend((1..=depth).map(|n| format!("x{n}")));
    let mut generators: Vec<PointSet> = (1..=depth).map(PointSet::singleton).collect();
    generators.push(PointSet::from_points([0, depth]));
    let space = Arc::new(
        PervinSpace::close(names, &generators, Default::default()).map_err(|e| RadonError::Valuation(e.into()))?,
    );
    let mut mu_weights = vec![ExtValue::zero(); space.atoms().len()];
    let mut nu_weights = mu_weights.clone();
    mu_weights[space.atom_of(0)] = ExtValue::one();
    nu_weights[space.atom_of(0)] = ExtValue::one();
    for n in 1..=depth {
        mu_weights[space.atom_of(n)] =
            ExtValue::from_rational(BigRational::new(BigInt::one(), BigInt::one() << n)).expect("positive");
    }
    let mu = Valuation::from_atom_weights(space.clone(), mu_weights)?;
    let nu = Valuation::from_atom_weights(space.clone(), nu_weights)?;
    Ok((space, nu, mu))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pervin::Limits;

    fn ev(s: &str) -> ExtValue {
        s.parse().unwrap()
    }

    fn evs(v: &[&str]) -> Vec<ExtValue> {
        v.iter().map(|s| ev(s)).collect()
    }

    fn sr(s: &str) -> SignedRational {
        s.parse().unwrap()
    }

    fn sierpinski() -> Arc<PervinSpace> {
        Arc::new(PervinSpace::close_named(&["s0", "s1"], &[vec!["s1"]], Limits::default()).unwrap())
    }

    fn powerset(n: usize) -> Arc<PervinSpace> {
        let elements: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
        let gens: Vec<PointSet> = (0..n).map(PointSet::singleton).collect();
        Arc::new(PervinSpace::close(elements, &gens, Limits::default()).unwrap())
    }

    fn weights(space: &Arc<PervinSpace>, w: &[&str]) -> Valuation {
        Valuation::from_atom_weights(space.clone(), evs(w)).unwrap()
    }

    #[test]
    fn abs_continuous_examples() {
        let s = sierpinski();
        let mu = weights(&s, &["1", "1"]);
        assert!(abs_continuous(&mu, &mu).unwrap().holds);
        let nu = weights(&s, &["1", "0"]);
        assert!(abs_continuous(&nu, &mu).unwrap().holds);

        let p = powerset(2);
        let d1 = Valuation::dirac(p.clone(), 1).unwrap();
        let d0 = Valuation::dirac(p.clone(), 0).unwrap();
        let verdict = abs_continuous(&d1, &d0).unwrap();
        assert!(!verdict.holds);
        let v = verdict.violation.unwrap();
        assert_eq!(v.null_set, PointSet::singleton(1));
        assert!(v.null_set.is_subset(v.within));
        assert!(d0.at(v.null_set).is_zero() && !d1.at(v.null_set).is_zero());
    }

    #[test]
    fn abs_continuity_ignores_sets_of_infinite_mass() {
        let s = sierpinski();
        let mu = weights(&s, &["0", "1"]);
        let nu = weights(&s, &["inf", "0"]);
        // The only μ-null member is ∅; X has infinite ν-mass.
        assert!(abs_continuous(&nu, &mu).unwrap().holds);
    }

    /// ε–η form, sampled: η is the least positive μ-value below U₀ and ε runs
    /// over fixed samples plus every positive ν-value below U₀.
    fn eps_eta_holds(nu: &Valuation, mu: &Valuation) -> bool {
        let space = nu.space();
        let eps_samples = ["1/1000", "1/7", "1/2", "1", "3", "100"];
        space.members().iter().filter(|&&u0| nu.at(u0).is_finite()).all(|&u0| {
            let below: Vec<PointSet> = space.members().iter().copied().filter(|u| u.is_subset(u0)).collect();
            let eta = below
                .iter()
                .map(|&u| mu.at(u).clone())
                .filter(|m| !m.is_zero())
                .min()
                .unwrap_or_else(ExtValue::one);
            let critical = below.iter().map(|&u| nu.at(u).clone()).filter(|v| !v.is_zero());
            eps_samples
                .iter()
                .map(|e| ev(e))
                .chain(critical)
                .all(|eps| below.iter().all(|&u| mu.at(u) >= &eta || nu.at(u) < &eps))
        })
    }

    #[test]
    fn eps_eta_sampler_agrees_with_null_set_criterion() {
        let p = powerset(3);
        let cases = [
            (["1", "0", "2"], ["1", "1", "1"]),
            (["1", "1/2000", "0"], ["1", "0", "3"]),
            (["0", "0", "0"], ["0", "0", "0"]),
            (["5", "0", "0"], ["1/3", "0", "1"]),
            (["0", "2", "0"], ["1", "0", "1"]),
        ];
        for (n, m) in cases {
            let nu = weights(&p, &n);
            let mu = weights(&p, &m);
            assert_eq!(
                abs_continuous(&nu, &mu).unwrap().holds,
                eps_eta_holds(&nu, &mu),
                "{n:?} {m:?}"
            );
        }
    }

    #[test]
    fn hahn_witness_examples() {
        let s = sierpinski();
        let zero = SignedValuation::from_atom_weights(s.clone(), vec![sr("0"), sr("0")]).unwrap();
        assert_eq!(hahn_witness(&zero), Some(s.full()));
        assert!(is_hahn_witness(&zero, PointSet::EMPTY));

        let p = powerset(3);
        let sigma = SignedValuation::from_atom_weights(p.clone(), vec![sr("1"), sr("-2"), sr("1/3")]).unwrap();
        assert_eq!(hahn_witness(&sigma), Some(PointSet::from_bits(0b101)));

        let nu = weights(&s, &["1", "0"]);
        let mu = weights(&s, &["1", "1"]);
        let sigma = SignedValuation::from_pair(&nu, &sr("1/2"), &mu).unwrap();
        assert_eq!(sigma.atom_weights(), &[sr("1/2"), sr("-1/2")]);
        assert_eq!(hahn_witness(&sigma), None);
        for &u in s.members() {
            assert!(!is_hahn_witness_by_crescents(&sigma, u));
        }
    }

    #[test]
    fn hahn_grid_examples() {
        let (_, nu, mu) = sierpinski_no_density();
        let grid = hahn_grid(&nu, &mu).unwrap();
        let rs: Vec<SignedRational> = grid.iter().map(|w| w.r.clone()).collect();
        assert_eq!(rs, vec![sr("0"), sr("1/2"), sr("1"), sr("3/2")]);
        assert_eq!(grid[1].witness, None);
        assert!(grid[0].witness.is_some() && grid[2].witness.is_some() && grid[3].witness.is_some());

        let s = sierpinski();
        let mu = weights(&s, &["2", "1/3"]);
        assert!(hahn_grid(&mu, &mu).unwrap().iter().all(|w| w.witness.is_some()));

        let p = powerset(3);
        let nu = weights(&p, &["1", "5", "0"]);
        let mu = weights(&p, &["2", "1", "1"]);
        assert!(hahn_grid(&nu, &mu).unwrap().iter().all(|w| w.witness.is_some()));

        let unbounded = weights(&s, &["inf", "1"]);
        assert_eq!(
            hahn_grid(&unbounded, &weights(&s, &["1", "1"])),
            Err(RadonError::UnboundedValuation)
        );
    }

    #[test]
    fn synthesize_examples() {
        let s = sierpinski();
        let mu = weights(&s, &["1", "1"]);
        let nu = Valuation::from_lattice_table(s.clone(), evs(&["0", "2", "2"])).unwrap();
        let result = density_synthesize(&nu, &mu).unwrap();
        assert_eq!(result.density().unwrap().values(), evs(&["0", "2"]));
        assert!(density_oracle(&nu, &mu).unwrap().is_density());

        let (_, nu, mu) = sierpinski_no_density();
        assert_eq!(
            density_synthesize(&nu, &mu).unwrap(),
            DensityResult::NoDensity(NoDensityReason::HahnFails { r: sr("1/2") })
        );
        assert!(!density_oracle(&nu, &mu).unwrap().is_density());

        let (_, nu, mu) = halfpow_no_density(3).unwrap();
        assert_eq!(nu.space().atoms().len(), 4);
        assert_eq!(mu.atom_weights(), evs(&["1", "1/2", "1/4", "1/8"]));
        assert!(abs_continuous(&nu, &mu).unwrap().holds);
        match density_synthesize(&nu, &mu).unwrap() {
            DensityResult::NoDensity(NoDensityReason::HahnFails { r }) => {
                assert!(r.is_positive() && r < sr("1"));
            }
            other => panic!("{other:?}"),
        }
        assert!(!density_oracle(&nu, &mu).unwrap().is_density());
    }

    #[test]
    fn synthesize_rejects_unbounded_and_mismatched_inputs() {
        let s = sierpinski();
        let mu = weights(&s, &["1", "1"]);
        let inf = weights(&s, &["inf", "1"]);
        assert_eq!(density_synthesize(&inf, &mu), Err(RadonError::NotSigmaFinite));
        assert_eq!(density_oracle(&inf, &mu), Err(RadonError::UnboundedValuation));
        let p = powerset(2);
        assert_eq!(
            density_synthesize(&weights(&p, &["1", "1"]), &mu),
            Err(RadonError::SpaceMismatch)
        );
    }

    #[test]
    fn oracle_examples() {
        let s = sierpinski();
        let mu = weights(&s, &["1", "1"]);
        let zero = Valuation::zero(s.clone());
        assert_eq!(
            density_oracle(&zero, &mu).unwrap().density().unwrap(),
            &LscFunction::zero(s.clone())
        );

        let p = powerset(3);
        let nu = weights(&p, &["3", "0", "1/5"]);
        let mu = weights(&p, &["1", "2", "1/5"]);
        let g = density_oracle(&nu, &mu).unwrap();
        assert_eq!(g.density().unwrap().values(), evs(&["3", "0", "1"]));
    }

    #[test]
    fn null_atoms_may_need_positive_density_values() {
        // μ = ν = δ_s0 on Sierpiński space: g = (1, 0) is not lsc, g = (1, 1) is.
        let s = sierpinski();
        let d = Valuation::dirac(s.clone(), 0).unwrap();
        let oracle = density_oracle(&d, &d).unwrap();
        assert_eq!(oracle.density().unwrap().values(), evs(&["1", "1"]));
        let synth = density_synthesize(&d, &d).unwrap();
        assert!(verify_density(synth.density().unwrap(), &d, &d).unwrap().holds);
    }

    #[test]
    fn lattice_ac_without_density() {
        // μ = δ_s1, ν = δ_s0: no member is μ-null except ∅, yet s0 carries
        // ν-mass on a μ-null atom.
        let s = sierpinski();
        let mu = Valuation::dirac(s.clone(), 1).unwrap();
        let nu = Valuation::dirac(s.clone(), 0).unwrap();
        assert!(abs_continuous(&nu, &mu).unwrap().holds);
        assert_eq!(
            density_synthesize(&nu, &mu).unwrap(),
            DensityResult::NoDensity(NoDensityReason::HahnFails { r: sr("1/2") })
        );
        assert_eq!(
            density_oracle(&nu, &mu).unwrap(),
            DensityResult::NoDensity(NoDensityReason::MassOnNullAtom { atom: 0 })
        );
    }

    #[test]
    fn verify_density_examples() {
        let s = sierpinski();
        let mu = weights(&s, &["1", "1"]);
        let nu = Valuation::from_lattice_table(s.clone(), evs(&["0", "2", "2"])).unwrap();
        let g = density_synthesize(&nu, &mu).unwrap().density().unwrap().clone();
        assert!(verify_density(&g, &mu, &nu).unwrap().holds);

        let bumped = lsc_check(s.clone(), evs(&["0", "3"])).unwrap();
        let check = verify_density(&bumped, &mu, &nu).unwrap();
        assert!(!check.holds);
        let d = check.discrepancy.unwrap();
        assert_eq!(d.set, PointSet::from_bits(0b10));
        assert_eq!((d.expected, d.actual), (ev("2"), ev("3")));

        let zero = Valuation::zero(s.clone());
        assert!(verify_density(&LscFunction::zero(s), &zero, &zero).unwrap().holds);
    }

    #[test]
    fn forward_direction_examples() {
        let s = sierpinski();
        let mu = weights(&s, &["1", "1"]);
        let g = lsc_check(s.clone(), evs(&["0", "2"])).unwrap();
        let report = forward_direction_check(&g, &mu).unwrap();
        assert!(report.holds());
        let at_one = report.witnesses.iter().find(|w| w.r == sr("1")).unwrap();
        assert_eq!(at_one.level_set, PointSet::from_bits(0b10));
        assert!(at_one.valid);

        let zero = forward_direction_check(&LscFunction::zero(s.clone()), &mu).unwrap();
        assert!(zero.density.is_zero());
        assert!(zero.holds());
        assert!(zero.witnesses.iter().all(|w| w.level_set.is_empty()));
    }

    #[test]
    fn shipped_counterexamples_for_all_depths() {
        for depth in 1..=8 {
            let (space, nu, mu) = halfpow_no_density(depth).unwrap();
            assert_eq!(space.len(), depth + 1);
            assert!(abs_continuous(&nu, &mu).unwrap().holds);
            assert!(!density_synthesize(&nu, &mu).unwrap().is_density());
            assert!(!density_oracle(&nu, &mu).unwrap().is_density());
        }
    }
}
