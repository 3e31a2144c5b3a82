//! Lower semicontinuous functions and Choquet integration.
//!
//! An [`LscFunction`] maps points to `Q+ ∪ {inf}` so that every strict upper
//! level set `h⁻¹(]t, inf])` is a lattice member. On a finite carrier the map
//! `t ↦ ν(h⁻¹(]t, inf]))` is a right-continuous step function with finitely
//! many steps, so the Choquet integral is the finite sum
//!
//! ```text
//! Σᵢ (tᵢ - tᵢ₋₁) · ν(h⁻¹(]tᵢ₋₁, inf]))  +  inf · ν(h⁻¹(inf))
//! ```
//!
//! over the distinct finite values `0 = t₀ < t₁ < … < t_k` of `h`. The
//! dyadic Darboux sums in [`lower_darboux_sum`] approach the same value from
//! below.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::exreal::ExtValue;
use crate::pervin::{AlgebraElement, PervinSpace, PointSet, SpaceError};
use crate::valuation::{same_space, Valuation, ValuationError};

/// A strict upper level set that is not a lattice member. It is the level
/// set for every threshold in `[lower, upper[`.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("level set {level_set} for thresholds in [{lower}, {upper}[ is not a lattice member")]
pub struct NotLsc {
    pub lower: ExtValue,
    pub upper: ExtValue,
    pub level_set: PointSet,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChoquetError {
    #[error(transparent)]
    NotLsc(Box<NotLsc>),
    #[error(transparent)]
    Valuation(#[from] ValuationError),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error("objects live on different spaces")]
    SpaceMismatch,
    #[error("expected {expected} values, got {got}")]
    WrongArity { expected: usize, got: usize },
    #[error("functional table lacks the characteristic map of {0}")]
    MissingCharacteristic(PointSet),
    #[error("functional is not linear: {0}")]
    NotLinear(String),
}

#[derive(Debug, Clone)]
pub struct LscFunction {
    space: Arc<PervinSpace>,
    values: Vec<ExtValue>,
}

impl PartialEq for LscFunction {
    fn eq(&self, other: &Self) -> bool {
        same_space(&self.space, &other.space) && self.values == other.values
    }
}

impl Eq for LscFunction {}

/// Distinct finite values in ascending order, and whether `inf` occurs.
fn distinct_values(values: &[ExtValue]) -> (Vec<BigRational>, bool) {
    let finite: BTreeSet<BigRational> = values.iter().filter_map(|v| v.finite().cloned()).collect();
    (finite.into_iter().collect(), values.iter().any(ExtValue::is_infinite))
}

fn ext(r: BigRational) -> ExtValue {
    ExtValue::from_rational(r).expect("non-negative")
}

fn strict_level_set(values: &[ExtValue], t: &ExtValue) -> PointSet {
    PointSet::from_points(values.iter().enumerate().filter(|(_, v)| *v > t).map(|(i, _)| i))
}

/// Accepts `values` iff every strict upper level set is a lattice member.
///
/// Level sets are constant on `[0, t₁[`, `[t₁, t₂[`, …, `[t_k, inf[`, so one
/// representative per interval is checked, lowest interval first.
pub fn lsc_check(space: Arc<PervinSpace>, values: Vec<ExtValue>) -> Result<LscFunction, ChoquetError> {
    if values.len() != space.len() {
        return Err(ChoquetError::WrongArity {
            expected: space.len(),
            got: values.len(),
        });
    }
    let (finite, _) = distinct_values(&values);
    let mut lower = ExtValue::zero();
    let uppers = finite
        .iter()
        .filter(|t| t.is_positive())
        .map(|t| ext(t.clone()))
        .chain(std::iter::once(ExtValue::infinity()));
    for upper in uppers {
        let level_set = strict_level_set(&values, &lower);
        if !space.is_member(level_set) {
            return Err(ChoquetError::NotLsc(Box::new(NotLsc {
                lower,
                upper,
                level_set,
            })));
        }
        lower = upper;
    }
    Ok(LscFunction { space, values })
}

impl LscFunction {
    pub fn new(space: Arc<PervinSpace>, values: Vec<ExtValue>) -> Result<Self, ChoquetError> {
        lsc_check(space, values)
    }

    pub fn constant(space: Arc<PervinSpace>, value: ExtValue) -> Self {
        let values = vec![value; space.len()];
        LscFunction { space, values }
    }

    pub fn zero(space: Arc<PervinSpace>) -> Self {
        Self::constant(space, ExtValue::zero())
    }

    /// `χ_U`, defined for lattice members only.
    pub fn characteristic(space: Arc<PervinSpace>, set: PointSet) -> Result<Self, ChoquetError> {
        if !space.is_member(set) {
            return Err(SpaceError::NotInLattice(set).into());
        }
        let values = (0..space.len())
            .map(|p| {
                if set.contains(p) {
                    ExtValue::one()
                } else {
                    ExtValue::zero()
                }
            })
            .collect();
        Ok(LscFunction { space, values })
    }

    /// The function taking `values[a]` on atom `a`.
    pub fn from_atom_values(space: Arc<PervinSpace>, values: Vec<ExtValue>) -> Result<Self, ChoquetError> {
        if values.len() != space.atoms().len() {
            return Err(ChoquetError::WrongArity {
                expected: space.atoms().len(),
                got: values.len(),
            });
        }
        let pointwise = (0..space.len()).map(|p| values[space.atom_of(p)].clone()).collect();
        lsc_check(space, pointwise)
    }

    pub fn space(&self) -> &Arc<PervinSpace> {
        &self.space
    }

    pub fn values(&self) -> &[ExtValue] {
        &self.values
    }

    pub fn at(&self, point: usize) -> &ExtValue {
        &self.values[point]
    }

    /// Value on an atom; lsc functions are constant on atoms.
    pub fn on_atom(&self, atom: usize) -> &ExtValue {
        let p = self.space.atoms()[atom].points.first().expect("atoms are non-empty");
        &self.values[p]
    }

    pub fn is_bounded(&self) -> bool {
        self.values.iter().all(ExtValue::is_finite)
    }

    /// `h⁻¹(]t, inf])`.
    pub fn level_set(&self, t: &ExtValue) -> PointSet {
        strict_level_set(&self.values, t)
    }

    fn require_same_space(&self, space: &Arc<PervinSpace>) -> Result<(), ChoquetError> {
        if same_space(&self.space, space) {
            Ok(())
        } else {
            Err(ChoquetError::SpaceMismatch)
        }
    }

    fn zip_with(
        &self,
        other: &LscFunction,
        f: impl Fn(&ExtValue, &ExtValue) -> ExtValue,
    ) -> Result<Self, ChoquetError> {
        self.require_same_space(&other.space)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| f(a, b)).collect();
        lsc_check(self.space.clone(), values)
    }

    pub fn add(&self, other: &LscFunction) -> Result<Self, ChoquetError> {
        self.zip_with(other, |a, b| a + b)
    }

    /// Pointwise product, again lower semicontinuous.
    pub fn product(&self, other: &LscFunction) -> Result<Self, ChoquetError> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn scale(&self, factor: &ExtValue) -> Self {
        let values = self.values.iter().map(|v| factor * v).collect();
        lsc_check(self.space.clone(), values).expect("scaling preserves level sets up to relabeling")
    }

    pub fn pointwise_le(&self, other: &LscFunction) -> bool {
        self.values.iter().zip(&other.values).all(|(a, b)| a <= b)
    }
}

/// `Σᵢ (tᵢ - tᵢ₋₁)·m(h⁻¹(]tᵢ₋₁, inf])) + inf·m(h⁻¹(inf))` for a set function
/// `m` on level sets.
fn choquet_sum(values: &[ExtValue], mut measure: impl FnMut(PointSet) -> ExtValue) -> ExtValue {
    let (finite, has_inf) = distinct_values(values);
    let mut total = ExtValue::zero();
    let mut prev = BigRational::zero();
    for t in finite.into_iter().filter(|t| t.is_positive()) {
        let level = strict_level_set(values, &ext(prev.clone()));
        total = &total + &(&ext(&t - &prev) * &measure(level));
        prev = t;
    }
    if has_inf {
        let level = strict_level_set(values, &ext(prev));
        total = &total + &(&ExtValue::infinity() * &measure(level));
    }
    total
}

/// Choquet integral `∫ h dν`.
pub fn integrate(h: &LscFunction, nu: &Valuation) -> Result<ExtValue, ChoquetError> {
    h.require_same_space(nu.space())?;
    Ok(choquet_sum(&h.values, |set| nu.at(set).clone()))
}

/// The valuation `g·μ`, `U ↦ ∫ χ_U·g dμ`. On each atom its weight is
/// `g(a)·μ(a)`; [`density_value`] evaluates the level-set integral directly.
pub fn gmul(g: &LscFunction, mu: &Valuation) -> Result<Valuation, ChoquetError> {
    g.require_same_space(mu.space())?;
    let weights = (0..mu.space().atoms().len())
        .map(|a| g.on_atom(a) * &mu.atom_weights()[a])
        .collect();
    Ok(Valuation::from_atom_weights(mu.space().clone(), weights)?)
}

/// `(g·μ)(U) = ∫₀^∞ μ(U ∩ g⁻¹(]t, inf])) dt` for a lattice member `U`.
pub fn density_value(g: &LscFunction, mu: &Valuation, set: PointSet) -> Result<ExtValue, ChoquetError> {
    g.require_same_space(mu.space())?;
    if !mu.space().is_member(set) {
        return Err(SpaceError::NotInLattice(set).into());
    }
    Ok(choquet_sum(&g.values, |level| mu.at(level.intersection(set)).clone()))
}

/// Canonical extension of `g·μ` to the algebra for bounded `μ`:
/// `∫₀^∞ μ(C ∩ g⁻¹(]t, inf])) dt`, with `μ` extended to the algebra.
pub fn gmul_extend(g: &LscFunction, mu: &Valuation, element: &AlgebraElement) -> Result<ExtValue, ChoquetError> {
    g.require_same_space(mu.space())?;
    if !mu.is_bounded() {
        return Err(ValuationError::UnboundedValuation.into());
    }
    let space = mu.space();
    let mut failure = None;
    let value = choquet_sum(&g.values, |level| {
        let piece = element.set().intersection(level);
        match space.algebra_decompose(piece) {
            Ok(dec) => mu.sht_extend(&dec).expect("bounded"),
            Err(e) => {
                failure = Some(e);
                ExtValue::zero()
            }
        }
    });
    match failure {
        Some(e) => Err(e.into()),
        None => Ok(value),
    }
}

/// Both sides of `∫ h d(g·μ) = ∫ hg dμ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DensityIntegral {
    pub against_density: ExtValue,
    pub of_product: ExtValue,
    pub product: LscFunction,
}

impl DensityIntegral {
    pub fn agrees(&self) -> bool {
        self.against_density == self.of_product
    }
}

pub fn integrate_against_density(
    h: &LscFunction,
    g: &LscFunction,
    mu: &Valuation,
) -> Result<DensityIntegral, ChoquetError> {
    let density = gmul(g, mu)?;
    let product = h.product(g)?;
    Ok(DensityIntegral {
        against_density: integrate(h, &density)?,
        of_product: integrate(&product, mu)?,
        product,
    })
}

/// The linear map `h ↦ ∫ h dν`, represented by its valuation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearFunctional {
    valuation: Valuation,
}

impl LinearFunctional {
    pub fn apply(&self, h: &LscFunction) -> Result<ExtValue, ChoquetError> {
        integrate(h, &self.valuation)
    }

    pub fn space(&self) -> &Arc<PervinSpace> {
        self.valuation.space()
    }
}

pub fn riesz_functional(nu: &Valuation) -> LinearFunctional {
    LinearFunctional { valuation: nu.clone() }
}

/// `ν_F(U) = F(χ_U)`, evaluated by applying `F` to characteristic maps.
pub fn riesz_valuation(functional: &LinearFunctional) -> Result<Valuation, ChoquetError> {
    let space = functional.space().clone();
    let table = space
        .members()
        .iter()
        .map(|&u| functional.apply(&LscFunction::characteristic(space.clone(), u)?))
        .collect::<Result<Vec<_>, _>>()?;
    valuation_from_any_table(space, table)
}

/// Atom weights from a lattice table that may contain `inf`. Atoms whose
/// least neighbourhood has infinite value get weight `inf`; all others get
/// the crescent difference. This reproduces the table on every member.
fn valuation_from_any_table(space: Arc<PervinSpace>, table: Vec<ExtValue>) -> Result<Valuation, ChoquetError> {
    if table.iter().all(ExtValue::is_finite) {
        return Ok(Valuation::from_lattice_table(space, table)?);
    }
    crate::valuation::check_axioms(&space, &table).map_err(ValuationError::from)?;
    let at = |s: PointSet| &table[space.member_index(s).expect("witness sets are members")];
    let weights = space
        .atoms()
        .iter()
        .map(|a| match (at(a.witness.outer).finite(), at(a.witness.inner).finite()) {
            (Some(u), Some(v)) => ext(u - v),
            _ => ExtValue::infinity(),
        })
        .collect();
    let valuation = Valuation::from_atom_weights(space, weights)?;
    debug_assert_eq!(valuation.lattice_table(), table.as_slice());
    Ok(valuation)
}

/// Recovers a valuation from an externally supplied table of functional
/// values. Every lattice member's characteristic map must be present.
/// Entries are checked for additivity and positive homogeneity against each
/// other and then against the integral of the recovered valuation.
pub fn riesz_valuation_from_table(
    space: Arc<PervinSpace>,
    entries: &[(LscFunction, ExtValue)],
) -> Result<Valuation, ChoquetError> {
    for (h, _) in entries {
        h.require_same_space(&space)?;
    }
    for (i, (hi, fi)) in entries.iter().enumerate() {
        for (hj, fj) in entries.iter().skip(i) {
            if let Some(a) = homogeneity_factor(hi, hj) {
                if fj != &(&a * fi) {
                    return Err(ChoquetError::NotLinear(format!(
                        "F({:?}) = {fj} but {a}·F({:?}) = {}",
                        hj.values_text(),
                        hi.values_text(),
                        &a * fi
                    )));
                }
            }
            let sum: Vec<ExtValue> = hi.values.iter().zip(&hj.values).map(|(a, b)| a + b).collect();
            for (hk, fk) in entries {
                if hk.values == sum && fk != &(fi + fj) {
                    return Err(ChoquetError::NotLinear(format!(
                        "F({:?}) = {fk} but F({:?}) + F({:?}) = {}",
                        hk.values_text(),
                        hi.values_text(),
                        hj.values_text(),
                        fi + fj
                    )));
                }
            }
        }
    }
    let table = space
        .members()
        .iter()
        .map(|&u| {
            let chi = LscFunction::characteristic(space.clone(), u)?;
            entries
                .iter()
                .find(|(h, _)| h.values == chi.values)
                .map(|(_, v)| v.clone())
                .ok_or(ChoquetError::MissingCharacteristic(u))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let valuation = valuation_from_any_table(space, table)
        .map_err(|e| ChoquetError::NotLinear(format!("values on characteristic maps are not a valuation: {e}")))?;
    for (h, f) in entries {
        let expected = integrate(h, &valuation)?;
        if &expected != f {
            return Err(ChoquetError::NotLinear(format!(
                "F({:?}) = {f} but the valuation it induces integrates to {expected}",
                h.values_text()
            )));
        }
    }
    Ok(valuation)
}

/// `a` with `hj = a·hi` and `a > 0`, if any.
fn homogeneity_factor(hi: &LscFunction, hj: &LscFunction) -> Option<ExtValue> {
    let mut factor: Option<BigRational> = None;
    for (a, b) in hi.values.iter().zip(&hj.values) {
        match (a.finite(), b.finite()) {
            (Some(x), Some(y)) if x.is_zero() => {
                if !y.is_zero() {
                    return None;
                }
            }
            (Some(x), Some(y)) => {
                let q = y / x;
                if factor.as_ref().is_some_and(|f| f != &q) {
                    return None;
                }
                factor = Some(q);
            }
            (None, None) => {}
            _ => return None,
        }
    }
    factor.filter(|f| f.is_positive()).map(ext)
}

impl LscFunction {
    fn values_text(&self) -> Vec<String> {
        self.values.iter().map(ToString::to_string).collect()
    }
}

/// The very simple function `ε Σₖ χ_{Uₖ}` with `ε = 1/2^N`, stored as runs
/// of repeated level sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerySimple {
    pub level: u32,
    pub runs: Vec<(PointSet, u64)>,
}

impl VerySimple {
    pub fn epsilon(&self) -> ExtValue {
        ext(BigRational::new(BigInt::one(), BigInt::one() << self.level))
    }

    /// Level sets with multiplicity.
    pub fn sets(&self) -> impl Iterator<Item = PointSet> + '_ {
        self.runs
            .iter()
            .flat_map(|&(set, count)| std::iter::repeat_n(set, count as usize))
    }

    pub fn is_empty(&self) -> bool {
        self.runs.is_empty()
    }

    pub fn evaluate(&self, point: usize) -> ExtValue {
        let count: u64 = self
            .runs
            .iter()
            .filter(|(set, _)| set.contains(point))
            .map(|(_, c)| c)
            .sum();
        &self.epsilon() * &ExtValue::from_integer(count)
    }

    pub fn to_function(&self, space: Arc<PervinSpace>) -> LscFunction {
        let values = (0..space.len()).map(|p| self.evaluate(p)).collect();
        lsc_check(space, values).expect("sums of characteristic maps of members are lsc")
    }
}

/// `min(⌊v·2^N⌋, N·2^N)` for `round_down`, `min(⌈v·2^N⌉ - 1, N·2^N)` otherwise;
/// `inf` maps to the cap.
fn dyadic_count(v: &ExtValue, level: u32, round_down: bool) -> u64 {
    let cap = u64::from(level) << level;
    let Some(r) = v.finite() else { return cap };
    let scaled = r * BigRational::from_integer(BigInt::one() << level);
    let k = if round_down {
        scaled.floor().to_integer()
    } else {
        scaled.ceil().to_integer() - BigInt::one()
    };
    if k.is_negative() {
        return 0;
    }
    k.to_u64().map_or(cap, |k| k.min(cap))
}

fn dyadic_runs(h: &LscFunction, level: u32, round_down: bool) -> Vec<(PointSet, u64)> {
    let counts: Vec<u64> = h.values.iter().map(|v| dyadic_count(v, level, round_down)).collect();
    let distinct: BTreeSet<u64> = counts.iter().copied().filter(|&c| c > 0).collect();
    let mut prev = 0;
    distinct
        .into_iter()
        .map(|c| {
            let set = PointSet::from_points(counts.iter().enumerate().filter(|(_, &k)| k >= c).map(|(i, _)| i));
            let run = (set, c - prev);
            prev = c;
            run
        })
        .collect()
}

/// `h_N = (1/2^N) Σ_{k=1}^{N·2^N} χ_{h⁻¹([k/2^N, inf])}`.
///
/// On a finite space the closed level set `h⁻¹([t, inf])` equals the strict
/// level set at the next smaller value of `h`, so it is a member. `h_N ≤ h`,
/// the sequence increases with `N`, and `h_N = h` once every value of `h` is
/// a multiple of `1/2^N` not exceeding `N`.
pub fn very_simple_decompose(h: &LscFunction, level: u32) -> VerySimple {
    VerySimple {
        level,
        runs: dyadic_runs(h, level, true),
    }
}

/// `(1/2^N) Σ_{k=1}^{N·2^N} inf { ν(h⁻¹(]t, inf])) : t ∈ ](k-1)/2^N, k/2^N[ }`,
/// which equals `∫ h_N dν` for the approximant of [`very_simple_decompose`].
pub fn lower_darboux_sum(h: &LscFunction, nu: &Valuation, level: u32) -> Result<ExtValue, ChoquetError> {
    h.require_same_space(nu.space())?;
    Ok(darboux(&dyadic_runs(h, level, true), nu, level))
}

/// The same sum with infima over closed cells, `(1/2^N) Σ ν(h⁻¹(]k/2^N, inf]))`.
/// It also increases to the integral but stays strictly below it whenever the
/// integrand jumps at a grid point.
pub fn closed_cell_darboux_sum(h: &LscFunction, nu: &Valuation, level: u32) -> Result<ExtValue, ChoquetError> {
    h.require_same_space(nu.space())?;
    Ok(darboux(&dyadic_runs(h, level, false), nu, level))
}

fn darboux(runs: &[(PointSet, u64)], nu: &Valuation, level: u32) -> ExtValue {
    let eps = ext(BigRational::new(BigInt::one(), BigInt::one() << level));
    let total: ExtValue = runs
        .iter()
        .map(|&(set, count)| &ExtValue::from_integer(count) * nu.at(set))
        .sum();
    &eps * &total
}
