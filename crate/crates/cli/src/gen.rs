//! Seeded random instances.
//!
//! Everything is drawn from a `ChaCha8Rng` seeded with `seed_from_u64`, so a
//! seed pins the instance on every platform. Probabilities are per-mille
//! integers.

use std::sync::Arc;

use pervin::choquet::gmul;
use pervin::{ExtValue, Limits, LscFunction, PervinSpace, PointSet, Valuation};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::instance::{instance_from_parts, Instance};

pub type GenRng = ChaCha8Rng;

pub const MAX_GEN_POINTS: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenParams {
    pub points: usize,
    pub generator_count: usize,
    /// Finite weights are `a/b` with `a ≤ max_numerator`, `1 ≤ b ≤ max_denominator`.
    pub max_numerator: u64,
    pub max_denominator: u64,
    pub zero_per_mille: u32,
    pub infinity_per_mille: u32,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            points: 4,
            generator_count: 4,
            max_numerator: 6,
            max_denominator: 4,
            zero_per_mille: 200,
            infinity_per_mille: 0,
        }
    }
}

impl GenParams {
    /// Parameters with a carrier of `1..=max_points` points and
    /// `0..=points+1` generators, both drawn from `rng`.
    pub fn random(rng: &mut GenRng, max_points: usize) -> Self {
        let points = rng.random_range(1..=max_points.clamp(1, MAX_GEN_POINTS));
        GenParams {
            points,
            generator_count: rng.random_range(0..=points + 1),
            ..GenParams::default()
        }
    }
}

pub fn rng_for(seed: u64) -> GenRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gen_space(rng: &mut GenRng, params: &GenParams) -> Arc<PervinSpace> {
    let n = params.points.clamp(1, MAX_GEN_POINTS);
    let elements = (0..n).map(|i| format!("p{i}")).collect();
    let generators: Vec<PointSet> = (0..params.generator_count)
        .map(|_| PointSet::from_bits(rng.random_range(0..1u64 << n)))
        .collect();
    Arc::new(PervinSpace::close(elements, &generators, Limits::default()).expect("at most 8 points"))
}

fn gen_value(rng: &mut GenRng, params: &GenParams, allow_infinity: bool) -> ExtValue {
    let roll = rng.random_range(0..1000u32);
    if roll < params.zero_per_mille {
        ExtValue::zero()
    } else if allow_infinity && roll < params.zero_per_mille + params.infinity_per_mille {
        ExtValue::infinity()
    } else {
        ExtValue::ratio(
            rng.random_range(0..=params.max_numerator),
            rng.random_range(1..=params.max_denominator.max(1)),
        )
    }
}

pub fn gen_valuation(rng: &mut GenRng, space: &Arc<PervinSpace>, params: &GenParams) -> Valuation {
    let weights = (0..space.atoms().len()).map(|_| gen_value(rng, params, true)).collect();
    Valuation::from_atom_weights(space.clone(), weights).expect("one weight per atom")
}

/// A finite weight vector, one entry per atom.
pub fn gen_bounded_valuation(rng: &mut GenRng, space: &Arc<PervinSpace>, params: &GenParams) -> Valuation {
    let weights = (0..space.atoms().len())
        .map(|_| gen_value(rng, params, false))
        .collect();
    Valuation::from_atom_weights(space.clone(), weights).expect("one weight per atom")
}

/// Lift per-atom values to an lsc function: the value at `y` is the max of
/// the raw values at every `x` specializing to `y`.
pub fn monotone_lift(space: &Arc<PervinSpace>, raw: &[ExtValue]) -> LscFunction {
    let order = space.specialization_order();
    let values = (0..space.len())
        .map(|y| {
            (0..space.len())
                .filter(|&x| order.leq(x, y))
                .map(|x| raw[space.atom_of(x)].clone())
                .max()
                .expect("leq is reflexive")
        })
        .collect();
    LscFunction::new(space.clone(), values).expect("monotone functions are lsc")
}

pub fn gen_function(rng: &mut GenRng, space: &Arc<PervinSpace>, params: &GenParams) -> LscFunction {
    let raw: Vec<ExtValue> = (0..space.atoms().len())
        .map(|_| gen_value(rng, params, false))
        .collect();
    monotone_lift(space, &raw)
}

/// Values `k/2^level` with `k ≤ max_numerator·2^level`.
pub fn gen_dyadic_function(rng: &mut GenRng, space: &Arc<PervinSpace>, params: &GenParams, level: u32) -> LscFunction {
    let scale = 1u64 << level;
    let raw: Vec<ExtValue> = (0..space.atoms().len())
        .map(|_| ExtValue::ratio(rng.random_range(0..=params.max_numerator * scale), scale))
        .collect();
    monotone_lift(space, &raw)
}

/// Space plus valuations `nu`, `mu` and `gmu = g·mu`, and function `g`.
pub fn gen_instance(seed: u64, params: &GenParams) -> Instance {
    assemble(&mut rng_for(seed), params)
}

fn assemble(rng: &mut GenRng, params: &GenParams) -> Instance {
    let space = gen_space(rng, params);
    let nu = gen_valuation(rng, &space, params);
    let mu = gen_valuation(rng, &space, params);
    let g = gen_function(rng, &space, params);
    let gmu = gmul(&g, &mu).expect("same space");
    instance_from_parts(
        space,
        [("nu".to_string(), nu), ("mu".to_string(), mu), ("gmu".to_string(), gmu)],
        [("g".to_string(), g)],
    )
}

/// Like [`gen_instance`], with the carrier size and generator count drawn
/// from the same stream: `1..=max_points` points, `0..=points+1`
/// generators, one atom weight in ten infinite.
pub fn gen_random_instance(seed: u64, max_points: usize) -> Instance {
    let mut rng = rng_for(seed);
    let params = GenParams {
        infinity_per_mille: 100,
        ..GenParams::random(&mut rng, max_points)
    };
    assemble(&mut rng, &params)
}
