//! Randomized property sweep over generated instances.
//!
//! Instance `i` of a run with seed `s` is [`gen_random_instance`] at seed
//! `s + i` (wrapping), so any failure can be replayed alone. Instances are
//! checked in parallel and merged in index order.

use pervin::choquet::{
    gmul, integrate, integrate_against_density, lower_darboux_sum, riesz_functional, riesz_valuation,
};
use pervin::radon::{density_oracle, density_synthesize, forward_direction_check, verify_density};
use pervin::valuation::check_axioms;
use pervin::{ExtValue, LscFunction, Valuation};
use rayon::prelude::*;
use serde::Serialize;

use crate::gen::gen_random_instance;
use crate::instance::Instance;

pub const PROPERTIES: [&str; 10] = [
    "axioms",
    "table_round_trip",
    "choquet_characteristic",
    "choquet_dirac",
    "choquet_linearity",
    "riesz_round_trip",
    "density_integral",
    "darboux_monotone",
    "forward_direction",
    "density_equivalence",
];

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct PropertyTally {
    pub name: String,
    pub checked: u64,
    pub failed: u64,
    pub first_failing_seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RandtestSummary {
    pub seed: u64,
    pub count: u64,
    pub max_points: usize,
    pub tallies: Vec<PropertyTally>,
}

impl RandtestSummary {
    pub fn failures(&self) -> u64 {
        self.tallies.iter().map(|t| t.failed).sum()
    }
}

/// Outcome per property: `None` when it does not apply to the instance.
type Outcomes = [Option<bool>; PROPERTIES.len()];

pub fn randtest(seed: u64, count: u64, max_points: usize) -> RandtestSummary {
    let outcomes: Vec<(u64, Outcomes)> = (0..count)
        .into_par_iter()
        .map(|i| {
            let s = seed.wrapping_add(i);
            (s, check_instance(&gen_random_instance(s, max_points)))
        })
        .collect();
    let mut tallies: Vec<PropertyTally> = PROPERTIES
        .iter()
        .map(|name| PropertyTally {
            name: name.to_string(),
            ..PropertyTally::default()
        })
        .collect();
    for (s, outcome) in outcomes {
        for (tally, result) in tallies.iter_mut().zip(outcome) {
            if let Some(ok) = result {
                tally.checked += 1;
                if !ok {
                    tally.failed += 1;
                    tally.first_failing_seed.get_or_insert(s);
                }
            }
        }
    }
    RandtestSummary {
        seed,
        count,
        max_points,
        tallies,
    }
}

/// Runs every property on an instance holding `nu`, `mu` and `g`.
pub fn check_instance(inst: &Instance) -> Outcomes {
    let space = &inst.space;
    let nu = &inst.valuations["nu"];
    let mu = &inst.valuations["mu"];
    let g = &inst.functions["g"];
    let gmu = gmul(g, mu).expect("same space");
    let bounded = nu.is_bounded() && mu.is_bounded();

    let axioms = [nu, mu, &gmu]
        .iter()
        .all(|v| check_axioms(space, v.lattice_table()).is_ok());

    let round_trip = nu
        .is_bounded()
        .then(|| Valuation::from_lattice_table(space.clone(), nu.lattice_table().to_vec()).as_ref() == Ok(nu));

    let characteristic = space.members().iter().all(|&u| {
        let chi = LscFunction::characteristic(space.clone(), u).expect("member");
        integrate(&chi, nu).ok().as_ref() == Some(nu.at(u))
    });

    let dirac = (0..space.len()).all(|x| {
        let d = Valuation::dirac(space.clone(), x).expect("point");
        integrate(g, &d).ok().as_ref() == Some(g.at(x))
    });

    let linearity = {
        let h = g
            .add(&LscFunction::characteristic(space.clone(), space.full()).expect("full"))
            .expect("same space");
        let sum = Valuation::linear_combo(&ExtValue::one(), nu, &ExtValue::from_integer(2), mu).expect("same space");
        let i = |f: &LscFunction, v: &Valuation| integrate(f, v).expect("same space");
        i(&g.add(&h).expect("same space"), nu) == &i(g, nu) + &i(&h, nu)
            && i(g, &sum) == &i(g, nu) + &(&ExtValue::from_integer(2) * &i(g, mu))
    };

    let riesz = riesz_valuation(&riesz_functional(nu)).as_ref() == Ok(nu);

    let density_integral = integrate_against_density(g, g, mu).map(|d| d.agrees()).unwrap_or(false);

    let darboux = g.is_bounded().then(|| {
        let sums: Vec<ExtValue> = (0..6).map(|n| lower_darboux_sum(g, nu, n).expect("bounded")).collect();
        let full = integrate(g, nu).expect("same space");
        sums.windows(2).all(|w| w[0] <= w[1]) && sums.iter().all(|s| *s <= full)
    });

    let forward = (mu.is_bounded() && gmu.is_bounded())
        .then(|| forward_direction_check(g, mu).map(|r| r.holds()).unwrap_or(false));

    let equivalence = bounded.then(|| {
        let (Ok(synth), Ok(oracle)) = (density_synthesize(nu, mu), density_oracle(nu, mu)) else {
            return false;
        };
        let verified = synth
            .density()
            .is_none_or(|d| verify_density(d, mu, nu).map(|c| c.holds).unwrap_or(false));
        let own = !gmu.is_bounded() || density_synthesize(&gmu, mu).is_ok_and(|r| r.is_density());
        synth.is_density() == oracle.is_density() && verified && own
    });

    [
        Some(axioms),
        round_trip,
        Some(characteristic),
        Some(dirac),
        Some(linearity),
        Some(riesz),
        Some(density_integral),
        darboux,
        forward,
        equivalence,
    ]
}
