use std::sync::Arc;

use pervin::choquet::{
    gmul, gmul_extend, integrate, integrate_against_density, lower_darboux_sum, riesz_functional, riesz_valuation,
    very_simple_decompose,
};
use pervin::radon::{
    abs_continuous, density_oracle, density_synthesize, forward_direction_check, hahn_grid, hahn_witness,
    is_hahn_witness, is_hahn_witness_by_crescents, verify_density,
};
use pervin::valuation::check_axioms;
use pervin::{ExtValue, Limits, LscFunction, PervinSpace, PointSet, SignedRational, SignedValuation, Valuation};
use proptest::prelude::*;

#[derive(Debug, Clone)]
struct Instance {
    space: Arc<PervinSpace>,
    nu: Vec<(u64, u64)>,
    mu: Vec<(u64, u64)>,
    g: Vec<(u64, u64)>,
}

fn ratio((n, d): (u64, u64)) -> ExtValue {
    ExtValue::ratio(n, d)
}

fn space_strategy(max_points: usize) -> impl Strategy<Value = Arc<PervinSpace>> {
    (1..=max_points).prop_flat_map(|n| {
        prop::collection::vec(0u64..(1 << n), 0..5).prop_map(move |gens| {
            let elements = (0..n).map(|i| format!("p{i}")).collect();
            let gens: Vec<PointSet> = gens.into_iter().map(PointSet::from_bits).collect();
            Arc::new(PervinSpace::close(elements, &gens, Limits::default()).unwrap())
        })
    })
}

fn weight() -> impl Strategy<Value = (u64, u64)> {
    prop_oneof![1 => Just((0, 1)), 4 => (0u64..8, 1u64..5)]
}

fn instance(max_points: usize) -> impl Strategy<Value = Instance> {
    space_strategy(max_points).prop_flat_map(|space| {
        let atoms = space.atoms().len();
        (
            Just(space),
            prop::collection::vec(weight(), atoms),
            prop::collection::vec(weight(), atoms),
            prop::collection::vec(weight(), atoms),
        )
            .prop_map(|(space, nu, mu, g)| Instance { space, nu, mu, g })
    })
}

impl Instance {
    fn nu(&self) -> Valuation {
        Valuation::from_atom_weights(self.space.clone(), self.nu.iter().copied().map(ratio).collect()).unwrap()
    }

    fn mu(&self) -> Valuation {
        Valuation::from_atom_weights(self.space.clone(), self.mu.iter().copied().map(ratio).collect()).unwrap()
    }

    /// An lsc function built from atom values: take the running max along
    /// the specialization order so level sets are up-sets.
    fn g(&self) -> LscFunction {
        monotone_function(&self.space, &self.g)
    }
}

fn monotone_function(space: &Arc<PervinSpace>, raw: &[(u64, u64)]) -> LscFunction {
    let order = space.specialization_order();
    let base: Vec<ExtValue> = (0..space.len()).map(|p| ratio(raw[space.atom_of(p)])).collect();
    let values = (0..space.len())
        .map(|y| {
            (0..space.len())
                .filter(|&x| order.leq(x, y))
                .map(|x| base[x].clone())
                .max()
                .unwrap()
        })
        .collect();
    LscFunction::new(space.clone(), values).unwrap()
}

fn all_algebra_sets(space: &PervinSpace) -> Vec<PointSet> {
    let atoms = space.atoms();
    (0u64..(1 << atoms.len()))
        .map(|mask| {
            atoms
                .iter()
                .filter(|a| mask >> a.index & 1 == 1)
                .fold(PointSet::EMPTY, |acc, a| acc.union(a.points))
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn constructed_valuations_satisfy_axioms(inst in instance(5)) {
        let nu = inst.nu();
        prop_assert!(check_axioms(&inst.space, nu.lattice_table()).is_ok());
        let gm = gmul(&inst.g(), &inst.mu()).unwrap();
        prop_assert!(check_axioms(&inst.space, gm.lattice_table()).is_ok());
    }

    #[test]
    fn lattice_table_round_trip(inst in instance(5)) {
        let nu = inst.nu();
        let back = Valuation::from_lattice_table(inst.space.clone(), nu.lattice_table().to_vec()).unwrap();
        prop_assert_eq!(back, nu);
    }

    #[test]
    fn sht_extension_is_additive_and_extends(inst in instance(5)) {
        let nu = inst.nu();
        let space = &inst.space;
        for &u in space.members() {
            prop_assert_eq!(&nu.sht_extend(&space.algebra_decompose(u).unwrap()).unwrap(), nu.at(u));
        }
        let sets = all_algebra_sets(space);
        for &a in &sets {
            for &b in &sets {
                if a.is_disjoint(b) {
                    let ea = nu.sht_extend(&space.algebra_decompose(a).unwrap()).unwrap();
                    let eb = nu.sht_extend(&space.algebra_decompose(b).unwrap()).unwrap();
                    let eab = nu.sht_extend(&space.algebra_decompose(a.union(b)).unwrap()).unwrap();
                    prop_assert_eq!(eab, &ea + &eb);
                }
            }
        }
    }

    #[test]
    fn signed_extension_is_decomposition_independent(inst in instance(5), r in (0u64..6, 1u64..4)) {
        let r = SignedRational::ratio(r.0 as i64, r.1 as i64);
        let sigma = SignedValuation::from_pair(&inst.nu(), &r, &inst.mu()).unwrap();
        let space = &inst.space;
        for set in all_algebra_sets(space) {
            let greedy = sigma.extend(&space.algebra_decompose(set).unwrap());
            let atomwise = sigma.extend(&space.atomwise_decompose(set).unwrap());
            prop_assert_eq!(&greedy, &atomwise);
            prop_assert_eq!(greedy, sigma.algebra_value(set).unwrap());
        }
    }

    #[test]
    fn image_and_restriction_preserve_axioms(inst in instance(5), pick in 0usize..64) {
        let nu = inst.nu();
        let space = &inst.space;
        let u0 = space.members()[pick % space.members().len()];
        let r = nu.restrict(u0).unwrap();
        prop_assert!(check_axioms(space, r.lattice_table()).is_ok());
        prop_assert_eq!(r.total(), nu.at(u0));
        let ident: Vec<usize> = (0..space.len()).collect();
        prop_assert_eq!(nu.image(&ident, space.clone()).unwrap(), nu.clone());
        let point = Arc::new(PervinSpace::close_named::<&str>(&["*"], &[], Limits::default()).unwrap());
        let img = nu.image(&vec![0; space.len()], point.clone()).unwrap();
        prop_assert!(check_axioms(&point, img.lattice_table()).is_ok());
        prop_assert_eq!(img.total(), nu.total());
    }

    #[test]
    fn choquet_linear_and_monotone(inst in instance(5), a in weight(), b in weight(), h2 in prop::collection::vec(weight(), 6)) {
        let (a, b) = (ratio(a), ratio(b));
        let (mu, nu, h) = (inst.mu(), inst.nu(), inst.g());
        let h2 = monotone_function(&inst.space, &h2[..inst.space.atoms().len()]);
        let combo = Valuation::linear_combo(&a, &mu, &b, &nu).unwrap();
        prop_assert_eq!(
            integrate(&h, &combo).unwrap(),
            &(&a * &integrate(&h, &mu).unwrap()) + &(&b * &integrate(&h, &nu).unwrap())
        );
        let lin = h.scale(&a).add(&h2.scale(&b)).unwrap();
        prop_assert_eq!(
            integrate(&lin, &nu).unwrap(),
            &(&a * &integrate(&h, &nu).unwrap()) + &(&b * &integrate(&h2, &nu).unwrap())
        );
        let bigger = h.add(&h2).unwrap();
        prop_assert!(integrate(&h, &nu).unwrap() <= integrate(&bigger, &nu).unwrap());
        let more = Valuation::linear_combo(&ExtValue::one(), &nu, &ExtValue::one(), &mu).unwrap();
        prop_assert!(nu.stochastic_leq(&more).unwrap());
        prop_assert!(integrate(&h, &nu).unwrap() <= integrate(&h, &more).unwrap());
    }

    #[test]
    fn density_identities(inst in instance(5), h in prop::collection::vec(weight(), 6)) {
        let (g, mu) = (inst.g(), inst.mu());
        let h = monotone_function(&inst.space, &h[..inst.space.atoms().len()]);
        let both = integrate_against_density(&h, &g, &mu).unwrap();
        prop_assert!(both.agrees());
        prop_assert!(LscFunction::new(inst.space.clone(), both.product.values().to_vec()).is_ok());
        let gm = gmul(&g, &mu).unwrap();
        for set in all_algebra_sets(&inst.space) {
            let element = inst.space.algebra_decompose(set).unwrap();
            prop_assert_eq!(gmul_extend(&g, &mu, &element).unwrap(), gm.sht_extend(&element).unwrap());
        }
    }

    #[test]
    fn riesz_round_trip(inst in instance(5), hs in prop::collection::vec(prop::collection::vec(weight(), 6), 5)) {
        let nu = inst.nu();
        let f = riesz_functional(&nu);
        prop_assert_eq!(&riesz_valuation(&f).unwrap(), &nu);
        let f2 = riesz_functional(&riesz_valuation(&f).unwrap());
        for raw in hs {
            let h = monotone_function(&inst.space, &raw[..inst.space.atoms().len()]);
            prop_assert_eq!(f.apply(&h).unwrap(), f2.apply(&h).unwrap());
        }
    }

    #[test]
    fn very_simple_approximants_and_darboux_sums(inst in instance(4)) {
        let (h, nu) = (inst.g(), inst.nu());
        let exact = integrate(&h, &nu).unwrap();
        let mut prev = ExtValue::zero();
        for level in 0..9 {
            let approx = very_simple_decompose(&h, level).to_function(inst.space.clone());
            prop_assert!(approx.pointwise_le(&h));
            let sum = lower_darboux_sum(&h, &nu, level).unwrap();
            prop_assert_eq!(&sum, &integrate(&approx, &nu).unwrap());
            prop_assert!(prev <= sum && sum <= exact);
            prev = sum;
        }
    }

    #[test]
    fn hahn_atom_check_matches_crescent_check(inst in instance(4), r in (0u64..6, 1u64..4)) {
        let r = SignedRational::ratio(r.0 as i64, r.1 as i64);
        let sigma = SignedValuation::from_pair(&inst.nu(), &r, &inst.mu()).unwrap();
        let mut witnesses = Vec::new();
        for &u in inst.space.members() {
            let by_atoms = is_hahn_witness(&sigma, u);
            prop_assert_eq!(by_atoms, is_hahn_witness_by_crescents(&sigma, u));
            if by_atoms {
                witnesses.push(u);
            }
        }
        for &a in &witnesses {
            for &b in &witnesses {
                prop_assert!(is_hahn_witness(&sigma, a.union(b)));
            }
        }
        let maximal = hahn_witness(&sigma);
        prop_assert_eq!(maximal.is_some(), !witnesses.is_empty());
        if let Some(m) = maximal {
            prop_assert!(witnesses.iter().all(|w| w.is_subset(m)));
        }
    }

    #[test]
    fn theorem_equivalence(inst in instance(5)) {
        let (nu, mu) = (inst.nu(), inst.mu());
        let synth = density_synthesize(&nu, &mu).unwrap();
        let oracle = density_oracle(&nu, &mu).unwrap();
        let criteria = abs_continuous(&nu, &mu).unwrap().holds
            && hahn_grid(&nu, &mu).unwrap().iter().all(|w| w.witness.is_some());
        prop_assert_eq!(synth.is_density(), criteria);
        prop_assert_eq!(synth.is_density(), oracle.is_density());
        if let (Some(g1), Some(g2)) = (synth.density(), oracle.density()) {
            prop_assert!(verify_density(g1, &mu, &nu).unwrap().holds);
            prop_assert!(verify_density(g2, &mu, &nu).unwrap().holds);
            for a in 0..inst.space.atoms().len() {
                if !mu.atom_weights()[a].is_zero() {
                    prop_assert_eq!(g1.on_atom(a), g2.on_atom(a));
                }
            }
        }
    }

    #[test]
    fn forward_direction(inst in instance(5)) {
        let report = forward_direction_check(&inst.g(), &inst.mu()).unwrap();
        prop_assert!(report.holds());
        let synth = density_synthesize(&report.density, &inst.mu()).unwrap();
        prop_assert!(synth.is_density());
    }

    #[test]
    fn bounding_lemmata(inst in instance(5), extra in prop::collection::vec(weight(), 6)) {
        let (g, mu) = (inst.g(), inst.mu());
        let atoms = inst.space.atoms().len();
        let gm = gmul(&g, &mu).unwrap();
        // ν ≥ g·μ atom-wise: the lower-bound hypothesis holds on every crescent
        // inside a level set, so ν dominates g·μ on the whole algebra.
        let above: Vec<ExtValue> = (0..atoms).map(|a| &gm.atom_weights()[a] + &ratio(extra[a])).collect();
        let nu_above = Valuation::from_atom_weights(inst.space.clone(), above).unwrap();
        // ν ≤ g·μ atom-wise with ν ≪ μ: g·μ dominates ν on the lattice.
        let below: Vec<ExtValue> = (0..atoms)
            .map(|a| {
                let w = &gm.atom_weights()[a];
                if ratio(extra[a]) <= *w { ratio(extra[a]) } else { w.clone() }
            })
            .collect();
        let nu_below = Valuation::from_atom_weights(inst.space.clone(), below).unwrap();
        prop_assert!(abs_continuous(&nu_below, &mu).unwrap().holds);
        for set in all_algebra_sets(&inst.space) {
            let element = inst.space.algebra_decompose(set).unwrap();
            let density_mass = gmul_extend(&g, &mu, &element).unwrap();
            prop_assert!(nu_above.sht_extend(&element).unwrap() >= density_mass);
        }
        prop_assert!(nu_below.stochastic_leq(&gm).unwrap());
    }

    #[test]
    fn powerset_lattices_always_have_hahn_witnesses(n in 1usize..5, w in prop::collection::vec((-6i64..6, 1i64..4), 5)) {
        let elements = (0..n).map(|i| format!("p{i}")).collect();
        let gens: Vec<PointSet> = (0..n).map(PointSet::singleton).collect();
        let space = Arc::new(PervinSpace::close(elements, &gens, Limits::default()).unwrap());
        let weights = w[..n].iter().map(|&(a, b)| SignedRational::ratio(a, b)).collect();
        let sigma = SignedValuation::from_atom_weights(space, weights).unwrap();
        prop_assert!(hahn_witness(&sigma).is_some());
    }
}
