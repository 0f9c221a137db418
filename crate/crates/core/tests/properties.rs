mod common;

use pathduality::duality::{
    check_two_particle_sum, entanglement_witnesses, memoryless_bound, DualityOptions, RelationId,
    ScenarioAnalysis,
};
use pathduality::harness::{
    parse_scenario_str, sample_scenario, sample_two_particle, to_toml, ScenarioFile,
};
use pathduality::linalg::{
    kron, norm, purity, von_neumann_entropy, ComplexMatrix, DensityMatrix, DimsLabel,
};
use pathduality::random::substream;
use proptest::prelude::*;

use common::*;

fn shape() -> impl Strategy<Value = (u64, usize, usize)> {
    (any::<u64>(), 2usize..=5, 1usize..=4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn memory_relation_holds_and_never_loosens((seed, n, d_b) in shape()) {
        let spec = sample_scenario(seed, n, d_b, n);
        let a = ScenarioAnalysis::new(&spec, DualityOptions::default()).unwrap();
        let r = a.evaluate(RelationId::L1Memory).unwrap();
        prop_assert!(r.slack >= -1e-7, "slack {}", r.slack);
        prop_assert!(r.rhs <= memoryless_bound(n) + 1e-12);
        prop_assert!(r.aux_ok(), "{:?}", r.aux_checks);
        prop_assert!(r.solver_certified);
    }

    #[test]
    fn particle_memory_purity_equals_detector_purity((seed, n, d_b) in shape()) {
        let spec = sample_scenario(seed, n, d_b, n);
        let a = ScenarioAnalysis::new(&spec, DualityOptions::default()).unwrap();
        let red = a.reduced();
        prop_assert!((purity(&red.rho_ab) - purity(&red.rho_d)).abs() <= 1e-12);
        prop_assert!(purity(&red.rho_a) <= purity(&red.rho_ab) + 1e-12);
    }

    // ρ_A is a unital-channel image of a state isospectral with ρ_AB, so the
    // conditional entropy is non-positive for every N, not only N = 2.
    #[test]
    fn conditional_entropy_is_never_positive((seed, n, d_b) in shape()) {
        let spec = sample_scenario(seed, n, d_b, n);
        let a = ScenarioAnalysis::new(&spec, DualityOptions::default()).unwrap();
        let red = a.reduced();
        let cond = von_neumann_entropy(&red.rho_ab) - von_neumann_entropy(&red.rho_a);
        prop_assert!(cond <= 1e-9, "S(B|A) = {cond}");
    }

    #[test]
    fn every_applicable_relation_holds((seed, n, d_b) in shape()) {
        let spec = sample_scenario(seed, n, d_b, n);
        let opts = DualityOptions { seed, random_povms: 3, ..DualityOptions::default() };
        let a = ScenarioAnalysis::new(&spec, opts).unwrap();
        for r in a.evaluate_all().unwrap() {
            if r.relation.is_equality() {
                prop_assert!(r.slack.abs() <= 1e-9, "{} slack {}", r.relation, r.slack);
            } else {
                prop_assert!(r.slack >= -1e-7, "{} slack {}", r.relation, r.slack);
            }
            prop_assert!(r.satisfied);
        }
    }

    #[test]
    fn entropic_relations_hold_for_random_povms((seed, n, d_b) in shape()) {
        let spec = sample_scenario(seed, n, d_b, n);
        let bare = spec.without_memory();
        let a = ScenarioAnalysis::new(&spec, DualityOptions::default()).unwrap();
        let b = ScenarioAnalysis::new(&bare, DualityOptions::default()).unwrap();
        let mut rng = substream(seed, &[1]);
        for _ in 0..5 {
            let m = random_povm(&mut rng, n, n);
            prop_assert!(a.entropic(RelationId::EntropicMemory, &m).unwrap().slack >= -1e-7);
            prop_assert!(b.entropic(RelationId::EntropicNoMemory, &m).unwrap().slack >= -1e-7);
        }
    }

    #[test]
    fn two_particle_sum_holds(seed in any::<u64>(), n in 2usize..=3) {
        let tp = sample_two_particle(seed, n, n);
        let r = check_two_particle_sum(&tp, &DualityOptions::default()).unwrap();
        prop_assert!(r.slack >= -1e-7);
        prop_assert!(r.components["tight_slack"] >= -1e-7);
        prop_assert!(r.aux_ok(), "{:?}", r.aux_checks);
    }

    #[test]
    fn separable_mixtures_pass_both_witnesses(
        seed in any::<u64>(), da in 2usize..=3, db in 2usize..=3, terms in 1usize..=4,
    ) {
        let mut rng = substream(seed, &[2]);
        let weights = random_probs(&mut rng, terms);
        let mut acc = ComplexMatrix::zeros(da * db, da * db);
        for w in weights {
            let ra = random_density(&mut rng, da, da);
            let rb = random_density(&mut rng, db, db);
            acc.add_assign(&kron(ra.matrix(), rb.matrix()).unwrap().scale(w));
        }
        let rho = DensityMatrix::new(acc).unwrap();
        let dims = DimsLabel::new([("A", da), ("B", db)]).unwrap();
        let (pw, cw) = entanglement_witnesses(&rho, &dims).unwrap();
        prop_assert!(pw >= -1e-9 && cw >= -1e-9, "witnesses {pw} {cw}");
    }

    #[test]
    fn sampler_is_valid_and_deterministic((seed, n, d_b) in shape(), d_d in 1usize..=5) {
        let spec = sample_scenario(seed, n, d_b, d_d);
        prop_assert_eq!((spec.n(), spec.d_b(), spec.d_d()), (n, d_b, d_d));
        prop_assert!((spec.amplitudes().frobenius_norm() - 1.0).abs() <= 1e-12);
        for phi in spec.detector_states() {
            prop_assert!((norm(phi) - 1.0).abs() <= 1e-12);
        }
        let again = sample_scenario(seed, n, d_b, d_d);
        prop_assert_eq!(spec.amplitudes().data(), again.amplitudes().data());
        prop_assert_eq!(spec.detector_states(), again.detector_states());
    }

    #[test]
    fn toml_round_trip((seed, n, d_b) in shape(), d_d in 1usize..=4) {
        let spec = sample_scenario(seed, n, d_b, d_d);
        let text = to_toml(&ScenarioFile::Scenario(spec.clone()));
        let ScenarioFile::Scenario(back) = parse_scenario_str(&text, "generated").unwrap() else {
            panic!("kind changed");
        };
        prop_assert!(back.amplitudes().max_abs_diff(spec.amplitudes()) <= 1e-12);
        for (x, y) in back.detector_states().iter().zip(spec.detector_states()) {
            for (a, b) in x.iter().zip(y) {
                prop_assert!((a - b).norm() <= 1e-12);
            }
        }
    }
}
