use fmsys::algebra::{c64, kron, max_abs_diff, operator_norm, project_to_contraction, vector_max_abs_diff, ComplexMatrix, ComplexVector};
use fmsys::commutative::{self, LatticeSequence, LatticeWeight};
use fmsys::io::{build_io_pair, io_apply, io_contractivity_norm};
use fmsys::noncommutative::{nc_energy_slack, simulate_words, symmetrize, WordSequence};
use fmsys::random::{gaussian_matrix, gaussian_vector, random_dissipative_system, random_lattice_input, random_word_input};
use fmsys::words::{omega_weight, MultiIndex, Word};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn word(d: usize, max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(1..=d, 0..=max_len).prop_map(move |l| Word::new(d, l).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kron_norm_is_multiplicative(seed in any::<u64>(), r1 in 1usize..4, c1 in 1usize..4, r2 in 1usize..4, c2 in 1usize..4) {
        let mut rng = seeded(seed);
        let a = gaussian_matrix(&mut rng, r1, c1);
        let b = gaussian_matrix(&mut rng, r2, c2);
        let lhs = operator_norm(&kron(&a, &b)).unwrap();
        let rhs = operator_norm(&a).unwrap() * operator_norm(&b).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs.max(1.0));
    }

    #[test]
    fn projection_is_idempotent(seed in any::<u64>(), rows in 1usize..6, cols in 1usize..6, target in 0.1f64..1.0) {
        let mut rng = seeded(seed);
        let m = gaussian_matrix(&mut rng, rows, cols);
        let once = project_to_contraction(&m, target).unwrap();
        prop_assert!(operator_norm(&once).unwrap() <= target * (1.0 + 1e-12));
        let twice = project_to_contraction(&once, target).unwrap();
        prop_assert!(max_abs_diff(&once, &twice) <= 1e-14);
    }

    #[test]
    fn abelianization_is_additive(a in word(3, 6), b in word(3, 6)) {
        let joined = a.concat_word(&b).unwrap();
        prop_assert_eq!(joined.abelianize(), a.abelianize().checked_add(&b.abelianize()).unwrap());
    }

    #[test]
    fn nu_index_round_trips(w in word(4, 7)) {
        let back = Word::from_nu_index(4, w.len(), w.nu_index()).unwrap();
        prop_assert_eq!(&back, &w);
        let back = Word::from_stack_index(4, w.len(), w.stack_index()).unwrap();
        prop_assert_eq!(back, w);
    }

    #[test]
    fn omega_satisfies_pascal_rule(components in prop::collection::vec(0u32..6, 1..4)) {
        let n = MultiIndex::new(components);
        prop_assume!(n.degree() > 0);
        let sum: f64 = (1..=n.dim()).filter_map(|j| n.shifted_down(j)).map(|m| omega_weight(&m).unwrap()).sum();
        prop_assert_eq!(sum, omega_weight(&n).unwrap());
    }

    #[test]
    fn lattice_simulation_is_linear(seed in any::<u64>(), d in 1usize..4) {
        let mut rng = seeded(seed);
        let sys = random_dissipative_system(&mut rng, d, 2, 2, 2, 0.95).unwrap();
        let (u1, u2) = (random_lattice_input(&mut rng, d, 2, 2), random_lattice_input(&mut rng, d, 2, 2));
        let (x1, x2) = (gaussian_vector(&mut rng, 2), gaussian_vector(&mut rng, 2));
        let s = c64(0.3, -1.2);
        let mut combined = LatticeSequence::new(d, 2, 2);
        for (n, v) in u1.iter() {
            combined.insert(n.clone(), v * s + u2.value(n)).unwrap();
        }
        let t1 = commutative::simulate(&sys, &u1, &x1, 4).unwrap();
        let t2 = commutative::simulate(&sys, &u2, &x2, 4).unwrap();
        let t = commutative::simulate(&sys, &combined, &(&x1 * s + &x2), 4).unwrap();
        for (n, y) in t.output.iter() {
            let expected = t1.output.value(n) * s + t2.output.value(n);
            prop_assert!(vector_max_abs_diff(y, &expected) <= 1e-12);
        }
    }

    #[test]
    fn word_simulation_is_linear(seed in any::<u64>(), d in 1usize..4) {
        let mut rng = seeded(seed);
        let sys = random_dissipative_system(&mut rng, d, 2, 1, 2, 0.95).unwrap();
        let (u1, u2) = (random_word_input(&mut rng, d, 1, 2).unwrap(), random_word_input(&mut rng, d, 1, 2).unwrap());
        let (x1, x2) = (gaussian_vector(&mut rng, 2), gaussian_vector(&mut rng, 2));
        let mut combined = WordSequence::new(d, 1, 2);
        for (w, v) in u1.iter() {
            combined.insert(w.clone(), v + u2.value(w)).unwrap();
        }
        let t1 = simulate_words(&sys, &u1, &x1, 4).unwrap();
        let t2 = simulate_words(&sys, &u2, &x2, 4).unwrap();
        let t = simulate_words(&sys, &combined, &(&x1 + &x2), 4).unwrap();
        for (w, y) in t.output.iter() {
            prop_assert!(vector_max_abs_diff(y, &(t1.output.value(w) + t2.output.value(w))) <= 1e-12);
        }
    }

    #[test]
    fn dissipative_systems_balance_energy(seed in any::<u64>(), d in 1usize..4, dx in 1usize..4) {
        let mut rng = seeded(seed);
        let sys = random_dissipative_system(&mut rng, d, dx, 2, 2, 0.99).unwrap();
        let x0 = gaussian_vector(&mut rng, dx);
        let u = random_word_input(&mut rng, d, 2, 2).unwrap();
        let traj = simulate_words(&sys, &u, &x0, 5).unwrap();
        prop_assert!(nc_energy_slack(&sys, &traj, 4).unwrap().iter().all(|s| *s >= -1e-9));

        let lu = random_lattice_input(&mut rng, d, 2, 2);
        let lt = commutative::simulate(&sys, &lu, &x0, 5).unwrap();
        let slack = commutative::energy_balance_slack_with(&sys, &lt, 4, LatticeWeight::InverseMultinomial).unwrap();
        prop_assert!(slack.iter().all(|s| *s >= -1e-9));
    }

    #[test]
    fn symmetrization_preserves_total_mass(seed in any::<u64>(), d in 1usize..4) {
        let mut rng = seeded(seed);
        let w = random_word_input(&mut rng, d, 2, 3).unwrap();
        let s = symmetrize(&w, 3);
        let total_words: ComplexVector = w.iter().fold(ComplexVector::zeros(2), |acc, (_, v)| acc + v);
        let total_lattice: ComplexVector = s.iter().fold(ComplexVector::zeros(2), |acc, (_, v)| acc + v);
        prop_assert!(vector_max_abs_diff(&total_words, &total_lattice) <= 1e-12);
    }

    #[test]
    fn io_operator_is_contractive_and_matches_simulation(seed in any::<u64>(), d in 1usize..3, n in 0usize..4) {
        let mut rng = seeded(seed);
        let sys = random_dissipative_system(&mut rng, d, 2, 1, 1, 0.95).unwrap();
        let pair = build_io_pair(&sys, n).unwrap();
        prop_assert!(io_contractivity_norm(&pair) <= 1.0 + 1e-9);
        let u = random_word_input(&mut rng, d, 1, n).unwrap();
        let x0 = gaussian_vector(&mut rng, 2);
        let y = io_apply(&pair, &u, &x0).unwrap();
        let traj = simulate_words(&sys, &u, &x0, n).unwrap();
        for (w, v) in traj.output.iter() {
            prop_assert!(vector_max_abs_diff(v, &y.value(w)) <= 1e-12);
        }
    }
}

#[test]
fn contraction_projection_of_identity_is_noop() {
    let id = ComplexMatrix::identity(3, 3);
    assert_eq!(project_to_contraction(&id, 1.0).unwrap(), id);
}
