//! Seeded random instances driven by proptest; each case builds its objects
//! from one ChaCha seed so failures replay exactly.

use num::One;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use twoprover::instances::{random_multi_round_game, random_pcp_game, random_two_prover_game};
use twoprover::io::{parse_game, serialize_game, GameDocument};
use twoprover::model::eval_two_prover;
use twoprover::transforms::{oracularize_multi_round, oracularize_pcp, parallel_repeat};
use twoprover::values::{classical_value, multi_round_value, no_signaling_value, pcp_value};
use twoprover::{Rational, Scalar};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn serialization_is_identity(seed in any::<u64>(), q1 in 1usize..4, q2 in 1usize..4, a1 in 1usize..3, a2 in 1usize..3) {
        let mut rng = rng(seed);
        let docs = [
            GameDocument::TwoProver(random_two_prover_game([q1, q2, a1, a2], 0.5, &mut rng).unwrap()),
            GameDocument::MultiRound(random_multi_round_game(2, 2, 2, 0.5, &mut rng).unwrap()),
            GameDocument::Pcp(random_pcp_game(q1 + 3, a1 + 1, 4, 0.5, &mut rng).unwrap()),
        ];
        for doc in docs {
            let text = serialize_game(&doc);
            prop_assert_eq!(&parse_game(&text).unwrap(), &doc);
        }
    }

    #[test]
    fn classical_below_no_signaling(seed in any::<u64>(), q1 in 1usize..4, q2 in 1usize..4, a1 in 1usize..3, a2 in 1usize..4) {
        let g = random_two_prover_game([q1, q2, a1, a2], 0.5, &mut rng(seed)).unwrap();
        let c = classical_value(&g).unwrap();
        let ns = no_signaling_value(&g).unwrap();
        prop_assert!(c.value <= ns.value);
        prop_assert!(ns.value <= Rational::one());
        prop_assert_eq!(c.witness.evaluate(&g).unwrap(), c.value);
        prop_assert!(ns.witness.is_no_signaling(&Rational::from_ratio(0, 1)).no_signaling);
        prop_assert_eq!(eval_two_prover(&g, &ns.witness).unwrap(), ns.value);
    }

    #[test]
    fn repetition_is_at_least_the_product(seed in any::<u64>()) {
        let g = random_two_prover_game([2, 2, 2, 2], 0.5, &mut rng(seed)).unwrap();
        let v = classical_value(&g).unwrap().value;
        let v2 = classical_value(&parallel_repeat(&g, 2).unwrap()).unwrap().value;
        prop_assert!(v.clone() * v.clone() <= v2.clone());
        prop_assert!(v2 <= v);
    }

    #[test]
    fn oracularization_is_complete(seed in any::<u64>(), positions in 3usize..6) {
        let mut rng = rng(seed);
        let p = random_pcp_game(positions, 2, 4, 0.4, &mut rng).unwrap();
        let w = pcp_value(&p).unwrap().value;
        prop_assert!(w <= classical_value(&oracularize_pcp(&p).unwrap().game).unwrap().value);

        let m = random_multi_round_game(2, 2, 2, 0.4, &mut rng).unwrap();
        let w = multi_round_value(&m).unwrap().value;
        let o = oracularize_multi_round(&m).unwrap();
        let c = classical_value(&o.game).unwrap().value;
        prop_assert!(w <= c);
        prop_assert!(c <= no_signaling_value(&o.game).unwrap().value);
    }
}
