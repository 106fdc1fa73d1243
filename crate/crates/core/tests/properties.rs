//! Property tests: codec round trips, parse/reassemble identity, and
//! automaton counting against a naive substring scan, over randomized and
//! exhaustive small inputs.

use proptest::prelude::*;

use progtherm::automaton::build_automaton;
use progtherm::machine::{
    decode_core, encode_core, execute, parse_program, BitString, CoreExpr, Marker, Universe,
};

fn small_ids() -> impl Strategy<Value = Vec<u64>> {
    // at most 5 elements of cost <= 10 bits, so cores stay within the 64-bit
    // capacity even with appended noise
    prop::collection::vec(0u64..24, 1..6)
}

proptest! {
    #[test]
    fn encode_decode_round_trip(ids in small_ids()) {
        let expr = CoreExpr::new(ids).unwrap();
        let bits = encode_core(&expr).unwrap();
        prop_assert_eq!(bits.len(), expr.encoded_len());
        let (back, used) = decode_core(&bits).unwrap();
        prop_assert_eq!(used, bits.len());
        prop_assert_eq!(back, expr);
    }

    #[test]
    fn decode_ignores_appended_noise(ids in small_ids(), noise in 0u64..256, noise_len in 0u32..8) {
        let expr = CoreExpr::new(ids).unwrap();
        let mut bits = encode_core(&expr).unwrap();
        if bits.len() + noise_len <= 64 {
            for i in 0..noise_len {
                bits.push(noise >> i & 1 == 1).unwrap();
            }
            let (back, used) = decode_core(&bits).unwrap();
            prop_assert_eq!(back, expr);
            prop_assert_eq!(used, bits.len() - noise_len);
        }
    }

    #[test]
    fn parse_reassembles_constructed_programs(
        ids in prop::collection::vec(0u64..4, 1..5),
        prefix_bits in 0u64..1024,
        prefix_len in 0u32..10,
    ) {
        let universe = Universe::new(4).unwrap();
        let marker = Marker::parse("011").unwrap();
        // marker-free prefix: reject samples containing the marker
        let mut s = BitString::empty();
        for i in 0..prefix_len {
            s.push(prefix_bits >> i & 1 == 1).unwrap();
        }
        prop_assume!(!(0..s.len()).any(|i| s.matches_at(marker.bits(), i)));

        let core = encode_core(&CoreExpr::new(ids.clone()).unwrap()).unwrap();
        let program = s.concat(marker.bits()).unwrap().concat(&core).unwrap();
        let parsed = parse_program(&program, &marker).unwrap();
        prop_assert_eq!(parsed.reassemble(), program);
        prop_assert_eq!(parsed.core, core);
        prop_assert_eq!(parsed.wrapper_len(), s.len() + 3);

        let out = execute(&program, &universe, &marker).unwrap();
        for id in ids {
            prop_assert!(out.contains(id as u32));
        }
    }

    #[test]
    fn avoidance_counts_match_naive_scan(marker_bits in 1u32..16, marker_len in 1u32..5, n in 0u32..12) {
        let mut m = BitString::empty();
        for i in 0..marker_len {
            m.push(marker_bits >> i & 1 == 1).unwrap();
        }
        // only validated markers build automata
        if let Ok(marker) = Marker::new(m) {
            let aut = build_automaton(&marker);
            let naive = BitString::all_of_len(n)
                .filter(|s| !(0..s.len()).any(|i| s.matches_at(marker.bits(), i)))
                .count();
            prop_assert_eq!(aut.count_avoiding(n), naive as u128);
        }
    }
}
