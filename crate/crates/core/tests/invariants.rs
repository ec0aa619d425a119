use num_bigint::BigUint;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tensor_orbits::counting::{count_fixed, count_multi, orbit_sum, sigma_space_size};
use tensor_orbits::oracle::{count_orbits_bruteforce, count_orbits_burnside, Limits};
use tensor_orbits::sample::random_spec;
use tensor_orbits::specfile::{canonical_json, parse_spec};
use tensor_orbits::ContractionSpec;

fn small_spec(seed: u64) -> Option<ContractionSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = 1 + (seed % 3) as u32;
    let spec = random_spec(&mut rng, d, 3, 2);
    (sigma_space_size(&spec) <= BigUint::from(20_000u32)).then_some(spec)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn formula_matches_oracles(seed in any::<u64>()) {
        let Some(spec) = small_spec(seed) else { return Ok(()) };
        let formula = count_multi(&spec).unwrap();
        prop_assert_eq!(&formula, &count_orbits_burnside(&spec, Limits::default()).unwrap());
        prop_assert_eq!(&formula, &count_orbits_bruteforce(&spec, Limits::default()).unwrap().count());
    }

    #[test]
    fn count_is_symmetric_in_sides(seed in any::<u64>()) {
        let Some(spec) = small_spec(seed) else { return Ok(()) };
        prop_assert_eq!(count_multi(&spec).unwrap(), count_multi(&spec.swapped()).unwrap());
    }

    #[test]
    fn orbit_sum_is_integral(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = 1 + (seed % 6) as u32;
        let spec = random_spec(&mut rng, d, 4, 4);
        prop_assert!(orbit_sum(&spec).to_rational().is_integer());
    }

    #[test]
    fn spec_files_round_trip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let spec = random_spec(&mut rng, 1 + (seed % 5) as u32, 4, 4);
        prop_assert_eq!(parse_spec(&canonical_json(&spec)).unwrap(), spec);
    }

    #[test]
    fn fixed_order_reduction(d in 1u32..7, n in 1usize..7) {
        let spec = ContractionSpec::fixed_order(d, n).unwrap();
        prop_assert_eq!(count_multi(&spec).unwrap(), count_fixed(d, n as u32).unwrap());
    }
}

#[test]
fn count_is_monotone_in_order() {
    // adding a color never merges invariants: Z^d_n <= Z^{d+1}_n
    for n in 1..=8 {
        for d in 1..8 {
            assert!(count_fixed(d, n).unwrap() <= count_fixed(d + 1, n).unwrap(), "d={d} n={n}");
        }
    }
}
