//! Closed-form identities for the maps `T_0`, `T_1`, checked on random
//! instances against direct iteration.

use betaexp::identities::{extremal_blocks, inverse_images_of_the_endpoints, ones_from_scaled_core};
use betaexp::BetaContext;
use proptest::prelude::*;

fn ctx(b: f64) -> BetaContext {
    BetaContext::from_f64(b).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn ones_from_scaled_core_matches_iteration(b in 1.0001f64..1.9999, n in 0u32..=5, k in 0u32..=10) {
        let r = ones_from_scaled_core(&ctx(b), n, k);
        prop_assert!(r.is_ok(), "{}", r.unwrap_err());
    }

    #[test]
    fn extremal_blocks_bound_every_majority_word(b in 1.0001f64..1.9999, t in 0.0f64..=1.0, k in 0usize..=4) {
        let c = ctx(b);
        let x = c.upper() * t;
        let r = extremal_blocks(&c, x, k);
        prop_assert!(r.is_ok(), "{}", r.unwrap_err());
    }

    #[test]
    fn endpoint_preimages_return_to_the_endpoints(b in 1.0001f64..1.9999, m in 1u32..=12) {
        let r = inverse_images_of_the_endpoints(&ctx(b), m);
        prop_assert!(r.is_ok(), "{}", r.unwrap_err());
    }
}
