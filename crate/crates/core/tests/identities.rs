use proptest::prelude::*;

use vforge::characters::{character_group, gauss_sum, primitive_characters};
use vforge::expsums::{
    kloosterman, selberg_factorization_check, verify_dft_duality, verify_reciprocity, CharSumParams, DftContext,
    DualityVariant, PhaseSign,
};
use vforge::residue::{gcd, smooth_over};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kloosterman_is_symmetric_and_real(m in -40i64..40, n in -40i64..40, c in 1u64..50) {
        let a = kloosterman(m, n, c);
        let b = kloosterman(n, m, c);
        prop_assert!(a.exact.eq_exact(&b.exact).unwrap());
        prop_assert!(a.numeric.im.abs() < 1e-12);
    }

    #[test]
    fn selberg_identity(m in 1i64..30, n in 1i64..30, c in 1u64..60) {
        prop_assert!(selberg_factorization_check(m, n, c).exact);
    }

    #[test]
    fn reciprocity_on_random_tuples(r in 2u64..16, pick in any::<u64>(), h in -20i64..20, u in 1i64..40, v in 1i64..40) {
        prop_assume!(gcd(u * v, r as i64) == 1);
        let chars = character_group(r).unwrap();
        let psi = chars[(pick % chars.len() as u64) as usize].clone();
        let smooth = smooth_over(r, 60);
        let a = smooth[(pick >> 8) as usize % smooth.len()];
        let b = smooth[(pick >> 16) as usize % smooth.len()];
        let p = CharSumParams::new(psi, h, a, u, b, v).unwrap();
        let c = verify_reciprocity(&p, PhaseSign::Standard).unwrap();
        prop_assert!(c.exact, "r={} a={} b={}", r, a, b);
    }

    #[test]
    fn twist_duality(qi in 0usize..5, l in -4i64..6, m in 1u64..25, c in 1u64..25) {
        let q = [3u64, 4, 5, 7, 8][qi];
        for chi in primitive_characters(q).unwrap() {
            let ctx = DftContext::new(&chi);
            prop_assert!(verify_dft_duality(&ctx, l, m, c, DualityVariant::Standard).unwrap().exact);
        }
    }
}

#[test]
fn gauss_sums_have_unit_root_number() {
    for q in 3..60u64 {
        for chi in primitive_characters(q).unwrap() {
            let g = gauss_sum(&chi);
            assert!((g.epsilon.norm() - 1.0).abs() < 1e-12, "q={q}");
        }
    }
}
